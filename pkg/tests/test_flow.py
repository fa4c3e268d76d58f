import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import TRIANGLE
from quiverdt import flow
from quiverdt.config import RunConfig
from quiverdt.errors import DegenerateFlow, DimensionMismatch, GenericityError
from quiverdt.flow import (UNRESOLVED, canonical, contributing_trees, discrete_flow, encode, enumerate_trees,
                           f_by_limit_tree, f_coefficient, is_binary, leaves, parse_tree, perturb, run_flow)
from quiverdt.quiver import Quiver, pair

K3 = Quiver.kronecker(3)
E12 = ((1, 0), (0, 1))


@pytest.mark.parametrize("r,count", [(1, 1), (2, 1), (3, 3), (4, 15), (5, 105), (6, 945)])
def test_tree_counts(r, count):
    trees = list(enumerate_trees(r))
    assert len(trees) == len(set(trees)) == count


def test_encode_parse_round_trip():
    for tree in enumerate_trees(5):
        assert parse_tree(encode(tree)) == tree
    assert encode(canonical(((2, 1), 0))) == "(1,(2,3))"
    assert parse_tree("(1,2,3)") == (0, 1, 2)
    assert not is_binary(parse_tree("(1,2,3)"))


def test_parse_tree_rejects_garbage():
    for bad in ["(1,", "(1,1)", "1)", "(a,b)", "", "(1,3)", "(0,1)"]:
        with pytest.raises(ValueError):
            parse_tree(bad)


@pytest.mark.parametrize("n", range(1, 7))
def test_kronecker_single_vertex_flow(n):
    q = Quiver.kronecker(n)
    p0 = perturb(q, E12, (1, -1), bound=Fraction(0))
    res = discrete_flow(q, (0, 1), p0)
    assert res.valid
    assert res.times[(0, 1)] == Fraction(1, n)
    assert res.points[(0, 1)] == (0, 0)
    res = discrete_flow(q, (0, 1), perturb(q, E12, (-1, 1), bound=Fraction(0)))
    assert res.status == "invalid" and res.times[(0, 1)] == Fraction(-1, n)


def test_flow_on_wall_is_degenerate():
    res = discrete_flow(K3, (0, 1), perturb(K3, E12, (0, 0), bound=Fraction(0)))
    assert res.status == "degenerate"
    assert "zero time" in res.reason


def test_flow_leaf_count_mismatch():
    with pytest.raises(DimensionMismatch):
        discrete_flow(K3, (0, 1), perturb(K3, ((1, 0),), (0, 0)))


def test_perturbation_properties():
    p = perturb(K3, E12, (1, -1), seed=5, bound=Fraction(1, 1000))
    for g, gh in zip(p.parts, p.charges):
        assert all(abs(gh[i] - g[i]) <= Fraction(1, 1000) for i in range(2))
    total = [sum(c[k] for c in p.charges) for k in range(p.dim)]
    assert pair(p.theta, total) == 0
    assert perturb(K3, E12, (1, -1), seed=5, bound=Fraction(1, 1000)) == p
    assert perturb(K3, E12, (1, -1), seed=6, bound=Fraction(1, 1000)).charges != p.charges
    zero = perturb(K3, E12, (1, -1), bound=Fraction(0))
    assert zero.charges == ((1, 0), (0, 1)) and zero.theta == (1, -1)


@given(st.integers(1, 10**6), st.sampled_from([(1, 1, 1), (1, 2, 1), (2, 1, 1)]))
@settings(max_examples=25, deadline=None)
def test_flow_invariants_on_perturbed_data(seed, g):
    parts = [tuple(int(i == k) for i in range(3)) for k in range(3) for _ in range(g[k])]
    theta = (g[1] + g[2], -g[0], -g[0])
    p = perturb(TRIANGLE, parts, theta, seed=seed)
    for tree, _ in contributing_trees(TRIANGLE, p):
        res = discrete_flow(TRIANGLE, tree, p)
        assert res.valid
        for v, t, point in res.ordered():
            a, b = v
            assert t > 0
            assert pair(point, p.charge(a)) == 0 == pair(point, p.charge(b))


def test_fused_search_matches_brute_force():
    parts = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 1)]
    p = perturb(TRIANGLE, parts, (3, 1, -2), seed=3)
    fused = dict(contributing_trees(TRIANGLE, p))
    brute = {t: flow.multiplicity(TRIANGLE, t, parts) for t in enumerate_trees(4)
             if discrete_flow(TRIANGLE, t, p).valid and flow.multiplicity(TRIANGLE, t, parts)}
    assert fused == brute


def test_f_coefficient_examples():
    assert f_coefficient(K3, [(1, 1)], (1, -1)) == 1
    for n in range(1, 7):
        q = Quiver.kronecker(n)
        assert f_coefficient(q, E12, (1, -1)) == n
        assert f_coefficient(q, E12, (-1, 1)) == 0
    # the stable locus here is a projective line
    assert f_coefficient(TRIANGLE, [(1, 0, 0), (0, 1, 0), (0, 0, 1)], (1, 1, -2)) == 2


def test_f_coefficient_rejects_non_generic_theta():
    with pytest.raises(GenericityError):
        f_coefficient(K3, E12, (0, 0))


def test_permutation_symmetry():
    parts = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 1)]
    values = {flow.run_flow(TRIANGLE, perm, (3, 1, -2), 1).value for perm in itertools.permutations(parts)}
    assert values == {5}


@pytest.mark.parametrize("seed", [1, 7, 99])
@pytest.mark.parametrize("bound", [10**3, 10**4, 10**5])
def test_seed_and_bound_independence(seed, bound):
    parts = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 1)]
    assert run_flow(TRIANGLE, parts, (3, 1, -2), seed, RunConfig(bound=bound)).value == 5


def test_limit_tree_groups():
    assert f_by_limit_tree(K3, E12, (1, -1)) == {(0, 1): 3}
    assert f_by_limit_tree(K3, [(1, 1)], (1, -1)) == {0: 1}
    # several binary trees collapse onto one vertex with three children
    groups = f_by_limit_tree(TRIANGLE, [(1, 0, 0), (0, 1, 0), (0, 0, 2)], (3, 1, -2))
    assert groups == {(0, 1, 2): 6}
    run = run_flow(TRIANGLE, [(1, 0, 0), (0, 1, 0), (0, 0, 2)], (3, 1, -2), 1)
    assert len(run.trees) > 1


def test_limit_groups_sum_to_f():
    parts = [(1, 0, 0), (0, 1, 0), (0, 1, 0), (0, 0, 1), (0, 0, 1)]
    theta = (2, 3, -4)
    groups = f_by_limit_tree(TRIANGLE, parts, theta)
    assert len(groups) == 3
    assert sum(groups.values()) == f_coefficient(TRIANGLE, parts, theta)
    assert UNRESOLVED not in groups
    assert all(sorted(leaves(t)) == list(range(5)) for t in groups)


def test_persistent_degeneracy(monkeypatch):
    def always_degenerate(q, p):
        raise DegenerateFlow("forced")

    monkeypatch.setattr(flow, "contributing_trees", always_degenerate)
    with pytest.raises(DegenerateFlow, match="retries"):
        run_flow(K3, E12, (1, -1), 1, RunConfig(seed_retries=1, escalations=1))

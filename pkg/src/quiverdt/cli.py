"""Command-line interface: ``quiverdt {dt,trees,walls,oracle,tropical,render}``.

Output is deterministic JSON (or DOT / plot-data where offered) on stdout.
Errors print one line ``error[<reason>]: <message>`` on stderr and exit
with the code from EXIT_CODES.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction

from . import dt, flow, io, oracle, render, tropical
from .config import RunConfig
from .errors import ParseError, QuiverDTError
from .quiver import as_covector, pair, walls_and_chamber, walls

EXIT_CODES = {
    "parse": 1,
    "genericity": 2,
    "integrality": 3,
    "not-stability": 4,
    "dimension": 5,
    "not-acyclic": 6,
    "degenerate": 7,
    "perturbation": 7,
    "oracle": 8,
    "tropical-type": 8,
    "missing-entry": 9,
}
OTHER_ERROR = 10


def _config(args) -> RunConfig:
    return RunConfig.from_env(
        seed=args.seed, bound=args.bound, verify=False if args.no_verify else None,
        output=getattr(args, "format", None),
    )


def project(theta, gamma):
    """Move theta into gamma-perp along the dual of the first coordinate where gamma is nonzero."""
    k = next(i for i, x in enumerate(gamma) if x)
    shift = pair(theta, gamma) / gamma[k]
    return tuple(t - shift if i == k else t for i, t in enumerate(theta))


def _theta(args, gamma):
    theta = as_covector(args.theta)
    if len(theta) == len(gamma) and getattr(args, "project", False):
        theta = project(theta, gamma)
    return theta


def _total(parts):
    return tuple(sum(p[k] for p in parts) for k in range(len(parts[0])))


def _chamber_json(chamber):
    return {
        "walls": [list(w.normal) for w in chamber.walls],
        "signs": list(chamber.signs),
    }


def cmd_dt(args) -> str:
    q, table = io.read_quiver(args.quiver)
    if args.attractor:
        _, table = io.read_quiver(args.attractor)
        if table is None:
            raise ParseError(f"{args.attractor}: no attractor entries")
    gamma = args.gamma
    theta = _theta(args, gamma)
    res = dt.omega_theta(q, gamma, theta, table, _config(args))
    out = {
        "gamma": list(res.gamma),
        "theta": io.format_vector(res.theta),
        "omega": res.omega,
        "omega_bar": io.format_rational(res.omega_bar),
        "chamber": _chamber_json(res.chamber),
        "breakdown": [
            {
                "parts": [list(p) for p in t.parts],
                "aut_order": t.aut_order,
                "F": t.F,
                "attractor_product": io.format_rational(t.attractor_product),
                "contribution": io.format_rational(t.contribution),
            }
            for t in res.breakdown
        ],
        "notes": res.notes,
    }
    return io.dumps(out)


def _flow_items(q, parts, theta, cfg):
    """Contributing trees with the flow run and their realizations on the same data."""
    if len(parts) == 1:
        p = flow.perturb(q, parts, theta, bound=Fraction(0))
        return p, [(0, 1, tropical.realize_tree(q, 0, p), None)]
    run = flow.run_flow(q, parts, theta, cfg.seed, cfg)
    items = []
    for tree, m in sorted(run.trees, key=lambda tm: flow.encode(tm[0])):
        items.append((tree, m, tropical.realize_tree(q, tree, run.perturbation),
                      flow.discrete_flow(q, tree, run.perturbation)))
    return run.perturbation, items


def _limit_name(t):
    return t if t == flow.UNRESOLVED else flow.encode(t)


def cmd_trees(args) -> str:
    q, _ = io.read_quiver(args.quiver)
    parts = args.parts
    theta = _theta(args, _total(parts))
    cfg = _config(args)
    flow.check_generic(q, _total(parts), theta)
    p, items = _flow_items(q, parts, theta, cfg)
    if cfg.output != "json":
        return _figure(cfg.output, q, parts, theta, items)
    trees = []
    for tree, m, _, res in items:
        entry = {"tree": flow.encode(tree), "multiplicity": m}
        if res is not None:
            entry["t"] = [io.format_rational(t) for _, t, _ in res.ordered()]
            entry["theta_v"] = [io.format_vector(x[: q.d]) for _, _, x in res.ordered()]
            entry["theta_v_aux"] = [io.format_vector(x[q.d:]) for _, _, x in res.ordered()]
            entry["limit_tree"] = _limit_name(flow.limit_tree(q, tree, parts, theta))
        else:
            entry.update({"t": [], "theta_v": [], "theta_v_aux": [], "limit_tree": flow.encode(tree)})
        trees.append(entry)
    groups = flow.f_by_limit_tree(q, parts, theta, cfg)
    out = {
        "parts": [list(g) for g in parts],
        "theta": io.format_vector(theta),
        "F": sum(m for _, m, _, _ in items),
        "perturbation": {"seed": p.seed, "bound": io.format_rational(p.bound)},
        "trees": trees,
        "groups": [{"limit_tree": _limit_name(t), "F": v}
                   for t, v in sorted(groups.items(), key=lambda kv: _limit_name(kv[0]))],
    }
    return io.dumps(out)


def cmd_walls(args) -> str:
    q, _ = io.read_quiver(args.quiver)
    gamma = args.gamma
    ws = walls(tuple(gamma))
    out = {"gamma": list(gamma), "walls": [{"normal": list(w.normal), "members": [list(m) for m in w.members]}
                                           for w in ws]}
    if args.theta is not None:
        theta = _theta(args, gamma)
        chamber = walls_and_chamber(q, gamma, theta)
        out["theta"] = io.format_vector(theta)
        out["signs"] = list(chamber.signs)
        out["generic"] = chamber.generic
    return io.dumps(out)


def cmd_oracle(args) -> str:
    q, _ = io.read_quiver(args.quiver)
    gamma = args.gamma
    theta = _theta(args, gamma)
    poly = oracle.stable_point_count(q, gamma, theta)
    out = {
        "gamma": list(gamma),
        "theta": io.format_vector(theta),
        "polynomial": oracle.coefficient_list(poly),
        "polynomial_str": str(poly),
        "euler": int(poly(1)),
    }
    return io.dumps(out)


def cmd_tropical(args) -> str:
    q, _ = io.read_quiver(args.quiver)
    parts = args.parts
    theta = _theta(args, _total(parts))
    cfg = _config(args)
    flow.check_generic(q, _total(parts), theta)
    if len(parts) == 1:
        p = flow.perturb(q, parts, theta, bound=Fraction(0))
    else:
        p = flow.run_flow(q, parts, theta, cfg.seed, cfg).perturbation
    run = tropical.tropical_run(q, parts, theta, p, cfg)
    items = [(t, run.multiplicities[t], run.realizations[t], None)
             for t in sorted(run.realizations, key=flow.encode)]
    if cfg.output != "json":
        return _figure(cfg.output, q, parts, theta, items)
    reals = []
    dims = set()
    for tree, m, real, _ in items:
        ok, residuals = tropical.balancing_check(real)
        entry = {
            "tree": flow.encode(tree),
            "status": real.status,
            "multiplicity": m,
            "positions": [io.format_vector(real.positions[v][: q.d]) for v in real.type.vertices],
            "lengths": [io.format_rational(real.lengths[v]) for v in real.type.vertices],
            "balanced": ok,
            "residuals": [io.format_vector(residuals[v]) for v in real.type.vertices],
            "limit_tree": _limit_name(tropical.limit_tree(q, tree, parts, theta)),
        }
        if args.dim:
            fd = tropical.family_dimension(q, tropical.unperturbed_type(q, tree, parts, theta))
            entry["family_dimension"] = fd
            dims.add(fd)
        reals.append(entry)
    out = {
        "parts": [list(g) for g in parts],
        "theta": io.format_vector(theta),
        "N": run.total,
        "realizations": reals,
        "groups": [{"limit_tree": _limit_name(t), "N": v}
                   for t, v in sorted(run.groups.items(), key=lambda kv: _limit_name(kv[0]))],
    }
    if args.dim:
        out["family_dimension"] = dims.pop() if len(dims) == 1 else sorted(dims) or None
    return io.dumps(out)


def _figure(fmt, q, parts, theta, items) -> str:
    # draw the unperturbed (limit) positions when that system is determined
    triples = []
    for t, m, real, _ in items:
        limit = tropical.realize(tropical.unperturbed_type(q, t, parts, theta))
        if limit.positions and not limit.free_parameters:
            real = limit
        triples.append((t, m, real))
    if fmt == "dot":
        return render.dot(parts, triples, q.d)
    return io.dumps(render.plot_data(_total(parts), theta, triples))


def cmd_render(args) -> str:
    if args.format == "json":
        args.format = "dot"
    return cmd_trees(args)


def _add_common(p, gamma=False, parts=False, theta_required=True, fmt=False):
    p.add_argument("--quiver", required=True, help="quiver TOML file")
    if gamma:
        p.add_argument("--gamma", required=True, type=_arg(io.parse_vector), help="dimension vector, e.g. 1,2")
    if parts:
        p.add_argument("--parts", required=True, type=_arg(io.parse_parts), help='parts, e.g. "1,0;0,1"')
    p.add_argument("--theta", required=theta_required, type=_arg(io.parse_covector),
                   help="stability parameter, entries integers or p/q")
    p.add_argument("--project", action="store_true",
                   help="move theta into gamma-perp along the first coordinate where gamma is nonzero")
    p.add_argument("--seed", type=int, default=None, help="perturbation seed (overrides FLOWTREE_SEED)")
    p.add_argument("--bound", type=int, default=None, help="perturbation bound B; entries have size <= 1/B")
    p.add_argument("--no-verify", action="store_true", help="skip the three-seed agreement check")
    if fmt:
        p.add_argument("--format", choices=("json", "dot", "plot-data"), default="json")


def _arg(fn):
    def parse(text):
        try:
            return fn(text)
        except QuiverDTError as exc:
            raise argparse.ArgumentTypeError(str(exc))
    parse.__name__ = fn.__name__
    return parse


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message.replace("\n", " "))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quiverdt", description="Quiver DT invariants from attractor flow trees.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log engine notes to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dt", help="DT invariant Omega of gamma at theta")
    _add_common(p, gamma=True)
    p.add_argument("--attractor", help="TOML file whose attractor entries replace the quiver's")
    p.set_defaults(func=cmd_dt)

    p = sub.add_parser("trees", help="contributing flow trees for a decomposition")
    _add_common(p, parts=True, fmt=True)
    p.set_defaults(func=cmd_trees)

    p = sub.add_parser("walls", help="walls in gamma-perp and the chamber of theta")
    _add_common(p, gamma=True, theta_required=False)
    p.set_defaults(func=cmd_walls)

    p = sub.add_parser("oracle", help="finite-field point count and Euler characteristic")
    _add_common(p, gamma=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("tropical", help="tropical realizations, balancing and family dimension")
    _add_common(p, parts=True, fmt=True)
    p.add_argument("--dim", action="store_true", help="report the family dimension of each type")
    p.set_defaults(func=cmd_tropical)

    p = sub.add_parser("render", help="DOT or plot-data for the realized trees")
    _add_common(p, parts=True, fmt=True)
    p.set_defaults(func=cmd_render)
    return parser


VALUE_FLAGS = ("--gamma", "--theta", "--parts")


def _glue_values(argv: list[str]) -> list[str]:
    # "--theta -1,1" would read -1,1 as an option; pass it as "--theta=-1,1"
    out = []
    i = 0
    while i < len(argv):
        if argv[i] in VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_glue_values(argv))
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        text = args.func(args)
    except QuiverDTError as exc:
        print(f"error[{exc.reason}]: {_one_line(exc)}", file=sys.stderr)
        return EXIT_CODES.get(exc.reason, OTHER_ERROR)
    except (ValueError, ArithmeticError) as exc:
        print(f"error[invalid]: {_one_line(exc)}", file=sys.stderr)
        return OTHER_ERROR
    sys.stdout.write(text)
    return 0


def _one_line(exc) -> str:
    return " ".join(str(exc).split())


if __name__ == "__main__":
    sys.exit(main())

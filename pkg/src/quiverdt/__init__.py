"""Quiver DT invariants from attractor flow trees, with tropical and finite-field cross-checks."""

from .config import RunConfig
from .dt import (DTTable, decompositions, default_attractor_acyclic, integer_from_rational_dt, omega_bar_theta,
                 omega_theta, rational_from_integer_dt)
from .errors import QuiverDTError
from .flow import enumerate_trees, f_by_limit_tree, f_coefficient, perturb
from .oracle import euler_char, stable_point_count
from .quiver import Quiver, attractor_point, divisibility, euler_form, skew_form, walls_and_chamber
from .tropical import balancing_check, family_dimension, realize_tree, tropical_count_N

__all__ = [
    "DTTable", "Quiver", "QuiverDTError", "RunConfig", "attractor_point", "balancing_check", "decompositions",
    "default_attractor_acyclic", "divisibility", "enumerate_trees", "euler_char", "euler_form",
    "f_by_limit_tree", "f_coefficient", "family_dimension", "integer_from_rational_dt", "omega_bar_theta",
    "omega_theta", "perturb", "rational_from_integer_dt", "realize_tree", "skew_form", "stable_point_count",
    "tropical_count_N", "walls_and_chamber",
]

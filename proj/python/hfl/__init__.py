"""Desk-scale laboratory for discrete harmonic maps on groups, affine actions,
expander graphs and spectral fixed-point criteria."""

try:
    from ._hfl import *  # noqa: F401,F403  (installed package layout)
    from ._hfl import Action, Graph, Group  # noqa: F401
except ImportError:  # extension living next to the package (build tree)
    from _hfl import *  # noqa: F401,F403
    from _hfl import Action, Graph, Group  # noqa: F401

__all__ = [
    "Action",
    "Graph",
    "Group",
    "concentration_experiment",
    "displacement",
    "extract_relators",
    "find_fixed_point",
    "fit_mixture",
    "flow",
    "laplacian",
    "link_kappa2",
    "local_energy",
    "min_energy_vector",
    "n_step_energy",
    "near_critical_search",
    "nowak_certified",
    "operator_norm",
    "pushforward_walk",
    "renorm_estimate",
    "run_suite",
    "solve_harmonic",
    "verify_growth",
]

"""Numerical gluing of chart-local star products on toy covers of R^n."""

from .jets import Jet, JetSpace, jet_space
from .smooth import SmoothFunc, from_expr, from_poly
from .diffop import (DiffOp, LocalStar, apply_diffop, compose_diffops, exp_diffop,
                     invert_diffop)
from .cover import Chart, ChartCover, glued_star
from .checks import (GlueReport, associativity_check, chart_choice_check,
                     chart_consistency_check, cocycle_check, continuity_check,
                     partition_change_difference, partition_check, tangentiality_probe)
from .fixtures import load_fixture, load_fixture_doc

__all__ = [
    "Jet", "JetSpace", "jet_space", "SmoothFunc", "from_expr", "from_poly",
    "DiffOp", "LocalStar", "apply_diffop", "compose_diffops", "exp_diffop", "invert_diffop",
    "Chart", "ChartCover", "glued_star", "GlueReport", "associativity_check",
    "chart_choice_check", "chart_consistency_check", "cocycle_check", "continuity_check",
    "partition_change_difference", "partition_check", "tangentiality_probe",
    "load_fixture", "load_fixture_doc",
]

"""Exact finite-depth laboratory for randomness with respect to measures on
binary sequences: measures and their consistency, a joint measure built from
a halting table, likelihood-ratio martingales, and randomness tests."""
from .errors import RandlabError
from .measures import (
    JointMeasure,
    Measure,
    bernoulli,
    check_consistency,
    conditional,
    conditional_trace,
    joint_table,
    point_mass,
    product,
    table_measure,
    uniform,
    uniform_product,
)
from .example import ExampleParams, MachineTable, build_example, conditional_deviation, verify_ratio_bounds
from .reports import Report

__all__ = [
    "RandlabError", "Measure", "JointMeasure", "uniform", "bernoulli", "point_mass", "table_measure",
    "product", "uniform_product", "joint_table", "conditional", "conditional_trace", "check_consistency",
    "MachineTable", "ExampleParams", "build_example", "conditional_deviation", "verify_ratio_bounds",
    "Report",
]
__version__ = "0.1.0"

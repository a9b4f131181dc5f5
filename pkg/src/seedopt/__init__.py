"""Optimal seeds for finite self-replicating generation systems."""
from .graph import SeedGraph, SubsetKey, build_graph, export_dot, seed_vertices
from .model import (
    CostSchema,
    CostVector,
    Diagnostic,
    GenerationRule,
    GenerationSystem,
    MachineSpec,
    generate,
    is_self_replicating,
    validate_system,
)
from .solver import Mode, Objective, enumerate_simple_paths, path_cost, rank_seeds

__version__ = "0.1.0"

__all__ = [
    "CostSchema",
    "CostVector",
    "Diagnostic",
    "GenerationRule",
    "GenerationSystem",
    "MachineSpec",
    "Mode",
    "Objective",
    "SeedGraph",
    "SubsetKey",
    "build_graph",
    "enumerate_simple_paths",
    "export_dot",
    "generate",
    "is_self_replicating",
    "path_cost",
    "rank_seeds",
    "seed_vertices",
    "validate_system",
]

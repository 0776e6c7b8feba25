"""Polynomial functors on pointed algebraic theories over Z/m.

Cross-effects, deviations, the labyrinth category Laby(A), the evaluation
functor Phi and its inverse, degree detection, and quadratic data.
"""

__version__ = "0.1.0"

from .algebra import AlgebraError, ExactMatrix, NotInSpan, RingSpec
from .crosseffects import (
    ce_basis,
    ce_dim,
    covering_subsets,
    decomposition,
    degree,
    deviate,
    deviation_formula_check,
    kernel_equals_image,
)
from .functors import Functor, FunctorError, GuardError, build, nat_transform, table_functor
from .laby import Maze, MazeSum, Passage, StructuredMaze, compose, identity, normalize, truncate
from .phi import (
    InvariantViolation,
    Phi,
    annihilation_profile,
    eval_maze,
    eval_sum,
    functoriality_check,
    phi_on_nat,
    reconstruct,
    roundtrip_check,
)
from .quadratic import QuadData, extract, generator, laby2_hom_basis, law_table_check

__all__ = [
    "AlgebraError", "ExactMatrix", "NotInSpan", "RingSpec",
    "ce_basis", "ce_dim", "covering_subsets", "decomposition", "degree", "deviate",
    "deviation_formula_check", "kernel_equals_image",
    "Functor", "FunctorError", "GuardError", "build", "nat_transform", "table_functor",
    "Maze", "MazeSum", "Passage", "StructuredMaze", "compose", "identity", "normalize", "truncate",
    "InvariantViolation", "Phi", "annihilation_profile", "eval_maze", "eval_sum",
    "functoriality_check", "phi_on_nat", "reconstruct", "roundtrip_check",
    "QuadData", "extract", "generator", "laby2_hom_basis", "law_table_check",
]

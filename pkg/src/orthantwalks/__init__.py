"""Uniform random sampling of weighted 3D lattice walks confined to the
first orthant, including reluctant models where naive rejection fails.

The pipeline projects the model onto a well-chosen half-space, samples
the resulting 1D nonnegative walks through a grammar-driven Boltzmann
sampler at its dominant singularity, lifts words back to 3D, and rejects
walks that leave the orthant.  Exact big-integer counting oracles verify
every stage.
"""
__version__ = "0.1.0"

from ._kernels import BACKEND, available_backends
from .boltzmann import evaluate_gf, sample_in_window, sample_word
from .grammar import build_meander_grammar, count_meanders_dp, grammar_counts
from .halfspace import (
    analyze_1d,
    minimize_inventory,
    project_stepset,
    projection_vector,
    rationalize,
    stepset1d_from_values,
)
from .pipeline import (
    assemble_pipeline,
    count_orthant_walks,
    endpoint_rmse,
    in_orthant,
    lift,
    naive_sample,
    sample_orthant_walks,
)
from .stepsets import (
    Step3,
    WeightedStepSet3,
    drift,
    inventory_eval,
    inventory_grad,
    validate_stepset,
)

__all__ = [
    "BACKEND",
    "available_backends",
    "Step3",
    "WeightedStepSet3",
    "validate_stepset",
    "drift",
    "inventory_eval",
    "inventory_grad",
    "minimize_inventory",
    "projection_vector",
    "rationalize",
    "project_stepset",
    "analyze_1d",
    "stepset1d_from_values",
    "build_meander_grammar",
    "grammar_counts",
    "count_meanders_dp",
    "evaluate_gf",
    "sample_word",
    "sample_in_window",
    "assemble_pipeline",
    "sample_orthant_walks",
    "naive_sample",
    "count_orthant_walks",
    "endpoint_rmse",
    "lift",
    "in_orthant",
]

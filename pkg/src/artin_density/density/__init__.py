"""Densities of primes with prescribed primitive roots."""
from .engine import (
    character_sum_engine,
    closed_form_58,
    entanglement,
    entanglement_multi,
    entanglement_rank_r,
    identity_410,
    schinzel_closed_form,
)
from .local import (
    field_degree,
    generic_family,
    k_p,
    local_data,
    naive_density,
    naive_multi,
    naive_rank_r,
    nongeneric_primes,
    two_adic_character,
)
from .oracle import (
    DEFAULT_MODEL_BOUND,
    ModelTooLargeError,
    finite_model_count,
    finite_model_oracle,
    jacobi,
    kernel_union_count,
    kronecker,
    rank1_inclusion_exclusion,
)
from .problem import DensityReport, Kind, LocalData, NaiveDensity, ProblemSpec, Verdict
from .report import restricted_density, schinzel_density, total_density
from .vanishing import cube_relations, shortcut_applies, vanishing_verdict

__all__ = [
    "DEFAULT_MODEL_BOUND",
    "DensityReport",
    "Kind",
    "LocalData",
    "ModelTooLargeError",
    "NaiveDensity",
    "ProblemSpec",
    "Verdict",
    "character_sum_engine",
    "closed_form_58",
    "cube_relations",
    "entanglement",
    "entanglement_multi",
    "entanglement_rank_r",
    "field_degree",
    "finite_model_count",
    "finite_model_oracle",
    "generic_family",
    "identity_410",
    "jacobi",
    "k_p",
    "kernel_union_count",
    "kronecker",
    "local_data",
    "naive_density",
    "naive_multi",
    "naive_rank_r",
    "nongeneric_primes",
    "rank1_inclusion_exclusion",
    "restricted_density",
    "schinzel_closed_form",
    "schinzel_density",
    "shortcut_applies",
    "total_density",
    "two_adic_character",
    "vanishing_verdict",
]

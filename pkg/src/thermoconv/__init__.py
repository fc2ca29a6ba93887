"""Exact and second-order interconversion of energy-incoherent states
under thermal operations.

The library answers three questions about converting n copies of a state p
into m copies of a state q at inverse temperature beta:

* exactly, at finite n: the least infidelity and the best rate m/n,
  through embedded majorisation and an edge-accelerated optimal-majorising
  construction (``iid``, ``conversion``, ``majorization``);
* asymptotically, to second order: rate expansions governed by the
  Rayleigh-normal family (``rayleigh``, ``asymptotics``);
* thermodynamically: work distillation and formation gaps, reversibility,
  and heat-engine efficiency with finite working bodies (``thermo``).
"""

from .asymptotics import (
    RateExpansion,
    Regime,
    flat_to_flat_exact_rate,
    irreversibility_nu,
    rate_expansion,
    second_order_rate,
)
from .conversion import (
    MajorizationWitness,
    TVWitness,
    min_interconversion_infidelity,
    optimal_majorizing,
    smoothed_target,
    tv_pre_witness,
)
from .distributions import (
    FLOAT,
    RATIONAL,
    CompressedDistribution,
    Distribution,
    ThermalSystem,
    fidelity,
    gibbs_state,
    heat_capacity,
    infidelity,
    rational_gibbs_weights,
    rel_entropy,
    rel_entropy_variance,
    shannon_entropy,
    tv_distance,
)
from .iid import (
    ConversionInstance,
    MonotonicityError,
    optimal_infidelity,
    optimal_rate,
    tensor_power,
    total_states,
)
from .majorization import (
    EmbeddingSpec,
    embed,
    embed_dense,
    lorenz_curve,
    majorizes,
    thermo_majorizes,
    unembed,
)
from .rayleigh import (
    RayleighNormalParams,
    alpha_root,
    rayleigh_normal_cdf,
    rayleigh_normal_inverse,
    std_normal_cdf,
    threshold_infidelity,
)
from .thermo import (
    ALPHA_CURVATURE,
    EnginePerformance,
    EngineSetup,
    WorkReport,
    carnot_work,
    combined_error_bound,
    distillable_work,
    engine_error_rate,
    engine_nu,
    engine_performance,
    matched_variance_temperature,
    reversibility_rate,
    thermal_work_gap,
    work_gap,
    work_of_formation,
    work_report,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHA_CURVATURE",
    "CompressedDistribution",
    "ConversionInstance",
    "Distribution",
    "EmbeddingSpec",
    "EnginePerformance",
    "EngineSetup",
    "FLOAT",
    "MajorizationWitness",
    "MonotonicityError",
    "RATIONAL",
    "RateExpansion",
    "RayleighNormalParams",
    "Regime",
    "TVWitness",
    "ThermalSystem",
    "WorkReport",
    "alpha_root",
    "carnot_work",
    "combined_error_bound",
    "distillable_work",
    "embed",
    "embed_dense",
    "engine_error_rate",
    "engine_nu",
    "engine_performance",
    "fidelity",
    "flat_to_flat_exact_rate",
    "gibbs_state",
    "heat_capacity",
    "infidelity",
    "irreversibility_nu",
    "lorenz_curve",
    "majorizes",
    "matched_variance_temperature",
    "min_interconversion_infidelity",
    "optimal_infidelity",
    "optimal_majorizing",
    "optimal_rate",
    "rate_expansion",
    "rational_gibbs_weights",
    "rayleigh_normal_cdf",
    "rayleigh_normal_inverse",
    "rel_entropy",
    "rel_entropy_variance",
    "reversibility_rate",
    "second_order_rate",
    "shannon_entropy",
    "smoothed_target",
    "std_normal_cdf",
    "tensor_power",
    "thermal_work_gap",
    "thermo_majorizes",
    "threshold_infidelity",
    "total_states",
    "tv_distance",
    "tv_pre_witness",
    "unembed",
    "work_gap",
    "work_of_formation",
    "work_report",
]

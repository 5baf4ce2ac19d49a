"""Free-space optical link analysis toolkit.

Models irradiance fading as a finite mixture of two-gamma product channels
with an optional line-of-sight blockage state, plus the Gaussian-beam
geometry that drives the blockage classification, outage probability with
its large-SNR behaviour, and a Monte Carlo validation layer.
"""

__version__ = "0.1.0"

from .beam import (
    BeamScenario,
    BlockageClass,
    PlaneWaveValidityWarning,
    beam_radius,
    classify_blockage,
    coherence_radius,
    effective_beam_radius,
    rytov_variance,
)
from .errors import (
    AccuracyError,
    BracketError,
    DegenerateModelError,
    DegenerateParameterError,
    DomainError,
    GofFailure,
)
from .malaga import (
    BlockageConfig,
    MalagaParams,
    MixtureExpansion,
    coupling_probability,
    gamma_gamma_cdf,
    gamma_gamma_mgf,
    gamma_gamma_pdf,
    gk_cdf,
    gk_mgf,
    gk_pdf,
    malaga_blockage_cdf,
    malaga_blockage_mgf,
    malaga_blockage_pdf,
    malaga_cdf,
    malaga_mgf,
    malaga_pdf,
    mixture_weights,
)
from .montecarlo import (
    GofResult,
    McConfig,
    McOutageEstimate,
    McSummary,
    chunk_plan,
    chunk_rng,
    collect_samples,
    empirical_outage,
    gof_chisquare,
    gof_ks,
    sample_chunk,
    sample_irradiance,
    summarize,
    summarize_values,
)
from .outage import (
    OutageResult,
    SnrPoint,
    asymptotic_from_coeff,
    asymptotic_outage,
    gain_coefficient,
    max_power_penalty,
    outage_exact,
    power_penalty,
    required_gamma_n,
    rho_one_outage,
    subchannel_diversity,
)
from .special_math import (
    AccuracyBudget,
    bessel_k,
    bessel_k_log,
    kummer_1f1,
    ln_gamma,
    lower_incomplete_gamma_regularized,
    tricomi_u,
)

__all__ = [
    "__version__",
    # fading statistics
    "MalagaParams", "BlockageConfig", "MixtureExpansion", "mixture_weights",
    "coupling_probability", "gk_pdf", "gk_cdf", "gk_mgf",
    "malaga_pdf", "malaga_cdf", "malaga_mgf",
    "malaga_blockage_pdf", "malaga_blockage_cdf", "malaga_blockage_mgf",
    "gamma_gamma_pdf", "gamma_gamma_cdf", "gamma_gamma_mgf",
    # beam geometry
    "BeamScenario", "BlockageClass", "PlaneWaveValidityWarning",
    "beam_radius", "effective_beam_radius", "rytov_variance",
    "coherence_radius", "classify_blockage",
    # outage
    "SnrPoint", "OutageResult", "outage_exact", "asymptotic_outage",
    "asymptotic_from_coeff", "gain_coefficient", "subchannel_diversity",
    "power_penalty", "max_power_penalty", "required_gamma_n",
    "rho_one_outage",
    # Monte Carlo
    "McConfig", "McSummary", "McOutageEstimate", "GofResult",
    "chunk_plan", "chunk_rng", "sample_chunk", "sample_irradiance",
    "collect_samples", "summarize", "summarize_values", "empirical_outage",
    "gof_chisquare", "gof_ks",
    # special functions
    "AccuracyBudget", "ln_gamma", "bessel_k", "bessel_k_log",
    "kummer_1f1", "tricomi_u", "lower_incomplete_gamma_regularized",
    # errors
    "DomainError", "DegenerateModelError", "DegenerateParameterError",
    "AccuracyError", "BracketError", "GofFailure",
]

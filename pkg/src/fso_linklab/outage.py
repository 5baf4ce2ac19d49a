"""Outage probability, diversity behavior and blockage power penalties.

An outage happens when the instantaneous electrical SNR falls below a
threshold, which for an intensity-modulated link is the event that the
irradiance drops under gamma_n^(-1/2) with gamma_n the normalized SNR.
Exact values come from the mixture distribution function; large-SNR
behavior is captured by a diversity order and gain coefficient per
sub-channel, and the blockage cost is summarized as a decibel power
penalty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq
from scipy.special import gammaln

from .errors import BracketError, DegenerateParameterError, DomainError
from .malaga import BlockageConfig, MixtureExpansion, gamma_gamma_cdf, gk_cdf
from .special_math import AccuracyBudget

_GAMMA_N_BRACKET = (1.0, 1e20)  # 0 dB to 200 dB


@dataclass(frozen=True)
class SnrPoint:
    """Electrical SNR operating point: nominal gamma0 against threshold gamma_th."""

    gamma0: float
    gamma_th: float = 1.0

    def __post_init__(self) -> None:
        if self.gamma0 <= 0.0:
            raise DomainError(f"gamma0 must be > 0, got {self.gamma0}")
        if self.gamma_th <= 0.0:
            raise DomainError(f"gamma_th must be > 0, got {self.gamma_th}")

    @property
    def gamma_n(self) -> float:
        """Normalized SNR, the single number the outage curves depend on."""
        return self.gamma0 / self.gamma_th

    @property
    def gamma_n_db(self) -> float:
        return 10.0 * math.log10(self.gamma_n)

    @classmethod
    def from_db(cls, gamma_n_db: float) -> "SnrPoint":
        return cls(gamma0=10.0 ** (gamma_n_db / 10.0), gamma_th=1.0)


@dataclass
class OutageResult:
    """Outage at one SNR point, with its large-SNR decomposition.

    per_subchannel rows are (order, weight, outage-of-that-branch);
    blockage_pout is the outage of the scatter-only blocked branch. The
    convex recombination of those pieces reproduces `exact` to rounding.
    asymptotic and gain_coeff are None when the large-scale shape is <= 1,
    where the first-order gain diverges.
    """

    exact: float
    asymptotic: float | None
    diversity_order: float
    gain_coeff: float | None
    blockage_pout: float
    per_subchannel: list[tuple[int, float, float]]


def gain_coefficient(expansion: MixtureExpansion, blockage: BlockageConfig) -> float:
    """Large-SNR gain coefficient of the blocked/unblocked combination.

    The outage behaves like gain * gamma_n^(-1/2) once gamma_n is large;
    both the blocked branch and the lowest mixture order decay with
    diversity 1/2 in SNR, so they set the coefficient together.
    """
    alpha = expansion.alpha
    if alpha <= 1.0:
        raise DomainError("gain coefficient diverges for alpha <= 1")
    lead = alpha / (alpha - 1.0)
    m1 = float(expansion.weights[0])
    mu1 = float(expansion.means[0])
    return lead * (blockage.p_b / expansion.xi_g + (1.0 - blockage.p_b) * m1 / mu1)


def outage_exact(
    snr: SnrPoint,
    expansion: MixtureExpansion,
    blockage: BlockageConfig,
    budget: AccuracyBudget | None = None,
) -> OutageResult:
    """Exact outage probability at one SNR point, with its decomposition."""
    x = snr.gamma_n ** -0.5
    alpha = expansion.alpha
    blocked = float(gk_cdf(x, alpha, 1.0, expansion.xi_g, budget))
    per: list[tuple[int, float, float]] = []
    unblocked = 0.0
    for order, (w, mu) in enumerate(zip(expansion.weights, expansion.means), start=1):
        pk = float(gk_cdf(x, alpha, float(order), float(mu), budget))
        per.append((order, float(w), pk))
        unblocked += float(w) * pk
    exact = blockage.p_b * blocked + (1.0 - blockage.p_b) * unblocked
    if alpha > 1.0:
        gain = gain_coefficient(expansion, blockage)
        asym = gain * x
    else:
        gain = None
        asym = None
    return OutageResult(
        exact=exact, asymptotic=asym, diversity_order=1.0, gain_coeff=gain,
        blockage_pout=blocked, per_subchannel=per)


def subchannel_diversity(alpha: float, k: float, mean: float) -> tuple[float, float]:
    """Diversity order and gain coefficient of one generalized-K branch.

    The diversity order is d = min(alpha, k). The gain b is normalized as the
    transform-tail limit, s^d * E[exp(-s I)] -> b as s grows; equivalently
    the branch outage decays like (b / Gamma(d+1)) * gamma_n^(-d/2). For the
    order-1 branches driving the overall asymptote the two conventions
    coincide. Equal shapes sit on a pole of the coefficient and raise
    DegenerateParameterError (nudge one shape).
    """
    if alpha <= 0.0 or k <= 0.0 or mean <= 0.0:
        raise DomainError("alpha, k, mean must all be > 0")
    gap = alpha - k
    if abs(gap) < 1e-9:
        raise DegenerateParameterError(
            f"alpha = k = {alpha}: branch gain has a pole, nudge a shape")
    d = min(alpha, k)
    rate = alpha * k / mean
    if alpha < k:
        b = math.exp(gammaln(k - alpha) - gammaln(k) + alpha * math.log(rate))
    else:
        b = math.exp(gammaln(alpha - k) - gammaln(alpha) + k * math.log(rate))
    return d, b


def asymptotic_outage(
    snr: SnrPoint, expansion: MixtureExpansion, blockage: BlockageConfig
) -> float:
    """First-order large-SNR outage, gain * gamma_n^(-1/2).

    The lowest mixture order is always populated and the blocked branch has
    order one as well, so the overall diversity order is 1 (slope one half
    decade of outage per 10 dB).
    """
    return gain_coefficient(expansion, blockage) * snr.gamma_n ** -0.5


def asymptotic_from_coeff(gamma_n: float, gain: float, diversity: float = 1.0) -> float:
    """Generic large-SNR law gain * gamma_n^(-diversity/2) for one branch."""
    if gamma_n <= 0.0:
        raise DomainError("gamma_n must be > 0")
    return gain * gamma_n ** (-0.5 * diversity)


def _penalty_ratio(expansion: MixtureExpansion) -> float:
    if expansion.alpha <= 1.0:
        raise DomainError("power penalty is defined through the large-SNR "
                          "asymptote, which needs alpha > 1")
    m1 = float(expansion.weights[0])
    mu1 = float(expansion.means[0])
    return mu1 / (expansion.xi_g * m1)


def power_penalty(expansion: MixtureExpansion, blockage: BlockageConfig) -> float:
    """Extra transmit power (dB) needed to hold the outage level under blockage.

    Ratio of the SNRs required with and without blockage at a fixed target,
    evaluated on the large-SNR asymptote where it no longer depends on the
    target itself.
    """
    r = _penalty_ratio(expansion)
    return 20.0 * math.log10(1.0 + blockage.p_b * (r - 1.0))


def max_power_penalty(expansion: MixtureExpansion) -> float:
    """Power penalty ceiling, reached when the line of sight is always blocked."""
    return 20.0 * math.log10(_penalty_ratio(expansion))


def rho_one_outage(
    snr: SnrPoint, alpha: float, beta: float, blockage: BlockageConfig,
    budget: AccuracyBudget | None = None,
) -> float:
    """Outage in the fully coupled limit, where mixtures degenerate.

    With all scatter coupled, a blocked line of sight leaves no received
    power at all, so blockage contributes its full probability as an outage
    floor on top of the two-gamma product channel.
    """
    x = snr.gamma_n ** -0.5
    return blockage.p_b + (1.0 - blockage.p_b) * float(
        gamma_gamma_cdf(x, alpha, beta, 1.0, budget))


def required_gamma_n(
    target_pout: float,
    expansion: MixtureExpansion,
    blockage: BlockageConfig,
    mode: str = "exact",
    budget: AccuracyBudget | None = None,
) -> float:
    """Normalized SNR that hits a target outage probability.

    mode "exact" inverts the exact curve by root finding on the 0-200 dB
    bracket (answer matches the target to 1e-10 relative); "asymptotic"
    inverts the closed-form large-SNR law. Targets not reachable inside the
    bracket raise BracketError.
    """
    if not 0.0 < target_pout < 1.0:
        raise DomainError(f"target outage must be in (0, 1), got {target_pout}")
    lo, hi = _GAMMA_N_BRACKET
    if mode == "asymptotic":
        gain = gain_coefficient(expansion, blockage)
        gamma_n = (gain / target_pout) ** 2
        if not lo <= gamma_n <= hi:
            raise BracketError(
                f"asymptotic answer {gamma_n:.3e} falls outside [0, 200] dB")
        return gamma_n
    if mode != "exact":
        raise DomainError(f"mode must be 'exact' or 'asymptotic', got {mode!r}")

    def log_excess(u: float) -> float:
        point = SnrPoint(gamma0=10.0 ** u)
        val = outage_exact(point, expansion, blockage, budget).exact
        if val <= 0.0:
            return -745.0 - math.log(target_pout)
        return math.log(val) - math.log(target_pout)

    f_lo = log_excess(math.log10(lo))
    f_hi = log_excess(math.log10(hi))
    if f_lo < 0.0 or f_hi > 0.0:
        raise BracketError(
            f"target {target_pout} not reachable on the [0, 200] dB bracket")
    u = brentq(log_excess, math.log10(lo), math.log10(hi), xtol=1e-11, rtol=9e-16)
    return 10.0 ** u

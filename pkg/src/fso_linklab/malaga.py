"""Composite irradiance fading for an optical link, with line-of-sight blockage.

The received irradiance is modeled as the product of a gamma-distributed
large-scale factor and a small-scale factor built from a coherent component
plus scattered power. That composite law is exactly a mixture of
generalized-K (gamma times gamma) channels: a finite mixture when the
small-scale shape ``beta`` is a natural number, an infinite negative-binomial
mixture otherwise. Blockage of the line of sight removes the coherent part
and leaves the purely scattered channel, so the blocked/unblocked composite
is a two-branch convex combination.

Everything here works on the mixture representation: build it once with
:func:`mixture_weights`, then evaluate densities, distribution functions and
Laplace transforms of the irradiance through it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import gammaln, gammasgn, kve, roots_laguerre

from .errors import (
    AccuracyError,
    DegenerateModelError,
    DegenerateParameterError,
    DomainError,
)
from .special_math import DEFAULT_BUDGET, AccuracyBudget, bessel_k_log, tricomi_u

_EPS = float(np.finfo(float).eps)

# series/quadrature switch for the generalized-K distribution function:
# past this value of B*x the ascending series loses digits to cancellation
_CDF_SERIES_LIMIT = 81.0

_INTEGER_GAP_TOL = 1e-9
_ALPHA_NUDGE = 1e-6


@dataclass(frozen=True)
class MalagaParams:
    """Physical parameters of the composite fading law.

    alpha : float
        Large-scale shape, > 0.
    beta : float
        Small-scale shape, >= 1. Treated as natural when within 1e-9 of an
        integer, which selects the exact finite mixture.
    rho : float
        Fraction of scattered power coupled to the coherent component, in
        [0, 1]. rho = 1 collapses the model to the two-gamma product law;
        mixture construction refuses it and points at the gamma_gamma_*
        functions.
    omega : float
        Average power of the coherent component, >= 0.
    xi : float
        Total average scattered power, > 0.
    delta_phi : float
        Phase offset between the coherent and coupled scattered fields.
    normalize : bool
        When True (default) the power pair (omega, xi) is rescaled so the
        unblocked mean irradiance is exactly 1.
    """

    alpha: float
    beta: float
    rho: float
    omega: float
    xi: float
    delta_phi: float = 0.0
    normalize: bool = True

    def __post_init__(self) -> None:
        if self.alpha <= 0.0:
            raise DomainError(f"alpha must be > 0, got {self.alpha}")
        if self.beta < 1.0:
            raise DomainError(f"beta must be >= 1, got {self.beta}")
        if not 0.0 <= self.rho <= 1.0:
            raise DomainError(f"rho must be in [0, 1], got {self.rho}")
        if self.omega < 0.0:
            raise DomainError(f"omega must be >= 0, got {self.omega}")
        if self.xi <= 0.0:
            raise DomainError(f"xi must be > 0, got {self.xi}")

    @property
    def natural_beta(self) -> bool:
        return abs(self.beta - round(self.beta)) < _INTEGER_GAP_TOL

    def _raw_components(self) -> tuple[float, float, float]:
        xi_c = self.rho * self.xi
        xi_g = (1.0 - self.rho) * self.xi
        omega_prime = (
            self.omega + xi_c
            + 2.0 * math.sqrt(self.omega * xi_c) * math.cos(self.delta_phi)
        )
        return xi_c, xi_g, omega_prime

    @property
    def xi_g(self) -> float:
        """Scattered power not coupled to the coherent component (scaled)."""
        _, xi_g, omega_prime = self._raw_components()
        if self.normalize:
            return xi_g / (omega_prime + xi_g)
        return xi_g

    @property
    def omega_prime(self) -> float:
        """Average power of the coherent plus coupled-scatter field (scaled)."""
        _, xi_g, omega_prime = self._raw_components()
        if self.normalize:
            return omega_prime / (omega_prime + xi_g)
        return omega_prime

    @property
    def mean(self) -> float:
        """Mean irradiance of the unblocked channel."""
        return self.omega_prime + self.xi_g


@dataclass(frozen=True)
class BlockageConfig:
    """Line-of-sight blockage: the coherent path is lost with probability p_b."""

    p_b: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_b <= 1.0:
            raise DomainError(f"p_b must be in [0, 1], got {self.p_b}")


@dataclass(eq=False)
class MixtureExpansion:
    """Generalized-K mixture representation of the unblocked channel.

    weights[j], means[j] describe the sub-channel of small-scale order j+1.
    alpha carries the (possibly nudged, see mixture_weights) large-scale
    shape used for every branch; xi_g is the mean of the blocked branch.
    tail_mass is the weight mass beyond the last emitted branch of an
    infinite expansion, at most the epsilon it was built with.
    """

    weights: np.ndarray
    means: np.ndarray
    alpha: float
    xi_g: float
    omega_prime: float
    beta: float
    p: float
    natural: bool
    tail_mass: float = 0.0

    @property
    def orders(self) -> np.ndarray:
        return np.arange(1, len(self.weights) + 1)


def coupling_probability(params: MalagaParams) -> float:
    """Success probability driving the mixture weights.

    Equals the share of the coherent-branch power in the total
    branch-weighted power; 0 when there is no coherent power, 1 in the
    fully coupled limit.
    """
    xi_g = params.xi_g
    omega_prime = params.omega_prime
    denom = omega_prime + params.beta * xi_g
    if denom == 0.0:
        raise DegenerateModelError("no received power: omega' and xi_g are both zero")
    return omega_prime / denom


def _nudged_alpha(alpha: float) -> float:
    # integer alpha makes alpha-k an integer for every branch order, which is
    # a pole of the distribution-function series; shift it by a hair
    if abs(alpha - round(alpha)) < _INTEGER_GAP_TOL:
        return alpha + _ALPHA_NUDGE
    return alpha


def mixture_weights(
    params: MalagaParams, epsilon: float = 1e-8, k_max: int = 200
) -> MixtureExpansion:
    """Build the generalized-K mixture for the unblocked channel.

    Natural beta gives the exact binomial mixture of beta branches. Real
    beta gives the negative-binomial expansion, accumulated until the
    remaining weight mass is at most epsilon; weights are kept as computed,
    never renormalized. If that takes more than k_max branches, an
    AccuracyError reports the stranded tail mass instead of returning a
    silently biased expansion.

    Raises DegenerateModelError when rho = 1: the scattered-only branch
    vanishes there, use the gamma_gamma_* functions for that limit.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must be in (0, 1), got {epsilon}")
    if not params.natural_beta and epsilon > 1e-3:
        raise DomainError(
            f"epsilon must be <= 1e-3 for non-integer beta, got {epsilon}")
    if k_max < 1:
        raise DomainError(f"k_max must be >= 1, got {k_max}")
    xi_g = params.xi_g
    omega_prime = params.omega_prime
    if xi_g == 0.0:
        raise DegenerateModelError(
            "rho = 1 leaves no uncoupled scatter; the channel is the plain "
            "two-gamma product law, see gamma_gamma_pdf/gamma_gamma_cdf")
    p = coupling_probability(params)
    alpha = _nudged_alpha(params.alpha)
    beta = params.beta

    if params.natural_beta:
        n = int(round(beta))
        orders = np.arange(1, n + 1, dtype=float)
        # binomial weights over branch order, exact in log space
        lw = (
            gammaln(n) - gammaln(orders) - gammaln(n - orders + 1.0)
            + np.where(orders > 1, (orders - 1.0) * np.log(p if p > 0.0 else 1.0), 0.0)
            + np.where(orders < n, (n - orders) * np.log1p(-p if p < 1.0 else 0.0), 0.0)
        )
        weights = np.exp(lw)
        if p == 0.0:
            weights = np.zeros(n)
            weights[0] = 1.0
        elif p == 1.0:
            weights = np.zeros(n)
            weights[-1] = 1.0
        means = orders * (xi_g + omega_prime / n)
        return MixtureExpansion(
            weights=weights, means=means, alpha=alpha, xi_g=xi_g,
            omega_prime=omega_prime, beta=beta, p=p, natural=True)

    # negative-binomial expansion; weight of order k is
    # Gamma(beta+k-1)/(Gamma(k)Gamma(beta)) p^(k-1) (1-p)^beta
    lbeta = gammaln(beta)
    lp = np.log(p) if p > 0.0 else -np.inf
    l1p = beta * np.log1p(-p)
    weights_list: list[float] = []
    acc = 0.0
    k = 0
    while k < k_max:
        k += 1
        lw = gammaln(beta + k - 1.0) - gammaln(k) - lbeta + l1p
        if k > 1:
            lw += (k - 1.0) * lp
        w = math.exp(lw)
        weights_list.append(w)
        acc += w
        if 1.0 - acc <= epsilon:
            break
    tail = max(1.0 - acc, 0.0)
    if tail > epsilon:
        raise AccuracyError(
            f"negative-binomial expansion still holds {tail:.3e} weight "
            f"beyond k_max={k_max} branches (requested epsilon {epsilon:g}); "
            "raise k_max or relax epsilon")
    weights = np.asarray(weights_list)
    means = np.arange(1, len(weights) + 1, dtype=float) * xi_g
    return MixtureExpansion(
        weights=weights, means=means, alpha=alpha, xi_g=xi_g,
        omega_prime=omega_prime, beta=beta, p=p, natural=False,
        tail_mass=tail)


# ----------------------------------------------------------------------------
# generalized-K building blocks (product of two independent gamma factors)


def _validate_gk(alpha: float, k: float, mean: float) -> None:
    if alpha <= 0.0 or k <= 0.0:
        raise DomainError(f"shape parameters must be > 0, got alpha={alpha}, k={k}")
    if mean <= 0.0:
        raise DomainError(f"mean must be > 0, got {mean}")


def gk_pdf(i, alpha: float, k: float, mean: float):
    """Density of a generalized-K channel with the given shapes and mean.

    Vectorized in i. The i = 0 endpoint follows the distribution's limit:
    0 when (alpha+k)/2 > 1, infinity otherwise.
    """
    _validate_gk(alpha, k, mean)
    i = np.asarray(i, dtype=float)
    if np.any(i < 0.0):
        raise DomainError("irradiance must be >= 0")
    scalar = i.ndim == 0
    i = np.atleast_1d(i)
    b = alpha * k / mean
    h = 0.5 * (alpha + k)
    out = np.zeros(i.shape)
    zero = i == 0.0
    if np.any(zero) and h <= 1.0:
        out[zero] = np.inf
    pos = ~zero
    if np.any(pos):
        x = 2.0 * np.sqrt(b * i[pos])
        ln_f = (
            np.log(2.0) + h * np.log(b) + (h - 1.0) * np.log(i[pos])
            - gammaln(alpha) - gammaln(k) + bessel_k_log(alpha - k, x)
        )
        with np.errstate(under="ignore"):
            out[pos] = np.exp(ln_f)
    return float(out[0]) if scalar else out


def _gk_cdf_tail_quad(z: float, alpha: float, k: float) -> float:
    # complement integral of the density in the Bessel variable u = 2 sqrt(B i)
    u0 = 2.0 * math.sqrt(z)
    ln_norm = math.log(2.0) - gammaln(alpha) - gammaln(k)
    nu = alpha - k

    def integrand(u: float) -> float:
        s = kve(nu, u)
        if s <= 0.0 or not np.isfinite(s):
            return 0.0
        ln_val = ln_norm + (alpha + k - 1.0) * math.log(0.5 * u) + math.log(s) - u
        return math.exp(ln_val) if ln_val > -745.0 else 0.0

    val, _ = integrate.quad(
        integrand, u0, np.inf, epsabs=1e-300, epsrel=1e-12, limit=200)
    return 1.0 - min(max(val, 0.0), 1.0)


@lru_cache(maxsize=8)
def _laguerre_nodes(n: int):
    return roots_laguerre(n)


def _tail_log_laguerre(z: np.ndarray, alpha: float, k: float, n: int) -> np.ndarray:
    # log of the complement integral, nodes shifted to start at u0
    nodes, weights = _laguerre_nodes(n)
    u0 = 2.0 * np.sqrt(z)
    u = u0[:, None] + nodes[None, :]
    ln_norm = math.log(2.0) - gammaln(alpha) - gammaln(k)
    with np.errstate(divide="ignore"):
        ln_g = (
            ln_norm + (alpha + k - 1.0) * np.log(0.5 * u)
            + np.log(kve(alpha - k, u)) + np.log(weights)[None, :]
        )
    top = np.max(ln_g, axis=1)
    return -u0 + top + np.log(np.sum(np.exp(ln_g - top[:, None]), axis=1))


def _gk_cdf_tail(z: np.ndarray, alpha: float, k: float,
                 rel_tol: float) -> np.ndarray:
    # vectorized complement with a coarse/fine quadrature disagreement check;
    # stragglers go to adaptive quadrature one by one
    lo = _tail_log_laguerre(z, alpha, k, 40)
    hi = _tail_log_laguerre(z, alpha, k, 64)
    out = 1.0 - np.exp(hi)
    bad = np.abs(hi - lo) > rel_tol
    for idx in np.flatnonzero(bad):
        out[idx] = _gk_cdf_tail_quad(float(z[idx]), alpha, k)
    return np.clip(out, 0.0, 1.0)


def gk_cdf(x, alpha: float, k: float, mean: float,
           budget: AccuracyBudget | None = None):
    """Distribution function of a generalized-K channel, vectorized in x.

    Ascending two-series evaluation with a rounding guard, switching to
    quadrature of the complementary integral where the series cancels or
    the argument is large. The series has poles when alpha - k is an
    integer; that exact gap raises DegenerateParameterError (mixtures built
    by mixture_weights are already nudged off it).
    """
    _validate_gk(alpha, k, mean)
    budget = budget or DEFAULT_BUDGET
    gap = alpha - k
    if abs(gap - round(gap)) < _INTEGER_GAP_TOL:
        raise DegenerateParameterError(
            f"alpha - k = {gap} is an integer; nudge alpha (see mixture_weights)")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise DomainError("irradiance must be >= 0")
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.zeros(x.shape)
    b = alpha * k / mean
    z = b * x
    inf_mask = np.isinf(x)
    out[inf_mask] = 1.0
    # the ascending series loses ~exp(2 sqrt(Z)) digits to cancellation, so
    # the cutover point depends on how much accuracy the budget demands; the
    # post-hoc guard still rechecks every value
    series_limit = _CDF_SERIES_LIMIT
    if budget.rel_tol > 1e4 * _EPS:
        series_limit = max(series_limit, (0.5 * math.log(budget.rel_tol / _EPS)) ** 2)
    series_mask = (z > 0.0) & (z <= series_limit) & ~inf_mask
    quad_mask = (z > series_limit) & ~inf_mask

    if np.any(series_mask):
        sm = np.flatnonzero(series_mask)
        zs = z[sm]
        la = gammaln(alpha)
        lk = gammaln(k)
        c1 = gammasgn(gap) * math.exp(gammaln(gap) - la - lk)
        c2 = gammasgn(-gap) * math.exp(gammaln(-gap) - la - lk)
        lz = np.log(zs)
        t1 = c1 * np.exp(k * lz) / k
        t2 = c2 * np.exp(alpha * lz) / alpha
        acc = t1 + t2
        asum = np.abs(t1) + np.abs(t2)
        # accumulate with active-set compaction: converged entries retire
        # so per-iteration work tracks the slowest-converging arguments only
        active = np.arange(len(zs))
        for j in range(1, budget.max_terms):
            t1 = t1 * zs * (k + j - 1.0) / ((k + j) * (j - gap) * j)
            t2 = t2 * zs * (alpha + j - 1.0) / ((alpha + j) * (j + gap) * j)
            step = np.abs(t1) + np.abs(t2)
            acc[active] += t1 + t2
            asum[active] += step
            live = step > 1e-17 * np.abs(acc[active]) + 1e-300
            if not np.any(live):
                break
            if not np.all(live):
                t1 = t1[live]
                t2 = t2[live]
                zs = zs[live]
                active = active[live]
        guard = _EPS * asum / np.maximum(np.abs(acc), 1e-300)
        ok = (guard <= budget.rel_tol) & (acc >= -1e-12) & (acc <= 1.0 + 1e-9)
        out[sm[ok]] = np.clip(acc[ok], 0.0, 1.0)
        quad_mask = quad_mask.copy()
        quad_mask[sm[~ok]] = True

    if np.any(quad_mask):
        qm = np.flatnonzero(quad_mask)
        out[qm] = _gk_cdf_tail(z[qm], alpha, k, budget.rel_tol)
    return float(out[0]) if scalar else out


def gk_mgf(s, alpha: float, k: float, mean: float,
           budget: AccuracyBudget | None = None):
    """Laplace transform E[exp(-s I)] of a generalized-K channel, s >= 0.

    Closed form through the Tricomi function; inherits its degenerate-gap
    and accuracy behavior. Vectorized in s.
    """
    _validate_gk(alpha, k, mean)
    budget = budget or DEFAULT_BUDGET
    s = np.asarray(s, dtype=float)
    if np.any(s < 0.0):
        raise DomainError("transform variable must be >= 0")
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    out = np.empty(s.shape)
    for idx, sv in np.ndenumerate(s):
        if sv == 0.0:
            out[idx] = 1.0
            continue
        z = alpha * k / (mean * sv)
        if z > 1e60:
            # first-order expansion; the neglected terms are O((mean*s)^2)
            out[idx] = 1.0 - mean * sv
            continue
        out[idx] = math.exp(alpha * math.log(z)) * tricomi_u(
            alpha, alpha - k + 1.0, z, budget)
    return float(out[0]) if scalar else out


# ----------------------------------------------------------------------------
# mixture-level laws


def _mixture_apply(fn, arg, expansion: MixtureExpansion):
    arg = np.asarray(arg, dtype=float)
    scalar = arg.ndim == 0
    arg = np.atleast_1d(arg)
    total = np.zeros(arg.shape)
    for order, (w, mu) in enumerate(zip(expansion.weights, expansion.means), start=1):
        if w == 0.0:
            continue
        total += w * fn(arg, expansion.alpha, float(order), mu)
    return float(total[0]) if scalar else total


def malaga_pdf(i, expansion: MixtureExpansion):
    """Density of the unblocked composite channel."""
    return _mixture_apply(gk_pdf, i, expansion)


def malaga_cdf(x, expansion: MixtureExpansion,
               budget: AccuracyBudget | None = None):
    """Distribution function of the unblocked composite channel."""
    return _mixture_apply(
        lambda a, al, k, mu: gk_cdf(a, al, k, mu, budget), x, expansion)


def malaga_mgf(s, expansion: MixtureExpansion,
               budget: AccuracyBudget | None = None):
    """Laplace transform of the unblocked composite channel."""
    return _mixture_apply(
        lambda a, al, k, mu: gk_mgf(a, al, k, mu, budget), s, expansion)


def malaga_blockage_pdf(i, expansion: MixtureExpansion, blockage: BlockageConfig):
    """Density of the channel with random line-of-sight blockage.

    The blocked branch keeps only uncoupled scatter: a generalized-K channel
    of small-scale order 1 with mean xi_g.
    """
    p_b = blockage.p_b
    blocked = gk_pdf(i, expansion.alpha, 1.0, expansion.xi_g)
    return p_b * blocked + (1.0 - p_b) * malaga_pdf(i, expansion)


def malaga_blockage_cdf(x, expansion: MixtureExpansion, blockage: BlockageConfig,
                        budget: AccuracyBudget | None = None):
    """Distribution function of the channel with line-of-sight blockage."""
    p_b = blockage.p_b
    blocked = gk_cdf(x, expansion.alpha, 1.0, expansion.xi_g, budget)
    return p_b * blocked + (1.0 - p_b) * malaga_cdf(x, expansion, budget)


def malaga_blockage_mgf(s, expansion: MixtureExpansion, blockage: BlockageConfig,
                        budget: AccuracyBudget | None = None):
    """Laplace transform of the channel with line-of-sight blockage."""
    p_b = blockage.p_b
    blocked = gk_mgf(s, expansion.alpha, 1.0, expansion.xi_g, budget)
    return p_b * blocked + (1.0 - p_b) * malaga_mgf(s, expansion, budget)


# ----------------------------------------------------------------------------
# fully coupled limit (rho = 1): plain product of two gamma factors


def _gg_nudge(alpha: float, beta: float) -> float:
    gap = alpha - beta
    if abs(gap - round(gap)) < _INTEGER_GAP_TOL:
        return alpha + _ALPHA_NUDGE
    return alpha


def gamma_gamma_pdf(i, alpha: float, beta: float, mean: float = 1.0):
    """Density of the two-gamma product law, the rho = 1 limit channel."""
    return gk_pdf(i, _gg_nudge(alpha, beta), beta, mean)


def gamma_gamma_cdf(x, alpha: float, beta: float, mean: float = 1.0,
                    budget: AccuracyBudget | None = None):
    """Distribution function of the two-gamma product law."""
    return gk_cdf(x, _gg_nudge(alpha, beta), beta, mean, budget)


def gamma_gamma_mgf(s, alpha: float, beta: float, mean: float = 1.0,
                    budget: AccuracyBudget | None = None):
    """Laplace transform of the two-gamma product law."""
    return gk_mgf(s, _gg_nudge(alpha, beta), beta, mean, budget)

"""Sampling oracle for the blockage fading model.

Generates irradiance draws straight from the generative story (blockage
coin, discrete sub-channel order, two gamma factors) rather than from any
of the analytic formulas, so empirical histograms, distribution functions
and outage rates can confront the closed forms as an independent check.

Streams are counter-based and chunk-indexed: chunk j is generated from a
Philox generator jumped j times off the config seed, so results are
bit-for-bit reproducible for a given (seed, samples, chunk_size) and do
not depend on how chunks are scheduled across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import DomainError
from .malaga import BlockageConfig, MixtureExpansion, malaga_blockage_cdf, malaga_blockage_pdf
from .outage import SnrPoint, outage_exact
from .special_math import AccuracyBudget

_WILSON_Z = 1.959963984540054  # two-sided 95%


@dataclass(frozen=True)
class McConfig:
    """Sampling run description; equal configs give bit-identical streams."""

    samples: int
    seed: int
    histogram_bins: int = 64
    histogram_range: tuple[float, float] = (0.0, 8.0)
    chunk_size: int = 1 << 20
    generator: str = "philox4x64"

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise DomainError(f"samples must be >= 1, got {self.samples}")
        if self.histogram_bins < 1:
            raise DomainError(f"histogram_bins must be >= 1, got {self.histogram_bins}")
        lo, hi = self.histogram_range
        if not (0.0 <= lo < hi):
            raise DomainError(f"histogram_range must satisfy 0 <= lo < hi, got {self.histogram_range}")
        if self.chunk_size < 1:
            raise DomainError(f"chunk_size must be >= 1, got {self.chunk_size}")
        if self.generator != "philox4x64":
            raise DomainError(
                f"unknown generator {self.generator!r}; 'philox4x64' is the "
                "only algorithm this build implements")


def chunk_plan(cfg: McConfig) -> list[tuple[int, int]]:
    """(chunk_index, count) pairs covering cfg.samples; the stream contract."""
    plan = []
    remaining = cfg.samples
    index = 0
    while remaining > 0:
        take = min(cfg.chunk_size, remaining)
        plan.append((index, take))
        remaining -= take
        index += 1
    return plan


def chunk_rng(cfg: McConfig, chunk_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=cfg.seed).jumped(chunk_index))


def sample_chunk(
    rng: np.random.Generator,
    n: int,
    expansion: MixtureExpansion,
    blockage: BlockageConfig,
) -> np.ndarray:
    """One vectorized batch of irradiance draws.

    The sub-channel order is drawn for every sample from the exact discrete
    law (binomial for natural beta, negative-binomial otherwise; never the
    truncated weight table), then blocked samples are overridden to the
    order-1 scatter-only branch. Drawing unconditionally keeps the random
    stream layout independent of the blockage outcomes.
    """
    blocked = rng.random(n) < blockage.p_b
    p = expansion.p
    if expansion.natural:
        b = int(round(expansion.beta))
        order = 1.0 + rng.binomial(b - 1, p, size=n)
        means = order * (expansion.xi_g + expansion.omega_prime / b)
    else:
        # numpy's negative_binomial counts failures at success prob 1-p,
        # which is exactly the order-minus-one law here
        order = 1.0 + rng.negative_binomial(expansion.beta, 1.0 - p, size=n)
        means = order * expansion.xi_g
    order = np.where(blocked, 1.0, order)
    means = np.where(blocked, expansion.xi_g, means)
    large = rng.gamma(expansion.alpha, 1.0 / expansion.alpha, size=n)
    small = rng.gamma(order, means / order, size=n)
    return large * small


def sample_irradiance(
    expansion: MixtureExpansion, blockage: BlockageConfig, cfg: McConfig
):
    """Yield irradiance chunks; constant memory in the total sample count."""
    for index, count in chunk_plan(cfg):
        yield sample_chunk(chunk_rng(cfg, index), count, expansion, blockage)


@dataclass
class McOutageEstimate:
    estimate: float
    ci_low: float
    ci_high: float
    samples: int
    hits: int

    @property
    def ci95(self) -> tuple[float, float]:
        return (self.ci_low, self.ci_high)


def _wilson_interval(hits: int, n: int) -> tuple[float, float]:
    if hits == 0:
        # rule of three: nothing observed still bounds the rate
        return (0.0, min(3.0 / n, 1.0))
    z2 = _WILSON_Z * _WILSON_Z
    ph = hits / n
    denom = 1.0 + z2 / n
    center = (ph + z2 / (2.0 * n)) / denom
    half = _WILSON_Z * math.sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom
    return (max(center - half, 0.0), min(center + half, 1.0))


def empirical_outage(
    snr: SnrPoint,
    expansion: MixtureExpansion,
    blockage: BlockageConfig,
    cfg: McConfig,
) -> McOutageEstimate:
    """Fraction of samples under the outage threshold, with a Wilson 95% CI."""
    threshold = snr.gamma_n ** -0.5
    hits = 0
    for chunk in sample_irradiance(expansion, blockage, cfg):
        hits += int(np.count_nonzero(chunk < threshold))
    lo, hi = _wilson_interval(hits, cfg.samples)
    return McOutageEstimate(
        estimate=hits / cfg.samples, ci_low=lo, ci_high=hi,
        samples=cfg.samples, hits=hits)


@dataclass
class McSummary:
    """Streaming histogram and moments of one sampling run."""

    count: int
    mean: float
    variance: float
    bin_edges: np.ndarray
    counts: np.ndarray
    underflow: int
    overflow: int
    outage: dict[float, McOutageEstimate] = field(default_factory=dict)

    @property
    def densities(self) -> np.ndarray:
        widths = np.diff(self.bin_edges)
        return self.counts / (self.count * widths)


def _accumulate_summary(chunks, n, cfg, gamma_n_points):
    lo, hi = cfg.histogram_range
    edges = np.linspace(lo, hi, cfg.histogram_bins + 1)
    counts = np.zeros(cfg.histogram_bins, dtype=np.int64)
    under = 0
    over = 0
    total = 0.0
    total_sq = 0.0
    thresholds = {g: SnrPoint(g).gamma_n ** -0.5 for g in gamma_n_points}
    hits = {g: 0 for g in gamma_n_points}
    for chunk in chunks:
        c, _ = np.histogram(chunk, bins=edges)
        counts += c
        under += int(np.count_nonzero(chunk < lo))
        over += int(np.count_nonzero(chunk >= hi))
        total += float(np.sum(chunk))
        total_sq += float(np.sum(chunk * chunk))
        for g, thr in thresholds.items():
            hits[g] += int(np.count_nonzero(chunk < thr))
    mean = total / n
    variance = (total_sq - n * mean * mean) / (n - 1) if n > 1 else 0.0
    outage = {}
    for g in gamma_n_points:
        wl, wh = _wilson_interval(hits[g], n)
        outage[g] = McOutageEstimate(hits[g] / n, wl, wh, n, hits[g])
    return McSummary(
        count=n, mean=mean, variance=variance, bin_edges=edges,
        counts=counts, underflow=under, overflow=over, outage=outage)


def summarize(
    expansion: MixtureExpansion,
    blockage: BlockageConfig,
    cfg: McConfig,
    gamma_n_points: tuple[float, ...] = (),
) -> McSummary:
    """One streaming pass: histogram, moments, and outage at chosen SNRs."""
    return _accumulate_summary(
        sample_irradiance(expansion, blockage, cfg),
        cfg.samples, cfg, gamma_n_points)


def summarize_values(
    values: np.ndarray,
    cfg: McConfig,
    gamma_n_points: tuple[float, ...] = (),
) -> McSummary:
    """Summary of an already materialized sample array.

    Histogram geometry comes from cfg; the count comes from the array, so
    cfg.samples need not match. Lets one collected stream feed several
    checks (histogram, outage, rank tests) without being regenerated.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or len(values) < 1:
        raise DomainError("summarize_values needs a flat, non-empty array")
    return _accumulate_summary((values,), len(values), cfg, gamma_n_points)


@dataclass
class GofResult:
    statistic: float
    pvalue: float
    dof: int | None = None
    cells: int | None = None

    def passed(self, alpha: float = 0.01) -> bool:
        return self.pvalue > alpha


def gof_chisquare(
    summary: McSummary,
    expansion: MixtureExpansion,
    blockage: BlockageConfig,
    min_expected: float = 5.0,
    budget: AccuracyBudget | None = None,
) -> GofResult:
    """Chi-square comparison of the histogram against the analytic law.

    Expected counts come from distribution-function differences over the
    bin edges plus open cells below/above the histogram range; adjacent
    cells are pooled left to right until each pooled cell expects at least
    min_expected counts.
    """
    n = summary.count
    edges = summary.bin_edges
    cdf_at = np.asarray(malaga_blockage_cdf(edges, expansion, blockage, budget))
    observed = [float(summary.underflow), *summary.counts.astype(float), float(summary.overflow)]
    expected = [n * cdf_at[0], *(n * np.diff(cdf_at)), n * (1.0 - cdf_at[-1])]
    if summary.bin_edges[0] == 0.0:
        # the underflow cell is structurally empty; drop it
        observed = observed[1:]
        expected = expected[1:]

    pooled_obs: list[float] = []
    pooled_exp: list[float] = []
    acc_o = 0.0
    acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            pooled_obs.append(acc_o)
            pooled_exp.append(acc_e)
            acc_o = 0.0
            acc_e = 0.0
    if acc_e > 0.0 or acc_o > 0.0:
        if pooled_obs:
            pooled_obs[-1] += acc_o
            pooled_exp[-1] += acc_e
        else:
            pooled_obs.append(acc_o)
            pooled_exp.append(acc_e)
    obs = np.asarray(pooled_obs)
    exp = np.asarray(pooled_exp)
    if len(obs) < 2:
        raise DomainError("chi-square needs at least 2 pooled cells; "
                          "widen the histogram range or lower min_expected")
    # guard the tiny mismatch between sum(exp) and n from CDF rounding
    exp *= obs.sum() / exp.sum()
    stat = float(np.sum((obs - exp) ** 2 / exp))
    dof = len(obs) - 1
    return GofResult(statistic=stat, pvalue=float(stats.chi2.sf(stat, dof)),
                     dof=dof, cells=len(obs))


_KS_INTERP_MIN_N = 200_000
_KS_INTERP_GRID = 4096
_KS_INTERP_TOL = 1e-7


def _ks_cdf_evaluator(sorted_values, expansion, blockage, budget):
    # for very large samples, evaluate the analytic law on a log grid and
    # interpolate monotonically between grid points; the shape-preserving
    # interpolant is probed against direct evaluation and only used when it
    # reproduces the law far below any resolvable KS deviation
    n = len(sorted_values)

    def direct(chunk):
        return np.asarray(malaga_blockage_cdf(chunk, expansion, blockage, budget))

    lo = float(sorted_values[0])
    hi = float(sorted_values[-1])
    if n < _KS_INTERP_MIN_N or lo <= 0.0 or lo == hi:
        return direct
    from scipy.interpolate import PchipInterpolator

    # the grid and probe are always evaluated well under the probe
    # tolerance, whatever budget the caller asked for; series noise at a
    # loose tolerance would otherwise swamp the interpolation error and
    # force the slow direct path
    rel = _KS_INTERP_TOL * 1e-2
    if budget is not None and budget.rel_tol < rel:
        rel = budget.rel_tol
    tight = AccuracyBudget(rel_tol=rel)

    def exact(chunk):
        return np.asarray(malaga_blockage_cdf(chunk, expansion, blockage, tight))

    grid = np.exp(np.linspace(math.log(lo), math.log(hi), _KS_INTERP_GRID))
    grid[0] = lo
    grid[-1] = hi
    interp = PchipInterpolator(np.log(grid), exact(grid), extrapolate=True)
    probe = sorted_values[:: max(1, n // 509)]
    if np.max(np.abs(interp(np.log(probe)) - exact(probe))) > _KS_INTERP_TOL:
        return direct
    return lambda chunk: interp(np.log(chunk))


def gof_ks(
    values: np.ndarray,
    expansion: MixtureExpansion,
    blockage: BlockageConfig,
    budget: AccuracyBudget | None = None,
    chunk_size: int = 1 << 20,
) -> GofResult:
    """One-sample Kolmogorov-Smirnov test against the analytic distribution.

    Evaluates the analytic distribution chunk by chunk over the sorted
    sample so memory stays bounded for very large runs; for large samples a
    probe-verified monotone interpolant of the law stands in for direct
    evaluation. Exact tail probability for small samples, asymptotic beyond
    50000.
    """
    values = np.sort(np.asarray(values, dtype=float))
    n = len(values)
    if values.ndim != 1 or n < 2:
        raise DomainError("gof_ks needs a flat array of at least 2 samples")
    evaluate = _ks_cdf_evaluator(values, expansion, blockage, budget)
    d_plus = 0.0
    d_minus = 0.0
    for start in range(0, n, chunk_size):
        stop = min(start + chunk_size, n)
        f = evaluate(values[start:stop])
        ranks = np.arange(start + 1, stop + 1, dtype=float)
        d_plus = max(d_plus, float(np.max(ranks / n - f)))
        d_minus = max(d_minus, float(np.max(f - (ranks - 1.0) / n)))
    d = max(d_plus, d_minus)
    if n <= 50_000:
        pvalue = float(stats.kstwo.sf(d, n))
    else:
        pvalue = float(stats.kstwobign.sf(d * math.sqrt(n)))
    return GofResult(statistic=d, pvalue=pvalue)


def collect_samples(
    expansion: MixtureExpansion, blockage: BlockageConfig, cfg: McConfig
) -> np.ndarray:
    """Materialize the whole stream (for tests and KS runs that need it)."""
    return np.concatenate(list(sample_irradiance(expansion, blockage, cfg)))

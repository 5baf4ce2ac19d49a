"""Confront the closed forms with raw samples from the generative story.

Run with: python3 demos/04_monte_carlo.py
"""
import numpy as np

from fso_linklab import (
    BlockageConfig,
    MalagaParams,
    McConfig,
    SnrPoint,
    collect_samples,
    gof_chisquare,
    gof_ks,
    malaga_blockage_cdf,
    mixture_weights,
    summarize_values,
)


def main():
    ex = mixture_weights(MalagaParams(alpha=4.2, beta=3.0, rho=0.75,
                                      omega=0.2, xi=1.0))
    bl = BlockageConfig(p_b=0.1)
    cfg = McConfig(samples=1_000_000, seed=7)

    vals = collect_samples(ex, bl, cfg)
    s = summarize_values(vals, cfg, gamma_n_points=(100.0, 10_000.0))

    analytic_mean = bl.p_b * ex.xi_g + (1.0 - bl.p_b) * float(
        np.dot(ex.weights, ex.means))
    print(f"{cfg.samples} draws, seed {cfg.seed}, 10% blockage")
    print(f"  sample mean    {s.mean:.6f}   analytic {analytic_mean:.6f}")
    print(f"  sample var     {s.variance:.6f}")
    print(f"  histogram keeps {1.0 - (s.underflow + s.overflow) / s.count:.4%}"
          f" of the mass in [0, 8)")

    print("\nempirical outage vs the closed form")
    print(f"  {'SNR':>8}  {'empirical':>11}  {'wilson 95% CI':>24}  {'exact':>11}")
    for g in (100.0, 10_000.0):
        est = s.outage[g]
        exact = float(malaga_blockage_cdf(SnrPoint(g).gamma_n ** -0.5, ex, bl))
        ci = f"[{est.ci_low:.6f}, {est.ci_high:.6f}]"
        print(f"  {10 * np.log10(g):6.0f}dB  {est.estimate:11.6f}  {ci:>24}"
              f"  {exact:11.6f}")

    chi = gof_chisquare(s, ex, bl)
    ks = gof_ks(vals, ex, bl)
    print("\ngoodness of fit against the analytic law")
    print(f"  chi-square: stat {chi.statistic:8.2f}  over {chi.cells} cells"
          f"  p = {chi.pvalue:.4f}  -> {'ok' if chi.passed() else 'REJECT'}")
    print(f"  ks:         D    {ks.statistic:.6f}           "
          f"  p = {ks.pvalue:.4f}  -> {'ok' if ks.passed() else 'REJECT'}")

    # the same comparison against the wrong law fails loudly
    wrong = gof_ks(vals, ex, BlockageConfig(p_b=0.0))
    print(f"\nsame samples tested against a no-blockage law: "
          f"p = {wrong.pvalue:.3g} -> {'ok' if wrong.passed() else 'REJECT'}")


if __name__ == "__main__":
    main()

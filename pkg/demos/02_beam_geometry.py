"""Beam footprint, turbulence broadening, and what an obstacle does to them.

Run with: python3 demos/02_beam_geometry.py
"""
import warnings

from fso_linklab import (
    BeamScenario,
    PlaneWaveValidityWarning,
    beam_radius,
    classify_blockage,
    coherence_radius,
    effective_beam_radius,
    rytov_variance,
)


def sweep(cn2, obstacle_d, lengths):
    print(f"\nC_n^2 = {cn2:g} m^-2/3, obstacle {obstacle_d * 100:.0f} cm wide")
    print(f"  {'L [m]':>6}  {'W [cm]':>7}  {'W_e [cm]':>8}  {'rho_0 [cm]':>10}"
          f"  {'rytov':>7}  class")
    for length in lengths:
        s = BeamScenario(w0=0.01, wavelength=1550e-9, length=length,
                         cn2=cn2, obstacle_d=obstacle_d)
        with warnings.catch_warnings():
            # short links sit in the near field of the transmitter, where
            # the plane-wave coherence estimate is only indicative; the
            # library says so, once per call
            warnings.simplefilter("ignore", PlaneWaveValidityWarning)
            rho0 = coherence_radius(s)
            verdict = classify_blockage(s)
        print(f"  {length:6.0f}  {beam_radius(s) * 100:7.2f}"
              f"  {effective_beam_radius(s) * 100:8.2f}"
              f"  {rho0 * 100:10.2f}  {rytov_variance(s):7.3f}"
              f"  {verdict.value}")


def main():
    lengths = (200.0, 400.0, 800.0, 1200.0, 1600.0, 2000.0, 2400.0)
    # moderate turbulence: the 16 cm obstacle shadows the whole broadened
    # beam only once the footprint has stopped out-growing it
    sweep(1e-14, 0.16, lengths)
    # stronger turbulence, smaller obstacle: diffraction around the edge
    # (scale set by the coherence width) decides between los and total
    sweep(5e-14, 0.09, lengths)

    print("\nclassification rule: total when the obstacle covers the broadened")
    print("beam diameter, los when it covers at least the transverse coherence")
    print("width but not the beam, none when the field wraps around it")


if __name__ == "__main__":
    main()

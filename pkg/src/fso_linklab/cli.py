"""Command-line front end.

Every subcommand writes CSV tables whose first line is a ``#``-prefixed JSON
manifest recording the tool version, the subcommand, and the fully resolved
inputs.  Feeding that manifest back through ``fso-linklab rerun`` reproduces
the file byte for byte.  Configuration is layered: named preset, then JSON
config file, then individual flags, later layers winning key by key.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical accuracy
failure, 4 goodness-of-fit rejection.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .beam import (
    BeamScenario,
    beam_radius,
    classify_blockage,
    coherence_radius,
    effective_beam_radius,
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
    gamma_gamma_cdf,
    gamma_gamma_mgf,
    gamma_gamma_pdf,
    malaga_blockage_cdf,
    malaga_blockage_mgf,
    malaga_blockage_pdf,
    mixture_weights,
)
from .montecarlo import McConfig, gof_chisquare, summarize
from .outage import (
    SnrPoint,
    outage_exact,
    power_penalty,
    required_gamma_n,
    rho_one_outage,
    subchannel_diversity,
)
from .presets import BEAM_KEYS, CHANNEL_KEYS, PRESETS, RHO_CURVES
from .special_math import AccuracyBudget

FIGURES = ("fig2b", "fig3a", "fig3b", "fig4", "fig5a", "fig5b", "fig6")

_USAGE_ERRORS = (DomainError, DegenerateModelError, DegenerateParameterError)
_ACCURACY_ERRORS = (AccuracyError, BracketError)


def _max_workers() -> int:
    env = os.environ.get("FSO_LINKLAB_THREADS")
    if env is not None:
        try:
            n = int(env)
        except ValueError:
            raise DomainError(f"FSO_LINKLAB_THREADS must be an integer, got {env!r}")
        if n < 1:
            raise DomainError("FSO_LINKLAB_THREADS must be >= 1")
        return n
    return min(8, os.cpu_count() or 1)


def _parallel_map(fn, items):
    """Map preserving input order; thread count capped by FSO_LINKLAB_THREADS."""
    items = list(items)
    workers = min(_max_workers(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return "inf" if math.isinf(f) else f
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def write_csv(path: Path, manifest: dict, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# " + json.dumps(_jsonable(manifest), sort_keys=True,
                                    separators=(",", ":")) + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_manifest(path: Path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
    if first.startswith("# "):
        first = first[2:]
    try:
        manifest = json.loads(first)
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path} does not start with a JSON manifest: {exc}")
    if not isinstance(manifest, dict) or "subcommand" not in manifest:
        raise DomainError(f"{path}: manifest lacks a 'subcommand' field")
    return manifest


# -- configuration layering ------------------------------------------------

def resolve_config(preset: str | None, config_path: str | None,
                   flags: dict) -> dict:
    out: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            known = ", ".join(sorted(PRESETS))
            raise DomainError(f"unknown preset {preset!r}; known presets: {known}")
        out.update(PRESETS[preset])
    if config_path is not None:
        try:
            with open(config_path, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise DomainError(f"cannot read config file: {exc}")
        except json.JSONDecodeError as exc:
            raise DomainError(f"config file is not valid JSON: {exc}")
        if not isinstance(loaded, dict):
            raise DomainError("config file must hold a JSON object")
        unknown = sorted(set(loaded) - set(CHANNEL_KEYS) - set(BEAM_KEYS))
        if unknown:
            raise DomainError(f"unknown config keys: {', '.join(unknown)}")
        out.update(loaded)
    out.update({k: v for k, v in flags.items() if v is not None})
    return out


def _require(cfg: dict, keys: tuple[str, ...], what: str) -> None:
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise DomainError(f"missing {what} parameters: {', '.join(missing)}")


class Channel:
    """Resolved fading channel: mixture expansion, or the degenerate
    two-gamma law when the coupling factor is exactly one."""

    def __init__(self, cfg: dict, budget: AccuracyBudget | None):
        _require(cfg, ("alpha", "beta", "rho", "omega", "xi"), "channel")
        self.params = MalagaParams(
            alpha=float(cfg["alpha"]),
            beta=float(cfg["beta"]),
            rho=float(cfg["rho"]),
            omega=float(cfg["omega"]),
            xi=float(cfg["xi"]),
            delta_phi=float(cfg.get("delta_phi", 0.0)),
            normalize=bool(cfg.get("normalize", True)),
        )
        self.blockage = BlockageConfig(p_b=float(cfg.get("p_b", 0.0)))
        self.epsilon = float(cfg.get("epsilon", 1e-8))
        self.budget = budget
        self.degenerate = self.params.rho == 1.0
        self.expansion = None
        if not self.degenerate:
            self.expansion = mixture_weights(self.params, epsilon=self.epsilon)

    def pdf(self, x):
        if self.degenerate:
            scale = 1.0 - self.blockage.p_b
            return scale * gamma_gamma_pdf(x, self.params.alpha,
                                           self.params.beta, 1.0)
        return malaga_blockage_pdf(x, self.expansion, self.blockage)

    def cdf(self, x):
        if self.degenerate:
            p_b = self.blockage.p_b
            return p_b + (1.0 - p_b) * gamma_gamma_cdf(
                x, self.params.alpha, self.params.beta, 1.0, self.budget)
        return malaga_blockage_cdf(x, self.expansion, self.blockage, self.budget)

    def mgf(self, s):
        if self.degenerate:
            p_b = self.blockage.p_b
            return p_b + (1.0 - p_b) * gamma_gamma_mgf(
                s, self.params.alpha, self.params.beta, 1.0, self.budget)
        return malaga_blockage_mgf(s, self.expansion, self.blockage, self.budget)

    def outage(self, gamma_n: float) -> tuple[float, float]:
        """(exact, asymptotic) outage at normalized electrical SNR."""
        snr = SnrPoint(gamma0=gamma_n)
        if self.degenerate:
            p_b = self.blockage.p_b
            exact = rho_one_outage(snr, self.params.alpha, self.params.beta,
                                   self.blockage, self.budget)
            d, b = subchannel_diversity(self.params.alpha, self.params.beta, 1.0)
            # b is the transform-limit gain; the outage coefficient carries
            # an extra 1/Gamma(d+1)
            coeff = b / math.gamma(d + 1.0)
            asym = p_b + (1.0 - p_b) * coeff * gamma_n ** (-d / 2.0)
            return exact, asym
        res = outage_exact(snr, self.expansion, self.blockage, self.budget)
        asym = math.nan if res.asymptotic is None else res.asymptotic
        return res.exact, asym


def _beam_scenario(cfg: dict, length: float | None = None) -> BeamScenario:
    _require(cfg, ("w0", "lambda", "length"), "beam")
    f0 = cfg.get("f0", "inf")
    if isinstance(f0, str):
        if f0 == "inf":
            f0 = math.inf
        else:
            try:
                f0 = float(f0)
            except ValueError:
                raise DomainError(f"f0 must be a number or 'inf', got {f0!r}")
    return BeamScenario(
        w0=float(cfg["w0"]),
        wavelength=float(cfg["lambda"]),
        length=float(cfg["length"] if length is None else length),
        cn2=float(cfg.get("cn2", 0.0)),
        f0=float(f0),
        obstacle_d=None if cfg.get("obstacle_d") is None else float(cfg["obstacle_d"]),
    )


def make_grid(lo: float, hi: float, points: int, scale: str) -> np.ndarray:
    if points < 2:
        raise DomainError("grid needs at least 2 points")
    if not lo < hi:
        raise DomainError("grid requires lo < hi")
    if scale == "linear":
        return np.linspace(lo, hi, points)
    if scale == "log":
        if lo <= 0.0:
            raise DomainError("log grid requires lo > 0")
        return np.geomspace(lo, hi, points)
    raise DomainError(f"grid scale must be 'linear' or 'log', got {scale!r}")


def _budget(resolved: dict) -> AccuracyBudget | None:
    rel = resolved.get("rel_tol")
    return None if rel is None else AccuracyBudget(rel_tol=float(rel))


# -- executors ---------------------------------------------------------------
# Each takes the resolved parameter dict and the output directory, writes its
# files, and returns the list of file names.  Reruns call these directly.

def exec_pdf(resolved: dict, out_dir: Path) -> list[str]:
    return _exec_pointwise(resolved, out_dir, "pdf")


def exec_cdf(resolved: dict, out_dir: Path) -> list[str]:
    return _exec_pointwise(resolved, out_dir, "cdf")


def exec_mgf(resolved: dict, out_dir: Path) -> list[str]:
    return _exec_pointwise(resolved, out_dir, "mgf")


def _exec_pointwise(resolved: dict, out_dir: Path, kind: str) -> list[str]:
    channel = Channel(resolved, _budget(resolved))
    grid = make_grid(resolved["grid_lo"], resolved["grid_hi"],
                     int(resolved["grid_points"]), resolved["grid_scale"])
    fn = getattr(channel, kind)
    values = fn(grid)
    name = f"{resolved.get('stem') or kind}.csv"
    manifest = {"tool": "fso-linklab", "version": __version__,
                "subcommand": kind, "resolved": resolved, "outputs": [name]}
    if channel.degenerate and kind == "pdf" and channel.blockage.p_b > 0.0:
        # density of the continuous part only; the blocked mass sits at zero
        manifest["atom_at_zero"] = channel.blockage.p_b
    xcol = "s" if kind == "mgf" else "x"
    write_csv(out_dir / name, manifest, [xcol, "value"],
              zip(grid.tolist(), np.asarray(values).tolist()))
    return [name]


def exec_outage(resolved: dict, out_dir: Path) -> list[str]:
    budget = _budget(resolved)
    rho_list = resolved.get("rho_list")
    if rho_list is None:
        if resolved.get("rho") is None:
            raise DomainError("outage needs rho or --rho-list")
        rho_list = [resolved["rho"]]
    rhos = [float(r) for r in rho_list]
    p_bs = [float(p) for p in resolved.get("p_b_list")
            or [resolved.get("p_b", 0.0)]]
    mode = resolved.get("mode", "both")
    if mode not in ("exact", "asymptotic", "both"):
        raise DomainError(f"mode must be exact, asymptotic or both, got {mode!r}")
    db_grid = make_grid(resolved["db_lo"], resolved["db_hi"],
                        int(resolved["db_points"]), "linear")
    stem = resolved.get("stem") or "outage"

    combos = [(r, p) for r in rhos for p in p_bs]
    names = []
    for rho, p_b in combos:
        if len(combos) == 1:
            names.append(f"{stem}.csv")
        else:
            names.append(f"{stem}_rho{_fmt(rho)}_pb{_fmt(p_b)}.csv")

    manifest = {"tool": "fso-linklab", "version": __version__,
                "subcommand": "outage", "resolved": resolved, "outputs": names}
    header = {"exact": ["gamma_n_db", "p_out_exact"],
              "asymptotic": ["gamma_n_db", "p_out_asymptotic"],
              "both": ["gamma_n_db", "p_out_exact", "p_out_asymptotic"]}[mode]

    for (rho, p_b), name in zip(combos, names):
        cfg = dict(resolved, rho=rho, p_b=p_b)
        channel = Channel(cfg, budget)
        pairs = _parallel_map(lambda db: channel.outage(10.0 ** (db / 10.0)),
                              db_grid.tolist())
        rows = []
        for db, (exact, asym) in zip(db_grid.tolist(), pairs):
            if mode == "exact":
                rows.append((db, exact))
            elif mode == "asymptotic":
                rows.append((db, asym))
            else:
                rows.append((db, exact, asym))
        write_csv(out_dir / name, manifest, header, rows)
    return names


_BEAM_HEADER = ["length", "w", "w_e", "rho0", "d_b", "d_c"]


def _beam_rows(cfg: dict, lengths) -> tuple[list[str], list[tuple]]:
    classify = cfg.get("obstacle_d") is not None
    header = _BEAM_HEADER + (["blockage_class"] if classify else [])
    rows = []
    for length in lengths:
        sc = _beam_scenario(cfg, length=length)
        w = beam_radius(sc)
        w_e = effective_beam_radius(sc)
        rho0 = coherence_radius(sc)
        row = [length, w, w_e, rho0, 2.0 * w_e, 2.0 * rho0]
        if classify:
            row.append(classify_blockage(sc).value)
        rows.append(tuple(row))
    return header, rows


def exec_beam(resolved: dict, out_dir: Path) -> list[str]:
    grid = make_grid(resolved["length_lo"], resolved["length_hi"],
                     int(resolved["length_points"]), "linear")
    name = f"{resolved.get('stem') or 'beam'}.csv"
    manifest = {"tool": "fso-linklab", "version": __version__,
                "subcommand": "beam", "resolved": resolved, "outputs": [name]}
    header, rows = _beam_rows(resolved, grid.tolist())
    write_csv(out_dir / name, manifest, header, rows)
    return [name]


def exec_mc(resolved: dict, out_dir: Path) -> list[str]:
    budget = _budget(resolved)
    channel = Channel(resolved, budget)
    if channel.degenerate:
        raise DomainError("Monte Carlo sampling needs rho < 1; at rho = 1 the "
                          "mixture degenerates to a single two-gamma law")
    cfg = McConfig(
        samples=int(resolved["samples"]),
        seed=int(resolved["seed"]),
        histogram_bins=int(resolved.get("bins", 64)),
        histogram_range=(float(resolved.get("range_lo", 0.0)),
                         float(resolved.get("range_hi", 8.0))),
    )
    gamma_points = [10.0 ** (float(db) / 10.0)
                    for db in resolved.get("gamma_db_list", [20.0, 40.0])]
    summary = summarize(channel.expansion, channel.blockage, cfg,
                        gamma_n_points=gamma_points)

    stem = resolved.get("stem") or "mc"
    csv_name, json_name = f"{stem}.csv", f"{stem}_summary.json"
    manifest = {"tool": "fso-linklab", "version": __version__,
                "subcommand": "mc", "resolved": resolved,
                "outputs": [csv_name, json_name]}

    with_analytic = bool(resolved.get("with_analytic", False))
    header = ["bin_lo", "bin_hi", "count", "density"]
    if with_analytic:
        header.append("analytic_density")
    edges = summary.bin_edges
    densities = summary.densities
    rows = []
    mids = 0.5 * (edges[:-1] + edges[1:])
    analytic = channel.pdf(mids) if with_analytic else None
    for j in range(len(summary.counts)):
        row = [edges[j], edges[j + 1], int(summary.counts[j]), densities[j]]
        if with_analytic:
            row.append(analytic[j])
        rows.append(tuple(row))
    write_csv(out_dir / csv_name, manifest, header, rows)

    gof_alpha = float(resolved.get("gof_alpha", 0.01))
    gof = gof_chisquare(summary, channel.expansion, channel.blockage,
                        budget=budget)
    verdict = "PASS" if gof.passed(gof_alpha) else "FAIL"
    payload = {
        "manifest": manifest,
        "count": summary.count,
        "mean": summary.mean,
        "variance": summary.variance,
        "underflow": summary.underflow,
        "overflow": summary.overflow,
        "outage": {
            _fmt(g): {"estimate": est.estimate, "ci_low": est.ci_low,
                      "ci_high": est.ci_high, "hits": est.hits}
            for g, est in summary.outage.items()
        },
        "gof": {"test": "chisquare", "statistic": gof.statistic,
                "pvalue": gof.pvalue, "dof": gof.dof, "cells": gof.cells,
                "alpha": gof_alpha, "verdict": verdict},
    }
    with open(out_dir / json_name, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(payload), fh, sort_keys=True, indent=1)
        fh.write("\n")
    if verdict == "FAIL":
        raise GofFailure(
            f"chi-square p-value {gof.pvalue:.4g} below alpha {gof_alpha:g} "
            f"(statistic {gof.statistic:.4g}, dof {gof.dof})")
    return [csv_name, json_name]


# -- figure families ---------------------------------------------------------

def _channel_cfg(resolved: dict, **overrides) -> dict:
    cfg = {k: resolved[k] for k in CHANNEL_KEYS if k in resolved}
    cfg.update(overrides)
    return cfg


def _fig_beam_profiles(resolved, out_dir, manifest):
    lengths = np.linspace(100.0, 2400.0, 47).tolist()
    names = [f"fig2b_{p.split('-', 1)[1]}.csv"
             for p in ("beam-moderate", "beam-strong")]
    manifest = dict(manifest, outputs=names)
    for preset, name in zip(("beam-moderate", "beam-strong"), names):
        header, rows = _beam_rows(dict(PRESETS[preset]), lengths)
        write_csv(out_dir / name, manifest, header, rows)
    return names


def _fig_pdf_vs_coupling(resolved, out_dir, manifest):
    budget = _budget(resolved)
    grid = np.linspace(1e-4, 3.0, 300)
    cols = []
    for rho in RHO_CURVES:
        ch = Channel(_channel_cfg(resolved, rho=rho, p_b=0.0), budget)
        cols.append(np.asarray(ch.pdf(grid)))
    header = ["x"] + [f"rho_{_fmt(r)}" for r in RHO_CURVES]
    rows = [tuple([x] + [c[j] for c in cols]) for j, x in enumerate(grid.tolist())]
    name = "fig3a.csv"
    write_csv(out_dir / name, dict(manifest, outputs=[name]), header, rows)
    return [name]


_FIG3B_PBS = (0.0, 0.01, 0.05, 0.1, 0.5, 1.0)


def _fig_pdf_vs_blockage(resolved, out_dir, manifest):
    budget = _budget(resolved)
    grid = np.linspace(1e-4, 3.0, 300)
    cols = []
    for p_b in _FIG3B_PBS:
        ch = Channel(_channel_cfg(resolved, p_b=p_b), budget)
        cols.append(np.asarray(ch.pdf(grid)))
    header = ["x"] + [f"pb_{_fmt(p)}" for p in _FIG3B_PBS]
    rows = [tuple([x] + [c[j] for c in cols]) for j, x in enumerate(grid.tolist())]
    name = "fig3b.csv"
    write_csv(out_dir / name, dict(manifest, outputs=[name]), header, rows)
    return [name]


def _fig_outage_curves(resolved, out_dir, manifest):
    budget = _budget(resolved)
    db_grid = np.linspace(0.0, 80.0, 81)
    combos = [(r, p) for r in RHO_CURVES for p in (0.0, 1.0)]
    channels = {c: Channel(_channel_cfg(resolved, rho=c[0], p_b=c[1]), budget)
                for c in combos}

    def col(combo):
        ch = channels[combo]
        return [ch.outage(10.0 ** (db / 10.0)) for db in db_grid.tolist()]

    results = _parallel_map(col, combos)
    header = ["gamma_n_db"] + [f"rho{_fmt(r)}_pb{_fmt(p)}" for r, p in combos]
    names = ["fig4_exact.csv", "fig4_asym.csv"]
    manifest = dict(manifest, outputs=names)
    for (mode, pick), name in zip((("exact", 0), ("asym", 1)), names):
        rows = [tuple([db] + [results[c][j][pick] for c in range(len(combos))])
                for j, db in enumerate(db_grid.tolist())]
        write_csv(out_dir / name, manifest, header, rows)
    return names


def _fig_penalty_vs_blockage(resolved, out_dir, manifest):
    budget = _budget(resolved)
    target = 1e-3
    p_grid = np.geomspace(1e-4, 1.0, 25)
    rhos = [r for r in RHO_CURVES if r >= 0.25]

    def exact_col(rho):
        base_cfg = _channel_cfg(resolved, rho=rho, p_b=0.0)
        base = Channel(base_cfg, budget)
        ref = required_gamma_n(target, base.expansion, base.blockage,
                               mode="exact", budget=budget)
        out = []
        for p_b in p_grid.tolist():
            ch = Channel(_channel_cfg(resolved, rho=rho, p_b=p_b), budget)
            need = required_gamma_n(target, ch.expansion, ch.blockage,
                                    mode="exact", budget=budget)
            out.append(10.0 * math.log10(need / ref))
        return out

    def asym_col(rho):
        ch0 = Channel(_channel_cfg(resolved, rho=rho, p_b=0.0), budget)
        return [power_penalty(ch0.expansion, BlockageConfig(p_b=p))
                for p in p_grid.tolist()]

    header = ["p_b"] + [f"rho_{_fmt(r)}" for r in rhos]
    names = ["fig5a_exact.csv", "fig5a_asym.csv"]
    manifest = dict(manifest, outputs=names)
    for (mode, fn), name in zip((("exact", exact_col), ("asym", asym_col)),
                                names):
        cols = _parallel_map(fn, rhos)
        rows = [tuple([p] + [c[j] for c in cols])
                for j, p in enumerate(p_grid.tolist())]
        write_csv(out_dir / name, manifest, header, rows)
    return names


_FIG5B_PBS = (0.0, 1e-3, 1e-2, 1e-1, 1.0)


def _fig_outage_vs_blockage(resolved, out_dir, manifest):
    budget = _budget(resolved)
    db_grid = np.linspace(0.0, 120.0, 61)
    channels = [Channel(_channel_cfg(resolved, p_b=p), budget)
                for p in _FIG5B_PBS]

    def col(ch):
        return [ch.outage(10.0 ** (db / 10.0)) for db in db_grid.tolist()]

    results = _parallel_map(col, channels)
    header = ["gamma_n_db"] + [f"pb_{_fmt(p)}" for p in _FIG5B_PBS]
    names = ["fig5b_exact.csv", "fig5b_asym.csv"]
    manifest = dict(manifest, outputs=names)
    for (mode, pick), name in zip((("exact", 0), ("asym", 1)), names):
        rows = [tuple([db] + [results[c][j][pick] for c in range(len(channels))])
                for j, db in enumerate(db_grid.tolist())]
        write_csv(out_dir / name, manifest, header, rows)
    return names


_FIG6_DBS = (40.0, 80.0, 120.0)
_FIG6_PBS = (0.0, 1e-3, 1e-2, 1e-1)


def _fig_outage_vs_coupling(resolved, out_dir, manifest):
    budget = _budget(resolved)
    rho_grid = np.concatenate([np.linspace(0.01, 0.97, 49),
                               np.array([0.99, 0.999, 0.9999, 1.0])])
    combos = [(db, p) for db in _FIG6_DBS for p in _FIG6_PBS]

    def row_for(rho):
        ch = Channel(_channel_cfg(resolved, rho=float(rho)), budget)
        vals = []
        for db, p_b in combos:
            ch.blockage = BlockageConfig(p_b=p_b)
            vals.append(ch.outage(10.0 ** (db / 10.0))[0])
        return vals

    results = _parallel_map(row_for, rho_grid.tolist())
    header = ["rho"] + [f"g{int(db)}db_pb{_fmt(p)}" for db, p in combos]
    rows = [tuple([rho] + results[j])
            for j, rho in enumerate(rho_grid.tolist())]
    name = "fig6.csv"
    write_csv(out_dir / name, dict(manifest, outputs=[name]), header, rows)
    return [name]


_FIGURE_EXECUTORS = {
    "fig2b": _fig_beam_profiles,
    "fig3a": _fig_pdf_vs_coupling,
    "fig3b": _fig_pdf_vs_blockage,
    "fig4": _fig_outage_curves,
    "fig5a": _fig_penalty_vs_blockage,
    "fig5b": _fig_outage_vs_blockage,
    "fig6": _fig_outage_vs_coupling,
}


def exec_figure(resolved: dict, out_dir: Path) -> list[str]:
    which = resolved.get("figure")
    if which not in _FIGURE_EXECUTORS:
        raise DomainError(f"unknown figure {which!r}; choose from "
                          + ", ".join(FIGURES))
    manifest = {"tool": "fso-linklab", "version": __version__,
                "subcommand": "figure", "resolved": resolved}
    return _FIGURE_EXECUTORS[which](resolved, out_dir, manifest)


EXECUTORS = {
    "pdf": exec_pdf,
    "cdf": exec_cdf,
    "mgf": exec_mgf,
    "outage": exec_outage,
    "beam": exec_beam,
    "figure": exec_figure,
    "mc": exec_mc,
}


def exec_rerun(resolved: dict, out_dir: Path) -> list[str]:
    manifest = read_manifest(Path(resolved["manifest"]))
    sub = manifest["subcommand"]
    if sub not in EXECUTORS:
        raise DomainError(f"manifest names unknown subcommand {sub!r}")
    inner = manifest.get("resolved")
    if not isinstance(inner, dict):
        raise DomainError("manifest lacks a 'resolved' parameter block")
    return EXECUTORS[sub](inner, out_dir)


# -- argument parsing --------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", help="named parameter preset")
    p.add_argument("--config", help="JSON config file layered over the preset")
    p.add_argument("--out-dir", default=".", help="output directory")
    p.add_argument("--stem", help="basename for output files")
    p.add_argument("--rel-tol", type=float, dest="rel_tol",
                   help="relative accuracy requested from the evaluators")


def _add_channel(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--xi", type=float)
    p.add_argument("--delta-phi", type=float, dest="delta_phi")
    p.add_argument("--normalize", choices=("true", "false"))
    p.add_argument("--epsilon", type=float,
                   help="mixture truncation tolerance for non-integer beta")
    p.add_argument("--p-b", type=float, dest="p_b",
                   help="line-of-sight blockage probability")


def _add_grid(p: argparse.ArgumentParser, lo: float, hi: float, points: int,
              scale: str) -> None:
    p.add_argument("--grid-lo", type=float, default=lo, dest="grid_lo")
    p.add_argument("--grid-hi", type=float, default=hi, dest="grid_hi")
    p.add_argument("--grid-points", type=int, default=points, dest="grid_points")
    p.add_argument("--grid-scale", choices=("linear", "log"), default=scale,
                   dest="grid_scale")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fso-linklab",
        description="Free-space optical link analysis: composite fading "
                    "statistics, beam blockage geometry, outage probability, "
                    "and Monte Carlo validation.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="subcommand", required=True)

    for kind, (lo, hi, n, sc) in (("pdf", (1e-3, 5.0, 200, "linear")),
                                  ("cdf", (1e-3, 5.0, 200, "linear")),
                                  ("mgf", (1e-2, 1e6, 60, "log"))):
        p = sub.add_parser(kind, help=f"tabulate the {kind} on a grid")
        _add_common(p)
        _add_channel(p)
        _add_grid(p, lo, hi, n, sc)

    p = sub.add_parser("outage", help="outage probability vs normalized SNR")
    _add_common(p)
    _add_channel(p)
    p.add_argument("--db-lo", type=float, default=0.0, dest="db_lo")
    p.add_argument("--db-hi", type=float, default=80.0, dest="db_hi")
    p.add_argument("--db-points", type=int, default=81, dest="db_points")
    p.add_argument("--mode", choices=("exact", "asymptotic", "both"),
                   default="both")
    p.add_argument("--rho-list", type=float, nargs="+", dest="rho_list",
                   help="sweep several coupling factors (one file each)")
    p.add_argument("--p-b-list", type=float, nargs="+", dest="p_b_list",
                   help="sweep several blockage probabilities")

    p = sub.add_parser("beam", help="beam size, coherence and blockage classes")
    _add_common(p)
    p.add_argument("--w0", type=float)
    p.add_argument("--f0", help="focusing parameter, number or 'inf'")
    p.add_argument("--lambda", type=float, dest="lambda_",
                   help="optical wavelength in meters")
    p.add_argument("--cn2", type=float)
    p.add_argument("--length", type=float)
    p.add_argument("--obstacle-d", type=float, dest="obstacle_d")
    p.add_argument("--length-lo", type=float, default=100.0, dest="length_lo")
    p.add_argument("--length-hi", type=float, default=2400.0, dest="length_hi")
    p.add_argument("--length-points", type=int, default=47,
                   dest="length_points")

    p = sub.add_parser("figure", help="emit a prebuilt figure dataset")
    p.add_argument("figure", choices=FIGURES)
    _add_common(p)
    _add_channel(p)

    p = sub.add_parser("mc", help="Monte Carlo sampling with GOF checks")
    _add_common(p)
    _add_channel(p)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=12345)
    p.add_argument("--bins", type=int, default=64)
    p.add_argument("--range-lo", type=float, default=0.0, dest="range_lo")
    p.add_argument("--range-hi", type=float, default=8.0, dest="range_hi")
    p.add_argument("--gamma-db-list", type=float, nargs="+",
                   dest="gamma_db_list", default=[20.0, 40.0],
                   help="normalized SNR points (dB) for outage estimates")
    p.add_argument("--gof-alpha", type=float, default=0.01, dest="gof_alpha")
    p.add_argument("--with-analytic", action="store_true",
                   dest="with_analytic",
                   help="add the analytic density alongside the histogram")

    p = sub.add_parser("rerun", help="replay a manifest byte for byte")
    p.add_argument("manifest", help="CSV with a manifest line, or a JSON file")
    p.add_argument("--out-dir", default=".", help="output directory")

    return ap


_CHANNEL_FLAGS = ("alpha", "beta", "rho", "omega", "xi", "delta_phi",
                  "normalize", "epsilon", "p_b")


def _resolved_from_args(args: argparse.Namespace) -> dict:
    sub = args.subcommand
    flags: dict = {}
    if sub in ("pdf", "cdf", "mgf", "outage", "figure", "mc"):
        for key in _CHANNEL_FLAGS:
            flags[key] = getattr(args, key, None)
        if flags.get("normalize") is not None:
            flags["normalize"] = flags["normalize"] == "true"
    if sub == "beam":
        for key, attr in (("w0", "w0"), ("f0", "f0"), ("lambda", "lambda_"),
                          ("cn2", "cn2"), ("length", "length"),
                          ("obstacle_d", "obstacle_d")):
            flags[key] = getattr(args, attr, None)

    resolved = resolve_config(getattr(args, "preset", None),
                              getattr(args, "config", None), flags)

    if sub in ("pdf", "cdf", "mgf"):
        resolved.update(grid_lo=args.grid_lo, grid_hi=args.grid_hi,
                        grid_points=args.grid_points,
                        grid_scale=args.grid_scale)
    elif sub == "outage":
        resolved.update(db_lo=args.db_lo, db_hi=args.db_hi,
                        db_points=args.db_points, mode=args.mode)
        if args.rho_list is not None:
            resolved["rho_list"] = [float(r) for r in args.rho_list]
        if args.p_b_list is not None:
            resolved["p_b_list"] = [float(p) for p in args.p_b_list]
    elif sub == "beam":
        resolved.update(length_lo=args.length_lo, length_hi=args.length_hi,
                        length_points=args.length_points)
        if "length" not in resolved:
            resolved["length"] = resolved["length_lo"]
    elif sub == "figure":
        base = dict(PRESETS["paper-figures"])
        base.update(resolved)
        resolved = base
        resolved["figure"] = args.figure
    elif sub == "mc":
        resolved.update(samples=args.samples, seed=args.seed, bins=args.bins,
                        range_lo=args.range_lo, range_hi=args.range_hi,
                        gamma_db_list=[float(d) for d in args.gamma_db_list],
                        gof_alpha=args.gof_alpha,
                        with_analytic=args.with_analytic)

    if getattr(args, "stem", None) is not None:
        resolved["stem"] = args.stem
    if getattr(args, "rel_tol", None) is not None:
        resolved["rel_tol"] = args.rel_tol
    return resolved


def _fail(kind: str, exc: Exception, code: int) -> int:
    payload = {"error": kind, "type": type(exc).__name__, "message": str(exc)}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _max_workers()  # a malformed env var fails fast on every subcommand
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.subcommand == "rerun":
            names = exec_rerun({"manifest": args.manifest}, out_dir)
        else:
            resolved = _resolved_from_args(args)
            names = EXECUTORS[args.subcommand](resolved, out_dir)
    except _USAGE_ERRORS as exc:
        return _fail("config", exc, 2)
    except OSError as exc:
        return _fail("io", exc, 2)
    except _ACCURACY_ERRORS as exc:
        return _fail("accuracy", exc, 3)
    except GofFailure as exc:
        return _fail("gof", exc, 4)
    for name in names:
        print(out_dir / name)
    return 0


if __name__ == "__main__":
    sys.exit(main())

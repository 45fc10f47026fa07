"""Named experiments run from a resolved config.

Each scenario splits into a build step, which turns one sweep point into
library objects and may only fail on bad input, and a compute step, which
only fails on numerical trouble. The split maps onto the exit codes.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .. import __version__
from ..chain import ChainParams, solve_chain
from ..correlations import check_steady, g2_normalized_from_solution, mean_photons, pulsed_g2
from ..drive import DriveEnvelope
from ..dynamics import SystemParams, linear_steady_start, solve
from ..filters import FilterSpec, FrequencyGrid, filtered_pulse
from ..grid import TimeGrid
from ..oracle import regression_pulsed_g2
from . import io
from .config import ConfigError, sweep_points

log = logging.getLogger("photoncorr")

CW_AMPLITUDE = 0.01
# weaker default for chains: g2 of a dark chain only settles as E -> 0
CHAIN_AMPLITUDE = 5e-4
CW_SPAN = 26.0

# fixed leading columns per scenario; sweep axes mapped onto them add none
KEY_COLUMNS = {
    "steady-g2": (),
    "chain-g2": (),
    "pulsed-g2": (("drive.sigma", "sigma"),),
    "validate": (("drive.sigma", "sigma"),),
    "filter-map": (("drive.sigma", "sigma"), ("filter.kappa", "kappa")),
    "filter-compare": (("drive.sigma", "sigma"), ("filter.kappa", "kappa")),
}

VALUE_COLUMNS = {
    "steady-g2": ("zeta", "g2"),
    "chain-g2": ("zeta", "g2"),
    "pulsed-g2": ("g2p", "mean_n"),
    "validate": ("g2p_ansatz", "g2p_oracle", "rel_diff", "mean_n_ansatz", "mean_n_oracle"),
    "filter-map": ("g2p", "eta_sp", "mean_n", "g2p_unfiltered"),
    "filter-compare": ("g2p_lorentzian", "g2p_gaussian", "eta_lorentzian", "eta_gaussian",
                       "g2p_unfiltered"),
}


@dataclass
class Point:
    """One sweep point, built and ready to compute."""

    scenario: str
    cfg: Dict[str, Any]
    overrides: Dict[str, Any]
    params: Any
    drive: DriveEnvelope
    grid: TimeGrid
    filters: Dict[str, FilterSpec] = field(default_factory=dict)
    fgrids: Dict[str, FrequencyGrid] = field(default_factory=dict)


@dataclass
class PointResult:
    rows: List[Tuple]
    scalars: Dict[str, Any]
    amplitude: Optional[np.ndarray] = None


# -- build -------------------------------------------------------------------

def _betas(p: Dict[str, Any]) -> Tuple[float, float, float]:
    br = p["beta_r"]
    bl = p["beta_l"] if p["beta_l"] is not None else min(br, 1.0 - br)
    bs = p["beta_s"] if p["beta_s"] is not None else 1.0 - br - bl
    # clip roundoff from the defaults
    return br, bl, (0.0 if abs(bs) < 1e-15 else bs)


def _build_params(cfg):
    br, bl, bs = _betas(cfg["params"])
    delta = cfg["params"]["delta"]
    if cfg["scenario"] == "chain-g2":
        ch = cfg["chain"]
        phases = ch["phases"] if ch["phases"] is not None else list(ch["spacing_phase"] * np.arange(ch["n"]))
        return ChainParams(tuple(phases), br, bl, bs, delta)
    return SystemParams(br, bl, bs, delta)


def _build_drive(cfg) -> DriveEnvelope:
    d = cfg["drive"]
    if d["kind"] == "constant":
        default = CHAIN_AMPLITUDE if cfg["scenario"] == "chain-g2" else CW_AMPLITUDE
        amp = default if d["amplitude"] is None else d["amplitude"]
        return DriveEnvelope.cw(amp * np.exp(1j * d["phase"]), d["geometry"] or "waveguide")
    return DriveEnvelope.gaussian(d["sigma"], d["area"], d["center"], d["geometry"] or "side")


def _build_grid(cfg, drive: DriveEnvelope) -> TimeGrid:
    g = cfg["grid"]
    n = g["n_steps"]
    if drive.kind == "constant":
        start = 0.0 if g["zeta_start"] is None else g["zeta_start"]
        end = start + CW_SPAN if g["zeta_end"] is None else g["zeta_end"]
        return TimeGrid(start, end, n)
    auto = drive.suggested_grid(n, tail=g["tail"])
    start = auto.zeta_start if g["zeta_start"] is None else g["zeta_start"]
    end = auto.zeta_end if g["zeta_end"] is None else g["zeta_end"]
    return TimeGrid(start, end, n)


def _build_filters(cfg) -> Dict[str, FilterSpec]:
    f = cfg["filter"]
    if cfg["scenario"] == "filter-compare":
        return {"lorentzian": FilterSpec.lorentzian(f["kappa"], f["omega_c"]),
                "gaussian": FilterSpec.gaussian(f["kappa"], f["omega_c"])}
    if f["kind"] == "tabulated":
        return {"tabulated": FilterSpec.load(f["table"], f["kappa"])}
    return {f["kind"]: FilterSpec(f["kind"], f["kappa"], f["omega_c"])}


def build_point(cfg, overrides) -> Point:
    """Turn one resolved point config into library objects.

    Raises:
        ConfigError: for any parameter the library rejects.
    """
    where = "" if not overrides else " (sweep point " + ", ".join(
        f"{k}={v}" for k, v in overrides.items()) + ")"
    stage = "params"
    try:
        params = _build_params(cfg)
        stage = "drive"
        drive = _build_drive(cfg)
        stage = "grid"
        grid = _build_grid(cfg, drive)
        point = Point(cfg["scenario"], cfg, overrides, params, drive, grid)
        if cfg["scenario"] in ("filter-map", "filter-compare"):
            stage = "filter"
            point.filters = _build_filters(cfg)
            n_pad = cfg["filter"]["n_pad"]
            for name, spec in point.filters.items():
                fg = (FrequencyGrid.default(grid, spec) if n_pad is None
                      else FrequencyGrid.for_transform(grid, n_pad))
                fg.validate(grid, spec)
                point.fgrids[name] = fg
    except (ValueError, OSError) as exc:
        raise ConfigError(stage, f"{exc}{where}") from None
    return point


# -- compute -----------------------------------------------------------------

def _local_maxima(x: np.ndarray, y: np.ndarray, lo: float, hi: float) -> int:
    inside = (x > lo) & (x < hi)
    idx = np.flatnonzero(inside)
    idx = idx[(idx > 0) & (idx < len(y) - 1)]
    return int(np.sum((y[idx] > y[idx - 1]) & (y[idx] > y[idx + 1])))


def _steady(point: Point) -> PointResult:
    c = point.cfg["correlation"]
    if point.scenario == "chain-g2":
        sol = solve_chain(point.params, point.drive, point.grid)
    else:
        initial = (1.0, 0.0)
        if c["start"] == "steady":
            initial = linear_steady_start(point.params, point.drive, point.grid.zeta_start)
        sol = solve(point.params, point.drive, point.grid, initial=initial)
    check_steady(sol.trajectory, point.scenario, c["steady_tol"])
    res = g2_normalized_from_solution(sol, c["branch_fraction"], c["order"], c["cg_substitution"])
    tau, g2 = res.delays, res.g2_normalized
    scalars = {"g2_zero": g2[0], "g2_final": g2[-1],
               "branch_zeta": float(point.grid.nodes[len(point.grid.nodes) - len(tau)])}
    if point.scenario == "chain-g2":
        early = (tau > 0) & (tau < 5)
        k = int(np.argmin(np.where(early, g2, np.inf)))
        scalars.update(g2_node_min=g2[k], zeta_node_min=tau[k],
                       local_maxima_0_10=_local_maxima(tau, g2, 0.0, 10.0))
    rows = list(zip(tau, g2))
    return PointResult(rows, scalars, sol.pair("R", "R").table)


def _pulsed(point: Point) -> PointResult:
    sol = solve(point.params, point.drive, point.grid)
    g2p, n = pulsed_g2(sol), mean_photons(sol)
    return PointResult([(g2p, n)], {"g2p": g2p, "mean_n": n}, sol.pair("R", "R").table)


def _validate(point: Point) -> PointResult:
    sol = solve(point.params, point.drive, point.grid)
    g2p, n = pulsed_g2(sol), mean_photons(sol)
    g2p_o, _, n_o = regression_pulsed_g2(point.drive, point.params.delta, point.grid, return_parts=True)
    # the oracle counts all emitted photons; compare right-going ones
    n_o *= point.params.beta_r
    rel = (g2p - g2p_o) / g2p_o
    vals = (g2p, g2p_o, rel, n, n_o)
    scalars = dict(zip(VALUE_COLUMNS["validate"], vals))
    scalars["rel_diff_abs"] = abs(rel)
    return PointResult([vals], scalars, sol.pair("R", "R").table)


def _filtered(point: Point) -> PointResult:
    sol = solve(point.params, point.drive, point.grid)
    out = {name: filtered_pulse(sol, spec, point.fgrids[name]) for name, spec in point.filters.items()}
    if point.scenario == "filter-map":
        (fp,) = out.values()
        vals = (fp.g2p, fp.eta_sp, fp.mean_n, fp.g2p_unfiltered)
    else:
        lo, ga = out["lorentzian"], out["gaussian"]
        vals = (lo.g2p, ga.g2p, lo.eta_sp, ga.eta_sp, lo.g2p_unfiltered)
    scalars = dict(zip(VALUE_COLUMNS[point.scenario], vals))
    return PointResult([vals], scalars, sol.pair("R", "R").table)


COMPUTE = {
    "steady-g2": _steady,
    "chain-g2": _steady,
    "pulsed-g2": _pulsed,
    "validate": _validate,
    "filter-map": _filtered,
    "filter-compare": _filtered,
}


def _key_values(point: Point) -> Tuple:
    out = []
    for dotted, _ in KEY_COLUMNS[point.scenario]:
        section, _, key = dotted.rpartition(".")
        out.append(point.cfg[section][key])
    return tuple(out)


def run_config(cfg: Dict[str, Any], out_dir, threads: Optional[int] = None) -> Dict[str, Any]:
    """Run a resolved config and write its result files.

    Args:
        threads: overrides ``cfg["threads"]``; 0 means one per CPU.

    Returns:
        The summary that was written to ``summary.json``.

    Raises:
        ConfigError: bad input, detected before any computation.
        PhotonCorrError, ValueError: numerical failure during computation.
    """
    scenario = cfg["scenario"]
    points = [build_point(pc, over) for over, pc in sweep_points(cfg)]
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError("output.dir", f"cannot create {out_dir}: {exc.strerror}") from None

    key_names = {d for d, _ in KEY_COLUMNS[scenario]}
    # constant axes are left out so a one-value sweep writes the same CSV as no sweep
    extra = [d for d, v in cfg["sweep"].items() if d not in key_names and len(v) > 1]
    header = list(extra) + [c for _, c in KEY_COLUMNS[scenario]] + list(VALUE_COLUMNS[scenario])

    n_workers = cfg["threads"] if threads is None else threads
    n_workers = (os.cpu_count() or 1) if n_workers == 0 else n_workers
    n_workers = max(1, min(n_workers, len(points)))
    log.info("%s: %d point(s) on %d thread(s)", scenario, len(points), n_workers)

    compute = COMPUTE[scenario]
    rows, per_point = [], []
    grid_writer = None
    if cfg["output"]["grid_bin"]:
        n = points[0].grid.n_nodes
        grid_writer = io.GridWriter(out_dir / "grid.bin", (len(points), n, n))
    t0 = time.perf_counter()
    try:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            for point, res in zip(points, pool.map(compute, points)):
                lead = tuple(point.overrides[d] for d in extra) + _key_values(point)
                rows.extend(lead + tuple(r) for r in res.rows)
                per_point.append({**point.overrides, **res.scalars})
                if grid_writer is not None:
                    grid_writer.write(res.amplitude)
                log.info("point %d/%d done", len(per_point), len(points))
    finally:
        if grid_writer is not None:
            grid_writer.close()
    elapsed = time.perf_counter() - t0

    io.write_csv(out_dir / "result.csv", header, rows)
    summary: Dict[str, Any] = {"scenario": scenario, "version": __version__,
                               "n_points": len(points), "columns": header}
    if len(points) == 1:
        summary.update(per_point[0])
    summary["points"] = per_point
    summary["elapsed_s"] = round(elapsed, 3)
    summary["config"] = cfg
    io.write_summary(out_dir / "summary.json", summary)
    return summary


def sweep(cfg: Dict[str, Any], out_dir, threads: Optional[int] = None) -> Dict[str, Any]:
    """Alias of :func:`run_config` for configs with a ``[sweep]`` section."""
    if not cfg["sweep"]:
        raise ConfigError("sweep", "no sweep axis defined")
    return run_config(cfg, out_dir, threads)

"""Evaluate scenarios and write their CSV / SVG / manifest outputs.

All files for a run are rendered in memory first and written only after every
sweep point has been computed and validated, so a failed run leaves no
partial outputs.
"""

from __future__ import annotations

import json
import os
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import Scenario
from .dynamics import CouplingConfig, atomic_occupations, evolve_grid, joint_tables, tau_grid
from .entropy import density_matrices, cubic_eigenvalues, entropy_from_eigenvalues
from .errors import IntegrityError
from .output import csv_rows_text, csv_text, format_value, svg_plot
from .quadratures import quadrature_trace
from .states import build_ckncs, identity_resolution_check, joint_distribution, state_to_csv
from .statistics import cross_correlation, mandel_parameter, mean_occupations, static_row, validate_distribution

HEISENBERG = 1.0 / 16.0

AXIS_LABELS = {
    "N": "N",
    "mu_abs": "|mu|",
    "mu_phase": "arg mu",
    "kappa_tilde": "kappa~",
    "g_ratio": "g_b/g_a",
}

DYNAMIC_COLUMNS = {
    "occupations": ("p0", "p1", "p2"),
    "means": ("mean_a", "mean_b"),
    "g2": ("g2",),
    "mandel": ("q_a", "q_b"),
    "squeezing": ("s_x1", "s_x2", "var_x1", "var_x2", "product"),
    "entropy": ("entropy", "lambda1", "lambda2", "lambda3", "fallback_flag"),
}


def _state_for(sc: Scenario):
    mu = sc.mu_abs * np.exp(1j * sc.mu_phase) if sc.mu_phase else complex(sc.mu_abs)
    return build_ckncs(N=sc.N, mu=mu, kappa_tilde=sc.kappa_tilde, convention=sc.convention)


def static_point(sc: Scenario) -> dict:
    state = _state_for(sc)
    table = joint_distribution(state)
    mean_a, mean_b, g2, q_a, q_b = static_row(table)
    if abs(mean_a + mean_b - sc.N) > 1e-9 * max(sc.N, 1):
        raise IntegrityError("photon-number sum rule violated")
    out = {"mean_a": mean_a, "mean_b": mean_b, "g2": g2, "q_a": q_a, "q_b": q_b, "state_csv": state_to_csv(state)}
    if "identity_check" in sc.observables:
        out["identity_residual"] = identity_resolution_check(sc.N, sc.kappa_tilde, sc.convention)
    return out


def dynamic_point(sc: Scenario) -> dict[str, dict[str, np.ndarray]]:
    """Time traces of every requested observable at one sweep point."""
    state = _state_for(sc)
    coupling = CouplingConfig.from_ratio(sc.g_ratio)
    taus = tau_grid(sc.tau_max, sc.tau_points)
    comps = evolve_grid(state, coupling, taus)
    norms = np.sum(np.abs(comps) ** 2, axis=(1, 2))
    if np.max(np.abs(norms - 1.0)) > 1e-10:
        raise IntegrityError("evolved state lost normalisation")
    out: dict[str, dict[str, np.ndarray]] = {}
    obs = set(sc.observables)
    if "occupations" in obs:
        occ = atomic_occupations(state, coupling, taus)
        out["occupations"] = {"p0": occ[0], "p1": occ[1], "p2": occ[2]}
    if obs & {"means", "g2", "mandel"}:
        tables = joint_tables(comps, sc.N)
        validate_distribution(tables)
        mean_a, mean_b = mean_occupations(tables)
        # level 1 holds one photon fewer than the sector charge
        p1 = np.sum(np.abs(comps[:, 1, :]) ** 2, axis=1)
        if np.max(np.abs(mean_a + mean_b + p1 - sc.N)) > 1e-9 * max(sc.N, 1):
            raise IntegrityError("photon-number sum rule violated")
        if "means" in obs:
            out["means"] = {"mean_a": mean_a, "mean_b": mean_b}
        if "g2" in obs:
            out["g2"] = {"g2": cross_correlation(tables)}
        if "mandel" in obs:
            out["mandel"] = {"q_a": mandel_parameter(tables, "a"), "q_b": mandel_parameter(tables, "b")}
    if "squeezing" in obs:
        sq = quadrature_trace(comps, sc.N)
        if np.min(sq["var_x1"]) < -1e-12 or np.min(sq["var_x2"]) < -1e-12:
            raise IntegrityError("negative quadrature variance")
        if np.min(sq["product"]) < HEISENBERG - 1e-10:
            raise IntegrityError("uncertainty product below 1/16")
        out["squeezing"] = {k: sq[k] for k in DYNAMIC_COLUMNS["squeezing"]}
    if "entropy" in obs:
        rho = density_matrices(comps)
        lam, fallback = cubic_eigenvalues(rho)
        entropy = entropy_from_eigenvalues(lam)
        if np.min(entropy) < -1e-12 or np.max(entropy) > np.log(3) + 1e-12:
            raise IntegrityError("entropy outside [0, ln 3]")
        out["entropy"] = {
            "entropy": entropy,
            "lambda1": lam[:, 0],
            "lambda2": lam[:, 1],
            "lambda3": lam[:, 2],
            "fallback_flag": fallback.astype(int),
        }
    return out


def _map(func, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def _label(axis: str, value) -> str:
    return f"{axis}={format_value(value)}"


@dataclass
class RunResult:
    files: dict[str, str] = field(default_factory=dict)

    def write(self, out_dir: Path) -> list[Path]:
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for name in sorted(self.files):
            path = out_dir / name
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(self.files[name])
            written.append(path)
        return written


def _manifest(scenario: Scenario, files) -> str:
    data = {
        "software": {"package": "crosskerr", "version": __version__,
                     "numpy": np.__version__, "python": platform.python_version()},
        "scenario": scenario.resolved(),
        "files": sorted(files),
    }
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def render_scenario(sc: Scenario, threads: int = 1) -> RunResult:
    """Compute a scenario and render its files (not yet written)."""
    axis, values = sc.axis, sc.axis_values
    points = [sc.point(v) for v in values]
    res = RunResult()
    if sc.kind == "state":
        results = _map(static_point, points, threads)
        cols = ("mean_a", "mean_b", "g2", "q_a", "q_b")
        res.files[f"{sc.name}_static.csv"] = csv_text(
            (axis,) + cols, [values] + [[r[c] for r in results] for c in cols]
        )
        for v, r in zip(values, results):
            res.files[f"states/{sc.name}_state_{_label(axis, v)}.csv"] = r["state_csv"]
        plots = {"means": ("mean_a", "mean_b"), "g2": ("g2",), "mandel": ("q_a", "q_b")}
        for obs, keys in plots.items():
            if obs in sc.observables:
                series = [(k, values, np.ma.masked_invalid([np.nan if r[k] is None else r[k] for r in results]))
                          for k in keys]
                res.files[f"{sc.name}_{obs}.svg"] = svg_plot(series, f"{sc.name}: {obs}", AXIS_LABELS[axis], obs)
        if "identity_check" in sc.observables:
            resid = [r["identity_residual"] for r in results]
            res.files[f"{sc.name}_identity.csv"] = csv_text((axis, "residual"), [values, resid])
            res.files[f"{sc.name}_identity_check.svg"] = svg_plot(
                [("residual", values, resid)], f"{sc.name}: identity residual", AXIS_LABELS[axis], "max |R - I|"
            )
    else:
        taus = tau_grid(sc.tau_max, sc.tau_points)
        results = _map(dynamic_point, points, threads)
        for obs in sc.observables:
            series = []
            for v, r in zip(values, results):
                cols = DYNAMIC_COLUMNS[obs]
                res.files[f"{sc.name}_{obs}_{_label(axis, v)}.csv"] = csv_text(
                    ("tau",) + cols, [taus] + [r[obs][c] for c in cols]
                )
                plotted = [c for c in cols if c not in ("fallback_flag", "lambda1", "lambda2", "lambda3", "var_x1", "var_x2", "product")]
                for c in plotted:
                    label = f"{c} {_label(axis, v)}" if len(plotted) > 1 else _label(axis, v)
                    series.append((label, taus, r[obs][c]))
            res.files[f"{sc.name}_{obs}.svg"] = svg_plot(series, f"{sc.name}: {obs}", "g_a t", obs)
    res.files[f"{sc.name}_manifest.json"] = _manifest(sc, list(res.files) + [f"{sc.name}_manifest.json"])
    return res


def run_scenario(sc: Scenario, out_dir, threads: int = 1) -> list[Path]:
    return render_scenario(sc, threads).write(Path(out_dir))


def sweep_rows(sc: Scenario, threads: int = 1) -> list[tuple]:
    """Long-format rows ``(axis, axis_value, tau, observable, value)``."""
    axis, values = sc.axis, sc.axis_values
    points = [sc.point(v) for v in values]
    rows = []
    if sc.kind == "state":
        results = _map(static_point, points, threads)
        names = {"means": ("mean_a", "mean_b"), "g2": ("g2",), "mandel": ("q_a", "q_b"),
                 "identity_check": ("identity_residual",)}
        for v, r in zip(values, results):
            for obs in sc.observables:
                for c in names[obs]:
                    rows.append((axis, v, None, c, r[c]))
    else:
        taus = tau_grid(sc.tau_max, sc.tau_points)
        results = _map(dynamic_point, points, threads)
        for v, r in zip(values, results):
            for obs in sc.observables:
                for c in DYNAMIC_COLUMNS[obs]:
                    col = r[obs][c]
                    mask = np.ma.getmaskarray(col) if isinstance(col, np.ma.MaskedArray) else None
                    data = np.ma.getdata(col)
                    for i, t in enumerate(taus):
                        rows.append((axis, v, t, c, None if mask is not None and mask[i] else data[i]))
    return rows


def sweep_csv(sc: Scenario, threads: int = 1) -> str:
    return csv_rows_text(("axis", "axis_value", "tau", "observable", "value"), sweep_rows(sc, threads))


def bundled_scenario_dir() -> Path:
    return Path(__file__).with_name("scenarios")


def default_threads() -> int:
    return max(1, min(4, os.cpu_count() or 1))

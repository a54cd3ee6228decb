"""Orchestration: from a validated RunConfig to executed Markov-gap runs.

Splits the work the CLI exposes into plain functions so tests and scripts
can call them directly: assemble geometry and covariance, run the bare
computation and the optimization, produce report dictionaries, execute
sweeps, and run the validation diagnostics.
"""

from __future__ import annotations

import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import scipy

from . import __version__
from .config import GeometrySection, ModelSection, RunConfig
from .descent import OptimizationReport, optimize
from .errors import ConfigError, MarkovGapError
from .gaussian import CovarianceMatrix, markov_gap, relative_positions
from .lattice import (
    Lattice,
    SmootherSupport,
    Tripartition,
    build_tripartition,
    default_margin,
    smoother_support,
)
from .models import (
    ModelSpec,
    chern_number,
    covariance_real_space,
    solve_bands,
    stack,
    time_reversal_pair,
    tr_operator,
)

__all__ = [
    "RunSetup",
    "RunResult",
    "Check",
    "model_specs",
    "setup_run",
    "execute_run",
    "execute_sweep",
    "validate_config",
    "band_table",
]

LOG2 = float(np.log(2.0))
PURITY_TOL = 1e-7
TR_STATE_TOL = 1e-9


def model_specs(model: ModelSection) -> tuple[ModelSpec, ...]:
    base = ModelSpec(p=model.p, q=model.q, t=model.t, mu=model.mu,
                     filled_bands=model.filled_bands)
    if model.kind == "hofstadter":
        return (base,)
    if model.kind == "ti":
        return time_reversal_pair(base)
    return stack(base, model.copies)


@dataclass(frozen=True)
class RunSetup:
    """Everything assembled for one run: geometry, covariance universe,
    relative index arrays, and the optional TR matrix on the universe."""

    lattice: Lattice
    tripartition: Tripartition
    support: SmootherSupport | None
    specs: tuple[ModelSpec, ...]
    universe: np.ndarray
    a_rel: np.ndarray
    b_rel: np.ndarray
    support_rels: tuple[np.ndarray, ...]
    tr: np.ndarray | None


def setup_run(config: RunConfig) -> RunSetup:
    geo = config.geometry
    specs = model_specs(config.model)
    lat = Lattice(geo.width, geo.height, layers=len(specs))
    margin = geo.margin if geo.margin is not None else default_margin(geo.radius)
    tri = build_tripartition(lat, geo.l_a, geo.l_b, anchor=geo.anchor,
                             margin_min=margin)
    if geo.radius > 0:
        sup = smoother_support(tri, geo.shape, geo.radius, margin_min=margin)
        universe = np.union1d(np.union1d(tri.mask_a, tri.mask_b),
                              np.concatenate(sup.masks))
        sup_rels = tuple(relative_positions(universe, m) for m in sup.masks)
    else:
        sup = None
        universe = np.union1d(tri.mask_a, tri.mask_b)
        sup_rels = ()
    tr = None
    if lat.layers == 2:
        tr = tr_operator(lat)[np.ix_(universe, universe)]
    return RunSetup(
        lattice=lat,
        tripartition=tri,
        support=sup,
        specs=specs,
        universe=universe,
        a_rel=relative_positions(universe, tri.mask_a),
        b_rel=relative_positions(universe, tri.mask_b),
        support_rels=sup_rels,
        tr=tr,
    )


@dataclass(frozen=True)
class RunResult:
    config: RunConfig
    setup: RunSetup
    bare_h: float
    final_h: float
    report: OptimizationReport | None
    wall_time: float

    @property
    def c_plus_estimate(self) -> float:
        return 3.0 * self.final_h / LOG2

    def report_dict(self) -> dict:
        """JSON-ready report body (deterministic; timing isolated)."""
        rep = self.report
        body = {
            "config": self.config.echo(),
            "bare_h": self.bare_h,
            "bare_h_log2": self.bare_h / LOG2,
            "final_h": self.final_h,
            "final_h_log2": self.final_h / LOG2,
            "c_plus_estimate": self.c_plus_estimate,
            "iterations": 0 if rep is None else rep.iterations,
            "converged": True if rep is None else rep.converged,
            "reason": "no_optimization" if rep is None else rep.reason,
            "grad_norm": None if rep is None else rep.grad_norm,
            "n_evaluations": 0 if rep is None else rep.n_evaluations,
            "saddle_events": [] if rep is None else [dict(e) for e in rep.saddle_events],
            "universe_modes": int(self.setup.universe.size),
            "versions": {
                "package": __version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
            },
            "timing": {"wall_time_s": self.wall_time},
        }
        return body


def _load_warm_start(path: str, setup: RunSetup) -> list[np.ndarray]:
    try:
        data = np.load(path)
    except OSError as exc:
        raise ConfigError(f"cannot read warm-start file {path}: {exc}") from exc
    gens = []
    for i, rel in enumerate(setup.support_rels):
        mask_key, gen_key = f"mask{i}", f"generator{i}"
        if mask_key not in data or gen_key not in data:
            raise ConfigError(f"warm-start file lacks {mask_key}/{gen_key}")
        saved = data[mask_key]
        current = setup.universe[rel]
        if saved.shape != current.shape or (saved != current).any():
            raise ConfigError(
                f"warm-start support {i} does not match this geometry"
            )
        gens.append(np.asarray(data[gen_key]))
    return gens


def execute_run(config: RunConfig, force: bool = False) -> RunResult:
    """Bare Markov gap plus (for radius > 0) the optimization."""
    setup = setup_run(config)
    n_u = setup.universe.size
    if n_u > config.output.max_dim and not force:
        raise ConfigError(
            f"optimization universe has {n_u} modes, above the guardrail "
            f"({config.output.max_dim}); raise output.max_dim or pass --force"
        )
    t0 = time.perf_counter()
    cov = covariance_real_space(setup.specs, setup.lattice, sites=setup.universe)
    bare = markov_gap(cov, setup.a_rel, setup.b_rel)
    if setup.support is None:
        return RunResult(config, setup, bare, bare, None,
                         time.perf_counter() - t0)
    warm = None
    if config.warm_start is not None:
        warm = _load_warm_start(config.warm_start, setup)
    report = optimize(
        cov,
        setup.a_rel,
        setup.b_rel,
        setup.support_rels,
        config.optimizer,
        tr=setup.tr,
        initial_generators=warm,
    )
    return RunResult(config, setup, report.bare_h, report.final_h, report,
                     time.perf_counter() - t0)


def _sweep_variant(config: RunConfig, key: str, value) -> RunConfig:
    geo = config.geometry
    if key == "R":
        geo = replace(geo, radius=int(value))
    elif key == "L_A":
        geo = replace(geo, l_a=int(value), l_b=int(value))
    else:
        geo = replace(geo, shape=str(value))
    return replace(config, geometry=geo, sweep=None)


def execute_sweep(config: RunConfig, jobs: int = 1, force: bool = False,
                  runner=execute_run) -> list[dict]:
    """One run per sweep value; failures are recorded per row, not raised."""
    if config.sweep is None:
        raise ConfigError("config has no sweep section")
    key, values = config.sweep.key, config.sweep.values

    def one(value):
        row = {"value": value}
        t0 = time.perf_counter()
        try:
            res = runner(_sweep_variant(config, key, value), force=force)
            row.update(
                bare_h=res.bare_h,
                final_h=res.final_h,
                final_h_log2=res.final_h / LOG2,
                c_plus_estimate=res.c_plus_estimate,
                iterations=0 if res.report is None else res.report.iterations,
                converged=True if res.report is None else res.report.converged,
                error="",
            )
        except MarkovGapError as exc:
            row.update(bare_h=np.nan, final_h=np.nan, final_h_log2=np.nan,
                       c_plus_estimate=np.nan, iterations=0, converged=False,
                       error=f"{type(exc).__name__}: {exc}")
        row["runtime_s"] = time.perf_counter() - t0
        return row

    if jobs > 1 and len(values) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, values))
    return [one(v) for v in values]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str
    exit_code: int = 4  # numeric failure unless stated otherwise


def validate_config(config: RunConfig) -> list[Check]:
    """Cheap diagnostics: geometry, band gap, state purity, Chern numbers,
    and TR symmetry of the state for two-layer models."""
    checks: list[Check] = []
    specs = model_specs(config.model)
    geo = config.geometry

    try:
        setup = setup_run(config)
        margin = geo.margin if geo.margin is not None else default_margin(geo.radius)
        checks.append(Check(
            "geometry", True,
            f"A={geo.l_a}x{geo.l_a}, B={geo.l_b}x{geo.l_b} on "
            f"{geo.width}x{geo.height}, margin >= {margin}, "
            f"universe {setup.universe.size} modes",
            3,
        ))
    except MarkovGapError as exc:
        checks.append(Check("geometry", False, str(exc), 3))
        return checks

    lat = setup.lattice
    try:
        sol = solve_bands(specs[0], lat)
        gap = sol.band_gap()
        layer_cov = covariance_real_space(
            specs[0], Lattice(lat.width, lat.height, layers=1)
        )
        defect = layer_cov.purity_defect()
        ok = defect < PURITY_TOL
        checks.append(Check(
            "covariance_purity", ok,
            f"max|C^2 - C| = {defect:.2e} (band gap {gap:.4f})",
        ))
    except MarkovGapError as exc:
        checks.append(Check("covariance_purity", False, str(exc)))

    try:
        numbers = []
        for spec in specs:
            c, res = chern_number(spec)
            numbers.append(c)
        detail = "layer Chern number(s): " + ", ".join(f"{c:+d}" for c in numbers)
        ok = True
        if config.model.kind == "ti" and numbers[0] != -numbers[1]:
            ok, detail = False, detail + " (expected opposite pair)"
        checks.append(Check("chern", ok, detail))
    except MarkovGapError as exc:
        checks.append(Check("chern", False, str(exc)))

    if lat.layers == 2:
        try:
            cov = covariance_real_space(setup.specs, lat, sites=setup.universe)
            s = setup.tr
            dev = np.abs(s @ cov.mat.conj() @ (-s) - cov.mat).max()
            checks.append(Check(
                "tr_symmetry", dev < TR_STATE_TOL,
                f"max|S conj(C) S^-1 - C| = {dev:.2e} on the universe",
            ))
        except MarkovGapError as exc:
            checks.append(Check("tr_symmetry", False, str(exc)))
    elif config.optimizer.tr_constrained:
        checks.append(Check(
            "tr_symmetry", False,
            "tr_constrained requires a two-layer model", 2,
        ))
    return checks


def band_table(config: RunConfig) -> np.ndarray:
    """(kx, ky, E_0 .. E_{q-1}) rows for the first layer on the config lattice."""
    specs = model_specs(config.model)
    lat = Lattice(config.geometry.width, config.geometry.height,
                  layers=len(specs))
    sol = solve_bands(specs[0], lat)
    rows = []
    for i, kx in enumerate(sol.kxs):
        for j, ky in enumerate(sol.kys):
            rows.append([kx, ky, *sol.energies[i, j]])
    return np.array(rows)

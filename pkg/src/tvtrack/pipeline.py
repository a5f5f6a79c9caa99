"""End-to-end scenario orchestration: collect, identify, predict, track, report.

A scenario run has three phases: a constant-probe phase feeding the Hankel
identification, a moving-probe phase feeding the transform recovery, and a
prediction phase where the tracked solution is computed from predicted
parameters and compared against the reference optimum and the static
gradient-descent baseline over the whole horizon.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import block_diag

from .costs import MODEL_FACTORIES, get_model
from .exceptions import CertificateUnavailableError, ConfigError
from .oracle import (
    Dataset,
    ParameterSystem,
    ProbeSchedule,
    check_assumptions,
    collect_dataset,
    parameter_trajectory,
)
from .recovery import (
    IdentificationResult,
    check_necessary,
    check_sufficient_W,
    identify_from_dataset,
    predict_parameter_trajectory,
)
from .solvers import TvgdConfig, quadratic_argmin, reference_optimum, tv_gradient_descent

_CSV_FMT = "%.17g"

#: Environment variable that overrides the configured output directory.
OUTDIR_ENV_VAR = "TVTRACK_OUTDIR"

_DEFAULT_SOLVERS = {
    "quadratic": "argmin",
    "polynomial3": "tvgd",
    "nonpoly": "tvgd",
    "example1": "tvgd",
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to run one scenario.

    The true dynamics matrix is given either as rotation blocks plus diagonal
    entries (assembled block-diagonally, rotations first) or as a full matrix.
    """

    scenario: str
    z0: np.ndarray
    x0: np.ndarray
    n0: int
    n_end: int
    a_rotation_blocks: tuple = ()
    a_diag: np.ndarray | None = None
    a_matrix: np.ndarray | None = None
    eta: float = 1e-3
    beta: float = 1e-2
    inner_steps: int = 500
    t_end: int = 150
    solver: str | None = None
    outdir: str | None = None
    rank_tol: float | None = None
    seed: int = 0

    def a_true(self):
        """Assemble the ground-truth dynamics matrix."""
        if self.a_matrix is not None:
            return np.asarray(self.a_matrix, dtype=float)
        blocks = [np.asarray(b, dtype=float) for b in self.a_rotation_blocks]
        if self.a_diag is not None and len(self.a_diag):
            blocks.append(np.diag(np.asarray(self.a_diag, dtype=float)))
        if not blocks:
            raise ConfigError("no dynamics specified: need a_matrix, a_rotation_blocks or a_diag")
        return block_diag(*blocks) if len(blocks) > 1 else blocks[0]

    def solver_kind(self):
        if self.solver is not None:
            return self.solver
        return _DEFAULT_SOLVERS.get(self.scenario, "tvgd")

    def validate(self):
        """Check mutual consistency against the named cost model."""
        model = get_model(self.scenario)
        A = self.a_true()
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ConfigError(f"dynamics matrix must be square, got shape {A.shape}")
        if A.shape[0] != model.p:
            raise ConfigError(
                f"dynamics matrix is {A.shape[0]}x{A.shape[0]} but scenario "
                f"{self.scenario!r} has {model.p} parameters"
            )
        if np.asarray(self.z0).size != model.p:
            raise ConfigError(f"z0 must have length {model.p}")
        if np.atleast_1d(np.asarray(self.x0)).size != model.n:
            raise ConfigError(f"x0 must have length {model.n}")
        if not (1 <= self.n0 < self.n_end):
            raise ConfigError(f"need 1 <= n0 < n_end, got n0={self.n0}, n_end={self.n_end}")
        if self.t_end < self.n_end:
            raise ConfigError(f"t_end={self.t_end} precedes the end of data collection {self.n_end}")
        if self.solver_kind() not in ("argmin", "tvgd"):
            raise ConfigError(f"unknown solver {self.solver_kind()!r}")
        if self.solver_kind() == "argmin" and self.scenario != "quadratic":
            raise ConfigError("the closed-form solver only applies to the quadratic scenario")
        return model


_CONFIG_KEYS = {
    "scenario", "z0", "x0", "n0", "n_end", "a_rotation_blocks", "a_diag",
    "a_matrix", "eta", "beta", "inner_steps", "t_end", "solver", "outdir",
    "rank_tol", "seed",
}


def load_config(path):
    """Read a scenario configuration from a flat JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = {"scenario", "z0", "x0", "n0", "n_end"} - set(raw)
    if missing:
        raise ConfigError(f"missing required config keys: {sorted(missing)}")
    kwargs = dict(raw)
    kwargs["z0"] = np.asarray(raw["z0"], dtype=float)
    kwargs["x0"] = np.atleast_1d(np.asarray(raw["x0"], dtype=float))
    if "a_rotation_blocks" in kwargs:
        kwargs["a_rotation_blocks"] = tuple(
            np.asarray(b, dtype=float) for b in raw["a_rotation_blocks"]
        )
    if kwargs.get("a_diag") is not None:
        kwargs["a_diag"] = np.asarray(raw["a_diag"], dtype=float)
    if kwargs.get("a_matrix") is not None:
        kwargs["a_matrix"] = np.asarray(raw["a_matrix"], dtype=float)
    try:
        cfg = ScenarioConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad config: {exc}") from exc
    cfg.validate()
    return cfg


def builtin_config(name, outdir=None):
    """One of the three built-in scenarios with its canonical constants."""
    sqrt2_2 = np.sqrt(2.0) / 2.0
    rotation = ((0.0, 1.0), (-1.0, 0.0))
    if name == "quadratic":
        cfg = ScenarioConfig(
            scenario="quadratic",
            a_rotation_blocks=(np.asarray(rotation),),
            a_diag=np.array([0.98, 0.95, 0.981]),
            z0=np.array([-85.8, -77.9, 1047.0, 329.0, 669.0]),
            x0=np.array([sqrt2_2, sqrt2_2]),
            n0=8, n_end=26,
            outdir=outdir or "out/quadratic",
        )
    elif name == "polynomial3":
        cfg = ScenarioConfig(
            scenario="polynomial3",
            a_rotation_blocks=(np.asarray(rotation),),
            a_diag=np.array([0.98, 0.99, 0.99, 0.95,
                             0.88, 0.87, 0.87, 0.89, 0.87, 0.89, 0.89, 0.85]),
            z0=np.array([-63.7, 110.2, 2.23, 2.46, 2.46, 6.24,
                         0.5, 0.3, 0.3, 0.4, 0.3, 0.4, 0.4, 0.6]),
            x0=np.array([sqrt2_2, sqrt2_2]),
            n0=18, n_end=60,
            outdir=outdir or "out/polynomial3",
        )
    elif name == "nonpoly":
        # initial parameters are a package choice: the exponential/linear
        # trade-off dominates and keeps a unique, well-conditioned minimizer
        # at every time; the sine weight stays small because the clustered
        # decay rates (0.97/0.98/0.99) cannot be separated numerically from
        # the short constant-probe record
        cfg = ScenarioConfig(
            scenario="nonpoly",
            a_diag=np.array([0.99, 0.97, 0.98]),
            z0=np.array([50.0, 0.02, -120.0]),
            x0=np.array([0.7]),
            n0=6, n_end=30,
            outdir=outdir or "out/nonpoly",
        )
    else:
        raise ConfigError(f"unknown builtin scenario {name!r} "
                          "(choose from: quadratic, polynomial3, nonpoly)")
    cfg.validate()
    return cfg


@dataclass
class ExperimentReport:
    """Per-time-step trajectories, error curves, and identification summary."""

    scenario: str
    t: np.ndarray
    phase: list
    xhat: np.ndarray
    xstar: np.ndarray
    xgd: np.ndarray
    err_pred: np.ndarray
    err_gd: np.ndarray
    summary: dict
    dataset: Dataset | None = None
    ident: IdentificationResult | None = None
    zhat: np.ndarray | None = field(default=None, repr=False)
    ztrue: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self):
        return self.xhat.shape[1] if self.xhat.ndim == 2 else 0


def _phase_label(t, n0, n_end):
    if t <= n0:
        return "constant"
    if t <= n_end:
        return "probe"
    return "predict"


def run_scenario(cfg):
    """Execute a full scenario and assemble the report.

    Identification or solver errors propagate to the caller; nothing is
    written to disk here.
    """
    model = cfg.validate()
    A = cfg.a_true()
    sys = ParameterSystem(A, cfg.z0)
    assumptions = check_assumptions(sys, model, cfg.x0, rank_tol=cfg.rank_tol)

    schedule = ProbeSchedule(cfg.x0, cfg.n0, cfg.n_end, rule="static_gd",
                             eta=cfg.eta, seed=cfg.seed)
    ds = collect_dataset(sys, model, schedule)

    ident = identify_from_dataset(ds, model, tol=cfg.rank_tol)
    Cs = [model.gradient_matrix(x) for x in ds.X1]
    thm1 = check_necessary(Cs, tol=cfg.rank_tol)
    try:
        thm2 = check_sufficient_W(ident.Abar, Cs, model.p, tol=cfg.rank_tol).full_rank
    except CertificateUnavailableError:
        thm2 = None

    t_end = cfg.t_end
    ztrue = parameter_trajectory(sys, t_end)
    zhat = predict_parameter_trajectory(ident, t_end)

    # tracked solution: the collection path up to n_end, then per-scenario solver
    xhat = np.empty((t_end + 1, model.n))
    xhat[: cfg.n_end + 1] = ds.X
    if cfg.solver_kind() == "argmin":
        for t in range(cfg.n_end + 1, t_end + 1):
            xhat[t] = quadratic_argmin(zhat[t])
    else:
        tv_cfg = TvgdConfig(beta=cfg.beta, inner_steps=cfg.inner_steps, t_end=t_end)
        traj = tv_gradient_descent(model, lambda t: zhat[t], ds.X[cfg.n_end],
                                   tv_cfg, cfg.n_end)
        xhat[cfg.n_end + 1:] = traj[1:]

    # static gradient-descent baseline continued over the whole horizon
    xgd = np.empty_like(xhat)
    xgd[: cfg.n_end + 1] = ds.X
    x = ds.X[cfg.n_end].copy()
    for t in range(cfg.n_end + 1, t_end + 1):
        y_prev = model.gradient_matrix(x) @ ztrue[t - 1]
        x = x - cfg.eta * y_prev
        xgd[t] = x

    # reference optimum: closed form for the quadratic, otherwise a certified
    # stationary point chained from the previous time step
    xstar = np.empty_like(xhat)
    if cfg.solver_kind() == "argmin":
        for t in range(t_end + 1):
            xstar[t] = quadratic_argmin(ztrue[t])
    else:
        hint = None
        for t in range(t_end + 1):
            hint = reference_optimum(model, ztrue[t], hint=hint)
            xstar[t] = hint

    err_pred = np.linalg.norm(xhat - xstar, axis=1)
    err_gd = np.linalg.norm(xgd - xstar, axis=1)
    phases = [_phase_label(t, cfg.n0, cfg.n_end) for t in range(t_end + 1)]

    a_frob = None
    if ident.A_hat is not None:
        a_frob = float(np.linalg.norm(ident.A_hat - A) / np.linalg.norm(A))
    summary = {
        "scenario": cfg.scenario,
        "rank_r": int(ident.rank_r),
        "residual": float(ident.residual),
        "A_frobenius_error": a_frob,
        "thm1_necessary": bool(thm1),
        "thm2_sufficient": None if thm2 is None else bool(thm2),
        "a1": bool(assumptions.a1),
        "a2": bool(assumptions.a2),
        "a3": bool(assumptions.a3),
        "a_hat": None if ident.A_hat is None else ident.A_hat.tolist(),
        "rank_M": int(ident.rank_M),
        "transform_underdetermined": bool(ident.underdetermined),
        "hankel_depth": int(ident.ref_index + 1),
        "n0": cfg.n0,
        "n_end": cfg.n_end,
        "t_end": cfg.t_end,
    }
    return ExperimentReport(
        scenario=cfg.scenario,
        t=np.arange(t_end + 1),
        phase=phases,
        xhat=xhat,
        xstar=xstar,
        xgd=xgd,
        err_pred=err_pred,
        err_gd=err_gd,
        summary=summary,
        dataset=ds,
        ident=ident,
        zhat=zhat,
        ztrue=ztrue,
    )


def _write_trajectory_csv(report, path):
    n = report.n
    header = (["t", "phase"]
              + [f"xhat_{i+1}" for i in range(n)]
              + [f"xstar_{i+1}" for i in range(n)]
              + [f"xgd_{i+1}" for i in range(n)]
              + ["err_pred", "err_gd"])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for k, t in enumerate(report.t):
            vals = [str(int(t)), report.phase[k]]
            vals += [_CSV_FMT % v for v in report.xhat[k]]
            vals += [_CSV_FMT % v for v in report.xstar[k]]
            vals += [_CSV_FMT % v for v in report.xgd[k]]
            vals += [_CSV_FMT % report.err_pred[k], _CSV_FMT % report.err_gd[k]]
            fh.write(",".join(vals) + "\n")


def _write_plotdata(report, plotdir):
    paths = []

    def two_column(name, values):
        path = plotdir / f"{name}.csv"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t,value\n")
            for t, v in zip(report.t, values):
                fh.write(f"{int(t)},{_CSV_FMT % v}\n")
        paths.append(path)

    for i in range(report.n):
        two_column(f"solution_pred_x{i+1}", report.xhat[:, i])
        two_column(f"solution_opt_x{i+1}", report.xstar[:, i])
        two_column(f"solution_gd_x{i+1}", report.xgd[:, i])
    two_column("error_pred", report.err_pred)
    two_column("error_gd", report.err_gd)
    return paths


def emit_report(report, outdir, figures=True):
    """Write the trajectory CSV, summary, dataset, plot data, and figures.

    Returns the list of written paths.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []

    traj_path = outdir / "trajectory.csv"
    _write_trajectory_csv(report, traj_path)
    paths.append(traj_path)

    summary_path = outdir / "summary.json"
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(report.summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths.append(summary_path)

    if report.dataset is not None:
        ds_path = outdir / "dataset.csv"
        report.dataset.to_csv(ds_path)
        paths.append(ds_path)

    plotdir = outdir / "plotdata"
    plotdir.mkdir(exist_ok=True)
    paths.extend(_write_plotdata(report, plotdir))

    if figures:
        from .figures import render_report_figures

        paths.extend(render_report_figures(report, outdir))
    return paths


def resolve_outdir(cfg, override=None):
    """Output directory precedence: CLI flag, environment variable, config."""
    if override:
        return override
    env = os.environ.get(OUTDIR_ENV_VAR)
    if env:
        return env
    return cfg.outdir or f"out/{cfg.scenario}"


def with_outdir(cfg, outdir):
    return dataclasses.replace(cfg, outdir=outdir)

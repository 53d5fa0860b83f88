"""Run configuration, single runs, convergence ladders and file output."""

from __future__ import annotations

import logging
import math
import os
import time
import warnings
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from fwldg.diagnostics import conserved_quantities
from fwldg.field import DGField, Norms, dump_csv, norms, project_l2
from fwldg.mesh import Mesh1D, build_mesh
from fwldg.problems import PROBLEMS, ProblemSpec, problem
from fwldg.scheme1 import SchemeFW1
from fwldg.scheme2 import SchemeFW2
from fwldg.timeloop import IntegrationResult, integrate, time_step, tvb_limit

logger = logging.getLogger(__name__)

SCHEMES = ("d1", "c1", "d2", "c2")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    scheme: str = "d1"
    problem: str = "smooth_manufactured"
    p: int | None = None
    degree: int = 2
    n_cells: int | None = None
    domain: tuple[float, float] | None = None
    t_final: float | None = None
    alpha: float = 0.1
    dt: float | None = None
    limiter: float | None = None
    #: which variable the second family limits, ``"u"`` or ``"w"``
    limit_variable: str = "u"
    #: ``"power"``: alpha h^((k+1)/3); ``"wavespeed"``: the same divided by
    #: ``max(1, max |f'(u0)|)``
    dt_rule: str = "power"
    snapshots: tuple[float, ...] = ()
    out: str | None = None
    perturb: float = 0.0
    seed: int = 0
    cadence: int = 1
    use_source: bool = True
    problem_args: dict[str, Any] = field(default_factory=dict)
    check_residuals: bool = False

    def validate(self, warn: bool = True) -> RunConfig:
        self.scheme = self.scheme.lower()
        if self.scheme not in SCHEMES:
            raise ConfigError(
                f"unknown scheme {self.scheme!r}; expected one of {', '.join(SCHEMES)}")
        if self.problem not in PROBLEMS:
            raise ConfigError(
                f"unknown problem {self.problem!r}; available: {', '.join(PROBLEMS)}")
        if self.degree < 0:
            raise ConfigError(f"degree must be nonnegative, got {self.degree}")
        if self.p is not None and self.p < 2:
            raise ConfigError(f"need p >= 2, got {self.p}")
        if self.alpha <= 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if self.dt is not None and self.dt <= 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.limiter is not None and self.limiter < 0:
            raise ConfigError(f"limiter constant must be nonnegative, got {self.limiter}")
        if self.limit_variable not in ("w", "u"):
            raise ConfigError(f"limit_variable must be 'w' or 'u', got {self.limit_variable!r}")
        if self.dt_rule not in ("power", "wavespeed"):
            raise ConfigError(f"dt_rule must be 'power' or 'wavespeed', got {self.dt_rule!r}")
        if not 0.0 <= self.perturb < 1.0:
            raise ConfigError(f"perturbation must lie in [0, 1), got {self.perturb}")
        if self.cadence < 1:
            raise ConfigError(f"cadence must be at least 1, got {self.cadence}")

        if not warn:
            return self
        if self.scheme.startswith("c") and self.degree < 2:
            warnings.warn(
                f"scheme {self.scheme} with k={self.degree}: the error estimate for "
                "the conservative schemes assumes k >= 2", stacklevel=2)
        if self.scheme.startswith("d") and self.degree < 1:
            warnings.warn(
                f"scheme {self.scheme} with k={self.degree}: the error estimate for "
                "the dissipative schemes assumes k >= 1", stacklevel=2)
        return self


# {{{ setup


@dataclass
class Setup:
    config: RunConfig
    problem: ProblemSpec
    mesh: Mesh1D
    scheme: SchemeFW1 | SchemeFW2
    state: DGField
    dt: float
    t_final: float


def _problem_for(config: RunConfig) -> ProblemSpec:
    kwargs = dict(config.problem_args)
    if config.p is not None and config.problem in ("shock1", "shock2"):
        kwargs.setdefault("p", config.p)
    spec = problem(config.problem, **kwargs)
    if config.p is not None and config.p != spec.p:
        if spec.exact is not None:
            warnings.warn(
                f"p={config.p} differs from the p={spec.p} of {spec.id}; "
                "the exact solution and source no longer match", stacklevel=3)
        spec = replace(spec, p=config.p)
    return spec


def setup(config: RunConfig) -> Setup:
    config.validate(warn=False)
    spec = _problem_for(config)
    a, b = config.domain if config.domain is not None else (spec.a, spec.b)
    n_cells = config.n_cells or spec.n_cells
    rng = np.random.default_rng(config.seed)
    mesh = build_mesh(a, b, n_cells, config.perturb, rng)
    k = config.degree

    if config.scheme in ("d1", "c1"):
        scheme = SchemeFW1(mesh, k, spec.p, config.scheme,
                           source=spec.source if config.use_source else None,
                           check_residuals=config.check_residuals)
    else:
        scheme = SchemeFW2(mesh, k, spec.p, config.scheme,
                           source_w=spec.source_w if config.use_source else None,
                           check_residuals=config.check_residuals)

    kinks = spec.kinks(0.0) if spec.kinks is not None else None
    u0 = project_l2(spec.initial, mesh, k, kinks=kinks)
    state = scheme.initial_state(u0)

    if config.dt is not None:
        dt = config.dt
    else:
        dt = time_step(mesh, k, config.alpha)
        if config.dt_rule == "wavespeed":
            speed = np.max(np.abs(u0.at_reference(np.linspace(-1.0, 1.0, 2 * k + 3))))
            dt /= max(1.0, speed ** (spec.p - 1))
    t_final = config.t_final if config.t_final is not None else spec.t_final
    return Setup(config=config, problem=spec, mesh=mesh, scheme=scheme,
                 state=state, dt=dt, t_final=t_final)


def make_limiter(scheme, M: float | None, variable: str = "u"):
    if M is None:
        return None
    if scheme.family == 1 or variable == "w":
        return lambda state: tvb_limit(state, M)

    def limit_u(w):
        u = tvb_limit(scheme.solution(w), M)
        return scheme.elliptic.forward(u)[0]

    return limit_u

# }}}


# {{{ run


@dataclass
class RunResult:
    setup: Setup
    integration: IntegrationResult
    wall_clock: float
    error: Norms | None = None

    @property
    def config(self) -> RunConfig:
        return self.setup.config

    @property
    def ok(self) -> bool:
        return self.integration.ok

    def solution(self, state: DGField | None = None) -> DGField:
        if state is None:
            state = self.integration.state
        return self.setup.scheme.solution(state)


def run(config: RunConfig, *, on_step=None) -> RunResult:
    s = setup(config)
    scheme = s.scheme
    limiter = make_limiter(scheme, config.limiter, config.limit_variable)

    def monitor(state):
        c = conserved_quantities(scheme, state)
        return c.E0, c.E1, c.E2

    snapshots = tuple(config.snapshots) or (s.t_final,)
    tic = time.perf_counter()
    result = integrate(s.state, scheme.rhs, s.dt, s.t_final,
                       limiter=limiter, monitor=monitor, cadence=config.cadence,
                       snapshot_times=snapshots, on_step=on_step)
    wall = time.perf_counter() - tic

    error = None
    if result.ok and s.problem.exact is not None and config.use_source:
        exact = s.problem.exact
        T = result.t
        kinks = s.problem.kinks(T) if s.problem.kinks is not None else None
        error = norms(scheme.solution(result.state), lambda x: exact(x, T), kinks=kinks)

    if not result.ok:
        logger.error("run failed: %s", result.failure)

    return RunResult(setup=s, integration=result, wall_clock=wall, error=error)

# }}}


# {{{ convergence


@dataclass
class ConvergenceRow:
    n_cells: int
    l2: float
    l2_order: float | None
    linf: float
    linf_order: float | None
    failed: str | None = None


@dataclass
class ConvergenceReport:
    config: RunConfig
    rows: list[ConvergenceRow]

    def to_csv(self) -> str:
        lines = ["N,l2_error,l2_order,linf_error,linf_order"]
        for r in self.rows:
            lines.append(",".join([
                str(r.n_cells), f"{r.l2:.6e}", _fmt_order(r.l2_order, ""),
                f"{r.linf:.6e}", _fmt_order(r.linf_order, "")]))
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        head = (f"scheme {self.config.scheme.upper()}, P{self.config.degree}, "
                f"problem {self.config.problem}")
        lines = [head, f"{'N':>6} {'L2 error':>12} {'order':>6} {'Linf error':>12} {'order':>6}"]
        for r in self.rows:
            if r.failed:
                lines.append(f"{r.n_cells:>6} failed: {r.failed}")
                continue
            lines.append(
                f"{r.n_cells:>6} {r.l2:>12.2E} {_fmt_order(r.l2_order, '--'):>6} "
                f"{r.linf:>12.2E} {_fmt_order(r.linf_order, '--'):>6}")
        lines.append("Linf sampled at quadrature nodes and cell ends")
        return "\n".join(lines) + "\n"


def _fmt_order(value: float | None, missing: str) -> str:
    return missing if value is None or not math.isfinite(value) else f"{value:.2f}"


def convergence_orders(n_cells: list[int], errors: list[float]) -> list[float | None]:
    """Observed orders ``log(e_prev / e) / log(N / N_prev)``; the first is ``None``."""
    orders: list[float | None] = [None]
    for i in range(1, len(errors)):
        e0, e1 = errors[i - 1], errors[i]
        if e0 > 0 and e1 > 0 and math.isfinite(e0) and math.isfinite(e1):
            orders.append(math.log(e0 / e1) / math.log(n_cells[i] / n_cells[i - 1]))
        else:
            orders.append(None)
    return orders


def run_convergence(config: RunConfig, ladder: list[int]) -> ConvergenceReport:
    spec = _problem_for(config.validate(warn=False))
    if spec.exact is None:
        raise ConfigError(f"problem {spec.id} has no exact solution")

    l2, linf, failed = [], [], []
    for n in ladder:
        rung = replace(config, n_cells=n, out=None, snapshots=())
        result = run(rung)
        if result.ok and result.error is not None:
            l2.append(result.error.l2)
            linf.append(result.error.linf)
            failed.append(None)
        else:
            l2.append(math.nan)
            linf.append(math.nan)
            failed.append(str(result.integration.failure))

    l2_orders = convergence_orders(ladder, l2)
    linf_orders = convergence_orders(ladder, linf)
    rows = [ConvergenceRow(n, e2, o2, ei, oi, f)
            for n, e2, o2, ei, oi, f in zip(ladder, l2, l2_orders, linf, linf_orders, failed)]
    return ConvergenceReport(config=config, rows=rows)

# }}}


# {{{ output


def snapshot_name(t: float) -> str:
    return f"solution_t{t:.6f}.csv"


def emit_outputs(result: RunResult, out: str | os.PathLike,
                 convergence: ConvergenceReport | None = None) -> list[Path]:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    for t, state in sorted(result.integration.snapshots.items()):
        path = out / snapshot_name(t)
        dump_csv(result.solution(state), path)
        written.append(path)

    path = out / "diagnostics.csv"
    with open(path, "w") as outf:
        outf.write("t,E0,E1,E2,dE2_step\n")
        for r in result.integration.records:
            outf.write(f"{r.t:.16e},{r.E0:.16e},{r.E1:.16e},{r.E2:.16e},{r.dE2_step:.16e}\n")
    written.append(path)

    if convergence is not None:
        path = out / "convergence.csv"
        path.write_text(convergence.to_csv())
        written.append(path)

    path = out / "report.txt"
    path.write_text(format_report(result, convergence))
    written.append(path)
    return written


def format_report(result: RunResult, convergence: ConvergenceReport | None = None) -> str:
    s = result.setup
    lines = ["# configuration"]
    for key, value in asdict(result.config).items():
        lines.append(f"{key} = {value}")
    lines += [
        f"resolved_n_cells = {s.mesh.n_cells}",
        f"resolved_t_final = {s.t_final}",
        f"dt = {s.dt:.6e}",
        "",
        "# run",
        f"wall_clock_seconds = {result.wall_clock:.3f}",
        f"steps = {result.integration.n_steps}",
        f"reached_t = {result.integration.t:.12g}",
    ]
    failure = result.integration.failure
    if failure is not None:
        lines += ["status = failed",
                  f"failure_time = {failure.t:.12g}",
                  f"failure_stage = {failure.stage}"]
    else:
        lines.append("status = ok")

    records = result.integration.records
    if records:
        first, last = records[0], records[-1]
        lines += ["", "# conservation"]
        for name in ("E0", "E1", "E2"):
            v0, v1 = getattr(first, name), getattr(last, name)
            change = abs(v1 - v0)
            rel = change / abs(v0) if v0 != 0 else float("inf")
            lines.append(f"{name}: initial {v0:.16e} final {v1:.16e} "
                         f"change {change:.3e} relative {rel:.3e}")
        E2 = np.array([r.E2 for r in records])
        lines.append(f"max |E2(t) - E2(0)| = {np.max(np.abs(E2 - E2[0])):.6e}")

    if result.error is not None:
        lines += ["", "# error at final time (Linf sampled at quadrature nodes and cell ends)",
                  f"l2 = {result.error.l2:.6e}", f"linf = {result.error.linf:.6e}"]
    if convergence is not None:
        lines += ["", "# convergence", convergence.to_text()]
    return "\n".join(lines) + "\n"

# }}}

"""SSP-RK3 stepping, the TVB minmod limiter and the time-step rule."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from fwldg.field import DGField
from fwldg.mesh import Mesh1D


class NonFiniteError(FloatingPointError):
    """A stage produced NaN or Inf."""

    def __init__(self, stage: int, t: float) -> None:
        super().__init__(f"non-finite values in RK stage {stage} at t={t:.6g}")
        self.stage = stage
        self.t = t


def _is_finite(state: Any) -> bool:
    values = state.coeffs if isinstance(state, DGField) else state
    return bool(np.all(np.isfinite(values)))


def step_ssprk3(state, rhs: Callable, dt: float, t: float = 0.0,
                limiter: Callable | None = None):
    """One Shu-Osher SSP-RK3 step, limiting after every stage when asked."""
    if not dt > 0:
        raise ValueError(f"need dt > 0, got {dt}")
    if limiter is None:
        def limiter(x):
            return x

    # overflow is reported through NonFiniteError instead of numpy warnings
    with np.errstate(over="ignore", invalid="ignore"):
        u1 = limiter(state + dt * rhs(state, t))
        if not _is_finite(u1):
            raise NonFiniteError(1, t)
        u2 = limiter(0.75 * state + 0.25 * (u1 + dt * rhs(u1, t + dt)))
        if not _is_finite(u2):
            raise NonFiniteError(2, t)
        u3 = limiter(state * (1.0 / 3.0) + (2.0 / 3.0) * (u2 + dt * rhs(u2, t + 0.5 * dt)))
        if not _is_finite(u3):
            raise NonFiniteError(3, t)

    return u3


def time_step(mesh: Mesh1D, k: int, alpha: float = 0.1) -> float:
    """``alpha * h^((k + 1) / 3)`` for ``k >= 2``, ``alpha * h`` below that."""
    if alpha <= 0:
        raise ValueError(f"need alpha > 0, got {alpha}")
    h = mesh.h
    if k >= 2:
        return alpha * h ** ((k + 1) / 3.0)
    return alpha * h


# {{{ limiter


def minmod(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    s = np.sign(a)
    same = (s == np.sign(b)) & (s == np.sign(c))
    return np.where(same, s * np.minimum(np.abs(a), np.minimum(np.abs(b), np.abs(c))), 0.0)


def tvb_limit(u: DGField, M: float = 1.0) -> DGField:
    """Cockburn-Shu TVB limiter on the modal coefficients.

    The two end deviations from the cell mean are passed through the modified
    minmod against the neighbouring mean differences; a deviation below
    ``M dx^2`` is left alone.  A cell with any modified deviation becomes the
    linear polynomial carrying the limited deviations.  Cell means never change.
    """
    if M < 0:
        raise ValueError(f"need M >= 0, got {M}")
    k = u.k
    if k == 0:
        return u.copy()

    c = u.coeffs
    mean = c[:, 0]
    sign = (-1.0) ** np.arange(k + 1)
    dev_right = c[:, 1:].sum(axis=1)
    dev_left = -(c[:, 1:] @ sign[1:])
    d_plus = np.roll(mean, -1) - mean
    d_minus = mean - np.roll(mean, 1)

    bound = M * u.mesh.cell_widths**2

    def modified(a):
        return np.where(np.abs(a) <= bound, a, minmod(a, d_plus, d_minus))

    lim_right = modified(dev_right)
    lim_left = modified(dev_left)
    changed = (lim_right != dev_right) | (lim_left != dev_left)

    out = c.copy()
    out[changed, 1] = 0.5 * (lim_right[changed] + lim_left[changed])
    out[changed, 2:] = 0.0
    return DGField(u.mesh, out)

# }}}


# {{{ integration


@dataclass
class Record:
    t: float
    E0: float
    E1: float
    E2: float
    dE2_step: float


@dataclass
class IntegrationResult:
    state: Any
    t: float
    n_steps: int
    records: list[Record] = field(default_factory=list)
    snapshots: dict[float, Any] = field(default_factory=dict)
    failure: NonFiniteError | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None


def integrate(state, rhs: Callable, dt: float, t_final: float, *,
              t0: float = 0.0,
              limiter: Callable | None = None,
              monitor: Callable | None = None,
              cadence: int = 1,
              snapshot_times: tuple[float, ...] = (),
              on_step: Callable | None = None) -> IntegrationResult:
    """Advance to exactly *t_final*, shortening the last step (and any step
    crossing a snapshot time).

    :arg monitor: ``state -> (E0, E1, E2)``, recorded every *cadence* steps and
        at the end.
    :arg on_step: called as ``on_step(old, new, t_new)`` after every step.
    """
    if t_final < t0:
        raise ValueError(f"t_final={t_final} precedes t0={t0}")

    pending = sorted(ts for ts in snapshot_times if t0 <= ts <= t_final)
    result = IntegrationResult(state=state, t=t0, n_steps=0)
    eps = 1.0e-12 * max(1.0, abs(t_final))

    last_E2 = None

    def record(s, t):
        nonlocal last_E2
        if monitor is None:
            return
        E0, E1, E2 = monitor(s)
        dE2 = 0.0 if last_E2 is None else E2 - last_E2
        result.records.append(Record(t, E0, E1, E2, dE2))
        last_E2 = E2

    def take_snapshots(s, t):
        while pending and abs(pending[0] - t) <= eps:
            result.snapshots[pending.pop(0)] = s

    record(state, t0)
    take_snapshots(state, t0)

    t = t0
    while t < t_final - eps:
        step = min(dt, t_final - t)
        if pending and pending[0] > t + eps:
            step = min(step, pending[0] - t)
        try:
            new = step_ssprk3(state, rhs, step, t, limiter)
        except NonFiniteError as exc:
            result.failure = exc
            break

        t_new = t_final if abs(t + step - t_final) <= eps else t + step
        if on_step is not None:
            on_step(state, new, t_new)
        state, t = new, t_new
        result.n_steps += 1

        if result.n_steps % cadence == 0 or t >= t_final - eps:
            record(state, t)
        take_snapshots(state, t)

    result.state = state
    result.t = t
    return result

# }}}

"""Initial data, exact solutions and source terms for the numerical experiments."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

Profile = Callable[[np.ndarray], np.ndarray]
SpaceTime = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class ProblemSpec:
    id: str
    a: float
    b: float
    p: int
    initial: Profile
    exact: SpaceTime | None = None
    #: forcing for the ``u`` equation
    source: SpaceTime | None = None
    #: the same forcing after applying ``1 - d_xx``, for the ``w`` equation
    source_w: SpaceTime | None = None
    #: locations of derivative jumps at time ``t`` (peakon crests)
    kinks: Callable[[float], list[float]] | None = None
    limiter: bool = False
    t_final: float = 1.0
    n_cells: int = 160
    degree: int = 2
    notes: str = ""
    params: dict = field(default_factory=dict)


# {{{ smooth


def _smooth() -> ProblemSpec:
    def exact(x, t):
        return np.sin(x - t)

    def source(x, t):
        # u_t + (u^3/3)_x + (1 - d_xx)^{-1} u_x with (1 - d_xx)^{-1} cos = cos / 2
        th = x - t
        return np.cos(th) * (np.sin(th) ** 2 - 0.5)

    def source_w(x, t):
        # source = -cos/4 - cos(3 th)/4, and (1 - d_xx) cos(m th) = (1 + m^2) cos(m th)
        th = x - t
        return -0.5 * np.cos(th) - 2.5 * np.cos(3.0 * th)

    return ProblemSpec(
        id="smooth_manufactured", a=0.0, b=2.0 * np.pi, p=3,
        initial=lambda x: exact(x, 0.0), exact=exact,
        source=source, source_w=source_w,
        t_final=0.1, n_cells=40, degree=2,
        notes="u = sin(x - t), p = 3, forced")

# }}}


# {{{ shocks


def _shock1(p: int = 4) -> ProblemSpec:
    return ProblemSpec(
        id="shock1", a=0.0, b=1.0, p=p,
        initial=lambda x: np.cos(2.0 * np.pi * x + 0.5) + 1.0,
        limiter=True, t_final=0.4, n_cells=160, degree=2,
        notes="no exact solution; compare against a refined run")


def _shock2(p: int = 2) -> ProblemSpec:
    def initial(x):
        return (0.2 * np.cos(2.0 * np.pi * x) + 0.1 * np.cos(4.0 * np.pi * x)
                - 0.3 * np.sin(6.0 * np.pi * x) + 0.5)

    return ProblemSpec(
        id="shock2", a=0.0, b=1.0, p=p, initial=initial,
        limiter=True, t_final=1.0, n_cells=320, degree=2,
        notes="no exact solution; compare against a refined run")

# }}}


# {{{ solitons


KAPPA1 = 0.4
KAPPA2 = 0.6


def two_soliton(x: np.ndarray, t: float = 0.0) -> np.ndarray:
    """KdV two-soliton profile, used as initial data."""
    k1, k2 = KAPPA1, KAPPA2
    a2 = ((k1 - k2) / (k1 + k2)) ** 2
    x = np.asarray(x, dtype=np.float64)
    th1 = k1 * x - k1**3 * t + 4.0
    th2 = k2 * x - k2**3 * t + 15.0

    # scale numerator by exp(-2B) and denominator by exp(-B) to avoid overflow
    B = np.maximum.reduce([np.zeros_like(th1), th1, th2, th1 + th2])

    def e(z):
        return np.exp(z - B)

    def ee(z):
        return np.exp(z - 2.0 * B)

    num = (k1**2 * ee(th1) + k2**2 * ee(th2) + 2.0 * (k2 - k1) ** 2 * ee(th1 + th2)
           + a2 * (k2**2 * ee(2.0 * th1 + th2) + k1**2 * ee(th1 + 2.0 * th2)))
    den = e(0.0 * th1) + e(th1) + e(th2) + a2 * e(th1 + th2)
    return 12.0 * num / den**2


def two_soliton_initial(x: np.ndarray) -> np.ndarray:
    return two_soliton(x, 0.0)


def _two_soliton() -> ProblemSpec:
    return ProblemSpec(
        id="two_soliton", a=-50.0, b=200.0, p=2,
        initial=two_soliton_initial, t_final=120.0, n_cells=160, degree=2,
        notes="KdV two-soliton data evolved by the Fornberg-Whitham equation",
        params={"kappa1": KAPPA1, "kappa2": KAPPA2})

# }}}


# {{{ peakons


def _wrap(z: np.ndarray, half: float) -> np.ndarray:
    """Map *z* into ``[-half, half)``."""
    return (z + half) % (2.0 * half) - half


def _single_peakon(s: float = 2.0) -> ProblemSpec:
    a, b = -25.0, 25.0
    half = 0.5 * (b - a)

    def exact(x, t):
        z = _wrap(np.asarray(x) - s * t - 0.5 * (a + b), half)
        return 4.0 / 3.0 * np.exp(-0.5 * np.abs(z)) + s - 4.0 / 3.0

    return ProblemSpec(
        id="single_peakon", a=a, b=b, p=2,
        initial=lambda x: exact(x, 0.0), exact=exact,
        kinks=lambda t: [0.5 * (a + b) + s * t],
        t_final=6.0, n_cells=320, degree=2,
        notes="exponentially decaying peakon treated as periodic",
        params={"s": s})


@dataclass(frozen=True)
class PeriodicPeakonParams:
    d_plus: float
    d_minus: float
    T_p: float
    phi_star: float

    @property
    def cuspon_limit(self) -> bool:
        return self.d_minus == 0.0


def periodic_peakon_params(s: float, g: float) -> PeriodicPeakonParams:
    """Amplitudes and half period of the periodic peakon of speed *s*.

    At ``d_minus = 0`` (e.g. ``s = 2``, ``g = 4/9``) the wave degenerates to the
    cuspon limit and the half period is infinite.
    """
    rad1 = 4.0 * g + 4.0 * s - 2.0 * s**2
    rad2 = 9.0 * s**2 - 18.0 * s + 8.0 - 18.0 * g
    tol = 1.0e-12
    if rad1 < -tol:
        raise ValueError(f"4g + 4s - 2s^2 = {rad1:.6g} < 0 for s={s}, g={g}")
    if rad2 < -tol:
        raise ValueError(f"9s^2 - 18s + 8 - 18g = {rad2:.6g} < 0 for s={s}, g={g}")
    rad1, rad2 = max(rad1, 0.0), max(rad2, 0.0)

    d_plus = (4.0 + 3.0 * math.sqrt(rad1)) / 6.0
    d_minus = (4.0 - 3.0 * math.sqrt(rad1)) / 6.0
    if abs(d_minus) < 1.0e-14:
        d_minus = 0.0
    phi_star = (-4.0 + 3.0 * s + math.sqrt(2.0 * rad2)) / 3.0

    if d_minus <= 0.0 or phi_star - s + 4.0 / 3.0 <= 0.0:
        T_p = math.inf
    else:
        T_p = 2.0 * abs(math.log(phi_star - s + 4.0 / 3.0) - math.log(2.0 * d_minus))

    return PeriodicPeakonParams(d_plus=d_plus, d_minus=d_minus, T_p=T_p,
                                phi_star=phi_star)


def periodic_peakon_profile(zeta: np.ndarray, s: float,
                            params: PeriodicPeakonParams) -> np.ndarray:
    """One period of the wave, ``zeta`` folded into ``[-T_p, T_p)``."""
    z = _wrap(np.asarray(zeta, dtype=np.float64), params.T_p)
    az = np.abs(z)
    return (params.d_plus * np.exp(-0.5 * az) + params.d_minus * np.exp(0.5 * az)
            + s - 4.0 / 3.0)


def _periodic_peakon(s: float = 2.0, g: float = 0.3, periods: int = 3) -> ProblemSpec:
    params = periodic_peakon_params(s, g)
    if not math.isfinite(params.T_p):
        raise ValueError(f"s={s}, g={g} is the cuspon limit; no finite period")
    T_p = params.T_p
    a, b = -periods * T_p, periods * T_p

    def exact(x, t):
        return periodic_peakon_profile(np.asarray(x) - s * t, s, params)

    def kinks(t):
        # crests sit at s t + 2 n T_p
        first = a + (s * t - a) % (2.0 * T_p)
        return [first + 2.0 * n * T_p for n in range(periods + 1)
                if first + 2.0 * n * T_p < b]

    return ProblemSpec(
        id="periodic_peakon", a=a, b=b, p=2,
        initial=lambda x: exact(x, 0.0), exact=exact, kinks=kinks,
        t_final=1.0, n_cells=160, degree=2,
        notes=f"periodic peakon on [-{periods} T_p, {periods} T_p]",
        params={"s": s, "g": g, "d_plus": params.d_plus,
                "d_minus": params.d_minus, "T_p": T_p})

# }}}


PROBLEMS = {
    "smooth_manufactured": _smooth,
    "shock1": _shock1,
    "shock2": _shock2,
    "two_soliton": _two_soliton,
    "single_peakon": _single_peakon,
    "periodic_peakon": _periodic_peakon,
}


def problem(id: str, **kwargs) -> ProblemSpec:
    """Look up a problem by id; keyword arguments reach the constructor
    (``p`` for the shocks, ``s`` and ``g`` for the peakons)."""
    try:
        factory = PROBLEMS[id]
    except KeyError:
        raise KeyError(
            f"unknown problem {id!r}; available: {', '.join(PROBLEMS)}") from None
    return factory(**kwargs)

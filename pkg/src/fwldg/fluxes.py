"""Interface fluxes for ``f(u) = u^p / p`` and for the linear auxiliary variables."""

from __future__ import annotations

import enum

import numpy as np

from fwldg.field import TracePair, Traces


class FluxKind(enum.Enum):
    GODUNOV = "godunov_f"
    CONSERVATIVE = "conservative_f"
    LEFT = "left_trace"
    RIGHT = "right_trace"
    CENTRAL = "central"

    @property
    def is_nonlinear(self) -> bool:
        return self in (FluxKind.GODUNOV, FluxKind.CONSERVATIVE)


def flux_function(u, p: int):
    return u**p / p


def godunov_flux(u_minus, u_plus, p: int):
    """Godunov flux: min of ``f`` over ``[u-, u+]`` if ``u- < u+``, else the max
    over ``[u+, u-]``.

    ``f = u^p / p`` has its only critical point at ``u = 0``; it is a minimum for
    even ``p`` and an inflection for odd ``p``, where ``f`` is monotone and the
    endpoints suffice.
    """
    if p < 2:
        raise ValueError(f"need p >= 2, got {p}")
    um = np.asarray(u_minus, dtype=np.float64)
    up = np.asarray(u_plus, dtype=np.float64)

    fm = flux_function(um, p)
    fp = flux_function(up, p)
    rising = um < up
    result = np.where(rising, np.minimum(fm, fp), np.maximum(fm, fp))
    if p % 2 == 0:
        straddle = rising & (um < 0.0) & (up > 0.0)
        result = np.where(straddle, 0.0, result)

    return result if result.ndim else float(result)


def conservative_flux(u_minus, u_plus, p: int):
    """``[[F]] / [[u]]`` with ``F = u^{p+1} / (p (p+1))``, written as the
    polynomial sum so equal traces need no special case."""
    if p < 2:
        raise ValueError(f"need p >= 2, got {p}")
    um = np.asarray(u_minus, dtype=np.float64)
    up = np.asarray(u_plus, dtype=np.float64)

    total = sum(up ** (p - m) * um**m for m in range(p + 1))
    result = total / (p * (p + 1))

    return result if np.ndim(result) else float(result)


def nonlinear_flux(kind: FluxKind, u_minus, u_plus, p: int):
    if kind is FluxKind.GODUNOV:
        return godunov_flux(u_minus, u_plus, p)
    if kind is FluxKind.CONSERVATIVE:
        return conservative_flux(u_minus, u_plus, p)
    raise ValueError(f"{kind.value} is not a nonlinear flux")


def linear_flux(pair: TracePair | Traces, kind: FluxKind):
    """One-sided or central flux for a linear variable."""
    if kind is FluxKind.LEFT:
        return pair.minus
    if kind is FluxKind.RIGHT:
        return pair.plus
    if kind is FluxKind.CENTRAL:
        return pair.average
    raise ValueError(f"{kind.value} is not a linear flux")

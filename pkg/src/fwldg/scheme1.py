"""Schemes D1 and C1 for ``u_t + f(u)_x + (1 - d_xx)^{-1} u_x = 0``.

The equation is split into ``u_t + f(u)_x + v = 0``, ``v - q_x = u_x`` and
``q = v_x``.  In coefficient space, with ``M`` the (diagonal) mass matrix and
``A_hat`` the assembled linear weak forms,

    [  M    -A_qhat ] [v]   [A_uhat u]
    [-A_vhat   M    ] [q] = [   0    ]

is factorized once, and ``M u_t = -N(u) - M v + M P g``.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from fwldg.field import DGField, project_l2
from fwldg.fluxes import FluxKind
from fwldg.linsolve import FactorizedSystem
from fwldg.mesh import Mesh1D
from fwldg.operators import (
    inverse_mass, linear_operator_matrix, mass_matrix, nonlinear_moments)

Source = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class FluxChoiceFW1:
    nonlinear: FluxKind
    q: FluxKind
    v: FluxKind
    u: FluxKind


FLUXES_FW1 = {
    "d1": FluxChoiceFW1(FluxKind.GODUNOV, FluxKind.LEFT, FluxKind.RIGHT, FluxKind.LEFT),
    "c1": FluxChoiceFW1(FluxKind.CONSERVATIVE, FluxKind.CENTRAL,
                        FluxKind.CENTRAL, FluxKind.CENTRAL),
}


def _fluxes(kind: str) -> FluxChoiceFW1:
    try:
        return FLUXES_FW1[kind.lower()]
    except KeyError:
        raise ValueError(f"unknown scheme {kind!r}, expected 'd1' or 'c1'") from None


class AuxSolverFW1:
    """Factorized auxiliary system producing ``(v_h, q_h)`` from ``u_h``."""

    def __init__(self, mesh: Mesh1D, k: int, kind: str) -> None:
        self.mesh = mesh
        self.k = k
        self.kind = kind.lower()
        self.fluxes = _fluxes(kind)

        M = mass_matrix(mesh, k)
        A_q = linear_operator_matrix(mesh, k, self.fluxes.q)
        A_v = linear_operator_matrix(mesh, k, self.fluxes.v)
        self.A_u = linear_operator_matrix(mesh, k, self.fluxes.u)
        self.size = mesh.n_cells * (k + 1)

        matrix = sp.bmat([[M, -A_q], [-A_v, M]], format="csc")
        self.system = FactorizedSystem(
            matrix, label=f"N={mesh.n_cells}, k={k}, scheme={self.kind}")

    @property
    def matrix(self) -> sp.csc_matrix:
        return self.system.matrix

    def rhs_vector(self, u: DGField) -> np.ndarray:
        return np.concatenate([self.A_u @ u.coeffs.ravel(), np.zeros(self.size)])

    def solve(self, u: DGField, check: bool = False) -> tuple[DGField, DGField]:
        b = self.rhs_vector(u)
        x = self.system.solve(b)
        if check:
            res = self.system.residual(x, b)
            if res > 1.0e-10:
                raise RuntimeError(f"auxiliary solve residual {res:.3e}")

        shape = u.coeffs.shape
        v = DGField(self.mesh, x[:self.size].reshape(shape))
        q = DGField(self.mesh, x[self.size:].reshape(shape))
        return v, q


def assemble_aux_fw1(mesh: Mesh1D, k: int, kind: str) -> AuxSolverFW1:
    return AuxSolverFW1(mesh, k, kind)


def solve_aux_fw1(solver: AuxSolverFW1, u: DGField,
                  check: bool = False) -> tuple[DGField, DGField]:
    return solver.solve(u, check=check)


def auxiliary_energy_residual(u: DGField, v: DGField, q: DGField) -> float:
    """``|‖v‖² + ‖q‖² + (q, u)|`` relative to ``1 + ‖u‖²``."""
    value = v.inner(v) + q.inner(q) + q.inner(u)
    return abs(value) / (1.0 + u.inner(u))


class SchemeFW1:
    """Semi-discrete right-hand side of D1 / C1; the evolved variable is ``u_h``."""

    family = 1

    def __init__(self, mesh: Mesh1D, k: int, p: int, kind: str, *,
                 source: Source | None = None,
                 check_residuals: bool = False) -> None:
        if p < 2:
            raise ValueError(f"need p >= 2, got {p}")
        self.mesh = mesh
        self.k = k
        self.p = p
        self.kind = kind.lower()
        self.source = source
        self.check_residuals = check_residuals

        self.aux = AuxSolverFW1(mesh, k, kind)
        self.nonlinear_flux = self.aux.fluxes.nonlinear
        self.minv = inverse_mass(mesh, k)
        self.last_aux: tuple[DGField, DGField] | None = None

    def initial_state(self, u0: DGField) -> DGField:
        return u0.copy()

    def solution(self, state: DGField) -> DGField:
        return state

    def auxiliary(self, u: DGField) -> tuple[DGField, DGField]:
        v, q = self.aux.solve(u, check=self.check_residuals)
        if self.check_residuals:
            res = auxiliary_energy_residual(u, v, q)
            if res > 1.0e-9:
                raise RuntimeError(f"auxiliary energy identity violated: {res:.3e}")
        self.last_aux = (v, q)
        return v, q

    def rhs(self, u: DGField, t: float = 0.0, *,
            with_source: bool = True) -> DGField:
        v, _ = self.auxiliary(u)
        b = nonlinear_moments(u, self.nonlinear_flux, self.p)
        dudt = -b * self.minv - v.coeffs
        if with_source and self.source is not None:
            source = self.source
            dudt += project_l2(lambda x: source(x, t), self.mesh, self.k).coeffs
        return DGField(self.mesh, dudt)

    def time_derivative_of_solution(self, state: DGField, dstate: DGField) -> DGField:
        return dstate


def rhs_fw1(scheme: SchemeFW1, u: DGField, t: float = 0.0) -> DGField:
    return scheme.rhs(u, t)

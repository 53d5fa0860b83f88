"""Schemes D2 and C2 for ``u_t - u_xxt + f(u)_x + u_x = f(u)_xxx``.

The evolved variable is ``w = u - u_xx``.  Each evaluation first recovers
``(u_h, r_h)`` from ``w_h`` through one factorized global system

    [  M    -A_rhat ] [u]   [M w]
    [-A_uhat   M    ] [r] = [ 0 ]

and then runs the cell-local chain ``s = f(u)_x``, ``p = s_x - u``,
``w_t = p_x - s`` with diagonal mass solves only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from fwldg.field import DGField, project_l2
from fwldg.fluxes import FluxKind
from fwldg.linsolve import FactorizedSystem
from fwldg.mesh import Mesh1D
from fwldg.operators import (
    inverse_mass, linear_moments, linear_operator_matrix, mass, mass_matrix,
    nonlinear_moments)
from fwldg.scheme1 import Source


@dataclass(frozen=True)
class FluxChoiceFW2:
    nonlinear: FluxKind
    u: FluxKind
    r: FluxKind
    s: FluxKind
    p: FluxKind


FLUXES_FW2 = {
    "d2": FluxChoiceFW2(FluxKind.GODUNOV, FluxKind.RIGHT, FluxKind.LEFT,
                        FluxKind.RIGHT, FluxKind.LEFT),
    "c2": FluxChoiceFW2(FluxKind.CONSERVATIVE, FluxKind.CENTRAL, FluxKind.CENTRAL,
                        FluxKind.CENTRAL, FluxKind.CENTRAL),
}


def _fluxes(kind: str) -> FluxChoiceFW2:
    try:
        return FLUXES_FW2[kind.lower()]
    except KeyError:
        raise ValueError(f"unknown scheme {kind!r}, expected 'd2' or 'c2'") from None


class EllipticSolverFW2:
    """Factorized LDG discretization of ``u - u_xx = w``."""

    def __init__(self, mesh: Mesh1D, k: int, kind: str) -> None:
        self.mesh = mesh
        self.k = k
        self.kind = kind.lower()
        self.fluxes = _fluxes(kind)

        self.M = mass_matrix(mesh, k)
        self.A_r = linear_operator_matrix(mesh, k, self.fluxes.r)
        self.A_u = linear_operator_matrix(mesh, k, self.fluxes.u)
        self.size = mesh.n_cells * (k + 1)

        matrix = sp.bmat([[self.M, -self.A_r], [-self.A_u, self.M]], format="csc")
        self.system = FactorizedSystem(
            matrix, label=f"N={mesh.n_cells}, k={k}, scheme={self.kind}")
        self._mass = mass(mesh, k).ravel()

    @property
    def matrix(self) -> sp.csc_matrix:
        return self.system.matrix

    def rhs_vector(self, w: DGField) -> np.ndarray:
        return np.concatenate([self._mass * w.coeffs.ravel(), np.zeros(self.size)])

    def solve(self, w: DGField, check: bool = False) -> tuple[DGField, DGField]:
        b = self.rhs_vector(w)
        x = self.system.solve(b)
        if check:
            res = self.system.residual(x, b)
            if res > 1.0e-10:
                raise RuntimeError(f"elliptic solve residual {res:.3e}")

        shape = w.coeffs.shape
        u = DGField(self.mesh, x[:self.size].reshape(shape))
        r = DGField(self.mesh, x[self.size:].reshape(shape))
        return u, r

    def forward(self, u: DGField) -> tuple[DGField, DGField]:
        """The discrete ``w`` (and ``r``) whose reconstruction is exactly *u*."""
        minv = inverse_mass(self.mesh, self.k)
        r = DGField(self.mesh, (self.A_u @ u.coeffs.ravel()).reshape(u.coeffs.shape)
                    * minv)
        w = u.coeffs - (self.A_r @ r.coeffs.ravel()).reshape(u.coeffs.shape) * minv
        return DGField(self.mesh, w), r


def assemble_elliptic_fw2(mesh: Mesh1D, k: int, kind: str) -> EllipticSolverFW2:
    return EllipticSolverFW2(mesh, k, kind)


def reconstruct_u(solver: EllipticSolverFW2, w: DGField,
                  check: bool = False) -> tuple[DGField, DGField]:
    return solver.solve(w, check=check)


@dataclass
class StageFW2:
    """Everything one right-hand-side evaluation produces."""

    u: DGField
    r: DGField
    s: DGField
    p: DGField
    dwdt: DGField


class SchemeFW2:
    """Semi-discrete right-hand side of D2 / C2; the evolved variable is ``w_h``."""

    family = 2

    def __init__(self, mesh: Mesh1D, k: int, p: int, kind: str, *,
                 source_w: Source | None = None,
                 check_residuals: bool = False) -> None:
        if p < 2:
            raise ValueError(f"need p >= 2, got {p}")
        self.mesh = mesh
        self.k = k
        self.p = p
        self.kind = kind.lower()
        self.source_w = source_w
        self.check_residuals = check_residuals

        self.elliptic = EllipticSolverFW2(mesh, k, kind)
        self.fluxes = self.elliptic.fluxes
        self.minv = inverse_mass(mesh, k)
        self.last_stage: StageFW2 | None = None

    def initial_state(self, u0: DGField) -> DGField:
        """``w_h`` chosen so that the reconstruction returns *u0* exactly."""
        w, _ = self.elliptic.forward(u0)
        return w

    def solution(self, w: DGField) -> DGField:
        u, _ = self.elliptic.solve(w)
        return u

    def stage(self, w: DGField, t: float = 0.0, *,
              with_source: bool = True) -> StageFW2:
        u, r = self.elliptic.solve(w, check=self.check_residuals)
        s = DGField(self.mesh, nonlinear_moments(u, self.fluxes.nonlinear, self.p)
                    * self.minv)
        p = DGField(self.mesh, linear_moments(s, self.fluxes.s) * self.minv
                    - u.coeffs)
        dwdt = linear_moments(p, self.fluxes.p) * self.minv - s.coeffs
        if with_source and self.source_w is not None:
            source = self.source_w
            dwdt += project_l2(lambda x: source(x, t), self.mesh, self.k).coeffs

        result = StageFW2(u=u, r=r, s=s, p=p, dwdt=DGField(self.mesh, dwdt))
        self.last_stage = result
        return result

    def rhs(self, w: DGField, t: float = 0.0, *,
            with_source: bool = True) -> DGField:
        return self.stage(w, t, with_source=with_source).dwdt

    def time_derivative_of_solution(self, w: DGField, dwdt: DGField) -> DGField:
        """``(u_h)_t`` from the time-differentiated elliptic system."""
        dudt, _ = self.elliptic.solve(dwdt)
        return dudt


def rhs_fw2(scheme: SchemeFW2, w: DGField, t: float = 0.0) -> DGField:
    return scheme.rhs(w, t)


def energy_identity_residual(scheme: SchemeFW2, w: DGField) -> float:
    """``|‖s + u_t‖² + ‖p + r_t‖² + (u, p + r_t)|`` relative to ``1 + ‖u‖²``,
    for the homogeneous (source-free) right-hand side."""
    st = scheme.stage(w, with_source=False)
    dudt, drdt = scheme.elliptic.solve(st.dwdt)
    a = st.s + dudt
    b = st.p + drdt
    value = a.inner(a) + b.inner(b) + st.u.inner(b)
    return abs(value) / (1.0 + st.u.inner(st.u))


check_lemma32 = energy_identity_residual

"""Conserved quantities and a brute-force dense assembly used for validation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import legendre as npleg

from fwldg.field import DGField
from fwldg.mesh import Mesh1D


@dataclass(frozen=True)
class Conserved:
    E0: float
    E1: float
    E2: float
    #: true when E1 is not tracked separately (scheme 1, where it equals E0)
    E1_derived: bool = False


def conserved_quantities(scheme, state: DGField) -> Conserved:
    """``E0 = int u_h``, ``E1 = int w_h`` and ``E2 = int u_h^2``.

    For the first family ``w`` is never formed and E1 is reported as E0,
    which it equals for periodic data.
    """
    u = scheme.solution(state)
    E0 = u.integral()
    E2 = u.inner(u)
    if scheme.family == 2:
        return Conserved(E0=E0, E1=state.integral(), E2=E2)
    return Conserved(E0=E0, E1=E0, E2=E2, E1_derived=True)


# {{{ dense oracle

MAX_ORACLE_CELLS = 8
MAX_ORACLE_DEGREE = 2

# (theta_minus, theta_plus) for each named linear flux
_TRACE = {"left": (1.0, 0.0), "right": (0.0, 1.0), "central": (0.5, 0.5)}

# linear fluxes of every scheme, by variable
_SCHEME_FLUXES = {
    "d1": {"q": "left", "v": "right", "u": "left", "f": "godunov"},
    "c1": {"q": "central", "v": "central", "u": "central", "f": "conservative"},
    "d2": {"u": "right", "r": "left", "s": "right", "p": "left", "f": "godunov"},
    "c2": {"u": "central", "r": "central", "s": "central", "p": "central",
           "f": "conservative"},
}


class _DenseSpace:
    """Global basis ``phi_{j,m}(x) = P_m(xi_j(x))`` on cell ``j``, evaluated
    directly with ``numpy.polynomial.legendre``."""

    def __init__(self, mesh: Mesh1D, k: int, n_quad: int = 24) -> None:
        self.mesh = mesh
        self.k = k
        self.n = mesh.n_cells * (k + 1)
        self.xq, self.wq = npleg.leggauss(n_quad)

    def index(self, j: int, m: int) -> int:
        return j * (self.k + 1) + m

    def unit(self, m: int) -> np.ndarray:
        c = np.zeros(self.k + 1)
        c[m] = 1.0
        return c

    def cell_values(self, coeffs: np.ndarray, j: int, xi) -> float:
        return npleg.legval(xi, coeffs[j])

    def cell_dx_values(self, coeffs: np.ndarray, j: int, xi) -> float:
        return npleg.legval(xi, npleg.legder(coeffs[j])) * 2.0 / self.mesh.cell_widths[j]

    def basis_coeffs(self, a: int) -> np.ndarray:
        c = np.zeros((self.mesh.n_cells, self.k + 1))
        c.flat[a] = 1.0
        return c

    def trace_pair(self, coeffs: np.ndarray, i: int) -> tuple[float, float]:
        """``(minus, plus)`` at interface *i* (left end of cell ``i``)."""
        n = self.mesh.n_cells
        minus = self.cell_values(coeffs, (i - 1) % n, 1.0)
        plus = self.cell_values(coeffs, i % n, -1.0)
        return float(minus), float(plus)

    def mass(self) -> np.ndarray:
        M = np.zeros((self.n, self.n))
        for a in range(self.n):
            ca = self.basis_coeffs(a)
            for b in range(self.n):
                cb = self.basis_coeffs(b)
                total = 0.0
                for j in range(self.mesh.n_cells):
                    half = 0.5 * self.mesh.cell_widths[j]
                    total += half * np.sum(self.wq * self.cell_values(ca, j, self.xq)
                                           * self.cell_values(cb, j, self.xq))
                M[a, b] = total
        return M

    def weak_form(self, omega_values: Callable[[int, np.ndarray], np.ndarray],
                  flux: Callable[[int], float], test: np.ndarray) -> float:
        """``sum_j -(w, phi_x) + hat_{j+1/2} phi^-_{j+1/2} - hat_{j-1/2} phi^+_{j-1/2}``."""
        n = self.mesh.n_cells
        total = 0.0
        for j in range(n):
            half = 0.5 * self.mesh.cell_widths[j]
            total -= half * np.sum(self.wq * omega_values(j, self.xq)
                                   * self.cell_dx_values(test, j, self.xq))
            total += flux((j + 1) % n) * self.cell_values(test, j, 1.0)
            total -= flux(j) * self.cell_values(test, j, -1.0)
        return float(total)

    def linear_matrix(self, trace: str) -> np.ndarray:
        tm, tp = _TRACE[trace]
        A = np.zeros((self.n, self.n))
        for b in range(self.n):
            omega = self.basis_coeffs(b)

            def values(j, xi, omega=omega):
                return self.cell_values(omega, j, xi)

            def flux(i, omega=omega):
                minus, plus = self.trace_pair(omega, i)
                return tm * minus + tp * plus

            for a in range(self.n):
                A[a, b] = self.weak_form(values, flux, self.basis_coeffs(a))
        return A

    def nonlinear_vector(self, u: np.ndarray, p: int, kind: str) -> np.ndarray:
        def f(x):
            return x**p / p

        def flux(i):
            um, up = self.trace_pair(u, i)
            if kind == "conservative":
                if um == up:
                    return f(um)
                F = lambda x: x ** (p + 1) / (p * (p + 1))  # noqa: E731
                return (F(up) - F(um)) / (up - um)
            lo, hi = min(um, up), max(um, up)
            candidates = [f(lo), f(hi)] + ([f(0.0)] if lo < 0.0 < hi else [])
            return min(candidates) if um < up else max(candidates)

        def values(j, xi):
            return f(self.cell_values(u, j, xi))

        return np.array([self.weak_form(values, flux, self.basis_coeffs(a))
                         for a in range(self.n)])


@dataclass
class DenseOracle:
    """Dense matrices of one scheme's weak forms.

    ``system``/``system_rhs`` are the global solve (auxiliary ``(v, q)`` for
    the first family, elliptic ``(u, r)`` for the second), with the right-hand
    side ``system_rhs @ data``.  ``rhs`` evaluates the full semi-discrete
    time derivative in coefficient space.
    """

    kind: str
    mass: np.ndarray
    system: np.ndarray
    system_rhs: np.ndarray
    linear: dict[str, np.ndarray]
    rhs: Callable[[np.ndarray, int], np.ndarray]


def dense_oracle_assemble(kind: str, mesh: Mesh1D, k: int) -> DenseOracle:
    kind = kind.lower()
    if kind not in _SCHEME_FLUXES:
        raise ValueError(f"unknown scheme {kind!r}")
    if mesh.n_cells > MAX_ORACLE_CELLS or k > MAX_ORACLE_DEGREE:
        raise ValueError(
            f"dense oracle is limited to n_cells <= {MAX_ORACLE_CELLS} and "
            f"k <= {MAX_ORACLE_DEGREE}, got {mesh.n_cells} and {k}")

    space = _DenseSpace(mesh, k)
    fluxes = _SCHEME_FLUXES[kind]
    M = space.mass()
    A = {var: space.linear_matrix(trace)
         for var, trace in fluxes.items() if var != "f"}
    Z = np.zeros_like(M)
    shape = (mesh.n_cells, k + 1)
    n = space.n

    if kind in ("d1", "c1"):
        system = np.block([[M, -A["q"]], [-A["v"], M]])
        system_rhs = np.vstack([A["u"], Z])

        def rhs(u: np.ndarray, p: int) -> np.ndarray:
            vq = np.linalg.solve(system, system_rhs @ u.ravel())
            nl = space.nonlinear_vector(u.reshape(shape), p, fluxes["f"])
            return np.linalg.solve(M, -nl - M @ vq[:n]).reshape(shape)
    else:
        system = np.block([[M, -A["r"]], [-A["u"], M]])
        system_rhs = np.vstack([M, Z])

        def rhs(w: np.ndarray, p: int) -> np.ndarray:
            ur = np.linalg.solve(system, system_rhs @ w.ravel())
            u = ur[:n]
            nl = space.nonlinear_vector(u.reshape(shape), p, fluxes["f"])
            s = np.linalg.solve(M, nl)
            pp = np.linalg.solve(M, A["s"] @ s - M @ u)
            return np.linalg.solve(M, A["p"] @ pp - M @ s).reshape(shape)

    return DenseOracle(kind=kind, mass=M, system=system, system_rhs=system_rhs,
                       linear=A, rhs=rhs)

# }}}

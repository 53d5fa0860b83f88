"""Weak-form interface operators.

For a flux choice ``omega_hat`` the linear form on cell ``I_j`` is

    L_j(omega, phi) = -(omega, phi_x)_{I_j}
                      + omega_hat_{j+1/2} phi^-_{j+1/2} - omega_hat_{j-1/2} phi^+_{j-1/2}

and the nonlinear form ``N_j`` is the same with ``omega`` replaced by ``f(omega)``
and the hat by a two-point nonlinear flux.  Every operator is available as a
scalar (summed over cells, used by the identity tests) and as its
coefficient-space moments (used to build scheme right-hand sides).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from fwldg.field import DGField, traces
from fwldg.fluxes import FluxKind, flux_function, linear_flux, nonlinear_flux
from fwldg.mesh import Mesh1D, gauss_legendre, legendre_table, quadrature_order_for


class OperatorKind(enum.Enum):
    L_PLUS = "L_plus"
    L_MINUS = "L_minus"
    L_CENTRAL = "L_central"
    N_DISSIPATIVE = "N_dissipative"
    N_CONSERVATIVE = "N_conservative"

    @property
    def flux(self) -> FluxKind:
        return _OPERATOR_FLUX[self]

    @property
    def is_nonlinear(self) -> bool:
        return self.flux.is_nonlinear


_OPERATOR_FLUX = {
    OperatorKind.L_PLUS: FluxKind.RIGHT,
    OperatorKind.L_MINUS: FluxKind.LEFT,
    OperatorKind.L_CENTRAL: FluxKind.CENTRAL,
    OperatorKind.N_DISSIPATIVE: FluxKind.GODUNOV,
    OperatorKind.N_CONSERVATIVE: FluxKind.CONSERVATIVE,
}

# weights (theta_minus, theta_plus) of the two traces in each linear flux
_TRACE_WEIGHTS = {
    FluxKind.LEFT: (1.0, 0.0),
    FluxKind.RIGHT: (0.0, 1.0),
    FluxKind.CENTRAL: (0.5, 0.5),
}


# {{{ tables


@dataclass(frozen=True)
class NonlinearTables:
    """Basis values and derivatives on the rule that integrates
    ``omega^p * phi_x`` exactly for degree-``k`` data."""

    k: int
    p: int
    weights: np.ndarray = field(repr=False)
    vals: np.ndarray = field(repr=False)
    wdvals: np.ndarray = field(repr=False)


@lru_cache(maxsize=64)
def nonlinear_tables(k: int, p: int) -> NonlinearTables:
    rule = gauss_legendre(quadrature_order_for(k, p))
    P, dP = legendre_table(k, rule.nodes)
    return NonlinearTables(k=k, p=p, weights=rule.weights,
                           vals=P, wdvals=(dP * rule.weights).T)


@lru_cache(maxsize=64)
def stiffness(k: int) -> np.ndarray:
    """``S[n, m] = int_{-1}^{1} P_n P_m'``."""
    rule = gauss_legendre(k + 1)
    P, dP = legendre_table(k, rule.nodes)
    return (P * rule.weights) @ dP.T


def inverse_mass(mesh: Mesh1D, k: int) -> np.ndarray:
    """Diagonal of the inverse mass matrix, shape ``(n_cells, k + 1)``."""
    m = np.arange(k + 1)
    return (2 * m + 1)[None, :] / mesh.cell_widths[:, None]


def mass(mesh: Mesh1D, k: int) -> np.ndarray:
    return 1.0 / inverse_mass(mesh, k)

# }}}


# {{{ moments


def _add_flux_moments(moments: np.ndarray, flux_values: np.ndarray) -> np.ndarray:
    """Add ``hat_{j+1/2} P_m(1) - hat_{j-1/2} P_m(-1)``; ``flux_values[i]`` lives on
    interface ``i``, the left end of cell ``i``."""
    k = moments.shape[1] - 1
    sign = (-1.0) ** np.arange(k + 1)
    right = np.roll(flux_values, -1)
    return moments + right[:, None] - flux_values[:, None] * sign[None, :]


def linear_moments(omega: DGField, kind: FluxKind,
                   flux_values: np.ndarray | None = None) -> np.ndarray:
    """``L_j(omega, P_m)`` for every cell and mode."""
    if flux_values is None:
        flux_values = linear_flux(traces(omega), kind)
    volume = -omega.coeffs @ stiffness(omega.k)
    return _add_flux_moments(volume, np.asarray(flux_values))


def nonlinear_moments(omega: DGField, kind: FluxKind, p: int,
                      flux_values: np.ndarray | None = None) -> np.ndarray:
    """``N_j(omega, P_m)`` for every cell and mode."""
    tables = nonlinear_tables(omega.k, p)
    if flux_values is None:
        tr = traces(omega)
        flux_values = nonlinear_flux(kind, tr.minus, tr.plus, p)
    fq = flux_function(omega.coeffs @ tables.vals, p)
    volume = -fq @ tables.wdvals
    return _add_flux_moments(volume, np.asarray(flux_values))


def moments(kind: OperatorKind, omega: DGField, p: int | None = None,
            flux_values: np.ndarray | None = None) -> np.ndarray:
    if kind.is_nonlinear:
        if p is None:
            raise ValueError(f"{kind.value} needs the exponent p")
        return nonlinear_moments(omega, kind.flux, p, flux_values)
    return linear_moments(omega, kind.flux, flux_values)

# }}}


# {{{ scalar forms


def apply_L(kind: OperatorKind, omega: DGField, phi: DGField) -> float:
    """``sum_j L_j(omega, phi)``."""
    if kind.is_nonlinear:
        raise ValueError(f"{kind.value} is not a linear operator")
    omega.check_compatible(phi)
    return float(np.sum(linear_moments(omega, kind.flux) * phi.coeffs))


def apply_N(kind: OperatorKind, omega: DGField, phi: DGField, p: int) -> float:
    """``sum_j N_j(omega, phi)``."""
    if not kind.is_nonlinear:
        raise ValueError(f"{kind.value} is not a nonlinear operator")
    omega.check_compatible(phi)
    return float(np.sum(nonlinear_moments(omega, kind.flux, p) * phi.coeffs))


def rhs_contribution(kind: OperatorKind, omega: DGField,
                     flux_values: np.ndarray, p: int | None = None) -> DGField:
    """Field ``g`` with ``(g, phi) = sum_j [-(w, phi_x) + <hat, phi>]`` for all ``phi``,
    where ``w`` is ``omega`` (linear kinds) or ``f(omega)`` (nonlinear kinds)
    and ``hat`` is the given per-interface flux."""
    flux_values = np.asarray(flux_values, dtype=np.float64)
    if flux_values.shape != (omega.mesh.n_cells,):
        raise ValueError(
            f"expected {omega.mesh.n_cells} interface fluxes, "
            f"got shape {flux_values.shape}")
    b = moments(kind, omega, p, flux_values)
    return DGField(omega.mesh, b * inverse_mass(omega.mesh, omega.k))

# }}}


# {{{ assembly


def linear_operator_matrix(mesh: Mesh1D, k: int, kind: FluxKind) -> sp.csr_matrix:
    """Sparse matrix ``A`` with ``A @ c.ravel() == linear_moments(c, kind).ravel()``.

    Unknowns are ordered cell-major, ``j * (k + 1) + m``.
    """
    theta_m, theta_p = _TRACE_WEIGHTS[kind]
    n, nm = mesh.n_cells, k + 1
    ones = np.ones(nm)
    sign = (-1.0) ** np.arange(nm)

    diag = (-stiffness(k).T
            + theta_m * np.outer(ones, ones)
            - theta_p * np.outer(sign, sign))
    upper = theta_p * np.outer(ones, sign)      # cell j+1 seen from the right end of j
    lower = -theta_m * np.outer(sign, ones)     # cell j-1 seen from the left end of j

    rows, cols, vals = [], [], []
    ii, jj = np.meshgrid(np.arange(nm), np.arange(nm), indexing="ij")
    for block, offset in ((diag, 0), (upper, 1), (lower, -1)):
        for j in range(n):
            rows.append(j * nm + ii.ravel())
            cols.append(((j + offset) % n) * nm + jj.ravel())
            vals.append(block.ravel())

    A = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n * nm, n * nm))
    A = A.tocsr()
    A.eliminate_zeros()
    return A


def mass_matrix(mesh: Mesh1D, k: int) -> sp.dia_matrix:
    return sp.diags(mass(mesh, k).ravel())

# }}}

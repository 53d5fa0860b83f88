"""Piecewise-polynomial fields in the modal Legendre basis."""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from fwldg.mesh import Mesh1D, gauss_legendre, legendre_table

Function = Callable[[np.ndarray], np.ndarray]

# point count for projecting and measuring non-polynomial data, on top of k + 1
EXTRA_POINTS = 6


# {{{ field


@dataclass
class DGField:
    """Coefficients ``(n_cells, k + 1)`` of a discontinuous piecewise polynomial.

    On cell ``j`` the field is ``sum_m coeffs[j, m] P_m(xi)`` with ``xi`` the affine
    map of the cell onto ``[-1, 1]``; ``coeffs[:, 0]`` are the cell means.
    """

    mesh: Mesh1D
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if self.coeffs.ndim != 2 or self.coeffs.shape[0] != self.mesh.n_cells:
            raise ValueError(
                f"coefficients of shape {self.coeffs.shape} do not fit "
                f"a mesh with {self.mesh.n_cells} cells")

    @classmethod
    def zeros(cls, mesh: Mesh1D, k: int) -> DGField:
        return cls(mesh, np.zeros((mesh.n_cells, k + 1)))

    @property
    def k(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def means(self) -> np.ndarray:
        return self.coeffs[:, 0]

    def copy(self) -> DGField:
        return DGField(self.mesh, self.coeffs.copy())

    def check_compatible(self, other: DGField) -> None:
        if other.mesh is not self.mesh and not (
                other.mesh.n_cells == self.mesh.n_cells
                and np.array_equal(other.mesh.cell_edges, self.mesh.cell_edges)):
            raise ValueError("fields live on different meshes")
        if other.k != self.k:
            raise ValueError(f"degree mismatch: {self.k} vs {other.k}")

    def __add__(self, other: DGField) -> DGField:
        self.check_compatible(other)
        return DGField(self.mesh, self.coeffs + other.coeffs)

    def __sub__(self, other: DGField) -> DGField:
        self.check_compatible(other)
        return DGField(self.mesh, self.coeffs - other.coeffs)

    def __mul__(self, alpha: float) -> DGField:
        return DGField(self.mesh, alpha * self.coeffs)

    __rmul__ = __mul__

    def __neg__(self) -> DGField:
        return DGField(self.mesh, -self.coeffs)

    def at_reference(self, xi: np.ndarray) -> np.ndarray:
        """Values at reference points *xi* in every cell, ``(n_cells, len(xi))``."""
        P, _ = legendre_table(self.k, np.atleast_1d(xi))
        return self.coeffs @ P

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Point evaluation; a point on an interface takes the right cell's trace."""
        x = np.asarray(x, dtype=np.float64)
        j, xi = self.mesh.locate(x.ravel())
        P, _ = legendre_table(self.k, xi)
        return np.einsum("im,mi->i", self.coeffs[j], P).reshape(x.shape)

    @property
    def right_values(self) -> np.ndarray:
        """Trace at the right end of every cell."""
        return self.coeffs.sum(axis=1)

    @property
    def left_values(self) -> np.ndarray:
        """Trace at the left end of every cell."""
        return self.coeffs @ (-1.0) ** np.arange(self.k + 1)

    def inner(self, other: DGField) -> float:
        """Exact L2 inner product, diagonal in the modal basis."""
        self.check_compatible(other)
        m = np.arange(self.k + 1)
        weights = self.mesh.cell_widths[:, None] / (2 * m + 1)[None, :]
        return float(np.sum(weights * self.coeffs * other.coeffs))

    def integral(self) -> float:
        return float(self.mesh.cell_widths @ self.coeffs[:, 0])

# }}}


# {{{ traces


class TracePair(NamedTuple):
    """Values on either side of one interface: ``minus`` from the left cell."""

    interface: int
    minus: float
    plus: float

    @property
    def jump(self) -> float:
        return self.plus - self.minus

    @property
    def average(self) -> float:
        return 0.5 * (self.plus + self.minus)


@dataclass(frozen=True)
class Traces:
    """Both traces at every interface, interface ``i`` sitting at ``cell_edges[i]``."""

    minus: np.ndarray
    plus: np.ndarray

    def __len__(self) -> int:
        return self.minus.size

    def __getitem__(self, i: int) -> TracePair:
        return TracePair(i, float(self.minus[i]), float(self.plus[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def jump(self) -> np.ndarray:
        return self.plus - self.minus

    @property
    def average(self) -> np.ndarray:
        return 0.5 * (self.plus + self.minus)


def traces(u: DGField) -> Traces:
    return Traces(minus=np.roll(u.right_values, 1), plus=u.left_values)

# }}}


# {{{ projections


def _cell_quadrature(mesh: Mesh1D, n_points: int,
                     kinks: Iterable[float] | None = None,
                     ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Physical points, reference points and weights for integrating over cells.

    Returns arrays of shape ``(n_cells, n)``; weights are relative to the
    reference cell (``sum = 2``).  Cells containing a kink strictly inside are
    split there, and every cell then gets the same (larger) point count with
    unused slots zero-weighted.
    """
    rule = gauss_legendre(n_points)
    xi = np.broadcast_to(rule.nodes, (mesh.n_cells, n_points)).copy()
    w = np.broadcast_to(rule.weights, (mesh.n_cells, n_points)).copy()

    splits: dict[int, list[float]] = {}
    if kinks is not None:
        L = mesh.length
        for xk in kinks:
            xk = mesh.a + (xk - mesh.a) % L
            j, xik = mesh.locate(np.array([xk]))
            j, xik = int(j[0]), float(xik[0])
            if -1.0 + 1.0e-12 < xik < 1.0 - 1.0e-12:
                splits.setdefault(j, []).append(xik)

    if splits:
        n_sub = max(len(v) for v in splits.values()) + 1
        width = n_sub * n_points
        xi_full = np.zeros((mesh.n_cells, width))
        w_full = np.zeros((mesh.n_cells, width))
        xi_full[:, :n_points] = xi
        w_full[:, :n_points] = w
        for j, brk in splits.items():
            bounds = np.concatenate([[-1.0], np.sort(brk), [1.0]])
            xi_full[j] = 0.0
            w_full[j] = 0.0
            for s, (lo, hi) in enumerate(zip(bounds[:-1], bounds[1:])):
                sl = slice(s * n_points, (s + 1) * n_points)
                xi_full[j, sl] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes
                w_full[j, sl] = 0.5 * (hi - lo) * rule.weights
        xi, w = xi_full, w_full

    x = mesh.cell_centers[:, None] + 0.5 * mesh.cell_widths[:, None] * xi
    return x, xi, w


def _modal_moments(g: Function, mesh: Mesh1D, k: int, n_points: int | None,
                   kinks: Iterable[float] | None) -> np.ndarray:
    """``(2m + 1)/2 * int_{-1}^{1} g P_m`` per cell, i.e. the L2 coefficients."""
    if n_points is None:
        n_points = k + 1 + EXTRA_POINTS
    x, xi, w = _cell_quadrature(mesh, n_points, kinks)
    P, _ = legendre_table(k, xi.ravel())
    P = P.reshape(k + 1, *xi.shape)
    gx = np.asarray(g(x), dtype=np.float64) * w
    moments = np.einsum("jq,mjq->jm", gx, P)
    return moments * (2 * np.arange(k + 1) + 1) / 2.0


def project_l2(g: Function, mesh: Mesh1D, k: int, *,
               n_points: int | None = None,
               kinks: Iterable[float] | None = None) -> DGField:
    """L2 projection of *g* onto piecewise polynomials of degree *k*."""
    return DGField(mesh, _modal_moments(g, mesh, k, n_points, kinks))


def project_gauss_radau(g: Function, mesh: Mesh1D, k: int, side: str, *,
                        n_points: int | None = None,
                        kinks: Iterable[float] | None = None) -> DGField:
    """Gauss-Radau projection: L2-orthogonal to degree ``k - 1`` and
    interpolating *g* at the right (``side="minus"``) or left (``side="plus"``)
    end of every cell.  For ``k = 0`` this falls back to the L2 projection.
    """
    if side not in ("plus", "minus"):
        raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")

    c = _modal_moments(g, mesh, k, n_points, kinks)
    if k == 0:
        return DGField(mesh, c)

    m = np.arange(k)
    if side == "minus":
        target = np.asarray(g(mesh.cell_edges[1:]), dtype=np.float64)
        c[:, k] = target - c[:, :k].sum(axis=1)
    else:
        target = np.asarray(g(mesh.cell_edges[:-1]), dtype=np.float64)
        c[:, k] = (-1.0) ** k * (target - c[:, :k] @ (-1.0) ** m)

    return DGField(mesh, c)

# }}}


# {{{ norms


@dataclass(frozen=True)
class Norms:
    l2: float
    linf: float
    boundary_l2: float


def norms(u: DGField, exact: Function | None = None, *,
          n_points: int | None = None,
          kinks: Iterable[float] | None = None) -> Norms:
    """Norms of *u*, or of ``u - exact`` when *exact* is given.

    The maximum norm is sampled at the quadrature nodes and both cell ends;
    the boundary norm is ``sqrt(sum_j (w_{j+1/2}^-)^2 + (w_{j-1/2}^+)^2)``.
    """
    mesh, k = u.mesh, u.k
    if n_points is None:
        n_points = k + 1 + EXTRA_POINTS
    x, xi, w = _cell_quadrature(mesh, n_points, kinks)

    def error(xs: np.ndarray, values: np.ndarray) -> np.ndarray:
        if exact is None:
            return values
        return values - np.asarray(exact(xs), dtype=np.float64)

    P, _ = legendre_table(k, xi.ravel())
    P = P.reshape(k + 1, *xi.shape)
    e_quad = error(x, np.einsum("jm,mjq->jq", u.coeffs, P))
    l2 = np.sqrt(np.sum(0.5 * mesh.cell_widths[:, None] * w * e_quad**2))

    e_right = error(mesh.cell_edges[1:], u.right_values)
    e_left = error(mesh.cell_edges[:-1], u.left_values)
    mask = w > 0
    linf = max(np.max(np.abs(e_quad[mask])),
               np.max(np.abs(e_right)), np.max(np.abs(e_left)))
    boundary = np.sqrt(np.sum(e_right**2) + np.sum(e_left**2))

    return Norms(l2=float(l2), linf=float(linf), boundary_l2=float(boundary))

# }}}


# {{{ output


def sample(u: DGField, points_per_cell: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Equispaced samples in every cell, both ends included."""
    xi = np.linspace(-1.0, 1.0, points_per_cell)
    x = u.mesh.physical_points(xi)
    return x.ravel(), u.at_reference(xi).ravel()


def dump_csv(u: DGField, path, points_per_cell: int = 8) -> None:
    x, values = sample(u, points_per_cell)
    with open(path, "w") as outf:
        outf.write("x,u\n")
        for xv, uv in zip(x, values):
            outf.write(f"{xv:.16e},{uv:.16e}\n")

# }}}

"""Periodic 1D meshes, Gauss-Legendre quadrature and the modal Legendre basis."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


# {{{ mesh


@dataclass(frozen=True)
class Mesh1D:
    """Periodic partition of ``[a, b]``.

    Interface ``i`` (``0 <= i < n_cells``) sits at ``cell_edges[i]``: it is the
    right end of cell ``i - 1`` (mod ``n_cells``) and the left end of cell ``i``.
    There are no ghost cells, periodicity lives purely in the indexing.
    """

    a: float
    b: float
    cell_edges: np.ndarray
    cell_centers: np.ndarray = field(init=False, repr=False)
    cell_widths: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        edges = np.asarray(self.cell_edges, dtype=np.float64)
        if edges.ndim != 1 or edges.size < 3:
            raise ValueError("need at least two cells")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("cell edges must be strictly increasing")
        edges = edges.copy()
        edges.flags.writeable = False

        widths = np.diff(edges)
        centers = 0.5 * (edges[1:] + edges[:-1])
        widths.flags.writeable = False
        centers.flags.writeable = False

        object.__setattr__(self, "cell_edges", edges)
        object.__setattr__(self, "cell_widths", widths)
        object.__setattr__(self, "cell_centers", centers)

    @property
    def n_cells(self) -> int:
        return self.cell_widths.size

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def h(self) -> float:
        """Largest cell width."""
        return float(np.max(self.cell_widths))

    def left_cell(self, interface: int) -> int:
        """Cell whose right trace meets *interface*."""
        return (interface - 1) % self.n_cells

    def right_cell(self, interface: int) -> int:
        """Cell whose left trace meets *interface*."""
        return interface % self.n_cells

    def locate(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(cell index, reference coordinate)`` for points in ``[a, b]``."""
        x = np.asarray(x, dtype=np.float64)
        j = np.clip(np.searchsorted(self.cell_edges, x, side="right") - 1,
                    0, self.n_cells - 1)
        xi = 2.0 * (x - self.cell_centers[j]) / self.cell_widths[j]
        return j, xi

    def physical_points(self, xi: np.ndarray) -> np.ndarray:
        """Map reference points *xi* into every cell, shape ``(n_cells, len(xi))``."""
        xi = np.asarray(xi, dtype=np.float64)
        return (self.cell_centers[:, None]
                + 0.5 * self.cell_widths[:, None] * xi[None, :])


def build_mesh(a: float, b: float, n_cells: int,
               perturbation: float = 0.0,
               rng: np.random.Generator | None = None) -> Mesh1D:
    """Uniform periodic mesh, optionally with interior edges jittered.

    Each interior edge moves by a uniform random amount of at most
    ``perturbation * dx / 2``, so every width stays within
    ``[(1 - perturbation) dx, (1 + perturbation) dx]``.
    """
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    if n_cells < 2:
        raise ValueError(f"need at least two cells, got {n_cells}")
    if not 0.0 <= perturbation < 1.0:
        raise ValueError(f"perturbation must lie in [0, 1), got {perturbation}")

    edges = np.linspace(a, b, n_cells + 1)
    if perturbation > 0.0:
        if rng is None:
            rng = np.random.default_rng(0)
        dx = (b - a) / n_cells
        shift = rng.uniform(-1.0, 1.0, size=n_cells - 1)
        edges[1:-1] += 0.5 * perturbation * dx * shift
    edges[0], edges[-1] = a, b

    return Mesh1D(a=float(a), b=float(b), cell_edges=edges)

# }}}


# {{{ quadrature


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n_points(self) -> int:
        return self.nodes.size


def legendre_table(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Values and derivatives of ``P_0 .. P_n`` at *x*, each of shape ``(n + 1, len(x))``."""
    x = np.asarray(x, dtype=np.float64)
    P = np.zeros((n + 1, x.size))
    dP = np.zeros((n + 1, x.size))
    P[0] = 1.0
    if n >= 1:
        P[1] = x
        dP[1] = 1.0
    for m in range(1, n):
        P[m + 1] = ((2 * m + 1) * x * P[m] - m * P[m - 1]) / (m + 1)
        # P'_{m+1} = P'_{m-1} + (2m + 1) P_m holds everywhere, including x = +-1
        dP[m + 1] = dP[m - 1] + (2 * m + 1) * P[m]

    return P, dP


@lru_cache(maxsize=64)
def gauss_legendre(n_points: int) -> QuadratureRule:
    """Gauss-Legendre rule on ``[-1, 1]`` by Newton iteration on ``P_n``."""
    if not 1 <= n_points <= 32:
        raise ValueError(f"n_points must lie in [1, 32], got {n_points}")

    n = n_points
    i = np.arange(1, n + 1)
    # Tricomi's initial guess, descending order
    x = np.cos(np.pi * (i - 0.25) / (n + 0.5)) * (1 - (n - 1) / (8.0 * n**3))

    for _ in range(100):
        P, dP = legendre_table(n, x)
        dx = P[n] / dP[n]
        x = x - dx
        if np.max(np.abs(dx)) < 1.0e-15:
            break

    _, dP = legendre_table(n, x)
    w = 2.0 / ((1.0 - x**2) * dP[n] ** 2)

    x = x[::-1].copy()
    w = w[::-1].copy()
    if n % 2 == 1:
        x[n // 2] = 0.0
    # enforce exact symmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.flags.writeable = False
    w.flags.writeable = False

    return QuadratureRule(nodes=x, weights=w)


def quadrature_order_for(k: int, p: int) -> int:
    """Smallest point count integrating ``u^p * d/dx(poly)`` exactly for degree *k* data.

    The integrand has degree ``(p + 1) k - 1``; requiring ``2 n - 1 >= (p + 1) k``
    leaves one degree of headroom.
    """
    if k < 0 or p < 2:
        raise ValueError(f"need k >= 0 and p >= 2, got k={k}, p={p}")
    n = ((p + 1) * k + 2) // 2
    return max(n, k + 1)

# }}}


# {{{ basis


@dataclass(frozen=True)
class LegendreBasis:
    """Modal Legendre basis ``P_0 .. P_k`` tabulated on a quadrature rule.

    :attr vals: ``(k + 1, n_points)`` values at the nodes.
    :attr dvals: ``(k + 1, n_points)`` reference derivatives at the nodes.
    :attr right: ``P_m(1) = 1``.
    :attr left: ``P_m(-1) = (-1)^m``.
    :attr inv_mass: reference ``(2m + 1) / 2``.
    :attr stiffness: ``S[n, m] = int P_n P_m'``, exact.
    """

    k: int
    quad: QuadratureRule
    vals: np.ndarray = field(init=False, repr=False)
    dvals: np.ndarray = field(init=False, repr=False)
    right: np.ndarray = field(init=False, repr=False)
    left: np.ndarray = field(init=False, repr=False)
    inv_mass: np.ndarray = field(init=False, repr=False)
    stiffness: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        k = self.k
        if k < 0:
            raise ValueError(f"degree must be nonnegative, got {k}")

        vals, dvals = legendre_table(k, self.quad.nodes)
        m = np.arange(k + 1)

        # exact stiffness from a rule that is always sufficient
        exact = gauss_legendre(k + 1)
        P, dP = legendre_table(k, exact.nodes)
        S = (P * exact.weights) @ dP.T

        for name, value in (
                ("vals", vals), ("dvals", dvals),
                ("right", np.ones(k + 1)), ("left", (-1.0) ** m),
                ("inv_mass", (2 * m + 1) / 2.0), ("stiffness", S)):
            value.flags.writeable = False
            object.__setattr__(self, name, value)

    @property
    def n_modes(self) -> int:
        return self.k + 1

    def evaluate(self, coeffs: np.ndarray, xi: np.ndarray) -> np.ndarray:
        """Evaluate modal *coeffs* (``(..., k + 1)``) at reference points *xi*."""
        P, _ = legendre_table(self.k, xi)
        return coeffs @ P


@lru_cache(maxsize=64)
def legendre_basis(k: int, n_points: int | None = None) -> LegendreBasis:
    if n_points is None:
        n_points = k + 1
    return LegendreBasis(k=k, quad=gauss_legendre(n_points))

# }}}

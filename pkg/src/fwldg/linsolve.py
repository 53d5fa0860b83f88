"""Factorized periodic block systems."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


class SingularSystemError(RuntimeError):
    pass


class FactorizedSystem:
    """Sparse LU of a square system, checked for near-singularity once.

    The pivot test compares the smallest ``|U_ii|`` against ``1e-12 * ||A||_inf``.
    """

    def __init__(self, matrix: sp.spmatrix, label: str = "") -> None:
        self.matrix = sp.csc_matrix(matrix)
        self.label = label
        try:
            self.lu = spla.splu(self.matrix)
        except RuntimeError as exc:
            raise SingularSystemError(f"singular system ({label}): {exc}") from exc

        scale = spla.norm(self.matrix, np.inf)
        pivot = np.min(np.abs(self.lu.U.diagonal()))
        if not pivot > 1.0e-12 * scale:
            raise SingularSystemError(
                f"near-singular system ({label}): smallest pivot {pivot:.3e}, "
                f"matrix norm {scale:.3e}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return self.lu.solve(rhs)

    def residual(self, x: np.ndarray, rhs: np.ndarray) -> float:
        """Relative residual ``||A x - b|| / (||A|| ||x|| + ||b||)``."""
        r = self.matrix @ x - rhs
        scale = spla.norm(self.matrix, np.inf) * np.max(np.abs(x)) + np.max(np.abs(rhs))
        return float(np.max(np.abs(r)) / scale) if scale > 0 else 0.0

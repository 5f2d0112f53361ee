"""Smooth objective oracles: value, gradient, and reduced Hessian action.

The solver never materializes a Hessian.  Each oracle exposes the product
``v -> [H(x)]_{I,I} v + shift*v`` on a chosen index set ``I``, where the
fixed diagonal shift (1e-8 by default) keeps the reduced system positive
definite.  The shift lives here, inside the oracle, so the quadratic model
used for direction acceptance is built from exactly the same operator that
the CG solver sees.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Callable

import numpy as np
from scipy.special import expit

from .linalg import SparseMatrix, as_index_set, as_vector, spmv, spmv_transpose

__all__ = [
    "ObjectiveOracle",
    "LogisticObjective",
    "QuadraticObjective",
    "DEFAULT_HESSIAN_SHIFT",
]

DEFAULT_HESSIAN_SHIFT = 1e-8


class ObjectiveOracle(ABC):
    """Twice-differentiable convex objective with reduced Hessian products."""

    hessian_shift: float = DEFAULT_HESSIAN_SHIFT

    @property
    @abstractmethod
    def dim(self) -> int:
        """Number of variables."""

    @abstractmethod
    def value(self, x) -> float:
        """f(x)."""

    @abstractmethod
    def gradient(self, x) -> np.ndarray:
        """grad f(x)."""

    def reduced_hessian_apply(self, x, indices, v) -> np.ndarray:
        """[H(x)]_{I,I} v + shift*v for the index set I."""
        return self.reduced_hessian_operator(x, indices)(v)

    @abstractmethod
    def reduced_hessian_operator(self, x, indices) -> Callable[[np.ndarray], np.ndarray]:
        """Return a closure applying the shifted reduced Hessian at fixed (x, I).

        The closure amortizes any per-(x, I) setup over the many products a
        CG solve performs.
        """


class LogisticObjective(ObjectiveOracle):
    """Binary logistic loss, summed over samples (no 1/m normalization).

        f(x) = sum_i log(1 + exp(-y_i a_i^T x))

    with rows a_i of the design matrix and labels y_i in {-1, +1}.  Each term
    is evaluated as log(1+exp(-t)) for t >= 0 and -t + log(1+exp(t))
    otherwise, so large margins cannot overflow.
    """

    def __init__(self, matrix: SparseMatrix, labels):
        if not isinstance(matrix, SparseMatrix):
            raise TypeError("matrix must be a SparseMatrix")
        y = np.ascontiguousarray(labels, dtype=np.float64)
        if y.shape != (matrix.n_rows,):
            raise ValueError(
                f"expected {matrix.n_rows} labels, got {y.shape}"
            )
        if not np.all(np.abs(y) == 1.0):
            raise ValueError("labels must all be -1 or +1")
        self.matrix = matrix
        self.labels = y

    @property
    def dim(self) -> int:
        return self.matrix.n_cols

    @property
    def n_samples(self) -> int:
        return self.matrix.n_rows

    def _margins(self, x) -> np.ndarray:
        return self.labels * spmv(self.matrix, as_vector(x, self.dim))

    def value(self, x) -> float:
        t = self._margins(x)
        return float(np.sum(np.logaddexp(0.0, -t)))

    def gradient(self, x) -> np.ndarray:
        t = self._margins(x)
        return -spmv_transpose(self.matrix, self.labels * expit(-t))

    def reduced_hessian_operator(self, x, indices):
        t = self._margins(x)
        sig = expit(t)
        weights = sig * (1.0 - sig)
        sub = self.matrix.column_submatrix(indices)
        shift = self.hessian_shift

        def apply(v: np.ndarray) -> np.ndarray:
            v = as_vector(v, sub.n_cols)
            return spmv_transpose(sub, weights * spmv(sub, v)) + shift * v

        return apply


class QuadraticObjective(ObjectiveOracle):
    """Separable quadratic f(x) = 0.5 x^T diag(d) x + c^T x with d > 0.

    Closed-form test oracle: the l1-regularized minimizer is the
    componentwise soft threshold of -c/d.
    """

    def __init__(self, diag, linear):
        d = as_vector(diag)
        c = as_vector(linear, d.shape[0])
        if np.any(d <= 0):
            raise ValueError("diagonal entries must be positive")
        self.diag = d
        self.linear = c

    @property
    def dim(self) -> int:
        return self.diag.shape[0]

    def value(self, x) -> float:
        v = as_vector(x, self.dim)
        return float(0.5 * v @ (self.diag * v) + self.linear @ v)

    def gradient(self, x) -> np.ndarray:
        v = as_vector(x, self.dim)
        return self.diag * v + self.linear

    def reduced_hessian_operator(self, x, indices):
        idx = as_index_set(indices, self.dim)
        d_reduced = self.diag[idx] + self.hessian_shift

        def apply(v: np.ndarray) -> np.ndarray:
            v = as_vector(v, idx.shape[0])
            return d_reduced * v

        return apply

"""Index partition, optimality measures, termination test, and shrink step.

The two measures split stationarity violation between the zero variables
(``beta``) and the nonzero variables (``phi``): at a minimizer of
f(x) + lam*||x||_1 both vanish.  Their supports are disjoint by
construction, and the full-step shrink (ISTA) displacement equals
``-(beta + phi)`` componentwise, which the test suite checks exhaustively.

Zero detection is exact (``x[i] == 0``), never tolerance-based: every update
in this package writes exact zeros (projections clamp, the shrink map and
scatter write literal 0.0), so sign-based bookkeeping is well defined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_vector

__all__ = [
    "IndexPartition",
    "OptimalityPair",
    "partition_indices",
    "compute_beta",
    "compute_phi",
    "optimality_measures",
    "is_optimal",
    "ista_step",
]


@dataclass(frozen=True)
class IndexPartition:
    """Disjoint split of {0,...,n-1} by the exact sign of x."""

    zero: np.ndarray
    positive: np.ndarray
    negative: np.ndarray

    @property
    def n(self) -> int:
        return self.zero.size + self.positive.size + self.negative.size


@dataclass(frozen=True)
class OptimalityPair:
    """The measures beta(x), phi(x) and their cached l2 norms."""

    beta: np.ndarray
    phi: np.ndarray
    beta_norm: float
    phi_norm: float

    @property
    def max_norm(self) -> float:
        return max(self.beta_norm, self.phi_norm)


def partition_indices(x) -> IndexPartition:
    """Partition variables by exact sign."""
    v = as_vector(x)
    return IndexPartition(
        zero=np.flatnonzero(v == 0.0),
        positive=np.flatnonzero(v > 0.0),
        negative=np.flatnonzero(v < 0.0),
    )


def compute_beta(x, grad, lam: float) -> np.ndarray:
    """Optimality measure on the zero variables.

    For x[i] == 0, beta[i] is g[i]+lam when that is negative, g[i]-lam when
    that is positive, and 0 when |g[i]| <= lam; beta is 0 on the nonzeros.
    """
    v = as_vector(x)
    g = as_vector(grad, v.shape[0])
    g_plus = g + lam
    g_minus = g - lam
    beta = np.zeros_like(v)
    zero = v == 0.0
    lo = zero & (g_plus < 0.0)
    hi = zero & (g_minus > 0.0)
    beta[lo] = g_plus[lo]
    beta[hi] = g_minus[hi]
    return beta


def compute_phi(x, grad, lam: float) -> np.ndarray:
    """Optimality measure on the nonzero variables.

    phi[i] = 0                                   if x[i] == 0
           = min{g+lam, max{x, g-lam}}[i]        if x[i] > 0 and (g+lam)[i] > 0
           = max{g-lam, min{x, g+lam}}[i]        if x[i] < 0 and (g-lam)[i] < 0
           = (g + lam*sgn(x))[i]                 otherwise.

    The branch conditions overlap at (g+lam)[i] == 0 with x[i] > 0 (and the
    mirrored case); both branches produce the same value there.
    """
    v = as_vector(x)
    g = as_vector(grad, v.shape[0])
    g_plus = g + lam
    g_minus = g - lam
    pos = v > 0.0
    neg = v < 0.0
    phi = np.zeros_like(v)
    b_pos = pos & (g_plus > 0.0)
    phi[b_pos] = np.minimum(g_plus[b_pos], np.maximum(v[b_pos], g_minus[b_pos]))
    b_neg = neg & (g_minus < 0.0)
    phi[b_neg] = np.maximum(g_minus[b_neg], np.minimum(v[b_neg], g_plus[b_neg]))
    rest = (pos | neg) & ~b_pos & ~b_neg
    phi[rest] = g[rest] + lam * np.sign(v[rest])
    return phi


def optimality_measures(x, grad, lam: float) -> OptimalityPair:
    """Compute beta(x) and phi(x) with their l2 norms."""
    beta = compute_beta(x, grad, lam)
    phi = compute_phi(x, grad, lam)
    return OptimalityPair(
        beta=beta,
        phi=phi,
        beta_norm=float(np.linalg.norm(beta)),
        phi_norm=float(np.linalg.norm(phi)),
    )


def is_optimal(pair: OptimalityPair, epsilon: float) -> bool:
    """Termination test: max{||beta||, ||phi||} <= epsilon."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return pair.max_norm <= epsilon


def ista_step(x, grad, lam: float) -> np.ndarray:
    """Displacement of the unit-step shrink update: shrink(x - g) - x.

    With u = x - g the step is lam - g[i] where u[i] < -lam, -x[i] where
    u[i] in [-lam, lam], and -g[i] - lam where u[i] > lam.  Equals
    -(beta + phi) componentwise.
    """
    v = as_vector(x)
    g = as_vector(grad, v.shape[0])
    u = v - g
    return np.where(u < -lam, lam - g, np.where(u > lam, -g - lam, -v))

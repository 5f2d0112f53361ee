"""Reduced-space quadratic model and its conjugate-gradient solver.

The quadratic model at the current iterate is m(d) = g^T d + 0.5 d^T H d
with H the shifted reduced Hessian.  Any direction is acceptable as long as
it descends at least as much as the reference direction (the exact minimizer
of m along -g) and does not increase the model.  CG started from d = 0
satisfies both conditions at every iterate, so it may stop early; the three
early-termination rules below bound the work and the step size.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .linalg import as_vector

__all__ = [
    "ModelEval",
    "CgLimits",
    "CgOutcome",
    "CgStopReason",
    "evaluate_model",
    "model_decrease",
    "reference_direction",
    "accept_direction",
    "cg_solve",
]

Hvp = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ModelEval:
    """m(d) split into its linear and quadratic parts; m(0) = 0."""

    g_dot_d: float
    d_dot_hd: float

    @property
    def value(self) -> float:
        return self.g_dot_d + 0.5 * self.d_dot_hd


def evaluate_model(g, d, hvp: Hvp) -> ModelEval:
    """Evaluate the quadratic model at d using one Hessian product."""
    g = as_vector(g)
    d = as_vector(d, g.shape[0])
    return ModelEval(g_dot_d=float(g @ d), d_dot_hd=float(d @ hvp(d)))


def model_decrease(g, d, hvp: Hvp) -> float:
    """m(d) = g^T d + 0.5 d^T H d."""
    return evaluate_model(g, d, hvp).value


def reference_direction(g, hvp: Hvp) -> tuple[np.ndarray, float]:
    """Exact minimizer of the model along -g: d = -alpha*g, alpha = ||g||^2 / g^T H g."""
    g = as_vector(g)
    curvature = float(g @ hvp(g))
    if curvature <= 0.0:
        raise ArithmeticError(
            f"oracle not positive definite: g^T H g = {curvature}"
        )
    alpha = float(g @ g) / curvature
    return -alpha * g, alpha


def accept_direction(g, dbar, d_ref, model: ModelEval) -> bool:
    """True iff g^T dbar <= g^T d_ref and m(dbar) <= m(0) = 0 (exact comparisons)."""
    g = as_vector(g)
    dbar = as_vector(dbar, g.shape[0])
    d_ref = as_vector(d_ref, g.shape[0])
    return bool(g @ dbar <= g @ d_ref) and model.value <= 0.0


class CgStopReason(Enum):
    RESIDUAL_REDUCED = "residual_reduced"
    ORTHANT_VIOLATIONS = "orthant_violations"
    STEP_TOO_LARGE = "step_too_large"
    MAX_ITERATIONS = "max_iterations"


@dataclass(frozen=True)
class CgLimits:
    """Early-termination parameters for the reduced CG solve.

    ``step_norm_limit`` is the adaptive trust-region-like cap on ||d_j||;
    ``subspace_dim`` is |I_k|, which fixes the orthant-violation threshold
    max{1e3, 0.1*|I_k|} and the iteration cap.  The residual rule stops at
    max{residual_reduction * r0, residual_floor}; the defaults are the
    production values and tests may relax them.
    """

    step_norm_limit: float
    subspace_dim: int
    residual_reduction: float = 1e-1
    residual_floor: float = 1e-12
    max_iterations: int | None = None

    @property
    def violation_threshold(self) -> float:
        return max(1e3, 1e-1 * self.subspace_dim)

    @property
    def iteration_cap(self) -> int:
        if self.max_iterations is not None:
            return self.max_iterations
        return self.subspace_dim


@dataclass(frozen=True)
class CgOutcome:
    direction: np.ndarray
    iterations: int
    residual_norm: float
    stop_reason: CgStopReason


def _orthant_violations(x_restricted: np.ndarray, d: np.ndarray) -> int:
    """Count components of x+d whose sign is opposite to x (exact zero is fine)."""
    s_new = np.sign(x_restricted + d)
    s_old = np.sign(x_restricted)
    return int(np.count_nonzero((s_new != 0.0) & (s_new != s_old)))


def cg_solve(hvp: Hvp, g, x_restricted, limits: CgLimits) -> CgOutcome:
    """Run CG on H d = -g from d = 0, stopping at the first satisfied rule.

    After each iterate the rules are checked in a fixed order: residual
    reduced, too many orthant violations, step norm at the cap.  Because CG
    iterate norms grow monotonically from d = 0, the step-norm rule acts as
    an implicit trust region.  Exhausting the iteration cap returns
    MAX_ITERATIONS with the last iterate.
    """
    g = as_vector(g)
    x_restricted = as_vector(x_restricted, g.shape[0])
    n = g.shape[0]

    d = np.zeros(n)
    r = -g  # residual b - H d for b = -g
    r_norm0 = float(np.linalg.norm(r))
    residual_target = max(limits.residual_reduction * r_norm0, limits.residual_floor)

    r_norm = r_norm0
    p = r.copy()
    rs_old = float(r @ r)
    iterations = 0
    for j in range(1, limits.iteration_cap + 1):
        hp = hvp(p)
        if hp.shape != p.shape:
            raise ValueError(
                f"Hessian product returned shape {hp.shape}, expected {p.shape}"
            )
        curvature = float(p @ hp)
        if curvature <= 0.0:
            raise ArithmeticError(
                f"oracle not positive definite at CG iteration {j}: p^T H p = {curvature}"
            )
        alpha = rs_old / curvature
        d = d + alpha * p
        r = r - alpha * hp
        r_norm = float(np.linalg.norm(r))
        if not np.isfinite(r_norm):
            raise ArithmeticError(f"non-finite residual at CG iteration {j}")
        iterations = j
        if r_norm <= residual_target:
            return CgOutcome(d, j, r_norm, CgStopReason.RESIDUAL_REDUCED)
        if _orthant_violations(x_restricted, d) >= limits.violation_threshold:
            return CgOutcome(d, j, r_norm, CgStopReason.ORTHANT_VIOLATIONS)
        if float(np.linalg.norm(d)) >= limits.step_norm_limit:
            return CgOutcome(d, j, r_norm, CgStopReason.STEP_TOO_LARGE)
        rs_new = float(r @ r)
        p = r + (rs_new / rs_old) * p
        rs_old = rs_new
    return CgOutcome(d, iterations, r_norm, CgStopReason.MAX_ITERATIONS)

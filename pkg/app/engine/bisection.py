"""
Bisection over lambda - finds the trade-off that hits a tolerable adversary loss.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

from app.config import settings
from app.engine.bounds import Bounds, compute_bounds
from app.engine.solver import Problem, SolverConfig, solve
from app.errors import InfeasibleTolerance, InvalidParameter, NotReached
from app.models.encoder import Encoder

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BisectionStep:
    lam: float
    J_s: float


@dataclass(frozen=True)
class BisectionResult:
    lam: float
    encoder: Encoder
    J_y: float
    J_s: float
    iterations: int
    trace: List[BisectionStep] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "r": self.encoder.r,
            "J_y": self.J_y,
            "J_s": self.J_s,
            "iterations": self.iterations,
            "trace": [{"lambda": step.lam, "J_s": step.J_s} for step in self.trace],
        }


def bisect_alpha(
    problem: Problem,
    alpha_tol: float,
    epsilon: float,
    max_iter: int = settings.BISECT_MAX_ITER,
    config: Optional[SolverConfig] = None,
    bounds: Optional[Bounds] = None,
) -> BisectionResult:
    """
    Search lambda until |J_s - alpha_tol| <= epsilon.

    Starts at lambda = 1/2. Too much leakage (J_s below the target) moves the
    lower end up to lambda; too little moves the upper end down. Raises
    InfeasibleTolerance when alpha_tol lies outside [alpha_min, alpha_max] and
    NotReached, carrying the closest point, when max_iter runs out.
    """
    if not epsilon > 0.0:
        raise InvalidParameter(f"epsilon must be positive, got {epsilon}")
    if max_iter < 1:
        raise InvalidParameter(f"max_iter must be at least 1, got {max_iter}")
    bounds = bounds or compute_bounds(problem)
    if not bounds.contains_alpha(alpha_tol):
        raise InfeasibleTolerance(alpha_tol, bounds.alpha_min, bounds.alpha_max)

    config = config or SolverConfig()
    lam, lam_min, lam_max = 0.5, 0.0, 1.0
    trace: List[BisectionStep] = []
    best = None

    for iteration in range(1, max_iter + 1):
        solution = solve(problem, config.with_lambda(lam))
        trace.append(BisectionStep(lam=lam, J_s=solution.J_s))
        gap = abs(solution.J_s - alpha_tol)
        if best is None or gap < best[0]:
            best = (gap, lam, solution.J_s)

        if gap <= epsilon:
            logger.info("Bisection reached J_s=%.6g at lambda=%.6g after %d iterations", solution.J_s, lam, iteration)
            return BisectionResult(
                lam=lam, encoder=solution.encoder, J_y=solution.J_y, J_s=solution.J_s,
                iterations=iteration, trace=trace,
            )
        if solution.J_s < alpha_tol - epsilon:
            lam_min = lam
            lam = (lam + lam_max) / 2.0
        else:
            lam_max = lam
            lam = (lam + lam_min) / 2.0

    _, best_lambda, best_j_s = best
    raise NotReached(alpha_tol, best_lambda, best_j_s, max_iter)

"""
Lambda sweep - independent solves over a grid, merged in grid order.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

import numpy as np

from app.config import settings
from app.engine.solver import Problem, Solution, SolverConfig, solve
from app.errors import InvalidLambda, InvalidParameter, SarlError, SweepPointError
from app.models.tradeoff import TradeoffPoint

logger = logging.getLogger(__name__)


def default_grid(points: int = settings.SWEEP_POINTS) -> List[float]:
    """Evenly spaced lambdas in [0, 1], endpoints included."""
    if points < 2:
        raise InvalidParameter(f"A sweep needs at least 2 points, got {points}")
    return [float(v) for v in np.linspace(0.0, 1.0, points)]


def sweep_solutions(
    problem: Problem,
    grid: Sequence[float],
    config: Optional[SolverConfig] = None,
    workers: int = settings.SWEEP_WORKERS,
) -> List[Solution]:
    """Solve every lambda in ``grid``; failures are re-raised as SweepPointError carrying their lambda."""
    grid = [float(lam) for lam in grid]
    for lam in grid:
        if not (0.0 <= lam <= 1.0):
            raise InvalidLambda(lam)
    config = config or SolverConfig()

    def run(lam: float) -> Solution:
        try:
            return solve(problem, config.with_lambda(lam))
        except SarlError as e:
            raise SweepPointError(lam, e) from e

    if workers <= 1 or len(grid) <= 1:
        solutions = [run(lam) for lam in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            solutions = list(pool.map(run, grid))
    logger.info("Swept %d lambda values (mode=%s)", len(grid), problem.mode.value)
    return solutions


def sweep_lambda(
    problem: Problem,
    grid: Sequence[float],
    config: Optional[SolverConfig] = None,
    workers: int = settings.SWEEP_WORKERS,
) -> List[TradeoffPoint]:
    """One TradeoffPoint per grid value, in grid order."""
    solutions = sweep_solutions(problem, grid, config=config, workers=workers)
    return [
        TradeoffPoint(lam=s.encoder.lam, r=s.encoder.r, J_y=s.J_y, J_s=s.J_s)
        for s in solutions
    ]

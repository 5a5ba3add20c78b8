"""End-to-end shape reconstruction from harmonic swarms"""
import logging
from dataclasses import dataclass

import numpy as np

from .harmonic_worker import run_harmonics
from .shape import decompose_shape, select_harmonics, superpose_and_threshold

logger = logging.getLogger(__name__)


@dataclass
class ReconstructionResult:
    plan: object
    runs: list
    total: np.ndarray
    threshold: float
    occupied: np.ndarray

    @property
    def rescale_factors(self):
        return [run.rescale_factor for run in self.runs]

    @property
    def non_converged(self):
        return [run for run in self.runs if not run.converged]

    @property
    def occupied_cells(self):
        return np.flatnonzero(self.occupied)


def reconstruct(env, P, basis, shape, settings, threads=1, callbacks=None):
    """Decompose ``shape``, run one swarm per selected harmonic and superpose"""
    coefficients = decompose_shape(shape, basis)
    plan = select_harmonics(coefficients, settings.percentile, basis, target=shape.values,
                            count=settings.count)
    runs = run_harmonics(plan, env, P, basis, settings, threads=threads, callbacks=callbacks)
    total, threshold, occupied = superpose_and_threshold(
        [run.rescaled for run in runs], env.n, settings.threshold, plan.approximation
    )
    logger.info("Reconstruction occupies %d cells (threshold %.4g, target %d cells)",
                int(occupied.sum()), threshold, int(shape.support.sum()))
    return ReconstructionResult(plan=plan, runs=runs, total=total, threshold=threshold, occupied=occupied)

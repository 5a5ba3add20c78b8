"""Target-shape decomposition, per-harmonic swarm runs and superposition"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import linalg

from ..utils.constants import (
    CONDITION_LIMIT,
    DEFAULT_BETA,
    DEFAULT_EPSILON,
    DEFAULT_ORDER,
    DEFAULT_PERCENTILE,
    DEFAULT_SEED,
    DEFAULT_THRESHOLD_FRACTION,
    EXACT_MAX_STEPS,
    NODAL_TOL,
    PARTICLE_TOLERANCE,
    PARTICLE_WINDOW,
    RESCALE_FLOOR,
)
from .attractor import DesignMethod, assemble_matrix, design_polynomial, extract_kernels
from .dynamics import ConvergenceCriterion, iterate_doubling, project_coefficient
from .errors import DissipationError, IllConditionedError, InputError, NodalStartError, ShapeMismatchError
from .spectral import NormalizationMode
from .swarm import Proposal, SwarmConfig, run_swarm

logger = logging.getLogger(__name__)


class RescaleMode(str, Enum):
    # s = c ||pi||^2 / (w . pi), fixes magnitude and sign
    PROJECTION = 'projection'
    # match the global L2 norm |c| ||pi||, sign taken from the projection
    L2_NORM = 'l2norm'


@dataclass(frozen=True, eq=False)
class TargetShape:
    """Desired density w_des over the free cells"""
    values: np.ndarray

    @classmethod
    def from_mask(cls, mask):
        return cls(values=np.asarray(mask, dtype=float))

    @property
    def n(self):
        return len(self.values)

    @property
    def support(self):
        return self.values > 0


def decompose_shape(shape, basis):
    """Coefficients c with w_des = sum_i c_i pi_i over L2-normalized harmonics"""
    if shape.n != basis.n:
        raise ShapeMismatchError(f"Shape has {shape.n} cells, basis has {basis.n}")
    vectors = basis.harmonics(NormalizationMode.L2)
    condition = np.linalg.cond(vectors)
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise IllConditionedError(f"Harmonic basis condition number {condition:.3g} is too large")
    return linalg.solve(vectors, shape.values)


@dataclass(frozen=True)
class HarmonicEntry:
    index: int
    coefficient: float


@dataclass(frozen=True, eq=False)
class HarmonicPlan:
    entries: tuple
    percentile: float
    approximation: np.ndarray
    residual: float

    @property
    def count(self):
        return len(self.entries)

    @property
    def indices(self):
        return [e.index for e in self.entries]


def select_harmonics(coefficients, percentile, basis, target=None, count=None):
    """Keep the ceil(n * percentile) harmonics with the largest |c| (ties: lower index).

    ``count`` overrides the percentile when given.
    """
    coefficients = np.asarray(coefficients, dtype=float)
    n = len(coefficients)
    if count is None:
        if not 0.0 < percentile <= 1.0:
            raise InputError(f"Percentile {percentile} outside (0, 1]")
        count = math.ceil(n * percentile - 1e-9)
    if not 1 <= count <= n:
        raise InputError(f"Cannot keep {count} of {n} harmonics")

    ranked = np.lexsort((np.arange(n), -np.abs(coefficients)))[:count]
    entries = tuple(HarmonicEntry(int(i), float(coefficients[i])) for i in ranked)

    vectors = basis.harmonics(NormalizationMode.L2)
    approximation = vectors[:, ranked] @ coefficients[ranked]
    residual = float(np.linalg.norm(target - approximation)) if target is not None else math.nan
    logger.info("Selected %d of %d harmonics, L2 residual %.4g", count, n, residual)
    return HarmonicPlan(entries=entries, percentile=count / n, approximation=approximation,
                        residual=residual)


def default_start(basis, index):
    """Cell where the harmonic has its largest magnitude"""
    return int(np.argmax(np.abs(basis.harmonic(index))))


def initial_weight(entry, basis, robots, start):
    """Per-robot weight c ||pi||^2 / (N pi_s) over the L2-normalized harmonic"""
    pi = basis.harmonic(entry.index, NormalizationMode.L2)
    if abs(pi[start]) < NODAL_TOL:
        raise NodalStartError(f"Cell {start} is on a nodal line of harmonic {entry.index}")
    return entry.coefficient * float(pi @ pi) / (robots * pi[start])


def rescale(aggregated, basis, index, coefficient, mode=RescaleMode.PROJECTION, floor=RESCALE_FLOOR):
    """Scale aggregated weights back to ``coefficient`` times the harmonic.

    Returns:
        (rescaled vector, factor)
    """
    aggregated = np.asarray(aggregated, dtype=float)
    pi = basis.harmonic(index, NormalizationMode.L2)
    norm = float(np.linalg.norm(aggregated))
    overlap = float(aggregated @ pi)

    if coefficient == 0.0:
        return np.zeros_like(aggregated), 0.0
    if norm < floor or abs(overlap) < floor * norm:
        raise DissipationError(f"Harmonic {index} vanished from the aggregated weights")

    if RescaleMode(mode) is RescaleMode.PROJECTION:
        factor = coefficient * float(pi @ pi) / overlap
    else:
        factor = math.copysign(abs(coefficient) * float(np.linalg.norm(pi)) / norm, coefficient * overlap)
    return factor * aggregated, factor


@dataclass(frozen=True)
class ReconstructionSettings:
    robots: int = 190_000
    steps: int = 800
    seed: int = DEFAULT_SEED
    start: int | None = None                 # None: largest |pi| cell per harmonic
    method: DesignMethod = DesignMethod.OPTIMIZED
    order: int = DEFAULT_ORDER
    beta: float = DEFAULT_BETA
    epsilon: float | str = DEFAULT_EPSILON
    exact: bool = False                      # iterate M_a instead of simulating robots
    proposal: Proposal = Proposal.UNIFORM
    percentile: float = DEFAULT_PERCENTILE
    count: int | None = None
    threshold: float | None = None
    rescale: RescaleMode = RescaleMode.PROJECTION
    criterion: ConvergenceCriterion = field(
        default_factory=lambda: ConvergenceCriterion(max_steps=EXACT_MAX_STEPS)
    )
    particle_criterion: ConvergenceCriterion = field(
        default_factory=lambda: ConvergenceCriterion(PARTICLE_TOLERANCE, PARTICLE_WINDOW, 10 ** 9)
    )
    show_progress: bool = False


@dataclass
class HarmonicRun:
    entry: HarmonicEntry
    start: int
    initial_weight: float
    aggregated: np.ndarray
    converged: bool
    steps: int
    rescale_factor: float
    rescaled: np.ndarray
    eigen_gap: float
    residual: float  # last relative change of the stop rule


def run_harmonic(entry, env, P, basis, settings):
    """Drive one swarm (or its exact stand-in) toward ``entry`` and rescale the result"""
    start = settings.start if settings.start is not None else default_start(basis, entry.index)
    if not 0 <= start < env.n:
        raise InputError(f"Start cell {start} outside 0..{env.n - 1}")
    weight = initial_weight(entry, basis, settings.robots, start)

    design = design_polynomial(basis, entry.index, settings.method, settings.order,
                               settings.beta, settings.epsilon)
    attractor = assemble_matrix(P, basis, design)
    label = f"harmonic {entry.index + 1}"

    if settings.exact:
        initial = np.zeros(env.n)
        initial[start] = settings.robots * weight
        trajectory = iterate_doubling(attractor.matrix, initial, settings.criterion, label=label)
        aggregated, converged, steps = trajectory.final, trajectory.converged, trajectory.steps
        residual = trajectory.residual
    else:
        kernels = extract_kernels(env, attractor)
        config = SwarmConfig(robots=settings.robots, steps=settings.steps, seed=settings.seed,
                             key=entry.index, proposal=settings.proposal)
        run = run_swarm(env, config, start, kernels=kernels, weight=weight,
                        criterion=settings.particle_criterion,
                        show_progress=settings.show_progress, label=label)
        aggregated, converged, steps = run.final.values, run.converged_at is not None, run.final_state.t
        residual = run.residual

    rescaled, factor = rescale(aggregated, basis, entry.index, entry.coefficient, settings.rescale)
    if logger.isEnabledFor(logging.DEBUG) and np.any(rescaled):
        # left-eigenvector coefficient of the result, in the basis normalization
        planned = entry.coefficient / float(np.linalg.norm(basis.harmonic(entry.index)))
        logger.debug("%s: exact coefficient %.6g, planned %.6g", label,
                     project_coefficient(rescaled, basis, entry.index), planned)
    if not converged:
        logger.warning("%s did not converge after %d steps, residual %.3g", label, steps, residual)
    return HarmonicRun(
        entry=entry,
        start=start,
        initial_weight=weight,
        aggregated=aggregated,
        converged=converged,
        steps=steps,
        rescale_factor=factor,
        rescaled=rescaled,
        eigen_gap=attractor.eigen_gap,
        residual=residual,
    )


def default_threshold(total, approximation=None, fraction=DEFAULT_THRESHOLD_FRACTION):
    """``fraction`` of the mean of ``total`` over the cells the approximation puts above one half"""
    total = np.asarray(total, dtype=float)
    reference = total if approximation is None else np.asarray(approximation, dtype=float)
    support = reference > 0.5
    if not support.any():
        peak = float(total.max()) if total.size else 0.0
        return fraction * peak if peak > 0 else fraction
    return fraction * float(total[support].mean())


def superpose_and_threshold(vectors, n, threshold=None, approximation=None):
    """Sum per-harmonic fields in order and keep the cells above the threshold.

    Returns:
        (total, threshold, occupied mask)
    """
    total = np.zeros(n)
    for v in vectors:
        v = np.asarray(v, dtype=float)
        if v.shape != (n,):
            raise ShapeMismatchError(f"Field of shape {v.shape} cannot join an {n}-cell superposition")
        total = total + v
    if threshold is None:
        threshold = default_threshold(total, approximation)
    return total, float(threshold), total > threshold

"""Deterministic iteration of linear density dynamics v(t+1) = A v(t)"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import pandas as pd

from ..utils.constants import (
    DEFAULT_MAX_STEPS,
    DEFAULT_TOLERANCE,
    DEFAULT_WINDOW,
    DIVERGENCE_FACTOR,
    PROJECTION_FLOOR,
)
from .errors import DivergenceError, IllConditionedError, InputError

logger = logging.getLogger(__name__)


class ProjectionMode(str, Enum):
    # v . pi_a / ||pi_a||^2, exact only when the harmonics are orthogonal
    ORTHOGONAL = 'orthogonal'
    # phi_a . v / phi_a . pi_a with the matching left eigenvector
    EXACT = 'exact'


@dataclass(frozen=True)
class ConvergenceCriterion:
    """Stop once the relative L1 change stays below ``tolerance`` for ``window`` steps"""
    tolerance: float = DEFAULT_TOLERANCE
    window: int = DEFAULT_WINDOW
    max_steps: int = DEFAULT_MAX_STEPS

    def __post_init__(self):
        if self.tolerance <= 0 or self.window < 1 or self.max_steps < 0:
            raise InputError(f"Invalid convergence criterion {self}")


@dataclass
class Trajectory:
    label: str
    initial: np.ndarray
    final: np.ndarray
    steps: int
    converged_at: int | None
    snapshots: list = field(default_factory=list)  # (t, v) pairs
    residual: float = math.nan  # last relative L1 change of the stop rule

    @property
    def converged(self):
        return self.converged_at is not None

    @property
    def limit(self):
        return self.final if self.converged else None


def _relative_change(new, old):
    norm = np.abs(new).sum()
    diff = np.abs(new - old).sum()
    if norm == 0.0:
        return 0.0 if diff == 0.0 else np.inf
    return diff / norm


def iterate(A, v0, criterion=None, snapshot_steps=None, label=''):
    """Iterate ``v <- A v`` from ``v0`` until converged or ``max_steps``.

    Args:
        A: dense array, scipy sparse array or anything supporting ``A @ v``
        v0: initial vector
        criterion: ConvergenceCriterion, defaults apply when None
        snapshot_steps: iterable of step numbers to record (t = 0 allowed)
        label: name carried into the trajectory

    Returns:
        Trajectory; ``converged_at`` is None when max_steps ran out
    """
    criterion = criterion or ConvergenceCriterion()
    wanted = set(snapshot_steps or ())
    v = np.asarray(v0, dtype=float).copy()
    if A.shape != (len(v), len(v)):
        raise InputError(f"Operator of shape {A.shape} cannot act on a vector of length {len(v)}")

    initial = v.copy()
    initial_norm = np.abs(v).sum()
    limit_norm = DIVERGENCE_FACTOR * max(initial_norm, np.finfo(float).tiny)
    snapshots = [(0, v.copy())] if 0 in wanted else []

    quiet_steps = 0
    converged_at = None
    change = math.nan
    t = 0
    while t < criterion.max_steps:
        new = np.asarray(A @ v).ravel()
        t += 1

        norm = np.abs(new).sum()
        if not np.isfinite(norm) or norm > limit_norm:
            raise DivergenceError(f"{label or 'dynamics'} diverged at step {t} (|v|_1 = {norm:.3g})")

        change = _relative_change(new, v)
        quiet_steps = quiet_steps + 1 if change < criterion.tolerance else 0
        v = new
        if t in wanted:
            snapshots.append((t, v.copy()))
        if quiet_steps >= criterion.window:
            converged_at = t
            break

    if converged_at is None:
        logger.warning("%s did not converge within %d steps (last relative change %.3g)",
                       label or 'Dynamics', criterion.max_steps, change)
    else:
        logger.debug("%s converged at step %d", label or 'Dynamics', converged_at)

    # Snapshots requested past convergence hold the converged vector, past max_steps nothing is known
    if converged_at is not None:
        for s in sorted(wanted):
            if s > t:
                snapshots.append((s, v.copy()))

    return Trajectory(
        label=label,
        initial=initial,
        final=v,
        steps=t,
        converged_at=converged_at,
        snapshots=snapshots,
        residual=float(change),
    )


def iterate_doubling(A, v0, criterion=None, label=''):
    """Follow ``v <- A v`` from ``v0`` at steps t = 2^k - 1 by squaring ``A``.

    Each round applies ``A^(2^k)`` to the current vector, so a mode contracting
    by 1 - eps per step is gone after about log2(1 / eps) rounds instead of
    1 / eps steps. ``criterion.window`` counts consecutive quiet rounds and
    ``criterion.max_steps`` bounds t.

    Returns:
        Trajectory with ``steps`` = t of the last computed vector
    """
    criterion = criterion or ConvergenceCriterion()
    v = np.asarray(v0, dtype=float).copy()
    if A.shape != (len(v), len(v)):
        raise InputError(f"Operator of shape {A.shape} cannot act on a vector of length {len(v)}")
    power = A.toarray() if hasattr(A, 'toarray') else np.array(A, dtype=float)

    initial = v.copy()
    limit_norm = DIVERGENCE_FACTOR * max(np.abs(v).sum(), np.finfo(float).tiny)
    quiet_rounds = 0
    converged_at = None
    change = math.nan
    t, stride = 0, 1
    while t + stride <= criterion.max_steps:
        new = power @ v
        t += stride

        norm = np.abs(new).sum()
        if not np.isfinite(norm) or norm > limit_norm:
            raise DivergenceError(f"{label or 'dynamics'} diverged by step {t} (|v|_1 = {norm:.3g})")

        change = _relative_change(new, v)
        quiet_rounds = quiet_rounds + 1 if change < criterion.tolerance else 0
        v = new
        if quiet_rounds >= criterion.window:
            converged_at = t
            break
        power = power @ power
        stride *= 2

    if converged_at is None:
        logger.warning("%s did not converge within %d steps (last relative change %.3g)",
                       label or 'Dynamics', criterion.max_steps, change)
    else:
        logger.debug("%s converged by step %d", label or 'Dynamics', converged_at)

    return Trajectory(
        label=label,
        initial=initial,
        final=v,
        steps=t,
        converged_at=converged_at,
        residual=float(change),
    )


def project_coefficient(v, basis, a, mode=ProjectionMode.EXACT):
    """Coefficient of harmonic ``a`` (in the basis normalization) contained in ``v``"""
    v = np.asarray(v, dtype=float)
    pi = basis.harmonic(a)
    mode = ProjectionMode(mode)
    if mode is ProjectionMode.ORTHOGONAL:
        return float(v @ pi / (pi @ pi))

    phi = basis.left[:, a]
    overlap = float(phi @ pi)
    if abs(overlap) < PROJECTION_FLOOR * np.linalg.norm(phi) * np.linalg.norm(pi):
        raise IllConditionedError(f"Left and right eigenvectors of harmonic {a} are orthogonal")
    return float(phi @ v) / overlap


def predicted_limit(v0, basis, a):
    """Limit of a contracting attractor toward harmonic ``a`` started at ``v0``"""
    return project_coefficient(v0, basis, a, ProjectionMode.EXACT) * basis.harmonic(a)


def hadamard_dynamics(W, Q):
    """Expected aggregated-weight operator W o Q of a weighted Monte-Carlo step"""
    W = W.toarray() if hasattr(W, 'toarray') else np.asarray(W)
    Q = Q.toarray() if hasattr(Q, 'toarray') else np.asarray(Q)
    if W.shape != Q.shape:
        raise InputError(f"Weight matrix {W.shape} and proposal {Q.shape} differ in shape")
    return W * Q


def estimate_decay_rate(trajectory, limit):
    """Least-squares per-step rate of ||v_t - limit||_1 over the recorded snapshots"""
    points = [(t, np.abs(v - limit).sum()) for t, v in trajectory.snapshots]
    points = [(t, d) for t, d in points if d > 0]
    if len(points) < 2:
        raise InputError("Need at least two snapshots away from the limit to fit a decay rate")
    steps, distances = np.array(points).T
    slope, _ = np.polyfit(steps, np.log(distances), 1)
    return float(np.exp(slope))


def trajectory_frame(trajectory):
    """Snapshots as rows ``t, cell_0 .. cell_{n-1}``"""
    if not trajectory.snapshots:
        return pd.DataFrame(columns=['t'])
    steps = [t for t, _ in trajectory.snapshots]
    values = np.vstack([v for _, v in trajectory.snapshots])
    frame = pd.DataFrame(values, columns=[f"cell_{j}" for j in range(values.shape[1])])
    frame.insert(0, 't', steps)
    return frame

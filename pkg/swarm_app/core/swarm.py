"""Monte-Carlo robot swarms: plain random walks and weighted attractor swarms"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import pandas as pd
from scipy import sparse
from tqdm import tqdm

from ..utils.constants import DEFAULT_SEED, ROBOT_BLOCK
from .errors import InputError

logger = logging.getLogger(__name__)


class SwarmMode(str, Enum):
    UNWEIGHTED = 'unweighted'
    WEIGHTED = 'weighted'


class Proposal(str, Enum):
    # destination uniform over all n cells
    UNIFORM = 'uniform'
    # destination uniform over the r-hop ball of the current cell
    LOCAL = 'local'


def block_generator(seed, key, t, block):
    """Independent Philox stream for one block of robots at one step"""
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(key, t, block))
    return np.random.Generator(np.random.Philox(sequence))


def draw_uniforms(seed, key, t, count):
    """``count`` uniforms in [0, 1), the same whatever the caller's thread layout"""
    chunks = []
    for block, start in enumerate(range(0, count, ROBOT_BLOCK)):
        size = min(ROBOT_BLOCK, count - start)
        chunks.append(block_generator(seed, key, t, block).random(size))
    return np.concatenate(chunks) if chunks else np.empty(0)


@dataclass
class SwarmState:
    positions: np.ndarray
    weights: np.ndarray | None = None
    t: int = 0

    @property
    def robots(self):
        return len(self.positions)


@dataclass(frozen=True, eq=False)
class AggregatedWeights:
    """Per-cell robot counts and weight sums (w-bar)"""
    values: np.ndarray
    counts: np.ndarray

    @property
    def total_robots(self):
        return int(self.counts.sum())


def initialize_swarm(env, robots, start, weight=None):
    """Place ``robots`` robots on ``start`` (one cell index or one per robot)"""
    if robots < 1:
        raise InputError(f"A swarm needs at least one robot, got {robots}")
    positions = np.broadcast_to(np.asarray(start, dtype=np.int64), (robots,)).copy()
    if positions.min() < 0 or positions.max() >= env.n:
        raise InputError(f"Start cells must lie in 0..{env.n - 1}")
    weights = None
    if weight is not None:
        weights = np.broadcast_to(np.asarray(weight, dtype=float), (robots,)).copy()
    return SwarmState(positions=positions, weights=weights, t=0)


def aggregate(state, n):
    counts = np.bincount(state.positions, minlength=n)
    if state.weights is None:
        values = counts.astype(float)
    else:
        values = np.bincount(state.positions, weights=state.weights, minlength=n)
    return AggregatedWeights(values=values, counts=counts)


class ChainSampler:
    """Column-wise inverse-CDF sampling of the next cell from a transition matrix"""

    def __init__(self, P):
        csc = sparse.csc_array(P.matrix if hasattr(P, 'matrix') else P)
        csc.sort_indices()
        n = csc.shape[0]
        width = int(np.max(np.diff(csc.indptr)))
        self.targets = np.zeros((n, width), dtype=np.int64)
        self.cdf = np.full((n, width), np.inf)
        for j in range(n):
            lo, hi = csc.indptr[j], csc.indptr[j + 1]
            rows, probs = csc.indices[lo:hi], csc.data[lo:hi]
            keep = probs > 0
            rows, probs = rows[keep], probs[keep]
            cumulative = np.cumsum(probs)
            # Last bucket takes everything left over from rounding
            cumulative[-1] = np.inf
            self.targets[j, :len(rows)] = rows
            self.cdf[j, :len(rows)] = cumulative

    def sample(self, positions, uniforms):
        choice = (uniforms[:, None] >= self.cdf[positions]).sum(axis=1)
        return self.targets[positions, choice]


class BallProposal:
    """Uniform proposal over the r-hop ball of each cell"""

    def __init__(self, env, radius):
        balls = [sorted(env.hop_ball(j, radius)) for j in range(env.n)]
        self.sizes = np.array([len(b) for b in balls], dtype=np.int64)
        self.members = np.zeros((env.n, int(self.sizes.max())), dtype=np.int64)
        for j, ball in enumerate(balls):
            self.members[j, :len(ball)] = ball

    def sample(self, positions, uniforms):
        sizes = self.sizes[positions]
        slot = np.minimum((uniforms * sizes).astype(np.int64), sizes - 1)
        return self.members[positions, slot], sizes.astype(float)


def step_unweighted(state, sampler, seed=DEFAULT_SEED, key=0):
    """Every robot moves independently according to P"""
    uniforms = draw_uniforms(seed, key, state.t, state.robots)
    positions = sampler.sample(state.positions, uniforms)
    return SwarmState(positions=positions, weights=state.weights, t=state.t + 1)


def step_weighted(state, env, kernels, seed=DEFAULT_SEED, key=0, proposal=None):
    """Weighted Monte-Carlo step followed by per-cell weight averaging.

    Each robot jumps to a proposed cell, multiplies its weight by the
    kernel entry for that move divided by the proposal probability, and
    then all robots sharing a cell take the cell's mean weight.
    """
    if state.weights is None:
        raise InputError("Weighted steps need robot weights")
    n = env.n
    table = kernels.lookup(env)
    uniforms = draw_uniforms(seed, key, state.t, state.robots)

    if proposal is None:
        destinations = np.minimum((uniforms * n).astype(np.int64), n - 1)
        inverse_probability = float(n)
    else:
        destinations, inverse_probability = proposal.sample(state.positions, uniforms)

    weights = state.weights * inverse_probability * table[destinations, state.positions]

    # Synchronous averaging among co-located robots
    sums = np.bincount(destinations, weights=weights, minlength=n)
    counts = np.bincount(destinations, minlength=n)
    weights = sums[destinations] / counts[destinations]
    return SwarmState(positions=destinations, weights=weights, t=state.t + 1)


@dataclass(frozen=True)
class SwarmConfig:
    robots: int
    steps: int
    seed: int = DEFAULT_SEED
    key: int = 0                 # substream id, one per concurrent swarm
    stride: int = 0              # snapshot every ``stride`` steps (0: first and last only)
    snapshot_steps: tuple = ()    # extra steps to record
    proposal: Proposal = Proposal.UNIFORM

    def __post_init__(self):
        if self.robots < 1 or self.steps < 0 or self.stride < 0 or self.seed < 0 or self.key < 0:
            raise InputError(f"Invalid swarm configuration {self}")


@dataclass
class SwarmRun:
    mode: SwarmMode
    config: SwarmConfig
    final_state: SwarmState
    snapshots: list = field(default_factory=list)  # (t, AggregatedWeights)
    converged_at: int | None = None
    residual: float = math.nan  # last relative change of the stop rule

    @property
    def final(self):
        return self.snapshots[-1][1]


def _normalized(values):
    norm = np.linalg.norm(values)
    return values / norm if norm > 0 else values


def run_swarm(env, config, start, P=None, kernels=None, weight=None, criterion=None,
              show_progress=False, label='swarm'):
    """Run an unweighted (``P``) or weighted (``kernels``) swarm.

    Args:
        env: Environment
        config: SwarmConfig
        start: start cell index, or one index per robot
        P: transition matrix for unweighted runs
        kernels: KernelTable for weighted runs
        weight: initial robot weight (scalar or per robot), weighted runs only
        criterion: optional ConvergenceCriterion on the L2-normalized
            aggregate; the run stops early once it holds
        show_progress: display a tqdm bar

    Returns:
        SwarmRun with aggregated snapshots
    """
    if (P is None) == (kernels is None):
        raise InputError("Give exactly one of P (unweighted) or kernels (weighted)")
    mode = SwarmMode.UNWEIGHTED if kernels is None else SwarmMode.WEIGHTED
    state = initialize_swarm(env, config.robots, start,
                             weight=None if mode is SwarmMode.UNWEIGHTED else (1.0 if weight is None else weight))

    sampler = ChainSampler(P) if mode is SwarmMode.UNWEIGHTED else None
    proposal = None
    if mode is SwarmMode.WEIGHTED and config.proposal is Proposal.LOCAL:
        proposal = BallProposal(env, kernels.radius)

    current = aggregate(state, env.n)
    snapshots = [(0, current)]
    previous = _normalized(current.values)
    quiet_steps = 0
    converged_at = None
    change = math.nan

    for _ in tqdm(range(config.steps), desc=label, disable=not show_progress, leave=False):
        if sampler is not None:
            state = step_unweighted(state, sampler, config.seed, config.key)
        else:
            state = step_weighted(state, env, kernels, config.seed, config.key, proposal)

        current = aggregate(state, env.n)
        if (config.stride and state.t % config.stride == 0) or state.t in config.snapshot_steps:
            snapshots.append((state.t, current))

        if criterion is not None:
            normalized = _normalized(current.values)
            change = np.abs(normalized - previous).sum() / max(np.abs(normalized).sum(), np.finfo(float).tiny)
            quiet_steps = quiet_steps + 1 if change < criterion.tolerance else 0
            previous = normalized
            if quiet_steps >= criterion.window:
                converged_at = state.t
                break

    if snapshots[-1][0] != state.t:
        snapshots.append((state.t, current))
    if criterion is not None and converged_at is None:
        logger.warning("%s: aggregate still changing after %d steps (relative change %.3g)",
                       label, state.t, change)

    return SwarmRun(mode=mode, config=config, final_state=state, snapshots=snapshots,
                    converged_at=converged_at, residual=float(change))


def snapshot_frame(run):
    """Long-format snapshot table: t, cell, robot_count, weight_sum"""
    frames = []
    for t, agg in run.snapshots:
        n = len(agg.values)
        frames.append(pd.DataFrame({
            't': np.full(n, t),
            'cell': np.arange(n),
            'robot_count': agg.counts,
            'weight_sum': agg.values,
        }))
    return pd.concat(frames, ignore_index=True)


def robot_frame(state):
    frame = pd.DataFrame({'robot': np.arange(state.robots), 'cell': state.positions})
    if state.weights is not None:
        frame['weight'] = state.weights
    return frame

"""Scenario execution, one runner per mode"""
import logging
from pathlib import Path

import numpy as np
import pandas as pd
import scipy

from .. import __version__
from ..core.attractor import assemble_matrix, design_polynomial, extract_kernels, format_kernel_table
from ..core.dynamics import ConvergenceCriterion, ProjectionMode, iterate, project_coefficient, trajectory_frame
from ..core.env import build_chain, format_overlay, load_environment, load_overlay
from ..core.errors import NonConvergenceError, ScenarioError
from ..core.pipeline import reconstruct
from ..core.shape import ReconstructionSettings, TargetShape
from ..core.spectral import decompose
from ..core.swarm import SwarmConfig, robot_frame, run_swarm, snapshot_frame
from ..utils.constants import DEFAULT_MAX_STEPS, EXACT_MAX_STEPS, EXIT_OK
from .outputs import cell_frame, format_plan, harmonic_runs_frame, write_frame, write_text
from .render import render_ascii, write_pgm
from .scenario import Mode, write_scenario

logger = logging.getLogger(__name__)

# Harmonics rendered by the eigen mode
RENDERED_HARMONICS = 5


def parse_start(text, env):
    """Cell index from 'i' (line) or 'row col' (grid), or None when unset"""
    if text is None or not str(text).strip():
        return None
    try:
        coord = tuple(int(token) for token in str(text).split())
    except ValueError as e:
        raise ScenarioError(f"Bad start cell {text!r}") from e
    index = env.index_of(coord) if len(coord) == len(env.shape) else None
    if index is None:
        raise ScenarioError(f"Start cell {text!r} is not a free cell of {env!r}")
    return index


def _criterion(scenario, max_steps=DEFAULT_MAX_STEPS):
    section = scenario.dynamics
    if section.max_steps is not None:
        max_steps = section.max_steps
    return ConvergenceCriterion(section.tolerance, section.window, max_steps)


def _chain_and_basis(env):
    P = build_chain(env)
    return P, decompose(P)


def _attractor(scenario, basis, P):
    a = scenario.harmonic_index
    if a >= basis.n:
        raise ScenarioError(f"Harmonic {a + 1} does not exist on {basis.n} cells")
    design = design_polynomial(basis, a, scenario.design.method, scenario.design.order,
                               scenario.design.beta, scenario.design.epsilon)
    return assemble_matrix(P, basis, design)


def _write_kernels(env, attractor, out):
    kernels = extract_kernels(env, attractor)
    write_text(format_kernel_table(kernels, attractor.design, env), out / 'kernels.txt')
    return kernels


def _render(values, env, out, name, pgm):
    write_text(render_ascii(values, env), out / f"{name}.txt")
    if pgm:
        write_pgm(values, env, str(out / f"{name}.pgm"))


def _finish(converged, scenario, what):
    if converged:
        return EXIT_OK
    if scenario.runtime.allow_partial:
        logger.warning("%s did not converge; partial results kept (--allow-partial)", what)
        return EXIT_OK
    error = NonConvergenceError(f"{what} did not converge")
    logger.error("%s", error)
    return error.exit_code


def run_eigen(scenario, env, out, show_progress=False):
    _, basis = _chain_and_basis(env)
    write_frame(basis.to_frame(), out / 'eigenpairs.csv')

    print(f"{'harmonic':>8} {'eigenvalue':>10}")
    for i, value in enumerate(basis.eigenvalues):
        print(f"{i + 1:>8d} {value:>10.4f}")
    print(f"condition number {basis.condition_number:.4g}")

    for i in range(min(RENDERED_HARMONICS, basis.n)):
        _render(basis.harmonic(i), env, out, f"harmonic_{i + 1}", scenario.output.pgm)
    return EXIT_OK


def run_dynamics(scenario, env, out, show_progress=False):
    P, basis = _chain_and_basis(env)
    attractor = _attractor(scenario, basis, P)
    _write_kernels(env, attractor, out)

    start = parse_start(scenario.swarm.start, env) or 0
    initial = np.zeros(env.n)
    initial[start] = 1.0
    a = attractor.target
    trajectory = iterate(attractor.matrix, initial, _criterion(scenario),
                         snapshot_steps=scenario.dynamics.snapshots, label=f"harmonic {a + 1}")
    write_frame(trajectory_frame(trajectory), out / 'trajectory.csv')
    _render(trajectory.final, env, out, 'final', scenario.output.pgm)

    pi = basis.harmonic(a)
    final = trajectory.final
    cosine = float(final @ pi / (np.linalg.norm(final) * np.linalg.norm(pi))) if final.any() else 0.0
    exact = project_coefficient(initial, basis, a, ProjectionMode.EXACT)
    orthogonal = project_coefficient(initial, basis, a, ProjectionMode.ORTHOGONAL)
    print(f"harmonic {a + 1}: eigen gap {attractor.eigen_gap:.4g}, steps {trajectory.steps}, "
          f"converged at {trajectory.converged_at}")
    print(f"cosine similarity with pi_{a + 1}: {cosine:.6f}")
    print(f"projection exact {exact:.6g}, orthogonal approximation {orthogonal:.6g}")
    return _finish(trajectory.converged, scenario, f"Harmonic {a + 1} dynamics")


def _run_swarm_mode(scenario, env, out, weighted, show_progress):
    P, basis = _chain_and_basis(env)
    start = parse_start(scenario.swarm.start, env) or 0
    config = SwarmConfig(
        robots=scenario.swarm.robots,
        steps=scenario.swarm.steps,
        seed=scenario.swarm.seed,
        stride=scenario.swarm.stride,
        snapshot_steps=tuple(scenario.dynamics.snapshots),
        proposal=scenario.swarm.proposal,
    )
    if weighted:
        kernels = _write_kernels(env, _attractor(scenario, basis, P), out)
        run = run_swarm(env, config, start, kernels=kernels, weight=1.0,
                        show_progress=show_progress, label='weighted swarm')
    else:
        run = run_swarm(env, config, start, P=P, show_progress=show_progress, label='swarm')

    write_frame(snapshot_frame(run), out / 'snapshots.csv')
    if scenario.swarm.per_robot_dump:
        write_frame(robot_frame(run.final_state), out / 'robots.csv')
    _render(run.final.values, env, out, 'final', scenario.output.pgm)

    final = run.final.values
    total = np.abs(final).sum()
    if total > 0:
        print(pd.DataFrame({'cell': np.arange(env.n), 'share': final / total}).to_string(index=False))
    return EXIT_OK


def run_swarm_unweighted(scenario, env, out, show_progress=False):
    return _run_swarm_mode(scenario, env, out, False, show_progress)


def run_swarm_weighted(scenario, env, out, show_progress=False):
    return _run_swarm_mode(scenario, env, out, True, show_progress)


def reconstruction_settings(scenario, env, show_progress=False):
    return ReconstructionSettings(
        robots=scenario.swarm.robots,
        steps=scenario.swarm.steps,
        seed=scenario.swarm.seed,
        start=parse_start(scenario.swarm.start, env),
        method=scenario.design.method,
        order=scenario.design.order,
        beta=scenario.design.beta,
        epsilon=scenario.design.epsilon,
        exact=scenario.runtime.exact_dynamics,
        proposal=scenario.swarm.proposal,
        percentile=scenario.shape.percentile,
        count=scenario.shape.count,
        threshold=scenario.shape.threshold,
        rescale=scenario.shape.rescale,
        criterion=_criterion(scenario, EXACT_MAX_STEPS),
        show_progress=show_progress,
    )


def run_reconstruct(scenario, env, out, show_progress=False):
    if not scenario.shape.path:
        raise ScenarioError("Reconstruction needs a shape overlay ([shape] path)")
    shape = TargetShape.from_mask(load_overlay(scenario.shape.path, env))
    P, basis = _chain_and_basis(env)
    settings = reconstruction_settings(scenario, env, show_progress)

    callbacks = {
        'finished': lambda run: logger.info("Harmonic %d done after %d steps",
                                            run.entry.index + 1, run.steps),
    }
    result = reconstruct(env, P, basis, shape, settings, threads=scenario.runtime.threads,
                         callbacks=callbacks)

    write_text(format_plan(result, basis, scenario), out / 'plan.txt')
    write_frame(harmonic_runs_frame(result, basis), out / 'harmonics.csv')
    write_frame(cell_frame(env,
                           target=shape.values,
                           approximation=result.plan.approximation,
                           total=result.total,
                           occupied=result.occupied.astype(int)),
                out / 'fields.csv')
    write_text(format_overlay(result.occupied, env), out / 'occupied.txt')
    _render(result.total, env, out, 'total', scenario.output.pgm)
    if scenario.output.pgm:
        write_pgm(result.plan.approximation, env, str(out / 'approximation.pgm'))

    target = shape.support
    overlap = np.sum(target & result.occupied) / max(np.sum(target | result.occupied), 1)
    print(format_overlay(result.occupied, env), end='')
    print(f"occupied {int(result.occupied.sum())} cells, target {int(target.sum())}, "
          f"overlap (IoU) {overlap:.3f}")

    missing = [run.entry.index + 1 for run in result.non_converged]
    return _finish(not missing, scenario, f"Harmonics {missing}")


MODE_RUNNERS = {
    Mode.EIGEN: run_eigen,
    Mode.DYNAMICS: run_dynamics,
    Mode.SWARM_UNWEIGHTED: run_swarm_unweighted,
    Mode.SWARM_WEIGHTED: run_swarm_weighted,
    Mode.RECONSTRUCT: run_reconstruct,
}


def run_scenario(scenario, show_progress=False):
    """Run a validated scenario, write its outputs and manifest, return the exit code"""
    if not scenario.scenario.environment:
        raise ScenarioError("No environment given ([scenario] environment or --environment)")
    env = load_environment(scenario.scenario.environment)
    out = Path(scenario.output.directory)
    out.mkdir(parents=True, exist_ok=True)

    code = MODE_RUNNERS[scenario.mode](scenario, env, out, show_progress)
    write_scenario(scenario, str(out / 'manifest.ini'), run_info={
        'version': __version__,
        'numpy': np.__version__,
        'scipy': scipy.__version__,
        'exit_code': code,
    })
    return code

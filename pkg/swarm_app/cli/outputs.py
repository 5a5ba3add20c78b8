"""Result files: CSV tables, plan and kernel dumps, overlays"""
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from ..utils.constants import CSV_FLOAT_FORMAT

logger = logging.getLogger(__name__)


def write_frame(frame, path):
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    logger.info("Wrote %s", path)


def write_text(text, path):
    Path(path).write_text(text)
    logger.info("Wrote %s", path)


def cell_frame(env, **columns):
    """Per-cell table with coordinates followed by the given columns"""
    coords = np.array(env.coords)
    frame = pd.DataFrame({'cell': np.arange(env.n)})
    names = ['i'] if coords.shape[1] == 1 else ['row', 'col']
    for k, name in enumerate(names):
        frame[name] = coords[:, k]
    for name, values in columns.items():
        frame[name] = values
    return frame


def harmonic_runs_frame(result, basis):
    """One row per harmonic swarm; harmonic numbers are 1-based"""
    rows = []
    for run in result.runs:
        rows.append({
            'harmonic': run.entry.index + 1,
            'eigenvalue': basis.eigenvalues[run.entry.index],
            'coefficient': run.entry.coefficient,
            'start_cell': run.start,
            'initial_weight': run.initial_weight,
            'rescale_factor': run.rescale_factor,
            'eigen_gap': run.eigen_gap,
            'steps': run.steps,
            'converged': run.converged,
            'residual': run.residual,
        })
    return pd.DataFrame(rows)


def format_plan(result, basis, scenario):
    """Human-readable harmonic plan with the settings that produced it"""
    plan = result.plan
    lines = [
        f"environment = {scenario.scenario.environment}",
        f"shape = {scenario.shape.path}",
        f"percentile = {plan.percentile:.6g}",
        f"harmonics = {plan.count}",
        f"threshold = {result.threshold:.17g}",
        f"robots = {scenario.swarm.robots}",
        f"seed = {scenario.swarm.seed}",
        f"exact_dynamics = {str(scenario.runtime.exact_dynamics).lower()}",
        f"approximation_residual = {plan.residual:.6g}",
        '',
        f"{'harmonic':>8} {'eigenvalue':>12} {'coefficient':>14} {'rescale':>12} converged",
    ]
    for run in result.runs:
        lines.append(
            f"{run.entry.index + 1:>8d} {basis.eigenvalues[run.entry.index]:>12.6f} "
            f"{run.entry.coefficient:>14.6g} {run.rescale_factor:>12.6g} {str(run.converged).lower()}"
        )
    return '\n'.join(lines) + '\n'

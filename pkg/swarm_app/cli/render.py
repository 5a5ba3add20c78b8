"""ASCII and 16-bit PGM renderings of per-cell vectors"""
import numpy as np
from PIL import Image

from ..core.env import EnvKind
from ..utils.constants import (
    PGM_MAX_VALUE,
    PGM_MID_GRAY,
    PGM_OBSTACLE_VALUE,
    RENDER_BUCKETS,
    RENDER_LOWEST_CHAR,
    RENDER_OBSTACLE_CHAR,
)


def _bucket(x):
    for threshold, char in RENDER_BUCKETS:
        if x >= threshold:
            return char
    return RENDER_LOWEST_CHAR


def render_ascii(values, env):
    """One character per cell, bucketed on value / max|value|; obstacles as '@'"""
    values = np.asarray(values, dtype=float)
    peak = np.abs(values).max() if values.size else 0.0
    scaled = values / peak if peak > 0 else np.zeros_like(values)
    chars = env.to_array(np.array([_bucket(x) for x in scaled]), fill=RENDER_OBSTACLE_CHAR)
    if env.kind is EnvKind.LINE:
        return ''.join(chars) + '\n'
    return '\n'.join(''.join(row) for row in chars) + '\n'


def pgm_levels(values, env):
    """Integer image: obstacles 0, free cells linearly mapped onto 1..65535"""
    values = np.asarray(values, dtype=float)
    low, high = float(values.min()), float(values.max())
    if high > low:
        levels = 1 + np.rint((values - low) / (high - low) * (PGM_MAX_VALUE - 1))
    else:
        levels = np.full(values.shape, PGM_MID_GRAY)
    image = env.to_array(levels.astype(np.int32), fill=PGM_OBSTACLE_VALUE).astype(np.int32)
    if env.kind is EnvKind.LINE:
        image = image.reshape(1, -1)
    return image, low, high


def write_pgm(values, env, path):
    """16-bit binary PGM plus a '<path>.txt' sidecar with the value range"""
    image, low, high = pgm_levels(values, env)
    Image.fromarray(image).save(path, format='PPM')
    with open(f"{path}.txt", 'w') as f:
        f.write(f"min = {low:.17g}\n")
        f.write(f"max = {high:.17g}\n")
        f.write(f"obstacle = {PGM_OBSTACLE_VALUE}\n")
        f.write(f"free_levels = 1 {PGM_MAX_VALUE}\n")

"""Discretized environments and the random-walk chains defined on them"""
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import networkx as nx
import numpy as np
from scipy import sparse

from ..utils.constants import (
    ENV_FREE_CHAR,
    ENV_OBSTACLE_CHAR,
    GRID_DIAGONAL_PROB,
    GRID_ORTHOGONAL_PROB,
    GRID_SELF_PROB,
    LINE_BOUNDARY_STEP_PROB,
    LINE_SELF_PROB,
    LINE_STEP_PROB,
    SHAPE_TARGET_CHAR,
    STOCHASTIC_TOL,
)
from .errors import (
    ConnectivityError,
    EmptyEnvironmentError,
    EnvironmentFormatError,
    InvalidDimensionError,
    ShapeMismatchError,
)

logger = logging.getLogger(__name__)


class EnvKind(str, Enum):
    LINE = 'line'
    GRID = 'grid'


LINE_OFFSETS = [(-1,), (1,)]

# (offset, base probability) for the 8-connected grid
GRID_MOVES = [
    ((-1, -1), GRID_DIAGONAL_PROB),
    ((-1, 0), GRID_ORTHOGONAL_PROB),
    ((-1, 1), GRID_DIAGONAL_PROB),
    ((0, -1), GRID_ORTHOGONAL_PROB),
    ((0, 1), GRID_ORTHOGONAL_PROB),
    ((1, -1), GRID_DIAGONAL_PROB),
    ((1, 0), GRID_ORTHOGONAL_PROB),
    ((1, 1), GRID_DIAGONAL_PROB),
]


class Environment:
    """Free cells of a line or 2D grid, indexed 0..n-1 in row-major order.

    Line cells have coordinates ``(i,)``, grid cells ``(row, col)``.
    Adjacency is the 2-neighbourhood on a line and the 8-neighbourhood on
    a grid; a diagonal move only needs the diagonal cell itself to be free.
    """

    def __init__(self, kind, shape, obstacles=None):
        self.kind = EnvKind(kind)
        self.shape = tuple(int(d) for d in shape)

        expected_rank = 1 if self.kind is EnvKind.LINE else 2
        if len(self.shape) != expected_rank or any(d < 1 for d in self.shape):
            raise InvalidDimensionError(f"Invalid {self.kind.value} dimensions: {self.shape}")

        if obstacles is None:
            obstacles = np.zeros(self.shape, dtype=bool)
        obstacles = np.array(obstacles, dtype=bool)
        if obstacles.shape != self.shape:
            raise InvalidDimensionError(
                f"Obstacle mask shape {obstacles.shape} does not match {self.shape}"
            )
        if self.kind is EnvKind.LINE and obstacles.any():
            raise InvalidDimensionError("Line environments have no obstacles")
        obstacles.setflags(write=False)
        self.obstacles = obstacles

        # argwhere walks the array in row-major order
        free = np.argwhere(~obstacles)
        if len(free) == 0:
            raise EmptyEnvironmentError("Environment has no free cells")
        self.coords = [tuple(int(x) for x in c) for c in free]
        self._index = {c: i for i, c in enumerate(self.coords)}

        self.graph = self._build_graph()
        if not nx.is_connected(self.graph):
            components = nx.number_connected_components(self.graph)
            raise ConnectivityError(f"Free space splits into {components} disconnected regions")

    @classmethod
    def line(cls, n):
        return cls(EnvKind.LINE, (n,))

    @classmethod
    def grid(cls, obstacles):
        """Grid environment from a boolean mask (True marks an obstacle)"""
        obstacles = np.asarray(obstacles, dtype=bool)
        return cls(EnvKind.GRID, obstacles.shape, obstacles)

    @property
    def n(self):
        return len(self.coords)

    @property
    def offsets(self):
        return LINE_OFFSETS if self.kind is EnvKind.LINE else [move for move, _ in GRID_MOVES]

    @property
    def full_degree(self):
        return len(self.offsets)

    def __repr__(self):
        return f"Environment({self.kind.value}, shape={self.shape}, n={self.n})"

    def index_of(self, coord):
        """Cell index of a coordinate tuple, or None when it is blocked or outside"""
        return self._index.get(tuple(int(x) for x in coord))

    def coord_of(self, index):
        return self.coords[index]

    def shifted(self, index, offset):
        """Index of the cell at ``coord_of(index) + offset``, or None"""
        coord = tuple(c + d for c, d in zip(self.coords[index], offset))
        return self._index.get(coord)

    def offset(self, src, dst):
        return tuple(b - a for a, b in zip(self.coords[src], self.coords[dst]))

    def neighbors(self, index):
        return sorted(self.graph.neighbors(index))

    def hop_distance(self, i, j):
        try:
            return nx.shortest_path_length(self.graph, i, j)
        except nx.NetworkXNoPath as e:
            raise ConnectivityError(f"Cells {i} and {j} are not connected") from e

    def hop_ball(self, index, radius):
        """Map of every cell within ``radius`` hops of ``index`` to its hop distance"""
        return nx.single_source_shortest_path_length(self.graph, index, cutoff=radius)

    def irregular_cells(self):
        """Cells touching a border or obstacle (fewer than the full neighbour count)"""
        return [i for i in range(self.n) if self.graph.degree(i) < self.full_degree]

    def to_array(self, values, fill=np.nan):
        """Scatter a per-cell vector onto the full line/grid array"""
        values = np.asarray(values)
        if values.shape != (self.n,):
            raise ShapeMismatchError(f"Expected {self.n} values, got shape {values.shape}")
        out = np.full(self.shape, fill, dtype=np.result_type(values, np.asarray(fill)))
        out[tuple(np.array(self.coords).T)] = values
        return out

    def _build_graph(self):
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        for i in range(self.n):
            for offset in self.offsets:
                j = self.shifted(i, offset)
                if j is not None:
                    graph.add_edge(i, j)
        return graph


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Column-stochastic matrix, ``matrix[i, j]`` is the probability of moving j -> i"""
    matrix: sparse.csc_array

    def __post_init__(self):
        rows, cols = self.matrix.shape
        if rows != cols:
            raise InvalidDimensionError(f"Transition matrix must be square, got {self.matrix.shape}")
        if self.matrix.min() < 0:
            raise InvalidDimensionError("Transition matrix has negative entries")
        sums = np.asarray(self.matrix.sum(axis=0)).ravel()
        worst = np.max(np.abs(sums - 1.0))
        if worst > STOCHASTIC_TOL:
            raise InvalidDimensionError(f"Columns do not sum to one (worst deviation {worst:.3g})")

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def shape(self):
        return self.matrix.shape

    def __matmul__(self, other):
        return self.matrix @ other

    def toarray(self):
        return self.matrix.toarray()

    def column(self, j):
        return self.matrix[:, [j]].toarray().ravel()


def build_line_chain(n):
    """Random walk on n cells: stay 0.2, step 0.4 each way, end cells step inward 0.8"""
    if n < 2:
        raise InvalidDimensionError(f"A line chain needs at least 2 cells, got {n}")

    rows, cols, vals = [], [], []
    for j in range(n):
        rows.append(j)
        cols.append(j)
        vals.append(LINE_SELF_PROB)
        neighbours = [i for i in (j - 1, j + 1) if 0 <= i < n]
        step = LINE_STEP_PROB if len(neighbours) == 2 else LINE_BOUNDARY_STEP_PROB
        for i in neighbours:
            rows.append(i)
            cols.append(j)
            vals.append(step)

    matrix = sparse.coo_array((vals, (rows, cols)), shape=(n, n)).tocsc()
    return TransitionMatrix(matrix)


def build_grid_chain(env):
    """8-connected random walk; mass of blocked moves is shared by the free neighbours"""
    if env.kind is not EnvKind.GRID:
        raise InvalidDimensionError("build_grid_chain needs a grid environment")

    rows, cols, vals = [], [], []
    for j in range(env.n):
        free, freed = [], 0.0
        for offset, prob in GRID_MOVES:
            i = env.shifted(j, offset)
            if i is None:
                freed += prob
            else:
                free.append((i, prob))

        if free:
            share = freed / len(free)
            self_prob = GRID_SELF_PROB
        else:
            # Single-cell environment
            share = 0.0
            self_prob = 1.0

        rows.append(j)
        cols.append(j)
        vals.append(self_prob)
        for i, prob in free:
            rows.append(i)
            cols.append(j)
            vals.append(prob + share)

    matrix = sparse.coo_array((vals, (rows, cols)), shape=(env.n, env.n)).tocsc()
    logger.debug("Built grid chain on %d cells (%d nonzeros)", env.n, matrix.nnz)
    return TransitionMatrix(matrix)


def build_chain(env):
    if env.kind is EnvKind.LINE:
        return build_line_chain(env.n)
    return build_grid_chain(env)


# Environment and overlay files

def _parse_header(line):
    tokens = line.split()
    try:
        kind = EnvKind(tokens[0].lower())
        dims = tuple(int(t) for t in tokens[1:])
    except (IndexError, ValueError) as e:
        raise EnvironmentFormatError(f"Bad header {line!r}, expected 'grid R C' or 'line N'") from e
    if len(dims) != (1 if kind is EnvKind.LINE else 2):
        raise EnvironmentFormatError(f"Bad header {line!r}, wrong number of dimensions")
    if any(d < 1 for d in dims):
        raise InvalidDimensionError(f"Invalid dimensions in header {line!r}")
    return kind, dims


def _grid_rows(lines, dims, allowed):
    rows, cols = dims
    body = lines[:rows]
    if len(body) != rows:
        raise EnvironmentFormatError(f"Expected {rows} rows, found {len(body)}")
    for r, row in enumerate(body):
        if len(row) != cols:
            raise EnvironmentFormatError(f"Row {r} has {len(row)} cells, expected {cols}")
        bad = set(row) - set(allowed)
        if bad:
            raise EnvironmentFormatError(f"Row {r} has unknown characters {sorted(bad)}")
    return np.array([list(row) for row in body])


def _content_lines(text):
    return [line.strip() for line in text.splitlines() if line.strip()]


def parse_environment(text):
    """Parse 'line N' or 'grid R C' followed by R rows of '.' (free) / '#' (obstacle)"""
    lines = _content_lines(text)
    if not lines:
        raise EnvironmentFormatError("Empty environment file")
    kind, dims = _parse_header(lines[0])
    if kind is EnvKind.LINE:
        return Environment.line(dims[0])
    chars = _grid_rows(lines[1:], dims, ENV_FREE_CHAR + ENV_OBSTACLE_CHAR)
    return Environment.grid(chars == ENV_OBSTACLE_CHAR)


def load_environment(path):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise EnvironmentFormatError(f"Cannot read environment file {path}: {e}") from e
    env = parse_environment(text)
    logger.info("Loaded %r from %s", env, path)
    return env


def format_environment(env):
    if env.kind is EnvKind.LINE:
        return f"line {env.shape[0]}\n"
    rows = [''.join(ENV_OBSTACLE_CHAR if blocked else ENV_FREE_CHAR for blocked in row)
            for row in env.obstacles]
    return f"grid {env.shape[0]} {env.shape[1]}\n" + '\n'.join(rows) + '\n'


def parse_overlay(text, env):
    """Parse a target overlay ('X' target, '.' free, '#' obstacle) into a per-cell mask"""
    lines = _content_lines(text)
    if not lines:
        raise EnvironmentFormatError("Empty shape overlay")
    kind, dims = _parse_header(lines[0])
    if kind is not env.kind or dims != env.shape:
        raise ShapeMismatchError(
            f"Overlay is {kind.value} {dims}, environment is {env.kind.value} {env.shape}"
        )

    allowed = ENV_FREE_CHAR + ENV_OBSTACLE_CHAR + SHAPE_TARGET_CHAR
    layout = dims if kind is EnvKind.GRID else (1, dims[0])
    chars = _grid_rows(lines[1:], layout, allowed).reshape(env.shape)

    target = chars == SHAPE_TARGET_CHAR
    if np.any(target & env.obstacles):
        raise ShapeMismatchError("Overlay marks target cells on obstacles")
    if np.any((chars == ENV_OBSTACLE_CHAR) & ~env.obstacles):
        raise ShapeMismatchError("Overlay marks obstacles on free cells")

    return np.array([target[c] for c in env.coords], dtype=bool)


def load_overlay(path, env):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise EnvironmentFormatError(f"Cannot read shape file {path}: {e}") from e
    return parse_overlay(text, env)


def format_overlay(mask, env):
    """Inverse of parse_overlay"""
    grid = env.to_array(np.where(mask, SHAPE_TARGET_CHAR, ENV_FREE_CHAR), fill=ENV_OBSTACLE_CHAR)
    if env.kind is EnvKind.LINE:
        return f"line {env.shape[0]}\n" + ''.join(grid) + '\n'
    rows = [''.join(row) for row in grid]
    return f"grid {env.shape[0]} {env.shape[1]}\n" + '\n'.join(rows) + '\n'

"""Polynomial attractor design, matrix assembly and local kernel extraction"""
import logging
import weakref
from dataclasses import dataclass, field
from enum import Enum

import networkx as nx
import numpy as np
from numpy.polynomial import polynomial as poly
from scipy import sparse
from scipy.optimize import linprog

from ..utils.constants import (
    ASSEMBLY_TOL,
    AUTO_EPSILON,
    DEFAULT_BETA,
    DEFAULT_EPSILON,
    DENSIFY_FILL,
    DESIGN_CONSTRAINT_TOL,
    KERNEL_MATCH_TOL,
    LP_FEASIBILITY_TOL,
    LP_MARGIN,
)
from .errors import (
    AssemblyError,
    DegenerateSpectrumError,
    InfeasibleDesignError,
    InputError,
    KernelExtractionError,
    NumericalError,
)
from .spectral import NormalizationMode

logger = logging.getLogger(__name__)

# Eigenvalues closer than this to the target cannot be separated
_COINCIDENT_EIGENVALUES = 1e-12


class DesignMethod(str, Enum):
    CLOSED_FORM = 'closed_form'
    OPTIMIZED = 'optimized'
    FIRST_ORDER = 'first_order'


@dataclass(frozen=True)
class PolynomialDesign:
    """f(u) = 1 + kappa_1 u + ... + kappa_r u^r, applied as f(P - lambda_a I).

    ``achieved_gap`` is the largest f(lambda_i - lambda_a) over i != a;
    the attractor converges when it stays below one.
    """
    target: int
    coefficients: tuple
    beta: float
    epsilon: float
    delta: float
    achieved_gap: float
    method: DesignMethod

    @property
    def order(self):
        return len(self.coefficients)

    def evaluate(self, u):
        return poly.polyval(np.asarray(u, dtype=float), (1.0, *self.coefficients))

    def spectral_map(self, basis):
        """f(lambda_i - lambda_a) for every harmonic i"""
        return self.evaluate(basis.eigenvalues - basis.eigenvalues[self.target])

    def satisfies_constraints(self, basis, tol=DESIGN_CONSTRAINT_TOL):
        values = np.delete(self.spectral_map(basis), self.target)
        return bool(np.all(values >= -self.beta - tol) and np.all(values <= 1.0 - self.epsilon + tol))

    def eigen_gap(self, basis):
        values = np.delete(self.spectral_map(basis), self.target)
        return 1.0 - float(np.max(np.abs(values))) if values.size else 1.0


def _check_target(basis, a):
    if not 0 <= a < basis.n:
        raise InputError(f"Harmonic index {a} outside 0..{basis.n - 1}")


def _offsets_from_target(basis, a):
    """(u_i for i != a, Delta_a)"""
    u = np.delete(basis.eigenvalues - basis.eigenvalues[a], a)
    if u.size == 0:
        raise DegenerateSpectrumError("A single-state chain has no other harmonics to suppress")
    delta = float(np.max(np.abs(u)))
    if delta == 0.0:
        raise DegenerateSpectrumError(f"All eigenvalues equal lambda_{a}")
    return u, delta


def _check_beta(beta, upper_inclusive):
    ok = -1.0 < beta <= 1.0 if upper_inclusive else -1.0 < beta < 1.0
    if not ok:
        raise InputError(f"beta={beta} outside the allowed range")


def _finish(a, coefficients, beta, epsilon, delta, method, basis):
    design = PolynomialDesign(
        target=a,
        coefficients=tuple(float(k) for k in coefficients),
        beta=float(beta),
        epsilon=float(epsilon),
        delta=delta,
        achieved_gap=0.0,
        method=method,
    )
    others = np.delete(design.spectral_map(basis), a)
    achieved = float(np.max(others))
    if method is not DesignMethod.OPTIMIZED:
        # Closed forms have no epsilon of their own, record the realized margin
        epsilon = 1.0 - achieved
    design = PolynomialDesign(
        target=a,
        coefficients=design.coefficients,
        beta=design.beta,
        epsilon=float(epsilon),
        delta=delta,
        achieved_gap=achieved,
        method=method,
    )
    logger.info("Designed %s order-%d attractor for harmonic %d: gap %.6g, kappa=%s",
                method.value, design.order, a, achieved,
                ', '.join(f"{k:.6g}" for k in design.coefficients))
    return design


def design_closed_form(basis, a, order, beta):
    """Closed-form even polynomial of order 2 or 4 with parameter |beta| < 1"""
    _check_target(basis, a)
    _check_beta(beta, upper_inclusive=False)
    _, delta = _offsets_from_target(basis, a)

    scale = beta + 1.0
    if order == 2:
        coefficients = (0.0, -scale / delta ** 2)
    elif order == 4:
        coefficients = (0.0, -3.0 * scale / delta ** 2, 0.0, 2.0 * scale / delta ** 4)
    else:
        raise InputError(f"Closed-form designs exist for order 2 or 4, not {order}")
    return _finish(a, coefficients, beta, 0.0, delta, DesignMethod.CLOSED_FORM, basis)


def design_first_order(basis):
    """f(u) = 1 + u on the steady state, i.e. the transition matrix itself"""
    _, delta = _offsets_from_target(basis, 0)
    return _finish(0, (1.0,), 1.0, 0.0, delta, DesignMethod.FIRST_ORDER, basis)


def adaptive_epsilon(basis, a, beta=DEFAULT_BETA, cap=DEFAULT_EPSILON):
    """Largest epsilon <= cap for which an order >= 2 design surely exists.

    f(u) = 1 - (1 + beta) u^2 / Delta^2 stays within [-beta, 1 - epsilon]
    whenever epsilon <= (1 + beta) (d_min / Delta)^2; half of that leaves
    room for the LP margin.
    """
    _check_target(basis, a)
    u, delta = _offsets_from_target(basis, a)
    d_min = float(np.min(np.abs(u)))
    return min(cap, 0.5 * (1.0 + beta) * (d_min / delta) ** 2)


def design_optimized(basis, a, order, beta=DEFAULT_BETA, epsilon=DEFAULT_EPSILON):
    """Minimize max_{i != a} f(lambda_i - lambda_a) subject to -beta <= f <= 1 - epsilon.

    Solved as a linear program in (kappa, t) over the scaled variable
    u / Delta so the power columns stay within [-1, 1].
    """
    _check_target(basis, a)
    _check_beta(beta, upper_inclusive=True)
    if order < 1:
        raise InputError(f"Polynomial order must be positive, got {order}")
    if not 0.0 < epsilon < 1.0:
        raise InputError(f"epsilon={epsilon} must lie in (0, 1)")

    u, delta = _offsets_from_target(basis, a)
    if np.min(np.abs(u)) < _COINCIDENT_EIGENVALUES:
        raise DegenerateSpectrumError(f"lambda_{a} is repeated; it cannot be singled out")

    x = u / delta
    powers = np.column_stack([x ** k for k in range(1, order + 1)])
    m = len(x)
    ones = np.ones((m, 1))
    zeros = np.zeros((m, 1))

    # variables: scaled kappa_1..kappa_r, t
    a_ub = np.vstack([
        np.hstack([powers, -ones]),      # f <= t
        np.hstack([powers, zeros]),      # f <= 1 - epsilon
        np.hstack([-powers, zeros]),     # f >= -beta
    ])
    b_ub = np.concatenate([
        -np.ones(m),
        np.full(m, -epsilon - LP_MARGIN),
        np.full(m, 1.0 + beta - LP_MARGIN),
    ])
    cost = np.zeros(order + 1)
    cost[-1] = 1.0

    result = linprog(
        cost,
        A_ub=a_ub,
        b_ub=b_ub,
        bounds=[(None, None)] * (order + 1),
        method='highs',
        options={
            'primal_feasibility_tolerance': LP_FEASIBILITY_TOL,
            'dual_feasibility_tolerance': LP_FEASIBILITY_TOL,
        },
    )
    if result.status == 2:
        raise InfeasibleDesignError(
            f"No order-{order} polynomial keeps every other harmonic of {a} within "
            f"[{-beta}, {1 - epsilon}]; try a larger order or a smaller epsilon"
        )
    if result.status != 0:
        raise NumericalError(f"Attractor design LP failed: {result.message}")

    coefficients = result.x[:order] / delta ** np.arange(1, order + 1)
    design = _finish(a, coefficients, beta, epsilon, delta, DesignMethod.OPTIMIZED, basis)
    if not design.satisfies_constraints(basis):
        raise NumericalError("LP solution violates the design box beyond tolerance")
    return design


def design_polynomial(basis, a, method=DesignMethod.OPTIMIZED, order=4,
                      beta=DEFAULT_BETA, epsilon=DEFAULT_EPSILON):
    """Dispatch on design method; ``epsilon='auto'`` uses adaptive_epsilon"""
    method = DesignMethod(method)
    if method is DesignMethod.FIRST_ORDER:
        if a != 0:
            raise InputError("The first-order design only targets the steady state")
        return design_first_order(basis)
    if method is DesignMethod.CLOSED_FORM:
        return design_closed_form(basis, a, order, beta)
    if epsilon == AUTO_EPSILON:
        epsilon = adaptive_epsilon(basis, a, beta)
        logger.info("Adaptive epsilon for harmonic %d: %.3g", a, epsilon)
    return design_optimized(basis, a, order, beta, float(epsilon))


@dataclass(frozen=True, eq=False)
class AttractorMatrix:
    """M_a = f(P - lambda_a I); dense ndarray or scipy sparse csr_array"""
    matrix: object
    design: PolynomialDesign
    eigenvalue_map: np.ndarray
    eigen_gap: float

    @property
    def target(self):
        return self.design.target

    @property
    def radius(self):
        return self.design.order

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def n(self):
        return self.matrix.shape[0]

    def toarray(self):
        return self.matrix.toarray() if sparse.issparse(self.matrix) else np.asarray(self.matrix)

    def __matmul__(self, other):
        return self.matrix @ other


def assemble_matrix(P, basis, design):
    """Evaluate the design polynomial on P - lambda_a I by Horner's rule"""
    base = P.matrix if hasattr(P, 'matrix') else P
    base = sparse.csr_array(base)
    n = base.shape[0]
    identity = sparse.csr_array(sparse.identity(n))
    shifted = base - basis.eigenvalues[design.target] * identity

    coefficients = design.coefficients
    acc = coefficients[-1] * identity
    for kappa in reversed(coefficients[:-1]):
        acc = acc @ shifted + kappa * identity
    matrix = sparse.csr_array(acc @ shifted + identity)
    matrix.eliminate_zeros()

    if matrix.nnz > DENSIFY_FILL * n * n:
        matrix = matrix.toarray()

    mapped = design.spectral_map(basis)
    vectors = basis.harmonics(NormalizationMode.MAXABS)
    residual = np.abs(matrix @ vectors - vectors * mapped).max(axis=0)
    worst = float(residual.max())
    if not np.isfinite(worst) or worst > ASSEMBLY_TOL * max(1.0, float(np.abs(mapped).max())):
        raise AssemblyError(f"Assembled matrix misses its spectral map by {worst:.3g}")

    others = np.delete(mapped, design.target)
    gap = 1.0 - float(np.max(np.abs(others))) if others.size else 1.0
    if gap <= 0:
        logger.warning("Attractor for harmonic %d is not contracting (gap %.3g)", design.target, gap)
    return AttractorMatrix(matrix=matrix, design=design, eigenvalue_map=mapped, eigen_gap=gap)


@dataclass(frozen=True, eq=False)
class KernelTable:
    """Per-cell local update rules of an attractor matrix.

    ``generic`` maps a relative offset to the weight used by every interior
    cell; ``boundary`` holds the full kernel of each cell within reach of a
    border or obstacle. Offsets point from the robot's cell to the
    destination cell.
    """
    generic: dict
    boundary: dict
    radius: int
    _lookup: weakref.WeakKeyDictionary = field(default_factory=weakref.WeakKeyDictionary, repr=False)

    def kernel_for(self, cell):
        return self.boundary.get(cell, self.generic)

    def is_boundary(self, cell):
        return cell in self.boundary

    def to_matrix(self, env):
        """Rebuild the n x n matrix these kernels encode"""
        matrix = np.zeros((env.n, env.n))
        for j in range(env.n):
            for offset, value in self.kernel_for(j).items():
                i = env.shifted(j, offset)
                if i is None:
                    raise KernelExtractionError(f"Kernel of cell {j} reaches outside free space at {offset}")
                matrix[i, j] = value
        return matrix

    def lookup(self, env):
        """Dense ``matrix[dest, src]`` table, cached while ``env`` is alive"""
        table = self._lookup.get(env)
        if table is None:
            table = self._lookup[env] = self.to_matrix(env)
        return table


def _column_kernel(env, column, j):
    rows = np.flatnonzero(column)
    return {env.offset(j, i): float(column[i]) for i in rows}


def _same_kernel(kernel, reference, scale):
    keys = set(kernel) | set(reference)
    return all(abs(kernel.get(k, 0.0) - reference.get(k, 0.0)) <= KERNEL_MATCH_TOL * scale for k in keys)


def extract_kernels(env, attractor):
    """Split an attractor matrix into a generic kernel and boundary kernels.

    A column of f(P - lambda I) of order r depends on the chain columns
    within r - 1 hops, so a cell is boundary-classified when an irregular
    cell (one missing a neighbour) lies within r - 1 hops of it.
    """
    matrix = attractor.toarray()
    if matrix.shape != (env.n, env.n):
        raise KernelExtractionError(f"Matrix of size {matrix.shape} does not fit {env.n} cells")
    radius = attractor.radius

    irregular = env.irregular_cells()
    if irregular:
        near = nx.multi_source_dijkstra_path_length(env.graph, irregular, cutoff=radius - 1)
        boundary_cells = set(near)
    else:
        boundary_cells = set()

    kernels = [_column_kernel(env, matrix[:, j], j) for j in range(env.n)]
    for j, kernel in enumerate(kernels):
        reach = max((max(abs(d) for d in offset) for offset in kernel), default=0)
        if reach > radius:
            raise KernelExtractionError(f"Cell {j} has weight {reach} cells away, beyond radius {radius}")

    interior = [j for j in range(env.n) if j not in boundary_cells]
    generic = kernels[interior[0]] if interior else {}
    scale = max(1.0, max((abs(v) for v in generic.values()), default=0.0))
    for j in interior:
        if not _same_kernel(kernels[j], generic, scale):
            raise KernelExtractionError(f"Interior cell {j} does not share the generic kernel")

    boundary = {j: kernels[j] for j in sorted(boundary_cells)}
    logger.debug("Extracted kernels: %d interior, %d boundary cells (radius %d)",
                 len(interior), len(boundary), radius)
    return KernelTable(generic=generic, boundary=boundary, radius=radius)


def format_kernel_table(table, design, env):
    """Plain-text dump of a kernel table; harmonic numbers are 1-based"""
    lines = [
        f"target = {design.target + 1}",
        f"method = {design.method.value}",
        f"order = {design.order}",
        f"beta = {design.beta:.17g}",
        f"epsilon = {design.epsilon:.17g}",
        f"kappa = {' '.join(f'{k:.17g}' for k in design.coefficients)}",
        f"achieved_gap = {design.achieved_gap:.17g}",
        f"radius = {table.radius}",
        '',
        '[generic]',
    ]
    lines += [f"{' '.join(map(str, offset))} {value:.17g}" for offset, value in sorted(table.generic.items())]
    for cell, kernel in table.boundary.items():
        lines += ['', f"[boundary {' '.join(map(str, env.coord_of(cell)))}]"]
        lines += [f"{' '.join(map(str, offset))} {value:.17g}" for offset, value in sorted(kernel.items())]
    return '\n'.join(lines) + '\n'

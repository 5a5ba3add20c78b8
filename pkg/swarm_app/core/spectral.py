"""Eigen-decomposition of transition matrices into ordered harmonics"""
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
import pandas as pd
from scipy import linalg

from ..utils.constants import EIGEN_RESIDUAL_TOL, REALNESS_TOL, TIE_DECIMALS
from .errors import (
    ComplexSpectrumError,
    DegenerateInputError,
    NonDiagonalizableError,
    NumericalError,
)

logger = logging.getLogger(__name__)

# Beyond this the right-vector matrix is numerically singular
_SINGULAR_CONDITION = 1e14


class NormalizationMode(str, Enum):
    L1 = 'l1'
    L2 = 'l2'
    MAXABS = 'maxabs'


def normalize(v, mode=NormalizationMode.L2):
    """Scale ``v`` to unit norm; dividing by a positive scale keeps the sign convention"""
    v = np.asarray(v, dtype=float)
    mode = NormalizationMode(mode)
    if mode is NormalizationMode.L1:
        scale = np.abs(v).sum()
    elif mode is NormalizationMode.L2:
        scale = np.linalg.norm(v)
    else:
        scale = np.abs(v).max() if v.size else 0.0
    if not np.isfinite(scale) or scale == 0.0:
        raise DegenerateInputError("Cannot normalize a zero or non-finite vector")
    return v / scale


def fix_sign(v):
    """Flip ``v`` so its largest-magnitude entry (first one on ties) is positive"""
    mags = np.abs(v)
    top = np.flatnonzero(mags >= mags.max() * (1.0 - 1e-9))[0]
    return -v if v[top] < 0 else v


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """Right eigenvectors ``right[:, i]`` (pi_i) and left eigenvectors ``left[:, i]`` (phi_i).

    Eigenpairs are sorted by descending |lambda|, then descending lambda,
    then solver order. The left vectors satisfy ``left.T @ right == I``.
    """
    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    order: np.ndarray
    condition_number: float
    normalization: NormalizationMode

    @property
    def n(self):
        return len(self.eigenvalues)

    def harmonic(self, index, mode=None):
        """Right eigenvector ``index`` in the requested normalization"""
        vector = self.right[:, index]
        return vector if mode is None else normalize(vector, mode)

    def harmonics(self, mode=None):
        """All right eigenvectors as columns"""
        if mode is None:
            return self.right
        return np.column_stack([self.harmonic(i, mode) for i in range(self.n)])

    def steady_state(self):
        """pi_1 as a probability vector"""
        pi = normalize(self.right[:, 0], NormalizationMode.L1)
        if np.any(pi <= 0):
            raise NumericalError("Leading eigenvector is not strictly positive; is the chain irreducible?")
        return pi

    def to_frame(self, mode=None):
        """One row per harmonic (1-based) with its eigenvalue and entries"""
        vectors = self.harmonics(mode)
        frame = pd.DataFrame(vectors.T, columns=[f"cell_{j}" for j in range(self.n)])
        frame.insert(0, 'eigenvalue', self.eigenvalues)
        frame.insert(0, 'harmonic', np.arange(1, self.n + 1))
        return frame


def _sort_order(values):
    magnitude = np.round(-np.abs(values), TIE_DECIMALS)
    signed = np.round(-values, TIE_DECIMALS)
    # lexsort: last key is the primary one
    return np.lexsort((np.arange(len(values)), signed, magnitude))


def decompose(P, normalization=NormalizationMode.L1, realness_tol=REALNESS_TOL):
    """Full eigen-decomposition of a transition matrix.

    Args:
        P: TransitionMatrix, scipy sparse array or dense array
        normalization: norm applied to every right eigenvector
        realness_tol: largest imaginary part accepted from the solver

    Returns:
        SpectralBasis
    """
    matrix = P.toarray() if hasattr(P, 'toarray') else np.asarray(P, dtype=float)
    normalization = NormalizationMode(normalization)

    values, vectors = linalg.eig(matrix)
    worst_imag = np.max(np.abs(values.imag))
    if worst_imag > realness_tol:
        raise ComplexSpectrumError(
            f"Eigenvalue with imaginary part {worst_imag:.3g} exceeds tolerance {realness_tol:.1g}"
        )

    order = _sort_order(values.real)
    eigenvalues = values.real[order]
    right = np.column_stack([
        normalize(fix_sign(vectors[:, k].real), normalization) for k in order
    ])

    condition_number = float(np.linalg.cond(right))
    if not np.isfinite(condition_number) or condition_number > _SINGULAR_CONDITION:
        raise NonDiagonalizableError(f"Eigenvector matrix is singular (condition {condition_number:.3g})")
    try:
        left = linalg.inv(right).T
    except linalg.LinAlgError as e:
        raise NonDiagonalizableError("Eigenvector matrix cannot be inverted") from e

    right_residual = np.abs(matrix @ right - right * eigenvalues).max(axis=0)
    left_residual = np.abs(matrix.T @ left - left * eigenvalues).max(axis=0)
    left_scale = np.maximum(1.0, np.abs(left).max(axis=0))
    if np.any(right_residual > EIGEN_RESIDUAL_TOL) or np.any(left_residual > EIGEN_RESIDUAL_TOL * left_scale):
        raise NonDiagonalizableError(
            f"Eigenpair residual blow-up (right {right_residual.max():.3g}, left {left_residual.max():.3g})"
        )

    logger.info("Decomposed %d-state chain, eigenvector condition number %.3g",
                len(eigenvalues), condition_number)
    return SpectralBasis(
        eigenvalues=eigenvalues,
        right=right,
        left=left,
        order=order,
        condition_number=condition_number,
        normalization=normalization,
    )


def steady_state(basis):
    return basis.steady_state()

"""Dense complex linear-algebra kernels with explicit numeric contracts.

Factorizations are backed by LAPACK through numpy/scipy; what this module
owns are the contracts: ascending Hermitian eigenvalues with orthonormal
vectors (reconstruction residual <= 1e-9 * ||A||_F), descending singular
values, Cholesky-reduced generalized eigenproblems with a positive-definite
metric, an exact maximum-trace assignment, and a seeded PSD sampler whose
stream is fixed by the recipe in rng.py (same seed, same bytes).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .errors import DimensionError, IllConditionedMetricError, NumericError
from .groups import Permutation
from .rng import normal_rows

#: Matrices flow through the toolkit as 2-d complex128 numpy arrays.
CMatrix = np.ndarray

HERM_CHECK_TOL = 1e-8  # allowed relative asymmetry of "Hermitian" inputs


def as_cmatrix(a, square: bool = False) -> np.ndarray:
    """Validate and convert to a 2-d finite complex128 array."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionError(f"expected a non-empty 2-d matrix, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise NumericError("matrix has non-finite entries")
    return arr


def _check_hermitian(a: np.ndarray) -> np.ndarray:
    """Reject asymmetry beyond tolerance, then symmetrize exactly."""
    scale = float(np.max(np.abs(a)))
    asym = float(np.max(np.abs(a - a.conj().T)))
    if asym > HERM_CHECK_TOL * max(scale, 1e-300):
        raise NumericError(
            f"input is not Hermitian: max asymmetry {asym:.3e} vs scale {scale:.3e}"
        )
    return (a + a.conj().T) / 2.0


@dataclass(frozen=True)
class HermEigResult:
    """Eigenvalues in ascending order; vectors[:, k] belongs to values[k]."""

    values: np.ndarray
    vectors: np.ndarray


def herm_eig(a) -> HermEigResult:
    """Full eigendecomposition of a Hermitian matrix (symmetrized internally)."""
    arr = as_cmatrix(a, square=True)
    herm = _check_hermitian(arr)
    values, vectors = np.linalg.eigh(herm)
    return HermEigResult(values, vectors)


def svd_singular_values(a) -> np.ndarray:
    """Singular values in descending order (any rectangular matrix)."""
    arr = as_cmatrix(a)
    return np.linalg.svd(arr, compute_uv=False)


def kron(a, b) -> np.ndarray:
    """Kronecker product, (i1*rows(b)+i2, j1*cols(b)+j2) indexing."""
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def gevp_min(m, g) -> tuple:
    """Smallest eigenpair of M c = lambda G c for Hermitian M and PD G.

    Reduces through the Cholesky factor of G to a standard Hermitian
    problem; the returned c satisfies c* G c = 1 and carries a canonical
    phase (largest-magnitude entry real positive).
    """
    m_arr = _check_hermitian(as_cmatrix(m, square=True))
    g_arr = _check_hermitian(as_cmatrix(g, square=True))
    if m_arr.shape != g_arr.shape:
        raise DimensionError("M and G must have identical shapes")
    g_scale = float(np.max(np.abs(g_arr)))
    g_evals = np.linalg.eigvalsh(g_arr)
    if g_evals[0] <= 1e-12 * max(g_scale, 1e-300):
        raise IllConditionedMetricError(
            f"metric is singular at tolerance: min eig {g_evals[0]:.3e}"
        )
    chol = np.linalg.cholesky(g_arr)
    half = scipy.linalg.solve_triangular(chol, m_arr, lower=True)
    reduced = scipy.linalg.solve_triangular(chol, half.conj().T, lower=True).conj().T
    reduced = (reduced + reduced.conj().T) / 2.0
    values, vectors = np.linalg.eigh(reduced)
    c = scipy.linalg.solve_triangular(chol.conj().T, vectors[:, 0], lower=False)
    peak = int(np.argmax(np.abs(c)))
    phase = c[peak] / abs(c[peak]) if abs(c[peak]) > 0 else 1.0
    return float(values[0]), c / phase


def hungarian_max(s) -> tuple:
    """Exact assignment maximizing sum_i S[perm(i), i]; returns (perm, score).

    Equivalently the permutation matrix P maximizing tr(P^T S).
    """
    arr = as_cmatrix(s, square=True)
    if np.max(np.abs(arr.imag)) != 0.0:
        raise NumericError("assignment scores must be real")
    score_matrix = arr.real
    rows, cols = linear_sum_assignment(score_matrix, maximize=True)
    images = np.empty(arr.shape[0], dtype=np.int64)
    images[cols] = rows  # column i is assigned row perm(i)
    return Permutation(images), float(score_matrix[rows, cols].sum())


def random_psd(degree: int, seed: int) -> np.ndarray:
    """Seeded Hermitian PSD sample A A* from i.i.d. standard complex
    Gaussian entries; deterministic per the documented stream."""
    if degree < 1:
        raise DimensionError("degree must be >= 1")
    z = normal_rows(seed, degree, 2 * degree)
    a = (z[:, 0::2] + 1j * z[:, 1::2]) / np.sqrt(2.0)
    h = a @ a.conj().T
    return (h + h.conj().T) / 2.0

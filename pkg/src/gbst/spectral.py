"""Transforms from Laplacian eigendecomposition, and separable block application.

The transform associated with a line-graph Laplacian is its orthonormal
eigenvector matrix, with columns ordered by ascending eigenvalue (lowest
frequency first).  Signs are fixed so that in every column the first
entry of magnitude above 1e-12 is positive; all cross-implementation and
flip/scale comparisons in this package rely on that canonical form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DecompositionError, DimensionMismatchError
from .graph import LineGraphLaplacian

SIGN_EPS = 1e-12
EIGENVALUE_GAP_MIN = 1e-12


@dataclass(frozen=True)
class TransformMatrix:
    """Orthonormal basis: column k of ``basis`` is the k-th basis vector.

    ``eigenvalues`` is ascending; entry k belongs to column k.
    """

    size: int
    basis: np.ndarray
    eigenvalues: np.ndarray

    def __post_init__(self):
        self.basis.setflags(write=False)
        self.eigenvalues.setflags(write=False)


def canonical_signs(basis: np.ndarray) -> np.ndarray:
    """Flip columns so the first entry with |.| > 1e-12 is positive."""
    out = basis.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        nz = np.nonzero(np.abs(col) > SIGN_EPS)[0]
        if nz.size and col[nz[0]] < 0:
            out[:, k] = -col
    return out


def derive_gbt(lap: LineGraphLaplacian) -> TransformMatrix:
    """Eigendecompose the tridiagonal Laplacian into an orthonormal transform.

    Raises DecompositionError if the solver fails or the spectrum is not
    simple (adjacent eigenvalue gap <= 1e-12); degenerate spectra would
    make the basis non-unique and are never silently accepted.
    """
    try:
        vals, vecs = eigh_tridiagonal(lap.diagonal, lap.off_diagonal)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise DecompositionError(f"tridiagonal eigensolver failed: {exc}") from exc
    if np.any(np.diff(vals) <= EIGENVALUE_GAP_MIN):
        raise DecompositionError(
            f"degenerate spectrum: minimum eigenvalue gap {np.diff(vals).min():.3e}"
        )
    # clamp roundoff-negative zeros; anything materially negative is a failure
    floor = -1e-9 * max(1.0, float(np.abs(lap.diagonal).max()))
    if vals[0] < floor:
        raise DecompositionError(f"negative eigenvalue {vals[0]:.3e} from a PSD Laplacian")
    vals = np.maximum(vals, 0.0)
    return TransformMatrix(size=lap.size, basis=canonical_signs(vecs), eigenvalues=vals)


def apply_separable(block: np.ndarray, row_t: TransformMatrix, col_t: TransformMatrix) -> np.ndarray:
    """Forward separable transform: U_col^T X U_row."""
    block = np.asarray(block, dtype=float)
    if block.shape != (col_t.size, row_t.size) or row_t.size != col_t.size:
        raise DimensionMismatchError(
            f"block {block.shape} vs transforms ({col_t.size}, {row_t.size})"
        )
    return col_t.basis.T @ block @ row_t.basis


def inverse_separable(coeffs: np.ndarray, row_t: TransformMatrix, col_t: TransformMatrix) -> np.ndarray:
    """Inverse of apply_separable: U_col Xhat U_row^T."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (col_t.size, row_t.size) or row_t.size != col_t.size:
        raise DimensionMismatchError(
            f"coefficients {coeffs.shape} vs transforms ({col_t.size}, {row_t.size})"
        )
    return col_t.basis @ coeffs @ row_t.basis.T


def basis_dump(t: TransformMatrix, header: str) -> str:
    """Basis dump: header line, then N rows (sample index) x N columns (basis index)."""
    from .graph import matrix_text

    return header + "\n" + matrix_text(t.basis)


def gbt_dump(t: TransformMatrix, lap: LineGraphLaplacian) -> str:
    """Dump with the standard graph-transform header."""
    p = lap.params
    header = (
        f"GBT N={t.size} family={p.family.value} "
        f"w={p.edge_weight:.17g} v={p.vertex_weight:.17g}"
    )
    return basis_dump(t, header)

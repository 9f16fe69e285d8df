"""Desk-scale evaluation: GMRF sampling, coding metrics, sweeps, integer tables.

Random numbers come from a Philox 64-bit counter-based generator with
Gaussian variates produced by Box-Muller on its uniform stream, so the
sample sequence for a given seed is reproducible across platforms and
implementations that follow the same recipe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky_banded, solve_banded

from .dataset import ResidualDataset
from .errors import (
    DimensionMismatchError,
    IntegerOverflowError,
    InvalidParameterError,
    NonPositiveDefiniteError,
)
from .estimation import SampleCovariance, logdet_tridiagonal, residual_covariances
from .graph import GraphFamily, GraphParams, LineGraphLaplacian, build_ggl, dense_form
from .spectral import TransformMatrix, apply_separable, derive_gbt, inverse_separable


@dataclass(frozen=True)
class GMRFModel:
    """Zero-mean Gaussian with the line-graph Laplacian as precision matrix."""

    precision: LineGraphLaplacian
    seed: int

    def __post_init__(self):
        # pivot recurrence doubles as the positive-definiteness check
        logdet_tridiagonal(self.precision.diagonal, self.precision.off_diagonal)


@dataclass(frozen=True)
class IntTransformMatrix:
    """Codec-style integer table: row k holds basis vector k scaled by 64*sqrt(N)."""

    size: int
    entries: np.ndarray  # (N, N) int
    scale_shift: float  # log2 of the nominal scale, 6 + log2(N)/2

    def __post_init__(self):
        self.entries.setflags(write=False)


@dataclass(frozen=True)
class CodingMetrics:
    coding_gain_db: float
    energy_compaction: float
    entropy_proxy_bits: float


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to nearest integer, ties away from zero (not banker's)."""
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def _box_muller(gen: np.random.Generator, count: int) -> np.ndarray:
    pairs = (count + 1) // 2
    u1 = 1.0 - gen.random(pairs)  # in (0, 1], keeps the log finite
    u2 = gen.random(pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty(2 * pairs)
    z[0::2] = r * np.cos(2.0 * np.pi * u2)
    z[1::2] = r * np.sin(2.0 * np.pi * u2)
    return z[:count]


def _chol_band(lap: LineGraphLaplacian) -> np.ndarray:
    ab = np.zeros((2, lap.size))
    ab[0, 1:] = lap.off_diagonal
    ab[1] = lap.diagonal
    try:
        return cholesky_banded(ab, lower=False)
    except np.linalg.LinAlgError as exc:
        raise NonPositiveDefiniteError(str(exc)) from exc


def sample_gmrf(model: GMRFModel, count: int, chunk: int = 1 << 15) -> np.ndarray:
    """Draw ``count`` vectors x ~ N(0, L^{-1}) as rows of a (count, N) array.

    Uses the banded Cholesky L = R^T R and solves R x = g for standard
    normal g, so cov(x) = R^{-1} R^{-T} = L^{-1}.
    """
    if count < 1:
        raise InvalidParameterError(f"count must be >= 1, got {count}")
    n = model.precision.size
    rb = _chol_band(model.precision)
    gen = np.random.Generator(np.random.Philox(model.seed))
    out = np.empty((count, n))
    for start in range(0, count, chunk):
        stop = min(start + chunk, count)
        g = _box_muller(gen, (stop - start) * n).reshape(stop - start, n)
        out[start:stop] = solve_banded((0, 1), rb, g.T).T
    return out


def sample_covariance(model: GMRFModel, count: int, chunk: int = 1 << 15) -> SampleCovariance:
    """Streaming second-moment matrix of ``count`` GMRF draws."""
    n = model.precision.size
    rb = _chol_band(model.precision)
    gen = np.random.Generator(np.random.Philox(model.seed))
    acc = np.zeros((n, n))
    done = 0
    while done < count:
        m = min(chunk, count - done)
        g = _box_muller(gen, m * n).reshape(m, n)
        x = solve_banded((0, 1), rb, g.T).T
        acc += x.T @ x
        done += m
    return SampleCovariance(size=n, matrix=acc / count)


def sample_gmrf_blocks(
    row_precision: LineGraphLaplacian,
    col_precision: LineGraphLaplacian,
    count: int,
    seed: int,
) -> np.ndarray:
    """Matrix-normal blocks whose rows follow the row graph and columns the column graph.

    X = A Z B^T with A^T A-style factors from the two precisions; row and
    column second moments come out proportional to the respective inverse
    Laplacians, which is all the ratio-based learning needs.
    """
    if row_precision.size != col_precision.size:
        raise DimensionMismatchError("row and column graphs must share N")
    n = row_precision.size
    rb_row = _chol_band(row_precision)
    rb_col = _chol_band(col_precision)
    gen = np.random.Generator(np.random.Philox(seed))
    z = _box_muller(gen, count * n * n).reshape(count * n, n)
    # right-multiply by B^T where B solves the row precision
    zb = solve_banded((0, 1), rb_row, z.T).T.reshape(count, n, n)
    # left-multiply by A per block: A y = z with the column precision factor
    out = solve_banded((0, 1), rb_col, zb.transpose(1, 0, 2).reshape(n, count * n))
    return out.reshape(n, count, n).transpose(1, 0, 2)


def model_covariance(lap: LineGraphLaplacian) -> SampleCovariance:
    """Exact covariance L^{-1} of the GMRF with precision L."""
    logdet_tridiagonal(lap.diagonal, lap.off_diagonal)
    return SampleCovariance(size=lap.size, matrix=np.linalg.inv(dense_form(lap)))


def _coefficient_variances(t: TransformMatrix, cov: SampleCovariance) -> np.ndarray:
    if t.size != cov.size:
        raise DimensionMismatchError(f"transform N={t.size} vs covariance N={cov.size}")
    try:
        np.linalg.cholesky(cov.matrix)
    except np.linalg.LinAlgError as exc:
        raise NonPositiveDefiniteError("covariance must be positive definite") from exc
    return np.einsum("nk,nm,mk->k", t.basis, cov.matrix, t.basis)


def transform_coding_gain(t: TransformMatrix, cov: SampleCovariance) -> float:
    """Arithmetic-to-geometric mean ratio of coefficient variances, in dB."""
    d = _coefficient_variances(t, cov)
    n = t.size
    return 10.0 * math.log10((np.trace(cov.matrix) / n) / math.exp(np.log(d).mean()))


def evaluate_metrics(t: TransformMatrix, cov: SampleCovariance, k: int | None = None) -> CodingMetrics:
    """Coding gain, energy fraction in the lowest k coefficients, entropy proxy.

    The entropy proxy is the mean Gaussian differential entropy of the
    coefficient variances in bits; it orders transforms the same way the
    geometric mean does.
    """
    d = _coefficient_variances(t, cov)
    n = t.size
    if k is None:
        k = max(1, n // 4)
    gain = 10.0 * math.log10((np.trace(cov.matrix) / n) / math.exp(np.log(d).mean()))
    compaction = float(d[:k].sum() / d.sum())
    entropy = float(0.5 * np.log2(2.0 * np.pi * np.e * d).mean())
    return CodingMetrics(
        coding_gain_db=gain, energy_compaction=compaction, entropy_proxy_bits=entropy
    )


def alpha_sweep(
    source,
    n: int,
    family: GraphFamily,
    alphas,
    k: int | None = None,
) -> list[tuple[float, CodingMetrics]]:
    """Metrics of the normalized-graph transform (w=1, v=alpha) per alpha.

    ``source`` may be a SampleCovariance, a GMRFModel (exact covariance is
    used), or a ResidualDataset (row covariance is used).
    """
    alphas = list(alphas)
    if not alphas:
        raise InvalidParameterError("alpha list is empty")
    if isinstance(source, SampleCovariance):
        cov = source
    elif isinstance(source, GMRFModel):
        cov = model_covariance(source.precision)
    elif isinstance(source, ResidualDataset):
        cov, _ = residual_covariances(source)
    else:
        raise InvalidParameterError(f"unsupported sweep source {type(source).__name__}")
    rows = []
    for alpha in alphas:
        t = derive_gbt(build_ggl(GraphParams(1.0, float(alpha), family), n))
        rows.append((float(alpha), evaluate_metrics(t, cov, k)))
    return rows


def sweep_csv(rows: list[tuple[float, CodingMetrics]]) -> str:
    lines = ["alpha,coding_gain_db,energy_compaction,entropy_bits"]
    for alpha, m in rows:
        lines.append(
            f"{alpha:.17g},{m.coding_gain_db:.17g},"
            f"{m.energy_compaction:.17g},{m.entropy_proxy_bits:.17g}"
        )
    return "\n".join(lines) + "\n"


def integerize(t: TransformMatrix) -> IntTransformMatrix:
    """Scale the basis by 64*sqrt(N) and round, codec table layout.

    Row k of the table is basis vector k.  Any rounded magnitude above
    127 is an error, never a silent clamp.
    """
    scale = 64.0 * math.sqrt(t.size)
    entries = round_half_away(scale * t.basis.T)
    worst = np.abs(entries).max()
    if worst > 127:
        raise IntegerOverflowError(f"entry magnitude {int(worst)} exceeds 127")
    return IntTransformMatrix(
        size=t.size,
        entries=entries.astype(np.int64),
        scale_shift=6.0 + 0.5 * math.log2(t.size),
    )


def int_matrix_text(m: IntTransformMatrix) -> str:
    header = f"INTGBT N={m.size} shift={m.scale_shift:g}"
    body = "\n".join(" ".join(str(int(x)) for x in row) for row in m.entries)
    return header + "\n" + body + "\n"


def quantize_roundtrip_distortion(
    blocks: np.ndarray,
    row_t: TransformMatrix,
    col_t: TransformMatrix,
    step: float,
) -> tuple[float, float]:
    """Transform, uniform-quantize, inverse-transform; MSE and index entropy.

    Quantization is plain rounding half away from zero (no dead zone);
    entropy is the empirical first-order entropy of the integer indices in
    bits per sample.
    """
    if step <= 0:
        raise InvalidParameterError(f"step must be positive, got {step}")
    blocks = np.asarray(blocks, dtype=float)
    if blocks.ndim == 2:
        blocks = blocks[None]
    sq_err = 0.0
    indices = []
    for x in blocks:
        coeffs = apply_separable(x, row_t, col_t)
        q = round_half_away(coeffs / step)
        rec = inverse_separable(q * step, row_t, col_t)
        sq_err += float(((x - rec) ** 2).sum())
        indices.append(q.astype(np.int64).ravel())
    total = blocks.size
    all_idx = np.concatenate(indices)
    _, counts = np.unique(all_idx, return_counts=True)
    p = counts / counts.sum()
    entropy = float(-(p * np.log2(p)).sum())
    return sq_err / total, entropy

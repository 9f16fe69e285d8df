"""Two-parameter line-graph generalized Laplacians.

The model space is a path graph on N vertices with constant edge weight
``w`` and a single self-loop of weight ``v`` placed at one boundary
vertex: at vertex 0 for family L1, at vertex N-1 for family L2.  The
resulting generalized Laplacian is symmetric tridiagonal, so only the
diagonal and the (constant) off-diagonal are stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DegenerateGraphError, InvalidDimensionError, InvalidParameterError

N_MIN = 2
N_MAX = 64


class GraphFamily(Enum):
    """Placement of the single self-loop: L1 at vertex 0, L2 at vertex N-1."""

    L1 = "L1"
    L2 = "L2"


@dataclass(frozen=True)
class GraphParams:
    """The (edge weight, vertex weight, family) triple defining a line graph.

    Both weights must be nonnegative.  Operations that need a positive
    definite Laplacian additionally require both to be strictly positive;
    they check that themselves.
    """

    edge_weight: float
    vertex_weight: float
    family: GraphFamily

    def __post_init__(self):
        if self.edge_weight < 0 or self.vertex_weight < 0:
            raise InvalidParameterError(
                f"graph weights must be nonnegative, got "
                f"w={self.edge_weight}, v={self.vertex_weight}"
            )

    @property
    def is_positive_definite(self) -> bool:
        return self.edge_weight > 0 and self.vertex_weight > 0


@dataclass(frozen=True)
class LineGraphLaplacian:
    """Symmetric tridiagonal generalized Laplacian of a weighted line graph.

    Stored in band form: ``diagonal`` has length N, ``off_diagonal`` has
    length N-1 with every entry equal to ``-w``.  Immutable after
    construction; the arrays are marked read-only.
    """

    size: int
    diagonal: np.ndarray
    off_diagonal: np.ndarray
    params: GraphParams = field(repr=False)

    def __post_init__(self):
        self.diagonal.setflags(write=False)
        self.off_diagonal.setflags(write=False)

    @property
    def self_loop_vertex(self) -> int:
        return 0 if self.params.family is GraphFamily.L1 else self.size - 1


def build_ggl(params: GraphParams, n: int) -> LineGraphLaplacian:
    """Build the tridiagonal Laplacian for the given parameters and size.

    The interior diagonal is 2w, the boundary entries are w, and the
    self-loop weight v is added at vertex 0 (L1) or vertex N-1 (L2).
    """
    if not isinstance(n, (int, np.integer)) or n < N_MIN or n > N_MAX:
        raise InvalidDimensionError(f"size must be an integer in [{N_MIN}, {N_MAX}], got {n}")
    w, v = params.edge_weight, params.vertex_weight
    diag = np.full(n, 2.0 * w)
    diag[0] = w
    diag[-1] = w
    if params.family is GraphFamily.L1:
        diag[0] += v
    else:
        diag[-1] += v
    off = np.full(n - 1, -w)
    return LineGraphLaplacian(size=n, diagonal=diag, off_diagonal=off, params=params)


def normalize_ggl(lap: LineGraphLaplacian) -> LineGraphLaplacian:
    """Divide every entry by the edge weight so the result has w = 1.

    Leaves the eigenvectors (hence the transform) unchanged; only the
    eigenvalues scale.
    """
    w = lap.params.edge_weight
    if w == 0:
        raise DegenerateGraphError("cannot normalize a graph with zero edge weight")
    new = GraphParams(1.0, lap.params.vertex_weight / w, lap.params.family)
    return build_ggl(new, lap.size)


def dense_form(lap: LineGraphLaplacian) -> np.ndarray:
    """Dense N x N matrix with the band laid out on the three main diagonals."""
    m = np.diag(lap.diagonal)
    idx = np.arange(lap.size - 1)
    m[idx, idx + 1] = lap.off_diagonal
    m[idx + 1, idx] = lap.off_diagonal
    return m


def matrix_text(m: np.ndarray) -> str:
    """Row-major text form: one row per line, space-separated, 17 significant digits."""
    return "\n".join(" ".join(f"{x:.17g}" for x in row) for row in np.atleast_2d(m)) + "\n"


def dense_text(lap: LineGraphLaplacian) -> str:
    """Text export of the dense Laplacian."""
    return matrix_text(dense_form(lap))

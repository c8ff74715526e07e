"""Scalar fields on regular 2D pixel grids.

Fields are stored row-major: M rows (height) by N columns (width). The x
axis runs along a row (column index j, spacing dx) and the y axis runs
down a column (row index i, spacing dy). A 1D signal is simply a field
with a single row; its y-direction neighbour sets are empty, which is how
the 1D schemes fall out of the 2D formulas unchanged.

Boundary handling is Neumann (zero normal derivative). For the central
differences that feed the diffusivity this is realized by a one-pixel
mirror reflection about the boundary pixel, u[-1] = u[1]; for the edge
sums of the diffusion operator it is realized by simply truncating the
neighbour sets at the border.
"""
from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

__all__ = ["ScalarField", "linear_index", "grid_index", "neighbors", "mirror_sample"]


class ScalarField:
    """Immutable M x N grid of real intensities plus grid spacings.

    Values are unconstrained finite reals; 8-bit image import maps
    {0..255} to [0,1] but nothing here enforces that range (the extremum
    principle is a provable property of the schemes, not a clamp).
    """

    __slots__ = ("values", "dx", "dy")

    def __init__(self, values: ArrayLike, dx: float = 1.0, dy: float = 1.0):
        arr = np.array(values, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"field must be a nonempty 2D array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("field contains non-finite values")
        if not (dx > 0.0 and dy > 0.0):
            raise ValueError(f"grid spacings must be positive, got dx={dx}, dy={dy}")
        arr.flags.writeable = False
        self.values: NDArray[np.float64] = arr
        self.dx = float(dx)
        self.dy = float(dy)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def as_vector(self) -> NDArray[np.float64]:
        """Row-major flattening, pixel (i,j) at position i*N + j."""
        return self.values.ravel()

    def with_values(self, values: ArrayLike) -> "ScalarField":
        """New field with the same spacings."""
        return ScalarField(values, self.dx, self.dy)

    def __repr__(self) -> str:
        return f"ScalarField({self.height}x{self.width}, dx={self.dx}, dy={self.dy})"


def _dims(field_or_dims) -> tuple[int, int]:
    if isinstance(field_or_dims, ScalarField):
        return field_or_dims.shape
    m, n = field_or_dims
    return int(m), int(n)


def linear_index(i: int, j: int, field_or_dims) -> int:
    """Row-major vector index k = i*N + j of pixel (i, j)."""
    m, n = _dims(field_or_dims)
    if not (0 <= i < m and 0 <= j < n):
        raise IndexError(f"pixel ({i},{j}) outside {m}x{n} grid")
    return i * n + j


def grid_index(k: int, field_or_dims) -> tuple[int, int]:
    """Inverse of linear_index."""
    m, n = _dims(field_or_dims)
    if not (0 <= k < m * n):
        raise IndexError(f"vector index {k} outside 0..{m * n - 1}")
    return divmod(k, n)


def neighbors(i: int, j: int, axis: str, field_or_dims) -> list[tuple[int, int]]:
    """In-grid pixels adjacent to (i, j) along one axis.

    axis "x" steps along the row (j +- 1), axis "y" along the column
    (i +- 1). Boundary pixels get fewer neighbours; a single-row field has
    no y neighbours at all. Returns 0, 1, or 2 pairs.
    """
    m, n = _dims(field_or_dims)
    if not (0 <= i < m and 0 <= j < n):
        raise IndexError(f"pixel ({i},{j}) outside {m}x{n} grid")
    if axis == "x":
        cand = [(i, j - 1), (i, j + 1)]
    elif axis == "y":
        cand = [(i - 1, j), (i + 1, j)]
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    return [(p, q) for p, q in cand if 0 <= p < m and 0 <= q < n]


def mirror_sample(field: ScalarField, i: int, j: int) -> float:
    """Value at (i, j) with one-pixel mirror extension.

    Out-of-range by one reflects about the boundary pixel: u[-1] = u[1]
    and u[M] = u[M-2] (degenerate to a clamp when the axis has a single
    pixel). This makes the discrete normal derivative vanish at the
    border. Overreach beyond one pixel is an error.
    """
    m, n = field.shape
    if not (-1 <= i <= m and -1 <= j <= n):
        raise IndexError(f"index ({i},{j}) overreaches {m}x{n} grid by more than one pixel")
    if i == -1:
        i = 1 if m > 1 else 0
    elif i == m:
        i = m - 2 if m > 1 else 0
    if j == -1:
        j = 1 if n > 1 else 0
    elif j == n:
        j = n - 2 if n > 1 else 0
    return float(field.values[i, j])

"""Total-degree multi-index sets and normalized Hermite polynomials.

The basis functions are products of univariate probabilists' Hermite
polynomials scaled by ``1/sqrt(k!)``, which makes them orthonormal under the
standard Gaussian measure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import comb

import numpy as np

from . import kernels
from .errors import DimensionMismatch


@dataclass(frozen=True, eq=False)
class MultiIndexBasis:
    """Ordered total-degree multi-index set ``{alpha : |alpha| <= p}``.

    Ordering is graded: total degree ascending, and within one degree the
    exponent vectors are listed in descending lexicographic order, so the
    first-order terms come out as ``e_1, ..., e_d``.
    """

    d: int
    p: int
    indices: np.ndarray = field(repr=False)

    def __len__(self):
        return self.indices.shape[0]

    def __eq__(self, other):
        if not isinstance(other, MultiIndexBasis):
            return NotImplemented
        return (self.d, self.p) == (other.d, other.p) and np.array_equal(
            self.indices, other.indices
        )

    def __hash__(self):
        return hash((self.d, self.p, self.indices.tobytes()))

    @property
    def degrees(self):
        return self.indices.sum(axis=1)

    def position(self, alpha):
        """Row number of the multi-index ``alpha``."""
        alpha = np.asarray(alpha)
        hits = np.flatnonzero((self.indices == alpha).all(axis=1))
        if hits.size == 0:
            raise KeyError(tuple(int(a) for a in alpha))
        return int(hits[0])

    def first_order_positions(self):
        """Positions of ``e_1, ..., e_d`` (empty when ``p == 0``)."""
        if self.p == 0:
            return np.zeros(0, dtype=int)
        return np.arange(1, self.d + 1)


def basis_size(d, p):
    return comb(d + p, p)


def enumerate_basis(d, p):
    """Enumerate the total-degree set of dimension ``d`` and degree ``p``.

    Parameters
    ----------
    d : int
        Input dimension, at least 1.
    p : int
        Maximum total degree, at least 0.

    Returns
    -------
    MultiIndexBasis
        ``comb(d + p, p)`` indices; the first one is all zeros.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if p < 0:
        raise ValueError(f"degree must be >= 0, got {p}")
    rows = []
    for degree in range(p + 1):
        for combo in combinations_with_replacement(range(d), degree):
            alpha = [0] * d
            for i in combo:
                alpha[i] += 1
            rows.append(alpha)
    indices = np.array(rows, dtype=np.int64).reshape(len(rows), d)
    indices.setflags(write=False)
    return MultiIndexBasis(d=d, p=p, indices=indices)


def embed_basis(basis, d_new):
    """Zero-pad every index of ``basis`` to dimension ``d_new``.

    Returns the padded ``(P, d_new)`` index array, not a basis.
    """
    if d_new < basis.d:
        raise DimensionMismatch(f"cannot embed d={basis.d} into d={d_new}")
    out = np.zeros((len(basis), d_new), dtype=np.int64)
    out[:, : basis.d] = basis.indices
    return out


def embed_coefficients(basis, coefficients, target):
    """Map coefficients on ``basis`` into ``target`` by zero-padding indices."""
    padded = embed_basis(basis, target.d)
    out = np.zeros(len(target))
    lookup = {tuple(row): k for k, row in enumerate(target.indices.tolist())}
    for row, c in zip(padded.tolist(), coefficients):
        try:
            out[lookup[tuple(row)]] = c
        except KeyError:
            raise DimensionMismatch(
                f"index {row} has no slot in the target basis (p={target.p})"
            ) from None
    return out


def hermite_value(n, x):
    """Probabilists' Hermite polynomial ``He_n(x)`` by three-term recurrence."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    x = np.asarray(x, dtype=np.float64)
    prev, cur = np.ones_like(x), x.copy()
    if n == 0:
        return prev[()] * 1.0
    for k in range(1, n):
        prev, cur = cur, x * cur - k * prev
    return cur[()]


def hermite_derivative(n, x):
    """Derivative ``He_n'(x) = n He_{n-1}(x)``."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    if n == 0:
        return np.zeros_like(np.asarray(x, dtype=np.float64))[()]
    return n * hermite_value(n - 1, x)


def _as_points(basis, points):
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != basis.d:
        raise DimensionMismatch(
            f"points have shape {np.shape(points)}, basis expects {basis.d} columns"
        )
    return pts


def design_matrix(basis, points):
    """``(N, P)`` matrix of ``psi_alpha(x_i)``."""
    pts = _as_points(basis, points)
    return kernels.design_matrix(pts, basis.indices, basis.p)


def gradient_matrix(basis, points, coordinate):
    """``(N, P)`` matrix of ``d psi_alpha / d x_coordinate`` at each point."""
    if not 0 <= coordinate < basis.d:
        raise IndexError(f"coordinate {coordinate} out of range for d={basis.d}")
    pts = _as_points(basis, points)
    return kernels.gradient_matrix(pts, basis.indices, basis.p, coordinate)


def basis_row(basis, point):
    point = np.asarray(point, dtype=np.float64)
    if point.shape != (basis.d,):
        raise DimensionMismatch(f"point of length {point.size}, basis has d={basis.d}")
    return design_matrix(basis, point)[0]


def basis_gradient_row(basis, point, coordinate):
    point = np.asarray(point, dtype=np.float64)
    if point.shape != (basis.d,):
        raise DimensionMismatch(f"point of length {point.size}, basis has d={basis.d}")
    return gradient_matrix(basis, point, coordinate)[0]

"""Pure-numpy implementations of the hot kernels.

These mirror ``_kernels.pyx`` operation for operation so that the two
backends agree to rounding. They are used whenever the compiled extension
is missing or ``PPACHAOS_PURE`` is set.
"""

import numpy as np


def hermite_table(x, p):
    """Normalized probabilists' Hermite values ``psi_k(x)`` for ``k <= p``.

    Returns an array of shape ``x.shape + (p + 1,)``.
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.empty(x.shape + (p + 1,))
    out[..., 0] = 1.0
    if p >= 1:
        out[..., 1] = x
    for k in range(1, p):
        out[..., k + 1] = (x * out[..., k] - np.sqrt(k) * out[..., k - 1]) / np.sqrt(k + 1)
    return out


def design_matrix(points, indices, p):
    points = np.ascontiguousarray(points, dtype=np.float64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    n = points.shape[0]
    table = hermite_table(points, p)  # (n, d, p+1)
    out = np.ones((n, indices.shape[0]))
    for j in range(indices.shape[1]):
        out *= table[:, j, :][:, indices[:, j]]
    return out


def gradient_matrix(points, indices, p, coord):
    points = np.ascontiguousarray(points, dtype=np.float64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    n = points.shape[0]
    table = hermite_table(points, p)
    # psi_k' = sqrt(k) * psi_{k-1}
    dtable = np.zeros_like(table[:, coord, :])
    for k in range(1, p + 1):
        dtable[:, k] = np.sqrt(k) * table[:, coord, k - 1]
    out = np.ones((n, indices.shape[0]))
    for j in range(indices.shape[1]):
        if j == coord:
            out *= dtable[:, indices[:, j]]
        else:
            out *= table[:, j, :][:, indices[:, j]]
    return out


def kde_sum(samples, grid, bandwidth, block=2048):
    """Unnormalized Gaussian kernel sums ``sum_i exp(-((g - s_i)/h)^2 / 2)``."""
    samples = np.ascontiguousarray(samples, dtype=np.float64)
    grid = np.ascontiguousarray(grid, dtype=np.float64)
    inv_h = 1.0 / bandwidth
    acc = np.zeros(grid.shape[0])
    for start in range(0, samples.shape[0], block):
        u = (grid[:, None] - samples[None, start:start + block]) * inv_h
        acc += np.exp(-0.5 * u * u).sum(axis=1)
    return acc

"""Gram-Schmidt, rotation completion and weighted least squares helpers."""

from __future__ import annotations

import numpy as np
import scipy.linalg

PARALLEL_TOL = 1e-10


def orthogonalize(v, rows, tol=PARALLEL_TOL):
    """Modified Gram-Schmidt of ``v`` against orthonormal ``rows``.

    Two passes are made for stability. Returns the normalized vector, or
    ``None`` when less than ``tol`` of its norm survives the projection.
    """
    v = np.array(v, dtype=np.float64)
    scale = np.linalg.norm(v)
    if scale == 0:
        return None
    v /= scale
    for _ in range(2):
        for q in rows:
            v -= (q @ v) * q
    n = np.linalg.norm(v)
    if n < tol:
        return None
    return v / n


def complete_rows(rows, candidates, d):
    """Extend orthonormal ``rows`` to a full ``d x d`` orthogonal matrix.

    ``candidates`` is an iterable of seed vectors tried in order; each is
    orthogonalized against the rows accepted so far and skipped when it is
    numerically dependent on them.
    """
    out = [np.asarray(r, dtype=np.float64) for r in rows]
    for cand in candidates:
        if len(out) == d:
            break
        q = orthogonalize(cand, out)
        if q is not None:
            out.append(q)
    if len(out) < d:
        # unit vectors always complete a basis
        for k in range(d):
            if len(out) == d:
                break
            q = orthogonalize(np.eye(d)[k], out)
            if q is not None:
                out.append(q)
    return np.array(out)


def orthogonality_error(a):
    a = np.atleast_2d(a)
    return float(np.max(np.abs(a @ a.T - np.eye(a.shape[0]))))


def weighted_lstsq(x, u, w):
    """``argmin_c sum_i w_i (u_i - x_i . c)^2`` by QR of ``sqrt(w) X``."""
    sw = np.sqrt(w)
    c, *_ = scipy.linalg.lstsq(sw[:, None] * x, sw * u, lapack_driver="gelsy")
    return c


def principal_angles(a, b):
    """Principal angles (radians) between the row spaces of ``a`` and ``b``."""
    return scipy.linalg.subspace_angles(np.atleast_2d(a).T, np.atleast_2d(b).T)


def random_unit(d, rng):
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)

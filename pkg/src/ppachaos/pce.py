"""Polynomial chaos models: fitting, evaluation and change of coordinates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from numpy.polynomial.hermite_e import hermegauss

from .errors import DimensionMismatch, InsufficientData, NonOrthogonal, RankDeficient
from .multiindex import MultiIndexBasis, design_matrix
from .transforms import sample_gaussian

SAMPLE_MARGIN = 5
# Tensor quadrature is used while it needs no more nodes than the MC fallback.
MC_TRANSFER_SAMPLES = 200_000


def _frozen(arr):
    arr = np.array(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Dataset:
    inputs: np.ndarray
    outputs: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.inputs, dtype=np.float64)
        y = np.asarray(self.outputs, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2 or y.ndim != 1:
            raise DimensionMismatch("inputs must be (N, d) and outputs (N,)")
        if x.shape[0] != y.shape[0]:
            raise DimensionMismatch(f"{x.shape[0]} input rows but {y.shape[0]} outputs")
        if x.shape[0] < 1:
            raise InsufficientData("a dataset needs at least one sample")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("dataset contains non-finite values")
        object.__setattr__(self, "inputs", _frozen(x))
        object.__setattr__(self, "outputs", _frozen(y))

    @property
    def n(self):
        return self.inputs.shape[0]

    @property
    def d(self):
        return self.inputs.shape[1]


@dataclass(frozen=True, eq=False)
class PceModel:
    """Coefficients over a Hermite basis, optionally behind a projection.

    With ``projection`` (an ``(r, d)`` matrix) set, the model is evaluated at
    ``z = projection @ x``; otherwise directly at ``x``.
    """

    basis: MultiIndexBasis
    coefficients: np.ndarray
    projection: np.ndarray | None = None
    rss: float | None = field(default=None, compare=False)

    def __post_init__(self):
        coef = _frozen(self.coefficients)
        if coef.shape != (len(self.basis),):
            raise DimensionMismatch(
                f"{coef.size} coefficients for a basis of {len(self.basis)} terms"
            )
        if not np.all(np.isfinite(coef)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coefficients", coef)
        if self.projection is not None:
            proj = _frozen(np.atleast_2d(self.projection))
            if proj.shape[0] != self.basis.d:
                raise DimensionMismatch(
                    f"projection has {proj.shape[0]} rows, basis has d={self.basis.d}"
                )
            object.__setattr__(self, "projection", proj)

    @property
    def input_dim(self):
        if self.projection is None:
            return self.basis.d
        return self.projection.shape[1]

    @property
    def mean(self):
        return float(self.coefficients[0])

    def predict(self, points):
        return evaluate(self, points)


def evaluate(model, points):
    """Evaluate ``model`` at the rows of ``points`` (``(M, input_dim)``)."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != model.input_dim:
        raise DimensionMismatch(
            f"points have {pts.shape[-1]} columns, model expects {model.input_dim}"
        )
    if model.projection is not None:
        pts = pts @ model.projection.T
    return design_matrix(model.basis, pts) @ model.coefficients


def moments(model):
    """Mean and variance implied by orthonormality of the basis."""
    c = model.coefficients
    return float(c[0]), float(np.sum(c[1:] ** 2))


def fallback_ridge(design):
    """Ridge used after a rank-deficient fit: 1e-8 times the mean normal-matrix diagonal."""
    return 1e-8 * float(np.mean(np.sum(design * design, axis=0)))


def solve_least_squares(design, target, ridge=0.0):
    """QR least squares with optional Tikhonov term.

    Returns ``(coefficients, rank_ok)``; ``rank_ok`` is False when the
    column-pivoted R has a diagonal below ``max(N, P) * eps * |R_00|``.
    """
    n, m = design.shape
    if ridge > 0:
        a = np.vstack([design, np.sqrt(ridge) * np.eye(m)])
        b = np.concatenate([target, np.zeros(m)])
    else:
        a, b = design, target
    q, r, piv = scipy.linalg.qr(a, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = max(a.shape) * np.finfo(float).eps * (diag[0] if diag.size else 0.0)
    rank_ok = diag.size == m and bool(np.all(diag > tol))
    if not rank_ok and ridge == 0:
        return None, False
    sol = scipy.linalg.solve_triangular(r, q.T @ b)
    coef = np.empty(m)
    coef[piv] = sol
    return coef, rank_ok


def fit_least_squares(data, basis, ridge=0.0, projection=None):
    """Least-squares PCE coefficients.

    Parameters
    ----------
    data : Dataset
        Inputs in standard Gaussian space. If ``projection`` is given the
        inputs are projected first and ``basis.d`` must equal its row count.
    basis : MultiIndexBasis
    ridge : float
        Tikhonov weight; 0 means plain least squares.

    Raises
    ------
    InsufficientData
        ``N < len(basis) + 5`` with ``ridge == 0``.
    RankDeficient
        Numerically rank-deficient design with ``ridge == 0``.
    """
    x = data.inputs
    if projection is not None:
        projection = np.atleast_2d(np.asarray(projection, dtype=np.float64))
        if projection.shape[1] != data.d:
            raise DimensionMismatch(
                f"projection expects {projection.shape[1]} columns, data has {data.d}"
            )
        x = x @ projection.T
    if x.shape[1] != basis.d:
        raise DimensionMismatch(f"data has {x.shape[1]} columns, basis has d={basis.d}")
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    if ridge == 0 and data.n < len(basis) + SAMPLE_MARGIN:
        raise InsufficientData(
            f"{data.n} samples for {len(basis)} terms (need at least {len(basis) + SAMPLE_MARGIN})"
        )
    psi = design_matrix(basis, x)
    coef, ok = solve_least_squares(psi, data.outputs, ridge)
    if coef is None:
        raise RankDeficient("design matrix is numerically rank-deficient; retry with ridge > 0")
    resid = data.outputs - psi @ coef
    return PceModel(basis, coef, projection, rss=float(resid @ resid))


def fit_with_fallback(data, basis, projection=None):
    """:func:`fit_least_squares`, retrying once with the fallback ridge."""
    try:
        return fit_least_squares(data, basis, projection=projection)
    except RankDeficient:
        x = data.inputs if projection is None else data.inputs @ np.atleast_2d(projection).T
        ridge = fallback_ridge(design_matrix(basis, x))
        return fit_least_squares(data, basis, ridge=ridge, projection=projection)


def check_orthogonal(matrix, tol=1e-8, what="rotation"):
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonOrthogonal(f"{what} must be square, got shape {a.shape}")
    err = np.max(np.abs(a @ a.T - np.eye(a.shape[0])))
    if err >= tol:
        raise NonOrthogonal(f"{what} is not orthogonal (max |AA^T - I| = {err:.3g})")
    return a


def gauss_hermite_rule(level):
    """Nodes and weights for ``E[f(xi)]``, ``xi ~ N(0, 1)``."""
    nodes, weights = hermegauss(level)
    return nodes, weights / weights.sum()


def tensor_rule(d, level):
    nodes, weights = gauss_hermite_rule(level)
    grids = np.meshgrid(*([nodes] * d), indexing="ij")
    wgrids = np.meshgrid(*([weights] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    w = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    return pts, w


def inner_product_matrix(basis_from, basis_to, rotation, quadrature_level=None, seed=0):
    """Matrix of ``<psi_beta, psi_alpha o A>`` under the standard Gaussian.

    Row ``alpha`` runs over ``basis_to`` and column ``beta`` over
    ``basis_from``. Tensor Gauss-Hermite with ``quadrature_level`` nodes per
    dimension is used while the grid has at most 2e5 nodes (exact for the
    polynomial integrands once the level exceeds the larger degree);
    otherwise seeded Monte Carlo with 2e5 samples.
    """
    a = check_orthogonal(rotation)
    d = a.shape[0]
    if basis_from.d != d or basis_to.d != d:
        raise DimensionMismatch(
            f"bases have d={basis_from.d} and d={basis_to.d}, rotation is {d}x{d}"
        )
    level = quadrature_level or max(basis_from.p, basis_to.p) + 1
    if level**d <= MC_TRANSFER_SAMPLES:
        pts, w = tensor_rule(d, level)
    else:
        pts = sample_gaussian(MC_TRANSFER_SAMPLES, d, seed)
        w = np.full(pts.shape[0], 1.0 / pts.shape[0])
    psi_from = design_matrix(basis_from, pts)
    psi_to = design_matrix(basis_to, pts @ a.T)
    return psi_to.T @ (w[:, None] * psi_from)


def transfer_coefficients(model, rotation, target_basis=None, quadrature_level=None, seed=0):
    """Re-express a full-dimensional model in rotated coordinates ``eta = A xi``.

    The returned model satisfies ``new(A @ xi) == model(xi)``.
    """
    if model.projection is not None:
        raise DimensionMismatch("transfer needs a full-dimensional model without projection")
    target = target_basis or model.basis
    m = inner_product_matrix(model.basis, target, rotation, quadrature_level, seed)
    return PceModel(target, m @ model.coefficients)

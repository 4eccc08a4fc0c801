"""Projection pursuit regression with univariate Hermite smooth functions.

Stages are added greedily. Within a stage the smooth function and its
direction are updated alternately; the direction update is a Gauss-Newton
step solved as a weighted least-squares problem. The same update, with the
earlier directions held fixed, drives :mod:`ppachaos.ppa`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AllWeightsDegenerate, DimensionMismatch, InsufficientData
from .linalg import orthogonalize, random_unit, weighted_lstsq
from .multiindex import design_matrix, enumerate_basis, gradient_matrix
from .pce import PceModel, fallback_ridge, solve_least_squares

EPS_WEIGHT = 1e-8
MAX_HALVINGS = 5
INNER_MAX_ITER = 50
INNER_ANGLE_TOL = 1e-6
INNER_RSS_TOL = 1e-4
DEFAULT_STAGE_TOL = 0.02
# residual sums below this fraction of the total are treated as an exact fit
EXACT_FIT = 1e-14


@dataclass
class ProjectionFit:
    """Working state of one projection stage: the smooth PCE and its RSS."""

    rows: np.ndarray
    coefficients: np.ndarray
    rss: float
    basis: object
    x: np.ndarray = None
    target: np.ndarray = None

    def loo_rss(self):
        """Leave-one-out (PRESS) residual sum of the least-squares smooth fit."""
        return press(design_matrix(self.basis, self.x @ self.rows.T), self.target)

    @property
    def direction(self):
        return self.rows[-1]

    def model(self):
        return PceModel(self.basis, self.coefficients.copy(), self.rows.copy(), rss=self.rss)


def fit_projected(x, target, rows, basis):
    """Least-squares PCE on ``z = x @ rows.T``; falls back to a tiny ridge."""
    psi = design_matrix(basis, x @ rows.T)
    coef, _ = solve_least_squares(psi, target)
    if coef is None:
        coef, _ = solve_least_squares(psi, target, fallback_ridge(psi))
    resid = target - psi @ coef
    return ProjectionFit(rows, coef, float(resid @ resid), basis, x, target)


def press(design, target):
    """Sum of squared leave-one-out residuals ``e_i / (1 - h_ii)``."""
    q, r = np.linalg.qr(design)
    resid = target - q @ (q.T @ target)
    lev = np.minimum(np.sum(q * q, axis=1), 1.0 - 1e-12)
    return float(np.sum((resid / (1.0 - lev)) ** 2))


def _with_last(fixed, c):
    return np.vstack([fixed, c[None, :]]) if len(fixed) else c[None, :]


def projection_update(x, target, fixed, current, eps_w=EPS_WEIGHT):
    """One damped Gauss-Newton update of the last projection row.

    Parameters
    ----------
    x : (N, d) array
    target : (N,) array
        Values the smooth function should reproduce (residuals for PPR,
        outputs for PPA).
    fixed : (k, d) array
        Orthonormal rows held fixed; the new row is Gram-Schmidt'ed
        against them. Empty for PPR.
    current : ProjectionFit
        Current rows (``fixed`` plus the row being updated) and smooth fit.

    Returns
    -------
    ProjectionFit
        A fit whose RSS never exceeds ``current.rss``.

    Raises
    ------
    AllWeightsDegenerate
        The derivative along the updated coordinate is negligible everywhere.
    """
    basis = current.basis
    last = current.rows.shape[0] - 1
    z_old = x @ current.rows.T
    g_old = design_matrix(basis, z_old) @ current.coefficients
    slope = gradient_matrix(basis, z_old, last) @ current.coefficients
    peak = np.max(np.abs(slope)) if slope.size else 0.0
    keep = np.abs(slope) >= eps_w * peak
    if not peak > 0 or not np.any(keep):
        raise AllWeightsDegenerate("derivative of the smooth function vanishes at every point")
    c_old = current.direction
    u = x[keep] @ c_old + (target[keep] - g_old[keep]) / slope[keep]
    c_ls = weighted_lstsq(x[keep], u, slope[keep] ** 2)
    c_new = orthogonalize(c_ls, fixed)
    if c_new is None:
        return current
    if c_new @ c_old < 0:
        # same line, keep the orientation stable
        c_new = -c_new
    trial = fit_projected(x, target, _with_last(fixed, c_new), basis)
    step = 1.0
    for _ in range(MAX_HALVINGS):
        if trial.rss <= current.rss:
            return trial
        step *= 0.5
        c_try = orthogonalize(c_old + step * (c_new - c_old), fixed)
        if c_try is None:
            break
        trial = fit_projected(x, target, _with_last(fixed, c_try), basis)
    return trial if trial.rss <= current.rss else current


def initial_direction(x, target, fixed, rng):
    """Normalized first-order PCE coefficients of ``target``, orthogonal to ``fixed``."""
    design = np.column_stack([np.ones(x.shape[0]), x])
    coef, _ = solve_least_squares(design, target)
    if coef is None:
        coef, _ = solve_least_squares(design, target, fallback_ridge(design))
    slope = coef[1:]
    c = orthogonalize(slope, fixed, tol=1e-12) if np.linalg.norm(slope) >= 1e-12 else None
    while c is None:
        c = orthogonalize(random_unit(x.shape[1], rng), fixed)
    return c


def alternate(x, target, fixed, start, eps_w=EPS_WEIGHT, trace=None, rss_tol=INNER_RSS_TOL):
    """Alternate smooth refits and direction updates until converged.

    Stops once the direction moves by less than ``1 - |cos| < 1e-6`` and the
    relative RSS drop is below ``rss_tol``, or after 50 updates.
    """
    current = start
    for it in range(INNER_MAX_ITER):
        try:
            new = projection_update(x, target, fixed, current, eps_w)
        except AllWeightsDegenerate:
            if trace is not None:
                trace.append({"iteration": it, "rss": current.rss, "event": "degenerate"})
            break
        cos = abs(float(new.direction @ current.direction))
        drop = (current.rss - new.rss) / current.rss if current.rss > 0 else 0.0
        current = new
        if trace is not None:
            trace.append({"iteration": it, "rss": new.rss, "cos": cos})
        if 1.0 - cos < INNER_ANGLE_TOL and drop < rss_tol:
            break
    return current


@dataclass(frozen=True, eq=False)
class PprModel:
    """Additive model ``mean + sum_j f_j(c_j . x)``.

    Each smooth ``f_j`` is a one-dimensional :class:`PceModel` whose
    projection is the unit row ``c_j``.
    """

    mean: float
    smooths: tuple
    p: int
    input_dim: int
    fit_trace: tuple = ()
    stopped_reason: str = ""
    seed: int = 0
    diagnostics: dict = field(default_factory=dict, repr=False)

    @property
    def directions(self):
        if not self.smooths:
            return np.zeros((0, self.input_dim))
        return np.vstack([f.projection for f in self.smooths])

    @property
    def n_stages(self):
        return len(self.smooths)

    def predict(self, points):
        return ppr_predict(self, points)


def ppr_predict(model, points):
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[1] != model.input_dim:
        raise DimensionMismatch(f"points have {pts.shape[1]} columns, model expects {model.input_dim}")
    out = np.full(pts.shape[0], model.mean)
    for f in model.smooths:
        out += design_matrix(f.basis, pts @ f.projection.T) @ f.coefficients
    return out


def gauss_newton_direction_update(data, residual_target, f, c_old, eps_w=EPS_WEIGHT):
    """Updated unit direction for a univariate smooth ``f`` (damped step).

    ``f`` is refit on the trial directions when judging the step.
    """
    x = data.inputs
    c_old = np.asarray(c_old, dtype=np.float64)
    c_old = c_old / np.linalg.norm(c_old)
    basis = f.basis
    psi = design_matrix(basis, (x @ c_old)[:, None])
    resid = residual_target - psi @ f.coefficients
    current = ProjectionFit(c_old[None, :], np.asarray(f.coefficients), float(resid @ resid), basis)
    return projection_update(x, np.asarray(residual_target, dtype=np.float64), np.zeros((0, x.shape[1])), current, eps_w).direction


def stage_score(fit, tss, n, criterion, n_direction_params=0):
    """Residual used to accept or reject a stage.

    ``fit=None`` scores the constant model. ``"loo"`` is the leave-one-out
    sum of squares of the smooth fit inflated by ``(1 - m/N)^-2``, where
    ``m`` counts the free direction parameters estimated from the same data;
    ``"press"`` is the bare leave-one-out sum and ``"rss"`` the in-sample one.
    """
    if criterion not in ("loo", "press", "rss"):
        raise ValueError(f"unknown stage criterion {criterion!r}")
    if fit is None:
        return tss * (n / (n - 1)) ** 2 if criterion != "rss" else tss
    if criterion == "rss":
        return fit.rss
    score = fit.loo_rss()
    if criterion == "loo":
        if n_direction_params >= n:
            return np.inf
        score /= (1.0 - n_direction_params / n) ** 2
    return score


def fit_ppr(data, p=3, max_stages=10, tol=DEFAULT_STAGE_TOL, seed=0, eps_w=EPS_WEIGHT, criterion="loo",
            inner_tol=INNER_RSS_TOL):
    """Stage-wise greedy projection pursuit regression.

    Each stage fits one ``(f_j, c_j)`` pair to the current residuals. A stage
    is kept only if it lowers the stage residual (leave-one-out by default,
    see :func:`stage_score`) by at least ``tol`` times the previous value;
    the first stage failing that test is discarded and ends the fit.
    """
    x, y = data.inputs, data.outputs
    n, d = x.shape
    if n < p + 6:
        raise InsufficientData(f"{n} samples, PPR with p={p} needs at least {p + 6}")
    rng = np.random.Generator(np.random.PCG64([seed, 0x9E3779B9]))
    basis = enumerate_basis(1, p)
    mean = float(np.mean(y))
    resid = y - mean
    tss = float(resid @ resid)
    rss = tss
    score = stage_score(None, tss, n, criterion)
    smooths = []
    trace = [{"stage": 0, "rss": rss, "score": score}]
    stopped = "max_stages"
    if tss <= EXACT_FIT * max(1.0, float(y @ y)):
        return PprModel(mean, (), p, d, tuple(trace), "constant", seed)
    no_fixed = np.zeros((0, d))
    for stage in range(1, max_stages + 1):
        c0 = initial_direction(x, resid, no_fixed, rng)
        inner = []
        fit = alternate(x, resid, no_fixed, fit_projected(x, resid, c0[None, :], basis), eps_w, inner, inner_tol)
        new_score = stage_score(fit, tss, n, criterion, stage * (d - 1))
        if score - new_score < tol * score:
            trace.append({"stage": stage, "rss": fit.rss, "score": new_score, "inner": inner, "rejected": True})
            stopped = "no_improving_direction" if stage == 1 else "converged"
            break
        smooths.append(fit.model())
        resid = resid - design_matrix(basis, x @ fit.rows.T) @ fit.coefficients
        rss, score = float(resid @ resid), new_score
        trace.append({"stage": stage, "rss": rss, "score": score, "inner": inner})
        if rss <= EXACT_FIT * tss:
            stopped = "exact"
            break
    return PprModel(mean, tuple(smooths), p, d, tuple(trace), stopped, seed)

"""Projection pursuit adaptation.

A single multivariate PCE ``g_r`` is fitted over an orthonormal stack of
learned projections ``C_r``. Stage ``r`` appends one row, alternating
least-squares refits of ``g_r`` with Gauss-Newton updates of that row only;
earlier rows are never touched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AllWeightsDegenerate,
    DegenerateDerivative,
    DimensionMismatch,
    DimensionTooLarge,
    InsufficientData,
)
from .linalg import complete_rows
from .multiindex import basis_size, design_matrix, embed_coefficients, enumerate_basis
from .pce import SAMPLE_MARGIN, PceModel, evaluate, transfer_coefficients
from .ppr import (
    DEFAULT_STAGE_TOL,
    EPS_WEIGHT,
    EXACT_FIT,
    INNER_RSS_TOL,
    ProjectionFit,
    alternate,
    fit_projected,
    initial_direction,
    projection_update,
    stage_score,
)

MAX_TRANSFER_DIM = 4


@dataclass(frozen=True, eq=False)
class PpaModel:
    g: PceModel
    fit_trace: tuple = ()
    seed: int = 0
    stopped_reason: str = ""

    @property
    def stack(self):
        return self.g.projection

    @property
    def r(self):
        return self.g.basis.d

    @property
    def p(self):
        return self.g.basis.p

    @property
    def input_dim(self):
        return self.g.input_dim

    def predict(self, points):
        return ppa_predict(self, points)


def ppa_predict(model, points):
    return evaluate(model.g, points)


def ppa_stage_inner(data, stack_fixed, c_r, g, eps_w=EPS_WEIGHT):
    """One Gauss-Newton update of the newest projection ``c_r``.

    Parameters
    ----------
    data : Dataset
    stack_fixed : (r-1, d) array
        Previously accepted orthonormal rows.
    c_r : (d,) array
        Current newest row.
    g : PceModel
        Current ``r``-dimensional smooth function, evaluated on ``z``.

    Returns
    -------
    c_new, g_new, rss
        ``rss`` is never larger than the incoming residual sum.

    Raises
    ------
    DegenerateDerivative
        ``dg/dz_r`` is negligible at every sample.
    """
    x, y = data.inputs, data.outputs
    fixed = np.atleast_2d(np.asarray(stack_fixed, dtype=np.float64)).reshape(-1, x.shape[1])
    rows = np.vstack([fixed, np.asarray(c_r, dtype=np.float64)[None, :]])
    if g.basis.d != rows.shape[0]:
        raise DimensionMismatch(f"g has dimension {g.basis.d}, stack has {rows.shape[0]} rows")
    resid = y - design_matrix(g.basis, x @ rows.T) @ g.coefficients
    current = ProjectionFit(rows, np.asarray(g.coefficients), float(resid @ resid), g.basis)
    try:
        new = projection_update(x, y, fixed, current, eps_w)
    except AllWeightsDegenerate as exc:
        raise DegenerateDerivative(str(exc)) from None
    return new.direction.copy(), new.model(), new.rss


def fit_ppa(data, p=3, max_dim=None, tol=DEFAULT_STAGE_TOL, seed=0, eps_w=EPS_WEIGHT, criterion="loo",
            inner_tol=INNER_RSS_TOL):
    """Fit a PPA surrogate to ``data``.

    Parameters
    ----------
    data : Dataset
        Inputs in standard Gaussian space.
    p : int
        Total degree of the multivariate PCE.
    max_dim : int, optional
        Upper bound on the number of projections (default: input dimension).
    tol : float
        A new projection is kept only if it lowers the stage residual by at
        least this fraction of the previous stage's residual.
    seed : int
        Seeds the random fallback used when an initial direction degenerates.
    criterion : {"loo", "press", "rss"}
        Residual used for the stage test, see :func:`ppachaos.ppr.stage_score`.
    inner_tol : float
        Relative RSS change below which the inner alternation may stop.

    Returns
    -------
    PpaModel
        ``stopped_reason`` records why dimension growth ended.
    """
    x, y = data.inputs, data.outputs
    n, d = x.shape
    max_dim = d if max_dim is None else min(max_dim, d)
    if max_dim < 1:
        raise ValueError("max_dim must be >= 1")
    if n < basis_size(1, p) + SAMPLE_MARGIN:
        raise InsufficientData(
            f"{n} samples, PPA with p={p} needs at least {basis_size(1, p) + SAMPLE_MARGIN}"
        )
    rng = np.random.Generator(np.random.PCG64([seed, 0x5BD1E995]))
    mean = float(np.mean(y))
    tss = float((y - mean) @ (y - mean))
    fixed = np.zeros((0, d))
    best = None
    rss = tss
    score = stage_score(None, tss, n, criterion)
    prediction = np.full(n, mean)
    trace = [{"stage": 0, "rss": rss, "score": score}]
    stopped = "max_dim"
    for r in range(1, max_dim + 1):
        if n < basis_size(r, p) + SAMPLE_MARGIN:
            stopped = "sample_gate"
            break
        basis = enumerate_basis(r, p)
        c0 = initial_direction(x, y - prediction, fixed, rng)
        start = fit_projected(x, y, np.vstack([fixed, c0[None, :]]), basis)
        inner = []
        fit = alternate(x, y, fixed, start, eps_w, inner, inner_tol)
        new_score = stage_score(fit, tss, n, criterion, sum(d - j for j in range(1, r + 1)))
        if score - new_score < tol * score:
            trace.append({"stage": r, "rss": fit.rss, "score": new_score, "inner": inner, "rejected": True})
            stopped = "converged"
            break
        best = fit
        fixed = fit.rows
        rss, score = fit.rss, new_score
        prediction = design_matrix(basis, x @ fixed.T) @ fit.coefficients
        trace.append({"stage": r, "rss": rss, "score": score, "inner": inner})
        if rss <= EXACT_FIT * tss:
            stopped = "exact"
            break
    if best is None:
        if stopped == "sample_gate":
            raise InsufficientData(f"{n} samples cannot support a {p}-degree one-dimensional stage")
        # nothing beats the constant; keep a 1-d model carrying only the mean
        basis = enumerate_basis(1, p)
        coef = np.zeros(len(basis))
        coef[0] = mean
        c0 = initial_direction(x, y - mean, fixed, rng)
        return PpaModel(PceModel(basis, coef, c0[None, :], rss=tss), tuple(trace), seed, "no_improving_direction")
    return PpaModel(best.model(), tuple(trace), seed, stopped)


def ppa_to_original(model, seed=0):
    """Equivalent full-dimensional PCE in the original Gaussian coordinates."""
    r, d = model.stack.shape
    if r > MAX_TRANSFER_DIM:
        raise DimensionTooLarge(f"r={r} exceeds {MAX_TRANSFER_DIM} for the coefficient transfer")
    rng = np.random.Generator(np.random.PCG64([seed, 0xC2B2AE35]))
    candidates = (rng.standard_normal(d) for _ in range(4 * d))
    rotation = complete_rows(model.stack, candidates, d)
    full = enumerate_basis(d, model.p)
    coef = embed_coefficients(model.g.basis, model.g.coefficients, full)
    # model lives in eta = A xi; transfer with A^T to return to xi
    return transfer_coefficients(PceModel(full, coef), rotation.T, full)

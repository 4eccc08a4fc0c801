"""Classical Gaussian basis adaptation and its refinements.

The pilot is a first-order PCE whose Gaussian coefficients define the first
rotated coordinate. Reduced models in the first ``r`` rotated coordinates are
fitted by regression or by tensor Gauss-Hermite quadrature with the remaining
rotated coordinates set to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .density import DEFAULT_MC, kde, relative_l2
from .errors import (
    DegeneratePilot,
    DimensionMismatch,
    DimensionTooLarge,
    InsufficientData,
    NonNestedStacks,
    NonOrthogonal,
)
from .linalg import complete_rows, orthogonality_error
from .multiindex import basis_size, design_matrix, embed_coefficients, enumerate_basis
from .pce import SAMPLE_MARGIN, PceModel, fit_least_squares, tensor_rule
from .transforms import from_gaussian, sample_gaussian

MAX_QUADRATURE_DIM = 4
DEFAULT_DISTANCE_TOL = 0.05
SOA_BUDGET = 200
SOA_SAMPLES = 2000


@dataclass(frozen=True, eq=False)
class ProjectionStack:
    """``r x d`` matrix with orthonormal rows."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(np.atleast_2d(self.rows), dtype=np.float64)
        if rows.shape[0] > rows.shape[1]:
            raise DimensionMismatch(f"stack has {rows.shape[0]} rows for d={rows.shape[1]}")
        err = orthogonality_error(rows)
        if err >= 1e-10:
            raise NonOrthogonal(f"stack rows are not orthonormal (error {err:.3g})")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def r(self):
        return self.rows.shape[0]

    @property
    def d(self):
        return self.rows.shape[1]

    def head(self, r):
        return ProjectionStack(self.rows[:r])


def _stack_rows(stack):
    return stack.rows if isinstance(stack, ProjectionStack) else np.atleast_2d(np.asarray(stack, dtype=np.float64))


@dataclass(frozen=True, eq=False)
class AdaptationReport:
    models: tuple
    distances: tuple
    converged_r: int
    criterion: str
    rotation: np.ndarray = None
    pilot: PceModel = None
    converged: bool = False
    extra: dict = field(default_factory=dict, repr=False)

    @property
    def model(self):
        """Adapted model at the converged dimension."""
        return self.models[self.converged_r - 1]


def build_classical_rotation(gaussian_coeffs):
    """Rotation whose first row is the normalized Gaussian coefficient vector.

    The remaining rows start from unit vectors of the coordinates ranked by
    ``|Y_ei|`` (ties by index) and are orthogonalized by modified
    Gram-Schmidt; seeds that are numerically parallel to earlier rows are
    skipped.
    """
    g = np.asarray(gaussian_coeffs, dtype=np.float64).ravel()
    norm = np.linalg.norm(g)
    if not norm >= 1e-12:
        raise DegeneratePilot(f"pilot Gaussian coefficients have norm {norm:.3g}")
    d = g.size
    order = sorted(range(d), key=lambda i: (-abs(g[i]), i))
    eye = np.eye(d)
    return complete_rows([g / norm], (eye[i] for i in order), d)


def pilot_coefficients(pilot):
    """``(Y_0, (Y_e1, ..., Y_ed))`` of a full-dimensional PCE."""
    if pilot.projection is not None:
        raise DimensionMismatch("pilot must be a full-dimensional PCE")
    return float(pilot.coefficients[0]), pilot.coefficients[pilot.basis.first_order_positions()].copy()


def fit_pilot(data, p=1):
    """Full-dimensional PCE of degree ``p`` used to seed the rotation."""
    return fit_least_squares(data, enumerate_basis(data.d, p))


def fit_adapted_regression(data, stack, p):
    """Least-squares PCE in ``z = stack @ xi``; the model keeps the stack."""
    rows = _stack_rows(stack)
    return fit_least_squares(data, enumerate_basis(rows.shape[0], p), projection=rows)


def fit_adapted_quadrature(model_fn, spec, stack, p, level=None):
    """Adapted PCE by tensor Gauss-Hermite over the first ``r`` rotated coordinates.

    Parameters
    ----------
    model_fn : callable
        Physical model, mapping an ``(M, d)`` array of physical inputs to
        ``M`` outputs.
    spec : InputSpec
    stack : ProjectionStack
        First ``r`` rows of the rotation; the other rotated coordinates are
        fixed at zero, so the model is queried at ``xi = stack.T @ eta``.
    level : int, optional
        Nodes per dimension, default ``p + 1``.
    """
    rows = _stack_rows(stack)
    r, d = rows.shape
    if r > MAX_QUADRATURE_DIM:
        raise DimensionTooLarge(f"tensor quadrature limited to r <= {MAX_QUADRATURE_DIM}, got {r}")
    if spec.d != d:
        raise DimensionMismatch(f"stack has d={d}, input spec has d={spec.d}")
    level = level or p + 1
    eta, w = tensor_rule(r, level)
    y = np.asarray(model_fn(from_gaussian(spec, eta @ rows)), dtype=np.float64).reshape(-1)
    basis = enumerate_basis(r, p)
    coef = design_matrix(basis, eta).T @ (w * y)
    return PceModel(basis, coef, rows)


def correct_low_order(adapted, pilot_gaussian, stack):
    """Overwrite zero- and first-order coefficients with their pilot values.

    The first-order coefficient along rotated coordinate ``j`` becomes
    ``sum_i Y_ei * A_ji``; higher orders are left untouched.
    """
    rows = _stack_rows(stack)
    if adapted.basis.d != rows.shape[0]:
        raise DimensionMismatch(f"adapted model has d={adapted.basis.d}, stack has {rows.shape[0]} rows")
    y0, ye = pilot_gaussian
    ye = np.asarray(ye, dtype=np.float64)
    if ye.shape != (rows.shape[1],):
        raise DimensionMismatch(f"pilot has {ye.size} first-order terms, stack has d={rows.shape[1]}")
    coef = np.array(adapted.coefficients)
    coef[0] = y0
    if adapted.basis.p >= 1:
        coef[adapted.basis.first_order_positions()] = rows @ ye
    return PceModel(adapted.basis, coef, adapted.projection, rss=adapted.rss)


def adaptation_distance(model_r, model_r1, criterion="kde", seed=0, n_mc=DEFAULT_MC):
    """Distance between nested adaptations of dimension ``r`` and ``r + 1``.

    ``"coefficient"`` compares coefficient vectors after zero-padding
    ``model_r`` into the larger basis; ``"kde"`` compares densities of
    ``n_mc`` seeded surrogate samples on the grid of ``model_r1``.
    Both are relative l2 differences with ``model_r1`` as reference.
    """
    a, b = model_r.projection, model_r1.projection
    if a is None or b is None or a.shape[1] != b.shape[1] or a.shape[0] > b.shape[0]:
        raise NonNestedStacks("both models need projections with nested row counts")
    if not np.allclose(a, b[: a.shape[0]], rtol=0, atol=1e-12):
        raise NonNestedStacks("rows of the smaller stack are not the leading rows of the larger")
    if criterion == "coefficient":
        if model_r.basis.p > model_r1.basis.p:
            raise DimensionMismatch("smaller model has the larger degree")
        padded = embed_coefficients(model_r.basis, model_r.coefficients, model_r1.basis)
        return relative_l2(padded, model_r1.coefficients)
    if criterion == "kde":
        xi = sample_gaussian(n_mc, a.shape[1], seed)
        ref = kde(model_r1.predict(xi))
        return relative_l2(kde(model_r.predict(xi), ref.grid).values, ref.values)
    raise ValueError(f"unknown criterion {criterion!r}")


def classical_adaptation(
    data, p, max_dim=None, criterion="kde", tol=DEFAULT_DISTANCE_TOL, seed=0,
    correct=False, n_mc=DEFAULT_MC,
):
    """Regression-based classical adaptation swept over ``r = 1, 2, ...``.

    The first ``r`` with ``distance(r, r + 1) < tol`` is reported as
    converged. ``correct=True`` applies :func:`correct_low_order` to each
    adapted model.
    """
    pilot = fit_pilot(data, 1)
    pg = pilot_coefficients(pilot)
    rotation = build_classical_rotation(pg[1])
    max_dim = data.d if max_dim is None else min(max_dim, data.d)
    models, distances = [], []
    converged = False
    for r in range(1, max_dim + 1):
        if data.n < basis_size(r, p) + SAMPLE_MARGIN:
            if r == 1:
                raise InsufficientData(f"{data.n} samples cannot support a degree-{p} adaptation")
            break
        stack = ProjectionStack(rotation[:r])
        model = fit_adapted_regression(data, stack, p)
        if correct:
            model = correct_low_order(model, pg, stack)
        models.append(model)
        if r > 1:
            distances.append(adaptation_distance(models[-2], model, criterion, seed, n_mc))
            if distances[-1] < tol:
                converged = True
                break
    converged_r = len(models) - 1 if converged else len(models)
    return AdaptationReport(tuple(models), tuple(distances), converged_r, criterion, rotation, pilot, converged)


def _one_dim_misfit(xi, y, v, basis, y_norm):
    psi = design_matrix(basis, (xi @ v)[:, None])
    coef, *_ = np.linalg.lstsq(psi, y, rcond=None)
    return float(np.linalg.norm(y - psi @ coef) / y_norm)


def soa_update_rotation(current, rotation=None, p=None, seed=0, budget=SOA_BUDGET,
                        n_samples=SOA_SAMPLES, return_trace=False):
    """Sequentially optimized update of the first rotation row.

    Samples of the ``r``-dimensional surrogate ``current`` (not the original
    model) are drawn, and the first row ``v`` is moved by a compass search on
    the unit sphere: each coordinate is perturbed by ``+-step``, improving
    moves are kept, and ``step`` halves after a sweep without improvement.
    The objective is the relative l2 misfit of a degree-``p`` one-dimensional
    PCE in ``v . xi``. ``budget`` bounds the number of refits. Remaining rows
    are completed by Gram-Schmidt against the old rotation.

    Returns
    -------
    B : (d, d) array
        ``rotation`` itself (a copy) if no candidate improved the objective.
    trace : list of float
        Best objective after each refit; only with ``return_trace``.
    """
    if current.projection is None:
        raise DimensionMismatch("current model must carry a projection stack")
    d = current.input_dim
    if rotation is None:
        rotation = complete_rows(current.projection, np.eye(d), d)
    rotation = np.array(rotation, dtype=np.float64)
    if rotation.shape != (d, d) or orthogonality_error(rotation) >= 1e-8:
        raise NonOrthogonal("rotation must be a d x d orthogonal matrix")
    p = current.basis.p if p is None else p
    basis = enumerate_basis(1, p)
    xi = sample_gaussian(n_samples, d, seed)
    y = current.predict(xi)
    y_norm = np.linalg.norm(y) or 1.0
    v = rotation[0].copy()
    best = _one_dim_misfit(xi, y, v, basis, y_norm) if budget > 0 else None
    trace = [] if best is None else [best]
    used, step, improved_any = 1 if budget > 0 else 0, 0.5, False
    while used < budget and step > 1e-7:
        moved = False
        for k in range(d):
            for sign in (1.0, -1.0):
                if used >= budget:
                    break
                cand = v.copy()
                cand[k] += sign * step
                cand /= np.linalg.norm(cand)
                val = _one_dim_misfit(xi, y, cand, basis, y_norm)
                used += 1
                if val < best:
                    best, v, moved, improved_any = val, cand, True, True
                trace.append(best)
        if not moved:
            step *= 0.5
    if improved_any:
        out = complete_rows([v], rotation, d)
    else:
        out = rotation.copy()
    return (out, trace) if return_trace else out


"""Kernel density estimates, empirical CDFs and relative l2 errors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateSample, DimensionMismatch, ZeroReference
from .transforms import sample_gaussian

DEFAULT_GRID_POINTS = 512
DEFAULT_MC = 100_000


@dataclass(frozen=True, eq=False)
class DensityEstimate:
    grid: np.ndarray
    values: np.ndarray
    bandwidth: float
    n_samples: int

    def integral(self):
        return float(np.trapezoid(self.values, self.grid))

    def on_grid(self, grid):
        """Linear interpolation onto ``grid``, zero outside the support grid."""
        return np.interp(grid, self.grid, self.values, left=0.0, right=0.0)

    def to_csv(self, path):
        write_columns(path, ("grid", "value"), (self.grid, self.values))


def write_columns(path, names, columns):
    data = np.column_stack(columns)
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header=",".join(names), comments="")


def silverman_bandwidth(samples):
    samples = np.asarray(samples, dtype=np.float64)
    return 1.06 * float(np.std(samples, ddof=1)) * samples.size ** (-0.2)


def kde(samples, grid=None, n_grid=DEFAULT_GRID_POINTS):
    """Gaussian KDE with Silverman's bandwidth ``1.06 * std * n^(-1/5)``.

    The default grid has ``n_grid`` uniform points on
    ``[min - 3h, max + 3h]``.
    """
    samples = np.asarray(samples, dtype=np.float64).ravel()
    if samples.size < 10:
        raise DegenerateSample(f"need at least 10 samples, got {samples.size}")
    if not np.all(np.isfinite(samples)):
        raise DegenerateSample("samples contain non-finite values")
    h = silverman_bandwidth(samples)
    if not h > 0:
        raise DegenerateSample("samples have zero variance")
    if grid is None:
        grid = np.linspace(samples.min() - 3 * h, samples.max() + 3 * h, n_grid)
    else:
        grid = np.asarray(grid, dtype=np.float64)
        if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing with at least two points")
    values = kernels.kde_sum(samples, grid, h) / (samples.size * h * np.sqrt(2 * np.pi))
    return DensityEstimate(grid, values, h, samples.size)


def relative_l2(u, v):
    """``||u - v|| / ||v||``."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatch(f"shapes {u.shape} and {v.shape} differ")
    nv = np.linalg.norm(v)
    if nv == 0:
        raise ZeroReference("reference vector has zero norm")
    return float(np.linalg.norm(u - v) / nv)


def pdf_error(estimate, reference):
    """Relative l2 of ``estimate`` against ``reference`` on the reference grid."""
    return relative_l2(estimate.on_grid(reference.grid), reference.values)


def empirical_cdf(samples, grid):
    samples = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    if samples.size < 1:
        raise ValueError("need at least one sample")
    grid = np.asarray(grid, dtype=np.float64)
    return np.searchsorted(samples, grid, side="right") / samples.size


def surrogate_samples(model, n_mc=DEFAULT_MC, seed=0):
    if n_mc < 1000:
        raise ValueError("n_mc must be at least 1000")
    xi = sample_gaussian(n_mc, model.input_dim, seed)
    return model.predict(xi)


def surrogate_density(model, n_mc=DEFAULT_MC, seed=0, grid=None):
    """KDE of ``model`` predictions at ``n_mc`` seeded Gaussian inputs."""
    return kde(surrogate_samples(model, n_mc, seed), grid)

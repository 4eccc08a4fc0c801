"""Isoprobabilistic maps between physical marginals and standard Gaussians.

Only independent marginals are supported. Normal variates come from the
inverse CDF applied to a 64-bit uniform stream, so a given ``(n, d, seed)``
always yields the same matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import DimensionMismatch, OutOfSupport

KINDS = ("lognormal", "uniform", "normal")


@dataclass(frozen=True)
class MarginalSpec:
    """One independent input marginal.

    ``params`` is ``(mu, sigma)`` in log space for ``lognormal``, ``(a, b)``
    for ``uniform`` and ``(m, s)`` for ``normal``.
    """

    kind: str
    params: tuple
    description: str = ""
    units: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown marginal kind {self.kind!r}")
        if len(self.params) != 2:
            raise ValueError(f"{self.kind} takes two parameters")
        object.__setattr__(self, "params", tuple(float(v) for v in self.params))
        lo, hi = self.params
        if self.kind == "uniform" and not hi > lo:
            raise ValueError("uniform marginal needs b > a")
        if self.kind in ("lognormal", "normal") and not hi > 0:
            raise ValueError(f"{self.kind} marginal needs a positive scale")

    def median(self):
        return float(self.from_gaussian(np.zeros(1))[0])

    def from_gaussian(self, xi):
        a, b = self.params
        if self.kind == "lognormal":
            return np.exp(a + b * xi)
        if self.kind == "uniform":
            return a + (b - a) * ndtr(xi)
        return a + b * xi

    def to_gaussian(self, x):
        a, b = self.params
        if self.kind == "lognormal":
            if np.any(x <= 0):
                raise OutOfSupport(f"lognormal value must be positive ({self.description})")
            return (np.log(x) - a) / b
        if self.kind == "uniform":
            if np.any((x < a) | (x > b)):
                raise OutOfSupport(f"value outside [{a}, {b}] ({self.description})")
            return ndtri((x - a) / (b - a))
        return (x - a) / b

    def cdf(self, x):
        """Target CDF in physical space (used by distribution checks)."""
        a, b = self.params
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "lognormal":
            with np.errstate(divide="ignore"):
                return np.where(x > 0, ndtr((np.log(np.maximum(x, 1e-300)) - a) / b), 0.0)
        if self.kind == "uniform":
            return np.clip((x - a) / (b - a), 0.0, 1.0)
        return ndtr((x - a) / b)


def lognormal(mu, sigma, description="", units=""):
    return MarginalSpec("lognormal", (mu, sigma), description, units)


def uniform(a, b, description="", units=""):
    return MarginalSpec("uniform", (a, b), description, units)


def normal(m, s, description="", units=""):
    return MarginalSpec("normal", (m, s), description, units)


@dataclass(frozen=True)
class InputSpec:
    marginals: tuple

    def __post_init__(self):
        object.__setattr__(self, "marginals", tuple(self.marginals))
        if len(self.marginals) < 1:
            raise ValueError("an input spec needs at least one marginal")

    @property
    def d(self):
        return len(self.marginals)

    @classmethod
    def standard_normal(cls, d):
        return cls(tuple(normal(0.0, 1.0, f"xi_{i + 1}") for i in range(d)))

    def to_dict(self):
        return {
            "marginals": [
                {
                    "kind": m.kind,
                    "params": list(m.params),
                    "description": m.description,
                    "units": m.units,
                }
                for m in self.marginals
            ]
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            tuple(
                MarginalSpec(
                    m["kind"],
                    tuple(m["params"]),
                    m.get("description", ""),
                    m.get("units", ""),
                )
                for m in data["marginals"]
            )
        )


def _columns(spec, arr):
    arr = np.asarray(arr, dtype=np.float64)
    if arr.shape[-1] != spec.d:
        raise DimensionMismatch(f"expected {spec.d} components, got {arr.shape[-1]}")
    return arr


def from_gaussian(spec, xi):
    """Map standard-Gaussian points (vector or ``(N, d)`` matrix) to physical space."""
    xi = _columns(spec, xi)
    out = np.empty_like(xi)
    for k, m in enumerate(spec.marginals):
        out[..., k] = m.from_gaussian(xi[..., k])
    return out


def to_gaussian(spec, x):
    """Inverse of :func:`from_gaussian`, componentwise."""
    x = _columns(spec, x)
    out = np.empty_like(x)
    for k, m in enumerate(spec.marginals):
        out[..., k] = m.to_gaussian(x[..., k])
    return out


def sample_gaussian(n, d, seed):
    """``(n, d)`` i.i.d. standard normals from PCG64 seeded with ``seed``.

    Each raw 64-bit word ``w`` becomes ``u = ((w >> 11) + 0.5) / 2**53``, which
    lies strictly inside (0, 1), and then ``ndtri(u)``. The matrix is filled in
    row-major order.
    """
    if n < 1:
        raise ValueError("sample count must be >= 1")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    bitgen = np.random.PCG64(int(seed))
    raw = bitgen.random_raw(n * d)
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return ndtri(u).reshape(n, d)

"""Reference models: the borehole flow function and synthetic ridge functions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .density import DEFAULT_MC, kde
from .transforms import InputSpec, from_gaussian, lognormal, sample_gaussian, uniform

BOREHOLE_RW = 0.1


@dataclass(frozen=True)
class BenchModel:
    name: str
    input_spec: InputSpec
    evaluate: Callable[[np.ndarray], np.ndarray]
    units: str = ""

    @property
    def d(self):
        return self.input_spec.d

    def evaluate_gaussian(self, xi):
        """Model output at standard-Gaussian points."""
        return self.evaluate(from_gaussian(self.input_spec, xi))


def borehole_eval(x):
    """Water flow rate (m^3/yr) through a borehole.

    ``x`` holds ``(r, T_u, H_u, T_l, H_l, L, K_w)`` as a 7-vector or as the
    rows of an ``(N, 7)`` matrix. The borehole radius is fixed at 0.1 m.
    """
    x = np.asarray(x, dtype=np.float64)
    r, tu, hu, tl, hl, length, kw = np.moveaxis(x, -1, 0)
    if np.any(r <= BOREHOLE_RW) or np.any(tu <= 0) or np.any(tl <= 0) or np.any(kw <= 0):
        raise ValueError("borehole inputs outside the physical domain")
    log_ratio = np.log(r / BOREHOLE_RW)
    denom = log_ratio * (
        1.0 + 2.0 * length * tu / (log_ratio * BOREHOLE_RW**2 * kw) + tu / tl
    )
    return 2.0 * np.pi * tu * (hu - hl) / denom


def borehole_spec():
    return InputSpec(
        (
            lognormal(7.71, 1.0056, "radius of influence", "m"),
            uniform(63070, 115600, "transmissivity of upper aquifer", "m^2/yr"),
            uniform(990, 1110, "potentiometric head of upper aquifer", "m"),
            uniform(63.1, 116, "transmissivity of lower aquifer", "m^2/yr"),
            uniform(700, 820, "potentiometric head of lower aquifer", "m"),
            uniform(1120, 1680, "length of borehole", "m"),
            uniform(9855, 12045, "hydraulic conductivity of borehole", "m/yr"),
        )
    )


def borehole():
    return BenchModel("borehole", borehole_spec(), borehole_eval, "m^3/yr")


def ridge_test_fn(directions, poly, name="ridge"):
    """Synthetic model ``x -> poly(directions @ x)`` on standard normal inputs.

    ``directions`` must have orthonormal rows and ``poly`` is a PCE whose
    dimension equals the number of rows.
    """
    from .pce import evaluate

    c = np.atleast_2d(np.asarray(directions, dtype=np.float64))
    if c.shape[0] < 1 or c.size == 0:
        raise ValueError("need at least one direction")
    if np.max(np.abs(c @ c.T - np.eye(c.shape[0]))) > 1e-10:
        raise ValueError("directions must be orthonormal")
    if poly.basis.d != c.shape[0] or poly.projection is not None:
        raise ValueError("poly must be a plain PCE over the projected coordinates")
    if poly.basis.p > 5:
        raise ValueError("poly degree must be <= 5")

    def f(x):
        x = np.asarray(x, dtype=np.float64)
        return evaluate(poly, np.atleast_2d(x) @ c.T).reshape(x.shape[:-1])

    return BenchModel(name, InputSpec.standard_normal(c.shape[1]), f)


BENCHMARKS = {"borehole": borehole}


def get_benchmark(name):
    try:
        return BENCHMARKS[name]()
    except KeyError:
        raise KeyError(f"unknown benchmark {name!r}; known: {sorted(BENCHMARKS)}") from None


def reference_samples(model, n_mc=DEFAULT_MC, seed=0):
    if n_mc < 10_000:
        raise ValueError("reference needs at least 1e4 samples")
    return model.evaluate_gaussian(sample_gaussian(n_mc, model.d, seed))


def reference_density(model, n_mc=DEFAULT_MC, seed=0):
    """KDE of the model output under its own input distribution."""
    return kde(reference_samples(model, n_mc, seed))

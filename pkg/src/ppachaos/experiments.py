"""Experiment recipes behind the command-line interface.

Seed protocol for repeat ``i`` with base seed ``b``: training data and the
fit use ``b + i``, the held-out test set ``b + i + 10**6`` and surrogate Monte
Carlo sampling ``b + i + 2 * 10**6``. The reference density has its own seed.
Training sets are prefixes of one stream, so sizes in a convergence sweep are
nested.
"""

from __future__ import annotations

import os
import platform
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import scipy

from . import __version__, kernels
from .adaptation import classical_adaptation
from .bench_models import get_benchmark, reference_density
from .density import DensityEstimate, kde, pdf_error, relative_l2, surrogate_density
from .errors import ConfigError
from .pce import Dataset, PceModel
from .ppa import PpaModel, fit_ppa
from .ppr import PprModel, fit_ppr
from .transforms import sample_gaussian

TEST_SEED_OFFSET = 10**6
MC_SEED_OFFSET = 2 * 10**6


def run_seeds(base_seed, index):
    s = base_seed + index
    return {"data": s, "fit": s, "test": s + TEST_SEED_OFFSET, "mc": s + MC_SEED_OFFSET}


def versions():
    return {
        "ppachaos": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
        "kernel_backend": kernels.BACKEND,
    }


def benchmark_of(cfg):
    if cfg.benchmark is None:
        raise ConfigError("this command needs model.benchmark; a CSV model has no reference")
    return get_benchmark(cfg.benchmark)


def make_dataset(bm, n, seed):
    xi = sample_gaussian(n, bm.d, seed)
    return Dataset(xi, bm.evaluate_gaussian(xi))


def fit_method(cfg, data, seed):
    if cfg.method == "ppa":
        return fit_ppa(data, cfg.p, cfg.max_dim, cfg.stage_tol, seed, criterion=cfg.criterion,
                       inner_tol=cfg.inner_tol)
    if cfg.method == "ppr":
        return fit_ppr(data, cfg.p, cfg.max_stages, cfg.stage_tol, seed, criterion=cfg.criterion,
                       inner_tol=cfg.inner_tol)
    report = classical_adaptation(data, cfg.p, cfg.max_dim, seed=seed)
    return report.model


def model_summary(model):
    if isinstance(model, PpaModel):
        return {"method": "ppa", "r": model.r, "stopped_reason": model.stopped_reason,
                "rss_trace": [t["rss"] for t in model.fit_trace if not t.get("rejected")]}
    if isinstance(model, PprModel):
        return {"method": "ppr", "stages": model.n_stages, "stopped_reason": model.stopped_reason,
                "rss_trace": [t["rss"] for t in model.fit_trace if not t.get("rejected")]}
    if isinstance(model, PceModel):
        r = model.basis.d if model.projection is not None else model.input_dim
        return {"method": "pce", "r": r, "rss_trace": [] if model.rss is None else [model.rss]}
    raise TypeError(type(model).__name__)


def _cache_path(cache_dir, name, n_mc, seed):
    return Path(cache_dir) / f"reference_{name}_n{n_mc}_s{seed}.npz"


def cached_reference(bm, n_mc, seed, cache_dir=None):
    """Reference density, loaded from ``cache_dir`` when present."""
    if cache_dir is None:
        return reference_density(bm, n_mc, seed)
    path = _cache_path(cache_dir, bm.name, n_mc, seed)
    if path.exists():
        with np.load(path) as z:
            return DensityEstimate(z["grid"], z["values"], float(z["bandwidth"]), int(z["n_samples"]))
    ref = reference_density(bm, n_mc, seed)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + f".{os.getpid()}.tmp.npz")
    np.savez(tmp, grid=ref.grid, values=ref.values, bandwidth=ref.bandwidth, n_samples=ref.n_samples)
    os.replace(tmp, path)
    return ref


def single_run(cfg, n, index, ref):
    """Fit on ``n`` samples for repeat ``index`` and score it against ``ref``."""
    bm = benchmark_of(cfg)
    seeds = run_seeds(cfg.base_seed, index)
    data = make_dataset(bm, n, seeds["data"])
    model = fit_method(cfg, data, seeds["fit"])
    density = surrogate_density(model, cfg.uq_n_mc, seeds["mc"])
    out = {"n": n, "repeat": index, "seeds": seeds, **model_summary(model),
           "pdf_error": pdf_error(density, ref)}
    if cfg.test_size > 0:
        test = make_dataset(bm, cfg.test_size, seeds["test"])
        out["test_error"] = relative_l2(model.predict(test.inputs), test.outputs)
    if n >= 10 and np.std(data.outputs) > 0:
        out["data_pdf_error"] = pdf_error(kde(data.outputs), ref)
    return out, density


def _task(args):
    cfg, n, index, ref = args
    return single_run(cfg, n, index, ref)


def run_batch(cfg, tasks, ref, jobs=1):
    """Run ``(n, index)`` tasks, in parallel when ``jobs > 1``; order is preserved."""
    payload = [(cfg, n, i, ref) for n, i in tasks]
    if jobs > 1 and len(payload) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_task, payload))
    return [_task(a) for a in payload]


def convergence(cfg, ref, jobs=1):
    """Per-size PDF errors over ``n_repeats`` repeats."""
    results = run_batch(cfg, [(n, i) for n in cfg.sizes for i in range(cfg.n_repeats)], ref, jobs)
    runs = [r for r, _ in results]
    table = []
    for n in cfg.sizes:
        errs = np.array([r["pdf_error"] for r in runs if r["n"] == n])
        table.append({"n": n, "median": float(np.median(errs)), "mean": float(np.mean(errs)),
                      "min": float(np.min(errs)), "max": float(np.max(errs))})
    return table, runs


def robustness(cfg, ref, jobs=1):
    """Independent repeats at ``train_size``; per-repeat errors and densities."""
    if cfg.n_repeats < 2:
        raise ConfigError("robustness needs n_repeats >= 2")
    results = run_batch(cfg, [(cfg.train_size, i) for i in range(cfg.n_repeats)], ref, jobs)
    runs = [r for r, _ in results]
    errs = np.array([r["pdf_error"] for r in runs])
    summary = {"n_repeats": len(runs), "mean": float(np.mean(errs)), "std": float(np.std(errs, ddof=1)),
               "min": float(np.min(errs)), "max": float(np.max(errs))}
    return summary, runs, [d.on_grid(ref.grid) for _, d in results]

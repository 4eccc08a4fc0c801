"""Command-line pipeline: ``ppachaos {sample,fit,uq,convergence,robustness,predict,ingest}``.

Global flags ``--config PATH``, ``--seed INT``, ``--out DIR`` and ``--jobs N``
may appear before or after the subcommand. Errors print one line to stderr
and exit with status 2.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from pathlib import Path

import numpy as np

from . import experiments as ex
from .config import ExperimentConfig, load_config
from .density import empirical_cdf, kde, pdf_error, relative_l2, surrogate_samples
from .errors import DataFormatError, DimensionMismatch, PpaChaosError
from .io import (
    load_model,
    read_csv_columns,
    read_dataset,
    read_json,
    save_model,
    write_dataset,
    write_json,
    write_table,
)
from .bench_models import reference_samples
from .pce import Dataset
from .transforms import InputSpec, to_gaussian


def _file_digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _settings(args):
    cfg = load_config(args.config) if getattr(args, "config", None) else ExperimentConfig()
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["base_seed"] = args.seed
    if getattr(args, "out", None) is not None:
        changes["out_dir"] = args.out
    for name in ("method", "p", "benchmark"):
        value = getattr(args, name, None)
        if value is not None:
            changes[name] = value
    if getattr(args, "benchmark", None) is not None:
        changes["csv"] = None
    cfg = cfg.replace(**changes) if changes else cfg
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return cfg, out


def _cache_dir(cfg, out):
    return cfg.cache_dir if cfg.cache_dir is not None else str(out / "cache")


def _record(path, command, cfg, started, **fields):
    """Run record: config snapshot and hash, versions, wall clock, results."""
    write_json(path, {
        "command": command,
        "config": cfg.to_dict(),
        "config_sha256": cfg.digest(),
        "versions": ex.versions(),
        "wall_clock_s": time.perf_counter() - started,
        **fields,
    })


def _reference(cfg, out):
    bm = ex.benchmark_of(cfg)
    return bm, ex.cached_reference(bm, cfg.reference_n_mc, cfg.reference_seed, _cache_dir(cfg, out))


def cmd_sample(args):
    cfg, out = _settings(args)
    bm = ex.benchmark_of(cfg)
    sizes = args.n or [cfg.train_size]
    if any(n <= 0 for n in sizes):
        raise ValueError("sample sizes must be positive")
    seeds = ex.run_seeds(cfg.base_seed, 0)
    written = []
    for n in sizes:
        path = out / f"train_n{n}_seed{seeds['data']}.csv"
        write_dataset(path, ex.make_dataset(bm, n, seeds["data"]))
        written.append(str(path))
    test_size = cfg.test_size if args.test_size is None else args.test_size
    if test_size > 0:
        path = out / f"test_n{test_size}_seed{seeds['test']}.csv"
        write_dataset(path, ex.make_dataset(bm, test_size, seeds["test"]))
        written.append(str(path))
    for w in written:
        print(w)
    return 0


def cmd_fit(args):
    started = time.perf_counter()
    cfg, out = _settings(args)
    data = Dataset(*read_dataset(args.dataset))
    if args.benchmark is not None and ex.benchmark_of(cfg).d != data.d:
        raise DimensionMismatch(f"dataset has d={data.d}, benchmark {cfg.benchmark} has d={ex.benchmark_of(cfg).d}")
    model = ex.fit_method(cfg, data, cfg.base_seed)
    summary = ex.model_summary(model)
    meta = {"method": cfg.method, "p": cfg.p, "seed": cfg.base_seed, "n": data.n,
            "dataset": Path(args.dataset).name, "dataset_sha256": _file_digest(args.dataset),
            "benchmark": cfg.benchmark, "config_sha256": cfg.digest()}
    name = args.name or "model"
    model_path = out / f"{name}.json"
    save_model(model_path, model, meta)
    _record(out / f"{name}_record.json", "fit", cfg, started, metrics=summary,
            artifacts=[str(model_path)], dataset=meta["dataset"], dataset_sha256=meta["dataset_sha256"])
    print(model_path)
    return 0


def cmd_uq(args):
    started = time.perf_counter()
    cfg, out = _settings(args)
    model = load_model(args.model)
    bm, ref = _reference(cfg, out)
    if model.input_dim != bm.d:
        raise DimensionMismatch(f"model has d={model.input_dim}, benchmark has d={bm.d}")
    n_mc = args.n_mc or cfg.uq_n_mc
    seed = ex.run_seeds(cfg.base_seed, 0)["mc"]
    samples = surrogate_samples(model, n_mc, seed)
    density = kde(samples)
    ref_samples = reference_samples(bm, cfg.reference_n_mc, cfg.reference_seed)
    grid = ref.grid
    sur_cdf, ref_cdf = empirical_cdf(samples, grid), empirical_cdf(ref_samples, grid)
    write_table(out / "surrogate_pdf.csv", ["grid", "value"], zip(density.grid, density.values))
    write_table(out / "surrogate_cdf.csv", ["grid", "value"], zip(grid, sur_cdf))
    write_table(out / "reference_pdf.csv", ["grid", "value"], zip(ref.grid, ref.values))
    write_table(out / "reference_cdf.csv", ["grid", "value"], zip(grid, ref_cdf))
    report = {"pdf_error": pdf_error(density, ref), "cdf_error": relative_l2(sur_cdf, ref_cdf),
              "n_mc": n_mc, "mc_seed": seed, "reference_n_mc": cfg.reference_n_mc,
              "reference_seed": cfg.reference_seed}
    if args.data:
        data = Dataset(*read_dataset(args.data))
        data_kde = kde(data.outputs)
        write_table(out / "data_pdf.csv", ["grid", "value"], zip(data_kde.grid, data_kde.values))
        write_table(out / "data_cdf.csv", ["grid", "value"], zip(grid, empirical_cdf(data.outputs, grid)))
        report["data_pdf_error"] = pdf_error(data_kde, ref)
    write_json(out / "uq_report.json", report)
    _record(out / "uq_record.json", "uq", cfg, started, metrics=report, model=Path(args.model).name)
    print(f"pdf relative l2 = {report['pdf_error']:.4f}")
    return 0


def _run_rows(runs):
    rows = []
    for r in runs:
        dim = r.get("r", r.get("stages"))
        rows.append([r["n"], r["repeat"], r["seeds"]["data"], dim, r["pdf_error"], r.get("test_error", float("nan"))])
    return rows


_RUN_HEADER = ["n", "repeat", "seed", "dimension", "pdf_error", "test_error"]


def _write_runs(path, runs):
    rows = _run_rows(runs)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(_RUN_HEADER) + "\n")
        for row in rows:
            fh.write(",".join(str(v) if isinstance(v, int) else "%.17g" % v for v in row) + "\n")


def cmd_convergence(args):
    started = time.perf_counter()
    cfg, out = _settings(args)
    if args.sizes:
        cfg = cfg.replace(sizes=tuple(args.sizes))
    _, ref = _reference(cfg, out)
    table, runs = ex.convergence(cfg, ref, args.jobs)
    write_table(out / "convergence.csv", ["n", "median", "mean", "min", "max"],
                ([t["n"], t["median"], t["mean"], t["min"], t["max"]] for t in table))
    _write_runs(out / "convergence_runs.csv", runs)
    _record(out / "convergence_record.json", "convergence", cfg, started, table=table, runs=runs)
    for t in table:
        print(f"N={t['n']:4d}  median pdf error {t['median']:.4f}")
    return 0


def cmd_robustness(args):
    started = time.perf_counter()
    cfg, out = _settings(args)
    if args.repeats is not None:
        cfg = cfg.replace(n_repeats=args.repeats)
    _, ref = _reference(cfg, out)
    summary, runs, pdfs = ex.robustness(cfg, ref, args.jobs)
    _write_runs(out / "robustness.csv", runs)
    write_table(out / "robustness_pdfs.csv", ["grid", "reference"] + [f"repeat_{k}" for k in range(len(pdfs))],
                np.column_stack([ref.grid, ref.values, *pdfs]))
    write_json(out / "robustness_summary.json", summary)
    _record(out / "robustness_record.json", "robustness", cfg, started, summary=summary, runs=runs)
    print(f"mean {summary['mean']:.4f}  std {summary['std']:.4f}  max {summary['max']:.4f}")
    return 0


def cmd_predict(args):
    started = time.perf_counter()
    cfg, out = _settings(args)
    model = load_model(args.model)
    x, y = read_dataset(args.test, require_y=False)
    if x.shape[1] != model.input_dim:
        raise DimensionMismatch(f"test file has {x.shape[1]} inputs, model expects {model.input_dim}")
    pred = model.predict(x)
    report = {"n": int(x.shape[0])}
    if y is None:
        write_table(out / "predictions.csv", ["prediction"], ([v] for v in pred))
    else:
        write_table(out / "predictions.csv", ["y", "prediction"], zip(y, pred))
        report["relative_l2"] = relative_l2(pred, y)
        print(f"test relative l2 = {report['relative_l2']:.4f}")
    write_json(out / "predict_report.json", report)
    _record(out / "predict_record.json", "predict", cfg, started, metrics=report, model=Path(args.model).name)
    return 0


def cmd_ingest(args):
    cfg, out = _settings(args)
    header, values = read_csv_columns(args.csv)
    if values.shape[0] == 0:
        raise DataFormatError(f"{args.csv}: no data rows")
    inputs = args.inputs.split(",")
    qois = args.qoi.split(",")
    for col in inputs + qois:
        if col not in header:
            raise DataFormatError(f"{args.csv}: missing column {col!r}")
    x = values[:, [header.index(c) for c in inputs]]
    if args.input_spec:
        spec = InputSpec.from_dict(read_json(args.input_spec))
        if spec.d != len(inputs):
            raise DimensionMismatch(f"input spec has d={spec.d}, {len(inputs)} input columns given")
        xi = to_gaussian(spec, x)
    else:
        spec = InputSpec.standard_normal(len(inputs))
        xi = x
    written = []
    for q in qois:
        path = out / f"dataset_{q}.csv"
        write_dataset(path, Dataset(xi, values[:, header.index(q)]), qoi="y")
        written.append(str(path))
    write_json(out / "input_spec.json", {**spec.to_dict(), "columns": inputs, "qoi": qois,
                                         "source": Path(args.csv).name})
    for w in written:
        print(w)
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", default=argparse.SUPPRESS, help="TOML experiment file")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="base seed")
    common.add_argument("--out", metavar="DIR", default=argparse.SUPPRESS, help="output directory")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker processes")

    parser = argparse.ArgumentParser(prog="ppachaos", parents=[common],
                                     description="Projection pursuit adaptation surrogates.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", parents=[common], help="write seeded training/test CSVs")
    p.add_argument("--benchmark")
    p.add_argument("--n", type=int, nargs="+", help="training sizes")
    p.add_argument("--test-size", type=int)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("fit", parents=[common], help="fit a surrogate to a dataset CSV")
    p.add_argument("dataset")
    p.add_argument("--method", choices=("ppa", "ppr", "adaptation"))
    p.add_argument("--p", type=int)
    p.add_argument("--benchmark", help="check the dataset dimension against this benchmark")
    p.add_argument("--name", help="output file stem (default: model)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("uq", parents=[common], help="surrogate PDF/CDF against the reference")
    p.add_argument("model")
    p.add_argument("--benchmark")
    p.add_argument("--data", help="training CSV for the data-only PDF")
    p.add_argument("--n-mc", type=int)
    p.set_defaults(func=cmd_uq)

    p = sub.add_parser("convergence", parents=[common], help="PDF error against sample size")
    p.add_argument("--sizes", type=int, nargs="+")
    p.add_argument("--method", choices=("ppa", "ppr", "adaptation"))
    p.add_argument("--benchmark")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("robustness", parents=[common], help="repeated independent fits")
    p.add_argument("--repeats", type=int)
    p.add_argument("--method", choices=("ppa", "ppr", "adaptation"))
    p.add_argument("--benchmark")
    p.set_defaults(func=cmd_robustness)

    p = sub.add_parser("predict", parents=[common], help="predict at the points of a CSV")
    p.add_argument("model")
    p.add_argument("test")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("ingest", parents=[common], help="turn an external CSV into datasets")
    p.add_argument("csv")
    p.add_argument("--inputs", required=True, help="comma-separated input column names")
    p.add_argument("--qoi", required=True, help="comma-separated output column names")
    p.add_argument("--input-spec", help="JSON marginals for physical-space inputs")
    p.set_defaults(func=cmd_ingest)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("config", "seed", "out"):
        if not hasattr(args, name):
            setattr(args, name, None)
    if not hasattr(args, "jobs"):
        args.jobs = 1
    for name in ("method", "p", "benchmark"):
        if not hasattr(args, name):
            setattr(args, name, None)
    try:
        return args.func(args)
    except (PpaChaosError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"ppachaos {args.command}: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""End-to-end acceptance checks.

Each check records one ``PASS``/``FAIL`` line, printed in the pytest terminal
summary (see ``conftest.py``) or directly with ``python tests/test_acceptance.py``.
Tolerances are fixed here and never adapted to the results.
"""

from __future__ import annotations

import filecmp
import functools
import time
from pathlib import Path

import numpy as np
from scipy.special import ndtr

from ppachaos import experiments as ex
from ppachaos.adaptation import build_classical_rotation, correct_low_order, fit_adapted_regression, fit_pilot, pilot_coefficients
from ppachaos.cli import main as cli_main
from ppachaos.config import ExperimentConfig
from ppachaos.io import load_dataset, load_model, write_json, write_table
from ppachaos.linalg import complete_rows, orthogonality_error, principal_angles
from ppachaos.multiindex import basis_gradient_row, basis_row, enumerate_basis
from ppachaos.pce import Dataset, PceModel, evaluate, tensor_rule, transfer_coefficients
from ppachaos.ppa import fit_ppa
from ppachaos.ppr import fit_ppr
from ppachaos.transforms import sample_gaussian

RESULTS = []

N_SEEDS = 10
TRAIN = 150
PPA_PDF_MEDIAN = 0.05
PPA_R_MAX = 4
PPA_R_MIN_COUNT = 8
RUNTIME_LIMIT_S = 300.0
PPR_BAND = (0.04, 0.15)
WIN_COUNT = 8
CONV_SIZES = (20, 40, 60, 80, 100, 125, 150, 200)
CONV_SEEDS = 5
CONV_LIMIT = 0.05
CONV_FROM = 80
TEST_LIMIT = 0.05
ROBUST_REPEATS = 20
ROBUST_MEAN = 0.05
ROBUST_MAX = 0.08
ORTHO_TOL = 1e-10
FD_TOL = 1e-6
ROT_TOL = 1e-6
RIDGE_COS = 0.99
RIDGE_RSS = 1e-6
ANGLE_DEG = 2.0


def record(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def _cfg(**kw):
    return ExperimentConfig(**kw)


@functools.lru_cache(maxsize=None)
def reference():
    cfg = _cfg()
    return ex.cached_reference(ex.benchmark_of(cfg), cfg.reference_n_mc, cfg.reference_seed)


@functools.lru_cache(maxsize=None)
def headline_runs():
    started = time.perf_counter()
    reference()
    ppa = [ex.single_run(_cfg(method="ppa"), TRAIN, i, reference())[0] for i in range(N_SEEDS)]
    elapsed = time.perf_counter() - started
    ppr = [ex.single_run(_cfg(method="ppr"), TRAIN, i, reference())[0] for i in range(N_SEEDS)]
    return ppa, ppr, elapsed


def _fmt(values):
    return "[" + ", ".join(f"{v:.4f}" for v in values) + "]"


# -- 1 ----------------------------------------------------------------------
def test_borehole_ppa_headline():
    ppa, _, elapsed = headline_runs()
    errs = [r["pdf_error"] for r in ppa]
    dims = [r["r"] for r in ppa]
    med = float(np.median(errs))
    n_small = sum(d <= PPA_R_MAX for d in dims)
    ok = med <= PPA_PDF_MEDIAN and n_small >= PPA_R_MIN_COUNT and elapsed <= RUNTIME_LIMIT_S
    assert record(
        "1 borehole PPA headline",
        ok,
        f"median pdf error {med:.4f} (<= {PPA_PDF_MEDIAN}), errors {_fmt(errs)}, r = {dims} "
        f"({n_small}/10 <= {PPA_R_MAX}), runtime {elapsed:.1f}s (<= {RUNTIME_LIMIT_S:.0f}s)",
    )


# -- 2 ----------------------------------------------------------------------
def test_ppa_beats_ppr():
    ppa, ppr, _ = headline_runs()
    wins = sum(a["pdf_error"] < b["pdf_error"] for a, b in zip(ppa, ppr))
    ppr_errs = [r["pdf_error"] for r in ppr]
    med = float(np.median(ppr_errs))
    ok = wins >= WIN_COUNT and PPR_BAND[0] <= med <= PPR_BAND[1]
    assert record(
        "2 PPA beats PPR",
        ok,
        f"PPA better in {wins}/10 (need >= {WIN_COUNT}); PPR median {med:.4f} in {list(PPR_BAND)}; "
        f"PPR errors {_fmt(ppr_errs)}, stages {[r['stages'] for r in ppr]}",
    )


# -- 3 ----------------------------------------------------------------------
def test_convergence_curve():
    cfg = _cfg(method="ppa", sizes=CONV_SIZES, n_repeats=CONV_SEEDS)
    table, _ = ex.convergence(cfg, reference())
    med = {t["n"]: t["median"] for t in table}
    ok = all(med[n] <= CONV_LIMIT for n in CONV_SIZES if n >= CONV_FROM) and med[150] < med[20]
    assert record(
        "3 convergence curve",
        ok,
        "median pdf error by N " + ", ".join(f"{n}:{med[n]:.4f}" for n in CONV_SIZES)
        + f" (N>={CONV_FROM} <= {CONV_LIMIT}; N=150 < N=20)",
    )


# -- 4 ----------------------------------------------------------------------
def test_heldout_prediction():
    ppa, _, _ = headline_runs()
    errs = [r["test_error"] for r in ppa]
    med = float(np.median(errs))
    assert record("4 held-out prediction", med <= TEST_LIMIT,
                  f"median 100-point test relative l2 {med:.4f} (<= {TEST_LIMIT}), per seed {_fmt(errs)}")


# -- 5 ----------------------------------------------------------------------
def test_robustness_batch():
    cfg = _cfg(method="ppa", n_repeats=ROBUST_REPEATS, base_seed=1000)
    summary, _, _ = ex.robustness(cfg, reference())
    ok = summary["mean"] <= ROBUST_MEAN and summary["max"] <= ROBUST_MAX
    assert record("5 robustness batch", ok,
                  f"{ROBUST_REPEATS} repeats: mean {summary['mean']:.4f} (<= {ROBUST_MEAN}), "
                  f"std {summary['std']:.4f}, max {summary['max']:.4f} (<= {ROBUST_MAX})")


# -- 6 ----------------------------------------------------------------------
def test_basis_counting():
    a, b = len(enumerate_basis(7, 3)), len(enumerate_basis(4, 3))
    assert record("6 basis counting", a == 120 and b == 35, f"|J_7,3| = {a}, |J_4,3| = {b}")


# -- 7a ---------------------------------------------------------------------
def test_7a_orthonormality():
    worst = 0.0
    for d in (1, 2, 3):
        for p in range(5):
            basis = enumerate_basis(d, p)
            pts, w = tensor_rule(d, p + 1)
            psi = basis_row_matrix(basis, pts)
            gram = psi.T @ (w[:, None] * psi)
            worst = max(worst, float(np.max(np.abs(gram - np.eye(len(basis))))))
    assert record("7a Hermite orthonormality", worst < 1e-10, f"max |E[psi_a psi_b] - delta| = {worst:.2e} (< 1e-10)")


def basis_row_matrix(basis, pts):
    return np.array([basis_row(basis, x) for x in pts])


# -- 7b ---------------------------------------------------------------------
def test_7b_gradients():
    rng = np.random.default_rng(11)
    worst = 0.0
    h = 1e-6
    for d, p in ((1, 4), (2, 3), (3, 4)):
        basis = enumerate_basis(d, p)
        for _ in range(20):
            x = rng.uniform(-3, 3, d)
            for k in range(d):
                e = np.zeros(d)
                e[k] = h
                fd = (basis_row(basis, x + e) - basis_row(basis, x - e)) / (2 * h)
                g = basis_gradient_row(basis, x, k)
                scale = np.maximum(np.abs(g), 1.0)
                worst = max(worst, float(np.max(np.abs(fd - g) / scale)))
    assert record("7b gradient vs finite differences", worst < FD_TOL, f"max rel. err {worst:.2e} (< {FD_TOL})")


# -- 7c ---------------------------------------------------------------------
def test_7c_rotation_equivalence():
    rng = np.random.default_rng(3)
    point_err = trip_err = 0.0
    for p in (1, 2, 3):
        basis = enumerate_basis(2, p)
        for _ in range(5):
            model = PceModel(basis, rng.standard_normal(len(basis)))
            t = rng.uniform(0, 2 * np.pi)
            a = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
            moved = transfer_coefficients(model, a)
            xi = rng.standard_normal((100, 2))
            point_err = max(point_err, float(np.max(np.abs(evaluate(model, xi) - evaluate(moved, xi @ a.T)))))
            back = transfer_coefficients(moved, a.T)
            trip_err = max(trip_err, float(np.max(np.abs(back.coefficients - model.coefficients))))
    ok = point_err < ROT_TOL and trip_err < ROT_TOL
    assert record("7c rotation equivalence", ok,
                  f"pointwise {point_err:.2e}, round trip {trip_err:.2e} (< {ROT_TOL})")


# -- 7d ---------------------------------------------------------------------
def test_7d_orthogonality_everywhere():
    rng = np.random.default_rng(4)
    worst = 0.0
    for d in (2, 5, 7, 10):
        rows = complete_rows([], (rng.standard_normal(d) for _ in range(3 * d)), d)
        worst = max(worst, orthogonality_error(rows))
    x = sample_gaussian(150, 7, 0)
    y = ex.benchmark_of(_cfg()).evaluate_gaussian(x)
    model = fit_ppa(Dataset(x, y), 3, seed=0)
    worst = max(worst, orthogonality_error(model.stack))
    pilot = pilot_coefficients(fit_pilot(Dataset(x, y)))
    worst = max(worst, orthogonality_error(build_classical_rotation(pilot[1])))
    assert record("7d orthogonality", worst < ORTHO_TOL, f"max |QQ^T - I| = {worst:.2e} (< {ORTHO_TOL})")


# -- 7e ---------------------------------------------------------------------
def _ridge_data(c, n, seed):
    x = sample_gaussian(n, c.size, seed)
    t = x @ c
    return Dataset(x, t**3 + t)


def test_7e_ridge_recovery():
    c = np.array([1.0, -2.0, 0.5, 0.0, 3.0, -1.0, 1.5])
    c /= np.linalg.norm(c)
    data = _ridge_data(c, 200, 21)
    ppr = fit_ppr(data, 3, max_stages=1, seed=0)
    ppa = fit_ppa(data, 3, max_dim=1, seed=0)
    cos_r = abs(float(ppr.directions[0] @ c))
    cos_a = abs(float(ppa.stack[0] @ c))
    rss_r = float(np.sum((ppr.predict(data.inputs) - data.outputs) ** 2)) / data.n
    rss_a = ppa.g.rss / data.n
    ok = min(cos_r, cos_a) >= RIDGE_COS and max(rss_r, rss_a) < RIDGE_RSS
    assert record("7e ridge recovery", ok,
                  f"PPR |c.c| {cos_r:.6f} RSS/N {rss_r:.1e}; PPA |c.c| {cos_a:.6f} RSS/N {rss_a:.1e} "
                  f"(>= {RIDGE_COS}, < {RIDGE_RSS})")


# -- 7f ---------------------------------------------------------------------
def test_7f_subspace_recovery():
    rng = np.random.default_rng(5)
    q, _ = np.linalg.qr(rng.standard_normal((7, 7)))
    v = q[:2]
    x = sample_gaussian(2000, 7, 100)
    z = x @ v.T
    y = z[:, 0] ** 3 + z[:, 0] + 0.5 * z[:, 1] ** 2 + z[:, 0] * z[:, 1]
    model = fit_ppa(Dataset(x, y), 3, seed=0)
    angle = float(np.degrees(np.max(principal_angles(model.stack[:2], v)))) if model.r >= 2 else 90.0
    ok = model.r == 2 and model.stopped_reason == "converged" and angle < ANGLE_DEG
    assert record("7f 2-dim subspace recovery", ok,
                  f"r = {model.r} ({model.stopped_reason}), largest principal angle of the first two rows "
                  f"{angle:.3f} deg (need r = 2 converged, < {ANGLE_DEG} deg)")


# -- 7g ---------------------------------------------------------------------
def test_7g_low_order_correction():
    x = sample_gaussian(200, 4, 8)
    y = ex.benchmark_of(_cfg()).evaluate_gaussian(np.column_stack([x, np.zeros((200, 3))]))
    data = Dataset(x, y)
    pilot = pilot_coefficients(fit_pilot(data))
    rng = np.random.default_rng(9)
    a, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    adapted = fit_adapted_regression(data, a, 2)
    once = correct_low_order(adapted, pilot, a)
    twice = correct_low_order(once, pilot, a)
    idem = float(np.max(np.abs(once.coefficients - twice.coefficients)))
    back = transfer_coefficients(PceModel(once.basis, once.coefficients), a.T)
    pos = back.basis.first_order_positions()
    restore = max(float(np.max(np.abs(back.coefficients[pos] - pilot[1]))), abs(back.coefficients[0] - pilot[0]))
    ok = idem == 0.0 and restore < 1e-10
    assert record("7g low-order correction", ok,
                  f"idempotence diff {idem:.1e} (== 0), first-order restoration {restore:.1e} (< 1e-10)")


# -- 7h ---------------------------------------------------------------------
def _pipeline(out):
    args = ["--out", str(out), "--seed", "3"]
    assert cli_main(args + ["sample", "--n", "150"]) == 0
    train = out / "train_n150_seed3.csv"
    assert cli_main(args + ["fit", str(train)]) == 0
    assert cli_main(args + ["uq", str(out / "model.json"), "--data", str(train), "--n-mc", "20000"]) == 0
    assert cli_main(args + ["predict", str(out / "model.json"), str(out / "test_n100_seed1000003.csv")]) == 0
    return ["train_n150_seed3.csv", "test_n100_seed1000003.csv", "model.json", "surrogate_pdf.csv",
            "surrogate_cdf.csv", "data_pdf.csv", "uq_report.json", "predictions.csv", "predict_report.json"]


def test_7h_seed_determinism(tmp_path):
    files = _pipeline(tmp_path / "a")
    _pipeline(tmp_path / "b")
    same = [f for f in files if filecmp.cmp(tmp_path / "a" / f, tmp_path / "b" / f, shallow=False)]
    assert record("7h seed determinism", len(same) == len(files),
                  f"{len(same)}/{len(files)} primary outputs byte-identical")


# -- 8 ----------------------------------------------------------------------
def test_8_multi_qoi_ingest(tmp_path):
    d, n = 5, 200
    rng = np.random.default_rng(17)
    dirs, _ = np.linalg.qr(rng.standard_normal((d, 2)))
    c1, c2 = dirs[:, 0], dirs[:, 1]
    xi = sample_gaussian(n, d, 40)
    xt = sample_gaussian(100, d, 41)

    def qois(x):
        t1, t2 = x @ c1, x @ c2
        return t1**3 + t1, 0.5 * t2**2 + 2 * t2

    u = ndtr(xi)
    names = [f"u{k}" for k in range(d)]
    q1, q2 = qois(xi)
    write_table(tmp_path / "ext.csv", names + ["vmax", "dmax"], np.column_stack([u, q1, q2]))
    write_json(tmp_path / "spec.json", {"marginals": [{"kind": "uniform", "params": [0.0, 1.0]}] * d})
    out = tmp_path / "o"
    assert cli_main(["--out", str(out), "ingest", str(tmp_path / "ext.csv"), "--inputs", ",".join(names),
                     "--qoi", "vmax,dmax", "--input-spec", str(tmp_path / "spec.json")]) == 0
    details, ok = [], True
    for q, c, yt in (("vmax", c1, qois(xt)[0]), ("dmax", c2, qois(xt)[1])):
        assert cli_main(["--out", str(out), "fit", str(out / f"dataset_{q}.csv"), "--name", q]) == 0
        model = load_model(out / f"{q}.json")
        data = load_dataset(out / f"dataset_{q}.csv")
        cos = abs(float(model.stack[0] @ c))
        rss = float(np.mean((model.predict(data.inputs) - data.outputs) ** 2))
        mse = float(np.mean((model.predict(xt) - yt) ** 2))
        ok &= cos >= RIDGE_COS and rss < RIDGE_RSS and mse < RIDGE_RSS
        details.append(f"{q}: r={model.r} |c.c| {cos:.6f} RSS/N {rss:.1e} test MSE {mse:.1e}")
    assert record("8 multi-QoI ingest", ok, "; ".join(details) + f" (>= {RIDGE_COS}, < {RIDGE_RSS})")


if __name__ == "__main__":
    import tempfile

    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                    with tempfile.TemporaryDirectory() as tmp:
                        fn(Path(tmp))
                else:
                    fn()
            except AssertionError:
                pass

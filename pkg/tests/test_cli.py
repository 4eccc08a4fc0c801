import json

import numpy as np
import pytest

from ppachaos.cli import main
from ppachaos.io import load_model, read_csv_columns, read_dataset


@pytest.fixture
def out(tmp_path):
    return tmp_path / "o"


def test_sample_fit_predict(out):
    assert main(["sample", "--n", "60", "--test-size", "20", "--seed", "4", "--out", str(out)]) == 0
    train, test = out / "train_n60_seed4.csv", out / "test_n20_seed1000004.csv"
    x, y = read_dataset(train)
    assert x.shape == (60, 7) and y.shape == (60,)
    # global flags accepted before the subcommand too
    assert main(["--out", str(out), "fit", str(train), "--p", "2"]) == 0
    model = load_model(out / "model.json")
    assert np.allclose(model.predict(x), model.predict(x))
    assert main(["--out", str(out), "predict", str(out / "model.json"), str(test)]) == 0
    header, pred = read_csv_columns(out / "predictions.csv")
    assert pred.shape[0] == 20
    report = json.loads((out / "predict_report.json").read_text())
    assert report


def test_nested_sample_prefix(out):
    assert main(["sample", "--n", "20", "40", "--test-size", "0", "--seed", "1", "--out", str(out)]) == 0
    a, _ = read_dataset(out / "train_n20_seed1.csv")
    b, _ = read_dataset(out / "train_n40_seed1.csv")
    assert np.array_equal(a, b[:20])


@pytest.mark.slow
def test_uq(out):
    main(["sample", "--n", "100", "--test-size", "0", "--out", str(out)])
    main(["fit", str(out / "train_n100_seed0.csv"), "--out", str(out)])
    assert main(["uq", str(out / "model.json"), "--n-mc", "20000", "--data", str(out / "train_n100_seed0.csv"),
                 "--out", str(out)]) == 0
    for f in ("surrogate_pdf.csv", "reference_pdf.csv", "data_pdf.csv", "uq_report.json"):
        assert (out / f).exists()


def test_errors_exit_2(tmp_path, out, capsys):
    assert main(["fit", str(tmp_path / "missing.csv"), "--out", str(out)]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("xi_1,y\n1,oops\n")
    assert main(["fit", str(bad), "--out", str(out)]) == 2
    cfg = tmp_path / "c.toml"
    cfg.write_text("[method]\nname = 'nope'\n")
    assert main(["--config", str(cfg), "sample", "--out", str(out)]) == 2
    assert "error" in capsys.readouterr().err.lower()


def test_ingest_requires_columns(tmp_path, out):
    src = tmp_path / "ext.csv"
    src.write_text("a,b,q\n0.1,0.2,1\n0.3,0.4,2\n")
    assert main(["ingest", str(src), "--inputs", "a,zz", "--qoi", "q", "--out", str(out)]) == 2

"""Model files and dataset CSVs.

Model files are JSON with an explicit ``format_version``; every float is
written with 17 significant digits so a reload is bit-exact. Datasets are
comma-separated with a ``xi_1,...,xi_d,y`` header.
"""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .errors import DataFormatError, DimensionMismatch
from .multiindex import enumerate_basis
from .pce import Dataset, PceModel
from .ppa import PpaModel
from .ppr import PprModel

FORMAT_VERSION = 1


def _fmt_float(x):
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    text = "%.17g" % x
    # keep floats recognizable as floats
    return text if any(c in text for c in ".en") else text + ".0"


def _emit(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in obj) + "]"
        items = (pad + _emit(v, indent, level + 1) for v in obj)
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (pad + json.dumps(str(k)) + ": " + _emit(v, indent, level + 1) for k, v in obj.items())
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=1):
    """JSON text with floats at 17 significant digits and stable key order."""
    return _emit(obj, indent, 0) + "\n"


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: invalid JSON ({exc})") from None


def _pce_dict(model):
    out = {
        "d": model.basis.d,
        "p": model.basis.p,
        "index_list": model.basis.indices.tolist(),
        "coefficients": model.coefficients.tolist(),
    }
    if model.projection is not None:
        out["projection"] = model.projection.tolist()
    return out


def _pce_from(d):
    try:
        basis = enumerate_basis(int(d["d"]), int(d["p"]))
        if [list(map(int, r)) for r in d["index_list"]] != basis.indices.tolist():
            raise DataFormatError("index_list does not match the graded ordering")
        return PceModel(basis, np.array(d["coefficients"], dtype=np.float64), d.get("projection"))
    except (KeyError, TypeError, DimensionMismatch) as exc:
        raise DataFormatError(f"malformed PCE block: {exc}") from None


def _stage_summary(trace):
    out = []
    for t in trace:
        row = {k: t[k] for k in ("stage", "rss", "score") if k in t}
        if "inner" in t:
            row["iterations"] = len(t["inner"])
        if t.get("rejected"):
            row["rejected"] = True
        out.append(row)
    return out


def model_to_dict(model, metadata=None):
    """Structured form of a PCE, PPR or PPA model."""
    doc = {"format_version": FORMAT_VERSION}
    if isinstance(model, PpaModel):
        doc.update(kind="ppa", input_dim=model.input_dim, seed=model.seed,
                   stopped_reason=model.stopped_reason, g=_pce_dict(model.g),
                   fit_trace=_stage_summary(model.fit_trace))
    elif isinstance(model, PprModel):
        doc.update(kind="ppr", input_dim=model.input_dim, p=model.p, seed=model.seed,
                   stopped_reason=model.stopped_reason, mean=model.mean,
                   stages=[{"direction": f.projection[0].tolist(), "coefficients": f.coefficients.tolist()}
                           for f in model.smooths],
                   fit_trace=_stage_summary(model.fit_trace))
    elif isinstance(model, PceModel):
        doc.update(kind="pce", input_dim=model.input_dim, **_pce_dict(model))
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    doc["metadata"] = dict(metadata or {})
    return doc


def model_from_dict(doc):
    if doc.get("format_version") != FORMAT_VERSION:
        raise DataFormatError(f"unsupported format_version {doc.get('format_version')!r}")
    kind = doc.get("kind")
    try:
        if kind == "pce":
            return _pce_from(doc)
        if kind == "ppa":
            return PpaModel(_pce_from(doc["g"]), tuple(doc.get("fit_trace", ())), int(doc.get("seed", 0)),
                            doc.get("stopped_reason", ""))
        if kind == "ppr":
            p = int(doc["p"])
            basis = enumerate_basis(1, p)
            smooths = tuple(
                PceModel(basis, np.array(s["coefficients"], dtype=np.float64),
                         np.array([s["direction"]], dtype=np.float64))
                for s in doc["stages"]
            )
            return PprModel(float(doc["mean"]), smooths, p, int(doc["input_dim"]),
                            tuple(doc.get("fit_trace", ())), doc.get("stopped_reason", ""),
                            int(doc.get("seed", 0)))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DataFormatError):
            raise
        raise DataFormatError(f"malformed {kind} model: {exc}") from None
    raise DataFormatError(f"unknown model kind {kind!r}")


def save_model(path, model, metadata=None):
    write_json(path, model_to_dict(model, metadata))


def load_model(path):
    return model_from_dict(read_json(path))


def write_table(path, header, rows):
    """CSV with a header; floats at 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt_float(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def write_dataset(path, data, qoi="y"):
    header = [f"xi_{k + 1}" for k in range(data.d)] + [qoi]
    write_table(path, header, np.column_stack([data.inputs, data.outputs]).astype(np.float64))


def read_csv_columns(path):
    """Header and float matrix of a CSV, reporting bad rows by line number."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataFormatError(f"{path}:{line_no}: expected {len(header)} fields, got {len(row)}")
            try:
                vals = [float(c) for c in row]
            except ValueError:
                raise DataFormatError(f"{path}:{line_no}: unparseable value in {row!r}") from None
            if not all(math.isfinite(v) for v in vals):
                raise DataFormatError(f"{path}:{line_no}: non-finite value")
            rows.append(vals)
    if len(set(header)) != len(header):
        raise DataFormatError(f"{path}: duplicate column names")
    return header, np.array(rows, dtype=np.float64).reshape(len(rows), len(header))


def read_dataset(path, require_y=True):
    """Read an ``xi_1..xi_d[,y]`` CSV.

    Returns ``(inputs, outputs)``; ``outputs`` is ``None`` when the file has
    no ``y`` column and ``require_y`` is false.
    """
    header, values = read_csv_columns(path)
    if values.shape[0] == 0:
        raise DataFormatError(f"{path}: no data rows")
    xi_cols = [k for k, h in enumerate(header) if h.startswith("xi_")]
    expected = [f"xi_{k + 1}" for k in range(len(xi_cols))]
    if [header[k] for k in xi_cols] != expected or not xi_cols:
        raise DataFormatError(f"{path}: input columns must be named xi_1..xi_d in order")
    others = [h for h in header if not h.startswith("xi_")]
    if len(others) > 1:
        raise DataFormatError(f"{path}: expected at most one output column, got {others}")
    x = values[:, xi_cols]
    if others:
        return x, values[:, header.index(others[0])]
    if require_y:
        raise DataFormatError(f"{path}: missing output column")
    return x, None


def load_dataset(path):
    x, y = read_dataset(path)
    return Dataset(x, y)

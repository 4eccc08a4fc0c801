"""Experiment configuration read from TOML.

Example::

    [model]
    benchmark = "borehole"        # or csv = "data.csv", qoi = "y"

    [method]
    name = "ppa"                  # ppa | ppr | adaptation
    p = 3

    [samples]
    train_size = 150
    test_size = 100
    sizes = [20, 40, 60, 80, 100, 125, 150, 200]

    [seeds]
    base_seed = 0
    n_repeats = 10

    [tolerances]
    stage_tol = 0.02
    inner_tol = 1e-4

    [reference]
    n_mc = 100000
    seed = 12345

    [outputs]
    dir = "out"
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError

METHODS = ("ppa", "ppr", "adaptation")


@dataclass(frozen=True)
class ExperimentConfig:
    benchmark: str | None = "borehole"
    csv: str | None = None
    qoi: str = "y"
    method: str = "ppa"
    p: int = 3
    max_dim: int | None = None
    max_stages: int = 10
    criterion: str = "loo"
    train_size: int = 150
    test_size: int = 100
    sizes: tuple = (20, 40, 60, 80, 100, 125, 150, 200)
    base_seed: int = 0
    n_repeats: int = 10
    stage_tol: float = 0.02
    inner_tol: float = 1e-4
    reference_n_mc: int = 100_000
    reference_seed: int = 12345
    uq_n_mc: int = 100_000
    cache_dir: str | None = None
    out_dir: str = "out"
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if (self.benchmark is None) == (self.csv is None):
            raise ConfigError("exactly one of model.benchmark or model.csv must be set")
        if self.p < 0:
            raise ConfigError("p must be non-negative")
        sizes = tuple(int(n) for n in self.sizes)
        if not sizes or any(n <= 0 for n in sizes) or any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ConfigError("sample sizes must be positive and strictly ascending")
        object.__setattr__(self, "sizes", sizes)
        if self.n_repeats < 1:
            raise ConfigError("n_repeats must be >= 1")
        if self.train_size < 1 or self.test_size < 0:
            raise ConfigError("train_size must be >= 1 and test_size >= 0")
        if not (self.stage_tol >= 0 and self.inner_tol >= 0):
            raise ConfigError("tolerances must be non-negative")
        if self.criterion not in ("loo", "press", "rss"):
            raise ConfigError(f"unknown stage criterion {self.criterion!r}")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        d = dataclasses.asdict(self)
        d.pop("extra")
        d["sizes"] = list(d["sizes"])
        return d

    def digest(self):
        """SHA-256 of the canonical JSON form.

        Output and cache locations are left out so that the same run in two
        directories carries the same digest.
        """
        body = {k: v for k, v in self.to_dict().items() if k not in ("out_dir", "cache_dir")}
        text = json.dumps(body, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


# (section, key) -> field name
_LAYOUT = {
    ("model", "benchmark"): "benchmark",
    ("model", "csv"): "csv",
    ("model", "qoi"): "qoi",
    ("method", "name"): "method",
    ("method", "p"): "p",
    ("method", "max_dim"): "max_dim",
    ("method", "max_stages"): "max_stages",
    ("method", "criterion"): "criterion",
    ("samples", "train_size"): "train_size",
    ("samples", "test_size"): "test_size",
    ("samples", "sizes"): "sizes",
    ("seeds", "base_seed"): "base_seed",
    ("seeds", "n_repeats"): "n_repeats",
    ("tolerances", "stage_tol"): "stage_tol",
    ("tolerances", "inner_tol"): "inner_tol",
    ("reference", "n_mc"): "reference_n_mc",
    ("reference", "seed"): "reference_seed",
    ("reference", "cache_dir"): "cache_dir",
    ("uq", "n_mc"): "uq_n_mc",
    ("outputs", "dir"): "out_dir",
}


def config_from_mapping(doc):
    kwargs = {}
    for section, table in doc.items():
        if not isinstance(table, dict):
            raise ConfigError(f"top-level key {section!r} must be a table")
        for key, value in table.items():
            name = _LAYOUT.get((section, key))
            if name is None:
                raise ConfigError(f"unknown setting [{section}] {key}")
            kwargs[name] = value
    if "csv" in kwargs and "benchmark" not in kwargs:
        kwargs["benchmark"] = None
    if "sizes" in kwargs:
        kwargs["sizes"] = tuple(kwargs["sizes"])
    try:
        return ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path):
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return config_from_mapping(doc)

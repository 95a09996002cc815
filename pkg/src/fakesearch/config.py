"""Run configuration stored as INI and the JSON/CSV writers used by the CLI."""
from __future__ import annotations

import configparser
import csv
import dataclasses
import io
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .model import ModelParams, news_from_dict

SCHEMA_VERSION = 1
SIG_DIGITS = 12
ENV_CONFIG = "FAKESEARCH_CONFIG"

CANONICAL = {"mu": 0.5, "theta": 0.7, "beta": 0.4, "rho": 0.1, "sigma": 0.1}


@dataclass
class GridConfig:
    n_time: int = 201
    t_max_factor: float = 1.5


@dataclass
class SweepConfig:
    param: str = "sigma"
    start: float = 0.01
    stop: float = 0.15
    steps: int = 15


@dataclass
class MonteCarloConfig:
    n: int = 100_000
    seed: int = 0
    threads: int = 1
    bins: int = 10


@dataclass
class ToleranceConfig:
    analytic: float = 1e-5
    se_band: float = 3.0


@dataclass
class OutputConfig:
    dir: str = ""
    format: str = "json"


@dataclass
class RunConfig:
    model: dict = field(default_factory=lambda: dict(CANONICAL))
    hazard: dict = field(default_factory=lambda: {"family": "hyperbolic", "a": 1.0, "b": 1.0})
    grid: GridConfig = field(default_factory=GridConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    montecarlo: MonteCarloConfig = field(default_factory=MonteCarloConfig)
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def params(self):
        missing = [k for k in CANONICAL if k not in self.model]
        if missing:
            raise ConfigError(f"model.{missing[0]}", "missing")
        try:
            return ModelParams(**{k: float(self.model[k]) for k in CANONICAL})
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError("model", str(exc)) from None

    def news(self):
        try:
            return news_from_dict(self.hazard)
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("hazard", str(exc)) from None

    # -- INI ---------------------------------------------------------------

    def to_ini(self):
        cp = configparser.ConfigParser(interpolation=None)
        cp["model"] = {k: repr(float(v)) for k, v in self.model.items()}
        cp["hazard"] = {k: _ini_value(v) for k, v in self.hazard.items()}
        for name in ("grid", "sweep", "montecarlo", "tolerances", "output"):
            cp[name] = {k: _ini_value(v) for k, v in dataclasses.asdict(getattr(self, name)).items()}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text):
        cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";",))
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError("file", str(exc)) from None
        cfg = cls()
        if cp.has_section("model"):
            cfg.model = dict(cfg.model)
            for k, v in cp["model"].items():
                if k not in CANONICAL:
                    raise ConfigError(f"model.{k}", "unknown key")
                cfg.model[k] = _parse_float(f"model.{k}", v)
        if cp.has_section("hazard"):
            haz = {}
            for k, v in cp["hazard"].items():
                if k == "family":
                    haz[k] = v.strip()
                elif k in ("knots", "values"):
                    haz[k] = [_parse_float(f"hazard.{k}", x) for x in v.split(",") if x.strip()]
                else:
                    haz[k] = _parse_float(f"hazard.{k}", v)
            cfg.hazard = haz
        for name in ("grid", "sweep", "montecarlo", "tolerances", "output"):
            if not cp.has_section(name):
                continue
            sub = getattr(cfg, name)
            types = {f.name: type(getattr(sub, f.name)) for f in dataclasses.fields(sub)}
            for k, v in cp[name].items():
                if k not in types:
                    raise ConfigError(f"{name}.{k}", "unknown key")
                setattr(sub, k, _coerce(f"{name}.{k}", v, types[k]))
        cfg.check()
        return cfg

    @classmethod
    def load(cls, path=None):
        """Read ``path``, else the file named by ``FAKESEARCH_CONFIG``, else the canonical defaults."""
        path = path or os.environ.get(ENV_CONFIG)
        if not path:
            return cls()
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_ini(fh.read())
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None

    def check(self):
        if self.output.format not in ("json", "csv", "both"):
            raise ConfigError("output.format", "must be json, csv or both")
        if self.grid.n_time < 2:
            raise ConfigError("grid.n_time", "need at least 2 points")
        if self.montecarlo.n < 1:
            raise ConfigError("montecarlo.n", "must be positive")
        if self.montecarlo.threads < 1:
            raise ConfigError("montecarlo.threads", "must be positive")
        if self.sweep.steps < 1:
            raise ConfigError("sweep.steps", "must be positive")

    def to_dict(self):
        return dataclasses.asdict(self)


def _ini_value(v):
    if isinstance(v, (list, tuple)):
        return ", ".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_float(name, text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(name, f"not a number: {text!r}") from None


def _coerce(name, text, typ):
    if typ is int:
        try:
            return int(text)
        except ValueError:
            raise ConfigError(name, f"not an integer: {text!r}") from None
    if typ is float:
        return _parse_float(name, text)
    return text.strip()


# -- output ----------------------------------------------------------------


def fmt(x):
    """12 significant digits; integers and booleans pass through."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.{SIG_DIGITS}g}")
    return x


def rounded(obj):
    if isinstance(obj, dict):
        return {str(k): rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [rounded(v) for v in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return rounded(obj.to_dict() if hasattr(obj, "to_dict") else dataclasses.asdict(obj))
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return fmt(obj)


def result_document(command, config, payload):
    return rounded({"schema_version": SCHEMA_VERSION, "command": command,
                    "config": config.to_dict(), "result": payload})


def dump_json(doc):
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _csv_cell(v):
    v = fmt(v)
    if v is None:
        return "nan"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.{SIG_DIGITS}g}"
    return v

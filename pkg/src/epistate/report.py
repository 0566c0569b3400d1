"""Experiment reports: JSON and CSV encodings, bootstrap intervals."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

SCHEMA = 1
RESAMPLES = 1000
LEVEL = 0.95


def _num(x):
    """JSON-safe number: Fractions and numpy scalars to float, non-finite to None."""
    if x is None:
        return None
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass
class Derived:
    value: float | None
    ci_low: float | None = None
    ci_high: float | None = None

    def as_dict(self) -> dict:
        return {"value": _num(self.value), "ci_low": _num(self.ci_low), "ci_high": _num(self.ci_high)}


@dataclass
class ExperimentReport:
    experiment: str
    engine: str | None
    seed: int
    shots: int
    params: dict
    counts: dict[str, int] = field(default_factory=dict)
    derived: dict[str, Derived] = field(default_factory=dict)
    status: str = "ok"
    elapsed: float = 0.0  # wall time; never serialized

    def as_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "experiment": self.experiment,
            "engine": self.engine,
            "seed": self.seed,
            "shots": self.shots,
            "status": self.status,
            "params": {k: _param(v) for k, v in self.params.items()},
            "counts": {k: int(v) for k, v in self.counts.items()},
            "derived": {k: d.as_dict() for k, d in self.derived.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "count"])
        for k, v in self.counts.items():
            w.writerow([k, int(v)])
        w.writerow([])
        w.writerow(["name", "value", "ci_low", "ci_high"])
        for k, d in self.derived.items():
            row = d.as_dict()
            w.writerow([k] + ["" if row[c] is None else repr(row[c]) for c in ("value", "ci_low", "ci_high")])
        return buf.getvalue()

    def encode(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise ValueError(f"unknown format {fmt!r}")


def _param(v):
    if isinstance(v, (list, tuple)):
        return [_param(x) for x in v]
    if isinstance(v, dict):
        return {k: _param(x) for k, x in v.items()}
    if isinstance(v, str) or v is None:
        return v
    return _num(v)


def parse_csv(text: str) -> tuple[dict[str, int], dict[str, Derived]]:
    """Inverse of ``ExperimentReport.to_csv``."""
    counts, derived = {}, {}
    section = None
    for row in csv.reader(io.StringIO(text)):
        if not row:
            continue
        if row == ["label", "count"]:
            section = "counts"
        elif row == ["name", "value", "ci_low", "ci_high"]:
            section = "derived"
        elif section == "counts":
            counts[row[0]] = int(row[1])
        elif section == "derived":
            vals = [None if x == "" else float(x) for x in row[1:]]
            derived[row[0]] = Derived(*vals)
    return counts, derived


def bootstrap(
    cells: Sequence[Sequence[int]],
    statistic: Callable[..., np.ndarray],
    rng: np.random.Generator,
    resamples: int = RESAMPLES,
    level: float = LEVEL,
) -> tuple[float, float]:
    """Percentile interval of ``statistic`` under multinomial resampling.

    Each entry of ``cells`` is one independent run's category counts; it is
    resampled as Multinomial(total, observed frequencies), which is the
    same as resampling its shots with replacement. ``statistic`` receives
    one ``(resamples, k)`` array per run and returns ``resamples`` values.
    """
    draws = []
    for c in cells:
        c = np.asarray(c, dtype=np.int64)
        n = int(c.sum())
        if n == 0:
            raise ValueError("cannot bootstrap an empty run")
        draws.append(rng.multinomial(n, c / n, size=resamples))
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.asarray(statistic(*draws), dtype=float)
    vals = vals[~np.isnan(vals)]
    if vals.size == 0:
        return math.nan, math.nan
    lo, hi = np.percentile(vals, [50 * (1 - level), 50 * (1 + level)])
    return float(lo), float(hi)

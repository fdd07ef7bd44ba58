"""Explanation reports: a JSON carrier for per-feature intervals."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from .core import Interval, ShapleyIntervalSet
from .shapley import decision_strategy

SCHEMA_VERSION = 1
STRATEGY_ETAS = (0.0, 0.5, 1.0)


@dataclass(frozen=True)
class FeatureRecord:
    name: str
    precise: float
    raw: tuple[float, float]
    reduced: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "raw", tuple(float(v) for v in self.raw))
        object.__setattr__(self, "reduced", tuple(float(v) for v in self.reduced))
        raw, red = Interval(*self.raw), Interval(*self.reduced)
        if not red.issubset(raw, tol=1e-9):
            raise ValueError(f"feature {self.name!r}: reduced {red} not inside raw {raw}")


@dataclass(frozen=True)
class ExplanationReport:
    instance: tuple[float, ...]
    config: dict
    features: tuple[FeatureRecord, ...]
    gain: tuple[float, float]
    strategy: dict
    timing: dict = field(default_factory=dict)
    warning: str | None = None
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        d = asdict(self)
        d["instance"] = list(self.instance)
        d["gain"] = list(self.gain)
        d["features"] = [{"name": f.name, "precise": f.precise, "raw": list(f.raw),
                          "reduced": list(f.reduced)} for f in self.features]
        return d

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, d: dict) -> "ExplanationReport":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema_version {d.get('schema_version')!r}")
        feats = tuple(FeatureRecord(f["name"], float(f["precise"]), tuple(f["raw"]),
                                    tuple(f["reduced"])) for f in d["features"])
        return cls(tuple(float(v) for v in d["instance"]), dict(d["config"]), feats,
                   tuple(float(v) for v in d["gain"]), dict(d["strategy"]),
                   dict(d.get("timing", {})), d.get("warning"), d["schema_version"])

    @classmethod
    def from_json(cls, text: str) -> "ExplanationReport":
        return cls.from_dict(json.loads(text))

    def save(self, path: "str | Path") -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: "str | Path") -> "ExplanationReport":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def strategy_picks(intervals: Sequence[Interval], names: Sequence[str],
                   etas: Sequence[float] = ()) -> dict:
    """Feature chosen by the eta-mixture rule for each eta in ``STRATEGY_ETAS``
    plus any extra ``etas``."""
    picks = {}
    for eta in sorted({*STRATEGY_ETAS, *(float(e) for e in etas)}):
        picks[str(eta)] = names[decision_strategy(intervals, eta)]
    return picks


def build_report(result: ShapleyIntervalSet, instance: Sequence[float], names: Sequence[str],
                 config: dict, timing: dict | None = None,
                 etas: Sequence[float] = ()) -> ExplanationReport:
    if len(names) != result.n_features:
        raise ValueError("one name per feature required")
    feats = tuple(FeatureRecord(n, p, (r.lo, r.hi), (red.lo, red.hi))
                  for n, p, r, red in zip(names, result.precise, result.raw, result.reduced))
    return ExplanationReport(tuple(float(v) for v in instance), dict(config), feats,
                             (result.gain.lo, result.gain.hi),
                             strategy_picks(result.reduced, list(names), etas),
                             dict(timing or {}), result.warning)


def report_schema() -> dict:
    text = resources.files("impshap").joinpath("schemas/report.schema.json").read_text("utf-8")
    return json.loads(text)

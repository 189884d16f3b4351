"""Run configuration, dataset preparation and run-directory I/O.

Every random draw comes from one root seed.  Each pipeline stage gets its
own stream, ``SeedSequence(seed, spawn_key=STREAMS[stage])``; the fit stage
extends its key with the submodel index and the chain index.
"""

from __future__ import annotations

import datetime as dt
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from .bayes.fit import SUBMODELS, read_draws_csv, sampler_config
from .bayes.models import N_PRED, ModelData
from .bayes.sampler import PosteriorChains
from .features import (
    FEATURE_NAMES,
    GuessDistribution,
    UsageTable,
    WordFeatures,
    feature_table,
    read_features_csv,
    write_features_csv,
)
from .ingest import COUNT_COLUMNS, DailyRecord, TimeScale, read_dataset
from .lasso import DesignMatrix, standardize
from .wordbank import WordBank, load_sgb, load_wordbank

DEFAULT_PREDICTORS = ("unique_letters", "usage", "avg_yellow", "subset_entropy")

STREAMS = {"fit": (1,), "predict": (2,), "retrodict": (3,), "difficulty": (4,), "synth": (5,)}


class ConfigError(ValueError):
    pass


def stream_rng(seed: int, stage: str) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=STREAMS[stage])))


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by all commands.

    ``warmup``, ``draws`` and ``thin`` of ``None`` keep each submodel's own
    defaults from the chosen sampler ``profile``.  Paths of ``None`` mean
    the bundled wordbank / usage table.
    """

    seed: int = 0
    chains: int = 4
    warmup: int | None = None
    draws: int | None = None
    thin: int | None = None
    profile: str = "default"
    lam: float = 0.1
    min_hits: int = 4
    predictors: tuple[str, ...] = DEFAULT_PREDICTORS
    wordbank: str | None = None
    usage: str | None = None
    dataset: str | None = None
    features: str | None = None
    predict_draws: int = 4000
    retrodict_draws: int = 1000
    difficulty_draws: int = 400

    def __post_init__(self):
        if self.chains < 2:
            raise ConfigError("chains must be at least 2")
        for name in ("warmup", "draws", "thin", "predict_draws", "retrodict_draws", "difficulty_draws", "min_hits"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, int) or v < 1):
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ConfigError(f"lambda must be a non-negative number, got {self.lam!r}")
        if self.profile not in ("default", "quick"):
            raise ConfigError(f"unknown sampler profile {self.profile!r}")
        unknown = [p for p in self.predictors if p not in FEATURE_NAMES]
        if unknown:
            raise ConfigError(f"unknown predictor(s) {unknown}; choose from {list(FEATURE_NAMES)}")
        if len(self.predictors) != N_PRED:
            raise ConfigError(f"the submodels take exactly {N_PRED} predictors, got {len(self.predictors)}")

    @classmethod
    def from_dict(cls, d: dict, base: Path | None = None) -> "RunConfig":
        """Build from JSON-style keys (``lambda`` for the penalty); relative
        paths are resolved against `base`."""
        d = dict(d)
        if "lambda" in d:
            d["lam"] = d.pop("lambda")
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - names)
        if unknown:
            raise ConfigError(f"unknown config key(s) {unknown}")
        if "predictors" in d:
            d["predictors"] = tuple(d["predictors"])
        for key in ("wordbank", "usage", "dataset", "features"):
            if d.get(key) is not None:
                p = Path(d[key])
                d[key] = str((base / p if base and not p.is_absolute() else p).resolve())
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        d["predictors"] = list(self.predictors)
        return d


def load_config(path: str | Path | None, **overrides) -> RunConfig:
    d = {}
    base = None
    if path is not None:
        path = Path(path)
        with path.open() as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: not valid JSON ({exc})") from None
        if not isinstance(d, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        base = path.parent
    d.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig.from_dict(d, base=base or Path.cwd())


def load_bank(path: str | None) -> WordBank:
    if path is None:
        return load_sgb()
    with open(path) as fh:
        return load_wordbank(fh)


def load_usage(path: str | None) -> UsageTable:
    if path is None:
        return UsageTable.bundled()
    with open(path) as fh:
        return UsageTable.from_csv(fh)


# -- design matrices ---------------------------------------------------------


def feature_matrix(words: Sequence[str], table: dict[str, WordFeatures], names: Sequence[str]) -> np.ndarray:
    missing = sorted({w for w in words if w not in table})
    if missing:
        raise KeyError(f"no features for word(s) {missing[:10]}{' ...' if len(missing) > 10 else ''}")
    return np.array([[float(getattr(table[w], n)) for n in names] for w in words])


@dataclass(frozen=True)
class Standardization:
    names: tuple[str, ...]
    mean: np.ndarray
    std: np.ndarray

    def transform(self, raw) -> np.ndarray:
        return (np.asarray(raw, dtype=float) - self.mean) / self.std

    def to_dict(self) -> dict:
        return {"names": list(self.names), "mean": [float(v) for v in self.mean], "std": [float(v) for v in self.std]}

    @classmethod
    def from_dict(cls, d: dict) -> "Standardization":
        return cls(tuple(d["names"]), np.array(d["mean"], dtype=float), np.array(d["std"], dtype=float))

    @classmethod
    def fit(cls, raw: np.ndarray, names: Sequence[str]) -> "Standardization":
        dm: DesignMatrix = standardize(raw, names)
        return cls(tuple(names), dm.mean, dm.std)


def model_data(records: Sequence[DailyRecord], X: np.ndarray) -> ModelData:
    return ModelData(
        X=np.asarray(X, dtype=float),
        T=np.array([r.T for r in records], dtype=float),
        dow=np.array([r.day_of_week for r in records], dtype=int),
        n_reports=np.array([r.n_reports for r in records], dtype=np.int64),
        n_hardmode=np.array([r.n_hardmode for r in records], dtype=np.int64),
        try_counts=np.array([r.try_counts for r in records], dtype=np.int64).reshape(len(records), len(COUNT_COLUMNS)),
    )


def proportions(records: Sequence[DailyRecord]) -> np.ndarray:
    counts = np.array([r.try_counts for r in records], dtype=float)
    return counts / counts.sum(axis=1, keepdims=True)


# -- run directories ---------------------------------------------------------


@dataclass
class FittedRun:
    """A run directory loaded back into memory."""

    path: Path
    config: RunConfig
    standardization: Standardization
    scale: TimeScale
    records: list[DailyRecord]
    features: dict[str, WordFeatures]
    chains: dict[str, PosteriorChains] = field(default_factory=dict)

    @property
    def first_date(self) -> dt.date:
        return self.scale.first_date

    def design(self, words: Sequence[str]) -> np.ndarray:
        """Standardized predictors of `words`, computing features of unseen words."""
        unseen = sorted({w for w in words if w not in self.features})
        if unseen:
            bank = load_bank(self.config.wordbank)
            usage = load_usage(self.config.usage)
            rows = feature_table(unseen, bank, usage, GuessDistribution.common(bank))
            self.features.update(zip(unseen, rows))
        raw = feature_matrix(words, self.features, self.standardization.names)
        return self.standardization.transform(raw)


def write_features_subset(fh: TextIO, table: dict[str, WordFeatures], words: Sequence[str]) -> None:
    ordered = sorted(set(words))
    write_features_csv(fh, ordered, [table[w] for w in ordered])


def run_metadata(config: RunConfig, std: Standardization, scale: TimeScale, n_days: int) -> dict:
    samplers = {}
    for name in SUBMODELS:
        sc = sampler_config(name, config.seed, config.chains, config.profile,
                            warmup=config.warmup, draws=config.draws, thin=config.thin)
        samplers[name] = {"warmup": sc.warmup, "draws": sc.draws, "thin": sc.thin,
                          "temperatures": list(sc.temperatures), "pilot_starts": sc.pilot_starts}
    return {
        "config": config.to_dict(),
        "standardization": std.to_dict(),
        "time_scale": scale.to_dict(),
        "n_days": n_days,
        "samplers": samplers,
    }


def load_run(path: str | Path, with_chains: bool = True) -> FittedRun:
    path = Path(path)
    cfg_path = path / "config.json"
    if not cfg_path.exists():
        raise FileNotFoundError(f"{path} is not a run directory (no config.json)")
    with cfg_path.open() as fh:
        meta = json.load(fh)
    config = RunConfig.from_dict(meta["config"])
    with (path / "dataset.csv").open() as fh:
        records = read_dataset(fh)
    with (path / "features.csv").open() as fh:
        features = read_features_csv(fh)
    run = FittedRun(path, config, Standardization.from_dict(meta["standardization"]),
                    TimeScale.from_dict(meta["time_scale"]), records, features)
    if with_chains:
        for name in SUBMODELS:
            with (path / name / "draws.csv").open() as fh:
                run.chains[name] = read_draws_csv(fh, warmup=meta["samplers"][name]["warmup"], seed=config.seed)
    return run

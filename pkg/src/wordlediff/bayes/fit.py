"""Fitting the three submodels with their default sampler settings.

Random streams: submodel ``k`` (position in :data:`SUBMODELS`) uses
``SeedSequence(seed, spawn_key=(1, k, chain))`` for its chains, so the
submodels can be fitted in any order, alone or together, with identical
results.
"""

from __future__ import annotations

import csv
import json
from typing import TextIO

import numpy as np

from .models import ModelData, build_model
from .sampler import PosteriorChains, SamplerConfig, run_sampler
from .diagnostics import diagnostics, MIN_DRAWS

SUBMODELS = ("try", "reports", "hardmoders")
FIT_STREAM = 1

# inverse temperatures of the replica ladder for the two curved-trend models
LADDER = (1.0, 0.7, 0.5, 0.35, 0.25, 0.17, 0.12, 0.08)

DEFAULT_SETTINGS = {
    "try": dict(warmup=3000, draws=1000, thin=6),
    "reports": dict(warmup=10000, draws=1000, thin=50, temperatures=LADDER, pilot_starts=8),
    "hardmoders": dict(warmup=8000, draws=1000, thin=30, temperatures=LADDER, pilot_starts=8),
}

# shorter runs for repeated recovery experiments; fine for interval coverage,
# though R-hat of the trend parameters can sit slightly above 1.05
QUICK_SETTINGS = {
    "try": dict(warmup=1500, draws=1000, thin=3),
    "reports": dict(warmup=2000, draws=1000, thin=4, temperatures=LADDER, pilot_starts=8),
    "hardmoders": dict(warmup=2000, draws=1000, thin=4, temperatures=LADDER, pilot_starts=8),
}
PROFILES = {"default": DEFAULT_SETTINGS, "quick": QUICK_SETTINGS}


def sampler_config(name: str, seed: int, chains: int = 4, profile: str = "default", **overrides) -> SamplerConfig:
    """Settings of submodel `name` from a profile; ``None`` overrides are ignored."""
    settings = dict(PROFILES[profile][name], chains=chains, seed=seed)
    settings.update({k: v for k, v in overrides.items() if v is not None})
    if "temperatures" in settings:
        settings["temperatures"] = tuple(settings["temperatures"])
    return SamplerConfig(**settings)


def fit_submodel(name: str, data: ModelData, config: SamplerConfig) -> PosteriorChains:
    return run_sampler(build_model(name, data), config, stream=(FIT_STREAM, SUBMODELS.index(name)))


def fit_all(data: ModelData, seed: int, chains: int = 4, names=SUBMODELS, profile: str = "default",
            **overrides) -> dict[str, PosteriorChains]:
    return {n: fit_submodel(n, data, sampler_config(n, seed, chains, profile, **overrides)) for n in names}


# -- storage -----------------------------------------------------------------


def write_draws_csv(fh: TextIO, chains: PosteriorChains) -> None:
    """One row per kept draw: chain, draw, then one column per parameter."""
    out = csv.writer(fh, lineterminator="\n")
    out.writerow(["chain", "draw", *chains.names])
    for c in range(chains.n_chains):
        for i in range(chains.n_draws):
            out.writerow([c, i, *(repr(float(v)) for v in chains.draws[c, i])])


def read_draws_csv(fh: TextIO, warmup: int = 0, seed: int = 0) -> PosteriorChains:
    reader = csv.reader(fh)
    header = next(reader)
    if header[:2] != ["chain", "draw"]:
        raise ValueError("draws file must start with 'chain,draw' columns")
    rows = [(int(r[0]), int(r[1]), [float(v) for v in r[2:]]) for r in reader]
    n_chains = max(r[0] for r in rows) + 1
    n_draws = max(r[1] for r in rows) + 1
    draws = np.full((n_chains, n_draws, len(header) - 2), np.nan)
    for c, i, v in rows:
        draws[c, i] = v
    if np.isnan(draws).any():
        raise ValueError("draws file has missing (chain, draw) rows")
    chains = PosteriorChains(names=header[2:], draws=draws, warmup=warmup, seed=seed, acceptance={})
    if n_chains >= 2 and n_draws >= MIN_DRAWS:
        chains.rhat, chains.ess = diagnostics(chains)
    return chains


def diagnostics_dict(chains: PosteriorChains) -> dict:
    def num(x):
        return None if x is None or not np.isfinite(x) else float(x)

    return {
        "chains": chains.n_chains,
        "draws": chains.n_draws,
        "warmup": chains.warmup,
        "acceptance": {k: [float(x) for x in v] for k, v in chains.acceptance.items()},
        "parameters": {
            name: {
                "rhat": num(None if chains.rhat is None else chains.rhat[j]),
                "ess": num(None if chains.ess is None else chains.ess[j]),
            }
            for j, name in enumerate(chains.names)
        },
    }


def write_diagnostics(fh: TextIO, chains: PosteriorChains) -> None:
    json.dump(diagnostics_dict(chains), fh, indent=2, sort_keys=True)
    fh.write("\n")


def high_rhat(chains: PosteriorChains, threshold: float = 1.05) -> list[str]:
    if chains.rhat is None:
        return []
    return [n for n, r in zip(chains.names, chains.rhat) if np.isfinite(r) and r > threshold]


__all__ = [
    "SUBMODELS", "LADDER", "DEFAULT_SETTINGS", "QUICK_SETTINGS", "PROFILES", "sampler_config", "fit_submodel", "fit_all",
    "write_draws_csv", "read_draws_csv", "diagnostics_dict", "write_diagnostics", "high_rhat",
]

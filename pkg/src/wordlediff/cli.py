"""Command-line pipeline: ingest, features, select, fit, predict, retrodict,
difficulty and synth.

Global flags ``--seed``, ``--config`` (a JSON object of run settings) and
``--out`` (output directory) may appear before or after the subcommand.
Command-line values override the config file.  The exit status is 1 when
a documented error fires and 2 for usage errors.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .bayes.fit import SUBMODELS, fit_submodel, high_rhat, sampler_config, write_diagnostics, write_draws_csv
from .bayes.predict import predict_hardmoders, predict_reports, predict_try
from .bayes.sampler import SamplerError
from .bayes.simulate import default_truth, simulate_days
from .coloring import InvalidWordError
from .difficulty import DegenerateDistributionError, fit_counts
from .features import FEATURE_NAMES, GuessDistribution, feature_table, read_features_csv, write_features_csv
from .ingest import (
    COUNT_COLUMNS,
    DailyRecord,
    IngestError,
    build_dataset,
    parse_date,
    read_dataset,
    scale_time,
    time_scale,
    write_dataset,
)
from .lasso import LassoConvergenceError, select_features, standardize
from .pipeline import (
    ConfigError,
    FittedRun,
    Standardization,
    feature_matrix,
    load_bank,
    load_config,
    load_run,
    load_usage,
    model_data,
    proportions,
    run_metadata,
    stream_rng,
    write_features_subset,
)
from .wordbank import EmptyWordBankError

log = logging.getLogger("wordlediff")

TRY_LABELS = [f"Percentage in {i} guess{'es' if i > 1 else ''}" for i in range(1, 7)] + ["Percentage failed (X)"]
INTERVALS = (0.50, 0.80, 0.95)

# errors that are part of a documented contract: reported, exit status 1
CONTRACT_ERRORS = (
    ConfigError,
    IngestError,
    InvalidWordError,
    EmptyWordBankError,
    DegenerateDistributionError,
    LassoConvergenceError,
    SamplerError,
    OverflowError,
    OSError,
    KeyError,
    ValueError,
)


class CommandError(RuntimeError):
    pass


# -- small helpers -----------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def write_rows(path: Path, header: Sequence[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        for row in rows:
            out.writerow([_fmt(v) for v in row])


def _out_dir(args, default: str | Path = ".") -> Path:
    out = Path(args.out if getattr(args, "out", None) else default)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _config(args, **extra):
    return load_config(getattr(args, "config", None), seed=getattr(args, "seed", None), **extra)


def _read_records(path: str | Path) -> list[DailyRecord]:
    with open(path) as fh:
        records = read_dataset(fh)
    if not records:
        raise IngestError(f"{path}: dataset has no rows")
    return records


def _read_features(path: str | Path):
    with open(path) as fh:
        return read_features_csv(fh)


def interval_columns(prefix: str = "") -> list[str]:
    cols = [f"{prefix}median"]
    for q in INTERVALS:
        k = int(round(q * 100))
        cols += [f"{prefix}lo{k}", f"{prefix}hi{k}"]
    return cols


def interval_summary(x: np.ndarray) -> list[float]:
    """Median then the central 50/80/95% interval bounds of `x`."""
    probs = [0.5]
    for q in INTERVALS:
        probs += [(1 - q) / 2, (1 + q) / 2]
    return [float(v) for v in np.quantile(np.asarray(x, dtype=float), probs)]


def percent(part: np.ndarray, whole: np.ndarray) -> np.ndarray:
    """100 * part / whole, 0 where whole is 0."""
    part = np.asarray(part, dtype=float)
    whole = np.broadcast_to(np.asarray(whole, dtype=float), part.shape[: np.ndim(whole)])
    whole = whole.reshape(whole.shape + (1,) * (part.ndim - whole.ndim))
    return np.divide(100.0 * part, whole, out=np.zeros(np.broadcast(part, whole).shape), where=whole > 0)


def _warn_rhat(name: str, chains) -> None:
    bad = high_rhat(chains)
    if bad:
        shown = ", ".join(bad[:6]) + (", ..." if len(bad) > 6 else "")
        log.warning("warning: %s has R-hat > 1.05 for %d parameter(s): %s", name, len(bad), shown)


# -- commands ----------------------------------------------------------------


def cmd_ingest(args) -> int:
    out = _out_dir(args)
    with open(args.raw) as fh:
        records, applied = build_dataset(fh, corrections=()) if args.no_corrections else build_dataset(fh)
    target = out / "dataset.csv"
    with target.open("w", newline="") as fh:
        write_dataset(fh, records)
    print(f"rows: {len(records)}")
    print(f"corrections applied: {len(applied)}")
    for c in applied:
        print(f"  day {c.day}: {c.field} {c.old!r} -> {c.new!r}")
    print(f"wrote {target}")
    return 0


def _word_list(args) -> list[str] | None:
    words = []
    if args.words:
        for item in args.words:
            words += [w.strip().lower() for w in item.split(",") if w.strip()]
    if args.words_file:
        with open(args.words_file) as fh:
            words += [line.strip().lower() for line in fh if line.strip()]
    return words or None


def cmd_features(args) -> int:
    cfg = _config(args, wordbank=args.wordbank, usage=args.usage)
    bank = load_bank(cfg.wordbank)
    usage = load_usage(cfg.usage)
    dist = GuessDistribution.common(bank)
    words = _word_list(args)
    if words is None:
        words = list(bank.words)
        rows, errors = feature_table(words, bank, usage, dist), [None] * len(words)
    else:
        rows, errors = [], []
        for w in words:
            try:
                rows.append(feature_table([w], bank, usage, dist)[0])
                errors.append(None)
            except ValueError as exc:
                rows.append(None)
                errors.append(str(exc))
    out = _out_dir(args)
    target = out / "features.csv"
    with target.open("w", newline="") as fh:
        write_features_csv(fh, words, rows, errors)
    n_bad = sum(e is not None for e in errors)
    for w, e in zip(words, errors):
        if e is not None:
            log.warning("%s: %s", w, e)
    print(f"features for {len(words) - n_bad} of {len(words)} word(s) written to {target}")
    if words and n_bad == len(words):
        raise CommandError("no word could be featurized")
    return 0


def cmd_select(args) -> int:
    cfg = _config(args, lam=args.lam, min_hits=args.min_hits, dataset=args.dataset, features=args.features)
    if cfg.dataset is None or cfg.features is None:
        raise ConfigError("select needs --dataset and --features (or config keys)")
    records = _read_records(cfg.dataset)
    table = _read_features(cfg.features)
    raw = feature_matrix([r.word for r in records], table, FEATURE_NAMES)
    X = standardize(raw, FEATURE_NAMES)
    Y = proportions(records)
    selected, fits = select_features(X, Y, lam=cfg.lam, min_hits=cfg.min_hits)
    names = [FEATURE_NAMES[j] for j in sorted(selected)]
    result = {
        "lambda": cfg.lam,
        "min_hits": cfg.min_hits,
        "selected": names,
        "coefficients": {
            f"t{k + 1}": {"intercept": f.intercept, **{n: float(c) for n, c in zip(FEATURE_NAMES, f.coefficients)}}
            for k, f in enumerate(fits)
        },
    }
    out = _out_dir(args)
    with (out / "selection.json").open("w") as fh:
        json.dump(result, fh, indent=2)
        fh.write("\n")
    write_rows(out / "coefficients.csv", ["category", "intercept", *FEATURE_NAMES],
               ([f"t{k + 1}", f.intercept, *f.coefficients] for k, f in enumerate(fits)))
    print(json.dumps(names))
    return 0


def cmd_fit(args) -> int:
    predictors = None
    if args.selection:
        with open(args.selection) as fh:
            predictors = json.load(fh)["selected"]
    cfg = _config(args, chains=args.chains, warmup=args.warmup, draws=args.draws, thin=args.thin,
                  profile=args.profile, dataset=args.dataset, features=args.features, predictors=predictors)
    if cfg.dataset is None or cfg.features is None:
        raise ConfigError("fit needs --dataset and --features (or config keys)")
    records = scale_time(_read_records(cfg.dataset))
    table = _read_features(cfg.features)
    words = [r.word for r in records]
    raw = feature_matrix(words, table, cfg.predictors)
    std = Standardization.fit(raw, cfg.predictors)
    data = model_data(records, std.transform(raw))
    out = _out_dir(args, "run")
    meta = run_metadata(cfg, std, time_scale(records), len(records))
    meta["inputs"] = {"dataset": cfg.dataset, "features": cfg.features}
    with (out / "config.json").open("w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    with (out / "dataset.csv").open("w", newline="") as fh:
        write_dataset(fh, records)
    with (out / "features.csv").open("w", newline="") as fh:
        write_features_subset(fh, table, words)
    n_bad = n_total = 0
    for name in SUBMODELS:
        sc = sampler_config(name, cfg.seed, cfg.chains, cfg.profile, warmup=cfg.warmup, draws=cfg.draws, thin=cfg.thin)
        log.info("fitting %s: %d chains, warmup %d, %d draws (thin %d)", name, sc.chains, sc.warmup, sc.draws, sc.thin)
        chains = fit_submodel(name, data, sc)
        sub = out / name
        sub.mkdir(exist_ok=True)
        with (sub / "draws.csv").open("w", newline="") as fh:
            write_draws_csv(fh, chains)
        with (sub / "diagnostics.json").open("w") as fh:
            write_diagnostics(fh, chains)
        _warn_rhat(name, chains)
        if chains.rhat is not None:
            n_bad += len(high_rhat(chains))
            n_total += len(chains.names)
            print(f"{name}: max R-hat {np.nanmax(chains.rhat):.3f}, min ESS {np.nanmin(chains.ess):.0f}")
    if n_total:
        print(f"R-hat < 1.05 for {n_total - n_bad} of {n_total} parameters")
    print(f"wrote run directory {out}")
    return 0


def _predictive(run: FittedRun, X, T, dow, S: int, rng: np.random.Generator, n_obs=None):
    """Joint draws: reports, then hardmoders and tries given the report count.

    With `n_obs` the observed report count conditions the other two
    submodels instead of the predicted one (retrodiction).
    """
    n = predict_reports(run.chains["reports"], X, T, dow, rng, n_draws=S)
    n_given = n if n_obs is None else np.full(S, n_obs, dtype=np.int64)
    h, _ = predict_hardmoders(run.chains["hardmoders"], X, T, dow, n_given, rng, n_draws=S)
    _, counts = predict_try(run.chains["try"], X, n_given, rng, n_draws=S)
    return n, n_given, h, counts


def cmd_predict(args) -> int:
    run = load_run(args.run_dir)
    seed = args.seed if getattr(args, "seed", None) is not None else run.config.seed
    S = args.draws or run.config.predict_draws
    date = parse_date(args.date)
    if date < run.first_date:
        raise CommandError(f"date {date} is before the first data day {run.first_date}")
    for name, chains in run.chains.items():
        _warn_rhat(name, chains)
    rng = stream_rng(seed, "predict")
    T = run.scale.at_date(date)
    dow = date.isoweekday()
    if args.word:
        X = run.design([args.word.strip().lower()])[0]
        label = args.word.strip().lower()
    else:
        # average over observed words: one random observed word per draw
        observed = run.design([r.word for r in run.records])
        X = observed[rng.integers(len(observed), size=S)]
        label = "(all observed words)"
    n, _, h, counts = _predictive(run, X, T, dow, S, rng)
    hard_pct = percent(h, n)
    try_pct = percent(counts, n)
    out = _out_dir(args, args.run_dir)
    header = ["draw", "reports", "hardmoders", "hardmode_pct", *COUNT_COLUMNS, *(f"pct{k}" for k in range(1, 8))]
    write_rows(out / "predictive.csv", header,
               ([i, n[i], h[i], hard_pct[i], *counts[i], *try_pct[i]] for i in range(S)))
    rows = [("Number of reports", n), ("Number of hardmoders", h), ("Percentage of hardmoders", hard_pct)]
    rows += [(lab, try_pct[:, k]) for k, lab in enumerate(TRY_LABELS)]
    table = [(lab, *interval_summary(x)) for lab, x in rows]
    write_rows(out / "summary.csv", ["quantity", *interval_columns()], table)
    print(f"word: {label}   date: {date.isoformat()} (T = {T:.4f})   draws: {S}")
    print(f"{'quantity':<28}{'median':>10}  {'50%':>21}  {'80%':>21}  {'95%':>21}")
    for lab, med, *b in table:
        spans = "  ".join(f"[{b[2 * j]:>9.2f},{b[2 * j + 1]:>10.2f}]" for j in range(3))
        print(f"{lab:<28}{med:>10.2f}  {spans}")
    return 0


def cmd_retrodict(args) -> int:
    run = load_run(args.run_dir)
    seed = args.seed if getattr(args, "seed", None) is not None else run.config.seed
    S = args.draws or run.config.retrodict_draws
    if args.dataset:
        records = _read_records(args.dataset)
        for r in records:
            if r.date < run.first_date:
                raise CommandError(f"day {r.date} is before the first data day {run.first_date}")
        Ts = [run.scale.at_date(r.date) for r in records]
    else:
        records = run.records
        Ts = [r.T for r in records]
    X = run.design([r.word for r in records])
    rng = stream_rng(seed, "retrodict")
    header = ["date", "word", "T"]
    for q in ("reports", "hardmoders", "hardmode_pct"):
        header += [f"{q}_observed", *interval_columns(f"{q}_"), f"{q}_in95"]
    rows = []
    hits = {"reports": [], "hardmoders": [], "hardmode_pct": [], "tries": []}
    for i, r in enumerate(records):
        n, n_given, h, counts = _predictive(run, X[i], Ts[i], r.day_of_week, S, rng, n_obs=r.n_reports)
        row = [r.date.isoformat(), r.word, Ts[i]]
        observed = {"reports": r.n_reports, "hardmoders": r.n_hardmode,
                    "hardmode_pct": float(percent(r.n_hardmode, r.n_reports))}
        draws = {"reports": n, "hardmoders": h, "hardmode_pct": percent(h, n_given)}
        for q in ("reports", "hardmoders", "hardmode_pct"):
            s = interval_summary(draws[q])
            inside = bool(s[5] <= observed[q] <= s[6])
            hits[q].append(inside)
            row += [observed[q], *s, int(inside)]
        lo, hi = np.quantile(counts, [0.025, 0.975], axis=0)
        obs = np.array(r.try_counts)
        hits["tries"] += list((lo <= obs) & (obs <= hi))
        rows.append(row)
    out = _out_dir(args, args.run_dir)
    write_rows(out / "retrodict.csv", header, rows)
    print(f"days: {len(records)}   draws per day: {S}")
    for q, v in hits.items():
        unit = "day-category pairs" if q == "tries" else "days"
        print(f"95% interval coverage, {q}: {np.mean(v):.3f} ({int(np.sum(v))} of {len(v)} {unit})")
    return 0


def _direct_fits(records: Sequence[DailyRecord]):
    """Beta fit per observed word; degenerate days give an error entry."""
    out = []
    for r in records:
        try:
            out.append((r, fit_counts(r.try_counts), None))
        except DegenerateDistributionError as exc:
            out.append((r, None, str(exc)))
    return out


def _percentile(score: float, reference: np.ndarray) -> float:
    return float(100.0 * np.mean(reference <= score))


def cmd_difficulty(args) -> int:
    header = ["word", "draw", "alpha", "beta", "score", "rmse", "percentile", "error"]
    if args.run_dir:
        run = load_run(args.run_dir)
        seed = args.seed if getattr(args, "seed", None) is not None else run.config.seed
        if not args.word:
            raise CommandError("difficulty from a run needs --word")
        records = run.records
    else:
        cfg = _config(args, dataset=args.dataset)
        if cfg.dataset is None:
            raise ConfigError("difficulty needs --dataset or --run")
        records = _read_records(cfg.dataset)
        run, seed = None, cfg.seed
    fits = _direct_fits(records)
    reference = np.array([f.score for _, f, e in fits if f is not None])
    out = _out_dir(args, args.run_dir or ".")
    rows = []
    if run is not None:
        word = args.word.strip().lower()
        S = args.draws or run.config.difficulty_draws
        rng = stream_rng(seed, "difficulty")
        X = run.design([word])[0]
        p, _ = predict_try(run.chains["try"], X, 0, rng, n_draws=min(S, run.chains["try"].flat().shape[0]))
        scores = []
        for i, pi in enumerate(p):
            try:
                f = fit_counts(pi)
                scores.append(f.score)
                rows.append([word, i, f.params.alpha, f.params.beta, f.score, f.rmse, _percentile(f.score, reference), ""])
            except DegenerateDistributionError as exc:
                rows.append([word, i, "", "", "", "", "", str(exc)])
        if not scores:
            raise DegenerateDistributionError("every posterior draw was too extreme for a Beta fit")
        q = np.quantile(scores, [0.025, 0.5, 0.975])
        print(f"{word}: posterior difficulty score median {q[1]:.4f}, 95% interval [{q[0]:.4f}, {q[2]:.4f}] "
              f"over {len(scores)} draws; percentile of median among observed words "
              f"{_percentile(q[1], reference):.1f}")
    else:
        chosen = fits
        if args.word:
            word = args.word.strip().lower()
            chosen = [t for t in fits if t[0].word == word]
            if not chosen:
                raise CommandError(f"word {word!r} is not in the dataset")
        for r, f, err in chosen:
            if f is None:
                rows.append([r.word, "", "", "", "", "", "", err])
            else:
                rows.append([r.word, "", f.params.alpha, f.params.beta, f.score, f.rmse,
                             _percentile(f.score, reference), ""])
        failed = [row for row in rows if row[-1]]
        for row in failed:
            log.warning("%s: %s", row[0], row[-1])
        if len(failed) == len(rows):
            raise DegenerateDistributionError(failed[0][-1])
        for row in rows[:20]:
            if not row[-1]:
                print(f"{row[0]}: alpha {row[2]:.4f}  beta {row[3]:.4f}  score {row[4]:.4f}  "
                      f"rmse {row[5]:.4f}  percentile {row[6]:.1f}")
        if len(rows) > 20:
            print(f"... {len(rows) - 20} more row(s)")
    write_rows(out / "difficulty.csv", header, rows)
    return 0


def cmd_synth(args) -> int:
    cfg = _config(args, wordbank=args.wordbank, usage=args.usage)
    if args.days < 2:
        raise ConfigError("synth needs at least 2 days")
    rng = stream_rng(cfg.seed, "synth")
    bank = load_bank(cfg.wordbank)
    if args.days > len(bank):
        raise ConfigError(f"synth draws distinct words: at most {len(bank)} days")
    usage = load_usage(cfg.usage)
    words = [bank.words[i] for i in rng.choice(len(bank), size=args.days, replace=False)]
    table = dict(zip(words, feature_table(words, bank, usage, GuessDistribution.common(bank))))
    start = parse_date(args.start_date)
    dates = [start + dt.timedelta(days=k) for k in range(args.days)]
    contests = [args.first_contest + k for k in range(args.days)]
    raw = feature_matrix(words, table, cfg.predictors)
    X = Standardization.fit(raw, cfg.predictors).transform(raw)
    T = np.array([(c - contests[0]) / (contests[-1] - contests[0]) for c in contests])
    dow = np.array([d.isoweekday() for d in dates])
    truth = default_truth()
    data = simulate_days(truth, X, T, dow, rng)
    records = scale_time([
        DailyRecord(date=d, puzzle_number=c, word=w, n_reports=int(data.n_reports[i]),
                    n_hardmode=int(data.n_hardmode[i]), try_counts=tuple(int(v) for v in data.try_counts[i]))
        for i, (d, c, w) in enumerate(zip(dates, contests, words))
    ])
    out = _out_dir(args)
    with (out / "dataset.csv").open("w", newline="") as fh:
        write_dataset(fh, records)
    with (out / "features.csv").open("w", newline="") as fh:
        write_features_subset(fh, table, words)
    info = {"seed": cfg.seed, "days": args.days, "predictors": list(cfg.predictors), "truth": truth.to_dict()}
    with (out / "truth.json").open("w") as fh:
        json.dump(info, fh, indent=2)
        fh.write("\n")
    print(json.dumps(info, indent=2))
    return 0


# -- parser ------------------------------------------------------------------


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    d = {"default": argparse.SUPPRESS} if suppress else {"default": None}
    p.add_argument("--seed", type=int, help="root random seed (default: config value, else 0)", **d)
    p.add_argument("--config", help="JSON file of run settings", **d)
    p.add_argument("--out", help="output directory", **d)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wordlediff", description=__doc__.split("\n\n")[0],
                                     parents=[_global_flags(False)])
    sub = parser.add_subparsers(dest="command", required=True)
    common = [_global_flags(True)]

    p = sub.add_parser("ingest", parents=common, help="clean a daily-report CSV into the canonical dataset")
    p.add_argument("raw", help="contest-format CSV (or a canonical dataset)")
    p.add_argument("--no-corrections", action="store_true", help="skip the built-in correction table")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("features", parents=common, help="compute the word features")
    p.add_argument("--words", action="append", help="comma-separated words (repeatable); default: whole bank")
    p.add_argument("--words-file", help="file with one word per line")
    p.add_argument("--wordbank", help="wordbank file (default: bundled SGB list)")
    p.add_argument("--usage", help="usage table CSV (default: bundled table)")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("select", parents=common, help="lasso screen of the predictors")
    p.add_argument("--dataset", help="canonical dataset CSV")
    p.add_argument("--features", help="features CSV")
    p.add_argument("--lambda", dest="lam", type=float, help="penalty (default 0.1)")
    p.add_argument("--min-hits", type=int, help="nonzero in at least this many of the 7 fits (default 4)")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("fit", parents=common, help="fit the three submodels")
    p.add_argument("--dataset", help="canonical dataset CSV")
    p.add_argument("--features", help="features CSV")
    p.add_argument("--selection", help="selection.json from `select` (default: config predictors)")
    p.add_argument("--chains", type=int)
    p.add_argument("--warmup", type=int, help="warmup iterations for every submodel")
    p.add_argument("--draws", type=int, help="kept draws per chain for every submodel")
    p.add_argument("--thin", type=int, help="thinning interval for every submodel")
    p.add_argument("--profile", choices=["default", "quick"], help="per-submodel sampler defaults")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", parents=common, help="posterior predictive summary for a word and date")
    p.add_argument("run_dir")
    p.add_argument("--date", required=True, help="YYYY-MM-DD")
    p.add_argument("--word", help="target word (default: average over observed words)")
    p.add_argument("--draws", type=int, help="predictive draws (default 4000)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("retrodict", parents=common, help="predictive intervals for observed days")
    p.add_argument("run_dir")
    p.add_argument("--dataset", help="canonical dataset (default: the training data)")
    p.add_argument("--draws", type=int, help="draws per day (default 1000)")
    p.set_defaults(func=cmd_retrodict)

    p = sub.add_parser("difficulty", parents=common, help="Beta difficulty scores")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--dataset", help="fit observed try counts directly")
    src.add_argument("--run", dest="run_dir", help="fit posterior predictive try distributions")
    p.add_argument("--word", help="single word (required with --run)")
    p.add_argument("--draws", type=int, help="posterior draws to fit (default 400)")
    p.set_defaults(func=cmd_difficulty)

    p = sub.add_parser("synth", parents=common, help="model-true synthetic dataset with known parameters")
    p.add_argument("--days", type=int, default=100)
    p.add_argument("--start-date", default="2022-01-07")
    p.add_argument("--first-contest", type=int, default=202)
    p.add_argument("--wordbank", help="wordbank file (default: bundled SGB list)")
    p.add_argument("--usage", help="usage table CSV (default: bundled table)")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CommandError, *CONTRACT_ERRORS) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

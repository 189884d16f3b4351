"""Daily report ingestion: parsing, the data-error corrections, and
reconstruction of integer try counts from rounded percentages."""

from __future__ import annotations

import csv
import datetime as dt
import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence, TextIO

from .coloring import check_word

log = logging.getLogger(__name__)

N_CATEGORIES = 7

# canonical name -> accepted header spellings (compared lowercased, stripped)
COLUMN_ALIASES = {
    "date": ("date",),
    "contest": ("contest", "contest number", "puzzle", "number"),
    "word": ("word",),
    "reported": ("reported", "number of reported results", "n_reports"),
    "hardmode": ("hardmode", "number in hard mode", "n_hardmode"),
}
PERCENT_COLUMNS = ("p1", "p2", "p3", "p4", "p5", "p6", "px")
PERCENT_ALIASES = (
    ("1 try",), ("2 tries",), ("3 tries",), ("4 tries",), ("5 tries",), ("6 tries",),
    ("7 or more tries (x)", "x"),
)
COUNT_COLUMNS = ("t1", "t2", "t3", "t4", "t5", "t6", "t7")
CANONICAL_HEADER = ("date", "contest", "word", "reported", "hardmode", *COUNT_COLUMNS, "T", "dow")


class IngestError(ValueError):
    pass


class RawRecord(NamedTuple):
    date: dt.date
    contest: int
    word: str
    reported: int
    hardmode: int
    shares: tuple[float, ...]  # percentages, or counts when read from a canonical file
    line: int = 0


@dataclass(frozen=True)
class DailyRecord:
    date: dt.date
    puzzle_number: int
    word: str
    n_reports: int
    n_hardmode: int
    try_counts: tuple[int, ...]
    T: float = math.nan
    day_of_week: int = 0

    def __post_init__(self):
        check_word(self.word)
        if len(self.try_counts) != N_CATEGORIES:
            raise IngestError(f"day {self.puzzle_number}: need {N_CATEGORIES} try counts")
        if min(self.try_counts) < 0 or self.n_reports < 0 or self.n_hardmode < 0:
            raise IngestError(f"day {self.puzzle_number}: negative count")
        if sum(self.try_counts) != self.n_reports:
            raise IngestError(f"day {self.puzzle_number}: try counts sum to {sum(self.try_counts)}, "
                              f"not {self.n_reports}")
        if self.n_hardmode > self.n_reports:
            raise IngestError(f"day {self.puzzle_number}: hardmode {self.n_hardmode} > reports {self.n_reports}")


class Correction(NamedTuple):
    day: int
    field: str  # "word", "reported" or "hardmode"
    old: str | int
    new: str | int


DEFAULT_CORRECTIONS: tuple[Correction, ...] = (
    Correction(239, "hardmode", 3249, 9249),
    Correction(314, "word", "tash", "trash"),
    Correction(500, "hardmode", 3667, 2667),
    Correction(525, "word", "clen", "clean"),
    Correction(529, "reported", 2569, 25569),
    Correction(540, "word", "naïve", "naive"),
    Correction(545, "word", "rprobe", "probe"),
)


def parse_date(text: str) -> dt.date:
    text = text.strip()
    for fmt in ("%Y-%m-%d", "%m/%d/%Y", "%m/%d/%y", "%Y/%m/%d"):
        try:
            return dt.datetime.strptime(text, fmt).date()
        except ValueError:
            pass
    raise ValueError(f"unrecognized date {text!r}")


def _resolve_columns(header: Sequence[str]) -> tuple[dict[str, int], tuple[int, ...], bool]:
    norm = [h.strip().lower() for h in header]

    def find(options):
        for opt in options:
            if opt in norm:
                return norm.index(opt)
        return None

    cols = {}
    for name, aliases in COLUMN_ALIASES.items():
        idx = find(aliases)
        if idx is None:
            raise IngestError(f"missing column {name!r} in header {list(header)}")
        cols[name] = idx
    counts = [find((c,)) for c in COUNT_COLUMNS]
    if all(i is not None for i in counts):
        return cols, tuple(counts), True
    shares = [find((p, *alias)) for p, alias in zip(PERCENT_COLUMNS, PERCENT_ALIASES)]
    missing = [p for p, i in zip(PERCENT_COLUMNS, shares) if i is None]
    if missing:
        raise IngestError(f"missing column(s) {missing} in header {list(header)}")
    return cols, tuple(shares), False


def parse_raw(fh: TextIO) -> list[RawRecord]:
    """Parse a daily-report CSV.

    Accepts the contest layout (percentage columns ``p1..p6, px``) or a
    canonical dataset written by :func:`write_dataset` (count columns
    ``t1..t7``, treated as shares that reproduce themselves).
    """
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise IngestError("empty input: no header row") from None
    cols, share_idx, _ = _resolve_columns(header)
    records = []
    for lineno, row in enumerate(reader, start=2):
        if not any(cell.strip() for cell in row):
            continue
        try:
            records.append(
                RawRecord(
                    date=parse_date(row[cols["date"]]),
                    contest=int(row[cols["contest"]]),
                    word=row[cols["word"]].strip().lower(),
                    reported=int(row[cols["reported"]].replace(",", "")),
                    hardmode=int(row[cols["hardmode"]].replace(",", "")),
                    shares=tuple(float(row[i]) for i in share_idx),
                    line=lineno,
                )
            )
        except (IndexError, ValueError) as exc:
            raise IngestError(f"line {lineno}: malformed row ({exc})") from None
    return records


def apply_corrections(
    records: Iterable[RawRecord], table: Iterable[Correction] = DEFAULT_CORRECTIONS
) -> tuple[list[RawRecord], list[Correction]]:
    """Rewrite fields matching (day, field, old value); returns the new
    records and the corrections that fired.  Matching on the old value
    makes a second pass a no-op."""
    records = list(records)
    by_day = {}
    for i, r in enumerate(records):
        by_day.setdefault(r.contest, []).append(i)
    applied = []
    for corr in table:
        if corr.day not in by_day:
            log.warning("correction for day %d: no such day in the data", corr.day)
            continue
        for i in by_day[corr.day]:
            rec = records[i]
            if getattr(rec, corr.field) == corr.old:
                records[i] = rec._replace(**{corr.field: corr.new})
                applied.append(corr)
    return records, applied


def _exact(x: float | int | Fraction) -> Fraction:
    # decimal-string reading so 33.3 means 333/10, not its binary neighbour
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def percentages_to_counts(percentages: Sequence[float], n_reports: int) -> list[int]:
    """Largest-remainder apportionment of `n_reports` by the given shares.

    Shares are normalized by their sum, scaled by `n_reports` and floored;
    leftover units go one each to the largest fractional remainders, ties
    to the lower category index.
    """
    if len(percentages) != N_CATEGORIES:
        raise ValueError(f"need {N_CATEGORIES} percentages, got {len(percentages)}")
    shares = [_exact(p) for p in percentages]
    if any(p < 0 for p in shares):
        raise ValueError("percentages must be non-negative")
    total = sum(shares)
    if total == 0:
        if n_reports == 0:
            return [0] * N_CATEGORIES
        raise ValueError("all-zero percentages cannot be scaled to a positive report count")
    raw = [p * n_reports / total for p in shares]
    counts = [math.floor(r) for r in raw]
    order = sorted(range(N_CATEGORIES), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in order[: n_reports - sum(counts)]:
        counts[i] += 1
    return counts


@dataclass(frozen=True)
class TimeScale:
    """Linear map from puzzle number to T (0 at `first`, 1 at `last`)."""

    first: int
    last: int
    first_date: dt.date

    def __call__(self, puzzle_number: float) -> float:
        return (puzzle_number - self.first) / (self.last - self.first)

    def puzzle_for(self, date: dt.date) -> int:
        return self.first + (date - self.first_date).days

    def at_date(self, date: dt.date) -> float:
        return self(self.puzzle_for(date))

    def to_dict(self) -> dict:
        return {"first": self.first, "last": self.last, "first_date": self.first_date.isoformat()}

    @classmethod
    def from_dict(cls, d: dict) -> "TimeScale":
        return cls(int(d["first"]), int(d["last"]), dt.date.fromisoformat(d["first_date"]))


def time_scale(records: Sequence[DailyRecord]) -> TimeScale:
    if len(records) < 2:
        raise IngestError("time scaling needs at least 2 records")
    first = min(records, key=lambda r: r.puzzle_number)
    last = max(r.puzzle_number for r in records)
    if last == first.puzzle_number:
        raise IngestError("time scaling needs at least 2 distinct puzzle numbers")
    return TimeScale(first.puzzle_number, last, first.date)


def scale_time(records: Sequence[DailyRecord]) -> list[DailyRecord]:
    scale = time_scale(records)
    return [replace(r, T=scale(r.puzzle_number), day_of_week=r.date.isoweekday()) for r in records]


def to_daily(raw: RawRecord) -> DailyRecord:
    try:
        return DailyRecord(
            date=raw.date,
            puzzle_number=raw.contest,
            word=raw.word,
            n_reports=raw.reported,
            n_hardmode=raw.hardmode,
            try_counts=tuple(percentages_to_counts(raw.shares, raw.reported)),
            day_of_week=raw.date.isoweekday(),
        )
    except ValueError as exc:
        raise IngestError(f"line {raw.line} (day {raw.contest}): {exc}") from None


def build_dataset(
    fh: TextIO, corrections: Iterable[Correction] = DEFAULT_CORRECTIONS
) -> tuple[list[DailyRecord], list[Correction]]:
    """parse -> correct -> counts -> time scale, sorted by puzzle number."""
    raw, applied = apply_corrections(parse_raw(fh), corrections)
    daily = sorted((to_daily(r) for r in raw), key=lambda r: r.puzzle_number)
    return scale_time(daily), applied


def write_dataset(fh: TextIO, records: Sequence[DailyRecord]) -> None:
    out = csv.writer(fh, lineterminator="\n")
    out.writerow(CANONICAL_HEADER)
    for r in records:
        out.writerow([r.date.isoformat(), r.puzzle_number, r.word, r.n_reports, r.n_hardmode,
                      *r.try_counts, repr(r.T), r.day_of_week])


def read_dataset(fh: TextIO) -> list[DailyRecord]:
    """Read a canonical dataset, keeping its stored T and day-of-week."""
    out = []
    for row in csv.DictReader(fh):
        out.append(
            DailyRecord(
                date=dt.date.fromisoformat(row["date"]),
                puzzle_number=int(row["contest"]),
                word=row["word"],
                n_reports=int(row["reported"]),
                n_hardmode=int(row["hardmode"]),
                try_counts=tuple(int(row[c]) for c in COUNT_COLUMNS),
                T=float(row["T"]),
                day_of_week=int(row["dow"]),
            )
        )
    return out

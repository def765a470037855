"""Headline/price ingestion, trend labels and chronological splits."""

from __future__ import annotations

import calendar
import csv
import logging
import math
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

from headtrend.preprocess import strip_bytestring_artifacts

logger = logging.getLogger(__name__)

N_HEADLINES = 25


class CorpusError(ValueError):
    """Raised for malformed input files and impossible splits."""


@dataclass(frozen=True)
class HeadlineRecord:
    date: date
    headlines: tuple[str, ...]
    label: int | None = None

    def __post_init__(self):
        if len(self.headlines) != N_HEADLINES:
            raise CorpusError(
                f"{self.date}: expected {N_HEADLINES} headlines, got {len(self.headlines)}"
            )
        if self.label is not None and self.label not in (0, 1):
            raise CorpusError(f"{self.date}: label must be 0 or 1, got {self.label!r}")


@dataclass(frozen=True)
class PricePoint:
    date: date
    close: float

    def __post_init__(self):
        if not (self.close > 0 and math.isfinite(self.close)):
            raise CorpusError(f"{self.date}: close must be positive, got {self.close}")


@dataclass(frozen=True)
class LabeledCorpus:
    days: tuple[HeadlineRecord, ...]
    mismatches: int = 0

    def __post_init__(self):
        for prev, cur in zip(self.days, self.days[1:]):
            if not prev.date < cur.date:
                raise CorpusError(f"dates not strictly increasing at {cur.date}")
        for day in self.days:
            if day.label not in (0, 1):
                raise CorpusError(f"{day.date}: missing label")

    def __len__(self):
        return len(self.days)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return LabeledCorpus(self.days[item])
        return self.days[item]

    def __iter__(self):
        return iter(self.days)

    @property
    def dates(self) -> list[date]:
        return [d.date for d in self.days]

    @property
    def labels(self) -> list[int]:
        return [d.label for d in self.days]

    def subset(self, indices: Iterable[int]) -> "LabeledCorpus":
        return LabeledCorpus(tuple(self.days[i] for i in indices))


@dataclass(frozen=True)
class WindowSplit:
    train_start: date
    train_end: date
    test_start: date
    test_end: date
    train_days: range
    test_days: range

    def __post_init__(self):
        if not self.train_end < self.test_start:
            raise CorpusError("train period must end before the test period starts")
        if len(self.test_days) == 0:
            raise CorpusError("empty test period")

    @property
    def short_test(self) -> bool:
        """True when the test span covers less than two calendar months."""
        return add_months(self.test_start, 2) - timedelta(days=1) > self.test_end


def parse_date(text: str) -> date:
    text = text.strip()
    # YYYY-MM-DD exactly; fromisoformat also accepts other ISO shapes on newer Pythons
    if len(text) != 10 or text[4] != "-" or text[7] != "-":
        raise ValueError(f"not a YYYY-MM-DD date: {text!r}")
    return date.fromisoformat(text)


def add_months(d: date, months: int) -> date:
    """Shift by calendar months, clamping the day to the target month's length."""
    idx = d.year * 12 + (d.month - 1) + months
    year, month = divmod(idx, 12)
    month += 1
    return date(year, month, min(d.day, calendar.monthrange(year, month)[1]))


def _read_rows(path: Union[str, Path]) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CorpusError(f"{path}: missing header row") from None
        return [h.strip() for h in header], list(reader)


def load_headline_csv(path: Union[str, Path]) -> list[HeadlineRecord]:
    """Read a ``Date,Label,Top1..Top25`` file (Label optional) into records sorted by date."""
    header, rows = _read_rows(path)
    if "Date" not in header:
        raise CorpusError(f"{path}: no Date column")
    top_cols = [c for c in header if c.startswith("Top") and c[3:].isdigit()]
    top_cols.sort(key=lambda c: int(c[3:]))
    if len(top_cols) < N_HEADLINES:
        raise CorpusError(
            f"{path}: expected {N_HEADLINES} headline columns Top1..Top{N_HEADLINES}, "
            f"found {len(top_cols)}"
        )
    if len(top_cols) > N_HEADLINES:
        raise CorpusError(f"{path}: more than {N_HEADLINES} headline columns")
    date_i = header.index("Date")
    label_i = header.index("Label") if "Label" in header else None
    top_i = [header.index(c) for c in top_cols]

    records: dict[date, HeadlineRecord] = {}
    for lineno, row in enumerate(rows, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        row = row + [""] * (len(header) - len(row))
        try:
            d = parse_date(row[date_i])
        except ValueError as exc:
            raise CorpusError(f"{path}: row {lineno}: malformed date {row[date_i]!r}") from exc
        label = None
        if label_i is not None and row[label_i].strip():
            try:
                label = int(row[label_i])
            except ValueError:
                raise CorpusError(f"{path}: row {lineno}: bad label {row[label_i]!r}") from None
        if d in records:
            raise CorpusError(f"{path}: row {lineno}: duplicate date {d}")
        headlines = tuple(strip_bytestring_artifacts(row[i]) for i in top_i)
        try:
            records[d] = HeadlineRecord(d, headlines, label)
        except CorpusError as exc:
            raise CorpusError(f"{path}: row {lineno}: {exc}") from None
    return [records[d] for d in sorted(records)]


def load_price_csv(path: Union[str, Path], adjusted: bool = False) -> list[PricePoint]:
    """Read Date plus Close (or Adj Close when ``adjusted``) from a price file."""
    header, rows = _read_rows(path)
    column = "Adj Close" if adjusted else "Close"
    if "Date" not in header or column not in header:
        raise CorpusError(f"{path}: needs Date and {column} columns")
    date_i, close_i = header.index("Date"), header.index(column)
    points: dict[date, PricePoint] = {}
    for lineno, row in enumerate(rows, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            d = parse_date(row[date_i])
        except (ValueError, IndexError):
            raise CorpusError(f"{path}: row {lineno}: malformed date") from None
        try:
            close = float(row[close_i])
        except (ValueError, IndexError):
            raise CorpusError(f"{path}: row {lineno}: unparseable {column}") from None
        if d in points:
            raise CorpusError(f"{path}: row {lineno}: duplicate date {d}")
        try:
            points[d] = PricePoint(d, close)
        except CorpusError as exc:
            raise CorpusError(f"{path}: row {lineno}: {exc}") from None
    return [points[d] for d in sorted(points)]


def derive_labels(prices: Sequence[PricePoint]) -> dict[date, int]:
    """Label each day 1 if its close is at least the previous close, else 0.

    The first day has no predecessor and gets no label.
    """
    if len(prices) < 2:
        raise CorpusError("insufficient history: need at least 2 price points")
    prices = sorted(prices, key=lambda p: p.date)
    return {
        cur.date: int(cur.close >= prev.close) for prev, cur in zip(prices, prices[1:])
    }


def join_headlines_labels(
    records: Iterable[HeadlineRecord], labels: Mapping[date, int] | None
) -> LabeledCorpus:
    """Attach labels to records.

    A label already present in the headline file wins over a derived one;
    disagreements are counted in ``LabeledCorpus.mismatches`` and logged.
    """
    labels = labels or {}
    days = []
    mismatches = 0
    for rec in sorted(records, key=lambda r: r.date):
        derived = labels.get(rec.date)
        if rec.label is not None:
            if derived is not None and derived != rec.label:
                mismatches += 1
            if labels and derived is None:
                continue
            days.append(rec)
        elif derived is not None:
            days.append(HeadlineRecord(rec.date, rec.headlines, derived))
    if mismatches:
        logger.warning("%d days where the CSV label disagrees with the price-derived label",
                       mismatches)
    if not days:
        raise CorpusError("empty join: no dates carry both headlines and a label")
    return LabeledCorpus(tuple(days), mismatches)


def chronological_split(
    corpus: LabeledCorpus, boundary: Union[date, float]
) -> tuple[LabeledCorpus, LabeledCorpus]:
    """Split without shuffling: days up to ``boundary`` (a date, inclusive) or the
    first ``floor(fraction * N)`` days train, the rest test."""
    if isinstance(boundary, date):
        if boundary < corpus.days[0].date:
            raise CorpusError(f"boundary {boundary} precedes the first day {corpus.days[0].date}")
        cut = sum(1 for d in corpus.days if d.date <= boundary)
    else:
        if not 0.0 < boundary < 1.0:
            raise CorpusError(f"split fraction must lie in (0, 1), got {boundary}")
        cut = math.floor(boundary * len(corpus))
    if cut == 0 or cut == len(corpus):
        raise CorpusError("split leaves one side empty")
    return corpus[:cut], corpus[cut:]


def sliding_windows(
    corpus: LabeledCorpus, train_months: int = 9, test_months: int = 3, step_months: int = 3
) -> list[WindowSplit]:
    """Walk-forward schedule anchored at the first corpus day.

    Each window trains on ``train_months`` calendar months and tests on the
    following ``test_months``; windows advance by ``step_months``. The last
    window's test period is truncated at the corpus end; windows with no test
    days are dropped.
    """
    if min(train_months, test_months, step_months) < 1:
        raise CorpusError("window lengths must be positive")
    dates = corpus.dates
    if not dates:
        raise CorpusError("empty corpus")
    first, last = dates[0], dates[-1]
    if add_months(first, train_months) > last:
        raise CorpusError(f"corpus shorter than one {train_months}-month training period")

    def index_range(lo: date, hi: date) -> range:
        start = next((i for i, d in enumerate(dates) if d >= lo), len(dates))
        stop = next((i for i, d in enumerate(dates) if d > hi), len(dates))
        return range(start, max(start, stop))

    windows = []
    k = 0
    while True:
        train_start = add_months(first, k * step_months)
        test_start = add_months(train_start, train_months)
        if test_start > last:
            break
        train_end = test_start - timedelta(days=1)
        test_end = min(add_months(test_start, test_months) - timedelta(days=1), last)
        test_days = index_range(test_start, test_end)
        if len(test_days):
            windows.append(WindowSplit(train_start, train_end, test_start, test_end,
                                       index_range(train_start, train_end), test_days))
        k += 1
    if not windows:
        raise CorpusError("no usable walk-forward windows")
    return windows


def load_corpus(
    headlines_path: Union[str, Path],
    prices_path: Union[str, Path, None] = None,
    adjusted: bool = False,
) -> LabeledCorpus:
    records = load_headline_csv(headlines_path)
    labels = derive_labels(load_price_csv(prices_path, adjusted)) if prices_path else None
    return join_headlines_labels(records, labels)

"""Seeded synthetic headline corpora for smoke tests and demos.

Days are weekdays only. Each day's label is random; with probability
``signal`` a headline carries a word from the label's cue list, so
classifiers have something (weak) to find.
"""

from __future__ import annotations

import csv
from datetime import date, timedelta
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from headtrend.corpus import N_HEADLINES, HeadlineRecord, PricePoint

NEUTRAL = (
    "government minister says talks police report court city officials country week plan "
    "president election vote leaders meeting oil prices bank central summit army border "
    "protest workers strike company deal trade china russia europe india iran israel "
    "syria japan germany france britain new first year million people world state news "
    "security water energy health school children women military forces attack killed "
    "found police arrested law banned bill parliament prime investigation"
).split()
UP_CUES = "rally surge growth gains record boost recovery optimism profit agreement".split()
DOWN_CUES = "crash plunge crisis fears losses slump recession war collapse sanctions".split()
STOP_FILLER = "the a and of to in on for with".split()


def weekdays(start: date, end: date) -> list[date]:
    out = []
    d = start
    while d <= end:
        if d.weekday() < 5:
            out.append(d)
        d += timedelta(days=1)
    return out


def make_records(start: date, end: date, seed: int = 0, signal: float = 0.3,
                 with_labels: bool = True) -> list[HeadlineRecord]:
    rng = np.random.default_rng(seed)
    records = []
    for d in weekdays(start, end):
        label = int(rng.integers(0, 2))
        cues = UP_CUES if label else DOWN_CUES
        headlines = []
        for _ in range(N_HEADLINES):
            words = list(rng.choice(NEUTRAL, size=int(rng.integers(4, 9))))
            if rng.random() < 0.5:
                words.insert(int(rng.integers(0, len(words))), str(rng.choice(STOP_FILLER)))
            if rng.random() < signal:
                words.insert(int(rng.integers(0, len(words) + 1)), str(rng.choice(cues)))
            text = " ".join(words)
            headlines.append(text[0].upper() + text[1:])
        records.append(HeadlineRecord(d, tuple(headlines), label if with_labels else None))
    return records


def prices_for(records: Sequence[HeadlineRecord], seed: int = 0,
               start_price: float = 10000.0) -> list[PricePoint]:
    """Closes whose day-over-day direction reproduces each record's label.

    One extra point precedes the first record so every record gets a label.
    """
    rng = np.random.default_rng(seed)
    out = [PricePoint(records[0].date - timedelta(days=1), start_price)]
    price = start_price
    for rec in records:
        step = float(rng.uniform(1.0, 50.0))
        price = price + step if rec.label else price - step
        out.append(PricePoint(rec.date, round(price, 2)))
    return out


def write_headline_csv(records: Sequence[HeadlineRecord], path: Union[str, Path],
                       bytestring: bool = True) -> None:
    """Write ``Date,Label,Top1..Top25``; ``bytestring`` mimics the b'...' wrapping
    of the public DJIA headline dataset."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["Date", "Label", *[f"Top{i}" for i in range(1, N_HEADLINES + 1)]])
        for rec in records:
            heads = [f"b'{h}'" if bytestring and h else h for h in rec.headlines]
            w.writerow([rec.date.isoformat(), "" if rec.label is None else rec.label, *heads])


def write_price_csv(points: Sequence[PricePoint], path: Union[str, Path]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["Date", "Open", "High", "Low", "Close", "Volume", "Adj Close"])
        for p in points:
            w.writerow([p.date.isoformat(), p.close, p.close, p.close, p.close, 0, p.close])

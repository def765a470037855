"""Regenerate the synthetic sample corpora under sample/."""

from datetime import date
from pathlib import Path

from headtrend.synthetic import make_records, prices_for, write_headline_csv, write_price_csv

out = Path(__file__).resolve().parent.parent / "sample"
out.mkdir(exist_ok=True)

short = make_records(date(2015, 1, 1), date(2015, 5, 20), seed=1, signal=0.1)
write_headline_csv(short, out / "headlines_100d.csv")

long = make_records(date(2010, 1, 1), date(2011, 6, 30), seed=2, signal=0.1, with_labels=False)
labeled = make_records(date(2010, 1, 1), date(2011, 6, 30), seed=2, signal=0.1)
write_headline_csv(long, out / "headlines_18m.csv")
write_price_csv(prices_for(labeled, seed=3), out / "prices_18m.csv")

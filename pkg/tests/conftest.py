from datetime import date

import numpy as np
import pytest

from headtrend.corpus import LabeledCorpus
from headtrend.synthetic import make_records


def two_blobs(seed: int, n: int = 500, dim: int = 10, shift: float = 3.0):
    """Labels drawn at random; class 1 centered at +shift, class 0 at -shift, unit variance."""
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 2, n)
    X = rng.normal(size=(n, dim)) + np.where(y[:, None] == 1, shift, -shift)
    return X, y


@pytest.fixture(scope="session")
def corpus_100():
    records = make_records(date(2015, 1, 1), date(2015, 5, 20), seed=1, signal=0.1)
    corpus = LabeledCorpus(tuple(records))
    assert len(corpus) == 100
    return corpus


@pytest.fixture(scope="session")
def corpus_18m():
    return LabeledCorpus(tuple(make_records(date(2010, 1, 1), date(2011, 6, 30), seed=2,
                                            signal=0.1)))

import numpy as np
import pytest

from icpmaps.algebra import Algebra
from icpmaps.factory import build_corpus


@pytest.fixture(scope="session")
def corpus():
    return build_corpus(seed=0)


@pytest.fixture(scope="session")
def small_corpus(corpus):
    """A lighter slice covering every (k, n) combination once."""
    seen = set()
    out = []
    for entry in corpus:
        key = (entry.k, entry.n)
        if key not in seen:
            seen.add(key)
            out.append(entry)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(scope="session")
def algebras():
    return {
        "c2": Algebra([1, 1]),
        "c3": Algebra([1, 1, 1]),
        "m2": Algebra([2]),
        "m2c": Algebra([2, 1]),
    }

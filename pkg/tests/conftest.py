"""Shared fixtures: the golden-ratio worked example and small builders."""

from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from badapprox.resonance import (
    ApproximationRecord,
    ResonanceEntry,
    ResonanceSequence,
    best_approximations,
    golden_theta,
    lacunary_normalize,
)
from badapprox.schedule import derive_params

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def golden():
    """Scalar target F30/F31 with its continued-fraction expansion."""
    return golden_theta()


@pytest.fixture(scope="session")
def golden_records(golden):
    return best_approximations(golden, 1000)


@pytest.fixture(scope="session")
def golden_seq(golden_records):
    """Thinned family sequence with ratio 3: sizes 1, 3, 13, 55, 233, 987."""
    return lacunary_normalize(golden_records, 3)


@pytest.fixture(scope="session")
def golden_params():
    """alpha=1/4, beta=1/2, M=3, n=1 — every derived constant is pinned."""
    return derive_params(Fraction(1, 4), Fraction(1, 2), 3, 1)


def make_sequence(vectors, lacunarity=3, qualities=None):
    """Build a ResonanceSequence directly from integer vectors (test helper)."""
    entries = []
    for i, v in enumerate(vectors):
        v = tuple(int(x) for x in v)
        nsq = sum(x * x for x in v)
        q = None if qualities is None else qualities[i]
        entries.append(ResonanceEntry(v, nsq, q))
    return ResonanceSequence(tuple(entries), Fraction(lacunarity))


def make_records(pairs):
    """ApproximationRecords from (vector, quality) pairs (test helper)."""
    out = []
    for v, q in pairs:
        v = tuple(int(x) for x in v)
        out.append(ApproximationRecord(v, sum(x * x for x in v), Fraction(q)))
    return out

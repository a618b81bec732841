"""Approximation records, lacunary thinning, decay-profile verification."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from badapprox.resonance import (
    GOLDEN_CONVERGENT,
    ApproximationRecord,
    EmptySequence,
    ResonanceEntry,
    ResonanceSequence,
    ThetaMatrix,
    best_approximations,
    best_approximations_cf,
    convergents,
    golden_theta,
    lacunary_normalize,
    psi_theta,
    verify_decay_bound,
)
from conftest import make_records, make_sequence

FIB = [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610, 987]


# -- theta matrices ----------------------------------------------------------


def test_theta_validation():
    with pytest.raises(ValueError):
        ThetaMatrix(((),))
    with pytest.raises(ValueError):
        ThetaMatrix(((Fraction(1, 2),), (Fraction(1, 3), Fraction(1, 5))))
    with pytest.raises(ValueError):
        # cf only makes sense for scalars
        ThetaMatrix(((Fraction(1, 2), Fraction(1, 3)),), cf=(0, 2))


def test_theta_json_round_trip():
    th = ThetaMatrix(((Fraction(1, 3), Fraction(1, 5)),))
    assert ThetaMatrix.from_jsonable(th.to_jsonable()) == th
    g = golden_theta()
    assert ThetaMatrix.from_jsonable(g.to_jsonable()) == g


def test_golden_theta_value():
    g = golden_theta()
    assert g.rows[0][0] == GOLDEN_CONVERGENT == Fraction(832040, 1346269)
    assert g.cf == (0,) + (1,) * 30
    # the cf really is the cf: its convergents end at the value itself
    assert list(convergents(g.cf))[-1] == (832040, 1346269)


def test_dual_quality_scalar():
    th = ThetaMatrix.scalar(Fraction(2, 7))
    assert th.dual_quality((1,)) == Fraction(2, 7)
    assert th.dual_quality((3,)) == Fraction(1, 7)  # ||6/7||
    assert th.dual_quality((7,)) == 0


# -- psi ---------------------------------------------------------------------


def test_psi_pinned_values():
    th = ThetaMatrix.scalar(Fraction(2, 7))
    assert psi_theta(th, 1) == Fraction(2, 7)
    assert psi_theta(th, 2) == Fraction(2, 7)
    assert psi_theta(th, 3) == Fraction(1, 7)
    assert psi_theta(th, 7) == 0
    g = golden_theta()
    assert psi_theta(g, 1) == Fraction(514229, 1346269)


def test_psi_requires_positive_t():
    with pytest.raises(ValueError):
        psi_theta(golden_theta(), 0)


@pytest.mark.parametrize(
    "rows",
    [
        ((Fraction(3, 11),),),
        ((Fraction(1, 3), Fraction(1, 5)),),  # m=1, n=2
        ((Fraction(2, 7),), (Fraction(1, 4),)),  # m=2, n=1
    ],
)
def test_psi_matches_direct_enumeration(rows):
    th = ThetaMatrix(rows)
    n = th.n
    for t in (1, 2, 4):
        brute = min(
            th.dual_quality(y)
            for y in itertools.product(range(-t, t + 1), repeat=n)
            if any(c != 0 for c in y)
        )
        assert psi_theta(th, t) == brute


def test_psi_nonincreasing_in_t():
    th = ThetaMatrix(((Fraction(5, 17), Fraction(3, 13)),))
    vals = [psi_theta(th, t) for t in range(1, 8)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


# -- approximation records ---------------------------------------------------


def test_golden_records_are_fibonacci(golden_records):
    sizes = [r.vector[0] for r in golden_records]
    assert sizes == [1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610, 987]
    # qualities run down the Fibonacci ladder over the common denominator:
    # size F_k has quality F_(31-k) / F_31
    assert golden_records[0].quality == Fraction(514229, 1346269)
    assert golden_records[-1].quality == Fraction(610, 1346269)
    qs = [r.quality for r in golden_records]
    assert all(a > b for a, b in zip(qs, qs[1:]))


def test_records_strictly_improve_and_stop_at_zero():
    th = ThetaMatrix.scalar(Fraction(1, 2))
    recs = best_approximations(th, 10)
    assert [(r.vector, r.quality) for r in recs] == [
        ((1,), Fraction(1, 2)),
        ((2,), Fraction(0)),
    ]


def test_records_two_dim_pinned():
    th = ThetaMatrix(((Fraction(1, 3), Fraction(1, 5)),))
    recs = best_approximations(th, 5)
    assert [(r.vector, r.norm_sq, r.quality) for r in recs] == [
        ((0, 1), 1, Fraction(1, 5)),
        ((1, -1), 2, Fraction(2, 15)),
        ((1, -2), 5, Fraction(1, 15)),
        ((3, 0), 9, Fraction(0)),
    ]


def test_records_canonical_sign():
    th = ThetaMatrix(((Fraction(4, 7), Fraction(2, 9)),))
    for r in best_approximations(th, 4):
        first_nonzero = next(c for c in r.vector if c != 0)
        assert first_nonzero > 0


def test_cf_route_matches_enumeration():
    g = golden_theta()
    assert best_approximations_cf(g, 1000) == best_approximations(g, 1000)
    th = ThetaMatrix.scalar(Fraction(2, 7), cf=(0, 3, 2))
    assert best_approximations_cf(th, 50) == best_approximations(th, 50)


def test_cf_route_requires_cf():
    with pytest.raises(ValueError):
        best_approximations_cf(ThetaMatrix.scalar(Fraction(2, 7)), 10)


# -- lacunary thinning -------------------------------------------------------


def test_thinning_golden(golden_records, golden_seq):
    assert [e.norm_sq for e in golden_seq.entries] == [
        1,
        9,
        169,
        3025,
        54289,
        974169,
    ]
    assert [e.vector[0] for e in golden_seq.entries] == [1, 3, 13, 55, 233, 987]
    # all kept entries are genuine records, no padding needed here
    assert all(e.quality is not None for e in golden_seq.entries)


def test_thinning_pads_wide_gap():
    # sizes 1 then 100 with M=3: thinning must interpose 3, 9, 27
    recs = make_records([((1,), "1/3"), ((100,), "1/7")])
    seq = lacunary_normalize(recs, 3)
    assert [e.vector[0] for e in seq.entries] == [1, 3, 9, 27, 100]
    assert [e.quality is None for e in seq.entries] == [
        False,
        True,
        True,
        True,
        False,
    ]


def test_thinning_drops_close_sizes():
    recs = make_records([((4,), "1/3"), ((5,), "1/4"), ((13,), "1/9")])
    seq = lacunary_normalize(recs, 3)
    # 5/4 < 3: dropped; 13/4 in [3, 9]: kept
    assert [e.vector[0] for e in seq.entries] == [4, 13]


def test_thinning_skips_exact_resonances():
    recs = make_records([((1,), "1/3"), ((3,), 0), ((4,), "1/9")])
    seq = lacunary_normalize(recs, 3)
    assert [e.vector[0] for e in seq.entries] == [1, 4]
    with pytest.raises(EmptySequence):
        lacunary_normalize(make_records([((2,), 0)]), 3)


def test_thinning_requires_lacunarity_above_one():
    with pytest.raises(ValueError):
        lacunary_normalize(make_records([((1,), "1/3")]), 1)


@given(
    sizes=st.lists(
        st.integers(min_value=1, max_value=10**6), min_size=1, max_size=12
    ).map(lambda xs: sorted(set(xs))),
    m=st.integers(min_value=2, max_value=5),
)
def test_thinning_output_always_lacunary(sizes, m):
    recs = make_records(
        [((s,), Fraction(1, 2 * i + 3)) for i, s in enumerate(sizes)]
    )
    seq = lacunary_normalize(recs, m)  # constructor re-checks the invariant
    out_sizes = [e.vector[0] for e in seq.entries]
    # kept entries are a subsequence of the input sizes, in order
    kept = [e.vector[0] for e in seq.entries if e.quality is not None]
    it = iter(sizes)
    assert all(k in it for k in kept)
    assert out_sizes == sorted(out_sizes)
    assert kept[0] == sizes[0]


# -- the sequence container --------------------------------------------------


def test_sequence_invariant_enforced():
    with pytest.raises(ValueError):
        make_sequence([(1,), (2,)])  # ratio 2 < M=3
    with pytest.raises(ValueError):
        make_sequence([(1,), (10,)])  # ratio 10 > M^2=9
    with pytest.raises(ValueError):
        # stored norm must match the vector
        ResonanceSequence(
            (ResonanceEntry((2,), 5, None),), Fraction(3)
        )
    with pytest.raises(EmptySequence):
        ResonanceSequence((), Fraction(3))


def test_sequence_one_based_access(golden_seq):
    assert golden_seq.vector(1) == (1,)
    assert golden_seq.vector(3) == (13,)
    assert golden_seq.norm_sq_of(6) == 974169
    assert len(golden_seq) == 6
    assert golden_seq.dimension == 1


def test_sequence_json_round_trip(golden_seq):
    text = golden_seq.dumps()
    again = ResonanceSequence.loads(text)
    assert again == golden_seq
    assert again.dumps() == text


def test_sequence_mixed_dimensions_rejected():
    e1 = ResonanceEntry((1,), 1, None)
    e2 = ResonanceEntry((3, 0), 9, None)
    with pytest.raises(ValueError):
        ResonanceSequence((e1, e2), Fraction(3))


# -- decay-profile verification ----------------------------------------------


def test_golden_satisfies_reciprocal_decay(golden):
    report = verify_decay_bound(golden, lambda t: Fraction(1, t), 100)
    assert report["ok"]
    assert report["failures"] == []
    # steps are exactly the Fibonacci record sizes within range
    assert [t for t, _ in report["steps"]] == [1, 2, 3, 5, 8, 13, 21, 34, 55, 89]


def test_decay_bound_failure_reported(golden):
    report = verify_decay_bound(golden, lambda t: Fraction(1, 10 * t), 30)
    assert not report["ok"]
    assert report["failures"]
    worst = report["failures"][0]
    assert set(worst) == {"t", "psi", "bound"}


def test_decay_bound_two_dim():
    th = ThetaMatrix(((Fraction(1, 3), Fraction(1, 5)),))
    report = verify_decay_bound(th, lambda t: Fraction(1, 2), 4)
    assert report["ok"]
    # sup-norm shells: t=1 already contains (1,-1) with quality 2/15, then
    # (1,-2) at t=2 and the exact resonance (3,0) at t=3
    assert report["steps"] == [(1, "2/15"), (2, "1/15"), (3, "0/1")]

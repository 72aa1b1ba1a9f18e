from fractions import Fraction
import random

import pytest

from app.core.errors import InvalidFractionError
from app.models.schemas import (
    BallParams,
    Construction,
    EmbeddingCandidate,
    Frac,
    Rejection,
    RejectionReason,
)
from app.services.arith import continuant, hj_of_frac
from app.services.cobord import (
    CobordismSearch,
    add4,
    addc,
    candidate_key,
    euler_number,
    merge_candidates,
    plumbing_numerator,
    recognized_sources,
    search,
)

F = Frac.parse


def test_addc_worked_example():
    candidate = addc(F("16/7"), F("25/9"), 5)
    assert isinstance(candidate, EmbeddingCandidate)
    assert candidate.balls == (
        BallParams(p=4, q=2, sign=-1),
        BallParams(p=5, q=2, sign=-1),
        BallParams(p=41, q=18, sign=1),
    )
    assert candidate.sign == 1
    assert candidate.provenance[0].c == 5
    assert candidate_key(candidate) == ((16, 9), (25, 11), (1681, 737))
    assert candidate.model_dump(by_alias=True)["schema"] == 1


def test_addc_lands_on_a_listed_row():
    candidate = addc(F("4/3"), F("9/5"), 2)
    assert candidate.sign == 1
    assert candidate.balls == (
        BallParams(p=2, q=1, sign=1),
        BallParams(p=3, q=1, sign=-1),
        BallParams(p=5, q=1, sign=-1),
    )
    assert candidate_key(candidate) == ((4, 1), (9, 4), (25, 6))


def test_addc_rejects_unrecognized_third_lens():
    outcome = addc(F("16/7"), F("25/9"), 0)
    assert isinstance(outcome, Rejection)
    assert outcome.reason == RejectionReason.ORACLE_UNRECOGNIZED
    assert "L(319," in outcome.detail
    assert euler_number(F("16/7"), F("25/9"), 0) < 0


def test_addc_closest_plumbing_to_l49_18_is_not_a_ball_boundary():
    outcome = addc(F("9/5"), F("64/23"), 1)
    assert outcome.reason == RejectionReason.ORACLE_UNRECOGNIZED
    assert outcome.detail == "no ball bounds L(49,18)"
    assert plumbing_numerator(F("9/4"), F("64/41"), 1) == -49
    assert addc(F("9/4"), F("64/41"), 1).reason == RejectionReason.ORACLE_UNRECOGNIZED


def test_addc_rejects_a_vanishing_order():
    outcome = addc(F("2/1"), F("2/1"), 1)
    assert outcome.reason == RejectionReason.DEGENERATE_T
    assert plumbing_numerator(F("2/1"), F("2/1"), 1) == 0


def test_addc_rejects_common_factors():
    assert plumbing_numerator(F("4/1"), F("4/3"), 2) == 16
    outcome = addc(F("4/1"), F("4/3"), 2)
    assert outcome.reason == RejectionReason.NOT_COPRIME
    assert "4, 4, 16" in outcome.detail


def test_addc_accepts_a_custom_oracle():
    everything = lambda lens: [BallParams(p=1, q=0)]
    outcome = addc(F("16/7"), F("25/9"), 0, oracle=everything)
    assert isinstance(outcome, EmbeddingCandidate)
    assert outcome.sign == -1


def test_euler_number():
    assert euler_number(F("16/7"), F("25/9"), 5) == Fraction(1681, 400)
    assert euler_number(F("2/1"), F("2/1"), 1) == 0
    assert euler_number(F("16/23"), F("25/9"), 5) == euler_number(F("16/7"), F("25/9"), 5)
    with pytest.raises(InvalidFractionError):
        euler_number(F("0/1"), F("2/1"), 1)


def test_plumbing_identity_matches_concatenated_expansion():
    rng = random.Random(7)
    sources = recognized_sources(10)
    for _ in range(200):
        (p, q), (r, s) = rng.sample(sources, 2)
        c = rng.randrange(-8, 13)
        pq, rs = Frac(p=p, q=q), Frac(p=r, q=s)
        seq = tuple(reversed(hj_of_frac(pq).coeffs)) + (c,) + hj_of_frac(rs).coeffs
        t = plumbing_numerator(pq, rs, c)
        assert continuant(seq)[0] == t
        assert euler_number(pq, rs, c) == Fraction(t, p * r)


def test_add4_worked_example():
    candidate = add4([3, 2, 2, 2], 3)
    assert isinstance(candidate, EmbeddingCandidate)
    assert candidate.balls == (
        BallParams(p=3, q=1, sign=-1),
        BallParams(p=2, q=1, sign=1),
        BallParams(p=7, q=3, sign=-1),
    )
    assert candidate.sign == 1
    assert candidate_key(candidate) == ((4, 1), (9, 4), (49, 22))


def test_add4_first_entry():
    candidate = add4([3, 2, 2, 2], 1)
    assert candidate.balls[2] == BallParams(p=5, q=1, sign=-1)


def test_add4_parity_and_range():
    outcome = add4(hj_of_frac(F("16/7")), 2)
    assert outcome.reason == RejectionReason.NOT_ODD_COPRIME
    for j in (0, 5):
        with pytest.raises(InvalidFractionError):
            add4([3, 2, 2, 2], j)


def test_recognized_sources():
    assert recognized_sources(3) == [(4, 1), (4, 3), (9, 2), (9, 4), (9, 5), (9, 7)]
    assert recognized_sources(1) == []


@pytest.fixture(scope="module")
def small_search():
    return search(8, range(-3, 9))


def test_search_finds_both_worked_examples(small_search):
    keys = {candidate_key(c): c for c in small_search.candidates}
    addc_example = addc(F("16/7"), F("25/9"), 5)
    found = keys[candidate_key(addc_example)]
    assert addc_example.provenance[0] in found.provenance
    assert ((4, 1), (9, 4), (49, 22)) in keys
    assert small_search.rejections[RejectionReason.ORACLE_UNRECOGNIZED.value] > 0


def test_search_output_is_sorted_and_unique(small_search):
    keys = [candidate_key(c) for c in small_search.candidates]
    assert keys == sorted(set(keys))


def test_search_signs_follow_the_euler_number(small_search):
    for candidate in small_search.candidates:
        for prov in candidate.provenance:
            if prov.construction == Construction.ADDC:
                assert (euler_number(prov.left, prov.right, prov.c) > 0) == (prov.sign > 0)
            else:
                p = continuant(prov.cf)[0]
                bumped = prov.cf[: prov.j - 1] + (prov.cf[prov.j - 1] + 4,) + prov.cf[prov.j:]
                assert p % 2 == 1 and continuant(bumped)[0] % 2 == 1


def test_search_empty_ranges():
    assert search(1, range(0)).candidates == []
    assert search(8, [], constructions=("ADDC",)).candidates == []


def test_search_is_independent_of_worker_count():
    serial = search(6, range(-2, 6), workers=1)
    parallel = search(6, range(-2, 6), workers=2)
    assert [c.model_dump() for c in serial.candidates] == [c.model_dump() for c in parallel.candidates]
    assert serial.rejections == parallel.rejections


def test_merge_candidates_unites_provenance():
    a = add4([3, 2, 2, 2], 3)
    b = a.model_copy(update={"provenance": (a.provenance[0].model_copy(update={"j": 9}),)})
    merged = merge_candidates([b, a, a])
    assert len(merged) == 1
    assert [p.j for p in merged[0].provenance] == [3, 9]


def test_cobordism_search_uses_the_record_cache(settings, tmp_path):
    from app.services.cache_service import RecordCache

    cache = RecordCache(str(tmp_path / "records"))
    runner = CobordismSearch(settings, cache)
    first = runner.run(bound_p=6, c_range=range(-2, 6))
    assert cache.get_cache_stats()["files_on_disk"] == 1
    second = CobordismSearch(settings, RecordCache(str(tmp_path / "records"))).run(bound_p=6, c_range=range(-2, 6))
    assert [c.model_dump() for c in first.candidates] == [c.model_dump() for c in second.candidates]
    assert first.rejections == second.rejections

from math import gcd

import pytest

from app.core.errors import InvalidFractionError
from app.models.schemas import EucContinuedFraction, Frac
from app.services.arith import (
    continuant,
    det,
    dual,
    euc_of_frac,
    frac_of_euc,
    frac_of_hj,
    hj_of_frac,
    hj_reversal_partner,
    mediant,
)


@pytest.mark.parametrize("p,q,coeffs", [
    (16, 7, (3, 2, 2, 3)),
    (25, 9, (3, 5, 2)),
    (9, 4, (3, 2, 2, 2)),
    (5, 1, (5,)),
    (1, 0, ()),
    (2, 2, (1,)),
])
def test_hj_of_frac_worked_values(p, q, coeffs):
    assert hj_of_frac(Frac(p=p, q=q)).coeffs == coeffs


def test_frac_of_hj_is_total():
    assert frac_of_hj([]).pair == (1, 0)
    assert frac_of_hj([1, 1]).pair == (0, 1)
    assert frac_of_hj([3, 2, 2, 3, 5, 3, 5, 2]).pair == (1681, 737)
    assert frac_of_hj([3, 2, 6, 2]).pair == (49, 20)


@pytest.mark.slow
def test_hj_round_trip_is_exact():
    for p in range(2, 501):
        for q in range(1, p):
            if gcd(p, q) != 1:
                continue
            cf = hj_of_frac(Frac(p=p, q=q))
            assert all(a >= 2 for a in cf.coeffs)
            assert frac_of_hj(cf).pair == (p, q)


@pytest.mark.parametrize("p,q", [(7, 16), (6, 4), (5, 0), (3, 3), (4, -1)])
def test_hj_of_frac_rejects_bad_input(p, q):
    with pytest.raises(InvalidFractionError):
        hj_of_frac(Frac(p=p, q=q))


def test_euclidean_expansion_keeps_remainders():
    cf = euc_of_frac(Frac(p=16, q=7))
    assert cf.coeffs == (2, 3, 2)
    assert cf.remainders == (2, 1)
    assert frac_of_euc(cf).pair == (16, 7)
    assert euc_of_frac(Frac(p=1, q=1)).coeffs == (1,)


@pytest.mark.slow
def test_euclidean_round_trip():
    for p in range(2, 501):
        for q in range(1, p):
            if gcd(p, q) == 1:
                assert frac_of_euc(euc_of_frac(Frac(p=p, q=q))).pair == (p, q)


def test_euclidean_rejects_non_positive_coefficients():
    with pytest.raises(ValueError):
        EucContinuedFraction(coeffs=(2, 0))
    with pytest.raises(InvalidFractionError):
        euc_of_frac(Frac(p=4, q=6))


def test_dual_and_reversal_partner():
    assert dual(Frac(p=16, q=7)).pair == (16, 9)
    assert hj_reversal_partner(Frac(p=16, q=7)).pair == (16, 7)
    partner = hj_reversal_partner(Frac(p=25, q=9))
    assert partner.pair == (25, 14)
    assert hj_of_frac(partner).coeffs == tuple(reversed(hj_of_frac(Frac(p=25, q=9)).coeffs))


@pytest.mark.slow
def test_reversal_partner_reverses_every_expansion():
    for p in range(3, 501):
        for q in range(1, p):
            if gcd(p, q) == 1:
                f = Frac(p=p, q=q)
                assert hj_of_frac(hj_reversal_partner(f)).coeffs == tuple(reversed(hj_of_frac(f).coeffs))


def test_mediant_and_determinant():
    a, b = Frac(p=1, q=0), Frac(p=3, q=2)
    assert mediant(a, b).pair == (4, 2)
    assert det(a, b) == 2
    assert continuant([2, 1, 2]) == (0, 1)


def test_fraction_model_rules():
    assert Frac.parse("16/7").pair == (16, 7)
    assert Frac.parse("5").pair == (5, 1)
    assert Frac(p=2, q=2) != Frac(p=1, q=1)
    assert Frac(p=2, q=2).reduce().pair == (1, 1)
    with pytest.raises(ValueError):
        Frac(p=0, q=0)
    with pytest.raises(ValueError):
        Frac.parse("a/b")

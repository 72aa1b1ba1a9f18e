"""Exact fractions and continued fractions in both conventions.

Hirzebruch-Jung expansions use the minus convention
``[a1, ..., ak] = a1 - 1/(a2 - 1/(... - 1/ak))`` and are evaluated by the
continuant recursion, so arbitrary integer entries never divide by zero.
Euclidean expansions use the plus convention and come with the remainder
sequence of the Euclidean algorithm.
"""
from math import gcd
from typing import Iterable, List, Sequence, Tuple, Union

from ..core.errors import InvalidFractionError
from ..models.schemas import EucContinuedFraction, Frac, HJContinuedFraction

CoeffsLike = Union[HJContinuedFraction, Sequence[int]]


def _coeffs(cf: CoeffsLike) -> Tuple[int, ...]:
    if isinstance(cf, HJContinuedFraction):
        return cf.coeffs
    return tuple(cf)


def continuant(coeffs: Iterable[int]) -> Tuple[int, int]:
    """Numerator and denominator of an HJ expansion as raw integers."""
    p_prev, p = 0, 1
    q_prev, q = -1, 0
    for a in coeffs:
        p_prev, p = p, a * p - p_prev
        q_prev, q = q, a * q - q_prev
    return p, q


def frac_of_hj(cf: CoeffsLike) -> Frac:
    """Evaluate [a1, ..., ak]; total on integer sequences, [] gives 1/0."""
    p, q = continuant(_coeffs(cf))
    return Frac(p=p, q=q)


def hj_of_frac(f: Frac) -> HJContinuedFraction:
    """Canonical expansion with every entry >= 2, by the ceiling recursion."""
    p, q = f.p, f.q
    if (p, q) == (1, 0):
        return HJContinuedFraction(coeffs=())
    if (p, q) == (2, 2):
        return HJContinuedFraction(coeffs=(1,))
    if q <= 0 or p <= q:
        raise InvalidFractionError(f"HJ expansion needs p > q > 0, got {f}")
    if gcd(p, q) != 1:
        raise InvalidFractionError(f"HJ expansion needs lowest terms, got {f}")

    coeffs: List[int] = []
    while q:
        a = -(-p // q)
        coeffs.append(a)
        p, q = q, a * q - p
    return HJContinuedFraction(coeffs=tuple(coeffs))


def euc_of_frac(f: Frac) -> EucContinuedFraction:
    """Quotients and remainders of the Euclidean algorithm on p/q."""
    p, q = f.p, f.q
    if (p, q) == (1, 1):
        return EucContinuedFraction(coeffs=(1,))
    if q < 1 or p <= q:
        raise InvalidFractionError(f"Euclidean expansion needs p > q >= 1, got {f}")
    if gcd(p, q) != 1:
        raise InvalidFractionError(f"Euclidean expansion needs coprime p, q, got {f}")

    coeffs: List[int] = []
    remainders: List[int] = []
    while q:
        n, r = divmod(p, q)
        coeffs.append(n)
        if r:
            remainders.append(r)
        p, q = q, r
    return EucContinuedFraction(coeffs=tuple(coeffs), remainders=tuple(remainders))


def frac_of_euc(cf: EucContinuedFraction) -> Frac:
    """Evaluate n1 + 1/(n2 + ...) by folding from the tail."""
    num, den = 1, 0
    for n in reversed(cf.coeffs):
        num, den = n * num + den, num
    return Frac(p=num, q=den)


def dual(f: Frac) -> Frac:
    """p/(p-q)."""
    if f.p <= 0 or not 0 <= f.q <= f.p:
        raise InvalidFractionError(f"dual needs p >= q >= 0 and p > 0, got {f}")
    return Frac(p=f.p, q=f.p - f.q)


def mediant(f1: Frac, f2: Frac) -> Frac:
    return Frac(p=f1.p + f2.p, q=f1.q + f2.q)


def det(f1: Frac, f2: Frac) -> int:
    return f1.p * f2.q - f1.q * f2.p


def hj_reversal_partner(f: Frac) -> Frac:
    """p/q' with q*q' = 1 mod p; its HJ expansion is the reverse of that of p/q."""
    if f.q <= 0 or f.p <= f.q or gcd(f.p, f.q) != 1:
        raise InvalidFractionError(f"reversal partner needs coprime p > q > 0, got {f}")
    return Frac(p=f.p, q=pow(f.q, -1, f.p))


def reduce(f: Frac) -> Frac:
    return f.reduce()

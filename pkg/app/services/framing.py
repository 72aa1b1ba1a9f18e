"""Framing bookkeeping for the blow-ups that build B_{p,q}.

After all blow-ups the chain of framed circles reads
``hj(p/q) ++ [1] ++ reverse(hj(p/(p-q)))``. The same sequence can be read off
the Euclidean quotients n1..nm directly: on the left of the separator the odd
quotients give single entries and the even ones runs of 2s; on the right the
roles swap. Both generators are kept so each can check the other.
"""
from math import gcd
from typing import List

from ..core.errors import InvalidFractionError
from ..models.schemas import Frac, FramingSequence
from .arith import euc_of_frac, hj_of_frac


def _reduced_pair(p: int, q: int) -> tuple:
    if not p > q > 0:
        raise InvalidFractionError(f"framing sequence needs p > q > 0, got {p}/{q}")
    g = gcd(p, q)
    if g == 2:
        p, q = p // 2, q // 2
    elif g != 1:
        raise InvalidFractionError(f"framing sequence needs gcd(p, q) in {{1, 2}}, got {p}/{q}")
    return p, q


def framing_sequence(p: int, q: int) -> FramingSequence:
    p, q = _reduced_pair(p, q)
    left = hj_of_frac(Frac(p=p, q=q)).coeffs
    right = tuple(reversed(hj_of_frac(Frac(p=p, q=p - q)).coeffs))
    return FramingSequence(entries=left + (1,) + right, separator=len(left))


def framing_sequence_from_euclid(p: int, q: int) -> FramingSequence:
    """Build the sequence from the Euclidean quotients, without HJ conversion."""
    p, q = _reduced_pair(p, q)
    n = euc_of_frac(Frac(p=p, q=q)).coeffs
    m = len(n)

    def single(i: int) -> List[int]:
        # ends of the chain lose one: i = 1 at the outer end, i = m at the separator
        return [n[i - 1] + 2 - (i == 1) - (i == m)]

    def run(i: int) -> List[int]:
        return [2] * (n[i - 1] - 1)

    left: List[int] = []
    for i in range(1, m + 1):
        left += single(i) if i % 2 else run(i)
    right: List[int] = []
    for i in range(m, 0, -1):
        right += run(i) if i % 2 else single(i)
    return FramingSequence(entries=tuple(left) + (1,) + tuple(right), separator=len(left))


def euclid_identity_check(p: int, q: int) -> bool:
    """pq = n1 q^2 + n2 r1^2 + ... + nm r_{m-1}^2."""
    cf = euc_of_frac(Frac(p=p, q=q))
    squares = (q,) + cf.remainders
    return p * q == sum(n * r * r for n, r in zip(cf.coeffs, squares))

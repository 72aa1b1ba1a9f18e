"""Lens spaces, orientation conventions and the ball-boundary dictionary.

L(p, q) is -p/q surgery on the unknot. The rational ball B_{p,q} has
boundary L(p^2, pq - 1); -B_{p,q} has the orientation-reversed boundary.
"""
from itertools import permutations
from math import gcd, isqrt
from typing import Callable, List, Optional, Tuple
import logging

from ..core.errors import InvalidBallError, InvalidLensError
from ..models.schemas import BallParams, LensSpace, LensSum

logger = logging.getLogger(__name__)

# Pluggable "bounds a rational homology ball" oracle.
BallOracle = Callable[[LensSpace], List[BallParams]]


def boundary_of_ball(b: BallParams) -> LensSpace:
    if b.p == 0:
        return LensSpace(p=1, q=0)
    lens = LensSpace(p=b.p * b.p, q=b.p * b.q - 1)
    return lens if b.sign > 0 else lens.reversed()


def reverse_orientation(a: LensSpace) -> LensSpace:
    return a.reversed()


def _same_oriented(p: int, q1: int, q2: int) -> bool:
    return (q1 - q2) % p == 0 or (q1 * q2 - 1) % p == 0


def equiv_oriented(a: LensSpace, b: LensSpace) -> bool:
    return a.p == b.p and _same_oriented(a.p, a.q, b.q)


def equiv_unoriented(a: LensSpace, b: LensSpace) -> bool:
    return equiv_oriented(a, b) or equiv_oriented(a, b.reversed())


def canonical_q(p: int, q: int, oriented: bool = True) -> int:
    """Least representative of the class of q: {q, 1/q} oriented, {±q, ±1/q} unoriented."""
    if p < 1 or gcd(p, q) != 1:
        raise InvalidLensError(f"L({p},{q}) needs p >= 1 and gcd(p, q) = 1")
    if p == 1:
        return 0
    q %= p
    inv = pow(q, -1, p)
    candidates = {q, inv}
    if not oriented:
        candidates |= {p - q, p - inv}
    return min(candidates)


def canonical_lens(a: LensSpace, oriented: bool = True) -> LensSpace:
    return LensSpace(p=a.p, q=canonical_q(a.p, a.q, oriented))


def normalize_ball_params(p: int, q: int, sign: int = 1) -> BallParams:
    """Representative with 0 <= q <= p/2, using B_{p,q} = B_{p,kp±q}."""
    if p < 0:
        p, q = -p, -q
    if p == 0 and q == 0:
        raise InvalidBallError("B_{0,0} is not a ball")
    if gcd(p, q) > 2:
        raise InvalidBallError(f"B_{{{p},{q}}} needs gcd(p, q) in {{1, 2}}")
    if p == 0:
        return BallParams(p=0, q=abs(q), sign=sign)
    r = q % p
    return BallParams(p=p, q=min(r, p - r), sign=sign)


def flip_two_zero(b: BallParams) -> BallParams:
    """Apply ±B_{2,0} = ∓B_{2,1}; other balls are returned unchanged."""
    if b.p != 2:
        return b
    if b.q % 2 == 0:
        return BallParams(p=2, q=1, sign=-b.sign)
    return BallParams(p=2, q=0, sign=-b.sign)


def with_two_one(balls: Tuple[BallParams, ...]) -> Tuple[BallParams, ...]:
    """Write every ±B_{2,0} as ∓B_{2,1}; boundaries are unchanged."""
    return tuple(flip_two_zero(b) if b.p == 2 and b.q % 2 == 0 else b for b in balls)


def recognize_pair(big_p: int, big_q: int) -> List[Tuple[int, int, int]]:
    """Raw-integer form of recognize_ball_boundary: (m, q, sign) triples."""
    m = isqrt(big_p)
    if m * m != big_p:
        return []
    if big_p == 1:
        return [(1, 0, 1)]
    big_q %= big_p
    if gcd(big_p, big_q) != 1:
        return []
    inv = pow(big_q, -1, big_p)
    found = []
    for q in range(0, m // 2 + 1):
        if gcd(m, q) not in (1, 2):
            continue
        q0 = (m * q - 1) % big_p
        if q0 == big_q or q0 == inv:
            found.append((m, q, 1))
        elif (big_p - q0) == big_q or (big_p - q0) == inv:
            found.append((m, q, -1))
    return found


def recognize_ball_boundary(lens: LensSpace) -> List[BallParams]:
    """All normalized signed balls δ·B_{p,q} whose boundary is ``lens`` (oriented)."""
    return [BallParams(p=m, q=q, sign=s) for m, q, s in recognize_pair(lens.p, lens.q)]


def preferred_ball(lens: LensSpace, oracle: BallOracle = recognize_ball_boundary) -> Optional[BallParams]:
    """First recognized ball, preferring a positively oriented one."""
    balls = oracle(lens)
    if not balls:
        return None
    for b in balls:
        if b.sign > 0:
            return b
    return balls[0]


def lens_sum_equiv(a: LensSum, b: LensSum, oriented: bool = True) -> bool:
    if len(a.summands) != len(b.summands):
        return False
    same = equiv_oriented if oriented else equiv_unoriented
    return any(
        all(same(x, y) for x, y in zip(a.summands, perm))
        for perm in permutations(b.summands)
    )


def berge_example_lenses(r: int) -> Tuple[LensSpace, LensSum]:
    """The lens spaces quoted for the surgery examples at parameter r."""
    return (
        LensSpace(p=(2 * r + 2) ** 2, q=4 * r + 3),
        LensSum(summands=(
            LensSpace(p=r * r, q=r * r - 2 * r - 1),
            LensSpace(p=(r + 1) ** 2, q=2 * r + 1),
        )),
    )


def berge_example_identities(r: int) -> bool:
    """Check the quoted surgeries are the boundaries of B_{2r+2,2}, B_{r,r-2} and B_{r+1,2}."""
    if r < 2:
        raise InvalidBallError(f"Berge example identities need r >= 2, got {r}")
    single, pair = berge_example_lenses(r)
    ok_single = equiv_oriented(boundary_of_ball(BallParams(p=2 * r + 2, q=2)), single)
    balls_sum = LensSum(summands=(
        boundary_of_ball(BallParams(p=r, q=r - 2)),
        boundary_of_ball(BallParams(p=r + 1, q=2)),
    ))
    ok_pair = lens_sum_equiv(balls_sum, pair, oriented=True)
    if not (ok_single and ok_pair):
        logger.warning("Berge identities fail at r=%d", r)
    return ok_single and ok_pair

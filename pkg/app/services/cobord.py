"""Embeddings from cobordisms: CF concatenation with a middle entry c (ADDC),
the single-entry +4 bump (ADD4), and a bounded search over both.

For ADDC, t/u = [a_m, ..., a_1, c, b_1, ..., b_n] where p/q = [a_1, ..., a_m]
and r/s = [b_1, ..., b_n]. The resulting manifold is a homotopy CP² when the
Seifert Euler number c - q/p - s/r is positive and a homotopy CP̄² otherwise.
"""
from collections import Counter
from fractions import Fraction
from math import gcd, isqrt
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union
import logging
import time

from tqdm import tqdm

from ..core.config import Settings, get_settings
from ..core.errors import InvalidFractionError
from ..core.pool import get_executor
from ..models.schemas import (
    BallParams,
    Construction,
    EmbeddingCandidate,
    Frac,
    HJContinuedFraction,
    LensSpace,
    Provenance,
    Rejection,
    RejectionReason,
    SearchResult,
)
from .arith import continuant, frac_of_hj, hj_of_frac
from .cache_service import RecordCache
from .lens import BallOracle, boundary_of_ball, canonical_q, preferred_ball, recognize_ball_boundary, with_two_one

logger = logging.getLogger(__name__)

Outcome = Union[EmbeddingCandidate, Rejection]
CONSTRUCTIONS = ("ADDC", "ADD4")
B21 = BallParams(p=2, q=1, sign=1)


def euler_number(pq: Frac, rs: Frac, c: int) -> Fraction:
    """c - q/p - s/r, with q and s reduced mod p and r first."""
    if pq.p <= 0 or rs.p <= 0:
        raise InvalidFractionError(f"Euler number needs p, r > 0, got {pq} and {rs}")
    return c - Fraction(pq.q % pq.p, pq.p) - Fraction(rs.q % rs.p, rs.p)


def plumbing_numerator(pq: Frac, rs: Frac, c: int) -> int:
    """Signed numerator of the concatenated expansion: c·p·r - q·r - p·s."""
    return c * pq.p * rs.p - pq.q * rs.p - pq.p * rs.q


def _candidate(
    construction: Construction,
    balls: Tuple[BallParams, BallParams, BallParams],
    sign: int,
    provenance: Provenance,
) -> EmbeddingCandidate:
    balls = with_two_one(balls)
    return EmbeddingCandidate(
        construction=construction,
        provenance=(provenance,),
        balls=balls,
        boundaries=tuple(boundary_of_ball(b) for b in balls),
        sign=sign,
    )


def _unrecognized(lenses: Sequence[LensSpace], balls: Sequence[Optional[BallParams]]) -> Rejection:
    names = ", ".join(str(lens) for lens, ball in zip(lenses, balls) if ball is None)
    return Rejection(reason=RejectionReason.ORACLE_UNRECOGNIZED, detail=f"no ball bounds {names}")


def addc(pq: Frac, rs: Frac, c: int, oracle: BallOracle = recognize_ball_boundary) -> Outcome:
    a = hj_of_frac(pq).coeffs
    b = hj_of_frac(rs).coeffs
    t, u = continuant(tuple(reversed(a)) + (c,) + b)
    if t < 0:
        t, u = -t, -u

    p, r = pq.p, rs.p
    if t == 0:
        return Rejection(reason=RejectionReason.DEGENERATE_T, detail=f"c = {c} closes {pq.p}/{pq.q} and {rs.p}/{rs.q} into t = 0")
    if gcd(p, r) != 1 or gcd(p, t) != 1 or gcd(r, t) != 1:
        return Rejection(reason=RejectionReason.NOT_COPRIME, detail=f"orders {p}, {r}, {t} are not pairwise coprime")

    lenses = (LensSpace(p=p, q=pq.q), LensSpace(p=r, q=rs.q), LensSpace(p=t, q=u))
    found = [preferred_ball(lens, oracle) for lens in lenses]
    if any(ball is None for ball in found):
        return _unrecognized(lenses, found)

    sign = 1 if euler_number(pq, rs, c) > 0 else -1
    # the plumbing runs from L # L' to L'': B and B' are glued along -L and -L', -B'' along L''
    balls = (found[0].negated(), found[1].negated(), found[2])
    provenance = Provenance(construction=Construction.ADDC, sign=sign, left=pq, right=rs, c=c)
    return _candidate(Construction.ADDC, balls, sign, provenance)


def add4(a: Union[HJContinuedFraction, Sequence[int]], j: int, oracle: BallOracle = recognize_ball_boundary) -> Outcome:
    """Bump the j-th entry (1-based) of a by 4."""
    coeffs = a.coeffs if isinstance(a, HJContinuedFraction) else tuple(a)
    if not 1 <= j <= len(coeffs):
        raise InvalidFractionError(f"index j={j} outside 1..{len(coeffs)}")
    p, q = continuant(coeffs)
    bumped = coeffs[: j - 1] + (coeffs[j - 1] + 4,) + coeffs[j:]
    t, u = continuant(bumped)

    if p % 2 == 0 or t % 2 == 0 or gcd(p, t) != 1:
        return Rejection(reason=RejectionReason.NOT_ODD_COPRIME, detail=f"orders {p} and {t} must be odd and coprime")

    lenses = (LensSpace(p=p, q=q), LensSpace(p=t, q=u))
    found = [preferred_ball(lens, oracle) for lens in lenses]
    if any(ball is None for ball in found):
        return _unrecognized(lenses, found)

    balls = (found[0], B21, found[1].negated())
    provenance = Provenance(construction=Construction.ADD4, sign=1, cf=coeffs, j=j)
    return _candidate(Construction.ADD4, balls, 1, provenance)


def recognized_sources(bound_p: int) -> List[Tuple[int, int]]:
    """Every (P, Q), 0 < Q < P, with L(P, Q) = ±∂B_{m,q} for some 2 <= m <= bound_p."""
    sources = set()
    for m in range(2, bound_p + 1):
        big_p = m * m
        for q in range(0, m // 2 + 1):
            if gcd(m, q) not in (1, 2):
                continue
            q0 = (m * q - 1) % big_p
            inv = pow(q0, -1, big_p)
            sources.update((big_p, x) for x in (q0, inv, big_p - q0, big_p - inv))
    return sorted(sources)


def candidate_key(candidate: EmbeddingCandidate, oriented: bool = True) -> Tuple[Tuple[int, int], ...]:
    """Canonical sorted boundary triple as seen in CP²."""
    return tuple(sorted((lens.p, canonical_q(lens.p, lens.q, oriented)) for lens in candidate.cp2_boundaries()))


def _addc_chunk(args) -> Tuple[List[EmbeddingCandidate], Dict[str, int]]:
    index, sources, c_values, oracle = args
    big_p, big_q = sources[index]
    only_squares = oracle is recognize_ball_boundary
    found: List[EmbeddingCandidate] = []
    rejections: Counter = Counter()
    left = Frac(p=big_p, q=big_q)
    for big_r, big_s in sources[index + 1:]:
        if gcd(big_p, big_r) != 1:
            rejections[RejectionReason.NOT_COPRIME.value] += len(c_values)
            continue
        right = Frac(p=big_r, q=big_s)
        for c in c_values:
            t = abs(c * big_p * big_r - big_q * big_r - big_p * big_s)
            if t == 0:
                rejections[RejectionReason.DEGENERATE_T.value] += 1
                continue
            if gcd(big_p, t) != 1 or gcd(big_r, t) != 1:
                rejections[RejectionReason.NOT_COPRIME.value] += 1
                continue
            if only_squares and isqrt(t) ** 2 != t:
                rejections[RejectionReason.ORACLE_UNRECOGNIZED.value] += 1
                continue
            outcome = addc(left, right, c, oracle)
            if isinstance(outcome, Rejection):
                rejections[outcome.reason.value] += 1
            else:
                found.append(outcome)
    return found, dict(rejections)


def _add4_sources(sources: Iterable[Tuple[int, int]], oracle: BallOracle) -> Tuple[List[EmbeddingCandidate], Dict[str, int]]:
    found: List[EmbeddingCandidate] = []
    rejections: Counter = Counter()
    for big_p, big_q in sources:
        if big_p % 2 == 0:
            continue
        coeffs = hj_of_frac(Frac(p=big_p, q=big_q)).coeffs
        for j in range(1, len(coeffs) + 1):
            outcome = add4(coeffs, j, oracle)
            if isinstance(outcome, Rejection):
                rejections[outcome.reason.value] += 1
            else:
                found.append(outcome)
    return found, dict(rejections)


def merge_candidates(candidates: Iterable[EmbeddingCandidate], oriented: bool = True) -> List[EmbeddingCandidate]:
    """One candidate per boundary key, carrying every provenance; sorted by key."""
    groups: Dict[tuple, List[EmbeddingCandidate]] = {}
    for candidate in candidates:
        groups.setdefault(candidate_key(candidate, oriented), []).append(candidate)

    merged = []
    for key in sorted(groups):
        group = sorted(groups[key], key=lambda c: c.provenance[0].sort_key())
        provenance = sorted({p for c in group for p in c.provenance}, key=lambda p: p.sort_key())
        merged.append(group[0].model_copy(update={"provenance": tuple(provenance)}))
    return merged


def search(
    bound_p: int,
    c_range: Iterable[int],
    constructions: Sequence[str] = CONSTRUCTIONS,
    workers: int = 1,
    oriented: bool = True,
    oracle: BallOracle = recognize_ball_boundary,
    show_progress: bool = False,
) -> SearchResult:
    c_values = tuple(c_range)
    sources = recognized_sources(bound_p)
    candidates: List[EmbeddingCandidate] = []
    rejections: Counter = Counter()

    if "ADDC" in constructions and c_values:
        tasks = [(i, sources, c_values, oracle) for i in range(len(sources))]
        with get_executor(workers) as executor:
            results = executor.map(_addc_chunk, tasks, chunksize=max(1, len(tasks) // (4 * max(workers, 1))))
            for found, counts in tqdm(results, total=len(tasks), desc="addc", disable=not show_progress):
                candidates.extend(found)
                rejections.update(counts)

    if "ADD4" in constructions:
        found, counts = _add4_sources(sources, oracle)
        candidates.extend(found)
        rejections.update(counts)

    return SearchResult(
        candidates=merge_candidates(candidates, oriented),
        rejections=dict(sorted(rejections.items())),
        bounds={"bound_p": bound_p, "c_min": min(c_values, default=None), "c_max": max(c_values, default=None),
                "constructions": sorted(constructions)},
    )


class CobordismSearch:
    """Runs ``search`` with settings, result caching and timing logs."""

    def __init__(self, settings: Optional[Settings] = None, cache: Optional[RecordCache] = None,
                 oracle: BallOracle = recognize_ball_boundary):
        self.settings = settings or get_settings()
        self.cache = cache
        self.oracle = oracle

    def run(
        self,
        bound_p: Optional[int] = None,
        c_range: Optional[Iterable[int]] = None,
        constructions: Sequence[str] = CONSTRUCTIONS,
        oriented: Optional[bool] = None,
    ) -> SearchResult:
        start_time = time.time()
        bound_p = self.settings.SEARCH_BOUND_P if bound_p is None else bound_p
        c_values = tuple(self.settings.c_range if c_range is None else c_range)
        oriented = self.settings.MATCH_ORIENTATION == "oriented" if oriented is None else oriented
        constructions = tuple(sorted(c.upper() for c in constructions))
        logger.info("Search request received: bound_p=%d c=%s constructions=%s", bound_p,
                    f"[{min(c_values, default='')}, {max(c_values, default='')}]", ",".join(constructions))

        config = {"kind": "search", "version": 2, "bound_p": bound_p, "c": list(c_values),
                  "constructions": list(constructions), "oriented": oriented,
                  "oracle": getattr(self.oracle, "__name__", repr(self.oracle))}
        key = RecordCache.key_for(config)
        if self.cache is not None:
            records = self.cache.get(key)
            if records is not None:
                logger.debug("Using cached search results for key %s", key)
                header, body = records[0], records[1:]
                return SearchResult(
                    candidates=[EmbeddingCandidate.model_validate(r) for r in body],
                    rejections=header["rejections"],
                    bounds=header["bounds"],
                )

        result = search(bound_p, c_values, constructions, workers=self.settings.WORKERS, oriented=oriented,
                        oracle=self.oracle, show_progress=self.settings.SHOW_PROGRESS)
        if self.cache is not None:
            header = {"rejections": result.rejections, "bounds": result.bounds}
            self.cache.set(key, [header] + [c.model_dump(mode="json", by_alias=True) for c in result.candidates])

        duration = time.time() - start_time
        logger.info("Search completed successfully in %.3f seconds: %d candidates, rejections %s",
                    duration, len(result.candidates), result.rejections)
        return result

"""Catalog of lens-space triples realised by disjoint ball embeddings, and its
comparison against the shipped table fixture.

Rows are keyed by their CP²-frame boundaries, canonicalized per lens and sorted
by order. Four sources feed the catalog: the 2-Farey tree (FAREY, fixture mark
``*``), the LP2 and LP3 slide trees (LP, mark ``†``) and the two cobordism
constructions (ADDC, ADD4).
"""
from math import isqrt
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple
import logging
import time

from tqdm import tqdm

from ..core.config import Settings, get_settings
from ..core.errors import FixtureError
from ..models.schemas import (
    ComparisonReport,
    CatalogRow,
    Construction,
    EmbeddingCandidate,
    FamilyId,
    FixtureRow,
    LensSpace,
    Provenance,
    RowVerdict,
    SourceTag,
    Verdict,
)
from . import farey, slidetree
from .cache_service import RecordCache, get_record_cache
from .cobord import CobordismSearch, add4, addc, candidate_key
from .lens import boundary_of_ball, canonical_lens, normalize_ball_params, with_two_one

logger = logging.getLogger(__name__)

FIXTURE_FILE = Path(__file__).resolve().parent.parent / "data" / "lens_triples.txt"
FIXTURE_MARKS = {"*": SourceTag.FAREY, "†": SourceTag.LP}
TAG_ORDER = (SourceTag.FAREY, SourceTag.LP, SourceTag.ADDC, SourceTag.ADD4)
SLIDE_FAMILIES = (FamilyId.MARKOV, FamilyId.LP2, FamilyId.LP3)
CATALOG_VERSION = 2

RowKey = Tuple[Tuple[int, int], Tuple[int, int], Tuple[int, int]]


def _parse_pair(token: str, line_number: int) -> Tuple[int, int]:
    try:
        p, q = (int(part) for part in token.split(","))
    except ValueError:
        raise FixtureError(f"expected p,q but found {token!r}", line_number) from None
    return p, q


def parse_fixture_line(line: str, line_number: int = 0) -> Optional[FixtureRow]:
    """One fixture row, or None for blank and comment lines."""
    text = line.split("#", 1)[0].strip()
    if not text:
        return None
    tokens = text.split()
    if len(tokens) not in (4, 5):
        raise FixtureError(f"expected 'p1,q1 p2,q2 p3,q3 yes|no [marks]', got {text!r}", line_number)
    pairs = tuple(_parse_pair(t, line_number) for t in tokens[:3])
    if tokens[3] not in ("yes", "no"):
        raise FixtureError(f"realised column must be yes or no, got {tokens[3]!r}", line_number)
    marks = tokens[4] if len(tokens) == 5 else ""
    if any(m not in FIXTURE_MARKS for m in marks) or len(set(marks)) != len(marks):
        raise FixtureError(f"unknown marks {marks!r}", line_number)
    if marks and tokens[3] == "no":
        raise FixtureError("only 'yes' rows carry marks", line_number)
    try:
        for p, q in pairs:
            LensSpace(p=p, q=q)
    except ValueError as e:
        raise FixtureError(f"invalid lens space: {e}", line_number) from None
    return FixtureRow(pairs=pairs, realised=tokens[3] == "yes", tags=tuple(marks), line_number=line_number)


def load_fixture(path: Optional[str] = None) -> List[FixtureRow]:
    fixture_path = Path(path) if path else FIXTURE_FILE
    try:
        text = fixture_path.read_text(encoding="utf-8")
    except OSError as e:
        raise FixtureError(f"cannot read fixture {fixture_path}: {e}") from None
    rows = []
    for number, line in enumerate(text.splitlines(), start=1):
        row = parse_fixture_line(line, number)
        if row is not None:
            rows.append(row)
    logger.debug("Loaded %d fixture rows from %s", len(rows), fixture_path)
    return rows


def canonical_row(lenses: Iterable[LensSpace], oriented: bool = True) -> Tuple[LensSpace, LensSpace, LensSpace]:
    return tuple(sorted((canonical_lens(lens, oriented) for lens in lenses), key=lambda l: (l.p, l.q)))


def row_key(lenses: Iterable[LensSpace]) -> RowKey:
    return tuple((lens.p, lens.q) for lens in lenses)


def in_window(key: RowKey, bound: int) -> bool:
    (p1, _), (p2, _), (p3, _) = key
    return 4 <= p1 < p2 < p3 <= bound


def _signed_candidate(construction: Construction, balls, sign: int, provenance: Provenance) -> EmbeddingCandidate:
    balls = with_two_one(balls)
    return EmbeddingCandidate(
        construction=construction,
        provenance=(provenance,),
        balls=balls,
        boundaries=tuple(boundary_of_ball(b) for b in balls),
        sign=sign,
    )


def farey_candidates(ball_bound: int) -> List[EmbeddingCandidate]:
    """2-Farey triples: balls +B_{pᵢ,qᵢ} embedded in a homotopy CP̄²."""
    found = []
    for node in farey.enumerate_two_farey(ball_bound):
        balls = tuple(normalize_ball_params(f.p, f.q, 1) for f in node.fracs)
        provenance = Provenance(construction=Construction.FAREY, sign=-1, path=node.path)
        found.append(_signed_candidate(Construction.FAREY, balls, -1, provenance))
    return found


def slide_candidates(ball_bound: int, families: Sequence[FamilyId] = SLIDE_FAMILIES,
                     max_depth: int = 64) -> List[EmbeddingCandidate]:
    """Slide-tree triples δᵢB_{pᵢ,qᵢ} embedded in CP²."""
    found = []
    for family in families:
        for node in slidetree.enumerate_tree(family, bound=ball_bound, max_depth=max_depth):
            provenance = Provenance(construction=Construction.SLIDE, sign=1, family=family, path=node.path)
            found.append(_signed_candidate(Construction.SLIDE, slidetree.triple_to_balls(node), 1, provenance))
    return found


def rows_from_candidates(
    candidates: Iterable[EmbeddingCandidate], bound: int, oriented: bool = True
) -> Tuple[List[CatalogRow], int]:
    """In-window catalog rows sorted by key, and the number of keys outside the window."""
    groups: Dict[RowKey, List[Provenance]] = {}
    for candidate in candidates:
        groups.setdefault(candidate_key(candidate, oriented), []).extend(candidate.provenance)

    rows, outside = [], 0
    for key in sorted(groups):
        if not in_window(key, bound):
            outside += 1
            continue
        provenance = sorted(set(groups[key]), key=lambda p: p.sort_key())
        tags = {p.tag for p in provenance}
        rows.append(CatalogRow(
            lenses=tuple(LensSpace(p=p, q=q) for p, q in key),
            realised=True,
            sources=tuple(t for t in TAG_ORDER if t in tags),
            provenance=tuple(provenance),
        ))
    return rows, outside


def validate_provenance(provenance: Provenance) -> bool:
    """Re-run the recorded construction and check it still succeeds."""
    if provenance.construction == Construction.FAREY:
        return provenance.path is not None and farey.validate_two_farey_triple(farey.node_at(provenance.path))
    if provenance.construction == Construction.SLIDE:
        if provenance.family is None or provenance.path is None:
            return False
        return slidetree.check_family(slidetree.node_at(provenance.family, provenance.path))
    if provenance.construction == Construction.ADDC:
        outcome = addc(provenance.left, provenance.right, provenance.c)
        return isinstance(outcome, EmbeddingCandidate) and outcome.sign == provenance.sign
    if provenance.construction == Construction.ADD4:
        return isinstance(add4(provenance.cf, provenance.j), EmbeddingCandidate)
    return False


class CatalogBuilder:
    """Builds catalog rows from every source, with caching and timing logs."""

    def __init__(self, settings: Optional[Settings] = None, cache: Optional[RecordCache] = None):
        self.settings = settings or get_settings()
        self.cache = cache
        self.outside_window = 0

    @property
    def oriented(self) -> bool:
        return self.settings.MATCH_ORIENTATION == "oriented"

    def bounds(self, bound: int) -> Dict[str, object]:
        return {
            "bound": bound,
            "search_bound_p": self.settings.SEARCH_BOUND_P,
            "c_min": self.settings.SEARCH_C_MIN,
            "c_max": self.settings.SEARCH_C_MAX,
            "orientation": self.settings.MATCH_ORIENTATION,
        }

    def build(self, bound: Optional[int] = None) -> List[CatalogRow]:
        start_time = time.time()
        bound = self.settings.CATALOG_BOUND if bound is None else bound
        logger.info("Catalog request received: bound=%d orientation=%s", bound, self.settings.MATCH_ORIENTATION)

        key = RecordCache.key_for({"kind": "catalog", "version": CATALOG_VERSION, **self.bounds(bound),
                                   "max_depth": self.settings.SLIDE_MAX_DEPTH})
        if self.cache is not None:
            records = self.cache.get(key)
            if records is not None:
                header, body = records[0], records[1:]
                self.outside_window = header["outside_window"]
                logger.debug("Using cached catalog for key %s", key)
                return [CatalogRow.model_validate(r) for r in body]

        ball_bound = isqrt(bound)
        phases = ("farey", "slide", "search")
        candidates: List[EmbeddingCandidate] = []
        for phase in tqdm(phases, desc="catalog", disable=not self.settings.SHOW_PROGRESS):
            if phase == "farey":
                found = farey_candidates(ball_bound)
            elif phase == "slide":
                found = slide_candidates(ball_bound, max_depth=self.settings.SLIDE_MAX_DEPTH)
            else:
                found = CobordismSearch(self.settings, self.cache).run(oriented=self.oriented).candidates
            logger.debug("Phase %s produced %d candidates", phase, len(found))
            candidates.extend(found)

        rows, self.outside_window = rows_from_candidates(candidates, bound, self.oriented)
        if self.outside_window:
            logger.info("%d realised triples fall outside 4 <= p1 < p2 < p3 <= %d", self.outside_window, bound)

        if self.cache is not None:
            header = {"outside_window": self.outside_window}
            self.cache.set(key, [header] + [r.model_dump(mode="json", by_alias=True) for r in rows])

        duration = time.time() - start_time
        logger.info("Catalog completed successfully in %.3f seconds: %d rows", duration, len(rows))
        return rows


def build_catalog(bound: int = 256, settings: Optional[Settings] = None, use_cache: bool = False) -> List[CatalogRow]:
    settings = settings or get_settings()
    cache = get_record_cache(settings.CACHE_DIR, settings.CACHE_ENABLED and use_cache)
    return CatalogBuilder(settings, cache).build(bound)


def _merge_fixture(fixture: Sequence[FixtureRow], oriented: bool) -> Dict[RowKey, Tuple[bool, Tuple[str, ...], List[int]]]:
    """Fixture rows by canonical key; colliding rows are merged (yes wins, marks united)."""
    merged: Dict[RowKey, Tuple[bool, Tuple[str, ...], List[int]]] = {}
    for row in fixture:
        key = row_key(canonical_row((LensSpace(p=p, q=q) for p, q in row.pairs), oriented))
        if key in merged:
            realised, tags, lines = merged[key]
            marks = tuple(m for m in FIXTURE_MARKS if m in tags or m in row.tags)
            merged[key] = (realised or row.realised, marks, lines + [row.line_number])
        else:
            merged[key] = (row.realised, row.tags, [row.line_number])
    return merged


def _judge(expected: bool, marks: Tuple[str, ...], row: Optional[CatalogRow], bounds: Dict[str, object]) -> Tuple[Verdict, bool, str]:
    if row is None:
        if not expected:
            return Verdict.NOT_FOUND_OK, False, ""
        if marks:
            return Verdict.MISSING, True, f"marked {''.join(marks)} but not produced"
        return Verdict.MISSING, False, f"not found with search bounds {bounds}"

    tags = set(row.sources)
    if not expected:
        return Verdict.EXTRA, True, "produced by " + ";".join(t.value for t in row.sources)

    missing = [m for m in marks if FIXTURE_MARKS[m] not in tags]
    if missing:
        return Verdict.MISSING, True, f"realised but not by {''.join(missing)} source"
    if SourceTag.FAREY in tags and "*" not in marks:
        return Verdict.EXTRA, True, "2-Farey triple on a row without *"
    if SourceTag.LP in tags and "†" not in marks:
        return Verdict.MATCH, False, "also realised by an LP family"
    return Verdict.MATCH, False, ""


def compare_to_fixture(
    rows: Sequence[CatalogRow],
    fixture: Sequence[FixtureRow],
    oriented: bool = True,
    bounds: Optional[Dict[str, object]] = None,
) -> ComparisonReport:
    """Per-row verdicts: fixture rows in fixture order, then unlisted catalog rows by key."""
    bounds = bounds or {}
    by_key = {row_key(row.lenses): row for row in rows}
    verdicts: List[RowVerdict] = []
    for key, (expected, marks, lines) in _merge_fixture(fixture, oriented).items():
        row = by_key.get(key)
        verdict, failing, note = _judge(expected, marks, row, bounds)
        if len(lines) > 1:
            merged_note = "merged fixture lines " + ",".join(str(n) for n in lines)
            note = f"{note}; {merged_note}" if note else merged_note
        verdicts.append(RowVerdict(
            lenses=tuple(LensSpace(p=p, q=q) for p, q in key),
            expected=expected,
            fixture_tags=marks,
            sources=row.sources if row else (),
            verdict=verdict,
            failing=failing,
            note=note,
        ))
        by_key.pop(key, None)

    for key in sorted(by_key):
        row = by_key[key]
        # every in-window realisation must be a listed row
        verdicts.append(RowVerdict(
            lenses=row.lenses,
            expected=None,
            sources=row.sources,
            verdict=Verdict.EXTRA,
            failing=True,
            note="not listed in the fixture",
        ))

    report = ComparisonReport(verdicts=verdicts, orientation="oriented" if oriented else "unoriented", bounds=bounds)
    if report.failing:
        logger.warning("%d failing fixture verdicts", len(report.failing))
    return report


def table_rows(rows: Sequence[CatalogRow], fixture: Sequence[FixtureRow], oriented: bool = True) -> List[CatalogRow]:
    """Catalog rows plus the unrealised fixture rows, sorted by key."""
    keyed = {row_key(row.lenses): row for row in rows}
    for key, (expected, _, _) in _merge_fixture(fixture, oriented).items():
        if key not in keyed:
            keyed[key] = CatalogRow(lenses=tuple(LensSpace(p=p, q=q) for p, q in key), realised=False)
    return [keyed[k] for k in sorted(keyed)]

from __future__ import annotations

from enum import Enum
from math import gcd
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_serializer, model_validator

SCHEMA_VERSION = 1


def _pairs_to_fields(data: Any, names: Tuple[str, ...], required: int = 2) -> Any:
    """Accept the compact array encodings ([p, q], [p, q, δ]) as model input."""
    if isinstance(data, (list, tuple)):
        if not required <= len(data) <= len(names):
            raise ValueError(f"expected {required} to {len(names)} integers, got {list(data)!r}")
        return dict(zip(names, data))
    return data


class Frac(BaseModel):
    """A formal fraction p/q. Never reduced implicitly: 2/2 and 1/1 differ."""

    model_config = ConfigDict(frozen=True)

    p: int
    q: int

    @model_validator(mode="before")
    @classmethod
    def _from_pair(cls, data: Any) -> Any:
        if isinstance(data, (list, tuple)):
            if len(data) != 2:
                raise ValueError(f"a fraction is two integers, got {list(data)!r}")
            return {"p": data[0], "q": data[1]}
        return data

    @model_validator(mode="after")
    def _not_zero_over_zero(self) -> "Frac":
        if self.p == 0 and self.q == 0:
            raise ValueError("0/0 is not a fraction")
        return self

    @model_serializer
    def _as_pair(self) -> List[int]:
        return [self.p, self.q]

    @classmethod
    def of(cls, p: int, q: int) -> "Frac":
        return cls(p=p, q=q)

    @classmethod
    def parse(cls, text: str) -> "Frac":
        """Parse ``p/q`` (or a bare integer, read as p/1)."""
        parts = text.strip().split("/")
        try:
            if len(parts) == 1:
                return cls(p=int(parts[0]), q=1)
            if len(parts) == 2:
                return cls(p=int(parts[0]), q=int(parts[1]))
        except ValueError as e:
            raise ValueError(f"not a fraction: {text!r}") from e
        raise ValueError(f"not a fraction: {text!r}")

    @property
    def gcd(self) -> int:
        return gcd(self.p, self.q)

    @property
    def pair(self) -> Tuple[int, int]:
        return (self.p, self.q)

    def reduce(self) -> "Frac":
        g = self.gcd
        p, q = self.p // g, self.q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        return Frac(p=p, q=q)

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


class HJContinuedFraction(BaseModel):
    """Minus-convention expansion [a1, ..., ak]; any integer entries are allowed."""

    model_config = ConfigDict(frozen=True)

    coeffs: Tuple[int, ...] = ()

    @model_validator(mode="before")
    @classmethod
    def _from_list(cls, data: Any) -> Any:
        if isinstance(data, (list, tuple)):
            return {"coeffs": tuple(data)}
        return data

    @model_serializer
    def _as_list(self) -> List[int]:
        return list(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def reversed(self) -> "HJContinuedFraction":
        return HJContinuedFraction(coeffs=tuple(reversed(self.coeffs)))


class EucContinuedFraction(BaseModel):
    """Plus-convention expansion [n1, ..., nm]+ with the Euclidean remainders r1 > ... > 1."""

    model_config = ConfigDict(frozen=True)

    coeffs: Tuple[int, ...]
    remainders: Tuple[int, ...] = ()

    @model_validator(mode="after")
    def _positive(self) -> "EucContinuedFraction":
        if not self.coeffs:
            raise ValueError("a Euclidean continued fraction has at least one entry")
        if any(n < 1 for n in self.coeffs):
            raise ValueError(f"Euclidean coefficients must be positive: {self.coeffs}")
        return self

    @model_serializer
    def _as_list(self) -> List[int]:
        return list(self.coeffs)


class LensSpace(BaseModel):
    """L(p, q), the result of -p/q surgery on the unknot; q is stored mod p."""

    model_config = ConfigDict(frozen=True)

    p: int = Field(gt=0)
    q: int

    @model_validator(mode="before")
    @classmethod
    def _normalize(cls, data: Any) -> Any:
        data = _pairs_to_fields(data, ("p", "q"))
        if isinstance(data, dict):
            p, q = data.get("p"), data.get("q")
            if isinstance(p, int) and isinstance(q, int) and p > 0:
                data = {**data, "q": q % p}
        return data

    @model_validator(mode="after")
    def _coprime(self) -> "LensSpace":
        if gcd(self.p, self.q) != 1:
            raise ValueError(f"L({self.p},{self.q}) needs gcd(p, q) = 1")
        return self

    @model_serializer
    def _as_pair(self) -> List[int]:
        return [self.p, self.q]

    @classmethod
    def of(cls, p: int, q: int) -> "LensSpace":
        return cls(p=p, q=q)

    def reversed(self) -> "LensSpace":
        return LensSpace(p=self.p, q=-self.q)

    def __str__(self) -> str:
        return f"L({self.p},{self.q})"


class LensSum(BaseModel):
    """Connected sum of lens spaces; summands are kept sorted so equality ignores order."""

    model_config = ConfigDict(frozen=True)

    summands: Tuple[LensSpace, ...]

    @model_validator(mode="before")
    @classmethod
    def _sorted(cls, data: Any) -> Any:
        if isinstance(data, (list, tuple)):
            data = {"summands": data}
        if isinstance(data, dict) and "summands" in data:
            items = [s if isinstance(s, LensSpace) else LensSpace.model_validate(s) for s in data["summands"]]
            data = {**data, "summands": tuple(sorted(items, key=lambda s: (s.p, s.q)))}
        return data

    @model_serializer
    def _as_list(self) -> List[List[int]]:
        return [[s.p, s.q] for s in self.summands]


class BallParams(BaseModel):
    """A signed rational ball δ·B_{p,q}."""

    model_config = ConfigDict(frozen=True)

    p: int = Field(ge=0)
    q: int
    sign: int = 1

    @model_validator(mode="before")
    @classmethod
    def _from_list(cls, data: Any) -> Any:
        return _pairs_to_fields(data, ("p", "q", "sign"))

    @model_validator(mode="after")
    def _check(self) -> "BallParams":
        if self.sign not in (1, -1):
            raise ValueError(f"ball sign must be +1 or -1, got {self.sign}")
        if self.p == 0 and self.q == 0:
            raise ValueError("B_{0,0} is not a ball")
        if gcd(self.p, self.q) > 2:
            raise ValueError(f"B_{{{self.p},{self.q}}} needs gcd(p, q) in {{1, 2}}")
        return self

    @model_serializer
    def _as_list(self) -> List[int]:
        return [self.p, self.q, self.sign]

    def negated(self) -> "BallParams":
        return BallParams(p=self.p, q=self.q, sign=-self.sign)

    def __str__(self) -> str:
        prefix = "" if self.sign > 0 else "-"
        return f"{prefix}B_{{{self.p},{self.q}}}"


class FramingSequence(BaseModel):
    model_config = ConfigDict(frozen=True)

    entries: Tuple[int, ...]
    separator: int

    @model_validator(mode="after")
    def _separator_is_one(self) -> "FramingSequence":
        if not 0 <= self.separator < len(self.entries) or self.entries[self.separator] != 1:
            raise ValueError(f"separator {self.separator} does not point at a 1 in {self.entries}")
        return self

    @property
    def left(self) -> Tuple[int, ...]:
        return self.entries[: self.separator]

    @property
    def right(self) -> Tuple[int, ...]:
        return self.entries[self.separator + 1:]


class TripleNode(BaseModel):
    """A node of the (2-)Farey tree. ``path`` is None for nodes above the root."""

    model_config = ConfigDict(frozen=True)

    fracs: Tuple[Frac, Frac, Frac]
    path: Optional[str] = ""

    @property
    def middle(self) -> Frac:
        return self.fracs[1]


class FamilyId(str, Enum):
    MARKOV = "MARKOV"
    LP2 = "LP2"
    LP3 = "LP3"
    TWO_FAREY = "TWO_FAREY"


class SignedEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: int
    q: int
    delta: int

    @model_validator(mode="before")
    @classmethod
    def _from_list(cls, data: Any) -> Any:
        if isinstance(data, (list, tuple)):
            if len(data) != 3:
                raise ValueError(f"a signed entry is [p, q, delta], got {list(data)!r}")
            return {"p": data[0], "q": data[1], "delta": data[2]}
        return data

    @model_validator(mode="after")
    def _unit_sign(self) -> "SignedEntry":
        if self.delta not in (1, -1):
            raise ValueError(f"delta must be +1 or -1, got {self.delta}")
        return self

    @model_serializer
    def _as_list(self) -> List[int]:
        return [self.p, self.q, self.delta]

    @property
    def vector(self) -> Tuple[int, int]:
        return (self.p, self.q)


class SlideNode(BaseModel):
    """A node of a signed slide triple tree."""

    model_config = ConfigDict(frozen=True)

    entries: Tuple[SignedEntry, SignedEntry, SignedEntry]
    family: FamilyId
    path: Optional[str] = ""

    @computed_field
    @property
    def x(self) -> Tuple[int, int, int]:
        (p1, q1), (p2, q2), (p3, q3) = (e.vector for e in self.entries)
        return (p2 * q3 - p3 * q2, p1 * q3 - p3 * q1, p1 * q2 - p2 * q1)

    @property
    def deltas(self) -> Tuple[int, int, int]:
        return tuple(e.delta for e in self.entries)

    @property
    def ps(self) -> Tuple[int, int, int]:
        return tuple(e.p for e in self.entries)


class Construction(str, Enum):
    ADDC = "ADDC"
    ADD4 = "ADD4"
    FAREY = "FAREY"
    SLIDE = "SLIDE"


class SourceTag(str, Enum):
    FAREY = "FAREY"
    LP = "LP"
    ADDC = "ADDC"
    ADD4 = "ADD4"


CONSTRUCTION_TAGS = {
    Construction.FAREY: SourceTag.FAREY,
    Construction.SLIDE: SourceTag.LP,
    Construction.ADDC: SourceTag.ADDC,
    Construction.ADD4: SourceTag.ADD4,
}


class RejectionReason(str, Enum):
    NOT_COPRIME = "NOT_COPRIME"
    DEGENERATE_T = "DEGENERATE_T"
    ORACLE_UNRECOGNIZED = "ORACLE_UNRECOGNIZED"
    NOT_ODD_COPRIME = "NOT_ODD_COPRIME"


class Rejection(BaseModel):
    model_config = ConfigDict(frozen=True)

    reason: RejectionReason
    detail: str = ""


class Provenance(BaseModel):
    """Where a candidate came from; enough data to re-run the construction."""

    model_config = ConfigDict(frozen=True)

    construction: Construction
    sign: int = 1
    left: Optional[Frac] = None
    right: Optional[Frac] = None
    c: Optional[int] = None
    cf: Optional[Tuple[int, ...]] = None
    j: Optional[int] = None
    family: Optional[FamilyId] = None
    path: Optional[str] = None

    @property
    def tag(self) -> SourceTag:
        return CONSTRUCTION_TAGS[self.construction]

    def sort_key(self) -> tuple:
        return (
            self.construction.value,
            self.family.value if self.family else "",
            self.path or "",
            self.left.pair if self.left else (),
            self.right.pair if self.right else (),
            self.c if self.c is not None else 0,
            self.cf or (),
            self.j or 0,
            self.sign,
        )


class EmbeddingCandidate(BaseModel):
    """Three signed balls embedded in a homotopy CP² (sign +1) or CP̄² (sign -1)."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    schema_version: int = Field(default=SCHEMA_VERSION, alias="schema")
    construction: Construction
    provenance: Tuple[Provenance, ...]
    balls: Tuple[BallParams, BallParams, BallParams]
    boundaries: Tuple[LensSpace, LensSpace, LensSpace]
    sign: int

    def cp2_boundaries(self) -> Tuple[LensSpace, LensSpace, LensSpace]:
        """Boundaries as seen in CP² (orientation of every boundary reversed for CP̄²)."""
        if self.sign > 0:
            return self.boundaries
        return tuple(b.reversed() for b in self.boundaries)


class SearchResult(BaseModel):
    candidates: List[EmbeddingCandidate] = []
    rejections: Dict[str, int] = {}
    bounds: Dict[str, Any] = {}


class CatalogRow(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    schema_version: int = Field(default=SCHEMA_VERSION, alias="schema")
    lenses: Tuple[LensSpace, LensSpace, LensSpace]
    realised: bool = True
    sources: Tuple[SourceTag, ...] = ()
    provenance: Tuple[Provenance, ...] = ()

    @property
    def key(self) -> Tuple[int, ...]:
        return tuple(v for lens in self.lenses for v in (lens.p, lens.q))

    def csv_record(self) -> Dict[str, Any]:
        record: Dict[str, Any] = {}
        for i, lens in enumerate(self.lenses, start=1):
            record[f"p{i}"] = lens.p
            record[f"q{i}"] = lens.q
        record["realised"] = "yes" if self.realised else "no"
        record["sources"] = ";".join(tag.value for tag in self.sources)
        return record


class FixtureRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    pairs: Tuple[Tuple[int, int], Tuple[int, int], Tuple[int, int]]
    realised: bool
    tags: Tuple[str, ...] = ()
    line_number: int = 0


class Verdict(str, Enum):
    MATCH = "MATCH"
    MISSING = "MISSING"
    EXTRA = "EXTRA"
    NOT_FOUND_OK = "NOT_FOUND_OK"


class RowVerdict(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    schema_version: int = Field(default=SCHEMA_VERSION, alias="schema")
    lenses: Tuple[LensSpace, LensSpace, LensSpace]
    expected: Optional[bool] = None  # None: row is not listed in the fixture
    fixture_tags: Tuple[str, ...] = ()
    sources: Tuple[SourceTag, ...] = ()
    verdict: Verdict
    failing: bool = False
    note: str = ""

    def csv_record(self) -> Dict[str, Any]:
        record: Dict[str, Any] = {}
        for i, lens in enumerate(self.lenses, start=1):
            record[f"p{i}"] = lens.p
            record[f"q{i}"] = lens.q
        record["expected"] = "" if self.expected is None else ("yes" if self.expected else "no")
        record["fixture_tags"] = "".join(self.fixture_tags)
        record["sources"] = ";".join(tag.value for tag in self.sources)
        record["verdict"] = self.verdict.value
        record["failing"] = "yes" if self.failing else "no"
        record["note"] = self.note
        return record


class ComparisonReport(BaseModel):
    verdicts: List[RowVerdict]
    orientation: str
    bounds: Dict[str, Any] = {}

    @property
    def failing(self) -> List[RowVerdict]:
        return [v for v in self.verdicts if v.failing]

    def counts(self) -> Dict[str, int]:
        counts = {v.value: 0 for v in Verdict}
        for row in self.verdicts:
            counts[row.verdict.value] += 1
        return counts

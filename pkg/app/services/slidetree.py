"""Signed slide triple trees.

A node is ((p1, q1, δ1), (p2, q2, δ2), (p3, q3, δ3)) with
x = (γ2·γ3, γ1·γ3, γ1·γ2) where (p, q)·(r, s) = ps - qr. With
σ = τ·δ2 (τ the family twist below), the moves are

    left:  (γ1, -γ3 + σ·x1·γ2, γ2),  δ -> (δ1, δ3, δ2)
    right: (γ2, -γ1 + σ·x3·γ2, γ3),  δ -> (δ2, δ1, δ3)

and every family keeps δ·x² = τ·x1·x2·x3 + κ.
"""
from math import gcd, isqrt
from typing import Dict, Iterator, List, Optional, Set, Tuple
import logging

from ..core.errors import FamilyEquationError, InvalidNodeError
from ..models.schemas import BallParams, FamilyId, LensSpace, SignedEntry, SlideNode
from . import farey
from .lens import boundary_of_ball, normalize_ball_params

logger = logging.getLogger(__name__)

FAMILY_TWIST: Dict[FamilyId, int] = {
    FamilyId.MARKOV: 1,
    FamilyId.LP2: 1,
    FamilyId.LP3: 1,
    FamilyId.TWO_FAREY: -1,
}

FAMILY_CONSTANT: Dict[FamilyId, int] = {
    FamilyId.MARKOV: 0,
    FamilyId.LP2: 0,
    FamilyId.LP3: -4,
    FamilyId.TWO_FAREY: -4,
}

Triple = Tuple[Tuple[int, int, int], Tuple[int, int, int], Tuple[int, int, int]]


def make_node(entries: Triple, family: FamilyId, path: Optional[str] = "") -> SlideNode:
    return SlideNode(
        entries=tuple(SignedEntry(p=p, q=q, delta=d) for p, q, d in entries),
        family=family,
        path=path,
    )


_ROOTS: Dict[FamilyId, Triple] = {
    FamilyId.MARKOV: ((1, -1, 1), (5, 1, 1), (2, 1, 1)),
    FamilyId.LP2: ((1, 1, -1), (-3, -1, -1), (2, 1, 1)),
    FamilyId.LP3: ((1, -1, 1), (-3, -1, -1), (2, 1, 1)),
    FamilyId.TWO_FAREY: ((1, 0, -1), (3, 2, -1), (2, 2, -1)),
}


def roots() -> Dict[FamilyId, SlideNode]:
    return {family: make_node(entries, family) for family, entries in _ROOTS.items()}


def root(family: FamilyId) -> SlideNode:
    return roots()[family]


def lp3_base_chain() -> List[SlideNode]:
    """The two LP3 nodes above the root; two left moves lead to the root."""
    head = make_node(((1, -1, 1), (1, 0, -1), (-1, -1, 1)), FamilyId.LP3, path=None)
    return [head, mutate_left(head)]


def _raw(node: SlideNode) -> Triple:
    return tuple((e.p, e.q, e.delta) for e in node.entries)


def mutation_sign(node: SlideNode) -> int:
    return FAMILY_TWIST[node.family] * node.entries[1].delta


def _step(node: SlideNode, step: str) -> Optional[str]:
    return None if node.path is None else node.path + step


def mutate_left(node: SlideNode, check: bool = False) -> SlideNode:
    if check and not check_family(node):
        raise FamilyEquationError(f"{node.family.value} node fails its equations: {_raw(node)}")
    (p1, q1, d1), (p2, q2, d2), (p3, q3, d3) = _raw(node)
    x1 = node.x[0]
    s = mutation_sign(node)
    middle = (-p3 + s * x1 * p2, -q3 + s * x1 * q2, d3)
    return make_node(((p1, q1, d1), middle, (p2, q2, d2)), node.family, _step(node, "L"))


def mutate_right(node: SlideNode, check: bool = False) -> SlideNode:
    if check and not check_family(node):
        raise FamilyEquationError(f"{node.family.value} node fails its equations: {_raw(node)}")
    (p1, q1, d1), (p2, q2, d2), (p3, q3, d3) = _raw(node)
    x3 = node.x[2]
    s = mutation_sign(node)
    middle = (-p1 + s * x3 * p2, -q1 + s * x3 * q2, d1)
    return make_node(((p2, q2, d2), middle, (p3, q3, d3)), node.family, _step(node, "R"))


def children(node: SlideNode) -> Tuple[SlideNode, SlideNode]:
    return mutate_left(node), mutate_right(node)


def node_at(family: FamilyId, path: str) -> SlideNode:
    node = root(family)
    for step in path:
        if step == "L":
            node = mutate_left(node)
        elif step == "R":
            node = mutate_right(node)
        else:
            raise InvalidNodeError(f"path steps are L or R, got {step!r}")
    return node


def x_equation_holds(node: SlideNode, x: Optional[Tuple[int, int, int]] = None) -> bool:
    """δ·x² = τ·x1·x2·x3 + κ for the node's family."""
    x1, x2, x3 = x if x is not None else node.x
    d1, d2, d3 = node.deltas
    lhs = d1 * x1 * x1 + d2 * x2 * x2 + d3 * x3 * x3
    return lhs == FAMILY_TWIST[node.family] * x1 * x2 * x3 + FAMILY_CONSTANT[node.family]


def check_markov(node: SlideNode) -> bool:
    p1, p2, p3 = node.ps
    x1, _, x3 = node.x
    if p1 * p1 + p2 * p2 + p3 * p3 != 3 * p1 * p2 * p3:
        return False
    return x1 == 3 * p1 and x3 == 3 * p3


def check_lp2(node: SlideNode) -> bool:
    d1, d2, d3 = node.deltas
    if sorted((d1, d2, d3)) != [-1, -1, 1]:
        return False
    (p1, q1, _), (p2, q2, _), (p3, q3, _) = _raw(node)
    x1, _, x3 = node.x
    if d1 * p1 * p1 + d2 * p2 * p2 + d3 * p3 * p3 != p1 * p2 * p3:
        return False
    if x1 != d1 * p1 or x3 != d3 * p3:
        return False
    # weight congruences, cleared of denominators
    congruences = (
        (q1 * p3 - d2 * p2, p1), (q1 * p2 + d3 * p3, p1),
        (q2 * p1 - d3 * p3, p2), (q2 * p3 + d1 * p1, p2),
        (q3 * p2 - d1 * p1, p3), (q3 * p1 + d2 * p2, p3),
    )
    return all(value % abs(modulus) == 0 for value, modulus in congruences)


def check_lp3(node: SlideNode, x: Optional[Tuple[int, int, int]] = None) -> bool:
    x1, x2, x3 = x if x is not None else node.x
    d1, d2, d3 = node.deltas
    p1, p2, p3 = node.ps
    eq_x = d1 * x1 * x1 + d2 * x2 * x2 + d3 * x3 * x3 == x1 * x2 * x3 - 4
    eq_p = (
        d1 * p1 * p1 + d2 * p2 * p2 + d3 * p3 * p3
        - d1 * d2 * p1 * p2 * x3
        - d1 * d3 * p1 * p3 * x2
        - d2 * d3 * p2 * p3 * x1
        - p1 * p3 * x1 * x3
    ) == 0
    return eq_x and eq_p


def check_two_farey_equation(node: SlideNode) -> bool:
    x1, _, x3 = node.x
    if node.deltas != (-1, -1, -1) or x1 != 2 or x3 != 2:
        return False
    return x_equation_holds(node)


def check_two_farey_correspondence(node: SlideNode) -> bool:
    """Same fractions (up to overall sign) as the 2-Farey node at the same path."""
    if node.family != FamilyId.TWO_FAREY or node.path is None:
        return False
    if not check_two_farey_equation(node):
        return False
    target = farey.node_at(node.path)
    for entry, frac in zip(node.entries, target.fracs):
        if (entry.p, entry.q) not in ((frac.p, frac.q), (-frac.p, -frac.q)):
            return False
    return True


_CHECKERS = {
    FamilyId.MARKOV: check_markov,
    FamilyId.LP2: check_lp2,
    FamilyId.LP3: check_lp3,
    FamilyId.TWO_FAREY: check_two_farey_equation,
}


def check_family(node: SlideNode) -> bool:
    return _CHECKERS[node.family](node)


def enumerate_tree(
    family: FamilyId,
    depth: Optional[int] = None,
    bound: Optional[int] = None,
    max_depth: Optional[int] = None,
) -> Iterator[SlideNode]:
    """Depth-first (left before right) walk cut off by depth and/or |middle p| <= bound.

    A bound-only walk runs until every branch passes the bound. max_depth clips
    any walk, and the clipped branches are logged.
    """
    if depth is None and bound is None:
        raise InvalidNodeError("enumerate_tree needs a depth or a bound")
    limit = depth
    if max_depth is not None and (limit is None or limit > max_depth):
        limit = max_depth
    seen: Set[Triple] = set()
    clipped = 0
    stack = [(root(family), 0)]
    while stack:
        node, level = stack.pop()
        if bound is not None and abs(node.entries[1].p) > bound:
            continue
        if limit is None:
            # an unlimited walk must not cycle on a repeating spine
            raw = _raw(node)
            if raw in seen:
                continue
            seen.add(raw)
        yield node
        left, right = children(node)
        if limit is not None and level >= limit:
            if depth is None or level < depth:
                clipped += sum(1 for child in (left, right)
                               if bound is None or abs(child.entries[1].p) <= bound)
            continue
        stack.append((right, level + 1))
        stack.append((left, level + 1))
    if clipped:
        logger.warning("%s walk clipped at depth %d on %d branches; raise SLIDE_MAX_DEPTH for a complete walk",
                       family.value, limit, clipped)


def _is_square(n: int) -> Tuple[bool, int]:
    if n < 0:
        return False, 0
    s = isqrt(n)
    return s * s == n, s


def brute_force_markov(n: int) -> Set[Tuple[int, int, int]]:
    """Positive solutions of a² + b² + c² = 3abc with max <= n."""
    found: Set[Tuple[int, int, int]] = set()
    for a in range(1, n + 1):
        for b in range(a, n + 1):
            ok, s = _is_square(9 * a * a * b * b - 4 * (a * a + b * b))
            if not ok:
                continue
            for twice_c in (3 * a * b + s, 3 * a * b - s):
                if twice_c % 2 == 0 and 1 <= twice_c // 2 <= n:
                    found.add(tuple(sorted((a, b, twice_c // 2))))
    return found


def _pairwise_coprime(t: Tuple[int, int, int]) -> bool:
    a, b, c = t
    return gcd(a, b) == 1 and gcd(a, c) == 1 and gcd(b, c) == 1


def brute_force_signed(n: int, family: FamilyId) -> Set[Tuple[int, int, int]]:
    """Absolute-value solutions within ``n``.

    LP2: pairwise coprime p-triples of |a² - b² - c²| = abc.
    LP3: x-triples of x² + y² - z² = xyz - 4 (δ = (+, +, -)).
    """
    found: Set[Tuple[int, int, int]] = set()
    if family == FamilyId.LP2:
        for b in range(1, n + 1):
            for c in range(b, n + 1):
                ok, s = _is_square(b * b * c * c + 4 * (b * b + c * c))
                if not ok:
                    continue
                for twice_a in (b * c + s, s - b * c):
                    if twice_a % 2 == 0 and 1 <= twice_a // 2 <= n:
                        t = tuple(sorted((twice_a // 2, b, c)))
                        if _pairwise_coprime(t):
                            found.add(t)
    elif family == FamilyId.LP3:
        for a in range(1, n + 1):
            for b in range(a, n + 1):
                ok, s = _is_square((a * a + 4) * (b * b + 4))
                if not ok:
                    continue
                for sigma in (1, -1):
                    for twice_z in (-sigma * a * b + s, -sigma * a * b - s):
                        if twice_z % 2 == 0 and 1 <= abs(twice_z // 2) <= n:
                            found.add(tuple(sorted((a, b, abs(twice_z // 2)))))
    else:
        raise InvalidNodeError(f"no signed brute-force solver for {family.value}")
    return found


def triple_to_balls(node: SlideNode) -> Tuple[BallParams, BallParams, BallParams]:
    """Normalized δ·B_{p,q} for each entry (B_{-p,-q} = B_{p,q})."""
    return tuple(normalize_ball_params(e.p, e.q, e.delta) for e in node.entries)


def triple_to_boundaries(node: SlideNode) -> Tuple[LensSpace, LensSpace, LensSpace]:
    return tuple(boundary_of_ball(b) for b in triple_to_balls(node))

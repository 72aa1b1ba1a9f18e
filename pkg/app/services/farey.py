"""The 2-Farey tree and the classical Farey tree.

Nodes are triples (f1, f2, f3) with f2 = f1 + f3 componentwise. The left child
of a node is (f1, f1 + f2, f2) and the right child (f2, f2 + f3, f3). In the
2-Farey tree adjacent entries have determinant 2, every denominator is even
and exactly one entry per node has gcd 2.
"""
from math import gcd
from typing import Iterator, List, Optional, Tuple
import logging

from ..core.errors import InvalidFractionError, InvalidNodeError
from ..models.schemas import Frac, TripleNode
from .arith import det, mediant

logger = logging.getLogger(__name__)


def _node(p1: int, q1: int, p2: int, q2: int, p3: int, q3: int, path: Optional[str] = "") -> TripleNode:
    return TripleNode(fracs=(Frac(p=p1, q=q1), Frac(p=p2, q=q2), Frac(p=p3, q=q3)), path=path)


def two_farey_root() -> TripleNode:
    return _node(1, 0, 3, 2, 2, 2)


def farey_root() -> TripleNode:
    return _node(1, 0, 1, 1, 0, 1)


def reflected_two_farey_root() -> TripleNode:
    """Root of the mirror tree under p/q -> p/(p-q)."""
    return _node(2, 0, 3, 1, 1, 1)


def _child_path(n: TripleNode, step: str) -> Optional[str]:
    return None if n.path is None else n.path + step


def children(n: TripleNode) -> Tuple[TripleNode, TripleNode]:
    f1, f2, f3 = n.fracs
    left = TripleNode(fracs=(f1, mediant(f1, f2), f2), path=_child_path(n, "L"))
    right = TripleNode(fracs=(f2, mediant(f2, f3), f3), path=_child_path(n, "R"))
    return left, right


def slide_children(n: TripleNode) -> Tuple[TripleNode, TripleNode]:
    """Children through the handle slide [K'] = [K] - 2[K2], taken with the opposite sign."""
    f1, f2, f3 = n.fracs
    left_mid = Frac(p=2 * f2.p - f3.p, q=2 * f2.q - f3.q)
    right_mid = Frac(p=2 * f2.p - f1.p, q=2 * f2.q - f1.q)
    return (
        TripleNode(fracs=(f1, left_mid, f2), path=_child_path(n, "L")),
        TripleNode(fracs=(f2, right_mid, f3), path=_child_path(n, "R")),
    )


def enlarged_base_chain() -> List[TripleNode]:
    """(1/0, 1/2, 0/2) -> (1/0, 2/2, 1/2) -> root, each a left child of the previous."""
    chain = [_node(1, 0, 1, 2, 0, 2, path=None)]
    while len(chain) < 3:
        chain.append(children(chain[-1])[0])
    return chain[:2] + [TripleNode(fracs=chain[2].fracs, path="")]


def validate_two_farey_triple(n: TripleNode) -> bool:
    f1, f2, f3 = n.fracs
    if (f2.p, f2.q) != (f1.p + f3.p, f1.q + f3.q):
        return False
    if det(f1, f2) != 2 or det(f2, f3) != 2:
        return False
    if any(f.q % 2 for f in n.fracs):
        return False
    gcds = sorted(f.gcd for f in n.fracs)
    return gcds == [1, 1, 2]


def validate_farey_triple(n: TripleNode) -> bool:
    f1, f2, f3 = n.fracs
    return (f2.p, f2.q) == (f1.p + f3.p, f1.q + f3.q) and det(f1, f2) == 1 and det(f2, f3) == 1


def in_two_farey_family(f: Frac) -> bool:
    """Whether f occurs as a middle entry: q even, p > q > 0, gcd(p, q/2) = 1, p > 2."""
    return f.q > 0 and f.q % 2 == 0 and f.p > f.q and f.p > 2 and gcd(f.p, f.q // 2) == 1


def locate(f: Frac) -> str:
    """Path from the 2-Farey root to the node whose middle entry is f."""
    if not in_two_farey_family(f):
        raise InvalidFractionError(f"{f} is not a middle entry of the 2-Farey tree")
    node = two_farey_root()
    path = []
    while node.middle.pair != f.pair:
        if node.middle.p > f.p:
            # middles grow strictly along every path
            raise InvalidNodeError(f"descent overshot while locating {f}")
        left, right = children(node)
        if det(f, node.middle) > 0:
            node, step = left, "L"
        else:
            node, step = right, "R"
        path.append(step)
    return "".join(path)


def node_at(path: str, root: Optional[TripleNode] = None) -> TripleNode:
    node = root if root is not None else two_farey_root()
    for step in path:
        if step not in "LR":
            raise InvalidNodeError(f"path steps are L or R, got {step!r}")
        left, right = children(node)
        node = left if step == "L" else right
    return node


def complete_pair(p1: int, p2: int) -> Tuple[int, int]:
    """The unique even q1, q2 with 0 <= qi <= pi and p1*q2 - p2*q1 = ±2."""
    if p1 <= 0 or p2 <= 0 or gcd(p1, p2) != 1:
        raise InvalidFractionError(f"complete_pair needs coprime positive numerators, got ({p1}, {p2})")
    for eps in (1, -1):
        b = (eps * pow(p1, -1, p2)) % p2 if p2 > 1 else 0
        if 2 * b > p2:
            continue
        a, rem = divmod(p1 * b - eps, p2)
        if rem == 0 and 0 <= 2 * a <= p1:
            return 2 * a, 2 * b
    raise InvalidFractionError(f"no even completion exists for ({p1}, {p2})")


def complete_triple(p1: int, p2: int) -> TripleNode:
    """The 2-Farey node with outer numerators p1, p2, ordered so both determinants are +2."""
    q1, q2 = complete_pair(p1, p2)
    a, b = Frac(p=p1, q=q1), Frac(p=p2, q=q2)
    if det(a, b) < 0:
        a, b = b, a
    mid = mediant(a, b)
    path = locate(mid) if in_two_farey_family(mid) else None
    return TripleNode(fracs=(a, mid, b), path=path)


def _walk(root: TripleNode, bound: int) -> Iterator[TripleNode]:
    stack = [root]
    while stack:
        node = stack.pop()
        # the classical tree has q > p on its left side
        if max(node.middle.p, node.middle.q) > bound:
            continue
        yield node
        left, right = children(node)
        stack.append(right)
        stack.append(left)


def enumerate_two_farey(bound: int, include_base: bool = False) -> Iterator[TripleNode]:
    """Every node whose numerators are <= bound, depth first, left before right."""
    if include_base:
        for node in enlarged_base_chain()[:2]:
            if max(f.p for f in node.fracs) <= bound:
                yield node
    yield from _walk(two_farey_root(), bound)


def enumerate_farey(bound: int) -> Iterator[TripleNode]:
    """Classical Farey nodes whose middle has numerator and denominator at most bound."""
    yield from _walk(farey_root(), bound)


def double_denominators(n: TripleNode) -> TripleNode:
    return TripleNode(fracs=tuple(Frac(p=f.p, q=2 * f.q) for f in n.fracs), path=n.path)


def two_farey_witness(p: int, q: int) -> TripleNode:
    """A 2-Farey node containing p/q or p/(p-q), showing B_{p,q} embeds in CP̄²."""
    if p <= 0:
        raise InvalidFractionError(f"witness needs p > 0, got {p}")
    q %= p if p > 1 else 1
    g = gcd(p, q)
    if not (g == 2 or (g == 1 and p % 2 == 1)):
        raise InvalidFractionError(
            f"B_{{{p},{q}}} has no 2-Farey witness: needs gcd 2, or p odd and gcd 1"
        )
    if p == 1:
        return two_farey_root()
    for candidate in (Frac(p=p, q=q), Frac(p=p, q=p - q)):
        if candidate.pair == (2, 2) or candidate.pair == (2, 0):
            return two_farey_root()
        if in_two_farey_family(candidate):
            return node_at(locate(candidate))
    raise InvalidFractionError(f"no 2-Farey witness found for B_{{{p},{q}}}")

from math import gcd

import pytest

from app.core.errors import InvalidFractionError, InvalidNodeError
from app.models.schemas import Frac, TripleNode
from app.services import farey


def pairs(node):
    return tuple(f.pair for f in node.fracs)


def test_root_and_children():
    root = farey.two_farey_root()
    assert pairs(root) == ((1, 0), (3, 2), (2, 2))
    left, right = farey.children(root)
    assert pairs(left) == ((1, 0), (4, 2), (3, 2))
    assert pairs(right) == ((3, 2), (5, 4), (2, 2))
    assert (left.path, right.path) == ("L", "R")


def test_enumerate_small_bound():
    nodes = list(farey.enumerate_two_farey(5))
    assert [n.path for n in nodes] == ["", "L", "LL", "R"]
    assert [n.middle.pair for n in nodes] == [(3, 2), (4, 2), (5, 2), (5, 4)]


def test_every_node_is_a_valid_triple():
    for node in farey.enumerate_two_farey(256):
        assert farey.validate_two_farey_triple(node)


def test_middles_are_the_two_farey_family():
    bound = 256
    middles = {n.middle.pair for n in farey.enumerate_two_farey(bound)}
    expected = {
        (p, q)
        for p in range(3, bound + 1)
        for q in range(2, p, 2)
        if gcd(p, q // 2) == 1
    }
    assert middles == expected


def test_locate_and_node_at_invert_each_other():
    assert farey.locate(Frac(p=3, q=2)) == ""
    assert farey.locate(Frac(p=5, q=4)) == "R"
    assert farey.locate(Frac(p=5, q=2)) == "LL"
    for node in farey.enumerate_two_farey(40):
        assert farey.locate(node.middle) == node.path
        assert farey.node_at(node.path) == node


@pytest.mark.parametrize("p,q", [(6, 4), (2, 2), (5, 3), (3, 4)])
def test_locate_rejects_fractions_outside_the_family(p, q):
    with pytest.raises(InvalidFractionError):
        farey.locate(Frac(p=p, q=q))


def test_node_at_rejects_bad_steps():
    with pytest.raises(InvalidNodeError):
        farey.node_at("LX")


def test_complete_pair():
    assert farey.complete_pair(1, 2) == (0, 2)
    with pytest.raises(InvalidFractionError):
        farey.complete_pair(1, 1)
    with pytest.raises(InvalidFractionError):
        farey.complete_pair(4, 6)


def test_complete_triple_recovers_tree_nodes():
    node = farey.complete_triple(3, 2)
    assert pairs(node) == ((3, 2), (5, 4), (2, 2))
    assert node.path == "R"
    for node in farey.enumerate_two_farey(30):
        f1, _, f3 = node.fracs
        if gcd(f1.p, f3.p) == 1 and f1.p > 0 and f3.p > 0 and f1.pair != (1, 0):
            assert farey.complete_triple(f1.p, f3.p) == node


def test_enlarged_base_chain():
    chain = farey.enlarged_base_chain()
    assert [pairs(n) for n in chain] == [
        ((1, 0), (1, 2), (0, 2)),
        ((1, 0), (2, 2), (1, 2)),
        ((1, 0), (3, 2), (2, 2)),
    ]
    assert [n.path for n in chain] == [None, None, ""]
    assert list(farey.enumerate_two_farey(3, include_base=True))[0].path is None


def test_slide_children_agree_with_mediants():
    for node in farey.enumerate_two_farey(40):
        assert farey.slide_children(node) == farey.children(node)


def test_denominator_doubling_maps_classical_subtree():
    start = TripleNode(fracs=(Frac(p=1, q=0), Frac(p=3, q=1), Frac(p=2, q=1)))
    assert farey.double_denominators(start) == farey.two_farey_root()
    for path in ("", "L", "R", "LR", "RRL", "LLRL"):
        classical = farey.node_at(path, root=start)
        assert farey.validate_farey_triple(classical)
        assert farey.double_denominators(classical) == farey.node_at(path)


def test_classical_farey_tree():
    for node in farey.enumerate_farey(30):
        assert farey.validate_farey_triple(node)


@pytest.mark.parametrize("bound", [1, 2, 12, 40])
def test_classical_enumeration_is_every_reduced_fraction_once(bound):
    middles = [n.middle.pair for n in farey.enumerate_farey(bound)]
    expected = {
        (p, q)
        for p in range(1, bound + 1)
        for q in range(1, bound + 1)
        if gcd(p, q) == 1
    }
    assert len(middles) == len(set(middles))
    assert set(middles) == expected


def test_reflected_tree_mirrors_the_two_farey_tree():
    root = farey.reflected_two_farey_root()
    assert pairs(root) == ((2, 0), (3, 1), (1, 1))
    mirror = str.maketrans("LR", "RL")
    for node in farey.enumerate_two_farey(30):
        reflected = farey.node_at(node.path.translate(mirror), root=root)
        assert pairs(reflected) == tuple((f.p, f.p - f.q) for f in reversed(node.fracs))


@pytest.mark.parametrize("p,q", [(5, 4), (5, 1), (4, 2), (6, 2), (9, 4), (25, 9)])
def test_two_farey_witness_contains_the_ball(p, q):
    node = farey.two_farey_witness(p, q)
    assert farey.validate_two_farey_triple(node)
    assert {(p, q % p), (p, p - q % p)} & {f.pair for f in node.fracs}


def test_two_farey_witness_rejects_even_coprime():
    with pytest.raises(InvalidFractionError):
        farey.two_farey_witness(4, 1)

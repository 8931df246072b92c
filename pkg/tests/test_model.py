from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from ltsum.model import GlobalTransition, Lts, Product, global_successors, project_word

F = Fraction


def _lts(name, states, trans, initial=0, actions=None):
    return Lts(name, states, [(s, a, d, F(w)) for (s, a, d, w) in trans], initial, actions)


def _random_product(rng: random.Random) -> Product:
    n = rng.randint(1, 3)
    pool = ["a", "b", "c", "d"][: rng.randint(1, 4)]
    comps = []
    for j in range(n):
        m = rng.randint(1, 3)
        alpha = rng.sample(pool, rng.randint(1, len(pool)))
        trans = []
        seen = set()
        for src in range(m):
            for _ in range(rng.randint(0, 2)):
                a = rng.choice(alpha)
                dst = rng.randrange(m)
                if (src, a, dst) not in seen:
                    seen.add((src, a, dst))
                    trans.append((src, a, dst, F(rng.randint(0, 5))))
        comps.append(Lts(f"c{j}", [f"s{k}" for k in range(m)], trans, 0, alpha))
    return Product(comps, rng.randrange(n))


def test_single_component_loop():
    a = _lts("a", ["s0"], [(0, "a", 0, 1)])
    p = Product([a], 0)
    succ = global_successors(p, (0,))
    assert len(succ) == 1
    gt, vec = succ[0]
    assert gt.label == "a"
    assert gt.parts == ((0, 0),)
    assert vec == (0,)
    assert gt.weight == F(1)


def test_rendezvous_and_local_moves():
    a = _lts("a", ["a0", "a1"], [(0, "s", 1, 2), (0, "x", 0, 0)])
    b = _lts("b", ["b0", "b1"], [(0, "s", 1, 3)])
    p = Product([a, b], 0)
    succ = global_successors(p, (0, 0))
    by_label = {gt.label: (gt, vec) for gt, vec in succ}
    assert set(by_label) == {"s", "x"}
    gt_s, vec_s = by_label["s"]
    assert vec_s == (1, 1)
    assert gt_s.parts == ((0, 1), (0, 1))
    assert gt_s.weight == F(5)
    gt_x, vec_x = by_label["x"]
    assert vec_x == (0, 0)
    assert gt_x.parts == ((0, 0), None)
    assert gt_x.participants == (0,)


def test_shared_action_blocks_when_one_side_cannot_move():
    a = _lts("a", ["a0", "a1"], [(0, "s", 1, 0), (1, "s", 0, 0)])
    b = _lts("b", ["b0", "b1"], [(0, "s", 1, 0)])
    p = Product([a, b], 0)
    assert global_successors(p, (1, 1)) == []


def test_nondeterministic_alternatives_enumerated():
    a = _lts("a", ["a0", "a1", "a2"], [(0, "a", 1, 1), (0, "a", 2, 4)])
    p = Product([a], 0)
    succ = global_successors(p, (0,))
    assert [(gt.parts, vec) for gt, vec in succ] == [(((0, 1),), (1,)), (((0, 2),), (2,))]
    assert {gt.weight for gt, _ in succ} == {F(1), F(4)}


def test_global_transition_identity():
    g1 = GlobalTransition("a", ((0, 1), None), F(2))
    g2 = GlobalTransition("a", ((0, 1), None), F(2))
    g3 = GlobalTransition("a", ((0, 2), None), F(2))
    assert g1 == g2 and hash(g1) == hash(g2)
    assert g1 != g3


def test_validation_errors():
    with pytest.raises(ValueError):
        Lts("x", [], [])
    with pytest.raises(ValueError):
        _lts("x", ["s0"], [(0, "a", 0, 1), (0, "a", 0, 2)])  # duplicate (src, label, dst)
    with pytest.raises(ValueError):
        _lts("x", ["s0"], [(0, "a", 0, -1)])
    with pytest.raises(ValueError):
        Product([], 0)
    with pytest.raises(ValueError):
        Product([_lts("x", ["s0"], [])], 3)
    with pytest.raises(ValueError):
        Product([_lts("x", ["s0"], []), _lts("x", ["s0"], [])], 0)


def test_project_word():
    assert project_word(("a", "b", "a", "c"), {"a", "c"}) == ("a", "a", "c")
    assert project_word((), {"a"}) == ()
    assert project_word(("x",), set()) == ()


def _enabled_brute(product, states):
    """Independent enumeration of joint moves, straight from the definition."""
    found = set()
    for label in product.alphabet:
        comps = [j for j, c in enumerate(product.components) if label in c.actions]
        pools = []
        for j in comps:
            opts = [
                (dst, w)
                for (src, lab, dst, w) in product.components[j].transitions
                if lab == label and src == states[j]
            ]
            pools.append(opts)
        if any(not pool for pool in pools):
            continue
        for combo in itertools.product(*pools):
            parts = [None] * len(product.components)
            vec = list(states)
            weight = F(0)
            for j, (dst, w) in zip(comps, combo):
                parts[j] = (states[j], dst)
                vec[j] = dst
                weight += w
            found.add((label, tuple(parts), tuple(vec), weight))
    return found


def test_global_successors_match_brute_force():
    rng = random.Random(1234)
    for _ in range(150):
        p = _random_product(rng)
        states = tuple(rng.randrange(len(c.state_names)) for c in p.components)
        got = {(gt.label, gt.parts, vec, gt.weight) for gt, vec in global_successors(p, states)}
        assert got == _enabled_brute(p, states)


def _word_runs(product, word):
    """Set-of-state-vectors simulation of a full-alphabet word."""
    current = {product.initial_states()}
    for letter in word:
        nxt = set()
        for vec in current:
            for gt, succ in global_successors(product, vec):
                if gt.label == letter:
                    nxt.add(succ)
        if not nxt:
            return False
        current = nxt
    return True


def _component_runs(lts, word):
    current = {lts.initial}
    for letter in word:
        if letter not in lts.actions:
            continue
        nxt = {dst for s in current for (dst, _) in lts.successors(s, letter)}
        if not nxt:
            return False
        current = nxt
    return True


def test_trace_characterization_by_projections():
    # A word over the joint alphabet is executable in the product exactly
    # when each component can execute its own projection of it.
    rng = random.Random(99)
    checked = 0
    for _ in range(120):
        p = _random_product(rng)
        letters = sorted(p.alphabet)
        if not letters:
            continue
        for _ in range(20):
            word = tuple(rng.choice(letters) for _ in range(rng.randint(0, 5)))
            joint = _word_runs(p, word)
            split = all(_component_runs(c, word) for c in p.components)
            assert joint == split, (word, p)
            checked += 1
    assert checked > 1000

from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from helpers import fan, square, three_chain, two_chain
from semilat.corpus import all_rooted_trees, all_semilattices
from semilat.duality import hat_embedding
from semilat.errors import InfinityNotAllowed, MalformedTree, NotBelow, NotSubsemilattice
from semilat.order import INF, immediate_predecessors, validate_semilattice
from semilat.sigma import (
    audit_host,
    binary_function,
    complete_binary_tree,
    compute_ledger,
    has_jump,
    has_relative_jump,
    is_modest,
    jump_existence_check,
    meet_congruences,
    minimal_quotient,
    quotient_map,
    random_semilattice,
    tree_compactification,
    verify_discreteness,
    verify_fiber_constancy,
)


def all_functions(K):
    for ones in range(1 << K.n):
        yield binary_function(K, [K.labels[x] for x in range(K.n) if (ones >> x) & 1])


def oracle_levels(f):
    """Level chain straight from the definitions, over labels."""
    K = f.host
    val = {x: f.value(K.idx(x)) for x in K.labels}
    zero = K.labels[K.zero]
    pos = [x for x in K.labels if x != zero]
    leq = lambda a, b: K.leq(K.idx(a), K.idx(b))  # noqa: E731

    def prod(p, q):
        if INF in (p, q):
            return INF
        ups = [z for z in K.labels if leq(p, z) and leq(q, z)]
        least = [z for z in ups if all(leq(z, w) for w in ups)]
        return least[0] if least else INF

    def close(S):
        S = set(S) | {INF}
        while True:
            new = {prod(a, b) for a in S for b in S} | S
            if new == S:
                return S
            S = new

    preds = {p: immediate_predecessors(K, p) for p in K.labels}
    jumps = {p for p in pos if all(val[x] != val[p] for x in preds[p])}

    def rel(p, q):
        return q != p and leq(q, p) and all(val[x] != val[p] for x in preds[p] if leq(q, x))

    levels = [close(jumps)]
    while True:
        prev = levels[-1]
        extra = {p for p in pos for q in prev if q is not INF and rel(p, q)}
        nxt = close(prev | jumps | extra)
        if nxt == prev:
            return levels, jumps
        levels.append(nxt)


def oracle_support(K, L):
    zero = K.labels[K.zero]
    out = {x for x in L if x is not INF} | {zero}
    for p in list(out):
        out |= immediate_predecessors(K, p)
    return out


class TestModesty:
    def test_finite_is_modest(self, small_semilattices):
        for K in small_semilattices:
            assert is_modest(K).modest

    def test_binary_tree(self):
        r = is_modest(tree_compactification(complete_binary_tree(3)))
        assert r.modest
        assert max(c for lab, c in r.predecessor_counts.items() if lab != "inf") == 2

    def test_singleton(self):
        r = is_modest(validate_semilattice(["0"], [["0"]]))
        assert r.modest and r.max_predecessors == 0


class TestTrees:
    def test_single_node(self):
        K = tree_compactification({"r": None})
        assert K.n == 2 and K.labels[K.zero] == "inf"

    def test_cherry(self):
        K = tree_compactification({"r": None, "u": "r", "v": "r"})
        assert K.n == 4
        assert K.labels[K.meet(K.idx("u"), K.idx("v"))] == "inf"
        assert K.labels[K.meet(K.idx("r"), K.idx("u"))] == "u"

    def test_depth_two(self):
        K = tree_compactification(complete_binary_tree(2))
        assert K.n == 8

    def test_root_is_maximum(self):
        for T in all_rooted_trees(6):
            K = tree_compactification(T)
            root = next(v for v, p in T.items() if p is None)
            assert K.down[K.idx(root)] == K.full
            for s, t in product(T, repeat=2):
                m = K.labels[K.meet(K.idx(s), K.idx(t))]
                if not (K.leq(K.idx(s), K.idx(t)) or K.leq(K.idx(t), K.idx(s))):
                    assert m == "inf"

    def test_malformed(self):
        with pytest.raises(MalformedTree):
            tree_compactification({"a": None, "b": None})
        with pytest.raises(MalformedTree):
            tree_compactification({"r": None, "a": "b", "b": "a"})
        with pytest.raises(MalformedTree):
            tree_compactification({"inf": None})

    def test_tree_counts(self):
        counts = [sum(1 for T in all_rooted_trees(n) if len(T) == n) for n in range(1, 8)]
        assert counts == [1, 1, 2, 4, 9, 20, 48]


class TestJumps:
    def test_chain_indicator(self):
        C = three_chain()
        f = binary_function(C, ["a", "b"])
        assert has_jump(f, "a")
        assert not has_jump(f, "b")
        assert jump_existence_check(f) == "a"
        g = binary_function(C, [])
        assert not any(has_jump(g, p) for p in ("a", "b"))
        assert jump_existence_check(g) is None

    def test_fan(self):
        assert jump_existence_check(binary_function(fan(), ["b"])) == "b"

    def test_relative(self):
        K = square()
        f = binary_function(K, ["x"])
        assert has_relative_jump(f, "p", "x")
        assert not has_relative_jump(f, "p", "0")
        assert not has_jump(f, "p")
        with pytest.raises(NotBelow):
            has_relative_jump(f, "p", "p")

    def test_infinity(self):
        with pytest.raises(InfinityNotAllowed):
            has_jump(binary_function(fan(), []), INF)

    def test_zero_reduction(self, small_semilattices):
        for K in small_semilattices:
            zero = K.labels[K.zero]
            for f in all_functions(K):
                for p in K.labels:
                    if p != zero:
                        assert has_relative_jump(f, p, zero) == has_jump(f, p)

    def test_nonconstant_has_jump(self, small_semilattices):
        for K in small_semilattices:
            for f in all_functions(K):
                p = jump_existence_check(f)
                assert (p is None) == (f.ones in (0, K.full))


class TestLedger:
    def test_constant(self):
        led = compute_ledger(binary_function(square(), []))
        assert led.levels == [{INF}] and led.n == 0 and led.signature == (1,)

    def test_square_example(self):
        K = square()
        led = compute_ledger(binary_function(K, ["x"]))
        assert led.levels == [{"x", INF}, {"x", "p", INF}]
        assert led.n == 1 and led.signature == (2, 3)
        assert led.support == {"0", "x", "y", "p"}

    def test_chain_indicator(self):
        led = compute_ledger(binary_function(three_chain(), ["a", "b"]))
        assert led.levels == [{"a", INF}] and led.n == 0

    def test_against_oracle(self, small_semilattices):
        hosts = list(small_semilattices) + [tree_compactification(T) for T in all_rooted_trees(5)]
        for K in hosts:
            for f in all_functions(K):
                led = compute_ledger(f)
                levels, jumps = oracle_levels(f)
                assert led.levels == levels
                assert led.jump_points == jumps
                assert led.n == len(levels) - 1
                assert led.signature == tuple(len(L) for L in levels)
                assert led.support == oracle_support(K, levels[-1])

    def test_chain_is_monotone_and_short(self, small_semilattices):
        for K in small_semilattices:
            for f in all_functions(K):
                led = compute_ledger(f)
                for a, b in zip(led.levels, led.levels[1:]):
                    assert a < b
                assert led.n + 1 <= K.n  # at most |DK| levels


class TestQuotient:
    def test_trivial_level(self):
        K = square()
        q = quotient_map(K, [INF])
        assert q.fiber_labels() == [["0", "x", "y", "p"]]

    def test_full_dual_is_injective(self, small_semilattices):
        for K in small_semilattices:
            pos = [x for x in K.labels if x != K.labels[K.zero]]
            q = quotient_map(K, pos + [INF])
            assert all(m.bit_count() == 1 for m in q.fibers)
            for x in K.labels:
                assert q(x) == hat_embedding(K, x).elements

    def test_square(self):
        q = quotient_map(square(), ["x", "p", INF])
        assert q.fiber_labels() == [["0", "y"], ["x"], ["p"]]
        assert q.homomorphism

    def test_not_closed(self):
        with pytest.raises(NotSubsemilattice):
            quotient_map(square(), ["x", "y"])

    def test_fiber_constancy(self, small_semilattices):
        for K in small_semilattices:
            for f in all_functions(K):
                r = verify_fiber_constancy(f)
                assert r.ok and r.quotient.homomorphism and r.quotient.fiber_minima_in_L

    def test_square_fibers_constant(self):
        r = verify_fiber_constancy(binary_function(square(), ["x"]))
        assert r.ok and r.quotient.fiber_labels() == [["0", "y"], ["x"], ["p"]]


class TestDiscreteness:
    def test_examples(self):
        assert verify_discreteness(two_chain()).ok
        r = verify_discreteness(square())
        assert r.ok and r.functions == 16
        r = verify_discreteness(tree_compactification(complete_binary_tree(2)))
        assert r.ok and r.functions == 256

    def test_against_brute_force(self, small_semilattices):
        for K in small_semilattices:
            info = []
            for f in all_functions(K):
                levels, _ = oracle_levels(f)
                M = [K.idx(x) for x in oracle_support(K, levels[-1])]
                info.append((f.ones, tuple(len(L) for L in levels), M))
            for f, s, M in info:
                for g, t, _ in info:
                    if f != g and s == t:
                        assert any(((f ^ g) >> x) & 1 for x in M), (f, g)

    def test_audit_counts(self):
        a = audit_host(square(), check_literal_support=True)
        assert a.ok and a.functions == 16
        # without the minimum in the support set, the two constants collide
        assert a.literal_support_violations == 2


class TestMinimalQuotient:
    def test_constant(self):
        q, cert = minimal_quotient(binary_function(square(), []))
        assert q.image_size == 1 and cert.status == "minimal"

    def test_chain_indicator(self):
        q, cert = minimal_quotient(binary_function(three_chain(), ["a", "b"]))
        assert q.image_size == 2 and cert.status == "minimal"

    def test_square(self):
        q, cert = minimal_quotient(binary_function(square(), ["x"]))
        assert q.image_size == 3 and cert.status == "minimal" and cert.minimum_size == 3

    def test_unchecked_above_bound(self):
        K = tree_compactification(complete_binary_tree(3))
        _, cert = minimal_quotient(binary_function(K, ["t2"]))
        assert cert.status == "unchecked"

    def test_congruences_of_chain(self):
        # meet-congruences of a 3-chain: classes must be intervals
        assert len(meet_congruences(three_chain())) == 4

    def test_minimal_on_small_hosts(self):
        for K in all_semilattices(4):
            for f in all_functions(K):
                assert minimal_quotient(f)[1].status == "minimal"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 8), st.data())
def test_random_host_properties(seed, size, data):
    try:
        K = random_semilattice(seed, size, cap=12)
    except Exception:
        return
    ones = data.draw(st.integers(0, (1 << K.n) - 1))
    f = binary_function(K, [K.labels[x] for x in range(K.n) if (ones >> x) & 1])
    led = compute_ledger(f)
    levels, _ = oracle_levels(f)
    assert led.levels == levels
    assert verify_fiber_constancy(f).ok

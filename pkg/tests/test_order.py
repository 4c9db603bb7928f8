from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from helpers import boolean_square, fan, subsets, three_chain, two_chain
from semilat.errors import (
    NoMeet,
    NoMinimum,
    NotAssociative,
    NotCommutative,
    NotConvex,
    NotDistributive,
    NotIdempotent,
    NotPartialOrder,
    UnknownElement,
)
from semilat.order import (
    UNBOUNDED,
    bits,
    chain,
    convex_from_labels,
    enumerate_filters,
    immediate_predecessors,
    interval,
    is_compact_element,
    is_filter,
    is_prime_filter,
    join_irreducibles,
    lattice_from_covers,
    prime_filters,
    principal_filter,
    semilattice_from_covers,
    sup_of_pair,
    sup_of_set,
    validate_semilattice,
)
from semilat.leaps import all_sublattices
from semilat.sigma import random_semilattice


def brute_filters(K):
    """Every subset satisfying the filter condition, straight from the definition."""
    out = []
    for S in subsets(K.labels):
        S = set(S)
        if all(x in S for a in S for b in S for x in K.labels
               if K.leq(K.meet(K.idx(a), K.idx(b)), K.idx(x))):
            out.append(frozenset(S))
    return out


class TestValidation:
    def test_two_chain(self):
        K = two_chain()
        assert K.n == 2 and K.labels[K.zero] == "0"

    def test_fan(self):
        K = fan()
        assert K.labels[K.meet(K.idx("a"), K.idx("b"))] == "0"

    def test_not_commutative(self):
        with pytest.raises(NotCommutative) as e:
            validate_semilattice(["0", "a", "b"], [["0", "0", "0"], ["0", "a", "a"], ["0", "b", "b"]])
        assert e.value.witness == ("a", "b")

    def test_not_idempotent(self):
        with pytest.raises(NotIdempotent):
            validate_semilattice(["0", "a"], [["0", "0"], ["0", "0"]], "0")

    def test_not_associative(self):
        labels = ["0", "a", "b", "c"]
        t = {("a", "b"): "c", ("b", "c"): "0", ("a", "c"): "a"}
        table = [[x if x == y else ("0" if "0" in (x, y) else t.get((x, y), t.get((y, x))))
                  for y in labels] for x in labels]
        with pytest.raises((NotAssociative, NotCommutative)):
            validate_semilattice(labels, table, "0")

    def test_no_minimum(self):
        with pytest.raises(NoMinimum):
            validate_semilattice(["0", "a"], [["0", "0"], ["0", "a"]], zero="a")

    def test_covers_without_meet(self):
        with pytest.raises(NoMeet):
            semilattice_from_covers(["a", "b"], [])

    def test_cycle(self):
        with pytest.raises(NotPartialOrder):
            semilattice_from_covers(["0", "a", "b"], [("0", "a"), ("a", "b"), ("b", "a")])

    def test_not_distributive(self):
        # the pentagon N5
        with pytest.raises(NotDistributive):
            lattice_from_covers(["0", "a", "b", "c", "1"],
                                [("0", "a"), ("a", "b"), ("0", "c"), ("b", "1"), ("c", "1")])

    def test_order_is_partial_order(self, small_semilattices):
        for K in small_semilattices:
            r = range(K.n)
            for a, b in product(r, r):
                assert K.leq(a, b) == (K.meet(a, b) == a)
                if K.leq(a, b) and K.leq(b, a):
                    assert a == b
                for c in r:
                    if K.leq(a, b) and K.leq(b, c):
                        assert K.leq(a, c)


class TestElementaryOps:
    def test_immediate_predecessors(self):
        C = three_chain()
        assert immediate_predecessors(C, "b") == {"a"}
        assert immediate_predecessors(C, "0") == frozenset()
        assert immediate_predecessors(boolean_square(), "1") == {"a", "b"}

    def test_unknown_element(self):
        with pytest.raises(UnknownElement):
            immediate_predecessors(three_chain(), "z")

    def test_predecessors_brute_force(self, small_semilattices):
        for K in small_semilattices:
            for p in K.labels:
                pi = K.idx(p)
                expect = {K.labels[x] for x in range(K.n)
                          if K.lt(x, pi) and not any(K.lt(x, y) and K.lt(y, pi) for y in range(K.n))}
                assert immediate_predecessors(K, p) == expect

    def test_sup_of_pair(self):
        assert sup_of_pair(three_chain(), "a", "b") == "b"
        assert sup_of_pair(fan(), "a", "b") is UNBOUNDED
        for p in fan().labels:
            assert sup_of_pair(fan(), p, p) == p

    def test_sup_brute_force(self, small_semilattices):
        for K in small_semilattices:
            for x, y in product(range(K.n), repeat=2):
                ups = [z for z in range(K.n) if K.leq(x, z) and K.leq(y, z)]
                least = [z for z in ups if all(K.leq(z, w) for w in ups)]
                got = sup_of_pair(K, K.labels[x], K.labels[y])
                assert got == (K.labels[least[0]] if ups else UNBOUNDED)
                assert sup_of_set(K, (1 << x) | (1 << y)) == (least[0] if ups else None)

    def test_compact(self, small_semilattices):
        assert is_compact_element(three_chain(), "0")
        for K in small_semilattices:
            for p in K.labels:
                assert is_compact_element(K, p)

    def test_minimal_elements_are_compact(self, small_semilattices):
        for K in small_semilattices:
            for A in subsets(range(K.n)):
                if not A:
                    continue
                for p in A:
                    if not any(K.lt(q, p) for q in A):
                        assert is_compact_element(K, K.labels[p])


class TestFilters:
    def test_examples(self):
        assert [F.elements for F in enumerate_filters(two_chain())] == \
            [frozenset(), {"1"}, {"0", "1"}]
        assert {F.elements for F in enumerate_filters(fan())} == \
            {frozenset(), frozenset({"a"}), frozenset({"b"}), frozenset({"0", "a", "b"})}
        single = validate_semilattice(["0"], [["0"]])
        assert [F.elements for F in enumerate_filters(single)] == [frozenset(), {"0"}]

    def test_against_brute_force(self, small_semilattices):
        for K in small_semilattices:
            got = sorted(map(sorted, (F.elements for F in enumerate_filters(K))))
            assert got == sorted(map(sorted, brute_filters(K)))

    def test_methods_agree(self):
        for seed in range(40):
            K = random_semilattice(seed, 7)
            brute = [F.members for F in enumerate_filters(K, method="brute")]
            gen = [F.members for F in enumerate_filters(K, method="generated")]
            assert brute == gen

    def test_flags(self, small_semilattices):
        for K in small_semilattices:
            for F in enumerate_filters(K):
                assert F.clopen
                if F.members:
                    assert F.is_principal
                    assert F.members == K.up[F.vertex]
                else:
                    assert not F.is_principal

    def test_intersection_of_principal_filters(self, small_semilattices):
        for K in small_semilattices:
            for p, q in product(K.labels, repeat=2):
                inter = principal_filter(K, p).members & principal_filter(K, q).members
                s = sup_of_pair(K, p, q)
                assert inter == (0 if s is UNBOUNDED else principal_filter(K, s).members)
                assert is_filter(K, K.labels_of(inter))

    def test_prime_examples(self):
        B = boolean_square()
        assert is_prime_filter(B, {"a", "1"})
        assert not is_prime_filter(B, {"1"})
        assert not is_prime_filter(B, set())
        assert not is_prime_filter(B, {"0", "a"})

    def test_primes_match_join_irreducibles(self):
        lattices = [chain(k) for k in range(1, 5)] + [boolean_square()]
        lattices += [K.lattice for K in all_sublattices((2, 3))]
        lattices += [K.lattice for K in all_sublattices((2, 2, 2)) if K.n > 4]
        for L in lattices:
            assert len(prime_filters(L)) == len(join_irreducibles(L))

    def test_prime_brute_force(self):
        B = boolean_square()
        for S in subsets(B.labels):
            S = set(S)
            comp = set(B.labels) - S
            ideal = bool(comp) and all(
                B.labels[B.join(B.idx(x), B.idx(y))] in comp for x in comp for y in comp
            ) and all(y in comp for x in comp for y in B.labels if B.leq(B.idx(y), B.idx(x)))
            expect = bool(S) and is_filter(B, S) and ideal
            assert is_prime_filter(B, S) == expect


class TestConvex:
    def test_interval(self):
        B = boolean_square()
        assert interval(B, "a", "a").elements == {"a"}
        assert interval(B, "a", "b").elements == {"0", "a", "b", "1"}
        assert interval(B, "0", "a").elements == {"0", "a"}

    def test_not_convex(self):
        with pytest.raises(NotConvex):
            convex_from_labels(boolean_square(), {"0", "1"})

    def test_convex_sets_are_ideal_meets_filter(self):
        B = boolean_square()
        for S in subsets(B.labels):
            m = B.mask_of(S)
            between = all((m >> z) & 1 for x in bits(m) for y in bits(m) for z in range(B.n)
                          if B.leq(x, z) and B.leq(z, y))
            closed = all((m >> B.meet(x, y)) & 1 and (m >> B.join(x, y)) & 1
                         for x in bits(m) for y in bits(m))
            try:
                C = convex_from_labels(B, S)
            except NotConvex:
                assert not (between and closed)
            else:
                assert C.members == C.ideal & C.filter
                assert B.is_ideal_mask(C.ideal) or C.ideal == B.full
                assert B.is_filter_mask(C.filter) or C.filter == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 9))
def test_random_semilattice_is_deterministic_and_certified(seed, size):
    try:
        K1 = random_semilattice(seed, size)
    except Exception as e:
        assert type(e).__name__ == "SizeOverflow"
        return
    K2 = random_semilattice(seed, size)
    assert K1.labels == K2.labels and K1.meet_table == K2.meet_table
    again = validate_semilattice(K1.labels, [[K1.labels[v] for v in row] for row in K1.meet_table])
    assert again.zero == K1.zero


def test_singleton_random_semilattice():
    K = random_semilattice(1, 1)
    assert K.labels == ("0",)

from itertools import product

import pytest

from helpers import boolean_square, fan, subsets, three_chain, two_chain
from semilat.corpus import all_semilattices
from semilat.duality import (
    dual_semilattice,
    filter_space,
    hat_embedding,
    separate_by_compact,
    separate_by_prime_filter,
    verify_duality_roundtrip,
)
from semilat.errors import NotSeparable, UnknownElement
from semilat.leaps import all_sublattices
from semilat.order import INF, UNBOUNDED, enumerate_filters, sup_of_pair, validate_semilattice


def singleton():
    return validate_semilattice(["0"], [["0"]])


def dual_filters_brute(D):
    """Filters of the dual under its product, from the definition."""
    S = D.semilattice
    out = []
    for X in subsets(range(S.n)):
        X = set(X)
        if all(z in X for a in X for b in X for z in range(S.n) if S.leq(S.meet(a, b), z)):
            out.append(X)
    return out


class TestDual:
    def test_fan(self):
        D = dual_semilattice(fan())
        assert set(D.elements) == {"a", "b", INF}
        assert D.product("a", "b") is INF

    def test_chain(self):
        D = dual_semilattice(three_chain())
        assert set(D.elements) == {"a", "b", INF}
        assert D.product("a", "b") == "b"

    def test_singleton(self):
        assert dual_semilattice(singleton()).elements == (INF,)

    def test_product_is_sup(self, small_semilattices):
        for K in small_semilattices:
            D = dual_semilattice(K)
            for p, q in product(D.elements, repeat=2):
                got = D.product(p, q)
                if INF in (p, q):
                    assert got is INF
                else:
                    s = sup_of_pair(K, p, q)
                    assert got == (INF if s is UNBOUNDED else s)
            S = D.semilattice
            assert S.labels[S.zero] is INF

    def test_product_matches_filter_intersection(self, small_semilattices):
        for K in small_semilattices:
            D = dual_semilattice(K)
            S = D.semilattice
            for a, b in product(range(S.n), repeat=2):
                assert D.vertex_filters[a] & D.vertex_filters[b] == D.vertex_filters[S.meet(a, b)]


class TestFilterSpace:
    def test_two_chain(self):
        F = filter_space(two_chain())
        assert [len(p) for p in F.points] == [0, 1, 2]
        S = F.semilattice
        assert all(S.leq(i, j) for i in range(3) for j in range(i, 3))

    def test_singleton(self):
        assert filter_space(singleton()).semilattice.n == 2

    def test_fan_is_diamond(self):
        S = filter_space(fan()).semilattice
        assert S.n == 4
        empty = S.idx(frozenset())
        full = S.idx(frozenset({"0", "a", "b"}))
        atoms = [x for x in range(S.n) if x not in (empty, full)]
        assert len(atoms) == 2 and not S.leq(atoms[0], atoms[1]) and not S.leq(atoms[1], atoms[0])
        assert all(S.leq(empty, x) and S.leq(x, full) for x in range(S.n))


class TestHat:
    def test_examples(self):
        C = three_chain()
        assert hat_embedding(C, "b").elements == {"a", "b"}
        assert hat_embedding(C, "0").elements == frozenset()
        assert hat_embedding(fan(), "a").elements == {"a"}

    def test_unknown(self):
        with pytest.raises(UnknownElement):
            hat_embedding(fan(), "q")

    def test_order_reflecting(self, small_semilattices):
        for K in small_semilattices:
            D = dual_semilattice(K)
            hats = {x: hat_embedding(K, x, D).members for x in K.labels}
            for x, y in product(K.labels, repeat=2):
                assert K.leq(K.idx(x), K.idx(y)) == (hats[x] & ~hats[y] == 0)


class TestRoundTrip:
    def test_chain(self):
        r = verify_duality_roundtrip(three_chain())
        assert r.ok and r.size == 3
        assert [b for _, b in r.correspondence] == [[], ["a"], ["a", "b"]]
        assert r.filter_count == 4 and r.improper_filter == ["a", "b", INF]

    def test_fan(self):
        r = verify_duality_roundtrip(fan())
        assert r.ok
        assert dict((a, tuple(b)) for a, b in r.correspondence) == \
            {"0": (), "a": ("a",), "b": ("b",)}
        # {a, b} is not a filter of the dual: a . b = inf would have to belong to it
        assert r.filter_count == 4

    def test_singleton(self):
        r = verify_duality_roundtrip(singleton())
        assert r.ok and r.correspondence == [("0", [])]

    def test_brute_force_filter_counts(self, small_semilattices):
        for K in small_semilattices:
            D = dual_semilattice(K)
            brute = dual_filters_brute(D)
            proper = [X for X in brute if D.infinity not in X]
            r = verify_duality_roundtrip(K)
            assert r.ok
            assert len(proper) == K.n
            assert len(brute) == r.filter_count == K.n + 1

    def test_all_small(self):
        for K in all_semilattices(5):
            assert verify_duality_roundtrip(K).ok


class TestSeparation:
    def test_by_compact(self):
        assert separate_by_compact(three_chain(), "b", "a") == "b"
        assert separate_by_compact(fan(), "a", "b") == "a"
        with pytest.raises(NotSeparable):
            separate_by_compact(fan(), "a", "a")

    def test_by_compact_exhaustive(self, small_semilattices):
        for K in small_semilattices:
            for a, b in product(K.labels, repeat=2):
                ai, bi = K.idx(a), K.idx(b)
                if K.leq(ai, bi):
                    continue
                p = K.idx(separate_by_compact(K, a, b))
                assert K.leq(p, ai) and not K.leq(p, bi)

    def test_by_prime_filter(self):
        B = boolean_square()
        assert separate_by_prime_filter(B, "a", "b").elements == {"a", "1"}
        assert separate_by_prime_filter(B, "1", "a").elements == {"b", "1"}
        with pytest.raises(NotSeparable):
            separate_by_prime_filter(B, "0", "a")

    def test_by_prime_filter_exhaustive(self):
        lattices = [boolean_square()] + [K.lattice for K in all_sublattices((3, 3)) if K.n >= 3][:80]
        for L in lattices:
            for a, b in product(range(L.n), repeat=2):
                if L.leq(a, b):
                    with pytest.raises(NotSeparable):
                        separate_by_prime_filter(L, L.labels[a], L.labels[b])
                    continue
                P = separate_by_prime_filter(L, L.labels[a], L.labels[b])
                assert P.prime and (P.members >> a) & 1 and not (P.members >> b) & 1

    def test_clopen_equals_all_filters(self, small_semilattices):
        for K in small_semilattices:
            assert all(F.clopen for F in enumerate_filters(K))

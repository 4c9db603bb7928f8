"""Stone-like duality between a finite semilattice and its clopen filters.

In a finite semilattice every filter is clopen and every element is
compact, so the dual semilattice is the set of positive elements plus an
artificial top ``INF`` (the empty filter), multiplied by the supremum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable

from .errors import NotSeparable, RoundTripFailure
from .order import (
    INF,
    FiniteDistributiveLattice,
    FiniteSemilattice,
    FilterObject,
    bits,
    enumerate_filters,
    make_filter,
    validate_semilattice,
)


@dataclass(frozen=True, eq=False)
class DualSemilattice:
    """The dual of ``source`` in two cross-checked views.

    ``semilattice`` carries the product table over labels ``positives + INF``
    (so ``INF`` is its minimum); ``vertex_filters[j]`` is the principal
    filter of ``source`` represented by dual element ``j`` (empty for INF).
    """

    source: FiniteSemilattice
    positives: tuple[int, ...]
    semilattice: FiniteSemilattice
    vertex_filters: tuple[int, ...] = field(repr=False)

    @property
    def infinity(self) -> int:
        return len(self.positives)

    def product(self, p: Hashable, q: Hashable):
        D = self.semilattice
        return D.labels[D.meet(D.idx(p), D.idx(q))]

    def dual_index(self, source_index: int) -> int:
        return self.positives.index(source_index)

    @property
    def elements(self) -> tuple:
        return self.semilattice.labels


def dual_semilattice(K: FiniteSemilattice) -> DualSemilattice:
    """Positive elements of K plus INF, with ``p . q = sup(p, q)`` or INF."""
    positives = tuple(x for x in range(K.n) if x != K.zero)
    labels = [K.labels[x] for x in positives] + [INF]
    m = len(positives)
    sup = K.sup_table
    table = []
    for a in range(m + 1):
        row = []
        for b in range(m + 1):
            if a == m or b == m:
                row.append(INF)
                continue
            s = sup[positives[a]][positives[b]]
            # sup of two positive elements is positive
            row.append(INF if s is None else K.labels[s])
        table.append(row)
    D = validate_semilattice(labels, table, INF)
    vfilters = tuple(K.up[x] for x in positives) + (0,)
    # cross-validate the two views: [p) & [q) == [p.q)
    for a in range(m + 1):
        for b in range(m + 1):
            if vfilters[a] & vfilters[b] != vfilters[D.meet(a, b)]:
                raise RoundTripFailure(
                    "product disagrees with filter intersection", (labels[a], labels[b])
                )
    return DualSemilattice(K, positives, D, vfilters)


@dataclass(frozen=True, eq=False)
class FilterSpace:
    """All filters of ``source`` ordered by inclusion, certified as a
    semilattice whose meet is intersection (element labels are the filters'
    member frozensets)."""

    source: FiniteSemilattice
    points: tuple[FilterObject, ...]
    semilattice: FiniteSemilattice


def filter_space(S: FiniteSemilattice) -> FilterSpace:
    points = tuple(enumerate_filters(S))
    masks = [F.members for F in points]
    pos = {m: i for i, m in enumerate(masks)}
    labels = [S.labels_of(m) for m in masks]
    table = []
    for a in masks:
        row = []
        for b in masks:
            c = a & b
            if c not in pos:
                raise RoundTripFailure("filters not closed under intersection",
                                       (S.labels_of(a), S.labels_of(b)))
            row.append(labels[pos[c]])
        table.append(row)
    return FilterSpace(S, points, validate_semilattice(labels, table, labels[pos[0]]))


def _hat_mask(D: DualSemilattice, x: int) -> int:
    K = D.source
    m = 0
    for j, p in enumerate(D.positives):
        if K.leq(p, x):
            m |= 1 << j
    return m


def hat_embedding(K: FiniteSemilattice, x: Hashable, dual: DualSemilattice | None = None) -> FilterObject:
    """``hat(x) = {p in DK : x in [p, ->)}``, a filter of the dual."""
    D = dual if dual is not None else dual_semilattice(K)
    return make_filter(D.semilattice, _hat_mask(D, K.idx(x)))


@dataclass
class RoundTripReport:
    """Outcome of :func:`verify_duality_roundtrip`.

    ``correspondence`` pairs each element label of K with the sorted labels
    of its hat-image.  ``improper_filter`` is the one filter of DK not hit
    by the hat map: the whole of DK, which contains INF and therefore
    cannot be of the form hat(x).
    """

    ok: bool
    size: int
    dual_size: int
    filter_count: int
    correspondence: list[tuple]
    improper_filter: list
    failure: str | None = None
    witness: tuple = ()


def verify_duality_roundtrip(K: FiniteSemilattice, raise_on_failure: bool = True) -> RoundTripReport:
    """Check that ``x -> hat(x)`` is a meet-isomorphism of K onto the
    proper filters of DK (those missing INF)."""
    D = dual_semilattice(K)
    DS = D.semilattice
    inf_bit = 1 << D.infinity
    hats = [_hat_mask(D, x) for x in range(K.n)]

    def fail(msg, *witness):
        if raise_on_failure:
            raise RoundTripFailure(msg, witness)
        return RoundTripReport(False, K.n, DS.n, len(filters), [], [], msg, witness)

    filters = [F.members for F in enumerate_filters(DS)]
    proper = [m for m in filters if not m & inf_bit]
    improper = [m for m in filters if m & inf_bit]
    for x in range(K.n):
        if not DS.is_filter_mask(hats[x]):
            return fail("hat image is not a filter", K.labels[x])
    seen = {}
    for x in range(K.n):
        if hats[x] in seen:
            return fail("hat is not injective", K.labels[seen[hats[x]]], K.labels[x])
        seen[hats[x]] = x
    for x in range(K.n):
        for y in range(K.n):
            if hats[K.meet(x, y)] != hats[x] & hats[y]:
                return fail("hat does not preserve meets", K.labels[x], K.labels[y])
            if K.leq(x, y) != (hats[x] & ~hats[y] == 0):
                return fail("hat does not reflect the order", K.labels[x], K.labels[y])
    for m in proper:
        if m not in seen:
            return fail("proper filter of DK is not a hat image", *sorted(map(str, DS.labels_of(m))))
    if improper != [DS.full]:
        return fail("unexpected improper filters of DK", len(improper))
    corr = [(K.labels[x], DS.sorted_labels(hats[x])) for x in range(K.n)]
    return RoundTripReport(True, K.n, DS.n, len(filters), corr, DS.sorted_labels(DS.full))


def separate_by_compact(K: FiniteSemilattice, a: Hashable, b: Hashable) -> Hashable:
    """Canonically first p (every element is compact) with p <= a, p !<= b."""
    ai, bi = K.idx(a), K.idx(b)
    if K.leq(ai, bi):
        raise NotSeparable("a <= b", (a, b))
    for p in bits(K.down[ai] & ~K.down[bi]):
        return K.labels[p]
    raise NotSeparable("no separating element", (a, b))  # pragma: no cover


def separate_by_prime_filter(L: FiniteDistributiveLattice, a: Hashable, b: Hashable) -> FilterObject:
    """First prime filter, in canonical filter order, holding a but not b."""
    ai, bi = L.idx(a), L.idx(b)
    if L.leq(ai, bi):
        raise NotSeparable("a <= b", (a, b))
    for F in enumerate_filters(L):
        if F.prime and (F.members >> ai) & 1 and not (F.members >> bi) & 1:
            return F
    raise NotSeparable("no separating prime filter", (a, b))

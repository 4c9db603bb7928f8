"""Exhaustive and seeded structure corpora for the verification sweeps."""

from __future__ import annotations

from itertools import permutations
from typing import Iterator

from .order import FiniteSemilattice, bits, validate_semilattice
from .sigma import random_semilattice, tree_compactification
from .errors import SizeOverflow


def _closed(up: list[int]) -> bool:
    for x, m in enumerate(up):
        for y in bits(m):
            if up[y] & ~m:
                return False
    return True


def _has_meets(n: int, down: list[int]) -> bool:
    for x in range(n):
        for y in range(x + 1, n):
            lower = down[x] & down[y]
            if not any(lower & ~down[m] == 0 for m in bits(lower)):
                return False
    return True


def _canonical(n: int, pairs: frozenset) -> tuple:
    best = None
    for perm in permutations(range(1, n)):
        relabel = (0,) + perm
        key = tuple(sorted((relabel[a], relabel[b]) for a, b in pairs))
        if best is None or key < best:
            best = key
    return best


def all_semilattices(max_size: int) -> list[FiniteSemilattice]:
    """Every finite meet-semilattice with at most ``max_size`` elements, one
    per isomorphism class (element 0 is the minimum, labels ``"0".."n-1"``
    in a linear extension)."""
    out = []
    for n in range(1, max_size + 1):
        slots = [(i, j) for j in range(1, n) for i in range(1, j)]
        seen = set()
        for code in range(1 << len(slots)):
            up = [(1 << n) - 1] + [1 << i for i in range(1, n)]
            for k, (i, j) in enumerate(slots):
                if (code >> k) & 1:
                    up[i] |= 1 << j
            if not _closed(up):
                continue
            down = [sum(1 << x for x in range(n) if (up[x] >> y) & 1) for y in range(n)]
            if not _has_meets(n, down):
                continue
            pairs = frozenset((x, y) for x in range(n) for y in bits(up[x]) if x != y)
            key = _canonical(n, pairs)
            if key in seen:
                continue
            seen.add(key)
            out.append(_from_down(n, down))
    return out


def _from_down(n, down):
    labels = [str(i) for i in range(n)]
    table = []
    for x in range(n):
        row = []
        for y in range(n):
            lower = down[x] & down[y]
            m = next(m for m in bits(lower) if lower & ~down[m] == 0)
            row.append(labels[m])
        table.append(row)
    return validate_semilattice(labels, table, "0")


def _ahu(children, v) -> str:
    return "(" + "".join(sorted(_ahu(children, c) for c in children[v])) + ")"


def all_rooted_trees(max_nodes: int) -> list[dict]:
    """One parent map per isomorphism class of rooted trees with at most
    ``max_nodes`` nodes; nodes are ``"t0"`` (root), ``"t1"``, ..."""
    out = []
    for n in range(1, max_nodes + 1):
        seen = set()

        def rec(parents):
            if len(parents) == n:
                children = [[] for _ in range(n)]
                for v, p in enumerate(parents[1:], start=1):
                    children[p].append(v)
                key = _ahu(children, 0)
                if key not in seen:
                    seen.add(key)
                    out.append({f"t{v}": (None if v == 0 else f"t{p}")
                                for v, p in enumerate(parents)})
                return
            # parent indices non-decreasing keeps the search small
            for p in range(parents[-1] if len(parents) > 1 else 0, len(parents)):
                rec(parents + [p])

        rec([None])
    return out


def grid_semilattice(*arities: int) -> FiniteSemilattice:
    """Full product of chains as a meet-semilattice (meet = componentwise min)."""
    from itertools import product as iproduct
    pts = list(iproduct(*[range(k) for k in arities]))
    labels = [",".join(map(str, p)) for p in pts]
    pos = {p: i for i, p in enumerate(pts)}
    table = [[labels[pos[tuple(map(min, a, b))]] for b in pts] for a in pts]
    return validate_semilattice(labels, table, labels[0])


def random_hosts(seed: int, sizes: range, per_size: int, max_elements: int) -> Iterator[FiniteSemilattice]:
    """Seeded random semilattices whose closure stays within ``max_elements``."""
    for size in sizes:
        got = 0
        s = seed * 1000 + size * 37
        tries = 0
        while got < per_size and tries < 200:
            tries += 1
            s += 1
            try:
                K = random_semilattice(s, size)
            except SizeOverflow:
                continue
            if K.n <= max_elements:
                got += 1
                yield K


def duality_corpus(seed: int = 0, total: int = 500, max_elements: int = 12) -> list[FiniteSemilattice]:
    """All semilattices up to 5 elements plus seeded random ones up to
    ``max_elements``, at least ``total`` structures."""
    out = all_semilattices(5)
    s = seed * 100003
    size = 1
    while len(out) < total:
        s += 1
        size = size % max_elements + 1
        try:
            K = random_semilattice(s, size)
        except SizeOverflow:
            continue
        if K.n <= max_elements:
            out.append(K)
    return out


def sigma_corpus(seed: int = 0, max_elements: int = 12, tree_nodes: int = 7,
                 random_per_size: int = 2) -> list[tuple[str, FiniteSemilattice]]:
    """Hosts for the exhaustive binary-function audit, tagged by origin."""
    hosts = [("exhaustive", K) for K in all_semilattices(5)]
    hosts += [("tree", tree_compactification(T)) for T in all_rooted_trees(tree_nodes)]
    for ar in [(2, 2), (2, 3), (3, 3), (2, 2, 2), (2, 2, 3), (3, 4)]:
        if _prod(ar) <= max_elements:
            hosts.append(("grid", grid_semilattice(*ar)))
    hosts += [("random", K) for K in
              random_hosts(seed, range(6, max_elements + 1), random_per_size, max_elements)]
    return hosts


def _prod(xs):
    out = 1
    for x in xs:
        out *= x
    return out

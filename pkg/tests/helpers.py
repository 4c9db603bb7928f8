from itertools import combinations

from semilat.order import lattice_from_covers, semilattice_from_covers, validate_semilattice


def two_chain():
    return validate_semilattice(["0", "1"], [["0", "0"], ["0", "1"]], "0")


def three_chain():
    return semilattice_from_covers(["0", "a", "b"], [("0", "a"), ("a", "b")])


def fan():
    return semilattice_from_covers(["0", "a", "b"], [("0", "a"), ("0", "b")])


def square():
    """0 below the atoms x, y; both below p."""
    return semilattice_from_covers(["0", "x", "y", "p"],
                                   [("0", "x"), ("0", "y"), ("x", "p"), ("y", "p")])


def boolean_square():
    return lattice_from_covers(["0", "a", "b", "1"],
                               [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")])


def subsets(xs):
    xs = list(xs)
    for r in range(len(xs) + 1):
        yield from combinations(xs, r)


def between(x, a, b):
    """x in [a, b] for tuples under the product order."""
    return all(min(ai, bi) <= xi <= max(ai, bi) for xi, ai, bi in zip(x, a, b))


def tuple_interval(points, a, b):
    return [x for x in points if between(x, a, b)]


def brute_gates(K, A, B):
    """All pairs satisfying the gate definition, by exhaustive search over tuples."""
    from semilat.order import bits
    A = [K.points[x] for x in bits(A)]
    B = [K.points[x] for x in bits(B)]
    out = set()
    for a in A:
        for b in B:
            ab = tuple_interval(K.points, a, b)
            if [x for x in ab if x in A] != [a] or [x for x in ab if x in B] != [b]:
                continue
            if all(between(a, x, b) for x in A) and all(between(b, a, y) for y in B):
                out.add((a, b))
    return out


# (criterion, passed, detail) rows filled by the acceptance tests
ACCEPTANCE = []

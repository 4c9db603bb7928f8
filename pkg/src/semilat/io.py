"""Text formats for structures and functions.

Structure files::

    # comments and blank lines are ignored
    kind semilattice          # or: lattice, chain-product
    size 4
    elements 0 x y p
    covers                    # or: meet
    0 < x
    0 < y
    x < p

With ``meet`` the body is ``size`` rows of ``size`` labels, row i holding
the meets of the i-th element with every element.  Chain products use::

    kind chain-product
    size 4
    chains 2 2
    members
    0,0
    0,1
    1,0
    1,1

Function files hold one ``label value`` pair per line; chain-product
labels are the comma-joined coordinates.  Values are 0/1 for binary
functions and exact rationals (``3``, ``-1/2``) for real functions.
"""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path

from .errors import ParseError
from .leaps import ChainProductSublattice, RealFunction, validate_sublattice
from .order import (
    INF,
    FiniteDistributiveLattice,
    FiniteSemilattice,
    semilattice_from_covers,
    validate_lattice,
    validate_semilattice,
)
from .sigma import BinaryFunction

KINDS = ("semilattice", "lattice", "chain-product")
_TOKEN = re.compile(r"\S+")


def _lines(text: str):
    """Yield ``(line_no, tokens_with_columns)`` for meaningful lines."""
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(line)]
        if toks:
            yield no, toks


def _int(tok, no, what):
    t, col = tok
    try:
        return int(t)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {t!r}", no, col) from None


class _Reader:
    def __init__(self, text):
        self.items = list(_lines(text))
        self.pos = 0

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else None

    def next(self, expect=None):
        item = self.peek()
        if item is None:
            if self.items:
                last, toks = self.items[-1]
                col = toks[-1][1] + len(toks[-1][0])
            else:
                last, col = 1, 1
            raise ParseError(f"unexpected end of file, expected {expect or 'more input'}", last, col)
        self.pos += 1
        return item

    def keyword(self, word, nargs=None):
        no, toks = self.next(word)
        if toks[0][0] != word:
            raise ParseError(f"expected {word!r}, got {toks[0][0]!r}", no, toks[0][1])
        if nargs is not None and len(toks) - 1 != nargs:
            raise ParseError(f"{word!r} takes {nargs} argument(s)", no, toks[0][1])
        return no, toks[1:]


def parse_structure_text(text: str):
    """Parse and certify a structure; see the module docstring for the grammar."""
    r = _Reader(text)
    no, args = r.keyword("kind", 1)
    kind = args[0][0]
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}", no, args[0][1])
    no, args = r.keyword("size", 1)
    size = _int(args[0], no, "size")
    if size < 1:
        raise ParseError("size must be positive", no, args[0][1])
    if kind == "chain-product":
        S = _parse_product(r, size)
    else:
        S = _parse_order(r, size, kind)
    extra = r.peek()
    if extra is not None:
        raise ParseError("unexpected trailing content", extra[0], extra[1][0][1])
    return S


def _parse_order(r: _Reader, size: int, kind: str):
    no, toks = r.keyword("elements")
    labels = []
    seen = set()
    for t, col in toks:
        if t in seen:
            raise ParseError(f"duplicate element {t!r}", no, col)
        seen.add(t)
        labels.append(t)
    if len(labels) != size:
        raise ParseError(f"expected {size} elements, got {len(labels)}", no, (toks[-1] if toks else (None, 1))[1])
    bno, btoks = r.next("covers or meet")
    body = btoks[0][0]
    if len(btoks) != 1 or body not in ("covers", "meet"):
        raise ParseError(f"expected 'covers' or 'meet', got {body!r}", bno, btoks[0][1])
    if body == "covers":
        covers = []
        while r.peek() is not None:
            no, toks = r.next()
            if len(toks) != 3 or toks[1][0] != "<":
                raise ParseError("cover line must read 'x < y'", no, toks[0][1])
            for t, col in (toks[0], toks[2]):
                if t not in seen:
                    raise ParseError(f"unknown element {t!r}", no, col)
            covers.append((toks[0][0], toks[2][0]))
        K = semilattice_from_covers(labels, covers)
    else:
        table = []
        for _ in range(size):
            no, toks = r.next("meet row")
            if len(toks) != size:
                raise ParseError(f"meet row needs {size} entries, got {len(toks)}", no, toks[0][1])
            for t, col in toks:
                if t not in seen:
                    raise ParseError(f"unknown element {t!r}", no, col)
            table.append([t for t, _ in toks])
        K = validate_semilattice(labels, table)
    return validate_lattice(K) if kind == "lattice" else K


def _parse_product(r: _Reader, size: int) -> ChainProductSublattice:
    no, args = r.keyword("chains")
    if not args:
        raise ParseError("'chains' needs at least one arity", no, 1)
    chains = [_int(a, no, "arity") for a in args]
    for a, k in zip(args, chains):
        if k < 1:
            raise ParseError("arity must be positive", no, a[1])
    r.keyword("members", 0)
    members = []
    seen = set()
    for _ in range(size):
        no, toks = r.next("member")
        if len(toks) != 1:
            raise ParseError("member line must be one comma-separated tuple", no, toks[0][1])
        t, col = toks[0]
        try:
            p = tuple(int(v) for v in t.split(","))
        except ValueError:
            raise ParseError(f"bad member {t!r}", no, col) from None
        if len(p) != len(chains):
            raise ParseError(f"member {t!r} has wrong dimension", no, col)
        if any(not 0 <= v < k for v, k in zip(p, chains)):
            raise ParseError(f"member {t!r} outside the chains", no, col)
        if p in seen:
            raise ParseError(f"duplicate member {t!r}", no, col)
        seen.add(p)
        members.append(p)
    return validate_sublattice(chains, members)


def parse_structure(path) -> FiniteSemilattice | ChainProductSublattice:
    return parse_structure_text(Path(path).read_text())


def format_label(x) -> str:
    if x is INF:
        return "inf"
    if isinstance(x, tuple):
        return ",".join(map(str, x))
    s = str(x)
    if not s or any(c.isspace() for c in s) or "#" in s:
        raise ValueError(f"label {s!r} cannot be written")
    return s


def serialize_structure(S, body: str = "covers") -> str:
    """Canonical text; ``parse_structure_text`` inverts it."""
    if isinstance(S, ChainProductSublattice):
        out = ["kind chain-product", f"size {S.n}",
               "chains " + " ".join(map(str, S.chains)), "members"]
        out += [format_label(p) for p in S.points]
        return "\n".join(out) + "\n"
    kind = "lattice" if isinstance(S, FiniteDistributiveLattice) else "semilattice"
    labs = [format_label(x) for x in S.labels]
    out = [f"kind {kind}", f"size {S.n}", "elements " + " ".join(labs)]
    if body == "covers":
        out.append("covers")
        for x in range(S.n):
            for y in range(S.n):
                if (S.pred_masks[y] >> x) & 1:
                    out.append(f"{labs[x]} < {labs[y]}")
    elif body == "meet":
        out.append("meet")
        for x in range(S.n):
            out.append(" ".join(labs[S.meet(x, y)] for y in range(S.n)))
    else:
        raise ValueError(f"unknown body {body!r}")
    return "\n".join(out) + "\n"


def _host_label_index(S) -> dict:
    if isinstance(S, ChainProductSublattice):
        return {format_label(p): i for i, p in enumerate(S.points)}
    return {format_label(x): i for i, x in enumerate(S.labels)}


def _parse_value_lines(S, text):
    index = _host_label_index(S)
    n = len(index)
    vals = [None] * n
    for no, toks in _lines(text):
        if len(toks) != 2:
            raise ParseError("function line must read 'label value'", no, toks[0][1])
        (lab, lcol), (val, vcol) = toks
        if lab not in index:
            raise ParseError(f"unknown element {lab!r}", no, lcol)
        i = index[lab]
        if vals[i] is not None:
            raise ParseError(f"duplicate element {lab!r}", no, lcol)
        try:
            vals[i] = Fraction(val)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad value {val!r}", no, vcol) from None
        vals[i] = (vals[i], no, vcol)
    missing = [lab for lab, i in index.items() if vals[i] is None]
    if missing:
        raise ParseError(f"function is not total: missing {missing[0]!r}")
    return vals


def parse_binary_function_text(K: FiniteSemilattice, text: str) -> BinaryFunction:
    ones = 0
    for i, (v, no, col) in enumerate(_parse_value_lines(K, text)):
        if v not in (0, 1):
            raise ParseError(f"binary value must be 0 or 1, got {v}", no, col)
        if v:
            ones |= 1 << i
    return BinaryFunction(K, ones)


def parse_real_function_text(K: ChainProductSublattice, text: str) -> RealFunction:
    return RealFunction(K, tuple(v for v, _, _ in _parse_value_lines(K, text)))


def parse_function(S, path, binary: bool | None = None):
    """Binary function on a semilattice, real function on a chain product."""
    text = Path(path).read_text()
    if binary is None:
        binary = not isinstance(S, ChainProductSublattice)
    if binary:
        if isinstance(S, ChainProductSublattice):
            S = S.lattice
        return parse_binary_function_text(S, text)
    if not isinstance(S, ChainProductSublattice):
        raise ParseError("real-valued functions need a chain-product host")
    return parse_real_function_text(S, text)


def serialize_function(f) -> str:
    if isinstance(f, BinaryFunction):
        K = f.host
        rows = [(format_label(K.labels[x]), (f.ones >> x) & 1) for x in range(K.n)]
    else:
        rows = [(format_label(p), v) for p, v in zip(f.host.points, f.values)]
    return "".join(f"{lab} {fmt_value(v)}\n" for lab, v in rows)


def fmt_value(v) -> str:
    """Exact rational as ``p/q`` in lowest terms (integers without ``/1``)."""
    return str(Fraction(v))


def describe_error(e: Exception) -> str:
    return f"{type(e).__name__}: {e}"

"""Command-line front end.

Every command prints a deterministic plain-text report and, with
``--report PATH``, writes the same content as JSON.  Exit status is 0 when
every checked property holds, 1 on a violation or failed certification,
and 2 on unreadable input or bad usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from itertools import product as iproduct

from . import leaps as lp
from .corpus import all_rooted_trees
from .duality import dual_semilattice, verify_duality_roundtrip
from .errors import OrderError, ParseError, SizeOverflow
from .io import (
    describe_error,
    fmt_value,
    parse_function,
    parse_structure,
    serialize_structure,
    format_label as _label,
)
from .order import FiniteDistributiveLattice, FiniteSemilattice, bits
from .sigma import (
    DEFAULT_SIZE_CAP,
    audit_host,
    compute_ledger,
    complete_binary_tree,
    minimal_quotient,
    random_semilattice,
    tree_compactification,
    verify_fiber_constancy,
)
from .sweeps import all_sweeps

SIZE_CAP_ENV = "SEMILAT_SIZE_CAP"
EXHAUSTIVE_LIMIT = 16


class UsageError(Exception):
    pass


def size_cap() -> int:
    raw = os.environ.get(SIZE_CAP_ENV)
    if raw is None:
        return DEFAULT_SIZE_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise UsageError(f"{SIZE_CAP_ENV} must be an integer, got {raw!r}") from None
    if cap < 1:
        raise UsageError(f"{SIZE_CAP_ENV} must be positive")
    return cap


def _rational(text: str) -> Fraction:
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError("epsilon must be positive")
    return v


def _labels(K, mask) -> list[str]:
    return [_label(x) for x in K.sorted_labels(mask)] if isinstance(K, FiniteSemilattice) \
        else [_label(K.points[x]) for x in bits(mask)]


def _need_product(S):
    if not isinstance(S, lp.ChainProductSublattice):
        raise UsageError("this command needs a chain-product structure")
    return S


def _need_order(S):
    if isinstance(S, lp.ChainProductSublattice):
        return S.lattice
    return S


class Report:
    def __init__(self, command: str):
        self.command = command
        self.lines: list[str] = []
        self.data: dict = {}
        self.ok = True
        self.failure: str | None = None

    def line(self, text: str = ""):
        self.lines.append(text)

    def fail(self, what: str):
        if self.ok:
            self.failure = what
        self.ok = False

    def text(self) -> str:
        out = list(self.lines)
        out.append(f"status: {'ok' if self.ok else 'FAIL'}" + (f" ({self.failure})" if self.failure else ""))
        return "\n".join(out) + "\n"

    def json(self) -> str:
        body = {"command": self.command, "ok": self.ok, "failure": self.failure, "result": self.data}
        return json.dumps(body, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# commands

def cmd_validate(args, rep: Report):
    S = parse_structure(args.structure)
    if isinstance(S, lp.ChainProductSublattice):
        S.certify()
        rep.data = {"kind": "chain-product", "size": S.n, "chains": list(S.chains)}
        rep.line(f"chain-product sublattice of {' x '.join(map(str, S.chains))}, {S.n} members")
    else:
        kind = "lattice" if isinstance(S, FiniteDistributiveLattice) else "semilattice"
        rep.data = {"kind": kind, "size": S.n, "zero": _label(S.labels[S.zero])}
        rep.line(f"{kind} with {S.n} elements, minimum {_label(S.labels[S.zero])}")
    rep.line("certified")


def cmd_dualize(args, rep: Report):
    K = _need_order(parse_structure(args.structure))
    D = dual_semilattice(K)
    text = serialize_structure(D.semilattice, body="meet")
    rep.data = {"size": K.n, "dual_size": D.semilattice.n,
                "elements": [_label(x) for x in D.semilattice.labels], "structure": text}
    rep.line(f"dual of a {K.n}-element semilattice: {D.semilattice.n} elements (positives + inf)")
    rep.line("product table:")
    for row in text.splitlines()[4:]:
        rep.line("  " + row)


def cmd_roundtrip(args, rep: Report):
    K = _need_order(parse_structure(args.structure))
    r = verify_duality_roundtrip(K, raise_on_failure=False)
    rep.data = {"ok": r.ok, "size": r.size, "dual_size": r.dual_size,
                "filters_of_dual": r.filter_count, "failure": r.failure,
                "correspondence": [[_label(a), [_label(x) for x in b]] for a, b in r.correspondence],
                "improper_filter": [_label(x) for x in r.improper_filter]}
    rep.line(f"elements {r.size}, dual {r.dual_size}, filters of dual {r.filter_count}")
    for a, b in r.correspondence:
        rep.line(f"  {_label(a)} -> {{{', '.join(_label(x) for x in b)}}}")
    rep.line(f"improper filter (contains inf): {{{', '.join(_label(x) for x in r.improper_filter)}}}")
    if not r.ok:
        rep.fail(f"RoundTripFailure: {r.failure}")


def cmd_decompose(args, rep: Report):
    K = _need_order(parse_structure(args.structure))
    f = parse_function(K, args.function, binary=True)
    led = compute_ledger(f)
    q, cert = minimal_quotient(f)
    fc = verify_fiber_constancy(f)
    levels = [sorted(_label(x) for x in lv) for lv in led.levels]
    rep.data = {
        "jump_points": _labels(K, led.jump_mask),
        "levels": levels, "n": led.n, "signature": list(led.signature),
        "M_f": _labels(K, led.support_mask),
        "fibers": [_labels(K, m) for m in q.fibers],
        "fibers_constant": fc.ok,
        "minimality": {"status": cert.status, "quotient_size": cert.quotient_size,
                       "minimum_size": cert.minimum_size},
    }
    rep.line(f"jump points: {', '.join(rep.data['jump_points']) or '-'}")
    for k, lv in enumerate(levels):
        rep.line(f"L_{k} = {{{', '.join(lv)}}}")
    rep.line(f"n(f)={led.n}")
    rep.line(f"s(f)=({', '.join(map(str, led.signature))})")
    rep.line(f"M_f = {{{', '.join(rep.data['M_f'])}}}")
    rep.line("fibers: " + "  ".join("{" + ", ".join(fb) + "}" for fb in rep.data["fibers"]))
    rep.line(f"fibers f-constant: {'yes' if fc.ok else 'no'}")
    rep.line(f"quotient size {cert.quotient_size}, minimality: {cert.status}")
    if not fc.ok:
        rep.fail("fiber constancy")
    if cert.status == "not-minimal":
        rep.fail("quotient minimality")


def cmd_discreteness(args, rep: Report):
    K = _need_order(parse_structure(args.structure))
    if K.n > EXHAUSTIVE_LIMIT:
        raise UsageError(f"exhaustive audit limited to {EXHAUSTIVE_LIMIT} elements")
    a = audit_host(K)
    keys = ["missing_jump", "late_stabilisation", "fiber_violations", "discreteness_violations"]
    rep.data = {"size": a.size, "functions": a.functions, "dual_size": a.dual_size,
                "max_n": a.max_n, "signatures": a.signatures, **{k: getattr(a, k) for k in keys}}
    rep.line(f"{a.functions} functions on {a.size} elements, {a.signatures} signatures, max n(f) {a.max_n}")
    for k in keys:
        rep.line(f"  {k}: {getattr(a, k)}")
        if getattr(a, k):
            rep.fail(k)


def _point_set(K, text):
    mask = 0
    for p in filter(None, text.split(";")):
        try:
            mask |= 1 << K.idx(tuple(int(v) for v in p.split(",")))
        except ValueError:
            raise UsageError(f"bad point {p!r}") from None
    return mask


def cmd_gates(args, rep: Report):
    K = _need_product(parse_structure(args.structure))
    if args.between:
        A, B = (_point_set(K, t) for t in args.between)
        g = lp.gate_pair(K, A, B)
        a, b = g.pair
        rep.data = {"gate": [_label(a), _label(b)]}
        rep.line(f"gate ({_label(a)}) -> ({_label(b)})")
        return
    coords = range(K.dims) if args.coordinate is None else [args.coordinate]
    out = []
    for i in coords:
        if not 0 <= i < K.dims:
            raise UsageError(f"no coordinate {i}")
        cuts = lp.canonical_cuts(K, i)
        for s in range(len(cuts)):
            for t in range(s, len(cuts)):
                r = lp.verify_gate_coordinate_laws(K, i, cuts[s], cuts[t], allow_equal=True)
                gates = [[_label(x) for x in g.pair] for g in r.gates]
                out.append({"coordinate": i, "p_cut": cuts[s], "q_cut": cuts[t],
                            "gates": gates, "violations": r.violations})
                rep.line(f"coordinate {i} cuts ({cuts[s]},{cuts[t]}): "
                         + " ".join(f"({a})->({b})" for a, b in gates)
                         + ("" if r.ok else f"  VIOLATION {r.violations[0]}"))
                if not r.ok:
                    rep.fail("gate coordinate laws")
    rep.data = {"pairs": out}


def _leap_data(led: lp.LeapLedgerN):
    K = led.function.host
    out = []
    for cl in led.coordinates:
        chain = []
        for w in cl.chain:
            a, b = w.gate.a, w.gate.b
            chain.append({"p_cut": w.p_cut, "q_cut": w.q_cut, "jump": w.is_jump,
                          "gate": [_label(K.points[a]), _label(K.points[b])],
                          "difference": fmt_value(abs(led.function.values[a] - led.function.values[b]))})
        out.append({"coordinate": cl.coordinate, "m": cl.m, "jump_cuts": cl.jump_cuts,
                    "leap_pairs": [list(p) for p in cl.leap_pairs], "chain": chain})
    return out


def _load_real(args):
    K = _need_product(parse_structure(args.structure))
    return parse_function(K, args.function, binary=False)


def cmd_leaps(args, rep: Report):
    f = _load_real(args)
    led = lp.leap_ledger(f, args.eps)
    rep.data = {"epsilon": fmt_value(args.eps), "m": list(led.m), "coordinates": _leap_data(led)}
    rep.line(f"epsilon {fmt_value(args.eps)}, m = ({', '.join(map(str, led.m))})")
    for c in rep.data["coordinates"]:
        rep.line(f"coordinate {c['coordinate']}: m={c['m']}, jump cuts {c['jump_cuts']}")
        for w in c["chain"]:
            kind = "jump" if w["jump"] else "leap"
            rep.line(f"  {kind} at cuts ({w['p_cut']},{w['q_cut']}): gate ({w['gate'][0]})->({w['gate'][1]}),"
                     f" |f(a)-f(b)| = {w['difference']}")


def _cube_text(c):
    return f"[{_label(c.lo)} .. {_label(c.hi)}]"


def cmd_cover(args, rep: Report):
    f = _load_real(args)
    led = lp.leap_ledger(f, args.eps)
    rep.data = {"epsilon": fmt_value(args.eps), "m": list(led.m),
                "cubes": [{"lo": list(c.lo), "hi": list(c.hi),
                           "members": _labels(f.host, c.members)} for c in led.cover]}
    rep.line(f"{len(led.cover)} cubes")
    for c in led.cover:
        rep.line(f"  {_cube_text(c)}: {' '.join(_labels(f.host, c.members))}")


def cmd_osc_check(args, rep: Report):
    f = _load_real(args)
    r = lp.verify_osc_bound(f, args.eps)
    n = f.host.dims
    rep.data = {"epsilon": fmt_value(args.eps), "dims": n, "p_n": lp.p_sequence(n),
                "bound": fmt_value(r.bound), "m": list(r.m),
                "cubes": [{"lo": list(c.lo), "hi": list(c.hi), "size": c.size,
                           "oscillation": fmt_value(c.oscillation), "slack": fmt_value(c.slack)}
                          for c in r.cubes]}
    rep.line(f"bound p({n})*eps = {lp.p_sequence(n)}*{fmt_value(args.eps)} = {fmt_value(r.bound)}")
    for c in r.cubes:
        mark = "pass" if c.slack >= 0 else "FAIL"
        rep.line(f"  {_label(c.lo)} .. {_label(c.hi)}: osc {fmt_value(c.oscillation)},"
                 f" slack {fmt_value(c.slack)} {mark}")
    if not r.ok:
        rep.fail("oscillation bound")
    else:
        rep.line("all cubes pass")


def cmd_sld_check(args, rep: Report):
    K = _need_product(parse_structure(args.structure))
    F = []
    if K.n <= EXHAUSTIVE_LIMIT:
        F += [lp.RealFunction(K, tuple(Fraction(v) for v in vals)) for vals in iproduct((0, 1), repeat=K.n)]
    F += [lp.random_real_function(args.seed * 1009 + k, K) for k in range(args.rationals)]
    F += [parse_function(K, p, binary=False) for p in args.functions]
    if not F:
        raise UsageError("no functions to audit")
    r = lp.sld_partition(F, args.eps)
    rep.data = {"epsilon": fmt_value(args.eps), "functions": len(F), "checks": r.checks,
                "classes": [{"key": list(c.key), "size": c.size,
                             "neighborhood_checks": c.neighborhood_checks,
                             "max_local_radius": fmt_value(c.max_local_radius)} for c in r.classes],
                "violations": [[list(v[0]), v[1], v[2], list(v[3]), list(v[4])] for v in r.violations]}
    rep.line(f"{len(F)} functions, bound {fmt_value(r.bound)}, {r.checks} oscillation checks")
    for c in r.classes:
        rep.line(f"  class ({', '.join(map(str, c.key))}): {c.size} functions,"
                 f" max local radius {fmt_value(c.max_local_radius)}")
    if not r.ok:
        rep.fail("oscillation bound inside a class")


def cmd_generate(args, rep: Report):
    cap = size_cap()
    if args.what == "random-semilattice":
        S = random_semilattice(args.seed, args.size, cap=cap)
    elif args.what == "tree":
        if args.depth is not None:
            T = complete_binary_tree(args.depth)
        else:
            trees = [t for t in all_rooted_trees(args.nodes) if len(t) == args.nodes]
            T = trees[args.seed % len(trees)]
        S = tree_compactification(T)
    else:
        S = lp.random_sublattice(args.seed, args.chains)
    if len(S) > cap:
        raise UsageError(f"generated structure has {len(S)} elements, over the cap {cap}")
    text = serialize_structure(S)
    rep.data = {"structure": text, "size": len(S)}
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        rep.line(f"wrote {len(S)}-element structure to {args.out}")
    else:
        for line in text.splitlines():
            rep.line(line)


def cmd_selftest(args, rep: Report):
    results = all_sweeps(args.seed, quick=args.quick)
    rep.data = {"sweeps": [r.as_dict() for r in results]}
    for r in results:
        rep.line(f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.instances} instances, {r.violations} violations")
        if not r.ok:
            rep.fail(r.name)


COMMANDS = {
    "validate": cmd_validate, "dualize": cmd_dualize, "roundtrip": cmd_roundtrip,
    "decompose": cmd_decompose, "discreteness": cmd_discreteness, "gates": cmd_gates,
    "leaps": cmd_leaps, "cover": cmd_cover, "osc-check": cmd_osc_check,
    "sld-check": cmd_sld_check, "generate": cmd_generate, "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="semilat", description="Finite semilattice and chain-product verification tools.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", metavar="PATH", help="also write a JSON report here")
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness (default 0)")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_, structure=True, function=False, eps=False):
        sp = sub.add_parser(name, help=help_, parents=[common])
        if structure:
            sp.add_argument("structure", help="structure file")
        if function:
            sp.add_argument("function", help="function file")
        if eps:
            sp.add_argument("--eps", type=_rational, required=True, help="positive rational, e.g. 1/2")
        return sp

    add("validate", "certify a structure file")
    add("dualize", "print the dual semilattice")
    add("roundtrip", "check the hat map onto filters of the dual")
    add("decompose", "level chain, signature, M_f and quotient of a 0/1 function", function=True)
    add("discreteness", "exhaustive audit over all 0/1 functions")
    g = add("gates", "gates and coordinate laws for every nested cut pair")
    g.add_argument("--coordinate", type=int, help="restrict to one coordinate (0-based)")
    g.add_argument("--between", nargs=2, metavar=("A", "B"),
                   help="gate between two convex point sets written '0,0;0,1'")
    add("leaps", "leap counts m_i with gate witnesses", function=True, eps=True)
    add("cover", "cube cover cut at the leap gates", function=True, eps=True)
    add("osc-check", "oscillation bound on every cube", function=True, eps=True)
    s = add("sld-check", "leap-signature partition audit", eps=True)
    s.add_argument("--rationals", type=int, default=20, help="seeded rational functions to add")
    s.add_argument("--functions", nargs="*", default=[], help="extra function files")
    gen = add("generate", "write a generated structure", structure=False)
    gen.add_argument("what", choices=["random-semilattice", "tree", "chain-product"])
    gen.add_argument("--size", type=int, default=6, help="random-semilattice point count")
    gen.add_argument("--nodes", type=int, default=5, help="tree node count")
    gen.add_argument("--depth", type=int, help="complete binary tree of this depth instead")
    gen.add_argument("--chains", type=int, nargs="+", default=[4, 4, 4], help="chain arities")
    gen.add_argument("--out", metavar="PATH", help="write the structure file here")
    st = add("selftest", "run every property sweep", structure=False)
    st.add_argument("--quick", action="store_true", help="smaller corpora")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    rep = Report(args.command)
    status = 0
    try:
        COMMANDS[args.command](args, rep)
    except (ParseError, UsageError, SizeOverflow, OSError) as e:
        rep.fail(describe_error(e))
        status = 2
    except OrderError as e:
        rep.fail(describe_error(e))
        status = 1
    if status == 0 and not rep.ok:
        status = 1
    sys.stdout.write(rep.text())
    if args.report:
        try:
            with open(args.report, "w") as fh:
                fh.write(rep.json())
        except OSError as e:
            sys.stderr.write(f"cannot write report: {e}\n")
            return 2
    return status


if __name__ == "__main__":
    sys.exit(main())

"""One test per acceptance criterion.  Each records a PASS/FAIL row that the
terminal summary prints at the end of the run."""

import time
from fractions import Fraction
from pathlib import Path

from helpers import ACCEPTANCE, between, brute_gates, tuple_interval
from semilat import leaps as lp
from semilat.cli import main
from semilat.corpus import all_rooted_trees, all_semilattices
from semilat.order import bits
from semilat.sweeps import (
    EPSILONS,
    duality_sweep,
    gate_law_hosts,
    gate_law_sweep,
    osc_hosts,
    p_closed_form,
    p_sequence_sweep,
    sigma_sweep,
    sld_sweep,
)

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
SEED = 0


def record(name, ok, detail):
    ACCEPTANCE.append((name, ok, detail))
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return ok


def test_duality_roundtrip():
    res = duality_sweep(SEED, total=500, max_elements=12)
    exhaustive = len(all_semilattices(5))
    ok = res.ok and res.instances >= 500 and res.seconds < 60 \
        and res.details["max_elements"] == 12 and exhaustive < res.instances
    assert record("duality round-trip", ok,
                  f"{res.instances} structures ({exhaustive} exhaustive up to 5 elements), "
                  f"{res.violations} failures, {res.seconds:.1f}s")


def test_sigma_discreteness():
    res = sigma_sweep(SEED, max_elements=12, tree_nodes=7)
    d = res.details
    trees = sum(1 for n in range(1, 8) for T in all_rooted_trees(7) if len(T) == n)
    ok = res.ok and res.seconds < 600 and d["max_host_size"] <= 12 \
        and d["hosts_by_origin"].get("tree", 0) >= trees
    assert record("sigma-discreteness (a)-(d)", ok,
                  f"{res.instances} hosts, {d['functions']} functions, "
                  f"jump {d['missing_jump']}, stabilisation {d['late_stabilisation']}, "
                  f"fibers {d['fiber_violations']}, discreteness {d['discreteness_violations']} "
                  f"violations, {res.seconds:.1f}s")


def _gate_oracle_violations(hosts):
    """Gates from the library against the definition, plus the strict
    coordinate inequality, checked on tuples."""
    bad = 0
    checked = 0
    for K in hosts:
        for i in range(K.dims):
            cuts = lp.canonical_cuts(K, i)
            for s in range(len(cuts)):
                for t in range(s, len(cuts)):
                    A = K.full & ~K.ge_mask(i, cuts[s])
                    B = K.ge_mask(i, cuts[t])
                    got = {g.pair for g in lp.all_gates(K, A, B)}
                    checked += 1
                    if got != brute_gates(K, A, B) or any(a[i] >= b[i] for a, b in got):
                        bad += 1
    return checked, bad


def test_gate_laws():
    res = gate_law_sweep(SEED, random_count=200)
    hosts = gate_law_hosts(SEED, 200)
    small = [K for K in hosts if K.chains != (4, 4, 4)]
    checked, bad = _gate_oracle_violations(small + hosts[len(small):len(small) + 25])
    d = res.details
    ok = res.ok and res.instances >= 200 and bad == 0 and d["helly_empty"] > 0
    assert record("gate laws", ok,
                  f"{res.instances} hosts, {d['law_checks']} law checks, {d['gates']} gates, "
                  f"{d['helly_families']} Helly families ({d['helly_empty']} empty), "
                  f"{res.violations} violations; definition oracle {checked} cut pairs, {bad} mismatches")


def _osc_triples():
    hosts = osc_hosts(SEED, 300)
    for h, K in enumerate(hosts):
        for j in range(3):
            f = lp.random_real_function(SEED * 15485863 + h * 101 + j, K)
            for eps in EPSILONS:
                yield K, f, eps


def test_oscillation_bound():
    t0 = time.perf_counter()
    triples = cubes = bad = 0
    for K, f, eps in _osc_triples():
        triples += 1
        led = lp.leap_ledger(f, eps)
        bound = p_closed_form(K.dims) * eps
        seen = 0
        for cube in led.cover:
            vals = [f.values[x] for x in bits(cube.members)]
            cubes += 1
            seen |= cube.members
            if max(vals) - min(vals) > bound:
                bad += 1
        if seen != K.full or any(v < 0 or v > 10 for v in f.values):
            bad += 1
    secs = time.perf_counter() - t0
    ok = bad == 0 and triples >= 1000 and secs < 600
    assert record("oscillation bound", ok,
                  f"{triples} triples, {cubes} cubes, {bad} violations, {secs:.1f}s")


def test_range_gap_and_interval_emptiness():
    gap_checks = gap_bad = 0
    for K, f, eps in _osc_triples():
        val = dict(zip(K.points, f.values))
        for cube in lp.leap_ledger(f, eps).cover:
            pts = [K.points[x] for x in bits(cube.members)]
            for a in pts:
                for b in pts:
                    if not all(x <= y for x, y in zip(a, b)):
                        continue
                    vs = sorted({val[x] for x in tuple_interval(K.points, a, b)})
                    gap_checks += 1
                    if any(y - x > eps for x, y in zip(vs, vs[1:])):
                        gap_bad += 1
    empty_checks = empty_bad = 0
    for K in osc_hosts(SEED, 300):
        for i in range(K.dims):
            for a in K.points:
                for b in K.points:
                    strictly = [x for x in K.points if a[i] < x[i] < b[i]]
                    inside = [x for x in strictly if between(x, a, b)]
                    empty_checks += 1
                    if strictly and not inside:
                        empty_bad += 1
    ok = gap_bad == 0 and empty_bad == 0
    assert record("range gap and interval emptiness", ok,
                  f"{gap_checks} gap checks ({gap_bad} violations), "
                  f"{empty_checks} emptiness checks ({empty_bad} violations)")


def test_sld_partition():
    res = sld_sweep(SEED, Fraction(1, 2))
    d = res.details
    ok = res.ok and d["2x2"]["functions"] == 16 + 20 and d["3x3"]["functions"] == 512 + 20
    assert record("SLD partition", ok,
                  f"2x2 {d['2x2']['functions']} functions in {len(d['2x2']['classes'])} classes, "
                  f"3x3 {d['3x3']['functions']} functions in {len(d['3x3']['classes'])} classes, "
                  f"{d['oscillation_checks']} checks, {res.violations} violations")


def test_p_sequence():
    res = p_sequence_sweep(10)
    # plain iteration of the recursion, separate from the library
    p = [None, 3]
    for k in range(1, 10):
        p.append(8 * p[k] + 6)
    ok = res.ok and lp.p_sequence(1) == 3 and res.details["values"] == p[1:] \
        and all(p[k] == p_closed_form(k) for k in range(1, 11))
    assert record("p-sequence", ok, f"p(1..10) = {p[1:4]} ... {p[10]}, closed form agrees")


def _commands(tmp):
    s = lambda n: str(SAMPLES / n)  # noqa: E731
    return [
        ["validate", s("square.txt")],
        ["validate", s("grid2x2.txt")],
        ["dualize", s("square.txt")],
        ["roundtrip", s("square.txt")],
        ["decompose", s("square.txt"), s("square_f.txt")],
        ["discreteness", s("square.txt")],
        ["gates", s("grid2x2.txt")],
        ["gates", s("grid2x2.txt"), "--between", "0,0;0,1", "1,0;1,1"],
        ["leaps", s("grid2x2.txt"), s("grid2x2_sum.txt"), "--eps", "1/2"],
        ["cover", s("grid2x2.txt"), s("grid2x2_sum.txt"), "--eps", "1/2"],
        ["osc-check", s("chain3_product.txt"), s("chain3_id.txt"), "--eps", "1/2"],
        ["sld-check", s("grid2x2.txt"), "--eps", "1/2"],
        ["generate", "random-semilattice", "--size", "8", "--out", str(tmp / "g1.txt")],
        ["generate", "tree", "--nodes", "6", "--out", str(tmp / "g2.txt")],
        ["generate", "chain-product", "--chains", "4", "4", "--out", str(tmp / "g3.txt")],
        ["selftest", "--quick"],
    ]


def test_cli_determinism(tmp_path, capsys):
    diffs = []
    cmds = _commands(tmp_path)
    for c in cmds:
        outs = []
        for run in range(2):
            rep = tmp_path / f"r{run}.json"
            argv = c + ["--seed", "11", "--report", str(rep)]
            code = main(argv)
            text = capsys.readouterr().out
            files = [Path(a).read_bytes() for a in argv if a.startswith(str(tmp_path / "g"))]
            outs.append((code, text, rep.read_bytes(), files))
        if outs[0] != outs[1]:
            diffs.append(c[0])
    ok = not diffs
    assert record("CLI determinism", ok,
                  f"{len(cmds)} invocations run twice, differing: {diffs or 'none'}")

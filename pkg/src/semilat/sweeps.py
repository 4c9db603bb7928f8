"""Property sweeps shared by the ``selftest`` command and the acceptance tests.

Each sweep returns a :class:`SweepResult` whose ``details`` hold only
deterministic data; wall-clock time is kept separately in ``seconds``.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct

from . import leaps as lp
from .corpus import duality_corpus, sigma_corpus
from .duality import verify_duality_roundtrip
from .errors import OrderError
from .order import bits
from .sigma import audit_host

EPSILONS = (Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2))


@dataclass
class SweepResult:
    name: str
    instances: int
    violations: int
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def as_dict(self) -> dict:
        return {"name": self.name, "instances": self.instances,
                "violations": self.violations, "ok": self.ok, "details": self.details}


def _timed(fn):
    def run(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


@_timed
def duality_sweep(seed: int = 0, total: int = 500, max_elements: int = 12) -> SweepResult:
    corpus = duality_corpus(seed, total, max_elements)
    bad = []
    for k, K in enumerate(corpus):
        rep = verify_duality_roundtrip(K, raise_on_failure=False)
        if not rep.ok:
            bad.append([k, rep.failure])
    return SweepResult("duality-roundtrip", len(corpus), len(bad),
                       {"max_elements": max(K.n for K in corpus), "failures": bad[:10]})


@_timed
def sigma_sweep(seed: int = 0, max_elements: int = 12, tree_nodes: int = 7,
                random_per_size: int = 6) -> SweepResult:
    hosts = sigma_corpus(seed, max_elements, tree_nodes, random_per_size)
    totals = {"missing_jump": 0, "late_stabilisation": 0,
              "fiber_violations": 0, "discreteness_violations": 0}
    functions = 0
    max_n = 0
    tags: dict[str, int] = {}
    for tag, K in hosts:
        a = audit_host(K)
        functions += a.functions
        max_n = max(max_n, a.max_n)
        tags[tag] = tags.get(tag, 0) + 1
        for key in totals:
            totals[key] += getattr(a, key)
    return SweepResult("sigma-discreteness", len(hosts), sum(totals.values()),
                       {"functions": functions, "max_n": max_n, "hosts_by_origin": tags,
                        "max_host_size": max(K.n for _, K in hosts), **totals})


def gate_law_hosts(seed: int = 0, random_count: int = 200) -> list[lp.ChainProductSublattice]:
    hosts = lp.all_sublattices((2, 2)) + lp.all_sublattices((3, 3))
    hosts += [lp.random_sublattice(seed * 7919 + k, (4, 4, 4)) for k in range(random_count)]
    return hosts


def _interval_bounds(K, rng):
    L = K.lattice
    a, b = rng.randrange(K.n), rng.randrange(K.n)
    return L.interval_mask(a, b)


@_timed
def gate_law_sweep(seed: int = 0, random_count: int = 200, helly_families: int = 5) -> SweepResult:
    """Gate invariants, coordinate laws for all nested cut pairs, closed-form
    projections against exhaustive search, gate_pair on disjoint interval
    pairs and Helly witnesses for random interval families."""
    rng = random.Random(seed)
    hosts = gate_law_hosts(seed, random_count)
    counts = {"law_checks": 0, "gates": 0, "projection_checks": 0,
              "gate_pairs": 0, "helly_families": 0, "helly_empty": 0}
    bad = []
    for h, K in enumerate(hosts):
        L = K.lattice
        for i in range(K.dims):
            cuts = lp.canonical_cuts(K, i)
            for s in range(len(cuts)):
                for t in range(s, len(cuts)):
                    rep = lp.verify_gate_coordinate_laws(K, i, cuts[s], cuts[t], allow_equal=True)
                    counts["law_checks"] += 1
                    counts["gates"] += len(rep.gates)
                    if not rep.ok:
                        bad.append([h, "laws", rep.violations[0]])
        # closed-form projection onto a few intervals, every x
        for _ in range(3):
            C = _interval_bounds(K, rng)
            lo, hi = L.meet_all(C), L.join_all(C)
            for x in range(K.n):
                counts["projection_checks"] += 1
                if lp._project_search(L, x, C) != lp._project_closed(L, x, lo, hi):
                    bad.append([h, "projection", K.points[x]])
        # gate_pair on disjoint random intervals
        for _ in range(3):
            A, B = _interval_bounds(K, rng), _interval_bounds(K, rng)
            if A & B:
                continue
            counts["gate_pairs"] += 1
            try:
                lp.gate_pair(K, A, B)
            except OrderError as e:
                bad.append([h, "gate_pair", str(e)])
        for _ in range(helly_families):
            fam = [_interval_bounds(K, rng) for _ in range(rng.randint(1, 4))]
            counts["helly_families"] += 1
            common = L.full
            for m in fam:
                common &= m
            try:
                res = lp.helly_witness(K, fam)
            except OrderError as e:
                bad.append([h, "helly", str(e)])
                continue
            if common:
                if not isinstance(res, lp.AllIntersect) or not (common >> K.idx(res.point)) & 1:
                    bad.append([h, "helly", "bad common point"])
            else:
                counts["helly_empty"] += 1
                if isinstance(res, lp.AllIntersect) or res[0] & res[1]:
                    bad.append([h, "helly", "bad disjoint pair"])
    return SweepResult("gate-laws", len(hosts), len(bad), {**counts, "failures": bad[:10]})


def osc_hosts(seed: int = 0, count: int = 300) -> list[lp.ChainProductSublattice]:
    """Hosts with 1 to 3 coordinates inside 4, 4x4 and 4x4x4."""
    hosts = [lp.full_grid(4), lp.full_grid(4, 4), lp.full_grid(4, 4, 4)]
    for k in range(count - len(hosts)):
        dims = 1 + k % 3
        hosts.append(lp.random_sublattice(seed * 104729 + k, (4,) * dims))
    return hosts


@_timed
def osc_sweep(seed: int = 0, host_count: int = 300, functions_per_host: int = 3,
              epsilons=EPSILONS) -> SweepResult:
    """Oscillation bound, range gaps, interval emptiness, jump finiteness and
    chain monotonicity over (host, f, eps) triples."""
    hosts = osc_hosts(seed, host_count)
    c = {"triples": 0, "cubes": 0, "osc_violations": 0, "gap_checks": 0, "gap_violations": 0,
         "emptiness_checks": 0, "emptiness_violations": 0, "finiteness_violations": 0,
         "monotonicity_violations": 0, "max_oscillation_ratio": "0"}
    worst = Fraction(0)
    for h, K in enumerate(hosts):
        L = K.lattice
        for i in range(K.dims):
            for a in range(K.n):
                for b in range(K.n):
                    c["emptiness_checks"] += 1
                    if not lp._emptiness_ok(K, i, a, b, L.interval_mask(a, b)):
                        c["emptiness_violations"] += 1
        for j in range(functions_per_host):
            f = lp.random_real_function(seed * 15485863 + h * 101 + j, K)
            for eps in epsilons:
                c["triples"] += 1
                led = lp.leap_ledger(f, eps)
                rep = lp.verify_osc_bound(f, eps, ledger=led)
                c["cubes"] += len(rep.cubes)
                c["osc_violations"] += len(rep.violations)
                for cc in rep.cubes:
                    worst = max(worst, cc.oscillation / rep.bound)
                for cube in led.cover:
                    members = list(bits(cube.members))
                    for lo in members:
                        for hi in members:
                            if L.leq(lo, hi):
                                c["gap_checks"] += 1
                                if not lp._gap_ok(f, led.epsilon, L.interval_mask(lo, hi)):
                                    c["gap_violations"] += 1
                c["finiteness_violations"] += len(lp.verify_jump_finiteness(f, eps))
                for cl in led.coordinates:
                    for w1, w2 in zip(cl.chain, cl.chain[1:]):
                        a1 = K.pi(cl.coordinate, w1.gate.a)
                        b1 = K.pi(cl.coordinate, w1.gate.b)
                        a2 = K.pi(cl.coordinate, w2.gate.a)
                        if not a1 < b1 <= a2:
                            c["monotonicity_violations"] += 1
    c["max_oscillation_ratio"] = str(worst)
    v = sum(c[k] for k in c if k.endswith("violations"))
    return SweepResult("oscillation-bound", c["triples"], v, c)


def sld_functions(K: lp.ChainProductSublattice, seed: int = 0, rationals: int = 20) -> list:
    F = [lp.RealFunction(K, tuple(Fraction(v) for v in vals))
         for vals in iproduct((0, 1), repeat=K.n)]
    F += [lp.random_real_function(seed * 1009 + k, K) for k in range(rationals)]
    return F


@_timed
def sld_sweep(seed: int = 0, eps=Fraction(1, 2)) -> SweepResult:
    out = {}
    violations = 0
    checks = 0
    for name, K in (("2x2", lp.full_grid(2, 2)), ("3x3", lp.full_grid(3, 3))):
        rep = lp.sld_partition(sld_functions(K, seed), eps)
        violations += len(rep.violations)
        checks += rep.checks
        out[name] = {
            "functions": sum(c.size for c in rep.classes),
            "classes": {",".join(map(str, c.key)): c.size for c in rep.classes},
            "max_local_radius": str(max(c.max_local_radius for c in rep.classes)),
            "violations": len(rep.violations),
        }
    return SweepResult("sld-partition", 2, violations, {"oscillation_checks": checks, **out})


def p_closed_form(k: int) -> Fraction:
    return Fraction(27, 7) * 8 ** (k - 1) - Fraction(6, 7)


@_timed
def p_sequence_sweep(kmax: int = 10) -> SweepResult:
    vals = {k: lp.p_sequence(k) for k in range(1, kmax + 1)}
    bad = [k for k in vals if vals[k] != p_closed_form(k)]
    if vals[1] != 3:
        bad.append(1)
    return SweepResult("p-sequence", kmax, len(bad), {"values": [vals[k] for k in sorted(vals)]})


def all_sweeps(seed: int = 0, quick: bool = False) -> list[SweepResult]:
    if quick:
        return [
            duality_sweep(seed, total=60, max_elements=8),
            sigma_sweep(seed, max_elements=8, tree_nodes=5, random_per_size=1),
            gate_law_sweep(seed, random_count=20),
            osc_sweep(seed, host_count=12, functions_per_host=1),
            p_sequence_sweep(),
        ]
    return [duality_sweep(seed), sigma_sweep(seed), gate_law_sweep(seed),
            osc_sweep(seed), sld_sweep(seed), p_sequence_sweep()]

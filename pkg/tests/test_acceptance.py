"""Acceptance criteria 1-7, one test each, each printing a PASS/FAIL line."""

import time
from fractions import Fraction

import numpy as np
import pytest

from oracles import exact_quotients, naive_orbits
from wreathdim.arithmetic import ExtReal, Magnitude, mag_pow
from wreathdim.construction import (
    expected_order,
    explicit_layers,
    layer_recursion,
    verify_layer,
)
from wreathdim.dimension import claim_diagnostics, dimension_trace
from wreathdim.permgroup import Permutation, complement_invariance_agrees, enumerate_group, is_invariant
from wreathdim.sequences import SequenceSpec, goodness_check

SYM2 = SequenceSpec.constant("sym", 2)
ALT5 = SequenceSpec.constant("alt", 5)
SYM_K2 = SequenceSpec.family_formula("sym", "k+2")
GRID_SEQS = {"Sym(2)": SYM2, "Alt(5)": ALT5, "Sym(k+2)": SYM_K2}
GRID_ALPHAS = [Fraction(1, 10), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(9, 10)]
GRID = [(name, a) for name in GRID_SEQS for a in GRID_ALPHAS]
TOL = Fraction(1, 10**6)


@pytest.fixture
def report(capsys):
    def emit(number, failures, extra=""):
        status = "PASS" if not failures else "FAIL"
        line = f"ACCEPTANCE {number}: {status}" + (f" {extra}" if extra else "")
        if failures:
            line += " | " + "; ".join(failures[:6])
        with capsys.disabled():
            print("\n" + line)
        assert not failures, line

    return emit


def test_criterion_1_exact_quotients(report):
    start = time.perf_counter()
    failures = []
    want = {2: Fraction(1, 3), 3: Fraction(3, 7), 4: Fraction(11, 23), 5: Fraction(32779, 65559)}
    oracle = exact_quotients(lambda k: 2, Fraction(1, 2), 5)
    if any(oracle[n - 1] != w for n, w in want.items()):
        failures.append("hand recursion disagrees with frozen values")
    exact = dimension_trace(layer_recursion(SYM2, Fraction(1, 2), 5), Fraction(1, 2))
    logged = dimension_trace(layer_recursion(SYM2, Fraction(1, 2), 5, threshold=0), Fraction(1, 2))
    for n, w in want.items():
        if exact.row(n).D_exact != w:
            failures.append(f"exact D_{n} = {exact.row(n).D_exact}")
        if abs(logged.row(n).D - float(w)) >= 1e-12:
            failures.append(f"log-path D_{n} off by {abs(logged.row(n).D - float(w)):.3g}")
    elapsed = time.perf_counter() - start
    if elapsed >= 1:
        failures.append(f"runtime {elapsed:.2f}s")
    report(1, failures, f"({elapsed:.2f}s)")


def test_criterion_2_explicit_matches_recursion(report):
    start = time.perf_counter()
    failures = []
    for alpha in (Fraction(1, 2), Fraction(1, 3)):
        layers = explicit_layers(SYM2, alpha, max_points=1 << 16, levels=4)
        params = layer_recursion(SYM2, alpha, 4)
        if len(layers) != 4:
            failures.append(f"alpha={alpha}: only {len(layers)} explicit levels")
            continue
        for i in range(1, 4):
            lay, p = layers[i], params[i]
            gens = [g.images.tolist() for g in lay.k_generators]
            if lay.domain.size <= 256 and [list(o.points) for o in lay.partition.orbits] != naive_orbits(gens, lay.domain.size):
                failures.append(f"alpha={alpha} level {lay.level}: orbits differ from BFS oracle")
            sizes = lay.partition.sizes()
            if (len(sizes), set(sizes)) != (p.c.value, {p.o.value}):
                failures.append(f"alpha={alpha} level {lay.level}: ({len(sizes)}, {set(sizes)}) vs ({p.c.value}, {p.o.value})")
            check_order = lay.level <= 3
            rep = verify_layer(lay, p, previous=layers[i - 1], history=params[: i + 1], check_order=check_order)
            failures += [f"alpha={alpha} level {lay.level} {c.name}" for c in rep.failures()]
        if alpha == Fraction(1, 2):
            h2 = len(enumerate_group(layers[1].h_generators, 4))
            h3 = len(enumerate_group(layers[2].h_generators, 16))
            if (h2, h3) != (2, 8):
                failures.append(f"|H_2|={h2} |H_3|={h3}")
            if expected_order(params[:3]) != 8:
                failures.append("order formula at level 3")
    elapsed = time.perf_counter() - start
    if elapsed >= 30:
        failures.append(f"runtime {elapsed:.1f}s")
    report(2, failures, f"({elapsed:.2f}s)")


def test_criterion_3_alt5(report):
    start = time.perf_counter()
    failures = []
    alpha = Fraction(1, 2)
    layers = explicit_layers(ALT5, alpha, levels=2)
    params = layer_recursion(ALT5, alpha, 3)
    lay = layers[1]
    sizes = lay.partition.sizes()
    if lay.domain.size != 3125 or len(sizes) != 125 or set(sizes) != {25}:
        failures.append(f"{lay.domain.size} points, {len(sizes)} orbits of sizes {set(sizes)}")
    order = len(enumerate_group(lay.h_generators, lay.domain.size))
    if order != 3600:
        failures.append(f"|H_2| = {order}")
    rep = verify_layer(lay, params[1], previous=layers[0], history=params[:2], check_order=True)
    failures += [c.name for c in rep.failures()]
    trace = dimension_trace(params, alpha)
    if (trace.row(2).D_exact, trace.row(3).D_exact) != (Fraction(1, 3), Fraction(1552, 3131)):
        failures.append(f"D_2={trace.row(2).D_exact} D_3={trace.row(3).D_exact}")
    elapsed = time.perf_counter() - start
    if elapsed >= 60:
        failures.append(f"runtime {elapsed:.1f}s")
    report(3, failures, f"({elapsed:.2f}s)")


def _convergence(seq, alpha, prec):
    layers = layer_recursion(seq, alpha, 10, prec=prec)
    trace = dimension_trace(layers, alpha)
    start = trace.first_active_level(layers)
    small = trace.final.residual_upper_log < ExtReal(TOL, prec).ln()
    decreasing, first_bad = trace.residual_strictly_decreasing(start)
    return small, decreasing, first_bad, start, trace


def test_criterion_4_convergence(report):
    failures = []
    slowest = 0.0
    for name, alpha in GRID:
        t0 = time.perf_counter()
        small, decreasing, first_bad, start, trace = _convergence(GRID_SEQS[name], alpha, 256)
        elapsed = time.perf_counter() - t0
        slowest = max(slowest, elapsed)
        # the verdicts must not depend on working precision
        hp = _convergence(GRID_SEQS[name], alpha, 1024)
        if hp[:4] != (small, decreasing, first_bad, start):
            failures.append(f"{name} alpha={alpha}: P=1024 verdict differs")
        if not small:
            failures.append(f"{name} alpha={alpha}: residual at level 10 not below 1e-6")
        if not decreasing:
            r = trace.row(first_bad).residual, trace.row(first_bad + 1).residual
            failures.append(f"{name} alpha={alpha}: r_{first_bad + 1}={r[1]:.5g} >= r_{first_bad}={r[0]:.5g}")
        if elapsed >= 10:
            failures.append(f"{name} alpha={alpha}: runtime {elapsed:.1f}s")
    report(4, failures, f"({len(GRID)} pairs, slowest {slowest:.2f}s)")


def test_criterion_5_limits_and_claims(report):
    failures = []
    for name, alpha in GRID:
        seq = GRID_SEQS[name]
        layers = layer_recursion(seq, alpha, 10)
        rep = claim_diagnostics(layers, seq, alpha, [2], goodness=goodness_check(seq, 11))
        far = [k for k, ok in rep.limits_within(TOL).items() if not ok]
        if far:
            failures.append(f"{name} alpha={alpha}: {far} not within 1e-6")
        bad = rep.claim_failures()
        if bad:
            failures.append(f"{name} alpha={alpha}: {[(c.claim, c.n) for c in bad]}")
        if rep.advisory:
            failures.append(f"{name}: not good")
    report(5, failures, f"({len(GRID)} pairs)")


def test_criterion_6_invariant_selection(report):
    failures = []
    layers = explicit_layers(SYM2, Fraction(1, 2), levels=3)
    params = layer_recursion(SYM2, Fraction(1, 2), 3)
    lay = layers[2]
    naive = lay.partition.union((0, 1))
    if is_invariant(naive, lay.h_generators, lay.domain.size):
        failures.append("first two orbits unexpectedly invariant")
    mins = {lay.partition.orbits[i].min_point for i in lay.selected}
    if mins != {0, 5}:
        failures.append(f"selected min points {sorted(mins)}")
    rep = verify_layer(lay, params[2], previous=layers[1], history=params, check_order=True)
    failures += [c.name for c in rep.failures()]
    report(6, failures)


TRIALS = 10**4


def test_criterion_7_property_suites(report):
    rng = np.random.default_rng(20240607)
    failures = []
    for _ in range(TRIALS):
        n = int(rng.integers(1, 24))
        gens = [Permutation(rng.permutation(n)) for _ in range(int(rng.integers(0, 3)))]
        if rng.random() < 0.5 and gens:
            # bias toward invariant sets so both outcomes are exercised
            pts = set(enumerate_orbit_union(gens, n, rng))
        else:
            pts = {int(x) for x in np.flatnonzero(rng.random(n) < 0.5)}
        if not complement_invariance_agrees(pts, gens, n):
            failures.append(f"complement: n={n} set={sorted(pts)}")
            break
    for _ in range(TRIALS):
        n = int(rng.integers(1, 30))
        g, h = Permutation(rng.permutation(n)), Permutation(rng.permutation(n))
        x = int(rng.integers(0, n))
        if (g * h)[x] != h[g[x]]:
            failures.append(f"right action: n={n}")
            break
    prec = 128
    slack = ExtReal(Fraction(1, 1 << (prec - 16)), prec)
    for _ in range(TRIALS):
        base = int(rng.integers(2, 60))
        e = int(rng.integers(1, 2000))
        exact = mag_pow(base, Magnitude.exact(e), prec=prec)
        logged = mag_pow(base, Magnitude.exact(e), threshold=0, prec=prec)
        a, b = exact.ln(prec), logged.ln(prec)
        if not exact.is_exact or abs(a - b) > abs(a) * slack:
            failures.append(f"exact/log: {base}**{e}")
            break
    for name, seq in GRID_SEQS.items():
        zero = dimension_trace(layer_recursion(seq, 0, 10), 0)
        if any(r.D != 0.0 for r in zero):
            failures.append(f"{name}: alpha=0 gives nonzero D")
        one_layers = layer_recursion(seq, 1, 10)
        one = dimension_trace(one_layers, 1)
        for r in one:
            # residual of alpha=1 is exactly a'_1 / sum a'
            want = one_layers[0].log_order.ln() - r.cum_log_a
            if abs(r.residual_log - want) > max(abs(want), ExtReal(1)) * slack:
                failures.append(f"{name}: alpha=1 D_{r.n}")
                break
    sym2 = exact_quotients(lambda k: 2, Fraction(1), 5)
    got = [r.D_exact for r in dimension_trace(layer_recursion(SYM2, 1, 5), 1)]
    if got != sym2:
        failures.append(f"alpha=1 Sym(2) exact {got} vs {sym2}")
    report(7, failures, f"({TRIALS} trials per random suite)")


def enumerate_orbit_union(gens, n, rng):
    orbits = naive_orbits([g.images.tolist() for g in gens], n)
    pick = rng.random(len(orbits)) < 0.5
    return [x for o, keep in zip(orbits, pick) if keep for x in o]

"""Property tests for the invariants each module promises."""

import math
from fractions import Fraction

import mpmath
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from wreathdim.arithmetic import (
    ExtReal,
    Magnitude,
    floor_mul,
    log_sum_accumulate,
    mag_pow,
    mag_sub_exponent,
)
from wreathdim.construction import layer_recursion, select_invariant_orbit_union
from wreathdim.dimension import dimension_trace
from wreathdim.errors import SelectionInfeasibleError
from wreathdim.permgroup import (
    PermGroup,
    Permutation,
    ProductDomain,
    collapse_top_action,
    complement_invariance_agrees,
    coordinate_subgroup_generators,
    format_cycles,
    is_invariant,
    orbits,
    parse_cycles,
    top_action_generators,
)
from wreathdim.sequences import DegreeFormula, SequenceSpec, goodness_check

SLOW = settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def perms(draw, degree=None):
    n = degree if degree is not None else draw(st.integers(1, 12))
    return Permutation(draw(st.permutations(range(n))))


@st.composite
def perm_family(draw, max_degree=12, max_gens=3):
    n = draw(st.integers(1, max_degree))
    gens = draw(st.lists(perms(n), max_size=max_gens))
    return n, gens


alphas = st.fractions(min_value=0, max_value=1, max_denominator=12)


class TestPermutations:
    @given(st.data())
    def test_right_action_law(self, data):
        n = data.draw(st.integers(1, 15))
        g, h = data.draw(perms(n)), data.draw(perms(n))
        x = data.draw(st.integers(0, n - 1))
        assert (g * h)[x] == h[g[x]]

    @given(st.data())
    def test_group_axioms(self, data):
        n = data.draw(st.integers(1, 10))
        f, g, h = (data.draw(perms(n)) for _ in range(3))
        assert (f * g) * h == f * (g * h)
        assert (g * g.inverse()).is_identity()
        assert g ** g.order() == Permutation.identity(n)

    @given(perms())
    def test_cycle_round_trip(self, g):
        assert Permutation(parse_cycles(format_cycles(g), g.degree)) == g


class TestOrbitProperties:
    @given(perm_family())
    def test_partition(self, fam):
        n, gens = fam
        part = orbits(gens, n)
        seen = sorted(x for o in part.orbits for x in o.points)
        assert seen == list(range(n))
        for o in part.orbits:
            assert is_invariant(o.points, gens, n)
            assert o.min_point == min(o.points)
        assert part.min_points() == sorted(part.min_points())

    @given(perm_family(), st.data())
    def test_complement(self, fam, data):
        n, gens = fam
        points = data.draw(st.sets(st.integers(0, n - 1)))
        assert complement_invariance_agrees(points, gens, n)

    @given(perm_family(max_degree=10), st.data())
    def test_orbit_unions_are_the_invariant_sets(self, fam, data):
        n, gens = fam
        part = orbits(gens, n)
        chosen = data.draw(st.sets(st.integers(0, len(part) - 1)))
        assert is_invariant(part.union(chosen), gens, n)


class TestProductProperties:
    @given(st.integers(2, 3), st.integers(1, 4), st.data())
    def test_top_action_is_a_homomorphism(self, m, d, data):
        dom = ProductDomain(m, d)
        g, h = data.draw(perms(d)), data.draw(perms(d))
        (tg,), (th,), (tgh,) = (top_action_generators(PermGroup(d, [x]), dom) or [Permutation.identity(dom.size)]
                                for x in (g, h, g * h))
        assert tg * th == tgh
        assert collapse_top_action(tg, dom) == g

    @given(st.integers(2, 4), st.integers(1, 4), st.data())
    def test_coordinate_copy_moves_one_digit(self, m, d, data):
        dom = ProductDomain(m, d)
        s = data.draw(perms(m))
        pos = data.draw(st.integers(0, d - 1))
        gens = coordinate_subgroup_generators(PermGroup(m, [s]), pos, dom)
        for g in gens:
            for x in range(dom.size):
                a, b = dom.unrank(x), dom.unrank(g[x])
                assert [i for i in range(d) if a[i] != b[i]] in ([], [pos])
                assert b[pos] == s[a[pos]]


class TestSelectionProperties:
    @given(perm_family(max_degree=12, max_gens=2), st.data())
    def test_invariant_or_certified(self, fam, data):
        n, hgens = fam
        part = orbits([], n)
        count = data.draw(st.integers(0, n))
        try:
            chosen = select_invariant_orbit_union(part, count, hgens)
        except SelectionInfeasibleError as exc:
            sums = {0}
            for s in exc.block_sizes:
                sums |= {t + s for t in sums}
            assert count not in sums
            return
        assert len(chosen) == count
        assert is_invariant(part.union(chosen), hgens, n)


class TestArithmeticProperties:
    @given(st.integers(2, 50), st.integers(0, 4000))
    def test_pow_exact_and_log_agree(self, base, e):
        prec = 128
        exact = mag_pow(base, Magnitude.exact(e), prec=prec)
        logged = mag_pow(base, Magnitude.exact(e), threshold=0, prec=prec)
        assume(e > 0)
        want = ExtReal(base ** e, prec + 32).ln()
        for got in (exact.ln(prec), logged.ln(prec)):
            assert abs(got - want) <= abs(want) * ExtReal(Fraction(1, 1 << (prec - 16)), prec)

    @given(alphas, st.integers(1, 10**30))
    def test_floor_mul_exact(self, alpha, x):
        got = floor_mul(alpha, Magnitude.exact(x))
        assert got.value == math.floor(alpha * x)

    @given(st.integers(1, 10**40), st.integers(1, 10**40))
    def test_sub_exponent_exact_vs_log(self, a, b):
        hi, lo = max(a, b), min(a, b)
        assume(hi != lo)
        prec = 160
        logged = mag_sub_exponent(Magnitude.log_of(ExtReal(hi, prec).ln()), Magnitude.log_of(ExtReal(lo, prec).ln()),
                                  prec=prec)
        want = ExtReal(hi - lo, prec + 32).ln()
        # cancellation amplifies the input rounding by hi / (hi - lo)
        cond = ExtReal(Fraction(hi, hi - lo), prec)
        tol = max(abs(want), ExtReal(1, prec)) * cond * ExtReal(Fraction(1, 1 << (prec - 40)), prec)
        assert abs(logged.ln(prec) - want) <= tol

    @given(st.lists(st.floats(-300, 300), min_size=1, max_size=12))
    def test_log_sum_matches_mpmath(self, xs):
        acc = None
        for x in xs:
            acc = log_sum_accumulate(acc, ExtReal(x, 128))
        with mpmath.workprec(200):
            want = mpmath.log(mpmath.fsum(mpmath.exp(mpmath.mpf(x)) for x in xs))
            assert abs(mpmath.mpf(float(acc)) - want) <= 1e-15 * max(1, abs(want))


class TestRecursionProperties:
    seqs = st.sampled_from([SequenceSpec.constant("sym", 2), SequenceSpec.constant("alt", 5),
                            SequenceSpec.constant("cyc", 3), SequenceSpec.family_formula("sym", "k+2"),
                            SequenceSpec.family_formula("cyc", "2*k")])

    @SLOW
    @given(seqs, alphas, st.integers(1, 10))
    def test_product_and_quotient_bounds(self, seq, alpha, levels):
        layers = layer_recursion(seq, alpha, levels)
        assert all(p.check_product() for p in layers)
        trace = dimension_trace(layers, alpha)
        ln_alpha = ExtReal(alpha, trace.prec).ln() if alpha else None
        for r in trace:
            assert 0.0 <= r.D <= 1.0
            if r.log_b is not None:
                slack = ExtReal(Fraction(1, 1 << (trace.prec - 16)), trace.prec) * abs(ln_alpha + r.log_a)
                assert r.log_b <= ln_alpha + r.log_a + slack

    @SLOW
    @given(seqs, st.integers(2, 8))
    def test_endpoints(self, seq, levels):
        assert all(r.D == 0.0 for r in dimension_trace(layer_recursion(seq, 0, levels), 0))
        layers = layer_recursion(seq, 1, levels)
        for p in layers[1:]:
            assert p.c.is_exact and p.c.value == 1
        trace = dimension_trace(layers, 1)
        for r in trace:
            # residual is exactly the a'_1 share
            want = layers[0].log_order.ln() - r.cum_log_a
            assert abs(r.residual_log - want) <= ExtReal(Fraction(1, 1 << 200)) * max(abs(want), ExtReal(1))

    @SLOW
    @given(st.integers(2, 6), alphas)
    def test_constant_exact_quotient_from_exponents(self, m, alpha):
        seq = SequenceSpec.constant("sym", m)
        trace = dimension_trace(layer_recursion(seq, alpha, 3), alpha)
        for r in trace:
            assert r.D_exact is not None
            assert math.isclose(r.D, float(r.D_exact), rel_tol=1e-14, abs_tol=1e-300)


class TestSequenceProperties:
    @given(st.sampled_from(["symmetric", "alternating", "cyclic"]), st.integers(3, 40), st.integers(2, 20))
    def test_constant_sequences_have_A_one(self, family, degree, horizon):
        rep = goodness_check(SequenceSpec.constant(family, degree), horizon)
        assert rep.is_good and rep.A == 1

    @given(st.integers(0, 3), st.integers(0, 3), st.integers(1, 2), st.integers(1, 30))
    def test_monotone_formulas_do_not_decrease(self, a, b, p, k):
        f = DegreeFormula(f"{a + 2} + {b} * k ** {p}")
        assert f.is_monotone
        assert f(k) <= f(k + 1)

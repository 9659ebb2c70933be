"""The layered construction: orbit-count recursion and explicit groups.

For each level ``n`` the group ``K_n`` is a product of coordinate copies of
``S_n``; its orbits on the product domain all have size ``o_n`` and there
are ``c_n`` of them.  A union of ``floor(alpha * c_n)`` orbits, invariant
under ``H_n``, chooses the coordinates that ``K_{n+1}`` acts on, and
``H_{n+1}`` is generated by the top action of ``H_n`` together with
``K_{n+1}``.

Notation used in field names: ``mtilde`` is the size of the level-``n``
product domain (``m_1``, then ``m_{n+1} ** mtilde_n``), ``e_n`` is the
number of coordinates ``K_n`` acts on, ``floor_count`` is
``floor(alpha * c_n)`` and ``floor_ratio`` is ``floor_count / c_n``.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arithmetic import (
    DEFAULT_PRECISION,
    DEFAULT_THRESHOLD,
    ExtReal,
    Magnitude,
    floor_mul,
    mag_pow,
    mag_scale,
    mag_sub_exponent,
)
from .errors import CapacityError, DomainError, InconsistencyError, SelectionInfeasibleError
from .permgroup import (
    DEFAULT_ENUMERATION_CAP,
    DEFAULT_MAX_POINTS,
    OrbitPartition,
    Permutation,
    PermGroup,
    ProductDomain,
    collapse_top_action,
    coordinate_subgroup_generators,
    enumerate_group,
    format_cycles,
    is_invariant,
    moved_coordinates,
    orbits,
    top_action_generators,
)
from .sequences import SequenceSpec, group_order, log_order, standard_generators

# exact |S_n| is kept for the order check only
_ORDER_DEGREE_LIMIT = 1000


def _check_alpha(alpha) -> Fraction:
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha


@dataclass(frozen=True)
class LayerParams:
    level: int
    m: int
    log_order: ExtReal
    order: int | None
    mtilde_prev: Magnitude
    mtilde: Magnitude
    e: Magnitude | None
    c: Magnitude
    o: Magnitude
    floor_count: Magnitude
    # floor_count / c when c is exact; None means alpha is used in its place
    floor_ratio: Fraction | None
    # ln of an upper bound on alpha - floor_count/c when floor_ratio is None
    gap_log: ExtReal | None
    prec: int

    @property
    def exact(self) -> bool:
        return self.mtilde.is_exact and self.c.is_exact and self.o.is_exact

    def check_product(self) -> bool:
        """``c * o == mtilde``; bit-exact or within ``2**-(prec-16)`` in the logarithm."""
        if self.exact:
            return self.c.value * self.o.value == self.mtilde.value
        lhs = self.c.ln(self.prec) + self.o.ln(self.prec) if not self.o.is_zero() else None
        rhs = self.mtilde.ln(self.prec)
        if lhs is None:
            return False
        if rhs.is_zero():
            return lhs.is_zero()
        slack = ExtReal(Fraction(1, 1 << (self.prec - 16)), self.prec)
        if lhs.height or rhs.height:
            return lhs.height == rhs.height and abs(lhs.top - rhs.top) <= abs(rhs.top) * slack
        return abs(lhs - rhs) <= abs(rhs) * slack


def layer_recursion(seq: SequenceSpec, alpha, levels: int, *, prec: int = DEFAULT_PRECISION,
                    threshold: int = DEFAULT_THRESHOLD,
                    order_cap: int = DEFAULT_ENUMERATION_CAP) -> list[LayerParams]:
    """Orbit parameters for levels ``1..levels``.

    Starts from ``c_1 = m_1``, ``o_1 = 1``.  Quantities stay exact integers
    while they fit the promotion threshold and continue as logarithms after.
    """
    alpha = _check_alpha(alpha)
    if levels < 1:
        raise DomainError(f"need at least one level, got {levels}")
    out: list[LayerParams] = []
    spec = seq.level(1)
    m = spec.degree
    c = Magnitude.exact(m)
    o = Magnitude.exact(1)
    mtilde = Magnitude.exact(m)
    out.append(_params(1, spec, alpha, Magnitude.exact(1), mtilde, None, c, o, prec, threshold, order_cap))
    for n in range(2, levels + 1):
        prev = out[-1]
        spec = seq.level(n)
        m = spec.degree
        mt_prev = prev.mtilde
        mtilde = mag_pow(m, mt_prev, threshold=threshold, prec=prec)
        if mt_prev.is_exact and prev.c.is_exact and prev.o.is_exact:
            e = Magnitude.exact(prev.floor_count.value * prev.o.value)
            rest = mag_sub_exponent(mt_prev, e, prec=prec)
            c = mag_pow(m, rest, threshold=threshold, prec=prec)
            o = mag_pow(m, e, threshold=threshold, prec=prec)
        else:
            # scale ln(mtilde) rather than subtracting tower-sized exponents
            beta = prev.floor_ratio if prev.floor_ratio is not None else alpha
            e = mag_scale(mt_prev, beta, threshold=threshold, prec=prec)
            log_mt = mtilde.ln(prec)
            c = Magnitude.log_of(log_mt * (1 - beta)) if beta < 1 else Magnitude.exact(1)
            o = Magnitude.log_of(log_mt * beta) if beta > 0 else Magnitude.exact(1)
        out.append(_params(n, spec, alpha, mt_prev, mtilde, e, c, o, prec, threshold, order_cap))
    return out


def _params(n, spec, alpha, mt_prev, mtilde, e, c, o, prec, threshold, order_cap) -> LayerParams:
    floor_count = floor_mul(alpha, c, prec=prec)
    if c.is_exact:
        ratio = Fraction(floor_count.value, c.value)
        gap = None
    else:
        ratio = None
        gap = None if alpha.denominator == 1 else -c.ln(prec)
    try:
        order = group_order(spec, order_cap) if spec.degree <= _ORDER_DEGREE_LIMIT else None
    except CapacityError:
        order = None
    return LayerParams(n, spec.degree, log_order(spec, prec, order_cap), order, mt_prev, mtilde, e, c, o,
                       floor_count, ratio, gap, prec)


# -- explicit groups ----------------------------------------------------------


@dataclass(frozen=True)
class ExplicitLayer:
    level: int
    domain: ProductDomain
    group: PermGroup
    k_generators: tuple[Permutation, ...]
    h_generators: tuple[Permutation, ...]
    # the first top_count entries of h_generators come from the previous level
    top_count: int
    partition: OrbitPartition
    selected: tuple[int, ...]
    selected_points: tuple[int, ...]

    @property
    def c(self) -> int:
        return len(self.partition)

    def to_text(self) -> str:
        lines = [f"level {self.level}", f"points {self.domain.size} = {self.domain.m}^{self.domain.d}"]
        lines.append("K generators:")
        lines += ["  " + format_cycles(g) for g in self.k_generators] or ["  ()"]
        lines.append("H generators:")
        lines += ["  " + format_cycles(g) for g in self.h_generators] or ["  ()"]
        lines.append(f"orbits {len(self.partition)} of sizes {sorted(set(self.partition.sizes()))}")
        lines.append("selected orbits " + " ".join(map(str, self.selected)))
        lines.append("selected min points " + " ".join(str(self.partition.orbits[i].min_point) for i in self.selected))
        return "\n".join(lines) + "\n"


class ExplicitLayers(list):
    """Explicit layers in level order; ``truncated_at`` is the first level not built."""

    def __init__(self, layers=(), truncated_at: int | None = None):
        super().__init__(layers)
        self.truncated_at = truncated_at

    @property
    def truncated(self) -> bool:
        return self.truncated_at is not None


def induced_label_action(partition: OrbitPartition, generators: Sequence[Permutation]) -> list[Permutation]:
    """Action of ``generators`` on orbit indices.

    Requires every generator to map orbits onto orbits.
    """
    labels = partition.orbit_of
    reps = np.array(partition.min_points(), dtype=np.int64)
    out = []
    for g in generators:
        image_labels = labels[g.images.astype(np.int64)]
        if not np.array_equal(image_labels, image_labels[np.asarray(reps)][labels]):
            raise InconsistencyError("generator does not permute the orbits")
        out.append(Permutation(image_labels[reps]))
    return out


def label_blocks(partition: OrbitPartition, generators: Sequence[Permutation]) -> list[tuple[int, ...]]:
    """Orbits of the induced action on orbit indices, each sorted, in order of least index."""
    induced = induced_label_action(partition, generators)
    return [o.points for o in orbits(induced, len(partition)).orbits]


def select_invariant_orbit_union(partition: OrbitPartition, count: int,
                                 h_generators: Sequence[Permutation], *, level: int | None = None) -> tuple[int, ...]:
    """Canonical invariant union of exactly ``count`` orbits.

    Blocks (orbits of ``h_generators`` on orbit indices) are taken greedily in
    order of least point, skipping a block only when the remainder could not
    otherwise be completed; a suffix subset-sum table makes this the first
    feasible choice in that order.
    """
    if count < 0 or count > len(partition):
        raise DomainError(f"cannot select {count} of {len(partition)} orbits")
    if count == 0:
        return ()
    blocks = label_blocks(partition, h_generators)
    sizes = [len(b) for b in blocks]
    mask = (1 << (count + 1)) - 1
    reach = [0] * (len(blocks) + 1)
    reach[-1] = 1
    for i in range(len(blocks) - 1, -1, -1):
        reach[i] = (reach[i + 1] | (reach[i + 1] << sizes[i])) & mask
    if not (reach[0] >> count) & 1:
        raise SelectionInfeasibleError(count, sizes, level)
    chosen: list[int] = []
    need = count
    for i, block in enumerate(blocks):
        if need == 0:
            break
        if sizes[i] <= need and (reach[i + 1] >> (need - sizes[i])) & 1:
            chosen.extend(block)
            need -= sizes[i]
    return tuple(sorted(chosen))


def _floor_times(alpha: Fraction, n: int) -> int:
    return alpha.numerator * n // alpha.denominator


def explicit_layers(seq: SequenceSpec, alpha, max_points: int = DEFAULT_MAX_POINTS, *,
                    levels: int | None = None) -> ExplicitLayers:
    """Build ``K_n`` and ``H_n`` as permutation groups while the domain fits ``max_points``.

    Level 1 is the trivial group on ``m_1`` points whose selected union is the
    first ``floor(alpha * m_1)`` points.
    """
    alpha = _check_alpha(alpha)
    spec = seq.level(1)
    try:
        domain = ProductDomain(spec.degree, 1, max_points)
    except CapacityError:
        return ExplicitLayers([], truncated_at=1)
    part = orbits([], domain.size)
    count = _floor_times(alpha, len(part))
    layer = ExplicitLayer(1, domain, standard_generators(spec), (), (), 0, part,
                          tuple(range(count)), tuple(range(count)))
    out = ExplicitLayers([layer])
    n = 1
    while levels is None or n < levels:
        n += 1
        prev = out[-1]
        spec = seq.level(n)
        try:
            domain = ProductDomain(spec.degree, prev.domain.size, max_points)
        except CapacityError:
            out.truncated_at = n
            break
        group = standard_generators(spec)
        k_gens: list[Permutation] = []
        for pos in prev.selected_points:
            k_gens.extend(coordinate_subgroup_generators(group, pos, domain))
        top = top_action_generators(PermGroup(prev.domain.size, prev.h_generators), domain) if prev.h_generators else []
        h_gens = tuple(top) + tuple(k_gens)
        part = orbits(k_gens, domain.size)
        count = _floor_times(alpha, len(part))
        selected = select_invariant_orbit_union(part, count, h_gens, level=n)
        points = tuple(sorted(part.union(selected)))
        out.append(ExplicitLayer(n, domain, group, tuple(k_gens), h_gens, len(top), part, selected, points))
    return out


# -- verification -------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    level: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(CheckResult(name, bool(passed), detail))

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def lines(self) -> list[str]:
        return [f"level {self.level} {c.name}: {'PASS' if c.passed else 'FAIL'}" + (f" ({c.detail})" if c.detail else "")
                for c in self.checks]


def expected_order(history: Sequence[LayerParams]) -> int:
    """``prod_{j>=2} |S_j| ** e_j`` over the given levels."""
    total = 1
    for p in history[1:]:
        if p.order is None or p.e is None or not p.e.is_exact:
            raise CapacityError(f"order of level {p.level} is not available exactly")
        total *= p.order ** p.e.value
    return total


def verify_layer(explicit: ExplicitLayer, params: LayerParams, *, previous: ExplicitLayer | None = None,
                 history: Sequence[LayerParams] | None = None, check_order: bool = False,
                 order_cap: int = DEFAULT_ENUMERATION_CAP) -> VerificationReport:
    """Check an explicit layer against the recursion.

    ``previous`` enables the normalization and projection checks;
    ``history`` (levels ``1..n``) with ``check_order`` enables the order check.
    """
    if explicit.level != params.level:
        raise DomainError(f"level mismatch: explicit {explicit.level}, params {params.level}")
    rep = VerificationReport(explicit.level)
    if not params.exact:
        rep.add("orbits", False, "recursion values are not exact at this level")
        return rep
    c, o, mt = params.c.value, params.o.value, params.mtilde.value
    sizes = explicit.partition.sizes()
    bad = sorted({s for s in sizes if s != o})
    rep.add("orbits", len(sizes) == c and not bad,
            f"{len(sizes)} orbits (expected {c}), sizes {bad or [o]} (expected {o})")
    rep.add("product", c * o == mt and explicit.domain.size == mt, f"{c} * {o} = {c * o}, points {explicit.domain.size}")
    inv = is_invariant(explicit.selected_points, explicit.h_generators, explicit.domain.size)
    rep.add("invariance", inv, f"union of orbits {list(explicit.selected)[:12]}")
    want = params.floor_count.value
    rep.add("selection", len(explicit.selected) == want and len(explicit.selected_points) == want * o,
            f"{len(explicit.selected)} orbits selected (expected {want})")
    if check_order and history is not None:
        try:
            predicted = expected_order(history)
            actual = len(enumerate_group(explicit.h_generators, explicit.domain.size, order_cap))
            rep.add("order", actual == predicted, f"|H| = {actual}, formula {predicted}")
        except CapacityError as exc:
            rep.add("order", False, str(exc))
    if previous is not None and explicit.level >= 2:
        allowed = set(previous.selected_points)
        stray = []
        for h in explicit.h_generators:
            for k in explicit.k_generators:
                moved = moved_coordinates(k.conjugate(h), explicit.domain)
                if not moved <= allowed:
                    stray.append(sorted(moved - allowed)[:4])
        rep.add("normalization", not stray, f"{len(stray)} conjugates leave the selected coordinates" if stray else "")
        prev_gens = list(previous.h_generators)
        tops = explicit.h_generators[: explicit.top_count]
        collapsed = [collapse_top_action(t, explicit.domain) for t in tops]
        rep.add("projection", collapsed == prev_gens, f"{len(tops)} top generators")
    return rep

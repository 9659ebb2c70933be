"""Sequences of transitive permutation groups and the goodness condition.

A sequence is a non-empty prefix of explicit levels followed by a tail rule:
either the last level repeats forever, or level ``k`` is a named family whose
degree is an integer expression in ``k`` (levels are numbered from 1).
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import mpmath
import yaml

from .arithmetic import DEFAULT_PRECISION, ExtReal
from .errors import CapacityError, ValidationError
from .permgroup import DEFAULT_ENUMERATION_CAP, PermGroup, enumerate_group

FAMILIES = ("symmetric", "alternating", "cyclic", "custom")
_ALIASES = {"sym": "symmetric", "alt": "alternating", "cyc": "cyclic", "s": "symmetric",
            "a": "alternating", "c": "cyclic"}

# exact factorials up to here, log-gamma beyond
_FACTORIAL_LIMIT = 20000
# resolution of the reported goodness constant
_A_DENOMINATOR = 1 << 64


def normalize_family(name: str) -> str:
    key = str(name).strip().lower()
    key = _ALIASES.get(key, key)
    if key not in FAMILIES:
        raise ValidationError(f"unknown family {name!r}; expected one of {', '.join(FAMILIES)}")
    return key


@dataclass(frozen=True)
class PermGroupSpec:
    family: str
    degree: int
    generators: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "family", normalize_family(self.family))
        if isinstance(self.degree, bool) or not isinstance(self.degree, int):
            raise ValidationError(f"degree must be an integer, got {self.degree!r}")
        if self.degree < 2:
            raise ValidationError(f"degree must be at least 2, got {self.degree}")
        if self.family == "alternating" and self.degree < 3:
            raise ValidationError("alternating groups need degree at least 3")
        if self.family == "custom":
            if not self.generators:
                raise ValidationError("custom level needs at least one generator")
            object.__setattr__(self, "generators", tuple(self.generators))
        elif self.generators:
            raise ValidationError(f"generators are only accepted for custom levels, not {self.family}")

    def label(self) -> str:
        short = {"symmetric": "Sym", "alternating": "Alt", "cyclic": "Cyc", "custom": "Custom"}[self.family]
        return f"{short}({self.degree})"


def _cycle(points) -> str:
    return "(" + " ".join(str(p) for p in points) + ")"


def standard_generators(spec: PermGroupSpec) -> PermGroup:
    """Concrete generators for a level; custom groups must be transitive."""
    m = spec.degree
    if spec.family == "symmetric":
        cycles = ["(1 2)", _cycle(range(1, m + 1))]
    elif spec.family == "alternating":
        cycles = ["(1 2 3)", _cycle(range(1, m + 1)) if m % 2 else _cycle(range(2, m + 1))]
    elif spec.family == "cyclic":
        cycles = [_cycle(range(1, m + 1))]
    else:
        cycles = list(spec.generators)
    group = PermGroup.from_cycles(m, cycles)
    if not group.is_transitive():
        raise ValidationError(f"{spec.label()} generated by {cycles} is not transitive")
    return group


@lru_cache(maxsize=4096)
def _log_order_cached(spec: PermGroupSpec, prec: int, cap: int) -> ExtReal:
    m = spec.degree
    if spec.family in ("symmetric", "alternating"):
        if m <= _FACTORIAL_LIMIT:
            order = math.factorial(m)
            if spec.family == "alternating":
                order //= 2
            return ExtReal(order, prec + 16).ln().with_prec(prec)
        with mpmath.workprec(prec + 16):
            value = mpmath.loggamma(m + 1)
            if spec.family == "alternating":
                value -= mpmath.log(2)
            return ExtReal._from_mpf(value._mpf_, prec + 16).with_prec(prec)
    if spec.family == "cyclic":
        return ExtReal(m, prec + 16).ln().with_prec(prec)
    group = standard_generators(spec)
    order = len(enumerate_group(group.generators, m, cap))
    if order < 2:
        raise ValidationError(f"{spec.label()} is trivial")
    return ExtReal(order, prec + 16).ln().with_prec(prec)


def log_order(spec: PermGroupSpec, prec: int = DEFAULT_PRECISION, cap: int = DEFAULT_ENUMERATION_CAP) -> ExtReal:
    """Natural log of ``|S|``; custom groups are enumerated under ``cap``."""
    return _log_order_cached(spec, prec, cap)


def group_order(spec: PermGroupSpec, cap: int = DEFAULT_ENUMERATION_CAP) -> int:
    m = spec.degree
    if spec.family == "symmetric":
        return math.factorial(m)
    if spec.family == "alternating":
        return math.factorial(m) // 2
    if spec.family == "cyclic":
        return m
    group = standard_generators(spec)
    return len(enumerate_group(group.generators, m, cap))


# -- degree formulas -------------------------------------------------------

_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.FloorDiv: lambda a, b: a // b,
    ast.Mod: lambda a, b: a % b,
    ast.Pow: lambda a, b: a**b,
}
_MONOTONE_OPS = (ast.Add, ast.Mult, ast.Pow)
_MAX_POW_BITS = 64


@dataclass(frozen=True)
class DegreeFormula:
    """Integer expression in ``k`` built from literals, ``+ - * // % **`` and parentheses."""

    text: str
    _tree: ast.Expression = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        try:
            tree = ast.parse(self.text.strip(), mode="eval")
        except SyntaxError as exc:
            raise ValidationError(f"bad degree formula {self.text!r}: {exc.msg}") from None
        for node in ast.walk(tree):
            if isinstance(node, (ast.Expression, ast.BinOp, ast.UnaryOp, ast.USub, ast.UAdd, ast.Load)):
                continue
            if isinstance(node, tuple(_BINOPS)):
                continue
            if isinstance(node, ast.Constant) and type(node.value) is int:
                continue
            if isinstance(node, ast.Name) and node.id == "k":
                continue
            raise ValidationError(f"unsupported element {type(node).__name__} in degree formula {self.text!r}")
        object.__setattr__(self, "_tree", tree)

    def __call__(self, k: int) -> int:
        value = self._eval(self._tree.body, k)
        return value

    def _eval(self, node, k: int) -> int:
        if isinstance(node, ast.Constant):
            return node.value
        if isinstance(node, ast.Name):
            return k
        if isinstance(node, ast.UnaryOp):
            v = self._eval(node.operand, k)
            return -v if isinstance(node.op, ast.USub) else v
        a, b = self._eval(node.left, k), self._eval(node.right, k)
        if isinstance(node.op, ast.Pow):
            if b < 0:
                raise ValidationError(f"negative exponent in degree formula {self.text!r}")
            if b * max(abs(a), 1).bit_length() > _MAX_POW_BITS:
                raise CapacityError(f"degree formula {self.text!r} overflows at k={k}")
        if isinstance(node.op, (ast.FloorDiv, ast.Mod)) and b == 0:
            raise ValidationError(f"division by zero in degree formula {self.text!r} at k={k}")
        return _BINOPS[type(node.op)](a, b)

    @property
    def is_monotone(self) -> bool:
        """Syntactically non-decreasing in ``k >= 1``: only ``+ * **`` over non-negative literals."""
        for node in ast.walk(self._tree):
            if isinstance(node, ast.BinOp) and not isinstance(node.op, _MONOTONE_OPS):
                return False
            if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
                return False
            if isinstance(node, ast.Constant) and node.value < 0:
                return False
        return True


@dataclass(frozen=True)
class TailRule:
    rule: str = "repeat-last"
    family: str | None = None
    degree_formula: DegreeFormula | None = None

    def __post_init__(self):
        rule = str(self.rule).strip().lower().replace("_", "-")
        if rule in ("repeat", "repeat-last", "constant"):
            rule = "repeat-last"
        elif rule in ("formula", "formula-family", "family"):
            rule = "formula"
        else:
            raise ValidationError(f"unknown tail rule {self.rule!r}")
        object.__setattr__(self, "rule", rule)
        if rule == "formula":
            if self.family is None or self.degree_formula is None:
                raise ValidationError("formula tail needs a family and a degree_formula")
            fam = normalize_family(self.family)
            if fam == "custom":
                raise ValidationError("formula tails take a named family")
            object.__setattr__(self, "family", fam)
            if isinstance(self.degree_formula, str):
                object.__setattr__(self, "degree_formula", DegreeFormula(self.degree_formula))


@dataclass(frozen=True)
class SequenceSpec:
    prefix: tuple[PermGroupSpec, ...]
    tail: TailRule = TailRule()

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        if not self.prefix:
            raise ValidationError("a sequence needs at least one explicit level")
        for spec in self.prefix:
            if spec.family == "custom":
                standard_generators(spec)

    @classmethod
    def constant(cls, family: str, degree: int, generators=()) -> SequenceSpec:
        return cls((PermGroupSpec(family, degree, tuple(generators)),))

    @classmethod
    def family_formula(cls, family: str, formula: str) -> SequenceSpec:
        f = DegreeFormula(formula)
        return cls((PermGroupSpec(family, f(1)),), TailRule("formula", family, f))

    def level(self, k: int) -> PermGroupSpec:
        """The group at level ``k`` (1-based)."""
        if k < 1:
            raise ValidationError(f"levels start at 1, got {k}")
        if k <= len(self.prefix):
            return self.prefix[k - 1]
        if self.tail.rule == "repeat-last":
            return self.prefix[-1]
        degree = self.tail.degree_formula(k)
        if degree < 2:
            raise ValidationError(f"degree formula {self.tail.degree_formula.text!r} gives {degree} < 2 at k={k}")
        return PermGroupSpec(self.tail.family, degree)

    def levels(self, n: int) -> list[PermGroupSpec]:
        return [self.level(k) for k in range(1, n + 1)]

    def degree(self, k: int) -> int:
        return self.level(k).degree

    def is_constant(self) -> bool:
        return self.tail.rule == "repeat-last" and len(set(self.prefix)) == 1

    def describe(self) -> str:
        head = ", ".join(s.label() for s in self.prefix)
        if self.tail.rule == "repeat-last":
            return f"[{head}] then repeat"
        return f"[{head}] then {self.tail.family}({self.tail.degree_formula.text})"


# -- goodness ----------------------------------------------------------------


@dataclass(frozen=True)
class GoodnessReport:
    """``A`` is a dyadic upper bound on the largest observed ``log|S_k| / log|S_{k+1}|``."""

    is_good: bool
    A: Fraction
    M0: int
    counterexample: int | None
    horizon: int
    horizon_limited: bool
    analytic: bool
    ratios: tuple[float, ...] = ()

    def summary(self) -> str:
        verdict = "good" if self.is_good else "not good"
        basis = "analytic" if self.analytic else f"horizon-limited to k<{self.horizon}"
        line = f"{verdict} ({basis}); A={float(self.A):.6g} M0={self.M0}"
        if self.counterexample is not None:
            line += f"; counterexample k={self.counterexample}"
        return line


def _ceil_dyadic(x: Fraction) -> Fraction:
    return Fraction(math.ceil(x * _A_DENOMINATOR), _A_DENOMINATOR)


def goodness_check(seq: SequenceSpec, horizon: int, *, prec: int = DEFAULT_PRECISION,
                   cap: int = DEFAULT_ENUMERATION_CAP) -> GoodnessReport:
    """Decide ``|S_k| <= |S_{k+1}|^A`` for ``k >= M0``.

    Tails that never lower the degree of a fixed named family (or repeat a
    level) are decided analytically: ratios past the prefix are at most 1.
    Other tails are scanned over ``k < horizon``.
    """
    if horizon < 2:
        raise ValidationError(f"horizon must be at least 2, got {horizon}")
    analytic = seq.tail.rule == "repeat-last" or seq.tail.degree_formula.is_monotone
    # ratios beyond the first tail level are <= 1 on analytic tails
    last = len(seq.prefix) + 1 if analytic else horizon
    last = max(last, 2)
    logs = [log_order(seq.level(k), prec, cap) for k in range(1, last + 1)]
    ratios = [(logs[i] / logs[i + 1]).to_fraction() for i in range(last - 1)]
    if analytic:
        worst = max([Fraction(1)] + ratios)
        return GoodnessReport(True, _ceil_dyadic(worst), 1, None, horizon, False, True,
                              tuple(float(r) for r in ratios))
    half = max(1, len(ratios) // 2)
    early = max(ratios[:half])
    counter = next((i + 1 for i in range(half, len(ratios)) if ratios[i] > early), None)
    worst = max(ratios)
    return GoodnessReport(counter is None, _ceil_dyadic(max(worst, Fraction(1))), 1, counter, horizon,
                          True, False, tuple(float(r) for r in ratios))


# -- spec files --------------------------------------------------------------


def _level_from_mapping(entry, where: str) -> PermGroupSpec:
    if not isinstance(entry, dict):
        raise ValidationError(f"{where}: expected a mapping with family/degree")
    unknown = set(entry) - {"family", "degree", "generators"}
    if unknown:
        raise ValidationError(f"{where}: unknown keys {sorted(unknown)}")
    if "family" not in entry or "degree" not in entry:
        raise ValidationError(f"{where}: family and degree are required")
    gens = entry.get("generators") or ()
    if isinstance(gens, str):
        gens = (gens,)
    if not all(isinstance(g, str) for g in gens):
        raise ValidationError(f"{where}: generators must be cycle-notation strings")
    return PermGroupSpec(entry["family"], entry["degree"], tuple(gens))


def parse_sequence_spec(text: str) -> SequenceSpec:
    """Parse a YAML sequence document.

    ::

        levels:
          - {family: symmetric, degree: 50}
          - {family: custom, degree: 4, generators: ["(1 2 3 4)"]}
        tail: {rule: formula, family: alternating, degree_formula: "k + 3"}

    ``tail`` defaults to ``{rule: repeat-last}``.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ValidationError(f"sequence file is not valid YAML: {exc}") from None
    if not isinstance(doc, dict) or "levels" not in doc:
        raise ValidationError("sequence file needs a top-level 'levels' list")
    unknown = set(doc) - {"levels", "tail"}
    if unknown:
        raise ValidationError(f"unknown top-level keys {sorted(unknown)}")
    levels = doc["levels"]
    if not isinstance(levels, list) or not levels:
        raise ValidationError("'levels' must be a non-empty list")
    prefix = tuple(_level_from_mapping(e, f"levels[{i}]") for i, e in enumerate(levels))
    tail_doc = doc.get("tail") or {"rule": "repeat-last"}
    if not isinstance(tail_doc, dict):
        raise ValidationError("'tail' must be a mapping")
    unknown = set(tail_doc) - {"rule", "family", "degree_formula"}
    if unknown:
        raise ValidationError(f"tail: unknown keys {sorted(unknown)}")
    formula = tail_doc.get("degree_formula")
    tail = TailRule(tail_doc.get("rule", "repeat-last"), tail_doc.get("family"),
                    DegreeFormula(str(formula)) if formula is not None else None)
    return SequenceSpec(prefix, tail)


def load_sequence_spec(path: str | Path) -> SequenceSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read sequence file {path}: {exc}") from None
    return parse_sequence_spec(text)


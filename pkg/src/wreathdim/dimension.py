"""Dimension quotients and the asymptotic diagnostics behind their limit.

With ``a'_n = mtilde_{n-1} * ln|S_n|`` (``mtilde_0 = 1``) and
``b_n = floor(alpha c_{n-1}) o_{n-1} ln|S_n| = beta_{n-1} a'_n``, where
``beta_n = floor(alpha c_n) / c_n``, the quotient at level ``n`` is
``D_n = sum_{k=2..n} b_k / sum_{k=1..n} a'_k``.

At tower scale ``D_n`` is indistinguishable from ``alpha`` in any floating
format, so the trace carries the residual ``r_n = alpha - D_n`` as a
logarithm, computed from the non-negative decomposition
``r_n * sum a' = alpha a'_1 + sum_{k>=2} (alpha - beta_{k-1}) a'_k``.
Where ``beta`` is only known to be within ``1/c`` of ``alpha``, the nominal
value ``alpha`` is used and the slack is accumulated into ``error_log``.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .arithmetic import ExtReal, Magnitude, format_ext, log_sum_accumulate, log_to_float
from .construction import LayerParams
from .errors import DomainError, InconsistencyError
from .sequences import GoodnessReport

CSV_COLUMNS = ("n", "m_n", "mtilde_prev", "c_n", "o_n", "floor_term", "log2_b_n", "log2_a_n",
               "D_n", "residual", "error_bound")

# smallest double-friendly log before switching to exp(...) notation
_FLOAT_LOG_FLOOR = -700


def _ln(value, prec: int) -> ExtReal:
    return ExtReal(value, prec + 8).ln().with_prec(prec)


def _slack(prec: int) -> ExtReal:
    return ExtReal(Fraction(1, 1 << (prec - 16)), prec)


def _le(lhs: ExtReal, rhs: ExtReal, prec: int) -> bool:
    """``lhs <= rhs`` for logarithms, allowing relative rounding slack."""
    if lhs <= rhs:
        return True
    if lhs.height or rhs.height:
        return False
    scale = max(abs(rhs), ExtReal(1, prec))
    return lhs - rhs <= scale * _slack(prec)


def _add_logs(*logs: ExtReal | None) -> ExtReal | None:
    acc = None
    for x in logs:
        acc = log_sum_accumulate(acc, x)
    return acc


def format_from_log(ln: ExtReal | None) -> str:
    """Canonical text for ``exp(ln)``: a double when representable, else ``exp(...)``."""
    if ln is None:
        return "0"
    if ln.height == 0 and ln > _FLOAT_LOG_FLOOR and ln < 700:
        return repr(float(ln.exp()))
    return "exp(" + format_ext(ln) + ")"


@dataclass(frozen=True)
class TraceRow:
    n: int
    m: int
    mtilde_prev: Magnitude
    c: Magnitude
    o: Magnitude
    # floor(alpha c_{n-1}); None at level 1
    floor_prev: Magnitude | None
    log_a: ExtReal
    # None when b_n is absent (level 1) or zero
    log_b: ExtReal | None
    cum_log_a: ExtReal
    cum_log_b: ExtReal | None
    residual_log: ExtReal | None
    error_log: ExtReal | None
    D: float
    D_exact: Fraction | None
    prec: int

    @property
    def residual(self) -> float:
        return log_to_float(self.residual_log)

    @property
    def residual_upper_log(self) -> ExtReal | None:
        return _add_logs(self.residual_log, self.error_log)

    @property
    def error_bound(self) -> float:
        return log_to_float(self.error_log)

    def D_from_sums(self) -> float | None:
        """``exp(log sum b - log sum a')``, only where that difference is moderate."""
        if self.cum_log_b is None:
            return 0.0
        if self.cum_log_b.height or self.cum_log_a.height:
            return None
        return log_to_float(self.cum_log_b - self.cum_log_a)

    def csv_row(self, ln2: ExtReal) -> list[str]:
        if self.n == 1:
            floor_term = log2_b = ""
        else:
            floor_term = self.floor_prev.to_repr()
            log2_b = format_ext(self.log_b / ln2) if self.log_b is not None else "-inf"
        return [str(self.n), str(self.m), self.mtilde_prev.to_repr(), self.c.to_repr(), self.o.to_repr(),
                floor_term, log2_b, format_ext(self.log_a / ln2), repr(self.D),
                format_from_log(self.residual_log), format_from_log(self.error_log)]


@dataclass(frozen=True)
class DimensionTrace:
    alpha: Fraction
    rows: tuple[TraceRow, ...]
    prec: int

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, i) -> TraceRow:
        return self.rows[i]

    def row(self, n: int) -> TraceRow:
        return self.rows[n - 1]

    @property
    def final(self) -> TraceRow:
        return self.rows[-1]

    def first_active_level(self, layers: Sequence[LayerParams]) -> int | None:
        """First level with ``floor(alpha c_n) >= 1``."""
        for p in layers:
            if not p.floor_count.is_zero():
                return p.level
        return None

    def residual_strictly_decreasing(self, start: int) -> tuple[bool, int | None]:
        """Certify ``r_{n+1} < r_n`` for all ``n >= start``.

        Uses the upper bound for ``r_{n+1}`` and the nominal (lower) value for
        ``r_n``.  Returns the verdict and the first failing ``n``.
        """
        for n in range(start, len(self.rows)):
            lower = self.rows[n - 1].residual_log
            upper = self.rows[n].residual_upper_log
            if lower is None or (upper is not None and not upper < lower):
                return False, n
        return True, None

    def to_csv(self) -> str:
        ln2 = _ln(2, self.prec)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows:
            writer.writerow(row.csv_row(ln2))
        return buf.getvalue()


def _constant_order(layers: Sequence[LayerParams]) -> bool:
    orders = {p.order for p in layers}
    return len(orders) == 1 and None not in orders


def dimension_trace(layers: Sequence[LayerParams], alpha, seq=None) -> DimensionTrace:
    """Per-level series terms, cumulative sums, ``D_n`` and its residual.

    ``seq`` is accepted for symmetry with the other entry points; the layers
    already carry every quantity needed.
    """
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    if not layers:
        raise DomainError("no layers")
    prec = layers[0].prec
    ln_alpha = _ln(alpha, prec) if alpha else None
    exact_ok = _constant_order(layers)
    rows: list[TraceRow] = []
    cum_a = cum_b = num = err = None
    exp_num = exp_den = 0
    for i, p in enumerate(layers):
        loglog = p.log_order.ln()
        log_a = p.mtilde_prev.ln(prec) + loglog
        cum_a = log_sum_accumulate(cum_a, log_a)
        if i == 0:
            log_b = None
            if alpha:
                num = ln_alpha + log_a
        else:
            q = layers[i - 1]
            if q.floor_ratio is not None:
                beta = q.floor_ratio
                log_b = _ln(beta, prec) + log_a if beta else None
                if alpha - beta:
                    num = log_sum_accumulate(num, _ln(alpha - beta, prec) + log_a)
            else:
                log_b = ln_alpha + log_a if alpha else None
                if q.gap_log is not None:
                    err = log_sum_accumulate(err, q.gap_log + log_a)
            cum_b = log_sum_accumulate(cum_b, log_b)
        residual_log = None if num is None else num - cum_a
        error_log = None if err is None else err - cum_a
        D = float(alpha) - log_to_float(residual_log)
        D = min(max(D, 0.0), 1.0)
        D_exact = None
        if exact_ok and exp_num is not None and p.mtilde_prev.is_exact and (p.e is None or p.e.is_exact):
            exp_den += p.mtilde_prev.value
            exp_num += p.e.value if p.e is not None else 0
            D_exact = Fraction(exp_num, exp_den)
        else:
            exp_num = None
        floor_prev = layers[i - 1].floor_count if i else None
        rows.append(TraceRow(p.level, p.m, p.mtilde_prev, p.c, p.o, floor_prev, log_a, log_b, cum_a, cum_b,
                             residual_log, error_log, D, D_exact, prec))
    return DimensionTrace(alpha, tuple(rows), prec)


def write_trace_csv(trace: DimensionTrace, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(trace.to_csv())


# -- diagnostics --------------------------------------------------------------


def _threshold_scan(logs: Sequence[ExtReal], log_c: ExtReal, start: int, prec: int) -> int:
    """Least ``M >= start`` with ``log_c + logs[k-1] <= logs[k]`` for all computed ``k >= M``.

    ``logs`` is indexed by level (entry 0 unused).  Returns ``len(logs)`` when
    even the last level fails.
    """
    last = len(logs) - 1
    M = last + 1
    for k in range(last, start - 1, -1):
        if _le(log_c + logs[k - 1], logs[k], prec):
            M = k
        else:
            break
    return M


@dataclass(frozen=True)
class GrowthReport:
    horizon: int
    # ln(mtilde_{n-1} / mtilde_n) for n = 2..horizon
    ratio_logs: tuple[ExtReal, ...]
    thresholds: dict
    at_least_level: tuple[bool, ...]

    def ratios(self) -> list[float]:
        return [log_to_float(x) for x in self.ratio_logs]


def growth_diagnostics(layers: Sequence[LayerParams], c_list: Iterable = (2,)) -> GrowthReport:
    """``mtilde_n >= n``, the ratios ``mtilde_{n-1}/mtilde_n`` and thresholds ``M(C)``.

    ``M(C)`` is the least ``M >= 2`` with ``C mtilde_{n-1} <= mtilde_n`` for
    every computed ``n >= M``; it is horizon-limited by construction.
    """
    if len(layers) < 2:
        raise DomainError("growth diagnostics need at least two levels")
    prec = layers[0].prec
    at_least = []
    for p in layers:
        if p.mtilde.is_exact:
            ok = p.mtilde.value >= p.level
        else:
            ok = p.mtilde.ln(prec) >= _ln(p.level, prec)
        if not ok:
            raise InconsistencyError(f"mtilde_{p.level} = {p.mtilde!r} is below {p.level}")
        at_least.append(ok)
    logs = [None] + [p.mtilde.ln(prec) for p in layers]
    ratios = tuple(logs[n - 1] - logs[n] for n in range(2, len(logs)))
    thresholds = {}
    for C in c_list:
        C = Fraction(C)
        if C <= 0:
            raise DomainError(f"constants must be positive, got {C}")
        exact = all(p.mtilde.is_exact for p in layers)
        if exact:
            vals = [None] + [p.mtilde.value for p in layers]
            M = len(vals)
            for n in range(len(vals) - 1, 1, -1):
                if C * vals[n - 1] <= vals[n]:
                    M = n
                else:
                    break
        else:
            M = _threshold_scan(logs, _ln(C, prec), 2, prec)
        thresholds[C] = M
    return GrowthReport(len(layers), ratios, thresholds, tuple(at_least))


@dataclass(frozen=True)
class DiagnosticRow:
    n: int
    # floor(alpha c_n) o_n / mtilde_n and ln of a bound on its distance to alpha
    beta: float
    beta_dev_log: ExtReal | None
    # ln(mtilde_{n-1}/mtilde_n), ln(a_{n-1}/a_n)
    mtilde_ratio_log: ExtReal | None
    a_ratio_log: ExtReal | None
    # ln(sum_{k=2..n} a_k / a_n - 1) and ln(sum_{k=2..n} b_k / b_n - 1)
    a_excess_log: ExtReal | None
    b_excess_log: ExtReal | None
    # whether b_n > 0, so that the b ratio is defined
    b_defined: bool

    @property
    def a_sum_ratio(self) -> float:
        return 1.0 + log_to_float(self.a_excess_log)

    @property
    def b_sum_ratio(self) -> float | None:
        return 1.0 + log_to_float(self.b_excess_log) if self.b_defined else None


@dataclass(frozen=True)
class ClaimCheck:
    claim: str
    n: int
    passed: bool


@dataclass
class DiagnosticsReport:
    alpha: Fraction
    horizon: int
    rows: list[DiagnosticRow]
    thresholds: dict
    M2: int
    M_hat: int
    growth: GrowthReport
    claims: list[ClaimCheck] = field(default_factory=list)
    goodness: GoodnessReport | None = None
    prec: int = 256

    @property
    def advisory(self) -> bool:
        """Diagnostics on a sequence not known to be good prove nothing."""
        return self.goodness is not None and not self.goodness.is_good

    @property
    def horizon_limited(self) -> bool:
        return True

    def claims_pass(self) -> bool:
        return all(c.passed for c in self.claims)

    def claim_failures(self) -> list[ClaimCheck]:
        return [c for c in self.claims if not c.passed]

    def limit_distances(self) -> dict[str, ExtReal | None]:
        """ln of the distance of each limit sequence to its limit at the last level."""
        last = self.rows[-1]
        return {
            "floor_ratio": last.beta_dev_log,
            "a_sum_ratio": last.a_excess_log,
            "b_sum_ratio": last.b_excess_log,
            "a_ratio": last.a_ratio_log,
        }

    def limits_within(self, tol) -> dict[str, bool]:
        log_tol = _ln(Fraction(tol), self.prec)
        out = {}
        for name, ln in self.limit_distances().items():
            if name == "b_sum_ratio" and not self.rows[-1].b_defined:
                out[name] = False
                continue
            out[name] = ln is None or ln < log_tol
        return out


def claim_diagnostics(layers: Sequence[LayerParams], seq, alpha, c_list: Iterable = (2,), *,
                      goodness: GoodnessReport | None = None) -> DiagnosticsReport:
    """Threshold constants, the three growth claims and the limit sequences.

    Checked inequalities: ``C a_{k-1} <= a_k`` for ``k >= M(C)``;
    ``sum_{k=M(2)..n} a_k <= 2 a_n`` for ``n >= M(2)``; and
    ``sum_{k=2..n} a_k <= 3 a_n`` for ``n >= max(M(2)+1, M(M(2)))``.  Here
    ``a_k = alpha a'_k`` with ``a_1 = alpha ln|S_1|``; the factor ``alpha``
    cancels from every inequality.  Thresholds are scanned over ``k >= 2``.
    """
    alpha = Fraction(alpha)
    if len(layers) < 2:
        raise DomainError("claim diagnostics need at least two levels")
    prec = layers[0].prec
    N = len(layers)
    growth = growth_diagnostics(layers, c_list)
    loga = [None] + [p.mtilde_prev.ln(prec) + p.log_order.ln() for p in layers]
    c_values = [Fraction(C) for C in c_list]
    thresholds = {C: _threshold_scan(loga, _ln(C, prec), 2, prec) for C in c_values}
    M2 = thresholds.get(Fraction(2)) or _threshold_scan(loga, _ln(2, prec), 2, prec)
    thresholds.setdefault(Fraction(2), M2)
    M_of_M2 = _threshold_scan(loga, _ln(M2, prec), 2, prec)
    thresholds.setdefault(Fraction(M2), M_of_M2)
    M_hat = max(M2 + 1, M_of_M2)

    claims: list[ClaimCheck] = []
    for C in c_values:
        lc = _ln(C, prec)
        for k in range(max(thresholds[C], 2), N + 1):
            claims.append(ClaimCheck(f"ak[C={C}]", k, _le(lc + loga[k - 1], loga[k], prec)))
    ln2, ln3 = _ln(2, prec), _ln(3, prec)
    acc = None
    for n in range(M2, N + 1):
        acc = log_sum_accumulate(acc, loga[n])
        claims.append(ClaimCheck("sum_from_M2<=2a", n, _le(acc, ln2 + loga[n], prec)))
    acc = None
    for n in range(2, N + 1):
        acc = log_sum_accumulate(acc, loga[n])
        if n >= M_hat:
            claims.append(ClaimCheck("sum_from_2<=3a", n, _le(acc, ln3 + loga[n], prec)))

    # limit sequences
    ln_alpha = _ln(alpha, prec) if alpha else None
    rows: list[DiagnosticRow] = []
    sum_a = sum_b = None
    for i, p in enumerate(layers):
        n = p.level
        if p.floor_ratio is not None:
            beta = float(p.floor_ratio)
            dev = alpha - p.floor_ratio
            dev_log = _ln(dev, prec) if dev else None
        else:
            beta = float(alpha)
            dev_log = p.gap_log
        mt_ratio = growth.ratio_logs[i - 1] if i else None
        a_ratio = loga[n - 1] - loga[n] if n >= 2 else None
        a_excess = None if sum_a is None else sum_a - loga[n]
        b_log = b_low = None
        if n >= 2 and alpha:
            q = layers[i - 1]
            if q.floor_ratio is not None:
                if q.floor_ratio:
                    b_log = b_low = _ln(q.floor_ratio, prec) + loga[n]
            else:
                b_log = b_low = ln_alpha + loga[n]
                if q.gap_log is not None:
                    rel = q.gap_log - ln_alpha
                    if rel.height == 0 and rel > -(prec + 8):
                        b_low = b_log + (-rel.exp()).log1p()
        b_excess = None if (sum_b is None or b_low is None) else sum_b - b_low
        rows.append(DiagnosticRow(n, beta, dev_log, mt_ratio, a_ratio, a_excess, b_excess, b_low is not None))
        if n >= 2:
            sum_a = log_sum_accumulate(sum_a, loga[n])
            sum_b = log_sum_accumulate(sum_b, b_log)
    return DiagnosticsReport(alpha, N, rows, thresholds, M2, M_hat, growth, claims, goodness, prec)


def format_diagnostics(report: DiagnosticsReport) -> str:
    lines = []
    if report.goodness is not None:
        lines.append("goodness: " + report.goodness.summary())
        if report.advisory:
            lines.append("advisory: sequence not known to be good; limits are not promised")
    lines.append(f"horizon {report.horizon} (all thresholds are horizon-limited)")
    for C, M in sorted(report.thresholds.items()):
        lines.append(f"M({C}) = {M}")
    lines.append(f"M(2) = {report.M2}, M_hat = {report.M_hat}")
    lines.append("n,floor_ratio,floor_ratio_dev,mtilde_ratio,a_ratio,a_sum_ratio,b_sum_ratio")
    for r in report.rows:
        lines.append(",".join([
            str(r.n), repr(r.beta), format_from_log(r.beta_dev_log),
            format_from_log(r.mtilde_ratio_log) if r.mtilde_ratio_log is not None else "",
            format_from_log(r.a_ratio_log) if r.a_ratio_log is not None else "",
            "1+" + format_from_log(r.a_excess_log) if r.n >= 2 else "",
            ("1+" + format_from_log(r.b_excess_log)) if r.b_defined else "",
        ]))
    failures = report.claim_failures()
    lines.append(f"claims: {len(report.claims) - len(failures)}/{len(report.claims)} pass")
    for c in failures:
        lines.append(f"  FAIL {c.claim} at n={c.n}")
    return "\n".join(lines) + "\n"

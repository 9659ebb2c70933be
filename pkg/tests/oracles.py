"""Independent reference implementations used to freeze expected values.

Nothing here imports the package under test except for type plumbing in
the callers; every routine is a direct, slow transcription.
"""

from __future__ import annotations

import itertools
from collections import deque
from fractions import Fraction
from math import factorial

import mpmath


def recursion(degrees, alpha: Fraction, levels: int):
    """Plain-integer orbit recursion: rows (m, mtilde_prev, mtilde, c, o, e)."""
    rows = []
    m = degrees(1)
    rows.append(dict(m=m, mt_prev=1, mt=m, c=m, o=1, e=None))
    for n in range(2, levels + 1):
        prev = rows[-1]
        m = degrees(n)
        e = (alpha.numerator * prev["c"] // alpha.denominator) * prev["o"]
        rows.append(dict(m=m, mt_prev=prev["mt"], mt=m ** prev["mt"], c=m ** (prev["mt"] - e), o=m**e, e=e))
    return rows


def exact_quotients(degrees, alpha: Fraction, levels: int):
    """D_n as Fractions for sequences whose groups all have the same order."""
    rows = recursion(degrees, alpha, levels)
    out, num, den = [], 0, 0
    for r in rows:
        den += r["mt_prev"]
        num += r["e"] or 0
        out.append(Fraction(num, den))
    return out


def quotients_mp(degrees, orders, alpha: Fraction, levels: int, dps: int = 60):
    """D_n at high decimal precision from exact exponents (small levels only)."""
    rows = recursion(degrees, alpha, levels)
    out = []
    with mpmath.workdps(dps):
        num = den = mpmath.mpf(0)
        for n, r in enumerate(rows, start=1):
            lg = mpmath.log(orders(n))
            den += r["mt_prev"] * lg
            num += (r["e"] or 0) * lg
            out.append(num / den)
    return out


def sym_order(m):
    return factorial(m)


def alt_order(m):
    return factorial(m) // 2


def compose(g, h):
    """First g, then h."""
    return tuple(h[g[x]] for x in range(len(g)))


def naive_coordinate(perm, position, m, d):
    pts = list(itertools.product(range(m), repeat=d))
    index = {p: i for i, p in enumerate(pts)}
    out = []
    for p in pts:
        q = list(p)
        q[position] = perm[p[position]]
        out.append(index[tuple(q)])
    return out


def naive_top(h, m, d):
    pts = list(itertools.product(range(m), repeat=d))
    index = {p: i for i, p in enumerate(pts)}
    out = []
    for p in pts:
        q = [None] * d
        for i in range(d):
            q[h[i]] = p[i]
        out.append(index[tuple(q)])
    return out


def naive_orbits(gens, degree):
    seen = [False] * degree
    result = []
    for start in range(degree):
        if seen[start]:
            continue
        orb = {start}
        queue = deque([start])
        seen[start] = True
        while queue:
            x = queue.popleft()
            for g in gens:
                y = g[x]
                if not seen[y]:
                    seen[y] = True
                    orb.add(y)
                    queue.append(y)
        result.append(sorted(orb))
    return result


def naive_closure(gens, degree):
    ident = tuple(range(degree))
    seen = {ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = compose(x, tuple(g))
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def ln_factorial(m, dps=40):
    with mpmath.workdps(dps):
        return mpmath.log(mpmath.mpf(factorial(m)))

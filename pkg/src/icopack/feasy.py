"""Exact linear feasibility over Q[tau] by Fourier-Motzkin elimination.

This is the decision kernel behind strip membership, coset viability and
atomic-surface interiors.  Systems are small (at most 6 variables, tens of
rows), so elimination with same-direction redundancy pruning is simpler
and safer than exact simplex.

Internally every row is cleared of denominators and carried as Z[tau]
coefficient pairs (a, b) meaning a + b*tau, so the hot loops touch only
Python integers.  Strictness is a flag: a combined row is strict when
either parent is.
"""

from __future__ import annotations

from math import gcd
from typing import Iterable, NamedTuple, Optional, Sequence

from icopack.qfield import GN, GoldenNumber

Pair = tuple[int, int]

# an integer row ((c_1, ..., c_m), rhs, strict) encodes  sum c_i w_i <= rhs
# (or < when strict), every c_i and rhs a Z[tau] pair
IntRow = tuple[tuple[Pair, ...], Pair, bool]


def _pair_sign(p: Pair) -> int:
    # sign of a + b*tau via (2a + b) + b*sqrt5
    a, b = p
    s = 2 * a + b
    if s >= 0 and b >= 0:
        return 1 if (s or b) else 0
    if s <= 0 and b <= 0:
        return -1
    if s > 0:
        return 1 if s * s > 5 * b * b else -1
    return -1 if s * s > 5 * b * b else 1


def _pair_mul(p: Pair, q: Pair) -> Pair:
    a, b = p
    c, d = q
    bd = b * d
    return (a * c + bd, a * d + b * c + bd)


def _pair_combine(alpha: Pair, p: Pair, beta: Pair, q: Pair) -> Pair:
    # alpha*p + beta*q
    a, b = alpha
    c, d = p
    x = a * c + b * d
    y = a * d + b * c + b * d
    a, b = beta
    c, d = q
    return (x + a * c + b * d, y + a * d + b * c + b * d)


class Row(NamedTuple):
    coeffs: tuple[GoldenNumber, ...]
    rhs: GoldenNumber
    strict: bool = False


class FeasibilityResult(NamedTuple):
    feasible: bool
    witness: Optional[tuple[GoldenNumber, ...]]


class LinearSystem:
    """Conjunction of rows sum_i coeffs_i w_i (<= or <) rhs."""

    __slots__ = ("rows", "num_vars")

    def __init__(self, rows: Iterable, num_vars: int) -> None:
        out = []
        for r in rows:
            if isinstance(r, Row):
                coeffs, rhs, strict = r
            else:
                coeffs, rhs, *rest = r
                strict = rest[0] if rest else False
            if strict in ("<=", "<"):
                strict = strict == "<"
            coeffs = tuple(_as_gn(c) for c in coeffs)
            if len(coeffs) != num_vars:
                raise ValueError(
                    f"row has {len(coeffs)} coefficients, expected {num_vars}"
                )
            out.append(Row(coeffs, _as_gn(rhs), bool(strict)))
        self.rows = tuple(out)
        self.num_vars = num_vars

    def int_rows(self) -> list[IntRow]:
        return [_clear_denominators(r) for r in self.rows]


def _as_gn(x) -> GoldenNumber:
    if isinstance(x, GoldenNumber):
        return x
    return GN(x)


def _clear_denominators(row: Row) -> IntRow:
    l = row.rhs.q
    for c in row.coeffs:
        l = l * c.q // gcd(l, c.q)
    coeffs = tuple((c.a * (l // c.q), c.b * (l // c.q)) for c in row.coeffs)
    rhs = (row.rhs.a * (l // row.rhs.q), row.rhs.b * (l // row.rhs.q))
    return (coeffs, rhs, row.strict)


def _row_to_gn(row: IntRow) -> Row:
    coeffs, rhs, strict = row
    return Row(
        tuple(GN._raw(a, b, 1) for a, b in coeffs), GN._raw(*rhs, 1), strict
    )


def _normalize(coeffs: tuple[Pair, ...], rhs: Pair) -> tuple[tuple[Pair, ...], Pair]:
    g = 0
    for a, b in coeffs:
        g = gcd(g, a, b)
    g = gcd(g, rhs[0], rhs[1])
    if g > 1:
        coeffs = tuple((a // g, b // g) for a, b in coeffs)
        rhs = (rhs[0] // g, rhs[1] // g)
    return coeffs, rhs


def _direction_key(coeffs: tuple[Pair, ...]) -> tuple[tuple[Pair, ...], int]:
    g = 0
    for a, b in coeffs:
        g = gcd(g, a, b)
    if g > 1:
        return tuple((a // g, b // g) for a, b in coeffs), g
    return coeffs, 1


class _Infeasible(Exception):
    pass


def _check_constant(rhs: Pair, strict: bool) -> None:
    # a constant row 0 <= rhs (or 0 < rhs)
    s = _pair_sign(rhs)
    if s < 0 or (s == 0 and strict):
        raise _Infeasible


def _dedup_insert(
    best: dict, coeffs: tuple[Pair, ...], rhs: Pair, strict: bool
) -> None:
    key, scale = _direction_key(coeffs)
    old = best.get(key)
    if old is None:
        best[key] = (coeffs, rhs, strict, scale)
        return
    # same direction: keep the tighter bound; rhs/scale vs old_rhs/old_scale
    _, orhs, ostrict, oscale = old
    diff = _pair_sign(
        (rhs[0] * oscale - orhs[0] * scale, rhs[1] * oscale - orhs[1] * scale)
    )
    if diff < 0 or (diff == 0 and strict and not ostrict):
        best[key] = (coeffs, rhs, strict, scale)


def _eliminate_int(rows: list[IntRow], j: int) -> list[IntRow]:
    """Project out variable j; raises _Infeasible on a violated constant row."""
    pos, neg = [], []
    best: dict = {}
    for coeffs, rhs, strict in rows:
        s = _pair_sign(coeffs[j])
        rest = coeffs[:j] + coeffs[j + 1 :]
        if s > 0:
            pos.append((coeffs[j], rest, rhs, strict))
        elif s < 0:
            neg.append((coeffs[j], rest, rhs, strict))
        else:
            if any(a or b for a, b in rest):
                nc, nr = _normalize(rest, rhs)
                _dedup_insert(best, nc, nr, strict)
            else:
                _check_constant(rhs, strict)
    for ap, restp, rhsp, strictp in pos:
        p0, p1 = ap
        for an, restn, rhsn, strictn in neg:
            # ap*row_n + (-an)*row_p cancels variable j (ap > 0 > an);
            # pair products are unrolled here (tau^2 = tau + 1)
            m0 = -an[0]
            m1 = -an[1]
            nz = False
            coeffs_l = []
            for (c, d), (e, f) in zip(restn, restp):
                pd = p1 * d
                mf = m1 * f
                x = p0 * c + pd + m0 * e + mf
                y = p0 * d + p1 * c + pd + m0 * f + m1 * e + mf
                if x or y:
                    nz = True
                coeffs_l.append((x, y))
            c, d = rhsn
            e, f = rhsp
            pd = p1 * d
            mf = m1 * f
            rhs = (
                p0 * c + pd + m0 * e + mf,
                p0 * d + p1 * c + pd + m0 * f + m1 * e + mf,
            )
            strict = strictp or strictn
            if nz:
                coeffs, rhs = _normalize(tuple(coeffs_l), rhs)
                _dedup_insert(best, coeffs, rhs, strict)
            else:
                _check_constant(rhs, strict)
    return [(c, r, s) for c, r, s, _ in best.values()]


def fm_eliminate(system: LinearSystem, var_index: int) -> LinearSystem:
    """Equivalent system in the remaining variables (column removed)."""
    if not 0 <= var_index < system.num_vars:
        raise ValueError("var_index out of range")
    try:
        rows = _eliminate_int(system.int_rows(), var_index)
    except _Infeasible:
        # represent the detected contradiction explicitly
        m = system.num_vars - 1
        return LinearSystem(
            [Row(tuple(GN(0) for _ in range(m)), GN(-1), False)], m
        )
    return LinearSystem([_row_to_gn(r) for r in rows], system.num_vars - 1)


def _last_var_interval(rows: list[IntRow]):
    """Bounds for the single remaining variable.

    Returns (lo, lo_strict, hi, hi_strict) with lo/hi as exact GoldenNumber
    or None for unbounded; raises _Infeasible when empty.
    """
    lo = hi = None
    lo_strict = hi_strict = False
    for coeffs, rhs, strict in rows:
        c = coeffs[0]
        s = _pair_sign(c)
        if s == 0:
            _check_constant(rhs, strict)
            continue
        bound = GN._raw(*rhs, 1) / GN._raw(*c, 1)
        if s > 0:  # w <= rhs/c
            if hi is None or bound < hi:
                hi, hi_strict = bound, strict
            elif bound == hi:
                hi_strict = hi_strict or strict
        else:  # w >= rhs/c (division by negative flips)
            if lo is None or bound > lo:
                lo, lo_strict = bound, strict
            elif bound == lo:
                lo_strict = lo_strict or strict
    if lo is not None and hi is not None:
        d = (hi - lo).sign()
        if d < 0 or (d == 0 and (lo_strict or hi_strict)):
            raise _Infeasible
    return lo, lo_strict, hi, hi_strict


def _pick_from_interval(lo, lo_strict, hi, hi_strict) -> GoldenNumber:
    if lo is None and hi is None:
        return GN(0)
    if lo is None:
        return hi - 1
    if hi is None:
        return lo + 1
    if lo == hi:
        return lo
    return (lo + hi) / 2


def _eval_row(coeffs: tuple[Pair, ...], point: list[GoldenNumber]) -> GoldenNumber:
    acc = GN(0)
    for c, w in zip(coeffs, point):
        if c[0] or c[1]:
            acc = acc + GN._raw(*c, 1) * w
    return acc


def feasible(system: LinearSystem, want_witness: bool = True) -> FeasibilityResult:
    """Decide the system; on success, optionally produce an exact witness.

    Variables are eliminated in index order; the witness is rebuilt in
    reverse by picking the midpoint of each variable's exact interval.
    """
    m = system.num_vars
    stages: list[list[IntRow]] = [system.int_rows()]
    try:
        if m == 0:
            for _, rhs, strict in stages[0]:
                _check_constant(rhs, strict)
        for _ in range(m - 1):
            stages.append(_eliminate_int(stages[-1], 0))
        if m >= 1:
            interval = _last_var_interval(stages[-1])
    except _Infeasible:
        return FeasibilityResult(False, None)

    if not want_witness:
        return FeasibilityResult(True, None)
    if m == 0:
        return FeasibilityResult(True, ())

    point: list[GoldenNumber] = [_pick_from_interval(*interval)]
    for stage in reversed(stages[:-1]):
        lo = hi = None
        lo_strict = hi_strict = False
        for coeffs, rhs, strict in stage:
            c = coeffs[0]
            s = _pair_sign(c)
            if s == 0:
                continue
            rest = _eval_row(coeffs[1:], point)
            bound = (GN._raw(*rhs, 1) - rest) / GN._raw(*c, 1)
            if s > 0:
                if hi is None or bound < hi:
                    hi, hi_strict = bound, strict
                elif bound == hi:
                    hi_strict = hi_strict or strict
            else:
                if lo is None or bound > lo:
                    lo, lo_strict = bound, strict
                elif bound == lo:
                    lo_strict = lo_strict or strict
        point.insert(0, _pick_from_interval(lo, lo_strict, hi, hi_strict))

    witness = tuple(point)
    for coeffs, rhs, strict in stages[0]:
        val = _eval_row(coeffs, point) - GN._raw(*rhs, 1)
        s = val.sign()
        if s > 0 or (s == 0 and strict):
            raise AssertionError("internal error: witness fails a row")
    return FeasibilityResult(True, witness)


def strictly_feasible(system: LinearSystem) -> bool:
    """Feasibility with every relation made strict (interior test)."""
    rows = [(c, r, True) for c, r, _ in system.int_rows()]
    return int_feasible(rows, system.num_vars)


def int_feasible(rows: list[IntRow], num_vars: int) -> bool:
    """Boolean-only fast path on pre-scaled integer rows.

    Callers in inner loops build IntRow tuples directly (coefficients and
    rhs as Z[tau] pairs) to skip GoldenNumber construction entirely.  The
    final two stages are fused: combinations of two-variable rows go
    straight into a running exact interval instead of a materialized
    one-variable system.
    """
    try:
        if num_vars == 0:
            for _, rhs, strict in rows:
                _check_constant(rhs, strict)
            return True
        for _ in range(num_vars - 2):
            rows = _eliminate_int(rows, 0)
        if num_vars >= 2:
            return _final_two_vars(rows)
        _last_var_interval(rows)
        return True
    except _Infeasible:
        return False


def _final_two_vars(rows: list[IntRow]) -> bool:
    """Feasibility of a two-variable system without materializing rows.

    Eliminating the first variable yields one-variable rows c*w <= r; the
    interval they carve out is tracked as integer cross-products
    (max lower vs min upper) so nothing is allocated per combination.
    """
    pos, neg = [], []
    # running interval for w = var 1:  glo/gd < or <= w <= ghi/hd
    glo = ghi = None
    gd = hd = (1, 0)
    glo_strict = ghi_strict = False

    def push(c: Pair, r: Pair, strict: bool) -> None:
        nonlocal glo, ghi, gd, hd, glo_strict, ghi_strict
        s = _pair_sign(c)
        if s == 0:
            _check_constant(r, strict)
            return
        if s > 0:  # w <= r/c: compare r/c < ghi/hd via cross-product
            if ghi is None:
                ghi, hd, ghi_strict = r, c, strict
            else:
                d = _pair_sign(_pair_combine(r, hd, (-ghi[0], -ghi[1]), c))
                if d < 0:
                    ghi, hd, ghi_strict = r, c, strict
                elif d == 0:
                    ghi_strict = ghi_strict or strict
        else:  # w >= r/c with c < 0: flip sign to keep denominators positive
            c = (-c[0], -c[1])
            r = (-r[0], -r[1])
            if glo is None:
                glo, gd, glo_strict = r, c, strict
            else:
                d = _pair_sign(_pair_combine(r, gd, (-glo[0], -glo[1]), c))
                if d > 0:
                    glo, gd, glo_strict = r, c, strict
                elif d == 0:
                    glo_strict = glo_strict or strict

    for coeffs, rhs, strict in rows:
        s = _pair_sign(coeffs[0])
        if s > 0:
            pos.append((coeffs[0], coeffs[1], rhs, strict))
        elif s < 0:
            neg.append((coeffs[0], coeffs[1], rhs, strict))
        else:
            push(coeffs[1], rhs, strict)
    for ap, cp, rp, sp in pos:
        p0, p1 = ap
        for an, cn, rn, sn in neg:
            m0 = -an[0]
            m1 = -an[1]
            c, d = cp
            e, f = cn
            md = m1 * d
            pf = p1 * f
            cx = m0 * c + md + p0 * e + pf
            cy = m0 * d + m1 * c + md + p0 * f + p1 * e + pf
            c, d = rp
            e, f = rn
            md = m1 * d
            pf = p1 * f
            push(
                (cx, cy),
                (m0 * c + md + p0 * e + pf,
                 m0 * d + m1 * c + md + p0 * f + p1 * e + pf),
                sp or sn,
            )
    if glo is not None and ghi is not None:
        # need glo/gd <= ghi/hd, both denominators positive
        d = _pair_sign(_pair_combine(ghi, gd, (-glo[0], -glo[1]), hd))
        if d < 0 or (d == 0 and (glo_strict or ghi_strict)):
            return False
    return True

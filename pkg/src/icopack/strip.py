"""Pattern generation by the k-dimensional strip projection method.

A lattice point n (standing for x = kappa*n) is accepted when some
w in R^3 satisfies 0 <= n_i + gamma_i - <w, e_i> <= 1 for every i: that is
the scaled form of "the perpendicular projection of x falls in the window",
with w ranging over the physical subspace.  Acceptance is decided exactly
by Fourier-Motzkin; floats only ever size search boxes, outward-rounded.

Two generation modes are provided and cross-checked:

* bfs        - frontier expansion by n +- eps_i from a seed, pruned by an
               exact ball test with slack;
* exhaustive - depth-first scan of a sound per-coordinate integer box,
               pruned by two-sided inequalities along integer dependency
               vectors of the cluster (sum c_i e_i = 0), which are valid
               for every strip member by construction.
"""

from __future__ import annotations

import itertools
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

from icopack.feasy import IntRow, int_feasible
from icopack.icosa import Vec3
from icopack.qfield import GN, ZERO, GoldenNumber, sqrt_upper
from icopack.superspace import SuperspaceData

Offset = Optional[Sequence[GoldenNumber]]


class PatternPoint(NamedTuple):
    phys: Vec3
    source: tuple[int, ...]
    neighbor_mask: tuple[bool, ...]  # +eps_1..+eps_k then -eps_1..-eps_k

    @property
    def occupied_count(self) -> int:
        return sum(self.neighbor_mask)

    @property
    def fully_occupied(self) -> bool:
        return all(self.neighbor_mask)


class Pattern:
    """Finite piece of the pattern: exact points sorted by coordinates."""

    def __init__(
        self,
        points: list[PatternPoint],
        radius_sq: GoldenNumber,
        offset: Offset = None,
    ) -> None:
        self.points = sorted(points, key=lambda p: p.phys)
        self.radius_sq = radius_sq
        self.offset = tuple(offset) if offset is not None else None
        self._by_phys = {p.phys: p for p in self.points}
        if len(self._by_phys) != len(self.points):
            raise AssertionError("duplicate physical coordinates in pattern")

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[PatternPoint]:
        return iter(self.points)

    def __contains__(self, phys: Vec3) -> bool:
        return phys in self._by_phys

    def get(self, phys: Vec3) -> Optional[PatternPoint]:
        return self._by_phys.get(phys)

    def phys_set(self) -> set[Vec3]:
        return set(self._by_phys)


def _normalize_offset(offset: Offset, k: int) -> tuple[GoldenNumber, ...]:
    if offset is None:
        return (ZERO,) * k
    out = tuple(c if isinstance(c, GoldenNumber) else GN(c) for c in offset)
    if len(out) != k:
        raise ValueError(f"offset must have {k} components")
    return out


class StripSampler:
    """Exact strip membership for one cluster geometry and window offset.

    Rows are pre-scaled to Z[tau] integer pairs once; each query only fills
    in the integer right-hand sides, so the FM kernel sees pure integers.
    """

    def __init__(self, data: SuperspaceData, offset: Offset = None) -> None:
        self.data = data
        self.k = data.k
        self.offset = _normalize_offset(offset, self.k)
        self._memo: dict[tuple[int, ...], bool] = {}
        self._pos = []  # (coeff pairs, scale, gamma pair) per i
        self._neg = []
        for e, g in zip(data.cluster.half, self.offset):
            scale = g.q
            for c in e:
                scale = scale * c.q // gcd(scale, c.q)
            pairs = tuple(
                (c.a * (scale // c.q), c.b * (scale // c.q)) for c in e
            )
            gp = (g.a * (scale // g.q), g.b * (scale // g.q))
            self._pos.append((pairs, scale, gp))
            self._neg.append(
                (tuple((-a, -b) for a, b in pairs), scale, (-gp[0], -gp[1]))
            )

    def rows(
        self, n: Sequence[int], shift_index: int = -1, shift: int = 0
    ) -> list[IntRow]:
        """The 2k-row system for n, optionally with n_i shifted in place."""
        out: list[IntRow] = []
        for i in range(self.k):
            ni = n[i] + (shift if i == shift_index else 0)
            pairs, scale, (ga, gb) = self._pos[i]
            npairs, _, _ = self._neg[i]
            v = ni * scale
            #  <w, e_i> <= n_i + gamma_i
            out.append((pairs, (v + ga, gb), False))
            # -<w, e_i> <= 1 - n_i - gamma_i
            out.append((npairs, (scale - v - ga, -gb), False))
        return out

    def in_strip(self, n: Sequence[int]) -> bool:
        key = tuple(n)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = int_feasible(self.rows(key), 3)
        return hit

    def member(self, n: tuple[int, ...], filt: "CircuitFilter") -> bool:
        """in_strip with a necessary-condition short circuit.

        Every dependency row is implied by the full system, so a violation
        settles the answer without running elimination; survivors still get
        the exact decision.  Results land in the same cache as in_strip.
        """
        hit = self._memo.get(n)
        if hit is None:
            hit = filt.passes(n) and int_feasible(self.rows(n), 3)
            self._memo[n] = hit
        return hit

    def occupancy(
        self, n: Sequence[int], filt: Optional["CircuitFilter"] = None
    ) -> tuple[bool, ...]:
        """Strip membership of the 2k arithmetic neighbours n +- eps_i."""
        n = list(n)
        flags = []
        for delta in (1, -1):
            for i in range(self.k):
                n[i] += delta
                key = tuple(n)
                flags.append(
                    self.in_strip(key) if filt is None else self.member(key, filt)
                )
                n[i] -= delta
        return tuple(flags)

    def fully_occupied(self, n: Sequence[int]) -> bool:
        """Window-intersection form: every shifted system feasible.

        Same condition as all 2k occupancy flags, but evaluated by shifting
        the right-hand sides of the base system rather than moving n.
        """
        return all(
            int_feasible(self.rows(n, shift_index=i, shift=delta), 3)
            for delta in (1, -1)
            for i in range(self.k)
        )


def in_strip(n: Sequence[int], data: SuperspaceData, offset: Offset = None) -> bool:
    return StripSampler(data, offset).in_strip(n)


def occupancy(
    n: Sequence[int], data: SuperspaceData, offset: Offset = None
) -> tuple[bool, ...]:
    return StripSampler(data, offset).occupancy(n)


def fully_occupied(
    n: Sequence[int], data: SuperspaceData, offset: Offset = None
) -> bool:
    return StripSampler(data, offset).fully_occupied(n)


# -- dependency (circuit) rows for exhaustive-mode pruning -------------------


class CircuitRow(NamedTuple):
    """Two-sided bound along a dependency sum c_i e_i = 0 of the cluster.

    For every strip member, n_i + gamma_i - <w, e_i> lies in [0, 1], and the
    <w, e_i> terms cancel against the dependency, so
    lo <= sum c_i n_i <= hi with lo/hi from the box support function.
    """

    indices: tuple[int, ...]  # ascending; last entry owns the row
    coeffs: tuple[GoldenNumber, ...]
    lo: GoldenNumber
    hi: GoldenNumber


def _kernel_vector(cols: list[Vec3]) -> Optional[list[GoldenNumber]]:
    """One exact kernel vector of the 3 x s matrix with the given columns."""
    s = len(cols)
    rows = [[cols[j][a] for j in range(s)] for a in range(3)]
    pivots: list[tuple[int, int]] = []  # (row, col)
    r = 0
    for c in range(s):
        pivot = next((i for i in range(r, 3) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(3):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append((r, c))
        r += 1
        if r == 3:
            break
    pivot_cols = {c for _, c in pivots}
    free = [c for c in range(s) if c not in pivot_cols]
    if not free:
        return None
    f = free[-1]
    vec = [ZERO] * s
    vec[f] = GN(1)
    for r, c in pivots:
        vec[c] = -rows[r][f]
    return vec


def _normalize_circuit(
    indices: Sequence[int], coeffs: Sequence[GoldenNumber]
):
    kept = [(i, c) for i, c in zip(indices, coeffs) if c]
    if len(kept) < 2:
        return None
    scale = 1
    for _, c in kept:
        scale = scale * c.q // gcd(scale, c.q)
    pairs = [(c.a * (scale // c.q), c.b * (scale // c.q)) for _, c in kept]
    g = 0
    for a, b in pairs:
        g = gcd(g, a, b)
    pairs = [(a // g, b // g) for a, b in pairs]
    if GN._raw(*pairs[0], 1).sign() < 0:
        pairs = [(-a, -b) for a, b in pairs]
    return tuple(i for i, _ in kept), tuple(pairs)


def circuit_rows(
    data: SuperspaceData, offset: Offset = None, max_support: int = 4
) -> dict[int, list[CircuitRow]]:
    """All normalized dependency rows with support <= max_support, bucketed
    by their largest index (the DFS depth at which they become decidable)."""
    e = data.cluster.half
    gamma = _normalize_offset(offset, data.k)
    seen: dict = {}
    for size in range(2, max_support + 1):
        for sub in itertools.combinations(range(data.k), size):
            vec = _kernel_vector([e[i] for i in sub])
            if vec is None:
                continue
            norm = _normalize_circuit(sub, vec)
            if norm is not None and norm[0] not in seen:
                seen[norm[0]] = norm[1]
    buckets: dict[int, list[CircuitRow]] = {}
    for indices, pairs in seen.items():
        coeffs = tuple(GN._raw(a, b, 1) for a, b in pairs)
        lo = hi = ZERO
        for i, c in zip(indices, coeffs):
            if c.sign() < 0:
                lo = lo + c
            else:
                hi = hi + c
            lo = lo - c * gamma[i]
            hi = hi - c * gamma[i]
        buckets.setdefault(indices[-1], []).append(
            CircuitRow(indices, coeffs, lo, hi)
        )
    return buckets


class CircuitFilter:
    """Fast necessary condition for strip membership, in pure integer form.

    The rows are implied constraints, so a violation settles non-membership;
    passing says nothing and the caller still runs the exact decision.  Only
    the narrowest rows are kept (window width over coefficient size): wide
    rows almost never fire, and the final say is elsewhere anyway.
    """

    def __init__(
        self, buckets: dict[int, list[CircuitRow]], limit: int = 256
    ) -> None:
        tau = (1 + 5**0.5) / 2

        def narrowness(r: CircuitRow) -> float:
            w = (r.hi.a + r.hi.b * tau) / r.hi.q - (r.lo.a + r.lo.b * tau) / r.lo.q
            return w / max(abs(c.a + c.b * tau) for c in r.coeffs)

        rows = [r for rs in buckets.values() for r in rs]
        rows.sort(key=narrowness)
        self._rows = []
        for r in rows[:limit]:
            scale = r.lo.q * r.hi.q // gcd(r.lo.q, r.hi.q)
            for c in r.coeffs:
                scale = scale * c.q // gcd(scale, c.q)
            pairs = tuple(
                (c.a * (scale // c.q), c.b * (scale // c.q)) for c in r.coeffs
            )
            lo = (r.lo.a * (scale // r.lo.q), r.lo.b * (scale // r.lo.q))
            hi = (r.hi.a * (scale // r.hi.q), r.hi.b * (scale // r.hi.q))
            self._rows.append((r.indices, pairs, lo, hi))

    def passes(self, n: Sequence[int]) -> bool:
        # sign tests for x + y*tau are unrolled: s = 2x + y decides with y
        # unless the signs disagree, then s^2 vs 5 y^2 settles it
        for indices, pairs, (la, lb), (ha, hb) in self._rows:
            sa = sb = 0
            for i, (a, b) in zip(indices, pairs):
                v = n[i]
                if v:
                    sa += a * v
                    sb += b * v
            x = sa - la
            y = sb - lb
            s = 2 * x + y
            if s < 0 or y < 0:
                if s <= 0 and y <= 0:
                    return False
                if (s * s < 5 * y * y) if s > 0 else (s * s > 5 * y * y):
                    return False
            x = ha - sa
            y = hb - sb
            s = 2 * x + y
            if s < 0 or y < 0:
                if s <= 0 and y <= 0:
                    return False
                if (s * s < 5 * y * y) if s > 0 else (s * s > 5 * y * y):
                    return False
        return True


# -- generation ---------------------------------------------------------------


def _coordinate_box(
    data: SuperspaceData, radius_sq: GoldenNumber, offset: Offset
) -> list[tuple[int, int]]:
    """Sound per-coordinate integer ranges for strip members in the ball.

    n_i + gamma_i splits into a physical part <p, e_i>/kappa^2 (bounded via
    Cauchy-Schwarz by |e_i| R / kappa^2 around the offset's contribution)
    plus a window part confined to the exact coordinate range of the
    projected box.
    """
    k = data.k
    gamma = _normalize_offset(offset, k)
    e = data.cluster.half
    inv_ks = data.kappa_sq.inverse()
    c_gamma = Vec3(ZERO, ZERO, ZERO)
    for g, v in zip(gamma, e):
        c_gamma = c_gamma + v.scale(g)
    box = []
    for i in range(k):
        # window-part range: coordinate i of (I - pi) applied to [0,1]^k
        lo_w = hi_w = ZERO
        for j in range(k):
            p = (GN(1) if i == j else ZERO) - data.pi[i][j]
            if p.sign() >= 0:
                hi_w = hi_w + p
            else:
                lo_w = lo_w + p
        b_up = GN(sqrt_upper(e[i].norm2() * radius_sq * inv_ks * inv_ks))
        center = c_gamma.dot(e[i]) * inv_ks - gamma[i]
        lo = center + lo_w - b_up
        hi = center + hi_w + b_up
        box.append((lo.ceil(), hi.floor()))
    return box


def _pair_floor_div(p: int, r: int, den: int) -> int:
    """floor((p + r*tau) / den) for den > 0, exactly.

    For r != 0 the value is irrational, strictly between s+u and s+u+1
    halves, so the integer floor comes out of one isqrt.
    """
    if r == 0:
        return p // den
    rr = 5 * r * r
    u = isqrt(rr) if r > 0 else -(isqrt(rr) + 1)
    return (2 * p + r + u) // (2 * den)


class _ScanTables:
    """Integer-only data driving the exhaustive depth-first scan.

    Cluster vectors are pre-scaled by a common denominator so partial
    physical sums are Z[tau] pairs; dependency rows carry their last
    coefficient's conjugate and norm so interval endpoints come from a
    single multiplication plus an exact floor.
    """

    def __init__(
        self,
        data: SuperspaceData,
        radius_sq: GoldenNumber,
        buckets: dict[int, list[CircuitRow]],
    ) -> None:
        k = data.k
        s = 1
        for v in data.cluster.half:
            for c in v:
                s = s * c.q // gcd(s, c.q)
        self.scale = s
        self.epairs = [
            tuple((c.a * (s // c.q), c.b * (s // c.q)) for c in v)
            for v in data.cluster.half
        ]
        # prune thresholds: s^2|phys|^2 <= s^2 (R_up + remaining reach)^2,
        # all rational and outward-rounded, one per depth
        r_up = sqrt_upper(radius_sq)
        self.thresholds = []
        reach = Fraction(0)
        trail = [Fraction(0)]
        for v in reversed(data.cluster.half):
            reach += sqrt_upper(v.norm2())
            trail.append(reach)
        trail.reverse()  # trail[d] = sum of |e_j| upper bounds for j >= d
        for d in range(k + 1):
            t = (r_up + trail[d]) ** 2 * s * s
            self.thresholds.append((t.numerator, t.denominator))
        self.rows: dict[int, list] = {}
        for last, rows in buckets.items():
            prepared = []
            for r in rows:
                rs = r.lo.q * r.hi.q // gcd(r.lo.q, r.hi.q)
                for c in r.coeffs:
                    rs = rs * c.q // gcd(rs, c.q)
                pairs = [
                    (c.a * (rs // c.q), c.b * (rs // c.q)) for c in r.coeffs
                ]
                lo = (r.lo.a * (rs // r.lo.q), r.lo.b * (rs // r.lo.q))
                hi = (r.hi.a * (rs // r.hi.q), r.hi.b * (rs // r.hi.q))
                ca, cb = pairs[-1]
                norm = ca * ca + ca * cb - cb * cb
                conj = (ca + cb, -cb)
                if norm < 0:
                    norm = -norm
                    conj = (-conj[0], -conj[1])
                csign = 1 if r.coeffs[-1].sign() > 0 else -1
                prepared.append(
                    (r.indices[:-1], pairs[:-1], csign, conj, norm, lo, hi)
                )
            self.rows[last] = prepared


def _exhaustive_scan(
    sampler: StripSampler,
    radius_sq: GoldenNumber,
    box: list[tuple[int, int]],
    buckets: dict[int, list[CircuitRow]],
    first_values: Optional[Sequence[int]] = None,
) -> list[tuple[tuple[int, ...], Vec3]]:
    """Depth-first scan of the box.

    Subtrees are cut two ways, both sound: dependency rows bound the
    coordinate that completes them, and the partial physical sum must stay
    within outward-rounded reach of the ball.  Leaves still pass through
    the exact ball test and in_strip.
    """
    data = sampler.data
    k = sampler.k
    t = _ScanTables(data, radius_sq, buckets)
    s = t.scale
    epairs = t.epairs
    thresholds = t.thresholds
    rowmap = t.rows
    n = [0] * k
    out: list[tuple[tuple[int, ...], Vec3]] = []

    def descend(depth: int, px, py, pz) -> None:
        if depth == k:
            phys = Vec3(
                GN._raw(px[0], px[1], s),
                GN._raw(py[0], py[1], s),
                GN._raw(pz[0], pz[1], s),
            )
            if (radius_sq - phys.norm2()).sign() >= 0 and sampler.in_strip(
                tuple(n)
            ):
                out.append((tuple(n), phys))
            return
        lo, hi = box[depth]
        for indices, pairs, csign, conj, norm, rlo, rhi in rowmap.get(
            depth, ()
        ):
            pa = pb = 0
            for i, (a, b) in zip(indices, pairs):
                v = n[i]
                if v:
                    pa += a * v
                    pb += b * v
            # rlo - partial <= c * n_depth <= rhi - partial
            xa = rlo[0] - pa
            xb = rlo[1] - pb
            ya = rhi[0] - pa
            yb = rhi[1] - pb
            ca, cb = conj
            qa = xa * ca + xb * cb
            qb = xa * cb + xb * ca + xb * cb
            ra = ya * ca + yb * cb
            rb = ya * cb + yb * ca + yb * cb
            if csign > 0:
                a = -_pair_floor_div(-qa, -qb, norm)
                b = _pair_floor_div(ra, rb, norm)
            else:
                a = -_pair_floor_div(-ra, -rb, norm)
                b = _pair_floor_div(qa, qb, norm)
            if a > lo:
                lo = a
            if b < hi:
                hi = b
            if lo > hi:
                return
        if first_values is not None and depth == 0:
            values: Iterable[int] = [v for v in first_values if lo <= v <= hi]
        else:
            values = range(lo, hi + 1)
        tn, td = thresholds[depth + 1]
        ea, eb = epairs[depth][0]
        fa, fb = epairs[depth][1]
        ga, gb = epairs[depth][2]
        for v in values:
            n[depth] = v
            if v:
                cx = (px[0] + ea * v, px[1] + eb * v)
                cy = (py[0] + fa * v, py[1] + fb * v)
                cz = (pz[0] + ga * v, pz[1] + gb * v)
            else:
                cx, cy, cz = px, py, pz
            # |scaled phys|^2 = sum of pair squares, compared to tn/td
            xa, xb = cx
            ya, yb = cy
            za, zb = cz
            na = xa * xa + ya * ya + za * za
            nb2 = xa * xb + ya * yb + za * zb
            nb = nb2 + nb2
            na += xb * xb + yb * yb + zb * zb
            nb += xb * xb + yb * yb + zb * zb
            # sign of (na*td - tn) + nb*td*tau must not be positive
            da = na * td - tn
            db = nb * td
            sgn = 2 * da + db
            if sgn > 0 and db > 0:
                pass  # positive: outside reach
            elif sgn <= 0 and db <= 0:
                descend(depth + 1, cx, cy, cz)
            elif (sgn * sgn > 5 * db * db) if sgn > 0 else (
                sgn * sgn < 5 * db * db
            ):
                pass
            else:
                descend(depth + 1, cx, cy, cz)
        n[depth] = 0

    zero = (0, 0)
    descend(0, zero, zero, zero)
    return out


def _bfs_scan(
    sampler: StripSampler,
    radius_sq: GoldenNumber,
    filt: CircuitFilter,
    seed: Optional[Sequence[int]] = None,
) -> list[tuple[tuple[int, ...], Vec3]]:
    data = sampler.data
    k = sampler.k
    e = data.cluster.half
    start = tuple(seed) if seed is not None else (0,) * k
    if len(start) != k:
        raise ValueError(f"seed must have {k} components")
    if not sampler.in_strip(start):
        raise ValueError(
            "bfs seed is not in the strip; generate with mode='exhaustive' "
            "or supply an in-strip seed"
        )
    max_sq = max(v.norm2() for v in e)
    slack = radius_sq + max_sq * 4
    phys0 = data.physical_embed(start)
    if (slack - phys0.norm2()).sign() < 0:
        raise ValueError("bfs seed lies outside the requested ball")
    queue = deque([(start, phys0)])
    visited = {start}
    out = []
    while queue:
        n, phys = queue.popleft()
        if (radius_sq - phys.norm2()).sign() >= 0:
            out.append((n, phys))
        for i in range(k):
            for delta in (1, -1):
                m = n[:i] + (n[i] + delta,) + n[i + 1 :]
                if m in visited:
                    continue
                visited.add(m)
                physm = phys + e[i].scale(delta)
                if (slack - physm.norm2()).sign() < 0:
                    continue
                if sampler.member(m, filt):
                    queue.append((m, physm))
    return out


def _chunks(values: list, parts: int) -> list[list]:
    size = (len(values) + parts - 1) // parts
    return [values[i : i + size] for i in range(0, len(values), size)]


def _exhaustive_worker(args):
    data, radius_sq, offset, box, first_values = args
    sampler = StripSampler(data, offset)
    buckets = circuit_rows(data, offset)
    return _exhaustive_scan(sampler, radius_sq, box, buckets, first_values)


def _mask_worker(args):
    data, offset, sources = args
    sampler = StripSampler(data, offset)
    filt = CircuitFilter(circuit_rows(data, offset))
    return [sampler.occupancy(n, filt) for n in sources]


def assemble_pattern(
    raw: Iterable[tuple[tuple[int, ...], Vec3]],
    data: SuperspaceData,
    radius_sq: GoldenNumber,
    offset: Offset,
    sampler: Optional[StripSampler] = None,
    filt: Optional[CircuitFilter] = None,
    workers: int = 1,
) -> Pattern:
    """Dedup by exact coordinates, attach occupancy masks, sort."""
    chosen: dict[Vec3, tuple[int, ...]] = {}
    for n, phys in raw:
        old = chosen.get(phys)
        if old is None or n < old:
            chosen[phys] = n
    items = sorted(chosen.items(), key=lambda kv: kv[0])
    sources = [n for _, n in items]
    if workers > 1 and len(sources) > 1:
        jobs = [
            (data, offset, chunk) for chunk in _chunks(sources, workers * 4)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            masks = [m for part in pool.map(_mask_worker, jobs) for m in part]
    else:
        sampler = sampler or StripSampler(data, offset)
        filt = filt or CircuitFilter(circuit_rows(data, offset))
        masks = [sampler.occupancy(n, filt) for n in sources]
    points = [
        PatternPoint(phys, n, mask)
        for (phys, n), mask in zip(items, masks)
    ]
    return Pattern(points, radius_sq, _normalize_offset(offset, data.k))


def generate_strip(
    data: SuperspaceData,
    radius_sq,
    offset: Offset = None,
    mode: str = "bfs",
    seed: Optional[Sequence[int]] = None,
    workers: int = 1,
) -> Pattern:
    """All strip points with |phys|^2 <= radius_sq, with occupancy masks."""
    radius_sq = radius_sq if isinstance(radius_sq, GoldenNumber) else GN(radius_sq)
    if radius_sq.sign() <= 0:
        raise ValueError("radius_sq must be positive")
    sampler = StripSampler(data, offset)
    buckets = circuit_rows(data, offset)
    filt = CircuitFilter(buckets)
    if mode == "bfs":
        raw = _bfs_scan(sampler, radius_sq, filt, seed)
    elif mode == "exhaustive":
        box = _coordinate_box(data, radius_sq, offset)
        if any(lo > hi for lo, hi in box):
            raw = []
        elif workers > 1:
            first = list(range(box[0][0], box[0][1] + 1))
            jobs = [
                (data, radius_sq, offset, box, chunk)
                for chunk in _chunks(first, workers)
            ]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                raw = [p for part in pool.map(_exhaustive_worker, jobs) for p in part]
        else:
            raw = _exhaustive_scan(sampler, radius_sq, box, buckets)
    else:
        raise ValueError("mode must be 'bfs' or 'exhaustive'")
    return assemble_pattern(raw, data, radius_sq, offset, sampler, filt, workers)

"""Pattern generation as a reduced 6-dimensional multi-component model set.

The rational projector pi'' splits the integer lattice into fibers: the
rank-6 sublattice L = {n : pi'' n = 0} and finitely many viable cosets
z + L whose window slices are nonempty.  Each coset contributes a classic
6-dimensional model set; their union reproduces the strip pattern exactly.
This route shares no search code with the strip generators, so agreement
between the two is a genuine cross-check of both.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import NamedTuple, Optional, Sequence

from icopack.feasy import IntRow, LinearSystem, Row, int_feasible
from icopack.icosa import Vec3
from icopack.intlat import column_hnf, gram_lll, integer_kernel, lattice_index
from icopack.qfield import GN, ONE, ZERO, GoldenNumber, sqrt_upper
from icopack.strip import (
    Offset,
    Pattern,
    PatternPoint,
    _normalize_offset,
    _pair_floor_div,
)
from icopack.superspace import SuperspaceData


class SixLattice(NamedTuple):
    """Basis of L = {n in Z^k : pi'' n = 0} plus its superspace geometry."""

    basis: tuple[tuple[int, ...], ...]  # 6 integer vectors of length k
    gram: tuple[tuple[GoldenNumber, ...], ...]  # physical+conjugate products
    phys: tuple[Vec3, ...]  # physical_embed of each basis vector
    conj: tuple[Vec3, ...]  # conjugate_embed of each basis vector


class CosetRep(NamedTuple):
    z: tuple[int, ...]
    second_proj: tuple[Fraction, ...]  # pi'' z, the coset label
    surface_status: str  # empty | lower_dim | full_dim


def _rational_projector(data: SuperspaceData) -> tuple[list[list[int]], int]:
    """pi'' cleared to an integer matrix: returns (d * pi'', d)."""
    entries = data.pi_second.entries
    d = 1
    for row in entries:
        for x in row:
            if x.gold != 0:
                raise ValueError("second projector is not rational")
            d = d * x.q // gcd(d, x.q)
    mat = [[x.a * (d // x.q) for x in row] for row in entries]
    return mat, d


def sublattice_basis(data: SuperspaceData) -> SixLattice:
    """Integer kernel of pi'', LLL-reduced, with its embeddings.

    Hermite-form kernels can be astronomically skew; reducing under the
    rational trace form |phys|^2 + |conj|^2 keeps every later box search
    over this lattice well conditioned.
    """
    mat, _ = _rational_projector(data)
    kernel = integer_kernel(mat)
    if len(kernel) != 6:
        raise ValueError(
            f"second-projector kernel has rank {len(kernel)}, expected 6; "
            "the cluster does not define a 6-dimensional scheme"
        )

    def embeds(vecs):
        phys = tuple(data.physical_embed(b) for b in vecs)
        conj = tuple(data.conjugate_embed(b) for b in vecs)
        gram = tuple(
            tuple(
                phys[i].dot(phys[j]) + conj[i].dot(conj[j])
                for j in range(len(vecs))
            )
            for i in range(len(vecs))
        )
        return phys, conj, gram

    _, _, raw_gram = embeds(kernel)
    assert all(g.gold == 0 for row in raw_gram for g in row)
    u = gram_lll([[g.rat for g in row] for row in raw_gram])
    basis = tuple(
        tuple(
            sum(u[i][l] * kernel[l][j] for l in range(6)) for j in range(data.k)
        )
        for i in range(6)
    )
    for b in basis:
        for row in mat:
            assert sum(c * x for c, x in zip(row, b)) == 0
    phys, conj, gram = embeds(basis)
    return SixLattice(basis, gram, phys, conj)


def _slice_rows(
    z: Sequence[int],
    gamma: Sequence[GoldenNumber],
    basis: Sequence[Sequence[int]],
    strict: bool,
) -> list[IntRow]:
    """0 <= z_i + gamma_i + (B u)_i <= 1 as integer rows in the 6 u's."""
    rows: list[IntRow] = []
    for i, g in enumerate(gamma):
        q = g.q
        coeffs = tuple((q * b[i], 0) for b in basis)
        neg = tuple((-a, 0) for a, _ in coeffs)
        base = q * z[i] + g.a
        #  (B u)_i <= 1 - z_i - gamma_i   and   -(B u)_i <= z_i + gamma_i
        rows.append((coeffs, (q - base, -g.b), strict))
        rows.append((neg, (base, g.b), strict))
    return rows


def _covector_rows(
    bh: list[list[int]], gamma: Sequence[GoldenNumber], k: int
) -> list[tuple[tuple[int, ...], GoldenNumber]]:
    """Exact shadow of {0 <= z + gamma + B u <= 1} on z.

    The region is the cube plus the span of B, a cylinder over a zonotope;
    its complete facet description comes from the minimal-support integer
    vectors c with c B = 0 (each bounds c.(z + gamma) by the extent of c
    over the cube).  Minimal supports have at most 7 elements, so they are
    found by rank-one kernels of small row subsets.  Naive elimination of
    the six parameters blows up combinatorially; this stays polynomial.
    """
    from itertools import combinations

    rows: list[tuple[tuple[int, ...], GoldenNumber]] = []

    def emit(support: tuple[int, ...], cvec: Sequence[int]) -> None:
        c = [0] * k
        lo = hi = ZERO
        shift = ZERO
        for idx, x in zip(support, cvec):
            c[idx] = x
            if x > 0:
                hi = hi + x
            else:
                lo = lo + x
            shift = shift + gamma[idx] * x
        # lo <= c.(z + gamma) <= hi
        rows.append((tuple(c), hi - shift))
        rows.append((tuple(-x for x in c), shift - lo))

    for size in range(1, 8):
        for support in combinations(range(k), size):
            mat = [[bh[i][j] for i in support] for j in range(6)]
            kernel = integer_kernel(mat)
            if len(kernel) != 1:
                continue
            cvec = kernel[0]
            if all(cvec):
                emit(support, cvec)
    return rows


def coset_reps(
    data: SuperspaceData, lattice: SixLattice, offset: Offset = None
) -> list[CosetRep]:
    """All cosets of L whose window slice is nonempty, canonically ordered.

    Viability of z + L depends only on the label pi'' z: the slice is
    nonempty exactly when the label lies in pi'' applied to the shifted
    unit cube, a zonotope of dimension k - 6.  Labels form a lattice of
    that same rank, so the search walks integer coordinates in a reduced
    basis of the label lattice against the zonotope's exact facet rows and
    never branches over the k-dimensional fiber.  A survivor sits on the
    boundary exactly when some facet row is tight, which separates
    lower_dim from full_dim without any further elimination.
    """
    from sympy import ZZ
    from sympy.polys.matrices import DomainMatrix

    k = data.k
    gamma = _normalize_offset(offset, k)
    mat, d = _rational_projector(data)
    hh, uu, pivots = column_hnf(mat)
    rank = len(pivots)
    if rank != k - 6:
        raise ValueError("image lattice of pi'' has unexpected rank")
    piv_rows = [r for r, _ in pivots]

    wrows = [[hh[i][j] for i in range(k)] for j in range(rank)]
    reduced, tmat = DomainMatrix.from_list(wrows, ZZ).lll_transform()
    wred = [[int(x) for x in row] for row in reduced.to_list()]
    tint = [[int(x) for x in row] for row in tmat.to_list()]
    # integer fiber preimages of the reduced basis: (d pi'') zvec[j] = wred[j]
    zvec = [
        [sum(t * uu[i][l] for l, t in enumerate(row) if t) for i in range(k)]
        for row in tint
    ]
    # the Hermite transform can leave preimages astronomically long; pull
    # each one back near the origin by rounding off its L-component (the
    # covector rows and the labels are both invariant under this shift)
    if rank:
        ginv = _gn_matrix_inverse([list(row) for row in lattice.gram])
        for row in zvec:
            ph = data.physical_embed(row)
            cj = data.conjugate_embed(row)
            y = [
                ph.dot(lattice.phys[j]) + cj.dot(lattice.conj[j])
                for j in range(6)
            ]
            for a in range(6):
                c = _gn_weighted_scalar(ginv[a], y)
                assert c.gold == 0
                m = (2 * c.rat + 1) // 2
                if m:
                    for i in range(k):
                        row[i] -= m * lattice.basis[a][i]

    # every zonotope generator (a column of d pi'') is itself a label, so
    # its coordinates in the reduced basis are integers
    winv = _gn_matrix_inverse(
        [[GN(wred[j][r]) for j in range(rank)] for r in piv_rows]
    )
    gens: list[list[int]] = []
    for i in range(k):
        col = [GN(mat[r][i]) for r in piv_rows]
        coords = []
        for a in range(rank):
            x = _gn_weighted_scalar(winv[a], col)
            assert x.gold == 0 and x.rat.denominator == 1
            coords.append(int(x.rat))
        gens.append(coords)
    shift = [
        _gn_weighted_scalar(
            winv[a],
            [
                sum((gamma[i] * (-mat[r][i]) for i in range(k) if mat[r][i]), ZERO)
                for r in piv_rows
            ],
        )
        for a in range(rank)
    ]
    trange: list[tuple[int, int]] = []
    for j in range(rank):
        lo = sum(min(0, g[j]) for g in gens)
        hi = sum(max(0, g[j]) for g in gens)
        trange.append(((shift[j] + lo).ceil(), (shift[j] + hi).floor()))

    # facet rows carried to label coordinates: c . z depends only on the
    # label because c annihilates L, so it is linear in t; keep one row per
    # primitive direction with the tightest bound
    tightest: dict[tuple[int, ...], GoldenNumber] = {}
    for zc, rhs in _covector_rows(
        [[lattice.basis[j][i] for j in range(6)] for i in range(k)], gamma, k
    ):
        a = tuple(
            sum(c * zv[i] for i, c in enumerate(zc) if c) for zv in zvec
        )
        g = 0
        for x in a:
            g = gcd(g, x)
        a = tuple(x // g for x in a)
        rhs = rhs * GN(Fraction(1, g))
        best = tightest.get(a)
        if best is None or (rhs - best).sign() < 0:
            tightest[a] = rhs
    scaled = []
    for a, rhs in sorted(tightest.items()):
        scaled.append((tuple(c * rhs.q for c in a), rhs.a, rhs.b))

    by_coord: list[list[tuple[int, int, int]]] = [[] for _ in range(rank)]
    for idx, (tc, ra, rb) in enumerate(scaled):
        support = [j for j in range(rank) if tc[j]]
        # minimum possible contribution of the coordinates after each
        # support position, from the static ranges
        acc = 0
        tail: dict[int, int] = {}
        for j in reversed(support):
            tail[j] = acc
            lo_j, hi_j = trange[j]
            acc += min(tc[j] * lo_j, tc[j] * hi_j)
        for j in support:
            by_coord[j].append((idx, tc[j], tail[j]))

    part = [0] * len(scaled)
    t = [0] * rank
    found: list[CosetRep] = []
    seen_labels: set[tuple[int, ...]] = set()

    def emit() -> None:
        status = "full_dim"
        for idx, (_, ra, rb) in enumerate(scaled):
            if rb == 0 and part[idx] == ra:
                status = "lower_dim"
                break
        z = tuple(
            sum(t[j] * zvec[j][i] for j in range(rank)) for i in range(k)
        )
        v = tuple(sum(t[j] * wred[j][i] for j in range(rank)) for i in range(k))
        assert v not in seen_labels
        seen_labels.add(v)
        found.append(CosetRep(z, tuple(Fraction(x, d) for x in v), status))

    def descend(depth: int) -> None:
        if depth == rank:
            emit()
            return
        lo_d, hi_d = trange[depth]
        for idx, c, rest_min in by_coord[depth]:
            # weakest completion requirement: c t_d <= rhs - part - rest_min
            pa = scaled[idx][1] - part[idx] - rest_min
            pb = scaled[idx][2]
            if c > 0:
                hi_d = min(hi_d, _pair_floor_div(pa, pb, c))
                if hi_d < lo_d:
                    return
            else:
                lo_d = max(lo_d, -_pair_floor_div(pa, pb, -c))
                if hi_d < lo_d:
                    return
        for val in range(lo_d, hi_d + 1):
            if val:
                for idx, c, _ in by_coord[depth]:
                    part[idx] += c * val
            t[depth] = val
            descend(depth + 1)
            if val:
                for idx, c, _ in by_coord[depth]:
                    part[idx] -= c * val
        t[depth] = 0

    descend(0)
    found.sort(key=lambda cr: cr.second_proj)
    return found


def scheme_index(lattice: SixLattice, data: SuperspaceData) -> int:
    """Index of L inside the projected lattice, via Smith normal form."""
    entries = data.pi_second.entries
    k = data.k
    d = 1
    for i in range(k):
        for j in range(k):
            x = (ONE if i == j else ZERO) - entries[i][j]
            assert x.gold == 0
            d = d * x.q // gcd(d, x.q)
    mat = []
    for i in range(k):
        row = []
        for j in range(k):
            x = (ONE if i == j else ZERO) - entries[i][j]
            row.append(x.a * (d // x.q))
        mat.append(row)
    complement = integer_kernel(mat)
    if len(complement) != k - 6:
        raise ValueError("kernel of pi + pi' has unexpected rank")
    columns = [list(b) for b in lattice.basis] + complement
    return lattice_index(columns)


class _FiberSampler:
    """Exact membership for the reduced route.

    Same window condition as the strip (witness form, opposite sign on w,
    variables eliminated in reverse coordinate order), so the elimination
    path through the kernel is genuinely different from StripSampler's.
    """

    def __init__(self, data: SuperspaceData, offset: Offset = None) -> None:
        self.data = data
        self.k = data.k
        self.offset = _normalize_offset(offset, self.k)
        self._memo: dict[tuple[int, ...], bool] = {}
        self._pos = []
        self._neg = []
        for e, g in zip(data.cluster.half, self.offset):
            scale = g.q
            for c in e:
                scale = scale * c.q // gcd(scale, c.q)
            rev = tuple(
                (c.a * (scale // c.q), c.b * (scale // c.q)) for c in reversed(e)
            )
            gp = (g.a * (scale // g.q), g.b * (scale // g.q))
            self._pos.append((rev, scale, gp))
            self._neg.append((tuple((-a, -b) for a, b in rev), scale, gp))

    def member(self, n: Sequence[int]) -> bool:
        key = tuple(n)
        hit = self._memo.get(key)
        if hit is None:
            rows: list[IntRow] = []
            for i in range(self.k):
                rev, scale, (ga, gb) = self._pos[i]
                nrev = self._neg[i][0]
                base = n[i] * scale + ga
                #  <w,e_i> <= 1 - n_i - gamma_i  and  -<w,e_i> <= n_i + gamma_i
                rows.append((rev, (scale - base, -gb), False))
                rows.append((nrev, (base, gb), False))
            hit = self._memo[key] = int_feasible(rows, 3)
        return hit


class MsmScheme:
    """The full reduced description: sublattice, cosets, and sizes."""

    def __init__(
        self, data: SuperspaceData, offset: Offset = None
    ) -> None:
        self.data = data
        self.offset = _normalize_offset(offset, data.k)
        self.lattice = sublattice_basis(data)
        self.cosets = coset_reps(data, self.lattice, self.offset)
        self.m = sum(c.surface_status == "full_dim" for c in self.cosets)
        self.index = scheme_index(self.lattice, data)
        self._imat, self._d = _rational_projector(data)
        self._by_scaled_label = {
            self._scale_label(c.second_proj): c for c in self.cosets
        }
        self._sampler = _FiberSampler(data, self.offset)
        self._build_image_lattice()

    def _build_image_lattice(self) -> None:
        """Transversal of the (phys; conj)-embedding kernel.

        The embedding maps Z^k onto a rank-6 lattice in R^6; a pattern
        point's embedding always lies on it, so generation scans this
        lattice once instead of every coset separately.  The fiber over an
        image point is a translate of the embedding kernel, and the labels
        of that fiber form one residue class of the label lattice, so each
        image point meets only |cosets| / index cosets on average.
        """
        data = self.data
        k = data.k
        d = self._d
        mat2 = [
            [(d if i == j else 0) - self._imat[i][j] for j in range(k)]
            for i in range(k)
        ]
        _, u2, piv2 = column_hnf(mat2)
        if len(piv2) != 6:
            raise ValueError("pi + pi' has unexpected rank")
        svecs = [[u2[i][a] for i in range(k)] for a in range(6)]
        kcols = [[u2[i][a] for i in range(k)] for a in range(6, k)]
        if kcols:
            # transversal vectors are only defined modulo the kernel; pull
            # their coordinates down against its Hermite form
            kh, _, kpiv = column_hnf(
                [[kcols[a][i] for a in range(len(kcols))] for i in range(k)]
            )
            for s in svecs:
                for r, j in kpiv:
                    q = s[r] // kh[r][j]
                    if q:
                        for i in range(k):
                            s[i] -= q * kh[i][j]

        def embeds(vecs):
            phys = [data.physical_embed(v) for v in vecs]
            conj = [data.conjugate_embed(v) for v in vecs]
            gram = [
                [
                    phys[i].dot(phys[j]) + conj[i].dot(conj[j])
                    for j in range(len(vecs))
                ]
                for i in range(len(vecs))
            ]
            return phys, conj, gram

        _, _, raw_gram = embeds(svecs)
        assert all(g.gold == 0 for row in raw_gram for g in row)
        u = gram_lll([[g.rat for g in row] for row in raw_gram])
        self._svecs = [
            [sum(u[a][l] * svecs[l][i] for l in range(6)) for i in range(k)]
            for a in range(6)
        ]
        sphys, sconj, _ = embeds(self._svecs)
        self._image_rows = [
            [sphys[a][axis] for a in range(6)] for axis in range(3)
        ] + [[sconj[a][axis] for a in range(6)] for axis in range(3)]
        self._image_inv = _gn_matrix_inverse(self._image_rows)
        self._residues: dict[tuple[int, ...], list] = {}
        for c in self.cosets:
            lab = self._scale_label(c.second_proj)
            key = tuple(x % d for x in lab)
            self._residues.setdefault(key, []).append((lab, c))

    def _scale_label(self, label: Sequence[Fraction]) -> tuple[int, ...]:
        out = []
        for x in label:
            v = x * self._d
            assert v.denominator == 1
            out.append(int(v))
        return tuple(out)

    def scaled_label(self, n: Sequence[int]) -> tuple[int, ...]:
        """d * pi'' n as an integer vector (the coset key for n)."""
        return tuple(
            sum(row[i] * n[i] for i in range(self.data.k) if n[i])
            for row in self._imat
        )

    def coset_of(self, n: Sequence[int]) -> Optional[CosetRep]:
        return self._by_scaled_label.get(self.scaled_label(n))

    def surface_membership(self, coset: CosetRep, n: Sequence[int]) -> bool:
        expect = self._scale_label(coset.second_proj)
        if self.scaled_label(n) != expect:
            raise ValueError("lattice point does not lie on the given coset")
        return self._sampler.member(n)


def build_scheme(data: SuperspaceData, offset: Offset = None) -> MsmScheme:
    return MsmScheme(data, offset)


def _gn_matrix_inverse(
    m: Sequence[Sequence[GoldenNumber]],
) -> list[list[GoldenNumber]]:
    """Exact inverse by Gauss-Jordan; raises on singular input."""
    size = len(m)
    a = [list(row) for row in m]
    inv = [
        [ONE if i == j else ZERO for j in range(size)] for i in range(size)
    ]
    for col in range(size):
        piv = next(
            (r for r in range(col, size) if a[r][col].sign() != 0), None
        )
        if piv is None:
            raise ValueError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        f = a[col][col].inverse()
        a[col] = [x * f for x in a[col]]
        inv[col] = [x * f for x in inv[col]]
        for r in range(size):
            if r != col and a[r][col].sign() != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return inv


def _interval_mul(
    c: GoldenNumber, lo: GoldenNumber, hi: GoldenNumber
) -> tuple[GoldenNumber, GoldenNumber]:
    return (c * lo, c * hi) if c.sign() >= 0 else (c * hi, c * lo)


def _gn_weighted_scalar(
    coeffs: Sequence[GoldenNumber], values: Sequence[GoldenNumber]
) -> GoldenNumber:
    out = ZERO
    for c, v in zip(coeffs, values):
        out = out + c * v
    return out


def _window_boxes(
    scheme: MsmScheme, radius_sq: GoldenNumber
) -> tuple[list[GoldenNumber], list[GoldenNumber]]:
    """Outer bounds on (phys; conj) of accepted points, per coordinate.

    Physical part from the ball, conjugate part from the zonotope spanned
    by the conjugate cluster segments, shifted by the offset image.
    """
    data = scheme.data
    r_up = GN(sqrt_upper(radius_sq))
    shift = Vec3(ZERO, ZERO, ZERO)
    for g, ep in zip(scheme.offset, data.conj_cluster):
        shift = shift + ep.scale(g)
    t_lo = [-r_up, -r_up, -r_up]
    t_hi = [r_up, r_up, r_up]
    for axis in range(3):
        lo = hi = ZERO
        for ep in data.conj_cluster:
            c = ep[axis]
            if c.sign() >= 0:
                hi = hi + c
            else:
                lo = lo + c
        t_lo.append(lo - shift[axis])
        t_hi.append(hi - shift[axis])
    return t_lo, t_hi


def _image_scan(
    scheme: MsmScheme,
    radius_sq: GoldenNumber,
    t_lo: list[GoldenNumber],
    t_hi: list[GoldenNumber],
) -> list[tuple[tuple[int, ...], Vec3]]:
    """Image-lattice points inside ball times conjugate window box.

    DFS over the integer coordinates in the reduced transversal basis with
    exact interval pruning on all 6 embedding coordinates; leaves pass the
    exact ball test.  Each survivor stands for the whole fiber over it.
    """
    k = scheme.data.k
    mat = scheme._image_rows
    inv = scheme._image_inv
    svecs = scheme._svecs
    box = []
    for j in range(6):
        mlo = mhi = ZERO
        for a in range(6):
            w_lo, w_hi = _interval_mul(inv[j][a], t_lo[a], t_hi[a])
            mlo = mlo + w_lo
            mhi = mhi + w_hi
        box.append((mlo.ceil(), mhi.floor()))
    if any(lo > hi for lo, hi in box):
        return []
    # static reach of the remaining depths, per coordinate
    rem_lo = [[ZERO] * 6 for _ in range(7)]
    rem_hi = [[ZERO] * 6 for _ in range(7)]
    for depth in reversed(range(6)):
        blo, bhi = box[depth]
        for a in range(6):
            w_lo, w_hi = _interval_mul(mat[a][depth], GN(blo), GN(bhi))
            rem_lo[depth][a] = rem_lo[depth + 1][a] + w_lo
            rem_hi[depth][a] = rem_hi[depth + 1][a] + w_hi

    out: list[tuple[tuple[int, ...], Vec3]] = []
    s = [0] * 6
    t = [ZERO] * 6

    def descend(depth: int) -> None:
        rlo = rem_lo[depth]
        rhi = rem_hi[depth]
        for a in range(6):
            if (t_hi[a] - t[a] - rlo[a]).sign() < 0:
                return
            if (t[a] + rhi[a] - t_lo[a]).sign() < 0:
                return
        if depth == 6:
            phys = Vec3(t[0], t[1], t[2])
            if (radius_sq - phys.norm2()).sign() < 0:
                return
            n0 = [0] * k
            for a in range(6):
                if s[a]:
                    for i in range(k):
                        n0[i] += s[a] * svecs[a][i]
            out.append((tuple(n0), phys))
            return
        blo, bhi = box[depth]
        col = [mat[a][depth] for a in range(6)]
        for val in range(blo, bhi + 1):
            s[depth] = val
            if val:
                saved = list(t)
                for a in range(6):
                    t[a] = t[a] + col[a] * val
                descend(depth + 1)
                t[:] = saved
            else:
                descend(depth + 1)
        s[depth] = 0

    descend(0)
    return out


_POOL_STATE: Optional[tuple] = None


def _msm_pool_worker(bounds: tuple[int, int]):
    scheme, candidates, full_dim_only = _POOL_STATE
    lo, hi = bounds
    return _msm_worker((scheme, candidates[lo:hi], full_dim_only))


def _msm_worker(args):
    scheme, candidates, full_dim_only = args
    d = scheme._d
    out = []
    for n0, phys, key, base in candidates:
        accepted = []
        for lab, coset in scheme._residues.get(key, ()):
            if full_dim_only and coset.surface_status != "full_dim":
                continue
            n = tuple(
                x + (l - b) // d for x, l, b in zip(n0, lab, base)
            )
            if scheme._sampler.member(n):
                accepted.append(n)
        if accepted:
            # a closed window can accept several sources in one fiber
            # (they differ by kernel vectors, so they share phys and
            # conjugate embeds exactly); keep the smallest, matching the
            # dedup rule of assemble_pattern
            out.append((min(accepted), phys))
    return out


def generate_msm(
    scheme: MsmScheme,
    radius_sq,
    offset: Offset = None,
    full_dim_only: bool = False,
    workers: int = 1,
) -> Pattern:
    """All pattern points with |phys|^2 <= radius_sq, via the fibration.

    One box search over the rank-6 image lattice collects every embedding
    a pattern point could have (exact ball bound, exact conjugate window
    bounds); the fiber over each is a kernel translate whose labels form a
    single residue class, so only the handful of viable cosets in that
    class is tested with the exact fiber membership decision.  Candidate
    fibers are independent, so they parallelize; the merge is order-free.
    """
    data = scheme.data
    k = data.k
    radius_sq = (
        radius_sq if isinstance(radius_sq, GoldenNumber) else GN(radius_sq)
    )
    if radius_sq.sign() <= 0:
        raise ValueError("radius_sq must be positive")
    gamma = _normalize_offset(offset, k)
    if gamma != scheme.offset:
        raise ValueError("offset differs from the one the scheme was built for")

    t_lo, t_hi = _window_boxes(scheme, radius_sq)
    d = scheme._d
    candidates = []
    for n0, phys in _image_scan(scheme, radius_sq, t_lo, t_hi):
        base = scheme.scaled_label(n0)
        key = tuple(x % d for x in base)
        candidates.append((n0, phys, key, base))

    if workers > 1 and len(candidates) > 1:
        from multiprocessing import Pool

        # workers inherit the scheme by fork instead of by pickle; they
        # receive only index ranges
        global _POOL_STATE
        size = (len(candidates) + workers - 1) // workers
        jobs = [
            (lo, min(lo + size, len(candidates)))
            for lo in range(0, len(candidates), size)
        ]
        _POOL_STATE = (scheme, candidates, full_dim_only)
        try:
            with Pool(len(jobs)) as pool:
                parts = pool.map(_msm_pool_worker, jobs)
        finally:
            _POOL_STATE = None
        raw = [item for part in parts for item in part]
    else:
        raw = _msm_worker((scheme, candidates, full_dim_only))

    chosen: dict[Vec3, tuple[int, ...]] = {}
    for n, phys in raw:
        if phys in chosen:
            # distinct candidates are distinct image-lattice points, so a
            # shared phys here would mean two points of the rank-6 lattice
            # with equal physical part: exactly the injectivity that makes
            # the pattern a function of position
            raise AssertionError(
                "two image-lattice points share a physical position; "
                "injectivity violated"
            )
        chosen[phys] = n
    items = sorted(chosen.items(), key=lambda kv: kv[0])

    neighbor_cols = [
        tuple(row[i] for row in scheme._imat) for i in range(k)
    ]
    points = []
    for phys, n in items:
        label = scheme.scaled_label(n)
        flags = []
        for delta in (1, -1):
            for i in range(k):
                key = tuple(
                    l + delta * c for l, c in zip(label, neighbor_cols[i])
                )
                if key not in scheme._by_scaled_label:
                    flags.append(False)
                    continue
                nb = tuple(
                    x + (delta if idx == i else 0)
                    for idx, x in enumerate(n)
                )
                flags.append(scheme._sampler.member(nb))
        points.append(PatternPoint(phys, n, tuple(flags)))
    return Pattern(points, radius_sq, gamma)


def _gn_weighted(
    vectors: Sequence[Vec3], weights: Sequence[GoldenNumber]
) -> Vec3:
    acc = Vec3(ZERO, ZERO, ZERO)
    for v, w in zip(vectors, weights):
        if w.sign():
            acc = acc + v.scale(w)
    return acc


class AtomicSurface:
    """One coset's window in conjugate space, with an exact decider.

    Membership of q reduces to feasibility in 3 variables: the slice
    parameters u are split so that the conjugate-image equality determines
    three of them affinely in q, and the remaining three run free through
    the 2k box inequalities.
    """

    def __init__(self, scheme: MsmScheme, coset: CosetRep) -> None:
        self.scheme = scheme
        self.coset = coset
        self.vertices: Optional[list[Vec3]] = None
        data = scheme.data
        basis = scheme.lattice.basis
        conj = scheme.lattice.conj
        # q0 = conjugate image of z + gamma
        self._q0 = data.conjugate_embed(coset.z) + _gn_weighted(
            data.conj_cluster, scheme.offset
        )
        # pick 3 dependent u-columns making the conjugate map invertible
        cols = list(range(6))
        dep: list[int] = []
        m3: list[list[GoldenNumber]] = []
        for j in cols:
            cand = m3 + [[conj[j][a] for a in range(3)]]
            if len(cand) <= 3 and _gn_rank(cand) == len(cand):
                m3 = cand
                dep.append(j)
            if len(dep) == 3:
                break
        if len(dep) != 3:
            raise ValueError("conjugate images of the sublattice are degenerate")
        self._dep = dep
        free = [j for j in cols if j not in dep]
        mdep = [[conj[j][a] for j in dep] for a in range(3)]
        self._dep_inv = _gn_matrix_inverse(mdep)
        # u_dep(v, q) = dep_inv (q - q0) - sol_cols . v
        sol_cols = [
            [
                sum(
                    (self._dep_inv[s][a] * conj[j][a] for a in range(3)), ZERO
                )
                for s in range(3)
            ]
            for j in free
        ]
        k = data.k
        self._base0 = [
            GN(0) + scheme.offset[i] + coset.z[i] for i in range(k)
        ]
        self._bdep = [
            [GN(basis[j][i]) for j in dep] for i in range(k)
        ]
        self._row_coeffs = []
        for i in range(k):
            coeffs = []
            for idx, j in enumerate(free):
                c = GN(basis[j][i])
                for slot in range(3):
                    c = c - self._bdep[i][slot] * sol_cols[idx][slot]
                coeffs.append(c)
            self._row_coeffs.append(tuple(coeffs))

    def membership_system(self, q: Vec3) -> LinearSystem:
        """The 2k-row system in the 3 free slice parameters."""
        rhs3 = [q[a] - self._q0[a] for a in range(3)]
        part = [
            sum((self._dep_inv[s][a] * rhs3[a] for a in range(3)), ZERO)
            for s in range(3)
        ]
        rows = []
        for i in range(self.scheme.data.k):
            base = self._base0[i]
            for slot in range(3):
                if self._bdep[i][slot].sign():
                    base = base + self._bdep[i][slot] * part[slot]
            coeffs = self._row_coeffs[i]
            # 0 <= base + <coeffs, v> <= 1
            rows.append(Row(coeffs, ONE - base, False))
            rows.append(Row(tuple(-c for c in coeffs), base, False))
        return LinearSystem(rows, 3)

    def membership(self, q: Vec3) -> bool:
        system = self.membership_system(q)
        return int_feasible(system.int_rows(), 3)


def _gn_rank(rows: list[list[GoldenNumber]]) -> int:
    a = [list(r) for r in rows]
    rank = 0
    cols = len(a[0]) if a else 0
    for col in range(cols):
        piv = next(
            (r for r in range(rank, len(a)) if a[r][col].sign() != 0), None
        )
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        f = a[rank][col].inverse()
        a[rank] = [x * f for x in a[rank]]
        for r in range(len(a)):
            if r != rank and a[r][col].sign() != 0:
                g = a[r][col]
                a[r] = [x - g * y for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


def surface_vertices(
    scheme: MsmScheme, coset: CosetRep, max_k: int = 16
) -> list[Vec3]:
    """Exact vertex set of the coset's window polytope in conjugate space.

    Vertices of the 6-dimensional slice come from active-set enumeration
    (6 facet rows at a time, one side each), are projected by the conjugate
    embedding, and reduced to hull vertices by exact separation tests.
    """
    data = scheme.data
    k = data.k
    if k > max_k:
        raise ValueError(
            f"surface vertex enumeration guarded at k <= {max_k}, got {k}"
        )
    basis = scheme.lattice.basis
    base = [
        GN(0) + scheme.offset[i] + coset.z[i] for i in range(k)
    ]  # constant term per row of the slice system
    brows = [[GN(basis[j][i]) for j in range(6)] for i in range(k)]

    slice_points: list[list[GoldenNumber]] = []
    seen_u: set[tuple[GoldenNumber, ...]] = set()
    from itertools import combinations

    for active in combinations(range(k), 6):
        mat = [brows[i] for i in active]
        try:
            inv = _gn_matrix_inverse(mat)
        except ValueError:
            continue
        for sides in range(64):
            rhs = [
                (ONE if (sides >> slot) & 1 else ZERO) - base[i]
                for slot, i in enumerate(active)
            ]
            u = [
                sum((inv[j][s] * rhs[s] for s in range(6)), ZERO)
                for j in range(6)
            ]
            key = tuple(u)
            if key in seen_u:
                continue
            ok = True
            for i in range(k):
                val = base[i]
                for j in range(6):
                    if brows[i][j].sign():
                        val = val + brows[i][j] * u[j]
                if val.sign() < 0 or (ONE - val).sign() < 0:
                    ok = False
                    break
            if ok:
                seen_u.add(key)
                slice_points.append(u)

    conj = scheme.lattice.conj
    q0 = data.conjugate_embed(coset.z) + _gn_weighted(
        data.conj_cluster, scheme.offset
    )
    projected: set[Vec3] = set()
    for u in slice_points:
        projected.add(q0 + _gn_weighted(conj, u))

    from icopack.hull3 import extreme_points

    return sorted(extreme_points(list(projected)))

import itertools
import random
from fractions import Fraction

import pytest

from icopack.feasy import int_feasible
from icopack.hull3 import hull_facets, in_hull
from icopack.icosa import Vec3, standard_cluster
from icopack.intlat import column_hnf, integer_kernel, solve_in_lattice
from icopack.msm import (
    AtomicSurface,
    _rational_projector,
    _slice_rows,
    build_scheme,
    coset_reps,
    generate_msm,
    scheme_index,
    sublattice_basis,
    surface_vertices,
)
from icopack.qfield import GN, ZERO
from icopack.strip import generate_strip, in_strip
from icopack.superspace import build_superspace


# -- sublattice -----------------------------------------------------------


class TestSixLattice:
    def test_k6_is_whole_lattice(self, data6):
        lat = sublattice_basis(data6)
        assert len(lat.basis) == 6
        # pi'' = 0 at k = 6, so L = Z^6: the basis must be unimodular
        h, _, pivots = column_hnf(
            [[b[i] for b in lat.basis] for i in range(6)]
        )
        assert len(pivots) == 6
        det = 1
        for r, c in pivots:
            det *= h[r][c]
        assert det == 1

    def test_k16_rank_and_annihilation(self, data16):
        lat = sublattice_basis(data16)
        assert len(lat.basis) == 6
        mat, _ = _rational_projector(data16)
        for b in lat.basis:
            assert all(
                sum(row[j] * b[j] for j in range(16)) == 0 for row in mat
            )
        for i in range(6):
            for j in range(6):
                assert lat.gram[i][j] == lat.gram[j][i]
            assert lat.gram[i][i].sign() > 0

    def test_k16_kernel_complete(self, data16):
        # every integer solution of pi'' n = 0 is an integer combination
        # of the basis: reconstruct random combinations through the HNF
        lat = sublattice_basis(data16)
        cols = [[b[i] for b in lat.basis] for i in range(16)]
        h, _, pivots = column_hnf(cols)
        rng = random.Random(3)
        for _ in range(20):
            coeffs = [rng.randint(-7, 7) for _ in range(6)]
            n = [
                sum(c * b[i] for c, b in zip(coeffs, lat.basis))
                for i in range(16)
            ]
            assert solve_in_lattice(h, pivots, n) is not None


def _anchor_member(data, gamma, w):
    """A guaranteed strip member: n_i = ceil(<w, e_i> - gamma_i).

    The defining inequalities 0 <= n_i + gamma_i - <w, e_i> <= 1 hold for
    this choice with witness w, so membership needs no search.
    """
    n = []
    for e, g in zip(data.cluster.half, gamma):
        t = w.x * e.x + w.y * e.y + w.z * e.z - g
        n.append(t.ceil())
    return tuple(n)


def _random_anchor(rng):
    return Vec3(
        *(GN(Fraction(rng.randint(-24, 24), 7)) for _ in range(3))
    )


# -- coset enumeration ------------------------------------------------------


class TestCosetReps:
    def test_k6_single_trivial_coset(self, scheme6):
        assert len(scheme6.cosets) == 1
        coset = scheme6.cosets[0]
        assert coset.z == (0,) * 6
        assert all(x == 0 for x in coset.second_proj)
        assert coset.surface_status == "full_dim"
        assert scheme6.m == 1

    def test_k16_golden_counts(self, scheme16, goldens):
        assert len(scheme16.cosets) == goldens["k16"]["cosets"]
        assert scheme16.m == goldens["k16"]["m"]

    def test_k16_labels_distinct_and_sorted(self, scheme16):
        labels = [c.second_proj for c in scheme16.cosets]
        assert len(set(labels)) == len(labels)
        assert labels == sorted(labels)

    def test_k16_classification_against_fm_oracle(self, data16, scheme16):
        # the facet-based status must match the direct slice feasibility
        gamma = scheme16.offset
        basis = scheme16.lattice.basis
        for coset in scheme16.cosets[::2311]:
            assert int_feasible(
                _slice_rows(coset.z, gamma, basis, strict=False), 6
            )
            strict = int_feasible(
                _slice_rows(coset.z, gamma, basis, strict=True), 6
            )
            assert strict == (coset.surface_status == "full_dim")

    def test_k16_enumeration_sound_and_complete(self, data16, scheme16):
        gamma = scheme16.offset
        basis = scheme16.lattice.basis
        rng = random.Random(11)
        # soundness: points the scheme does not route have infeasible
        # slices (random 16-dim points essentially never hit a viable
        # label, so this samples the absent side)
        absent = 0
        for _ in range(30):
            n = tuple(rng.randint(-2, 2) for _ in range(16))
            feasible = int_feasible(
                _slice_rows(n, gamma, basis, strict=False), 6
            )
            if scheme16.coset_of(n) is None:
                assert not feasible
                absent += 1
            else:
                assert feasible
        assert absent
        # completeness: witness-built strip members always route to an
        # enumerated coset whose slice the oracle confirms feasible
        labels = set()
        for _ in range(20):
            n = _anchor_member(data16, gamma, _random_anchor(rng))
            assert in_strip(n, data16)
            coset = scheme16.coset_of(n)
            assert coset is not None
            assert int_feasible(
                _slice_rows(n, gamma, basis, strict=False), 6
            )
            labels.add(coset.second_proj)
        assert len(labels) > 1


# -- index ------------------------------------------------------------------


def _combined_hnf(scheme, data):
    mat, d = _rational_projector(data)
    k = data.k
    image_mat = [
        [(d if i == j else 0) - mat[i][j] for j in range(k)] for i in range(k)
    ]
    kernel = integer_kernel(image_mat)
    cols = [
        [b[i] for b in scheme.lattice.basis] for i in range(k)
    ]
    for v in kernel:
        for i in range(k):
            cols[i].append(v[i])
    return column_hnf(cols)


class TestSchemeIndex:
    def test_k6_trivial(self, scheme6):
        assert scheme6.index == 1

    def test_k16_golden(self, scheme16, goldens):
        assert scheme16.index == goldens["k16"]["index"]

    def test_k16_residue_count_oracle(self, data16, scheme16):
        """Fundamental-domain enumeration must reproduce the SNF index."""
        h, _, pivots = _combined_hnf(scheme16, data16)
        k = data16.k
        assert [r for r, _ in pivots] == list(range(k))
        diag = [h[i][i] for i in range(k)]

        def canonical(x):
            x = list(x)
            for i in range(k):
                q = x[i] // diag[i]
                if q:
                    for r in range(i, k):
                        x[r] -= q * h[r][i]
            return tuple(x)

        count = 0
        for rep in itertools.product(*(range(d) for d in diag)):
            assert canonical(rep) == rep
            count += 1
        assert count == scheme16.index

        rng = random.Random(5)
        reps = set()
        for _ in range(200):
            x = [rng.randint(-40, 40) for _ in range(k)]
            r = canonical(x)
            assert all(0 <= r[i] < diag[i] for i in range(k))
            reps.add(r)
            # shifting by a lattice vector never changes the residue
            j = rng.randrange(k)
            shifted = [a + h[i][j] for i, a in enumerate(x)]
            assert canonical(shifted) == r
        assert len(reps) > 1

    def test_k16_distinct_reps_inequivalent(self, data16, scheme16):
        h, _, pivots = _combined_hnf(scheme16, data16)
        k = data16.k
        nontrivial = [i for i in range(k) if h[i][i] > 1]
        rng = random.Random(9)
        for _ in range(30):
            a = [0] * k
            b = [0] * k
            for i in nontrivial:
                a[i] = rng.randrange(h[i][i])
                b[i] = rng.randrange(h[i][i])
            if a == b:
                continue
            diff = [x - y for x, y in zip(a, b)]
            assert solve_in_lattice(h, pivots, diff) is None


# -- membership oracle -------------------------------------------------------


class TestSurfaceMembership:
    def test_trivial_points(self, scheme6):
        coset = scheme6.cosets[0]
        assert scheme6.surface_membership(coset, (0,) * 6)
        for i in range(6):
            unit = [0] * 6
            unit[i] = 1
            assert scheme6.surface_membership(coset, tuple(unit))

    def test_precondition_enforced(self, scheme16):
        coset = scheme16.cosets[0]
        off = next(
            c for c in scheme16.cosets if c.second_proj != coset.second_proj
        )
        n = off.z
        with pytest.raises(ValueError):
            scheme16.surface_membership(coset, n)

    def test_agrees_with_strip_oracle_k6(self, data6, scheme6):
        coset = scheme6.cosets[0]
        rng = random.Random(1)
        hits = 0
        for _ in range(300):
            n = tuple(rng.randint(-3, 3) for _ in range(6))
            got = scheme6.surface_membership(coset, n)
            assert got == in_strip(n, data6)
            hits += got
        assert hits

    def test_agrees_with_strip_oracle_k16(self, data16, scheme16):
        rng = random.Random(2)
        routed = unrouted = 0
        for _ in range(150):
            n = tuple(rng.randint(-1, 1) for _ in range(16))
            coset = scheme16.coset_of(n)
            if coset is None:
                assert not in_strip(n, data16)
                unrouted += 1
            else:
                got = scheme16.surface_membership(coset, n)
                assert got == in_strip(n, data16)
                routed += 1
        assert routed and unrouted


# -- generation ---------------------------------------------------------------


class TestGeneration:
    def test_k6_equals_strip(self, strip6_r25, msm6_r25):
        assert msm6_r25.points == strip6_r25.points

    def test_k16_equals_strip(self, strip16_r25, msm16_r25):
        assert msm16_r25.points == strip16_r25.points

    def test_contains_origin_and_cluster(self, data6, msm6_r25):
        phys = msm6_r25.phys_set()
        assert Vec3(ZERO, ZERO, ZERO) in phys
        for e in data6.cluster.half:
            assert e in phys

    def test_full_dim_only_matches_at_k6(self, scheme6, msm6_r25):
        pat = generate_msm(scheme6, GN(25), full_dim_only=True)
        assert pat.points == msm6_r25.points

    def test_worker_split_is_invisible(self, scheme6, msm6_r25):
        pat = generate_msm(scheme6, GN(25), workers=3)
        assert pat.points == msm6_r25.points

    def test_k6_offset_routes_agree(self, data6):
        gamma = tuple(
            GN(Fraction(1, p)) for p in (3, 5, 7, 11, 13, 17)
        )
        strip_pat = generate_strip(data6, GN(25), gamma, mode="exhaustive")
        scheme = build_scheme(data6, gamma)
        msm_pat = generate_msm(scheme, GN(25), gamma)
        assert len(strip_pat.points) > 50
        assert msm_pat.points == strip_pat.points

    def test_k16_offset_routing_agrees(self, data16):
        # nonzero offset shifts the viability zonotope; the enumeration
        # must stay consistent with the strip oracle on both sides
        gamma = [ZERO] * 16
        gamma[0] = GN(Fraction(1, 7))
        gamma[9] = GN(Fraction(-1, 5))
        gamma = tuple(gamma)
        lattice = sublattice_basis(data16)
        cosets = coset_reps(data16, lattice, gamma)
        assert len(cosets) > 1
        by_label = {c.second_proj: c for c in cosets}
        mat, d = _rational_projector(data16)

        def label_of(n):
            return tuple(
                Fraction(sum(row[j] * n[j] for j in range(16)), d)
                for row in mat
            )

        rng = random.Random(4)
        unrouted = 0
        for _ in range(60):
            n = tuple(rng.randint(-1, 1) for _ in range(16))
            if label_of(n) not in by_label:
                assert not in_strip(n, data16, gamma)
                unrouted += 1
        assert unrouted
        labels = set()
        for _ in range(20):
            n = _anchor_member(data16, gamma, _random_anchor(rng))
            assert in_strip(n, data16, gamma)
            label = label_of(n)
            assert label in by_label
            labels.add(label)
        assert len(labels) > 1

    def test_radius_validation(self, scheme6):
        with pytest.raises(ValueError):
            generate_msm(scheme6, GN(0))
        with pytest.raises(ValueError):
            generate_msm(scheme6, GN(25), offset=(GN(1),) * 6)

    def test_k16_fiber_selection_is_canonical(self, scheme16, msm16_r25):
        """Closed-window fibers: source = smallest accepted preimage.

        Same-fiber preimages must share both embeddings exactly (they
        differ by embedding-kernel vectors); the stored source must be
        the lexicographic minimum of the accepted ones.
        """
        d = scheme16._d
        rng = random.Random(8)
        points = rng.sample(msm16_r25.points, 80)
        multi = 0
        for p in points:
            base = scheme16.scaled_label(p.source)
            key = tuple(x % d for x in base)
            accepted = []
            for lab, _ in scheme16._residues.get(key, ()):
                n = tuple(
                    x + (l - b) // d
                    for x, l, b in zip(p.source, lab, base)
                )
                if scheme16._sampler.member(n):
                    accepted.append(n)
            assert p.source in accepted
            assert min(accepted) == p.source
            for n in accepted:
                assert scheme16.data.physical_embed(n) == p.phys
                assert scheme16.data.conjugate_embed(n) == (
                    scheme16.data.conjugate_embed(p.source)
                )
            multi += len(accepted) > 1
        assert multi  # the phenomenon actually occurs at k = 16

    def test_masks_match_literal_neighbor_membership(self, data16, msm16_r25):
        rng = random.Random(6)
        for p in rng.sample(msm16_r25.points, 12):
            flags = []
            for delta in (1, -1):
                for i in range(16):
                    nb = list(p.source)
                    nb[i] += delta
                    flags.append(in_strip(nb, data16))
            assert tuple(flags) == p.neighbor_mask


# -- star map and injectivity identities --------------------------------------


class TestSchemeIdentities:
    @pytest.mark.parametrize("k", [6, 16])
    def test_star_map_is_componentwise_conjugation(self, k, data6, data16):
        data = data6 if k == 6 else data16
        rng = random.Random(k)
        for _ in range(40):
            n = [rng.randint(-4, 4) for _ in range(k)]
            phys = data.physical_embed(n)
            conj = data.conjugate_embed(n)
            assert conj == Vec3(
                phys.x.conjugate(), phys.y.conjugate(), phys.z.conjugate()
            )

    @pytest.mark.parametrize("k", [6, 16])
    def test_density_generator_identity(self, k, data6, data16):
        data = data6 if k == 6 else data16
        for j in range(k):
            unit = [0] * k
            unit[j] = 1
            assert data.conjugate_embed(unit) == data.conj_cluster[j]

    def test_embedding_kernel_has_zero_embeddings(self, data16):
        mat, d = _rational_projector(data16)
        image_mat = [
            [(d if i == j else 0) - mat[i][j] for j in range(16)]
            for i in range(16)
        ]
        kernel = integer_kernel(image_mat)
        assert len(kernel) == 10
        zero = Vec3(ZERO, ZERO, ZERO)
        for v in kernel:
            assert data16.physical_embed(v) == zero
            assert data16.conjugate_embed(v) == zero

    def test_embedding_kernel_trivial_at_k6(self, data6):
        mat, d = _rational_projector(data6)
        image_mat = [
            [(d if i == j else 0) - mat[i][j] for j in range(6)]
            for i in range(6)
        ]
        assert integer_kernel(image_mat) == []


# -- atomic surfaces -----------------------------------------------------------


class TestAtomicSurface:
    def test_k6_vertex_and_facet_counts(self, scheme6):
        vertices = surface_vertices(scheme6, scheme6.cosets[0])
        assert len(vertices) == 32
        assert len(hull_facets(vertices)) == 30

    def test_vertices_pass_membership(self, scheme6):
        coset = scheme6.cosets[0]
        surface = AtomicSurface(scheme6, coset)
        for v in surface_vertices(scheme6, coset):
            assert surface.membership(v)

    def test_hull_agrees_with_membership_on_probes(self, scheme6):
        coset = scheme6.cosets[0]
        surface = AtomicSurface(scheme6, coset)
        vertices = surface_vertices(scheme6, coset)
        los = [min((v[a] for v in vertices), key=float) for a in range(3)]
        his = [max((v[a] for v in vertices), key=float) for a in range(3)]
        rng = random.Random(12)
        inside = outside = 0
        for _ in range(100):
            q = Vec3(
                *(
                    lo + (hi - lo) * GN(Fraction(rng.randint(-3, 23), 20))
                    for lo, hi in zip(los, his)
                )
            )
            hull_says = in_hull(q, vertices)
            assert hull_says == surface.membership(q)
            inside += hull_says
            outside += not hull_says
        assert inside and outside

    def test_membership_system_shape(self, scheme6):
        surface = AtomicSurface(scheme6, scheme6.cosets[0])
        system = surface.membership_system(Vec3(ZERO, ZERO, ZERO))
        assert system.num_vars == 3
        assert len(system.rows) == 12

    def test_dimension_guard(self, scheme6):
        with pytest.raises(ValueError):
            surface_vertices(scheme6, scheme6.cosets[0], max_k=3)


# -- scheme on a degenerate input ----------------------------------------------


def test_rejects_rank_deficient_projector():
    class FakeProjector:
        entries = ((GN(Fraction(1, 2)),),)

    class FakeData:
        k = 1
        pi_second = FakeProjector()

    with pytest.raises(ValueError):
        sublattice_basis(FakeData())

from fractions import Fraction

import pytest

from icopack.icosa import (
    CHARACTER_TABLE,
    CLASS_SIZES,
    IRREP_DIMS,
    T_A,
    T_B,
    IDENTITY_MATRIX,
    Vec3,
    build_cluster,
    build_group,
    classify_ray,
    cluster_from_config,
    decompose_character,
    mat_det,
    mat_mul,
    mat_transpose,
    mat_vec,
    ray_seed,
    standard_cluster,
)
from icopack.qfield import GN, ONE, TAU, ZERO


@pytest.fixture(scope="module")
def group():
    return build_group()


class TestGroup:
    def test_sixty_elements(self, group):
        assert len(group.elements) == 60
        assert len({g.matrix for g in group}) == 60

    def test_class_sizes(self, group):
        assert sorted(c.size for c in group.classes) == [1, 12, 12, 15, 20]
        assert [c.size for c in group.classes] == [1, 12, 15, 20, 12]
        assert [c.label for c in group.classes] == ["e", "a", "b", "ab", "a2"]

    def test_presentation(self, group):
        ia, ib = group.index_of(T_A), group.index_of(T_B)
        assert group.element_order(ia) == 5
        assert group.element_order(ib) == 2
        assert group.element_order(group.mul(ia, ib)) == 3

    def test_all_rotations(self, group):
        for g in group.elements:
            assert mat_mul(mat_transpose(g.matrix), g.matrix) == IDENTITY_MATRIX
            assert mat_det(g.matrix) == ONE

    def test_closure(self, group):
        # products of class representatives stay inside the listed elements
        for c1 in group.classes:
            for c2 in group.classes:
                m = mat_mul(
                    group.elements[c1.representative].matrix,
                    group.elements[c2.representative].matrix,
                )
                assert group.index_of(m) is not None

    def test_inverse_is_transpose(self, group):
        for i in range(60):
            assert group.mul(i, group.inv(i)) == group.identity


class TestApply:
    def test_b_flips_xy(self):
        assert mat_vec(T_B, Vec3(ONE, TAU, ZERO)) == Vec3(-ONE, -TAU, ZERO)

    def test_a_on_icosahedron_vertex(self):
        # hand oracle: each component expanded with tau^2 = tau + 1
        assert mat_vec(T_A, Vec3(ONE, TAU, ZERO)) == Vec3(-ONE, TAU, ZERO)

    def test_identity(self):
        u = Vec3.of(1, 1, 1)
        assert mat_vec(IDENTITY_MATRIX, u) == u


class TestOrbits:
    @pytest.mark.parametrize(
        "seed,length",
        [
            (Vec3(ONE, TAU, ZERO), 12),
            (Vec3(ONE, ONE, ONE), 20),
            (Vec3(ONE, ZERO, ZERO), 30),
            (Vec3(GN(2), TAU, ZERO), 60),
        ],
    )
    def test_lengths(self, group, seed, length):
        assert len(group.orbit(seed)) == length

    def test_orbit_invariance(self, group):
        orbit = set(group.orbit(Vec3(ONE, TAU, ZERO)))
        for g in group.elements:
            for v in orbit:
                assert g.apply(v) in orbit

    def test_zero_seed_rejected(self, group):
        with pytest.raises(ValueError):
            group.orbit(Vec3(ZERO, ZERO, ZERO))


class TestCluster:
    @pytest.mark.parametrize("k", [6, 16, 31])
    def test_standard_sizes(self, group, k):
        assert standard_cluster(k, group).k == k

    def test_half_is_canonical(self, group):
        for k in (6, 16, 31):
            cluster = standard_cluster(k, group)
            for v in cluster.half:
                first = next(c for c in v if c.sign() != 0)
                assert first.sign() > 0
            assert len(set(cluster.half)) == k
            full = set(cluster.full_set())
            assert len(full) == 2 * k

    def test_cluster_invariance(self, group):
        cluster = standard_cluster(16, group)
        full = set(cluster.full_set())
        for g in group.elements:
            assert {g.apply(v) for v in full} == full

    def test_rejects_off_ray_seed(self, group):
        with pytest.raises(ValueError):
            build_cluster([(Vec3(GN(2), TAU, ZERO), 60)], group)

    def test_rejects_wrong_expected_length(self, group):
        with pytest.raises(ValueError):
            build_cluster([(Vec3(ONE, TAU, ZERO), 20)], group)

    def test_rejects_duplicate_orbit(self, group):
        seed = Vec3(ONE, TAU, ZERO)
        with pytest.raises(ValueError):
            build_cluster([(seed, 12), (seed, 12)], group)

    def test_ray_seeds(self):
        alpha = GN(Fraction(3, 2))
        assert ray_seed("icosahedron", alpha) == Vec3(alpha, alpha * TAU, ZERO)
        assert classify_ray(Vec3(alpha, alpha, alpha)) == "dodecahedron"
        assert classify_ray(Vec3(alpha, ZERO, ZERO)) == "icosidodecahedron"
        with pytest.raises(ValueError):
            ray_seed("icosahedron", -alpha)

    def test_config_round(self, group):
        cluster = cluster_from_config(
            {
                "orbits": [
                    {"ray": "icosahedron", "alpha": "1/2+1/2*t"},
                    {"ray": "dodecahedron", "alpha": "1"},
                ]
            },
            group,
        )
        assert cluster.k == 16

    @pytest.mark.parametrize(
        "bad",
        [
            {},
            {"orbits": []},
            {"orbits": [{"ray": "cube", "alpha": "1"}]},
            {"orbits": [{"ray": "icosahedron", "alpha": "1", "extra": 1}]},
        ],
    )
    def test_config_rejects(self, bad, group):
        with pytest.raises(ValueError):
            cluster_from_config(bad, group)


class TestCharacters:
    def test_row_orthonormality(self):
        for i, ri in enumerate(CHARACTER_TABLE):
            for j, rj in enumerate(CHARACTER_TABLE):
                s = sum(
                    (GN(n) * a * b for n, a, b in zip(CLASS_SIZES, ri, rj)),
                    ZERO,
                )
                assert s == (GN(60) if i == j else ZERO)

    def test_dims_column(self):
        assert tuple(int(r[0].rat) for r in CHARACTER_TABLE) == IRREP_DIMS
        assert sum(d * d for d in IRREP_DIMS) == 60

    def test_decompose_self(self):
        assert decompose_character(CHARACTER_TABLE[1]) == (0, 1, 0, 0, 0)

    def test_decompose_regular(self):
        chi = [GN(60), ZERO, ZERO, ZERO, ZERO]
        assert decompose_character(chi) == (1, 3, 3, 4, 5)

    def test_rejects_non_character(self):
        with pytest.raises(ValueError):
            decompose_character([ONE, ONE, ONE, ONE, ZERO])

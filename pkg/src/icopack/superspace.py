"""Projectors onto physical, conjugate and internal space, built exactly.

The lattice scale kappa = sqrt(sum of squared first coordinates) is
irrational in Q[tau], so it is never computed: lattice points stay integer
vectors n (meaning x = kappa*n), and only kappa^2 appears, as the
denominator of the projector entries

    pi_ij = <e_i, e_j> / kappa^2        (onto the physical copy E)
    pi'_ij = <e'_i, e'_j> / phi(kappa^2) (onto the conjugate copy E')
    pi'' = I - pi - pi'                  (onto the rational complement)

with e'_i the componentwise Galois conjugate of e_i.  Every identity these
matrices must satisfy is verified at build time; a violation means the
cluster input (or the arithmetic) is broken, so construction fails loudly.
"""

from __future__ import annotations

from typing import Sequence

from icopack.icosa import Cluster, Vec3
from icopack.qfield import GN, ONE, ZERO, GoldenNumber

MatrixK = tuple[tuple[GoldenNumber, ...], ...]


def _identity(k: int) -> MatrixK:
    return tuple(
        tuple(ONE if i == j else ZERO for j in range(k)) for i in range(k)
    )


def _mat_mul(p: MatrixK, q: MatrixK) -> MatrixK:
    k = len(p)
    qt = tuple(zip(*q))
    return tuple(
        tuple(sum((a * b for a, b in zip(row, col)), ZERO) for col in qt)
        for row in p
    )


def _zero(m: MatrixK) -> bool:
    return all(not x for row in m for x in row)


class ProjectorMatrix:
    """Symmetric idempotent k x k matrix over Q[tau] with known rank."""

    __slots__ = ("entries", "rank_expected")

    def __init__(self, entries: MatrixK, rank_expected: int) -> None:
        self.entries = entries
        self.rank_expected = rank_expected
        k = len(entries)
        for i in range(k):
            for j in range(i):
                if entries[i][j] != entries[j][i]:
                    raise AssertionError("projector is not symmetric")
        if _mat_mul(entries, entries) != entries:
            raise AssertionError("projector is not idempotent")
        tr = sum((entries[i][i] for i in range(k)), ZERO)
        if tr != GN(rank_expected):
            raise AssertionError(
                f"projector trace {tr} differs from expected rank {rank_expected}"
            )

    @property
    def k(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int):
        return self.entries[i]

    def is_rational(self) -> bool:
        return all(x.gold == 0 for row in self.entries for x in row)

    def commutes_with_signed_perm(self, sp) -> bool:
        """P_{g(i), g(j)} * s_{g(i)} * s_{g(j)} = P_{ij}: invariance of P
        under the signed-permutation action."""
        p = self.entries
        perm, signs = sp.perm, sp.signs
        for i in range(self.k):
            for j in range(self.k):
                v = p[perm[i]][perm[j]]
                if signs[perm[i]] * signs[perm[j]] < 0:
                    v = -v
                if v != p[i][j]:
                    return False
        return True


def conjugate_cluster(cluster: Cluster) -> list[Vec3]:
    """e'_i = componentwise Galois conjugate of e_i, in cluster order."""
    return [v.conjugate() for v in cluster.half]


class SuperspaceData:
    """Cluster geometry plus the three exact projectors."""

    __slots__ = ("cluster", "conj_cluster", "kappa_sq", "pi", "pi_prime", "pi_second")

    def __init__(self, cluster: Cluster) -> None:
        k = cluster.k
        e = cluster.half
        ep = conjugate_cluster(cluster)

        # scalar coordinate Gram: sum_l e_la e_lb = delta_ab kappa^2
        kappa_sq = sum((v.x * v.x for v in e), ZERO)
        for a in range(3):
            for b in range(3):
                s = sum((v[a] * v[b] for v in e), ZERO)
                expect = kappa_sq if a == b else ZERO
                if s != expect:
                    raise AssertionError(
                        "coordinate Gram of the cluster is not scalar: "
                        f"sum e_l{a + 1} e_l{b + 1} = {s}"
                    )
        if kappa_sq.sign() <= 0:
            raise AssertionError("kappa^2 must be positive")

        inv_ks = kappa_sq.inverse()
        inv_ks_c = kappa_sq.conjugate().inverse()
        pi = tuple(
            tuple(e[i].dot(e[j]) * inv_ks for j in range(k)) for i in range(k)
        )
        pi_prime = tuple(
            tuple(ep[i].dot(ep[j]) * inv_ks_c for j in range(k)) for i in range(k)
        )
        ident = _identity(k)
        pi_second = tuple(
            tuple(ident[i][j] - pi[i][j] - pi_prime[i][j] for j in range(k))
            for i in range(k)
        )

        self.cluster = cluster
        self.conj_cluster = ep
        self.kappa_sq = kappa_sq
        self.pi = ProjectorMatrix(pi, 3)
        self.pi_prime = ProjectorMatrix(pi_prime, 3)
        self.pi_second = ProjectorMatrix(pi_second, k - 6)

        if not _zero(_mat_mul(pi, pi_prime)) or not _zero(_mat_mul(pi_prime, pi)):
            raise AssertionError("pi * pi' is not zero")
        if not self.pi_second.is_rational():
            raise AssertionError("pi'' has an irrational entry")
        for a in range(3):
            acc = Vec3(ZERO, ZERO, ZERO)
            for i in range(k):
                acc = acc + ep[i].scale(e[i][a])
            if not acc.is_zero():
                raise AssertionError(
                    "mixed sum of <u, e_i> e'_i over the cluster is not zero"
                )

    @property
    def k(self) -> int:
        return self.cluster.k

    def physical_embed(self, n: Sequence[int]) -> Vec3:
        """Physical image sum_i n_i e_i of the lattice point x = kappa*n."""
        return _weighted_sum(n, self.cluster.half)

    def conjugate_embed(self, n: Sequence[int]) -> Vec3:
        """Conjugate image sum_i n_i e'_i (the star map of the scheme)."""
        return _weighted_sum(n, self.conj_cluster)


def _weighted_sum(n: Sequence[int], vectors: list[Vec3]) -> Vec3:
    if len(n) != len(vectors):
        raise ValueError(f"expected {len(vectors)} coordinates, got {len(n)}")
    x = y = z = ZERO
    for c, v in zip(n, vectors):
        if not c:
            continue
        x = x + v.x * c
        y = y + v.y * c
        z = z + v.z * c
    return Vec3(x, y, z)


def build_superspace(cluster: Cluster) -> SuperspaceData:
    if cluster.k < 6:
        raise ValueError("cluster must have k >= 6")
    return SuperspaceData(cluster)

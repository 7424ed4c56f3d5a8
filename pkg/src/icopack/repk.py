"""Signed-permutation representation of Y on E_k induced by a cluster.

Each rotation permutes the cluster {±e_1, ..., ±e_k}, so on the index set
it acts as T_g e_j = s_{g(j)} e_{g(j)}: a permutation together with one
sign per target slot.  Composition is O(k); dense k x k matrices are never
formed except on demand.
"""

from __future__ import annotations

from typing import Sequence

from icopack.icosa import Cluster, IcosaGroup, Vec3, build_group, decompose_character
from icopack.qfield import GN, ONE, ZERO, GoldenNumber


class SignedPermutation:
    """perm[j] is the target slot of e_j; signs are indexed by target slot."""

    __slots__ = ("perm", "signs")

    def __init__(self, perm: Sequence[int], signs: Sequence[int]) -> None:
        self.perm = tuple(perm)
        self.signs = tuple(signs)

    @classmethod
    def identity(cls, k: int) -> SignedPermutation:
        return cls(range(k), [1] * k)

    @property
    def k(self) -> int:
        return len(self.perm)

    def compose(self, other: SignedPermutation) -> SignedPermutation:
        """self after other: (self.compose(other)) e_j = self(other(e_j))."""
        k = len(self.perm)
        perm = [0] * k
        signs = [0] * k
        for m in range(k):
            t = self.perm[m]
            signs[t] = self.signs[t] * other.signs[m]
        for j in range(k):
            perm[j] = self.perm[other.perm[j]]
        return SignedPermutation(perm, signs)

    def inverse(self) -> SignedPermutation:
        k = len(self.perm)
        perm = [0] * k
        signs = [0] * k
        for j in range(k):
            t = self.perm[j]
            perm[t] = j
            signs[j] = self.signs[t]
        return SignedPermutation(perm, signs)

    def apply_coords(self, coords: Sequence) -> list:
        """Push coordinates forward: slot perm[j] receives signs[perm[j]]*x_j."""
        out = [None] * len(coords)
        for j, x in enumerate(coords):
            t = self.perm[j]
            out[t] = x if self.signs[t] > 0 else -x
        return out

    def trace(self) -> int:
        return sum(self.signs[j] for j in range(len(self.perm)) if self.perm[j] == j)

    def matrix(self) -> list[list[GoldenNumber]]:
        k = len(self.perm)
        m = [[ZERO] * k for _ in range(k)]
        for j in range(k):
            m[self.perm[j]][j] = GN(self.signs[self.perm[j]])
        return m

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SignedPermutation)
            and self.perm == other.perm
            and self.signs == other.signs
        )

    def __hash__(self) -> int:
        return hash((self.perm, self.signs))

    def __repr__(self) -> str:
        return f"SignedPermutation({list(self.perm)}, {list(self.signs)})"


def signed_permutation(
    g, cluster: Cluster, lookup: dict[Vec3, tuple[int, int]] | None = None
) -> SignedPermutation:
    """The index action of one group element on the cluster."""
    if lookup is None:
        lookup = cluster_lookup(cluster)
    k = cluster.k
    perm = [0] * k
    signs = [0] * k
    hit = [False] * k
    for j, e in enumerate(cluster.half):
        w = g.apply(e)
        found = lookup.get(w)
        if found is None:
            raise ValueError(
                f"cluster is not invariant: image of e_{j + 1} not in the cluster"
            )
        t, s = found
        if hit[t]:
            raise ValueError("cluster vectors are not distinct up to sign")
        hit[t] = True
        perm[j] = t
        signs[t] = s
    return SignedPermutation(perm, signs)


def cluster_lookup(cluster: Cluster) -> dict[Vec3, tuple[int, int]]:
    lookup: dict[Vec3, tuple[int, int]] = {}
    for i, v in enumerate(cluster.half):
        lookup[v] = (i, 1)
        lookup[-v] = (i, -1)
    return lookup


class RepK:
    """The full representation: one SignedPermutation per group element."""

    def __init__(self, cluster: Cluster, group: IcosaGroup | None = None) -> None:
        self.group = group or build_group()
        self.cluster = cluster
        lookup = cluster_lookup(cluster)
        self.perms: list[SignedPermutation] = [
            signed_permutation(g, cluster, lookup) for g in self.group.elements
        ]

    @property
    def k(self) -> int:
        return self.cluster.k

    def __getitem__(self, i: int) -> SignedPermutation:
        return self.perms[i]

    def character(self) -> list[GoldenNumber]:
        """Traces on the class representatives (e, a, b, ab, a^2)."""
        return [
            GN(self.perms[c.representative].trace()) for c in self.group.classes
        ]

    def multiplicities(self) -> tuple[int, ...]:
        return decompose_character(self.character())

    def check_homomorphism(self) -> None:
        """repk(gh) = repk(g) o repk(h) over all 3600 pairs, exactly."""
        mt = self.group.mult_table
        for i in range(60):
            pi = self.perms[i]
            row = mt[i]
            for j in range(60):
                if self.perms[row[j]] != pi.compose(self.perms[j]):
                    raise AssertionError(
                        f"homomorphism fails at pair ({i}, {j})"
                    )

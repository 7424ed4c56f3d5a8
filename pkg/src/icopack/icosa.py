"""The icosahedral rotation group Y = 235 and its orbit clusters.

Y is generated from two exact rotation matrices over Q[tau] (a five-fold
axis ``a`` and a two-fold axis ``b``), closed by multiplication into 60
elements.  Clusters are unions of orbits of length 12, 20 or 30 split into
antipodal pairs; they fix the vectors e_1 ... e_k that drive everything
downstream.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from icopack.qfield import GN, ONE, TAU, ZERO, GoldenNumber


class Vec3(NamedTuple):
    """Point of physical space with exact Q[tau] coordinates."""

    x: GoldenNumber
    y: GoldenNumber
    z: GoldenNumber

    @classmethod
    def of(cls, x, y, z) -> Vec3:
        return cls(_gn(x), _gn(y), _gn(z))

    def dot(self, other: Vec3) -> GoldenNumber:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def norm2(self) -> GoldenNumber:
        return self.dot(self)

    def __add__(self, other: Vec3) -> Vec3:  # type: ignore[override]
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: Vec3) -> Vec3:
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> Vec3:
        return Vec3(-self.x, -self.y, -self.z)

    def scale(self, c) -> Vec3:
        c = _gn(c)
        return Vec3(self.x * c, self.y * c, self.z * c)

    def conjugate(self) -> Vec3:
        return Vec3(self.x.conjugate(), self.y.conjugate(), self.z.conjugate())

    def is_zero(self) -> bool:
        return not (self.x or self.y or self.z)

    def to_text(self) -> str:
        return f"({self.x}, {self.y}, {self.z})"


def _gn(x) -> GoldenNumber:
    if isinstance(x, GoldenNumber):
        return x
    return GN(Fraction(x))


Matrix3 = tuple[tuple[GoldenNumber, ...], ...]

_HALF = Fraction(1, 2)

IDENTITY_MATRIX: Matrix3 = (
    (ONE, ZERO, ZERO),
    (ZERO, ONE, ZERO),
    (ZERO, ZERO, ONE),
)

# Five-fold rotation: all entries are halves of Q[tau] integers.
T_A: Matrix3 = (
    ((TAU - 1) * _HALF, -TAU * _HALF, GN(_HALF)),
    (TAU * _HALF, GN(_HALF), (TAU - 1) * _HALF),
    (GN(-_HALF), (TAU - 1) * _HALF, TAU * _HALF),
)

# Two-fold rotation about the z axis.
T_B: Matrix3 = (
    (-ONE, ZERO, ZERO),
    (ZERO, -ONE, ZERO),
    (ZERO, ZERO, ONE),
)


def mat_vec(m: Matrix3, v: Vec3) -> Vec3:
    return Vec3(
        m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
        m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
        m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
    )


def mat_mul(p: Matrix3, q: Matrix3) -> Matrix3:
    return tuple(
        tuple(sum((p[i][l] * q[l][j] for l in range(3)), ZERO) for j in range(3))
        for i in range(3)
    )


def mat_transpose(m: Matrix3) -> Matrix3:
    return tuple(tuple(m[j][i] for j in range(3)) for i in range(3))


def mat_det(m: Matrix3) -> GoldenNumber:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


class GroupElement:
    """A rotation of Y: exact matrix plus a shortest generator word."""

    __slots__ = ("matrix", "word")

    def __init__(self, matrix: Matrix3, word: str) -> None:
        self.matrix = matrix
        self.word = word

    def apply(self, u: Vec3) -> Vec3:
        return mat_vec(self.matrix, u)

    def inverse_matrix(self) -> Matrix3:
        # rotations: inverse = transpose
        return mat_transpose(self.matrix)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GroupElement) and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash(self.matrix)

    def __repr__(self) -> str:
        return f"<GroupElement {self.word or 'e'}>"


class ConjugacyClass(NamedTuple):
    label: str
    representative: int
    members: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.members)


class IcosaGroup:
    """All 60 rotations, their multiplication table and conjugacy classes.

    Classes are ordered (e, a, b, ab, a^2) to match the character table.
    """

    def __init__(self) -> None:
        self.elements: list[GroupElement] = _closure()
        if len(self.elements) != 60:
            raise AssertionError(
                f"group closure produced {len(self.elements)} elements, expected 60"
            )
        self._index: dict[Matrix3, int] = {
            g.matrix: i for i, g in enumerate(self.elements)
        }
        self.identity = self._index[IDENTITY_MATRIX]
        self.classes = self._conjugacy_classes()

    def __len__(self) -> int:
        return 60

    def __iter__(self):
        return iter(self.elements)

    def index_of(self, matrix: Matrix3) -> int:
        return self._index[matrix]

    def mul(self, i: int, j: int) -> int:
        return self.mult_table[i][j]

    def inv(self, i: int) -> int:
        return self._index[self.elements[i].inverse_matrix()]

    @cached_property
    def mult_table(self) -> list[list[int]]:
        table = []
        for g in self.elements:
            row = [
                self._index[mat_mul(g.matrix, h.matrix)] for h in self.elements
            ]
            table.append(row)
        return table

    def element_order(self, i: int) -> int:
        n, j = 1, i
        while j != self.identity:
            j = self.mul(j, i)
            n += 1
        return n

    def class_of(self, i: int) -> int:
        for c, cls in enumerate(self.classes):
            if i in cls.members:
                return c
        raise AssertionError("element missing from class partition")

    def _conjugacy_classes(self) -> tuple[ConjugacyClass, ...]:
        mt = self.mult_table
        seen: set[int] = set()
        raw: list[frozenset[int]] = []
        for i in range(60):
            if i in seen:
                continue
            members = frozenset(
                mt[mt[g][i]][self.inv(g)] for g in range(60)
            )
            seen |= members
            raw.append(members)
        if sorted(len(c) for c in raw) != [1, 12, 12, 15, 20]:
            raise AssertionError("unexpected conjugacy class sizes")

        ia = self._index[T_A]
        ib = self._index[T_B]
        iab = self.mul(ia, ib)
        ia2 = self.mul(ia, ia)
        order = [
            ("e", self.identity),
            ("a", ia),
            ("b", ib),
            ("ab", iab),
            ("a2", ia2),
        ]
        out = []
        for label, rep in order:
            members = next(c for c in raw if rep in c)
            out.append(ConjugacyClass(label, rep, tuple(sorted(members))))
        if len({c.members for c in out}) != 5:
            raise AssertionError("class representatives are not in distinct classes")
        return tuple(out)

    # -- orbits and clusters ------------------------------------------------

    def orbit(self, seed: Vec3) -> list[Vec3]:
        if seed.is_zero():
            raise ValueError("orbit seed must be nonzero")
        seen: dict[Vec3, None] = {}
        for g in self.elements:
            seen.setdefault(g.apply(seed), None)
        return list(seen)


def _closure() -> list[GroupElement]:
    start = GroupElement(IDENTITY_MATRIX, "")
    elements = [start]
    index = {IDENTITY_MATRIX: 0}
    frontier = [start]
    gens = (("a", T_A), ("b", T_B))
    while frontier:
        nxt = []
        for g in frontier:
            for letter, gen in gens:
                m = mat_mul(g.matrix, gen)
                if m not in index:
                    h = GroupElement(m, g.word + letter)
                    index[m] = len(elements)
                    elements.append(h)
                    nxt.append(h)
        frontier = nxt
    return elements


_GROUP: IcosaGroup | None = None


def build_group() -> IcosaGroup:
    """The group Y, built once and cached (it is immutable)."""
    global _GROUP
    if _GROUP is None:
        _GROUP = IcosaGroup()
    return _GROUP


# -- character table -------------------------------------------------------
# Rows G1..G5 on classes (e, a, b, ab, a^2); tau' = 1 - tau.

CLASS_SIZES = (1, 12, 15, 20, 12)
IRREP_DIMS = (1, 3, 3, 4, 5)

_TP = ONE - TAU

CHARACTER_TABLE: tuple[tuple[GoldenNumber, ...], ...] = (
    (ONE, ONE, ONE, ONE, ONE),
    (GN(3), TAU, -ONE, ZERO, _TP),
    (GN(3), _TP, -ONE, ZERO, TAU),
    (GN(4), -ONE, ZERO, ONE, -ONE),
    (GN(5), ZERO, ONE, -ONE, ZERO),
)


def decompose_character(chi: Sequence[GoldenNumber]) -> tuple[int, ...]:
    """Multiplicities (m1..m5) of a class function chi = (e, a, b, ab, a^2).

    m_j = (1/60) sum over classes of size * chi * chi_j, which must come out
    a non-negative integer when chi is the character of a representation.
    """
    if len(chi) != 5:
        raise ValueError("character must have 5 class values")
    chi = [_gn(c) for c in chi]
    out = []
    for row in CHARACTER_TABLE:
        m = sum(
            (GN(size) * c * r for size, c, r in zip(CLASS_SIZES, chi, row)),
            ZERO,
        ) / 60
        if m.gold != 0 or m.rat.denominator != 1 or m.rat < 0:
            raise ValueError(f"not a character: multiplicity {m} is not in Z>=0")
        out.append(int(m.rat))
    return tuple(out)


# -- clusters ----------------------------------------------------------------

RAY_NAMES = ("icosahedron", "dodecahedron", "icosidodecahedron")

_RAY_ORBIT_LEN = {"icosahedron": 12, "dodecahedron": 20, "icosidodecahedron": 30}


def ray_seed(ray: str, alpha: GoldenNumber) -> Vec3:
    """Seed on an admissible ray: (a, a*tau, 0), (a, a, a) or (a, 0, 0)."""
    if alpha.sign() <= 0:
        raise ValueError("alpha must be positive")
    if ray == "icosahedron":
        return Vec3(alpha, alpha * TAU, ZERO)
    if ray == "dodecahedron":
        return Vec3(alpha, alpha, alpha)
    if ray == "icosidodecahedron":
        return Vec3(alpha, ZERO, ZERO)
    raise ValueError(f"unknown ray {ray!r}; expected one of {RAY_NAMES}")


def classify_ray(seed: Vec3) -> str:
    """Which admissible ray a seed lies on (error if none)."""
    x, y, z = seed
    if x.sign() > 0:
        if y == x * TAU and not z:
            return "icosahedron"
        if y == x and z == x:
            return "dodecahedron"
        if not y and not z:
            return "icosidodecahedron"
    raise ValueError(f"seed {seed.to_text()} is not on an admissible ray")


def _canonical_of_pair(v: Vec3) -> Vec3:
    for c in v:
        s = c.sign()
        if s:
            return v if s > 0 else -v
    raise ValueError("zero vector has no antipodal canonical form")


class Cluster:
    """Y-invariant set {±e_1, ..., ±e_k}; ``half`` lists one of each pair.

    The representative of {v, -v} is the one whose first nonzero coordinate
    is positive; within one orbit the half is ordered lexicographically.
    """

    def __init__(self, half: list[Vec3], orbit_seeds: list[tuple[Vec3, int]]):
        self.half = half
        self.orbit_seeds = orbit_seeds
        self.k = len(half)

    def __iter__(self):
        return iter(self.half)

    def __len__(self) -> int:
        return self.k

    def conjugate(self) -> Cluster:
        """Coordinate-wise Galois conjugate of every vector (same pairing)."""
        return Cluster(
            [v.conjugate() for v in self.half],
            [(s.conjugate(), n) for s, n in self.orbit_seeds],
        )

    def full_set(self) -> list[Vec3]:
        return self.half + [-v for v in self.half]


def build_cluster(
    seeds: Iterable[tuple[Vec3, int]], group: IcosaGroup | None = None
) -> Cluster:
    """Union of admissible orbits, split into canonical antipodal halves."""
    group = group or build_group()
    half: list[Vec3] = []
    taken: set[Vec3] = set()
    orbit_seeds: list[tuple[Vec3, int]] = []
    for seed, expected in seeds:
        ray = classify_ray(seed)
        if expected != _RAY_ORBIT_LEN[ray]:
            raise ValueError(
                f"seed {seed.to_text()} on the {ray} ray has orbit length "
                f"{_RAY_ORBIT_LEN[ray]}, not {expected}"
            )
        orbit = group.orbit(seed)
        if len(orbit) != expected:
            raise AssertionError(
                f"orbit of {seed.to_text()} has length {len(orbit)}"
            )
        reps = sorted({_canonical_of_pair(v) for v in orbit})
        if len(reps) * 2 != len(orbit):
            raise AssertionError("orbit does not split into antipodal pairs")
        if taken & set(reps):
            raise ValueError(f"duplicate orbit for seed {seed.to_text()}")
        taken |= set(reps)
        half.extend(reps)
        orbit_seeds.append((seed, expected))
    return Cluster(half, orbit_seeds)


def cluster_from_config(config: dict, group: IcosaGroup | None = None) -> Cluster:
    """Build a cluster from ``{"orbits": [{"ray": ..., "alpha": ...}]}``.

    An orbit entry may instead give an explicit starting vector as
    ``{"seed": ["x", "y", "z"]}`` (golden-number literals); the seed must
    lie on an admissible ray, otherwise classification fails loudly.
    """
    if not isinstance(config, dict) or "orbits" not in config:
        raise ValueError('cluster config must be an object with an "orbits" list')
    orbits = config["orbits"]
    if not isinstance(orbits, list) or not orbits:
        raise ValueError('"orbits" must be a non-empty list')
    seeds = []
    for entry in orbits:
        if not isinstance(entry, dict):
            raise ValueError(f"bad orbit entry {entry!r}")
        if "seed" in entry:
            if set(entry) - {"seed"}:
                raise ValueError(f"bad orbit entry {entry!r}")
            coords = entry["seed"]
            if not isinstance(coords, list) or len(coords) != 3:
                raise ValueError(f"seed must have 3 coordinates: {entry!r}")
            seed = Vec3(*(GN.from_text(str(c)) for c in coords))
            seeds.append((seed, _RAY_ORBIT_LEN[classify_ray(seed)]))
            continue
        if set(entry) - {"ray", "alpha"}:
            raise ValueError(f"bad orbit entry {entry!r}")
        ray = entry.get("ray")
        if ray not in RAY_NAMES:
            raise ValueError(f"unknown ray {ray!r}; expected one of {RAY_NAMES}")
        alpha = GN.from_text(str(entry.get("alpha", "1")))
        seeds.append((ray_seed(ray, alpha), _RAY_ORBIT_LEN[ray]))
    return build_cluster(seeds, group)


def standard_cluster(k: int, group: IcosaGroup | None = None) -> Cluster:
    """The benchmark clusters: k = 6, 16 or 31 with alpha = 1 on each ray."""
    rays = {6: RAY_NAMES[:1], 16: RAY_NAMES[:2], 31: RAY_NAMES}
    if k not in rays:
        raise ValueError("standard clusters exist for k in {6, 16, 31}")
    return cluster_from_config(
        {"orbits": [{"ray": r, "alpha": "1"} for r in rays[k]]}, group
    )

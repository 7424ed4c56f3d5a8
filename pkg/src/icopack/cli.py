"""Command-line surface: info, verify, gen, compare, surfaces.

Exit codes: 0 success, 1 a verification or comparison failed, 2 bad
configuration or usage.  Reports are plain text with a stable field order;
``--json`` prints the machine-readable mirror instead.  File outputs are
written to a temp file and renamed, so failures never leave partial files.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Callable, Optional, Sequence

from icopack.formats import (
    atomic_write_bytes,
    pattern_csv_bytes,
    read_offset_file,
    surface_obj_bytes,
)
from icopack.icosa import (
    CLASS_SIZES,
    Cluster,
    IcosaGroup,
    Vec3,
    build_group,
    cluster_from_config,
)
from icopack.msm import MsmScheme, build_scheme, generate_msm, surface_vertices
from icopack.qfield import GN, ONE, TAU, ZERO
from icopack.repk import RepK, signed_permutation
from icopack.strip import Pattern, generate_strip
from icopack.superspace import SuperspaceData, build_superspace


class ConfigError(Exception):
    """Anything wrong with user-supplied configuration or arguments."""


def _load_cluster(path: str) -> Cluster:
    try:
        with open(path, encoding="utf-8") as handle:
            config = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read cluster config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cluster config is not valid JSON: {exc}") from exc
    try:
        return cluster_from_config(config)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_radius(text: str) -> GN:
    try:
        radius_sq = GN.from_text(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if radius_sq.sign() <= 0:
        raise ConfigError("radius-sq must be positive")
    return radius_sq


def _parse_offset(path: Optional[str], k: int):
    if path is None:
        return None
    try:
        return read_offset_file(path, k)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"bad offset file: {exc}") from exc


def _parse_seed(text: Optional[str], k: int) -> Optional[tuple[int, ...]]:
    if text is None:
        return None
    try:
        seed = tuple(int(c) for c in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"seed must be comma-separated integers: {exc}") from exc
    if len(seed) != k:
        raise ConfigError(f"seed has {len(seed)} components, expected {k}")
    return seed


# -- verify -------------------------------------------------------------


def verification_checks(
    cluster: Cluster, group: IcosaGroup
) -> list[tuple[str, Callable[[], None]]]:
    """Named invariant checks, in report order.

    Each callable returns silently or raises with the failing identity;
    the list is ordered so that structural prerequisites come first.
    """

    def group_order() -> None:
        if len(group) != 60:
            raise AssertionError(f"group has {len(group)} elements, expected 60")

    def class_sizes() -> None:
        sizes = tuple(c.size for c in group.classes)
        if sizes != CLASS_SIZES:
            raise AssertionError(f"class sizes {sizes} != {CLASS_SIZES}")

    def presentation() -> None:
        ia = group.classes[1].representative
        ib = group.classes[2].representative
        e = group.identity
        iab = group.mul(ia, ib)
        for name, idx, order in (("a", ia, 5), ("b", ib, 2), ("ab", iab, 3)):
            j = idx
            for _ in range(order - 1):
                j = group.mul(j, idx)
            if j != e:
                raise AssertionError(f"{name}^{order} != e")

    def orbit_taxonomy() -> None:
        seeds = (
            (Vec3(ONE, TAU, ZERO), 12),
            (Vec3(ONE, ONE, ONE), 20),
            (Vec3(ONE, ZERO, ZERO), 30),
            (Vec3(GN(2), TAU, ZERO), 60),
        )
        for seed, expected in seeds:
            got = len(group.orbit(seed))
            if got != expected:
                raise AssertionError(
                    f"orbit of {seed.to_text()} has length {got}, "
                    f"expected {expected}"
                )

    def cluster_orbits() -> None:
        for seed, expected in cluster.orbit_seeds:
            got = len(group.orbit(seed))
            if got != expected:
                raise AssertionError(
                    f"orbit of {seed.to_text()} has length {got}, "
                    f"expected {expected}"
                )

    def cluster_symmetry() -> None:
        for g in group.elements:
            signed_permutation(g, cluster)

    def rep_orthogonality() -> None:
        rep = RepK(cluster, group)
        k = cluster.k
        for sp in rep.perms:
            m = sp.matrix()
            for i in range(k):
                for j in range(k):
                    s = sum((m[l][i] * m[l][j] for l in range(k)), ZERO)
                    expect = ONE if i == j else ZERO
                    if s != expect:
                        raise AssertionError(
                            f"M^T M != I at entry ({i + 1}, {j + 1})"
                        )

    def rep_homomorphism() -> None:
        RepK(cluster, group).check_homomorphism()

    state: dict[str, SuperspaceData] = {}

    def data() -> SuperspaceData:
        if "data" not in state:
            state["data"] = build_superspace(cluster)
        return state["data"]

    def coordinate_gram() -> None:
        e = cluster.half
        kappa_sq = data().kappa_sq
        for a in range(3):
            for b in range(3):
                s = sum((v[a] * v[b] for v in e), ZERO)
                expect = kappa_sq if a == b else ZERO
                if s != expect:
                    raise AssertionError(
                        f"sum_l e_l{a + 1} e_l{b + 1} = {s}, expected {expect}"
                    )

    def projector_shape() -> None:
        for name, p, rank in (
            ("pi", data().pi, 3),
            ("pi'", data().pi_prime, 3),
        ):
            k = p.k
            ent = p.entries
            for i in range(k):
                for j in range(k):
                    if ent[i][j] != ent[j][i]:
                        raise AssertionError(f"{name} is not symmetric")
            if mat_mul_k(ent, ent) != [list(row) for row in ent]:
                raise AssertionError(f"{name}^2 != {name}")
            tr = sum((ent[i][i] for i in range(k)), ZERO)
            if tr != GN(rank):
                raise AssertionError(f"trace {name} = {tr}, expected {rank}")

    def projector_equivariance() -> None:
        rep = RepK(cluster, group)
        for idx, sp in enumerate(rep.perms):
            if not data().pi.commutes_with_signed_perm(sp):
                raise AssertionError(
                    f"pi does not commute with group element {idx}"
                )

    def projector_orthogonality() -> None:
        p = data().pi.entries
        pp = data().pi_prime.entries
        k = len(p)
        zero = [[ZERO] * k for _ in range(k)]
        if mat_mul_k(p, pp) != zero or mat_mul_k(pp, p) != zero:
            raise AssertionError("pi pi' != 0 or pi' pi != 0")

    def second_projector_rational() -> None:
        if not data().pi_second.is_rational():
            raise AssertionError("pi'' has an entry with nonzero tau part")

    def embedding_identity() -> None:
        k = cluster.k
        for i in range(k):
            unit = [0] * k
            unit[i] = 1
            if data().physical_embed(unit) != cluster.half[i]:
                raise AssertionError(f"physical_embed(eps_{i + 1}) != e_{i + 1}")

    def schur_zero() -> None:
        e = cluster.half
        ep = data().conj_cluster
        for a in range(3):
            acc = Vec3(ZERO, ZERO, ZERO)
            for i in range(cluster.k):
                acc = acc + ep[i].scale(e[i][a])
            if not acc.is_zero():
                raise AssertionError(
                    f"sum_i <u_{a + 1}, e_i> e'_i = {acc.to_text()}, not 0"
                )

    def density_generator() -> None:
        # pi'(pi + pi') = pi' as matrices, and the conjugate embedding of
        # the j-th unit is e'_j: together, the star map of the image
        # lattice reaches every e'_j
        p = data().pi.entries
        pp = data().pi_prime.entries
        k = len(p)
        s = [
            [p[i][j] + pp[i][j] for j in range(k)] for i in range(k)
        ]
        if mat_mul_k(pp, s) != [list(row) for row in pp]:
            raise AssertionError("pi'(pi + pi') != pi'")
        for j in range(k):
            unit = [0] * k
            unit[j] = 1
            if data().conjugate_embed(unit) != data().conj_cluster[j]:
                raise AssertionError(
                    f"conjugate embed of eps_{j + 1} != e'_{j + 1}"
                )

    return [
        ("group_order", group_order),
        ("class_sizes", class_sizes),
        ("presentation", presentation),
        ("orbit_taxonomy", orbit_taxonomy),
        ("cluster_orbits", cluster_orbits),
        ("cluster_symmetry", cluster_symmetry),
        ("rep_orthogonality", rep_orthogonality),
        ("rep_homomorphism", rep_homomorphism),
        ("coordinate_gram", coordinate_gram),
        ("projector_shape", projector_shape),
        ("projector_equivariance", projector_equivariance),
        ("projector_orthogonality", projector_orthogonality),
        ("second_projector_rational", second_projector_rational),
        ("embedding_identity", embedding_identity),
        ("schur_zero", schur_zero),
        ("density_generator", density_generator),
    ]


def mat_mul_k(p, q):
    k = len(p)
    return [
        [
            sum((p[i][l] * q[l][j] for l in range(k)), ZERO)
            for j in range(k)
        ]
        for i in range(k)
    ]


def cmd_verify(args) -> int:
    cluster = _load_cluster(args.cluster)
    if args.tamper_cluster:
        half = list(cluster.half)
        v = half[-1]
        half[-1] = Vec3(v.x + ONE, v.y, v.z)
        cluster = Cluster(half, cluster.orbit_seeds)
    group = build_group()
    results = []
    failed = None
    for name, check in verification_checks(cluster, group):
        try:
            check()
        except (AssertionError, ValueError) as exc:
            failed = (name, str(exc))
            results.append({"name": name, "ok": False, "detail": str(exc)})
            break
        results.append({"name": name, "ok": True})
    if args.json:
        print(json.dumps({"k": cluster.k, "ok": failed is None, "checks": results}))
    else:
        print(f"k: {cluster.k}")
        for r in results:
            if r["ok"]:
                print(f"check {r['name']}: ok")
            else:
                print(f"check {r['name']}: FAIL: {r['detail']}")
    return 0 if failed is None else 1


# -- info ---------------------------------------------------------------


def cmd_info(args) -> int:
    cluster = _load_cluster(args.cluster)
    data = build_superspace(cluster)
    offset = _parse_offset(args.offset, data.k)
    scheme = build_scheme(data, offset)
    fields = [
        ("k", data.k),
        ("cosets", len(scheme.cosets)),
        ("m", scheme.m),
        ("index", scheme.index),
    ]
    if args.json:
        print(json.dumps(dict(fields)))
    else:
        for name, value in fields:
            print(f"{name}: {value}")
    return 0


# -- gen ----------------------------------------------------------------


def cmd_gen(args) -> int:
    cluster = _load_cluster(args.cluster)
    data = build_superspace(cluster)
    radius_sq = _parse_radius(args.radius_sq)
    offset = _parse_offset(args.offset, data.k)
    if args.method == "strip":
        if args.full_dim_only:
            raise ConfigError("--full-dim-only applies to the msm method only")
        mode = args.mode or "bfs"
        seed = _parse_seed(args.seed, data.k)
        try:
            pattern = generate_strip(
                data, radius_sq, offset, mode=mode, seed=seed,
                workers=args.threads,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        if args.mode:
            raise ConfigError("--mode applies to the strip method only")
        if args.seed:
            raise ConfigError("--seed applies to the strip method only")
        scheme = build_scheme(data, offset)
        pattern = generate_msm(
            scheme, radius_sq, offset,
            full_dim_only=args.full_dim_only, workers=args.threads,
        )
    payload = pattern_csv_bytes(pattern, data.k)
    atomic_write_bytes(args.out, payload)
    if args.json:
        print(json.dumps({"points": len(pattern.points), "out": args.out}))
    else:
        print(f"points: {len(pattern.points)}")
        print(f"out: {args.out}")
    return 0


# -- compare ------------------------------------------------------------


def compare_patterns(
    data: SuperspaceData,
    radius_sq,
    offset=None,
    workers: int = 1,
    scheme: Optional[MsmScheme] = None,
    msm_offset=None,
) -> tuple[Pattern, Pattern]:
    """Both generators at the same inputs (strip exhaustive, then msm)."""
    strip_pat = generate_strip(
        data, radius_sq, offset, mode="exhaustive", workers=workers
    )
    msm_off = offset if msm_offset is None else msm_offset
    if scheme is None:
        scheme = build_scheme(data, msm_off)
    msm_pat = generate_msm(scheme, radius_sq, msm_off, workers=workers)
    return strip_pat, msm_pat


def _point_json(p) -> dict:
    return {
        "phys": [c.to_text() for c in p.phys],
        "source": list(p.source),
    }


def cmd_compare(args) -> int:
    cluster = _load_cluster(args.cluster)
    data = build_superspace(cluster)
    radius_sq = _parse_radius(args.radius_sq)
    offset = _parse_offset(args.offset, data.k)
    msm_offset = None
    if args.perturb_window:
        # test hook: shift the msm window only, forcing a mismatch
        base = list(offset) if offset is not None else [ZERO] * data.k
        base[0] = base[0] + GN(Fraction(1, 7))
        msm_offset = tuple(base)
    strip_pat, msm_pat = compare_patterns(
        data, radius_sq, offset, workers=args.threads, msm_offset=msm_offset
    )
    strip_only = sorted(strip_pat.phys_set() - msm_pat.phys_set())
    msm_only = sorted(msm_pat.phys_set() - strip_pat.phys_set())
    equal = strip_pat.points == msm_pat.points
    if args.json:
        print(
            json.dumps(
                {
                    "strip_points": len(strip_pat.points),
                    "msm_points": len(msm_pat.points),
                    "equal": equal,
                    "strip_only": [
                        _point_json(strip_pat.get(q)) for q in strip_only[:20]
                    ],
                    "msm_only": [
                        _point_json(msm_pat.get(q)) for q in msm_only[:20]
                    ],
                }
            )
        )
    else:
        print(f"strip points: {len(strip_pat.points)}")
        print(f"msm points: {len(msm_pat.points)}")
        print(f"equal: {'yes' if equal else 'no'}")
        for label, only, pat in (
            ("strip-only", strip_only, strip_pat),
            ("msm-only", msm_only, msm_pat),
        ):
            for q in only[:20]:
                p = pat.get(q)
                print(
                    f"{label} ({q.x}, {q.y}, {q.z}) "
                    f"source {','.join(str(c) for c in p.source)}"
                )
    return 0 if equal else 1


# -- surfaces -----------------------------------------------------------


def _parse_label(text: str, k: int) -> tuple[Fraction, ...]:
    try:
        label = tuple(Fraction(part) for part in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad coset label: {exc}") from exc
    if len(label) != k:
        raise ConfigError(f"coset label has {len(label)} entries, expected {k}")
    return label


def cmd_surfaces(args) -> int:
    cluster = _load_cluster(args.cluster)
    data = build_superspace(cluster)
    offset = _parse_offset(args.offset, data.k)
    scheme = build_scheme(data, offset)
    if args.coset is None:
        if len(scheme.cosets) != 1:
            raise ConfigError(
                f"{len(scheme.cosets)} cosets; pick one with --coset "
                "(comma-separated rationals, the coset's second projection)"
            )
        coset = scheme.cosets[0]
    else:
        label = _parse_label(args.coset, data.k)
        match = [c for c in scheme.cosets if c.second_proj == label]
        if not match:
            raise ConfigError("no coset has the given label")
        coset = match[0]
    vertices = surface_vertices(scheme, coset)
    facets = None
    if coset.surface_status == "full_dim" and len(vertices) >= 4:
        from icopack.hull3 import hull_facets

        facets = hull_facets(vertices)
    header = [
        "# atomic surface (window polytope in conjugate space)",
        f"# coset label {','.join(str(x) for x in coset.second_proj)}",
        f"# status {coset.surface_status}",
        f"# vertices {len(vertices)}",
    ]
    payload = surface_obj_bytes(vertices, facets, header)
    atomic_write_bytes(args.out, payload)
    if args.json:
        print(
            json.dumps(
                {
                    "vertices": len(vertices),
                    "facets": len(facets) if facets else 0,
                    "status": coset.surface_status,
                    "out": args.out,
                }
            )
        )
    else:
        print(f"vertices: {len(vertices)}")
        print(f"facets: {len(facets) if facets else 0}")
        print(f"status: {coset.surface_status}")
        print(f"out: {args.out}")
    return 0


# -- entry point ----------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="icopack",
        description="Exact quasiperiodic packings of icosahedral clusters",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, offset=True):
        p.add_argument("--cluster", required=True, help="cluster config JSON")
        if offset:
            p.add_argument("--offset", help="window offset file (one value per line)")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("info", help="scheme sizes: k, cosets, m, index")
    common(p)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("verify", help="run the named invariant suite")
    p.add_argument("--cluster", required=True, help="cluster config JSON")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--tamper-cluster", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate a pattern as CSV")
    common(p)
    p.add_argument("--method", required=True, choices=("strip", "msm"))
    p.add_argument("--radius-sq", required=True, help="squared radius, exact text")
    p.add_argument("--mode", choices=("bfs", "exhaustive"), help="strip only")
    p.add_argument("--seed", help="strip bfs start point, comma-separated ints")
    p.add_argument("--full-dim-only", action="store_true", help="msm only")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("compare", help="strip vs msm set equality")
    common(p)
    p.add_argument("--radius-sq", required=True, help="squared radius, exact text")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--perturb-window", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("surfaces", help="export one atomic surface as OBJ")
    common(p)
    p.add_argument("--coset", help="coset label: comma-separated rationals")
    p.add_argument("--out", required=True, help="output OBJ path")
    p.set_defaults(func=cmd_surfaces)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Generate one finite patch of the k=6 icosahedral pattern both ways.

The strip route decides each candidate lattice point against the window
inequalities directly; the reduced route walks the six-dimensional image
lattice and tests fibers per coset.  Both are exact, so the resulting
point sets must agree to the last bit, sources and neighbor masks
included.  The patch is written out as CSV next to this script, plus the
window polytope as OBJ.
"""

import json
import os
import time

from icopack.formats import surface_obj_bytes, write_pattern_csv
from icopack.icosa import cluster_from_config
from icopack.msm import build_scheme, generate_msm, surface_vertices
from icopack.hull3 import hull_facets
from icopack.qfield import GN
from icopack.strip import generate_strip
from icopack.superspace import build_superspace

HERE = os.path.dirname(os.path.abspath(__file__))
RADIUS_SQ = GN(25)


def main() -> None:
    with open(os.path.join(HERE, "cluster6.json"), encoding="utf-8") as handle:
        cluster = cluster_from_config(json.load(handle))
    print(f"cluster: k = {cluster.k} (icosahedron orbit, one vector per +- pair)")

    data = build_superspace(cluster)
    t0 = time.monotonic()
    strip_pat = generate_strip(data, RADIUS_SQ, mode="exhaustive")
    print(f"strip route:   {len(strip_pat)} points in {time.monotonic() - t0:.2f}s")

    scheme = build_scheme(data)
    print(
        f"reduced scheme: {len(scheme.cosets)} coset (m = {scheme.m}, "
        f"index {scheme.index}); at k = 6 the whole lattice is one fiber"
    )
    t0 = time.monotonic()
    msm_pat = generate_msm(scheme, RADIUS_SQ)
    print(f"msm route:     {len(msm_pat)} points in {time.monotonic() - t0:.2f}s")

    assert msm_pat.points == strip_pat.points
    print("routes agree exactly (sources and neighbor masks included)")

    full = sum(p.fully_occupied for p in strip_pat)
    print(f"fully occupied sites: {full} of {len(strip_pat)}")
    print("innermost points:")
    for p in sorted(strip_pat, key=lambda p: float(sum(c * c for c in p.phys, GN(0))))[:5]:
        coords = ", ".join(c.to_text() for c in p.phys)
        print(f"  ({coords})  source {p.source}  occupied {p.occupied_count}/12")

    csv_path = os.path.join(HERE, "pattern6.csv")
    write_pattern_csv(csv_path, strip_pat, cluster.k)
    print(f"wrote {csv_path}")

    coset = scheme.cosets[0]
    vertices = surface_vertices(scheme, coset)
    obj_path = os.path.join(HERE, "surface6.obj")
    payload = surface_obj_bytes(
        vertices,
        hull_facets(vertices),
        [f"# window polytope, {len(vertices)} vertices"],
    )
    with open(obj_path, "wb") as handle:
        handle.write(payload)
    print(f"wrote {obj_path} ({len(vertices)} vertices, rhombic triacontahedron)")


if __name__ == "__main__":
    main()

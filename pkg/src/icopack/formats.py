"""Serialization: pattern CSV, surface OBJ, offset files, atomic writes.

Exact values travel as text (`p/q` rationals, `p/q+r/s*t` golden numbers);
floats appear only as display columns derived from certified enclosures.
The CSV ends with a sha256 comment over everything above it, so determinism
checks are a byte compare of whole files.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from fractions import Fraction
from typing import Optional, Sequence

from icopack.icosa import Vec3
from icopack.qfield import GN, GoldenNumber
from icopack.strip import Pattern


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _float_text(v: GoldenNumber) -> str:
    lo, hi = v.float_enclosure(60)
    return f"{(lo + hi) / 2:.17g}"


def csv_header(k: int) -> str:
    cols = [f"nx{i}" for i in range(1, k + 1)]
    cols += ["x_rat", "x_gold", "y_rat", "y_gold", "z_rat", "z_gold"]
    cols += ["x_f", "y_f", "z_f", "occupied_count"]
    return ",".join(cols)


def pattern_csv_bytes(pattern: Pattern, k: int) -> bytes:
    lines = [csv_header(k)]
    for p in pattern.points:
        if len(p.source) != k:
            raise ValueError("pattern source length does not match k")
        cells = [str(c) for c in p.source]
        for axis in p.phys:
            cells.append(_frac(axis.rat))
            cells.append(_frac(axis.gold))
        cells.extend(_float_text(axis) for axis in p.phys)
        cells.append(str(p.occupied_count))
        lines.append(",".join(cells))
    body = ("\n".join(lines) + "\n").encode()
    digest = hashlib.sha256(body).hexdigest()
    return body + f"# sha256 {digest}\n".encode()


def atomic_write_bytes(path: str, data: bytes) -> None:
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_pattern_csv(path: str, pattern: Pattern, k: int) -> None:
    atomic_write_bytes(path, pattern_csv_bytes(pattern, k))


def surface_obj_bytes(
    vertices: Sequence[Vec3],
    facets: Optional[Sequence[Sequence[int]]] = None,
    header: Sequence[str] = (),
) -> bytes:
    """OBJ text for one surface: float vertices, exact values in comments.

    Full-dimensional surfaces carry their hull facets; degenerate ones
    (polygon, segment, point) fall back to a single face, a line element,
    or a point element.
    """
    lines = list(header)
    for i, v in enumerate(vertices, 1):
        lines.append(f"# v{i} exact {v.x} {v.y} {v.z}")
    for v in vertices:
        lines.append("v " + " ".join(_float_text(axis) for axis in v))
    if facets:
        for face in facets:
            lines.append("f " + " ".join(str(i + 1) for i in face))
    elif len(vertices) >= 3:
        lines.append("f " + " ".join(str(i + 1) for i in range(len(vertices))))
    elif len(vertices) == 2:
        lines.append("l 1 2")
    elif len(vertices) == 1:
        lines.append("p 1")
    return ("\n".join(lines) + "\n").encode()


def parse_offset_text(text: str, k: int) -> tuple[GoldenNumber, ...]:
    """One golden-number literal per line; '#' comments and blanks skipped."""
    values = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        values.append(GN.from_text(line))
    if len(values) != k:
        raise ValueError(f"offset file has {len(values)} entries, expected {k}")
    return tuple(values)


def read_offset_file(path: str, k: int) -> tuple[GoldenNumber, ...]:
    with open(path, encoding="utf-8") as handle:
        return parse_offset_text(handle.read(), k)

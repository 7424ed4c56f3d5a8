"""Exact quasiperiodic packings of icosahedral clusters.

Two independent constructions of the same point pattern — the
k-dimensional strip projection and the reduced six-dimensional
multi-component model set — built on exact Q[tau] arithmetic so the two
can be compared point-for-point.
"""

from icopack.qfield import GN, ONE, TAU, TAU_CONJ, ZERO, GoldenNumber, Rational

__all__ = [
    "GN",
    "GoldenNumber",
    "Rational",
    "ZERO",
    "ONE",
    "TAU",
    "TAU_CONJ",
]

__version__ = "0.1.0"

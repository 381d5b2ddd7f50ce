"""Low-level vector and angle primitives shared by every solver in the package.

Points are sequences of three floats; two-dimensional input embeds with a zero
third coordinate.  Nothing in this module knows about weights — the functions
here only *measure* geometry: angles subtended at a junction point, the angle
between a ray and a plane, dihedral angles along an edge, heights, and which
side of an oriented plane a point lies on.

All predicates use relative tolerances around 1e-9; there is no exact
arithmetic and none is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateEdge,
    DegeneratePlane,
    DegenerateSegment,
    PointOnEdge,
)

__all__ = [
    "PlaneFrame",
    "angle_at",
    "as_point",
    "dihedral_angles",
    "height_to_plane",
    "height_to_segment",
    "plane_side_sign",
    "projected_angle",
    "unit_vector",
]

#: Points closer than this are treated as coincident.
COINCIDENCE_TOL = 1e-12

#: Relative tolerance for collinearity / coplanarity predicates.
DEGENERACY_TOL = 1e-9


def as_point(p) -> np.ndarray:
    """Coerce ``p`` to a float 3-vector, padding a 2D point with z = 0."""
    a = np.asarray(p, dtype=float)
    if a.shape == (2,):
        a = np.array([a[0], a[1], 0.0])
    if a.shape != (3,):
        raise ValueError(f"expected a point of 2 or 3 coordinates, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("point coordinates must be finite")
    return a


def unit_vector(p, q) -> np.ndarray:
    """Unit vector pointing from ``p`` towards ``q``.

    Raises
    ------
    DegenerateSegment
        If the two points coincide within ``COINCIDENCE_TOL``.
    """
    p = as_point(p)
    q = as_point(q)
    d = q - p
    n = float(np.linalg.norm(d))
    if n <= COINCIDENCE_TOL:
        raise DegenerateSegment(f"points {p.tolist()} and {q.tolist()} coincide")
    return d / n


def angle_at(a0, ai, aj) -> float:
    """Angle subtended at ``a0`` by the other two points, in [0, pi].

    The value is symmetric in ``ai`` and ``aj`` by construction.
    """
    ui = unit_vector(a0, ai)
    uj = unit_vector(a0, aj)
    c = float(np.dot(ui, uj))
    return math.acos(min(1.0, max(-1.0, c)))


def _plane_normal(a0, aj, ak) -> np.ndarray:
    """Unit normal of the plane through ``a0``, ``aj``, ``ak``.

    Oriented along ``u(a0,aj) x u(a0,ak)``; raises :class:`DegeneratePlane`
    when the three points are (near-)collinear.
    """
    uj = unit_vector(a0, aj)
    uk = unit_vector(a0, ak)
    n = np.cross(uj, uk)
    s = float(np.linalg.norm(n))
    if s <= DEGENERACY_TOL:
        raise DegeneratePlane("plane-spanning points are collinear with the origin point")
    return n / s


def projected_angle(a0, ai, aj, ak) -> float:
    """Angle between ray ``a0 -> ai`` and its projection onto plane ``aj a0 ak``.

    Parameters
    ----------
    a0, ai : points
        Ray origin and target.
    aj, ak : points
        Together with ``a0`` these span the projection plane.

    Returns
    -------
    float
        Angle in [0, pi/2].  An in-plane ray gives 0; a ray along the plane
        normal gives pi/2.  Side information is *not* encoded here — use
        :func:`plane_side_sign` for that.
    """
    u = unit_vector(a0, ai)
    n = _plane_normal(a0, aj, ak)
    s = abs(float(np.dot(u, n)))
    return math.asin(min(1.0, s))


def dihedral_angles(a1, a2, apex, others) -> list[float]:
    """Dihedral angles along edge ``a1 a2`` between the apex half-plane and others.

    For each point ``p`` in ``others``, returns the angle in [0, pi] between
    the half-plane bounded by line ``a1 a2`` that contains ``apex`` and the
    half-plane that contains ``p``.

    Raises
    ------
    DegenerateEdge
        If ``a1`` and ``a2`` coincide.
    PointOnEdge
        If the apex or one of the other points lies on the edge line.
    """
    a1 = as_point(a1)
    a2 = as_point(a2)
    e = a2 - a1
    elen = float(np.linalg.norm(e))
    if elen <= COINCIDENCE_TOL:
        raise DegenerateEdge("edge endpoints coincide")
    e = e / elen

    def rejection(p, label):
        p = as_point(p)
        w = p - a1
        w_perp = w - np.dot(w, e) * e
        norm = float(np.linalg.norm(w_perp))
        if norm <= DEGENERACY_TOL * max(float(np.linalg.norm(w)), elen):
            raise PointOnEdge(f"{label} lies on the edge line")
        return w_perp / norm

    ref = rejection(apex, "apex")
    out = []
    for idx, p in enumerate(others):
        v = rejection(p, f"point {idx}")
        c = float(np.dot(ref, v))
        out.append(math.acos(min(1.0, max(-1.0, c))))
    return out


def height_to_segment(a0, ai, aj) -> tuple[float, np.ndarray]:
    """Distance from ``a0`` to the line through ``ai`` and ``aj``, plus the foot.

    Returns ``(length, foot)`` where ``foot`` is the orthogonal projection of
    ``a0`` onto the line (not clipped to the segment).
    """
    a0 = as_point(a0)
    ai = as_point(ai)
    aj = as_point(aj)
    d = aj - ai
    dd = float(np.dot(d, d))
    if math.sqrt(dd) <= COINCIDENCE_TOL:
        raise DegenerateSegment("segment endpoints coincide")
    t = float(np.dot(a0 - ai, d)) / dd
    foot = ai + t * d
    return float(np.linalg.norm(a0 - foot)), foot


def height_to_plane(a0, ai, aj, ak) -> float:
    """Unsigned distance from ``a0`` to the plane through ``ai``, ``aj``, ``ak``."""
    a0 = as_point(a0)
    ai = as_point(ai)
    n = _plane_normal(ai, aj, ak)
    return abs(float(np.dot(a0 - ai, n)))


@dataclass(frozen=True)
class PlaneFrame:
    """An oriented plane through a junction point ``origin``.

    The plane is spanned by the rays from ``origin`` towards two boundary
    vertices whose 1-based indices are recorded in ``spanning``; ``normal``
    is the unit cross product of those two ray directions, in the order the
    caller supplied them.  The orientation is therefore a *convention* fixed
    by the caller's vertex ordering, not a geometric invariant.
    """

    origin: np.ndarray
    spanning: tuple[int, int]
    normal: np.ndarray

    @classmethod
    def from_points(cls, origin, aj, ak, spanning=(0, 0)) -> "PlaneFrame":
        origin = as_point(origin)
        return cls(origin=origin, spanning=tuple(spanning), normal=_plane_normal(origin, aj, ak))


def plane_side_sign(ai, frame: PlaneFrame, tol: float = DEGENERACY_TOL) -> int:
    """Which side of ``frame`` the point ``ai`` lies on: -1, 0 or +1.

    The sign of ``(ai - origin) . normal``; 0 when the component is at most
    ``tol`` times the distance from the origin (in particular when ``ai``
    coincides with the origin).
    """
    v = as_point(ai) - frame.origin
    d = float(np.dot(v, frame.normal))
    r = float(np.linalg.norm(v))
    if abs(d) <= tol * r:
        return 0
    return 1 if d > 0 else -1

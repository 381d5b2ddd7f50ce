"""Angle systems at a junction of four or five rays.

A junction point A0 sends rays towards boundary vertices A1..An (n = 4 or 5).
Measuring only the angles that rays 3..n make with ray 1 and with ray 2 —
five angles for four rays, seven for five — pins the whole configuration down
to a mirror image through the plane of rays 1 and 2:

* the elevation of each later ray over that plane (:func:`polar_offsets`),
* the cosine of the angle between two later rays, up to a quadratic with two
  roots (:func:`cos_alpha_candidates`, :func:`cos_alpha_extended`); the two
  roots realize the rays on opposite sides (smaller root) or the same side
  (larger root) of the ray-1/ray-2 plane,
* an explicit coordinate realization (:func:`reconstruct_rays`), once
  "hemisphere bits" fix the mirror choice for each later ray.

Angles are radians throughout; ray indices are 1-based, matching the vertex
labels A1..A5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfiguration, NoMatchingRoot, RootOutOfRange, Unrealizable
from .geometry import as_point, unit_vector

__all__ = [
    "AngleSystem5",
    "AngleSystem7",
    "RaySystem",
    "cos_alpha_candidates",
    "cos_alpha_extended",
    "polar_offsets",
    "projected_angle_from_angles",
    "reconstruct_rays",
    "resolve_root",
]

#: Radicands in [-RADICAND_CLIP, 0) are clamped to zero before square roots.
RADICAND_CLIP = 1e-12

#: Cosine roots may exceed [-1, 1] by at most this before being an error.
ROOT_CLAMP = 1e-10


def _gram(c_a: float, c_b: float, c_c: float) -> float:
    """Gram determinant of three unit rays with pairwise cosines c_a, c_b, c_c.

    Nonnegative exactly when three actual rays realize those mutual angles.
    """
    return 1.0 + 2.0 * c_a * c_b * c_c - c_a * c_a - c_b * c_b - c_c * c_c


@dataclass(frozen=True)
class AngleSystem5:
    """The five given angles of a four-ray junction.

    ``alpha_102`` is the angle between rays 1 and 2; ``alpha_10i`` and
    ``alpha_20i`` are the angles rays i = 3, 4 make with rays 1 and 2.
    Validation is eager: every angle must lie strictly inside (0, pi) and
    each later ray must be realizable against the ray-1/ray-2 frame (the
    Gram determinant of each triple (1, 2, i) must be nonnegative up to a
    1e-12 clip).
    """

    alpha_102: float
    alpha_103: float
    alpha_104: float
    alpha_203: float
    alpha_204: float

    def __post_init__(self):
        _validate_system(self)

    @property
    def later_rays(self) -> tuple[int, ...]:
        """Indices of the rays measured against the (1, 2) frame."""
        return (3, 4)

    @property
    def n_rays(self) -> int:
        return 2 + len(self.later_rays)

    def frame_angles(self, i: int) -> tuple[float, float]:
        """``(alpha_10i, alpha_20i)`` for later ray ``i``."""
        return (getattr(self, f"alpha_10{i}"), getattr(self, f"alpha_20{i}"))


@dataclass(frozen=True)
class AngleSystem7(AngleSystem5):
    """The seven given angles of a five-ray junction (adds ray 5)."""

    alpha_105: float = 0.0
    alpha_205: float = 0.0

    @property
    def later_rays(self) -> tuple[int, ...]:
        return (3, 4, 5)


def _validate_system(sys: AngleSystem5) -> None:
    names = ["alpha_102"]
    for i in sys.later_rays:
        names += [f"alpha_10{i}", f"alpha_20{i}"]
    for name in names:
        a = getattr(sys, name)
        if not (isinstance(a, (int, float)) and math.isfinite(a)):
            raise Unrealizable(f"{name} must be a finite number")
        if not 0.0 < a < math.pi:
            raise Unrealizable(f"{name} = {a!r} must lie strictly inside (0, pi)")
    if math.sin(sys.alpha_102) <= 1e-12:
        raise Unrealizable("alpha_102 is too close to 0 or pi to span a frame")
    c12 = math.cos(sys.alpha_102)
    for i in sys.later_rays:
        a1i, a2i = sys.frame_angles(i)
        g = _gram(c12, math.cos(a1i), math.cos(a2i))
        if g < -RADICAND_CLIP:
            raise Unrealizable(
                f"rays 1, 2, {i} are unrealizable: Gram determinant {g:.3e} < 0"
            )


def _cos2_elevation(sys: AngleSystem5, i: int) -> float:
    """Squared cosine of the elevation of ray ``i`` over the (1, 2) plane."""
    c12 = math.cos(sys.alpha_102)
    s12sq = 1.0 - c12 * c12
    a1i, a2i = sys.frame_angles(i)
    c1i, c2i = math.cos(a1i), math.cos(a2i)
    num = c1i * c1i + c2i * c2i - 2.0 * c12 * c1i * c2i
    cos2 = max(num, 0.0) / s12sq
    if cos2 > 1.0 + RADICAND_CLIP:
        raise Unrealizable(
            f"ray {i}: squared elevation cosine {cos2!r} exceeds 1 "
            "(angles are not realizable)"
        )
    return min(cos2, 1.0)


def polar_offsets(sys: AngleSystem5) -> list[float]:
    """Elevation of each later ray over the ray-1/ray-2 plane, in [0, pi/2].

    An in-plane ray has offset 0; a ray along the plane normal has pi/2.
    """
    return [math.acos(math.sqrt(_cos2_elevation(sys, i))) for i in sys.later_rays]


def _clamp_root(x: float) -> float:
    if x > 1.0:
        if x > 1.0 + ROOT_CLAMP:
            raise RootOutOfRange(f"cosine root {x!r} exceeds 1 beyond tolerance")
        return 1.0
    if x < -1.0:
        if x < -1.0 - ROOT_CLAMP:
            raise RootOutOfRange(f"cosine root {x!r} is below -1 beyond tolerance")
        return -1.0
    return x


def _pair_roots(sys: AngleSystem5, i: int, j: int) -> tuple[float, float]:
    """Both candidate values of cos(angle between later rays i and j)."""
    c12 = math.cos(sys.alpha_102)
    s12sq = 1.0 - c12 * c12
    c1i, c2i = (math.cos(a) for a in sys.frame_angles(i))
    c1j, c2j = (math.cos(a) for a in sys.frame_angles(j))
    mid = (c1i * c1j + c2i * c2j - c12 * (c2i * c1j + c1i * c2j)) / s12sq
    gi = max(_gram(c12, c1i, c2i), 0.0)
    gj = max(_gram(c12, c1j, c2j), 0.0)
    radicand = gi * gj
    if radicand < 0.0:  # cannot happen after the clips above; defensive
        raise Unrealizable("negative radicand in the two-root quadratic")
    half = math.sqrt(radicand) / s12sq
    return (_clamp_root(mid - half), _clamp_root(mid + half))


def _check_pair(sys: AngleSystem5, pair, allowed) -> tuple[int, int]:
    try:
        i, j = sorted(int(p) for p in pair)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"pair must be two ray indices, got {pair!r}") from exc
    if (i, j) not in allowed:
        raise ValueError(f"pair {pair!r} is not one of {sorted(allowed)}")
    if j > max(sys.later_rays):
        raise ValueError(f"pair {pair!r} needs a ray this angle system does not have")
    return i, j


def cos_alpha_candidates(sys: AngleSystem5, pair=(3, 4)) -> tuple[float, float]:
    """The two candidate cosines of the angle between rays 3 and 4.

    Returns ``(root_a, root_b)`` with ``root_a <= root_b``; ``root_a`` is
    realized when the two rays lie on opposite sides of the ray-1/ray-2
    plane, ``root_b`` when they lie on the same side.  Use
    :func:`resolve_root` to pick the branch matching a known geometry.
    """
    i, j = _check_pair(sys, pair, {(3, 4)})
    return _pair_roots(sys, i, j)


def cos_alpha_extended(sys: AngleSystem7, pair) -> tuple[float, float]:
    """Like :func:`cos_alpha_candidates` for the pairs involving ray 5."""
    if not isinstance(sys, AngleSystem7):
        raise ValueError("cos_alpha_extended needs a seven-angle system")
    i, j = _check_pair(sys, pair, {(3, 5), (4, 5)})
    return _pair_roots(sys, i, j)


@dataclass(frozen=True)
class RaySystem:
    """A junction point with n = 4 or 5 unit ray directions.

    ``units`` holds one unit vector per row, ray i in row i-1 (indices are
    1-based everywhere in the public interface).  ``hemisphere_bits``
    records, for rays 4..n, the side of the ray-1/ray-2 plane the ray lies
    on: +1 along the frame normal u1 x u2, -1 opposite, and +1 by
    convention for in-plane rays.
    """

    origin: np.ndarray
    units: np.ndarray
    hemisphere_bits: tuple[int, ...]

    def __post_init__(self):
        origin = as_point(self.origin)
        units = np.asarray(self.units, dtype=float)
        if units.ndim != 2 or units.shape[1] != 3 or units.shape[0] not in (4, 5):
            raise InvalidConfiguration(
                f"a ray system needs 4 or 5 unit directions, got shape {units.shape}"
            )
        norms = np.linalg.norm(units, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise InvalidConfiguration("ray directions must be unit vectors")
        units = units / norms[:, None]
        bits = tuple(int(b) for b in self.hemisphere_bits)
        if len(bits) != units.shape[0] - 3 or any(b not in (-1, 1) for b in bits):
            raise InvalidConfiguration(
                "hemisphere_bits must hold +1/-1 for each ray from 4 up"
            )
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "units", units)
        object.__setattr__(self, "hemisphere_bits", bits)

    @classmethod
    def from_points(cls, a0, vertices) -> "RaySystem":
        """Measure the ray system of a junction point and 4 or 5 vertices."""
        a0 = as_point(a0)
        verts = [as_point(v) for v in vertices]
        if len(verts) not in (4, 5):
            raise InvalidConfiguration(f"need 4 or 5 vertices, got {len(verts)}")
        units = np.array([unit_vector(a0, v) for v in verts])
        bits = _frame_bits(units)[1:]
        return cls(origin=a0, units=units, hemisphere_bits=bits)

    @property
    def n(self) -> int:
        return int(self.units.shape[0])

    def unit(self, i: int) -> np.ndarray:
        """Unit direction of ray ``i`` (1-based)."""
        if not 1 <= i <= self.n:
            raise IndexError(f"ray index {i} out of range 1..{self.n}")
        return self.units[i - 1]

    def angle(self, i: int, j: int) -> float:
        """Angle between rays ``i`` and ``j``, in [0, pi]."""
        c = float(np.dot(self.unit(i), self.unit(j)))
        return math.acos(min(1.0, max(-1.0, c)))

    def bits_from_frame(self) -> tuple[int, ...]:
        """Sides of the ray-1/ray-2 plane for rays 3..n (in-plane counts +1)."""
        return _frame_bits(self.units)

    def angle_system(self) -> AngleSystem5:
        """The five- or seven-angle system this ray system realizes."""
        if self.n == 4:
            return AngleSystem5(
                alpha_102=self.angle(1, 2),
                alpha_103=self.angle(1, 3),
                alpha_104=self.angle(1, 4),
                alpha_203=self.angle(2, 3),
                alpha_204=self.angle(2, 4),
            )
        return AngleSystem7(
            alpha_102=self.angle(1, 2),
            alpha_103=self.angle(1, 3),
            alpha_104=self.angle(1, 4),
            alpha_203=self.angle(2, 3),
            alpha_204=self.angle(2, 4),
            alpha_105=self.angle(1, 5),
            alpha_205=self.angle(2, 5),
        )


def _frame_bits(units: np.ndarray) -> tuple[int, ...]:
    """Plane-side bits of rays 3..n relative to the u1 x u2 normal."""
    normal = np.cross(units[0], units[1])
    nn = float(np.linalg.norm(normal))
    if nn <= 1e-9:
        raise Unrealizable("rays 1 and 2 are collinear; the frame plane is undefined")
    normal = normal / nn
    bits = []
    for k in range(2, units.shape[0]):
        z = float(np.dot(units[k], normal))
        bits.append(1 if z >= 0.0 else -1)
    return tuple(bits)


def reconstruct_rays(sys: AngleSystem5, hemisphere_bits) -> RaySystem:
    """Realize an angle system by explicit unit vectors.

    ``hemisphere_bits`` holds one entry of +1 or -1 per later ray (rays
    3..n, so two bits for a five-angle system, three for a seven-angle
    one), choosing the sign of that ray's component along the frame normal
    u1 x u2.  The mirror image (all bits flipped) realizes the same angle
    system.
    """
    bits = tuple(int(b) for b in hemisphere_bits)
    if len(bits) != len(sys.later_rays):
        raise ValueError(
            f"need {len(sys.later_rays)} hemisphere bits (rays {sys.later_rays}), "
            f"got {len(bits)}"
        )
    if any(b not in (-1, 1) for b in bits):
        raise ValueError("hemisphere bits must be +1 or -1")

    c12 = math.cos(sys.alpha_102)
    s12 = math.sin(sys.alpha_102)
    rows = [np.array([1.0, 0.0, 0.0]), np.array([c12, s12, 0.0])]
    for i, bit in zip(sys.later_rays, bits):
        a1i, a2i = sys.frame_angles(i)
        c1i, c2i = math.cos(a1i), math.cos(a2i)
        cos2 = _cos2_elevation(sys, i)
        sp = math.sqrt(max(0.0, 1.0 - cos2))
        x = c1i
        y = (c2i - c1i * c12) / s12
        v = np.array([x, y, bit * sp])
        nv = float(np.linalg.norm(v))
        if abs(nv - 1.0) > 1e-9:
            raise Unrealizable(f"ray {i} does not reconstruct to a unit vector")
        rows.append(v / nv)
    units = np.array(rows)

    rays = RaySystem(
        origin=np.zeros(3), units=units, hemisphere_bits=_frame_bits(units)[1:]
    )
    # Defensive round-trip: the realization must reproduce the given angles.
    checks = [(rays.angle(1, 2), sys.alpha_102)]
    for i in sys.later_rays:
        a1i, a2i = sys.frame_angles(i)
        checks += [(rays.angle(1, i), a1i), (rays.angle(2, i), a2i)]
    if any(abs(got - want) > 1e-10 for got, want in checks):
        raise Unrealizable("reconstructed rays fail to reproduce the given angles")
    return rays


def resolve_root(sys: AngleSystem5, pair, hemisphere_bits) -> float:
    """Pick the quadratic root realized by a concrete hemisphere choice.

    Reconstructs the rays with the given bits, measures the actual cosine
    between the paired rays, and returns whichever candidate root matches
    it within 1e-9.
    """
    allowed = {(3, 4)} if not isinstance(sys, AngleSystem7) else {(3, 4), (3, 5), (4, 5)}
    i, j = _check_pair(sys, pair, allowed)
    rays = reconstruct_rays(sys, hemisphere_bits)
    dot = float(np.dot(rays.unit(i), rays.unit(j)))
    roots = _pair_roots(sys, i, j)
    best = min(roots, key=lambda r: abs(r - dot))
    if abs(best - dot) > 1e-9:
        raise NoMatchingRoot(
            f"measured cosine {dot!r} matches neither root {roots!r} within 1e-9"
        )
    return best


def projected_angle_from_angles(alpha_k0m: float, alpha_m0i: float, alpha_k0i: float) -> float:
    """Angle between ray i and its projection onto the plane of rays k and m.

    Computed purely from the three mutual angles at the junction: the plane
    is spanned by rays k and m (``alpha_k0m`` between them), and the ray of
    interest makes ``alpha_m0i`` with ray m and ``alpha_k0i`` with ray k.
    Returns a value in [0, pi/2]; an in-plane ray gives 0.
    """
    s = math.sin(alpha_k0m)
    if abs(s) <= 1e-12:
        raise Unrealizable("the spanning rays are collinear (sin alpha_k0m = 0)")
    ckm = math.cos(alpha_k0m)
    cmi = math.cos(alpha_m0i)
    cki = math.cos(alpha_k0i)
    num = cmi * cmi + cki * cki - 2.0 * ckm * cmi * cki
    cos2 = max(num, 0.0) / (s * s)
    if cos2 > 1.0 + RADICAND_CLIP:
        raise Unrealizable(f"squared projection cosine {cos2!r} exceeds 1")
    return math.acos(math.sqrt(min(cos2, 1.0)))

"""Plasticity of the weighted Fermat-Torricelli point.

Two kinds of change leave the minimizing point where it is:

* **Weight plasticity.**  For five boundary points (a "closed hexahedron"
  as seen from the interior point) the equilibrium fixes only ratios; with
  the fourth weight pinned at (c - residual)/2, the fifth weight B5 is a
  free parameter and the first three weights move affinely with it while
  the minimizer stays put.  `hexahedron_plasticity` assembles those weights
  from mixed-inverse runs on the boundary tetrahedra, signed by which side
  of each coordinate plane the remaining rays lie on; `feasible_b5_interval`
  reports the B5 range keeping every weight positive.  The planar analogue
  for convex quadrilaterals, with B4 free, is `quadrilateral_plasticity` /
  `feasible_b4_interval`.

* **Geometric plasticity.**  Sliding each vertex along its ray away from or
  toward the minimizer (positive scale factors) leaves every unit vector,
  hence the equilibrium, unchanged.  `geometric_plasticity_transport`
  performs the slide and re-certifies the floating condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .angles import RaySystem
from .errors import (
    DegenerateProjection,
    FloatingViolated,
    InfeasibleSplit,
    InvalidConfiguration,
    InvalidMassBudget,
    NonpositiveWeight,
    NotCoplanar,
    NotInterior,
    SignDegenerate,
)
from .forward import Absorbed, BoundaryConfiguration, Floating, classify, solve
from .geometry import PlaneFrame, as_point, plane_side_sign
from .inverse import MixedWeightSet, _interior_combination, mixed_inverse_tetrahedron

__all__ = [
    "PlasticityState",
    "SignConfiguration",
    "feasible_b4_interval",
    "feasible_b5_interval",
    "geometric_plasticity_transport",
    "hexahedron_plasticity",
    "quadrilateral_plasticity",
]

# Plane used to isolate each of the first three weights: the two rays
# spanning it drop out of the projected equilibrium.
_ISOLATION_PLANE = {1: (2, 3), 2: (1, 3), 3: (1, 2)}


@dataclass(frozen=True)
class SignConfiguration:
    """Side of each spanning plane taken by the rays outside it.

    ``table`` maps (ray index, (plane ray j, plane ray k)) to -1, 0 or +1:
    the sign of the ray's component along the plane's oriented normal
    (u_j x u_k), zero when the ray lies in the plane.  Indices 1-based,
    j < k.
    """

    table: dict = field(compare=False)

    def sign(self, i: int, j: int, k: int) -> int:
        return self.table[(i, (min(j, k), max(j, k)))]


def _sign_table(a0: np.ndarray, verts: np.ndarray) -> SignConfiguration:
    table = {}
    for j, k in ((2, 3), (1, 3), (1, 2)):
        frame = PlaneFrame.from_points(a0, verts[j - 1], verts[k - 1], spanning=(j, k))
        for i in range(1, len(verts) + 1):
            if i in (j, k):
                continue
            table[(i, (j, k))] = plane_side_sign(verts[i - 1], frame)
    return SignConfiguration(table=table)


@dataclass(frozen=True)
class PlasticityState:
    """Assembled hexahedron weights plus the pieces they came from.

    ``weights`` holds B1..B5; ``free_weight`` echoes the chosen B5 and
    ``residual``/``residual_split``/``total`` echo the request.  ``signs``
    is the plane-side table used, ``sub_sets`` the four mixed-inverse runs
    keyed by their vertex labels ("1234" and the three containing ray 5).
    The mass budget and flow balance hold simultaneously at exactly one B5;
    ``realized_total`` and ``realized_residual`` report the values this
    state actually realizes (the identities Sum = realized_total and
    realized balance always hold, by construction of B4).
    """

    weights: tuple[float, ...]
    free_weight: float
    residual: float
    residual_split: tuple[float, float, float]
    total: float
    signs: SignConfiguration
    sub_sets: dict = field(compare=False)

    @property
    def realized_total(self) -> float:
        return float(sum(self.weights))

    @property
    def realized_residual(self) -> float:
        """The residual balancing this set: B1+B2+B3+B5 - B4."""
        return float(self.realized_total - 2.0 * self.weights[3])

    @property
    def mass_defect(self) -> float:
        return self.realized_total - self.total

    @property
    def balance_defect(self) -> float:
        return self.realized_residual - self.residual


def _split_residual(residual: float, residual_split) -> tuple[float, float, float]:
    if residual_split is None:
        return (residual / 3.0, residual / 3.0, residual / 3.0)
    parts = tuple(float(x) for x in residual_split)
    if len(parts) != 3:
        raise InfeasibleSplit(f"residual_split needs 3 parts, got {len(parts)}")
    if any(x < 0.0 for x in parts):
        raise InfeasibleSplit("residual_split parts must be nonnegative")
    if abs(sum(parts) - residual) > 1e-9 * max(1.0, abs(residual)):
        raise InfeasibleSplit(
            f"residual_split sums to {sum(parts)!r}, expected the residual {residual!r}"
        )
    return parts


def _hexa_affine(vertices, a0, c: float, residual: float, residual_split):
    """Affine coefficients B_i(b5) = alpha_i + beta_i*b5 for i = 1..3.

    Returns (alphas, betas, b4, signs, sub_sets).  Raises NotInterior,
    InvalidMassBudget, SignDegenerate, InfeasibleSplit.
    """
    a0 = as_point(a0)
    verts = np.array([as_point(v) for v in vertices])
    if verts.shape[0] != 5:
        raise InvalidConfiguration(f"need 5 vertices, got {verts.shape[0]}")
    if not c > residual:
        raise InvalidMassBudget(f"need c > residual, got c={c!r}, residual={residual!r}")
    split = _split_residual(residual, residual_split)
    rays = RaySystem.from_points(a0, verts)
    _interior_combination(rays.units)

    signs = _sign_table(a0, verts)
    # The six denominators of the assembly equations must not vanish:
    # sgn(i, plane_i) for i = 1..3 and sgn(4, plane_i) for each plane.
    zeros = []
    for i in (1, 2, 3):
        j, k = _ISOLATION_PLANE[i]
        if signs.sign(i, j, k) == 0:
            zeros.append(f"sgn({i},{j}0{k})")
        if signs.sign(4, j, k) == 0:
            zeros.append(f"sgn(4,{j}0{k})")
    if zeros:
        raise SignDegenerate(
            "assembly denominators vanish: " + ", ".join(zeros)
            + " (a ray lies in a spanning plane)"
        )

    sub_sets = {}
    try:
        main = mixed_inverse_tetrahedron(
            (a0, verts[:4]), c, residual,
            require_interior=False, allow_zero_weights=True,
        )
        sub_sets["1234"] = main
        sub_vertices = {1: (2, 3, 4, 5), 2: (1, 3, 4, 5), 3: (1, 2, 4, 5)}
        for i, labels in sub_vertices.items():
            sub = mixed_inverse_tetrahedron(
                (a0, verts[[l - 1 for l in labels]]), c, split[i - 1],
                require_interior=False, allow_zero_weights=True,
            )
            sub_sets["".join(str(l) for l in labels)] = sub
    except (DegenerateProjection, NonpositiveWeight) as exc:
        raise SignDegenerate(f"a boundary-tetrahedron ratio is degenerate: {exc}") from exc

    b4 = (c - residual) / 2.0
    alphas = np.empty(3)
    betas = np.empty(3)
    for i in (1, 2, 3):
        j, k = _ISOLATION_PLANE[i]
        sg_i = signs.sign(i, j, k)
        sg_4 = signs.sign(4, j, k)
        sg_5 = signs.sign(5, j, k)
        big_r = sub_sets["1234"].weights[i - 1] / sub_sets["1234"].weights[3]
        sub = sub_sets["".join(str(l) for l in sub_vertices[i])]
        big_q = sub.weights[2] / sub.weights[3]  # (B4/B5) in the sub-run
        alphas[i - 1] = -(sg_4 / sg_i) * big_r * b4
        betas[i - 1] = -(sg_5 / sg_i) * big_r * big_q
    return alphas, betas, b4, signs, sub_sets


def hexahedron_plasticity(
    vertices,
    a0,
    c: float,
    residual: float,
    b5: float,
    residual_split=None,
) -> PlasticityState:
    """Five-point weight set with prescribed minimizer and free fifth weight.

    B4 is pinned at (c - residual)/2 and B5 = ``b5`` chosen freely inside
    `feasible_b5_interval`; B1..B3 follow from mixed-inverse ratios of the
    boundary tetrahedra 1234, 2345, 1345, 1245 (the last three with the
    residual split across them, equal thirds by default).  Every value of
    b5 in the interval yields the same minimizer ``a0``.
    """
    alphas, betas, b4, signs, sub_sets = _hexa_affine(
        vertices, a0, c, residual, residual_split
    )
    if not (math.isfinite(b5) and b5 >= 0.0):
        raise NonpositiveWeight(f"b5 = {b5!r} must be a nonnegative number")
    first3 = alphas + betas * b5
    if np.any(first3 <= 0.0):
        bad = int(np.argmin(first3)) + 1
        lo, hi = _affine_interval(alphas, betas)
        raise NonpositiveWeight(
            f"B{bad} = {float(first3[bad - 1])!r} at b5={b5!r}; feasible b5 "
            f"interval is ({lo!r}, {hi!r})"
        )
    split = _split_residual(residual, residual_split)
    return PlasticityState(
        weights=(float(first3[0]), float(first3[1]), float(first3[2]), b4, float(b5)),
        free_weight=float(b5),
        residual=residual,
        residual_split=split,
        total=c,
        signs=signs,
        sub_sets=sub_sets,
    )


def _affine_interval(alphas, betas) -> tuple[float, float]:
    """b5 range keeping alpha + beta*b5 positive for every row, with b5 >= 0."""
    lo, hi = 0.0, math.inf
    for a, b in zip(alphas, betas):
        if b > 0.0:
            lo = max(lo, -a / b)
        elif b < 0.0:
            hi = min(hi, -a / b)
        elif a <= 0.0:
            return (0.0, 0.0)
    return (float(lo), float(hi))


def feasible_b5_interval(
    vertices, a0, c: float, residual: float, residual_split=None
) -> tuple[float, float]:
    """Maximal interval of b5 keeping all five hexahedron weights positive.

    The upper end may be inf; an empty interval is returned as (lo, hi)
    with hi <= lo.
    """
    if residual >= c:
        raise InvalidMassBudget(f"residual {residual!r} must be below c {c!r}")
    alphas, betas, _, _, _ = _hexa_affine(vertices, a0, c, residual, residual_split)
    return _affine_interval(alphas, betas)


def _planar_frame(verts5: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coplanarity test and an orthonormal in-plane basis for 5 points."""
    centroid = verts5.mean(axis=0)
    centered = verts5 - centroid
    diam = max(
        float(np.linalg.norm(a - b)) for i, a in enumerate(verts5) for b in verts5[i + 1:]
    )
    _, s, vt = np.linalg.svd(centered)
    if s[2] > 1e-9 * max(diam, 1e-300):
        raise NotCoplanar(
            f"points deviate from a common plane by {s[2]!r} (diameter {diam!r})"
        )
    return centroid, vt[0], vt[1]


def _quad_affine(vertices, a0, c: float):
    """Affine coefficients B_i(b4) = alpha_i + beta_i*b4, i = 1..4 (beta_4 = 1)."""
    a0 = as_point(a0)
    verts = np.array([as_point(v) for v in vertices])
    if verts.shape[0] != 4:
        raise InvalidConfiguration(f"need 4 vertices, got {verts.shape[0]}")
    centroid, e1, e2 = _planar_frame(np.vstack([verts, a0[None, :]]))
    flat = np.stack([(verts - centroid) @ e1, (verts - centroid) @ e2], axis=1)
    p0 = np.array([(a0 - centroid) @ e1, (a0 - centroid) @ e2])

    # Convexity of the cyclic order 1-2-3-4: consistent turn at every corner.
    crosses = []
    for i in range(4):
        e_prev = flat[i] - flat[i - 1]
        e_next = flat[(i + 1) % 4] - flat[i]
        crosses.append(float(e_prev[0] * e_next[1] - e_prev[1] * e_next[0]))
    if any(abs(x) <= 1e-12 for x in crosses) or len({math.copysign(1, x) for x in crosses}) != 1:
        raise NotInterior("vertices do not form a convex quadrilateral in this order")

    rel = flat - p0
    norms = np.linalg.norm(rel, axis=1)
    if np.any(norms <= 1e-12):
        raise NotInterior("the prescribed point coincides with a vertex")
    u = rel / norms[:, None]
    # Strictly positive planar spanning <=> every angular gap below pi.
    theta = np.sort(np.arctan2(u[:, 1], u[:, 0]))
    gaps = np.diff(np.concatenate([theta, [theta[0] + 2.0 * math.pi]]))
    if gaps.max() >= math.pi - 1e-12:
        raise NotInterior("the prescribed point is not interior to the quadrilateral")

    def perp(v):
        return np.array([-v[1], v[0]])

    n3, n2 = perp(u[2]), perp(u[1])
    d23 = float(np.dot(u[1], n3))
    d32 = float(np.dot(u[2], n2))
    if abs(d23) <= 1e-12 or abs(d32) <= 1e-12:
        raise NotInterior("the prescribed point lies on an edge line")
    s2 = -float(np.dot(u[0], n3)) / d23
    p2 = -float(np.dot(u[3], n3)) / d23
    s3 = -float(np.dot(u[0], n2)) / d32
    p3 = -float(np.dot(u[3], n2)) / d32
    denom = 1.0 + s2 + s3
    if abs(denom) <= 1e-12:
        raise NotInterior("the planar equilibrium is degenerate for this geometry")
    base = c / denom
    slope = (1.0 + p2 + p3) / denom
    alphas = np.array([base, s2 * base, s3 * base, 0.0])
    betas = np.array([-slope, -s2 * slope + p2, -s3 * slope + p3, 1.0])
    return alphas, betas


def quadrilateral_plasticity(vertices, a0, c: float, residual: float, b4: float) -> MixedWeightSet:
    """Convex-quadrilateral weights with prescribed minimizer and free B4.

    The four points and ``a0`` must be coplanar (any plane in space) with
    ``a0`` interior to the convex quadrilateral taken in vertex order.  B2
    and B3 come from projecting the planar equilibrium onto the directions
    that silence rays 3 and 2 in turn; B1 then restores the mass budget
    sum = c.  All weights are affine in b4, and the minimizer does not move
    as b4 sweeps `feasible_b4_interval`.
    """
    if not c > residual:
        raise InvalidMassBudget(f"need c > residual, got c={c!r}, residual={residual!r}")
    alphas, betas = _quad_affine(vertices, a0, c)
    if not (math.isfinite(b4) and b4 > 0.0):
        raise NonpositiveWeight(f"b4 = {b4!r} must be positive")
    w = alphas + betas * b4
    if np.any(w[:3] <= 0.0):
        bad = int(np.argmin(w[:3])) + 1
        lo, hi = _affine_interval(alphas, betas)
        raise NonpositiveWeight(
            f"B{bad} = {float(w[bad - 1])!r} at b4={b4!r}; feasible b4 "
            f"interval is ({lo!r}, {hi!r})"
        )
    return MixedWeightSet(
        weights=tuple(float(x) for x in w),
        residual=residual,
        total=c,
        outflow=(3, 4),
    )


def feasible_b4_interval(vertices, a0, c: float, residual: float) -> tuple[float, float]:
    """Maximal interval of b4 keeping all four quadrilateral weights positive."""
    if residual >= c:
        raise InvalidMassBudget(f"residual {residual!r} must be below c {c!r}")
    alphas, betas = _quad_affine(vertices, a0, c)
    return _affine_interval(alphas, betas)


def geometric_plasticity_transport(
    config: BoundaryConfiguration, scales, tol: float = 1e-12
) -> BoundaryConfiguration:
    """Slide each vertex along its ray from the minimizer; weights unchanged.

    ``scales`` are positive per-vertex factors applied to the vertex offsets
    from the solved minimizer.  Directions are untouched, so the minimizer
    of the output is the same point; the output must still pass the
    floating test with slack ``tol``, otherwise FloatingViolated reports
    the failing vertex.
    """
    sol = solve(config, tol=min(tol, 1e-10))
    if not isinstance(sol.case, Floating):
        raise InvalidConfiguration(
            f"input configuration is absorbed at vertex {sol.case.vertex}; "
            "geometric transport needs a floating configuration"
        )
    s = [float(x) for x in scales]
    if len(s) != config.n:
        raise InvalidConfiguration(f"need {config.n} scales, got {len(s)}")
    if any(not (math.isfinite(x) and x > 0.0) for x in s):
        raise InvalidConfiguration("scales must be positive numbers")
    a0 = sol.point
    new_verts = np.array([a0 + si * (v - a0) for si, v in zip(s, config.vertices)])
    out = BoundaryConfiguration(vertices=new_verts, weights=config.weights)
    for k in range(out.n):
        pull = np.zeros(3)
        for j in range(out.n):
            if j != k:
                v = out.vertices[j] - out.vertices[k]
                pull += out.weights[j] * v / np.linalg.norm(v)
        if float(np.linalg.norm(pull)) <= out.weights[k] + tol:
            raise FloatingViolated(
                f"vertex {k + 1} fails the floating test after scaling", vertex=k + 1
            )
    return out

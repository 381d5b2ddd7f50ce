"""Inverse and mixed-inverse weighted Fermat-Torricelli solvers.

The forward problem maps weights to a minimizing point; here we go the other
way.  Given the rays from a prescribed interior point toward the vertices of
a tetrahedron (or triangle) and a total mass budget c, the mixed problem asks
for vertex weights summing to c that make the point optimal while a residual
weight B0 stays available at the point itself.  The answer is a one-parameter
family: the weight ratios are fixed by sine ratios of projected angles
(opposite-sine rule), and the residual only scales them.  Exactly one
residual value makes the family member satisfy both the mass budget and the
mass-flow balance; `residual_for_unique_*` computes it, and the resulting
member coincides with the classical inverse solution.

All vertex indices in this module are 1-based, matching the ray labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .angles import AngleSystem5, RaySystem, reconstruct_rays
from .errors import (
    BudgetInconsistent,
    DegenerateProjection,
    InfeasibleSplit,
    InvalidConfiguration,
    InvalidMassBudget,
    NonpositiveWeight,
    NotInterior,
)
from .forward import BoundaryConfiguration
from .geometry import as_point, unit_vector

__all__ = [
    "FlowDecomposition",
    "MixedWeightSet",
    "check_absorbed_family",
    "flow_decompose",
    "inverse_tetrahedron",
    "mixed_inverse_tetrahedron",
    "mixed_inverse_triangle",
    "partial_distance_derivatives",
    "residual_for_unique_inverse_tetra",
    "residual_for_unique_inverse_triangle",
]

_BUDGET_RTOL = 1e-10


@dataclass(frozen=True)
class MixedWeightSet:
    """Vertex weights plus the residual they were computed for.

    ``weights`` are the boundary weights B1..Bn in vertex order; ``residual``
    and ``total`` echo the requested B0 and c.  ``outflow`` names the
    vertices (1-based) on the receiving side of the mass-flow balance.
    The mass budget (sum = total) and the balance hold together at exactly
    one residual; ``implied_residual`` reports it for this ratio family.
    """

    weights: tuple[float, ...]
    residual: float
    total: float
    outflow: tuple[int, ...]

    @property
    def mass_defect(self) -> float:
        """sum(weights) - total; zero exactly at the budget-consistent residual."""
        return float(sum(self.weights) - self.total)

    @property
    def balance_defect(self) -> float:
        """Inflow-side minus outflow-side mass (residual included)."""
        inflow = sum(w for i, w in enumerate(self.weights, start=1) if i not in self.outflow)
        outflow = sum(w for i, w in enumerate(self.weights, start=1) if i in self.outflow)
        return float(inflow - (self.residual + outflow))

    @property
    def implied_residual(self) -> float:
        """The residual that balances this set's actual in/out flows."""
        return float(self.balance_defect + self.residual)


@dataclass(frozen=True)
class FlowDecomposition:
    """Split of each combined weight into an inflow and an outflow part."""

    inflows: tuple[float, ...]
    outflows: tuple[float, ...]
    residual_in: float
    residual_out: float


def _as_ray_system(source, n: int) -> RaySystem:
    """Coerce the accepted input forms to a RaySystem with ``n`` rays."""
    if isinstance(source, RaySystem):
        rays = source
    elif isinstance(source, (tuple, list)) and len(source) == 2:
        first, second = source
        if isinstance(first, AngleSystem5):
            rays = reconstruct_rays(first, second)
        else:
            rays = RaySystem.from_points(first, second)
    else:
        raise InvalidConfiguration(
            "rays must be a RaySystem, an (angle system, hemisphere bits) pair, "
            "or an (interior point, vertices) pair"
        )
    if rays.n != n:
        raise InvalidConfiguration(f"expected {n} rays, got {rays.n}")
    return rays


def _interior_combination(units: np.ndarray) -> np.ndarray:
    """Strictly positive coefficients combining the rays to zero.

    Such coefficients exist exactly when the junction point is strictly
    interior to the hull of the vertices (the rays positively span space).
    Raises NotInterior otherwise.  Coefficients are normalized to sum 1.
    """
    m = units.shape[0]
    _, s, vt = np.linalg.svd(units.T)
    if s[2] <= 1e-9 * s[0]:
        raise NotInterior("rays do not span space; the point is not interior")
    null = vt[3:]
    if m == 4:
        lam = null[0]
        if not (np.all(lam > 0.0) or np.all(lam < 0.0)):
            raise NotInterior("rays lie in a closed half-space; point not interior")
        lam = np.abs(lam)
    else:
        # Two-dimensional null space: a positive combination a*p + b*q
        # exists iff the per-ray coefficient pairs (p_i, q_i), read as
        # plane directions, fit in an open half-plane.
        p, q = null
        r = np.hypot(p, q)
        if np.any(r <= 1e-12 * r.max()):
            raise NotInterior("a ray is forced to zero coefficient; not interior")
        theta = np.sort(np.arctan2(q, p))
        gaps = np.diff(np.concatenate([theta, [theta[0] + 2.0 * math.pi]]))
        k = int(np.argmax(gaps))
        if gaps[k] <= math.pi:
            raise NotInterior("rays lie in a closed half-space; point not interior")
        phi = theta[(k + 1) % m] + (2.0 * math.pi - gaps[k]) / 2.0
        lam = math.cos(phi) * p + math.sin(phi) * q
    if lam.min() <= 1e-10 * lam.max():
        raise NotInterior("the point is on (or numerically at) the hull boundary")
    return lam / lam.sum()


def _sine_ratio(units: np.ndarray, num: int, den: int, plane: tuple[int, int]) -> float:
    """sin(angle of ray ``num`` to plane) / sin(angle of ray ``den`` to plane).

    The plane is spanned by the two rays in ``plane``; all indices 0-based.
    """
    nvec = np.cross(units[plane[0]], units[plane[1]])
    nn = float(np.linalg.norm(nvec))
    if nn <= 1e-12:
        raise DegenerateProjection(
            f"rays {plane[0] + 1} and {plane[1] + 1} do not span a plane"
        )
    s_den = abs(float(np.dot(units[den], nvec))) / nn
    if s_den <= 1e-12:
        raise DegenerateProjection(
            f"ray {den + 1} lies in the plane of rays {plane[0] + 1}, {plane[1] + 1}"
        )
    s_num = abs(float(np.dot(units[num], nvec))) / nn
    return s_num / s_den


def _tetra_ratios(units: np.ndarray, m: int) -> list[tuple[int, float]]:
    """(vertex, weight ratio w_i / w_m) for the three non-outflow vertices."""
    others = [i for i in range(4) if i != m]
    out = []
    for i in others:
        plane = tuple(j for j in others if j != i)
        out.append((i, _sine_ratio(units, m, i, plane)))
    return out


def _check_budget(weights, c: float, residual: float, ratio_sum: float) -> None:
    defect = sum(weights) - c
    if abs(defect) > _BUDGET_RTOL * max(1.0, abs(c)):
        unique = c * (ratio_sum - 1.0) / (ratio_sum + 1.0)
        raise BudgetInconsistent(
            f"weights for residual {residual!r} sum to {sum(weights)!r}, not c={c!r}; "
            f"the budget-consistent residual is {unique!r}"
        )


def mixed_inverse_tetrahedron(
    rays,
    c: float,
    residual: float,
    outflow_index: int = 4,
    enforce_budget: bool = False,
    require_interior: bool = True,
    allow_zero_weights: bool = False,
) -> MixedWeightSet:
    """Weights making the ray origin optimal, for a prescribed residual.

    ``rays`` may be a RaySystem, an (AngleSystem5, hemisphere bits) pair, or
    an (interior point, 4 vertices) pair.  The outflow vertex's weight is
    (c - residual)/2; each other weight scales it by the ratio of projected
    sines sin(outflow ray vs. opposite plane) / sin(own ray vs. same plane).
    The ratios do not depend on the residual, so distinct residuals give
    distinct weight sets with the same minimizer.  With ``enforce_budget``
    the set is additionally required to sum to c, which singles out the
    residual of `residual_for_unique_inverse_tetra`.
    """
    rays = _as_ray_system(rays, 4)
    if not 1 <= outflow_index <= 4:
        raise InvalidConfiguration("outflow_index must be in 1..4")
    if not c > residual:
        raise InvalidMassBudget(f"need c > residual, got c={c!r}, residual={residual!r}")
    if require_interior:
        _interior_combination(rays.units)
    m = outflow_index - 1
    t = (c - residual) / 2.0
    weights = [0.0, 0.0, 0.0, 0.0]
    weights[m] = t
    ratio_sum = 0.0
    for i, ratio in _tetra_ratios(rays.units, m):
        if ratio <= 0.0 and not allow_zero_weights:
            raise NonpositiveWeight(
                f"vertex {i + 1} gets sine ratio {ratio!r}; no residual below c "
                "yields a positive weight for it"
            )
        weights[i] = ratio * t
        ratio_sum += ratio
    if enforce_budget:
        _check_budget(weights, c, residual, ratio_sum)
    return MixedWeightSet(
        weights=tuple(weights), residual=residual, total=c, outflow=(outflow_index,)
    )


def residual_for_unique_inverse_tetra(rays, c: float, outflow_index: int = 4) -> float:
    """The residual making the mixed family member also sum to c.

    At this value the weights coincide with the classical inverse solution
    w_i = c / (1 + sum of the three sine ratios against w_i).
    """
    rays = _as_ray_system(rays, 4)
    if not 1 <= outflow_index <= 4:
        raise InvalidConfiguration("outflow_index must be in 1..4")
    _interior_combination(rays.units)
    ratio_sum = sum(r for _, r in _tetra_ratios(rays.units, outflow_index - 1))
    return c * (1.0 - 2.0 / (1.0 + ratio_sum))


def inverse_tetrahedron(rays, c: float, outflow_index: int = 4) -> MixedWeightSet:
    """Classical inverse weights: the unique set summing to c (residual implied)."""
    rays = _as_ray_system(rays, 4)
    residual = residual_for_unique_inverse_tetra(rays, c, outflow_index)
    return mixed_inverse_tetrahedron(
        rays, c, residual, outflow_index=outflow_index, enforce_budget=True
    )


def _triangle_gaps(alpha_102: float, alpha_103: float) -> tuple[float, float, float]:
    for name, a in (("alpha_102", alpha_102), ("alpha_103", alpha_103)):
        if not (math.isfinite(a) and 0.0 < a < math.pi):
            raise NotInterior(f"{name} = {a!r} must lie strictly inside (0, pi)")
    total = alpha_102 + alpha_103
    if not math.pi < total < 2.0 * math.pi:
        raise NotInterior(
            f"alpha_102 + alpha_103 = {total!r} must lie in (pi, 2*pi) for an "
            "interior floating point"
        )
    return alpha_102, alpha_103, 2.0 * math.pi - total


def mixed_inverse_triangle(
    alpha_102: float,
    alpha_103: float,
    c: float,
    residual: float,
    outflow_index: int = 3,
    enforce_budget: bool = False,
) -> MixedWeightSet:
    """Planar analogue of `mixed_inverse_tetrahedron` from the two given gaps.

    The three rays from the point split the plane into gaps alpha_102,
    alpha_103 and 2*pi minus both.  Each weight is proportional to the sine
    of the gap between the *other* two rays; the outflow vertex's weight is
    pinned at (c - residual)/2.
    """
    g12, g13, g23 = _triangle_gaps(alpha_102, alpha_103)
    if not 1 <= outflow_index <= 3:
        raise InvalidConfiguration("outflow_index must be in 1..3")
    if not c > residual:
        raise InvalidMassBudget(f"need c > residual, got c={c!r}, residual={residual!r}")
    opposite = [math.sin(g23), math.sin(g13), math.sin(g12)]
    m = outflow_index - 1
    if opposite[m] <= 1e-12:
        raise NotInterior("the gap opposite the outflow vertex is degenerate")
    t = (c - residual) / 2.0
    weights = [opposite[i] / opposite[m] * t for i in range(3)]
    weights[m] = t
    for i, w in enumerate(weights):
        if w <= 0.0:
            raise NonpositiveWeight(f"vertex {i + 1} weight {w!r} is not positive")
    if enforce_budget:
        ratio_sum = sum(opposite[i] / opposite[m] for i in range(3) if i != m)
        _check_budget(weights, c, residual, ratio_sum)
    return MixedWeightSet(
        weights=tuple(weights), residual=residual, total=c, outflow=(outflow_index,)
    )


def residual_for_unique_inverse_triangle(
    alpha_102: float, alpha_103: float, c: float, outflow_index: int = 3
) -> float:
    """The residual at which the triangle family member sums to c."""
    g12, g13, g23 = _triangle_gaps(alpha_102, alpha_103)
    if not 1 <= outflow_index <= 3:
        raise InvalidConfiguration("outflow_index must be in 1..3")
    opposite = [math.sin(g23), math.sin(g13), math.sin(g12)]
    m = outflow_index - 1
    if opposite[m] <= 1e-12:
        raise NotInterior("the gap opposite the outflow vertex is degenerate")
    ratio_sum = sum(opposite[i] / opposite[m] for i in range(3) if i != m)
    return c * (1.0 - 2.0 / (1.0 + ratio_sum))


def check_absorbed_family(config: BoundaryConfiguration, vertex: int, weights, delta: float) -> bool:
    """Do both ``weights`` and the delta-increased set absorb at ``vertex``?

    ``weights`` may be a MixedWeightSet or a plain sequence; ``vertex`` is
    1-based.  True means the combined pull of the other vertices stays within
    the vertex's weight before and after adding ``delta`` to it — i.e. the
    whole family of increased weights shares the same absorbed minimizer.
    Boundary equality counts as absorbed.
    """
    w = list(weights.weights) if isinstance(weights, MixedWeightSet) else [float(x) for x in weights]
    if len(w) != config.n:
        raise InvalidConfiguration(f"need {config.n} weights, got {len(w)}")
    if not 1 <= vertex <= config.n:
        raise InvalidConfiguration(f"vertex must be in 1..{config.n}")
    k = vertex - 1
    pull = np.zeros(3)
    for j in range(config.n):
        if j != k:
            pull += w[j] * unit_vector(config.vertices[k], config.vertices[j])
    norm = float(np.linalg.norm(pull))
    return norm <= w[k] and norm <= w[k] + delta


def flow_decompose(weight_set: MixedWeightSet, outbound=None, residual_outflow: float = 0.0) -> FlowDecomposition:
    """Split each combined weight into inflow and outflow mass.

    ``outbound`` lists the outflow part carried by each non-outflow vertex
    (zeros by default, i.e. pure one-way flow); ``residual_outflow`` is the
    outflow part of the residual.  The receiving vertex's inflow is whatever
    remains after all that mass arrives.  Requires a balanced set; raises
    InfeasibleSplit when any part would go negative.
    """
    n = len(weight_set.weights)
    if len(weight_set.outflow) != 1:
        raise InfeasibleSplit("flow decomposition needs a single outflow vertex")
    m = weight_set.outflow[0] - 1
    others = [i for i in range(n) if i != m]
    if abs(weight_set.balance_defect) > 1e-9 * max(1.0, abs(weight_set.total)):
        raise InfeasibleSplit(
            f"set is out of balance by {weight_set.balance_defect!r}; "
            "no flow decomposition exists"
        )
    if outbound is None:
        outbound = [0.0] * len(others)
    outbound = [float(x) for x in outbound]
    if len(outbound) != len(others):
        raise InfeasibleSplit(f"need {len(others)} outbound parts, got {len(outbound)}")
    if any(x < 0.0 for x in outbound) or residual_outflow < 0.0:
        raise InfeasibleSplit("split parts must be nonnegative")

    tilde = [0.0] * n
    for i, x in zip(others, outbound):
        tilde[i] = x
    tilde[m] = sum(outbound) + residual_outflow
    inflow = [bw - tw for bw, tw in zip(weight_set.weights, tilde)]
    residual_in = weight_set.residual + residual_outflow
    if any(x < -1e-12 for x in inflow) or residual_in < -1e-12:
        raise InfeasibleSplit("split exceeds an available weight")
    return FlowDecomposition(
        inflows=tuple(max(0.0, x) for x in inflow),
        outflows=tuple(tilde),
        residual_in=residual_in,
        residual_out=float(residual_outflow),
    )


def partial_distance_derivatives(vertices, a0) -> np.ndarray:
    """Closed-form partials of the 4th distance w.r.t. the first three.

    With the junction point free in space and parameterized by its distances
    to A1, A2, A3, the distance to A4 becomes a function of those three; its
    partial w.r.t. distance i is the signed ratio of ray-4's component along
    the normal of the other two rays' plane to ray-i's component (equal to
    minus a ratio of projected-angle sines when the point is interior).
    """
    a0 = as_point(a0)
    verts = [as_point(v) for v in vertices]
    if len(verts) != 4:
        raise InvalidConfiguration(f"need exactly 4 vertices, got {len(verts)}")
    units = np.array([unit_vector(a0, v) for v in verts])
    out = np.empty(3)
    for i in range(3):
        j, k = (x for x in range(3) if x != i)
        nvec = np.cross(units[j], units[k])
        nn = float(np.linalg.norm(nvec))
        if nn <= 1e-12:
            raise DegenerateProjection(f"rays {j + 1} and {k + 1} do not span a plane")
        den = float(np.dot(units[i], nvec))
        if abs(den) <= 1e-12 * nn:
            raise DegenerateProjection(
                f"ray {i + 1} lies in the plane of rays {j + 1}, {k + 1}"
            )
        out[i] = float(np.dot(units[3], nvec)) / den
    return out

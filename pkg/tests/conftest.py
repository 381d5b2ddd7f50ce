"""Deterministic instance generators shared across the test modules.

Every generator takes a seeded numpy Generator and resamples until the
instance is well conditioned: vertices clearly separated, minimizers
clearly floating (or clearly absorbed), Hessians bounded away from
singular, ray systems bounded away from degenerate planes.  The margins
are what make the brute-force grid oracle comparable to the smooth solver
at the advertised tolerances -- a razor-thin instance has a flat valley
along which any grid argmin wanders without changing the objective.
"""

import math

import numpy as np

from wfermat import (
    Absorbed,
    BoundaryConfiguration,
    Floating,
    classify,
    feasible_b4_interval,
    NotInterior,
    NotCoplanar,
    solve,
)


def ft_hessian(config, x):
    """Hessian of the weighted distance sum at an off-vertex point."""
    h = np.zeros((3, 3))
    for w, v in zip(config.weights, config.vertices):
        d = v - np.asarray(x, dtype=float)
        r = float(np.linalg.norm(d))
        u = d / r
        h += (w / r) * (np.eye(3) - np.outer(u, u))
    return h


def _separated(verts, min_ratio=0.1):
    d = np.linalg.norm(verts[:, None, :] - verts[None, :, :], axis=2)
    iu = np.triu_indices(len(verts), k=1)
    return float(d[iu].min()) >= min_ratio * float(d[iu].max())


def conditioned_floating(rng, n, planar=False):
    """A clearly-floating configuration and its solved minimizer.

    Margins: vertex separation >= 0.1 of the diameter, minimizer at least
    0.05 diameters from every vertex, Hessian eigenvalue ratio >= 0.05.
    """
    while True:
        verts = 1.5 * rng.normal(size=(n, 3))
        if planar:
            verts[:, 2] = 0.0
        if not _separated(verts):
            continue
        weights = rng.dirichlet(np.ones(n)) + 0.1
        config = BoundaryConfiguration(vertices=verts, weights=weights)
        if not isinstance(classify(config), Floating):
            continue
        sol = solve(config, tol=1e-12)
        if not isinstance(sol.case, Floating):
            continue
        diam = config.diameter
        if float(np.linalg.norm(verts - sol.point, axis=1).min()) < 0.05 * diam:
            continue
        ev = np.linalg.eigvalsh(ft_hessian(config, sol.point))
        if ev[0] < 0.05 * ev[-1]:
            continue
        return config, sol


def conditioned_absorbed(rng, n, planar=False):
    """A clearly-absorbed configuration; returns (config, absorbed vertex 1-based)."""
    while True:
        verts = 1.5 * rng.normal(size=(n, 3))
        if planar:
            verts[:, 2] = 0.0
        if not _separated(verts):
            continue
        weights = rng.dirichlet(np.ones(n)) + 0.1
        k = int(rng.integers(n))
        pull = np.zeros(3)
        for j in range(n):
            if j != k:
                v = verts[j] - verts[k]
                pull += weights[j] * v / np.linalg.norm(v)
        weights[k] = float(np.linalg.norm(pull)) * (1.3 + rng.uniform(0.0, 0.5))
        config = BoundaryConfiguration(vertices=verts, weights=weights)
        case = classify(config)
        if isinstance(case, Absorbed) and case.vertex == k + 1:
            return config, k + 1


def _ray_margins_ok(units, min_angle=0.25, min_elev=0.05):
    """All pairwise ray angles >= min_angle; every ray clears every
    complementary plane by at least min_elev in sine."""
    n = len(units)
    for i in range(n):
        for j in range(i + 1, n):
            c = abs(float(np.dot(units[i], units[j])))
            if c > math.cos(min_angle):
                return False
    if n == 4:
        for i in range(4):
            rest = [x for x in range(4) if x != i]
            for a in range(3):
                j, k = [rest[x] for x in range(3) if x != a]
                nvec = np.cross(units[j], units[k])
                nn = float(np.linalg.norm(nvec))
                if nn <= 1e-9:
                    return False
                if abs(float(np.dot(units[i], nvec))) / nn < min_elev:
                    return False
    return True


def interior_tetra(rng, min_angle=0.25, min_elev=0.05):
    """Random tetrahedron with a random interior point, both conditioned.

    The point is a Dirichlet convex combination with every coefficient at
    least 0.08, and the four rays keep pairwise angles >= ``min_angle``
    with sine elevations >= ``min_elev`` over every complementary plane.
    Derivative tests pass larger margins: the eliminated-distance function's
    curvature grows like the inverse cube of the elevation margin, and the
    central-difference comparison needs it bounded.
    """
    while True:
        verts = rng.normal(size=(4, 3))
        if not _separated(verts):
            continue
        lam = rng.dirichlet(np.ones(4))
        if lam.min() < 0.08:
            continue
        a0 = lam @ verts
        units = verts - a0
        units = units / np.linalg.norm(units, axis=1)[:, None]
        if _ray_margins_ok(units, min_angle=min_angle, min_elev=min_elev):
            return a0, verts


def interior_triangle(rng):
    """Random planar triangle with a conditioned interior point.

    Returns (a0, vertices, (alpha_102, alpha_103)) with the angles measured
    at a0; instances with internal angles below 0.15 or with a gap system
    that does not close to 2*pi are resampled.
    """
    while True:
        verts = np.concatenate([rng.normal(size=(3, 2)), np.zeros((3, 1))], axis=1)
        if not _separated(verts):
            continue
        ok = True
        for i in range(3):
            e1 = verts[(i + 1) % 3] - verts[i]
            e2 = verts[(i + 2) % 3] - verts[i]
            cosv = np.dot(e1, e2) / (np.linalg.norm(e1) * np.linalg.norm(e2))
            if math.acos(min(1.0, max(-1.0, float(cosv)))) < 0.15:
                ok = False
                break
        if not ok:
            continue
        lam = rng.dirichlet(np.ones(3))
        if lam.min() < 0.08:
            continue
        a0 = lam @ verts
        units = verts - a0
        units = units / np.linalg.norm(units, axis=1)[:, None]
        gaps = []
        for i, j in ((0, 1), (0, 2), (1, 2)):
            c = float(np.clip(np.dot(units[i], units[j]), -1.0, 1.0))
            gaps.append(math.acos(c))
        if abs(sum(gaps) - 2.0 * math.pi) > 1e-9:
            continue
        if min(gaps) < 0.15 or max(gaps) > math.pi - 0.05:
            continue
        return a0, verts, (gaps[0], gaps[1])


def hexa_instance(rng):
    """Five vertices with a conditioned interior junction point.

    Built by solving a forward problem with Dirichlet weights (floor 0.06)
    and taking the floating minimizer as the prescribed point, which makes
    the five rays positively span space by construction.
    """
    while True:
        verts = rng.normal(size=(5, 3))
        if not _separated(verts):
            continue
        weights = rng.dirichlet(np.ones(5))
        if weights.min() < 0.06:
            continue
        config = BoundaryConfiguration(vertices=verts, weights=weights)
        sol = solve(config, tol=1e-13)
        if not isinstance(sol.case, Floating):
            continue
        if float(np.linalg.norm(verts - sol.point, axis=1).min()) < 0.05 * config.diameter:
            continue
        return sol.point, verts


def quad_instance(rng, c=2.0, residual=0.3):
    """Convex coplanar quadrilateral in a random 3D plane, point inside.

    Vertices sit at sorted polar angles (cyclic gaps in [0.35, pi - 0.1])
    and radii in [0.7, 1.4] around the prescribed point, then the whole
    figure is rotated into a random plane.  Resamples until the weight
    family has a feasible interval of usable width.
    """
    while True:
        theta = np.sort(rng.uniform(0.0, 2.0 * math.pi, size=4))
        gaps = np.diff(np.concatenate([theta, [theta[0] + 2.0 * math.pi]]))
        if gaps.min() < 0.35 or gaps.max() > math.pi - 0.1:
            continue
        radii = rng.uniform(0.7, 1.4, size=4)
        flat = radii[:, None] * np.column_stack([np.cos(theta), np.sin(theta)])
        basis = np.linalg.qr(rng.normal(size=(3, 3)))[0][:, :2]
        center = rng.normal(size=3)
        verts = center + flat @ basis.T
        try:
            lo, hi = feasible_b4_interval(verts, center, c, residual)
        except (NotInterior, NotCoplanar):
            continue
        if hi - lo < 0.05 * (c - residual):
            continue
        return center, verts

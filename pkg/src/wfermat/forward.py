"""Forward solver for the weighted Fermat-Torricelli problem.

Given 3-5 weighted boundary points, find the point minimizing the weighted
sum of distances.  The minimizer either "floats" in the interior (where the
weighted unit vectors toward the vertices cancel) or is "absorbed" at a
vertex whose weight dominates the combined pull of the others.  `classify`
decides which case holds directly from the vertex data; `solve` locates the
floating point by a damped reciprocal-distance fixed-point iteration with a
Newton polish, using the optimality residual itself as the convergence test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AtVertex, InvalidConfiguration, MaxIterationsExceeded
from .geometry import as_point

__all__ = [
    "Absorbed",
    "BoundaryConfiguration",
    "FTSolution",
    "Floating",
    "classify",
    "kkt_residual",
    "objective",
    "solve",
]


@dataclass(frozen=True)
class Floating:
    """The minimizer lies strictly off every vertex."""


@dataclass(frozen=True)
class Absorbed:
    """The minimizer is boundary vertex ``vertex`` (1-based)."""

    vertex: int


@dataclass(frozen=True)
class BoundaryConfiguration:
    """Weighted boundary points A1..An, n in {3, 4, 5}.

    Vertices may be given in 2-D (padded to z = 0) or 3-D.  Weights are
    nonnegative; at least two must be strictly positive, and the vertices
    must span at least a plane.  Zero-weight vertices are allowed — they
    simply drop out of the objective.
    """

    vertices: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        verts = np.array([as_point(v) for v in self.vertices])
        if verts.shape[0] not in (3, 4, 5):
            raise InvalidConfiguration(
                f"need 3, 4 or 5 boundary points, got {verts.shape[0]}"
            )
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (verts.shape[0],):
            raise InvalidConfiguration(
                f"need one weight per vertex, got {w.shape} for {verts.shape[0]} points"
            )
        if not np.all(np.isfinite(w)) or np.any(w < 0.0):
            raise InvalidConfiguration("weights must be finite and nonnegative")
        if np.sum(w > 0.0) < 2:
            raise InvalidConfiguration("at least two weights must be positive")
        diffs = verts[1:] - verts[0]
        if np.linalg.matrix_rank(diffs, tol=1e-9 * max(1.0, float(np.abs(verts).max()))) < 2:
            raise InvalidConfiguration("boundary points must span at least a plane")
        for i in range(verts.shape[0]):
            for j in range(i + 1, verts.shape[0]):
                if np.linalg.norm(verts[i] - verts[j]) <= 1e-12:
                    raise InvalidConfiguration(f"vertices {i + 1} and {j + 1} coincide")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def diameter(self) -> float:
        d = self.vertices[:, None, :] - self.vertices[None, :, :]
        return float(np.sqrt((d * d).sum(axis=2)).max())


@dataclass(frozen=True)
class FTSolution:
    """Minimizer, its case, the objective value there, and the residual."""

    point: np.ndarray
    case: Floating | Absorbed
    objective: float
    kkt_residual: float


def objective(config: BoundaryConfiguration, x) -> float:
    """Weighted sum of distances from ``x`` to the boundary points."""
    x = as_point(x)
    d = np.linalg.norm(config.vertices - x, axis=1)
    return float(np.dot(config.weights, d))


def _pull(config: BoundaryConfiguration, k: int) -> float:
    """Norm of the combined weighted pull on vertex k (0-based) by the others."""
    ak = config.vertices[k]
    total = np.zeros(3)
    for j in range(config.n):
        if j == k:
            continue
        v = config.vertices[j] - ak
        total += config.weights[j] * v / np.linalg.norm(v)
    return float(np.linalg.norm(total))


def classify(config: BoundaryConfiguration, tol: float = 1e-12):
    """Decide floating vs absorbed straight from the vertex data.

    Vertex i absorbs the minimizer exactly when the others' combined
    weighted pull on it does not exceed its own weight; at most one vertex
    can satisfy this.
    """
    for k in range(config.n):
        if _pull(config, k) <= config.weights[k] + tol:
            return Absorbed(vertex=k + 1)
    return Floating()


def kkt_residual(config: BoundaryConfiguration, x) -> float:
    """Norm of the weighted unit-vector sum at ``x`` (zero at a floating optimum)."""
    x = as_point(x)
    d = np.linalg.norm(config.vertices - x, axis=1)
    if np.any(d <= 1e-12 * max(1.0, config.diameter)):
        raise AtVertex("the residual is undefined at a boundary point")
    units = (config.vertices - x) / d[:, None]
    return float(np.linalg.norm(config.weights @ units))


def _residual_vector(config: BoundaryConfiguration, x: np.ndarray) -> np.ndarray:
    d = np.linalg.norm(config.vertices - x, axis=1)
    units = (config.vertices - x) / d[:, None]
    return config.weights @ units


def solve(
    config: BoundaryConfiguration,
    tol: float = 1e-10,
    max_iter: int = 10000,
    x0=None,
) -> FTSolution:
    """Locate the weighted Fermat-Torricelli point.

    Absorbed cases are returned immediately from the classify test.  The
    floating case iterates the reciprocal-distance averaging map from the
    weighted centroid (or ``x0``), switching to a guarded Newton step once
    the residual is small; iterates landing on a vertex are re-tested for
    absorption and stepped off along the pull direction otherwise.
    Convergence is declared when the optimality residual drops to ``tol``.
    """
    if tol <= 0.0:
        raise InvalidConfiguration("tol must be positive")
    case = classify(config)
    if isinstance(case, Absorbed):
        k = case.vertex - 1
        point = config.vertices[k].copy()
        return FTSolution(
            point=point,
            case=case,
            objective=objective(config, point),
            kkt_residual=max(0.0, _pull(config, k) - float(config.weights[k])),
        )

    verts = config.vertices
    w = config.weights
    scale = config.diameter
    vertex_snap = 1e-12 * max(1.0, scale)
    total_w = float(w.sum())

    if x0 is not None:
        x = as_point(x0)
    else:
        x = (w @ verts) / total_w

    best_x, best_r = x, math.inf
    fx = objective(config, x)
    for _ in range(max_iter):
        d = np.linalg.norm(verts - x, axis=1)
        hit = int(np.argmin(d))
        if d[hit] <= vertex_snap:
            # Iterate collided with a vertex: apply the absorption test
            # there, and walk off along the residual pull if it fails.
            pull_vec = np.zeros(3)
            for j in range(config.n):
                if j == hit:
                    continue
                v = verts[j] - verts[hit]
                pull_vec += w[j] * v / np.linalg.norm(v)
            pull = float(np.linalg.norm(pull_vec))
            if pull <= w[hit] + 1e-12:
                point = verts[hit].copy()
                return FTSolution(
                    point=point,
                    case=Absorbed(vertex=hit + 1),
                    objective=objective(config, point),
                    kkt_residual=max(0.0, pull - float(w[hit])),
                )
            x = verts[hit] + (1e-6 * max(1.0, scale)) * (pull_vec / pull)
            fx = objective(config, x)
            continue

        units = (verts - x) / d[:, None]
        r_vec = w @ units
        r = float(np.linalg.norm(r_vec))
        if r < best_r:
            best_x, best_r = x, r
        if r <= tol:
            return FTSolution(
                point=x, case=Floating(), objective=objective(config, x), kkt_residual=r
            )

        stepped = False
        if r < 0.1 * total_w:
            # Newton polish on the smooth region: the Hessian of the
            # objective is sum w_i/d_i (I - u_i u_i^T), positive definite
            # whenever the vertices span a plane.  The Newton direction
            # always reduces the residual norm for a short enough step
            # (R(x + a*step) ~ (1-a) R(x)), so backtrack until it does.
            hess = np.zeros((3, 3))
            for i in range(config.n):
                hess += (w[i] / d[i]) * (np.eye(3) - np.outer(units[i], units[i]))
            try:
                step = np.linalg.solve(hess, r_vec)
            except np.linalg.LinAlgError:
                step = None
            if step is not None:
                alpha = 1.0
                step_len = float(np.linalg.norm(step))
                if step_len > 0.5 * max(1.0, scale):
                    alpha = 0.5 * max(1.0, scale) / step_len
                for _ in range(25):
                    cand = x + alpha * step
                    dc = np.linalg.norm(verts - cand, axis=1)
                    if np.all(dc > vertex_snap):
                        rc = float(np.linalg.norm(w @ ((verts - cand) / dc[:, None])))
                        if rc < r:
                            x, fx = cand, objective(config, cand)
                            stepped = True
                            break
                    alpha *= 0.5
        if not stepped:
            # Reciprocal-distance averaging, damped so the objective
            # never increases (plain averaging is monotone off vertices,
            # but the guard keeps the vertex walk-offs safe too).
            coeff = w / d
            cand = (coeff @ verts) / coeff.sum()
            f_cand = objective(config, cand)
            halvings = 0
            while f_cand > fx and halvings < 30:
                cand = 0.5 * (x + cand)
                f_cand = objective(config, cand)
                halvings += 1
            x, fx = cand, f_cand

    raise MaxIterationsExceeded(
        f"no convergence to {tol} within {max_iter} iterations "
        f"(best residual {best_r:.3e})",
        best_point=best_x,
        kkt_residual=best_r,
    )

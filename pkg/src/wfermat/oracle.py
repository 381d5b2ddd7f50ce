"""Brute-force verification oracle.

Everything else in this package produces closed-form or iteratively solved
answers; this module checks them the dumb way.  `brute_force_min` minimizes
the weighted distance sum by refining a dense grid over the bounding box of
the boundary points — no derivatives, no optimality conditions, nothing
shared with the solver's machinery, so the two cannot fail the same way.
`finite_diff` is a plain central-difference stencil used to validate the
closed-form derivative identities.  Both are deterministic: a fixed seed
drives the scatter points and ties are broken by the lowest flat grid index
(within 1e-15), so identical inputs give bit-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EvaluationFailed
from .forward import BoundaryConfiguration, objective

__all__ = ["OracleResult", "brute_force_min", "finite_diff"]

_GRID = 17  # grid points per axis with nonzero extent
_JITTER = 64  # seeded scatter points added at the first level


@dataclass(frozen=True)
class OracleResult:
    minimizer: np.ndarray
    objective: float
    levels: int
    bounding_box: tuple[np.ndarray, np.ndarray]


def _axis_points(lo: float, hi: float) -> np.ndarray:
    if hi - lo <= 0.0:
        return np.array([lo])
    return np.linspace(lo, hi, _GRID)


def brute_force_min(config: BoundaryConfiguration, levels: int = 8, seed: int = 0) -> OracleResult:
    """Globally minimize the weighted distance sum by grid refinement.

    Scans a 17-per-axis grid over the vertex bounding box (plus the
    vertices themselves and 64 seeded scatter points), then re-grids a
    window of two old cells' half-width around the incumbent, shrinking
    the cell by 4x per level and never leaving the original box.
    """
    if levels < 3:
        raise ValueError("levels must be at least 3")
    verts = config.vertices
    box_lo = verts.min(axis=0)
    box_hi = verts.max(axis=0)
    extent = box_hi - box_lo

    rng = np.random.default_rng(seed)
    scatter = box_lo + rng.random((_JITTER, 3)) * extent

    lo, hi = box_lo.copy(), box_hi.copy()
    best_x = None
    best_f = np.inf
    for level in range(levels):
        axes = [_axis_points(lo[k], hi[k]) for k in range(3)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
        cand = [mesh, verts]
        if level == 0:
            cand.append(scatter)
        if best_x is not None:
            cand.append(best_x[None, :])
        pts = np.concatenate(cand, axis=0)

        d = np.linalg.norm(pts[:, None, :] - verts[None, :, :], axis=2)
        f = d @ config.weights
        fmin = float(f.min())
        # Deterministic tie-break: first flat index within 1e-15 of the min.
        idx = int(np.nonzero(f <= fmin + 1e-15)[0][0])
        best_x = pts[idx].copy()
        best_f = float(f[idx])

        spacing = np.array(
            [(hi[k] - lo[k]) / (_GRID - 1) if hi[k] > lo[k] else 0.0 for k in range(3)]
        )
        half = 2.0 * spacing
        lo = np.maximum(best_x - half, box_lo)
        hi = np.minimum(best_x + half, box_hi)

    return OracleResult(
        minimizer=best_x,
        objective=objective(config, best_x),
        levels=levels,
        bounding_box=(box_lo, box_hi),
    )


def finite_diff(f, x, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of ``f`` at ``x`` with step ``h``."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        try:
            fp, fm = float(f(xp)), float(f(xm))
        except Exception as exc:
            raise EvaluationFailed(f"stencil evaluation failed at axis {i}: {exc}") from exc
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise EvaluationFailed(f"stencil evaluation is not finite at axis {i}")
        out[i] = (fp - fm) / (2.0 * h)
    return out

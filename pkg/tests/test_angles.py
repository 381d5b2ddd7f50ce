import math

import numpy as np
import pytest

from wfermat import (
    AngleSystem5,
    AngleSystem7,
    NoMatchingRoot,
    RaySystem,
    Unrealizable,
    cos_alpha_candidates,
    cos_alpha_extended,
    polar_offsets,
    projected_angle_from_angles,
    reconstruct_rays,
    resolve_root,
)

REG = math.acos(-1.0 / 3.0)


def regular_system():
    return AngleSystem5(
        alpha_102=REG, alpha_103=REG, alpha_104=REG, alpha_203=REG, alpha_204=REG
    )


def random_units(rng, n):
    """n unit rays with pairwise angles in [0.2, pi-0.2] and clear elevations."""
    while True:
        u = rng.normal(size=(n, 3))
        u = u / np.linalg.norm(u, axis=1)[:, None]
        dots = u @ u.T
        iu = np.triu_indices(n, k=1)
        if np.max(np.abs(dots[iu])) > math.cos(0.2):
            continue
        nvec = np.cross(u[0], u[1])
        nvec = nvec / np.linalg.norm(nvec)
        if np.min(np.abs(u[2:] @ nvec)) < 0.05:
            continue
        return u


def test_regular_simplex_fixed_point():
    sys = regular_system()
    offs = polar_offsets(sys)
    expected = math.acos(math.sqrt(1.0 / 3.0))
    assert len(offs) == 2
    for x in offs:
        assert abs(x - expected) < 1e-12
    lo, hi = cos_alpha_candidates(sys, (3, 4))
    assert abs(lo - (-1.0 / 3.0)) < 1e-12
    assert abs(hi - 1.0) < 1e-12
    # opposite hemispheres select the simplex root, same side the parallel one
    assert abs(resolve_root(sys, (3, 4), (1, -1)) - (-1.0 / 3.0)) < 1e-12
    assert abs(resolve_root(sys, (3, 4), (1, 1)) - 1.0) < 1e-12


def test_validation_rejects_bad_systems():
    with pytest.raises(Unrealizable):
        AngleSystem5(alpha_102=0.0, alpha_103=1.0, alpha_104=1.0, alpha_203=1.0, alpha_204=1.0)
    with pytest.raises(Unrealizable):
        AngleSystem5(alpha_102=math.pi, alpha_103=1.0, alpha_104=1.0, alpha_203=1.0, alpha_204=1.0)
    # angles that violate the triangle-like realizability bound
    with pytest.raises(Unrealizable):
        AngleSystem5(alpha_102=0.3, alpha_103=3.0, alpha_104=1.0, alpha_203=0.3, alpha_204=1.0)
    with pytest.raises(Unrealizable):
        AngleSystem5(
            alpha_102=1.0, alpha_103=float("nan"), alpha_104=1.0, alpha_203=1.0, alpha_204=1.0
        )


def test_ray_system_round_trip_four_rays():
    rng = np.random.default_rng(42)
    for _ in range(200):
        units = random_units(rng, 4)
        a0 = rng.normal(size=3)
        verts = a0 + rng.uniform(0.5, 2.0, size=(4, 1)) * units
        rays = RaySystem.from_points(a0, verts)
        sys = rays.angle_system()
        bits = rays.bits_from_frame()
        rebuilt = reconstruct_rays(sys, bits)
        # same pairwise cosines as the originals
        for i in range(1, 5):
            for j in range(i + 1, 5):
                want = float(np.dot(rays.unit(i), rays.unit(j)))
                got = float(np.dot(rebuilt.unit(i), rebuilt.unit(j)))
                assert abs(want - got) < 1e-9


def test_resolved_root_matches_measured_cosine():
    rng = np.random.default_rng(7)
    for _ in range(200):
        units = random_units(rng, 4)
        rays = RaySystem.from_points(np.zeros(3), units)
        sys = rays.angle_system()
        bits = rays.bits_from_frame()
        measured = float(np.dot(units[2], units[3]))
        assert abs(resolve_root(sys, (3, 4), bits) - measured) < 1e-9


def test_five_ray_extended_pairs():
    rng = np.random.default_rng(3)
    for _ in range(100):
        units = random_units(rng, 5)
        rays = RaySystem.from_points(np.zeros(3), units)
        sys = rays.angle_system()
        assert isinstance(sys, AngleSystem7)
        bits = rays.bits_from_frame()
        for pair, (i, j) in (((3, 4), (2, 3)), ((3, 5), (2, 4)), ((4, 5), (3, 4))):
            measured = float(np.dot(units[i], units[j]))
            if pair == (3, 4):
                roots = cos_alpha_candidates(sys, pair)
            else:
                roots = cos_alpha_extended(sys, pair)
            assert min(abs(roots[0] - measured), abs(roots[1] - measured)) < 1e-9
            assert abs(resolve_root(sys, pair, bits) - measured) < 1e-9


def test_polar_offsets_match_direct_elevation():
    rng = np.random.default_rng(19)
    for _ in range(200):
        units = random_units(rng, 4)
        rays = RaySystem.from_points(np.zeros(3), units)
        sys = rays.angle_system()
        nvec = np.cross(units[0], units[1])
        nvec = nvec / np.linalg.norm(nvec)
        for idx, i in enumerate((2, 3)):
            direct = math.asin(min(1.0, abs(float(np.dot(units[i], nvec)))))
            assert abs(polar_offsets(sys)[idx] - direct) < 1e-9


def test_projected_angle_from_angles_matches_vectors():
    rng = np.random.default_rng(23)
    for _ in range(200):
        units = random_units(rng, 4)
        # plane of rays 1 and 2, elevation of rays 3 and 4
        a12 = math.acos(float(np.clip(np.dot(units[0], units[1]), -1, 1)))
        nvec = np.cross(units[0], units[1])
        nvec = nvec / np.linalg.norm(nvec)
        for i in (2, 3):
            a1i = math.acos(float(np.clip(np.dot(units[0], units[i]), -1, 1)))
            a2i = math.acos(float(np.clip(np.dot(units[1], units[i]), -1, 1)))
            direct = math.asin(min(1.0, abs(float(np.dot(units[i], nvec)))))
            assert abs(projected_angle_from_angles(a12, a2i, a1i) - direct) < 1e-9


def test_reconstruct_input_validation():
    sys = regular_system()
    with pytest.raises(ValueError):
        reconstruct_rays(sys, (1,))           # wrong length
    with pytest.raises(ValueError):
        reconstruct_rays(sys, (1, 2))         # not a sign
    with pytest.raises(ValueError):
        cos_alpha_candidates(sys, (4, 5))     # pair outside the 5-angle system
    with pytest.raises(ValueError):
        cos_alpha_extended(sys, (3, 5))       # needs the 7-angle system


def test_no_matching_root_on_tampered_system():
    # measure a genuine system, then perturb one frame angle so the stored
    # quadratic no longer matches the reconstructed geometry's cosine
    rng = np.random.default_rng(31)
    units = random_units(rng, 4)
    rays = RaySystem.from_points(np.zeros(3), units)
    sys = rays.angle_system()
    bits = rays.bits_from_frame()
    got = None
    try:
        bad = AngleSystem5(
            alpha_102=sys.alpha_102,
            alpha_103=sys.alpha_103,
            alpha_104=sys.alpha_104,
            alpha_203=sys.alpha_203 + 0.3,
            alpha_204=sys.alpha_204,
        )
        got = resolve_root(bad, (3, 4), bits)
    except (NoMatchingRoot, Unrealizable):
        return
    # if it resolved, the root must still match that tampered system's geometry
    rebuilt = reconstruct_rays(bad, bits)
    assert abs(got - float(np.dot(rebuilt.unit(3), rebuilt.unit(4)))) < 1e-9

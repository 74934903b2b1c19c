import numpy as np
import pytest

from hwsilw import grid as gr
from hwsilw.errors import ConfigError, UnderResolvedGeometry


def test_build_grid_1d_offset_example():
    g = gr.build_grid_1d(0.0, 2.0, 80, 0.01, 0.99)
    assert g.dx == pytest.approx(2.0 / 80, abs=0)
    assert g.x_interior[0] == pytest.approx(0.01 * g.dx, rel=1e-14)
    assert g.x_interior[-1] == pytest.approx(2.0 - 0.99 * g.dx, rel=1e-14)


def test_build_grid_1d_body_fitted():
    g = gr.build_grid_1d(0.0, 1.0, 11, 0.0, 0.0)
    assert g.dx == pytest.approx(0.1)
    assert g.x_interior[0] == 0.0
    assert g.x_interior[-1] == pytest.approx(1.0)


def test_build_grid_1d_symmetric_offsets_match_periodic_convention():
    # dx = 2*pi/N when c_a + c_b = 1, so x_N - x_1 = 2*pi - dx
    g = gr.build_grid_1d(0.0, 2 * np.pi, 10, 0.5, 0.5)
    assert g.dx == pytest.approx(2 * np.pi / 10, rel=1e-15)
    assert g.x_interior[-1] - g.x_interior[0] == pytest.approx(2 * np.pi - g.dx, rel=1e-14)


def test_build_grid_1d_spacing_has_no_drift():
    # index formula, not accumulation: spacing error stays at round-off for
    # every pair, independent of n
    g = gr.build_grid_1d(0.0, 1.0, 10001, 0.3, 0.2)
    x = g.x()
    ulp = np.finfo(float).eps * np.abs(x).max()
    assert np.abs(np.diff(x) - g.dx).max() <= 4 * ulp


def test_build_grid_1d_rejects_bad_input():
    with pytest.raises(ConfigError):
        gr.build_grid_1d(0, 1, 6, 0.1, 0.1)
    with pytest.raises(ConfigError):
        gr.build_grid_1d(0, 1, 20, 1.0, 0.0)
    with pytest.raises(ConfigError):
        gr.build_grid_1d(0, 1, 20, 0.0, -0.1)


def _disk_grid(dx):
    # origin-anchored indices covering the disk of radius 2 plus a margin
    m = int(np.ceil(2.0 / dx)) + 3
    return gr.Grid2D(nx=2 * m + 1, ny=2 * m + 1, dx=dx, dy=dx, x0=-m * dx, y0=-m * dx)


def test_classify_disk_point_roles():
    g2 = _disk_grid(1.0 / 5)
    geom = gr.Disk(0, 0, 2.0)
    gm = gr.classify_points(g2, geom)
    X, Y = g2.mesh()
    # (2.05, 0) is not a grid point at dx=0.2; use (2.2, 0): exterior, adjacent
    i = int(round((2.2 - g2.x0) / g2.dx))
    j = int(round((0.0 - g2.y0) / g2.dy))
    assert gm.status[i, j] == gr.GHOST
    k = np.nonzero((gm.ghost_ij[:, 0] == i) & (gm.ghost_ij[:, 1] == j))[0][0]
    assert gm.foot[k] == pytest.approx([2.0, 0.0], abs=1e-12)
    assert gm.normal[k] == pytest.approx([1.0, 0.0], abs=1e-12)
    # center is interior
    i0 = int(round((0.0 - g2.x0) / g2.dx))
    assert gm.status[i0, j] == gr.INTERIOR


def test_classify_disk_count_matches_brute_force():
    g2 = _disk_grid(1.0 / 5)
    geom = gr.Disk(0, 0, 2.0)
    gm = gr.classify_points(g2, geom)
    # oracle: exhaustive scan of the classification rule
    X, Y = g2.mesh()
    inside = geom.signed_distance(X, Y) <= 1e-12 * g2.h
    expect = np.zeros_like(inside)
    nx, ny = inside.shape
    for i in range(nx):
        for j in range(ny):
            if inside[i, j]:
                continue
            hit = False
            for s in (1, 2):
                if i - s >= 0 and inside[i - s, j]:
                    hit = True
                if i + s < nx and inside[i + s, j]:
                    hit = True
                if j - s >= 0 and inside[i, j - s]:
                    hit = True
                if j + s < ny and inside[i, j + s]:
                    hit = True
            expect[i, j] = hit
    assert int(expect.sum()) == len(gm.ghost_ij)
    assert np.array_equal(expect, gm.ghost_mask)


def test_classification_monotone_under_refinement():
    geom = gr.Disk(0, 0, 2.0)
    coarse = _disk_grid(1.0 / 5)
    fine = _disk_grid(1.0 / 10)
    gm_c = gr.classify_points(coarse, geom)
    gm_f = gr.classify_points(fine, geom)
    Xc, Yc = coarse.mesh()
    ic = gm_c.interior_mask
    # every coarse interior point appears (same coordinates) interior on the fine grid
    for x, y in zip(Xc[ic], Yc[ic]):
        i = int(round((x - fine.x0) / fine.dx))
        j = int(round((y - fine.y0) / fine.dy))
        assert gm_f.status[i, j] == gr.INTERIOR


def test_ghost_reprojection_invariant():
    g2 = _disk_grid(1.0 / 10)
    geom = gr.Disk(0, 0, 2.0)
    gm = gr.classify_points(g2, geom)
    X, Y = g2.mesh()
    loc = np.stack([X[gm.ghost_mask], Y[gm.ghost_mask]], axis=1)
    rebuilt = gm.foot + gm.distance[:, None] * gm.normal
    assert np.abs(rebuilt - loc).max() < 1e-10 * g2.h
    assert np.abs(np.hypot(gm.normal[:, 0], gm.normal[:, 1]) - 1).max() < 1e-12
    sd_foot = geom.signed_distance(gm.foot[:, 0], gm.foot[:, 1])
    assert np.abs(sd_foot).max() < 1e-10 * g2.h


def test_under_resolved_geometry_rejected():
    g2 = _disk_grid(1.0)
    with pytest.raises(UnderResolvedGeometry):
        gr.classify_points(g2, gr.Disk(0, 0, 2.0))


def test_foot_point_disk():
    foot, normal, dist = gr.foot_point((3.0, 0.0), gr.Disk(0, 0, 2.0))
    assert foot == pytest.approx([2.0, 0.0])
    assert normal == pytest.approx([1.0, 0.0])
    assert dist == pytest.approx(1.0)


def test_foot_point_half_plane_wall():
    foot, normal, dist = gr.foot_point((0.3, -0.2), gr.RampWedge(0.0, 0.0))
    assert foot == pytest.approx([0.3, 0.0])
    assert normal == pytest.approx([0.0, -1.0])
    assert dist == pytest.approx(0.2)


def test_foot_point_ramp_30_degrees():
    # oracle: analytic projection onto the ramp line, cross-checked by a
    # numerical minimization of the distance along the line parameter
    ang = np.pi / 6
    ramp = gr.RampWedge(x_start=1.0, angle_rad=ang)
    s0 = 0.8
    on_line = np.array([1.0 + s0 * np.cos(ang), s0 * np.sin(ang)])
    p = on_line + 0.05 * np.array([np.sin(ang), -np.cos(ang)])
    foot, normal, dist = gr.foot_point(p, ramp)
    assert normal == pytest.approx([np.sin(ang), -np.cos(ang)], abs=1e-14)
    assert dist == pytest.approx(0.05, abs=1e-14)
    assert foot == pytest.approx(on_line, abs=1e-13)
    ss = np.linspace(0, 2, 20001)
    pts = np.stack([1.0 + ss * np.cos(ang), ss * np.sin(ang)])
    k = np.argmin(np.hypot(pts[0] - p[0], pts[1] - p[1]))
    assert pts[:, k] == pytest.approx(foot, abs=1e-3)


def test_interval_geometry_reduces_to_1d_ghost_layout():
    g = gr.build_grid_1d(0.0, 1.0, 21, 0.4, 0.6)
    geom = gr.Interval(0.0, 1.0)
    x = g.x()
    sd = geom.signed_distance(x)
    interior = sd <= 1e-12
    # the two left ghost points sit at x1 - dx and x1 - 2 dx
    ghosts_left = x[~interior & (x < 0.5)]
    assert ghosts_left == pytest.approx([g.x_interior[0] - 2 * g.dx,
                                         g.x_interior[0] - g.dx], rel=1e-12)
    foot, normal, dist = geom.closest_boundary(ghosts_left)
    assert np.all(foot == 0.0)
    assert np.all(normal == -1.0)

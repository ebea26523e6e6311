import numpy as np
import pytest

from thetalab.curves import CurveSpec, CurveSpecError
from thetalab.modular import j_invariant
from thetalab.periods import SurfacePoint, build_periods
from thetalab.quadrature import (build_avoiding_path, polyline_integrals,
                                 refine_path_for_quadrature)
from thetalab.theta import Characteristic, parity, theta_norm_abs

from oracles import cross_ratio_j


def test_curve_spec_validation():
    with pytest.raises(CurveSpecError):
        CurveSpec.of(2, [0, 1])               # even count
    with pytest.raises(CurveSpecError):
        CurveSpec.of(3, [0, 1, 2])            # 3q-1 violated
    with pytest.raises(CurveSpecError):
        CurveSpec.of(2, [0, 1, 1 + 1e-12])    # coincident
    with pytest.raises(CurveSpecError):
        CurveSpec.of(5, [0, 1, 2])


def test_differential_bases():
    c2 = CurveSpec.of(2, [0, 1, 2, 3, 4])
    assert [(d.a, d.m) for d in c2.differentials()] == [(0, 1), (1, 1)]
    c3 = CurveSpec.of(3, [0, 1, 2, 3, 4])
    assert [(d.a, d.m) for d in c3.differentials()] == \
        [(0, 2), (1, 2), (2, 2), (0, 1)]
    # holomorphy: local orders nonnegative at every branch place and infinity
    for c in (c2, c3):
        for d in c.differentials():
            orders = [c.local_order(d, k) for k in range(1, c.num_branch + 1)]
            orders.append(c.local_order(d, "inf"))
            assert min(orders) >= 0
    # the canonical differential dz/w^2 on the trigonal curve: degree 2g-2 at inf
    from thetalab.curves import Differential
    assert c3.local_order(Differential(0, 2), "inf") == 2 * c3.genus - 2


def test_j_invariant_hyperelliptic(hyp_g1):
    c, pd = hyp_g1
    target = cross_ratio_j(0.0, 1.0, 2.0)
    assert abs(target - 1728.0) < 1e-9
    assert abs(j_invariant(pd.tau.matrix[0, 0]) - target) < 1e-6


def test_j_invariant_trigonal(trig_q1):
    c, pd = trig_q1
    assert abs(j_invariant(pd.tau.matrix[0, 0])) < 1e-6


def test_period_invariants_g2(hyp_g2):
    c, pd = hyp_g2
    d = pd.diagnostics
    assert d["tau_asymmetry"] < 1e-8
    assert d["im_tau_min_eig"] > 0
    assert d["quad_drift"] < 1e-9
    tau_scale = 1.0 + np.max(np.abs(pd.tau.matrix))
    for k in pd.aj_branch:
        assert pd.lattice_distance(2 * pd.aj_branch[k]) < 1e-8 * tau_scale
    assert pd.lattice_distance(2 * pd.K) < 1e-8 * tau_scale


def test_branch_parity_census_g2(hyp_g2):
    c, pd = hyp_g2
    odd = 0
    for k in pd.aj_branch:
        ch, res = pd.lattice_reduce(pd.aj_branch[k])
        assert res < 1e-7
        assert ch.is_integral()
        odd += parity(ch)
    assert odd == c.genus           # g odd, g+1 even


def test_riemann_vanishing_g2(hyp_g2):
    from thetalab.periods import _random_surface_points
    c, pd = hyp_g2
    rng = np.random.default_rng(33)
    scale = pd.theta_scale()
    ch0 = Characteristic.zero(2)
    for _ in range(6):
        pts = _random_surface_points(pd, 1, rng)
        arg = pd.abel_jacobi_divisor(pts) + pd.K
        assert theta_norm_abs(ch0, arg, pd.tau) < 1e-7 * scale


def test_abel_jacobi_path_independence(hyp_g2):
    c, pd = hyp_g2
    pt = SurfacePoint(1.3 + 0.9j, c.w_principal(1.3 + 0.9j))
    u1 = pd.abel_jacobi_point(pt)
    # alternative route through a detour waypoint
    mid = pt.z + 2.5 - 1.5j
    path1 = build_avoiding_path(pd.z_far, mid, list(c.lambdas), 0.3)
    path2 = build_avoiding_path(mid, pt.z, list(c.lambdas), 0.3)
    path = refine_path_for_quadrature(path1[:-1] + path2, list(c.lambdas))
    res = polyline_integrals(c, path, c.differentials(), pd.quad_order,
                             sing_start=False, sing_end=False,
                             w_anchor=pt.w, anchor_index=len(path) - 1)
    rho = np.exp(2j * np.pi / c.n)
    j = int(np.argmin([abs(res.w_start - pd.w_far * rho ** k) for k in range(c.n)]))
    diffs = c.differentials()
    y = np.array([pd.inf_leg[i] * rho ** (-j * d.m) for i, d in enumerate(diffs)]) + res.values
    u2 = np.linalg.solve(pd.C, y)
    assert pd.lattice_distance(u1 - u2) < 1e-9


def test_fiber_sum_is_lattice(trig_q2):
    c, pd = trig_q2
    rho = np.exp(2j * np.pi / 3)
    z = 0.37 - 0.21j
    w = c.w_principal(z)
    total = sum(pd.abel_jacobi_point(SurfacePoint(z, w * rho ** j)) for j in range(3))
    assert pd.lattice_distance(total) < 1e-9


def test_branch_point_limit_consistency(hyp_g2):
    c, pd = hyp_g2
    k = 3
    z = c.lam(k) + 1e-5 * (0.8 + 0.6j)
    for sgn in (1, -1):
        u = pd.abel_jacobi_point(SurfacePoint(z, sgn * c.w_principal(z)))
        assert pd.lattice_distance(u - pd.aj_branch[k]) < 5e-3


def test_trig_invariants(trig_q2):
    c, pd = trig_q2
    d = pd.diagnostics
    assert d["tau_asymmetry"] < 1e-8
    assert d["im_tau_min_eig"] > 0
    assert d["quad_drift"] < 1e-9
    tau_scale = 1.0 + np.max(np.abs(pd.tau.matrix))
    for k in pd.aj_branch:
        assert pd.lattice_distance(3 * pd.aj_branch[k]) < 1e-8 * tau_scale
        ch, res = pd.lattice_reduce(pd.aj_branch[k])
        assert res < 1e-7
        assert all(x.denominator in (1, 3) for x in ch.eps + ch.delta)
    assert pd.lattice_distance(2 * pd.K) < 1e-8 * tau_scale
    assert d["K_vanishing_residual"] < 1e-7


def test_lattice_reduce_basics(hyp_g2):
    c, pd = hyp_g2
    ch, res = pd.lattice_reduce(np.zeros(2, dtype=complex))
    assert all(x == 0 for x in ch.eps + ch.delta) and res < 1e-12
    v = pd.tau.matrix @ np.array([0.5, 0.0])
    ch, res = pd.lattice_reduce(v)
    assert [str(x) for x in ch.eps] == ["1", "0"]
    assert all(x == 0 for x in ch.delta)


def test_lattice_reduce_snap_failure(hyp_g2):
    from thetalab.periods import PeriodError
    c, pd = hyp_g2
    v = pd.tau.matrix @ np.array([0.5 + 0.04, 0.0])
    with pytest.raises(PeriodError):
        pd.lattice_reduce(v)


def test_theta_json_roundtrip_of_curve():
    c = CurveSpec.of(3, [0.5 + 1j, -1, 2 - 0.5j, 3, 1 + 2j])
    c2 = CurveSpec.from_json(c.to_json())
    assert c2 == c

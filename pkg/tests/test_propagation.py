import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from risplan.propagation import (
    DomainError,
    LinkModelParams,
    PathGeometry,
    fresnel_parameter,
    fspl_gain,
    knife_edge_loss_db,
    knife_edge_loss_from_v,
    link_budget_chain,
    ris_path_gain,
    to_db,
    two_ray_gain,
    umi_path_gain,
    umi_pathloss_db,
    wavelength,
)


def test_wavelength_exact_c():
    assert wavelength(6e9) == 0.05
    assert LinkModelParams(28e9).element_size == pytest.approx(3e8 / 28e9 / 2, rel=1e-15)


def test_noise_power_default():
    p = LinkModelParams()
    assert p.noise_power_dbm == pytest.approx(-94.0, abs=1e-12)
    assert p.noise_power_w == pytest.approx(10 ** (-12.4), rel=1e-12)


@pytest.mark.parametrize(
    "kw",
    [
        dict(frequency_hz=0.4e9),
        dict(frequency_hz=101e9),
        dict(ris_elements=0),
        dict(ris_amplitude=0.0),
        dict(ris_amplitude=1.1),
        dict(blockage_db=-1),
    ],
)
def test_params_invariants(kw):
    with pytest.raises(DomainError):
        LinkModelParams(**kw)


# ---- FSPL -------------------------------------------------------------------


def test_fspl_unit_distance():
    lam = 0.05
    assert fspl_gain(lam, lam / (4 * math.pi)) == pytest.approx(1.0, rel=1e-15)


def test_fspl_6ghz_100m():
    assert -to_db(fspl_gain(0.05, 100.0)) == pytest.approx(88.0, abs=0.05)
    assert -to_db(fspl_gain(0.05, 100.0)) == pytest.approx(20 * math.log10(4 * math.pi * 100 / 0.05), abs=1e-12)


def test_fspl_doubling():
    assert to_db(fspl_gain(0.05, 50.0)) - to_db(fspl_gain(0.05, 100.0)) == pytest.approx(
        20 * math.log10(2), abs=1e-12
    )


@pytest.mark.parametrize("d", [0.0, -1.0])
def test_fspl_domain(d):
    with pytest.raises(DomainError):
        fspl_gain(0.05, d)


# ---- UMi --------------------------------------------------------------------


def test_umi_los_3ghz_100m():
    assert umi_pathloss_db(3e9, 100.0, los=True) == pytest.approx(83.94, abs=0.01)


def test_umi_nlos_3ghz_100m():
    # 22.4 + 35.3*2 + 21.3*log10(3) = 103.163
    expected = 22.4 + 70.6 + 21.3 * math.log10(3)
    assert umi_pathloss_db(3e9, 100.0, los=False) == pytest.approx(expected, abs=1e-9)
    assert umi_pathloss_db(3e9, 100.0, los=False) == pytest.approx(103.16, abs=0.01)


def test_umi_gain_is_inverse_loss():
    assert umi_path_gain(6e9, 50.0, los=True) == pytest.approx(10 ** (-umi_pathloss_db(6e9, 50.0, True) / 10))


@settings(max_examples=200, deadline=None)
@given(st.floats(0.5e9, 100e9), st.floats(10, 5000))
def test_umi_nlos_never_below_los(f, d):
    assert umi_pathloss_db(f, d, los=False) >= umi_pathloss_db(f, d, los=True)


@pytest.mark.parametrize("f,d", [(6e9, 9.9), (0.4e9, 100), (120e9, 100)])
def test_umi_domain(f, d):
    with pytest.raises(DomainError):
        umi_pathloss_db(f, d, los=True)


# ---- two-ray ----------------------------------------------------------------


@settings(max_examples=200, deadline=None)
@given(st.floats(0.003, 0.6), st.floats(1, 1e5), st.floats(0.5, 50), st.floats(0.5, 50))
def test_two_ray_no_reflection_is_fspl(lam, d, ht, hr):
    d_los = math.hypot(d, ht - hr)
    assert two_ray_gain(lam, d, ht, hr, 0.0) == pytest.approx(fspl_gain(lam, d_los), rel=1e-12)


def test_two_ray_far_field_asymptote():
    lam, ht, hr = 0.1, 10.0, 2.0
    d = 1e5
    assert to_db(two_ray_gain(lam, d, ht, hr, -1.0)) == pytest.approx(
        to_db((ht * hr / d**2) ** 2), abs=0.5
    )


def test_two_ray_slope_40db_per_decade():
    lam, ht, hr = 0.1, 10.0, 2.0
    g = [to_db(two_ray_gain(lam, d, ht, hr, -1.0)) for d in (1e4, 1e5, 1e6)]
    assert g[0] - g[1] == pytest.approx(40.0, abs=0.5)
    assert g[1] - g[2] == pytest.approx(40.0, abs=0.5)


def test_two_ray_constructive_peak():
    lam, ht, hr = 0.1, 10.0, 2.0
    # path difference equals lambda/2 where the reflection (gamma=-1) adds in phase
    d = np.linspace(50, 5000, 200001)
    diff = np.hypot(d, ht + hr) - np.hypot(d, ht - hr)
    d_star = d[np.argmin(np.abs(diff - lam / 2))]
    d_los = math.hypot(d_star, ht - hr)
    assert two_ray_gain(lam, d_star, ht, hr, -1.0) >= fspl_gain(lam, d_los)
    # nearly doubled field -> close to +6 dB over free space
    assert to_db(two_ray_gain(lam, d_star, ht, hr, -1.0) / fspl_gain(lam, d_los)) > 5.5


# ---- knife edge -------------------------------------------------------------


def test_knife_grazing():
    assert knife_edge_loss_from_v(0.0) == pytest.approx(6.03, abs=0.02)


def test_knife_deep_shadow_value():
    assert knife_edge_loss_from_v(2.74) == pytest.approx(21.6, abs=0.1)


def test_knife_clear_region_clamped():
    assert knife_edge_loss_from_v(-0.78) == 0.0
    assert knife_edge_loss_from_v(-3.0) == 0.0
    assert knife_edge_loss_db(0.05, 500, 500, -50.0) == 0.0


def test_knife_continuity_at_clamp():
    assert abs(knife_edge_loss_from_v(-0.78 + 1e-9) - knife_edge_loss_from_v(-0.78)) < 0.01


def test_knife_monotone():
    v = np.linspace(-0.78, 10, 20001)
    assert np.all(np.diff(knife_edge_loss_from_v(v)) >= 0)


def test_fresnel_parameter_geometry():
    # v = h * sqrt(2 (d1 + d2) / (lam d1 d2))
    assert fresnel_parameter(0.05, 100, 300, 2.0) == pytest.approx(2.0 * math.sqrt(800 / (0.05 * 30000)))
    assert knife_edge_loss_db(0.05, 100, 300, 0.0) == pytest.approx(knife_edge_loss_from_v(0.0))


# ---- RIS --------------------------------------------------------------------


def _params_with_area(lam, area, n=1, alpha=1.0):
    return LinkModelParams(frequency_hz=3e8 / lam, ris_elements=n, element_size_m=math.sqrt(area / n), ris_amplitude=alpha)


def test_ris_area_identity_single():
    lam, rt, rr, rd = 0.05, 20.0, 40.0, math.hypot(20, 40)
    p = _params_with_area(lam, lam * rt * rr / rd)
    assert ris_path_gain(p, PathGeometry(rd, rt, rr)) == pytest.approx(fspl_gain(lam, rd), rel=1e-12)


def test_ris_6ghz_n121_insufficient():
    p = LinkModelParams(6e9, ris_elements=121)
    assert p.ris_area_m2 == pytest.approx(0.075625, rel=1e-12)
    geom = PathGeometry(math.hypot(20, 40), 20.0, 40.0)
    pl = -to_db(ris_path_gain(p, geom))
    assert pl == pytest.approx(20 * math.log10(4 * math.pi * 800 / 0.075625), abs=1e-9)
    assert pl == pytest.approx(102.5, abs=0.1)
    blocked = -to_db(fspl_gain(0.05, geom.rho_d)) + 20.0
    assert blocked == pytest.approx(101.0, abs=0.05)
    assert pl > blocked


def test_ris_6ghz_n484_sufficient():
    geom = PathGeometry(math.hypot(20, 40), 20.0, 40.0)
    pl = -to_db(ris_path_gain(LinkModelParams(6e9, ris_elements=484), geom))
    assert pl == pytest.approx(90.4, abs=0.1)
    assert pl < -to_db(fspl_gain(0.05, geom.rho_d)) + 20.0


def test_ris_angle_domain():
    p = LinkModelParams()
    g = PathGeometry(10, 10, 10)
    with pytest.raises(DomainError):
        ris_path_gain(p, g, 90.0, 0.0)
    with pytest.raises(DomainError):
        ris_path_gain(p, g, 0.0, -95.0)


@settings(max_examples=200, deadline=None)
@given(
    st.integers(1, 5000),
    st.floats(1, 500),
    st.floats(1, 500),
    st.floats(-89, 89),
    st.floats(-89, 89),
)
def test_ris_reciprocity(n, rt, rr, ti, tr):
    p = LinkModelParams(28e9, ris_elements=n)
    a = ris_path_gain(p, PathGeometry(10, rt, rr), ti, tr)
    b = ris_path_gain(p, PathGeometry(10, rr, rt), tr, ti)
    assert a == pytest.approx(b, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5000), st.floats(1, 500), st.floats(1, 500), st.floats(1.001, 3))
def test_ris_monotone(n, rt, rr, k):
    p = LinkModelParams(6e9, ris_elements=n)
    g = ris_path_gain(p, PathGeometry(10, rt, rr))
    assert ris_path_gain(p, PathGeometry(10, rt * k, rr)) < g
    assert ris_path_gain(p, PathGeometry(10, rt, rr * k)) < g
    assert ris_path_gain(LinkModelParams(6e9, ris_elements=n + 1), PathGeometry(10, rt, rr)) > g


def test_distance_monotonicity_all_models():
    d = np.linspace(10, 1000, 500)
    assert np.all(np.diff(fspl_gain(0.05, d)) < 0)
    assert np.all(np.diff(umi_path_gain(6e9, d, True)) < 0)
    assert np.all(np.diff(umi_path_gain(6e9, d, False)) < 0)


# ---- link budget ------------------------------------------------------------


def test_chain_zero_tx_equals_gain():
    p, g = LinkModelParams(6e9, ris_elements=484), PathGeometry(44.72, 20, 40)
    assert link_budget_chain(0.0, 0.0, g, p) == pytest.approx(to_db(ris_path_gain(p, g)), abs=1e-12)


def test_chain_angle_loss_60deg():
    p, g = LinkModelParams(6e9, ris_elements=484), PathGeometry(44.72, 20, 40)
    drop = link_budget_chain(10, 0, g, p) - link_budget_chain(10, 0, g, p, 60, 60)
    assert drop == pytest.approx(-20 * math.log10(math.cos(math.radians(60)) ** 2), abs=1e-9)
    assert drop == pytest.approx(12.04, abs=0.01)


def test_chain_linear_in_tx_gain():
    p, g = LinkModelParams(28e9, ris_elements=2500), PathGeometry(44.72, 20, 40)
    assert link_budget_chain(5, 3, g, p, 10, 20) - link_budget_chain(5, 0, g, p, 10, 20) == pytest.approx(3.0, abs=1e-12)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import special_ortho_group

from tamevol import catalog
from tamevol.cells import DefinableSet, rotated
from tamevol.errors import InsufficientData, TangentEscapesNeighborhood, ZeroVolume
from tamevol.grassmann import Plane, tau_max
from tamevol.growth import (
    GrowthCurve,
    check_growth_bound,
    default_radii,
    fit_exponent,
    gauss_cover_decompose,
    growth_curve,
    stoll_classify,
    verify_projection_bound,
)
from tamevol.hausdorff import QuadratureConfig

RADII = default_radii(1, 100, 16)


def curve(d, radii, volumes):
    return GrowthCurve("synthetic", d, radii, volumes, np.zeros(len(radii)))


def test_line_curve_is_exact():
    g = growth_curve(catalog.load("line"), RADII)
    assert np.allclose(g.volumes, 2 * RADII, rtol=1e-3)
    alpha, half = fit_exponent(g)
    assert alpha == pytest.approx(1.0, abs=0.02)


def test_plane_curve():
    g = growth_curve(catalog.load("plane(2,3)"), RADII)
    assert np.allclose(g.volumes, math.pi * RADII**2, rtol=1e-2)
    v = check_growth_bound(g)
    assert v.bounded and v.C_hat == pytest.approx(math.pi, rel=1e-2)


def test_circle_plateaus():
    g = growth_curve(catalog.load("circle"), RADII[RADII > 1.01])
    assert np.all(np.abs(g.volumes - 2 * math.pi) <= g.errors + 1e-9)
    assert check_growth_bound(g).bounded


def test_parabola_exponent():
    g = growth_curve(catalog.load("parabola"), default_radii(10, 1000, 12))
    alpha, _ = fit_exponent(g)
    assert alpha == pytest.approx(1.0, abs=0.1)


def test_spiral_exponent_and_verdict():
    g = growth_curve(catalog.load("archimedean-spiral"), RADII)
    alpha, _ = fit_exponent(g)
    assert alpha == pytest.approx(2.0, abs=0.1)
    v = check_growth_bound(g)
    assert not v.bounded and v.classification == "violates-O(r^d)"


def test_points_are_bounded():
    g = growth_curve(catalog.load("points5"), RADII)
    assert g.volumes[-1] == 5
    assert check_growth_bound(g).bounded


def test_fit_errors():
    with pytest.raises(InsufficientData):
        fit_exponent(curve(1, [1, 2, 3], [1, 2, 3]))
    with pytest.raises(ZeroVolume):
        fit_exponent(curve(1, [1, 2, 3, 4, 5], [0, 0, 0, 0, 1]))
    with pytest.raises(ValueError):
        curve(1, [1, 1, 2, 3], [1, 1, 2, 3])
    with pytest.raises(ValueError):
        curve(1, [1, 2, 3, 4], [1, -1, 2, 3])


@settings(max_examples=50)
@given(st.floats(0.5, 3.5), st.floats(0.1, 10), st.integers(1, 3))
def test_fit_recovers_power_laws(alpha, c, d):
    r = default_radii(1, 100, 10)
    g = curve(d, r, c * r**alpha)
    a, half = fit_exponent(g)
    assert a == pytest.approx(alpha, abs=1e-9)
    v = check_growth_bound(g)
    assert v.bounded == (alpha - d <= 0.05 + 1e-9)
    assert v.C_hat >= 0


def test_csv_round_trip():
    g = growth_curve(catalog.load("paraboloid"), default_radii(1, 10, 5))
    h = GrowthCurve.from_csv(g.to_csv(), 2, "paraboloid")
    assert np.array_equal(g.volumes, h.volumes) and np.array_equal(g.errors, h.errors)
    assert g.to_csv().splitlines()[0] == "r,volume,error_bound,ratio_to_r_d"
    assert g.monotone()


def test_definable_growth_is_bounded():
    for name in ("segment", "sphere2", "paraboloid", "complex-line"):
        g = growth_curve(catalog.load(name), RADII)
        assert check_growth_bound(g).bounded, name
        assert g.monotone(), name


@settings(max_examples=5)
@given(st.integers(0, 2**32 - 1))
def test_rotation_leaves_alpha_within_confidence(seed):
    S = catalog.load("paraboloid")
    Q = special_ortho_group.rvs(3, random_state=seed)
    R = DefinableSet("rot", 3, [rotated(c, Q) for c in S.cells])
    radii = default_radii(1, 100, 8)
    a, ha = fit_exponent(growth_curve(S, radii))
    b, hb = fit_exponent(growth_curve(R, radii))
    assert abs(a - b) <= ha + hb + 1e-9


def test_stoll_examples():
    line = stoll_classify(catalog.load("complex-line"), 1)
    assert line.verdict == "algebraic-consistent"
    assert line.growth.C_hat == pytest.approx(math.pi, rel=0.02)
    par = stoll_classify(catalog.load("complex-parabola"), 1)
    assert par.verdict == "algebraic-consistent"
    assert par.growth.C_hat == pytest.approx(2 * math.pi, rel=0.02)
    exp = stoll_classify(catalog.load("complex-exp"), 1, default_radii(5, 50, 12))
    assert exp.verdict == "transcendental" and exp.growth.alpha == pytest.approx(3, abs=0.25)
    with pytest.raises(ValueError):
        stoll_classify(catalog.load("complex-line"), 2)


@pytest.mark.parametrize("r", [5.0, 10.0, 20.0, 50.0])
def test_complex_parabola_matches_closed_form(r):
    from tamevol.hausdorff import set_volume_in_ball

    s = (-1 + math.sqrt(1 + 4 * r * r)) / 2
    exact = math.pi * (2 * r * r - s)
    est = set_volume_in_ball(catalog.load("complex-parabola"), 4 // 2, r)
    assert est.value == pytest.approx(exact, rel=5e-3)


@pytest.mark.parametrize("r", [5.0, 20.0])
def test_complex_exp_matches_one_dimensional_oracle(r):
    from scipy.integrate import quad
    from scipy.optimize import brentq

    from tamevol.hausdorff import set_volume_in_ball

    # Points (x, y, e^x cos y, e^x sin y) with |.|^2 = x^2 + y^2 + e^{2x} < r^2
    # and area element 1 + e^{2x}; integrate over y in closed form.
    g = lambda x: r * r - x * x - math.exp(2 * x)  # noqa: E731
    lo = brentq(g, -r, 0.0)
    hi = brentq(g, -1.0, math.log(r))
    exact = quad(lambda x: (1 + math.exp(2 * x)) * 2 * math.sqrt(max(g(x), 0.0)), lo, hi, limit=200)[0]
    est = set_volume_in_ball(catalog.load("complex-exp"), 2, r)
    assert est.value == pytest.approx(exact, rel=1e-2)


def test_lemma_examples():
    flat = verify_projection_bound(catalog.load("flat-square").cells[0])
    assert flat.ok and all(row.ratio == pytest.approx(1.0, abs=1e-12) for row in flat.rows)
    steep = verify_projection_bound(catalog.load("steep-line").cells[0])
    assert steep.ok and steep.max_slope == pytest.approx(math.sqrt(3))
    assert all(row.ratio == pytest.approx(2.0, rel=1e-2) for row in steep.rows)
    cap = verify_projection_bound(catalog.load("polar-cap").cells[0])
    assert cap.ok and max(row.ratio for row in cap.rows) <= 2.0


def test_polar_cap_ratio_closed_form():
    # cap of the unit sphere over the disk of radius 1/sqrt(2): area 2 pi (1 - 1/sqrt 2), disk pi/2
    rep = verify_projection_bound(catalog.load("polar-cap").cells[0], radii=[5.0])
    expected = 2 * math.pi * (1 - 1 / math.sqrt(2)) / (math.pi / 2)
    assert rep.rows[0].ratio == pytest.approx(expected, rel=1e-3)


def test_lemma_rejects_escaping_tangents():
    with pytest.raises(TangentEscapesNeighborhood):
        verify_projection_bound(catalog.load("steep-line").cells[0], tau=1.0)
    with pytest.raises(TangentEscapesNeighborhood):
        verify_projection_bound(catalog.load("circle").cells[0])


def test_lemma_against_tilted_reference_plane():
    L = Plane([[1.0], [math.sqrt(3)]])
    rep = verify_projection_bound(catalog.load("steep-line").cells[0], L=L, tau=0.1)
    assert all(row.ratio == pytest.approx(1.0, abs=1e-9) for row in rep.rows)


def test_gauss_cover_linear_cell_has_one_piece():
    dec = gauss_cover_decompose(catalog.load("steep-line").cells[0])
    assert len(dec.pieces) == 1
    assert dec.pieces[0].volume.value == pytest.approx(2.0, rel=1e-3)


def test_gauss_cover_circle_arc():
    arc = catalog.load("circle").cells[0]
    dec = gauss_cover_decompose(arc, math.sqrt(3), r=2.0, radii=default_radii(1.5, 20, 6))
    assert len(dec.pieces) >= 2 and dec.assigned_fraction == 1.0
    assert sum(p.volume.value for p in dec.pieces) == pytest.approx(math.pi, rel=1e-6)
    assert all(p.verdict is None or p.verdict.bounded for p in dec.pieces)


def test_gauss_cover_sphere_sums_to_total():
    S = catalog.load("sphere2")
    total, err = 0.0, 0.0
    for c in S.cells[:2]:
        dec = gauss_cover_decompose(c, tau_max(2), r=10.0)
        assert dec.assigned_fraction == 1.0
        assert math.fsum(p.volume.value for p in dec.pieces) == pytest.approx(dec.total.value, rel=1e-12)
        total += dec.total.value
        err = math.hypot(err, dec.total.error_bound)
    assert abs(total - 4 * math.pi) <= 3 * err


def test_growth_threads_identical():
    S = catalog.load("complex-parabola")
    a = growth_curve(S, RADII, QuadratureConfig(workers=1)).to_csv()
    b = growth_curve(S, RADII, QuadratureConfig(workers=8)).to_csv()
    assert a == b

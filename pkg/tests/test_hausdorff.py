import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import special_ortho_group

from tamevol import catalog
from tamevol.cells import POINT0, Band, DefinableSet, Graph, point_cell, rotated, scaled
from tamevol.errors import BudgetExceeded, DegenerateCell, NonFiniteIntegrand
from tamevol.expr import parse_expr
from tamevol.hausdorff import (
    BallRestriction,
    MeasureEstimate,
    QuadratureConfig,
    cell_volume_in_ball,
    covering_measure,
    lanczos_gamma,
    set_volume_in_ball,
    vol_normalization,
)


def interval(lo, hi):
    return Band(POINT0, parse_expr(str(lo), []), parse_expr(str(hi), []))


def unit_square():
    return Band(interval(0, 1), parse_expr("0", ["x1"]), parse_expr("1", ["x1"]))


@pytest.mark.parametrize("d,expected", [(0, 1.0), (1, 2.0), (2, math.pi), (3, 4 * math.pi / 3), (4, math.pi**2 / 2)])
def test_vol_normalization(d, expected):
    assert abs(vol_normalization(d) - expected) <= 1e-12 * expected


@settings(max_examples=200)
@given(st.floats(0.05, 60))
def test_lanczos_gamma_matches_stdlib(x):
    assert lanczos_gamma(x) == pytest.approx(math.gamma(x), rel=1e-12)


def test_domain_types():
    with pytest.raises(ValueError):
        BallRestriction(0.0)
    with pytest.raises(ValueError):
        MeasureEstimate(-1.0, 0.0, "quadrature", 1)
    with pytest.raises(ValueError):
        QuadratureConfig(mode="simpson")


def test_cell_volume_examples():
    flat = Graph(unit_square(), (parse_expr("0", ["x1", "x2"]),))
    est = cell_volume_in_ball(flat, 10)
    assert est.value == pytest.approx(1.0, rel=1e-3)
    diag = Graph(interval(0, 1), (parse_expr("x1", ["x1"]),))
    assert cell_volume_in_ball(diag, 10).value == pytest.approx(math.sqrt(2), rel=1e-2)
    sphere = set_volume_in_ball(catalog.load("sphere2"), 2, 10)
    assert sphere.value == pytest.approx(4 * math.pi, rel=1e-2)
    assert abs(sphere.value - 4 * math.pi) <= sphere.error_bound + 1e-3


def test_set_volume_examples():
    circle = set_volume_in_ball(catalog.load("circle"), 1, 2)
    assert circle.value == pytest.approx(2 * math.pi, rel=1e-2)
    pts = catalog.load("points5")
    for r, count in [(0.5, 1), (1.2, 3), (2.5, 4), (10, 5)]:
        assert set_volume_in_ball(pts, 0, r).value == count
    for r in (1.0, 7.0, 50.0):
        assert set_volume_in_ball(catalog.load("plane(2,3)"), 2, r).value == pytest.approx(math.pi * r * r, rel=1e-2)


def test_higher_dimensional_volume_of_lower_dimensional_set_is_zero():
    assert set_volume_in_ball(catalog.load("circle"), 2, 5).value == 0.0
    with pytest.raises(ValueError):
        set_volume_in_ball(catalog.load("sphere2"), 1, 5)


def test_covering_examples():
    seg = covering_measure(catalog.load("segment"), 1, 0.01, 2)
    assert seg.value == pytest.approx(1.0, rel=0.05)
    assert covering_measure(catalog.load("points5"), 0, 0.05, 10).value == 5
    circ = covering_measure(catalog.load("circle"), 1, 0.02, 2)
    assert circ.value == pytest.approx(2 * math.pi, rel=0.05)


def test_covering_refines():
    S = catalog.load("circle")
    errs = [abs(covering_measure(S, 1, eps, 2).value - 2 * math.pi) for eps in (0.4, 0.1, 0.025)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-3


def test_covering_surface_is_upper_biased():
    S = DefinableSet("sq", 3, [Graph(unit_square(), (parse_expr("0", ["x1", "x2"]),))])
    est = covering_measure(S, 2, 0.05, 5)
    assert 1.0 < est.value < 2.0


def test_covering_budget():
    with pytest.raises(BudgetExceeded):
        covering_measure(catalog.load("circle"), 1, 1e-3, 2, max_cubes=100)


@pytest.mark.parametrize("name", ["segment", "circle", "parabola"])
def test_covering_agrees_with_quadrature(name):
    r = 2.0
    S = catalog.load(name)
    q = set_volume_in_ball(S, 1, r).value
    assert covering_measure(S, 1, 1e-2 * r, r).value == pytest.approx(q, rel=0.10)


def test_undefined_chart_is_degenerate():
    with pytest.raises(DegenerateCell):
        cell_volume_in_ball(Graph(interval(-1, 1), (parse_expr("log(x1)", ["x1"]),)), 10)


def test_nonfinite_integrand():
    c = Graph(interval(0, 1), (parse_expr("log(0.97 - x1)", ["x1"]),))
    with pytest.raises(NonFiniteIntegrand):
        cell_volume_in_ball(c, 10)


def test_grid_mode_agrees():
    cfg = QuadratureConfig(mode="grid")
    assert set_volume_in_ball(catalog.load("circle"), 1, 2, cfg).value == pytest.approx(2 * math.pi, rel=1e-3)
    assert set_volume_in_ball(catalog.load("sphere2"), 2, 2, cfg).value == pytest.approx(4 * math.pi, rel=1e-2)
    assert set_volume_in_ball(catalog.load("paraboloid"), 2, 3, cfg).value == pytest.approx(
        set_volume_in_ball(catalog.load("paraboloid"), 2, 3).value, rel=1e-2
    )


def test_seed_determinism_and_threads():
    S = catalog.load("sphere2")
    a = set_volume_in_ball(S, 2, 1.5, QuadratureConfig(seed=3, workers=1))
    b = set_volume_in_ball(S, 2, 1.5, QuadratureConfig(seed=3, workers=4))
    assert (a.value, a.error_bound) == (b.value, b.error_bound)
    c = set_volume_in_ball(S, 2, 1.5, QuadratureConfig(seed=4))
    assert c.value != a.value


# Scaling: a cell scaled by lam has lam^d times the volume once both fit in the ball.

SCALE_CASES = [("circle", 0), ("sphere2", 0), ("tilted-patch", 0), ("segment", 0)]


@pytest.mark.parametrize("lam", [0.5, 2.0, 3.0])
@pytest.mark.parametrize("name,idx", SCALE_CASES)
def test_scaling_covariance(name, idx, lam):
    c = catalog.load(name).cells[idx]
    v = cell_volume_in_ball(c, 10.0)
    w = cell_volume_in_ball(scaled(c, lam), 10.0)
    assert abs(w.value - lam**c.dim * v.value) <= 2 * (w.error_bound + lam**c.dim * v.error_bound) + 1e-12


@pytest.mark.parametrize("lam", [0.5, 2.0, 3.0])
def test_scaling_with_ball(lam):
    c = catalog.load("paraboloid").cells[0]
    v = cell_volume_in_ball(c, 2.0)
    w = cell_volume_in_ball(scaled(c, lam), 2.0 * lam)
    assert abs(w.value - lam**2 * v.value) <= 2 * (w.error_bound + lam**2 * v.error_bound)


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["paraboloid", "sphere2", "complex-parabola", "parabola"]))
def test_rotation_invariance(seed, name):
    S = catalog.load(name)
    Q = special_ortho_group.rvs(S.ambient, random_state=seed)
    R = DefinableSet(name + "-rot", S.ambient, [rotated(c, Q) for c in S.cells])
    for r in (0.9, 3.0):
        a = set_volume_in_ball(S, None, r)
        b = set_volume_in_ball(R, None, r)
        assert abs(a.value - b.value) <= 2 * (a.error_bound + b.error_bound) + 1e-9 * a.value


@settings(max_examples=25)
@given(st.floats(0.2, 20), st.floats(0.2, 20), st.sampled_from(["parabola", "paraboloid", "complex-exp"]))
def test_monotone_in_radius(r1, r2, name):
    r1, r2 = sorted((r1, r2))
    S = catalog.load(name)
    a = set_volume_in_ball(S, None, r1)
    b = set_volume_in_ball(S, None, r2)
    assert a.value <= b.value + 2 * (a.error_bound + b.error_bound)
    assert a.value >= 0 and a.error_bound >= 0

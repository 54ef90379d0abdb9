import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freeinterp.errors import InvalidPoint, NonFinite
from freeinterp.geometry import (
    CircleArc,
    DiskPoint,
    StolzAngle,
    arc_overlap,
    arcs_disjoint,
    family_index,
    log_blaschke_at,
    log_delta,
    log_delta_matrix,
    mobius,
    pseudo_hyperbolic,
    pseudo_hyperbolic_polar,
    shadow_arc,
    square_of_point,
    stolz_contains,
    stolz_mask,
    stolz_shadow_half_width,
    tangent_arc,
)
from freeinterp.sequences import Sequence

radius = st.floats(0.0, 0.999)
angle = st.floats(0.0, 2 * math.pi, exclude_max=True)
disk = st.builds(lambda r, t: r * cmath.exp(1j * t), radius, angle)


def test_mobius_zero_at_own_point():
    assert mobius(0.3 + 0.4j, 0.3 + 0.4j) == 0


def test_mobius_at_origin_is_modulus():
    assert mobius(0.5, 0) == pytest.approx(0.5)


def test_mobius_oracle_value():
    # mpmath, 40 digits
    assert abs(mobius(0.3, 0.6j)) == pytest.approx(0.6602102444180643, rel=1e-15)


def test_mobius_zero_center_is_identity():
    assert mobius(0, 0.2 - 0.1j) == 0.2 - 0.1j


def test_pseudo_hyperbolic_basics():
    assert pseudo_hyperbolic(0.4j, 0.4j) == 0
    assert pseudo_hyperbolic(0, 0.5) == pytest.approx(0.5)


@given(disk, disk)
def test_pseudo_hyperbolic_symmetric_and_bounded(z, w):
    a, b = pseudo_hyperbolic(z, w), pseudo_hyperbolic(w, z)
    assert a == pytest.approx(b, abs=1e-15)
    assert 0 <= a < 1


@given(disk, disk)
def test_metric_identity(lam, mu):
    lhs = 1 - abs(mobius(lam, mu)) ** 2
    rhs = (1 - abs(lam) ** 2) * (1 - abs(mu) ** 2) / abs(1 - lam.conjugate() * mu) ** 2
    assert abs(lhs - rhs) <= 1e-12


@given(disk, disk)
def test_polar_metric_matches_complex(z, w):
    assert pseudo_hyperbolic(z, w) == pytest.approx(abs(mobius(z, w)), abs=1e-12)


def test_near_boundary_precision():
    # complex arithmetic cannot even separate these points
    rho = pseudo_hyperbolic_polar(1e-12, 0.3, 2e-12, 0.3)
    assert rho == pytest.approx(0.33333333333355556, rel=1e-12)


def test_log_blaschke_singleton_is_zero():
    assert log_blaschke_at(Sequence.from_points([0.5]), 0) == 0.0


def test_log_blaschke_three_points():
    seq = Sequence.from_points([0, 0.5, -0.5])
    assert log_blaschke_at(seq, 0) == pytest.approx(math.log(0.25), rel=1e-14)


def test_log_delta_oracle():
    seq = Sequence.from_points([0.9, 0.95 * cmath.exp(0.1j), 0.5j, -0.3 + 0.2j])
    expected = [-0.6084586875395754, -0.5523238476024925, -0.8622317268275757, -0.8451242697079770]
    assert np.allclose(log_delta(seq), expected, rtol=1e-13, atol=0)


def test_log_blaschke_equals_direct_product(rng):
    z = 0.99 * np.sqrt(rng.uniform(size=40)) * np.exp(2j * np.pi * rng.uniform(size=40))
    seq = Sequence.from_points(z)
    for i in range(len(z)):
        direct = np.prod(np.abs(mobius(np.delete(seq.z, i), seq.z[i])))
        assert math.exp(log_blaschke_at(seq, i)) == pytest.approx(direct, abs=1e-10)


def test_log_delta_far_below_underflow():
    # 1000 close points: the direct product underflows, the log sum does not
    seq = Sequence(np.full(1000, 1e-3), np.linspace(0, 1e-3, 1000, endpoint=False))
    ld = log_delta(seq)
    assert np.all(np.isfinite(ld))
    assert ld.min() < -745


def test_log_delta_duplicate_raises():
    with pytest.raises(NonFinite):
        log_delta_matrix(np.array([0.5, 0.5]), np.array([0.0, 0.0]))


def test_disk_point_validation():
    with pytest.raises(InvalidPoint):
        DiskPoint.from_complex(1.0)
    with pytest.raises(InvalidPoint):
        DiskPoint(0.0, 0.0)
    p = DiskPoint.polar(0.9, math.pi / 3)
    assert p.z == pytest.approx(0.9 * cmath.exp(1j * math.pi / 3))


def test_shadow_arc_examples():
    a = shadow_arc(0.9)
    assert a.half_width == pytest.approx(0.1 * math.pi)
    assert a.sigma == pytest.approx(0.1)
    assert shadow_arc(0).is_full and shadow_arc(0).sigma == 1
    b = shadow_arc(0.99 * cmath.exp(1j * math.pi / 4))
    assert b.center == pytest.approx(math.pi / 4)
    assert b.half_width == pytest.approx(0.01 * math.pi)


def test_tangent_arc_examples():
    assert tangent_arc(0.99).half_width == pytest.approx(0.1 * math.pi)
    assert tangent_arc(0).is_full


@given(disk)
def test_tangent_arc_contains_shadow_arc(z):
    assert tangent_arc(z).half_width >= shadow_arc(z).half_width
    assert shadow_arc(z).sigma == pytest.approx(min(1.0, 1 - abs(z)), abs=1e-15)


def test_arc_overlap_cases():
    assert arc_overlap(0.0, math.pi, 1.0, math.pi) == pytest.approx(1.0)
    assert arc_overlap(0.0, 0.1, 1.0, 0.1) == 0.0
    assert arc_overlap(0.0, 0.5, 0.0, 0.2) == pytest.approx(0.4 / (2 * math.pi))
    # overlap across the branch cut
    assert arc_overlap(0.05, 0.1, 2 * math.pi - 0.05, 0.1) == pytest.approx(0.1 / (2 * math.pi))


@given(angle, st.floats(0.01, math.pi), angle, st.floats(0.01, math.pi))
def test_arc_overlap_matches_sampling(c1, h1, c2, h2):
    s = np.linspace(0, 2 * math.pi, 20001)[:-1]
    in1 = CircleArc(c1, h1).contains(s)
    in2 = CircleArc(c2, h2).contains(s)
    assert arc_overlap(c1, h1, c2, h2) == pytest.approx(np.mean(in1 & in2), abs=5e-4)


def test_arcs_disjoint():
    assert arcs_disjoint([0.0, 1.0], [0.4, 0.4])
    assert not arcs_disjoint([0.0, 0.7], [0.4, 0.4])
    assert not arcs_disjoint([0.1, 2 * math.pi - 0.1], [0.15, 0.15])


def test_stolz_examples():
    assert stolz_contains(StolzAngle(1.234, 2.0), 0j)
    for r in (0.0, 0.5, 0.99, 0.999999):
        assert stolz_contains(StolzAngle(0.7, 1.01), r * cmath.exp(0.7j))
    z = 0.99 * cmath.exp(1j * math.pi / 8)
    assert stolz_contains(StolzAngle(0.0, 2.0), z) == (abs(z - 1) <= 2 * (1 - abs(z) ** 2))
    assert not stolz_contains(StolzAngle(0.0, 2.0), z)
    with pytest.raises(ValueError):
        StolzAngle(0.0, 1.0)


@given(st.floats(1e-6, 0.9), st.floats(1.05, 6.0))
def test_stolz_shadow_width_matches_mask(g, alpha):
    beta = float(stolz_shadow_half_width(np.array([g]), alpha)[0])
    grid = np.array([beta * 0.999, min(beta * 1.001, math.pi)]) if beta < math.pi else np.array([math.pi])
    mask = stolz_mask(grid, np.array([g]), np.array([0.0]), alpha)[:, 0]
    assert mask[0]
    if beta < math.pi * 0.999:
        assert not mask[1]


def test_stolz_monotone_in_aperture(rng):
    grid = np.linspace(0, 2 * math.pi, 256, endpoint=False)
    g = rng.uniform(1e-3, 0.5, 30)
    t = rng.uniform(0, 2 * math.pi, 30)
    small = stolz_mask(grid, g, t, 1.5)
    big = stolz_mask(grid, g, t, 3.0)
    assert np.all(big >= small)


def test_dyadic_squares():
    q0 = square_of_point(0)
    assert (q0.n, q0.k) == (0, 0) and family_index(q0) == 1
    q = square_of_point(0.6 * cmath.exp(1j * math.pi))
    assert (q.n, q.k) == (1, 1) and family_index(q) == 4


@given(disk)
def test_point_lies_in_its_square(z):
    assert square_of_point(z).contains(z)

import math

import numpy as np
import pytest
from hypothesis import given

from lorentz_lib.errors import DomainError, StructuralError
from physics.core_geometry import (
    ETA,
    FourVector,
    LorentzMatrix,
    apply,
    boost_matrix,
    compose,
    general_product,
    metric_defect,
    minkowski_inner,
    rapidity,
    rotation_matrix,
)
from physics.lie_algebra import Generator, expm

from .strategies import angles, axes, four_vectors, rapidities

IDENTITY = np.eye(4)


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ((1, 0, 0, 0), (1, 0, 0, 0), 1.0),
        ((1, 1, 0, 0), (1, 1, 0, 0), 0.0),
        ((2, 1, 1, 1), (3, 0, 2, 0), 4.0),
    ],
)
def test_minkowski_inner(a, b, expected):
    assert minkowski_inner(FourVector(*a), FourVector(*b)) == expected


def test_four_vector_rejects_non_finite_components():
    with pytest.raises(DomainError):
        FourVector(1.0, math.nan, 0.0, 0.0)
    with pytest.raises(DomainError):
        FourVector.from_array([math.inf, 0.0, 0.0, 0.0])


def test_mass_shell_completion():
    u = FourVector.from_spatial_velocity((3.0, 0.0, 0.0))
    assert u.c0 == pytest.approx(math.sqrt(10.0), rel=1e-15)
    assert u.gamma == u.c0
    assert u.three_velocity() == pytest.approx((3.0 / math.sqrt(10.0), 0.0, 0.0))
    assert abs(minkowski_inner(u, u) - 1.0) < 1e-14


def test_rotation_about_axis_one_layout():
    phi = 0.3
    m = rotation_matrix(1, phi).m
    expected = np.eye(4)
    expected[2, 2] = math.cos(phi)
    expected[2, 3] = -math.sin(phi)
    expected[3, 2] = math.sin(phi)
    expected[3, 3] = math.cos(phi)
    np.testing.assert_array_equal(m, expected)


def test_quarter_turn_about_axis_three_takes_x_to_y():
    rotated = apply(rotation_matrix(3, math.pi / 2), FourVector(0.0, 1.0, 0.0, 0.0))
    np.testing.assert_allclose(rotated.array, [0.0, 0.0, 1.0, 0.0], atol=1e-15)


@pytest.mark.parametrize("axis", [1, 2, 3])
def test_zero_angle_gives_identity(axis):
    np.testing.assert_array_equal(rotation_matrix(axis, 0.0).m, IDENTITY)
    np.testing.assert_array_equal(boost_matrix(axis, 0.0).m, IDENTITY)


def test_boost_by_log_two():
    m = boost_matrix(1, math.log(2.0)).m
    assert m[0, 0] == pytest.approx(1.25, abs=1e-15)
    assert m[1, 1] == pytest.approx(1.25, abs=1e-15)
    assert m[0, 1] == pytest.approx(0.75, abs=1e-15)
    assert m[1, 0] == pytest.approx(0.75, abs=1e-15)
    np.testing.assert_array_equal(m[2:, 2:], np.eye(2))


def test_rapidity_of_three_fifths_is_log_two():
    assert rapidity(0.6) == pytest.approx(math.log(2.0), rel=1e-15)
    with pytest.raises(DomainError):
        rapidity(1.0)


@pytest.mark.parametrize("bad_axis", [0, 4, -1])
def test_invalid_axis_rejected(bad_axis):
    with pytest.raises(DomainError):
        rotation_matrix(bad_axis, 0.1)
    with pytest.raises(DomainError):
        boost_matrix(bad_axis, 0.1)


def test_non_finite_angle_rejected():
    with pytest.raises(DomainError):
        rotation_matrix(1, math.nan)
    with pytest.raises(DomainError):
        boost_matrix(2, math.inf)


def test_compose_identity_and_inverse_elements():
    L = boost_matrix(2, 0.7)
    np.testing.assert_array_equal(compose(L, LorentzMatrix.identity()).m, L.m)
    np.testing.assert_allclose(
        compose(rotation_matrix(3, 1.1), rotation_matrix(3, -1.1)).m, IDENTITY, atol=1e-15
    )


@given(psi1=rapidities, psi2=rapidities)
def test_collinear_boosts_add_rapidities(psi1, psi2):
    composed = compose(boost_matrix(1, psi1), boost_matrix(1, psi2)).m
    expected = boost_matrix(1, psi1 + psi2).m
    assert np.max(np.abs(composed - expected)) <= 1e-12 * max(1.0, np.max(np.abs(expected)))


@given(axis=axes, phi=angles, boost_axis=axes, psi=rapidities)
def test_products_preserve_the_metric(axis, phi, boost_axis, psi):
    L = boost_matrix(boost_axis, psi) @ rotation_matrix(axis, phi)
    assert metric_defect(L.m) <= 1e-12 * max(1.0, np.max(np.abs(L.m))) ** 2
    np.testing.assert_allclose((L @ L.inverse()).m, IDENTITY, atol=1e-11)


def test_lorentz_matrix_is_read_only():
    L = boost_matrix(1, 0.2)
    with pytest.raises(ValueError):
        L.m[0, 0] = 2.0


@pytest.mark.parametrize(
    "diagonal",
    [
        (1.0, 1.0, 1.0, 2.0),  # stretches space
        (1.0, -1.0, 1.0, 1.0),  # parity, det = -1
        (-1.0, -1.0, 1.0, 1.0),  # time reversal
    ],
)
def test_from_array_rejects_non_proper_orthochronous(diagonal):
    with pytest.raises(StructuralError):
        LorentzMatrix.from_array(np.diag(diagonal))


def test_from_array_rejects_wrong_shape():
    with pytest.raises(StructuralError):
        LorentzMatrix.from_array(np.eye(3))


def test_general_product_with_zero_angles_is_identity():
    np.testing.assert_array_equal(general_product((0, 0, 0), (0, 0, 0)).m, IDENTITY)


def test_general_product_single_rotation():
    phi = 0.4
    np.testing.assert_array_equal(
        general_product((phi, 0.0, 0.0), (0.0, 0.0, 0.0)).m, rotation_matrix(1, phi).m
    )


def test_general_product_agrees_with_exponential_at_first_order():
    a = b = 1e-6
    product = general_product((0.0, 0.0, a), (b, 0.0, 0.0)).m
    exponential = expm(Generator((b, 0.0, 0.0), (0.0, 0.0, a)), 1.0).m
    assert np.max(np.abs(product - exponential)) <= 1e-11


def test_factor_order_matters_at_second_order():
    phi, psi = (0.0, 0.0, 0.1), (0.1, 0.0, 0.0)
    default = general_product(phi, psi).m
    reversed_order = general_product(phi, psi, order=(6, 5, 4, 3, 2, 1)).m
    difference = np.max(np.abs(default - reversed_order))
    assert 1e-4 < difference < 1e-1


def test_general_product_rejects_bad_order():
    with pytest.raises(DomainError):
        general_product((0, 0, 0), (0, 0, 0), order=(1, 1, 2, 3, 4, 5))


def test_apply_examples():
    u = FourVector(1.3, 0.2, -0.4, 0.5)
    assert apply(LorentzMatrix.identity(), u) == u

    psi = 0.8
    boosted = apply(boost_matrix(1, psi), FourVector(1.0, 0.0, 0.0, 0.0))
    np.testing.assert_allclose(boosted.array, [math.cosh(psi), math.sinh(psi), 0.0, 0.0])

    rest = FourVector(1.0, 0.0, 0.0, 0.0)
    assert apply(rotation_matrix(1, 0.9), rest) == rest


@given(axis=axes, psi=rapidities)
def test_apply_preserves_inner_product(axis, psi):
    u = FourVector.from_spatial_velocity((0.3, -0.2, 0.5))
    v = apply(boost_matrix(axis, psi), u)
    assert minkowski_inner(v, v) == pytest.approx(1.0, abs=1e-12 * v.c0**2)


def test_eta_is_read_only():
    with pytest.raises(ValueError):
        ETA[0, 0] = -1.0


@pytest.mark.parametrize("axis", [1, 2, 3])
def test_full_turn_gives_identity(axis):
    np.testing.assert_allclose(rotation_matrix(axis, 2.0 * math.pi).m, IDENTITY, rtol=0, atol=1e-12)


@given(axis=axes, a=angles, b=angles)
def test_rotations_about_one_axis_add_angles(axis, a, b):
    product = compose(rotation_matrix(axis, a), rotation_matrix(axis, b))
    np.testing.assert_allclose(product.m, rotation_matrix(axis, a + b).m, rtol=0, atol=1e-12)


@given(axis=axes, phi=angles, boost_axis=axes, psi=rapidities, u=four_vectors, v=four_vectors)
def test_apply_preserves_inner_product_of_arbitrary_vectors(axis, phi, boost_axis, psi, u, v):
    L = compose(boost_matrix(boost_axis, psi), rotation_matrix(axis, phi))
    a, b = FourVector.from_array(u), FourVector.from_array(v)
    scale = max(1.0, float(np.max(np.abs(L.m)))) ** 2 * max(1.0, float(np.max(np.abs(u))) * float(np.max(np.abs(v))))
    assert abs(minkowski_inner(apply(L, a), apply(L, b)) - minkowski_inner(a, b)) <= 1e-12 * scale

"""Unit tests for the truncated local ring arithmetic."""

import pytest
from hypothesis import given, strategies as st

from hecketree.errors import FieldMismatch, NonUnit
from hecketree.localring import (
    LocalField,
    frobenius_conjugate,
    newton_conjugate_omega,
    quadratic_eval,
    smallest_irreducible_quadratic,
    solve_trace_equation,
)

F2 = LocalField(2, 8)
F3 = LocalField(3, 8)
F5 = LocalField(5, 6)


def elements(field, units_only=False):
    def build(a, b):
        e = field.element(a, b)
        if units_only and not e.is_unit():
            return field.one() + e * field.from_int(field.p)
        return e

    return st.builds(build, st.integers(0, field.modulus - 1), st.integers(0, field.modulus - 1))


def test_defining_quadratics():
    assert smallest_irreducible_quadratic(2) == (1, 1)
    assert smallest_irreducible_quadratic(3) == (0, 1)
    assert smallest_irreducible_quadratic(5) == (0, 2)


def test_invalid_field_parameters():
    with pytest.raises(ValueError):
        LocalField(4, 3)
    with pytest.raises(ValueError):
        LocalField(3, 0)
    with pytest.raises(ValueError):
        LocalField(5, 3, quadratic=(0, 1))  # x^2 + 1 has a root mod 5


def test_identity_multiplication():
    z = F2.element(3, 5)
    assert F2.one() * z == z


def test_inverse_matches_brute_force_scan():
    # p=2, N=4: the inverse of 3 modulo 16 is 11
    f = LocalField(2, 4)
    x = f.from_int(3)
    inv = x.inverse()
    assert inv == f.from_int(11)
    scan = [y for y in range(16) if (3 * y) % 16 == 1]
    assert scan == [11]


@given(elements(F3), elements(F3), elements(F3))
def test_ring_axioms(x, y, z):
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    assert x + y == y + x
    assert x - x == F3.zero()


@given(elements(F2), elements(F2))
def test_conjugation_is_multiplicative(x, y):
    assert (x * y).conjugate() == x.conjugate() * y.conjugate()


@given(elements(F5))
def test_conjugation_is_involutive(x):
    assert x.conjugate().conjugate() == x


def test_conjugation_fixes_base_ring():
    x = F5.from_int(5)
    assert frobenius_conjugate(x) == x
    assert F3.from_int(7).conjugate() == F3.from_int(7)


def test_conjugate_omega_is_second_root():
    for f in (F2, F3, F5):
        wbar = f.omega().conjugate()
        assert quadratic_eval(f, wbar).is_zero()
        assert wbar != f.omega()


def test_newton_iteration_matches_closed_form():
    for f in (F2, F3, F5):
        assert newton_conjugate_omega(f) == f.omega().conjugate()


@given(elements(F2))
def test_norm_lands_in_base_ring(x):
    n = x * x.conjugate()
    assert n.b == 0
    assert n == x.norm()


@given(elements(F3, units_only=True))
def test_inverse_of_unit(x):
    assert x.inverse() * x == F3.one()


def test_inverse_of_non_unit_raises():
    with pytest.raises(NonUnit):
        F3.from_int(3).inverse()


def test_field_mismatch():
    with pytest.raises(FieldMismatch):
        F2.one() + F3.one()
    with pytest.raises(FieldMismatch):
        LocalField(2, 4).one() + LocalField(2, 5).one()


def test_valuation_basics():
    assert (F3.from_int(9) * F3.element(1, 1)).valuation() == 2
    assert F3.zero().valuation() == F3.precision  # means "at least N"
    assert F3.one().valuation() == 0


@given(elements(F2), elements(F2))
def test_valuation_is_additive(x, y):
    vx, vy = x.valuation(), y.valuation()
    if vx < F2.precision and vy < F2.precision and vx + vy < F2.precision:
        assert (x * y).valuation() == vx + vy


def test_solve_trace_equation_odd_p():
    target = -F3.one()
    gamma = solve_trace_equation(F3, target)
    # symmetric solution -1/2 lies in the base ring
    assert gamma == -F3.from_int(2).inverse()
    assert gamma.b == 0
    assert gamma.trace() == target
    assert gamma.is_unit()


def test_solve_trace_equation_p2():
    target = -F2.one()
    gamma = solve_trace_equation(F2, target)
    assert gamma + gamma.conjugate() == target
    assert gamma.is_unit()


@given(st.integers(1, 255))
def test_solve_trace_equation_random_units(n):
    if n % 2 == 0:
        n += 1
    target = F2.from_int(n)
    gamma = solve_trace_equation(F2, target)
    assert gamma.trace() == target
    assert gamma.is_unit()


def test_precision_monotonicity():
    hi = LocalField(2, 12)
    lo = LocalField(2, 8)
    x_hi = hi.element(173, 91)
    y_hi = hi.element(44, 201)
    r_hi = (x_hi * y_hi + x_hi.inverse() if x_hi.is_unit() else x_hi).reduce_to(lo)
    x_lo, y_lo = lo.element(173, 91), lo.element(44, 201)
    r_lo = x_lo * y_lo + x_lo.inverse()
    assert r_hi == r_lo

"""Total derivatives, horizontal forms, Euler operators, inversion."""

from fractions import Fraction

import pytest

from jetcalc import (
    DegreeError,
    HorizontalForm,
    MultiIndex,
    NotExact,
    Poly,
    Unsupported,
    d_h,
    euler,
    homotopy_s,
    invert_total_derivative,
    is_divergence,
    iterated_total_derivative,
    parse_expr,
    total_derivative,
)

import helpers


class TestTotalDerivative:
    def test_product_golden(self, ctx1):
        p = parse_expr("u1*u2", ctx1)
        assert total_derivative(p, 0) == parse_expr("u1*u2_x + u1_x*u2", ctx1)

    def test_direction_by_name(self, ctx2):
        p = parse_expr("u1", ctx2)
        assert total_derivative(p, "y") == total_derivative(p, 1)

    def test_base_dependence(self, ctx1):
        assert total_derivative(parse_expr("x", ctx1), 0) == 1
        p = parse_expr("x^2*u1", ctx1)
        assert total_derivative(p, 0) == parse_expr("2*x*u1 + x^2*u1_x", ctx1)

    def test_params_are_constants(self):
        from jetcalc import BundleSpec
        ctx = BundleSpec(("x",), ("u1",), params=("c",))
        assert total_derivative(parse_expr("c", ctx), 0).is_zero
        assert total_derivative(parse_expr("c*u1", ctx), 0) == parse_expr("c*u1_x", ctx)

    def test_leibniz_seeded(self, ctx2):
        rng = helpers.seeded(301)
        for i in range(100):
            p = helpers.random_poly(rng, ctx2)
            q = helpers.random_poly(rng, ctx2)
            d = i % 2
            lhs = total_derivative(p * q, d)
            assert lhs == p * total_derivative(q, d) + total_derivative(p, d) * q

    def test_directions_commute(self, ctx2):
        rng = helpers.seeded(302)
        for _ in range(50):
            p = helpers.random_poly(rng, ctx2)
            dxdy = total_derivative(total_derivative(p, 0), 1)
            dydx = total_derivative(total_derivative(p, 1), 0)
            assert dxdy == dydx

    def test_iterated(self, ctx2):
        p = parse_expr("u1^2", ctx2)
        assert iterated_total_derivative(p, MultiIndex((0, 1))) == \
            total_derivative(total_derivative(p, 0), 1)
        assert iterated_total_derivative(p, MultiIndex(())) == p

    def test_order_grows_by_one(self, ctx1):
        rng = helpers.seeded(303)
        for _ in range(50):
            p = helpers.random_poly(rng, ctx1)
            if p.max_order() == 0 and not any(g.is_jet for g in p.generators()):
                continue
            assert total_derivative(p, 0).max_order() <= p.max_order() + 1


class TestHorizontalForm:
    def test_scalar_density_zero(self, ctx2):
        p = parse_expr("u1", ctx2)
        s = HorizontalForm.scalar(p)
        assert s.degree == 0 and s.scalar_coefficient() == p
        d = HorizontalForm.density(p)
        assert d.degree == 2 and d.density_coefficient() == p
        assert HorizontalForm.zero(ctx2, 1).is_zero

    def test_missing_coefficient_is_zero(self, ctx2):
        form = HorizontalForm(ctx2, 1, {(0,): parse_expr("u1", ctx2)})
        assert form.coefficient((1,)).is_zero

    def test_zero_coefficients_dropped(self, ctx2):
        form = HorizontalForm(ctx2, 1, {(0,): Poly.zero(ctx2), (1,): Poly.zero(ctx2)})
        assert form.is_zero
        assert form == HorizontalForm.zero(ctx2, 1)

    def test_index_validation(self, ctx2):
        p = parse_expr("u1", ctx2)
        with pytest.raises(ValueError):
            HorizontalForm(ctx2, 2, {(1, 0): p})
        with pytest.raises(ValueError):
            HorizontalForm(ctx2, 2, {(0, 0): p})
        with pytest.raises(DegreeError):
            HorizontalForm(ctx2, 1, {(0, 1): p})
        with pytest.raises(DegreeError):
            HorizontalForm(ctx2, 3, {})

    def test_arithmetic(self, ctx2):
        p = parse_expr("u1", ctx2)
        q = parse_expr("u2", ctx2)
        a = HorizontalForm(ctx2, 1, {(0,): p})
        b = HorizontalForm(ctx2, 1, {(0,): q, (1,): p})
        assert (a + b).coefficient((0,)) == p + q
        assert (a - a).is_zero
        assert (a * 2).coefficient((0,)) == 2 * p
        assert 2 * a == a * 2
        with pytest.raises(DegreeError):
            a + HorizontalForm.scalar(p)

    def test_wrong_degree_accessors(self, ctx2):
        p = parse_expr("u1", ctx2)
        with pytest.raises(DegreeError):
            HorizontalForm.scalar(p).density_coefficient()
        with pytest.raises(DegreeError):
            HorizontalForm.density(p).scalar_coefficient()


class TestHorizontalDifferential:
    def test_scalar_golden_one_dim(self, ctx1):
        out = d_h(HorizontalForm.scalar(parse_expr("u1*u2", ctx1)))
        assert out.density_coefficient() == parse_expr("u1*u2_x + u1_x*u2", ctx1)

    def test_one_form_insertion_sign(self, ctx2):
        out = d_h(HorizontalForm(ctx2, 1, {(0,): parse_expr("u1", ctx2)}))
        assert out.coefficient((0, 1)) == parse_expr("-u1_y", ctx2)
        out2 = d_h(HorizontalForm(ctx2, 1, {(1,): parse_expr("u1", ctx2)}))
        assert out2.coefficient((0, 1)) == parse_expr("u1_x", ctx2)

    def test_top_degree_rejected(self, ctx1):
        with pytest.raises(DegreeError):
            d_h(HorizontalForm.density(parse_expr("u1", ctx1)))

    def test_dh_squared_zero_seeded(self, ctx2):
        rng = helpers.seeded(304)
        for _ in range(100):
            f = HorizontalForm.scalar(helpers.random_poly(rng, ctx2))
            assert d_h(d_h(f)).is_zero

    def test_dh_squared_zero_on_random_one_forms(self, ctx2):
        # n = 2 only admits d_h twice starting from degree 0, so build
        # degree-0 forms from pairs and check both component orders instead
        rng = helpers.seeded(305)
        for _ in range(100):
            p = helpers.random_poly(rng, ctx2)
            q = helpers.random_poly(rng, ctx2)
            form = HorizontalForm(ctx2, 0, {(): p * q})
            assert d_h(d_h(form)).is_zero


class TestEuler:
    def test_goldens(self, ctx1):
        e = euler(parse_expr("u1*u2_x", ctx1))
        assert e == (parse_expr("u2_x", ctx1), parse_expr("-u1_x", ctx1))
        e2 = euler(parse_expr("1/2*u1_x^2 + 1/2*u2_x^2", ctx1))
        assert e2 == (parse_expr("-u1_xx", ctx1), parse_expr("-u2_xx", ctx1))
        e3 = euler(parse_expr("x*u1", ctx1))
        assert e3 == (parse_expr("x", ctx1), Poly.zero(ctx1))

    def test_two_dim_golden(self, ctx2):
        e = euler(parse_expr("u1_x*u1_y", ctx2))
        assert e == (parse_expr("-2*u1_xy", ctx2), Poly.zero(ctx2))

    def test_kills_total_derivatives(self, ctx1):
        rng = helpers.seeded(306)
        for _ in range(100):
            g = helpers.random_poly(rng, ctx1)
            assert all(c.is_zero for c in euler(total_derivative(g, 0)))

    def test_kills_divergences_two_dim(self, ctx2):
        rng = helpers.seeded(307)
        for _ in range(50):
            f = helpers.random_poly(rng, ctx2)
            g = helpers.random_poly(rng, ctx2)
            div = total_derivative(f, 0) + total_derivative(g, 1)
            assert all(c.is_zero for c in euler(div))

    def test_order_bound(self, ctx1):
        rng = helpers.seeded(308)
        for _ in range(50):
            p = helpers.random_poly(rng, ctx1)
            bound = 2 * p.max_order()
            assert all(c.max_order() <= bound for c in euler(p))

    def test_is_divergence(self, ctx1):
        assert is_divergence(parse_expr("u1_x", ctx1))
        assert is_divergence(parse_expr("u1*u2_x + u1_x*u2", ctx1))
        assert not is_divergence(parse_expr("u1", ctx1))
        assert not is_divergence(parse_expr("u1*u2_x", ctx1))


class TestInvertTotalDerivative:
    def test_goldens(self, ctx1):
        assert invert_total_derivative(parse_expr("4*u1*u1_x", ctx1)) == \
            parse_expr("2*u1^2", ctx1)
        assert invert_total_derivative(parse_expr("u1_xx", ctx1)) == \
            parse_expr("u1_x", ctx1)
        assert invert_total_derivative(parse_expr("u1 + x*u1_x", ctx1)) == \
            parse_expr("x*u1", ctx1)
        assert invert_total_derivative(parse_expr("x^2", ctx1)) == \
            parse_expr("1/3*x^3", ctx1)
        assert invert_total_derivative(Poly.zero(ctx1)).is_zero
        assert invert_total_derivative(Poly.const(ctx1, 5)) == parse_expr("5*x", ctx1)

    def test_mixed_fiber_golden(self, ctx1):
        # both fibers feed the same order; the sweep must not double count
        h = total_derivative(parse_expr("u1*u2", ctx1), 0)
        assert invert_total_derivative(h) == parse_expr("u1*u2", ctx1)

    def test_round_trip_seeded(self, ctx1):
        rng = helpers.seeded(309)
        for _ in range(100):
            g = helpers.random_poly(rng, ctx1)
            h = total_derivative(g, 0)
            assert total_derivative(invert_total_derivative(h), 0) == h

    def test_normal_form_seeded(self, ctx1):
        rng = helpers.seeded(310)
        for _ in range(100):
            g = helpers.random_poly(rng, ctx1)
            g0 = g - Poly.const(ctx1, g.constant_term())
            assert invert_total_derivative(total_derivative(g, 0)) == g0

    def test_not_exact(self, ctx1):
        for text in ("u1", "u1_x*u2_x", "u1*u2_x", "u1_x^2"):
            with pytest.raises(NotExact):
                invert_total_derivative(parse_expr(text, ctx1))

    def test_two_dim_unsupported(self, ctx2):
        with pytest.raises(Unsupported):
            invert_total_derivative(parse_expr("u1_x", ctx2))


class TestHomotopy:
    def test_golden(self, ctx1):
        out = homotopy_s(HorizontalForm.density(parse_expr("4*u1*u1_x", ctx1)))
        assert out.scalar_coefficient() == parse_expr("-2*u1^2", ctx1)

    def test_splits_dh_seeded(self, ctx1):
        rng = helpers.seeded(311)
        for _ in range(100):
            g = helpers.random_poly(rng, ctx1)
            g = g - Poly.const(ctx1, g.constant_term())
            form = HorizontalForm.scalar(g)
            recovered = homotopy_s(d_h(form)) * -1
            assert recovered == form

    def test_dh_after_s_seeded(self, ctx1):
        rng = helpers.seeded(312)
        for _ in range(50):
            g = helpers.random_poly(rng, ctx1)
            w = d_h(HorizontalForm.scalar(g))
            assert d_h(homotopy_s(w)) == w * -1

    def test_degree_and_base_errors(self, ctx1, ctx2):
        with pytest.raises(DegreeError):
            homotopy_s(HorizontalForm.scalar(parse_expr("u1", ctx1)))
        with pytest.raises(Unsupported):
            homotopy_s(HorizontalForm.density(parse_expr("u1", ctx2)))

    def test_not_exact_propagates(self, ctx1):
        with pytest.raises(NotExact):
            homotopy_s(HorizontalForm.density(parse_expr("u1", ctx1)))

"""Structure matrices, bracket densities, Jacobi checks."""

from fractions import Fraction
from itertools import permutations

import pytest

from jetcalc import (
    EntryNotOrderZero,
    FunctionalClass,
    NonSkew,
    OmegaSpec,
    Poly,
    bracket,
    check_poisson_tensor,
    cyclic_sum,
    is_divergence,
    jacobiator,
    l2_density,
    parse_expr,
    total_derivative,
    validate_omega,
)

import helpers


def omega_from(ctx, rows):
    return OmegaSpec(ctx, tuple(tuple(parse_expr(s, ctx) for s in row) for row in rows))


@pytest.fixture(scope="module")
def omega_affine(ctx1):
    """Skew matrix with a non-constant order-zero entry."""
    return omega_from(ctx1, (("0", "1 + u1^2"), ("-1 - u1^2", "0")))


@pytest.fixture(scope="module")
def omega_bad_jacobi(ctx3):
    """Skew and order zero, but the cyclic condition fails."""
    return omega_from(ctx3, (("0", "u1", "0"), ("-u1", "0", "u2"), ("0", "-u2", "0")))


class TestOmegaSpec:
    def test_shape_validation(self, ctx1):
        one = Poly.const(ctx1, 1)
        with pytest.raises(ValueError):
            OmegaSpec(ctx1, ((one,),))
        with pytest.raises(ValueError):
            OmegaSpec(ctx1, ((one, one), (one,)))

    def test_chart_validation(self, ctx1, ctx2):
        z1, z2 = Poly.zero(ctx1), Poly.zero(ctx2)
        with pytest.raises(ValueError):
            OmegaSpec(ctx1, ((z1, z1), (z2, z1)))

    def test_validate_accepts_standard(self, omega_std, omega_so3, omega_affine):
        validate_omega(omega_std)
        validate_omega(omega_so3)
        validate_omega(omega_affine)

    def test_validate_rejects_non_skew(self, ctx1):
        with pytest.raises(NonSkew):
            validate_omega(omega_from(ctx1, (("0", "1"), ("1", "0"))))
        with pytest.raises(NonSkew):
            validate_omega(omega_from(ctx1, (("u1", "0"), ("0", "0"))))

    def test_validate_rejects_jet_entries(self, ctx1):
        with pytest.raises(EntryNotOrderZero):
            validate_omega(omega_from(ctx1, (("0", "u1_x"), ("-u1_x", "0"))))

    def test_validate_rejects_base_entries(self, ctx1):
        with pytest.raises(EntryNotOrderZero):
            validate_omega(omega_from(ctx1, (("0", "x"), ("-x", "0"))))


class TestPoissonCheck:
    def test_constant_passes(self, omega_std):
        assert check_poisson_tensor(omega_std).passed

    def test_two_fibers_always_pass(self, omega_affine):
        # on two fibers every skew matrix satisfies the cyclic condition
        assert check_poisson_tensor(omega_affine).passed

    def test_so3_passes(self, omega_so3):
        assert check_poisson_tensor(omega_so3).passed

    def test_failing_matrix_reported(self, ctx3, omega_bad_jacobi):
        report = check_poisson_tensor(omega_bad_jacobi)
        assert not report.passed
        (a, b, c, residual) = report.failures[0]
        assert (a, b, c) == ("u1", "u2", "u3")
        assert residual == parse_expr("u1", ctx3)

    def test_increasing_triples_decide(self, omega_so3, omega_bad_jacobi):
        # cross-check the a < b < c restriction against all ordered triples
        for omega in (omega_so3, omega_bad_jacobi):
            m = omega.ctx.m
            all_vanish = all(
                cyclic_sum(omega, a, b, c).is_zero
                for a in range(m) for b in range(m) for c in range(m))
            assert all_vanish == check_poisson_tensor(omega).passed

    def test_cyclic_sum_total_antisymmetry(self, omega_so3, omega_bad_jacobi):
        sign = {p: 1 for p in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]}
        sign.update({p: -1 for p in [(0, 2, 1), (2, 1, 0), (1, 0, 2)]})
        for omega in (omega_so3, omega_bad_jacobi):
            base = cyclic_sum(omega, 0, 1, 2)
            for perm in permutations((0, 1, 2)):
                assert cyclic_sum(omega, *perm) == base * sign[perm]


class TestBracketDensity:
    def test_golden(self, ctx1, omega_std):
        p = parse_expr("1/2*u1^2 + 1/2*u2^2", ctx1)
        q = parse_expr("1/2*u1_x^2 + 1/2*u2_x^2", ctx1)
        assert l2_density(p, q, omega_std) == parse_expr("-u1*u2_xx + u1_xx*u2", ctx1)

    def test_simple_golden(self, ctx1, omega_std):
        p = parse_expr("1/2*u1^2", ctx1)
        q = parse_expr("1/2*u2^2", ctx1)
        assert l2_density(p, q, omega_std) == parse_expr("u1*u2", ctx1)

    def test_chart_mismatch(self, ctx1, ctx2, omega_std):
        with pytest.raises(ValueError):
            l2_density(parse_expr("u1", ctx2), parse_expr("u2", ctx2), omega_std)

    def test_bilinear_and_skew_seeded(self, ctx1, omega_std, omega_affine):
        rng = helpers.seeded(401)
        for i in range(100):
            omega = omega_std if i % 2 == 0 else omega_affine
            p = helpers.random_poly(rng, ctx1)
            q = helpers.random_poly(rng, ctx1)
            r = helpers.random_poly(rng, ctx1)
            assert l2_density(p + q, r, omega) == \
                l2_density(p, r, omega) + l2_density(q, r, omega)
            c = Fraction(rng.randint(-3, 3))
            assert l2_density(p * c, q, omega) == l2_density(p, q, omega) * c
            assert l2_density(p, q, omega) == -l2_density(q, p, omega)

    def test_representative_independence(self, ctx1, omega_std):
        rng = helpers.seeded(402)
        for _ in range(50):
            p = helpers.random_poly(rng, ctx1)
            q = helpers.random_poly(rng, ctx1)
            h = helpers.random_poly(rng, ctx1)
            shifted = p + total_derivative(h, 0)
            assert l2_density(shifted, q, omega_std) == l2_density(p, q, omega_std)


class TestFunctionalClass:
    def test_equality_mod_divergence(self, ctx1):
        a = FunctionalClass(parse_expr("u1*u2_x", ctx1))
        b = FunctionalClass(parse_expr("-u1_x*u2", ctx1))
        assert a == b
        assert FunctionalClass(parse_expr("u1", ctx1)) != b

    def test_bracket_golden(self, ctx1, omega_std):
        p = FunctionalClass(parse_expr("1/2*u1^2", ctx1))
        q = FunctionalClass(parse_expr("1/2*u2^2", ctx1))
        assert bracket(p, q, omega_std) == FunctionalClass(parse_expr("u1*u2", ctx1))

    def test_bracket_skew_on_classes(self, ctx1, omega_std):
        rng = helpers.seeded(403)
        for _ in range(25):
            p = FunctionalClass(helpers.random_poly(rng, ctx1))
            q = FunctionalClass(helpers.random_poly(rng, ctx1))
            lhs = bracket(p, q, omega_std)
            rhs = FunctionalClass(-bracket(q, p, omega_std).density)
            assert lhs == rhs


class TestJacobiator:
    def test_golden(self, ctx1, omega_std):
        out = jacobiator(
            parse_expr("u1*u2_x", ctx1),
            parse_expr("u1*u2", ctx1),
            parse_expr("u1^2", ctx1),
            omega_std)
        assert out == parse_expr("4*u1*u1_x", ctx1)

    def test_divergence_for_poisson_omegas(self, ctx1, omega_std, omega_affine):
        rng = helpers.seeded(404)
        for i in range(100):
            omega = omega_std if i % 2 == 0 else omega_affine
            p = helpers.random_poly(rng, ctx1, max_degree=3)
            q = helpers.random_poly(rng, ctx1, max_degree=3)
            r = helpers.random_poly(rng, ctx1, max_degree=3)
            assert is_divergence(jacobiator(p, q, r, omega))

    def test_divergence_for_so3(self, ctx3, omega_so3):
        rng = helpers.seeded(405)
        for _ in range(25):
            p = helpers.random_poly(rng, ctx3, max_degree=2, max_terms=2)
            q = helpers.random_poly(rng, ctx3, max_degree=2, max_terms=2)
            r = helpers.random_poly(rng, ctx3, max_degree=2, max_terms=2)
            assert is_divergence(jacobiator(p, q, r, omega_so3))

    def test_non_poisson_breaks_jacobi(self, ctx3, omega_bad_jacobi):
        out = jacobiator(
            parse_expr("u1", ctx3),
            parse_expr("u2", ctx3),
            parse_expr("u3", ctx3),
            omega_bad_jacobi)
        assert out == parse_expr("-u1", ctx3)
        assert not is_divergence(out)

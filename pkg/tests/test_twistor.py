"""Spectral series, curve annihilation and the residue transform."""

from fractions import Fraction as F

from heavenly.jetcore import ScalarField, parse_expression, point
from heavenly.polynomials import Poly
from heavenly.recursion import st_potential
from heavenly.sampling import sample_points
from heavenly.tetrads import SecondPotential
from heavenly.twistor import (
    RatLambda,
    flat_twistor_curve,
    lax_annihilation_residual,
    penrose_residue_transform,
    recursion_on_twistor,
    residue_at,
    series_solve_omega,
    st_twistor_curve,
)

SIGMA = {"sigma": F(1)}


def flat():
    return SecondPotential(ScalarField.constant(0, "second"))


def pts(seed=1, n=10):
    return sample_points("second", seed, n,
                         ("q_nonzero", "w_nonzero", "z_nonzero", "y_nonzero"))


class TestFlatCurve:
    def test_leading_coefficients(self):
        c = flat_twistor_curve(3)
        p = point("second", 2, 3, 5, 7)
        assert c.mu0.coefficient(0).value(p) == 2
        assert c.mu0.coefficient(1).value(p) == 7
        assert c.mu1.coefficient(0).value(p) == 3
        assert c.mu1.coefficient(1).value(p) == -5

    def test_higher_coefficients_vanish(self):
        c = flat_twistor_curve(4)
        for i in range(2, 5):
            assert c.mu0.coefficient(i).is_zero()
            assert c.mu1.coefficient(i).is_zero()

    def test_annihilated_identically(self):
        c = flat_twistor_curve(4)
        for p in pts(seed=2, n=4):
            res = lax_annihilation_residual(c, flat(), p)
            assert res["max_abs_interior"] == 0
            assert all(v == 0 for d in res["top"].values() for v in d.values())


class TestCurvedCurve:
    def test_leading_and_quadratic_coefficients(self):
        c = st_twistor_curve(4)
        theta = st_potential()
        tx = theta.field.diff("x")
        ty = theta.field.diff("y")
        for p in pts(seed=3, n=5):
            assert c.mu0.coefficient(0).value(p, SIGMA) == p.values[0]
            assert c.mu0.coefficient(1).value(p, SIGMA) == p.values[3]
            assert c.mu1.coefficient(0).value(p, SIGMA) == p.values[1]
            assert c.mu1.coefficient(1).value(p, SIGMA) == -p.values[2]
            # lam^2 tails are -Theta_x and -Theta_y
            assert c.mu0.coefficient(2).value(p, SIGMA) == -tx.value(p, SIGMA)
            assert c.mu1.coefficient(2).value(p, SIGMA) == -ty.value(p, SIGMA)

    def test_sigma_zero_is_flat(self):
        c = st_twistor_curve(5)
        flat_c = flat_twistor_curve(5)
        for p in pts(seed=4, n=3):
            for i in range(6):
                assert c.mu0.coefficient(i).value(p, {"sigma": F(0)}) \
                    == flat_c.mu0.coefficient(i).value(p)
                assert c.mu1.coefficient(i).value(p, {"sigma": F(0)}) \
                    == flat_c.mu1.coefficient(i).value(p)

    def test_order_out_of_table_range(self):
        import pytest
        with pytest.raises(IndexError):
            st_twistor_curve(14)
        with pytest.raises(ValueError):
            st_twistor_curve(0)

    def test_annihilation_through_order_five(self):
        c = st_twistor_curve(6)
        theta = st_potential()
        for p in pts(seed=5, n=10):
            res = lax_annihilation_residual(c, theta, p, SIGMA)
            assert res["max_abs_interior"] == 0

    def test_fault_injection_locates_order(self):
        c = st_twistor_curve(5)
        # corrupt the lam^3 coefficient of mu0 with a coordinate-dependent term
        from heavenly.jetcore import Var, add, mul
        from heavenly.twistor import LambdaSeries, TwistorCurve
        bad_coeffs = list(c.mu0.coeffs)
        bad_coeffs[3] = ScalarField("second", add(bad_coeffs[3].expr, mul(Var("x"), Var("w"))))
        bad = TwistorCurve("st", LambdaSeries("second", 0, tuple(bad_coeffs)), c.mu1)
        theta = st_potential()
        p = pts(seed=6)[0]
        res = lax_annihilation_residual(bad, theta, p, SIGMA)
        assert res["max_abs_interior"] != 0
        nonzero_orders = {r for d in res["interior"].values() for r, v in d.items() if v != 0}
        assert nonzero_orders and min(nonzero_orders) >= 2


class TestSeriesSolve:
    def test_flat_background_gives_flat_curve(self):
        c = series_solve_omega(Poly.zero("second"), 4)
        flat_c = flat_twistor_curve(4)
        p = point("second", 1, 2, 3, 4)
        for i in range(5):
            assert c.mu0.coefficient(i).value(p) == flat_c.mu0.coefficient(i).value(p)
            assert c.mu1.coefficient(i).value(p) == flat_c.mu1.coefficient(i).value(p)

    def test_polynomial_background_quadratic_tail(self):
        # background x^2 z: the lam^2 coefficient of the first component is the
        # recursion image of y, which equals -Theta_x here (zero (w,z) part)
        theta = Poly("second", {(0, 1, 2, 0): F(1)})
        c = series_solve_omega(theta, 3)
        tx = theta.diff("x")
        for p in pts(seed=7, n=4):
            assert c.mu0.coefficient(2).value(p) == -tx.eval(p)

    def test_generated_curve_annihilated(self):
        theta = Poly("second", {(0, 1, 2, 0): F(1), (0, 2, 1, 0): F(1)})  # x^2 z + x z^2
        c = series_solve_omega(theta, 4)
        background = SecondPotential(theta.to_field())
        for p in pts(seed=8, n=5):
            res = lax_annihilation_residual(c, background, p)
            assert res["max_abs_interior"] == 0


class TestResidueTransform:
    def test_pole_free_region_gives_zero(self):
        f = parse_expression("1/(mu0*mu1)", "twistor-function")
        pole = parse_expression("1+w^2+y^2", "second")  # never a zero of mu0 mu1... generically
        p = point("second", 1, 1, 1, 1)
        assert penrose_residue_transform(f, pole, p) == 0

    def test_flat_chain_values(self):
        pole = parse_expression("-w/y", "second")
        for n in range(5):
            f = parse_expression(f"1/(mu0*mu1*lam^{n})" if n else "1/(mu0*mu1)",
                                 "twistor-function")
            for p in pts(seed=9, n=6):
                w, z, x, y = (F(v) for v in p.values)
                expect = (-y / w) ** n / (w * x + z * y)
                assert penrose_residue_transform(f, pole, p) == expect

    def test_transform_linear(self):
        pole = parse_expression("-w/y", "second")
        f1 = parse_expression("1/(mu0*mu1)", "twistor-function")
        f2 = parse_expression("lam/(mu0*mu1)", "twistor-function")
        combo = parse_expression("3/(mu0*mu1)-2*lam/(mu0*mu1)", "twistor-function")
        for p in pts(seed=10, n=4):
            v = 3 * penrose_residue_transform(f1, pole, p) \
                - 2 * penrose_residue_transform(f2, pole, p)
            assert penrose_residue_transform(combo, pole, p) == v

    def test_intertwines_with_spacetime_recursion(self):
        # both sides independently: the transform of lam^-1 F against the known
        # one-step image (-y/w) phi_n, itself validated by the flat relations
        pole = parse_expression("-w/y", "second")
        for n in range(4):
            f = parse_expression(f"1/(mu0*mu1*lam^{n})" if n else "1/(mu0*mu1)",
                                 "twistor-function")
            rf = recursion_on_twistor(f)
            for p in pts(seed=11, n=4):
                w, z, x, y = (F(v) for v in p.values)
                phi_n = (-y / w) ** n / (w * x + z * y)
                lhs = penrose_residue_transform(rf, pole, p)
                assert lhs == (-y / w) * phi_n

    def test_one_step_image_satisfies_flat_relations(self):
        # (-y/w) phi_n has d_y = d_w phi_n and d_x = -d_z phi_n
        for n in range(4):
            phi_n = ScalarField.parse(f"(-y/w)^{n}/(w*x+z*y)" if n else "1/(w*x+z*y)", "second")
            image = ScalarField.parse(f"(-y/w)^{n + 1}/(w*x+z*y)", "second")
            for p in pts(seed=12, n=4):
                assert image.diff("y").value(p) == phi_n.diff("w").value(p)
                assert image.diff("x").value(p) == -phi_n.diff("z").value(p)

    def test_lambda_cancellation(self):
        f = parse_expression("lam/(mu0*mu1)", "twistor-function")
        g = recursion_on_twistor(f)  # lam^-1 * lam * F0 = F0
        pole = parse_expression("-w/y", "second")
        f0 = parse_expression("1/(mu0*mu1)", "twistor-function")
        for p in pts(seed=13, n=3):
            assert penrose_residue_transform(g, pole, p) \
                == penrose_residue_transform(f0, pole, p)

    def test_applied_n_times(self):
        f = parse_expression("1/(mu0*mu1)", "twistor-function")
        g = f
        for _ in range(3):
            g = recursion_on_twistor(g)
        pole = parse_expression("-w/y", "second")
        p = pts(seed=14)[0]
        h = parse_expression("1/(mu0*mu1*lam^3)", "twistor-function")
        assert penrose_residue_transform(g, pole, p) == penrose_residue_transform(h, pole, p)


class TestRatLambda:
    def test_higher_order_pole_residue(self):
        # residue of 1/(lam^2 (lam - 1)) at 0: expand 1/(lam-1) = -(1 + lam + ...):
        # coefficient of lam^-1 is -1
        lam = RatLambda.lam()
        one = RatLambda.constant(1)
        f = one / (lam * lam * (lam - one))
        assert residue_at(f, F(0)) == -1
        assert residue_at(f, F(1)) == 1

    def test_removable_singularity(self):
        lam = RatLambda.lam()
        f = (lam * lam) / lam  # lam after cancellation
        assert residue_at(f, F(0)) == 0

    def test_regular_point_zero(self):
        f = RatLambda.constant(1) / (RatLambda.lam() - RatLambda.constant(2))
        assert residue_at(f, F(0)) == 0
        assert residue_at(f, F(2)) == 1

"""Lagrangians, boundary pairing, star operator and the compatibility identities."""

import random
from fractions import Fraction as F

import pytest

from heavenly.jetcore import ScalarField, point
from heavenly.polynomials import Poly
from heavenly.recursion import recursion_step_poly, st_potential, wave_residual
from heavenly.sampling import sample_points
from heavenly.symplectic import (
    BoundaryBox,
    ThreeForm,
    boundary_integral,
    boundary_of_boundary_residual,
    first_order_flow_residual,
    hodge_star_d,
    lagrangian_density_first,
    lagrangian_density_second,
    omega_k,
    second_lagrangian_variation,
    second_residual_pairing,
    star_d_flat,
    symplectic_pair,
    volume_integral,
)
from heavenly.tetrads import FirstPotential, SecondPotential

BOX = BoundaryBox.unit()
SIGMA = {"sigma": F(1)}


def mono(exps, c=1):
    return Poly("second", {tuple(exps): F(c)})


def wave_poly_samples(seed, count, degree=4):
    """Seeded wave-space polynomials: recursion images of base data."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        poly = Poly.zero("second")
        for _ in range(3):
            a, b = rng.randint(0, degree), rng.randint(0, degree)
            if a + b > degree:
                continue
            seedp = mono((a, b, 0, 0), rng.randint(-2, 2))
            k = rng.randint(0, 2)
            for _ in range(k):
                seedp = recursion_step_poly(seedp)
            poly = poly + seedp
        c, d = rng.randint(0, degree), rng.randint(0, degree)
        if c + d <= degree:
            poly = poly + mono((0, 0, c, d), rng.randint(-2, 2))
        if not poly.is_zero():
            out.append(poly)
    return out


class TestBoundaryMachinery:
    def test_stokes_equality(self):
        rng = random.Random(1)
        for _ in range(4):
            comps = tuple(Poly("second", {tuple(rng.randint(0, 2) for _ in range(4)):
                                          F(rng.randint(-3, 3))}) for _ in range(4))
            eta = ThreeForm(comps)
            assert boundary_integral(eta, BOX) \
                == volume_integral(eta.exterior_derivative_coefficient(), BOX)

    def test_boundary_of_boundary_cancels(self):
        rng = random.Random(2)
        tf = {}
        for a in range(4):
            for b in range(a + 1, 4):
                tf[(a, b)] = Poly("second", {tuple(rng.randint(0, 3) for _ in range(4)):
                                             F(rng.randint(-5, 5))})
        assert boundary_of_boundary_residual(tf, BOX) == 0
        assert boundary_of_boundary_residual(tf, BoundaryBox(F(-1), F(2))) == 0

    def test_box_needs_order(self):
        with pytest.raises(ValueError):
            BoundaryBox(F(1), F(1))


class TestHodgeStar:
    def test_flat_gradient_coordinate_field(self):
        # phi = x: star d(phi) has the single constant component against
        # dz^dx^dy (the raised gradient points along d_w)
        eta = star_d_flat(mono((0, 0, 1, 0)))
        assert eta.components[0] == Poly.constant(1, "second")
        assert all(eta.components[k].is_zero() for k in (1, 2, 3))

    def test_constant_field_gives_zero(self):
        eta = star_d_flat(Poly.constant(3, "second"))
        assert all(c.is_zero() for c in eta.components)

    def test_d_star_d_iff_wave_flat(self):
        sol = mono((1, 0, 1, 0)) + mono((0, 1, 0, 1), -1)
        assert star_d_flat(sol).exterior_derivative_coefficient().is_zero()
        not_sol = mono((1, 0, 1, 0))
        coeff = star_d_flat(not_sol).exterior_derivative_coefficient()
        assert not coeff.is_zero()
        # and the coefficient is exactly the wave operator value
        assert coeff == (not_sol.diff("x").diff("w") + not_sol.diff("y").diff("z")).scale(2)

    def test_d_star_d_iff_wave_curved(self):
        from heavenly.recursion import st_psi
        theta = st_potential()
        good = st_psi(3)  # curved wave solution
        bad = ScalarField.parse("x^2*w", "second")
        for p in sample_points("second", 3, 4, ("q_nonzero", "w_nonzero")):
            eta = hodge_star_d(theta, good, SIGMA)
            assert eta.exterior_derivative_value(p, SIGMA) == 0
            assert wave_residual(theta, good, p, SIGMA) == 0
            eta_bad = hodge_star_d(theta, bad, SIGMA)
            dv = eta_bad.exterior_derivative_value(p, SIGMA)
            assert dv == wave_residual(theta, bad, p, SIGMA)
            assert dv != 0


class TestPairing:
    def test_self_pairing_zero(self):
        for phi in wave_poly_samples(4, 5):
            assert symplectic_pair(phi, phi, BOX) == 0

    def test_antisymmetry_structural(self):
        phis = wave_poly_samples(5, 6)
        for a, b in zip(phis[::2], phis[1::2]):
            assert symplectic_pair(a, b, BOX) == -symplectic_pair(b, a, BOX)

    def test_oracle_value_frozen(self):
        # exact face integration gives 0 for this pair over the closed boundary
        # (solution pairs always integrate to zero over a closed shell: the
        # pairing's exterior derivative is the antisymmetrised wave density)
        d1 = mono((1, 0, 1, 0)) + mono((0, 1, 0, 1), -1)  # xw - yz
        d2 = mono((0, 0, 2, 0))  # x^2
        assert symplectic_pair(d1, d2, BOX) == 0

    def test_conservation_under_enlargement(self):
        phis = wave_poly_samples(6, 6)
        big = BoundaryBox(F(0), F(2))
        for a, b in zip(phis[::2], phis[1::2]):
            assert symplectic_pair(a, b, BOX) == symplectic_pair(a, b, big)

    def test_nonsolution_pair_detects_orientation(self):
        # for arbitrary inputs the closed-boundary value equals the volume
        # integral of the antisymmetrised wave density: a sharp machinery check
        d1 = mono((1, 0, 1, 0))  # xw, not a wave solution
        d2 = mono((0, 0, 0, 2))  # y^2, solution
        box_val = symplectic_pair(d1, d2, BOX)
        wave = lambda f: (f.diff("x").diff("w") + f.diff("y").diff("z")).scale(2)
        vol = volume_integral(d1 * wave(d2) - d2 * wave(d1), BOX).__mul__(F(2, 3))
        assert box_val == vol
        assert box_val != 0

    def test_r_compatibility_ten_seeded_pairs(self):
        phis = wave_poly_samples(7, 20)
        for a, b in zip(phis[::2], phis[1::2]):
            lhs = symplectic_pair(recursion_step_poly(a), b, BOX)
            rhs = symplectic_pair(a, recursion_step_poly(b), BOX)
            assert lhs == rhs

    def test_omega_k_reductions(self):
        d1 = mono((1, 0, 1, 0)) + mono((0, 1, 0, 1), -1)
        d2 = mono((0, 0, 2, 0))
        assert omega_k(d1, d2, 0, BOX) == symplectic_pair(d1, d2, BOX)
        assert omega_k(d1, d2, 1, BOX) == symplectic_pair(d1, recursion_step_poly(d2), BOX)
        for phi in wave_poly_samples(8, 4):
            assert omega_k(phi, phi, 2, BOX) == 0


class TestLagrangians:
    def test_flat_second_zero(self):
        theta = SecondPotential(ScalarField.constant(0, "second"))
        assert lagrangian_density_second(theta, point("second", 1, 2, 3, 4)) == 0

    def test_first_flat_value(self):
        # Omega (1 - (1/3) {O_zt, O_wt}_wz) = 2 (1 - 1/3) = 4/3 at the unit point
        omega = FirstPotential(ScalarField.parse("w*zt+z*wt", "first"))
        assert lagrangian_density_first(omega, point("first", 1, 1, 1, 1)) == F(4, 3)

    def test_second_density_on_curved_solution(self):
        theta = st_potential()
        p = sample_points("second", 9, 1, ("q_nonzero",))[0]
        w, z, x, y = (F(v) for v in p.values)
        q = w * x + z * y
        # density by hand: (1/3) T (T_xx T_yy - T_xy^2) - (1/2)(T_x T_w + T_y T_z)
        t = 1 / q
        txty = (2 * w * w / q ** 3) * (2 * z * z / q ** 3) - (2 * w * z / q ** 3) ** 2
        trans = (-w / q ** 2) * (-x / q ** 2) + (-z / q ** 2) * (-y / q ** 2)
        expect = t * txty / 3 - trans / 2
        assert lagrangian_density_second(theta, p, SIGMA) == expect

    def test_variation_matches_residual_pairing(self):
        # bump-localised variations: delta vanishes to second order on the
        # boundary, so the exact volume integrals of the first variation and of
        # residual * delta agree (sign pinned here)
        rng = random.Random(10)
        bump = (mono((2, 0, 0, 0)) - mono((1, 0, 0, 0))) ** 2 \
            * (mono((0, 2, 0, 0)) - mono((0, 1, 0, 0))) ** 2 \
            * (mono((0, 0, 2, 0)) - mono((0, 0, 1, 0))) ** 2 \
            * (mono((0, 0, 0, 2)) - mono((0, 0, 0, 1))) ** 2
        for _ in range(3):
            theta = Poly("second", {tuple(rng.randint(0, 1) for _ in range(4)):
                                    F(rng.randint(-2, 2)) for _ in range(5)})
            delta = bump * mono(tuple(rng.randint(0, 1) for _ in range(4)))
            lhs = second_lagrangian_variation(theta, delta, BOX)
            rhs = second_residual_pairing(theta, delta, BOX)
            assert lhs == rhs


class TestTechnicalIdentities:
    # flat two-form triple and the four index operators, as component identities
    # relating a wave polynomial to its recursion image; identity 2 as displayed
    # pairs forms from disjoint bases and cannot hold, so the operator identity
    # behind it is checked instead
    @staticmethod
    def forms():
        from heavenly.recursion import st_potential  # flat via sigma = 0
        from heavenly.tetrads import (
            SecondPotential,
            sigma_forms,
            tetrad_from_theta,
        )
        flat = SecondPotential(ScalarField.constant(0, "second"))
        return sigma_forms(tetrad_from_theta(flat))

    @staticmethod
    def op(which, phi: Poly):
        """One-form-valued operators: components against (dw, dz, dx, dy)."""
        zero = Poly.zero("second")
        if which == "tilde":   # e^{A0'} x N_{A0'}: phi_x dx + phi_y dy
            return (zero, zero, phi.diff("x"), phi.diff("y"))
        if which == "d0":      # e^{A0'} x N_{A1'}: -phi_z dx + phi_w dy
            return (zero, zero, -phi.diff("z"), phi.diff("w"))
        if which == "d2":      # e^{A1'} x N_{A0'}: -phi_x dz + phi_y dw
            return (phi.diff("y"), -phi.diff("x"), zero, zero)
        if which == "d":       # e^{A1'} x N_{A1'}: phi_z dz + phi_w dw
            return (phi.diff("w"), phi.diff("z"), zero, zero)
        raise ValueError(which)

    @staticmethod
    def wedge23(two_form, one_form):
        """Components of (two-form ^ one-form) on the 3-form basis, flat values."""
        p0 = point("second", 0, 0, 0, 0)
        out = {}
        import itertools
        for (a, b, c) in itertools.combinations(range(4), 3):
            val = Poly.zero("second")
            for (i, j, k) in itertools.permutations((a, b, c), 3):
                if i < j:
                    sign = TestTechnicalIdentities._perm_sign_3((a, b, c), (i, j, k))
                    tf = two_form.value(i, j, p0)
                    val = val + one_form[k].scale(F(tf) * sign)
            out[(a, b, c)] = val.scale(F(1, 2))
        return out

    @staticmethod
    def _perm_sign_3(base, perm):
        sign = 1
        p = [base.index(x) for x in perm]
        for i in range(3):
            for j in range(i + 1, 3):
                if p[i] > p[j]:
                    sign = -sign
        return sign

    def test_identities_with_recursion_image(self):
        forms = self.forms()
        phis = wave_poly_samples(11, 5)
        for phi in phis:
            rphi = recursion_step_poly(phi)
            checks = [
                (forms.omega, self.op("d", phi), forms.alpha, self.op("tilde", rphi), -1),
                (forms.omega, self.op("d2", rphi), forms.alpha, self.op("d0", phi), -1),
                (forms.omega, self.op("tilde", rphi), forms.alpha_tilde, self.op("d", phi), 1),
            ]
            for lhs2, lhs1, rhs2, rhs1, sign in checks:
                left = self.wedge23(lhs2, lhs1)
                right = self.wedge23(rhs2, rhs1)
                for key in left:
                    assert (left[key] - right[key].scale(sign)).is_zero()

    def test_operator_identities_no_recursion(self):
        # omega ^ d0 = alpha_tilde ^ d and omega ^ d = -alpha ^ d0, pointwise
        forms = self.forms()
        for phi in wave_poly_samples(12, 3):
            left = self.wedge23(forms.omega, self.op("d0", phi))
            right = self.wedge23(forms.alpha_tilde, self.op("d", phi))
            for key in left:
                assert (left[key] - right[key]).is_zero()
            left2 = self.wedge23(forms.omega, self.op("d", phi))
            right2 = self.wedge23(forms.alpha, self.op("d0", phi))
            for key in left2:
                assert (left2[key] + right2[key]).is_zero()


class TestCurvedQuadraturePairing:
    def test_flat_cross_check_matches_exact_value(self):
        # Gauss nodes integrate the polynomial faces exactly, so the float
        # path must agree with exact integration to roundoff
        from heavenly.symplectic import symplectic_pair_curved
        flat = SecondPotential(ScalarField.constant(0, "second"))
        d1 = mono((1, 0, 1, 0))  # xw: non-solution, nonzero pairing
        d2 = mono((0, 0, 0, 2))
        exact = symplectic_pair(d1, d2, BOX)
        quad = symplectic_pair_curved(flat, d1.to_field(), d2.to_field(), BOX)
        assert abs(quad - float(exact)) < 1e-12
        assert exact != 0

    def test_curved_solution_pair_near_zero(self):
        # closed-boundary value vanishes for wave-space pairs; the box keeps
        # clear of the background's singular locus
        from heavenly.recursion import st_psi
        from heavenly.symplectic import symplectic_pair_curved
        theta = st_potential()
        box = BoundaryBox(F(1), F(2))
        v = symplectic_pair_curved(theta, st_psi(1), st_psi(2), box, SIGMA)
        assert abs(v) < 1e-10


class TestFirstOrderForm:
    def test_residual_is_minus_flow_equation(self):
        # monomials of T_y all carry x, so the x-antiderivative is exact
        rng = random.Random(13)
        for _ in range(5):
            terms = {}
            for _ in range(5):
                e = [rng.randint(0, 2) for _ in range(4)]
                e[2] = max(e[2], 1)  # ensure an x factor
                terms[tuple(e)] = F(rng.randint(-2, 2))
            theta = Poly("second", terms)
            res = first_order_flow_residual(theta)
            eq = (theta.diff("x").diff("w") + theta.diff("y").diff("z")
                  + theta.diff("x").diff("x") * theta.diff("y").diff("y")
                  - theta.diff("x").diff("y") * theta.diff("x").diff("y"))
            assert (res + eq).is_zero()

    def test_vanishes_iff_equation_holds(self):
        sol = Poly("second", {(0, 1, 2, 0): F(1), (0, 2, 1, 0): F(1)})  # x^2 z + x z^2
        assert first_order_flow_residual(sol).is_zero()
        not_sol = Poly("second", {(0, 0, 2, 2): F(1)})  # x^2 y^2
        assert not first_order_flow_residual(not_sol).is_zero()

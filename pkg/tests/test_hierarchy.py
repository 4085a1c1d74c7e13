"""Extended flows: residuals, Lax distribution, Sato identity, slice metrics."""

import random
from fractions import Fraction as F

import pytest

from heavenly.hierarchy import (
    ExtendedPotential,
    SpinorVector,
    coord_name,
    d_flow_field,
    embed_second_form,
    extended1_point_of_second,
    hierarchy_residual,
    lax_compat_residual,
    lax_field,
    paraconformal_eval,
    poisson_yx,
    sato_flow_residual,
    slice_metric,
    summed_lax_identity_residual,
    truncated_omega,
    vector_to_spinor_level1,
)
from heavenly.jetcore import Point, ScalarField, extended_chart, point
from heavenly.polynomials import Poly
from heavenly.recursion import st_potential
from heavenly.sampling import sample_points
from heavenly.tetrads import (
    SecondPotential,
    lax_pair_theta,
    metric_from_tetrad,
    second_heavenly_residual,
    tetrad_from_theta,
)

SIGMA = {"sigma": F(1)}


def random_potential(n, seed, nterms=8, degree=3):
    rng = random.Random(seed)
    chart = extended_chart(n)
    ncoords = 2 * (n + 1)
    poly = Poly.zero(chart)
    for _ in range(nterms):
        exps = [0] * ncoords
        for _ in range(rng.randint(1, degree)):
            exps[rng.randrange(ncoords)] += 1
        c = F(rng.randint(-2, 2))
        if c:
            poly = poly + Poly(chart, {tuple(exps): c})
    return ExtendedPotential(n, poly.to_field())


class TestPoisson:
    def test_antisymmetry_and_self(self):
        chart = extended_chart(2)
        f = ScalarField.parse("x00^2*x11+x10*x02", chart)
        g = ScalarField.parse("x00*x10-x01", chart)
        for p in sample_points(chart, 1, 4):
            assert poisson_yx(f, f, p) == 0
            assert poisson_yx(f, g, p) == -poisson_yx(g, f, p)

    def test_canonical_pair(self):
        chart = extended_chart(1)
        f = ScalarField.parse("x00", chart)
        g = ScalarField.parse("x10", chart)
        assert poisson_yx(f, g, point(chart, 1, 2, 3, 4)) == 1

    def test_leibniz(self):
        chart = extended_chart(1)
        f = ScalarField.parse("x00^2+x01", chart)
        g = ScalarField.parse("x10*x11", chart)
        h = ScalarField.parse("x00-x10^2", chart)
        gh = ScalarField.parse("(x10*x11)*(x00-x10^2)", chart)
        for p in sample_points(chart, 2, 5):
            lhs = poisson_yx(f, gh, p)
            rhs = poisson_yx(f, g, p) * h.value(p) + g.value(p) * poisson_yx(f, h, p)
            assert lhs == rhs


class TestResidual:
    def test_level_one_equals_second_equation(self):
        theta = ScalarField.parse("sigma/(w*x+z*y)", "second")
        E = embed_second_form(theta)
        base = SecondPotential(theta)
        for p in sample_points("second", 3, 10, ("q_nonzero",)):
            pe = extended1_point_of_second(p)
            assert hierarchy_residual(E, 0, 1, 1, 1, pe, SIGMA) \
                == second_heavenly_residual(base, p, SIGMA)

    def test_polynomial_level_one_equality(self):
        rng = random.Random(4)
        for _ in range(5):
            terms = {tuple(rng.randint(0, 2) for _ in range(4)): F(rng.randint(-2, 2))
                     for _ in range(6)}
            theta = Poly("second", terms).to_field()
            E = embed_second_form(theta)
            base = SecondPotential(theta)
            p = sample_points("second", rng.randint(0, 99), 1)[0]
            pe = extended1_point_of_second(p)
            assert hierarchy_residual(E, 0, 1, 1, 1, pe) == second_heavenly_residual(base, p)

    def test_zero_potential(self):
        E = ExtendedPotential(2, ScalarField.constant(0, extended_chart(2)))
        p = sample_points(extended_chart(2), 5, 1)[0]
        for (A, i, B, j) in ((0, 1, 1, 1), (0, 2, 1, 1), (1, 2, 0, 2)):
            assert hierarchy_residual(E, A, i, B, j, p) == 0

    def test_upper_flow_only_potential(self):
        # no x^{A0} dependence: the bracket dies, leaving antisymmetrised seconds
        chart = extended_chart(2)
        T = ScalarField.parse("x01^2*x12+x11*x02^2", chart)
        E = ExtendedPotential(2, T)
        for p in sample_points(chart, 6, 3):
            for (A, i, B, j) in ((0, 1, 1, 1), (0, 2, 1, 2)):
                ti = T.diff(coord_name(A, i)).diff(coord_name(B, j - 1)).value(p)
                tj = T.diff(coord_name(B, j)).diff(coord_name(A, i - 1)).value(p)
                assert hierarchy_residual(E, A, i, B, j, p) == ti - tj

    def test_index_range(self):
        E = random_potential(2, 7)
        p = sample_points(E.chart, 7, 1)[0]
        with pytest.raises(IndexError):
            hierarchy_residual(E, 0, 0, 1, 1, p)
        with pytest.raises(IndexError):
            hierarchy_residual(E, 0, 1, 1, 3, p)


class TestLaxFields:
    def test_zero_potential_translations(self):
        E = ExtendedPotential(2, ScalarField.constant(0, extended_chart(2)))
        p = sample_points(E.chart, 8, 1)[0]
        coords = list(range(6))
        lam = F(2)
        for A in (0, 1):
            for i in (0, 1):
                vals = [f.value(p) for f in lax_field(E, A, i).at_lambda(lam)]
                expect = [F(0)] * 6
                from heavenly.jetcore import chart_coords
                names = chart_coords(E.chart)
                expect[names.index(coord_name(A, i))] = F(1)
                expect[names.index(coord_name(A, i + 1))] = -lam
                assert vals == expect

    def test_level_one_reduces_to_displayed_pair(self):
        theta = ScalarField.parse("sigma/(w*x+z*y)", "second")
        E = embed_second_form(theta)
        base = SecondPotential(theta)
        lam = F(1, 3)
        lp = lax_pair_theta(base, lam)
        for p in sample_points("second", 9, 5, ("q_nonzero",)):
            pe = extended1_point_of_second(p)
            for A in (0, 1):
                ext = [f.value(pe, SIGMA) for f in lax_field(E, A, 0).at_lambda(lam)]
                sec = [f.value(p, SIGMA) for f in lp.components(A)]
                # chart map: V^w = V^{x01}, V^z = -V^{x11}, V^x = V^{x10}, V^y = V^{x00}
                assert [ext[2], -ext[3], ext[1], ext[0]] == sec

    def test_hamiltonian_field_pattern(self):
        # the commutator part of D only points along the x^{A0} plane
        E = random_potential(2, 10)
        from heavenly.jetcore import chart_coords
        names = chart_coords(E.chart)
        for A in (0, 1):
            for i in (0, 1):
                comps = d_flow_field(E, A, i)
                for k, f in enumerate(comps):
                    if names[k] in ("x00", "x10"):
                        continue
                    if names[k] == coord_name(A, i + 1):
                        assert str(f) == "1"
                    else:
                        assert f.is_zero()


class TestCompatibility:
    @pytest.mark.parametrize("n,seed", [(2, 11), (2, 12), (3, 13)])
    def test_identities_and_equivalence(self, n, seed):
        E = random_potential(n, seed)
        pairs = [(A, i, B, j) for A in (0, 1) for B in (0, 1)
                 for i in range(n) for j in range(n) if (A, i) < (B, j)]
        for p in sample_points(E.chart, seed, 2):
            out = lax_compat_residual(E, pairs, p)
            for rec in out["pairs"]:
                assert all(v == 0 for v in rec["delta_delta"])
                assert all(v == 0 for v in rec["mixed"])
                assert rec["dd_matches_residual"]

    def test_dd_commutator_nonzero_generically(self):
        chart = extended_chart(2)
        T = Poly(chart, {(2, 2, 0, 0, 0, 0): F(1)})  # (x00 x10)^2: bracket-active
        E = ExtendedPotential(2, T.to_field())
        p = point(chart, 1, 1, 1, 1, 1, 1)
        out = lax_compat_residual(E, [(0, 0, 1, 0)], p)
        assert any(v != 0 for v in out["pairs"][0]["dd_commutator"])
        assert out["pairs"][0]["dd_matches_residual"]


class TestSato:
    def test_truncated_series_zero_potential(self):
        E = ExtendedPotential(2, ScalarField.constant(0, extended_chart(2)))
        om0, om1 = truncated_omega(E, 2)
        p = sample_points(E.chart, 15, 1)[0]
        from heavenly.jetcore import chart_coords
        names = chart_coords(E.chart)
        assert om0.coefficient(0).value(p) == -p.values[names.index("x00")]
        assert om1.coefficient(0).value(p) == -p.values[names.index("x10")]
        assert om0.coefficient(1).value(p) == 0
        res = sato_flow_residual(E, 1, 1, p)
        assert all(v == 0 for d in res.values() for v in d.values())

    @pytest.mark.parametrize("n,seed", [(1, 16), (2, 17), (3, 18)])
    def test_summed_lax_identity_any_potential(self, n, seed):
        E = random_potential(n, seed)
        rng = random.Random(seed + 1)
        chart = E.chart
        ncoords = 2 * (n + 1)
        for p in sample_points(chart, seed, 2):
            test_terms = {tuple(rng.randint(0, 1) for _ in range(ncoords)): F(rng.randint(-2, 2))
                          for _ in range(5)}
            test = Poly(chart, test_terms).to_field()
            for A in (0, 1):
                for j in range(1, n + 1):
                    res = summed_lax_identity_residual(E, A, j, test, p)
                    assert all(v == 0 for v in res.values())

    def test_flow_form_on_embedded_solution(self):
        # level-1 embedding of the quadratic-pole solution: interior orders of
        # the flow-form residual vanish; the top order is truncation debris
        theta = ScalarField.parse("sigma/(w*x+z*y)", "second")
        E = embed_second_form(theta)
        for p in sample_points("second", 19, 4, ("q_nonzero",)):
            pe = extended1_point_of_second(p)
            res = sato_flow_residual(E, 1, 1, pe, SIGMA)
            for orders in res.values():
                top = max(orders)
                for r, v in orders.items():
                    if r < top:
                        assert v == 0


class TestSliceMetric:
    def test_level_one_reproduces_tetrad_metric(self):
        theta = ScalarField.parse("sigma/(w*x+z*y)", "second")
        E = embed_second_form(theta)
        sm = slice_metric(E)
        g = metric_from_tetrad(tetrad_from_theta(SecondPotential(theta)))
        jac = {0: (2, 1), 1: (3, -1), 2: (1, 1), 3: (0, 1)}
        for p in sample_points("second", 20, 5, ("q_nonzero",)):
            pe = extended1_point_of_second(p)
            gv = g.matrix_values(p, SIGMA)
            sv = sm.matrix_values(pe, SIGMA)
            for a in range(4):
                for b in range(4):
                    ea, sa = jac[a]
                    eb, sb = jac[b]
                    assert gv[a][b] == sa * sb * sv[ea][eb]

    def test_zero_potential_flat_slice(self):
        E = ExtendedPotential(2, ScalarField.constant(0, extended_chart(2)))
        sm = slice_metric(E)
        p = sample_points(E.chart, 21, 1)[0]
        m = sm.matrix_values(p)
        from heavenly.jetcore import chart_coords
        names = chart_coords(E.chart)
        i = {nm: names.index(nm) for nm in names}
        assert m[i["x01"]][i["x10"]] == 1
        assert m[i["x11"]][i["x00"]] == -1
        assert m[i["x02"]][i["x02"]] == 0

    def test_level_two_extension_restricts_to_quadratic_pole_metric(self):
        # constant extension along the new flows; slice at any point gives the
        # level-one metric values
        theta = ScalarField.parse("sigma/(w*x+z*y)", "second")
        chart2 = extended_chart(2)
        from heavenly.jetcore import Var, neg, substitute
        mapping = {"w": Var("x01"), "z": neg(Var("x11")),
                   "x": Var("x10"), "y": Var("x00")}
        T2 = ScalarField(chart2, substitute(theta.expr, mapping))
        E2 = ExtendedPotential(2, T2)
        sm = slice_metric(E2)
        g = metric_from_tetrad(tetrad_from_theta(SecondPotential(theta)))
        jac = {0: (2, 1), 1: (3, -1), 2: (1, 1), 3: (0, 1)}
        for p in sample_points("second", 22, 4, ("q_nonzero",)):
            w, z, x, y = p.values
            pe = Point(chart2, (y, x, w, -z, F(1, 2), F(-2, 3)))
            gv = g.matrix_values(p, SIGMA)
            sv = sm.matrix_values(pe, SIGMA)
            for a in range(4):
                for b in range(4):
                    ea, sa = jac[a]
                    eb, sb = jac[b]
                    assert gv[a][b] == sa * sb * sv[ea][eb]


class TestParaconformal:
    def test_even_rank_skew(self):
        rng = random.Random(23)
        for n in (2,):
            U = SpinorVector(n, {(A, k): F(rng.randint(-5, 5))
                                 for A in (0, 1) for k in range(n + 1)})
            assert paraconformal_eval(U, U) == 0

    def test_odd_rank_symmetric(self):
        rng = random.Random(24)
        for n in (1, 3):
            U = SpinorVector(n, {(A, k): F(rng.randint(-5, 5))
                                 for A in (0, 1) for k in range(n + 1)})
            W = SpinorVector(n, {(A, k): F(rng.randint(-5, 5))
                                 for A in (0, 1) for k in range(n + 1)})
            assert paraconformal_eval(U, W) == paraconformal_eval(W, U)

    def test_level_one_matches_metric(self):
        theta = SecondPotential(ScalarField.parse("sigma/(w*x+z*y)", "second"))
        t = tetrad_from_theta(theta)
        g = metric_from_tetrad(t)
        rng = random.Random(25)
        for p in sample_points("second", 26, 4, ("q_nonzero",)):
            u = tuple(F(rng.randint(-3, 3)) for _ in range(4))
            v = tuple(F(rng.randint(-3, 3)) for _ in range(4))
            gv = g.matrix_values(p, SIGMA)
            guv = sum(gv[a][b] * u[a] * v[b] for a in range(4) for b in range(4))
            U = vector_to_spinor_level1(t, u, p, SIGMA)
            W = vector_to_spinor_level1(t, v, p, SIGMA)
            assert paraconformal_eval(U, W) == guv

    def test_rank_mismatch(self):
        U = SpinorVector(1, {})
        W = SpinorVector(2, {})
        with pytest.raises(ValueError):
            paraconformal_eval(U, W)

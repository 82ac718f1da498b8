import math

import numpy as np
import pytest

from okdrop.gamow import (BALL_RADIUS_STAR, F_STAR_LOWER, F_STAR_UPPER, ISOPERIMETRIC,
                          DropEnergy, StarShape, ball_energy, dilation_optimize,
                          f_star_bounds, optimal_ball, shape_energy)

from oracles import golden_section, mc_ball_coulomb


def random_shapes(count, rng, max_degree=8, scale=0.08):
    shapes = []
    while len(shapes) < count:
        deg = int(rng.integers(2, max_degree + 1))
        coeffs = rng.uniform(-scale, scale, deg - 1)
        try:
            shapes.append(StarShape(float(rng.uniform(0.5, 2.5)), tuple(coeffs)))
        except ValueError:
            continue
    return shapes


class TestBallEnergy:
    def test_unit_ball_closed_form(self):
        de = ball_energy(1.0)
        assert de.perimeter == pytest.approx(4 * math.pi, rel=1e-15)
        assert de.coulomb == pytest.approx(4 * math.pi / 15, rel=1e-15)
        assert de.mass == pytest.approx(4 * math.pi / 3, rel=1e-15)
        assert de.ratio == pytest.approx(3.2, rel=1e-14)

    @pytest.mark.slow
    def test_coulomb_against_monte_carlo(self):
        mc = mc_ball_coulomb(1.0, pairs=10_000_000, seed=7)
        assert abs(mc - 4 * math.pi / 15) / (4 * math.pi / 15) < 1e-3

    def test_optimal_radius_values(self):
        r_star, f_ball = optimal_ball()
        assert r_star == pytest.approx((15 / 2) ** (1 / 3), rel=1e-15)
        assert f_ball == pytest.approx(3 ** (5 / 3) * 2 ** (-2 / 3) * 5 ** (-1 / 3), rel=1e-15)
        # reference decimals: R* = 1.957434, f = 2.298928
        assert r_star == pytest.approx(1.957434, abs=1e-6)
        assert ball_energy(r_star).ratio == pytest.approx(f_ball, rel=1e-14)

    def test_equipartition_at_optimum(self):
        r_star, _ = optimal_ball()
        de = ball_energy(r_star)
        assert de.equipartition_ratio == pytest.approx(0.5, abs=1e-14)
        assert de.coulomb == pytest.approx(0.5 * de.perimeter, rel=1e-14)

    def test_local_minimality(self):
        r_star, f_ball = optimal_ball()
        assert ball_energy(r_star * 1.01).ratio > f_ball
        assert ball_energy(r_star * 0.99).ratio > f_ball

    def test_golden_section_oracle(self):
        r_star, f_ball = optimal_ball()
        for bracket in ((0.5, 5.0), (0.5, 10.0)):
            r, f = golden_section(lambda rr: 3.0 / rr + rr**2 / 5.0, *bracket, tol=1e-12)
            assert abs(r - r_star) < 1e-8
            assert abs(f - f_ball) < 1e-10


class TestShapeEnergy:
    def test_ball_degenerate_case(self):
        de = shape_energy(StarShape(1.0))
        ref = ball_energy(1.0)
        assert de.perimeter == pytest.approx(ref.perimeter, rel=1e-9)
        assert de.coulomb == pytest.approx(ref.coulomb, rel=1e-9)
        assert de.mass == pytest.approx(ref.mass, rel=1e-9)
        assert abs(de.ratio - ref.ratio) < 1e-6

    def test_perturbed_shape_beats_nothing(self):
        # the perturbed ball at the optimal radius loses to the ball
        _, f_ball = optimal_ball()
        de = shape_energy(StarShape(BALL_RADIUS_STAR, (0.1,)))
        assert de.ratio > f_ball

    @pytest.mark.slow
    def test_perturbed_coulomb_against_monte_carlo(self, rng):
        # quadrature route vs rejection-sampled Monte-Carlo for a
        # non-spherical shape
        shape = StarShape(1.0, (0.1, -0.05, 0.02))
        de = shape_energy(shape)
        box = 1.3
        total = 40_000_000
        kept_x = []
        for _ in range(10):
            pts = rng.uniform(-box, box, (total // 10, 3))
            r = np.linalg.norm(pts, axis=1)
            ct = np.divide(pts[:, 2], r, out=np.zeros_like(r), where=r > 0)
            keep = r <= shape.radius(ct)
            kept_x.append(pts[keep])
        pts = np.concatenate(kept_x)
        vol_mc = (2 * box) ** 3 * len(pts) / total
        assert abs(vol_mc - de.mass) / de.mass < 5e-3
        half = len(pts) // 2
        d = np.linalg.norm(pts[:half] - pts[half:2 * half], axis=1)
        v_mc = vol_mc**2 * float(np.mean(1.0 / d)) / (8 * math.pi)
        assert abs(v_mc - de.coulomb) / de.coulomb < 1e-2

    def test_homogeneity_under_dilation(self):
        shape = StarShape(1.0, (0.1, -0.05, 0.02))
        base = shape_energy(shape)
        for t in (0.25, 0.5, 2.0, 4.0):
            de = shape_energy(shape.dilate(t))
            assert de.perimeter == pytest.approx(t**2 * base.perimeter, rel=1e-8)
            assert de.coulomb == pytest.approx(t**5 * base.coulomb, rel=1e-8)
            assert de.mass == pytest.approx(t**3 * base.mass, rel=1e-8)

    def test_quadrature_convergence(self, rng):
        for shape in random_shapes(3, rng, max_degree=8):
            v1 = shape_energy(shape, n_angular=512).coulomb
            v2 = shape_energy(shape, n_angular=1024).coulomb
            assert abs(v2 - v1) / abs(v1) < 1e-6

    def test_kernel_truncation_guard(self):
        shape = StarShape(1.0, (0.1, 0.0, 0.0, 0.05))  # degree 6
        with pytest.raises(ValueError):
            shape_energy(shape, lmax_kernel=8)
        de = shape_energy(shape, lmax_kernel=12)
        assert de.coulomb_tail is not None and de.coulomb_tail < 1e-6 * de.coulomb

    def test_star_shape_validation(self):
        with pytest.raises(ValueError):
            StarShape(1.0, (0.6,))
        with pytest.raises(ValueError):
            StarShape(-1.0)
        with pytest.raises(ValueError):
            StarShape(1.0, tuple([0.0] * 16))


class TestDilation:
    def test_ball_lands_on_optimal_radius(self):
        t, de = dilation_optimize(StarShape(1.0))
        assert t == pytest.approx(BALL_RADIUS_STAR, rel=1e-10)
        assert de.ratio == pytest.approx(F_STAR_UPPER, rel=1e-9)

    def test_equipartition_for_random_shapes(self, rng):
        for shape in random_shapes(20, rng):
            _, de = dilation_optimize(shape)
            assert de.equipartition_ratio == pytest.approx(0.5, abs=1e-10)

    def test_optimal_against_nearby_dilations(self):
        shape = StarShape(1.0, (0.1, -0.05))
        t, de = dilation_optimize(shape)
        worse = shape_energy(shape.dilate(t * 1.1))
        assert de.ratio <= worse.ratio

    def test_matches_scalar_search(self):
        shape = StarShape(1.3, (0.08, 0.02))
        base = shape_energy(shape)
        t, de = dilation_optimize(shape)

        def f_of_t(t_):
            return (t_**2 * base.perimeter + t_**5 * base.coulomb) / (t_**3 * base.mass)

        t_scan, f_scan = golden_section(f_of_t, 0.2, 8.0, tol=1e-12)
        assert abs(t - t_scan) < 1e-8
        assert abs(de.ratio - f_scan) < 1e-10


class TestBoundsAndInvariants:
    def test_f_star_bounds_values(self):
        lo, hi = f_star_bounds()
        assert lo == pytest.approx(3 ** (5 / 3) / 4, abs=1e-14)
        assert hi == pytest.approx(3 ** (5 / 3) * 2 ** (-2 / 3) * 5 ** (-1 / 3), abs=1e-14)
        # the proof chain (243 pi / (2 |F*|))^(1/3) with |F*| = 32 pi
        chain = (243 * math.pi / (2 * 32 * math.pi)) ** (1 / 3)
        assert chain == pytest.approx(lo, abs=1e-14)
        assert lo == pytest.approx(1.5600637, abs=1e-6)
        assert hi == pytest.approx(2.2989274, abs=1e-6)

    def test_lambda_c_bracket_composition(self):
        # cross-module: the threshold bracket is 2^(-1/3) sigma^(2/3) kappa^2
        # times these bounds
        from okdrop.energy import WellPotential
        from okdrop.limit import lambda_c_bracket

        well = WellPotential.quartic()
        lo, hi = f_star_bounds()
        scale = 2 ** (-1 / 3) * well.sigma ** (2 / 3) * well.kappa**2
        assert lambda_c_bracket(well) == pytest.approx((scale * lo, scale * hi), rel=1e-14)
        assert lambda_c_bracket(well)[0] == pytest.approx(0.595275, abs=1e-6)
        assert lambda_c_bracket(well)[1] == pytest.approx(0.877205, abs=1e-6)

    def test_isoperimetric_inequality(self, rng):
        for shape in random_shapes(20, rng):
            de = shape_energy(shape)
            assert de.perimeter >= ISOPERIMETRIC * de.mass ** (2 / 3) - 1e-9

    def test_universal_lower_bound(self, rng):
        lo, _ = f_star_bounds()
        for shape in random_shapes(20, rng):
            de = shape_energy(shape)
            assert de.ratio >= lo - 1e-9

    def test_drop_energy_guards(self):
        with pytest.raises(ValueError):
            DropEnergy(perimeter=1.0, coulomb=1.0, mass=1e6, ratio=2e-6,
                       equipartition_ratio=1.0)

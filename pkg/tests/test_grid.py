import json
import math

import numpy as np
import pytest

from okdrop.grid import (Field3, Multiplier, basis, dump_field, grad_norm_integrals,
                         gradient_fields, integrate, load_field, min_image_radii,
                         spectral_apply)


def cosine_field(n, ell, k_index=1, axis="x"):
    k = 2 * math.pi * k_index / ell

    def fn(x, y, z):
        c = {"x": x, "y": y, "z": z}[axis]
        return np.cos(k * c) + 0.0 * (x + y + z)

    return Field3.from_function(n, ell, fn)


class TestIntegrate:
    def test_constant_is_torus_volume(self):
        assert integrate(Field3.constant(12, 2.0, 1.0)) == pytest.approx(8.0, abs=1e-13)

    def test_zero_mean_mode(self):
        f = Field3.from_function(16, 1.0, lambda x, y, z: np.sin(2 * np.pi * x) + 0 * y + 0 * z)
        assert integrate(f) == pytest.approx(0.0, abs=1e-13)

    def test_sin_squared(self):
        # closed form: mean of sin^2 over one period is 1/2
        for n in (16, 32):
            f = Field3.from_function(n, 1.0, lambda x, y, z: np.sin(2 * np.pi * x) ** 2 + 0 * y + 0 * z)
            assert integrate(f) == pytest.approx(0.5, abs=1e-13)

    def test_linearity(self, rng):
        n, ell = 12, 1.5
        f = Field3(n, ell, rng.standard_normal(n**3))
        g = Field3(n, ell, rng.standard_normal(n**3))
        a, b = 0.7, -2.3
        combo = Field3(n, ell, a * f.values + b * g.values)
        assert integrate(combo) == pytest.approx(a * integrate(f) + b * integrate(g), abs=1e-12)


class TestSpectralApply:
    def test_identity_multiplier(self, rng):
        n = 16
        f = Field3(n, 1.0, rng.standard_normal(n**3))
        m = Multiplier(n, np.ones(n * n * (n // 2 + 1)))
        out = spectral_apply(f, m)
        assert np.max(np.abs(out.values - f.values)) < 1e-13

    def test_eigenfunction_scaling(self):
        n, ell, kappa = 16, 1.0, 0.75
        f = cosine_field(n, ell)
        b = basis(n, ell)
        m = Multiplier.from_table(1.0 / (b.k2 + kappa**2))
        out = spectral_apply(f, m)
        scale = 1.0 / ((2 * math.pi / ell) ** 2 + kappa**2)
        assert np.max(np.abs(out.values - scale * f.values)) < 1e-13

    def test_inverse_laplacian_round_trip(self, rng):
        n, ell = 16, 1.0
        g = Field3(n, ell, rng.standard_normal(n**3) * 0.5)
        b = basis(n, ell)
        inv = np.zeros_like(b.k2)
        inv[b.k2 > 0] = 1.0 / b.k2[b.k2 > 0]
        v = spectral_apply(g, Multiplier.from_table(inv))
        back = spectral_apply(v, Multiplier.from_table(b.k2))
        assert np.max(np.abs(back.values - (g.values - g.values.mean()))) < 1e-10

    def test_shift_equivariance(self, rng):
        n, ell = 16, 1.0
        f = Field3(n, ell, rng.standard_normal(n**3))
        b = basis(n, ell)
        m = Multiplier.from_table(1.0 / (1.0 + b.k2))
        shifted_in = Field3.from_cube(np.roll(f.cube, (3, 1, 5), axis=(0, 1, 2)), ell)
        a = spectral_apply(shifted_in, m).cube
        bb = np.roll(spectral_apply(f, m).cube, (3, 1, 5), axis=(0, 1, 2))
        assert np.max(np.abs(a - bb)) < 1e-12

    def test_dimension_mismatch(self, rng):
        f = Field3(8, 1.0, rng.standard_normal(512))
        m = Multiplier(16, np.ones(16 * 16 * 9))
        with pytest.raises(ValueError):
            spectral_apply(f, m)


class TestGradNorms:
    def test_constant(self):
        assert grad_norm_integrals(Field3.constant(8, 1.0, 3.0)) == (0.0, 0.0)

    def test_cosine_dirichlet(self):
        # |grad cos(2 pi x)|^2 integrates to k^2/2 = 2 pi^2 on the unit torus
        f = cosine_field(32, 1.0)
        dirichlet, _ = grad_norm_integrals(f)
        assert dirichlet == pytest.approx(2 * math.pi**2, rel=1e-12)

    def test_tanh_ball_total_variation(self):
        # tanh profile of width >= 4h around a ball; the TV approximates the
        # surface area and must match the 1-d radial profile quadrature
        n, ell, r0 = 64, 1.0, 0.3
        w = 4.5 * ell / n

        def fn(x, y, z):
            r = np.sqrt((x - 0.5) ** 2 + (y - 0.5) ** 2 + (z - 0.5) ** 2)
            return 0.5 * (1.0 + np.tanh((r0 - r) / w))

        f = Field3.from_function(n, ell, fn)
        _, tv = grad_norm_integrals(f)
        rr = np.linspace(1e-4, 0.5, 20001)
        prof = 0.5 / w / np.cosh((r0 - rr) / w) ** 2
        oracle = float(np.trapezoid(prof * 4 * np.pi * rr**2, rr))
        area = 4 * math.pi * r0**2
        assert abs(tv - area) / area < 0.05
        assert abs(tv - oracle) / oracle < 0.025

    def test_gradient_fields_match_dirichlet(self, rng):
        # band-limited field: component route and Parseval route coincide
        # (they differ only in the Nyquist convention for odd derivatives)
        n, ell = 16, 1.0
        raw = Field3(n, ell, rng.standard_normal(n**3))
        b = basis(n, ell)
        lowpass = (b.k2 <= (2 * math.pi / ell * (n // 4)) ** 2).astype(float)
        f = spectral_apply(raw, Multiplier.from_table(lowpass))
        gx, gy, gz = gradient_fields(f)
        total = integrate(Field3(n, ell, gx.values**2 + gy.values**2 + gz.values**2))
        dirichlet, _ = grad_norm_integrals(f)
        assert total == pytest.approx(dirichlet, rel=1e-12)


class TestFieldInvariants:
    def test_bad_length(self):
        with pytest.raises(ValueError):
            Field3(8, 1.0, np.zeros(100))

    def test_nonfinite(self):
        vals = np.zeros(8**3)
        vals[3] = np.inf
        with pytest.raises(ValueError):
            Field3(8, 1.0, vals)

    def test_bad_ell(self):
        with pytest.raises(ValueError):
            Field3(8, 0.0, np.zeros(512))

    def test_min_image_radii(self):
        r = min_image_radii(8, 1.0)
        assert r[0, 0, 0] == 0.0
        assert r.max() == pytest.approx(math.sqrt(3) / 2, abs=1e-12)


class TestDumpLoad:
    def test_round_trip(self, rng, tmp_path):
        f = Field3(8, 1.5, rng.standard_normal(512))
        path = tmp_path / "field.f64"
        dump_field(path, f, epsilon=0.02, lam=1.5, kind="u")
        g, meta = load_field(path)
        assert np.array_equal(f.values, g.values)
        assert (g.n, g.ell) == (8, 1.5)
        sidecar = json.loads((tmp_path / "field.f64.json").read_text())
        assert set(sidecar) == {"n", "ell", "epsilon", "lambda", "kind"}
        assert sidecar["kind"] == "u"
        assert meta["lambda"] == 1.5

    def test_x_fastest_layout(self, tmp_path):
        # value at (x-index 1, y=z=0) must be the second stored float
        f = Field3.from_function(4, 1.0, lambda x, y, z: x + 10 * y + 100 * z)
        path = tmp_path / "layout.f64"
        dump_field(path, f, kind="u")
        raw = np.frombuffer(path.read_bytes(), dtype="<f8")
        assert raw[1] == pytest.approx(0.25)
        assert raw[4] == pytest.approx(2.5)  # first y step

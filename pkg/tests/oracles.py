"""Independent verification routines used as oracles by the tests.

Everything here is deliberately implemented from scratch (closed forms,
plain image sums, Monte-Carlo, scalar searches) so it shares no code path
with the spectral machinery it checks.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import erfc

C_CUBE = 2.380461862  # integral of 1/|y| over the centered unit cube


def plain_image_sum(x, kappa, ell, shells):
    """Triple-loop Yukawa lattice sum (1/4pi) sum exp(-kappa d)/d."""
    x = np.asarray(x, dtype=float)
    total = 0.0
    for i in range(-shells, shells + 1):
        for j in range(-shells, shells + 1):
            for k in range(-shells, shells + 1):
                d = math.sqrt((x[0] - i * ell) ** 2 + (x[1] - j * ell) ** 2
                              + (x[2] - k * ell) ** 2)
                total += math.exp(-kappa * d) / d
    return total / (4.0 * math.pi)


def yukawa_gaussian_potential(r, kappa, s):
    """Potential of a unit-mass Gaussian of width s under (-Delta + kappa^2).

    Closed form: (e^{s^2 k^2/2} / 8 pi r) [e^{-kr} erfc((sk - r/s)/sqrt2)
    - e^{kr} erfc((sk + r/s)/sqrt2)]; reduces to the Yukawa kernel as s -> 0.
    """
    r = np.asarray(r, dtype=float)
    pref = np.exp(0.5 * s * s * kappa * kappa) / (8.0 * np.pi * np.maximum(r, 1e-300))
    a = (s * kappa - r / s) / math.sqrt(2.0)
    b = (s * kappa + r / s) / math.sqrt(2.0)
    return pref * (np.exp(-kappa * r) * erfc(a) - np.exp(kappa * r) * erfc(b))


def periodized_gaussian_cube(n, ell, center, s, images=3):
    """Wrapped unit-mass Gaussian sampled on the grid."""
    ax = np.arange(n) / n * ell
    z, y, x = np.meshgrid(ax, ax, ax, indexing="ij")

    def fold(d):
        out = 0.0
        for o in range(-images, images + 1):
            out = out + np.exp(-((d - o * ell) ** 2) / (2 * s * s))
        return out

    rho = fold(x - center[0]) * fold(y - center[1]) * fold(z - center[2])
    return rho / (2 * np.pi * s * s) ** 1.5


def image_offsets(shells, ell, prune=True):
    off = np.arange(-shells, shells + 1) * ell
    oz, oy, ox = np.meshgrid(off, off, off, indexing="ij")
    offs = np.stack([ox.ravel(), oy.ravel(), oz.ravel()], axis=1)
    if prune:
        offs = offs[np.linalg.norm(offs, axis=1) <= (shells + 0.5) * ell]
    return offs


def golden_section(fn, a, b, tol=1e-5, polish=True):
    """Scalar minimization on [a, b] by golden-section search.

    Comparison-based bracketing cannot localize a smooth minimum below
    sqrt(machine eps), so the bracket result is polished with one
    parabolic-vertex step (spacing ~tol), which recovers ~1e-11 accuracy.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(400):
        if b - a < tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    x = 0.5 * (a + b)
    if polish:
        step = max(tol, 1e-5 * max(1.0, abs(x)))
        fl, fm, fr = fn(x - step), fn(x), fn(x + step)
        denom = fl - 2.0 * fm + fr
        if denom > 0:
            x = x + 0.5 * step * (fl - fr) / denom
    return x, fn(x)


def sample_ball(rng, count, radius, center=(0.0, 0.0, 0.0)):
    """Uniform points in a ball (exact radial inversion)."""
    u = rng.random(count)
    r = radius * np.cbrt(u)
    v = rng.standard_normal((count, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return r[:, None] * v + np.asarray(center)[None, :]


def mc_ball_coulomb(radius, pairs, seed=0, chunk=500_000):
    """Monte-Carlo estimate of (1/8pi) iint_{B_R x B_R} dx dy / |x - y|."""
    rng = np.random.default_rng(seed)
    vol = 4.0 / 3.0 * math.pi * radius**3
    acc = 0.0
    done = 0
    while done < pairs:
        m = min(chunk, pairs - done)
        x = sample_ball(rng, m, radius)
        y = sample_ball(rng, m, radius)
        acc += float(np.sum(1.0 / np.linalg.norm(x - y, axis=1)))
        done += m
    return vol * vol * acc / pairs / (8.0 * math.pi)


def finite_difference(fn, t):
    """Central first difference (fn(+t) - fn(-t)) / (2 t)."""
    return (fn(t) - fn(-t)) / (2.0 * t)

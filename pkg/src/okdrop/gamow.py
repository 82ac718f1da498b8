"""Whole-space liquid-drop (Gamow) energy for balls and axisymmetric
star-shaped competitors.

The energy of a set F is its perimeter P plus the Coulomb self-interaction
V = (1/8pi) iint 1/|x - y| over F x F; the figure of merit is the energy
per unit volume f = (P + V)/|F|.  Balls admit closed forms; general
axisymmetric shapes r(theta) = R (1 + sum a_l P_l(cos theta)) are handled
by a Legendre expansion of the kernel in which the radial double integral
is carried out in closed form, leaving one smooth double quadrature over
cos theta.  Dilation optimality enforces V/P = 1/2 exactly (equipartition).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import legder, leggauss, legval

F_STAR_LOWER = 3.0 ** (5.0 / 3.0) / 4.0
F_STAR_UPPER = 3.0 ** (5.0 / 3.0) * 2.0 ** (-2.0 / 3.0) * 5.0 ** (-1.0 / 3.0)
BALL_RADIUS_STAR = (15.0 / 2.0) ** (1.0 / 3.0)
ISOPERIMETRIC = (36.0 * math.pi) ** (1.0 / 3.0)


def f_star_bounds() -> tuple[float, float]:
    """Bracket for the optimal energy per unit volume.

    Lower bound 3^(5/3)/4 comes from equipartition, the isoperimetric
    inequality, and the volume bound |F*| <= 32 pi on the minimizer; the
    upper bound is the optimal ball value.
    """
    return F_STAR_LOWER, F_STAR_UPPER


@dataclass(frozen=True)
class DropEnergy:
    """Perimeter, Coulomb self-energy, volume, and derived ratios."""

    perimeter: float
    coulomb: float
    mass: float
    ratio: float
    equipartition_ratio: float
    coulomb_tail: float | None = None

    def __post_init__(self):
        if min(self.perimeter, self.coulomb, self.mass) <= 0:
            raise ValueError("nonempty shapes must have positive P, V, and volume")
        # universal lower bound on the energy per unit volume
        if self.ratio < F_STAR_LOWER - 1e-9:
            raise ValueError(f"energy ratio {self.ratio} below the universal lower bound")


@dataclass(frozen=True)
class StarShape:
    """Axisymmetric star-shaped region r(theta) = R (1 + sum_{l>=2} a_l P_l).

    a_0 is absorbed into R and a_1 (a translation at linear order) is
    excluded so dilation analysis is not contaminated.
    """

    base_radius: float
    legendre_coeffs: tuple = ()

    def __post_init__(self):
        coeffs = tuple(float(a) for a in self.legendre_coeffs)
        object.__setattr__(self, "legendre_coeffs", coeffs)
        if self.base_radius <= 0:
            raise ValueError("base radius must be positive")
        if len(coeffs) > 15:
            raise ValueError("at most Legendre degree 16 is supported")
        if any(abs(a) > 0.5 for a in coeffs):
            raise ValueError("coefficients must satisfy |a_l| <= 0.5")
        x = np.cos(np.linspace(0.0, np.pi, 512))
        if np.any(self.radius(x) <= 0):
            raise ValueError("radial profile must stay positive (star-shapedness)")

    @property
    def degree(self) -> int:
        return 1 + len(self.legendre_coeffs) if self.legendre_coeffs else 0

    def _series(self) -> np.ndarray:
        c = np.zeros(2 + len(self.legendre_coeffs))
        c[0] = 1.0
        c[2:] = self.legendre_coeffs
        return c

    def radius(self, x) -> np.ndarray:
        """r as a function of x = cos(theta)."""
        return self.base_radius * legval(np.asarray(x, dtype=np.float64), self._series())

    def radius_deriv(self, x) -> np.ndarray:
        """dr/dx at x = cos(theta)."""
        return self.base_radius * legval(np.asarray(x, dtype=np.float64), legder(self._series()))

    def dilate(self, t: float) -> "StarShape":
        return StarShape(self.base_radius * t, self.legendre_coeffs)


def ball_energy(radius: float) -> DropEnergy:
    """Closed forms for the ball: P = 4 pi R^2, V = (4 pi/15) R^5,
    |F| = (4/3) pi R^3, hence f = 3/R + R^2/5."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    per = 4.0 * math.pi * radius**2
    coul = (4.0 * math.pi / 15.0) * radius**5
    mass = (4.0 / 3.0) * math.pi * radius**3
    return DropEnergy(perimeter=per, coulomb=coul, mass=mass,
                      ratio=(per + coul) / mass, equipartition_ratio=coul / per)


def optimal_ball() -> tuple[float, float]:
    """Minimizer of f(R) = 3/R + R^2/5: R* = (15/2)^(1/3), f = 3^(5/3) 2^(-2/3) 5^(-1/3)."""
    return BALL_RADIUS_STAR, F_STAR_UPPER


def _legendre_rows(x: np.ndarray, lmax: int) -> np.ndarray:
    """P_l(x) for l = 0..lmax by the three-term recurrence, shape (lmax+1, len(x))."""
    rows = np.empty((lmax + 1, x.size))
    rows[0] = 1.0
    if lmax >= 1:
        rows[1] = x
    for l in range(1, lmax):
        rows[l + 1] = ((2 * l + 1) * x * rows[l] - l * rows[l - 1]) / (l + 1)
    return rows


def _radial_kernel(l: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Closed form of int_0^a int_0^b s^2 t^2 min^l / max^(l+1) ds dt.

    With A = min(a, b), B = max(a, b):
      l != 2:  A^(l+3) B^(2-l) / ((2-l)(l+3)) - (2l+1) A^5 / (5 (l+3)(2-l))
      l == 2:  2 A^5 / 25 + (A^5/5) log(B/A)
    """
    A = np.minimum(a, b)
    B = np.maximum(a, b)
    if l == 2:
        return A**5 * (0.4 + np.log(B / A)) / 5.0
    return (A ** (l + 3) * B ** (2 - l) / ((2 - l) * (l + 3))
            - (2 * l + 1) * A**5 / (5.0 * (l + 3) * (2 - l)))


def shape_energy(shape: StarShape, lmax_kernel: int = 32, n_angular: int = 512) -> DropEnergy:
    """Quadrature evaluation of P, V, |F| for an axisymmetric star shape.

    Volume and surface-of-revolution integrals are Gauss-Legendre in
    x = cos(theta).  The Coulomb term expands the kernel in Legendre
    polynomials; after the exact radial reduction each term is the smooth
    double sum (pi/2) sum_ij w_i w_j P_l(x_i) P_l(x_j) K_l(r_i, r_j).
    The reported tail estimate is the magnitude of the last retained term.
    """
    if lmax_kernel < 2 * shape.degree:
        raise ValueError("kernel truncation below twice the shape degree")
    x, w = leggauss(n_angular)
    r = shape.radius(x)
    rx = shape.radius_deriv(x)
    mass = 2.0 * math.pi / 3.0 * float(np.sum(w * r**3))
    per = 2.0 * math.pi * float(np.sum(w * r * np.sqrt(r**2 + (1.0 - x**2) * rx**2)))
    pl = _legendre_rows(x, lmax_kernel)
    a = r[:, None]
    b = r[None, :]
    # the pi/2 prefactor is (1/8pi) times the (2pi)^2 azimuthal integrations
    coul = 0.0
    tail = 0.0
    for l in range(lmax_kernel + 1):
        wp = w * pl[l]
        term = 0.5 * math.pi * float(wp @ _radial_kernel(l, a, b) @ wp)
        coul += term
        tail = abs(term)
    return DropEnergy(perimeter=per, coulomb=coul, mass=mass,
                      ratio=(per + coul) / mass, equipartition_ratio=coul / per,
                      coulomb_tail=tail)


def dilation_optimize(shape: StarShape, lmax_kernel: int = 32,
                      n_angular: int = 512) -> tuple[float, DropEnergy]:
    """Optimal dilation factor and the energy of the dilated shape.

    f(t . s) = (t^2 P + t^5 V)/(t^3 |F|) is minimized at t* = (P/(2V))^(1/3),
    where the equipartition identity V/P = 1/2 holds by construction.
    """
    base = shape_energy(shape, lmax_kernel=lmax_kernel, n_angular=n_angular)
    t = (base.perimeter / (2.0 * base.coulomb)) ** (1.0 / 3.0)
    per = t**2 * base.perimeter
    coul = t**5 * base.coulomb
    mass = t**3 * base.mass
    scaled = DropEnergy(perimeter=per, coulomb=coul, mass=mass,
                        ratio=(per + coul) / mass, equipartition_ratio=coul / per,
                        coulomb_tail=None if base.coulomb_tail is None else t**5 * base.coulomb_tail)
    return t, scaled

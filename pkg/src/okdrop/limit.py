"""The limit energy on measures, its closed-form minimizer, and the
threshold bracket.

The quadratic limit functional of the rescaled energies is

    E0(mu) = lam^2 ell^3 / (2 kappa^2)
           - (2/kappa^2) (lam - lam_c) mu(T)
           + 2 iint G(x - y) dmu dmu,

with G the screened kernel.  Over nonnegative measures it is minimized by
the zero measure when lam <= lam_c and by the uniform density
(lam - lam_c)/2 otherwise.  The threshold lam_c = 2^(-1/3) sigma^(2/3)
kappa^2 f* is known only through the bracket on the liquid-drop constant
f*, so every consumer works with a selectable lam_c and reports bands.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gamow
from ._kernels import dot as _dot
from .droplets import MeasureField
from .energy import WellPotential
from .greens import SCREENED, KernelSpec, solve
from .grid import integrate


def lambda_c_bracket(well: WellPotential) -> tuple[float, float]:
    """Threshold bracket 2^(-1/3) sigma^(2/3) kappa^2 * [f* bounds].

    For the quartic well this is (3/(4*2^(1/3)), 3/(2*5^(1/3))), i.e.
    (0.595275, 0.877205) -- printed elsewhere rounded to 0.5952 and 0.8773.
    """
    f_lo, f_hi = gamow.f_star_bounds()
    scale = 2.0 ** (-1.0 / 3.0) * well.sigma ** (2.0 / 3.0) * well.kappa**2
    return scale * f_lo, scale * f_hi


@dataclass(frozen=True)
class LimitParams:
    """Parameters of the limit energy with one chosen threshold value."""

    lam: float
    ell: float
    kappa: float
    lambda_c: float

    def __post_init__(self):
        if not (self.lam > 0 and self.ell > 0 and self.kappa > 0 and self.lambda_c > 0):
            raise ValueError("all limit parameters must be positive")

    @classmethod
    def from_well(cls, well: WellPotential, lam: float, ell: float,
                  which: str | float = "upper") -> "LimitParams":
        lo, hi = lambda_c_bracket(well)
        if which == "lower":
            lc = lo
        elif which == "upper":
            lc = hi
        else:
            lc = float(which)
        return cls(lam=lam, ell=ell, kappa=well.kappa, lambda_c=lc)


@dataclass(frozen=True)
class LimitMinimizer:
    """Closed-form minimizer: uniform density mbar, potential vbar, value."""

    mbar: float
    vbar: float
    e0min: float


def e0_uniform(m: float, lp: LimitParams) -> float:
    """Limit energy of the uniform density m >= 0.

    The double kernel integral reduces to m^2 ell^3 / kappa^2 because the
    kernel integrates to 1/kappa^2.
    """
    if m < 0:
        raise ValueError("density must be nonnegative")
    k2 = lp.kappa**2
    return lp.ell**3 * (lp.lam**2 / (2 * k2)
                        - 2 * (lp.lam - lp.lambda_c) * m / k2
                        + 2 * m**2 / k2)


def e0_measure(mu: MeasureField, lp: LimitParams) -> float:
    """Limit energy of a measure given by a density field.

    Evaluated through the associated potential v solving
    -Delta v + kappa^2 v = mu:
    E0 = lam^2 ell^3/(2 kappa^2) - 2 (lam - lam_c) int v + 2 int (|grad v|^2 + kappa^2 v^2),
    the last integral computed as int v dmu (the same discrete quadratic form).
    """
    rho = mu.density
    kern = KernelSpec(kappa=lp.kappa, ell=rho.ell, variant=SCREENED)
    v = solve(kern, rho)
    int_v = integrate(v)
    quad = rho.h**3 * _dot(rho.values, v.values)
    return (lp.lam**2 * lp.ell**3 / (2 * lp.kappa**2)
            - 2 * (lp.lam - lp.lambda_c) * int_v + 2 * quad)


def minimize_e0(lp: LimitParams) -> LimitMinimizer:
    """Unique minimizer over nonnegative measures.

    Zero measure for lam <= lam_c; uniform density (lam - lam_c)/2 with
    potential (lam - lam_c)/(2 kappa^2) above the threshold.  The minimal
    value is lam^2 ell^3/(2 kappa^2) on the first branch and
    lam_c (2 lam - lam_c) ell^3 / (2 kappa^2) on the second.
    """
    if lp.lam <= lp.lambda_c:
        return LimitMinimizer(mbar=0.0, vbar=0.0,
                              e0min=lp.lam**2 * lp.ell**3 / (2 * lp.kappa**2))
    mbar = 0.5 * (lp.lam - lp.lambda_c)
    return LimitMinimizer(
        mbar=mbar,
        vbar=mbar / lp.kappa**2,
        e0min=lp.lambda_c * (2 * lp.lam - lp.lambda_c) * lp.ell**3 / (2 * lp.kappa**2),
    )


def band_report(well: WellPotential, lam: float, ell: float) -> dict:
    """Threshold bracket plus minimizer bands, for JSON reports."""
    lo, hi = lambda_c_bracket(well)
    mins = [minimize_e0(LimitParams(lam=lam, ell=ell, kappa=well.kappa, lambda_c=lc))
            for lc in (lo, hi)]
    return {
        "lambda": lam,
        "lambda_c_lower": lo,
        "lambda_c_upper": hi,
        "mbar_band": sorted(m.mbar for m in mins),
        "e0min_band": sorted(m.e0min for m in mins),
    }

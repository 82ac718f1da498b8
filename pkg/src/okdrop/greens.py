"""Torus Green's functions via spectral multipliers and Yukawa lattice sums.

Three kernel variants share one interface: the zero-mean inverse Laplacian,
the screened (Yukawa) kernel with mass kappa^2, and the rescaled-torus
kernel whose mass is 4^(-2/3) kappa^2 eps^(2/3) sigma^(2/3).  The screened
kernels also have a real-space representation as a lattice sum of Yukawa
potentials, which serves as an independent evaluation route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import Field3, Multiplier, basis, integrate, min_image_radii, spectral_apply

UNSCREENED = "unscreened-zero-mean"
SCREENED = "screened"
RESCALED = "rescaled-eps"
_VARIANTS = (UNSCREENED, SCREENED, RESCALED)


@dataclass(frozen=True)
class KernelSpec:
    """Selects one torus kernel: variant, screening constant, torus side."""

    kappa: float
    ell: float
    variant: str = SCREENED
    eps: float | None = None
    sigma: float | None = None

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise ValueError(f"unknown kernel variant {self.variant!r}")
        if not self.ell > 0:
            raise ValueError("torus side must be positive")
        if self.variant in (SCREENED, RESCALED) and not self.kappa > 0:
            raise ValueError("screened kernels need kappa > 0")
        if self.variant == RESCALED and (self.eps is None or self.sigma is None):
            raise ValueError("rescaled-eps kernel needs eps and sigma")

    @property
    def mass(self) -> float:
        """Coefficient of the zeroth-order term in (-Delta + mass)."""
        if self.variant == UNSCREENED:
            return 0.0
        if self.variant == SCREENED:
            return self.kappa**2
        return 4.0 ** (-2.0 / 3.0) * self.kappa**2 * self.eps ** (2.0 / 3.0) * self.sigma ** (2.0 / 3.0)

    @property
    def decay(self) -> float:
        """Exponential decay rate of the real-space kernel."""
        if self.variant == UNSCREENED:
            raise ValueError("the unscreened kernel has no Yukawa representation")
        return math.sqrt(self.mass)


@dataclass(frozen=True)
class NearFarSplit:
    """Radial cutoff splitting a kernel at |x| ~ rho.

    The profile rises smoothly from 0 at |x| <= rho/2 to 1 at |x| >= rho
    (quintic smoothstep, C^2 and monotone).
    """

    rho: float

    def __post_init__(self):
        if not 0 < self.rho <= 0.25:
            raise ValueError("cutoff radius must lie in (0, 1/4]")

    def eta(self, r: np.ndarray) -> np.ndarray:
        t = np.clip((np.asarray(r, dtype=np.float64) - self.rho / 2) / (self.rho / 2), 0.0, 1.0)
        return t**3 * (10.0 + t * (-15.0 + 6.0 * t))


def multiplier(kernel: KernelSpec, n: int) -> Multiplier:
    """Diagonal Fourier representation of (-Delta + mass)^(-1).

    The unscreened variant zeroes the constant mode, i.e. it inverts the
    Laplacian on zero-mean data and projects the mean out.
    """
    b = basis(n, kernel.ell)
    if kernel.variant == UNSCREENED:
        table = np.zeros_like(b.k2)
        nonzero = b.k2 > 0
        table[nonzero] = 1.0 / b.k2[nonzero]
    else:
        table = 1.0 / (b.k2 + kernel.mass)
    return Multiplier.from_table(table)


def solve(kernel: KernelSpec, f: Field3) -> Field3:
    """Solve -Delta v (+ mass v) = f spectrally.

    For the unscreened variant the right-hand side is f minus its mean and
    the solution is zero-mean; otherwise the equation is solved as stated.
    """
    if abs(f.ell - kernel.ell) > 1e-12 * max(1.0, abs(kernel.ell)):
        raise ValueError(f"field torus side {f.ell} does not match kernel {kernel.ell}")
    return spectral_apply(f, multiplier(kernel, f.n))


def kernel_table(kernel: KernelSpec, n: int) -> Field3:
    """Grid kernel: the solve applied to a unit-mass grid Kronecker delta."""
    h = kernel.ell / n
    values = np.zeros(n**3)
    values[0] = 1.0 / h**3
    return solve(kernel, Field3(n, kernel.ell, values))


def default_shells(kernel: KernelSpec) -> int:
    """Smallest image-cube half-width whose next shell changes the sum
    by less than 1e-12 (certified by the Yukawa tail bound)."""
    rate = kernel.decay * kernel.ell
    s = max(2, math.ceil(12.0 / rate))
    while True:
        d = (s + 1 - math.sqrt(3.0) / 2.0) * kernel.ell  # closest point of shell s+1
        bound = (24 * (s + 1) ** 2 + 2) * math.exp(-kernel.decay * d) / (4 * math.pi * d)
        if bound < 1e-12:
            return s
        s += 1


def lattice_sum(kernel: KernelSpec, x, shells: int | None = None) -> float:
    """Real-space kernel value at x: (1/4pi) sum_images exp(-decay d)/d."""
    pts = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if pts.shape[-1] != 3:
        raise ValueError("x must be a 3-vector or (m, 3) array")
    frac = pts / kernel.ell - np.round(pts / kernel.ell)
    if np.any(np.linalg.norm(frac, axis=-1) * kernel.ell < 1e-12):
        raise ValueError("x coincides with a lattice point; the kernel is singular there")
    if shells is None:
        shells = default_shells(kernel)
    out = _kernels.yukawa_image_sum(pts, kernel.decay, kernel.ell, shells)
    return float(out[0]) if np.asarray(x).ndim == 1 else out


def mass_identity_check(kernel: KernelSpec, n: int) -> float:
    """Integrate the grid kernel over the torus; equals 1/mass for screened
    kernels because the constant mode of the discrete operator is exact."""
    if kernel.variant == UNSCREENED:
        raise ValueError("mass identity applies to screened kernels only")
    return integrate(kernel_table(kernel, n))


def split_kernels(kernel: KernelSpec, split: NearFarSplit, n: int) -> tuple[Field3, Field3]:
    """Partition the sampled kernel G into eta*G and (1-eta)*G.

    The first factor is bounded near the origin (eta vanishes there), the
    second is supported in |x| <= rho; they sum to the sampled kernel
    exactly, so every derived quantity splits exactly as well.
    """
    if kernel.ell / n * 4 > split.rho / 2:
        raise ValueError("under-resolved cutoff: need >= 4 cells across rho/2")
    table = kernel_table(kernel, n)
    eta = split.eta(min_image_radii(n, kernel.ell)).ravel()
    near = Field3(n, kernel.ell, table.values * eta)
    far = Field3(n, kernel.ell, table.values * (1.0 - eta))
    return near, far

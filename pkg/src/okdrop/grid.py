"""Periodic 3-d scalar fields, quadrature, and Fourier multipliers.

Fields are sampled on the uniform n^3 grid of the torus [0, ell)^3 with
spacing h = ell/n.  Storage is one flat float64 array in x-fastest order,
i.e. the C-order raveling of a (z, y, x) cube; raw dumps are therefore
reproducible byte for byte.  The real-to-complex transform runs along x.

Quadratic forms (Laplacian, inverse Laplacian, Dirichlet energies) use the
full wavenumber table including the Nyquist mode, so energies and gradients
come from one consistent discrete operator.  Odd-derivative component
fields zero the Nyquist mode instead, which keeps them real-valued.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
import scipy.fft as _fft

_FFT_WORKERS = 1


def set_fft_workers(workers: int) -> None:
    """Set the worker count for scipy's pocketfft (deterministic output)."""
    global _FFT_WORKERS
    _FFT_WORKERS = max(1, int(workers))


def get_fft_workers() -> int:
    return _FFT_WORKERS


@dataclass(frozen=True)
class Field3:
    """Real scalar field on the n^3 periodic grid of a torus of side ell."""

    n: int
    ell: float
    values: np.ndarray

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two grid points per axis")
        if not self.ell > 0:
            raise ValueError("torus side must be positive")
        vals = np.ascontiguousarray(self.values, dtype=np.float64).ravel()
        if vals.size != self.n**3:
            raise ValueError(f"values length {vals.size} is not n^3 = {self.n**3}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("field contains non-finite values")
        object.__setattr__(self, "values", vals)

    @property
    def h(self) -> float:
        return self.ell / self.n

    @property
    def cube(self) -> np.ndarray:
        """(z, y, x) view; C-order ravel restores x-fastest storage."""
        return self.values.reshape(self.n, self.n, self.n)

    def mean(self) -> float:
        return float(self.values.mean())

    @classmethod
    def from_cube(cls, cube: np.ndarray, ell: float) -> "Field3":
        cube = np.asarray(cube, dtype=np.float64)
        if cube.ndim != 3 or len(set(cube.shape)) != 1:
            raise ValueError("cube must be n x n x n")
        return cls(cube.shape[0], float(ell), np.ascontiguousarray(cube).ravel())

    @classmethod
    def constant(cls, n: int, ell: float, value: float) -> "Field3":
        return cls(n, ell, np.full(n**3, float(value)))

    @classmethod
    def from_function(cls, n: int, ell: float, fn) -> "Field3":
        """Sample fn(x, y, z) at the grid points (arrays broadcast together)."""
        x, y, z = coordinate_axes(n, ell)
        return cls.from_cube(fn(x[None, None, :], y[None, :, None], z[:, None, None]), ell)


@dataclass(frozen=True)
class Multiplier:
    """Real Fourier multiplier over the half-spectrum of the real transform."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        expected = self.n * self.n * (self.n // 2 + 1)
        coeffs = np.ascontiguousarray(self.coeffs, dtype=np.float64).ravel()
        if coeffs.size != expected:
            raise ValueError(f"coeffs length {coeffs.size} is not n*n*(n//2+1) = {expected}")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("multiplier contains non-finite values")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def table(self) -> np.ndarray:
        return self.coeffs.reshape(self.n, self.n, self.n // 2 + 1)

    @classmethod
    def from_table(cls, table: np.ndarray) -> "Multiplier":
        table = np.asarray(table, dtype=np.float64)
        return cls(table.shape[0], np.ascontiguousarray(table).ravel())


def coordinate_axes(n: int, ell: float):
    """The three coordinate samplings (identical 1-d arrays i*h)."""
    ax = np.arange(n) * (ell / n)
    return ax, ax.copy(), ax.copy()


class _Basis:
    """Cached wavenumber tables for one (n, ell) grid."""

    def __init__(self, n: int, ell: float):
        self.n, self.ell = n, ell
        h = ell / n
        k_full = 2.0 * np.pi * np.fft.fftfreq(n, d=h)
        k_half = 2.0 * np.pi * np.fft.rfftfreq(n, d=h)
        kz, ky, kx = np.meshgrid(k_full, k_full, k_half, indexing="ij")
        self.k2 = kz**2 + ky**2 + kx**2
        # odd derivatives drop the (signless) Nyquist mode
        kd_full = k_full.copy()
        kd_half = k_half.copy()
        if n % 2 == 0:
            kd_full[n // 2] = 0.0
            kd_half[-1] = 0.0
        self.kx_odd = kd_half[None, None, :]
        self.ky_odd = kd_full[None, :, None]
        self.kz_odd = kd_full[:, None, None]
        # Parseval weights: interior x-modes appear twice in the full spectrum
        w = np.full(self.k2.shape, 2.0)
        w[..., 0] = 1.0
        if n % 2 == 0:
            w[..., -1] = 1.0
        self.parseval = w


@lru_cache(maxsize=16)
def basis(n: int, ell: float) -> _Basis:
    return _Basis(n, float(ell))


def rfftn(cube: np.ndarray) -> np.ndarray:
    return _fft.rfftn(cube, workers=_FFT_WORKERS)


def irfftn(spec: np.ndarray, n: int) -> np.ndarray:
    return _fft.irfftn(spec, s=(n, n, n), workers=_FFT_WORKERS)


def integrate(f: Field3) -> float:
    """h^3 * sum(values); exact for trigonometric polynomials below Nyquist.

    numpy's pairwise summation makes the reduction order deterministic.
    """
    return f.h**3 * float(f.values.sum())


def spectral_apply(f: Field3, m: Multiplier) -> Field3:
    """Apply a diagonal Fourier multiplier; the output is real."""
    if f.n != m.n:
        raise ValueError(f"field (n={f.n}) and multiplier (n={m.n}) do not match")
    out = irfftn(rfftn(f.cube) * m.table, f.n)
    return Field3(f.n, f.ell, out.ravel())


def parseval_quadratic(f: Field3, weight_table: np.ndarray) -> float:
    """sum_k weight(k) |f_hat(k)|^2 converted to a torus integral."""
    b = basis(f.n, f.ell)
    spec = rfftn(f.cube)
    total = float(np.sum(b.parseval * weight_table * (spec.real**2 + spec.imag**2)))
    return total * f.h**3 / f.n**3


def gradient_fields(f: Field3):
    """Spectral gradient components (Nyquist zeroed to keep them real)."""
    b = basis(f.n, f.ell)
    spec = rfftn(f.cube)
    gx = irfftn(1j * b.kx_odd * spec, f.n)
    gy = irfftn(1j * b.ky_odd * spec, f.n)
    gz = irfftn(1j * b.kz_odd * spec, f.n)
    return (Field3(f.n, f.ell, gx.ravel()),
            Field3(f.n, f.ell, gy.ravel()),
            Field3(f.n, f.ell, gz.ravel()))


def grad_norm_integrals(f: Field3) -> tuple[float, float]:
    """(integral of |grad f|^2, integral of |grad f|).

    The quadratic part sums k^2 |f_hat|^2 (exact for band-limited fields).
    The total-variation part uses centered differences: |.| is non-smooth,
    so this one is first-order accurate only.
    """
    b = basis(f.n, f.ell)
    dirichlet = parseval_quadratic(f, b.k2)
    cube = f.cube
    inv2h = 1.0 / (2.0 * f.h)
    gx = (np.roll(cube, -1, axis=2) - np.roll(cube, 1, axis=2)) * inv2h
    gy = (np.roll(cube, -1, axis=1) - np.roll(cube, 1, axis=1)) * inv2h
    gz = (np.roll(cube, -1, axis=0) - np.roll(cube, 1, axis=0)) * inv2h
    tv = float(np.sqrt(gx**2 + gy**2 + gz**2).sum()) * f.h**3
    return dirichlet, tv


def min_image_radii(n: int, ell: float) -> np.ndarray:
    """Cube of distances from the origin under the minimum-image convention."""
    ax = np.arange(n) * (ell / n)
    ax = np.minimum(ax, ell - ax)
    z, y, x = np.meshgrid(ax, ax, ax, indexing="ij")
    return np.sqrt(x**2 + y**2 + z**2)


def dump_field(path, f: Field3, *, epsilon: float | None = None,
               lam: float | None = None, kind: str = "u") -> None:
    """Raw little-endian float64 dump (x fastest) plus a JSON sidecar."""
    path = Path(path)
    path.write_bytes(f.values.astype("<f8").tobytes())
    sidecar = {"n": f.n, "ell": f.ell, "epsilon": epsilon, "lambda": lam, "kind": kind}
    path.with_suffix(path.suffix + ".json").write_text(json.dumps(sidecar, sort_keys=True))


def load_field(path) -> tuple[Field3, dict]:
    path = Path(path)
    meta = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    values = np.frombuffer(path.read_bytes(), dtype="<f8").astype(np.float64)
    return Field3(int(meta["n"]), float(meta["ell"]), values), meta

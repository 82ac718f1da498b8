"""Mass-constrained gradient-flow minimization of the diffuse energy.

Semi-implicit spectral splitting: the Laplacian and a stabilizing term
S*u go implicit, the well force W'(u) - S*u and the nonlocal potential v
stay explicit.  With S at least the well curvature over the visited range
the scheme dissipates energy for any step size, so dt trades accuracy for
speed only.  The mean constraint is enforced exactly each step by pinning
the constant Fourier mode to the background density.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels
from .droplets import ball_array_field
from .energy import EnergyReport, ModelParams, _warn_if_unresolved, diffuse_energy
from .gamow import BALL_RADIUS_STAR
from .grid import Field3, basis, irfftn, load_field, rfftn


class FlowDivergenceError(RuntimeError):
    """The energy kept increasing after exhausting the step-size halvings."""


class TraceRow(NamedTuple):
    step: int
    energy: float
    lagrange: float
    sup_grad: float


@dataclass(frozen=True)
class InitSpec:
    """Flow initialization: constant-plus-noise, ball-array, or from-file.

    ball-array radius is in droplet-scale units; None picks the radius that
    matches the optimal limit mass at the upper threshold estimate (capped
    at the near-optimal drop radius).
    """

    kind: str = "constant-plus-noise"
    amplitude: float = 0.01
    count: int = 1
    radius: float | None = None
    path: str | None = None

    def __post_init__(self):
        if self.kind not in ("constant-plus-noise", "ball-array", "from-file"):
            raise ValueError(f"unknown init kind {self.kind!r}")
        if self.kind == "from-file" and not self.path:
            raise ValueError("from-file init needs a path")


@dataclass(frozen=True)
class FlowConfig:
    """Time step, stopping thresholds, stabilizer, seed, and initialization.

    dt = None uses the conservative default 0.1 * eps^2; the stabilizer
    default is max(2, sup W'' over [-1.2, 1.2]).  grad_tol stops on the
    sup-norm of the constrained gradient; energy_tol (when positive) stops
    once the per-step energy decrease falls below it.
    """

    dt: float | None = None
    max_steps: int = 10000
    grad_tol: float = 1e-5
    energy_tol: float = 0.0
    stabilizer: float | None = None
    seed: int = 0
    init: InitSpec = field(default_factory=InitSpec)

    def __post_init__(self):
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")


@dataclass(frozen=True)
class MinimizerResult:
    u: Field3
    trace: tuple
    converged: bool
    report: EnergyReport

    @property
    def energies(self) -> np.ndarray:
        return np.array([row.energy for row in self.trace])


def default_stabilizer(p: ModelParams) -> float:
    probe = np.linspace(-1.2, 1.2, 481)
    return max(2.0, float(np.max(p.well.w2(probe))))


def initial_field(n: int, p: ModelParams, cfg: FlowConfig) -> Field3:
    """Build the starting configuration (mean pinned exactly afterwards)."""
    init = cfg.init
    if init.kind == "from-file":
        u, _ = load_field(init.path)
        return u
    if init.kind == "constant-plus-noise":
        if not init.amplitude < 1.0 + p.ubar:
            raise ValueError("noise amplitude must keep u inside the physical range")
        rng = np.random.default_rng(cfg.seed)
        noise = rng.uniform(-1.0, 1.0, n**3) * init.amplitude
        noise -= noise.mean()
        return Field3(n, p.ell, p.ubar + noise)
    # ball-array seeding in droplet-scale units
    radius = init.radius
    if radius is None:
        from .limit import lambda_c_bracket

        _, lam_c_hi = lambda_c_bracket(p.well)
        target = 0.5 * max(p.lam - lam_c_hi, 0.05) * p.ell**3 * p.eps ** (2.0 / 3.0)
        radius = min((3.0 * target / (4.0 * np.pi * init.count)) ** (1.0 / 3.0)
                     / p.rescaled_to_physical(1.0), BALL_RADIUS_STAR)
    chi = ball_array_field(n, p.ell, p.rescaled_to_physical(radius), init.count)
    frac = chi.values.mean()
    background = (p.ubar - frac) / (1.0 - frac)
    if background <= -1.0 - 0.25:
        raise ValueError("seeded balls carry too much mass for the background")
    return Field3(n, p.ell, np.where(chi.values > 0.5, 1.0, background))


def minimize(p: ModelParams, cfg: FlowConfig, n: int = 64) -> MinimizerResult:
    """Relax toward a critical point of the diffuse energy at fixed mean.

    Stops when the sup-norm of the constrained gradient reaches grad_tol
    (converged), when the per-step decrease drops below energy_tol if one
    was set (converged), or at max_steps (not converged).  Ten consecutive
    energy increases halve dt; more than eight halvings abort.
    """
    if p.well.name != "quartic":
        raise NotImplementedError("the flow is implemented for the quartic well")
    b = basis(n, p.ell)
    h3 = (p.ell / n) ** 3
    n3 = n**3
    dt = cfg.dt if cfg.dt is not None else 0.1 * p.eps**2
    stab = cfg.stabilizer if cfg.stabilizer is not None else default_stabilizer(p)
    u_field = initial_field(n, p, cfg)
    _warn_if_unresolved(u_field, p)

    zero_mode = p.ubar * n3
    uh = rfftn(u_field.cube)
    uh[0, 0, 0] = zero_mode
    u = irfftn(uh, n).ravel()

    minv = np.zeros_like(b.k2)
    nz = b.k2 > 0
    minv[nz] = 1.0 / b.k2[nz]
    denom = 1.0 + dt * (stab + p.eps**2 * b.k2)

    trace = []
    prev_energy = np.inf
    increase_streak = 0
    halvings = 0
    converged = False
    for step in range(cfg.max_steps):
        vh = uh * minv
        vh[0, 0, 0] = 0.0
        v = irfftn(vh, n).ravel()
        wprime, w_sum, wp_sum = _kernels.quartic_terms(u)
        neg_lap = irfftn(p.eps**2 * b.k2 * uh, n).ravel()

        dirichlet = float(np.sum(b.parseval * b.k2 * (uh.real**2 + uh.imag**2))) * h3 / n3
        energy = 0.5 * p.eps**2 * dirichlet + h3 * w_sum \
            + 0.5 * h3 * _kernels.dot(u - p.ubar, v)
        lagrange = (wp_sum + float(v.sum())) / n3
        sup_grad = _kernels.residual_sup(neg_lap, wprime, v, lagrange)
        trace.append(TraceRow(step, energy, lagrange, sup_grad))

        if sup_grad <= cfg.grad_tol:
            converged = True
            break
        decrease = prev_energy - energy
        if step > 0 and decrease < -1e-12 * max(1.0, abs(energy)):
            increase_streak += 1
            if increase_streak >= 10:
                halvings += 1
                if halvings > 8:
                    raise FlowDivergenceError(
                        f"energy rose for 10 consecutive steps at step {step} "
                        f"after {halvings - 1} dt halvings (E = {energy:.6e})")
                dt *= 0.5
                denom = 1.0 + dt * (stab + p.eps**2 * b.k2)
                increase_streak = 0
        else:
            increase_streak = 0
        if step > 0 and cfg.energy_tol > 0 and 0 <= decrease < cfg.energy_tol:
            converged = True
            break
        prev_energy = energy

        rhs = _kernels.explicit_combine(u, wprime, v, dt, stab)
        uh = rfftn(rhs.reshape(n, n, n))
        uh /= denom
        uh[0, 0, 0] = zero_mode
        u = irfftn(uh, n).ravel()

    u_field = Field3(n, p.ell, u)
    report = diffuse_energy(u_field, p)
    return MinimizerResult(u=u_field, trace=tuple(trace), converged=converged,
                           report=report)


def el_residual(u: Field3, p: ModelParams) -> float:
    """sup-norm of the Euler-Lagrange residual -eps^2 Lap u + W'(u) + v - Lambda."""
    from .energy import diffuse_gradient

    g, _ = diffuse_gradient(u, p)
    return float(np.max(np.abs(g.values)))


def write_trace_csv(path, result: MinimizerResult, p: ModelParams) -> None:
    scale = p.eps ** (-4.0 / 3.0)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "energy", "rescaled_energy", "lagrange", "sup_grad"])
        for row in result.trace:
            writer.writerow([row.step, repr(row.energy), repr(row.energy * scale),
                             repr(row.lagrange), repr(row.sup_grad)])

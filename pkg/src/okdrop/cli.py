"""Experiment orchestration: single runs, parameter sweeps, liquid-drop
analyses, kernel self-checks, and report emission.

One JSON config document drives everything (single parser, bit-exact
replay).  Every command writes a self-describing ``report.json`` into the
output directory; runs are deterministic given config, seed, and thread
count, with only the timestamp differing between replays.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import droplets, flow, gamow, limit
from .energy import ModelParams, sharp_energy
from .greens import SCREENED, KernelSpec, NearFarSplit, kernel_table, lattice_sum, mass_identity_check, split_kernels
from .grid import dump_field, integrate, min_image_radii, set_fft_workers

COMMANDS = ("minimize", "sweep-lambda", "sweep-eps", "gamow", "greens-check",
            "e0-report", "ball-array")


@dataclass
class RunConfig:
    command: str
    eps: float = 0.02
    lam: float = 1.0
    ell: float = 1.0
    n: int = 64
    flow: dict = field(default_factory=dict)
    sweep: list = field(default_factory=list)
    lambda_c: str | float = "upper"
    ball: dict = field(default_factory=dict)
    greens: dict = field(default_factory=dict)
    gamow: dict = field(default_factory=dict)
    output_dir: str = "out"
    threads: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}; choose from {COMMANDS}")
        if self.sweep:
            vals = list(self.sweep)
            if any(v <= 0 for v in vals) or vals != sorted(vals):
                raise ValueError("sweep values must be positive and sorted")

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        params = dict(doc.get("params", {}))
        return cls(
            command=doc["command"],
            eps=float(params.get("eps", 0.02)),
            lam=float(params.get("lambda", params.get("lam", 1.0))),
            ell=float(params.get("ell", 1.0)),
            n=int(params.get("n", 64)),
            flow=dict(doc.get("flow", {})),
            sweep=list(doc.get("sweep", [])),
            lambda_c=doc.get("lambda_c", "upper"),
            ball=dict(doc.get("ball", {})),
            greens=dict(doc.get("greens", {})),
            gamow=dict(doc.get("gamow", {})),
            output_dir=doc.get("output_dir", "out"),
            threads=int(doc.get("threads", 1)),
            seed=int(doc.get("seed", 0)),
        )

    @classmethod
    def from_json(cls, path) -> "RunConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def model_params(self, *, eps: float | None = None, lam: float | None = None) -> ModelParams:
        return ModelParams(eps=eps if eps is not None else self.eps,
                           lam=lam if lam is not None else self.lam, ell=self.ell)


def _resolve_lambda_c(cfg: RunConfig, p: ModelParams) -> float:
    lo, hi = limit.lambda_c_bracket(p.well)
    if cfg.lambda_c == "lower":
        return lo
    if cfg.lambda_c == "upper":
        return hi
    return float(cfg.lambda_c)


def _resolve_init(cfg: RunConfig, p: ModelParams) -> flow.InitSpec:
    """Turn the config's init block into a concrete InitSpec.

    kind == "auto" seeds droplets above the upper threshold estimate and
    relaxes plain noise below it.
    """
    doc = dict(cfg.flow.get("init", {"kind": "auto"}))
    kind = doc.get("kind", "auto")
    if kind == "auto":
        _, hi = limit.lambda_c_bracket(p.well)
        if p.lam > hi:
            return flow.InitSpec(kind="ball-array", count=int(doc.get("count", 1)))
        return flow.InitSpec(kind="constant-plus-noise",
                             amplitude=float(doc.get("amplitude", 0.01)))
    return flow.InitSpec(
        kind=kind,
        amplitude=float(doc.get("amplitude", 0.01)),
        count=int(doc.get("count", 1)),
        radius=None if doc.get("radius") is None else float(doc["radius"]),
        path=doc.get("path"),
    )


def _flow_config(cfg: RunConfig, p: ModelParams) -> flow.FlowConfig:
    doc = cfg.flow
    return flow.FlowConfig(
        dt=None if doc.get("dt") is None else float(doc["dt"]),
        max_steps=int(doc.get("max_steps", 10000)),
        grad_tol=float(doc.get("grad_tol", 1e-5)),
        energy_tol=float(doc.get("energy_tol", 0.0)),
        stabilizer=None if doc.get("stabilizer") is None else float(doc["stabilizer"]),
        seed=int(doc.get("seed", cfg.seed)),
        init=_resolve_init(cfg, p),
    )


def _echo(cfg: RunConfig) -> dict:
    doc = asdict(cfg)
    doc["params"] = {"eps": cfg.eps, "lambda": cfg.lam, "ell": cfg.ell, "n": cfg.n}
    return doc


def _single_minimize(cfg: RunConfig, p: ModelParams, out: Path) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    result = flow.minimize(p, _flow_config(cfg, p), n=cfg.n)
    chi = droplets.threshold_sign(result.u)
    ds = droplets.label_components(chi, eps=p.eps)
    mu = droplets.measure_of(result.u, p, variant="thresholded")
    flow.write_trace_csv(out / "energy_trace.csv", result, p)
    droplets.write_droplets_csv(out / "droplets.csv", ds)
    dump_field(out / "u.f64", result.u, epsilon=p.eps, lam=p.lam, kind="u")
    summary = {
        "converged": result.converged,
        "steps": len(result.trace),
        "energy": result.report.to_dict(),
        "rescaled_energy": result.report.rescaled,
        "trivial_rescaled_exact": result.report.trivial_reference * p.eps ** (-4.0 / 3.0),
        "trivial_rescaled_limit": p.lam**2 * p.ell**3,
        "limit_band": limit.band_report(p.well, p.lam, p.ell),
        "droplets": droplets.droplet_diagnostics(ds, p),
        "measure_total_thresholded": mu.total,
        "final_sup_grad": result.trace[-1].sup_grad,
    }
    return summary


def _cmd_minimize(cfg: RunConfig, out: Path) -> dict:
    return _single_minimize(cfg, cfg.model_params(), out)


def _cmd_sweep(cfg: RunConfig, out: Path, over: str) -> dict:
    values = cfg.sweep
    if not values:
        raise ValueError("sweep command needs a nonempty sweep list")

    def one(value: float) -> dict:
        p = cfg.model_params(**{("lam" if over == "lambda" else "eps"): value})
        sub = out / f"{over}_{value:g}"
        summary = _single_minimize(cfg, p, sub)
        summary[over] = value
        return summary

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            runs = list(pool.map(one, values))
    else:
        runs = [one(v) for v in values]
    return {"sweep_over": over, "values": list(values), "runs": runs}


def _cmd_greens_check(cfg: RunConfig, out: Path) -> dict:
    doc = cfg.greens
    p = cfg.model_params()
    kappa = float(doc.get("kappa", p.well.kappa))
    n = int(doc.get("n", cfg.n))
    n_points = int(doc.get("points", 10))
    kern = KernelSpec(kappa=kappa, ell=cfg.ell, variant=SCREENED)

    mass = mass_identity_check(kern, n)

    # lattice sum against the grid kernel on two grids (first-order
    # Richardson handles the slowly converging symmetry-plane points)
    coarse = kernel_table(kern, n).cube
    fine = kernel_table(kern, 2 * n).cube
    rng = np.random.default_rng(cfg.seed)
    devs = []
    while len(devs) < n_points:
        idx = rng.integers(0, n, size=3)
        x = idx * (cfg.ell / n)
        r = np.linalg.norm(np.minimum(x, cfg.ell - x))
        if r < 0.15 * cfg.ell:
            continue
        spectral = 2.0 * fine[2 * idx[2], 2 * idx[1], 2 * idx[0]] - coarse[idx[2], idx[1], idx[0]]
        devs.append(abs(spectral - lattice_sum(kern, x)))

    split = NearFarSplit(rho=float(doc.get("rho", 0.25)))
    near, far = split_kernels(kern, split, n)
    table = kernel_table(kern, n)
    partition_dev = float(np.max(np.abs(near.values + far.values - table.values)))
    radii = min_image_radii(n, cfg.ell).ravel()
    support_dev = float(np.max(np.abs(far.values[radii > split.rho]), initial=0.0))
    split_integral = integrate(near) + integrate(far)

    return {
        "kappa": kappa,
        "n": n,
        "mass_identity": mass,
        "mass_identity_target": 1.0 / kappa**2,
        "mass_identity_dev": abs(mass - 1.0 / kappa**2),
        "lattice_vs_spectral_max_dev": max(devs),
        "lattice_vs_spectral_points": n_points,
        "split_partition_max_dev": partition_dev,
        "split_far_support_dev": support_dev,
        "split_integral": split_integral,
        "split_integral_dev": abs(split_integral - 1.0 / kappa**2),
    }


def _cmd_gamow(cfg: RunConfig, out: Path) -> dict:
    doc = cfg.gamow
    lmax = int(doc.get("lmax", 32))
    shape_docs = doc.get("shapes") or [
        {"R": 1.0, "coeffs": []},
        {"R": gamow.BALL_RADIUS_STAR, "coeffs": []},
        {"R": 1.0, "coeffs": [0.1]},
        {"R": 1.0, "coeffs": [0.1, -0.05, 0.02]},
        {"R": 2.0, "coeffs": [-0.08, 0.0, 0.04]},
    ]
    entries = []
    for sd in shape_docs:
        shape = gamow.StarShape(float(sd["R"]), tuple(sd.get("coeffs", [])))
        de = gamow.shape_energy(shape, lmax_kernel=max(lmax, 2 * shape.degree))
        entries.append({
            "R": shape.base_radius,
            "coeffs": list(shape.legendre_coeffs),
            "P": de.perimeter,
            "V": de.coulomb,
            "mass": de.mass,
            "f": de.ratio,
            "equipartition_ratio": de.equipartition_ratio,
        })
    (out / "shapes.json").write_text(json.dumps(entries, indent=2, sort_keys=True))
    r_star, f_ball = gamow.optimal_ball()
    lo, hi = gamow.f_star_bounds()
    return {
        "R_star": r_star,
        "f_ball": f_ball,
        "f_star_bounds": [lo, hi],
        "lambda_c_bracket_quartic": list(limit.lambda_c_bracket(cfg.model_params().well)),
        "shapes": entries,
    }


def _cmd_e0_report(cfg: RunConfig, out: Path) -> dict:
    p = cfg.model_params()
    return limit.band_report(p.well, p.lam, p.ell)


def _cmd_ball_array(cfg: RunConfig, out: Path) -> dict:
    p = cfg.model_params()
    chi, report, meta = ball_array(cfg, p)
    ds = droplets.label_components(chi, eps=p.eps)
    droplets.write_droplets_csv(out / "droplets.csv", ds)
    dump_field(out / "chi.f64", chi, epsilon=p.eps, lam=p.lam, kind="chi")
    meta.update({
        "energy": report.to_dict(),
        "rescaled_energy": report.rescaled,
        "limit_band": limit.band_report(p.well, p.lam, p.ell),
        "droplet_count": ds.count,
        "measure_total": p.eps ** (-2.0 / 3.0) * integrate(chi),
    })
    return meta


def ball_array(cfg: RunConfig, p: ModelParams):
    """Construct a periodic ball array and evaluate its sharp energy.

    count_per_axis k places k^3 balls; a null radius picks the one whose
    total mass matches the optimal limit density at the selected threshold.
    Returns (indicator field, energy report, construction metadata).
    """
    doc = cfg.ball
    k = int(doc.get("count_per_axis", 1))
    count = int(doc.get("count", k**3))
    lam_c = _resolve_lambda_c(cfg, p)
    radius_rescaled = doc.get("radius_rescaled")
    if radius_rescaled is None:
        if p.lam <= lam_c:
            raise ValueError("mass-matched radius needs lambda above lambda_c")
        target = 0.5 * (p.lam - lam_c) * p.ell**3 * p.eps ** (2.0 / 3.0)
        radius_phys = (3.0 * target / (4.0 * np.pi * count)) ** (1.0 / 3.0)
        radius_rescaled = radius_phys / p.rescaled_to_physical(1.0)
    else:
        radius_rescaled = float(radius_rescaled)
        radius_phys = p.rescaled_to_physical(radius_rescaled)
    chi = droplets.ball_array_field(cfg.n, p.ell, radius_phys, count)
    report = sharp_energy(chi, p)
    meta = {
        "count": count,
        "count_per_axis": k,
        "radius_rescaled": radius_rescaled,
        "radius_physical": radius_phys,
        "lambda_c_used": lam_c,
    }
    return chi, report, meta


_DISPATCH = {
    "minimize": _cmd_minimize,
    "sweep-lambda": lambda cfg, out: _cmd_sweep(cfg, out, "lambda"),
    "sweep-eps": lambda cfg, out: _cmd_sweep(cfg, out, "eps"),
    "gamow": _cmd_gamow,
    "greens-check": _cmd_greens_check,
    "e0-report": _cmd_e0_report,
    "ball-array": _cmd_ball_array,
}


def run(cfg: RunConfig) -> int:
    """Execute one config; write report.json and artifacts; 0 on success."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    set_fft_workers(cfg.threads)
    try:
        body = _DISPATCH[cfg.command](cfg, out)
        report = {"command": cfg.command, "config": _echo(cfg), "result": body,
                  "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S")}
        (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True))
        return 0
    except Exception as exc:  # noqa: BLE001 - converted to a machine-readable report
        report = {"command": cfg.command, "config": _echo(cfg),
                  "error": {"type": type(exc).__name__, "message": str(exc)},
                  "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S")}
        (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True))
        return 1


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(prog="okdrop",
                                     description="Ohta-Kawasaki droplet laboratory")
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--output", default=None, help="output directory (overrides config)")
    parser.add_argument("--threads", type=int, default=None, help="worker threads (overrides config)")
    parser.add_argument("--seed", type=int, default=None, help="RNG seed (overrides config)")
    args = parser.parse_args(argv)
    cfg = RunConfig.from_json(args.config)
    if args.output is not None:
        cfg.output_dir = args.output
    if args.threads is not None:
        cfg.threads = args.threads
    if args.seed is not None:
        cfg.seed = args.seed
    sys.exit(run(cfg))

"""Command-line front end.

    gwfql sensitivity  [--config PATH] [--out DIR]
    gwfql radiation    [--config PATH] [--out DIR]
    gwfql decohere     [--config PATH] [--out DIR] [--threads N]
    gwfql reciprocity  [--config PATH] [--out DIR] [--threads N]
    gwfql sky-check    [--config PATH] [--out DIR]

Exit codes: 0 ok, 1 a relation check failed, 2 bad config, 3 numerical error.
Every JSON number is written as ``{"value": ..., "unit": ...}``.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import bath as _bath
from . import radiation as _rad
from .config import ConfigError, RunConfig, load_config
from .opensys import (
    CatStateSpec,
    LindbladGenerator,
    build_cat_state,
    evolve_for,
    fit_trajectory,
    trajectory_visibility,
)
from .qfim import UNBOUNDED, GeneratorModel, qcrb_bound, qfim_spectrum
from .sky import Direction, SkyQuadrature, _triad, polarization_tensors, tau_xx_squared_array, tt_projector_xxxx
from .spectra import mizuno_bound, sql_strain_psd

EXIT_OK, EXIT_RELATION, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

MIZUNO_RTOL = 1e-4
DECOHERENCE_RTOL = 0.02
TRUNCATION_RTOL = 0.005
SKY_RTOL = 1e-6
RECIPROCITY_TOL = {
    "a_qcrb_times_F": 1e-14,
    "b_power_density": 1e-12,
    "c_diffusion_density": 1e-13,
    "d_decoherence_density": 1e-13,
    "e_simulated_decoherence": DECOHERENCE_RTOL,
}
N_RANDOM_POINTS = 1000


class RelationFailure(Exception):
    pass


def q(value, unit: str) -> dict:
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            value = None
    return {"value": value, "unit": unit}


def _fmt(v: float) -> str:
    return f"{v:.16e}"


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# sensitivity ---------------------------------------------------------------


def mizuno_summary(cfg: RunConfig) -> dict:
    model = cfg.detector_model()
    psd = cfg.noise_spectrum(model)
    area = qfim_spectrum(psd, GeneratorModel(model, tau_xx_sq=1.0)).integrate()
    bound = mizuno_bound(model)
    ratio = area / bound if bound > 0 else math.nan
    coherent = model.squeeze_r == 0 and bound > 0
    passed = bool(abs(ratio - 1.0) <= MIZUNO_RTOL) if coherent else None
    return {"area": area, "bound": bound, "ratio": ratio, "coherent": coherent, "passed": passed}


def cmd_sensitivity(cfg: RunConfig, out: Path, threads: int = 1) -> int:
    model = cfg.detector_model()
    psd = cfg.noise_spectrum(model)
    gen = GeneratorModel(model, cfg.signal_direction(), cfg.signal.polarization)
    F = qfim_spectrum(psd, gen)
    bound = qcrb_bound(F)

    rows = [
        [_fmt(w), _fmt(s), _fmt(f), UNBOUNDED if u else _fmt(b)]
        for w, s, f, b, u in zip(psd.omega, psd.values, F.values, bound.values, bound.unbounded)
    ]
    _write_csv(out / "qcrb.csv", ["omega", "S_alpha1", "F", "qcrb_bound"], rows)
    w = psd.omega[psd.omega > 0]
    _write_csv(out / "sql.csv", ["omega", "S_h_sql"], [[_fmt(a), _fmt(b)] for a, b in zip(w, sql_strain_psd(model, w))])

    m = mizuno_summary(cfg)
    _write_json(
        out / "sensitivity.json",
        {
            "units": {"omega": "rad s^-1", "S_alpha1": "J s^2", "F": "s^-1", "qcrb_bound": "s", "S_h_sql": "s"},
            "polarization": cfg.signal.polarization,
            "tau_xx_squared": q(gen.projection, "dimensionless"),
            "mizuno_area": q(m["area"], "rad^2 s^-2"),
            "mizuno_bound": q(m["bound"], "rad^2 s^-2"),
            "mizuno_ratio": q(m["ratio"], "dimensionless"),
            "mizuno_tolerance": q(MIZUNO_RTOL, "dimensionless"),
            "mizuno_passed": m["passed"],
        },
    )
    if m["coherent"]:
        status = "PASS" if m["passed"] else "FAIL"
        print(
            f"mizuno: integral {m['area']:.9e} rad^2/s^2 vs N omega0^2 {m['bound']:.9e} rad^2/s^2 "
            f"ratio {m['ratio']:.9f} margin {abs(m['ratio'] - 1):.2e} (tol {MIZUNO_RTOL:g}) {status}"
        )
        if not m["passed"]:
            raise RelationFailure("mizuno saturation")
    elif m["bound"] > 0:
        print(f"mizuno: ratio {m['ratio']:.9f} (squeezed drive, coherent-state bound not checked)")
    else:
        print("mizuno: no drive (N = 0), bound not checked")
    return EXIT_OK


# radiation -----------------------------------------------------------------


def random_wavevectors(cfg: RunConfig, psd, n: int = N_RANDOM_POINTS) -> np.ndarray:
    """Uniform directions and log-uniform omega over the populated band."""
    rng = np.random.default_rng(cfg.seed)
    dirs = rng.normal(size=(n, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    positive = psd.omega[psd.omega > 0]
    hi = positive[-1]
    if cfg.spectrum.model == "lorentzian" and cfg.spectrum.cutoff_omega is not None:
        hi = min(hi, 3.0 * cfg.spectrum.cutoff_omega)
    lo = positive[0]
    omega = np.exp(rng.uniform(math.log(lo), math.log(hi), n))
    return dirs * (omega / cfg.physical_constants().c)[:, None]


def reciprocity_power_check(cfg: RunConfig, model, psd) -> float:
    k_vec = random_wavevectors(cfg, psd)
    a = _rad.channel_power_density(model, psd, k_vec)
    b = _rad.reciprocity_density(model, psd, k_vec)
    return _bath.relative_deviation(a, b)


def cmd_radiation(cfg: RunConfig, out: Path, threads: int = 1) -> int:
    model = cfg.detector_model()
    psd = cfg.noise_spectrum(model)
    report = _rad.total_power(model, psd, cfg.sky_quadrature(), cfg.sample_directions())
    dev = reciprocity_power_check(cfg, model, psd)
    k_vec = random_wavevectors(cfg, psd)
    g_a, g_b = _rad.graviton_rate_forms(model, psd, k_vec)
    g_dev = _bath.relative_deviation(g_a, g_b)

    payload = report.to_json()
    payload["reciprocity_max_relative_deviation"] = q(dev, "dimensionless")
    payload["graviton_forms_max_relative_deviation"] = q(g_dev, "dimensionless")
    payload["n_random_points"] = q(N_RANDOM_POINTS, "count")
    _write_json(out / "radiation.json", payload)

    ratio = report.closed_form_ratio
    print(f"radiation: total power {report.total_power:.9e} W")
    print(
        f"radiation: prefactor {report.prefactor_over_G_c5:.9g} G/c^5, "
        f"ratio to 32/15 G/c^5 = {ratio:.9g}" if math.isfinite(ratio) else "radiation: prefactor undefined (zero PSD)"
    )
    ok = dev < RECIPROCITY_TOL["b_power_density"]
    print(
        f"reciprocity: max relative deviation power density vs (hbar^2 G/4 pi^2 c^2) F = {dev:.3e} "
        f"(tol {RECIPROCITY_TOL['b_power_density']:g}) {'PASS' if ok else 'FAIL'}"
    )
    if not ok:
        raise RelationFailure("power density reciprocity")
    return EXIT_OK


# decohere ------------------------------------------------------------------


def _generator(cfg: RunConfig, model, bath, quad) -> LindbladGenerator:
    if cfg.simulation.lambda_override is not None:
        return LindbladGenerator(cfg.simulation.lambda_override, provenance="config override")
    return LindbladGenerator.from_bath(model, bath, quad)


def _duration(cfg: RunConfig, gen: LindbladGenerator, x0: float) -> float:
    if cfg.simulation.duration is not None:
        return cfg.simulation.duration
    rate = 4.0 * gen.rate * x0**2
    if rate > 0:
        return 1.4 / rate
    return 0.1 / gen.rate if gen.rate > 0 else 1.0


def _run(beta_c: float, n_fock: int, gen: LindbladGenerator, duration: float, n_samples: int):
    spec = CatStateSpec(beta_c, n_fock=n_fock)
    traj = evolve_for(build_cat_state(spec), gen, duration, n_samples)
    return traj, fit_trajectory(traj, spec.x0)


def _rate_matches(fitted: float, predicted: float, scale: float, rtol: float = DECOHERENCE_RTOL) -> bool:
    return abs(fitted - predicted) <= rtol * max(abs(predicted), scale) + 1e-300


def simulate(cfg: RunConfig, gen: LindbladGenerator, threads: int = 1) -> dict:
    """Main run plus the truncation-convergence run, in parallel when asked."""
    sim = cfg.simulation
    x0 = math.sqrt(2.0) * sim.beta_c
    duration = _duration(cfg, gen, x0)
    sizes = [sim.n_fock]
    if sim.convergence_n_fock and sim.convergence_n_fock != sim.n_fock:
        sizes.append(sim.convergence_n_fock)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        futures = [pool.submit(_run, sim.beta_c, n, gen, duration, sim.n_samples) for n in sizes]
        results = [f.result() for f in futures]
    traj, fit = results[0]
    out = {"x0": x0, "duration": duration, "traj": traj, "fit": fit, "convergence": None}
    if len(results) > 1:
        traj2, fit2 = results[1]
        v1 = trajectory_visibility(traj, x0)
        v2 = trajectory_visibility(traj2, x0)
        scale = max(abs(fit2.rate), 4.0 * gen.rate)
        out["convergence"] = {
            "n_fock": sizes[1],
            "rate": fit2.rate,
            "rate_relative_difference": abs(fit.rate - fit2.rate) / scale if scale > 0 else 0.0,
            "visibility_max_difference": float(np.max(np.abs(v1 - v2))),
        }
    return out


def hygiene(traj) -> dict:
    return {
        "max_trace_error": float(np.max(traj.trace_error)),
        "min_eigenvalue": float(np.min(traj.min_eigenvalues())),
        "max_hermiticity_error": float(np.max(traj.hermiticity_errors())),
    }


def cmd_decohere(cfg: RunConfig, out: Path, threads: int = 1) -> int:
    model = cfg.detector_model()
    bath = cfg.bath_model()
    quad = cfg.sky_quadrature()
    gen = _generator(cfg, model, bath, quad)
    res = simulate(cfg, gen, threads)
    x0, fit, traj = res["x0"], res["fit"], res["traj"]
    D_sim = 4.0 * gen.rate
    predicted = D_sim * x0**2
    bath_route = _bath.decoherence_prediction(model, bath, x0, quad, sample_directions=[])
    traj.to_csv(out / "trajectory.csv", x0)

    passed = bool(_rate_matches(fit.rate, predicted, D_sim))
    conv = res["convergence"]
    clean = hygiene(traj)
    payload = {
        "beta_c": q(cfg.simulation.beta_c, "dimensionless"),
        "x0": q(x0, "dimensionless (alpha_1/sqrt(hbar))"),
        "n_fock": q(cfg.simulation.n_fock, "count"),
        "lindblad_rate": q(gen.rate, "s^-1"),
        "lindblad_provenance": gen.provenance,
        "duration": q(res["duration"], "s"),
        "fitted_rate": q(fit.rate, "s^-1"),
        "fit_residual": q(fit.residual, "dimensionless"),
        "fit_samples": q(fit.n_used, "count"),
        "predicted_D_x0_squared": q(predicted, "s^-1"),
        "fitted_over_D_x0_squared": q(fit.rate / predicted if predicted > 0 else math.nan, "dimensionless"),
        "predicted_half_integral_F_cat_S": q(bath_route.gamma_dec_from_qfi, "s^-1"),
        "fitted_over_half_integral_F_cat_S": q(
            fit.rate / bath_route.gamma_dec_from_qfi if bath_route.gamma_dec_from_qfi > 0 else math.nan, "dimensionless"
        ),
        "tolerance": q(DECOHERENCE_RTOL, "dimensionless"),
        "passed": passed,
        "hygiene": {k: q(v, "dimensionless") for k, v in clean.items()},
        "convergence": None
        if conv is None
        else {
            "n_fock": q(conv["n_fock"], "count"),
            "fitted_rate": q(conv["rate"], "s^-1"),
            "rate_relative_difference": q(conv["rate_relative_difference"], "dimensionless"),
            "visibility_max_difference": q(conv["visibility_max_difference"], "dimensionless"),
        },
    }
    _write_json(out / "decoherence.json", payload)
    print(
        f"decohere: fitted rate {fit.rate:.9e} s^-1 vs D x0^2 {predicted:.9e} s^-1 "
        f"vs (1/2) int F_cat S {bath_route.gamma_dec_from_qfi:.9e} s^-1 {'PASS' if passed else 'FAIL'}"
    )
    if conv is not None:
        print(f"decohere: truncation N_f={cfg.simulation.n_fock} vs {conv['n_fock']}: rate difference {conv['rate_relative_difference']:.2e}")
    if not passed:
        raise RelationFailure("fitted decoherence rate vs D x0^2")
    return EXIT_OK


# reciprocity ---------------------------------------------------------------


def reciprocity_relations(cfg: RunConfig, threads: int = 1) -> dict:
    model = cfg.detector_model()
    psd = cfg.noise_spectrum(model)
    quad = cfg.sky_quadrature()
    bath = cfg.bath_model()

    F = qfim_spectrum(psd, GeneratorModel(model, cfg.signal_direction(), cfg.signal.polarization))
    bound = qcrb_bound(F)
    informative = ~bound.unbounded
    res_a = float(np.max(np.abs(bound.values[informative] * F.values[informative] - 1.0), initial=0.0))

    res_b = reciprocity_power_check(cfg, model, psd)

    x0 = math.sqrt(2.0) * cfg.simulation.beta_c
    dirs = cfg.sample_directions()
    pred = _bath.decoherence_prediction(model, bath, x0, quad, sample_directions=dirs)
    res_c = _bath.relative_deviation(pred.dD_dk, pred.dD_dk_from_qfi)
    res_d = max(
        _bath.relative_deviation(pred.dgamma_dec_dk, pred.dgamma_dec_dk_from_qfi),
        _bath.relative_deviation(pred.gamma_dec, pred.gamma_dec_from_qfi),
    )

    gen = LindbladGenerator.from_bath(model, bath, quad)
    sim = simulate(cfg, gen, threads)
    fitted = sim["fit"].rate
    target = pred.gamma_dec_from_qfi
    scale = max(abs(target), 4.0 * gen.rate)
    res_e = abs(fitted - target) / scale if scale > 0 else abs(fitted)

    residuals = {
        "a_qcrb_times_F": res_a,
        "b_power_density": res_b,
        "c_diffusion_density": res_c,
        "d_decoherence_density": res_d,
        "e_simulated_decoherence": res_e,
    }
    return {"residuals": residuals, "prediction": pred, "fitted_rate": fitted, "generator": gen, "sim": sim}


def cmd_reciprocity(cfg: RunConfig, out: Path, threads: int = 1) -> int:
    r = reciprocity_relations(cfg, threads)
    pred = r["prediction"]
    failed = [name for name, v in r["residuals"].items() if not v <= RECIPROCITY_TOL[name]]
    payload = {
        "relations": {
            name: {
                "residual": q(v, "dimensionless"),
                "tolerance": q(RECIPROCITY_TOL[name], "dimensionless"),
                "passed": name not in failed,
            }
            for name, v in r["residuals"].items()
        },
        "values": {
            "gamma_B": q(pred.gamma_B, "s^-1 (alpha_1-covariance rate)"),
            "D": q(pred.D, "s^-1"),
            "lindblad_rate": q(r["generator"].rate, "s^-1"),
            "gamma_dec": q(pred.gamma_dec, "s^-1"),
            "gamma_dec_from_qfi": q(pred.gamma_dec_from_qfi, "s^-1"),
            "fitted_rate": q(r["fitted_rate"], "s^-1"),
        },
        "decoherence": pred.to_json(),
        "passed": not failed,
    }
    _write_json(out / "reciprocity.json", payload)
    for name, v in r["residuals"].items():
        status = "FAIL" if name in failed else "PASS"
        print(f"reciprocity {name}: residual {v:.3e} (tol {RECIPROCITY_TOL[name]:g}) {status}")
    if failed:
        raise RelationFailure("reciprocity relation(s) " + ", ".join(failed))
    return EXIT_OK


# sky-check -----------------------------------------------------------------


def sky_report(quad: SkyQuadrature) -> dict:
    n = quad.vectors
    target = 16.0 * math.pi / 15.0
    pol_sum = quad.integrate(tau_xx_squared_array(n, "sum"))
    projector = quad.integrate(tt_projector_xxxx(n))
    refined = SkyQuadrature(2 * quad.n_theta, 2 * quad.n_phi)
    pol_refined = refined.integrate(tau_xx_squared_array(refined.vectors, "sum"))

    u, v = _triad(n)
    ortho = max(
        float(np.max(np.abs(np.einsum("ij,ij->i", u, v)))),
        float(np.max(np.abs(np.einsum("ij,ij->i", u, n)))),
        float(np.max(np.abs(np.linalg.norm(u, axis=1) - 1))),
        float(np.max(np.abs(np.linalg.norm(v, axis=1) - 1))),
    )
    tensor_err = 0.0
    for d in [Direction(0.0, 0.0), Direction(math.pi, 0.0)] + quad.directions()[:: max(1, quad.size // 64)]:
        pair = polarization_tensors(d)
        for e in (pair.tau_plus, pair.tau_cross):
            tensor_err = max(tensor_err, abs(np.trace(e)), float(np.max(np.abs(e @ d.n))), abs(np.sum(e * e) - 1.0))
        tensor_err = max(tensor_err, abs(float(np.sum(pair.tau_plus * pair.tau_cross))))
    return {
        "scheme": quad.scheme,
        "nodes": quad.size,
        "solid_angle": quad.integrate(np.ones(quad.size)),
        "polarization_sum_integral": pol_sum,
        "target": target,
        "relative_error": abs(pol_sum / target - 1.0),
        "projector_integral": projector,
        "refined_relative_difference": abs(pol_refined / pol_sum - 1.0),
        "triad_error": ortho,
        "tensor_error": tensor_err,
    }


def cmd_sky_check(cfg: RunConfig, out: Path, threads: int = 1) -> int:
    r = sky_report(cfg.sky_quadrature())
    passed = bool(r["relative_error"] <= SKY_RTOL and r["tensor_error"] < 1e-12 and r["triad_error"] < 1e-12)
    payload = {
        "scheme": r["scheme"],
        "nodes": q(r["nodes"], "count"),
        "solid_angle": q(r["solid_angle"], "sr"),
        "solid_angle_target": q(4.0 * math.pi, "sr"),
        "polarization_sum_integral": q(r["polarization_sum_integral"], "sr"),
        "polarization_sum_target": q(r["target"], "sr"),
        "relative_error": q(r["relative_error"], "dimensionless"),
        "tolerance": q(SKY_RTOL, "dimensionless"),
        "tt_projector_integral": q(r["projector_integral"], "sr"),
        "refined_relative_difference": q(r["refined_relative_difference"], "dimensionless"),
        "triad_max_error": q(r["triad_error"], "dimensionless"),
        "tensor_max_error": q(r["tensor_error"], "dimensionless"),
        "passed": passed,
    }
    _write_json(out / "sky_check.json", payload)
    print(
        f"sky-check: {r['scheme']} sum_lambda tau_xx^2 integral {r['polarization_sum_integral']:.15f} sr "
        f"vs 16 pi/15 {r['target']:.15f} sr, relative error {r['relative_error']:.2e} {'PASS' if passed else 'FAIL'}"
    )
    if not passed:
        raise RelationFailure("sky quadrature polarization integral")
    return EXIT_OK


# entry point ---------------------------------------------------------------

COMMANDS = {
    "sensitivity": cmd_sensitivity,
    "radiation": cmd_radiation,
    "decohere": cmd_decohere,
    "reciprocity": cmd_reciprocity,
    "sky-check": cmd_sky_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gwfql", description="Quantum limits, radiation and decoherence of a GW detector")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or name).strip().splitlines()[0] if fn.__doc__ else None)
        p.add_argument("--config", type=Path, default=None, help="JSON run configuration (built-in default if omitted)")
        p.add_argument("--out", type=Path, default=None, help="output directory (overrides output.dir)")
        p.add_argument("--threads", type=int, default=1, help="worker threads for independent trajectories")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.threads < 1:
            raise ConfigError("--threads: must be at least 1")
        cfg = load_config(args.config)
        out = args.out if args.out is not None else Path(cfg.output.dir)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, out, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RelationFailure as exc:
        print(f"relation check failed: {exc}", file=sys.stderr)
        return EXIT_RELATION
    except ArithmeticError as exc:
        print(f"numerical error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

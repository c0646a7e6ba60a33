"""Batch front-end: read a config, run one job, export CSV/JSON.

Exit codes: 0 success, 1 configuration error (message names the offending
field), 2 solver found no solution.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .conditioning import conditional_strain_spectrum, fixed_angle_spectrum
from .config import RunConfig, load_config, render_config
from .errors import ConfigError, EprIfoError, NoSolutionInRange, UnreachableBandwidth
from .imperfections import LossBudget, phase_jitter_spectrum
from .interferometer import idler_response, kimble_coupling, required_rotation
from .solver import solve, target_filter_params


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, columns: dict[str, np.ndarray]) -> None:
    names = list(columns)
    rows = zip(*(np.asarray(columns[n]).tolist() for n in names))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_sidecar(path: Path, cfg: RunConfig, seed: int, extra: dict) -> None:
    p = cfg.ifo_params()
    payload = {
        "config": render_config(cfg),
        "derived": {
            "gamma_rad_s": p.gamma,
            "gamma_hz": p.gamma / (2.0 * np.pi),
            "gamma_itm_rad_s": p.gamma_itm,
            "theta_rad_s": p.theta,
            "fsr_src_hz": p.fsr_src,
            "squeeze_r": cfg.source_r(),
            "squeeze_db": cfg.source().squeeze_db,
            "rng_seed": seed,
            "version": __version__,
        },
    }
    payload.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _zeta_label(z: float) -> str:
    return f"{z:g}".replace("-", "m")


def run_job(cfg: RunConfig, out: Path, seed: int) -> dict:
    """Execute one configured job, writing out CSV (or JSON for the solver)."""
    p = cfg.ifo_params()
    om = cfg.grid()
    f_hz = om / (2.0 * np.pi)
    lb = cfg.losses()

    if cfg.mode == "conditional":
        spec = conditional_strain_spectrum(p, cfg.source(), om, losses=lb)
        write_csv(out, {
            "frequency_hz": f_hz,
            "s_hh": spec.s_hh,
            "s_hh_unsqueezed": spec.s_hh_reference,
            "improvement_db": spec.improvement_db,
        })
        return {}

    if cfg.mode == "fixed-angle":
        cols: dict[str, np.ndarray] = {"frequency_hz": f_hz}
        ref = None
        for zeta in cfg.zetas_rad:
            spec = fixed_angle_spectrum(p, cfg.source_r(), zeta, om, losses=lb)
            cols[f"s_hh_zeta_{_zeta_label(zeta)}"] = spec.s_hh
            ref = spec.s_hh_reference
        cols["s_hh_unsqueezed"] = ref
        from .interferometer import strain_sql

        cols["s_hh_sql"] = strain_sql(p, om)
        write_csv(out, cols)
        return {}

    if cfg.mode == "rotation-angle":
        idl = idler_response(p, om)
        req = required_rotation(p, om)
        bb = np.arctan(2.0 * p.theta**3 / (p.gamma * om**2))
        write_csv(out, {
            "frequency_hz": f_hz,
            "phi_required_rad": req,
            "phi_achieved_rad": idl.phi_rot_achieved,
            "phi_error_rad": idl.phi_rot_achieved - req,
            "phi_broadband_rad": bb,
        })
        return {"idler": {"phi_c": idl.phi_c, "phi_comp": idl.phi_comp}}

    if cfg.mode == "solver":
        seed_delta = (
            2.0 * np.pi * cfg.delta_seed_hz if cfg.delta_seed_hz is not None else None
        )
        solution = solve(
            p, n_window=cfg.n_window, q_max=cfg.q_max, p_max=cfg.p_max,
            delta_seed=seed_delta,
        )
        target = target_filter_params(p)
        doc = solution.as_dict()
        doc["gamma_f_target_rad_s"] = target.gamma_f
        doc["fsr_src_hz"] = p.fsr_src
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return {"solution": doc}

    if cfg.mode == "loss-sweep":
        cols = {"frequency_hz": f_hz}
        for eps in cfg.eps_values:
            eps_in = eps if cfg.apply_to in ("both", "input") else lb.eps_in
            eps_read = eps if cfg.apply_to in ("both", "readout") else lb.eps_read
            lb_eps = LossBudget(eps_arm=lb.eps_arm, eps_src=lb.eps_src,
                                eps_in=eps_in, eps_read=eps_read)
            spec = conditional_strain_spectrum(p, cfg.source(), om, losses=lb_eps)
            tag = f"{eps:g}"
            cols[f"s_hh_eps_{tag}"] = spec.s_hh
            cols[f"improvement_db_eps_{tag}"] = spec.improvement_db
        write_csv(out, cols)
        return {}

    if cfg.mode == "jitter":
        base = conditional_strain_spectrum(p, cfg.source(), om, losses=lb)
        jit = phase_jitter_spectrum(p, cfg.source(), cfg.jitter(), om, losses=lb)
        write_csv(out, {
            "frequency_hz": f_hz,
            "s_hh": jit.s_hh,
            "s_hh_no_jitter": base.s_hh,
            "relative_correction": (jit.s_hh - base.s_hh) / base.s_hh,
        })
        return {}

    raise ConfigError(f"unhandled mode {cfg.mode!r}")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="epr-ifo",
        description="Quantum noise budget of an entanglement-conditioned interferometer",
    )
    parser.add_argument("--version", action="version", version=f"epr-ifo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run a configured job")
    run_p.add_argument("--config", required=True)
    run_p.add_argument("--out", default=None)
    run_p.add_argument("--mode", default=None)
    run_p.add_argument("--seed", type=int, default=None)
    solve_p = sub.add_parser("solve", help="run the design solver")
    solve_p.add_argument("--config", required=True)
    solve_p.add_argument("--out", default=None)
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        if args.command == "solve":
            cfg.mode = "solver"
        elif args.mode is not None:
            cfg.mode = args.mode
        cfg.validate()
        seed = cfg.seed
        if getattr(args, "seed", None) is not None:
            seed = args.seed
        out = args.out or cfg.out
        if out is None:
            stem = Path(args.config).stem
            ext = ".json" if cfg.mode == "solver" else ".csv"
            out = f"{stem}_{cfg.mode}{ext}"
        out_path = Path(out)
        extra = run_job(cfg, out_path, seed)
        write_sidecar(out_path.with_suffix(out_path.suffix + ".meta.json"),
                      cfg, seed, extra)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NoSolutionInRange, UnreachableBandwidth) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (EprIfoError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Batch front door: ``plap-var <mode> --config <path> [--out <path>] [--seed <int>]``.

Modes: certify, solve-bvp, solve-homoclinic, verify, reproduce-example-2,
reproduce-example-1.  Input is a JSON config document; output is a
deterministic JSON report (exit 0 success, 1 error, 2 partial result).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional, Tuple

import numpy as np

from . import __version__, _kernels, bvp, certifier, homoclinic, report, solvers, verify
from .lattice import DomainError, PeriodicTable
from .nonlinearity import Nonlinearity, example2_family, polynomial_family, power_family, zero_family

__all__ = ["ConfigError", "load_config", "run", "main"]

MODES = (
    "certify",
    "solve-bvp",
    "solve-homoclinic",
    "verify",
    "reproduce-example-2",
    "reproduce-example-1",
)

_SOLVER_DEFAULTS = {
    "grad_tol": 1e-8,
    "max_iters": 100_000,
    "path_nodes": 41,
    "deflation_radius": 1e-4,
    "multistart_count": 64,
    "seed": 0,
}

_HOMOCLINIC_DEFAULTS = {
    "N_schedule": [32, 64, 128],
    "tail_tol": 1e-6,
    "nontrivial_floor": 1e-3,
    "waive_checks": False,
    "s_threshold": 1.0,
}


class ConfigError(ValueError):
    """A configuration document failed validation."""


_SCHEMA = {
    "mode": str,
    "problem": dict,
    "nonlinearity": dict,
    "homoclinic": dict,
    "solver": dict,
    "c": (int, float),
    "d": (int, float),
    "witness": dict,
    "output": str,
    "verify_scale": int,
}

_SECTION_KEYS = {
    "problem": {"T", "q", "a", "V", "lambda", "n", "a_coeffs"},
    "nonlinearity": {"family", "b", "r", "coeffs", "scale", "period"},
    "homoclinic": {
        "p1",
        "p2",
        "q",
        "a",
        "lambda",
        "mu",
        "s_threshold",
        "V",
        "N_schedule",
        "tail_tol",
        "nontrivial_floor",
        "waive_checks",
    },
    "solver": set(_SOLVER_DEFAULTS) | {"start_scales", "divergence_bound"},
    "witness": {"b", "p"},
}


def load_config(text: str) -> dict:
    """Parse and validate a JSON config; defaults are applied and echoed."""
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"invalid JSON: {err}") from err
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be an object")
    for key, val in cfg.items():
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key '{key}'")
        if not isinstance(val, _SCHEMA[key]):
            raise ConfigError(f"'{key}' has wrong type {type(val).__name__}")
    for section, allowed in _SECTION_KEYS.items():
        for key in cfg.get(section, {}):
            if key not in allowed:
                raise ConfigError(f"unknown key '{section}.{key}'")
    solver = dict(_SOLVER_DEFAULTS)
    solver.update(cfg.get("solver", {}))
    cfg["solver"] = solver
    if "homoclinic" in cfg:
        hc = dict(_HOMOCLINIC_DEFAULTS)
        hc.update(cfg["homoclinic"])
        cfg["homoclinic"] = hc
    if "mode" in cfg and cfg["mode"] not in MODES:
        raise ConfigError(f"'mode' must be one of {MODES}")
    _validate_exponents(cfg)
    return cfg


def _validate_exponents(cfg: dict) -> None:
    prob = cfg.get("problem", {})
    if "q" in prob and not prob["q"] > 1:
        raise ConfigError("'problem.q': Exponent must exceed 1")
    hc = cfg.get("homoclinic", {})
    for key in ("p1", "p2", "q", "mu"):
        if key in hc and not hc[key] > 1:
            raise ConfigError(f"'homoclinic.{key}': Exponent must exceed 1")
    if all(k in hc for k in ("p1", "p2", "q")):
        if hc["q"] > hc["p1"] or hc["q"] > hc["p2"]:
            raise ConfigError("'homoclinic.q': need q <= p1, p2")
    if "mu" in hc:
        for key in ("p1", "p2"):
            if key in hc and not hc["mu"] > hc[key]:
                raise ConfigError(f"'homoclinic.mu': need mu > {key}")
    if "witness" in cfg:
        w = cfg["witness"]
        if "b" not in w or "p" not in w:
            raise ConfigError("'witness' needs both 'b' and 'p'")
        if "q" in prob and not w["p"] < prob["q"]:
            raise ConfigError("'witness.p': need p < q")


def build_nonlinearity(cfg: dict, periodic: bool = False) -> Nonlinearity:
    section = cfg.get("nonlinearity")
    if section is None:
        raise ConfigError("missing required section 'nonlinearity'")
    family = section.get("family")
    if family == "example2":
        return example2_family()
    if family == "power":
        if "b" not in section or "r" not in section:
            raise ConfigError("'nonlinearity': power family needs 'b' and 'r'")
        period = section.get("period") if periodic or "period" in section else None
        return power_family(section["b"], section["r"], period=period)
    if family == "polynomial":
        if "coeffs" not in section:
            raise ConfigError("'nonlinearity': polynomial family needs 'coeffs'")
        return polynomial_family(
            section["coeffs"],
            scale=section.get("scale"),
            period=section.get("period"),
        )
    if family == "zero":
        return zero_family()
    raise ConfigError(f"'nonlinearity.family': unknown family {family!r}")


def build_bvp_problem(cfg: dict, nl: Nonlinearity) -> bvp.BvpProblem:
    section = cfg.get("problem")
    if section is None:
        raise ConfigError("missing required section 'problem'")
    for key in ("T", "q", "a", "V"):
        if key not in section:
            raise ConfigError(f"missing required key 'problem.{key}'")
    lam = section.get("lambda", 0.0)
    try:
        if "n" in section and section["n"] != 2:
            return bvp.HigherOrderBvpProblem(
                T=section["T"],
                q=section["q"],
                a=section.get("a", 0.0),
                V=np.asarray(section["V"], dtype=float),
                nl=nl,
                lam=lam,
                n=section["n"],
                a_coeffs=tuple(section.get("a_coeffs", ())),
            )
        return bvp.BvpProblem(
            T=section["T"],
            q=section["q"],
            a=section["a"],
            V=np.asarray(section["V"], dtype=float),
            nl=nl,
            lam=lam,
        )
    except DomainError as err:
        raise ConfigError(f"'problem': {err}") from err


def build_homoclinic_problem(cfg: dict, nl: Nonlinearity) -> homoclinic.HomoclinicProblem:
    section = cfg.get("homoclinic")
    if section is None:
        raise ConfigError("missing required section 'homoclinic'")
    for key in ("p1", "p2", "q", "a", "lambda", "mu", "V"):
        if key not in section:
            raise ConfigError(f"missing required key 'homoclinic.{key}'")
    try:
        return homoclinic.HomoclinicProblem(
            p1=section["p1"],
            p2=section["p2"],
            q=section["q"],
            a=section["a"],
            lam=section["lambda"],
            V=PeriodicTable(np.asarray(section["V"], dtype=float), base=0),
            nl=nl,
            mu=section["mu"],
            s_threshold=section["s_threshold"],
        )
    except DomainError as err:
        raise ConfigError(f"'homoclinic': {err}") from err


def _solver_config(cfg: dict, seed: Optional[int]) -> solvers.SolverConfig:
    section = dict(cfg["solver"])
    if seed is not None:
        section["seed"] = seed
        cfg["solver"]["seed"] = seed
    if "start_scales" in section:
        section["start_scales"] = tuple(section["start_scales"])
    return solvers.SolverConfig(**section)


def certificate_dict(cert: certifier.Certificate) -> dict:
    return {
        "rho": cert.rho,
        "rho_q": cert.rho_q,
        "rho_q_exact": cert.rho_q_exact,
        "theta_c": cert.theta_c,
        "lambda_d": cert.lambda_d,
        "level_r": cert.level_r,
        "c": cert.c,
        "d": cert.d,
        "d1_holds": cert.d1_holds,
        "d1_lhs": cert.d1_lhs,
        "d1_rhs": cert.d1_rhs,
        "d2_holds": cert.d2_holds,
        "d2_sample_box": None if cert.d2_sample_box is None else list(cert.d2_sample_box),
        "vd_threshold_ok": cert.vd_threshold_ok,
        "lambda_lo": cert.lambda_lo,
        "lambda_hi": cert.lambda_hi,
        "interval_nonempty": cert.interval_nonempty,
        "flags": list(cert.flags),
    }


def _point_dict(pt: solvers.CriticalPoint, window_lo: int, pad: int) -> dict:
    full = np.zeros(len(pt.values) + 2 * pad)
    full[pad:-pad] = pt.values
    return {
        "window_lo": window_lo,
        "window_hi": window_lo + len(full) - 1,
        "values": full,
        "energy": pt.energy,
        "grad_norm": pt.grad_norm,
        "residual_norm": pt.residual_norm,
        "kind": pt.kind,
        "converged": pt.converged,
        "origin": pt.origin,
    }


def _base_report(cfg: dict, mode: str) -> dict:
    return {
        "schema_version": 1,
        "tool_version": __version__,
        "mode": mode,
        "config": cfg,
        "seed": cfg.get("solver", {}).get("seed", 0),
        "kernel_backend": _kernels.BACKEND,
        "discrepancy_flags": [],
    }


_BOUNDARY_FLAG = {
    "id": "boundary-condition-display",
    "note": bvp.BOUNDARY_CONVENTION,
}


def _run_certify(cfg: dict, mode: str) -> Tuple[dict, int]:
    nl = build_nonlinearity(cfg)
    problem = build_bvp_problem(cfg, nl)
    if "c" not in cfg or "d" not in cfg:
        raise ConfigError("certify mode needs 'c' and 'd'")
    witness = None
    if "witness" in cfg:
        witness = certifier.GrowthWitness(cfg["witness"]["b"], cfg["witness"]["p"])
    cert = certifier.certify(problem, nl, cfg["c"], cfg["d"], witness=witness)
    rep = _base_report(cfg, mode)
    rep["certificate"] = certificate_dict(cert)
    rep["discrepancy_flags"].append(_BOUNDARY_FLAG)
    return rep, 0


def _run_solve_bvp(cfg: dict, mode: str, seed: Optional[int]) -> Tuple[dict, int]:
    nl = build_nonlinearity(cfg)
    problem = build_bvp_problem(cfg, nl)
    config = _solver_config(cfg, seed)
    rep = _base_report(cfg, mode)
    warnings = []
    structured_scale = None
    if "c" in cfg and "d" in cfg:
        cert = certifier.certify(problem, nl, cfg["c"], cfg["d"])
        rep["certificate"] = certificate_dict(cert)
        structured_scale = float(cfg["d"])
        lam = problem.lam
        if cert.interval_nonempty and not (cert.lambda_lo < lam < cert.lambda_hi):
            warnings.append(
                f"lambda={lam} outside the certified interval "
                f"({cert.lambda_lo}, {cert.lambda_hi}); running anyway"
            )
    points, status = solvers.find_three(problem, problem.lam, config, structured_scale=structured_scale)
    verified = []
    for pt in points:
        res = bvp.residual(pt.values, problem)
        verified.append(float(np.max(np.abs(res))))
    rep["points"] = [
        dict(_point_dict(pt, 1 - problem.pad, problem.pad), residual_sup_reverified=rv)
        for pt, rv in zip(points, verified)
    ]
    D, flagged = solvers.distinctness_report(points, config.deflation_radius)
    rep["distinctness"] = {"pairwise_sup_distance": D, "flagged_pairs": [list(p) for p in flagged]}
    rep["status"] = status
    rep["warnings"] = warnings
    rep["discrepancy_flags"].append(_BOUNDARY_FLAG)
    return rep, 0 if status == "ok" else 2


def _run_solve_homoclinic(cfg: dict, mode: str, seed: Optional[int]) -> Tuple[dict, int]:
    nl = build_nonlinearity(cfg, periodic=True)
    problem = build_homoclinic_problem(cfg, nl)
    config = _solver_config(cfg, seed)
    hc_cfg = cfg["homoclinic"]
    rep = _base_report(cfg, mode)
    rep["hypothesis_checks"] = homoclinic.run_hypothesis_checks(problem)
    trace, status = homoclinic.solve_homoclinic(
        problem,
        hc_cfg["N_schedule"],
        config,
        tail_tol=hc_cfg["tail_tol"],
        nontrivial_floor=hc_cfg["nontrivial_floor"],
        waive_checks=hc_cfg["waive_checks"],
    )
    rep["levels"] = []
    for pt, tr in trace:
        N = tr.N
        res = homoclinic.grad_home_free(pt.values, problem)
        entry = _point_dict(pt, -N - 2, 2)
        entry["residual_sup_reverified"] = float(np.max(np.abs(res)))
        entry["truncation"] = {
            "N": tr.N,
            "tail_max": tr.tail_max,
            "energy": tr.energy,
            "mp_level": tr.mp_level,
            "converged": tr.converged,
        }
        rep["levels"].append(entry)
    rep["status"] = status
    rep["gradient_convention"] = homoclinic.GRADIENT_CONVENTION
    rep["discrepancy_flags"].append(
        {"id": "gradient-display-exponent", "note": homoclinic.GRADIENT_CONVENTION}
    )
    return rep, 0 if status == "ok" else 2


def _run_verify(cfg: dict, mode: str, seed: Optional[int]) -> Tuple[dict, int]:
    s = seed if seed is not None else cfg.get("solver", _SOLVER_DEFAULTS).get("seed", 0)
    results = verify.run_property_suite(seed=s, scale=cfg.get("verify_scale", 1))
    rep = _base_report(cfg, mode)
    rep["seed"] = s
    rep["properties"] = {name: {"passed": p, "total": t} for name, (p, t) in results.items()}
    all_pass = all(p == t for p, t in results.values())
    rep["status"] = "ok" if all_pass else "partial"
    return rep, 0 if all_pass else 2


def example2_config() -> dict:
    return load_config(
        json.dumps(
            {
                "mode": "reproduce-example-2",
                "problem": {"T": 8, "q": 3, "a": 10.0, "V": [1, 2, 3, 4, 5, 6, 7, 8]},
                "nonlinearity": {"family": "example2"},
                "c": 1.0,
                "d": 14.0,
                "witness": {"b": 64.0 * math.exp(14.0), "p": 2.0},
            }
        )
    )


def example1_config() -> dict:
    return load_config(
        json.dumps(
            {
                "mode": "reproduce-example-1",
                "nonlinearity": {"family": "power", "b": [1.0, 1.0], "r": 4.0, "period": 2},
                "homoclinic": {
                    "p1": 2.0,
                    "p2": 2.0,
                    "q": 2.0,
                    "a": 1.0,
                    "lambda": 1.0,
                    "mu": 4.0,
                    "V": [1.0, 2.0],
                },
            }
        )
    )


def _run_example2(cfg: dict, mode: str) -> Tuple[dict, int]:
    rep, code = _run_certify(cfg, mode)
    cert = rep["certificate"]
    e14e = math.exp(14.0) - math.e
    paper_printed = 19208.0 / (51.0 * e14e)
    rep["discrepancy_flags"].append(
        {
            "id": "lambda-lower-endpoint",
            "tool_value": cert["lambda_lo"],
            "tool_formula": "(4 + 2a + T*V1) / (q * Lambda(d)) = 60368 / (153 (e^14 - e))",
            "paper_printed": paper_printed,
            "paper_printed_formula": "19208 / (51 (e^14 - e))",
            "note": (
                "printed lower endpoint corresponds to the constant 84, not the "
                "88 = 4 + 2a + T*V1 used in the condition check; both are reported"
            ),
        }
    )
    return rep, code


def run(cfg: dict, mode: str, seed: Optional[int] = None) -> Tuple[dict, int]:
    """Dispatch a validated config; returns (report, exit_code)."""
    if mode == "certify":
        return _run_certify(cfg, mode)
    if mode == "solve-bvp":
        return _run_solve_bvp(cfg, mode, seed)
    if mode == "solve-homoclinic":
        return _run_solve_homoclinic(cfg, mode, seed)
    if mode == "verify":
        return _run_verify(cfg, mode, seed)
    if mode == "reproduce-example-2":
        return _run_example2(cfg, mode)
    if mode == "reproduce-example-1":
        return _run_solve_homoclinic(cfg, mode, seed)
    raise ConfigError(f"unknown mode {mode!r}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plap-var", description=__doc__)
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", help="path to a JSON config document")
    parser.add_argument("--out", help="write the report here (default: stdout)")
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)
    try:
        if args.config is not None:
            with open(args.config, "r", encoding="utf-8") as fh:
                cfg = load_config(fh.read())
        elif args.mode == "reproduce-example-2":
            cfg = example2_config()
        elif args.mode == "reproduce-example-1":
            cfg = example1_config()
        elif args.mode == "verify":
            cfg = {"solver": dict(_SOLVER_DEFAULTS)}
        else:
            raise ConfigError(f"mode '{args.mode}' needs --config")
        if "mode" in cfg and cfg["mode"] != args.mode:
            raise ConfigError(f"config mode '{cfg['mode']}' does not match '{args.mode}'")
        rep, code = run(cfg, args.mode, seed=args.seed)
    except (ConfigError, DomainError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    text = report.dumps(rep)
    out_path = args.out or cfg.get("output")
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

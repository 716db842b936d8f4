"""Command-line entry point: verify / derive / simulate.

Exit codes are a stable contract: 0 success, 1 check or tolerance failure,
2 usage/config error.  Verification runs fully symbolic (parameters free),
so its outcome is seed-independent; only simulate consumes the seed.
``BILAX_THREADS`` caps the worker pool used for independent relation checks.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction as PyFraction

import numpy as np

from . import dynamics
from .double_row import (
    check_involution,
    check_nondynamical_intertwining,
    check_single_row_commutation,
    check_sts_identity,
    check_theorem_zc,
    check_transfer_commutation,
    verify_corollary,
)
from .phase_ring import StructureError
from .spectral_matrix import rational_r_builder
from .structure_checks import (
    RelationReport,
    check_cybe,
    check_k_locality,
    check_nondynamical,
    check_reflection_minus,
    check_reflection_plus,
    check_rll,
)
from .toda_models import (
    displayed_flow_indices,
    displayed_flow_matrix,
    displayed_hamiltonian,
    expansion,
    hamiltonian,
    model_flow_matrix,
    model_from_config,
    parameter_constant_difference,
)

DEFAULT_MU_SAMPLES = "0.3,0.7,1.1,1.9,2.3"


def max_workers() -> int:
    try:
        return max(1, int(os.environ.get("BILAX_THREADS", "1")))
    except ValueError:
        return 1


def _load_params(raw: str | None) -> dict:
    if not raw:
        return {}
    if os.path.exists(raw):
        with open(raw) as fh:
            data = json.load(fh)
    else:
        data = json.loads(raw)
    if not isinstance(data, dict):
        raise StructureError("params must be a JSON object")
    return data


def _build_model(args):
    params = _load_params(getattr(args, "params", None))
    if "model" in params or "N" in params:
        cfg = dict(params)
        cfg.setdefault("model", args.model)
        cfg.setdefault("N", args.N)
        return model_from_config(cfg)
    return model_from_config(
        {"model": args.model, "N": args.N, "params": params}
    )


# ---------------------------------------------------------------------------
# verify


def _verify_reports(model) -> list:
    ring, ps = model.ring, model.ps
    rb = rational_r_builder(ring)
    offsite = (1, 2) if model.N >= 2 else (1, 1)

    # shared artifacts first so the parallel phase only reads the cache
    expansion(model)
    hamiltonian(model)

    def _named(name, report):
        report.name = name
        return report

    jobs = [
        lambda: check_cybe(rb, ring),
        lambda: check_rll(model.lax, rb, ps, site=1, offsite=offsite),
        lambda: check_k_locality(model.km, model.kp, model.lax, ps),
        lambda: check_reflection_minus(model.km, rb, ps),
        lambda: check_reflection_plus(model.kp, rb, ps),
        lambda: _named("nondynamical_kplus", check_nondynamical(model.kp, ps)),
        lambda: check_single_row_commutation(ps, model.lax, model.N),
        lambda: check_transfer_commutation(ps, model.lax, model.km, model.kp, model.N),
        lambda: check_sts_identity(ps, model.lax, model.N, rb),
        lambda: check_involution(expansion(model), model.recipe, ps),
    ]
    if model.name == "bcn":
        jobs.insert(
            5, lambda: _named("nondynamical_kminus", check_nondynamical(model.km, ps))
        )

    workers = max_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda j: j(), jobs))
    else:
        reports = [j() for j in jobs]

    reports.extend(check_theorem_zc(ps, model.lax, model.km, model.kp, model.N, rb))
    reports.extend(
        verify_corollary(ps, model.lax, model.km, model.kp, model.N, model.recipe, rb)
    )
    if model.name == "bcn":
        reports.extend(
            check_nondynamical_intertwining(
                ps, model.lax, model.km, model.kp, model.N, model.recipe, rb
            )
        )

    ham_ok = parameter_constant_difference(
        hamiltonian(model), displayed_hamiltonian(model)
    ) is not None
    reports.append(
        RelationReport(
            "hamiltonian_matches_closed_form",
            ham_ok,
            [] if ham_ok else [("scalar", str(hamiltonian(model)))],
        )
    )
    bad = []
    for j in displayed_flow_indices(model):
        if model_flow_matrix(model, j) != displayed_flow_matrix(model, j):
            bad.append(("j=%d" % j, str(model_flow_matrix(model, j))))
    reports.append(
        RelationReport("flow_matrices_match_closed_form", not bad, bad)
    )
    return reports


def cmd_verify(args) -> int:
    model = _build_model(args)
    reports = _verify_reports(model)
    for rep in reports:
        print(rep)
    if args.output:
        payload = {
            "model": model.name,
            "N": model.N,
            "relations": [r.to_dict() for r in reports],
        }
        with open(args.output, "w") as fh:
            json.dump(payload, fh, indent=2)
        print("wrote %s" % args.output)
    return 0 if all(r.holds for r in reports) else 1


# ---------------------------------------------------------------------------
# derive


def cmd_derive(args) -> int:
    model = _build_model(args)
    ham = hamiltonian(model)
    diff = parameter_constant_difference(ham, displayed_hamiltonian(model))
    print("model %s N=%d" % (model.name, model.N))
    print("transfer powers: %s" % expansion(model).powers())
    print("H = %s" % ham)
    if getattr(args, "params", None):
        exact = {name: PyFraction(str(v)) for name, v in model.params.items()}
        print("H at configured parameters = %s" % ham.substitute(exact))
    if diff is None:
        print("H vs closed form: MISMATCH")
    else:
        print("H vs closed form: MATCH (additive constant %s)" % diff)
    ok = diff is not None
    for j in displayed_flow_indices(model):
        got = model_flow_matrix(model, j)
        match = got == displayed_flow_matrix(model, j)
        ok = ok and match
        print("M(%d, mu) [%s] =" % (j, "MATCH" if match else "MISMATCH"))
        print(got)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write("H = %s\n" % ham)
            for j in displayed_flow_indices(model):
                fh.write("M(%d, mu) = %s\n" % (j, model_flow_matrix(model, j)))
        print("wrote %s" % args.output)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args) -> int:
    model = _build_model(args)
    rng = np.random.default_rng(args.seed)
    point = dynamics.random_phase_point(model, rng, amplitude=args.amplitude)
    mu_samples = [float(x) for x in args.mu_samples.split(",") if x]
    traj = dynamics.integrate(
        model, point, args.dt, args.steps, scheme=args.scheme
    )
    diagnostics_error = None
    if not traj.truncated:
        try:
            dynamics.conserved_channels(model, traj)
            dynamics.zero_curvature_residual(model, traj, mu_samples)
            if model.name == "dn":
                dynamics.dn_x0_relation_residual(model, traj)
        except dynamics.SingularityError as exc:
            diagnostics_error = str(exc)

    out = args.output
    dynamics.write_csv(model, traj, out)
    print("wrote %s (%d samples)" % (out, len(traj.times)))
    if args.format == "svg":
        svg_path = os.path.splitext(out)[0] + ".svg"
        dynamics.write_svg(traj, svg_path)
        print("wrote %s" % svg_path)

    failures = []
    if traj.truncated:
        failures.append("trajectory truncated: %s" % traj.error)
    if diagnostics_error:
        failures.append(
            "diagnostics aborted near singular manifold: %s" % diagnostics_error
        )
    summary = {}
    for name, values in sorted(traj.channels.items()):
        peak = float(np.max(values)) if len(values) else 0.0
        summary[name] = peak
        print("max %s = %.3e" % (name, peak))
    if not traj.truncated:
        if summary.get("H_drift", 0.0) > args.tol_energy:
            failures.append("H drift above %.1e" % args.tol_energy)
        if summary.get("zc_residual", 0.0) > args.tol_zc:
            failures.append("zero-curvature residual above %.1e" % args.tol_zc)
        if summary.get("casimir_drift", 0.0) > args.tol_casimir:
            failures.append("Casimir drift above %.1e" % args.tol_casimir)
    if args.format == "json":
        payload = {
            "model": model.name,
            "N": model.N,
            "params": model.params,
            "dt": args.dt,
            "steps": args.steps,
            "seed": args.seed,
            "mu_samples": mu_samples,
            "truncated": traj.truncated,
            "error": traj.error,
            "channel_max": summary,
            "failures": failures,
        }
        json_path = os.path.splitext(out)[0] + ".json"
        with open(json_path, "w") as fh:
            json.dump(payload, fh, indent=2)
        print("wrote %s" % json_path)
    for f in failures:
        print("FAIL %s" % f)
    return 1 if failures else 0


# ---------------------------------------------------------------------------


def _add_model_args(p):
    p.add_argument("--model", choices=("bcn", "dn"), required=True)
    p.add_argument("--N", type=int, required=True, help="number of chain sites")
    p.add_argument(
        "--params",
        help="JSON object or path with boundary parameter values",
    )
    p.add_argument("--output", help="output file path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bilax",
        description="open-boundary integrable lattice toolkit: exact "
        "Poisson-algebra verification, double-row Lax pair derivation, and "
        "Toda chain simulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run all exact relation checks")
    _add_model_args(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("derive", help="print Hamiltonian and Lax time parts")
    _add_model_args(p)
    p.set_defaults(fn=cmd_derive)

    p = sub.add_parser("simulate", help="integrate the flow with diagnostics")
    _add_model_args(p)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--scheme", choices=("rk4", "rk4-adaptive"), default="rk4")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--amplitude", type=float, default=0.3,
                   help="half-width of the random initial data box")
    p.add_argument("--mu-samples", default=DEFAULT_MU_SAMPLES,
                   help="comma-separated spectral points for the residual channel")
    p.add_argument("--tol-energy", type=float, default=1e-8)
    p.add_argument("--tol-zc", type=float, default=1e-8)
    p.add_argument("--tol-casimir", type=float, default=1e-8)
    p.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    p.set_defaults(fn=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    if getattr(args, "command", None) == "simulate" and not args.output:
        args.output = "bilax_%s_N%d.csv" % (args.model, args.N)
    try:
        return args.fn(args)
    except StructureError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except (json.JSONDecodeError, OSError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

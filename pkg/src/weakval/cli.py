"""Command-line front end.

Machine-readable JSON (or CSV) goes to stdout, a short human summary to
stderr. Exit codes: 0 success, 1 failed reproduction check, 2 malformed
input, 3 domain error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
from typing import Sequence

import numpy as np

from . import __version__, io, linalg, measure, noise, phase, weakcore
from .errors import DomainError, InputError, MixedStatePhase, WeakValError
from .qstate import Gate, GateSequence, prepare, seq

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_DOMAIN, EXIT_NUMERICAL = 0, 1, 2, 3, 4

MIXED_PHASE_MESSAGE = (
    "phase recovery is not available for a mixed preselection: a mixture has no single weak value, "
    "and recovering a phase would require a coherent averaging of complex numbers across its components; "
    "use `effective-op` for the mixed-state operator B_rho = A rho A"
)


def _load(path: str) -> dict:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _options(spec: io.ProblemSpec, args) -> io.Options:
    opts = spec.options
    if getattr(args, "shots", None) is not None:
        opts.shots = args.shots
    if getattr(args, "seed", None) is not None:
        opts.seed = args.seed
    if getattr(args, "epsilon_orth", None) is not None:
        opts.epsilon_orth = args.epsilon_orth
    return opts


def _estimate(e: measure.ShotEstimate) -> dict:
    return {"mean": e.mean, "std_error": e.std_error, "shots": e.shots, "seed": e.seed, "exact": e.exact}


def cmd_weak_value(args) -> tuple[dict, str]:
    spec = io.parse_problem(_load(args.input))
    opts = _options(spec, args)
    if spec.is_mixed:
        raise MixedStatePhase(MIXED_PHASE_MESSAGE)
    if spec.postselect is None:
        raise InputError("weak-value needs a postselect state")
    a, psi, phi = spec.observable, spec.pure, spec.postselect
    rep = weakcore.weak_value_product(a, psi, phi, opts.epsilon_orth)
    ph = phase.recover_phase(a, psi, phi, opts.epsilon_mag, opts.epsilon_orth)
    sampled = measure.sampled_weak_value(a, psi, phi, opts.shots, opts.seed)
    out = {
        "command": "weak-value",
        "schema_version": io.SCHEMA_VERSION,
        "dim": spec.dim,
        "weak_value": {
            "forward": rep.forward,
            "reverse": rep.reverse,
            "product": rep.product,
            "modulus": rep.modulus,
            "overlap_sq": rep.overlap_sq,
            "numerator_sq": rep.numerator_sq,
            "re_from_mean": rep.re_from_mean,
        },
        "phase": {
            "x": ph.x,
            "y": ph.y,
            "phase": ph.phase,
            "weak_value_reconstructed": ph.weak_value_reconstructed,
        },
        "strong_estimates": {
            "shots": opts.shots,
            "seed": opts.seed,
            "c_r": _estimate(sampled.x),
            "c_i": _estimate(sampled.y),
            "b": _estimate(sampled.b),
            "p_psi": _estimate(sampled.p),
            "modulus": sampled.modulus,
            "phase": sampled.phase,
        },
    }
    summary = (
        f"A_w = {rep.forward.real:.6g}{rep.forward.imag:+.6g}i  |A_w|^2 = {rep.product.real:.6g}  "
        f"phase = {ph.phase:.6g} rad  (x = {ph.x:.6g}, y = {ph.y:.6g})"
    )
    return out, summary


def _operator_checks(b: np.ndarray) -> dict:
    dec = linalg.eig_hermitian(b)
    scale = max(1.0, float(np.max(np.abs(dec.eigenvalues))))
    return {
        "hermitian": linalg.is_hermitian(b, 1e-10),
        "psd": bool(dec.eigenvalues[0] >= -1e-10 * scale),
        "min_eigenvalue": float(dec.eigenvalues[0]),
        "eigenvalues": dec.eigenvalues.tolist(),
        "rank": int(np.sum(dec.eigenvalues > 1e-10 * scale)),
        "trace": float(np.real(np.trace(b))),
    }


def _structure(s: weakcore.BStructure) -> dict:
    return {
        "case": s.case,
        "eigenvalue": s.eigenvalue,
        "eigenvalues": s.eigenvalues.tolist(),
        "amplitudes": [complex(c) for c in s.amplitudes],
        "populations": s.populations.tolist(),
        "coherences": [{"i": i, "j": j, "value": v} for (i, j), v in s.coherences],
        "coefficients": io.encode_matrix(s.coefficients),
        "eigenstate_residual": s.eigenstate_residual,
    }


def cmd_effective_op(args) -> tuple[dict, str]:
    spec = io.parse_problem(_load(args.input))
    opts = _options(spec, args)
    a = spec.observable
    out: dict = {"command": "effective-op", "schema_version": io.SCHEMA_VERSION, "dim": spec.dim}
    if spec.is_mixed:
        b = weakcore.effective_operator_mixed(a, spec.mixed)
        out["mode"] = "mixed"
        out["structure"] = None
    else:
        b = weakcore.effective_operator(a, spec.pure)
        out["mode"] = "pure"
        out["structure"] = _structure(weakcore.analyze_structure(a, spec.pure, opts.eig_tol))
    out["operator"] = io.encode_matrix(b)
    out["checks"] = _operator_checks(b)
    summary = f"B ({out['mode']}): rank {out['checks']['rank']}, trace {out['checks']['trace']:.6g}"
    if out["structure"] is not None:
        summary += f", case {out['structure']['case']}"
    if spec.postselect is not None:
        phi = spec.postselect.amplitudes
        value = linalg.sandwich(phi, b, phi).real
        post = {"expectation": value}
        if spec.is_mixed:
            _, avg = weakcore.mixed_expectation(a, spec.mixed, phi)
            post["incoherent_average"] = avg
        else:
            post["amplitude_sq"] = abs(linalg.sandwich(phi, a, spec.pure.amplitudes)) ** 2
        out["postselect"] = post
        summary += f", <phi|B|phi> = {value:.6g}"
    return out, summary


def _witness_row(r: noise.WitnessReport, param) -> dict:
    return {
        "param": param,
        "theta": r.theta,
        "channel": r.channel_label,
        "ideal": r.ideal,
        "real": r.real_val,
        "delta": r.delta,
        "flags": list(r.flags),
    }


def cmd_witness(args) -> tuple[dict, str]:
    spec = io.parse_problem(_load(args.input))
    if spec.is_mixed:
        raise InputError("witness needs a pure preselect state")
    w = spec.witness
    if w is None:
        raise InputError("witness needs a 'witness' section with theta and a channel or sweep")
    theta = float(w["theta"])
    a, psi = spec.observable, spec.pure
    rows = []
    if "sweep" in w:
        family = io.channel_family(w["sweep"]["family"], a, theta)
        grid = [float(g) for g in w["sweep"]["grid"]]
        reports = noise.witness_sweep(a, psi, theta, family, grid)
        rows = [_witness_row(r, g) for r, g in zip(reports, grid)]
    if "channel" in w:
        ch = io.parse_channel(w["channel"], a, theta)
        rows.append(_witness_row(noise.witness_run(a, psi, theta, ch), w["channel"].get("param")))
    if not rows and "sweep" not in w:
        rows.append(_witness_row(noise.witness_run(a, psi, theta, noise.ideal_gate(a, theta)), None))
    out = {
        "command": "witness",
        "schema_version": io.SCHEMA_VERSION,
        "dim": spec.dim,
        "witness_operator": io.encode_matrix(weakcore.effective_operator(a, psi)),
        "reports": rows,
    }
    flagged = sum(1 for r in rows if r["flags"])
    summary = f"{len(rows)} witness report(s), max delta {max((r['delta'] for r in rows), default=0.0):.6g}"
    if flagged:
        summary += f"; {flagged} flagged {noise.DEPOLARIZING_INSENSITIVE}"
    return out, summary


def witness_csv(out: dict) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["param", "ideal", "real", "delta", "flags"])
    for r in out["reports"]:
        param = "" if r["param"] is None else io._fmt_float(float(r["param"]))
        writer.writerow(
            [param, io._fmt_float(r["ideal"]), io._fmt_float(r["real"]), io._fmt_float(r["delta"]), ";".join(r["flags"])]
        )
    return buf.getvalue()


Z = np.diag([1.0, -1.0]).astype(np.complex128)
APPENDIX_THETA_PHI = np.pi / 3
APPENDIX_WEIGHTS = (0.75, 0.25)


def reproduce_appendix(shots: int, seed: int) -> dict:
    """Run the reference pure-state and mixed-state circuits against their exact values."""
    psi_prep = seq(Gate("h", (0,)))
    phi_prep = seq(Gate("ry", (0,), angle=APPENDIX_THETA_PHI))

    psi = prepare(psi_prep, 2)
    phi = prepare(phi_prep, 2)
    check = weakcore.expectation_identity_check(Z, psi, phi)
    pure = measure.amplitude_protocol(Z, psi_prep, phi_prep, shots, measure.derive_seed(seed, 0))
    sigma_pure = measure.weighted_binomial_sigma([1.0], [check.rhs], shots)

    components = [(APPENDIX_WEIGHTS[0], GateSequence()), (APPENDIX_WEIGHTS[1], seq(Gate("x", (0,))))]
    rho = np.diag(APPENDIX_WEIGHTS).astype(np.complex128)
    exp_b_rho, rhs_sum = weakcore.mixed_expectation(Z, rho, phi)
    mixed = measure.mixed_average_protocol(Z, components, phi_prep, shots, measure.derive_seed(seed, 1))
    probs = [measure.transition_probability(Z, prep, phi_prep) for _, prep in components]
    sigma_mixed = measure.weighted_binomial_sigma(APPENDIX_WEIGHTS, probs, shots)

    def entry(name, exact, identity_rhs, est, sigma):
        ok = abs(est.mean - exact) <= 3 * sigma
        return {
            "experiment": name,
            "exact": exact,
            "identity_rhs": identity_rhs,
            "identity_holds": bool(abs(exact - identity_rhs) <= 1e-10),
            "estimate": est.mean,
            "std_error": est.std_error,
            "sigma": sigma,
            "tolerance": 3 * sigma,
            "shots": shots,
            "seed": est.seed,
            "status": "PASS" if ok and abs(exact - identity_rhs) <= 1e-10 else "FAIL",
        }

    return {
        "command": "reproduce-appendix",
        "schema_version": io.SCHEMA_VERSION,
        "shots": shots,
        "seed": seed,
        "experiments": [
            entry("pure: <phi|B|phi> = |<phi|Z|psi>|^2", check.lhs, check.rhs, pure, sigma_pure),
            entry("mixed: <phi|B_rho|phi> = sum_k p_k |<phi|Z|psi_k>|^2", exp_b_rho, rhs_sum, mixed, sigma_mixed),
        ],
    }


def cmd_reproduce(args) -> tuple[dict, str]:
    shots = 10000 if args.shots is None else args.shots
    seed = 42 if args.seed is None else args.seed
    if shots < 1:
        raise InputError("--shots must be >= 1")
    out = reproduce_appendix(shots, seed)
    lines = [
        f"{e['status']}  {e['experiment']}: exact {e['exact']:.6f}, estimate {e['estimate']:.6f} "
        f"+/- {e['std_error']:.4f} (3 sigma = {e['tolerance']:.4f})"
        for e in out["experiments"]
    ]
    return out, "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="weakval", description="Bidirectional weak values and effective operators.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("--input", "-i", required=True, help="problem spec JSON file ('-' for stdin)")
        sp.add_argument("--shots", type=int, default=None, help="shots per estimate (default 10000)")
        sp.add_argument("--seed", type=int, default=None, help="RNG seed (default 42)")
        sp.add_argument("--epsilon-orth", type=float, default=None, help="orthogonality guard on |<phi|psi>|^2")
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    common(sub.add_parser("weak-value", help="forward/reverse weak values, modulus and phase"))
    common(sub.add_parser("effective-op", help="B = A P_psi A or B_rho = A rho A with structure analysis"))
    common(sub.add_parser("witness", help="state-specific error witness for exp(-i theta A)"))
    common(sub.add_parser("reproduce-appendix", help="shot-based check of the pure and mixed identities"), False)
    return p


COMMANDS = {
    "weak-value": cmd_weak_value,
    "effective-op": cmd_effective_op,
    "witness": cmd_witness,
    "reproduce-appendix": cmd_reproduce,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out, summary = COMMANDS[args.command](args)
    except WeakValError as exc:
        code = EXIT_INPUT if isinstance(exc, InputError) else EXIT_DOMAIN if isinstance(exc, DomainError) else EXIT_NUMERICAL
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
        if hasattr(exc, "residual"):
            err["residual"] = exc.residual
        if hasattr(exc, "overlap_sq"):
            err["overlap_sq"] = exc.overlap_sq
        sys.stdout.write(io.dumps(err))
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return code
    if args.format == "csv":
        if args.command != "witness":
            print("error: --format csv is only available for witness", file=sys.stderr)
            return EXIT_INPUT
        sys.stdout.write(witness_csv(out))
    else:
        sys.stdout.write(io.dumps(out))
    print(summary, file=sys.stderr)
    if args.command == "reproduce-appendix":
        return EXIT_OK if all(e["status"] == "PASS" for e in out["experiments"]) else EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())

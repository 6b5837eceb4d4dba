"""Command-line driver: protocol runs, fidelity averaging, POVM checks, sweeps.

Output is deterministic byte-for-byte for a fixed command line and seed:
records are emitted in trial order, floats through one fixed format, and
no environment state is consulted.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import bench, protocols
from .measurement import Povm, validate_povm
from .states import BlochAngles, GeneralWAmplitudes, haar_random_qubit, unknown_qubit
from .wpovm import (
    SQRT3_2,
    POVM_LABELS,
    WPovmParams,
    lambda_max,
    w_dual_basis,
    w_primal_basis,
)

PROTOCOLS = ("ghz-bm", "ghz-2q", "w-bm", "w-povm", "w-general-bm")

CSV_TRIAL_HEADER = "trial,protocol,theta,phi,alice_outcome,bob_outcome,conclusive,fidelity,classical_bits"

SUMMARY_KEYS = (
    "protocol",
    "params",
    "n_trials",
    "success_rate",
    "success_stderr",
    "avg_fidelity",
    "fidelity_stderr",
    "conclusive_part",
    "inconclusive_part",
    "seed",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _add_common(p: _Parser, protocol: bool = True):
    if protocol:
        p.add_argument("--protocol", choices=PROTOCOLS, required=True)
    p.add_argument("--theta", type=float, default=None, help="input polar angle in radians")
    p.add_argument("--phi", type=float, default=None, help="input azimuthal angle in radians")
    p.add_argument("--alpha2", type=float, default=None, help="|alpha|^2 shortcut: theta = 2*acos(sqrt(v)), phi = 0")
    p.add_argument("--a", type=float, default=SQRT3_2)
    p.add_argument("--a-prime", type=float, default=None, help="defaults to --a")
    p.add_argument("--lambda", dest="lambda_asym", type=float, default=2.0 / 3.0)
    p.add_argument("--w-amps", type=str, default=None, help="three comma-separated channel amplitudes a,b,c")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", type=str, default=None, help="write to this path instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> _Parser:
    parser = _Parser(prog="wteleport", description="Teleportation protocol simulator over GHZ and W channels.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run trials of one protocol and emit per-trial records")
    _add_common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_fid = sub.add_parser("fidelity", help="average fidelity over random inputs")
    _add_common(p_fid)
    p_fid.add_argument("--mode", choices=("mc", "grid"), default="mc")
    p_fid.add_argument("--nodes", type=int, default=bench.GRID_NODES, help="grid nodes per axis")
    p_fid.set_defaults(func=cmd_fidelity)

    p_val = sub.add_parser("validate-povm", help="positivity/completeness/duality report")
    p_val.add_argument("--a", type=float, default=SQRT3_2)
    p_val.add_argument("--a-prime", type=float, default=None)
    p_val.add_argument("--lambda", dest="lambda_asym", type=float, default=2.0 / 3.0)
    p_val.add_argument("--output", type=str, default=None)
    p_val.set_defaults(func=cmd_validate_povm)

    p_sw = sub.add_parser("sweep", help="sweep a POVM parameter and tabulate fidelities")
    p_sw.add_argument("--protocol", choices=("w-povm",), default="w-povm")
    p_sw.add_argument("--param", choices=("a", "lambda"), required=True)
    p_sw.add_argument("--from", dest="start", type=float, required=True)
    p_sw.add_argument("--to", dest="stop", type=float, required=True)
    p_sw.add_argument("--steps", type=int, required=True)
    p_sw.add_argument("--a", type=float, default=SQRT3_2)
    p_sw.add_argument("--lambda", dest="lambda_asym", type=float, default=2.0 / 3.0)
    p_sw.add_argument("--trials", type=int, default=10000)
    p_sw.add_argument("--seed", type=int, default=0)
    p_sw.add_argument("--output", type=str, default=None)
    p_sw.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sw.set_defaults(func=cmd_sweep)

    return parser


def _check_seed(seed: int) -> int:
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed {seed} outside unsigned 64-bit range")
    return seed


def _fixed_angles(args) -> BlochAngles | None:
    """Resolve --theta/--phi/--alpha2 into angles, or None for Haar inputs."""
    if args.alpha2 is not None:
        if args.theta is not None or args.phi is not None:
            raise ValueError("give either --alpha2 or --theta/--phi, not both")
        if not 0.0 <= args.alpha2 <= 1.0:
            raise ValueError(f"--alpha2 must lie in [0, 1], got {args.alpha2!r}")
        return BlochAngles(2.0 * math.acos(math.sqrt(args.alpha2)), 0.0)
    if args.theta is None and args.phi is None:
        return None
    return BlochAngles(args.theta or 0.0, args.phi or 0.0)


def _parse_w_amps(text: str) -> GeneralWAmplitudes:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"--w-amps needs three comma-separated values, got {text!r}")
    try:
        a, b, c = (float(x) for x in parts)
    except ValueError:
        raise ValueError(f"--w-amps values must be numbers, got {text!r}") from None
    return GeneralWAmplitudes(a, b, c)


def _protocol_setup(args):
    """Runner closure, distribution closure and parameter record for --protocol."""
    name = args.protocol
    a_prime = args.a_prime if args.a_prime is not None else args.a
    if name == "ghz-bm":
        return protocols.teleport_ghz_bm, protocols.ghz_bm_distribution, {}
    if name == "ghz-2q":
        return protocols.teleport_ghz_two_qubit, protocols.ghz_two_qubit_distribution, {}
    if name == "w-bm":
        return protocols.teleport_w_bm, protocols.w_bm_distribution, {}
    if name == "w-povm":
        params = WPovmParams(a=args.a, a_prime=a_prime, lambda_asym=args.lambda_asym)
        protocols._povm_for(params)  # raise early if infeasible
        return (
            lambda phi, rng: protocols.teleport_w_povm(phi, params, rng),
            lambda phi: protocols.w_povm_distribution(phi, params),
            {"a": params.a, "a_prime": params.a_prime, "lambda": params.lambda_asym},
        )
    if name == "w-general-bm":
        if args.w_amps is None:
            raise ValueError("w-general-bm requires --w-amps")
        amps = _parse_w_amps(args.w_amps)
        return (
            lambda phi, rng: protocols.teleport_w_general_bm(phi, amps, rng),
            lambda phi: protocols.w_general_bm_distribution(phi, amps),
            {"w_amps": [amps.a.real, amps.b.real, amps.c.real]},
        )
    raise ValueError(f"unknown protocol {name!r}")


def _summary_dict(name, params, stats, seed):
    return {
        "protocol": name,
        "params": params,
        "n_trials": stats.n_trials,
        "success_rate": stats.success_rate,
        "success_stderr": stats.success_stderr,
        "avg_fidelity": stats.avg_fidelity,
        "fidelity_stderr": stats.fidelity_stderr,
        "conclusive_part": stats.conclusive_part,
        "inconclusive_part": stats.inconclusive_part,
        "seed": seed,
    }


def cmd_run(args) -> tuple[int, str]:
    seed = _check_seed(args.seed)
    if args.trials < 1:
        raise ValueError(f"--trials must be positive, got {args.trials}")
    runner, _, params = _protocol_setup(args)
    fixed = _fixed_angles(args)
    if fixed is not None:
        params = dict(params, theta=fixed.theta, phi=fixed.phi)
        fixed_state = unknown_qubit(fixed)
    else:
        params = dict(params, input="haar")

    records = []
    fids, fids_sq = [], []
    con, inc = [], []
    successes = 0
    for i in range(args.trials):
        rng = bench.trial_rng(seed, i)
        if fixed is not None:
            angles, phi = fixed, fixed_state
        else:
            angles, phi = haar_random_qubit(rng)
        out = runner(phi, rng)
        records.append(
            {
                "trial": i,
                "protocol": out.protocol,
                "theta": angles.theta,
                "phi": angles.phi,
                "alice_outcome": out.alice_outcome,
                "bob_outcome": out.bob_outcome,
                "conclusive": out.conclusive,
                "fidelity": out.fidelity,
                "classical_bits": out.classical_bits,
            }
        )
        fids.append(out.fidelity)
        fids_sq.append(out.fidelity**2)
        (con if out.conclusive else inc).append(out.fidelity)
        successes += out.conclusive

    n = args.trials
    stats = bench.TrialStats(
        n_trials=n,
        success_rate=successes / n,
        success_stderr=bench._stderr(successes, successes, n),
        avg_fidelity=math.fsum(fids) / n,
        fidelity_stderr=bench._stderr(math.fsum(fids), math.fsum(fids_sq), n),
        conclusive_part=math.fsum(con) / n,
        inconclusive_part=math.fsum(inc) / n,
    )
    summary = _summary_dict(args.protocol, params, stats, seed)

    if args.format == "json":
        text = json.dumps({"trials": records, "summary": summary}, indent=2) + "\n"
    else:
        lines = [CSV_TRIAL_HEADER]
        for r in records:
            lines.append(
                ",".join(
                    (
                        str(r["trial"]),
                        r["protocol"],
                        _fmt(r["theta"]),
                        _fmt(r["phi"]),
                        r["alice_outcome"],
                        r["bob_outcome"] or "",
                        _fmt(r["conclusive"]),
                        _fmt(r["fidelity"]),
                        str(r["classical_bits"]),
                    )
                )
            )
        lines.append("# " + json.dumps(summary))
        text = "\n".join(lines) + "\n"
    return 0, text


def cmd_fidelity(args) -> tuple[int, str]:
    seed = _check_seed(args.seed)
    if args.trials < 1:
        raise ValueError(f"--trials must be positive, got {args.trials}")
    runner, distribution, params = _protocol_setup(args)
    analytic_kwargs = {}
    if args.protocol == "w-povm":
        analytic_kwargs = {"lambda_asym": args.lambda_asym, "a": args.a}
    elif args.protocol == "w-general-bm":
        analytic_kwargs = {"amps": _parse_w_amps(args.w_amps)}
    analytic = bench.avg_fidelity_analytic(args.protocol, **analytic_kwargs)

    if args.mode == "grid":
        if args.nodes < 1:
            raise ValueError(f"--nodes must be positive, got {args.nodes}")
        stats = bench.avg_fidelity_grid(distribution, args.nodes)
    else:
        stats = bench.avg_fidelity_mc(runner, args.trials, seed)

    params = dict(params, mode=args.mode)
    summary = _summary_dict(args.protocol, params, stats, seed)
    summary["analytic"] = analytic

    if args.format == "json":
        text = json.dumps(summary, indent=2) + "\n"
    else:
        keys = [k for k in SUMMARY_KEYS if k != "params"] + ["analytic"]
        header = ",".join(keys)
        row = ",".join(_fmt(summary[k]) for k in keys)
        text = header + "\n" + row + "\n"
    return 0, text


def cmd_validate_povm(args) -> tuple[int, str]:
    a_prime = args.a_prime if args.a_prime is not None else args.a
    params = WPovmParams(a=args.a, a_prime=a_prime, lambda_asym=args.lambda_asym)
    lam = params.lambda_asym
    duals = w_dual_basis(params.a, params.a_prime)
    primal = w_primal_basis()
    elements = [lam * np.outer(d, d.conj()) for d in duals]
    elements.append(np.eye(8, dtype=np.complex128) - sum(elements))
    povm = Povm.from_elements(elements, POVM_LABELS)
    report = validate_povm(povm)
    duality = max(
        abs(np.vdot(d, p) - (1.0 if i == j else 0.0))
        for i, d in enumerate(duals)
        for j, p in enumerate(primal)
    )

    lines = [
        f"a: {_fmt(params.a)}",
        f"a_prime: {_fmt(params.a_prime)}",
        f"lambda: {_fmt(lam)}",
        f"lambda_max_a: {_fmt(lambda_max(params.a))}",
        f"lambda_max_a_prime: {_fmt(lambda_max(params.a_prime))}",
        f"duality_residual: {_fmt(float(duality))}",
        f"completeness_residual: {_fmt(report.completeness_residual)}",
    ]
    for label, low in zip(POVM_LABELS, report.min_eigenvalues):
        lines.append(f"min_eigenvalue_{label}: {_fmt(low)}")
    lines.append(f"kraus_residual_max: {_fmt(max(report.kraus_residuals))}")
    lines.append(f"valid: {_fmt(report.passed)}")
    return (0 if report.passed else 1), "\n".join(lines) + "\n"


def cmd_sweep(args) -> tuple[int, str]:
    seed = _check_seed(args.seed)
    if args.steps < 1:
        raise ValueError(f"--steps must be positive, got {args.steps}")
    if args.trials < 1:
        raise ValueError(f"--trials must be positive, got {args.trials}")
    values = np.linspace(args.start, args.stop, args.steps)
    rows = bench.sweep(
        args.param,
        values,
        n_trials=args.trials,
        master_seed=seed,
        a=args.a,
        lambda_asym=args.lambda_asym,
    )
    if args.format == "json":
        payload = [
            {
                "param": r.param,
                "value": r.value,
                "feasible": r.feasible,
                "lambda_max": r.lambda_max,
                "analytic_fidelity": r.analytic_fidelity,
                "mc_fidelity": r.mc_fidelity,
                "stderr": r.stderr,
                "success_rate": r.success_rate,
            }
            for r in rows
        ]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = ["param,value,feasible,lambda_max,analytic_fidelity,mc_fidelity,stderr,success_rate"]
        for r in rows:
            lines.append(
                ",".join(
                    (
                        r.param,
                        _fmt(r.value),
                        _fmt(r.feasible),
                        _fmt(r.lambda_max),
                        _fmt(r.analytic_fidelity),
                        _fmt(r.mc_fidelity),
                        _fmt(r.stderr),
                        _fmt(r.success_rate),
                    )
                )
            )
        text = "\n".join(lines) + "\n"
    return 0, text


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, text = args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

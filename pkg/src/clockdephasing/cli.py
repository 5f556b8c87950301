"""Command-line entry point.

Exit status: 0 on success, 1 when a validation or bound check fails, 2 on
usage errors or malformed input files.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import channels, circuit, cooling, metrics, ticks, validation
from .qcore import hermitian_eigendecomposition

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _shared(p, formats=("csv", "json"), default="json", seed=False):
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--seed", type=_u64, required=seed, help="RNG seed (u64)")


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _table(args, header, rows):
    if args.format == "csv":
        _emit(args, _csv_text(header, rows))
    else:
        _emit(args, _json_text([dict(zip(header, r)) for r in rows]))


# -- distributions -----------------------------------------------------------

def _add_dist_flags(p):
    p.add_argument("--dist", choices=["dirac", "gaussian", "exponential", "comb", "empirical"],
                   default="gaussian")
    p.add_argument("--tau", type=float, default=math.pi, help="mean tick time")
    p.add_argument("--sigma", type=float, help="Gaussian standard deviation")
    p.add_argument("--accuracy", type=float, help="clock accuracy (alternative to --sigma)")
    p.add_argument("--comb-n", type=int, default=2)
    p.add_argument("--eps", type=float, help="comb rate")
    p.add_argument("--ticks-csv", help="two-column time_seconds,weight file")


def _dist_from_args(args) -> ticks.TickDistribution:
    kind = args.dist
    if kind == "dirac":
        return ticks.Dirac(args.tau)
    if kind == "gaussian":
        if args.sigma is not None:
            return ticks.Gaussian(args.tau, args.sigma)
        if args.accuracy is not None:
            return ticks.Gaussian.from_accuracy(args.tau, args.accuracy)
        raise UsageError("gaussian timer needs --sigma or --accuracy")
    if kind == "exponential":
        return ticks.Exponential(args.tau)
    if kind == "comb":
        if args.eps is None:
            raise UsageError("comb timer needs --eps")
        return ticks.Comb(args.comb_n, args.eps)
    if not args.ticks_csv:
        raise UsageError("empirical timer needs --ticks-csv")
    return ticks.load_empirical_csv(args.ticks_csv)


def _load_hamiltonian(path) -> np.ndarray:
    """Accept ``{"matrix": rows}`` or bare rows; entries are numbers or ``[re, im]``."""
    with open(path) as fh:
        data = json.load(fh)
    rows = data["matrix"] if isinstance(data, dict) else data
    arr = np.asarray(rows, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim == 2:
        return arr.astype(complex)
    raise ValueError(f"{path}: expected a square matrix")


BUILTINS = {
    "cnot": lambda a: channels.cnot_generator(),
    "swap": lambda a: channels.swap_generator(),
    "qubit": lambda a: channels.qubit_generator(a.omega),
}


# -- subcommands -------------------------------------------------------------

def cmd_channel(args) -> int:
    if args.format != "json":
        raise UsageError("channel dumps are JSON only")
    if (args.builtin is None) == (args.hamiltonian is None):
        raise UsageError("give exactly one of --builtin or --hamiltonian")
    h = BUILTINS[args.builtin](args) if args.builtin else _load_hamiltonian(args.hamiltonian)
    ch = channels.build_channel(hermitian_eigendecomposition(h), _dist_from_args(args))
    text = channels.dumps_channel(ch) + "\n"
    if not channels.is_cptp(channels.loads_channel(text), ch.dim):
        print("channel failed CPTP validation", file=sys.stderr)
        _emit(args, text)
        return EXIT_FAIL
    _emit(args, text)
    return EXIT_OK


GATES = ("single", "cnot-subspace", "cnot-full")


def cmd_fidelity(args) -> int:
    if args.gamma is not None:
        gamma = args.gamma
    elif args.accuracy is not None:
        gamma = metrics.gamma_from_pulse(args.theta, args.accuracy)
    else:
        raise UsageError("give --gamma or --accuracy")
    if gamma < 0:
        raise UsageError("gamma must be nonnegative")
    if args.gate == "cnot-full":
        d, kraus, closed = 4, channels.cnot_dephasing_kraus(gamma), metrics.cnot_fullspace_fidelity(gamma)
    else:
        d, kraus = 2, channels.qubit_dephasing_kraus(gamma)
        closed = (2.0 + math.exp(-gamma)) / 3.0
    record = {
        "gate": args.gate,
        "gamma": gamma,
        "closed_form": closed,
        "kraus_trace": metrics.average_gate_fidelity_from_kraus(kraus, d).value,
    }
    status = EXIT_OK
    if args.mc:
        if args.seed is None:
            raise UsageError("--mc requires --seed")
        est = metrics.haar_average_fidelity(
            lambda r: channels.apply_kraus(kraus, r), None, d, args.mc, np.random.default_rng(args.seed)
        )
        record.update(
            mc_estimate=est.value,
            mc_standard_error=est.standard_error,
            mc_agrees=bool(abs(est.value - closed) <= 3 * est.standard_error + 1e-12),
        )
        status = EXIT_OK if record["mc_agrees"] else EXIT_FAIL
    if args.format == "csv":
        header = list(record)
        _emit(args, _csv_text(header, [[record[k] for k in header]]))
    else:
        _emit(args, _json_text(record))
    return status


def cmd_bound(args) -> int:
    if args.max_cnots < 0 or args.n < 1:
        raise UsageError("need n >= 1 and --max-cnots >= 0")
    step = args.step or max(1, args.max_cnots // 200)
    rows = [
        (L, acc, metrics.circuit_fidelity_bound(args.n, L, acc))
        for acc in args.accuracy
        for L in range(0, args.max_cnots + 1, step)
    ]
    _table(args, ["L", "N", "bound"], rows)
    return EXIT_OK


def cmd_budget(args) -> int:
    try:
        if args.cnots is not None:
            acc = metrics.required_accuracy(args.n, args.cnots, args.threshold)
            record = {
                "n": args.n,
                "L": args.cnots,
                "threshold": args.threshold,
                "required_N": acc,
                "asymptotic_N": metrics.asymptotic_required_accuracy(args.cnots, args.threshold),
            }
            if args.tau is not None:
                record["tau"] = args.tau
                record["sigma"] = metrics.timing_uncertainty(args.tau, acc)
            if args.format == "csv":
                header = list(record)
                _emit(args, _csv_text(header, [[record[k] for k in header]]))
            else:
                _emit(args, _json_text(record))
            return EXIT_OK
        depths = args.depths or np.unique(np.round(np.logspace(0, math.log10(args.max_depth), 25))).astype(int).tolist()
    except ValueError as exc:
        print(f"infeasible budget: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rows, skipped = [], 0
    for lt in args.layer_sizes:
        for m in depths:
            try:
                rows.append((m, lt, metrics.required_accuracy(args.n, m * lt, args.threshold)))
            except ValueError:
                # too few CNOTs for the bound to fall to the threshold at any accuracy
                skipped += 1
    if skipped:
        print(f"skipped {skipped} (m, l_t) points where the threshold is unreachable", file=sys.stderr)
    if not rows:
        print("infeasible budget: no (m, l_t) point reaches the threshold", file=sys.stderr)
        return EXIT_USAGE
    _table(args, ["m", "l_t", "required_N"], rows)
    return EXIT_OK


def cmd_circuit_sim(args) -> int:
    spec = circuit.CircuitSpec.load(args.spec)
    est = circuit.empirical_average_fidelity(
        spec, args.accuracy, args.samples, np.random.default_rng(args.seed)
    )
    check = circuit.bound_check(est, spec, args.accuracy)
    record = {
        "n": spec.n,
        "L": spec.total_cnots,
        "depth": spec.depth,
        "N": args.accuracy,
        "samples": args.samples,
        "seed": args.seed,
        **check,
        "status": "PASS" if check["pass"] else "FAIL",
    }
    if args.format == "csv":
        header = list(record)
        _emit(args, _csv_text(header, [[record[k] for k in header]]))
    else:
        _emit(args, _json_text(record))
    return EXIT_OK if check["pass"] else EXIT_FAIL


def cmd_cooling(args) -> int:
    with open(args.config) as fh:
        cfg = cooling.CoolingConfig.from_json(json.load(fh))
    h = cfg.h if args.rate is None else args.rate
    if h <= 0:
        raise UsageError("--rate must be positive")
    if args.sigmas:
        ns = list(range(args.n_max + 1))
        rows = cooling.rate_rows(cfg.replace(h=h), args.sigmas, ns)
        _table(args, ["sigma", "n", "rate"], rows)
        return EXIT_OK
    traj = cooling.trajectory(cfg, args.n_max)
    rates = cooling.cooling_rate(cfg, np.arange(args.n_max + 1), h)
    rows = [(n, float(traj[n]), float(np.atleast_1d(rates)[n])) for n in range(args.n_max + 1)]
    _table(args, ["n", "r", "rate"], rows)
    print(f"final r = {traj[-1]!r} (r_v = {cfg.r_v!r}, gap {cfg.r_v - traj[-1]:.3e})", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.format != "json":
        raise UsageError("validation reports are JSON only")
    report = validation.run(args.suite, args.seed, args.mc_samples)
    _emit(args, _json_text(report))
    return EXIT_OK if report["pass"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clockdephasing",
        description="Consequences of imperfect timekeeping for quantum gates, circuits and cooling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("channel", help="dump the dephasing channel of a generator")
    _shared(p)
    p.add_argument("--builtin", choices=sorted(BUILTINS))
    p.add_argument("--hamiltonian", help="JSON matrix file")
    p.add_argument("--omega", type=float, default=1.0, help="qubit gap for --builtin qubit")
    _add_dist_flags(p)
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("fidelity", help="average gate fidelity of an ill-timed gate")
    _shared(p)
    p.add_argument("--gate", choices=GATES, default="single")
    p.add_argument("--theta", type=float, default=math.pi, help="pulse area")
    p.add_argument("--accuracy", "-N", type=float, help="clock accuracy (inf allowed)")
    p.add_argument("--gamma", type=float, help="dephasing magnitude")
    p.add_argument("--mc", type=int, default=0, help="Haar samples for a Monte Carlo check")
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("bound", help="circuit fidelity bound against CNOT count")
    _shared(p, default="csv")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--accuracy", "-N", type=float, nargs="+", default=[1e3, 1e4, 3.6e4, 1e5])
    p.add_argument("--max-cnots", type=int, default=20000)
    p.add_argument("--step", type=int)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("budget", help="clock accuracy needed to keep the bound above a threshold")
    _shared(p, default="csv")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--cnots", "-L", type=int, help="single total CNOT count")
    p.add_argument("--tau", type=float, help="gate duration in seconds (single-L mode)")
    p.add_argument("--layer-sizes", type=int, nargs="+", default=list(circuit.DEFAULT_LAYER_SIZES))
    p.add_argument("--depths", type=int, nargs="+")
    p.add_argument("--max-depth", type=int, default=10 ** 6)
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("circuit-sim", help="noisy density-matrix simulation vs the bound")
    _shared(p, seed=True)
    p.add_argument("spec", help="circuit JSON {\"n\": int, \"layers\": [[[c, t], ...], ...]}")
    p.add_argument("--accuracy", "-N", type=float, required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.set_defaults(func=cmd_circuit_sim)

    p = sub.add_parser("cooling", help="cooling trajectory and rate")
    _shared(p, default="csv")
    p.add_argument("config", help="JSON with r_s, r_v, p_v and accuracy or sigma")
    p.add_argument("--n-max", type=int, default=100)
    p.add_argument("--rate", type=float, help="central-difference step h")
    p.add_argument("--sigmas", type=float, nargs="+", help="emit sigma,n,rate rows for these timers")
    p.set_defaults(func=cmd_cooling)

    p = sub.add_parser("validate", help="run the oracle battery")
    _shared(p, seed=True)
    p.add_argument("--suite", choices=list(validation.SUITES) + ["all"], default="all")
    p.add_argument("--mc-samples", type=int, default=200_000)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

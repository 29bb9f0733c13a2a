"""Command-line front end.

Subcommands: measure, decompose, apply, evolve, enhance, scan, profile,
verify.  States are given inline as bell:c1,c2,c3 or as JSON files;
channels as builtin names (amplitude_damping:0.3, depolarizing:0.5,
discord_raising, identity) or JSON files.  Triples with a leading minus
need the equals form, e.g. --c=-1,0,0.  Numbers print with 12
significant digits so identical invocations give byte-identical output.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import channels, enhancement, measures, oracles, states

_INLINE_CHANNELS = ("amplitude_damping", "depolarizing", "bit_flip",
                    "phase_flip", "bit_phase_flip", "discord_raising",
                    "identity")


def _round12(x):
    if isinstance(x, bool):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(f"{float(x):.12g}")
    if isinstance(x, np.ndarray):
        return _round12(x.tolist())
    if isinstance(x, (list, tuple)):
        return [_round12(v) for v in x]
    if isinstance(x, dict):
        return {k: _round12(v) for k, v in x.items()}
    return x


def _print_json(payload) -> None:
    print(json.dumps(_round12(payload), indent=2))


def _parse_triple(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"expected c1,c2,c3 but got {text!r}")
    return tuple(float(p) for p in parts)


def _load_state(arg: str) -> states.TwoQubitState:
    if arg.startswith("bell:"):
        return states.bell_diagonal(_parse_triple(arg[len("bell:"):]))
    with open(arg) as fh:
        return states.state_from_json(json.load(fh))


def _load_channel(arg: str) -> channels.QubitChannel:
    name, _, prob = arg.partition(":")
    if name in _INLINE_CHANNELS:
        if name == "identity":
            if prob:
                raise ValueError("identity takes no parameter")
            return channels.identity_channel()
        if name == "discord_raising":
            if prob:
                raise ValueError("discord_raising takes no parameter")
            return channels.discord_raising()
        if not prob:
            raise ValueError(f"channel {name} needs a parameter, e.g. {name}:0.3")
        return channels.channel_from_json({"type": name, "p": float(prob)})
    with open(arg) as fh:
        return channels.channel_from_json(json.load(fh))


def _open_out(path):
    return open(path, "w") if path else sys.stdout


# ---------------------------------------------------------------------------
# Subcommand handlers

def _cmd_measure(args) -> int:
    s = _load_state(args.state)
    _print_json(dataclasses.asdict(measures.measure_pair(s)))
    return 0


def _cmd_decompose(args) -> int:
    if args.state:
        d = _load_state(args.state).decomposition
        _print_json({"a": d.a, "b": d.b, "e": d.e})
    else:
        fac = channels.factorize(_load_channel(args.channel))
        _print_json({"r1": fac.r1, "r2": fac.r2, "diag": fac.diag,
                     "sign": fac.sign, "d": fac.d})
    return 0


def _cmd_apply(args) -> int:
    s = _load_state(args.state)
    ch_a = _load_channel(args.channel_a)
    ch_b = _load_channel(args.channel_b) if args.channel_b else channels.identity_channel()
    out = channels.apply_local(ch_a, ch_b, s)
    _print_json({"state": states.state_to_json(out),
                 "measures": dataclasses.asdict(measures.measure_pair(out))})
    return 0


def _cmd_evolve(args) -> int:
    c = _parse_triple(args.c)
    trace = enhancement.trace_evolution(c, args.gamma_t_max, steps=args.steps)
    fh = _open_out(args.out)
    try:
        enhancement.write_trace_csv(trace, fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def _cmd_enhance(args) -> int:
    c = _parse_triple(args.c)
    rep = enhancement.enhance_report(c)
    payload = dataclasses.asdict(rep)
    if rep.enhancible:
        p_best, f_best = enhancement.sweep_best_p(c)
        payload["sweep"] = {"p_best": p_best, "f_best": f_best,
                            "p_gap": abs(p_best - rep.p_opt),
                            "f_gap": f_best - rep.f_after}
    _print_json(payload)
    return 0


def _threads_from_env():
    raw = os.environ.get("RSPLAB_THREADS")
    if not raw:
        return None
    n = int(raw)
    if n < 1:
        raise ValueError("RSPLAB_THREADS must be a positive integer")
    return n


def _cmd_scan(args) -> int:
    result = enhancement.scan_tetrahedron(resolution=args.resolution,
                                          threads=_threads_from_env())
    fh = _open_out(args.out)
    try:
        enhancement.write_scan_csv(result, fh, include_summary=True)
    finally:
        if fh is not sys.stdout:
            fh.close()
    if args.out:
        for line in enhancement.scan_summary_lines(result):
            print(line)
    return 0


def _cmd_profile(args) -> int:
    rows = enhancement.profile_line(args.points)
    fh = _open_out(args.out)
    try:
        enhancement.write_profile_csv(rows, fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def _verify_reports(suite: str, seed: int, trials):
    reports = []
    if suite in ("protocol", "all"):
        reports.append(("protocol",
                        oracles.protocol_suite(trials or 50, seed=seed)))
    if suite in ("gmqd", "all"):
        reports.append(("gmqd", oracles.gmqd_suite(trials or 20, seed=seed)))
    if suite in ("monotonicity", "all"):
        reports.append(("monotonicity",
                        oracles.unital_monotonicity_suite(trials or 10000,
                                                          seed=seed)))
    if suite in ("witness", "all"):
        reports.append(("witness", oracles.nonunital_increase_witness()))
        reports.append(("discord_raising", oracles.discord_raising_check()))
    return reports


def _cmd_verify(args) -> int:
    reports = _verify_reports(args.suite, args.seed, args.trials)
    _print_json({label: rep.as_dict() for label, rep in reports})
    failed = [(label, rep) for label, rep in reports if not rep.passed]
    for label, rep in failed:
        print(f"verification failed: {label}: {rep.worst_case}", file=sys.stderr)
    return 1 if failed else 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rsplab",
        description="Remote-state-preparation fidelity and geometric "
                    "discord toolkit for two-qubit states.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="f_rsp and d_g of a state")
    p.add_argument("--state", required=True,
                   help="bell:c1,c2,c3 or a state JSON file")
    p.set_defaults(func=_cmd_measure)

    p = sub.add_parser("decompose",
                       help="Pauli decomposition of a state, or rotation-"
                            "diagonal factorization of a channel")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--state", help="bell:c1,c2,c3 or a state JSON file")
    g.add_argument("--channel", help="builtin name or channel JSON file")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("apply", help="apply local channels to a state")
    p.add_argument("--state", required=True)
    p.add_argument("--channel-a", required=True,
                   help="channel on the first qubit")
    p.add_argument("--channel-b", default=None,
                   help="channel on the second qubit (default identity)")
    p.set_defaults(func=_cmd_apply)

    p = sub.add_parser("evolve",
                       help="CSV trace of both measures under symmetric "
                            "amplitude damping")
    p.add_argument("--c", required=True, help="c1,c2,c3")
    p.add_argument("--gamma-t-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=2001)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("enhance", help="enhancibility report for a "
                                       "Bell-diagonal state")
    p.add_argument("--c", required=True, help="c1,c2,c3")
    p.set_defaults(func=_cmd_enhance)

    p = sub.add_parser("scan", help="enhancibility scan of the Bell "
                                    "tetrahedron")
    p.add_argument("--resolution", type=int, default=81)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("profile", help="f before/after optimal damping "
                                       "along the (c1,-1,c1) edge")
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("verify", help="run oracle suites")
    p.add_argument("--suite", required=True,
                   choices=["protocol", "gmqd", "monotonicity", "witness",
                            "all"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=None)
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

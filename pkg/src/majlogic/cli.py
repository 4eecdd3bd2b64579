"""Command-line entry point: ``majlogic {code,analytic,sim,bounds} ...``.

Curves are written as CSV, scalar reports and verdicts as JSON. When
``--out`` names a file, a ``<out>.manifest.json`` is written next to it; its
``runtime`` section holds everything that may differ between identical runs
(timestamps, elapsed time, worker count).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__, analytic, bounds
from .adversary import MAX_ITERS, adversarial_guarantee_check
from .codes import build_ag, build_pg, encoder_from_parity, girth, read_alist, to_alist
from .errors import DomainError
from .fault import parse_model
from .sim import (
    OSMAJ,
    AllZero,
    AlternateComplement,
    BitFlip,
    ChannelParams,
    ExperimentConfig,
    RandomCodewords,
    Repeat,
    default_threads,
    run_ber_experiment,
)
from .rng import stream


class UsageError(Exception):
    pass


def parse_grid(text: str, linear: bool = False) -> list[float]:
    """``a:b:steps`` (log-spaced unless ``linear``), a comma list, or one value."""
    try:
        if ":" in text:
            a, b, steps = text.split(":")
            a, b, steps = float(a), float(b), int(steps)
            if steps < 1:
                raise UsageError(f"grid {text!r}: steps must be >= 1")
            if linear:
                return [float(x) for x in np.linspace(a, b, steps)]
            if a <= 0 or b <= 0:
                raise UsageError(f"grid {text!r}: log-spaced grids need positive endpoints (use --linear)")
            return [float(x) for x in np.geomspace(a, b, steps)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}; expected a:b:steps or a comma list") from None


def _num(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_num(row[c]) for c in columns])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(args, text: str, config: dict) -> None:
    if args.out is None:
        sys.stdout.write(text)
        return
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    manifest = {
        "command": args.argv,
        "config": config,
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "outputs": [args.out],
        "runtime": {
            "started": args.started,
            "elapsed_s": time.perf_counter() - args.t0,
            "threads": getattr(args, "threads_used", None),
        },
    }
    with open(args.out + ".manifest.json", "w", encoding="utf-8") as fh:
        fh.write(_json(manifest))


def _load_code(path: str):
    try:
        return read_alist(path)
    except OSError as exc:
        raise DomainError(f"cannot read code file {path!r}: {exc.strerror or exc}") from None


# -- code --------------------------------------------------------------------


def cmd_code_build(args) -> None:
    g = build_pg(args.s) if args.family == "pg" else build_ag(args.s)
    _emit(args, to_alist(g), {"family": args.family, "s": args.s})


def cmd_code_info(args) -> None:
    g = _load_code(args.path)
    gi = girth(g)
    info = {
        "n": g.n,
        "m": g.m,
        "gamma": g.gamma,
        "rho": g.rho,
        "girth": None if math.isinf(gi) else int(gi),
        "k": int(encoder_from_parity(g).shape[0]),
    }
    _emit(args, _json(info), {"path": args.path})


# -- analytic ----------------------------------------------------------------


def cmd_analytic_sweep(args) -> None:
    ps = parse_grid(args.p_grid, args.linear)
    rows = analytic.sweep(args.gamma, args.rho, args.eps_bar, ps, args.model)
    config = {"gamma": args.gamma, "rho": args.rho, "eps_bar": args.eps_bar, "p": ps, "model": args.model}
    _emit(args, _csv(rows, ["p", "ber_lower", "ber_upper", "F"]), config)


# -- sim ---------------------------------------------------------------------


def _parse_decoder(text: str, first_iter_reliable: bool):
    if text == "osmaj":
        return OSMAJ(first_iter_reliable)
    kind, _, iters = text.partition(":")
    if kind == "bitflip" and iters:
        try:
            return BitFlip(int(iters), first_iter_reliable)
        except ValueError:
            pass
    raise UsageError(f"unknown decoder {text!r} (expected osmaj or bitflip:ITERS)")


def _policy(args, graph):
    if args.policy == "zero":
        return AllZero()
    if args.policy == "repeat":
        if args.codeword_seed is None:
            return Repeat(tuple([0] * graph.n))
        basis = encoder_from_parity(graph)
        coeffs = stream(args.codeword_seed, "repeat-codeword").rows(0, 1, max(basis.shape[0], 1))[0]
        word = (coeffs[: basis.shape[0]] < 0.5).astype(np.int64) @ basis.astype(np.int64) & 1
        return Repeat(tuple(int(b) for b in word))
    if args.policy == "altcomp":
        return AlternateComplement()
    return RandomCodewords(args.seed if args.codeword_seed is None else args.codeword_seed)


def cmd_sim_ber(args) -> None:
    graph = _load_code(args.code)
    model = parse_model(args.model)
    decoder = _parse_decoder(args.decoder, args.first_iter_reliable)
    policy = _policy(args, graph)
    ps = parse_grid(args.p, args.linear)
    threads = args.threads if args.threads is not None else default_threads()
    args.threads_used = threads
    min_errors = args.min_errors or None
    rows = []
    for p in ps:
        cfg = ExperimentConfig(graph, model, ChannelParams(p), policy, decoder, args.trials, args.seed, min_errors)
        st = run_ber_experiment(cfg, threads)
        rows.append(
            {
                "p": p,
                "trials": st.trials_run,
                "bit_errors": st.bit_errors,
                "frame_errors": st.frame_errors,
                "ber": st.ber,
                "fer": st.fer,
                "ci95_ber": st.ci95_ber,
            }
        )
        if args.progress:
            print(f"p={p:g} trials={st.trials_run} ber={st.ber:.3e}", file=sys.stderr)
    config = {
        "code": args.code,
        "model": args.model,
        "p": ps,
        "policy": args.policy,
        "codeword_seed": args.codeword_seed,
        "decoder": args.decoder,
        "first_iter_reliable": args.first_iter_reliable,
        "trials": args.trials,
        "min_errors": min_errors,
    }
    cols = ["p", "trials", "bit_errors", "frame_errors", "ber", "fer", "ci95_ber"]
    _emit(args, _csv(rows, cols), config)


def cmd_sim_verify(args) -> None:
    graph = _load_code(args.code)
    threads = args.threads if args.threads is not None else default_threads()
    args.threads_used = threads
    verdict = adversarial_guarantee_check(
        graph, args.weight, args.budget, args.max_iters, adversary=not args.no_adversary, threads=threads
    )
    config = {
        "code": args.code,
        "weight": args.weight,
        "budget": args.budget,
        "max_iters": args.max_iters,
        "adversary": not args.no_adversary,
    }
    _emit(args, _json(verdict.to_dict()), config)


# -- bounds ------------------------------------------------------------------


def cmd_bounds_expander(args) -> None:
    opt = bounds.optimal_alpha_total(args.rho, args.cxor_frac)
    zc = bounds.zero_crossing(args.rho)
    fracs = np.linspace(0.0, 2.0 * zc, args.samples)
    out = opt.to_dict()
    out["zero_crossing"] = zc
    out["curve"] = bounds.alpha_total_curve(args.rho, fracs)
    _emit(args, _json(out), {"rho": args.rho, "cxor_frac": args.cxor_frac, "samples": args.samples})


def cmd_bounds_girth(args) -> None:
    cap = bounds.theorem3_capacity(args.gamma, args.girth, args.cxor)
    out = {
        "gamma": args.gamma,
        "girth": args.girth,
        "c_xor": args.cxor,
        "moore_n0": bounds.moore_n0(args.gamma / 4.0, args.girth // 2),
        "capacity": cap,
        "correctable_weight": bounds.correctable_weight(cap),
    }
    if args.compare_osmaj:
        out["osmaj_capability"] = bounds.osmaj_comparison(args.gamma, args.cxor)
    _emit(args, _json(out), {"gamma": args.gamma, "girth": args.girth, "cxor": args.cxor})


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument(
        "--threads", type=int, default=None, help="worker count (default: $MAJLOGIC_THREADS or CPU count)"
    )

    ap = argparse.ArgumentParser(prog="majlogic", description="Majority-logic LDPC decoding with faulty gates.")
    ap.add_argument("--version", action="version", version=__version__)
    top = ap.add_subparsers(dest="group", required=True)

    code = top.add_parser("code", help="build and inspect codes").add_subparsers(dest="cmd", required=True)
    p = code.add_parser("build", parents=[common], help="finite-geometry code as alist")
    p.add_argument("--family", choices=["pg", "ag"], required=True)
    p.add_argument("--s", type=int, required=True)
    p.set_defaults(func=cmd_code_build)
    p = code.add_parser("info", parents=[common], help="n, m, gamma, rho, girth as JSON")
    p.add_argument("path")
    p.set_defaults(func=cmd_code_info)

    an = top.add_parser("analytic", help="analytic BER").add_subparsers(dest="cmd", required=True)
    p = an.add_parser("sweep", parents=[common], help="BER bounds over a p grid (CSV)")
    p.add_argument("--gamma", type=int, required=True)
    p.add_argument("--rho", type=int, required=True)
    p.add_argument("--eps-bar", type=float, required=True)
    p.add_argument("--p-grid", required=True, help="a:b:steps (log-spaced) or comma list")
    p.add_argument("--linear", action="store_true", help="linear spacing for a:b:steps")
    p.add_argument("--model", choices=["gos-bounds", "vn", "fault-free"], default="gos-bounds")
    p.set_defaults(func=cmd_analytic_sweep)

    sm = top.add_parser("sim", help="Monte Carlo simulation").add_subparsers(dest="cmd", required=True)
    p = sm.add_parser("ber", parents=[common], help="simulated BER over a p grid (CSV)")
    p.add_argument("--code", required=True)
    p.add_argument("--model", required=True, help="reliable, vn:EPS, gos:EPS or table:PATH")
    p.add_argument("--p", required=True, help="a:b:steps (log-spaced) or comma list")
    p.add_argument("--linear", action="store_true")
    p.add_argument("--policy", choices=["zero", "repeat", "altcomp", "random"], default="zero")
    p.add_argument("--codeword-seed", type=int, default=None, help="codeword choice for repeat/random")
    p.add_argument("--decoder", default="osmaj", help="osmaj or bitflip:ITERS")
    p.add_argument("--first-iter-reliable", action="store_true")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--min-errors", type=int, default=100, help="frame-error early-stop target (0 disables)")
    p.add_argument("--progress", action="store_true")
    p.set_defaults(func=cmd_sim_ber)
    p = sm.add_parser("verify", parents=[common], help="exhaustive worst-case correction check (JSON)")
    p.add_argument("--code", required=True)
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--budget", type=int, default=10**6)
    p.add_argument("--max-iters", type=int, default=MAX_ITERS)
    p.add_argument("--no-adversary", action="store_true", help="all gates reliable")
    p.set_defaults(func=cmd_sim_verify)

    bd = top.add_parser("bounds", help="guaranteed-correction bounds").add_subparsers(dest="cmd", required=True)
    p = bd.add_parser("expander", parents=[common], help="optimal correctable fraction (JSON)")
    p.add_argument("--rho", type=int, required=True)
    p.add_argument("--cxor-frac", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=41)
    p.set_defaults(func=cmd_bounds_expander)
    p = bd.add_parser("girth", parents=[common], help="girth-based capacity (JSON)")
    p.add_argument("--gamma", type=int, required=True)
    p.add_argument("--girth", type=int, required=True)
    p.add_argument("--cxor", type=float, default=0.0)
    p.add_argument("--compare-osmaj", action="store_true")
    p.set_defaults(func=cmd_bounds_girth)
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads is not None and args.threads < 1:
            parser.error("--threads must be >= 1")
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    args.t0 = time.perf_counter()
    args.started = datetime.now(timezone.utc).isoformat()
    try:
        args.func(args)
    except UsageError as exc:
        print(f"majlogic: usage error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"majlogic: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"majlogic: error: cannot write output: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

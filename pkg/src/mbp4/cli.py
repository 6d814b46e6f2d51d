"""Command-line frontend: ``mbp4 code|decode|simulate|threshold``.

Exit codes: 0 success, 1 decode failure, 2 usage error, 3 I/O or validation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from collections.abc import Sequence
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .channel import depolarizing_prior
from .codes import (
    CodeFormatError,
    CodeValidationError,
    code_from_spec,
    format_check_matrix,
    gen_bicycle,
    gen_five_qubit,
    gen_surface,
    gen_toric,
)
from .decoder import MODES, SCHEDULES, DecoderConfig, run_decoder
from .pauli import PauliString
from .sim import CSV_FIELDS, StopRule, SweepSpec, run_sweep, write_json
from .verify import classify

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_range(text: str) -> list[float]:
    """``a,b,c`` or ``start:stop:step`` (inclusive, either direction)."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3:
                raise ValueError
            start, stop, step = parts
            step = abs(step)
            if step == 0:
                raise ValueError
            count = int(round(abs(stop - start) / step))
            sign = 1.0 if stop >= start else -1.0
            decimals = max(_decimals(start), _decimals(stop), _decimals(step))
            return [round(start + sign * i * step, decimals) for i in range(count + 1)]
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list 'a,b,c' or range 'start:stop:step', got {text!r}") from None


def _decimals(x: float) -> int:
    s = repr(float(x))
    return len(s.split(".")[1]) if "." in s and "e" not in s else 12


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _add_decoder_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("decoder")
    g.add_argument("--alpha", type=_positive_float, default=1.0)
    g.add_argument("--alpha-grid", type=parse_range, help="adaptive grid, e.g. 1.0:0.5:0.01")
    g.add_argument("--beta", type=float, default=0.0)
    g.add_argument("--mode", choices=MODES, default="mbp")
    g.add_argument("--schedule", choices=SCHEDULES, default="parallel")
    g.add_argument("--tmax", type=_positive_int, default=100)
    g.add_argument("--clip", type=_positive_float, default=30.0)
    g.add_argument("--eps0", "--fixed-init", dest="eps0", type=float, help="build the prior from this rate")
    g.add_argument("--domain", choices=("log", "linear"), default="log")


def _config(args, **extra) -> DecoderConfig:
    try:
        return DecoderConfig(
            alpha=args.alpha,
            beta=args.beta,
            mode=args.mode,
            schedule=args.schedule,
            t_max=args.tmax,
            clip=args.clip,
            alpha_grid=tuple(args.alpha_grid) if args.alpha_grid else None,
            fixed_eps0=args.eps0,
            **extra,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load_code(spec: str):
    try:
        return code_from_spec(spec)
    except (OSError, CodeFormatError, CodeValidationError) as exc:
        raise IOError(f"cannot load code {spec!r}: {exc}") from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mbp4", description="Belief-propagation decoding of Pauli errors.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    code = sub.add_parser("code", help="generate, load or describe check matrices")
    csub = code.add_subparsers(dest="action", required=True)
    gen = csub.add_parser("gen")
    gen.add_argument("--family", choices=("surface", "toric", "five-qubit", "bicycle"), required=True)
    gen.add_argument("--L", type=_positive_int)
    gen.add_argument("--n", type=_positive_int)
    gen.add_argument("--k-logical", type=_positive_int)
    gen.add_argument("--row-weight", type=_positive_int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--sparse", action="store_true")
    gen.add_argument("--no-logicals", action="store_true")
    gen.add_argument("-o", "--output")
    for name in ("load", "info"):
        cp = csub.add_parser(name)
        cp.add_argument("code", help="alias (513, surface:L, toric:L, bicycle:N,K,k,seed) or file")
        cp.add_argument("--json", action="store_true")

    dec = sub.add_parser("decode", help="decode one error or syndrome")
    dec.add_argument("--code", required=True)
    src = dec.add_mutually_exclusive_group(required=True)
    src.add_argument("--error", help="Pauli string such as IIIYI")
    src.add_argument("--syndrome", help="bit string of length M")
    dec.add_argument("--eps", type=float, help="channel rate for the prior")
    dec.add_argument("--trace", help="write per-iteration energies to this CSV")
    _add_decoder_flags(dec)

    for name in ("simulate", "threshold"):
        sp = sub.add_parser(name, help="Monte-Carlo sweep" if name == "simulate" else "sweep several lattice sizes")
        if name == "simulate":
            sp.add_argument("--code", required=True)
        else:
            sp.add_argument("--family", choices=("surface", "toric"), required=True)
            sp.add_argument("--sizes", required=True, help="comma-separated L values")
        sp.add_argument("--eps-list", type=parse_range, required=True)
        sp.add_argument("--events", type=_positive_int, default=100)
        sp.add_argument("--max-trials", type=_positive_int, default=10_000_000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)
        sp.add_argument("-o", "--output", help="CSV, or JSON when the name ends in .json")
        _add_decoder_flags(sp)
    return parser


def cmd_code(args) -> int:
    if args.action == "gen":
        fam = args.family
        need = {"surface": ["L"], "toric": ["L"], "bicycle": ["n", "k_logical", "row_weight"]}.get(fam, [])
        missing = [f"--{k.replace('_', '-')}" for k in need if getattr(args, k) is None]
        if missing:
            raise UsageError(f"--family {fam} needs {' '.join(missing)}")
        try:
            if fam == "surface":
                code = gen_surface(args.L)
            elif fam == "toric":
                code = gen_toric(args.L)
            elif fam == "bicycle":
                code = gen_bicycle(args.n, args.k_logical, args.row_weight, args.seed)
            else:
                code = gen_five_qubit()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        text = format_check_matrix(code, include_logicals=not args.no_logicals, sparse=args.sparse)
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
            print(f"wrote {args.output}: M={code.m} N={code.n} K={code.k}")
        else:
            sys.stdout.write(text)
        return EXIT_OK

    code = _load_code(args.code)
    info = code.describe()
    if args.json:
        print(json.dumps(info, indent=2))
    elif args.action == "load":
        print(f"ok: {info['name']} M={info['M']} N={info['N']} K={info['K']}")
    else:
        rw, cw = info["row_weight"], info["column_weight"]
        print(f"name: {info['name']}")
        print(f"N: {info['N']}")
        print(f"K: {info['K']}")
        print(f"M: {info['M']}")
        print(f"rank: {info['rank']}")
        if info["D"]:
            print(f"D: {info['D']}")
        print(f"row weight: min {rw['min']} max {rw['max']} mean {rw['mean']:.3f}")
        print(f"column weight: min {cw['min']} max {cw['max']} mean {cw['mean']:.3f}")
    return EXIT_OK


def cmd_decode(args) -> int:
    code = _load_code(args.code)
    cfg = _config(args, trace=bool(args.trace))
    if args.eps is None and args.eps0 is None:
        raise UsageError("give --eps (or --eps0) to build the channel prior")
    try:
        prior = None if args.eps0 is not None else depolarizing_prior(code.n, args.eps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    error = None
    if args.error is not None:
        try:
            error = PauliString(args.error.strip())
        except ValueError as exc:
            raise UsageError(f"bad Pauli string: {exc}") from None
        if len(error) != code.n:
            raise UsageError(f"error has length {len(error)}, code has N={code.n}")
        z = code.syndrome(error)
    else:
        bits = args.syndrome.strip()
        if set(bits) - {"0", "1"}:
            raise UsageError("syndrome must be a string of 0/1")
        if len(bits) != code.m:
            raise UsageError(f"syndrome has length {len(bits)}, code has M={code.m}")
        z = np.array([int(b) for b in bits], dtype=np.uint8)
    try:
        result = run_decoder(code, z, prior, cfg, args.domain)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    print(f"status: {result.status.upper()}")
    print(f"estimate: {result.estimate}")
    print(f"iterations: {result.iterations}")
    if cfg.alpha_grid:
        print(f"alpha_used: {result.alpha_used:g}")
        print(f"iterations_total: {result.iterations_total}")
    if error is not None:
        print(f"outcome: {classify(error, result, z, code).value}")
    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iter", "J_S_bounded", "J_S_mismatch"])
            for it, bounded, mismatch in result.energy_trace:
                w.writerow([it, repr(bounded), mismatch])
    return EXIT_OK if result.converged else EXIT_FAIL


def _sweep(args, specs: Sequence[str]) -> int:
    cfg = _config(args)
    for eps in args.eps_list:
        if not 0 < eps < 1:
            raise UsageError(f"eps must lie in (0, 1), got {eps}")
    stop = StopRule(args.events, args.max_trials)
    codes = [_load_code(s) for s in specs]
    records = []
    for spec, code in zip(specs, codes):
        sweep = SweepSpec(spec, cfg, tuple(args.eps_list), stop, args.seed, args.domain)
        for rec, stats in run_sweep(sweep, threads=args.threads, code=code):
            records.append(rec)
            print(
                f"{rec['code']} eps={rec['eps']:g} n_tot={rec['n_tot']} n_e={rec['n_e']} "
                f"rate={rec['rate']:.4g} [{rec['ci_lo']:.3g}, {rec['ci_hi']:.3g}] ({stats.elapsed:.1f}s)",
                file=sys.stderr,
            )
    metadata = {
        "created": datetime.now(timezone.utc).isoformat(),
        "version": __version__,
        "codes": list(specs),
        "seed": args.seed,
        "min_events": args.events,
        "max_trials": args.max_trials,
        "domain": args.domain,
        "decoder": {
            "alpha": args.alpha,
            "alpha_grid": args.alpha_grid,
            "beta": args.beta,
            "mode": args.mode,
            "schedule": args.schedule,
            "t_max": args.tmax,
            "clip": args.clip,
            "eps0": args.eps0,
        },
    }
    out = args.output
    if out and out.endswith(".json"):
        write_json(records, out, metadata)
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        for rec in records:
            w.writerow({k: rec[k] for k in CSV_FIELDS})
        if out:
            with open(out, "w", newline="") as fh:
                fh.write(buf.getvalue())
        else:
            sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_simulate(args) -> int:
    return _sweep(args, [args.code])


def cmd_threshold(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"--sizes must be comma-separated integers, got {args.sizes!r}") from None
    if not sizes:
        raise UsageError("--sizes is empty")
    return _sweep(args, [f"{args.family}:{L}" for L in sizes])


COMMANDS = {"code": cmd_code, "decode": cmd_decode, "simulate": cmd_simulate, "threshold": cmd_threshold}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"mbp4: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, CodeFormatError, CodeValidationError) as exc:
        print(f"mbp4: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

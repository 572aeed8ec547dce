"""Command-line front end: ``qchancoh {compute,sweep,verify}``.

Exit codes: 0 ok, 1 verification failure, 2 input error, 3 regime rejection.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .coherence import (
    CoherenceResult,
    OptimizerOptions,
    coherence_channel,
    coherence_channel_z1,
    coherence_commutativity,
)
from .entropy import AlphaZ
from .errors import CoherenceError, InvalidRegime, NotCPTP
from .quantum import KrausChannel, load_channel
from .zoo import ChannelKind, make, reference_value

log = logging.getLogger("qchancoh")

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_REGIME = 0, 1, 2, 3
MEASURES = ("C", "Ctilde")
# alpha values this close to 1 are replaced by the exact limit row
ALPHA_GAP = 1e-3


class InputError(Exception):
    pass


# --- shared evaluation ------------------------------------------------------------

@dataclass(frozen=True)
class Task:
    """One grid point; picklable so sweeps can ship it to worker processes."""

    channel: str
    param: float | None
    alpha: float
    z: float
    measure: str
    seed: int = 42
    allow_outside: bool = False


def resolve_channel(spec: str, param: float | None) -> tuple[KrausChannel, ChannelKind | None]:
    """A zoo name (with ``param`` where needed) or a path to a channel JSON file."""
    try:
        kind = ChannelKind.parse(spec)
    except ValueError:
        if not os.path.exists(spec):
            raise InputError(f"{spec!r} is neither a channel name ({', '.join(k.value for k in ChannelKind)}) "
                             "nor an existing JSON file") from None
        try:
            return load_channel(spec), None
        except NotCPTP as exc:
            raise InputError(f"{spec}: {exc} (residual {exc.residual:.3e})") from None
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise InputError(f"{spec}: {exc}") from None
    try:
        return make(kind, param).channel, kind
    except CoherenceError as exc:
        raise InputError(str(exc)) from None


def check_regime(p: AlphaZ, allow_outside: bool) -> None:
    if not allow_outside and not p.regime.certified:
        raise InvalidRegime(f"{p} is outside Regimes 1-3; use --allow-outside-regime to force")


def evaluate(task: Task) -> CoherenceResult:
    phi, _ = resolve_channel(task.channel, task.param)
    p = AlphaZ(task.alpha, task.z)
    check_regime(p, task.allow_outside)
    opts = OptimizerOptions(seed=task.seed)
    if task.measure == "C":
        if p.z == 1.0:
            return coherence_channel_z1(phi, p.alpha, allow_outside_regime=task.allow_outside)
        return coherence_channel(phi, p, opts, allow_outside_regime=task.allow_outside)
    if phi.input_dim != phi.output_dim:
        raise InputError("Ctilde needs a channel with equal input and output dimension")
    return coherence_commutativity(phi, p, opts, allow_outside_regime=task.allow_outside)


def _evaluate_row(task: Task):
    res = evaluate(task)
    return task, res.value, res.method.value


def fmt(x: float) -> str:
    return format(float(x) + 0.0, ".17g")  # + 0.0 folds -0 into 0


# --- compute ----------------------------------------------------------------------

def _certificate_summary(res: CoherenceResult) -> str:
    cert = res.certificate
    amps = getattr(cert, "amplitudes", None)
    if amps is not None:
        return "pure input " + np.array2string(np.asarray(amps), precision=6, separator=", ")
    return "diagonal q " + np.array2string(np.asarray(cert), precision=6, separator=", ")


def cmd_compute(args) -> int:
    measures = MEASURES if args.measure == "both" else (args.measure,)
    phi, kind = resolve_channel(args.channel, args.param)
    p = AlphaZ(args.alpha, args.z)
    check_regime(p, args.allow_outside_regime)
    print(f"channel: {args.channel}" + (f" ({kind.param_name}={args.param:g})" if kind and kind.param_range else "")
          + f"  dims {phi.input_dim}->{phi.output_dim}, {len(phi.kraus_ops)} Kraus operators")
    print(f"parameters: {p}  regime {p.regime.value}")
    for m in measures:
        res = evaluate(Task(args.channel, args.param, args.alpha, args.z, m, args.seed, args.allow_outside_regime))
        print(f"{m}: {fmt(res.value)}")
        print(f"  method: {res.method.value}" + ("" if res.converged else " (not converged)"))
        print(f"  certificate: {_certificate_summary(res)}")
        if res.info.get("support_violation"):
            print("  note: support violation reached; the supremum is infinite")
        if kind is not None:
            ref = reference_value(kind, args.param, args.alpha, m, args.z)
            if ref is not None:
                gap = abs(res.value - ref) if math.isfinite(res.value) else math.inf
                flag = "ok" if gap < args.tol else "EXCEEDS TOL"
                print(f"  reference: {fmt(ref)}  |gap| = {gap:.3e} ({flag}, tol {args.tol:g})")
    return EXIT_OK


# --- sweep ------------------------------------------------------------------------

def alpha_grid(start: float, stop: float, steps: int) -> list[float]:
    """``steps`` points on ``[start, stop]``, or on ``(0, stop]`` when ``start <= 0``.

    Points inside the punctured window around 1 are dropped and, if the
    range spans 1, the exact value 1 (the limit branch) is inserted.
    """
    if steps < 2:
        raise InputError("alpha steps must be >= 2")
    if start <= 0:
        grid = np.linspace(start, stop, steps + 1)[1:]
    else:
        grid = np.linspace(start, stop, steps)
    out = [float(a) for a in grid if abs(a - 1.0) >= ALPHA_GAP]
    if min(start, stop) <= 1.0 <= max(start, stop):
        out.append(1.0)
    return sorted(set(out))


def param_grid(kind: ChannelKind | None, rng) -> list:
    if kind is None or kind.param_range is None:
        if rng is not None:
            raise InputError("this channel takes no parameter; drop --param-range")
        return [None]
    if rng is None:
        raise InputError(f"{kind.value} needs --param-range START STOP STEPS")
    start, stop, steps = float(rng[0]), float(rng[1]), int(rng[2])
    if steps < 2:
        raise InputError("param steps must be >= 2")
    lo, hi = kind.param_range
    for v in (start, stop):
        if not lo - 1e-12 <= v <= hi + 1e-12:
            raise InputError(f"{kind.param_name}={v:g} outside [{lo:g}, {hi:g}] for {kind.value}")
    return [float(x) for x in np.linspace(start, stop, steps)]


def build_tasks(args) -> list[Task]:
    kind = _kind_or_none(args.channel)
    if kind is None:
        resolve_channel(args.channel, None)  # validate the JSON file once
    params = param_grid(kind, args.param_range)
    if args.alpha_range is not None:
        a0, a1, n = args.alpha_range
        alphas = alpha_grid(float(a0), float(a1), int(n))
    else:
        alphas = [args.alpha]
    measures = MEASURES if args.measure == "both" else (args.measure,)
    for a in alphas:
        check_regime(AlphaZ(a, args.z), args.allow_outside_regime)
    return [Task(args.channel, par, a, args.z, m, args.seed, args.allow_outside_regime)
            for par in params for a in alphas for m in measures]


def _kind_or_none(spec: str) -> ChannelKind | None:
    try:
        return ChannelKind.parse(spec)
    except ValueError:
        return None


def run_tasks(tasks: list[Task], workers: int) -> list:
    if workers <= 1 or len(tasks) < 2:
        return [_evaluate_row(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order regardless of completion order
        return list(pool.map(_evaluate_row, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def render(rows, fmt_name: str) -> str:
    if fmt_name == "json":
        recs = [{"param": t.param, "alpha": t.alpha, "measure": t.measure,
                 "value": v if math.isfinite(v) else str(v), "method": m} for t, v, m in rows]
        return json.dumps(recs, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["param", "alpha", "measure", "value", "method"])
    for t, v, m in rows:
        w.writerow(["" if t.param is None else fmt(t.param), fmt(t.alpha), t.measure, fmt(v), m])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    tasks = build_tasks(args)
    workers = args.workers if args.workers > 0 else min(os.cpu_count() or 1, 8)
    log.info("sweeping %d grid points on %d workers", len(tasks), workers)
    text = render(run_tasks(tasks, workers), args.format)
    if args.out in (None, "-"):
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc}") from None
    print(f"wrote {len(tasks)} rows to {args.out}")
    return EXIT_OK


# --- verify -----------------------------------------------------------------------

def cmd_verify(args) -> int:
    from .verify import SUITES

    names = list(SUITES) if args.suite == "all" else [args.suite]
    failed = []
    for name in names:
        print(f"== {name}")
        for chk in SUITES[name](args.seed, args.quick):
            print(chk.line())
            if chk.asserted and not chk.passed:
                failed.append(f"{name}: {chk.name}")
    print()
    if failed:
        print(f"{len(failed)} asserted check(s) failed:")
        for f in failed:
            print(f"  - {f}")
        return EXIT_VERIFY
    print("all asserted checks passed")
    return EXIT_OK


# --- argument parsing -------------------------------------------------------------

def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="RNG seed for optimiser restarts (default 42)")
    common.add_argument("--tol", type=float, default=1e-9, help="tolerance for reference gaps (default 1e-9)")
    common.add_argument("--allow-outside-regime", action="store_true",
                        help="evaluate (alpha, z) outside the certified regimes")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="qchancoh", description=__doc__.splitlines()[0], parents=[common])
    sub = ap.add_subparsers(dest="command", required=True)

    def channel_args(sp):
        sp.add_argument("--channel", required=True, help="zoo name or path to a channel JSON file")
        sp.add_argument("--z", type=float, default=1.0)
        sp.add_argument("--measure", choices=("C", "Ctilde", "both"), default="C")

    c = sub.add_parser("compute", parents=[common], help="evaluate one measure at one point")
    channel_args(c)
    c.add_argument("--param", type=float, default=None, help="p or t for parametrised channels")
    c.add_argument("--alpha", type=_positive_float, required=True, help="alpha; 1 selects the limit branch")
    c.set_defaults(func=cmd_compute)

    s = sub.add_parser("sweep", parents=[common], help="tabulate a measure over a parameter grid")
    channel_args(s)
    s.add_argument("--param", type=float, default=None, help=argparse.SUPPRESS)
    s.add_argument("--param-range", nargs=3, metavar=("START", "STOP", "STEPS"))
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--alpha", type=_positive_float)
    g.add_argument("--alpha-range", nargs=3, metavar=("START", "STOP", "STEPS"),
                   help="START <= 0 means the open interval (0, STOP]")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--out", default="-", help="output file (default stdout)")
    s.add_argument("--workers", type=int, default=0, help="worker processes (0 = cpu count, max 8)")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=("formulas", "properties", "table1", "conjecture", "all"))
    v.add_argument("--quick", action="store_true", help="smaller grids and sample counts")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except InvalidRegime as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (InputError, CoherenceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

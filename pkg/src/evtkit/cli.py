"""Command-line front end.

Every subcommand reads a distribution in the mini-language ("exp", "uniform",
"normal", "pareto:<alpha>", "gev:<gamma>[,<loc>[,<scale>]]"), computes through
the library, and writes JSON or CSV to stdout or a file.  Output is
byte-stable for a fixed argument vector: JSON numbers carry 17 significant
digits, CSV has a mandatory header and dot decimals, and file writes go
through a temp file and rename.

Exit codes: 0 success, 1 computational failure (divergent integral, no
bracket), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile
from typing import Optional, Sequence

from .dist_core import DistSpec, parse_dist
from .domain import (
    asymptotic_R,
    asymptotic_W,
    gaussian_norming,
    norming_sequence,
    classify,
    tail_rv_index,
)
from .simlab import (
    analytic_sup_distance,
    empirical_sup_distance,
    malmquist_spacings,
    scheffe_tv,
    simulate_maxima,
)

__all__ = ["main", "build_parser"]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _json_dumps(obj) -> str:
    """Serializer fixing the number format; nan and infinities become null."""
    pieces: list[str] = []
    _json_write(obj, pieces)
    return "".join(pieces)


def _json_write(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_fmt(obj) if math.isfinite(obj) else "null")
    elif isinstance(obj, str):
        out.append('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(",")
            _json_write(str(k), out)
            out.append(":")
            _json_write(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _json_write(v, out)
        out.append("]")
    else:
        raise TypeError(f"not JSON-serializable here: {type(obj)!r}")


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _emit(text: str, out_path: Optional[str]) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out_path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out_path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".evtkit-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, out_path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dist_arg(token: str) -> DistSpec:
    try:
        return parse_dist(token)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def _x_list(text: str) -> list[float]:
    try:
        vals = [float(p) for p in text.split(",") if p.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad abscissa list: {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty abscissa list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evtkit",
        description="Extreme value toolkit: classification, norming, moments, "
        "tail scaling, and maxima simulation.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p: argparse.ArgumentParser, dist: bool = True) -> None:
        if dist:
            p.add_argument("--dist", type=_dist_arg, required=True,
                           help="distribution token, e.g. exp, pareto:2, gev:0.5")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="write here instead of stdout")

    p = sub.add_parser("classify", help="domain-of-attraction verdict")
    common(p)

    p = sub.add_parser("norming", help="normalizing and centering pair")
    common(p)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--n", type=_positive_int, required=True)

    p = sub.add_parser("moments", help="tail moments R, W and their ratio")
    common(p)
    p.add_argument("--x", type=_x_list, required=True,
                   help="comma-separated thresholds")

    p = sub.add_parser("regvar", help="tail scaling exponent probe")
    common(p)

    p = sub.add_parser("simulate", help="normalized block maxima")
    common(p)
    p.add_argument("--m", type=_positive_int, required=True, help="block size")
    p.add_argument("--reps", type=_positive_int, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("malmquist", help="uniform spacing exponentiality check")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=42)
    common(p, dist=False)

    p = sub.add_parser("distance", help="analytic distance of the maximum to its limit")
    common(p)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--n", type=_positive_int, required=True)

    return parser


def _run_classify(args) -> tuple[dict, tuple[list, list]]:
    verdict = classify(args.dist)
    payload = verdict.to_json()
    rows: list[list] = [["kind", "", verdict.kind]]
    rows.append(["gamma", "", verdict.gamma if verdict.gamma is not None else ""])
    if verdict.alpha is not None:
        rows.append(["alpha", "", verdict.alpha])
    if verdict.beta is not None:
        rows.append(["beta", "", verdict.beta])
    for crit, trace in payload["evidence"].items():
        for x, v in trace:
            rows.append([crit, x, v])
    return payload, (["field", "x", "value"], rows)


def _run_norming(args) -> tuple[dict, tuple[list, list]]:
    pair = norming_sequence(args.dist, args.gamma, args.n)
    payload = {"a": pair.a, "b": pair.b, "n": pair.n}
    return payload, (["a", "b", "n"], [[pair.a, pair.b, pair.n]])


def _run_moments(args) -> tuple[object, tuple[list, list]]:
    entries = []
    for x in args.x:
        R = asymptotic_R(args.dist, x)
        W = asymptotic_W(args.dist, x)
        entries.append({"x": x, "R": R, "W": W, "ratio": W / (R * R)})
    payload: object = entries[0] if len(entries) == 1 else entries
    rows = [[e["x"], e["R"], e["W"], e["ratio"]] for e in entries]
    return payload, (["x", "R", "W", "ratio"], rows)


def _run_regvar(args) -> tuple[dict, tuple[list, list]]:
    fit = tail_rv_index(args.dist)
    payload = {
        "rho": fit.rho_est,
        "dispersion": fit.dispersion,
        "per_multiplier": [[m, e] for m, e in fit.per_multiplier],
    }
    rows = [[m, e, fit.rho_est, fit.dispersion] for m, e in fit.per_multiplier]
    return payload, (["multiplier", "estimate", "rho", "dispersion"], rows)


def _run_simulate(args) -> tuple[dict, tuple[list, list]]:
    run = simulate_maxima(args.dist, args.m, args.reps, args.gamma, args.seed)
    report = empirical_sup_distance(run, args.gamma)
    payload = {
        "dist": run.spec_label,
        "m": run.block_size,
        "reps": run.reps,
        "seed": run.seed,
        "norming": {"a": run.norming.a, "b": run.norming.b},
        "sup_distance": report.sup_distance,
    }
    rows = [[r, float(v)] for r, v in enumerate(run.normalized_maxima)]
    return payload, (["replicate", "normalized_max"], rows)


def _run_malmquist(args) -> tuple[dict, tuple[list, list]]:
    res = malmquist_spacings(args.n, args.seed)
    payload = {
        "n": res.n,
        "seed": args.seed,
        "ks_statistic": res.ks_statistic,
        "threshold": res.threshold,
        "passed": res.passed,
    }
    rows = [[j + 1, float(s)] for j, s in enumerate(res.spacings)]
    return payload, (["j", "spacing"], rows)


def _run_distance(args) -> tuple[dict, tuple[list, list]]:
    report = analytic_sup_distance(args.dist, args.gamma, args.n)
    payload = {"n": args.n, "sup_distance": report.sup_distance}
    if args.dist.density is not None:
        try:
            payload["tv_distance"] = scheffe_tv(args.dist, args.gamma, args.n)
        except ValueError:
            pass
    rows = [[x, d] for x, d in (report.profile or ())]
    return payload, (["x", "abs_difference"], rows)


_HANDLERS = {
    "classify": _run_classify,
    "norming": _run_norming,
    "moments": _run_moments,
    "regvar": _run_regvar,
    "simulate": _run_simulate,
    "malmquist": _run_malmquist,
    "distance": _run_distance,
}


def run(args: argparse.Namespace) -> int:
    try:
        payload, (header, rows) = _HANDLERS[args.subcommand](args)
    except ValueError as exc:
        print(f"evtkit: {exc}", file=sys.stderr)
        return 1
    if args.format == "json":
        text = _json_dumps(payload)
    else:
        text = _csv_text(header, rows)
    _emit(text, args.out)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())

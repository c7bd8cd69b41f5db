"""Command-line front door.

Subcommands::

    verify [--suite all|ID,...] [--config FILE] [--out DIR] [--dump-config]
    kernel --model MODEL (--A A | --eps EPS) (--x X [--x X ...] | --grid LO:HI:N) --xp XP
    probe  --check ID [--param k=v,...]
    report --dir DIR

Exit codes: 0 when every requested check passes, 1 on check failures,
2 on usage errors (unknown flags, ids, or malformed values).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .config import OUT_ENV, ConfigError, RunConfig, atomic_write
from .kernels import (
    edge_kernel_closed,
    edge_kernel_direct,
    inner_eps_kernel_closed,
    inner_eps_kernel_direct,
    inner_kernel_closed,
    inner_kernel_direct,
)
from .limits import PreconditionError
from .models import EdgeModel, parse_model
from .verify import CATALOG_IDS, PROBE_IDS, SUITE_ORDER, CheckResult, parse_param_value, probe_report, run_suite

__all__ = ["main", "build_parser", "split_params", "summary_table"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUMMARY_JSON = "summary.json"
SUMMARY_CSV = "summary.csv"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nhresolve", description="Numerical verification of spectral resolutions at exceptional points.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run catalog checks")
    v.add_argument("--suite", default="all", help="'all' or comma/space separated check ids")
    v.add_argument("--config", help="JSON run configuration")
    v.add_argument("--out", help=f"output directory (default: config, then ${OUT_ENV}, then ./nhresolve-out)")
    v.add_argument("--seed", type=int)
    v.add_argument("--workers", type=int)
    v.add_argument("--format", dest="formats", help="comma separated subset of json,csv")
    v.add_argument("--dump-config", nargs="?", const="-", metavar="FILE",
                   help="write the effective configuration (stdout when FILE is omitted) and exit")
    v.add_argument("--quiet", action="store_true", help="suppress per-check progress lines")

    k = sub.add_parser("kernel", help="emit kernel values as CSV")
    k.add_argument("--model", required=True, help="edge(n,zr,zi) or inner(alpha,zr,zi)")
    g = k.add_mutually_exclusive_group(required=True)
    g.add_argument("--A", type=float, help="cutoff of the deformed segment")
    g.add_argument("--eps", type=float, help="semicircle radius (inner model)")
    k.add_argument("--x", type=float, action="append", help="evaluation point (repeatable)")
    k.add_argument("--grid", help="LO:HI:N evenly spaced x values")
    k.add_argument("--xp", type=float, required=True)
    k.add_argument("--no-direct", action="store_true", help="skip the contour-quadrature column")
    k.add_argument("--output", help="write CSV here instead of stdout")

    pr = sub.add_parser("probe", help="one convergence report as JSON")
    pr.add_argument("--check", required=True)
    pr.add_argument("--param", action="append", default=[], help="k=v[,k=v...] (repeatable)")
    pr.add_argument("--csv", help="also write the (parameter, value, residual) table here")

    r = sub.add_parser("report", help="regenerate the summary from stored results")
    r.add_argument("--dir", required=True)
    return p


# --- helpers -----------------------------------------------------------------------

def split_params(items) -> dict:
    """Parse ``k=v`` pairs; commas inside brackets or parentheses do not split."""
    out = {}
    for item in items:
        depth, start, parts = 0, 0, []
        for i, ch in enumerate(item):
            if ch in "([{":
                depth += 1
            elif ch in ")]}":
                depth -= 1
            elif ch == "," and depth == 0:
                parts.append(item[start:i])
                start = i + 1
        parts.append(item[start:])
        for part in filter(None, (s.strip() for s in parts)):
            if "=" not in part:
                raise UsageError(f"parameter {part!r} is not of the form key=value")
            key, val = part.split("=", 1)
            out[key.strip()] = parse_param_value(val.strip())
    return out


def _suite_ids(text: str) -> list:
    if text.strip() == "all":
        return list(SUITE_ORDER)
    ids = [s for s in text.replace(",", " ").split() if s]
    unknown = [s for s in ids if s not in CATALOG_IDS]
    if unknown or not ids:
        raise UsageError(f"unknown check ids {unknown}; known: {', '.join(SUITE_ORDER)}")
    return ids


def summary_table(results) -> str:
    w = max([5] + [len(r.id) for r in results])
    lines = [f"{'check':<{w}}  verdict  seconds  note"]
    for r in results:
        secs = r.provenance.get("seconds")
        secs = f"{secs:7.2f}" if isinstance(secs, (int, float)) else "      -"
        lines.append(f"{r.id:<{w}}  {r.verdict:<7}  {secs}  {r.error or ''}".rstrip())
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} passed")
    return "\n".join(lines)


def _summary_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["check", "verdict", "seconds", "error"])
    for r in results:
        w.writerow([r.id, r.verdict, r.provenance.get("seconds", ""), r.error or ""])
    return buf.getvalue()


def _write_summary(out_dir, results):
    doc = {"passed": sum(r.passed for r in results), "total": len(results),
           "checks": {r.id: r.verdict for r in results}}
    atomic_write(os.path.join(out_dir, SUMMARY_JSON), json.dumps(doc, indent=2) + "\n")
    atomic_write(os.path.join(out_dir, SUMMARY_CSV), _summary_csv(results))


def _result_name(cid: str) -> str:
    return f"check-{cid}.json"


# --- subcommands ---------------------------------------------------------------------

def _cmd_verify(args, out) -> int:
    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig.default()
    except (OSError, ConfigError) as exc:
        raise UsageError(f"cannot load config: {exc}") from exc
    if args.suite != "all" or not args.config:
        wanted = _suite_ids(args.suite)
        by_id = {c["id"]: c for c in cfg.checks}
        cfg.checks = [by_id.get(cid, {"id": cid, "params": {}, "tolerances": {}}) for cid in wanted]
    if args.seed is not None:
        cfg.seed = args.seed
    if args.workers is not None:
        cfg.workers = args.workers
    if args.formats:
        cfg.formats = [f.strip() for f in args.formats.split(",") if f.strip()]
    if args.out:
        cfg.output_dir = args.out
    try:
        cfg.validate()
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc

    if args.dump_config is not None:
        if args.dump_config == "-":
            out.write(cfg.dumps() + "\n")
        else:
            cfg.dump(args.dump_config)
        return EXIT_OK

    out_dir = cfg.resolved_output_dir()
    os.makedirs(out_dir, exist_ok=True)

    def progress(res):
        if not args.quiet:
            print(f"[{res.verdict}] {res.id}", file=sys.stderr, flush=True)
        _store(out_dir, res, cfg.formats)

    results = run_suite(cfg, progress=progress)
    cfg_path = os.path.join(out_dir, "config.json")
    atomic_write(cfg_path, cfg.dumps() + "\n")
    _write_summary(out_dir, results)
    out.write(summary_table(results) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def _store(out_dir, res: CheckResult, formats):
    if "json" in formats:
        atomic_write(os.path.join(out_dir, _result_name(res.id)), json.dumps(res.to_dict(), indent=2) + "\n")
    if "csv" in formats:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["metric", "value"])
        for key, val in _flatten(res.metrics):
            w.writerow([key, val])
        atomic_write(os.path.join(out_dir, f"check-{res.id}.csv"), buf.getvalue())


def _flatten(d, prefix=""):
    if isinstance(d, dict) and set(d) != {"re", "im"}:
        for k, v in d.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(d, dict):
        yield prefix, complex(d["re"], d["im"])
    elif isinstance(d, list) and any(isinstance(x, (dict, list)) for x in d):
        for i, v in enumerate(d):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, json.dumps(d) if isinstance(d, list) else d


def _xs(args) -> np.ndarray:
    if (args.x is None) == (args.grid is None):
        raise UsageError("give exactly one of --x or --grid")
    if args.x is not None:
        return np.asarray(args.x, dtype=float)
    try:
        lo, hi, n = args.grid.split(":")
        return np.linspace(float(lo), float(hi), int(n))
    except ValueError as exc:
        raise UsageError(f"--grid expects LO:HI:N, got {args.grid!r}") from exc


def _cmd_kernel(args, out) -> int:
    try:
        model = parse_model(args.model)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"bad --model {args.model!r}: {exc}") from exc
    xs = _xs(args)
    xp = args.xp
    if args.eps is not None:
        if isinstance(model, EdgeModel):
            raise UsageError("--eps applies to the inner model only")
        par_name, par = "eps", args.eps
        closed = lambda x: inner_eps_kernel_closed(model, par, x, xp)
        direct = lambda x: inner_eps_kernel_direct(model, par, x, xp)
    else:
        par_name, par = "A", args.A
        if isinstance(model, EdgeModel):
            closed = lambda x: edge_kernel_closed(model, par, x, xp)
            direct = lambda x: edge_kernel_direct(model, par, None, x, xp)
        else:
            closed = lambda x: inner_kernel_closed(model, par, x, xp)
            direct = lambda x: inner_kernel_direct(model, par, None, x, xp)
    try:
        first = closed(xs[0])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    names = list(first.terms)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    head = ["model", "x", "xp", par_name]
    for n in names:
        head += [f"{n}_re", f"{n}_im"]
    head += ["total_re", "total_im"]
    if not args.no_direct:
        head += ["direct_re", "direct_im", "abs_diff"]
    w.writerow(head)
    for x in xs:
        kv = closed(float(x))
        row = [model.descriptor(), repr(float(x)), repr(xp), repr(par)]
        for n in names:
            v = complex(kv[n])
            row += [repr(v.real), repr(v.imag)]
        tot = complex(kv.total)
        row += [repr(tot.real), repr(tot.imag)]
        if not args.no_direct:
            d = complex(direct(float(x)))
            row += [repr(d.real), repr(d.imag), repr(abs(d - tot))]
        w.writerow(row)
    if args.output:
        atomic_write(args.output, buf.getvalue())
    else:
        out.write(buf.getvalue())
    return EXIT_OK


def _cmd_probe(args, out) -> int:
    if args.check not in CATALOG_IDS:
        raise UsageError(f"unknown check id {args.check!r}")
    if args.check not in PROBE_IDS:
        raise UsageError(f"check {args.check} has no single-probe form; probe ids: {', '.join(sorted(PROBE_IDS))}")
    params = split_params(args.param)
    try:
        rep = probe_report(args.check, params)
    except (PreconditionError, ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"probe {args.check}: {exc}") from exc
    out.write(rep.to_json(indent=2) + "\n")
    if args.csv:
        atomic_write(args.csv, rep.to_csv())
    return EXIT_OK if rep.verdict in ("converged", "vanishing", "nontrivial_limit") else EXIT_FAIL


def _cmd_report(args, out) -> int:
    if not os.path.isdir(args.dir):
        raise UsageError(f"no such directory {args.dir!r}")
    found = {}
    for name in os.listdir(args.dir):
        if name.startswith("check-") and name.endswith(".json"):
            with open(os.path.join(args.dir, name), encoding="utf-8") as fh:
                d = json.load(fh)
            found[d["id"]] = CheckResult(d["id"], d["verdict"], d.get("metrics", {}), d.get("provenance", {}),
                                         d.get("error"))
    if not found:
        raise UsageError(f"no check results in {args.dir!r}")
    order = {cid: i for i, cid in enumerate(SUITE_ORDER)}
    results = sorted(found.values(), key=lambda r: order.get(r.id, len(order)))
    _write_summary(args.dir, results)
    out.write(summary_table(results) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


_COMMANDS = {"verify": _cmd_verify, "kernel": _cmd_kernel, "probe": _cmd_probe, "report": _cmd_report}


def main(argv=None, *, stdout=None) -> int:
    out = stdout if stdout is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # --help
        return int(exc.code or 0)

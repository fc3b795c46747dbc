"""Command-line front end: ``cheegerlab analyze | verify | mix | generate``.

Exit codes: 0 success, 1 verification failure, 2 bad input, 3 too many
states for exhaustive enumeration, 4 a bound row failed its validity check.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import chains, verify
from .bounds import full_report
from .errors import CheegerLabError, TooManyStates
from .evolving import mp_mixing_curve
from .kernel import MarkovKernel, dump_kernel, load_kernel
from .report import BoundReport
from .setops import check_size, iter_members
from .spectra import lambda_max

EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_TOO_BIG = 3
EXIT_INVALID = 4

ANALYZE_COLUMNS = ("name", "value", "target", "exact", "valid", "witness_bitmask")
MIX_COLUMNS = ("step", "exact_tv", "start", "mp_bound", "mp_stderr", "eigen_envelope")


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: Optional[str] = None
    chain: Optional[str] = None
    n: int = 2
    d: int = 1
    laziness: Optional[float] = None
    seed: int = 0
    samples: int = 10_000
    steps: int = 10
    format: str = "table"
    suite: Optional[list[str]] = None
    count: Optional[int] = None
    n_max: Optional[int] = None
    out: Optional[str] = None

    def validate(self) -> None:
        if self.command in ("analyze", "mix") and (self.input is None) == (self.chain is None):
            raise InputError("give exactly one of --input or --chain")
        if self.command == "generate" and self.chain is None:
            raise InputError("generate needs --chain")
        if self.samples < 1:
            raise InputError("--samples must be positive")
        if self.steps < 0:
            raise InputError("--steps must be non-negative")
        if self.count is not None and self.count < 1:
            raise InputError("--count must be positive")

    def chain_spec(self) -> chains.ChainSpec:
        return chains.ChainSpec(self.chain, n=self.n, d=self.d, seed=self.seed, laziness=self.laziness)


def load_source(cfg: RunConfig) -> MarkovKernel:
    if cfg.input is not None:
        try:
            return load_kernel(cfg.input)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read {cfg.input}: {exc}") from exc
        except (TypeError, ValueError) as exc:
            if isinstance(exc, CheegerLabError):
                raise
            raise InputError(f"{cfg.input}: malformed matrix ({exc})") from exc
    return chains.generate(cfg.chain_spec())


def _num(x) -> str:
    return "" if x is None else repr(float(x))


# -- analyze ----------------------------------------------------------------

def render_csv(report: BoundReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ANALYZE_COLUMNS)
    for e in report.entries:
        valid = "skipped" if e.error else str(e.valid).lower()
        w.writerow([e.name, _num(e.value), e.target, _num(e.exact), valid,
                    "" if e.witness is None else e.witness])
    return buf.getvalue()


def _witness_labels(K: MarkovKernel, bits: Optional[int]) -> str:
    if bits is None:
        return ""
    return "{" + ",".join(K.label(i) for i in iter_members(bits)) + "}"


def render_table(K: MarkovKernel, report: BoundReport) -> str:
    lines = [
        f"states {report.n}  reversible {report.reversible}  lazy {report.lazy}",
        f"P0 {report.p0:.6g}  P0_hat {report.p0_hat:.6g}",
        f"gap {report.gap:.12g}",
        f"lambda_max {'n/a' if report.lambda_max is None else format(report.lambda_max, '.12g')}",
        f"lambda_star {report.lambda_star:.12g}",
        "",
        f"{'bound':40} {'value':>16} {'target':>14} {'exact':>16}  valid  witness",
    ]
    for e in report.entries:
        if e.error:
            lines.append(f"{e.name:40} {'-':>16} {'':>14} {'':>16}  skip   {e.error}")
            continue
        lines.append(f"{e.name:40} {e.value:16.12g} {e.target:>14} {e.exact:16.12g}  "
                     f"{'yes' if e.valid else 'NO':5}  {_witness_labels(K, e.witness)}")
    return "\n".join(lines) + "\n"


def render_json(K: MarkovKernel, report: BoundReport) -> str:
    rows = []
    for e in report.entries:
        rows.append({"name": e.name, "value": None if e.error else e.value, "target": e.target,
                     "exact": e.exact, "valid": e.valid, "witness_bitmask": e.witness,
                     "witness": [K.label(i) for i in iter_members(e.witness)] if e.witness is not None else None,
                     "forms": e.forms, "error": e.error})
    out = {"n": report.n, "reversible": report.reversible, "lazy": report.lazy,
           "p0": report.p0, "p0_hat": report.p0_hat, "gap": report.gap,
           "lambda_max": report.lambda_max, "lambda_star": report.lambda_star, "bounds": rows}
    return json.dumps(out, indent=1) + "\n"


def cmd_analyze(cfg: RunConfig) -> int:
    K = load_source(cfg)
    check_size(K.n)
    report = full_report(K)
    if cfg.format == "csv":
        text = render_csv(report)
    elif cfg.format == "json":
        text = render_json(K, report)
    else:
        text = render_table(K, report)
    emit(text, cfg.out)
    return 0 if report.all_valid else EXIT_INVALID


# -- verify -----------------------------------------------------------------

def cmd_verify(cfg: RunConfig) -> int:
    names = cfg.suite or list(verify.SUITES)
    for name in names:
        if name not in verify.SUITES:
            raise InputError(f"unknown suite {name!r}; choose from {', '.join(verify.SUITES)}")
    results = verify.run_suites(names, seed=cfg.seed, count=cfg.count, n_max=cfg.n_max)
    lines = []
    for r in results:
        lines.append(f"{r.name:18} {'PASS' if r.ok else 'FAIL'}  passed {r.passed}  failed {r.failed}")
        lines.extend(f"    {msg}" for msg in r.failures)
    emit("\n".join(lines) + "\n", cfg.out)
    return 0 if all(r.ok for r in results) else EXIT_VERIFY


# -- mix --------------------------------------------------------------------

def tv_table(K: MarkovKernel, steps: int) -> np.ndarray:
    """``tv[k, x] = ||P^k(x, .) - pi||_TV`` for k = 0..steps."""
    out = np.empty((steps + 1, K.n))
    M = np.eye(K.n)
    for k in range(steps + 1):
        out[k] = 0.5 * np.abs(M - K.pi).sum(axis=1)
        M = M @ K.P
    return out


def mix_rows(K: MarkovKernel, steps: int, samples: int, seed: int) -> list[tuple]:
    tv = tv_table(K, steps)
    # worst start per step; ties within rounding go to the smallest index
    starts = (tv >= tv.max(axis=1, keepdims=True) - 1e-12).argmax(axis=1)
    curves = {int(x): mp_mixing_curve(K, int(x), steps, samples, seed) for x in np.unique(starts)}
    lmax = lambda_max(K) if K.is_reversible else None
    rows = []
    for k in range(steps + 1):
        x = int(starts[k])
        est = curves[x][k]
        env = None if lmax is None else 0.5 * lmax ** k / float(K.pi.min())
        rows.append((k, float(tv[k, x]), x, est.mean, est.stderr, env))
    return rows


def cmd_mix(cfg: RunConfig) -> int:
    K = load_source(cfg)
    rows = mix_rows(K, cfg.steps, cfg.samples, cfg.seed)
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(MIX_COLUMNS)
        for k, tv, x, m, s, env in rows:
            w.writerow([k, _num(tv), x, _num(m), _num(s), _num(env)])
        text = buf.getvalue()
    elif cfg.format == "json":
        text = json.dumps([dict(zip(MIX_COLUMNS, r)) for r in rows], indent=1) + "\n"
    else:
        lines = [f"{'step':>4} {'exact TV':>12} {'start':>5} {'MP bound':>12} {'stderr':>10} {'envelope':>12}"]
        for k, tv, x, m, s, env in rows:
            e = "n/a" if env is None else f"{env:12.6g}"
            lines.append(f"{k:4d} {tv:12.6g} {K.label(x):>5} {m:12.6g} {s:10.3g} {e:>12}")
        text = "\n".join(lines) + "\n"
    emit(text, cfg.out)
    return 0


# -- generate ---------------------------------------------------------------

def cmd_generate(cfg: RunConfig) -> int:
    K = chains.generate(cfg.chain_spec())
    emit(dump_kernel(K), cfg.out)
    return 0


# -- plumbing ---------------------------------------------------------------

def emit(text: str, out: Optional[str]) -> None:
    """Print, or write atomically so a failed run leaves no partial file."""
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=f".{path.name}.")
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cheegerlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def source(p):
        p.add_argument("--input", metavar="PATH", help="kernel JSON file")
        p.add_argument("--chain", choices=chains.FAMILIES)
        p.add_argument("--n", type=int, default=2, help="state count (default 2)")
        p.add_argument("--d", type=int, default=1, help="hypercube dimension")
        p.add_argument("--laziness", type=float, default=None, help="holding probability mixed in")

    def common(p, formats=True):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
        if formats:
            p.add_argument("--format", choices=("table", "csv", "json"), default="table")

    p = sub.add_parser("analyze", help="exact spectrum and every bound")
    source(p)
    common(p)

    p = sub.add_parser("verify", help="run seeded invariant suites")
    p.add_argument("--suite", action="append", choices=verify.SUITES, help="repeatable; default all")
    p.add_argument("--count", type=int, default=None, help="kernels or fixtures per suite")
    p.add_argument("--n-max", type=int, default=None, dest="n_max")
    common(p, formats=False)

    p = sub.add_parser("mix", help="exact TV against the evolving-set bound")
    source(p)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--samples", type=int, default=10_000)
    common(p)

    p = sub.add_parser("generate", help="write a generated kernel as JSON")
    source(p)
    common(p, formats=False)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__})
    handlers = {"analyze": cmd_analyze, "verify": cmd_verify, "mix": cmd_mix, "generate": cmd_generate}
    try:
        cfg.validate()
        return handlers[cfg.command](cfg)
    except TooManyStates as exc:
        print(f"error: TooManyStates: {exc}", file=sys.stderr)
        return EXIT_TOO_BIG
    except (InputError, CheegerLabError) as exc:
        name = "" if isinstance(exc, InputError) else f"{type(exc).__name__}: "
        print(f"error: {name}{exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

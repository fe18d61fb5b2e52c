"""Command line front end.

Usage::

    bilateral verify {lemma-ext,thm1,thm2,thm3} [--symbol S] [--grid NZxNY] ...
    bilateral dn-spectrum --nmax 20
    bilateral symbol-trace --symbol 'resolvent(1)' --zeta 1,2,4
    bilateral pconj --symbol laplace --zeta 1:8:8

Exit codes: 0 pass, 1 a tolerance failed, 2 usage or precondition error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings

import numpy as np

from .symbols import DegreeTooHigh, NonConvergent, poisson_conjugation_symbol, trace_symbol
from .symbolspec import SymbolSpecError, parse_symbol
from .torus import TorusGrid, dn_multiplier
from .verify import (
    random_circle_field,
    verify_lemma_ext,
    verify_theorem1,
    verify_theorem2,
    verify_theorem3,
)

DEFAULTS = {
    "grid": "256x256",
    "nmin": None,
    "nmax": 20,
    "tol": 1e-12,
    "symbol": None,
    "degree": None,
    "terms": None,
    "format": None,
    "out": None,
    "seed": 0,
    "z": "0",
    "zeta": "1,2,4,8",
}

DEFAULT_SYMBOL = {"thm1": "resolvent(1)", "thm3": "laplace", "symbol-trace": "resolvent(1)", "pconj": "laplace"}
DEFAULT_NMIN = {"thm1": 1, "thm2": 3, "thm3": 1}


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option values (flags win)")
    common.add_argument("--grid", help="grid size NZxNY (default 256x256)")
    common.add_argument("--nmin", type=int, help="smallest mode checked")
    common.add_argument("--nmax", type=int, help="largest mode checked (default 20)")
    common.add_argument("--tol", type=float, help="base per-mode tolerance (default 1e-12)")
    common.add_argument("--symbol", help="preset (one, laplace, resolvent(k), modulated-resolvent(k)) or 'expr @ degree'")
    common.add_argument("--degree", type=float, help="declared degree of an expression symbol")
    common.add_argument("--terms", type=int, help="predict with this many homogeneous terms only")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--seed", type=int, help="seed for random test functions")

    p = argparse.ArgumentParser(prog="bilateral", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run a verification report")
    v.add_argument("theorem", choices=("lemma-ext", "thm1", "thm2", "thm3"))
    sub.add_parser("dn-spectrum", parents=[common], help="DN eigenvalues against 2|n|")
    for name, text in (("symbol-trace", "conormal integral (1/2pi) int a d eta"),
                       ("pconj", "symbol of P* A P")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("--z", help="comma list of angles (default 0)")
        s.add_argument("--zeta", help="comma list or start:stop:num (default 1,2,4,8)")
    return p


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _grid(cfg) -> TorusGrid:
    try:
        return TorusGrid.parse(str(cfg["grid"]))
    except ValueError as exc:
        raise UsageError(f"bad --grid {cfg['grid']!r}: {exc}") from None


def _symbol(cfg, command):
    text = cfg["symbol"] or DEFAULT_SYMBOL[command]
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            sym = parse_symbol(text, cfg["degree"])
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        return sym
    except SymbolSpecError as exc:
        raise UsageError(str(exc)) from None


def _floats(text: str) -> np.ndarray:
    text = str(text)
    if ":" in text:
        a, b, num = text.split(":")
        return np.linspace(float(a), float(b), int(num))
    return np.array([float(t) for t in text.split(",") if t.strip()])


def _emit(text: str, cfg):
    if cfg["out"]:
        with open(cfg["out"], "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _rows_out(header, rows, cfg, default="csv"):
    fmt = cfg["format"] or default
    if fmt == "json":
        text = json.dumps({"schema": 1, "rows": [dict(zip(header, r)) for r in rows]}, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in r])
        text = buf.getvalue()
    _emit(text, cfg)


def cmd_verify(theorem: str, cfg) -> int:
    grid = _grid(cfg)
    nmax = int(cfg["nmax"])
    nmin = cfg["nmin"] if cfg["nmin"] is not None else DEFAULT_NMIN.get(theorem, 1)
    if nmax < nmin or nmin < 1:
        raise UsageError(f"need 1 <= nmin <= nmax, got nmin={nmin}, nmax={nmax}")
    if nmax >= grid.Nz // 2:
        raise UsageError(f"nmax={nmax} must be below Nz/2={grid.Nz // 2}")
    modes = range(int(nmin), nmax + 1)
    tol = float(cfg["tol"])
    if theorem == "lemma-ext":
        f = random_circle_field(grid.Nz, int(cfg["seed"]))
        report = verify_lemma_ext(f, grid, seed=int(cfg["seed"]))
    elif theorem == "thm2":
        report = verify_theorem2(modes, grid)
    else:
        sym = _symbol(cfg, theorem)
        try:
            if theorem == "thm1":
                report = verify_theorem1(sym, modes, grid, terms=cfg["terms"], tol=tol)
            else:
                report = verify_theorem3(sym, modes, grid, terms=cfg["terms"] or 1, tol=tol)
        except DegreeTooHigh as exc:
            raise UsageError(f"precondition violated: {exc}") from None
    if cfg["format"] == "csv":
        _emit(report.to_csv(), cfg)
    else:
        _emit(report.to_json(), cfg)
    print(report.summary(), file=sys.stderr)
    return 0 if report.passed else 1


def cmd_dn_spectrum(cfg) -> int:
    nmax = int(cfg["nmax"])
    if nmax < 0:
        raise UsageError("nmax must be nonnegative")
    rows = []
    for n in range(-nmax, nmax + 1):
        dn = float(dn_multiplier(n))
        two = 2.0 * abs(n)
        rows.append([n, dn, two, dn / two - 1.0 if n else None])
    _rows_out(["n", "dn", "two_abs_n", "ratio_minus_1"], rows, cfg)
    return 0


def cmd_boundary_symbol(command: str, cfg) -> int:
    sym = _symbol(cfg, command)
    try:
        b = trace_symbol(sym) if command == "symbol-trace" else poisson_conjugation_symbol(sym)
    except DegreeTooHigh as exc:
        raise UsageError(f"precondition violated: {exc}") from None
    zs, zetas = _floats(cfg["z"]), _floats(cfg["zeta"])
    rows = []
    for z in zs:
        vals = np.broadcast_to(b(np.full(zetas.shape, z), zetas), zetas.shape)
        for k, v in zip(zetas, vals):
            v = complex(v)
            rows.append([float(z), float(k), v.real, v.imag])
    _rows_out(["z", "zeta", "re", "im"], rows, cfg)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if cfg["format"] not in (None, "csv", "json"):
            raise UsageError(f"format must be csv or json, got {cfg['format']!r}")
        if args.command == "verify":
            return cmd_verify(args.theorem, cfg)
        if args.command == "dn-spectrum":
            return cmd_dn_spectrum(cfg)
        return cmd_boundary_symbol(args.command, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NonConvergent as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``spectral-lab <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

from .analysis import exponent_fit, log_grid, remainder_series, shifted_divisor_count, table1, table2
from .constants import gamma_c
from .counting import CountingTable, IndexBase, counting_function, divisor_sieve, divisor_summatory, fmt
from .errors import DescriptorError, SpectralLabError
from .spectra import CircleFamily, ProductOperator, parse_descriptor
from .weyl import aramaki_expansion, laurent_data, weyl_coefficients, wodzicki_residue
from .zeta import LaurentData, laurent_at_pole, zeta_for

PROG = "spectral-lab"
THREADS_ENV = "SPECTRAL_LAB_THREADS"
COMMANDS = (
    "sieve", "divisor-sum", "dc", "count", "gamma-c", "zeta", "laurent",
    "weyl-coeffs", "aramaki", "table1", "table2", "remainder", "wres",
)


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    op: Optional[str] = None
    params: dict = field(default_factory=dict)
    format: str = "csv"
    out: Optional[str] = None
    threads: int = 1

    def __getattr__(self, name):
        # params read like fields: cfg.lam, cfg.c, ...
        params = object.__getattribute__(self, "params")
        if name in params:
            return params[name]
        raise AttributeError(name)


def number(text):
    """Integer when the literal is integral (``1e7`` -> 10000000), else float."""
    try:
        return int(text)
    except ValueError:
        pass
    x = float(text)
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    if x.is_integer() and abs(x) < 2**53:
        return int(x)
    return x


def positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer: {text!r}")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="write to this file instead of standard output")
    common.add_argument("--threads", type=positive_int, default=1, help=f"worker threads (env {THREADS_ENV} wins)")

    p = _Parser(prog=PROG, description="Spectral counting, zeta and Weyl coefficient experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, help):
        return sub.add_parser(name, help=help, parents=[common])

    s = cmd("sieve", "divisor counts d(1..n) by sieve")
    s.add_argument("--n", type=positive_int, required=True)

    s = cmd("divisor-sum", "D(lambda) by the hyperbola method")
    s.add_argument("--lambda", dest="lam", type=number, nargs="+", required=True)

    s = cmd("dc", "D_c(lambda) = #{(n,m): (n^2+c)(m^2+c) <= lambda^2}")
    s.add_argument("--c", type=number, required=True)
    s.add_argument("--lambda", dest="lam", type=number, nargs="+", required=True)
    s.add_argument("--index-base", choices=[b.value for b in IndexBase], default="from_zero")

    s = cmd("count", "counting function N(lambda) of a product operator")
    s.add_argument("--op", required=True)
    s.add_argument("--lambda", dest="lam", type=number, nargs="+", required=True)
    s.add_argument("--predict", action="store_true", help="add the Weyl prediction and residual columns")

    s = cmd("gamma-c", "generalized Euler constant gamma_c")
    s.add_argument("--c", type=number, nargs="+", required=True)
    s.add_argument("--tol", type=float, default=1e-12)
    s.add_argument("--method", choices=("series", "poisson"), default="series")

    s = cmd("zeta", "spectral zeta function at real s")
    s.add_argument("--op", required=True)
    s.add_argument("--s", type=float, nargs="+", required=True)

    s = cmd("laurent", "Laurent data at a pole")
    s.add_argument("--op", required=True)
    s.add_argument("--z0", type=float)
    s.add_argument("--order", type=int, choices=(1, 2))
    s.add_argument("--method", choices=("numeric", "closed-form"), default="numeric")

    s = cmd("weyl-coeffs", "leading counting-function coefficients")
    s.add_argument("--op", required=True)
    s.add_argument("--method", choices=("closed-form", "numeric"), default="closed-form")

    s = cmd("aramaki", "Weyl coefficients from given Laurent data")
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--A2", dest="A2", type=float, default=0.0)
    s.add_argument("--A1", dest="A1", type=float, required=True)
    s.add_argument("--z0", type=float, required=True)

    for name, help in (("table1", "first-term estimates of D_c"), ("table2", "second-term estimates of D_c")):
        s = cmd(name, help)
        s.add_argument("--lambda", dest="lam", type=number, default=10**7)
        s.add_argument("--c-min", type=number, default=2)
        s.add_argument("--c-max", type=number, default=20)
        s.add_argument("--both-conventions", action="store_true", help="add columns for indices from 1")
        if name == "table2":
            s.add_argument(
                "--closed-form-tau",
                type=positive_int,
                help="use the partial sum truncated at this index instead of the limit gamma_c",
            )

    s = cmd("remainder", "divisor remainder Delta(lambda) and its growth exponent")
    s.add_argument("--min", dest="lo", type=number, default=10**4)
    s.add_argument("--max", dest="hi", type=number, default=10**8)
    s.add_argument("--points", type=positive_int, default=400)
    s.add_argument("--c", type=number, help="use the shifted count D_c and gamma_c")

    s = cmd("wres", "bisingular Wodzicki residue m1 m2 A2")
    s.add_argument("--op")
    s.add_argument("--A2", dest="A2", type=float)
    s.add_argument("--m1", type=float)
    s.add_argument("--m2", type=float)
    s.add_argument("--method", choices=("closed-form", "numeric"), default="closed-form")
    return p


def parse_config(argv) -> RunConfig:
    """Validated RunConfig; raises UsageError naming the offending flag."""
    ns = vars(build_parser().parse_args(list(argv)))
    command = ns.pop("command").replace("-", "_")
    fmt_, out, threads = ns.pop("format"), ns.pop("out"), ns.pop("threads")
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            threads = positive_int(env)
        except (ValueError, argparse.ArgumentTypeError):
            raise UsageError(f"{PROG}: {THREADS_ENV}={env!r} is not a positive integer") from None
    op = ns.pop("op", None)
    if op is not None:
        try:
            parse_descriptor(op)
        except DescriptorError as exc:
            raise UsageError(f"{PROG}: argument --op: {exc}") from None
    if command == "wres" and op is None and (ns["A2"] is None or ns["m1"] is None or ns["m2"] is None):
        raise UsageError(f"{PROG}: wres needs --op or all of --A2, --m1, --m2")
    return RunConfig(command, op, ns, fmt_, out, threads)


# -- emitters -------------------------------------------------------------------

def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else v for v in r])
    return buf.getvalue()


def _records(header, rows, form) -> str:
    if form == "json":
        return json.dumps([dict(zip(header, r)) for r in rows]) + "\n"
    return _csv(header, rows)


def _json(obj) -> str:
    return json.dumps(obj) + "\n"


def _product(cfg) -> ProductOperator:
    op = parse_descriptor(cfg.op)
    if not isinstance(op, ProductOperator):
        raise DescriptorError(f"expected a product descriptor, got {cfg.op!r}")
    return op


def _convention(op) -> str:
    fams = [op.factor1, op.factor2] if isinstance(op, ProductOperator) else [op]
    return "folded" if any(isinstance(f, CircleFamily) and f.folded for f in fams) else "lattice"


# -- commands -------------------------------------------------------------------

def _sieve(cfg):
    d = divisor_sieve(cfg.n)
    return _records(("n", "d"), [(i, int(d[i])) for i in range(1, cfg.n + 1)], cfg.format)


def _divisor_sum(cfg):
    return _records(("lambda", "D"), [(x, divisor_summatory(x)) for x in cfg.lam], cfg.format)


def _dc(cfg):
    rows = [(cfg.c, x, cfg.index_base, shifted_divisor_count(cfg.c, x, cfg.index_base)) for x in cfg.lam]
    return _records(("c", "lambda", "index_base", "D_c"), rows, cfg.format)


def _count(cfg):
    op = _product(cfg)
    counts = [counting_function(op, x) for x in cfg.lam]
    if not cfg.predict:
        return _records(("lambda", "exact"), list(zip(cfg.lam, counts)), cfg.format)
    w = weyl_coefficients(op)
    table = CountingTable(convention=_convention(op), operator=cfg.op)
    for x, n in zip(cfg.lam, counts):
        table.add(x, n, w(x))
    if cfg.format == "json":
        return _json({"operator": cfg.op, "convention": table.convention, "rows": [asdict(r) for r in table.rows]})
    return table.to_csv()


def _gamma_c(cfg):
    rows = []
    for c in cfg.c:
        r = gamma_c(c, cfg.tol, cfg.method)
        rows.append((c, r.value, r.error_bound, r.terms_used))
    return _records(("c", "value", "error_bound", "terms_used"), rows, cfg.format)


def _zeta(cfg):
    z = zeta_for(parse_descriptor(cfg.op))
    return _records(("s", "value"), [(s, z(s)) for s in cfg.s], cfg.format)


def _laurent(cfg):
    op = parse_descriptor(cfg.op)
    if isinstance(op, ProductOperator):
        z0 = op.z0 if cfg.z0 is None else cfg.z0
        order = op.pole_order if cfg.order is None else cfg.order
        if cfg.method == "closed-form":
            ld = laurent_data(op, "closed-form")
        else:
            ld = laurent_at_pole(zeta_for(op), z0, order)
    else:
        z0 = op.ratio if cfg.z0 is None else cfg.z0
        ld = laurent_at_pole(zeta_for(op), z0, cfg.order or 1)
    return _json(ld.to_dict())


def _weyl_coeffs(cfg):
    op = _product(cfg)
    w = weyl_coefficients(op, cfg.method)
    return _json({
        "z0": w.z0,
        "coeff_log": w.coeff_log,
        "coeff_plain": w.coeff_plain,
        "method": cfg.method,
        "convention": _convention(op),
    })


def _aramaki(cfg):
    ld = LaurentData(cfg.z0, cfg.order, cfg.A2, cfg.A1, None)
    w = aramaki_expansion(ld, cfg.z0)
    return _json({"z0": w.z0, "coeff_log": w.coeff_log, "coeff_plain": w.coeff_plain, "method": "aramaki"})


def _cs(cfg):
    return [c for c in range(cfg.c_min, cfg.c_max + 1)]


def _table1(cfg):
    t = table1(cfg.lam, _cs(cfg), cfg.both_conventions, cfg.threads)
    return _json(t.to_dict()) if cfg.format == "json" else t.to_csv()


def _table2(cfg):
    t = table2(cfg.lam, _cs(cfg), cfg.both_conventions, cfg.closed_form_tau, cfg.threads)
    return _json(t.to_dict()) if cfg.format == "json" else t.to_csv()


def _remainder(cfg):
    study = remainder_series(log_grid(cfg.lo, cfg.hi, cfg.points), cfg.c, cfg.threads)
    try:
        exponent_fit(study)
    except SpectralLabError as exc:
        print(f"{PROG}: note: no exponent fit ({exc})", file=sys.stderr)
    if cfg.format == "json":
        return _json(study.to_dict())
    if study.fitted_exponent is not None:
        print(
            f"{PROG}: fitted exponent {study.fitted_exponent:.6f} (r^2 {study.fit_rsquared:.4f}); "
            f"hardy {study.references['hardy']}, huxley {study.references['huxley']:.6f}",
            file=sys.stderr,
        )
    return study.to_csv()


def _wres(cfg):
    if cfg.op is not None:
        op = _product(cfg)
        ld = laurent_data(op, cfg.method)
        m1 = op.orders[0] if cfg.m1 is None else cfg.m1
        m2 = op.orders[1] if cfg.m2 is None else cfg.m2
    else:
        ld = LaurentData(0.5, 2, cfg.A2, 0.0, None) if cfg.A2 != 0 else None
        m1, m2 = cfg.m1, cfg.m2
    value = wodzicki_residue(ld, m1, m2) if ld is not None else 0.0
    return _json({"wres": value, "A2": ld.A2 if ld else 0.0, "m1": m1, "m2": m2})


_HANDLERS = {name.replace("-", "_"): globals()["_" + name.replace("-", "_")] for name in COMMANDS}


def run(config: RunConfig) -> int:
    """Execute ``config``; returns the exit status (0 ok, 1 domain error)."""
    try:
        text = _HANDLERS[config.command](config)
    except SpectralLabError as exc:
        print(f"{PROG}: {exc.module or 'error'}: {exc}", file=sys.stderr)
        return 1
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(str(exc).splitlines()[0], file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

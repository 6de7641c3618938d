"""Command-line front end: ``mboot verify|simulate|order``.

Exit codes: 0 success, 1 usage or configuration error, 2 verification
failure, 3 numeric failure (non-convergence or a degenerate projection).
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import math
import sys
from importlib import resources

import numpy as np

from .bootstrap import MonteCarloEngine, QuadratureEngine, multistep
from .bootstrap.calibration import double_bootstrap_z, pivot
from .bootstrap.order import accuracy_order_study
from .config import ConfigError, load_config, parse_config
from .engines import RandomSource
from .errors import ConvergenceError, DegenerateInputError, InvalidArgumentError, NumericDomainError
from .verify import run_suites

__all__ = ["main", "simulate_rows", "order_rows", "verify_rows", "SIMULATE_COLUMNS"]

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3
SIMULATE_COLUMNS = ("method", "tau1", "tau2", "tau3", "lambda", "prob", "z", "se", "engine", "seed")
ORDER_COLUMNS = ("method", "eps", "alpha", "rate", "error")
VERIFY_COLUMNS = ("check", "value", "reference", "tolerance", "rule", "passed")


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return "nan" if math.isnan(x) else format(float(x), ".17g")
    return str(x)


def _write_csv(rows, columns, out):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    text = buf.getvalue()
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _scale_tuples(cfg, k):
    taus = cfg.scales().scales
    if k == 1 or cfg.scales_grid == "diagonal":
        return [(t,) * k for t in taus]
    if cfg.scales_grid == "first":
        return [(t,) + (1.0,) * (k - 1) for t in taus]
    return list(itertools.product(taus, repeat=k))


def _quad(cfg):
    return QuadratureEngine(nodes=cfg.quad_nodes, nested_nodes=cfg.quad_nested_nodes,
                            tangent_nodes=cfg.quad_tangent_nodes)


def _engine(cfg, stream, threads):
    if cfg.engine == "mc":
        return MonteCarloEngine(cfg.mc_draws, RandomSource(cfg.seed, stream), threads)
    return _quad(cfg)


def simulate_rows(cfg, threads=None):
    """One row per (center, method, scale tuple); MC rows use stream = row index.

    Non-Gaussian tensors reach the pivot and the one-step quadrature
    probabilities; other methods reject them.
    """
    surface = cfg.surface()
    tensors = cfg.tensors()
    if not tensors.is_gaussian and "double" in cfg.methods:
        raise InvalidArgumentError("the double bootstrap supports the Gaussian model only")
    rows = []

    def add(est, lam):
        taus = list(est.scales) + [None] * (3 - len(est.scales))
        rows.append(dict(zip(SIMULATE_COLUMNS, (
            est.method, taus[0], taus[1], taus[2], lam, est.prob, est.z, est.se, est.engine, cfg.seed,
        ))))

    for lam in cfg.centers_lambda:
        y = np.zeros(cfg.p)
        y[-1] = lam
        for method in cfg.methods:
            if method in ("bp1", "bp2", "bp3"):
                for taus in _scale_tuples(cfg, int(method[-1])):
                    add(multistep(y, taus, surface, _engine(cfg, len(rows), threads), tensors), lam)
            elif method == "naive":
                est = multistep(y, (1.0,), surface, _engine(cfg, len(rows), threads), tensors)
                add(est.__class__(**{**est.__dict__, "method": "naive"}), lam)
            elif method == "double":
                add(double_bootstrap_z(y, surface, _engine(cfg, len(rows), threads)), lam)
            else:
                add(pivot(y, surface, tensors), lam)
    return rows


def order_rows(cfg):
    family = cfg.family()
    engine = _quad(cfg)
    rows, reports = [], []
    for method in cfg.order_methods:
        rep = accuracy_order_study(method, family, cfg.order_alpha, cfg.family_eps, engine)
        reports.append(rep)
        for eps, rate, err in zip(rep.eps, rep.rate, rep.error):
            rows.append(dict(method=method, eps=eps, alpha=rep.alpha, rate=rate, error=err))
    return rows, reports


def verify_rows(cfg):
    rows = run_suites(cfg.verify_checks, cfg.verify_inject)
    return [
        dict(check=r.name, value=r.value, reference=r.reference, tolerance=r.tolerance, rule=r.rule, passed=r.passed)
        for r in rows
    ]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _parser():
    ap = _Parser(prog="mboot", description="Multiscale bootstrap formulas, experiments and order studies.")
    ap.add_argument("command", choices=("verify", "simulate", "order"))
    ap.add_argument("--config", help="dotted key-value or JSON config (default: packaged default)")
    ap.add_argument("--seed", type=int, help="64-bit seed, overrides the config")
    ap.add_argument("--engine", choices=("mc", "quad"), help="overrides the config engine")
    ap.add_argument("--out", help="output CSV path (default: stdout)")
    ap.add_argument("--threads", type=int, help="worker threads (fallback: MBOOT_THREADS, then 1)")
    return ap


def _default_config_text():
    return resources.files("mboot").joinpath("data/default.toml").read_text(encoding="utf-8")


def _load(args):
    cfg = load_config(args.config) if args.config else parse_config(_default_config_text())
    overrides = {}
    if args.seed is not None:
        if not 0 <= args.seed < 1 << 64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        overrides["seed"] = args.seed
    if args.engine is not None:
        overrides["engine"] = "mc" if args.engine == "mc" else "quadrature"
    if args.threads is not None and args.threads < 1:
        raise ConfigError("--threads must be positive")
    if overrides:
        cfg = cfg.__class__({**cfg.values, **overrides})
    return cfg


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = _load(args)
        out = args.out or cfg.output
        threads = args.threads or cfg.threads
        if args.command == "verify":
            if not cfg.verify_checks:
                raise ConfigError("verify.checks is empty: nothing to verify")
            rows = verify_rows(cfg)
            _write_csv(rows, VERIFY_COLUMNS, out)
            failed = [r["check"] for r in rows if not r["passed"]]
            msg = sys.stderr if out in (None, "-") else sys.stdout
            print(f"{len(rows) - len(failed)}/{len(rows)} checks passed", file=msg)
            for name in failed:
                print(f"FAILED {name}", file=msg)
            return EXIT_VERIFY if failed else EXIT_OK
        if args.command == "simulate":
            _write_csv(simulate_rows(cfg, threads), SIMULATE_COLUMNS, out)
            return EXIT_OK
        rows, reports = order_rows(cfg)
        _write_csv(rows, ORDER_COLUMNS, out)
        msg = sys.stderr if out in (None, "-") else sys.stdout
        for rep in reports:
            slope = "NA (below noise floor)" if rep.below_floor else f"{rep.slope:.3f}"
            print(f"slope[{rep.method}] = {slope}", file=msg)
        return EXIT_OK
    except (ConfigError, InvalidArgumentError, OSError) as exc:
        print(f"mboot: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, NumericDomainError, DegenerateInputError) as exc:
        print(f"mboot: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end writing CSV tables.

Exit status is 0 on success, 2 for usage or scenario errors and 1 when a
computation fails. Output files are written atomically, so a failed run never
leaves a partial CSV behind.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
import warnings
from dataclasses import replace

import numpy as np

from . import credit
from .errors import DomainError, LatticeError, ScenarioError, TCBMError
from .first_passage import fp2_cdf
from .montecarlo import mc_fp2, mc_price
from .portfolio import loss_distribution
from .scenario import BUILTINS, GridSpec, Scenario, load_scenario

COLUMNS = {
    "spread-curve": ("maturity_years", "riskfree_price", "zero_recovery_price", "yield_spread"),
    "default-pdf": ("t_years", "pdf", "cdf"),
    "bond-price": ("maturity_years", "riskfree_price", "zero_recovery_price", "recovery_price"),
    "cds-spread": ("maturity_years", "premium_leg", "default_leg", "spread"),
    "portfolio-loss": ("loss_level", "probability"),
    "mc-validate": ("quantity", "analytic", "mc_estimate", "mc_stderr", "z_score"),
}
MC_TIMES = (1.0, 5.0, 10.0, 30.0)
MC_BOND_MATURITIES = (5.0, 10.0)


def _fmt(v):
    if isinstance(v, str):
        return v
    return format(float(v), ".12g")


def spread_curve(scen: Scenario, grid):
    firm, q = scen.firm(), scen.quadrature
    for T in grid:
        yield T, credit.riskfree_bond(firm, T), credit.zero_recovery_bond(firm, T, q), credit.yield_spread(firm, T, q)


def default_pdf(scen: Scenario, grid):
    firm, q = scen.firm(), scen.quadrature
    cdf = np.array([credit.default_probability(firm, t, q) for t in grid])
    pdf = np.gradient(cdf, grid) if len(grid) > 1 else np.zeros(1)
    return zip(grid, pdf, cdf)


def bond_price(scen: Scenario, grid):
    firm, q = scen.firm(), scen.quadrature
    for T in grid:
        z = credit.zero_recovery_bond(firm, T, q)
        p0 = credit.riskfree_bond(firm, T)
        r = firm.recovery
        yield T, p0, z, (1.0 - r) * z + r * p0


def cds_spread(scen: Scenario, grid):
    firm, q = scen.firm(), scen.quadrature
    for T in grid:
        if T <= 0:
            raise DomainError("CDS maturities must be > 0")
        v, w = credit.cds_legs(firm, T, q=q)
        yield T, v, w, w / v


def portfolio_loss(scen: Scenario, grid):
    spec = scen.portfolio_spec()
    levels, probs = loss_distribution(spec, scen.portfolio.horizon, scen.quadrature)
    return zip(levels, probs)


def mc_validate(scen: Scenario, grid):
    firm, q, sim = scen.firm(), scen.quadrature, scen.mc
    tc, p = scen.time_change(), scen.brownian
    est = mc_fp2(tc, p, MC_TIMES, sim)
    for i, t in enumerate(MC_TIMES):
        a = fp2_cdf(t, p, tc, q)
        yield (f"default_probability@{t:g}", a, est.estimate[i], est.stderr[i], est.z_score(a)[i])
    for T in MC_BOND_MATURITIES:
        a = credit.zero_recovery_bond(firm, T, q)
        r = mc_price(firm, "zero_recovery_bond", T, sim)
        yield (f"zero_recovery_bond@{T:g}", a, r.estimate, r.stderr, r.z_score(a))


COMMANDS = {
    "spread-curve": spread_curve,
    "default-pdf": default_pdf,
    "bond-price": bond_price,
    "cds-spread": cds_spread,
    "portfolio-loss": portfolio_loss,
    "mc-validate": mc_validate,
}


def render(command: str, scen: Scenario, grid=None) -> str:
    """Run ``command`` and return the CSV text."""
    grid = scen.grid.points() if grid is None else np.asarray(grid, dtype=float)
    rows = list(COMMANDS[command](scen, grid))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS[command])
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_atomic(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tcbm-credit", description="Time-changed Brownian motion credit analytics.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--scenario", required=True,
                    help=f"scenario file or built-in ({', '.join(BUILTINS)})")
    ap.add_argument("--out", required=True, help="output CSV path")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--paths", type=int, help="Monte Carlo paths")
    ap.add_argument("--tol", type=float, help="quadrature absolute tolerance")
    ap.add_argument("--maturity-grid", metavar="START,STOP,COUNT,linear|log")
    ap.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                    help="override a scenario value (repeatable)")
    return ap


def _scenario_from_args(args) -> Scenario:
    overrides = list(args.set)
    if args.seed is not None:
        overrides.append(f"mc.seed={args.seed}")
    if args.paths is not None:
        overrides.append(f"mc.n_paths={args.paths}")
    if args.tol is not None:
        overrides.append(f"quadrature.abs_tol={args.tol!r}")
    scen = load_scenario(args.scenario, overrides)
    if args.maturity_grid:
        scen = replace(scen, grid=GridSpec.from_string(args.maturity_grid))
    return scen


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            scen = _scenario_from_args(args)
        except (ScenarioError, DomainError) as exc:
            print(f"scenario error: {exc}", file=sys.stderr)
            return 2
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    try:
        text = render(args.command, scen)
    except (ScenarioError, LatticeError) as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    except (TCBMError, ArithmeticError, ValueError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1
    try:
        write_atomic(args.out, text)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

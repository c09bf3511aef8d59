"""Command-line interface.

Subcommands: solve, verify, design, sweep, simulate, payoff-curve.

Exit codes: 0 success (and, for verify, a confirmed equilibrium), 2 invalid
configuration, 3 refuted equilibrium, 4 undetermined verdict.

Numbers are written with 9 significant digits.  ``--format csv`` writes a
header line first; tabular commands (sweep, payoff-curve) use their natural
columns, the others use ``key,value`` rows with list entries as ``name[i]``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import design as design_mod
from .equilibrium import candidate_equilibrium, uniform_payoff
from .errors import ContestError, InfeasibleRuleError
from .rules import ContestParams, PrizeRule, load_rule, majority_rule, tie_margin_rule
from .simulate import empirical_check, simulate_contest
from .verification import CONFIRMED, REFUTED, ScanSettings, scan_grid, verify_equilibrium

EXIT_OK, EXIT_INVALID, EXIT_REFUTED, EXIT_UNDETERMINED = 0, 2, 3, 4


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    params: ContestParams
    rule_spec: str = "majority"
    output_format: str = "json"
    output_path: str | None = None
    seed: int | None = None
    trials: int | None = None
    scan: ScanSettings = field(default_factory=ScanSettings)

    def rule(self) -> PrizeRule:
        return resolve_rule(self.rule_spec, self.params.n)


def resolve_rule(spec: str, n: int) -> PrizeRule:
    if spec == "majority":
        return majority_rule(n)
    if spec.startswith("tie:"):
        try:
            T = int(spec[4:])
        except ValueError:
            raise ConfigError(f"bad tie threshold in rule spec {spec!r}") from None
        return tie_margin_rule(n, T)
    if spec.startswith("file:"):
        return load_rule(spec[5:], n)
    raise ConfigError(f"unknown rule spec {spec!r}; use majority, tie:T or file:PATH")


# ---------------------------------------------------------------- formatting

def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.9g}")


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (str, type(None))):
        return obj
    return _num(obj)


def _flatten(doc, prefix=""):
    for key, val in doc.items():
        name = f"{prefix}{key}"
        if isinstance(val, dict):
            yield from _flatten(val, name + ".")
        elif isinstance(val, list):
            for i, item in enumerate(val):
                yield f"{name}[{i}]", item
        else:
            yield name, val


def _cell(x):
    if x is None:
        return "nan"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def render(doc, fmt: str, table: tuple[list, list] | None = None) -> str:
    if fmt == "json":
        return json.dumps(_clean(doc), indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if table is not None:
        header, rows = table
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(_num(c)) for c in row])
    else:
        w.writerow(["key", "value"])
        for k, v in _flatten(_clean(doc)):
            w.writerow([k, _cell(v)])
    return buf.getvalue()


def emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _solution_doc(sol):
    return {
        "p_A": sol.p_A, "p_B": sol.p_B, "x_A": sol.x_A, "x_B": sol.x_B,
        "spread": sol.spread, "payoff_A": sol.payoff_A, "payoff_B": sol.payoff_B,
        "total_effort": sol.total_effort,
    }


# ---------------------------------------------------------------- commands

def cmd_solve(cfg: RunConfig, args) -> int:
    rule = cfg.rule()
    sol = candidate_equilibrium(cfg.params, rule)
    doc = {"n": cfg.params.n, "r": cfg.params.r, "rule": list(rule.shares), **_solution_doc(sol)}
    emit(render(doc, cfg.output_format), cfg.output_path)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    rule = cfg.rule()
    rep = verify_equilibrium(cfg.params, rule, cfg.scan)
    doc = {
        "verdict": rep.is_equilibrium,
        "sufficient_ok": rep.sufficient_ok,
        "necessary_payoff_B": rep.necessary_payoff_B,
        "necessary_ok": rep.necessary_ok,
        "slope_A_at_candidate": rep.slope_A_at_candidate,
        "slope_B_at_candidate": rep.slope_B_at_candidate,
        "global_br_A": {"effort": rep.global_br_A[0], "payoff": rep.global_br_A[1]},
        "global_br_B": {"effort": rep.global_br_B[0], "payoff": rep.global_br_B[1]},
        "unique": rep.unique,
        "candidate": _solution_doc(rep.candidate),
        "notes": list(rep.notes),
    }
    emit(render(doc, cfg.output_format), cfg.output_path)
    detail = f" ({'; '.join(rep.notes)})" if rep.notes else ""
    print(f"verdict: {rep.is_equilibrium}{detail}", file=sys.stderr)
    if rep.is_equilibrium == CONFIRMED:
        return EXIT_OK
    return EXIT_REFUTED if rep.is_equilibrium == REFUTED else EXIT_UNDETERMINED


def cmd_design(cfg: RunConfig, args) -> int:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", design_mod.OutsideVerifiedRegime)
        out = design_mod.optimal_rule(cfg.params)
    doc = {
        "p_A": out.equilibrium.p_A,
        "g_profile": list(out.g_profile),
        "k_star": out.k_star,
        "threshold_T": out.threshold_T,
        "tie_margin": out.margin,
        "rule": list(out.rule.shares),
        "total_effort": out.total_effort,
        "verified_regime": out.verified_regime,
    }
    if args.brute_force:
        bf_rule, bf_te = design_mod.brute_force_optimal(cfg.params)
        agree = abs(bf_te - out.total_effort) <= 1e-12
        doc["brute_force"] = {"rule": list(bf_rule.shares), "total_effort": bf_te, "agrees": agree}
        print("oracle agrees" if agree else "oracle DISAGREES", file=sys.stderr)
    emit(render(doc, cfg.output_format), cfg.output_path)
    return EXIT_OK


def cmd_sweep(cfg: RunConfig | None, args) -> int:
    fmt = args.format or "csv"
    if args.table1:
        ns = _int_list(args.n_list or "3,5,7,9,11,21,31,51,101")
        rows = [(n, *design_mod.existence_bounds(n)) for n in ns]
        header = ["n", "symmetric", "asymmetric", "ratio"]
    elif args.threshold:
        ns = _int_list(args.n_list) if args.n_list else [_require(args.n, "--n")]
        grid = np.linspace(args.p_min, args.p_max, args.steps)
        rows = [(n, p, T) for n in ns for p, T in design_mod.sweep_threshold(n, grid)]
        header = ["n", "p", "T"]
    else:
        raise ConfigError("sweep needs --table1 or --threshold")
    doc = {"columns": header, "rows": [list(r) for r in rows]}
    emit(render(doc, fmt, (header, rows)), args.out)
    return EXIT_OK


def cmd_simulate(cfg: RunConfig, args) -> int:
    rule = cfg.rule()
    sol = candidate_equilibrium(cfg.params, rule)
    n = cfg.params.n
    trials = cfg.trials if cfg.trials is not None else 10**5
    seed = cfg.seed if cfg.seed is not None else 42
    summ = simulate_contest(cfg.params, rule, [sol.x_A] * n, [sol.x_B] * n, trials, seed,
                            partitions=args.partitions or 1)
    chk = empirical_check(summ, sol, rule)
    doc = {
        "trials": summ.trials,
        "seed": summ.seed,
        "win_counts_A": list(summ.win_counts_A),
        "mean_battles_won_A": summ.mean_battles_won_A,
        "per_battle_freq_A": list(summ.per_battle_freq_A),
        "empirical_prize_A": summ.empirical_prize_A,
        "empirical_payoff_A": summ.empirical_payoff_A,
        "empirical_payoff_B": summ.empirical_payoff_B,
        "analytic": _solution_doc(sol),
        "z_per_battle": list(chk.z_per_battle),
        "z_mean_battles": chk.z_mean_battles,
        "chi2": chk.chi2,
        "chi2_dof": chk.chi2_dof,
        "chi2_pvalue": chk.chi2_pvalue,
        "z_payoff_A": chk.z_payoff_A,
        "z_payoff_B": chk.z_payoff_B,
    }
    emit(render(doc, cfg.output_format), cfg.output_path)
    return EXIT_OK


def cmd_payoff_curve(cfg: RunConfig, args) -> int:
    rule = cfg.rule()
    sol = candidate_equilibrium(cfg.params, rule)
    player = args.player
    own, other = (sol.x_A, sol.x_B) if player == "A" else (sol.x_B, sol.x_A)
    grid = scan_grid(own if own > 0 else other, cfg.scan)
    if player == "A":
        values = uniform_payoff(cfg.params, rule, grid, other, "A")
    else:
        values = uniform_payoff(cfg.params, rule, other, grid, "B")
    rows = list(zip(grid, values))
    header = ["effort", "payoff"]
    fmt = args.format or "csv"
    emit(render({"player": player, "candidate": own, "rows": [list(r) for r in rows]}, fmt, (header, rows)),
         cfg.output_path)
    return EXIT_OK


# ---------------------------------------------------------------- argument handling

def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad integer list {text!r}") from None


def _require(value, flag):
    if value is None:
        raise ConfigError(f"{flag} is required")
    return value


def _common(p: argparse.ArgumentParser, fmt_default: str | None):
    p.add_argument("--config", help="JSON file with flag values (flags take precedence)")
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=float, help="discriminatory power; defaults to 2/(n+1)")
    p.add_argument("--cost-a", type=float)
    p.add_argument("--cost-b", type=float)
    p.add_argument("--cost-b-ratio-from-pb", type=float, metavar="P_B",
                   help="set cost-b so the weak player's baseline win probability is P_B")
    p.add_argument("--p", type=float, help="baseline win probability of A (sets cost-b)")
    p.add_argument("--rule", help="majority | tie:T | file:PATH")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--points", type=int)
    p.add_argument("--min-mult", type=float)
    p.add_argument("--max-mult", type=float)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.set_defaults(fmt_default=fmt_default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multicontest", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fmt in (("solve", "json"), ("verify", "json"), ("simulate", "json")):
        _common(sub.add_parser(name), fmt)
    sub.choices["simulate"].add_argument("--partitions", type=int)

    d = sub.add_parser("design")
    _common(d, "json")
    d.add_argument("--brute-force", action="store_true")

    s = sub.add_parser("sweep")
    _common(s, "csv")
    s.add_argument("--table1", action="store_true")
    s.add_argument("--threshold", action="store_true")
    s.add_argument("--n-list")
    s.add_argument("--p-min", type=float, default=0.5)
    s.add_argument("--p-max", type=float, default=0.95)
    s.add_argument("--steps", type=int, default=10)

    c = sub.add_parser("payoff-curve")
    _common(c, "csv")
    c.add_argument("--player", choices=("A", "B"), default="A")
    return parser


def _merge_config(args):
    if not args.config:
        return
    try:
        data = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    for key, val in data.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise ConfigError(f"unknown config key {key!r}")
        if getattr(args, dest) in (None, False):
            setattr(args, dest, val)


def build_config(args) -> RunConfig:
    n = _require(args.n, "--n")
    r = args.r if args.r is not None else min(1.0, 2.0 / (n + 1))
    c_A = args.cost_a if args.cost_a is not None else 1.0
    if args.p is not None:
        params = ContestParams.from_baseline(n, r, args.p, c_A)
    elif args.cost_b_ratio_from_pb is not None:
        params = ContestParams.from_weak_baseline(n, r, args.cost_b_ratio_from_pb, c_A)
    else:
        params = ContestParams(n, r, c_A, args.cost_b if args.cost_b is not None else c_A)
    defaults = ScanSettings()
    scan = ScanSettings(
        points=args.points or defaults.points,
        min_mult=args.min_mult or defaults.min_mult,
        max_mult=args.max_mult or defaults.max_mult,
    )
    cfg = RunConfig(params, args.rule or "majority", args.format or args.fmt_default, args.out,
                    args.seed, args.trials, scan)
    cfg.rule()  # resolve before any computation
    return cfg


COMMANDS = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "design": cmd_design,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "payoff-curve": cmd_payoff_curve,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _merge_config(args)
        cfg = None if args.command == "sweep" else build_config(args)
        return COMMANDS[args.command](cfg, args)
    except InfeasibleRuleError as exc:
        print("invalid prize rule:", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return EXIT_INVALID
    except (ConfigError, ContestError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

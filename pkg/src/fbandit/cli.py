"""Command-line interface.

Subcommands: simulate, sweep, table1, eval, ci, samplesize, bound, ingest.
Configuration comes from a JSON file (see fbandit.config); flags override
individual keys.  Exit codes: 0 success, 2 config error, 3 data error,
4 numeric error.  FB_SEED serves as the seed fallback.

All CSV output serializes floats with 17 significant digits, and re-running
any command with the same seed and config produces byte-identical files,
independent of the worker count.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .config import ExperimentConfig, parse_arm
from .errors import ConfigError, DataError, FbanditError, NumericError
from .ecdf import ecdf_from_samples
from .functionals import evaluate
from .inference import (
    dkwm_ci,
    famoss_regret_bound,
    fucb_regret_bound,
    hpb_bound,
    n1_for_es_regret,
    n1_for_power,
)
from .ingest import ingest_empirical, read_outcomes_csv
from .policies import PolicySpec
from .simulation import (
    Instance,
    PAPER11_GRID,
    beta_pair_instances,
    expected_regret,
    max_regret_sweep,
    relative_regret_table,
)
from .textcodec import encode_policy_variant, parse_functional, parse_policy_variant


def _f(x: float) -> str:
    return f"{x:.17g}"


def _write_lines(path: str, lines) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


# ---------------------------------------------------------------------------
# SVG emission: one polyline per policy over the max-regret curve

_SVG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def write_svg(path, ts, series, logx=False, title="max expected regret"):
    w, h, ml, mb, mt, mr = 800, 520, 70, 50, 30, 20
    xs = np.log10(np.asarray(ts, dtype=float)) if logx else np.asarray(ts, dtype=float)
    ymax = max(float(np.max(v)) for _, v in series) or 1.0
    x0, x1 = float(xs.min()), float(xs.max())
    xspan = (x1 - x0) or 1.0

    def px(x):
        return ml + (x - x0) / xspan * (w - ml - mr)

    def py(y):
        return h - mb - y / ymax * (h - mb - mt)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<line x1="{ml}" y1="{h-mb}" x2="{w-mr}" y2="{h-mb}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{h-mb}" stroke="black"/>',
        f'<text x="{w/2:.0f}" y="{h-10}" text-anchor="middle" font-size="13">'
        f"t{' (log scale)' if logx else ''}</text>",
        f'<text x="15" y="{h/2:.0f}" font-size="13" transform="rotate(-90 15 {h/2:.0f})" '
        f'text-anchor="middle">{title}</text>',
    ]
    for k, (name, vals) in enumerate(series):
        color = _SVG_COLORS[k % len(_SVG_COLORS)]
        pts = " ".join(f"{px(x):.2f},{py(float(v)):.2f}" for x, v in zip(xs, vals))
        out.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>'
        )
        out.append(
            f'<text x="{w-mr-220}" y="{mt+16*(k+1)}" font-size="12" fill="{color}">{name}</text>'
        )
    out.append("</svg>")
    _write_lines(path, out)


# ---------------------------------------------------------------------------
# experiment assembly

def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    for key in (
        "functional", "n", "reps", "seed", "outdir", "workers", "engine", "grid",
    ):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if getattr(args, "policy", None):
        cfg.policies = list(args.policy)
    if getattr(args, "checkpoints", None):
        cfg.checkpoints = [int(t) for t in args.checkpoints.split(",")]
    if getattr(args, "ns", None):
        cfg.ns = [int(t) for t in args.ns.split(",")]
    if getattr(args, "functionals", None):
        cfg.functionals = args.functionals.split(";")
    return cfg


def _build_instances(cfg: ExperimentConfig):
    support = cfg.support_interval()
    functional = parse_functional(cfg.functional, support)
    grid = cfg.grid_values()
    if cfg.arms:
        arms = tuple(parse_arm(a, support) for a in cfg.arms)
        return [Instance(arms, functional, cfg.oracle_grid)], functional
    if grid:
        return beta_pair_instances(grid, functional, cfg.oracle_grid), functional
    raise ConfigError("config needs either 'arms' or 'grid'")


def _build_policies(cfg: ExperimentConfig, functional, K: int):
    if not cfg.policies:
        raise ConfigError("config field 'policies' must be a nonempty list")
    out = []
    for text in cfg.policies:
        out.append(PolicySpec(parse_policy_variant(text), functional, K))
    return out


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    instances, functional = _build_instances(cfg)
    policies = _build_policies(cfg, functional, instances[0].K)
    seed = cfg.resolved_seed()
    lines = ["policy,instance,rep,t,regret"]
    maxreg_series = []
    cps_ref = None
    for pol in policies:
        label = encode_policy_variant(pol.variant)
        per_instance = []
        for j, inst in enumerate(instances):
            res = expected_regret(
                inst, pol, cfg.n, cfg.reps, seed, cfg.checkpoints,
                engine=cfg.engine, workers=cfg.workers,
            )
            cps_ref = res.checkpoints
            per_instance.append(res.mean)
            for r in range(cfg.reps):
                for i, t in enumerate(res.checkpoints):
                    lines.append(
                        f"{label},{j},{r},{int(t)},{_f(res.per_rep[r, i])}"
                    )
        maxreg_series.append((label, np.max(per_instance, axis=0)))
    out = os.path.join(cfg.outdir, "trajectory.csv")
    _write_lines(out, lines)
    if getattr(args, "svg", None):
        write_svg(os.path.join(cfg.outdir, args.svg), cps_ref, maxreg_series, args.logx)
    print(out)
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    instances, functional = _build_instances(cfg)
    policies = _build_policies(cfg, functional, instances[0].K)
    seed = cfg.resolved_seed()
    sweep = max_regret_sweep(
        instances, policies, cfg.n, cfg.reps, seed, cfg.checkpoints,
        engine=cfg.engine, workers=cfg.workers,
    )
    lines = ["policy,t,max_expected_regret,argmax_instance"]
    series = []
    for p, pol in enumerate(policies):
        label = encode_policy_variant(pol.variant)
        for i, t in enumerate(sweep.checkpoints):
            lines.append(
                f"{label},{int(t)},{_f(sweep.max_regret[p, i])},{int(sweep.argmax_instance[p, i])}"
            )
        series.append((label, sweep.max_regret[p]))
    out = os.path.join(cfg.outdir, "maxregret.csv")
    _write_lines(out, lines)
    if getattr(args, "svg", None):
        write_svg(os.path.join(cfg.outdir, args.svg), sweep.checkpoints, series, args.logx)
    print(out)
    return 0


TABLE1_FUNCTIONALS = (
    "gini-welfare",
    "schutz-welfare",
    "atkinson-welfare:eps=0.1",
    "atkinson-welfare:eps=0.5",
)


def cmd_table1(args) -> int:
    """Terminal max regret of the horizon-aware explore-then-commit policy
    relative to F-UCB, per functional and horizon (cyclic exploration on the
    reduced 11-value grid unless overridden)."""
    cfg = _load_config(args)
    support = cfg.support_interval()
    grid = cfg.grid_values() or PAPER11_GRID
    ns = cfg.ns or [1000]
    names = cfg.functionals or list(TABLE1_FUNCTIONALS)
    functionals = [(name, parse_functional(name, support)) for name in names]
    seed = cfg.resolved_seed()

    def etc_factory(func):
        return PolicySpec(parse_policy_variant("etc-horizon:explore=cyclic"), func, 2)

    def ucb_factory(func):
        return PolicySpec(parse_policy_variant("fucb:beta=2.01"), func, 2)

    table = relative_regret_table(
        ns, grid, functionals, cfg.reps, seed, etc_factory, ucb_factory,
        engine=cfg.engine, workers=cfg.workers, oracle_grid=cfg.oracle_grid,
    )
    lines = ["functional,n,ratio"]
    for label, ratios in table.rows:
        for n in table.ns:
            lines.append(f"{label},{n},{_f(ratios[n])}")
    out = os.path.join(cfg.outdir, "table.csv")
    _write_lines(out, lines)
    print(out)
    return 0


def _per_arm_cdfs(args):
    support = ExperimentConfig(support=[args.a, args.b]).support_interval()
    functional = parse_functional(args.functional, support)
    groups = read_outcomes_csv(args.data)
    return functional, {k: ecdf_from_samples(v, support) for k, v in groups.items()}


def cmd_eval(args) -> int:
    functional, cdfs = _per_arm_cdfs(args)
    for arm, F in cdfs.items():
        print(f"{arm} {_f(evaluate(functional, F))}")
    return 0


def cmd_ci(args) -> int:
    functional, cdfs = _per_arm_cdfs(args)
    for arm, F in cdfs.items():
        ci = dkwm_ci(functional, F, args.alpha)
        print(
            f"{arm} center={_f(ci.center)} half_width={_f(ci.half_width)} "
            f"lower={_f(ci.lower)} upper={_f(ci.upper)} level={_f(ci.level)}"
        )
    return 0


def cmd_samplesize(args) -> int:
    if args.rule == "etc-es":
        print(n1_for_es_regret(args.c, args.delta, args.k))
    else:
        print(n1_for_power(args.c, args.delta, args.alpha, args.eta))
    return 0


def cmd_bound(args) -> int:
    if args.kind == "fucb":
        rep = fucb_regret_bound(args.beta, args.c, args.k, args.n)
        print(f"bound={_f(rep.value)} constant={_f(rep.constant)}")
    elif args.kind == "famoss":
        rep = famoss_regret_bound(args.beta, args.c, args.k, args.n)
        print(f"bound={_f(rep.value)} constant={_f(rep.constant)}")
    else:
        deltas = [float(d) for d in args.deltas.split(",")]
        thr, prob = hpb_bound(deltas, args.c, args.beta, args.n, args.x)
        print(f"threshold={_f(thr)} prob_bound={_f(prob)}")
    return 0


def cmd_ingest(args) -> int:
    arm_ids = args.arms.split(",") if args.arms else None
    arms = ingest_empirical(args.input, args.transform, flip=args.flip, arm_ids=arm_ids)
    lines = ["arm_id,outcome"]
    for arm, dist in arms.items():
        for y in dist.pool.samples:
            lines.append(f"{arm},{_f(float(y))}")
    _write_lines(args.output, lines)
    print(args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fbandit",
        description="Sequential treatment allocation targeting distributional functionals",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--functional")
        sp.add_argument("--policy", action="append", help="repeatable policy spec")
        sp.add_argument("--grid")
        sp.add_argument("--preset", dest="grid", help="grid preset: paper21 or paper11")
        sp.add_argument("--n", type=int)
        sp.add_argument("--reps", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--checkpoints")
        sp.add_argument("--outdir")
        sp.add_argument("--workers", type=int)
        sp.add_argument("--engine", choices=["auto", "compiled", "pure", "generic"])
        sp.add_argument("--svg", help="also draw this SVG under outdir")
        sp.add_argument("--logx", action="store_true")

    sp = sub.add_parser("simulate", help="per-replication regret trajectories")
    add_common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="worst-case expected regret over a grid")
    add_common(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("table1", help="ETC-vs-F-UCB relative terminal regret")
    add_common(sp)
    sp.add_argument("--ns", help="comma-separated horizons")
    sp.add_argument("--functionals", help="semicolon-separated functional specs")
    sp.set_defaults(func=cmd_table1)

    def add_data(sp):
        sp.add_argument("--functional", required=True)
        sp.add_argument("--data", required=True, help="CSV with header arm_id,outcome")
        sp.add_argument("--a", type=float, default=0.0)
        sp.add_argument("--b", type=float, default=1.0)

    sp = sub.add_parser("eval", help="plug-in functional value per arm")
    add_data(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("ci", help="finite-sample confidence interval per arm")
    add_data(sp)
    sp.add_argument("--alpha", type=float, default=0.05)
    sp.set_defaults(func=cmd_ci)

    sp = sub.add_parser("samplesize", help="exploration-length formulas")
    sp.add_argument("rule", choices=["etc-es", "etc-t"])
    sp.add_argument("--c", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--alpha", type=float, default=0.1)
    sp.add_argument("--eta", type=float, default=0.1)
    sp.set_defaults(func=cmd_samplesize)

    sp = sub.add_parser("bound", help="theoretical regret bounds")
    sp.add_argument("kind", choices=["fucb", "famoss", "hpb"])
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--c", type=float, required=True)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--deltas", help="comma-separated gaps (hpb)")
    sp.add_argument("--x", type=float, default=1.0)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("ingest", help="transform an outcome CSV into [0,1]")
    sp.add_argument("--input", required=True)
    sp.add_argument("--transform", required=True)
    sp.add_argument("--flip", action="store_true")
    sp.add_argument("--arms", help="comma-separated declared arm ids")
    sp.add_argument("--output", required=True)
    sp.set_defaults(func=cmd_ingest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4
    except FbanditError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

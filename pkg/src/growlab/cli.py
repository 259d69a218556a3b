"""Experiment orchestration: config parsing, named experiments, CSV/JSON artifacts.

One experiment per invocation, optionally across a grid of parameter
overrides; every run writes results/<experiment>/<config-hash>/ with the
resolved config, a summary JSON, and the experiment's CSV tables.  Exit
codes: 0 success, 1 validation/config error, 2 budget exhaustion (partial
results kept).
"""

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import acceptance as acceptance_mod
from .bounds import BoundParams, LTable, first_bound, lower_bound_check, \
    second_bound, frozen_recurrence_experiment, transience_report
from .errors import BudgetExceededError, ConfigError, GrowlabError
from .evoset import run_plain, run_size_biased
from .families import (
    expander_family,
    frozen_nested_family,
    growing_path_family,
    lattice_ball_family,
    two_vertex_frozen,
)
from .graph import validate_monotone
from .isoperimetry import analytic_profile, exact_profile, profile_provider
from .merging import merging_distances
from .walk import evolve_exact, evolve_exact_rational, simulate

EXPERIMENTS = ("validate", "evolve", "simulate", "evoset", "isoperimetry",
               "bounds", "merging", "lower-bound", "frozen-recurrence",
               "acceptance")

DEFAULT_BUDGETS = {"state_cap": 500_000, "step_cap": 10_000_000,
                   "replicate_cap": 1_000_000}

FAMILY_KEYS = {
    "lattice_ball": {"d", "beta", "a", "gamma", "horizon"},
    "frozen_nested": {"d", "radii", "envelope_radii", "stage_times", "gamma"},
    "expander": {"n0", "growth", "horizon", "gamma"},
    "growing_path": {"sizes", "change_times", "loops", "horizon"},
    "two_vertex": {"horizon"},
}

EXPERIMENT_KEYS = {
    "validate": {"horizon"},
    "evolve": {"x0", "T", "record_every"},
    "simulate": {"x0", "T", "n_replicates", "record_times", "return_checkpoints"},
    "evoset": {"x0", "T", "n_replicates", "alpha", "s_anchor"},
    "isoperimetry": {"times", "cap"},
    "bounds": {"x0", "y", "t_grid", "alpha", "horizon"},
    "merging": {"N", "theta", "eta", "t_max", "delta"},
    "lower-bound": {"x0", "t_grid", "delta0", "psi_power"},
    "frozen-recurrence": {"n_replicates", "max_stage"},
    "acceptance": {"criteria"},
}


def _hash_config(cfg):
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _validate_keys(block, allowed, where):
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}; "
                          f"allowed: {sorted(allowed)}")


def build_family(block, budgets):
    """Family block -> GrowingGraphSequence."""
    block = dict(block)
    name = block.pop("family", None)
    if name not in FAMILY_KEYS:
        raise ConfigError(f"family must be one of {sorted(FAMILY_KEYS)}, got {name!r}")
    _validate_keys(block, FAMILY_KEYS[name], f"family block {name!r}")
    cap = budgets["state_cap"]
    try:
        if name == "lattice_ball":
            return lattice_ball_family(
                block.get("d", 2), block.get("beta", 1.0), block.get("a", 1.0),
                block.get("gamma", 0.5), block.get("horizon", 100), state_cap=cap)
        if name == "frozen_nested":
            return frozen_nested_family(
                block["d"], block["radii"], block["envelope_radii"],
                block["stage_times"], block.get("gamma", 0.5), state_cap=cap)
        if name == "expander":
            return expander_family(block.get("n0", 4), block.get("growth", 1),
                                   block.get("horizon", 100), block.get("gamma", 0.5))
        if name == "growing_path":
            return growing_path_family(
                tuple(block.get("sizes", (4, 6, 8))),
                tuple(block.get("change_times", (0, 4, 8))),
                block.get("loops", 1), block.get("horizon", 20))
        return two_vertex_frozen(block.get("horizon", 1000))
    except KeyError as e:
        raise ConfigError(f"family {name!r} is missing required key {e}") from None


def _fmt(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return repr(x)
    return x


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(c) for c in row])


# ---------------------------------------------------------------------------
# Experiment runners: each returns (summary_dict, {csv_name: (header, rows)})


def run_validate(cfg):
    seq = build_family(cfg["family"], cfg["budgets"])
    horizon = cfg["params"].get("horizon", seq.horizon)
    rep = validate_monotone(seq, horizon)
    summary = {"ok": rep.ok, "first_violation": rep.first_violation,
               "laziness_floor": rep.laziness_floor, "max_degree": rep.max_degree,
               "declared_gamma": None if seq.gamma is None else float(seq.gamma)}
    rows = [(horizon, rep.ok, rep.laziness_floor, rep.max_degree)]
    return summary, {"validation.csv": (("horizon", "ok", "laziness_floor",
                                         "max_degree"), rows)}


def run_evolve(cfg):
    seq = build_family(cfg["family"], cfg["budgets"])
    p = cfg["params"]
    x0, T = p.get("x0", 0), p.get("T", 50)
    every = p.get("record_every", max(1, T // 100))
    times = sorted(set(range(0, T + 1, every)) | {T})
    rows = []
    if cfg.get("exact_arithmetic"):
        dists = evolve_exact_rational(seq, x0, T)
        for t in times:
            for y, pr in sorted(dists[t].items()):
                rows.append((t, y, pr))
        renorm = []
    else:
        res = evolve_exact(seq, x0, T, record_times=times,
                           state_cap=cfg["budgets"]["state_cap"])
        for t in times:
            for y, pr in sorted(res.distributions[t].as_dict().items()):
                rows.append((t, y, pr))
        renorm = res.renormalizations
    summary = {"x0": x0, "T": T, "n_renormalizations": len(renorm),
               "renormalizations": renorm[:20]}
    return summary, {"distributions.csv": (("t", "y_id", "prob"), rows)}


def run_simulate(cfg):
    seq = build_family(cfg["family"], cfg["budgets"])
    p = cfg["params"]
    x0, T = p.get("x0", 0), p.get("T", 50)
    n = min(p.get("n_replicates", 10 ** 4), cfg["budgets"]["replicate_cap"])
    times = p.get("record_times") or sorted({T // 4, T // 2, T})
    checkpoints = p.get("return_checkpoints") or []
    res = simulate(seq, x0, T, n, cfg["seed"], record_times=times,
                   visit_checkpoints=checkpoints,
                   step_budget=cfg["budgets"]["step_cap"],
                   state_cap=cfg["budgets"]["state_cap"])
    rows = []
    for t in sorted(res.marginal_counts):
        snap, freq = res.marginal(t)
        for i, y in enumerate(snap.vertex_ids):
            if freq[i] > 0:
                rows.append((t, y, float(freq[i])))
    tables = {"marginals.csv": (("t", "y_id", "est_prob"), rows)}
    if checkpoints:
        ret_rows = [(k, st["e_n0"], st["e_n0_sq"], st["pz_ratio"])
                    for k, st in sorted(res.visit_stats.items())]
        tables["returns.csv"] = (("k", "E_N0", "E_N0_sq", "pz_ratio"), ret_rows)
    summary = {"x0": x0, "T": T, "n_replicates": n, "record_times": list(times)}
    return summary, {**tables}


def run_evoset(cfg):
    seq = build_family(cfg["family"], cfg["budgets"])
    p = cfg["params"]
    x0, T = p.get("x0", 0), p.get("T", 10)
    n = min(p.get("n_replicates", 10 ** 4), cfg["budgets"]["replicate_cap"])
    alpha = p.get("alpha", 0.5)
    plain = run_plain(seq, x0, T, n, cfg["seed"])
    biased = run_size_biased(seq, x0, T, n, cfg["seed"] + 1, alpha=alpha,
                             s_anchor=p.get("s_anchor"))
    member_rows = []
    for t in range(T + 1):
        snap = plain.snapshots[t]
        for y in snap.vertex_ids:
            est, se = plain.membership(t, y)
            if est > 0:
                member_rows.append((t, y, est, se))
    weight_rows = [(t, *plain.weight_mean[t]) for t in range(T + 1)]
    l_rows = [(u, *biased.L[u]) for u in sorted(biased.L)]
    summary = {"x0": x0, "T": T, "n_replicates": n, "alpha": alpha,
               "s_anchor": biased.s_anchor, "start_weight": plain.start_weight}
    return summary, {
        "membership.csv": (("t", "y_id", "est_membership_prob", "std_err"), member_rows),
        "weights.csv": (("t", "mean_weight", "std_err"), weight_rows),
        "lcurve.csv": (("u", "L_u_est", "std_err"), l_rows),
    }


def run_isoperimetry(cfg):
    seq = build_family(cfg["family"], cfg["budgets"])
    p = cfg["params"]
    times = p.get("times", [0, 1, 2, 4, 8])
    cap = p.get("cap", 20)
    prof_rows, cheeger_rows = [], []
    for t in times:
        snap = seq.snapshot_at(t)
        if snap.n_vertices <= cap:
            prof = exact_profile(snap, cap=cap)
            if prof.breakpoints:
                for w, f in prof.breakpoints:
                    prof_rows.append((t, w, f, prof.source))
                cheeger_rows.append((t, prof.cheeger))
            else:
                prof_rows.append((t, "NA", "NA", prof.source))
                cheeger_rows.append((t, "NA"))
        else:
            prof = analytic_profile(seq, t)
            r = 1
            while r < prof.vhalf:
                prof_rows.append((t, r, prof.phi(r), prof.source))
                r *= 2
            prof_rows.append((t, prof.vhalf, prof.cheeger, prof.source))
            cheeger_rows.append((t, prof.cheeger))
    return ({"times": list(times), "cap": cap},
            {"profile.csv": (("t", "r", "phi", "source"), prof_rows),
             "cheeger.csv": (("t", "cheeger"), cheeger_rows)})


def run_bounds(cfg):
    seq = build_family(cfg["family"], cfg["budgets"])
    p = cfg["params"]
    x0 = p.get("x0", 0)
    horizon = p.get("horizon", min(seq.horizon, 100))
    t_grid = p.get("t_grid") or list(range(2, horizon + 1))
    y = p.get("y", x0)
    params = BoundParams(alpha=p.get("alpha", 0.5),
                         gamma=float(seq.gamma) if seq.gamma else 0.5,
                         delta_cap=seq.delta_cap)
    prov = profile_provider(seq)
    cheeger_of = lambda u: prov(u).cheeger
    exact = None
    try:
        exact = evolve_exact(seq, x0, max(t_grid), record_times=t_grid,
                             state_cap=cfg["budgets"]["state_cap"])
    except BudgetExceededError:
        pass
    table = LTable(prov, params, seq.snapshot_at(0).degree[x0], max(t_grid))
    rows = []
    for t in t_grid:
        fb, s_star = first_bound(seq, x0, y, t, params, prov, l_table=table)
        sb = second_bound(seq, x0, t, params, cheeger_of)
        if exact is not None:
            ex = exact.distributions[t].prob(y)
            rows.append((t, fb, s_star, sb, ex, min(fb, sb) - ex))
        else:
            rows.append((t, fb, s_star, sb, "NA", "NA"))
    trep = transience_report(seq, horizon, cheeger_of=cheeger_of)
    sums = []
    acc_v, acc_m = 0.0, 0.0
    csq = [min(cheeger_of(u), 1.0) ** 2 for u in range(horizon)]
    cum = [0.0]
    for c in csq:
        cum.append(cum[-1] + c)
    for t in range(1, horizon + 1):
        acc_v += 1.0 / seq.volume_at(t)
        acc_m += math.exp(-(cum[t] - cum[t // 2]))
        sums.append((t, acc_v, acc_m))
    summary = {"x0": x0, "y": y, "alpha": params.alpha,
               "inverse_volume_flag": trep.inverse_volume.flag,
               "mixing_flag": trep.mixing.flag,
               "transient_consistent": trep.transient_consistent}
    return summary, {
        "bounds.csv": (("t", "first_bound", "argmin_s", "second_bound",
                        "exact_prob", "margin"), rows),
        "sums.csv": (("t", "sum_inv_vol", "sum_mixing_term"), sums),
    }


def run_merging(cfg):
    p = cfg["params"]
    N = p.get("N", 16)
    theta, eta = p.get("theta", 0.05), p.get("eta", 0.05)
    t_max = min(p.get("t_max", 10 ** 6), cfg["budgets"]["step_cap"])
    delta = p.get("delta", 0.5)
    rep = merging_distances(N, theta, eta, t_max, delta=delta)
    rows = list(zip(rep.record_times, rep.tv, rep.relsup))
    summary = {"N": N, "theta": theta, "eta": eta, "eps": rep.certificate["eps"],
               "T_tv": rep.t_tv, "T_sup": rep.t_sup,
               "budget_exhausted": rep.budget_exhausted,
               "final_tv": rep.final_tv, "final_relsup": rep.final_relsup,
               "max_mass_drift": rep.max_mass_drift}
    return summary, {"tv.csv": (("t", "tv", "relsup"), rows)}


def run_lower_bound(cfg):
    seq = build_family(cfg["family"], cfg["budgets"])
    p = cfg["params"]
    x0 = p.get("x0", 0)
    t_grid = p.get("t_grid") or list(range(100, 501, 50))
    delta0 = p.get("delta0", 0.5)
    power = p.get("psi_power", 2.0)
    radius = seq.meta.get("radius")
    if radius is None:
        raise ConfigError("lower-bound needs a family with a radius schedule")
    prov = profile_provider(seq)
    rep = lower_bound_check(seq, x0, lambda m: m ** power, radius, delta0, t_grid,
                            cheeger_of=lambda u: prov(u).cheeger,
                            state_cap=cfg["budgets"]["state_cap"])
    rows = []
    running = None
    for r in rep.rows:
        if r.min_v_times_p is not None:
            running = r.min_v_times_p if running is None else min(running, r.min_v_times_p)
        rows.append((r.t, r.window_radius, r.n_admissible,
                     "NA" if r.min_v_times_p is None else r.min_v_times_p,
                     "NA" if running is None else running,
                     r.ball_deficit))
    summary = {"c_hat": rep.c_hat, "stability_ratio": rep.stability_ratio,
               "empty_windows": rep.empty_windows,
               "zeta": [(t, z) for t, z in rep.zeta]}
    return summary, {"lower_bound.csv": (("t", "window_radius", "n_admissible",
                                          "min_v_times_P", "c_hat",
                                          "ball_deficit"), rows)}


def run_frozen_recurrence(cfg):
    seq = build_family(cfg["family"], cfg["budgets"])
    if seq.meta.get("family") != "frozen_nested":
        raise ConfigError("frozen-recurrence needs a frozen_nested family")
    p = cfg["params"]
    rep = frozen_recurrence_experiment(seq, p.get("n_replicates", 200),
                                       cfg["seed"], max_stage=p.get("max_stage"))
    rows = [(r.l, r.t_start, r.t_end, r.volume, r.floor, r.local_time_mean,
             r.local_time_se, r.fitted_const, s)
            for r, s in zip(rep.stages, rep.partial_sums)]
    summary = {"rank_correlation": rep.rank_correlation,
               "partial_sum": rep.partial_sums[-1] if rep.partial_sums else 0.0}
    return summary, {"stages.csv": (("l", "t_start", "t_end", "volume", "floor",
                                     "local_time_mean", "local_time_se",
                                     "fitted_const", "partial_sum"), rows)}


def run_acceptance(cfg):
    ids = cfg["params"].get("criteria")
    results = acceptance_mod.run_all(ids=set(ids) if ids else None)
    rows = [(r.cid, r.passed, round(r.runtime_s, 2), r.title) for r in results]
    summary = {
        "all_passed": all(r.passed for r in results),
        "results": [{"cid": r.cid, "title": r.title, "passed": r.passed,
                     "runtime_s": round(r.runtime_s, 2), "details": _jsonable(r.details)}
                    for r in results],
    }
    return summary, {"acceptance.csv": (("criterion", "passed", "runtime_s",
                                         "title"), rows)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float) and not (obj == obj and abs(obj) != float("inf")):
        return repr(obj)
    if hasattr(obj, "item"):
        return obj.item()
    return obj


RUNNERS = {
    "validate": run_validate, "evolve": run_evolve, "simulate": run_simulate,
    "evoset": run_evoset, "isoperimetry": run_isoperimetry, "bounds": run_bounds,
    "merging": run_merging, "lower-bound": run_lower_bound,
    "frozen-recurrence": run_frozen_recurrence, "acceptance": run_acceptance,
}


def _run_point(args):
    """Worker entry for one grid point: returns (index, summary, tables, error)."""
    idx, cfg = args
    try:
        summary, tables = RUNNERS[cfg["experiment"]](cfg)
        return idx, summary, tables, None
    except BudgetExceededError as e:
        return idx, {"error": str(e)}, {}, "budget"
    except (GrowlabError, ValueError, KeyError) as e:
        return idx, {"error": f"{type(e).__name__}: {e}"}, {}, "validation"


# ---------------------------------------------------------------------------
# Config assembly


def resolve_config(experiment, file_cfg, flag_params, seed, out, exact_arithmetic):
    cfg = {
        "experiment": experiment,
        "family": None,
        "params": {},
        "budgets": dict(DEFAULT_BUDGETS),
        "seed": 0,
        "out": "results",
        "exact_arithmetic": False,
        "grid": [{}],
        "workers": 1,
    }
    if file_cfg:
        # experiment params may sit at the top level (e.g. {"experiment":
        # "merging", "N": 8}); anything else unknown is rejected.
        unknown = set(file_cfg) - set(cfg) - EXPERIMENT_KEYS[experiment]
        if unknown:
            raise ConfigError(f"unknown top-level config key(s) {sorted(unknown)}")
        for k, v in file_cfg.items():
            if k == "budgets":
                _validate_keys(v, set(DEFAULT_BUDGETS), "budgets")
                cfg["budgets"].update(v)
            elif k == "params":
                cfg["params"].update(v)
            elif k in EXPERIMENT_KEYS[experiment]:
                cfg["params"][k] = v
            else:
                cfg[k] = v
    if cfg["experiment"] != experiment:
        raise ConfigError(f"config file names experiment {cfg['experiment']!r} "
                          f"but the command line says {experiment!r}")
    cfg["params"].update({k: v for k, v in flag_params.items() if v is not None})
    _validate_keys(cfg["params"], EXPERIMENT_KEYS[experiment],
                   f"params for {experiment!r}")
    if seed is not None:
        cfg["seed"] = seed
    if out is not None:
        cfg["out"] = out
    if exact_arithmetic:
        cfg["exact_arithmetic"] = True
    return cfg


def main(argv=None):
    ap = argparse.ArgumentParser(prog="growlab",
                                 description="random-walk-on-growing-graphs lab")
    sub = ap.add_subparsers(dest="experiment", required=True)
    parsers = {}
    for name in EXPERIMENTS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--workers", type=int, default=None)
        sp.add_argument("--exact-arithmetic", action="store_true")
        parsers[name] = sp
    for name in ("validate", "evolve", "simulate", "evoset", "isoperimetry",
                 "bounds", "lower-bound", "frozen-recurrence"):
        sp = parsers[name]
        sp.add_argument("--family", type=str, default=None)
        sp.add_argument("--d", type=int, default=None)
        sp.add_argument("--beta", type=float, default=None)
        sp.add_argument("--a", type=float, default=None)
        sp.add_argument("--gamma", type=float, default=None)
        sp.add_argument("--family-horizon", type=int, default=None,
                        dest="family_horizon")
    for name in ("evolve", "simulate", "evoset", "bounds", "lower-bound"):
        parsers[name].add_argument("--x0", type=int, default=None)
    for name in ("evolve", "simulate", "evoset"):
        parsers[name].add_argument("--T", type=int, default=None)
    for name in ("simulate", "evoset", "frozen-recurrence"):
        parsers[name].add_argument("--n-replicates", type=int, default=None,
                                   dest="n_replicates")
    parsers["validate"].add_argument("--horizon", type=int, default=None)
    parsers["bounds"].add_argument("--horizon", type=int, default=None)
    parsers["bounds"].add_argument("--alpha", type=float, default=None)
    parsers["evoset"].add_argument("--alpha", type=float, default=None)
    parsers["merging"].add_argument("--N", type=int, default=None)
    parsers["merging"].add_argument("--theta", type=float, default=None)
    parsers["merging"].add_argument("--eta", type=float, default=None)
    parsers["merging"].add_argument("--t-max", type=int, default=None, dest="t_max")
    parsers["merging"].add_argument("--delta", type=float, default=None)
    parsers["lower-bound"].add_argument("--delta0", type=float, default=None)
    parsers["lower-bound"].add_argument("--psi-power", type=float, default=None,
                                        dest="psi_power")
    args = ap.parse_args(argv)

    family_keys = ("family", "d", "beta", "a", "gamma", "family_horizon")
    flag_params = {k: v for k, v in vars(args).items()
                   if k not in ("experiment", "config", "seed", "out", "workers",
                                "exact_arithmetic") + family_keys}
    flag_family = None
    if getattr(args, "family", None):
        flag_family = {"family": args.family}
        for src, dst in (("d", "d"), ("beta", "beta"), ("a", "a"),
                         ("gamma", "gamma"), ("family_horizon", "horizon")):
            v = getattr(args, src, None)
            if v is not None:
                flag_family[dst] = v
    try:
        file_cfg = None
        if args.config:
            try:
                file_cfg = json.loads(args.config.read_text())
            except json.JSONDecodeError as e:
                raise ConfigError(f"config is not valid JSON: line {e.lineno} "
                                  f"column {e.colno}: {e.msg}") from None
        cfg = resolve_config(args.experiment, file_cfg, flag_params, args.seed,
                             args.out, args.exact_arithmetic)
        if flag_family:
            cfg["family"] = flag_family
        if args.workers:
            cfg["workers"] = args.workers
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1

    return run_experiment(cfg)


def run_experiment(cfg):
    """Execute one (possibly grid-expanded) experiment; returns the exit code."""
    t0 = time.time()
    chash = _hash_config({k: v for k, v in cfg.items() if k != "out"})
    outdir = Path(cfg["out"]) / cfg["experiment"] / chash
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "resolved_config.json").write_text(
        json.dumps(_jsonable(cfg), indent=2, sort_keys=True))
    points = []
    for i, overrides in enumerate(cfg.get("grid") or [{}]):
        pt = json.loads(json.dumps(_jsonable(cfg)))
        pt["params"].update(overrides)
        points.append((i, pt))
    exit_code = 0
    results = []
    workers = cfg.get("workers", 1)
    if workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_point, points))
    else:
        results = [_run_point(p) for p in points]
    summaries = []
    rows_written = 0
    for idx, summary, tables, error in sorted(results):
        prefix = "" if len(points) == 1 else f"point{idx:03d}_"
        for name, (header, rows) in tables.items():
            _write_csv(outdir / (prefix + name), header, rows)
            rows_written += len(rows)
        summaries.append(summary)
        if error == "budget":
            exit_code = max(exit_code, 2)
        elif error == "validation":
            exit_code = max(exit_code, 1)
    top = {
        "experiment": cfg["experiment"],
        "config_hash": chash,
        "seed": cfg["seed"],
        "budgets": cfg["budgets"],
        "rows_written": rows_written,
        "wall_clock_s": round(time.time() - t0, 3),
        "n_grid_points": len(points),
        "summaries": summaries if len(points) > 1 else summaries[0],
    }
    (outdir / "summary.json").write_text(json.dumps(_jsonable(top), indent=2,
                                                    sort_keys=True))
    print(f"wrote {outdir}")
    if cfg["experiment"] == "acceptance" and exit_code == 0:
        first = summaries[0]
        if isinstance(first, dict) and not first.get("all_passed", False):
            exit_code = 1
    return exit_code


if __name__ == "__main__":
    sys.exit(main())

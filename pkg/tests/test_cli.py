import json
import subprocess
import sys

from growlab.cli import main


def run_cli(args, cwd):
    return main(args + ["--out", str(cwd / "results")])


def read_only_dir(base, experiment):
    runs = list((base / "results" / experiment).iterdir())
    assert len(runs) == 1
    return runs[0]


def test_merging_minimal_config(tmp_path):
    cfg = tmp_path / "min.json"
    cfg.write_text(json.dumps({"experiment": "merging", "N": 8}))
    assert run_cli(["merging", "--config", str(cfg)], tmp_path) == 0
    out = read_only_dir(tmp_path, "merging")
    assert (out / "tv.csv").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["summaries"]["N"] == 8
    assert set(summary["summaries"]) >= {"N", "theta", "eta", "eps", "T_tv",
                                         "T_sup", "budget_exhausted"}


def test_merging_flags_match_spec_invocation(tmp_path):
    code = run_cli(["merging", "--N", "16", "--theta", "0.05", "--eta", "0.05",
                    "--t-max", "5000", "--delta", "0.5"], tmp_path)
    assert code == 0
    out = read_only_dir(tmp_path, "merging")
    header = (out / "tv.csv").read_text().splitlines()[0]
    assert header == "t,tv,relsup"


def test_malformed_json_exits_one(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{nope")
    assert run_cli(["merging", "--config", str(cfg)], tmp_path) == 1


def test_unknown_key_rejected(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"experiment": "merging", "N": 8, "bogus": 1}))
    assert run_cli(["merging", "--config", str(cfg)], tmp_path) == 1


def test_budget_exhaustion_exit_code(tmp_path):
    cfg = tmp_path / "big.json"
    cfg.write_text(json.dumps({
        "experiment": "validate",
        "family": {"family": "lattice_ball", "d": 3, "beta": 3.0, "horizon": 10000},
        "budgets": {"state_cap": 1000},
    }))
    assert run_cli(["validate", "--config", str(cfg)], tmp_path) == 2


def test_validate_via_flags(tmp_path):
    code = run_cli(["validate", "--family", "lattice_ball", "--d", "2",
                    "--beta", "1.0", "--family-horizon", "20",
                    "--horizon", "20"], tmp_path)
    assert code == 0
    out = read_only_dir(tmp_path, "validate")
    summary = json.loads((out / "summary.json").read_text())
    assert summary["summaries"]["ok"] is True
    assert summary["summaries"]["laziness_floor"] == 0.5


def test_exact_arithmetic_evolution_deterministic(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "experiment": "evolve",
        "family": {"family": "two_vertex"},
        "params": {"x0": 0, "T": 6},
    }))
    blobs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        code = main(["evolve", "--config", str(cfg), "--exact-arithmetic",
                     "--out", str(out)])
        assert code == 0
        run_dir = next((out / "evolve").iterdir())
        blobs.append((run_dir / "distributions.csv").read_bytes())
    assert blobs[0] == blobs[1]
    assert b"1/2" in blobs[0]  # exact rationals serialized


def test_float_reruns_are_byte_identical(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "experiment": "simulate",
        "family": {"family": "growing_path"},
        "params": {"x0": 0, "T": 8, "n_replicates": 2000},
        "seed": 7,
    }))
    blobs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
        run_dir = next((out / "simulate").iterdir())
        blobs.append((run_dir / "marginals.csv").read_bytes())
    assert blobs[0] == blobs[1]


def test_config_hash_tracks_params(tmp_path):
    for n in (8, 10):
        cfg = tmp_path / f"c{n}.json"
        cfg.write_text(json.dumps({"experiment": "merging", "N": n, "t_max": 500}))
        assert run_cli(["merging", "--config", str(cfg)], tmp_path) == 0
    runs = list((tmp_path / "results" / "merging").iterdir())
    assert len(runs) == 2  # different configs, different hashes


def test_evoset_emits_spec_columns(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "experiment": "evoset",
        "family": {"family": "two_vertex"},
        "params": {"T": 5, "n_replicates": 1000},
    }))
    assert run_cli(["evoset", "--config", str(cfg)], tmp_path) == 0
    out = read_only_dir(tmp_path, "evoset")
    assert (out / "membership.csv").read_text().splitlines()[0] == \
        "t,y_id,est_membership_prob,std_err"
    assert (out / "weights.csv").read_text().splitlines()[0] == \
        "t,mean_weight,std_err"
    assert (out / "lcurve.csv").read_text().splitlines()[0] == "u,L_u_est,std_err"


def test_bounds_experiment_emits_margins(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "experiment": "bounds",
        "family": {"family": "two_vertex"},
        "params": {"x0": 0, "horizon": 20},
    }))
    assert run_cli(["bounds", "--config", str(cfg)], tmp_path) == 0
    out = read_only_dir(tmp_path, "bounds")
    lines = (out / "bounds.csv").read_text().splitlines()
    assert lines[0] == "t,first_bound,argmin_s,second_bound,exact_prob,margin"
    # soundness visible in the emitted margins
    for row in lines[1:]:
        assert float(row.split(",")[-1]) >= 0
    assert (out / "sums.csv").read_text().splitlines()[0] == \
        "t,sum_inv_vol,sum_mixing_term"


def test_grid_points_run_and_collect(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "experiment": "merging",
        "params": {"t_max": 300},
        "grid": [{"N": 8}, {"N": 12}],
    }))
    assert run_cli(["merging", "--config", str(cfg)], tmp_path) == 0
    out = read_only_dir(tmp_path, "merging")
    assert (out / "point000_tv.csv").exists()
    assert (out / "point001_tv.csv").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert [s["N"] for s in summary["summaries"]] == [8, 12]


def test_isoperimetry_experiment_exact_and_analytic(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "experiment": "isoperimetry",
        "family": {"family": "lattice_ball", "d": 2, "beta": 1.0, "horizon": 30},
        "params": {"times": [0, 4, 26]},   # radii 0, 2, 6: NA, exact, analytic
    }))
    assert run_cli(["isoperimetry", "--config", str(cfg)], tmp_path) == 0
    out = read_only_dir(tmp_path, "isoperimetry")
    rows = (out / "profile.csv").read_text().splitlines()
    assert rows[0] == "t,r,phi,source"
    sources = {r.split(",")[-1] for r in rows[1:]}
    assert sources == {"exact", "analytic-lower-bound"}
    # no float infinities serialized; the empty profile is marked NA
    body = "\n".join(rows[1:])
    assert "inf" not in body
    assert any(r.startswith("0,NA") for r in rows[1:])


def test_lower_bound_experiment(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "experiment": "lower-bound",
        "family": {"family": "lattice_ball", "d": 2, "beta": 1.0, "horizon": 80},
        "params": {"x0": 0, "t_grid": [20, 40, 60], "delta0": 0.5},
    }))
    assert run_cli(["lower-bound", "--config", str(cfg)], tmp_path) == 0
    out = read_only_dir(tmp_path, "lower-bound")
    rows = (out / "lower_bound.csv").read_text().splitlines()
    assert rows[0] == "t,window_radius,n_admissible,min_v_times_P,c_hat,ball_deficit"
    summary = json.loads((out / "summary.json").read_text())
    assert summary["summaries"]["c_hat"] > 0


def test_frozen_recurrence_experiment_cli(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "experiment": "frozen-recurrence",
        "family": {"family": "frozen_nested", "d": 2, "radii": [1, 2, 4],
                   "envelope_radii": [1, 3, 6], "stage_times": [0, 40, 120]},
        "params": {"n_replicates": 100},
        "seed": 2,
    }))
    assert run_cli(["frozen-recurrence", "--config", str(cfg)], tmp_path) == 0
    out = read_only_dir(tmp_path, "frozen-recurrence")
    rows = (out / "stages.csv").read_text().splitlines()
    assert rows[0].startswith("l,t_start,t_end,volume,floor,local_time_mean")
    assert len(rows) == 4


def test_simulate_return_checkpoints(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "experiment": "simulate",
        "family": {"family": "two_vertex"},
        "params": {"x0": 0, "T": 20, "n_replicates": 2000,
                   "return_checkpoints": [10, 20]},
    }))
    assert run_cli(["simulate", "--config", str(cfg)], tmp_path) == 0
    out = read_only_dir(tmp_path, "simulate")
    rows = (out / "returns.csv").read_text().splitlines()
    assert rows[0] == "k,E_N0,E_N0_sq,pz_ratio"
    assert len(rows) == 3


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "growlab.cli", "merging", "--N", "8",
         "--t-max", "200", "--out", str(tmp_path / "r")],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "wrote" in proc.stdout

from __future__ import annotations

import pytest

from greenmig.cli import main
from greenmig.feasibility import FeasibilityClass, classify, gbps_to_bits, \
    gib_to_bytes, transfer_time

SMALL = ["--sites", "3", "--job-count", "20", "--horizon-s", "172800"]


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# --- feasibility command ---------------------------------------------------


def test_feasibility_feasible_exits_zero(capsys):
    code, out, _ = _run(capsys, "feasibility", "--size-gib", "40",
                        "--bandwidth-gbps", "10", "--window-s", "9000")
    assert code == 0
    assert "class: A" in out
    assert "transfer_s: 34.36" in out
    assert "feasible: true" in out


def test_feasibility_infeasible_exits_two(capsys):
    code, out, _ = _run(capsys, "feasibility", "--size-gib", "40",
                        "--bandwidth-gbps", "10", "--window-s", "0")
    assert code == 2
    assert "time_ok: false" in out
    assert "feasible: false" in out


def test_feasibility_class_c_infeasible(capsys):
    code, out, _ = _run(capsys, "feasibility", "--size-gib", "40",
                        "--bandwidth-gbps", "1", "--window-s", "9000")
    assert code == 2
    assert "class: C" in out


def test_feasibility_param_overrides(capsys):
    code, out, _ = _run(capsys, "feasibility", "--size-gib", "40",
                        "--bandwidth-gbps", "10", "--window-s", "9000",
                        "--alpha", "0.001")
    assert code == 2
    assert "time_ok: false" in out


def test_usage_errors_exit_one(capsys):
    code, _, err = _run(capsys, "feasibility", "--size-gib", "40")
    assert code == 1
    assert "bandwidth-gbps" in err
    code, _, _ = _run(capsys, "no-such-command")
    assert code == 1
    code, _, err = _run(capsys, "phase-grid", "--sizes-gib", "a,b")
    assert code == 1
    assert "comma-separated" in err


# --- grid and curve ----------------------------------------------------------


def test_phase_grid_classes_recompute_exactly(capsys):
    code, out, _ = _run(capsys, "phase-grid")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "size_gib,bandwidth_gbps,transfer_s,class"
    assert len(lines) == 1 + 9 * 9
    for line in lines[1:]:
        size, gbps, _, klass = line.split(",")
        want = classify(transfer_time(gib_to_bytes(float(size)),
                                      gbps_to_bits(float(gbps))))
        assert klass == want.value


def test_phase_grid_explicit_axes(capsys):
    code, out, _ = _run(capsys, "phase-grid", "--sizes-gib", "1,16,40,100",
                        "--bandwidths-gbps", "0.1,1,10,100")
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) == 17
    assert lines[1] == "1,0.1,85.9,B"
    assert lines[11] == "40,10,34.36,A"


def test_breakeven_output(capsys):
    code, out, _ = _run(capsys, "breakeven", "--sizes-gib", "40",
                        "--bandwidth-gbps", "10")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "size_gib,cost_kwh,breakeven_s"
    assert lines[1] == "40,0.01718,82.46"


def test_output_flag_writes_file(tmp_path, capsys):
    target = tmp_path / "grid.csv"
    code, out, err = _run(capsys, "phase-grid", "--sizes-gib", "1",
                          "--bandwidths-gbps", "10", "-o", str(target))
    assert code == 0
    assert out == ""
    assert str(target) in err
    assert target.read_text().startswith("size_gib,bandwidth_gbps")


# --- trace generation -----------------------------------------------------------


def test_gen_trace_deterministic(capsys):
    _, a, _ = _run(capsys, "gen-trace", "--seed", "3", "--sites", "2")
    _, b, _ = _run(capsys, "gen-trace", "--seed", "3", "--sites", "2")
    _, c, _ = _run(capsys, "gen-trace", "--seed", "4", "--sites", "2")
    assert a == b
    assert a != c
    assert a.startswith("site_id,start_s,duration_s\n")


def test_gen_trace_shorter_horizon_truncates(capsys):
    _, day, _ = _run(capsys, "gen-trace", "--seed", "3", "--days", "1")
    for line in day.strip().split("\n")[1:]:
        assert float(line.split(",")[1]) < 86400.0


# --- simulation commands ----------------------------------------------------------


def test_simulate_static(capsys):
    code, out, _ = _run(capsys, "simulate", "--policy", "static", *SMALL)
    assert code == 0
    assert out.startswith("policy: static\n")
    assert "migrations.attempted: 0" in out


def test_simulate_repeats_byte_identical(capsys):
    args = ["simulate", "--policy", "feasibility", *SMALL]
    _, a, _ = _run(capsys, *args)
    _, b, _ = _run(capsys, *args)
    assert a == b


def test_simulate_seed_changes_output(capsys):
    _, a, _ = _run(capsys, "simulate", "--policy", "static", *SMALL,
                   "--seed", "1")
    _, b, _ = _run(capsys, "simulate", "--policy", "static", *SMALL,
                   "--seed", "2")
    assert a != b


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "sim.cfg"
    cfg.write_text("sites = 3\njob_count = 20\nhorizon_s = 172800\nseed = 1\n")
    _, from_file, _ = _run(capsys, "simulate", "--policy", "static",
                           "--config", str(cfg))
    _, overridden, _ = _run(capsys, "simulate", "--policy", "static",
                            "--config", str(cfg), "--seed", "2")
    _, direct, _ = _run(capsys, "simulate", "--policy", "static", *SMALL,
                        "--seed", "1")
    assert from_file == direct
    assert overridden != from_file


def test_bad_config_file_exits_one(tmp_path, capsys):
    cfg = tmp_path / "sim.cfg"
    cfg.write_text("bogus_key = 1\n")
    code, _, err = _run(capsys, "simulate", "--policy", "static",
                        "--config", str(cfg))
    assert code == 1
    assert "line 1" in err


def test_simulate_with_injected_trace_and_jobs(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    trace.write_text("site_id,start_s,duration_s\n1,0,86400\n")
    jobs = tmp_path / "jobs.csv"
    jobs.write_text("job_id,arrival_s,checkpoint_gib,compute_s,site0\n"
                    "0,0,2.0,5000,0\n")
    code, out, _ = _run(capsys, "simulate", "--policy", "feasibility",
                        "--sites", "2", "--job-count", "1",
                        "--trace", str(trace), "--jobs", str(jobs))
    assert code == 0
    # the single grid job hops into the day-long window exactly once
    assert "migrations.completed: 1" in out
    assert "migrations.window_missed: 0" in out


def test_compare_table(capsys):
    code, out, _ = _run(capsys, "compare", *SMALL)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "policy,nonrenewable_ratio,jct_ratio,overhead"
    assert [line.split(",")[0] for line in lines[1:]] == [
        "static", "energy-only", "feasibility", "oracle"]


def test_validate_rows(capsys):
    code, out, _ = _run(capsys, "validate", "--sizes-gib", "1,280", *SMALL)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0].startswith("checkpoint_gib,")
    assert len(lines) == 3
    assert lines[1].split(",")[2] == FeasibilityClass.A.value
    assert lines[2].split(",")[2] == FeasibilityClass.B.value

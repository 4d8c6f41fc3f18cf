import json

import numpy as np
import pytest

from fairkc.data import load_dataset, make_synthetic, write_dataset
from fairkc.errors import InputError, LoadError
from fairkc.runner import RunConfig, RunReport, emit_plot_data, run


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_indicator(tmp_path):
    p = write(tmp_path, "x,y,g\n0,0,1\n1,0,1\n0,1,1\n1,1,1\n")
    pts, model = load_dataset(p, "g")
    assert (pts.count, pts.dim, model.n_groups, model.max_groups_per_point) == (4, 2, 1, 1)


def test_load_categorical(tmp_path):
    p = write(tmp_path, "x,c\n0,a\n1,b\n2,c\n3,a\n")
    _, model = load_dataset(p, "c")
    assert model.names == ("c=a", "c=b", "c=c")
    assert model.max_groups_per_point == 1
    assert model.group_sizes.tolist() == [2, 1, 1]


def test_two_categorical_columns_overlap(tmp_path):
    p = write(tmp_path, "x,marriage,education\n0,m,hs\n1,s,uni\n2,m,uni\n")
    _, model = load_dataset(p, "marriage,education")
    assert model.max_groups_per_point == 2
    assert model.group_sizes.sum() > model.n_points


def test_forced_kinds(tmp_path):
    p = write(tmp_path, "x,g\n0,0\n1,1\n")
    _, model = load_dataset(p, "g:cat")
    assert model.names == ("g=0", "g=1")
    with pytest.raises(LoadError):
        load_dataset(write(tmp_path, "x,g\n0,2\n1,1\n", "e.csv"), "g:bin")


@pytest.mark.parametrize("text,cols", [
    ("x,g\n0,0\n1,1\n", "g"),            # first point in no group
    ("x,g\nfoo,1\n1,1\n", "g"),          # non-numeric feature
    ("x,g\n0,1\n1\n", "g"),              # ragged
    ("x,g\n", "g"),                      # no rows
    ("x,g\n0,1\n", "h"),                 # missing column
])
def test_load_errors(tmp_path, text, cols):
    with pytest.raises(LoadError):
        load_dataset(write(tmp_path, text), cols)


def test_minmax_opt_in(tmp_path):
    p = write(tmp_path, "x,y,g\n0,10,1\n5,20,1\n10,30,1\n")
    raw, _ = load_dataset(p, "g")
    scaled, _ = load_dataset(p, "g", minmax=True)
    assert raw.coords[:, 0].tolist() == [0, 5, 10]
    assert scaled.coords[:, 1].tolist() == [0, 0.5, 1]


def test_round_trip(tmp_path):
    pts, model = make_synthetic(50, n_groups=3, dim=3, overlap=0.3, seed=4)
    p = tmp_path / "s.csv"
    write_dataset(p, pts, model)
    pts2, model2 = load_dataset(p, ",".join(model.names))
    assert np.array_equal(pts.coords, pts2.coords)
    assert np.array_equal(model.membership, model2.membership)
    assert model.names == model2.names


def test_config_validation():
    with pytest.raises(InputError):
        RunConfig(k=2).validate()
    with pytest.raises(InputError):
        RunConfig(k=2, alpha=[0.5], delta=0.1).validate()
    with pytest.raises(InputError):
        RunConfig(k=2, delta=0.1, repeats=0).validate()
    with pytest.raises(InputError):
        RunConfig(k=2, beta=[0.1], delta=0.1).validate()


def synthetic():
    return make_synthetic(60, n_groups=2, seed=1, mixing=2.0)


def test_greedy_run():
    pts, model = synthetic()
    rep = run(RunConfig(k=3, alpha=[0.6], algorithm="greedy", repeats=2), data=(pts, model))
    assert rep.status == "ok"
    assert rep.cost == rep.greedy_cost
    assert rep.epsilon_violation["median"] == rep.epsilon_violation["max"]


def test_fair_run_cost_bounds():
    pts, model = synthetic()
    eps = 1e-3
    rep = run(RunConfig(k=3, delta=0.2, epsilon=eps, repeats=3, seed=5), data=(pts, model))
    assert rep.status == "ok"
    assert rep.greedy_cost / 2 <= rep.cost <= 3 * rep.greedy_cost + eps
    assert len(rep.repeats) == 3
    assert [r["seed"] for r in rep.repeats] == [5, 6, 7]
    assert rep.epsilon_violation["median_ceil"] >= 0
    assert sum(c["size"] for c in rep.clusters) == 60


def test_single_repeat_summary():
    pts, model = synthetic()
    rep = run(RunConfig(k=3, delta=0.2, repeats=1), data=(pts, model))
    ev = rep.epsilon_violation
    assert ev["median"] == ev["max"] == rep.repeats[0]["epsilon"]


def test_infeasible_run_is_na():
    pts, model = synthetic()
    rep = run(RunConfig(k=1, alpha=[0.1]), data=(pts, model))
    assert rep.status == "N/A"
    assert rep.cost is None


def test_time_limit_run():
    pts, model = synthetic()
    rep = run(RunConfig(k=3, delta=0.2, tle_seconds=0.0), data=(pts, model))
    assert rep.status == "TLE"
    assert rep.trace is not None


def test_report_json_round_trip_and_determinism():
    pts, model = synthetic()
    cfg = RunConfig(k=3, delta=0.1, repeats=2, trace=True)
    a = run(cfg, data=(pts, model))
    b = run(cfg, data=(pts, model))
    assert a.to_json(include_runtime=False) == b.to_json(include_runtime=False)
    again = RunReport.from_json(a.to_json())
    assert again.to_dict() == json.loads(a.to_json())
    assert json.loads(a.to_json())["schema_version"] == 1


def test_plot_data():
    pts, model = synthetic()
    reports = [run(RunConfig(k=k, delta=0.2, repeats=1), data=(pts, model)) for k in (5, 10, 15)]
    lines = emit_plot_data(reports, "k").splitlines()
    assert lines[0] == "k,metric,value"
    assert len(lines) == 1 + 9
    assert {l.split(",")[0] for l in lines[1:]} == {"5", "10", "15"}
    with pytest.raises(InputError):
        emit_plot_data([], "k")
    other = run(RunConfig(k=5, delta=0.2, repeats=1, dataset="other"), data=(pts, model))
    with pytest.raises(InputError):
        emit_plot_data(reports + [other], "k")


def test_delta_sweep_axes():
    pts, model = synthetic()
    reports = [run(RunConfig(k=3, delta=d, repeats=1), data=(pts, model)) for d in (0.1, 0.3)]
    rows = [l.split(",") for l in emit_plot_data(reports, "delta").splitlines()[1:]]
    assert {r[1] for r in rows} == {"cost", "runtime_seconds", "epsilon_median"}

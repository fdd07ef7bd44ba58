import csv
import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from impshap import (CoalitionContext, ExplanationConfig, ExplanationReport, build_report,
                     imprecise_shapley)
from impshap.cli import main
from impshap.report import report_schema


def _report():
    model = lambda x: [1 / (1 + np.exp(-x[0] + x[1])), 1 - 1 / (1 + np.exp(-x[0] + x[1]))]
    ctx = CoalitionContext(model, [1.0, -1.0], [0.0, 0.0])
    res = imprecise_shapley(ctx, ExplanationConfig(epsilon=0.1))
    return build_report(res, [1.0, -1.0], ["a", "b"],
                        {"mode": "distribution", "distance": "kolmogorov_smirnov",
                         "bound_method": "lp_ks", "seed": 0, "epsilon": 0.1},
                        {"explain_seconds": 0.01}, etas=(0.25,))


def test_report_round_trip_and_schema():
    rep = _report()
    back = ExplanationReport.from_json(rep.to_json())
    assert back == rep
    jsonschema.validate(rep.to_dict(), report_schema())
    assert set(rep.strategy) == {"0.0", "0.25", "0.5", "1.0"}


def test_report_rejects_unknown_version_and_bad_records():
    d = _report().to_dict()
    d["schema_version"] = 99
    with pytest.raises(ValueError):
        ExplanationReport.from_dict(d)
    d = _report().to_dict()
    d["features"][0]["reduced"] = [d["features"][0]["raw"][0] - 1, d["features"][0]["raw"][1]]
    with pytest.raises(ValueError):
        ExplanationReport.from_dict(d)


@pytest.fixture(scope="module")
def circle_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("circle")
    assert main(["generate", "--dataset", "circle", "--seed", "42", "--out", str(out)]) == 0
    return out


def _rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_generate_files(circle_dir, tmp_path):
    assert len(_rows(circle_dir / "train.csv")) == 1001
    assert len(_rows(circle_dir / "test.csv")) == 251
    assert main(["generate", "--dataset", "circle", "--seed", "42", "--out", str(tmp_path)]) == 0
    for name in ("train.csv", "test.csv"):
        assert (tmp_path / name).read_bytes() == (circle_dir / name).read_bytes()


def test_unknown_dataset_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["generate", "--dataset", "spiral", "--out", str(tmp_path)])
    assert info.value.code == 2


def _explain(circle_dir, out, *extra):
    return main(["explain", "--train", str(circle_dir / "train.csv"), "--label", "label",
                 "--trees", "30", "--seed", "42", "--out", str(out), *extra])


def test_explain_zero_epsilon_collapses(circle_dir, tmp_path):
    out = tmp_path / "r.json"
    assert _explain(circle_dir, out, "--point", "1.5,2.5", "--epsilon", "0") == 0
    rep = ExplanationReport.load(out)
    jsonschema.validate(json.loads(out.read_text()), report_schema())
    for f in rep.features:
        assert f.raw == (f.precise, f.precise)


def test_explain_circle_point_ranks_x_first(circle_dir, tmp_path):
    out = tmp_path / "r.json"
    assert _explain(circle_dir, out, "--point", "1.5,2.5", "--epsilon", "0.15", "--eta", "0.3") == 0
    rep = ExplanationReport.load(out)
    x, y = rep.features
    assert x.reduced[1] > y.reduced[1]
    assert rep.strategy["0.3"] == "x" and rep.config["eta"] == 0.3


def test_explain_monte_carlo_kl(circle_dir, tmp_path):
    out = tmp_path / "r.json"
    code = _explain(circle_dir, out, "--point", "1.2,3.1", "--epsilon", "0.1", "--method", "mc",
                    "--distance", "kl", "--samples", "200")
    assert code == 0
    rep = ExplanationReport.load(out)
    assert rep.config["bound_method"] == "monte_carlo" and rep.config["mc_samples"] == 200
    for f in rep.features:
        assert f.raw[0] <= f.precise <= f.raw[1]


def test_explain_is_deterministic(circle_dir, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert _explain(circle_dir, out, "--point", "1.5,2.5", "--method", "mc",
                        "--samples", "150") == 0
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    da.pop("timing"), db.pop("timing")
    assert da == db


@pytest.mark.parametrize("extra", [
    ["--point", "1.5,2.5,3.5"],
    ["--point", "1.5,abc"],
    ["--point", "1.5,2.5", "--epsilon", "2"],
    ["--point", "1.5,2.5", "--distance", "kl"],
    ["--point", "1.5,2.5", "--eta", "-1"],
    ["--point", "1.5,2.5", "--label", "nope"],
])
def test_explain_validation_errors_exit_2(circle_dir, tmp_path, extra):
    assert _explain(circle_dir, tmp_path / "r.json", *extra) == 2


def test_missing_training_file_exit_2(tmp_path):
    assert main(["explain", "--train", str(tmp_path / "nope.csv"), "--point", "1,2",
                 "--out", str(tmp_path / "r.json")]) == 2


def test_compute_failure_exit_1(tmp_path, monkeypatch):
    from impshap import cli
    from impshap.ks_bounds import BoundInfeasibleError

    def fail(ctx, config):
        raise BoundInfeasibleError("every lower-bound subproblem is infeasible")

    path = tmp_path / "d.csv"
    path.write_text("a,b,label\n0,0,p\n1,1,q\n0,1,p\n1,0,q\n", encoding="utf-8")
    monkeypatch.setattr(cli, "imprecise_shapley", fail)
    assert main(["explain", "--train", str(path), "--point", "0.5,0.5", "--trees", "3",
                 "--out", str(tmp_path / "r.json")]) == 1


def test_unwritable_output_exit_1(circle_dir, tmp_path):
    assert _explain(circle_dir, tmp_path / "missing" / "r.json", "--point", "1.5,2.5") == 1


def test_train_then_explain_with_saved_model(circle_dir, tmp_path):
    model = tmp_path / "forest.json"
    assert main(["train", "--train", str(circle_dir / "train.csv"), "--trees", "10",
                 "--out", str(model)]) == 0
    out = tmp_path / "r.json"
    assert _explain(circle_dir, out, "--point", "1.5,2.5", "--model", str(model)) == 0


def test_sweep_rows_and_nesting(circle_dir, tmp_path):
    out = tmp_path / "s.csv"
    code = main(["sweep", "--train", str(circle_dir / "train.csv"), "--trees", "30",
                 "--seed", "42", "--point", "1.5,2.5", "--epsilons", "0,0.05,0.1,0.15",
                 "--out", str(out)])
    assert code == 0
    header, *rows = _rows(out)
    assert header[:7] == ["feature", "epsilon", "precise", "raw_lo", "raw_hi", "reduced_lo",
                          "reduced_hi"]
    assert all(len(r) == len(header) for r in rows) and len(rows) == 8
    assert [(r[0], float(r[1])) for r in rows] == [(f, e) for f in ("x", "y")
                                                    for e in (0, 0.05, 0.1, 0.15)]
    for feature in ("x", "y"):
        ivs = [(float(r[3]), float(r[4])) for r in rows if r[0] == feature]
        for (a, b), (c, d) in zip(ivs, ivs[1:]):
            assert c <= a + 1e-9 and b <= d + 1e-9


def test_sweep_zero_only_and_bad_grid(circle_dir, tmp_path):
    out = tmp_path / "s.csv"
    base = ["sweep", "--train", str(circle_dir / "train.csv"), "--trees", "10",
            "--point", "1.5,2.5", "--out", str(out)]
    assert main(base + ["--epsilons", "0"]) == 0
    for r in _rows(out)[1:]:
        assert r[3] == r[4]
    assert main(base + ["--epsilons", "0,0.1,0.05"]) == 2
    assert main(base + ["--epsilons", "0,1.5"]) == 2


def test_module_entry_point(circle_dir, tmp_path):
    proc = subprocess.run([sys.executable, "-m", "impshap", "generate", "--dataset", "clusters",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0 and (tmp_path / "train.csv").exists()
    proc = subprocess.run([sys.executable, "-m", "impshap", "sweep"], capture_output=True, text=True)
    assert proc.returncode == 2

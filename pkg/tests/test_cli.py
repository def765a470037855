import json
from datetime import date

import pytest

from headtrend.cli import main
from headtrend.config import RunConfig, validate_config
from headtrend.corpus import load_headline_csv
from headtrend.preprocess import PreprocessConfig, preprocess_day
from headtrend.synthetic import make_records, prices_for, write_headline_csv, write_price_csv


@pytest.fixture(scope="module")
def data_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("data")
    write_headline_csv(make_records(date(2015, 1, 1), date(2015, 5, 20), seed=1), d / "h100.csv")
    labeled = make_records(date(2010, 1, 1), date(2011, 6, 30), seed=2)
    unlabeled = make_records(date(2010, 1, 1), date(2011, 6, 30), seed=2, with_labels=False)
    write_headline_csv(unlabeled, d / "h18.csv")
    write_price_csv(prices_for(labeled, seed=2), d / "p18.csv")
    return d


def write_config(directory, name="cfg.json", **overrides):
    cfg = {"seed": 42, "data": {"headlines": "h100.csv"}, "embeddings": ["bow"],
           "models": ["logreg", "gnb"], "split": {"type": "chronological", "fraction": 0.8},
           "output_dir": "out_" + name.split(".")[0]}
    cfg.update(overrides)
    path = directory / name
    path.write_text(json.dumps(cfg))
    return path


def test_validate_ok(data_dir, capsys):
    assert main(["validate", str(write_config(data_dir))]) == 0
    assert capsys.readouterr().out.strip() == "OK"


def test_validate_missing_seed(data_dir, capsys):
    path = write_config(data_dir, "noseed.json")
    raw = json.loads(path.read_text())
    del raw["seed"]
    path.write_text(json.dumps(raw))
    assert main(["validate", str(path)]) == 1
    assert "seed" in capsys.readouterr().out


def test_validate_ngram_out_of_range(data_dir, capsys):
    path = write_config(data_dir, "ng.json",
                        embeddings=[{"name": "x", "base": "bow", "ngram": 9}])
    assert main(["validate", str(path)]) == 1
    assert "ngram" in capsys.readouterr().out


def test_validate_cross_checks(data_dir):
    raw = {"seed": 1, "data": {"headlines": "missing.csv"},
           "embeddings": ["bow", "bow", {"name": "custom"}],
           "split": {"type": "chronological", "boundary": "2015-02-30"}}
    problems = "\n".join(validate_config(raw, data_dir))
    assert "file not found" in problems
    assert "duplicate" in problems
    assert "$.embeddings[2].base" in problems
    assert "not a calendar date" in problems


def test_validate_unreadable_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["validate", str(bad)]) != 0
    assert main(["validate", str(tmp_path / "absent.json")]) != 0


def _body(text):
    return [line for line in text.splitlines() if not line.startswith("# generated")]


def test_run_writes_reports_deterministically(data_dir, capsys):
    path = write_config(data_dir, "run.json")
    assert main(["run", str(path)]) == 0
    out = data_dir / "out_run"
    assert sorted(p.name for p in out.iterdir()) == ["report.csv", "report.txt",
                                                     "resolved-config.json"]
    first_txt, first_csv = (out / "report.txt").read_text(), (out / "report.csv").read_text()
    assert first_txt.startswith("# generated ")
    assert main(["run", str(path)]) == 0
    assert _body((out / "report.txt").read_text()) == _body(first_txt)
    assert (out / "report.csv").read_text() == first_csv
    assert "reports written to" in capsys.readouterr().out


def test_resolved_config_round_trip(data_dir):
    path = write_config(data_dir, "resolved.json")
    assert main(["run", str(path)]) == 0
    out = data_dir / "out_resolved"
    resolved = out / "resolved-config.json"
    raw = json.loads(resolved.read_text())
    assert raw["preprocess"]["remove_stopwords"] is True
    assert raw["hyperparameters"]["logreg"]["learning_rate"] == 0.05
    assert "rforest" not in raw["hyperparameters"]
    # running the resolved file reproduces the same results
    raw["output_dir"] = str(data_dir / "out_again")
    again = data_dir / "again.json"
    again.write_text(json.dumps(raw))
    assert validate_config(raw, data_dir) == []
    assert RunConfig.from_file(again).grid() == RunConfig.from_file(path).grid()
    assert main(["run", str(again)]) == 0
    assert (data_dir / "out_again" / "report.csv").read_text() == (out / "report.csv").read_text()


def test_run_walk_forward_subdirectories(data_dir):
    path = write_config(data_dir, "wf.json", data={"headlines": "h18.csv", "prices": "p18.csv"},
                        models=["gnb"],
                        split={"type": "walk_forward", "train_months": 9, "test_months": 3,
                               "step_months": 3})
    assert main(["run", str(path)]) == 0
    out = data_dir / "out_wf"
    for i in (1, 2, 3):
        assert (out / f"window_{i:02d}" / "report.csv").is_file()
    assert "pooled over 3 windows" in (out / "report.txt").read_text()


def test_run_config_error_exit_code(data_dir):
    path = write_config(data_dir, "bad_model.json", models=["ridge"])
    assert main(["run", str(path)]) == 1


def test_run_runtime_error_exit_code(data_dir):
    path = write_config(data_dir, "degenerate.json", split={"type": "chronological",
                                                           "boundary": "2000-01-01"})
    assert main(["run", str(path)]) == 2
    assert "ERROR" in (data_dir / "out_degenerate" / "report.txt").read_text()


def test_inspect_windows(data_dir, capsys):
    path = write_config(data_dir, "iw.json", data={"headlines": "h18.csv", "prices": "p18.csv"},
                        split={"type": "walk_forward"})
    assert main(["inspect", str(path), "windows"]) == 0
    rows = capsys.readouterr().out.strip().splitlines()[1:]
    assert len(rows) == 3
    assert rows[0].split()[1:5] == ["2010-01-01", "2010-09-30", "2010-10-01", "2010-12-31"]


def test_inspect_vocab_respects_min_df(data_dir, capsys):
    path = write_config(data_dir, "iv.json",
                        embeddings=[{"name": "bow3", "base": "bow", "min_df": 3}])
    assert main(["inspect", str(path), "vocab", "--top", "10000"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()[2:]
    assert lines
    assert all(int(line.split()[3]) >= 3 for line in lines)


def test_inspect_features_sum(data_dir, capsys):
    path = write_config(data_dir, "if.json")
    assert main(["inspect", str(path), "vocab", "--top", "100000"]) == 0
    vocab = {line.split()[1] for line in capsys.readouterr().out.strip().splitlines()[2:]}
    assert main(["inspect", str(path), "features", "--date", "2015-01-02"]) == 0
    total = float(capsys.readouterr().out.split("sum ")[1].split()[0])
    [day] = [r for r in load_headline_csv(data_dir / "h100.csv") if r.date == date(2015, 1, 2)]
    # a bag-of-words vector sums to the number of in-vocabulary tokens that day
    assert total == sum(1 for t in preprocess_day(day, PreprocessConfig()) if t in vocab)


def test_unknown_subcommand_and_target(data_dir):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate", "x"])
    assert exc.value.code != 0
    assert main(["inspect", str(write_config(data_dir)), "nonsense"]) != 0

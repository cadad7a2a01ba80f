import json
import subprocess
import sys

import pytest

from deadlistener.cli import main
from deadlistener.corpus import aggregate, read_occurrences, write_index_csv, write_occurrences
from deadlistener.classifier import Config, classify_corpus, load_model, write_model
from deadlistener.evaluation import write_labels

from conftest import (
    RES_PATH,
    eval_corpus_occurrences,
    eval_labels,
    http_corpus_occurrences,
)


@pytest.fixture
def pairs_file(tmp_path):
    target = tmp_path / "pairs.jsonl"
    write_occurrences(target, http_corpus_occurrences())
    return target


@pytest.fixture
def model_file(tmp_path):
    model = classify_corpus(aggregate(http_corpus_occurrences()), Config(0.1, 0.1, 0.03, 0.01))
    target = tmp_path / "model.json"
    write_model(target, model)
    return target


class TestMine:
    def test_fig2(self, tmp_path, fig2_project, capsys):
        out = tmp_path / "pairs.jsonl"
        code = main(["mine", str(fig2_project), "--out", str(out)])
        assert code == 0
        records = read_occurrences(out)
        assert len(records) == 3
        assert {o.event for o in records} == {"data", "end", "timeout"}
        manifest = json.loads((tmp_path / "pairs.jsonl.manifest.json").read_text())
        assert manifest["command"] == "mine"
        assert manifest["occurrences"] == 3
        assert manifest["diagnostics"]["files_parsed"] == 1
        assert "duration_seconds" in manifest

    def test_empty_directory(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        out = tmp_path / "pairs.jsonl"
        assert main(["mine", str(empty), "--out", str(out)]) == 0
        assert read_occurrences(out) == []

    def test_unreadable_root(self, tmp_path, capsys):
        out = tmp_path / "pairs.jsonl"
        code = main(["mine", str(tmp_path / "missing"), "--out", str(out)])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_multiple_projects_and_ext(self, tmp_path, fig2_project, fig2_chained_project):
        out = tmp_path / "pairs.jsonl"
        code = main(
            ["mine", str(fig2_project), str(fig2_chained_project), "--out", str(out), "--ext", "js,mjs"]
        )
        assert code == 0
        records = read_occurrences(out)
        assert len(records) == 6
        assert {o.project_id for o in records} == {"fig2", "fig2_chained"}


class TestClassify:
    def test_flags_timeout_pair(self, tmp_path, pairs_file):
        out = tmp_path / "model.json"
        code = main(["classify", str(pairs_file), "--config", "0.1,0.1,0.03,0.01", "--out", str(out)])
        assert code == 0
        model = load_model(out)
        anomalous = {(str(r.path), r.event) for r in model.packages["http"].anomalous}
        assert anomalous == {(RES_PATH, "timeout")}

    def test_accepts_index_csv(self, tmp_path, pairs_file):
        index_csv = tmp_path / "index.csv"
        write_index_csv(index_csv, aggregate(read_occurrences(pairs_file)))
        out = tmp_path / "model.json"
        assert main(["classify", str(index_csv), "--out", str(out)]) == 0
        assert load_model(out).packages["http"].anomalous

    def test_empty_input(self, tmp_path):
        empty = tmp_path / "pairs.jsonl"
        empty.write_text("")
        out = tmp_path / "model.json"
        assert main(["classify", str(empty), "--out", str(out)]) == 0
        assert load_model(out).packages == {}

    def test_malformed_config(self, tmp_path, pairs_file, capsys):
        out = tmp_path / "model.json"
        code = main(["classify", str(pairs_file), "--config", "1.5,0.1,0.03,0.01", "--out", str(out)])
        assert code == 2
        assert "error" in capsys.readouterr().err


class TestCheck:
    def test_finding_with_exit_code_one(self, fig2_project, model_file, capsys):
        code = main(["check", str(fig2_project), "--model", str(model_file)])
        assert code == 1
        output = capsys.readouterr().out
        assert "index.js:9" in output
        assert "timeout" in output
        assert RES_PATH in output
        assert "1 finding(s)" in output

    def test_clean_project_exits_zero(self, tmp_path, model_file, capsys):
        project = tmp_path / "clean"
        project.mkdir()
        (project / "app.js").write_text(
            "const http = require('http');\n"
            "http.request(url, res => { res.on('data', d => {}); res.on('end', () => {}); });\n"
        )
        assert main(["check", str(project), "--model", str(model_file)]) == 0
        assert "0 finding(s)" in capsys.readouterr().out

    def test_suppression_file(self, tmp_path, fig2_project, model_file, capsys):
        suppress = tmp_path / "suppress.csv"
        suppress.write_text("# known issue\nhttp,require(http).request(1)(0),timeout\n")
        code = main(
            ["check", str(fig2_project), "--model", str(model_file), "--suppress", str(suppress)]
        )
        assert code == 0
        assert "0 finding(s)" in capsys.readouterr().out

    def test_json_format_and_out_file(self, tmp_path, fig2_project, model_file):
        out = tmp_path / "findings.json"
        code = main(
            ["check", str(fig2_project), "--model", str(model_file), "--format", "json", "--out", str(out)]
        )
        assert code == 1
        payload = json.loads(out.read_text())
        assert len(payload["findings"]) == 1
        finding = payload["findings"][0]
        assert finding["file"] == "index.js"
        assert finding["line"] == 9
        assert finding["event"] == "timeout"
        assert finding["k"] == 1
        assert finding["n_e"] == 216
        assert finding["low_confidence_long_path"] is False
        manifest = json.loads((tmp_path / "findings.json.manifest.json").read_text())
        assert manifest["findings"] == 1

    def test_long_path_flagged_low_confidence(self, tmp_path, capsys):
        from deadlistener.miner import mine_project
        from conftest import make_occurrences

        project = tmp_path / "proj"
        project.mkdir()
        (project / "deep.js").write_text(
            "const x = require('x');\nx.a.b.c.d().on('evt', () => {});\n"
        )
        occurrences, _ = mine_project(project)
        background = make_occurrences(
            [("x", "require(x).other()", "evt", 40), ("x", "require(x).a.b.c.d()", "tick", 40)]
        )
        model = classify_corpus(aggregate(occurrences + background), Config(0.25, 0.25, 0.1, 0.1))
        model_path = tmp_path / "model.json"
        write_model(model_path, model)
        code = main(["check", str(project), "--model", str(model_path)])
        assert code == 1
        assert "[low-confidence: long path]" in capsys.readouterr().out


class TestEval:
    @pytest.fixture
    def eval_inputs(self, tmp_path):
        pairs = tmp_path / "pairs.jsonl"
        write_occurrences(pairs, eval_corpus_occurrences())
        labels = tmp_path / "labels.csv"
        write_labels(labels, eval_labels())
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps({"rarity": [0.1, 0.25], "confidence": [0.01, 0.05]}))
        return pairs, labels, grid

    def test_score_mode(self, tmp_path, eval_inputs, capsys):
        pairs, labels, _ = eval_inputs
        out = tmp_path / "score.csv"
        code = main(
            ["eval", str(pairs), str(labels), "--mode", "score", "--config", "0.1,0.1,0.03,0.01", "--out", str(out)]
        )
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[-1].startswith("0.1,0.1,0.03,0.01,100.0,80.0,4,0,")

    def test_score_mode_requires_config(self, tmp_path, eval_inputs, capsys):
        pairs, labels, _ = eval_inputs
        out = tmp_path / "score.csv"
        assert main(["eval", str(pairs), str(labels), "--mode", "score", "--out", str(out)]) == 2

    def test_sweep_mode_row_count(self, tmp_path, eval_inputs):
        pairs, labels, grid = eval_inputs
        out = tmp_path / "sweep.csv"
        code = main(["eval", str(pairs), str(labels), "--mode", "sweep", "--grid", str(grid), "--out", str(out)])
        assert code == 0
        data_lines = [l for l in out.read_text().splitlines() if l and not l.startswith("#")]
        assert len(data_lines) == 1 + 16

    def test_sweep_mode_default_grid_4096_rows(self, tmp_path, eval_inputs):
        pairs, labels, _ = eval_inputs
        out = tmp_path / "sweep_full.csv"
        code = main(["eval", str(pairs), str(labels), "--mode", "sweep", "--out", str(out)])
        assert code == 0
        data_lines = [l for l in out.read_text().splitlines() if l and not l.startswith("#")]
        assert len(data_lines) == 1 + 4096

    def test_pareto_mode(self, tmp_path, eval_inputs):
        pairs, labels, grid = eval_inputs
        out = tmp_path / "front.csv"
        code = main(["eval", str(pairs), str(labels), "--mode", "pareto", "--grid", str(grid), "--out", str(out)])
        assert code == 0
        text = out.read_text()
        assert "# swept_configs=16" in text

    def test_cv_mode_byte_identical(self, tmp_path, eval_inputs):
        pairs, labels, grid = eval_inputs
        out_a = tmp_path / "cv_a.csv"
        out_b = tmp_path / "cv_b.csv"
        base = ["eval", str(pairs), str(labels), "--mode", "cv", "--folds", "2", "--seed", "7", "--grid", str(grid)]
        assert main(base + ["--out", str(out_a)]) == 0
        assert main(base + ["--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()
        assert b"# seed=7" in out_a.read_bytes()

    def test_subset_mode(self, tmp_path, eval_inputs):
        pairs, labels, grid = eval_inputs
        out = tmp_path / "subset.csv"
        code = main(
            [
                "eval", str(pairs), str(labels), "--mode", "subset", "--percentages", "100",
                "--iterations", "2", "--seed", "3", "--grid", str(grid), "--out", str(out),
            ]
        )
        assert code == 0
        assert ",harmean," in out.read_text()

    def test_manifest_written(self, tmp_path, eval_inputs):
        from conftest import EVAL_CORPUS_SPEC

        pairs, labels, grid = eval_inputs
        out = tmp_path / "sweep.csv"
        main(["eval", str(pairs), str(labels), "--mode", "sweep", "--grid", str(grid), "--out", str(out)])
        manifest = json.loads((tmp_path / "sweep.csv.manifest.json").read_text())
        assert manifest["mode"] == "sweep"
        assert manifest["seed"] == 0
        assert manifest["index"]["total_occurrences"] == sum(n for _, _, _, n in EVAL_CORPUS_SPEC)


def test_module_invocation_smoke(tmp_path, fig2_project):
    out = tmp_path / "pairs.jsonl"
    result = subprocess.run(
        [sys.executable, "-m", "deadlistener", "mine", str(fig2_project), "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0, result.stderr
    assert out.exists()
    result = subprocess.run(
        [sys.executable, "-m", "deadlistener", "--version"], capture_output=True, text=True
    )
    assert result.returncode == 0
    assert "deadlistener" in result.stdout

import json

import pytest

from mapscore.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSynth:
    def test_writes_requested_count(self, tmp_path, capsys):
        out = tmp_path / "corpus.json"
        code, stdout, _ = run(capsys, "synth", "--kind", "shift", "--magnitude", "1.0",
                              "--count", "5", "--seed", "3", "--out", str(out))
        assert code == 0
        assert "5 samples" in stdout
        payload = json.loads(out.read_text())
        assert len(payload["scenes"]) == 5

    def test_same_seed_byte_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(capsys, "synth", "--kind", "spurious_instances", "--magnitude", "4",
            "--count", "3", "--seed", "9", "--out", str(a))
        run(capsys, "synth", "--kind", "spurious_instances", "--magnitude", "4",
            "--count", "3", "--seed", "9", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()


class TestEval:
    def make_corpus(self, tmp_path, capsys):
        out = tmp_path / "corpus.json"
        run(capsys, "synth", "--kind", "shift", "--magnitude", "1.0",
            "--count", "3", "--seed", "0", "--out", str(out))
        return out

    def test_eval_prints_report(self, tmp_path, capsys):
        corpus = self.make_corpus(tmp_path, capsys)
        code, stdout, _ = run(capsys, "eval", "--input", str(corpus),
                              "--cd-thresholds", "1.0,1.5,2.0", "--workers", "1")
        assert code == 0
        assert "mDAP=0.8889" in stdout
        assert "mAP[cd_ap]=1.0000" in stdout

    def test_metrics_dap_only_hides_ap_columns(self, tmp_path, capsys):
        corpus = self.make_corpus(tmp_path, capsys)
        code, stdout, _ = run(capsys, "eval", "--input", str(corpus),
                              "--metrics", "dap", "--workers", "1")
        assert code == 0
        assert "cd_ap" not in stdout
        assert "mDAP" in stdout

    def test_output_json_written(self, tmp_path, capsys):
        corpus = self.make_corpus(tmp_path, capsys)
        report_path = tmp_path / "report.json"
        code, _, _ = run(capsys, "eval", "--input", str(corpus), "--metrics", "dap",
                         "--workers", "1", "--output", str(report_path))
        assert code == 0
        payload = json.loads(report_path.read_text())
        assert payload["mdap"] == pytest.approx(0.8888888888888889, abs=1e-9)

    def test_bad_schema_exits_three(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"scenes": [{"sample_id": "s", "classes": {
            "divider": {"predictions": [{"confidence": 2.0, "points": [[0, 0], [1, 0]]}]}}}]}))
        code, _, stderr = run(capsys, "eval", "--input", str(bad), "--workers", "1")
        assert code == 3
        assert "confidence" in stderr

    def test_missing_file_exits_two(self, capsys):
        code, _, stderr = run(capsys, "eval", "--input", "/nonexistent/scenes.json", "--workers", "1")
        assert code == 2
        assert "error" in stderr


class TestPair:
    def test_swapped_order_showcase(self, capsys):
        code, stdout, _ = run(capsys, "pair", "--a", "0,0;1,0", "--b", "1,0;0,0", "--cutoff", "1.0")
        assert code == 0
        assert "sospa: 1.0" in stdout
        assert "unordered reference: 0.0" in stdout
        assert "chamfer: 0.0" in stdout

    def test_identical_inputs_all_zero(self, capsys):
        code, stdout, _ = run(capsys, "pair", "--a", "0,0;1,0;2,0", "--b", "0,0;1,0;2,0")
        assert code == 0
        assert "sospa: 0.0" in stdout
        assert "chamfer: 0.0" in stdout
        assert "frechet: 0.0" in stdout

    def test_closed_pair_uses_cyclic(self, capsys):
        code, stdout, _ = run(capsys, "pair", "--a", "0,0;1,0;1,1;0,1", "--b", "1,0;1,1;0,1;0,0",
                              "--closed-a", "--closed-b")
        assert code == 0
        assert "cyclic sospa: 0.0" in stdout

    def test_kind_mismatch_warns(self, capsys):
        code, stdout, _ = run(capsys, "pair", "--a", "0,0;1,0;1,1", "--b", "0,0;1,0;1,1", "--closed-b")
        assert code == 0
        assert "warning" in stdout
        assert "1.0" in stdout

    def test_geometry_file_input(self, tmp_path, capsys):
        geom = tmp_path / "geom.json"
        geom.write_text(json.dumps({"points": [[0, 0], [1, 0]], "closed": False}))
        code, stdout, _ = run(capsys, "pair", "--a", f"@{geom}", "--b", "0,0;1,0")
        assert code == 0
        assert "sospa: 0.0" in stdout


class TestWorkersEnv:
    def test_env_var_overrides_default(self, monkeypatch):
        from mapscore.cli import _default_workers

        monkeypatch.setenv("MAPSCORE_WORKERS", "3")
        assert _default_workers() == 3
        monkeypatch.setenv("MAPSCORE_WORKERS", "not-a-number")
        assert _default_workers() >= 1


class TestOracle:
    def test_small_scale_passes(self, capsys):
        code, stdout, _ = run(capsys, "oracle", "--seed", "1", "--scale", "0.01")
        assert code == 0
        assert "[pass]" in stdout
        assert "[FAIL]" not in stdout

    def test_cyclic_triangle_flag(self, capsys):
        code, stdout, _ = run(capsys, "oracle", "--seed", "2", "--scale", "0.01", "--log-cyclic-triangle")
        assert code == 0
        assert "informational" in stdout

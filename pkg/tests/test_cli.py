import json
import subprocess
import sys

import pytest

from inqverify.cli import run
from inqverify.verify import CLAIMS


def invoke(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestExitCodes:
    def test_symmetric_span_confirms(self, capsys):
        code, out, _ = invoke(capsys, "verify", "--claim", "symmetric-span", "--dims", "2,2", "--seed", "42", "--format", "json")
        assert code == 0
        report = json.loads(out)
        assert isinstance(report, dict) and report["status"] == "CONFIRMED" and report["seed"] == 42

    def test_matrix_span_three(self, capsys):
        code, out, _ = invoke(capsys, "verify", "--claim", "matrix-span", "--dims", "3", "--seed", "7", "--format", "json")
        report = json.loads(out)
        assert code == 2 and report["status"] == "REFUTED"
        assert report["measured"]["inq_dim"] == 44

    @pytest.mark.parametrize(
        "argv",
        [
            ["verify", "--dims", "0"],
            ["verify"],
            ["verify", "--dims", "2", "--seed", "-1"],
            ["verify", "--dims", "2,x"],
            ["verify", "--dims", "2", "--claim", "decomposition", "--weights", "0.5"],
            ["verify", "--dims", "2,2", "--claim", "decomposition"],
            ["verify", "--dims", "2", "--tol-rel", "0.5"],
            ["decompose", "--dims", "2,2"],
            ["frobnicate"],
            ["verify", "--dims", "2", "--format", "yaml"],
        ],
    )
    def test_usage_errors(self, capsys, argv):
        code, _, err = invoke(capsys, *argv)
        assert code == 1 and err

    def test_unknown_claim_lists_registry(self, capsys):
        code, _, err = invoke(capsys, "verify", "--claim", "nope", "--dims", "2")
        assert code == 1
        assert all(name in err for name in CLAIMS)

    def test_inconclusive_exit(self, capsys):
        code, out, _ = invoke(capsys, "verify", "--claim", "kernels", "--dims", "2", "--tol-abs", "0.5", "--format", "json")
        assert code == 3 and json.loads(out)["status"] == "INCONCLUSIVE"


class TestOutputs:
    def test_list_claims(self, capsys):
        code, out, _ = invoke(capsys, "list-claims")
        assert code == 0 and [line.split()[0] for line in out.splitlines()] == list(CLAIMS)

    def test_all_gives_array_in_registry_order(self, capsys):
        code, out, _ = invoke(capsys, "verify", "--dims", "1,1", "--format", "json")
        reports = json.loads(out)
        names = [r["claim"] for r in reports]
        assert names == [n for n in CLAIMS if n in names] and "decomposition" not in names
        assert code == 0

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "r.json"
        code, out, _ = invoke(capsys, "verify", "--claim", "kernels", "--dims", "2", "--format", "json", "--out", str(path))
        assert code == 0 and out == ""
        assert json.loads(path.read_text())["measured"]["dim_joint"] == 9

    def test_text_and_json_agree(self, capsys):
        base = ["verify", "--claim", "average-trace", "--dims", "2", "--seed", "3"]
        _, text, _ = invoke(capsys, *base, "--format", "text")
        _, js, _ = invoke(capsys, *base, "--format", "json")
        report = json.loads(js)
        for key, val in report["measured"].items():
            if key != "checks":
                assert f"{key}: {json.dumps(val)}" in text
        for e in report["expected"]:
            assert e["name"] in text

    def test_timings_flag(self, capsys):
        _, out, _ = invoke(capsys, "verify", "--claim", "kernels", "--dims", "2", "--format", "json", "--timings")
        assert json.loads(out)["duration_ms"] is not None
        _, out, _ = invoke(capsys, "verify", "--claim", "kernels", "--dims", "2", "--format", "json")
        assert json.loads(out)["duration_ms"] is None

    def test_decompose(self, capsys):
        code, out, _ = invoke(capsys, "decompose", "--dims", "3")
        assert code == 0 and "g^(2):27, g:8, 1:1" in out and "(total 28)" in out

    def test_delta(self, capsys):
        code, out, _ = invoke(capsys, "delta", "--dims", "1,1", "--format", "json")
        report = json.loads(out)
        assert code == 0 and report["claim"] == "delta"
        assert report["measured"]["delta_entries"] == [[0, 0, 0, 0, 0, 0, 1.0, 0.0], [1, 1, 0, 0, 0, 0, 1.0, 0.0]]


class TestConfig:
    def test_flags_override_file(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"claims": ["kernels"], "dims": [3], "seed": 5, "format": "json",
                                   "tol": {"rel": 1e-9, "abs": 1e-12, "angle": 1e-7}}))
        _, merged, _ = invoke(capsys, "verify", "--config", str(cfg), "--dims", "2", "--seed", "9")
        _, flags, _ = invoke(capsys, "verify", "--claim", "kernels", "--dims", "2", "--seed", "9", "--format", "json")
        assert merged == flags
        assert json.loads(merged)["dims"] == [2]

    def test_file_only(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"claims": "kernels", "dims": "1,2", "weights": [0.25, 0.75], "format": "json"}))
        code, out, _ = invoke(capsys, "verify", "--config", str(cfg))
        assert code == 0 and json.loads(out)["weights"] == [0.25, 0.75]

    @pytest.mark.parametrize("content", ["[1, 2]", "{\"dims\": [2], \"colour\": 1}", "not json"])
    def test_bad_config(self, capsys, tmp_path, content):
        cfg = tmp_path / "c.json"
        cfg.write_text(content)
        code, _, _ = invoke(capsys, "verify", "--config", str(cfg))
        assert code == 1

    def test_missing_config(self, capsys, tmp_path):
        code, _, _ = invoke(capsys, "verify", "--config", str(tmp_path / "absent.json"))
        assert code == 1


class TestThreads:
    def test_env_cap(self, capsys, monkeypatch):
        monkeypatch.setenv("INQ_VERIFY_THREADS", "3")
        _, a, _ = invoke(capsys, "verify", "--dims", "1,2", "--format", "json")
        monkeypatch.setenv("INQ_VERIFY_THREADS", "1")
        _, b, _ = invoke(capsys, "verify", "--dims", "1,2", "--format", "json")
        assert a == b

    def test_bad_env(self, capsys, monkeypatch):
        monkeypatch.setenv("INQ_VERIFY_THREADS", "many")
        code, _, _ = invoke(capsys, "verify", "--dims", "2")
        assert code == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "inqverify", "list-claims"], capture_output=True, text=True)
    assert proc.returncode == 0 and "kernels" in proc.stdout

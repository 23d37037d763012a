import json
import math

import numpy as np
import pytest

from cyclostab.cli import (config_to_jsonable, main, parse_config,
                           run_analysis)

REF_CONFIG = {
    "version": 1,
    "mobius": {"a": 2, "b": 1, "c": 1, "d": 3},
    "subsystems": [
        {"num": [4.0], "den": [1.0, 1.0], "delay": 0.7},
        {"gain": 0.3},
    ],
}


def write_config(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def ref_config(k=0.3):
    data = json.loads(json.dumps(REF_CONFIG))
    data["subsystems"][1]["gain"] = k
    return data


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestAnalyze:
    def test_reference_below_threshold(self, tmp_path, capsys):
        path = write_config(tmp_path, ref_config(0.3))
        code, report = run_json(capsys, ["analyze", path])
        assert code == 0
        assert report["verdict"] == "robustly-stable"
        assert report["subsystems"][0]["gamma_k"] == pytest.approx(16 / 3, abs=1e-3)
        assert report["subsystems"][1]["gamma_k"] == pytest.approx(0.4, rel=1e-11)

    def test_reference_above_threshold(self, tmp_path, capsys):
        path = write_config(tmp_path, ref_config(0.4))
        code, report = run_json(capsys, ["analyze", path])
        assert code == 3
        assert report["verdict"] == "criterion-fails"

    def test_small_gain_pair(self, tmp_path, capsys):
        data = {
            "version": 1,
            "mobius": {"a": 1, "b": 0, "c": 0, "d": 1},
            "subsystems": [{"gain": 0.5}, {"gain": 0.5}],
        }
        path = write_config(tmp_path, data)
        code, report = run_json(capsys, ["analyze", path])
        assert code == 0
        assert report["gamma_bar"] == pytest.approx(0.5)

    def test_marginal_boundary(self, tmp_path, capsys):
        data = {
            "version": 1,
            "mobius": {"a": 1, "b": 0, "c": 0, "d": 1},
            "subsystems": [{"gain": 1.0}, {"gain": 1.0}],
        }
        path = write_config(tmp_path, data)
        code, report = run_json(capsys, ["analyze", path])
        assert code == 4
        assert report["verdict"] == "marginal"

    def test_text_mode(self, tmp_path, capsys):
        path = write_config(tmp_path, ref_config(0.3))
        code = main(["analyze", path, "--text"])
        out = capsys.readouterr().out
        assert code == 0
        assert "verdict:" in out
        assert "robustly-stable" in out

    def test_bad_config_exit_2(self, tmp_path, capsys):
        path = write_config(tmp_path, {"version": 99})
        assert main(["analyze", path]) == 2

    def test_missing_file_exit_2(self, capsys):
        assert main(["analyze", "/nonexistent/config.json"]) == 2

    def test_degenerate_map_exit_2(self, tmp_path, capsys):
        data = ref_config()
        data["mobius"] = {"a": 1, "b": 2, "c": 2, "d": 4}
        path = write_config(tmp_path, data)
        assert main(["analyze", path]) == 2

    def test_unstable_subsystem_gated(self, tmp_path, capsys):
        data = {
            "version": 1,
            "mobius": {"a": 1, "b": 0, "c": 0, "d": 1},
            "subsystems": [{"num": [1.0], "den": [-1.0, 1.0]}, {"gain": 0.1}],
        }
        path = write_config(tmp_path, data)
        assert main(["analyze", path]) == 2

    def test_report_self_consistency(self, tmp_path, capsys):
        path = write_config(tmp_path, ref_config(0.3))
        _, report = run_json(capsys, ["analyze", path])
        a, b = report["mobius"]["a"], report["mobius"]["b"]
        c, d = report["mobius"]["c"], report["mobius"]["d"]
        gammas = [s["gamma_k"] for s in report["subsystems"]]
        gbar = math.exp(sum(math.log(g) for g in gammas) / len(gammas))
        assert gbar == pytest.approx(report["gamma_bar"], rel=1e-10)
        for beta, holds in zip(report["beta"], report["inequality"]["holds"]):
            q = (b * b - a * a) * gbar ** 2 + \
                2 * beta * (a * c - b * d) * gbar + d * d - c * c
            assert (q > 0) == holds
        expected = "robustly-stable" if all(report["inequality"]["holds"]) \
            else "criterion-fails"
        assert report["verdict"] == expected

    def test_direction_override(self, tmp_path, capsys):
        data = {
            "version": 1,
            "mobius": {"a": 0, "b": 1, "c": 1, "d": 0},
            "subsystems": [{"num": [1.0, 2.0], "den": [1.0, 1.0]},
                           {"gain": 2.0}],
        }
        path = write_config(tmp_path, data)
        code, report = run_json(capsys, ["analyze", path, "--direction", "max"])
        assert report["direction"] == "maximize"
        # large-gain family: responses bounded below by ~1 and 2
        assert report["gamma_bar"] > 1.0
        assert code == 0


class TestAdmissible:
    def test_secant_n3(self, capsys):
        code, out = run_json(capsys, [
            "admissible", "--a", "1", "--b", "1", "--c", "0", "--d", "2",
            "--n", "3"])
        assert code == 0
        assert out["intervals"][0][0] == 0.0
        assert out["intervals"][0][1] == pytest.approx(2.0, abs=1e-12)

    def test_mixed_remark(self, capsys):
        code, out = run_json(capsys, [
            "admissible", "--a", "1", "--b", "16", "--c", "1", "--d", "1.125",
            "--n", "3"])
        assert code == 0
        assert out["intervals"][0] == [0.0, 0.025]
        assert out["intervals"][1][0] == pytest.approx(1 / 24, abs=1e-12)
        assert out["intervals"][1][1] is None

    def test_large_gain_n7(self, capsys):
        code, out = run_json(capsys, [
            "admissible", "--a", "0", "--b", "1", "--c", "1", "--d", "0",
            "--n", "7"])
        assert code == 0
        assert out["intervals"] == [[1.0, None]]

    def test_degenerate_exit_2(self, capsys):
        assert main(["admissible", "--a", "1", "--b", "2", "--c", "2",
                     "--d", "4", "--n", "3"]) == 2


class TestCounterexample:
    def test_secant_boundary(self, capsys):
        code, out = run_json(capsys, [
            "counterexample", "--a", "1", "--b", "1", "--c", "0", "--d", "2",
            "--gammas", "2,2,2"])
        assert code == 0
        root = complex(out["closed_loop_root"]["re"],
                       out["closed_loop_root"]["im"])
        assert abs(root - 1j) < 1e-6
        assert out["root_residual"] < 1e-6
        assert len(out["subsystems"]) == 3

    def test_small_gain_boundary(self, capsys):
        code, out = run_json(capsys, [
            "counterexample", "--a", "1", "--b", "0", "--c", "0", "--d", "1",
            "--gammas", "1,1"])
        assert code == 0
        root = complex(out["closed_loop_root"]["re"],
                       out["closed_loop_root"]["im"])
        assert abs(root - 1j) < 1e-6

    def test_holds_exit_3(self, capsys):
        assert main(["counterexample", "--a", "1", "--b", "0", "--c", "0",
                     "--d", "1", "--gammas", "0.5,0.5"]) == 3

    def test_bad_gammas_exit_2(self, capsys):
        assert main(["counterexample", "--a", "1", "--b", "0", "--c", "0",
                     "--d", "1", "--gammas", "0.5,oops"]) == 2


class TestNyquist:
    def test_reference_artifacts(self, tmp_path, capsys):
        path = write_config(tmp_path, ref_config())
        prefix = str(tmp_path / "fig")
        code, out = run_json(capsys, [
            "nyquist", path, "--subsystem", "1", "--out", prefix])
        assert code == 0
        assert out["gamma_k"] == pytest.approx(16 / 3, abs=1e-3)
        csv_lines = (tmp_path / "fig.csv").read_text().splitlines()
        assert csv_lines[0] == "omega,re,im"
        assert csv_lines[-1].startswith("inf,")
        rows = np.array([[float(v) for v in line.split(",")]
                         for line in csv_lines[1:-1]])
        assert rows.shape[1] == 3
        assert np.all(np.diff(rows[:, 0]) > 0)
        svg = (tmp_path / "fig.svg").read_text()
        meta = json.loads(svg.split("<metadata>")[1].split("</metadata>")[0])
        assert meta["scaled_disk"]["center_re"] == pytest.approx(2 / 3, abs=1e-9)
        assert meta["scaled_disk"]["radius"] == pytest.approx(10 / 3, abs=1e-3)
        assert meta["unit_disk"]["radius"] == pytest.approx(5 / 8, abs=1e-12)

    def test_constant_subsystem_single_point(self, tmp_path, capsys):
        path = write_config(tmp_path, ref_config())
        prefix = str(tmp_path / "fig2")
        code, _ = run_json(capsys, [
            "nyquist", path, "--subsystem", "2", "--out", prefix])
        assert code == 0
        svg = (tmp_path / "fig2.svg").read_text()
        assert 'data-label="response point"' in svg

    def test_identity_map_disk_at_origin(self, tmp_path, capsys):
        data = {
            "version": 1,
            "mobius": {"a": 1, "b": 0, "c": 0, "d": 1},
            "subsystems": [{"num": [1.0], "den": [1.0, 1.0]}, {"gain": 0.5}],
        }
        path = write_config(tmp_path, data)
        prefix = str(tmp_path / "fig3")
        code, out = run_json(capsys, [
            "nyquist", path, "--subsystem", "1", "--out", prefix])
        assert code == 0
        svg = (tmp_path / "fig3.svg").read_text()
        meta = json.loads(svg.split("<metadata>")[1].split("</metadata>")[0])
        assert meta["scaled_disk"]["center_re"] == 0.0
        assert meta["scaled_disk"]["radius"] == pytest.approx(out["gamma_k"])

    def test_bad_index_exit_2(self, tmp_path, capsys):
        path = write_config(tmp_path, ref_config())
        assert main(["nyquist", path, "--subsystem", "9",
                     "--out", str(tmp_path / "x")]) == 2


class TestDeterminism:
    def drop_timing(self, text):
        data = json.loads(text)
        data.pop("timing_seconds", None)
        return json.dumps(data, sort_keys=True)

    def test_analyze_byte_stable(self, tmp_path, capsys):
        path = write_config(tmp_path, ref_config())
        main(["analyze", path])
        first = capsys.readouterr().out
        main(["analyze", path])
        second = capsys.readouterr().out
        assert self.drop_timing(first) == self.drop_timing(second)

    def test_nyquist_byte_stable(self, tmp_path, capsys):
        path = write_config(tmp_path, ref_config())
        p1, p2 = str(tmp_path / "a"), str(tmp_path / "b")
        main(["nyquist", path, "--subsystem", "1", "--out", p1])
        main(["nyquist", path, "--subsystem", "1", "--out", p2])
        capsys.readouterr()
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()

    def test_config_round_trip(self, tmp_path):
        cfg = parse_config(ref_config())
        cfg2 = parse_config(config_to_jsonable(cfg))
        r1 = run_analysis(cfg)
        r2 = run_analysis(cfg2)
        r1.pop("timing_seconds")
        r2.pop("timing_seconds")
        assert json.dumps(r1, sort_keys=True) == json.dumps(r2, sort_keys=True)

import json
import subprocess
import sys

import pytest

from dg2.cli import main


def run_cli(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr().out
    return code, out


class TestVerifyCommand:
    def test_single_preset_cy3(self, capsys):
        code, out = run_cli(capsys, "verify", "--preset", "cy3",
                            "--pairs", "20", "--triples", "30")
        assert code == 0
        payload = json.loads(out)
        assert payload["failed"] == 0
        names = [c["name"] for c in payload["checks"]]
        assert "cy3:dHYM solutions c ∈ {0,±√3}" in names
        statuses = {c["name"]: c["status"] for c in payload["checks"]}
        assert statuses["cy3:dHYM solutions c ∈ {0,±√3}"] == "pass"

    def test_all_presets(self, capsys):
        code, out = run_cli(capsys, "verify", "--all",
                            "--pairs", "20", "--triples", "30")
        assert code == 0
        payload = json.loads(out)
        assert payload["failed"] == 0
        assert payload["total"] >= 40

    def test_unknown_preset_usage_error(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["verify", "--preset", "bogus"])
        assert err.value.code == 2

    def test_q_flag(self, capsys):
        code, out = run_cli(
            capsys, "verify", "--preset", "hypersymplectic",
            "--q", "2", "1/2", "0", "1/2", "1", "0", "0", "0", "3",
            "--pairs", "10", "--triples", "10",
        )
        assert code == 0
        assert json.loads(out)["failed"] == 0

    def test_q_file(self, capsys, tmp_path):
        qfile = tmp_path / "q.txt"
        qfile.write_text("1 0 0\n0 2 0\n0 0 1\n")
        code, out = run_cli(
            capsys, "verify", "--preset", "hypersymplectic",
            "--q-file", str(qfile), "--pairs", "10", "--triples", "10",
        )
        assert code == 0

    def test_bad_q_count(self, capsys):
        qfile_args = ["verify", "--preset", "hypersymplectic", "--q-file"]
        code = None
        import tempfile, os
        with tempfile.NamedTemporaryFile("w", suffix=".txt", delete=False) as fh:
            fh.write("1 2 3")
            name = fh.name
        try:
            code = main(qfile_args + [name])
        finally:
            os.unlink(name)
        assert code == 2


class TestNearlyParallelCommand:
    def test_both_branches(self, capsys):
        code, out = run_cli(capsys, "nearly-parallel")
        assert code == 0
        payload = json.loads(out)
        assert payload == [
            {
                "epsilon": 1,
                "u": "1/5",
                "t": "1/5*sqrt(5)",
                "lambda": "12/5*sqrt(5)",
                "t_float": payload[0]["t_float"],
                "lambda_float": payload[0]["lambda_float"],
            },
            {
                "epsilon": -1,
                "u": "1/1",
                "t": "1",
                "lambda": "4",
                "t_float": 1.0,
                "lambda_float": 4.0,
            },
        ]
        assert abs(payload[0]["t_float"] - 0.4472135954999579) < 1e-15

    def test_single_epsilon(self, capsys):
        code, out = run_cli(capsys, "nearly-parallel", "--epsilon", "-1")
        assert code == 0
        assert len(json.loads(out)) == 1


class TestModuliCommand:
    def test_matches_documented_schema(self, capsys):
        code, out = run_cli(capsys, "moduli", "--epsilon", "-1", "--u", "1", "--k", "2")
        assert code == 0
        payload = json.loads(out)
        assert payload["epsilon"] == -1
        assert payload["u"] == "1/1"
        assert payload["k"] == 2
        assert payload["verified"] is True
        assert payload["branches"] == [
            {"type": "circle", "radius_sq": "7/4", "plane": "a3=0", "degenerate": False},
            {"type": "point_pair", "a3_sq": "3/4", "degenerate": False},
            {"type": "trivial"},
        ]

    def test_sphere_example(self, capsys):
        code, out = run_cli(capsys, "moduli", "--epsilon", "1", "--u", "1/5")
        assert code == 0
        payload = json.loads(out)
        assert payload["branches"][0] == {
            "type": "sphere", "radius_sq": "3/20", "degenerate": False,
        }

    def test_degenerate_boundary(self, capsys):
        code, out = run_cli(capsys, "moduli", "--epsilon", "1", "--u", "1/2")
        assert code == 0
        payload = json.loads(out)
        assert payload["branches"] == [{"type": "trivial", "degenerate": True}]

    def test_plain_equation(self, capsys):
        code, out = run_cli(
            capsys, "moduli", "--epsilon", "1", "--u", "1/2", "--equation", "g2"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["equation"] == "g2"
        assert payload["branches"][0] == {"type": "all"}

    def test_invalid_u(self, capsys):
        assert main(["moduli", "--epsilon", "1", "--u", "0"]) == 2
        assert main(["moduli", "--epsilon", "1", "--u=-1/2"]) == 2


class TestFunctionalCommand:
    def test_hessian_saddle(self, capsys):
        code, out = run_cli(
            capsys, "functional", "--epsilon", "-1", "--t", "1", "--hessian", "0", "0"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["class"] == "saddle"
        assert payload["degenerate"] is False

    def test_hessian_degenerate(self, capsys):
        code, out = run_cli(
            capsys, "functional", "--epsilon", "1", "--t", "0.7071067812",
            "--hessian", "0", "0",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["class"] == "degenerate"
        assert payload["degenerate"] is True
        assert payload["tolerance_based"] is True

    def test_critical_points(self, capsys):
        code, out = run_cli(
            capsys, "functional", "--epsilon", "1", "--t", "0.4472135955",
            "--critical", "--seeds", "40", "--rng", "7",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload
        for point in payload:
            assert point["grad_norm"] < 1e-10
            r2 = point["x"] ** 2 + point["y"] ** 2
            assert min(abs(r2), abs(r2 - 3 / 20)) < 1e-9
            assert set(point) == {"x", "y", "value", "class", "grad_norm", "branch"}

    def test_grid_csv(self, capsys):
        code, out = run_cli(
            capsys, "functional", "--epsilon", "1", "--t", "0.5",
            "--grid=-1:1:-1:1:3",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "x,y,F"
        assert len(lines) == 10
        origin = [l for l in lines[1:] if l.startswith("0,0,")]
        assert origin == ["0,0,0"]

    def test_invalid_t(self, capsys):
        assert main(["functional", "--epsilon", "1", "--t", "0",
                     "--hessian", "0", "0"]) == 2

    def test_missing_mode_flag(self):
        with pytest.raises(SystemExit) as err:
            main(["functional", "--epsilon", "1", "--t", "1"])
        assert err.value.code == 2


class TestScanCommand:
    def test_rows(self, capsys):
        code, out = run_cli(
            capsys, "scan", "--epsilon", "-1", "--k", "0", "--u-range", "0.25:0.75:3"
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "t,branch,r"
        branches = [l.split(",")[1] for l in lines[1:]]
        assert branches == ["circle", "point_pair", "circle", "circle"]

    def test_sphere_only_for_plus(self, capsys):
        code, out = run_cli(
            capsys, "scan", "--epsilon", "1", "--u-range", "0.01:0.49:49"
        )
        assert code == 0
        lines = out.strip().splitlines()[1:]
        assert len(lines) == 49
        assert all(l.split(",")[1] == "sphere" for l in lines)
        radii = [float(l.split(",")[2]) for l in lines]
        assert radii == sorted(radii, reverse=True)

    def test_malformed_range(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["scan", "--epsilon", "1", "--u-range", "0.5:0.1:5"])
        assert err.value.code == 2
        with pytest.raises(SystemExit) as err:
            main(["scan", "--epsilon", "1", "--u-range", "nope"])
        assert err.value.code == 2


class TestDeterminismAndIO:
    def test_byte_identical_reruns(self, capsys):
        args = ["functional", "--epsilon", "1", "--t", "0.4472135955",
                "--critical", "--seeds", "30", "--rng", "3"]
        _, first = run_cli(capsys, *args)
        _, second = run_cli(capsys, *args)
        assert first == second

    def test_threads_do_not_change_output(self, capsys, monkeypatch):
        args = ["functional", "--epsilon", "-1", "--t", "0.8", "--grid=-1:1:-1:1:5"]
        monkeypatch.setenv("DG2_THREADS", "1")
        _, serial = run_cli(capsys, *args)
        monkeypatch.setenv("DG2_THREADS", "4")
        _, threaded = run_cli(capsys, *args)
        assert serial == threaded

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "scan.csv"
        code = main(["scan", "--epsilon", "1", "--u-range", "0.1:0.4:4",
                     "--output", str(target)])
        assert code == 0
        assert target.read_text().startswith("t,branch,r\n")

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "dg2", "--help"], capture_output=True, text=True
        )
        assert proc.returncode == 0
        assert "verify" in proc.stdout

    def test_module_entry_point_moduli(self):
        proc = subprocess.run(
            [sys.executable, "-m", "dg2", "moduli", "--epsilon", "1", "--u", "1/5"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["u"] == "1/5"

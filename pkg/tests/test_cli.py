"""CLI behaviour: subcommands, exit codes, output determinism."""

import json
import subprocess
import sys

from cpgames.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSolve:
    def test_bos_human(self, capsys):
        code, out, err = run(capsys, "solve", "bos")
        assert code == 0 and err == ""
        assert "3 equilibria" in out
        assert "x=(3/5, 2/5)" in out and "y=(2/5, 3/5)" in out

    def test_pd_json(self, capsys):
        code, out, _ = run(capsys, "solve", "pd", "--json")
        assert code == 0
        doc = json.loads(out)
        assert len(doc) == 1
        assert doc[0]["x"] == ["0", "1"] and doc[0]["y"] == ["0", "1"]
        assert doc[0]["strict"] is True

    def test_float_mode(self, capsys):
        code, out, _ = run(capsys, "solve", "bos", "--float", "--json")
        assert code == 0
        doc = json.loads(out)
        assert len(doc) == 3
        mixed = [e for e in doc if len(e["support_x"]) == 2][0]
        assert abs(mixed["x"][0] - 0.6) < 1e-9

    def test_missing_game(self, capsys):
        code, _, err = run(capsys, "solve", "nonexistent.json")
        assert code == 2
        assert err.startswith("error: input:")


class TestUsage:
    def test_no_subcommand(self, capsys):
        code, _, err = run(capsys)
        assert code == 1 and err.startswith("error: usage:")

    def test_unknown_flag(self, capsys):
        code, _, err = run(capsys, "solve", "bos", "--bogus")
        assert code == 1 and err.startswith("error: usage:")

    def test_unknown_subcommand(self, capsys):
        code, _, err = run(capsys, "frobnicate")
        assert code == 1


class TestDecompose:
    def test_bos_agreement(self, capsys):
        code, out, _ = run(capsys, "decompose", "bos")
        assert code == 0
        assert "reconstructed equilibria: 3" in out
        assert "agreement: true" in out

    def test_report_file(self, tmp_path, capsys):
        path = tmp_path / "report.json"
        code, out, _ = run(capsys, "decompose", "leduc_empirical", "--report", str(path))
        assert code == 0
        doc = json.loads(path.read_text())
        assert doc["agreement"] is True
        assert len(doc["reconstructed"]) == 1
        assert doc["reconstructed"][0]["x"] == ["29/35", "0", "6/35"]
        assert doc["reconstructed"][0]["y"] == ["9/28", "0", "19/28"]

    def test_no_verify(self, capsys):
        code, out, _ = run(capsys, "decompose", "pd", "--no-verify")
        assert code == 0 and "agreement: skipped" in out

    def test_bundled_games_never_exit_theorem(self, capsys):
        for name in ("pd", "bos", "rps", "bos_extended", "leduc_empirical", "fullsupport"):
            code, _, err = run(capsys, "decompose", name)
            assert code == 0, (name, err)


class TestCounterparts:
    def test_writes_single_games(self, tmp_path, capsys):
        code, out, _ = run(capsys, "counterparts", "bos", "--out", str(tmp_path))
        assert code == 0
        cp1 = json.loads((tmp_path / "bos_cp1.json").read_text())
        cp2 = json.loads((tmp_path / "bos_cp2.json").read_text())
        assert cp1["payoffs"] == [[3, 0], [0, 2]]
        assert cp2["payoffs"] == [[2, 0], [0, 3]]
        assert cp2["actions"] == ["O", "M"]


class TestRestpoints:
    def test_extended_bos_cp2(self, capsys):
        code, out, _ = run(capsys, "restpoints", "bos_extended", "--counterpart", "2")
        assert code == 0
        assert "4 rest points" in out
        assert out.count("not-nash") == 2

    def test_requires_counterpart(self, capsys):
        code, _, err = run(capsys, "restpoints", "bos_extended")
        assert code == 1


class TestDynamics:
    def test_writes_csv(self, tmp_path, capsys):
        out_path = tmp_path / "traj.csv"
        code, out, _ = run(capsys, "dynamics", "pd", "--system", "coupled",
                           "--init", "0.9,0.1;0.9,0.1", "--dt", "0.01",
                           "--t-max", "1", "--out", str(out_path))
        assert code == 0
        lines = out_path.read_text().strip().split("\n")
        assert lines[0] == "t,x1,x2,y1,y2" and len(lines) == 102

    def test_cp_system(self, tmp_path, capsys):
        out_path = tmp_path / "cp.csv"
        code, _, _ = run(capsys, "dynamics", "rps", "--system", "cp1",
                         "--init", "0.5,0.3,0.2", "--t-max", "1", "--out", str(out_path))
        assert code == 0
        assert out_path.read_text().startswith("t,x1,x2,x3\n")

    def test_bad_init_exits_2(self, tmp_path, capsys):
        for bad in ("0.5,0.6;0.5,0.5", "0.9,0.1", "-0.1,1.1;0.5,0.5", "a,b;0.5,0.5"):
            code, _, err = run(capsys, "dynamics", "pd", "--system", "coupled",
                               f"--init={bad}", "--out", str(tmp_path / "x.csv"))
            assert code == 2, bad
            assert err.startswith("error: input:")


class TestPlot:
    def test_square_and_simplex(self, tmp_path, capsys):
        sq = tmp_path / "pd.svg"
        code, _, _ = run(capsys, "plot", "pd", "--kind", "square", "--out", str(sq),
                         "--trajectories", "0.9,0.1,0.9,0.1")
        assert code == 0 and sq.read_text().startswith("<svg")
        tri = tmp_path / "cp1.svg"
        code, _, _ = run(capsys, "plot", "leduc_empirical", "--kind", "cp1",
                         "--out", str(tri))
        assert code == 0
        svg = tri.read_text()
        assert svg.count('<circle class="marker-nash-stable"') == 1

    def test_square_on_3x3_exits_2(self, tmp_path, capsys):
        code, _, err = run(capsys, "plot", "rps", "--kind", "square",
                           "--out", str(tmp_path / "x.svg"))
        assert code == 2


class TestVerify:
    def test_small_run(self, capsys):
        code, out, _ = run(capsys, "verify", "--trials", "15", "--size", "2", "--seed", "3")
        assert code == 0
        assert "pass (0 counterexamples)" in out


class TestDeterminism:
    def test_stdout_byte_identical(self, capsys):
        for argv in (["solve", "bos", "--json"],
                     ["decompose", "bos_extended"],
                     ["restpoints", "fullsupport", "--counterpart", "1"],
                     ["verify", "--trials", "10", "--size", "2", "--seed", "5"]):
            _, out1, _ = run(capsys, *argv)
            _, out2, _ = run(capsys, *argv)
            assert out1 == out2, argv

    def test_files_byte_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        for path in (a, b):
            run(capsys, "plot", "bos", "--kind", "square", "--out", str(path))
        assert a.read_bytes() == b.read_bytes()
        c, d = tmp_path / "c.csv", tmp_path / "d.csv"
        for path in (c, d):
            run(capsys, "dynamics", "bos", "--system", "coupled",
                "--init", "0.7,0.3;0.2,0.8", "--t-max", "2", "--out", str(path))
        assert c.read_bytes() == d.read_bytes()


class TestModuleEntry:
    def test_python_dash_m(self, tmp_path):
        proc = subprocess.run([sys.executable, "-m", "cpgames", "solve", "pd", "--json"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)[0]["x"] == ["0", "1"]

    def test_parse_game_file_from_disk(self, tmp_path):
        path = tmp_path / "game.json"
        path.write_text('{"name": "t", "row_actions": ["a", "b"], "col_actions": ["c", "d"],'
                        '"row_payoffs": [[1, 0], [0, 1]], "col_payoffs": [[1, 0], [0, 1]]}')
        proc = subprocess.run([sys.executable, "-m", "cpgames", "solve", str(path)],
                              capture_output=True, text=True)
        assert proc.returncode == 0 and "3 equilibria" in proc.stdout

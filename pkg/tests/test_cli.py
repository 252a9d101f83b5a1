import io
import subprocess
import sys

import pytest

from qss import cli

GHZ_TEXT = "# GHZ\nacin\n0.7071067811865476 0 0 0 0.7071067811865476 0\n"


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def ghz_file(tmp_path):
    path = tmp_path / "ghz.state"
    path.write_text(GHZ_TEXT)
    return str(path)


def table_value(text, label):
    for line in text.splitlines():
        parts = line.split()
        if line.startswith(label + " ") and parts:
            return parts[-1]
    raise KeyError(label)


class TestFormatting:
    @pytest.mark.parametrize("x, s", [(1.0, "1.0"), (2 / 3, "0.666666666667"),
                                      (2 ** 0.5 + 1, "2.414213562373"), (0.9999999999999998, "1.0"),
                                      (-4e-16, "0.0"), (2.5, "2.5"), (None, "n/a"), (True, "true")])
    def test_fmt(self, x, s):
        assert cli.fmt(x) == s


class TestAnalyze:
    def test_ghz_table(self, ghz_file):
        code, out, _ = run(["analyze", ghz_file])
        assert code == 0
        assert table_value(out, "F_max") == "0.666666666667"
        assert table_value(out, "F_CSR") == "1.0"
        assert table_value(out, "S_max") == "2.0"
        assert table_value(out, "secret_shareable") == "true"

    def test_ghz_key_value(self, ghz_file):
        code, out, _ = run(["analyze", ghz_file, "--json"])
        assert code == 0
        lines = out.splitlines()
        assert len(lines) == 1
        pairs = dict(kv.split("=", 1) for kv in lines[0].split())
        assert list(pairs) == list(cli.analysis.CSV_COLUMNS[1:])
        assert pairs["f_csr"] == "1" and pairs["secret_shareable"] == "true"

    def test_amplitude_file_has_empty_params(self, tmp_path):
        path = tmp_path / "s.state"
        path.write_text("amplitudes\n1 0\n" + "0 0\n" * 7)
        code, out, _ = run(["analyze", str(path), "--json"])
        assert code == 0 and "l0= " in out and "secret_shareable=false" in out

    def test_missing_file(self, tmp_path):
        code, out, err = run(["analyze", str(tmp_path / "nope.state")])
        assert code == 1 and out == "" and "error" in err

    @pytest.mark.parametrize("text", ["acin\n1 1 0 0 0 0\n", "garbage\n", "amplitudes\n1 0\n"])
    def test_malformed(self, tmp_path, text):
        path = tmp_path / "bad.state"
        path.write_text(text)
        assert run(["analyze", str(path)])[0] == 1


class TestUsage:
    @pytest.mark.parametrize("argv", [[], ["frobnicate"], ["sweep", "--n", "0", "--seed", "1", "--out", "x"],
                                      ["sweep", "--seed", "1", "--out", "x"], ["figure", "pie", "--n", "1",
                                                                               "--seed", "1", "--out", "x"]])
    def test_usage_errors_exit_1(self, argv):
        code, _, err = run(argv)
        assert code == 1 and err


class TestSweep:
    def test_deterministic_bytes(self, tmp_path, monkeypatch):
        a, b, c = (tmp_path / n for n in ("a.csv", "b.csv", "c.csv"))
        assert run(["sweep", "--n", "40", "--seed", "5", "--phase", "--out", str(a)])[0] == 0
        assert run(["sweep", "--n", "40", "--seed", "5", "--phase", "--out", str(b), "--workers", "2"])[0] == 0
        monkeypatch.setenv("QSS_WORKERS", "3")
        assert run(["sweep", "--n", "40", "--seed", "5", "--phase", "--out", str(c)])[0] == 0
        assert a.read_bytes() == b.read_bytes() == c.read_bytes()
        lines = a.read_text().splitlines()
        assert len(lines) == 41 and lines[0].startswith("idx,l0,")

    def test_unwritable_output(self, tmp_path):
        target = tmp_path / "missing-dir" / "x.csv"
        assert run(["sweep", "--n", "2", "--seed", "1", "--out", str(target)])[0] == 1


class TestFigure:
    @pytest.mark.parametrize("kind, xcol", [("rf-vs-tf", "f_max"), ("rf-vs-bell", "s_max")])
    def test_outputs(self, tmp_path, kind, xcol):
        prefix = str(tmp_path / "fig")
        assert run(["figure", kind, "--n", "30", "--seed", "2", "--out", prefix])[0] == 0
        data = (tmp_path / "fig.csv").read_text().splitlines()
        assert data[0].split(",")[1] == xcol and len(data) == 32
        assert data[-1].endswith(",ghz")
        boundary = (tmp_path / "fig.boundary.csv").read_text().splitlines()
        assert len(boundary) == 201
        script = (tmp_path / "fig.gp").read_text()
        assert "fig.csv" in script and "fig.boundary.csv" in script and "ghz" in script

    def test_deterministic(self, tmp_path):
        for name in ("a", "b"):
            run(["figure", "rf-vs-tf", "--n", "25", "--seed", "9", "--out", str(tmp_path / name)])
        for ext in (".csv", ".boundary.csv", ".gp"):
            assert (tmp_path / ("a" + ext)).read_text().replace("a.", "X.") == \
                (tmp_path / ("b" + ext)).read_text().replace("b.", "X.")


class TestVerify:
    def test_clean(self):
        code, out, _ = run(["verify", "--n", "300", "--seed", "7", "--phase"])
        assert code == 0
        assert out.count("violations: 0") == 3 and "samples: 300" in out

    def test_counterexample_dump(self):
        # an absurd tolerance turns every premise hit into a reported violation
        code, out, _ = run(["verify", "--n", "300", "--seed", "7", "--tol", "-5"])
        assert code == 2
        assert "counterexamples:" in out and "idx=" in out


class TestMsr:
    def test_grid_91(self):
        code, out, _ = run(["msr", "--grid", "91"])
        assert code == 0
        rows = [line.split() for line in out.splitlines()[1:-1]]
        assert len(rows) == 91
        row45 = next(r for r in rows if r[0] == "45.0")
        assert row45[2] == "2.414213562373"

    def test_single_point(self):
        code, out, _ = run(["msr", "--grid", "1"])
        assert code == 0 and len(out.splitlines()) == 3


class TestOracle:
    def test_csr(self, ghz_file):
        code, out, _ = run(["oracle", "csr", ghz_file])
        assert code == 0 and "agree" in out

    def test_teleport(self, ghz_file):
        code, out, _ = run(["oracle", "teleport", ghz_file, "--mc", "20000", "--seed", "3"])
        assert code == 0 and out.count("agree") == 2

    def test_bad_file(self, tmp_path):
        assert run(["oracle", "csr", str(tmp_path / "x")])[0] == 1


def test_module_entry_point(ghz_file):
    proc = subprocess.run([sys.executable, "-m", "qss", "analyze", ghz_file, "--json"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "f_max=0.666666666667" in proc.stdout

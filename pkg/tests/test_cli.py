import csv
import io
import subprocess
import sys

import pytest

from secisac import specfile
from secisac.canonical import bec_bsc_channel, bernoulli_noiseless_channel
from secisac.cli import CSV_HEADER, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestCheck:
    def test_lemma1_degraded(self, capsys):
        code, out, _ = run(capsys, "check", "--example", "lemma1", "--which", "degraded")
        assert code == 0
        assert out.splitlines()[0] == "physically-degraded: yes"
        assert "verdict=yes" in out and "probes=21" in out

    def test_becbsc_more_capable(self, capsys):
        code, out, _ = run(capsys, "check", "--example", "becbsc", "--gamma", "0.3", "--beta", "0.1",
                           "--alpha", "0.5", "--which", "more-capable")
        assert code == 0 and out.startswith("more-capable: yes")
        assert "resolution=1001" in out

    def test_reverse(self, capsys):
        code, out, _ = run(capsys, "check", "--example", "lemma1", "--which", "reverse-degraded")
        assert code == 0 and out.startswith("reversely-degraded: no")

    def test_malformed_spec(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"alphabets": {"X": [0, 1]},\n "oops"}')
        code, _, err = run(capsys, "check", "--spec", str(bad), "--which", "degraded")
        assert code != 0 and "line 2" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "check", "--spec", str(tmp_path / "none.json"), "--which", "degraded")
        assert code == 1 and "cannot read" in err

    def test_needs_a_source(self, capsys):
        code, _, err = run(capsys, "check", "--which", "degraded")
        assert code == 1 and "exactly one" in err

    def test_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["check", "--which", "sideways"])
        assert exc.value.code == 2


class TestRegion:
    def test_two_vertices(self, capsys):
        code, out, _ = run(capsys, "region", "--example", "lemma1", "--bound", "theorem3", "--res", "2")
        assert code == 0
        assert out.splitlines()[0] == CSV_HEADER
        r = rows(out)
        assert [(x["p_or_params"], x["R2_or_R"], x["D1"], x["D2"]) for x in r] == [
            ("0", "0", "0.35", "0.1365"), ("1", "0", "0", "0")]

    def test_fig2_dataset_sorted(self, capsys, tmp_path):
        path = tmp_path / "joint.csv"
        code, _, _ = run(capsys, "region", "--example", "lemma1", "--q", "0.65", "--alpha", "0.21",
                         "--bound", "lemma1", "--res", "1001", "--output", str(path))
        r = rows(path.read_text())
        assert code == 0 and len(r) == 1001
        ps = [float(x["p_or_params"]) for x in r]
        assert ps == sorted(ps)
        assert {x["provenance"] for x in r} == {"lemma1"}

    def test_lemma3_curve(self, capsys):
        code, out, _ = run(capsys, "region", "--example", "becbsc", "--bound", "lemma3", "--res", "3")
        r = rows(out)
        assert code == 0 and [x["D1"] for x in r] == ["0.35", "0.2275", "0.105"]

    def test_lemma3_premise(self, capsys):
        code, _, err = run(capsys, "region", "--example", "becbsc", "--bound", "lemma3",
                           "--alpha", "1", "--gamma", "0.99", "--beta", "0.01", "--res", "3")
        assert code == 1 and "threshold" in err

    def test_wrong_example_for_closed_form(self, capsys):
        code, _, err = run(capsys, "region", "--example", "becbsc", "--bound", "lemma1")
        assert code == 1

    def test_resource_cap(self, capsys):
        code, _, err = run(capsys, "region", "--example", "becbsc", "--bound", "inner-ps",
                           "--res", "101", "--kernel-res", "11", "--card-v", "3", "--card-u", "3",
                           "--max-evals", "1000")
        assert code == 1 and "estimated" in err

    def test_deterministic(self, capsys):
        args = ("region", "--example", "becbsc", "--bound", "inner-full", "--res", "5",
                "--kernel-res", "3", "--card-v", "3", "--pareto")
        assert run(capsys, *args)[1] == run(capsys, *args)[1]

    def test_precondition_warning(self, capsys):
        code, _, err = run(capsys, "region", "--example", "becbsc", "--bound", "theorem3", "--res", "3")
        assert code == 0 and "warning: channel is not physically-degraded" in err

    def test_nats(self, capsys):
        a = rows(run(capsys, "region", "--example", "lemma1", "--bound", "theorem3", "--res", "3")[1])
        b = rows(run(capsys, "region", "--example", "lemma1", "--bound", "theorem3", "--res", "3",
                     "--nats")[1])
        assert float(b[1]["R2_or_R"]) == pytest.approx(float(a[1]["R2_or_R"]) * 0.6931471805599453,
                                                       rel=1e-11)


class TestFigure2:
    def test_dominance(self, capsys, tmp_path):
        prefix = str(tmp_path / "fig2")
        code, out, _ = run(capsys, "figure2", "--q", "0.65", "--alpha", "0.21", "--output", prefix)
        assert code == 0
        report = dict(kv.split("=") for kv in out.split()[1:])
        assert float(report["dominated_fraction"]) > 0
        assert float(report["best_gap"]) > 1e-3
        joint = rows(open(prefix + "_joint.csv").read())
        sep = rows(open(prefix + "_separation.csv").read())
        ends = {(x["R2_or_R"], x["D1"], x["D2"]) for x in (sep[0], sep[-1])}
        joint_pts = {(x["R2_or_R"], x["D1"], x["D2"]) for x in joint}
        assert ends <= joint_pts

    def test_q_zero(self, capsys, tmp_path):
        prefix = str(tmp_path / "z")
        code, out, _ = run(capsys, "figure2", "--q", "0", "--res", "11", "--output", prefix)
        assert code == 0 and "dominated_fraction=0 " in out
        for suffix in ("_joint.csv", "_separation.csv"):
            assert all(x["R2_or_R"] == "0" and x["D1"] == "0" for x in rows(open(prefix + suffix).read()))

    def test_bad_parameter(self, capsys):
        code, _, err = run(capsys, "figure2", "--q", "1.5")
        assert code == 1


class TestSimulateExport:
    def test_simulate_record(self, capsys):
        code, out, _ = run(capsys, "simulate", "--example", "lemma1", "--p", "0.5", "--n", "20000",
                           "--seed", "3")
        assert code == 0
        assert "seed=3" in out and "generator=numpy.random.PCG64" in out
        assert out == run(capsys, "simulate", "--example", "lemma1", "--p", "0.5", "--n", "20000",
                          "--seed", "3")[1]

    def test_simulate_mi(self, capsys):
        code, out, _ = run(capsys, "simulate", "--example", "becbsc", "--n", "1000", "--mi",
                           "--observe", "own")
        assert code == 0 and "plugin_I_X_Y1_given_S1=" in out

    @pytest.mark.parametrize("name,make", [("lemma1", lambda: bernoulli_noiseless_channel(0.65, 0.21)),
                                           ("becbsc", lambda: bec_bsc_channel(0.65, 0.5, 0.3, 0.1))])
    def test_export_round_trip(self, capsys, tmp_path, name, make):
        path = tmp_path / f"{name}.json"
        assert run(capsys, "export", "--example", name, "--output", str(path))[0] == 0
        assert specfile.load(path).channel == make()
        code, out, _ = run(capsys, "check", "--spec", str(path), "--which", "degraded")
        assert code == 0

    def test_console_entry_point(self, tmp_path):
        proc = subprocess.run([sys.executable, "-m", "secisac.cli", "check", "--example", "lemma1",
                               "--which", "degraded"], capture_output=True, text=True)
        assert proc.returncode == 0 and proc.stdout.startswith("physically-degraded: yes")

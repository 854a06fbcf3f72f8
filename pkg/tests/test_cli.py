import json
import math
import subprocess
import sys

import numpy as np
import pytest

from spinboson.cli import main


def write(path, text):
    path.write_text(text)
    return str(path)


BATH_D1 = "[bath]\nd = 1\nlambda = 0.25\ntheta = 0.0\n"
BATH_D3_T1 = "[bath]\nd = 3\nlambda = 1.0\ntheta = 1.0\n"


class TestConfigValidation:
    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = write(tmp_path / "c.ini", BATH_D1 + "[free_decay]\ntau_max = 5\nbogus = 1\n")
        assert main(["free-decay", "--config", cfg]) == 2
        assert "bogus" in capsys.readouterr().err

    def test_unknown_section_rejected(self, tmp_path, capsys):
        cfg = write(tmp_path / "c.ini", BATH_D1 + "[wat]\nx = 1\n")
        assert main(["free-decay", "--config", cfg]) == 2

    def test_missing_required_key(self, tmp_path, capsys):
        cfg = write(tmp_path / "c.ini", BATH_D1 + "[free_decay]\nn_samples = 5\n")
        assert main(["free-decay", "--config", cfg]) == 2
        assert "tau_max" in capsys.readouterr().err

    def test_missing_file(self, capsys):
        assert main(["free-decay", "--config", "/nonexistent.ini"]) == 2

    def test_bad_value_type(self, tmp_path):
        cfg = write(tmp_path / "c.ini", BATH_D1 + "[free_decay]\ntau_max = soon\n")
        assert main(["free-decay", "--config", cfg]) == 2

    def test_no_partial_output_on_error(self, tmp_path):
        out = tmp_path / "out.csv"
        cfg = write(
            tmp_path / "c.ini",
            "[bath]\nd = 1\nlambda = 0.25\n[free_decay]\ntau_max = 5\ndisplacement = stationary\n",
        )
        assert main(["free-decay", "--config", cfg, "--out", str(out)]) == 3
        assert not out.exists()


class TestFreeDecay:
    def test_matches_log_law(self, tmp_path):
        out = tmp_path / "fd.csv"
        cfg = write(
            tmp_path / "c.ini", BATH_D1 + "[free_decay]\ntau_max = 10\nn_samples = 41\n"
        )
        assert main(["free-decay", "--config", cfg, "--out", str(out)]) == 0
        rows = out.read_text().strip().split("\n")
        assert rows[0] == "tau,gamma,phi,dtheta,eta_re,eta_im,eta_abs"
        data = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
        expected = 0.25 * np.log1p(data[:, 0] ** 2)
        assert np.max(np.abs(data[:, 1] - expected)) < 1e-6

    def test_zero_coupling_not_allowed_elsewhere_lambda_small(self, tmp_path):
        # lam -> 0+ gives gamma -> 0 and eta_abs -> 1
        out = tmp_path / "fd.csv"
        cfg = write(
            tmp_path / "c.ini",
            "[bath]\nd = 1\nlambda = 1e-12\n[free_decay]\ntau_max = 5\nn_samples = 11\n",
        )
        assert main(["free-decay", "--config", cfg, "--out", str(out)]) == 0
        data = np.array(
            [[float(v) for v in r.split(",")] for r in out.read_text().strip().split("\n")[1:]]
        )
        assert np.all(data[:, 1] < 1e-11)
        assert np.all(np.abs(data[:, 6] - 1.0) < 1e-11)

    def test_divergent_stationary_request_exits_3(self, tmp_path, capsys):
        cfg = write(
            tmp_path / "c.ini",
            BATH_D1 + "[free_decay]\ntau_max = 5\ndisplacement = stationary\n",
        )
        assert main(["free-decay", "--config", cfg]) == 3
        record = json.loads(capsys.readouterr().err)
        assert record["error"] == "divergent"

    def test_temperature_ordering(self, tmp_path):
        gammas = {}
        for theta in (0.01, 1.0):
            out = tmp_path / f"fd_{theta}.csv"
            cfg = write(
                tmp_path / f"c_{theta}.ini",
                f"[bath]\nd = 1\nlambda = 0.25\ntheta = {theta}\n"
                "[free_decay]\ntau_max = 5\nn_samples = 21\n",
            )
            assert main(["free-decay", "--config", cfg, "--out", str(out)]) == 0
            data = np.array(
                [[float(v) for v in r.split(",")] for r in out.read_text().strip().split("\n")[1:]]
            )
            gammas[theta] = data[:, 1]
        assert np.all(gammas[1.0] >= gammas[0.01] - 1e-12)

    def test_determinism(self, tmp_path):
        cfg = write(
            tmp_path / "c.ini", BATH_D1 + "[free_decay]\ntau_max = 3\nn_samples = 7\n"
        )
        outs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            assert main(["free-decay", "--config", cfg, "--out", str(out)]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]


class TestGamma0:
    def test_zeta_anchor_record(self, tmp_path, capsys):
        cfg = write(tmp_path / "c.ini", BATH_D3_T1 + "[gamma0]\nmodel = single_qubit\n")
        assert main(["gamma0", "--config", cfg]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["gamma0"] == pytest.approx(math.pi**2 / 3 - 1, rel=1e-6)
        assert abs(record["difference"]) < 1e-6

    def test_weak_collective_j2(self, tmp_path, capsys):
        cfg = write(
            tmp_path / "c.ini",
            "[bath]\nd = 3\nlambda = 0.25\n[gamma0]\nmodel = weak_collective\nj = 2\n",
        )
        assert main(["gamma0", "--config", cfg]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["gamma0"] == pytest.approx(1.0, rel=1e-8)

    def test_divergent_exits_3(self, tmp_path, capsys):
        cfg = write(tmp_path / "c.ini", BATH_D1 + "[gamma0]\nmodel = single_qubit\n")
        assert main(["gamma0", "--config", cfg]) == 3
        record = json.loads(capsys.readouterr().err)
        assert record["gamma0"] == "divergent"


class TestBangBang:
    def test_trace_schema_and_ordering(self, tmp_path):
        out = tmp_path / "bb.csv"
        cfg = write(
            tmp_path / "c.ini",
            BATH_D1
            + "[bangbang]\ndt = 1.0\nn_cycles = 3\npoints_per_segment = 9\nthetas = 0.01 1.0\n",
        )
        assert main(["bangbang", "--config", cfg, "--out", str(out)]) == 0
        rows = out.read_text().strip().split("\n")
        assert rows[0] == "tau,gamma,eta_abs,protocol,dt,theta,d,lambda"
        protocols = {r.split(",")[3] for r in rows[1:]}
        thetas = {r.split(",")[5] for r in rows[1:]}
        assert protocols == {"standard", "sym_cp"}
        assert len(thetas) == 2

    def test_sym_beats_standard_at_readouts(self, tmp_path):
        out = tmp_path / "bb.csv"
        cfg = write(
            tmp_path / "c.ini",
            BATH_D1
            + "[bangbang]\ndt = 1.0\nn_cycles = 4\npoints_per_segment = 5\nthetas = 0.01\n",
        )
        assert main(["bangbang", "--config", cfg, "--out", str(out)]) == 0
        rows = [r.split(",") for r in out.read_text().strip().split("\n")[1:]]
        eta = {}
        for r in rows:
            eta.setdefault(r[3], {})[float(r[0])] = float(r[2])
        for n in (1, 2, 3, 4):
            t = 2.0 * n
            assert eta["sym_cp"][t] >= eta["standard"][t] - 1e-12

    def test_threads_agree_with_serial(self, tmp_path):
        cfg = write(
            tmp_path / "c.ini",
            BATH_D1
            + "[bangbang]\ndt = 0.5\nn_cycles = 2\npoints_per_segment = 5\nthetas = 0.01 1.0\n",
        )
        out1 = tmp_path / "s.csv"
        out2 = tmp_path / "p.csv"
        assert main(["bangbang", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["bangbang", "--config", cfg, "--out", str(out2), "--threads", "4"]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestSweep:
    def test_schema_and_error_ordering(self, tmp_path):
        out = tmp_path / "sw.csv"
        cfg = write(
            tmp_path / "c.ini",
            BATH_D1
            + "[sweep]\ntotal_time = 20\nfreq_min = 0.5\nfreq_max = 8\nn_freq = 7\nthetas = 0.01 1.0\n",
        )
        assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
        rows = out.read_text().strip().split("\n")
        assert rows[0] == "freq_ratio,n_cycles,eta_strob,eta_sym,theta"
        data = [r.split(",") for r in rows[1:]]
        assert len(data) == 14
        for r in data:
            assert float(r[3]) >= float(r[2]) - 1e-12  # sym >= standard

    def test_errors_decrease_with_frequency(self, tmp_path):
        out = tmp_path / "sw.csv"
        cfg = write(
            tmp_path / "c.ini",
            BATH_D1
            + "[sweep]\ntotal_time = 20\nfreq_min = 1\nfreq_max = 10\nn_freq = 6\nthetas = 0.01\n",
        )
        assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
        data = [r.split(",") for r in out.read_text().strip().split("\n")[1:]]
        errs = [1.0 - float(r[2]) for r in data]
        assert errs[-1] < errs[0]


class TestDfsReport:
    def test_single_qubit_d3(self, tmp_path, capsys):
        cfg = write(
            tmp_path / "c.ini",
            "[bath]\nd = 3\nlambda = 0.25\n[dfs]\nmodel = single_qubit\nlabels = up down\n",
        )
        assert main(["dfs-report", "--config", cfg]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["overall_df"] is True
        assert record["gamma0"] == pytest.approx(0.25, rel=1e-8)

    def test_single_qubit_d1_divergent(self, tmp_path, capsys):
        cfg = write(
            tmp_path / "c.ini",
            BATH_D1 + "[dfs]\nmodel = single_qubit\nlabels = up down\n",
        )
        assert main(["dfs-report", "--config", cfg]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["overall_df"] is False
        assert record["gamma0"] == "divergent"

    def test_individual_linear(self, tmp_path, capsys):
        cfg = write(
            tmp_path / "c.ini",
            "[bath]\nd = 1\nlambda = 0.5\ntheta = 1.0\n"
            "[dfs]\nmodel = individual_linear\nspins = ++-\nt_s = 0.7\nlabels = c0 c1\n",
        )
        assert main(["dfs-report", "--config", cfg]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["overall_df"] is True

    def test_displacements_break_phasing(self, tmp_path, capsys):
        cfg = write(
            tmp_path / "c.ini",
            "[bath]\nd = 3\nlambda = 0.25\n"
            "[dfs]\nmodel = single_qubit\nlabels = up down\ndisplacements = up=0.3,0.2 down=0.5\n",
        )
        assert main(["dfs-report", "--config", cfg]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["phasing_ok"] is False
        assert record["overall_df"] is False


class TestOracle:
    def test_record(self, tmp_path, capsys):
        cfg = write(
            tmp_path / "c.ini",
            "[bath]\nd = 3\nlambda = 1.0\n"
            "[oracle]\nmode_freqs = 0.7 1.3\nmode_weights = 0.4 0.6\ntheta = 0.3\ntau = 2.0\n"
            "bra_m = 1+0j 0.5+0.2j\nbra_b0 = 0.3+0.1j 0j\n"
            "brb_m = -1+0j -0.5-0.2j\nbrb_b0 = 0.2j 0.1+0j\n",
        )
        assert main(["oracle", "--config", cfg]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["converged"] is True
        assert record["difference"] < 1e-6

    def test_unconverged_exits_4(self, tmp_path, capsys):
        cfg = write(
            tmp_path / "c.ini",
            "[bath]\nd = 3\nlambda = 1.0\n"
            "[oracle]\nmode_freqs = 1.0\nmode_weights = 3.0\ntheta = 0.0\ntau = 0.0\nn_max = 1\n"
            "bra_m = 2+0j\nbra_b0 = 0j\nbrb_m = -2+0j\nbrb_b0 = 0j\n",
        )
        assert main(["oracle", "--config", cfg]) == 4


class TestEntryPoint:
    def test_console_script_runs(self, tmp_path):
        cfg = write(tmp_path / "c.ini", BATH_D3_T1 + "[gamma0]\nmodel = single_qubit\n")
        proc = subprocess.run(
            [sys.executable, "-m", "spinboson.cli", "gamma0", "--config", cfg],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["model"] == "single_qubit"

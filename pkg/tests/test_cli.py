import json

import numpy as np
import pytest

from pmdiff import ScalarField, write_pgm, write_csv_signal
from pmdiff.cli import main


def save_pgm(path, values):
    path.write_bytes(write_pgm(ScalarField(np.asarray(values, dtype=np.float64))))
    return str(path)


@pytest.fixture
def image(tmp_path):
    rng = np.random.default_rng(3)
    return save_pgm(tmp_path / "in.pgm", rng.uniform(0.0, 1.0, (12, 10)))


class TestRunCommand:
    def test_snapshots_metrics_and_manifest(self, tmp_path, image, capsys):
        out = tmp_path / "out"
        code = main(["run", image, "--iters", "12", "--snapshots", "0,3,9",
                     "--out-dir", str(out)])
        assert code == 0
        for name in ("out_00.pgm", "out_03.pgm", "out_09.pgm"):
            assert (out / name).exists()
        metrics = (out / "metrics.csv").read_text().strip().split("\n")
        assert metrics[0] == "iter,mean,variance,min,max,l1_ref"
        assert len(metrics) == 13
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "run"
        assert manifest["config"]["iters"] == 12
        assert manifest["config"]["scheme"] == "explicit"
        assert manifest["inputs"] == {"input": image}
        assert str(out / "metrics.csv") in manifest["outputs"]
        assert "12 iterations" in capsys.readouterr().out

    def test_custom_log_and_manifest_paths(self, tmp_path, image):
        log = tmp_path / "deep" / "m.csv"
        man = tmp_path / "deep" / "m.json"
        code = main(["run", image, "--iters", "2", "--out-dir", str(tmp_path / "o"),
                     "--log", str(log), "--manifest", str(man)])
        assert code == 0
        assert log.exists() and man.exists()

    def test_unstable_timestep_is_a_config_error(self, tmp_path, image, capsys):
        code = main(["run", image, "--tau", "0.3", "--out-dir", str(tmp_path / "o")])
        assert code == 1
        err = capsys.readouterr().err
        assert err.startswith("error:") and "0.25" in err

    def test_allow_unstable_flag_bypasses_the_check(self, tmp_path):
        path = save_pgm(tmp_path / "flat.pgm", np.full((4, 4), 128 / 255))
        code = main(["run", path, "--tau", "0.3", "--allow-unstable",
                     "--iters", "5", "--out-dir", str(tmp_path / "o")])
        assert code == 0

    def test_missing_input_file(self, tmp_path, capsys):
        code = main(["run", str(tmp_path / "nope.pgm"), "--out-dir", str(tmp_path)])
        assert code == 2
        assert capsys.readouterr().err.startswith("error:")

    def test_unknown_extension(self, tmp_path, capsys):
        p = tmp_path / "field.txt"
        p.write_text("0 1 2")
        assert main(["run", str(p), "--out-dir", str(tmp_path)]) == 1
        assert "expected .pgm" in capsys.readouterr().err

    def test_bad_snapshot_list(self, tmp_path, image):
        assert main(["run", image, "--snapshots", "1,x", "--out-dir", str(tmp_path)]) == 1

    def test_unknown_scheme_name(self, tmp_path, image, capsys):
        assert main(["run", image, "--scheme", "bogus", "--out-dir", str(tmp_path)]) == 1
        assert "bogus" in capsys.readouterr().err

    def test_semi_implicit_fixes_constants(self, tmp_path):
        inp = tmp_path / "c.pgm"
        save_pgm(inp, np.full((6, 5), 128 / 255))
        out = tmp_path / "o"
        code = main(["run", str(inp), "--scheme", "semi-implicit", "--tau", "10",
                     "--iters", "5", "--snapshots", "5", "--out-dir", str(out)])
        assert code == 0
        assert (out / "out_5.pgm").read_bytes() == inp.read_bytes()

    def test_csv_signal_round_trip(self, tmp_path):
        inp = tmp_path / "sig.csv"
        x = np.arange(32, dtype=np.float64)
        sig = ScalarField(np.exp(-((x - 16.0) ** 2) / 18.0))
        inp.write_text(write_csv_signal(sig))
        out = tmp_path / "o"
        code = main(["run", str(inp), "--iters", "4", "--snapshots", "4",
                     "--out-dir", str(out)])
        assert code == 0
        snap = (out / "out_4.csv").read_text()
        assert len(snap.strip().split("\n")) == 32

    def test_solver_failure_exit_code(self, tmp_path, image, capsys):
        code = main(["run", image, "--scheme", "semi-implicit", "--tau", "50",
                     "--solver-tol", "1e-14", "--solver-maxit", "1",
                     "--iters", "1", "--out-dir", str(tmp_path / "o")])
        assert code == 3
        assert capsys.readouterr().err.startswith("error:")

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_blowup_exit_code(self, tmp_path, capsys):
        yy, xx = np.mgrid[0:16, 0:16]
        path = save_pgm(tmp_path / "board.pgm", np.where((yy + xx) % 2 == 0, 1.0, 0.0))
        code = main(["run", path, "--scheme", "gaussian", "--tau", "0.3",
                     "--allow-unstable", "--iters", "3000",
                     "--out-dir", str(tmp_path / "o")])
        assert code == 3
        assert "iteration" in capsys.readouterr().err

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert capsys.readouterr().out.startswith("pmdiff ")


class TestNoiseCommand:
    def test_deterministic_output_and_manifest(self, tmp_path, image):
        a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
        assert main(["noise", image, "--out", str(a), "--snr", "2", "--seed", "11"]) == 0
        assert main(["noise", image, "--out", str(b), "--snr", "2", "--seed", "11"]) == 0
        assert a.read_bytes() == b.read_bytes()
        manifest = json.loads((tmp_path / "a.pgm.manifest.json").read_text())
        assert manifest["seed"] == 11
        assert manifest["config"] == {"snr": 2.0}

    def test_seed_changes_output(self, tmp_path, image):
        a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
        main(["noise", image, "--out", str(a), "--snr", "2", "--seed", "1"])
        main(["noise", image, "--out", str(b), "--snr", "2", "--seed", "2"])
        assert a.read_bytes() != b.read_bytes()


class TestCheckOperatorCommand:
    def test_reports_all_pass(self, image, capsys):
        assert main(["check-operator", image]) == 0
        out = capsys.readouterr().out
        lines = out.strip().split("\n")
        assert lines[0].startswith("P1: PASS")
        for name in ("P2", "P3", "P4", "P5"):
            assert any(ln.startswith(f"{name}: PASS") for ln in lines)

    def test_kv_output(self, image, capsys):
        assert main(["check-operator", image, "--kv"]) == 0
        out = capsys.readouterr().out
        assert "p1_pass=1" in out and "p2_max_asym=0" in out


class TestDenoiseExperimentCommand:
    def test_generates_noise_curves_and_manifest(self, tmp_path, capsys):
        img = np.full((24, 24), 0.2)
        img[6:18, 6:18] = 0.8
        clean = save_pgm(tmp_path / "clean.pgm", img)
        out = tmp_path / "exp"
        code = main(["denoise-experiment", "--clean", clean, "--snr", "2",
                     "--seed", "1", "--schemes", "explicit,regularized",
                     "--lambda", "0.05", "--max-iters", "60",
                     "--out-dir", str(out)])
        assert code == 0
        assert (out / "noisy.pgm").exists()
        for scheme in ("explicit", "regularized"):
            curve = (out / f"curve_{scheme}.csv").read_text().strip().split("\n")
            assert curve[0] == "iter,l1,relative"
            assert curve[1].startswith("0,")
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "denoise-experiment"
        assert manifest["config"]["schemes"] == ["explicit", "regularized"]
        stdout = capsys.readouterr().out
        assert "explicit: stop_iter=" in stdout
        assert "rel_min_error=" in stdout

    def test_requires_noise_source(self, tmp_path, image, capsys):
        assert main(["denoise-experiment", "--clean", image]) == 1
        assert "--noisy" in capsys.readouterr().err

    def test_accepts_premade_noisy_field(self, tmp_path, image, capsys):
        noisy = tmp_path / "n.pgm"
        main(["noise", image, "--out", str(noisy), "--snr", "2", "--seed", "4"])
        code = main(["denoise-experiment", "--clean", image, "--noisy", str(noisy),
                     "--schemes", "explicit", "--lambda", "0.05", "--max-iters", "30"])
        assert code == 0
        assert "stop_iter=" in capsys.readouterr().out

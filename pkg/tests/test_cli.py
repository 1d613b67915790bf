import json

import numpy as np
import pytest

from maskcorr.components.cli import build_parser, config_from_args, run_cli
from maskcorr.main import main
from maskcorr.services.quantum import DensityMatrix, StateVector
from maskcorr.services.reports import reports_from_json
from maskcorr.services import scenarios
from maskcorr.services.scenarios import scenario_seed
from maskcorr.utils.serialization import load_operator


def run(capsys, *argv):
    code = run_cli(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestVerify:
    def test_all_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--scenario", "all", "--seed", "42", "--trials", "5")
        assert code == 0
        assert "ALL PASS (10/10)" in out

    def test_json_report(self, capsys):
        code, out, _ = run(capsys, "verify", "--scenario", "nosignal", "--format", "json", "--trials", "4")
        assert code == 0
        data = json.loads(out)
        assert len(data) == 1
        assert list(data[0]) == ["scenario", "trials", "seed", "tolerance", "max_deviation", "pass"]
        assert data[0]["scenario"] == "nosignal"
        assert data[0]["pass"] is True

    def test_json_is_byte_identical_across_runs(self, capsys):
        argv = ["verify", "--format", "json", "--trials", "3", "--seed", "7"]
        _, first, _ = run(capsys, *argv)
        _, second, _ = run(capsys, *argv)
        assert first == second

    def test_json_round_trips(self, capsys):
        _, out, _ = run(capsys, "verify", "--scenario", "dispatch", "--format", "json", "--trials", "3", "--details")
        report = reports_from_json(out)[0]
        assert report.details
        assert "xy_min_fidelity" in report.diagnostics
        assert json.loads(out)[0] == report.to_dict(include_details=True)

    def test_seed_recorded(self, capsys):
        _, out, _ = run(capsys, "verify", "--scenario", "masking", "--format", "json", "--trials", "2", "--seed", "9")
        assert json.loads(out)[0]["seed"] == scenario_seed(9, "masking")

    def test_env_seed(self, capsys, monkeypatch):
        monkeypatch.setenv("MASKCORR_SEED", "9")
        _, out, _ = run(capsys, "verify", "--scenario", "masking", "--format", "json", "--trials", "2")
        assert json.loads(out)[0]["seed"] == scenario_seed(9, "masking")

    @pytest.mark.parametrize("scenario", ["masking", "exclusivity", "all"])
    def test_too_few_trials(self, capsys, scenario):
        code, out, err = run(capsys, "verify", "--scenario", scenario, "--trials", "1")
        assert code == 2
        assert out == ""
        assert "at least 2" in err

    @pytest.mark.parametrize("argv", [
        ["verify", "--trials", "0"],
        ["verify", "--tol", "0"],
        ["verify", "--tol", "-1e-3"],
        ["verify", "--scenario", "bogus"],
        ["verify", "--trials", "many"],
        [],
    ])
    def test_usage_errors(self, capsys, argv):
        code, _, _ = run(capsys, *argv)
        assert code == 2

    def test_failure_exit_code(self, capsys, monkeypatch):
        def boom(trials, tol, seed):
            raise RuntimeError("simulated fault")

        monkeypatch.setitem(scenarios.SCENARIOS, "teleport", boom)
        code, out, _ = run(capsys, "verify", "--trials", "2")
        assert code == 1
        assert "FAIL (1/10): teleport" in out
        assert "simulated fault" in out

    def test_text_details(self, capsys):
        _, out, _ = run(capsys, "verify", "--scenario", "teleport", "--trials", "2", "--details")
        assert "teleport: trial=0" in out


class TestDemo:
    def test_mask_writes_state(self, capsys, tmp_path):
        out_file = tmp_path / "g.json"
        code, out, _ = run(capsys, "demo", "mask", "--state", "1,0,0,0", "--out", str(out_file))
        assert code == 0
        assert "|00000>" in out
        gamma = StateVector.load(out_file)
        assert gamma.num_qubits == 5
        assert gamma.amplitudes[0] == pytest.approx((1 - 1j) / 4, abs=1e-15)

    @pytest.mark.parametrize("pair", ["xy", "xz", "yz"])
    def test_decode_fidelity(self, capsys, pair):
        code, out, _ = run(capsys, "demo", "decode", "--pair", pair, "--state", "0,0,1,0")
        assert code == 0
        assert "fidelity: 1.0" in out

    def test_decode_json(self, capsys, tmp_path):
        out_file = tmp_path / "rho.json"
        code, out, _ = run(capsys, "demo", "decode", "--pair", "yz", "--state", "0.6,0,0,0.8",
                           "--format", "json", "--out", str(out_file))
        assert code == 0
        data = json.loads(out)
        assert data["output_qubit"] == 1
        assert data["fidelity"] == pytest.approx(1.0)
        rho = DensityMatrix.load(out_file)
        np.testing.assert_allclose(rho.matrix, [[0.36, -0.48j], [0.48j, 0.64]], atol=1e-12)

    def test_dispatch(self, capsys):
        code, out, _ = run(capsys, "demo", "dispatch", "--state", "0.6,0,0,0.8", "--theta", "1.2", "--phi", "0.3")
        assert code == 0
        assert "yz fidelity: 1.0" in out

    def test_teleport(self, capsys):
        code, out, _ = run(capsys, "demo", "teleport", "--state", "1,0,0,0", "--format", "json")
        assert code == 0
        data = json.loads(out)
        bob = DensityMatrix.from_dict(data["pre_correction_bob"])
        np.testing.assert_allclose(bob.matrix, np.eye(2) / 2, atol=1e-12)
        np.testing.assert_allclose(data["per_outcome_fidelity"], [1.0] * 4, atol=1e-12)

    def test_state_file(self, capsys, tmp_path):
        path = StateVector.from_amplitudes([1, 1j], normalize=True).save(tmp_path / "psi.json")
        code, out, _ = run(capsys, "demo", "decode", "--pair", "xz", "--state-file", str(path))
        assert code == 0
        assert "fidelity: 1.0" in out

    @pytest.mark.parametrize("state", ["0,0,0,0", "1,0,0", "a,b,c,d", "2,0,0,0", "1,0,0,1"])
    def test_bad_inline_state(self, capsys, state):
        code, _, err = run(capsys, "demo", "mask", "--state", state)
        assert code == 2
        assert err

    def test_near_normalized_state_accepted(self, capsys):
        code, _, _ = run(capsys, "demo", "mask", "--state", "0.7071068,0,0.7071068,0")
        assert code == 0

    def test_missing_state_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "demo", "mask", "--state-file", str(tmp_path / "nope.json"))
        assert code == 2
        assert "Could not read" in err

    @pytest.mark.parametrize("content", [b"\xff\xfe\x00\x01", b'{"amplitudes": [[1, 0],', b'{"amplitudes": 3}'])
    def test_unreadable_state_file(self, capsys, tmp_path, content):
        path = tmp_path / "psi.json"
        path.write_bytes(content)
        code, out, err = run(capsys, "demo", "mask", "--state-file", str(path))
        assert code == 2
        assert out == ""
        assert err.startswith("maskcorr:")

    def test_state_required(self, capsys):
        code, _, _ = run(capsys, "demo", "mask")
        assert code == 2


def test_export_operators(capsys, tmp_path):
    code, out, _ = run(capsys, "export", "--out", str(tmp_path))
    assert code == 0
    assert out.count("wrote") == 4
    u = load_operator(tmp_path / "u_enc.json")
    assert u.shape == (32, 32)
    assert u[0, 0] == pytest.approx((1 - 1j) / 2)


def test_config_defaults(monkeypatch):
    monkeypatch.delenv("MASKCORR_SEED", raising=False)
    monkeypatch.delenv("MASKCORR_WORKERS", raising=False)
    config = config_from_args(build_parser().parse_args(["verify"]))
    assert config.seed == 42
    assert config.trials == 100
    assert config.workers == 1
    assert config.scenario_names()[0] == "unitarity"


def test_main_entry_point(capsys):
    assert main(["-v", "verify", "--scenario", "unitarity"]) == 0
    assert "ALL PASS (1/1)" in capsys.readouterr().out

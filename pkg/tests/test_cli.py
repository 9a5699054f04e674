import json
import math

import pytest

from kpd.cli import RunConfig, main, run, verify_certificate
from kpd.errors import KpdError


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestBoundaryCommand:
    def test_t2_report(self, capsys):
        code, out = run_cli(capsys, "boundary", "--t", "2")
        assert code == 0
        record = json.loads(out)
        payload = record["payload"]
        assert abs(payload["a_threshold"]["f64"] - 12.0) <= 1e-12 * 12.0
        assert payload["z_tangent"]["f64"] == 0.25
        assert record["config"]["command"] == "boundary"
        assert record["config"]["seed"] == 0

    def test_violation_search_embeds_certificate(self, capsys):
        code, out = run_cli(capsys, "boundary", "--t", "2", "--a", "13")
        assert code == 0
        violation = json.loads(out)["payload"]["violation"]
        assert violation["found"] is True
        cert = violation["certificate"]
        assert cert["kind"] == "g"
        assert float(cert["value"]) < 0
        assert len(cert["points"]) == len(cert["coeffs"]) == 2


class TestGramCommand:
    def test_fail_verdict_with_certificate_and_zero_exit(self, capsys):
        x = repr(math.sqrt(0.2))
        code, out = run_cli(
            capsys, "gram", "--t", "2", "--a", "13", "--points", f"{x},0"
        )
        assert code == 0  # completed analysis, even though the verdict is FAIL
        payload = json.loads(out)["payload"]
        assert payload["pd"]["verdict"] == "FAIL"
        assert payload["certificate"]["kind"] == "gram"

    def test_pass_verdict(self, capsys):
        code, out = run_cli(
            capsys, "gram", "--t", "0.5", "--a", "1", "--points", "0,1,2,3"
        )
        payload = json.loads(out)["payload"]
        assert code == 0
        assert payload["pd"]["verdict"] == "PASS"
        assert payload["certificate"] is None


class TestCndCommand:
    def test_pass(self, capsys):
        code, out = run_cli(
            capsys,
            "cnd", "--t", "1", "--a", "1",
            "--points", "0,1,2", "--coeffs", "1,-2,1",
        )
        payload = json.loads(out)["payload"]
        assert code == 0
        assert payload["cnd"]["verdict"] == "PASS"

    def test_fail_embeds_certificate(self, capsys):
        code, out = run_cli(
            capsys,
            "cnd", "--t", "3", "--a", "1",
            "--points", "0,1,4", "--coeffs", "1,-2,1",
        )
        payload = json.loads(out)["payload"]
        assert code == 0
        assert payload["cnd"]["verdict"] == "FAIL"
        assert payload["certificate"]["kind"] == "cnd"


class TestWitnessCommand:
    def test_t15_record(self, capsys, tmp_path):
        out_path = tmp_path / "witness.json"
        code, out = run_cli(
            capsys, "witness", "--t", "1.5", "--a", "1", "--out", str(out_path)
        )
        assert code == 0
        payload = json.loads(out_path.read_text())["payload"]
        assert payload["moments"][:2] == ["0/1", "0/1"]
        assert payload["t_power_coefficient"]["f64"] == pytest.approx(
            -1.2197659469584872, rel=1e-9
        )
        assert payload["predicted_sign"] == "nonpositive"
        cert = payload["certificate"]
        assert cert["kind"] == "f"
        assert float(cert["value"]) < 0
        assert float(cert["q_value"]) < 0

    def test_even_integer_part_is_inconclusive(self, capsys):
        code, out = run_cli(capsys, "witness", "--t", "2.5", "--a", "1")
        payload = json.loads(out)["payload"]
        assert code == 0
        assert payload["negativity"] == "inconclusive"
        assert payload["certificate"] is None


class TestFracpowCommand:
    def test_validation_table(self, capsys):
        code, out = run_cli(capsys, "fracpow", "--validate", "--tol", "1e-6")
        payload = json.loads(out)["payload"]
        assert code == 0
        assert payload["passed"] is True
        assert len(payload["entries"]) == 20


class TestSweepCommand:
    def test_csv_schema(self, capsys):
        code, out = run_cli(
            capsys,
            "sweep", "--a-grid", "13", "--nodes", "48,96",
            "--half-width", "5", "--format", "csv",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "t,a,level,node_count,L,min_eigenvalue,verdict"
        assert len(lines) == 3
        assert lines[2].endswith("NEGATIVE_FOUND")

    def test_csv_only_for_sweeps(self, capsys):
        code, _ = run_cli(capsys, "boundary", "--t", "2", "--format", "csv")
        assert code == 2


class TestDeterminism:
    def test_identical_config_identical_payload(self):
        cfg = RunConfig(
            command="identities",
            params={"n_max": 2, "m_max": 2, "samples": 2},
            seed=7,
        )
        r1, r2 = run(cfg), run(cfg)
        assert r1.payload_json() == r2.payload_json()

    def test_seed_changes_payload_inputs_not_schema(self):
        base = dict(command="identities", params={"n_max": 2, "m_max": 1, "samples": 1})
        r1 = run(RunConfig(seed=1, **base))
        r2 = run(RunConfig(seed=2, **base))
        assert set(r1.payload) == set(r2.payload)


class TestVerify:
    def test_witness_certificate_confirms(self, capsys, tmp_path):
        rec = tmp_path / "w.json"
        assert main(["witness", "--t", "1.5", "--a", "1", "--out", str(rec)]) == 0
        capsys.readouterr()
        code, out = run_cli(capsys, "verify", str(rec))
        assert code == 0
        assert "CONFIRMED" in out

    def test_boundary_certificate_confirms(self, capsys, tmp_path):
        rec = tmp_path / "b.json"
        assert main(["boundary", "--t", "2", "--a", "13", "--out", str(rec)]) == 0
        capsys.readouterr()
        outcome = verify_certificate(str(rec))
        assert outcome["verdict"] == "CONFIRMED"

    def test_tampered_certificate_mismatches(self, capsys, tmp_path):
        rec = tmp_path / "t.json"
        assert main(["witness", "--t", "1.5", "--a", "1", "--out", str(rec)]) == 0
        capsys.readouterr()
        record = json.loads(rec.read_text())
        cert = record["payload"]["certificate"]
        cert["value"] = cert["value"].lstrip("-")  # flip the stored sign
        rec.write_text(json.dumps(record))
        code, out = run_cli(capsys, "verify", str(rec))
        assert code == 3
        assert "MISMATCH" in out

    def test_record_without_certificate_errors(self, capsys, tmp_path):
        rec = tmp_path / "n.json"
        assert main(["boundary", "--t", "2", "--out", str(rec)]) == 0
        capsys.readouterr()
        code, _ = run_cli(capsys, "verify", str(rec))
        assert code == 3

    def test_spectrum_certificate_confirms(self, capsys, tmp_path):
        rec = tmp_path / "s.json"
        code = main(
            ["spectrum", "--t", "2", "--a", "13", "--nodes", "48,96",
             "--half-width", "5", "--out", str(rec)]
        )
        capsys.readouterr()
        assert code == 0
        payload = json.loads(rec.read_text())["payload"]
        assert payload["verdict"] == "NEGATIVE_FOUND"
        cert = payload["certificate"]
        assert cert["kind"] == "gram"
        assert float(cert["value"]) < 0
        outcome = verify_certificate(str(rec))
        assert outcome["verdict"] == "CONFIRMED"

    def test_cnd_certificate_confirms(self, capsys, tmp_path):
        rec = tmp_path / "c.json"
        code = main(
            ["cnd", "--t", "3", "--a", "1", "--points", "0,1,4",
             "--coeffs", "1,-2,1", "--out", str(rec)]
        )
        capsys.readouterr()
        assert code == 0
        outcome = verify_certificate(str(rec))
        assert outcome["verdict"] == "CONFIRMED"
        assert outcome["results"][0]["kind"] == "cnd"

    def test_sweep_certificate_uses_per_entry_weight(self, capsys, tmp_path):
        rec = tmp_path / "sw.json"
        code = main(
            ["sweep", "--a-grid", "13", "--nodes", "48,96",
             "--half-width", "5", "--out", str(rec)]
        )
        capsys.readouterr()
        assert code == 0
        reports = json.loads(rec.read_text())["payload"]["reports"]
        cert = reports[0]["certificate"]
        assert cert is not None and cert["a"] == 13.0
        outcome = verify_certificate(str(rec))
        assert outcome["verdict"] == "CONFIRMED"


class TestConfigValidation:
    def test_bad_tolerance_rejected(self, capsys):
        code, _ = run_cli(capsys, "boundary", "--t", "2", "--tol", "-1")
        assert code == 2

    def test_unknown_flag_rejected(self):
        with pytest.raises(SystemExit) as exc:
            main(["boundary", "--t", "2", "--bogus", "1"])
        assert exc.value.code == 2

    def test_runconfig_rejects_bad_format(self):
        with pytest.raises(KpdError):
            RunConfig(command="gram", params={}, format="xml")

    def test_diagnostic_error_exit_code(self, capsys):
        # t above the overflow cap triggers a diagnostic, not a traceback
        code, _ = run_cli(capsys, "boundary", "--t", "31")
        assert code == 3

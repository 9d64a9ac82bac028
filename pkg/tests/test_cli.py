"""Command-line behavior: every subcommand through main(argv), exit codes,
JSON payload shapes, and the environment seed default."""
import json

import numpy as np
import pytest

from spectrec.circuit import GateSet, build_unitary, decode
from spectrec.cli import main


def write_json(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


def matrix_doc(matrix):
    rows = np.asarray(matrix, dtype=np.complex128)
    return {"matrix": [[[float(z.real), float(z.imag)] for z in row] for row in rows]}


def run_to_file(tmp_path, argv, name="out.json"):
    out = tmp_path / name
    rc = main(argv + ["--out", str(out)])
    return rc, json.loads(out.read_text())


class TestRecognizeEigenvalue:
    def test_accepts_on_matrix_source(self, tmp_path):
        path = write_json(tmp_path / "u.json", matrix_doc(np.diag([1, 1, -1, -1])))
        rc, doc = run_to_file(
            tmp_path,
            ["recognize-eigenvalue", "--matrix", path, "--omega", "0.5", "--seed", "3"],
        )
        assert rc == 0
        assert doc["verdict"] == "accept"

    def test_rejects_absent_frequency(self, tmp_path):
        path = write_json(tmp_path / "u.json", matrix_doc(np.diag([1, 1, -1, -1])))
        rc, doc = run_to_file(
            tmp_path,
            ["recognize-eigenvalue", "--matrix", path, "--omega", "0.25", "--seed", "3"],
        )
        assert rc == 0
        assert doc["verdict"] == "reject"

    def test_planted_fixture_feeds_group_flag(self, tmp_path):
        fixture = tmp_path / "planted.json"
        rc = main([
            "fixtures", "--kind", "planted", "--dim", "8", "--m", "4",
            "--groups", "2,6", "--seed", "4", "--out", str(fixture),
        ])
        assert rc == 0
        rc, doc = run_to_file(
            tmp_path,
            ["recognize-eigenvalue", "--planted", str(fixture), "--group", "0", "--seed", "5"],
        )
        assert rc == 0
        assert doc["verdict"] == "accept"

    def test_requires_exactly_one_source(self, tmp_path):
        path = write_json(tmp_path / "u.json", matrix_doc(np.eye(2)))
        with pytest.raises(SystemExit):
            main(["recognize-eigenvalue", "--matrix", path, "--circuit", path, "--omega", "0"])
        with pytest.raises(SystemExit):
            main(["recognize-eigenvalue", "--omega", "0"])


class TestVerifyRev:
    def test_reports_per_eigenvector_masses(self, tmp_path):
        path = write_json(tmp_path / "u.json", matrix_doc(np.diag([1, 1j, -1, -1j])))
        rc, doc = run_to_file(tmp_path, ["verify-rev", "--matrix", path, "--fine", "64"])
        assert rc == 0
        assert doc["passed"] is True
        assert doc["min_mass"] >= doc["threshold"]
        assert len(doc["rows"]) == 4


class TestThermo:
    def test_levels_file_round_trip(self, tmp_path):
        levels = write_json(
            tmp_path / "h.json",
            {"e_scale": 1.0, "levels": [[0.21460183660255172, 1], [-1.3561944901923448, 2], [-2.9269908169872414, 1]]},
        )
        rc, doc = run_to_file(
            tmp_path, ["thermo", "--hamiltonian", levels, "--kt", "1.0", "--seed", "7"]
        )
        assert rc == 0
        assert doc["verdict"] == "ok"
        assert [round(lv["degeneracy"]) for lv in doc["stats"]["levels"]] == [1, 2, 1]
        assert len(doc["stats"]["thermo"]) == 1

    def test_missing_scale_is_rejected(self, tmp_path):
        bad = write_json(tmp_path / "h.json", {"levels": [[0.0, 1]]})
        rc = main(["thermo", "--hamiltonian", bad])
        assert rc == 1


class TestFindStructure:
    def test_unique_listing_is_found(self, tmp_path):
        spec = write_json(
            tmp_path / "spec.json",
            {"M": 4, "L": 64, "mode": "determined", "frequencies": [0.25, 0.75]},
        )
        rc, doc = run_to_file(
            tmp_path,
            [
                "find-structure", "--spec", spec, "--gate-set", "involutive",
                "--n", "2", "--cap", "2", "--search-space", "16", "--seed", "8",
            ],
        )
        assert rc == 0
        assert doc["verdict"] == "found"
        assert doc["stats"]["code"] == 11


class TestDistinguish:
    def test_pair_fixture_verdict(self, tmp_path):
        pair = tmp_path / "pair.json"
        rc = main([
            "fixtures", "--kind", "pair", "--dim", "8", "--m", "4",
            "--relation", "rotated", "--distance", "0.5", "--seed", "9", "--out", str(pair),
        ])
        assert rc == 0
        rc, doc = run_to_file(
            tmp_path, ["distinguish", "--pair", str(pair), "--registers", "24", "--seed", "10"]
        )
        assert rc == 0
        assert doc["verdict"] == "different"

    def test_broken_promise_exits_nonzero(self, tmp_path):
        pair = tmp_path / "pair.json"
        main([
            "fixtures", "--kind", "pair", "--dim", "8", "--m", "4",
            "--relation", "rotated", "--distance", "0.2", "--seed", "11", "--out", str(pair),
        ])
        rc = main(["distinguish", "--pair", str(pair), "--d", "0.5", "--seed", "12"])
        assert rc == 1

    def test_explicit_matrices_need_omega_and_d(self, tmp_path):
        path = write_json(tmp_path / "u.json", matrix_doc(np.eye(4)))
        with pytest.raises(SystemExit):
            main(["distinguish", "--matrix-u", path, "--matrix-v", path])


class TestRecognizeDevice:
    def test_family_member_recovered(self, tmp_path):
        family = tmp_path / "family.json"
        rc = main([
            "fixtures", "--kind", "family", "--count", "4", "--n", "2", "--cap", "2",
            "--seed", "5", "--out", str(family),
        ])
        assert rc == 0
        codes = json.loads(family.read_text())["codes"]
        rc, doc = run_to_file(
            tmp_path,
            [
                "recognize-device", "--family", str(family), "--target", "0",
                "--n", "2", "--cap", "2", "--runs", "3", "--retries", "2", "--seed", "6",
            ],
        )
        assert rc == 0
        assert doc["verdict"] == "found"
        gs = GateSet.by_name("involutive")
        target = build_unitary(decode(codes[0], gs, 2, 2), gs).matrix
        winner = build_unitary(decode(doc["stats"]["code"], gs, 2, 2), gs).matrix
        np.testing.assert_allclose(winner, target, atol=1e-12)

    def test_target_must_index_family(self, tmp_path):
        family = tmp_path / "family.json"
        main([
            "fixtures", "--kind", "family", "--count", "4", "--n", "2", "--cap", "2",
            "--seed", "5", "--out", str(family),
        ])
        with pytest.raises(SystemExit):
            main(["recognize-device", "--family", str(family), "--target", "9"])


class TestSweep:
    def test_rows_slope_and_csv(self, tmp_path):
        csv_path = tmp_path / "rows.csv"
        rc, doc = run_to_file(
            tmp_path,
            [
                "sweep", "--pipeline", "difference", "--values", "0.5,0.25",
                "--trials", "1", "--seed", "13", "--csv", str(csv_path),
            ],
        )
        assert rc == 0
        assert len(doc["rows"]) == 2
        assert np.isfinite(doc["slope"])
        lines = csv_path.read_text().strip().splitlines()
        assert lines[0] == "x,queries"
        assert len(lines) == 3


class TestSeedEnvironment:
    def test_env_seed_matches_explicit_flag(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SPECTREC_SEED", "123")
        rc, via_env = run_to_file(
            tmp_path,
            ["fixtures", "--kind", "planted", "--dim", "8", "--m", "4", "--groups", "2,6"],
            name="env.json",
        )
        assert rc == 0
        monkeypatch.delenv("SPECTREC_SEED")
        rc, via_flag = run_to_file(
            tmp_path,
            ["fixtures", "--kind", "planted", "--dim", "8", "--m", "4",
             "--groups", "2,6", "--seed", "123"],
            name="flag.json",
        )
        assert rc == 0
        assert via_env == via_flag

    def test_non_integer_env_seed_exits(self, monkeypatch):
        monkeypatch.setenv("SPECTREC_SEED", "lots")
        with pytest.raises(SystemExit):
            main(["fixtures", "--kind", "thermo"])


class TestStdout:
    def test_reports_print_when_no_out_file(self, capsys, tmp_path):
        path = write_json(tmp_path / "u.json", matrix_doc(np.diag([1.0, -1.0])))
        rc = main(["recognize-eigenvalue", "--matrix", path, "--omega", "0.0", "--seed", "2"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["verdict"] == "accept"

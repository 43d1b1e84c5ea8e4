import json

import numpy as np
import pytest

from choichol.cli import EXIT_IO, EXIT_NOT_CP, EXIT_NOT_TP, EXIT_OK, EXIT_RESIDUAL, main
from choichol.fileio import decode_matrix, read_blocks, read_channel, write_channel
from choichol.generate import random_cptp


@pytest.fixture
def files(tmp_path, identity_channel, halved_channel, depolarizing, transpose_map):
    paths = {}
    for name, ch in [
        ("identity", identity_channel),
        ("halved", halved_channel),
        ("depolarizing", depolarizing),
        ("transpose", transpose_map),
        ("random", random_cptp(3, 2, 2, 11)),
    ]:
        paths[name] = tmp_path / f"{name}.json"
        write_channel(paths[name], ch)
    paths["truncated"] = tmp_path / "truncated.json"
    paths["truncated"].write_text(paths["identity"].read_text()[:50])
    return paths


def run_json(capsys, argv):
    code = main(["--json", *argv])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_inspect_identity(capsys, files):
    code, rep = run_json(capsys, ["inspect", str(files["identity"])])
    assert code == EXIT_OK
    assert rep["cp"] and rep["tp"] and rep["hermitian_preserving"]
    assert abs(rep["min_eigenvalue"]) <= 1e-12


def test_inspect_transpose(capsys, files):
    code, rep = run_json(capsys, ["inspect", str(files["transpose"])])
    assert code == EXIT_NOT_CP
    assert not rep["cp"]
    assert rep["min_eigenvalue"] == pytest.approx(-1.0, abs=1e-10)


def test_inspect_truncated(capsys, files):
    assert main(["inspect", str(files["truncated"])]) == EXIT_IO
    assert "ParseError" in capsys.readouterr().err


def test_inspect_text_output(capsys, files):
    assert main(["inspect", str(files["halved"])]) == EXIT_OK
    out = capsys.readouterr().out
    assert "cp: True" in out and "tp: False" in out


def test_decompose_identity(capsys, files, tmp_path):
    out = tmp_path / "f.json"
    code, rep = run_json(capsys, ["decompose", str(files["identity"]), "--output", str(out)])
    assert code == EXIT_OK
    assert rep["reconstruction_residual"] <= 1e-12
    doc = json.loads(out.read_text())
    L = read_blocks(doc["L"], 2, 2, "L")
    e11 = np.diag([1.0, 0.0])
    e21 = np.array([[0.0, 0.0], [1.0, 0.0]])
    np.testing.assert_allclose(L[0, 0], e11, atol=1e-15)
    np.testing.assert_allclose(L[1, 0], e21, atol=1e-15)
    assert np.linalg.norm(L[1, 1]) <= 1e-12


def test_decompose_depolarizing(capsys, files, tmp_path):
    out = tmp_path / "f.json"
    code, rep = run_json(capsys, ["decompose", str(files["depolarizing"]), "-o", str(out)])
    assert code == EXIT_OK
    L = read_blocks(json.loads(out.read_text())["L"], 2, 2, "L")
    np.testing.assert_allclose(L[0, 0], np.eye(2) / np.sqrt(2), atol=1e-15)
    np.testing.assert_allclose(L[1, 1], np.eye(2) / np.sqrt(2), atol=1e-15)
    np.testing.assert_array_equal(L[1, 0], 0)


def test_decompose_not_cp(capsys, files):
    assert main(["decompose", str(files["transpose"])]) == EXIT_NOT_CP
    assert "min Choi eigenvalue" in capsys.readouterr().err


def test_dilate_identity(capsys, files, tmp_path):
    out = tmp_path / "v.json"
    code, rep = run_json(capsys, ["dilate", str(files["identity"]), "--output", str(out)])
    assert code == EXIT_OK
    assert rep["V_shape"] == [8, 2] and rep["isometry_residual"] <= 1e-12
    V = decode_matrix(json.loads(out.read_text())["V"], 8, 2)
    np.testing.assert_allclose(V.conj().T @ V, np.eye(2), atol=1e-12)


def test_dilate_unitary_identity(capsys, files, tmp_path):
    out = tmp_path / "u.json"
    code, rep = run_json(capsys, ["dilate", str(files["identity"]), "--unitary", "-o", str(out)])
    assert code == EXIT_OK
    assert rep["U_shape"] == [10, 10] and rep["unitarity_residual"] <= 1e-12
    assert len(json.loads(out.read_text())["U"]) == 10


def test_dilate_unitary_halved(capsys, files):
    code, rep = run_json(capsys, ["dilate", str(files["halved"]), "--unitary"])
    assert code == EXIT_NOT_TP
    assert not rep["is_isometry"] and rep["sigma_max"] == pytest.approx(2**-0.5)


def test_dilate_not_cp(files):
    assert main(["dilate", str(files["transpose"])]) == EXIT_NOT_CP


def test_roundtrip_identity(capsys, files):
    code, rep = run_json(capsys, ["roundtrip", str(files["identity"]), "--samples", "5"])
    assert code == EXIT_OK and rep["max_residual"] <= 1e-12


def test_roundtrip_random(capsys, files):
    code, rep = run_json(capsys, ["roundtrip", str(files["random"]), "--samples", "10", "--seed", "3"])
    assert code == EXIT_OK and rep["max_residual"] <= 1e-8


def test_roundtrip_injected_error(capsys, files):
    code, rep = run_json(capsys, ["roundtrip", str(files["random"]), "--inject-error", "1e-3"])
    assert code == EXIT_RESIDUAL and not rep["passed"]


def test_roundtrip_tol_override(capsys, files):
    code, _ = run_json(capsys, ["roundtrip", str(files["random"]), "--inject-error", "1e-3", "--tol", "1.0"])
    assert code == EXIT_OK


def test_roundtrip_not_cp(files):
    assert main(["roundtrip", str(files["transpose"])]) == EXIT_NOT_CP


def test_random_unitary_conjugation(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert main(["random", "--dim-in", "2", "--dim-out", "2", "--env", "1", "--seed", "5", "-o", str(out)]) == EXIT_OK
    ch = read_channel(out)
    # a single Kraus operator: the Choi matrix has rank one
    assert np.linalg.matrix_rank(np.einsum("ijab->iajb", ch.entries).reshape(4, 4), tol=1e-10) == 1
    code, rep = run_json(capsys, ["inspect", str(out)])
    assert code == EXIT_OK and rep["cp"] and rep["tp"]


def test_random_seed_seven_passes_inspect(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert main(["random", "--dim-in", "2", "--dim-out", "2", "--env", "2", "--seed", "7", "-o", str(out)]) == EXIT_OK
    code, rep = run_json(capsys, ["inspect", str(out)])
    assert code == EXIT_OK and rep["cp"] and rep["tp"]


def test_random_many_seeds_pass_inspect(capsys, tmp_path):
    rng = np.random.default_rng(0)
    for seed in range(100):
        d, e = (int(x) for x in rng.integers(1, 4, size=2))
        n = int(rng.integers(1, d * e + 1))
        out = tmp_path / f"r{seed}.json"
        args = ["random", "--dim-in", str(n), "--dim-out", str(d), "--env", str(e), "--seed", str(seed)]
        assert main([*args, "-o", str(out)]) == EXIT_OK
        code, rep = run_json(capsys, ["inspect", str(out)])
        assert code == EXIT_OK and rep["cp"] and rep["tp"]


def test_random_kraus_representation(tmp_path):
    out = tmp_path / "k.json"
    args = ["random", "--dim-in", "2", "--dim-out", "3", "--env", "2", "--representation", "kraus", "-o", str(out)]
    assert main(args) == EXIT_OK
    assert json.loads(out.read_text())["representation"] == "kraus"
    assert read_channel(out).dim_out == 3


def test_random_invalid_dimensions(capsys):
    assert main(["random", "--dim-in", "4", "--dim-out", "2", "--env", "1"]) == EXIT_IO
    assert "InvalidDimensions" in capsys.readouterr().err


def test_random_to_stdout(capsys):
    assert main(["random", "--dim-in", "1", "--dim-out", "1"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["dim_in"] == 1


def test_global_flags_before_or_after_subcommand(capsys, files):
    a = main(["--tol", "1e-6", "inspect", str(files["identity"])])
    b = main(["inspect", str(files["identity"]), "--tol", "1e-6"])
    assert a == b == EXIT_OK


def test_missing_file_exit_code(tmp_path):
    assert main(["inspect", str(tmp_path / "missing.json")]) == EXIT_IO


def test_usage_errors_exit_one(capsys):
    assert main(["--seed", "-1", "random", "--dim-in", "1", "--dim-out", "1"]) == EXIT_IO
    assert main(["random", "--dim-in", "1"]) == EXIT_IO
    assert main(["frobnicate"]) == EXIT_IO
    assert main(["--version"]) == EXIT_OK

import json
import subprocess
import sys

import numpy as np
import pytest

from qcc import io as qio
from qcc.cli import main
from qcc.errors import DimMismatch, NotPSD
from qcc.state import DensityMatrix
from qcc.stategen import bell, random_cq_state, random_mixed, random_separable, werner

FAST_EOC = ["--restarts", "2", "--max-iters", "300", "--seed", "0"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


@pytest.fixture
def write(tmp_path):
    def _write(rho, name="state.json"):
        path = tmp_path / name
        qio.write_state(rho, path)
        return path

    return _write


# --------------------------------------------------------------------------- io


def test_state_round_trip_is_exact():
    for rho in (random_mixed((2, 3), seed=1), random_mixed((2, 2, 3), seed=2, split=2), bell("psi-")):
        back = qio.state_from_json(qio.state_to_json(rho))
        assert np.array_equal(back.data, rho.data)
        assert back.dims == rho.dims and back.split == rho.split


def test_negative_zero_is_written_plainly():
    assert "-0," not in qio.state_to_json(werner(0.5))


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[1, 2]",
        '{"dims_a": [2], "re": [[1]], "im": [[0]]}',
        '{"dims_a": [2], "dims_b": [0], "re": [], "im": []}',
        '{"dims_a": [2], "dims_b": [true], "re": [[1]], "im": [[0]]}',
        '{"dims_a": [2], "dims_b": [2], "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]}',
        '{"dims_a": [1], "dims_b": [2], "re": [[1, 0], ["x", 0]], "im": [[0, 0], [0, 0]]}',
    ],
)
def test_malformed_state_text_is_rejected(text):
    with pytest.raises(DimMismatch):
        qio.state_from_json(text)


def test_invalid_density_is_rejected_on_read():
    text = '{"dims_a": [1], "dims_b": [2], "re": [[1.5, 0], [0, -0.5]], "im": [[0, 0], [0, 0]]}'
    with pytest.raises(NotPSD):
        qio.state_from_json(text)


def test_decomposition_round_trip():
    _, d = random_separable(3, (2, 3), seed=4)
    back = qio.decomposition_from_json(qio.decomposition_to_json(d))
    assert np.array_equal(back.weights, d.weights)
    # rows are renormalised on construction, so agreement is to rounding
    assert np.abs(back.alphas - d.alphas).max() <= 1e-15
    assert np.abs(back.betas - d.betas).max() <= 1e-15


def test_bad_decomposition_is_rejected():
    with pytest.raises(DimMismatch):
        qio.decomposition_from_json('{"weights": [0.5, 0.6], "alphas_re": [[1], [1]], "alphas_im": [[0], [0]],'
                                    ' "betas_re": [[1], [1]], "betas_im": [[0], [0]]}')
    with pytest.raises(DimMismatch):
        qio.decomposition_from_json("{}")


# -------------------------------------------------------------------------- cli


def test_coherence_command(capsys, write):
    code, out, _ = run(capsys, "coherence", write(bell("phi+")))
    assert code == 0 and out["c_l1"] == pytest.approx(1.0, abs=1e-15)
    diag = DensityMatrix(np.diag([0.1, 0.2, 0.3, 0.4]).astype(complex), (2, 2), 1)
    code, out, _ = run(capsys, "coherence", write(diag), "--basis", "eigen")
    assert code == 0 and out["c_l1"] <= 1e-15


def test_invalid_file_exits_two_with_violations(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dims_a": [1], "dims_b": [2], "re": [[1.5, 0], [0, -0.5]], "im": [[0, 0], [0, 0]]}')
    code, out, err = run(capsys, "coherence", bad)
    assert code == 2 and out is None
    report = json.loads(err)
    assert report["type"] == "NotPSD" and report["violations"][0]["kind"] == "NotPSD"
    assert run(capsys, "coherence", tmp_path / "missing.json")[0] == 2


def test_unknown_flag_exits_two(capsys):
    with pytest.raises(SystemExit) as info:
        main(["coherence", "--nope"])
    assert info.value.code == 2
    capsys.readouterr()


def test_cc_command_modes_agree_on_werner(capsys, write):
    path = write(werner(0.7))
    _, fixed, _ = run(capsys, "cc", path, "--mode", "fixed")
    code, minimised, _ = run(capsys, "cc", path, "--seed", "3", "--restarts", "2")
    assert code == 0 and fixed["mode"] == "fixed" and "optimizer" not in fixed
    assert minimised["optimizer"]["restarts_used"] >= 1
    assert fixed["value"] == pytest.approx(0.7, abs=1e-12)
    assert minimised["value"] == pytest.approx(0.7, abs=1e-6)


def test_cc_command_on_bell(capsys, write):
    _, out, _ = run(capsys, "cc", write(bell()), "--seed", "0")
    assert out["value"] == pytest.approx(1.0, abs=1e-6)
    assert np.array(out["basis_a"]["re"]).shape == (2, 2)


def test_discord_command(capsys, write):
    cq = write(random_cq_state((2, 2), seed=3))
    _, out, _ = run(capsys, "discord", cq, "--asym", "A", "--seed", "0")
    assert out["kind"] == "asymmetric" and out["side"] == "A" and out["zero"]
    _, out, _ = run(capsys, "discord", cq, "--sym", "--seed", "0")
    assert out["kind"] == "symmetric" and not out["zero"]
    b = write(bell(), "bell.json")
    assert not run(capsys, "discord", b, "--seed", "0")[1]["zero"]
    assert not run(capsys, "discord", b, "--asym", "b", "--seed", "0")[1]["zero"]


def test_eoc_command_with_sidecar(capsys, tmp_path):
    state, side = tmp_path / "sep.json", tmp_path / "sep.decomp.json"
    code, _, _ = run(capsys, "gen", "random-separable", "--terms", "3", "--seed", "5",
                     "-o", state, "--decomposition-out", side)
    assert code == 0
    code, out, _ = run(capsys, "eoc", state, "--decomposition", side, *FAST_EOC)
    assert code == 0
    assert out["value"] <= 1e-3
    assert out["symmetry_residual"] <= 1e-4 and out["marginal_residual"] <= 1e-8


def test_eoc_command_on_bell_saves_extension(capsys, write, tmp_path):
    ext_path = tmp_path / "ext.json"
    code, out, _ = run(capsys, "eoc", write(bell()), *FAST_EOC, "--save-extension", ext_path)
    assert code == 0 and out["value"] <= 1 + 1e-6
    ext = qio.read_state(ext_path)
    assert ext.dims == (2, out["ancilla_dims"][0], 2, out["ancilla_dims"][1])


def test_eoc_with_trivial_ancilla_on_pure_product(capsys, write):
    v = np.kron([1, 0], [1, 1]) / np.sqrt(2)
    rho = DensityMatrix(np.outer(v, v).astype(complex), (2, 2), 1)
    code, out, _ = run(capsys, "eoc", write(rho), "--ancilla", "1", "1", *FAST_EOC)
    assert code == 0 and abs(out["value"]) <= 1e-8


def test_eoc_gate_failure_exits_three(capsys, write):
    code, out, err = run(capsys, "eoc", write(random_mixed((2, 3), seed=11)), "--ancilla", "1", "1",
                         "--restarts", "1", "--max-iters", "5", "--seed", "0")
    assert code == 3 and out is None
    assert json.loads(err)["best"] > 1e-4


def test_gen_werner_and_bell(capsys, tmp_path):
    path = tmp_path / "w.json"
    assert run(capsys, "gen", "werner", "--p", "0", "-o", path)[0] == 0
    assert np.allclose(qio.read_state(path).data, np.eye(4) / 4, atol=0)
    main(["gen", "bell", "psi-"])
    printed = capsys.readouterr().out
    assert np.array_equal(qio.state_from_json(printed).data, bell("psi-").data)


def test_gen_same_seed_same_bytes(capsys):
    outputs = []
    for _ in range(2):
        main(["gen", "cq-state", "--dims", "2", "3", "--seed", "8"])
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1]
    main(["gen", "cq-state", "--dims", "2", "3", "--seed", "9"])
    assert capsys.readouterr().out != outputs[0]


def test_gen_usage_errors(capsys):
    assert run(capsys, "gen", "werner")[0] == 2
    assert run(capsys, "gen", "bell", "--decomposition-out", "x.json")[0] == 2
    assert run(capsys, "gen", "werner", "--p", "2")[0] == 2


def test_strict_requires_seed(capsys, write):
    assert run(capsys, "--strict", "gen", "random-pure")[0] == 2
    assert run(capsys, "gen", "random-pure", "--strict")[0] == 2
    assert run(capsys, "--strict", "gen", "bell")[0] == 0
    path = write(werner(0.5))
    assert run(capsys, "--strict", "cc", path)[0] == 2
    assert run(capsys, "--strict", "cc", path, "--mode", "fixed")[0] == 0


def test_check_extension(capsys, write, tmp_path):
    rho = random_mixed((2, 2), seed=6)
    ext = write(DensityMatrix(rho.data, (2, 1, 2, 1), 2), "ext.json")
    code, out, _ = run(capsys, "check-extension", ext, "--marginal", write(rho))
    assert code == 0 and out["is_extension"] and out["marginal_residual"] <= 1e-12
    other = write(random_mixed((2, 2), seed=7), "other.json")
    _, out, _ = run(capsys, "check-extension", ext, "--marginal", other)
    assert not out["is_extension"]
    wrong_dims = write(random_mixed((2, 3), seed=7), "wrong.json")
    _, out, _ = run(capsys, "check-extension", ext, "--marginal", wrong_dims)
    assert not out["is_extension"] and out["marginal_residual"] is None


def test_check_extension_on_symmetric_state(capsys, write):
    # Bell state with 1x1 ancillas is its own (symmetric) extension
    ext = DensityMatrix(bell().data, (2, 1, 2, 1), 2)
    code, out, _ = run(capsys, "check-extension", write(ext, "ext.json"), "--marginal", write(bell()))
    assert code == 0 and out["is_extension"] and out["symmetric"]
    assert out["symmetry_residual"] <= 1e-6


def test_check_extension_needs_ancillas(capsys, write):
    assert run(capsys, "check-extension", write(bell()), "--marginal", write(bell(), "m.json"))[0] == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "qcc.cli", "gen", "bell"], capture_output=True, text=True)
    assert r.returncode == 0
    assert np.array_equal(qio.state_from_json(r.stdout).data, bell().data)

import json

import numpy as np
import pytest

import gbst.cli as cli
import gbst.trig as trig
from gbst.coding import sample_gmrf_blocks
from gbst.dataset import make_dataset, write_gbsr
from gbst.graph import GraphFamily, GraphParams, build_ggl


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_all_pass(capsys):
    code, out, _ = run(capsys, "verify")
    lines = [l for l in out.strip().split("\n") if l]
    assert code == 0
    assert len(lines) == 20
    assert all(l.startswith("PASS") for l in lines)


def test_verify_single_check(capsys):
    code, out, _ = run(capsys, "verify", "--n", "8", "--kind", "DST7")
    assert code == 0
    assert out.strip().split("\n") == [out.strip()]
    assert out.startswith("PASS DST7 N=8")


def test_verify_negative_control(capsys, monkeypatch):
    real = trig.trig_matrix

    def broken(kind, n):
        t = real(kind, n)
        basis = t.basis.copy()
        basis[0, 0] += 1e-3
        return type(t)(t.size, basis, t.eigenvalues.copy())

    monkeypatch.setattr(trig, "trig_matrix", broken)
    code, out, _ = run(capsys, "verify")
    assert code == 1
    assert "FAIL" in out


def test_basis_dump(tmp_path, capsys):
    out_file = tmp_path / "basis.txt"
    code, _, _ = run(capsys, "basis", "--family", "L1", "--w", "1", "--v", "1", "--n", "8",
                     "--out", str(out_file))
    assert code == 0
    lines = out_file.read_text().strip().split("\n")
    assert lines[0] == "GBT N=8 family=L1 w=1 v=1"
    basis = np.loadtxt(lines[1:])
    ref = trig.trig_matrix(trig.TrigTransformKind.DST7, 8).basis
    assert np.abs(basis - ref).max() < 1e-8


def test_basis_dct2_and_plot_data(tmp_path, capsys):
    out_file = tmp_path / "b.txt"
    plot_file = tmp_path / "b.plot"
    code, _, _ = run(capsys, "basis", "--w", "1", "--v", "0", "--n", "8",
                     "--out", str(out_file), "--plot-data", str(plot_file))
    assert code == 0
    basis = np.loadtxt(out_file.read_text().strip().split("\n")[1:])
    ref = trig.trig_matrix(trig.TrigTransformKind.DCT2, 8).basis
    assert np.abs(basis - ref).max() < 1e-8
    plot = plot_file.read_text().strip().split("\n")
    assert plot[0] == "# k=0"
    assert len(plot) == 8 * 9


def test_learn_json(tmp_path, capsys):
    lap = build_ggl(GraphParams(1, 1, GraphFamily.L1), 8)
    blocks = sample_gmrf_blocks(lap, lap, 10_000, seed=17)
    path = tmp_path / "data.gbsr"
    write_gbsr(path, make_dataset(np.rint(blocks * 64)))
    code, out, _ = run(capsys, "learn", "--data", str(path), "--family", "L1",
                       "--direction", "row", "--json")
    assert code == 0
    record = json.loads(out)
    assert record["alpha"] == 1.0
    assert record["converged"] is True


def test_learn_truncated_file(tmp_path, capsys):
    path = tmp_path / "bad.gbsr"
    path.write_bytes(b"GBSR\x01\x04\x00\x05\x00\x00\x00abc")
    code, _, err = run(capsys, "learn", "--data", str(path))
    assert code == 3
    assert "error" in err


def test_refine(capsys):
    code, out, _ = run(capsys, "refine", "--w", "2", "--v", "1.6", "--json")
    assert code == 0
    assert json.loads(out)["alpha"] == 0.75


def test_sweep_argmax(tmp_path, capsys):
    out_file = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "sweep", "--n", "16", "--alphas", "0:0.25:2",
                     "--model-v", "0.75", "--out", str(out_file))
    assert code == 0
    lines = out_file.read_text().strip().split("\n")
    assert lines[0] == "alpha,coding_gain_db,energy_compaction,entropy_bits"
    rows = [tuple(float(x) for x in l.split(",")) for l in lines[1:]]
    assert len(rows) == 9
    best = max(rows, key=lambda r: r[1])
    assert best[0] == 0.75


def test_sweep_bad_step(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["sweep", "--n", "8", "--alphas", "0:0.3:1", "--model-v", "1"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_gen_matrix(tmp_path, capsys):
    out_file = tmp_path / "table.txt"
    code, _, _ = run(capsys, "gen-matrix", "--kind", "DST7", "--n", "4", "--out", str(out_file))
    assert code == 0
    lines = out_file.read_text().strip().split("\n")
    assert lines[0] == "INTGBT N=4 shift=7"
    table = np.loadtxt(lines[1:])
    assert np.abs(table).max() <= 127


def test_gen_matrix_from_graph_params(capsys):
    code, out, _ = run(capsys, "gen-matrix", "--family", "L2", "--w", "1", "--v", "0.5", "--n", "8")
    assert code == 0
    assert out.startswith("INTGBT N=8 shift=7.5")


def test_sample_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for path in (a, b):
        code, _, _ = run(capsys, "sample", "--w", "1", "--v", "1", "--n", "4",
                         "--count", "10", "--seed", "7", "--out", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    assert np.loadtxt(a).shape == (10, 4)


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["basis", "--w", "1", "--n", "8"])  # missing --v
    assert exc.value.code == 2
    capsys.readouterr()


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "--bogus"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_invalid_params_exit_code(capsys):
    code, _, err = run(capsys, "basis", "--w", "-1", "--v", "1", "--n", "8")
    assert code == 3
    assert "error" in err

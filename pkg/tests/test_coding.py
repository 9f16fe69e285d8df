import numpy as np
import pytest

from gbst.coding import (
    GMRFModel,
    alpha_sweep,
    evaluate_metrics,
    int_matrix_text,
    integerize,
    model_covariance,
    quantize_roundtrip_distortion,
    round_half_away,
    sample_covariance,
    sample_gmrf,
    sweep_csv,
    transform_coding_gain,
)
from gbst.errors import (
    IntegerOverflowError,
    InvalidParameterError,
    NonPositiveDefiniteError,
)
from gbst.estimation import SampleCovariance
from gbst.graph import GraphFamily, GraphParams, build_ggl
from gbst.spectral import TransformMatrix, derive_gbt
from gbst.trig import TrigTransformKind, trig_matrix

L1, L2 = GraphFamily.L1, GraphFamily.L2
K = TrigTransformKind


def identity_transform(n):
    return TransformMatrix(n, np.eye(n), np.zeros(n))


def test_round_half_away():
    assert np.array_equal(round_half_away(np.array([0.5, 1.5, -0.5, -1.5, 0.49])), [1, 2, -1, -2, 0])


def test_sample_gmrf_deterministic():
    lap = build_ggl(GraphParams(1, 1, L1), 4)
    a = sample_gmrf(GMRFModel(lap, seed=7), 100)
    b = sample_gmrf(GMRFModel(lap, seed=7), 100)
    assert a.tobytes() == b.tobytes()
    c = sample_gmrf(GMRFModel(lap, seed=8), 100)
    assert a.tobytes() != c.tobytes()


def test_sample_gmrf_single():
    lap = build_ggl(GraphParams(1, 1, L1), 4)
    x = sample_gmrf(GMRFModel(lap, seed=1), 1)
    assert x.shape == (1, 4)
    assert np.all(np.isfinite(x))
    with pytest.raises(InvalidParameterError):
        sample_gmrf(GMRFModel(lap, seed=1), 0)


def test_sample_gmrf_covariance_mc():
    lap = build_ggl(GraphParams(1, 1, L1), 4)
    x = sample_gmrf(GMRFModel(lap, seed=99), 1_000_000)
    s = x.T @ x / len(x)
    linv = model_covariance(lap).matrix
    se = np.sqrt((linv**2 + np.outer(np.diag(linv), np.diag(linv))) / len(x))
    assert np.all(np.abs(s - linv) < 3 * se)


def test_streaming_covariance_matches_batch():
    lap = build_ggl(GraphParams(1, 0.5, L2), 8)
    x = sample_gmrf(GMRFModel(lap, seed=5), 10_000)
    s = sample_covariance(GMRFModel(lap, seed=5), 10_000)
    assert np.allclose(s.matrix, x.T @ x / len(x), atol=1e-12)


def test_non_pd_precision_rejected():
    with pytest.raises(NonPositiveDefiniteError):
        GMRFModel(build_ggl(GraphParams(1, 0, L1), 4), seed=0)


def test_coding_gain_isotropic_is_zero():
    s = SampleCovariance(8, np.eye(8))
    for t in (identity_transform(8), trig_matrix(K.DCT2, 8)):
        assert transform_coding_gain(t, s) == pytest.approx(0.0, abs=1e-12)


def test_coding_gain_hand_case():
    s = SampleCovariance(2, np.diag([4.0, 1.0]))
    g = transform_coding_gain(identity_transform(2), s)
    assert g == pytest.approx(10 * np.log10(2.5 / 2.0), abs=1e-12)


def test_coding_gain_matched_transform_is_klt():
    lap = build_ggl(GraphParams(1, 1, L1), 8)
    s = model_covariance(lap)
    dst7 = trig_matrix(K.DST7, 8)
    dct2 = trig_matrix(K.DCT2, 8)
    g_dst7 = transform_coding_gain(dst7, s)
    g_dct2 = transform_coding_gain(dct2, s)
    assert g_dst7 >= g_dct2
    # KLT gain from the exact eigendecomposition of S
    eigvals = np.linalg.eigvalsh(s.matrix)
    klt = 10 * np.log10((np.trace(s.matrix) / 8) / np.exp(np.mean(np.log(eigvals))))
    assert g_dst7 == pytest.approx(klt, abs=1e-9)
    # matched transform diagonalizes S exactly
    off = s.matrix - dst7.basis @ np.diag(np.diag(dst7.basis.T @ s.matrix @ dst7.basis)) @ dst7.basis.T
    assert np.abs(dst7.basis.T @ s.matrix @ dst7.basis - np.diag(np.diag(dst7.basis.T @ s.matrix @ dst7.basis))).max() <= 1e-9 * np.trace(s.matrix)
    assert np.abs(off).max() < 1e-9


def test_coding_gain_rejects_non_pd():
    with pytest.raises(NonPositiveDefiniteError):
        transform_coding_gain(identity_transform(2), SampleCovariance(2, np.diag([1.0, 0.0])))


def test_evaluate_metrics_ranges():
    lap = build_ggl(GraphParams(1, 0.75, L1), 16)
    m = evaluate_metrics(derive_gbt(lap), model_covariance(lap))
    assert 0 <= m.energy_compaction <= 1
    assert np.isfinite(m.entropy_proxy_bits)
    assert np.isfinite(m.coding_gain_db)


def test_alpha_sweep_peak_at_generating_alpha():
    lap = build_ggl(GraphParams(1, 0.75, L1), 16)
    model = GMRFModel(lap, seed=0)
    alphas = [i * 0.25 for i in range(9)]
    rows = alpha_sweep(model, 16, L1, alphas)
    gains = [m.coding_gain_db for _, m in rows]
    assert rows[int(np.argmax(gains))][0] == 0.75
    # unimodal on the grid
    peak = int(np.argmax(gains))
    assert all(gains[i] < gains[i + 1] for i in range(peak))
    assert all(gains[i] > gains[i + 1] for i in range(peak, len(gains) - 1))


def test_alpha_sweep_alpha_zero_is_dct2():
    lap = build_ggl(GraphParams(1, 0.75, L1), 8)
    model = GMRFModel(lap, seed=0)
    rows = alpha_sweep(model, 8, L1, [0.0])
    dct2_gain = transform_coding_gain(trig_matrix(K.DCT2, 8), model_covariance(lap))
    assert rows[0][1].coding_gain_db == pytest.approx(dct2_gain, abs=1e-12)


def test_alpha_sweep_empty():
    lap = build_ggl(GraphParams(1, 1, L1), 8)
    with pytest.raises(InvalidParameterError):
        alpha_sweep(GMRFModel(lap, 0), 8, L1, [])


def test_sweep_csv_format():
    lap = build_ggl(GraphParams(1, 1, L1), 4)
    rows = alpha_sweep(GMRFModel(lap, 0), 4, L1, [0.0, 1.0])
    lines = sweep_csv(rows).strip().split("\n")
    assert lines[0] == "alpha,coding_gain_db,energy_compaction,entropy_bits"
    assert len(lines) == 3
    assert lines[1].startswith("0,")


def test_integerize_dct2():
    m = integerize(trig_matrix(K.DCT2, 4))
    assert np.array_equal(m.entries[0], [64, 64, 64, 64])
    assert m.scale_shift == 7.0


def test_integerize_overflow_guard():
    with pytest.raises(IntegerOverflowError):
        integerize(identity_transform(4))


@pytest.mark.parametrize("n", [4, 8, 16, 32])
@pytest.mark.parametrize("kind", list(K))
def test_integerize_within_budget(kind, n):
    m = integerize(trig_matrix(kind, n))
    assert np.abs(m.entries).max() <= 127


def test_integerize_near_orthogonality():
    for n in (4, 8, 16, 32):
        m = integerize(trig_matrix(K.DST7, n))
        scale_sq = (64 * np.sqrt(n)) ** 2
        gram = m.entries @ m.entries.T  # rows are basis vectors
        assert np.abs(gram - scale_sq * np.eye(n)).max() <= n * 64 * np.sqrt(n)


def test_int_matrix_text():
    m = integerize(trig_matrix(K.DCT2, 4))
    lines = int_matrix_text(m).strip().split("\n")
    assert lines[0] == "INTGBT N=4 shift=7"
    assert lines[1] == "64 64 64 64"


def test_quantize_small_step_noise_bound():
    # coefficients with stratified fractional parts: the realized error is
    # an equispaced sample of U(-step/2, step/2), so mse < step^2/12 holds
    # deterministically and probes the step -> 0 behavior
    from gbst.spectral import inverse_separable

    t = trig_matrix(K.DCT2, 8)
    step = 1e-6
    m = 20 * 64
    frac = (np.arange(m) + 0.5) / m - 0.5
    coeffs = ((np.arange(m) % 7) - 3 + frac) * step * 1e3  # unit-ish scale after spreading
    blocks = np.stack(
        [inverse_separable(c.reshape(8, 8), t, t) for c in coeffs.reshape(20, 64) * 1]
    )
    eff_step = step * 1e3
    mse, _ = quantize_roundtrip_distortion(blocks, t, t, eff_step)
    assert mse <= eff_step**2 / 12 * (1 + 1e-3)


def test_quantize_zero_blocks():
    t = trig_matrix(K.DCT2, 4)
    mse, entropy = quantize_roundtrip_distortion(np.zeros((3, 4, 4)), t, t, 1.0)
    assert mse == 0.0
    assert entropy == 0.0


def test_quantize_invalid_step():
    t = trig_matrix(K.DCT2, 4)
    with pytest.raises(InvalidParameterError):
        quantize_roundtrip_distortion(np.zeros((1, 4, 4)), t, t, 0.0)


def test_matched_transform_beats_dct2_at_equal_entropy():
    # rate-distortion comparison on data from the alpha=1 graph
    from gbst.coding import sample_gmrf_blocks

    lap = build_ggl(GraphParams(1, 1, L1), 8)
    blocks = sample_gmrf_blocks(lap, lap, 2000, seed=42)
    gbst_t = derive_gbt(lap)
    dct2_t = trig_matrix(K.DCT2, 8)
    steps = np.geomspace(0.05, 2.0, 12)
    curves = {}
    for name, t in (("gbst", gbst_t), ("dct2", dct2_t)):
        pts = [quantize_roundtrip_distortion(blocks, t, t, s) for s in steps]
        curves[name] = np.array(pts)  # (mse, entropy)
    # interpolate dct2 mse at gbst entropies inside the shared range
    dct2 = curves["dct2"][np.argsort(curves["dct2"][:, 1])]
    lo, hi = dct2[0, 1], dct2[-1, 1]
    checked = 0
    for mse, ent in curves["gbst"]:
        if lo <= ent <= hi:
            ref = np.interp(ent, dct2[:, 1], dct2[:, 0])
            assert mse <= ref * (1 + 1e-6)
            checked += 1
    assert checked >= 5

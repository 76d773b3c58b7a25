import numpy as np
import pytest

from auramimo import (
    ChannelTensor,
    correlation_metrics,
    pair_correlation,
    read_tensor_binary,
    write_tensor_binary,
    write_tensor_text,
)


def _tensor(coeff, delays=None, user_ids=None, carrier=3.5e9, seed=7):
    coeff = np.asarray(coeff, dtype=np.complex128)
    u, _, _, c, s = coeff.shape
    if delays is None:
        delays = np.zeros((u, c, s))
    return ChannelTensor(
        user_ids=user_ids or tuple(range(u)),
        coefficients=coeff,
        delays=delays,
        carrier_hz=carrier,
        seed=seed,
    )


def test_identical_channels_fully_correlated():
    rng = np.random.default_rng(0)
    h = rng.normal(size=(1, 1, 8, 3, 5)) + 1j * rng.normal(size=(1, 1, 8, 3, 5))
    tensor = _tensor(np.concatenate([h, h], axis=0), user_ids=(1, 2))
    report = correlation_metrics(tensor)
    np.testing.assert_allclose(report.pair_correlation[(1, 2)], 1.0, atol=1e-12)
    assert report.pair_correlation_mean[(1, 2)] == pytest.approx(1.0, abs=1e-12)


def test_orthogonal_channels_uncorrelated():
    h = np.zeros((2, 1, 1, 2, 1), dtype=np.complex128)
    h[0, 0, 0, 0, 0] = 1.0  # user 0 lives on cluster 0
    h[1, 0, 0, 1, 0] = 1.0  # user 1 lives on cluster 1
    report = correlation_metrics(_tensor(h))
    assert report.pair_correlation[(0, 1)][0] == 0.0


def test_zero_channel_reports_zero_not_nan():
    h = np.zeros((2, 1, 4, 2, 3), dtype=np.complex128)
    corr = pair_correlation(h[0].reshape(8, 3), h[1].reshape(8, 3))
    np.testing.assert_array_equal(corr, np.zeros(3))


def test_gaussian_channels_match_known_mean(rng):
    # For iid complex Gaussian vectors of length n the expected normalized
    # inner product is ~ sqrt(pi)/(2 sqrt(n)).  n = 448 mirrors a 64-element,
    # 7-cluster configuration.
    n = 448
    trials = 400
    h_u = rng.normal(size=(n, trials)) + 1j * rng.normal(size=(n, trials))
    h_v = rng.normal(size=(n, trials)) + 1j * rng.normal(size=(n, trials))
    corr = pair_correlation(h_u, h_v)
    expected = np.sqrt(np.pi) / 2 / np.sqrt(n)
    assert corr.mean() == pytest.approx(expected, rel=0.15)


def test_binary_round_trip(tmp_path, rng):
    coeff = rng.normal(size=(2, 1, 8, 3, 4)) + 1j * rng.normal(size=(2, 1, 8, 3, 4))
    delays = np.abs(rng.normal(size=(2, 3, 4))) * 1e-7
    tensor = _tensor(coeff, delays, user_ids=(1, 2), carrier=2.6e9, seed=123)
    path = tmp_path / "t.bin"
    write_tensor_binary(tensor, path)
    back = read_tensor_binary(path)
    assert back.shape == tensor.shape
    assert back.carrier_hz == 2.6e9
    assert back.seed == 123
    # Coefficients survive at float32 precision, delays at full float64.
    np.testing.assert_array_equal(
        back.coefficients, tensor.coefficients.astype(np.complex64)
    )
    np.testing.assert_array_equal(back.delays, tensor.delays)


def test_binary_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"NOTMAGIC" + b"\x00" * 64)
    with pytest.raises(ValueError, match="magic"):
        read_tensor_binary(path)


def test_binary_rejects_truncation(tmp_path, rng):
    coeff = rng.normal(size=(1, 1, 4, 2, 2)) + 0j
    tensor = _tensor(coeff)
    path = tmp_path / "t.bin"
    write_tensor_binary(tensor, path)
    data = path.read_bytes()
    path.write_bytes(data[: len(data) - 40])
    with pytest.raises(ValueError, match="truncated"):
        read_tensor_binary(path)


def test_text_export_row_count(tmp_path, rng):
    coeff = rng.normal(size=(2, 1, 3, 2, 2)) + 0j
    tensor = _tensor(coeff, user_ids=(4, 9))
    path = tmp_path / "t.tsv"
    write_tensor_text(tensor, path)
    lines = path.read_text().splitlines()
    assert lines[2].split("\t")[:5] == ["user", "rx", "tx", "cluster", "snapshot"]
    body = lines[3:]
    assert len(body) == 2 * 1 * 3 * 2 * 2
    # repr floats round-trip exactly.
    first = body[0].split("\t")
    assert float(first[5]) == tensor.coefficients[0, 0, 0, 0, 0].real
    assert first[0] == "4"


def test_tensor_validation():
    bad = np.full((1, 1, 1, 1, 1), np.nan + 0j)
    with pytest.raises(ValueError):
        _tensor(bad)
    with pytest.raises(ValueError):
        _tensor(
            np.zeros((1, 1, 1, 1, 1), dtype=complex),
            delays=np.array([[[-1e-9]]]),
        )

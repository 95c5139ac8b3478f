import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from qdct_rdh.block_model import scan_blocks, unscan_blocks
from qdct_rdh.metrics import psnr
from qdct_rdh.synth import gradient_plane
from qdct_rdh.transform_quant import (
    PixelPlane,
    QuantParams,
    decode_frame,
    dequantize_inverse_transform,
    encode_frame,
    forward_transform_4x4,
    quantize,
)
import oracles

residuals = arrays(np.int64, (4, 4), elements=st.integers(-255, 255))

# fixed grid and its oracle-computed transform / qp 28 levels / reconstruction
GRID = [[52, -13, 7, 0], [21, 9, -4, 3], [-8, 2, 11, -6], [1, 0, -3, 5]]
GRID_W = [[77, 115, 59, 90], [116, 240, 144, 180], [21, 43, 75, 74], [-17, -35, -43, 150]]
GRID_Z28 = [[1, 1, 1, 1], [1, 1, 1, 1], [0, 0, 1, 1], [0, 0, 0, 1]]
GRID_R28 = [[43, -18, 10, 1], [16, 11, -3, 2], [2, 2, 6, -4], [1, -5, -3, 3]]

# orthonormal scaling of the core transform
_S = np.outer(*(2 * [np.array([0.5, 10**-0.5, 0.5, 10**-0.5])]))


def test_constant_block_is_dc_only():
    out = forward_transform_4x4(np.full((4, 4), 9))
    assert out[0, 0] == 144
    assert np.count_nonzero(out) == 1
    assert not forward_transform_4x4(np.zeros((4, 4), int)).any()


def test_fixed_grid_against_oracle_values():
    np.testing.assert_array_equal(forward_transform_4x4(GRID), GRID_W)
    assert oracles.core_transform(GRID) == GRID_W
    np.testing.assert_array_equal(unscan_blocks(quantize(GRID_W, 28)), GRID_Z28)
    np.testing.assert_array_equal(dequantize_inverse_transform(scan_blocks(np.array(GRID_Z28)), 28), GRID_R28)


@given(residuals)
def test_transform_matches_matrix_product_oracle(x):
    assert forward_transform_4x4(x).tolist() == oracles.core_transform(x.tolist())


@given(residuals, st.integers(0, 51))
def test_quantizer_matches_scalar_oracle(x, qp):
    w = forward_transform_4x4(x)
    got = unscan_blocks(quantize(w, qp)).tolist()
    assert got == oracles.quantize_scalar(w.tolist(), qp)
    assert dequantize_inverse_transform(quantize(w, qp), qp).tolist() == oracles.dequant_inverse_scalar(got, qp)


def test_zero_input_stays_zero():
    for qp in (0, 28, 51):
        assert not quantize(np.zeros((4, 4), int), qp).any()
        assert not dequantize_inverse_transform(np.zeros(16, int), qp).any()


@given(arrays(np.int64, (4, 4), elements=st.integers(-4000, 4000)), st.integers(0, 45))
def test_six_qp_steps_halve_levels(w, qp):
    a = quantize(w, qp)
    b = quantize(w, qp + 6)
    assert np.all(np.abs(b * 2 - a) <= 2)  # b within one level of a / 2


def test_step_table():
    assert QuantParams(28).step == 16.0
    for qp in range(52):
        assert QuantParams(qp).step == pytest.approx(oracles.qstep(qp))
    with pytest.raises(ValueError):
        QuantParams(52)


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1))
def test_reconstruction_error_bounded_by_step_at_qp28(seed):
    rng = np.random.default_rng(seed)
    x = rng.integers(-255, 256, size=(64, 4, 4))
    r = dequantize_inverse_transform(quantize(forward_transform_4x4(x), 28), 28)
    step = oracles.qstep(28)
    coeff_err = np.abs(forward_transform_4x4(r - x) * _S)
    assert coeff_err.max() <= step
    rms = np.sqrt(((r - x) ** 2).mean(axis=(1, 2)))
    assert rms.max() <= step


@pytest.mark.parametrize("qp", range(0, 52, 3))
def test_coefficient_error_bound_all_qp(qp):
    x = np.random.default_rng(qp).integers(-255, 256, size=(4000, 4, 4))
    r = dequantize_inverse_transform(quantize(forward_transform_4x4(x), qp), qp)
    # pixel rounding adds under one orthonormal unit on top of the dead-zone error
    assert np.abs(forward_transform_4x4(r - x) * _S).max() <= oracles.qstep(qp) + 1.0


def test_lower_qp_reconstructs_better():
    x = np.random.default_rng(5).integers(-255, 256, size=(500, 4, 4))

    def mse(qp):
        r = dequantize_inverse_transform(quantize(forward_transform_4x4(x), qp), qp)
        return ((r - x) ** 2).mean()

    assert mse(22) <= mse(34)


def test_qcif_frame_geometry():
    levels = encode_frame(gradient_plane(176, 144), 28)
    assert levels.shape == (99, 16, 16)


def test_flat_grey_survives_qp28():
    plane = PixelPlane(np.full((32, 48), 128, np.uint8))
    levels = encode_frame(plane, 28)
    assert np.all(levels[..., 0] == 32) and not levels[..., 1:].any()
    assert decode_frame(levels, 3, 2, 28) == plane


@pytest.mark.parametrize("seed", range(4))
def test_smooth_content_quality_qp28(seed):
    plane = gradient_plane(176, 144, seed=seed)
    out = decode_frame(encode_frame(plane, 28), 11, 9, 28)
    assert psnr(plane, out) > 30.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(20, 40))
def test_decode_encode_idempotent(seed, qp):
    plane = gradient_plane(64, 48, seed=seed)
    once = decode_frame(encode_frame(plane, qp), 4, 3, qp)
    twice = decode_frame(encode_frame(once, qp), 4, 3, qp)
    assert once == twice


def test_misaligned_plane_rejected():
    with pytest.raises(ValueError):
        PixelPlane(np.zeros((144, 170), np.uint8))

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdct_rdh.block_model import CoefficientStream, Macroblock, QdctBlock
from qdct_rdh.metrics import (
    CapacityMetrics,
    bir,
    block_costs,
    capacity_metrics,
    coding_cost,
    psnr,
    se_length,
    ue_length,
)
from qdct_rdh.rdh_engine import embed_stream
from qdct_rdh.transform_quant import PixelPlane
from conftest import fig4_vectors
import oracles

vectors = st.lists(
    st.one_of(st.just(0), st.just(0), st.integers(-40, 40)), min_size=16, max_size=16
)


def test_ue_se_against_codewords():
    for k in range(300):
        assert ue_length(k) == len(oracles.exp_golomb_bits(k))
    for v in range(-150, 151):
        assert se_length(v) == len(oracles.exp_golomb_bits(oracles.signed_mapping(v)))


def test_cost_examples():
    assert coding_cost(QdctBlock.zeros()) == 1
    assert coding_cost(QdctBlock((0,) * 15 + (1,))) == 15


@given(vectors)
def test_cost_matches_codeword_oracle(v):
    assert coding_cost(v) == oracles.run_level_cost_by_codewords(v)


@given(st.lists(vectors, min_size=1, max_size=20))
def test_vectorized_cost_matches_scalar(vs):
    arr = np.array(vs)
    assert block_costs(arr).tolist() == [coding_cost(v) for v in vs]


def test_cost_monotone_exhaustive():
    rng = np.random.default_rng(11)
    for _ in range(3000):
        v = np.where(rng.random(16) < 0.3, rng.integers(-6, 7, 16), 0)
        v[15] = 0
        base = coding_cost(v)
        for s in (1, -1):
            w = v.copy()
            w[15] = s
            assert coding_cost(w) > base
        w = v.copy()
        w[15] = int(rng.choice([-3, -2, -1, 1, 2, 3]))
        shifted = w.copy()
        shifted[15] += np.sign(w[15])
        assert coding_cost(shifted) >= coding_cost(w)


def test_bir_values():
    assert 100 * bir(597.18, 602.47) == pytest.approx(0.886, abs=1e-3)
    assert 100 * bir(19.66, 22.06) == pytest.approx(12.21, abs=1e-2)
    assert bir(500, 500) == 0
    with pytest.raises(ValueError):
        bir(0, 3)


def _plane(value, shape=(16, 32)):
    return PixelPlane(np.full(shape, value, np.uint8))


def test_psnr_closed_forms():
    a = _plane(100)
    assert psnr(a, a) == math.inf
    assert psnr(a, _plane(101)) == pytest.approx(48.13, abs=0.01)
    half = a.samples.copy()
    half[:, ::2] += 2
    assert psnr(a, PixelPlane(half)) == pytest.approx(45.12, abs=0.01)
    with pytest.raises(ValueError):
        psnr(a, _plane(100, (16, 16)))


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_psnr_symmetric_and_scale(seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(64, 192, size=(16, 16))
    e = rng.integers(-10, 11, size=(16, 16))
    if not e.any():
        e[0, 0] = 1
    b = a + e
    c = a + 2 * e
    assert psnr(a, b) == pytest.approx(psnr(b, a))
    assert psnr(a, b) == pytest.approx(oracles.psnr_scalar(a, b))
    assert psnr(a, b) - psnr(a, c) == pytest.approx(20 * math.log10(2), abs=0.01)


def _stream(mb_vectors):
    mb = Macroblock.from_vectors(mb_vectors)
    return CoefficientStream.from_macroblocks([[mb]], 1, 1, 28)


def test_fig4_capacity_metrics():
    m = capacity_metrics(_stream(fig4_vectors()))
    assert (m.embeddable_blocks, m.zero_ac15, m.paired_zero_ac15, m.embedded_bits) == (8, 7, 6, 9)
    assert m.cp == 0.75 and m.full == 0.875 and m.ec == 9 / 8


def test_ideal_case_is_one_and_a_half():
    vs = [[1] + [0] * 15] * 16
    m = capacity_metrics(_stream(vs))
    assert m.ec == 1.5 and m.cp == 1 and m.full == 1


def test_undefined_without_embeddable_blocks():
    m = capacity_metrics(_stream([]))
    assert not m.defined and math.isnan(m.ec)
    assert not CapacityMetrics(0, 0, 0, 0).defined


def test_embedded_bits_validated():
    s = _stream(fig4_vectors())
    assert capacity_metrics(s, 3).cp == 0.25
    with pytest.raises(ValueError):
        capacity_metrics(s, 4)
    with pytest.raises(ValueError):
        capacity_metrics(s, 12)


def test_report_reconciles(rng):
    from corpus import make_case

    for _ in range(10):
        case = make_case(rng)
        _, report = embed_stream(case.stream, case.payload, case.selection)
        assert report.capacity_bits == case.capacity
        assert report.embedded_bits == 3 * -(-report.message_bits // 3)
        for row in report.frames:
            assert row.cost_marked >= row.cost_original
            assert row.bir >= 0 or math.isnan(row.bir)
            if not math.isnan(row.ec):
                assert row.cp <= row.full <= 1 and row.ec <= 1.5

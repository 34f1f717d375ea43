import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hilberg.codes import (
    LZ78Codec,
    ShannonFanoCodec,
    code_pmi,
    deserialize_santa_fe,
    elias_gamma_bits,
    elias_gamma_length,
    kraft_check,
    lz78_decode,
    lz78_encode,
    lz78_length,
    lz78_parse,
    make_codec,
    serialize_santa_fe,
    shannon_fano_length,
)
from hilberg.errors import ParameterError, ResourceError
from hilberg.measures import log_prob
from hilberg.pmi import pmi_exact
from hilberg.sampling import ProcessSpec, Window, replicate_rng, sample_window

MIX = ProcessSpec.mixture()
SF = ProcessSpec.santa_fe(0.5)


def _naive_phrases(seq):
    # textbook LZ78 on tuples; independent of the trie implementation
    seen, cur, count = set(), (), 0
    for x in seq:
        cur = cur + (x,)
        if cur not in seen:
            seen.add(cur)
            count += 1
            cur = ()
    return count + (1 if cur else 0)


def _layout_bits(n, c, m):
    return elias_gamma_length(n) + sum(math.ceil(math.log2(j)) for j in range(1, c + 1)) + c * math.ceil(math.log2(m + 1))


def test_elias_gamma():
    assert [elias_gamma_length(n) for n in (1, 2, 3, 4, 6, 8)] == [1, 3, 3, 5, 5, 7]
    assert elias_gamma_bits(6) == "00110"
    with pytest.raises(ParameterError):
        elias_gamma_length(0)


def test_lz78_examples():
    cl = lz78_length([0, 0, 1, 0, 1, 1], 2)
    assert (cl.bits, cl.phrase_count) == (14, 3)
    assert lz78_parse([0, 0, 1, 0, 1, 1], 2) == [(0, 0), (1, 1), (2, 1)]
    assert lz78_length([0], 2).bits == 3


def test_lz78_terminator():
    assert lz78_parse([0, 1, 0], 2) == [(0, 0), (0, 1), (1, 2)]


@given(st.integers(2, 6).flatmap(lambda m: st.tuples(st.just(m), st.lists(st.integers(0, m - 1), min_size=1, max_size=300))))
def test_lz78_length_matches_layout(mx):
    m, x = mx
    cl = lz78_length(x, m)
    assert cl.phrase_count == _naive_phrases(x)
    assert cl.bits == _layout_bits(len(x), cl.phrase_count, m)
    assert len(lz78_encode(x, m)) == cl.bits


@given(st.integers(2, 6).flatmap(lambda m: st.tuples(st.just(m), st.lists(st.lists(st.integers(0, m - 1), min_size=1, max_size=60), min_size=1, max_size=4))))
def test_lz78_prefix_free_round_trip(mxs):
    # codewords concatenated back to back decode one at a time
    m, xs = mxs
    stream = "".join(lz78_encode(x, m) for x in xs)
    pos = 0
    for x in xs:
        out, used = lz78_decode(stream[pos:], m, return_end=True)
        assert out == x
        pos += used
    assert pos == len(stream)


def test_lz78_bytes_round_trip():
    data = bytes(replicate_rng(9, 0).integers(0, 256, 2000, dtype=np.uint8))
    bits = lz78_encode(data, 256)
    assert bytes(lz78_decode(bits, 256)) == data
    assert len(bits) == lz78_length(data, 256).bits


@pytest.mark.parametrize("n", [100, 1000, 10000])
def test_constant_string_sublinear(n):
    c = lz78_length([0] * n, 2).phrase_count
    assert math.sqrt(2 * n) - 2 <= c <= math.sqrt(2 * n) + 2


def test_lz78_rejects():
    with pytest.raises(ParameterError):
        lz78_length([], 2)
    with pytest.raises(ParameterError):
        lz78_length([0, 2], 2)
    with pytest.raises(ParameterError):
        lz78_decode("1", 2)


@pytest.mark.parametrize("n", [1, 2, 5, 10])
def test_kraft_lz78(n):
    assert kraft_check(LZ78Codec(2), n, 2) <= 1


@pytest.mark.parametrize("n", [1, 4, 8])
def test_kraft_shannon_fano(n):
    assert kraft_check(ShannonFanoCodec(MIX), n, 2) <= 1


def test_kraft_all_lengths_jointly():
    # prefix-free across lengths: the sum over n = 1..10 stays below 1 too
    total = sum(kraft_check(LZ78Codec(2), n, 2) for n in range(1, 11))
    assert total <= 1


def test_kraft_limit():
    with pytest.raises(ResourceError):
        kraft_check(LZ78Codec(2), 30, 2)


def test_shannon_fano_example():
    assert shannon_fano_length(MIX, [0, 0]).bits == 5


@given(st.lists(st.integers(0, 1), min_size=1, max_size=200))
def test_shannon_fano_bounds(bits):
    q = -log_prob(MIX, bits)
    L = shannon_fano_length(MIX, bits).bits
    eg = elias_gamma_length(len(bits))
    assert L - eg >= q - 1e-9
    assert L - q <= 1 + 2 * math.floor(math.log2(len(bits))) + 1


def test_shannon_fano_santa_fe():
    w = sample_window(SF, 50, replicate_rng(1, 0))
    L = shannon_fano_length(SF, w.left).bits
    assert L >= -log_prob(SF, w.left)


@given(st.integers(0, 10**6), st.integers(1, 200))
@settings(max_examples=30)
def test_santa_fe_serialization_round_trip(seed, n):
    w = sample_window(ProcessSpec.santa_fe(0.9), n, replicate_rng(seed, 0))
    back = deserialize_santa_fe(serialize_santa_fe(w.left))
    assert back == [(int(k), int(y)) for k, y in w.left]


def test_serialization_big_indices():
    sym = np.array([[2**70, 1], [1, 0], [2**40 + 3, 0]], dtype=object)
    assert deserialize_santa_fe(serialize_santa_fe(sym)) == [(2**70, 1), (1, 0), (2**40 + 3, 0)]


@pytest.mark.parametrize("n", [1, 7, 64, 500])
def test_code_pmi_constant_window(n):
    w = Window(n, np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8))
    for codec in (LZ78Codec(2), ShannonFanoCodec(MIX)):
        v = code_pmi(codec, w).value
        assert math.isfinite(v)
        assert v >= -2 * elias_gamma_length(n)


def test_lz78_iid_pmi_grows():
    means = []
    for k in (8, 10, 12):
        n = 2**k
        vals = []
        for r in range(20):
            bits = (replicate_rng(5, r).random(2 * n) < 0.5).astype(np.uint8)
            vals.append(code_pmi(LZ78Codec(2), Window(n, bits[:n], bits[n:])).value)
        means.append(np.mean(vals))
    assert means[-1] > 0
    assert means[0] < means[1] < means[2]


@given(st.integers(0, 10**6), st.sampled_from([1, 4, 16, 64, 256]))
@settings(max_examples=40)
def test_shannon_fano_pmi_close_to_exact(seed, n):
    w = sample_window(MIX, n, replicate_rng(seed, 0))
    budget = 2 * (2 * math.floor(math.log2(n)) + 1) + 3
    assert abs(code_pmi(ShannonFanoCodec(MIX), w).value - pmi_exact(w, MIX).value) <= budget


def test_code_pmi_source_label():
    w = sample_window(SF, 16, replicate_rng(0, 0))
    assert code_pmi(make_codec("lz78", SF), w).source == "code:lz78"
    with pytest.raises(ParameterError):
        make_codec("gzip")
    with pytest.raises(ParameterError):
        make_codec("shannon-fano")

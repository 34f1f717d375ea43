"""Computable prefix codes, seen as incomplete measures ``2**-bits``.

Two codes are provided:

* LZ78 with a fixed bit layout. An Elias-gamma header carries the input
  length ``n``. Phrase ``j`` (1-based) then costs ``ceil(log2 j)`` bits
  for its back-reference plus ``ceil(log2(m + 1))`` bits for the new
  symbol. Symbol value ``m`` is reserved as a terminator for a trailing
  phrase that is already in the dictionary.
* Shannon-Fano against an exact process measure:
  ``ceil(-log2 Q(x)) + elias_gamma_length(n)``.

Both are prefix-free over all lengths at once, so Kraft sums stay <= 1.
Santa Fe symbols are fed to LZ78 as bytes: ``2(k - 1) + bit`` in LEB128.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ImpossibleEventError, ParameterError, ResourceError
from .measures import IMPOSSIBLE, log_prob
from .pmi import PmiSample
from .sampling import ProcessKind, ProcessSpec, Window

KRAFT_MAX_STRINGS = 2_000_000


@dataclass(frozen=True)
class CodeLength:
    bits: int
    phrase_count: int = 0


def elias_gamma_length(n: int) -> int:
    if n < 1:
        raise ParameterError(f"Elias gamma codes positive integers, got {n}")
    return 2 * (n.bit_length() - 1) + 1


def elias_gamma_bits(n: int) -> str:
    if n < 1:
        raise ParameterError(f"Elias gamma codes positive integers, got {n}")
    body = format(n, "b")
    return "0" * (len(body) - 1) + body


def _read_elias_gamma(bits: str, pos: int) -> tuple[int, int]:
    zeros = 0
    while pos + zeros < len(bits) and bits[pos + zeros] == "0":
        zeros += 1
    end = pos + 2 * zeros + 1
    if end > len(bits):
        raise ParameterError("truncated Elias gamma header")
    return int(bits[pos + zeros:end], 2), end


# ---------------------------------------------------------------- LZ78

def lz78_parse(data, m: int) -> list[tuple[int, int]]:
    """Greedy incremental parse into ``(reference, symbol)`` phrases.

    A trailing phrase that matches an existing dictionary entry is
    emitted with the terminator symbol ``m``.
    """
    if m < 2:
        raise ParameterError(f"alphabet size must be >= 2, got {m}")
    trie: dict[tuple[int, int], int] = {}
    phrases: list[tuple[int, int]] = []
    node = 0
    for x in data:
        nxt = trie.get((node, x))
        if nxt is None:
            if not 0 <= x < m:
                raise ParameterError(f"symbol {x} outside alphabet of size {m}")
            phrases.append((node, x))
            trie[(node, x)] = len(phrases)
            node = 0
        else:
            node = nxt
    if node:
        phrases.append((node, m))
    return phrases


def _phrase_count(data, m: int) -> int:
    trie: dict[tuple[int, int], int] = {}
    node = 0
    for x in data:
        nxt = trie.get((node, x))
        if nxt is None:
            if not 0 <= x < m:
                raise ParameterError(f"symbol {x} outside alphabet of size {m}")
            trie[(node, x)] = len(trie) + 1
            node = 0
        else:
            node = nxt
    return len(trie) + (1 if node else 0)


def _reference_bits(c: int) -> int:
    """``sum_{j=1}^{c} ceil(log2 j)``."""
    total = 0
    width = 0
    j = 1
    while j <= c:
        # phrases j in (2**(width-1), 2**width] share one reference width
        top = min(c, 1 << width)
        total += width * (top - j + 1)
        j = top + 1
        width += 1
    return total


def lz78_length(data, m: int) -> CodeLength:
    data = _as_symbols(data)
    n = len(data)
    if n == 0:
        raise ParameterError("LZ78 needs a nonempty input")
    if m < 2:
        raise ParameterError(f"alphabet size must be >= 2, got {m}")
    c = _phrase_count(data, m)
    bits = elias_gamma_length(n) + _reference_bits(c) + c * m.bit_length()
    return CodeLength(bits=bits, phrase_count=c)


def lz78_encode(data, m: int) -> str:
    data = _as_symbols(data)
    if len(data) == 0:
        raise ParameterError("LZ78 needs a nonempty input")
    out = [elias_gamma_bits(len(data))]
    width = m.bit_length()
    for j, (ref, sym) in enumerate(lz78_parse(data, m), start=1):
        rbits = (j - 1).bit_length()
        if rbits:
            out.append(format(ref, f"0{rbits}b"))
        out.append(format(sym, f"0{width}b"))
    return "".join(out)


def lz78_decode(bits: str, m: int, *, return_end: bool = False):
    """Invert :func:`lz78_encode`; reads exactly one codeword from ``bits``."""
    n, pos = _read_elias_gamma(bits, 0)
    width = m.bit_length()
    words: list[tuple[int, ...]] = [()]
    out: list[int] = []
    j = 1
    while len(out) < n:
        rbits = (j - 1).bit_length()
        if pos + rbits + width > len(bits):
            raise ParameterError("truncated LZ78 codeword")
        ref = int(bits[pos:pos + rbits], 2) if rbits else 0
        pos += rbits
        sym = int(bits[pos:pos + width], 2)
        pos += width
        if ref >= j or sym > m:
            raise ParameterError("corrupt LZ78 codeword")
        if sym == m:
            out.extend(words[ref])
            break
        word = words[ref] + (sym,)
        words.append(word)
        out.extend(word)
        j += 1
    if len(out) != n:
        raise ParameterError("LZ78 codeword does not match its length header")
    return (out, pos) if return_end else out


def _as_symbols(data):
    if isinstance(data, (bytes, bytearray)):
        return data
    if isinstance(data, np.ndarray):
        if data.dtype == np.uint8:
            return data.tobytes()
        return data.tolist()
    return list(data)


# ------------------------------------------------- symbol serialization

def serialize_santa_fe(symbols) -> bytes:
    """LEB128 bytes of ``2(k - 1) + bit`` per symbol; a prefix-free map."""
    sym = np.asarray(symbols)
    if sym.dtype != object and len(sym) and int(sym[:, 0].max()) < 2**62:
        v = (sym[:, 0].astype(np.uint64) - np.uint64(1)) * np.uint64(2) + sym[:, 1].astype(np.uint64)
        nbytes = np.ones(len(v), dtype=np.int64)
        w = v >> np.uint64(7)
        while w.any():
            nbytes += w > 0
            w >>= np.uint64(7)
        out = np.empty(int(nbytes.sum()), dtype=np.uint8)
        starts = np.concatenate([[0], np.cumsum(nbytes)[:-1]])
        for b in range(int(nbytes.max())):
            has = nbytes > b
            chunk = (v[has] >> np.uint64(7 * b)) & np.uint64(0x7F)
            more = (nbytes[has] > b + 1).astype(np.uint8) << 7
            out[starts[has] + b] = chunk.astype(np.uint8) | more
        return out.tobytes()
    buf = bytearray()
    for k, y in sym:
        v = 2 * (int(k) - 1) + int(y)
        while True:
            byte = v & 0x7F
            v >>= 7
            if v:
                buf.append(byte | 0x80)
            else:
                buf.append(byte)
                break
    return bytes(buf)


def deserialize_santa_fe(data: bytes) -> list[tuple[int, int]]:
    out = []
    v = 0
    shift = 0
    for byte in data:
        v |= (byte & 0x7F) << shift
        shift += 7
        if not byte & 0x80:
            out.append((v // 2 + 1, v % 2))
            v = 0
            shift = 0
    if shift:
        raise ParameterError("truncated symbol serialization")
    return out


# ---------------------------------------------------------------- codecs

class LZ78Codec:
    """LZ78 over a finite alphabet, or over serialized Santa Fe symbols."""

    id = "lz78"

    def __init__(self, m: int = 2, *, santa_fe: bool = False):
        self.santa_fe = santa_fe
        self.m = 256 if santa_fe else m

    def payload(self, symbols):
        if self.santa_fe:
            return serialize_santa_fe(symbols)
        return _as_symbols(symbols)

    def length(self, symbols) -> CodeLength:
        return lz78_length(self.payload(symbols), self.m)


class ShannonFanoCodec:
    """``ceil(-log2 Q(x)) + elias_gamma_length(n)`` for an exact measure ``Q``."""

    id = "shannon-fano"

    def __init__(self, spec: ProcessSpec):
        self.spec = spec
        self.m = 2

    def length(self, symbols) -> CodeLength:
        return shannon_fano_length(self.spec, symbols)


def shannon_fano_length(spec: ProcessSpec, symbols) -> CodeLength:
    n = len(symbols)
    if n == 0:
        raise ParameterError("empty symbol sequence")
    if spec.kind is ProcessKind.MIXTURE_BERNOULLI:
        bits = np.asarray(symbols)
        if np.any((bits != 0) & (bits != 1)):
            raise ParameterError("mixture Bernoulli symbols must be bits")
        # 1/Q = (n+1) C(n, s) is an integer: the ceiling is exact
        inv_q = (n + 1) * math.comb(n, int(bits.sum()))
        return CodeLength(bits=(inv_q - 1).bit_length() + elias_gamma_length(n))
    lp = log_prob(spec, symbols)
    if lp == IMPOSSIBLE:
        raise ImpossibleEventError("sequence is impossible under the process")
    return CodeLength(bits=math.ceil(-lp) + elias_gamma_length(n))


def make_codec(codec_id: str, spec: ProcessSpec | None = None, m: int = 2):
    if codec_id == LZ78Codec.id:
        return LZ78Codec(m, santa_fe=spec is not None and spec.is_santa_fe)
    if codec_id == ShannonFanoCodec.id:
        if spec is None:
            raise ParameterError("the Shannon-Fano code needs a process")
        return ShannonFanoCodec(spec)
    raise ParameterError(f"unknown codec {codec_id!r}")


def kraft_check(codec, n: int, m: int) -> float:
    """Sum of ``2**-bits`` over every string of length ``n`` over ``m`` symbols."""
    if n < 1 or m < 2:
        raise ParameterError("need n >= 1 and m >= 2")
    if m**n > KRAFT_MAX_STRINGS:
        raise ResourceError(f"{m}^{n} strings exceed the enumeration limit {KRAFT_MAX_STRINGS}")
    lengths = np.fromiter(
        (codec.length(x).bits for x in itertools.product(range(m), repeat=n)),
        dtype=np.int64,
        count=m**n,
    )
    return math.fsum(np.exp2(-lengths.astype(float)))


def code_pmi(codec, window: Window, spec: ProcessSpec | None = None) -> PmiSample:
    """``bits(left) + bits(right) - bits(left + right)``; may be negative."""
    left = codec.length(window.left).bits
    right = codec.length(window.right).bits
    joint = codec.length(window.joint()).bits
    return PmiSample(window.n, float(left + right - joint), spec, f"code:{codec.id}")

import itertools

import numpy as np
import pytest

from shielded_ka.bits import as_bits, from_int, support, to_str
from shielded_ka.codes import (
    BergerCode,
    BergerParams,
    CodewordRejected,
    ManchesterCode,
    TableCode,
    berger_encode,
    berger_verify,
    check_non_inclusive_supports,
    is_injective,
    manchester_encode,
    manchester_verify,
)


def brute_force_nested(code):
    """Independent oracle: explicit support-set comparison over all pairs."""
    words = {to_str(code.encode(from_int(v, code.source_length))) for v in range(2**code.source_length)}
    sets = [support(as_bits(w)) for w in words]
    return not any(s < t for s, t in itertools.permutations(sets, 2))


@pytest.mark.parametrize("src, expected", [("1", "10"), ("0", "01"), ("1101", "10100110"), ("", "")])
def test_manchester_encode(src, expected):
    assert to_str(manchester_encode(src)) == expected


def test_manchester_weight_equals_length(rng):
    for n in range(0, 40):
        assert int(manchester_encode(rng.integers(0, 2, n)).sum()) == n


@pytest.mark.parametrize("word, decoded", [("1001", "10"), ("", "")])
def test_manchester_verify_accepts(word, decoded):
    assert to_str(manchester_verify(word)) == decoded


@pytest.mark.parametrize("word", ["1101", "101", "00", "0110011"])
def test_manchester_verify_rejects(word):
    with pytest.raises(CodewordRejected):
        manchester_verify(word)


def test_berger_width_covers_full_weight_range():
    assert [BergerParams(l).r for l in (1, 2, 3, 4, 7, 8, 16, 32, 64)] == [1, 2, 2, 3, 3, 4, 5, 6, 7]


@pytest.mark.parametrize("src", ["1011", "0000", "1111", "0110"])
def test_berger_encode_matches_hand_formula(src):
    l = len(src)
    r = 3  # ceil(log2(4 + 1))
    weight = src.count("1")
    tail = "".join("1" if c == "0" else "0" for c in format(weight, f"0{r}b"))
    assert to_str(berger_encode(src, BergerParams(l))) == src + tail


def test_berger_spec_examples():
    p = BergerParams(4)
    assert to_str(berger_encode("1011", p)) == "1011100"
    assert to_str(berger_encode("0000", p)) == "0000111"
    assert to_str(berger_encode("1111", p)) == "1111011"
    assert to_str(berger_verify("1011100", p)) == "1011"
    assert to_str(berger_verify("0000111", p)) == "0000"
    with pytest.raises(CodewordRejected):
        berger_verify("1111100", p)


def test_berger_length_errors():
    with pytest.raises(ValueError):
        berger_encode("101", BergerParams(4))
    with pytest.raises(CodewordRejected):
        berger_verify("101", BergerParams(4))


@pytest.mark.parametrize("code_cls", [ManchesterCode, BergerCode])
@pytest.mark.parametrize("l", range(0, 13))
def test_round_trip_and_injective_exhaustive(code_cls, l):
    code = code_cls(l)
    seen = set()
    for v in range(2**l):
        src = from_int(v, l)
        word = code.encode(src)
        assert np.array_equal(code.verify(word), src)
        seen.add(word.tobytes())
    assert len(seen) == 2**l
    assert is_injective(code)


@pytest.mark.parametrize("code_cls", [ManchesterCode, BergerCode])
def test_round_trip_randomized_long(code_cls, rng):
    for l in (20, 33, 64, 128):
        code = code_cls(l)
        for _ in range(200):
            src = rng.integers(0, 2, l, dtype=np.uint8)
            assert np.array_equal(code.verify(code.encode(src)), src)


def test_checker_examples():
    assert check_non_inclusive_supports(ManchesterCode(8))
    assert check_non_inclusive_supports(BergerCode(10))
    identity = TableCode(2, 2, lambda x: x)
    assert not check_non_inclusive_supports(identity)


def test_checker_agrees_with_brute_force(rng):
    codes = [ManchesterCode(l) for l in range(1, 6)] + [BergerCode(l) for l in range(1, 7)]
    codes.append(TableCode(3, 3, lambda x: x))
    codes.append(TableCode(3, 6, lambda x: np.concatenate([x, 1 - x])))
    for _ in range(30):
        table = rng.integers(0, 2, (8, 5), dtype=np.uint8)
        codes.append(TableCode(3, 5, lambda x, t=table: t[int(x[0]) * 4 + int(x[1]) * 2 + int(x[2])]))
    for code in codes:
        assert check_non_inclusive_supports(code) == brute_force_nested(code), code


def test_checker_enumeration_bound():
    with pytest.raises(ValueError, match="enumeration bound"):
        check_non_inclusive_supports(BergerCode(17))


def _alterations(code):
    """Every (codeword, 0->1 mask that changes it) pair."""
    n = code.codeword_length
    for v in range(2**code.source_length):
        word = code.encode(from_int(v, code.source_length))
        zero_pos = np.flatnonzero(word == 0)
        for m in range(1, 2 ** len(zero_pos)):
            altered = word.copy()
            altered[zero_pos[from_int(m, len(zero_pos)).astype(bool)]] = 1
            yield word, altered


@pytest.mark.parametrize("code_cls", [ManchesterCode, BergerCode])
@pytest.mark.parametrize("l", range(1, 7))
def test_unidirectional_detection_exhaustive(code_cls, l):
    code = code_cls(l)
    count = 0
    for _, altered in _alterations(code):
        assert not code.accepts(altered)
        count += 1
    assert count > 0


@pytest.mark.parametrize("code_cls", [ManchesterCode, BergerCode])
def test_unidirectional_detection_randomized(code_cls, rng):
    undetected = 0
    cases = 0
    for l in range(7, 13):
        code = code_cls(l)
        srcs = rng.integers(0, 2, (20_000, l), dtype=np.uint8)
        for src in srcs:
            word = code.encode(src)
            mask = (rng.random(len(word)) < rng.random()).astype(np.uint8)
            altered = word | mask
            if np.array_equal(altered, word):
                continue
            cases += 1
            undetected += code.accepts(altered)
    assert cases >= 100_000
    assert undetected == 0

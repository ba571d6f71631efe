from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cveao.code import apply_symplectic, canonical_code, codes_close, example_code
from cveao.formats import (
    ParseError,
    format_code,
    format_matrix,
    parse_code,
    parse_matrix,
    parse_matrix_blocks,
    parse_vector,
)
from cveao.symplectic import random_symplectic


def test_matrix_blocks_and_comments():
    text = "# header\n1 2/3\n-0.5 0  # trailing\n\n4 5\n"
    a, b = parse_matrix_blocks(text)
    assert a[0, 1] == Fraction(2, 3) and a[1, 0] == Fraction(-1, 2)
    assert b.shape == (1, 2)


def test_matrix_errors():
    with pytest.raises(ParseError):
        parse_matrix("1 2\n3\n")
    with pytest.raises(ParseError):
        parse_matrix("1 q\n")
    with pytest.raises(ParseError):
        parse_matrix("")
    with pytest.raises(ParseError):
        parse_matrix("1\n\n2\n")


def test_matrix_round_trip():
    m = np.array([[Fraction(1, 3), Fraction(-2)], [Fraction(0), Fraction(5, 7)]], dtype=object)
    assert (parse_matrix(format_matrix(m, "h")) == m).all()


def test_float_matrix_round_trip_is_bit_exact(rng):
    m = rng.normal(size=(3, 4))
    back = np.asarray(parse_matrix(format_matrix(m)), dtype=float)
    assert np.array_equal(back, m)


def test_vector_inline():
    assert list(parse_vector("1, 2 -3/4")) == [1, 2, Fraction(-3, 4)]
    with pytest.raises(ParseError):
        parse_vector("# nothing\n")


@pytest.mark.parametrize("args", [(1, 1, 1, 1), (1, 0, 0, 0), (2, 3, 1, 2), (0, 1, 0, 1)])
def test_canonical_round_trip(args):
    code = canonical_code(*args)
    back = parse_code(format_code(code, "hdr"))
    assert codes_close(back, code)
    assert back.upsilon is not None


def test_example_round_trip():
    code = example_code()
    back = parse_code(format_code(code))
    assert codes_close(back, code) and back.upsilon is None


@given(st.integers(0, 10_000))
def test_transformed_round_trip(seed):
    base = canonical_code(1, 1, 1, 1)
    code = apply_symplectic(base, random_symplectic(4, np.random.default_rng(seed), exact_mode=True, max_entry=2))
    back = parse_code(format_code(code))
    assert codes_close(back, code)
    assert (back.upsilon == code.upsilon).all()


def test_canonical_file_shape():
    text = format_code(canonical_code(1, 1, 1, 1))
    lines = text.splitlines()
    f = lines.index("F")
    g = lines.index("G")
    assert g - f - 1 == 3
    assert lines[g + 1 : g + 3] and lines[g + 3] == "UPSILON"


def test_empty_sections():
    text = format_code(canonical_code(1, 0, 0, 0))
    assert "F\nG\n" in text
    assert parse_code(text).alice.shape == (0, 2)


BAD = [
    ("", "missing params"),
    ("roles info:1\n", "before params"),
    ("params n=1 k=1 l=0 r=0\n", "missing parameters"),
    ("params n=2 k=1 l=0 r=0 c=0\n", "n must equal"),
    ("params n=1 k=1 l=0 r=0 c=0\nroles info:2\n", "outside"),
    ("params n=1 k=1 l=0 r=0 c=0\nroles boss:1\n", "unknown role"),
    ("params n=1 k=1 l=0 r=0 c=0\nroles info:1\nF\nfoo 1 0 ;\n", "unknown row kind"),
    ("params n=1 k=0 l=1 r=0 c=0\nroles ancilla:1\nF\nancilla 1 0\n", "';'"),
    ("params n=1 k=0 l=1 r=0 c=0\nroles ancilla:1\nF\nancilla 1 ;\n", "entries"),
    ("params n=1 k=0 l=0 r=1 c=0\nroles gauge:1\nG\n1 0\n", "even number"),
    ("params n=1 k=1 l=0 r=0 c=0\nroles info:1\nUPSILON\n1 0\n", "UPSILON"),
    ("params n=2 k=1 l=1 r=0 c=0\nroles info:1\n", "without a role"),
]


@pytest.mark.parametrize("text,fragment", BAD)
def test_code_parse_errors(text, fragment):
    with pytest.raises(ParseError) as info:
        parse_code(text)
    assert fragment in str(info.value)


def test_parse_error_has_line_number():
    with pytest.raises(ParseError) as info:
        parse_code("params n=1 k=0 l=1 r=0 c=0\nroles ancilla:1\nF\n\nancilla 1 x ;\n")
    assert info.value.line == 5

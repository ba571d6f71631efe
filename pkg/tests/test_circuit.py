import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cveao.circuit import (
    CircuitDecomposition,
    CircuitParseError,
    DecompositionError,
    PassiveNetwork,
    SqueezeStage,
    bloch_messiah,
    emit_circuit,
    parse_circuit,
)
from cveao.symplectic import random_symplectic, symplectic_inverse


def matrix_product_residual(d, y):
    # oracle: plain float product of the three stage matrices
    return float(np.max(np.abs(d.post.matrix.dot(d.squeeze.matrix).dot(d.pre.matrix) - y)))


def test_identity():
    d = bloch_messiah(np.eye(6))
    assert d.squeeze.gains == (1.0, 1.0, 1.0)
    assert d.pre.is_identity() and d.post.is_identity()


def test_single_mode_squeezer_is_its_own_normal_form():
    y = np.diag([0.5, 2.0])
    d = bloch_messiah(y)
    assert d.squeeze.gains == (2.0,)
    assert d.pre.is_identity() and d.post.is_identity()


def test_gains_descend():
    y = np.diag([0.5, 1 / 3, 1.0, 2.0, 3.0, 1.0])
    d = bloch_messiah(y)
    assert d.squeeze.gains == pytest.approx((3.0, 2.0, 1.0))
    assert matrix_product_residual(d, y) <= 1e-12


def test_non_symplectic_rejected():
    with pytest.raises(DecompositionError):
        bloch_messiah(np.diag([2.0, 1.0]))


def test_non_finite_rejected():
    with pytest.raises(DecompositionError):
        bloch_messiah(np.array([[np.nan, 0], [0, 1.0]]))


def test_failure_reports_condition():
    y = random_symplectic(2, np.random.default_rng(0), max_cond=100)
    with pytest.raises(DecompositionError) as info:
        bloch_messiah(y, tol=1e-30)
    assert info.value.condition is not None and "condition" in str(info.value)


@given(st.integers(1, 8), st.integers(0, 10_000))
def test_reconstruction_passivity_and_duality(n, seed):
    y = random_symplectic(n, np.random.default_rng(seed), max_cond=100)
    d = bloch_messiah(y)
    assert matrix_product_residual(d, y) <= 1e-10
    assert d.pre.residual() <= 1e-10 and d.post.residual() <= 1e-10
    inv = bloch_messiah(symplectic_inverse(y))
    assert sorted(inv.squeeze.gains) == pytest.approx(sorted(1 / g for g in d.squeeze.gains), abs=1e-9)
    assert list(d.squeeze.gains) == sorted(d.squeeze.gains, reverse=True)


def test_decomposition_is_deterministic(rng):
    y = random_symplectic(3, rng, max_cond=50)
    assert emit_circuit(bloch_messiah(y)) == emit_circuit(bloch_messiah(y.copy()))


# ---- text form


def test_identity_text():
    text = emit_circuit(bloch_messiah(np.eye(4)))
    assert text == (
        "PASSIVE  # applied first\nI\nSQUEEZE\n"
        "mode 1: 0.0000 dB gain=1.0\nmode 2: 0.0000 dB gain=1.0\n"
        "PASSIVE  # applied last\nI\n"
    )


def test_db_line():
    text = emit_circuit(bloch_messiah(np.diag([0.5, 2.0])))
    assert "mode 1: 6.0206 dB" in text


@given(st.integers(1, 5), st.integers(0, 10_000))
def test_round_trip(n, seed):
    d = bloch_messiah(random_symplectic(n, np.random.default_rng(seed), max_cond=100))
    text = emit_circuit(d, header="x")
    back = parse_circuit(text)
    assert emit_circuit(back, header="x") == text
    assert np.array_equal(back.matrix(), d.matrix())


def test_parse_db_only_lines():
    text = "PASSIVE\nI\nSQUEEZE\nmode 1: 6.0206 dB\nPASSIVE\nI\n"
    d = parse_circuit(text)
    assert d.squeeze.gains[0] == pytest.approx(2.0, rel=1e-5)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "SQUEEZE\nmode 1: 0 dB\n",
        "PASSIVE\nI\nSQUEEZE\nmode 2: 0 dB\nPASSIVE\nI\n",
        "PASSIVE\n1 0\nSQUEEZE\nmode 1: 0 dB\nPASSIVE\nI\n",
        "PASSIVE\n1 x\n0 1\nSQUEEZE\nmode 1: 0 dB\nPASSIVE\nI\n",
        "junk\nPASSIVE\nI\nSQUEEZE\nmode 1: 0 dB\nPASSIVE\nI\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(CircuitParseError):
        parse_circuit(text)


def test_stage_validation():
    with pytest.raises(ValueError):
        SqueezeStage((1.0, -2.0))
    with pytest.raises(ValueError):
        PassiveNetwork(np.eye(3))
    with pytest.raises(ValueError):
        CircuitDecomposition(PassiveNetwork(np.eye(2)), SqueezeStage((1.0, 1.0)), PassiveNetwork(np.eye(2)))


def test_passive_input_has_unit_gains():
    theta = 0.3
    c, s = np.cos(theta), np.sin(theta)
    # phase rotation on one mode: orthogonal and symplectic
    y = np.array([[c, s], [-s, c]])
    d = bloch_messiah(y)
    assert d.squeeze.gains == pytest.approx((1.0,))
    assert matrix_product_residual(d, y) <= 1e-12

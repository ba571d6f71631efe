from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cveao.code import canonical_code
from cveao.exact import DimensionError, exact
from cveao.symplectic import (
    LinearDependenceError,
    displacement_image,
    flip_x,
    is_symplectic,
    product_matrix,
    random_symplectic,
    rowspace_contains,
    symplectic_dual_contains,
    symplectic_form,
    symplectic_gram_schmidt,
    symplectic_inverse,
    symplectic_product,
    syndrome_pairing,
)

import oracles

small = st.integers(-3, 3)


def vectors(m):
    return st.lists(small, min_size=2 * m, max_size=2 * m).map(exact)


pairs_of_vectors = st.integers(1, 4).flatmap(lambda m: st.tuples(vectors(m), vectors(m), vectors(m)))


# ---- symplectic_product


def test_product_of_hyperbolic_pair_is_one():
    assert symplectic_product(exact([1, 0]), exact([0, 1])) == 1


def test_product_rejects_mismatched_lengths():
    with pytest.raises(DimensionError):
        symplectic_product(exact([1, 0]), exact([1, 0, 0, 0]))


def test_canonical_ebit_rows_commute_with_bob_columns():
    code = canonical_code(1, 1, 1, 1)
    rows = code.full_rows
    assert symplectic_product(rows[1], rows[2]) == 0


@given(pairs_of_vectors)
def test_antisymmetry(uvw):
    u, v, _ = uvw
    assert symplectic_product(u, v) == -symplectic_product(v, u)
    assert symplectic_product(u, u) == 0


@given(pairs_of_vectors, small)
def test_bilinearity(uvw, a):
    u, v, w = uvw
    a = Fraction(a)
    assert symplectic_product(a * u + w, v) == a * symplectic_product(u, v) + symplectic_product(w, v)


@given(pairs_of_vectors)
def test_product_matches_explicit_form(uvw):
    u, v, _ = uvw
    assert symplectic_product(u, v) == oracles.product_table([u], [v])[0, 0]


@given(st.integers(1, 4), st.integers(0, 10_000), st.data())
def test_symplectic_invariance(m, seed, data):
    ups = random_symplectic(m, np.random.default_rng(seed), exact_mode=True)
    u, v = data.draw(vectors(m)), data.draw(vectors(m))
    assert symplectic_product(u @ ups.T, v @ ups.T) == symplectic_product(u, v)


# ---- syndrome_pairing


def test_position_observable_reads_position_shift():
    f = exact([0, 1, 0, 0])
    e = exact([0, 0, 0, Fraction(7, 2)])
    assert syndrome_pairing(f, e) == Fraction(7, 2)


@given(st.integers(1, 4).flatmap(vectors))
def test_pairing_with_zero_error(f):
    assert syndrome_pairing(f, exact(np.zeros(len(f)))) == 0


@given(pairs_of_vectors)
def test_pairing_matches_hand_formula_and_flip(uvw):
    f, e, _ = uvw
    assert syndrome_pairing(f, e) == oracles.pairing(f, e)
    assert syndrome_pairing(f, e) == symplectic_product(flip_x(e), f)


@given(st.integers(1, 3), st.integers(0, 10_000), st.data())
def test_pairing_is_invariant_under_covariant_image(m, seed, data):
    ups = random_symplectic(m, np.random.default_rng(seed), exact_mode=True)
    f, e = data.draw(vectors(m)), data.draw(vectors(m))
    assert syndrome_pairing(f @ ups.T, displacement_image(e, ups)) == syndrome_pairing(f, e)


# ---- is_symplectic


def test_identity_and_j_are_symplectic():
    assert is_symplectic(exact(np.eye(4)))
    assert is_symplectic(symplectic_form(2, True))


def test_single_axis_scaling_is_not_symplectic():
    assert not is_symplectic(exact([[2, 0], [0, 1]]))
    assert not is_symplectic(np.array([[2.0, 0], [0, 1]]), tol=1e-9)


def test_float_tolerance_is_honoured():
    m = np.eye(2)
    m[0, 0] += 1e-6
    assert not is_symplectic(m, tol=1e-9)
    assert is_symplectic(m, tol=1e-5)


def test_odd_dimension_rejected():
    with pytest.raises(DimensionError):
        is_symplectic(np.eye(3))


@given(st.integers(1, 5), st.integers(0, 10_000))
def test_random_symplectic_and_inverse(m, seed):
    ups = random_symplectic(m, np.random.default_rng(seed), exact_mode=True)
    assert is_symplectic(ups)
    inv = symplectic_inverse(ups)
    assert all(x == y for x, y in zip((ups @ inv).flat, np.eye(2 * m).flat))


# ---- subspaces


def test_rowspace_contains_examples():
    basis = exact([[1, 0, 0, 0], [0, 1, 0, 0]])
    assert rowspace_contains(basis, exact([0, 0, 0, 0]))
    assert rowspace_contains(basis, basis[0] + basis[1])
    assert not rowspace_contains(basis, exact([0, 0, 1, 0]))


def test_rowspace_contains_float_uses_tolerance():
    basis = np.array([[1.0, 0.0, 0.0, 0.0]])
    assert rowspace_contains(basis, np.array([2.0, 0, 0, 1e-12]), tol=1e-9)
    assert not rowspace_contains(basis, np.array([2.0, 0, 0, 1e-3]), tol=1e-9)


def test_dual_contains_examples():
    s = exact([[1, 0]])
    assert symplectic_dual_contains(s, exact([0, 0]))
    assert symplectic_dual_contains(s, exact([1, 0]))
    assert not symplectic_dual_contains(s, exact([0, 1]))


@given(st.sampled_from([2, 3]), st.data())
def test_dual_matches_nullspace_oracle(m, data):
    rows = data.draw(st.lists(st.lists(small, min_size=2 * m, max_size=2 * m), min_size=1, max_size=3))
    v = data.draw(st.lists(small, min_size=2 * m, max_size=2 * m))
    assert symplectic_dual_contains(exact(rows), exact(v)) == oracles.dual_contains(rows, v)


# ---- Gram-Schmidt


def test_gram_schmidt_small_cases():
    pairs, iso = symplectic_gram_schmidt(exact([[1, 0], [0, 1]]))
    assert len(pairs) == 1 and not iso
    pairs, iso = symplectic_gram_schmidt(exact([[1, 0]]))
    assert not pairs and len(iso) == 1


def test_gram_schmidt_on_canonical_ebit_rows():
    code = canonical_code(1, 1, 1, 1)
    pairs, iso = symplectic_gram_schmidt(code.f_e)
    assert len(pairs) == 1 and not iso


def test_gram_schmidt_rejects_dependent_rows():
    with pytest.raises(LinearDependenceError) as info:
        symplectic_gram_schmidt(exact([[1, 0, 0, 0], [0, 1, 0, 0], [1, 1, 0, 0]]))
    assert info.value.index == 2


def _independent_rows(m, data):
    rows = data.draw(st.lists(st.lists(small, min_size=2 * m, max_size=2 * m), min_size=1, max_size=2 * m))
    return rows


@given(st.integers(1, 3), st.data())
def test_gram_schmidt_soundness(m, data):
    rows = _independent_rows(m, data)
    if oracles.rank(rows) < len(rows):
        with pytest.raises(LinearDependenceError):
            symplectic_gram_schmidt(exact(rows))
        return
    pairs, iso = symplectic_gram_schmidt(exact(rows))
    out = [v for p in pairs for v in p] + list(iso)
    assert len(out) == len(rows)
    table = oracles.product_table(out)
    for i in range(len(out)):
        for j in range(len(out)):
            want = 0
            if i < 2 * len(pairs) and j < 2 * len(pairs) and i // 2 == j // 2 and i != j:
                want = 1 if i % 2 == 0 else -1
            assert table[i, j] == want
    assert oracles.rank(out) == oracles.rank(rows) == oracles.rank(rows + out)


def test_gram_schmidt_float_partner_choice():
    rows = np.array([[1.0, 0, 0, 0], [0, 0, 0.5, 0], [0, 0, 2.0, 1.0]])
    pairs, iso = symplectic_gram_schmidt(rows)
    table = product_matrix(np.vstack([v for p in pairs for v in p] + iso))
    assert abs(table[0, 1] - 1) < 1e-12
    assert len(pairs) == 1 and len(iso) == 1

from itertools import combinations

import numpy as np
import pytest

from gpc.constructions import (
    m4_example2_decomposition,
    mub_masa_decomposition,
    pauli_matrices,
    pauli_product,
    qubit_pauli_decomposition,
)
from gpc.matcore import matrix_unit, random_cmatrix
from gpc.subalgebra import (
    ClosureError,
    Kind,
    Subalgebra,
    block_algebra,
    commutant,
    cond_exp_via_commutant,
    conditional_expectation,
    f_map,
    from_generators,
    is_complementary,
    orthonormalize,
    product_span_dim,
    span_residual,
    subalgebra_from_json,
    subalgebra_to_json,
)

I2, S1, S2, S3 = pauli_matrices()


def masa(sigma):
    return from_generators(2, [sigma], Kind.M)


def full_algebra(n):
    units = [matrix_unit(n, i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    return from_generators(n, units, Kind.F, f"M{n}")


def builtin_parts():
    parts = list(qubit_pauli_decomposition().parts) + list(m4_example2_decomposition().parts)
    for p in (3, 5):
        parts += list(mub_masa_decomposition(p).parts)
    return parts


def is_orthonormal(mats, tol=1e-12):
    V = np.asarray(mats).reshape(len(mats), -1)
    return np.max(np.abs(V.conj() @ V.T - np.eye(len(V)))) < tol


# -- orthonormalize ------------------------------------------------------------------

def test_orthonormalize_rank_one():
    out = orthonormalize([np.eye(3), 2 * np.eye(3)])
    assert len(out) == 1
    assert np.allclose(out[0], np.eye(3) / np.sqrt(3))


def test_orthonormalize_two_paulis():
    out = orthonormalize([S1, S1 + S3])
    assert len(out) == 2 and is_orthonormal(out)
    assert span_residual(np.asarray(out), np.asarray([S1, S3]) / np.sqrt(2)) < 1e-12


def test_orthonormalize_pauli_products_unchanged():
    prods = [pauli_product(a, b) / 2 for a in range(4) for b in range(4)]
    # oracle: pairwise HS inner products are exactly delta
    gram = np.array([[np.trace(A.conj().T @ B) for B in prods] for A in prods])
    assert np.allclose(gram, np.eye(16), atol=1e-15)
    out = orthonormalize(prods)
    assert len(out) == 16
    assert all(np.allclose(a, b, atol=1e-15) for a, b in zip(out, prods))


def test_orthonormalize_empty():
    with pytest.raises(ValueError):
        orthonormalize([])


# -- from_generators -----------------------------------------------------------------

def test_generated_masa_of_m2():
    S = from_generators(2, [S3], Kind.M)
    assert S.dim == 2
    assert np.allclose(S.basis[1], S3 / np.sqrt(2)) or np.allclose(S.basis[1], -S3 / np.sqrt(2))
    S.check()


def test_generated_factor_i2_m2():
    S = from_generators(4, [pauli_product(0, b) for b in (1, 2, 3)], Kind.F)
    assert S.dim == 4 and S.blocks == ((2, 2),)
    S.check()


def test_generated_masa_a5():
    S = from_generators(4, [pauli_product(a, a) for a in (1, 2, 3)], Kind.M)
    assert S.dim == 4
    S.check()


def test_generated_full_algebra():
    assert full_algebra(3).dim == 9


def test_generators_need_matching_dimension():
    with pytest.raises(ValueError):
        from_generators(3, [S1])
    with pytest.raises(ValueError):
        from_generators(2, [])


def test_wrong_kind_rejected():
    with pytest.raises(ValueError):
        from_generators(4, [pauli_product(0, 1)], Kind.M)


def test_closure_cap(monkeypatch):
    import gpc.subalgebra as sub

    monkeypatch.setattr(sub, "MAX_CLOSURE_ROUNDS", 0)
    with pytest.raises(ClosureError):
        from_generators(2, [S1])


def test_subalgebra_rejects_bad_first_element():
    with pytest.raises(ValueError):
        Subalgebra(2, np.array([S3 / np.sqrt(2)]))


def test_subalgebra_rejects_inconsistent_blocks():
    S = from_generators(2, [S3], Kind.M)
    with pytest.raises(ValueError):
        Subalgebra(2, S.basis, Kind.M, blocks=((2, 1),))


def test_check_detects_non_closed_basis():
    basis = orthonormalize([np.eye(4), pauli_product(1, 0), pauli_product(0, 1)])
    S = Subalgebra(4, np.asarray(basis))
    with pytest.raises(ValueError, match="not closed"):
        S.check()


# -- conditional expectations ----------------------------------------------------------

def test_cond_exp_diagonal_masa(rng):
    S = block_algebra([(1, 1)] * 4)
    A = random_cmatrix(4, rng)
    assert np.allclose(conditional_expectation(S, A), np.diag(np.diag(A)), atol=1e-14)


def test_cond_exp_orthogonal_element():
    assert np.allclose(conditional_expectation(masa(S3), S1), 0, atol=1e-15)


def test_cond_exp_full_algebra(rng):
    A = random_cmatrix(3, rng)
    assert np.allclose(conditional_expectation(full_algebra(3), A), A, atol=1e-13)


def test_cond_exp_dimension_mismatch():
    with pytest.raises(ValueError):
        conditional_expectation(masa(S3), np.eye(3))


@pytest.mark.parametrize("S", builtin_parts(), ids=lambda S: S.label)
def test_cond_exp_projection_properties(S):
    rng = np.random.default_rng(11)
    for _ in range(20):
        A = random_cmatrix(S.n, rng)
        E = conditional_expectation(S, A)
        assert np.allclose(conditional_expectation(S, E), E, atol=1e-10, rtol=0)
        assert abs(np.trace(E) - np.trace(A)) < 1e-10
    assert np.allclose(conditional_expectation(S, np.eye(S.n)), np.eye(S.n), atol=1e-12)


def test_cond_exp_bimodule(rng):
    S = m4_example2_decomposition().parts[1]
    A = random_cmatrix(4, rng)
    for B in S.basis:
        for C in S.basis:
            lhs = conditional_expectation(S, B @ A @ C)
            rhs = B @ conditional_expectation(S, A) @ C
            assert np.allclose(lhs, rhs, atol=1e-12)


def test_cond_exp_via_commutant_examples(rng):
    S = masa(S3).with_commutant(masa(S3).basis)
    assert np.allclose(cond_exp_via_commutant(S, S1), 0, atol=1e-15)
    A5 = m4_example2_decomposition().parts[4]
    X = pauli_product(1, 1)
    assert np.allclose(cond_exp_via_commutant(A5, X), X, atol=1e-14)

    S = block_algebra([(2, 2)])
    S = S.with_commutant(commutant(S).basis)
    A = random_cmatrix(4, rng)
    assert np.allclose(cond_exp_via_commutant(S, A), conditional_expectation(S, A),
                       atol=1e-10, rtol=0)


def test_cond_exp_via_commutant_requires_basis():
    with pytest.raises(ValueError):
        cond_exp_via_commutant(from_generators(2, [S3]), S1)


# -- f_map -------------------------------------------------------------------------

def test_f_map_scalar_algebra(rng):
    X = random_cmatrix(3, rng)
    assert np.allclose(f_map([np.eye(3) / np.sqrt(3)], X), X / 3, atol=1e-14)


def test_f_map_matrix_units(rng):
    n = 3
    X = random_cmatrix(n, rng)
    units = [matrix_unit(n, i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    assert np.allclose(f_map(units, X), np.trace(X) * np.eye(n), atol=1e-13)


def test_f_map_diagonal_units(rng):
    X = random_cmatrix(2, rng)
    # direct expansion: e11 X e11 + e22 X e22
    expected = np.array([[X[0, 0], 0], [0, X[1, 1]]])
    assert np.allclose(f_map([matrix_unit(2, 1, 1), matrix_unit(2, 2, 2)], X), expected)


# -- commutants ----------------------------------------------------------------------

def test_commutant_of_masa_is_itself():
    S = m4_example2_decomposition().parts[4]
    C = commutant(S)
    assert C.dim == 4 and span_residual(C.basis, S.basis) < 1e-9
    assert C.kind is Kind.GENERAL


def test_commutant_of_full_algebra_is_scalars():
    C = commutant(full_algebra(3))
    assert C.dim == 1


def test_commutant_of_a1_matches_table():
    A1 = m4_example2_decomposition().parts[0]
    table = orthonormalize([np.eye(4)] + [pauli_product(a, 0) for a in (1, 2, 3)])
    assert span_residual(commutant(A1).basis, np.asarray(table)) < 1e-9


@pytest.mark.parametrize("S", builtin_parts() + [block_algebra([(2, 1), (1, 2)])],
                         ids=lambda S: S.label or "mixed")
def test_double_commutant(S):
    assert span_residual(commutant(commutant(S)).basis, S.basis) < 1e-9


def test_commutant_blocks_swap():
    assert commutant(block_algebra([(2, 1), (1, 2)])).blocks == ((1, 2), (2, 1))


# -- complementarity and product span ---------------------------------------------------

def test_complementary_examples():
    ok, worst = is_complementary(masa(S1), masa(S3))
    assert ok and worst < 1e-15
    ok, worst = is_complementary(masa(S3), masa(S3))
    assert not ok and worst == pytest.approx(1.0)
    D = m4_example2_decomposition()
    assert is_complementary(D.parts[0], D.parts[4])[0]


def test_product_span_examples():
    scalars = from_generators(2, [np.eye(2)])
    assert product_span_dim(scalars, scalars) == 1
    assert product_span_dim(masa(S3), masa(S1)) == 4
    A1 = m4_example2_decomposition().parts[0]
    assert product_span_dim(A1, commutant(A1)) == 16


def _prop2_pairs():
    pairs = []
    for D in (m4_example2_decomposition(), mub_masa_decomposition(3), mub_masa_decomposition(5)):
        pairs += list(combinations(D.parts, 2))
    # complementary pair whose products do not span M_4
    A = from_generators(4, [pauli_product(0, 3)], label="I(x)diag")
    B = from_generators(4, [pauli_product(1, 0)], label="sigma1(x)I")
    pairs.append((A, B))
    return pairs


@pytest.mark.parametrize("pair", _prop2_pairs(), ids=lambda p: f"{p[0].label}-{p[1].label}")
def test_commutants_complementary_iff_products_span(pair):
    S1_, S2_ = pair
    assert is_complementary(S1_, S2_)[0]
    lhs = is_complementary(commutant(S1_), commutant(S2_))[0]
    rhs = product_span_dim(S1_, S2_) == S1_.n ** 2
    assert lhs == rhs


def test_non_spanning_pair_is_negative_case():
    A, B = _prop2_pairs()[-1]
    assert product_span_dim(A, B) == 4
    assert not is_complementary(commutant(A), commutant(B))[0]


def test_bipartite_complementary_commutants():
    # F/M subalgebras of M_2 (x) M_2: complementary pairs have complementary commutants
    D = m4_example2_decomposition()
    for S, T in combinations(D.parts, 2):
        assert is_complementary(S, T)[0]
        assert is_complementary(commutant(S), commutant(T))[0]


def test_subalgebra_json_round_trip():
    S = m4_example2_decomposition().parts[2]
    again = subalgebra_from_json(subalgebra_to_json(S))
    assert np.array_equal(again.basis, S.basis)
    assert np.array_equal(again.commutant_basis, S.commutant_basis)
    assert again.kind is S.kind and again.blocks == S.blocks and again.label == S.label

import math

import numpy as np
import pytest

from gpc.constructions import build_decomposition, pauli_matrices, weyl
from gpc.matcore import matrix_unit, random_cmatrix
from gpc.subalgebra import (
    block_algebra,
    commutant,
    cond_exp_via_commutant,
    conditional_expectation,
    f_map,
    from_generators,
)
from gpc.verify import (
    block_formula,
    choi_projection_check,
    choi_projections,
    depolarizing_basis_check,
    f_map_block_oracle,
    lemma_trace_product,
    run_suite,
)


@pytest.mark.parametrize("a,b,c,d", [(1, 1, 2, 2), (1, 2, 1, 1), (2, 2, 1, 2), (3, 3, 3, 3)])
def test_trace_product_units(a, b, c, d):
    rep = lemma_trace_product(matrix_unit(3, a, b), matrix_unit(3, c, d))
    expected = float(a == b and c == d)
    assert rep.passed
    assert rep.details["lhs"][0] == pytest.approx(expected)


def test_trace_product_identity():
    rep = lemma_trace_product(np.eye(3), np.eye(3))
    assert rep.passed and rep.details["lhs"][0] == pytest.approx(9)


def test_trace_product_random(rng):
    X, Y = random_cmatrix(4, rng), random_cmatrix(4, rng)
    assert lemma_trace_product(X, Y).passed


@pytest.mark.parametrize("n", [2, 3, 4])
def test_depolarizing_units_and_weyl(n):
    units = [matrix_unit(n, i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    rep = depolarizing_basis_check(units)
    assert rep.passed and rep.details["equivalent"]
    rep = depolarizing_basis_check([weyl(n, a, b) / math.sqrt(n)
                                    for a in range(n) for b in range(n)])
    assert rep.passed and rep.details["equivalent"]


def test_depolarizing_broken_normalization():
    V = [matrix_unit(2, i, j) for i in (1, 2) for j in (1, 2)]
    V[2] = 2 * V[2]
    rep = depolarizing_basis_check(V)
    assert not rep.passed
    assert not rep.details["orthonormal"] and not rep.details["resolution"]
    assert rep.details["equivalent"]


def test_depolarizing_deterministic():
    V = [weyl(3, a, b) / math.sqrt(3) for a in range(3) for b in range(3)]
    assert depolarizing_basis_check(V, seed=4) == depolarizing_basis_check(V, seed=4)


def test_pauli_projections():
    U = [s / math.sqrt(2) for s in pauli_matrices()]
    rep = choi_projection_check(U)
    assert rep.passed and rep.details["completeness"] < 1e-12
    for P in choi_projections(U):
        assert np.linalg.matrix_rank(P) == 1


def test_identity_projection():
    rep = choi_projection_check([np.eye(3) / math.sqrt(3)])
    assert rep.passed


def test_weyl_projections_complete():
    U = [weyl(3, a, b) / math.sqrt(3) for a in range(3) for b in range(3)]
    rep = choi_projection_check(U)
    assert rep.passed and rep.trials == 9


def test_projection_check_fails_for_unnormalized():
    assert not choi_projection_check([np.eye(2)]).passed


def test_block_oracle_m2_i2(rng):
    S = block_algebra([(2, 2)], "M2xI2")
    X = random_cmatrix(4, rng)
    assert f_map_block_oracle(S, X).passed
    # the map lands in I (x) M_2
    from gpc.matcore import partial_trace_first

    assert np.allclose(f_map(S.basis, X), np.kron(np.eye(2), partial_trace_first(X, 2, 2)) / 2)


def test_block_oracle_scalars(rng):
    S = block_algebra([(1, 3)])
    X = random_cmatrix(3, rng)
    assert f_map_block_oracle(S, X).passed
    assert np.allclose(block_formula(S.blocks, X), X / 3)


def test_block_oracle_diagonal(rng):
    S = block_algebra([(1, 1)] * 3)
    X = random_cmatrix(3, rng)
    assert f_map_block_oracle(S, X).passed
    assert np.allclose(block_formula(S.blocks, X), np.diag(np.diag(X)))


def test_block_oracle_requires_blocks():
    S = from_generators(2, [pauli_matrices()[1]])
    with pytest.raises(ValueError):
        f_map_block_oracle(S, np.eye(2))


def test_block_formula_dimension_check():
    with pytest.raises(ValueError):
        block_formula([(2, 2)], np.eye(3))


@pytest.mark.parametrize("S", [block_algebra([(2, 2)]), block_algebra([(1, 1)] * 3),
                               block_algebra([(1, 4)])] + list(build_decomposition("m4-example2").parts),
                         ids=lambda S: S.label or str(S.blocks))
def test_scaled_f_map_is_commutant_expectation(S):
    rng = np.random.default_rng(8)
    C = commutant(S)  # commutant_basis of C is S.basis
    for _ in range(20):
        X = random_cmatrix(S.n, rng)
        scaled = S.n / S.dim * f_map(S.basis, X)
        assert np.allclose(scaled, cond_exp_via_commutant(C, X), atol=1e-10, rtol=0)
        assert np.allclose(scaled, conditional_expectation(C, X), atol=1e-10, rtol=0)


@pytest.mark.parametrize("suite", ["lemmas", "projections", "fmap"])
def test_suites_pass(suite):
    reports = run_suite(suite, seed=3)
    assert reports and all(r.passed for r in reports)


def test_suite_unknown():
    with pytest.raises(ValueError):
        run_suite("nope")

"""Independent oracles for the identities the channel theory rests on.

Everything here is recomputed from explicit loops over matrix units; the
vectorized paths in :mod:`gpc.subalgebra` and :mod:`gpc.channel` are the
things being checked, so they are not reused.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from gpc.matcore import as_cmatrix, matrix_unit, partial_trace_first, random_cmatrix
from gpc.subalgebra import Subalgebra, f_map

DEFAULT_TRIALS = 20


@dataclass
class IdentityReport:
    name: str
    max_violation: float
    trials: int
    passed: bool
    tolerance: float = 0.0
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


def _report(name: str, violation: float, trials: int, tol: float, **details) -> IdentityReport:
    return IdentityReport(name, float(violation), trials, bool(violation <= tol), tol, details)


def _units(n: int) -> list[list[np.ndarray]]:
    return [[matrix_unit(n, i, j) for j in range(1, n + 1)] for i in range(1, n + 1)]


def lemma_trace_product(X, Y, tol: float = 1e-10) -> IdentityReport:
    """sum_ij Tr(E_ij X E_ji Y) == Tr(X) Tr(Y), by explicit double sum."""
    X = as_cmatrix(X, "X")
    Y = as_cmatrix(Y, "Y")
    if X.shape != Y.shape:
        raise ValueError("X and Y must have equal dimensions")
    n = X.shape[0]
    E = _units(n)
    lhs = 0j
    for i in range(n):
        for j in range(n):
            lhs += np.trace(E[i][j] @ X @ E[j][i] @ Y)
    rhs = np.trace(X) * np.trace(Y)
    return _report("trace_product", abs(lhs - rhs), 1, tol, lhs=[lhs.real, lhs.imag])


def depolarizing_basis_check(V: Sequence[np.ndarray], trials: int = DEFAULT_TRIALS,
                             seed: int = 0, tol: float = 1e-10) -> IdentityReport:
    """Orthonormality of n^2 matrices versus sum_i V_i^* A V_i == Tr(A) I.

    The two conditions are equivalent, so the report passes only when
    both hold; ``details`` records each separately.
    """
    V = [as_cmatrix(v) for v in V]
    n = V[0].shape[0]
    if len(V) != n * n:
        raise ValueError(f"need {n * n} matrices, got {len(V)}")
    ortho = 0.0
    for i, A in enumerate(V):
        for j, B in enumerate(V):
            ortho = max(ortho, abs(np.trace(A.conj().T @ B) - (i == j)))
    rng = np.random.default_rng(seed)
    resolution = 0.0
    for _ in range(trials):
        A = random_cmatrix(n, rng)
        acc = np.zeros((n, n), dtype=np.complex128)
        for W in V:
            acc += W.conj().T @ A @ W
        resolution = max(resolution, float(np.max(np.abs(acc - np.trace(A) * np.eye(n)))))
    first, second = ortho <= tol, resolution <= tol
    return _report("depolarizing_basis", max(ortho, resolution), trials, tol,
                   orthonormal=bool(first), resolution=bool(second),
                   equivalent=bool(first == second))


def choi_projections(U: Sequence[np.ndarray]) -> list[np.ndarray]:
    """P_k = sum_ij U_k^* E_ij U_k (x) E_ij, assembled block by block."""
    n = as_cmatrix(U[0]).shape[0]
    E = _units(n)
    out = []
    for Uk in U:
        Uk = as_cmatrix(Uk)
        P = np.zeros((n * n, n * n), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                block = Uk.conj().T @ E[i][j] @ Uk
                for a in range(n):
                    for b in range(n):
                        P[a * n + i, b * n + j] += block[a, b]
        out.append(P)
    return out


def choi_projection_check(U: Sequence[np.ndarray], tol: float = 1e-9) -> IdentityReport:
    """Each P_k is an orthogonal projection and Tr(P_k P_l) = 0 for k != l.

    For a complete system (n^2 elements) the projections must also sum
    to the identity.
    """
    P = choi_projections(U)
    idem = max(float(np.max(np.abs(p @ p - p))) for p in P)
    herm = max(float(np.max(np.abs(p - p.conj().T))) for p in P)
    cross = 0.0
    for k in range(len(P)):
        for l in range(k + 1, len(P)):
            cross = max(cross, abs(np.trace(P[k] @ P[l])))
    details = {"idempotent": idem, "hermitian": herm, "cross_trace": cross}
    worst = max(idem, herm, cross)
    n = as_cmatrix(U[0]).shape[0]
    if len(P) == n * n:
        complete = float(np.max(np.abs(sum(P) - np.eye(n * n))))
        details["completeness"] = complete
        worst = max(worst, complete)
    return _report("choi_projections", worst, len(P), tol, **details)


def block_formula(blocks: Sequence[tuple[int, int]], X) -> np.ndarray:
    """(+)_i (n_i/m_i) * (I_{n_i}/n_i) (x) Tr_{n_i}(P_i X P_i).

    Partial traces are normalized onto I (x) M_{m_i}, so each block
    reduces to (1/m_i) I_{n_i} (x) Tr_{n_i}(P_i X P_i).
    """
    X = as_cmatrix(X)
    n = X.shape[0]
    if sum(a * b for a, b in blocks) != n:
        raise ValueError(f"blocks {list(blocks)} do not fill dimension {n}")
    out = np.zeros_like(X)
    offset = 0
    for ni, mi in blocks:
        size = ni * mi
        # P_i X P_i restricted to the block, via matrix-unit embeddings
        Pi = sum(matrix_unit(n, offset + k + 1, offset + k + 1) for k in range(size))
        sub = (Pi @ X @ Pi)[offset:offset + size, offset:offset + size]
        reduced = partial_trace_first(sub, ni, mi)
        out[offset:offset + size, offset:offset + size] = \
            (ni / mi) * np.kron(np.eye(ni) / ni, reduced)
        offset += size
    return out


def f_map_block_oracle(S: Subalgebra, X, tol: float = 1e-10) -> IdentityReport:
    """f_map over the basis of ``S`` against the block partial-trace formula.

    ``S`` must be literally block diagonal as its ``blocks`` describe,
    e.g. built by :func:`gpc.subalgebra.block_algebra`.
    """
    if S.blocks is None:
        raise ValueError("subalgebra has no block structure")
    if sum(a * b for a, b in S.blocks) != S.n:
        raise ValueError("block data inconsistent with ambient dimension")
    X = as_cmatrix(X)
    lhs = f_map(S.basis, X)
    rhs = block_formula(S.blocks, X)
    return _report("f_map_blocks", float(np.max(np.abs(lhs - rhs))), 1, tol,
                   label=S.label, blocks=[list(b) for b in S.blocks])


# -- suites -------------------------------------------------------------------

SUITE_DIMS = (2, 3, 4, 5)


def _merge(name: str, reports: list[IdentityReport]) -> IdentityReport:
    worst = max(r.max_violation for r in reports)
    ok = all(r.passed for r in reports)
    rep = IdentityReport(name, worst, sum(r.trials for r in reports), ok,
                         max(r.tolerance for r in reports))
    rep.details = {"failed": sum(not r.passed for r in reports)}
    return rep


def suite_lemmas(seed: int = 0, pairs: int = 50) -> list[IdentityReport]:
    from gpc.constructions import weyl

    rng = np.random.default_rng(seed)
    out = []
    for n in SUITE_DIMS:
        reps = [lemma_trace_product(random_cmatrix(n, rng), random_cmatrix(n, rng))
                for _ in range(pairs)]
        out.append(_merge(f"trace_product[n={n}]", reps))
    for n in SUITE_DIMS:
        units = [matrix_unit(n, i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
        rep = depolarizing_basis_check(units, seed=seed)
        rep.name = f"depolarizing_basis[units,n={n}]"
        out.append(rep)
        weyls = [weyl(n, a, b) / math.sqrt(n) for a in range(n) for b in range(n)]
        rep = depolarizing_basis_check(weyls, seed=seed)
        rep.name = f"depolarizing_basis[weyl,n={n}]"
        out.append(rep)
    return out


def suite_projections(seed: int = 0) -> list[IdentityReport]:
    from gpc.constructions import pauli_matrices, weyl

    out = []
    rep = choi_projection_check([s / math.sqrt(2) for s in pauli_matrices()])
    rep.name = "choi_projections[pauli]"
    out.append(rep)
    for n in SUITE_DIMS:
        rep = choi_projection_check([weyl(n, a, b) / math.sqrt(n)
                                     for a in range(n) for b in range(n)])
        rep.name = f"choi_projections[weyl,n={n}]"
        out.append(rep)
        rep = choi_projection_check([np.eye(n) / math.sqrt(n)])
        rep.name = f"choi_projections[identity,n={n}]"
        out.append(rep)
    return out


def suite_fmap(seed: int = 0, trials: int = DEFAULT_TRIALS) -> list[IdentityReport]:
    from gpc.subalgebra import block_algebra

    rng = np.random.default_rng(seed)
    algebras = []
    for n in SUITE_DIMS:
        algebras.append(block_algebra([(1, n)], f"CI[n={n}]"))
        algebras.append(block_algebra([(1, 1)] * n, f"diag[n={n}]"))
    algebras.append(block_algebra([(2, 2)], "M2xI2"))
    algebras.append(block_algebra([(2, 1), (1, 2)], "M2+I2"))
    out = []
    for S in algebras:
        reps = [f_map_block_oracle(S, random_cmatrix(S.n, rng)) for _ in range(trials)]
        out.append(_merge(f"f_map_blocks[{S.label}]", reps))
    return out


SUITES = {
    "lemmas": suite_lemmas,
    "projections": suite_projections,
    "fmap": suite_fmap,
}


def run_suite(name: str, seed: int = 0) -> list[IdentityReport]:
    if name == "all":
        return [r for fn in SUITES.values() for r in fn(seed)]
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    return SUITES[name](seed)

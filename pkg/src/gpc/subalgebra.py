"""Unital *-subalgebras of M_n held as Hilbert-Schmidt orthonormal bases.

Every stored basis has unit HS-norm elements and starts with ``I/sqrt(n)``.
Conditional expectations, commutants and complementarity tests all work
on the flattened basis vectors, so a subalgebra is effectively a
subspace of C^(n^2) with a multiplicative structure attached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from gpc.matcore import as_cmatrix

ORTHO_TOL = 1e-10
CLOSURE_TOL = 1e-9
KERNEL_TOL = 1e-10
GRAM_RANK_TOL = 1e-9
MAX_CLOSURE_ROUNDS = 8


class Kind(str, Enum):
    F = "F"
    M = "M"
    GENERAL = "GENERAL"


class ClosureError(RuntimeError):
    """Algebra closure failed to stabilize."""


def _stack(mats: Sequence[np.ndarray]) -> np.ndarray:
    arr = np.asarray([as_cmatrix(m) for m in mats])
    if len({m.shape for m in arr}) > 1:
        raise ValueError("matrices must share one dimension")
    return arr


def orthonormalize(span_set: Sequence[np.ndarray], tol: float = 1e-10) -> list[np.ndarray]:
    """Gram-Schmidt under the HS inner product.

    Elements whose norm after projection falls below ``tol`` are dropped.
    Each vector is projected twice, which keeps the output orthonormal to
    machine precision even for nearly dependent inputs.
    """
    if len(span_set) == 0:
        raise ValueError("cannot orthonormalize an empty set")
    mats = _stack(span_set)
    shape = mats.shape[1:]
    vecs = mats.reshape(len(mats), -1)
    out: list[np.ndarray] = []
    Q = np.zeros((0, vecs.shape[1]), dtype=np.complex128)
    for v in vecs:
        w = v.copy()
        for _ in range(2):
            if len(Q):
                w = w - Q.T @ (Q.conj() @ w)
        norm = np.linalg.norm(w)
        if norm < tol:
            continue
        w = w / norm
        Q = np.vstack([Q, w])
        out.append(w.reshape(shape))
    return out


def _identity_first(n: int, mats: Sequence[np.ndarray], tol: float = 1e-10) -> np.ndarray:
    return np.asarray(orthonormalize([np.eye(n, dtype=np.complex128)] + list(mats), tol))


@dataclass(frozen=True, eq=False)
class Subalgebra:
    """A unital *-subalgebra of M_n given by an HS-orthonormal basis.

    ``basis`` has shape ``(k, n, n)`` with ``basis[0] == I/sqrt(n)``.
    ``commutant_basis`` follows the same convention when present.
    ``blocks`` lists pairs ``(n_i, m_i)`` of the decomposition
    ``A ~ (+)_i M_{n_i} (x) I_{m_i}`` (up to unitary equivalence).
    """

    n: int
    basis: np.ndarray
    kind: Kind = Kind.GENERAL
    label: str = ""
    commutant_basis: Optional[np.ndarray] = None
    blocks: Optional[tuple[tuple[int, int], ...]] = None

    def __post_init__(self):
        basis = np.array(self.basis, dtype=np.complex128)
        if basis.ndim != 3 or basis.shape[1:] != (self.n, self.n) or len(basis) == 0:
            raise ValueError(f"basis must have shape (k, {self.n}, {self.n}), got {basis.shape}")
        _check_unit_first(basis, self.n, "basis")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.commutant_basis is not None:
            cb = np.array(self.commutant_basis, dtype=np.complex128)
            if cb.ndim != 3 or cb.shape[1:] != (self.n, self.n):
                raise ValueError("commutant basis has the wrong shape")
            _check_unit_first(cb, self.n, "commutant basis")
            cb.setflags(write=False)
            object.__setattr__(self, "commutant_basis", cb)
        if self.blocks is not None:
            blocks = tuple((int(a), int(b)) for a, b in self.blocks)
            if sum(a * b for a, b in blocks) != self.n:
                raise ValueError(f"blocks {blocks} do not fill dimension {self.n}")
            if sum(a * a for a, _ in blocks) != len(basis):
                raise ValueError(f"blocks {blocks} inconsistent with basis length {len(basis)}")
            object.__setattr__(self, "blocks", blocks)
        k = len(basis)
        if self.kind is Kind.M:
            if k != self.n:
                raise ValueError(f"M-subalgebra of M_{self.n} needs {self.n} basis elements, got {k}")
        elif self.kind is Kind.F:
            root = math.isqrt(k)
            if root * root != k:
                raise ValueError(f"F-subalgebra basis length {k} is not a perfect square")

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def vectors(self) -> np.ndarray:
        """Basis as rows of a (k, n^2) array."""
        return self.basis.reshape(self.dim, -1)

    def with_commutant(self, commutant_basis) -> "Subalgebra":
        return Subalgebra(self.n, self.basis, self.kind, self.label,
                          np.asarray(commutant_basis), self.blocks)

    def projection_residual(self, A) -> float:
        """HS norm of the component of ``A`` orthogonal to the algebra."""
        A = as_cmatrix(A)
        return float(np.linalg.norm(A - conditional_expectation(self, A)))

    def closure_residual(self) -> float:
        """Largest distance of a basis product or adjoint from the span."""
        V = self.vectors
        worst = 0.0
        for B in self.basis:
            prods = np.concatenate([np.einsum("ij,kjl->kil", B, self.basis),
                                    B.conj().T[None]])
            P = prods.reshape(len(prods), -1)
            resid = P - (P @ V.conj().T) @ V
            worst = max(worst, float(np.max(np.linalg.norm(resid, axis=1))))
        return worst

    def check(self) -> None:
        """Raise ValueError if the structural invariants do not hold."""
        gram = self.vectors.conj() @ self.vectors.T
        dev = float(np.max(np.abs(gram - np.eye(self.dim))))
        if dev > ORTHO_TOL:
            raise ValueError(f"{self.label or 'subalgebra'}: basis not orthonormal ({dev:.2e})")
        res = self.closure_residual()
        if res > CLOSURE_TOL:
            raise ValueError(f"{self.label or 'subalgebra'}: not closed under products ({res:.2e})")
        if self.kind is Kind.M:
            comm = max(float(np.max(np.abs(B @ C - C @ B)))
                       for B in self.basis for C in self.basis)
            if comm > CLOSURE_TOL:
                raise ValueError(f"{self.label}: M-subalgebra elements do not commute")


def _check_unit_first(basis: np.ndarray, n: int, what: str) -> None:
    unit = np.eye(n) / math.sqrt(n)
    dev = float(np.max(np.abs(basis[0] - unit)))
    if dev > ORTHO_TOL:
        raise ValueError(f"{what}[0] must be I/sqrt(n) (deviation {dev:.2e})")


def from_generators(n: int, gens: Sequence[np.ndarray], kind=Kind.GENERAL,
                    label: str = "") -> Subalgebra:
    """Smallest unital *-subalgebra of M_n containing ``gens``."""
    if len(gens) == 0:
        raise ValueError("need at least one generator")
    gens = [as_cmatrix(g, "generator") for g in gens]
    if any(g.shape != (n, n) for g in gens):
        raise ValueError(f"generators must be {n}x{n}")
    seed = list(gens) + [g.conj().T for g in gens]
    basis = _identity_first(n, seed)
    for _ in range(MAX_CLOSURE_ROUNDS):
        prods = np.einsum("aij,bjk->abik", basis, basis).reshape(-1, n, n)
        grown = _identity_first(n, list(basis[1:]) + list(prods))
        if len(grown) > n * n:
            raise ClosureError(f"closure exceeded {n * n} dimensions")
        if len(grown) == len(basis):
            break
        basis = grown
    else:
        raise ClosureError(f"closure did not stabilize in {MAX_CLOSURE_ROUNDS} rounds")
    kind = Kind(kind)
    blocks = None
    if kind is Kind.M:
        blocks = ((1, 1),) * n
    elif kind is Kind.F:
        k = math.isqrt(len(basis))
        if k * k == len(basis) and n % k == 0:
            blocks = ((k, n // k),)
    return Subalgebra(n, basis, kind, label, blocks=blocks)


def block_algebra(blocks: Sequence[tuple[int, int]], label: str = "") -> Subalgebra:
    """The literal block-diagonal algebra (+)_i M_{n_i} (x) I_{m_i}.

    The basis is the normalized matrix units ``e_st (x) I_m / sqrt(m)``,
    rotated so that its first element is ``I/sqrt(n)``.
    """
    blocks = tuple((int(a), int(b)) for a, b in blocks)
    n = sum(a * b for a, b in blocks)
    units = []
    offset = 0
    for ni, mi in blocks:
        for s in range(ni):
            for t in range(ni):
                U = np.zeros((n, n), dtype=np.complex128)
                e = np.zeros((ni, ni))
                e[s, t] = 1.0
                U[offset:offset + ni * mi, offset:offset + ni * mi] = np.kron(e, np.eye(mi))
                units.append(U / math.sqrt(mi))
        offset += ni * mi
    basis = _identity_first(n, units)
    if all(a == 1 for a, _ in blocks) and len(blocks) == n:
        kind = Kind.M
    elif len(blocks) == 1:
        kind = Kind.F
    else:
        kind = Kind.GENERAL
    return Subalgebra(n, basis, kind, label, blocks=blocks)


def conditional_expectation(S: Subalgebra, A) -> np.ndarray:
    """Trace-preserving conditional expectation onto ``S``.

    This is the HS-orthogonal projection: sum_s basis[s] <basis[s], A>.
    """
    A = as_cmatrix(A)
    if A.shape != (S.n, S.n):
        raise ValueError(f"expected a {S.n}x{S.n} matrix, got {A.shape}")
    coeffs = np.einsum("kij,ij->k", S.basis.conj(), A)
    return np.einsum("k,kij->ij", coeffs, S.basis)


def cond_exp_via_commutant(S: Subalgebra, A) -> np.ndarray:
    """Conditional expectation written as an average over commutant elements.

    Returns ``(n / dim S') * sum_i U_i^* A U_i`` over the stored commutant
    basis.  Agrees with :func:`conditional_expectation` whenever all block
    ratios n_i/m_i of ``S`` coincide, which holds for F- and M-subalgebras.
    """
    if S.commutant_basis is None:
        raise ValueError(f"{S.label or 'subalgebra'} has no commutant basis")
    A = as_cmatrix(A)
    if A.shape != (S.n, S.n):
        raise ValueError(f"expected a {S.n}x{S.n} matrix, got {A.shape}")
    U = S.commutant_basis
    return (S.n / len(U)) * np.einsum("kji,jl,klm->im", U.conj(), A, U)


def f_map(basis: Sequence[np.ndarray], X) -> np.ndarray:
    """X -> sum_i U_i^* X U_i over an orthonormal basis of an algebra."""
    U = _stack(basis)
    X = as_cmatrix(X)
    return np.einsum("kji,jl,klm->im", U.conj(), X, U)


def _kernel(M: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal rows spanning the null space of ``M`` (SVD rank reveal)."""
    _, s, Vh = np.linalg.svd(M)
    scale = max(1.0, float(s[0])) if len(s) else 1.0
    rank = int(np.sum(s > tol * scale))
    return Vh[rank:].conj()


def commutant(S: Subalgebra, tol: float = KERNEL_TOL) -> Subalgebra:
    """Numerical commutant: the joint kernel of X -> B X - X B over the basis.

    With row-major vectorization, vec(B X) = (B (x) I) vec X and
    vec(X B) = (I (x) B^T) vec X; all commutators are stacked into one
    linear system on n^2 unknowns.
    """
    n = S.n
    eye = np.eye(n)
    system = np.concatenate([np.kron(B, eye) - np.kron(eye, B.T) for B in S.basis[1:]]) \
        if S.dim > 1 else np.zeros((1, n * n), dtype=np.complex128)
    kernel = _kernel(system, tol).reshape(-1, n, n)
    basis = _identity_first(n, list(kernel))
    label = f"{S.label}'" if S.label else ""
    blocks = tuple((m, k) for k, m in S.blocks) if S.blocks else None
    return Subalgebra(n, basis, Kind.GENERAL, label, commutant_basis=S.basis, blocks=blocks)


def complementarity_violation(S1: Subalgebra, S2: Subalgebra) -> float:
    """Largest |<B, C>| over non-identity basis elements of the two algebras."""
    if S1.n != S2.n:
        raise ValueError("ambient dimensions differ")
    if S1.dim == 1 or S2.dim == 1:
        return 0.0
    gram = S1.vectors[1:].conj() @ S2.vectors[1:].T
    return float(np.max(np.abs(gram)))


def is_complementary(S1: Subalgebra, S2: Subalgebra, tol: float = 1e-10) -> tuple[bool, float]:
    """Whether ``S1 - CI`` and ``S2 - CI`` are HS-orthogonal.

    Returns the verdict together with the worst offending inner product.
    """
    worst = complementarity_violation(S1, S2)
    return worst <= tol, worst


def gram_rank(mats, tol: float = GRAM_RANK_TOL) -> int:
    """Rank of a family of matrices via the eigenvalues of their Gram matrix."""
    V = np.asarray(mats).reshape(len(mats), -1)
    gram = V.conj() @ V.T
    ev = np.linalg.eigvalsh(0.5 * (gram + gram.conj().T))
    return int(np.sum(ev > tol))


def product_span_dim(S1: Subalgebra, S2: Subalgebra) -> int:
    """Dimension of span{B C : B in S1, C in S2}; equals n^2 iff it is M_n."""
    if S1.n != S2.n:
        raise ValueError("ambient dimensions differ")
    prods = np.einsum("aij,bjk->abik", S1.basis, S2.basis).reshape(-1, S1.n, S1.n)
    return gram_rank(prods)


def span_residual(basis_a: np.ndarray, basis_b: np.ndarray) -> float:
    """Mutual projection residual between two orthonormal families.

    Zero exactly when both families span the same subspace.
    """
    A = np.asarray(basis_a).reshape(len(basis_a), -1)
    B = np.asarray(basis_b).reshape(len(basis_b), -1)
    ra = A - (A @ B.conj().T) @ B
    rb = B - (B @ A.conj().T) @ A
    return float(max(np.max(np.linalg.norm(ra, axis=1)), np.max(np.linalg.norm(rb, axis=1))))


# -- JSON --------------------------------------------------------------------

def subalgebra_to_json(S: Subalgebra) -> dict:
    from gpc.matcore import matrix_to_json

    obj = {
        "label": S.label,
        "kind": S.kind.value,
        "n": S.n,
        "basis": [matrix_to_json(B) for B in S.basis],
    }
    if S.commutant_basis is not None:
        obj["commutant_basis"] = [matrix_to_json(B) for B in S.commutant_basis]
    if S.blocks is not None:
        obj["blocks"] = [list(b) for b in S.blocks]
    return obj


def subalgebra_from_json(obj: dict) -> Subalgebra:
    from gpc.matcore import matrix_from_json

    try:
        n = int(obj["n"])
        basis = np.array([matrix_from_json(m) for m in obj["basis"]])
        comm = obj.get("commutant_basis")
        comm = np.array([matrix_from_json(m) for m in comm]) if comm is not None else None
        blocks = obj.get("blocks")
        return Subalgebra(n, basis, Kind(obj.get("kind", "GENERAL")), obj.get("label", ""),
                          comm, tuple(map(tuple, blocks)) if blocks is not None else None)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed subalgebra JSON: {exc}") from exc

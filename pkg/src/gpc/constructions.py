"""Named decompositions of M_n into pairwise complementary subalgebras.

Builders:

* ``qubit-pauli``: the three MASAs of M_2 generated by the Pauli matrices.
* ``mub-p<k>``: the k+1 MASAs of M_k (k prime) spanned by the cyclic
  families of clock/shift (Weyl) operators along each direction.
* ``m4-example2``: four F-subalgebras and one MASA of M_2 (x) M_2 given by
  Pauli-triplet generator tables, with their commutants.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Sequence

import numpy as np

from gpc.subalgebra import (
    Kind,
    Subalgebra,
    commutant,
    complementarity_violation,
    from_generators,
    gram_rank,
    orthonormalize,
    span_residual,
    subalgebra_from_json,
    subalgebra_to_json,
)

MAX_PRIME = 13
COMPLEMENTARY_TOL = 1e-10
SPAN_TOL = 1e-9

_SIGMA = (
    np.array([[1, 0], [0, 1]], dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)

# Generator triplets (a, b) meaning sigma_a (x) sigma_b.
M4_FACTOR_GENERATORS = (
    ((0, 1), (0, 2), (0, 3)),
    ((1, 0), (2, 1), (3, 1)),
    ((2, 0), (3, 2), (1, 2)),
    ((3, 0), (1, 3), (2, 3)),
)
M4_COMMUTANT_GENERATORS = (
    ((1, 0), (2, 0), (3, 0)),
    ((0, 1), (1, 2), (1, 3)),
    ((2, 1), (0, 2), (2, 3)),
    ((3, 1), (3, 2), (0, 3)),
)
M4_MASA_GENERATORS = ((1, 1), (2, 2), (3, 3))


def pauli_matrices() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """sigma_0 = I, sigma_1, sigma_2, sigma_3 (fresh copies)."""
    return tuple(s.copy() for s in _SIGMA)


def pauli_product(a: int, b: int) -> np.ndarray:
    return np.kron(_SIGMA[a], _SIGMA[b])


def shift(n: int) -> np.ndarray:
    """Cyclic shift X with X e_k = e_{k+1 mod n}."""
    return np.roll(np.eye(n, dtype=np.complex128), 1, axis=0)


def clock(n: int) -> np.ndarray:
    """Z = diag(1, w, ..., w^(n-1)) with w = exp(2 pi i / n)."""
    return np.diag(np.exp(2j * np.pi * np.arange(n) / n))


def weyl(n: int, a: int, b: int) -> np.ndarray:
    """Weyl operator X^a Z^b (exponents reduced mod n)."""
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    a %= n
    b %= n
    return np.linalg.matrix_power(shift(n), a) @ np.linalg.matrix_power(clock(n), b)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))


def _mub_directions(p: int) -> list[tuple[int, int]]:
    return [(0, 1)] + [(1, d) for d in range(p)]


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p > MAX_PRIME:
        raise ValueError(f"prime {p} exceeds supported maximum {MAX_PRIME}")


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Ordered family of pairwise complementary subalgebras of M_n."""

    n: int
    parts: tuple[Subalgebra, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise ValueError("a decomposition needs at least one part")
        for S in self.parts:
            if S.n != self.n:
                raise ValueError(f"part {S.label!r} lives in M_{S.n}, not M_{self.n}")

    @property
    def r(self) -> int:
        return len(self.parts)

    def _union(self, bases) -> np.ndarray:
        unit = np.eye(self.n, dtype=np.complex128)[None] / math.sqrt(self.n)
        return np.concatenate([unit] + [B[1:] for B in bases])

    @cached_property
    def span_rank(self) -> int:
        return gram_rank(self._union(S.basis for S in self.parts))

    @cached_property
    def commutant_span_rank(self) -> int:
        if any(S.commutant_basis is None for S in self.parts):
            return 0
        return gram_rank(self._union(S.commutant_basis for S in self.parts))

    @property
    def spanning(self) -> bool:
        count = 1 + sum(S.dim - 1 for S in self.parts)
        return count == self.n ** 2 and self.span_rank == self.n ** 2

    @property
    def commutant_spanning(self) -> bool:
        return self.commutant_span_rank == self.n ** 2


def _masa_from_unitaries(n: int, unitaries: Sequence[np.ndarray], label: str) -> Subalgebra:
    basis = np.asarray(orthonormalize([np.eye(n, dtype=np.complex128)] + list(unitaries)))
    return Subalgebra(n, basis, Kind.M, label, commutant_basis=basis,
                      blocks=((1, 1),) * n)


def qubit_pauli_decomposition() -> Decomposition:
    """The MASAs of M_2 generated by sigma_1, sigma_2, sigma_3, in that order."""
    parts = [_masa_from_unitaries(2, [_SIGMA[i]], f"A{i}") for i in (1, 2, 3)]
    return Decomposition(2, parts, "qubit-pauli")


def mub_masa_decomposition(p: int) -> Decomposition:
    """p+1 complementary MASAs of M_p from the Weyl directions (0,1), (1,d)."""
    _check_prime(p)
    parts = []
    for c, d in _mub_directions(p):
        family = [weyl(p, m * c, m * d) for m in range(1, p)]
        parts.append(_masa_from_unitaries(p, family, f"W({c},{d})"))
    return Decomposition(p, parts, f"mub-p{p}")


def _order_p_generator(p: int, c: int, d: int) -> np.ndarray:
    W = weyl(p, c, d)
    Wp = np.linalg.matrix_power(W, p)
    gamma = Wp[0, 0]
    if np.max(np.abs(Wp - gamma * np.eye(p))) > 1e-10:
        raise RuntimeError(f"W^p is not scalar for direction ({c}, {d})")
    # principal p-th root keeps W^p = I without parity-dependent formulas
    return W / cmath.exp(cmath.log(gamma) / p)


def mub_bases(p: int) -> list[np.ndarray]:
    """p+1 mutually unbiased bases of C^p, one per Weyl direction.

    Each basis is returned as a unitary whose columns are the basis
    vectors, obtained from the rank-one spectral projections
    ``P_k = (1/p) sum_m w^(-km) W^m`` of the phase-normalized generator.
    """
    _check_prime(p)
    omega = np.exp(2j * np.pi / p)
    bases = []
    for c, d in _mub_directions(p):
        W = _order_p_generator(p, c, d)
        powers = [np.linalg.matrix_power(W, m) for m in range(p)]
        cols = []
        for k in range(p):
            P = sum(omega ** (-k * m) * powers[m] for m in range(p)) / p
            rank = int(np.sum(np.linalg.svd(P, compute_uv=False) > 1e-8))
            if rank != 1:
                raise RuntimeError(f"spectral projection {k} of direction ({c}, {d}) has rank {rank}")
            j = int(np.argmax(np.linalg.norm(P, axis=0)))
            v = P[:, j] / np.linalg.norm(P[:, j])
            cols.append(v)
        bases.append(np.column_stack(cols))
    return bases


def m4_example2_decomposition() -> Decomposition:
    """Four F-subalgebras and the MASA A_5 of M_4, with tabulated commutants."""
    parts = []
    for j, (gens, cgens) in enumerate(zip(M4_FACTOR_GENERATORS, M4_COMMUTANT_GENERATORS), 1):
        S = from_generators(4, [pauli_product(a, b) for a, b in gens], Kind.F, f"A{j}")
        cb = orthonormalize([np.eye(4, dtype=np.complex128)] +
                            [pauli_product(a, b) for a, b in cgens])
        parts.append(S.with_commutant(cb))
    A5 = from_generators(4, [pauli_product(a, b) for a, b in M4_MASA_GENERATORS], Kind.M, "A5")
    parts.append(A5.with_commutant(A5.basis))
    return Decomposition(4, parts, "m4-example2")


_BUILDERS = {
    "qubit-pauli": qubit_pauli_decomposition,
    "m4-example2": m4_example2_decomposition,
}


def build_decomposition(name: str) -> Decomposition:
    """Look up a builder by name: qubit-pauli, m4-example2 or mub-p<k>."""
    if name in _BUILDERS:
        return _BUILDERS[name]()
    m = re.fullmatch(r"mub-p(\d+)", name)
    if m:
        return mub_masa_decomposition(int(m.group(1)))
    raise ValueError(f"unknown decomposition {name!r}")


# -- validation ----------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    max_violation: float
    detail: str = ""


@dataclass
class ValidationReport:
    name: str
    n: int
    checks: list[Check] = field(default_factory=list)
    spanning: bool = False
    commutant_spanning: bool = False
    span_rank: int = 0
    commutant_span_rank: int = 0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "passed": self.passed,
            "spanning": self.spanning,
            "commutant_spanning": self.commutant_spanning,
            "span_rank": self.span_rank,
            "commutant_span_rank": self.commutant_span_rank,
            "checks": [
                {"name": c.name, "passed": c.passed, "max_violation": c.max_violation,
                 "detail": c.detail}
                for c in self.checks
            ],
        }


def _pairwise_worst(bases) -> tuple[float, str]:
    worst, where = 0.0, ""
    for (i, A), (j, B) in combinations(enumerate(bases), 2):
        v = complementarity_violation(A, B)
        if v > worst:
            worst, where = v, f"parts {i + 1} and {j + 1}"
    return worst, where


def validate_decomposition(D: Decomposition, tol: float = COMPLEMENTARY_TOL) -> ValidationReport:
    """Recheck every structural claim of a decomposition.

    Covers unit-first normalization, orthonormality, pairwise
    complementarity of the parts and of their commutants, and whether each
    stored commutant basis really is the commutant (matched against the
    numerically computed kernel).  Failures are reported, never raised.
    """
    report = ValidationReport(D.name, D.n)
    unit = np.eye(D.n) / math.sqrt(D.n)

    ortho = 0.0
    first = 0.0
    for S in D.parts:
        for B in (S.basis, S.commutant_basis):
            if B is None:
                continue
            V = B.reshape(len(B), -1)
            ortho = max(ortho, float(np.max(np.abs(V.conj() @ V.T - np.eye(len(B))))))
            first = max(first, float(np.max(np.abs(B[0] - unit))))
    report.checks.append(Check("unit_first", first <= tol, first))
    report.checks.append(Check("orthonormal", ortho <= tol, ortho))

    worst, where = _pairwise_worst(D.parts)
    report.checks.append(Check("parts_complementary", worst <= tol, worst, where))

    missing = [S.label for S in D.parts if S.commutant_basis is None]
    if missing:
        report.checks.append(Check("commutants_present", False, math.inf,
                                   f"missing for {', '.join(missing)}"))
    else:
        comms = [Subalgebra(D.n, S.commutant_basis) for S in D.parts]
        worst, where = _pairwise_worst(comms)
        report.checks.append(Check("commutants_complementary", worst <= tol, worst, where))

        resid, where = 0.0, ""
        for S in D.parts:
            comm = max(float(np.max(np.abs(B @ C - C @ B)))
                       for B in S.basis for C in S.commutant_basis)
            span = span_residual(commutant(S).basis, S.commutant_basis)
            if max(comm, span) > resid:
                resid, where = max(comm, span), S.label
        report.checks.append(Check("commutants_correct", resid <= SPAN_TOL, resid, where))

    report.span_rank = D.span_rank
    report.commutant_span_rank = D.commutant_span_rank
    report.spanning = D.spanning
    report.commutant_spanning = D.commutant_spanning
    return report


# -- JSON ------------------------------------------------------------------------

def decomposition_to_json(D: Decomposition) -> dict:
    return {"name": D.name, "n": D.n, "parts": [subalgebra_to_json(S) for S in D.parts]}


def decomposition_from_json(obj: dict) -> Decomposition:
    try:
        return Decomposition(int(obj["n"]), [subalgebra_from_json(s) for s in obj["parts"]],
                             obj.get("name", ""))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed decomposition JSON: {exc}") from exc

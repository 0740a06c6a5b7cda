"""Generalized Pauli channels and their complete-positivity certification.

For a decomposition A_1, ..., A_r of M_n and real weights lam_i the channel is

    alpha(A) = (1 - sum lam) Tr(A)/n I + sum_i lam_i E_i(A),

with E_i the trace-preserving conditional expectation onto A_i.  Complete
positivity is decided two ways:

* analytically, from the coefficients of alpha in an orthonormal
  Kraus-type expansion built from the commutant bases (all must be >= 0);
* numerically, from the smallest eigenvalue of the Choi matrix.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from gpc.constructions import Decomposition, validate_decomposition
from gpc.matcore import as_cmatrix, hermitian_eigenvalues, matrix_unit
from gpc.subalgebra import conditional_expectation, orthonormalize

KRAUS_COEFF_TOL = 1e-12
RESTRICT_TOL = 1e-10
ORTHO_TOL = 1e-10


class InvalidDecomposition(ValueError):
    """The decomposition fails the hypotheses the CP criterion relies on."""


@dataclass(frozen=True, eq=False)
class GeneralizedPauliChannel:
    decomposition: Decomposition
    lam: tuple[float, ...]

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lam)
        if len(lam) != self.decomposition.r:
            raise ValueError(f"expected {self.decomposition.r} weights, got {len(lam)}")
        if not all(math.isfinite(x) for x in lam):
            raise ValueError("weights must be finite")
        object.__setattr__(self, "lam", lam)

    @property
    def n(self) -> int:
        return self.decomposition.n

    def __call__(self, A) -> np.ndarray:
        return apply(self, A)


@dataclass
class KrausForm:
    """alpha(A) = sum_t c_t V_t^* A V_t over an HS-orthonormal system V_t.

    ``groups[t]`` is ``("identity",)``, ``("part", j, k)`` for the k-th
    commutant element of part j (both 1-based), or ``("extension", t)``.
    """

    coefficients: np.ndarray
    elements: np.ndarray
    groups: list[tuple]

    def apply(self, A) -> np.ndarray:
        A = as_cmatrix(A)
        V = self.elements
        return np.einsum("t,tji,jl,tlm->im", self.coefficients, V.conj(), A, V)

    def orthonormality_violation(self) -> float:
        V = self.elements.reshape(len(self.elements), -1)
        return float(np.max(np.abs(V.conj() @ V.T - np.eye(len(V)))))

    def to_json(self) -> dict:
        return {
            "coefficients": [float(c) for c in self.coefficients],
            "groups": [list(g) for g in self.groups],
        }


@dataclass
class CpReport:
    analytic_cp: bool
    numeric_cp: bool
    min_choi_eigenvalue: float
    condition_margins: dict[str, float] = field(default_factory=dict)
    tolerance_used: float = 0.0

    def to_json(self) -> dict:
        return asdict(self)


def apply(ch: GeneralizedPauliChannel, A) -> np.ndarray:
    A = as_cmatrix(A)
    n = ch.n
    if A.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} matrix, got {A.shape}")
    out = (1.0 - sum(ch.lam)) * np.trace(A) / n * np.eye(n, dtype=np.complex128)
    for lam_i, S in zip(ch.lam, ch.decomposition.parts):
        out = out + lam_i * conditional_expectation(S, A)
    return out


def restrict_check(ch: GeneralizedPauliChannel, i: int, A) -> np.ndarray:
    """Apply the channel to an element of part ``i`` (1-based).

    On A_i the channel acts as the depolarizing map
    ``A -> lam_i A + (1 - lam_i) Tr(A)/n I``; a mismatch raises
    RuntimeError.
    """
    S = ch.decomposition.parts[i - 1]
    A = as_cmatrix(A)
    scale = max(1.0, float(np.linalg.norm(A)))
    if S.projection_residual(A) > RESTRICT_TOL * scale:
        raise ValueError(f"matrix is not in part {i} ({S.label})")
    out = apply(ch, A)
    lam = ch.lam[i - 1]
    expected = lam * A + (1 - lam) * np.trace(A) / ch.n * np.eye(ch.n)
    dev = float(np.max(np.abs(out - expected)))
    if dev > RESTRICT_TOL * scale:
        raise RuntimeError(f"restriction to part {i} is not depolarizing (deviation {dev:.2e})")
    return out


def choi(ch: GeneralizedPauliChannel) -> np.ndarray:
    """Choi matrix sum_ij alpha(E_ij) (x) E_ij, output factor first."""
    n = ch.n
    images = np.empty((n, n, n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            images[i, j] = apply(ch, matrix_unit(n, i + 1, j + 1))
    # entry [(a, i), (b, j)] = alpha(E_ij)[a, b]
    return images.transpose(2, 0, 3, 1).reshape(n * n, n * n)


def default_tolerance(C: np.ndarray) -> float:
    return 1e-9 * max(1.0, float(np.max(np.abs(C))))


def numeric_cp(ch: GeneralizedPauliChannel, tol: Optional[float] = None) -> tuple[bool, float]:
    """Choi positivity: returns (verdict, minimal Choi eigenvalue)."""
    C = choi(ch)
    if tol is None:
        tol = default_tolerance(C)
    lo = float(hermitian_eigenvalues(C)[0])
    return lo >= -tol, lo


def _commutant_dims(D: Decomposition) -> list[int]:
    return [len(S.commutant_basis) for S in D.parts]


def condition_margins(D: Decomposition, lam: Sequence[float]) -> dict[str, float]:
    """Margins of the analytic CP inequalities; CP iff all are >= 0.

    ``part_i`` is ``1 + n^2 lam_i / dim A_i' - sum lam``, ``global`` is
    ``sum_j lam_j (n^2 / dim A_j' - 1) + 1`` and, when the commutant
    bases do not span M_n, ``extension`` is ``(1 - sum lam) / n``.
    """
    n = D.n
    dims = _commutant_dims(D)
    lam = [float(x) for x in lam]
    total = sum(lam)
    margins = {f"part_{i}": 1 + n * n * l / d - total
               for i, (l, d) in enumerate(zip(lam, dims), 1)}
    margins["global"] = sum(l * (n * n / d - 1) for l, d in zip(lam, dims)) + 1
    if not D.commutant_spanning:
        margins["extension"] = (1 - total) / n
    return margins


def _require_valid(D: Decomposition) -> None:
    report = validate_decomposition(D)
    if not report.passed:
        bad = ", ".join(f"{c.name} ({c.max_violation:.2e})" for c in report.checks if not c.passed)
        raise InvalidDecomposition(f"decomposition {D.name!r} failed: {bad}")


def analytic_cp(ch: GeneralizedPauliChannel, tol: Optional[float] = None) -> CpReport:
    """Analytic verdict from the coefficient inequalities, plus the Choi check."""
    _require_valid(ch.decomposition)
    margins = condition_margins(ch.decomposition, ch.lam)
    C = choi(ch)
    if tol is None:
        tol = default_tolerance(C)
    lo = float(hermitian_eigenvalues(C)[0])
    return CpReport(
        analytic_cp=all(m >= 0 for m in margins.values()),
        numeric_cp=lo >= -tol,
        min_choi_eigenvalue=lo,
        condition_margins=margins,
        tolerance_used=tol,
    )


def kraus_elements(D: Decomposition) -> tuple[np.ndarray, list[tuple]]:
    """The orthonormal system I/sqrt(n), commutant elements, extension.

    Raises InvalidDecomposition if commutant elements of different parts
    are not orthogonal.
    """
    n = D.n
    elements = [np.eye(n, dtype=np.complex128) / math.sqrt(n)]
    groups: list[tuple] = [("identity",)]
    for j, S in enumerate(D.parts, 1):
        if S.commutant_basis is None:
            raise InvalidDecomposition(f"part {j} has no commutant basis")
        for k in range(1, len(S.commutant_basis)):
            elements.append(S.commutant_basis[k])
            groups.append(("part", j, k + 1))
    V = np.asarray(elements).reshape(len(elements), -1)
    dev = float(np.max(np.abs(V.conj() @ V.T - np.eye(len(V)))))
    if dev > ORTHO_TOL:
        raise InvalidDecomposition(f"commutant elements are not orthonormal across parts ({dev:.2e})")
    units = [matrix_unit(n, a, b) for a in range(1, n + 1) for b in range(1, n + 1)]
    full = orthonormalize(elements + units)
    for t, W in enumerate(full[len(elements):], 1):
        elements.append(W)
        groups.append(("extension", t))
    return np.asarray(elements), groups


def kraus_coefficients(D: Decomposition, lam: Sequence[float], groups: list[tuple]) -> np.ndarray:
    n = D.n
    dims = _commutant_dims(D)
    base = (1 - sum(lam)) / n
    part_term = [n * l / d for l, d in zip(lam, dims)]
    coeffs = []
    for g in groups:
        if g[0] == "identity":
            coeffs.append(base + sum(part_term))
        elif g[0] == "part":
            coeffs.append(base + part_term[g[1] - 1])
        else:
            coeffs.append(base)
    return np.asarray(coeffs)


def kraus_form(ch: GeneralizedPauliChannel) -> KrausForm:
    elements, groups = kraus_elements(ch.decomposition)
    return KrausForm(kraus_coefficients(ch.decomposition, ch.lam, groups), elements, groups)


def kraus_cp_check(form: KrausForm) -> bool:
    """CP iff every coefficient of an orthonormal Kraus-type form is >= 0."""
    dev = form.orthonormality_violation()
    if dev > ORTHO_TOL:
        raise ValueError(f"Kraus elements are not orthonormal ({dev:.2e})")
    return bool(np.all(form.coefficients >= -KRAUS_COEFF_TOL))


# -- qubit specialization ----------------------------------------------------------

def qubit_mu(lam: Sequence[float]) -> tuple[float, float, float, float]:
    """Weights mu_i of E(.) = sum_i mu_i sigma_i (.) sigma_i."""
    l1, l2, l3 = lam
    return (
        (1 + l1 + l2 + l3) / 4,
        (1 + l1 - l2 - l3) / 4,
        (1 - l1 + l2 - l3) / 4,
        (1 - l1 - l2 + l3) / 4,
    )


def qubit_lambda(mu: Sequence[float]) -> tuple[float, float, float]:
    m0, m1, m2, m3 = mu
    return (m0 + m1 - m2 - m3, m0 + m2 - m1 - m3, m0 + m3 - m1 - m2)


def cp_condition_qubit(lam: Sequence[float]) -> bool:
    """1 + lam3 >= |lam1 + lam2| and 1 - lam3 >= |lam1 - lam2|."""
    l1, l2, l3 = lam
    return (1 + l3 >= l1 + l2 and 1 + l3 >= -(l1 + l2)
            and 1 - l3 >= l1 - l2 and 1 - l3 >= -(l1 - l2))


def qubit_condition_margin(lam: Sequence[float]) -> float:
    l1, l2, l3 = lam
    return min(1 + l3 - abs(l1 + l2), 1 - l3 - abs(l1 - l2))


# -- sampling harness --------------------------------------------------------------

@dataclass
class SampleStats:
    agree: int = 0
    skipped: int = 0
    disagree: int = 0
    kraus_disagree: int = 0
    analytic_cp_count: int = 0
    worst_abs_min_eigenvalue: float = 0.0
    smallest_abs_margin: Optional[float] = None
    disagreements: list[list[float]] = field(default_factory=list)
    records: list[tuple[float, float]] = field(default_factory=list)

    def to_json(self) -> dict:
        out = asdict(self)
        del out["records"]
        return out


def sample_lambda(seed: int, index: int, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Weights for sample ``index``, drawn from a counter-keyed Philox stream.

    Each sample has its own (seed, index) key so results do not depend on
    evaluation order.
    """
    rng = np.random.Generator(np.random.Philox(key=seed, counter=[index, 0, 0, 0]))
    return rng.uniform(lo, hi)


def _box_bounds(box, r: int) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(box, dtype=float)
    if arr.shape == (2,):
        arr = np.tile(arr, (r, 1))
    if arr.shape != (r, 2) or not np.all(arr[:, 0] <= arr[:, 1]):
        raise ValueError(f"box must be (lo, hi) or {r} such pairs with lo <= hi")
    return arr[:, 0], arr[:, 1]


def sample_cp_agreement(D: Decomposition, count: int, seed: int, box, margin: float = 1e-6,
                        record: bool = False) -> SampleStats:
    """Cross-check the analytic and Choi verdicts on random weights.

    Samples whose smallest analytic margin lies within ``margin`` of zero
    are skipped; every other sample must give identical verdicts from the
    inequalities, the Kraus coefficient signs and the Choi spectrum.
    With ``record`` set, (smallest margin, smallest Choi eigenvalue) pairs
    of the compared samples are kept in ``stats.records``.
    """
    if margin <= 0:
        raise ValueError("margin must be positive")
    if count < 0:
        raise ValueError("count must be non-negative")
    stats = SampleStats()
    if count == 0:
        return stats
    _require_valid(D)
    lo, hi = _box_bounds(box, D.r)
    r = D.r
    # Choi(lam) is affine in lam: C_0 + sum_i lam_i (C_i - C_0)
    C0 = choi(GeneralizedPauliChannel(D, [0.0] * r))
    deltas = [choi(GeneralizedPauliChannel(D, np.eye(r)[i])) - C0 for i in range(r)]
    elements, groups = kraus_elements(D)
    form = KrausForm(np.zeros(len(groups)), elements, groups)
    if form.orthonormality_violation() > ORTHO_TOL:
        raise InvalidDecomposition("Kraus system is not orthonormal")
    for index in range(count):
        lam = sample_lambda(seed, index, lo, hi)
        margins = condition_margins(D, lam)
        worst = min(margins.values())
        if abs(worst) < margin:
            stats.skipped += 1
            continue
        if stats.smallest_abs_margin is None or abs(worst) < stats.smallest_abs_margin:
            stats.smallest_abs_margin = float(abs(worst))
        analytic = worst >= 0
        C = C0 + sum(l * d for l, d in zip(lam, deltas))
        ev = float(hermitian_eigenvalues(C)[0])
        numeric = ev >= -default_tolerance(C)
        form.coefficients = kraus_coefficients(D, lam, groups)
        kraus = kraus_cp_check(form)
        if record:
            stats.records.append((float(worst), ev))
        if analytic:
            stats.analytic_cp_count += 1
            # only negative rounding-level eigenvalues count against a CP verdict
            stats.worst_abs_min_eigenvalue = max(stats.worst_abs_min_eigenvalue, -min(ev, 0.0))
        if analytic == numeric:
            stats.agree += 1
        else:
            stats.disagree += 1
            stats.disagreements.append([float(x) for x in lam])
        if kraus != numeric:
            stats.kraus_disagree += 1
    return stats

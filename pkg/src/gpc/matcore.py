"""Dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; this module
only adds the handful of structured operations the rest of the package
needs (matrix units, Hilbert-Schmidt geometry, Kronecker/partial-trace
pairing and a checked Hermitian eigensolver).
"""

from __future__ import annotations

import numpy as np

HERMITIAN_RTOL = 1e-10
MAX_EIG_DIM = 256


def as_cmatrix(A, name: str = "matrix") -> np.ndarray:
    """Coerce ``A`` to a finite square complex128 array, or raise ValueError."""
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def matrix_unit(n: int, i: int, j: int) -> np.ndarray:
    """The matrix unit E_ij of M_n, with 1-based indices."""
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexError(f"matrix unit index ({i}, {j}) out of range for n={n}")
    E = np.zeros((n, n), dtype=np.complex128)
    E[i - 1, j - 1] = 1.0
    return E


def hs_inner(A, B) -> complex:
    """Hilbert-Schmidt inner product Tr(A^* B)."""
    A = as_cmatrix(A, "A")
    B = as_cmatrix(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    # Tr(A^* B) = sum_ij conj(A_ij) B_ij
    return complex(np.vdot(A, B))


def kron(A, B) -> np.ndarray:
    """Kronecker product; row index of the result is (row of A, row of B)."""
    return np.kron(as_cmatrix(A, "A"), as_cmatrix(B, "B"))


def partial_trace_first(X, n1: int, n2: int) -> np.ndarray:
    """Trace out the first tensor factor of ``X`` acting on C^n1 (x) C^n2.

    Uses the same index pairing as :func:`kron`, so that
    ``partial_trace_first(kron(A, B), n1, n2) == trace(A) * B``.
    """
    X = as_cmatrix(X, "X")
    if n1 < 1 or n2 < 1 or X.shape[0] != n1 * n2:
        raise ValueError(f"dimension {X.shape[0]} does not factor as {n1} x {n2}")
    return np.einsum("iaib->ab", X.reshape(n1, n2, n1, n2))


def hermitian_eigenvalues(H) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix, in nondecreasing order.

    Raises
    ------
    ValueError
        If ``H`` deviates from Hermitian by more than ``1e-10`` relative to
        its largest entry, or exceeds the supported dimension.
    """
    H = as_cmatrix(H, "H")
    if H.shape[0] > MAX_EIG_DIM:
        raise ValueError(f"dimension {H.shape[0]} exceeds supported maximum {MAX_EIG_DIM}")
    scale = max(1.0, float(np.max(np.abs(H))))
    skew = float(np.max(np.abs(H - H.conj().T)))
    if skew > HERMITIAN_RTOL * scale:
        raise ValueError(f"matrix is not Hermitian (max |H - H^*| = {skew:.3e})")
    # symmetrize away the rounding-level skew part before diagonalizing
    return np.linalg.eigvalsh(0.5 * (H + H.conj().T))


def random_cmatrix(n: int, rng: np.random.Generator) -> np.ndarray:
    """Complex Ginibre matrix with standard normal real and imaginary parts."""
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    Q, R = np.linalg.qr(random_cmatrix(n, rng))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def matrix_to_json(A) -> dict:
    """Shared matrix wire format: rows outermost, entries as [re, im]."""
    A = as_cmatrix(A)
    return {
        "dim": int(A.shape[0]),
        "data": [[[float(z.real), float(z.imag)] for z in row] for row in A],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        n = int(obj["dim"])
        data = np.asarray(obj["data"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from exc
    if data.shape != (n, n, 2):
        raise ValueError(f"matrix JSON data has shape {data.shape}, expected {(n, n, 2)}")
    # view keeps every bit, including signed zeros, for exact round trips
    return as_cmatrix(np.ascontiguousarray(data).view(np.complex128)[..., 0])

"""Dense complex matrices standing in for bounded operators on C^d.

Operators are plain numpy arrays of dtype complex128.  The model Hilbert
space is C^d with the standard inner product, conjugate-linear in the
*second* argument: inner(x, y) = sum_i x_i * conj(y_i) = np.vdot(y, x).
Everything is dense and d is capped at MAX_DIM, which keeps the Hermitian
eigensolvers exact-ish and the experiments at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_DIM = 64

HERMITIAN_INPUT_TOL = 1e-6

DEFAULT_PSD_TOL = 1e-9


class OperatorError(ValueError):
    """Invalid operator data (shape, size cap, non-finite entries)."""


def as_operator(a) -> np.ndarray:
    """Validate and return a square complex matrix of dimension <= MAX_DIM."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise OperatorError(f"operator must be square, got shape {a.shape}")
    if a.shape[0] < 1:
        raise OperatorError("operator dimension must be >= 1")
    if a.shape[0] > MAX_DIM:
        raise OperatorError(f"dimension {a.shape[0]} exceeds the cap {MAX_DIM}")
    if not np.all(np.isfinite(a.view(np.float64))):
        raise OperatorError("operator entries must be finite")
    return a


def inner(x: np.ndarray, y: np.ndarray) -> complex:
    """Inner product on C^d, conjugate-linear in the second argument."""
    return complex(np.vdot(y, x))


def operator_norm(a) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(as_operator(a), 2))


def frobenius_norm(a) -> float:
    return float(np.linalg.norm(np.asarray(a)))


def adjoint(a) -> np.ndarray:
    return np.asarray(a).conj().T


@dataclass(frozen=True)
class PsdReport:
    """Smallest eigenvalue of a Hermitian matrix, with a verdict."""

    min_eigenvalue: float
    tolerance: float
    verdict: bool

    def to_json(self) -> dict:
        return {
            "min_eigenvalue": self.min_eigenvalue,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
        }


def psd_min_eig(a, tol: float = DEFAULT_PSD_TOL) -> PsdReport:
    """Positive-semidefiniteness check via the smallest eigenvalue.

    The input must be Hermitian up to HERMITIAN_INPUT_TOL in operator
    norm; it is then symmetrized as (A + A*)/2 before the dense
    eigensolve, so tiny rounding asymmetry cannot flip the verdict.
    """
    a = as_operator(a)
    if tol <= 0:
        raise OperatorError(f"tolerance must be positive, got {tol}")
    asym = float(np.linalg.norm(a - adjoint(a), 2))
    if asym > HERMITIAN_INPUT_TOL:
        raise OperatorError(
            f"matrix is not Hermitian: ||A - A*|| = {asym:.3e} > {HERMITIAN_INPUT_TOL}"
        )
    sym = (a + adjoint(a)) / 2.0
    min_eig = float(np.linalg.eigvalsh(sym)[0])
    return PsdReport(min_eigenvalue=min_eig, tolerance=tol, verdict=min_eig >= -tol)


def direct_sum(blocks) -> np.ndarray:
    """Block-diagonal sum of square complex matrices."""
    blocks = [as_operator(b) for b in blocks]
    if not blocks:
        raise OperatorError("direct_sum needs at least one block")
    total = sum(b.shape[0] for b in blocks)
    if total > MAX_DIM:
        raise OperatorError(f"direct sum dimension {total} exceeds the cap {MAX_DIM}")
    out = np.zeros((total, total), dtype=np.complex128)
    pos = 0
    for b in blocks:
        d = b.shape[0]
        out[pos : pos + d, pos : pos + d] = b
        pos += d
    return out


def block_slot(a: np.ndarray, dims, i: int) -> np.ndarray:
    """Compress a block matrix back to its i-th diagonal block.

    This is U_i* A U_i for the coordinate inclusion U_i of the i-th
    summand; on a direct_sum output it recovers the original block
    exactly.
    """
    a = np.asarray(a)
    start = sum(dims[:i])
    stop = start + dims[i]
    return a[start:stop, start:stop]


def polar_unitary_factor(a) -> np.ndarray:
    """Unitary factor U of the polar decomposition A = U|A|.

    Computed from the SVD; this is the nearest unitary to A in both the
    operator and Frobenius norms when A is invertible.
    """
    a = as_operator(a)
    u, _, vh = np.linalg.svd(a)
    return u @ vh


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random unitary: QR of a complex Gaussian with phase fix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# ---------------------------------------------------------------------------
# JSON form: {dim, re[][], im[][]} with row-major entries


def operator_to_json(a) -> dict:
    a = as_operator(a)
    return {
        "dim": a.shape[0],
        "re": a.real.tolist(),
        "im": a.imag.tolist(),
    }


def operator_from_json(data: dict) -> np.ndarray:
    dim = int(data["dim"])
    re = np.asarray(data["re"], dtype=float)
    im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise OperatorError(
            f"re/im must be {dim}x{dim} row-major arrays, got {re.shape} and {im.shape}"
        )
    return as_operator(re + 1j * im)

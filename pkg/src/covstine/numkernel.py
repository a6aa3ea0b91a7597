"""Dense complex linear-algebra kernel used by every construction.

Matrices are plain ``numpy.ndarray`` values with complex128 entries.  This
module fixes the package-wide rank-cutoff policy (relative cutoff with an
absolute floor), the Gram factorization that stands in for quotienting a
semi-inner-product space by its null vectors, and the JSON wire format for
matrices.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NotHermitianError, NotPsdError, ParseError, ShapeMismatchError

# Eigenvalues at or below REL_TOL times the largest eigenvalue count as zero.
REL_TOL = 1e-10
# Tolerances never shrink below this, so near-zero data is not over-resolved.
ABS_FLOOR = 1e-12


def as_matrix(data) -> np.ndarray:
    m = np.asarray(data, dtype=np.complex128)
    if m.ndim != 2:
        raise ShapeMismatchError(f"expected a 2-d matrix, got ndim={m.ndim}")
    return m


def adjoint(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def frobenius(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m))


def maxabs(arr) -> float:
    """Largest absolute entry, 0.0 for empty arrays."""
    arr = np.asarray(arr)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))


def opnorm(m: np.ndarray) -> float:
    """Spectral norm, 0.0 for empty matrices."""
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


class EigDecomposition(NamedTuple):
    values: np.ndarray  # real, descending
    vectors: np.ndarray  # unitary, columns align with values


def hermitian_eigendecomposition(m, tol: float = REL_TOL) -> EigDecomposition:
    """Eigendecompose a Hermitian matrix, eigenvalues sorted descending.

    Raises ``NotHermitianError`` when the Hermitian defect exceeds
    ``tol * max(1, ||m||_F)``; the defect is reported in the message.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeMismatchError(f"matrix is {m.shape[0]}x{m.shape[1]}, not square")
    defect = frobenius(m - adjoint(m))
    scale = max(1.0, frobenius(m))
    if defect > tol * scale:
        raise NotHermitianError(
            f"Hermitian defect ||m - m*||_F = {defect:.3e} exceeds {tol:.1e} * {scale:.3e}"
        )
    values, vectors = np.linalg.eigh((m + adjoint(m)) / 2.0)
    return EigDecomposition(values[::-1].copy(), vectors[:, ::-1].copy())


class GramFactor(NamedTuple):
    rank: int
    F: np.ndarray  # rank x D, maps raw vectors to quotient coordinates
    L: np.ndarray  # D x rank, lifts quotient coordinates to representatives
    eigenvalues: np.ndarray  # full descending profile behind the rank decision


def rank_cutoff(max_eig: float, rel_tol: float = REL_TOL) -> float:
    return max(rel_tol * max(max_eig, 0.0), ABS_FLOOR)


def gram_factor(gram, rel_tol: float = REL_TOL) -> GramFactor:
    """Rank-revealing factorization of a PSD Gram matrix.

    Returns ``(r, F, L)`` with ``xi* G zeta = (F xi)*(F zeta)`` and
    ``F @ L = I_r``.  ``F`` plays the role of the quotient map by the null
    space of the semi-inner product ``G``; ``L`` picks representatives.
    """
    gram = as_matrix(gram)
    if gram.shape[0] != gram.shape[1]:
        raise ShapeMismatchError(f"Gram matrix is {gram.shape[0]}x{gram.shape[1]}")
    dim = gram.shape[0]
    if dim == 0:
        empty = np.zeros((0, 0), dtype=np.complex128)
        return GramFactor(0, empty, empty, np.zeros(0))
    values, vectors = hermitian_eigendecomposition(gram, tol=max(rel_tol, REL_TOL))
    cutoff = rank_cutoff(float(values[0]), rel_tol)
    if values[-1] < -cutoff:
        raise NotPsdError(
            f"Gram matrix has eigenvalue {values[-1]:.3e} below -{cutoff:.3e}"
        )
    rank = int(np.count_nonzero(values > cutoff))
    kept = values[:rank]
    basis = vectors[:, :rank]
    sqrt_vals = np.sqrt(kept)
    F = sqrt_vals[:, None] * adjoint(basis)
    L = basis / sqrt_vals[None, :] if rank else np.zeros((dim, 0), dtype=np.complex128)
    return GramFactor(rank, F, L, values)


class PsdReport(NamedTuple):
    ok: bool
    min_eig: float
    herm_defect: float  # nonzero input asymmetry is symmetrized away but flagged


def psd_check(m, tol: float = REL_TOL) -> PsdReport:
    """Positive-semidefiniteness test on the Hermitian part of ``m``."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeMismatchError(f"matrix is {m.shape[0]}x{m.shape[1]}, not square")
    if m.shape[0] == 0:
        return PsdReport(True, 0.0, 0.0)
    defect = frobenius(m - adjoint(m))
    sym = (m + adjoint(m)) / 2.0
    values = np.linalg.eigvalsh(sym)
    min_eig = float(values[0])
    scale = max(1.0, float(values[-1]), -min_eig)
    ok = min_eig >= -max(tol * scale, ABS_FLOOR)
    return PsdReport(bool(ok), min_eig, defect)


def least_squares_solve(a, b) -> np.ndarray:
    """Minimum-norm least-squares solution of ``a @ x = b``."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[0] != b.shape[0]:
        raise ShapeMismatchError(
            f"row counts differ: A has {a.shape[0]}, B has {b.shape[0]}"
        )
    if a.shape[1] == 0:
        return np.zeros((0, b.shape[1]), dtype=np.complex128)
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    return x


class RankProfile(NamedTuple):
    rank: int
    singular_values: np.ndarray  # descending


def psd_rank(gram, rel_tol: float = REL_TOL) -> RankProfile:
    """Rank of a PSD Gram matrix by counting eigenvalues above the cutoff."""
    gram = as_matrix(gram)
    if gram.size == 0:
        return RankProfile(0, np.zeros(0))
    values = np.linalg.eigvalsh((gram + adjoint(gram)) / 2.0)[::-1]
    cutoff = rank_cutoff(float(values[0]), rel_tol)
    rank = int(np.count_nonzero(values > cutoff))
    return RankProfile(rank, np.sqrt(np.clip(values, 0.0, None)))


def numerical_rank(m, rel_tol: float = REL_TOL) -> RankProfile:
    """Rank of the column span of ``m``, decided on the eigenvalues of its Gram.

    Using the Gram eigenvalue rule (rather than raw singular values) keeps
    rank decisions here identical to the ones made by ``gram_factor``.
    """
    m = as_matrix(m)
    if m.size == 0:
        return RankProfile(0, np.zeros(0))
    gram = m @ adjoint(m) if m.shape[0] <= m.shape[1] else adjoint(m) @ m
    values = np.linalg.eigvalsh((gram + adjoint(gram)) / 2.0)[::-1]
    cutoff = rank_cutoff(float(values[0]), rel_tol)
    rank = int(np.count_nonzero(values > cutoff))
    return RankProfile(rank, np.sqrt(np.clip(values, 0.0, None)))


def orthonormal_range(m, rel_tol: float = REL_TOL):
    """Orthonormal basis of the column span of ``m`` with its Gram profile.

    Returns ``(basis, eigenvalues)`` where the columns of ``basis`` are the
    eigenvectors of ``m m*`` above the rank cutoff and ``eigenvalues`` is the
    full descending profile (the audit trail for the rank decision).
    """
    m = as_matrix(m)
    rows = m.shape[0]
    if m.size == 0:
        return np.zeros((rows, 0), dtype=np.complex128), np.zeros(rows)
    gram = m @ adjoint(m)
    values, vectors = np.linalg.eigh((gram + adjoint(gram)) / 2.0)
    values, vectors = values[::-1], vectors[:, ::-1]
    cutoff = rank_cutoff(float(values[0]), rel_tol)
    rank = int(np.count_nonzero(values > cutoff))
    return vectors[:, :rank].copy(), values.copy()


def complex_normal(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """Standard complex Gaussian matrix (unit-variance entries)."""
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def haar_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-distributed unitary via phase-fixed QR of a complex Gaussian."""
    if dim == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    z = complex_normal(rng, dim, dim)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    phases = diag / np.abs(np.where(np.abs(diag) > 0, diag, 1.0))
    return q * phases[None, :]


def inv_sqrt_psd(m, rel_tol: float = REL_TOL) -> np.ndarray:
    """Inverse square root of a positive-definite matrix via eigendecomposition."""
    values, vectors = hermitian_eigendecomposition(as_matrix(m))
    if values.size and values[-1] <= rank_cutoff(float(values[0]), rel_tol):
        raise NotPsdError("matrix is singular at the rank cutoff; cannot invert")
    inv_sqrt = vectors / np.sqrt(values)[None, :]
    return inv_sqrt @ adjoint(vectors)


def mat_to_json(m) -> dict:
    """Serialize a matrix as row-major [re, im] pairs with explicit shape."""
    m = as_matrix(m)
    entries = [[float(z.real), float(z.imag)] for z in m.reshape(-1)]
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "entries": entries}


def mat_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ParseError("matrix payload must be an object with rows/cols/entries")
    for key in ("rows", "cols", "entries"):
        if key not in obj:
            raise ParseError(f"matrix payload: missing field '{key}'")
    extra = set(obj) - {"rows", "cols", "entries"}
    if extra:
        raise ParseError(f"matrix payload: unknown field '{sorted(extra)[0]}'")
    rows, cols = int(obj["rows"]), int(obj["cols"])
    entries = obj["entries"]
    if len(entries) != rows * cols:
        raise ParseError(
            f"matrix payload: {len(entries)} entries for shape {rows}x{cols}"
        )
    flat = np.array(
        [complex(re, im) for re, im in entries], dtype=np.complex128
    ) if entries else np.zeros(0, dtype=np.complex128)
    return flat.reshape(rows, cols)

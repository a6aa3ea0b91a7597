"""Finite-dimensional C*-algebras as direct sums of full matrix blocks.

An algebra is described by its block sizes ``[n_1, ..., n_k]``.  Elements
live either as per-block matrices (``AlgebraElement``) or as coordinate
vectors over the canonical matrix-unit basis; the basis is enumerated block
by block, row-major, with labels ``"b:i:j"``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import numkernel as nk
from .errors import NotHermitianError, ParseError, ShapeMismatchError


@dataclass(frozen=True)
class CStarAlgebra:
    """Direct sum of matrix algebras, held abstractly by block sizes."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        if len(self.blocks) < 1 or any(n < 1 for n in self.blocks):
            raise ShapeMismatchError(f"invalid block sizes {self.blocks}")
        object.__setattr__(self, "blocks", tuple(int(n) for n in self.blocks))

    @property
    def dim(self) -> int:
        """Linear dimension N = sum of squared block sizes."""
        return sum(n * n for n in self.blocks)

    @property
    def embed_dim(self) -> int:
        """Size E of the block-diagonal embedding, sum of block sizes."""
        return sum(self.blocks)

    def block_offsets(self) -> list[int]:
        offsets, total = [], 0
        for n in self.blocks:
            offsets.append(total)
            total += n * n
        return offsets

    def basis_index(self, block: int, i: int, j: int) -> int:
        return self.block_offsets()[block] + i * self.blocks[block] + j

    def basis_labels(self) -> list[str]:
        return [
            f"{b}:{i}:{j}"
            for b, n in enumerate(self.blocks)
            for i in range(n)
            for j in range(n)
        ]


@lru_cache(maxsize=None)
def _structure(blocks: tuple[int, ...]):
    """Multiplication tensor, star permutation, unit and trace vectors."""
    algebra = CStarAlgebra(blocks)
    dim = algebra.dim
    mul = np.zeros((dim, dim, dim), dtype=np.complex128)
    star_perm = np.zeros(dim, dtype=np.int64)
    unit = np.zeros(dim, dtype=np.complex128)
    trace = np.zeros(dim, dtype=np.complex128)
    offset = 0
    for n in algebra.blocks:
        for i in range(n):
            for j in range(n):
                idx = offset + i * n + j
                star_perm[idx] = offset + j * n + i
                if i == j:
                    unit[idx] = 1.0
                    trace[idx] = 1.0
                # E_{ij} E_{lk'}: nonzero only inside the same block, j == l
                for k in range(n):
                    mul[idx, offset + j * n + k, offset + i * n + k] = 1.0
        offset += n * n
    return mul, star_perm, unit, trace


def mult_tensor(algebra: CStarAlgebra) -> np.ndarray:
    """``mul[k, l, :]`` are the coordinates of ``E_k E_l``."""
    return _structure(algebra.blocks)[0]


def star_permutation(algebra: CStarAlgebra) -> np.ndarray:
    """Index permutation sending each matrix unit to its adjoint."""
    return _structure(algebra.blocks)[1].copy()


def star_coords(algebra: CStarAlgebra, coords: np.ndarray) -> np.ndarray:
    """Coordinates of the adjoint: conjugate and transpose each block."""
    _, perm, _, _ = _structure(algebra.blocks)
    out = np.zeros_like(coords, dtype=np.complex128)
    out[perm] = np.conj(coords)
    return out


def unit_coords(algebra: CStarAlgebra) -> np.ndarray:
    return _structure(algebra.blocks)[2].copy()


def trace_coords(algebra: CStarAlgebra) -> np.ndarray:
    """tr of the block-diagonal embedding, as a linear functional on coords."""
    return _structure(algebra.blocks)[3].copy()


def multiply_coords(algebra: CStarAlgebra, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("k,l,klm->m", a, b, mult_tensor(algebra))


def left_mult_matrix(algebra: CStarAlgebra, coords: np.ndarray) -> np.ndarray:
    """Matrix of left multiplication by the element with given coordinates."""
    return np.einsum("k,klm->ml", coords, mult_tensor(algebra))


def coords_to_blocks(algebra: CStarAlgebra, coords: np.ndarray) -> list[np.ndarray]:
    out, offset = [], 0
    for n in algebra.blocks:
        out.append(np.asarray(coords[offset : offset + n * n]).reshape(n, n).copy())
        offset += n * n
    return out


def blocks_to_coords(algebra: CStarAlgebra, data) -> np.ndarray:
    parts = []
    for n, blk in zip(algebra.blocks, data, strict=True):
        blk = nk.as_matrix(blk)
        if blk.shape != (n, n):
            raise ShapeMismatchError(f"block of shape {blk.shape}, expected ({n},{n})")
        parts.append(blk.reshape(-1))
    return np.concatenate(parts)


def embed_coords(algebra: CStarAlgebra, coords: np.ndarray) -> np.ndarray:
    """Block-diagonal E x E matrix of the element (the embedding representation)."""
    total = algebra.embed_dim
    out = np.zeros((total, total), dtype=np.complex128)
    pos = 0
    for blk in coords_to_blocks(algebra, coords):
        n = blk.shape[0]
        out[pos : pos + n, pos : pos + n] = blk
        pos += n
    return out


@dataclass(frozen=True)
class AlgebraElement:
    """Element of a block algebra, stored as one matrix per block."""

    algebra: CStarAlgebra
    data: tuple[np.ndarray, ...]

    @classmethod
    def from_blocks(cls, algebra: CStarAlgebra, data) -> "AlgebraElement":
        blocks = []
        for n, blk in zip(algebra.blocks, data, strict=True):
            blk = nk.as_matrix(blk)
            if blk.shape != (n, n):
                raise ShapeMismatchError(
                    f"block of shape {blk.shape}, expected ({n},{n})"
                )
            blocks.append(blk)
        return cls(algebra, tuple(blocks))

    @classmethod
    def from_coords(cls, algebra: CStarAlgebra, coords) -> "AlgebraElement":
        return cls(algebra, tuple(coords_to_blocks(algebra, np.asarray(coords))))

    @classmethod
    def unit(cls, algebra: CStarAlgebra) -> "AlgebraElement":
        return cls.from_coords(algebra, unit_coords(algebra))

    def coords(self) -> np.ndarray:
        return blocks_to_coords(self.algebra, self.data)

    def star(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(nk.adjoint(b) for b in self.data))

    def embed(self) -> np.ndarray:
        return embed_coords(self.algebra, self.coords())

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(
            self.algebra, tuple(a + b for a, b in zip(self.data, other.data))
        )

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(
            self.algebra, tuple(a - b for a, b in zip(self.data, other.data))
        )

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return AlgebraElement(
                self.algebra, tuple(a @ b for a, b in zip(self.data, other.data))
            )
        return AlgebraElement(self.algebra, tuple(other * b for b in self.data))

    def __rmul__(self, scalar):
        return AlgebraElement(self.algebra, tuple(scalar * b for b in self.data))


def element_positive(a: AlgebraElement, tol: float = nk.REL_TOL) -> nk.PsdReport:
    """Positivity of an algebra element, decided block by block.

    Raises ``NotHermitianError`` when some block is not Hermitian within
    ``tol`` relative to its scale.
    """
    min_eig = np.inf
    worst_defect = 0.0
    ok = True
    for blk in a.data:
        defect = nk.frobenius(blk - nk.adjoint(blk))
        scale = max(1.0, nk.frobenius(blk))
        if defect > tol * scale:
            raise NotHermitianError(
                f"block Hermitian defect {defect:.3e} exceeds {tol:.1e} * {scale:.3e}"
            )
        report = nk.psd_check(blk, tol)
        ok = ok and report.ok
        min_eig = min(min_eig, report.min_eig)
        worst_defect = max(worst_defect, report.herm_defect)
    return nk.PsdReport(bool(ok), float(min_eig), worst_defect)


@dataclass(frozen=True)
class AlgebraRepresentation:
    """Linear map into L(H) stored on the matrix-unit basis."""

    algebra: CStarAlgebra
    space_dim: int
    images: np.ndarray  # shape (N, space_dim, space_dim)

    def __post_init__(self):
        images = np.asarray(self.images, dtype=np.complex128)
        if images.shape != (self.algebra.dim, self.space_dim, self.space_dim):
            raise ShapeMismatchError(
                f"images shape {images.shape}, expected "
                f"({self.algebra.dim},{self.space_dim},{self.space_dim})"
            )
        object.__setattr__(self, "images", images)

    def apply(self, coords: np.ndarray) -> np.ndarray:
        return np.tensordot(np.asarray(coords), self.images, axes=(0, 0))


def embedding_representation(algebra: CStarAlgebra) -> AlgebraRepresentation:
    """The faithful representation on C^E by block-diagonal matrices."""
    dim = algebra.dim
    images = np.stack(
        [embed_coords(algebra, np.eye(dim, dtype=np.complex128)[k]) for k in range(dim)]
    )
    return AlgebraRepresentation(algebra, algebra.embed_dim, images)


class RepresentationReport(NamedTuple):
    mult_residual: float
    star_residual: float
    unit_deviation: float  # || pi(1) - I ||
    unit_projection_defect: float  # how far pi(1) is from a projection
    unital: bool

    @property
    def max_residual(self) -> float:
        return max(self.mult_residual, self.star_residual)


def check_representation(
    rep: AlgebraRepresentation, tol: float = nk.REL_TOL
) -> RepresentationReport:
    """Residuals of multiplicativity, star-preservation and the unit image.

    The unit image is either close to the identity (``unital``) or it is
    reported as a (possibly proper) projection via its idempotency defect.
    """
    algebra = rep.algebra
    mul = mult_tensor(algebra)
    _, star_perm, unit, _ = _structure(algebra.blocks)
    images = rep.images
    scale = max(1.0, nk.maxabs(images))

    products = np.einsum("kab,lbc->klac", images, images)
    expected = np.tensordot(mul, images, axes=(2, 0))
    mult_residual = nk.maxabs(products - expected) / scale

    star_images = np.conj(np.transpose(images, (0, 2, 1)))
    star_residual = nk.maxabs(images[star_perm] - star_images) / scale

    unit_image = np.tensordot(unit, images, axes=(0, 0))
    identity = nk.eye(rep.space_dim)
    unit_deviation = nk.maxabs(unit_image - identity)
    proj_defect = max(
        nk.maxabs(unit_image @ unit_image - unit_image),
        nk.maxabs(unit_image - nk.adjoint(unit_image)),
    )
    return RepresentationReport(
        mult_residual,
        star_residual,
        unit_deviation,
        proj_defect,
        bool(unit_deviation <= tol * scale),
    )


class ChoiReport(NamedTuple):
    choi: list[np.ndarray]  # one Choi matrix per block
    cp: bool
    min_eig: float


def choi_blocks(
    algebra: CStarAlgebra, images: np.ndarray, tol: float = nk.REL_TOL
) -> ChoiReport:
    """Per-block Choi matrices of a linear map given on the matrix-unit basis.

    For a block of size n the Choi matrix is ``sum_{ij} phi(E_ij) (x) e_ij``;
    the map is completely positive iff every block matrix is PSD.  Complete
    positivity for a direct-sum algebra reduces to its simple blocks, so this
    is equivalent to positivity of all matrix amplifications.
    """
    images = np.asarray(images, dtype=np.complex128)
    space_dim = images.shape[1]
    choi = []
    min_eig = np.inf
    cp = True
    offset = 0
    for n in algebra.blocks:
        blk_images = images[offset : offset + n * n].reshape(n, n, space_dim, space_dim)
        # entry [(p,a),(q,b)] = phi(E_ab)[p,q]
        c = blk_images.transpose(2, 0, 3, 1).reshape(n * space_dim, n * space_dim)
        choi.append(c)
        report = nk.psd_check(c, tol)
        herm_ok = report.herm_defect <= tol * max(1.0, nk.frobenius(c))
        cp = cp and report.ok and herm_ok
        min_eig = min(min_eig, report.min_eig)
        offset += n * n
    return ChoiReport(choi, bool(cp), float(min_eig))


def algebra_to_json(algebra: CStarAlgebra) -> dict:
    return {"blocks": list(algebra.blocks)}


def algebra_from_json(obj) -> CStarAlgebra:
    if not isinstance(obj, dict) or set(obj) != {"blocks"}:
        raise ParseError("algebra payload must be {'blocks': [...]}")
    return CStarAlgebra(tuple(int(n) for n in obj["blocks"]))


def element_to_json(a: AlgebraElement) -> list:
    return [nk.mat_to_json(blk) for blk in a.data]


def element_from_json(algebra: CStarAlgebra, obj) -> AlgebraElement:
    if not isinstance(obj, list):
        raise ParseError("element payload must be a list of block matrices")
    return AlgebraElement.from_blocks(algebra, [nk.mat_from_json(blk) for blk in obj])


def representation_to_json(rep: AlgebraRepresentation) -> dict:
    labels = rep.algebra.basis_labels()
    return {
        "space_dim": rep.space_dim,
        "images": {label: nk.mat_to_json(img) for label, img in zip(labels, rep.images)},
    }


def representation_from_json(algebra: CStarAlgebra, obj) -> AlgebraRepresentation:
    if not isinstance(obj, dict) or set(obj) != {"space_dim", "images"}:
        raise ParseError("representation payload must have space_dim and images")
    labels = algebra.basis_labels()
    missing = [label for label in labels if label not in obj["images"]]
    if missing:
        raise ParseError(f"representation payload: missing image '{missing[0]}'")
    extra = set(obj["images"]) - set(labels)
    if extra:
        raise ParseError(f"representation payload: unknown basis label '{sorted(extra)[0]}'")
    images = np.stack([nk.mat_from_json(obj["images"][label]) for label in labels])
    return AlgebraRepresentation(algebra, int(obj["space_dim"]), images)

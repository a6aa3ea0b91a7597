"""Completely positive maps on algebras and on Hilbert modules.

A module CP map ``Phi: X -> L(H, K)`` carries a companion CP map
``phi: A -> L(H)`` tied to it by ``Phi(x)* Phi(y) = phi(<x, y>)``.  Maps are
stored by their images on basis elements.  Covariant maps additionally carry
a dynamical system and the two unitary group representations they intertwine.

Random instances are produced by compressing an amplified concrete
representation with group-averaged intertwiners; averaging the map itself
would destroy the defining identity, compressing a representation never does.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import cstar, hilbmod
from . import numkernel as nk
from .errors import (
    DegenerateAverageError,
    InconsistentError,
    NotCoisometryError,
    NotCpError,
    NotFullError,
    NotIntertwiningError,
    ShapeMismatchError,
)


@dataclass(frozen=True)
class CPMapAlgebra:
    """Linear map A -> L(H) on the matrix-unit basis, expected CP."""

    algebra: cstar.CStarAlgebra
    space_dim: int
    images: np.ndarray  # (N, space_dim, space_dim)

    def __post_init__(self):
        images = np.asarray(self.images, dtype=np.complex128)
        if images.shape != (self.algebra.dim, self.space_dim, self.space_dim):
            raise ShapeMismatchError(f"cp-map images shape {images.shape}")
        object.__setattr__(self, "images", images)

    def apply(self, coords: np.ndarray) -> np.ndarray:
        return np.tensordot(np.asarray(coords), self.images, axes=(0, 0))

    def choi(self, tol: float = nk.REL_TOL) -> cstar.ChoiReport:
        return cstar.choi_blocks(self.algebra, self.images, tol)

    def hermiticity_residual(self) -> float:
        starred = np.stack(
            [
                self.apply(cstar.star_coords(self.algebra, np.eye(self.algebra.dim)[k]))
                for k in range(self.algebra.dim)
            ]
        )
        adjoints = np.conj(np.transpose(self.images, (0, 2, 1)))
        scale = max(1.0, nk.maxabs(self.images))
        return nk.maxabs(starred - adjoints) / scale if self.images.size else 0.0


@dataclass(frozen=True)
class ModuleCPMap:
    """CP map on a module together with its companion on the algebra."""

    module: hilbmod.HilbertModule
    images: np.ndarray  # (m, dim K, dim H)
    companion: CPMapAlgebra

    def __post_init__(self):
        images = np.asarray(self.images, dtype=np.complex128)
        if images.ndim != 3 or images.shape[0] != self.module.dim:
            raise ShapeMismatchError(f"module cp-map images shape {images.shape}")
        if images.shape[2] != self.companion.space_dim:
            raise ShapeMismatchError(
                "module cp-map domain does not match its companion's space"
            )
        object.__setattr__(self, "images", images)

    @property
    def space_dims(self) -> tuple[int, int]:
        return self.images.shape[2], self.images.shape[1]  # (dim H, dim K)

    def apply(self, xi: np.ndarray) -> np.ndarray:
        return np.tensordot(np.asarray(xi), self.images, axes=(0, 0))


@dataclass(frozen=True)
class CovariantCPMap:
    """Module CP map intertwining a dynamical system with (u', u)."""

    base: ModuleCPMap
    system: hilbmod.ModuleDynamicalSystem
    u: hilbmod.UnitaryRep  # on H
    u_prime: hilbmod.UnitaryRep  # on K

    def __post_init__(self):
        dim_h, dim_k = self.base.space_dims
        if self.u.dim != dim_h or self.u_prime.dim != dim_k:
            raise ShapeMismatchError("covariance representations do not fit (H, K)")
        if self.system.module is not self.base.module and not np.array_equal(
            self.system.module.inner, self.base.module.inner
        ):
            raise ShapeMismatchError("system and map live on different modules")


class FullnessSystem(NamedTuple):
    flat: np.ndarray  # (m*m, N) rows spanning <X, X>
    rank: int
    condition: float


def _fullness_system(module: hilbmod.HilbertModule) -> FullnessSystem:
    flat = module.inner.reshape(module.dim * module.dim, module.algebra.dim)
    profile = nk.numerical_rank(flat, nk.REL_TOL)
    if profile.rank < module.algebra.dim:
        raise NotFullError(
            f"module is not full: rank {profile.rank} of {module.algebra.dim}"
        )
    positive = profile.singular_values[: profile.rank]
    return FullnessSystem(flat, profile.rank, float(positive[0] / positive[-1]))


def induced_algebra_cp(
    images: np.ndarray,
    module: hilbmod.HilbertModule,
    space_dim: int,
    tol: float = 1e-8,
) -> CPMapAlgebra:
    """Recover the companion CP map of module images via fullness.

    Solves ``phi(<x_i, x_j>) = Phi(x_i)* Phi(x_j)`` in the least-squares
    sense over the spanning inner products.  Raises ``NotFullError`` when the
    module is not full, ``InconsistentError`` when the system has no solution
    (the images do not come from a module CP map) and ``NotCpError`` when the
    solved companion fails the Choi test.
    """
    images = np.asarray(images, dtype=np.complex128)
    if images.ndim != 3 or images.shape[0] != module.dim or images.shape[2] != space_dim:
        raise ShapeMismatchError(f"images shape {images.shape}")
    system = _fullness_system(module)
    pair_grams = np.einsum("iba,jbc->ijac", np.conj(images), images)
    target = pair_grams.reshape(module.dim * module.dim, space_dim * space_dim)
    solution = nk.least_squares_solve(system.flat, target)  # (N, h*h)
    scale = max(1.0, nk.maxabs(target))
    residual = nk.maxabs(system.flat @ solution - target) / scale
    if residual > tol:
        raise InconsistentError(
            f"companion system inconsistent (residual {residual:.3e}); the images "
            "do not define a CP map on this module"
        )
    companion = CPMapAlgebra(
        module.algebra, space_dim, solution.reshape(module.algebra.dim, space_dim, space_dim)
    )
    choi = companion.choi()
    if not choi.cp:
        raise NotCpError(
            f"solved companion is not completely positive (Choi min eig {choi.min_eig:.3e})"
        )
    return companion


class ModuleCPReport(NamedTuple):
    identity_residual: float  # Phi(x)* Phi(y) = phi(<x,y>)
    companion_herm_residual: float
    choi_min_eig: float
    cp: bool

    @property
    def max_residual(self) -> float:
        return max(self.identity_residual, self.companion_herm_residual)


def check_module_cp(phi: ModuleCPMap, tol: float = nk.REL_TOL) -> ModuleCPReport:
    images = phi.images
    scale = max(1.0, nk.maxabs(images) ** 2)
    lhs = np.einsum("iba,jbc->ijac", np.conj(images), images)
    rhs = np.einsum("ijk,kac->ijac", phi.module.inner, phi.companion.images)
    residual = nk.maxabs(lhs - rhs) / scale
    choi = phi.companion.choi(tol)
    return ModuleCPReport(
        residual, phi.companion.hermiticity_residual(), choi.min_eig, choi.cp
    )


def cp_from_representation(
    rep: hilbmod.ModuleRepresentation,
    v: np.ndarray,
    w: np.ndarray,
    tol: float = 1e-10,
) -> ModuleCPMap:
    """Compress a module representation to a CP map: ``Phi(x) = W* pi(x) V``.

    ``V: H -> H'`` is arbitrary, ``W: K -> K'`` must be a coisometry onto the
    representation's codomain (``W W* = I``).  The companion is
    ``phi(a) = V* pi_A(a) V``.
    """
    v = nk.as_matrix(v)
    w = nk.as_matrix(w)
    dim_h_rep, dim_k_rep = rep.space_dims
    if v.shape[0] != dim_h_rep:
        raise ShapeMismatchError(f"V maps into C^{v.shape[0]}, representation has H' of dim {dim_h_rep}")
    if w.shape[0] != dim_k_rep:
        raise ShapeMismatchError(f"W maps into C^{w.shape[0]}, representation has K' of dim {dim_k_rep}")
    gram = w @ nk.adjoint(w)
    defect = nk.maxabs(gram - nk.eye(w.shape[0]))
    if defect > tol:
        raise NotCoisometryError(f"W W* deviates from the identity by {defect:.3e}")
    images = np.einsum("ab,iac,cd->ibd", np.conj(w), rep.images, v)
    companion_images = np.einsum("ab,kac,cd->kbd", np.conj(v), rep.companion.images, v)
    companion = CPMapAlgebra(rep.module.algebra, v.shape[1], companion_images)
    return ModuleCPMap(rep.module, images, companion)


class CovarianceReport(NamedTuple):
    map_residual: float  # Phi(eta_t x) = u'_t Phi(x) u_t*
    companion_residual: float  # phi(alpha_t a) = u_t phi(a) u_t*
    fullness_condition: float  # conditioning constant relating the two

    @property
    def max_residual(self) -> float:
        return max(self.map_residual, self.companion_residual)


def check_covariance(
    phi: ModuleCPMap,
    system: hilbmod.ModuleDynamicalSystem,
    u: hilbmod.UnitaryRep,
    u_prime: hilbmod.UnitaryRep,
    tol: float = nk.REL_TOL,
) -> CovarianceReport:
    """Covariance residuals of a module CP map and of its companion."""
    images = phi.images
    scale = max(1.0, nk.maxabs(images))
    transported = np.einsum("tqi,qbc->tibc", system.eta, images)
    conjugated = np.einsum("tab,ibc,tdc->tiad", u_prime.mats, images, np.conj(u.mats))
    map_residual = nk.maxabs(transported - conjugated) / scale

    comp = phi.companion.images
    comp_scale = max(1.0, nk.maxabs(comp))
    pushed = np.einsum("tlk,lbc->tkbc", system.alpha, comp)
    comp_conj = np.einsum("tab,kbc,tdc->tkad", u.mats, comp, np.conj(u.mats))
    companion_residual = nk.maxabs(pushed - comp_conj) / comp_scale

    try:
        condition = _fullness_system(phi.module).condition
    except NotFullError:
        condition = float("inf")
    return CovarianceReport(map_residual, companion_residual, condition)


def covariant_cp_from_representation(
    rep: hilbmod.ModuleRepresentation,
    rep_v: hilbmod.UnitaryRep,
    rep_w: hilbmod.UnitaryRep,
    v: np.ndarray,
    w: np.ndarray,
    u: hilbmod.UnitaryRep,
    u_prime: hilbmod.UnitaryRep,
    system: hilbmod.ModuleDynamicalSystem,
    tol: float = 1e-9,
) -> CovariantCPMap:
    """Compression of a covariant representation along intertwiners.

    Requires ``rep_v_t V = V u_t`` and ``rep_w_t W = W u'_t`` for every t;
    reports which relation fails at which group element otherwise.
    """
    v = nk.as_matrix(v)
    w = nk.as_matrix(w)
    for t in range(system.group.order):
        left = rep_v.mats[t] @ v - v @ u.mats[t]
        if nk.maxabs(left) > tol * max(1.0, nk.maxabs(v)):
            raise NotIntertwiningError(
                f"v_t V = V u_t fails at t={t} by {nk.maxabs(left):.3e}"
            )
        right = rep_w.mats[t] @ w - w @ u_prime.mats[t]
        if nk.maxabs(right) > tol * max(1.0, nk.maxabs(w)):
            raise NotIntertwiningError(
                f"w_t W = W u'_t fails at t={t} by {nk.maxabs(right):.3e}"
            )
    base = cp_from_representation(rep, v, w)
    return CovariantCPMap(base, system, u, u_prime)


def average_intertwiner(
    reps_left: hilbmod.UnitaryRep, reps_right: hilbmod.UnitaryRep, z: np.ndarray
) -> np.ndarray:
    """Group average ``(1/|G|) sum_t left_t Z right_t*``, an exact intertwiner."""
    z = nk.as_matrix(z)
    total = np.zeros((reps_left.dim, reps_right.dim), dtype=np.complex128)
    for t in range(reps_left.group.order):
        total += reps_left.mats[t] @ z @ nk.adjoint(reps_right.mats[t])
    return total / reps_left.group.order


def polar_coisometry(y: np.ndarray, min_eig: float = 1e-6) -> np.ndarray:
    """Turn a full-row-rank map into a coisometry, ``(Y Y*)^{-1/2} Y``.

    The correction preserves any intertwining relations of ``Y`` because
    ``Y Y*`` commutes with the left representation.  Raises
    ``DegenerateAverageError`` when ``Y Y*`` is singular beyond the cutoff.
    """
    y = nk.as_matrix(y)
    gram = y @ nk.adjoint(y)
    values = np.linalg.eigvalsh((gram + nk.adjoint(gram)) / 2.0)
    if values.size == 0:
        return y
    if float(values[0]) < min_eig:
        raise DegenerateAverageError(
            f"averaged map has Gram min eigenvalue {float(values[0]):.3e} < {min_eig:.1e}"
        )
    return nk.inv_sqrt_psd(gram) @ y


@dataclass(frozen=True)
class CovariantWitness:
    """The representation and intertwiners behind a generated covariant map."""

    rep: hilbmod.ModuleRepresentation
    v: hilbmod.UnitaryRep
    w: hilbmod.UnitaryRep
    V: np.ndarray
    W: np.ndarray


def amplified_concrete_representation(
    p: int, n: int, amplification: int
) -> hilbmod.ModuleRepresentation:
    """Concrete standard-module representation tensored with C^amplification."""
    module = hilbmod.standard_module(p, n)
    ident = nk.eye(amplification)
    images = np.stack(
        [np.kron(b, ident) for b in hilbmod.standard_basis_matrices(p, n)]
    )
    algebra = module.algebra
    companion_images = np.stack(
        [
            np.kron(
                cstar.coords_to_blocks(algebra, np.eye(algebra.dim)[k])[0], ident
            )
            for k in range(algebra.dim)
        ]
    )
    companion = cstar.AlgebraRepresentation(algebra, n * amplification, companion_images)
    return hilbmod.ModuleRepresentation(module, companion, images)


def random_covariant_cp(
    system: hilbmod.ModuleDynamicalSystem,
    amplification: int,
    seed: int,
    u: hilbmod.UnitaryRep | None = None,
    u_prime: hilbmod.UnitaryRep | None = None,
) -> tuple[CovariantCPMap, CovariantWitness]:
    """Seeded covariant CP map on a standard-action system.

    Amplifies the concrete representation by ``C^m`` (m = amplification),
    equips it with ``v = delta (x) sigma`` and ``w = gamma (x) sigma`` for a
    seeded representation ``sigma``, picks target representations ``u`` on H
    and ``u'`` on K (defaults: ``u = delta``; ``u'`` a conjugated copy of
    ``w`` padded by a small seeded summand), and compresses along
    group-averaged intertwiners.  All randomness is drawn from per-purpose
    streams spawned off the seed, so results do not depend on call order.
    """
    if system.gamma is None or system.delta is None:
        raise ShapeMismatchError(
            "random covariant maps need a system built by standard_action"
        )
    group = system.group
    gamma, delta = system.gamma, system.delta
    p, n = gamma.dim, delta.dim
    streams = [
        np.random.Generator(np.random.Philox(child))
        for child in np.random.SeedSequence(seed).spawn(5)
    ]
    sigma = hilbmod.seeded_rep(group, amplification, streams[0])
    rep = amplified_concrete_representation(p, n, amplification)
    rep_v = hilbmod.tensor_rep(delta, sigma)
    rep_w = hilbmod.tensor_rep(gamma, sigma)

    if u is None:
        u = delta
    if u_prime is None:
        pad = int(streams[1].integers(0, 3))
        padded = rep_w if pad == 0 else hilbmod.direct_sum_rep(
            rep_w, hilbmod.seeded_rep(group, pad, streams[1])
        )
        u_prime = hilbmod.conjugate_rep(
            padded, nk.haar_unitary(streams[1], padded.dim)
        )

    z = nk.complex_normal(streams[2], rep_v.dim, u.dim)
    big_v = average_intertwiner(rep_v, u, z)
    z_prime = nk.complex_normal(streams[3], rep_w.dim, u_prime.dim)
    big_w = polar_coisometry(average_intertwiner(rep_w, u_prime, z_prime))

    cov = covariant_cp_from_representation(
        rep, rep_v, rep_w, big_v, big_w, u, u_prime, system
    )
    return cov, CovariantWitness(rep, rep_v, rep_w, big_v, big_w)


def random_module_cp(
    p: int,
    n: int,
    amplification: int,
    seed: int,
    h_dim: int | None = None,
    k_dim: int | None = None,
) -> tuple[ModuleCPMap, CovariantWitness]:
    """Seeded plain module CP map: the trivial-group covariant generator.

    ``h_dim``/``k_dim`` override the domain spaces (``k_dim`` must be at
    least ``p * amplification`` for the compressing coisometry to exist).
    """
    group = hilbmod.trivial_group()
    system = hilbmod.standard_action(
        group, hilbmod.trivial_rep(group, p), hilbmod.trivial_rep(group, n)
    )
    u = hilbmod.trivial_rep(group, h_dim) if h_dim is not None else None
    u_prime = hilbmod.trivial_rep(group, k_dim) if k_dim is not None else None
    cov, witness = random_covariant_cp(system, amplification, seed, u=u, u_prime=u_prime)
    return cov.base, witness

"""Finite-dimensional Hilbert C*-modules, finite groups and dynamical systems.

A module ``X`` over a block algebra ``A`` is stored by structure tensors on a
chosen basis: ``action[i, k, :]`` are the X-coordinates of ``x_i . E_k`` and
``inner[i, j, :]`` the A-coordinates of ``<x_i, x_j>`` (conjugate-linear in
the first slot).  Groups come as explicit multiplication tables; actions on
modules are invertible matrices per group element together with the induced
*-automorphisms of the coefficient algebra.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import cstar
from . import numkernel as nk
from .errors import (
    GroupMismatchError,
    InconsistentError,
    NotFullError,
    ParseError,
    ShapeMismatchError,
)


@dataclass(frozen=True)
class HilbertModule:
    algebra: cstar.CStarAlgebra
    dim: int  # complex dimension m of X
    action: np.ndarray  # (m, N, m): coordinates of x_i . E_k
    inner: np.ndarray  # (m, m, N): coordinates of <x_i, x_j>

    def __post_init__(self):
        m, n_dim = self.dim, self.algebra.dim
        action = np.asarray(self.action, dtype=np.complex128)
        inner = np.asarray(self.inner, dtype=np.complex128)
        if action.shape != (m, n_dim, m):
            raise ShapeMismatchError(f"action tensor shape {action.shape}")
        if inner.shape != (m, m, n_dim):
            raise ShapeMismatchError(f"inner tensor shape {inner.shape}")
        object.__setattr__(self, "action", action)
        object.__setattr__(self, "inner", inner)

    def inner_coords(self, xi: np.ndarray, zeta: np.ndarray) -> np.ndarray:
        """A-coordinates of the inner product of two X-coordinate vectors."""
        return np.einsum("i,j,ijk->k", np.conj(xi), zeta, self.inner)

    def act(self, xi: np.ndarray, a_coords: np.ndarray) -> np.ndarray:
        return np.einsum("i,k,ikq->q", xi, a_coords, self.action)


def standard_module(p: int, n: int) -> HilbertModule:
    """The p x n complex matrices over M_n, with ``<x, y> = x* y``.

    Basis of X: matrix units in row-major order.  This module is always full:
    the inner products of basis vectors already run through all matrix units
    of the coefficient algebra.
    """
    if p < 1 or n < 1:
        raise ShapeMismatchError(f"standard module needs p, n >= 1, got ({p},{n})")
    algebra = cstar.CStarAlgebra((n,))
    m = p * n
    action = np.zeros((m, n * n, m), dtype=np.complex128)
    inner = np.zeros((m, m, n * n), dtype=np.complex128)
    for q in range(p):
        for i in range(n):
            row = q * n + i
            for b in range(n):
                # f_{q,i} . E_{i,b} = f_{q,b}
                action[row, i * n + b, q * n + b] = 1.0
            for j in range(n):
                # <f_{q,i}, f_{q,j}> = E_{i,j}
                inner[row, q * n + j, i * n + j] = 1.0
    return HilbertModule(algebra, m, action, inner)


def standard_basis_matrices(p: int, n: int) -> np.ndarray:
    """The p x n matrix units in the basis order used by ``standard_module``."""
    out = np.zeros((p * n, p, n), dtype=np.complex128)
    for q in range(p):
        for i in range(n):
            out[q * n + i, q, i] = 1.0
    return out


class ModuleAxiomReport(NamedTuple):
    linearity_residual: float  # <x, y.a> = <x,y> a
    symmetry_residual: float  # <x,y>* = <y,x>
    positivity_min_eig: float  # Gram super-matrix in M_m(A), embedded
    positive: bool
    definite: bool  # <x,x> = 0 only for x = 0
    fullness_rank: int
    fullness_required: int

    @property
    def full(self) -> bool:
        return self.fullness_rank == self.fullness_required

    @property
    def max_residual(self) -> float:
        return max(self.linearity_residual, self.symmetry_residual)


def check_module_axioms(
    module: HilbertModule, tol: float = nk.REL_TOL
) -> ModuleAxiomReport:
    """Residuals for the Hilbert-module axioms plus fullness of the span."""
    algebra = module.algebra
    mul = cstar.mult_tensor(algebra)
    inner, action = module.inner, module.action
    scale = max(1.0, nk.maxabs(inner))

    # <x_i, x_j . E_k> versus <x_i, x_j> E_k
    lhs = np.einsum("jkq,iqm->ijkm", action, inner)
    rhs = np.einsum("ijl,lkm->ijkm", inner, mul)
    linearity = nk.maxabs(lhs - rhs) / scale

    star_inner = np.stack(
        [
            np.stack([cstar.star_coords(algebra, inner[i, j]) for j in range(module.dim)])
            for i in range(module.dim)
        ]
    )
    symmetry = nk.maxabs(star_inner - np.transpose(inner, (1, 0, 2))) / scale

    embed = np.stack(
        [
            cstar.embed_coords(algebra, np.eye(algebra.dim, dtype=np.complex128)[k])
            for k in range(algebra.dim)
        ]
    )
    gram_super = np.einsum("ijk,kab->iajb", inner, embed)
    big = gram_super.reshape(
        module.dim * algebra.embed_dim, module.dim * algebra.embed_dim
    )
    psd = nk.psd_check(big, tol)

    # <x,x> = 0 iff the trace of its embedding vanishes, so definiteness is
    # positive-definiteness of the trace Gram.
    trace_gram = inner @ cstar.trace_coords(algebra)
    trace_rank = nk.psd_rank(trace_gram, tol)

    flat = inner.reshape(module.dim * module.dim, algebra.dim)
    full_rank = nk.numerical_rank(flat, tol).rank

    return ModuleAxiomReport(
        linearity,
        symmetry,
        psd.min_eig,
        psd.ok,
        trace_rank.rank == module.dim,
        full_rank,
        algebra.dim,
    )


@dataclass(frozen=True)
class ModuleRepresentation:
    """Map X -> L(H, K) with a companion *-representation of A on H."""

    module: HilbertModule
    companion: cstar.AlgebraRepresentation
    images: np.ndarray  # (m, dim K, dim H)

    def __post_init__(self):
        images = np.asarray(self.images, dtype=np.complex128)
        if images.ndim != 3 or images.shape[0] != self.module.dim:
            raise ShapeMismatchError(f"module images shape {images.shape}")
        if images.shape[2] != self.companion.space_dim:
            raise ShapeMismatchError(
                f"images act on H of dim {images.shape[2]}, companion on "
                f"{self.companion.space_dim}"
            )
        object.__setattr__(self, "images", images)

    @property
    def space_dims(self) -> tuple[int, int]:
        return self.images.shape[2], self.images.shape[1]  # (dim H, dim K)

    def apply(self, xi: np.ndarray) -> np.ndarray:
        return np.tensordot(np.asarray(xi), self.images, axes=(0, 0))


def concrete_representation(p: int, n: int) -> ModuleRepresentation:
    """The defining representation of the standard module: x acts as itself."""
    module = standard_module(p, n)
    algebra = module.algebra
    companion_images = np.stack(
        [
            cstar.coords_to_blocks(algebra, np.eye(algebra.dim, dtype=np.complex128)[k])[0]
            for k in range(algebra.dim)
        ]
    )
    companion = cstar.AlgebraRepresentation(algebra, n, companion_images)
    return ModuleRepresentation(module, companion, standard_basis_matrices(p, n))


class ModuleRepresentationReport(NamedTuple):
    identity_residual: float  # pi(x)* pi(y) = pi_A(<x,y>)
    range_rank: int  # rank of [pi(X) H]
    range_required: int  # dim K
    corange_rank: int  # rank of [pi(X)* K]
    corange_required: int  # dim H

    @property
    def nondegenerate(self) -> bool:
        return (
            self.range_rank == self.range_required
            and self.corange_rank == self.corange_required
        )


def check_module_representation(
    rep: ModuleRepresentation, tol: float = nk.REL_TOL
) -> ModuleRepresentationReport:
    images = rep.images
    dim_h, dim_k = rep.space_dims
    scale = max(1.0, nk.maxabs(images))
    lhs = np.einsum("iba,jbc->ijac", np.conj(images), images)
    rhs = np.einsum("ijk,kac->ijac", rep.module.inner, rep.companion.images)
    residual = nk.maxabs(lhs - rhs) / max(1.0, scale * scale)
    stacked = images.transpose(1, 0, 2).reshape(dim_k, -1)
    costacked = np.conj(images.transpose(2, 0, 1)).reshape(dim_h, -1)
    return ModuleRepresentationReport(
        residual,
        nk.numerical_rank(stacked, tol).rank,
        dim_k,
        nk.numerical_rank(costacked, tol).rank,
        dim_h,
    )


# ---------------------------------------------------------------------------
# Finite groups and unitary representations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteGroup:
    """Group given by an explicit multiplication table over indices 0..g-1."""

    order: int
    mult: np.ndarray  # (g, g) index table
    identity: int
    inv: np.ndarray  # (g,) inverse indices

    def __post_init__(self):
        mult = np.asarray(self.mult, dtype=np.int64)
        inv = np.asarray(self.inv, dtype=np.int64)
        g = self.order
        if mult.shape != (g, g) or inv.shape != (g,):
            raise ShapeMismatchError("group table shapes inconsistent with order")
        object.__setattr__(self, "mult", mult)
        object.__setattr__(self, "inv", inv)
        e = self.identity
        if not (np.all(mult[e] == np.arange(g)) and np.all(mult[:, e] == np.arange(g))):
            raise ShapeMismatchError("identity element does not act as identity")
        if not all(mult[t, inv[t]] == e and mult[inv[t], t] == e for t in range(g)):
            raise ShapeMismatchError("inverse table is wrong")
        for s, t, r in itertools.product(range(g), repeat=3):
            if mult[mult[s, t], r] != mult[s, mult[t, r]]:
                raise ShapeMismatchError(f"multiplication not associative at {(s, t, r)}")

    def same_as(self, other: "FiniteGroup") -> bool:
        return (
            self.order == other.order
            and self.identity == other.identity
            and np.array_equal(self.mult, other.mult)
        )


def cyclic_group(n: int) -> FiniteGroup:
    idx = np.arange(n)
    return FiniteGroup(n, (idx[:, None] + idx[None, :]) % n, 0, (-idx) % n)


def trivial_group() -> FiniteGroup:
    return cyclic_group(1)


def _permutations(n: int) -> list[tuple[int, ...]]:
    return list(itertools.permutations(range(n)))


def symmetric_group(n: int) -> FiniteGroup:
    """S_n with elements in lexicographic permutation order (identity first)."""
    perms = _permutations(n)
    index = {p: i for i, p in enumerate(perms)}
    g = len(perms)
    mult = np.zeros((g, g), dtype=np.int64)
    inv = np.zeros(g, dtype=np.int64)
    for a, pa in enumerate(perms):
        for b, pb in enumerate(perms):
            mult[a, b] = index[tuple(pa[pb[x]] for x in range(n))]
        inverse = [0] * n
        for x in range(n):
            inverse[pa[x]] = x
        inv[a] = index[tuple(inverse)]
    return FiniteGroup(g, mult, index[tuple(range(n))], inv)


@dataclass(frozen=True)
class UnitaryRep:
    group: FiniteGroup
    dim: int
    mats: np.ndarray  # (g, dim, dim)

    def __post_init__(self):
        mats = np.asarray(self.mats, dtype=np.complex128)
        if mats.shape != (self.group.order, self.dim, self.dim):
            raise ShapeMismatchError(f"representation matrices shape {mats.shape}")
        object.__setattr__(self, "mats", mats)


class UnitaryRepReport(NamedTuple):
    hom_residual: float  # u_s u_t = u_{st}
    unit_residual: float  # u_e = I
    unitary_residual: float  # u_t* u_t = I


def check_unitary_rep(rep: UnitaryRep, tol: float = nk.REL_TOL) -> UnitaryRepReport:
    g = rep.group
    mats = rep.mats
    hom = max(
        nk.maxabs(mats[s] @ mats[t] - mats[g.mult[s, t]])
        for s in range(g.order)
        for t in range(g.order)
    )
    unit = nk.maxabs(mats[g.identity] - nk.eye(rep.dim))
    unitary = max(
        nk.maxabs(nk.adjoint(mats[t]) @ mats[t] - nk.eye(rep.dim))
        for t in range(g.order)
    )
    return UnitaryRepReport(hom, unit, unitary)


def trivial_rep(group: FiniteGroup, dim: int = 1) -> UnitaryRep:
    return UnitaryRep(group, dim, np.stack([nk.eye(dim)] * group.order))


def regular_rep(group: FiniteGroup) -> UnitaryRep:
    g = group.order
    mats = np.zeros((g, g, g), dtype=np.complex128)
    for t in range(g):
        for s in range(g):
            mats[t, group.mult[t, s], s] = 1.0
    return UnitaryRep(group, g, mats)


def cyclic_character_rep(group: FiniteGroup, k: int) -> UnitaryRep:
    """One-dimensional character t -> exp(2 pi i k t / n) of a cyclic group."""
    n = group.order
    omega = np.exp(2j * np.pi * k / n)
    mats = np.array([[[omega**t]] for t in range(n)], dtype=np.complex128)
    return UnitaryRep(group, 1, mats)


def permutation_rep(n: int) -> UnitaryRep:
    """The natural n-dimensional permutation representation of S_n."""
    group = symmetric_group(n)
    perms = _permutations(n)
    mats = np.zeros((group.order, n, n), dtype=np.complex128)
    for a, pa in enumerate(perms):
        for x in range(n):
            mats[a, pa[x], x] = 1.0
    return UnitaryRep(group, n, mats)


def direct_sum_rep(first: UnitaryRep, second: UnitaryRep) -> UnitaryRep:
    if not first.group.same_as(second.group):
        raise GroupMismatchError("direct sum needs representations of one group")
    g, d1, d2 = first.group.order, first.dim, second.dim
    mats = np.zeros((g, d1 + d2, d1 + d2), dtype=np.complex128)
    mats[:, :d1, :d1] = first.mats
    mats[:, d1:, d1:] = second.mats
    return UnitaryRep(first.group, d1 + d2, mats)


def tensor_rep(first: UnitaryRep, second: UnitaryRep) -> UnitaryRep:
    if not first.group.same_as(second.group):
        raise GroupMismatchError("tensor product needs representations of one group")
    mats = np.stack(
        [np.kron(a, b) for a, b in zip(first.mats, second.mats)]
    )
    return UnitaryRep(first.group, first.dim * second.dim, mats)


def conjugate_rep(rep: UnitaryRep, q: np.ndarray) -> UnitaryRep:
    q = nk.as_matrix(q)
    mats = np.stack([q @ m @ nk.adjoint(q) for m in rep.mats])
    return UnitaryRep(rep.group, rep.dim, mats)


def cyclic_subgroup(group: FiniteGroup, t: int) -> list[int]:
    """Elements of the subgroup generated by ``t``, in power order."""
    elements = [group.identity]
    current = t
    while current != group.identity:
        elements.append(current)
        current = group.mult[current, t]
    return elements


def coset_permutation_rep(group: FiniteGroup, t: int) -> UnitaryRep:
    """Permutation representation on the left cosets of the subgroup <t>.

    Gives nontrivial content at dimension |G| / ord(t); the regular
    representation is the ``t = identity`` case.
    """
    subgroup = set(cyclic_subgroup(group, t))
    coset_of = {}
    cosets = 0
    for s in range(group.order):
        members = frozenset(int(group.mult[s, h]) for h in subgroup)
        key = min(members)
        if key not in coset_of:
            coset_of[key] = cosets
            cosets += 1
        for member in members:
            coset_of.setdefault(member, coset_of[key])
    mats = np.zeros((group.order, cosets, cosets), dtype=np.complex128)
    for g in range(group.order):
        for s in range(group.order):
            mats[g, coset_of[int(group.mult[g, s])], coset_of[s]] = 1.0
    return UnitaryRep(group, cosets, mats)


def seeded_rep(group: FiniteGroup, dim: int, rng: np.random.Generator) -> UnitaryRep:
    """A generic unitary representation on C^dim.

    Greedy seeded direct sum of coset permutation representations (the
    regular representation included), padded with trivial summands where
    nothing smaller fits, then conjugated by a Haar-random unitary so the
    invariant subspaces sit in generic position.
    """
    candidates = {}
    for t in range(group.order):
        block = coset_permutation_rep(group, t)
        candidates.setdefault(block.dim, block)
    sizes = sorted(candidates)
    rep = None
    remaining = dim
    while remaining:
        fitting = [s for s in sizes if s <= remaining]
        if fitting:
            block = candidates[fitting[int(rng.integers(0, len(fitting)))]]
        else:
            block = trivial_rep(group, remaining)
        rep = block if rep is None else direct_sum_rep(rep, block)
        remaining -= block.dim
    return conjugate_rep(rep, nk.haar_unitary(rng, dim))


# ---------------------------------------------------------------------------
# Dynamical systems on modules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModuleDynamicalSystem:
    """Finite-group action on a module with the induced action on the algebra."""

    group: FiniteGroup
    module: HilbertModule
    eta: np.ndarray  # (g, m, m): action on X coordinates
    alpha: np.ndarray  # (g, N, N): induced automorphisms on A coordinates
    gamma: UnitaryRep | None = None  # retained by standard_action
    delta: UnitaryRep | None = None

    def __post_init__(self):
        eta = np.asarray(self.eta, dtype=np.complex128)
        alpha = np.asarray(self.alpha, dtype=np.complex128)
        g, m, n_dim = self.group.order, self.module.dim, self.module.algebra.dim
        if eta.shape != (g, m, m):
            raise ShapeMismatchError(f"eta tensor shape {eta.shape}")
        if alpha.shape != (g, n_dim, n_dim):
            raise ShapeMismatchError(f"alpha tensor shape {alpha.shape}")
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "alpha", alpha)


def standard_action(
    group: FiniteGroup, gamma: UnitaryRep, delta: UnitaryRep
) -> ModuleDynamicalSystem:
    """Action ``x -> gamma_t x delta_t*`` on the standard p x n module.

    The induced algebra action is ``a -> delta_t a delta_t*``.
    """
    if not (group.same_as(gamma.group) and group.same_as(delta.group)):
        raise GroupMismatchError("gamma and delta must represent the given group")
    p, n = gamma.dim, delta.dim
    module = standard_module(p, n)
    # row-major vec: vec(g x d*) = (g (x) conj(d)) vec(x)
    eta = np.stack(
        [np.kron(gamma.mats[t], np.conj(delta.mats[t])) for t in range(group.order)]
    )
    alpha = np.stack(
        [np.kron(delta.mats[t], np.conj(delta.mats[t])) for t in range(group.order)]
    )
    return ModuleDynamicalSystem(group, module, eta, alpha, gamma, delta)


class DynamicalSystemReport(NamedTuple):
    group_law_residual: float  # eta_s eta_t = eta_{st}, eta_e = id
    equivariance_residual: float  # <eta x, eta y> = alpha(<x,y>)
    compatibility_residual: float  # eta(x.a) = eta(x).alpha(a)
    automorphism_mult_residual: float
    automorphism_star_residual: float
    invertible: bool

    @property
    def max_residual(self) -> float:
        return max(
            self.group_law_residual,
            self.equivariance_residual,
            self.compatibility_residual,
            self.automorphism_mult_residual,
            self.automorphism_star_residual,
        )


def check_dynamical_system(
    sys: ModuleDynamicalSystem, tol: float = nk.REL_TOL
) -> DynamicalSystemReport:
    group, module = sys.group, sys.module
    eta, alpha = sys.eta, sys.alpha
    algebra = module.algebra
    mul = cstar.mult_tensor(algebra)
    g = group.order

    law = nk.maxabs(eta[group.identity] - nk.eye(module.dim))
    for s in range(g):
        for t in range(g):
            law = max(law, nk.maxabs(eta[s] @ eta[t] - eta[group.mult[s, t]]))
    alpha_law = nk.maxabs(alpha[group.identity] - nk.eye(algebra.dim))
    for s in range(g):
        for t in range(g):
            alpha_law = max(
                alpha_law,
                nk.maxabs(alpha[s] @ alpha[t] - alpha[group.mult[s, t]]),
            )
    law = max(law, alpha_law)

    # <eta_t x_i, eta_t x_j> versus alpha_t(<x_i, x_j>)
    transported = np.einsum("tai,tbj,abk->tijk", np.conj(eta), eta, module.inner)
    pushed = np.einsum("tkl,ijl->tijk", alpha, module.inner)
    equivariance = nk.maxabs(transported - pushed)

    # eta_t(x_i . E_k) versus eta_t(x_i) . alpha_t(E_k)
    lhs = np.einsum("tqr,ikr->tikq", eta, module.action)
    rhs = np.einsum("tai,tlk,alq->tikq", eta, alpha, module.action)
    compatibility = nk.maxabs(lhs - rhs)

    prod_of_images = np.einsum("tpk,tql,pqm->tklm", alpha, alpha, mul)
    image_of_prod = np.einsum("klp,tmp->tklm", mul, alpha)
    auto_mult = nk.maxabs(prod_of_images - image_of_prod)

    star_then_alpha = np.stack(
        [
            np.stack(
                [
                    alpha[t] @ cstar.star_coords(algebra, np.eye(algebra.dim)[k])
                    for k in range(algebra.dim)
                ]
            )
            for t in range(g)
        ]
    )
    alpha_then_star = np.stack(
        [
            np.stack(
                [cstar.star_coords(algebra, alpha[t, :, k]) for k in range(algebra.dim)]
            )
            for t in range(g)
        ]
    )
    auto_star = nk.maxabs(star_then_alpha - alpha_then_star)

    invertible = all(
        np.linalg.matrix_rank(eta[t]) == module.dim
        and np.linalg.matrix_rank(alpha[t]) == algebra.dim
        for t in range(g)
    )
    return DynamicalSystemReport(
        law, equivariance, compatibility, auto_mult, auto_star, bool(invertible)
    )


class InducedAction(NamedTuple):
    alpha: np.ndarray  # (g, N, N)
    consistency_residual: float
    fullness_condition: float  # conditioning of the spanning system


def induced_algebra_action(
    group: FiniteGroup,
    module: HilbertModule,
    eta: np.ndarray,
    tol: float = 1e-8,
) -> InducedAction:
    """Solve the induced algebra action from ``alpha(<x,y>) = <eta x, eta y>``.

    Requires the module to be full; the values on the spanning inner products
    determine each automorphism linearly.  Raises ``NotFullError`` when the
    span is deficient and ``InconsistentError`` when the group law of ``eta``
    fails, the linear system is inconsistent, or the solved maps are not
    *-automorphisms: any of those means ``eta`` is not a module action.
    """
    eta = np.asarray(eta, dtype=np.complex128)
    g, m = group.order, module.dim
    algebra = module.algebra

    law = nk.maxabs(eta[group.identity] - nk.eye(m)) if m else 0.0
    for s in range(g):
        for t in range(g):
            law = max(law, nk.maxabs(eta[s] @ eta[t] - eta[group.mult[s, t]]))
    if law > tol:
        raise InconsistentError(f"eta violates the group law by {law:.3e}")

    flat = module.inner.reshape(m * m, algebra.dim)  # rows span <X, X>
    profile = nk.numerical_rank(flat, nk.REL_TOL)
    if profile.rank < algebra.dim:
        raise NotFullError(
            f"module is not full: inner products span rank {profile.rank} "
            f"of {algebra.dim}"
        )
    positive = profile.singular_values[profile.singular_values > 0]
    condition = float(positive[0] / positive[profile.rank - 1])

    transported = np.einsum("tai,tbj,abk->tijk", np.conj(eta), eta, module.inner)
    alphas = []
    residual = 0.0
    for t in range(g):
        target = transported[t].reshape(m * m, algebra.dim)
        solution = nk.least_squares_solve(flat, target)  # alpha_t^T
        alphas.append(solution.T)
        residual = max(residual, nk.maxabs(flat @ solution - target))
    if residual > tol:
        raise InconsistentError(
            f"defining system for the induced action is inconsistent: {residual:.3e}"
        )
    alpha = np.stack(alphas)
    candidate = ModuleDynamicalSystem(group, module, eta, alpha)
    report = check_dynamical_system(candidate)
    auto = max(report.automorphism_mult_residual, report.automorphism_star_residual)
    if auto > tol or not report.invertible:
        raise InconsistentError(
            f"solved maps are not *-automorphisms (residual {auto:.3e})"
        )
    return InducedAction(alpha, residual, condition)


# ---------------------------------------------------------------------------
# JSON payloads
# ---------------------------------------------------------------------------


def _tensor_to_json(tensor: np.ndarray) -> dict:
    flat = tensor.reshape(-1)
    return {
        "shape": list(tensor.shape),
        "entries": [[float(z.real), float(z.imag)] for z in flat],
    }


def _tensor_from_json(obj, expected_rank: int) -> np.ndarray:
    if not isinstance(obj, dict) or set(obj) != {"shape", "entries"}:
        raise ParseError("tensor payload must have shape and entries")
    shape = tuple(int(v) for v in obj["shape"])
    if len(shape) != expected_rank:
        raise ParseError(f"tensor payload has rank {len(shape)}, expected {expected_rank}")
    entries = obj["entries"]
    size = int(np.prod(shape)) if shape else 0
    if len(entries) != size:
        raise ParseError(f"tensor payload: {len(entries)} entries for shape {shape}")
    flat = np.array([complex(re, im) for re, im in entries], dtype=np.complex128)
    return flat.reshape(shape)


def module_to_json(module: HilbertModule) -> dict:
    return {
        "algebra": cstar.algebra_to_json(module.algebra),
        "dim": module.dim,
        "action": _tensor_to_json(module.action),
        "inner": _tensor_to_json(module.inner),
    }


def module_from_json(obj) -> HilbertModule:
    if not isinstance(obj, dict):
        raise ParseError("module payload must be an object")
    if set(obj) == {"standard_module"}:
        p, n = obj["standard_module"]
        return standard_module(int(p), int(n))
    required = {"algebra", "dim", "action", "inner"}
    missing = required - set(obj)
    if missing:
        raise ParseError(f"module payload: missing field '{sorted(missing)[0]}'")
    extra = set(obj) - required
    if extra:
        raise ParseError(f"module payload: unknown field '{sorted(extra)[0]}'")
    algebra = cstar.algebra_from_json(obj["algebra"])
    return HilbertModule(
        algebra,
        int(obj["dim"]),
        _tensor_from_json(obj["action"], 3),
        _tensor_from_json(obj["inner"], 3),
    )


def group_to_json(group: FiniteGroup) -> dict:
    return {
        "order": group.order,
        "mult": group.mult.tolist(),
        "inv": group.inv.tolist(),
        "e": group.identity,
    }


def group_from_json(obj) -> FiniteGroup:
    if not isinstance(obj, dict):
        raise ParseError("group payload must be an object")
    if set(obj) == {"cyclic"}:
        return cyclic_group(int(obj["cyclic"]))
    if set(obj) == {"symmetric"}:
        return symmetric_group(int(obj["symmetric"]))
    required = {"order", "mult", "inv", "e"}
    missing = required - set(obj)
    if missing:
        raise ParseError(f"group payload: missing field '{sorted(missing)[0]}'")
    extra = set(obj) - required
    if extra:
        raise ParseError(f"group payload: unknown field '{sorted(extra)[0]}'")
    return FiniteGroup(
        int(obj["order"]),
        np.asarray(obj["mult"], dtype=np.int64),
        int(obj["e"]),
        np.asarray(obj["inv"], dtype=np.int64),
    )


def unitary_rep_to_json(rep: UnitaryRep) -> dict:
    return {
        "space_dim": rep.dim,
        "mats": [nk.mat_to_json(m) for m in rep.mats],
    }


def unitary_rep_from_json(group: FiniteGroup, obj) -> UnitaryRep:
    if not isinstance(obj, dict) or set(obj) != {"space_dim", "mats"}:
        raise ParseError("unitary representation payload must have space_dim and mats")
    mats = [nk.mat_from_json(m) for m in obj["mats"]]
    if len(mats) != group.order:
        raise ParseError(
            f"unitary representation payload: {len(mats)} matrices for group of "
            f"order {group.order}"
        )
    return UnitaryRep(group, int(obj["space_dim"]), np.stack(mats))

"""Minimal dilations of CP maps on modules, plain and group-covariant.

The construction follows the finite-dimensional GNS recipe: put the
semi-inner product ``<a (x) h, b (x) k> = <h, phi(a* b) k>`` on ``A (x) H``,
factor its Gram through ``gram_factor`` (the quotient by null vectors), and
realize every descended map as ``F (raw map) L`` with an explicit
kernel-annihilation residual.  The codomain space of the module dilation is
the span of ``Phi(X) H`` inside ``K``, carried in orthonormal coordinates by
a coisometry with orthonormal rows.

All verification is numerical: certificates list named residuals, the rank
decisions and the eigenvalue profiles behind them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import cstar, hilbmod
from . import numkernel as nk
from .cpmaps import CovariantCPMap, CPMapAlgebra, ModuleCPMap, check_covariance, check_module_cp
from .errors import (
    InvarianceLeakError,
    NotCoisometryError,
    NotCovariantError,
    NotCpError,
    NotFullError,
    NotMinimalError,
    NotUnitaryError,
    QuotientLeakError,
    ShapeMismatchError,
)


@dataclass(frozen=True)
class GnsTriple:
    """Minimal dilation data of a CP map on the algebra.

    ``rep`` acts on the quotient of ``A (x) H`` by the Gram kernel; ``F`` and
    ``L`` are retained so that further maps defined on the raw space can be
    descended the same way.
    """

    cp_map: CPMapAlgebra
    dim: int  # rank of the GNS Gram
    rep: cstar.AlgebraRepresentation
    V: np.ndarray  # (dim, dim H)
    F: np.ndarray  # quotient coordinates map, (dim, N * dim H)
    L: np.ndarray  # lift, (N * dim H, dim)
    gram_eigenvalues: np.ndarray
    reconstruction_residual: float
    minimality_rank: int


def _raw_left_mult(algebra: cstar.CStarAlgebra, space_dim: int) -> np.ndarray:
    """Left multiplication by each basis unit on ``A (x) H`` coordinates."""
    mul = cstar.mult_tensor(algebra)
    ident = nk.eye(space_dim)
    return np.stack(
        [np.kron(mul[k].T, ident) for k in range(algebra.dim)]
    )  # mul[k].T maps coords of b to coords of E_k b


def gns_construct(
    phi: CPMapAlgebra,
    rel_tol: float = nk.REL_TOL,
    leak_tol: float = 1e-9,
) -> GnsTriple:
    """GNS/Stinespring data for a CP map ``phi: A -> L(H)``.

    Raises ``NotCpError`` when the Choi test fails and ``QuotientLeakError``
    when left multiplication does not descend to the quotient, which signals
    an inconsistent input.
    """
    choi = phi.choi()
    if not choi.cp:
        raise NotCpError(
            f"input map is not completely positive (Choi min eig {choi.min_eig:.3e})"
        )
    algebra = phi.algebra
    n_dim, h = algebra.dim, phi.space_dim
    mul = cstar.mult_tensor(algebra)
    star_perm = cstar.star_permutation(algebra)
    # Gram[(k,i),(l,j)] = phi(E_k* E_l)[i, j]
    star_products = mul[star_perm]  # (N, N, N): coords of E_k* E_l
    phi_products = np.einsum("klm,mij->klij", star_products, phi.images)
    gram = phi_products.transpose(0, 2, 1, 3).reshape(n_dim * h, n_dim * h)
    gram = (gram + nk.adjoint(gram)) / 2.0
    factor = nk.gram_factor(gram, rel_tol)
    rank, f_map, lift = factor.rank, factor.F, factor.L

    raw_mult = _raw_left_mult(algebra, h)
    kernel_proj = nk.eye(n_dim * h) - lift @ f_map
    images = np.zeros((n_dim, rank, rank), dtype=np.complex128)
    leak = 0.0
    for k in range(n_dim):
        descended = f_map @ raw_mult[k]
        leak = max(
            leak,
            nk.maxabs(descended @ kernel_proj) / max(1.0, nk.maxabs(descended)),
        )
        images[k] = descended @ lift
    if leak > leak_tol:
        raise QuotientLeakError(
            f"left multiplication does not descend to the quotient (leak {leak:.3e}); "
            "the input map is not consistent"
        )
    rep = cstar.AlgebraRepresentation(algebra, rank, images)
    iota = np.kron(cstar.unit_coords(algebra)[:, None], nk.eye(h))  # h -> A (x) H
    v_map = f_map @ iota

    scale = max(1.0, nk.maxabs(phi.images))
    recon = np.einsum("ab,kac,cd->kbd", np.conj(v_map), images, v_map)
    reconstruction = nk.maxabs(recon - phi.images) / scale
    stacked = (images @ v_map).transpose(1, 0, 2).reshape(rank, n_dim * h)
    minimality = nk.numerical_rank(stacked, rel_tol).rank
    return GnsTriple(
        phi, rank, rep, v_map, f_map, lift, factor.eigenvalues, reconstruction, minimality
    )


@dataclass(frozen=True)
class StinespringDilation:
    """Minimal dilation ``Phi(x) = W* pi(x) V`` of a module CP map."""

    cp_map: ModuleCPMap
    gns: GnsTriple
    dim_codomain: int  # dim of the span of Phi(X) H inside K
    W: np.ndarray  # (dim_codomain, dim K), orthonormal rows
    images: np.ndarray  # (m, dim_codomain, gns.dim)
    codomain_gram_eigenvalues: np.ndarray

    @property
    def V(self) -> np.ndarray:
        return self.gns.V

    @property
    def dims(self) -> dict:
        dim_h, dim_k = self.cp_map.space_dims
        return {
            "H": dim_h,
            "K": dim_k,
            "H_dilation": self.gns.dim,
            "K_dilation": self.dim_codomain,
        }


def _raw_module_maps(phi: ModuleCPMap) -> np.ndarray:
    """Raw maps ``A (x) H -> K`` sending ``E_l (x) h`` to ``Phi(x_i E_l) h``."""
    module = phi.module
    n_dim = module.algebra.dim
    dim_h, dim_k = phi.space_dims
    products = np.einsum("ilq,qkj->ilkj", module.action, phi.images)
    return products.transpose(0, 2, 1, 3).reshape(module.dim, dim_k, n_dim * dim_h)


def dilate_module_cp(
    phi: ModuleCPMap,
    rel_tol: float = nk.REL_TOL,
    leak_tol: float = 1e-9,
    input_tol: float = 1e-8,
) -> StinespringDilation:
    """Construct the minimal dilation of a CP map on a full module.

    The dilation's domain space is the GNS space of the companion, the
    codomain space is the span of ``Phi(X) H`` in orthonormal coordinates,
    and the representation is the descended right-multiplication action.
    """
    module = phi.module
    report = check_module_cp(phi)
    if not report.cp:
        raise NotCpError(
            f"companion fails the Choi test (min eig {report.choi_min_eig:.3e})"
        )
    if report.identity_residual > input_tol:
        raise QuotientLeakError(
            f"defining identity fails by {report.identity_residual:.3e}; "
            "the pair (Phi, phi) is inconsistent and cannot descend"
        )
    axioms = hilbmod.check_module_axioms(module)
    if not axioms.full:
        raise NotFullError(
            f"module is not full: rank {axioms.fullness_rank} of {axioms.fullness_required}"
        )
    gns = gns_construct(phi.companion, rel_tol, leak_tol)

    dim_h, dim_k = phi.space_dims
    span = phi.images.transpose(1, 0, 2).reshape(dim_k, module.dim * dim_h)
    basis, k_eigs = nk.orthonormal_range(span, rel_tol)
    w_map = nk.adjoint(basis)
    dim_codomain = w_map.shape[0]

    raw = _raw_module_maps(phi)
    kernel_proj = nk.eye(raw.shape[2]) - gns.L @ gns.F
    leak = 0.0
    for i in range(module.dim):
        residual = nk.maxabs(raw[i] @ kernel_proj) / max(1.0, nk.maxabs(raw[i]))
        leak = max(leak, residual)
    if leak > leak_tol:
        raise QuotientLeakError(
            f"module maps do not descend to the GNS quotient (leak {leak:.3e})"
        )
    images = np.einsum("ab,ibc,cd->iad", w_map, raw, gns.L)
    return StinespringDilation(phi, gns, dim_codomain, w_map, images, k_eigs)


@dataclass(frozen=True)
class CovariantDilation:
    """Dilation of a covariant CP map with its two compressed group actions."""

    base: StinespringDilation
    cov_map: CovariantCPMap
    v: hilbmod.UnitaryRep  # on the dilation domain space
    w: hilbmod.UnitaryRep  # on the dilation codomain space
    gram_preservation_residual: float
    invariance_residual: float


def dilate_covariant(
    cov: CovariantCPMap,
    rel_tol: float = nk.REL_TOL,
    leak_tol: float = 1e-9,
    input_tol: float = 1e-8,
) -> CovariantDilation:
    """Covariant minimal dilation: group unitaries descend to both spaces.

    The domain unitaries are the descents of ``alpha_t (x) u_t`` (this
    preserves the GNS Gram exactly when the companion is covariant; the
    residual is checked).  The codomain space is invariant under ``u'`` up to
    the reported leak, and the codomain unitaries are its compressions.
    """
    report = check_covariance(cov.base, cov.system, cov.u, cov.u_prime)
    if report.max_residual > input_tol:
        raise NotCovariantError(
            f"input map is not covariant (residual {report.max_residual:.3e})"
        )
    base = dilate_module_cp(cov.base, rel_tol, leak_tol, input_tol)
    gns = base.gns
    group = cov.system.group
    dim_h, dim_k = cov.base.space_dims

    raw_dim = gns.F.shape[1]
    kernel_proj = nk.eye(raw_dim) - gns.L @ gns.F
    gram = nk.adjoint(gns.F) @ gns.F  # the GNS Gram restricted to its range
    v_mats = np.zeros((group.order, gns.dim, gns.dim), dtype=np.complex128)
    gram_residual = 0.0
    leak = 0.0
    for t in range(group.order):
        raw_t = np.kron(cov.system.alpha[t], cov.u.mats[t])
        transported = nk.adjoint(raw_t) @ gram @ raw_t
        gram_residual = max(
            gram_residual,
            nk.maxabs(transported - gram) / max(1.0, nk.maxabs(gram)),
        )
        descended = gns.F @ raw_t
        leak = max(
            leak,
            nk.maxabs(descended @ kernel_proj) / max(1.0, nk.maxabs(descended)),
        )
        v_mats[t] = descended @ gns.L
    if leak > leak_tol:
        raise QuotientLeakError(
            f"group unitaries do not descend to the GNS quotient (leak {leak:.3e})"
        )

    proj = nk.adjoint(base.W) @ base.W  # projection onto the codomain span in K
    invariance = 0.0
    w_mats = np.zeros((group.order, base.dim_codomain, base.dim_codomain), dtype=np.complex128)
    for t in range(group.order):
        off = (nk.eye(dim_k) - proj) @ cov.u_prime.mats[t] @ proj
        invariance = max(invariance, nk.maxabs(off))
        w_mats[t] = base.W @ cov.u_prime.mats[t] @ nk.adjoint(base.W)
    if invariance > leak_tol:
        raise InvarianceLeakError(
            f"span of Phi(X) H is not invariant under u' (leak {invariance:.3e}); "
            "the input data is inconsistent"
        )
    return CovariantDilation(
        base,
        cov,
        hilbmod.UnitaryRep(group, gns.dim, v_mats),
        hilbmod.UnitaryRep(group, base.dim_codomain, w_mats),
        gram_residual,
        invariance,
    )


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DilationCertificate:
    """Named residuals, rank decisions and their audit trails."""

    dims: dict
    residuals: dict
    ranks: dict  # name -> (achieved, required)
    singular_values: dict
    tolerance: float
    provenance: dict = field(default_factory=dict)

    @property
    def checks(self) -> dict:
        out = {name: float(value) <= self.tolerance for name, value in self.residuals.items()}
        for name, (achieved, required) in self.ranks.items():
            out[name] = achieved == required
        return out

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "dims": {k: int(v) for k, v in self.dims.items()},
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "ranks": {
                k: {"achieved": int(a), "required": int(r)}
                for k, (a, r) in self.ranks.items()
            },
            "checks": self.checks,
            "pass": self.passed,
            "singular_values": {
                k: [float(x) for x in v] for k, v in self.singular_values.items()
            },
            "tolerance": float(self.tolerance),
            "provenance": self.provenance,
        }


def _unitary_rep_residuals(rep: hilbmod.UnitaryRep) -> tuple[float, float]:
    report = hilbmod.check_unitary_rep(rep)
    return max(report.hom_residual, report.unit_residual), report.unitary_residual


def verify_dilation(
    phi,
    dilation,
    tol: float = 1e-9,
    rel_tol: float = nk.REL_TOL,
    provenance: dict | None = None,
) -> DilationCertificate:
    """Recompute every dilation invariant from scratch.

    ``phi`` is the input ``ModuleCPMap`` (plain case) or ``CovariantCPMap``
    (covariant case, with ``dilation`` a ``CovariantDilation``).  Nothing is
    raised: every failure shows up as a residual or a rank deficit.
    """
    cov = None
    if isinstance(phi, CovariantCPMap):
        cov = phi
        phi = cov.base
    base = dilation.base if isinstance(dilation, CovariantDilation) else dilation
    if base.cp_map is not phi and base.cp_map.images.shape != phi.images.shape:
        raise ShapeMismatchError("dilation does not belong to the given map")

    module = phi.module
    dim_h, dim_k = phi.space_dims
    gns = base.gns
    residuals: dict[str, float] = {}
    ranks: dict[str, tuple[int, int]] = {}
    singular: dict[str, list] = {}

    scale_phi = max(1.0, nk.maxabs(phi.images))

    # input is a module CP map
    input_report = check_module_cp(phi)
    residuals["input_identity"] = input_report.identity_residual
    residuals["companion_cp_defect"] = max(0.0, -input_report.choi_min_eig)
    residuals["companion_hermiticity"] = input_report.companion_herm_residual

    # GNS layer
    comp = phi.companion
    recon = np.einsum("ab,kac,cd->kbd", np.conj(gns.V), gns.rep.images, gns.V)
    residuals["gns_reconstruction"] = nk.maxabs(recon - comp.images) / scale_phi
    gns_stack = (gns.rep.images @ gns.V).transpose(1, 0, 2).reshape(
        gns.dim, module.algebra.dim * dim_h
    )
    gns_rank = nk.numerical_rank(gns_stack, rel_tol)
    ranks["gns_minimality"] = (gns_rank.rank, gns.dim)
    singular["gns_gram"] = list(np.sqrt(np.clip(gns.gram_eigenvalues, 0.0, None)))
    rep_report = cstar.check_representation(gns.rep)
    residuals["gns_representation"] = rep_report.max_residual

    # reconstruction Phi(x) = W* pi(x) V
    rebuilt = np.einsum("ab,iac,cd->ibd", np.conj(base.W), base.images, gns.V)
    residuals["reconstruction"] = nk.maxabs(rebuilt - phi.images) / scale_phi

    # representation identity pi(x)* pi(y) = pi_gns(<x,y>)
    lhs = np.einsum("iba,jbc->ijac", np.conj(base.images), base.images)
    rhs = np.einsum("ijk,kac->ijac", module.inner, gns.rep.images)
    residuals["representation_identity"] = nk.maxabs(lhs - rhs) / scale_phi

    # coisometry rows
    w_gram = base.W @ nk.adjoint(base.W)
    residuals["coisometry_rows"] = (
        nk.maxabs(w_gram - nk.eye(base.dim_codomain))
    )

    # density (minimality) conditions
    range_stack = np.einsum("iab,bc->iac", base.images, gns.V)
    range_stack = range_stack.transpose(1, 0, 2).reshape(
        base.dim_codomain, module.dim * dim_h
    )
    range_rank = nk.numerical_rank(range_stack, rel_tol)
    ranks["range_density"] = (range_rank.rank, base.dim_codomain)
    singular["range_density"] = list(range_rank.singular_values)

    corange_stack = np.einsum("iba,bc->iac", np.conj(base.images), base.W)
    corange_stack = corange_stack.transpose(1, 0, 2).reshape(
        gns.dim, module.dim * dim_k
    )
    corange_rank = nk.numerical_rank(corange_stack, rel_tol)
    ranks["corange_density"] = (corange_rank.rank, gns.dim)
    singular["corange_density"] = list(corange_rank.singular_values)
    singular["codomain_gram"] = list(
        np.sqrt(np.clip(base.codomain_gram_eigenvalues, 0.0, None))
    )

    dims = dict(base.dims)

    if cov is not None and isinstance(dilation, CovariantDilation):
        system = cov.system
        group = system.group
        u, u_prime = cov.u, cov.u_prime
        v_rep, w_rep = dilation.v, dilation.w

        cov_report = check_covariance(phi, system, u, u_prime)
        residuals["input_covariance"] = cov_report.map_residual
        residuals["companion_covariance"] = cov_report.companion_residual

        law_v, unit_v = _unitary_rep_residuals(v_rep)
        law_w, unit_w = _unitary_rep_residuals(w_rep)
        residuals["domain_unitaries_group_law"] = law_v
        residuals["domain_unitaries_unitarity"] = unit_v
        residuals["codomain_unitaries_group_law"] = law_w
        residuals["codomain_unitaries_unitarity"] = unit_w

        intertwine_v = max(
            (
                nk.maxabs(v_rep.mats[t] @ gns.V - gns.V @ u.mats[t])
                for t in range(group.order)
            ),
            default=0.0,
        )
        residuals["intertwine_V"] = intertwine_v / max(
            1.0, nk.maxabs(gns.V)
        )
        intertwine_w = max(
            (
                nk.maxabs(w_rep.mats[t] @ base.W - base.W @ u_prime.mats[t])
                for t in range(group.order)
            ),
            default=0.0,
        )
        residuals["intertwine_W"] = intertwine_w

        transported = np.einsum("tqi,qab->tiab", system.eta, base.images)
        conjugated = np.einsum(
            "tab,ibc,tdc->tiad", w_rep.mats, base.images, np.conj(v_rep.mats)
        )
        residuals["covariant_representation"] = (
            nk.maxabs(transported - conjugated) / scale_phi
        )

        pushed = np.einsum("tlk,lab->tkab", system.alpha, gns.rep.images)
        comp_conj = np.einsum(
            "tab,kbc,tdc->tkad", v_rep.mats, gns.rep.images, np.conj(v_rep.mats)
        )
        residuals["companion_covariant_rep"] = nk.maxabs(pushed - comp_conj) / max(
            1.0, nk.maxabs(gns.rep.images)
        )
        residuals["gram_preservation"] = dilation.gram_preservation_residual
        residuals["subspace_invariance"] = dilation.invariance_residual

    return DilationCertificate(
        dims,
        residuals,
        ranks,
        singular,
        tol,
        provenance or {},
    )


# ---------------------------------------------------------------------------
# Uniqueness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AltDilation:
    """Competing dilation data against which uniqueness is tested."""

    images: np.ndarray  # (m, dim K', dim H')
    V: np.ndarray  # (dim H', dim H)
    W: np.ndarray  # (dim K', dim K)
    v: hilbmod.UnitaryRep | None = None
    w: hilbmod.UnitaryRep | None = None


class UniquenessReport(NamedTuple):
    U1: np.ndarray
    U2: np.ndarray
    unitarity_U1: float
    unitarity_U2: float
    intertwine_images: float  # U2 pi(x) = pi'(x) U1
    v_map_residual: float  # V' = U1 V
    w_map_residual: float  # W' = U2 W
    alt_reconstruction: float  # Phi(x) = W'* pi'(x) V'
    covariant_v_residual: float  # v'_t U1 = U1 v_t
    covariant_w_residual: float  # w'_t U2 = U2 w_t

    @property
    def max_residual(self) -> float:
        return max(
            self.unitarity_U1,
            self.unitarity_U2,
            self.intertwine_images,
            self.v_map_residual,
            self.w_map_residual,
            self.alt_reconstruction,
            self.covariant_v_residual,
            self.covariant_w_residual,
        )


def uniqueness_intertwiners(
    dilation,
    alt: AltDilation,
    tol: float = 1e-8,
    rel_tol: float = nk.REL_TOL,
) -> UniquenessReport:
    """Solve the unitaries carrying the dilation onto competing minimal data.

    ``U1`` is solved on the span of ``pi_gns(A) V H``, ``U2`` on the span of
    ``pi(X) V H``; both systems are full-rank exactly when the dilation is
    minimal.  Raises ``NotMinimalError`` when the competing data fails its
    density (rank) conditions and ``NotUnitaryError`` when a solved
    intertwiner is not unitary, which means the inputs are not equivalent
    dilations.  All other discrepancies are reported as residuals.
    """
    base = dilation.base if isinstance(dilation, CovariantDilation) else dilation
    phi = base.cp_map
    module = phi.module
    gns = base.gns
    dim_h, dim_k = phi.space_dims

    alt_images = np.asarray(alt.images, dtype=np.complex128)
    alt_v = nk.as_matrix(alt.V)
    alt_w = nk.as_matrix(alt.W)
    alt_h, alt_k = alt_images.shape[2], alt_images.shape[1]
    if alt_v.shape != (alt_h, dim_h) or alt_w.shape != (alt_k, dim_k):
        raise ShapeMismatchError("competing dilation maps have inconsistent shapes")

    w_gram = alt_w @ nk.adjoint(alt_w)
    w_defect = nk.maxabs(w_gram - nk.eye(alt_k))
    if w_defect > tol:
        raise NotCoisometryError(f"competing W is not a coisometry ({w_defect:.3e})")

    range_stack = np.einsum("iab,bc->iac", alt_images, alt_v)
    range_rank = nk.numerical_rank(
        range_stack.transpose(1, 0, 2).reshape(alt_k, module.dim * dim_h), rel_tol
    ).rank
    corange_stack = np.einsum("iba,bc->iac", np.conj(alt_images), alt_w)
    corange_rank = nk.numerical_rank(
        corange_stack.transpose(1, 0, 2).reshape(alt_h, module.dim * dim_k), rel_tol
    ).rank
    if range_rank != alt_k or corange_rank != alt_h:
        raise NotMinimalError(
            f"competing dilation is not minimal: range rank {range_rank}/{alt_k}, "
            f"corange rank {corange_rank}/{alt_h}"
        )

    # companion representation of the competing images, via fullness
    flat = module.inner.reshape(module.dim**2, module.algebra.dim)
    pair_grams = np.einsum("iba,jbc->ijac", np.conj(alt_images), alt_images)
    target = pair_grams.reshape(module.dim**2, alt_h * alt_h)
    alt_companion = nk.least_squares_solve(flat, target).reshape(
        module.algebra.dim, alt_h, alt_h
    )

    scale_phi = max(1.0, nk.maxabs(phi.images))
    alt_rebuilt = np.einsum("ab,iac,cd->ibd", np.conj(alt_w), alt_images, alt_v)
    alt_recon = nk.maxabs(alt_rebuilt - phi.images) / scale_phi

    # U1 from the algebra side, U2 from the module side
    m_cols = (gns.rep.images @ gns.V).transpose(1, 0, 2).reshape(
        gns.dim, module.algebra.dim * dim_h
    )
    m_cols_alt = (alt_companion @ alt_v).transpose(1, 0, 2).reshape(
        alt_h, module.algebra.dim * dim_h
    )
    u1 = nk.least_squares_solve(m_cols.T, m_cols_alt.T).T
    s_cols = np.einsum("iab,bc->iac", base.images, gns.V)
    s_cols = s_cols.transpose(1, 0, 2).reshape(base.dim_codomain, module.dim * dim_h)
    s_cols_alt = np.einsum("iab,bc->iac", alt_images, alt_v)
    s_cols_alt = s_cols_alt.transpose(1, 0, 2).reshape(alt_k, module.dim * dim_h)
    u2 = nk.least_squares_solve(s_cols.T, s_cols_alt.T).T

    def _unitarity(u: np.ndarray) -> float:
        if u.shape[0] != u.shape[1]:
            return float("inf")
        if u.size == 0:
            return 0.0
        return max(
            nk.maxabs(nk.adjoint(u) @ u - nk.eye(u.shape[1])),
            nk.maxabs(u @ nk.adjoint(u) - nk.eye(u.shape[0])),
        )

    unit1, unit2 = _unitarity(u1), _unitarity(u2)
    if unit1 > tol or unit2 > tol:
        raise NotUnitaryError(
            f"solved intertwiners are not unitary (defects {unit1:.3e}, {unit2:.3e}); "
            "the competing data is not an equivalent dilation"
        )

    intertwine = max(
        (
            nk.maxabs(u2 @ base.images[i] - alt_images[i] @ u1)
            for i in range(module.dim)
        ),
        default=0.0,
    )
    v_resid = nk.maxabs(alt_v - u1 @ gns.V)
    w_resid = nk.maxabs(alt_w - u2 @ base.W)

    cov_v = cov_w = 0.0
    if isinstance(dilation, CovariantDilation) and alt.v is not None and alt.w is not None:
        group = dilation.cov_map.system.group
        cov_v = max(
            nk.maxabs(alt.v.mats[t] @ u1 - u1 @ dilation.v.mats[t])
            for t in range(group.order)
        )
        cov_w = max(
            nk.maxabs(alt.w.mats[t] @ u2 - u2 @ dilation.w.mats[t])
            for t in range(group.order)
        )

    return UniquenessReport(
        u1, u2, unit1, unit2, intertwine, v_resid, w_resid, alt_recon, cov_v, cov_w
    )

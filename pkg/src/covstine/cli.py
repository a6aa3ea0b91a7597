"""Scenario-driven command line harness.

Reads a JSON scenario (explicit objects or a seeded generator spec), runs the
requested construction, re-verifies every invariant and emits a certificate.
Certificates are canonical JSON (sorted keys, fixed separators): identical
scenario, seed and artifact version produce byte-identical output.  Wall
clock time goes to stderr, never into the certificate.

Exit codes: 0 when every check passes, 1 on check failures, 2 on input
errors (parse, validation, bounds, or rejected mathematical preconditions).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__, cpmaps, crossed, hilbmod, stinespring
from . import numkernel as nk
from .errors import (
    BoundsError,
    ComputeError,
    CovstineError,
    ParseError,
    ValidationError,
)

SCHEMA_VERSION = 1
KINDS = ("dilate", "dilate-covariant", "crossed", "uniqueness", "verify")
DEFAULT_TOL = 1e-9
MAX_P = 8
MAX_N = 8
MAX_GROUP_ORDER = 24
MAX_AMPLIFICATION = 8
# exhaustive crossed-axiom checks are only feasible on small crossed bases
CROSSED_AXIOM_LIMIT = 64


# ---------------------------------------------------------------------------
# Scenario parsing and object resolution
# ---------------------------------------------------------------------------


def load_scenario(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ParseError(f"{path}: cannot read scenario ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: scenario root must be an object")
    return data


def validate_scenario(data: dict) -> None:
    allowed = {"schema", "kind", "seed", "tolerance", "generate", "objects"}
    extra = set(data) - allowed
    if extra:
        raise ParseError(f"scenario: unknown field '{sorted(extra)[0]}'")
    for required in ("schema", "kind"):
        if required not in data:
            raise ParseError(f"scenario: missing field '{required}'")
    if data["schema"] != SCHEMA_VERSION:
        raise ParseError(f"scenario: unsupported schema {data['schema']!r}")
    if data["kind"] not in KINDS:
        raise ParseError(f"scenario: unknown kind {data['kind']!r}")
    if ("generate" in data) == ("objects" in data):
        raise ParseError("scenario: exactly one of 'generate' or 'objects' is required")


@dataclass
class ResolvedScenario:
    kind: str
    tolerance: float
    seed: int | None
    phi: cpmaps.ModuleCPMap | None = None
    cov: cpmaps.CovariantCPMap | None = None
    digest: str = ""
    name: str = ""

    @property
    def covariant(self) -> bool:
        return self.cov is not None


def _scenario_rng(seed: int, key: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(key,)))
    )


def _resolve_generate(data: dict, seed: int | None) -> tuple:
    payload = data["generate"]
    if not isinstance(payload, dict):
        raise ParseError("scenario.generate: must be an object")
    allowed = {"p", "n", "amplification", "group"}
    extra = set(payload) - allowed
    if extra:
        raise ParseError(f"scenario.generate: unknown field '{sorted(extra)[0]}'")
    for required in ("p", "n", "amplification"):
        if required not in payload:
            raise ParseError(f"scenario.generate: missing field '{required}'")
    if seed is None:
        raise ParseError("scenario: generated scenarios need a 'seed'")
    p, n = int(payload["p"]), int(payload["n"])
    amplification = int(payload["amplification"])
    check_generator_bounds(p, n, amplification)
    if "group" in payload:
        group = hilbmod.group_from_json(payload["group"])
    else:
        group = hilbmod.trivial_group()
    if group.order > MAX_GROUP_ORDER:
        raise BoundsError(f"group order {group.order} exceeds {MAX_GROUP_ORDER}")
    gamma = hilbmod.seeded_rep(group, p, _scenario_rng(seed, 100))
    delta = hilbmod.seeded_rep(group, n, _scenario_rng(seed, 101))
    system = hilbmod.standard_action(group, gamma, delta)
    cov, _ = cpmaps.random_covariant_cp(system, amplification, seed)
    return cov.base, cov


def check_generator_bounds(p: int, n: int, amplification: int) -> None:
    if not 1 <= p <= MAX_P:
        raise BoundsError(f"p = {p} outside [1, {MAX_P}]")
    if not 1 <= n <= MAX_N:
        raise BoundsError(f"n = {n} outside [1, {MAX_N}]")
    if not 1 <= amplification <= MAX_AMPLIFICATION:
        raise BoundsError(f"amplification = {amplification} outside [1, {MAX_AMPLIFICATION}]")


def _resolve_module(payload) -> hilbmod.HilbertModule:
    return hilbmod.module_from_json(payload)


def _standard_dims(module: hilbmod.HilbertModule) -> tuple[int, int]:
    if len(module.algebra.blocks) != 1:
        raise ValidationError("concrete maps need a standard (single block) module")
    n = module.algebra.blocks[0]
    if module.dim % n:
        raise ValidationError("module dimension is not a multiple of the block size")
    p = module.dim // n
    reference = hilbmod.standard_module(p, n)
    if not (
        np.allclose(reference.action, module.action)
        and np.allclose(reference.inner, module.inner)
    ):
        raise ValidationError("concrete maps need the standard module structure")
    return p, n


def _resolve_cp_map(payload, module: hilbmod.HilbertModule) -> cpmaps.ModuleCPMap:
    if not isinstance(payload, dict):
        raise ParseError("scenario.objects.cp_map: must be an object")
    if set(payload) == {"concrete"}:
        p, n = _standard_dims(module)
        rep = hilbmod.concrete_representation(p, n)
        return cpmaps.cp_from_representation(rep, nk.eye(n), nk.eye(p))
    allowed = {"images", "companion"}
    extra = set(payload) - allowed
    if extra:
        raise ParseError(f"scenario.objects.cp_map: unknown field '{sorted(extra)[0]}'")
    for required in allowed:
        if required not in payload:
            raise ParseError(f"scenario.objects.cp_map: missing field '{required}'")
    comp = payload["companion"]
    if not isinstance(comp, dict) or set(comp) != {"space_dim", "images"}:
        raise ParseError("scenario.objects.cp_map.companion: needs space_dim and images")
    labels = module.algebra.basis_labels()
    comp_images = []
    for label in labels:
        if label not in comp["images"]:
            raise ParseError(f"cp_map.companion: missing image '{label}'")
        comp_images.append(nk.mat_from_json(comp["images"][label]))
    companion = cpmaps.CPMapAlgebra(
        module.algebra, int(comp["space_dim"]), np.stack(comp_images)
    )
    images = []
    for i in range(module.dim):
        key = str(i)
        if key not in payload["images"]:
            raise ParseError(f"cp_map: missing image '{key}'")
        images.append(nk.mat_from_json(payload["images"][key]))
    return cpmaps.ModuleCPMap(module, np.stack(images), companion)


def _resolve_rep(payload, group: hilbmod.FiniteGroup, name: str) -> hilbmod.UnitaryRep:
    if isinstance(payload, dict) and set(payload) == {"trivial"}:
        return hilbmod.trivial_rep(group, int(payload["trivial"]))
    if isinstance(payload, dict) and set(payload) == {"regular"}:
        return hilbmod.regular_rep(group)
    return hilbmod.unitary_rep_from_json(group, payload)


def _resolve_system(payload) -> hilbmod.ModuleDynamicalSystem:
    if not isinstance(payload, dict):
        raise ParseError("scenario.objects.system: must be an object")
    if set(payload) == {"standard_action"}:
        inner = payload["standard_action"]
        if not isinstance(inner, dict) or set(inner) != {"group", "gamma", "delta"}:
            raise ParseError(
                "scenario.objects.system.standard_action: needs group, gamma, delta"
            )
        group = hilbmod.group_from_json(inner["group"])
        gamma = _resolve_rep(inner["gamma"], group, "gamma")
        delta = _resolve_rep(inner["delta"], group, "delta")
        return hilbmod.standard_action(group, gamma, delta)
    allowed = {"group", "module", "eta", "alpha"}
    extra = set(payload) - allowed
    if extra:
        raise ParseError(f"scenario.objects.system: unknown field '{sorted(extra)[0]}'")
    for required in allowed:
        if required not in payload:
            raise ParseError(f"scenario.objects.system: missing field '{required}'")
    group = hilbmod.group_from_json(payload["group"])
    module = _resolve_module(payload["module"])
    eta = hilbmod._tensor_from_json(payload["eta"], 3)
    alpha = hilbmod._tensor_from_json(payload["alpha"], 3)
    return hilbmod.ModuleDynamicalSystem(group, module, eta, alpha)


def _resolve_objects(data: dict, kind: str) -> tuple:
    payload = data["objects"]
    if not isinstance(payload, dict):
        raise ParseError("scenario.objects: must be an object")
    covariant_kinds = {"dilate-covariant", "crossed"}
    wants_covariant = kind in covariant_kinds or "system" in payload
    if wants_covariant:
        allowed = {"system", "cp_map", "u", "u_prime"}
        extra = set(payload) - allowed
        if extra:
            raise ParseError(f"scenario.objects: unknown field '{sorted(extra)[0]}'")
        for required in allowed:
            if required not in payload:
                raise ParseError(f"scenario.objects: missing field '{required}'")
        system = _resolve_system(payload["system"])
        phi = _resolve_cp_map(payload["cp_map"], system.module)
        dim_h, dim_k = phi.space_dims

        def _target(rep_payload, name):
            if rep_payload == "delta":
                if system.delta is None:
                    raise ValidationError(f"{name}: 'delta' needs a standard action")
                return system.delta
            if rep_payload == "gamma":
                if system.gamma is None:
                    raise ValidationError(f"{name}: 'gamma' needs a standard action")
                return system.gamma
            return _resolve_rep(rep_payload, system.group, name)

        u = _target(payload["u"], "u")
        u_prime = _target(payload["u_prime"], "u_prime")
        cov = cpmaps.CovariantCPMap(phi, system, u, u_prime)
        return phi, cov
    allowed = {"module", "cp_map"}
    extra = set(payload) - allowed
    if extra:
        raise ParseError(f"scenario.objects: unknown field '{sorted(extra)[0]}'")
    for required in allowed:
        if required not in payload:
            raise ParseError(f"scenario.objects: missing field '{required}'")
    module = _resolve_module(payload["module"])
    phi = _resolve_cp_map(payload["cp_map"], module)
    return phi, None


def resolve_scenario(
    data: dict,
    name: str,
    tol_override: float | None = None,
    seed_override: int | None = None,
) -> ResolvedScenario:
    validate_scenario(data)
    kind = data["kind"]
    seed = seed_override if seed_override is not None else data.get("seed")
    if seed is not None:
        seed = int(seed)
    tolerance = (
        tol_override if tol_override is not None else float(data.get("tolerance", DEFAULT_TOL))
    )
    if "generate" in data:
        phi, cov = _resolve_generate(data, seed)
    else:
        phi, cov = _resolve_objects(data, kind)
    if kind in ("dilate-covariant", "crossed") and cov is None:
        raise ValidationError(f"kind '{kind}' needs covariant objects")
    digest = hashlib.sha256(canonical_bytes(data)).hexdigest()
    return ResolvedScenario(kind, tolerance, seed, phi, cov, digest, name)


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


def canonical_bytes(payload: dict) -> bytes:
    return (json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n").encode()


@dataclass
class Certificate:
    kind: str
    scenario_digest: str
    seed: int | None
    tolerance: float
    dims: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    ranks: dict = field(default_factory=dict)
    singular_values: dict = field(default_factory=dict)
    skipped: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    duration: float = 0.0  # stderr-only; never serialized

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
            "artifact_version": __version__,
            "kind": self.kind,
            "scenario_digest": self.scenario_digest,
            "seed": self.seed,
            "tolerance": float(self.tolerance),
            "dims": {k: int(v) for k, v in sorted(self.dims.items())},
            "residuals": {k: float(v) for k, v in sorted(self.residuals.items())},
            "ranks": {
                k: {"achieved": int(a), "required": int(r)}
                for k, (a, r) in sorted(self.ranks.items())
            },
            "checks": dict(sorted(self.checks.items())),
            "pass": self.passed,
            "singular_values": {
                k: [float(x) for x in v] for k, v in sorted(self.singular_values.items())
            },
            "skipped": dict(sorted(self.skipped.items())),
            "provenance": self.provenance,
        }

    def canonical(self) -> bytes:
        return canonical_bytes(self.to_json())


def _merge_dilation_certificate(cert: Certificate, dcert: stinespring.DilationCertificate):
    cert.dims.update(dcert.dims)
    cert.residuals.update(dcert.residuals)
    cert.ranks.update(dcert.ranks)
    cert.singular_values.update(dcert.singular_values)


def emit_certificate(cert: Certificate, fmt: str = "json") -> str:
    """Render a certificate as canonical JSON or a human-readable table."""
    if fmt == "json":
        return cert.canonical().decode()
    lines = [
        f"scenario {cert.provenance.get('scenario', '?')}  kind={cert.kind}  "
        f"seed={cert.seed}  tol={cert.tolerance:g}",
        f"dims: {cert.dims}",
        f"{'check':38s} {'value':>12s} {'verdict':>8s}",
    ]
    for name, value in sorted(cert.residuals.items()):
        verdict = "PASS" if value <= cert.tolerance else "FAIL"
        lines.append(f"{name:38s} {value:12.3e} {verdict:>8s}")
    for name, (achieved, required) in sorted(cert.ranks.items()):
        verdict = "PASS" if achieved == required else "FAIL"
        lines.append(f"{name:38s} {f'{achieved}/{required}':>12s} {verdict:>8s}")
    for name, reason in sorted(cert.skipped.items()):
        lines.append(f"{name:38s} {'skipped':>12s}  ({reason})")
    lines.append("PASS" if cert.passed else "FAIL")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Runners
# ---------------------------------------------------------------------------


def _run_dilate(res: ResolvedScenario, cert: Certificate) -> None:
    dilation = stinespring.dilate_module_cp(res.phi)
    dcert = stinespring.verify_dilation(
        res.phi, dilation, tol=res.tolerance, provenance=cert.provenance
    )
    _merge_dilation_certificate(cert, dcert)


def _run_dilate_covariant(res: ResolvedScenario, cert: Certificate) -> None:
    dilation = stinespring.dilate_covariant(res.cov)
    dcert = stinespring.verify_dilation(
        res.cov, dilation, tol=res.tolerance, provenance=cert.provenance
    )
    _merge_dilation_certificate(cert, dcert)


def _run_verify(res: ResolvedScenario, cert: Certificate) -> None:
    """Report-everything mode: axiom residuals plus the dilation certificate.

    A construction rejected on mathematical grounds becomes a failing check
    here instead of an input error, so that broken objects still produce a
    complete report.
    """
    module = res.phi.module
    axioms = hilbmod.check_module_axioms(module)
    cert.residuals["module_linearity"] = axioms.linearity_residual
    cert.residuals["module_symmetry"] = axioms.symmetry_residual
    cert.residuals["module_positivity_defect"] = max(0.0, -axioms.positivity_min_eig)
    cert.ranks["module_fullness"] = (axioms.fullness_rank, axioms.fullness_required)
    cp_report = cpmaps.check_module_cp(res.phi)
    cert.residuals["cp_identity"] = cp_report.identity_residual
    cert.residuals["cp_choi_defect"] = max(0.0, -cp_report.choi_min_eig)
    try:
        if res.cov is not None:
            sys_report = hilbmod.check_dynamical_system(res.cov.system)
            cert.residuals["dynamical_system"] = sys_report.max_residual
            cov_report = cpmaps.check_covariance(
                res.phi, res.cov.system, res.cov.u, res.cov.u_prime
            )
            cert.residuals["covariance"] = cov_report.map_residual
            cert.residuals["companion_covariance"] = cov_report.companion_residual
            _run_dilate_covariant(res, cert)
        else:
            _run_dilate(res, cert)
        cert.ranks["dilation_constructed"] = (1, 1)
    except ComputeError as exc:
        cert.ranks["dilation_constructed"] = (0, 1)
        cert.skipped["dilation"] = f"{type(exc).__name__}: {exc}"


def _run_crossed(res: ResolvedScenario, cert: Certificate, dump_structure: bool = False):
    cov = res.cov
    dilation = stinespring.dilate_covariant(cov)
    induced = crossed.induced_cp(cov, dilation)
    cert.dims.update(dilation.base.dims)
    cert.dims["crossed_algebra"] = induced.crossed.algebra.dim
    cert.dims["crossed_module"] = induced.crossed.dim
    cert.residuals["crossed_identity"] = induced.identity_residual
    cert.residuals["factorization"] = induced.factorization_residual

    report = crossed.check_integral_stinespring(cov, dilation, induced)
    cert.residuals["integral_reconstruction"] = report.reconstruction_residual
    cert.ranks["integral_range_density"] = (report.range_rank, report.range_required)
    cert.ranks["integral_corange_density"] = (report.corange_rank, report.corange_required)

    if induced.crossed.algebra.dim <= CROSSED_AXIOM_LIMIT:
        alg_report = crossed.check_crossed_algebra(induced.crossed.algebra)
        cert.residuals["crossed_algebra_axioms"] = alg_report.max_residual
        mod_report = crossed.check_crossed_module(induced.crossed)
        cert.residuals["crossed_module_axioms"] = mod_report.max_residual
        cert.ranks["crossed_module_fullness"] = (
            mod_report.fullness_rank,
            mod_report.fullness_required,
        )
    else:
        cert.skipped["crossed_axioms"] = (
            f"crossed basis of size {induced.crossed.algebra.dim} exceeds the "
            f"exhaustive-check limit {CROSSED_AXIOM_LIMIT}"
        )
    structure = None
    if dump_structure:
        tensor = crossed.structure_constants(induced.crossed.algebra)
        nonzero = np.argwhere(np.abs(tensor) > 0)
        structure = [
            [int(i), int(j), int(k), float(tensor[i, j, k].real), float(tensor[i, j, k].imag)]
            for i, j, k in nonzero
        ]
    return structure


def _phase_align(u: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Rotate a global phase so the first columns of u and reference align."""
    if u.size == 0:
        return u
    overlap = np.vdot(u[:, 0], reference[:, 0])
    if abs(overlap) == 0.0:
        return u
    return u * (overlap / abs(overlap))


def _run_uniqueness(res: ResolvedScenario, cert: Certificate) -> None:
    if res.seed is None:
        raise ValidationError("uniqueness scenarios need a seed for the conjugators")
    if res.cov is not None:
        dilation = stinespring.dilate_covariant(res.cov)
        base = dilation.base
    else:
        dilation = stinespring.dilate_module_cp(res.phi)
        base = dilation
    rng = _scenario_rng(res.seed, 102)
    r1 = nk.haar_unitary(rng, base.gns.dim)
    r2 = nk.haar_unitary(rng, base.dim_codomain)
    alt_images = np.einsum("ab,ibc,dc->iad", r2, base.images, np.conj(r1))
    alt = stinespring.AltDilation(
        images=alt_images,
        V=r1 @ base.gns.V,
        W=r2 @ base.W,
        v=(
            hilbmod.UnitaryRep(
                res.cov.system.group,
                base.gns.dim,
                np.stack([r1 @ m @ nk.adjoint(r1) for m in dilation.v.mats]),
            )
            if res.cov is not None
            else None
        ),
        w=(
            hilbmod.UnitaryRep(
                res.cov.system.group,
                base.dim_codomain,
                np.stack([r2 @ m @ nk.adjoint(r2) for m in dilation.w.mats]),
            )
            if res.cov is not None
            else None
        ),
    )
    report = stinespring.uniqueness_intertwiners(dilation, alt, tol=max(res.tolerance, 1e-8))
    cert.dims.update(base.dims)
    cert.residuals["unitarity_U1"] = report.unitarity_U1
    cert.residuals["unitarity_U2"] = report.unitarity_U2
    cert.residuals["intertwine_images"] = report.intertwine_images
    cert.residuals["v_map_residual"] = report.v_map_residual
    cert.residuals["w_map_residual"] = report.w_map_residual
    cert.residuals["alt_reconstruction"] = report.alt_reconstruction
    cert.residuals["recover_U1"] = nk.maxabs(_phase_align(report.U1, r1) - r1)
    cert.residuals["recover_U2"] = nk.maxabs(_phase_align(report.U2, r2) - r2)
    if res.cov is not None:
        cert.residuals["covariant_v_residual"] = report.covariant_v_residual
        cert.residuals["covariant_w_residual"] = report.covariant_w_residual


def run_scenario(
    path: str,
    expected_kind: str | None = None,
    tol_override: float | None = None,
    seed_override: int | None = None,
    dump_structure: bool = False,
) -> Certificate:
    """Run one scenario file end to end and return its certificate."""
    data = load_scenario(path)
    res = resolve_scenario(data, path, tol_override, seed_override)
    if expected_kind is not None and res.kind != expected_kind:
        raise ValidationError(
            f"{path}: scenario kind '{res.kind}' does not match command '{expected_kind}'"
        )
    started = time.monotonic()
    cert = Certificate(
        kind=res.kind,
        scenario_digest=res.digest,
        seed=res.seed,
        tolerance=res.tolerance,
        provenance={"scenario": res.name.rsplit("/", 1)[-1], "seed": res.seed},
    )
    structure = None
    if res.kind == "dilate":
        _run_dilate(res, cert)
    elif res.kind == "dilate-covariant":
        _run_dilate_covariant(res, cert)
    elif res.kind == "verify":
        _run_verify(res, cert)
    elif res.kind == "crossed":
        structure = _run_crossed(res, cert, dump_structure)
    elif res.kind == "uniqueness":
        _run_uniqueness(res, cert)
    cert.duration = time.monotonic() - started
    if structure is not None:
        cert.provenance["structure_constants"] = structure
    return cert


# ---------------------------------------------------------------------------
# Scenario generation
# ---------------------------------------------------------------------------


def generate_scenario(
    kind: str,
    p: int,
    n: int,
    amplification: int,
    seed: int,
    group: str | None = None,
    tolerance: float = DEFAULT_TOL,
) -> dict:
    """Emit a self-contained scenario that replays identically from its seed."""
    if kind not in KINDS:
        raise BoundsError(f"unknown kind '{kind}'")
    check_generator_bounds(p, n, amplification)
    generate: dict = {"p": p, "n": n, "amplification": amplification}
    if group is not None:
        group_json = _parse_group_spec(group)
        generate["group"] = group_json
    elif kind in ("dilate-covariant", "crossed"):
        generate["group"] = {"cyclic": 1}
    return {
        "schema": SCHEMA_VERSION,
        "kind": kind,
        "seed": int(seed),
        "tolerance": tolerance,
        "generate": generate,
    }


def _parse_group_spec(spec: str) -> dict:
    try:
        family, _, size = spec.partition(":")
        size = int(size)
    except ValueError as exc:
        raise BoundsError(f"bad group spec '{spec}' (use cyclic:N or symmetric:N)") from exc
    if family == "cyclic":
        order = size
    elif family == "symmetric":
        order = 1
        for k in range(2, size + 1):
            order *= k
    else:
        raise BoundsError(f"unknown group family '{family}'")
    if not 1 <= order <= MAX_GROUP_ORDER:
        raise BoundsError(f"group order {order} outside [1, {MAX_GROUP_ORDER}]")
    return {family: size}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _worker(args: tuple) -> tuple[int, str, str]:
    path, kind, tol, seed, dump, fmt = args
    try:
        cert = run_scenario(path, kind, tol, seed, dump)
    except (ParseError, ValidationError, BoundsError, ComputeError) as exc:
        return 2, "", f"{path}: {type(exc).__name__}: {exc}"
    except CovstineError as exc:
        return 2, "", f"{path}: {type(exc).__name__}: {exc}"
    output = emit_certificate(cert, fmt)
    note = f"{path}: {'PASS' if cert.passed else 'FAIL'} in {cert.duration:.3f}s"
    return (0 if cert.passed else 1), output, note


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--scenario", action="append", required=True, metavar="PATH",
        help="scenario file (repeatable)",
    )
    parser.add_argument("--tol", type=float, default=None, help="tolerance override")
    parser.add_argument("--seed", type=int, default=None, help="seed override")
    parser.add_argument("--out", default=None, help="write the certificate to PATH")
    parser.add_argument("--format", choices=("json", "table"), default="json")
    parser.add_argument("--jobs", type=int, default=1, help="run scenarios in parallel")
    parser.add_argument(
        "--dump-structure", action="store_true",
        help="include crossed structure constants in the certificate provenance",
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="covstine",
        description="Construct and verify dilations of CP maps on Hilbert C*-modules.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        _add_run_flags(sub.add_parser(kind, help=f"run {kind} scenarios"))
    gen = sub.add_parser("gen", help="emit a seeded scenario file")
    gen.add_argument("--kind", required=True, choices=KINDS)
    gen.add_argument("--p", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--amplification", type=int, default=1)
    gen.add_argument("--group", default=None, help="cyclic:N or symmetric:N")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--tol", type=float, default=DEFAULT_TOL)
    gen.add_argument("--out", default=None)
    args = parser.parse_args(argv)

    if args.command == "gen":
        try:
            scenario = generate_scenario(
                args.kind, args.p, args.n, args.amplification, args.seed,
                args.group, args.tol,
            )
        except BoundsError as exc:
            print(f"BoundsError: {exc}", file=sys.stderr)
            return 2
        text = canonical_bytes(scenario).decode()
        if args.out:
            with open(args.out, "w", encoding="utf-8") as handle:
                handle.write(text)
        else:
            sys.stdout.write(text)
        return 0

    jobs = [
        (path, args.command, args.tol, args.seed, args.dump_structure, args.format)
        for path in args.scenario
    ]
    if args.out and len(jobs) > 1:
        print("--out needs a single scenario", file=sys.stderr)
        return 2
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_worker, jobs))
    else:
        results = [_worker(job) for job in jobs]

    code = 0
    for (status, output, note), job in zip(results, jobs):
        print(note, file=sys.stderr)
        if output:
            if args.out:
                with open(args.out, "w", encoding="utf-8") as handle:
                    handle.write(output)
            else:
                sys.stdout.write(output)
        code = max(code, status)
    return code


if __name__ == "__main__":
    sys.exit(main())

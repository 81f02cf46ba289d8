"""Reverse operators for locally disturbed states: the Chebyshev construction and the optimal q-local oracle."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from typing import Any, Literal

import numpy as np
import scipy.linalg as sla
from loguru import logger
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, model_validator

from revlab.chebyshev import FilterParams, apply_filter, filter_params
from revlab.errors import (
    ArgumentError,
    DegenerateDecompositionError,
    DegenerateGroundStateError,
    DimensionError,
    DimensionLimitError,
    NotAProjectorError,
    UnsupportedRepresentationError,
    VacuousBoundError,
)
from revlab.models import HamiltonianSpec
from revlab.operators import (
    MAX_EXACT_NORM_SITES,
    LocalOperator,
    PauliString,
    apply_local_operator,
    basis_count,
    enumerate_q_local_basis,
    operator_norm,
    pauli_images,
    q_local_gram,
    region_sites,
)
from revlab.settings import get_settings, rng_for
from revlab.spectral import GroundSolution, energy_distribution, ground_state, tail_weight
from revlab.states import StateVector, inner

ReverseMethod = Literal["chebyshev", "optimal_lsq"]
IMAGE_CHUNK = 4096


class DisturbanceSpec(BaseModel):
    """A local disturbance ``Gamma_L`` with its region, norm and ground-state overlap."""

    model_config = ConfigDict(frozen=True)

    gamma: LocalOperator
    region: frozenset[int]
    norm: float
    overlap: complex  # <Omega|Gamma_L|Omega>

    @model_validator(mode="after")
    def _check_region(self) -> DisturbanceSpec:
        if not self.region:
            raise ValueError("disturbance region must contain at least one site")
        if not self.gamma.support <= self.region:
            raise ValueError(f"support {sorted(self.gamma.support)} leaves region {sorted(self.region)}")
        return self

    @property
    def L_size(self) -> int:
        return len(self.region)


def make_disturbance(gamma: LocalOperator, omega: StateVector, region: Iterable[int] | None = None) -> DisturbanceSpec:
    """Attach region, norm and overlap to ``gamma``.

    The region defaults to the support of ``gamma`` (site 0 for the identity). The norm is exact
    when the support fits the dense limit and the triangle bound otherwise.
    """
    sites = frozenset(region) if region is not None else (gamma.support or frozenset({0}))
    mode = "exact" if len(gamma.support) <= MAX_EXACT_NORM_SITES else "triangle"
    return DisturbanceSpec(
        gamma=gamma,
        region=sites,
        norm=operator_norm(gamma, mode),
        overlap=gamma.expectation(omega),
    )


def local_projector(n_sites: int, sites: Iterable[int], letter: str = "Z", outcome: int = 1) -> LocalOperator:
    """``prod_s (I + outcome * sigma_s) / 2``: projector on a joint single-site outcome.

    With the defaults this is ``|0...0><0...0|`` on ``sites``.
    """
    if outcome not in (1, -1):
        raise ArgumentError(f"outcome must be +1 or -1, got {outcome}")
    projector = LocalOperator.identity(n_sites)
    for site in sorted(set(sites)):
        factor = LocalOperator.from_terms(
            n_sites,
            [(0.5, PauliString.identity(n_sites)), (0.5 * outcome, PauliString.from_letters(n_sites, {site: letter}))],
        )
        projector = projector @ factor
    return projector


def pauli_disturbance(n_sites: int, letters: dict[int, str]) -> LocalOperator:
    return LocalOperator.from_pauli(PauliString.from_letters(n_sites, letters))


class ReverseResult(BaseModel):
    """Outcome of one reverse-operator construction."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    q: int
    n0: int | None = None
    residual: float
    rhs_bound: float | None = None
    method: ReverseMethod
    basis_size: int | None = None
    coefficients: np.ndarray | None = None
    params: FilterParams | None = None
    overlap_abs: float | None = None

    @model_validator(mode="after")
    def _check_residual(self) -> ReverseResult:
        if self.residual < 0.0 or not math.isfinite(self.residual):
            raise ValueError(f"residual must be finite and non-negative, got {self.residual}")
        return self

    @property
    def margin(self) -> float | None:
        return None if self.rhs_bound is None else self.rhs_bound - self.residual

    @property
    def holds(self) -> bool | None:
        return None if self.rhs_bound is None else self.residual <= self.rhs_bound


def theorem_bound_rhs(params: FilterParams, norm_gamma: float, overlap: complex, overlap_floor: float | None = None) -> float:
    """``6 ||Gamma_L|| / |<Omega|Gamma_L|Omega>| * exp(-2 n0 / xi)``.

    Raises:
        VacuousBoundError: If the overlap magnitude is at or below the floor
    """
    floor = get_settings().overlap_floor if overlap_floor is None else overlap_floor
    if abs(overlap) <= floor:
        raise VacuousBoundError(f"|<Omega|Gamma|Omega>| = {abs(overlap):.3g} is below the floor {floor:g}")
    return 6.0 * norm_gamma / abs(overlap) * params.suppression


def _unique_solution(spec: HamiltonianSpec, solution: GroundSolution | None) -> GroundSolution:
    solution = solution or ground_state(spec)
    if not solution.unique:
        raise DegenerateGroundStateError(f"{spec.name} has a {solution.degeneracy}-fold ground space")
    return solution


def chebyshev_reverse(
    spec: HamiltonianSpec,
    omega: StateVector,
    disturbance: DisturbanceSpec,
    q: int,
    solution: GroundSolution | None = None,
) -> ReverseResult:
    """Apply ``R = F_R(H) / <Omega|Gamma_L|Omega>`` to ``Gamma_L|Omega>`` and compare with the bound.

    Args:
        spec: Unshifted model
        omega: Its unique ground state
        disturbance: The disturbance and its region
        q: Maximal locality; the filter degree is ``q // k``
        solution: Ground solution of ``spec``, computed when omitted

    Returns:
        Residual ``||R Gamma_L|Omega> - |Omega>||`` next to its analytic bound

    Raises:
        DegenerateGroundStateError: If the ground state is not unique
        VacuousBoundError: If the overlap is below the floor
    """
    solution = _unique_solution(spec, solution)
    if omega.representation != "full":
        raise UnsupportedRepresentationError("local disturbances need the full representation")
    params = filter_params(q, spec.k, spec.g, disturbance.L_size, solution.gap)
    rhs = theorem_bound_rhs(params, disturbance.norm, disturbance.overlap)
    damaged = apply_local_operator(disturbance.gamma, omega)
    restored = apply_filter(params, spec.shifted(solution.energy_shift), damaged) / disturbance.overlap
    residual = (restored - omega).norm()
    logger.debug(f"{spec.name} q={q} n0={params.n0}: residual {residual:.3e} vs bound {rhs:.3e}")
    return ReverseResult(
        q=q,
        n0=params.n0,
        residual=residual,
        rhs_bound=rhs,
        method="chebyshev",
        params=params,
        overlap_abs=abs(disturbance.overlap),
    )


def _pseudo_inverse_apply(gram: NDArray[Any], rhs: NDArray[Any], cutoff: float) -> NDArray[Any]:
    values, vectors = sla.eigh(gram)
    keep = values > cutoff * max(values[-1], 0.0)
    if not np.any(keep):
        return np.zeros_like(rhs)
    kept = vectors[:, keep]
    return kept @ ((kept.conj().T @ rhs) / values[keep])


def optimal_local_reverse(
    omega_target: StateVector,
    phi_input: StateVector,
    q: int,
    region: Iterable[int] | None = None,
    symmetry_generators: Sequence[PauliString] | None = None,
    with_coefficients: bool = False,
) -> ReverseResult:
    """Least-squares minimum of ``||sum_P c_P P|phi> - |Omega>||`` over q-local Pauli strings.

    The Gram matrix is formed on the smaller side: ``B^H B`` over coefficients when the basis is
    smaller than the Hilbert space, otherwise ``B B^H`` over states. Without a symmetry filter the
    state-side Gram comes from :func:`q_local_gram` and the basis is never enumerated; with one it
    is accumulated in chunks. Both are pseudo-inverted with the relative eigenvalue cutoff from
    settings.

    Args:
        omega_target: State to restore
        phi_input: Damaged state the operator acts on
        q: Maximal support size of the basis strings
        region: Restrict supports to these sites
        symmetry_generators: Keep only strings commuting with every generator
        with_coefficients: Also return the minimum-norm coefficient vector

    Returns:
        The global minimum residual over the chosen operator class

    Raises:
        UnsupportedRepresentationError: For collective-spin states
        DimensionError: If the states differ in size
        DimensionLimitError: If the basis or the linear solve exceeds the limits
    """
    if omega_target.representation != "full" or phi_input.representation != "full":
        raise UnsupportedRepresentationError("least-squares reverse needs the full representation")
    if omega_target.n_sites != phi_input.n_sites:
        raise DimensionError(f"target on {omega_target.n_sites} sites, input on {phi_input.n_sites}")
    settings = get_settings()
    n, dim = phi_input.n_sites, phi_input.dim
    if q < 0:
        raise ArgumentError(f"q must be non-negative, got {q}")
    sites = region_sites(n, region)
    generators = list(symmetry_generators or ())
    basis: list[PauliString] | None = None
    size = basis_count(len(sites), q)
    if generators or size <= dim:
        basis = enumerate_q_local_basis(n, q, region=sites, symmetry_filter=generators)
        size = len(basis)
    if min(size, dim) > settings.max_solve_dim:
        raise DimensionLimitError(f"least squares of size {min(size, dim)} exceeds {settings.max_solve_dim}")
    target = omega_target.amplitudes
    coefficients: NDArray[np.complex128] | None = None
    if basis is not None and size <= dim:
        images = pauli_images(basis, phi_input)
        solution = _pseudo_inverse_apply(images.conj().T @ images, images.conj().T @ target, settings.pinv_cutoff)
        residual = float(np.linalg.norm(images @ solution - target))
        coefficients = solution
    else:
        if basis is None:
            gram = q_local_gram(phi_input, q, region=sites)
        else:
            gram = np.zeros((dim, dim), dtype=np.complex128)
            for start in range(0, size, IMAGE_CHUNK):
                chunk = pauli_images(basis[start : start + IMAGE_CHUNK], phi_input)
                gram += chunk @ chunk.conj().T
        weights = _pseudo_inverse_apply(gram, target, settings.pinv_cutoff)
        projected = gram @ weights
        residual = float(np.linalg.norm(target - projected))
        if with_coefficients:
            if basis is None:
                basis = enumerate_q_local_basis(n, q, region=sites)
            coefficients = np.concatenate(
                [
                    pauli_images(basis[start : start + IMAGE_CHUNK], phi_input).conj().T @ weights
                    for start in range(0, size, IMAGE_CHUNK)
                ]
            )
    logger.debug(f"optimal reverse q={q}: {size} strings, dim {dim}, residual {residual:.3e}")
    return ReverseResult(
        q=q,
        residual=residual,
        method="optimal_lsq",
        basis_size=size,
        coefficients=coefficients if with_coefficients else None,
    )


class TailPoint(BaseModel):
    energy: float
    tail: float  # ||Pi_{>=E} Gamma|Omega>||^2
    bound: float
    margin: float


class EnergyTailReport(BaseModel):
    """Squared tail weights of a disturbed ground state against the exponential envelope."""

    points: list[TailPoint]
    worst_margin: float
    holds: bool


def energy_tail_check(
    spec: HamiltonianSpec,
    omega: StateVector,
    disturbance: DisturbanceSpec,
) -> EnergyTailReport:
    """Check ``||Pi_{>=E} Gamma|Omega>||^2 <= ||Gamma||^2 exp(-(E - 2g|L|) / (4gk))`` at every level.

    Raises:
        DimensionLimitError: Beyond the dense site limit
    """
    damaged = apply_local_operator(disturbance.gamma, omega)
    dist = energy_distribution(spec, damaged)
    threshold = 2.0 * spec.g * disturbance.L_size
    points = []
    for energy in dist.energies:
        tail = tail_weight(dist, energy)
        bound = disturbance.norm**2 * math.exp(-(energy - threshold) / (4.0 * spec.g * spec.k))
        points.append(TailPoint(energy=energy, tail=tail, bound=bound, margin=bound - tail))
    worst = min(p.margin for p in points)
    return EnergyTailReport(points=points, worst_margin=worst, holds=all(p.tail <= p.bound * (1.0 + 1e-12) for p in points))


class MacroscopicityReport(BaseModel):
    """Decomposition ``psi = alpha psi_a + beta psi_b`` and the reverse-operator witness."""

    alpha: float
    beta: float
    q: int
    method: ReverseMethod
    delta_prime_norm: float  # ||R P psi - psi||
    delta_norm: float  # ||psi_b - O psi_a|| with O = alpha (R - I) / beta
    delta_sq_scaled: float  # ||delta'||^2 / beta
    bound: float | None = None  # f / (alpha^2 beta), f = 6 exp(-2 n0 / xi)
    within_bound: bool | None = None


def macroscopicity_witness(
    psi: StateVector,
    projector: LocalOperator,
    q: int,
    spec: HamiltonianSpec | None = None,
    solution: GroundSolution | None = None,
    region: Iterable[int] | None = None,
    symmetry_generators: Sequence[PauliString] | None = None,
) -> MacroscopicityReport:
    """Measure how well a q-local operator maps the branch ``P psi`` back onto ``psi``.

    With a Hamiltonian the reverse operator is the Chebyshev filter and the report carries the
    bound ``f / (alpha^2 beta)``; without one it is the optimal least-squares operator and no bound
    is attached.

    Raises:
        NotAProjectorError: If ``P^2 psi != P psi`` to 1e-10
        DegenerateDecompositionError: If alpha or beta is below 1e-6
    """
    branch = apply_local_operator(projector, psi)
    if (apply_local_operator(projector, branch) - branch).norm() > 1e-10 or not projector.is_hermitian():
        raise NotAProjectorError("operator is not an orthogonal projector on this state")
    alpha = branch.norm()
    beta = (psi - branch).norm()
    if alpha < 1e-6 or beta < 1e-6:
        raise DegenerateDecompositionError(f"alpha={alpha:.3g}, beta={beta:.3g}")
    bound: float | None = None
    if spec is not None:
        solution = _unique_solution(spec, solution)
        region_size = len(projector.support) or 1
        params = filter_params(q, spec.k, spec.g, region_size, solution.gap)
        overlap = inner(psi, branch)
        restored = apply_filter(params, spec.shifted(solution.energy_shift), branch) / overlap
        delta_prime = (restored - psi).norm()
        bound = 6.0 * params.suppression / (alpha**2 * beta)
        method: ReverseMethod = "chebyshev"
    else:
        result = optimal_local_reverse(psi, branch, q, region=region, symmetry_generators=symmetry_generators)
        delta_prime = result.residual
        method = "optimal_lsq"
    scaled = delta_prime**2 / beta
    return MacroscopicityReport(
        alpha=alpha,
        beta=beta,
        q=q,
        method=method,
        delta_prime_norm=delta_prime,
        delta_norm=delta_prime / beta,
        delta_sq_scaled=scaled,
        bound=bound,
        within_bound=None if bound is None else scaled <= bound,
    )


class IndistinguishabilityReport(BaseModel):
    """Matrix elements of local Pauli strings between ground states."""

    checked: int
    violations: int
    worst_diagonal_spread: float
    worst_off_diagonal: float
    violating_labels: list[str]

    @property
    def passed(self) -> bool:
        return self.violations == 0


def topo_indistinguishability_check(
    ground_states: Sequence[StateVector],
    support_cutoff: int,
    samples: int | None = None,
    seed: int = 0,
    symmetry_generators: Sequence[PauliString] | None = None,
    tol: float = 1e-8,
) -> IndistinguishabilityReport:
    """Check equal diagonal and vanishing off-diagonal elements ``<Omega_a|o_X|Omega_b>`` for ``|X| <= cutoff``.

    Args:
        ground_states: At least two orthonormal ground states
        support_cutoff: Largest support of the tested strings
        samples: Test a seeded random subset of this size instead of every string
        seed: Sampling seed
        symmetry_generators: Only test strings commuting with these generators
        tol: Allowed deviation

    Returns:
        Counts and worst deviations; violations are reported, not raised
    """
    if len(ground_states) < 2:
        raise ArgumentError("indistinguishability needs at least two ground states")
    n = ground_states[0].n_sites
    strings = [p for p in enumerate_q_local_basis(n, support_cutoff, symmetry_filter=symmetry_generators) if p.weight]
    if samples is not None and samples < len(strings):
        chosen = np.sort(rng_for(seed).choice(len(strings), size=samples, replace=False))
        strings = [strings[i] for i in chosen]
    frame = np.column_stack([psi.amplitudes for psi in ground_states])
    worst_diag = 0.0
    worst_off = 0.0
    violating: list[str] = []
    for pauli in strings:
        images = np.column_stack([pauli_images([pauli], psi)[:, 0] for psi in ground_states])
        elements = frame.conj().T @ images
        diagonal = np.diag(elements)
        spread = float(np.max(np.abs(diagonal - diagonal[0])))
        off = float(np.max(np.abs(elements - np.diag(diagonal))))
        worst_diag = max(worst_diag, spread)
        worst_off = max(worst_off, off)
        if spread > tol or off > tol:
            violating.append(pauli.label)
    if violating:
        logger.warning(f"{len(violating)} of {len(strings)} local strings distinguish the ground states")
    return IndistinguishabilityReport(
        checked=len(strings),
        violations=len(violating),
        worst_diagonal_spread=worst_diag,
        worst_off_diagonal=worst_off,
        violating_labels=violating[:20],
    )

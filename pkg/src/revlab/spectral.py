"""Ground states, gaps, spectra and energy-resolved weights of states."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Literal

import numpy as np
import pandas as pd
import scipy.linalg as sla
from loguru import logger
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from revlab.errors import DimensionError, DimensionLimitError, NotConvergedError
from revlab.models import HamiltonianSpec
from revlab.operators import apply_local_operator
from revlab.settings import get_settings, rng_for
from revlab.states import StateVector

Solver = Literal["dense", "iterative", "banded"]
ENERGY_BIN = 1e-9
CSV_FLOAT_FORMAT = "%.17g"


class GroundSolution(BaseModel):
    """Lowest eigenpairs of a Hamiltonian, energies relative to the ground energy."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    energy_shift: float  # original E0
    ground_states: tuple[StateVector, ...]
    gap: float  # inf when no level lies above the ground group
    degeneracy: int
    solver: Solver
    low_energies: tuple[float, ...] = ()  # shifted, ascending

    @property
    def ground_state(self) -> StateVector:
        return self.ground_states[0]

    @property
    def unique(self) -> bool:
        return self.degeneracy == 1


class EnergyDistribution(BaseModel):
    """Weights ``|<E_k|phi>|^2`` on distinct shifted energies, ascending."""

    model_config = ConfigDict(frozen=True)

    energies: tuple[float, ...]
    weights: tuple[float, ...]

    @model_validator(mode="after")
    def _check_sorted(self) -> EnergyDistribution:
        if len(self.energies) != len(self.weights):
            raise ValueError("energies and weights differ in length")
        if any(b < a for a, b in zip(self.energies, self.energies[1:], strict=False)):
            raise ValueError("energies must be ascending")
        if any(w < 0.0 for w in self.weights):
            raise ValueError("weights must be non-negative")
        return self

    @property
    def total_weight(self) -> float:
        return float(sum(self.weights))


def apply_hamiltonian(spec: HamiltonianSpec, psi: StateVector) -> StateVector:
    """``(H - energy_shift)|psi>`` matrix-free, or by banded multiply in the collective sector.

    Raises:
        DimensionError: If the state does not match the model
    """
    if psi.n_sites != spec.n_sites or psi.representation != spec.representation:
        raise DimensionError(
            f"{psi.representation} state on {psi.n_sites} sites vs {spec.representation} model on {spec.n_sites}"
        )
    if spec.representation == "collective_spin":
        out = spec.sector_matrix() @ psi.amplitudes
    else:
        out = apply_local_operator(spec.pauli_terms, psi).amplitudes
    if spec.energy_shift:
        out = out - spec.energy_shift * psi.amplitudes
    return psi.with_amplitudes(out)


def energy_expectation(spec: HamiltonianSpec, psi: StateVector) -> float:
    return float(np.vdot(psi.amplitudes, apply_hamiltonian(spec, psi).amplitudes).real)


def _degeneracy_tol(spec: HamiltonianSpec, degeneracy_tol: float | None) -> float:
    if degeneracy_tol is not None:
        return degeneracy_tol
    return get_settings().degeneracy_rtol * max(1.0, spec.triangle_norm())


def _dense_matrix(spec: HamiltonianSpec) -> NDArray[Any]:
    if spec.representation == "collective_spin":
        return spec.sector_matrix().toarray()
    max_sites = get_settings().max_dense_sites
    if spec.n_sites > max_sites:
        raise DimensionLimitError(f"dense solve on {spec.n_sites} sites exceeds {max_sites}")
    terms = spec.pauli_terms
    matrix = terms.to_sparse().toarray()
    return matrix.real if terms.is_real() else matrix


def dense_eigensystem(spec: HamiltonianSpec) -> tuple[NDArray[np.float64], NDArray[Any]]:
    """Full eigendecomposition of the unshifted Hamiltonian.

    Raises:
        DimensionLimitError: Beyond the dense site limit
    """
    energies, vectors = sla.eigh(_dense_matrix(spec))
    return energies, vectors


def _group(energies: NDArray[np.float64], tol: float) -> tuple[int, float]:
    degeneracy = int(np.count_nonzero(energies - energies[0] <= tol))
    gap = float(energies[degeneracy] - energies[0]) if degeneracy < len(energies) else math.inf
    return degeneracy, gap


def _solution(
    spec: HamiltonianSpec,
    energies: NDArray[np.float64],
    vectors: NDArray[Any],
    tol: float,
    solver: Solver,
) -> GroundSolution:
    degeneracy, gap = _group(energies, tol)
    block = vectors[:, :degeneracy]
    if solver == "iterative" and degeneracy > 1:
        block, _ = np.linalg.qr(block)
    states = tuple(
        StateVector(n_sites=spec.n_sites, amplitudes=block[:, i], representation=spec.representation)
        for i in range(degeneracy)
    )
    e0 = float(energies[0])
    logger.debug(f"{spec.name}: E0={e0:.12g} degeneracy={degeneracy} gap={gap:.12g} via {solver}")
    return GroundSolution(
        energy_shift=e0,
        ground_states=states,
        gap=gap,
        degeneracy=degeneracy,
        solver=solver,
        low_energies=tuple(float(e - e0) for e in energies),
    )


def _banded_solve(spec: HamiltonianSpec, tol: float) -> GroundSolution:
    assert spec.band is not None
    dim = spec.n_sites + 1
    if dim > get_settings().max_sector_dim:
        raise DimensionLimitError(f"sector dimension {dim} exceeds {get_settings().max_sector_dim}")
    count = min(dim, 8)
    while True:
        energies, vectors = sla.eig_banded(spec.band, lower=False, select="i", select_range=(0, count - 1))
        degeneracy, _ = _group(energies, tol)
        if degeneracy < count or count == dim:
            return _solution(spec, energies, vectors, tol, "banded")
        count = min(dim, 2 * count)


def _iterative_solve(spec: HamiltonianSpec, tol: float, seed: int) -> GroundSolution:
    settings = get_settings()
    if spec.n_sites > settings.max_iterative_sites:
        raise DimensionLimitError(f"Lanczos on {spec.n_sites} sites exceeds {settings.max_iterative_sites}")
    terms = spec.pauli_terms
    dim = 2**spec.n_sites
    real = terms.is_real()
    dtype = np.float64 if real else np.complex128

    def matvec(x: NDArray[Any]) -> NDArray[Any]:
        psi = StateVector(n_sites=spec.n_sites, amplitudes=np.ravel(x))
        out = apply_local_operator(terms, psi).amplitudes
        return out.real if real else out

    operator = LinearOperator((dim, dim), matvec=matvec, dtype=dtype)
    start = rng_for(seed).normal(size=dim).astype(dtype)
    block = min(6, dim - 2)
    while True:
        try:
            energies, vectors = eigsh(
                operator, k=block, which="SA", v0=start, tol=settings.lanczos_tol, maxiter=settings.lanczos_maxiter
            )
        except ArpackNoConvergence as exc:
            raise NotConvergedError(f"Lanczos stalled on {spec.name} ({spec.n_sites} sites, block {block})") from exc
        order = np.argsort(energies)
        energies, vectors = energies[order], vectors[:, order]
        degeneracy, _ = _group(energies, tol)
        if degeneracy < block or block >= dim - 2:
            return _solution(spec, energies, vectors, tol, "iterative")
        logger.debug(f"{spec.name}: ground group fills block {block}, growing")
        block = min(dim - 2, 2 * block)


def ground_state(
    spec: HamiltonianSpec,
    degeneracy_tol: float | None = None,
    max_dense_sites: int | None = None,
    solver: Solver | None = None,
    seed: int = 0,
) -> GroundSolution:
    """Lowest eigenpair(s), degeneracy and gap of ``spec`` (its ``energy_shift`` is ignored).

    Args:
        spec: The model
        degeneracy_tol: Energies within this distance of E0 count as ground states
            (default ``degeneracy_rtol * max(1, ||H||_triangle)``)
        max_dense_sites: Use dense ``eigh`` up to this many sites (default from settings)
        solver: Force a solver instead of choosing by size
        seed: Seed of the random Lanczos start vector

    Returns:
        The ground solution, energies measured from E0

    Raises:
        DimensionLimitError: If no solver accepts the size
        NotConvergedError: If Lanczos stagnates
    """
    tol = _degeneracy_tol(spec, degeneracy_tol)
    if spec.representation == "collective_spin":
        return _banded_solve(spec, tol)
    dense_limit = get_settings().max_dense_sites if max_dense_sites is None else max_dense_sites
    chosen = solver or ("dense" if spec.n_sites <= dense_limit else "iterative")
    if chosen == "dense":
        energies, vectors = dense_eigensystem(spec)
        return _solution(spec, energies, vectors, tol, "dense")
    return _iterative_solve(spec, tol, seed)


def full_spectrum(spec: HamiltonianSpec) -> list[float]:
    """All eigenvalues, ascending and shifted so the minimum is 0.

    Raises:
        DimensionLimitError: Beyond the dense site limit
    """
    energies = sla.eigvalsh(_dense_matrix(spec))
    return [float(e - energies[0]) for e in energies]


def _bin_energies(energies: NDArray[np.float64], weights: NDArray[np.float64]) -> EnergyDistribution:
    binned_e: list[float] = []
    binned_w: list[float] = []
    anchor = -math.inf
    for energy, weight in zip(energies, weights, strict=True):
        if energy - anchor > ENERGY_BIN:
            anchor = float(energy)
            binned_e.append(max(anchor, 0.0))
            binned_w.append(float(weight))
        else:
            binned_w[-1] += float(weight)
    return EnergyDistribution(energies=tuple(binned_e), weights=tuple(binned_w))


def energy_distribution(spec: HamiltonianSpec, phi: StateVector) -> EnergyDistribution:
    """Weights of ``phi`` on the eigenspaces of ``spec``, energies shifted so E0 = 0.

    Raises:
        DimensionError: If the state does not match the model
        DimensionLimitError: Beyond the dense site limit
    """
    if phi.n_sites != spec.n_sites or phi.representation != spec.representation:
        raise DimensionError("state and model disagree on size or representation")
    energies, vectors = dense_eigensystem(spec)
    weights = np.abs(vectors.conj().T @ phi.amplitudes) ** 2
    return _bin_energies(energies - energies[0], weights)


def tail_weight(dist: EnergyDistribution, energy: float) -> float:
    """``||Pi_{>= E} phi||^2``: summed weight on energies at or above ``energy``."""
    return float(sum(w for e, w in zip(dist.energies, dist.weights, strict=True) if e >= energy - ENERGY_BIN))


def spectrum_frame(energies: list[float], weights: list[float] | None = None) -> pd.DataFrame:
    """Export table with columns (index, energy, weight)."""
    return pd.DataFrame(
        {
            "index": np.arange(len(energies)),
            "energy": energies,
            "weight": weights if weights is not None else np.ones(len(energies)),
        }
    )


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    """Write with '.' decimals and 17 significant digits."""
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    return path

"""Reduced density matrices and the quality of the mean-field product approximation."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from typing import Any

import numpy as np
import pandas as pd
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from revlab.errors import ArgumentError, UnsupportedRepresentationError
from revlab.labs.fluctuation import AdditiveOperator, additive_variance_direct
from revlab.models import HamiltonianSpec
from revlab.spectral import GroundSolution, ground_state
from revlab.states import StateVector

_PLUS = np.array([1.0, 1.0]) / math.sqrt(2.0)
_MINUS = np.array([1.0, -1.0]) / math.sqrt(2.0)
_PLUS_I = np.array([1.0, 1.0j]) / math.sqrt(2.0)
_MINUS_I = np.array([1.0, -1.0j]) / math.sqrt(2.0)

# |0>, |1>, |+>, |->
QUBIT_PROJECTORS: tuple[NDArray[np.complex128], ...] = tuple(
    np.outer(v, np.conj(v)).astype(np.complex128) for v in (np.array([1.0, 0.0]), np.array([0.0, 1.0]), _PLUS, _MINUS)
)
# adds |+i>, |-i>
QUBIT_PROJECTORS_COMPLETE: tuple[NDArray[np.complex128], ...] = QUBIT_PROJECTORS + tuple(
    np.outer(v, np.conj(v)) for v in (_PLUS_I, _MINUS_I)
)


class ReducedDensity(BaseModel):
    """Marginal of one or two sites; the first listed site is the most significant index."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sites: tuple[int, ...]
    matrix: np.ndarray

    @field_validator("matrix", mode="before")
    @classmethod
    def _as_complex(cls, value: Any) -> NDArray[np.complex128]:
        matrix = np.array(value, dtype=np.complex128)
        matrix.setflags(write=False)
        return matrix

    @model_validator(mode="after")
    def _check_density(self) -> ReducedDensity:
        dim = 2 ** len(self.sites)
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"{len(self.sites)}-site marginal must be {dim}x{dim}")
        if not np.allclose(self.matrix, self.matrix.conj().T, atol=1e-10):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(self.matrix).real - 1.0) > 1e-10:
            raise ValueError("density matrix trace differs from 1")
        if np.linalg.eigvalsh(self.matrix)[0] < -1e-10:
            raise ValueError("density matrix is not positive semidefinite")
        return self

    def trace_out(self, site: int) -> ReducedDensity:
        """Partial trace over one of two sites."""
        if len(self.sites) != 2 or site not in self.sites:
            raise ArgumentError(f"cannot trace site {site} out of {self.sites}")
        tensor = self.matrix.reshape(2, 2, 2, 2)
        if site == self.sites[0]:
            reduced = np.einsum("abad->bd", tensor)
        else:
            reduced = np.einsum("abcb->ac", tensor)
        kept = tuple(s for s in self.sites if s != site)
        return ReducedDensity(sites=kept, matrix=reduced)


def reduced_density(psi: StateVector, sites: Sequence[int]) -> ReducedDensity:
    """Partial trace of ``|psi><psi|`` over every site not listed.

    Raises:
        ArgumentError: On more than two sites, repeats or sites outside the system
        UnsupportedRepresentationError: For collective-spin states
    """
    if psi.representation != "full":
        raise UnsupportedRepresentationError("reduced densities need the full representation")
    kept = tuple(sites)
    n = psi.n_sites
    if not 1 <= len(kept) <= 2 or len(set(kept)) != len(kept) or any(not 0 <= s < n for s in kept):
        raise ArgumentError(f"need one or two distinct sites in 0..{n - 1}, got {kept}")
    tensor = psi.normalized().amplitudes.reshape((2,) * n)
    axes = [n - 1 - s for s in kept]
    tensor = np.moveaxis(tensor, axes, list(range(len(kept)))).reshape(2 ** len(kept), -1)
    return ReducedDensity(sites=kept, matrix=tensor @ tensor.conj().T)


def _deviation(psi: StateVector, i: int, j: int) -> NDArray[np.complex128]:
    pair = reduced_density(psi, (i, j))
    return pair.matrix - np.kron(pair.trace_out(j).matrix, pair.trace_out(i).matrix)


def _trace_norm(matrix: NDArray[Any]) -> float:
    return float(np.sum(np.abs(np.linalg.eigvalsh(matrix))))


def _additive_witness(
    psi: StateVector, i: int, sites: Sequence[int], projector: NDArray[np.complex128]
) -> tuple[AdditiveOperator, float, float]:
    """Signed rank-1 additive operator ``A^(m) = sum_j s_j P_j`` for one projector on site ``i``.

    Returns:
        ``A^(m)``, the pinched deviation sum ``sum_j ||P (rho_ij - rho_i rho_j) P||`` (which equals
        ``<P A> - <P><A>``), and ``||P psi|| * Delta A^(m)``
    """
    matrices = []
    pinched = 0.0
    for j in sites:
        pair = reduced_density(psi, (i, j))
        rho_j = pair.trace_out(i).matrix
        weight = float(np.trace(projector @ pair.trace_out(j).matrix).real)
        # Tr_i (P rho_ij P) with i the most significant index
        conditioned = np.einsum("ab,bcde,ea->cd", projector, pair.matrix.reshape(2, 2, 2, 2), projector)
        difference = conditioned - weight * rho_j
        eigenvalues, eigenvectors = np.linalg.eigh(difference)
        top = int(np.argmax(np.abs(eigenvalues)))
        sign = 1.0 if eigenvalues[top] >= 0.0 else -1.0
        matrices.append(sign * np.outer(eigenvectors[:, top], eigenvectors[:, top].conj()))
        pinched += abs(float(eigenvalues[top]))
    witness = AdditiveOperator(n_sites=psi.n_sites, sites=tuple(sites), matrices=tuple(matrices), label="A^(m)")
    branch_weight = float(np.trace(projector @ reduced_density(psi, (i,)).matrix).real)
    spread = math.sqrt(max(additive_variance_direct(witness, psi), 0.0))
    return witness, pinched, math.sqrt(max(branch_weight, 0.0)) * spread


class MeanFieldDeviation(BaseModel):
    """``||rho_ij - rho_i rho_j||`` for every ``j`` in L and their sum."""

    i: int
    sites: list[int]
    norms: list[float]
    trace_norms: list[float]
    total: float
    scale: float | None = None  # sqrt(|L| / dE)
    witness_bound: float  # sum over the four projectors of ||P psi|| Delta A^(m)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"i": self.i, "j": self.sites, "deviation_norm": self.norms})


def mf_deviation_sum(psi: StateVector, i: int, L: Iterable[int], delta_e: float | None = None) -> MeanFieldDeviation:
    """Operator norms of the two-site deviations from the product of marginals, summed over ``L``.

    Raises:
        ArgumentError: If ``i`` lies in ``L`` or ``L`` is empty
    """
    sites = sorted(set(L))
    if i in sites:
        raise ArgumentError(f"site {i} must lie outside L")
    if not sites:
        raise ArgumentError("L must contain at least one site")
    deviations = [_deviation(psi, i, j) for j in sites]
    norms = [float(np.linalg.norm(d, ord=2)) for d in deviations]
    witness = sum(_additive_witness(psi, i, sites, projector)[2] for projector in QUBIT_PROJECTORS)
    return MeanFieldDeviation(
        i=i,
        sites=sites,
        norms=norms,
        trace_norms=[_trace_norm(d) for d in deviations],
        total=float(sum(norms)),
        scale=math.sqrt(len(sites) / delta_e) if delta_e else None,
        witness_bound=witness,
    )


def _pinched_sum(deviation: NDArray[np.complex128], projectors: Sequence[NDArray[np.complex128]]) -> float:
    total = 0.0
    for projector in projectors:
        lifted = np.kron(projector, np.eye(2))
        total += float(np.linalg.norm(lifted @ deviation @ lifted, ord=2))
    return total


class ProjectorDecompositionReport(BaseModel):
    """``||delta rho_ij||`` against its pinched sums over projectors on site ``i``."""

    lhs: float
    rhs: float  # |0>, |1>, |+>, |->
    rhs_complete: float  # adds |+i>, |-i>
    holds: bool
    holds_complete: bool


def projector_decomposition_check(psi: StateVector, i: int, j: int) -> ProjectorDecompositionReport:
    """Compare ``||delta rho_ij||`` with ``sum_m ||P_m delta rho_ij P_m||``.

    The four projectors onto ``|0>, |1>, |+>, |->`` see the ``Z`` and ``X`` components of the
    deviation on site ``i`` but not its ``Y`` component, so a ``Y Y`` correlated marginal can exceed
    their sum. Adding ``|+i>, |-i>`` covers all three and the inequality always holds.
    """
    deviation = _deviation(psi, i, j)
    lhs = float(np.linalg.norm(deviation, ord=2))
    rhs = _pinched_sum(deviation, QUBIT_PROJECTORS)
    complete = _pinched_sum(deviation, QUBIT_PROJECTORS_COMPLETE)
    slack = 1e-12
    return ProjectorDecompositionReport(
        lhs=lhs, rhs=rhs, rhs_complete=complete, holds=lhs <= rhs + slack, holds_complete=lhs <= complete + slack
    )


class BondError(BaseModel):
    j: int
    exact: float
    mean_field: float
    error: float


class EnergyDensityReport(BaseModel):
    """Exact and mean-field bond energies around one site."""

    site: int
    coordination: int
    bonds: list[BondError]
    mean_bond_error: float
    averaged_error: float  # |mean MF bond energy - mean exact bond energy|
    scale: float | None = None  # 1 / sqrt(Z dE)


def energy_density_mf_error(
    spec: HamiltonianSpec,
    site: int = 0,
    solution: GroundSolution | None = None,
) -> EnergyDensityReport:
    """Compare ``<h_ij>`` with ``Tr[(rho_i rho_j) h_ij]`` over the bonds of ``site``.

    Raises:
        ArgumentError: If the model has terms on more than two sites
    """
    if spec.k > 2:
        raise ArgumentError(f"{spec.name} has {spec.k}-body terms; mean-field bonds need k <= 2")
    solution = solution or ground_state(spec)
    omega = solution.ground_state
    bonds = []
    for a, b in spec.bonds():
        if site not in (a, b):
            continue
        other = b if a == site else a
        local, _ = spec.bond_operator(a, b).restricted()
        matrix = local.to_dense()
        # restricted() puts the larger site on the most significant bit
        pair = reduced_density(omega, (b, a))
        product = np.kron(pair.trace_out(a).matrix, pair.trace_out(b).matrix)
        exact = float(np.trace(pair.matrix @ matrix).real)
        mean_field = float(np.trace(product @ matrix).real)
        bonds.append(BondError(j=other, exact=exact, mean_field=mean_field, error=abs(mean_field - exact)))
    coordination = len(bonds)
    if not bonds:
        return EnergyDensityReport(site=site, coordination=0, bonds=[], mean_bond_error=0.0, averaged_error=0.0)
    return EnergyDensityReport(
        site=site,
        coordination=coordination,
        bonds=bonds,
        mean_bond_error=float(np.mean([bond.error for bond in bonds])),
        averaged_error=abs(float(np.mean([bond.mean_field - bond.exact for bond in bonds]))),
        scale=1.0 / math.sqrt(coordination * solution.gap) if math.isfinite(solution.gap) else None,
    )

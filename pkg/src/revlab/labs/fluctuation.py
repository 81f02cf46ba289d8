"""Statistics of additive operators: spectral measures, tails, fluctuations and collective scaling."""

from __future__ import annotations

import math
from collections.abc import Sequence
from typing import Any, Literal

import numpy as np
import pandas as pd
import scipy.linalg as sla
import scipy.sparse as sp
from loguru import logger
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, computed_field, field_validator, model_validator
from scipy.optimize import brentq
from scipy.stats import linregress

from revlab.chebyshev import filter_params
from revlab.errors import (
    ArgumentError,
    DegenerateGroundStateError,
    UnsupportedRepresentationError,
)
from revlab.models import HamiltonianSpec, build_lmg_sector
from revlab.operators import (
    SINGLE_SITE_PAULIS,
    LocalOperator,
    PauliString,
    apply_local_operator,
    enumerate_q_local_basis,
    pauli_images,
)
from revlab.settings import rng_for
from revlab.spectral import ENERGY_BIN, GroundSolution, ground_state
from revlab.states import StateVector

Direction = Literal[">=", "<="]
TAIL_FIT_WINDOW = (1e-8, 0.1)


class AdditiveOperator(BaseModel):
    """``A_L = sum_{i in L} a_i`` with single-site Hermitian ``a_i`` of norm at most 1."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n_sites: int
    sites: tuple[int, ...]
    matrices: tuple[np.ndarray, ...]
    label: str = "A"

    @field_validator("matrices", mode="before")
    @classmethod
    def _as_arrays(cls, value: Any) -> tuple[NDArray[np.complex128], ...]:
        return tuple(np.asarray(m, dtype=np.complex128) for m in value)

    @model_validator(mode="after")
    def _check_terms(self) -> AdditiveOperator:
        if len(set(self.sites)) != len(self.sites):
            raise ValueError("sites must be distinct")
        if not self.sites:
            raise ValueError("additive operator needs at least one site")
        if any(not 0 <= s < self.n_sites for s in self.sites):
            raise ValueError(f"sites {self.sites} leave 0..{self.n_sites - 1}")
        if len(self.matrices) != len(self.sites):
            raise ValueError("one matrix per site")
        for site, matrix in zip(self.sites, self.matrices, strict=True):
            if matrix.shape != (2, 2) or not np.allclose(matrix, matrix.conj().T, atol=1e-12):
                raise ValueError(f"a_{site} must be a Hermitian 2x2 matrix")
            if np.linalg.norm(matrix, ord=2) > 1.0 + 1e-12:
                raise ValueError(f"||a_{site}|| exceeds 1")
        return self

    @classmethod
    def uniform(cls, n_sites: int, letter: str = "Z", sites: Sequence[int] | None = None) -> AdditiveOperator:
        """The same Pauli letter on every listed site (all sites by default)."""
        chosen = tuple(range(n_sites)) if sites is None else tuple(sites)
        matrix = SINGLE_SITE_PAULIS[letter.upper()]
        return cls(n_sites=n_sites, sites=chosen, matrices=(matrix,) * len(chosen), label=f"sum {letter.upper()}")

    @property
    def L_size(self) -> int:
        return len(self.sites)

    def to_operator(self) -> LocalOperator:
        total = LocalOperator.zero(self.n_sites)
        for site, matrix in zip(self.sites, self.matrices, strict=True):
            total = total + LocalOperator.single_site(self.n_sites, site, matrix)
        return total


def random_additive(n_sites: int, seed: int, sites: Sequence[int] | None = None) -> AdditiveOperator:
    """Seeded random Hermitian ``a_i`` scaled to unit operator norm."""
    rng = rng_for(seed)
    chosen = tuple(range(n_sites)) if sites is None else tuple(sites)
    matrices = []
    for _ in chosen:
        raw = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        hermitian = (raw + raw.conj().T) / 2.0
        matrices.append(hermitian / np.linalg.norm(hermitian, ord=2))
    return AdditiveOperator(n_sites=n_sites, sites=chosen, matrices=tuple(matrices), label=f"random({seed})")


class AdditiveSpectralMeasure(BaseModel):
    """Distribution of the values of ``A_L`` under a state."""

    model_config = ConfigDict(frozen=True)

    values: tuple[float, ...]
    probabilities: tuple[float, ...]
    median: float
    mean: float
    variance: float

    @model_validator(mode="after")
    def _check_measure(self) -> AdditiveSpectralMeasure:
        if abs(sum(self.probabilities) - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {sum(self.probabilities)}")
        below = sum(p for v, p in zip(self.values, self.probabilities, strict=True) if v <= self.median)
        above = sum(p for v, p in zip(self.values, self.probabilities, strict=True) if v >= self.median)
        if below < 0.5 - 1e-9 or above < 0.5 - 1e-9:
            raise ValueError(f"median {self.median} does not split the measure")
        return self


def _local_rotation(psi: StateVector, A: AdditiveOperator) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Basis probabilities after rotating each site of L into the eigenbasis of ``a_i``, and the summed eigenvalues."""
    n = psi.n_sites
    tensor = psi.normalized().amplitudes.reshape((2,) * n)
    values = np.zeros(2**n)
    index = np.arange(2**n)
    for site, matrix in zip(A.sites, A.matrices, strict=True):
        eigenvalues, eigenvectors = np.linalg.eigh(matrix)
        axis = n - 1 - site  # site 0 is the least significant bit, the last C-order axis
        tensor = np.moveaxis(np.tensordot(eigenvectors.conj().T, tensor, axes=([1], [axis])), 0, axis)
        values += eigenvalues[(index >> site) & 1]
    return np.abs(tensor.reshape(-1)) ** 2, values


def additive_measure(A: AdditiveOperator, psi: StateVector) -> AdditiveSpectralMeasure:
    """Values of ``A_L`` with their probabilities, median, mean and variance under ``psi``.

    The median is the smallest value ``v`` with ``P(A <= v) >= 1/2``.

    Raises:
        UnsupportedRepresentationError: For collective-spin states
        ArgumentError: If the operator and state differ in size
    """
    if psi.representation != "full":
        raise UnsupportedRepresentationError("additive measures need the full representation")
    if psi.n_sites != A.n_sites:
        raise ArgumentError(f"operator on {A.n_sites} sites, state on {psi.n_sites}")
    probabilities, raw_values = _local_rotation(psi, A)
    order = np.argsort(raw_values, kind="stable")
    values: list[float] = []
    weights: list[float] = []
    anchor = -math.inf
    for value, weight in zip(raw_values[order], probabilities[order], strict=True):
        if value - anchor > ENERGY_BIN:
            anchor = float(value)
            values.append(anchor)
            weights.append(float(weight))
        else:
            weights[-1] += float(weight)
    cumulative = np.cumsum(weights)
    median = values[int(np.searchsorted(cumulative, 0.5 - 1e-12))]
    mean = float(np.dot(values, weights))
    variance = float(np.dot((np.asarray(values) - mean) ** 2, weights))
    return AdditiveSpectralMeasure(
        values=tuple(values), probabilities=tuple(weights), median=median, mean=mean, variance=max(variance, 0.0)
    )


def tail_norm(measure: AdditiveSpectralMeasure, x: float, direction: Direction = ">=") -> float:
    """``||Pi^A_{>= x} psi||`` or ``||Pi^A_{<= x} psi||`` from the measure."""
    if direction == ">=":
        mass = sum(p for v, p in zip(measure.values, measure.probabilities, strict=True) if v >= x - ENERGY_BIN)
    elif direction == "<=":
        mass = sum(p for v, p in zip(measure.values, measure.probabilities, strict=True) if v <= x + ENERGY_BIN)
    else:
        raise ArgumentError(f"direction must be '>=' or '<=', got {direction!r}")
    return math.sqrt(min(mass, 1.0))


class TailProfile(BaseModel):
    """Tail curve ``||Pi^A_{>= <A> + h} psi||`` with a Hoeffding reference and a fitted decay rate."""

    h: list[float]
    tail: list[float]
    hoeffding: list[float]  # exp(-h^2 / (4|L|))
    fit: Literal["linear", "quadratic"]
    rate: float | None = None  # -slope of log tail against h (or h^2)
    fit_points: int = 0
    reference_rate: float | None = None  # sqrt(dE / |L|)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"h": self.h, "tail": self.tail, "hoeffding": self.hoeffding})


def tail_profile(
    psi: StateVector,
    A: AdditiveOperator,
    h_grid: Sequence[float] | None = None,
    fit: Literal["linear", "quadratic"] = "linear",
) -> TailProfile:
    """Tail curve above the mean and a least-squares decay fit over tails in [1e-8, 0.1].

    ``fit="linear"`` fits ``log tail`` against ``h``; ``"quadratic"`` against ``h^2``.
    """
    measure = additive_measure(A, psi)
    if h_grid is None:
        span = max(measure.values) - measure.mean
        h_grid = list(np.arange(0.0, span + 0.5, 0.5))
    heights = [float(h) for h in h_grid]
    tails = [tail_norm(measure, measure.mean + h) for h in heights]
    hoeffding = [math.exp(-(h**2) / (4.0 * A.L_size)) for h in heights]
    low, high = TAIL_FIT_WINDOW
    window = [(h, t) for h, t in zip(heights, tails, strict=True) if low <= t <= high]
    rate = None
    if len(window) >= 2:
        xs = np.array([h if fit == "linear" else h**2 for h, _ in window])
        if np.ptp(xs) > 0.0:
            slope = np.polyfit(xs, np.log([t for _, t in window]), 1)[0]
            rate = float(-slope)
    return TailProfile(h=heights, tail=tails, hoeffding=hoeffding, fit=fit, rate=rate, fit_points=len(window))


def _unique(spec: HamiltonianSpec, solution: GroundSolution | None) -> GroundSolution:
    solution = solution or ground_state(spec)
    if not solution.unique:
        raise DegenerateGroundStateError(f"{spec.name} has a {solution.degeneracy}-fold ground space")
    return solution


def ground_tail_profile(
    spec: HamiltonianSpec,
    A: AdditiveOperator,
    solution: GroundSolution | None = None,
    h_grid: Sequence[float] | None = None,
    fit: Literal["linear", "quadratic"] = "linear",
) -> TailProfile:
    """:func:`tail_profile` of the unique ground state with the comparison rate ``sqrt(dE / |L|)``.

    Raises:
        DegenerateGroundStateError: If the ground state is not unique
    """
    solution = _unique(spec, solution)
    profile = tail_profile(solution.ground_state, A, h_grid, fit)
    return profile.model_copy(update={"reference_rate": math.sqrt(solution.gap / A.L_size)})


class TradeoffReport(BaseModel):
    """Gap, fluctuation and the ratio ``dE (Delta A)^2 / |L|``."""

    delta_e: float
    variance: float
    L_size: int
    ratio: float


def _spin_matrices(N: int) -> dict[str, sp.csr_matrix]:
    spin = N / 2.0
    m = np.arange(N + 1) - spin
    raise_amp = np.sqrt(np.maximum(spin * (spin + 1.0) - m[:-1] * (m[:-1] + 1.0), 0.0))
    s_plus = sp.diags(raise_amp, -1, shape=(N + 1, N + 1), dtype=np.complex128)
    s_minus = s_plus.conj().T
    return {
        "x": ((s_plus + s_minus) / 2.0).tocsr(),
        "y": ((s_plus - s_minus) / 2.0j).tocsr(),
        "z": sp.diags(m, 0, dtype=np.complex128).tocsr(),
    }


def collective_additive_variance(solution: GroundSolution, axis: Literal["x", "y", "z"] = "x") -> float:
    """Variance of ``M_axis = 2 S_axis`` in the ground state of a collective-spin sector.

    Raises:
        UnsupportedRepresentationError: For full-representation states
    """
    psi = solution.ground_state
    if psi.representation != "collective_spin":
        raise UnsupportedRepresentationError("collective variance needs a collective-spin state")
    s = _spin_matrices(psi.n_sites)[axis]
    amplitudes = psi.normalized().amplitudes
    image = s @ amplitudes
    first = float(np.vdot(amplitudes, image).real)
    second = float(np.vdot(image, image).real)
    return 4.0 * max(second - first**2, 0.0)


def gap_variance_tradeoff(
    spec: HamiltonianSpec,
    A: AdditiveOperator | None = None,
    solution: GroundSolution | None = None,
    axis: Literal["x", "y", "z"] = "x",
) -> TradeoffReport:
    """``dE``, ``(Delta A_L)^2`` and their ratio per site in the unique ground state.

    Collective-spin models use ``M_axis`` over all N sites; full models default to ``sum Z``.

    Raises:
        DegenerateGroundStateError: If the ground state is not unique
    """
    solution = _unique(spec, solution)
    if spec.representation == "collective_spin":
        variance = collective_additive_variance(solution, axis)
        size = spec.n_sites
    else:
        A = A or AdditiveOperator.uniform(spec.n_sites, "Z")
        variance = additive_measure(A, solution.ground_state).variance
        size = A.L_size
    return TradeoffReport(delta_e=solution.gap, variance=variance, L_size=size, ratio=solution.gap * variance / size)


class FisherReport(BaseModel):
    """Fisher information of a given additive operator, or a bracket on ``N_eff``."""

    n_sites: int
    fisher: float | None = None  # 4 (Delta A)^2 when A is given
    neff_lower: float
    neff_upper: float
    directions: list[list[float]] | None = None  # per-site Bloch vectors of the best ascent

    @model_validator(mode="after")
    def _check_bracket(self) -> FisherReport:
        if self.neff_lower > self.neff_upper * (1.0 + 1e-9) + 1e-12:
            raise ValueError("lower bound exceeds upper bound")
        return self


def correlation_matrix(psi: StateVector) -> NDArray[np.float64]:
    """Connected correlations ``Re<s_a s_b> - <s_a><s_b>`` of all ``3N`` single-site Paulis, site-major."""
    n = psi.n_sites
    paulis = [PauliString.from_letters(n, {site: letter}) for site in range(n) for letter in "XYZ"]
    state = psi.normalized()
    images = pauli_images(paulis, state)
    means = (state.amplitudes.conj() @ images).real
    gram = (images.conj().T @ images).real
    return gram - np.outer(means, means)


def _best_unit_vector(block: NDArray[np.float64], field: NDArray[np.float64]) -> NDArray[np.float64]:
    """Maximize ``x^T block x + 2 field^T x`` on the unit sphere."""
    eigenvalues, eigenvectors = np.linalg.eigh(block)
    beta = eigenvectors.T @ field
    top = eigenvalues[-1]
    field_norm = float(np.linalg.norm(field))
    if field_norm < 1e-14:
        return eigenvectors[:, -1]
    rest = eigenvalues[:-1]
    if abs(beta[-1]) < 1e-14:
        partial = beta[:-1] / np.where(top - rest > 1e-14, top - rest, np.inf)
        if np.dot(partial, partial) <= 1.0:
            x = eigenvectors[:, :-1] @ partial + math.sqrt(1.0 - float(np.dot(partial, partial))) * eigenvectors[:, -1]
            return x

    def secular(mu: float) -> float:
        return float(np.sum(beta**2 / (mu - eigenvalues) ** 2)) - 1.0

    low, high = top + max(abs(float(beta[-1])), 1e-300), top + field_norm
    if secular(high) >= 0.0:
        mu = high
    elif secular(low) <= 0.0:
        mu = low
    else:
        mu = brentq(secular, low, high, xtol=1e-15, rtol=1e-14)
    x = eigenvectors @ (beta / (mu - eigenvalues))
    return x / np.linalg.norm(x)


def _ascend(correlations: NDArray[np.float64], start: NDArray[np.float64], sweeps: int = 200) -> tuple[float, NDArray[np.float64]]:
    directions = start.copy()
    n = directions.shape[0]
    flat = directions.reshape(-1)
    value = float(flat @ correlations @ flat)
    for _ in range(sweeps):
        for site in range(n):
            rows = slice(3 * site, 3 * site + 3)
            block = correlations[rows, rows]
            field = correlations[rows] @ flat - block @ flat[rows]
            flat[rows] = _best_unit_vector(block, field)
        updated = float(flat @ correlations @ flat)
        if updated - value <= 1e-12 * max(1.0, abs(updated)):
            value = max(value, updated)
            break
        value = updated
    return value, flat.reshape(n, 3)


def _normalized_blocks(vector: NDArray[np.float64], rng: np.random.Generator) -> NDArray[np.float64]:
    blocks = vector.reshape(-1, 3).copy()
    for site, block in enumerate(blocks):
        norm = np.linalg.norm(block)
        blocks[site] = block / norm if norm > 1e-12 else _random_unit(rng)
    return blocks


def _random_unit(rng: np.random.Generator) -> NDArray[np.float64]:
    vector = rng.normal(size=3)
    return vector / np.linalg.norm(vector)


def fisher_neff(
    psi: StateVector,
    A: AdditiveOperator | None = None,
    restarts: int = 16,
    seed: int = 0,
) -> FisherReport:
    """Fisher information ``4 (Delta A)^2`` or the bracket on ``N_eff = max_A (Delta A)^2 / N``.

    Without ``A`` the lower bound comes from block-coordinate ascent over per-site Bloch vectors
    (one start from the top correlation eigenvector plus ``restarts`` random starts) and the upper
    bound from the top eigenvalue of the connected correlation matrix.

    Raises:
        UnsupportedRepresentationError: For collective-spin states
    """
    if psi.representation != "full":
        raise UnsupportedRepresentationError("Fisher information needs the full representation")
    n = psi.n_sites
    if A is not None:
        variance = additive_measure(A, psi).variance
        return FisherReport(n_sites=n, fisher=4.0 * variance, neff_lower=variance / n, neff_upper=variance / n)
    correlations = correlation_matrix(psi)
    eigenvalues, eigenvectors = sla.eigh(correlations)
    upper = float(eigenvalues[-1])
    rng = rng_for(seed)
    starts = [_normalized_blocks(eigenvectors[:, -1], rng)]
    starts += [np.array([_random_unit(rng_for(seed, r + 1)) for _ in range(n)]) for r in range(restarts)]
    best_value, best_directions = -math.inf, starts[0]
    for start in starts:
        value, directions = _ascend(correlations, start)
        if value > best_value:
            best_value, best_directions = value, directions
    lower = min(best_value / n, upper)
    logger.debug(f"N_eff bracket [{lower:.6g}, {upper:.6g}] on {n} sites")
    return FisherReport(n_sites=n, neff_lower=lower, neff_upper=upper, directions=best_directions.tolist())


class ScalingFit(BaseModel):
    """Log-log fit of one quantity against N."""

    exponent: float
    stderr: float
    window: tuple[int, int]


class LmgScalingReport(BaseModel):
    rows: list[dict[str, float]]  # N, deltaE, variance
    gap_fit: ScalingFit
    variance_fit: ScalingFit

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=["N", "deltaE", "variance"])


def _fit(N_list: Sequence[int], values: Sequence[float]) -> ScalingFit:
    result = linregress(np.log(N_list), np.log(values))
    return ScalingFit(exponent=float(result.slope), stderr=float(result.stderr), window=(min(N_list), max(N_list)))


def lmg_scaling_fit(
    N_list: Sequence[int],
    lam: float = 1.0,
    h: float = 1.0,
    gamma: float = 0.0,
    axis: Literal["x", "y", "z"] = "x",
    field_axis: Literal["x", "z"] = "z",
) -> LmgScalingReport:
    """Exponents of ``dE(N)`` and ``(Delta M_axis)^2(N)`` in the collective-spin sector.

    Raises:
        ArgumentError: If fewer than two ascending sizes are given
        NotConvergedError: If a sector solve fails
    """
    sizes = list(N_list)
    if len(sizes) < 2 or sizes != sorted(set(sizes)):
        raise ArgumentError("N_list must hold at least two strictly ascending sizes")
    rows = []
    for N in sizes:
        spec = build_lmg_sector(N, lam, gamma, h, field_axis)
        report = gap_variance_tradeoff(spec, axis=axis)
        rows.append({"N": float(N), "deltaE": report.delta_e, "variance": report.variance})
        logger.debug(f"LMG N={N}: dE={report.delta_e:.6g} var={report.variance:.6g}")
    return LmgScalingReport(
        rows=rows,
        gap_fit=_fit(sizes, [r["deltaE"] for r in rows]),
        variance_fit=_fit(sizes, [r["variance"] for r in rows]),
    )


class CriticalExponents(BaseModel):
    """Dynamical ``z``, anomalous ``eta``, susceptibility ``gamma``, correlation-length ``nu`` and dimension ``D``."""

    model_config = ConfigDict(frozen=True)

    z: float
    eta: float
    gamma: float
    nu: float
    D: float

    @computed_field  # type: ignore[prop-decorator]
    @property
    def p(self) -> float:
        return 1.0 + (2.0 - self.eta - self.z) / self.D


class CriticalReport(BaseModel):
    lhs_z: float
    rhs_fluctuation: float  # 1 - eta / 2
    rhs_fisher: float  # gamma / (2 nu)
    satisfied: bool
    saturated: bool
    fisher_consistent: bool
    p: float


def critical_exponent_inequality(exponents: CriticalExponents, tol: float = 1e-12) -> CriticalReport:
    """Check ``z >= 1 - eta/2`` and the Fisher equality ``2 - eta = gamma / nu``."""
    rhs = 1.0 - exponents.eta / 2.0
    return CriticalReport(
        lhs_z=exponents.z,
        rhs_fluctuation=rhs,
        rhs_fisher=exponents.gamma / (2.0 * exponents.nu),
        satisfied=exponents.z >= rhs - tol,
        saturated=abs(exponents.z - rhs) <= tol,
        fisher_consistent=abs((2.0 - exponents.eta) - exponents.gamma / exponents.nu) <= tol,
        p=exponents.p,
    )


class TailBoundPoint(BaseModel):
    h: float
    q: int
    tail: float  # ||Pi^A_{>= m+h} Omega||
    bound: float  # 2 f(q)
    margin: float


class TailBoundReport(BaseModel):
    median: float
    points: list[TailBoundPoint]
    holds: bool


def fluctuation_tail_bound_check(
    spec: HamiltonianSpec,
    A: AdditiveOperator,
    solution: GroundSolution | None = None,
    h_grid: Sequence[float] | None = None,
) -> TailBoundReport:
    """Compare ``||Pi^A_{>= m+h} Omega||`` with ``2 f(q)`` for ``q = ceil(h/2) - 1``.

    ``f = 6 exp(-2 n0 / xi)`` is evaluated with ``|L| = |sites of A|``; heights with ``q < 0``
    are skipped.

    Raises:
        DegenerateGroundStateError: If the ground state is not unique
    """
    solution = _unique(spec, solution)
    measure = additive_measure(A, solution.ground_state)
    heights = list(h_grid) if h_grid is not None else [float(h) for h in range(2, 2 * A.L_size + 1, 2)]
    points = []
    for h in heights:
        q = math.ceil(h / 2.0) - 1
        if q < 0:
            continue
        params = filter_params(q, spec.k, spec.g, A.L_size, solution.gap)
        tail = tail_norm(measure, measure.median + h)
        bound = 2.0 * 6.0 * params.suppression
        points.append(TailBoundPoint(h=float(h), q=q, tail=tail, bound=bound, margin=bound - tail))
    return TailBoundReport(median=measure.median, points=points, holds=all(p.margin >= 0.0 for p in points))


class LocalityGapReport(BaseModel):
    """Largest ``||Pi^A_{>= m+h} O Pi^A_{<= m}||`` over all Pauli strings of support at most q."""

    q: int
    h: float
    median: float
    applicable: bool  # 2q < h
    strings_checked: int
    max_norm: float
    violations: int


def _rotation_basis(A: AdditiveOperator) -> tuple[NDArray[np.complex128], NDArray[np.float64]]:
    n = A.n_sites
    local = {site: np.linalg.eigh(matrix) for site, matrix in zip(A.sites, A.matrices, strict=True)}
    unitary = np.ones((1, 1), dtype=np.complex128)
    values = np.zeros(2**n)
    index = np.arange(2**n)
    for site in range(n):
        factor = local[site][1] if site in local else np.eye(2)
        unitary = np.kron(factor, unitary)
        if site in local:
            values += local[site][0][(index >> site) & 1]
    return unitary, values


def additive_locality_gap_check(A: AdditiveOperator, q: int, h: float, m: float, max_sites: int = 8) -> LocalityGapReport:
    """Check that no q-local string carries weight from ``A <= m`` to ``A >= m + h`` when ``2q < h``.

    Raises:
        ArgumentError: Beyond ``max_sites`` sites
    """
    if A.n_sites > max_sites:
        raise ArgumentError(f"dense locality check limited to {max_sites} sites")
    unitary, values = _rotation_basis(A)
    high = values >= m + h - ENERGY_BIN
    low = values <= m + ENERGY_BIN
    worst = 0.0
    violations = 0
    basis = enumerate_q_local_basis(A.n_sites, q)
    applicable = 2 * q < h
    if np.any(high) and np.any(low):
        for pauli in basis:
            rotated = unitary.conj().T @ pauli.to_dense() @ unitary
            norm = float(np.linalg.norm(rotated[np.ix_(high, low)], ord=2))
            worst = max(worst, norm)
            if applicable and norm > 1e-10:
                violations += 1
    return LocalityGapReport(
        q=q,
        h=h,
        median=m,
        applicable=applicable,
        strings_checked=len(basis),
        max_norm=worst,
        violations=violations,
    )


def additive_variance_direct(A: AdditiveOperator, psi: StateVector) -> float:
    """``<A^2> - <A>^2`` by applying ``A`` as a local operator."""
    normalized = psi.normalized()
    image = apply_local_operator(A.to_operator(), normalized)
    mean = float(np.vdot(normalized.amplitudes, image.amplitudes).real)
    return float(np.vdot(image.amplitudes, image.amplitudes).real) - mean**2

"""Hamiltonians and special states with certified locality k and interaction strength g."""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from typing import TYPE_CHECKING, Any, Literal

import networkx as nx
import numpy as np
import scipy.sparse as sp
from loguru import logger
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator, validate_call

from revlab.errors import ArgumentError, DimensionLimitError, NoLogicalError
from revlab.operators import LocalOperator, PauliString, Term, apply_pauli, operator_norm
from revlab.settings import get_settings, rng_for
from revlab.states import StateVector, basis_state, product_state

if TYPE_CHECKING:
    from networkx import Graph

Representation = Literal["full", "collective_spin"]


class ModelMetadata(BaseModel):
    """Model name and the parameters it was built with."""

    model_config = ConfigDict(frozen=True)

    name: str
    params: dict[str, Any] = Field(default_factory=dict)


class HamiltonianSpec(BaseModel):
    """A k-local Hamiltonian ``H = sum_X h_X`` with certified ``k`` and ``g``.

    Full-representation models carry Pauli ``terms``. Collective-spin models carry the
    ``S = N/2`` sector matrix in upper banded storage (``band[u + i - j, j] = H[i, j]``, ``u = 2``)
    and take ``g`` from their defining Pauli form.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n_sites: int
    terms: LocalOperator | None = None
    k: int
    g: float
    metadata: ModelMetadata
    representation: Representation = "full"
    band: np.ndarray | None = None
    energy_shift: float = 0.0  # original E0 once shifted
    symmetry_generators: tuple[PauliString, ...] = ()

    @model_validator(mode="after")
    def _check_certificate(self) -> HamiltonianSpec:
        if self.representation == "collective_spin":
            if self.band is None or self.band.shape != (3, self.n_sites + 1):
                raise ValueError("collective-spin model needs a (3, N+1) band")
            return self
        if self.terms is None or self.terms.n_sites != self.n_sites:
            raise ValueError("full-representation model needs Pauli terms on n_sites")
        if self.k != self.terms.locality_q:
            raise ValueError(f"k={self.k} but the largest term support is {self.terms.locality_q}")
        if abs(self.g - pauli_interaction_strength(self.terms)) > 1e-12:
            raise ValueError("stored g does not match the per-site term sums")
        if not self.terms.is_hermitian():
            raise ValueError("Hamiltonian terms are not Hermitian")
        return self

    @property
    def dim(self) -> int:
        return StateVector.dim_for(self.n_sites, self.representation)

    @property
    def name(self) -> str:
        return self.metadata.name

    @property
    def pauli_terms(self) -> LocalOperator:
        if self.terms is None:
            raise ArgumentError(f"model {self.name} has no Pauli-term form at this size")
        return self.terms

    def triangle_norm(self) -> float:
        """Cheap upper bound on the operator norm."""
        if self.terms is not None:
            return self.terms.triangle_norm()
        assert self.band is not None
        return float(np.max(np.abs(self.sector_matrix()).sum(axis=1)))

    def sector_matrix(self) -> sp.csr_matrix:
        """Sparse collective-spin sector matrix rebuilt from the band."""
        if self.band is None:
            raise ArgumentError(f"model {self.name} has no collective-spin sector")
        dim = self.n_sites + 1
        diagonals = [self.band[2], self.band[1, 1:], self.band[0, 2:]]
        upper = sp.diags(diagonals[1:], [1, 2], shape=(dim, dim))
        return (sp.diags(diagonals[0], 0, shape=(dim, dim)) + upper + upper.T).tocsr()

    def bonds(self) -> list[tuple[int, int]]:
        """Site pairs carrying a two-site term, ascending."""
        pairs = {tuple(sorted(p.support)) for _, p in self.pauli_terms.terms if p.weight == 2}
        return sorted((a, b) for a, b in pairs)

    def bond_operator(self, i: int, j: int) -> LocalOperator:
        """Sum of all two-site terms supported exactly on ``{i, j}``."""
        pair = frozenset((i, j))
        return LocalOperator.from_terms(self.n_sites, [(c, p) for c, p in self.pauli_terms.terms if p.support == pair])

    def shifted(self, e0: float) -> HamiltonianSpec:
        """Same model with ``e0`` recorded as the subtracted ground energy."""
        return self.model_copy(update={"energy_shift": float(e0)})


class ModelCatalogEntry(BaseModel):
    """Registry entry; ``expected_*`` fields are test oracles, never computation inputs."""

    model_config = ConfigDict(frozen=True)

    builder_id: str
    params: dict[str, str]  # parameter name -> type description
    boundaries: tuple[str, ...] = ()
    expected_degeneracy: int | None = None
    expected_gap: float | None = None


def pauli_interaction_strength(terms: LocalOperator) -> float:
    """``max_i`` of summed ``|coeff|`` over non-identity Pauli terms touching site ``i``."""
    per_site = np.zeros(terms.n_sites)
    for coeff, pauli in terms.terms:
        for site in pauli.support:
            per_site[site] += abs(coeff)
    return float(per_site.max()) if terms.n_sites else 0.0


def interaction_strength_g(spec: HamiltonianSpec, mode: Literal["pauli", "grouped"] = "pauli") -> float:
    """Interaction strength ``g = max_i sum_{X ni i} ||h_X||``.

    Args:
        spec: The model
        mode: ``pauli`` treats every Pauli term as its own ``h_X`` (norm ``|coeff|``); ``grouped``
            merges terms with equal support into one ``h_X`` and takes its exact norm

    Returns:
        The interaction strength; collective-spin models report the value of their Pauli form
    """
    if spec.representation == "collective_spin":
        return spec.g
    terms = spec.pauli_terms
    if mode == "pauli":
        return pauli_interaction_strength(terms)
    groups: dict[int, list[Term]] = {}
    for coeff, pauli in terms.terms:
        if pauli.weight:
            groups.setdefault(pauli.support_mask, []).append((coeff, pauli))
    per_site = np.zeros(spec.n_sites)
    for mask, group in groups.items():
        norm = operator_norm(LocalOperator.from_terms(spec.n_sites, group))
        for site in range(spec.n_sites):
            if mask >> site & 1:
                per_site[site] += norm
    return float(per_site.max())


def _spec_from_terms(
    name: str,
    params: dict[str, Any],
    terms: LocalOperator,
    symmetry_generators: Sequence[PauliString] = (),
) -> HamiltonianSpec:
    logger.debug(f"built {name} on {terms.n_sites} sites with {len(terms.terms)} terms")
    return HamiltonianSpec(
        n_sites=terms.n_sites,
        terms=terms,
        k=terms.locality_q,
        g=pauli_interaction_strength(terms),
        metadata=ModelMetadata(name=name, params=params),
        symmetry_generators=tuple(symmetry_generators),
    )


def _integer_nodes(graph: Graph[Any]) -> Graph[Any]:
    if sorted(graph.nodes) == list(range(graph.number_of_nodes())):
        return graph
    return nx.convert_node_labels_to_integers(graph, ordering="sorted")


def _stabilizer_penalty(n_sites: int, stabilizer: PauliString, sign: float = -1.0) -> list[Term]:
    """Terms of ``(I + sign * g) / 2``."""
    return [(0.5, PauliString.identity(n_sites)), (0.5 * sign, stabilizer)]


def build_ising_on_graph(graph: Graph[Any], J: float, h: float, name: str = "ising_graph") -> HamiltonianSpec:
    """Transverse-field Ising couplings ``-J Z_i Z_j`` on every edge and ``-h X_i`` on every vertex.

    Args:
        graph: Simple undirected graph; nodes are relabelled to 0..n-1 in sorted order
        J: Coupling
        h: Transverse field
        name: Model name recorded in the metadata

    Returns:
        The Hamiltonian
    """
    graph = _integer_nodes(graph)
    n = graph.number_of_nodes()
    if n < 2:
        raise ArgumentError(f"Ising model needs at least 2 sites, got {n}")
    if nx.number_of_selfloops(graph):
        raise ArgumentError("self-loops are not couplings")
    terms: list[Term] = [(-J, PauliString.on_sites(n, "Z", edge)) for edge in sorted(graph.edges)]
    terms += [(-h, PauliString.from_letters(n, {i: "X"})) for i in range(n)]
    params = {"J": J, "h": h, "edges": [list(edge) for edge in sorted(graph.edges)]}
    return _spec_from_terms(name, params, LocalOperator.from_terms(n, terms))


def build_transverse_ising(
    n: int, J: float, h: float, boundary: Literal["open", "periodic"] = "periodic"
) -> HamiltonianSpec:
    """``H = -J sum Z_i Z_{i+1} - h sum X_i`` on a chain.

    Raises:
        ArgumentError: If n < 2 or the boundary is unknown
    """
    if n < 2:
        raise ArgumentError(f"transverse Ising chain needs n >= 2, got {n}")
    if boundary not in ("open", "periodic"):
        raise ArgumentError(f"unknown boundary {boundary!r}")
    graph = nx.cycle_graph(n) if boundary == "periodic" else nx.path_graph(n)
    spec = build_ising_on_graph(graph, J, h, name="tfi")
    return spec.model_copy(update={"metadata": ModelMetadata(name="tfi", params={"J": J, "h": h, "boundary": boundary})})


def graph_stabilizers(graph: Graph[Any]) -> list[PauliString]:
    """``g_i = X_i prod_{j in N(i)} Z_j`` for every vertex."""
    graph = _integer_nodes(graph)
    n = graph.number_of_nodes()
    stabilizers = []
    for i in range(n):
        letters = dict.fromkeys(graph.neighbors(i), "Z")
        letters[i] = "X"
        stabilizers.append(PauliString.from_letters(n, letters))
    return stabilizers


def build_graph_state_hamiltonian(graph: Graph[Any]) -> HamiltonianSpec:
    """``H = sum_i (I - g_i) / 2`` whose unique ground state is the graph state.

    Raises:
        ArgumentError: On self-loops or fewer than two vertices
    """
    if nx.number_of_selfloops(graph):
        raise ArgumentError("graph states need a simple graph, found self-loops")
    graph = _integer_nodes(graph)
    n = graph.number_of_nodes()
    if n < 2:
        raise ArgumentError(f"graph state needs at least 2 vertices, got {n}")
    terms: list[Term] = []
    for stabilizer in graph_stabilizers(graph):
        terms += _stabilizer_penalty(n, stabilizer)
    params = {"edges": [list(edge) for edge in sorted(graph.edges)]}
    return _spec_from_terms("graph_state", params, LocalOperator.from_terms(n, terms))


def cluster_symmetry_generators(n: int) -> tuple[PauliString, PauliString]:
    """On-site Z2 x Z2 of the X Z X chain: Z on the even sites and Z on the odd sites."""
    return (PauliString.on_sites(n, "Z", range(0, n, 2)), PauliString.on_sites(n, "Z", range(1, n, 2)))


def build_cluster_chain(
    n: int, boundary: Literal["fixed_identity", "open_degenerate"] = "fixed_identity"
) -> HamiltonianSpec:
    """Cluster chain ``sum_i X_{i-1} Z_i X_{i+1}`` rescaled to ``sum_i (I + g_i) / 2``.

    ``fixed_identity`` replaces the missing outer X by the identity, giving the end stabilizers
    ``Z_0 X_1`` and ``X_{n-2} Z_{n-1}`` and a unique ground state. ``open_degenerate`` drops them,
    leaving a four-fold degenerate ground space protected by the two sublattice Z products.

    Raises:
        ArgumentError: If n < 3 or the boundary is unknown
    """
    if n < 3:
        raise ArgumentError(f"cluster chain needs n >= 3, got {n}")
    if boundary not in ("fixed_identity", "open_degenerate"):
        raise ArgumentError(f"unknown boundary {boundary!r}")
    stabilizers = [PauliString.from_letters(n, {i - 1: "X", i: "Z", i + 1: "X"}) for i in range(1, n - 1)]
    if boundary == "fixed_identity":
        stabilizers.insert(0, PauliString.from_letters(n, {0: "Z", 1: "X"}))
        stabilizers.append(PauliString.from_letters(n, {n - 2: "X", n - 1: "Z"}))
    terms: list[Term] = []
    for stabilizer in stabilizers:
        terms += _stabilizer_penalty(n, stabilizer, sign=1.0)
    return _spec_from_terms(
        "cluster",
        {"boundary": boundary},
        LocalOperator.from_terms(n, terms),
        symmetry_generators=cluster_symmetry_generators(n),
    )


def _torus_edges(Lx: int, Ly: int) -> tuple[Callable[[int, int], int], Callable[[int, int], int]]:
    def horizontal(x: int, y: int) -> int:
        return (y % Ly) * Lx + (x % Lx)

    def vertical(x: int, y: int) -> int:
        return Lx * Ly + (y % Ly) * Lx + (x % Lx)

    return horizontal, vertical


def _torus_stabilizers(Lx: int, Ly: int) -> tuple[list[PauliString], list[PauliString]]:
    h, v = _torus_edges(Lx, Ly)
    n = 2 * Lx * Ly
    stars = [
        PauliString.on_sites(n, "X", {h(x, y), h(x - 1, y), v(x, y), v(x, y - 1)}) for y in range(Ly) for x in range(Lx)
    ]
    plaquettes = [
        PauliString.on_sites(n, "Z", {h(x, y), v(x + 1, y), h(x, y + 1), v(x, y)})
        for y in range(Ly)
        for x in range(Lx)
    ]
    return stars, plaquettes


def _planar_stabilizers(Lx: int, Ly: int) -> tuple[list[PauliString], list[PauliString]]:
    """Stars on every vertex and plaquettes on every face of an open ``Lx x Ly`` vertex grid."""
    grid = nx.grid_2d_graph(Lx, Ly)
    edges = sorted(tuple(sorted(edge)) for edge in grid.edges)
    index = {edge: k for k, edge in enumerate(edges)}
    n = len(edges)
    stars = [
        PauliString.on_sites(n, "X", {index[tuple(sorted((vertex, other)))] for other in grid.neighbors(vertex)})
        for vertex in sorted(grid.nodes)
    ]
    plaquettes = []
    for x in range(Lx - 1):
        for y in range(Ly - 1):
            corners = [(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)]
            boundary = {index[tuple(sorted((corners[c], corners[(c + 1) % 4])))] for c in range(4)}
            plaquettes.append(PauliString.on_sites(n, "Z", boundary))
    return stars, plaquettes


def build_toric_code(Lx: int, Ly: int, topology: Literal["torus", "planar"] = "torus") -> HamiltonianSpec:
    """``H = sum_s (I - A_s)/2 + sum_p (I - B_p)/2`` with X stars and Z plaquettes.

    On the torus, edge ``h(x, y)`` joins vertices ``(x, y)`` and ``(x+1, y)`` and edge ``v(x, y)``
    joins ``(x, y)`` and ``(x, y+1)``. The planar variant lives on an open vertex grid, where the
    numbers of vertices, edges and faces leave no logical qubit.

    Raises:
        ArgumentError: If a side is shorter than 2 or the topology is unknown
        DimensionLimitError: If the qubit count exceeds the iterative solver limit
    """
    if Lx < 2 or Ly < 2:
        raise ArgumentError(f"toric code needs Lx, Ly >= 2, got {Lx}x{Ly}")
    if topology == "torus":
        stars, plaquettes = _torus_stabilizers(Lx, Ly)
    elif topology == "planar":
        stars, plaquettes = _planar_stabilizers(Lx, Ly)
    else:
        raise ArgumentError(f"unknown topology {topology!r}")
    n = stars[0].n_sites
    if n > get_settings().max_iterative_sites:
        raise DimensionLimitError(f"{topology} {Lx}x{Ly} toric code has {n} qubits")
    terms: list[Term] = []
    for stabilizer in [*stars, *plaquettes]:
        terms += _stabilizer_penalty(n, stabilizer)
    return _spec_from_terms("toric", {"Lx": Lx, "Ly": Ly, "topology": topology}, LocalOperator.from_terms(n, terms))


def _torus_geometry(spec: HamiltonianSpec) -> tuple[int, int]:
    params = spec.metadata.params
    if spec.name != "toric" or params.get("topology") != "torus":
        raise NoLogicalError(f"model {spec.name} ({params.get('topology')}) has no non-contractible loop")
    return int(params["Lx"]), int(params["Ly"])


def toric_logical_loop(spec: HamiltonianSpec, direction: Literal["x", "y"] = "x") -> PauliString:
    """Z string along a non-contractible loop of the torus.

    Raises:
        NoLogicalError: For planar patches and non-toric models
    """
    Lx, Ly = _torus_geometry(spec)
    h, v = _torus_edges(Lx, Ly)
    if direction == "x":
        edges = {h(x, 0) for x in range(Lx)}
    elif direction == "y":
        edges = {v(0, y) for y in range(Ly)}
    else:
        raise ArgumentError(f"direction must be 'x' or 'y', got {direction!r}")
    return PauliString.on_sites(spec.n_sites, "Z", edges)


def toric_conjugate_loop(spec: HamiltonianSpec, direction: Literal["x", "y"] = "x") -> PauliString:
    """X string on the dual loop crossing :func:`toric_logical_loop` exactly once."""
    Lx, Ly = _torus_geometry(spec)
    h, v = _torus_edges(Lx, Ly)
    if direction == "x":
        edges = {h(0, y) for y in range(Ly)}
    elif direction == "y":
        edges = {v(x, 0) for x in range(Lx)}
    else:
        raise ArgumentError(f"direction must be 'x' or 'y', got {direction!r}")
    return PauliString.on_sites(spec.n_sites, "X", edges)


def _project_stars(spec: HamiltonianSpec, psi: StateVector) -> StateVector:
    """Apply ``prod_s (I + A_s)/2`` matrix-free."""
    stars = [p for _, p in spec.pauli_terms.terms if p.weight and p.z_mask == 0]
    for star in stars:
        psi = (psi + apply_pauli(star, psi)) * 0.5
    return psi


def toric_ground_space(spec: HamiltonianSpec) -> list[StateVector]:
    """Four orthonormal torus ground states ``P_A Xbar_x^a Xbar_y^b |0...0>``.

    Each state is an eigenstate of both Z loops, so the four are mutually orthogonal.
    """
    vacuum = _project_stars(spec, basis_state(spec.n_sites, 0)).normalized()
    x_loop = toric_conjugate_loop(spec, "x")
    y_loop = toric_conjugate_loop(spec, "y")
    states = []
    for a in (0, 1):
        for b in (0, 1):
            psi = vacuum
            if a:
                psi = apply_pauli(x_loop, psi)
            if b:
                psi = apply_pauli(y_loop, psi)
            states.append(psi)
    return states


def toric_loop_pair(spec: HamiltonianSpec, direction: Literal["x", "y"] = "x") -> tuple[StateVector, StateVector]:
    """Ground states ``(Omega_1, T_L Omega_1)`` with ``Omega_1`` in the conjugate-loop eigenbasis.

    ``Omega_1 = (Omega_0 + Xbar Omega_0)/sqrt 2`` is a +1 eigenstate of the dual X loop, which
    anticommutes with ``T_L``, so ``T_L Omega_1`` is orthogonal to it.
    """
    vacuum = _project_stars(spec, basis_state(spec.n_sites, 0)).normalized()
    first = ((vacuum + apply_pauli(toric_conjugate_loop(spec, direction), vacuum)) * (1.0 / math.sqrt(2.0))).normalized()
    second = apply_pauli(toric_logical_loop(spec, direction), first)
    return first, second


def lmg_interaction_strength(N: int, lam: float, gamma: float, h: float) -> float:
    """g of the Pauli form: every site sits in N-1 pairs with XX and YY couplings and one field."""
    return abs(lam) * (N - 1) * (1.0 + abs(gamma)) / N + abs(h)


def _check_lmg(N: int, gamma: float, field_axis: str) -> None:
    if N < 2:
        raise ArgumentError(f"LMG model needs N >= 2, got {N}")
    if abs(gamma) > 1.0:
        raise ArgumentError(f"LMG anisotropy must satisfy |gamma| <= 1, got {gamma}")
    if field_axis not in ("x", "z"):
        raise ArgumentError(f"field_axis must be 'x' or 'z', got {field_axis!r}")


def build_lmg_sector(
    N: int, lam: float, gamma: float, h: float, field_axis: Literal["x", "z"] = "z"
) -> HamiltonianSpec:
    """Maximal-spin sector of ``-(lam/N) sum_{i<j} (X_i X_j + gamma Y_i Y_j) + h sum_i sigma_i``.

    Uses ``sum_{i<j} X_i X_j = 2 S_x^2 - N/2`` in the ``S_z`` eigenbasis ``m = -S..S``, where
    ``S_x^2`` and ``S_y^2`` have bandwidth 2. ``sigma`` is Z for ``field_axis="z"`` (the field
    transverse to the coupling plane, with a critical point at ``lam = |h|``) or X.

    Raises:
        ArgumentError: On N < 2, |gamma| > 1 or an unknown axis
        DimensionLimitError: If N + 1 exceeds the sector limit
    """
    _check_lmg(N, gamma, field_axis)
    if N + 1 > get_settings().max_sector_dim:
        raise DimensionLimitError(f"sector dimension {N + 1} exceeds {get_settings().max_sector_dim}")
    spin = N / 2.0
    m = np.arange(N + 1) - spin
    casimir = spin * (spin + 1.0)
    # <m+1|S_+|m>
    raise_amp = np.sqrt(np.maximum(casimir - m[:-1] * (m[:-1] + 1.0), 0.0))
    band = np.zeros((3, N + 1))
    band[2] = -(lam / N) * ((1.0 + gamma) * (casimir - m**2) - (1.0 + gamma) * N / 2.0)
    # <m+2|S_+^2|m> = c(m) c(m+1); S_x^2 gets +1/4 of it, S_y^2 gets -1/4
    double_raise = raise_amp[:-1] * raise_amp[1:]
    band[0, 2:] = -(lam / N) * 2.0 * (1.0 - gamma) * double_raise / 4.0
    if field_axis == "z":
        band[2] += 2.0 * h * m
    else:
        band[1, 1:] = h * raise_amp
    return HamiltonianSpec(
        n_sites=N,
        k=2,
        g=lmg_interaction_strength(N, lam, gamma, h),
        metadata=ModelMetadata(name="lmg", params={"lam": lam, "gamma": gamma, "h": h, "field_axis": field_axis}),
        representation="collective_spin",
        band=band,
    )


def build_lmg_pauli(
    N: int, lam: float, gamma: float, h: float, field_axis: Literal["x", "z"] = "z"
) -> HamiltonianSpec:
    """The LMG Hamiltonian written as Pauli terms over the full 2^N space."""
    _check_lmg(N, gamma, field_axis)
    terms: list[Term] = []
    for i in range(N):
        for j in range(i + 1, N):
            terms.append((-lam / N, PauliString.on_sites(N, "X", (i, j))))
            terms.append((-lam * gamma / N, PauliString.on_sites(N, "Y", (i, j))))
    letter = "Z" if field_axis == "z" else "X"
    terms += [(h, PauliString.from_letters(N, {i: letter})) for i in range(N)]
    params = {"lam": lam, "gamma": gamma, "h": h, "field_axis": field_axis}
    return _spec_from_terms("lmg_pauli", params, LocalOperator.from_terms(N, terms))


def build_product_state_hamiltonian(states: Sequence[Sequence[complex]] | Sequence[NDArray[Any]]) -> HamiltonianSpec:
    """``H = sum_i (I - |psi_i><psi_i|)`` with the product state as unique ground state and gap 1.

    Raises:
        ArgumentError: If a site state is not a normalized 2-vector or fewer than one is given
    """
    if not states:
        raise ArgumentError("product Hamiltonian needs at least one site")
    n = len(states)
    operator = LocalOperator.zero(n)
    for site, state in enumerate(states):
        vector = np.asarray(state, dtype=np.complex128)
        if vector.shape != (2,) or abs(np.linalg.norm(vector) - 1.0) > 1e-10:
            raise ArgumentError(f"site {site} state must be a normalized 2-vector")
        operator = operator + LocalOperator.single_site(n, site, np.eye(2) - np.outer(vector, vector.conj()))
    params = {"states": [[[float(a.real), float(a.imag)] for a in np.asarray(s, dtype=complex)] for s in states]}
    return _spec_from_terms("product", params, operator)


def bloch_state(theta: float, phi: float = 0.0) -> NDArray[np.complex128]:
    """``cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>``."""
    return np.array([math.cos(theta / 2.0), np.exp(1j * phi) * math.sin(theta / 2.0)], dtype=np.complex128)


def random_site_states(n: int, seed: int) -> list[NDArray[np.complex128]]:
    """Haar-random single-site states from the seeded stream."""
    rng = rng_for(seed)
    states = []
    for _ in range(n):
        vector = rng.normal(size=2) + 1j * rng.normal(size=2)
        states.append(vector / np.linalg.norm(vector))
    return states


def build_random_two_local(n: int, seed: int, density: float = 0.5, field: float = 1.0) -> HamiltonianSpec:
    """Seeded random 2-local Pauli Hamiltonian on a connected interaction graph.

    Every chain bond ``(i, i+1)`` is present, other pairs with probability ``density``. Each bond
    gets two random two-letter strings with normal coefficients; each site a random field letter
    with a uniform coefficient in ``[-field, field]``.
    """
    if n < 2:
        raise ArgumentError(f"random 2-local model needs n >= 2, got {n}")
    rng = rng_for(seed)
    letters = ("X", "Y", "Z")
    terms: list[Term] = []
    for i in range(n):
        for j in range(i + 1, n):
            if j != i + 1 and rng.random() >= density:
                continue
            for _ in range(2):
                pauli = PauliString.from_letters(n, {i: letters[rng.integers(3)], j: letters[rng.integers(3)]})
                terms.append((float(rng.normal()), pauli))
    for i in range(n):
        terms.append((float(rng.uniform(-field, field)), PauliString.from_letters(n, {i: letters[rng.integers(3)]})))
    return _spec_from_terms(
        "random_two_local", {"seed": seed, "density": density, "field": field}, LocalOperator.from_terms(n, terms)
    )


SpecialKind = Literal["ghz", "w", "ghz_w_hybrid", "product"]


def make_special_state(
    kind: SpecialKind, n: int | None = None, states: Sequence[Sequence[complex]] | None = None
) -> StateVector:
    """GHZ, W, the GHZ/W hybrid ``(|0>|0...0> + |1>|W>)/sqrt 2`` (site 0 first) or a product state.

    Raises:
        ArgumentError: On missing or out-of-range arguments
    """
    if kind == "product":
        if not states:
            raise ArgumentError("product state needs per-site states")
        return product_state([np.asarray(s, dtype=np.complex128) / np.linalg.norm(s) for s in states])
    minimum = 3 if kind == "ghz_w_hybrid" else 2
    if n is None or n < minimum:
        raise ArgumentError(f"{kind} state needs n >= {minimum}, got {n}")
    amplitudes = np.zeros(2**n, dtype=np.complex128)
    if kind == "ghz":
        amplitudes[0] = amplitudes[-1] = 1.0 / math.sqrt(2.0)
    elif kind == "w":
        amplitudes[[1 << i for i in range(n)]] = 1.0 / math.sqrt(n)
    elif kind == "ghz_w_hybrid":
        amplitudes[0] = 1.0 / math.sqrt(2.0)
        amplitudes[[1 | (1 << j) for j in range(1, n)]] = 1.0 / math.sqrt(2.0 * (n - 1))
    else:
        raise ArgumentError(f"unknown state kind {kind!r}")
    return StateVector(n_sites=n, amplitudes=amplitudes)


def ring_graph(n: int) -> Graph[Any]:
    return nx.cycle_graph(n)


def circulant_graph(n: int, degree: int) -> Graph[Any]:
    """Vertex-transitive graph on ``n`` vertices with even coordination number ``degree``."""
    if degree % 2 or not 0 < degree < n:
        raise ArgumentError(f"circulant degree must be even and below {n}, got {degree}")
    return nx.circulant_graph(n, list(range(1, degree // 2 + 1)))


# Catalog adaptors: primitive, validated parameters only, so manifests can name them.


@validate_call
def _catalog_tfi(n: int, boundary: str = "periodic", J: float = 1.0, h: float = 2.0) -> HamiltonianSpec:
    return build_transverse_ising(n, J, h, boundary)  # type: ignore[arg-type]


@validate_call
def _catalog_ising_circulant(n: int, boundary: str = "", degree: int = 2, J: float | None = None, h: float = 2.0) -> HamiltonianSpec:
    coupling = 1.0 / degree if J is None else J
    return build_ising_on_graph(circulant_graph(n, degree), coupling, h, name="ising_circulant")


@validate_call
def _catalog_graph_ring(n: int, boundary: str = "") -> HamiltonianSpec:
    return build_graph_state_hamiltonian(ring_graph(n))


@validate_call
def _catalog_cluster(n: int, boundary: str = "fixed_identity") -> HamiltonianSpec:
    return build_cluster_chain(n, boundary)  # type: ignore[arg-type]


@validate_call
def _catalog_toric(n: int = 0, boundary: str = "torus", Lx: int = 2, Ly: int = 2) -> HamiltonianSpec:
    # n = 0 takes the qubit count from the lattice
    spec = build_toric_code(Lx, Ly, boundary)  # type: ignore[arg-type]
    if n and n != spec.n_sites:
        raise ArgumentError(f"{boundary} toric code {Lx}x{Ly} has {spec.n_sites} qubits, not n={n}")
    return spec


@validate_call
def _catalog_lmg(
    n: int, boundary: str = "", lam: float = 1.0, gamma: float = 0.0, h: float = 1.0, field_axis: str = "z"
) -> HamiltonianSpec:
    return build_lmg_sector(n, lam, gamma, h, field_axis)  # type: ignore[arg-type]


@validate_call
def _catalog_product(
    n: int, boundary: str = "", thetas: list[float] | None = None, phis: list[float] | None = None, seed: int | None = None
) -> HamiltonianSpec:
    if seed is not None:
        return build_product_state_hamiltonian(random_site_states(n, seed))
    thetas = thetas or [0.0] * n
    phis = phis or [0.0] * n
    if len(thetas) != n or len(phis) != n:
        raise ArgumentError(f"product model needs {n} angles per list")
    return build_product_state_hamiltonian([bloch_state(t, p) for t, p in zip(thetas, phis, strict=True)])


@validate_call
def _catalog_random_two_local(
    n: int, boundary: str = "", seed: int = 0, density: float = 0.5, field: float = 1.0
) -> HamiltonianSpec:
    return build_random_two_local(n, seed, density, field)


MODEL_CATALOG: dict[str, ModelCatalogEntry] = {
    "tfi": ModelCatalogEntry(
        builder_id="build_transverse_ising",
        params={"J": "float", "h": "float"},
        boundaries=("open", "periodic"),
        expected_degeneracy=1,
    ),
    "ising_circulant": ModelCatalogEntry(
        builder_id="build_ising_on_graph",
        params={"degree": "even int", "J": "float (default 1/degree)", "h": "float"},
        expected_degeneracy=1,
    ),
    "graph_ring": ModelCatalogEntry(
        builder_id="build_graph_state_hamiltonian", params={}, expected_degeneracy=1, expected_gap=1.0
    ),
    "cluster": ModelCatalogEntry(
        builder_id="build_cluster_chain", params={}, boundaries=("fixed_identity", "open_degenerate"), expected_gap=1.0
    ),
    "toric": ModelCatalogEntry(
        builder_id="build_toric_code",
        params={"Lx": "int", "Ly": "int"},
        boundaries=("torus", "planar"),
        expected_gap=1.0,
    ),
    "lmg": ModelCatalogEntry(
        builder_id="build_lmg_sector",
        params={"lam": "float", "gamma": "float", "h": "float", "field_axis": "'x' | 'z'"},
    ),
    "product": ModelCatalogEntry(
        builder_id="build_product_state_hamiltonian",
        params={"thetas": "list[float]", "phis": "list[float]", "seed": "int"},
        expected_degeneracy=1,
        expected_gap=1.0,
    ),
    "random_two_local": ModelCatalogEntry(
        builder_id="build_random_two_local", params={"seed": "int", "density": "float", "field": "float"}
    ),
}

_CATALOG_BUILDERS: dict[str, Callable[..., HamiltonianSpec]] = {
    "tfi": _catalog_tfi,
    "ising_circulant": _catalog_ising_circulant,
    "graph_ring": _catalog_graph_ring,
    "cluster": _catalog_cluster,
    "toric": _catalog_toric,
    "lmg": _catalog_lmg,
    "product": _catalog_product,
    "random_two_local": _catalog_random_two_local,
}


def build_model(name: str, n: int, boundary: str | None = None, params: dict[str, Any] | None = None) -> HamiltonianSpec:
    """Build a catalog model from primitive configuration values.

    Raises:
        ArgumentError: On unknown names or parameters
        pydantic.ValidationError: On ill-typed parameter values
    """
    if name not in MODEL_CATALOG:
        raise ArgumentError(f"unknown model {name!r}; known: {', '.join(sorted(MODEL_CATALOG))}")
    entry = MODEL_CATALOG[name]
    params = dict(params or {})
    unknown = sorted(set(params) - set(entry.params))
    if unknown:
        raise ArgumentError(f"unknown parameter(s) {unknown} for model {name!r}")
    kwargs: dict[str, Any] = {"n": n, **params}
    if boundary:
        if entry.boundaries and boundary not in entry.boundaries:
            raise ArgumentError(f"boundary {boundary!r} not in {entry.boundaries} for model {name!r}")
        kwargs["boundary"] = boundary
    return _CATALOG_BUILDERS[name](**kwargs)


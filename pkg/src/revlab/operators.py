"""Pauli-string algebra, q-local operators and their matrix-free action on state vectors.

A Pauli string is stored as two bitmasks plus a phase exponent. Site ``i`` carries letter
``X`` when only bit ``i`` of ``x_mask`` is set, ``Z`` when only bit ``i`` of ``z_mask`` is set and
``Y`` when both are set. The represented operator is ``i**phase`` times the tensor product of the
letters, and since ``Y = iXZ`` that equals ``i**(phase + #Y) * X^x Z^z``.
"""

from __future__ import annotations

import itertools
import math
import re
from collections.abc import Iterable, Iterator, Sequence
from functools import lru_cache
from typing import Any, Literal

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, model_validator

from revlab.errors import ArgumentError, DimensionError, DimensionLimitError, UnsupportedRepresentationError
from revlab.settings import get_settings
from revlab.states import StateVector

COEFF_CUTOFF = 1e-14
MAX_EXACT_NORM_SITES = 12

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_LETTER = {bits: letter for letter, bits in _LETTER_BITS.items()}
_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)
# I, X, Y, Z
_PAULI_BLOCKS = np.array(
    [[[1, 0], [0, 1]], [[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=np.complex128
)
_TOKEN = re.compile(r"^([IXYZ])(\d+)$")


@lru_cache(maxsize=32)
def _basis_index(n_sites: int) -> NDArray[np.int64]:
    index = np.arange(2**n_sites, dtype=np.int64)
    index.setflags(write=False)
    return index


def _popcount(value: int) -> int:
    return value.bit_count()


class PauliString(BaseModel):
    """Phased tensor product of single-site Pauli letters."""

    model_config = ConfigDict(frozen=True)

    n_sites: int
    x_mask: int = 0
    z_mask: int = 0
    phase: int = 0  # exponent of i, 0..3

    @model_validator(mode="after")
    def _check_masks(self) -> PauliString:
        if self.n_sites < 1:
            raise ValueError("n_sites must be positive")
        limit = 1 << self.n_sites
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValueError(f"masks exceed {self.n_sites} sites")
        if not 0 <= self.phase < 4:
            raise ValueError("phase exponent must lie in 0..3")
        return self

    @classmethod
    def identity(cls, n_sites: int) -> PauliString:
        return cls(n_sites=n_sites)

    @classmethod
    def from_letters(cls, n_sites: int, letters: dict[int, str], phase: int = 0) -> PauliString:
        """Build a string from a ``{site: letter}`` map.

        Args:
            n_sites: Number of sites
            letters: Non-identity letters keyed by site
            phase: Exponent of i multiplying the string

        Returns:
            The PauliString
        """
        x_mask = 0
        z_mask = 0
        for site, letter in letters.items():
            if not 0 <= site < n_sites:
                raise ArgumentError(f"site {site} outside 0..{n_sites - 1}")
            x_bit, z_bit = _LETTER_BITS[letter.upper()]
            x_mask |= x_bit << site
            z_mask |= z_bit << site
        return cls(n_sites=n_sites, x_mask=x_mask, z_mask=z_mask, phase=phase % 4)

    @classmethod
    def on_sites(cls, n_sites: int, letter: str, sites: Iterable[int]) -> PauliString:
        """The same letter on every listed site."""
        return cls.from_letters(n_sites, dict.fromkeys(sites, letter))

    @property
    def support_mask(self) -> int:
        return self.x_mask | self.z_mask

    @property
    def support(self) -> frozenset[int]:
        mask = self.support_mask
        return frozenset(i for i in range(self.n_sites) if mask >> i & 1)

    @property
    def weight(self) -> int:
        return _popcount(self.support_mask)

    @property
    def letters(self) -> tuple[str, ...]:
        return tuple(_BITS_LETTER[(self.x_mask >> i & 1, self.z_mask >> i & 1)] for i in range(self.n_sites))

    @property
    def phase_factor(self) -> complex:
        return _PHASES[self.phase]

    @property
    def y_count(self) -> int:
        return _popcount(self.x_mask & self.z_mask)

    @property
    def label(self) -> str:
        """Letters in the textual notation, e.g. ``X0 Z3``; ``I`` for the identity."""
        tokens = [f"{letter}{site}" for site, letter in enumerate(self.letters) if letter != "I"]
        return " ".join(tokens) if tokens else "I"

    @property
    def key(self) -> tuple[int, int]:
        """Phase-free identity of the string."""
        return (self.x_mask, self.z_mask)

    def unphased(self) -> PauliString:
        return self if self.phase == 0 else self.model_copy(update={"phase": 0})

    def compose(self, other: PauliString) -> PauliString:
        """Group product ``self @ other`` with the exact phase."""
        return pauli_compose(self, other)

    __matmul__ = compose

    def adjoint(self) -> PauliString:
        return self.model_copy(update={"phase": (-self.phase) % 4})

    def commutes_with(self, other: PauliString) -> bool:
        if self.n_sites != other.n_sites:
            raise DimensionError(f"site counts differ: {self.n_sites} vs {other.n_sites}")
        overlap = _popcount(self.x_mask & other.z_mask) + _popcount(self.z_mask & other.x_mask)
        return overlap % 2 == 0

    def to_dense(self) -> NDArray[np.complex128]:
        """Dense ``2^n x 2^n`` matrix, for oracles on small systems."""
        return LocalOperator.from_pauli(self).to_dense()

    def __str__(self) -> str:
        prefix = {0: "", 1: "(1j) * ", 2: "(-1+0j) * ", 3: "(-1j) * "}[self.phase]
        return f"{prefix}{self.label}"


def pauli_compose(a: PauliString, b: PauliString) -> PauliString:
    """Return the product ``ab`` of two Pauli strings.

    Raises:
        DimensionError: If the strings act on different numbers of sites
    """
    if a.n_sites != b.n_sites:
        raise DimensionError(f"site counts differ: {a.n_sites} vs {b.n_sites}")
    x_mask = a.x_mask ^ b.x_mask
    z_mask = a.z_mask ^ b.z_mask
    # X^xa Z^za X^xb Z^zb = (-1)^|za & xb| X^(xa^xb) Z^(za^zb)
    phase = a.phase + b.phase + a.y_count + b.y_count + 2 * _popcount(a.z_mask & b.x_mask)
    phase -= _popcount(x_mask & z_mask)
    return PauliString.model_construct(n_sites=a.n_sites, x_mask=x_mask, z_mask=z_mask, phase=phase % 4)


def _require_full(psi: StateVector) -> None:
    if psi.representation != "full":
        raise UnsupportedRepresentationError("Pauli action needs the full 2^n representation")


def _pauli_diagonal(n_sites: int, x_mask: int, z_mask: int, coeff: complex) -> NDArray[np.complex128]:
    """Row-wise factors d[b] such that ``(P psi)[b] = d[b] * psi[b ^ x]``."""
    source = _basis_index(n_sites) ^ x_mask
    signs = 1.0 - 2.0 * (np.bitwise_count(source & z_mask) & 1)
    return coeff * signs


def apply_pauli(p: PauliString, psi: StateVector) -> StateVector:
    """Return ``p|psi>`` from bit-flip and sign rules, without building a matrix.

    Raises:
        DimensionError: On a site-count mismatch
        UnsupportedRepresentationError: For collective-spin states
    """
    _require_full(psi)
    if p.n_sites != psi.n_sites:
        raise DimensionError(f"string on {p.n_sites} sites applied to state on {psi.n_sites}")
    coeff = _PHASES[(p.phase + p.y_count) % 4]
    diagonal = _pauli_diagonal(p.n_sites, p.x_mask, p.z_mask, coeff)
    source = _basis_index(p.n_sites) ^ p.x_mask
    return psi.with_amplitudes(diagonal * psi.amplitudes[source])


def pauli_images(paulis: Sequence[PauliString], psi: StateVector) -> NDArray[np.complex128]:
    """Columns ``P|psi>`` for every listed string, shape ``(2^n, len(paulis))``."""
    _require_full(psi)
    index = _basis_index(psi.n_sites)
    images = np.empty((psi.dim, len(paulis)), dtype=np.complex128)
    for column, p in enumerate(paulis):
        if p.n_sites != psi.n_sites:
            raise DimensionError(f"string on {p.n_sites} sites applied to state on {psi.n_sites}")
        coeff = _PHASES[(p.phase + p.y_count) % 4]
        images[:, column] = _pauli_diagonal(p.n_sites, p.x_mask, p.z_mask, coeff) * psi.amplitudes[index ^ p.x_mask]
    return images


Term = tuple[complex, PauliString]


class LocalOperator(BaseModel):
    """Canonical weighted sum of unphased Pauli strings.

    Build instances through :meth:`from_terms`, which folds string phases into coefficients, merges
    duplicate strings and drops coefficients below ``1e-14``.
    """

    model_config = ConfigDict(frozen=True)

    n_sites: int
    terms: tuple[Term, ...] = ()

    @model_validator(mode="after")
    def _check_canonical(self) -> LocalOperator:
        seen: set[tuple[int, int]] = set()
        for _, pauli in self.terms:
            if pauli.n_sites != self.n_sites:
                raise ValueError("term acts on a different number of sites")
            if pauli.phase != 0:
                raise ValueError("canonical terms carry their phase in the coefficient")
            if pauli.key in seen:
                raise ValueError(f"duplicate term {pauli.label}")
            seen.add(pauli.key)
        return self

    @classmethod
    def from_terms(cls, n_sites: int, terms: Iterable[tuple[complex, PauliString]]) -> LocalOperator:
        merged: dict[tuple[int, int], complex] = {}
        for coeff, pauli in terms:
            if pauli.n_sites != n_sites:
                raise DimensionError(f"term on {pauli.n_sites} sites in operator on {n_sites}")
            key = pauli.key
            merged[key] = merged.get(key, 0.0) + complex(coeff) * pauli.phase_factor
        canonical = [
            (coeff, PauliString.model_construct(n_sites=n_sites, x_mask=x, z_mask=z, phase=0))
            for (x, z), coeff in merged.items()
            if abs(coeff) >= COEFF_CUTOFF
        ]
        canonical.sort(key=lambda term: _term_order(term[1]))
        return cls.model_construct(n_sites=n_sites, terms=tuple(canonical))

    @classmethod
    def from_pauli(cls, pauli: PauliString, coeff: complex = 1.0) -> LocalOperator:
        return cls.from_terms(pauli.n_sites, [(coeff, pauli)])

    @classmethod
    def identity(cls, n_sites: int, coeff: complex = 1.0) -> LocalOperator:
        return cls.from_pauli(PauliString.identity(n_sites), coeff)

    @classmethod
    def zero(cls, n_sites: int) -> LocalOperator:
        return cls.model_construct(n_sites=n_sites, terms=())

    @classmethod
    def single_site(cls, n_sites: int, site: int, matrix: NDArray[Any] | Sequence[Sequence[complex]]) -> LocalOperator:
        """Pauli expansion of a 2x2 matrix acting on one site."""
        m = np.asarray(matrix, dtype=np.complex128)
        if m.shape != (2, 2):
            raise ArgumentError(f"single-site matrix must be 2x2, got {m.shape}")
        terms: list[Term] = []
        for letter, pauli_matrix in SINGLE_SITE_PAULIS.items():
            coeff = complex(np.trace(pauli_matrix.conj().T @ m)) / 2.0
            pauli = PauliString.identity(n_sites) if letter == "I" else PauliString.from_letters(n_sites, {site: letter})
            terms.append((coeff, pauli))
        return cls.from_terms(n_sites, terms)

    @property
    def locality_q(self) -> int:
        return max((pauli.weight for _, pauli in self.terms), default=0)

    @property
    def support(self) -> frozenset[int]:
        mask = 0
        for _, pauli in self.terms:
            mask |= pauli.support_mask
        return frozenset(i for i in range(self.n_sites) if mask >> i & 1)

    def is_real(self) -> bool:
        """True when every matrix element in the computational basis is real."""
        return all(abs((coeff * _PHASES[pauli.y_count % 4]).imag) < COEFF_CUTOFF for coeff, pauli in self.terms)

    def __add__(self, other: LocalOperator) -> LocalOperator:
        self._check_sites(other)
        return LocalOperator.from_terms(self.n_sites, [*self.terms, *other.terms])

    def __sub__(self, other: LocalOperator) -> LocalOperator:
        return self + other * -1.0

    def __mul__(self, scalar: complex) -> LocalOperator:
        return LocalOperator.from_terms(self.n_sites, [(coeff * scalar, pauli) for coeff, pauli in self.terms])

    __rmul__ = __mul__

    def __matmul__(self, other: LocalOperator) -> LocalOperator:
        self._check_sites(other)
        products = [(ca * cb, pauli_compose(pa, pb)) for ca, pa in self.terms for cb, pb in other.terms]
        return LocalOperator.from_terms(self.n_sites, products)

    def adjoint(self) -> LocalOperator:
        return LocalOperator.model_construct(
            n_sites=self.n_sites, terms=tuple((coeff.conjugate(), pauli) for coeff, pauli in self.terms)
        )

    def commutator(self, other: LocalOperator) -> LocalOperator:
        return self @ other - other @ self

    def is_close(self, other: LocalOperator, atol: float = 1e-12) -> bool:
        difference = self - other
        return all(abs(coeff) <= atol for coeff, _ in difference.terms)

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return self.is_close(self.adjoint(), atol)

    def triangle_norm(self) -> float:
        return float(sum(abs(coeff) for coeff, _ in self.terms))

    def apply(self, psi: StateVector) -> StateVector:
        return apply_local_operator(self, psi)

    def expectation(self, psi: StateVector) -> complex:
        return complex(np.vdot(psi.amplitudes, apply_local_operator(self, psi).amplitudes))

    def to_sparse(self) -> sp.csr_matrix:
        """Sparse ``2^n x 2^n`` matrix assembled term group by term group."""
        dim = 2**self.n_sites
        index = _basis_index(self.n_sites)
        rows: list[NDArray[np.int64]] = []
        cols: list[NDArray[np.int64]] = []
        data: list[NDArray[np.complex128]] = []
        for x_mask, diagonal in _grouped_diagonals(self):
            rows.append(index)
            cols.append(index ^ x_mask)
            data.append(diagonal)
        if not data:
            return sp.csr_matrix((dim, dim), dtype=np.complex128)
        matrix = sp.coo_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
        ).tocsr()
        matrix.sum_duplicates()
        return matrix

    def to_dense(self) -> NDArray[np.complex128]:
        if self.n_sites > MAX_EXACT_NORM_SITES:
            raise DimensionLimitError(f"dense matrix on {self.n_sites} sites exceeds {MAX_EXACT_NORM_SITES}")
        return np.asarray(self.to_sparse().toarray(), dtype=np.complex128)

    def restricted(self) -> tuple[LocalOperator, tuple[int, ...]]:
        """Same operator relabelled onto its joint support, sites in ascending order."""
        sites = tuple(sorted(self.support))
        if not sites:
            return LocalOperator.from_terms(1, [(c, PauliString.identity(1)) for c, _ in self.terms]), sites
        position = {site: k for k, site in enumerate(sites)}
        terms: list[Term] = []
        for coeff, pauli in self.terms:
            x_mask = sum(1 << position[s] for s in pauli.support if pauli.x_mask >> s & 1)
            z_mask = sum(1 << position[s] for s in pauli.support if pauli.z_mask >> s & 1)
            terms.append((coeff, PauliString(n_sites=len(sites), x_mask=x_mask, z_mask=z_mask)))
        return LocalOperator.from_terms(len(sites), terms), sites

    def _check_sites(self, other: LocalOperator) -> None:
        if self.n_sites != other.n_sites:
            raise DimensionError(f"site counts differ: {self.n_sites} vs {other.n_sites}")

    def __str__(self) -> str:
        return format_operator(self)


SINGLE_SITE_PAULIS: dict[str, NDArray[np.complex128]] = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def _term_order(pauli: PauliString) -> tuple[int, tuple[int, ...], int, int]:
    return (pauli.weight, tuple(sorted(pauli.support)), pauli.x_mask, pauli.z_mask)


def _grouped_diagonals(operator: LocalOperator) -> Iterator[tuple[int, NDArray[np.complex128]]]:
    """Yield ``(x_mask, d)`` with ``(O psi)[b] = sum over groups of d[b] * psi[b ^ x_mask]``."""
    groups: dict[int, list[Term]] = {}
    for coeff, pauli in operator.terms:
        groups.setdefault(pauli.x_mask, []).append((coeff, pauli))
    for x_mask in sorted(groups):
        diagonal = np.zeros(2**operator.n_sites, dtype=np.complex128)
        for coeff, pauli in groups[x_mask]:
            diagonal += _pauli_diagonal(operator.n_sites, x_mask, pauli.z_mask, coeff * _PHASES[pauli.y_count % 4])
        yield x_mask, diagonal


def apply_local_operator(o: LocalOperator, psi: StateVector) -> StateVector:
    """Return ``o|psi>`` as the ordered sum of its term actions.

    Raises:
        DimensionError: On a site-count mismatch
        UnsupportedRepresentationError: For collective-spin states
    """
    _require_full(psi)
    if o.n_sites != psi.n_sites:
        raise DimensionError(f"operator on {o.n_sites} sites applied to state on {psi.n_sites}")
    index = _basis_index(o.n_sites)
    out = np.zeros_like(psi.amplitudes)
    for x_mask, diagonal in _grouped_diagonals(o):
        out += diagonal * psi.amplitudes[index ^ x_mask]
    return psi.with_amplitudes(out)


def basis_count(region_size: int, q: int) -> int:
    """Number of Pauli strings with support of size at most ``q`` inside a region."""
    return sum(3**s * math.comb(region_size, s) for s in range(min(q, region_size) + 1))


def region_sites(n: int, region: Iterable[int] | None) -> list[int]:
    """Sorted distinct sites of ``region`` (all sites when None).

    Raises:
        ArgumentError: If a site lies outside 0..n-1
    """
    sites = sorted(set(range(n) if region is None else region))
    if any(not 0 <= s < n for s in sites):
        raise ArgumentError(f"region {sites} not inside 0..{n - 1}")
    return sites


def _twirl_weights(region_size: int, q: int) -> NDArray[np.float64]:
    """``lam[w] = sum_P chi(P, Q)`` over strings with support at most q, for Q of weight w in the region.

    A letter on a site where Q is the identity always commutes (3 choices); on a site where Q is
    non-trivial one letter commutes and two anticommute (net -1).
    """
    m = region_size
    return np.array(
        [
            sum(
                math.comb(w, a) * (-1) ** a * math.comb(m - w, b) * 3**b
                for a in range(w + 1)
                for b in range(m - w + 1)
                if a + b <= q
            )
            for w in range(m + 1)
        ],
        dtype=np.float64,
    )


def q_local_gram(psi: StateVector, q: int, region: Iterable[int] | None = None) -> NDArray[np.complex128]:
    """``sum_P P|psi><psi|P`` over every Pauli string with support at most ``q`` inside ``region``.

    Conjugating a string ``Q`` by ``P`` only flips its sign, so the sum scales each Pauli component
    of ``|psi><psi|`` by a factor depending on its weight inside the region. The components come
    from a per-site basis change, which avoids enumerating the strings.

    Raises:
        ArgumentError: If q is negative or the region leaves 0..n-1
        UnsupportedRepresentationError: For collective-spin states
    """
    _require_full(psi)
    if q < 0:
        raise ArgumentError(f"q must be non-negative, got {q}")
    n = psi.n_sites
    sites = set(region_sites(n, region))
    lam = _twirl_weights(len(sites), q)
    # tensor axis j carries site n-1-j; rows and columns are interleaved into one axis of size 4
    interleave = [axis for j in range(n) for axis in (j, n + j)]
    rho = np.outer(psi.amplitudes, psi.amplitudes.conj()).reshape((2,) * (2 * n))
    tensor = rho.transpose(interleave).reshape((4,) * n)
    forward = _PAULI_BLOCKS.transpose(0, 2, 1).reshape(4, 4)
    backward = 0.5 * _PAULI_BLOCKS.reshape(4, 4).T
    axes = [j for j in range(n) if n - 1 - j in sites]
    weight = np.zeros((1,) * n, dtype=np.int64)
    for j in axes:
        tensor = np.moveaxis(np.tensordot(forward, tensor, axes=([1], [j])), 0, j)
        shape = [1] * n
        shape[j] = 4
        weight = weight + np.array([0, 1, 1, 1]).reshape(shape)
    tensor = tensor * lam[weight]
    for j in axes:
        tensor = np.moveaxis(np.tensordot(backward, tensor, axes=([1], [j])), 0, j)
    gram = tensor.reshape((2,) * (2 * n)).transpose(np.argsort(interleave)).reshape(psi.dim, psi.dim)
    return 0.5 * (gram + gram.conj().T)


def enumerate_q_local_basis(
    n: int,
    q: int,
    region: Iterable[int] | None = None,
    symmetry_filter: Sequence[PauliString] | None = None,
    max_size: int | None = None,
) -> list[PauliString]:
    """All unphased Pauli strings with support size at most ``q``, identity first.

    Args:
        n: Number of sites
        q: Maximal support size
        region: Optional site set the supports must lie in
        symmetry_filter: Keep only strings commuting with every listed generator
        max_size: Cap on the unfiltered count (defaults to ``max_basis_size`` from settings)

    Returns:
        Strings ordered by support size, then support, then letters X < Y < Z

    Raises:
        ArgumentError: If q is negative or the region leaves 0..n-1
        DimensionLimitError: If the unfiltered count exceeds the cap
    """
    if q < 0:
        raise ArgumentError(f"q must be non-negative, got {q}")
    sites = region_sites(n, region)
    cap = get_settings().max_basis_size if max_size is None else max_size
    count = basis_count(len(sites), q)
    if count > cap:
        raise DimensionLimitError(f"{count} basis strings exceed the cap {cap}")
    generators = list(symmetry_filter or ())
    basis: list[PauliString] = []
    for size in range(min(q, len(sites)) + 1):
        for support in itertools.combinations(sites, size):
            for letters in itertools.product("XYZ", repeat=size):
                pauli = PauliString.from_letters(n, dict(zip(support, letters, strict=True)))
                if all(pauli.commutes_with(generator) for generator in generators):
                    basis.append(pauli)
    return basis


def operator_norm(o: LocalOperator, mode: Literal["exact", "triangle"] = "exact") -> float:
    """Operator norm of ``o``.

    Args:
        o: The operator
        mode: ``exact`` for the largest singular value on the joint support, ``triangle`` for the
            sum of absolute coefficients

    Returns:
        The norm

    Raises:
        DimensionLimitError: If exact mode meets a support larger than 12 sites
    """
    if mode == "triangle":
        return o.triangle_norm()
    if len(o.support) > MAX_EXACT_NORM_SITES:
        raise DimensionLimitError(f"exact norm on {len(o.support)} sites exceeds {MAX_EXACT_NORM_SITES}")
    if not o.terms:
        return 0.0
    reduced, _ = o.restricted()
    return float(np.linalg.norm(reduced.to_dense(), ord=2))


def _format_coeff(coeff: complex) -> str:
    if coeff.imag == 0.0:
        return repr(coeff.real)
    return repr(coeff)


def format_operator(o: LocalOperator) -> str:
    """Serialize as one ``coefficient * letters`` term per line."""
    return "\n".join(f"{_format_coeff(coeff)} * {pauli.label}" for coeff, pauli in o.terms)


def parse_pauli(text: str, n_sites: int) -> PauliString:
    """Parse space-separated ``<letter><site>`` tokens, e.g. ``X0 Z3 Y7``."""
    letters: dict[int, str] = {}
    for token in text.split():
        match = _TOKEN.match(token)
        if match is None:
            raise ArgumentError(f"bad Pauli token {token!r}")
        letter, site = match.group(1), int(match.group(2))
        if letter == "I":
            continue
        if site in letters:
            raise ArgumentError(f"site {site} appears twice in {text!r}")
        letters[site] = letter
    return PauliString.from_letters(n_sites, letters)


def parse_operator(text: str, n_sites: int) -> LocalOperator:
    """Parse the textual notation, one term per line such as ``1.5 * X0 Z3 Y7``."""
    terms: list[Term] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "*" in line:
            coeff_text, letters = line.split("*", 1)
            coeff = complex(coeff_text.strip())
        else:
            coeff, letters = 1.0 + 0.0j, line
        terms.append((coeff, parse_pauli(letters, n_sites)))
    return LocalOperator.from_terms(n_sites, terms)

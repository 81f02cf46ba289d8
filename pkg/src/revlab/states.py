"""State vectors over the computational basis or a collective-spin sector."""

from __future__ import annotations

from typing import Any, Literal

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from revlab.errors import DimensionError

Representation = Literal["full", "collective_spin"]


class StateVector(BaseModel):
    """Complex amplitudes with site 0 as the least significant bit of the basis index.

    In the ``collective_spin`` representation the amplitudes live in the maximal-spin sector of
    ``n_sites`` spins-1/2, indexed by ``S_z = -S, ..., +S`` (length ``n_sites + 1``).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n_sites: int
    amplitudes: np.ndarray
    representation: Representation = "full"

    @field_validator("amplitudes", mode="before")
    @classmethod
    def _as_complex_array(cls, value: Any) -> NDArray[np.complex128]:
        array = np.array(value, dtype=np.complex128).reshape(-1)
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def _check_length(self) -> StateVector:
        if self.n_sites < 1:
            raise DimensionError("n_sites must be positive")
        expected = self.dim_for(self.n_sites, self.representation)
        if self.amplitudes.shape[0] != expected:
            raise DimensionError(
                f"{self.representation} state on {self.n_sites} sites needs {expected} amplitudes, "
                f"got {self.amplitudes.shape[0]}"
            )
        if not np.all(np.isfinite(self.amplitudes)):
            raise DimensionError("amplitudes must be finite")
        return self

    @staticmethod
    def dim_for(n_sites: int, representation: Representation = "full") -> int:
        """Hilbert-space dimension of a representation."""
        return n_sites + 1 if representation == "collective_spin" else 2**n_sites

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> StateVector:
        """Return the state scaled to unit norm.

        Raises:
            DimensionError: If the state is the zero vector
        """
        norm = self.norm()
        if norm == 0.0:
            raise DimensionError("cannot normalize the zero vector")
        return self.with_amplitudes(self.amplitudes / norm)

    def with_amplitudes(self, amplitudes: NDArray[np.complexfloating[Any, Any]]) -> StateVector:
        """Same sites and representation, new amplitudes."""
        return StateVector(n_sites=self.n_sites, amplitudes=amplitudes, representation=self.representation)

    def __add__(self, other: StateVector) -> StateVector:
        _check_compatible(self, other)
        return self.with_amplitudes(self.amplitudes + other.amplitudes)

    def __sub__(self, other: StateVector) -> StateVector:
        _check_compatible(self, other)
        return self.with_amplitudes(self.amplitudes - other.amplitudes)

    def __mul__(self, scalar: complex) -> StateVector:
        return self.with_amplitudes(self.amplitudes * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> StateVector:
        return self.with_amplitudes(self.amplitudes / scalar)


def _check_compatible(psi: StateVector, phi: StateVector) -> None:
    if psi.n_sites != phi.n_sites or psi.representation != phi.representation:
        raise DimensionError(
            f"incompatible states: {psi.n_sites} sites ({psi.representation}) vs "
            f"{phi.n_sites} sites ({phi.representation})"
        )


def inner(psi: StateVector, phi: StateVector) -> complex:
    """Return <psi|phi>, conjugating the first argument.

    Raises:
        DimensionError: If the states differ in size or representation
    """
    _check_compatible(psi, phi)
    return complex(np.vdot(psi.amplitudes, phi.amplitudes))


def basis_state(n_sites: int, index: int) -> StateVector:
    """Computational basis state |index> on ``n_sites`` qubits."""
    amplitudes = np.zeros(2**n_sites, dtype=np.complex128)
    amplitudes[index] = 1.0
    return StateVector(n_sites=n_sites, amplitudes=amplitudes)


def product_state(site_states: list[NDArray[np.complexfloating[Any, Any]]] | list[list[complex]]) -> StateVector:
    """Tensor product of single-site states, site 0 first.

    Args:
        site_states: One length-2 amplitude vector per site

    Returns:
        Product state with site 0 on the least significant bit
    """
    amplitudes = np.ones(1, dtype=np.complex128)
    for site in site_states:
        # kron(new, old) puts the later site on the higher bit
        amplitudes = np.kron(np.asarray(site, dtype=np.complex128), amplitudes)
    return StateVector(n_sites=len(site_states), amplitudes=amplitudes)

"""Shared models and ground solutions; solved once per session."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import pytest

if TYPE_CHECKING:
    from collections.abc import Callable

    from revlab.models import HamiltonianSpec
    from revlab.spectral import GroundSolution
    from revlab.states import StateVector


@pytest.fixture(scope="session")
def tfi8() -> HamiltonianSpec:
    """Periodic transverse-field Ising chain, n=8, h=2J."""
    from revlab.models import build_transverse_ising

    return build_transverse_ising(8, 1.0, 2.0, "periodic")


@pytest.fixture(scope="session")
def tfi8_solution(tfi8: HamiltonianSpec) -> GroundSolution:
    from revlab.spectral import ground_state

    return ground_state(tfi8)


@pytest.fixture(scope="session")
def graph_ring8() -> HamiltonianSpec:
    from revlab.models import build_model

    return build_model("graph_ring", 8)


@pytest.fixture(scope="session")
def graph_ring8_solution(graph_ring8: HamiltonianSpec) -> GroundSolution:
    from revlab.spectral import ground_state

    return ground_state(graph_ring8)


@pytest.fixture(scope="session")
def toric_torus() -> HamiltonianSpec:
    """The 2x2 torus; eight qubits and a four-fold ground space."""
    from revlab.models import build_model

    return build_model("toric", 0, "torus", {"Lx": 2, "Ly": 2})


@pytest.fixture
def random_state() -> Callable[..., StateVector]:
    """Factory for seeded normalized random states."""
    from revlab.settings import rng_for
    from revlab.states import StateVector

    def make(n: int, seed: int = 0) -> StateVector:
        rng = rng_for(seed)
        amplitudes = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        return StateVector(n_sites=n, amplitudes=amplitudes / np.linalg.norm(amplitudes))

    return make

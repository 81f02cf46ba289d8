"""Tests for ground states, spectra and energy distributions."""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
import pytest

if TYPE_CHECKING:
    from collections.abc import Callable

    from revlab.models import HamiltonianSpec
    from revlab.spectral import GroundSolution
    from revlab.states import StateVector

    StateFactory = Callable[..., StateVector]


class TestGroundState:
    """Tests for solver selection and ground-space bookkeeping."""

    def test_dense_and_iterative_agree(self, tfi8: HamiltonianSpec) -> None:
        """Test that Lanczos reproduces the dense ground energy and gap."""
        # Given: An 8-site Ising chain
        from revlab.spectral import ground_state

        # When: Solving densely and iteratively
        dense = ground_state(tfi8, solver="dense")
        iterative = ground_state(tfi8, solver="iterative", seed=5)

        # Then: Energies, gaps and states agree
        assert iterative.energy_shift == pytest.approx(dense.energy_shift, abs=1e-9)
        assert iterative.gap == pytest.approx(dense.gap, abs=1e-7)
        overlap = abs(np.vdot(dense.ground_state.amplitudes, iterative.ground_state.amplitudes))
        assert overlap == pytest.approx(1.0, abs=1e-8)

    def test_ground_state_is_eigenvector(self, tfi8: HamiltonianSpec, tfi8_solution: GroundSolution) -> None:
        """Test that the shifted Hamiltonian annihilates the ground state."""
        # Given: The chain shifted by its ground energy
        from revlab.spectral import apply_hamiltonian

        shifted = tfi8.shifted(tfi8_solution.energy_shift)

        # When: Applying it to the ground state
        residual = apply_hamiltonian(shifted, tfi8_solution.ground_state)

        # Then: Nothing is left
        assert residual.norm() < 1e-9

    def test_collective_sector_uses_banded_solver(self) -> None:
        """Test that a collective-spin sector is solved as a banded matrix."""
        from revlab.models import build_lmg_sector
        from revlab.spectral import ground_state

        solution = ground_state(build_lmg_sector(64, 1.0, 0.0, 1.0))
        assert solution.solver == "banded"
        assert solution.gap > 0.0

    def test_dense_limit_raises(self) -> None:
        """Test that forcing dense beyond the limit raises DimensionLimitError."""
        from revlab.errors import DimensionLimitError
        from revlab.models import build_transverse_ising
        from revlab.spectral import dense_eigensystem

        with pytest.raises(DimensionLimitError):
            dense_eigensystem(build_transverse_ising(13, 1.0, 1.0))

    def test_degenerate_ground_space_reported(self, toric_torus: HamiltonianSpec) -> None:
        """Test that the torus reports four ground states and no unique one."""
        from revlab.spectral import ground_state

        solution = ground_state(toric_torus)
        assert not solution.unique
        assert len(solution.ground_states) == 4


class TestFullSpectrum:
    """Tests for the shifted full spectrum."""

    def test_starts_at_zero_and_ascends(self, graph_ring8: HamiltonianSpec) -> None:
        """Test that the shifted spectrum starts at zero and is sorted."""
        from revlab.spectral import full_spectrum

        energies = full_spectrum(graph_ring8)
        assert energies[0] == 0.0
        assert all(b >= a for a, b in zip(energies, energies[1:], strict=False))
        assert len(energies) == 256

    def test_stabilizer_spectrum_is_integer(self, graph_ring8: HamiltonianSpec) -> None:
        """Test that commuting stabilizer penalties give integer levels."""
        from revlab.spectral import full_spectrum

        energies = np.array(full_spectrum(graph_ring8))
        assert np.allclose(energies, np.round(energies), atol=1e-9)


class TestEnergyDistribution:
    """Tests for energy-resolved weights of a state."""

    def test_weights_sum_to_norm_squared(self, tfi8: HamiltonianSpec, random_state: StateFactory) -> None:
        """Test that weights sum to the squared norm of an unnormalized state."""
        # Given: A random state scaled to norm 1/2
        from revlab.spectral import energy_distribution

        psi = random_state(8, seed=2) * 0.5

        # When: Resolving it in energy
        dist = energy_distribution(tfi8, psi)

        # Then: The weights sum to 1/4
        assert dist.total_weight == pytest.approx(0.25)

    def test_ground_state_sits_at_zero(self, tfi8: HamiltonianSpec, tfi8_solution: GroundSolution) -> None:
        """Test that the ground state has all weight at zero energy."""
        from revlab.spectral import energy_distribution, tail_weight

        dist = energy_distribution(tfi8, tfi8_solution.ground_state)
        assert tail_weight(dist, 0.0) == pytest.approx(1.0)
        assert tail_weight(dist, tfi8_solution.gap) < 1e-12

    def test_unsorted_distribution_rejected(self) -> None:
        """Test that energies must ascend."""
        from revlab.spectral import EnergyDistribution

        with pytest.raises(ValueError):
            EnergyDistribution(energies=(1.0, 0.0), weights=(0.5, 0.5))


class TestCsvExport:
    """Tests for the lossless CSV format."""

    def test_seventeen_significant_digits(self, tmp_path: Path) -> None:
        """Test that exported floats round-trip exactly."""
        import pandas as pd

        from revlab.spectral import spectrum_frame, write_csv

        energies = [0.0, 1.0 / 3.0, np.pi]
        path = write_csv(spectrum_frame(energies), tmp_path / "nested" / "spectrum.csv")
        loaded = pd.read_csv(path)
        assert loaded["energy"].tolist() == energies
        assert list(loaded.columns) == ["index", "energy", "weight"]

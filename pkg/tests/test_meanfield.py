"""Tests for reduced densities and mean-field deviations."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np
import pytest

if TYPE_CHECKING:
    from collections.abc import Callable

    from revlab.models import HamiltonianSpec
    from revlab.spectral import GroundSolution
    from revlab.states import StateVector

    StateFactory = Callable[..., StateVector]


def _bell_pair() -> object:
    from revlab.states import StateVector

    return StateVector(n_sites=2, amplitudes=np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2.0))


def _y_correlated() -> object:
    """Three sites whose first two share only a Y Y correlation, purified by site 2."""
    from revlab.states import StateVector, product_state

    y_plus = np.array([1.0, 1.0j]) / math.sqrt(2.0)
    y_minus = np.array([1.0, -1.0j]) / math.sqrt(2.0)
    first = product_state([y_plus, y_plus, [1.0, 0.0]]).amplitudes
    second = product_state([y_minus, y_minus, [0.0, 1.0]]).amplitudes
    return StateVector(n_sites=3, amplitudes=(first + second) / math.sqrt(2.0))


class TestReducedDensity:
    """Tests for one- and two-site marginals."""

    def test_single_site_of_basis_state(self) -> None:
        """Test that """
        from revlab.labs.meanfield import reduced_density
        from revlab.states import basis_state

        rho = reduced_density(basis_state(2, 0b01), [0])
        assert np.allclose(rho.matrix, [[0, 0], [0, 1]])

    def test_trace_out_matches_direct_marginal(self, random_state: StateFactory) -> None:
        """Test that tracing a pair marginal agrees with the one-site marginal."""
        from revlab.labs.meanfield import reduced_density

        psi = random_state(4, seed=21)
        pair = reduced_density(psi, (3, 1))
        assert np.allclose(pair.trace_out(1).matrix, reduced_density(psi, [3]).matrix)
        assert np.allclose(pair.trace_out(3).matrix, reduced_density(psi, [1]).matrix)

    @pytest.mark.parametrize("sites", [(), (0, 1, 2), (1, 1), (5,)])
    def test_bad_sites_raise(self, sites: tuple[int, ...]) -> None:
        """Test empty, three-site, repeated and out-of-range site lists."""
        from revlab.errors import ArgumentError
        from revlab.labs.meanfield import reduced_density
        from revlab.states import basis_state

        with pytest.raises(ArgumentError):
            reduced_density(basis_state(3, 0), sites)

    def test_trace_out_foreign_site_raises(self) -> None:
        """Test that tracing out a site outside the pair raises ArgumentError."""
        from revlab.errors import ArgumentError
        from revlab.labs.meanfield import reduced_density

        pair = reduced_density(_bell_pair(), (0, 1))  # type: ignore[arg-type]
        with pytest.raises(ArgumentError):
            pair.trace_out(2)

    def test_non_hermitian_rejected(self) -> None:
        """Test that a non-Hermitian matrix does not validate."""
        from revlab.labs.meanfield import ReducedDensity

        with pytest.raises(ValueError):
            ReducedDensity(sites=(0,), matrix=[[1.0, 1.0], [0.0, 0.0]])


class TestMeanFieldDeviation:
    """Tests for summed two-site deviations."""

    def test_product_state_has_no_deviation(self) -> None:
        """Test that a product state has zero deviation for every pair."""
        # Given: A random product state on six sites
        from revlab.labs.meanfield import mf_deviation_sum
        from revlab.models import random_site_states
        from revlab.states import product_state

        # When: Summing deviations from site 0 to the rest
        report = mf_deviation_sum(product_state(random_site_states(6, seed=7)), 0, range(1, 6))

        # Then: Every pair factorizes
        assert report.total < 1e-10
        assert all(norm < 1e-10 for norm in report.trace_norms)

    @pytest.mark.parametrize("M", [4, 6, 9])
    def test_hybrid_closed_form(self, M: int) -> None:
        """Test that the GHZ/W hybrid gives sqrt(M)/2 + 1/4."""
        from revlab.labs.meanfield import mf_deviation_sum
        from revlab.models import make_special_state

        report = mf_deviation_sum(make_special_state("ghz_w_hybrid", M + 1), 0, range(1, M + 1))
        assert report.total == pytest.approx(math.sqrt(M) / 2.0 + 0.25, abs=1e-9)
        assert len(report.to_frame()) == M

    def test_scale_uses_gap(self) -> None:
        """Test that the reference scale is 1 / dE."""
        from revlab.labs.meanfield import mf_deviation_sum
        from revlab.models import make_special_state

        report = mf_deviation_sum(make_special_state("w", 5), 0, [1, 2, 3, 4], delta_e=0.25)
        assert report.scale == pytest.approx(4.0)

    def test_site_inside_region_raises(self) -> None:
        """Test that the reference site may not be part of the summed region."""
        from revlab.errors import ArgumentError
        from revlab.labs.meanfield import mf_deviation_sum
        from revlab.models import make_special_state

        with pytest.raises(ArgumentError):
            mf_deviation_sum(make_special_state("w", 4), 1, [1, 2])


class TestProjectorDecomposition:
    """Tests for the pinched projector sums."""

    def test_bell_pair(self) -> None:
        """Test that the Bell pair has deviation 3/4 against four pinched quarters."""
        from revlab.labs.meanfield import projector_decomposition_check

        report = projector_decomposition_check(_bell_pair(), 0, 1)  # type: ignore[arg-type]
        assert report.lhs == pytest.approx(0.75)
        assert report.rhs == pytest.approx(1.0)
        assert report.rhs_complete == pytest.approx(1.5)
        assert report.holds and report.holds_complete

    def test_y_correlation_escapes_four_projectors(self) -> None:
        """Test that a pure Y Y correlation is invisible to the Z and X projectors."""
        # Given: Marginal (I + Y Y) / 4 on sites 0 and 1
        psi = _y_correlated()

        # When: Comparing both projector sets
        from revlab.labs.meanfield import projector_decomposition_check

        report = projector_decomposition_check(psi, 0, 1)  # type: ignore[arg-type]

        # Then: Only the complete set bounds the deviation
        assert report.lhs == pytest.approx(0.25)
        assert report.rhs == pytest.approx(0.0, abs=1e-12)
        assert not report.holds
        assert report.holds_complete


class TestEnergyDensity:
    """Tests for mean-field bond energies."""

    def test_ising_site_has_two_bonds(self, tfi8: HamiltonianSpec, tfi8_solution: GroundSolution) -> None:
        """Test that site 0 of the periodic chain bonds to sites 1 and 7."""
        # Given/When: Bond errors around site 0 of the periodic chain
        from revlab.labs.meanfield import energy_density_mf_error

        report = energy_density_mf_error(tfi8, 0, tfi8_solution)

        # Then: Two neighbours and the gap-based scale
        assert report.coordination == 2
        assert {bond.j for bond in report.bonds} == {1, 7}
        assert report.averaged_error <= report.mean_bond_error + 1e-12
        assert report.scale == pytest.approx(1.0 / math.sqrt(2.0 * tfi8_solution.gap))

    def test_three_body_model_raises(self, graph_ring8: HamiltonianSpec) -> None:
        """Test that a model with three-site terms has no bond decomposition."""
        from revlab.errors import ArgumentError
        from revlab.labs.meanfield import energy_density_mf_error

        with pytest.raises(ArgumentError):
            energy_density_mf_error(graph_ring8)

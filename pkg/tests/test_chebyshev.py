"""Tests for Chebyshev polynomials and the reverse filter."""

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


class TestChebyshevT:
    """Tests for T_n inside and outside [-1, 1]."""

    @pytest.mark.parametrize(("n", "x", "expected"), [(0, 0.3, 1.0), (1, -2.5, -2.5), (2, 0.5, -0.5), (3, 0.5, -1.0)])
    def test_known_values(self, n: int, x: float, expected: float) -> None:
        """Test T_n at a few points with closed-form values."""
        from revlab.chebyshev import chebyshev_T

        assert chebyshev_T(n, x) == pytest.approx(expected)

    def test_matches_recurrence_outside_interval(self) -> None:
        """Test that the cosh form equals the three-term recurrence beyond |x| = 1."""
        # Given: Points on both sides of the interval
        from revlab.chebyshev import chebyshev_T

        x = np.array([-3.0, -1.2, 1.7, 4.0])

        # When: Running the recurrence up to degree 6
        previous, current = np.ones_like(x), x.copy()
        for _ in range(2, 7):
            previous, current = current, 2.0 * x * current - previous

        # Then: The closed form agrees
        assert np.allclose(chebyshev_T(6, x), current, rtol=1e-12)

    def test_negative_degree_raises(self) -> None:
        """Test that a negative degree raises ArgumentError."""
        from revlab.chebyshev import chebyshev_T
        from revlab.errors import ArgumentError

        with pytest.raises(ArgumentError):
            chebyshev_T(-1, 0.0)


class TestFilterParams:
    """Tests for n0, E_c, xi and lambda."""

    def test_derived_quantities(self) -> None:
        """Test the Ising chain numbers for q=8, |L|=4, dE=1."""
        # Given/When: k=2, g=4
        from revlab.chebyshev import filter_params

        params = filter_params(8, 2, 4.0, 4, 1.0)

        # Then: n0=4, E_c = 16 + 256, xi = sqrt(1 + 2 E_c)
        assert params.n0 == 4
        assert params.e_c == pytest.approx(272.0)
        assert params.xi == pytest.approx(math.sqrt(545.0))
        assert params.lam == pytest.approx(1.0 / 32.0)

    def test_q_below_k_is_degenerate(self) -> None:
        """Test that q < k gives n0 = 0 and a filter equal to one everywhere."""
        from revlab.chebyshev import eval_filter, filter_params

        params = filter_params(1, 2, 4.0, 4, 1.0)
        assert params.degenerate
        assert np.allclose(eval_filter(params, np.array([0.0, 5.0, 500.0])), 1.0)

    def test_zero_gap_raises(self) -> None:
        """Test that a zero gap raises GaplessError."""
        from revlab.chebyshev import filter_params
        from revlab.errors import GaplessError

        with pytest.raises(GaplessError):
            filter_params(4, 2, 1.0, 2, 0.0)

    @pytest.mark.parametrize(
        ("q", "k", "g", "L_size"), [(-1, 2, 1.0, 2), (4, 0, 1.0, 2), (4, 2, 0.0, 2), (4, 2, 1.0, 0)]
    )
    def test_invalid_arguments_raise(self, q: int, k: int, g: float, L_size: int) -> None:
        """Test that negative q or non-positive k, g and """
        from revlab.chebyshev import filter_params
        from revlab.errors import ArgumentError

        with pytest.raises(ArgumentError):
            filter_params(q, k, g, L_size, 1.0)

    def test_inconsistent_fields_rejected(self) -> None:
        """Test that a FilterParams whose n0 disagrees with q // k does not validate."""
        from revlab.chebyshev import FilterParams, filter_params

        params = filter_params(4, 2, 1.0, 2, 1.0)
        with pytest.raises(ValueError):
            FilterParams(**{**params.model_dump(), "n0": 5})


class TestEvalFilter:
    """Tests for the scaled filter F_R."""

    @pytest.mark.parametrize("q", [2, 4, 6, 10])
    def test_unit_at_zero(self, q: int) -> None:
        """Test that F_R(0) = 1 for every q."""
        from revlab.chebyshev import eval_filter, filter_params

        assert eval_filter(filter_params(q, 2, 1.5, 3, 0.5), 0.0) == pytest.approx(1.0)

    @pytest.mark.parametrize(("q", "delta_e"), [(4, 1.0), (8, 0.5), (12, 2.0)])
    def test_window_stays_under_cap(self, q: int, delta_e: float) -> None:
        """Test that |F_R| <= 2 e^{-2 n0/xi} on [dE, 2E_c + dE]."""
        from revlab.chebyshev import filter_params, filter_report

        report = filter_report(filter_params(q, 2, 4.0, 4, delta_e), samples=5_000)
        assert report.within_cap
        assert report.f_at_zero == pytest.approx(1.0)


class TestApplyFilter:
    """Tests for the matrix-free recurrence."""

    def test_matches_spectral_filter(
        self, tfi8: HamiltonianSpec, tfi8_solution: GroundSolution, random_state: StateFactory
    ) -> None:
        """Test that the recurrence equals F_R applied eigenvalue by eigenvalue."""
        # Given: A random state and the dense eigensystem of the chain
        from revlab.chebyshev import apply_filter, eval_filter, filter_params
        from revlab.spectral import dense_eigensystem

        psi = random_state(8, seed=4)
        params = filter_params(6, tfi8.k, tfi8.g, 3, tfi8_solution.gap)
        energies, vectors = dense_eigensystem(tfi8)

        # When: Filtering both ways
        shifted = tfi8.shifted(tfi8_solution.energy_shift)
        via_recurrence = apply_filter(params, shifted, psi).amplitudes
        weights = eval_filter(params, energies - energies[0])
        via_spectrum = vectors @ (weights * (vectors.conj().T @ psi.amplitudes))

        # Then: They agree
        assert np.allclose(via_recurrence, via_spectrum, atol=1e-10)

    def test_linear_in_state(
        self, tfi8: HamiltonianSpec, tfi8_solution: GroundSolution, random_state: StateFactory
    ) -> None:
        """Test that F_R(H)(a psi1 + b psi2) = a F_R(H) psi1 + b F_R(H) psi2."""
        # Given: Two random states and complex weights
        from revlab.chebyshev import apply_filter, filter_params

        params = filter_params(6, tfi8.k, tfi8.g, 3, tfi8_solution.gap)
        shifted = tfi8.shifted(tfi8_solution.energy_shift)
        first, second = random_state(8, seed=2), random_state(8, seed=3)
        a, b = 0.6 - 0.3j, -1.7 + 0.2j

        # When: Filtering the combination and the parts
        combined = apply_filter(params, shifted, first * a + second * b)
        parts = apply_filter(params, shifted, first) * a + apply_filter(params, shifted, second) * b

        # Then: The results coincide
        assert np.allclose(combined.amplitudes, parts.amplitudes, atol=1e-10)

    def test_commutes_with_hamiltonian(
        self, tfi8: HamiltonianSpec, tfi8_solution: GroundSolution, random_state: StateFactory
    ) -> None:
        """Test that ||[F_R(H), H] psi|| stays below 1e-8."""
        # Given: A random state on the shifted chain
        from revlab.chebyshev import apply_filter, filter_params
        from revlab.spectral import apply_hamiltonian

        params = filter_params(8, tfi8.k, tfi8.g, 4, tfi8_solution.gap)
        shifted = tfi8.shifted(tfi8_solution.energy_shift)
        psi = random_state(8, seed=6)

        # When: Applying filter and Hamiltonian in both orders
        filter_then_h = apply_hamiltonian(shifted, apply_filter(params, shifted, psi))
        h_then_filter = apply_filter(params, shifted, apply_hamiltonian(shifted, psi))

        # Then: The commutator is numerically zero
        assert (filter_then_h - h_then_filter).norm() <= 1e-8

    def test_degenerate_filter_is_identity(self, tfi8: HamiltonianSpec, random_state: StateFactory) -> None:
        """Test that a degenerate filter returns the input state itself."""
        from revlab.chebyshev import apply_filter, filter_params

        psi = random_state(8, seed=1)
        assert apply_filter(filter_params(1, 2, 4.0, 2, 1.0), tfi8, psi) is psi


class TestHighRange:
    """Tests for the damped-growth check above the window."""

    def test_log_margin_at_window_top_has_closed_form(self) -> None:
        """Test that G(2E_c + dE) = -2 n0 - lambda dE / 2 + n0 log 2."""
        from revlab.chebyshev import filter_params, high_range_product_check

        params = filter_params(8, 2, 4.0, 4, 1.0)
        report = high_range_product_check(params, params.g, params.L_size, [params.window_top, 2 * params.window_top])
        assert report.log_margin_2gl_at_top == pytest.approx(report.closed_form_at_top)
        assert report.closed_form_at_top < 0.0
        assert len(report.points) == 2

    def test_grid_below_window_raises(self) -> None:
        """Test that high-range points below the window top raise ArgumentError."""
        from revlab.chebyshev import filter_params, high_range_product_check
        from revlab.errors import ArgumentError

        params = filter_params(4, 2, 1.0, 2, 1.0)
        with pytest.raises(ArgumentError):
            high_range_product_check(params, 1.0, 2, [params.delta_e])


class TestFilterProfile:
    """Tests for the exported filter profile."""

    def test_bound_columns_by_region(self) -> None:
        """Test that the bound is NaN below dE, constant in the window and growing above."""
        from revlab.chebyshev import filter_params, filter_profile

        params = filter_params(6, 2, 1.0, 2, 1.0)
        frame = filter_profile(params, [0.5, 2.0, params.window_top + 10.0, params.window_top + 50.0])
        assert list(frame.columns) == ["x", "F_R", "bound"]
        assert np.isnan(frame["bound"].iloc[0])
        assert frame["bound"].iloc[1] == pytest.approx(2.0 * params.suppression)
        assert frame["bound"].iloc[3] > frame["bound"].iloc[2]


class TestVerifyChebyBounds:
    """Tests for the sampled Chebyshev inequalities."""

    @pytest.mark.parametrize("n", [1, 2, 5, 12, 20])
    def test_no_violations(self, n: int) -> None:
        """Test that """
        from revlab.chebyshev import verify_cheby_bounds

        report = verify_cheby_bounds(n, sample_count=2_000)
        assert report.passed
        assert report.max_abs_inside == pytest.approx(1.0)

    def test_degree_zero_raises(self) -> None:
        """Test that the inequality sampler needs a positive degree."""
        from revlab.chebyshev import verify_cheby_bounds
        from revlab.errors import ArgumentError

        with pytest.raises(ArgumentError):
            verify_cheby_bounds(0)

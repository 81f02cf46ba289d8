"""Tests for Pauli strings, local operators, q-local bases and the textual notation."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import pytest

if TYPE_CHECKING:
    from collections.abc import Callable

    from revlab.states import StateVector

    StateFactory = Callable[..., StateVector]


class TestPauliCompose:
    """Tests for the exact group product of Pauli strings."""

    def test_x_times_z_is_minus_i_y(self) -> None:
        """Test that X0 Z0 = -i Y0."""
        # Given: X and Z on the same site
        from revlab.operators import PauliString

        x = PauliString.from_letters(1, {0: "X"})
        z = PauliString.from_letters(1, {0: "Z"})

        # When: Composing them
        product = x @ z

        # Then: The result is Y with phase -i
        assert product.letters == ("Y",)
        assert product.phase_factor == -1j

    def test_compose_matches_dense_product(self) -> None:
        """Test that composition agrees with matrix multiplication on 3 sites."""
        # Given: Two mixed strings
        from revlab.operators import PauliString

        a = PauliString.from_letters(3, {0: "X", 1: "Y", 2: "Z"})
        b = PauliString.from_letters(3, {0: "Y", 1: "Y", 2: "X"}, phase=1)

        # When: Composing
        product = a @ b

        # Then: Dense matrices agree
        assert np.allclose(product.to_dense(), a.to_dense() @ b.to_dense())

    def test_site_mismatch_raises(self) -> None:
        """Test that strings on different site counts cannot be composed."""
        from revlab.errors import DimensionError
        from revlab.operators import PauliString

        with pytest.raises(DimensionError):
            PauliString.identity(2) @ PauliString.identity(3)

    def test_commutation_by_overlap_parity(self) -> None:
        """Test that X0X1 commutes with Z0Z1 but X0 anticommutes with Z0."""
        from revlab.operators import PauliString

        assert PauliString.on_sites(2, "X", [0, 1]).commutes_with(PauliString.on_sites(2, "Z", [0, 1]))
        assert not PauliString.on_sites(2, "X", [0]).commutes_with(PauliString.on_sites(2, "Z", [0]))


class TestApplyPauli:
    """Tests for matrix-free application of Pauli strings."""

    def test_x_flips_site_zero_bit(self) -> None:
        """Test that X0 maps |00> to |01> (site 0 is the least significant bit)."""
        # Given: |00> on two sites
        from revlab.operators import PauliString, apply_pauli
        from revlab.states import basis_state

        # When: Applying X on site 0
        image = apply_pauli(PauliString.from_letters(2, {0: "X"}), basis_state(2, 0))

        # Then: Amplitude moves to index 1
        assert np.allclose(image.amplitudes, [0, 1, 0, 0])

    def test_matches_dense_matrix(self, random_state: StateFactory) -> None:
        """Test that bit rules agree with the dense matrix for a Y-bearing string."""
        from revlab.operators import PauliString, apply_pauli

        psi = random_state(4, seed=3)
        pauli = PauliString.from_letters(4, {0: "Y", 2: "X", 3: "Z"}, phase=3)
        assert np.allclose(apply_pauli(pauli, psi).amplitudes, pauli.to_dense() @ psi.amplitudes)

    def test_images_stack_columns(self, random_state: StateFactory) -> None:
        """Test that pauli_images returns one column per string."""
        from revlab.operators import apply_pauli, enumerate_q_local_basis, pauli_images

        psi = random_state(3, seed=1)
        basis = enumerate_q_local_basis(3, 1)
        images = pauli_images(basis, psi)
        assert images.shape == (8, 10)
        assert np.allclose(images[:, 4], apply_pauli(basis[4], psi).amplitudes)


class TestLocalOperator:
    """Tests for the canonical LocalOperator form."""

    def test_duplicates_merge_and_small_terms_drop(self) -> None:
        """Test that equal strings merge and cancelling terms disappear."""
        # Given: Terms that cancel and a phased duplicate
        from revlab.operators import LocalOperator, PauliString

        x0 = PauliString.from_letters(2, {0: "X"})
        z1 = PauliString.from_letters(2, {1: "Z"})

        # When: Building the operator
        op = LocalOperator.from_terms(2, [(1.0, x0), (-1.0, x0), (2.0, z1), (1.0, z1.model_copy(update={"phase": 2}))])

        # Then: Only Z1 remains with coefficient 1
        assert len(op.terms) == 1
        coeff, pauli = op.terms[0]
        assert pauli.key == z1.key
        assert coeff == pytest.approx(1.0)

    def test_product_of_projectors_is_projector(self) -> None:
        """Test that (I+Z)/2 squared equals itself."""
        from revlab.operators import LocalOperator, PauliString

        p = LocalOperator.from_terms(1, [(0.5, PauliString.identity(1)), (0.5, PauliString.from_letters(1, {0: "Z"}))])
        assert (p @ p).is_close(p)

    def test_commutator_of_x_and_z(self) -> None:
        """Test that [X, Z] = -2iY."""
        from revlab.operators import LocalOperator, PauliString

        x = LocalOperator.from_pauli(PauliString.from_letters(1, {0: "X"}))
        z = LocalOperator.from_pauli(PauliString.from_letters(1, {0: "Z"}))
        y = LocalOperator.from_pauli(PauliString.from_letters(1, {0: "Y"}))
        assert x.commutator(z).is_close(y * -2j)

    def test_support_and_locality(self) -> None:
        """Test support union and maximal term weight."""
        from revlab.operators import parse_operator

        op = parse_operator("1.0 * X0 Z3\n0.5 * Y5", 6)
        assert op.support == frozenset({0, 3, 5})
        assert op.locality_q == 2

    def test_single_site_expansion(self) -> None:
        """Test that a 2x2 matrix expands back to itself."""
        from revlab.operators import LocalOperator

        matrix = np.array([[0.3, 0.1 - 0.2j], [0.1 + 0.2j, -0.7]])
        op = LocalOperator.single_site(1, 0, matrix)
        assert np.allclose(op.to_dense(), matrix)
        assert op.is_hermitian()

    def test_apply_matches_sparse_matrix(self, random_state: StateFactory) -> None:
        """Test that grouped application agrees with the assembled matrix."""
        from revlab.operators import apply_local_operator, parse_operator

        op = parse_operator("0.7 * X0 X1\n-1.2 * Z2\n(0.3+0.4j) * Y1 Z3", 4)
        psi = random_state(4, seed=8)
        assert np.allclose(apply_local_operator(op, psi).amplitudes, op.to_sparse() @ psi.amplitudes)
        assert np.allclose(op.apply(psi).amplitudes, apply_local_operator(op, psi).amplitudes)


class TestOperatorNorm:
    """Tests for exact and triangle operator norms."""

    def test_exact_not_above_triangle(self) -> None:
        """Test that ||X0 + Z0|| = sqrt(2) while the triangle bound gives 2."""
        from revlab.operators import operator_norm, parse_operator

        op = parse_operator("X0\nZ0", 3)
        assert operator_norm(op) == pytest.approx(np.sqrt(2.0))
        assert operator_norm(op, "triangle") == pytest.approx(2.0)

    def test_projector_has_unit_norm(self) -> None:
        """Test that a four-site projector has norm 1."""
        from revlab.labs.reversibility import local_projector
        from revlab.operators import operator_norm

        assert operator_norm(local_projector(8, range(4))) == pytest.approx(1.0)


class TestEnumerateBasis:
    """Tests for q-local Pauli bases."""

    @pytest.mark.parametrize(("n", "q"), [(3, 0), (3, 1), (4, 2), (5, 3)])
    def test_count_matches_formula(self, n: int, q: int) -> None:
        """Test that the basis has sum_s 3^s C(n, s) strings."""
        from revlab.operators import basis_count, enumerate_q_local_basis

        basis = enumerate_q_local_basis(n, q)
        assert len(basis) == basis_count(n, q)
        assert basis[0].weight == 0

    def test_region_restricts_supports(self) -> None:
        """Test that every support lies inside the region."""
        from revlab.operators import enumerate_q_local_basis

        basis = enumerate_q_local_basis(6, 2, region=[1, 4])
        assert all(p.support <= {1, 4} for p in basis)
        assert len(basis) == 16

    def test_symmetry_filter_keeps_commuting_strings(self) -> None:
        """Test that filtering by X0X1 keeps only strings commuting with it."""
        from revlab.operators import PauliString, enumerate_q_local_basis

        generator = PauliString.on_sites(2, "X", [0, 1])
        basis = enumerate_q_local_basis(2, 2, symmetry_filter=[generator])
        assert all(p.commutes_with(generator) for p in basis)
        assert len(basis) == 8

    def test_cap_raises(self) -> None:
        """Test that exceeding the basis cap raises DimensionLimitError."""
        from revlab.errors import DimensionLimitError
        from revlab.operators import enumerate_q_local_basis

        with pytest.raises(DimensionLimitError):
            enumerate_q_local_basis(6, 3, max_size=100)

    def test_negative_q_raises(self) -> None:
        """Test that a negative locality raises ArgumentError."""
        from revlab.errors import ArgumentError
        from revlab.operators import enumerate_q_local_basis

        with pytest.raises(ArgumentError):
            enumerate_q_local_basis(3, -1)


class TestQLocalGram:
    """Tests for the q-local Gram matrix computed without enumerating strings."""

    @pytest.mark.parametrize(("q", "region"), [(0, None), (1, None), (2, None), (3, None), (2, [0, 2, 3])])
    def test_matches_sum_over_basis(self, random_state: StateFactory, q: int, region: list[int] | None) -> None:
        """Test that the weight rescaling equals the explicit sum of P|psi><psi|P."""
        # Given: A random 4-site state and the enumerated basis
        from revlab.operators import enumerate_q_local_basis, pauli_images, q_local_gram

        psi = random_state(4, seed=21)
        images = pauli_images(enumerate_q_local_basis(4, q, region=region), psi)

        # When: Building the Gram matrix both ways
        gram = q_local_gram(psi, q, region=region)

        # Then: They agree entrywise
        assert np.allclose(gram, images @ images.conj().T, atol=1e-10)

    def test_full_locality_is_scaled_identity(self, random_state: StateFactory) -> None:
        """Test that all 4^n strings give 2^n times the identity for a unit state."""
        from revlab.operators import q_local_gram

        psi = random_state(3, seed=4)
        assert np.allclose(q_local_gram(psi, 3), 8.0 * np.eye(8), atol=1e-10)

    def test_region_outside_raises(self, random_state: StateFactory) -> None:
        """Test that a region site beyond the state raises ArgumentError."""
        from revlab.errors import ArgumentError
        from revlab.operators import q_local_gram

        with pytest.raises(ArgumentError):
            q_local_gram(random_state(3, seed=1), 1, region=[0, 5])


class TestNotation:
    """Tests for the textual operator notation."""

    def test_format_then_parse_preserves_operator(self) -> None:
        """Test that formatting and parsing give back an equal operator."""
        from revlab.operators import format_operator, parse_operator

        op = parse_operator("1.5 * X0 Z3 Y7\n-0.25 * Z1", 8)
        assert parse_operator(format_operator(op), 8).is_close(op)

    def test_bad_token_raises(self) -> None:
        """Test that an unknown Pauli letter raises ArgumentError."""
        from revlab.errors import ArgumentError
        from revlab.operators import parse_pauli

        with pytest.raises(ArgumentError):
            parse_pauli("X0 Q1", 3)

    def test_repeated_site_raises(self) -> None:
        """Test that a site may appear only once in a string."""
        from revlab.errors import ArgumentError
        from revlab.operators import parse_pauli

        with pytest.raises(ArgumentError):
            parse_pauli("X0 Z0", 3)

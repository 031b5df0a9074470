import numpy as np
import pytest

from padyn.star_algebra import (
    BlockStructure,
    MatrixStarAlgebra,
    conjugated,
    is_positive,
    morita_equivalent,
    star_closure,
    wedderburn,
)


def unit_matrix(n, i, j):
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1.0
    return m


def regular_rep_c2_crossed_z2():
    """Hand-built 4x4 realization of functions on two points twisted by the flip.

    Basis vectors indexed by (group element r, point x); the function f acts
    by f(r^-1 . x) on coordinate (r, x) and the translation permutes r.
    """
    # coordinates ordered (r, x): (0,0), (0,1), (1,0), (1,1)
    def pi(f0, f1):
        return np.diag([f0, f1, f1, f0]).astype(complex)

    lam = np.zeros((4, 4), dtype=complex)
    lam[0, 2] = lam[1, 3] = lam[2, 0] = lam[3, 1] = 1.0
    basis = [pi(1, 0), pi(0, 1), pi(1, 0) @ lam, pi(0, 1) @ lam]
    return basis


def test_star_closure_diagonal_units():
    gens = [unit_matrix(3, i, i) for i in range(3)]
    alg = star_closure(gens, 3)
    assert alg.dim == 3


def test_star_closure_pauli_flips_generate_m2():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.array([[1, 0], [0, -1]], dtype=complex)
    alg = star_closure([x, z], 2)
    assert alg.dim == 4


def test_star_closure_idempotent():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    alg = star_closure([x], 2)
    again = star_closure(alg.basis, 2)
    assert again.dim == alg.dim
    for b in alg.basis:
        assert again.span_residual(b) < 1e-10


def test_closure_residual_detects_non_algebra():
    # the span of a single non-normal nilpotent is not multiplicatively closed
    alg = MatrixStarAlgebra(2, [unit_matrix(2, 0, 1)])
    assert alg.closure_residual() > 0.5


def test_wedderburn_commutative_three_blocks():
    alg = MatrixStarAlgebra(3, [unit_matrix(3, i, i) for i in range(3)], generators=None)
    result = wedderburn(alg)
    assert result.blocks == BlockStructure((1, 1, 1))
    assert result.center_dim == 3


def test_wedderburn_full_matrix_algebra():
    basis = [unit_matrix(3, i, j) for i in range(3) for j in range(3)]
    alg = MatrixStarAlgebra(3, basis)
    result = wedderburn(alg)
    assert result.blocks == BlockStructure((3,))
    assert result.center_dim == 1


def test_wedderburn_regular_rep_of_crossed_product():
    basis = regular_rep_c2_crossed_z2()
    alg = MatrixStarAlgebra(4, basis, generators=basis)
    result = wedderburn(alg)
    assert result.blocks == BlockStructure((2,))


def test_wedderburn_corner_algebra_unit():
    # 1-dimensional corner inside M_3: unit is a rank-1 projection
    alg = MatrixStarAlgebra(3, [unit_matrix(3, 1, 1)])
    assert np.allclose(alg.unit, unit_matrix(3, 1, 1))
    assert wedderburn(alg).blocks == BlockStructure((1,))


def test_wedderburn_sum_of_squares_matches_dimension():
    rng = np.random.default_rng(3)
    # block-diagonal algebra M_2 + M_1 hidden by a random unitary conjugation
    from padyn.linalg import random_unitary

    q = random_unitary(3, rng)
    basis = []
    for i in range(2):
        for j in range(2):
            basis.append(q @ np.pad(unit_matrix(2, i, j), ((0, 1), (0, 1))) @ q.conj().T)
    basis.append(q @ unit_matrix(3, 2, 2) @ q.conj().T)
    alg = MatrixStarAlgebra(3, basis)
    result = wedderburn(alg)
    assert result.blocks == BlockStructure((1, 2))
    assert sum(n * n for n in result.blocks.block_dims) == alg.dim


def test_wedderburn_invariant_under_conjugation():
    basis = regular_rep_c2_crossed_z2()
    alg = MatrixStarAlgebra(4, basis, generators=basis)
    rotated = conjugated(alg, seed=11)
    assert wedderburn(alg).blocks == wedderburn(rotated).blocks


def test_center_dim_equals_block_count():
    cases = [
        MatrixStarAlgebra(3, [unit_matrix(3, i, i) for i in range(3)]),
        MatrixStarAlgebra(3, [unit_matrix(3, i, j) for i in range(3) for j in range(3)]),
        MatrixStarAlgebra(4, regular_rep_c2_crossed_z2()),
    ]
    for alg in cases:
        result = wedderburn(alg)
        assert result.center_dim == result.blocks.count


def test_is_positive_on_squares():
    basis = [unit_matrix(2, i, j) for i in range(2) for j in range(2)]
    alg = MatrixStarAlgebra(2, basis)
    rng = np.random.default_rng(0)
    y = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert is_positive(y.conj().T @ y, alg)


def test_is_positive_rejects_negated_unit():
    basis = [unit_matrix(2, i, j) for i in range(2) for j in range(2)]
    alg = MatrixStarAlgebra(2, basis)
    assert not is_positive(-alg.unit, alg)


def test_is_positive_detects_negative_eigenvalue():
    basis = [unit_matrix(2, i, j) for i in range(2) for j in range(2)]
    alg = MatrixStarAlgebra(2, basis)
    x = np.diag([1.0, -0.5]).astype(complex)
    # oracle: explicit eigenvalues
    assert np.linalg.eigvalsh(x).min() < 0
    assert not is_positive(x, alg)


def test_is_positive_requires_self_adjoint():
    basis = [unit_matrix(2, i, j) for i in range(2) for j in range(2)]
    alg = MatrixStarAlgebra(2, basis)
    with pytest.raises(ValueError):
        is_positive(unit_matrix(2, 0, 1), alg)


def test_morita_equivalent_by_block_count():
    assert morita_equivalent(BlockStructure((3,)), BlockStructure((1,)))
    assert not morita_equivalent(BlockStructure((1, 1)), BlockStructure((1,)))
    assert morita_equivalent(BlockStructure((2,)), BlockStructure((2,)))

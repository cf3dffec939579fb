import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from htensor import symmetry
from htensor.core import DenseTensor, NormalizationMode, frobenius_norm, identity_tensor, max_abs, max_abs_diff
from htensor.errors import NotAntisymmetricError, ShapeMismatchError, SizeLimitError
from htensor.linalg import lu_det
from htensor.permutation import Permutation, all_permutations, adjacent_transpositions
from htensor.symmetry import NotDecomposable, SeparableWitness

UNIT = NormalizationMode.UNIT
SQRT = NormalizationMode.SQRT_FACTORIAL
PROJ = NormalizationMode.PROJECTOR

rng = np.random.default_rng(31)


def e(i, n):
    v = np.zeros(n)
    v[i - 1] = 1.0
    return v


# ---------------------------------------------------------------- permutations


def test_permutation_parity_matches_inversion_count():
    for m in range(1, 6):
        for sigma in all_permutations(m):
            assert sigma.parity == oracles.perm_parity(sigma.zero_based())


def test_permutation_group_laws():
    for sigma, phi in itertools.product(all_permutations(4), repeat=2):
        assert (sigma @ phi)(1) == sigma(phi(1))
        assert (sigma @ phi).parity == sigma.parity * phi.parity
    sigma = Permutation([3, 1, 4, 2])
    assert (sigma @ sigma.inverse()).is_identity()


def test_permutation_parsing():
    assert Permutation.parse("2,3,4,1") == Permutation([2, 3, 4, 1])
    assert Permutation.parse("(2341)") == Permutation([2, 3, 4, 1])
    assert Permutation.parse("(1 2 3 4)") == Permutation([2, 3, 4, 1])
    # (321): 3 -> 2 -> 1 -> 3, so sigma(1) = 3
    assert Permutation.parse("(321)") == Permutation([3, 1, 2])
    assert Permutation.parse("(12)", m=4) == Permutation([2, 1, 3, 4])
    for bad in ("1,1,2", "(1 5)", "", "a,b"):
        with pytest.raises(ValueError):
            Permutation.parse(bad, m=4)


def test_adjacent_transpositions_generate_the_group():
    gens = adjacent_transpositions(4)
    seen = {Permutation.identity(4)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = g @ p
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    assert len(seen) == 24


# ---------------------------------------------------------------- permute_modes


def test_permute_identity_and_transpose():
    A = rng.standard_normal((3, 3, 3))
    assert max_abs_diff(symmetry.permute_modes(A, Permutation.identity(3)), A) == 0.0
    M = rng.standard_normal((3, 3))
    np.testing.assert_array_equal(symmetry.permute_modes(M, Permutation([2, 1])).data, M.T)


def test_permute_against_index_chase():
    A = rng.standard_normal((2, 3, 4)[:1] * 3)
    for sigma in all_permutations(3):
        expected = oracles.permute_by_chase(A, sigma.image)
        np.testing.assert_array_equal(symmetry.permute_modes(A, sigma).data, expected)


def test_permute_composition_and_inverse():
    A = rng.standard_normal((3, 3, 3))
    for sigma, phi in itertools.product(all_permutations(3), repeat=2):
        lhs = symmetry.permute_modes(A, sigma @ phi)
        rhs = symmetry.permute_modes(symmetry.permute_modes(A, phi), sigma)
        assert max_abs_diff(lhs, rhs) == 0.0
        back = symmetry.permute_modes(symmetry.permute_modes(A, sigma), sigma.inverse())
        assert back.data.tobytes() == A.tobytes()


def test_permute_order_mismatch():
    with pytest.raises(ShapeMismatchError):
        symmetry.permute_modes(np.zeros((2, 2)), Permutation([1, 2, 3]))


# ---------------------------------------------------------------- symmetrize


@pytest.mark.parametrize("signed", [False, True])
@pytest.mark.parametrize("norm", list(NormalizationMode))
def test_symmetrize_against_expansion(signed, norm):
    for m, n in [(2, 3), (3, 3), (4, 2)]:
        A = rng.standard_normal((n,) * m)
        expected = oracles.symmetrize(A, norm.factor(m), signed)
        assert max_abs_diff(symmetry.symmetrize(A, norm, signed), expected) <= 1e-13


def test_symmetrize_matrix_projector():
    A = rng.standard_normal((2, 2))
    np.testing.assert_allclose(symmetry.symmetrize(A, PROJ).data, 0.5 * (A + A.T), atol=1e-15)


def test_symmetric_fixed_point_and_signed_annihilation():
    S = symmetry.symmetrize(rng.standard_normal((3, 3, 3)), PROJ)
    assert max_abs_diff(symmetry.symmetrize(S, PROJ), S) <= 1e-14
    for norm in NormalizationMode:
        assert max_abs(symmetry.symmetrize(S, norm, signed=True)) == 0.0


@pytest.mark.parametrize("signed", [False, True])
def test_projector_idempotent(signed):
    for m in (2, 3, 4):
        A = rng.standard_normal((3,) * m)
        once = symmetry.symmetrize(A, PROJ, signed)
        assert max_abs_diff(symmetry.symmetrize(once, PROJ, signed), once) <= 1e-12


@pytest.mark.parametrize("norm", list(NormalizationMode))
def test_symmetrizer_absorbs_permutations(norm):
    A = rng.standard_normal((3,) * 3)
    base = symmetry.symmetrize(A, norm)
    for sigma in all_permutations(3):
        assert max_abs_diff(symmetry.symmetrize(symmetry.permute_modes(A, sigma), norm), base) <= 1e-12


def test_symmetrize_requires_hypercubic():
    with pytest.raises(ShapeMismatchError):
        symmetry.symmetrize(np.zeros((2, 3)))


def test_symmetrize_size_guard():
    with pytest.raises(SizeLimitError):
        symmetry.symmetrize(DenseTensor(np.zeros(4**8).reshape((4,) * 8)))


# ---------------------------------------------------------------- wedge / vee


def test_wedge_basis_pair():
    W = symmetry.wedge([e(1, 2), e(2, 2)], SQRT).data
    r = 1 / math.sqrt(2)
    np.testing.assert_allclose(W, [[0, r], [-r, 0]], atol=1e-16)


@pytest.mark.parametrize("norm", list(NormalizationMode))
def test_wedge_of_dependent_vectors_vanishes(norm):
    v = rng.standard_normal(3)
    assert max_abs(symmetry.wedge([v, v], norm)) == 0.0
    assert max_abs(symmetry.wedge([e(1, 3), e(2, 3), e(1, 3) + e(2, 3)], norm)) <= 1e-15


def test_two_dimensional_array_read_by_columns():
    U = rng.standard_normal((4, 3))
    assert max_abs_diff(symmetry.wedge(U), symmetry.wedge(list(U.T))) == 0.0


def test_wedge_length_mismatch():
    with pytest.raises(ShapeMismatchError):
        symmetry.wedge([np.ones(2), np.ones(3)])


@pytest.mark.parametrize("m", [2, 3, 4])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_wedge_antisymmetric_vee_symmetric(m, n):
    vectors = list(rng.standard_normal((m, n)))
    W = symmetry.wedge(vectors, UNIT)
    assert symmetry.is_antisymmetric(W, 0.0).violation <= 1e-14 * max(max_abs(W), 1e-300)
    for sigma in all_permutations(m):
        assert symmetry.is_sign_symmetric(W, sigma, 0.0).holds
    assert symmetry.is_symmetric(symmetry.vee(vectors), 0.0).holds


def test_wedge_multilinear():
    for _ in range(20):
        vs = list(rng.standard_normal((3, 4)))
        w = rng.standard_normal(4)
        lam = rng.standard_normal()
        for slot in range(3):
            summed = vs.copy()
            summed[slot] = vs[slot] + w
            other = vs.copy()
            other[slot] = w
            lhs = symmetry.wedge(summed)
            assert max_abs_diff(lhs, symmetry.wedge(vs) + symmetry.wedge(other)) <= 1e-12
            scaled = vs.copy()
            scaled[slot] = lam * vs[slot]
            assert max_abs_diff(symmetry.wedge(scaled), symmetry.wedge(vs) * lam) <= 1e-12


def test_wedge_vanishes_iff_gram_singular():
    for trial in range(40):
        m = 2 + trial % 3
        vs = rng.standard_normal((m, 4))
        if trial % 2:
            vs[-1] = rng.standard_normal(m - 1) @ vs[:-1]
        W = symmetry.wedge(list(vs))
        G = vs @ vs.T
        scale = np.prod(np.linalg.norm(vs, axis=1) ** 2)
        dependent = abs(lu_det(G)) <= 1e-12 * scale
        assert dependent == bool(trial % 2)
        assert (max_abs(W) <= 1e-12) == dependent


# ---------------------------------------------------------------- symmetry checks


def test_identity_tensor_not_fully_symmetric():
    I = identity_tensor(2, 2)
    violating = [s for s in all_permutations(4) if not symmetry.is_sigma_symmetric(I, s).holds]
    assert violating
    # e.g. swapping modes 1 and 2 moves delta(i1,j1)delta(i2,j2) to delta(i2,j1)delta(i1,j2)
    assert Permutation([2, 1, 3, 4]) in violating
    assert Permutation([2, 1, 4, 3]) not in violating
    assert not symmetry.is_symmetric(I).holds


def test_unit_wedge_of_basis_is_antisymmetric():
    rep = symmetry.is_antisymmetric(symmetry.wedge([e(1, 3), e(2, 3), e(3, 3)], UNIT))
    assert rep.holds and rep.violation == 0.0


def test_violation_reports_perturbation():
    A = symmetry.wedge([e(1, 3), e(2, 3), e(3, 3)], UNIT).data.copy()
    A[0, 1, 2] += 1e-6
    rep = symmetry.is_antisymmetric(A)
    assert not rep.holds
    assert rep.violation == pytest.approx(1e-6, rel=1e-6)
    assert rep.witness is not None


# ---------------------------------------------------------------- determinant and permanent identities


def test_permanent_examples():
    assert symmetry.permanent(np.eye(3)) == 1.0
    assert symmetry.permanent(np.ones((2, 2))) == 2.0
    assert symmetry.permanent(np.ones((3, 3))) == 6.0 == oracles.naive_permanent(np.ones((3, 3)))


def test_permanent_against_naive_sum():
    for m in range(1, 7):
        M = rng.standard_normal((m, m))
        assert symmetry.permanent(M) == pytest.approx(oracles.naive_permanent(M), rel=1e-10, abs=1e-12)


def test_permanent_guard():
    with pytest.raises(SizeLimitError):
        symmetry.permanent(np.ones((15, 15)))


def double_sum_inner(U, V, signed):
    """<op(U), op(V)> by the m!^2-term expansion under sqrt-factorial normalization."""
    m = len(U)
    total = 0.0
    for p in itertools.permutations(range(m)):
        for q in itertools.permutations(range(m)):
            sign = oracles.perm_parity(p) * oracles.perm_parity(q) if signed else 1
            total += sign * math.prod(float(np.dot(U[p[i]], V[q[i]])) for i in range(m))
    return total / math.factorial(m)


def test_gram_identities_examples():
    g = symmetry.gram_inner_identities([e(1, 3), e(2, 3)], [e(1, 3), e(2, 3)])
    assert g.lhs_det == pytest.approx(1.0) and g.rhs_det == 1.0
    assert g.lhs_perm == pytest.approx(1.0) and g.rhs_perm == 1.0
    g = symmetry.gram_inner_identities([e(1, 3), e(1, 3)], [e(1, 3), e(1, 3)])
    assert g.lhs_det == 0.0 and g.rhs_det == 0.0
    assert g.lhs_perm == pytest.approx(double_sum_inner([e(1, 3)] * 2, [e(1, 3)] * 2, False))
    assert g.lhs_perm == pytest.approx(g.rhs_perm, rel=1e-12)


def test_gram_identities_against_double_sum():
    for _ in range(10):
        U, V = list(rng.standard_normal((3, 4))), list(rng.standard_normal((3, 4)))
        g = symmetry.gram_inner_identities(U, V)
        assert g.lhs_det == pytest.approx(double_sum_inner(U, V, True), rel=1e-10)
        assert g.lhs_perm == pytest.approx(double_sum_inner(U, V, False), rel=1e-10)
        assert g.lhs_det == pytest.approx(g.rhs_det, rel=1e-10)
        assert g.lhs_perm == pytest.approx(g.rhs_perm, rel=1e-10)


def test_gram_identities_projector_factor():
    for m in (2, 3, 4):
        U, V = list(rng.standard_normal((m, 4))), list(rng.standard_normal((m, 4)))
        g = symmetry.gram_inner_identities(U, V, PROJ)
        f = math.factorial(m)
        assert g.lhs_det * f == pytest.approx(g.rhs_det, rel=1e-10)
        assert g.lhs_perm * f == pytest.approx(g.rhs_perm, rel=1e-10)


def test_wedge_norm_examples():
    assert symmetry.wedge_norm([e(1, 3), e(2, 3)]) == pytest.approx(1.0, rel=1e-15)
    assert symmetry.wedge_norm([2 * e(1, 3), 3 * e(2, 3)]) == pytest.approx(6.0, rel=1e-15)
    assert symmetry.wedge_norm([e(1, 3), e(1, 3)]) == 0.0


def test_wedge_norm_matches_expansion_and_singular_values():
    for _ in range(20):
        m = int(rng.integers(1, 4))
        U = rng.standard_normal((4, m))
        w = symmetry.wedge_norm(U)
        assert w == pytest.approx(frobenius_norm(symmetry.wedge(U, SQRT)), rel=1e-10)
        assert w == pytest.approx(np.prod(np.linalg.svd(U, compute_uv=False)), rel=1e-10)


# ---------------------------------------------------------------- standard SAS tensor


def test_standard_sas_three_entries():
    Q = symmetry.standard_sas(3)
    for idx in ("123", "231", "312"):
        assert Q.entry(*map(int, idx)) == 1.0
    for idx in ("132", "213", "321"):
        assert Q.entry(*map(int, idx)) == -1.0
    assert np.count_nonzero(Q.data) == 6


def test_standard_sas_two():
    np.testing.assert_array_equal(symmetry.standard_sas(2).data, [[0, 1], [-1, 0]])


def test_standard_sas_guard():
    with pytest.raises(SizeLimitError):
        symmetry.standard_sas(7)
    for n in range(2, 6):
        Q = symmetry.standard_sas(n)
        assert np.count_nonzero(Q.data) == math.factorial(n)


def test_det_times_sas():
    Q = symmetry.standard_sas(3)
    for _ in range(20):
        M = rng.standard_normal((3, 3))
        expanded = oracles.symmetrize(oracles.outer(list(M.T)), 1.0, signed=True)
        assert max_abs_diff(Q * np.linalg.det(M), expanded) <= 1e-10
        assert max_abs_diff(symmetry.wedge(M, UNIT), Q * lu_det(M)) <= 1e-10


# ---------------------------------------------------------------- decomposition


def test_decompose_standard_sas():
    res = symmetry.sas_decompose(symmetry.standard_sas(3))
    assert isinstance(res, SeparableWitness)
    assert res.residual == 0.0
    assert max_abs_diff(res.reconstruct(), symmetry.standard_sas(3)) == 0.0


def test_decompose_scaled_identity_columns():
    # a * Q3 is the unit wedge of the columns of a^(1/3) I
    a = 5.0
    c = a ** (1 / 3)
    W = symmetry.wedge([c * e(1, 3), c * e(2, 3), c * e(3, 3)], UNIT)
    assert max_abs_diff(W, symmetry.standard_sas(3) * a) <= 1e-14
    res = symmetry.sas_decompose(symmetry.standard_sas(3) * a)
    assert isinstance(res, SeparableWitness)
    assert max_abs_diff(res.reconstruct(), symmetry.standard_sas(3) * a) <= 1e-12


def test_decompose_zero():
    res = symmetry.sas_decompose(np.zeros((3, 3, 3)))
    assert isinstance(res, SeparableWitness)
    assert res.residual == 0.0
    assert all(not np.any(v) for v in res.vectors)


def test_decompose_random_wedges_roundtrip():
    for m, n in [(2, 3), (2, 5), (3, 3), (3, 4), (4, 5)]:
        for _ in range(5):
            A = symmetry.wedge(list(rng.standard_normal((m, n))), UNIT) * rng.uniform(0.5, 3)
            res = symmetry.sas_decompose(A)
            assert isinstance(res, SeparableWitness)
            assert max_abs_diff(res.reconstruct(), A) <= 1e-12 * max_abs(A)


def test_decompose_rejects_sums_of_wedges():
    A = symmetry.wedge([e(1, 4), e(2, 4)], UNIT) + symmetry.wedge([e(3, 4), e(4, 4)], UNIT)
    res = symmetry.sas_decompose(A)
    assert isinstance(res, NotDecomposable)
    assert res.residual > res.threshold


def test_decompose_requires_antisymmetry():
    with pytest.raises(NotAntisymmetricError):
        symmetry.sas_decompose(rng.standard_normal((3, 3, 3)))


def example_order3_dim4():
    A = np.zeros((4, 4, 4))
    for (i, j, k), val in {(1, 2, 3): 1.0, (1, 2, 4): 2.0, (1, 3, 4): 3.0, (2, 3, 4): 1.0}.items():
        for p in itertools.permutations(range(3)):
            idx = (i, j, k)
            A[tuple(idx[t] - 1 for t in p)] = oracles.perm_parity(p) * val
    return A


def test_order3_dim4_example_verdict_is_self_consistent():
    A = example_order3_dim4()
    res = symmetry.sas_decompose(A)
    if isinstance(res, SeparableWitness):
        assert res.residual <= 1e-10 * max_abs(A)
        assert max_abs_diff(res.reconstruct(), A) == pytest.approx(res.residual, abs=1e-15)
    else:
        assert res.residual > res.threshold
        assert max_abs_diff(res.candidate.reconstruct(), A) == pytest.approx(res.residual, abs=1e-15)


def test_antisym_matrix_separability():
    M = 0.5 * (np.outer(e(1, 3), e(2, 3)) - np.outer(e(2, 3), e(1, 3)))
    assert symmetry.antisym_matrix_separability(M) == (True, 2)
    B = np.zeros((4, 4))
    B[:2, :2] = [[0, 1], [-1, 0]]
    B[2:, 2:] = [[0, 2], [-2, 0]]
    res = symmetry.antisym_matrix_separability(B)
    assert res == (False, 4) and res.rank == oracles.numeric_rank_svd(B)
    assert symmetry.antisym_matrix_separability(np.zeros((3, 3))) == (True, 0)
    with pytest.raises(NotAntisymmetricError):
        symmetry.antisym_matrix_separability(np.eye(3))


# ---------------------------------------------------------------- fixed subspaces


def test_fixed_subspace_cycle():
    assert symmetry.fixed_subspace_dim(4, 2, Permutation.parse("(2341)"), signed=False) == 6


def test_fixed_subspace_transposition():
    beta = Permutation.parse("(12)", m=4)
    assert symmetry.fixed_subspace_dim(4, 2, beta, signed=True) == 4
    assert symmetry.fixed_subspace_dim(4, 2, beta, signed=False) == 12


def test_fixed_subspace_identity():
    for m, n in [(2, 3), (3, 2), (4, 3)]:
        assert symmetry.fixed_subspace_dim(m, n, Permutation.identity(m)) == n**m


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(1, 3), st.randoms(use_true_random=False), st.booleans())
def test_fixed_subspace_against_linear_algebra(m, n, rnd, signed):
    image = list(range(1, m + 1))
    rnd.shuffle(image)
    expected = oracles.fibre_cycle_count(m, n, image, signed)
    assert symmetry.fixed_subspace_dim(m, n, Permutation(image), signed) == expected


def test_fixed_subspace_guard():
    with pytest.raises(SizeLimitError):
        symmetry.fixed_subspace_dim(7, 8, Permutation.identity(7))

import warnings

import numpy as np
import pytest

from luequiv import (
    DensityMatrix,
    DimProfile,
    FactorSet,
    SearchConfig,
    VerdictStatus,
    build_V,
    build_V0,
    check_equivalence,
    degeneracy_profile,
    eig_hermitian,
    is_decomposable,
    kron_all,
    objective,
    paper_example,
    phase_search,
    verify_witness,
)
from luequiv.equivalence import PhaseContext
from luequiv.oracle import haar_unitary, local_unitaries, make_equivalent_pair, random_density

from helpers import WITNESS_SIGNS, example_bases

QUICK = SearchConfig(seeds=16, sweeps=40, restarts=6)


def witness_phases() -> np.ndarray:
    return np.where(WITNESS_SIGNS > 0, 0.0, np.pi)


def test_build_v_identity():
    assert np.allclose(build_V(np.eye(3), np.eye(3), np.zeros(3)), np.eye(3))


def test_build_v_equal_bases():
    u = haar_unitary(4, 0)
    assert np.allclose(build_V(u, u, np.zeros(4)), np.eye(4), atol=1e-14)


def test_build_v_is_unitary():
    rng = np.random.default_rng(5)
    x, y = haar_unitary(6, rng), haar_unitary(6, rng)
    theta = rng.uniform(0, 2 * np.pi, 6)
    v = build_V(x, y, theta)
    assert np.linalg.norm(v @ v.conj().T - np.eye(6)) < 1e-10


def test_build_v_dimension_mismatch():
    with pytest.raises(ValueError):
        build_V(np.eye(3), np.eye(3), np.zeros(4))


def test_build_v0_reduces_to_build_v():
    rng = np.random.default_rng(7)
    x, y = haar_unitary(4, rng), haar_unitary(4, rng)
    theta = rng.uniform(0, 2 * np.pi, 4)
    prof = degeneracy_profile(eig_hermitian(np.diag([4.0, 3.0, 2.0, 1.0])), 1e-8)
    blocks = [np.array([[np.exp(1j * t)]]) for t in theta]
    assert np.allclose(build_V0(x, y, prof, blocks), build_V(x, y, theta), atol=1e-14)


def test_build_v0_identity_blocks():
    rng = np.random.default_rng(9)
    x, y = haar_unitary(4, rng), haar_unitary(4, rng)
    prof = degeneracy_profile(eig_hermitian(np.diag([0.5, 0.5, 0.0, 0.0])), 1e-8)
    blocks = [np.eye(2), np.eye(2)]
    assert np.allclose(build_V0(x, y, prof, blocks), x @ y.conj().T, atol=1e-14)


def test_build_v0_degenerate_bell_pair():
    # rho and rho' related by H x H, spectrum (1/2, 1/2, 0, 0): no diagonal D
    # works in general, but a 2x2-block V0 does, and its realignment is rank one
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    hh = np.kron(h, h)
    rho = np.diag([0.5, 0.0, 0.0, 0.5]).astype(complex)
    rho_p = hh @ rho @ hh.conj().T
    assert np.linalg.norm(hh @ rho @ hh.conj().T - rho_p) == 0.0  # construction
    s1, s2 = eig_hermitian(rho), eig_hermitian(rho_p)
    prof = degeneracy_profile(s1, 1e-8)
    assert prof.multiplicities == (2, 2)
    b = s1.basis.conj().T @ hh @ s2.basis
    # the change of basis is block diagonal over the degenerate blocks
    assert np.linalg.norm(b[:2, 2:]) < 1e-12 and np.linalg.norm(b[2:, :2]) < 1e-12
    blocks = [b[:2, :2], b[2:, 2:]]
    for blk in blocks:
        assert np.linalg.norm(blk @ blk.conj().T - np.eye(2)) < 1e-12
    v0 = build_V0(s1.basis, s2.basis, prof, blocks)
    assert np.allclose(v0, hh, atol=1e-12)
    ok, reports = is_decomposable(v0, DimProfile((2, 2)), 1e-7)
    assert ok and reports[0].ratio < 1e-12


def test_build_v0_size_mismatch():
    prof = degeneracy_profile(eig_hermitian(np.diag([0.5, 0.5, 0.0, 0.0])), 1e-8)
    with pytest.raises(ValueError):
        build_V0(np.eye(4), np.eye(4), prof, [np.eye(2), np.eye(3)])


def test_objective_zero_at_solution():
    x, y, _ = example_bases(3, 5, 7)
    ctx = PhaseContext(x, y, DimProfile((2, 2, 2)))
    assert objective(witness_phases(), ctx) < 1e-20


def test_objective_positive_at_zero_phases():
    x, y, _ = example_bases(3, 5, 7)
    ctx = PhaseContext(x, y, DimProfile((2, 2, 2)))
    assert objective(np.zeros(8), ctx) > 1e-4


def test_objective_invariant_under_global_shift():
    rng = np.random.default_rng(11)
    x, y = haar_unitary(8, rng), haar_unitary(8, rng)
    ctx = PhaseContext(x, y, DimProfile((2, 2, 2)))
    theta = rng.uniform(0, 2 * np.pi, 8)
    f0 = objective(theta, ctx)
    for c in [0.7, np.pi, 5.1]:
        assert np.isclose(objective((theta + c) % (2 * np.pi), ctx), f0, rtol=1e-9)


def test_phase_search_identical_state_succeeds_from_zero_seed():
    rho = random_density(DimProfile((2, 2, 2)), "generic-nondegenerate", 3)
    s = eig_hermitian(rho.matrix)
    ctx = PhaseContext(s.basis, s.basis, rho.profile)
    assert ctx.eval_full(np.zeros(8)) < 1e-14  # the zero seed is already a solution
    outcome = phase_search(ctx, QUICK)
    assert outcome.success and outcome.objective < 1e-14


def test_phase_search_paper_pair_and_decompose_agreement():
    rho, rho_p = paper_example(3, 5, 7)
    s1, s2 = eig_hermitian(rho.matrix), eig_hermitian(rho_p.matrix)
    ctx = PhaseContext(s1.basis, s2.basis, rho.profile)
    outcome = phase_search(ctx, QUICK)
    assert outcome.success
    ok, _ = is_decomposable(build_V(s1.basis, s2.basis, outcome.params), rho.profile, 1e-7)
    assert ok


def test_check_self_equivalence_identity_witness():
    rho = random_density(DimProfile((2, 2, 2)), "generic-nondegenerate", 17)
    verdict = check_equivalence(rho, rho, QUICK)
    assert verdict.status is VerdictStatus.EQUIVALENT
    assert verdict.witness_residual < 1e-8
    for f in verdict.witness.factors:
        phase = f[0, 0] / abs(f[0, 0])
        assert np.allclose(f / phase, np.eye(f.shape[0]), atol=1e-6)


def test_check_perturbed_eigenvalue_is_spectral_mismatch():
    rho = random_density(DimProfile((2, 2)), "generic-nondegenerate", 19)
    s = eig_hermitian(rho.matrix)
    lam = s.eigenvalues.copy()
    lam[0] += 1e-3
    lam /= lam.sum()
    m = (s.basis * lam[np.newaxis, :]) @ s.basis.conj().T
    rho_p = DensityMatrix(matrix=(m + m.conj().T) / 2, profile=rho.profile)
    verdict = check_equivalence(rho, rho_p, QUICK)
    assert verdict.status is VerdictStatus.INEQUIVALENT_SPECTRUM


def test_check_paper_example():
    rho, rho_p = paper_example(3, 5, 7)
    verdict = check_equivalence(rho, rho_p, SearchConfig(seed=0))
    assert verdict.status is VerdictStatus.EQUIVALENT
    assert verdict.witness_residual < 1e-8
    assert not verdict.used_degenerate_fallback


def test_verify_witness_identity():
    rho = random_density(DimProfile((2, 2)), "generic-nondegenerate", 23)
    fs = FactorSet(factors=(np.eye(2, dtype=complex), np.eye(2, dtype=complex)))
    assert verify_witness(rho, rho, fs) == 0.0


def test_verify_witness_planted_construction():
    profile = DimProfile((2, 2, 2))
    rho = random_density(profile, "generic-nondegenerate", 29)
    factors = local_unitaries(profile, 31)
    w = kron_all(factors)
    rho_p = DensityMatrix(matrix=w @ rho.matrix @ w.conj().T, profile=profile)
    assert verify_witness(rho, rho_p, FactorSet(factors=factors)) < 1e-12


def test_verify_witness_dimension_mismatch():
    rho = random_density(DimProfile((2, 2)), "generic-nondegenerate", 37)
    fs = FactorSet(factors=(np.eye(2, dtype=complex), np.eye(3, dtype=complex)))
    with pytest.raises(ValueError):
        verify_witness(rho, rho, fs)


def test_verdict_gauge_invariant_under_local_conjugation():
    profile = DimProfile((2, 2, 2))
    sample = make_equivalent_pair(profile, 41)
    g = kron_all(local_unitaries(profile, 43))
    conj = DensityMatrix(
        matrix=g @ sample.rho.matrix @ g.conj().T, profile=profile
    )
    v1 = check_equivalence(sample.rho, sample.rho_prime, QUICK)
    v2 = check_equivalence(conj, sample.rho_prime, QUICK)
    assert v1.status is VerdictStatus.EQUIVALENT
    assert v2.status is VerdictStatus.EQUIVALENT


def test_not_found_for_equal_spectrum_inequivalent_pair():
    # Bell-diagonal entangled state vs a separable diagonal state with the
    # same spectrum: no local-unitary map exists, so the one-sided search
    # must come back NOT_FOUND (never a claim of inequivalence)
    lam = np.array([0.7, 0.15, 0.1, 0.05])
    bell = np.array(
        [
            [1, 0, 0, 1],
            [0, 1, 1, 0],
            [0, 1, -1, 0],
            [1, 0, 0, -1],
        ]
    ) / np.sqrt(2.0)
    rho = DensityMatrix(
        matrix=(bell * lam[np.newaxis, :]) @ bell.conj().T, profile=DimProfile((2, 2))
    )
    rho_p = DensityMatrix(matrix=np.diag(lam).astype(complex), profile=DimProfile((2, 2)))
    verdict = check_equivalence(rho, rho_p, SearchConfig(seeds=8, sweeps=20, restarts=4))
    assert verdict.status is VerdictStatus.NOT_FOUND
    assert verdict.witness is None
    assert verdict.best_objective > 1e-6


def test_check_degenerate_bell_pair_end_to_end():
    h = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
    hh = np.kron(h, h)
    profile = DimProfile((2, 2))
    rho = DensityMatrix(matrix=np.diag([0.5, 0.0, 0.0, 0.5]).astype(complex), profile=profile)
    rho_p = DensityMatrix(matrix=hh @ rho.matrix @ hh.conj().T, profile=profile)
    verdict = check_equivalence(rho, rho_p, SearchConfig(seed=2))
    assert verdict.status is VerdictStatus.EQUIVALENT
    assert verdict.used_degenerate_fallback
    assert verdict.witness_residual < 1e-8


def test_degenerate_unsupported_for_large_blocks():
    rho = DensityMatrix(matrix=np.eye(4, dtype=complex) / 4.0, profile=DimProfile((2, 2)))
    verdict = check_equivalence(rho, rho, QUICK)
    assert verdict.status is VerdictStatus.DEGENERATE_UNSUPPORTED


def test_check_rejects_non_hermitian():
    m = np.diag([0.5, 0.3, 0.15, 0.05]).astype(complex)
    m[0, 1] = 0.2  # not mirrored
    rho = DensityMatrix(matrix=m, profile=DimProfile((2, 2)))
    with pytest.raises(ValueError, match="Hermitian"):
        check_equivalence(rho, rho, QUICK)


def test_check_rejects_negative_eigenvalue():
    m = np.diag([0.6, 0.5, -0.1, 0.0]).astype(complex)
    rho = DensityMatrix(matrix=m, profile=DimProfile((2, 2)))
    with pytest.raises(ValueError, match="negative eigenvalue"):
        check_equivalence(rho, rho, QUICK)


def test_check_normalizes_trace_with_warning():
    rho = random_density(DimProfile((2, 2)), "generic-nondegenerate", 47)
    doubled = DensityMatrix(matrix=2.0 * rho.matrix, profile=rho.profile)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        verdict = check_equivalence(doubled, rho, QUICK)
    assert any("renormalizing" in str(w.message) for w in caught)
    assert verdict.status is VerdictStatus.EQUIVALENT


def test_check_profile_mismatch():
    rho = random_density(DimProfile((2, 2)), "generic-nondegenerate", 53)
    other = DensityMatrix(matrix=rho.matrix, profile=DimProfile((4, 1)))
    with pytest.raises(ValueError, match="profiles differ"):
        check_equivalence(rho, other, QUICK)


def test_check_deterministic_given_seed():
    sample = make_equivalent_pair(DimProfile((2, 2, 2)), 111)
    v1 = check_equivalence(sample.rho, sample.rho_prime, SearchConfig(seed=9))
    v2 = check_equivalence(sample.rho, sample.rho_prime, SearchConfig(seed=9))
    assert v1.status is v2.status is VerdictStatus.EQUIVALENT
    assert np.array_equal(v1.phases, v2.phases)
    for f1, f2 in zip(v1.witness.factors, v2.witness.factors):
        assert np.array_equal(f1, f2)


def test_threads_do_not_change_the_result():
    sample = make_equivalent_pair(DimProfile((2, 2, 2)), 97)
    v1 = check_equivalence(sample.rho, sample.rho_prime, SearchConfig(seed=3, threads=1))
    v2 = check_equivalence(sample.rho, sample.rho_prime, SearchConfig(seed=3, threads=4))
    assert v1.status is v2.status is VerdictStatus.EQUIVALENT
    assert np.array_equal(v1.phases, v2.phases)
    assert v1.best_objective == v2.best_objective
    for f1, f2 in zip(v1.witness.factors, v2.witness.factors):
        assert np.array_equal(f1, f2)


def test_planted_pairs_beyond_three_qubits():
    for dims in [(2, 2, 2, 2), (3, 3, 3)]:
        profile = DimProfile(dims)
        for seed in range(3):
            sample = make_equivalent_pair(profile, 500 + seed)
            verdict = check_equivalence(sample.rho, sample.rho_prime, SearchConfig(seed=seed))
            assert verdict.status is VerdictStatus.EQUIVALENT, (dims, seed)
            assert verdict.witness_residual < 1e-8
            assert len(verdict.witness.factors) == len(dims)


def test_planted_success_rate_small():
    profile = DimProfile((2, 2, 2))
    wins = 0
    for seed in range(20):
        sample = make_equivalent_pair(profile, 1000 + seed)
        verdict = check_equivalence(sample.rho, sample.rho_prime, SearchConfig(seed=seed))
        if verdict.status is VerdictStatus.EQUIVALENT:
            assert verdict.witness_residual < 1e-8
            wins += 1
    assert wins >= 19

import numpy as np
import pytest
import scipy.linalg as la

from gframes.constructions import (
    build_compact_example,
    build_g_orthonormal,
    build_riesz_bridge_example,
    random_contraction,
)
from gframes.core import GFrameFamily, classify
from gframes.errors import (
    DimensionError,
    DomainError,
    NotAGFrameError,
    PreconditionError,
)
from gframes.representation import (
    compactness_dichotomy,
    fit_representation,
    frame_operator_generator_bound,
    generate_family,
    infinite_frame_bounds,
    infinite_frame_operator,
    injectivity_report,
    kernel_shift_invariance,
    mixed_operator_obstruction,
    power_decay,
    range_span_identity,
    similarity_transport,
    unitary_obstruction,
)

from conftest import cgauss, haar_unitary, random_unit, rotation

I2 = np.eye(2)
DIAG_T = np.diag([0.5, 1 / 3])


# ---------------------------------------------------------------- generate_family

def test_generate_identity_generator():
    fam = generate_family(I2, I2, 3)
    assert len(fam) == 3
    for m in fam:
        np.testing.assert_array_equal(m, I2)


def test_generate_diagonal_powers():
    fam = generate_family(I2, DIAG_T, 3)
    for m, expected in zip(fam, [I2, np.diag([1 / 2, 1 / 3]), np.diag([1 / 4, 1 / 9])]):
        np.testing.assert_allclose(m, expected, atol=1e-16)


def test_generate_invertible_depth_one_is_riesz_basis(rng):
    lam = cgauss(rng, (3, 3))
    fam = generate_family(lam, np.eye(3), 1)
    assert classify(fam).is_g_riesz_basis


def test_generate_shape_errors():
    with pytest.raises(DimensionError):
        generate_family(I2, np.eye(3), 2)
    with pytest.raises(DomainError):
        generate_family(I2, I2, 0)


def test_infinite_frame_operator_matches_series():
    s = infinite_frame_operator(I2, DIAG_T)
    np.testing.assert_allclose(s, np.diag([4 / 3, 9 / 8]), atol=1e-14)
    b = infinite_frame_bounds(np.eye(4), build_compact_example(0.9, 4, 2)[1])
    assert b.upper == pytest.approx(1 / (1 - 0.81), rel=1e-12)
    with pytest.raises(DomainError):
        infinite_frame_operator(I2, rotation(1.0))


# ---------------------------------------------------------------- fit

def test_fit_constant_family_gives_identity(rng):
    lam = cgauss(rng, (3, 3))
    fit = fit_representation(GFrameFamily((lam, lam, lam)))
    np.testing.assert_allclose(fit.t_matrix, np.eye(3), atol=1e-12)
    assert fit.max_residual < 1e-12
    assert fit.exact and fit.unique


def test_fit_recovers_diagonal_generator():
    fit = fit_representation(generate_family(I2, DIAG_T, 10))
    np.testing.assert_allclose(fit.t_matrix, DIAG_T, atol=1e-10)
    assert fit.max_residual == max(fit.step_residuals)
    assert fit.norm_certificate.satisfied


def test_fit_g_orthonormal_basis_certificate():
    fam = build_g_orthonormal(6, 2, seed=5)
    fit = fit_representation(fam)
    assert fit.exact
    # Parseval family: sqrt(B/A) = 1
    assert fit.norm_certificate.bound == pytest.approx(1.0)
    assert fit.norm_certificate.t_norm <= 1 + 1e-8


def test_fit_flags_non_unique(rng):
    # stacked [Lambda_1] has rank 1 < 3
    lam = cgauss(rng, (1, 3))
    fit = fit_representation(GFrameFamily((lam, 2 * lam)))
    assert not fit.unique and fit.rank == 1
    assert fit.exact


def test_fit_preconditions(rng):
    with pytest.raises(PreconditionError):
        fit_representation(GFrameFamily((I2,)))
    with pytest.raises(DimensionError):
        fit_representation(GFrameFamily((cgauss(rng, (1, 2)), cgauss(rng, (2, 2)))))


# ---------------------------------------------------------------- kernel shift invariance

def test_kernel_trivial_for_riesz_basis():
    rep = kernel_shift_invariance(build_g_orthonormal(4, 2, seed=0))
    assert rep.kernel_dim == 0 and rep.defect == 0.0 and rep.invariant
    assert rep.prefix_independent


def test_kernel_repeated_invertible_member(rng):
    lam = cgauss(rng, (2, 2))
    rep = kernel_shift_invariance(GFrameFamily((lam, lam)))
    # kernel {(g, -g)}: (g, -g)/sqrt2 shifts to (0, g)/sqrt2, at distance 1/2 from the kernel
    assert rep.kernel_dim == 2
    assert rep.defect == pytest.approx(0.5, abs=1e-12)
    assert not rep.invariant
    assert rep.first_dependent_prefix == 2


@pytest.mark.parametrize("n, m, depth", [(3, 1, 5), (4, 2, 4), (6, 2, 8), (5, 3, 6)])
def test_kernel_interior_invariance_for_generated_families(rng, n, m, depth):
    lam = cgauss(rng, (m, n))
    t = random_contraction(n, rng, 0.8)
    fam = generate_family(lam, t, depth)
    rep = kernel_shift_invariance(fam)
    assert rep.interior_invariant

    # oracle: interior kernel vectors straight from the SVD of the synthesis matrix
    syn = np.hstack([x.conj().T for x in fam])
    _, s, vh = np.linalg.svd(syn)
    r = int(np.sum(s > 1e-9 * s[0]))
    ker = vh[r:].conj().T
    assert ker.shape[1] == rep.kernel_dim
    interior = ker @ la.null_space(ker[-m:], rcond=1e-9)
    shifted = np.vstack([np.zeros((m, interior.shape[1])), interior[:-m]])
    if interior.size:
        assert np.linalg.norm(syn @ shifted) < 1e-9


def test_prefix_independence_detects_overfull_prefix():
    rep = kernel_shift_invariance(generate_family(I2, DIAG_T, 3))
    assert rep.first_dependent_prefix == 2
    assert not rep.prefix_independent


# ---------------------------------------------------------------- range span

def test_range_span_identity_examples():
    fam = generate_family(I2, I2, 2)
    rep = range_span_identity(fam, I2)
    assert rep.projector_distance.value < 1e-12 and rep.rank_span == 2
    t = np.diag([1.0, 0.0])
    rep = range_span_identity(generate_family(I2, t, 3), t)
    assert rep.projector_distance.value < 1e-12
    assert rep.rank_range_t_adj == rep.rank_span == 1


def test_range_span_random_fits_against_qr(rng):
    for _ in range(20):
        n = int(rng.integers(2, 6))
        t = random_contraction(n, rng, 0.8, rank=int(rng.integers(1, n + 1)))
        fam = generate_family(cgauss(rng, (1, n)), t, 3 * n)
        fit = fit_representation(fam)
        rep = range_span_identity(fam, fit.t_matrix)
        assert rep.projector_distance.passed

        # oracle: pivoted QR ranks of both sides
        def qr_rank(a):
            _, r, _ = la.qr(a, pivoting=True, mode="economic")
            d = np.abs(np.diag(r))
            return int(np.sum(d > 1e-9 * d[0]))

        t_adj = fit.t_matrix.conj().T
        assert qr_rank(t_adj) == rep.rank_range_t_adj
        assert qr_rank(t_adj @ fam.synthesis_matrix) == rep.rank_span


# ---------------------------------------------------------------- injectivity

def test_injectivity_identity_generator():
    rep = injectivity_report(generate_family(I2, I2, 2), I2)
    assert rep.injective and rep.cond_ii and rep.cond_iii and rep.verdicts_agree


def test_injectivity_riesz_bridge_all_false():
    fam, t_adj = build_riesz_bridge_example(4, 0.5, seed=3)
    rep = injectivity_report(fam, t_adj)
    assert not rep.injective and not rep.cond_ii and not rep.cond_iii
    assert rep.verdicts_agree


def test_injectivity_sufficient_condition():
    fam = generate_family(0.5 * I2, DIAG_T, 64)
    rep = injectivity_report(fam, DIAG_T)
    # A = (1/4) (9/8) = 9/32 so sqrt(A) = 0.530 > ||Lambda_1|| = 1/2
    assert rep.sufficient_condition.sqrt_lower_bound == pytest.approx(np.sqrt(9 / 32))
    assert rep.sufficient_condition.holds
    assert rep.sigma_min_t == pytest.approx(la.svdvals(DIAG_T)[-1])
    assert rep.injective and rep.sufficient_consistent


def test_injectivity_requires_g_frame():
    with pytest.raises(NotAGFrameError):
        injectivity_report(GFrameFamily((np.array([[1.0, 0.0]]),)), I2)


# ---------------------------------------------------------------- power decay

def test_decay_zero_generator():
    trace = power_decay(np.zeros((2, 2)), [3.0, 4.0], I2, 5)
    assert trace.norms == (5.0, 0, 0, 0, 0, 0)
    assert trace.converged


def test_decay_diagonal_first_step():
    trace = power_decay(DIAG_T, [1.0, 1.0], I2, 10)
    assert trace.norms[1] == pytest.approx(np.sqrt(13) / 6, rel=1e-15)
    assert trace.chain_holds
    assert all(a >= b for a, b in zip(trace.tail_energies, trace.tail_energies[1:]))


def test_decay_unitary_constant_norms(rng):
    f = cgauss(rng, 2)
    trace = power_decay(rotation(1.0), f, I2, 50)
    np.testing.assert_allclose(trace.norms, np.linalg.norm(f), rtol=1e-12)
    assert not trace.converged


def test_decay_shape_errors():
    with pytest.raises(DimensionError):
        power_decay(DIAG_T, [1.0, 1.0, 1.0], I2, 3)
    with pytest.raises(DomainError):
        power_decay(DIAG_T, [1.0, 1.0], I2, 0)


# ---------------------------------------------------------------- unitary obstruction

def test_obstruction_identity_generator():
    rep = unitary_obstruction(I2, I2, (4, 8, 16))
    np.testing.assert_allclose(rep.upper_bounds, (4, 8, 16), rtol=1e-14)
    assert rep.obstructed


def test_obstruction_rotation_against_closed_form():
    rep = unitary_obstruction(np.diag([1.0, 0.0]), rotation(1.0), (8, 32, 128))
    for n, b in zip(rep.depths, rep.upper_bounds):
        # S_N = N/2 I + (1/2) sum_k [[cos 2k, -sin 2k], [-sin 2k, -cos 2k]]
        oracle = n / 2 + abs(np.sum(np.exp(2j * np.arange(n)))) / 2
        assert b == pytest.approx(oracle, rel=1e-12)
    assert rep.ratio_stability.passed
    assert not any(rep.decay_converged)
    assert rep.obstructed


def test_obstruction_random_generator_never_decays(rng):
    rep = unitary_obstruction(cgauss(rng, (1, 3)), haar_unitary(rng, 3), (64, 128))
    assert rep.decay_converged == (False, False)
    assert rep.obstructed


def test_obstruction_rejects_non_unitary():
    with pytest.raises(PreconditionError) as exc:
        unitary_obstruction(I2, DIAG_T, (4,))
    assert exc.value.value == pytest.approx(1 - 1 / 9)


def test_mixed_obstruction():
    a = build_g_orthonormal(4, 2, seed=1)
    rep = mixed_operator_obstruction(a, a)
    np.testing.assert_allclose(rep.mixed_operator, np.eye(4), atol=1e-12)
    b = build_g_orthonormal(4, 2, seed=2)
    rep = mixed_operator_obstruction(a, b)
    u = rep.mixed_operator
    assert np.linalg.norm(u.conj().T @ u - np.eye(4), 2) < 1e-10
    assert rep.unitarity.passed and rep.obstructed
    with pytest.raises(PreconditionError):
        mixed_operator_obstruction(a, GFrameFamily((2 * np.eye(4),)))


# ---------------------------------------------------------------- similarity

def test_similarity_identity(rng):
    lam = cgauss(rng, (2, 3))
    t = random_contraction(3, rng)
    rep = similarity_transport(lam, t, np.eye(3), 10)
    np.testing.assert_allclose(rep.theta, lam)
    np.testing.assert_allclose(rep.s_matrix, t)
    assert rep.termwise.value == 0.0


def test_similarity_random_v(rng):
    lam = cgauss(rng, (2, 3))
    t = np.diag([0.6, 0.3, -0.2])
    v = cgauss(rng, (3, 3))
    f = random_unit(rng, 3)
    rep = similarity_transport(lam, t, v, 12, f=f)
    # oracle: both energy sequences directly
    theta, s = lam @ np.linalg.inv(v), v @ t @ np.linalg.inv(v)
    lhs = [np.linalg.norm(lam @ np.linalg.matrix_power(t, i) @ f) ** 2 for i in range(12)]
    rhs = [np.linalg.norm(theta @ np.linalg.matrix_power(s, i) @ v @ f) ** 2 for i in range(12)]
    np.testing.assert_allclose(lhs, rhs, rtol=1e-9)
    assert rep.termwise.passed and rep.frame_operator_identity.passed
    assert rep.same_g_frame_verdict and rep.v_unique
    assert rep.v_recovery_error < 1e-8
    assert rep.conjugated_residual.passed
    assert rep.conjugated_fit_error < 1e-8


def test_similarity_rejects_singular_v():
    with pytest.raises(PreconditionError):
        similarity_transport(I2, DIAG_T, np.diag([1.0, 0.0]), 4)


# ---------------------------------------------------------------- generator bound

def test_generator_bound_lower_bound_above_one(rng):
    fam = generate_family(I2, DIAG_T, 64)  # A = 9/8
    for _ in range(5):
        rep = frame_operator_generator_bound(fam, cgauss(rng, (2, 2)), 32)
        assert not rep.hypothesis_met and rep.conclusion is None
        assert rep.bounds_double_depth.upper > rep.bounds_depth.upper


def test_generator_bound_half_lower_bound():
    fam = GFrameFamily((I2 / np.sqrt(2),))  # S = I/2
    rep = frame_operator_generator_bound(fam, fam[0], 64)
    assert rep.hypothesis_met and rep.conclusion.passed
    assert rep.margin == pytest.approx(0.5)


def test_generator_bound_parseval_constant_family():
    fam = build_g_orthonormal(4, 2, seed=0)
    rep = frame_operator_generator_bound(fam, fam[0] + fam[1], 32)
    assert not rep.hypothesis_met
    assert rep.bounds_double_depth.upper == pytest.approx(2 * rep.bounds_depth.upper)


# ---------------------------------------------------------------- compactness

def test_compactness_example_half():
    fam, t = build_compact_example(0.5, 4, 64)
    rep = compactness_dichotomy(fam, t)
    assert rep.rank_t == 1 and rep.low_rank
    assert rep.is_g_frame
    assert 1 - 1e-12 <= rep.bounds.lower and rep.bounds.upper <= 4 / 3 + 1e-12
    assert rep.mechanism_holds


def test_compactness_scalar_codomain_full_rank(rng):
    # every generated cod_dim = 1 g-frame whose tail already spans: rank T = n
    for _ in range(10):
        n = int(rng.integers(2, 6))
        fam = generate_family(cgauss(rng, (1, n)), random_contraction(n, rng, 0.7), 64)
        fit = fit_representation(fam)
        rep = compactness_dichotomy(fam, fit.t_matrix)
        assert rep.finite_codomain and rep.is_g_frame
        assert rep.rank_t == np.linalg.matrix_rank(fit.t_matrix) == n
        assert rep.mechanism_holds


def test_compactness_riesz_bridge_rank_bound_is_sharp():
    fam, t_adj = build_riesz_bridge_example(4, 0.5, seed=0)
    rep = compactness_dichotomy(fam, t_adj)
    assert rep.rank_t == 3 == rep.rank_lower_bound
    assert rep.mechanism_holds


def test_compactness_identity():
    rep = compactness_dichotomy(generate_family(I2, I2, 3), I2)
    assert rep.rank_t == 2 and not rep.low_rank and rep.mechanism_holds

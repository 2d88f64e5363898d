"""Operator representations ``Lambda_i = Lambda_1 T^{i-1}``.

Fitting, verification and the structural consequences of a representation:
norm certificate, kernel shift invariance, range identity, injectivity
criteria, power decay, the unitary obstruction, similarity transport and the
rank form of the compactness dichotomy.

Infinite families are handled through depth-``N`` truncations. Where a
statement only survives truncation in weakened form (the unitary obstruction,
compactness) the report carries the finite-dimensional signature instead of
the infinite claim.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .core import (
    DEFAULT_TOL,
    GFrameFamily,
    FrameBounds,
    as_operator,
    classify,
    frame_bounds,
    frame_operator,
    mixed_frame_operator,
    require_g_frame,
    spectral_norm,
)
from .errors import DimensionError, DomainError, PreconditionError
from .report import Check

CERTIFICATE_SLACK = 1e-8


def _square(t, n, name="t"):
    t = as_operator(t, name)
    if t.shape != (n, n):
        raise DimensionError(f"{name} must be {n}x{n}, got {t.shape}")
    return t


def _rank(a, tol):
    s = la.svdvals(a)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def _projector(a, tol):
    q = la.orth(a, rcond=tol)
    return q @ q.conj().T


def _require_shared_codomain(family):
    m = family.shared_codomain
    if m is None:
        raise DimensionError(
            f"representations need a common codomain, got dims {family.cod_dims}"
        )
    return m


def generate_family(lambda1, t, depth, truncated=True):
    """``[Lambda_1, Lambda_1 T, ..., Lambda_1 T^{depth-1}]`` by repeated right-multiplication."""
    lambda1 = as_operator(lambda1, "lambda1")
    t = _square(t, lambda1.shape[1])
    if depth < 1:
        raise DomainError(f"depth must be positive, got {depth}")
    members = [lambda1]
    for _ in range(depth - 1):
        members.append(members[-1] @ t)
    return GFrameFamily(tuple(members), truncated=truncated)


def infinite_frame_operator(lambda1, t):
    """Frame operator of the untruncated family ``{Lambda_1 T^{i-1}}_{i>=1}``.

    It is the solution of the Stein equation ``S = Lambda_1^* Lambda_1 + T^* S T``,
    which converges when the spectral radius of ``T`` is below 1.
    """
    lambda1 = as_operator(lambda1, "lambda1")
    t = _square(t, lambda1.shape[1])
    rho = float(np.max(np.abs(la.eigvals(t))))
    if rho >= 1 - 1e-12:
        raise DomainError(f"spectral radius {rho:.6g} >= 1: the series diverges")
    s = la.solve_discrete_lyapunov(t.conj().T, lambda1.conj().T @ lambda1)
    return (s + s.conj().T) / 2


def infinite_frame_bounds(lambda1, t):
    w = la.eigvalsh(infinite_frame_operator(lambda1, t))
    return FrameBounds(max(float(w[0]), 0.0), float(w[-1]))


@dataclass(frozen=True)
class NormCertificate:
    t_norm: float
    bound: float  # sqrt(B/A); inf when the family is not a g-frame
    satisfied: bool
    applicable: bool


@dataclass(frozen=True)
class RepresentationFit:
    t_matrix: np.ndarray
    step_residuals: tuple
    max_residual: float
    exact: bool
    unique: bool
    rank: int
    norm_certificate: NormCertificate


def fit_representation(family, tol=DEFAULT_TOL, rank_tol=1e-12, slack=CERTIFICATE_SLACK):
    """Least-squares ``T`` minimizing ``sum_i ||Lambda_{i+1} - Lambda_i T||_F^2``.

    Uses the SVD pseudoinverse of ``[Lambda_1; ...; Lambda_{N-1}]`` with
    relative cutoff ``rank_tol``. When that stack is rank deficient the
    minimum-norm solution is returned and ``unique`` is False. The fit is
    ``exact`` when every step residual is below ``tol * max ||Lambda_i||``.
    """
    _require_shared_codomain(family)
    if len(family) < 2:
        raise PreconditionError("fitting needs at least two members", value=len(family))
    x = np.vstack(family.members[:-1])
    y = np.vstack(family.members[1:])
    t = la.pinv(x, atol=0.0, rtol=rank_tol) @ y
    residuals = tuple(
        float(np.linalg.norm(b - a @ t)) for a, b in zip(family.members[:-1], family.members[1:])
    )
    max_residual = max(residuals)
    scale = max(spectral_norm(m) for m in family)
    rank = _rank(x, rank_tol)

    bounds = frame_bounds(family)
    applicable = bounds.is_positive(tol)
    bound = float(np.sqrt(bounds.upper / bounds.lower)) if applicable else float("inf")
    t_norm = spectral_norm(t)
    cert = NormCertificate(t_norm, bound, bool(t_norm <= bound + slack), applicable)

    t.setflags(write=False)
    return RepresentationFit(
        t_matrix=t,
        step_residuals=residuals,
        max_residual=max_residual,
        exact=bool(max_residual < tol * scale),
        unique=rank == family.dom_dim,
        rank=rank,
        norm_certificate=cert,
    )


@dataclass(frozen=True)
class ShiftInvarianceReport:
    invariant: bool
    defect: float
    interior_defect: float
    interior_invariant: bool
    kernel_dim: int
    interior_kernel_dim: int
    prefix_independent: bool
    first_dependent_prefix: int | None


def kernel_shift_invariance(family, tol=DEFAULT_TOL):
    """Test whether ``ker T_Lambda`` is mapped into itself by the block right-shift.

    The truncated shift prepends a zero block and drops the last one. The
    full ``defect`` is the largest distance from a shifted unit kernel vector
    to the kernel; ``interior_defect`` restricts to kernel vectors whose last
    block is zero, which separates out the truncation edge. For a family that
    really is ``{Lambda_1 T^{i-1}}`` the interior defect vanishes.

    ``prefix_independent`` checks the finite-independence hypothesis: every
    prefix ``{Lambda_1..Lambda_k}`` has a positive lower Riesz bound.
    """
    m = _require_shared_codomain(family)
    syn = family.synthesis_matrix
    total = syn.shape[1]
    kernel = la.null_space(syn, rcond=tol)
    shift = np.eye(total, k=-m)

    def distance(basis):
        if basis.shape[1] == 0:
            return 0.0
        moved = shift @ basis
        return spectral_norm(moved - kernel @ (kernel.conj().T @ moved))

    if kernel.shape[1]:
        inner = la.null_space(kernel[-m:, :], rcond=tol)
        interior = kernel @ inner
    else:
        interior = kernel
    defect = distance(kernel)
    interior_defect = distance(interior)

    first_dependent = None
    a = family.analysis_matrix
    for k in range(1, len(family) + 1):
        rows = a[: k * m]
        s = la.svdvals(rows)
        if rows.shape[0] > rows.shape[1] or s[-1] ** 2 <= tol * s[0] ** 2:
            first_dependent = k
            break

    return ShiftInvarianceReport(
        invariant=bool(defect < tol),
        defect=defect,
        interior_defect=interior_defect,
        interior_invariant=bool(interior_defect < tol),
        kernel_dim=kernel.shape[1],
        interior_kernel_dim=interior.shape[1],
        prefix_independent=first_dependent is None,
        first_dependent_prefix=first_dependent,
    )


@dataclass(frozen=True)
class RangeSpanReport:
    rank_range_t_adj: int
    rank_span: int
    projector_distance: Check


def range_span_identity(family, t, tol=DEFAULT_TOL, threshold=1e-8):
    """Compare ``Ran T^*`` with ``span{T^* Lambda_i^* e_j}`` via orthogonal projectors."""
    t = _square(t, family.dom_dim)
    t_adj = t.conj().T
    span = t_adj @ family.synthesis_matrix
    dist = spectral_norm(_projector(t_adj, tol) - _projector(span, tol))
    return RangeSpanReport(
        rank_range_t_adj=_rank(t_adj, tol),
        rank_span=_rank(span, tol),
        projector_distance=Check.below(dist, threshold),
    )


@dataclass(frozen=True)
class SufficientCondition:
    lambda1_norm: float
    sqrt_lower_bound: float
    holds: bool


@dataclass(frozen=True)
class InjectivityReport:
    sigma_min_t: float
    injective: bool
    sufficient_condition: SufficientCondition
    sufficient_consistent: bool
    cond_ii: bool
    min_principal_angle: float
    cond_iii: bool
    range_residual: float
    verdicts_agree: bool


def injectivity_report(family, t, tol=DEFAULT_TOL):
    """Evaluate three equivalent injectivity criteria for a representation ``T``.

    (i) ``T`` injective; (ii) ``Ran(S^{-1} Lambda_1^*)`` meets ``ker T`` only in 0,
    measured by the smallest principal angle; (iii) ``Ran Lambda_1^*`` lies in
    ``Ran T^*``, measured by the relative residual of the projection. Also
    records the sufficient condition ``||Lambda_1|| < sqrt(A)``.
    """
    bounds = require_g_frame(family, tol)
    n = family.dom_dim
    t = _square(t, n)
    lambda1 = family[0]

    s = la.svdvals(t)
    injective = bool(s[0] > 0 and s[-1] > tol * s[0])

    l1_norm = spectral_norm(lambda1)
    sqrt_a = float(np.sqrt(bounds.lower))
    suff = SufficientCondition(l1_norm, sqrt_a, bool(l1_norm < sqrt_a))

    ker_t = la.null_space(t, rcond=tol)
    dual_range = la.orth(la.solve(frame_operator(family), lambda1.conj().T, assume_a="pos"), rcond=tol)
    if ker_t.shape[1] == 0 or dual_range.shape[1] == 0:
        min_angle = float(np.pi / 2)
    else:
        min_angle = float(np.min(la.subspace_angles(dual_range, ker_t)))
    cond_ii = min_angle > tol

    p_range = _projector(t.conj().T, tol)
    l1_adj = lambda1.conj().T
    residual = spectral_norm(l1_adj - p_range @ l1_adj) / max(l1_norm, np.finfo(float).tiny)
    cond_iii = residual < tol

    return InjectivityReport(
        sigma_min_t=float(s[-1]),
        injective=injective,
        sufficient_condition=suff,
        sufficient_consistent=(not suff.holds) or injective,
        cond_ii=bool(cond_ii),
        min_principal_angle=min_angle,
        cond_iii=bool(cond_iii),
        range_residual=float(residual),
        verdicts_agree=bool(injective == cond_ii == cond_iii),
    )


@dataclass(frozen=True)
class DecayTrace:
    norms: tuple
    tail_energies: tuple
    lower_bound: float
    chain_holds: bool
    max_chain_gap: float
    converged: bool
    threshold: float


def power_decay(t, f, lambda1, steps, depth=None, lower_bound=None,
                threshold=1e-6, slack=1e-9):
    """Trace ``||T^n f||`` and the tail energies that dominate it.

    ``norms[n] = ||T^n f||`` for ``n = 0..steps``. ``tail_energies[n]`` sums
    ``||Lambda_1 T^i f||^2`` for ``i = n .. steps+depth-1``: each tail then
    contains a full depth-``depth`` window starting at ``n``, so
    ``A ||T^n f||^2 <= tail_energies[n]`` holds with ``A`` the lower frame bound
    of the depth-``depth`` family (``depth`` defaults to ``steps``).
    ``converged`` means ``||T^steps f|| < threshold * ||f||``.
    """
    lambda1 = as_operator(lambda1, "lambda1")
    n_dim = lambda1.shape[1]
    t = _square(t, n_dim)
    f = np.asarray(f, dtype=complex)
    if f.shape != (n_dim,):
        raise DimensionError(f"f must have length {n_dim}, got shape {f.shape}")
    if steps < 1:
        raise DomainError(f"steps must be positive, got {steps}")
    depth = steps if depth is None else depth
    if lower_bound is None:
        lower_bound = frame_bounds(generate_family(lambda1, t, depth)).lower

    horizon = steps + depth - 1
    norms = np.empty(steps + 1)
    energies = np.empty(horizon + 1)
    v = f.copy()
    for k in range(horizon + 1):
        if k <= steps:
            norms[k] = np.linalg.norm(v)
        energies[k] = np.linalg.norm(lambda1 @ v) ** 2
        v = t @ v
    tails = np.cumsum(energies[::-1])[::-1][: steps + 1]

    gap = lower_bound * norms**2 - tails
    allowed = slack * (1.0 + tails[0])
    f_norm = norms[0]
    return DecayTrace(
        norms=tuple(float(x) for x in norms),
        tail_energies=tuple(float(x) for x in tails),
        lower_bound=float(lower_bound),
        chain_holds=bool(np.all(gap <= allowed)),
        max_chain_gap=float(np.max(gap)),
        converged=bool(norms[-1] < threshold * f_norm) if f_norm > 0 else True,
        threshold=threshold,
    )


@dataclass(frozen=True)
class UnitaryObstructionReport:
    unitary_defect: float
    depths: tuple
    lower_bounds: tuple
    upper_bounds: tuple
    growth_ratios: tuple  # B_N / N
    growth_constant: float  # ||Lambda_1||_F^2 / n; B_N >= c N for unitary T
    linear_growth: tuple  # Check per depth: B_N >= c N
    ratio_stability: Check | None  # |r_last / r_prev - 1| <= ratio_tol
    decay_converged: tuple
    obstructed: bool


def unitary_obstruction(lambda1, t, depths, tol=DEFAULT_TOL, ratio_tol=0.2, seed=0):
    """Truncation signature of the fact that a unitary ``T`` never yields a g-frame.

    For unitary ``T`` the trace of the depth-``N`` frame operator is
    ``N ||Lambda_1||_F^2``, so ``B_N >= c N`` with ``c = ||Lambda_1||_F^2 / n``:
    the upper bound diverges linearly. In addition ``||T^n f|| = ||f||`` so the
    decay test fails for every ``f != 0``. Both are recorded; ``obstructed``
    requires linear growth at every depth, a stable ``B_N / N`` between the two
    deepest truncations, and failed decay for the tested vectors.
    """
    lambda1 = as_operator(lambda1, "lambda1")
    n = lambda1.shape[1]
    t = _square(t, n)
    defect = spectral_norm(t.conj().T @ t - np.eye(n))
    if defect > tol:
        raise PreconditionError(f"T is not unitary: ||T*T - I|| = {defect:.3e}", value=defect)
    depths = tuple(sorted(int(d) for d in depths))
    if not depths or depths[0] < 1:
        raise DomainError("depths must be positive integers")

    c = float(np.linalg.norm(lambda1) ** 2) / n
    lowers, uppers, ratios, checks = [], [], [], []
    for depth in depths:
        b = frame_bounds(generate_family(lambda1, t, depth))
        lowers.append(b.lower)
        uppers.append(b.upper)
        ratios.append(b.upper / depth)
        checks.append(Check.at_most(c * depth * (1 - 1e-12), b.upper))

    stability = None
    if len(depths) >= 2:
        prev, last = ratios[-2], ratios[-1]
        change = abs(last / prev - 1) if prev > 0 else float("inf")
        stability = Check.at_most(change, ratio_tol)

    rng = np.random.default_rng(seed)
    _, _, vh = la.svd(lambda1)
    probes = [vh[0].conj(), rng.standard_normal(n) + 1j * rng.standard_normal(n)]
    converged = tuple(
        power_decay(t, f, lambda1, depths[-1], depth=1).converged for f in probes
    )
    obstructed = (
        c > 0
        and all(checks)
        and (stability is None or stability.passed)
        and not any(converged)
    )
    return UnitaryObstructionReport(
        unitary_defect=defect,
        depths=depths,
        lower_bounds=tuple(lowers),
        upper_bounds=tuple(uppers),
        growth_ratios=tuple(ratios),
        growth_constant=c,
        linear_growth=tuple(checks),
        ratio_stability=stability,
        decay_converged=converged,
        obstructed=bool(obstructed),
    )


@dataclass(frozen=True)
class MixedObstructionReport:
    mixed_operator: np.ndarray
    unitarity: Check
    generators: tuple  # UnitaryObstructionReport per tested Gamma_1
    obstructed: bool


def mixed_operator_obstruction(onb_a, onb_b, gammas=None, depths=(64, 128),
                               tol=DEFAULT_TOL, seed=0):
    """``S_{Lambda Theta}`` of two g-orthonormal bases is unitary, so no ``Gamma_1`` makes
    ``{Gamma_1 S^{i-1}}`` a g-frame. Tested generators default to a few seeded
    random ``Gamma_1`` plus the first member of ``onb_a``.
    """
    for name, fam in (("onb_a", onb_a), ("onb_b", onb_b)):
        if not classify(fam, tol).is_g_orthonormal:
            raise PreconditionError(f"{name} is not g-orthonormal")
    u = mixed_frame_operator(onb_a, onb_b)
    n = u.shape[0]
    unitarity = Check.at_most(spectral_norm(u.conj().T @ u - np.eye(n)), tol)
    if gammas is None:
        rng = np.random.default_rng(seed)
        m = onb_a.cod_dims[0]
        gammas = [onb_a[0]] + [
            rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)) for _ in range(3)
        ]
    reports = tuple(unitary_obstruction(g, u, depths, tol=tol, seed=seed) for g in gammas)
    u.setflags(write=False)
    return MixedObstructionReport(
        mixed_operator=u,
        unitarity=unitarity,
        generators=reports,
        obstructed=bool(unitarity.passed and all(r.obstructed for r in reports)),
    )


@dataclass(frozen=True)
class SimilarityReport:
    theta: np.ndarray
    s_matrix: np.ndarray
    termwise: Check  # max |lhs_i - rhs_i| / max lhs
    frame_operator_identity: Check  # S_Lambda = V^* S_Theta V
    same_g_frame_verdict: bool
    v_unique: bool
    v_recovery_error: float
    conjugated_residual: Check  # {Lambda_i V} represented by V^-1 T V
    conjugated_fit_error: float


def similarity_transport(lambda1, t, v, depth, f=None, tol=DEFAULT_TOL,
                         threshold=1e-9, seed=0):
    """Move a representation across an invertible ``V``.

    With ``Theta = Lambda_1 V^{-1}`` and ``S = V T V^{-1}`` the families
    ``{Lambda_1 T^{i-1}}`` and ``{Theta S^{i-1}}`` have equal energies at
    ``f`` and ``V f`` term by term. Also checks that ``V`` is recovered from the
    two stacked families, and that ``{Lambda_i V}`` is represented by ``V^{-1} T V``.
    """
    lambda1 = as_operator(lambda1, "lambda1")
    n = lambda1.shape[1]
    t = _square(t, n)
    v = _square(v, n, "v")
    sv = la.svdvals(v)
    if not sv[-1] > tol * sv[0]:
        raise PreconditionError(f"v is singular (sigma_min = {sv[-1]:.3e})", value=float(sv[-1]))
    v_inv = la.inv(v)
    theta = lambda1 @ v_inv
    s = v @ t @ v_inv
    if f is None:
        rng = np.random.default_rng(seed)
        f = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        f /= np.linalg.norm(f)
    f = np.asarray(f, dtype=complex)

    fam_lam = generate_family(lambda1, t, depth)
    fam_theta = generate_family(theta, s, depth)
    lhs = np.array([np.linalg.norm(m @ f) ** 2 for m in fam_lam])
    vf = v @ f
    rhs = np.array([np.linalg.norm(m @ vf) ** 2 for m in fam_theta])
    scale = max(float(lhs.max()), np.finfo(float).tiny)
    termwise = Check.at_most(float(np.max(np.abs(lhs - rhs))) / scale, threshold)

    s_lam = frame_operator(fam_lam)
    s_theta = frame_operator(fam_theta)
    identity_err = spectral_norm(s_lam - v.conj().T @ s_theta @ v) / max(spectral_norm(s_lam), 1.0)
    same = frame_bounds(fam_lam).is_positive(tol) == frame_bounds(fam_theta).is_positive(tol)

    a_theta = fam_theta.analysis_matrix
    v_rec, *_ = la.lstsq(a_theta, fam_lam.analysis_matrix)
    v_unique = _rank(a_theta, tol) == n

    conj_t = v_inv @ t @ v
    moved = [m @ v for m in fam_lam]
    scale_m = max(spectral_norm(m) for m in moved)
    resid = max(
        (float(np.linalg.norm(b - a @ conj_t)) for a, b in zip(moved[:-1], moved[1:])),
        default=0.0,
    )
    if len(moved) >= 2:
        fitted = fit_representation(GFrameFamily(tuple(moved)), tol=tol)
        fit_err = spectral_norm(fitted.t_matrix - conj_t)
    else:
        fit_err = float("nan")

    return SimilarityReport(
        theta=theta,
        s_matrix=s,
        termwise=termwise,
        frame_operator_identity=Check.at_most(identity_err, threshold),
        same_g_frame_verdict=bool(same),
        v_unique=bool(v_unique),
        v_recovery_error=spectral_norm(v_rec - v),
        conjugated_residual=Check.at_most(resid / max(scale_m, np.finfo(float).tiny), threshold),
        conjugated_fit_error=fit_err,
    )


@dataclass(frozen=True)
class GeneratorBoundReport:
    a_lambda: float
    bounds_depth: FrameBounds
    bounds_double_depth: FrameBounds
    stable: bool
    hypothesis_met: bool
    conclusion: Check | None  # A_Lambda < 1 + tol, only when the hypothesis is met
    margin: float  # 1 - A_Lambda


def frame_operator_generator_bound(family, theta1, depth, tol=DEFAULT_TOL, stability_tol=1e-6):
    """Check that ``{Theta_1 S_Lambda^{i-1}}`` can only be a g-frame when ``A_Lambda < 1``.

    The candidate counts as a g-frame when it classifies as one at ``depth``
    and ``2 depth`` and its upper bound has stabilized (relative growth at
    most ``stability_tol``); otherwise the hypothesis is reported as not met.
    """
    a_lambda = require_g_frame(family, tol).lower
    s = frame_operator(family)
    theta1 = as_operator(theta1, "theta1")
    b1 = frame_bounds(generate_family(theta1, s, depth))
    b2 = frame_bounds(generate_family(theta1, s, 2 * depth))
    stable = bool(b1.upper > 0 and b2.upper <= b1.upper * (1 + stability_tol))
    met = bool(b1.is_positive(tol) and b2.is_positive(tol) and stable)
    return GeneratorBoundReport(
        a_lambda=a_lambda,
        bounds_depth=b1,
        bounds_double_depth=b2,
        stable=stable,
        hypothesis_met=met,
        conclusion=Check.below(a_lambda, 1 + tol) if met else None,
        margin=1 - a_lambda,
    )


@dataclass(frozen=True)
class CompactnessReport:
    dom_dim: int
    cod_dim: int
    finite_codomain: bool  # dim K < dim H, the finite-K proxy
    rank_t: int
    low_rank: bool  # rank T < dim H, the compactness proxy
    tail_rank: int  # rank of span{Lambda_{i+1}^* e_j}
    rank_lower_bound: int  # dim H - rank Lambda_1, forced for g-frames
    is_g_frame: bool
    bounds: FrameBounds
    representation_residual: float
    mechanism_holds: bool


def compactness_dichotomy(family, t, rank_tol=DEFAULT_TOL):
    """Rank form of the compactness argument.

    Since ``Lambda_{i+1}^* = T^* Lambda_i^*``, the tail span lies in ``Ran T^*``,
    so ``rank T >= rank(tail)``; for a g-frame the full span is ``H``, hence
    ``rank(tail) >= dim H - rank Lambda_1``. A low-rank ``T`` is therefore only
    possible when the codomain is large compared with the rank deficit.
    """
    m = _require_shared_codomain(family)
    n = family.dom_dim
    t = _square(t, n)
    rank_t = _rank(t, rank_tol)
    rank_l1 = _rank(family[0], rank_tol)
    tail_rank = _rank(np.vstack(family.members[1:]), rank_tol) if len(family) > 1 else 0
    bounds = frame_bounds(family)
    is_frame = bounds.is_positive(rank_tol)
    resid = max(
        (float(np.linalg.norm(b - a @ t)) for a, b in zip(family.members[:-1], family.members[1:])),
        default=0.0,
    )
    forced = n - rank_l1
    holds = rank_t >= tail_rank and (not is_frame or tail_rank >= forced)
    return CompactnessReport(
        dom_dim=n,
        cod_dim=m,
        finite_codomain=m < n,
        rank_t=rank_t,
        low_rank=rank_t < n,
        tail_rank=tail_rank,
        rank_lower_bound=forced,
        is_g_frame=is_frame,
        bounds=bounds,
        representation_residual=resid,
        mechanism_holds=bool(holds),
    )

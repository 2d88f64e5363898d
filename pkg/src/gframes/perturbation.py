"""Stability of g-Riesz sequences under perturbation.

Two weights control how far a perturbed family ``Theta`` can drift from a
g-Riesz sequence ``Lambda``::

    alpha = sum_i ||Lambda_i - Theta_i|| * ||Lambda_i S^+||
    beta  = sum_i ||Lambda_i - Theta_i||^2

With ``alpha < 1`` the Riesz bounds of ``Theta`` lie in
``[(1 - alpha)^2 A, (sqrt(beta) + sqrt(B))^2]``. ``S^+`` is the
pseudoinverse of the frame operator, i.e. the inverse on
``M = span{Lambda_i^* e_j}``; for a g-frame it is the ordinary inverse.

The weight is also computed with ``||Lambda_1 S^+||`` in place of the
per-member factor (``alpha_statement``); only the per-member form
(``alpha_proof``) gates the envelope.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .core import (
    DEFAULT_TOL,
    FrameBounds,
    GFrameFamily,
    as_operator,
    frame_operator,
    mixed_frame_operator,
    require_g_frame,
    riesz_bounds,
    spectral_norm,
)
from .errors import DimensionError, DomainError, NotARieszSequenceError
from .report import Check
from .representation import generate_family

ENVELOPE_SLACK = 1e-8


def _require_riesz(family, tol):
    bounds = riesz_bounds(family)
    if not bounds.is_positive(tol):
        raise NotARieszSequenceError(bounds.lower, tol * bounds.upper)
    return bounds


def _check_same_shape(base, perturbed):
    if len(base) != len(perturbed) or base.cod_dims != perturbed.cod_dims:
        raise DimensionError("base and perturbed families have different block structure")
    if base.dom_dim != perturbed.dom_dim:
        raise DimensionError("base and perturbed families act on different spaces")


@dataclass(frozen=True)
class PerturbationReport:
    alpha_statement: float
    alpha_proof: float
    beta: float
    base: FrameBounds
    predicted_lower: float
    predicted_upper: float
    measured: FrameBounds
    hypothesis_met: bool
    lower_envelope: Check | None
    upper_envelope: Check
    within_envelope: bool
    u_identity: Check | None  # max_k ||U Lambda_k^* - Theta_k^*||
    contraction: Check | None  # sampled max ||f - U f|| / ||f|| on M, vs alpha_proof
    contraction_norm: float | None  # ||(I - U) P_M||


def riesz_perturbation(base, perturbed, tol=DEFAULT_TOL, check_mechanism=True,
                       samples=32, seed=0, slack=ENVELOPE_SLACK):
    """Predicted versus measured Riesz bounds of ``perturbed``.

    With ``check_mechanism`` the operator ``U = S_{Theta Lambda} S^+`` is built
    and two identities are verified: ``U Lambda_k^* = Theta_k^*`` for every
    ``k`` and ``||f - U f|| <= alpha ||f||`` on ``M`` (sampled at ``samples``
    seeded random points, and exactly through ``||(I - U) P_M||``).
    """
    _check_same_shape(base, perturbed)
    bounds = _require_riesz(base, tol)
    s_pinv = la.pinvh(frame_operator(base), atol=0.0, rtol=tol)

    diffs = np.array([spectral_norm(a - b) for a, b in zip(base, perturbed)])
    dual_norms = np.array([spectral_norm(lam @ s_pinv) for lam in base])
    alpha_statement = float(diffs.sum() * dual_norms[0])
    alpha_proof = float(diffs @ dual_norms)
    beta = float(diffs @ diffs)

    met = alpha_proof < 1
    predicted_lower = (1 - alpha_proof) ** 2 * bounds.lower if met else 0.0
    predicted_upper = (np.sqrt(beta) + np.sqrt(bounds.upper)) ** 2
    measured = riesz_bounds(perturbed)

    upper_env = Check.at_most(measured.upper, predicted_upper + slack)
    lower_env = Check.at_least(measured.lower, predicted_lower - slack) if met else None
    within = upper_env.passed and (lower_env is None or lower_env.passed)

    u_identity = contraction = contraction_norm = None
    if check_mechanism:
        u = mixed_frame_operator(perturbed, base) @ s_pinv
        ident = max(
            spectral_norm(u @ lam.conj().T - theta.conj().T)
            for lam, theta in zip(base, perturbed)
        )
        u_identity = Check.below(ident, slack * max(1.0, spectral_norm(perturbed.analysis_matrix)))

        n = base.dom_dim
        p_m = frame_operator(base) @ s_pinv
        p_m = (p_m + p_m.conj().T) / 2
        i_minus_u = np.eye(n) - u
        contraction_norm = spectral_norm(i_minus_u @ p_m)
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(samples):
            f = p_m @ (rng.standard_normal(n) + 1j * rng.standard_normal(n))
            norm = np.linalg.norm(f)
            if norm > 0:
                worst = max(worst, float(np.linalg.norm(i_minus_u @ f) / norm))
        contraction = Check.at_most(worst, alpha_proof + 1e-9)

    return PerturbationReport(
        alpha_statement=alpha_statement,
        alpha_proof=alpha_proof,
        beta=beta,
        base=bounds,
        predicted_lower=float(predicted_lower),
        predicted_upper=float(predicted_upper),
        measured=measured,
        hypothesis_met=bool(met),
        lower_envelope=lower_env,
        upper_envelope=upper_env,
        within_envelope=bool(within),
        u_identity=u_identity,
        contraction=contraction,
        contraction_norm=contraction_norm,
    )


@dataclass(frozen=True)
class DecayPerturbationReport:
    mu: float
    theta_norm: float
    h1_decay: bool  # ||Theta_1 T^i|| <= mu^i ||Theta_1||, i = 0..depth
    h2_small: Check  # ||Theta_1|| < (1 - mu) sqrt(A)
    hypotheses_met: bool
    beta_actual: float
    beta_bound: float  # ||Theta_1||^2 / (1 - mu^2)
    geometric_tail: Check | None  # beta_actual <= beta_bound, when H1 holds
    alpha_bound: float  # ||Theta_1|| / ((1 - mu) sqrt(A))
    alpha_chain: Check | None  # alpha_proof <= alpha_bound, when H1 holds
    perturbation: PerturbationReport
    conclusion: Check | None  # perturbed lower Riesz bound > tol * upper
    verdict: str


def decay_perturbation(lambda1, t, theta1, mu, depth, tol=DEFAULT_TOL):
    """Perturb the generator ``Lambda_1`` of a g-Riesz sequence ``{Lambda_1 T^{i-1}}``.

    If ``||Theta_1 T^i|| <= mu^i ||Theta_1||`` (H1) and
    ``||Theta_1|| < (1 - mu) sqrt(A)`` (H2), then ``{(Lambda_1 + Theta_1) T^{i-1}}``
    is again a g-Riesz sequence. The report records both hypotheses, the
    geometric bounds on ``beta`` and ``alpha`` that link them to the general
    perturbation envelope, and the measured outcome. When a hypothesis fails
    the verdict is ``"hypothesis not met"`` and nothing is claimed.
    """
    if not 0 <= mu < 1:
        raise DomainError(f"mu must lie in [0, 1), got {mu}")
    lambda1 = as_operator(lambda1, "lambda1")
    theta1 = as_operator(theta1, "theta1")
    if theta1.shape != lambda1.shape:
        raise DimensionError(f"theta1 has shape {theta1.shape}, lambda1 has {lambda1.shape}")
    t = as_operator(t, "t")
    base = generate_family(lambda1, t, depth)
    bounds = _require_riesz(base, tol)

    theta_norm = spectral_norm(theta1)
    powers = [theta1]
    for _ in range(depth):
        powers.append(powers[-1] @ t)
    norms = np.array([spectral_norm(p) for p in powers])
    allowed = mu ** np.arange(depth + 1) * theta_norm
    h1 = bool(np.all(norms <= allowed * (1 + 1e-12) + 1e-300))
    sqrt_a = float(np.sqrt(bounds.lower))
    h2 = Check.below(theta_norm, (1 - mu) * sqrt_a)

    beta_actual = float(np.sum(norms[:depth] ** 2))
    beta_bound = theta_norm**2 / (1 - mu**2)
    alpha_bound = theta_norm / ((1 - mu) * sqrt_a)

    perturbed = generate_family(lambda1 + theta1, t, depth)
    report = riesz_perturbation(base, perturbed, tol)
    met = h1 and h2.passed

    if met:
        conclusion = Check.above(report.measured.lower, tol * report.measured.upper)
        verdict = "g-Riesz preserved" if conclusion.passed else "conclusion failed"
    else:
        conclusion = None
        verdict = "hypothesis not met"
    return DecayPerturbationReport(
        mu=float(mu),
        theta_norm=theta_norm,
        h1_decay=h1,
        h2_small=h2,
        hypotheses_met=met,
        beta_actual=beta_actual,
        beta_bound=float(beta_bound),
        geometric_tail=Check.at_most(beta_actual, beta_bound + 1e-10) if h1 else None,
        alpha_bound=float(alpha_bound),
        alpha_chain=Check.at_most(report.alpha_proof, alpha_bound * (1 + 1e-12)) if h1 else None,
        perturbation=report,
        conclusion=conclusion,
        verdict=verdict,
    )


@dataclass(frozen=True)
class DualNormReport:
    member_norms: tuple  # ||Lambda_i S^{-1}||
    bound: float  # 1 / sqrt(A)
    max_ratio: float
    holds: bool


def dual_member_norm_bound(family, tol=DEFAULT_TOL, slack=1e-10):
    """Check ``||Lambda_i S^{-1}|| <= 1/sqrt(A)`` for every member of a g-frame.

    Each canonical dual member is dominated by the dual's upper bound ``1/A``.
    """
    bounds = require_g_frame(family, tol)
    s = frame_operator(family)
    norms = tuple(
        spectral_norm(la.solve(s, lam.conj().T, assume_a="pos")) for lam in family
    )
    bound = 1 / np.sqrt(bounds.lower)
    max_ratio = max(norms) / bound
    return DualNormReport(norms, float(bound), float(max_ratio), bool(max_ratio <= 1 + slack))


SWEEP_COLUMNS = ("scale", "alpha_proof", "beta", "predicted_lower", "measured_lower",
                 "predicted_upper", "measured_upper", "hypothesis_met")


def perturbation_sweep(base, direction, scales, tol=DEFAULT_TOL):
    """Rows of envelope-versus-measured data for ``base + s * direction``."""
    _check_same_shape(base, direction)
    rows = []
    for scale in scales:
        perturbed = GFrameFamily(tuple(a + scale * e for a, e in zip(base, direction)))
        r = riesz_perturbation(base, perturbed, tol, check_mechanism=False)
        rows.append({
            "scale": float(scale),
            "alpha_proof": r.alpha_proof,
            "beta": r.beta,
            "predicted_lower": r.predicted_lower,
            "measured_lower": r.measured.lower,
            "predicted_upper": r.predicted_upper,
            "measured_upper": r.measured.upper,
            "hypothesis_met": r.hypothesis_met,
        })
    return rows

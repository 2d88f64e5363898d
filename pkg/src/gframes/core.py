"""G-frame families and their canonical operators.

A family ``{Lambda_i}`` of operators ``H -> K_i`` is stored as a tuple of
dense complex matrices sharing a column count ``n = dim H``. Stacking the
members vertically gives the analysis matrix ``A`` (``f -> {Lambda_i f}``);
its conjugate transpose is the synthesis matrix.

Tolerances are relative: a bound ``lower`` is "positive" when
``lower > tol * upper`` and a singular value counts toward rank when it
exceeds ``tol`` times the largest one.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as la

from .errors import (
    DimensionError,
    DomainError,
    NoExactTransitionError,
    NotAGFrameError,
    NumericalError,
    PreconditionError,
)

DEFAULT_TOL = 1e-9
DEFAULT_DEPTH = 64

__all__ = [
    "DEFAULT_TOL", "DEFAULT_DEPTH",
    "as_operator", "GFrameFamily", "FrameBounds", "Classification",
    "synthesis_apply", "analysis_apply", "frame_operator", "frame_bounds",
    "riesz_bounds", "canonical_dual", "mixed_frame_operator", "classify",
    "lift_to_frame", "frame_to_gframe", "transition_operator",
    "vector_frame_operator", "vector_frame_bounds", "spectral_norm",
    "require_g_frame",
]


def as_operator(x, name="operator"):
    """Return ``x`` as a read-only 2-D complex matrix with finite entries."""
    a = np.array(x, dtype=complex)
    if a.ndim != 2 or 0 in a.shape:
        raise DimensionError(f"{name} must be a nonempty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} has non-finite entries")
    a.setflags(write=False)
    return a


def _as_vector(x, name="vector"):
    v = np.asarray(x, dtype=complex)
    if v.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {v.shape}")
    return v


def spectral_norm(a):
    """Largest singular value (0 for an empty matrix)."""
    if a.size == 0:
        return 0.0
    return float(la.svdvals(a)[0])


@dataclass(frozen=True, eq=False)
class GFrameFamily:
    """An ordered, nonempty family of operators on a common domain ``C^n``.

    ``truncated`` records that the family is the first ``len(members)``
    terms of an infinite family rather than an explicitly finite one.
    """

    members: tuple
    truncated: bool = False

    def __post_init__(self):
        members = tuple(
            as_operator(m, f"member {i}") for i, m in enumerate(self.members)
        )
        if not members:
            raise DimensionError("a family needs at least one member")
        n = members[0].shape[1]
        for i, m in enumerate(members):
            if m.shape[1] != n:
                raise DimensionError(
                    f"member {i} has domain dimension {m.shape[1]}, expected {n}",
                    index=i,
                )
        object.__setattr__(self, "members", members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    @property
    def dom_dim(self):
        return self.members[0].shape[1]

    @property
    def cod_dims(self):
        return tuple(m.shape[0] for m in self.members)

    @property
    def shared_codomain(self):
        """Common codomain dimension, or ``None`` when the ``K_i`` differ."""
        dims = set(self.cod_dims)
        return dims.pop() if len(dims) == 1 else None

    @cached_property
    def analysis_matrix(self):
        """Stacked ``[Lambda_1; ...; Lambda_N]``, shape ``(sum dim K_i, n)``."""
        a = np.vstack(self.members)
        a.setflags(write=False)
        return a

    @property
    def synthesis_matrix(self):
        return self.analysis_matrix.conj().T

    def block_slices(self):
        stops = np.cumsum(self.cod_dims)
        starts = stops - np.array(self.cod_dims)
        return [slice(int(a), int(b)) for a, b in zip(starts, stops)]


@dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float

    def __iter__(self):
        yield self.lower
        yield self.upper

    def is_positive(self, tol=DEFAULT_TOL):
        """True when ``lower`` is above ``tol`` relative to ``upper``."""
        return self.upper > 0 and self.lower > tol * self.upper


@dataclass(frozen=True)
class Classification:
    is_g_bessel: bool
    is_g_frame: bool
    is_g_complete: bool
    is_g_riesz_sequence: bool
    is_g_riesz_basis: bool
    is_g_orthonormal: bool
    bounds: FrameBounds
    riesz: FrameBounds
    rank: int
    gram_defect: float
    tolerance_used: float


def _check_blocks(family, blocks, what="coefficient"):
    blocks = list(blocks)
    if len(blocks) != len(family):
        raise DimensionError(
            f"{len(blocks)} {what} blocks for a family of {len(family)} members"
        )
    out = []
    for i, (g, m) in enumerate(zip(blocks, family.cod_dims)):
        g = _as_vector(g, f"{what} block {i}")
        if g.shape[0] != m:
            raise DimensionError(
                f"{what} block {i} has length {g.shape[0]}, member {i} maps into C^{m}",
                index=i,
            )
        out.append(g)
    return out


def synthesis_apply(family, coeffs):
    """``sum_i Lambda_i^* g_i`` for a block coefficient family ``{g_i}``."""
    blocks = _check_blocks(family, coeffs)
    out = np.zeros(family.dom_dim, dtype=complex)
    for lam, g in zip(family, blocks):
        out += lam.conj().T @ g
    return out


def analysis_apply(family, f):
    """``[Lambda_1 f, ..., Lambda_N f]``."""
    f = _as_vector(f, "f")
    if f.shape[0] != family.dom_dim:
        raise DimensionError(
            f"vector of length {f.shape[0]} for a family on C^{family.dom_dim}"
        )
    return [lam @ f for lam in family]


def frame_operator(family):
    """``S = sum_i Lambda_i^* Lambda_i``, symmetrized to be exactly Hermitian."""
    n = family.dom_dim
    s = np.zeros((n, n), dtype=complex)
    for lam in family:
        s += lam.conj().T @ lam
    return (s + s.conj().T) / 2


def frame_bounds(family):
    """Optimal g-frame bounds: extreme eigenvalues of the frame operator."""
    try:
        w = la.eigvalsh(frame_operator(family))
    except la.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    return FrameBounds(max(float(w[0]), 0.0), max(float(w[-1]), 0.0))


def riesz_bounds(family):
    """Optimal g-Riesz bounds: squared extreme singular values of the synthesis matrix.

    With more coefficient slots than ``dim H`` the synthesis matrix has a
    kernel and the lower bound is exactly 0.
    """
    a = family.analysis_matrix
    try:
        s = la.svdvals(a)
    except la.LinAlgError as exc:
        raise NumericalError(f"SVD failed: {exc}") from exc
    lower = 0.0 if a.shape[0] > a.shape[1] else float(s[-1]) ** 2
    return FrameBounds(lower, float(s[0]) ** 2)


def require_g_frame(family, tol=DEFAULT_TOL):
    """Return the frame bounds, raising ``NotAGFrameError`` if the lower one is not positive."""
    bounds = frame_bounds(family)
    if not bounds.is_positive(tol):
        raise NotAGFrameError(bounds.lower, tol * bounds.upper)
    return bounds


def canonical_dual(family, tol=DEFAULT_TOL):
    """The canonical dual ``{Lambda_i S^{-1}}`` of a g-frame."""
    require_g_frame(family, tol)
    s = frame_operator(family)
    # Lambda_i S^-1 = (S^-1 Lambda_i^*)^*, S Hermitian positive definite.
    members = [la.solve(s, lam.conj().T, assume_a="pos").conj().T for lam in family]
    return GFrameFamily(tuple(members), truncated=family.truncated)


def mixed_frame_operator(left, right):
    """``S_{Lambda Theta} = sum_i Lambda_i^* Theta_i``."""
    if len(left) != len(right):
        raise DimensionError(f"member counts differ: {len(left)} vs {len(right)}")
    if left.dom_dim != right.dom_dim:
        raise DimensionError(f"domains differ: C^{left.dom_dim} vs C^{right.dom_dim}")
    for i, (a, b) in enumerate(zip(left.cod_dims, right.cod_dims)):
        if a != b:
            raise DimensionError(f"member {i} codomains differ: {a} vs {b}", index=i)
    n = left.dom_dim
    out = np.zeros((n, n), dtype=complex)
    for lam, theta in zip(left, right):
        out += lam.conj().T @ theta
    return out


def classify(family, tol=DEFAULT_TOL):
    """Evaluate every g-frame predicate at relative tolerance ``tol``.

    The g-orthonormal test checks the block Gram condition
    ``<Lambda_i^* g_i, Lambda_j^* g_j> = delta_ij <g_i, g_j>`` on the standard
    bases of the ``K_i`` (i.e. ``A A^* = I``) together with Parseval bounds.
    """
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    a = family.analysis_matrix
    bounds = frame_bounds(family)
    riesz = riesz_bounds(family)
    s = la.svdvals(a)
    rank = int(np.sum(s > tol * s[0])) if s[0] > 0 else 0
    gram = a @ a.conj().T
    gram_defect = spectral_norm(gram - np.eye(gram.shape[0]))
    parseval_defect = max(abs(bounds.lower - 1.0), abs(bounds.upper - 1.0))
    is_frame = bounds.is_positive(tol)
    is_complete = rank == family.dom_dim
    is_riesz = riesz.is_positive(tol)
    return Classification(
        is_g_bessel=bool(np.isfinite(bounds.upper)),
        is_g_frame=is_frame,
        is_g_complete=is_complete,
        is_g_riesz_sequence=is_riesz,
        is_g_riesz_basis=is_complete and is_riesz,
        is_g_orthonormal=bool(gram_defect <= tol and parseval_defect <= tol),
        bounds=bounds,
        riesz=riesz,
        rank=rank,
        gram_defect=gram_defect,
        tolerance_used=tol,
    )


def lift_to_frame(family, onbs, tol=1e-10):
    """Vectors ``Lambda_i^* e_{i,j}`` for orthonormal bases given as matrix columns."""
    onbs = list(onbs)
    if len(onbs) != len(family):
        raise DimensionError(f"{len(onbs)} bases for {len(family)} members")
    vectors = []
    for i, (lam, u) in enumerate(zip(family, onbs)):
        u = np.asarray(u, dtype=complex)
        m = lam.shape[0]
        if u.shape != (m, m):
            raise DimensionError(f"basis {i} has shape {u.shape}, expected {(m, m)}", index=i)
        defect = spectral_norm(u.conj().T @ u - np.eye(m))
        if defect > tol:
            raise PreconditionError(f"basis {i} is not unitary (defect {defect:.3e})", value=defect)
        lifted = lam.conj().T @ u
        vectors.extend(lifted[:, j] for j in range(m))
    return vectors


def vector_frame_operator(vectors):
    """``sum_k f_k f_k^*`` for a plain vector system."""
    vectors = [_as_vector(v) for v in vectors]
    n = vectors[0].shape[0]
    s = np.zeros((n, n), dtype=complex)
    for v in vectors:
        if v.shape[0] != n:
            raise DimensionError(f"vector of length {v.shape[0]}, expected {n}")
        s += np.outer(v, v.conj())
    return (s + s.conj().T) / 2


def vector_frame_bounds(vectors):
    w = la.eigvalsh(vector_frame_operator(vectors))
    return FrameBounds(max(float(w[0]), 0.0), max(float(w[-1]), 0.0))


def frame_to_gframe(vectors, truncated=False):
    """Functionals ``f -> <f, f_i>``, each a ``1 x n`` row ``f_i^*``."""
    vectors = [_as_vector(v, f"vector {i}") for i, v in enumerate(vectors)]
    if not vectors:
        raise DimensionError("need at least one vector")
    n = vectors[0].shape[0]
    for i, v in enumerate(vectors):
        if v.shape[0] != n:
            raise DimensionError(f"vector {i} has length {v.shape[0]}, expected {n}", index=i)
    return GFrameFamily(tuple(v.conj()[None, :] for v in vectors), truncated=truncated)


def transition_operator(family, onb_family, tol=DEFAULT_TOL):
    """Solve ``Lambda_i = Theta_i V^*`` for ``V`` against a g-orthonormal basis ``Theta``."""
    if not classify(onb_family, tol).is_g_orthonormal:
        raise PreconditionError("reference family is not g-orthonormal")
    if len(family) != len(onb_family) or family.cod_dims != onb_family.cod_dims:
        raise DimensionError("family and reference basis have different block structure")
    if family.dom_dim != onb_family.dom_dim:
        raise DimensionError("family and reference basis act on different spaces")
    a_lam = family.analysis_matrix
    a_theta = onb_family.analysis_matrix
    v_adj, *_ = la.lstsq(a_theta, a_lam)
    residual = spectral_norm(a_lam - a_theta @ v_adj)
    threshold = tol * max(1.0, spectral_norm(a_lam))
    if residual > threshold:
        raise NoExactTransitionError(residual, threshold)
    return v_adj.conj().T

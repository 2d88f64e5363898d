"""Reference families: random ensembles, g-orthonormal bases and worked examples."""

from dataclasses import asdict, dataclass, field
import json

import numpy as np
import scipy.linalg as la

from .core import GFrameFamily, frame_bounds, frame_to_gframe
from .errors import ConstructionError, DimensionError, DomainError, FormatError
from .representation import generate_family

KINDS = ("random_gaussian", "g_orthonormal", "dynamical", "compact_example")


@dataclass(frozen=True)
class EnsembleSpec:
    """Recipe for a seeded family.

    ``params`` holds kind-specific settings:

    * ``dynamical``: ``t_norm`` (spectral norm of the random generator,
      default 0.7), ``t_rank`` (default ``dom_dim``); ``member_count`` is the depth.
    * ``compact_example``: ``alpha``; ``member_count`` is the depth.
    """

    dom_dim: int
    cod_dim: int
    member_count: int
    kind: str = "random_gaussian"
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown ensemble kind {self.kind!r}; expected one of {KINDS}")
        for name in ("dom_dim", "cod_dim", "member_count"):
            if int(getattr(self, name)) < 1:
                raise DomainError(f"{name} must be positive")
        if self.seed < 0:
            raise DomainError("seed must be unsigned")
        if self.kind == "compact_example" and not abs(self.params.get("alpha", 0.5)) < 1:
            raise DomainError("compact_example requires |alpha| < 1")

    def to_json(self):
        return json.dumps(asdict(self))

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(
                dom_dim=int(d["dom_dim"]),
                cod_dim=int(d.get("cod_dim", 1)),
                member_count=int(d.get("member_count", 1)),
                kind=d.get("kind", "random_gaussian"),
                seed=int(d.get("seed", 0)),
                params=dict(d.get("params", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad ensemble spec: {exc}") from exc

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise FormatError(
                f"bad ensemble spec JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc


def complex_gaussian(rng, shape):
    """Standard complex Gaussian entries (unit variance)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unitary(n, rng):
    """Haar-distributed unitary via QR with phase correction."""
    q, r = la.qr(complex_gaussian(rng, (n, n)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_contraction(n, rng, norm=0.7, rank=None):
    """Random ``n x n`` matrix with spectral norm ``norm`` and the given rank.

    Nonzero singular values are spread over ``[norm / 4, norm]``.
    """
    rank = n if rank is None else rank
    u = random_unitary(n, rng)
    v = random_unitary(n, rng)
    s = np.zeros(n)
    if rank:
        s[:rank] = np.sort(rng.uniform(norm / 4, norm, rank))[::-1]
        s[0] = norm
    return (u * s) @ v.conj().T


def build_compact_example(alpha, n, depth):
    """``Lambda_1 = I_n`` with the rank-one generator ``a -> (alpha a_1, 0, ..., 0)``.

    The family's lower bound is exactly 1 and its upper bound is
    ``(1 - alpha^(2 depth)) / (1 - alpha^2)``, rising to ``1 / (1 - alpha^2)``.
    """
    if not abs(alpha) < 1:
        raise DomainError(f"|alpha| must be < 1, got {alpha}")
    if n < 2 or depth < 2:
        raise DomainError("need n >= 2 and depth >= 2")
    t = np.zeros((n, n), dtype=complex)
    t[0, 0] = alpha
    return generate_family(np.eye(n), t, depth), t


def build_g_orthonormal(dom_dim, block_dim, seed=0, unitary=None):
    """Slice the rows of a unitary into ``dom_dim / block_dim`` blocks.

    The unitary is Haar-random under ``seed`` unless given explicitly.
    """
    if block_dim < 1 or dom_dim % block_dim:
        raise DimensionError(f"block_dim {block_dim} does not divide dom_dim {dom_dim}")
    if unitary is None:
        unitary = random_unitary(dom_dim, np.random.default_rng(seed))
    q = np.asarray(unitary, dtype=complex)
    return GFrameFamily(tuple(q[i:i + block_dim] for i in range(0, dom_dim, block_dim)))


def _gaussian_family(rng, n, m, count):
    scale = 1 / np.sqrt(count * m)
    return GFrameFamily(tuple(scale * complex_gaussian(rng, (m, n)) for _ in range(count)))


def build_random_g_frame(spec, max_attempts=100, min_lower=1e-6):
    """Draw a family from ``spec``; deterministic in ``spec.seed``.

    Gaussian members are scaled by ``1/sqrt(member_count * cod_dim)`` so the
    expected frame operator is the identity. Draws whose lower frame bound
    falls below ``min_lower`` are rejected and redrawn.
    """
    n, m, count = spec.dom_dim, spec.cod_dim, spec.member_count
    if spec.kind == "g_orthonormal":
        return build_g_orthonormal(n, m, spec.seed)
    if spec.kind == "compact_example":
        return build_compact_example(spec.params.get("alpha", 0.5), n, count)[0]
    if count * m < n:
        raise ConstructionError(
            f"{count} members of rank <= {m} cannot span C^{n}; every draw would be rejected"
        )
    rng = np.random.default_rng(spec.seed)
    for _ in range(max_attempts):
        if spec.kind == "dynamical":
            lambda1 = complex_gaussian(rng, (m, n)) / np.sqrt(m)
            t = random_contraction(
                n, rng, spec.params.get("t_norm", 0.7), spec.params.get("t_rank")
            )
            family = generate_family(lambda1, t, count)
        else:
            family = _gaussian_family(rng, n, m, count)
        if frame_bounds(family).lower >= min_lower:
            return family
    raise ConstructionError(f"no draw reached lower bound {min_lower} in {max_attempts} attempts")


def companion_matrix(roots):
    """Companion matrix (ones on the subdiagonal) whose eigenvalues are ``roots``."""
    coeffs = np.poly(np.asarray(roots, dtype=complex))
    n = len(coeffs) - 1
    c = np.zeros((n, n), dtype=complex)
    c[1:, :-1] = np.eye(n - 1)
    c[:, -1] = -coeffs[:0:-1]
    return c


def build_riesz_bridge_example(n, contraction, seed=None, max_attempts=20, max_cond=1e8):
    """A finite Riesz basis ``{T^{i-1} f_1}`` whose g-frame form has a non-injective generator.

    ``T`` is a companion matrix with eigenvalues ``{0, c, c^2, ..., c^(n-1)}`` and
    ``f_1 = e_1`` so the Krylov vectors ``T^{i-1} e_1`` are the standard basis.
    With ``seed`` both are conjugated by a random invertible ``W`` (Krylov
    basis becomes ``W``), redrawing ``W`` when it is worse conditioned than
    ``max_cond``. Returns the functional family ``f -> <f, f_i>`` and its
    representing operator ``T^*``, which has a one-dimensional kernel.
    """
    if not 0 < contraction < 1:
        raise DomainError(f"contraction must lie in (0, 1), got {contraction}")
    if n < 2:
        raise DomainError("need n >= 2")
    roots = np.concatenate([[0.0], contraction ** np.arange(1, n)])
    t = companion_matrix(roots)
    f1 = np.zeros(n, dtype=complex)
    f1[0] = 1
    rng = np.random.default_rng(seed) if seed is not None else None
    for _ in range(max_attempts):
        if rng is None:
            w = np.eye(n)
        else:
            w = complex_gaussian(rng, (n, n))
        if np.linalg.cond(w) > max_cond:
            continue
        tw = w @ t @ la.inv(w)
        vectors = [w @ f1]
        for _ in range(n - 1):
            vectors.append(tw @ vectors[-1])
        krylov = np.column_stack(vectors)
        if np.linalg.matrix_rank(krylov) == n:
            return frame_to_gframe(vectors), tw.conj().T
    raise ConstructionError(f"no well-conditioned Krylov basis in {max_attempts} attempts")

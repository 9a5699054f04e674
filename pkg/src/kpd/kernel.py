"""Kernel evaluation, Gram matrices, and quadratic forms.

The family under study is

    K(x, y) = (1/pi) / (1 + (x - y)^2 + a*(x^2 + y^2)^t),     t > 0, a > 0,

together with the anisotropic distance form

    d(x, y) = (x - y)^2 + a*(x^2 + y^2)^t

that appears in its denominator.  Every other module reduces its question
to Gram matrices and quadratic forms built from these two evaluations, so
this module is the single source of truth for kernel arithmetic.

Conventions
-----------
* Powers of a nonnegative base use the convention 0**s = 0 for s > 0
  (see :func:`nonneg_power`); this is applied globally.
* All operations are pure functions of immutable inputs and are safe for
  concurrent use.
* Quadratic forms are accumulated with compensated summation
  (``math.fsum``), and optionally in arbitrary precision via mpmath, so
  that heavily cancelling witness configurations can be resolved.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import mpmath as mp
import numpy as np

from .errors import DomainError

__all__ = [
    "KernelParams",
    "PointConfig",
    "GramMatrix",
    "nonneg_power",
    "eval_kernel",
    "distance_form",
    "gram_matrix",
    "kernel_matrix",
    "quadratic_form",
    "abs_term_scale",
    "resolve_form_sign",
]


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def _as_float(value) -> float:
    # Fractions and mpfs are allowed in configs; collapse to float here.
    if isinstance(value, Rational):
        return float(value)
    return float(value)


def _as_mpf(value) -> mp.mpf:
    # Exact conversion for rationals; floats convert exactly by design.
    if isinstance(value, Rational):
        return mp.mpf(value.numerator) / value.denominator
    if isinstance(value, mp.mpf):
        return value
    return mp.mpf(value)


@dataclass(frozen=True)
class KernelParams:
    """The kernel parameters: exponent ``t`` and anisotropy weight ``a``.

    Both must be finite and strictly positive.
    """

    t: float
    a: float

    def __post_init__(self):
        object.__setattr__(self, "t", _require_finite("t", self.t))
        object.__setattr__(self, "a", _require_finite("a", self.a))
        if self.t <= 0.0:
            raise DomainError(f"t must be > 0, got {self.t}")
        if self.a <= 0.0:
            raise DomainError(f"a must be > 0, got {self.a}")


@dataclass(frozen=True)
class PointConfig:
    """A finite configuration: evaluation points plus real coefficients.

    Entries may be ints, floats, Fractions, or mpmath floats; they are
    validated to be finite.  Duplicated points are permitted.
    """

    points: tuple
    coeffs: tuple

    def __post_init__(self):
        points = tuple(self.points)
        coeffs = tuple(self.coeffs)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "coeffs", coeffs)
        if len(points) != len(coeffs):
            raise DomainError(
                f"points and coeffs must have the same length, got "
                f"{len(points)} vs {len(coeffs)}"
            )
        if len(points) < 1:
            raise DomainError("a configuration needs at least one point")
        for v in points:
            _require_finite("point", _as_float(v))
        for v in coeffs:
            _require_finite("coefficient", _as_float(v))

    @property
    def n(self) -> int:
        return len(self.points)

    def as_float_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.array([_as_float(p) for p in self.points], dtype=float),
            np.array([_as_float(c) for c in self.coeffs], dtype=float),
        )


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """A symmetric matrix of kernel values at a point configuration.

    The upper triangle is computed once and mirrored, so symmetry holds
    bit-for-bit.  The generating points are retained so failing
    directions can be reported as replayable configurations.
    """

    order: int
    entries: np.ndarray
    points: tuple

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        object.__setattr__(self, "entries", entries)
        if entries.shape != (self.order, self.order):
            raise DomainError(
                f"entries must be {self.order}x{self.order}, got {entries.shape}"
            )
        if not np.array_equal(entries, entries.T):
            raise DomainError("Gram matrix must be exactly symmetric")
        if np.any(np.diag(entries) <= 0.0):
            raise DomainError("Gram diagonal must be strictly positive")

    @property
    def max_diagonal(self) -> float:
        return float(np.max(np.diag(self.entries)))


def nonneg_power(base, exponent, use_mp: bool = False):
    """``base**exponent`` for base >= 0 with the convention 0**s = 0.

    ``use_mp`` switches to mpmath arithmetic (the caller is responsible
    for setting the working precision).
    """
    if base < 0:
        raise DomainError(f"power base must be >= 0, got {base!r}")
    if base == 0:
        return mp.mpf(0) if use_mp else 0.0
    if use_mp:
        return _as_mpf(base) ** _as_mpf(exponent)
    return float(base) ** float(exponent)


def distance_form(params: KernelParams, x: float, y: float) -> float:
    """The anisotropic distance form (x-y)^2 + a*(x^2+y^2)^t.

    Nonnegative everywhere; zero exactly at x = y = 0.
    """
    x = _require_finite("x", x)
    y = _require_finite("y", y)
    return (x - y) * (x - y) + params.a * nonneg_power(x * x + y * y, params.t)


def eval_kernel(params: KernelParams, x: float, y: float) -> float:
    """Evaluate the kernel; the value lies in (0, 1/pi]."""
    return 1.0 / (math.pi * (1.0 + distance_form(params, x, y)))


def _distance_form_mp(params: KernelParams, x, y) -> mp.mpf:
    xm, ym = _as_mpf(x), _as_mpf(y)
    s = xm * xm + ym * ym
    return (xm - ym) ** 2 + _as_mpf(params.a) * nonneg_power(s, params.t, use_mp=True)


def _eval_kernel_mp(params: KernelParams, x, y) -> mp.mpf:
    return 1 / (mp.pi * (1 + _distance_form_mp(params, x, y)))


def kernel_matrix(params: KernelParams, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vectorized kernel evaluation on the grid ``x`` (rows) by ``y`` (cols)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    s = np.add.outer(x * x, y * y)
    d = np.subtract.outer(x, y)
    return 1.0 / (np.pi * (1.0 + d * d + params.a * np.power(s, params.t)))


def gram_matrix(params: KernelParams, config: PointConfig) -> GramMatrix:
    """The n x n matrix of kernel values at the configuration points.

    The upper triangle is mirrored, never recomputed, so symmetry is
    exact by construction.
    """
    pts, _ = config.as_float_arrays()
    full = kernel_matrix(params, pts, pts)
    entries = np.triu(full) + np.triu(full, 1).T
    return GramMatrix(order=config.n, entries=entries, points=tuple(pts))


def quadratic_form(
    params: KernelParams, config: PointConfig, dps: int | None = None
) -> float | mp.mpf:
    """The kernel quadratic form sum_jk c_j c_k K(x_j, x_k).

    With ``dps=None`` the Gram matrix is built in float arithmetic and the
    n^2 terms are combined row-major with compensated summation (numpy's
    pairwise reduction takes over past 64 points, where building the term
    list dominates).  With an integer ``dps`` everything is evaluated in
    mpmath at that many decimal digits; points and coefficients given as
    rationals convert exactly.
    """
    if dps is None:
        gram = gram_matrix(params, config)
        _, c = config.as_float_arrays()
        if config.n > 64:
            return float(c @ gram.entries @ c)
        terms = [
            c[j] * c[k] * gram.entries[j, k]
            for j in range(config.n)
            for k in range(config.n)
        ]
        return math.fsum(terms)
    with mp.workdps(dps):
        pts = [_as_mpf(p) for p in config.points]
        cfs = [_as_mpf(c) for c in config.coeffs]
        n = config.n
        kern = [[mp.mpf(0)] * n for _ in range(n)]
        for j in range(n):
            for k in range(j, n):
                v = _eval_kernel_mp(params, pts[j], pts[k])
                kern[j][k] = kern[k][j] = v
        return mp.fsum(
            cfs[j] * cfs[k] * kern[j][k] for j in range(n) for k in range(n)
        )


def abs_term_scale(params: KernelParams, config: PointConfig) -> float:
    """Sum of absolute term magnitudes |c_j c_k| K(x_j, x_k).

    Used as the natural scale for rounding-noise estimates: the kernel is
    strictly positive, so this equals the quadratic form with |c|.
    """
    pts, c = config.as_float_arrays()
    abs_config = PointConfig(tuple(pts), tuple(np.abs(c)))
    return float(quadratic_form(params, abs_config))


def resolve_form_sign(
    params: KernelParams,
    config: PointConfig,
    dps_start: int = 30,
    dps_cap: int = 800,
) -> tuple[mp.mpf, int]:
    """Evaluate the quadratic form at escalating precision until its sign
    is resolved beyond the accumulated rounding noise.

    Returns ``(value, dps_used)``.  If the cap is reached without
    resolution the last value is returned; callers must treat a value
    inside the noise band as "indistinguishable from zero", never as a
    sign claim.
    """
    abs_cfg = PointConfig(config.points, tuple(abs(_as_float(c)) for c in config.coeffs))
    dps = dps_start
    while True:
        value = quadratic_form(params, config, dps=dps)
        with mp.workdps(dps):
            scale = quadratic_form(params, abs_cfg, dps=dps)
            noise = scale * mp.mpf(10) ** (5 - dps)
        if abs(value) > noise or dps >= dps_cap:
            return value, dps
        dps = min(2 * dps, dps_cap)

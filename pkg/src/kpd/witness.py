"""Vanishing-moment witnesses and the small-scale expansion that turns
them into explicit non-PD certificates.

Clearing denominators shows that the kernel quadratic form at scaled
points x_j = y_j*sqrt(z) has, for every z > 0, the same sign as

    f(z) = sum_jk c_j c_k  prod_{(p,q) != (j,k)} (1 + A_pq*z + B_pq*z^t),

a double sum over ordered index pairs, with A_pq = (y_p - y_q)^2 exact
rational and B_pq = a*(y_p^2 + y_q^2)^t irrational in general.  If the
coefficients annihilate all moments sum_j c_j y_j^l for l = 0..T with
T = floor(t), the integer powers z^0..z^T cancel *exactly* and the lowest
surviving term is z^t with coefficient

    kappa = -a * sum_jk c_j c_k (y_j^2 + y_k^2)^t,

which for the binomial witnesses below is nonzero with the sign of
(-1)^(T+1).  For odd T this makes f negative at small z, a replayable
witness that the kernel is not positive-definite, for every a > 0.

Arithmetic is hybrid by design: coefficients of pure integer powers are
exact Fractions (the cancellation is an exact statement, not an
approximate one), while coefficients involving z^t carry mpmath values at
a configurable working precision.  Direct evaluation of f at small z is
dominated by cancellation, so it escalates precision until the result
clears the accumulated-rounding noise floor.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Literal, NamedTuple

import mpmath as mp
import numpy as np

from .errors import DomainError, PreconditionError, SizeCapError, ToleranceError
from .kernel import KernelParams, PointConfig, _as_mpf, resolve_form_sign

__all__ = [
    "WitnessConfig",
    "ExponentKey",
    "PowerSeries",
    "NegativeScaleCertificate",
    "build_binomial_witness",
    "check_moments",
    "cleared_form_series",
    "cleared_form_value",
    "t_power_coefficient",
    "predict_t_coefficient_sign",
    "find_negative_scale",
    "subset_product_identity",
    "difference_power_sum",
    "pair_power_sum",
    "gaussian_weight_sum",
    "gaussian_weight_sum_max",
]

# Beyond 8 points the ordered-pair product has > 63 trinomial factors and
# the expansion stops being worth the wait.
DEFAULT_MAX_POINTS = 8
SERIES_DPS = 50
INTEGER_GAP = 1e-9


def _as_fraction(v) -> Fraction:
    if isinstance(v, float) and not v.is_integer():
        raise DomainError(
            f"witness data must be exactly rational; got float {v!r} "
            "(pass a Fraction instead)"
        )
    return Fraction(v)


def _check_noninteger_t(t: float) -> int:
    """Return floor(t) after rejecting (near-)integer exponents."""
    if abs(t - round(t)) <= INTEGER_GAP:
        raise DomainError(
            f"t={t} is (numerically) an integer; the vanishing-moment "
            "machinery requires a fractional part"
        )
    return int(math.floor(t))


@dataclass(frozen=True)
class WitnessConfig:
    """A rational point/coefficient pair with exactly vanishing moments.

    Construction verifies sum_j c_j y_j^l = 0 in exact arithmetic for all
    l = 0..moment_order; anything that fails is rejected rather than
    stored.
    """

    y: tuple
    c: tuple
    moment_order: int

    def __post_init__(self):
        y = tuple(_as_fraction(v) for v in self.y)
        c = tuple(_as_fraction(v) for v in self.c)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "c", c)
        if len(y) != len(c) or not y:
            raise DomainError("y and c must be nonempty and of equal length")
        if self.moment_order < 0:
            raise DomainError("moment_order must be >= 0")
        for ell in range(self.moment_order + 1):
            m = sum(cj * yj**ell for cj, yj in zip(c, y))
            if m != 0:
                raise PreconditionError(
                    f"moment l={ell} is {m}, not 0: not a valid witness"
                )

    @property
    def n(self) -> int:
        return len(self.y)


class ExponentKey(NamedTuple):
    """Encodes the power z^(i + j*t): i degree-1 factors, j degree-t factors."""

    i: int
    j: int

    def exponent(self, t: float) -> float:
        return self.i + self.j * t


def build_binomial_witness(order: int) -> WitnessConfig:
    """The alternating-binomial witness of a given moment order T.

    n = T+2 points y_j = 0..T+1 with c_j = (-1)^j * binomial(T+1, j)
    (0-based j).  Annihilates all moments through T; overflow-free via
    big-integer binomials.
    """
    if order < 0:
        raise DomainError("order must be >= 0")
    n = order + 2
    y = tuple(Fraction(j) for j in range(n))
    c = tuple(Fraction((-1) ** j * math.comb(order + 1, j)) for j in range(n))
    return WitnessConfig(y=y, c=c, moment_order=order)


def check_moments(w: WitnessConfig, l_max: int) -> list[Fraction]:
    """Exact moments sum_j c_j y_j^l for l = 0..l_max."""
    if l_max < 0:
        raise DomainError("l_max must be >= 0")
    return [
        sum((cj * yj**ell for cj, yj in zip(w.c, w.y)), start=Fraction(0))
        for ell in range(l_max + 1)
    ]


# ---------------------------------------------------------------------------
# Hybrid coefficient arithmetic: Fraction stays Fraction until an mpf enters.


def _cmul(x, y):
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x * y
    return _coeff_mpf(x) * _coeff_mpf(y)


def _cadd(x, y):
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x + y
    return _coeff_mpf(x) + _coeff_mpf(y)


def _coeff_mpf(x):
    return _as_mpf(x) if isinstance(x, Fraction) else x


def _pair_data(params: KernelParams, w: WitnessConfig):
    """A_pq (exact) and B_pq (mpf at the ambient precision) for all ordered
    pairs, plus the trinomial factor map keyed by ordered pair."""
    t = _as_mpf(params.t)
    a = _as_mpf(params.a)
    A: dict[tuple[int, int], Fraction] = {}
    B: dict[tuple[int, int], mp.mpf] = {}
    for p in range(w.n):
        for q in range(w.n):
            A[(p, q)] = (w.y[p] - w.y[q]) ** 2
            s = w.y[p] ** 2 + w.y[q] ** 2
            B[(p, q)] = a * _as_mpf(s) ** t if s != 0 else mp.mpf(0)
    return A, B


def _poly_mul_trinomial(poly: dict, A: Fraction, B) -> dict:
    """Multiply a keyed polynomial by (1 + A z + B z^t).

    All coefficients entering the expansion are nonnegative, so these
    accumulations never cancel: the exact Fractions stay exact and the
    mpf parts keep full relative accuracy regardless of the factor count.
    """
    if A == 0 and B == 0:
        return poly
    out: dict[ExponentKey, object] = dict(poly)
    for key, co in poly.items():
        if A:
            k1 = ExponentKey(key.i + 1, key.j)
            out[k1] = _cadd(out.get(k1, Fraction(0)), _cmul(co, A))
        if B != 0:
            k2 = ExponentKey(key.i, key.j + 1)
            out[k2] = _cadd(out.get(k2, Fraction(0)), _cmul(co, B))
    return out


@dataclass(frozen=True, eq=False)
class PowerSeries:
    """The expansion of the cleared form in powers z^(i + j*t).

    Coefficients of keys with j = 0 are exact Fractions; the rest are
    mpmath floats at the precision used to build the series.  Zero
    coefficients are not stored.
    """

    terms: dict
    params: KernelParams
    dps: int

    def coefficient(self, i: int, j: int):
        return self.terms.get(ExponentKey(i, j), Fraction(0))

    def sorted_keys(self) -> list[ExponentKey]:
        t = self.params.t
        return sorted(self.terms, key=lambda k: (k.exponent(t), k.i))

    def evaluate(self, z, dps: int | None = None):
        """Evaluate at z > 0; with ``dps`` the sum runs in mpmath."""
        if dps is None:
            zt = float(z) ** self.params.t
            return math.fsum(
                float(co) * float(z) ** k.i * zt**k.j
                for k, co in sorted(self.terms.items())
            )
        with mp.workdps(dps):
            zm = _as_mpf(z)
            zt = zm ** _as_mpf(self.params.t)
            return mp.fsum(
                _coeff_mpf(co) * zm**k.i * zt**k.j
                for k, co in sorted(self.terms.items())
            )


def cleared_form_series(
    params: KernelParams,
    w: WitnessConfig,
    max_points: int = DEFAULT_MAX_POINTS,
    dps: int = SERIES_DPS,
) -> PowerSeries:
    """Expand the cleared form into a keyed power series.

    One keyed product of n^2 - 1 trinomials per *unordered* index pair
    (ordered pairs (j, k) and (k, j) omit identical factors, so each
    group is expanded once with multiplicity two).  Keyed accumulation
    keeps the term count at O(n^4) instead of the 3^(n^2-1) raw products,
    and since every partial product has nonnegative coefficients the
    expansion itself is cancellation-free; the only cancellation happens
    in the final weighted sum, exactly for the rational part.
    """
    _check_noninteger_t(params.t)
    n = w.n
    if n > max_points:
        keys = (n * n) * (n * n + 1) // 2
        raise SizeCapError(
            f"witness has n={n} points (> cap {max_points}): the ordered-pair "
            f"product would carry ~{keys} expansion keys"
        )
    with mp.workdps(dps):
        A, B = _pair_data(params, w)
        pairs = [(p, q) for p in range(n) for q in range(n)]
        acc: dict[ExponentKey, object] = {}
        for j in range(n):
            for k in range(j, n):
                weight = w.c[j] * w.c[k] * (1 if j == k else 2)
                if weight == 0:
                    continue
                prod: dict[ExponentKey, object] = {ExponentKey(0, 0): Fraction(1)}
                for pq in pairs:
                    if pq != (j, k):
                        prod = _poly_mul_trinomial(prod, A[pq], B[pq])
                for key, co in prod.items():
                    acc[key] = _cadd(acc.get(key, Fraction(0)), _cmul(co, weight))
        terms = {k: v for k, v in acc.items() if v != 0}
    return PowerSeries(terms=terms, params=params, dps=dps)


def _cleared_form_with_scale(params: KernelParams, w: WitnessConfig, z, dps: int):
    """Direct product evaluation of f(z) plus the positive magnitude scale
    sum_jk |c_j c_k| * prod(...), used for rounding-noise estimates."""
    with mp.workdps(dps):
        zm = _as_mpf(z)
        t = _as_mpf(params.t)
        zt = zm**t
        A, B = _pair_data(params, w)
        n = w.n
        factors = {
            pq: 1 + _as_mpf(A[pq]) * zm + B[pq] * zt for pq in A
        }
        full = mp.mpf(1)
        for p in range(n):
            for q in range(n):
                full *= factors[(p, q)]
        value = mp.mpf(0)
        scale = mp.mpf(0)
        for j in range(n):
            for k in range(j, n):
                mult = 1 if j == k else 2
                prod = full / factors[(j, k)]
                weight = mult * w.c[j] * w.c[k]
                value += _as_mpf(weight) * prod
                scale += abs(_as_mpf(weight)) * prod
        return value, scale


def cleared_form_value(
    params: KernelParams, w: WitnessConfig, z, dps: int | None = None
):
    """Evaluate f(z) directly from the product form, without expansion.

    The float path is fine at moderate z; small z is cancellation-heavy
    and should use the mpmath path (see :func:`find_negative_scale` for
    the escalation policy).
    """
    if not (float(z) > 0):
        raise DomainError(f"z must be > 0, got {z!r}")
    if dps is not None:
        value, _ = _cleared_form_with_scale(params, w, z, dps)
        return value
    zf = float(z)
    t, a = params.t, params.a
    y = [float(v) for v in w.y]
    c = [float(v) for v in w.c]
    n = w.n
    fac = {}
    for p in range(n):
        for q in range(n):
            s = y[p] * y[p] + y[q] * y[q]
            fac[(p, q)] = 1.0 + (y[p] - y[q]) ** 2 * zf + (a * s**t if s else 0.0) * zf**t
    total = []
    for j in range(n):
        for k in range(j, n):
            mult = 1.0 if j == k else 2.0
            prod = mult * c[j] * c[k]
            for pq, f in fac.items():
                if pq != (j, k):
                    prod *= f
            total.append(prod)
    return math.fsum(total)


def t_power_coefficient(
    params: KernelParams, w: WitnessConfig, dps: int | None = None
):
    """The coefficient of z^t: -a * sum_jk c_j c_k (y_j^2 + y_k^2)^t.

    Requires the witness moments to vanish through T = floor(t) (exactly
    checked); otherwise the closed form above is not the z^t coefficient.
    """
    T = _check_noninteger_t(params.t)
    if w.moment_order < T or any(m != 0 for m in check_moments(w, T)):
        raise PreconditionError(
            f"witness moments must vanish through T={T} for the z^t "
            "coefficient closed form"
        )
    if dps is None:
        terms = []
        for j in range(w.n):
            for k in range(w.n):
                s = float(w.y[j] ** 2 + w.y[k] ** 2)
                terms.append(float(w.c[j] * w.c[k]) * (s ** params.t if s else 0.0))
        return -params.a * math.fsum(terms)
    with mp.workdps(dps):
        t = _as_mpf(params.t)
        total = mp.fsum(
            _as_mpf(w.c[j] * w.c[k]) * _as_mpf(w.y[j] ** 2 + w.y[k] ** 2) ** t
            for j in range(w.n)
            for k in range(w.n)
            if w.y[j] ** 2 + w.y[k] ** 2 != 0
        )
        return -_as_mpf(params.a) * total


def predict_t_coefficient_sign(t: float) -> Literal["nonnegative", "nonpositive"]:
    """Parity prediction for the z^t coefficient under vanishing moments:
    nonpositive iff floor(t) is odd."""
    if not (t > 0) or not math.isfinite(t):
        raise DomainError(f"t must be finite and > 0, got {t!r}")
    T = _check_noninteger_t(t)
    return "nonpositive" if T % 2 == 1 else "nonnegative"


@dataclass(frozen=True, eq=False)
class NegativeScaleCertificate:
    """A z with f(z) < 0 plus the scaled point configuration whose kernel
    quadratic form is negative -- an end-to-end non-PD certificate."""

    z: float
    f_value: mp.mpf
    config: PointConfig
    q_value: mp.mpf
    dps: int
    witness: WitnessConfig
    params: KernelParams


def find_negative_scale(
    params: KernelParams,
    w: WitnessConfig,
    k_max: int = 200,
    dps_start: int = 50,
    dps_cap: int = 400,
) -> NegativeScaleCertificate:
    """Scan z = 2^-k until the cleared form is resolved negative.

    Precondition: the z^t coefficient is negative (checked).  Each f(z)
    is evaluated in mpmath, doubling the precision until the value clears
    the accumulated-noise floor; unresolved points (f indistinguishable
    from zero at the cap) are skipped rather than trusted.  The returned
    configuration is independently replayed through the kernel quadratic
    form before the certificate is issued.
    """
    kappa = t_power_coefficient(params, w, dps=dps_start)
    if not (kappa < 0):
        raise PreconditionError(
            f"z^t coefficient is {mp.nstr(kappa, 8)} >= 0: the small-z scan "
            "cannot produce a negative value from this witness"
        )
    for k in range(1, k_max + 1):
        z = 2.0**-k
        dps = dps_start
        while True:
            value, scale = _cleared_form_with_scale(params, w, z, dps)
            with mp.workdps(dps):
                noise = scale * mp.mpf(10) ** (5 - dps)
            if abs(value) > noise:
                break
            if dps >= dps_cap:
                value = None  # unresolved at the cap; skip this z
                break
            dps = min(2 * dps, dps_cap)
        if value is not None and value < 0:
            with mp.workdps(dps):
                sqrt_z = mp.sqrt(mp.mpf(z))
                points = tuple(_as_mpf(yj) * sqrt_z for yj in w.y)
            config = PointConfig(points, w.c)
            q_value, q_dps = resolve_form_sign(
                params, config, dps_start=dps, dps_cap=max(dps_cap, 2 * dps)
            )
            if not (q_value < 0):
                raise ToleranceError(
                    f"internal replay disagreement at z=2^-{k}: f={mp.nstr(value, 8)} "
                    f"but quadratic form={mp.nstr(q_value, 8)} (dps={q_dps})"
                )
            return NegativeScaleCertificate(
                z=z,
                f_value=value,
                config=config,
                q_value=q_value,
                dps=dps,
                witness=w,
                params=params,
            )
    raise ToleranceError(
        f"no negative value found for z down to 2^-{k_max}; raise k_max or "
        "the precision cap"
    )


# ---------------------------------------------------------------------------
# Exact combinatorial identities (brute-force verification at bounded size).


def subset_product_identity(
    n: int, m: int, j: int, k: int, y, cap: int = 2_000_000
) -> tuple[Fraction, Fraction]:
    """Both sides of the all-but-one-pair subset-sum identity.

    LHS: the sum over m-element subsets J of the ordered-pair set minus
    {(j,k)} of prod_{(p,q) in J} (y_p - y_q)^2.  RHS: the alternating
    expansion sum_v (-1)^v (y_j - y_k)^(2v) * e_{m-v}, where e_r is the
    unrestricted r-subset sum.  Indices are 0-based.  Exact rationals
    throughout; both values are returned so callers assert equality.
    """
    y = [_as_fraction(v) for v in y]
    if n < 1 or len(y) != n:
        raise DomainError("y must have length n >= 1")
    if not (0 <= m <= n * n - 1):
        raise DomainError(f"m must lie in [0, n^2-1], got {m}")
    if not (0 <= j < n and 0 <= k < n):
        raise DomainError(f"(j, k) must lie in [0, n)^2, got ({j}, {k})")
    if math.comb(n * n, m) > cap:
        raise SizeCapError(
            f"subset enumeration C({n * n}, {m}) exceeds the cap {cap}"
        )
    pairs = [(p, q) for p in range(n) for q in range(n)]
    sq = {pq: (y[pq[0]] - y[pq[1]]) ** 2 for pq in pairs}

    def subset_sum(pool, r):
        return sum(
            (math.prod((sq[pq] for pq in J), start=Fraction(1)) for J in combinations(pool, r)),
            start=Fraction(0),
        )

    restricted = [pq for pq in pairs if pq != (j, k)]
    lhs = subset_sum(restricted, m)
    djk = (y[j] - y[k]) ** 2
    rhs = sum(
        ((-1) ** v * djk**v * subset_sum(pairs, m - v) for v in range(m + 1)),
        start=Fraction(0),
    )
    return lhs, rhs


def difference_power_sum(v: int, w: WitnessConfig) -> Fraction:
    """(-1)^v * sum_jk c_j c_k (y_j - y_k)^(2v), exactly.

    Zero whenever the witness moments vanish through order v.
    """
    if v < 0:
        raise DomainError("v must be >= 0")
    total = sum(
        (
            w.c[j] * w.c[k] * (w.y[j] - w.y[k]) ** (2 * v)
            for j in range(w.n)
            for k in range(w.n)
        ),
        start=Fraction(0),
    )
    return (-1) ** v * total


def pair_power_sum(ell: int, w: WitnessConfig) -> Fraction:
    """sum_jk c_j c_k (y_j^2 + y_k^2)^ell, exactly.

    Vanishes for all ell <= moment_order: each binomial term splits into
    a j-moment times a k-moment, one of which has order <= moment_order.
    """
    if ell < 0:
        raise DomainError("ell must be >= 0")
    total = sum(
        (
            w.c[j] * w.c[k] * (w.y[j] ** 2 + w.y[k] ** 2) ** ell
            for j in range(w.n)
            for k in range(w.n)
        ),
        start=Fraction(0),
    )
    return total


def gaussian_weight_sum(lam: float, w: WitnessConfig) -> float:
    """sum_j c_j exp(-lam * y_j^2) for lam > 0.

    Tends to sum(c) = 0 as lam -> 0+ and to the coefficient of the unique
    smallest |y| as lam -> inf; for witnesses with distinct nonnegative y
    it is not identically zero.
    """
    if not (lam > 0):
        raise DomainError(f"lam must be > 0, got {lam!r}")
    return math.fsum(
        float(cj) * math.exp(-lam * float(yj) ** 2) for cj, yj in zip(w.c, w.y)
    )


def gaussian_weight_sum_max(w: WitnessConfig, lam_grid=None) -> float:
    """max |sum_j c_j exp(-lam y_j^2)| over a lambda grid (default
    log-spaced on [1e-2, 1e2]); bounded away from zero for witnesses with
    distinct nonnegative y."""
    if lam_grid is None:
        lam_grid = np.logspace(-2, 2, 81)
    return max(abs(gaussian_weight_sum(float(l), w)) for l in lam_grid)

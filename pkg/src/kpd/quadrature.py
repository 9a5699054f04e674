"""Gauss-Legendre quadrature helpers shared by the numerical modules.

Plain composite rules for building discretization schemes, plus a small
adaptive integrator that works for complex-valued integrands (real and
imaginary parts share the same nodes).
"""

import numpy as np

from .errors import ToleranceError

_RULE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def unit_rule(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [-1, 1], cached by degree."""
    if degree < 1:
        raise ValueError(f"rule degree must be >= 1, got {degree}")
    if degree not in _RULE_CACHE:
        x, w = np.polynomial.legendre.leggauss(degree)
        _RULE_CACHE[degree] = (x, w)
    return _RULE_CACHE[degree]


def mapped_rule(a: float, b: float, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights mapped affinely onto [a, b]."""
    x, w = unit_rule(degree)
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


def composite_rule(
    a: float, b: float, node_count: int, panel_degree: int = 16
) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule with exactly ``node_count`` nodes.

    Full panels of ``panel_degree`` nodes plus one smaller remainder panel
    partition [a, b] into equal-width pieces.  Nodes are strictly
    increasing and interior; weights are positive and sum to b - a.
    """
    if node_count < 1:
        raise ValueError(f"node_count must be >= 1, got {node_count}")
    full, rem = divmod(node_count, panel_degree)
    degrees = [panel_degree] * full + ([rem] if rem else [])
    edges = np.linspace(a, b, len(degrees) + 1)
    nodes, weights = [], []
    for deg, lo, hi in zip(degrees, edges[:-1], edges[1:]):
        x, w = mapped_rule(lo, hi, deg)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def fixed_quad(f, a: float, b: float, degree: int = 16):
    """One-panel Gauss-Legendre integral of a scalar callable."""
    x, w = mapped_rule(a, b, degree)
    return sum(wi * f(xi) for xi, wi in zip(x, w))


def adaptive_quad(f, a: float, b: float, tol: float, max_depth: int = 40):
    """Adaptive bisection Gauss-Legendre integration to absolute tolerance.

    Works for complex integrands; the error indicator is the modulus of
    the difference between one- and two-panel estimates.  Raises
    :class:`ToleranceError` if the depth budget is exhausted.
    """

    def recurse(lo, hi, budget, depth):
        whole = fixed_quad(f, lo, hi, 16)
        mid = 0.5 * (lo + hi)
        halves = fixed_quad(f, lo, mid, 16) + fixed_quad(f, mid, hi, 16)
        err = abs(halves - whole)
        if err <= budget:
            return halves
        if depth >= max_depth:
            raise ToleranceError(
                f"adaptive quadrature stalled on [{lo}, {hi}]: "
                f"error estimate {err:.3e} > budget {budget:.3e}"
            )
        return recurse(lo, mid, budget / 2, depth + 1) + recurse(
            mid, hi, budget / 2, depth + 1
        )

    return recurse(float(a), float(b), float(tol), 0)

"""Deterministic quadrature building blocks.

All routines take vectorized integrands (``f(points: ndarray) -> ndarray``)
and use fixed node sets and fixed summation order, so repeated runs produce
bit-identical results.
"""

from __future__ import annotations

import numpy as np

__all__ = ["gl_nodes", "quad_gl", "quad_segment", "trapezoid_periodic"]

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gl_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1], cached."""
    try:
        return _GL_CACHE[n]
    except KeyError:
        pair = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = pair
        return pair


def _panel(f, a: float, b: float, x: np.ndarray, w: np.ndarray) -> complex:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * complex(np.sum(w * f(mid + half * x)))


def quad_gl(f, a: float, b: float, *, n: int = 32, atol: float = 1e-13,
            rtol: float = 1e-11, max_depth: int = 48) -> complex:
    """Adaptive panel-halving Gauss-Legendre integral of ``f`` over [a, b].

    A panel is accepted when splitting it changes the value by less than
    ``max(atol, rtol * |value|)``.  Endpoint log singularities are resolved by
    the dyadic refinement; integrable algebraic singularities should be
    substituted away by the caller first.
    """
    x, w = gl_nodes(n)

    def recurse(a: float, b: float, whole: complex, depth: int) -> complex:
        m = 0.5 * (a + b)
        left = _panel(f, a, m, x, w)
        right = _panel(f, m, b, x, w)
        better = left + right
        if depth >= max_depth or abs(better - whole) <= max(atol, rtol * abs(better)):
            return better
        return recurse(a, m, left, depth + 1) + recurse(m, b, right, depth + 1)

    return recurse(float(a), float(b), _panel(f, a, b, x, w), 0)


def quad_segment(f, z0: complex, z1: complex, *, sqrt_at_start: bool = False,
                 sqrt_at_end: bool = False, n: int = 32, atol: float = 1e-13,
                 rtol: float = 1e-11, max_depth: int = 48) -> complex:
    """Integral of ``f`` along the straight segment from z0 to z1.

    ``sqrt_at_start``/``sqrt_at_end`` absorb an inverse-square-root integrand
    singularity at the corresponding endpoint via the substitution
    z = endpoint + (span) * u**2.
    """
    kw = dict(n=n, atol=atol, rtol=rtol, max_depth=max_depth)
    if sqrt_at_start and sqrt_at_end:
        zm = 0.5 * (z0 + z1)
        return (quad_segment(f, z0, zm, sqrt_at_start=True, **kw)
                + quad_segment(f, zm, z1, sqrt_at_end=True, **kw))
    if sqrt_at_end:
        return -quad_segment(f, z1, z0, sqrt_at_start=True, **kw)
    dz = z1 - z0
    if sqrt_at_start:
        def g(u):
            return f(z0 + dz * u * u) * (2.0 * dz) * u
    else:
        def g(u):
            return f(z0 + dz * u) * dz
    return quad_gl(g, 0.0, 1.0, **kw)


def trapezoid_periodic(values: np.ndarray, period: float) -> complex:
    """Trapezoid rule over one full period given equispaced samples."""
    return complex(np.sum(values) * (period / len(values)))

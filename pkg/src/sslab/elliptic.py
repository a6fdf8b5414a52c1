"""Special functions for the genus-one band surface with branch cuts on
the two vertical segments I = [i*eta1, i*eta2] and its mirror
Ibar = [-i*eta2, -i*eta1].

Conventions used throughout:

* ``m`` is the elliptic parameter (the squared modulus, m = k**2).
* ``theta3(z, tau)`` is the third Jacobi theta function in the lattice
  normalization theta3(z) = 1 + 2*sum q**(n**2) * cos(2*pi*n*z) with
  q = exp(i*pi*tau).
* ``R_surd`` is the square root of (z**2 + eta1**2)(z**2 + eta2**2) that is
  analytic off I and Ibar, behaves like z**2 at infinity, and is positive on
  the real axis.
* For a point on a cut, ``side="plus"`` is the boundary value from the left
  of the upward-oriented cut (Re z < 0 side) and ``side="minus"`` from the
  right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (DomainError, OnCutError, PathThroughCutError,
                     PoleEvaluationError)
from .quadrules import quad_gl, quad_segment

__all__ = [
    "agm",
    "elliptic_K",
    "nome",
    "jacobi_dn",
    "theta3",
    "SurfaceContext",
    "R_surd",
    "gamma_quartic",
    "abel_map",
    "a_period",
    "b_period",
]


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two positive reals."""
    if a <= 0 or b <= 0:
        raise DomainError("agm requires positive arguments")
    a, b = float(a), float(b)
    for _ in range(64):
        if abs(a - b) <= 1e-17 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def elliptic_K(m: float) -> float:
    """Complete elliptic integral K(m), with m the parameter (m = k**2)."""
    if not 0.0 <= m < 1.0:
        raise DomainError(f"elliptic_K requires 0 <= m < 1, got {m}")
    if m == 0.0:
        return math.pi / 2.0
    return math.pi / (2.0 * agm(1.0, math.sqrt(1.0 - m)))


def nome(m: float) -> float:
    """Elliptic nome q = exp(-pi*K(1-m)/K(m))."""
    if m == 0.0:
        return 0.0
    return math.exp(-math.pi * elliptic_K(1.0 - m) / elliptic_K(m))


def _theta3_real(x: float, q: float) -> float:
    """theta3 with real argument x (lattice z = x/pi absorbed by caller)."""
    s = 1.0
    n = 1
    qn = q
    while qn >= 1e-17 and n < 200:
        s += 2.0 * qn * math.cos(2.0 * n * x)
        n += 1
        qn = q ** (n * n)
    return s


def _theta4_real(x: float, q: float) -> float:
    s = 1.0
    n = 1
    qn = q
    while qn >= 1e-17 and n < 200:
        s += 2.0 * ((-1) ** n) * qn * math.cos(2.0 * n * x)
        n += 1
        qn = q ** (n * n)
    return s


def jacobi_dn(u: float, m: float) -> float:
    """Jacobi dn(u | m) for real u, via the theta-quotient representation.

    dn(u) = (theta4(0)/theta3(0)) * theta3(zeta)/theta4(zeta) with
    zeta = pi*u/(2K).  This form is uniformly accurate on the whole period,
    including u = K where descending-Landen recurrences lose digits.
    """
    if not 0.0 <= m < 1.0:
        raise DomainError(f"jacobi_dn requires 0 <= m < 1, got {m}")
    if m == 0.0:
        return 1.0
    K = elliptic_K(m)
    q = nome(m)
    u = math.fmod(float(u), 2.0 * K)  # dn has period 2K
    zeta = math.pi * u / (2.0 * K)
    return (_theta4_real(0.0, q) / _theta3_real(0.0, q)) * (
        _theta3_real(zeta, q) / _theta4_real(zeta, q))


def theta3(z: complex, tau: complex) -> complex:
    """Third Jacobi theta function, theta3(z; tau) = sum exp(i*pi*n^2*tau + 2*pi*i*n*z).

    Arguments are first reduced by the quasi-periodicity
    theta3(z + k*tau) = exp(-i*pi*k^2*tau - 2*pi*i*k*z) * theta3(z) and the
    plain periodicity theta3(z + 1) = theta3(z), then the series is truncated
    at the smallest N with
    exp(-pi*Im(tau)*N^2) * (2N + 1) < 1e-16 * max(1, exp(2*pi*N*|Im z|)).
    """
    tau = complex(tau)
    if tau.imag <= 0:
        raise DomainError("theta3 requires Im(tau) > 0")
    z = complex(z)
    k = int(round(z.imag / tau.imag))
    z0 = z - k * tau
    prefactor = complex(1.0)
    if k != 0:
        prefactor = np.exp(-1j * math.pi * k * k * tau - 2j * math.pi * k * z0)
    z0 = complex(z0.real - round(z0.real), z0.imag)
    y = abs(z0.imag)
    N = 1
    while N < 4000:
        lhs = math.exp(-math.pi * tau.imag * N * N) * (2 * N + 1)
        if lhs < 1e-16 * max(1.0, math.exp(min(2.0 * math.pi * N * y, 700.0))):
            break
        N += 1
    else:
        raise DomainError("theta3 series does not converge fast enough for this tau")
    s = complex(1.0)
    for n in range(1, N + 1):
        qn = np.exp(1j * math.pi * n * n * tau)
        s += qn * (np.exp(2j * math.pi * n * z0) + np.exp(-2j * math.pi * n * z0))
    return prefactor * s


@dataclass(frozen=True)
class SurfaceContext:
    """Derived constants of the two-cut surface with branch points +-i*eta1, +-i*eta2."""

    eta1: float
    eta2: float
    m: float
    K: float
    Kprime: float
    tau: complex

    @classmethod
    def build(cls, eta1: float, eta2: float) -> "SurfaceContext":
        eta1, eta2 = float(eta1), float(eta2)
        if not 0.0 < eta1 < eta2:
            raise DomainError(f"need 0 < eta1 < eta2, got {eta1}, {eta2}")
        m = (eta1 / eta2) ** 2
        K = elliptic_K(m)
        Kp = elliptic_K(1.0 - m)
        tau = 1j * Kp / (2.0 * K)
        return cls(eta1=eta1, eta2=eta2, m=m, K=K, Kprime=Kp, tau=tau)


def _sqrt_pp(w: np.ndarray) -> np.ndarray:
    """Principal square root with -0.0 imaginary parts canonicalized to +0.0.

    This pins the branch on the negative real axis to the upper side, which is
    what makes the four-factor product below have its cuts exactly on I and
    Ibar and nowhere else.
    """
    w = np.asarray(w, dtype=complex)
    w = np.where(w.imag == 0.0, w.real + 0.0j, w)
    return np.sqrt(w)


def R_surd(z, ctx: SurfaceContext, side: str = "auto"):
    """The square root R(z) of (z^2+eta1^2)(z^2+eta2^2) cut on I and Ibar.

    Normalization: R(z) ~ z^2 as z -> infinity and R > 0 on the real axis.
    On a cut, ``side`` selects the boundary value ("plus" = left of the
    upward-oriented cut); ``side="auto"`` raises OnCutError there.  At a
    branch point R = 0 regardless of side.
    """
    if side not in ("auto", "plus", "minus"):
        raise ValueError(f"unknown side {side!r}")
    e1, e2 = ctx.eta1, ctx.eta2
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    up = 1j * _sqrt_pp(-1j * z - e1) * _sqrt_pp(-1j * z - e2)
    lo = -1j * _sqrt_pp(1j * z - e1) * _sqrt_pp(1j * z - e2)
    out = up * lo
    on_axis = z.real == 0.0
    y = z.imag
    on_cut = on_axis & (np.abs(y) > e1) & (np.abs(y) < e2)
    if np.any(on_cut):
        if side == "auto":
            raise OnCutError("z lies on a branch cut; pass side='plus' or side='minus'")
        P = np.sqrt((y * y - e1 * e1) * (e2 * e2 - y * y) * on_cut)
        upper = on_cut & (y > 0)
        lower = on_cut & (y < 0)
        sgn_up = -1j if side == "plus" else 1j
        out = np.where(upper, sgn_up * P, out)
        out = np.where(lower, -sgn_up * P, out)
    at_bp = on_axis & ((np.abs(y) == e1) | (np.abs(y) == e2))
    if np.any(at_bp):
        out = np.where(at_bp, 0.0 + 0.0j, out)
    return complex(out[0]) if scalar else out


def gamma_quartic(z, ctx: SurfaceContext, side: str = "auto"):
    """gamma(z) = ((z^2+eta1^2)/(z^2+eta2^2))**(1/4), cut on I and Ibar.

    Normalized so gamma(infinity) = 1.  Computed as the principal square root
    of (z^2+eta1^2)/R(z); the boundary values satisfy gamma_+ = -i*gamma_- on
    the upper cut and gamma_+ = +i*gamma_- on the lower cut.
    """
    e1, e2 = ctx.eta1, ctx.eta2
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    d_upper_pole = np.abs(z - 1j * e2)
    d_lower_pole = np.abs(z + 1j * e2)
    if np.any(d_upper_pole < 1e-12) or np.any(d_lower_pole < 1e-12):
        raise PoleEvaluationError("gamma diverges at +-i*eta2")
    d_zero = np.minimum(np.abs(z - 1j * e1), np.abs(z + 1j * e1))
    R = R_surd(z, ctx, side)
    R = np.atleast_1d(np.asarray(R, dtype=complex))
    ratio = np.ones_like(R)
    ok = d_zero >= 1e-12
    ratio[ok] = (z[ok] * z[ok] + e1 * e1) / R[ok]
    out = np.asarray(_sqrt_pp(ratio))
    out[~ok] = 0.0
    return complex(out[0]) if scalar else out


def _omega_factor(ctx: SurfaceContext) -> complex:
    # omega = eta2 / (4i K R(z)) dz, the normalized holomorphic differential
    return ctx.eta2 / (4j * ctx.K)


def _abel_segment(ctx: SurfaceContext, z0: complex, z1: complex, *,
                  sqrt_at_start: bool = False, sqrt_at_end: bool = False,
                  side: str = "auto") -> complex:
    def f(s):
        return 1.0 / R_surd(s, ctx, side)
    return quad_segment(f, z0, z1, sqrt_at_start=sqrt_at_start,
                        sqrt_at_end=sqrt_at_end, atol=1e-13, rtol=1e-12)


def _abel_tail_to_infinity(ctx: SurfaceContext, X: float) -> complex:
    """integral of dz/R from the real point X > 0 out to +infinity."""
    def f(u):
        u = np.asarray(u, dtype=float)
        zz = X / u
        return (X / (u * u)) / R_surd(zz, ctx)
    return quad_gl(f, 0.0, 1.0, atol=1e-14, rtol=1e-12)


def abel_map(z, ctx: SurfaceContext, side: str = "auto") -> complex:
    """Abel map A(z) = int_{i*eta2}^{z} omega with omega = eta2 dz / (4i K R).

    Normalized so the cycle around the middle gap gives period 1 and the cut
    cycle gives period tau.  Paths are chosen off the axis whenever possible;
    for on-axis targets inside [-i*eta2, i*eta2] a left or right detour is
    taken according to ``side``.  ``z=inf`` (any non-finite value) returns the
    value at infinity along the positive real axis.
    """
    if side not in ("auto", "plus", "minus"):
        raise ValueError(f"unknown side {side!r}")
    e1, e2 = ctx.eta1, ctx.eta2
    base = 1j * e2
    if not np.isfinite(complex(z)):
        X = 8.0 * e2
        val = _abel_segment(ctx, base, complex(X), sqrt_at_start=True)
        val += _abel_tail_to_infinity(ctx, X)
        return _omega_factor(ctx) * val
    z = complex(z)
    if z == base:
        return 0.0 + 0.0j
    ends_at_bp = min(abs(z - 1j * e1), abs(z + 1j * e1),
                     abs(z - 1j * e2), abs(z + 1j * e2)) < 1e-13
    if z.real != 0.0:
        return _omega_factor(ctx) * _abel_segment(
            ctx, base, z, sqrt_at_start=True, sqrt_at_end=ends_at_bp)
    # on-axis target
    y = z.imag
    if y > e2:
        return _omega_factor(ctx) * _abel_segment(ctx, base, z, sqrt_at_start=True)
    if y < -e2:
        # single-valued below the configuration; use a left detour
        side = "plus" if side == "auto" else side
    elif side == "auto":
        raise PathThroughCutError(
            "on-axis target inside [-i*eta2, i*eta2] needs side='plus' or 'minus'")
    d = e2 if side == "plus" else -e2
    corner1 = -d + 1j * e2
    corner2 = -d + 1j * y
    val = _abel_segment(ctx, base, corner1, sqrt_at_start=True)
    val += _abel_segment(ctx, corner1, corner2)
    val += _abel_segment(ctx, corner2, z, sqrt_at_end=ends_at_bp, side=side)
    return _omega_factor(ctx) * val


def a_period(ctx: SurfaceContext) -> complex:
    """The a-cycle period of omega, realized as twice the gap integral.

    The a-cycle passes once through the middle gap on each sheet; by the
    sheet symmetry its period equals 2 * int_{-i eta1}^{i eta1} omega.
    Expected value: 1.
    """
    e1, e2 = ctx.eta1, ctx.eta2

    def f(phi):
        phi = np.asarray(phi, dtype=float)
        # s = i*eta1*sin(phi): the endpoint square roots cancel exactly,
        # leaving omega = i dphi / sqrt(eta2^2 - eta1^2 sin^2 phi) / (4iK/eta2)
        s2 = (e1 * np.sin(phi)) ** 2
        return 1j / np.sqrt(e2 * e2 - s2)

    gap = quad_gl(f, -math.pi / 2.0, math.pi / 2.0, atol=1e-14, rtol=1e-13)
    return 2.0 * _omega_factor(ctx) * gap


def b_period(ctx: SurfaceContext) -> complex:
    """The b-cycle period of omega: a closed rectangle encircling the upper cut.

    Traversed clockwise (crossing the middle gap left-to-right).  Expected
    value: tau.
    """
    e1, e2 = ctx.eta1, ctx.eta2
    w = 0.5 * (e2 - e1)
    y_lo, y_hi = 0.0, e2 + w
    corners = [w + 1j * y_lo, w + 1j * y_hi, -w + 1j * y_hi, -w + 1j * y_lo]

    def f(s):
        return 1.0 / R_surd(s, ctx)

    total = 0.0 + 0.0j
    for i in range(4):
        total += quad_segment(f, corners[i], corners[(i + 1) % 4],
                              atol=1e-14, rtol=1e-12)
    # counterclockwise loop; the b-cycle orientation is the clockwise one
    return -_omega_factor(ctx) * total

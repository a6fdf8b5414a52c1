"""Elliptic condensate: Schwarz function of the ellipse, segment jump
density, the scalar g- and f-functions, the genus-one theta model matrix,
and the step-like asymptotic profile.

Geometry and conventions
------------------------

The domain is an ellipse with foci ``i*eta1`` and ``i*eta2`` (distance sum
``2*rho``); its Schwarz function S(z) is analytic off the focal segment
I = [i*eta1, i*eta2] and satisfies S(z) = conj(z) on the boundary.  The jump
``delta_S = S_plus - S_minus`` across I, multiplied by the density combination
``w1(z) - conj(w1(conj z)) + w2(z)``, is the segment density r(z).

All jump contours are vertical: I, its mirror Ibar = [-i*eta2, -i*eta1], and
the middle gap [-i*eta1, i*eta1], each oriented upward.  ``side="plus"``
always means the boundary value from the left (Re z < 0), matching the
conventions of :mod:`sslab.elliptic`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dressing import q_on_grid
from .elliptic import (R_surd, SurfaceContext, _sqrt_pp, abel_map, elliptic_K,
                       gamma_quartic, jacobi_dn, theta3)
from .errors import (BranchValidationError, LogBranchError, OnCutError,
                     PoleEvaluationError, SignCheckFailed, SslabError,
                     ThetaZeroError, TooCloseToEndpoint, UnderflowFloor,
                     ValidationError)
from .grids import EvaluationGrid
from .quadrules import quad_gl
from .spectral import AnalyticDensity, EllipseDomain, sample_condensate

__all__ = [
    "GasConfig",
    "ThetaModelContext",
    "Prop31Report",
    "SignCheckReport",
    "ModelJumpReport",
    "LeftTailReport",
    "schwarz_ellipse",
    "delta_S",
    "r_density",
    "omega_of_xt",
    "delta_constant",
    "g_function",
    "f_function",
    "g_infinity",
    "verify_prop31",
    "phi",
    "lemma31_sign_check",
    "theta_context",
    "model_S",
    "model_jump_report",
    "profile_theta",
    "profile_dn",
    "left_tail_estimate",
]

#: evaluations of g, f and phi must stay this far from the four branch points
ENDPOINT_CLEARANCE = 1e-3

_AXIS_TOL = 1e-12
_SIDES = ("plus", "minus")


# ------------------------------------------------------------ Schwarz function

def _ellipse_of(cfg):
    if isinstance(cfg, GasConfig):
        return cfg.ellipse
    if isinstance(cfg, EllipseDomain):
        return cfg
    raise ValidationError(
        f"expected a GasConfig or EllipseDomain, got {type(cfg).__name__}")


def _stilde(z, eta1, eta2):
    """sqrt((z - i*eta1)(z - i*eta2)) cut on I, behaving like +z at infinity.

    Written as a product of principal square roots in the rotated variable
    u = -i*z; the two factor cuts coincide on u < eta1 and cancel there, so
    the only cut left is u in [eta1, eta2], i.e. z on I.  Points exactly on
    the cut get the left-hand (side="plus") value.
    """
    u = -1j * np.asarray(z, dtype=complex)
    return 1j * _sqrt_pp(u - eta1) * _sqrt_pp(u - eta2)


def _schwarz_coeffs(ellipse):
    c = 0.5 * (ellipse.eta2 - ellipse.eta1)
    lam = 1.0 - 2.0 * ellipse.rho ** 2 / (c * c)
    mu = 2.0 * ellipse.rho * ellipse.semi_minor / (c * c)
    return lam, mu


def schwarz_ellipse(z, cfg):
    """Schwarz function S(z) of the ellipse, S(z) = conj(z) on the boundary.

    S(z) = lam*(z - i*etabar) - i*etabar + mu*stilde(z) with
    etabar = (eta1+eta2)/2, lam = 1 - 8*rho^2/(eta2-eta1)^2 and
    mu = (2*rho/c^2)*sqrt(rho^2 - c^2), c the focal half-distance.  On the
    open focal segment the left boundary value S_plus is returned; the jump
    is available as :func:`delta_S`.
    """
    ellipse = _ellipse_of(cfg)
    lam, mu = _schwarz_coeffs(ellipse)
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    center = ellipse.center
    out = lam * (z - center) - center + mu * _stilde(z, ellipse.eta1, ellipse.eta2)
    return complex(out) if scalar else out


def delta_S(z, cfg):
    """Jump S_plus(z) - S_minus(z) of the Schwarz function across I.

    Real and negative on the open segment:
    delta_S(i*y) = -2*mu*sqrt((y - eta1)(eta2 - y)).
    """
    ellipse = _ellipse_of(cfg)
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z1 = np.atleast_1d(z)
    off_axis = np.abs(z1.real) > _AXIS_TOL * np.maximum(1.0, np.abs(z1))
    y = z1.imag
    outside = (y <= ellipse.eta1) | (y >= ellipse.eta2)
    if np.any(off_axis | outside):
        raise ValidationError("delta_S needs points strictly inside the focal segment")
    _, mu = _schwarz_coeffs(ellipse)
    vals = (-2.0 * mu) * np.sqrt((y - ellipse.eta1) * (ellipse.eta2 - y)) + 0.0j
    return complex(vals[0]) if scalar else vals.reshape(z.shape)


# ------------------------------------------------------------ configuration

@dataclass(frozen=True)
class GasConfig:
    """Ellipse condensate configuration.

    ``w1`` and ``w2`` are the analytic densities of the breather and soliton
    channels; together with the Schwarz jump they induce the segment density
    r(z) = delta_S(z) * (w1(z) - conj(w1(conj z)) + w2(z)) on I.
    """

    ellipse: EllipseDomain
    w1: AnalyticDensity
    w2: AnalyticDensity

    def __post_init__(self) -> None:
        if not isinstance(self.ellipse, EllipseDomain):
            raise ValidationError("ellipse must be an EllipseDomain")
        if not isinstance(self.w1, AnalyticDensity) or not isinstance(self.w2, AnalyticDensity):
            raise ValidationError("w1 and w2 must be AnalyticDensity instances")
        boundary = self.ellipse.boundary(200)
        err = float(np.max(np.abs(schwarz_ellipse(boundary, self.ellipse)
                                  - np.conj(boundary))))
        if not err < 1e-8:
            raise BranchValidationError(
                f"Schwarz boundary identity fails: max |S(z) - conj(z)| = {err:.3e}")
        e1, e2 = self.ellipse.eta1, self.ellipse.eta2
        y = e1 + (e2 - e1) * (np.arange(64) + 0.5) / 64.0
        mags = np.abs(_r_of(y, self))
        if not float(mags.min()) > 1e-10 * max(1.0, float(mags.max())):
            raise ValidationError("segment density r vanishes on the open segment")

    @property
    def eta1(self) -> float:
        return self.ellipse.eta1

    @property
    def eta2(self) -> float:
        return self.ellipse.eta2

    def surface(self) -> SurfaceContext:
        return SurfaceContext.build(self.ellipse.eta1, self.ellipse.eta2)


def _r_of(y, cfg):
    """Segment density r at z = i*y for real y strictly inside (eta1, eta2)."""
    y = np.asarray(y, dtype=float)
    ellipse = cfg.ellipse
    _, mu = _schwarz_coeffs(ellipse)
    ds = (-2.0 * mu) * np.sqrt((y - ellipse.eta1) * (ellipse.eta2 - y))
    z = 1j * y
    dens = cfg.w1(z) - np.conj(cfg.w1(np.conj(z))) + cfg.w2(z)
    return ds * np.asarray(dens, dtype=complex)


def r_density(z, cfg):
    """Segment density r(z) = delta_S(z) * (w1(z) - conj(w1(conj z)) + w2(z))."""
    if not isinstance(cfg, GasConfig):
        raise ValidationError("r_density needs a GasConfig")
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    delta_S(z, cfg)  # validates the location
    vals = _r_of(np.atleast_1d(z).imag, cfg)
    return complex(vals[0]) if scalar else vals.reshape(z.shape)


@lru_cache(maxsize=64)
def _assert_log_branch(cfg) -> bool:
    """Reject densities whose r path crosses the negative real axis on I.

    A crossing makes the principal branch of log r discontinuous along the
    segment, so Delta and f would depend on the sampling.  Detected as a
    jump of the principal argument by more than pi between adjacent points
    of a dense segment scan.
    """
    e1, e2 = cfg.eta1, cfg.eta2
    y = e1 + (e2 - e1) * (np.arange(512) + 0.5) / 512.0
    ang = np.angle(_r_of(y, cfg))
    jumps = np.abs(np.diff(ang)) > math.pi
    if np.any(jumps):
        where = int(np.argmax(jumps))
        raise LogBranchError(
            "principal log of r is discontinuous: r crosses the negative real "
            f"axis near z = {1j * y[where]:.6g}")
    return True


# ------------------------------------------------------------ Omega and Delta

def omega_of_xt(x: float, t: float, ctx: SurfaceContext) -> float:
    """Phase frequency Omega = pi*eta2*(x - 2*(eta1^2+eta2^2)*t) / K(m)."""
    s = ctx.eta1 * ctx.eta1 + ctx.eta2 * ctx.eta2
    return math.pi * ctx.eta2 * (float(x) - 2.0 * s * float(t)) / ctx.K


def _gap_half_integral(e1: float, e2: float) -> complex:
    """integral of ds/R(s) from 0 to i*eta1 (equals i*K(m)/eta2)."""
    def f(psi):
        psi = np.asarray(psi, dtype=float)
        return 1j / np.sqrt(e2 * e2 - (e1 * np.sin(psi)) ** 2)
    return quad_gl(f, 0.0, math.pi / 2.0, atol=1e-14, rtol=1e-13)


def _cut_log_integral(cfg, log_r) -> complex:
    """integral over I of log r(s) / R_plus(s) ds.

    The substitution s = i*(eta1 + (eta2-eta1)*sin^2 psi) absorbs both
    endpoint inverse square roots, leaving only the integrable logarithmic
    endpoint singularities of log r.
    """
    e1, e2 = cfg.eta1, cfg.eta2

    def f(psi):
        psi = np.asarray(psi, dtype=float)
        y = e1 + (e2 - e1) * np.sin(psi) ** 2
        return log_r(y) * (-2.0) / np.sqrt((y + e1) * (y + e2))

    return quad_gl(f, 0.0, math.pi / 2.0, atol=1e-13, rtol=1e-12)


def delta_constant(cfg, log_r=None) -> complex:
    """Normalization constant Delta of the segment density.

    Delta = -i * (integral_0^{i*eta1} ds/R)^(-1) * (integral_I log r / R_plus ds),
    real whenever r > 0 on the open segment.  ``log_r`` (a vectorized function
    of y = Im s) overrides the density logarithm for synthetic tests.
    """
    if log_r is None:
        return _delta_cached(cfg)
    return _delta_impl(cfg, log_r)


@lru_cache(maxsize=64)
def _delta_cached(cfg) -> complex:
    _assert_log_branch(cfg)
    return _delta_impl(cfg, lambda y: np.log(_r_of(y, cfg)))


def _delta_impl(cfg, log_r) -> complex:
    gap = _gap_half_integral(cfg.eta1, cfg.eta2)
    return -1j * _cut_log_integral(cfg, log_r) / gap


# ----------------------------------------------- one-sided Cauchy machinery

def _classify(z: complex, e1: float, e2: float):
    """Return the jump-contour segment containing z, or None off the axis.

    Raises TooCloseToEndpoint within ENDPOINT_CLEARANCE of a branch point,
    where the quadrature accuracy contract no longer holds.
    """
    d_end = min(abs(z - 1j * e1), abs(z + 1j * e1),
                abs(z - 1j * e2), abs(z + 1j * e2))
    if d_end <= ENDPOINT_CLEARANCE:
        raise TooCloseToEndpoint(
            f"z = {z:.6g} is within {ENDPOINT_CLEARANCE:g} of a branch point")
    if abs(z.real) <= _AXIS_TOL * max(1.0, abs(z)) and abs(z.imag) < e2:
        if abs(z.imag) < e1:
            return "middle"
        return "upper" if z.imag > 0 else "lower"
    return None


def _segment_geometry(name: str, e1: float, e2: float):
    """Parametrization of one jump segment for the Cauchy integrals.

    Returns (s_of, sprime, weight, lo, hi, start, end) where s_of maps the
    parameter psi in [lo, hi] onto the segment, sprime = ds/dpsi, and
    weight(psi) dpsi = ds / R_w(s) along the segment *orientation* (upward),
    with R_w the plus boundary value of R on the cuts and R itself on the
    middle gap.  ``start``/``end`` are the parametrization endpoints (for the
    lower cut these are opposite to the orientation, which the sign of
    ``weight`` already accounts for).
    """
    if name == "middle":
        def s_of(psi):
            return 1j * e1 * np.sin(psi)

        def sprime(psi):
            return 1j * e1 * np.cos(psi)

        def weight(psi):
            psi = np.asarray(psi, dtype=float)
            return 1j / np.sqrt(e2 * e2 - (e1 * np.sin(psi)) ** 2)

        return s_of, sprime, weight, -math.pi / 2.0, math.pi / 2.0, -1j * e1, 1j * e1

    sgn = 1.0 if name == "upper" else -1.0

    def s_of(psi):
        return sgn * 1j * (e1 + (e2 - e1) * np.sin(psi) ** 2)

    def sprime(psi):
        return sgn * 2j * (e2 - e1) * np.sin(psi) * np.cos(psi)

    def weight(psi):
        psi = np.asarray(psi, dtype=float)
        y = e1 + (e2 - e1) * np.sin(psi) ** 2
        return (-2.0 * sgn) / np.sqrt((y + e1) * (y + e2))

    return s_of, sprime, weight, 0.0, math.pi / 2.0, sgn * 1j * e1, sgn * 1j * e2


def _cauchy_segment(numer, name: str, e1: float, e2: float, z: complex,
                    side=None) -> complex:
    """One oriented segment's contribution  integral numer(s)/(R_w(s)(s-z)) ds.

    With ``side`` given and z on this segment, the one-sided boundary value
    is computed by subtracting the singular density: the regularized
    integrand (numer*weight - C*sprime)/(s - z) vanishes at psi_z, and the
    subtracted part has the closed form C * (log|end-z|/|start-z| +- i*pi),
    the sign fixed by which side of the parametrization direction z lies on.
    """
    s_of, sprime, weight, lo, hi, start, end = _segment_geometry(name, e1, e2)
    if side is None:
        def f(psi):
            s = s_of(psi)
            return numer(s) * weight(psi) / (s - z)
        return quad_gl(f, lo, hi, atol=1e-13, rtol=1e-11)

    y0 = abs(z.imag) if name != "middle" else z.imag
    if name == "middle":
        psi_z = math.asin(y0 / e1)
    else:
        psi_z = math.asin(math.sqrt((y0 - e1) / (e2 - e1)))
    C = complex(np.asarray(numer(np.asarray(z, dtype=complex)), dtype=complex)
                * weight(psi_z) / sprime(psi_z))

    def f(psi):
        s = s_of(psi)
        return (numer(s) * weight(psi) - C * sprime(psi)) / (s - z)

    val = quad_gl(f, lo, hi, atol=1e-13, rtol=1e-11)
    # parametrization direction is upward except on the lower cut
    upward = name != "lower"
    sgn = 1.0 if (side == "plus") == upward else -1.0
    val += C * (math.log(abs(end - z) / abs(start - z)) + sgn * 1j * math.pi)
    return val


def _resolve_side(z: complex, ctx: SurfaceContext, side):
    """Validate the (z, side) pair against the jump contour layout."""
    if side not in (None,) + _SIDES:
        raise ValidationError(f"unknown side {side!r}")
    seg = _classify(z, ctx.eta1, ctx.eta2)
    if seg is not None and side is None:
        raise OnCutError(
            "z lies on the jump contour; pass side='plus' or side='minus'")
    if seg is None and side is not None:
        raise ValidationError("side given but z is not on the jump contour")
    return seg


def _surface_for(cfg: "GasConfig", ctx) -> SurfaceContext:
    if ctx is None:
        return cfg.surface()
    if abs(ctx.eta1 - cfg.eta1) > 1e-12 or abs(ctx.eta2 - cfg.eta2) > 1e-12:
        raise ValidationError("surface context does not match the config's ellipse")
    return ctx


# ------------------------------------------------------------ g and f

def g_function(z, x: float, t: float, ctx: SurfaceContext, side=None) -> complex:
    """Scalar phase function g(z).

    g = (R(z)/(2*pi*i)) * [ integral over I and Ibar of
    (-2*x*s - 8*t*s^3)/(R_plus(s)(s-z)) ds  -  integral over the middle gap
    of Omega/(R(s)(s-z)) ds ].  One-sided boundary values on the three jump
    segments are selected with ``side`` ("plus" = left).
    """
    z = complex(z)
    x = float(x)
    t = float(t)
    seg = _resolve_side(z, ctx, side)
    e1, e2 = ctx.eta1, ctx.eta2
    omega = omega_of_xt(x, t, ctx)

    def cut_numer(s):
        return -2.0 * x * s - 8.0 * t * s ** 3

    def mid_numer(s):
        return omega + 0.0 * np.asarray(s, dtype=complex)

    total = _cauchy_segment(cut_numer, "upper", e1, e2, z,
                            side if seg == "upper" else None)
    total += _cauchy_segment(cut_numer, "lower", e1, e2, z,
                             side if seg == "lower" else None)
    total -= _cauchy_segment(mid_numer, "middle", e1, e2, z,
                             side if seg == "middle" else None)
    R = R_surd(z, ctx, side if seg in ("upper", "lower") else "auto")
    return R * total / (2j * math.pi)


def f_function(z, cfg: GasConfig, ctx: SurfaceContext = None, side=None, *,
               delta=None) -> complex:
    """Scalar normalization function f(z), with f(infinity) = 1.

    f = exp{ (R(z)/(2*pi*i)) * [ integral over I of (-log r)/(R_plus(s)(s-z))
    + integral over Ibar of log conj(r(conj s))/(R_plus(s)(s-z))
    + integral over the middle gap of i*Delta/(R(s)(s-z)) ] ds }.
    """
    if not isinstance(cfg, GasConfig):
        raise ValidationError("f_function needs a GasConfig")
    ctx = _surface_for(cfg, ctx)
    _assert_log_branch(cfg)
    if delta is None:
        delta = delta_constant(cfg)
    z = complex(z)
    seg = _resolve_side(z, ctx, side)
    e1, e2 = ctx.eta1, ctx.eta2

    def upper_numer(s):
        return -np.log(_r_of(np.asarray(s, dtype=complex).imag, cfg))

    def lower_numer(s):
        # conj s lies on I; log conj(w) = conj(log w) for the principal branch
        y = -np.asarray(s, dtype=complex).imag
        return np.conj(np.log(_r_of(y, cfg)))

    def mid_numer(s):
        return 1j * delta + 0.0 * np.asarray(s, dtype=complex)

    total = _cauchy_segment(upper_numer, "upper", e1, e2, z,
                            side if seg == "upper" else None)
    total += _cauchy_segment(lower_numer, "lower", e1, e2, z,
                             side if seg == "lower" else None)
    total += _cauchy_segment(mid_numer, "middle", e1, e2, z,
                             side if seg == "middle" else None)
    R = R_surd(z, ctx, side if seg in ("upper", "lower") else "auto")
    return cmath.exp(R * total / (2j * math.pi))


def phi(z, x: float, t: float, ctx: SurfaceContext, side=None) -> complex:
    """Modulated phase phi(z) = g(z) + x*z + 4*t*z^3 (tends to x*z + 4*t*z^3)."""
    z = complex(z)
    return g_function(z, x, t, ctx, side) + float(x) * z + 4.0 * float(t) * z ** 3


def g_infinity(x: float, t: float, ctx: SurfaceContext):
    """Limit g0 = g(infinity), Richardson-extrapolated along the e^{i*pi/4} ray.

    Returns (g0, error_estimate): g has a 1/z tail, so with z2 = 10*z1 the
    combination (10*g(z2) - g(z1))/9 cancels the leading term and the spread
    |g(z2) - g(z1)| bounds the remaining drift.
    """
    ray = cmath.exp(0.25j * math.pi)
    g1 = g_function(1e3 * ray, x, t, ctx)
    g2 = g_function(1e4 * ray, x, t, ctx)
    return (10.0 * g2 - g1) / 9.0, abs(g2 - g1)


# ------------------------------------------------------------ property report

@dataclass(frozen=True)
class Prop31Report:
    """Residuals of the defining jump identities of g and f.

    All fields are maxima over ``samples_per_segment`` interior points with
    one-sided evaluations on both sides; ``endpoint_exponents`` holds the
    fitted growth exponents of g + 4*t*z^3 + x*z at (i*eta1, i*eta2,
    -i*eta1, -i*eta2), which should all be 1/2.
    """

    g_sum_upper: float
    g_sum_lower: float
    g_gap_jump: float
    f_product_upper: float
    f_product_lower: float
    f_gap_ratio: float
    phi_sum_upper: float
    phi_sum_lower: float
    endpoint_exponents: tuple
    g_far_drift: float
    samples_per_segment: int

    def max_identity_residual(self) -> float:
        return max(self.g_sum_upper, self.g_sum_lower, self.g_gap_jump,
                   self.f_product_upper, self.f_product_lower, self.f_gap_ratio,
                   self.phi_sum_upper, self.phi_sum_lower)


def _endpoint_exponent(bp: complex, direction: complex, x: float, t: float,
                       ctx: SurfaceContext, r0: float = 8e-3) -> float:
    """Fitted local exponent p of phi(bp + r*direction) ~ c0 + c1*r^p.

    Dyadic differences cancel c0; the exponent is log2 of the difference
    ratio between radii (r0, r0/2, r0/4).
    """
    v = [phi(bp + (r0 / 2.0 ** k) * direction, x, t, ctx) for k in range(3)]
    return math.log2(abs(v[0] - v[1]) / abs(v[1] - v[2]))


def verify_prop31(x: float, t: float, cfg: GasConfig,
                  ctx: SurfaceContext = None, samples: int = 20) -> Prop31Report:
    """Check the one-sided jump identities of g and f on all three segments.

    On I and Ibar: g_plus + g_minus = -8*t*z^3 - 2*x*z and
    f_plus*f_minus = 1/r(z) (resp. conj(r(conj z))); across the middle gap:
    g_plus - g_minus = -Omega and f_plus/f_minus = exp(i*Delta).  Also fits
    the square-root endpoint exponents of phi and the far-field drift of g.
    """
    ctx = _surface_for(cfg, ctx)
    x = float(x)
    t = float(t)
    e1, e2 = ctx.eta1, ctx.eta2
    delta = delta_constant(cfg)
    omega = omega_of_xt(x, t, ctx)

    ys = e1 + (e2 - e1) * (np.arange(samples) + 0.5) / samples
    g_up = f_up = phi_up = 0.0
    g_lo = f_lo = phi_lo = 0.0
    for y in ys:
        for zc, sign in ((1j * y, 1), (-1j * y, -1)):
            gp = g_function(zc, x, t, ctx, "plus")
            gm = g_function(zc, x, t, ctx, "minus")
            fp = f_function(zc, cfg, ctx, "plus", delta=delta)
            fm = f_function(zc, cfg, ctx, "minus", delta=delta)
            g_res = abs(gp + gm + 8.0 * t * zc ** 3 + 2.0 * x * zc)
            phi_res = abs((gp + x * zc + 4 * t * zc ** 3)
                          + (gm + x * zc + 4 * t * zc ** 3))
            if sign > 0:
                f_res = abs(fp * fm - 1.0 / complex(r_density(zc, cfg)))
                g_up = max(g_up, g_res)
                f_up = max(f_up, f_res)
                phi_up = max(phi_up, phi_res)
            else:
                f_res = abs(fp * fm - np.conj(complex(r_density(np.conj(zc), cfg))))
                g_lo = max(g_lo, g_res)
                f_lo = max(f_lo, f_res)
                phi_lo = max(phi_lo, phi_res)

    g_gap = f_gap = 0.0
    ys_mid = -e1 + 2.0 * e1 * (np.arange(samples) + 0.5) / samples
    for y in ys_mid:
        zc = 1j * y
        gp = g_function(zc, x, t, ctx, "plus")
        gm = g_function(zc, x, t, ctx, "minus")
        fp = f_function(zc, cfg, ctx, "plus", delta=delta)
        fm = f_function(zc, cfg, ctx, "minus", delta=delta)
        g_gap = max(g_gap, abs(gp - gm + omega))
        f_gap = max(f_gap, abs(fp / fm - cmath.exp(1j * delta)))

    diag_ne = cmath.exp(0.25j * math.pi)
    diag_se = cmath.exp(-0.25j * math.pi)
    exponents = (
        _endpoint_exponent(1j * e1, diag_se, x, t, ctx),
        _endpoint_exponent(1j * e2, diag_ne, x, t, ctx),
        _endpoint_exponent(-1j * e1, diag_ne, x, t, ctx),
        _endpoint_exponent(-1j * e2, diag_se, x, t, ctx),
    )
    _, far_drift = g_infinity(x, t, ctx)

    return Prop31Report(
        g_sum_upper=g_up, g_sum_lower=g_lo, g_gap_jump=g_gap,
        f_product_upper=f_up, f_product_lower=f_lo, f_gap_ratio=f_gap,
        phi_sum_upper=phi_up, phi_sum_lower=phi_lo,
        endpoint_exponents=exponents, g_far_drift=far_drift,
        samples_per_segment=int(samples))


# ------------------------------------------------------------ sign check

@dataclass(frozen=True)
class SignCheckReport:
    """Observed Im(phi) margins on the lens contours at the offset that passed."""

    t: float
    x: float
    delta_used: float
    min_upper_im: float
    max_lower_im: float
    n_points: int


def lemma31_sign_check(t: float, ctx: SurfaceContext,
                       deltas=(0.05, 0.1)) -> SignCheckReport:
    """Sample Im(phi) on the opened lens contours next to I and Ibar.

    At the co-moving abscissa x = 2*(eta1^2+eta2^2)*t the lens factorization
    requires Im(phi) > 0 on both contours flanking I and Im(phi) < 0 on both
    flanking Ibar.  Contours are I translated horizontally by +-delta with
    the endpoints clipped by 0.1; the check passes if any offset in
    ``deltas`` gives a clean sign pattern.
    """
    t = float(t)
    if not t > 0.0:
        raise ValidationError("the sign check needs t > 0")
    e1, e2 = ctx.eta1, ctx.eta2
    if e2 - e1 <= 0.2:
        raise ValidationError("segment too short for the 0.1 endpoint clip")
    x = 2.0 * (e1 * e1 + e2 * e2) * t
    n = 20
    ys = (e1 + 0.1) + (e2 - e1 - 0.2) * (np.arange(n) + 0.5) / n

    last_violations = []
    for offset in deltas:
        violations = []
        min_up = math.inf
        max_lo = -math.inf
        for re_sign in (1.0, -1.0):
            for y in ys:
                z_up = re_sign * offset + 1j * y
                v_up = phi(z_up, x, t, ctx).imag
                min_up = min(min_up, v_up)
                if not v_up > 0.0:
                    violations.append((z_up, v_up))
                z_lo = re_sign * offset - 1j * y
                v_lo = phi(z_lo, x, t, ctx).imag
                max_lo = max(max_lo, v_lo)
                if not v_lo < 0.0:
                    violations.append((z_lo, v_lo))
        if not violations:
            return SignCheckReport(t=t, x=x, delta_used=float(offset),
                                   min_upper_im=float(min_up),
                                   max_lower_im=float(max_lo), n_points=4 * n)
        last_violations = violations
    detail = ", ".join(f"phi({z:.4g}) has Im = {v:.3e}"
                       for z, v in last_violations[:4])
    raise SignCheckFailed(
        f"Im(phi) sign pattern fails at every offset in {tuple(deltas)}: {detail}")


# ------------------------------------------------------------ theta model

@dataclass(frozen=True)
class ThetaModelContext:
    """Inputs of the outer model matrix: surface constants plus the phases.

    ``varpi_shift`` = (Omega + Delta)/(2*pi) is the theta-argument shift;
    Delta must be real (within 1e-10) as produced by a positive segment
    density.
    """

    surface: SurfaceContext
    Omega: float
    Delta: complex
    varpi_shift: complex

    def __post_init__(self) -> None:
        if not isinstance(self.surface, SurfaceContext):
            raise ValidationError("surface must be a SurfaceContext")
        vals = (self.Omega, self.Delta.real, self.Delta.imag,
                complex(self.varpi_shift).real, complex(self.varpi_shift).imag)
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError("model context values must be finite")

    @classmethod
    def from_omega_delta(cls, surface: SurfaceContext, Omega: float,
                         Delta) -> "ThetaModelContext":
        Delta = complex(Delta)
        if abs(Delta.imag) > 1e-10:
            raise ValidationError(
                f"Delta must be real to 1e-10 (positive density); got Im = {Delta.imag:.3e}")
        varpi = (float(Omega) + Delta) / (2.0 * math.pi)
        return cls(surface=surface, Omega=float(Omega), Delta=Delta,
                   varpi_shift=varpi)

    @classmethod
    def from_varpi(cls, surface: SurfaceContext, varpi: float) -> "ThetaModelContext":
        """Direct theta-shift constructor (Omega = 2*pi*varpi, Delta = 0)."""
        varpi = float(varpi)
        return cls(surface=surface, Omega=2.0 * math.pi * varpi, Delta=0j,
                   varpi_shift=complex(varpi))


def theta_context(cfg: GasConfig, x: float, t: float) -> ThetaModelContext:
    """Model context of a configuration at (x, t): Omega(x, t) and Delta(cfg)."""
    surface = cfg.surface()
    return ThetaModelContext.from_omega_delta(
        surface, omega_of_xt(x, t, surface), delta_constant(cfg))


def model_S(z, ctx: ThetaModelContext, side=None) -> np.ndarray:
    """Outer model matrix S(z), analytic off [-i*eta2, i*eta2], S(inf) = I.

    S = (theta(0)/(2*theta(vp))) * [[ q(A+1/4)*Gp, -i*q(-A+1/4)*Gm ],
    [ i*q(A-1/4)*Gm, q(-A-1/4)*Gp ]] with q(v) = theta(v+vp)/theta(v),
    vp = (Omega+Delta)/(2*pi), A the Abel map, and Gpm = gamma +- 1/gamma.
    Jumps: the off-diagonal involution on the two cuts and the diagonal
    phase exp(+-i*(Omega+Delta)) across the middle gap.
    """
    if side not in (None,) + _SIDES:
        raise ValidationError(f"unknown side {side!r}")
    surf = ctx.surface
    tau = surf.tau
    vp = complex(ctx.varpi_shift)

    zc = complex(z) if np.ndim(z) == 0 else None
    if zc is None:
        raise ValidationError("model_S evaluates one point at a time")
    if np.isfinite(zc):
        on_axis = (abs(zc.real) <= _AXIS_TOL * max(1.0, abs(zc))
                   and abs(zc.imag) <= surf.eta2)
        if on_axis and side is None:
            raise OnCutError(
                "z lies on the model jump contour; pass side='plus' or side='minus'")
        A = abel_map(zc, surf, side or "auto")
        gam = complex(gamma_quartic(zc, surf, side or "auto"))
        if gam == 0.0:
            raise PoleEvaluationError("model matrix entries diverge at +-i*eta1")
    else:
        A = abel_map(np.inf, surf)
        gam = 1.0 + 0.0j

    def th(v):
        return theta3(v, tau)

    th0 = th(0.0)
    th_vp = th(vp)
    dens = {"theta(vp)": th_vp,
            "theta(A+1/4)": th(A + 0.25),
            "theta(-A+1/4)": th(-A + 0.25),
            "theta(A-1/4)": th(A - 0.25),
            "theta(-A-1/4)": th(-A - 0.25)}
    for label, val in dens.items():
        if abs(val) < 1e-10:
            raise ThetaZeroError(f"{label} vanishes at z = {zc:.6g}: model pole")

    pref = 0.5 * th0 / th_vp
    gp = gam + 1.0 / gam
    gm = gam - 1.0 / gam
    return np.array([
        [pref * th(A + 0.25 + vp) / dens["theta(A+1/4)"] * gp,
         -1j * pref * th(-A + 0.25 + vp) / dens["theta(-A+1/4)"] * gm],
        [1j * pref * th(A - 0.25 + vp) / dens["theta(A-1/4)"] * gm,
         pref * th(-A - 0.25 + vp) / dens["theta(-A-1/4)"] * gp],
    ])


@dataclass(frozen=True)
class ModelJumpReport:
    """Max jump residuals ||S_plus - S_minus V|| per segment, plus invariants."""

    varpi: float
    upper: float
    lower: float
    middle: float
    det_drift: float
    far_field_norm: float
    n_points: int

    def max_residual(self) -> float:
        return max(self.upper, self.lower, self.middle)


def model_jump_report(ctx: ThetaModelContext, n_points: int = 50) -> ModelJumpReport:
    """Verify the model jumps on all three segments of [-i*eta2, i*eta2].

    Middle-gap samples keep |Im z| > 0.1*eta1: the matrix has its theta-divisor
    pole at the gap midpoint, where finite-precision Abel values would swamp
    the residual.  Also reports max |det S - 1| over all samples and
    ||S - I|| at |z| = 1e4.
    """
    surf = ctx.surface
    e1, e2 = surf.eta1, surf.eta2
    vu = np.array([[0.0, -1.0], [1.0, 0.0]], dtype=complex)
    vl = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
    ph = cmath.exp(2j * math.pi * complex(ctx.varpi_shift))
    vm = np.array([[ph, 0.0], [0.0, 1.0 / ph]], dtype=complex)

    det_drift = 0.0
    residuals = {}
    half = n_points // 2
    mid_pos = e1 * (0.1 + 0.85 * (np.arange(half) + 0.5) / half)
    samples = {
        "upper": 1j * (e1 + (e2 - e1) * (np.arange(n_points) + 0.5) / n_points),
        "lower": -1j * (e1 + (e2 - e1) * (np.arange(n_points) + 0.5) / n_points),
        "middle": 1j * np.concatenate([-mid_pos[::-1], mid_pos]),
    }
    jumps = {"upper": vu, "lower": vl, "middle": vm}
    for name, pts in samples.items():
        worst = 0.0
        for zc in pts:
            sp = model_S(zc, ctx, "plus")
            sm = model_S(zc, ctx, "minus")
            worst = max(worst, float(np.linalg.norm(sp - sm @ jumps[name])))
            det_drift = max(det_drift,
                            abs(np.linalg.det(sp) - 1.0), abs(np.linalg.det(sm) - 1.0))
        residuals[name] = worst

    far = float(np.linalg.norm(model_S(1e4 + 0j, ctx) - np.eye(2)))
    return ModelJumpReport(varpi=float(complex(ctx.varpi_shift).real),
                           upper=residuals["upper"], lower=residuals["lower"],
                           middle=residuals["middle"], det_drift=float(det_drift),
                           far_field_norm=far, n_points=int(n_points))


# ------------------------------------------------------------ profiles

def profile_theta(x: float, t: float, cfg: GasConfig) -> float:
    """Step-like profile in theta form.

    q = -(eta2-eta1) * theta(1/2+vp)*theta(0) / (theta(1/2)*theta(vp)) with
    vp = (Omega(x,t)+Delta)/(2*pi) on the surface lattice tau.
    """
    surface = cfg.surface()
    tau = surface.tau
    vp = (omega_of_xt(x, t, surface) + delta_constant(cfg)) / (2.0 * math.pi)
    th_vp = theta3(vp, tau)
    if abs(th_vp) < 1e-10:
        raise ThetaZeroError("theta(vp) vanishes: profile pole")
    val = (-(surface.eta2 - surface.eta1)
           * theta3(0.5 + vp, tau) * theta3(0.0, tau)
           / (theta3(0.5, tau) * th_vp))
    return float(val.real)


def profile_dn(x: float, t: float, cfg: GasConfig) -> float:
    """Step-like profile in Jacobi-dn form.

    q = -(eta1+eta2) * dn((eta1+eta2)*(x - 2*(eta1^2+eta2^2)*t - x0); m1)
    with m1 = 4*eta1*eta2/(eta1+eta2)^2 and x0 = K(m)*(Delta - pi)/(eta2*pi).
    """
    e1, e2 = cfg.eta1, cfg.eta2
    K = elliptic_K((e1 / e2) ** 2)
    delta = delta_constant(cfg).real
    m1 = 4.0 * e1 * e2 / (e1 + e2) ** 2
    x0 = K * (delta - math.pi) / (e2 * math.pi)
    u = (e1 + e2) * (float(x) - 2.0 * (e1 * e1 + e2 * e2) * float(t) - x0)
    return -(e1 + e2) * jacobi_dn(u, m1)


# ------------------------------------------------------------ left tail

@dataclass(frozen=True)
class LeftTailReport:
    """Fit of log|q(x, 0)| against x on the quiescent side."""

    n_samples: int
    x_values: tuple
    log_abs_q: tuple
    slope: float
    intercept: float
    max_residual: float


def left_tail_estimate(cfg: GasConfig, n_samples: int, x_values, *,
                       seed: int = 0, threads=None) -> LeftTailReport:
    """Decay rate of the sampled condensate solution as x -> -infinity.

    Discretizes the soliton channel on the imaginary-axis trace of the
    ellipse (``n_samples`` points), evaluates q(x, 0) through the dressing
    solver on the given x range (all <= -5), and fits the slope of log|q|.
    """
    xs = tuple(float(v) for v in x_values)
    if len(xs) < 2:
        raise ValidationError("need at least two x samples for a slope fit")
    if max(xs) > -5.0:
        raise ValidationError("left-tail x range must lie in (-inf, -5]")
    n_samples = int(n_samples)
    data = sample_condensate(cfg.ellipse, (cfg.w1, cfg.w2), 0, n_samples,
                             scheme="grid", seed=seed, strict_solitons=True)
    grid = EvaluationGrid(x_values=xs, t_values=(0.0,))
    values, errors = q_on_grid(data, grid, threads=threads)
    if errors:
        _, _, message = errors[0]
        raise SslabError(f"dressing failed on the tail grid: {message}")
    mags = np.abs(values[0])
    if np.any(mags < 1e-300):
        worst = xs[int(np.argmin(mags))]
        raise UnderflowFloor(
            f"|q| underflows at x = {worst:g}; clip the x range")
    logs = np.log(mags)
    coeffs = np.polyfit(np.asarray(xs), logs, 1)
    fit = np.polyval(coeffs, np.asarray(xs))
    return LeftTailReport(
        n_samples=n_samples, x_values=xs, log_abs_q=tuple(float(v) for v in logs),
        slope=float(coeffs[0]), intercept=float(coeffs[1]),
        max_residual=float(np.max(np.abs(fit - logs))))

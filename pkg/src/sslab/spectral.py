"""Spectral data for the meromorphic dressing problem: soliton/breather poles
with norming constants, condensate support domains, analytic densities, and
the deterministic samplers that discretize a domain-filling condensate into
finite spectral data with 1/N-scaled norming constants.
"""

from __future__ import annotations

import math
from dataclasses import InitVar, dataclass
from functools import lru_cache

import numpy as np

from .errors import (DegenerateDomain, DomainError, EmptyDomainSample,
                     ValidationError)
from .quadrules import gl_nodes

__all__ = [
    "SolitonDatum",
    "BreatherDatum",
    "SpectralData",
    "QuadratureDomain",
    "EllipseDomain",
    "AnalyticDensity",
    "evaluate_density",
    "alpha_density",
    "domain_area",
    "domain_integral",
    "radial_extent",
    "sample_condensate",
]


# --------------------------------------------------------------- point data

@dataclass(frozen=True)
class SolitonDatum:
    """A simple pole kappa in the upper half-plane with norming constant h.

    In strict form (the default) kappa must be purely imaginary, kappa = i*zeta
    with zeta > 0, which is the classical soliton datum.  Domain samplers
    construct non-strict data whose poles range over a 2D region; pass
    ``strict=False`` for those.
    """

    kappa: complex
    h: complex
    strict: InitVar[bool] = True

    def __post_init__(self, strict: bool) -> None:
        object.__setattr__(self, "kappa", complex(self.kappa))
        object.__setattr__(self, "h", complex(self.h))
        if not self.kappa.imag > 0:
            raise ValidationError(f"soliton pole must lie in the upper half-plane, got {self.kappa}")
        if self.h == 0:
            raise ValidationError("norming constant h must be nonzero")
        if strict and abs(self.kappa.real) > 1e-13 * max(1.0, abs(self.kappa)):
            raise ValidationError(
                f"soliton pole must be purely imaginary, got {self.kappa}; "
                "construct with strict=False for domain-sampled data")

    @property
    def zeta(self) -> float:
        """Imaginary part of the pole (the soliton amplitude parameter)."""
        return self.kappa.imag


@dataclass(frozen=True)
class BreatherDatum:
    """A pole z in the open first quadrant with norming constant c."""

    z: complex
    c: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "c", complex(self.c))
        if not (self.z.real > 0 and self.z.imag > 0):
            raise ValidationError(f"breather pole must have Re > 0 and Im > 0, got {self.z}")
        if self.c == 0:
            raise ValidationError("norming constant c must be nonzero")


def _min_pairwise_gap(points: np.ndarray) -> float:
    """Smallest pairwise distance among complex points, chunked for memory."""
    n = len(points)
    if n < 2:
        return math.inf
    best = math.inf
    for start in range(0, n, 256):
        block = points[start:start + 256]
        d = np.abs(block[:, None] - points[None, :])
        d[np.arange(len(block)), start + np.arange(len(block))] = np.inf
        best = min(best, float(d.min()))
    return best


@dataclass(frozen=True)
class SpectralData:
    """Finite scattering data: N2 solitons and N1 breathers."""

    solitons: tuple = ()
    breathers: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "solitons", tuple(self.solitons))
        object.__setattr__(self, "breathers", tuple(self.breathers))
        poles = np.array([s.kappa for s in self.solitons]
                         + [b.z for b in self.breathers], dtype=complex)
        if len(poles) and _min_pairwise_gap(poles) < 1e-12:
            raise ValidationError("pole positions must be pairwise distinct")

    @property
    def n_poles(self) -> int:
        return len(self.solitons) + len(self.breathers)


# ------------------------------------------------------------------ domains

@dataclass(frozen=True)
class QuadratureDomain:
    """The region |(z - d0)^m - d1| < rho in the upper half-plane.

    Its boundary admits a Schwarz function meromorphic inside the domain,
    which is what collapses the condensate to m point masses.
    """

    d0: complex
    d1: complex
    rho: float
    m: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "d0", complex(self.d0))
        object.__setattr__(self, "d1", complex(self.d1))
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "m", int(self.m))
        if self.m < 1:
            raise DegenerateDomain("root count m must be a positive integer")
        if self.rho <= 0:
            raise DegenerateDomain("rho must be positive")
        if abs(self.d1) >= self.rho:
            raise DegenerateDomain(
                "|d1| must be smaller than rho for a single closed boundary curve")
        pts = self.boundary(512)
        if float(pts.imag.min()) <= 0.0:
            raise DegenerateDomain("boundary must lie in the open upper half-plane")
        _check_boundary_injective(pts)

    @property
    def center(self) -> complex:
        return self.d0

    @property
    def outer_radius(self) -> float:
        """Largest distance from d0 to the boundary."""
        return (self.rho + abs(self.d1)) ** (1.0 / self.m)

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return np.abs((z - self.d0) ** self.m - self.d1) < self.rho

    def boundary(self, n: int) -> np.ndarray:
        return self.boundary_with_derivative(n)[1]

    def boundary_with_derivative(self, n: int):
        """Boundary trace w(phi) over phi in [0, 2*pi*m) plus dw/dphi.

        The curve is the m-th-root image of the circle u = d1 + rho*e^{i phi};
        the continuous root branch is fixed by unwrapping arg(u) over the m
        sheets, which closes the curve after a full sweep.
        """
        phi = 2.0 * math.pi * self.m * np.arange(n) / n
        u = self.d1 + self.rho * np.exp(1j * phi)
        root = np.abs(u) ** (1.0 / self.m) * np.exp(1j * np.unwrap(np.angle(u)) / self.m)
        w = self.d0 + root
        dw = root * (1j * self.rho * np.exp(1j * phi)) / (self.m * u)
        return phi, w, dw


def _check_boundary_injective(pts: np.ndarray) -> None:
    """Reject boundary traces where non-neighbor samples (circular index
    distance >= 5) come closer than a small fraction of the diameter."""
    n = len(pts)
    diam = float(np.abs(pts[:, None][::16] - pts[None, :][:, ::16]).max())
    idx = np.arange(n)
    for start in range(0, n, 128):
        block = pts[start:start + 128]
        d = np.abs(block[:, None] - pts[None, :])
        ring = np.abs((idx[start:start + 128, None] - idx[None, :] + n // 2) % n - n // 2)
        d[ring < 5] = np.inf
        if float(d.min()) < 1e-6 * diam:
            raise DegenerateDomain("boundary curve self-intersects at this (d1, rho, m)")


@dataclass(frozen=True)
class EllipseDomain:
    """Ellipse with foci i*eta1 and i*eta2 and distance sum 2*rho."""

    eta1: float
    eta2: float
    rho: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "eta1", float(self.eta1))
        object.__setattr__(self, "eta2", float(self.eta2))
        object.__setattr__(self, "rho", float(self.rho))
        if not 0.0 < self.eta1 < self.eta2:
            raise DegenerateDomain("need 0 < eta1 < eta2")
        c = 0.5 * (self.eta2 - self.eta1)
        if self.rho <= c:
            raise DegenerateDomain("rho must exceed the focal half-distance")
        if 0.5 * (self.eta1 + self.eta2) - self.rho <= 0.0:
            raise DegenerateDomain("ellipse must stay inside the open upper half-plane")

    @property
    def center(self) -> complex:
        return 0.5j * (self.eta1 + self.eta2)

    @property
    def semi_minor(self) -> float:
        c = 0.5 * (self.eta2 - self.eta1)
        return math.sqrt(self.rho * self.rho - c * c)

    @property
    def outer_radius(self) -> float:
        return self.rho

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return (np.abs(z - 1j * self.eta1) + np.abs(z - 1j * self.eta2)
                < 2.0 * self.rho)

    def boundary(self, n: int) -> np.ndarray:
        t = 2.0 * math.pi * np.arange(n) / n
        return self.center + 1j * self.rho * np.cos(t) + self.semi_minor * np.sin(t)


# ---------------------------------------------------------------- densities

@dataclass(frozen=True)
class AnalyticDensity:
    """Polynomial density in z, coefficients in ascending degree order."""

    coefficients: tuple

    def __post_init__(self) -> None:
        coeffs = tuple(complex(c) for c in self.coefficients)
        if not coeffs:
            raise ValidationError("density needs at least one coefficient")
        if not all(np.isfinite([c.real for c in coeffs] + [c.imag for c in coeffs])):
            raise ValidationError("density coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in reversed(self.coefficients):
            out = out * z + c
        return out if out.ndim else complex(out)


def evaluate_density(density: AnalyticDensity, z):
    """Horner evaluation of the polynomial density at z."""
    return density(z)


def alpha_density(domain, varpi: AnalyticDensity, z):
    """Effective 2D condensate weight alpha(w, conj w) for one channel.

    Quadrature domain: alpha = m * (conj(w) - conj(d0))^(m-1) * varpi(w);
    ellipse: alpha = varpi(w).
    """
    z = np.asarray(z, dtype=complex)
    if isinstance(domain, QuadratureDomain):
        base = domain.m * (np.conj(z) - np.conj(domain.d0)) ** (domain.m - 1)
        out = base * varpi(z)
    elif isinstance(domain, EllipseDomain):
        out = np.asarray(varpi(z), dtype=complex)
    else:
        raise DomainError(f"unsupported domain type {type(domain).__name__}")
    return out if out.ndim else complex(out)


# ----------------------------------------------- membership-based quadrature

def radial_extent(domain, psi: np.ndarray) -> np.ndarray:
    """Distance from the domain center to the boundary along each angle.

    Valid because both supported domain families are star-shaped about their
    center; computed by vectorized bisection on the membership predicate.
    """
    psi = np.asarray(psi, dtype=float)
    dirs = np.exp(1j * psi)
    hi0 = domain.outer_radius * (1.0 + 1e-9)
    lo = np.zeros_like(psi)
    hi = np.full_like(psi, hi0)
    if not np.all(domain.contains(np.atleast_1d(domain.center))):
        raise DegenerateDomain("domain center is not inside the domain")
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        inside = domain.contains(domain.center + mid * dirs)
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return 0.5 * (lo + hi)


@lru_cache(maxsize=64)
def domain_area(domain) -> float:
    """Lebesgue area of the domain via the polar boundary-distance profile.

    area = (1/2) * closed integral of r(psi)^2 dpsi with the trapezoid rule;
    the profile is smooth and periodic, so the rule converges spectrally.
    """
    n = 1024
    psi = 2.0 * math.pi * np.arange(n) / n
    r = radial_extent(domain, psi)
    return float(0.5 * np.sum(r * r) * (2.0 * math.pi / n))


def domain_integral(domain, f, n_angles: int = 512, n_radial: int = 48) -> complex:
    """Integral of f over the domain area, in star-shaped polar coordinates.

    Angular direction: trapezoid over a full period; radial direction:
    Gauss-Legendre on [0, r(psi)] per angle.  ``f`` must accept a complex
    ndarray and return values of the same shape.
    """
    psi = 2.0 * math.pi * np.arange(n_angles) / n_angles
    r = radial_extent(domain, psi)
    x, w = gl_nodes(n_radial)
    u = 0.5 * (x + 1.0)
    wu = 0.5 * w
    s = r[:, None] * u[None, :]
    pts = domain.center + s * np.exp(1j * psi)[:, None]
    vals = np.asarray(f(pts), dtype=complex)
    radial = np.sum(vals * s * (r[:, None] * wu[None, :]), axis=1)
    return complex(np.sum(radial) * (2.0 * math.pi / n_angles))


# ----------------------------------------------------------------- sampling

def _bounding_box(domain):
    if isinstance(domain, EllipseDomain):
        b = domain.semi_minor
        cy = 0.5 * (domain.eta1 + domain.eta2)
        return -b, cy - domain.rho, 2.0 * b, 2.0 * domain.rho
    R = domain.outer_radius
    return domain.d0.real - R, domain.d0.imag - R, 2.0 * R, 2.0 * R


def _lattice_inside(domain, h: float) -> np.ndarray:
    """Square-lattice points with spacing h inside the domain, row-major
    (y ascending outer, x ascending inner)."""
    x0, y0, W, H = _bounding_box(domain)
    xs = x0 + (np.arange(int(math.ceil(W / h))) + 0.5) * h
    ys = y0 + (np.arange(int(math.ceil(H / h))) + 0.5) * h
    pts = (xs[None, :] + 1j * ys[:, None]).ravel()
    return pts[domain.contains(pts)]

def _grid_points(domain, n: int) -> np.ndarray:
    """First n row-major lattice points, with the spacing bisected so the
    inside count lands as close to n as symmetry ties allow."""
    x0, y0, W, H = _bounding_box(domain)
    h_hi = max(W, H)
    h_lo = h_hi / max(2.0, 2.5 * math.sqrt(n))
    for _ in range(40):
        if len(_lattice_inside(domain, h_lo)) >= n:
            break
        h_lo *= 0.5
    else:
        raise EmptyDomainSample("could not place any lattice point inside the domain")
    for _ in range(80):
        mid = 0.5 * (h_lo + h_hi)
        if len(_lattice_inside(domain, mid)) >= n:
            h_lo = mid
        else:
            h_hi = mid
    return _lattice_inside(domain, h_lo)[:n]


def _halton_radical_inverse(indices: np.ndarray, base: int) -> np.ndarray:
    result = np.zeros(len(indices), dtype=float)
    f = 1.0 / base
    i = indices.copy()
    while np.any(i > 0):
        result += f * (i % base)
        i //= base
        f /= base
    return result


def _halton_points(domain, n: int, seed: int) -> np.ndarray:
    x0, y0, W, H = _bounding_box(domain)
    found: list[complex] = []
    start = seed + 1
    batch = max(64, 4 * n)
    while len(found) < n:
        idx = np.arange(start, start + batch)
        pts = (x0 + W * _halton_radical_inverse(idx, 2)
               + 1j * (y0 + H * _halton_radical_inverse(idx, 3)))
        inside = pts[domain.contains(pts)]
        found.extend(inside.tolist())
        start += batch
        if start > seed + 1 + 10000 * max(1, n):
            raise EmptyDomainSample("Halton sampling found too few points inside the domain")
    return np.array(found[:n], dtype=complex)


def _axis_trace_interval(domain) -> tuple[float, float]:
    """The segment of the positive imaginary axis inside the domain."""
    x0, y0, W, H = _bounding_box(domain)
    ys = y0 + (np.arange(4096) + 0.5) * (H / 4096)
    inside = np.asarray(domain.contains(1j * ys))
    if not inside.any():
        raise EmptyDomainSample("domain does not meet the imaginary axis")
    y_in_lo, y_in_hi = float(ys[inside][0]), float(ys[inside][-1])
    lo_out, hi_out = y_in_lo - H / 4096, y_in_hi + H / 4096
    for _ in range(64):
        mid = 0.5 * (lo_out + y_in_lo)
        if bool(np.asarray(domain.contains(np.atleast_1d(1j * mid)))[0]):
            y_in_lo = mid
        else:
            lo_out = mid
        mid = 0.5 * (hi_out + y_in_hi)
        if bool(np.asarray(domain.contains(np.atleast_1d(1j * mid)))[0]):
            y_in_hi = mid
        else:
            hi_out = mid
    return y_in_lo, y_in_hi


def _axis_points(domain, n: int, scheme: str, seed: int) -> np.ndarray:
    y_lo, y_hi = _axis_trace_interval(domain)
    span = y_hi - y_lo
    if scheme == "grid":
        ys = y_lo + (np.arange(n) + 0.5) * (span / n)
    else:
        ys = y_lo + span * _halton_radical_inverse(np.arange(seed + 1, seed + 1 + n), 2)
    return 1j * ys


def sample_condensate(domain, densities, n1: int, n2: int, scheme: str = "grid",
                      seed: int = 0, strict_solitons: bool = False) -> SpectralData:
    """Discretize a condensate over the domain into finite spectral data.

    ``densities`` is the pair (varpi1, varpi2) for the breather and soliton
    channels.  Returns n1 breather points and n2 soliton points inside the
    domain with norming constants c = S*alpha1(z)/(pi*n1) and
    h = S*alpha2(kappa)/(pi*n2), where S is the domain area.  The point
    sequence is a pure function of (domain, scheme, seed).  In strict-soliton
    mode the soliton points are confined to the imaginary-axis trace of the
    domain (for realness demonstrations); otherwise they fill the 2D domain.
    """
    if scheme not in ("grid", "halton"):
        raise ValidationError(f"unknown sampling scheme {scheme!r}")
    n1, n2 = int(n1), int(n2)
    if n1 < 0 or n2 < 0 or n1 + n2 < 1:
        raise ValidationError("need n1, n2 >= 0 with n1 + n2 >= 1")
    varpi1, varpi2 = densities
    S = domain_area(domain)
    if strict_solitons:
        if n1:
            raise ValidationError("strict-soliton mode samples only the soliton channel")
        soliton_pts = _axis_points(domain, n2, scheme, seed)
        breather_pts = np.array([], dtype=complex)
    elif scheme == "grid":
        pts = _grid_points(domain, n1 + n2)
        breather_pts, soliton_pts = pts[:n1], pts[n1:]
    else:
        pts = _halton_points(domain, n1 + n2, seed)
        breather_pts, soliton_pts = pts[:n1], pts[n1:]
    breathers = tuple(
        BreatherDatum(z=z, c=S * alpha_density(domain, varpi1, z) / (math.pi * n1))
        for z in breather_pts)
    solitons = tuple(
        SolitonDatum(kappa=k, h=S * alpha_density(domain, varpi2, k) / (math.pi * n2),
                     strict=strict_solitons)
        for k in soliton_pts)
    return SpectralData(solitons=solitons, breathers=breathers)

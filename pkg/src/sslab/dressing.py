"""Meromorphic dressing solver for focusing mKdV soliton data.

The solution of q_t + 6 q^2 q_x + q_xxx = 0 attached to a finite set of
spectral poles is produced by a 2x2 matrix function

    M(z) = I + sum_p A_p / (z - p),

normalized to I at infinity, whose residue at each pole p is pinned by a
nilpotent target matrix N_p:

    Res_{z=p} M = lim_{z->p} M(z) N_p.

For a pole of lower-triangular kind (upper half-plane) N_p has its only
nonzero entry in the lower-left corner, equal to c_p e^{+2i theta(p)};
for the upper-triangular kind (lower half-plane) the entry sits in the
upper-right corner and carries e^{-2i theta(p)}, with the phase

    theta(z) = x z + 4 t z^3.

Because N_p annihilates one column, each A_p has a single nonzero
column, and the residue conditions close into a finite linear system in
those columns.  The potential is read off the 1/z coefficient of M_12:

    q(x, t) = 2i sum_p (A_p)_{12}.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import get_lapack_funcs

from .errors import (
    DuplicatePoleError,
    GridTooSmall,
    IllConditionedWarning,
    PoleEvaluationError,
    SingularSystemError,
    SslabError,
    ValidationError,
)
from .grids import EvaluationGrid
from .runtime import ordered_map
from .spectral import SpectralData, _min_pairwise_gap

__all__ = [
    "LOWER_TRIANGULAR",
    "UPPER_TRIANGULAR",
    "PhaseParams",
    "PoleSystem",
    "DressingSolution",
    "expand_spectrum",
    "solve_M",
    "evaluate_M",
    "recover_q",
    "q_on_grid",
    "mkdv_residual",
]

#: Residue-kind codes.  A "lower_triangular" pole lives in the upper
#: half-plane and its nilpotent residue target has the lower-left entry;
#: "upper_triangular" is the mirror pole in the lower half-plane.
LOWER_TRIANGULAR: int = 1
UPPER_TRIANGULAR: int = -1

#: Poles closer than this are rejected: the ansatz needs simple poles.
_MIN_POLE_GAP = 1e-10

#: Condition-estimate threshold above which results are suspect.
_CONDITION_LIMIT = 1e12

#: Matrix size from which one step of iterative refinement is applied.
_REFINE_THRESHOLD = 512

_zgetrf, _zgecon, _zgetrs = get_lapack_funcs(
    ("getrf", "gecon", "getrs"), (np.empty(0, dtype=np.complex128),)
)


@dataclass(frozen=True)
class PhaseParams:
    """The (x, t) point entering the phase theta(z) = x z + 4 t z^3."""

    x: float
    t: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.t)):
            raise ValidationError("phase parameters x, t must be finite")

    def theta(self, z: complex | np.ndarray) -> complex | np.ndarray:
        zz = np.asarray(z, dtype=complex)
        out = self.x * zz + 4.0 * self.t * zz**3
        return out if out.shape else complex(out)


@dataclass(frozen=True, eq=False)
class PoleSystem:
    """The full pole set of the dressing ansatz.

    ``poles`` are pairwise distinct and sorted by (imag, real) ascending;
    ``kinds`` holds LOWER_TRIANGULAR / UPPER_TRIANGULAR codes and
    ``constants`` the coefficients multiplying e^{+-2i theta(p)} in the
    residue targets.  Instances come from :func:`expand_spectrum`.
    """

    poles: np.ndarray
    kinds: np.ndarray
    constants: np.ndarray

    def __post_init__(self) -> None:
        poles = np.asarray(self.poles, dtype=complex)
        kinds = np.asarray(self.kinds, dtype=np.int8)
        constants = np.asarray(self.constants, dtype=complex)
        if not (poles.shape == kinds.shape == constants.shape) or poles.ndim != 1:
            raise ValidationError("poles, kinds, constants must be 1-d of equal length")
        if poles.size:
            if not np.all(np.isin(kinds, (LOWER_TRIANGULAR, UPPER_TRIANGULAR))):
                raise ValidationError("kinds must be +1 (lower) or -1 (upper)")
            lower = kinds == LOWER_TRIANGULAR
            if np.any(poles[lower].imag <= 0.0) or np.any(poles[~lower].imag >= 0.0):
                raise ValidationError(
                    "lower-triangular poles must lie in the upper half-plane "
                    "and upper-triangular poles in the lower half-plane"
                )
        for name, arr in (("poles", poles), ("kinds", kinds), ("constants", constants)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def size(self) -> int:
        return int(self.poles.size)


def expand_spectrum(data: SpectralData) -> PoleSystem:
    """Unfold spectral data into the full mirror-symmetric pole system.

    Each soliton (kappa, h) contributes the conjugate pair

        (kappa,      lower, h),
        (conj kappa, upper, -conj h),

    and each breather (z, c) the quadruple

        (z,       lower,  c),
        (conj z,  upper, -conj c),
        (-conj z, lower, -conj c),
        (-z,      upper,  c).

    The result is sorted by (imag, real) ascending so the downstream
    linear algebra has a reproducible ordering.

    Raises DuplicatePoleError when two poles fall within 1e-10 of each
    other; the meromorphic ansatz requires simple poles.
    """
    poles: list[complex] = []
    kinds: list[int] = []
    constants: list[complex] = []

    for sol in data.solitons:
        kappa = complex(sol.kappa)
        h = complex(sol.h)
        poles += [kappa, kappa.conjugate()]
        kinds += [LOWER_TRIANGULAR, UPPER_TRIANGULAR]
        constants += [h, -h.conjugate()]

    for br in data.breathers:
        z = complex(br.z)
        c = complex(br.c)
        poles += [z, z.conjugate(), -z.conjugate(), -z]
        kinds += [LOWER_TRIANGULAR, UPPER_TRIANGULAR,
                  LOWER_TRIANGULAR, UPPER_TRIANGULAR]
        constants += [c, -c.conjugate(), -c.conjugate(), c]

    pole_arr = np.asarray(poles, dtype=complex)
    kind_arr = np.asarray(kinds, dtype=np.int8)
    const_arr = np.asarray(constants, dtype=complex)

    if pole_arr.size:
        order = np.lexsort((pole_arr.real, pole_arr.imag))
        pole_arr = pole_arr[order]
        kind_arr = kind_arr[order]
        const_arr = const_arr[order]
        gap = _min_pairwise_gap(pole_arr)
        if gap < _MIN_POLE_GAP:
            raise DuplicatePoleError(
                f"pole separation {gap:.3e} is below {_MIN_POLE_GAP:.0e}; "
                "the dressing ansatz requires simple, well-separated poles"
            )

    return PoleSystem(poles=pole_arr, kinds=kind_arr, constants=const_arr)


@dataclass(frozen=True, eq=False)
class DressingSolution:
    """Solved residue matrices at one (x, t) point.

    The nonzero column of A_p is (top[p], bottom[p]): for a lower kind
    pole that column is the first, for an upper kind pole the second.
    ``cond_estimate`` is a 1-norm condition estimate of the solved
    system.
    """

    poles: np.ndarray
    kinds: np.ndarray
    top: np.ndarray
    bottom: np.ndarray
    cond_estimate: float
    phase: PhaseParams
    refined: bool = field(default=False)

    @property
    def size(self) -> int:
        return int(self.poles.size)


def _phase_factors(system: PoleSystem, phase: PhaseParams
                   ) -> tuple[np.ndarray, np.ndarray]:
    """Row-equilibrated phase factors F_p = c_p e^{+-2i theta(p)}.

    |F_p| grows like e^{2 zeta |x|} and overflows double precision long
    before the residue matrices themselves misbehave, so the factors are
    assembled in log space and each residue equation is pre-scaled by
    w_p = 1 / max(1, |F_p|).  Returns (F_p * w_p, w_p); the scaled
    factor always has modulus <= 1 and row scaling does not change the
    solution of the linear system, only its floating-point robustness.
    """
    theta = np.asarray(phase.theta(system.poles), dtype=complex)
    sign = np.where(system.kinds == LOWER_TRIANGULAR, 1.0, -1.0)
    exponent = 2j * sign * theta
    log_mag = np.log(np.abs(system.constants)) + exponent.real
    arg = np.angle(system.constants) + exponent.imag
    if not np.all(np.isfinite(log_mag)):
        raise SingularSystemError(
            "residue phase factors are not finite at "
            f"(x, t) = ({phase.x}, {phase.t}); the system cannot be assembled"
        )
    weights = np.exp(-np.maximum(log_mag, 0.0))
    scaled = np.exp(np.minimum(log_mag, 0.0) + 1j * arg)
    return scaled, weights


def solve_M(system: PoleSystem, phase: PhaseParams,
            refine: bool | None = None) -> DressingSolution:
    """Solve the residue conditions for the dressing matrix at (x, t).

    Writing F_p for the phased residue entry and splitting M into
    columns, the residue conditions couple the first components of all
    nonzero columns among themselves and likewise the second
    components:

        u_p - F_p * sum_{q of opposite kind} u_q / (p - q) = rhs_p,

    one copy with rhs 'F_p on upper poles' (first components, which feed
    q) and one with rhs 'F_p on lower poles' (second components).  Both
    share the same N x N matrix, so the full 2N x 2N system over all
    column entries is solved with a single LU factorization and two
    right-hand sides.  Rows are equilibrated by 1/max(1, |F_p|) so that
    exponentially large phase factors (far-field / large-time points)
    do not overflow; this leaves the solution unchanged.

    Returns the residue columns plus a 1-norm condition estimate.
    Raises SingularSystemError when the factorization encounters an
    exactly singular matrix (a collision degeneracy of the data) and
    emits IllConditionedWarning when the condition estimate exceeds
    1e12.  For systems of 512 or more poles one step of iterative
    refinement is applied (set ``refine`` to force either behavior).
    """
    n = system.size
    if n == 0:
        empty = np.empty(0, dtype=complex)
        return DressingSolution(
            poles=empty, kinds=np.empty(0, dtype=np.int8), top=empty.copy(),
            bottom=empty.copy(), cond_estimate=1.0, phase=phase,
        )

    factors, weights = _phase_factors(system, phase)
    opposite = system.kinds[:, None] != system.kinds[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        cauchy = np.where(
            opposite,
            1.0 / (system.poles[:, None] - system.poles[None, :]),
            0.0 + 0.0j,
        )
    matrix = np.diag(weights.astype(complex)) - factors[:, None] * cauchy

    upper = system.kinds == UPPER_TRIANGULAR
    rhs = np.zeros((n, 2), dtype=complex)
    rhs[upper, 0] = factors[upper]
    rhs[~upper, 1] = factors[~upper]

    anorm = float(np.linalg.norm(matrix, 1))
    lu, piv, info = _zgetrf(matrix)
    if info > 0:
        raise SingularSystemError(
            f"residue linear system is exactly singular (zero pivot {info}) at "
            f"(x, t) = ({phase.x}, {phase.t})"
        )
    if info < 0:
        raise SslabError(f"LU factorization rejected argument {-info}")

    rcond, cinfo = _zgecon(lu, anorm, norm="1")
    if cinfo != 0:
        raise SslabError(f"condition estimator rejected argument {-cinfo}")
    rcond = float(rcond)
    if rcond == 0.0:
        raise SingularSystemError(
            "residue linear system is singular to machine precision at "
            f"(x, t) = ({phase.x}, {phase.t})"
        )
    cond = 1.0 / rcond
    if cond > _CONDITION_LIMIT:
        warnings.warn(
            f"residue system condition estimate {cond:.3e} exceeds "
            f"{_CONDITION_LIMIT:.0e}; results may lose significance",
            IllConditionedWarning,
            stacklevel=2,
        )

    solution, sinfo = _zgetrs(lu, piv, rhs)
    if sinfo != 0:
        raise SslabError(f"triangular solve rejected argument {-sinfo}")

    do_refine = refine if refine is not None else n >= _REFINE_THRESHOLD
    if do_refine:
        residual = rhs - matrix @ solution
        correction, rinfo = _zgetrs(lu, piv, residual)
        if rinfo == 0:
            solution = solution + correction

    return DressingSolution(
        poles=system.poles,
        kinds=system.kinds,
        top=np.ascontiguousarray(solution[:, 0]),
        bottom=np.ascontiguousarray(solution[:, 1]),
        cond_estimate=cond,
        phase=phase,
        refined=bool(do_refine),
    )


def evaluate_M(solution: DressingSolution, z: complex) -> np.ndarray:
    """Evaluate the dressing matrix M(z) = I + sum_p A_p / (z - p).

    Raises PoleEvaluationError when z sits (numerically) on a pole.
    """
    zz = complex(z)
    matrix = np.eye(2, dtype=complex)
    if solution.size == 0:
        return matrix
    delta = zz - solution.poles
    dist = np.abs(delta)
    tol = 1e-12 * max(1.0, abs(zz))
    if float(dist.min()) <= tol:
        worst = solution.poles[int(np.argmin(dist))]
        raise PoleEvaluationError(
            f"evaluation point {zz} coincides with pole {worst}"
        )
    inv = 1.0 / delta
    lower = solution.kinds == LOWER_TRIANGULAR
    matrix[0, 0] += np.sum(solution.top[lower] * inv[lower])
    matrix[1, 0] += np.sum(solution.bottom[lower] * inv[lower])
    matrix[0, 1] += np.sum(solution.top[~lower] * inv[~lower])
    matrix[1, 1] += np.sum(solution.bottom[~lower] * inv[~lower])
    return matrix


def recover_q(solution: DressingSolution) -> complex:
    """The potential q(x, t) = 2i sum_p (A_p)_{12}.

    Only upper-kind poles carry a nonzero (1, 2) entry, so this is the
    fixed-order sum of their top components.
    """
    if solution.size == 0:
        return 0.0 + 0.0j
    upper = solution.kinds == UPPER_TRIANGULAR
    return complex(2j * np.sum(solution.top[upper]))


def q_on_grid(data: SpectralData, grid: EvaluationGrid,
              threads: int | None = None,
              ) -> tuple[np.ndarray, list[tuple[int, int, str]]]:
    """Evaluate q on every grid point, in deterministic row-major order.

    Returns (values, errors): ``values`` has shape (len(t), len(x)) and
    holds NaN wherever the per-point solve failed; ``errors`` lists
    (t_index, x_index, message) for those points.  The result is
    bit-identical for any thread count because points are enumerated,
    scheduled, and reduced in a fixed order and each point's arithmetic
    is independent of the others.
    """
    system = expand_spectrum(data)
    rows, cols = grid.shape
    values = np.full((rows, cols), np.nan + 0.0j, dtype=complex)

    def solve_point(item: tuple[int, int, float, float]):
        k, i, x, t = item
        try:
            sol = solve_M(system, PhaseParams(x=x, t=t))
            return k, i, recover_q(sol), None
        except SslabError as exc:
            return k, i, None, f"{type(exc).__name__}: {exc}"

    results = ordered_map(solve_point, grid.points(), threads=threads)

    errors: list[tuple[int, int, str]] = []
    for k, i, value, message in results:
        if message is None:
            values[k, i] = value
        else:
            errors.append((k, i, message))
    return values, errors


def mkdv_residual(qgrid: np.ndarray, dx: float, dt: float) -> np.ndarray:
    """Second-order finite-difference residual of q_t + 6 q^2 q_x + q_xxx.

    ``qgrid`` has shape (nt, nx) sampling a real solution on a uniform
    grid.  Central differences are used throughout: 2-point stencils in
    t and for q_x, the 4-point antisymmetric stencil

        q_xxx ~ (q_{i+2} - 2 q_{i+1} + 2 q_{i-1} - q_{i-2}) / (2 dx^3),

    so the result lives on the interior points, shape (nt-2, nx-4).
    """
    arr = np.asarray(qgrid)
    if np.iscomplexobj(arr):
        if arr.size and float(np.max(np.abs(arr.imag))) > 1e-8:
            raise ValidationError("mkdv_residual expects a real-valued grid")
        arr = arr.real
    arr = np.asarray(arr, dtype=float)
    if arr.ndim != 2:
        raise GridTooSmall("qgrid must be 2-d with shape (nt, nx)")
    nt, nx = arr.shape
    if nx < 5 or nt < 3:
        raise GridTooSmall(
            f"need at least 5 x-points and 3 t-points, got nx={nx}, nt={nt}"
        )
    if not (dx > 0.0 and dt > 0.0 and math.isfinite(dx) and math.isfinite(dt)):
        raise ValidationError("dx and dt must be positive finite numbers")

    q_t = (arr[2:, :] - arr[:-2, :]) / (2.0 * dt)
    mid = arr[1:-1, :]
    q_x = (mid[:, 3:-1] - mid[:, 1:-3]) / (2.0 * dx)
    q_xxx = (
        mid[:, 4:] - 2.0 * mid[:, 3:-1] + 2.0 * mid[:, 1:-3] - mid[:, :-4]
    ) / (2.0 * dx**3)
    core = mid[:, 2:-2]
    return q_t[:, 2:-2] + 6.0 * core**2 * q_x + q_xxx

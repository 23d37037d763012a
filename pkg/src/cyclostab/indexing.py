"""Per-subsystem index computation.

The index of a subsystem is the scaling of the shared Mobius disk image
needed to contain its Nyquist curve, together with a winding-number check
certifying that the transformed subsystem is stable. For rational systems
the norm condition can instead be decided in state space with a Hamiltonian
eigenvalue test, with a storage-matrix certificate recovered from the
stabilizing Riccati solution when the norm has a strict margin.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import (Infeasible, MarginalCase, NotHurwitz, PoleOnAxis,
                     PointOnCurve, TransformPole, Unboundable)
from .mobius import ScaledMobiusDisk, unit_disk_image
from .systems import (StateSpace, freq_response, freq_response_grid,
                      poly_degree, poly_roots)

_REFINE_LEVELS = 4
_CHORD_RTOL = 1e-2
_DEFAULT_POINTS = 400


@dataclass(eq=False)
class NyquistCurve:
    """Frequency-response samples over [-omega_max, omega_max] plus the limit.

    Samples are ordered by frequency and conjugate-symmetric for real
    systems. The `closed` flag marks a standard contour completion through
    the limit point when winding numbers are computed.
    """

    omegas: np.ndarray
    values: np.ndarray
    limit_value: complex
    closed: bool = True

    @property
    def scale(self):
        return float(max(np.max(np.abs(self.values)), abs(self.limit_value)))

    def all_points(self):
        return np.append(self.values, self.limit_value)


def disk_transform(sys, params, gamma, omega):
    """Pull the response back into unit-disk coordinates at one frequency.

    Returns (d*G/gamma - b)/(a - c*G/gamma); its modulus is at most one
    exactly when the response lies in the scaled disk image.
    """
    g = freq_response(sys, omega)
    return _disk_transform_value(g, params, gamma)


def _disk_transform_value(g, params, gamma):
    a, b, c, d = params.a, params.b, params.c, params.d
    u = g / gamma
    den = a - c * u
    scale = abs(a) + abs(c) * abs(u)
    if abs(den) < 1e-12 * max(scale, 1e-300):
        raise TransformPole(
            "response hits the scaled disk's infinite direction")
    return (d * u - b) / den


def disk_transform_grid(sys, params, gamma, omegas):
    gv = freq_response_grid(sys, np.asarray(omegas, dtype=float))
    a, b, c, d = params.a, params.b, params.c, params.d
    u = gv / gamma
    return (d * u - b) / (a - c * u)


def default_omega_max(sys):
    rat = sys.rational
    mags = [0.0]
    if poly_degree(rat.den) >= 1:
        mags.extend(np.abs(poly_roots(rat.den)))
    if poly_degree(rat.num) >= 1 and not (rat.num.size == 1 and rat.num[0] == 0.0):
        mags.extend(np.abs(poly_roots(rat.num)))
    base = max(mags)
    if sys.delay_tau > 0.0:
        base += 1.0 / sys.delay_tau
    return 1e3 * base


def _limit_value(sys):
    rat = sys.rational
    if poly_degree(rat.num) < poly_degree(rat.den):
        return 0.0j
    if rat.num.size == 1 and rat.num[0] == 0.0:
        return 0.0j
    return complex(rat.num[-1] / rat.den[-1])


def nyquist_sample(sys, omega_max=None, n_points=_DEFAULT_POINTS):
    """Adaptively sampled Nyquist curve of a delay system.

    A log plus linear grid over [-omega_max, omega_max] is refined by
    bisection wherever the chord between neighbouring samples exceeds 1e-2
    of the curve scale, up to four levels.
    """
    rat = sys.rational
    if poly_degree(rat.den) >= 1:
        dpoles = poly_roots(rat.den)
        if np.any(np.abs(dpoles.real) <= 1e-9 * np.maximum(1.0, np.abs(dpoles))):
            raise PoleOnAxis("subsystem has an imaginary-axis pole")
    if omega_max is None:
        omega_max = default_omega_max(sys)
    if omega_max == 0.0:
        value = freq_response(sys, 0.0)
        return NyquistCurve(omegas=np.array([0.0]),
                            values=np.array([value], dtype=complex),
                            limit_value=_limit_value(sys))
    pos = np.unique(np.concatenate([
        [0.0],
        np.logspace(math.log10(omega_max) - 7.0, math.log10(omega_max),
                    n_points),
        np.linspace(0.0, omega_max, max(n_points // 4, 16)),
    ]))
    omegas = np.concatenate([-pos[::-1][:-1], pos])
    values = freq_response_grid(sys, omegas)
    limit = _limit_value(sys)
    curve_scale = max(float(np.max(np.abs(values))), abs(limit), 1e-300)
    threshold = _CHORD_RTOL * curve_scale
    for _ in range(_REFINE_LEVELS):
        chords = np.abs(np.diff(values))
        split = np.flatnonzero(chords > threshold)
        if split.size == 0:
            break
        mid = 0.5 * (omegas[split] + omegas[split + 1])
        mid_vals = freq_response_grid(sys, mid)
        omegas = np.insert(omegas, split + 1, mid)
        values = np.insert(values, split + 1, mid_vals)
    return NyquistCurve(omegas=omegas, values=values, limit_value=limit)


def _halfplane_offsets(region, points):
    n = region.inward_normal
    t = region.boundary_point.real * n.real + region.boundary_point.imag * n.imag
    s = points.real * n.real + points.imag * n.imag
    return t, s


def min_containing_gamma(curve, params, direction="auto"):
    """Boundary-contact scaling of the disk image containing the curve.

    For interior regions the infimum scaling is returned (direction
    "minimize"), for exterior regions the supremum ("maximize"); interior
    regions that exclude the origin support both directions, which is the
    mixed large-gain/small-gain situation. Every per-point containment
    condition is a quadratic (or linear) inequality in the scaling, solved
    in closed form.
    """
    region = unit_disk_image(ScaledMobiusDisk(params, 1.0))
    points = curve.all_points()
    if region.kind == "halfplane":
        return _halfplane_gamma(region, points, direction)
    c0, r0 = region.center, region.radius
    qa = abs(c0) ** 2 - r0 * r0
    qb = -2.0 * (points.real * c0.real + points.imag * c0.imag)
    qc = np.abs(points) ** 2
    if region.kind == "interior":
        lo, hi = _interior_intervals(qa, qb, qc)
    else:
        lo, hi = _exterior_intervals(qa, qb, qc)
    if np.any(np.isnan(lo)):
        raise Unboundable("some curve point is never inside the scaled region")
    direction = _resolve_direction(direction, region.kind)
    lo_req = float(np.max(lo))
    hi_cap = float(np.min(hi))
    if lo_req > hi_cap * (1.0 + 1e-12):
        raise Unboundable("no single scaling contains the whole curve")
    if direction == "minimize":
        if lo_req <= 0.0:
            raise Unboundable("curve degenerate: any scaling works")
        return lo_req
    if not math.isfinite(hi_cap) or hi_cap <= 0.0:
        raise Unboundable("no finite supremum scaling exists")
    return hi_cap


def _resolve_direction(direction, kind):
    if direction in ("minimize", "maximize"):
        return direction
    if kind == "interior":
        return "minimize"
    return "maximize"


def _interior_intervals(qa, qb, qc):
    # per-point scalings with qa*g^2 + qb*g + qc <= 0
    m = qb.size
    lo = np.zeros(m)
    hi = np.full(m, np.inf)
    if qa == 0.0:
        neg = qb < 0.0
        lo[neg] = qc[neg] / -qb[neg]
        bad = ~neg & (qc > 0.0)
        lo[bad] = np.nan
        return lo, hi
    disc = qb * qb - 4.0 * qa * qc
    if qa < 0.0:
        # roots straddle zero; containment for g >= positive root
        sq = np.sqrt(np.maximum(disc, 0.0))
        lo = (-qb + sq) / (2.0 * qa)
        lo2 = (-qb - sq) / (2.0 * qa)
        lo = np.maximum(lo, lo2)
        return np.maximum(lo, 0.0), hi
    # region excludes the origin: containment only between the roots
    bad = disc < 0.0
    sq = np.sqrt(np.maximum(disc, 0.0))
    r1 = (-qb - sq) / (2.0 * qa)
    r2 = (-qb + sq) / (2.0 * qa)
    lo = np.maximum(r1, 0.0)
    hi = r2
    lo[bad] = np.nan
    lo[r2 <= 0.0] = np.nan
    return lo, hi


def _exterior_intervals(qa, qb, qc):
    # per-point scalings with qa*g^2 + qb*g + qc >= 0
    m = qb.size
    lo = np.zeros(m)
    hi = np.full(m, np.inf)
    if qa == 0.0:
        neg = qb < 0.0
        hi[neg] = qc[neg] / -qb[neg]
        return lo, hi
    if qa > 0.0:
        raise Unboundable(
            "region scaling is degenerate: containment holds at both extremes")
    disc = qb * qb - 4.0 * qa * qc
    sq = np.sqrt(np.maximum(disc, 0.0))
    r1 = (-qb + sq) / (2.0 * qa)
    r2 = (-qb - sq) / (2.0 * qa)
    hi = np.maximum(np.maximum(r1, r2), 0.0)
    return lo, hi


def _halfplane_gamma(region, points, direction):
    t, s = _halfplane_offsets(region, points)
    tol = 1e-12 * max(1.0, abs(region.boundary_point))
    if abs(t) <= tol:
        if np.all(s >= -1e-9 * np.maximum(1.0, np.abs(points))):
            return 1.0  # boundary through the origin: any scaling works
        raise Unboundable("half-plane through origin excludes curve points")
    ratio = s / t
    if t > 0.0:
        if direction == "minimize":
            raise Unboundable("no meaningful minimal scaling for this half-plane")
        hi_cap = float(np.min(ratio))
        if hi_cap <= 0.0:
            raise Unboundable("curve leaves every scaled half-plane")
        return hi_cap
    if direction == "maximize":
        raise Unboundable("no meaningful maximal scaling for this half-plane")
    lo_req = float(np.max(ratio))
    if lo_req <= 0.0:
        raise Unboundable("curve degenerate: any scaling works")
    return lo_req


def winding_number(curve, point):
    """Signed counterclockwise encirclements of a point by the closed curve."""
    pts = curve.all_points() if curve.closed else curve.values
    scale = max(1.0, float(np.max(np.abs(pts))), abs(point))
    if np.min(np.abs(pts - point)) < 1e-9 * scale:
        raise PointOnCurve(f"point {point:g} lies on the curve")
    path = np.append(pts, pts[0])
    total = _kernels.winding_angle_sum(
        np.ascontiguousarray(path.real), np.ascontiguousarray(path.imag),
        float(np.real(point)), float(np.imag(point)))
    return int(round(total / (2.0 * math.pi)))


@dataclass(eq=False)
class IndexResult:
    """Per-subsystem index with its stability side condition."""

    gamma_k: float
    direction: str
    stability_check_passed: bool
    marginal: bool
    diagnostics: str = ""


def subsystem_index(sys, params, want="auto", omega_max=None,
                    n_points=_DEFAULT_POINTS):
    """Index of one subsystem: containment scaling plus encirclement check.

    The required winding number about the transform's pole preimage equals
    the subsystem's open-right-half-plane pole count (zero for open-loop
    stable subsystems).
    """
    curve = nyquist_sample(sys, omega_max=omega_max, n_points=n_points)
    gamma = min_containing_gamma(curve, params, direction=want)
    region = unit_disk_image(ScaledMobiusDisk(params, 1.0))
    direction = _resolve_direction(want, region.kind)
    rat = sys.rational
    unstable_poles = 0
    if poly_degree(rat.den) >= 1:
        unstable_poles = int(np.sum(poly_roots(rat.den).real > 1e-9))
    a, c = params.a, params.c
    marginal = False
    if abs(c) <= 1e-14 * max(abs(a), abs(c), 1.0):
        passed = unstable_poles == 0
        note = "transform has no finite pole direction"
        winding = None
    else:
        pole_pt = complex(a * gamma / c)
        try:
            winding = winding_number(curve, pole_pt)
            passed = winding == unstable_poles
        except PointOnCurve:
            winding = None
            passed = False
            marginal = True
        dist = float(np.min(np.abs(curve.all_points() - pole_pt)))
        if dist < 1e-6 * max(1.0, curve.scale, abs(pole_pt)):
            marginal = True
        note = f"winding {winding} about {pole_pt:.6g}, required {unstable_poles}"
    return IndexResult(gamma_k=float(gamma), direction=direction,
                       stability_check_passed=bool(passed), marginal=marginal,
                       diagnostics=note)


# ---------------------------------------------------------------------------
# state-space norm test and storage-matrix certificate
# ---------------------------------------------------------------------------

def _check_hurwitz(ss):
    if ss.order == 0:
        return
    eigs = np.linalg.eigvals(ss.A)
    if np.any(eigs.real >= -1e-9):
        raise NotHurwitz(f"A has an eigenvalue at {eigs[np.argmax(eigs.real)]:.6g}")


def _hamiltonian(ss, gamma):
    m = ss.order
    r = gamma * gamma - ss.D * ss.D
    bc = ss.B @ ss.C
    ahat = ss.A + (ss.D / r) * bc
    g = (ss.B @ ss.B.T) / r
    q = (gamma * gamma / r) * (ss.C.T @ ss.C)
    top = np.hstack([ahat, g])
    bot = np.hstack([-q, -ahat.T])
    return np.vstack([top, bot])


def _gain_reached(ss, gamma):
    # True when the norm is >= gamma (Hamiltonian has imaginary eigenvalues)
    if gamma * gamma - ss.D * ss.D <= 0.0:
        return True
    if ss.order == 0:
        return False
    eigs = np.linalg.eigvals(_hamiltonian(ss, gamma))
    return bool(np.any(np.abs(eigs.real) <= 1e-8 * np.maximum(1.0, np.abs(eigs))))


def hinf_norm(ss, tol=1e-9):
    """Peak frequency-response magnitude, by Hamiltonian bisection."""
    _check_hurwitz(ss)
    lo = abs(ss.D)
    if ss.order == 0:
        return lo
    hi = max(2.0 * lo, 1.0)
    for _ in range(60):
        if not _gain_reached(ss, hi):
            break
        hi *= 2.0
    else:
        raise Unboundable("no finite norm bracket found")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _gain_reached(ss, mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def hinf_le_one(ss):
    """Whether the peak response magnitude is at most one."""
    return hinf_norm(ss) <= 1.0


def bounded_real_block(ss, p):
    """The storage-matrix block whose negative semidefiniteness is certified."""
    a, b, c, d = ss.A, ss.B, ss.C, ss.D
    top = np.hstack([a.T @ p + p @ a + c.T @ c, p @ b + c.T * d])
    bot = np.hstack([(p @ b + c.T * d).T, np.array([[d * d - 1.0]])])
    return np.vstack([top, bot])


def kyp_certificate(ss, margin=1e-6):
    """Positive semidefinite storage matrix certifying the unit norm bound.

    Recovered from the stabilizing Riccati solution via the stable invariant
    subspace of the Hamiltonian.
    """
    norm = hinf_norm(ss)
    if norm > 1.0:
        raise Infeasible(f"norm {norm:.9g} exceeds one")
    if norm > 1.0 - margin:
        raise MarginalCase(
            f"norm {norm:.9g} within {margin:g} of one; certificate ill-conditioned")
    m = ss.order
    if m == 0:
        return np.zeros((0, 0))
    ham = _hamiltonian(ss, 1.0)
    t, z, sdim = scipy.linalg.schur(ham, output="real", sort="lhp")
    if sdim != m:
        raise MarginalCase("stable invariant subspace has wrong dimension")
    x1 = z[:m, :m]
    x2 = z[m:, :m]
    p = x2 @ np.linalg.inv(x1)
    return 0.5 * (p + p.T)

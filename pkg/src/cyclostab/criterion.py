"""Core algebra of the generalized secant criterion for cyclic loops.

The loop couples n scalar subsystems through the cyclic shift matrix S
(subdiagonal identity, -1 in the top-right corner). Robustness of the loop
against subsystems whose frequency responses live in scaled Mobius disks
reduces to the sign of a single quadratic in the geometric mean of the
per-subsystem scalings, evaluated at two cosine extremes. This module
provides that test, the admissible-scaling intervals it defines, the exact
structured-singular-value computation it rests on, and the explicit
counterexample constructions available whenever the test fails.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence, PoleOnSpectrum
from .mobius import INF, MobiusParams, inverse_map, is_inf

_DSCALE_TOL = 1e-14
_DSCALE_CAP = 10_000


def check_gammas(gammas):
    g = np.asarray(gammas, dtype=float)
    if g.ndim != 1 or g.size < 2:
        raise ValueError("need an ordered list of at least two scalings")
    if not np.all(g > 0.0):
        raise ValueError("every scaling must be strictly positive")
    return g


def cyclic_matrix(n):
    """The n-by-n cyclic shift with a sign inversion closing the loop."""
    if n < 2:
        raise ValueError("cyclic loop needs n >= 2")
    s = np.zeros((n, n))
    s[1:, :-1] = np.eye(n - 1)
    s[0, -1] = -1.0
    return s


def scaled_cyclic(gammas):
    """diag(gammas) @ cyclic_matrix(n)."""
    g = check_gammas(gammas)
    return np.diag(g) @ cyclic_matrix(g.size)


def beta_values(n):
    """The extreme cosines over the loop's spectrum angles."""
    if n < 2:
        raise ValueError("cyclic loop needs n >= 2")
    return (math.cos(math.pi / n),
            math.cos(math.pi * (2 * math.ceil(n / 2) - 1) / n))


def geometric_mean(gammas):
    g = check_gammas(gammas)
    return float(math.exp(np.mean(np.log(g))))


def _quadratic_coeffs(params, beta):
    a, b, c, d = params.a, params.b, params.c, params.d
    return (b * b - a * a, 2.0 * beta * (a * c - b * d), d * d - c * c)


def inequality_values(params, n, gamma_bar):
    """The criterion quadratic evaluated at both cosine extremes."""
    vals = []
    for beta in beta_values(n):
        qa, qb, qc = _quadratic_coeffs(params, beta)
        vals.append(qa * gamma_bar * gamma_bar + qb * gamma_bar + qc)
    return tuple(vals)


def inequality_holds(params, n, gamma_bar):
    """Strict positivity of the quadratic at both cosine extremes."""
    if not gamma_bar > 0.0:
        raise ValueError("gamma_bar must be positive")
    return all(v > 0.0 for v in inequality_values(params, n, gamma_bar))


def inequality_marginal(params, n, gamma_bar, rtol=1e-9):
    """True when any quadratic sits within rtol of zero at its own scale."""
    for beta in beta_values(n):
        qa, qb, qc = _quadratic_coeffs(params, beta)
        val = qa * gamma_bar * gamma_bar + qb * gamma_bar + qc
        scale = abs(qa) * gamma_bar * gamma_bar + abs(qb) * gamma_bar + abs(qc)
        if abs(val) <= rtol * max(scale, 1e-300):
            return True
    return False


@dataclass(frozen=True)
class GammaIntervalSet:
    """Disjoint open intervals of admissible geometric means."""

    intervals: tuple

    def __post_init__(self):
        last_hi = -math.inf
        for lo, hi in self.intervals:
            if not (0.0 <= lo < hi):
                raise ValueError(f"bad interval ({lo}, {hi})")
            if lo < last_hi:
                raise ValueError("intervals must be sorted and disjoint")
            last_hi = hi

    def contains(self, x):
        return any(lo < x < hi for lo, hi in self.intervals)

    @property
    def empty(self):
        return not self.intervals

    def to_jsonable(self):
        return [[lo, None if math.isinf(hi) else hi] for lo, hi in self.intervals]


def _positive_set(qa, qb, qc):
    # open intervals of x > 0 where qa*x^2 + qb*x + qc > 0
    inf = math.inf
    if qa == 0.0:
        if qb == 0.0:
            return [(0.0, inf)] if qc > 0.0 else []
        r = -qc / qb
        if qb > 0.0:
            return [(max(r, 0.0), inf)]
        return [(0.0, r)] if r > 0.0 else []
    disc = qb * qb - 4.0 * qa * qc
    if qa > 0.0:
        if disc < 0.0:
            return [(0.0, inf)]
        if disc == 0.0:
            root = -qb / (2.0 * qa)
            return [(0.0, root), (root, inf)] if root > 0.0 else [(0.0, inf)]
        r1, r2 = _quad_roots(qa, qb, qc, disc)
        out = []
        if r1 > 0.0:
            out.append((0.0, r1))
        out.append((max(r2, 0.0), inf))
        return out
    if disc <= 0.0:
        return []
    r1, r2 = _quad_roots(qa, qb, qc, disc)
    return [(max(r1, 0.0), r2)] if r2 > 0.0 else []


def _quad_roots(qa, qb, qc, disc):
    # numerically stable pair of real roots, sorted ascending
    sq = math.sqrt(disc)
    q = -0.5 * (qb + math.copysign(sq, qb))
    if q == 0.0:
        r1 = r2 = 0.0
    else:
        r1, r2 = q / qa, qc / q
    return (r1, r2) if r1 <= r2 else (r2, r1)


def _intersect(first, second):
    out = []
    i = j = 0
    while i < len(first) and j < len(second):
        lo = max(first[i][0], second[j][0])
        hi = min(first[i][1], second[j][1])
        if lo < hi:
            out.append((lo, hi))
        if first[i][1] <= second[j][1]:
            i += 1
        else:
            j += 1
    return out


def admissible_gamma_set(params, n):
    """All positive geometric means satisfying the criterion, in closed form."""
    sets = []
    for beta in beta_values(n):
        sets.append(_positive_set(*_quadratic_coeffs(params, beta)))
    return GammaIntervalSet(tuple(_intersect(*sets)))


def scaled_cyclic_spectrum(gammas):
    """Eigenvalues of the scaled cyclic shift: gbar * exp(i*pi*(2k-1)/n)."""
    g = check_gammas(gammas)
    n = g.size
    gbar = geometric_mean(g)
    k = np.arange(1, n + 1)
    return gbar * np.exp(1j * np.pi * (2 * k - 1) / n)


def _pole_transform_vals(params, lams):
    # (-a*lam + c) / (-b*lam + d) per spectrum point; None marks a pole
    a, b, c, d = params.a, params.b, params.c, params.d
    out = []
    for lam in lams:
        den = -b * lam + d
        if abs(den) < 1e-12:
            out.append(None)
        else:
            out.append((-a * lam + c) / den)
    return out


def mu_cyclic(params, gammas):
    """Exact structured singular value of the transformed loop matrix.

    Equals the spectral radius, evaluated directly on the closed-form
    spectrum of the scaled cyclic shift.
    """
    vals = _pole_transform_vals(params, scaled_cyclic_spectrum(gammas))
    if any(v is None for v in vals):
        raise PoleOnSpectrum("transform pole lies on the loop spectrum")
    return float(max(abs(v) for v in vals))


def transformed_loop_matrix(params, gammas):
    """Dense (-a*M + c*I)(-b*M + d*I)^{-1} for M the scaled cyclic shift."""
    m = scaled_cyclic(gammas)
    n = m.shape[0]
    a, b, c, d = params.a, params.b, params.c, params.d
    lhs = -a * m + c * np.eye(n)
    rhs = -b * m + d * np.eye(n)
    cond = np.linalg.cond(rhs)
    if not np.isfinite(cond) or cond > 1e14:
        raise PoleOnSpectrum("transform pole lies on the loop spectrum")
    return np.linalg.solve(rhs.T, lhs.T).T


def dscale_map(gammas, diag):
    """One application of the scaling map D -> G S D S^T G / trace(...)."""
    g = check_gammas(gammas)
    shifted = np.roll(np.asarray(diag, dtype=float), 1)
    raw = g * g * shifted
    return raw / raw.sum()


def dscale_fixed_point(gammas):
    """Diagonal of the unit-trace positive fixed point of the scaling map.

    Plain iteration of the map cycles (its linearization has n eigenvalues
    of equal modulus), so each step averages the current iterate with its
    image; the averaged map has the same fixed point and contracts.
    """
    g = check_gammas(gammas)
    n = g.size
    d = np.full(n, 1.0 / n)
    best = None
    best_res = math.inf
    for _ in range(_DSCALE_CAP):
        hd = dscale_map(g, d)
        res = float(np.max(np.abs(hd - d)))
        if res < best_res:
            best, best_res = d, res
        if res < _DSCALE_TOL:
            return d
        d = 0.5 * (d + hd)
    if best_res <= 1e-12:
        return best
    raise NonConvergence(
        f"scaling fixed point stalled at residual {best_res:.3e}")


def interconnection_matrix(x, y):
    """Assemble [[diag(x), diag(y)], [I, S]] for the cyclic loop."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("x and y must be equal-length vectors, n >= 2")
    n = x.size
    r = np.zeros((2 * n, 2 * n), dtype=complex)
    r[:n, :n] = np.diag(x)
    r[:n, n:] = np.diag(y)
    r[n:, :n] = np.eye(n)
    r[n:, n:] = cyclic_matrix(n)
    return r


def boundary_pairs(params, gammas, zs):
    """Projective pairs (x, y) with x/y on each scaled disk boundary.

    zs is an (m, n) array of unit-modulus points; row j yields
    x[j, k] = gamma_k*(a*z + b) and y[j, k] = c*z + d, avoiding the division
    that would blow up at the pole of the map.
    """
    g = check_gammas(gammas)
    a, b, c, d = params.a, params.b, params.c, params.d
    zs = np.asarray(zs, dtype=complex)
    xs = g[None, :] * (a * zs + b)
    ys = c * zs + d
    return xs, ys


def pair_scale(xs, ys):
    """Per-row magnitude scale: the product of the (x, y) row norms."""
    rows = np.hypot(np.abs(xs), np.abs(ys))
    return np.prod(rows, axis=-1)


@dataclass(frozen=True)
class SingularityWitness:
    """Disk-feasible pairs making the interconnection matrix singular."""

    x: tuple
    y: tuple
    det_value: complex


def singularity_witness(params, gammas):
    """A singular instance whenever the criterion fails; None when it holds.

    The construction is deterministic: pick the spectrum point where the
    transformed loop gain peaks at or above one, choose the scalar
    uncertainty cancelling it, and read the pairs off the factorization of
    the interconnection matrix.
    """
    g = check_gammas(gammas)
    n = g.size
    gbar = geometric_mean(g)
    if inequality_holds(params, n, gbar):
        return None
    vals = _pole_transform_vals(params, scaled_cyclic_spectrum(g))
    delta = None
    best = -1.0
    for v in vals:
        if v is None:
            delta = 0.0 + 0.0j  # transform pole: zero uncertainty already singular
            break
        if abs(v) > best:
            best = abs(v)
            delta = -1.0 / v
    a, b, c, d = params.a, params.b, params.c, params.d
    x = g * (a * delta + b)
    y = np.full(n, c * delta + d, dtype=complex)
    det_value = complex(np.linalg.det(interconnection_matrix(x, y)))
    return SingularityWitness(tuple(x), tuple(y), det_value)


@dataclass(frozen=True)
class CounterexampleConstruction:
    """Cubic subsystem polynomials driving a closed-loop root to s = i.

    Per subsystem k the pair (num_k, den_k) stays inside the k-th closed
    scaled disk on the whole closed right half-plane, yet the loop's
    characteristic polynomial vanishes at s = i. Coefficients ascending.
    """

    alphas: tuple
    thetas: tuple
    phis: tuple
    numerators: tuple
    denominators: tuple
    char_poly: tuple
    root_near_i: complex


def _allpass_cubed(alpha, phi):
    # alpha*(1 - phi*s)^3 and (1 + phi*s)^3, ascending coefficients
    p3 = phi ** 3
    p2 = phi * phi
    num = alpha * np.array([1.0, -3.0 * phi, 3.0 * p2, -p3])
    den = np.array([1.0, 3.0 * phi, 3.0 * p2, p3])
    return num, den


def destabilizing_subsystems(params, gammas):
    """Explicit destabilizing subsystems when the criterion fails.

    Returns None when the criterion holds (by the equivalence, no such
    subsystems exist). Angles are extracted from the singularity witness
    through the inverse map; a zero modulus is perturbed so the all-pass
    construction stays well defined.
    """
    witness = singularity_witness(params, gammas)
    if witness is None:
        return None
    g = check_gammas(gammas)
    a, b, c, d = params.a, params.b, params.c, params.d
    alphas, thetas, phis, nums, dens = [], [], [], [], []
    for k, (xk, yk) in enumerate(zip(witness.x, witness.y)):
        w = INF if yk == 0 else xk / yk
        z = inverse_map(params, g[k], w)
        if is_inf(z):
            z = complex(-d / c)
        alpha = min(max(abs(z), 1e-12), 1.0)
        theta = cmath.phase(z) if abs(z) > 0 else 0.0
        # a vanishing angle takes the full-turn branch: phi = tan(pi/3) > 0
        # keeps the all-pass factor nondegenerate and leaves z(i) unchanged
        if theta >= -1e-9:
            theta = -2.0 * math.pi
        phi = math.tan(-theta / 6.0)
        base_n, base_m = _allpass_cubed(alpha, phi)
        nums.append(tuple(g[k] * a * base_n + g[k] * b * base_m))
        dens.append(tuple(c * base_n + d * base_m))
        alphas.append(alpha)
        thetas.append(theta)
        phis.append(phi)
    prod_m = np.array([1.0])
    prod_n = np.array([1.0])
    for nk, mk in zip(nums, dens):
        prod_n = np.convolve(prod_n, np.asarray(nk))
        prod_m = np.convolve(prod_m, np.asarray(mk))
    width = max(prod_n.size, prod_m.size)
    char = np.zeros(width)
    char[:prod_m.size] += prod_m
    char[:prod_n.size] += prod_n
    roots = np.polynomial.polynomial.polyroots(char)
    root = complex(roots[np.argmin(np.abs(roots - 1j))])
    return CounterexampleConstruction(
        alphas=tuple(alphas), thetas=tuple(thetas), phis=tuple(phis),
        numerators=tuple(nums), denominators=tuple(dens),
        char_poly=tuple(char), root_near_i=root)

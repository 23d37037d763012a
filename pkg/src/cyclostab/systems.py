"""Subsystem dynamics: polynomials, transfer functions, delays, realizations.

Polynomials are numpy arrays of real coefficients in ascending degree. A
RationalSystem cancels exact common factors at construction and rejects any
common closed-right-half-plane root, so downstream code can rely on the
num/den pair being coprime where it matters. Delay systems carry
frequency-response semantics only; their closed-loop pole analysis is out
of scope here and handled by the winding-number tests in `indexing`.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (CoprimalityError, DelayUnsupported, ImproperSystem,
                     PoleOnAxis, ZeroPolynomial)
from .mobius import MobiusParams

_STABILITY_MARGIN = 1e-9
_GCD_RTOL = 1e-10


def poly_trim(coeffs):
    """Drop trailing (highest-degree) zeros; the zero polynomial is [0.]."""
    c = np.atleast_1d(np.asarray(coeffs, dtype=float))
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return np.zeros(1)
    return c[: nz[-1] + 1].copy()


def poly_degree(coeffs):
    c = poly_trim(coeffs)
    return 0 if c.size == 1 and c[0] == 0.0 else c.size - 1


def poly_eval(coeffs, s):
    return np.polynomial.polynomial.polyval(s, np.asarray(coeffs, dtype=float))


def poly_mul(p, q):
    return np.convolve(np.asarray(p, dtype=float), np.asarray(q, dtype=float))


def poly_add(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    out = np.zeros(max(p.size, q.size))
    out[: p.size] += p
    out[: q.size] += q
    return out


def poly_roots(coeffs):
    """All roots with multiplicity, via companion-matrix eigenvalues."""
    c = poly_trim(coeffs)
    if c.size == 1:
        if c[0] == 0.0:
            raise ZeroPolynomial("the zero polynomial has no root set")
        return np.array([], dtype=complex)
    return np.polynomial.polynomial.polyroots(c)


def _match_common_roots(rn, rd, rtol=_GCD_RTOL):
    used = np.zeros(rd.size, dtype=bool)
    pairs = []
    for i, r in enumerate(rn):
        best = -1
        best_dist = np.inf
        for j in range(rd.size):
            if used[j]:
                continue
            dist = abs(r - rd[j])
            if dist < best_dist:
                best, best_dist = j, dist
        if best >= 0 and best_dist <= rtol * max(1.0, abs(r)):
            used[best] = True
            pairs.append((i, best))
    return pairs


@dataclass(eq=False)
class RationalSystem:
    """Real-rational transfer function num(s)/den(s), ascending coefficients."""

    num: np.ndarray
    den: np.ndarray

    def __post_init__(self):
        num = poly_trim(self.num)
        den = poly_trim(self.den)
        if den.size == 1 and den[0] == 0.0:
            raise ZeroPolynomial("denominator must not be identically zero")
        num, den = _cancel_common(num, den)
        self.num = num
        self.den = den

    def evaluate(self, s):
        return poly_eval(self.num, s) / poly_eval(self.den, s)

    def poles(self):
        if poly_degree(self.den) == 0:
            return np.array([], dtype=complex)
        return poly_roots(self.den)

    def zeros(self):
        if poly_degree(self.num) == 0:
            return np.array([], dtype=complex)
        if self.num.size == 1 and self.num[0] == 0.0:
            return np.array([], dtype=complex)
        return poly_roots(self.num)

    @property
    def proper(self):
        return poly_degree(self.num) <= poly_degree(self.den)


def _cancel_common(num, den):
    if num.size == 1 and num[0] == 0.0:
        # zero numerator: the pair is degenerate wherever den also vanishes
        if den.size > 1:
            rd = poly_roots(den)
            if np.any(rd.real >= -_STABILITY_MARGIN):
                raise CoprimalityError(
                    "zero numerator with unstable denominator root")
        return num, den
    if num.size == 1 or den.size == 1:
        return num, den
    rn = poly_roots(num)
    rd = poly_roots(den)
    pairs = _match_common_roots(rn, rd)
    if not pairs:
        return num, den
    common = [0.5 * (rn[i] + rd[j]) for i, j in pairs]
    if any(r.real >= -_STABILITY_MARGIN for r in common):
        raise CoprimalityError(
            f"common closed-right-half-plane root near {max(common, key=lambda r: r.real):.6g}")
    keep_n = np.delete(rn, [i for i, _ in pairs])
    keep_d = np.delete(rd, [j for _, j in pairs])
    num2 = num[-1] * np.polynomial.polynomial.polyfromroots(keep_n)
    den2 = den[-1] * np.polynomial.polynomial.polyfromroots(keep_d)
    return poly_trim(num2.real), poly_trim(den2.real)


@dataclass(eq=False)
class DelaySystem:
    """Rational transfer function times a pure delay exp(-tau*s)."""

    rational: RationalSystem
    delay_tau: float = 0.0

    def __post_init__(self):
        self.delay_tau = float(self.delay_tau)
        if self.delay_tau < 0.0:
            raise ValueError("delay must be nonnegative")

    @classmethod
    def gain(cls, k):
        return cls(RationalSystem(np.array([float(k)]), np.array([1.0])), 0.0)

    @classmethod
    def from_coeffs(cls, num, den, tau=0.0):
        return cls(RationalSystem(np.asarray(num, float), np.asarray(den, float)), tau)


def freq_response(sys, omega):
    """G(i*omega), including the delay phase factor."""
    rat = sys.rational
    dv = poly_eval(rat.den, 1j * omega)
    scale = poly_eval(np.abs(rat.den), abs(omega))
    if abs(dv) < 1e-12 * max(scale, 1e-300):
        raise PoleOnAxis(f"denominator vanishes at omega = {omega:g}")
    val = poly_eval(rat.num, 1j * omega) / dv
    if sys.delay_tau != 0.0:
        val = val * np.exp(-1j * sys.delay_tau * omega)
    return complex(val)


def freq_response_grid(sys, omegas):
    """Vectorized frequency response over a grid (no axis-pole check)."""
    rat = sys.rational
    return _kernels.eval_rational_grid(
        np.ascontiguousarray(rat.num, dtype=np.float64),
        np.ascontiguousarray(rat.den, dtype=np.float64),
        float(sys.delay_tau),
        np.ascontiguousarray(omegas, dtype=np.float64))


def is_stable(sys):
    """All denominator roots strictly in the open left half-plane."""
    if poly_degree(sys.den) == 0:
        return True
    return bool(np.all(poly_roots(sys.den).real < -_STABILITY_MARGIN))


@dataclass(eq=False)
class Interconnection:
    """Cyclic loop of n delay systems with the disk-family map they share."""

    subsystems: tuple
    mobius: MobiusParams

    def __post_init__(self):
        self.subsystems = tuple(self.subsystems)
        if len(self.subsystems) < 2:
            raise ValueError("cyclic loop needs at least two subsystems")


def closed_loop_char_poly(inter, factors=None):
    """prod(den_k) + prod(num_k), the loop's characteristic polynomial."""
    if factors is None:
        for sub in inter.subsystems:
            if sub.delay_tau != 0.0:
                raise DelayUnsupported(
                    "polynomial closed-loop analysis needs delay-free subsystems")
        factors = [(sub.rational.num, sub.rational.den)
                   for sub in inter.subsystems]
    prod_n = np.array([1.0])
    prod_m = np.array([1.0])
    for nk, mk in factors:
        prod_n = poly_mul(prod_n, nk)
        prod_m = poly_mul(prod_m, mk)
    return poly_trim(poly_add(prod_m, prod_n))


def closed_loop_stable(inter):
    """Verdict {stable, unstable, marginal} from the characteristic roots."""
    char = closed_loop_char_poly(inter)
    if poly_degree(char) == 0:
        return "stable" if char[0] != 0.0 else "marginal"
    roots = poly_roots(char)
    if np.any(roots.real > _STABILITY_MARGIN):
        return "unstable"
    if np.any(np.abs(roots.real) <= _STABILITY_MARGIN):
        return "marginal"
    return "stable"


@dataclass(eq=False)
class StateSpace:
    """Realization (A, B, C, D) of a proper scalar transfer function."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: float

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        if self.A.size == 0:
            self.A = np.zeros((0, 0))
        self.B = np.asarray(self.B, dtype=float).reshape(self.A.shape[0], 1)
        self.C = np.asarray(self.C, dtype=float).reshape(1, self.A.shape[0])
        self.D = float(self.D)
        if self.A.shape[0] != self.A.shape[1]:
            raise ValueError("A must be square")

    @property
    def order(self):
        return self.A.shape[0]

    def evaluate(self, s):
        if self.order == 0:
            return complex(self.D)
        x = np.linalg.solve(s * np.eye(self.order) - self.A, self.B)
        return complex((self.C @ x)[0, 0] + self.D)


def realize(sys):
    """Controllable canonical realization of a proper rational system.

    Common factors were cancelled at construction, so the canonical form is
    already minimal.
    """
    num, den = sys.num, sys.den
    if poly_degree(num) > poly_degree(den):
        raise ImproperSystem("state-space form needs deg num <= deg den")
    lead = den[-1]
    den_m = den / lead
    num_m = num / lead
    m = den_m.size - 1
    if m == 0:
        return StateSpace(np.zeros((0, 0)), np.zeros((0, 1)),
                          np.zeros((1, 0)), num_m[0])
    if num_m.size == den_m.size:
        d = num_m[-1]
        rem = num_m - d * den_m
    else:
        d = 0.0
        rem = num_m
    rem = rem[:m]
    rem = np.pad(rem, (0, m - rem.size))
    a = np.zeros((m, m))
    a[:-1, 1:] = np.eye(m - 1)
    a[-1, :] = -den_m[:m]
    b = np.zeros((m, 1))
    b[-1, 0] = 1.0
    c = rem[:m].reshape(1, m)
    return StateSpace(a, b, c, d)

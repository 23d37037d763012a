"""Geometry of scaled Mobius images of the closed unit disk.

A map f(z) = (a*z + b)/(c*z + d) with real coefficients and ad - bc != 0
sends the closed unit disk to a generalized disk: the interior of a circle,
the exterior of a circle (including the point at infinity), or a closed
half-plane. Everything here is exact closed-form geometry; the point at
infinity is carried explicitly by the INF sentinel rather than by inf/nan
arithmetic inside complex numbers.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMobius

# relative tolerance for |c| == |d| (half-plane) detection; the circle radius
# blows up as |d| -> |c|, poisoning containment arithmetic
HALFPLANE_RTOL = 1e-12

# default relative slack for closed-region membership
MEMBERSHIP_RTOL = 1e-9


class _Infinity:
    """The point at infinity on the extended complex plane."""

    __slots__ = ()

    def __repr__(self):
        return "INF"


INF = _Infinity()


def is_inf(w):
    return isinstance(w, _Infinity)


@dataclass(frozen=True)
class MobiusParams:
    """The four reals (a, b, c, d) of f(z) = (a*z + b)/(c*z + d)."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        a, b, c, d = float(self.a), float(self.b), float(self.c), float(self.d)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        scale = max(abs(a), abs(b), abs(c), abs(d))
        if abs(a * d - b * c) <= 1e-12 * scale * scale:
            raise DegenerateMobius(
                f"ad - bc = {a * d - b * c:g} is degenerate for ({a}, {b}, {c}, {d})")

    @property
    def det(self):
        return self.a * self.d - self.b * self.c


@dataclass(frozen=True)
class ScaledMobiusDisk:
    """Image of the closed unit disk under z -> gamma*(a*z+b)/(c*z+d)."""

    params: MobiusParams
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", float(self.gamma))
        if not self.gamma > 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class GeneralizedDisk:
    """Interior/exterior of a circle, or a closed half-plane.

    Interior and exterior kinds use (center, radius); the half-plane kind
    uses a boundary point plus an inward unit normal, which avoids
    vertical-line special cases. Exterior and half-plane kinds contain the
    point at infinity.
    """

    kind: str  # "interior" | "exterior" | "halfplane"
    center: complex = 0j
    radius: float = 0.0
    boundary_point: complex = 0j
    inward_normal: complex = 0j

    def contains_infinity(self):
        return self.kind != "interior"


def mobius_eval(params, gamma, z):
    """Evaluate gamma*(a*z + b)/(c*z + d); INF at the pole and for z = INF."""
    a, b, c, d = params.a, params.b, params.c, params.d
    if is_inf(z):
        if c == 0.0:
            return INF
        return complex(gamma * a / c)
    den = c * z + d
    if den == 0.0:
        return INF
    return gamma * (a * z + b) / den


def inverse_map(params, gamma, w):
    """Solve mobius_eval(params, gamma, z) = w for z."""
    a, b, c, d = params.a, params.b, params.c, params.d
    if is_inf(w):
        if c == 0.0:
            return INF
        return complex(-d / c)
    u = w / gamma
    den = -c * u + a
    if den == 0.0:
        return INF
    return (d * u - b) / den


def unit_disk_image(disk):
    """Closed-form image of the closed unit disk under a scaled Mobius map."""
    p = disk.params
    g = disk.gamma
    a, b, c, d = p.a, p.b, p.c, p.d
    if abs(abs(c) - abs(d)) <= HALFPLANE_RTOL * max(abs(c), abs(d)):
        return _halfplane_image(p, g)
    denom = d * d - c * c
    center = complex(g * (b * d - a * c) / denom)
    radius = g * abs(a * d - b * c) / abs(denom)
    kind = "interior" if abs(c) < abs(d) else "exterior"
    return GeneralizedDisk(kind=kind, center=center, radius=radius)


def _halfplane_image(params, gamma):
    # the unit-circle pole sits at z = -d/c = +-1; the finite one of f(+-1)
    # anchors the boundary line
    a, b, c, d = params.a, params.b, params.c, params.d
    if abs(c + d) > abs(c - d):
        anchor_z = 1.0
        other_zs = (1j, -1j)
    else:
        anchor_z = -1.0
        other_zs = (1j, -1j)
    p0 = mobius_eval(params, gamma, anchor_z)
    # a second boundary point fixes the line direction; pick the farther of
    # the two candidates for conditioning
    cands = [mobius_eval(params, gamma, z) for z in other_zs]
    p1 = max(cands, key=lambda w: abs(w - p0))
    direction = (p1 - p0) / abs(p1 - p0)
    normal = 1j * direction
    interior_sample = mobius_eval(params, gamma, 0.0)  # image of the disk center
    if (interior_sample.real - p0.real) * normal.real + \
            (interior_sample.imag - p0.imag) * normal.imag < 0.0:
        normal = -normal
    return GeneralizedDisk(kind="halfplane", boundary_point=p0,
                           inward_normal=normal)


def disk_contains(disk, w, rtol=MEMBERSHIP_RTOL):
    """Closed-region membership with relative slack rtol on the boundary."""
    if is_inf(w):
        return disk.contains_infinity()
    if disk.kind == "interior":
        slack = rtol * max(1.0, disk.radius, abs(w - disk.center))
        return abs(w - disk.center) <= disk.radius + slack
    if disk.kind == "exterior":
        slack = rtol * max(1.0, disk.radius, abs(w - disk.center))
        return abs(w - disk.center) >= disk.radius - slack
    n = disk.inward_normal
    offset = (w.real - disk.boundary_point.real) * n.real + \
        (w.imag - disk.boundary_point.imag) * n.imag
    slack = rtol * max(1.0, abs(w), abs(disk.boundary_point))
    return offset >= -slack


def boundary_samples(disk_spec, count):
    """Images of count equispaced unit-circle points (finite ones only)."""
    thetas = np.linspace(0.0, 2.0 * np.pi, count, endpoint=False)
    out = []
    for t in thetas:
        w = mobius_eval(disk_spec.params, disk_spec.gamma, np.exp(1j * t))
        if not is_inf(w):
            out.append(w)
    return np.array(out, dtype=np.complex128)

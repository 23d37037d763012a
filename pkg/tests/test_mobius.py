import numpy as np
import pytest

from cyclostab import (INF, DegenerateMobius, GeneralizedDisk, MobiusParams,
                       ScaledMobiusDisk, disk_contains, inverse_map, is_inf,
                       mobius_eval, unit_disk_image)
from cyclostab.mobius import boundary_samples


def fit_circle(points):
    """Least-squares circle through complex samples: |w|^2 = 2*cx*x + 2*cy*y + t."""
    a = np.column_stack([2 * points.real, 2 * points.imag,
                         np.ones(points.size)])
    b = np.abs(points) ** 2
    (cx, cy, t), *_ = np.linalg.lstsq(a, b, rcond=None)
    return complex(cx, cy), np.sqrt(t + cx * cx + cy * cy)


def random_params(rng, halfplane_ok=False):
    while True:
        a, b, c, d = rng.uniform(-3, 3, size=4)
        scale = max(abs(a), abs(b), abs(c), abs(d))
        if abs(a * d - b * c) < 1e-3 * scale * scale:
            continue
        if not halfplane_ok and abs(abs(c) - abs(d)) < 1e-6 * max(abs(c), abs(d)):
            continue
        return MobiusParams(a, b, c, d)


class TestMobiusEval:
    def test_identity(self):
        p = MobiusParams(1, 0, 0, 1)
        assert mobius_eval(p, 1.0, 0.5j) == 0.5j

    def test_affine(self):
        p = MobiusParams(1, 1, 0, 2)
        assert mobius_eval(p, 1.0, 1.0) == pytest.approx(1.0)

    def test_pole_maps_to_infinity(self):
        p = MobiusParams(0, 1, 1, 0)
        assert is_inf(mobius_eval(p, 2.0, 0.0))

    def test_infinity_argument(self):
        p = MobiusParams(2, 1, 1, 3)
        assert mobius_eval(p, 1.0, INF) == pytest.approx(2.0)

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateMobius):
            MobiusParams(1, 2, 2, 4)


class TestUnitDiskImage:
    def test_scaled_identity(self):
        img = unit_disk_image(ScaledMobiusDisk(MobiusParams(1, 0, 0, 1), 3.0))
        assert img.kind == "interior"
        assert img.center == 0
        assert img.radius == pytest.approx(3.0)

    def test_secant_disk_against_sampling_oracle(self):
        disk = ScaledMobiusDisk(MobiusParams(1, 1, 0, 2), 1.0)
        img = unit_disk_image(disk)
        center, radius = fit_circle(boundary_samples(disk, 10_000))
        assert img.kind == "interior"
        assert img.center == pytest.approx(center, abs=1e-9)
        assert img.radius == pytest.approx(radius, abs=1e-9)
        assert img.center == pytest.approx(0.5)
        assert img.radius == pytest.approx(0.5)
        # the image of the disk center must land inside
        assert disk_contains(img, mobius_eval(disk.params, 1.0, 0.0))

    def test_reference_disk_against_sampling_oracle(self):
        disk = ScaledMobiusDisk(MobiusParams(2, 1, 1, 3), 1.0)
        img = unit_disk_image(disk)
        center, radius = fit_circle(boundary_samples(disk, 10_000))
        assert img.center == pytest.approx(center, abs=1e-9)
        assert img.radius == pytest.approx(radius, abs=1e-9)
        assert img.center == pytest.approx(1 / 8)
        assert img.radius == pytest.approx(5 / 8)
        # scaling this disk by 16/3 must reach the point 4
        scaled_edge = (16 / 3) * (img.center + img.radius)
        assert scaled_edge == pytest.approx(4.0, abs=1e-12)

    def test_boundary_samples_land_on_boundary(self, rng):
        for _ in range(50):
            p = random_params(rng)
            disk = ScaledMobiusDisk(p, float(rng.uniform(0.1, 5)))
            img = unit_disk_image(disk)
            pts = boundary_samples(disk, 64)
            dist = np.abs(np.abs(pts - img.center) - img.radius)
            scale = max(img.radius, abs(img.center), 1.0)
            assert np.max(dist) < 1e-9 * scale

    def test_kind_trichotomy(self, rng):
        for _ in range(200):
            p = random_params(rng, halfplane_ok=True)
            img = unit_disk_image(ScaledMobiusDisk(p, 1.0))
            if abs(abs(p.c) - abs(p.d)) <= 1e-12 * max(abs(p.c), abs(p.d)):
                assert img.kind == "halfplane"
            elif abs(p.c) > abs(p.d):
                assert img.kind == "exterior"
            else:
                assert img.kind == "interior"

    def test_halfplane_geometry(self):
        # pole of the map at z = +1 puts the unit circle image on a line
        p = MobiusParams(1, 1, -1, 1)
        disk = ScaledMobiusDisk(p, 1.0)
        img = unit_disk_image(disk)
        assert img.kind == "halfplane"
        n = img.inward_normal
        assert abs(n) == pytest.approx(1.0)
        for w in boundary_samples(disk, 200):
            offset = (w.real - img.boundary_point.real) * n.real + \
                (w.imag - img.boundary_point.imag) * n.imag
            assert abs(offset) < 1e-7 * max(1.0, abs(w))
        inner = mobius_eval(p, 1.0, 0.0)
        assert disk_contains(img, inner)
        assert disk_contains(img, INF)


class TestDiskContains:
    def test_interior_boundary_point(self):
        img = GeneralizedDisk(kind="interior", center=0.5 + 0j, radius=0.5)
        assert disk_contains(img, 1.0 + 0j)

    def test_exterior_excludes_inside(self):
        img = GeneralizedDisk(kind="exterior", center=0j, radius=1.0)
        assert not disk_contains(img, 0.5 + 0j)
        assert disk_contains(img, INF)

    def test_halfplane_contains_infinity(self):
        img = GeneralizedDisk(kind="halfplane", boundary_point=0j,
                              inward_normal=1 + 0j)
        assert disk_contains(img, INF)
        assert disk_contains(img, 1.0 + 5j)
        assert not disk_contains(img, -1.0 + 0j)


class TestInverseMap:
    def test_identity(self):
        p = MobiusParams(1, 0, 0, 1)
        assert inverse_map(p, 1.0, 0.3 + 0.4j) == pytest.approx(0.3 + 0.4j)

    def test_affine(self):
        p = MobiusParams(1, 1, 0, 2)
        assert inverse_map(p, 1.0, 1.0) == pytest.approx(1.0)

    def test_reference_boundary_point(self):
        # w = 4 on the 16/3-scaled disk boundary pulls back to the unit circle
        p = MobiusParams(2, 1, 1, 3)
        z = inverse_map(p, 16 / 3, 4.0)
        expected = (3 * 0.75 - 1) / (-0.75 + 2)
        assert z == pytest.approx(expected)
        assert abs(z) == pytest.approx(1.0, abs=1e-12)

    def test_round_trip(self, rng):
        for _ in range(1000):
            p = random_params(rng, halfplane_ok=True)
            g = float(rng.uniform(0.05, 10))
            z = rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)
            if abs(z) > 1:
                z = z / abs(z)
            w = mobius_eval(p, g, z)
            if is_inf(w):
                continue
            back = inverse_map(p, g, w)
            assert back == pytest.approx(z, abs=1e-9 * max(1.0, abs(z)))


class TestMembershipConsistency:
    def test_inside_points_map_inside(self, rng):
        for _ in range(100):
            p = random_params(rng)
            g = float(rng.uniform(0.1, 4))
            img = unit_disk_image(ScaledMobiusDisk(p, g))
            z = rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)
            if abs(z) > 1:
                z = z / abs(z)
            w = mobius_eval(p, g, z)
            assert disk_contains(img, w)

    def test_outside_points_map_outside(self, rng):
        eps = 1e-3
        for _ in range(100):
            p = random_params(rng)
            g = float(rng.uniform(0.1, 4))
            img = unit_disk_image(ScaledMobiusDisk(p, g))
            theta = rng.uniform(0, 2 * np.pi)
            w = mobius_eval(p, g, (1 + eps) * np.exp(1j * theta))
            if is_inf(w):
                continue
            if img.kind == "interior":
                strictly_out = abs(w - img.center) > img.radius * (1 + 1e-9)
            elif img.kind == "exterior":
                strictly_out = abs(w - img.center) < img.radius * (1 - 1e-9)
            else:
                continue
            if strictly_out:
                assert not disk_contains(img, w)

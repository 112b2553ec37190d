"""Backend parity: the compiled kernels and the NumPy fallback must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest

import beaconplan as bp
from beaconplan import _fieldpure, fields
from beaconplan.rss import DET_EPS


def random_scene(rng, cells=300, beacons=8):
    cx = rng.uniform(0, 50, cells)
    cy = rng.uniform(0, 30, cells)
    bx = rng.uniform(0, 50, beacons)
    by = rng.uniform(0, 30, beacons)
    return cx, cy, bx, by


class TestBackendParity:
    def test_strength_field(self):
        rng = np.random.default_rng(2)
        cx, cy, bx, by = random_scene(rng)
        a = fields.strength_field(cx, cy, bx, by, -59.0, 3.0, 1.0, 0.5)
        b = _fieldpure.strength_field(cx, cy, bx, by, -59.0, 3.0, 1.0, 0.5)
        np.testing.assert_allclose(a, b, rtol=1e-12)

    def test_crlb_field(self):
        rng = np.random.default_rng(4)
        cx, cy, bx, by = random_scene(rng)
        coeff = (10.0 * 3.0 / (1.732 * np.log(10.0))) ** 2
        got = fields.crlb_field(cx, cy, bx, by, coeff, 0.5, 23.0, DET_EPS)
        want = _fieldpure.crlb_field(cx, cy, bx, by, coeff, 0.5, 23.0, DET_EPS)
        for a, b in zip(got, want):
            inf_a, inf_b = np.isinf(a), np.isinf(b)
            np.testing.assert_array_equal(inf_a, inf_b)
            np.testing.assert_allclose(a[~inf_a], b[~inf_b], rtol=1e-9)

    def test_crlb_field_empty_layout(self):
        cx = np.array([1.0, 2.0])
        cy = np.array([1.0, 1.0])
        empty = np.empty(0)
        vx, vy, nearest = fields.crlb_field(cx, cy, empty, empty, 1.0, 0.5, np.inf, DET_EPS)
        assert np.isinf(vx).all() and np.isinf(vy).all() and np.isinf(nearest).all()

    def test_cell_on_beacon_is_finite(self):
        # the near-field clamp keeps the information terms finite at d=0
        cx = np.array([5.0])
        cy = np.array([5.0])
        bx = np.array([5.0, 8.0])
        by = np.array([5.0, 9.0])
        vx, vy, nearest = fields.crlb_field(cx, cy, bx, by, 56.0, 0.5, np.inf, DET_EPS)
        assert nearest[0] == 0.0
        assert np.isfinite(vx[0]) and np.isfinite(vy[0])

    def test_nearest_ignores_audibility(self):
        cx = np.array([0.0])
        cy = np.array([0.0])
        bx = np.array([30.0])
        by = np.array([0.0])
        vx, _, nearest = fields.crlb_field(cx, cy, bx, by, 56.0, 0.5, 10.0, DET_EPS)
        assert np.isinf(vx[0])
        assert nearest[0] == 30.0


class TestBackendSelection:
    def test_a_backend_is_active(self):
        assert fields.BACKEND in ("native", "pure")

    def test_env_var_forces_pure(self):
        code = "import beaconplan.fields as f; print(f.BACKEND)"
        env = dict(os.environ, BEACONPLAN_PURE="1")
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
        )
        assert out.stdout.strip() == "pure"

    def test_point_fim_matches_field_kernel(self, symmetric_scene):
        ch, layout, user = symmetric_scene
        f = bp.fim(ch, user, layout)
        bx, by = layout.positions()
        vx, vy, _ = fields.crlb_field(
            np.array([user.x]), np.array([user.y]), bx, by,
            ch.info_coeff(), ch.d_min, ch.audible_range(), DET_EPS,
        )
        av, _ = bp.crlb(f)
        assert vx[0] == pytest.approx(av.var_x, rel=1e-12)
        assert vy[0] == pytest.approx(av.var_y, rel=1e-12)

"""The jitted kernels and their pure-numpy twins must agree; the env flag
selects the fallback path."""
import os
import subprocess
import sys

import numpy as np
import pytest

from kickedtop import _kernels
from conftest import rng


def test_numba_is_active_by_default():
    # the test environment has numba installed and the flag unset
    assert _kernels.USING_NUMBA
    assert _kernels.orbit_mean_x is not _kernels.orbit_mean_x_py


def test_orbit_mean_x_paths_agree():
    g = rng(5)
    r0 = g.normal(size=(8, 3))
    r0 /= np.linalg.norm(r0, axis=1, keepdims=True)
    a = _kernels.orbit_mean_x(r0, 0.2, 0.1, 500)
    b = _kernels.orbit_mean_x_py(r0, 0.2, 0.1, 500)
    assert np.allclose(a, b, atol=1e-13)


def test_qel_ambient_paths_agree():
    g = rng(6)
    for _ in range(20):
        x, y, z = g.normal(size=3)
        a = np.array(_kernels.qel_ambient(x, y, z, 0.2, 0.1))
        b = np.array(_kernels.qel_ambient_py(x, y, z, 0.2, 0.1))
        assert np.allclose(a, b, rtol=1e-14, atol=1e-15)


def test_newton_refine_paths_agree():
    seeds = np.array([[0.9, 0.1, 0.2], [0.0, 0.5, 0.5], [-0.3, 0.3, 0.8]])
    seeds /= np.linalg.norm(seeds, axis=1, keepdims=True)
    pts_a, ok_a = _kernels.newton_refine(seeds, 0.2, 0.1, 1e-12, 60)
    pts_b, ok_b = _kernels.newton_refine_py(seeds, 0.2, 0.1, 1e-12, 60)
    assert np.array_equal(ok_a, ok_b)
    assert np.allclose(pts_a[ok_a == 1], pts_b[ok_b == 1], atol=1e-12)


def test_trace_series_paths_agree():
    g = rng(8)
    tn = g.normal(size=40) + 1j * g.normal(size=40)
    grid = np.linspace(-np.pi, np.pi, 101)
    a = _kernels.trace_series_rho(tn, grid, 0.02, 1.0, 81.0)
    b = _kernels.trace_series_rho_py(tn, grid, 0.02, 1.0, 81.0)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-15)


def test_env_flag_selects_fallback():
    code = (
        "from kickedtop import _kernels\n"
        "assert not _kernels.USING_NUMBA\n"
        "assert _kernels.orbit_mean_x is _kernels.orbit_mean_x_py\n"
        "import numpy as np\n"
        "import kickedtop as kt\n"
        "cps = kt.find_critical_points(kt.KickedTopParams(p=0.1, kappa=0.2), 40.0)\n"
        "assert abs(cps.saddle.amplitude - 0.039722586540572653) < 1e-9\n"
        "print('fallback ok')\n"
    )
    env = dict(os.environ, KICKEDTOP_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, timeout=300
    )
    assert out.returncode == 0, out.stderr
    assert "fallback ok" in out.stdout

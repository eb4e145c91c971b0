import os
import subprocess
import sys

import numpy as np
import pytest

from crsnoma import _kernels


@pytest.fixture(scope="module")
def trial_arrays():
    rng = np.random.default_rng(8)
    n = 5000
    return (rng.exponential(5.5, n), rng.exponential(5.5, n),
            rng.exponential(10.0, n), rng.exponential(1.0, n),
            rng.exponential(10.0, n))


def test_backends_agree_noma(trial_arrays):
    args = (*trial_arrays, 10.0, 0.8, 0.2, 3.0, 3.0)
    ref = _kernels.noma_trials_numpy(*args)
    got = _kernels.noma_trials(*args)
    np.testing.assert_allclose(got[0], ref[0], rtol=1e-13)
    np.testing.assert_allclose(got[1], ref[1], rtol=1e-13)
    np.testing.assert_array_equal(got[2], ref[2])
    np.testing.assert_array_equal(got[3], ref[3])


def test_backends_agree_oma(trial_arrays):
    args = (*trial_arrays, 10.0, 3.0)
    ref = _kernels.oma_trials_numpy(*args)
    got = _kernels.oma_trials(*args)
    np.testing.assert_allclose(got[0], ref[0], rtol=1e-13)
    np.testing.assert_array_equal(got[1], ref[1])


def test_combine_modes():
    rng = np.random.default_rng(3)
    gains = rng.exponential(1.0, (200, 4))
    np.testing.assert_array_equal(
        _kernels.combine_gains(gains, _kernels.COMBINE_SINGLE), gains[:, 0])
    np.testing.assert_allclose(
        _kernels.combine_gains(gains, _kernels.COMBINE_SC), gains.max(axis=1),
        rtol=1e-15)
    np.testing.assert_allclose(
        _kernels.combine_gains(gains, _kernels.COMBINE_MRC), gains.sum(axis=1),
        rtol=1e-12)


def test_s2_outage_flag_equals_complement_of_all_success(trial_arrays):
    lam_sp, lam_rp, g_sr, g_sd, g_rd = trial_arrays
    q, a1, a2, eps1, eps2 = 10.0, 0.8, 0.2, 3.0, 3.0
    _, _, _, out2 = _kernels.noma_trials_numpy(
        lam_sp, lam_rp, g_sr, g_sd, g_rd, q, a1, a2, eps1, eps2)
    ps = q / lam_sp
    sinr_sr1 = g_sr * a1 * ps / (g_sr * a2 * ps + 1.0)
    sinr_sr2 = g_sr * a2 * ps
    sinr_rd = g_rd * (q / lam_rp)
    success = (sinr_sr1 >= eps1) & (sinr_sr2 >= eps2) & (sinr_rd >= eps2)
    np.testing.assert_array_equal(out2.astype(bool), ~success)


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, CRSNOMA_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c",
         "from crsnoma import _kernels; print(_kernels.BACKEND)"],
        capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "numpy"


def test_default_backend_is_numba_when_available():
    try:
        import numba  # noqa: F401
    except ImportError:
        pytest.skip("numba not installed")
    env = {k: v for k, v in os.environ.items() if k != "CRSNOMA_NO_NUMBA"}
    out = subprocess.run(
        [sys.executable, "-c",
         "from crsnoma import _kernels; print(_kernels.BACKEND)"],
        capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "numba"

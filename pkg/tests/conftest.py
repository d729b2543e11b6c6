import numpy as np
import pytest

from patina.config import build_simulation_config, load_settings
from patina.materials import DEFAULT_MATERIALS, swelling_ratios


@pytest.fixture(scope="session")
def default_cfg():
    return build_simulation_config(load_settings())


@pytest.fixture(scope="session")
def sw():
    return swelling_ratios(DEFAULT_MATERIALS)


def assert_output_invariants(output, sw, check_velocity_identity=True):
    """Shared contract checks for any simulation output.

    Ordering gamma < beta < a, monotone consumptions, the kinematic
    identities, and non-negative concentrations at every record.
    """
    records = output.records
    times = np.array([r.t_hours for r in records])
    assert np.all(np.diff(times) > 0.0), "record times not strictly increasing"
    prev = None
    for r in records:
        assert r.gamma_nd < r.beta_nd < r.a_nd
        assert r.total_cm == pytest.approx(r.a_cm - r.gamma_cm, rel=0, abs=1e-18)
        assert abs(r.beta_nd - (r.b_nd - sw.omega_p * r.a_nd)) <= 1e-12
        if check_velocity_identity:
            assert abs(r.gamma_dot + sw.omega_p * r.a_dot + sw.omega_b * r.b_dot) <= 1e-12
        assert r.min_concentration >= 0.0
        if prev is not None:
            assert r.a_nd >= prev.a_nd
            assert r.b_nd >= prev.b_nd
            assert r.gamma_nd <= prev.gamma_nd
            assert r.total_cm >= prev.total_cm
        prev = r

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from patina.convergence import (
    diffusion_mode_relative_error,
    observed_orders,
    scalar_imex_errors,
    scalar_imex_step,
)
from patina.materials import SwellingRatios
from patina.pde_core import Diffusivities, FrontState, LayerFields, StefanConstants
from patina.stepper import (
    MIDPOINT_122,
    ImexTableau,
    NondimModel,
    StepCounters,
    TridiagonalError,
    imex_midpoint_step,
    select_dt,
    solve_tridiagonal,
)


class TestTableau:
    def test_midpoint_tableau_valid(self):
        assert MIDPOINT_122.order == 2
        assert MIDPOINT_122.stages == 2
        assert sum(MIDPOINT_122.w_implicit) == 1.0
        assert sum(MIDPOINT_122.w_explicit) == 1.0

    def test_explicit_part_strictly_lower(self):
        with pytest.raises(ValueError, match="strictly lower"):
            ImexTableau(a_implicit=((0.0, 0.0), (0.0, 0.5)),
                        a_explicit=((0.5, 0.0), (0.5, 0.0)),
                        w_implicit=(0.0, 1.0), w_explicit=(0.0, 1.0), order=2)

    def test_implicit_part_lower(self):
        with pytest.raises(ValueError, match="lower triangular"):
            ImexTableau(a_implicit=((0.0, 0.5), (0.0, 0.5)),
                        a_explicit=((0.0, 0.0), (0.5, 0.0)),
                        w_implicit=(0.0, 1.0), w_explicit=(0.0, 1.0), order=2)

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError, match="sum to 1"):
            ImexTableau(a_implicit=((0.0, 0.0), (0.0, 0.5)),
                        a_explicit=((0.0, 0.0), (0.5, 0.0)),
                        w_implicit=(0.0, 0.5), w_explicit=(0.0, 1.0), order=2)


class TestTridiagonal:
    def test_identity(self):
        rhs = np.array([3.0, -1.0, 2.0, 7.0])
        x = solve_tridiagonal(np.zeros(3), np.ones(4), np.zeros(3), rhs)
        assert np.allclose(x, rhs, rtol=0, atol=0)

    def test_hand_solved_system(self):
        # {diag 2, off -1} with rhs (1, 0, 1) has solution (1, 1, 1)
        x = solve_tridiagonal([-1.0, -1.0], [2.0, 2.0, 2.0], [-1.0, -1.0],
                              [1.0, 0.0, 1.0])
        assert np.allclose(x, [1.0, 1.0, 1.0], atol=1e-14)

    def test_zero_pivot_reports_index(self):
        with pytest.raises(TridiagonalError, match="row 0"):
            solve_tridiagonal([0.0], [0.0, 1.0], [0.0], [1.0, 1.0])

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            solve_tridiagonal([1.0], [1.0, 1.0, 1.0], [1.0], [1.0, 1.0, 1.0])

    @given(st.integers(min_value=3, max_value=40), st.integers(0, 2**32 - 1))
    def test_matches_dense_solver(self, n, seed):
        rng = np.random.default_rng(seed)
        sub = rng.uniform(-1, 1, n - 1)
        sup = rng.uniform(-1, 1, n - 1)
        diag = 2.5 + rng.uniform(0, 1, n)   # diagonally dominant
        rhs = rng.uniform(-5, 5, n)
        dense = np.diag(diag) + np.diag(sub, -1) + np.diag(sup, 1)
        expect = np.linalg.solve(dense, rhs)
        got = solve_tridiagonal(sub, diag, sup, rhs)
        assert np.allclose(got, expect, rtol=1e-10, atol=1e-12)

    @given(st.integers(min_value=3, max_value=30), st.integers(0, 2**32 - 1),
           st.floats(min_value=1e-3, max_value=1e6))
    def test_m_matrix_preserves_positivity(self, n, seed, alpha):
        # (1 + 2a, -a, -a) systems keep non-negative data non-negative
        rng = np.random.default_rng(seed)
        rhs = rng.uniform(0, 10, n)
        x = solve_tridiagonal(np.full(n - 1, -alpha), np.full(n, 1 + 2 * alpha),
                              np.full(n - 1, -alpha), rhs)
        assert np.all(x >= -1e-12)


class TestSelectDt:
    def test_zero_velocities_give_dt_max(self):
        fs = FrontState(a=2.0, b=1.0, beta=1.0, gamma=0.0)
        assert select_dt(fs, 0.01, 0.01, 0.5, 0.25, 0.67) == 0.25

    def test_formula(self):
        # outer coefficient peaks at |gamma_dot - beta_dot| / width = 1
        fs = FrontState(a=2.0, b=1.0, beta=1.0, gamma=0.0, gamma_dot=-1.0)
        assert select_dt(fs, 0.01, 0.01, 0.5, 1.0, 0.67) == pytest.approx(5e-3)

    def test_shrinking_width_halves_dt(self):
        fs1 = FrontState(a=2.0, b=1.0, beta=1.0, gamma=0.0, gamma_dot=-1.0)
        fs2 = FrontState(a=2.0, b=1.0, beta=1.5, gamma=1.0, gamma_dot=-1.0)
        dt1 = select_dt(fs1, 0.01, 0.01, 0.5, 1.0, 0.67)
        dt2 = select_dt(fs2, 0.01, 0.01, 0.5, 1.0, 0.67)
        assert dt2 == pytest.approx(dt1 / 2.0)


class TestScalarScheme:
    def test_midpoint_stage_algebra(self):
        # one step by hand: u2 = u(1 + z/4)/(1 - z/4), then u + z*u2, z = lam*dt
        lam, dt, u0 = -1.0, 0.1, 1.0
        z = lam * dt
        u2 = u0 * (1 + z / 4) / (1 - z / 4)
        expect = u0 + z * u2
        got = scalar_imex_step(u0, dt, lam / 2, lam / 2)
        assert got == pytest.approx(expect, rel=1e-14)

    def test_unchanged_when_rhs_zero(self):
        assert scalar_imex_step(1.7, 0.3, 0.0, 0.0) == 1.7

    def test_second_order_convergence(self):
        orders = observed_orders(scalar_imex_errors())
        assert min(orders) >= 1.9

    def test_local_step_doubling_error(self):
        # a full step vs two half-steps differ at O(dt^3)
        lam, u0 = -1.0, 1.0
        diffs = []
        for dt in (0.2, 0.1, 0.05):
            one = scalar_imex_step(u0, dt, lam / 2, lam / 2)
            half = scalar_imex_step(u0, dt / 2, lam / 2, lam / 2)
            two = scalar_imex_step(half, dt / 2, lam / 2, lam / 2)
            diffs.append(abs(one - two))
        orders = observed_orders(list(zip((0.2, 0.1, 0.05), diffs)))
        assert min(orders) >= 2.7


def _frozen_setup(n, d_hat_s, gamma_dot=0.0):
    tiny = 1e-30
    model = NondimModel(
        d_hat=Diffusivities(tiny, d_hat_s, tiny, tiny),
        sc=StefanConstants(0.0, 0.0, 0.0, 0.0),
        sw=SwellingRatios(0.0, 0.0),
        n_z=n, n_y=n,
        forcing_hat=lambda tau: (0.0, 0.0, 0.0),
    )
    fronts = FrontState(a=2.0, b=1.0, beta=1.0, gamma=0.0, gamma_dot=gamma_dot)
    return model, fronts


class TestPdeStep:
    def test_zero_rhs_leaves_state_unchanged(self):
        n = 40
        model, fronts = _frozen_setup(n, 1e-30)
        z = np.linspace(0, 1, n + 1)
        bump = np.exp(-((z - 0.5) / 0.2) ** 2)
        bump[0] = bump[-1] = 0.0
        fields = LayerFields(S=bump.copy(), W=np.zeros(n + 1),
                             O=np.zeros(n + 1), G=np.zeros(n + 1))
        new, _ = imex_midpoint_step(fields, fronts, 0.0, 0.05, model,
                                    freeze_fronts=True)
        assert np.allclose(new.S, bump, atol=1e-25)

    def test_diffusion_mode_decay(self):
        assert diffusion_mode_relative_error(n=100, dt=1e-4) < 1e-3

    def test_unconditional_stability_of_diffusion(self):
        # stiff diffusion, huge dt, no advection: norm must not grow
        n = 50
        model, fronts = _frozen_setup(n, 1e6)
        z = np.linspace(0, 1, n + 1)
        fields = LayerFields(S=np.sin(np.pi * z), W=np.zeros(n + 1),
                             O=np.zeros(n + 1), G=np.zeros(n + 1))
        norm0 = np.linalg.norm(fields.S)
        for k in range(5):
            fields, _ = imex_midpoint_step(fields, fronts, 0.0, 10.0, model,
                                           freeze_fronts=True)
            norm = np.linalg.norm(fields.S)
            assert norm <= norm0 + 1e-12
            norm0 = norm

    def test_rejects_non_positive_dt(self):
        n = 10
        model, fronts = _frozen_setup(n, 1.0)
        fields = LayerFields(*(np.zeros(n + 1) for _ in range(4)))
        with pytest.raises(ValueError):
            imex_midpoint_step(fields, fronts, 0.0, 0.0, model)

    def test_counters_accumulate_field_clamps(self):
        # central differencing on a sharp profile undershoots; clamps count it
        n = 40
        model, fronts = _frozen_setup(n, 1e-30, gamma_dot=-1.0)
        model = NondimModel(d_hat=model.d_hat, sc=model.sc, sw=model.sw,
                            n_z=n, n_y=n, forcing_hat=model.forcing_hat,
                            scheme="central")
        z = np.linspace(0, 1, n + 1)
        step_profile = np.where(z < 0.5, 1.0, 0.0)
        fields = LayerFields(S=step_profile.astype(float), W=np.zeros(n + 1),
                             O=np.zeros(n + 1), G=np.zeros(n + 1))
        counters = StepCounters()
        for _ in range(10):
            fields, _ = imex_midpoint_step(fields, fronts, 0.0, 0.01, model,
                                           counters, freeze_fronts=True)
        assert fields.S.min() >= 0.0
        assert counters.field_clamps > 0

"""Marching kernel: derived quantities, re-weighting, stepping, invariants."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epwave.cese1d import (CFLViolationError, MeshLevel, NodeSolution,
                           SolverParams, compute_cfl, march_node,
                           node_derived_quantities, reweight, run, step)
from epwave.material import copper
from epwave.scenarios import BoundaryPolicy


def uniform_level(mat, n=41, length=0.2, dt=1e-8, rho=None, v=0.0, s11=0.0):
    rho = mat.rest_density if rho is None else rho
    x = np.linspace(0.0, length, n)
    u = np.tile([rho, rho * v, rho * s11], (n, 1))
    return MeshLevel(x=x, u=u, ux=np.zeros((n, 3)),
                     yield_radius=np.full(n, 2.0 * mat.initial_yield / 3.0),
                     eps_plastic=np.zeros(n), stage=np.zeros(n, dtype=int),
                     gamma=np.zeros(n, dtype=int), t=0.0,
                     dx=length / (n - 1), dt=dt, x_min=0.0, x_max=length)


class TestNodeSolution:
    def test_rejects_bad_shapes(self):
        with pytest.raises(ValueError):
            NodeSolution(u=np.zeros(2), ux=np.zeros(3))

    def test_rejects_nonpositive_density(self):
        with pytest.raises(ValueError):
            NodeSolution(u=np.array([0.0, 0.0, 0.0]), ux=np.zeros(3))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            NodeSolution(u=np.array([8930.0, np.inf, 0.0]), ux=np.zeros(3))


class TestDerivedQuantities:
    def test_uniform_rest_all_zero(self, mat):
        n = NodeSolution(u=np.array([mat.rest_density, 0.0, 0.0]), ux=np.zeros(3))
        f, fx, ut, ft = node_derived_quantities(n, mat, gamma=0, modulus=0.0)
        for q in (f, fx, ut, ft):
            assert q == pytest.approx(np.zeros(3))

    def test_in_element_pde_residual(self, mat):
        # ut + fx = s holds exactly by construction
        n = NodeSolution(u=np.array([9000.0, 9.0e4, -2.7e11]),
                         ux=np.array([10.0, 150.0, -3.0e9]))
        f, fx, ut, ft = node_derived_quantities(n, mat, gamma=0, modulus=0.0)
        from epwave.system import source
        rho = n.u[0]
        v = n.u[1] / rho
        vx = (n.ux[1] - v * n.ux[0]) / rho
        s = source(n.u, vx, mat, 0, 0.0)
        assert ut + fx == pytest.approx(s, rel=1e-12, abs=1e-6)

    def test_zero_source_ut_is_minus_fx(self, mat):
        # uniform velocity field: dv/dx = 0 so the source vanishes
        n = NodeSolution(u=np.array([9000.0, 9.0e4, 0.0]),
                         ux=np.array([10.0, 100.0, 0.0]))   # ux2 = v*ux1 -> vx=0
        f, fx, ut, ft = node_derived_quantities(n, mat, gamma=0, modulus=0.0)
        assert ut == pytest.approx(-fx, rel=1e-12)


class TestReweight:
    def test_alpha_zero_is_mean(self):
        assert reweight(1.0, 3.0, 0.0) == pytest.approx(2.0)

    def test_equal_slopes_pass_through(self):
        assert reweight(2.5, 2.5, 1.0) == pytest.approx(2.5)

    def test_both_zero_convention(self):
        assert reweight(0.0, 0.0, 1.0) == 0.0

    def test_one_sided_zero_kills_output(self):
        # W(0, x, 1) = 0: a vanishing one-sided slope flattens the update
        assert reweight(0.0, 7.0, 1.0) == pytest.approx(0.0)

    def test_formula_value(self):
        # W = (|x+| x- + |x-| x+)/(|x+| + |x-|) at alpha = 1
        assert reweight(1.0, 2.0, 1.0) == pytest.approx((2.0 + 2.0) / 3.0)

    @settings(max_examples=150, deadline=None)
    @given(xm=st.floats(min_value=-10, max_value=10),
           xp=st.floats(min_value=-10, max_value=10),
           alpha=st.floats(min_value=0.0, max_value=4.0))
    def test_bounded_by_inputs(self, xm, xp, alpha):
        w = reweight(xm, xp, alpha)
        assert min(xm, xp) - 1e-9 <= w <= max(xm, xp) + 1e-9


class TestMarchNode:
    def test_uniform_state_is_fixed_point(self, mat):
        u = np.array([mat.rest_density, 0.0, 0.0])
        node = NodeSolution(u=u, ux=np.zeros(3))
        out = march_node(node, node, SolverParams(), mat, dt=1e-7, dx=5e-3)
        assert out.u == pytest.approx(u, rel=1e-12)
        assert out.ux == pytest.approx(np.zeros(3), abs=1e-6)

    def test_uniform_moving_state_is_fixed_point(self, mat):
        rho = mat.rest_density
        u = np.array([rho, rho * 25.0, 0.0])
        node = NodeSolution(u=u, ux=np.zeros(3))
        out = march_node(node, node, SolverParams(), mat, dt=1e-7, dx=5e-3)
        assert out.u == pytest.approx(u, rel=1e-12)


class TestStep:
    def test_cfl_violation_raises(self, mat):
        level = uniform_level(mat, dt=1.0)   # absurdly large step
        bc = BoundaryPolicy("non_reflective", "non_reflective")
        with pytest.raises(CFLViolationError):
            step(level, bc, SolverParams(), mat)

    def test_compute_cfl_value(self, mat):
        level = uniform_level(mat, n=41, length=0.2, dt=1e-7)   # dx = 5e-3
        assert compute_cfl(level, mat) == pytest.approx(
            4732.485 * 1e-7 / 5e-3, rel=1e-4)

    def test_families_alternate(self, mat):
        level = uniform_level(mat, dt=1e-7)
        bc = BoundaryPolicy("non_reflective", "non_reflective")
        assert level.is_edge_family()
        mid = step(level, bc, SolverParams(), mat)
        assert not mid.is_edge_family()
        assert mid.n_nodes == level.n_nodes - 1
        back = step(mid, bc, SolverParams(), mat)
        assert back.is_edge_family()
        assert back.n_nodes == level.n_nodes
        assert back.t == pytest.approx(1e-7)

    @settings(max_examples=100, deadline=None)
    @given(rho=st.floats(min_value=8000.0, max_value=10000.0),
           v=st.floats(min_value=-50.0, max_value=50.0),
           s11=st.floats(min_value=-5.9e7, max_value=5.9e7))
    def test_constant_state_preserved(self, rho, v, s11):
        mat = copper()
        level = uniform_level(mat, n=21, dt=1e-8, rho=rho, v=v, s11=s11)
        bc = BoundaryPolicy("non_reflective", "non_reflective")
        out = step(step(level, bc, SolverParams(), mat), bc, SolverParams(), mat)
        assert out.u == pytest.approx(level.u, rel=1e-11)

    def test_constant_state_preserved_periodic(self, mat):
        level = uniform_level(mat, n=21, dt=1e-8, v=12.0, s11=3.0e7)
        bc = BoundaryPolicy("periodic", "periodic")
        out = step(step(level, bc, SolverParams(), mat), bc, SolverParams(), mat)
        assert out.u == pytest.approx(level.u, rel=1e-11)

    def test_rest_state_preserved_free_surface(self, mat):
        level = uniform_level(mat, n=21, dt=1e-8)
        bc = BoundaryPolicy("free_surface", "free_surface")
        out = step(step(level, bc, SolverParams(), mat), bc, SolverParams(), mat)
        assert out.u == pytest.approx(level.u, rel=1e-11)


class TestConservation:
    def test_mass_momentum_conserved_periodic(self, mat):
        # smooth density wave, uniform velocity: the first two components have
        # no source, so their totals must hold to round-off over many steps
        n = 65
        length = 0.65
        x = np.linspace(0.0, length, n)
        rho = mat.rest_density * (1.0 + 1e-4 * np.sin(2.0 * np.pi * x / length))
        rho[-1] = rho[0]
        v = np.full(n, 5.0)
        u = np.stack([rho, rho * v, np.zeros(n)], axis=1)
        drho = mat.rest_density * 1e-4 * (2 * np.pi / length) * np.cos(
            2.0 * np.pi * x / length)
        ux = np.stack([drho, drho * v, np.zeros(n)], axis=1)
        level = MeshLevel(x=x, u=u, ux=ux,
                          yield_radius=np.full(n, 6.0e7),
                          eps_plastic=np.zeros(n), stage=np.zeros(n, dtype=int),
                          gamma=np.zeros(n, dtype=int), t=0.0,
                          dx=length / (n - 1), dt=5e-7, x_min=0.0, x_max=length)
        bc = BoundaryPolicy("periodic", "periodic")
        params = SolverParams()

        def totals(lv):
            w = np.ones(lv.n_nodes)
            if lv.is_edge_family():       # seam node appears twice
                w[0] = w[-1] = 0.5
            return (np.sum(w * lv.u[:, 0]), np.sum(w * lv.u[:, 1]))

        m0, p0 = totals(level)
        for _ in range(1000):
            level = step(level, bc, params, mat)
        m1, p1 = totals(level)
        assert abs(m1 - m0) / abs(m0) < 1e-10
        assert abs(p1 - p0) / abs(p0) < 1e-10


class TestMirrorSymmetry:
    @settings(max_examples=100, deadline=None)
    @given(speed=st.floats(min_value=1.0, max_value=60.0))
    def test_symmetric_impact_stays_symmetric(self, speed):
        # two half-spaces closing at +/- speed about the center
        mat = copper()
        n = 81
        length = 0.8
        x = np.linspace(0.0, length, n)
        v = np.where(x < 0.4, speed, -speed)
        v[n // 2] = 0.0
        rho = np.full(n, mat.rest_density)
        level = MeshLevel(x=x, u=np.stack([rho, rho * v, np.zeros(n)], axis=1),
                          ux=np.zeros((n, 3)),
                          yield_radius=np.full(n, 6.0e7),
                          eps_plastic=np.zeros(n), stage=np.zeros(n, dtype=int),
                          gamma=np.zeros(n, dtype=int), t=0.0,
                          dx=length / (n - 1), dt=1e-6, x_min=0.0, x_max=length)
        bc = BoundaryPolicy("non_reflective", "non_reflective")
        params = SolverParams()
        for _ in range(40):
            level = step(level, bc, params, mat)
        rho_f, v_f, s_f = level.primitives()
        assert rho_f == pytest.approx(rho_f[::-1], rel=1e-9)
        assert v_f == pytest.approx(-v_f[::-1], rel=1e-9, abs=1e-9)
        assert s_f == pytest.approx(s_f[::-1], rel=1e-9, abs=1.0)


class TestPlasticHistoryInvariants:
    def test_history_monotone_and_bounded(self, mat):
        # drive a strong impact and confirm per-level plastic history stays sane
        n = 81
        length = 0.8
        x = np.linspace(0.0, length, n)
        v = np.where(x < 0.4, 40.0, 0.0)
        rho = np.full(n, mat.rest_density)
        level = MeshLevel(x=x, u=np.stack([rho, rho * v, np.zeros(n)], axis=1),
                          ux=np.zeros((n, 3)),
                          yield_radius=np.full(n, 6.0e7),
                          eps_plastic=np.zeros(n), stage=np.zeros(n, dtype=int),
                          gamma=np.zeros(n, dtype=int), t=0.0,
                          dx=length / (n - 1), dt=1e-6, x_min=0.0, x_max=length)
        bc = BoundaryPolicy("non_reflective", "non_reflective")
        params = SolverParams()
        for _ in range(60):
            level = step(level, bc, params, mat)
            assert np.all(level.yield_radius >= 6.0e7 * (1.0 - 1e-12))
            assert np.all(level.eps_plastic >= 0.0)
            assert np.all((level.gamma == 0) | (level.gamma == 1))
            assert np.all(level.stage == 0)    # single-stage copper
            _, _, s11 = level.primitives()
            assert np.all(np.abs(s11) <= level.yield_radius * (1.0 + 1e-9))


class TestRun:
    def test_callback_count(self, mat):
        level = uniform_level(mat, n=21, dt=1e-8)
        bc = BoundaryPolicy("non_reflective", "non_reflective")
        calls = []
        final, steps, cfl_max = run(level, 20 * 0.5e-8, bc, SolverParams(), mat,
                                    callback=lambda lv, i: calls.append(i),
                                    snapshot_every=6)
        assert steps == 20
        # step 0 plus every 6th step
        assert calls == [0, 6, 12, 18]
        assert len(calls) == steps // 6 + 1

    def test_run_reaches_t_end(self, mat):
        level = uniform_level(mat, n=21, dt=1e-8)
        bc = BoundaryPolicy("non_reflective", "non_reflective")
        final, steps, cfl_max = run(level, 1e-7, bc, SolverParams(), mat)
        assert final.t == pytest.approx(1e-7)
        assert steps == 20
        assert 0.0 < cfl_max <= 1.0

    def test_rejects_past_t_end(self, mat):
        level = uniform_level(mat, n=21, dt=1e-8)
        bc = BoundaryPolicy("non_reflective", "non_reflective")
        with pytest.raises(ValueError):
            run(level, -1.0, bc, SolverParams(), mat)


class TestSolverParams:
    def test_epsilon_fixed(self):
        assert SolverParams.EPSILON == 0.5

    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            SolverParams(alpha=-1.0)
        with pytest.raises(ValueError):
            SolverParams(cfl_limit=1.5)
        with pytest.raises(ValueError):
            SolverParams(source_mode="magic")

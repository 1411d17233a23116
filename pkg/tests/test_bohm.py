import numpy as np
import pytest

from qretro.bohm import (
    BohmError,
    NodeEncounter,
    crossing_count,
    integrate_trajectory,
    ks_distance,
    run_ensemble,
    sample_initial_positions,
    two_particle_velocity,
    velocity,
)
from qretro.qcore import (
    Potential,
    WaveFunction,
    density,
    evolve,
    gaussian_packet,
    make_grid,
    normalize,
    plane_wave,
)


@pytest.fixture
def grid1d():
    return make_grid(1, [-10, 10], 256)


@pytest.fixture
def free1d(grid1d):
    return Potential(grid1d, "free")


class TestVelocity:
    def test_plane_wave_free_particle_limit(self, grid1d):
        wf = plane_wave(grid1d, 1.2566)
        k = 2 * np.pi * 4 / 20
        for x in (-7.3, -0.11, 0.0, 4.6):
            assert velocity(wf, [x]) == pytest.approx(k, abs=1e-6)

    def test_real_stationary_state(self, grid1d):
        wf = gaussian_packet(grid1d, 0.0, 1 / np.sqrt(2), 0.0)
        assert abs(velocity(wf, [0.3])) < 1e-9

    def test_packet_center_moves_at_p0(self, grid1d):
        wf = gaussian_packet(grid1d, 0.0, 1.0, 2.0)
        assert velocity(wf, [0.0]) == pytest.approx(2.0, abs=1e-4)

    def test_interpolated_zero_crossing_is_not_a_node(self, grid1d):
        # an odd superposition vanishes at x=0, but the interpolated
        # density between neighboring cells stays above the floor
        a = gaussian_packet(grid1d, -2.0, 1.0, 0.0)
        b = gaussian_packet(grid1d, 2.0, 1.0, 0.0)
        wf = normalize(WaveFunction(grid1d, a.psi - b.psi))
        assert np.isfinite(velocity(wf, [0.0]))

    def test_node_reported_in_dead_zone(self, grid1d):
        # widely separated narrow packets: density between them is
        # below the relative floor by hundreds of orders of magnitude
        a = gaussian_packet(grid1d, -6.0, 0.5, 0.0)
        b = gaussian_packet(grid1d, 6.0, 0.5, 0.0)
        wf = normalize(WaveFunction(grid1d, a.psi + b.psi))
        with pytest.raises(NodeEncounter):
            velocity(wf, [0.0])


class TestIntegrateTrajectory:
    def test_symmetry_axis_is_fixed(self, grid1d, free1d):
        wf = gaussian_packet(grid1d, 0.0, 1.0, 0.0)
        traj = integrate_trajectory(wf, free1d, [0.0], 2.0, 0.01)
        assert np.max(np.abs(traj.positions)) < 1e-10

    def test_free_gaussian_trajectory_law(self, grid1d, free1d):
        # X(t) = X0 sqrt(1 + (t / 2 sigma^2)^2) for sigma = 1, X0 = 1
        wf = gaussian_packet(grid1d, 0.0, 1.0, 0.0)
        traj = integrate_trajectory(wf, free1d, [1.0], 2.0, 0.005)
        assert traj.final_position[0] == pytest.approx(np.sqrt(2.0), abs=1e-3)

    @pytest.mark.parametrize("dt", [0.01, 0.005])
    def test_forward_backward_round_trip(self, grid1d, free1d, dt):
        wf = gaussian_packet(grid1d, 0.0, 1.0, 0.0)
        fwd = integrate_trajectory(wf, free1d, [1.0], 2.0, dt)
        psiT = evolve(wf, free1d, 2.0, dt / 2,
                      snapshot_stride=10**9).snapshots[-1]
        back = integrate_trajectory(psiT, free1d, fwd.final_position, 0.0, dt)
        assert abs(back.final_position[0] - 1.0) < 1e-6

    def test_start_outside_extent(self, grid1d, free1d):
        wf = gaussian_packet(grid1d, 0.0, 1.0, 0.0)
        with pytest.raises(BohmError):
            integrate_trajectory(wf, free1d, [12.0], 1.0, 0.01)

    def test_node_abort_at_start(self, grid1d, free1d):
        a = gaussian_packet(grid1d, -6.0, 0.5, 0.0)
        b = gaussian_packet(grid1d, 6.0, 0.5, 0.0)
        wf = normalize(WaveFunction(grid1d, a.psi + b.psi))
        with pytest.raises(NodeEncounter):
            integrate_trajectory(wf, free1d, [0.0], 1.0, 0.01)

    def test_node_abort_mid_flight_flagged(self, grid1d, free1d):
        from qretro.bohm import _integrate_many

        a = gaussian_packet(grid1d, -6.0, 0.5, 0.0)
        b = gaussian_packet(grid1d, 6.0, 0.5, 0.0)
        wf = normalize(WaveFunction(grid1d, a.psi + b.psi))
        X0 = np.array([[0.0], [6.0]])  # dead zone next to a live start
        pos, times, abort, wrapped, _, _ = _integrate_many(
            wf, free1d, X0, 0.1, 0.01)
        assert abort[0] == 0 and abort[1] == -1
        assert np.isnan(pos[1:, 0, 0]).all()
        assert np.isfinite(pos[:, 1, 0]).all()


class TestSampling:
    def test_moment_statistics(self, grid1d):
        wf = gaussian_packet(grid1d, 0.0, 1.0, 0.0)
        xs = sample_initial_positions(wf, 10**5, seed=11)
        assert xs[:, 0].std() == pytest.approx(1.0, abs=0.01)
        assert xs[:, 0].mean() == pytest.approx(0.0, abs=0.02)

    def test_single_cell_support(self, grid1d):
        psi = np.zeros(256, dtype=complex)
        psi[100] = 1.0
        wf = normalize(WaveFunction(grid1d, psi))
        xs = sample_initial_positions(wf, 200, seed=3)
        c = grid1d.coords()[100]
        h = grid1d.spacings[0]
        assert np.all(np.abs(xs[:, 0] - c) <= h / 2)

    def test_seed_determinism(self, grid1d):
        wf = gaussian_packet(grid1d, 0.0, 1.0, 0.0)
        a = sample_initial_positions(wf, 1000, seed=9)
        b = sample_initial_positions(wf, 1000, seed=9)
        assert np.array_equal(a, b)


class TestEnsemble:
    def test_equivariance_at_t0(self, grid1d, free1d):
        wf = gaussian_packet(grid1d, 0.0, 1.0, 0.0)
        xs = sample_initial_positions(wf, 10**4, seed=21)
        d = ks_distance(xs[:, 0], grid1d.coords(), density(wf),
                        grid1d.spacings[0])
        assert d < 0.02

    def test_equivariance_after_spreading(self, grid1d, free1d):
        wf = gaussian_packet(grid1d, 0.0, 1.0, 0.0)
        ens = run_ensemble(wf, free1d, 2.0, 0.01, 10**4, seed=5)
        assert ens.node_abort_fraction < 0.005
        final = ens.final_positions()[:, 0]
        assert final.std() == pytest.approx(np.sqrt(2.0), rel=0.02)
        d = ks_distance(final, grid1d.coords(), density(ens.final_wf),
                        grid1d.spacings[0])
        assert d < 0.02

    def test_no_crossing_in_1d(self, grid1d, free1d):
        wf = gaussian_packet(grid1d, 0.0, 1.0, 0.5)
        ens = run_ensemble(wf, free1d, 1.0, 0.01, 500, seed=8)
        order0 = np.argsort(ens.positions[0, :, 0])
        for i in range(0, len(ens.times), 20):
            assert np.all(np.diff(ens.positions[i, order0, 0]) > 0)

    def test_seed_determinism(self, grid1d, free1d):
        wf = gaussian_packet(grid1d, 0.0, 1.0, 0.0)
        a = run_ensemble(wf, free1d, 0.5, 0.01, 100, seed=2)
        b = run_ensemble(wf, free1d, 0.5, 0.01, 100, seed=2)
        assert np.array_equal(a.positions, b.positions)

    def test_csv_and_sidecar(self, grid1d, free1d, tmp_path):
        wf = gaussian_packet(grid1d, 0.0, 1.0, 0.0)
        ens = run_ensemble(wf, free1d, 0.1, 0.01, 10, seed=2)
        ens.write_csv(tmp_path / "tr.csv", stride=2)
        ens.write_sidecar(tmp_path / "tr.json")
        header = (tmp_path / "tr.csv").read_text().splitlines()[0]
        assert header == "trajectory,t,x0"
        assert (tmp_path / "tr.json").exists()


class TestTwoParticle:
    @pytest.fixture
    def cgrid(self):
        return make_grid(2, [-10, 10], 128)

    def test_product_plane_waves(self, cgrid):
        wf = plane_wave(cgrid, [1.0, -1.0])
        k = 2 * np.pi / 20
        k1, k2 = k * round(1.0 / k), k * round(-1.0 / k)
        v = two_particle_velocity(wf, [0.4, -1.3])
        assert v[0] == pytest.approx(k1, abs=1e-6)
        assert v[1] == pytest.approx(k2, abs=1e-6)

    def test_product_state_locality(self, cgrid):
        # factorized state: particle 1's velocity ignores particle 2
        wf = gaussian_packet(cgrid, [0.0, 0.0], [1.0, 1.5], [2.0, -1.0])
        vs = [two_particle_velocity(wf, [0.7, x2])[0]
              for x2 in (-2.0, 0.0, 1.5)]
        assert np.ptp(vs) < 1e-9

    def test_entangled_state_nonlocality(self, cgrid):
        # (phi_a(x1) chi_b(x2) + phi_b(x1) chi_a(x2)) / sqrt(2) with the
        # two branches carrying opposite particle-1 momenta
        phi_a = gaussian_packet(cgrid, [-2.0, 2.0], [1.0, 0.6], [1.0, 0.0])
        phi_b = gaussian_packet(cgrid, [2.0, -2.0], [1.0, 0.6], [-1.0, 0.0])
        wf = normalize(WaveFunction(cgrid, phi_a.psi + phi_b.psi))
        v_branch_b = two_particle_velocity(wf, [0.0, 2.0])[0]
        v_branch_a = two_particle_velocity(wf, [0.0, -2.0])[0]
        assert abs(v_branch_b - v_branch_a) > 0.1 * max(
            abs(v_branch_a), abs(v_branch_b))

    def test_dimension_check(self, grid1d):
        wf = gaussian_packet(grid1d, 0.0, 1.0, 0.0)
        with pytest.raises(BohmError):
            two_particle_velocity(wf, [0.0, 0.0])


class TestCrossingCount:
    def test_counts_sign_changes(self):
        times = np.array([0.0, 1.0, 2.0])
        pos = np.zeros((3, 2, 1))
        pos[:, 0, 0] = [1.0, 0.5, -0.5]   # crosses
        pos[:, 1, 0] = [1.0, 0.5, 0.2]    # stays
        from qretro.bohm import Ensemble
        ens = Ensemble(times=times, positions=pos, dt=1.0, seed=0,
                       abort_steps=np.array([-1, -1]),
                       wrapped=np.array([False, False]))
        assert crossing_count(ens, axis=0) == 1

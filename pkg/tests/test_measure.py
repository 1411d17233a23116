import numpy as np
import pytest

from qretro.measure import (
    MeasureError,
    Partition,
    born_probabilities,
    collapse,
    half_space_partition,
    make_rng,
    momentum_stats,
    position_stats,
    reconstruction_fidelity,
    sample_outcome,
    sector_projectors,
    substream_seed,
    uncertainty_product,
    window_projector,
)
from qretro.qcore import (
    Potential,
    WaveFunction,
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
def sym_packet(grid1d):
    return gaussian_packet(grid1d, 0.0, 1.0, 0.0)


class TestWindowProjector:
    def test_full_extent(self, grid1d):
        p = window_projector(grid1d, [-10, 10])
        assert p.mask.all()

    def test_half_window_cell_count(self, grid1d):
        p = window_projector(grid1d, [0, 10])
        assert p.mask.sum() == 128

    def test_empty_intersection(self, grid1d):
        with pytest.raises(MeasureError):
            window_projector(grid1d, [100, 200])


class TestPartition:
    def test_overlap_rejected(self, grid1d):
        a = window_projector(grid1d, [-10, 0.5])
        b = window_projector(grid1d, [0, 10])
        with pytest.raises(MeasureError):
            Partition([a, b])

    def test_gap_rejected(self, grid1d):
        a = window_projector(grid1d, [-10, -1])
        b = window_projector(grid1d, [1, 10])
        with pytest.raises(MeasureError):
            Partition([a, b])


class TestBornProbabilities:
    def test_full_space(self, grid1d, sym_packet):
        part = Partition([window_projector(grid1d, [-10, 10])])
        assert born_probabilities(sym_packet, part) == pytest.approx([1.0])

    def test_symmetric_half_split(self, grid1d, sym_packet):
        p = born_probabilities(sym_packet, half_space_partition(grid1d))
        assert p == pytest.approx([0.5, 0.5], abs=1e-9)

    def test_weighted_two_bump_state(self, grid1d):
        a = gaussian_packet(grid1d, -5.0, 0.5, 0.0)
        b = gaussian_packet(grid1d, 5.0, 0.5, 0.0)
        psi = normalize(WaveFunction(
            grid1d, np.sqrt(0.36) * a.psi + np.sqrt(0.64) * b.psi))
        part = Partition([window_projector(grid1d, [-10, 0]),
                          window_projector(grid1d, [0, 10])])
        p = born_probabilities(psi, part)
        assert p == pytest.approx([0.36, 0.64], abs=1e-6)

    def test_sums_to_one(self, grid1d):
        wf = gaussian_packet(grid1d, 1.0, 0.8, 2.0)
        cuts = [-10, -3, -1, 0.5, 2, 10]
        part = Partition([window_projector(grid1d, [a, b - 1e-12])
                          for a, b in zip(cuts, cuts[1:])])
        assert born_probabilities(wf, part).sum() == pytest.approx(1.0,
                                                                   abs=1e-12)


class TestCollapse:
    def test_full_space_identity(self, grid1d, sym_packet):
        p = window_projector(grid1d, [-10, 10])
        out = collapse(sym_packet, p)
        assert np.max(np.abs(out.psi - sym_packet.psi)) < 1e-12

    def test_half_space_weight(self, grid1d, sym_packet):
        p = window_projector(grid1d, [0, 10])
        assert np.sqrt(p.weight(sym_packet)) == pytest.approx(np.sqrt(0.5),
                                                              abs=1e-6)

    def test_null_weight(self, grid1d, sym_packet):
        p = window_projector(grid1d, [9, 10])
        with pytest.raises(MeasureError):
            collapse(sym_packet, p)

    def test_idempotent(self, grid1d, sym_packet):
        p = window_projector(grid1d, [0, 10])
        once = collapse(sym_packet, p)
        twice = collapse(once, p)
        assert np.max(np.abs(twice.psi - once.psi)) < 1e-12

    def test_support_confined(self, grid1d, sym_packet):
        p = window_projector(grid1d, [0, 10])
        out = collapse(sym_packet, p)
        assert np.all(out.psi[~p.mask] == 0)
        assert out.time == sym_packet.time


class TestSampling:
    def test_deterministic_single_bin(self, grid1d, sym_packet):
        part = Partition([window_projector(grid1d, [-10, 10])])
        for seed in (0, 1, 17):
            assert sample_outcome(sym_packet, part, seed).index == 0

    def test_fifty_fifty_frequency(self):
        # small grid keeps 1e5 independent-substream draws cheap
        g = make_grid(1, [-10, 10], 16)
        even = normalize(WaveFunction(g, np.ones(16, dtype=complex)))
        part = half_space_partition(g)
        draws = 10**5
        hits = sum(sample_outcome(even, part, substream_seed(123, i)).index
                   for i in range(draws))
        assert abs(hits / draws - 0.5) < 0.005  # 3 sigma binomial

    def test_same_seed_reproducible(self, grid1d, sym_packet):
        part = half_space_partition(grid1d)
        a = sample_outcome(sym_packet, part, 42)
        b = sample_outcome(sym_packet, part, 42)
        assert a.index == b.index
        assert np.array_equal(a.post_state.psi, b.post_state.psi)

    def test_outcome_json(self, grid1d, sym_packet):
        part = half_space_partition(grid1d)
        out = sample_outcome(sym_packet, part, 7).to_json()
        assert set(out) == {"index", "probability", "seed"}


class TestStats:
    def test_minimal_gaussian(self, grid1d, sym_packet):
        _, sx = position_stats(sym_packet)
        _, sp = momentum_stats(sym_packet)
        assert sx[0] == pytest.approx(1.0, rel=5e-3)
        assert sp[0] == pytest.approx(0.5, rel=5e-3)
        assert sx[0] * sp[0] == pytest.approx(0.5, rel=5e-3)

    def test_plane_wave_momentum_sharp(self, grid1d):
        wf = plane_wave(grid1d, 1.2566)
        _, sp = momentum_stats(wf)
        assert sp[0] < 2 * np.pi / 20 * 0.01

    def test_post_collapse_momentum_floor(self, grid1d, sym_packet):
        w = 0.5
        p = window_projector(grid1d, [-w / 2, w / 2])
        out = collapse(sym_packet, p)
        _, sp = momentum_stats(out)
        assert sp[0] >= 1.0 / (2 * w)

    def test_uncertainty_floor_various_states(self, grid1d):
        states = [
            gaussian_packet(grid1d, 0.0, 1.0, 0.0),
            gaussian_packet(grid1d, -2.0, 0.5, 3.0),
            collapse(gaussian_packet(grid1d, 0.0, 1.0, 0.0),
                     window_projector(grid1d, [-0.25, 0.25])),
        ]
        for wf in states:
            assert uncertainty_product(wf) >= 0.5 * (1 - 1e-3)


class TestReconstructionFidelity:
    def test_full_space_projector(self, grid1d, sym_packet):
        V = Potential(grid1d, "free")
        p = window_projector(grid1d, [-10, 10])
        fid = reconstruction_fidelity(sym_packet, V, 1.0, p, 1e-3)
        assert fid >= 1 - 1e-10

    def test_half_space_sqrt_half(self, grid1d, sym_packet):
        V = Potential(grid1d, "free")
        p = window_projector(grid1d, [0, 10])
        fid = reconstruction_fidelity(sym_packet, V, 1.0, p, 1e-3)
        assert fid == pytest.approx(np.sqrt(0.5), abs=1e-6)

    def test_equals_projected_weight(self, grid1d):
        wf = gaussian_packet(grid1d, -1.0, 1.2, 0.7)
        V = Potential(grid1d, "free")
        p = window_projector(grid1d, [0.5, 10])
        psiT = evolve(wf, V, 1.0, 1e-3, snapshot_stride=10**9).snapshots[-1]
        fid = reconstruction_fidelity(wf, V, 1.0, p, 1e-3)
        assert fid == pytest.approx(np.sqrt(p.weight(psiT)), abs=1e-8)

    def test_swave_sector(self):
        g = make_grid(2, [-10, 10], 256)
        V = Potential(g, "free")
        wf = gaussian_packet(g, [0.0, 0.0], 1.5, [0.0, 0.0])
        sectors = sector_projectors(g, 8)
        psiT = evolve(wf, V, 0.5, 0.01, snapshot_stride=10**9).snapshots[-1]
        fid = reconstruction_fidelity(wf, V, 0.5, sectors[3], 0.01)
        assert fid == pytest.approx(np.sqrt(sectors[3].weight(psiT)), abs=1e-4)
        assert fid == pytest.approx(np.sqrt(0.125), abs=1e-3)


class TestSectors:
    def test_masks_partition_grid(self):
        g = make_grid(2, [-10, 10], 128)
        Partition(sector_projectors(g, 8))  # validates cover + disjoint

    def test_symmetric_weights(self):
        g = make_grid(2, [-10, 10], 256)
        wf = gaussian_packet(g, [0.0, 0.0], 1.5, [0.0, 0.0])
        p = born_probabilities(wf, Partition(sector_projectors(g, 8)))
        assert np.allclose(p, 0.125, atol=1e-3)


class TestRngPlumbing:
    def test_substreams_differ(self):
        assert substream_seed(1, 0) != substream_seed(1, 1)
        assert substream_seed(1, 0) == substream_seed(1, 0)

    def test_named_generator(self):
        rng = make_rng(5)
        assert isinstance(rng.bit_generator, np.random.PCG64)

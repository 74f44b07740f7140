"""Path simulation: determinism, invariants, persistence, estimators.

The stochastic engine is pinned down through bitwise reproducibility,
batch-prefix stability, exact drift decomposition, and closed-form checks
of the empirical functionals.
"""

import math

import numpy as np
import pytest

from detproc import dynamics as dyn
from detproc.errors import (
    DomainError,
    SimulationError,
    ValidationError,
)
from detproc.kernels import DriftDensity, SpaceTimePoint


GRID = (0.0, 0.15, 0.3)


def small_dyson(R=200, seed=77, N=2, grid=GRID):
    return dyn.simulate_dyson(N, "origin", grid, 0.01, R, seed=seed)


class TestDeterminism:
    def test_bitwise_reproducible(self):
        a = small_dyson()
        b = small_dyson()
        assert np.array_equal(a.positions, b.positions)

    def test_seed_changes_the_paths(self):
        a = small_dyson(seed=77)
        b = small_dyson(seed=78)
        assert not np.array_equal(a.positions, b.positions)

    def test_replica_prefix_is_stable_under_extension(self):
        # the noise stream is keyed by batch, so the first batch of a
        # larger run reproduces the smaller run exactly
        small = small_dyson(R=dyn.BATCH_WIDTH)
        large = small_dyson(R=2 * dyn.BATCH_WIDTH)
        assert np.array_equal(
            small.positions, large.positions[: dyn.BATCH_WIDTH]
        )

    def test_replica_offset_addresses_later_batches(self):
        tail = dyn.simulate_dyson(
            2, "origin", GRID, 0.01, dyn.BATCH_WIDTH, seed=77,
            replica_offset=dyn.BATCH_WIDTH,
        )
        large = small_dyson(R=2 * dyn.BATCH_WIDTH)
        assert np.array_equal(tail.positions, large.positions[dyn.BATCH_WIDTH:])

    def test_checkpoint_stride_is_a_batch_multiple(self):
        assert dyn.CHECKPOINT_REPLICAS % dyn.BATCH_WIDTH == 0


class TestPathInvariants:
    def test_particles_stay_ordered(self):
        ens = dyn.simulate_dyson(4, "origin", GRID, 0.01, 100, seed=3)
        gaps = np.diff(ens.positions, axis=2)
        assert np.all(gaps[:, 1:, :] > 0.0)  # after leaving the origin
        assert ens.violations == 0

    @pytest.mark.parametrize("nu", [0.0, 0.5, 1.0])
    def test_squared_radius_paths_stay_nonnegative(self, nu):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ens = dyn.simulate_besq(2, nu, "origin", GRID, 0.005, 100, seed=11)
        assert np.all(ens.positions >= 0.0)

    def test_explicit_start_is_recorded_exactly(self):
        x0 = [-1.5, 0.25, 2.0]
        ens = dyn.simulate_dyson(3, x0, GRID, 0.01, 50, seed=5)
        np.testing.assert_array_equal(
            ens.positions[:, 0, :], np.tile(np.array(x0), (50, 1))
        )
        assert ens.x0_label != "origin"

    def test_drifted_paths_are_base_paths_plus_exact_shift(self):
        N = 2
        base = small_dyson(N=N)
        drift = DriftDensity.semicircle(N)
        carried = dyn.simulate_drifted(
            N, "origin", GRID, 0.01, 200, seed=77, drift=drift
        )
        shift = np.asarray(GRID) ** 2 / 4.0 + np.asarray(GRID) * (
            -float(N) ** (1.0 / 3.0)
        )
        assert np.array_equal(
            carried.positions, base.positions + shift[None, :, None]
        )

    def test_validation(self):
        with pytest.raises(ValidationError):
            dyn.simulate_dyson(2, "origin", (0.1, 0.3), 0.01, 10, seed=1)
        with pytest.raises(ValidationError):
            dyn.simulate_dyson(2, "origin", (0.0, 0.3, 0.2), 0.01, 10, seed=1)
        with pytest.raises(ValidationError):
            dyn.simulate_dyson(2, "origin", GRID, 0.0, 10, seed=1)
        with pytest.raises(ValidationError):
            dyn.simulate_dyson(0, "origin", GRID, 0.01, 10, seed=1)
        with pytest.raises(ValidationError):
            dyn.simulate_dyson(2, "origin", GRID, 0.01, 0, seed=1)
        with pytest.raises(ValidationError):
            dyn.simulate_dyson(2, "origin", GRID, 0.01, 10, seed=1, replica_offset=7)
        with pytest.raises(ValidationError):
            dyn.simulate_dyson(2, [0.5, 0.5], GRID, 0.01, 10, seed=1)
        with pytest.raises(DomainError):
            dyn.simulate_besq(2, -1.5, "origin", GRID, 0.01, 10, seed=1)
        with pytest.raises(DomainError):
            dyn.simulate_besq(2, 0.5, [-1.0, 2.0], GRID, 0.01, 10, seed=1)
        with pytest.raises(ValidationError):
            dyn.simulate_drifted(2, "origin", GRID, 0.01, 10, seed=1, drift=None)


class TestPathEnsemble:
    def test_time_lookup(self):
        ens = small_dyson(R=50)
        assert ens.T == 3
        assert ens.time_index(0.15) == 1
        np.testing.assert_array_equal(
            ens.positions_at(0.3), ens.positions[:, 2, :]
        )
        with pytest.raises(ValidationError):
            ens.time_index(0.2)

    def test_save_load_round_trip_is_bitwise(self, tmp_path):
        ens = small_dyson(R=50)
        path = tmp_path / "paths.bin"
        ens.save(path)
        assert (tmp_path / "paths.bin.json").exists()
        back = dyn.PathEnsemble.load(path)
        assert back.model == ens.model
        assert back.N == ens.N and back.R == ens.R and back.seed == ens.seed
        assert back.nu is None
        np.testing.assert_array_equal(back.positions, ens.positions)
        np.testing.assert_array_equal(back.t_grid, ens.t_grid)

    def test_load_rejects_foreign_files(self, tmp_path):
        sidecar = '{"t_grid": [0.0], "dt_max": 0.01}'
        truncated = tmp_path / "short.bin"
        truncated.write_bytes(b"\x00" * 16)
        (tmp_path / "short.bin.json").write_text(sidecar)
        with pytest.raises(ValidationError):
            dyn.PathEnsemble.load(truncated)
        bad_magic = tmp_path / "bogus.bin"
        bad_magic.write_bytes(b"\x00" * 128)
        (tmp_path / "bogus.bin.json").write_text(sidecar)
        with pytest.raises(ValidationError):
            dyn.PathEnsemble.load(bad_magic)

    def test_csv_slice_format(self, tmp_path):
        ens = small_dyson(R=3)
        path = tmp_path / "slice.csv"
        ens.to_csv(path, 0.3)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,replica,particle,position"
        assert len(lines) == 1 + 3 * 2
        fields = lines[1].split(",")
        assert float(fields[0]) == 0.3
        assert fields[1] == "0" and fields[2] == "0"
        assert float(fields[3]) == ens.positions[0, 2, 0]


class TestEstimators:
    def test_histogram_mass_matches_particle_count(self):
        ens = small_dyson(R=400)
        hist = dyn.empirical_density(ens, 0.3, np.linspace(-4.0, 4.0, 17))
        assert math.isclose(
            float(np.sum(hist.density * np.diff(hist.edges))), 2.0, rel_tol=1e-12
        )
        assert hist.t == 0.3
        assert np.all(hist.std_error >= 0.0)

    def test_generating_functional_constant_exponent_is_exact(self):
        ens = small_dyson(R=100)
        c = 0.3
        est, se = dyn.empirical_mgf(
            ens, [0.15, 0.3], [lambda x: np.full_like(x, c)] * 2
        )
        # two times, N particles each: the weight is deterministic
        assert est == pytest.approx(math.exp(2 * 2 * c), rel=1e-13)
        assert se == pytest.approx(0.0, abs=1e-12)

    def test_generating_functional_overflow_raises(self):
        ens = small_dyson(R=10)
        with pytest.raises(SimulationError):
            dyn.empirical_mgf(ens, [0.3], [lambda x: np.full_like(x, 400.0)])

    def test_generating_functional_validation(self):
        ens = small_dyson(R=10)
        with pytest.raises(ValidationError):
            dyn.empirical_mgf(ens, [0.3], [])
        with pytest.raises(ValidationError):
            dyn.empirical_mgf(ens, [0.21], [lambda x: x])


class TestScalingMap:
    def test_center_times_and_positions(self):
        p = SpaceTimePoint(t=1.0, x=0.5)
        bulk = dyn.scaling_map(p, "bulk", 64)
        assert bulk.t == pytest.approx(64.0 / math.pi**2 + 1.0, rel=1e-15)
        assert bulk.x == 0.5
        hard = dyn.scaling_map(p, "hard_edge", 64)
        assert hard.t == pytest.approx(33.0, rel=1e-15)
        assert hard.x == 0.5
        soft = dyn.scaling_map(p, "soft_edge", 64)
        assert soft.t == pytest.approx(5.0, rel=1e-15)
        assert soft.x == pytest.approx(32.0 + 4.0 - 0.25 + 0.5, rel=1e-15)

    def test_validation(self):
        p = SpaceTimePoint(t=0.0, x=0.0)
        with pytest.raises(ValidationError):
            dyn.scaling_map(p, "corner", 8)
        with pytest.raises(ValidationError):
            dyn.scaling_map(p, "bulk", 0)

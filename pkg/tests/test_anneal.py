import io

import numpy as np
import pytest

import beaconplan as bp
from beaconplan.anneal import SaConfig, _move, _random_layout, write_history_csv


@pytest.fixture
def small_problem(channel):
    plan = bp.Floorplan(20.0, 10.0)
    grid = bp.GridSpec.for_floorplan(plan, 2.0)
    return channel, plan, grid


class TestObjective:
    def test_matches_map_mean_plus_penalty(self, small_problem):
        ch, plan, grid = small_problem
        rng = np.random.default_rng(1)
        cfg = SaConfig(beacon_count=4, unbounded_penalty=20.0)
        layout = _random_layout(rng, plan, 4)
        emap = bp.rss_error_map(ch, layout, grid)
        mask = emap.bounded_mask()
        frac_unbounded = 1.0 - mask.mean()
        expected = float(emap.values[mask].mean()) + 20.0 * frac_unbounded
        assert bp.objective(ch, layout, grid, cfg) == pytest.approx(expected, rel=1e-12)

    def test_penalty_charged_per_unbounded_cell(self):
        # most of the corridor is out of earshot: objective = mean + 20 * fraction
        ch = bp.ChannelModel(beta=3.0, sigma=1.732, p0=-59.0, sensitivity=-75.0)
        plan = bp.Floorplan(40.0, 4.0)
        grid = bp.GridSpec.for_floorplan(plan, 2.0)
        layout = bp.BeaconLayout(
            plan,
            [bp.Beacon("a", bp.Point2(2.0, 1.0)), bp.Beacon("b", bp.Point2(5.0, 3.0))],
        )
        cfg = SaConfig(beacon_count=2, unbounded_penalty=20.0)
        emap = bp.rss_error_map(ch, layout, grid)
        mask = emap.bounded_mask()
        assert 0 < mask.sum() < grid.cell_count
        expected = float(emap.values[mask].mean()) + 20.0 * (1.0 - mask.mean())
        assert bp.objective(ch, layout, grid, cfg) == pytest.approx(expected, rel=1e-12)

    def test_all_unbounded_scores_full_penalty(self, channel):
        plan = bp.Floorplan(10.0, 10.0)
        grid = bp.GridSpec.for_floorplan(plan, 2.0)
        layout = bp.BeaconLayout(plan, [bp.Beacon("a", bp.Point2(5.0, 5.0))])
        cfg = SaConfig(beacon_count=1, unbounded_penalty=20.0)
        assert bp.objective(channel, layout, grid, cfg) == 20.0

    def test_removing_a_beacon_increases_objective(self, symmetric_scene):
        ch, layout, _ = symmetric_scene
        grid = bp.GridSpec.for_floorplan(layout.floorplan, 2.0)
        cfg = SaConfig(beacon_count=4)
        full = bp.objective(ch, layout, grid, cfg)
        reduced_layout = bp.BeaconLayout(layout.floorplan, layout.beacons[:-1])
        reduced = bp.objective(ch, reduced_layout, grid, cfg)
        assert reduced > full

    def test_fused_objective_needs_pdr(self, small_problem):
        ch, plan, grid = small_problem
        layout = _random_layout(np.random.default_rng(0), plan, 3)
        cfg = SaConfig(beacon_count=3, objective="mean_fused_error")
        with pytest.raises(ValueError, match="pdr"):
            bp.objective(ch, layout, grid, cfg)
        pdr = bp.PdrParams(step_length=0.625, dmax=0.0283, sigma_sn=0.0446)
        fused_obj = bp.objective(ch, layout, grid, cfg, pdr)
        rss_obj = bp.objective(ch, layout, grid, SaConfig(beacon_count=3))
        assert fused_obj <= rss_obj


class TestMoves:
    def test_moves_stay_inside_floorplan(self, small_problem):
        _, plan, _ = small_problem
        rng = np.random.default_rng(6)
        layout = _random_layout(rng, plan, 3)
        for _ in range(500):
            layout = _move(rng, layout, move_sigma=50.0)
            for b in layout.beacons:
                assert plan.contains(b.position)

    def test_move_changes_exactly_one_beacon(self, small_problem):
        _, plan, _ = small_problem
        rng = np.random.default_rng(6)
        layout = _random_layout(rng, plan, 5)
        moved = _move(rng, layout, move_sigma=1.0)
        changed = [
            i for i, (a, b) in enumerate(zip(layout.beacons, moved.beacons)) if a.position != b.position
        ]
        assert len(changed) == 1
        assert [b.id for b in moved.beacons] == [b.id for b in layout.beacons]


class TestAnneal:
    def test_single_eval_returns_initial_layout(self, small_problem):
        ch, plan, grid = small_problem
        cfg = SaConfig(beacon_count=3, max_evals=1, seed=42)
        result = bp.anneal(ch, plan, grid, cfg)
        assert result.evals_used == 1
        assert len(result.history) == 1
        initial = _random_layout(np.random.default_rng(42), plan, 3)
        assert [b.position for b in result.best_layout.beacons] == [
            b.position for b in initial.beacons
        ]
        assert result.best_objective == result.history[0].current

    def test_best_never_worse_than_initial(self, small_problem):
        ch, plan, grid = small_problem
        cfg = SaConfig(beacon_count=4, max_evals=400, seed=3)
        result = bp.anneal(ch, plan, grid, cfg)
        assert result.best_objective <= result.history[0].current

    def test_best_curve_nonincreasing(self, small_problem):
        ch, plan, grid = small_problem
        result = bp.anneal(ch, plan, grid, SaConfig(beacon_count=4, max_evals=600, seed=5))
        bests = [h.best for h in result.history]
        assert all(b <= a for a, b in zip(bests, bests[1:]))
        assert result.best_objective == bests[-1]

    def test_reproducible_history(self, small_problem):
        ch, plan, grid = small_problem
        cfg = SaConfig(beacon_count=4, max_evals=300, seed=99)
        a = bp.anneal(ch, plan, grid, cfg)
        b = bp.anneal(ch, plan, grid, cfg)
        buf_a, buf_b = io.StringIO(), io.StringIO()
        write_history_csv(buf_a, a)
        write_history_csv(buf_b, b)
        assert buf_a.getvalue() == buf_b.getvalue()
        assert a.best_objective == b.best_objective

    def test_temperature_schedule_geometric(self, small_problem):
        ch, plan, grid = small_problem
        cfg = SaConfig(beacon_count=3, max_evals=500, seed=7, iters_per_temp=50)
        result = bp.anneal(ch, plan, grid, cfg)
        t0 = result.history[0].temperature
        for h in result.history[1:]:
            block = (h.eval_index - 1) // cfg.iters_per_temp
            assert h.temperature == pytest.approx(t0 * cfg.cooling_factor**block, rel=1e-12)

    def test_explicit_initial_temperature(self, small_problem):
        ch, plan, grid = small_problem
        cfg = SaConfig(beacon_count=3, max_evals=120, seed=7, initial_temp=2.5)
        result = bp.anneal(ch, plan, grid, cfg)
        assert result.history[0].temperature == 2.5

    def test_beats_random_baseline_quickly(self, small_problem):
        ch, plan, grid = small_problem
        cfg = SaConfig(beacon_count=4, max_evals=1500, seed=11)
        result = bp.anneal(ch, plan, grid, cfg)
        rng = np.random.default_rng(1234)
        baseline = min(
            bp.objective(ch, _random_layout(rng, plan, 4), grid, cfg) for _ in range(20)
        )
        assert result.best_objective <= baseline

    def test_progress_callback_sees_every_eval(self, small_problem):
        ch, plan, grid = small_problem
        seen = []
        bp.anneal(
            ch, plan, grid, SaConfig(beacon_count=2, max_evals=50, seed=2),
            progress=lambda evals, best: seen.append((evals, best)),
        )
        assert [e for e, _ in seen] == list(range(1, len(seen) + 1))
        bests = [b for _, b in seen]
        assert all(b2 <= b1 for b1, b2 in zip(bests, bests[1:]))

    def test_history_csv_format(self, small_problem):
        ch, plan, grid = small_problem
        result = bp.anneal(ch, plan, grid, SaConfig(beacon_count=2, max_evals=5, seed=1))
        buf = io.StringIO()
        write_history_csv(buf, result)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "eval,current,best,temperature"
        assert len(lines) == len(result.history) + 1
        assert lines[1].split(",")[0] == "0"

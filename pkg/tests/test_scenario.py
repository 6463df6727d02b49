import json
import math

import pytest

from navbench.scenario import ScenarioError, list_bundled, load_scenario, scenario_from_dict


def minimal_dict():
    return {
        "schema_version": 1,
        "world": {
            "bounds": [10.0, 10.0],
            "start": {"x": 2.0, "y": 2.0, "theta": 0.0},
            "goal": [8.0, 8.0],
            "goal_radius": 0.4,
        },
    }


def test_bundled_scenarios_load_and_validate():
    assert set(list_bundled()) == {"arena_10x15", "arena_25x25"}
    small = load_scenario("arena_10x15")
    assert small.world.bounds == (10.0, 15.0)
    assert small.world.limits.v_max == 1.2
    assert small.world.limits.omega_max == 1.57
    assert small.training.episodes == 3300
    assert small.training.max_steps == 300
    assert small.training.pose_reshuffle_every == 20
    assert sum(1 for ob in small.world.obstacles if ob.kind == "dynamic") == 3
    big = load_scenario("arena_25x25")
    assert big.world.bounds == (25.0, 25.0)
    # same obstacle count in the large arena
    assert len(big.world.obstacles) == len(small.world.obstacles)


def test_minimal_scenario_gets_defaults():
    s = scenario_from_dict(minimal_dict(), "mini")
    assert s.sensor.n_beams == 20
    assert s.sensor.max_range == 5.0
    assert s.dwa.n_v == 7 and s.dwa.n_w == 11
    assert s.td3.gamma == 0.99
    assert s.td3.eps_decay == 0.992
    assert s.reward.r_goal == 100.0
    assert s.world.dt == 0.1


def test_unknown_top_level_key_rejected():
    data = minimal_dict()
    data["extra"] = 1
    with pytest.raises(ScenarioError, match="extra"):
        scenario_from_dict(data, "bad")


def test_unknown_nested_key_rejected():
    data = minimal_dict()
    data["world"]["gravity"] = 9.8
    with pytest.raises(ScenarioError, match="gravity"):
        scenario_from_dict(data, "bad")
    data = minimal_dict()
    data["td3"] = {"learning_rate": 1e-3}
    with pytest.raises(ScenarioError, match="learning_rate"):
        scenario_from_dict(data, "bad")


def test_bad_schema_version_rejected():
    data = minimal_dict()
    data["schema_version"] = 2
    with pytest.raises(ScenarioError, match="schema_version"):
        scenario_from_dict(data, "bad")


def test_invariant_violations_rejected():
    data = minimal_dict()
    data["world"]["dt"] = 0.0
    with pytest.raises(ScenarioError):
        scenario_from_dict(data, "bad")

    data = minimal_dict()
    data["world"]["obstacles"] = [
        {"shape": "circle", "center": [2.0, 2.0], "radius": 0.5}]
    with pytest.raises(ScenarioError, match="collision"):
        scenario_from_dict(data, "bad")

    data = minimal_dict()
    data["world"]["obstacles"] = [
        {"shape": "circle", "kind": "dynamic", "radius": 0.2, "speed": 0.5,
         "waypoints": [[5.0, 5.0]]}]
    with pytest.raises(ScenarioError, match="waypoint"):
        scenario_from_dict(data, "bad")


def test_non_finite_numbers_rejected():
    data = minimal_dict()
    data["world"]["goal_radius"] = math.nan
    with pytest.raises(ScenarioError):
        scenario_from_dict(data, "bad")


def test_load_from_file_and_missing_name(tmp_path):
    path = tmp_path / "custom.json"
    path.write_text(json.dumps(minimal_dict()))
    s = load_scenario(path)
    assert s.name == "custom"
    with pytest.raises(ScenarioError, match="unknown scenario"):
        load_scenario("no_such_arena")
    broken = tmp_path / "broken.json"
    broken.write_text("{nope")
    with pytest.raises(ScenarioError, match="invalid JSON"):
        load_scenario(broken)


def test_obstacle_parsing_round_trip():
    data = minimal_dict()
    data["world"]["obstacles"] = [
        {"shape": "rect", "min": [5.0, 5.0], "max": [6.0, 6.0]},
        {"shape": "circle", "kind": "dynamic", "radius": 0.3, "speed": 0.5,
         "loop": False, "waypoints": [[4.0, 8.0], [8.0, 4.0]]},
    ]
    s = scenario_from_dict(data, "obs")
    rect, ped = s.world.obstacles
    assert rect.rect_min == (5.0, 5.0) and rect.rect_max == (6.0, 6.0)
    assert ped.kind == "dynamic" and ped.loop is False
    assert ped.waypoints == ((4.0, 8.0), (8.0, 4.0))

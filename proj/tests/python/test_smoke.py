import json
import math

import pytest

import pinch


def test_single_user_takes_full_budget():
    q, t = pinch.maxmin_power([complex(1e-4, 2e-4)], 1e-2, 1e-12)
    assert q == [1e-2]
    assert t == pytest.approx(5e-8 * 1e-2 / 1e-12, rel=1e-12)


def test_maxmin_exhausts_budget_and_equalises():
    gains = [complex(3e-5, 1e-5), complex(-8e-6, 2e-6), complex(1e-6, -4e-6)]
    q, t = pinch.maxmin_power(gains, 1e-3, 1e-12)
    assert sum(q) == pytest.approx(1e-3, rel=1e-9)
    rates = pinch.user_rates(gains, q, 1e-3, 1e-12)
    assert min(rates) == pytest.approx(math.log2(1.0 + t), rel=1e-6)


def test_min_power_reports_infeasible_targets():
    gains = [complex(1e-4, 0.0), complex(2e-4, 0.0)]
    assert pinch.min_power(gains, 1e9, 1e-3, 1e-12) is None
    q = pinch.min_power(gains, 1.0, 1e-3, 1e-12)
    assert all(v > 0.0 for v in q)


def test_projection():
    assert pinch.simplex_project([2.0, 2.0], 2.0) == [1.0, 1.0]
    assert pinch.simplex_project([0.2, 0.3], 1.0) == [0.2, 0.3]


def test_zero_gain_raises():
    with pytest.raises(pinch.DegenerateChannel):
        pinch.maxmin_power([0j, 1e-6 + 0j], 1.0, 1e-12)


def test_placement_and_channels():
    cfg = pinch.SystemConfig()
    cfg.users = 1
    cfg.antennas = 1
    out = pinch.optimize_placement([(1.5, -2.0)], cfg)
    assert out["antenna_xs"][0] == pytest.approx(1.5, abs=1e-6)
    assert out["sr_final"] >= out["sr_init"]
    g = pinch.channel_gains([(1.5, -2.0)], out["antenna_xs"], cfg)
    assert abs(g[0]) ** 2 == pytest.approx(cfg.eta / (4.0 + cfg.height_m**2), rel=1e-9)


def test_config_errors_surface():
    with pytest.raises(pinch.ConfigError, match="system.users"):
        pinch.system_from_json(json.dumps({"system": {"users": 0}}))


def test_small_sweep_is_reproducible():
    cfg = json.dumps(
        {
            "system": {"users": 2, "antennas": 2},
            "experiment": {"schemes": ["C-NOMA", "C-OMA"], "sweep_values": [10, 20], "trials": 3},
        }
    )
    a = pinch.run_sweep(cfg)
    b = pinch.run_sweep(cfg)
    assert len(a) == 12
    assert a == b

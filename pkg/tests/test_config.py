"""Strict JSON config validation and coefficient materialization."""

import json

import numpy as np
import pytest

from membrana.config import ConfigError, config_from_dict, load_config


def base_config(**overrides):
    data = {
        "geometry": {"kind": "two_interval", "bounds": [0.0, 0.5, 1.0],
                     "nodes": [9, 9]},
        "gamma1": 1.0,
        "gamma2": 2.0,
    }
    data.update(overrides)
    return data


def test_minimal_config_builds_geometry():
    cfg = config_from_dict(base_config())
    assert cfg.geometry.kind == "two_interval"
    assert cfg.geometry.mesh1.size == 9
    assert cfg.output_dir == "out"
    assert cfg.seed == 0
    assert cfg.gammas() == (1.0, 2.0)


def test_radial_geometry_with_dim():
    cfg = config_from_dict({
        "geometry": {"kind": "concentric_radial", "bounds": [1.0, 2.0],
                     "nodes": [5, 5], "dim": 3}})
    assert cfg.geometry.dim == 3
    assert cfg.geometry.interface_coordinate == 1.0


def test_unknown_keys_rejected_everywhere():
    with pytest.raises(ConfigError, match="unknown config"):
        config_from_dict(base_config(extra=1))
    bad_geo = base_config()
    bad_geo["geometry"] = dict(bad_geo["geometry"], refine=2)
    with pytest.raises(ConfigError, match="unknown geometry"):
        config_from_dict(bad_geo)
    with pytest.raises(ConfigError, match="unknown tolerances"):
        config_from_dict(base_config(tolerances={"newton_tol": 1e-8}))


def test_geometry_must_be_complete_and_valid():
    with pytest.raises(ConfigError, match="geometry"):
        config_from_dict({"gamma1": 1.0})
    with pytest.raises(ConfigError, match="kind"):
        config_from_dict({"geometry": {"bounds": [0, 1, 2], "nodes": [5, 5]}})
    with pytest.raises(ConfigError, match="bad geometry"):
        config_from_dict({"geometry": {"kind": "two_interval",
                                       "bounds": [1.0, 0.5, 0.0],
                                       "nodes": [5, 5]}})


def test_root_must_be_an_object():
    with pytest.raises(ConfigError):
        config_from_dict([1, 2, 3])


def test_tolerances_must_be_positive_numbers():
    with pytest.raises(ConfigError):
        config_from_dict(base_config(tolerances={"stop_tol": 0.0}))
    with pytest.raises(ConfigError):
        config_from_dict(base_config(tolerances={"stop_tol": True}))
    cfg = config_from_dict(base_config(tolerances={"stop_tol": 1e-9}))
    assert cfg.tolerances == {"stop_tol": 1e-9}


def test_seed_and_output_dir_types():
    with pytest.raises(ConfigError):
        config_from_dict(base_config(seed=1.5))
    with pytest.raises(ConfigError):
        config_from_dict(base_config(seed=True))
    with pytest.raises(ConfigError):
        config_from_dict(base_config(output_dir=7))
    cfg = config_from_dict(base_config(seed=11, output_dir="elsewhere"))
    assert cfg.seed == 11 and cfg.output_dir == "elsewhere"


def test_number_accessor_rejects_non_numbers():
    cfg = config_from_dict(base_config(d=2.5))
    assert cfg.number("d") == 2.5
    assert cfg.number("missing", 3.0) == 3.0
    with pytest.raises(ConfigError):
        cfg.number("absent")
    with pytest.raises(ConfigError):
        config_from_dict(base_config(d="two")).number("d")
    with pytest.raises(ConfigError):
        config_from_dict(base_config(d=True)).number("d")


def test_number_list_accessor():
    cfg = config_from_dict(base_config(d_list=[1, 2.5]))
    assert cfg.number_list("d_list") == [1.0, 2.5]
    for bad in ([], [1, "x"], [1, True], "1,2", None):
        with pytest.raises(ConfigError):
            config_from_dict(base_config(d_list=bad)).number_list("d_list")


def test_coefficient_compiles_against_the_mesh():
    cfg = config_from_dict(base_config(c1="1 + sin(3*x)"))
    f = cfg.coefficient("c1", 1)
    np.testing.assert_allclose(f.values, 1.0 + np.sin(3.0 * cfg.geometry.mesh1))
    g = cfg.coefficient("c2", 2, default="0")
    assert g.side == 2 and g.max() == 0.0


def test_coefficient_errors_are_config_errors():
    cfg = config_from_dict(base_config(c1="1 +"))
    with pytest.raises(ConfigError, match="c1"):
        cfg.coefficient("c1", 1)
    with pytest.raises(ConfigError, match="missing"):
        cfg.coefficient("c2", 2)
    with pytest.raises(ConfigError, match="expression string"):
        config_from_dict(base_config(c2=4)).coefficient("c2", 2)


def test_coefficient_pair_spans_both_sides():
    cfg = config_from_dict(base_config(alpha1="1", alpha2="2 + x"))
    pair = cfg.coefficient_pair("alpha1", "alpha2")
    assert pair.u1.side == 1 and pair.u2.side == 2
    np.testing.assert_allclose(pair.u2.values, 2.0 + cfg.geometry.mesh2)


def test_gammas_must_be_positive():
    with pytest.raises(ConfigError):
        config_from_dict(base_config(gamma1=0.0)).gammas()
    with pytest.raises(ConfigError):
        config_from_dict(base_config(gamma2=-1.0)).gammas()


def test_require_reports_all_missing_keys():
    cfg = config_from_dict(base_config(d=1.0))
    assert cfg.require("d") == 1.0
    with pytest.raises(ConfigError, match="lambda2"):
        cfg.require("d", "lambda2")


def test_load_config_file_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "absent.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(str(bad))
    good = tmp_path / "good.json"
    good.write_text(json.dumps(base_config()))
    cfg = load_config(str(good))
    assert cfg.geometry.mesh2.size == 9

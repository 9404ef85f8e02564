import json
import math
from pathlib import Path

import pytest

from gwfql.config import ConfigError, RunConfig, load_config, parse_config
from gwfql.sky import Direction


def test_defaults_build_everything():
    cfg = RunConfig()
    m = cfg.detector_model()
    assert m.N_photons == pytest.approx(1e20, rel=1e-12)
    assert len(cfg.noise_spectrum(m).omega) == 5001
    assert cfg.sky_quadrature().size == 2048
    assert cfg.bath_model().white
    assert len(cfg.sample_directions()) == 5


def test_shipped_default_matches_builtin():
    path = Path(__file__).resolve().parents[1] / "configs" / "default.json"
    assert load_config(path).to_dict() == RunConfig().to_dict()


def _detector(**over):
    d = {"omega0": 1.0e15, "L": 4000.0, "M": 40.0, "gamma_cav": 200.0, "N_photons": 1e18}
    d.update(over)
    return d


def test_missing_field_is_named():
    d = _detector()
    del d["M"]
    with pytest.raises(ConfigError, match=r"detector\.M"):
        parse_config({"detector": d})


@pytest.mark.parametrize(
    "raw, match",
    [
        ({"detectr": {}}, "unknown top-level"),
        ({"grid": {"n_pts": 3}}, "unknown key"),
        ({"grid": {"omega_min": "1"}}, "finite number"),
        ({"grid": {"omega_min": 10.0, "omega_max": 1.0}}, "omega_max"),
        ({"grid": {"n_points": 2.5}}, "integer"),
        ({"grid": {"include_zero": 1}}, "true/false"),
        ({"detector": _detector(M=-1.0)}, r"detector\.M"),
        ({"detector": _detector(alpha_bar=1.0)}, "exactly one"),
        ({"spectrum": {"model": "csv"}}, "path"),
        ({"spectrum": {"model": "white"}}, "one of"),
        ({"signal": {"polarization": "left"}}, "one of"),
        ({"bath": {"kind": "isotropic"}}, "strength"),
        ({"bath": {"kind": "cap", "strength": 1.0, "axis": [0, 0, 0], "half_angle": 0.1}}, "axis"),
        ({"bath": {"kind": "cap", "strength": 1.0, "axis": [1, 0, 0], "half_angle": 4.0}}, "half_angle"),
        ({"simulation": {"n_fock": 0}}, "n_fock"),
        ({"simulation": {"lambda_override": -1.0}}, "lambda_override"),
        ({"sky": {"sample_directions": [[0.0]]}}, "sample_directions"),
        ({"seed": 1.5}, "seed"),
        ([], "object"),
    ],
)
def test_schema_errors(raw, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(raw)


def test_alpha_bar_alternative():
    d = _detector(alpha_bar=2e-7)
    del d["N_photons"]
    cfg = parse_config({"detector": d})
    assert cfg.detector_model().alpha_bar == 2e-7


def test_overrides_and_bath_kinds():
    cfg = parse_config(
        {
            "bath": {"kind": "cap", "strength": 2.0, "axis": [1, 0, 0], "half_angle": 0.5, "scale": 3.0, "beta": None},
            "simulation": {"beta_c": 0.0, "lambda_override": 0.1},
            "seed": 7,
        }
    )
    b = cfg.bath_model()
    assert b.at(Direction(math.pi / 2, 0.0)) == 6.0
    assert cfg.seed == 7 and cfg.simulation.lambda_override == 0.1


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="valid JSON"):
        load_config(bad)
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"grid": {"n_points": 100}}))
    assert load_config(good).grid.n_points == 100
    assert load_config(None).grid.n_points == 5000

import json
from pathlib import Path

import numpy as np
import pytest

from levydual.config import (
    ConfigError,
    build_model,
    build_payoff,
    load_config,
    model_dim,
    parse_config,
)
from levydual.models.blackscholes import BlackScholesModel
from levydual.models.gh import GHModel
from levydual.models.merton import MertonModel

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

BS_SWAP = {
    "model": {"kind": "black_scholes", "sigma": [0.3, 0.2],
              "corr": [[1.0, 0.5], [0.5, 1.0]]},
    "trade": {"payoff": "swap", "maturity": 1.0},
}


def doc(**overrides):
    out = json.loads(json.dumps(BS_SWAP))
    for key, value in overrides.items():
        section, _, field = key.partition("__")
        if field:
            out.setdefault(section, {})[field] = value
        else:
            out[section] = value
    return out


class TestParse:
    def test_engine_defaults(self):
        cfg = parse_config(BS_SWAP)
        assert cfg.engine.method == "auto"
        assert cfg.engine.paths == 1_000_000
        assert cfg.engine.seed == 42
        assert cfg.engine.damping == 0.75
        assert cfg.engine.workers == 1
        assert cfg.engine.antithetic is True
        assert cfg.engine.negative_control is False

    def test_missing_maturity_names_its_path(self):
        bad = doc()
        del bad["trade"]["maturity"]
        with pytest.raises(ConfigError, match="trade.maturity"):
            parse_config(bad)

    def test_extra_field_rejected(self):
        with pytest.raises(ConfigError, match="notional"):
            parse_config(doc(trade__notional=100.0))

    def test_unknown_model_kind(self):
        with pytest.raises(ConfigError, match="model"):
            parse_config(doc(model={"kind": "heston", "sigma": [0.2, 0.2]}))

    def test_nonpositive_maturity(self):
        with pytest.raises(ConfigError, match="trade.maturity"):
            parse_config(doc(trade__maturity=0.0))

    def test_seed_and_paths_bounds(self):
        with pytest.raises(ConfigError, match="engine.seed"):
            parse_config(doc(engine={"seed": -1}))
        with pytest.raises(ConfigError, match="engine.paths"):
            parse_config(doc(engine={"paths": 1}))

    def test_strike_required_for_quanto(self):
        bad = doc(trade__payoff="quanto_call")
        with pytest.raises(ConfigError, match="strike required"):
            parse_config(bad)

    def test_strike_forbidden_for_swap(self):
        with pytest.raises(ConfigError, match="strike not allowed"):
            parse_config(doc(trade__strike=1.1))

    def test_payoff_model_dimensions_must_agree(self):
        bad = doc(trade__payoff="quanto_swap")
        with pytest.raises(ConfigError, match="3 assets"):
            parse_config(bad)

    def test_spots_length(self):
        with pytest.raises(ConfigError, match="spots"):
            parse_config(doc(trade__spots=[1.0, 1.0, 1.0]))

    def test_gh_lambda_alias(self):
        cfg = parse_config({
            "model": {"kind": "gh", "lambda": -0.5, "alpha": 5.0,
                      "beta": [0.2, -0.1], "delta": 0.5,
                      "Delta": [[1.0, 0.0], [0.0, 1.0]]},
            "trade": {"payoff": "swap", "maturity": 1.0},
        })
        assert cfg.model.lambda_ == -0.5
        assert model_dim(cfg.model) == 2


class TestBuild:
    def test_black_scholes(self):
        cfg = parse_config(BS_SWAP)
        model = build_model(cfg.model)
        assert isinstance(model, BlackScholesModel)
        assert model.cov[0, 1] == pytest.approx(0.03)
        payoff = build_payoff(cfg.trade)
        assert payoff.kind == "swap" and payoff.strike is None

    def test_merton(self):
        cfg = parse_config({
            "model": {"kind": "merton", "sigma": [0.2, 0.3],
                      "corr": [[1.0, 0.5], [0.5, 1.0]],
                      "lam": [1.0, 1.0], "tau": [1.0, 0.5]},
            "trade": {"payoff": "quanto_call", "maturity": 1.0,
                      "strike": 1.1},
        })
        model = build_model(cfg.model)
        assert isinstance(model, MertonModel)
        assert float(np.real(model.cumulant([1.0, 0.0]))) == \
            pytest.approx(0.0, abs=1e-14)

    def test_gh_auto_calibrates_when_mu_omitted(self):
        cfg = parse_config({
            "model": {"kind": "gh", "lambda": -0.5, "alpha": 5.0,
                      "beta": [0.2, -0.1], "delta": 0.5,
                      "Delta": [[1.0, 0.0], [0.0, 1.0]]},
            "trade": {"payoff": "swap", "maturity": 1.0},
        })
        model = build_model(cfg.model)
        assert isinstance(model, GHModel)
        for e in ([1.0, 0.0], [0.0, 1.0]):
            assert float(np.real(model.cumulant(e))) == \
                pytest.approx(0.0, abs=1e-14)

    def test_gh_explicit_mu_is_used_verbatim(self):
        cfg = parse_config({
            "model": {"kind": "gh", "lambda": -0.5, "alpha": 5.0,
                      "beta": [0.2, -0.1], "delta": 0.5,
                      "Delta": [[1.0, 0.0], [0.0, 1.0]],
                      "mu": [0.05, -0.05]},
            "trade": {"payoff": "swap", "maturity": 1.0},
        })
        model = build_model(cfg.model)
        assert model.params.mu.tolist() == [0.05, -0.05]


class TestLoad:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(str(tmp_path / "nope.json"))

    def test_invalid_json(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(str(p))

    def test_non_object_root(self, tmp_path):
        p = tmp_path / "list.json"
        p.write_text("[1, 2, 3]", encoding="utf-8")
        with pytest.raises(ConfigError, match="JSON object"):
            load_config(str(p))

    def test_round_trip(self, tmp_path):
        p = tmp_path / "ok.json"
        p.write_text(json.dumps(BS_SWAP), encoding="utf-8")
        cfg = load_config(str(p))
        assert cfg.trade.payoff == "swap"

    @pytest.mark.parametrize("name", [
        "margrabe_bs", "merton_quanto", "gh_swap", "quanto_swap_bs3",
        "negative_control",
    ])
    def test_shipped_configs_validate(self, name):
        cfg = load_config(str(CONFIGS / f"{name}.json"))
        model = build_model(cfg.model)
        assert model.dim == model_dim(cfg.model)

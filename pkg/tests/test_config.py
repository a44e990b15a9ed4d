import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bandforge.config import SALTS, RunConfig
from bandforge.errors import ConfigError

BAND = {
    "construction": "band",
    "operator": {"kind": "shift"},
    "steps": 5,
    "lambda_spec": {"kind": "constant", "value": 0.0},
    "K": 2,
}


def test_round_trip():
    # [TRIVIAL]
    cfg = RunConfig.from_dict(BAND)
    assert RunConfig.from_dict(cfg.to_dict()) == cfg
    assert cfg.seed == 0 and cfg.params["K"] == 2


@pytest.mark.parametrize("key", ["operator", "steps", "lambda_spec", "K"])
def test_missing_key(key):
    # [TRIVIAL]
    doc = {k: v for k, v in BAND.items() if k != key}
    with pytest.raises(ConfigError, match=key):
        RunConfig.from_dict(doc)


@pytest.mark.parametrize("extra", [{"epsilon": 0.2}, {"bogus": 1}, {"window": {"size": 3}}])
def test_unknown_or_inapplicable_key(extra):
    # [TRIVIAL]
    with pytest.raises(ConfigError):
        RunConfig.from_dict({**BAND, **extra})


@pytest.mark.parametrize(
    "patch",
    [{"steps": 0}, {"steps": 2.5}, {"K": -1}, {"K": True}, {"construction": "spiral"},
     {"operator": {"kind": "nope"}}, {"lambda_spec": {"kind": "constant"}}],
)
def test_bad_values(patch):
    # [TRIVIAL]
    with pytest.raises(ConfigError):
        RunConfig.from_dict({**BAND, **patch})


def test_load_errors(tmp_path):
    # [TRIVIAL]
    with pytest.raises(ConfigError):
        RunConfig.load(tmp_path / "absent.json")
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        RunConfig.load(p)
    p.write_text(json.dumps(BAND))
    assert RunConfig.load(p).steps == 5


def test_salts_are_distinct():
    # [TRIVIAL]
    assert len(set(SALTS.values())) == len(SALTS)


@given(st.integers(0, 2**31))
def test_random_sequences_are_independent_and_reproducible(seed):
    # [DERIVED]
    doc = {
        "construction": "tridiag",
        "operator": {"kind": "shift"},
        "steps": 3,
        "seed": seed,
        "epsilon": 0.2,
        "lambda_spec": {"kind": "uniform_disk", "radius": 0.5},
        "mu_spec": {"kind": "uniform_disk", "radius": 0.5},
        "nu_spec": {"kind": "uniform_disk", "radius": 0.5},
    }
    a = RunConfig.from_dict(doc)
    b = RunConfig.from_dict(doc)
    lam, mu = a.sequence("lambda_spec").values(4), a.sequence("mu_spec").values(4)
    assert not np.allclose(lam, mu)
    assert np.array_equal(lam, b.sequence("lambda_spec").values(4))

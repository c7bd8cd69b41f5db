import json
import os

import pytest
from hypothesis import given, strategies as st

from nhresolve.config import OUT_ENV, SCHEMA, ConfigError, RunConfig, atomic_write
from nhresolve.verify import SUITE_ORDER


class TestRunConfig:
    def test_default_covers_catalog(self):
        cfg = RunConfig.default()
        assert [c["id"] for c in cfg.checks] == list(SUITE_ORDER)
        assert cfg.schema == SCHEMA

    @given(st.integers(0, 2**64 - 1), st.sampled_from([["json"], ["csv"], ["json", "csv"]]), st.integers(1, 8))
    def test_round_trip(self, seed, formats, workers):
        cfg = RunConfig(checks=[{"id": "L3.1", "params": {"n": [1]}, "tolerances": {"identity": 1e-9}}],
                        seed=seed, formats=formats, workers=workers)
        assert RunConfig.loads(cfg.dumps()) == cfg

    def test_file_round_trip(self, tmp_path):
        cfg = RunConfig.default()
        path = tmp_path / "cfg.json"
        cfg.dump(str(path))
        assert RunConfig.load(str(path)) == cfg

    @pytest.mark.parametrize("bad", [
        {"seed": -1},
        {"seed": 2**64},
        {"schema": "nhresolve-config/0"},
        {"checks": [{"id": "X1.1"}]},
        {"checks": [{"id": "L3.1", "extra": 1}]},
        {"checks": ["L3.1"]},
        {"models": ["bulk(1,0,1)"]},
        {"formats": ["xml"]},
        {"workers": 0},
        {"colour": "blue"},
    ])
    def test_rejects(self, bad):
        with pytest.raises(ConfigError):
            RunConfig.from_dict(bad)

    def test_rejects_bad_json(self):
        with pytest.raises(ConfigError):
            RunConfig.loads("{not json")

    def test_output_dir_resolution(self, monkeypatch):
        monkeypatch.delenv(OUT_ENV, raising=False)
        assert RunConfig().resolved_output_dir() == "nhresolve-out"
        monkeypatch.setenv(OUT_ENV, "/tmp/env-out")
        assert RunConfig().resolved_output_dir() == "/tmp/env-out"
        assert RunConfig(output_dir="mine").resolved_output_dir() == "mine"


class TestAtomicWrite:
    def test_writes_and_leaves_no_temp(self, tmp_path):
        path = tmp_path / "sub" / "out.json"
        atomic_write(str(path), json.dumps({"a": 1}))
        assert json.loads(path.read_text()) == {"a": 1}
        assert os.listdir(path.parent) == ["out.json"]

    def test_replaces_existing(self, tmp_path):
        path = tmp_path / "x.txt"
        path.write_text("old")
        atomic_write(str(path), "new")
        assert path.read_text() == "new"

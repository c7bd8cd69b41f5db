import cmath
import math

import pytest

from nhresolve.config import RunConfig
from nhresolve.verify import (
    ANNOTATIONS,
    CATALOG_IDS,
    COMPOSITES,
    DEFAULTS,
    PROBE_IDS,
    SUITE_ORDER,
    CheckSpec,
    infinity_oracle,
    parse_param_value,
    probe_report,
    run_check,
    run_suite,
)

FAST = ["L3.1", "L3.2", "C3.1", "L3.3", "T3.1", "R3.1", "L3.5", "C3.2", "L3.6", "T3.3", "L3.7", "L3.9", "L3.10",
        "L4.2", "L4.3", "T4.1", "L4.4", "T4.2", "L4.5"]


class TestCatalog:
    def test_every_id_has_an_implementation(self):
        assert set(SUITE_ORDER) == CATALOG_IDS
        for cid in SUITE_ORDER:
            assert cid in DEFAULTS or cid in COMPOSITES or cid in ANNOTATIONS

    def test_composites_reference_catalog(self):
        for parts in COMPOSITES.values():
            assert set(parts) <= CATALOG_IDS

    def test_probe_ids_subset(self):
        assert PROBE_IDS <= CATALOG_IDS

    @pytest.mark.parametrize("text,value", [("3", 3), ("0.5", 0.5), ("[1, 2]", [1, 2]), ("1j", 1j),
                                            ("gaussian(0,1)", "gaussian(0,1)")])
    def test_param_parsing(self, text, value):
        assert parse_param_value(text) == value


class TestOracles:
    # closed forms pi/16 and pi/6 obtained by contour integration of the stretched kernels
    def test_fun96a(self):
        assert infinity_oracle("fun96a") == pytest.approx(math.pi / 16, rel=1e-12)

    def test_fun96b(self):
        assert infinity_oracle("fun96b") == pytest.approx(math.pi / 6, rel=1e-12)

    def test_unknown(self):
        with pytest.raises(KeyError):
            infinity_oracle("fun97")


class TestRunCheck:
    @pytest.mark.parametrize("cid", FAST)
    def test_passes(self, cid):
        res = run_check(CheckSpec(cid), seed=7)
        assert res.verdict == "pass", res.metrics

    def test_unknown_id(self):
        with pytest.raises(KeyError):
            run_check(CheckSpec("L9.9"))

    def test_annotation_provenance(self):
        res = run_check(CheckSpec("R3.1"))
        assert res.provenance["annotates"] == "T3.1"
        assert res.provenance["params"]["m"] == 0

    def test_composite_lists_components(self):
        res = run_check(CheckSpec("R3.3"))
        assert set(res.metrics["components"]) == {"T3.2", "L3.4"}

    def test_rate_part_reported_separately(self):
        res = run_check(CheckSpec("T3.2"))
        assert res.metrics["delta_criterion"] is True
        rates = [p["fitted_rate"] for p in res.metrics["probes"].values() if "rate_ok" in p]
        # smooth test functions converge faster than any power
        assert all(r < -5 for r in rates)

    def test_seed_determinism(self):
        a = run_check(CheckSpec("L4.4", {"samples": 2048}), seed=11)
        b = run_check(CheckSpec("L4.4", {"samples": 2048}), seed=11)
        a.provenance.pop("seconds")
        b.provenance.pop("seconds")
        assert a.to_dict() == b.to_dict()

    def test_override_tolerance_can_fail(self):
        res = run_check(CheckSpec("L3.3", {}, {"final": 1e-30}))
        assert res.verdict == "fail"


class TestSuite:
    def test_precondition_becomes_failure(self):
        cfg = RunConfig(checks=[{"id": "L3.9", "params": {"phi": "inverse_square(1j)"}}])
        (res,) = run_suite(cfg)
        assert res.verdict == "fail"
        assert "gamma_required=3" in res.error

    def test_workers_keep_order(self):
        ids = ["L3.2", "L3.5", "L4.2", "C3.1"]
        cfg = RunConfig(checks=[{"id": c} for c in ids], workers=3)
        seen = []
        out = run_suite(cfg, progress=seen.append)
        assert [r.id for r in out] == ids
        assert sorted(r.id for r in seen) == sorted(ids)

    def test_disabled_entries_skipped(self):
        cfg = RunConfig(checks=[{"id": "L3.2", "enabled": False}, {"id": "L3.5"}])
        assert [r.id for r in run_suite(cfg)] == ["L3.5"]


class TestProbeReport:
    def test_slow_growth_target(self):
        rep = probe_report("T3.3", {"kappa": 0.5, "k0": 2, "xprime": 3})
        assert rep.target == pytest.approx(cmath.exp(6j) * math.sqrt(3), abs=1e-15)
        assert rep.verdict == "converged"

    @pytest.mark.parametrize("cid", ["T3.2", "T4.1", "T3.1", "L3.9", "L4.2"])
    def test_kinds(self, cid):
        assert probe_report(cid).verdict in ("converged", "vanishing")

    def test_no_probe_form(self):
        with pytest.raises(KeyError):
            probe_report("L3.1")

"""Suite runner bookkeeping: skips, failures, counterexamples and replay."""
import json

from deflator_lab import harness
from deflator_lab.cli import main
from deflator_lab.io import model_from_dict


def chk_needs_three_outcomes(c):
    if c.F.n < 3:
        raise harness.Skip("too small")
    return c.F.n == 3


def _inject(monkeypatch, fn):
    monkeypatch.setitem(harness.CHECKS, "azema", [fn])


class TestRunner:
    def test_fixtures_come_first(self):
        ids = [m[0] for m in harness.model_stream("azema", 0, 2)]
        assert ids[:2] == ["M1", "M2"] and len(ids) == 4

    def test_skip_and_fail_are_counted(self, monkeypatch):
        _inject(monkeypatch, chk_needs_three_outcomes)
        st = harness.run_suite("azema", models=20, seed=1).suites["azema"]["needs_three_outcomes"]
        assert st.skipped >= 1 and st.failed >= 1
        assert st.tested == st.passed + st.failed
        assert st.tested + st.skipped == 22

    def test_counterexample_is_replayable(self, monkeypatch, tmp_path):
        _inject(monkeypatch, chk_needs_three_outcomes)
        out = tmp_path / "r.json"
        assert main(["verify", "--suite", "azema", "--models", "20", "--seed", "1",
                     "--out", str(out)]) == 1
        cx = json.loads(out.read_text())["suites"]["azema"]["needs_three_outcomes"]["counterexample"]
        model = model_from_dict(cx["model"])
        replay = harness.run_on_models("azema", [("cx", model.space, model.tau)])
        assert replay.failures == 1

    def test_crash_counts_as_failure(self, monkeypatch):
        def chk_crash(c):
            raise ZeroDivisionError("boom")
        _inject(monkeypatch, chk_crash)
        st = harness.run_suite("azema", models=0).suites["azema"]["crash"]
        assert st.failed == 2 and "ZeroDivisionError" in st.counterexample["message"]

    def test_fixture_only_run_is_green(self):
        report = harness.run_suite("all", models=0, seed=0)
        assert report.failures == 0
        assert set(report.suites) == set(harness.SUITES)

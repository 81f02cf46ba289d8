"""Tests for the verification suite."""

import pytest


class TestCheckGroups:
    """Tests for individual, fast verification groups."""

    def test_critical_exponents(self) -> None:
        """Test that the exponent checks pass."""
        from revlab.verify import check_critical_exponents

        assert all(check.passed for check in check_critical_exponents())

    def test_chebyshev_bounds(self) -> None:
        """Test that degrees 1 to 20 each give one passing row."""
        from revlab.verify import check_chebyshev_bounds

        checks = check_chebyshev_bounds()
        assert len(checks) == 20
        assert all(check.passed for check in checks)

    def test_filter_window(self) -> None:
        """Test that sampled filter windows stay under the cap."""
        from revlab.verify import check_filter_window

        assert all(check.passed for check in check_filter_window(count=10))

    def test_ghz_certificate(self) -> None:
        """Test that GHZ rows start at q=0 and all pass."""
        from revlab.verify import check_ghz_certificate

        checks = check_ghz_certificate(5)
        assert [check.name for check in checks][0] == "GHZ(5) q=0"
        assert all(check.passed for check in checks)

    def test_locality_gap(self) -> None:
        """Test that random additive operators show no violation."""
        from revlab.verify import check_locality_gap

        assert all(check.passed for check in check_locality_gap(trials=6))

    def test_projector_rows_split_asserted_and_informational(self) -> None:
        """Test that the four-projector form is reported but never fails the suite."""
        # Given: A few random marginals plus the Y Y correlated one
        from revlab.verify import VerifyReport, check_meanfield

        # When: Running the mean-field group
        checks = check_meanfield("quick", marginals=3)

        # Then: Every marginal has one asserted and one informational projector row
        complete = [c for c in checks if c.group == "projector_decomposition"]
        four = [c for c in checks if c.group == "projector_decomposition_four"]
        assert [c.name for c in complete] == [c.name for c in four]
        assert all(c.informational for c in four)
        assert all(c.passed for c in complete)
        (y_row,) = [c for c in four if c.name == "Y Y correlated"]
        assert not y_row.passed
        assert y_row.margin == pytest.approx(-0.25, abs=1e-10)
        assert VerifyReport(level="quick", checks=four).passed


@pytest.mark.benchmark
class TestReverseGroup:
    """Runs the reverse-operator group on the quick instances."""

    def test_dominance_row_for_every_bound_row(self) -> None:
        """Test that the least-squares comparison covers every (instance, disturbance, q) triple."""
        # Given: The quick gapped instances
        from revlab.verify import check_reverse_bound

        # When: Running the group
        checks = check_reverse_bound("quick")

        # Then: Three instances, two disturbances and four q values, each with both rows
        bound = [c.name for c in checks if c.group == "reverse_bound"]
        dominance = [c.name for c in checks if c.group == "reverse_dominance"]
        assert len(bound) == 24
        assert dominance == bound
        assert sum("projector(4)" in name for name in dominance) == 12
        assert all(c.passed for c in checks)


class TestVerifyReport:
    """Tests for report aggregation."""

    def test_failures_and_frame(self) -> None:
        """Test that one failed row fails the report and is listed."""
        from revlab.verify import CheckResult, VerifyReport

        report = VerifyReport(
            level="quick",
            checks=[
                CheckResult(group="a", name="ok", passed=True, margin=0.5),
                CheckResult(group="b", name="bad", passed=False, margin=-0.1),
            ],
        )
        assert not report.passed
        assert [c.name for c in report.failures] == ["bad"]
        assert list(report.to_frame().columns) == ["group", "name", "passed", "margin", "detail", "informational"]

    def test_raising_group_becomes_failed_check(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test that an error inside a group is recorded instead of aborting the suite."""
        from revlab import verify
        from revlab.errors import NotConvergedError

        def stall() -> list[verify.CheckResult]:
            raise NotConvergedError("stalled")

        for name in dir(verify):
            if name.startswith("check_"):
                monkeypatch.setattr(verify, name, lambda *_, **__: [])
        monkeypatch.setattr(verify, "check_topological", stall)
        report = verify.verify_suite("quick")
        assert not report.passed
        (failure,) = report.failures
        assert failure.group == "topological"
        assert "stalled" in failure.detail


@pytest.mark.benchmark
class TestQuickSuite:
    """Runs the whole quick suite."""

    def test_quick_suite_passes(self) -> None:
        """Test that every asserted quick check passes and scaling is left out."""
        from revlab.verify import verify_suite

        report = verify_suite("quick")
        assert report.passed, [f"{c.group}/{c.name}: {c.detail}" for c in report.failures]
        assert "lmg_scaling" not in report.seconds

"""Tests for run configuration and result records."""

import pytest

from graphforms.errors import UsageError
from graphforms.models import (
    CheckResult,
    HomologyReport,
    IntegralEstimate,
    OutputFormat,
    RunConfig,
    Sampler,
    StokesReport,
    StokesTerm,
)


def test_run_config_defaults():
    """Test run configuration defaults."""
    config = RunConfig(command="integrate")
    assert config.sampler == Sampler.HEPP
    assert config.samples == 100_000
    assert config.h_max == 6
    assert config.output_format == OutputFormat.TABLE
    config.validate()


def test_run_config_roundtrip():
    """Test converting a configuration to dict and back."""
    original = RunConfig(
        command="stokes",
        graph_source="X5",
        spec=(1, 2),
        sampler=Sampler.UNIFORM,
        samples=1000,
        seed=7,
        workers=3,
        output_format=OutputFormat.JSON,
    )
    data = original.to_dict()
    assert data["sampler"] == "uniform"
    assert data["spec"] == [1, 2]
    assert RunConfig.from_dict(data) == original


@pytest.mark.parametrize(
    "changes",
    [
        {"samples": -1},
        {"workers": 0},
        {"seed": -1},
        {"seed": 2**64},
        {"h_max": 0},
        {"h_max": 7},
        {"h_max": 8, "allow_h7": True},
        {"e_max": -1},
        {"spec": (2, 1)},
        {"spec": (0,)},
    ],
)
def test_run_config_validate_rejects(changes):
    """Test that inconsistent settings are usage errors."""
    config = RunConfig(command="x", **changes)
    with pytest.raises(UsageError):
        config.validate()


def test_run_config_allows_h7_with_flag():
    """Test that loop order 7 needs the explicit flag."""
    RunConfig(command="homology", h_max=7, allow_h7=True).validate()


def test_check_result_passed():
    """Test pass logic of check results."""
    assert CheckResult("a", 3).passed
    assert not CheckResult("a", 3, failures=1).passed
    assert CheckResult("a", 3, failures=1, informational=True).passed


def test_check_result_roundtrip():
    """Test converting a check result to dict and back."""
    original = CheckResult("routes", 5, failures=2, detail="x")
    data = original.to_dict()
    assert data["passed"] is False
    assert CheckResult.from_dict(data) == original


def test_integral_estimate_zero():
    """Test the exact-zero estimate."""
    zero = IntegralEstimate.zero(Sampler.UNIFORM, 4)
    assert zero.exact_zero
    assert zero.value == 0.0
    assert zero.samples == 0
    assert IntegralEstimate.from_dict(zero.to_dict()) == zero


def test_homology_report_grid():
    """Test homology lookups and the printed grid."""
    report = HomologyReport(h_max=3, dimensions={(0, 3): 1}, stratum_sizes={(3, 6): 1})
    assert report.dimension(3, 0) == 1
    assert report.dimension(2, 0) == 0
    assert report.rows() == [[0, 0, 1], [0, 0, 0]]
    assert HomologyReport.from_dict(report.to_dict()) == report


def test_stokes_report_hides_zero_terms():
    """Test that exactly vanishing boundary terms are left out of the JSON."""
    live = IntegralEstimate(1.0, 0.1, 100, Sampler.HEPP, 0)
    zero = IntegralEstimate.zero(Sampler.HEPP, 0)
    report = StokesReport(
        "X5",
        "ω^9",
        1.0,
        0.1,
        [StokesTerm("X5/e1", 1, live), StokesTerm("X5\\e1", -1, zero, "vanishes")],
    )
    assert not report.exact_zero
    data = report.to_dict()
    assert [t["label"] for t in data["terms"]] == ["X5/e1"]
    assert data["terms"][0]["value"] == 1.0

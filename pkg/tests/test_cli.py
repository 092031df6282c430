"""Tests for CLI interface."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from graphforms.cli import cli


def payload_of(result):
    """JSON payload at the start of the output, ignoring a trailing error line."""
    return json.JSONDecoder().raw_decode(result.output)[0]


@pytest.fixture
def runner():
    """Create a CLI runner."""
    return CliRunner()


def test_cli_version(runner):
    """Test CLI version command."""
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "version" in result.output.lower()


def test_psi_command(runner):
    """Test psi command on a fixture."""
    result = runner.invoke(cli, ["--no-cache", "psi", "--fixture", "banana3"])
    assert result.exit_code == 0
    assert result.output.strip() == "x1*x2 + x1*x3 + x2*x3"


def test_psi_from_file(runner):
    """Test psi command on an edge list file."""
    with runner.isolated_filesystem():
        Path("triangle.txt").write_text("0 1\n1 2\n2 0\n")
        result = runner.invoke(cli, ["--no-cache", "psi", "triangle.txt"])
        assert result.exit_code == 0
        assert result.output.strip() == "x1 + x2 + x3"


def test_psi_needs_one_source(runner):
    """Test that a graph comes from exactly one of a fixture and a file."""
    result = runner.invoke(cli, ["--no-cache", "psi"])
    assert result.exit_code == 2
    assert "exactly one" in result.output


def test_psi_missing_file(runner):
    """Test that a missing graph file is a usage error."""
    with runner.isolated_filesystem():
        result = runner.invoke(cli, ["--no-cache", "psi", "missing.txt"])
        assert result.exit_code == 2


def test_psi_bad_file(runner):
    """Test that a malformed graph file reports its line."""
    with runner.isolated_filesystem():
        Path("bad.txt").write_text("0 1\n1 x\n")
        result = runner.invoke(cli, ["--no-cache", "psi", "bad.txt"])
        assert result.exit_code == 2
        assert "Error" in result.output


def test_unknown_fixture(runner):
    """Test that an unknown fixture name is a usage error."""
    result = runner.invoke(cli, ["--no-cache", "psi", "--fixture", "nope"])
    assert result.exit_code == 2
    assert "Error" in result.output


def test_psi_json(runner):
    """Test JSON output of psi."""
    result = runner.invoke(cli, ["--no-cache", "--format", "json", "psi", "--fixture", "C4"])
    assert result.exit_code == 0
    assert json.loads(result.output)["psi"] == "x1 + x2 + x3 + x4"


def test_show_dot(runner):
    """Test the DOT rendering of W3."""
    result = runner.invoke(cli, ["show", "--fixture", "W3", "--dot"])
    assert result.exit_code == 0
    assert result.output.startswith('graph "W3" {')
    assert '  0 -- 1 [label="e1"];' in result.output
    assert result.output.count(" -- ") == 6


def test_show_json(runner):
    """Test the JSON record of a graph read from a file."""
    with runner.isolated_filesystem():
        Path("triangle.txt").write_text("0 1\n1 2\n2 0\n")
        result = runner.invoke(cli, ["--format", "json", "show", "triangle.txt"])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["edges"] == [[0, 1], [1, 2], [2, 0]]
        assert payload["h"] == 1


def test_laplacian_json(runner):
    """Test the Laplacian of W3 as JSON."""
    result = runner.invoke(cli, ["--no-cache", "--format", "json", "laplacian", "--fixture", "W3"])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["deleted_vertex"] == 3
    assert len(payload["laplacian"]) == 3
    assert all(len(row) == 3 for row in payload["laplacian"])


def test_dodgson_command(runner):
    """Test Dodgson polynomials with edges counted from 1."""
    result = runner.invoke(
        cli, ["--no-cache", "dodgson", "--fixture", "banana3", "-I", "1", "-J", "1"]
    )
    assert result.exit_code == 0
    assert result.output.strip() == "x2 + x3"


def test_dodgson_bad_index(runner):
    """Test that an edge outside the graph is a usage error."""
    result = runner.invoke(
        cli, ["--no-cache", "dodgson", "--fixture", "banana3", "-I", "4", "-J", "1"]
    )
    assert result.exit_code == 2


def test_form_symbolic(runner):
    """Test the symbolic omega^5 on W3."""
    result = runner.invoke(
        cli, ["--no-cache", "form", "--fixture", "W3", "--spec", "1", "--symbolic"]
    )
    assert result.exit_code == 0
    assert "10" in result.output
    assert "Omega" in result.output


def test_form_zero(runner):
    """Test that omega^9 on W3 prints zero."""
    result = runner.invoke(cli, ["--no-cache", "form", "--fixture", "W3", "--spec", "2"])
    assert result.exit_code == 0
    assert result.output.strip() == "0"


def test_form_points(runner):
    """Test the exact point check of omega^5 on W3."""
    result = runner.invoke(
        cli, ["--no-cache", "form", "--fixture", "W3", "--spec", "1", "--points", "2"]
    )
    assert result.exit_code == 0
    assert "PASS" in result.output
    assert "closed form" in result.output


@pytest.mark.parametrize(
    "args",
    [
        ["--spec", "2,1"],
        ["--spec", "1", "--symbolic", "--points", "2"],
        ["--spec", "1", "--points", "0"],
    ],
)
def test_form_usage_errors(runner, args):
    """Test that bad form options are usage errors."""
    result = runner.invoke(cli, ["--no-cache", "form", "--fixture", "W3", *args])
    assert result.exit_code == 2


def test_integrate_exact_zero(runner):
    """Test that the T5 integral vanishes without sampling and meets its target."""
    result = runner.invoke(
        cli, ["--no-cache", "--format", "json", "integrate", "--fixture", "T5", "--spec", "2"]
    )
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["exact_zero"]
    assert payload["target"] == 0.0
    assert payload["passed"]


def test_integrate_degree_mismatch(runner):
    """Test that a form of the wrong degree is a usage error."""
    result = runner.invoke(cli, ["--no-cache", "integrate", "--fixture", "W3", "--spec", "2"])
    assert result.exit_code == 2


def test_integrate_fractional_samples(runner):
    """Test that sample counts must be whole numbers."""
    result = runner.invoke(
        cli, ["--no-cache", "integrate", "--fixture", "W3", "--spec", "1", "-n", "10.5"]
    )
    assert result.exit_code == 2


def test_integrate_cached_output_is_identical(runner):
    """Test that a cached integral prints the same bytes as the first run."""
    args = ["--format", "json", "integrate", "--fixture", "W3", "--spec", "1", "-n", "4e3"]
    with runner.isolated_filesystem():
        first = runner.invoke(cli, ["--cache-dir", ".", *args])
        second = runner.invoke(cli, ["--cache-dir", ".", *args])
        assert first.exit_code == second.exit_code
        assert first.exit_code in (0, 1)
        assert first.output == second.output
        assert len(list(Path(".graphforms/results").glob("*.json"))) == 1
        assert payload_of(first)["samples"] == 4000


def test_integrate_workers_do_not_change_output(runner):
    """Test that the estimate does not depend on the worker count."""
    args = ["--no-cache", "--format", "json", "integrate", "--fixture", "W3", "--spec", "1"]
    serial = runner.invoke(cli, [*args, "-n", "9000", "-w", "1"])
    parallel = runner.invoke(cli, [*args, "-n", "9000", "-w", "2"])
    assert payload_of(serial)["value"] == payload_of(parallel)["value"]


def test_homology_command(runner):
    """Test the homology table up to loop order four."""
    result = runner.invoke(cli, ["--no-cache", "--format", "json", "homology", "--hmax", "4"])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["passed"]
    assert {"n": 0, "h": 3, "dim": 1} in payload["dimensions"]


def test_homology_table(runner):
    """Test the rendered homology table."""
    result = runner.invoke(cli, ["--no-cache", "homology", "--hmax", "3"])
    assert result.exit_code == 0
    assert "H_n" in result.output


def test_homology_budget(runner):
    """Test that loop order seven needs the flag."""
    result = runner.invoke(cli, ["--no-cache", "homology", "--hmax", "7"])
    assert result.exit_code == 2
    assert "--allow-h7" in result.output


def test_homology_writes_strata(runner):
    """Test that homology stores its strata in the cache."""
    with runner.isolated_filesystem():
        result = runner.invoke(cli, ["--cache-dir", ".", "homology", "--hmax", "3"])
        assert result.exit_code == 0
        assert Path(".graphforms/strata/h3_e6.json").exists()


def test_fixtures_command(runner):
    """Test listing the named graphs."""
    result = runner.invoke(cli, ["--format", "json", "fixtures"])
    assert result.exit_code == 0
    rows = {row["name"]: row for row in json.loads(result.output)["fixtures"]}
    assert rows["W3"]["e"] == 6
    assert rows["K6"]["degree"] == -5


def test_conjecture_command(runner):
    """Test the wheel series table."""
    result = runner.invoke(cli, ["--format", "json", "conjecture", "--n", "1", "--n", "2"])
    assert result.exit_code == 0
    rows = json.loads(result.output)["rows"]
    assert [row["wheel"] for row in rows] == ["W3", "W5"]
    assert all(row["agree"] for row in rows)


def test_residue_rejects_banana(runner):
    """Test that residues need a log-divergent graph."""
    result = runner.invoke(cli, ["--no-cache", "residue", "--fixture", "banana3"])
    assert result.exit_code == 2


def test_stokes_degree_mismatch(runner):
    """Test that Stokes residuals need two more edges than the form degree."""
    result = runner.invoke(cli, ["--no-cache", "stokes", "--fixture", "W3", "--spec", "1"])
    assert result.exit_code == 2


def test_selftest_instances(runner):
    """Test that the instance count must be positive."""
    result = runner.invoke(cli, ["selftest", "--instances", "0"])
    assert result.exit_code == 2


@pytest.mark.slow
def test_selftest_command(runner):
    """Test a short run of the property suite."""
    result = runner.invoke(cli, ["--format", "json", "selftest", "--instances", "2", "--seed", "1"])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["passed"]
    assert payload["checks"]

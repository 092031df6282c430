"""CLI interface for graphforms."""

import functools
import json
import logging
import random
from collections.abc import Callable
from pathlib import Path
from typing import Any

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.table import Table

from . import __version__
from .errors import CheckFailed, GraphformsError, InvalidGraphError, UsageError
from .forms import CanonicalFormSpec, canonical_form, canonical_form_at
from .graph_parser import parse_graph_file
from .graphcomplex import KNOWN_DIMENSIONS, homology_report
from .graphs import FIXTURE_NAMES, Graph, canonical_key, fixture, is_connected, to_dict, to_dot
from .identities import point_certify, random_points, run_property_suite
from .integrate import (
    certify_closed_form,
    check_against_target,
    conjecture_table,
    feynman_residue,
    find_target,
    integrate_chart,
    integrate_spec,
    residue_target,
    stokes_outcome,
    stokes_residual,
)
from .laplacian import dodgson, graph_polynomial, laplacian
from .models import H_REQUIRED, IntegralEstimate, OutputFormat, RunConfig, Sampler
from .storage import Cache, canonical_json, content_key

console = Console()
err_console = Console(stderr=True)
logger = logging.getLogger("graphforms")


def setup_logging(verbose: int) -> None:
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logger.handlers = [RichHandler(console=err_console, show_path=False)]
    logger.setLevel(level)
    logger.propagate = False


def handle_errors(command: Callable) -> Callable:
    """Report errors on the console and exit with the code the error carries."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except GraphformsError as exc:
            console.print(f"[red]Error:[/red] {escape(str(exc))}")
            raise click.exceptions.Exit(exc.exit_code) from None
        except FileNotFoundError as exc:
            console.print(f"[red]Error:[/red] {escape(str(exc))}")
            raise click.exceptions.Exit(UsageError.exit_code) from None
        except PermissionError as exc:
            console.print(f"[red]Error:[/red] {escape(str(exc))}")
            raise click.exceptions.Exit(UsageError.exit_code) from None

    return wrapper


def graph_source(command: Callable) -> Callable:
    command = click.option(
        "--fixture", "-f", "fixture_name", help="Named graph, e.g. W3, Z5, K6, banana3"
    )(command)
    return click.argument("graph_file", required=False, type=click.Path(path_type=Path))(command)


def sampling_options(command: Callable) -> Callable:
    for option in reversed(
        [
            click.option(
                "--sampler",
                type=click.Choice([s.value for s in Sampler], case_sensitive=False),
                default=Sampler.HEPP.value,
                show_default=True,
                help="Monte Carlo sampler",
            ),
            click.option(
                "--samples", "-n", type=float, default=1e5, show_default=True, help="Sample count"
            ),
            click.option("--seed", type=int, default=0, show_default=True),
            click.option("--workers", "-w", type=int, default=1, show_default=True),
        ]
    ):
        command = option(command)
    return command


def load_graph(fixture_name: str | None, graph_file: Path | None) -> tuple[Graph, str]:
    if (fixture_name is None) == (graph_file is None):
        raise UsageError("give exactly one of --fixture NAME or a graph file")
    if fixture_name is not None:
        return fixture(fixture_name), fixture_name
    return parse_graph_file(graph_file), str(graph_file)


def sample_count(samples: float) -> int:
    if samples != int(samples):
        raise UsageError(f"sample count must be a whole number, got {samples}")
    return int(samples)


def start_run(obj: dict, command: str, source: str | None = None, **fields: Any) -> RunConfig:
    """Build, validate and log the configuration of this run."""
    config = RunConfig(
        command=command,
        graph_source=source,
        cache_dir=obj["cache_dir"],
        output_format=obj["format"],
        **fields,
    )
    config.validate()
    logger.info("run config: %s", json.dumps(config.to_dict(), sort_keys=True))
    return config


def open_cache(obj: dict) -> Cache | None:
    if obj["no_cache"]:
        return None
    return Cache(Cache.resolve_base_path(obj["cache_dir"]))


def cached(
    cache: Cache | None, graph: Graph, operation: str, params: dict, compute: Callable[[], dict]
) -> dict:
    """Load a result by content key, computing and storing it on a miss."""
    if cache is None:
        return compute()
    key = content_key(
        canonical_key(graph), operation, {**params, "edges": [list(e) for e in graph.edges]}
    )
    hit = cache.load_result(key)
    if hit is not None:
        return hit
    payload = json.loads(canonical_json(compute()))
    cache.save_result(key, payload)
    return payload


def emit(obj: dict, payload: dict, render: Callable[[], None]) -> None:
    if obj["format"] is OutputFormat.JSON:
        click.echo(canonical_json(payload), nl=False)
    else:
        render()


def require_pass(payload: dict, what: str) -> None:
    if not payload.get("passed", True):
        raise CheckFailed(f"{what} is outside its tolerance")


def estimate_payload(graph: Graph, spec_text: str, estimate: IntegralEstimate) -> dict:
    return {
        "graph": graph.name(),
        "spec": spec_text,
        "sampler": estimate.sampler.value,
        "seed": estimate.seed,
        "samples": estimate.samples,
        "value": estimate.value,
        "std_error": estimate.std_error,
        "exact_zero": estimate.exact_zero,
        "resampled": estimate.resampled,
    }


def render_estimate(payload: dict) -> None:
    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("Field", style="dim")
    table.add_column("Value")
    for field in ("graph", "spec", "sampler", "seed", "samples"):
        table.add_row(field, str(payload[field]))
    table.add_row("value", f"{payload['value']:.10g} ± {payload['std_error']:.3g}")
    if payload["exact_zero"]:
        table.add_row("note", "vanishes exactly; no sampling")
    if "target" in payload:
        color = "green" if payload["passed"] else "red"
        table.add_row("target", f"{payload['target']:.10g}")
        table.add_row("sigmas", f"{payload['sigmas']:.2f}")
        table.add_row("status", f"[{color}]{'PASS' if payload['passed'] else 'FAIL'}[/{color}]")
    console.print(table)


@click.group()
@click.version_option(version=__version__)
@click.option("--verbose", "-v", count=True, help="-v logs progress, -vv logs details")
@click.option(
    "--cache-dir",
    type=click.Path(file_okay=False),
    help="Directory holding .graphforms/ (default: $GRAPHFORMS_CACHE or a parent directory)",
)
@click.option("--no-cache", is_flag=True, help="Neither read nor write cached results")
@click.option(
    "--format",
    "output_format",
    type=click.Choice([f.value for f in OutputFormat], case_sensitive=False),
    default=OutputFormat.TABLE.value,
    show_default=True,
)
@click.pass_context
def cli(ctx, verbose: int, cache_dir: str | None, no_cache: bool, output_format: str):
    """graphforms - canonical forms, graph complex homology and canonical integrals."""
    setup_logging(verbose)
    ctx.obj = {
        "cache_dir": cache_dir,
        "no_cache": no_cache,
        "format": OutputFormat(output_format.lower()),
    }


@cli.command()
@graph_source
@click.pass_obj
@handle_errors
def psi(obj: dict, fixture_name: str | None, graph_file: Path | None):
    """Print the Kirchhoff polynomial of a graph."""
    graph, source = load_graph(fixture_name, graph_file)
    start_run(obj, "psi", source)
    payload = cached(
        open_cache(obj),
        graph,
        "psi",
        {},
        lambda: {"graph": graph.name(), "psi": graph_polynomial(graph).to_text()},
    )
    emit(obj, payload, lambda: click.echo(payload["psi"]))


@cli.command()
@graph_source
@click.option("--dot", is_flag=True, help="Print the graph in Graphviz DOT syntax")
@click.pass_obj
@handle_errors
def show(obj: dict, fixture_name: str | None, graph_file: Path | None, dot: bool):
    """Print a graph with its edges in orientation order."""
    graph, source = load_graph(fixture_name, graph_file)
    start_run(obj, "show", source)
    if dot:
        click.echo(to_dot(graph))
        return
    payload = {"graph": graph.name(), "h": graph.loop_number, **to_dict(graph)}

    def render() -> None:
        table = Table(title=payload["graph"], show_header=True, header_style="bold magenta")
        for column in ("Edge", "Tail", "Head"):
            table.add_column(column, justify="right")
        for e, (t, h) in enumerate(graph.edges):
            table.add_row(f"e{e + 1}", str(t), str(h))
        console.print(table)

    emit(obj, payload, render)


@cli.command("laplacian")
@graph_source
@click.pass_obj
@handle_errors
def laplacian_command(obj: dict, fixture_name: str | None, graph_file: Path | None):
    """Print the graph Laplacian in the default cycle basis."""
    graph, source = load_graph(fixture_name, graph_file)
    start_run(obj, "laplacian", source)

    def compute() -> dict:
        bundle = laplacian(graph)
        return {
            "graph": graph.name(),
            "basis": [list(row) for row in bundle.basis],
            "laplacian": [[entry.to_text() for entry in row] for row in bundle.lambda_matrix.entries],
            "deleted_vertex": bundle.deleted_vertex,
        }

    payload = cached(open_cache(obj), graph, "laplacian", {}, compute)
    emit(
        obj,
        payload,
        lambda: click.echo("\n".join("[" + ", ".join(row) + "]" for row in payload["laplacian"])),
    )


@cli.command("dodgson")
@graph_source
@click.option("-I", "rows", type=int, multiple=True, help="Edge (from 1) whose row is removed")
@click.option("-J", "cols", type=int, multiple=True, help="Edge (from 1) whose column is removed")
@click.pass_obj
@handle_errors
def dodgson_command(
    obj: dict,
    fixture_name: str | None,
    graph_file: Path | None,
    rows: tuple[int, ...],
    cols: tuple[int, ...],
):
    """Print the Dodgson polynomial Psi^{I,J}."""
    graph, source = load_graph(fixture_name, graph_file)
    start_run(obj, "dodgson", source)
    params = {"I": sorted(rows), "J": sorted(cols)}

    def compute() -> dict:
        poly = dodgson(graph, [i - 1 for i in rows], [j - 1 for j in cols])
        return {"graph": graph.name(), **params, "dodgson": poly.to_text()}

    payload = cached(open_cache(obj), graph, "dodgson", params, compute)
    emit(obj, payload, lambda: click.echo(payload["dodgson"]))


@cli.command()
@graph_source
@click.option("--spec", "-s", "spec_text", required=True, help="Indices k, e.g. '1' or '1,2'")
@click.option("--symbolic", is_flag=True, help="Print the form exactly (default)")
@click.option("--points", type=int, default=None, help="Check at N exact random points instead")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--route",
    type=click.Choice(["auto", "lambda", "eta"]),
    default="auto",
    show_default=True,
    help="Symbolic construction",
)
@click.pass_obj
@handle_errors
def form(
    obj: dict,
    fixture_name: str | None,
    graph_file: Path | None,
    spec_text: str,
    symbolic: bool,
    points: int | None,
    seed: int,
    route: str,
):
    """Print a canonical form, or check it at exact random points."""
    graph, source = load_graph(fixture_name, graph_file)
    spec = CanonicalFormSpec.parse(spec_text)
    start_run(obj, "form", source, spec=spec.indices, seed=seed)
    if symbolic and points is not None:
        raise UsageError("--symbolic and --points exclude each other")
    if points is None:
        payload = cached(
            open_cache(obj),
            graph,
            "form",
            {"spec": list(spec.indices), "route": route},
            lambda: symbolic_payload(graph, spec, route),
        )
        emit(obj, payload, lambda: click.echo(payload["form"]))
        return
    if points < 1:
        raise UsageError(f"--points must be positive, got {points}")
    payload = point_payload(graph, spec, points, seed)

    def render() -> None:
        color = "green" if payload["passed"] else "red"
        status = "PASS" if payload["passed"] else "FAIL"
        console.print(
            f"[{color}]{status}[/{color}] {escape(payload['spec'])} on {escape(payload['graph'])}: "
            f"{payload['points'] - payload['mismatches']}/{payload['points']} points agree "
            f"with the {payload['against']}"
        )

    emit(obj, payload, render)
    require_pass(payload, "point check")


def symbolic_payload(graph: Graph, spec: CanonicalFormSpec, route: str) -> dict:
    e = graph.edge_count
    result = canonical_form(graph, spec, route)
    payload = {
        "graph": graph.name(),
        "spec": spec.to_text(),
        "degree": spec.degree,
        "nvars": e,
    }
    if result.is_zero():
        payload["form"] = "0"
    elif spec.degree == e - 1:
        top = result.top_coefficient()
        payload["top_coefficient"] = top.to_text()
        payload["form"] = f"{top.to_text()} * Omega"
    else:
        payload["form"] = result.to_text()
    return payload


def point_payload(graph: Graph, spec: CanonicalFormSpec, points: int, seed: int) -> dict:
    """Closed form when one is known, otherwise the two numeric routes against each other."""
    if not is_connected(graph):
        raise InvalidGraphError(f"{graph.name()} is not connected")
    certified = None
    if spec.degree == graph.edge_count - 1:
        certified = certify_closed_form(graph, spec, points, seed)
    if certified is not None:
        _, certificate = certified
        against = "closed form"
    else:
        sample = random_points(random.Random(seed), graph.edge_count, points, high=1000)
        certificate = point_certify(
            lambda p: canonical_form_at(graph, spec, p, "eta"),
            lambda p: canonical_form_at(graph, spec, p, "dodgson"),
            sample,
        )
        against = "Dodgson route"
    return {
        "graph": graph.name(),
        "spec": spec.to_text(),
        "points": certificate.points,
        "mismatches": certificate.mismatches,
        "first_mismatch": list(certificate.first_mismatch or []),
        "against": against,
        "passed": certificate.passed,
    }


@cli.command()
@graph_source
@click.option("--spec", "-s", "spec_text", required=True, help="Indices k, e.g. '1' or '1,2'")
@sampling_options
@click.option("--chart", type=int, default=None, help="Evaluate in the chart x_CHART = 1")
@click.pass_obj
@handle_errors
def integrate(
    obj: dict,
    fixture_name: str | None,
    graph_file: Path | None,
    spec_text: str,
    sampler: str,
    samples: float,
    seed: int,
    workers: int,
    chart: int | None,
):
    """Estimate the canonical integral of a graph."""
    graph, source = load_graph(fixture_name, graph_file)
    spec = CanonicalFormSpec.parse(spec_text)
    config = start_run(
        obj,
        "integrate",
        source,
        spec=spec.indices,
        sampler=Sampler(sampler.lower()),
        samples=sample_count(samples),
        seed=seed,
        workers=workers,
    )

    def compute() -> dict:
        args = (config.sampler, config.samples, config.seed, config.workers)
        if chart is None:
            estimate = integrate_spec(graph, spec, *args)
        else:
            estimate = integrate_chart(graph, spec, chart - 1, *args)
        payload = estimate_payload(graph, spec.to_text(), estimate)
        target = find_target(graph, spec)
        if target is not None:
            outcome = check_against_target(estimate, target.value, target.rel_tol)
            payload.update(
                target=target.value,
                sigmas=outcome.sigmas,
                relative_error=outcome.relative_error,
                passed=outcome.passed,
            )
        return payload

    # workers only change scheduling, never the estimate
    params = {
        "spec": list(spec.indices),
        "sampler": config.sampler.value,
        "samples": config.samples,
        "seed": seed,
        "chart": chart,
    }
    payload = cached(open_cache(obj), graph, "integrate", params, compute)
    emit(obj, payload, lambda: render_estimate(payload))
    require_pass(payload, "integral")


@cli.command()
@graph_source
@click.option("--spec", "-s", "spec_text", required=True, help="Indices k, e.g. '2'")
@sampling_options
@click.pass_obj
@handle_errors
def stokes(
    obj: dict,
    fixture_name: str | None,
    graph_file: Path | None,
    spec_text: str,
    sampler: str,
    samples: float,
    seed: int,
    workers: int,
):
    """Sum the boundary integrals of a graph with one edge too many."""
    graph, source = load_graph(fixture_name, graph_file)
    spec = CanonicalFormSpec.parse(spec_text)
    config = start_run(
        obj,
        "stokes",
        source,
        spec=spec.indices,
        sampler=Sampler(sampler.lower()),
        samples=sample_count(samples),
        seed=seed,
        workers=workers,
    )

    def compute() -> dict:
        report = stokes_residual(
            graph, spec, config.sampler, config.samples, config.seed, config.workers
        )
        outcome = stokes_outcome(report)
        return {**report.to_dict(), "sigmas": outcome.sigmas, "passed": outcome.passed}

    params = {
        "spec": list(spec.indices),
        "sampler": config.sampler.value,
        "samples": config.samples,
        "seed": seed,
    }
    payload = cached(open_cache(obj), graph, "stokes", params, compute)

    def render() -> None:
        table = Table(show_header=True, header_style="bold magenta")
        table.add_column("Term")
        table.add_column("Sign", width=5)
        table.add_column("Value")
        table.add_column("Std error")
        for term in payload["terms"]:
            table.add_row(
                escape(term["label"]),
                f"{term['sign']:+d}",
                f"{term['value']:.8g}",
                f"{term['std_error']:.3g}",
            )
        console.print(table)
        color = "green" if payload["passed"] else "red"
        console.print(
            f"residual [{color}]{payload['value']:.6g} ± {payload['std_error']:.3g}[/{color}]"
            + (" (all terms vanish exactly)" if payload["exact_zero"] else "")
        )

    emit(obj, payload, render)
    require_pass(payload, "Stokes residual")


@cli.command()
@click.option("--hmax", type=int, default=H_REQUIRED, show_default=True, help="Largest loop order")
@click.option("--allow-h7", is_flag=True, help="Permit loop order 7")
@click.option("--e-max", type=int, default=None, help="Skip strata with more edges")
@click.option("--workers", "-w", type=int, default=1, show_default=True)
@click.pass_obj
@handle_errors
def homology(obj: dict, hmax: int, allow_h7: bool, e_max: int | None, workers: int):
    """Tabulate homology dimensions of the graph complex by degree and loop order."""
    start_run(obj, "homology", h_max=hmax, allow_h7=allow_h7, e_max=e_max, workers=workers)
    cache = open_cache(obj)
    report = homology_report(hmax, allow_h7=allow_h7, workers=workers, cache=cache, e_max=e_max)

    mismatches = [
        (n, h, d) for (n, h), d in report.dimensions.items() if KNOWN_DIMENSIONS.get((h, n), 0) != d
    ]
    if e_max is None:
        mismatches += [
            (n, h, 0)
            for (h, n) in KNOWN_DIMENSIONS
            if h <= hmax and (n, h) not in report.dimensions
        ]
    payload = report.to_dict()
    payload["passed"] = not mismatches

    def render() -> None:
        table = Table(show_header=True, header_style="bold magenta", title="dim H_n by loop order h")
        table.add_column("n \\ h", style="dim")
        for h in range(1, hmax + 1):
            table.add_column(str(h), justify="right")
        for n, row in enumerate(report.rows()):
            table.add_row(str(n), *(str(d) for d in row))
        console.print(table)
        for n, h, d in mismatches:
            console.print(
                f"[red]✗[/red] dim H_{n} at h={h} is {d}, expected {KNOWN_DIMENSIONS.get((h, n), 0)}"
            )

    emit(obj, payload, render)
    require_pass(payload, "homology table")


@cli.command()
@click.pass_obj
@handle_errors
def fixtures(obj: dict):
    """List the named graphs."""
    start_run(obj, "fixtures")
    rows = []
    for name in FIXTURE_NAMES:
        graph = fixture(name)
        rows.append(
            {
                "name": name,
                "v": graph.vertex_count,
                "e": graph.edge_count,
                "h": graph.loop_number,
                "degree": graph.degree,
            }
        )

    def render() -> None:
        table = Table(show_header=True, header_style="bold magenta")
        for column in ("Name", "v", "e", "h", "Degree"):
            table.add_column(column, justify="left" if column == "Name" else "right")
        for row in rows:
            table.add_row(row["name"], *(str(row[k]) for k in ("v", "e", "h", "degree")))
        console.print(table)

    emit(obj, {"fixtures": rows}, render)


@cli.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--instances", type=int, default=20, show_default=True)
@click.pass_obj
@handle_errors
def selftest(obj: dict, seed: int, instances: int):
    """Run the property suite on randomized matrices and graphs."""
    start_run(obj, "selftest", seed=seed)
    if instances < 1:
        raise UsageError(f"--instances must be positive, got {instances}")
    results = run_property_suite(seed=seed, instances=instances)
    payload = {
        "seed": seed,
        "checks": [r.to_dict() for r in results],
        "passed": all(r.passed for r in results),
    }

    def render() -> None:
        table = Table(show_header=True, header_style="bold magenta")
        table.add_column("Check")
        table.add_column("Instances", justify="right")
        table.add_column("Failures", justify="right")
        table.add_column("Status", width=8)
        for r in results:
            if r.informational:
                status = "[blue]info[/blue]"
            elif r.passed:
                status = "[green]PASS[/green]"
            else:
                status = "[red]FAIL[/red]"
            table.add_row(escape(r.name), str(r.instances), str(r.failures), status)
        console.print(table)

    emit(obj, payload, render)
    require_pass(payload, "property suite")


@cli.command()
@graph_source
@sampling_options
@click.pass_obj
@handle_errors
def residue(
    obj: dict,
    fixture_name: str | None,
    graph_file: Path | None,
    sampler: str,
    samples: float,
    seed: int,
    workers: int,
):
    """Estimate the Feynman residue of a primitive log-divergent graph."""
    graph, source = load_graph(fixture_name, graph_file)
    config = start_run(
        obj,
        "residue",
        source,
        sampler=Sampler(sampler.lower()),
        samples=sample_count(samples),
        seed=seed,
        workers=workers,
    )

    def compute() -> dict:
        estimate = feynman_residue(graph, config.sampler, config.samples, config.seed, config.workers)
        payload = estimate_payload(graph, "feynman", estimate)
        target = residue_target(graph)
        if target is not None:
            outcome = check_against_target(estimate, target.value, target.rel_tol)
            payload.update(target=target.value, sigmas=outcome.sigmas, passed=outcome.passed)
        return payload

    params = {"sampler": config.sampler.value, "samples": config.samples, "seed": seed}
    payload = cached(open_cache(obj), graph, "residue", params, compute)
    emit(obj, payload, lambda: render_estimate(payload))
    require_pass(payload, "residue")


@cli.command()
@click.option(
    "--n", "ns", type=click.IntRange(1, 3), multiple=True, help="Wheel index (default 1, 2, 3)"
)
@click.pass_obj
@handle_errors
def conjecture(obj: dict, ns: tuple[int, ...]):
    """Compare the wheel series with (2n+1) binom(4n+2, 2n+1) zeta(2n+1)."""
    start_run(obj, "conjecture")
    rows = conjecture_table(ns or (1, 2, 3))
    for row in rows:
        row["agree"] = row["relative_difference"] < 1e-12

    def render() -> None:
        table = Table(show_header=True, header_style="bold magenta")
        for column in ("n", "Wheel", "Series", "Closed form", "Rel. difference"):
            table.add_column(column, justify="right")
        for row in rows:
            table.add_row(
                str(row["n"]),
                row["wheel"],
                f"{row['series']:.12g}",
                f"{row['conjecture']:.12g}",
                f"{row['relative_difference']:.2e}",
            )
        console.print(table)

    emit(obj, {"rows": rows}, render)


def main():
    """Entry point for the CLI."""
    cli()

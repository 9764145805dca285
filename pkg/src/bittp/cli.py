"""Command-line surface: solve instances, compare fronts, run the
enumeration oracle, and validate instance files.

Exit codes: 0 success, 2 configuration or usage error, 3 instance or front
file parse failure, 4 solver finished with no feasible point anywhere.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

import click

from . import __version__
from .cqm import AnnealParams, LocalBackend
from .instance import ParseError, load_instance
from .oracle import OracleSizeError, exhaustive_front
from .pareto import ObjectivePoint, hypervolume
from .remote import RemoteBackend, TOKEN_ENV_VAR
from .solver import SolverConfigError, solve

EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_INFEASIBLE = 4

log = logging.getLogger("bittp")


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load(path: str):
    try:
        return load_instance(path)
    except (ParseError, OSError, ValueError) as exc:
        _fail(EXIT_PARSE, f"cannot load instance {path}: {exc}")


@click.group()
@click.version_option(version=__version__, prog_name="bittp")
@click.option("--verbose", is_flag=True, help="Debug logging.")
def main(verbose: bool):
    """Bi-objective traveling-thief pipeline: band schedule + annealing."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _build_backend(backend: str, endpoint: str | None,
                   sweeps: int, reads: int):
    if backend == "remote":
        if not endpoint:
            raise click.UsageError(
                f"--backend remote needs --endpoint (credentials come from "
                f"${TOKEN_ENV_VAR})"
            )
        return RemoteBackend(endpoint)
    return LocalBackend(AnnealParams(num_reads=reads, sweeps=sweeps))


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat()


def _front_doc(report) -> dict:
    rep = report.to_dict()
    return {
        "instance": rep["instance"],
        "config": rep["config"],
        "bounds": rep["bounds"],
        "points": rep["front"],
        "variable_counts": rep["variable_counts"],
        "generated_at": _timestamp(),
    }


def _band_csv(report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["band_index", "f", "g", "iterations"])
    for br in report.bands:
        if br.feasible:
            writer.writerow([br.index, repr(br.solution.f),
                             repr(br.solution.g), br.iterations])
    return buf.getvalue()


@main.command("solve")
@click.option("--instance", "instance_path", required=True,
              type=click.Path(), help="Instance file (.ttp or .json).")
@click.option("--segments", default=10, show_default=True,
              help="Number of profit bands.")
@click.option("--mode", type=click.Choice(["equal", "random"]),
              default="equal", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--tmax", default=5, show_default=True,
              help="Iteration cap per band.")
@click.option("--backend", type=click.Choice(["local", "remote"]),
              default="local", show_default=True)
@click.option("--endpoint", default=None, help="Remote sampler URL.")
@click.option("--sweeps", default=2000, show_default=True)
@click.option("--reads", default=32, show_default=True)
@click.option("--exact-bounds", is_flag=True,
              help="Derive the profit range by dynamic programming.")
@click.option("--jobs", default=1, show_default=True,
              help="Concurrent band solves.")
@click.option("--legacy-break", is_flag=True,
              help="Stop a band on first improvement and keep the "
                   "predecessor (study mode).")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Front JSON path; a .report.json lands beside it.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
              default="json", show_default=True,
              help="csv additionally emits band_index,f,g,iterations rows.")
def cmd_solve(instance_path, segments, mode, seed, tmax, backend, endpoint,
              sweeps, reads, exact_bounds, jobs, legacy_break, out_path, fmt):
    """Run the full pipeline on one instance and emit the front."""
    instance = _load(instance_path)
    sampler = _build_backend(backend, endpoint, sweeps, reads)
    try:
        report = solve(
            instance, segments=segments, mode=mode, backend=sampler,
            seed=seed, t_max=tmax, exact_bounds=exact_bounds, jobs=jobs,
            legacy_break=legacy_break,
        )
    except SolverConfigError as exc:
        _fail(EXIT_CONFIG, str(exc))

    front_doc = _front_doc(report)
    front_json = json.dumps(front_doc, indent=2, sort_keys=True)
    if out_path:
        out = Path(out_path)
        out.write_text(front_json + "\n")
        report_doc = report.to_dict()
        report_doc["generated_at"] = front_doc["generated_at"]
        out.with_suffix(".report.json").write_text(
            json.dumps(report_doc, indent=2, sort_keys=True) + "\n"
        )
        if fmt == "csv":
            out.with_suffix(".csv").write_text(_band_csv(report))
        click.echo(f"front with {len(front_doc['points'])} points -> {out}")
    else:
        click.echo(_band_csv(report) if fmt == "csv" else front_json)

    if not front_doc["points"]:
        _fail(EXIT_INFEASIBLE, "no band produced a feasible solution")


def _load_front_points(path: str) -> list[ObjectivePoint]:
    try:
        doc = json.loads(Path(path).read_text())
        points = doc["points"] if isinstance(doc, dict) else doc
        out = [ObjectivePoint(f=float(p["f"]), g=float(p["g"])) for p in points]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        _fail(EXIT_PARSE, f"malformed front file {path}: {exc}")
    if not out:
        _fail(EXIT_PARSE, f"front file {path} holds no points")
    return out


@main.command("compare")
@click.argument("fronts", nargs=-1, required=True, type=click.Path())
def cmd_compare(fronts):
    """Hypervolume of each front under one shared normalization."""
    point_sets = [_load_front_points(p) for p in fronts]
    click.echo(f"{'front':<40} {'points':>6} {'hypervolume':>12}")
    for i, path in enumerate(fronts):
        hv = hypervolume(point_sets, target=i)
        click.echo(f"{path:<40} {len(point_sets[i]):>6} {hv:>12.6f}")


@main.command("oracle")
@click.option("--instance", "instance_path", required=True,
              type=click.Path())
@click.option("--band", nargs=2, type=float, default=None,
              help="Inclusive profit-objective band LO HI.")
@click.option("--out", "out_path", type=click.Path(), default=None)
def cmd_oracle(instance_path, band, out_path):
    """Exact front by enumerating every tour and picking plan (tiny only)."""
    instance = _load(instance_path)
    try:
        front = exhaustive_front(instance, band=tuple(band) if band else None)
    except OracleSizeError as exc:
        _fail(EXIT_CONFIG, str(exc))
    doc = {
        "instance": instance.name,
        "points": [
            {
                "f": p.f,
                "g": p.g,
                "tour": [int(c) + 1 for c in p.solution.tour],
                "picked": p.solution.picked_ids(),
            }
            for p in front.points
        ],
    }
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out_path:
        Path(out_path).write_text(text + "\n")
        click.echo(f"{len(front.points)} points -> {out_path}")
    else:
        click.echo(text)


@main.command("validate")
@click.option("--instance", "instance_path", required=True,
              type=click.Path())
def cmd_validate(instance_path):
    """Parse an instance file and report its headline figures."""
    instance = _load(instance_path)
    click.echo(f"name:            {instance.name}")
    click.echo(f"cities:          {instance.num_cities}")
    click.echo(f"items:           {instance.num_items}")
    click.echo(f"capacity:        {instance.capacity}")
    click.echo(f"speed range:     [{instance.v_min}, {instance.v_max}]")
    click.echo(f"renting ratio:   {instance.renting_ratio}")
    click.echo(f"edge weights:    {instance.edge_weight_type}")
    click.echo("ok")


if __name__ == "__main__":
    main()

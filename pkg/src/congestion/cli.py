"""Command-line surface: compile, diagram, check-policy, simulate.

Reports are deterministic and exact: every rational is serialized as a
"p/q" string, cells are listed in the order of their first generating
policy, and JSON keys are sorted, so identical inputs give byte-identical
output regardless of the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from importlib import resources as importlib_resources

import click

from . import geometry
from .diagram import build_diagram, policy_cell, strict_feasibility
from .geometry import UnboundedError
from .lexsys import Policy
from .model import ModelError, parse_model
from .rationals import rat, rat_str
from .simulate import estimate_throughput, simulate
from .throughput import ThroughputMap

FIXTURES = ("ed-reduced", "ed-full", "ems-b")

EXIT_INPUT_ERROR = 2
EXIT_INTERNAL_ERROR = 3


class InputError(click.ClickException):
    exit_code = EXIT_INPUT_ERROR


def _load_model_text(model: str) -> str:
    if model in FIXTURES:
        ref = importlib_resources.files("congestion.fixtures") / f"{model}.toml"
        return ref.read_text()
    try:
        with open(model, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read model {model!r}: {exc}") from None


def _parse_bindings(pairs):
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise InputError(f"--bind expects name=value, got {pair!r}")
        name, value = pair.split("=", 1)
        try:
            out[name.strip()] = rat(value)
        except (ValueError, ZeroDivisionError, TypeError):
            raise InputError(f"--bind {pair!r}: not a rational") from None
    return out


def _load_dynamics(model, bind):
    text = _load_model_text(model)
    try:
        return parse_model(text, _parse_bindings(bind))
    except ModelError as exc:
        raise InputError(str(exc)) from None


def _guard(fn):
    """Map internal invariant violations to exit code 3."""
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except (AssertionError, RuntimeError) as exc:
            click.echo(f"internal error: {exc}", err=True)
            sys.exit(EXIT_INTERNAL_ERROR)
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@click.group()
def main():
    """Congestion phase diagrams of timed discrete-event systems."""


_bind_option = click.option(
    "--bind", "-b", multiple=True, metavar="NAME=P/Q",
    help="Bind a delay/proportion parameter to an exact rational.")


@main.command("compile")
@click.argument("model")
@_bind_option
@_guard
def cmd_compile(model, bind):
    """Print the compiled min-affine dynamics of MODEL."""
    dyn = _load_dynamics(model, bind)
    click.echo(dyn.render())


def _rows_json(poly):
    def rows(items):
        return [{"coeffs": [rat_str(c) for c in coeffs], "rhs": rat_str(b)}
                for coeffs, b in items]
    return {"equalities": rows(poly.eq_rows),
            "inequalities": rows(poly.ineq_rows)}


def _throughput_json(tput, dyn):
    if not isinstance(tput, ThroughputMap):
        return {"type": type(tput).__name__}
    rows = {}
    for i, name in enumerate(dyn.counter_names):
        entry = {p: rat_str(c) for p, c in zip(tput.parameters, tput.T[i])
                 if c != 0}
        if tput.constant[i] != 0 or not entry:
            entry["1"] = rat_str(tput.constant[i])
        rows[name] = entry
    return {"type": "map", "rows": rows}


def _cell_json(cell, dyn, normalize, box):
    record = {
        "policies": [str(p) for p in cell.policies],
        "dimension": cell.dimension,
        "closure": _rows_json(cell.closure),
        "throughput": _throughput_json(cell.throughput, dyn),
    }
    if normalize:
        section = geometry.boxed_section(cell.closure, normalize, box)
        try:
            verts = geometry.vertices(section)
            record["vertices"] = [[rat_str(c) for c in v] for v in verts]
        except UnboundedError:
            record["vertices"] = None
    return record


def _report(dyn, diagram, normalize, box, full_dim_only):
    nparams = len(diagram.parameters)
    cells = [c for c in diagram.cells
             if not full_dim_only or c.dimension == nparams]
    stats = diagram.stats
    return {
        "model": dyn.name,
        "parameters": list(diagram.parameters),
        "counters": list(dyn.counter_names),
        "stats": {
            "total": stats.total,
            "strictly_feasible": stats.strictly_feasible,
            "full_dimensional": stats.full_dimensional,
            "distinct": stats.distinct,
            "full_dimensional_distinct": stats.full_dimensional_distinct,
        },
        "cells": [_cell_json(c, dyn, normalize, box) for c in cells],
    }


def _emit_csv(report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["policies", "dimension", "throughput_type", "closure_rows"])
    for cell in report["cells"]:
        closure = cell["closure"]
        nrows = len(closure["equalities"]) + len(closure["inequalities"])
        writer.writerow([";".join(cell["policies"]), cell["dimension"],
                         cell["throughput"]["type"], nrows])
    return buf.getvalue()


@main.command("diagram")
@click.argument("model")
@_bind_option
@click.option("--full-dim-only", is_flag=True,
              help="Report only full-dimensional cells.")
@click.option("--normalize", metavar="PARAM",
              help="Section cells at PARAM=1 and emit vertices.")
@click.option("--box", type=int, default=6, show_default=True,
              help="Bounding box size for normalized vertex output.")
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Parallel policy-evaluation workers.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
              default="json", show_default=True)
@click.option("--output", "-o", type=click.Path(writable=True, dir_okay=False),
              help="Write the report to a file instead of stdout.")
@_guard
def cmd_diagram(model, bind, full_dim_only, normalize, box, jobs, fmt, output):
    """Compute the congestion phase diagram of MODEL."""
    dyn = _load_dynamics(model, bind)
    if normalize and normalize not in dyn.resource_parameters:
        raise InputError(f"--normalize: unknown parameter {normalize!r}")
    diagram = build_diagram(dyn, jobs=jobs)
    report = _report(dyn, diagram, normalize, box, full_dim_only)
    if fmt == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        text = _emit_csv(report)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@main.command("check-policy")
@click.argument("model")
@click.argument("policy")
@_bind_option
@_guard
def cmd_check_policy(model, policy, bind):
    """Check strict feasibility of POLICY (comma-separated action indices)."""
    dyn = _load_dynamics(model, bind)
    try:
        sigma = Policy(tuple(int(c) for c in policy.split(",")))
        sigma.validate(dyn)
    except ValueError as exc:
        raise InputError(f"bad policy {policy!r}: {exc}") from None
    feas = strict_feasibility(dyn, sigma)
    verdict = "strictly feasible" if feas.strictly_feasible \
        else "not strictly feasible"
    click.echo(f"policy {sigma}: {verdict}")
    click.echo("front trace: " + " -> ".join(str(f) for f in feas.front_trace))
    click.echo(f"lp calls: {feas.lp_calls}")
    if not feas.strictly_feasible:
        return
    pos = ", ".join(dyn.counter_names[i]
                    for i in sorted(feas.positive_rho_indices))
    click.echo(f"counters with attainable positive rate: {pos}")
    cell = policy_cell(dyn, sigma)
    click.echo(f"cell dimension: {cell.dimension}")
    for coeffs, rhs in cell.closure.eq_rows:
        click.echo("  " + cell.closure.row_str(coeffs, rhs, "="))
    for coeffs, rhs in cell.closure.ineq_rows:
        click.echo("  " + cell.closure.row_str(coeffs, rhs, "<="))
    tput = cell.throughput
    if isinstance(tput, ThroughputMap):
        for i, name in enumerate(dyn.counter_names):
            click.echo(f"rho_{name} = {tput.row_str(i)}")
    else:
        click.echo(f"throughput: {type(tput).__name__}")


@main.command("simulate")
@click.argument("model")
@_bind_option
@click.option("--horizon", type=int, default=10000, show_default=True)
@click.option("--burn-in", default="1/2", show_default=True,
              metavar="P/Q", help="Fraction of the horizon to discard.")
@click.option("--predict", is_flag=True,
              help="Compare against the phase diagram's throughput maps.")
@_guard
def cmd_simulate(model, bind, horizon, burn_in, predict):
    """Simulate MODEL with fully bound parameters; print slope estimates."""
    dyn = _load_dynamics(model, bind)
    bindings = _parse_bindings(bind)
    missing = [p for p in dyn.resource_parameters if p not in bindings]
    if missing:
        raise InputError("simulate needs all resource parameters bound; "
                         "missing " + ", ".join(missing))
    values = {p: bindings[p] for p in dyn.resource_parameters}
    try:
        traj = simulate(dyn, values, horizon)
    except ModelError as exc:
        raise InputError(str(exc)) from None
    est = estimate_throughput(traj, rat(burn_in))

    predicted = {}
    if predict:
        diagram = build_diagram(dyn)
        point = [values[p] for p in diagram.parameters]
        for cell in diagram.cells:
            if isinstance(cell.throughput, ThroughputMap) \
                    and geometry.contains_point(cell.closure, point):
                for i, name in enumerate(dyn.counter_names):
                    predicted.setdefault(name, set()).add(
                        cell.throughput.apply(values)[i])

    writer = csv.writer(sys.stdout, lineterminator="\n")
    header = ["counter", "slope", "residual"]
    if predict:
        header.append("predicted")
    writer.writerow(header)
    for i, name in enumerate(dyn.counter_names):
        row = [name, rat_str(est.slopes[i]), rat_str(est.residuals[i])]
        if predict:
            row.append(";".join(sorted(rat_str(v)
                                       for v in predicted.get(name, ()))))
        writer.writerow(row)


if __name__ == "__main__":
    main()

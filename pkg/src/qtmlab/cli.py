"""Command-line front end.

Exit codes: 0 success, 1 parse error, 2 semantic or validation error,
3 resource error.  Machines are given as a file path or ``corpus:NAME``.
"""
from __future__ import annotations

import functools
import sys
from pathlib import Path

import click

from . import corpus
from .bvcompat import BVInvalid, convert, dump_bv, load_bv, validate_bv
from .distribution import computed_output, encode_input, fmt_prob, ppd_of
from .errors import CompletenessError, ParseError, QTMError, ResourceError, ValidationError
from .evolution import evolve
from .machine import DEFAULT_EPS, QTMDef, check_local_unitarity, validate
from .observation import enumerate_runs, parse_schedule, runs_distribution, sample_counts
from .parsing import dump_qtm, load_qtm, parse_superposition

EXIT_PARSE, EXIT_SEMANTIC, EXIT_RESOURCE = 1, 2, 3


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        _fail(f"cannot read {path}: {exc.strerror}", EXIT_PARSE)


def _load_machine(ref: str) -> QTMDef:
    if ref.startswith("corpus:"):
        name = ref[len("corpus:"):]
        table = corpus.corpus_by_name()
        if name not in table:
            _fail(f"no corpus machine {name!r}; known: {', '.join(table)}", EXIT_SEMANTIC)
        return table[name]
    return load_qtm(_read(ref), name=Path(ref).stem)


def _validated(ref: str, eps: float) -> QTMDef:
    m = _load_machine(ref)
    return m if m.validated else validate(m, eps)


def _input(m: QTMDef, text: str):
    return encode_input(m, parse_superposition(text))


def _guard(fn):
    """Translate library errors into exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ParseError as exc:
            _fail(str(exc), EXIT_PARSE)
        except ResourceError as exc:
            _fail(str(exc), EXIT_RESOURCE)
        except ValidationError as exc:
            click.echo(exc.report.render())
            _fail("machine fails the local unitary conditions", EXIT_SEMANTIC)
        except BVInvalid as exc:
            click.echo(exc.report.render())
            _fail("B&V constraints violated", EXIT_SEMANTIC)
        except QTMError as exc:
            _fail(str(exc), EXIT_SEMANTIC)

    return wrapper


eps_option = click.option("--eps", type=float, default=DEFAULT_EPS, show_default=True,
                          help="Tolerance for the local unitary conditions.")
input_option = click.option("--input", "input_text", required=True,
                            help="Input superposition, e.g. '1/sqrt(2)|1> + 1/sqrt(2)|3>'.")


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Quantum Turing machine workbench."""


@main.command()
@click.argument("machine")
@eps_option
@_guard
def check(machine, eps):
    """Check a machine against the local unitary conditions."""
    m = _load_machine(machine)
    try:
        report = check_local_unitarity(m, eps)
    except CompletenessError as exc:
        _fail(str(exc), EXIT_SEMANTIC)
    click.echo(report.render())
    if not report.passed:
        sys.exit(EXIT_SEMANTIC)


@main.command()
@click.argument("machine")
@input_option
@click.option("--steps", type=click.IntRange(min=0), required=True)
@click.option("--trace", is_flag=True, help="Print the distribution after every step.")
@eps_option
@_guard
def run(machine, input_text, steps, trace, eps):
    """Evolve an input and print the output distribution."""
    m = _validated(machine, eps)
    phi = None
    for k, phi in enumerate(evolve(_input(m, input_text), steps)):
        if trace:
            click.echo(f"step {k}")
            click.echo(ppd_of(phi).render())
    if not trace:
        click.echo(ppd_of(phi).render())


@main.command()
@click.argument("machine")
@input_option
@click.option("--max-steps", type=click.IntRange(min=0), default=1000, show_default=True)
@click.option("--settle-eps", type=float, default=1e-6, show_default=True)
@eps_option
@_guard
def limit(machine, input_text, max_steps, settle_eps, eps):
    """Approximate the computed output as a limit of distributions."""
    m = _validated(machine, eps)
    ppd, status = computed_output(m, _input(m, input_text), max_steps, settle_eps)
    click.echo(ppd.render())
    click.echo(status.render())


@main.command()
@click.argument("machine")
@input_option
@click.option("--schedule", "schedule_text", default="0+1*i", show_default=True,
              help="'a+b*i' or a comma-separated list of steps.")
@click.option("--depth", type=click.IntRange(min=0), required=True)
@click.option("--mode", type=click.Choice(["exact", "mc"]), default="exact", show_default=True)
@click.option("--samples", type=click.IntRange(min=1), default=10_000, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@eps_option
@_guard
def observe(machine, input_text, schedule_text, depth, mode, samples, seed, eps):
    """Measure the output along a schedule, exactly or by sampling."""
    schedule = parse_schedule(schedule_text)
    m = _validated(machine, eps)
    phi0 = _input(m, input_text)
    if mode == "exact":
        click.echo(runs_distribution(enumerate_runs(m, phi0, schedule, depth)).render())
        return
    counts = sample_counts(m, phi0, schedule, depth, samples, seed)
    click.echo(f"samples {samples} seed {seed}")
    for n in sorted(x for x in counts if x is not None):
        click.echo(f"{n}\t{fmt_prob(counts[n] / samples)}\t{counts[n]}")
    click.echo(f"BOTTOM\t{fmt_prob(counts[None] / samples)}\t{counts[None]}")


@main.command("convert-bv")
@click.argument("bv_machine")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the QTM file here instead of stdout.")
@click.option("--complete-loops", is_flag=True, help="Add missing final-to-initial loop rows.")
@eps_option
@_guard
def convert_bv(bv_machine, out, complete_loops, eps):
    """Convert a B&V machine file into a QTM file."""
    if bv_machine.startswith("corpus:"):
        name = bv_machine[len("corpus:"):]
        table = {"SUCC_FINITE": corpus.succ_finite_bv, "COIN": corpus.coin_bv}
        if name not in table:
            _fail(f"no B&V corpus machine {name!r}; known: {', '.join(table)}", EXIT_SEMANTIC)
        bv = table[name]()
        if complete_loops:
            bv = bv.with_loops()
    else:
        bv = load_bv(_read(bv_machine), complete_loops=complete_loops, name=Path(bv_machine).stem)
    report = validate_bv(bv, eps)
    if not report.passed:
        click.echo(report.render())
        _fail("B&V constraints violated", EXIT_SEMANTIC)
    text = dump_qtm(convert(bv, eps))
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@main.command("dump")
@click.argument("machine")
@click.option("--bv", is_flag=True, help="Dump the B&V version of a corpus machine.")
@_guard
def dump(machine, bv):
    """Print a machine in the file format (useful with corpus:NAME)."""
    if bv:
        name = machine.removeprefix("corpus:")
        table = {"SUCC_FINITE": corpus.succ_finite_bv, "COIN": corpus.coin_bv}
        if name not in table:
            _fail(f"no B&V corpus machine {name!r}", EXIT_SEMANTIC)
        click.echo(dump_bv(table[name]()), nl=False)
    else:
        click.echo(dump_qtm(_load_machine(machine)), nl=False)


if __name__ == "__main__":
    main()

"""Command line interface."""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from . import certify as cert
from .barth import FAMILIES, BarthSection, DegenerateSection, family, sample_section
from .gfp import DEFAULT_PRIME
from .quadric import standard_quadric

FAMILY_CHOICE = click.Choice(sorted(FAMILIES))


@click.group()
@click.option("-v", "--verbose", is_flag=True)
def main(verbose):
    """Nodal quartic sections of the quadric threefold and their obstructions."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")


@main.command()
@click.option("--family", "tag", type=FAMILY_CHOICE, required=True)
@click.option("--prime", default=DEFAULT_PRIME, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True)
def generate(tag, prime, seed, out):
    """Sample a symmetric section and write it as JSON."""
    section = sample_section(family(tag), standard_quadric(prime), seed)
    out.write_text(section.to_json())


@main.command()
@click.argument("section_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True)
def analyze(section_file, out):
    """Analyze a stored section (no resampling)."""
    section = BarthSection.from_json(section_file.read_text())
    ctx = standard_quadric(section.p)
    try:
        analysis = cert.analyze_section(section, ctx, seed=section.seed)
        analysis.attempts = [{"seed": section.seed, "outcome": "accepted", "reason": ""}]
    except DegenerateSection as exc:
        attempt = {"seed": section.seed, "outcome": "rejected", "reason": str(exc)}
        analysis = cert.SurfaceAnalysis(section.family.tag, section.p, None, [section.seed], "sampling_failure", attempts=[attempt])
    out.write_text(analysis.to_json())


@main.command("certify")
@click.argument("report", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def certify_cmd(report):
    """Print the verdict; exit 0 certified, 10 none, 20 inconsistent, 30 sampling failure."""
    analysis = cert.SurfaceAnalysis.from_json(report.read_text())
    if not analysis.accepted:
        click.echo("sampling_failure")
        sys.exit(cert.EXIT_CODES["sampling_failure"])
    v = cert.verdict(analysis)
    click.echo(v.status)
    for r in v.reasons:
        click.echo(f"  {r}")
    sys.exit(v.exit_code)


@main.command("batch")
@click.option("--families", default="all", show_default=True, help="'all' or a comma separated list")
@click.option("--count", default=1, show_default=True)
@click.option("--prime", default=DEFAULT_PRIME, show_default=True)
@click.option("--base-seed", default=0, show_default=True)
@click.option("--jobs", default=1, show_default=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
def batch_cmd(families, count, prime, base_seed, jobs, out):
    """Run many pipelines and write one report per run plus a summary."""
    if count < 1:
        raise click.BadParameter("count must be at least 1", param_hint="--count")
    tags = sorted(FAMILIES) if families == "all" else [t.strip() for t in families.split(",")]
    for t in tags:
        if t not in FAMILIES:
            raise click.BadParameter(f"unknown family {t}", param_hint="--families")
    analyses = cert.batch(tags, count, prime, base_seed, jobs)
    cert.write_batch(analyses, out)
    for fam, entry in cert.summarize(analyses)["families"].items():
        click.echo(f"{fam}: {entry['accepted']}/{entry['runs']} accepted, {entry['verdicts']}")


@main.command()
def selftest():
    """Run the quick invariant suite and print the Clifford matrices."""
    from .selfcheck import run_selfchecks

    failures = 0
    for name, ok, detail in run_selfchecks():
        click.echo(f"{'PASS' if ok else 'FAIL'} {name}{': ' + detail if detail else ''}")
        failures += not ok
    sys.exit(1 if failures else 0)


if __name__ == "__main__":  # pragma: no cover
    main()

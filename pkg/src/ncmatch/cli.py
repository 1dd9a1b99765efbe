"""Command-line entry point: instance generation, algorithm runs, and
verification campaigns.

Exit codes: 0 success, 1 verification failure, 2 bad input, 3 instance
does not meet the algorithm's preconditions.
"""
from __future__ import annotations

import json
import sys

import click

from . import __version__, adversaries, campaigns, generators, serial, svg
from .codecs import Permutation
from .engine import asap_matching, bt_matching, greedy, simulate, sorted_matching
from .errors import (
    BadSubset,
    CapExceeded,
    DuplicateX,
    InvalidInstance,
    NcmatchError,
    Not231Avoiding,
    NotConvex,
)
from .geometry import BNM, MNM

EXIT_VERIFY_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_PRECONDITION = 3


def _fail(code: int, message: str) -> None:
    click.echo(json.dumps({"error": message}), err=True)
    sys.exit(code)


@click.group()
@click.version_option(__version__, prog_name="ncmatch")
def main() -> None:
    """Online non-crossing matching: algorithms, adversaries, verification."""


@main.command()
@click.argument(
    "family",
    type=click.Choice(["bnm-perm", "mnm-family", "markov", "random-convex", "random-general"]),
)
@click.option("--n", type=int, default=None, help="Half the point count.")
@click.option("--k", type=int, default=None, help="Scale of the interval family (n = 3k).")
@click.option("--j", "j_", type=int, default=None, help="Interval count for mnm-family.")
@click.option("--intervals", type=str, default="", help="Comma-separated interval ids.")
@click.option("--sigma", type=str, default="", help="Comma-separated permutation values.")
@click.option("--kind", type=click.Choice([MNM, BNM]), default=MNM, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def generate(family, n, k, j_, intervals, sigma, kind, seed, out) -> None:
    """Write an instance file for one of the built-in families."""
    meta = {"family": family, "seed": seed, "generator": f"ncmatch-{__version__}"}
    try:
        if family == "bnm-perm":
            if not sigma:
                raise InvalidInstance("bnm-perm needs --sigma")
            values = tuple(int(v) for v in sigma.split(","))
            payload = adversaries.bnm_red_instance(Permutation(values))
        elif family == "mnm-family":
            if k is None or j_ is None:
                raise InvalidInstance("mnm-family needs --k and --j")
            chosen = [int(v) for v in intervals.split(",") if v] if intervals else []
            payload = adversaries.mnm_family_instance(k, j_, chosen)
        elif family == "markov":
            if n is None:
                raise InvalidInstance("markov needs --n")
            payload = adversaries.markov_instance(n, seed)
        elif family == "random-convex":
            if n is None:
                raise InvalidInstance("random-convex needs --n")
            payload = generators.random_convex_instance(n, kind, seed)
        else:
            if n is None:
                raise InvalidInstance("random-general needs --n")
            payload = generators.random_general_instance(n, seed)
    except (NcmatchError, ValueError) as exc:
        _fail(EXIT_BAD_INPUT, f"{type(exc).__name__}: {exc}")
        return
    serial.dump_instance(out, payload, meta=meta)
    click.echo(json.dumps({"written": out, "meta": meta}))


@main.command()
@click.argument("algorithm", type=click.Choice(["bt", "asap", "sorted", "greedy"]))
@click.argument("instance_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--svg", "svg_out", type=click.Path(dir_okay=False), default=None)
@click.option("--unknown-n", is_flag=True, help="asap only: ship n on the tape.")
@click.option("--tie-break", type=click.Choice(["min", "max"]), default="min")
def run(algorithm, instance_path, svg_out, unknown_n, tie_break) -> None:
    """Run one algorithm over an instance file and print a JSON report."""
    try:
        ai = serial.load_instance(instance_path)
    except NcmatchError as exc:
        _fail(EXIT_BAD_INPUT, f"{type(exc).__name__}: {exc}")
        return
    if algorithm == "bt":
        alg = bt_matching()
    elif algorithm == "asap":
        alg = asap_matching(known_n=not unknown_n, tie_break=tie_break)
    elif algorithm == "sorted":
        alg = sorted_matching()
    else:
        alg = greedy()
    instance = ai.instance
    try:
        result = simulate(alg, instance)
    except (NotConvex, DuplicateX, InvalidInstance) as exc:
        _fail(EXIT_PRECONDITION, f"{type(exc).__name__}: {exc}")
        return
    report = {
        "algorithm": algorithm,
        "kind": instance.kind,
        "geometry": instance.geometry,
        "n": instance.n,
        "matched": result.violations.matched_count,
        "unmatched": instance.size - result.violations.matched_count,
        "perfect": result.violations.perfect,
        "bits_written": result.bits_written,
        "bits_read": result.bits_read,
        "violations": {
            "crossings": len(result.violations.crossings),
            "color": len(result.violations.color_violations),
            "duplicate_endpoints": len(result.violations.duplicate_endpoints),
        },
        "meta": ai.meta,
    }
    if svg_out:
        svg.write_svg(svg_out, instance, result.matching)
        report["svg"] = svg_out
    click.echo(json.dumps(report))


@main.command()
@click.argument("check", type=click.Choice(sorted(campaigns.CHECKS)))
@click.option("--n", type=int, default=None)
@click.option("--k", type=int, default=None)
@click.option("--trials", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def verify(check, n, k, trials, seed) -> None:
    """Run a verification campaign; exit 1 if any sub-check fails."""
    try:
        if check == "bnm-lb":
            summary = campaigns.check_bnm_lb(n if n is not None else 3)
        elif check == "mnm-lb":
            summary = campaigns.check_mnm_lb(k if k is not None else 2)
        elif check == "catalan-bijections":
            summary = campaigns.check_catalan_bijections(n if n is not None else 8)
        elif check == "coupling":
            summary = campaigns.check_coupling(n if n is not None else 200, trials, seed)
        else:
            summary = campaigns.check_rate_table()
    except (CapExceeded, BadSubset, Not231Avoiding, ValueError) as exc:
        _fail(EXIT_BAD_INPUT, f"{type(exc).__name__}: {exc}")
        return
    click.echo(json.dumps(summary))
    if not summary["ok"]:
        sys.exit(EXIT_VERIFY_FAILED)


if __name__ == "__main__":
    main()

"""Command-line surface: ``python -m app.main <command> ...``.

Results go to stdout and are byte-deterministic for fixed flags; logs and
summaries go to stderr. Exit status 0 on success, 1 on failing fixture
verdicts, 2 on usage and domain errors.
"""
from functools import wraps
from typing import Any, Callable, Dict, Iterable, List, Optional
import json
import logging
import time
import traceback

import click
import pandas as pd
from pydantic import BaseModel

from ..core.config import Settings, get_settings
from ..core.log import setup_logging
from ..models.schemas import BallParams, FamilyId, Frac, LensSpace, SlideNode, TripleNode
from ..services import arith, farey, framing, lens, slidetree
from ..services.cache_service import get_record_cache
from ..services.catalog import CatalogBuilder, compare_to_fixture, load_fixture, table_rows
from ..services.cobord import CONSTRUCTIONS, CobordismSearch

logger = logging.getLogger(__name__)


class DomainError(click.ClickException):
    """A rejected input; reported like a usage error."""

    exit_code = 2


class FracType(click.ParamType):
    name = "p/q"

    def convert(self, value, param, ctx):
        if isinstance(value, Frac):
            return value
        try:
            return Frac.parse(value)
        except ValueError as e:
            self.fail(str(e), param, ctx)


class PairType(click.ParamType):
    name = "p,q"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            p, q = (int(part) for part in value.split(","))
        except ValueError:
            self.fail(f"expected two integers p,q, got {value!r}", param, ctx)
        return p, q


class IntListType(click.ParamType):
    name = "a1,a2,..."

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            return tuple(int(part) for part in value.split(",") if part.strip())
        except ValueError:
            self.fail(f"expected comma-separated integers, got {value!r}", param, ctx)


FRAC = FracType()
PAIR = PairType()
INT_LIST = IntListType()


def common_options(f: Callable) -> Callable:
    """Flags shared by every command; unset flags fall back to settings."""
    options = [
        click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True,
                     help="Output format for record streams."),
        click.option("--bound", type=click.IntRange(min=1), default=None, help="Size bound for enumerations."),
        click.option("--depth", type=click.IntRange(min=0), default=None, help="Depth bound for tree walks."),
        click.option("--cache-dir", default=None, help="Record cache directory."),
        click.option("--no-cache", is_flag=True, default=False, help="Bypass the record cache."),
        click.option("--seed-fixture", default=None, type=click.Path(dir_okay=False),
                     help="Table fixture file to compare against."),
        click.option("--workers", type=click.IntRange(min=1), default=None, help="Search worker processes."),
        click.option("--orientation", type=click.Choice(["oriented", "unoriented"]), default=None,
                     help="Lens matching for catalog rows."),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def resolve_settings(opts: Dict[str, Any]) -> Settings:
    """Per-invocation settings: flags override environment and .env values."""
    update: Dict[str, Any] = {}
    if opts.get("cache_dir"):
        update["CACHE_DIR"] = opts["cache_dir"]
    if opts.get("no_cache"):
        update["CACHE_ENABLED"] = False
    if opts.get("seed_fixture"):
        update["FIXTURE_PATH"] = opts["seed_fixture"]
    if opts.get("workers"):
        update["WORKERS"] = opts["workers"]
    if opts.get("orientation"):
        update["MATCH_ORIENTATION"] = opts["orientation"]
    return get_settings().model_copy(update=update)


def logged(name: str) -> Callable:
    """Wrap a command with request/completion logs; domain errors exit with status 2."""
    def decorator(f: Callable) -> Callable:
        @wraps(f)
        def wrapper(*args, **kwargs):
            start_time = time.time()
            logger.info("%s request received: %s", name, kwargs)
            try:
                result = f(*args, **kwargs)
            except ValueError as e:
                duration = time.time() - start_time
                logger.error("%s failed after %.3f seconds: %s", name, duration, str(e))
                logger.error("Stack trace: %s", traceback.format_exc())
                raise DomainError(str(e)) from e
            duration = time.time() - start_time
            logger.info("%s completed successfully in %.3f seconds", name, duration)
            return result
        return wrapper
    return decorator


def echo_value(value: Any) -> None:
    if isinstance(value, BaseModel):
        click.echo(value.model_dump_json(by_alias=True))
    else:
        click.echo(json.dumps(value, separators=(",", ":")))


def emit(records: Iterable[BaseModel], fmt: str, flatten: Callable[[Any], Dict[str, Any]],
         columns: Optional[List[str]] = None) -> None:
    """JSON lines, or one CSV table built with pandas."""
    records = list(records)
    if fmt == "json":
        for record in records:
            click.echo(record.model_dump_json(by_alias=True))
        return
    frame = pd.DataFrame([flatten(r) for r in records], columns=columns)
    click.echo(frame.to_csv(index=False, lineterminator="\n"), nl=False)


def _lens_columns(prefix_count: int = 3) -> List[str]:
    return [f"{k}{i}" for i in range(1, prefix_count + 1) for k in ("p", "q")]


def _triple_record(node: TripleNode) -> Dict[str, Any]:
    record: Dict[str, Any] = {"path": node.path if node.path is not None else ""}
    for i, f in enumerate(node.fracs, start=1):
        record[f"p{i}"], record[f"q{i}"] = f.p, f.q
    return record


def _slide_record(node: SlideNode) -> Dict[str, Any]:
    record: Dict[str, Any] = {"family": node.family.value, "path": node.path or ""}
    for i, e in enumerate(node.entries, start=1):
        record[f"p{i}"], record[f"q{i}"], record[f"d{i}"] = e.p, e.q, e.delta
    for i, x in enumerate(node.x, start=1):
        record[f"x{i}"] = x
    return record


def _candidate_record(candidate) -> Dict[str, Any]:
    record: Dict[str, Any] = {"construction": candidate.construction.value, "sign": candidate.sign}
    for i, (ball, boundary) in enumerate(zip(candidate.balls, candidate.cp2_boundaries()), start=1):
        record[f"ball{i}"] = str(ball)
        record[f"p{i}"], record[f"q{i}"] = boundary.p, boundary.q
    record["sources"] = len(candidate.provenance)
    return record


@click.group()
@click.option("-v", "--verbose", count=True, help="Raise the log level (-v INFO, -vv DEBUG).")
def cli(verbose: int) -> None:
    """Rational-ball embeddings of lens-space triples in CP²."""
    settings = get_settings()
    if verbose:
        settings = settings.model_copy(update={"LOG_LEVEL": "DEBUG" if verbose > 1 else "INFO"})
    setup_logging(settings)


# -- continued fractions ---------------------------------------------------

@cli.group()
def cf() -> None:
    """Continued-fraction conversions."""


@cf.command("hj")
@click.argument("fraction", type=FRAC)
@common_options
@logged("HJ expansion")
def cf_hj(fraction: Frac, **opts) -> None:
    echo_value(arith.hj_of_frac(fraction))


@cf.command("euc")
@click.argument("fraction", type=FRAC)
@common_options
@logged("Euclidean expansion")
def cf_euc(fraction: Frac, **opts) -> None:
    echo_value(arith.euc_of_frac(fraction))


@cf.command("eval")
@click.argument("coeffs", type=INT_LIST)
@common_options
@logged("HJ evaluation")
def cf_eval(coeffs, **opts) -> None:
    echo_value(arith.frac_of_hj(coeffs))


@cf.command("dual")
@click.argument("fraction", type=FRAC)
@common_options
@logged("Dual fraction")
def cf_dual(fraction: Frac, **opts) -> None:
    echo_value(arith.dual(fraction))


@cf.command("partner")
@click.argument("fraction", type=FRAC)
@common_options
@logged("Reversal partner")
def cf_partner(fraction: Frac, **opts) -> None:
    echo_value(arith.hj_reversal_partner(fraction))


@cf.command("framing")
@click.argument("fraction", type=FRAC)
@common_options
@logged("Framing sequence")
def cf_framing(fraction: Frac, **opts) -> None:
    seq = framing.framing_sequence(fraction.p, fraction.q)
    echo_value({"entries": list(seq.entries), "separator": seq.separator})


# -- lens spaces -----------------------------------------------------------

@cli.group("lens")
def lens_group() -> None:
    """Lens-space equivalence and ball recognition."""


@lens_group.command("boundary")
@click.argument("ball", type=PAIR)
@click.option("--sign", type=click.Choice(["1", "-1"]), default="1", show_default=True)
@common_options
@logged("Ball boundary")
def lens_boundary(ball, sign: str, **opts) -> None:
    echo_value(lens.boundary_of_ball(BallParams(p=ball[0], q=ball[1], sign=int(sign))))


@lens_group.command("equiv")
@click.argument("first", type=PAIR)
@click.argument("second", type=PAIR)
@click.option("--unoriented", is_flag=True, default=False, help="Ignore orientation.")
@common_options
@logged("Lens equivalence")
def lens_equiv(first, second, unoriented: bool, **opts) -> None:
    a, b = LensSpace(p=first[0], q=first[1]), LensSpace(p=second[0], q=second[1])
    same = lens.equiv_unoriented(a, b) if unoriented else lens.equiv_oriented(a, b)
    echo_value(same)


@lens_group.command("recognize")
@click.argument("lens_space", type=PAIR)
@common_options
@logged("Ball recognition")
def lens_recognize(lens_space, **opts) -> None:
    echo_value([b.model_dump() for b in lens.recognize_ball_boundary(LensSpace(p=lens_space[0], q=lens_space[1]))])


@lens_group.command("normalize")
@click.argument("ball", type=PAIR)
@common_options
@logged("Ball normalization")
def lens_normalize(ball, **opts) -> None:
    echo_value(lens.normalize_ball_params(ball[0], ball[1]))


@lens_group.command("berge")
@click.argument("r", type=click.IntRange(min=2))
@common_options
@logged("Berge identities")
def lens_berge(r: int, **opts) -> None:
    single, pair = lens.berge_example_lenses(r)
    echo_value({"r": r, "single": single.model_dump(), "sum": pair.model_dump(),
                "holds": lens.berge_example_identities(r)})


# -- 2-Farey tree ----------------------------------------------------------

@cli.group("farey")
def farey_group() -> None:
    """The 2-Farey tree."""


@farey_group.command("root")
@common_options
@logged("2-Farey root")
def farey_root(**opts) -> None:
    echo_value(farey.two_farey_root())


@farey_group.command("base")
@common_options
@logged("2-Farey base chain")
def farey_base(fmt: str, **opts) -> None:
    emit(farey.enlarged_base_chain(), fmt, _triple_record)


@farey_group.command("locate")
@click.argument("fraction", type=FRAC)
@common_options
@logged("2-Farey locate")
def farey_locate(fraction: Frac, **opts) -> None:
    click.echo(farey.locate(fraction) or "(root)")


@farey_group.command("enumerate")
@common_options
@logged("2-Farey enumeration")
def farey_enumerate(fmt: str, bound: Optional[int], **opts) -> None:
    emit(farey.enumerate_two_farey(bound or 16), fmt, _triple_record, ["path"] + _lens_columns())


@farey_group.command("complete")
@click.argument("p1", type=int)
@click.argument("p2", type=int)
@common_options
@logged("2-Farey completion")
def farey_complete(p1: int, p2: int, **opts) -> None:
    echo_value(farey.complete_triple(p1, p2))


@farey_group.command("witness")
@click.argument("ball", type=PAIR)
@common_options
@logged("2-Farey witness")
def farey_witness(ball, **opts) -> None:
    echo_value(farey.two_farey_witness(ball[0], ball[1]))


# -- slide trees, search, table --------------------------------------------

@cli.command("slide")
@click.argument("family", type=click.Choice([f.value for f in FamilyId], case_sensitive=False))
@common_options
@logged("Slide enumeration")
def slide(family: str, fmt: str, bound: Optional[int], depth: Optional[int], **opts) -> None:
    """Walk a signed slide triple tree."""
    settings = resolve_settings(opts)
    if bound is None and depth is None:
        depth = 3
    nodes = slidetree.enumerate_tree(FamilyId(family.upper()), depth=depth, bound=bound,
                                     max_depth=settings.SLIDE_MAX_DEPTH)
    columns = ["family", "path"] + [f"{k}{i}" for i in range(1, 4) for k in ("p", "q", "d")] + ["x1", "x2", "x3"]
    emit(nodes, fmt, _slide_record, columns)


@cli.command("search")
@click.option("--c-min", type=int, default=None, help="Smallest middle entry c for ADDC.")
@click.option("--c-max", type=int, default=None, help="Largest middle entry c for ADDC.")
@click.option("--constructions", default=",".join(CONSTRUCTIONS), show_default=True,
              help="Comma-separated subset of ADDC,ADD4.")
@common_options
@logged("Cobordism search")
def search(c_min: Optional[int], c_max: Optional[int], constructions: str, fmt: str, bound: Optional[int], **opts) -> None:
    """Search ADDC and ADD4 candidates."""
    settings = resolve_settings(opts)
    chosen = tuple(sorted({c.strip().upper() for c in constructions.split(",") if c.strip()}))
    unknown = set(chosen) - set(CONSTRUCTIONS)
    if unknown:
        raise click.BadParameter(f"unknown constructions {sorted(unknown)}", param_hint="--constructions")
    c_min = settings.SEARCH_C_MIN if c_min is None else c_min
    c_max = settings.SEARCH_C_MAX if c_max is None else c_max
    cache = get_record_cache(settings.CACHE_DIR, settings.CACHE_ENABLED)
    result = CobordismSearch(settings, cache).run(bound_p=bound, c_range=range(c_min, c_max + 1), constructions=chosen)
    emit(result.candidates, fmt, _candidate_record,
         ["construction", "sign"] + [c for i in range(1, 4) for c in (f"ball{i}", f"p{i}", f"q{i}")] + ["sources"])
    click.echo(f"rejections: {json.dumps(result.rejections, sort_keys=True)}", err=True)


@cli.command("table")
@common_options
@logged("Table reproduction")
@click.pass_context
def table(ctx: click.Context, fmt: str, bound: Optional[int], **opts) -> None:
    """Build the catalog and compare it with the table fixture."""
    settings = resolve_settings(opts)
    cache = get_record_cache(settings.CACHE_DIR, settings.CACHE_ENABLED)
    builder = CatalogBuilder(settings, cache)
    bound = settings.CATALOG_BOUND if bound is None else bound
    oriented = builder.oriented

    fixture = load_fixture(settings.FIXTURE_PATH)
    rows = builder.build(bound)
    report = compare_to_fixture(rows, fixture, oriented, builder.bounds(bound))
    catalog = table_rows(rows, fixture, oriented)

    if fmt == "json":
        emit(catalog, fmt, dict)
        emit(report.verdicts, fmt, dict)
    else:
        emit(catalog, fmt, lambda r: r.csv_record(), _lens_columns() + ["realised", "sources"])
        click.echo("")
        emit(report.verdicts, fmt, lambda v: v.csv_record(),
             _lens_columns() + ["expected", "fixture_tags", "sources", "verdict", "failing", "note"])

    click.echo(f"verdicts: {json.dumps(report.counts(), sort_keys=True)}; "
               f"outside window: {builder.outside_window}", err=True)
    if report.failing:
        ctx.exit(1)

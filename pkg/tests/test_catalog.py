import pytest

from app.core.errors import FixtureError
from app.models.schemas import BallParams, LensSpace, SourceTag, Verdict
from app.services.catalog import (
    compare_to_fixture,
    farey_candidates,
    load_fixture,
    parse_fixture_line,
    row_key,
    rows_from_candidates,
    canonical_row,
    table_rows,
    validate_provenance,
)


def key_of(pairs, oriented=True):
    return row_key(canonical_row((LensSpace(p=p, q=q) for p, q in pairs), oriented))


def rows_by_key(rows):
    return {row_key(r.lenses): r for r in rows}


def test_parse_fixture_line():
    row = parse_fixture_line("4,1 9,4 25,6 yes *†", 7)
    assert row.pairs == ((4, 1), (9, 4), (25, 6))
    assert row.realised and row.tags == ("*", "†")
    assert row.line_number == 7
    assert parse_fixture_line("  # comment") is None
    assert parse_fixture_line("") is None
    assert parse_fixture_line("9,4 25,6 64,25 no  # checked").realised is False


@pytest.mark.parametrize("line", [
    "4,1 9,4 yes",
    "4,1 9,4 25,6 maybe",
    "4,1 9,4 25,x yes",
    "4,1 9,4 25,6 yes %",
    "4,1 9,4 25,6 no *",
    "4,2 9,4 25,6 yes",
])
def test_parse_fixture_line_errors(line):
    with pytest.raises(FixtureError, match="line 3"):
        parse_fixture_line(line, 3)


def test_shipped_fixture(fixture_rows):
    assert len(fixture_rows) == 65
    assert sum("*" in r.tags for r in fixture_rows) == 25
    assert sum("†" in r.tags for r in fixture_rows) == 7
    assert sum(r.realised for r in fixture_rows) == 42


def test_load_fixture_reports_the_bad_line(tmp_path):
    path = tmp_path / "fixture.txt"
    path.write_text("# header\n4,1 9,4 25,6 yes *\n4,1 9,4\n")
    with pytest.raises(FixtureError, match="line 3"):
        load_fixture(str(path))
    with pytest.raises(FixtureError):
        load_fixture(str(tmp_path / "missing.txt"))


def test_first_two_farey_row():
    rows, outside = rows_from_candidates(farey_candidates(5), 256)
    assert [row_key(r.lenses) for r in rows] == [((4, 1), (9, 4), (25, 6))]
    assert rows[0].sources == (SourceTag.FAREY,)
    assert outside == 3


def test_two_farey_rows_are_exactly_the_asterisk_rows(catalog_rows, fixture_rows):
    farey_keys = {row_key(r.lenses) for r in catalog_rows if SourceTag.FAREY in r.sources}
    starred = {key_of(r.pairs) for r in fixture_rows if "*" in r.tags}
    assert farey_keys == starred


def test_lp_rows_cover_the_dagger_rows(catalog_rows, fixture_rows):
    by_key = rows_by_key(catalog_rows)
    for row in fixture_rows:
        if "†" in row.tags:
            assert SourceTag.LP in by_key[key_of(row.pairs)].sources, row.pairs


def test_catalog_worked_rows(catalog_rows):
    by_key = rows_by_key(catalog_rows)
    first = by_key[((4, 1), (9, 4), (25, 6))]
    assert {SourceTag.FAREY, SourceTag.LP, SourceTag.ADDC} <= set(first.sources)
    assert ((9, 4), (25, 11), (49, 15)) not in by_key
    assert ((4, 1), (9, 4), (49, 22)) in by_key
    assert all(4 <= r.lenses[0].p < r.lenses[1].p < r.lenses[2].p <= 256 for r in catalog_rows)
    assert [row_key(r.lenses) for r in catalog_rows] == sorted(by_key)


def test_comparison_has_no_failing_rows(catalog_builder, catalog_rows, fixture_rows):
    report = compare_to_fixture(catalog_rows, fixture_rows, True, catalog_builder.bounds(256))
    assert report.failing == []
    verdicts = {row_key(v.lenses): v for v in report.verdicts}
    assert verdicts[((4, 1), (9, 4), (25, 6))].verdict == Verdict.MATCH
    assert not any(v.verdict == Verdict.EXTRA for v in report.verdicts)


def test_unreachable_untagged_row_is_missing_with_bounds(catalog_builder, catalog_rows, fixture_rows):
    report = compare_to_fixture(catalog_rows, fixture_rows, True, catalog_builder.bounds(256))
    verdicts = {row_key(v.lenses): v for v in report.verdicts}
    untagged = verdicts[key_of(((9, 4), (49, 18), (64, 25)))]
    assert untagged.verdict == Verdict.MISSING
    assert not untagged.failing
    assert "search bounds" in untagged.note


def test_every_cobordism_row_is_a_listed_row(catalog_rows, fixture_rows):
    listed = {key_of(r.pairs) for r in fixture_rows if r.realised}
    cobordism_rows = [r for r in catalog_rows if {SourceTag.ADDC, SourceTag.ADD4} & set(r.sources)]
    assert any(SourceTag.ADDC in r.sources for r in cobordism_rows)
    for row in cobordism_rows:
        assert row_key(row.lenses) in listed, row.lenses


def test_missing_tagged_row_fails(catalog_rows):
    fixture = [parse_fixture_line("4,1 9,4 121,34 yes *", 1)]
    report = compare_to_fixture(catalog_rows, fixture)
    assert report.verdicts[0].verdict == Verdict.MISSING
    assert report.verdicts[0].failing
    unlisted = report.verdicts[1:]
    assert all(v.verdict == Verdict.EXTRA and v.failing for v in unlisted)
    assert any(SourceTag.FAREY in v.sources for v in unlisted)
    assert any(SourceTag.ADDC in v.sources for v in unlisted)


def test_realised_no_row_fails_whatever_the_source(catalog_rows):
    row = next(r for r in catalog_rows if SourceTag.ADDC in r.sources)
    pairs = " ".join(f"{lens.p},{lens.q}" for lens in row.lenses)
    report = compare_to_fixture(catalog_rows, [parse_fixture_line(f"{pairs} no", 1)])
    assert report.verdicts[0].verdict == Verdict.EXTRA
    assert report.verdicts[0].failing


def test_two_farey_balls_use_b21():
    root = farey_candidates(3)[0]
    assert BallParams(p=2, q=1, sign=-1) in root.balls
    assert all(not (b.p == 2 and b.q == 0) for b in root.balls)
    assert root.boundaries[2] == LensSpace(p=4, q=3)


def test_unoriented_matching_merges_colliding_fixture_rows(fixture_rows):
    report = compare_to_fixture([], fixture_rows, oriented=False)
    assert len(report.verdicts) < len(fixture_rows)
    assert any("merged fixture lines" in v.note for v in report.verdicts)
    assert report.orientation == "unoriented"


def test_table_rows_add_unrealised_fixture_rows(catalog_rows, fixture_rows):
    table = table_rows(catalog_rows, fixture_rows)
    by_key = rows_by_key(table)
    assert by_key[key_of(((9, 4), (25, 11), (49, 15)))].realised is False
    assert len(table) >= len(catalog_rows)
    assert [row_key(r.lenses) for r in table] == sorted(by_key)


def test_recorded_provenance_replays(catalog_rows):
    checked = 0
    for row in catalog_rows:
        for provenance in row.provenance[:3]:
            assert validate_provenance(provenance), provenance
            checked += 1
    assert checked > 0

import json

import pytest

import cli
from bigraph import canonicalize, pair_key, parse_pair
from journal import Journal
from schema import RunConfig

D = "bwd1v1p1v1x0p1x1p0x1duals1v1x2"
D_RELABELED = "bwd1v1p1v0x1p1x1p1x0duals1v1x2"


def test_codec_render(capsys):
    assert cli.main(["codec", "render", D_RELABELED]) == cli.EXIT_OK
    assert capsys.readouterr().out.strip() == canonicalize(parse_pair(D))


def test_codec_parse(capsys):
    assert cli.main(["codec", "parse", "bwd1v1p1duals1v2x1"]) == cli.EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["plus"]["depths"] == [[[1]], [[1], [1]]]
    assert out["plus"]["duals"] == [[0], [1, 0]]
    assert out["canonical"] == cli.codec_render("bwd1v1p1duals1v2x1")


def test_codec_error_exit_code(capsys):
    assert cli.main(["codec", "render", "bwd1v1x1duals1v1"]) == cli.EXIT_ERROR
    assert "row-length mismatch" in capsys.readouterr().err


def test_enumerate_summary_and_expectations(capsys):
    assert cli.main(["enumerate", "--seed", "A2", "--depth", "2", "--expect", "depth1=1"]) == cli.EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["depth1"] == 1
    assert cli.main(["enumerate", "--seed", "A2", "--depth", "2", "--expect", "depth1=2"]) == cli.EXIT_MISMATCH


def test_enumerate_rejects_bad_seed(capsys):
    assert cli.main(["enumerate", "--seed", "nonsense"]) == cli.EXIT_ERROR
    assert "[odometer] error" in capsys.readouterr().err


def test_enumerate_dot_output(capsys):
    assert cli.main(["enumerate", "--depth", "2", "--format", "dot"]) == cli.EXIT_OK
    assert capsys.readouterr().out.startswith("digraph odometer {")


def test_journal_then_vines(tmp_path, capsys):
    journal = str(tmp_path / "a2.jsonl")
    assert cli.main(["enumerate", "--depth", "2", "--journal", journal]) == cli.EXIT_OK
    capsys.readouterr()
    assert cli.main(["vines", journal]) == cli.EXIT_OK
    verdicts = json.loads(capsys.readouterr().out)
    assert isinstance(verdicts, list)
    assert all("accepted" in v for v in verdicts)


def test_compare_against_fixture_file(tmp_path):
    tree = cli.cmd_enumerate(RunConfig(max_depth=2))
    drawn = [n for n in tree.nodes if n.status != "excluded"]
    fixture = tmp_path / "tree.txt"
    fixture.write_text("".join(f"{n.canonical} node\n" for n in drawn))
    assert cli.compare_expectation(tree, str(fixture)) == []
    fixture.write_text("".join(f"{n.canonical} node\n" for n in drawn[1:]))
    problems = cli.compare_expectation(tree, str(fixture))
    assert problems == [f"unexpected {drawn[0].canonical}"]


def test_eliminate_closed_form_only(capsys):
    assert cli.main(["eliminate", "D1", "--no-runs"]) == cli.EXIT_OK
    assert capsys.readouterr().out.strip().splitlines()[-1] == "D1: eliminated"


@pytest.mark.parametrize("family", ["D2", "D3", "K", "Kprime"])
def test_eliminate_report_without_runs(family):
    report = cli.eliminate_family(family, runs=False)
    assert report.eliminated
    assert report.survivors == []
    assert report.lines[-1] == f"{family}: eliminated"


def test_eliminate_unknown_family():
    with pytest.raises(cli.CliError):
        cli.eliminate_family("E8")


def test_phase_samples():
    lams = cli.phase_samples(4)
    assert len(lams) == 4
    assert all(abs(abs(lam) - 1) < 1e-12 for lam in lams)


@pytest.mark.slow
def test_gpa_verify(capsys):
    assert cli.main(["gpa-verify", "--samples", "2"]) == cli.EXIT_OK
    assert "FAIL" not in capsys.readouterr().out


@pytest.mark.census
@pytest.mark.parametrize("family", ["D1", "D2", "D3", "K", "Kprime"])
def test_eliminate_with_runs(family):
    report = cli.eliminate_family(family)
    assert report.eliminated, report.lines


@pytest.mark.census
def test_eliminate_d3_leaves_exactly_the_shuriken_pairs():
    report = cli.eliminate_family("D3")
    expected = {pair_key(parse_pair(cli.rules_init.named_pair(n))) for n in ("S", "Sprime")}
    assert set(report.survivors) == expected


# the finite pairs left standing by the vine tests in [3+sqrt5, 13/2]
SURVIVING_VINES = (
    "bwd1v1p2duals1v1x2,bwd1v1p2duals1v1x2",
    "bwd1v1p2duals1v1x2,bwd1v1p1p1p1p1duals1v1x2x3x4x5",
    "bwd1v1p2duals1v1x2,bwd1v1p1p1p1p1duals1v1x2x3x5x4",
    "bwd1v1p2duals1v1x2,bwd1v1p1p1p1p1duals1v1x3x2x5x4",
    "bwd1v1p1p1p1p1duals1v1x2x3x4x5,bwd1v1p1p1p1p1duals1v1x2x3x4x5",
    "bwd1v1p1p1p1p1duals1v1x2x3x5x4,bwd1v1p1p1p1p1duals1v1x2x3x5x4",
    "bwd1v1p1p1p1p1duals1v1x3x2x5x4,bwd1v1p1p1p1p1duals1v1x3x2x5x4",
    "bwd1v2v1duals1v1,bwd1v2v1duals1v1",
)


@pytest.mark.census
def test_vine_survey_of_the_depth_five_journal(tmp_path):
    journal = str(tmp_path / "a2_depth5.jsonl")
    ignore = [cli.rules_init.named_pair(n) for n in ("D", "Dprime", "K", "Kprime")]
    seed = cli.rules_init.named_pair("A2")
    cli.cmd_enumerate(RunConfig(seed=seed, max_depth=5, ignore=ignore, journal_path=journal))
    verdicts = cli.cmd_vines(Journal(journal).read(), cli.SURVEY_WINDOW)
    in_window = [v for v in verdicts if v.reason != "index-window"]
    accepted = {v.pair for v in in_window if v.accepted}
    assert accepted == {pair_key(parse_pair(s)) for s in SURVIVING_VINES}
    assert {v.reason for v in in_window if not v.accepted} <= {"dimension<1", "not-algebraic-integer"}
    # every survivor is disposed of by the literature table
    assert all(v.disposition and v.citation for v in in_window if v.accepted)

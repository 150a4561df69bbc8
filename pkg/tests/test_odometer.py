import pytest

import cli
from bigraph import pair_key, parse, parse_pair
from odometer import (
    classify_pair,
    extend_one_depth,
    intermediate_filter,
    involutions,
    is_finite_pair,
    is_stable_at_depth,
    match_rule,
    pair_norm,
    root_walks,
    run,
    thickness,
    thin_central_vertex,
)
from qarith import compare, parse_bound
from schema import RunConfig

BOUND = parse_bound("31/5")
A2 = "bwd1duals1"
D = "bwd1v1p1v1x0p1x1p0x1duals1v1x2"
K = "bwd1v1p1v1x1p0x1p0x1duals1v1x2"
S = "bwd1v1p1v1x0p1x1p0x1v0x1x0duals1v1x2v1"


def test_thickness():
    assert thickness(parse(D), 0, 1) == 2
    assert thickness(parse(K), 0, 1) == 2
    assert thickness(parse("bwd1v1p1v1x0p0x1duals1v1x2"), 0, 1) == 1


def test_intermediate_filter():
    assert not intermediate_filter(parse_pair(D))
    # P and Q meet only through the depth-1 vertex, and P has an upward edge
    assert intermediate_filter(parse_pair("bwd1v1p1v1x0p0x1duals1v1x2"))
    # nothing above depth 2: both depth-2 vertices are univalent
    assert not intermediate_filter(parse_pair("bwd1v1p1duals1v1x2"))


def test_intermediate_filter_reads_the_dual_graph():
    plus = "bwd1v1p1v1x1p0x1duals1v1x2"
    minus = "bwd1v1p1v1x0p0x1duals1v1x2"
    assert thin_central_vertex(parse(plus)) is None
    assert thin_central_vertex(parse(minus)) == 0
    pair = parse_pair(f"{plus},{minus}")
    assert intermediate_filter(pair)
    assert intermediate_filter(pair.swapped())


def test_stability():
    assert is_stable_at_depth(parse(S), 3)
    assert not is_stable_at_depth(parse(D), 2)
    assert is_stable_at_depth(parse("bwd1v1v1v1duals1v1v1"), 2)
    with pytest.raises(ValueError):
        is_stable_at_depth(parse(D), 3)


def test_classify_pair():
    assert classify_pair(parse_pair("bwd1v2v1duals1v1"), BOUND) == "cylinder"
    assert classify_pair(parse_pair(D), BOUND) == "weed"
    assert classify_pair(parse_pair("bwd1v1p1p1p1p1p1duals1v1x2x3x4x5x6"), BOUND) == "dead"
    # stable straight away is not a cylinder: the stability is not past the branch point
    assert classify_pair(parse_pair("bwd1v1duals1v1"), BOUND) == "weed"


def test_involutions():
    assert len(list(involutions(3))) == 4
    assert len(list(involutions(4))) == 10
    assert all(tuple(inv[inv[i]] for i in range(4)) == tuple(range(4)) for inv in involutions(4))


def test_root_walks_and_finiteness():
    assert root_walks(parse(A2), 3) == (1, 1, 1)
    assert root_walks(parse("bwd1v1p1duals1v1x2"), 2) == (1, 3)
    assert is_finite_pair(parse_pair(S))
    assert not is_finite_pair(parse_pair("bwd1v1duals1v1,bwd1v1v1duals1v1"))


def test_extensions_are_canonical_and_sorted():
    children = extend_one_depth(parse_pair(A2), BOUND)
    keys = [pair_key(c) for c in children]
    assert keys == sorted(set(keys))
    assert all(c.max_depth == 2 for c in children)
    assert pair_key(parse_pair("bwd1v1duals1v1")) in keys


def test_extensions_never_lower_the_norm():
    parent = pair_norm(parse_pair(A2))
    for child in extend_one_depth(parse_pair(A2), BOUND):
        assert compare(pair_norm(child), parent) != "LT"


def test_exclusion_table_matches_by_truncation(rules):
    diamond = parse_pair("bwd1v1p1v1x1duals1v2x1")
    assert match_rule(rules, diamond).id == "diamond-no-extension"
    assert match_rule(rules, parse_pair(D)) is None
    vine = parse_pair("bwd1v2v1duals1v1")
    assert match_rule(rules, vine, kind="vine-disposition").id == "vine-double-edge"


def test_run_to_depth_two(rules):
    tree = run(parse_pair(A2), 2, BOUND, rules=rules)
    keys = [n.canonical for n in tree.nodes]
    assert len(keys) == len(set(keys))
    root = tree.level(1)
    assert len(root) == 1 and root[0].status in ("vine", "weed-extended")
    a3 = [n for n in tree.nodes if n.canonical == pair_key(parse_pair("bwd1v1duals1v1"))]
    assert a3 and a3[0].status == "excluded" and a3[0].citation
    assert all(n.parent == root[0].canonical for n in tree.level(2))
    assert all(n.reason for n in tree.with_status("excluded"))


def test_run_with_index_window_judges_vines_and_cylinders(rules):
    plain = run(parse_pair(A2), 2, BOUND, rules=rules)
    assert all(n.verdict is None for n in plain.nodes)

    tree = run(parse_pair(A2), 2, BOUND, rules=rules, index_min=parse_bound("4"))
    judged = tree.with_status("vine", "cylinder")
    assert judged
    for n in tree.nodes:
        if n.status in ("vine", "cylinder"):
            assert n.verdict
        else:
            assert n.verdict is None
    # A2 itself has index 1, below the window
    root = tree.level(1)[0]
    if root.status == "vine":
        assert root.verdict == "index-window"


def test_ignored_weeds_are_recorded_not_grown(rules):
    tree = run(parse_pair(D), 4, BOUND, rules=rules, ignore=[D])
    assert [n.status for n in tree.nodes] == ["weed-ignored"]


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(seed="nonsense")
    with pytest.raises(ValueError):
        RunConfig(index_min="31/5", index_max="3+sqrt5")


# -----------------------------
# Census runs (long)
# -----------------------------
@pytest.mark.census
def test_depth_three_census():
    tree = cli.cmd_enumerate(RunConfig(seed=A2, max_depth=3))
    assert cli.compare_expectation(tree, "depth3=300,intermediates=292") == []


@pytest.mark.census
def test_depth_five_census(fixture_path):
    ignore = [cli.rules_init.named_pair(n) for n in ("D", "Dprime", "K", "Kprime")]
    tree = cli.cmd_enumerate(RunConfig(seed=A2, max_depth=5, ignore=ignore))
    assert cli.compare_expectation(tree, "vines+cylinders=32,weeds=0") == []
    assert cli.compare_expectation(tree, fixture_path("a2_depth5.txt")) == []


@pytest.mark.census
@pytest.mark.parametrize(
    "seed,depth,restrict,fixture",
    [
        ("D", 5, ["d2", "two-edges-3-4"], "d_d2.txt"),
        ("Dprime", 5, ["d2", "two-edges-3-4"], "dprime_d2.txt"),
        ("D", 6, ["d3"], "d_d3.txt"),
        ("Dprime", 6, ["d3"], "dprime_d3.txt"),
        ("K", 5, [], "k_depth5.txt"),
        ("Kprime", 6, ["two-edges-3-4"], "kprime_depth6.txt"),
    ],
)
def test_restricted_family_runs(seed, depth, restrict, fixture, fixture_path):
    config = RunConfig(seed=cli.rules_init.named_pair(seed), max_depth=depth, restrict=restrict)
    tree = cli.cmd_enumerate(config)
    assert cli.compare_expectation(tree, fixture_path(fixture)) == []

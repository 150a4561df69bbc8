import pytest

from journal import Journal, to_dot, write_dot
from schema import ClassificationNode

PARENT = "bwd1duals1,bwd1duals1"


def _nodes():
    return [
        ClassificationNode(depth=1, pair=PARENT.split(","), status="vine"),
        ClassificationNode(
            depth=2,
            pair=["bwd1v1duals1v1", "bwd1v1duals1v1"],
            status="excluded",
            reason="2-supertransitive",
            citation="scope restriction (1-supertransitive)",
            parent=PARENT,
        ),
        ClassificationNode(depth=2, pair=["bwd1v2duals1v1", "bwd1v2duals1v1"], status="cylinder", parent=PARENT),
        ClassificationNode(depth=2, pair=["bwd1v1p1duals1v1x2", "bwd1v1p1duals1v1x2"], status="weed-active", parent=PARENT),
    ]


def test_journal_round_trip(tmp_path):
    j = Journal(str(tmp_path / "run.jsonl"))
    assert not j.exists()
    assert j.write(_nodes()) == 4
    back = j.read()
    assert [n.model_dump() for n in back] == [n.model_dump() for n in _nodes()]


def test_journal_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        Journal(str(tmp_path / "missing.jsonl")).read()
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"depth": 1, "pair": ["bwd1duals1", "bwd1duals1"], "status": "vine"}\n{"depth": 2}\n')
    with pytest.raises(ValueError) as e:
        Journal(str(bad)).read()
    assert "bad.jsonl:2" in str(e.value)


def test_dot_colours_and_edges(tmp_path):
    dot = to_dot(_nodes())
    assert dot.startswith("digraph odometer {")
    assert "fillcolor=lightblue" in dot
    assert "fillcolor=lightpink" in dot
    assert f'"{PARENT}" -> "bwd1v2duals1v1,bwd1v2duals1v1";' in dot
    assert "[2-supertransitive]" in dot
    path = tmp_path / "tree.dot"
    write_dot(str(path), _nodes())
    assert path.read_text() == dot

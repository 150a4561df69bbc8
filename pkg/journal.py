# journal.py
# Classification journal (one JSON object per line) and DOT tree export.
import json
import logging
import os
from typing import Iterable, List

from schema import ClassificationNode

log = logging.getLogger(__name__)

_FILL = {"cylinder": "lightblue", "weed-active": "lightpink"}


class Journal:
    def __init__(self, path: str):
        self.path = path

    def exists(self) -> bool:
        return os.path.exists(self.path)

    def write(self, nodes: Iterable[ClassificationNode]) -> int:
        count = 0
        with open(self.path, "w", encoding="utf-8") as f:
            for node in nodes:
                f.write(json.dumps(node.model_dump(exclude_none=True), sort_keys=True) + "\n")
                count += 1
        log.info("wrote %d nodes to %s", count, self.path)
        return count

    def read(self) -> List[ClassificationNode]:
        if not self.exists():
            raise FileNotFoundError(f"journal not found: {self.path}")
        out = []
        with open(self.path, "r", encoding="utf-8") as f:
            for n, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    out.append(ClassificationNode(**json.loads(line)))
                except (json.JSONDecodeError, ValueError) as e:
                    raise ValueError(f"{self.path}:{n}: bad journal line: {e}") from e
        return out


def to_dot(nodes: Iterable[ClassificationNode]) -> str:
    """Tree export: node labels are canonical pair strings, cylinders blue, active weeds red."""
    lines = ["digraph odometer {", "  rankdir=LR;", "  node [shape=box, style=\"rounded,filled\", fillcolor=white];"]
    for node in nodes:
        label = node.canonical.replace(",", "\\n")
        fill = _FILL.get(node.status, "white")
        extra = f"\\n[{node.reason}]" if node.reason else ""
        lines.append(f'  "{node.canonical}" [label="{label}{extra}", fillcolor={fill}];')
        if node.parent:
            lines.append(f'  "{node.parent}" -> "{node.canonical}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_dot(path: str, nodes: Iterable[ClassificationNode]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(to_dot(nodes))

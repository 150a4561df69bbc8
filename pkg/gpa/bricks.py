# gpa/bricks.py
# Diagrams written as n parallel strings with grade-2 bricks bridging
# adjacent pairs, read top to bottom, and their evaluation.

from __future__ import annotations

import json
import logging
import os
from typing import Dict, List, Literal, Mapping, Union

from pydantic import BaseModel, Field, model_validator

from gpa.element import GpaElement, ShadingError, brick_shading

log = logging.getLogger(__name__)

BRICKS_PATH = os.getenv("ODOMETER_BRICKS_PATH", os.path.join(os.path.dirname(os.path.dirname(__file__)), "data", "bricks.json"))


class Brick(BaseModel):
    position: int = Field(ge=1)
    element: str
    clicks: int = 0


class BrickDiagram(BaseModel):
    strands: int = Field(ge=2)
    bricks: List[Brick]
    closed: bool = False
    shading: Literal["+", "-"] = "+"

    @model_validator(mode="after")
    def positions_in_range(self):
        for b in self.bricks:
            if b.position > self.strands - 1:
                raise ValueError(f"brick at position {b.position} does not fit on {self.strands} strands")
        return self


def load_diagrams(path: str = BRICKS_PATH) -> Dict[str, BrickDiagram]:
    with open(path, "r", encoding="utf-8") as f:
        raw = json.load(f)
    return {name: BrickDiagram(**spec) for name, spec in raw.items()}


def eval_brick(diagram: BrickDiagram, bindings: Mapping[str, GpaElement]) -> Union[GpaElement, complex]:
    """Multiply the embedded bricks in order; close up with the trace when the diagram is closed."""
    if not diagram.bricks:
        raise ValueError("diagram has no bricks")
    out = None
    for k, b in enumerate(diagram.bricks):
        if b.element not in bindings:
            raise KeyError(f"brick {k} refers to unbound element {b.element!r}")
        x = bindings[b.element].rotate(b.clicks)
        want = brick_shading(diagram.shading, b.position)
        if x.shading != want:
            raise ShadingError(
                f"brick {k} ({b.element}, {b.clicks} clicks) has shading {x.shading} "
                f"but position {b.position} needs {want}"
            )
        placed = x.embed(b.position, diagram.strands)
        out = placed if out is None else out @ placed
    return out.trace() if diagram.closed else out

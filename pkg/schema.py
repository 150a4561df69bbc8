# schema.py
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from bigraph import CodecError, parse_pair
from qarith import BoundError, compare, parse_bound

Status = Literal["weed-active", "weed-ignored", "weed-extended", "cylinder", "vine", "excluded"]
Restriction = Literal["d1", "d2", "d3", "two-edges-3-4", "drop-cylinders"]


class ExclusionRule(BaseModel):
    id: str
    kind: Literal["exclusion", "vine-disposition"] = "exclusion"
    match: Optional[str] = None
    predicate: Optional[str] = None
    reason: str
    citation: str

    @model_validator(mode="after")
    def one_matcher(self):
        if (self.match is None) == (self.predicate is None):
            raise ValueError("rule needs exactly one of match / predicate")
        if self.match is not None:
            parse_pair(self.match)
        return self


class ClassificationNode(BaseModel):
    depth: int
    pair: List[str]
    status: Status
    reason: Optional[str] = None
    citation: Optional[str] = None
    parent: Optional[str] = None
    # id of the exclusion-table entry that set the node aside
    rule: Optional[str] = None
    # vine-test outcome for vines and cylinders: "accepted" or the rejection reason
    verdict: Optional[str] = None

    @property
    def canonical(self) -> str:
        return ",".join(self.pair)


class RunConfig(BaseModel):
    seed: str = "bwd1duals1,bwd1duals1"
    max_depth: int = Field(default=3, ge=1)
    index_min: str = "3+sqrt5"
    index_max: str = "31/5"
    rules_path: Optional[str] = None
    ignore: List[str] = Field(default_factory=list)
    restrict: List[Restriction] = Field(default_factory=list)
    journal_path: Optional[str] = None
    dot_path: Optional[str] = None

    @field_validator("seed")
    @classmethod
    def seed_parses(cls, v: str) -> str:
        try:
            parse_pair(v)
        except CodecError as e:
            raise ValueError(f"seed does not parse: {e}") from e
        return v

    @field_validator("ignore")
    @classmethod
    def ignore_parses(cls, v: List[str]) -> List[str]:
        for s in v:
            try:
                parse_pair(s)
            except CodecError as e:
                raise ValueError(f"ignore entry does not parse: {e}") from e
        return v

    @model_validator(mode="after")
    def window_ordered(self):
        try:
            lo, hi = parse_bound(self.index_min), parse_bound(self.index_max)
        except BoundError as e:
            raise ValueError(str(e)) from e
        if compare(lo, hi) == "GT":
            raise ValueError(f"index window is empty: {self.index_min} > {self.index_max}")
        return self


class VineVerdict(BaseModel):
    pair: str
    accepted: bool
    reason: Optional[str] = None
    witness: Optional[str] = None
    index: Optional[float] = None
    index_minpoly: Optional[str] = None
    disposition: Optional[str] = None
    citation: Optional[str] = None


class CheckResult(BaseModel):
    name: str
    max_deviation: float
    passed: bool
    detail: Optional[str] = None


class SuiteReport(BaseModel):
    tolerance: float
    checks: List[CheckResult] = Field(default_factory=list)
    octahedron: Dict[str, List[float]] = Field(default_factory=dict)
    octahedron_ratio: Optional[float] = None

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)


class EliminationReport(BaseModel):
    family: Literal["D1", "D2", "D3", "K", "Kprime"]
    lines: List[str] = Field(default_factory=list)
    survivors: List[str] = Field(default_factory=list)
    eliminated: bool

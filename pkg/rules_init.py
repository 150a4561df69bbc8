# rules_init.py
# Loads the exclusion table and the named pairs once at startup.
import hashlib
import json
import os
import sys
from typing import Dict, List, Optional

from pydantic import ValidationError

from bigraph import CodecError, parse_pair
from schema import ExclusionRule

_DATA = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")

RULES_VERSION = os.getenv("ODOMETER_RULES_VERSION", "2")
RULES_PATH = os.getenv("ODOMETER_RULES_PATH", os.path.join(_DATA, "rules.json"))
NAMED_PAIRS_PATH = os.getenv("ODOMETER_NAMED_PAIRS_PATH", os.path.join(_DATA, "named_pairs.json"))


_RULES: List[ExclusionRule] = []
_NAMED: Dict[str, str] = {}
_RULES_HASH: str = ""
_RULES_READY: bool = False
_RULES_ERROR: Optional[str] = None


def _hash_text(txt: str) -> str:
    return hashlib.sha256(txt.encode("utf-8")).hexdigest()


def read_rules(path: str) -> List[ExclusionRule]:
    with open(path, "r", encoding="utf-8") as f:
        raw = json.load(f)
    if not isinstance(raw, list):
        raise ValueError(f"{path}: expected a JSON array of rules")
    rules = [ExclusionRule(**r) for r in raw]
    seen = set()
    for r in rules:
        if r.id in seen:
            raise ValueError(f"{path}: duplicate rule id {r.id!r}")
        seen.add(r.id)
    return rules


def read_named_pairs(path: str) -> Dict[str, str]:
    with open(path, "r", encoding="utf-8") as f:
        raw = json.load(f)
    for name, s in raw.items():
        parse_pair(s)
    return dict(raw)


def load_rules(strict: bool = True, path: Optional[str] = None) -> None:
    """Read and validate the rule table and named pairs. strict=True aborts on failure."""
    global _RULES, _NAMED, _RULES_HASH, _RULES_READY, _RULES_ERROR
    path = path or RULES_PATH
    try:
        with open(path, "r", encoding="utf-8") as f:
            _RULES_HASH = _hash_text(f.read())
        _RULES = read_rules(path)
        _NAMED = read_named_pairs(NAMED_PAIRS_PATH)
        _RULES_READY = True
        _RULES_ERROR = None
    except (OSError, ValueError, ValidationError, CodecError) as e:
        _RULES = []
        _NAMED = {}
        _RULES_HASH = ""
        _RULES_READY = False
        _RULES_ERROR = f"{type(e).__name__}: {e}"
        if strict:
            sys.stderr.write(f"[rules_init] FATAL: could not load rules at {path}: {_RULES_ERROR}\n")
            sys.exit(1)


def get_rules() -> List[ExclusionRule]:
    if not _RULES_READY:
        load_rules(strict=False)
    return list(_RULES)


def named_pair(name: str) -> str:
    """Pair string for a name in the table (A2, D, Dprime, K, Kprime, S, Sprime); other strings pass through."""
    if not _RULES_READY:
        load_rules(strict=False)
    return _NAMED.get(name, name)


def health_blob() -> Dict[str, object]:
    return {
        "rules_version": RULES_VERSION,
        "rules_count": len(_RULES),
        "rules_hash": _RULES_HASH,
        "rules_ready": _RULES_READY,
        "rules_error": _RULES_ERROR,
    }

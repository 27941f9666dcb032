"""Hierarchical reconfigurable place/transition nets with label subtyping."""

from importlib import resources
from pathlib import Path

from .dpo import Rule, transform
from .hier import HierNet, SubstRule, flatten_full, flatten_recursive, is_well_defined
from .match import find_occurrences, isomorphic
from .net import PTNet, fire, fire_parallel
from .poset import TOP, NameSpacePair, PosetG

__all__ = [
    "TOP", "PosetG", "NameSpacePair", "PTNet", "fire", "fire_parallel", "Rule", "transform",
    "find_occurrences", "isomorphic", "HierNet", "SubstRule", "flatten_recursive", "flatten_full",
    "is_well_defined", "fixture_path",
]


def fixture_path(name: str) -> Path:
    """Path of a bundled fixture (``name`` with or without ``.json``)."""
    if not name.endswith(".json"):
        name += ".json"
    return Path(str(resources.files(__package__) / "fixtures" / name))

"""Access to the JSON schemas shipped with the package."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

SCHEMAS = ("trial", "summary", "oracle", "lemma", "lift", "chunk_graph")

# which schema each subcommand's jsonl output follows
COMMAND_SCHEMAS = {"gen": "lift", "colour": "trial", "oracle": "oracle", "sweep": "summary", "lemma": "lemma"}


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    if name not in SCHEMAS:
        raise KeyError(f"unknown schema {name!r}; choose from {', '.join(SCHEMAS)}")
    path = resources.files("liftlab") / "schemas" / f"{name}.schema.json"
    return json.loads(path.read_text())

"""Loader for the reference nets shipped with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .dsl import parse_net
from .net import Marking, Net

NAMES = ("CHOICE1", "RING2", "RING2X3", "FIG1")


def corpus_path(name: str) -> Path:
    """Filesystem path of a shipped ``.net`` file."""
    if name not in NAMES:
        raise KeyError(f"unknown corpus net {name!r}; have {', '.join(NAMES)}")
    with resources.as_file(resources.files("lucent") / "nets" / f"{name}.net") as p:
        return Path(p)


def load(name: str) -> tuple[Net, Marking]:
    text = corpus_path(name).read_text(encoding="utf-8")
    return parse_net(text, source=name)

"""Line-oriented net description format.

One declaration per line, ``#`` starts a comment::

    net <name>
    place <id> [tokens=<n>]
    trans <id>
    arc <src> <dst>

Identifiers are arbitrary non-whitespace words (so ``t*`` is a valid name).
"""

from __future__ import annotations

import re

from .errors import DslError
from .net import Marking, Net

_TOKENS_RE = re.compile(r"^tokens=(\d+)$")


def parse_net(text: str, source: str = "<string>") -> tuple[Net, Marking]:
    """Parse a net plus its declared initial marking.

    Raises :class:`DslError` with a 1-based line number on the first problem.
    """
    name: str | None = None
    places: list[str] = []
    tokens: dict[str, int] = {}
    transitions: list[str] = []
    arcs: list[tuple[str, str]] = []
    arc_seen: set[tuple[str, str]] = set()
    declared: set[str] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        keyword, args = words[0], words[1:]
        if keyword == "net":
            if name is not None:
                raise DslError(lineno, "duplicate net declaration")
            if len(args) != 1:
                raise DslError(lineno, "expected: net <name>")
            name = args[0]
        elif keyword == "place":
            if not args or len(args) > 2:
                raise DslError(lineno, "expected: place <id> [tokens=<n>]")
            pid = args[0]
            if pid in declared:
                raise DslError(lineno, f"duplicate declaration of {pid!r}")
            declared.add(pid)
            places.append(pid)
            if len(args) == 2:
                m = _TOKENS_RE.match(args[1])
                if not m:
                    raise DslError(lineno, f"bad token annotation {args[1]!r}")
                tokens[pid] = int(m.group(1))
        elif keyword == "trans":
            if len(args) != 1:
                raise DslError(lineno, "expected: trans <id>")
            tid = args[0]
            if tid in declared:
                raise DslError(lineno, f"duplicate declaration of {tid!r}")
            declared.add(tid)
            transitions.append(tid)
        elif keyword == "arc":
            if len(args) != 2:
                raise DslError(lineno, "expected: arc <src> <dst>")
            src, dst = args
            if src not in declared:
                raise DslError(lineno, f"arc endpoint {src!r} is not declared")
            if dst not in declared:
                raise DslError(lineno, f"arc endpoint {dst!r} is not declared")
            if (src, dst) in arc_seen:
                raise DslError(lineno, f"duplicate arc {src} -> {dst}")
            arc_seen.add((src, dst))
            arcs.append((src, dst))
        else:
            raise DslError(lineno, f"unknown declaration {keyword!r}")

    if not places and not transitions:
        raise DslError(0, "empty net")
    net = Net.build(name or source, places, transitions, arcs)
    return net, Marking.over(net, tokens)


def emit_net(net: Net, marking: Marking | None = None) -> str:
    """Canonical source text; ``parse_net(emit_net(...))`` round-trips."""
    lines = [f"net {net.name}"]
    for p in net.places:
        count = marking[p] if marking is not None else 0
        lines.append(f"place {p.name} tokens={count}" if count else f"place {p.name}")
    for t in net.transitions:
        lines.append(f"trans {t.name}")
    for src, dst in sorted(net.flow):
        lines.append(f"arc {src.name} {dst.name}")
    return "\n".join(lines) + "\n"

"""Brute-force reference implementations used to cross-check the package.

These deliberately share no code with the shipped algorithms: paths and
circuits come from naive backtracking, reachability from a recursive
depth-first walk, and feed witnesses from filtering the full path set.
"""

from __future__ import annotations

from lucent.net import Marking, Net, NodeId, Path


def all_elementary_paths(net: Net, max_paths: int = 2_000_000) -> list[Path]:
    """Every elementary path (length >= 1), by plain backtracking."""
    out: list[Path] = []

    def walk(seq: list[NodeId]):
        if len(out) >= max_paths:
            raise RuntimeError("oracle path explosion")
        out.append(Path(tuple(seq)))
        for nxt in net.successors(seq[-1]):
            if nxt not in seq:
                seq.append(nxt)
                walk(seq)
                seq.pop()

    for start in net.nodes:
        walk([start])
    return out


def all_elementary_circuits(net: Net) -> set[tuple[NodeId, ...]]:
    """Every elementary circuit, normalised to start at its least node."""
    circuits: set[tuple[NodeId, ...]] = set()
    for path in all_elementary_paths(net):
        if path.first in net.successors(path.last):
            k = min(range(len(path.nodes)), key=lambda i: path.nodes[i])
            circuits.add(path.nodes[k:] + path.nodes[:k])
    return circuits


def feed_witness_set(tnet: Net, m: Marking, t: NodeId, q: NodeId) -> list[Path]:
    """All token-free elementary paths (tau,...,q,t) with tau enabled at m."""
    enabled = set(tnet.enabled(m))
    out = []
    for path in all_elementary_paths(tnet):
        nodes = path.nodes
        if (
            len(nodes) >= 3
            and nodes[-1] == t
            and nodes[-2] == q
            and nodes[0] in enabled
            and m.token_count(path) == 0
        ):
            out.append(path)
    return out


def naive_reachable(net: Net, m0: Marking, cap: int = 100_000) -> set[tuple[int, ...]]:
    """Reachable marking vectors by iterative depth-first search."""
    seen = {m0.counts}
    stack = [m0]
    while stack:
        m = stack.pop()
        if len(seen) > cap:
            raise RuntimeError("oracle state explosion")
        for t in net.enabled(m):
            succ = net.fire(m, t)
            if succ.counts not in seen:
                seen.add(succ.counts)
                stack.append(succ)
    return seen


def p_component_place_sets_by_subsets(net: Net) -> set[frozenset[NodeId]]:
    """Place sets of all P-components, by scanning every place subset."""
    from lucent.structure import p_component_on

    out = set()
    n = len(net.places)
    for mask in range(1, 1 << n):
        place_set = frozenset(p for i, p in enumerate(net.places) if mask >> i & 1)
        if p_component_on(net, place_set) is not None:
            out.add(place_set)
    return out


def max_token_count_over_paths(net: Net, m: Marking, avoid: NodeId | None = None) -> int:
    """Independent route for the path token bound."""
    best = 0
    for path in all_elementary_paths(net):
        if avoid is not None and avoid in path.nodes:
            continue
        best = max(best, m.token_count(path))
    return best

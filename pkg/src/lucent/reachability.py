"""Explicit-state behavioural analysis.

The reachability graph is built by breadth-first closure under firing, with
states numbered in discovery order and transitions expanded in node order,
so graphs are reproducible. Liveness, boundedness, safety, home markings,
regeneration clusters and the brute-force lucency verdict are all decided by
direct enumeration over the finished graph; incomplete graphs answer with an
explicit indeterminate outcome instead of a guess.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .errors import IndeterminateError
from .net import Cluster, Marking, Net, NodeId
from .structure import DEFAULT_ENUM_CAP, elementary_circuits, p_components

DEFAULT_STATE_CAP = 1_000_000


@dataclass(frozen=True)
class ReachabilityGraph:
    """States, transition-labelled edges, and an exploration-completeness flag."""

    net: Net
    initial: Marking
    states: tuple[Marking, ...]
    edges: tuple[tuple[int, NodeId, int], ...]
    complete: bool
    warnings: tuple[str, ...] = ()

    @cached_property
    def state_index(self) -> dict[tuple[int, ...], int]:
        return {m.counts: i for i, m in enumerate(self.states)}

    def index_of(self, m: Marking) -> int | None:
        return self.state_index.get(m.counts)

    @cached_property
    def enabled_sets(self) -> tuple[tuple[NodeId, ...], ...]:
        return tuple(self.net.enabled(m) for m in self.states)

    @cached_property
    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        table: list[list[int]] = [[] for _ in self.states]
        for src, _t, dst in self.edges:
            table[dst].append(src)
        return tuple(tuple(sorted(set(xs))) for xs in table)

    def backward_closure(self, seeds) -> set[int]:
        seen = set(seeds)
        queue = deque(seen)
        while queue:
            for prev in self.predecessors[queue.popleft()]:
                if prev not in seen:
                    seen.add(prev)
                    queue.append(prev)
        return seen

    def require_complete(self) -> None:
        if not self.complete:
            raise IndeterminateError("indeterminate: state cap hit")

    def to_dict(self) -> dict:
        return {
            "net": self.net.name,
            "places": [p.name for p in self.net.places],
            "initial": 0,
            "states": [m.as_dict() for m in self.states],
            "edges": [[i, t.name, j] for i, t, j in self.edges],
            "complete": self.complete,
            "warnings": list(self.warnings),
        }


def explore(net: Net, m0: Marking, cap: int = DEFAULT_STATE_CAP) -> ReachabilityGraph:
    """Breadth-first closure under firing, capped at ``cap`` stored states."""
    net.ensure_valid()
    states: list[Marking] = [m0]
    index: dict[tuple[int, ...], int] = {m0.counts: 0}
    edges: list[tuple[int, NodeId, int]] = []
    queue = deque([0])
    complete = True
    warnings: list[str] = []
    while queue:
        i = queue.popleft()
        m = states[i]
        for t in net.enabled(m):
            succ = net.fire(m, t)
            j = index.get(succ.counts)
            if j is None:
                if len(states) >= cap:
                    complete = False
                    warnings.append(f"state cap {cap} hit; exploration truncated")
                    queue.clear()
                    break
                j = len(states)
                index[succ.counts] = j
                states.append(succ)
                queue.append(j)
            edges.append((i, t, j))
        if not complete:
            break
    return ReachabilityGraph(
        net=net,
        initial=m0,
        states=tuple(states),
        edges=tuple(edges),
        complete=complete,
        warnings=tuple(warnings),
    )


def is_live(rg: ReachabilityGraph) -> bool:
    """From every state, every transition can still occur somewhere ahead."""
    rg.require_complete()
    all_states = set(range(len(rg.states)))
    for t in rg.net.transitions:
        sources = {i for i, label, _j in rg.edges if label == t}
        if rg.backward_closure(sources) != all_states:
            return False
    return True


def bound(rg: ReachabilityGraph) -> int:
    """The smallest K with every place count <= K over all reachable markings."""
    rg.require_complete()
    return max((max(m.counts, default=0) for m in rg.states), default=0)


def is_bounded(rg: ReachabilityGraph) -> int:
    return bound(rg)


def is_safe(rg: ReachabilityGraph) -> bool:
    return bound(rg) <= 1


def is_home_marking(rg: ReachabilityGraph, m: Marking) -> bool:
    """Reachable from every reachable marking. Unreachable markings answer False."""
    rg.require_complete()
    i = rg.index_of(m)
    if i is None:
        return False
    return rg.backward_closure({i}) == set(range(len(rg.states)))


def regeneration_clusters(rg: ReachabilityGraph) -> tuple[Cluster, ...]:
    """Clusters whose characteristic marking is a home marking of a live and
    bounded system."""
    rg.require_complete()
    # a complete finite graph is bounded by construction; liveness is the real gate
    if not is_live(rg):
        return ()
    out = []
    for cl in rg.net.clusters():
        if is_home_marking(rg, cl.marking()):
            out.append(cl)
    return tuple(out)


def is_perpetual(rg: ReachabilityGraph) -> bool:
    return bool(regeneration_clusters(rg))


@dataclass(frozen=True)
class FundamentalPropertyReport:
    """Checked facts of a perpetual system: component token counts, safety,
    and the circuit form of the invariant for T-nets."""

    failures: tuple[str, ...]
    components_checked: int
    circuits_checked: int

    @property
    def ok(self) -> bool:
        return not self.failures


def check_fundamental_property(
    rg: ReachabilityGraph, cl: Cluster, enum_cap: int = DEFAULT_ENUM_CAP
) -> FundamentalPropertyReport:
    rg.require_complete()
    net = rg.net
    failures: list[str] = []
    comps = p_components(net, enum_cap)
    cl_places = set(cl.places)
    for comp in comps:
        inside = [p for p in comp.places if p in cl_places]
        if len(inside) != 1:
            failures.append(
                f"component {sorted(str(x) for x in comp.places)} holds "
                f"{len(inside)} cluster places instead of 1"
            )
            continue
        for i, m in enumerate(rg.states):
            count = m.token_count(comp.places)
            if count != 1:
                failures.append(
                    f"component {sorted(str(x) for x in comp.places)} has token count "
                    f"{count} at state {i}"
                )
                break
    if bound(rg) > 1:
        failures.append(f"system is not safe (bound {bound(rg)})")
    circuits = ()
    if net.is_t_net():
        if len(cl.transitions) != 1:
            failures.append("cluster of a T-net must contain exactly one transition")
        else:
            t_cl = cl.transitions[0]
            circuits = elementary_circuits(net, enum_cap)
            for gamma in circuits:
                if t_cl not in gamma.nodes:
                    failures.append(f"circuit {gamma} misses the cluster transition {t_cl}")
                    continue
                for i, m in enumerate(rg.states):
                    if m.token_count(gamma) != 1:
                        failures.append(
                            f"circuit {gamma} has token count {m.token_count(gamma)} at state {i}"
                        )
                        break
    return FundamentalPropertyReport(tuple(failures), len(comps), len(circuits))


@dataclass(frozen=True)
class LucencyReport:
    """Verdict plus the state partition by enabled-set and witness pairs."""

    verdict: str  # "lucent" | "not_lucent" | "indeterminate"
    classes: tuple[tuple[int, ...], ...]
    witnesses: tuple[tuple[int, int], ...]

    def to_dict(self, rg: ReachabilityGraph | None = None) -> dict:
        data = {
            "verdict": self.verdict,
            "classes": [list(c) for c in self.classes],
            "witnesses": [list(w) for w in self.witnesses],
        }
        if rg is not None:
            data["witness_markings"] = [
                [rg.states[i].as_dict(), rg.states[j].as_dict()] for i, j in self.witnesses
            ]
        return data


def _enabled_classes(rg: ReachabilityGraph) -> tuple[tuple[int, ...], ...]:
    groups: dict[tuple[NodeId, ...], list[int]] = {}
    for i, en in enumerate(rg.enabled_sets):
        groups.setdefault(en, []).append(i)
    return tuple(tuple(v) for _k, v in sorted(groups.items()))


def lucency_bruteforce(rg: ReachabilityGraph) -> LucencyReport:
    """Group states by enabled-set; lucent iff every class is a singleton."""
    classes = _enabled_classes(rg)
    witnesses = tuple(
        (group[a], group[b])
        for group in classes
        for a in range(len(group))
        for b in range(a + 1, len(group))
    )
    if not rg.complete:
        verdict = "indeterminate"
    elif witnesses:
        verdict = "not_lucent"
    else:
        verdict = "lucent"
    return LucencyReport(verdict, classes, witnesses)


def enabling_equivalent_pairs(
    rg: ReachabilityGraph, include_diagonal: bool = False
) -> tuple[tuple[int, int], ...]:
    """Unordered pairs of distinct states with equal enabled-sets; diagonal
    pairs (i, i) on request."""
    pairs: list[tuple[int, int]] = []
    if include_diagonal:
        pairs.extend((i, i) for i in range(len(rg.states)))
    pairs.extend(lucency_bruteforce(rg).witnesses)
    return tuple(sorted(pairs))

"""Shutdown dynamics: emptying CP-subnets, global shutdown across an
exhaustion, marking restriction/extension, and perpetuality propagation.

A shutdown sequence for a CP-subnet fires only its non-way-in transitions
and ends when none of them is enabled. For adapted layers of perpetual
systems this drains the layer completely; the propagation step verifies the
resulting complement system is again perpetual instead of trusting it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .cp import CpExhaustion, CpSubnet
from .errors import NoShutdownError, PropagationError
from .net import Cluster, Marking, Net, NodeId, Subnet
from .reachability import DEFAULT_STATE_CAP, explore, regeneration_clusters


@dataclass(frozen=True)
class FiringSequence:
    """An ordered list of transitions, optionally tagged per step."""

    transitions: tuple[NodeId, ...]
    tags: tuple[str, ...] = ()

    def __post_init__(self):
        if self.tags and len(self.tags) != len(self.transitions):
            raise ValueError("one tag per step, or none")

    def names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.transitions)

    def __len__(self) -> int:
        return len(self.transitions)

    def __iter__(self):
        return iter(self.transitions)

    def __add__(self, other: "FiringSequence") -> "FiringSequence":
        tags: tuple[str, ...] = ()
        if self.tags or other.tags:
            tags = (self.tags or ("",) * len(self.transitions)) + (
                other.tags or ("",) * len(other.transitions)
            )
        return FiringSequence(self.transitions + other.transitions, tags)

    def __repr__(self) -> str:
        return "(" + ",".join(self.names()) + ")"


def shutdown_transitions(cp: CpSubnet) -> tuple[NodeId, ...]:
    """The transitions a shutdown sequence may use: the layer minus its way-in."""
    return tuple(t for t in cp.transitions if t != cp.way_in)


def restrict(m: Marking, sub: Subnet) -> Marking:
    """Keep the counts of the view's places (domain becomes the view)."""
    return sub.restrict(m)


def shutdown_sequence(
    net: Net, cp: CpSubnet, m: Marking, cap: int = DEFAULT_STATE_CAP
) -> tuple[FiringSequence, Marking]:
    """Fire non-way-in transitions of the layer until none is enabled.

    Greedy by node order; falls back to a breadth-first search over the
    layer-only firings when the greedy walk revisits a marking (possible only
    for layers with internal circuits).
    """
    allowed = shutdown_transitions(cp)
    allowed_set = set(allowed)
    current = m
    fired: list[NodeId] = []
    seen = {m.counts}
    while True:
        enabled = [t for t in net.enabled(current) if t in allowed_set]
        if not enabled:
            seq = FiringSequence(tuple(fired), tags=("shutdown",) * len(fired))
            return seq, current
        nxt = net.fire(current, enabled[0])
        if nxt.counts in seen:
            return _shutdown_bfs(net, cp, m, allowed, cap)
        seen.add(nxt.counts)
        fired.append(enabled[0])
        current = nxt


def _shutdown_bfs(
    net: Net, cp: CpSubnet, m: Marking, allowed: tuple[NodeId, ...], cap: int
) -> tuple[FiringSequence, Marking]:
    allowed_set = set(allowed)
    parents: dict[tuple[int, ...], tuple[tuple[int, ...], NodeId] | None] = {m.counts: None}
    states = {m.counts: m}
    queue = deque([m.counts])
    while queue:
        if len(parents) > cap:
            raise NoShutdownError(f"shutdown search cap exceeded ({cap})")
        key = queue.popleft()
        current = states[key]
        enabled = [t for t in net.enabled(current) if t in allowed_set]
        if not enabled:
            steps: list[NodeId] = []
            walk = key
            while parents[walk] is not None:
                walk, t = parents[walk]  # type: ignore[misc]
                steps.append(t)
            steps.reverse()
            seq = FiringSequence(tuple(steps), tags=("shutdown",) * len(steps))
            return seq, current
        for t in enabled:
            succ = net.fire(current, t)
            if succ.counts not in parents:
                parents[succ.counts] = (key, t)
                states[succ.counts] = succ
                queue.append(succ.counts)
    raise NoShutdownError(
        f"no shutdown sequence exists for layer with way-in {cp.way_in}; "
        "the input system is not well-formed"
    )


def global_shutdown(
    net: Net, exh: CpExhaustion, m: Marking, cap: int = DEFAULT_STATE_CAP
) -> tuple[FiringSequence, Marking]:
    """Concatenate one shutdown per layer, in exhaustion order."""
    current = m
    total = FiringSequence(())
    for layer in exh.layers:
        seq, current = shutdown_sequence(net, layer, current, cap)
        total = total + seq
    leftovers = [
        t
        for layer in exh.layers
        for t in net.enabled(current)
        if t in set(shutdown_transitions(layer))
    ]
    if leftovers:
        raise NoShutdownError(
            f"global shutdown left layer transitions enabled: "
            f"{', '.join(str(t) for t in sorted(set(leftovers)))}"
        )
    return total, current


def propagate_perpetual(
    net: Net,
    cp: CpSubnet,
    cl: Cluster,
    m: Marking,
    cap: int = DEFAULT_STATE_CAP,
) -> tuple[Net, Marking, Cluster]:
    """Shut the adapted layer down, restrict to the complement, and verify the
    restricted system is perpetual with the surviving cluster."""
    _seq, m_sd = shutdown_sequence(net, cp, m, cap)
    if m_sd.token_count(cp.places) != 0:
        raise PropagationError(
            f"shutdown left tokens inside the adapted layer: "
            f"{ {p.name: m_sd.get(p) for p in cp.places if m_sd.get(p)} }"
        )
    comp = cp.complement()
    comp_net = comp.as_net
    m_bar = comp.restrict(m_sd)
    surviving = [x for x in sorted(cl.nodes) if x in comp.nodes]
    if not surviving:
        raise PropagationError("cluster does not survive into the complement")
    cl_bar = comp_net.cluster_of(surviving[0])
    if cl_bar.nodes != cl.nodes & comp.nodes:
        raise PropagationError(
            "intersection with the complement is not a cluster of the complement"
        )
    rg = explore(comp_net, m_bar, cap)
    rg.require_complete()
    regen = regeneration_clusters(rg)
    if not any(c.nodes == cl_bar.nodes for c in regen):
        raise PropagationError(
            "complement system is not perpetual with the surviving cluster"
        )
    return comp_net, m_bar, cl_bar

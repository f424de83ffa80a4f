"""CP-subnet recognition and search, cluster-adapted exhaustions, and the
way-in place / critical transition boundary of an exhaustion.

A CP-subnet is a nonempty, weakly connected, transition-bordered T-subnet
whose complement is strongly connected and still contains a transition. An
exhaustion peels such subnets off one by one, always searching the current
complement, until a strongly connected T-net remains.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from .errors import CapExceededError, ExhaustionError, NotCpSubnetError
from .net import Cluster, Net, NodeId, Subnet
from .structure import DEFAULT_ENUM_CAP, is_strongly_connected


@dataclass(frozen=True)
class CpSubnet:
    """A validated CP-subnet with its unique way-in and its way-out transitions."""

    subnet: Subnet
    way_in: NodeId
    way_outs: tuple[NodeId, ...]

    @property
    def host(self) -> Net:
        return self.subnet.host

    @property
    def nodes(self) -> frozenset[NodeId]:
        return self.subnet.nodes

    @property
    def places(self) -> tuple[NodeId, ...]:
        return self.subnet.places

    @property
    def transitions(self) -> tuple[NodeId, ...]:
        return self.subnet.transitions

    def complement(self) -> Subnet:
        return self.subnet.complement()

    def __repr__(self) -> str:
        return (
            f"CpSubnet({{{', '.join(str(x) for x in self.subnet.nodes_sorted)}}}, "
            f"in={self.way_in}, out={{{', '.join(str(x) for x in self.way_outs)}}})"
        )


def cp_subnet(net: Net, nodes: Iterable["NodeId | str"]) -> CpSubnet:
    """Validate a node set as a CP-subnet; raise :class:`NotCpSubnetError`
    naming the first violated clause otherwise."""
    sub = net.span(nodes)
    if not sub.nodes:
        raise NotCpSubnetError("empty node set")
    if not sub.is_weakly_connected():
        raise NotCpSubnetError("not weakly connected")
    if not sub.is_transition_bordered():
        outside = sorted(
            str(y)
            for p in sub.places
            for y in net.predecessors(p) + net.successors(p)
            if y not in sub.nodes
        )
        raise NotCpSubnetError(f"not transition-bordered (outside neighbours: {', '.join(outside)})")
    if not sub.is_t_subnet():
        raise NotCpSubnetError("not a T-subnet (some place branches inside)")
    comp = sub.complement()
    if not comp.transitions:
        raise NotCpSubnetError("complement contains no transition")
    if not is_strongly_connected(comp):
        raise NotCpSubnetError("complement is not strongly connected")
    comp_places = frozenset(comp.places)
    way_ins = tuple(
        t for t in sub.transitions if any(p in comp_places for p in net.predecessors(t))
    )
    if len(way_ins) != 1:
        raise NotCpSubnetError(
            f"expected a unique way-in transition, found {len(way_ins)}"
        )
    way_outs = tuple(
        t for t in sub.transitions if any(p in comp_places for p in net.successors(t))
    )
    if not way_outs:
        raise NotCpSubnetError("no way-out transition")
    way_in = way_ins[0]
    reachable = {way_in}
    stack = [way_in]
    while stack:
        for y in sub.successors(stack.pop()):
            if y not in reachable:
                reachable.add(y)
                stack.append(y)
    missing = [p for p in sub.places if p not in reachable]
    if missing:
        raise NotCpSubnetError(
            f"places not reachable from the way-in transition: "
            f"{', '.join(str(p) for p in missing)}"
        )
    return CpSubnet(subnet=sub, way_in=way_in, way_outs=way_outs)


def is_cp_subnet(net: Net, nodes: Iterable["NodeId | str"]) -> bool:
    try:
        cp_subnet(net, nodes)
        return True
    except NotCpSubnetError:
        return False


def is_adapted(cp: CpSubnet, cl: Cluster) -> bool:
    """Adapted to a cluster: the cluster is not swallowed whole."""
    return not cl.nodes <= cp.nodes


@dataclass(frozen=True)
class AdaptednessReport:
    """The three equivalent readings of adaptedness, evaluated independently."""

    cluster_not_contained: bool
    complement_keeps_a_cluster_transition: bool
    cluster_places_in_complement: bool

    @property
    def value(self) -> bool:
        return self.cluster_not_contained


def adaptedness_equivalences(net: Net, cp: CpSubnet, cl: Cluster) -> AdaptednessReport:
    """Evaluate all three adaptedness conditions and assert their equivalence."""
    comp_nodes = net.node_set - cp.nodes
    c1 = not cl.nodes <= cp.nodes
    c2 = any(t in comp_nodes for t in cl.transitions)
    c3 = all(p in comp_nodes for p in cl.places)
    if not (c1 == c2 == c3):
        raise AssertionError(
            f"adaptedness equivalences broken on {cp!r} / {cl!r}: "
            f"not-contained={c1}, complement-transition={c2}, places-outside={c3}"
        )
    return AdaptednessReport(c1, c2, c3)


def _candidate_place_sets(net: Net, cap: int) -> list[frozenset[NodeId]]:
    """Connected nonempty sets of non-branching places.

    Two places are adjacent when they share a neighbouring transition; every
    connected set is produced exactly once, rooted at its least member.
    """
    simple = [
        p
        for p in net.places
        if len(net.predecessors(p)) == 1 and len(net.successors(p)) == 1
    ]
    simple_set = set(simple)
    neighbours: dict[NodeId, tuple[NodeId, ...]] = {}
    for p in simple:
        near: set[NodeId] = set()
        for t in net.predecessors(p) + net.successors(p):
            near.update(net.predecessors(t))
            near.update(net.successors(t))
        near.discard(p)
        neighbours[p] = tuple(sorted(q for q in near if q in simple_set))

    found: list[frozenset[NodeId]] = []

    def grow(current: frozenset[NodeId], frontier: list[NodeId], banned: frozenset[NodeId]):
        if len(found) >= cap:
            raise CapExceededError(f"search cap exceeded ({cap})")
        found.append(current)
        seen_here = banned
        for i, q in enumerate(frontier):
            new_frontier = [x for x in frontier[i + 1 :]]
            for x in neighbours[q]:
                if x not in current and x not in seen_here and x not in new_frontier:
                    new_frontier.append(x)
            grow(current | {q}, new_frontier, seen_here)
            seen_here = seen_here | {q}

    for root in simple:
        banned = frozenset(p for p in simple if p < root)
        frontier = [q for q in neighbours[root] if q not in banned]
        grow(frozenset((root,)), frontier, banned)
    return found


def find_cp_subnets(
    net: Net,
    adapt_to: Cluster | None = None,
    cap: int = DEFAULT_ENUM_CAP,
    allow_place_free: bool = False,
) -> tuple[CpSubnet, ...]:
    """Enumerate the CP-subnets of a net, smallest first.

    Candidates are spans of connected non-branching place sets together with
    their adjacent transitions, which is exhaustive for every CP-subnet that
    contains a place. Bare single transitions are only tried when
    ``allow_place_free`` is set.
    """
    net.ensure_valid()
    results: list[CpSubnet] = []
    for place_set in _candidate_place_sets(net, cap):
        nodes = set(place_set)
        for p in place_set:
            nodes.update(net.predecessors(p))
            nodes.update(net.successors(p))
        try:
            cp = cp_subnet(net, nodes)
        except NotCpSubnetError:
            continue
        if adapt_to is not None and not is_adapted(cp, adapt_to):
            continue
        results.append(cp)
    if allow_place_free:
        for t in net.transitions:
            try:
                cp = cp_subnet(net, {t})
            except NotCpSubnetError:
                continue
            if adapt_to is not None and not is_adapted(cp, adapt_to):
                continue
            results.append(cp)
    results.sort(key=lambda cp: (len(cp.nodes), tuple(sorted(cp.nodes))))
    return tuple(results)


@dataclass(frozen=True)
class CpExhaustion:
    """An ordered family of pairwise disjoint CP-subnets whose removal leaves
    a strongly connected T-net, plus the boundary between the two."""

    host: Net
    layers: tuple[CpSubnet, ...]
    final_tnet: Subnet
    way_in_places: tuple[NodeId, ...]
    critical_transitions: tuple[NodeId, ...]

    @cached_property
    def layer_nodes(self) -> frozenset[NodeId]:
        out: frozenset[NodeId] = frozenset()
        for layer in self.layers:
            out |= layer.nodes
        return out

    def to_dict(self) -> dict:
        return {
            "net": self.host.name,
            "layers": [
                {
                    "nodes": [x.name for x in layer.subnet.nodes_sorted],
                    "way_in": layer.way_in.name,
                    "way_outs": [t.name for t in layer.way_outs],
                }
                for layer in self.layers
            ],
            "final_tnet": [x.name for x in self.final_tnet.nodes_sorted],
            "way_in_places": [p.name for p in self.way_in_places],
            "critical_transitions": [t.name for t in self.critical_transitions],
        }


def _boundary(net: Net, layers_nodes: frozenset[NodeId], final_tnet: Subnet) -> tuple[tuple[NodeId, ...], tuple[NodeId, ...]]:
    """Way-in places (fed by layer transitions, host edges) and their
    post-transitions inside the final T-net."""
    layer_transitions = [x for x in sorted(layers_nodes) if x.is_transition]
    fed = set()
    for t in layer_transitions:
        fed.update(net.successors(t))
    way_in_places = tuple(p for p in final_tnet.places if p in fed)
    critical: set[NodeId] = set()
    for p in way_in_places:
        critical.update(final_tnet.successors(p))
    return way_in_places, tuple(sorted(critical))


def boundary(net: Net, exh: "CpExhaustion") -> tuple[tuple[NodeId, ...], tuple[NodeId, ...]]:
    """Recompute an exhaustion's way-in places and critical transitions.

    The feeding side uses the host's edges, the critical side only the final
    T-net's own edges."""
    return _boundary(net, exh.layer_nodes, exh.final_tnet)


def revalidate_layer_against_host(net: Net, layer_nodes: frozenset[NodeId]) -> CpSubnet:
    """Re-derive a layer's structure and boundary from the original net.

    A layer peeled from a deep complement need not be transition-bordered in
    the original net: its places may be wired to transitions of layers that
    were removed earlier (never to surviving nodes, which is re-checked by
    the union assertion in :func:`cp_exhaustion`). Everything else carries
    over and is recomputed here with host edges: the induced T-subnet shape,
    weak connectivity, the unique way-in transition, at least one way-out,
    and reachability of every layer place from the way-in.
    """
    sub = net.span(layer_nodes)
    if not sub.nodes:
        raise NotCpSubnetError("empty node set")
    if not sub.is_weakly_connected():
        raise NotCpSubnetError("layer is not weakly connected in the host")
    if not sub.is_t_subnet():
        raise NotCpSubnetError("layer is not a T-subnet on host-induced edges")
    outside = net.node_set - sub.nodes
    way_ins = tuple(
        t
        for t in sub.transitions
        if any(p in outside and p.is_place for p in net.predecessors(t))
    )
    if len(way_ins) != 1:
        raise NotCpSubnetError(
            f"expected a unique host-level way-in transition, found {len(way_ins)}"
        )
    way_outs = tuple(
        t
        for t in sub.transitions
        if any(p in outside and p.is_place for p in net.successors(t))
    )
    if not way_outs:
        raise NotCpSubnetError("no host-level way-out transition")
    way_in = way_ins[0]
    reachable = {way_in}
    stack = [way_in]
    while stack:
        for y in sub.successors(stack.pop()):
            if y not in reachable:
                reachable.add(y)
                stack.append(y)
    missing = [p for p in sub.places if p not in reachable]
    if missing:
        raise NotCpSubnetError(
            f"places not reachable from the way-in transition: "
            f"{', '.join(str(p) for p in missing)}"
        )
    return CpSubnet(subnet=sub, way_in=way_in, way_outs=way_outs)


def cp_exhaustion(
    net: Net,
    cl: Cluster,
    cap: int = DEFAULT_ENUM_CAP,
    allow_place_free: bool = False,
) -> CpExhaustion:
    """Peel adapted CP-subnets off the current complement until a strongly
    connected T-net remains.

    Every layer is a CP-subnet of the complement it was found in; its shape
    and boundary are re-derived against the original net and must agree, the
    union of all layers must be transition-bordered in the original net, and
    the shrinking cluster must stay a nonempty cluster of each complement.
    Violations mean the input is not a well-formed free-choice net.
    """
    net.ensure_valid()
    current: Net = net
    current_cl_nodes = cl.nodes
    layers: list[CpSubnet] = []
    removed: frozenset[NodeId] = frozenset()

    while not current.is_t_net():
        anchor = min(current_cl_nodes)
        current_cl = current.cluster_of(anchor)
        if current_cl.nodes != current_cl_nodes:
            raise ExhaustionError(
                "shrunken cluster is no longer a cluster of the current complement"
            )
        candidates = find_cp_subnets(
            current, adapt_to=current_cl, cap=cap, allow_place_free=allow_place_free
        )
        if not candidates:
            raise ExhaustionError(
                "no adapted CP-subnet found on a non-T-net complement; "
                "the input is not a well-formed free-choice net"
            )
        chosen = candidates[0]
        host_cp = revalidate_layer_against_host(net, chosen.nodes)
        if host_cp.way_in != chosen.way_in or host_cp.way_outs != chosen.way_outs:
            raise ExhaustionError(
                f"layer boundary differs between host and complement: "
                f"{host_cp.way_in}/{chosen.way_in}"
            )
        layers.append(host_cp)
        removed |= chosen.nodes
        current = net.span(net.node_set - removed).as_net
        if not current.is_free_choice():
            raise ExhaustionError("intermediate complement lost the free-choice property")
        if not is_strongly_connected(current):
            raise ExhaustionError("intermediate complement lost strong connectivity")
        current_cl_nodes = current_cl_nodes & current.node_set
        if not current_cl_nodes:
            raise ExhaustionError("cluster became empty during the exhaustion")

    union_sub = net.span(removed)
    if removed and not union_sub.is_transition_bordered():
        raise ExhaustionError("union of layers is not transition-bordered in the host")

    final = net.span(net.node_set - removed)
    way_in_places, critical = _boundary(net, removed, final)
    return CpExhaustion(
        host=net,
        layers=tuple(layers),
        final_tnet=final,
        way_in_places=way_in_places,
        critical_transitions=critical,
    )

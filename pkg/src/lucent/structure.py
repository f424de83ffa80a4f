"""Structural graph analysis: strong connectivity, elementary circuits,
P-components, and token-forwarding paths in marked graphs.

All enumerations are exhaustive with an explicit cap; they fail loudly via
:class:`CapExceededError` instead of truncating. Output orders are fixed by
the node order so repeated runs agree byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import CapExceededError, NotTNetError, NoWitnessError, UnknownNodeError
from .net import Marking, Net, NodeId, Path, Subnet

DEFAULT_ENUM_CAP = 100_000


def _as_view(netlike: "Net | Subnet") -> Subnet:
    return netlike.full_subnet() if isinstance(netlike, Net) else netlike


def is_strongly_connected(netlike: "Net | Subnet") -> bool:
    """Every ordered node pair is joined by a directed path inside the view."""
    view = _as_view(netlike)
    nodes = view.nodes_sorted
    if len(nodes) <= 1:
        return True
    root = nodes[0]

    def closure(step) -> int:
        seen = {root}
        stack = [root]
        while stack:
            for y in step(stack.pop()):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen)

    return closure(view.successors) == len(nodes) and closure(view.predecessors) == len(nodes)


def iter_elementary_circuits(netlike: "Net | Subnet") -> Iterator[Path]:
    """Yield every elementary circuit once, normalised to start at its least node.

    Ordered depth-first search: circuits are rooted at their minimum node by
    only walking through strictly larger nodes, so each circuit appears
    exactly once and the output order is canonical.
    """
    view = _as_view(netlike)
    nodes = view.nodes_sorted
    rank = {x: i for i, x in enumerate(nodes)}
    for root in nodes:
        path: list[NodeId] = [root]
        on_path = {root}
        stack: list[Iterator[NodeId]] = [iter(view.successors(root))]
        while stack:
            advanced = False
            for succ in stack[-1]:
                if succ == root:
                    yield Path(tuple(path))
                elif succ not in on_path and rank[succ] > rank[root]:
                    path.append(succ)
                    on_path.add(succ)
                    stack.append(iter(view.successors(succ)))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                on_path.discard(path.pop())


def elementary_circuits(netlike: "Net | Subnet", cap: int = DEFAULT_ENUM_CAP) -> tuple[Path, ...]:
    out = []
    for circuit in iter_elementary_circuits(netlike):
        if len(out) >= cap:
            raise CapExceededError(f"circuit cap exceeded ({cap})")
        out.append(circuit)
    return tuple(out)


@dataclass(frozen=True)
class PComponent:
    """A nonempty strongly connected P-subnet closed over its places' neighbourhoods."""

    subnet: Subnet

    @property
    def places(self) -> tuple[NodeId, ...]:
        return self.subnet.places

    @property
    def transitions(self) -> tuple[NodeId, ...]:
        return self.subnet.transitions

    @property
    def nodes(self) -> frozenset[NodeId]:
        return self.subnet.nodes

    def __repr__(self) -> str:
        return f"PComponent({{{', '.join(str(x) for x in self.subnet.nodes_sorted)}}})"


def p_component_on(net: Net, place_set: frozenset[NodeId]) -> Subnet | None:
    """The component generated by a place set, or None if the rules break.

    The component adopts every transition adjacent to the places; each such
    transition must consume from exactly one and feed exactly one of them,
    and the induced subnet must be strongly connected.
    """
    transitions: set[NodeId] = set()
    for p in place_set:
        transitions.update(net.predecessors(p))
        transitions.update(net.successors(p))
    for t in transitions:
        pre_in = sum(1 for q in net.predecessors(t) if q in place_set)
        post_in = sum(1 for q in net.successors(t) if q in place_set)
        if pre_in != 1 or post_in != 1:
            return None
    sub = net.span(place_set | transitions)
    if not is_strongly_connected(sub):
        return None
    return sub


def _component_place_sets(net: Net, cap: int) -> list[frozenset[NodeId]]:
    """All place sets whose adjacent transitions keep exactly one pre- and one
    post-place inside.

    Quota-driven search: each included place drags its neighbouring
    transitions in; every dragged-in transition must get exactly one pre and
    one post from the set, so unfilled sides are branched over and rival
    candidates are excluded. Rooting each set at its least place makes every
    set appear exactly once. The cap counts search nodes.
    """
    found: list[frozenset[NodeId]] = []
    budget = cap
    places = net.places
    for i, seed in enumerate(places):
        stack: list[tuple[frozenset[NodeId], frozenset[NodeId]]] = [
            (frozenset((seed,)), frozenset(places[:i]))
        ]
        while stack:
            budget -= 1
            if budget < 0:
                raise CapExceededError(f"component search cap exceeded ({cap})")
            included, banned = stack.pop()
            adjacent: set[NodeId] = set()
            for p in included:
                adjacent.update(net.predecessors(p))
                adjacent.update(net.successors(p))
            unfilled = None
            dead = False
            for t in sorted(adjacent):
                pre_in = [q for q in net.predecessors(t) if q in included]
                post_in = [q for q in net.successors(t) if q in included]
                if len(pre_in) > 1 or len(post_in) > 1:
                    dead = True
                    break
                if not pre_in:
                    unfilled = (t, net.predecessors(t))
                    break
                if not post_in:
                    unfilled = (t, net.successors(t))
                    break
            if dead:
                continue
            if unfilled is None:
                found.append(included)
                continue
            _t, options = unfilled
            viable = [q for q in options if q.is_place and q not in banned]
            for k, choice in enumerate(viable):
                rivals = frozenset(viable[:k] + viable[k + 1 :])
                stack.append((included | {choice}, banned | rivals))
    return found


def p_components(net: Net, cap: int = DEFAULT_ENUM_CAP) -> tuple[PComponent, ...]:
    """All P-components: place-generated, quota-checked, strongly connected."""
    net.ensure_valid()
    out = []
    for place_set in _component_place_sets(net, cap):
        sub = p_component_on(net, place_set)
        if sub is not None:
            out.append(PComponent(sub))
    out.sort(key=lambda c: c.places)
    return tuple(out)


def is_covered_by_p_components(net: Net, cap: int = DEFAULT_ENUM_CAP) -> bool:
    covered: set[NodeId] = set()
    for comp in p_components(net, cap):
        covered.update(comp.nodes)
    return covered == set(net.nodes)


@dataclass(frozen=True)
class FeedWitness:
    """An enabled transition plus its token-free elementary path (tau,...,q,t)."""

    tau: NodeId
    delta: Path

    @property
    def q(self) -> NodeId:
        return self.delta.nodes[-2]

    @property
    def target(self) -> NodeId:
        return self.delta.nodes[-1]

    @property
    def segment(self) -> Path:
        """The prefix (tau,...,q) of the path, without the fed transition."""
        return Path(self.delta.nodes[:-1])

    def check(self, tnet: Net, m: Marking, t: NodeId, q: NodeId) -> None:
        """Re-validate endpoint structure, elementarity and token-freeness."""
        assert self.delta.first == self.tau, "witness path must start at tau"
        assert self.delta.last == t, "witness path must end at the fed transition"
        assert self.q == q, "witness path must pass the queried place last"
        assert self.delta.is_elementary, "witness path must be elementary"
        assert self.delta.is_path_of(tnet), "witness path must follow arcs"
        assert self.tau in tnet.enabled(m), "witness transition must be enabled"
        assert m.token_count(self.delta) == 0, "witness path must be token-free"


def _require_t_net(tnet: Net) -> None:
    if not tnet.is_t_net():
        raise NotTNetError(f"net {tnet.name!r} is not a T-net")


def _paths_into(tnet: Net, q: NodeId, t: NodeId, cap: int) -> list[Path]:
    """All elementary paths (x,...,q,t); deterministic, shortest first."""
    found: list[tuple[int, tuple[NodeId, ...]]] = []

    def grow(head: NodeId, tail: tuple[NodeId, ...], used: frozenset[NodeId]):
        if len(found) > cap:
            raise CapExceededError(f"path cap exceeded ({cap})")
        nodes = (head,) + tail
        found.append((len(nodes), nodes))
        for prev in tnet.predecessors(head):
            if prev not in used and prev != t:
                grow(prev, nodes, used | {prev})

    grow(q, (t,), frozenset((q, t)))
    return [Path(nodes) for _, nodes in sorted(found)]


def enabled_feeds(tnet: Net, m: Marking, q: NodeId, cap: int = DEFAULT_ENUM_CAP) -> list[FeedWitness]:
    """All pairs (tau, delta): tau enabled at m, delta = (tau,...,q,t) elementary,
    where t is the unique output transition of q. Token-freeness is not required."""
    _require_t_net(tnet)
    (t,) = tnet.postset(q)
    enabled = set(tnet.enabled(m))
    return [
        FeedWitness(p.first, p)
        for p in _paths_into(tnet, q, t, cap)
        if p.first.is_transition and p.first in enabled
    ]


def token_free_feed(
    tnet: Net,
    m: Marking,
    t: "NodeId | str",
    q: "NodeId | str",
    cap: int = DEFAULT_ENUM_CAP,
) -> FeedWitness:
    """Find an enabled transition that can forward a token to the empty
    pre-place ``q`` of ``t`` along a token-free elementary path.

    Iteration: keep a token-free tail ending at the goal. Pick a feeding
    pair for the tail's head place; if its path is token-free, prepend it
    and finish. Otherwise split the path right after its last marked place:
    the split transition either is enabled (finish) or has an empty
    pre-place to recurse from. The tail strictly grows, so the loop ends
    within one pass over the nodes, provided the system is live.
    """
    _require_t_net(tnet)
    t = tnet.coerce(t)
    q = tnet.coerce(q)
    if q not in set(tnet.preset(t)):
        raise UnknownNodeError(f"{q} is not a pre-place of {t}")
    if m[q] != 0:
        raise NoWitnessError(f"pre-place {q} is already marked")

    enabled = set(tnet.enabled(m))
    q_prime = q
    tail = Path((t,))
    for _ in range(len(tnet.nodes) + 1):
        old = tail
        candidates = enabled_feeds(tnet, m, q_prime, cap)
        if not candidates:
            raise NoWitnessError(
                f"no enabled transition feeds {q_prime}; the input system is not live"
            )
        tau_prime, delta_prime = candidates[0].tau, candidates[0].delta
        if m.token_count(delta_prime) == 0:
            witness = FeedWitness(tau_prime, _join_checked(delta_prime, old))
            witness.check(tnet, m, t, q)
            return witness
        # split right after the last marked place: the unique maximal token-free tail
        last_marked = max(
            i for i, x in enumerate(delta_prime.nodes) if x.is_place and m.get(x) > 0
        )
        t_split = delta_prime.nodes[last_marked + 1]
        tail = _join_checked(Path(delta_prime.nodes[last_marked + 1 :]), old)
        if t_split in enabled:
            witness = FeedWitness(t_split, tail)
            witness.check(tnet, m, t, q)
            return witness
        empty_pres = [p for p in tnet.preset(t_split) if m.get(p) == 0]
        if not empty_pres:
            raise NoWitnessError(f"{t_split} has no unmarked pre-place yet is not enabled")
        q_prime = empty_pres[0]
        assert len(tail) > len(old), "token-free tail must grow every step"
    raise NoWitnessError("feeding-path iteration exceeded the node count; system is not live")


def _join_checked(front: Path, back: Path) -> Path:
    joined = front.concat(back)
    if not joined.is_elementary:
        raise NoWitnessError(
            "feeding-path construction closed a token-free circuit; system is not live"
        )
    return joined


def max_path_token_count(
    tnet: Net,
    m: Marking,
    avoid: "NodeId | str | None" = None,
    cap: int = DEFAULT_ENUM_CAP,
) -> int:
    """Maximum token count over all elementary paths, optionally avoiding one
    transition. Exhaustive: every prefix of every walk is itself a path."""
    _require_t_net(tnet)
    avoid_node = tnet.coerce(avoid) if avoid is not None else None
    best = 0
    budget = cap

    nodes = [x for x in tnet.nodes if x != avoid_node]
    for start in nodes:
        stack: list[tuple[NodeId, frozenset[NodeId], int]] = [
            (start, frozenset((start,)), m.get(start) if start.is_place else 0)
        ]
        while stack:
            budget -= 1
            if budget < 0:
                raise CapExceededError(f"path cap exceeded ({cap})")
            x, used, count = stack.pop()
            best = max(best, count)
            for y in tnet.successors(x):
                if y in used or y == avoid_node:
                    continue
                gain = m.get(y) if y.is_place else 0
                stack.append((y, used | {y}, count + gain))
    return best

"""Core data model for place/transition nets and the token game.

Everything here is an immutable value: nets, markings, subnets, clusters and
paths can be shared freely and all operations are pure functions. Nodes carry
a fixed total order (places before transitions, then by name) which every
other module uses to resolve nondeterministic choices, so that identical
inputs always produce identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    InvalidNetError,
    NotEnabledError,
    UnknownNodeError,
)

PLACE = "place"
TRANSITION = "transition"


@dataclass(frozen=True, order=True)
class NodeId:
    """Identity of a net node: kind plus name.

    The dataclass ordering (kind first, then name) is the canonical tie-break
    order of the whole toolkit.
    """

    kind: str
    name: str

    def __post_init__(self):
        if self.kind not in (PLACE, TRANSITION):
            raise ValueError(f"bad node kind {self.kind!r}")
        if not self.name:
            raise ValueError("node name must be nonempty")

    @property
    def is_place(self) -> bool:
        return self.kind == PLACE

    @property
    def is_transition(self) -> bool:
        return self.kind == TRANSITION

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"{self.kind[0]}:{self.name}"


def place(name: str) -> NodeId:
    return NodeId(PLACE, name)


def transition(name: str) -> NodeId:
    return NodeId(TRANSITION, name)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of structural validation; issues are never repaired silently."""

    issues: tuple[str, ...]
    weakly_connected: bool

    @property
    def ok(self) -> bool:
        return not self.issues


@dataclass(frozen=True)
class Net:
    """A finite bipartite directed graph of places and transitions.

    ``places`` and ``transitions`` are kept sorted; ``flow`` is the arc set.
    Construction does not validate: :meth:`validate` reports problems and
    :meth:`ensure_valid` gates the analysis operations.
    """

    name: str
    places: tuple[NodeId, ...]
    transitions: tuple[NodeId, ...]
    flow: frozenset[tuple[NodeId, NodeId]]

    @classmethod
    def build(
        cls,
        name: str,
        places: Iterable[str],
        transitions: Iterable[str],
        arcs: Iterable[tuple[str, str]],
    ) -> "Net":
        """Construct a net from bare names.

        Arc endpoints must name declared nodes and arcs must not repeat;
        everything else (bipartiteness, connectivity, ...) is left to
        :meth:`validate` so that broken inputs can still be reported.
        """
        place_names = list(places)
        trans_names = list(transitions)
        by_name: dict[str, NodeId] = {}
        for n in place_names:
            by_name.setdefault(n, place(n))
        for n in trans_names:
            by_name.setdefault(n, transition(n))
        seen: set[tuple[str, str]] = set()
        flow = []
        for src, dst in arcs:
            if src not in by_name:
                raise UnknownNodeError(f"arc endpoint {src!r} is not a declared node")
            if dst not in by_name:
                raise UnknownNodeError(f"arc endpoint {dst!r} is not a declared node")
            if (src, dst) in seen:
                raise InvalidNetError([f"duplicate arc {src} -> {dst}"])
            seen.add((src, dst))
            flow.append((by_name[src], by_name[dst]))
        return cls(
            name=name,
            places=tuple(sorted(place(n) for n in place_names)),
            transitions=tuple(sorted(transition(n) for n in trans_names)),
            flow=frozenset(flow),
        )

    # -- node bookkeeping -------------------------------------------------

    @cached_property
    def nodes(self) -> tuple[NodeId, ...]:
        return tuple(sorted(self.places + self.transitions))

    @cached_property
    def node_set(self) -> frozenset[NodeId]:
        return frozenset(self.places) | frozenset(self.transitions)

    @cached_property
    def _by_name(self) -> dict[str, NodeId]:
        table: dict[str, NodeId] = {}
        for x in self.nodes:
            table.setdefault(x.name, x)
        return table

    @cached_property
    def place_index(self) -> dict[NodeId, int]:
        return {p: i for i, p in enumerate(self.places)}

    def node(self, name: str) -> NodeId:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownNodeError(f"no node named {name!r} in net {self.name!r}") from None

    def coerce(self, x: "NodeId | str") -> NodeId:
        """Accept either a NodeId or a bare name."""
        if isinstance(x, NodeId):
            if x not in self.node_set:
                raise UnknownNodeError(f"node {x!r} does not belong to net {self.name!r}")
            return x
        return self.node(x)

    # -- adjacency ---------------------------------------------------------

    @cached_property
    def _pre(self) -> dict[NodeId, tuple[NodeId, ...]]:
        table: dict[NodeId, list[NodeId]] = {x: [] for x in self.nodes}
        for src, dst in self.flow:
            if dst in table and src in self.node_set:
                table[dst].append(src)
        return {x: tuple(sorted(ys)) for x, ys in table.items()}

    @cached_property
    def _post(self) -> dict[NodeId, tuple[NodeId, ...]]:
        table: dict[NodeId, list[NodeId]] = {x: [] for x in self.nodes}
        for src, dst in self.flow:
            if src in table and dst in self.node_set:
                table[src].append(dst)
        return {x: tuple(sorted(ys)) for x, ys in table.items()}

    def preset(self, x: "NodeId | str | Iterable[NodeId]") -> tuple[NodeId, ...]:
        """Pre-set of a node, or the union over a set of nodes."""
        if isinstance(x, (NodeId, str)):
            return self._pre[self.coerce(x)]
        acc: set[NodeId] = set()
        for y in x:
            acc.update(self._pre[self.coerce(y)])
        return tuple(sorted(acc))

    def postset(self, x: "NodeId | str | Iterable[NodeId]") -> tuple[NodeId, ...]:
        """Post-set of a node, or the union over a set of nodes."""
        if isinstance(x, (NodeId, str)):
            return self._post[self.coerce(x)]
        acc: set[NodeId] = set()
        for y in x:
            acc.update(self._post[self.coerce(y)])
        return tuple(sorted(acc))

    # structure code treats nets and subnets uniformly through these two
    def successors(self, x: NodeId) -> tuple[NodeId, ...]:
        return self._post[x]

    def predecessors(self, x: NodeId) -> tuple[NodeId, ...]:
        return self._pre[x]

    # -- validation ---------------------------------------------------------

    @cached_property
    def validation(self) -> ValidationReport:
        issues: list[str] = []
        if not self.places and not self.transitions:
            issues.append("empty node set")
        names = [x.name for x in self.places] + [x.name for x in self.transitions]
        dup = sorted({n for n in names if names.count(n) > 1})
        for n in dup:
            issues.append(f"duplicate name {n!r}")
        for src, dst in sorted(self.flow):
            if src not in self.node_set:
                issues.append(f"dangling arc endpoint {src!r}")
            if dst not in self.node_set:
                issues.append(f"dangling arc endpoint {dst!r}")
            if src.kind == dst.kind:
                issues.append(f"non-bipartite edge {src} -> {dst}")
        return ValidationReport(tuple(issues), self._weakly_connected())

    def _weakly_connected(self) -> bool:
        if not self.nodes:
            return False
        undirected: dict[NodeId, set[NodeId]] = {x: set() for x in self.nodes}
        for src, dst in self.flow:
            if src in undirected and dst in undirected:
                undirected[src].add(dst)
                undirected[dst].add(src)
        seen = {self.nodes[0]}
        stack = [self.nodes[0]]
        while stack:
            for y in undirected[stack.pop()]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(self.nodes)

    def validate(self) -> ValidationReport:
        return self.validation

    def ensure_valid(self, connected: bool = True) -> None:
        """Raise unless the net is structurally sound (and, by default, connected)."""
        report = self.validation
        if report.issues:
            raise InvalidNetError(report.issues)
        if connected and not report.weakly_connected:
            raise InvalidNetError(["net is not weakly connected"])

    # -- net classes ---------------------------------------------------------

    def is_free_choice(self) -> bool:
        """Whenever a place feeds a transition, the whole pre-set/post-set block is wired."""
        self.ensure_valid()
        for p in self.places:
            post = self._post[p]
            if len(post) <= 1:
                continue  # pre-set x {t} lands on existing arcs
            for t in post:
                for q in self._pre[t]:
                    for u in post:
                        if (q, u) not in self.flow:
                            return False
        return True

    def is_t_net(self) -> bool:
        self.ensure_valid()
        return all(len(self._pre[p]) == 1 and len(self._post[p]) == 1 for p in self.places)

    def is_p_net(self) -> bool:
        self.ensure_valid()
        return all(len(self._pre[t]) == 1 and len(self._post[t]) == 1 for t in self.transitions)

    # -- clusters -------------------------------------------------------------

    def cluster_of(self, x: "NodeId | str") -> "Cluster":
        """Fixpoint closure: places pull in their post-transitions, transitions their pre-places."""
        self.ensure_valid(connected=False)
        start = self.coerce(x)
        members = {start}
        frontier = [start]
        while frontier:
            y = frontier.pop()
            grown = self._post[y] if y.is_place else self._pre[y]
            for z in grown:
                if z not in members:
                    members.add(z)
                    frontier.append(z)
        return Cluster(
            host=self,
            places=tuple(sorted(m for m in members if m.is_place)),
            transitions=tuple(sorted(m for m in members if m.is_transition)),
        )

    def clusters(self) -> tuple["Cluster", ...]:
        """The cluster partition of all nodes."""
        seen: set[NodeId] = set()
        out = []
        for x in self.nodes:
            if x in seen:
                continue
            cl = self.cluster_of(x)
            seen.update(cl.nodes)
            out.append(cl)
        return tuple(out)

    # -- subnets ---------------------------------------------------------------

    def span(self, nodes: Iterable["NodeId | str"]) -> "Subnet":
        """Full subnet on the given nodes."""
        resolved = frozenset(self.coerce(x) for x in nodes)
        return Subnet(host=self, nodes=resolved, full=True)

    def full_subnet(self) -> "Subnet":
        return Subnet(host=self, nodes=self.node_set, full=True)

    # -- token game --------------------------------------------------------------

    def marking(self, tokens: Mapping[str, int] | Mapping[NodeId, int] | None = None) -> "Marking":
        return Marking.over(self, tokens or {})

    @cached_property
    def _firing_table(self) -> dict[NodeId, tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]]:
        """Per transition: place indices that are consumed-only, produced-only, and looped."""
        table = {}
        for t in self.transitions:
            pre = {p for p in self._pre[t] if p.is_place}
            post = {p for p in self._post[t] if p.is_place}
            idx = self.place_index
            consumed = tuple(sorted(idx[p] for p in pre - post))
            produced = tuple(sorted(idx[p] for p in post - pre))
            looped = tuple(sorted(idx[p] for p in pre & post))
            table[t] = (consumed, produced, looped)
        return table

    def is_enabled(self, m: "Marking", t: "NodeId | str") -> bool:
        t = self.coerce(t)
        self._check_domain(m)
        counts = m.counts
        idx = self.place_index
        return all(counts[idx[p]] >= 1 for p in self._pre[t])

    def enabled(self, m: "Marking") -> tuple[NodeId, ...]:
        """All transitions enabled at ``m``, in node order."""
        self._check_domain(m)
        counts = m.counts
        idx = self.place_index
        return tuple(
            t
            for t in self.transitions
            if all(counts[idx[p]] >= 1 for p in self._pre[t])
        )

    def fire(self, m: "Marking", t: "NodeId | str") -> "Marking":
        """One firing step; raises :class:`NotEnabledError` with the unmarked pre-places."""
        t = self.coerce(t)
        self._check_domain(m)
        counts = list(m.counts)
        idx = self.place_index
        unmarked = [p for p in self._pre[t] if counts[idx[p]] < 1]
        if unmarked:
            raise NotEnabledError(t, unmarked)
        consumed, produced, _looped = self._firing_table[t]
        for i in consumed:
            counts[i] -= 1
        for i in produced:
            counts[i] += 1
        return Marking(self.places, tuple(counts))

    def fire_sequence(self, m: "Marking", seq: Iterable["NodeId | str"]) -> "Marking":
        """Fold :meth:`fire` over a sequence, reporting the index of the first failure."""
        current = m
        for i, t in enumerate(seq):
            try:
                current = self.fire(current, t)
            except NotEnabledError as err:
                raise NotEnabledError(err.transition, err.unmarked, step=i) from None
        return current

    def _check_domain(self, m: "Marking") -> None:
        if m.places != self.places:
            raise UnknownNodeError(
                f"marking domain does not match the places of net {self.name!r}"
            )

    def __repr__(self) -> str:
        return f"Net({self.name!r}, |P|={len(self.places)}, |T|={len(self.transitions)}, |F|={len(self.flow)})"

    def __hash__(self):
        return hash((self.name, self.places, self.transitions, self.flow))


@dataclass(frozen=True)
class Marking:
    """Token counts over a fixed place tuple; a value, never mutated.

    Markings over materialised subnets compare equal to markings over the
    original view as long as the place domains agree.
    """

    places: tuple[NodeId, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.places) != len(self.counts):
            raise ValueError("marking domain and counts differ in length")
        if any(c < 0 for c in self.counts):
            raise ValueError("negative token count")

    @classmethod
    def over(cls, net: Net, tokens: Mapping) -> "Marking":
        counts = [0] * len(net.places)
        for key, value in tokens.items():
            p = net.coerce(key)
            if not p.is_place:
                raise UnknownNodeError(f"{p} is not a place")
            counts[net.place_index[p]] = int(value)
        return cls(net.places, tuple(counts))

    @cached_property
    def _index(self) -> dict[NodeId, int]:
        return {p: i for i, p in enumerate(self.places)}

    def get(self, p: NodeId) -> int:
        try:
            return self.counts[self._index[p]]
        except KeyError:
            raise UnknownNodeError(f"{p} is not in the marking domain") from None

    def __getitem__(self, p: "NodeId | str") -> int:
        if isinstance(p, str):
            matches = [q for q in self.places if q.name == p]
            if not matches:
                raise UnknownNodeError(f"no place named {p!r}")
            return self.get(matches[0])
        return self.get(p)

    def token_count(self, x: "Path | Iterable[NodeId]") -> int:
        """Total tokens on the places of a node set, or along a path.

        A path contributes one summand per occurrence of a place; elementary
        paths therefore count each place once.
        """
        if isinstance(x, Path):
            nodes: Iterable[NodeId] = x.nodes
        else:
            nodes = x
        total = 0
        for n in nodes:
            if n.is_place and n in self._index:
                total += self.counts[self._index[n]]
        return total

    def as_dict(self) -> dict[str, int]:
        return {p.name: c for p, c in zip(self.places, self.counts) if c}

    @property
    def total(self) -> int:
        return sum(self.counts)

    def covers(self, other: "Marking") -> bool:
        """Pointwise >= over the same domain."""
        if self.places != other.places:
            raise UnknownNodeError("markings over different domains")
        return all(a >= b for a, b in zip(self.counts, other.counts))

    def __repr__(self) -> str:
        inner = ", ".join(f"{p.name}:{c}" for p, c in zip(self.places, self.counts) if c)
        return "{" + inner + "}"


@dataclass(frozen=True)
class Subnet:
    """A node-set view on a host net; ``full`` views inherit every induced arc."""

    host: Net
    nodes: frozenset[NodeId]
    full: bool = True

    def __post_init__(self):
        stray = self.nodes - self.host.node_set
        if stray:
            raise UnknownNodeError(
                f"nodes not in host net: {', '.join(sorted(str(x) for x in stray))}"
            )

    @cached_property
    def places(self) -> tuple[NodeId, ...]:
        return tuple(sorted(x for x in self.nodes if x.is_place))

    @cached_property
    def transitions(self) -> tuple[NodeId, ...]:
        return tuple(sorted(x for x in self.nodes if x.is_transition))

    @cached_property
    def nodes_sorted(self) -> tuple[NodeId, ...]:
        return tuple(sorted(self.nodes))

    @cached_property
    def edges(self) -> frozenset[tuple[NodeId, NodeId]]:
        return frozenset(
            (src, dst) for src, dst in self.host.flow if src in self.nodes and dst in self.nodes
        )

    def successors(self, x: NodeId) -> tuple[NodeId, ...]:
        return tuple(y for y in self.host.successors(x) if y in self.nodes)

    def predecessors(self, x: NodeId) -> tuple[NodeId, ...]:
        return tuple(y for y in self.host.predecessors(x) if y in self.nodes)

    def complement(self) -> "Subnet":
        return Subnet(host=self.host, nodes=self.host.node_set - self.nodes, full=True)

    def is_transition_bordered(self) -> bool:
        """Every place keeps all of its host neighbours inside the view."""
        for p in self.places:
            for y in self.host.predecessors(p):
                if y not in self.nodes:
                    return False
            for y in self.host.successors(p):
                if y not in self.nodes:
                    return False
        return True

    def is_place_bordered(self) -> bool:
        for t in self.transitions:
            for y in self.host.predecessors(t):
                if y not in self.nodes:
                    return False
            for y in self.host.successors(t):
                if y not in self.nodes:
                    return False
        return True

    def is_t_subnet(self) -> bool:
        """Each place has exactly one pre- and one post-transition inside the view."""
        return all(
            len(self.predecessors(p)) == 1 and len(self.successors(p)) == 1
            for p in self.places
        )

    def is_weakly_connected(self) -> bool:
        if not self.nodes:
            return False
        first = self.nodes_sorted[0]
        seen = {first}
        stack = [first]
        while stack:
            x = stack.pop()
            for y in self.successors(x) + self.predecessors(x):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(self.nodes)

    @cached_property
    def as_net(self) -> Net:
        """Materialise the view as a standalone net (same node ids)."""
        return Net(
            name=f"{self.host.name}|{len(self.nodes)}",
            places=self.places,
            transitions=self.transitions,
            flow=self.edges,
        )

    def restrict(self, m: Marking) -> Marking:
        """Keep the counts of this view's places."""
        idx = m._index
        try:
            return Marking(self.places, tuple(m.counts[idx[p]] for p in self.places))
        except KeyError as missing:
            raise UnknownNodeError(
                f"marking domain lacks place {missing.args[0]}"
            ) from None

    def __contains__(self, x: NodeId) -> bool:
        return x in self.nodes

    def __repr__(self) -> str:
        return f"Subnet({self.host.name!r}, {{{', '.join(str(x) for x in self.nodes_sorted)}}})"


def complement(net: Net, sub: Subnet) -> Subnet:
    """Full subnet on the remaining nodes."""
    if sub.host is not net and sub.host != net:
        raise UnknownNodeError("subnet does not belong to the given net")
    if not sub.full:
        raise InvalidNetError(["complement requires a full subnet"])
    return sub.complement()


def extend(base: Marking, rest: Marking, host: Net) -> Marking:
    """Glue two markings with disjoint domains into one over the host."""
    combined = {p: c for p, c in zip(base.places, base.counts)}
    for p, c in zip(rest.places, rest.counts):
        if p in combined:
            raise UnknownNodeError(f"place {p} occurs in both marking domains")
        combined[p] = c
    if set(combined) != set(host.places):
        raise UnknownNodeError("glued domains do not cover the host places")
    return Marking(host.places, tuple(combined[p] for p in host.places))


@dataclass(frozen=True)
class Cluster:
    """Smallest node set closed under place->post-transitions and transition->pre-places."""

    host: Net
    places: tuple[NodeId, ...]
    transitions: tuple[NodeId, ...]

    @cached_property
    def nodes(self) -> frozenset[NodeId]:
        return frozenset(self.places) | frozenset(self.transitions)

    def marking(self) -> Marking:
        """Characteristic marking: one token on each cluster place."""
        return Marking.over(self.host, {p: 1 for p in self.places})

    def subnet(self) -> Subnet:
        return self.host.span(self.nodes)

    def __contains__(self, x: NodeId) -> bool:
        return x in self.nodes

    def __repr__(self) -> str:
        return f"Cluster({{{', '.join(str(x) for x in sorted(self.nodes))}}})"


@dataclass(frozen=True)
class Path:
    """A nonempty node sequence following arcs; a circuit when it closes up."""

    nodes: tuple[NodeId, ...]

    def __post_init__(self):
        if not self.nodes:
            raise ValueError("a path has at least one node")

    @property
    def first(self) -> NodeId:
        return self.nodes[0]

    @property
    def last(self) -> NodeId:
        return self.nodes[-1]

    @cached_property
    def is_elementary(self) -> bool:
        return len(set(self.nodes)) == len(self.nodes)

    def places(self) -> Iterator[NodeId]:
        return (x for x in self.nodes if x.is_place)

    def is_path_of(self, netlike) -> bool:
        """Consecutive nodes are arc-adjacent inside the given net or subnet."""
        for a, b in zip(self.nodes, self.nodes[1:]):
            if b not in netlike.successors(a):
                return False
        return True

    def is_circuit_of(self, netlike) -> bool:
        return self.is_path_of(netlike) and self.first in netlike.successors(self.last)

    def concat(self, other: "Path") -> "Path":
        """Join two paths sharing an endpoint node."""
        if self.last != other.first:
            raise ValueError(f"paths do not share an endpoint: {self.last} vs {other.first}")
        return Path(self.nodes + other.nodes[1:])

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self) -> Iterator[NodeId]:
        return iter(self.nodes)

    def __repr__(self) -> str:
        return "(" + ",".join(str(x) for x in self.nodes) + ")"


def validate_net(net: Net) -> ValidationReport:
    """Structural report: bipartiteness, names, dangling arcs, connectivity."""
    return net.validate()


def span(net: Net, nodes: Iterable["NodeId | str"]) -> Subnet:
    return net.span(nodes)


def normalize_circuit(nodes: Sequence[NodeId]) -> tuple[NodeId, ...]:
    """Rotate a circuit's node sequence so it starts at the least node."""
    k = min(range(len(nodes)), key=lambda i: nodes[i])
    return tuple(nodes[k:]) + tuple(nodes[:k])

"""Structured lucency proof replay.

``prove_lucency`` decides lucency of a perpetual free-choice system the long
way round: it builds a cluster-adapted exhaustion, drains the layers with
shutdown sequences, propagates perpetuality into the shrinking complements,
settles the final marked graph by elementary token-path arguments, and only
then concludes. Every intermediate proposition is executed as a runtime
check over the fully enumerated state space and recorded in a certificate.
The verdict is cross-validated against the independent brute-force decision;
a disagreement aborts hard instead of producing a certificate.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .cp import (
    CpExhaustion,
    adaptedness_equivalences,
    cp_exhaustion,
    cp_subnet,
    is_adapted,
    revalidate_layer_against_host,
)
from .dsl import emit_net
from .errors import (
    ExhaustionError,
    LucentError,
    PreconditionError,
    VerificationBugError,
)
from .net import Cluster, Marking, Net, NodeId, Path
from .reachability import (
    DEFAULT_STATE_CAP,
    ReachabilityGraph,
    check_fundamental_property,
    enabling_equivalent_pairs,
    explore,
    is_live,
    bound,
    lucency_bruteforce,
    regeneration_clusters,
)
from .shutdown import global_shutdown, shutdown_sequence, shutdown_transitions
from .structure import (
    DEFAULT_ENUM_CAP,
    elementary_circuits,
    enabled_feeds,
    max_path_token_count,
    token_free_feed,
)


@dataclass(frozen=True)
class CheckRecord:
    """One executed proposition: id, the statement it instantiates, outcome."""

    id: str
    anchor: str
    status: str  # "pass" | "fail"
    witness: dict | None = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        data = {"id": self.id, "anchor": self.anchor, "status": self.status}
        if self.witness is not None:
            data["witness"] = self.witness
        return data


@dataclass(frozen=True)
class Certificate:
    """Replay record for one net/cluster pair; deterministic for fixed input."""

    net_name: str
    net_hash: str
    cluster: tuple[str, ...]
    exhaustion: dict | None
    checks: tuple[CheckRecord, ...]
    verdict: str

    @property
    def proved(self) -> bool:
        return self.verdict == "lucent_proved"

    def to_dict(self) -> dict:
        return {
            "net": {"name": self.net_name, "hash": self.net_hash},
            "cluster": list(self.cluster),
            "exhaustion": self.exhaustion,
            "checks": [c.to_dict() for c in self.checks],
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def net_content_hash(net: Net, m0: Marking) -> str:
    return hashlib.sha256(emit_net(net, m0).encode("utf-8")).hexdigest()


class _Failed(LucentError):
    """Internal: aborts the monotone chain at the failing record."""

    def __init__(self, record: CheckRecord):
        self.record = record
        super().__init__(record.anchor)


class _Recorder:
    def __init__(self):
        self.records: list[CheckRecord] = []

    def ok(self, check_id: str, anchor: str, witness: dict | None = None) -> None:
        self.records.append(CheckRecord(check_id, anchor, "pass", witness))

    def require(self, condition: bool, check_id: str, anchor: str, witness: dict | None = None) -> None:
        if condition:
            self.ok(check_id, anchor, witness)
        else:
            raise _Failed(CheckRecord(check_id, anchor, "fail", witness))


def _names(xs) -> list[str]:
    return [x.name for x in xs]


def _layer_restricted_classes(rg: ReachabilityGraph, layer) -> list[list[int]]:
    """Group state indices by the enabled-set of the layer-restricted system."""
    lnet = layer.subnet.as_net
    groups: dict[tuple, list[int]] = {}
    for i, m in enumerate(rg.states):
        en = lnet.enabled(layer.subnet.restrict(m))
        groups.setdefault(en, []).append(i)
    return [v for _k, v in sorted(groups.items())]


def _level_systems(
    net: Net, m0: Marking, exh: CpExhaustion, state_cap: int
) -> list[tuple[Net, Marking, ReachabilityGraph, object]]:
    """The system each layer is peeled from, walked by shutting down and
    restricting.

    A deep layer is a genuine CP-subnet only of the complement it was found
    in, so its token-path and shutdown facts are instantiated there: entry i
    holds that complement as a net, the drained marking the walk reaches, its
    explored state space, and the layer revalidated inside it.
    """
    from .shutdown import shutdown_sequence as _sd

    systems = []
    current_net, current_m = net, m0
    for layer in exh.layers:
        layer_cp = cp_subnet(current_net, layer.nodes)
        rg_i = explore(current_net, current_m, state_cap)
        rg_i.require_complete()
        systems.append((current_net, current_m, rg_i, layer_cp))
        _seq, m_sd = _sd(current_net, layer_cp, current_m, state_cap)
        comp = layer_cp.complement()
        current_net, current_m = comp.as_net, comp.restrict(m_sd)
    return systems


# ---------------------------------------------------------------------------
# marked-graph (T-system) checks
# ---------------------------------------------------------------------------

def verify_tsystem_lucency(
    tnet: Net,
    m0: Marking,
    cl: Cluster,
    state_cap: int = DEFAULT_STATE_CAP,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> list[CheckRecord]:
    """Decide lucency of a perpetual marked graph by elementary means.

    Exercises the full path machinery: token-free feeding paths for every
    empty pre-place, cluster-avoiding variants when a sibling pre-place is
    marked, the global <=1 token bound on cluster-avoiding paths, and the
    replay that turns any distinct enabling-equivalent pair into a path
    carrying two tokens. Raises :class:`PreconditionError` when the input is
    not a perpetual T-system with the given regeneration cluster.
    """
    if not tnet.is_t_net():
        raise PreconditionError(f"{tnet.name!r} is not a T-net")
    rg = explore(tnet, m0, state_cap)
    rg.require_complete()
    regen = regeneration_clusters(rg)
    if not any(c.nodes == cl.nodes for c in regen):
        raise PreconditionError("not perpetual with the given regeneration cluster")
    if len(cl.transitions) != 1:
        raise PreconditionError("regeneration cluster of a T-net must have one transition")
    t_cl = cl.transitions[0]

    rec = _Recorder()
    try:
        fp = check_fundamental_property(rg, cl, enum_cap)
        rec.require(
            fp.ok,
            "tsystem.fundamental_property",
            "every circuit passes the cluster transition and carries exactly one token",
            {"failures": list(fp.failures)} if not fp.ok else {"circuits": fp.circuits_checked},
        )

        fed = 0
        for i, m in enumerate(rg.states):
            for t in tnet.transitions:
                for q in tnet.preset(t):
                    if m.get(q) != 0:
                        continue
                    witness = token_free_feed(tnet, m, t, q, enum_cap)
                    witness.check(tnet, m, t, q)
                    fed += 1
        rec.ok(
            "tsystem.feed_witnesses",
            "every empty pre-place can be fed from an enabled transition along a "
            "token-free elementary path",
            {"instances": fed},
        )

        filtered = 0
        for i, m in enumerate(rg.states):
            for t in tnet.transitions:
                pre = tnet.preset(t)
                marked = [p for p in pre if m.get(p) == 1]
                empty = [q for q in pre if m.get(q) == 0]
                if not marked or not empty:
                    continue
                for q in empty:
                    pool = [
                        w
                        for w in enabled_feeds(tnet, m, q, enum_cap)
                        if m.token_count(w.delta) == 0
                        and t_cl not in w.segment.nodes
                    ]
                    if not pool:
                        raise _Failed(
                            CheckRecord(
                                "tsystem.cluster_avoiding_witnesses",
                                "a frozen sibling token forces a feeding path whose "
                                "prefix avoids the cluster transition",
                                "fail",
                                {"state": i, "transition": t.name, "place": q.name},
                            )
                        )
                    filtered += 1
        rec.ok(
            "tsystem.cluster_avoiding_witnesses",
            "a frozen sibling token forces a feeding path whose prefix avoids the "
            "cluster transition",
            {"instances": filtered},
        )

        worst = 0
        for m in rg.states:
            worst = max(worst, max_path_token_count(tnet, m, avoid=t_cl, cap=enum_cap))
        rec.require(
            worst <= 1,
            "tsystem.path_safety_bound",
            "elementary paths avoiding the cluster transition never carry more than "
            "one token",
            {"max_count": worst},
        )

        report = lucency_bruteforce(rg)
        for i, j in report.witnesses:
            replay = _distinct_pair_replay(tnet, rg, i, j, enum_cap)
            raise _Failed(
                CheckRecord(
                    "tsystem.distinct_pair_replay",
                    "distinct enabling-equivalent markings would create a "
                    "cluster-avoiding path carrying two tokens",
                    "fail",
                    replay,
                )
            )
        rec.ok(
            "tsystem.distinct_pair_replay",
            "distinct enabling-equivalent markings would create a cluster-avoiding "
            "path carrying two tokens",
            {"pairs": 0},
        )
        rec.require(
            report.verdict == "lucent",
            "tsystem.lucent",
            "the perpetual marked graph is lucent",
            {"states": len(rg.states)},
        )
    except _Failed as failure:
        rec.records.append(failure.record)
    return rec.records


def _distinct_pair_replay(
    tnet: Net, rg: ReachabilityGraph, i: int, j: int, enum_cap: int
) -> dict:
    """Materialise the two-token path hidden in a distinct enabling-equivalent pair."""
    m1, m2 = rg.states[i], rg.states[j]
    flipped = [p for p in tnet.places if m1.get(p) >= 1 and m2.get(p) == 0]
    if not flipped:
        m1, m2, i, j = m2, m1, j, i
        flipped = [p for p in tnet.places if m1.get(p) >= 1 and m2.get(p) == 0]
    p = flipped[0]
    data: dict = {
        "states": [i, j],
        "markings": [m1.as_dict(), m2.as_dict()],
        "distinguishing_place": p.name,
    }
    (t,) = tnet.postset(p)
    try:
        witness = token_free_feed(tnet, m2, t, p, enum_cap)
    except LucentError as err:
        data["replay_error"] = str(err)
        return data
    tau = witness.tau
    if tau in tnet.enabled(m1):
        m_prime = tnet.fire(m1, tau)
        segment = Path(witness.delta.nodes[:-1])  # (tau, ..., p)
        data["path"] = [x.name for x in segment.nodes]
        data["token_count_after_firing"] = m_prime.token_count(segment)
    return data


# ---------------------------------------------------------------------------
# layer checks over a whole exhaustion
# ---------------------------------------------------------------------------

def verify_marking_equality_on_layers(
    net: Net, exh: CpExhaustion, rg: ReachabilityGraph, state_cap: int = DEFAULT_STATE_CAP
) -> list[CheckRecord]:
    """Layer-restricted enabling equivalence forces equal layer markings and
    interchangeable shutdown sequences.

    Each layer is checked inside the complement it was peeled from, over that
    system's own reachable markings; additionally, enabling-equivalent pairs
    of the host must agree on every layer restriction.
    """
    rec = _Recorder()
    try:
        chain = _level_systems(net, rg.initial, exh, state_cap)
        pairs_checked = 0
        for idx, (net_i, _m_i, rg_i, layer_cp) in enumerate(chain):
            for group in _layer_restricted_classes(rg_i, layer_cp):
                base = group[0]
                base_restr = layer_cp.subnet.restrict(rg_i.states[base])
                for other in group[1:]:
                    restr = layer_cp.subnet.restrict(rg_i.states[other])
                    if restr != base_restr:
                        raise _Failed(
                            CheckRecord(
                                "layers.marking_equality",
                                "equal enabled-sets inside a layer force equal layer "
                                "markings",
                                "fail",
                                {
                                    "layer": idx,
                                    "states": [base, other],
                                    "restrictions": [base_restr.as_dict(), restr.as_dict()],
                                },
                            )
                        )
                    pairs_checked += 1
        host_pairs = 0
        for i, j in enabling_equivalent_pairs(rg):
            for idx, layer in enumerate(exh.layers):
                r1 = layer.subnet.restrict(rg.states[i])
                r2 = layer.subnet.restrict(rg.states[j])
                if r1 != r2:
                    raise _Failed(
                        CheckRecord(
                            "layers.marking_equality",
                            "enabling-equivalent host markings agree on every layer",
                            "fail",
                            {"layer": idx, "states": [i, j]},
                        )
                    )
                host_pairs += 1
        rec.ok(
            "layers.marking_equality",
            "equal enabled-sets inside a layer force equal layer markings",
            {"pairs": pairs_checked, "host_pairs": host_pairs},
        )

        swaps = 0
        for idx, (net_i, _m_i, rg_i, layer_cp) in enumerate(chain):
            allowed = set(shutdown_transitions(layer_cp))
            for group in _layer_restricted_classes(rg_i, layer_cp):
                for a in group:
                    seq, _m_sd = shutdown_sequence(net_i, layer_cp, rg_i.states[a], state_cap)
                    for b in group:
                        if b == a:
                            continue
                        m_after = net_i.fire_sequence(rg_i.states[b], seq)
                        leftovers = [t for t in net_i.enabled(m_after) if t in allowed]
                        if leftovers:
                            raise _Failed(
                                CheckRecord(
                                    "layers.common_shutdown",
                                    "a layer shutdown sequence works uniformly across "
                                    "enabling-equivalent markings",
                                    "fail",
                                    {
                                        "layer": idx,
                                        "states": [a, b],
                                        "sequence": list(seq.names()),
                                        "still_enabled": _names(leftovers),
                                    },
                                )
                            )
                        swaps += 1
        rec.ok(
            "layers.common_shutdown",
            "a layer shutdown sequence works uniformly across enabling-equivalent "
            "markings",
            {"pairs": swaps},
        )
    except _Failed as failure:
        rec.records.append(failure.record)
    return rec.records


def verify_propagation(
    net: Net,
    exh: CpExhaustion,
    rg: ReachabilityGraph,
    cl: Cluster,
    state_cap: int = DEFAULT_STATE_CAP,
) -> list[CheckRecord]:
    """Global shutdown carries enabling-equivalent pairs into the final marked
    graph: common sequence, marking-difference preservation, reachability in
    the regenerated system, and enabling equivalence downstairs."""
    rec = _Recorder()
    final_net = exh.final_tnet.as_net
    cl_bar_places = [p for p in cl.places if p in exh.final_tnet.nodes]
    cl_bar = final_net.cluster_of(cl_bar_places[0]) if cl_bar_places else None
    try:
        if cl_bar is None or cl_bar.nodes != cl.nodes & exh.final_tnet.nodes:
            raise _Failed(
                CheckRecord(
                    "propagation.final_cluster",
                    "the regeneration cluster survives into the final marked graph as "
                    "a cluster",
                    "fail",
                    {"surviving": _names(sorted(cl.nodes & exh.final_tnet.nodes))},
                )
            )
        rec.ok(
            "propagation.final_cluster",
            "the regeneration cluster survives into the final marked graph as a cluster",
            {"cluster": _names(sorted(cl_bar.nodes))},
        )
        rg_bar = explore(final_net, cl_bar.marking(), state_cap)
        rg_bar.require_complete()

        pairs = enabling_equivalent_pairs(rg, include_diagonal=True)
        shared = 0
        for i, j in pairs:
            m1, m2 = rg.states[i], rg.states[j]
            seq, m1_sd = global_shutdown(net, exh, m1, state_cap)
            m2_sd = net.fire_sequence(m2, seq)  # raises if the sequence is not shared
            leftovers = [
                t
                for layer in exh.layers
                for t in net.enabled(m2_sd)
                if t in set(shutdown_transitions(layer))
            ]
            stranded = {
                p.name: m.get(p)
                for m in (m1_sd, m2_sd)
                for layer in exh.layers
                for p in layer.places
                if m.get(p)
            }
            if leftovers or stranded:
                raise _Failed(
                    CheckRecord(
                        "propagation.global_shutdown",
                        "one global shutdown sequence serves both markings of an "
                        "enabling-equivalent pair and drains every layer",
                        "fail",
                        {
                            "pair": [i, j],
                            "still_enabled": _names(leftovers),
                            "stranded_tokens": stranded,
                        },
                    )
                )
            shared += 1

            bar1 = exh.final_tnet.restrict(m1_sd)
            bar2 = exh.final_tnet.restrict(m2_sd)
            diff_now = [a - b for a, b in zip(bar1.counts, bar2.counts)]
            diff_before = [
                m1.get(p) - m2.get(p) for p in exh.final_tnet.places
            ]
            if diff_now != diff_before:
                raise _Failed(
                    CheckRecord(
                        "propagation.difference_identity",
                        "shutting down preserves the marking difference on the final "
                        "marked graph",
                        "fail",
                        {"pair": [i, j], "after": diff_now, "before": diff_before},
                    )
                )

            k1, k2 = rg_bar.index_of(bar1), rg_bar.index_of(bar2)
            if k1 is None or k2 is None:
                raise _Failed(
                    CheckRecord(
                        "propagation.final_reachability",
                        "both shutdown restrictions are reachable in the regenerated "
                        "final system",
                        "fail",
                        {"pair": [i, j], "restrictions": [bar1.as_dict(), bar2.as_dict()]},
                    )
                )
            if rg_bar.enabled_sets[k1] != rg_bar.enabled_sets[k2]:
                raise _Failed(
                    CheckRecord(
                        "propagation.final_equivalence",
                        "shutdown restrictions of an enabling-equivalent pair stay "
                        "enabling-equivalent in the final marked graph",
                        "fail",
                        {
                            "pair": [i, j],
                            "enabled": [
                                _names(rg_bar.enabled_sets[k1]),
                                _names(rg_bar.enabled_sets[k2]),
                            ],
                        },
                    )
                )
        rec.ok(
            "propagation.global_shutdown",
            "one global shutdown sequence serves both markings of an "
            "enabling-equivalent pair and drains every layer",
            {"pairs": shared},
        )
        rec.ok(
            "propagation.difference_identity",
            "shutting down preserves the marking difference on the final marked graph",
            {"pairs": shared},
        )
        rec.ok(
            "propagation.final_equivalence",
            "shutdown restrictions of an enabling-equivalent pair stay "
            "enabling-equivalent in the final marked graph",
            {"pairs": shared},
        )
    except _Failed as failure:
        rec.records.append(failure.record)
    return rec.records


# ---------------------------------------------------------------------------
# the full replay
# ---------------------------------------------------------------------------

def prove_lucency(
    net: Net,
    m0: Marking,
    cl: Cluster,
    state_cap: int = DEFAULT_STATE_CAP,
    enum_cap: int = DEFAULT_ENUM_CAP,
    allow_place_free: bool = False,
) -> Certificate:
    """Replay the whole argument on a concrete system and certify the verdict.

    The chain is monotone: a failed record ends the replay and the verdict
    names it. The independent brute-force decision is attached at the end;
    if the chain proves lucency while brute force finds a witness pair (or
    the other way round) a :class:`VerificationBugError` is raised.
    """
    rec = _Recorder()
    exhaustion_summary: dict | None = None
    rg: ReachabilityGraph | None = None
    failed: CheckRecord | None = None
    try:
        report = net.validate()
        rec.require(
            report.ok and report.weakly_connected,
            "premises.valid",
            "the net is a connected bipartite graph",
            {"issues": list(report.issues)} if report.issues else None,
        )
        rec.require(
            net.is_free_choice(),
            "premises.free_choice",
            "the net is free-choice",
        )
        rg = explore(net, m0, state_cap)
        rg.require_complete()
        rec.require(is_live(rg), "premises.live", "the system is live", {"states": len(rg.states)})
        k = bound(rg)
        rec.require(True, "premises.bounded", "the system is bounded", {"bound": k})
        regen = regeneration_clusters(rg)
        rec.require(
            any(c.nodes == cl.nodes for c in regen),
            "premises.regeneration_cluster",
            "the cluster's characteristic marking is a home marking",
            {"regeneration_clusters": [_names(sorted(c.nodes)) for c in regen]},
        )

        fp = check_fundamental_property(rg, cl, enum_cap)
        rec.require(
            fp.ok,
            "fundamental_property",
            "every component holds one cluster place and exactly one token; the "
            "system is safe",
            {"components": fp.components_checked}
            if fp.ok
            else {"failures": list(fp.failures)},
        )

        try:
            exh = cp_exhaustion(net, cl, enum_cap, allow_place_free)
        except ExhaustionError as err:
            raise _Failed(
                CheckRecord(
                    "exhaustion.constructed",
                    "the net has a cluster-adapted exhaustion with a strongly "
                    "connected marked-graph remainder",
                    "fail",
                    {"error": str(err)},
                )
            )
        exhaustion_summary = exh.to_dict()
        rec.ok(
            "exhaustion.constructed",
            "the net has a cluster-adapted exhaustion with a strongly connected "
            "marked-graph remainder",
            {"layers": len(exh.layers), "final_tnet_nodes": len(exh.final_tnet.nodes)},
        )

        seen_nodes: set[NodeId] = set()
        for idx, layer in enumerate(exh.layers):
            revalidated = revalidate_layer_against_host(net, layer.nodes)
            if revalidated.way_in != layer.way_in or revalidated.way_outs != layer.way_outs:
                raise _Failed(
                    CheckRecord(
                        "exhaustion.layers_revalidated",
                        "every layer keeps its shape and boundary when recomputed on "
                        "the original net",
                        "fail",
                        {"layer": idx, "reason": "boundary drifted"},
                    )
                )
            adaptedness_equivalences(net, layer, cl)
            if not is_adapted(layer, cl):
                raise _Failed(
                    CheckRecord(
                        "exhaustion.layers_revalidated",
                        "every layer is a cluster-adapted CP-subnet of the original net",
                        "fail",
                        {"layer": idx, "reason": "not adapted"},
                    )
                )
            if seen_nodes & layer.nodes:
                raise _Failed(
                    CheckRecord(
                        "exhaustion.layers_revalidated",
                        "every layer is a cluster-adapted CP-subnet of the original net",
                        "fail",
                        {"layer": idx, "reason": "layers overlap"},
                    )
                )
            seen_nodes |= layer.nodes
        partition_ok = (
            seen_nodes | exh.final_tnet.nodes == net.node_set
            and not seen_nodes & exh.final_tnet.nodes
        )
        union_bordered = (not seen_nodes) or net.span(seen_nodes).is_transition_bordered()
        final_ok = exh.final_tnet.as_net.is_t_net() and _strongly_connected(exh.final_tnet)
        rec.require(
            partition_ok and union_bordered and final_ok,
            "exhaustion.layers_revalidated",
            "the layers partition the net outside a strongly connected marked-graph "
            "remainder, their union is transition-bordered, and each layer keeps its "
            "shape, boundary and adaptedness on the original net",
            {"layers": len(exh.layers)},
        )

        for idx, layer in enumerate(exh.layers):
            circuits = elementary_circuits(layer.subnet, enum_cap)
            if circuits:
                raise _Failed(
                    CheckRecord(
                        "layers.acyclic",
                        "adapted layers of a perpetual system contain no circuits",
                        "fail",
                        {"layer": idx, "circuit": [x.name for x in circuits[0].nodes]},
                    )
                )
        rec.ok(
            "layers.acyclic",
            "adapted layers of a perpetual system contain no circuits",
            {"layers": len(exh.layers)},
        )

        chain = _level_systems(net, m0, exh, state_cap)

        worst = 0
        for _net_i, _m_i, rg_i, layer_cp in chain:
            lnet = layer_cp.subnet.as_net
            for m in rg_i.states:
                worst = max(
                    worst,
                    max_path_token_count(lnet, layer_cp.subnet.restrict(m), cap=enum_cap),
                )
        rec.require(
            worst <= 1,
            "layers.path_token_bound",
            "paths inside an adapted layer never carry more than one token",
            {"max_count": worst},
        )

        drained = 0
        for idx, (net_i, _m_i, rg_i, layer_cp) in enumerate(chain):
            for i, m in enumerate(rg_i.states):
                _seq, m_sd = shutdown_sequence(net_i, layer_cp, m, state_cap)
                if m_sd.token_count(layer_cp.places) != 0:
                    raise _Failed(
                        CheckRecord(
                            "layers.shutdown_empties",
                            "a shutdown drains every token out of an adapted layer",
                            "fail",
                            {
                                "layer": idx,
                                "state": i,
                                "left": m_sd.token_count(layer_cp.places),
                            },
                        )
                    )
                drained += 1
        rec.ok(
            "layers.shutdown_empties",
            "a shutdown drains every token out of an adapted layer",
            {"instances": drained},
        )

        _check_internal_enabling(rec, chain)

        for record in verify_marking_equality_on_layers(net, exh, rg, state_cap):
            rec.records.append(record)
            if not record.passed:
                raise _Failed(record) from None

        _check_perpetuality_chain(rec, net, m0, cl, exh, state_cap)

        for record in verify_propagation(net, exh, rg, cl, state_cap):
            rec.records.append(record)
            if not record.passed:
                raise _Failed(record) from None

        final_net = exh.final_tnet.as_net
        surviving = min(p for p in cl.places if p in exh.final_tnet.nodes)
        cl_bar = final_net.cluster_of(surviving)
        try:
            tsystem_records = verify_tsystem_lucency(
                final_net, cl_bar.marking(), cl_bar, state_cap, enum_cap
            )
        except PreconditionError as err:
            raise _Failed(
                CheckRecord(
                    "final_tsystem.premises",
                    "the final marked graph with the regenerated marking is perpetual",
                    "fail",
                    {"error": str(err)},
                )
            )
        for record in tsystem_records:
            rec.records.append(record)
            if not record.passed:
                raise _Failed(record) from None

        mismatched = [
            (i, j)
            for i, j in enabling_equivalent_pairs(rg)
            if rg.states[i] != rg.states[j]
        ]
        rec.require(
            not mismatched,
            "synthesis.marking_equality",
            "enabling-equivalent reachable markings of the host are equal",
            {"pairs": mismatched[:3]} if mismatched else {"states": len(rg.states)},
        )
    except _Failed as f:
        if not rec.records or rec.records[-1] is not f.record:
            rec.records.append(f.record)
        failed = f.record

    verdict = "lucent_proved" if failed is None else f"failed({failed.id})"

    if rg is not None and rg.complete:
        brute = lucency_bruteforce(rg)
        rec.records.append(
            CheckRecord(
                "crosscheck.bruteforce",
                "independent brute-force lucency decision over the state space",
                "pass",
                {
                    "verdict": brute.verdict,
                    "witnesses": [list(w) for w in brute.witnesses[:3]],
                },
            )
        )
        if failed is None and brute.verdict != "lucent":
            raise VerificationBugError(
                "replay proved lucency but brute force found witness pairs "
                f"{brute.witnesses[:3]}"
            )
        if failed is not None and failed.id.startswith("synthesis") and brute.verdict == "lucent":
            raise VerificationBugError(
                "replay failed at synthesis although brute force reports lucent"
            )

    return Certificate(
        net_name=net.name,
        net_hash=net_content_hash(net, m0),
        cluster=tuple(x.name for x in sorted(cl.nodes)),
        exhaustion=exhaustion_summary,
        checks=tuple(rec.records),
        verdict=verdict,
    )


def _strongly_connected(sub) -> bool:
    from .structure import is_strongly_connected

    return is_strongly_connected(sub)


def _check_internal_enabling(rec: _Recorder, chain) -> None:
    """A marked place inside a layer can push its token to any transition
    downstream of it without ever firing the way-in."""
    checked = 0
    for idx, (_net_i, _m_i, rg_i, layer_cp) in enumerate(chain):
        lnet = layer_cp.subnet.as_net
        allowed = set(shutdown_transitions(layer_cp))
        reach_from: dict[NodeId, set[NodeId]] = {}
        for p in layer_cp.places:
            seen = {p}
            stack = [p]
            while stack:
                for y in lnet.successors(stack.pop()):
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            reach_from[p] = {x for x in seen if x.is_transition}
        for i, m in enumerate(rg_i.states):
            m_hat = layer_cp.subnet.restrict(m)
            marked = [p for p in layer_cp.places if m_hat.get(p) == 1]
            targets = sorted({t for p in marked for t in reach_from[p]})
            for t in targets:
                if not _enableable_without(lnet, m_hat, t, allowed):
                    raise _Failed(
                        CheckRecord(
                            "layers.internal_enabling",
                            "a marked layer place can enable each downstream layer "
                            "transition without the way-in firing",
                            "fail",
                            {"layer": idx, "state": i, "transition": t.name},
                        )
                    )
                checked += 1
    rec.ok(
        "layers.internal_enabling",
        "a marked layer place can enable each downstream layer transition without "
        "the way-in firing",
        {"instances": checked},
    )


def _enableable_without(lnet: Net, m_hat: Marking, target: NodeId, allowed: set[NodeId]) -> bool:
    from collections import deque

    seen = {m_hat.counts}
    queue = deque([m_hat])
    while queue:
        current = queue.popleft()
        if all(current.get(p) >= 1 for p in lnet.preset(target)):
            return True
        for t in lnet.enabled(current):
            if t not in allowed:
                continue
            succ = lnet.fire(current, t)
            if succ.counts not in seen:
                seen.add(succ.counts)
                queue.append(succ)
    return False


def _check_perpetuality_chain(
    rec: _Recorder,
    net: Net,
    m0: Marking,
    cl: Cluster,
    exh: CpExhaustion,
    state_cap: int,
) -> None:
    """Walk the exhaustion, shutting down and restricting, and verify each
    complement system is again perpetual with the surviving cluster."""
    from .errors import PropagationError
    from .shutdown import propagate_perpetual

    current_net = net
    current_m = m0
    current_cl = cl
    steps = []
    for idx, layer in enumerate(exh.layers):
        layer_in_current = cp_subnet(current_net, layer.nodes)
        try:
            current_net, current_m, current_cl = propagate_perpetual(
                current_net, layer_in_current, current_cl, current_m, state_cap
            )
        except PropagationError as err:
            raise _Failed(
                CheckRecord(
                    "propagation.perpetuality_chain",
                    "removing an adapted layer after a shutdown leaves a perpetual "
                    "system with the surviving cluster",
                    "fail",
                    {"layer": idx, "error": str(err)},
                )
            )
        steps.append(
            {
                "layer": idx,
                "complement_nodes": len(current_net.nodes),
                "cluster": _names(sorted(current_cl.nodes)),
            }
        )
    rec.ok(
        "propagation.perpetuality_chain",
        "removing an adapted layer after a shutdown leaves a perpetual system with "
        "the surviving cluster",
        {"steps": steps},
    )

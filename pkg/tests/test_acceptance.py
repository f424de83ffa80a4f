"""Acceptance criteria, one test per criterion.

Each test performs every check of its criterion at the stated tolerance and
prints a single PASS/FAIL line (visible with ``pytest -s`` or in the summary
of a failed run) before asserting.
"""

import json
import time

import pytest

from lucent import (
    bound,
    corpus,
    cp_exhaustion,
    cp_subnet,
    explore,
    is_adapted,
    is_live,
    is_perpetual,
    is_safe,
    lucency_bruteforce,
    prove_lucency,
    regeneration_clusters,
)
from lucent.cli import main as cli_main
from lucent.cp import revalidate_layer_against_host
from lucent.structure import is_strongly_connected

from .corpus_gen import generate_many
from .oracles import feed_witness_set


def _report(number: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {number} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def generated():
    systems = generate_many(25)
    assert len(systems) >= 25
    return systems


def test_criterion_1_fig1_reproduction():
    """FIG1 analysed live and safe; both published regeneration clusters found;
    under 5 s and well under 10^4 states."""
    started = time.time()
    net, m0 = corpus.load("FIG1")
    rg = explore(net, m0, 10_000)
    ok = rg.complete and len(rg.states) < 10_000
    ok = ok and is_live(rg) and is_safe(rg)
    names = [sorted(x.name for x in cl.nodes) for cl in regeneration_clusters(rg)]
    ok = ok and ["start", "t0"] in names
    ok = ok and ["p1", "p2", "t1", "t2", "t8"] in names
    elapsed = time.time() - started
    ok = ok and elapsed < 5.0
    _report(1, ok, f"FIG1 live+safe, clusters found, {len(rg.states)} states in {elapsed:.2f}s")


def test_criterion_2_fig1_exhaustion():
    """The computed exhaustion validates, and so does the published family
    (span<p4,t1,t4>, span<p5,t2,t5>) with its strongly connected final T-net."""
    net, _ = corpus.load("FIG1")
    cl = net.cluster_of("start")

    exh = cp_exhaustion(net, cl)
    computed_ok = exh.final_tnet.as_net.is_t_net() and is_strongly_connected(exh.final_tnet)
    for layer in exh.layers:
        computed_ok = computed_ok and is_adapted(layer, cl)
        again = revalidate_layer_against_host(net, layer.nodes)
        computed_ok = computed_ok and again.way_in == layer.way_in

    # the published family, validated step by step as a fixture
    first = cp_subnet(net, ["p4", "t1", "t4"])
    fixture_ok = is_adapted(first, cl) and first.way_in.name == "t1"
    complement1 = first.complement().as_net
    second = cp_subnet(complement1, ["p5", "t2", "t5"])
    cl_in_complement = complement1.cluster_of("start")
    fixture_ok = fixture_ok and is_adapted(second, cl_in_complement)
    fixture_ok = fixture_ok and second.way_in.name == "t2"
    final = net.span(net.node_set - first.nodes - second.nodes)
    fixture_ok = (
        fixture_ok and final.as_net.is_t_net() and is_strongly_connected(final)
    )
    fixture_ok = fixture_ok and [sorted(x.name for x in l.nodes) for l in exh.layers] == [
        ["p4", "t1", "t4"],
        ["p5", "t2", "t5"],
    ]
    _report(2, computed_ok and fixture_ok, "computed exhaustion and published family both validate")


def test_criterion_3_replay_end_to_end(generated):
    """Replay and brute force agree on lucency for FIG1 (both clusters),
    CHOICE1, RING2, and 25 generated perpetual systems; zero disagreements."""
    disagreements = 0
    proofs = 0

    def check(net, m0, cluster_nodes):
        nonlocal disagreements, proofs
        cert = prove_lucency(net, m0, net.cluster_of(cluster_nodes))
        brute = lucency_bruteforce(explore(net, m0, 1_000_000)).verdict
        proofs += 1
        if not (cert.proved and brute == "lucent"):
            disagreements += 1

    fig1, fig1_m0 = corpus.load("FIG1")
    check(fig1, fig1_m0, "start")
    check(fig1, fig1_m0, "p1")
    choice1, choice1_m0 = corpus.load("CHOICE1")
    check(choice1, choice1_m0, "p0")
    ring2, ring2_m0 = corpus.load("RING2")
    check(ring2, ring2_m0, "p1")
    for _seed, net, m0 in generated:
        rg = explore(net, m0, 100_000)
        for cl in regeneration_clusters(rg):
            cert = prove_lucency(net, m0, cl)
            brute = lucency_bruteforce(rg).verdict
            proofs += 1
            if not (cert.proved and brute == "lucent"):
                disagreements += 1
    _report(3, disagreements == 0, f"{proofs} proofs, {disagreements} disagreements")


def test_criterion_4_negative_control():
    """RING2 with three tokens: live, bounded by exactly 3, not perpetual,
    not lucent, witness pair exactly {(2,1),(1,2)}."""
    net, m0 = corpus.load("RING2X3")
    rg = explore(net, m0, 1000)
    report = lucency_bruteforce(rg)
    witness_markings = {
        frozenset((tuple(rg.states[i].counts), tuple(rg.states[j].counts)))
        for i, j in report.witnesses
    }
    ok = (
        is_live(rg)
        and bound(rg) == 3
        and not is_perpetual(rg)
        and report.verdict == "not_lucent"
        and witness_markings == {frozenset({(2, 1), (1, 2)})}
    )
    _report(4, ok, "live, bound=3, not perpetual, witness ((2,1),(1,2)) exact")


def test_criterion_5_lemma_suites(generated):
    """Every lemma suite passes with zero violations over the whole corpus
    (reference nets plus the generated systems), each suite under 60 s."""
    systems = [corpus.load(name) for name in ("CHOICE1", "RING2", "FIG1")]
    systems += [(net, m0) for _seed, net, m0 in generated]

    suite_times: dict[str, float] = {}
    violations: list[str] = []

    # layer revalidation against the original net, plus adaptedness
    started = time.time()
    for net, m0 in systems:
        rg = explore(net, m0, 100_000)
        for cl in regeneration_clusters(rg):
            exh = cp_exhaustion(net, cl)
            for layer in exh.layers:
                again = revalidate_layer_against_host(net, layer.nodes)
                if again.way_in != layer.way_in or not is_adapted(layer, cl):
                    violations.append(f"layer revalidation on {net.name}")
    suite_times["layer revalidation"] = time.time() - started

    # feeding-path witnesses against the brute-force oracle on small T-nets
    started = time.time()
    small_t_nets = [
        (net, m0) for net, m0 in systems if net.is_t_net() and len(net.nodes) <= 12
    ]
    for net, m0 in systems:
        if not net.is_t_net():
            rgx = explore(net, m0, 100_000)
            for cl in regeneration_clusters(rgx):
                exh = cp_exhaustion(net, cl)
                final = exh.final_tnet.as_net
                if len(final.nodes) <= 12:
                    surviving = min(p for p in cl.places if p in exh.final_tnet.nodes)
                    small_t_nets.append(
                        (final, final.cluster_of(surviving).marking())
                    )
    from lucent import token_free_feed

    for tnet, tm0 in small_t_nets:
        rg = explore(tnet, tm0, 10_000)
        for m in rg.states:
            for t in tnet.transitions:
                for q in tnet.preset(t):
                    if m.get(q) != 0:
                        continue
                    witness = token_free_feed(tnet, m, t, q)
                    oracle = {p.nodes for p in feed_witness_set(tnet, m, t, q)}
                    if witness.delta.nodes not in oracle:
                        violations.append(f"feed witness off-oracle on {tnet.name}")
    suite_times["feeding paths vs oracle"] = time.time() - started

    # the layer and propagation suites, via the certificates of a full replay
    started = time.time()
    suite_checks = (
        "layers.acyclic",
        "layers.path_token_bound",
        "layers.shutdown_empties",
        "layers.internal_enabling",
        "layers.marking_equality",
        "layers.common_shutdown",
        "propagation.perpetuality_chain",
        "propagation.global_shutdown",
        "propagation.difference_identity",
        "propagation.final_equivalence",
        "tsystem.fundamental_property",
        "tsystem.feed_witnesses",
        "tsystem.cluster_avoiding_witnesses",
        "tsystem.path_safety_bound",
        "tsystem.lucent",
    )
    for net, m0 in systems:
        rg = explore(net, m0, 100_000)
        for cl in regeneration_clusters(rg):
            cert = prove_lucency(net, m0, cl)
            status = {c.id: c.status for c in cert.checks}
            for check_id in suite_checks:
                if status.get(check_id) != "pass":
                    violations.append(f"{check_id} on {net.name}: {status.get(check_id)}")
    suite_times["layer/propagation/final suites"] = time.time() - started

    ok = not violations and all(t < 60.0 for t in suite_times.values())
    timing = ", ".join(f"{k} {v:.1f}s" for k, v in suite_times.items())
    _report(5, ok, f"zero violations ({timing})" if ok else f"violations: {violations[:5]}")


def test_criterion_6_determinism(tmp_path):
    """Byte-identical reports and certificates across repeated runs."""
    import io

    commands = [
        ("--format", "json", "analyze", str(corpus.corpus_path("FIG1"))),
        ("--format", "json", "lucency", str(corpus.corpus_path("RING2X3"))),
        ("exhaust", str(corpus.corpus_path("FIG1")), "--cluster", "start"),
        ("--format", "json", "prove", str(corpus.corpus_path("FIG1")), "--cluster", "p1"),
        ("--format", "json", "verify", str(corpus.corpus_path("CHOICE1"))),
    ]
    ok = True
    for argv in commands:
        outputs = []
        for _ in range(2):
            buffer = io.StringIO()
            cli_main(list(argv), out=buffer)
            outputs.append(buffer.getvalue())
        if outputs[0] != outputs[1]:
            ok = False
    cert_a = tmp_path / "a.json"
    cert_b = tmp_path / "b.json"
    for target in (cert_a, cert_b):
        cli_main(
            ["prove", str(corpus.corpus_path("FIG1")), "--cluster", "start", "--cert", str(target)],
            out=io.StringIO(),
        )
    ok = ok and cert_a.read_bytes() == cert_b.read_bytes()
    json.loads(cert_a.read_text())
    _report(6, ok, "repeated runs byte-identical (reports and certificates)")

"""Graphviz DOT emission for nets, subnets and exhaustions.

Places render as circles (token counts as labels), transitions as boxes.
Exhaustion layers become coloured subgraph clusters so a drawing can be
compared side by side with the layered presentation of the net.
"""

from __future__ import annotations

from .cp import CpExhaustion
from .net import Marking, Net, NodeId, Subnet

_LAYER_COLORS = ("lightblue", "lightsalmon", "palegreen", "plum", "khaki", "lightgrey")


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _node_line(x: NodeId, marking: Marking | None, indent: str = "  ") -> str:
    if x.is_place:
        tokens = marking.get(x) if marking is not None else 0
        label = f"{x.name}\\n{'●' * tokens}" if 0 < tokens <= 4 else (
            f"{x.name}\\n{tokens}" if tokens else x.name
        )
        return f"{indent}{_quote(x.name)} [shape=circle, label={_quote(label)}];"
    return f"{indent}{_quote(x.name)} [shape=box];"


def net_to_dot(net: Net, marking: Marking | None = None) -> str:
    lines = [f"digraph {_quote(net.name)} {{", "  rankdir=LR;"]
    for x in net.nodes:
        lines.append(_node_line(x, marking))
    for src, dst in sorted(net.flow):
        lines.append(f"  {_quote(src.name)} -> {_quote(dst.name)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def subnet_to_dot(sub: Subnet, marking: Marking | None = None) -> str:
    lines = [f"digraph {_quote(sub.host.name)} {{", "  rankdir=LR;"]
    for x in sub.nodes_sorted:
        lines.append(_node_line(x, marking))
    for src, dst in sorted(sub.edges):
        lines.append(f"  {_quote(src.name)} -> {_quote(dst.name)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def exhaustion_to_dot(exh: CpExhaustion, marking: Marking | None = None) -> str:
    net = exh.host
    lines = [f"digraph {_quote(net.name)} {{", "  rankdir=LR;", "  compound=true;"]
    for i, layer in enumerate(exh.layers):
        color = _LAYER_COLORS[i % len(_LAYER_COLORS)]
        lines.append(f"  subgraph cluster_layer{i} {{")
        lines.append(f'    label="layer {i} (way-in {layer.way_in.name})";')
        lines.append(f"    style=filled; color={color};")
        for x in layer.subnet.nodes_sorted:
            lines.append(_node_line(x, marking, indent="    "))
        lines.append("  }")
    lines.append("  subgraph cluster_final {")
    lines.append('    label="final T-net";')
    lines.append("    style=dashed;")
    for x in exh.final_tnet.nodes_sorted:
        lines.append(_node_line(x, marking, indent="    "))
    lines.append("  }")
    for src, dst in sorted(net.flow):
        lines.append(f"  {_quote(src.name)} -> {_quote(dst.name)};")
    lines.append("}")
    return "\n".join(lines) + "\n"

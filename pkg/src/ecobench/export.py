"""Writers for the delimited tables and graph files.

All writers are byte-deterministic: fixed row order, fixed float formatting,
``\\n`` line endings.
"""

from __future__ import annotations

import csv
import json
import math
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np

from .networks import BenchmarkNetwork, Edge, SimilarityNetwork

PAIR_COLUMNS = ("focal", "partner", "rho", "delta_repr", "repr_focal", "repr_partner")
RANKING_COLUMNS = ("country", "eci", "co2_pc", "ef_pc", "repr", "rank")


def fmt4(x) -> str:
    return "" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.4f}"


def full(x) -> str:
    return "" if x is None else repr(float(x))


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n",
                    encoding="utf-8")
    return path


def write_ranking(directory, results, eci, co2, ef) -> list[Path]:
    """``ranking.csv`` (4 decimals) and ``ranking_full.csv``; ``eci``/``co2``/``ef`` map country to value."""
    d = Path(directory)
    short, long = [], []
    for r in results:
        c = r.country
        short.append((c, fmt4(eci[c]), fmt4(co2[c]), fmt4(ef[c]), fmt4(r.theta), r.rank))
        long.append((c, full(eci[c]), full(co2[c]), full(ef[c]), full(r.theta), r.rank))
    return [write_csv(d / "ranking.csv", RANKING_COLUMNS, short),
            write_csv(d / "ranking_full.csv", RANKING_COLUMNS, long)]


def similarity_pairs(net: SimilarityNetwork, scores: dict[str, float]) -> list[tuple]:
    """Network edges oriented from the lower-scoring country, sorted by correlation."""
    out = []
    for e in net.edges:
        a, b = e.source, e.target
        if (scores[a], a) > (scores[b], b):
            a, b = b, a
        out.append((a, b, e.rho, scores[b] - scores[a], scores[a], scores[b]))
    out.sort(key=lambda t: (-t[2], t[0], t[1]))
    return out


def benchmark_pairs(net: BenchmarkNetwork, scores: dict[str, float]) -> list[tuple]:
    out = [(e.source, e.target, e.rho, e.delta_repr, scores[e.source], scores[e.target])
           for e in net.edges]
    out.sort(key=lambda t: (-t[3], -t[2], t[0], t[1]))
    return out


def write_pairs(directory, stem: str, pairs) -> list[Path]:
    d = Path(directory)
    short = [(a, b, *(fmt4(v) for v in rest)) for a, b, *rest in pairs]
    long = [(a, b, *(full(v) for v in rest)) for a, b, *rest in pairs]
    return [write_csv(d / f"{stem}.csv", PAIR_COLUMNS, short),
            write_csv(d / f"{stem}_full.csv", PAIR_COLUMNS, long)]


def write_matrix(path, labels, values) -> Path:
    rows = [(c, *(full(v) for v in row)) for c, row in zip(labels, np.asarray(values))]
    return write_csv(path, ("country", *labels), rows)


def write_long(path, labels, values) -> Path:
    v = np.asarray(values)
    rows = [(labels[i], labels[j], full(v[i, j]))
            for i in range(len(labels)) for j in range(i + 1, len(labels))]
    return write_csv(path, ("country", "partner", "rho"), rows)


# --- graphs -------------------------------------------------------------------

NODE_KEYS = (("repr", "double"), ("eci", "double"), ("income_group", "string"))
EDGE_KEYS = (("rho", "double"), ("delta_repr", "double"), ("edge_kind", "string"))
GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


def _graph_edges(net) -> tuple[list[Edge], bool]:
    return list(net.edges), isinstance(net, BenchmarkNetwork)


def _edge_delta(e: Edge, scores) -> float:
    if not math.isnan(e.delta_repr):
        return e.delta_repr
    return abs(scores[e.target] - scores[e.source])


def write_graphml(path, net, scores: dict[str, float], eci: dict[str, float],
                  income: dict[str, str | None]) -> Path:
    edges, directed = _graph_edges(net)
    ET.register_namespace("", GRAPHML_NS)
    root = ET.Element("graphml", xmlns=GRAPHML_NS)
    ids = {}
    for i, (name, typ) in enumerate(NODE_KEYS):
        ids[("node", name)] = f"n{i}"
        ET.SubElement(root, "key", {"id": f"n{i}", "for": "node", "attr.name": name, "attr.type": typ})
    for i, (name, typ) in enumerate(EDGE_KEYS):
        ids[("edge", name)] = f"e{i}"
        ET.SubElement(root, "key", {"id": f"e{i}", "for": "edge", "attr.name": name, "attr.type": typ})
    graph = ET.SubElement(root, "graph", id="G", edgedefault="directed" if directed else "undirected")
    for node in net.nodes:
        el = ET.SubElement(graph, "node", id=node)
        values = {"repr": scores.get(node), "eci": eci.get(node), "income_group": income.get(node)}
        for name, _ in NODE_KEYS:
            v = values[name]
            if v is None:
                continue
            ET.SubElement(el, "data", key=ids[("node", name)]).text = v if isinstance(v, str) else repr(float(v))
    for k, e in enumerate(edges):
        el = ET.SubElement(graph, "edge", id=f"e{k}", source=e.source, target=e.target)
        vals = {"rho": repr(float(e.rho)), "delta_repr": repr(float(_edge_delta(e, scores))),
                "edge_kind": e.kind}
        for name, _ in EDGE_KEYS:
            ET.SubElement(el, "data", key=ids[("edge", name)]).text = vals[name]
    ET.indent(root)
    body = ET.tostring(root, encoding="unicode")
    path = Path(path)
    path.write_text('<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n", encoding="utf-8")
    return path


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def write_dot(path, net, scores: dict[str, float], eci: dict[str, float],
              income: dict[str, str | None], name: str = "G") -> Path:
    edges, directed = _graph_edges(net)
    arrow = "->" if directed else "--"
    lines = [f"{'digraph' if directed else 'graph'} {_dot_id(name)} {{"]
    for node in net.nodes:
        attrs = []
        if node in scores:
            attrs.append(f"repr={scores[node]!r}")
        if eci.get(node) is not None:
            attrs.append(f"eci={float(eci[node])!r}")
        if income.get(node):
            attrs.append(f"income_group={_dot_id(income[node])}")
        lines.append(f"  {_dot_id(node)} [{', '.join(attrs)}];")
    for e in edges:
        lines.append(
            f"  {_dot_id(e.source)} {arrow} {_dot_id(e.target)} "
            f"[rho={float(e.rho)!r}, delta_repr={float(_edge_delta(e, scores))!r}, "
            f"edge_kind={_dot_id(e.kind)}];"
        )
    lines.append("}")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path

"""
Plain-text topology format:

    n m
    i j            (m edge lines)
    w_00 ... w_0n  (n weight lines, 17 significant digits)
"""
from typing import List, Tuple

import numpy as np

from ETGossip.exceptions import TopologyError
from ETGossip.network.mixing import MixingMatrix
from ETGossip.network.topology import Graph, graph_from_edges


def dump_topology(g: Graph, mixing: MixingMatrix) -> str:
    lines: List[str] = [f"{g.n} {g.edge_count}"]
    lines.extend(f"{i} {j}" for i, j in g.sorted_edges())
    for row in mixing.w:
        lines.append(" ".join(format(float(v), ".17g") for v in row))
    return "\n".join(lines) + "\n"


def load_topology(text: str) -> Tuple[Graph, np.ndarray]:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    try:
        n, m = (int(tok) for tok in lines[0].split())
        edges = [tuple(int(tok) for tok in line.split()) for line in lines[1:1 + m]]
        rows = [[float(tok) for tok in line.split()] for line in lines[1 + m:1 + m + n]]
    except (IndexError, ValueError) as e:
        raise TopologyError(f"Malformed topology text: {e}")
    if any(len(e) != 2 for e in edges) or len(edges) != m:
        raise TopologyError(f"Expected {m} edge lines of two node ids")
    if len(rows) != n or any(len(r) != n for r in rows):
        raise TopologyError(f"Expected {n} weight lines of {n} values")
    if len(lines) != 1 + m + n:
        raise TopologyError("Trailing content after weight block")
    return graph_from_edges(n, edges), np.array(rows, dtype=np.float64)

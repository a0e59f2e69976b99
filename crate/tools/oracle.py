"""Independent exact oracle for the JSON fixtures.

Enumerates every edge state with Python fractions and prints the
K-terminal reliability of each graph (or of the union of a decomposition),
plus the linear random cluster coefficient for all-terminal inputs.
"""
import json
import sys
from fractions import Fraction
from itertools import product
from pathlib import Path


def graph_of(doc):
    if "g1" in doc:
        nodes = set(doc["g1"]["nodes"]) | set(doc["g2"]["nodes"])
        edges = doc["g1"]["edges"] + doc["g2"]["edges"]
        terms = set(doc["g1"]["terminals"]) | set(doc["g2"]["terminals"])
        return nodes, edges, terms
    return set(doc["nodes"]), doc["edges"], set(doc["terminals"])


def components(nodes, edges, up):
    parent = {v: v for v in nodes}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for e, s in zip(edges, up):
        if s:
            parent[find(e["u"])] = find(e["v"])
    return find


def analyse(doc):
    nodes, edges, terms = graph_of(doc)
    probs = [Fraction(str(e["p"])) for e in edges]
    rel = Fraction(0)
    w1 = Fraction(0)
    for up in product([0, 1], repeat=len(edges)):
        weight = Fraction(1)
        for p, s in zip(probs, up):
            weight *= p if s else 1 - p
        find = components(nodes, edges, up)
        if len({find(t) for t in terms}) <= 1:
            rel += weight
        if len({find(v) for v in nodes}) == 1:
            w1 += weight
    return rel, w1, terms == nodes


for path in sorted(Path(sys.argv[1]).glob("*.json")):
    rel, w1, all_terminal = analyse(json.loads(path.read_text()))
    extra = f"  w1={w1}" if all_terminal else ""
    print(f"{path.name}: R={rel}{extra}")

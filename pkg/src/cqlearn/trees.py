"""Tree-shape recognition and quotient normalization.

An instance over a binary-plus-unary schema is tree-shaped when a level
function exists with level(b) = level(a) + 1 for every edge R(a,b) and no
value has two distinct R-predecessors.  Levels are per connected component,
each component's minimum normalized to 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .model import (
    CQ,
    Atom,
    Instance,
    ModelError,
    SchemaMismatchError,
    canonical_instance,
)


@dataclass(frozen=True)
class LevelAssignment:
    levels: tuple[tuple[str, int], ...]

    @classmethod
    def of(cls, levels: dict[str, int]) -> "LevelAssignment":
        return cls(tuple(sorted(levels.items())))

    def as_dict(self) -> dict[str, int]:
        return dict(self.levels)

    def __getitem__(self, value: str) -> int:
        return self.as_dict()[value]


@dataclass(frozen=True)
class TreeReduction:
    """Outcome of quotienting a CQ for evaluation on tree-shaped instances."""

    query: Optional[CQ]
    witness: Optional[LevelAssignment]

    @property
    def unsatisfiable_on_trees(self) -> bool:
        return self.query is None


def _binary_relation(instance: Instance) -> Optional[str]:
    binary = [r for r, n in instance.schema.relations if n == 2]
    bad = [r for r, n in instance.schema.relations if n > 2]
    if bad or len(binary) > 1:
        raise SchemaMismatchError(
            "tree-shape requires one binary relation plus unary relations"
        )
    return binary[0] if binary else None


def check_tree_shaped(instance: Instance) -> Optional[LevelAssignment]:
    binary = _binary_relation(instance)
    edges = [f.args for f in instance.sorted_facts if f.relation == binary]

    # Condition 2: unique predecessors.
    pred: dict[str, str] = {}
    for a, b in edges:
        if pred.setdefault(b, a) != a:
            return None

    # Condition 1: consistent leveling, per connected component.
    neighbours: dict[str, list[tuple[str, int]]] = {v: [] for v in instance.adom}
    for a, b in edges:
        neighbours[a].append((b, 1))
        neighbours[b].append((a, -1))
    levels: dict[str, int] = {}
    for start in sorted(instance.adom):
        if start in levels:
            continue
        component = [start]
        levels[start] = 0
        queue = [start]
        while queue:
            v = queue.pop()
            for w, delta in neighbours[v]:
                lw = levels[v] + delta
                if w in levels:
                    if levels[w] != lw:
                        return None
                else:
                    levels[w] = lw
                    component.append(w)
                    queue.append(w)
        shift = min(levels[v] for v in component)
        for v in component:
            levels[v] -= shift
    return LevelAssignment.of(levels)


def is_tree_shaped_cq(q: CQ) -> bool:
    return check_tree_shaped(canonical_instance(q).instance) is not None


def quotient_to_tree(q: CQ) -> TreeReduction:
    """Least quotient of q that answers identically on tree-shaped instances.

    Computes the smallest equivalence over the variables closed under
    [R(u,v), R(u',v') with v ~ v'  implies  u ~ u'], replaces every variable
    by the lexicographically least member of its class, and reports
    unsatisfiability on trees when the quotient has a directed R-cycle.
    """
    if q.arity > 1:
        raise ModelError("quotient_to_tree handles unary and Boolean queries")
    rels = {a.relation: len(a.args) for a in q.body}
    if any(n > 2 for n in rels.values()) or sum(n == 2 for n in rels.values()) > 1:
        raise SchemaMismatchError(
            "quotient requires one binary relation plus unary relations"
        )

    parent: dict[str, str] = {}

    def find(x: str) -> str:
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    def union(a: str, b: str) -> bool:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[max(ra, rb)] = min(ra, rb)
        return True

    r_atoms = [a for a in q.sorted_body if len(a.args) == 2]
    changed = True
    while changed:
        changed = False
        for a1 in r_atoms:
            for a2 in r_atoms:
                if find(a1.args[1]) == find(a2.args[1]):
                    changed |= union(a1.args[0], a2.args[0])

    rep = {v: find(v) for v in q.variables}
    body = frozenset(
        Atom(a.relation, tuple(rep[x] for x in a.args)) for a in q.body
    )
    head = tuple(rep[v] for v in q.head)
    quotient = CQ(head, body)

    # A directed cycle among the quotient's R-atoms (in any component) means
    # no tree-shaped instance satisfies q.
    succ: dict[str, list[str]] = {}
    for a in quotient.body:
        if len(a.args) == 2:
            succ.setdefault(a.args[0], []).append(a.args[1])
    state: dict[str, int] = {}

    def has_cycle(v: str) -> bool:
        state[v] = 1
        for w in succ.get(v, ()):
            s = state.get(w, 0)
            if s == 1 or (s == 0 and has_cycle(w)):
                return True
        state[v] = 2
        return False

    for v in sorted(quotient.variables):
        if state.get(v, 0) == 0 and has_cycle(v):
            return TreeReduction(None, None)

    witness = check_tree_shaped(canonical_instance(quotient).instance)
    assert witness is not None, "acyclic quotient must be tree-shaped"
    return TreeReduction(quotient, witness)

"""Homomorphism search and CQ/UCQ evaluation.

`find_homomorphism` is an exhaustive backtracking search with
most-constrained-variable ordering and per-atom candidate filtering.
`evaluate_tree` is the polynomial-time dynamic program for tree-shaped
queries over a binary-plus-unary schema.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iter_product
from typing import Optional

from .model import (
    CQ,
    UCQ,
    ArityMismatchError,
    Atom,
    Example,
    Instance,
    Label,
    SchemaMismatchError,
    canonical_instance,
)


@dataclass(frozen=True)
class Homomorphism:
    mapping: tuple[tuple[str, str], ...]

    @classmethod
    def of(cls, mapping: dict[str, str]) -> "Homomorphism":
        return cls(tuple(sorted(mapping.items())))

    def as_dict(self) -> dict[str, str]:
        return dict(self.mapping)

    def __getitem__(self, value: str) -> str:
        return self.as_dict()[value]


def verify_homomorphism(source: Example, target: Example, h: Homomorphism) -> bool:
    """Fact-by-fact check, independent of the search that produced h."""
    m = h.as_dict()
    if any(v not in m for v in source.instance.adom):
        return False
    target_facts = target.instance.facts
    for f in source.instance.facts:
        image = f.__class__(f.relation, tuple(m[a] for a in f.args))
        if image not in target_facts:
            return False
    return tuple(m[v] for v in source.distinguished) == target.distinguished


def compose(h1: Homomorphism, h2: Homomorphism) -> Homomorphism:
    """h2 after h1."""
    m2 = h2.as_dict()
    return Homomorphism.of({a: m2[b] for a, b in h1.mapping})


def _connected_value_components(facts: tuple, pins: dict[str, str]) -> list[list]:
    """Group facts by value connectivity; pinned values do not merge groups."""
    parent: dict[str, str] = {}

    def find(x: str) -> str:
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    def union(a: str, b: str) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for f in facts:
        for a in f.args[1:]:
            union(f.args[0], a)
    groups: dict[str, list] = {}
    for f in facts:
        groups.setdefault(find(f.args[0]), []).append(f)
    return [groups[k] for k in sorted(groups)]


def _solve_component(
    facts: list,
    pins: dict[str, str],
    target: Instance,
) -> Optional[dict[str, str]]:
    values = sorted({a for f in facts for a in f.args})
    incident: dict[str, int] = {v: 0 for v in values}
    facts_of: dict[str, list] = {v: [] for v in values}
    for f in facts:
        for a in set(f.args):
            incident[a] += 1
            facts_of[a].append(f)

    target_facts = target.facts
    adom_sorted = sorted(target.adom)
    # Per-value candidate filtering: a value occurring at position i of an
    # R-fact can only map to something occurring at position i of an R-fact.
    positions: dict[str, set[tuple[str, int]]] = {v: set() for v in values}
    for f in facts:
        for i, a in enumerate(f.args):
            positions[a].add((f.relation, i))
    occupants: dict[tuple[str, int], set[str]] = {}
    for f in target_facts:
        for i, a in enumerate(f.args):
            occupants.setdefault((f.relation, i), set()).add(a)
    candidates: dict[str, list[str]] = {}
    for v in values:
        if v in pins:
            cands = [pins[v]]
        else:
            cands = adom_sorted
        for key in positions[v]:
            occ = occupants.get(key, set())
            cands = [c for c in cands if c in occ]
        candidates[v] = cands
        if not cands:
            return None

    # Arc-consistency fixpoint: a candidate for a value must extend to a
    # whole target fact whose other positions are still candidates too.
    by_rel: dict[str, list] = {}
    for f in target_facts:
        by_rel.setdefault(f.relation, []).append(f)
    cand_sets = {v: set(c) for v, c in candidates.items()}
    changed = True
    while changed:
        changed = False
        for f in facts:
            matches = [
                t
                for t in by_rel.get(f.relation, ())
                if all(t.args[i] in cand_sets[a] for i, a in enumerate(f.args))
                and len({(a, t.args[i]) for i, a in enumerate(f.args)})
                == len(set(f.args))
            ]
            for i, a in enumerate(f.args):
                alive = {t.args[i] for t in matches}
                if not cand_sets[a] <= alive:
                    cand_sets[a] &= alive
                    if not cand_sets[a]:
                        return None
                    changed = True
    candidates = {v: [c for c in candidates[v] if c in cand_sets[v]] for v in values}

    order = sorted(values, key=lambda v: (-incident[v], v))
    assignment: dict[str, str] = {}
    fact_cls = facts[0].__class__

    def consistent(v: str) -> bool:
        for f in facts_of[v]:
            args = []
            complete = True
            for a in f.args:
                b = assignment.get(a)
                if b is None:
                    complete = False
                    break
                args.append(b)
            if complete and fact_cls(f.relation, tuple(args)) not in target_facts:
                return False
        return True

    def backtrack(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for c in candidates[v]:
            assignment[v] = c
            if consistent(v) and backtrack(i + 1):
                return True
            del assignment[v]
        return False

    return dict(assignment) if backtrack(0) else None


def _solve_tree_source(
    source: Instance, pins: dict[str, str], target: Instance
) -> Optional[dict[str, str]]:
    """Bottom-up solution when the source is a forest (tree-shaped): compute
    per-node satisfier sets, then extract a concrete map top-down."""
    binary: Optional[str] = None
    source_unary: dict[str, set[str]] = {v: set() for v in source.adom}
    parent: dict[str, str] = {}
    children: dict[str, list[str]] = {v: [] for v in source.adom}
    for f in source.sorted_facts:
        if len(f.args) == 1:
            source_unary[f.args[0]].add(f.relation)
        else:
            binary = f.relation
            u, v = f.args
            parent[v] = u
            children[u].append(v)

    members: dict[str, set[str]] = {}
    edges: list[tuple[str, str]] = []
    succ: dict[str, list[str]] = {}
    for f in target.facts:
        if len(f.args) == 1:
            members.setdefault(f.relation, set()).add(f.args[0])
        elif f.relation == binary:
            edges.append(f.args)
            succ.setdefault(f.args[0], []).append(f.args[1])
    adom = target.adom

    sat: dict[str, set[str]] = {}
    order: list[str] = []  # post-order over every tree
    roots = sorted(v for v in source.adom if v not in parent)
    stack = [(r, False) for r in reversed(roots)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        stack.append((node, True))
        stack.extend((c, False) for c in reversed(children[node]))

    for x in order:
        result = set(adom)
        for rel in source_unary[x]:
            result &= members.get(rel, set())
        for y in children[x]:
            ok = sat[y]
            result &= {u for u, w in edges if w in ok}
        if x in pins:
            result &= {pins[x]}
        if not result:
            return None
        sat[x] = result

    mapping: dict[str, str] = {}
    for r in roots:
        mapping[r] = min(sat[r])
        queue = [r]
        while queue:
            x = queue.pop()
            for y in children[x]:
                mapping[y] = min(w for w in succ.get(mapping[x], ()) if w in sat[y])
                queue.append(y)
    return mapping


def find_homomorphism(source: Example, target: Example) -> Optional[Homomorphism]:
    """A fact-preserving map source -> target respecting distinguished tuples."""
    if source.instance.schema != target.instance.schema:
        raise SchemaMismatchError("homomorphism requires matching schemas")
    if source.arity != target.arity:
        raise ArityMismatchError("homomorphism requires matching arities")
    pins: dict[str, str] = {}
    for a, b in zip(source.distinguished, target.distinguished):
        if pins.setdefault(a, b) != b:
            return None
    target_adom = target.instance.adom
    if any(b not in target_adom for b in pins.values()):
        return None

    mapping: dict[str, str] = {}
    loose = [v for v in pins if not any(v in f.args for f in source.instance.facts)]
    # Distinguished values of an ill-formed source occur in no fact; pin them
    # directly (their image is forced and unconstrained otherwise).
    for v in loose:
        mapping[v] = pins[v]

    if _forest_source(source.instance):
        sub = _solve_tree_source(source.instance, pins, target.instance)
        if sub is None:
            return None
        mapping.update(sub)
        return Homomorphism.of(mapping)

    components = _connected_value_components(source.instance.sorted_facts, pins)
    for facts in components:
        sub = _solve_component(facts, pins, target.instance)
        if sub is None:
            return None
        mapping.update(sub)
    return Homomorphism.of(mapping)


def _forest_source(instance: Instance) -> bool:
    """True when the instance is a forest over one binary relation: unique
    predecessors, no directed cycles, everything else unary."""
    binary = None
    pred: dict[str, str] = {}
    for f in instance.facts:
        if len(f.args) == 1:
            continue
        if len(f.args) != 2:
            return False
        if binary is None:
            binary = f.relation
        elif f.relation != binary:
            return False
        u, v = f.args
        if pred.setdefault(v, u) != u:
            return False
    # Unique predecessors: any directed cycle is value-disjoint from the rest,
    # so walking ancestors detects cycles in linear total time.
    state: dict[str, int] = {}
    for start in pred:
        if start in state:
            continue
        path = []
        v: Optional[str] = start
        while v is not None and v not in state:
            state[v] = 1
            path.append(v)
            v = pred.get(v)
        if v is not None and state[v] == 1 and v in path:
            return False
        for w in path:
            state[w] = 2
    return True


def evaluate(q: CQ, e: Example) -> Label:
    if q.arity != e.arity:
        raise ArityMismatchError(
            f"query arity {q.arity} != example arity {e.arity}"
        )
    source = canonical_instance(q, e.instance.schema)
    h = find_homomorphism(source, e)
    return Label.POSITIVE if h is not None else Label.NEGATIVE


def evaluate_ucq(u: UCQ, e: Example) -> Label:
    if u.arity != e.arity:
        raise ArityMismatchError(
            f"query arity {u.arity} != example arity {e.arity}"
        )
    for q in u.disjuncts:
        if evaluate(q, e) is Label.POSITIVE:
            return Label.POSITIVE
    return Label.NEGATIVE


class NotTreeShapedError(ValueError):
    pass


def _query_forest(q: CQ) -> tuple[dict[str, list[str]], list[str]]:
    """Children map and roots of a tree-shaped query's body forest."""
    parent: dict[str, str] = {}
    children: dict[str, list[str]] = {v: [] for v in q.variables}
    for atom in q.sorted_body:
        if len(atom.args) == 2:
            u, v = atom.args
            prev = parent.get(v)
            if prev is None:
                parent[v] = u
                children[u].append(v)
            elif prev != u:
                raise NotTreeShapedError("variable with two R-predecessors")
    roots = sorted(v for v in q.variables if v not in parent)
    return children, roots


def evaluate_tree(q: CQ, e: Example) -> Label:
    """Bottom-up evaluation of a tree-shaped query (binary + unary schema)."""
    from .trees import check_tree_shaped

    if q.arity != e.arity:
        raise ArityMismatchError(
            f"query arity {q.arity} != example arity {e.arity}"
        )
    canon = canonical_instance(q, e.instance.schema)
    if check_tree_shaped(canon.instance) is None:
        raise NotTreeShapedError("query is not tree-shaped")

    pins: dict[str, str] = {}
    for var, val in zip(q.head, e.distinguished):
        if pins.setdefault(var, val) != val:
            return Label.NEGATIVE

    unary_of: dict[str, set[str]] = {}
    for v in q.variables:
        unary_of[v] = set()
    binary_rel: Optional[str] = None
    for atom in q.body:
        if len(atom.args) == 1:
            unary_of[atom.args[0]].add(atom.relation)
        else:
            binary_rel = atom.relation

    members: dict[str, set[str]] = {}
    edges: list[tuple[str, str]] = []
    for f in e.instance.facts:
        if len(f.args) == 1:
            members.setdefault(f.relation, set()).add(f.args[0])
        elif f.relation == binary_rel:
            edges.append(f.args)
    adom = e.instance.adom

    children, roots = _query_forest(q)
    sat: dict[str, set[str]] = {}

    def solve(x: str) -> set[str]:
        result = set(adom)
        for rel in unary_of[x]:
            result &= members.get(rel, set())
        for y in children[x]:
            ok = sat[y]
            result &= {u for u, w in edges if w in ok}
        if x in pins:
            result &= {pins[x]}
        sat[x] = result
        return result

    # Post-order over each tree.
    def visit(x: str) -> None:
        for y in children[x]:
            visit(y)
        solve(x)

    for r in roots:
        visit(r)
        if not sat[r]:
            return Label.NEGATIVE
    return Label.POSITIVE


def all_answers(q: CQ, instance: Instance) -> set[tuple[str, ...]]:
    """All k-tuples over adom that the query maps to, by direct enumeration."""
    k = q.arity
    answers: set[tuple[str, ...]] = set()
    for tup in iter_product(sorted(instance.adom), repeat=k):
        if evaluate(q, Example(instance, tup)) is Label.POSITIVE:
            answers.add(tup)
    return answers


@dataclass(frozen=True)
class CQFragment:
    """One variable-connectivity component of a CQ body."""

    atoms: tuple[Atom, ...]
    head_vars: tuple[str, ...]


def connected_components(q: CQ) -> list[CQFragment]:
    parent: dict[str, str] = {}

    def find(x: str) -> str:
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    def union(a: str, b: str) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for atom in q.body:
        for a in atom.args[1:]:
            union(atom.args[0], a)
    by_root: dict[str, list[Atom]] = {}
    for atom in q.sorted_body:
        by_root.setdefault(find(atom.args[0]), []).append(atom)
    fragments = []
    for root in sorted(by_root):
        atoms = by_root[root]
        comp_vars = {a for atom in atoms for a in atom.args}
        head_vars = tuple(v for v in q.head if v in comp_vars)
        fragments.append(CQFragment(tuple(atoms), head_vars))
    return fragments

"""Relational data model: schemas, instances, examples, CQs, UCQs.

Values and variables are opaque strings compared by string equality.
Every operation that iterates over a set does so in lexicographic order,
so the whole library is deterministic.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional, Union


class ModelError(ValueError):
    pass


class SchemaMismatchError(ModelError):
    pass


class ArityMismatchError(ModelError):
    pass


class IllFormedExampleError(ModelError):
    pass


@dataclass(frozen=True)
class Schema:
    """Finite map from relation name to positive arity."""

    relations: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        names = [name for name, _ in self.relations]
        if len(set(names)) != len(names):
            raise ModelError("duplicate relation name in schema")
        for name, arity in self.relations:
            if arity < 1:
                raise ModelError(f"relation {name} has non-positive arity {arity}")
        object.__setattr__(self, "relations", tuple(sorted(self.relations)))

    @classmethod
    def of(cls, relations: Mapping[str, int]) -> "Schema":
        return cls(tuple(sorted(relations.items())))

    @cached_property
    def arities(self) -> dict[str, int]:
        return dict(self.relations)

    def arity(self, name: str) -> int:
        try:
            return self.arities[name]
        except KeyError:
            raise SchemaMismatchError(f"unknown relation {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self.arities


@dataclass(frozen=True, order=True)
class Fact:
    relation: str
    args: tuple[str, ...]


@dataclass(frozen=True, order=True)
class Atom:
    relation: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Instance:
    schema: Schema
    facts: frozenset[Fact]

    def __post_init__(self) -> None:
        if not isinstance(self.facts, frozenset):
            object.__setattr__(self, "facts", frozenset(self.facts))
        arities = self.schema.arities
        for f in self.facts:
            arity = arities.get(f.relation)
            if arity is None:
                raise SchemaMismatchError(f"fact uses unknown relation {f.relation!r}")
            if len(f.args) != arity:
                raise ArityMismatchError(
                    f"{f.relation} expects {arity} args, got {len(f.args)}"
                )

    @cached_property
    def adom(self) -> frozenset[str]:
        return frozenset(a for f in self.facts for a in f.args)

    @cached_property
    def sorted_facts(self) -> tuple[Fact, ...]:
        return tuple(sorted(self.facts))

    def size(self) -> int:
        """Total number of value occurrences across facts."""
        return sum(len(f.args) for f in self.facts)


@dataclass(frozen=True)
class Example:
    """An instance with a distinguished tuple of values.

    Construction does not require well-formedness; intermediate states of
    fact-deletion sweeps are legitimately ill-formed.
    """

    instance: Instance
    distinguished: tuple[str, ...]

    @property
    def arity(self) -> int:
        return len(self.distinguished)

    @cached_property
    def is_well_formed(self) -> bool:
        adom = self.instance.adom
        return all(v in adom for v in self.distinguished)

    def size(self) -> int:
        return self.instance.size() + self.arity


class Label(enum.Enum):
    POSITIVE = "+"
    NEGATIVE = "-"

    def __invert__(self) -> "Label":
        return Label.NEGATIVE if self is Label.POSITIVE else Label.POSITIVE


@dataclass(frozen=True)
class LabeledExampleSet:
    items: tuple[tuple[Example, Label], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(self.items))
        if self.items:
            first, _ = self.items[0]
            for e, _ in self.items:
                if not e.is_well_formed:
                    raise IllFormedExampleError("labeled example is ill-formed")
                if e.instance.schema != first.instance.schema:
                    raise SchemaMismatchError("mixed schemas in example set")
                if e.arity != first.arity:
                    raise ArityMismatchError("mixed arities in example set")

    @property
    def arity(self) -> int:
        if not self.items:
            raise ModelError("empty example set has no arity")
        return self.items[0][0].arity

    @property
    def schema(self) -> Schema:
        if not self.items:
            raise ModelError("empty example set has no schema")
        return self.items[0][0].instance.schema

    def positives(self) -> list[Example]:
        return [e for e, lab in self.items if lab is Label.POSITIVE]

    def negatives(self) -> list[Example]:
        return [e for e, lab in self.items if lab is Label.NEGATIVE]

    def total_size(self) -> int:
        return sum(e.size() for e, _ in self.items)

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class CQ:
    """Conjunctive query: head variable tuple plus a set of body atoms."""

    head: tuple[str, ...]
    body: frozenset[Atom]

    def __post_init__(self) -> None:
        if not isinstance(self.body, frozenset):
            object.__setattr__(self, "body", frozenset(self.body))
        if len(self.head) >= 1 and not self.body:
            raise ModelError("non-Boolean CQ must have a non-empty body")
        body_vars = self.variables
        for v in self.head:
            if v not in body_vars:
                raise ModelError(f"head variable {v!r} does not occur in the body")
        arities: dict[str, int] = {}
        for atom in self.body:
            seen = arities.setdefault(atom.relation, len(atom.args))
            if seen != len(atom.args):
                raise ArityMismatchError(
                    f"relation {atom.relation!r} used with two arities"
                )

    @property
    def arity(self) -> int:
        return len(self.head)

    @cached_property
    def variables(self) -> frozenset[str]:
        return frozenset(a for atom in self.body for a in atom.args)

    @cached_property
    def sorted_body(self) -> tuple[Atom, ...]:
        return tuple(sorted(self.body))

    def inferred_schema(self) -> Schema:
        return Schema.of({a.relation: len(a.args) for a in self.body})


@dataclass(frozen=True)
class UCQ:
    disjuncts: tuple[CQ, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "disjuncts", tuple(self.disjuncts))
        if not self.disjuncts:
            raise ModelError("UCQ must have at least one disjunct")
        arity = self.disjuncts[0].arity
        if any(q.arity != arity for q in self.disjuncts):
            raise ArityMismatchError("UCQ disjuncts of mixed arity")

    @property
    def arity(self) -> int:
        return self.disjuncts[0].arity


Query = Union[CQ, UCQ]


def atom_count(q: Query) -> int:
    if isinstance(q, UCQ):
        return sum(len(d.body) for d in q.disjuncts)
    return len(q.body)


def bit_size(q: Query) -> int:
    """Length in bits of the canonical text serialization."""
    from . import textio

    if isinstance(q, UCQ):
        return 8 * len(textio.serialize_ucq(q))
    return 8 * len(textio.serialize_cq(q))


def example_size(e: Example) -> int:
    return e.size()


def canonical_instance(q: CQ, schema: Optional[Schema] = None) -> Example:
    """The example whose facts are q's atoms and whose tuple is q's head."""
    if schema is None:
        schema = q.inferred_schema()
    facts = frozenset(Fact(a.relation, a.args) for a in q.body)
    return Example(Instance(schema, facts), q.head)


def _var_for(value: str) -> str:
    return f"x_{value}"


def canonical_cq(e: Example) -> CQ:
    """One variable per active-domain value, one atom per fact."""
    if not e.is_well_formed:
        raise IllFormedExampleError(
            "cannot take the canonical CQ of an ill-formed example"
        )
    body = frozenset(
        Atom(f.relation, tuple(_var_for(a) for a in f.args))
        for f in e.instance.facts
    )
    head = tuple(_var_for(v) for v in e.distinguished)
    return CQ(head, body)


def is_path_cq(q: CQ) -> bool:
    """Directed R-chain from the head variable, decorated with P-atoms.

    A chain of length 0 (head carrying only P-atoms) counts as a path-CQ.
    """
    if q.arity != 1:
        return False
    rels = {a.relation: len(a.args) for a in q.body}
    binary = [r for r, n in rels.items() if n == 2]
    unary = [r for r, n in rels.items() if n == 1]
    if len(binary) > 1 or len(unary) > 1 or len(binary) + len(unary) != len(rels):
        return False
    r_atoms = [a for a in q.body if len(a.args) == 2]
    p_atoms = [a for a in q.body if len(a.args) == 1]
    # Reconstruct the chain by following unique outgoing edges from the head.
    succ: dict[str, str] = {}
    for a in r_atoms:
        u, v = a.args
        if u in succ:
            return False  # branching
        succ[u] = v
    chain = [q.head[0]]
    seen = {q.head[0]}
    while chain[-1] in succ:
        nxt = succ[chain[-1]]
        if nxt in seen:
            return False  # cycle
        chain.append(nxt)
        seen.add(nxt)
    if len(chain) != len(r_atoms) + 1:
        return False  # some R-atom not on the chain
    return all(a.args[0] in seen for a in p_atoms)


def fact_order_key(f: Fact) -> tuple[str, tuple[str, ...]]:
    return (f.relation, f.args)


def make_instance(schema: Schema, facts: Iterable[Fact]) -> Instance:
    return Instance(schema, frozenset(facts))

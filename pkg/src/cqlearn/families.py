"""Hard-instance families and randomized test-input generation.

The three constructions: the 3CNF-fitting reduction, the lasso family
whose smallest fitting query grows with the product of primes, and the
path-instance family shattered by path-CQs.  Value names follow the
subscripted naming of the constructions so goldens are human-checkable.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product as iter_product
from typing import Callable

from .homs import evaluate
from .model import (
    CQ,
    Atom,
    Example,
    Fact,
    Instance,
    Label,
    LabeledExampleSet,
    ModelError,
    Schema,
)

BINARY_UNARY_SCHEMA = Schema.of({"R": 2, "P": 1})

PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)

LASSO_SAFETY_CAP = 4  # product of the first 4 primes is 210; desk scale


@dataclass(frozen=True)
class CnfFormula:
    """CNF with clauses of 1 to 3 literals; literals are signed indices."""

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.num_vars < 1:
            raise ModelError("formula needs at least one variable")
        for clause in self.clauses:
            if not 1 <= len(clause) <= 3:
                raise ModelError("clause width must be between 1 and 3")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ModelError(f"literal {lit} out of range")

    def padded_to_width_3(self) -> "CnfFormula":
        """Repeat a literal until every clause has width 3."""
        padded = tuple(
            clause + (clause[0],) * (3 - len(clause)) for clause in self.clauses
        )
        return CnfFormula(self.num_vars, padded)

    def satisfiable(self) -> bool:
        """Brute-force truth table; the independent oracle for the reduction."""
        for bits in iter_product((False, True), repeat=self.num_vars):
            if all(
                any(bits[abs(l) - 1] == (l > 0) for l in clause)
                for clause in self.clauses
            ):
                return True
        return not self.clauses


def literal_index(lit: int) -> int:
    """Chain position of a literal: 2i for X_i, 2i-1 for its negation."""
    i = abs(lit)
    return 2 * i if lit > 0 else 2 * i - 1


def all_literals(num_vars: int) -> list[int]:
    return [l for i in range(1, num_vars + 1) for l in (i, -i)]


def gen_cnf_reduction(phi: CnfFormula) -> tuple[Instance, LabeledExampleSet]:
    """Instance I_phi and example set E_phi of the satisfiability reduction.

    Each variable gets a root a_i with two decorated chains of length 2m;
    each clause gets a chain under the shared negative root b, decorated at
    the positions of the literals absent from the clause.
    """
    m = phi.num_vars
    k = len(phi.clauses)
    lits = all_literals(m)
    facts: list[Fact] = []
    for i in range(1, m + 1):
        facts.append(Fact("R", (f"a_{i}", f"p_{i}_1")))
        facts.append(Fact("R", (f"a_{i}", f"n_{i}_1")))
        for j in range(1, 2 * m):
            facts.append(Fact("R", (f"p_{i}_{j}", f"p_{i}_{j+1}")))
            facts.append(Fact("R", (f"n_{i}_{j}", f"n_{i}_{j+1}")))
        for l in lits:
            if l != -i:
                facts.append(Fact("P", (f"p_{i}_{literal_index(l)}",)))
            if l != i:
                facts.append(Fact("P", (f"n_{i}_{literal_index(l)}",)))
    for i in range(1, k + 1):
        facts.append(Fact("R", ("b", f"b_{i}_1")))
        for j in range(1, 2 * m):
            facts.append(Fact("R", (f"b_{i}_{j}", f"b_{i}_{j+1}")))
        for l in lits:
            if l not in phi.clauses[i - 1]:
                facts.append(Fact("P", (f"b_{i}_{literal_index(l)}",)))
    instance = Instance(BINARY_UNARY_SCHEMA, frozenset(facts))
    items = [
        (Example(instance, (f"a_{i}",)), Label.POSITIVE) for i in range(1, m + 1)
    ]
    items.append((Example(instance, ("b",)), Label.NEGATIVE))
    return instance, LabeledExampleSet(tuple(items))


def assignment_to_path_cq(assignment: dict[int, bool], num_vars: int) -> CQ:
    """Path-CQ of 2m R-atoms with a P-atom per literal the assignment satisfies."""
    if set(assignment) != set(range(1, num_vars + 1)):
        raise ModelError("assignment must be total over the variables")
    atoms = [
        Atom("R", (f"x_{j}", f"x_{j+1}")) for j in range(2 * num_vars)
    ]
    for i in range(1, num_vars + 1):
        lit = i if assignment[i] else -i
        atoms.append(Atom("P", (f"x_{literal_index(lit)}",)))
    return CQ(("x_0",), frozenset(atoms))


def terminal_p_path_cq(length: int) -> CQ:
    """R-chain of the given length with a single P-atom on its last variable."""
    if length < 1:
        raise ModelError("path length must be at least 1")
    atoms = [Atom("R", (f"x_{j}", f"x_{j+1}")) for j in range(length)]
    atoms.append(Atom("P", (f"x_{length}",)))
    return CQ(("x_0",), frozenset(atoms))


def lasso_instance_facts(m: int) -> list[Fact]:
    """Tail of length m feeding a cycle of length m with one P-marked value."""
    facts = [Fact("R", (f"a{m}_{i}", f"a{m}_{i+1}")) for i in range(2 * m - 1)]
    facts.append(Fact("R", (f"a{m}_{2*m-1}", f"a{m}_{m}")))
    facts.append(Fact("P", (f"a{m}_{m}",)))
    return facts


def gen_lasso_family(n: int) -> tuple[Instance, LabeledExampleSet, CQ]:
    """Disjoint lassos of the first n prime lengths plus a loop value b.

    Returns the instance, the n-positives-one-negative example set, and the
    fitting path-CQ whose length is the product of the primes.
    """
    if n < 1:
        raise ModelError("n must be at least 1")
    if n > LASSO_SAFETY_CAP:
        raise ModelError(f"lasso family capped at n={LASSO_SAFETY_CAP}")
    facts: list[Fact] = []
    length = 1
    for p in PRIMES[:n]:
        facts.extend(lasso_instance_facts(p))
        length *= p
    facts.append(Fact("R", ("b", "b")))
    instance = Instance(BINARY_UNARY_SCHEMA, frozenset(facts))
    items = [
        (Example(instance, (f"a{p}_0",)), Label.POSITIVE) for p in PRIMES[:n]
    ]
    items.append((Example(instance, ("b",)), Label.NEGATIVE))
    return instance, LabeledExampleSet(tuple(items)), terminal_p_path_cq(length)


def gen_vc_family(n: int) -> tuple[list[Example], Callable[[set[int]], CQ]]:
    """n path examples shattered by path-CQs: example i lacks P at position i.

    query_for_subset(X) carries P-atoms exactly at the positions outside X,
    so it labels example i positive iff i is in X.  Requires n >= 2: at n=1
    the lone instance would have no facts at all.
    """
    if n < 2:
        raise ModelError("the shattering family needs n >= 2")
    examples = []
    for i in range(1, n + 1):
        facts = [Fact("R", (f"a_{j}", f"a_{j+1}")) for j in range(1, n)]
        facts.extend(Fact("P", (f"a_{j}",)) for j in range(1, n + 1) if j != i)
        examples.append(
            Example(Instance(BINARY_UNARY_SCHEMA, frozenset(facts)), ("a_1",))
        )

    def query_for_subset(subset: set[int]) -> CQ:
        if not subset <= set(range(1, n + 1)):
            raise ModelError("subset out of range")
        atoms = [Atom("R", (f"x_{j}", f"x_{j+1}")) for j in range(1, n)]
        atoms.extend(
            Atom("P", (f"x_{j}",)) for j in range(1, n + 1) if j not in subset
        )
        return CQ(("x_1",), frozenset(atoms))

    return examples, query_for_subset


@dataclass(frozen=True)
class RandomProfile:
    """Bounds for seeded random generation."""

    kind: str  # instance | tree-instance | cq | tree-cq | labeled-set
    schema: Schema = BINARY_UNARY_SCHEMA
    max_values: int = 10
    max_facts: int = 15
    max_atoms: int = 5
    arity: int = 1
    num_examples: int = 6
    target_atoms: int = 3


def random_instance(rng: random.Random, schema: Schema, n_values: int, n_facts: int) -> Instance:
    values = [f"c{i}" for i in range(n_values)]
    rels = schema.relations
    facts = set()
    attempts = 0
    while len(facts) < n_facts and attempts < 20 * n_facts:
        rel, arity = rels[rng.randrange(len(rels))]
        facts.add(Fact(rel, tuple(rng.choice(values) for _ in range(arity))))
        attempts += 1
    return Instance(schema, frozenset(facts))


def random_tree_instance(
    rng: random.Random, n_values: int, unary_names: tuple[str, ...] = ("P",)
) -> Instance:
    """Random forest of downward R-edges with random unary decorations."""
    values = [f"t{i}" for i in range(n_values)]
    facts = set()
    for i in range(1, n_values):
        if rng.random() < 0.85:  # else i starts a new root
            parent = values[rng.randrange(i)]
            facts.add(Fact("R", (parent, values[i])))
    for v in values:
        for name in unary_names:
            if rng.random() < 0.5:
                facts.add(Fact(name, (v,)))
    if not facts:
        facts.add(Fact(unary_names[0], (values[0],)))
    schema = Schema.of({"R": 2, **{u: 1 for u in unary_names}})
    return Instance(schema, frozenset(facts))


def random_cq(rng: random.Random, schema: Schema, n_atoms: int, arity: int) -> CQ:
    # enough variables that n_atoms distinct atoms exist over the schema
    floor = 1
    while sum(floor**a for _, a in schema.relations) < n_atoms:
        floor += 1
    n_vars = max(arity, floor, rng.randint(1, 2 * n_atoms))
    variables = [f"y{i}" for i in range(n_vars)]
    rels = schema.relations
    body = set()
    while len(body) < n_atoms:
        rel, rel_arity = rels[rng.randrange(len(rels))]
        body.add(Atom(rel, tuple(rng.choice(variables) for _ in range(rel_arity))))
    used = sorted({v for a in body for v in a.args})
    head = tuple(rng.choice(used) for _ in range(arity))
    return CQ(head, frozenset(body))


def random_tree_cq(rng: random.Random, n_atoms: int, arity: int) -> CQ:
    """Random tree-shaped CQ over the binary-plus-unary schema."""
    variables = [f"y{i}" for i in range(max(1, n_atoms))]
    body: set[Atom] = set()
    for i in range(1, len(variables)):
        parent = variables[rng.randrange(i)]
        body.add(Atom("R", (parent, variables[i])))
    while len(body) < n_atoms:
        body.add(Atom("P", (rng.choice(variables),)))
    head = tuple(rng.choice(variables) for _ in range(arity))
    return CQ(head, frozenset(body))


def random_positive_example(
    rng: random.Random,
    q: CQ,
    schema: Schema,
    n_extra_values: int = 4,
    n_extra_facts: int = 5,
) -> Example:
    """Homomorphic image of the canonical instance plus random noise facts."""
    values = [f"e{i}" for i in range(n_extra_values + 1)]
    image = {v: rng.choice(values) for v in sorted(q.variables)}
    facts = {Fact(a.relation, tuple(image[x] for x in a.args)) for a in q.body}
    rels = schema.relations
    for _ in range(n_extra_facts):
        rel, rel_arity = rels[rng.randrange(len(rels))]
        facts.add(Fact(rel, tuple(rng.choice(values) for _ in range(rel_arity))))
    return Example(Instance(schema, frozenset(facts)), tuple(image[v] for v in q.head))


def random_labeled_set(
    rng: random.Random,
    target: CQ,
    schema: Schema,
    num_examples: int,
    max_values: int = 8,
    max_facts: int = 12,
) -> LabeledExampleSet:
    """Example set labeled by a planted target, with at least one positive."""
    items = []
    items.append(
        (random_positive_example(rng, target, schema), Label.POSITIVE)
    )
    while len(items) < num_examples:
        if rng.random() < 0.4:
            e = random_positive_example(rng, target, schema)
        else:
            inst = random_instance(
                rng, schema, rng.randint(2, max_values), rng.randint(2, max_facts)
            )
            adom = sorted(inst.adom)
            e = Example(
                inst, tuple(rng.choice(adom) for _ in range(target.arity))
            )
        items.append((e, evaluate(target, e)))
    return LabeledExampleSet(tuple(items))


def gen_random(seed: int, profile: RandomProfile):
    """Deterministic generation dispatcher; identical output for equal seeds."""
    rng = random.Random(f"cqlearn:{seed}")
    if profile.kind == "instance":
        return random_instance(rng, profile.schema, profile.max_values, profile.max_facts)
    if profile.kind == "tree-instance":
        return random_tree_instance(rng, profile.max_values)
    if profile.kind == "cq":
        return random_cq(rng, profile.schema, profile.max_atoms, profile.arity)
    if profile.kind == "tree-cq":
        return random_tree_cq(rng, profile.max_atoms, profile.arity)
    if profile.kind == "labeled-set":
        target = random_cq(rng, profile.schema, profile.target_atoms, profile.arity)
        return random_labeled_set(
            rng, target, profile.schema, profile.num_examples,
            profile.max_values, profile.max_facts,
        )
    raise ModelError(f"unknown profile kind {profile.kind!r}")

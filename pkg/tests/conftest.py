"""Shared test helpers: compact constructors and the path-query PAC scenario."""
import random

from cqlearn.model import (
    CQ,
    Atom,
    Example,
    Fact,
    Instance,
    Label,
    LabeledExampleSet,
    Schema,
)

RP = Schema.of({"R": 2, "P": 1})


def fact(text: str) -> Fact:
    name, rest = text.split("(", 1)
    return Fact(name, tuple(a.strip() for a in rest.rstrip(")").split(",")))


def inst(*facts: str, schema: Schema = RP) -> Instance:
    return Instance(schema, frozenset(fact(f) for f in facts))


def ex(instance: Instance, *distinguished: str) -> Example:
    return Example(instance, tuple(distinguished))


def atom(text: str) -> Atom:
    name, rest = text.split("(", 1)
    return Atom(name, tuple(a.strip() for a in rest.rstrip(")").split(",")))


def cq(head: tuple, *atoms: str) -> CQ:
    return CQ(tuple(head), frozenset(atom(a) for a in atoms))


def labeled(*items) -> LabeledExampleSet:
    out = []
    for e, sign in items:
        out.append((e, Label.POSITIVE if sign == "+" else Label.NEGATIVE))
    return LabeledExampleSet(tuple(out))


def seeded(tag: str) -> random.Random:
    return random.Random(f"tests:{tag}")


def path_support_scenario(n_paths: int = 10, prefix_len: int = 5):
    """A single-instance distribution scenario for the length-5 path target.

    The instance is a disjoint union of decorated R-paths; support examples
    start at the first prefix_len values of each path, so an example is
    positive iff its path carries P five steps further on.
    """
    p_positions = [
        {5},
        {7},
        {6},
        set(),
        {8},
        {5, 6},
        set(),
        {7},
        set(),
        {8},
    ]
    facts = []
    support = []
    for j in range(n_paths):
        for i in range(8):
            facts.append(Fact("R", (f"v{j}_{i}", f"v{j}_{i+1}")))
        for pos in sorted(p_positions[j % len(p_positions)]):
            facts.append(Fact("P", (f"v{j}_{pos}",)))
    instance = Instance(RP, frozenset(facts))
    for j in range(n_paths):
        for i in range(prefix_len):
            support.append(Example(instance, (f"v{j}_{i}",)))
    return instance, support

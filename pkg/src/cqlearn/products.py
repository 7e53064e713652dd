"""Direct products of instances and examples.

Product values are pairs, flattened into fresh identifiers "<left,right>".
The pairing is deterministic, so products nest reproducibly; the projection
maps are recomputable from the factors and are exposed for verification.
"""
from __future__ import annotations

from typing import Union

from .model import (
    ArityMismatchError,
    Example,
    Fact,
    Instance,
    SchemaMismatchError,
)


class IllFormed:
    """Sentinel for a product whose distinguished tuple left the domain."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "IllFormed"


ILL_FORMED = IllFormed()


def pair_value(left: str, right: str) -> str:
    return f"<{left},{right}>"


def product_instances(left: Instance, right: Instance) -> Instance:
    if left.schema != right.schema:
        raise SchemaMismatchError("product requires matching schemas")
    by_rel: dict[str, list[Fact]] = {}
    for f in right.facts:
        by_rel.setdefault(f.relation, []).append(f)
    facts = set()
    for f in left.facts:
        for g in by_rel.get(f.relation, ()):
            facts.add(
                Fact(f.relation, tuple(pair_value(a, b) for a, b in zip(f.args, g.args)))
            )
    return Instance(left.schema, frozenset(facts))


def product_value_maps(product: Instance) -> tuple[dict[str, str], dict[str, str]]:
    """Left and right projection maps for a freshly built product instance."""
    left: dict[str, str] = {}
    right: dict[str, str] = {}
    for f in product.facts:
        for v in f.args:
            left[v], right[v] = _split_pair(v)
    return left, right


def _split_pair(v: str) -> tuple[str, str]:
    assert v.startswith("<") and v.endswith(">"), f"not a product value: {v!r}"
    depth = 0
    for i, c in enumerate(v):
        if c == "<":
            depth += 1
        elif c == ">":
            depth -= 1
        elif c == "," and depth == 1:
            return v[1:i], v[i + 1 : -1]
    raise AssertionError(f"not a product value: {v!r}")


def product_examples(e1: Example, e2: Example) -> Union[Example, IllFormed]:
    """Direct product of examples; IllFormed when a distinguished pair is
    outside the product's active domain."""
    if e1.arity != e2.arity:
        raise ArityMismatchError("product requires matching arities")
    inst = product_instances(e1.instance, e2.instance)
    distinguished = tuple(
        pair_value(a, b) for a, b in zip(e1.distinguished, e2.distinguished)
    )
    adom = inst.adom
    if any(v not in adom for v in distinguished):
        return ILL_FORMED
    return Example(inst, distinguished)

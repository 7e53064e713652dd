"""Fitting CQs to labeled example sets.

`fitting_exists` uses the product characterization: the iterated product of
the positive examples fits iff anything does.  `smallest_fitting_enumeration`
is the brute-force Occam procedure over all CQs in increasing size order;
it doubles as the independent minimality oracle.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import combinations, product as iter_product
from typing import Optional

from .homs import Homomorphism, evaluate, evaluate_ucq, find_homomorphism
from .model import (
    CQ,
    UCQ,
    Atom,
    Example,
    LabeledExampleSet,
    ModelError,
    Query,
    canonical_cq,
)
from .products import ILL_FORMED, product_examples


class NoPositiveExamplesError(ModelError):
    pass


@dataclass(frozen=True)
class FittingReport:
    exists: bool
    witness: Optional[CQ] = None
    certificate: Optional[tuple[Example, Homomorphism]] = None


def verify_fit(q: Query, examples: LabeledExampleSet) -> bool:
    """True iff q's label agrees with every label in the set."""
    ev = evaluate_ucq if isinstance(q, UCQ) else evaluate
    return all(ev(q, e) is lab for e, lab in examples.items)


def fitting_exists(examples: LabeledExampleSet) -> FittingReport:
    positives = examples.positives()
    if not positives:
        raise NoPositiveExamplesError(
            "fitting_exists needs at least one positive example"
        )
    product = reduce(
        lambda acc, e: acc if acc is ILL_FORMED else product_examples(acc, e),
        positives[1:],
        positives[0],
    )
    if product is ILL_FORMED:
        return FittingReport(exists=False)
    for neg in examples.negatives():
        h = find_homomorphism(product, neg)
        if h is not None:
            return FittingReport(exists=False, certificate=(neg, h))
    return FittingReport(exists=True, witness=canonical_cq(product))


def _weak_canonical(head: tuple[str, ...], atoms: tuple[Atom, ...]) -> tuple:
    """Rename variables by first occurrence in (head, sorted atoms).

    Imperfect as an isomorphism canonicalizer (atom sort order shifts under
    renaming), which costs duplicate work but never correctness.
    """
    rename: dict[str, str] = {}
    for v in head:
        rename.setdefault(v, f"v{len(rename)}")
    for atom in sorted(atoms):
        for v in atom.args:
            rename.setdefault(v, f"v{len(rename)}")
    new_head = tuple(rename[v] for v in head)
    new_atoms = tuple(
        sorted(Atom(a.relation, tuple(rename[v] for v in a.args)) for a in atoms)
    )
    return (new_head, new_atoms)


def enumerate_cqs(schema, arity: int, n_atoms: int):
    """All CQs with exactly n_atoms body atoms, deduplicated by a weak
    canonical form, in canonical serialization order."""
    from .textio import serialize_cq

    max_arity = max(a for _, a in schema.relations)
    pool = [f"v{i}" for i in range(n_atoms * max_arity)]
    atoms = [
        Atom(rel, args)
        for rel, rel_arity in schema.relations
        for args in iter_product(pool, repeat=rel_arity)
    ]
    seen: set[tuple] = set()
    found: list[tuple[str, CQ]] = []
    for body in combinations(atoms, n_atoms):
        used = sorted({v for a in body for v in a.args})
        for head in iter_product(used, repeat=arity):
            key = _weak_canonical(head, body)
            if key in seen:
                continue
            seen.add(key)
            q = CQ(key[0], frozenset(key[1]))
            found.append((serialize_cq(q), q))
    found.sort(key=lambda pair: pair[0])
    return [q for _, q in found]


def smallest_fitting_enumeration(
    examples: LabeledExampleSet, max_atoms: int
) -> Optional[CQ]:
    """First fitting CQ in (atom count, canonical serialization) order."""
    if max_atoms < 1:
        raise ValueError("max_atoms must be at least 1")
    schema = examples.schema
    arity = examples.arity
    for n in range(1, max_atoms + 1):
        for q in enumerate_cqs(schema, arity, n):
            if verify_fit(q, examples):
                return q
    return None

"""Membership-oracle learning of CQs and UCQs.

The learner alternates two steps over the positive examples: direct-product
generalization and greedy minimization to a critical positive example.
Negative examples are never consulted by the loop; a final verification
pass flags label/oracle inconsistency instead of looping.
"""
from __future__ import annotations

import abc
from dataclasses import dataclass, field
from typing import Optional

from .homs import evaluate, evaluate_tree, evaluate_ucq
from .model import (
    CQ,
    UCQ,
    Example,
    Instance,
    Label,
    LabeledExampleSet,
    ModelError,
    Query,
    canonical_cq,
    canonical_instance,
)
from .products import ILL_FORMED, product_examples
from .trees import check_tree_shaped


class InconsistentLabelsError(ModelError):
    """Input labels disagree with the oracle; carries the hypothesis built."""

    def __init__(self, message: str, hypothesis: Optional[Query] = None):
        super().__init__(message)
        self.hypothesis = hypothesis


class MembershipOracle(abc.ABC):
    """Answer source mapping well-formed examples to labels; call-counted."""

    def __init__(self) -> None:
        self.call_count = 0

    def answer(self, e: Example) -> Label:
        self.call_count += 1
        return self._answer(e)

    @abc.abstractmethod
    def _answer(self, e: Example) -> Label:
        ...


class TargetOracle(MembershipOracle):
    """Oracle backed by a hidden target query, labeling via evaluation."""

    def __init__(self, target: Query):
        super().__init__()
        self.target = target
        self._tree_fast_path = False
        if isinstance(target, CQ):
            try:
                self._tree_fast_path = (
                    check_tree_shaped(canonical_instance(target).instance)
                    is not None
                )
            except ModelError:
                pass

    def _answer(self, e: Example) -> Label:
        if isinstance(self.target, UCQ):
            return evaluate_ucq(self.target, e)
        if self._tree_fast_path:
            return evaluate_tree(self.target, e)
        return evaluate(self.target, e)


@dataclass
class LearnerOutput:
    hypothesis: Query
    oracle_calls: int
    trace: list[int] = field(default_factory=list)
    facts_processed: int = 0


def minimize_critical(e: Example, oracle: MembershipOracle) -> Example:
    """Greedy single sweep to a critical positive example.

    Facts are tried for removal in the fixed total order.  Positivity is
    antitone under fact removal, so one pass suffices for criticality.
    Removals that would orphan a distinguished value are rejected without
    consulting the oracle.  Caller guarantees e is oracle-positive.
    """
    schema = e.instance.schema
    dist = e.distinguished
    kept = list(e.instance.sorted_facts)
    dist_set = set(dist)
    occurrences = {v: 0 for v in dist_set}
    for f in kept:
        for a in f.args:
            if a in occurrences:
                occurrences[a] += 1

    i = 0
    while i < len(kept):
        f = kept[i]
        hit = [a for a in f.args if a in occurrences]
        if any(occurrences[a] - hit.count(a) == 0 for a in set(hit)):
            i += 1  # removal would make the example ill-formed
            continue
        candidate = Example(Instance(schema, frozenset(kept[:i] + kept[i + 1 :])), dist)
        if oracle.answer(candidate) is Label.POSITIVE:
            del kept[i]
            for a in hit:
                occurrences[a] -= 1
        else:
            i += 1
    return Example(Instance(schema, frozenset(kept)), dist)


def learn_cq(examples: LabeledExampleSet, oracle: MembershipOracle) -> LearnerOutput:
    """Occam learner for CQs: product with each positive, then minimize."""
    positives = examples.positives()
    if not positives:
        raise ModelError("learning needs at least one positive example")
    if oracle.answer(positives[0]) is not Label.POSITIVE:
        raise InconsistentLabelsError("first positive example is oracle-negative")
    facts_processed = len(positives[0].instance.facts)
    current = minimize_critical(positives[0], oracle)
    trace = [current.size()]
    for e in positives[1:]:
        combined = product_examples(current, e)
        if combined is ILL_FORMED:
            raise InconsistentLabelsError(
                "product of oracle-positive examples is ill-formed"
            )
        facts_processed += len(combined.instance.facts)
        current = minimize_critical(combined, oracle)
        trace.append(current.size())
    hypothesis = canonical_cq(current)
    if not verify_against(hypothesis, examples):
        raise InconsistentLabelsError(
            "hypothesis does not fit the input labels", hypothesis=hypothesis
        )
    return LearnerOutput(hypothesis, oracle.call_count, trace, facts_processed)


def learn_ucq(examples: LabeledExampleSet, oracle: MembershipOracle) -> LearnerOutput:
    """UCQ learner: a set of critical examples, one per needed disjunct."""
    positives = examples.positives()
    if not positives:
        raise ModelError("learning needs at least one positive example")
    critical: list[Example] = []
    trace: list[int] = []
    facts_processed = 0
    for e in positives:
        merged = False
        for idx, j in enumerate(critical):
            combined = product_examples(j, e)
            if combined is ILL_FORMED:
                continue
            facts_processed += len(combined.instance.facts)
            if oracle.answer(combined) is Label.POSITIVE:
                critical[idx] = minimize_critical(combined, oracle)
                merged = True
                break
        if not merged:
            if oracle.answer(e) is not Label.POSITIVE:
                raise InconsistentLabelsError(
                    "positive-labeled example is oracle-negative"
                )
            facts_processed += len(e.instance.facts)
            critical.append(minimize_critical(e, oracle))
        trace.append(sum(j.size() for j in critical))
    hypothesis = UCQ(tuple(canonical_cq(j) for j in critical))
    if not verify_against(hypothesis, examples):
        raise InconsistentLabelsError(
            "hypothesis does not fit the input labels", hypothesis=hypothesis
        )
    return LearnerOutput(hypothesis, oracle.call_count, trace, facts_processed)


def verify_against(q: Query, examples: LabeledExampleSet) -> bool:
    from .fitting import verify_fit

    return verify_fit(q, examples)

"""PAC experiment machinery.

Finite weighted example distributions, the Occam sample-size bound,
exact and sampled error estimation, seeded experiment trials, and the
fitting-via-PAC wrapper.
"""
from __future__ import annotations

import bisect
import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .homs import evaluate, evaluate_ucq
from .learn import LearnerOutput, MembershipOracle, TargetOracle, learn_cq, learn_ucq
from .model import (
    UCQ,
    Example,
    Label,
    LabeledExampleSet,
    ModelError,
    Query,
    bit_size,
)


def _label(q: Query, e: Example) -> Label:
    return evaluate_ucq(q, e) if isinstance(q, UCQ) else evaluate(q, e)


@dataclass(frozen=True)
class Distribution:
    """Finite weighted distribution over examples; weights sum to 1."""

    support: tuple[tuple[Example, Fraction], ...]

    def __post_init__(self) -> None:
        if not self.support:
            raise ModelError("distribution needs non-empty support")
        total = sum(w for _, w in self.support)
        if total <= 0:
            raise ModelError("total weight must be positive")
        if any(w < 0 for _, w in self.support):
            raise ModelError("weights must be non-negative")
        if total != 1:
            object.__setattr__(
                self,
                "support",
                tuple((e, Fraction(w) / total) for e, w in self.support),
            )

    @classmethod
    def uniform(cls, examples: Sequence[Example]) -> "Distribution":
        n = len(examples)
        return cls(tuple((e, Fraction(1, n)) for e in examples))

    @property
    def single_instance(self) -> bool:
        first = self.support[0][0].instance
        return all(e.instance == first for e, _ in self.support)


@dataclass(frozen=True)
class PacParams:
    delta: float
    epsilon: float
    n_bits: int
    alpha: float = 0.0
    k_occam: int = 1

    def __post_init__(self) -> None:
        if not 0 < self.delta < 1 or not 0 < self.epsilon < 1:
            raise ModelError("delta and epsilon must lie in (0,1)")
        if self.k_occam < 1 or self.n_bits < 1:
            raise ModelError("n_bits and k_occam must be positive")


def sample_size(p: PacParams, example_size_bound: Optional[int] = None) -> int:
    """Occam sample bound; independent of the example-size bound, which is
    accepted only for signature fidelity."""
    if p.alpha >= 1:
        raise ModelError("alpha must be below 1")
    base = (p.n_bits**p.k_occam * math.log(2) + math.log(2 / p.delta)) / p.epsilon
    return math.ceil(base ** (1 / (1 - p.alpha)))


def draw_sample(d: Distribution, count: int, seed) -> list[Example]:
    """Reproducible i.i.d. draws by inverse CDF over the fixed support order."""
    rng = random.Random(f"draw:{seed}")
    cumulative: list[float] = []
    acc = 0.0
    for _, w in d.support:
        acc += float(w)
        cumulative.append(acc)
    cumulative[-1] = 1.0
    out = []
    for _ in range(count):
        idx = bisect.bisect_right(cumulative, rng.random())
        out.append(d.support[min(idx, len(d.support) - 1)][0])
    return out


def exact_error(h: Query, target: Query, d: Distribution) -> Fraction:
    """Definitional error: total weight of disagreement examples."""
    return sum(
        (w for e, w in d.support if _label(h, e) is not _label(target, e)),
        Fraction(0),
    )


def sampled_error(h: Query, target: Query, d: Distribution, count: int, seed) -> Fraction:
    if h.arity != target.arity:
        raise ModelError("hypothesis and target arity differ")
    draws = draw_sample(d, count, seed)
    disagreements = sum(1 for e in draws if _label(h, e) is not _label(target, e))
    return Fraction(disagreements, count)


def estimate_error(
    h: Query,
    target: Query,
    d: Distribution,
    count: Optional[int] = None,
    seed=None,
    exact: bool = True,
) -> Fraction:
    if h.arity != target.arity:
        raise ModelError("hypothesis and target arity differ")
    if exact:
        return exact_error(h, target, d)
    if count is None:
        raise ModelError("sampled mode needs a draw count")
    return sampled_error(h, target, d, count, seed)


@dataclass
class TrialReport:
    seed: str
    sample_size_used: int
    hypothesis: Optional[Query]
    empirical_error: Fraction
    oracle_calls: int
    wall_time: float


def default_params(target: Query, delta: float, epsilon: float) -> PacParams:
    return PacParams(delta=delta, epsilon=epsilon, n_bits=bit_size(target))


def run_pac_experiment(
    target: Query,
    d: Distribution,
    p: PacParams,
    trials: int,
    seed: int,
    ucq: bool = False,
) -> list[TrialReport]:
    """Seeded independent trials: draw, label by the target, learn with a
    target-backed membership oracle, score with the exact-mode error.

    Drawn training examples are deduplicated (first occurrence kept) before
    the learner runs; duplicates carry no information and the hypothesis
    still fits every drawn example.
    """
    n = sample_size(p)
    label_cache: dict[tuple, Label] = {}

    def label_of(e: Example) -> Label:
        key = (id(e.instance), e.distinguished)
        if key not in label_cache:
            label_cache[key] = _label(target, e)
        return label_cache[key]

    reports = []
    for t in range(trials):
        trial_seed = f"{seed}/{t}"
        draws = draw_sample(d, n, trial_seed)
        seen = set()
        items = []
        for e in draws:
            key = (id(e.instance), e.distinguished)
            if key in seen:
                continue
            seen.add(key)
            items.append((e, label_of(e)))
        training = LabeledExampleSet(tuple(items))
        oracle = TargetOracle(target)
        start = time.perf_counter()
        if not training.positives():
            # No positive drawn: nothing to generalize from; score the
            # implicit always-negative hypothesis.
            err = sum(
                (w for e, w in d.support if label_of(e) is Label.POSITIVE),
                Fraction(0),
            )
            reports.append(
                TrialReport(trial_seed, n, None, err, 0, time.perf_counter() - start)
            )
            continue
        out = learn_ucq(training, oracle) if ucq else learn_cq(training, oracle)
        err = exact_error(out.hypothesis, target, d)
        reports.append(
            TrialReport(
                trial_seed,
                n,
                out.hypothesis,
                err,
                out.oracle_calls,
                time.perf_counter() - start,
            )
        )
    return reports


def fitting_via_pac(
    examples: LabeledExampleSet,
    learner: Callable[[LabeledExampleSet, MembershipOracle], LearnerOutput],
    oracle_factory: Callable[[], MembershipOracle],
    seed: int = 0,
    delta: float = 0.25,
    epsilon: Optional[float] = None,
    n_bits: Optional[int] = None,
) -> bool:
    """Randomized fitting decision through a PAC learner.

    Draws the Occam-prescribed sample from the uniform distribution on the
    input, runs the learner, and gates on a deterministic fit check: no
    false positives, false negatives only with learner-randomness odds.
    """
    from .fitting import verify_fit

    k = len(examples)
    if epsilon is None:
        epsilon = 1 / (2 * k)
    if n_bits is None:
        # Stand-in for the polynomial size bound on a fitting concept.
        n_bits = 8 * examples.total_size()
    params = PacParams(delta=delta, epsilon=epsilon, n_bits=n_bits)
    d = Distribution.uniform([e for e, _ in examples.items])
    draws = draw_sample(d, sample_size(params), seed)
    label_by_input = {
        (id(e.instance), e.distinguished): lab for e, lab in examples.items
    }
    seen = set()
    items = []
    for e in draws:
        key = (id(e.instance), e.distinguished)
        if key in seen:
            continue
        seen.add(key)
        items.append((e, label_by_input[key]))
    try:
        out = learner(LabeledExampleSet(tuple(items)), oracle_factory())
    except ModelError:
        return False
    return verify_fit(out.hypothesis, examples)

"""Core model: schemas, instances, examples, queries, canonical bridges."""
import pytest
from hypothesis import given, strategies as st

from cqlearn.model import (
    CQ,
    UCQ,
    ArityMismatchError,
    Atom,
    Example,
    Fact,
    IllFormedExampleError,
    Instance,
    Label,
    ModelError,
    Schema,
    SchemaMismatchError,
    atom_count,
    bit_size,
    canonical_cq,
    canonical_instance,
    is_path_cq,
)
from cqlearn.homs import find_homomorphism

from conftest import RP, cq, ex, inst, labeled


class TestSchema:
    def test_duplicate_names_rejected(self):
        with pytest.raises(ModelError):
            Schema((("R", 2), ("R", 1)))

    def test_zero_arity_rejected(self):
        with pytest.raises(ModelError):
            Schema.of({"Q": 0})

    def test_lookup(self):
        assert RP.arity("R") == 2
        assert "P" in RP and "Q" not in RP
        with pytest.raises(SchemaMismatchError):
            RP.arity("Q")


class TestInstance:
    def test_adom(self):
        i = inst("R(a,b)", "P(b)")
        assert i.adom == {"a", "b"}
        assert i.size() == 3

    def test_unknown_relation_rejected(self):
        with pytest.raises(SchemaMismatchError):
            inst("Q(a)")

    def test_arity_violation_rejected(self):
        with pytest.raises(ArityMismatchError):
            inst("R(a)")


class TestExample:
    def test_well_formedness(self):
        i = inst("R(a,b)")
        assert ex(i, "a").is_well_formed
        assert not ex(i, "c").is_well_formed

    def test_size_includes_arity(self):
        assert ex(inst("R(a,b)", "P(b)"), "a").size() == 4

    def test_labeled_set_rejects_ill_formed(self):
        with pytest.raises(IllFormedExampleError):
            labeled((ex(inst("R(a,b)"), "c"), "+"))

    def test_labeled_set_rejects_mixed_arity(self):
        i = inst("R(a,b)")
        with pytest.raises(ArityMismatchError):
            labeled((ex(i, "a"), "+"), (ex(i, "a", "b"), "-"))

    def test_positives_negatives(self):
        i = inst("R(a,b)")
        s = labeled((ex(i, "a"), "+"), (ex(i, "b"), "-"))
        assert len(s.positives()) == 1 and len(s.negatives()) == 1
        assert s.arity == 1 and s.schema == RP


class TestCQ:
    def test_head_var_must_occur_in_body(self):
        with pytest.raises(ModelError):
            cq(("z",), "R(x,y)")

    def test_non_boolean_needs_body(self):
        with pytest.raises(ModelError):
            CQ(("x",), frozenset())

    def test_boolean_empty_body_allowed(self):
        assert CQ((), frozenset()).arity == 0

    def test_ucq_mixed_arity_rejected(self):
        q1 = cq(("x",), "R(x,y)")
        q2 = cq(("x", "y"), "R(x,y)")
        with pytest.raises(ArityMismatchError):
            UCQ((q1, q2))

    def test_ucq_nonempty(self):
        with pytest.raises(ModelError):
            UCQ(())


class TestCanonicalInstance:
    def test_direct_transcription(self):
        q = cq(("x",), "R(x,y)", "P(y)")
        e = canonical_instance(q)
        assert e.instance.facts == {Fact("R", ("x", "y")), Fact("P", ("y",))}
        assert e.distinguished == ("x",)

    def test_boolean_empty_tuple(self):
        e = canonical_instance(cq((), "R(x,x)"))
        assert e.instance.facts == {Fact("R", ("x", "x"))}
        assert e.distinguished == ()

    def test_binary_head(self):
        e = canonical_instance(cq(("x", "y"), "R(x,y)"))
        assert e.distinguished == ("x", "y")


class TestCanonicalCQ:
    def test_direct_transcription(self):
        q = canonical_cq(ex(inst("R(a,b)", "P(b)"), "a"))
        assert q.head == ("x_a",)
        assert q.body == {Atom("R", ("x_a", "x_b")), Atom("P", ("x_b",))}

    def test_repeated_value(self):
        q = canonical_cq(ex(inst("R(a,a)"), "a", "a"))
        assert q.head == ("x_a", "x_a")
        assert q.body == {Atom("R", ("x_a", "x_a"))}

    def test_ill_formed_rejected(self):
        with pytest.raises(IllFormedExampleError):
            canonical_cq(ex(inst("R(a,b)"), "c"))


def _isomorphic(e1: Example, e2: Example) -> bool:
    return (
        find_homomorphism(e1, e2) is not None
        and find_homomorphism(e2, e1) is not None
    )


@st.composite
def small_examples(draw):
    values = ["a", "b", "c", "d"]
    n = draw(st.integers(1, 5))
    facts = set()
    for _ in range(n):
        if draw(st.booleans()):
            facts.add(Fact("R", (draw(st.sampled_from(values)), draw(st.sampled_from(values)))))
        else:
            facts.add(Fact("P", (draw(st.sampled_from(values)),)))
    instance = Instance(RP, frozenset(facts))
    adom = sorted(instance.adom)
    k = draw(st.integers(0, 2))
    tup = tuple(draw(st.sampled_from(adom)) for _ in range(k))
    return Example(instance, tup)


@given(small_examples())
def test_canonical_round_trip_is_isomorphism(e):
    back = canonical_instance(canonical_cq(e), RP)
    assert _isomorphic(e, back)


def test_canonical_round_trip_query_side():
    q = cq(("x",), "R(x,y)", "R(y,z)", "P(z)")
    back = canonical_cq(canonical_instance(q))
    e1, e2 = canonical_instance(q), canonical_instance(back)
    assert _isomorphic(e1, e2)


class TestSizes:
    def test_atom_count(self):
        q = cq(("x",), "R(x,y)", "P(y)")
        assert atom_count(q) == 2
        assert atom_count(UCQ((q, q))) == 4

    def test_monotone_under_adding_atoms(self):
        q1 = cq(("x",), "R(x,y)")
        q2 = cq(("x",), "R(x,y)", "P(y)")
        assert atom_count(q1) < atom_count(q2)
        assert bit_size(q1) < bit_size(q2)


class TestIsPathCQ:
    def test_chain_with_decoration(self):
        assert is_path_cq(cq(("x1",), "R(x1,x2)", "R(x2,x3)", "P(x2)"))

    def test_branching_rejected(self):
        assert not is_path_cq(cq(("x1",), "R(x1,x2)", "R(x1,x3)"))

    def test_length_zero_chain(self):
        assert is_path_cq(cq(("x1",), "P(x1)"))

    def test_cycle_rejected(self):
        assert not is_path_cq(cq(("x1",), "R(x1,x2)", "R(x2,x1)"))

    def test_off_chain_decoration_rejected(self):
        assert not is_path_cq(cq(("x1",), "R(x1,x2)", "P(x3)", "R(x3,x4)"))

    def test_head_must_start_chain(self):
        assert not is_path_cq(cq(("x2",), "R(x1,x2)", "R(x2,x3)"))

    def test_binary_head_rejected(self):
        assert not is_path_cq(cq(("x1", "x2"), "R(x1,x2)"))


def test_label_invert():
    assert ~Label.POSITIVE is Label.NEGATIVE
    assert ~Label.NEGATIVE is Label.POSITIVE

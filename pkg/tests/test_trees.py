"""Tree-shape recognition and the quotient normalization."""
import pytest

from cqlearn.families import random_cq, random_instance, random_tree_instance
from cqlearn.homs import all_answers
from cqlearn.model import ModelError, SchemaMismatchError, Schema, canonical_instance
from cqlearn.trees import check_tree_shaped, is_tree_shaped_cq, quotient_to_tree

from conftest import RP, cq, inst, seeded


class TestCheckTreeShaped:
    def test_path_levels(self):
        witness = check_tree_shaped(inst("R(a,b)", "R(b,c)", "P(b)"))
        assert witness is not None
        assert witness.as_dict() == {"a": 0, "b": 1, "c": 2}

    def test_two_predecessors_rejected(self):
        assert check_tree_shaped(inst("R(a,b)", "R(c,b)")) is None

    def test_self_loop_rejected(self):
        assert check_tree_shaped(inst("R(a,a)")) is None

    def test_long_cycle_rejected(self):
        assert check_tree_shaped(inst("R(a,b)", "R(b,c)", "R(c,a)")) is None

    def test_per_component_levels_start_at_zero(self):
        witness = check_tree_shaped(inst("R(a,b)", "R(c,d)", "R(d,e)"))
        assert witness is not None
        levels = witness.as_dict()
        assert levels["a"] == 0 and levels["c"] == 0
        assert levels["b"] == 1 and levels["e"] == 2

    def test_schema_violation(self):
        schema = Schema.of({"R": 2, "S": 2})
        with pytest.raises(SchemaMismatchError):
            check_tree_shaped(inst("R(a,b)", schema=schema))

    def test_isolated_unary_values(self):
        witness = check_tree_shaped(inst("P(a)", "P(b)"))
        assert witness is not None
        assert witness.as_dict() == {"a": 0, "b": 0}


class TestQuotientToTree:
    def test_shared_second_argument_merges_sources(self):
        result = quotient_to_tree(cq(("x",), "R(x,y)", "R(z,y)", "P(z)"))
        assert not result.unsatisfiable_on_trees
        assert result.query == cq(("x",), "R(x,y)", "P(x)")

    def test_directed_cycle_unsatisfiable(self):
        result = quotient_to_tree(cq(("x",), "R(x,y)", "R(y,x)"))
        assert result.unsatisfiable_on_trees

    def test_tree_shaped_query_unchanged(self):
        q = cq(("x",), "R(x,y)", "R(y,z)", "P(z)")
        result = quotient_to_tree(q)
        assert result.query == q

    def test_boolean_query_supported(self):
        result = quotient_to_tree(cq((), "R(x,y)", "R(z,y)"))
        assert result.query == cq((), "R(x,y)")

    def test_binary_head_rejected(self):
        with pytest.raises(ModelError):
            quotient_to_tree(cq(("x", "y"), "R(x,y)"))

    def test_output_canonical_instance_is_tree_shaped(self):
        rng = seeded("quotient-tree")
        for _ in range(300):
            q = random_cq(rng, RP, rng.randint(1, 6), 1)
            result = quotient_to_tree(q)
            if result.unsatisfiable_on_trees:
                continue
            assert check_tree_shaped(canonical_instance(result.query).instance) is not None
            assert result.witness is not None

    def test_never_increases_atom_count(self):
        rng = seeded("quotient-size")
        for _ in range(300):
            q = random_cq(rng, RP, rng.randint(1, 6), 1)
            result = quotient_to_tree(q)
            if result.query is not None:
                assert len(result.query.body) <= len(q.body)


class TestQuotientSoundness:
    def test_answers_preserved_on_tree_instances(self):
        rng = seeded("quotient-sound-small")
        for _ in range(60):
            q = random_cq(rng, RP, rng.randint(1, 5), 1)
            result = quotient_to_tree(q)
            for _ in range(5):
                instance = random_tree_instance(rng, rng.randint(2, 6))
                if result.unsatisfiable_on_trees:
                    assert all_answers(q, instance) == set()
                else:
                    assert all_answers(q, instance) == all_answers(result.query, instance)

    def test_quotient_answers_subset_on_arbitrary_instances(self):
        rng = seeded("quotient-subset-small")
        for _ in range(60):
            q = random_cq(rng, RP, rng.randint(1, 5), 1)
            result = quotient_to_tree(q)
            if result.unsatisfiable_on_trees:
                continue
            instance = random_instance(rng, RP, 5, 8)
            assert all_answers(result.query, instance) <= all_answers(q, instance)


def test_is_tree_shaped_cq():
    assert is_tree_shaped_cq(cq(("x",), "R(x,y)", "P(y)"))
    assert not is_tree_shaped_cq(cq(("x",), "R(x,y)", "R(z,y)"))

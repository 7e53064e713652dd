"""Text formats: instances, queries, example sets, DIMACS, oracle protocol."""
import io

import pytest

from cqlearn.families import CnfFormula, gen_cnf_reduction
from cqlearn.model import UCQ, Fact, Label, Schema
from cqlearn.textio import (
    ParseError,
    parse_dimacs,
    parse_example_set,
    parse_instance,
    parse_query,
    read_example_request,
    serialize_cq,
    serialize_example_set,
    serialize_fact,
    serialize_instance,
    serialize_query,
    serialize_ucq,
    split_args,
    write_example_request,
)

from conftest import RP, cq, ex, inst


class TestSplitArgs:
    def test_plain(self):
        assert split_args("a, b ,c") == ("a", "b", "c")

    def test_product_values_stay_whole(self):
        assert split_args("<a,b>,c") == ("<a,b>", "c")
        assert split_args("<<a,b>,c>,<d,e>") == ("<<a,b>,c>", "<d,e>")

    def test_unbalanced_rejected(self):
        with pytest.raises(ParseError):
            split_args("<a,b")
        with pytest.raises(ParseError):
            split_args("a>,b")

    def test_bad_identifier_rejected(self):
        with pytest.raises(ParseError):
            split_args("a, ,b")
        with pytest.raises(ParseError):
            split_args("a b")


class TestInstanceFormat:
    def test_round_trip(self):
        i = inst("R(a,b)", "P(b)")
        assert parse_instance(serialize_instance(i)) == i

    def test_two_facts_one_line(self):
        i = parse_instance("R(a,b). P(b).")
        assert i.facts == {Fact("R", ("a", "b")), Fact("P", ("b",))}

    def test_declared_schema(self):
        i = parse_instance("rel R/2\nrel Q/1\nR(a,b).")
        assert i.schema == Schema.of({"R": 2, "Q": 1})

    def test_comments_ignored(self):
        i = parse_instance("# header\nR(a,b).  # trailing\n")
        assert i.facts == {Fact("R", ("a", "b"))}

    def test_bad_fact_rejected(self):
        with pytest.raises(ParseError) as err:
            parse_instance("R(a,b)")
        assert err.value.line == 1

    def test_empty_without_schema_rejected(self):
        with pytest.raises(ParseError):
            parse_instance("# nothing\n")

    def test_serialize_declares_schema_on_request(self):
        text = serialize_instance(inst("R(a,b)"), declare_schema=True)
        assert "rel P/1" in text and "rel R/2" in text


class TestQueryFormat:
    def test_round_trip(self):
        text = "q(x) :- R(x,y), P(y)."
        q = parse_query(text)
        assert q == cq(("x",), "R(x,y)", "P(y)")
        assert parse_query(serialize_cq(q)) == q

    def test_boolean_query(self):
        q = parse_query("q() :- R(x,x).")
        assert q.arity == 0

    def test_ucq_multiple_rules(self):
        q = parse_query("q(x) :- P(x).\nq(x) :- R(x,x).")
        assert isinstance(q, UCQ) and len(q.disjuncts) == 2
        assert parse_query(serialize_ucq(q)) == q

    def test_mixed_head_names_rejected(self):
        with pytest.raises(ParseError):
            parse_query("q(x) :- P(x).\nr(x) :- P(x).")

    def test_no_rules_rejected(self):
        with pytest.raises(ParseError):
            parse_query("# empty\n")

    def test_serialize_query_dispatch(self):
        q = cq(("x",), "P(x)")
        assert serialize_query(q) == serialize_cq(q)
        u = UCQ((q,))
        assert serialize_query(u) == serialize_ucq(u)

    def test_product_variables_round_trip(self):
        q = parse_query("q(x_<a,c>) :- R(x_<a,c>,x_<b,d>), P(x_<b,d>).")
        assert q.head == ("x_<a,c>",)
        assert parse_query(serialize_cq(q)) == q


class TestExampleSetFormat:
    def test_parse_blocks_and_labels(self):
        text = (
            "instance I0 {\n  R(a,b).\n  P(b).\n}\n"
            "instance I1 {\n  R(c,c).\n}\n"
            "+ I0 (a)\n- I1 (c)\n"
        )
        ws = parse_example_set(text)
        examples = ws.labeled_set()
        assert len(examples) == 2
        assert examples.items[0][1] is Label.POSITIVE
        assert examples.items[1][0].distinguished == ("c",)
        # One merged schema across blocks.
        assert examples.items[1][0].instance.schema == RP

    def test_round_trip(self):
        i = inst("R(a,b)", "P(b)")
        examples = ex(i, "a"), ex(i, "b")
        from conftest import labeled

        original = labeled((examples[0], "+"), (examples[1], "-"))
        text = serialize_example_set(original)
        back = parse_example_set(text).labeled_set()
        assert back == original

    def test_unknown_reference_rejected(self):
        with pytest.raises(ParseError):
            parse_example_set("+ I9 (a)\n").labeled_set()

    def test_unterminated_block_rejected(self):
        with pytest.raises(ParseError):
            parse_example_set("instance I0 {\nR(a,b).\n")

    def test_duplicate_block_rejected(self):
        text = "instance I0 {\nR(a,b).\n}\ninstance I0 {\nP(a).\n}\n"
        with pytest.raises(ParseError):
            parse_example_set(text)

    def test_conflicting_arities_rejected(self):
        text = "instance I0 {\nR(a,b).\n}\ninstance I1 {\nR(a).\n}\n"
        with pytest.raises(ParseError):
            parse_example_set(text)

    def test_generator_output_round_trips(self):
        phi = CnfFormula(2, ((1,), (2,), (-1, 2)))
        _, examples = gen_cnf_reduction(phi)
        back = parse_example_set(serialize_example_set(examples)).labeled_set()
        assert len(back) == len(examples)
        for (e1, l1), (e2, l2) in zip(examples.items, back.items):
            assert e1.instance.facts == e2.instance.facts
            assert e1.distinguished == e2.distinguished
            assert l1 is l2


class TestDimacs:
    def test_standard_input(self):
        phi = parse_dimacs("c comment\np cnf 2 2\n1 -2 0\n2 0\n")
        assert phi == CnfFormula(2, ((1, -2), (2,)))

    def test_missing_header_rejected(self):
        with pytest.raises(ParseError):
            parse_dimacs("1 2 0\n")

    def test_unterminated_clause_rejected(self):
        with pytest.raises(ParseError):
            parse_dimacs("p cnf 2 1\n1 2\n")

    def test_bad_token_rejected(self):
        with pytest.raises(ParseError):
            parse_dimacs("p cnf 2 1\n1 x 0\n")


class TestOracleProtocol:
    def test_request_round_trip(self):
        e = ex(inst("R(a,b)", "P(b)"), "a")
        buf = io.StringIO()
        write_example_request(buf, e)
        buf.seek(0)
        back = read_example_request(buf)
        assert back.instance.facts == e.instance.facts
        assert back.distinguished == e.distinguished

    def test_quit_sentinel(self):
        assert read_example_request(io.StringIO("quit\n")) is None

    def test_end_of_stream(self):
        assert read_example_request(io.StringIO("")) is None

    def test_empty_instance_request(self):
        buf = io.StringIO("* (a).\n\n")
        back = read_example_request(buf)
        assert back.instance.facts == frozenset()
        assert back.distinguished == ("a",)

    def test_missing_tuple_rejected(self):
        with pytest.raises(ParseError):
            read_example_request(io.StringIO("R(a,b).\n\n"))

    def test_serialized_facts_one_per_line(self):
        e = ex(inst("R(a,b)", "P(b)"), "a")
        buf = io.StringIO()
        write_example_request(buf, e)
        lines = buf.getvalue().splitlines()
        assert lines[-2] == "* (a)."
        assert lines[-1] == ""


def test_serialize_fact():
    assert serialize_fact(Fact("R", ("a", "b"))) == "R(a,b)."

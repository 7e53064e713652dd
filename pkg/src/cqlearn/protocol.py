"""External membership-oracle plug-in boundary over text streams.

The learner side writes one serialized example per request terminated by a
blank line; the oracle side replies `+` or `-`; a `quit` sentinel ends the
session.  Language-neutral: any process speaking the protocol can serve as
the oracle.
"""
from __future__ import annotations

import subprocess
from typing import TextIO

from .homs import evaluate, evaluate_ucq
from .learn import MembershipOracle
from .model import Example, Instance, Label, Query, Schema, UCQ
from .textio import (
    ParseError,
    QUIT_SENTINEL,
    read_example_request,
    write_example_request,
)


class StreamOracle(MembershipOracle):
    """Membership oracle speaking the stdio protocol over a stream pair."""

    def __init__(self, to_oracle: TextIO, from_oracle: TextIO):
        super().__init__()
        self.to_oracle = to_oracle
        self.from_oracle = from_oracle

    def _answer(self, e: Example) -> Label:
        write_example_request(self.to_oracle, e)
        reply = self.from_oracle.readline().strip()
        if reply == "+":
            return Label.POSITIVE
        if reply == "-":
            return Label.NEGATIVE
        raise ParseError(f"oracle replied {reply!r}, expected '+' or '-'")

    def close(self) -> None:
        try:
            self.to_oracle.write(QUIT_SENTINEL + "\n")
            self.to_oracle.flush()
        except (BrokenPipeError, ValueError):
            pass


class SubprocessOracle(StreamOracle):
    """Runs an oracle command and speaks the protocol over its stdio."""

    def __init__(self, command: list[str]):
        self.process = subprocess.Popen(
            command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
        )
        super().__init__(self.process.stdin, self.process.stdout)

    def close(self) -> None:
        super().close()
        self.process.wait(timeout=10)


def serve_oracle(target: Query, inp: TextIO, out: TextIO) -> int:
    """Answer protocol requests by evaluating a target query; returns the
    number of requests served."""
    served = 0
    while True:
        e = read_example_request(inp)
        if e is None:
            return served
        e = _with_target_schema(e, target)
        if isinstance(target, UCQ):
            label = evaluate_ucq(target, e)
        else:
            label = evaluate(target, e)
        out.write(label.value + "\n")
        out.flush()
        served += 1


def _with_target_schema(e: Example, target: Query) -> Example:
    """Extend the request's inferred schema with the target's relations so
    evaluation never sees an unknown relation."""
    merged = {r: a for r, a in e.instance.schema.relations}
    disjuncts = target.disjuncts if isinstance(target, UCQ) else (target,)
    for q in disjuncts:
        for r, a in q.inferred_schema().relations:
            merged.setdefault(r, a)
    schema = Schema.of(merged)
    if schema == e.instance.schema:
        return e
    return Example(Instance(schema, e.instance.facts), e.distinguished)

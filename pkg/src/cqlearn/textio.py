"""Text formats: instances, queries, example sets, DIMACS CNF, and the
line-oriented membership-oracle protocol.

Identifiers match [A-Za-z0-9_<>,]+ with commas and angle brackets reserved
for product values; argument lists split on top-level commas only.
Serialization is canonical: facts and atoms in sorted order.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, TextIO, Union

from .model import (
    CQ,
    UCQ,
    Atom,
    Example,
    Fact,
    Instance,
    Label,
    LabeledExampleSet,
    Schema,
)
from .families import CnfFormula


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


_IDENT = r"[A-Za-z0-9_<>,]+"
_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_FACT_RE = re.compile(rf"^({_NAME})\((.*)\)\.$")
_REL_RE = re.compile(rf"^rel\s+({_NAME})/([0-9]+)$")
_RULE_RE = re.compile(rf"^({_NAME})\((.*?)\)\s*(?::-\s*(.*))?\.$")
_LABELED_RE = re.compile(rf"^([+-])\s+({_NAME})\s*\((.*)\)$")


def split_args(text: str, line: Optional[int] = None) -> tuple[str, ...]:
    """Split an argument list on commas outside angle brackets."""
    text = text.strip()
    if not text:
        return ()
    args = []
    depth = 0
    start = 0
    for i, c in enumerate(text):
        if c == "<":
            depth += 1
        elif c == ">":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced '>' in argument list", line)
        elif c == "," and depth == 0:
            args.append(text[start:i].strip())
            start = i + 1
    if depth != 0:
        raise ParseError("unbalanced '<' in argument list", line)
    args.append(text[start:].strip())
    for a in args:
        if not a or not re.fullmatch(_IDENT, a):
            raise ParseError(f"bad identifier {a!r}", line)
    return tuple(args)


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_instance(text: str, schema: Optional[Schema] = None) -> Instance:
    """Fact lines `NAME(id,...).` with optional `rel NAME/ARITY` declarations.

    The schema is inferred from the facts when not declared.
    """
    declared: dict[str, int] = {}
    facts: list[Fact] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        m = _REL_RE.match(line)
        if m:
            declared[m.group(1)] = int(m.group(2))
            continue
        # Several period-terminated facts may share a line.
        if not line.endswith("."):
            raise ParseError(f"fact line must end with '.': {line!r}", lineno)
        for chunk in line.split("."):
            chunk = chunk.strip()
            if not chunk:
                continue
            m = _FACT_RE.match(chunk + ".")
            if not m:
                raise ParseError(f"cannot parse {chunk!r}", lineno)
            facts.append(Fact(m.group(1), split_args(m.group(2), lineno)))
    if schema is None:
        inferred = dict(declared)
        for f in facts:
            inferred.setdefault(f.relation, len(f.args))
        if not inferred:
            raise ParseError("empty instance with no schema declarations")
        schema = Schema.of(inferred)
    return Instance(schema, frozenset(facts))


def serialize_fact(f: Fact) -> str:
    return f"{f.relation}({','.join(f.args)})."


def serialize_instance(instance: Instance, declare_schema: bool = False) -> str:
    lines = []
    if declare_schema:
        lines.extend(f"rel {r}/{a}" for r, a in instance.schema.relations)
    lines.extend(serialize_fact(f) for f in instance.sorted_facts)
    return "\n".join(lines) + "\n"


def _parse_atom(text: str, lineno: int) -> Atom:
    m = re.fullmatch(rf"({_NAME})\((.*)\)", text.strip())
    if not m:
        raise ParseError(f"cannot parse atom {text!r}", lineno)
    return Atom(m.group(1), split_args(m.group(2), lineno))


def _split_atoms(body: str, lineno: int) -> list[str]:
    """Split a rule body on commas outside parentheses and angle brackets."""
    parts = []
    depth = 0
    start = 0
    for i, c in enumerate(body):
        if c in "(<":
            depth += 1
        elif c in ")>":
            depth -= 1
        elif c == "," and depth == 0:
            parts.append(body[start:i])
            start = i + 1
    parts.append(body[start:])
    return [p for p in (s.strip() for s in parts) if p]


def parse_query(text: str) -> Union[CQ, UCQ]:
    """Datalog-style rules; several rules with one head name form a UCQ."""
    rules: list[tuple[str, CQ]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        m = _RULE_RE.match(line)
        if not m:
            raise ParseError(f"cannot parse rule {line!r}", lineno)
        name, head_text, body_text = m.groups()
        head = split_args(head_text, lineno) if head_text.strip() else ()
        atoms = (
            [_parse_atom(a, lineno) for a in _split_atoms(body_text, lineno)]
            if body_text
            else []
        )
        rules.append((name, CQ(head, frozenset(atoms))))
    if not rules:
        raise ParseError("no rules found")
    names = {name for name, _ in rules}
    if len(names) > 1:
        raise ParseError(f"rules with different head names: {sorted(names)}")
    if len(rules) == 1:
        return rules[0][1]
    return UCQ(tuple(q for _, q in rules))


def serialize_cq(q: CQ, name: str = "q") -> str:
    head = f"{name}({','.join(q.head)})"
    if not q.body:
        return f"{head}."
    body = ", ".join(f"{a.relation}({','.join(a.args)})" for a in q.sorted_body)
    return f"{head} :- {body}."


def serialize_ucq(u: UCQ, name: str = "q") -> str:
    return "\n".join(serialize_cq(q, name) for q in u.disjuncts)


def serialize_query(q: Union[CQ, UCQ], name: str = "q") -> str:
    return serialize_ucq(q, name) if isinstance(q, UCQ) else serialize_cq(q, name)


@dataclass
class Workspace:
    """Named instances plus labeled example references."""

    instances: dict[str, Instance] = field(default_factory=dict)
    items: list[tuple[str, tuple[str, ...], Label]] = field(default_factory=list)

    def labeled_set(self) -> LabeledExampleSet:
        out = []
        for name, tup, lab in self.items:
            if name not in self.instances:
                raise ParseError(f"labeled example references unknown instance {name!r}")
            out.append((Example(self.instances[name], tup), lab))
        return LabeledExampleSet(tuple(out))


def parse_example_set(text: str) -> Workspace:
    """`instance NAME { facts }` blocks followed by `+ NAME (tuple)` lines."""
    ws = Workspace()
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        line = _strip(lines[i])
        lineno = i + 1
        if not line:
            i += 1
            continue
        m = re.match(rf"^instance\s+({_NAME})\s*\{{$", line)
        if m:
            name = m.group(1)
            if name in ws.instances:
                raise ParseError(f"duplicate instance {name!r}", lineno)
            block = []
            i += 1
            while i < len(lines) and _strip(lines[i]) != "}":
                block.append(lines[i])
                i += 1
            if i == len(lines):
                raise ParseError(f"unterminated instance block {name!r}", lineno)
            ws.instances[name] = parse_instance("\n".join(block))
            i += 1
            continue
        m = _LABELED_RE.match(line)
        if m:
            sign, name, args = m.groups()
            lab = Label.POSITIVE if sign == "+" else Label.NEGATIVE
            ws.items.append((name, split_args(args, lineno), lab))
            i += 1
            continue
        raise ParseError(f"cannot parse {line!r}", lineno)
    # Re-validate against one shared schema across blocks.
    if len(ws.instances) > 1:
        merged: dict[str, int] = {}
        for inst in ws.instances.values():
            for r, a in inst.schema.relations:
                if merged.setdefault(r, a) != a:
                    raise ParseError(f"relation {r!r} used with two arities")
        schema = Schema.of(merged)
        ws.instances = {
            n: Instance(schema, inst.facts) for n, inst in ws.instances.items()
        }
    return ws


def serialize_example_set(examples: LabeledExampleSet) -> str:
    names: dict[int, str] = {}
    blocks = []
    refs = []
    for e, lab in examples.items:
        key = id(e.instance)
        if key not in names:
            name = f"I{len(names)}"
            names[key] = name
            body = "\n".join("  " + serialize_fact(f) for f in e.instance.sorted_facts)
            blocks.append(f"instance {name} {{\n{body}\n}}")
        refs.append(f"{lab.value} {names[key]} ({','.join(e.distinguished)})")
    return "\n".join(blocks + refs) + "\n"


def parse_dimacs(text: str) -> CnfFormula:
    """Standard `p cnf VARS CLAUSES` header, clause lines terminated by 0."""
    num_vars = None
    clauses: list[tuple[int, ...]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"bad problem line {line!r}", lineno)
            num_vars = int(parts[2])
            continue
        try:
            lits = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"bad clause line {line!r}", lineno) from None
        if not lits or lits[-1] != 0:
            raise ParseError("clause line must end with 0", lineno)
        clauses.append(tuple(lits[:-1]))
    if num_vars is None:
        raise ParseError("missing 'p cnf' header")
    return CnfFormula(num_vars, tuple(clauses))


# --- membership-oracle stdio protocol ---------------------------------------
#
# Request: the example's facts, one per line, then `* (tuple).`, then a blank
# line.  Response: a single `+` or `-` line.  `quit` ends the session.

QUIT_SENTINEL = "quit"
_TUPLE_RE = re.compile(r"^\*\s*\((.*)\)\.$")


def serialize_example_block(e: Example) -> str:
    lines = [serialize_fact(f) for f in e.instance.sorted_facts]
    lines.append(f"* ({','.join(e.distinguished)}).")
    return "\n".join(lines)


def write_example_request(stream: TextIO, e: Example) -> None:
    stream.write(serialize_example_block(e) + "\n\n")
    stream.flush()


def read_example_request(stream: TextIO) -> Optional[Example]:
    """Read one request block; None on `quit` or end of stream."""
    fact_lines: list[str] = []
    tup: Optional[tuple[str, ...]] = None
    while True:
        raw = stream.readline()
        if raw == "":
            return None
        line = raw.strip()
        if line == QUIT_SENTINEL:
            return None
        if not line:
            if tup is None and not fact_lines:
                continue  # stray blank line
            break
        m = _TUPLE_RE.match(line)
        if m:
            tup = split_args(m.group(1))
        else:
            fact_lines.append(line)
    if tup is None:
        raise ParseError("request block without a distinguished tuple")
    if fact_lines:
        instance = parse_instance("\n".join(fact_lines))
    else:
        instance = Instance(Schema.of({}), frozenset())
    return Example(instance, tup)

"""Object-selection DSL: AST, concrete grammar, evaluator, and metrics.

Programs have the fixed shape Apply(action, objects). Predicates are
boolean combinations of membership tests over attribute values; a clause
synthesized for one class carries a ``class(...)`` guard conjunct so that
evaluation is total over heterogeneous objects (the guard short-circuits to
false on other classes). The concrete grammar is ASCII:

    Program  := "Apply(" Action "," Objects ")"
    Action   := "Cover(" Effect ")" | "Remove" | "Recolor(" Color ")"
              | "Inpaint(" QuotedString ")"
    Objects  := "All" | "Filter(" Pred "," Objects ")"
    Pred     := "true" | "false" | "class(" Ident ")"
              | "x." Ident ("in"|"notin") ValueSet
              | Pred "&&" Pred | Pred "||" Pred | "!" Pred | "(" Pred ")"
    ValueSet := "{" Ident ("," Ident)* "}" | Interval ("u" Interval)*

Intervals use [ / ( and ] / ) exactly; unions join pieces with "u".
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .dataset import Dataset, Number, ObjectRecord, Specification
from .errors import ProgramParseError, UnknownNameError
from .lattice import CategoricalComponent, LatticeContext, LatticeElement
from .errors import LatticeDomainError

COVER_EFFECTS = ("Highlight", "Blackout", "Blur", "Mosaic")
_COLOR = re.compile(r"#[0-9a-fA-F]{6}\Z")


# --- predicate AST ---------------------------------------------------------


@dataclass(frozen=True)
class TruePred:
    pass


@dataclass(frozen=True)
class FalsePred:
    pass


@dataclass(frozen=True)
class ClassIs:
    class_name: str


@dataclass(frozen=True)
class Interval:
    lo: Number
    lo_closed: bool
    hi: Number
    hi_closed: bool

    def __post_init__(self):
        if self.lo > self.hi:
            raise LatticeDomainError(f"interval with lo > hi: {self}")
        if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
            raise LatticeDomainError(f"degenerate interval must be closed: {self}")

    def contains(self, v: Number) -> bool:
        above = self.lo < v or (self.lo_closed and v == self.lo)
        below = v < self.hi or (self.hi_closed and v == self.hi)
        return above and below

    def strictly_before(self, other: "Interval") -> bool:
        if self.hi < other.lo:
            return True
        return self.hi == other.lo and not (self.hi_closed and other.lo_closed)


@dataclass(frozen=True)
class SymbolSet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        if not self.symbols:
            raise LatticeDomainError("empty symbol set")
        if len(set(self.symbols)) != len(self.symbols):
            raise LatticeDomainError(f"duplicate symbols in {self.symbols}")


@dataclass(frozen=True)
class IntervalUnion:
    intervals: tuple[Interval, ...]

    def __post_init__(self):
        if not self.intervals:
            raise LatticeDomainError("empty interval union")
        for a, b in zip(self.intervals, self.intervals[1:]):
            if not a.strictly_before(b):
                raise LatticeDomainError(f"interval union not disjoint/sorted: {self.intervals}")

    def contains(self, v: Number) -> bool:
        return any(piece.contains(v) for piece in self.intervals)


Values = Union[SymbolSet, IntervalUnion]


@dataclass(frozen=True)
class Membership:
    attribute: str
    negated: bool
    values: Values


@dataclass(frozen=True)
class And:
    left: "Predicate"
    right: "Predicate"


@dataclass(frozen=True)
class Or:
    left: "Predicate"
    right: "Predicate"


@dataclass(frozen=True)
class Not:
    inner: "Predicate"


Predicate = Union[TruePred, FalsePred, ClassIs, Membership, And, Or, Not]


# --- actions, object selectors, programs ------------------------------------


@dataclass(frozen=True)
class Cover:
    effect: str

    def __post_init__(self):
        if self.effect not in COVER_EFFECTS:
            raise LatticeDomainError(f"unknown cover effect {self.effect!r}")


@dataclass(frozen=True)
class Remove:
    pass


@dataclass(frozen=True)
class Recolor:
    color: str

    def __post_init__(self):
        if not _COLOR.match(self.color):
            raise LatticeDomainError(f"color {self.color!r} is not #RRGGBB")


@dataclass(frozen=True)
class Inpaint:
    prompt: str

    def __post_init__(self):
        if not self.prompt:
            raise LatticeDomainError("inpaint prompt must be non-empty")


Action = Union[Cover, Remove, Recolor, Inpaint]


@dataclass(frozen=True)
class AllObjects:
    pass


@dataclass(frozen=True)
class Filter:
    predicate: Predicate
    inner: "Objects"


Objects = Union[AllObjects, Filter]


@dataclass(frozen=True)
class Program:
    action: Action
    objects: Objects


@dataclass(frozen=True)
class EditPlan:
    """Evaluated program: (object id, action) pairs in dataset order."""

    entries: tuple[tuple[str, Action], ...]

    @property
    def object_ids(self) -> tuple[str, ...]:
        return tuple(oid for oid, _ in self.entries)

    def to_json(self) -> str:
        return json.dumps(
            [{"object": oid, "action": action_to_dict(act)} for oid, act in self.entries]
        )


@dataclass(frozen=True)
class ProgramMetrics:
    ast_size: int
    count_and: int
    count_or: int
    count_in: int
    count_notin: int


@dataclass(frozen=True)
class CorrectnessVerdict:
    ok: bool
    missing_positives: tuple[str, ...]
    selected_negatives: tuple[str, ...]


def action_to_dict(action: Action) -> dict:
    if isinstance(action, Remove):
        return {"op": "Remove"}
    if isinstance(action, Cover):
        return {"op": "Cover", "effect": action.effect}
    if isinstance(action, Recolor):
        return {"op": "Recolor", "color": action.color}
    if isinstance(action, Inpaint):
        return {"op": "Inpaint", "prompt": action.prompt}
    raise TypeError(f"not an action: {action!r}")


def action_from_dict(data: dict) -> Action:
    op = data.get("op")
    if op == "Remove":
        return Remove()
    if op == "Cover":
        return Cover(data["effect"])
    if op == "Recolor":
        return Recolor(data["color"])
    if op == "Inpaint":
        return Inpaint(data["prompt"])
    raise LatticeDomainError(f"unknown action {data!r}")


# --- printing ---------------------------------------------------------------


def _fmt_num(x: Number) -> str:
    if isinstance(x, bool):
        raise LatticeDomainError("booleans are not DSL numbers")
    if isinstance(x, int):
        return str(x)
    return repr(x)


def _print_interval(iv: Interval) -> str:
    left = "[" if iv.lo_closed else "("
    right = "]" if iv.hi_closed else ")"
    return f"{left}{_fmt_num(iv.lo)}, {_fmt_num(iv.hi)}{right}"


def _print_values(values: Values) -> str:
    if isinstance(values, SymbolSet):
        return "{" + ", ".join(values.symbols) + "}"
    return " u ".join(_print_interval(iv) for iv in values.intervals)


# precedence levels: Or=0, And=1, Not=2, atoms=3
def _pred_level(pred: Predicate) -> int:
    if isinstance(pred, Or):
        return 0
    if isinstance(pred, And):
        return 1
    if isinstance(pred, Not):
        return 2
    return 3


def print_predicate(pred: Predicate, min_level: int = 0) -> str:
    level = _pred_level(pred)
    if isinstance(pred, TruePred):
        text = "true"
    elif isinstance(pred, FalsePred):
        text = "false"
    elif isinstance(pred, ClassIs):
        text = f"class({pred.class_name})"
    elif isinstance(pred, Membership):
        op = "notin" if pred.negated else "in"
        text = f"x.{pred.attribute} {op} {_print_values(pred.values)}"
    elif isinstance(pred, Not):
        text = "!" + print_predicate(pred.inner, 3)
    elif isinstance(pred, And):
        text = print_predicate(pred.left, 1) + " && " + print_predicate(pred.right, 2)
    elif isinstance(pred, Or):
        text = print_predicate(pred.left, 0) + " || " + print_predicate(pred.right, 1)
    else:
        raise TypeError(f"not a predicate: {pred!r}")
    if level < min_level:
        return "(" + text + ")"
    return text


def print_action(action: Action) -> str:
    if isinstance(action, Remove):
        return "Remove"
    if isinstance(action, Cover):
        return f"Cover({action.effect})"
    if isinstance(action, Recolor):
        return f"Recolor({action.color})"
    if isinstance(action, Inpaint):
        escaped = action.prompt.replace("\\", "\\\\").replace('"', '\\"')
        return f'Inpaint("{escaped}")'
    raise TypeError(f"not an action: {action!r}")


def _print_objects(objects: Objects) -> str:
    if isinstance(objects, AllObjects):
        return "All"
    return f"Filter({print_predicate(objects.predicate)}, {_print_objects(objects.inner)})"


def print_program(program: Program) -> str:
    """Canonical text: single spaces, explicit parens only where precedence
    requires them; parse_program inverts it exactly."""
    return f"Apply({print_action(program.action)}, {_print_objects(program.objects)})"


# --- parsing ----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<color>\#[0-9a-fA-F]{6})
  | (?P<number>-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<op>&&|\|\||[()\[\]{},.!])
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ProgramParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.next()
        if val != value:
            raise ProgramParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def expect_kind(self, kind: str):
        k, val, pos = self.next()
        if k != kind:
            raise ProgramParseError(f"expected {kind}, found {val or 'end of input'!r}", pos)
        return val

    def at_end(self):
        return self.peek()[0] == "eof"

    # Program := Apply(Action, Objects)
    def program(self) -> Program:
        self.expect("Apply")
        self.expect("(")
        action = self.action()
        self.expect(",")
        objects = self.objects()
        self.expect(")")
        if not self.at_end():
            _, val, pos = self.peek()
            raise ProgramParseError(f"trailing input {val!r}", pos)
        return Program(action, objects)

    def action(self) -> Action:
        kind, val, pos = self.next()
        if val == "Remove":
            return Remove()
        if val == "Cover":
            self.expect("(")
            effect = self.expect_kind("ident")
            if effect not in COVER_EFFECTS:
                raise ProgramParseError(f"unknown cover effect {effect!r}", pos)
            self.expect(")")
            return Cover(effect)
        if val == "Recolor":
            self.expect("(")
            color = self.expect_kind("color")
            self.expect(")")
            return Recolor(color)
        if val == "Inpaint":
            self.expect("(")
            raw = self.expect_kind("string")
            self.expect(")")
            prompt = _unquote(raw)
            if not prompt:
                raise ProgramParseError("inpaint prompt must be non-empty", pos)
            return Inpaint(prompt)
        raise ProgramParseError(f"expected an action, found {val!r}", pos)

    def objects(self) -> Objects:
        kind, val, pos = self.next()
        if val == "All":
            return AllObjects()
        if val == "Filter":
            self.expect("(")
            pred = self.predicate()
            self.expect(",")
            inner = self.objects()
            self.expect(")")
            return Filter(pred, inner)
        raise ProgramParseError(f"expected All or Filter, found {val!r}", pos)

    # precedence climbing: or-level > and-level > unary
    def predicate(self) -> Predicate:
        return self.or_level()

    def or_level(self) -> Predicate:
        left = self.and_level()
        while self.peek()[1] == "||":
            self.next()
            left = Or(left, self.and_level())
        return left

    def and_level(self) -> Predicate:
        left = self.unary()
        while self.peek()[1] == "&&":
            self.next()
            left = And(left, self.unary())
        return left

    def unary(self) -> Predicate:
        kind, val, pos = self.peek()
        if val == "!":
            self.next()
            return Not(self.unary())
        if val == "(":
            self.next()
            inner = self.predicate()
            self.expect(")")
            return inner
        return self.atom()

    def atom(self) -> Predicate:
        kind, val, pos = self.next()
        if val == "true":
            return TruePred()
        if val == "false":
            return FalsePred()
        if val == "class":
            self.expect("(")
            name = self.expect_kind("ident")
            self.expect(")")
            return ClassIs(name)
        if val == "x":
            self.expect(".")
            attr = self.expect_kind("ident")
            okind, oval, opos = self.next()
            if oval not in ("in", "notin"):
                raise ProgramParseError(f"expected in/notin, found {oval!r}", opos)
            return Membership(attr, oval == "notin", self.value_set())
        raise ProgramParseError(f"expected a predicate, found {val or 'end of input'!r}", pos)

    def value_set(self) -> Values:
        kind, val, pos = self.peek()
        try:
            if val == "{":
                self.next()
                symbols = [self.expect_kind("ident")]
                while self.peek()[1] == ",":
                    self.next()
                    symbols.append(self.expect_kind("ident"))
                self.expect("}")
                return SymbolSet(tuple(symbols))
            if val in ("[", "("):
                pieces = [self.interval()]
                while self.peek()[1] == "u":
                    self.next()
                    pieces.append(self.interval())
                return IntervalUnion(tuple(pieces))
        except LatticeDomainError as exc:
            raise ProgramParseError(str(exc), pos)
        raise ProgramParseError(f"expected a value set, found {val!r}", pos)

    def interval(self) -> Interval:
        kind, val, pos = self.next()
        if val not in ("[", "("):
            raise ProgramParseError(f"expected [ or (, found {val!r}", pos)
        lo_closed = val == "["
        lo = self.number()
        self.expect(",")
        hi = self.number()
        kind, val, pos = self.next()
        if val not in ("]", ")"):
            raise ProgramParseError(f"expected ] or ), found {val!r}", pos)
        try:
            return Interval(lo, lo_closed, hi, val == "]")
        except LatticeDomainError as exc:
            raise ProgramParseError(str(exc), pos)

    def number(self) -> Number:
        raw = self.expect_kind("number")
        if "." in raw or "e" in raw or "E" in raw:
            return float(raw)
        return int(raw)


def _unquote(raw: str) -> str:
    out = []
    i = 1
    while i < len(raw) - 1:
        c = raw[i]
        if c == "\\":
            i += 1
            c = raw[i]
        out.append(c)
        i += 1
    return "".join(out)


def parse_program(text: str, dataset: Optional[Dataset] = None) -> Program:
    """Parse program text; with a dataset, validate referenced names."""
    program = _Parser(text).program()
    if dataset is not None:
        validate_names(program, dataset)
    return program


def parse_action(text: str) -> Action:
    parser = _Parser(text)
    action = parser.action()
    if not parser.at_end():
        _, val, pos = parser.peek()
        raise ProgramParseError(f"trailing input {val!r}", pos)
    return action


def parse_predicate(text: str) -> Predicate:
    parser = _Parser(text)
    pred = parser.predicate()
    if not parser.at_end():
        _, val, pos = parser.peek()
        raise ProgramParseError(f"trailing input {val!r}", pos)
    return pred


def validate_names(program: Program, dataset: Dataset) -> None:
    known_attrs = {
        a.name for schema in dataset.schemas.values() for a in schema.attributes
    }

    def walk_pred(pred: Predicate):
        if isinstance(pred, ClassIs) and pred.class_name not in dataset.schemas:
            raise UnknownNameError(f"unknown class {pred.class_name!r}")
        if isinstance(pred, Membership) and pred.attribute not in known_attrs:
            raise UnknownNameError(f"unknown attribute {pred.attribute!r}")
        if isinstance(pred, (And, Or)):
            walk_pred(pred.left)
            walk_pred(pred.right)
        if isinstance(pred, Not):
            walk_pred(pred.inner)

    objects = program.objects
    while isinstance(objects, Filter):
        walk_pred(objects.predicate)
        objects = objects.inner


# --- evaluation -------------------------------------------------------------


def eval_predicate(pred: Predicate, obj: ObjectRecord) -> bool:
    """Boolean semantics; && and || short-circuit, which makes class-guarded
    clauses total over heterogeneous objects."""
    if isinstance(pred, TruePred):
        return True
    if isinstance(pred, FalsePred):
        return False
    if isinstance(pred, ClassIs):
        return obj.class_name == pred.class_name
    if isinstance(pred, And):
        return eval_predicate(pred.left, obj) and eval_predicate(pred.right, obj)
    if isinstance(pred, Or):
        return eval_predicate(pred.left, obj) or eval_predicate(pred.right, obj)
    if isinstance(pred, Not):
        return not eval_predicate(pred.inner, obj)
    if isinstance(pred, Membership):
        if pred.attribute not in obj.attributes:
            raise UnknownNameError(
                f"object {obj.id} ({obj.class_name}) has no attribute {pred.attribute!r}"
            )
        value = obj.attributes[pred.attribute]
        if isinstance(pred.values, SymbolSet):
            hit = value in pred.values.symbols
        else:
            hit = pred.values.contains(value)
        return hit != pred.negated
    raise TypeError(f"not a predicate: {pred!r}")


def select_objects(objects: Objects, dataset: Dataset) -> list[ObjectRecord]:
    if isinstance(objects, AllObjects):
        return list(dataset.objects)
    inner = select_objects(objects.inner, dataset)
    return [obj for obj in inner if eval_predicate(objects.predicate, obj)]


def run_program(program: Program, dataset: Dataset) -> EditPlan:
    """Evaluate the program into an edit plan (pixels are out of scope)."""
    selected = select_objects(program.objects, dataset)
    return EditPlan(tuple((obj.id, program.action) for obj in selected))


def check_correctness(pred: Predicate, spec: Specification) -> CorrectnessVerdict:
    """Every positive selected, no negative selected."""
    selected = {
        obj.id for obj in spec.dataset.objects if eval_predicate(pred, obj)
    }
    missing = tuple(sorted(spec.positive_ids - selected))
    wrong = tuple(sorted(spec.negative_ids & selected))
    return CorrectnessVerdict(not missing and not wrong, missing, wrong)


# --- metrics ----------------------------------------------------------------


def _pred_metrics(pred: Predicate) -> tuple[int, int, int, int, int]:
    """(size, and, or, in, notin) under the declared counting convention:
    every node = 1, each attribute reference = 1, each symbol or interval
    literal = 1."""
    if isinstance(pred, (TruePred, FalsePred)):
        return (1, 0, 0, 0, 0)
    if isinstance(pred, ClassIs):
        return (2, 0, 0, 0, 0)
    if isinstance(pred, Membership):
        if isinstance(pred.values, SymbolSet):
            literals = len(pred.values.symbols)
        else:
            literals = len(pred.values.intervals)
        size = 1 + 1 + literals
        return (size, 0, 0, 0 if pred.negated else 1, 1 if pred.negated else 0)
    if isinstance(pred, Not):
        s, a, o, i, n = _pred_metrics(pred.inner)
        return (s + 1, a, o, i, n)
    if isinstance(pred, (And, Or)):
        ls, la, lo, li, ln = _pred_metrics(pred.left)
        rs, ra, ro, ri, rn = _pred_metrics(pred.right)
        extra_and = 1 if isinstance(pred, And) else 0
        return (ls + rs + 1, la + ra + extra_and, lo + ro + 1 - extra_and, li + ri, ln + rn)
    raise TypeError(f"not a predicate: {pred!r}")


def ast_metrics(program: Program) -> ProgramMetrics:
    action_size = 1 if isinstance(program.action, Remove) else 2
    size, count_and, count_or, count_in, count_notin = action_size + 1, 0, 0, 0, 0
    objects = program.objects
    while True:
        size += 1
        if isinstance(objects, AllObjects):
            break
        s, a, o, i, n = _pred_metrics(objects.predicate)
        size += s
        count_and += a
        count_or += o
        count_in += i
        count_notin += n
        objects = objects.inner
    return ProgramMetrics(size, count_and, count_or, count_in, count_notin)


# --- lattice element → predicate --------------------------------------------


def element_to_predicate(ctx: LatticeContext, element: LatticeElement) -> Predicate:
    """Guarded conjunction equivalent to the element's coordinates.

    Coordinates equal to their component top are omitted. Categorical
    coordinates print through the smaller side: ``notin complement`` when the
    complement is strictly smaller than the member set, ``in`` otherwise.
    Interval runs print as a single ``in`` interval unless the complement has
    strictly fewer pieces (impossible for a contiguous run, so ``in`` in
    practice; the rule is kept explicit for fixed, deterministic metrics).
    """
    if element.bottom:
        raise LatticeDomainError("bottom has no predicate form")
    conjuncts: list[Predicate] = []
    for i, comp in enumerate(ctx.components):
        name = ctx.attribute_names[i]
        if isinstance(comp, CategoricalComponent):
            mask = int(element.coords[i, 0])
            if mask == comp.full_mask:
                continue
            members = comp.symbols_of(mask)
            complement = comp.symbols_of(comp.full_mask & ~mask)
            if len(complement) < len(members):
                conjuncts.append(Membership(name, True, SymbolSet(complement)))
            else:
                conjuncts.append(Membership(name, False, SymbolSet(members)))
        else:
            lo, hi = int(element.coords[i, 0]), int(element.coords[i, 1])
            if lo == 0 and hi == comp.atom_count - 1:
                continue
            run = comp.run_bounds(lo, hi)
            in_union = IntervalUnion((Interval(run.lo, run.lo_closed, run.hi, run.hi_closed),))
            complement_pieces = []
            if lo > 0:
                piece = comp.run_bounds(0, lo - 1)
                complement_pieces.append(
                    Interval(piece.lo, piece.lo_closed, piece.hi, piece.hi_closed)
                )
            if hi < comp.atom_count - 1:
                piece = comp.run_bounds(hi + 1, comp.atom_count - 1)
                complement_pieces.append(
                    Interval(piece.lo, piece.lo_closed, piece.hi, piece.hi_closed)
                )
            if len(complement_pieces) < len(in_union.intervals):
                conjuncts.append(Membership(name, True, IntervalUnion(tuple(complement_pieces))))
            else:
                conjuncts.append(Membership(name, False, in_union))
    pred: Predicate = ClassIs(ctx.class_name)
    for conj in conjuncts:
        pred = And(pred, conj)
    return pred


def or_join(predicates: Sequence[Predicate]) -> Predicate:
    if not predicates:
        return FalsePred()
    out = predicates[0]
    for pred in predicates[1:]:
        out = Or(out, pred)
    return out


def build_program(action: Action, predicate: Predicate) -> Program:
    """Uniform Apply(action, Filter(φ, All)) shape, even for bare guards."""
    return Program(action, Filter(predicate, AllObjects()))

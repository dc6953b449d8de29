"""Epistemic formulas over simplicial models.

A formula is evaluated at a facet.  ``K[a] phi`` holds at X when phi holds at
every facet sharing X's a-colored vertex; ``C[G] phi`` holds when phi holds at
every facet reachable from X through vertices colored by agents of G.

Surface syntax::

    formula := impl
    impl    := disj ('->' impl)?
    disj    := conj ('|' conj)*
    conj    := unary ('&' unary)*
    unary   := '!' unary | 'K[' NAME ']' unary | 'C[' NAME (',' NAME)* ']' unary
             | atom | '(' formula ')'
    atom    := ('input' | 'decide' | 'class') '(' NAME ',' INT ')'
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterable

from .model import ATOM_KINDS, Atom, SimplicialModel


class Formula:
    __slots__ = ()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class AtomRef(Formula):
    atom: Atom


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    items: tuple

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise ValueError("And needs at least one operand")


@dataclass(frozen=True)
class Or(Formula):
    items: tuple

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise ValueError("Or needs at least one operand")


@dataclass(frozen=True)
class Implies(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Know(Formula):
    agent: str
    sub: Formula


@dataclass(frozen=True)
class CommonKnow(Formula):
    agents: frozenset
    sub: Formula

    def __post_init__(self):
        object.__setattr__(self, "agents", frozenset(self.agents))
        if not self.agents:
            raise ValueError("CommonKnow needs a nonempty agent group")


def atom(kind: str, agent: str, value) -> AtomRef:
    return AtomRef(Atom(kind, agent, value))


def depth(phi: Formula) -> int:
    """Nesting depth; an atom or negated atom has depth 1."""
    if isinstance(phi, AtomRef):
        return 1
    if isinstance(phi, Not):
        return 1 if isinstance(phi.sub, AtomRef) else 1 + depth(phi.sub)
    if isinstance(phi, (And, Or)):
        return 1 + max(depth(x) for x in phi.items)
    if isinstance(phi, Implies):
        return 1 + max(depth(phi.lhs), depth(phi.rhs))
    if isinstance(phi, (Know, CommonKnow)):
        return 1 + depth(phi.sub)
    raise TypeError(f"not a formula: {phi!r}")


def atoms_of(phi: Formula) -> set[Atom]:
    if isinstance(phi, AtomRef):
        return {phi.atom}
    if isinstance(phi, (Not, Know, CommonKnow)):
        return atoms_of(phi.sub)
    if isinstance(phi, (And, Or)):
        return set().union(*(atoms_of(x) for x in phi.items))
    if isinstance(phi, Implies):
        return atoms_of(phi.lhs) | atoms_of(phi.rhs)
    raise TypeError(f"not a formula: {phi!r}")


# -- semantics ---------------------------------------------------------------


def truth_set(m: SimplicialModel, phi: Formula) -> frozenset:
    """Set of facet ids of ``m`` where ``phi`` holds."""
    return _truth(m, phi, {})


def _truth(m, phi, memo):
    key = phi
    if key in memo:
        return memo[key]
    allf = frozenset(range(len(m.facets)))
    if isinstance(phi, AtomRef):
        res = frozenset(f for f in allf if phi.atom in m.facet_label(f))
    elif isinstance(phi, Not):
        res = allf - _truth(m, phi.sub, memo)
    elif isinstance(phi, And):
        res = allf
        for x in phi.items:
            res &= _truth(m, x, memo)
    elif isinstance(phi, Or):
        res = frozenset()
        for x in phi.items:
            res |= _truth(m, x, memo)
    elif isinstance(phi, Implies):
        res = (allf - _truth(m, phi.lhs, memo)) | _truth(m, phi.rhs, memo)
    elif isinstance(phi, Know):
        inner = _truth(m, phi.sub, memo)
        good_vertices = {
            v for v, fs in enumerate(m.incidence)
            if m.vertices[v].color == phi.agent and all(f in inner for f in fs)
        }
        res = frozenset(f for f in allf if m.vertex_of(f, phi.agent) in good_vertices)
    elif isinstance(phi, CommonKnow):
        inner = _truth(m, phi.sub, memo)
        res = frozenset().union(*(
            comp for comp in _group_components(m, phi.agents) if comp <= inner
        ))
    else:
        raise TypeError(f"not a formula: {phi!r}")
    memo[key] = res
    return res


def _group_components(m, group):
    seen = set()
    out = []
    for start in range(len(m.facets)):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for v in m.facets[x]:
                if m.vertices[v].color not in group:
                    continue
                for y in m.incidence[v]:
                    if y not in comp:
                        comp.add(y)
                        stack.append(y)
        seen |= comp
        out.append(frozenset(comp))
    return out


def evaluate(m: SimplicialModel, facet: int, phi: Formula) -> bool:
    """Truth of ``phi`` at facet ``facet`` of ``m``.

    Atoms that never occur in ``m`` are simply false.
    """
    m._check_facet(facet)
    return facet in truth_set(m, phi)


def holds_in_labels(phi: Formula, labels) -> bool:
    """Propositional truth of a modality-free formula under a set of true atoms."""
    if isinstance(phi, AtomRef):
        return phi.atom in labels
    if isinstance(phi, Not):
        return not holds_in_labels(phi.sub, labels)
    if isinstance(phi, And):
        return all(holds_in_labels(x, labels) for x in phi.items)
    if isinstance(phi, Or):
        return any(holds_in_labels(x, labels) for x in phi.items)
    if isinstance(phi, Implies):
        return not holds_in_labels(phi.lhs, labels) or holds_in_labels(phi.rhs, labels)
    raise ValueError(f"modal operator in propositional context: {to_text(phi)}")


POSITIVE = "Positive"
NOT_POSITIVE = "NotPositive"


def is_positive(phi: Formula) -> str:
    """``POSITIVE`` iff negation only sits on atoms and there is no implication.

    An implication hides a negation of its antecedent, so it is rejected even
    when the antecedent is an atom.
    """
    return POSITIVE if _positive(phi) else NOT_POSITIVE


def _positive(phi):
    if isinstance(phi, AtomRef):
        return True
    if isinstance(phi, Not):
        return isinstance(phi.sub, AtomRef)
    if isinstance(phi, (And, Or)):
        return all(_positive(x) for x in phi.items)
    if isinstance(phi, Implies):
        return False
    if isinstance(phi, (Know, CommonKnow)):
        return _positive(phi.sub)
    raise TypeError(f"not a formula: {phi!r}")


# -- random generation -------------------------------------------------------

ALL_OPS = ("not", "and", "or", "know")


def random_formula(seed, max_depth: int, atom_universe: Iterable[Atom],
                   positive_only: bool = False, ops=ALL_OPS, agents=None) -> Formula:
    """Random formula of depth at most ``max_depth``, deterministic in ``seed``.

    ``seed`` may also be a ``random.Random`` instance to draw a stream of
    formulas.  ``agents`` defaults to the agents mentioned in the universe.
    """
    universe = sorted(set(atom_universe))
    if not universe:
        raise ValueError("empty atom universe")
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    agents = sorted(agents or {a.agent for a in universe})
    ops = tuple(o for o in ops if o != "not" or not positive_only)
    return _gen(rng, max_depth, universe, positive_only, ops, agents)


def _gen(rng, d, universe, positive_only, ops, agents):
    if d == 1 or not ops or rng.random() < 0.25:
        lit = AtomRef(rng.choice(universe))
        return Not(lit) if rng.random() < 0.5 else lit
    op = rng.choice(ops)
    if op == "not":
        return Not(_gen(rng, d - 1, universe, positive_only, ops, agents))
    if op in ("and", "or"):
        parts = [_gen(rng, d - 1, universe, positive_only, ops, agents) for _ in range(2)]
        return And(parts) if op == "and" else Or(parts)
    if op == "know":
        return Know(rng.choice(agents), _gen(rng, d - 1, universe, positive_only, ops, agents))
    raise ValueError(f"unknown operator {op!r}")


# -- surface syntax ----------------------------------------------------------


def to_text(phi: Formula) -> str:
    if isinstance(phi, AtomRef):
        return str(phi.atom)
    if isinstance(phi, Not):
        return "!" + to_text(phi.sub)
    if isinstance(phi, And):
        return "(" + " & ".join(to_text(x) for x in phi.items) + ")"
    if isinstance(phi, Or):
        return "(" + " | ".join(to_text(x) for x in phi.items) + ")"
    if isinstance(phi, Implies):
        return "(" + to_text(phi.lhs) + " -> " + to_text(phi.rhs) + ")"
    if isinstance(phi, Know):
        return f"K[{phi.agent}] " + to_text(phi.sub)
    if isinstance(phi, CommonKnow):
        return f"C[{','.join(sorted(phi.agents))}] " + to_text(phi.sub)
    raise TypeError(f"not a formula: {phi!r}")


class FormulaSyntaxError(ValueError):
    def __init__(self, msg, pos):
        super().__init__(f"{msg} at column {pos + 1}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(->)|([!&|(),\[\]])|([A-Za-z_][A-Za-z0-9_]*)|(-?\d+))")


def _tokenize(text):
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            while text[pos].isspace():
                pos += 1
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        toks.append((m.group(m.lastindex), m.lastindex, start))
        pos = m.end()
    toks.append(("", 0, len(text)))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def take(self, expected=None):
        tok, _, pos = self.toks[self.i]
        if expected is not None and tok != expected:
            raise FormulaSyntaxError(f"expected {expected!r}, got {tok or 'end of input'!r}", pos)
        self.i += 1
        return tok

    def name(self):
        tok, kind, pos = self.toks[self.i]
        if kind != 3:
            raise FormulaSyntaxError(f"expected a name, got {tok or 'end of input'!r}", pos)
        self.i += 1
        return tok

    def parse(self):
        phi = self.impl()
        if self.peek():
            raise FormulaSyntaxError(f"trailing input {self.peek()!r}", self.toks[self.i][2])
        return phi

    def impl(self):
        lhs = self.disj()
        if self.peek() == "->":
            self.take()
            return Implies(lhs, self.impl())
        return lhs

    def disj(self):
        items = [self.conj()]
        while self.peek() == "|":
            self.take()
            items.append(self.conj())
        return items[0] if len(items) == 1 else Or(items)

    def conj(self):
        items = [self.unary()]
        while self.peek() == "&":
            self.take()
            items.append(self.unary())
        return items[0] if len(items) == 1 else And(items)

    def unary(self):
        tok, kind, pos = self.toks[self.i]
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok == "(":
            self.take()
            phi = self.impl()
            self.take(")")
            return phi
        if tok in ("K", "C") and self.toks[self.i + 1][0] == "[":
            self.take()
            self.take("[")
            names = [self.name()]
            while self.peek() == ",":
                self.take()
                names.append(self.name())
            self.take("]")
            sub = self.unary()
            if tok == "K":
                if len(names) != 1:
                    raise FormulaSyntaxError("K takes exactly one agent", pos)
                return Know(names[0], sub)
            return CommonKnow(frozenset(names), sub)
        if tok in ATOM_KINDS:
            self.take()
            self.take("(")
            agent = self.name()
            self.take(",")
            vtok, vkind, vpos = self.toks[self.i]
            if vkind != 4:
                raise FormulaSyntaxError(f"expected an integer, got {vtok or 'end of input'!r}", vpos)
            self.i += 1
            self.take(")")
            return AtomRef(Atom(tok, agent, int(vtok)))
        raise FormulaSyntaxError(f"unexpected {tok or 'end of input'!r}", pos)


def parse_formula(text: str) -> Formula:
    return _Parser(text).parse()

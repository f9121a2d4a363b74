"""Polynomial uncertainty functors and the elements of S(X).

Elements of a delta-free sort are plain points of the realized space: base
and constant points are their labels, pairs are tuples and coproduct points
are ``Inj`` values.  Elements of a measure sort are ``MeasureElem`` values.
"""

from dataclasses import dataclass, field
import re

from . import measures as ms
from .errors import ParseError, SortError
from .measures import Kind, Verdict
from .spaces import (Inj, SetAlgebra, UncertaintySpace, coproduct_space,
                     format_point, product_space)


class FunctorExpr:
    """Base class of functor expressions (immutable trees)."""

    def __str__(self):
        return format_functor(self)


@dataclass(frozen=True)
class Id(FunctorExpr):
    def __repr__(self):
        return "Id"


@dataclass(frozen=True)
class Const(FunctorExpr):
    name: str
    space: UncertaintySpace = field(default=None, compare=False, repr=False)

    def __repr__(self):
        return f"Const({self.name})"


@dataclass(frozen=True)
class Prod(FunctorExpr):
    left: FunctorExpr
    right: FunctorExpr

    def __repr__(self):
        return f"Prod({self.left!r}, {self.right!r})"


@dataclass(frozen=True)
class Coprod(FunctorExpr):
    left: FunctorExpr
    right: FunctorExpr

    def __repr__(self):
        return f"Coprod({self.left!r}, {self.right!r})"


DELTA_KINDS = ("upper", "prob", "plaus", "poss")
DELTA_NAMES = {"upper": "Upper", "prob": "Prob", "plaus": "Plaus", "poss": "Poss"}
DELTA_MEASURE_KIND = {"upper": Kind.UPPER, "prob": Kind.PROBABILITY,
                      "plaus": Kind.PLAUSIBILITY, "poss": Kind.POSSIBILITY}
# kinds accepted as elements of each measure sort (the verifier has the last word)
ACCEPTED_KINDS = {
    "upper": {Kind.UPPER, Kind.PROBABILITY},
    "prob": {Kind.PROBABILITY},
    "plaus": {Kind.PLAUSIBILITY, Kind.PROBABILITY, Kind.POSSIBILITY},
    "poss": {Kind.POSSIBILITY},
}


@dataclass(frozen=True)
class Delta(FunctorExpr):
    kind: str
    arg: FunctorExpr

    def __post_init__(self):
        if self.kind not in DELTA_KINDS:
            raise ValueError(f"unknown measure functor {self.kind!r}")

    def __repr__(self):
        return f"{DELTA_NAMES[self.kind]}({self.arg!r})"


def Upper(S):
    return Delta("upper", S)


def Prob(S):
    return Delta("prob", S)


def Plaus(S):
    return Delta("plaus", S)


def Poss(S):
    return Delta("poss", S)


ID = Id()


# printing and parsing


def format_functor(T, ctx=0):
    """Concrete syntax; ``*`` binds tighter than ``+``, both left-associative."""
    if isinstance(T, Id):
        return "Id"
    if isinstance(T, Const):
        return f"Const({T.name})"
    if isinstance(T, Delta):
        return f"{DELTA_NAMES[T.kind]}({format_functor(T.arg)})"
    if isinstance(T, Coprod):
        s = f"{format_functor(T.left, 1)} + {format_functor(T.right, 2)}"
        return f"({s})" if ctx >= 2 else s
    s = f"{format_functor(T.left, 3)} * {format_functor(T.right, 4)}"
    return f"({s})" if ctx >= 4 else s


_FTOK = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_']*)|([()*+]))")


def parse_functor(text, spaces=None, state_space=None):
    """Parse a functor expression.

    ``spaces`` maps names to UncertaintySpace for binding ``Const(M)``; an
    unknown name raises unless ``spaces`` is None (then Const stays unbound).
    The name ``state_space`` is accepted as a synonym for ``Id`` and any other
    bare space name as a synonym for ``Const(name)``.
    """
    toks, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _FTOK.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r} in functor", pos, text)
        toks.append((m.group(1) or m.group(2), m.start(m.lastindex)))
        pos = m.end()
    toks.append(("<end>", len(text)))
    i = 0

    def peek():
        return toks[i][0]

    def take(expected=None):
        nonlocal i
        tok, p = toks[i]
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r} in functor", p, text)
        i += 1
        return tok

    def expr():
        t = term()
        while peek() == "+":
            take()
            t = Coprod(t, term())
        return t

    def term():
        t = factor()
        while peek() == "*":
            take()
            t = Prod(t, factor())
        return t

    def factor():
        tok, p = toks[i]
        if tok == "(":
            take()
            t = expr()
            take(")")
            return t
        if tok == "Id" or (state_space is not None and tok == state_space):
            take()
            return ID
        if tok == "Const":
            take()
            take("(")
            name, np_ = toks[i]
            if not re.match(r"[A-Za-z_]", name):
                raise ParseError(f"expected a space name, found {name!r}", np_, text)
            take()
            take(")")
            if spaces is None:
                return Const(name)
            if name not in spaces:
                raise ParseError(f"undeclared space {name!r}", np_, text)
            return Const(name, spaces[name])
        if spaces is not None and tok in spaces:
            take()
            return Const(tok, spaces[tok])
        for kind, nm in DELTA_NAMES.items():
            if tok == nm:
                take()
                take("(")
                t = expr()
                take(")")
                return Delta(kind, t)
        raise ParseError(f"unexpected {tok!r} in functor", p, text)

    T = expr()
    if peek() != "<end>":
        raise ParseError(f"trailing input {peek()!r} in functor", toks[i][1], text)
    return T


def bind_constants(T, spaces):
    """Copy of T with every Const bound to ``spaces[name]``."""
    if isinstance(T, Const):
        return Const(T.name, spaces[T.name])
    if isinstance(T, (Prod, Coprod)):
        return type(T)(bind_constants(T.left, spaces), bind_constants(T.right, spaces))
    if isinstance(T, Delta):
        return Delta(T.kind, bind_constants(T.arg, spaces))
    return T


def constants(T):
    """Const nodes of T, first occurrence order, one per name."""
    out = {}

    def walk(S):
        if isinstance(S, Const):
            out.setdefault(S.name, S)
        elif isinstance(S, (Prod, Coprod)):
            walk(S.left)
            walk(S.right)
        elif isinstance(S, Delta):
            walk(S.arg)

    walk(T)
    return list(out.values())


# ingredients and the multigraph


def ingredients(T):
    """Ing T: every subexpression of T together with Id.

    Ordered with Id first, then subexpressions in post-order.
    """
    out = [ID]

    def walk(S):
        if isinstance(S, (Prod, Coprod)):
            walk(S.left)
            walk(S.right)
        elif isinstance(S, Delta):
            walk(S.arg)
        if S not in out:
            out.append(S)

    walk(T)
    return out


@dataclass(frozen=True)
class Edge:
    source: FunctorExpr
    label: str  # pr1 pr2 in1 in2 next, or a delta kind for the (p,q) family
    target: FunctorExpr


@dataclass(frozen=True)
class IngredientGraph:
    functor: FunctorExpr
    nodes: tuple
    edges: tuple

    def out(self, source):
        return [e for e in self.edges if e.source == source]

    def target(self, source, label):
        for e in self.edges:
            if e.source == source and e.label == label:
                return e.target
        return None


def multigraph(T):
    nodes = ingredients(T)
    edges = []
    for S in nodes:
        if isinstance(S, Prod):
            edges += [Edge(S, "pr1", S.left), Edge(S, "pr2", S.right)]
        elif isinstance(S, Coprod):
            edges += [Edge(S, "in1", S.left), Edge(S, "in2", S.right)]
        elif isinstance(S, Delta):
            edges.append(Edge(S, S.kind, S.arg))
        elif isinstance(S, Id):
            edges.append(Edge(S, "next", T))
    return IngredientGraph(T, tuple(nodes), tuple(edges))


def is_delta_free(S):
    if isinstance(S, Delta):
        return False
    if isinstance(S, (Prod, Coprod)):
        return is_delta_free(S.left) and is_delta_free(S.right)
    return True


class _NotEnumerable:
    def __repr__(self):
        return "NOT_ENUMERABLE"

    def __bool__(self):
        return False


NOT_ENUMERABLE = _NotEnumerable()
_realized = {}


def realize_space(S, X):
    """S(X) as a finite space for delta-free S, else NOT_ENUMERABLE."""
    if not is_delta_free(S):
        return NOT_ENUMERABLE
    if isinstance(S, Id):
        return X
    key = (S, X, tuple(c.space for c in constants(S)))
    hit = _realized.get(key)
    if hit is not None:
        return hit
    if isinstance(S, Const):
        if S.space is None:
            raise SortError(f"constant {S.name} is not bound to a space")
        out = S.space
    elif isinstance(S, Prod):
        out = product_space(realize_space(S.left, X), realize_space(S.right, X), name=format_functor(S))
    else:
        out = coproduct_space(realize_space(S.left, X), realize_space(S.right, X), name=format_functor(S))
    if len(_realized) > 4096:
        _realized.clear()
    _realized[key] = out
    return out


# elements


class MeasureElem:
    """An element of a measure sort.

    Equality is extensional: two elements are equal when their upper-side
    value tables agree on the same algebra.  For measures over a finite
    support of elements (nested measure sorts) the comparison ignores the
    order in which the support is listed.  ``name`` is only a label for
    writing models back out.
    """

    __slots__ = ("measure", "name", "_key", "_hash")

    def __init__(self, measure, name=None):
        self.measure = measure
        self.name = name
        self._key = None
        self._hash = None

    @property
    def algebra(self):
        return self.measure.algebra

    @property
    def upper(self):
        return ms.upper_side(self.measure)

    def key(self):
        if self._key is None:
            A = self.measure.algebra
            t = self.upper.table()
            if getattr(A, "is_support", False):
                self._key = ("support", frozenset((frozenset(A.points_of(u)), v) for u, v in enumerate(t)))
            else:
                self._key = (A, t)
        return self._key

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, MeasureElem) and hash(self) == hash(other) and self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        return f"MeasureElem({self.name or self.measure!r})"


class SupportAlgebra(SetAlgebra):
    """Discrete algebra on an explicit finite list of elements (nested measures)."""

    __slots__ = ()
    is_support = True

    def __init__(self, support):
        support = tuple(support)
        super().__init__(support, [(e,) for e in support])


def format_element(e):
    if isinstance(e, MeasureElem):
        return e.name or repr(e.measure)
    if isinstance(e, tuple):
        return "(" + ", ".join(format_element(x) for x in e) + ")"
    if isinstance(e, Inj):
        return f"in{e.side}({format_element(e.value)})"
    return format_point(e)


def verify_measure(m, kind):
    """Verify that measure m is a member of the measure class of delta ``kind``.

    Envelopes of probabilities are upper probabilities by construction, so
    only their members are checked.  Every other case runs the full verifier.
    """
    if m.kind not in ACCEPTED_KINDS[kind]:
        return Verdict(False, f"a {m.kind} measure is not an element of {DELTA_NAMES[kind]}")
    if kind == "upper":
        if isinstance(m, ms.ProbabilityMeasure):
            return Verdict(True, "probability measure")
        if isinstance(m, ms.Envelope):
            for mu in m.family:
                v = ms.is_probability(mu)
                if not v:
                    return Verdict(False, f"envelope member is not a probability: {v.reason}")
            return Verdict(True, "upper envelope of a probability family")
        return ms.is_upper_probability_lp(m)
    if kind == "prob":
        return ms.is_probability(m)
    if kind == "plaus":
        return ms.is_plausibility(m)
    return ms.is_possibility(m)


def check_element(e, S, X):
    """Verdict on whether e is an element of S(X), with the reason on failure."""
    try:
        _check(e, S, X)
    except SortError as err:
        return Verdict(False, str(err))
    return Verdict(True, "well-sorted")


def _check(e, S, X):
    if isinstance(S, Id):
        if isinstance(e, (tuple, Inj, MeasureElem)) or not X.algebra.has_point(e):
            raise SortError(f"{format_element(e)} is not a point of {X.name}")
    elif isinstance(S, Const):
        if S.space is None:
            raise SortError(f"constant {S.name} is not bound to a space")
        if isinstance(e, (tuple, Inj, MeasureElem)) or not S.space.algebra.has_point(e):
            raise SortError(f"{format_element(e)} is not a point of {S.name}")
    elif isinstance(S, Prod):
        if not (isinstance(e, tuple) and len(e) == 2):
            raise SortError(f"{format_element(e)} is not a pair, as sort {S} requires")
        _check(e[0], S.left, X)
        _check(e[1], S.right, X)
    elif isinstance(S, Coprod):
        if not isinstance(e, Inj):
            raise SortError(f"{format_element(e)} is not an injection, as sort {S} requires")
        _check(e.value, S.left if e.side == 1 else S.right, X)
    else:
        if not isinstance(e, MeasureElem):
            raise SortError(f"{format_element(e)} is not a measure, as sort {S} requires")
        A = e.measure.algebra
        if is_delta_free(S.arg):
            want = realize_space(S.arg, X).algebra
            if A != want:
                raise SortError(f"measure {format_element(e)} is not defined on the algebra of {S.arg}")
        else:
            if not getattr(A, "is_support", False):
                raise SortError(f"measure {format_element(e)} must list a finite support of {S.arg} elements")
            for x in A.carrier:
                _check(x, S.arg, X)
        v = verify_measure(e.measure, S.kind)
        if not v:
            raise SortError(f"measure {format_element(e)} fails the {DELTA_NAMES[S.kind]} check: {v.reason}")


def map_element(e, S, f, X, Y):
    """(Sf)(e) for a point map f: X → Y (mapping), acting structurally."""
    if isinstance(S, Id):
        return f[e]
    if isinstance(S, Const):
        return e
    if isinstance(S, Prod):
        return (map_element(e[0], S.left, f, X, Y), map_element(e[1], S.right, f, X, Y))
    if isinstance(S, Coprod):
        return Inj(e.side, map_element(e.value, S.left if e.side == 1 else S.right, f, X, Y))
    m = e.measure
    if is_delta_free(S.arg):
        src = realize_space(S.arg, X).algebra
        tgt = realize_space(S.arg, Y).algebra
        pmap = {p: map_element(p, S.arg, f, X, Y) for p in src.carrier}
        return MeasureElem(ms.pushforward(pmap, m, tgt))
    pmap = {x: map_element(x, S.arg, f, X, Y) for x in m.algebra.carrier}
    image = []
    for y in pmap.values():
        if y not in image:
            image.append(y)
    return MeasureElem(ms.pushforward(pmap, m, SupportAlgebra(image)))


def random_element(S, X, rng, max_family=3, max_focal=4, support=3):
    """A random well-sorted element of S(X); measures are valid by construction."""
    if isinstance(S, Id):
        return rng.choice(X.carrier)
    if isinstance(S, Const):
        return rng.choice(S.space.carrier)
    if isinstance(S, Prod):
        return (random_element(S.left, X, rng, max_family, max_focal, support),
                random_element(S.right, X, rng, max_family, max_focal, support))
    if isinstance(S, Coprod):
        side = rng.choice((1, 2))
        sub = S.left if side == 1 else S.right
        if not carrier_nonempty(sub, X):
            side, sub = 3 - side, (S.right if side == 1 else S.left)
        return Inj(side, random_element(sub, X, rng, max_family, max_focal, support))
    kind = DELTA_MEASURE_KIND[S.kind]
    if is_delta_free(S.arg):
        A = realize_space(S.arg, X).algebra
    else:
        sup = []
        for _ in range(rng.randint(1, support)):
            x = random_element(S.arg, X, rng, max_family, max_focal, support)
            if x not in sup:
                sup.append(x)
        A = SupportAlgebra(sup)
    return MeasureElem(ms.random_measure(kind, A, rng, max_family, max_focal))


def carrier_nonempty(S, X):
    if isinstance(S, Id):
        return bool(X.carrier)
    if isinstance(S, Const):
        return bool(S.space.carrier)
    if isinstance(S, Prod):
        return carrier_nonempty(S.left, X) and carrier_nonempty(S.right, X)
    if isinstance(S, Coprod):
        return carrier_nonempty(S.left, X) or carrier_nonempty(S.right, X)
    if is_delta_free(S.arg):
        return bool(realize_space(S.arg, X).carrier)
    return carrier_nonempty(S.arg, X)

"""Coalgebras, the model file format, validation and morphism checking.

A model file is a sequence of ``;``-terminated statements (``#`` starts a
comment)::

    space M { points a b c; gen {a}; }
    space X { points x y z t; gen {x y}; }
    functor T = Upper(Id * Const(M));
    prob mu1 on Id * Const(M) { {x y}*{a}: 1/5; {z t}*{a}: 1/10; {x y}*{b c}: 0; {z t}*{b c}: 7/10; }
    upper P1 = env(mu1, mu2);
    alpha { x: P1; y: P1; z: P2; t: P2; }

Other measure statements:

    lower NAME = env(N, ...);
    mass NAME on SORT [belief] { SET: r; ... }
    poss NAME on SORT [necessity] { POINT: r; ... }
    table NAME on SORT KIND { SET: r; ... }
    states X;                       # names the state space if not inferable

Sets of a realized sort are written ``{x y}`` at base sorts, ``A*B`` at
products (factors that are themselves products in parentheses),
``in1(A)``/``in2(B)`` at coproducts, and unions with ``|``.  In a measure
over a sort that contains a measure functor, keys are elements instead.
"""

from dataclasses import dataclass
from fractions import Fraction as Frac
import re

from . import measures as ms
from .errors import MalformedMeasureError, MalformedSpaceError, ModelError, NotMeasurableError, ParseError, SortError, UcmlError
from .functors import (Const, Coprod, Delta, Id, MeasureElem, Prod, SupportAlgebra, check_element,
                       constants, format_element, format_functor, is_delta_free, map_element,
                       parse_functor, realize_space)
from .measures import Kind
from .spaces import Inj, UncertaintySpace, bits, check_measurable_map, format_points, generate_algebra

FORMS = ("prob", "upper", "lower", "mass", "poss", "table")


@dataclass(frozen=True)
class MeasureDecl:
    """A named measure statement as it appears in a model file."""

    name: str
    form: str
    measure: object
    sort: object = None       # argument sort for prob/mass/poss/table
    members: tuple = ()       # member names for env statements


class Coalgebra:
    """A state space X, a functor T, and alpha: X → T(X).

    ``spaces`` holds every declared space (including X) by name;
    ``declarations`` holds the named measures in file order.
    """

    def __init__(self, X, T, alpha, spaces=None, declarations=(), functor_name="T", layout=None,
                 state_explicit=False):
        self.X = X
        self.T = T
        self.alpha = {x: alpha[x] for x in X.carrier if x in alpha}
        self.spaces = dict(spaces) if spaces else {X.name: X}
        self.declarations = tuple(declarations)
        self.functor_name = functor_name
        self.layout = tuple(layout) if layout else None
        self.state_explicit = state_explicit
        self._extra_alpha = {x: v for x, v in alpha.items() if x not in self.alpha}

    def measure(self, name):
        for d in self.declarations:
            if d.name == name:
                return d.measure
        raise KeyError(name)

    def element(self, name):
        return MeasureElem(self.measure(name), name)

    def __eq__(self, other):
        if not isinstance(other, Coalgebra):
            return NotImplemented
        return (_space_sig(self.spaces) == _space_sig(other.spaces)
                and self.X.name == other.X.name
                and self.T == other.T and self.functor_name == other.functor_name
                and self.declarations == other.declarations
                and list(self.alpha.items()) == list(other.alpha.items()))

    __hash__ = object.__hash__

    def __repr__(self):
        return f"Coalgebra(X={self.X.name}, T={format_functor(self.T)}, |X|={len(self.X.carrier)})"


def _space_sig(spaces):
    return [(n, s.algebra.carrier, s.algebra.atoms) for n, s in spaces.items()]


# validation


def element_key(e, S, X):
    """Key identifying elements that no measurable set of S(X) separates."""
    if isinstance(S, Id):
        return ("atom", X.algebra.atom_index(e))
    if isinstance(S, Const):
        return ("atom", S.space.algebra.atom_index(e))
    if isinstance(S, Prod):
        return (element_key(e[0], S.left, X), element_key(e[1], S.right, X))
    if isinstance(S, Coprod):
        return (e.side, element_key(e.value, S.left if e.side == 1 else S.right, X))
    return e


def validation_errors(model):
    """Every problem with the model: totality, sorts, measurability of alpha."""
    errs = []
    X, T = model.X, model.T
    for x in model._extra_alpha:
        errs.append(f"alpha is given at {x!r}, which is not a point of {X.name}")
    for c in constants(T):
        if c.space is None:
            errs.append(f"constant {c.name} is not bound to a space")
    if errs:
        return errs
    for x in X.carrier:
        if x not in model.alpha:
            errs.append(f"alpha is undefined at {x}")
            continue
        v = check_element(model.alpha[x], T, X)
        if not v:
            errs.append(f"alpha({x}): {v.reason}")
    if errs:
        return errs
    for atom in X.atoms:
        keys = {}
        for x in atom:
            keys.setdefault(element_key(model.alpha[x], T, X), x)
        if len(keys) > 1:
            shown = ", ".join(f"{x} ↦ {format_element(model.alpha[x])}" for x in atom)
            errs.append(f"alpha is not measurable: atom {format_points(atom)} is split ({shown})")
    return errs


def validate(model):
    """Raise ModelError listing every problem, else return the model."""
    errs = validation_errors(model)
    if errs:
        raise ModelError(errs)
    return model


def make_model(X, T, alpha, spaces=None, declarations=(), **kw):
    return validate(Coalgebra(X, T, alpha, spaces, declarations, **kw))


# tokenizer

_TOK = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<word>[A-Za-z0-9_.'/]+)
  | (?P<punct>[{}()\[\];:,*+|=])
""", re.VERBOSE)


class _Stream:
    def __init__(self, text):
        self.text = text
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _TOK.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
            if m.lastgroup != "ws":
                self.toks.append((m.group(), m.start()))
            pos = m.end()
        self.toks.append(("<end>", len(text)))
        self.i = 0

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)][0]

    @property
    def pos(self):
        return self.toks[self.i][1]

    def take(self, expected=None):
        tok, p = self.toks[self.i]
        if expected is not None and tok != expected:
            found = "end of input" if tok == "<end>" else repr(tok)
            raise ParseError(f"expected {expected!r}, found {found}", p, self.text)
        if tok == "<end>":
            raise ParseError("unexpected end of input", p, self.text)
        self.i += 1
        return tok

    def word(self, what="a name"):
        tok, p = self.toks[self.i]
        if not re.fullmatch(r"[A-Za-z0-9_.'/]+", tok) or tok == "<end>":
            raise ParseError(f"expected {what}, found {tok!r}", p, self.text)
        self.i += 1
        return tok

    def until(self, stop):
        out = []
        while self.peek() not in stop:
            if self.peek() == "<end>":
                raise ParseError(f"expected one of {sorted(stop)}", self.pos, self.text)
            out.append(self.take())
        return out

    def error(self, msg, pos=None):
        return ParseError(msg, self.pos if pos is None else pos, self.text)


def _rational(s, tok, pos=None):
    try:
        return ms.rat(tok)
    except UcmlError:
        raise s.error(f"expected a rational number, found {tok!r}", pos) from None


# sets and elements of realized sorts


def parse_set(s, S, X):
    """Point set of S(X) denoted by a set expression."""
    pts = _set_term(s, S, X)
    while s.peek() == "|":
        s.take()
        pts = pts | _set_term(s, S, X)
    return pts


def _set_term(s, S, X):
    if s.peek() == "{" and s.peek(1) == "}":
        s.take()
        s.take()
        return frozenset()
    if isinstance(S, (Id, Const)):
        space = X if isinstance(S, Id) else S.space
        p0 = s.pos
        s.take("{")
        labels = []
        while s.peek() != "}":
            if s.peek() == ",":
                s.take()
                continue
            labels.append(s.word("a point label"))
        s.take("}")
        unknown = [l for l in labels if not space.algebra.has_point(l)]
        if unknown:
            raise s.error(f"{unknown} are not points of {space.name}", p0)
        return frozenset(labels)
    if isinstance(S, Prod):
        a = _set_factor(s, S.left, X)
        s.take("*")
        b = _set_factor(s, S.right, X)
        return frozenset((p, q) for p in a for q in b)
    if isinstance(S, Coprod):
        tag = s.take()
        if tag not in ("in1", "in2"):
            raise s.error(f"expected in1 or in2, found {tag!r}")
        side = 1 if tag == "in1" else 2
        s.take("(")
        inner = parse_set(s, S.left if side == 1 else S.right, X)
        s.take(")")
        return frozenset(Inj(side, v) for v in inner)
    raise s.error(f"sort {format_functor(S)} has no set syntax")


def _set_factor(s, S, X):
    if s.peek() == "(":
        s.take()
        pts = parse_set(s, S, X)
        s.take(")")
        return pts
    if isinstance(S, Prod):
        raise s.error("product factors must be parenthesized")
    return _set_term(s, S, X)


def parse_element(s, S, X, names):
    """An element of S(X); measure sorts take declared measure names."""
    if isinstance(S, (Id, Const)):
        space = X if isinstance(S, Id) else S.space
        p0 = s.pos
        lab = s.word("a point label")
        if not space.algebra.has_point(lab):
            raise s.error(f"{lab!r} is not a point of {space.name}", p0)
        return lab
    if isinstance(S, Prod):
        s.take("(")
        a = parse_element(s, S.left, X, names)
        s.take(",")
        b = parse_element(s, S.right, X, names)
        s.take(")")
        return (a, b)
    if isinstance(S, Coprod):
        tag = s.take()
        if tag not in ("in1", "in2"):
            raise s.error(f"expected in1 or in2, found {tag!r}")
        side = 1 if tag == "in1" else 2
        s.take("(")
        v = parse_element(s, S.left if side == 1 else S.right, X, names)
        s.take(")")
        return Inj(side, v)
    p0 = s.pos
    name = s.word("a measure name")
    if name not in names:
        raise s.error(f"undeclared measure {name!r}", p0)
    return MeasureElem(names[name], name)


def element_from_text(text, S, model):
    s = _Stream(text)
    e = parse_element(s, S, model.X, {d.name: d.measure for d in model.declarations})
    if s.peek() != "<end>":
        raise s.error(f"trailing input {s.peek()!r}")
    return e


def _label_fmt(labels):
    return "{" + " ".join(str(p) for p in labels) + "}"


def format_set(points, S, X):
    """Canonical text of a measurable point set of S(X)."""
    space = realize_space(S, X)
    points = frozenset(points)
    if not points:
        return "{}"
    if isinstance(S, (Id, Const)):
        return _label_fmt([p for p in space.carrier if p in points])
    if isinstance(S, Coprod):
        parts = []
        for side, sub in ((1, S.left), (2, S.right)):
            inner = frozenset(p.value for p in points if p.side == side)
            if inner:
                parts.append(f"in{side}({format_set(inner, sub, X)})")
        return " | ".join(parts)
    mask = space.algebra.from_points(points).mask
    return " | ".join(_format_atom(space.atoms[i], S, X) for i in bits(mask))


def _format_atom(atom, S, X):
    if isinstance(S, (Id, Const)):
        return _label_fmt(atom)
    if isinstance(S, Prod):
        left = _format_factor(frozenset(p[0] for p in atom), S.left, X)
        right = _format_factor(frozenset(p[1] for p in atom), S.right, X)
        return f"{left}*{right}"
    side = next(iter(atom)).side
    sub = S.left if side == 1 else S.right
    return f"in{side}({format_set(frozenset(p.value for p in atom), sub, X)})"


def _format_factor(points, S, X):
    text = format_set(points, S, X)
    return f"({text})" if isinstance(S, Prod) else text


def format_element_text(e, S):
    if isinstance(S, (Id, Const)):
        return str(e)
    if isinstance(S, Prod):
        return f"({format_element_text(e[0], S.left)}, {format_element_text(e[1], S.right)})"
    if isinstance(S, Coprod):
        return f"in{e.side}({format_element_text(e.value, S.left if e.side == 1 else S.right)})"
    if e.name is None:
        raise ModelError([f"measure element {e!r} has no name to write"])
    return e.name


# loading


def load_model(source):
    """Parse and validate a model from text or a path; raises ParseError/ModelError."""
    text = _read(source)
    model = parse_model(text)
    return validate(model)


def _read(source):
    if hasattr(source, "read"):
        return source.read()
    if isinstance(source, str) and ("\n" in source or "{" in source or ";" in source):
        return source
    with open(source, encoding="utf-8") as fh:
        return fh.read()


def parse_model(text):
    """Parse a model without validating alpha (see ``validate``)."""
    s = _Stream(text)
    spaces, decls, layout = {}, [], []
    names = {}
    T = functor_name = None
    state_name = None
    state_explicit = False
    alpha = None

    while s.peek() != "<end>":
        kw_pos = s.pos
        kw = s.take()
        if kw == "space":
            name = s.word()
            if name in spaces:
                raise s.error(f"space {name!r} declared twice", kw_pos)
            s.take("{")
            points, gens = None, []
            while s.peek() != "}":
                item = s.take()
                if item == "points":
                    points = s.until({";"})
                    s.take(";")
                elif item == "gen":
                    while True:
                        gens.append(_raw_set(s))
                        if s.peek() == ",":
                            s.take()
                            continue
                        break
                    s.take(";")
                else:
                    raise s.error(f"unknown space clause {item!r}")
            s.take("}")
            if s.peek() == ";":
                s.take()
            if points is None:
                raise s.error(f"space {name!r} has no points clause", kw_pos)
            try:
                spaces[name] = UncertaintySpace(name, generate_algebra(points, gens))
            except MalformedSpaceError as e:
                raise s.error(f"space {name}: {e}", kw_pos) from None
            layout.append(("space", name))
        elif kw == "states":
            state_name = s.word()
            state_explicit = True
            s.take(";")
        elif kw == "functor":
            functor_name = s.word()
            s.take("=")
            p0 = s.pos
            ftoks = s.until({";"})
            s.take(";")
            ftext = " ".join(ftoks)
            consts = _const_names(ftext)
            if state_name is None:
                rest = [n for n in spaces if n not in consts]
                if len(rest) == 1:
                    state_name = rest[0]
            try:
                T = parse_functor(ftext, spaces, state_name)
            except ParseError as e:
                raise s.error(f"functor: {e.message}", p0) from None
            layout.append(("functor", functor_name))
        elif kw in FORMS:
            if T is None or state_name is None or state_name not in spaces:
                raise s.error(f"{kw} statement before the functor and state space are known", kw_pos)
            X = spaces[state_name]
            d = _parse_decl(s, kw, X, T, spaces, state_name, names, kw_pos)
            if d.name in names:
                raise s.error(f"measure {d.name!r} declared twice", kw_pos)
            names[d.name] = d.measure
            decls.append(d)
            layout.append(("decl", d.name))
        elif kw == "alpha":
            if T is None or state_name is None:
                raise s.error("alpha before the functor and state space are known", kw_pos)
            X = spaces[state_name]
            s.take("{")
            alpha = {}
            while s.peek() != "}":
                p0 = s.pos
                x = s.word("a state")
                s.take(":")
                if x in alpha:
                    raise s.error(f"alpha given twice at {x!r}", p0)
                if not X.algebra.has_point(x):
                    raise s.error(f"{x!r} is not a point of {X.name}", p0)
                alpha[x] = parse_element(s, T, X, names)
                s.take(";")
            s.take("}")
            if s.peek() == ";":
                s.take()
            layout.append(("alpha", None))
        else:
            raise s.error(f"unknown statement {kw!r}", kw_pos)

    if T is None:
        raise ParseError("model has no functor statement", len(text), text)
    if state_name is None or state_name not in spaces:
        raise ParseError("cannot tell which space is the state space; add 'states NAME;'", len(text), text)
    X = spaces[state_name]
    if alpha is None:
        alpha = {}
        if X.carrier:
            raise ModelError(["model has no alpha statement"])
    inferred = _infer_state(spaces, T)
    return Coalgebra(X, T, alpha, spaces, decls, functor_name, layout,
                     state_explicit=state_explicit and inferred != state_name)


def _const_names(ftext):
    return set(re.findall(r"Const\s*\(\s*([A-Za-z_][A-Za-z0-9_']*)\s*\)", ftext))


def _infer_state(spaces, T):
    consts = {c.name for c in constants(T)}
    rest = [n for n in spaces if n not in consts]
    return rest[0] if len(rest) == 1 else None


def _raw_set(s):
    s.take("{")
    labels = []
    while s.peek() != "}":
        if s.peek() == ",":
            s.take()
            continue
        labels.append(s.word("a point label"))
    s.take("}")
    return labels


def _parse_sort(s, spaces, state_name, stop):
    p0 = s.pos
    toks = s.until(stop)
    try:
        return parse_functor(" ".join(toks), spaces, state_name)
    except ParseError as e:
        raise s.error(f"sort: {e.message}", p0) from None


def _parse_decl(s, kw, X, T, spaces, state_name, names, kw_pos):
    name = s.word()
    try:
        if kw in ("upper", "lower"):
            s.take("=")
            if s.take() != "env":
                raise s.error("expected env(...)")
            s.take("(")
            members = []
            while s.peek() != ")":
                if s.peek() == ",":
                    s.take()
                    continue
                p0 = s.pos
                m = s.word("a measure name")
                if m not in names:
                    raise s.error(f"undeclared measure {m!r}", p0)
                members.append(m)
            s.take(")")
            s.take(";")
            fam = [names[m] for m in members]
            if not all(isinstance(mu, ms.ProbabilityMeasure) for mu in fam):
                raise s.error("env(...) members must be prob statements", kw_pos)
            return MeasureDecl(name, kw, ms.Envelope(Kind(kw), tuple(fam)), None, tuple(members))
        readings = {"belief", "plausibility", "possibility", "necessity", "upper", "lower", "probability"}
        if s.peek() == "on":
            s.take()
            S = _parse_sort(s, spaces, state_name, {"{", "over"} | readings)
        elif isinstance(T, Delta):
            S = T.arg
        else:
            raise s.error(f"{kw} {name} needs 'on SORT'")
        reading = None
        if s.peek() not in ("{", "over"):
            p0 = s.pos
            tok = s.take()
            if tok not in readings:
                raise s.error(f"unknown reading {tok!r}", p0)
            reading = Kind(tok)
        support = None
        if s.peek() == "over":
            s.take()
            if is_delta_free(S):
                raise s.error("'over' is only for sorts containing measure functors")
            support = _element_list(s, S, X, names)
        s.take("{")
        entries = []
        while s.peek() != "}":
            p0 = s.pos
            if kw == "poss" or (kw == "prob" and not is_delta_free(S)):
                key = parse_element(s, S, X, names)
            elif is_delta_free(S):
                key = parse_set(s, S, X)
            else:
                key = _element_list(s, S, X, names)
            s.take(":")
            vp = s.pos
            entries.append((key, _rational(s, s.word("a rational"), vp), p0))
            s.take(";")
        s.take("}")
        if s.peek() == ";":
            s.take()
        return _build_decl(s, kw, name, S, reading, entries, X, support)
    except (MalformedMeasureError, NotMeasurableError, SortError, ms.DomainError) as e:
        raise s.error(f"{kw} {name}: {e}", kw_pos) from None


def _element_list(s, S, X, names):
    s.take("{")
    out = []
    while s.peek() != "}":
        e = parse_element(s, S, X, names)
        if e in out:
            raise s.error(f"element {format_element(e)} listed twice")
        out.append(e)
    s.take("}")
    return out


def _nested_algebra(s, support, keys):
    """Support algebra for a nested sort: the 'over' list, else keys in order of appearance."""
    if support is None:
        support = []
        for k in keys:
            for e in (k if isinstance(k, list) else [k]):
                if e not in support:
                    support.append(e)
    return SupportAlgebra(support)


def _build_decl(s, kw, name, S, reading, entries, X, support=None):
    nested = not is_delta_free(S)
    if nested:
        A = _nested_algebra(s, support, [k for k, _, _ in entries])
        entries = [(frozenset(k) if isinstance(k, list) else k, v, p0) for k, v, p0 in entries]
        for k, _, p0 in entries:
            for e in (k if isinstance(k, frozenset) else [k]):
                if not A.has_point(e):
                    raise s.error(f"{format_element(e)} is not in the 'over' list", p0)
    if kw == "prob":
        if reading not in (None, Kind.PROBABILITY):
            raise s.error(f"prob statements take no reading ({reading})")
        if is_delta_free(S):
            A = realize_space(S, X).algebra
            w = [Frac(0)] * A.n_atoms
            seen = set()
            for pts, v, p0 in entries:
                mask = A.from_points(pts).mask if pts else 0
                if len(bits(mask)) != 1:
                    raise s.error(f"{format_set(pts, S, X)} is not an atom of {format_functor(S)}", p0)
                if mask in seen:
                    raise s.error(f"atom {format_set(pts, S, X)} given twice", p0)
                seen.add(mask)
                w[bits(mask)[0]] = v
            return MeasureDecl(name, kw, ms.ProbabilityMeasure(A, tuple(w)), S)
        w = {}
        for e, v, p0 in entries:
            if e in w:
                raise s.error(f"support element {format_element(e)} listed twice", p0)
            w[e] = v
        return MeasureDecl(name, kw, ms.ProbabilityMeasure(A, tuple(w.get(e, Frac(0)) for e in A.carrier)), S)
    if kw == "mass":
        reading = reading or Kind.PLAUSIBILITY
        if not nested:
            A = realize_space(S, X).algebra
        focal = []
        for pts, v, p0 in entries:
            focal.append((A.from_points(pts).mask, v))
        return MeasureDecl(name, kw, ms.Mass(A, tuple(focal), reading), S)
    if kw == "poss":
        reading = reading or Kind.POSSIBILITY
        if not nested:
            A = realize_space(S, X).algebra
        d = {}
        for e, v, p0 in entries:
            if e in d:
                raise s.error(f"point {format_element(e)} given twice", p0)
            d[e] = v
        return MeasureDecl(name, kw, ms.possibility_distribution(A, d, reading), S)
    if kw == "table":
        if reading is None:
            raise s.error("table statements need a kind, e.g. 'table g on Id upper { ... }'")
        if not nested:
            A = realize_space(S, X).algebra
        vals = {}
        for pts, v, p0 in entries:
            mask = A.from_points(pts).mask
            if mask in vals:
                raise s.error("a set is given twice", p0)
            vals[mask] = v
        return MeasureDecl(name, kw, ms.tabulated(A, reading, vals), S)
    raise s.error(f"unknown statement {kw!r}")


# saving


def save_model(model):
    """Canonical text of the model; load_model(save_model(m)) == m."""
    lines = []
    layout = model.layout or ([("space", n) for n in model.spaces] + [("functor", model.functor_name)]
                              + [("decl", d.name) for d in model.declarations] + [("alpha", None)])
    decls = {d.name: d for d in model.declarations}
    X = model.X
    wrote_alpha = False
    for kind, name in layout:
        if kind == "space":
            lines.append(_format_space(model.spaces[name]))
        elif kind == "functor":
            if model.state_explicit or _infer_state(model.spaces, model.T) != X.name:
                lines.append(f"states {X.name};")
            lines.append(f"functor {model.functor_name} = {format_functor(model.T)};")
        elif kind == "decl":
            lines.append(_format_decl(decls[name], X))
        elif kind == "alpha":
            wrote_alpha = True
            lines.append(_format_alpha(model))
    if not wrote_alpha and model.alpha:
        lines.append(_format_alpha(model))
    return "\n".join(lines) + "\n"


def _format_space(sp):
    A = sp.algebra
    parts = [f"points {' '.join(map(str, A.carrier))};"] if A.carrier else ["points;"]
    gens = A.generators if A.generators is not None else [a for a in A.atoms[:-1]]
    for g in gens:
        parts.append(f"gen {_label_fmt(g)};")
    return f"space {sp.name} {{ {' '.join(parts)} }}"


def _format_decl(d, X):
    m = d.measure
    if d.form in ("upper", "lower"):
        return f"{d.form} {d.name} = env({', '.join(d.members)});"
    S = d.sort
    nested = not is_delta_free(S)
    A = m.algebra

    def key(mask):
        if nested:
            return "{" + " ".join(format_element_text(e, S) for e in A.points_of(mask)) + "}"
        return format_set(A.points_of(mask), S, X)

    entries = []
    if d.form == "prob":
        head = f"prob {d.name} on {format_functor(S)}"
        for i, w in enumerate(m.weights):
            if nested:
                entries.append((format_element_text(A.carrier[i], S), w))
            else:
                entries.append((_format_atom(A.atoms[i], S, X), w))
    elif d.form == "mass":
        head = f"mass {d.name} on {format_functor(S)}" + (" belief" if m.reading is Kind.BELIEF else "")
        entries = [(key(mask), v) for mask, v in m.focal]
    elif d.form == "poss":
        head = f"poss {d.name} on {format_functor(S)}" + (" necessity" if m.reading is Kind.NECESSITY else "")
        entries = [(format_element_text(p, S), v) for p, v in zip(A.carrier, m.dist) if v]
    else:
        head = f"table {d.name} on {format_functor(S)} {m.kind.value}"
        entries = [(key(u), v) for u, v in enumerate(m.values)]
    if nested and d.form != "prob":
        head += " over {" + " ".join(format_element_text(e, S) for e in A.carrier) + "}"
    body = " ".join(f"{k}: {v};" for k, v in entries)
    return f"{head} {{ {body} }}"


def _format_alpha(model):
    body = "".join(f" {x}: {format_element_text(model.alpha[x], model.T)};" for x in model.X.carrier)
    return f"alpha {{{body} }}"


# morphisms


@dataclass(frozen=True)
class MorphismVerdict:
    ok: bool
    reason: str = ""
    point: object = None
    formulas_checked: int = 0

    def __bool__(self):
        return self.ok


def load_map(source):
    """Parse ``map { x: u; ... }`` into a dict."""
    s = _Stream(_read(source))
    s.take("map")
    s.take("{")
    f = {}
    while s.peek() != "}":
        x = s.word("a point")
        s.take(":")
        f[x] = s.word("a point")
        s.take(";")
    s.take("}")
    if s.peek() == ";":
        s.take()
    return f


def format_map(f):
    return "map { " + " ".join(f"{x}: {y};" for x, y in f.items()) + " }\n"


def check_morphism(f, source, target, formulas=()):
    """Check that f is a coalgebra morphism from source to target.

    Verifies a shared functor, totality and measurability of f, and exact
    commutation alpha_target(f x) = (Tf)(alpha_source x) for every x.  Each
    formula supplied (text or sorted) at a delta-free sort is also checked for
    preservation: p ∈ ⟦φ⟧_source iff (Sf)(p) ∈ ⟦φ⟧_target.
    """
    from .logic import SortedFormula, parse_formula
    from .semantics import interpret

    if source.T != target.T or [c.space for c in constants(source.T)] != [c.space for c in constants(target.T)]:
        return MorphismVerdict(False, "source and target have different functors")
    X, Y = source.X, target.X
    for x in X.carrier:
        if x not in f:
            return MorphismVerdict(False, f"map is undefined at {x}", x)
        if not Y.algebra.has_point(f[x]):
            return MorphismVerdict(False, f"map sends {x} to {f[x]!r}, not a point of {Y.name}", x)
    bad = check_measurable_map(f, X.algebra, Y.algebra)
    if bad is not None:
        return MorphismVerdict(False, f"map is not measurable: preimage of {bad!r} is not measurable")
    T = source.T
    for x in X.carrier:
        want = target.alpha[f[x]]
        got = map_element(source.alpha[x], T, f, X, Y)
        if want != got:
            return MorphismVerdict(False, f"square fails at {x}: alpha_target({f[x]}) = {format_element(want)} "
                                          f"but (Tf)(alpha_source({x})) differs", x)
    n = 0
    for phi in formulas:
        sf_s = phi if isinstance(phi, SortedFormula) else parse_formula(phi, T)
        sf_t = SortedFormula(sf_s.formula, sf_s.sort, sf_s.measurable, T)
        S = sf_s.sort
        if not is_delta_free(S):
            continue
        I_s, I_t = interpret(sf_s, source), interpret(sf_t, target)
        for p in realize_space(S, X).carrier:
            if (p in I_s) != (map_element(p, S, f, X, Y) in I_t):
                return MorphismVerdict(False, f"preservation fails for {sf_s} at {format_element(p)}", p, n)
        n += 1
    return MorphismVerdict(True, "coalgebra morphism", formulas_checked=n)


def load_declarations(source, model):
    """Measure statements parsed against the model's spaces and names.

    Returns the new declarations in file order.  Used for probe files.
    """
    text = _read(source)
    base = save_model(model)
    combined = parse_model(base + text)
    known = {d.name for d in model.declarations}
    return [d for d in combined.declarations if d.name not in known]


def declaration_sort(d, declarations):
    """Argument sort of a declaration (for env statements, that of the members)."""
    if d.sort is not None or not d.members:
        return d.sort
    for x in declarations:
        if x.name == d.members[0]:
            return x.sort
    return None

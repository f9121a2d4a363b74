"""Sorted modal formulas: syntax trees, concrete grammar, sort checking.

Core syntax is ⊥, constant atoms, implication, the structural boxes
[pr1] [pr2] [in1] [in2] [next] and the index modalities of the four measure
kinds.  Negation, conjunction, disjunction, equivalence, ⊤ and all the
comparator forms (U>=p, L<p, Pr<=p, ...) are sugar expanded at parse time.

Concrete grammar, loosest binding first::

    f   := f '<->' f            (left-assoc)
         | f '->' f             (right-assoc)
         | f '|' f | f '&' f    (left-assoc)
         | '!' f | '[' op ']' f | CMP num f
         | 'bot' | 'top' | '{' labels '}' | '(' f ')'
    op  := pr1 | pr2 | in1 | in2 | next
         | '(' num ',' num ')' | 'Pr' num | 'Pl(' num ',' num ')' | 'Ps(' num ',' num ')'
    CMP := (U|L|Pr|Pl|Bl|Ps|Nc)(>=|<=|<|>)

Numbers are integers, fractions ``a/b`` or decimals, all read exactly.
"""

from dataclasses import dataclass, field
from fractions import Fraction as Frac
import re

from .errors import FormulaSortError, ParseError
from .functors import Const, Delta, FunctorExpr, ID, format_functor, multigraph

ZERO, ONE = Frac(0), Frac(1)
BOX_LABELS = ("pr1", "pr2", "in1", "in2", "next")


class Formula:
    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Bot(Formula):
    pos: int = field(default=None, compare=False, repr=False)

    def __repr__(self):
        return "Bot()"


@dataclass(frozen=True)
class Atom(Formula):
    points: frozenset
    pos: int = field(default=None, compare=False, repr=False)

    def __repr__(self):
        return f"Atom({sorted(self.points)!r})"


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula
    pos: int = field(default=None, compare=False, repr=False)

    def __repr__(self):
        return f"Implies({self.left!r}, {self.right!r})"


@dataclass(frozen=True)
class Idx:
    """Index of a measure modality.  ``q`` is None for the probability kind."""

    kind: str
    p: Frac
    q: Frac = None

    def __repr__(self):
        return f"Idx({self.kind}, {self.p}, {self.q})"


@dataclass(frozen=True)
class Modal(Formula):
    label: object  # one of BOX_LABELS or an Idx
    sub: Formula
    pos: int = field(default=None, compare=False, repr=False)

    def __repr__(self):
        return f"Modal({self.label!r}, {self.sub!r})"


BOT = Bot()


def implies(a, b):
    return Implies(a, b)


def neg(a):
    return Implies(a, BOT)


TOP = neg(BOT)


def disj(a, b):
    return Implies(neg(a), b)


def conj(a, b):
    return neg(disj(neg(a), neg(b)))


def iff(a, b):
    return conj(Implies(a, b), Implies(b, a))


def big_conj(fs):
    fs = list(fs)
    if not fs:
        return TOP
    out = fs[0]
    for f in fs[1:]:
        out = conj(out, f)
    return out


def big_disj(fs):
    fs = list(fs)
    if not fs:
        return BOT
    out = fs[0]
    for f in fs[1:]:
        out = disj(out, f)
    return out


def box(label, sub):
    if label not in BOX_LABELS:
        raise ValueError(f"unknown box label {label!r}")
    return Modal(label, sub)


def index(kind, p, q, sub):
    p = Frac(p)
    q = None if kind == "prob" else Frac(q)
    for v in (p, q):
        if v is not None and not 0 <= v <= 1:
            raise ValueError(f"modal index {v} outside [0,1]")
    return Modal(Idx(kind, p, q), sub)


# abbreviations

CMP_PREFIX = {"U": ("upper", "U"), "L": ("upper", "L"), "Pl": ("plaus", "U"), "Bl": ("plaus", "L"),
              "Ps": ("poss", "U"), "Nc": ("poss", "L"), "Pr": ("prob", "P")}
CMP_OPS = (">=", "<=", "<", ">")


def expand_abbreviation(name, p, phi):
    """Rewrite a comparator form such as ``U<=`` applied to p and φ into core syntax."""
    name = name.replace("≥", ">=").replace("≤", "<=")
    m = re.fullmatch(r"(U|L|Pr|Pl|Bl|Ps|Nc)(>=|<=|<|>)", name)
    if not m:
        raise ParseError(f"unknown comparator {name!r}")
    kind, side = CMP_PREFIX[m.group(1)]
    op = m.group(2)
    p = Frac(p)
    if not 0 <= p <= 1:
        raise ValueError(f"comparator bound {p} outside [0,1]")
    if side == "P":
        return {">=": lambda: index(kind, p, None, phi),
                "<=": lambda: index(kind, 1 - p, None, neg(phi)),
                "<": lambda: neg(index(kind, p, None, phi)),
                ">": lambda: neg(index(kind, 1 - p, None, neg(phi)))}[op]()
    if side == "U":
        return {">=": lambda: index(kind, p, 0, phi),
                "<=": lambda: index(kind, 0, 1 - p, neg(phi)),
                "<": lambda: neg(index(kind, p, 0, phi)),
                ">": lambda: neg(index(kind, 0, 1 - p, neg(phi)))}[op]()
    return {">=": lambda: index(kind, 0, p, phi),
            "<=": lambda: index(kind, 1 - p, 0, neg(phi)),
            "<": lambda: neg(index(kind, 0, p, phi)),
            ">": lambda: neg(index(kind, 1 - p, 0, neg(phi)))}[op]()


def cmp(name, p, phi):
    """Shorthand for expand_abbreviation, e.g. ``cmp("U<=", "1/2", phi)``."""
    return expand_abbreviation(name, p, phi)


# lexer

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<cmp>(?:U|L|Pr|Pl|Bl|Ps|Nc)(?:>=|<=|≥|≤|<(?!->)|>))
  | (?P<op><->|->|[\[\](){},!&|])
  | (?P<num>\d+(?:/\d+|\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


def _lex(text):
    toks, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            toks.append((kind, m.group(), pos))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _lex(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None, kind=None):
        k, v, p = self.toks[self.i]
        if (value is not None and v != value) or (kind is not None and k != kind):
            want = repr(value) if value is not None else kind
            found = repr(v) if v else "end of input"
            raise ParseError(f"expected {want}, found {found}", p, self.text)
        self.i += 1
        return v, p

    def at(self, value):
        return self.toks[self.i][1] == value and self.toks[self.i][0] in ("op", "ident")

    def number(self):
        v, p = self.take(kind="num")
        q = Frac(v)
        if not 0 <= q <= 1:
            raise ParseError(f"modal index {v} outside [0,1]", p, self.text)
        return q

    def parse(self):
        f = self.iff()
        k, v, p = self.peek()
        if k != "end":
            raise ParseError(f"unexpected {v!r}", p, self.text)
        return f

    def iff(self):
        f = self.imp()
        while self.at("<->"):
            _, p = self.take()
            g = self.imp()
            f = _at(iff(f, g), p)
        return f

    def imp(self):
        f = self.disj()
        if self.at("->"):
            _, p = self.take()
            g = self.imp()
            return Implies(f, g, pos=p)
        return f

    def disj(self):
        f = self.conj()
        while self.at("|"):
            _, p = self.take()
            f = _at(disj(f, self.conj()), p)
        return f

    def conj(self):
        f = self.unary()
        while self.at("&"):
            _, p = self.take()
            f = _at(conj(f, self.unary()), p)
        return f

    def unary(self):
        k, v, p = self.peek()
        if k == "op" and v == "!":
            self.take()
            return Implies(self.unary(), BOT, pos=p)
        if k == "cmp":
            self.take()
            bound = self.number()
            return _at(expand_abbreviation(v, bound, self.unary()), p)
        if k == "op" and v == "[":
            self.take()
            label = self.modal_op()
            self.take("]")
            sub = self.unary()
            return Modal(label, sub, pos=p)
        return self.primary()

    def modal_op(self):
        k, v, p = self.peek()
        if k == "ident" and v in BOX_LABELS:
            self.take()
            return v
        if k == "op" and v == "(":
            self.take()
            a = self.number()
            self.take(",")
            b = self.number()
            self.take(")")
            return Idx("upper", a, b)
        if k == "ident" and v == "Pr":
            self.take()
            return Idx("prob", self.number(), None)
        if k == "ident" and v in ("Pl", "Ps"):
            self.take()
            self.take("(")
            a = self.number()
            self.take(",")
            b = self.number()
            self.take(")")
            return Idx("plaus" if v == "Pl" else "poss", a, b)
        raise ParseError(f"unknown modality {v!r}", p, self.text)

    def primary(self):
        k, v, p = self.peek()
        if k == "ident" and v == "bot":
            self.take()
            return Bot(pos=p)
        if k == "ident" and v == "top":
            self.take()
            return Implies(Bot(pos=p), Bot(pos=p), pos=p)
        if k == "op" and v == "{":
            self.take()
            labels = []
            while not self.at("}"):
                k2, v2, p2 = self.peek()
                if k2 in ("ident", "num") and re.fullmatch(r"[A-Za-z0-9_']+", v2):
                    labels.append(v2)
                    self.take()
                elif k2 == "op" and v2 == ",":
                    self.take()
                else:
                    raise ParseError(f"unexpected {v2!r} in set literal", p2, self.text)
            self.take("}")
            return Atom(frozenset(labels), pos=p)
        if k == "op" and v == "(":
            self.take()
            f = self.iff()
            self.take(")")
            return f
        found = repr(v) if v else "end of input"
        raise ParseError(f"expected a formula, found {found}", p, self.text)


def _at(f, pos):
    """Record a source position on a sugar-built node (outermost node only)."""
    object.__setattr__(f, "pos", pos)
    return f


def parse_raw(text):
    """Parse into a core Formula without sort checking."""
    return _Parser(text).parse()


# printer

_LEVEL = {"iff": 1, "imp": 2, "or": 3, "and": 4, "unary": 5}


def _match_neg(f):
    if isinstance(f, Implies) and isinstance(f.right, Bot):
        return f.left
    return None


def _match_disj(f):
    if isinstance(f, Implies):
        a = _match_neg(f.left)
        if a is not None:
            return a, f.right
    return None


def _match_conj(f):
    inner = _match_neg(f)
    if inner is None:
        return None
    d = _match_disj(inner)
    if d is None:
        return None
    a, b = _match_neg(d[0]), _match_neg(d[1])
    if a is None or b is None:
        return None
    return a, b


def _match_iff(f):
    c = _match_conj(f)
    if c is None:
        return None
    x, y = c
    if isinstance(x, Implies) and isinstance(y, Implies) and x.left == y.right and x.right == y.left:
        return x.left, x.right
    return None


def _fmt_rat(r):
    return str(r)


def format_label(label):
    if isinstance(label, str):
        return f"[{label}]"
    if label.kind == "upper":
        return f"[({_fmt_rat(label.p)},{_fmt_rat(label.q)})]"
    if label.kind == "prob":
        return f"[Pr {_fmt_rat(label.p)}]"
    name = "Pl" if label.kind == "plaus" else "Ps"
    return f"[{name}({_fmt_rat(label.p)},{_fmt_rat(label.q)})]"


def _label_key(s):
    return (0, int(s), s) if s.isdigit() else (1, 0, s)


def _fmt(f, ctx):
    def wrap(s, level):
        return f"({s})" if level < ctx else s

    m = _match_iff(f)
    if m:
        return wrap(f"{_fmt(m[0], 1)} <-> {_fmt(m[1], 2)}", 1)
    m = _match_conj(f)
    if m:
        return wrap(f"{_fmt(m[0], 4)} & {_fmt(m[1], 5)}", 4)
    if f == TOP:
        return "top"
    m = _match_neg(f)
    if m is not None:
        return "!" + _fmt(m, 5)
    m = _match_disj(f)
    if m:
        return wrap(f"{_fmt(m[0], 3)} | {_fmt(m[1], 4)}", 3)
    if isinstance(f, Implies):
        return wrap(f"{_fmt(f.left, 3)} -> {_fmt(f.right, 2)}", 2)
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, Atom):
        return "{" + ",".join(sorted(f.points, key=_label_key)) + "}"
    return format_label(f.label) + _fmt(f.sub, 5)


def print_formula(f):
    """Concrete syntax for a core formula; parse(print(f)) == f."""
    if isinstance(f, SortedFormula):
        f = f.formula
    return _fmt(f, 0)


# sorts


@dataclass(frozen=True)
class SortedFormula:
    formula: Formula
    sort: FunctorExpr
    measurable: bool
    functor: FunctorExpr = field(default=None, compare=False, repr=False)

    def __str__(self):
        return print_formula(self.formula)


def _atom_status(points, S):
    """(ok, measurable, message) for an atom literal at constant sort S."""
    M = S.space
    if M is None:
        return False, False, f"constant {S.name} is not bound to a space"
    unknown = [p for p in points if not M.algebra.has_point(p)]
    if unknown:
        return False, False, f"{sorted(unknown)} not points of {S.name}"
    if M.algebra.is_measurable(points):
        return True, True, ""
    if len(points) == 1:
        return True, False, ""
    return False, False, (f"{{{','.join(sorted(points, key=_label_key))}}} is neither measurable "
                          f"in {S.name} nor a singleton")


def _candidates(f, G, memo):
    key = id(f)
    if key in memo:
        return memo[key]
    nodes = G.nodes
    if isinstance(f, Bot):
        out = set(nodes)
    elif isinstance(f, Atom):
        out = {S for S in nodes if isinstance(S, Const) and _atom_status(f.points, S)[0]}
    elif isinstance(f, Implies):
        out = _candidates(f.left, G, memo) & _candidates(f.right, G, memo)
    elif isinstance(f.label, str):
        sub = _candidates(f.sub, G, memo)
        out = {S for S in nodes if G.target(S, f.label) in sub}
    else:
        sub = _candidates(f.sub, G, memo)
        out = {S for S in nodes if isinstance(S, Delta) and S.kind == f.label.kind and S.arg in sub}
    memo[key] = out
    return out


def _check(f, S, G, text, memo):
    """Check f at sort S top-down; returns the measurable flag."""
    key = (id(f), S)
    if key in memo:
        return memo[key]
    pos = f.pos
    if isinstance(f, Bot):
        out = True
    elif isinstance(f, Atom):
        if not isinstance(S, Const):
            raise FormulaSortError(f"set literal at sort {format_functor(S)}, which is not a constant sort",
                                   pos, text)
        ok, meas, msg = _atom_status(f.points, S)
        if not ok:
            raise FormulaSortError(msg, pos, text)
        out = meas
    elif isinstance(f, Implies):
        a = _check(f.left, S, G, text, memo)
        b = _check(f.right, S, G, text, memo)
        out = a and b
    elif isinstance(f.label, str):
        tgt = G.target(S, f.label)
        if tgt is None:
            raise FormulaSortError(f"sort {format_functor(S)} has no {f.label} edge", pos, text)
        out = _check(f.sub, tgt, G, text, memo)
    else:
        lab = f.label
        if not (isinstance(S, Delta) and S.kind == lab.kind):
            raise FormulaSortError(f"{format_label(lab)} needs a measure sort of kind {lab.kind}, "
                                   f"not {format_functor(S)}", pos, text)
        for v in (lab.p, lab.q):
            if v is not None and not 0 <= v <= 1:
                raise FormulaSortError(f"modal index {v} outside [0,1]", pos, text)
        if not _check(f.sub, S.arg, G, text, memo):
            raise FormulaSortError(f"non-measurable operand under {format_label(lab)}", pos, text)
        out = True
    memo[key] = out
    return out


def sort_check(f, T, sort=None, text=None):
    """Assign a sort to f against functor T.

    With ``sort`` None the sort is inferred; if several ingredients fit, Id is
    preferred, otherwise the formula is reported as ambiguous.
    """
    G = multigraph(T)
    if sort is None:
        cands = _candidates(f, G, {})
        if not cands:
            # re-run top-down from every ingredient; report the error found deepest
            errs = []
            for S in G.nodes:
                try:
                    _check(f, S, G, text, {})
                except FormulaSortError as e:
                    errs.append(e)
            best = max(errs, key=lambda e: -1 if e.pos is None else e.pos)
            raise FormulaSortError(f"no sort fits the formula: {best.message}", best.pos, text)
        if len(cands) == 1:
            sort = next(iter(cands))
        elif ID in cands:
            sort = ID
        else:
            names = sorted(format_functor(S) for S in cands)
            raise FormulaSortError(f"ambiguous sort, candidates {names}; pass a sort", None, text)
    elif sort not in G.nodes:
        raise FormulaSortError(f"{format_functor(sort)} is not an ingredient of {format_functor(T)}",
                               None, text)
    measurable = _check(f, sort, G, text, {})
    return SortedFormula(f, sort, measurable, T)


def parse_formula(text, T, sort=None):
    """Parse and sort-check ``text`` against functor T (sort may be a string)."""
    if isinstance(sort, str):
        from .functors import parse_functor
        consts = {c.name: c.space for c in _consts(T)}
        sort = parse_functor(sort, consts)
    f = parse_raw(text)
    return sort_check(f, T, sort, text)


def _consts(T):
    from .functors import constants
    return constants(T)


def subformulas(f):
    """Every subformula occurrence, pre-order."""
    if isinstance(f, SortedFormula):
        f = f.formula
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, Implies):
            stack.append(g.right)
            stack.append(g.left)
        elif isinstance(g, Modal):
            stack.append(g.sub)


def modal_depth(f):
    if isinstance(f, SortedFormula):
        f = f.formula
    if isinstance(f, Implies):
        return max(modal_depth(f.left), modal_depth(f.right))
    if isinstance(f, Modal):
        return 1 + modal_depth(f.sub)
    return 0


def sort_of_sub(f, S, G):
    """Sort of the immediate subformula(s) of f when f has sort S."""
    if isinstance(f, Implies):
        return S
    if isinstance(f.label, str):
        return G.target(S, f.label)
    return S.arg


def operator_text(label, p="1/2", q="1/2"):
    """A concrete modal operator for an edge label, e.g. "[pr1]" or "[(1/2,1/2)]"."""
    if label in BOX_LABELS:
        return f"[{label}]"
    return format_label(Idx(label, Frac(p), None if label == "prob" else Frac(q)))


def operator_label(op_text):
    """Edge label consumed by a concrete operator such as "[Pl(0,1)]"."""
    f = parse_raw(op_text + "bot")
    lab = f.label
    return lab if isinstance(lab, str) else lab.kind

"""Axiom schemas, inference-rule instances and the randomized soundness harness.

Schemas are addressed by short ids: ``"1"`` (tautologies), ``"2a"`` ... ``"5b"``
for the boolean and structural modalities, ``"6a"``-``"6d"`` for upper
probabilities, ``"8a"``-``"8c"`` for probabilities, ``"9a"``-``"9g"`` for
plausibilities and ``"10a"``-``"10g"`` for possibilities.  Derived principles
use ``"D-..."`` ids and deliberately broken variants end in ``"!"``.

Rules are ``mp``, ``cut``, ``deduction``, ``nec``, ``const``, ``box``,
``arch``, ``cover1`` and ``cover2``.  The harness checks rules semantically in
each generated model: a consequence Γ ⊢ φ is read pointwise (every element
satisfying Γ satisfies φ), and side conditions are discharged in the model.
"""

from dataclasses import dataclass, field
from fractions import Fraction as Frac
from itertools import combinations
import random

from . import measures as ms
from .errors import DomainError, SchemaError, SideConditionError
from .functors import (Const, Coprod, Delta, Id, MeasureElem, Prod, SupportAlgebra, bind_constants,
                       constants, format_element, format_functor, is_delta_free, multigraph,
                       parse_functor, random_element)
from .logic import (BOT, TOP, Atom, Bot, Implies, big_conj, big_disj, box, cmp, conj, disj, iff,
                    implies, index, neg, print_formula, sort_check)
from .models import Coalgebra, MeasureDecl, save_model, validate
from .semantics import checker, default_probes, sample_elements
from .spaces import Inj, UncertaintySpace, generate_algebra

ZERO, ONE = Frac(0), Frac(1)
UPPER_PREFIX = {"upper": "U", "prob": "Pr", "plaus": "Pl", "poss": "Ps"}
LOWER_PREFIX = {"upper": "L", "prob": "Pr", "plaus": "Bl", "poss": "Nc"}
GRID = tuple(Frac(x) for x in ("0", "1/4", "1/3", "1/2", "2/3", "3/4", "1"))


def up(kind, op, p, phi):
    return cmp(UPPER_PREFIX[kind] + op, p, phi)


def lo(kind, op, p, phi):
    return cmp(LOWER_PREFIX[kind] + op, p, phi)


# boolean tautologies


def _boolean_vars(f, out):
    if isinstance(f, Bot):
        return
    if isinstance(f, Implies):
        _boolean_vars(f.left, out)
        _boolean_vars(f.right, out)
    elif f not in out:
        out.append(f)


def _truth(f, val):
    if isinstance(f, Bot):
        return False
    if isinstance(f, Implies):
        return not _truth(f.left, val) or _truth(f.right, val)
    return val[f]


def is_tautology(f, max_vars=14):
    """Truth-table check, treating atoms and modal subformulas as variables."""
    vs = []
    _boolean_vars(f, vs)
    if len(vs) > max_vars:
        raise DomainError(f"{len(vs)} propositional variables is too many for a truth table")
    for row in range(1 << len(vs)):
        if not _truth(f, {v: bool(row >> i & 1) for i, v in enumerate(vs)}):
            return False
    return True


TAUTOLOGIES = (
    lambda a, b, c: implies(a, implies(b, a)),
    lambda a, b, c: implies(implies(a, implies(b, c)), implies(implies(a, b), implies(a, c))),
    lambda a, b, c: implies(implies(neg(a), neg(b)), implies(b, a)),
    lambda a, b, c: disj(a, neg(a)),
    lambda a, b, c: implies(neg(neg(a)), a),
    lambda a, b, c: implies(implies(implies(a, b), a), a),
    lambda a, b, c: implies(conj(a, b), conj(b, a)),
    lambda a, b, c: iff(implies(a, b), implies(neg(b), neg(a))),
    lambda a, b, c: implies(BOT, a),
    lambda a, b, c: iff(conj(a, disj(b, c)), disj(conj(a, b), conj(a, c))),
)


# schemas


@dataclass(frozen=True)
class Schema:
    id: str
    shape: str        # any, const, prod, coprod, id, edge, delta, or a delta kind
    params: tuple
    doc: str
    mutant: bool = False


def _rat01(b, key):
    try:
        v = ms.rat(b[key])
    except KeyError:
        raise SchemaError(f"missing binding {key!r}") from None
    if not ZERO <= v <= ONE:
        raise DomainError(f"{key} = {v} is outside [0,1]")
    return v


def _get(b, key):
    try:
        return b[key]
    except KeyError:
        raise SchemaError(f"missing binding {key!r}") from None


def _j(b):
    j = int(b.get("j", 1))
    if j not in (1, 2):
        raise DomainError(f"j must be 1 or 2, not {j}")
    return j


def _kind_of(S):
    return S.kind


def _lt(b, S):
    """≤p → <q, for p < q."""
    k, p, q = _kind_of(S), _rat01(b, "p"), _rat01(b, "q")
    if not p < q:
        raise DomainError(f"the schema needs p < q, got p = {p}, q = {q}")
    phi = _get(b, "phi")
    return implies(up(k, "<=", p, phi), up(k, "<", q, phi))


def _lt_mutant(b, S):
    """≤p → <p: fails wherever the value is exactly p."""
    k, p = _kind_of(S), _rat01(b, "p")
    phi = _get(b, "phi")
    return implies(up(k, "<=", p, phi), up(k, "<", p, phi))


def _le(b, S):
    k, p, phi = _kind_of(S), _rat01(b, "p"), _get(b, "phi")
    return implies(up(k, "<", p, phi), up(k, "<=", p, phi))


def _mono_k(b, S):
    """lower ≥1 (φ→ψ) → (upper ≥p φ → upper ≥p ψ)."""
    k, p = _kind_of(S), _rat01(b, "p")
    phi, psi = _get(b, "phi"), _get(b, "psi")
    return implies(lo(k, ">=", 1, implies(phi, psi)), implies(up(k, ">=", p, phi), up(k, ">=", p, psi)))


def _split(b, S):
    k, p, q, phi = _kind_of(S), _rat01(b, "p"), _rat01(b, "q"), _get(b, "phi")
    return iff(index(k, p, q, phi), conj(up(k, ">=", p, phi), lo(k, ">=", q, phi)))


def _upper_lower_le(b, S):
    k, p, phi = _kind_of(S), _rat01(b, "p"), _get(b, "phi")
    return implies(up(k, "<=", p, phi), lo(k, "<=", p, phi))


def nonempty_subsets(n):
    """Nonempty subsets of {1..n} by size, then lexicographically."""
    return [frozenset(c) for r in range(1, n + 1) for c in combinations(range(1, n + 1), r)]


def _incl_excl(b):
    phis = list(_get(b, "phis"))
    n = len(phis)
    if n < 1:
        raise DomainError("need at least one formula")
    subsets = nonempty_subsets(n)
    raw = _get(b, "pI")
    if hasattr(raw, "items"):
        pI = {frozenset(k): ms.rat(v) for k, v in raw.items()}
    else:
        raw = list(raw)
        if len(raw) != len(subsets):
            raise SchemaError(f"need {len(subsets)} values p_I, got {len(raw)}")
        pI = {I: ms.rat(v) for I, v in zip(subsets, raw)}
    missing = [sorted(I) for I in subsets if I not in pI]
    if missing:
        raise SchemaError(f"no p_I for I = {missing[0]}")
    for v in pI.values():
        if not ZERO <= v <= ONE:
            raise DomainError(f"p_I = {v} is outside [0,1]")
    q = sum(((-1) ** (len(I) + 1) * pI[I] for I in subsets), ZERO)
    parts = []
    for I in subsets:
        psi = big_disj([phis[i - 1] for i in sorted(I)])
        parts.append(up("plaus", "<=" if len(I) % 2 else ">=", pI[I], psi))
    return phis, q, big_conj(parts)


def inclusion_exclusion_bound(pI, n):
    """q = Σ (-1)^{|I|+1} p_I over nonempty I ⊆ {1..n}."""
    return sum(((-1) ** (len(I) + 1) * ms.rat(pI[frozenset(I)]) for I in nonempty_subsets(n)), ZERO)


def _9f(b, S):
    phis, q, prem = _incl_excl(b)
    if q < 0:
        raise DomainError(f"the bound q = {q} is negative; use 9g")
    return implies(prem, up("plaus", "<=", min(q, ONE), big_conj(phis)))


def _9g(b, S):
    phis, q, prem = _incl_excl(b)
    if q >= 0:
        raise DomainError(f"the bound q = {q} is not negative; use 9f")
    return neg(prem)


def _tautology(b, S):
    if "formula" in b:
        f = b["formula"]
    else:
        t = int(_get(b, "template"))
        if not 0 <= t < len(TAUTOLOGIES):
            raise DomainError(f"no tautology template {t}")
        f = TAUTOLOGIES[t](_get(b, "phi"), b.get("psi", BOT), b.get("chi", TOP))
    if not is_tautology(f):
        raise DomainError(f"{print_formula(f)} is not a boolean tautology")
    return f


def _const(member):
    def build(b, S):
        c, A = _get(b, "c"), frozenset(_get(b, "A"))
        if (c in A) != member:
            raise DomainError(f"{c} {'∉' if member else '∈'} A; use {'2b' if member else '2a'}")
        return implies(Atom(frozenset([c])), Atom(A) if member else neg(Atom(A)))
    return build


def _func(label_of):
    def build(b, S):
        lab, phi = label_of(b), _get(b, "phi")
        return implies(neg(box(lab, phi)), box(lab, neg(phi)))
    return build


def _total(label_of):
    def build(b, S):
        return neg(box(label_of(b), BOT))
    return build


def _pr(b):
    return f"pr{_j(b)}"


def _in(b):
    return f"in{_j(b)}"


def _poss_zero(b, S):
    return up("poss", "<=", 0, BOT)


def _poss_max(b, S):
    p, q = _rat01(b, "p"), _rat01(b, "q")
    phi, psi = _get(b, "phi"), _get(b, "psi")
    return implies(conj(up("poss", "<=", p, phi), up("poss", "<=", q, psi)),
                   up("poss", "<=", max(p, q), disj(phi, psi)))


def _d_nonneg(b, S):
    k, phi = _kind_of(S), _get(b, "phi")
    if k == "prob":
        return up(k, ">=", 0, phi)
    return conj(up(k, ">=", 0, phi), lo(k, ">=", 0, phi))


def _d_bot(b, S):
    k, p = _kind_of(S), _rat01(b, "p")
    if p == 0:
        raise DomainError("the principle needs p > 0")
    if k == "prob":
        return up(k, "<", p, BOT)
    return conj(up(k, "<", p, BOT), lo(k, "<", p, BOT))


def _d_lower_upper(b, S):
    k, p, phi = _kind_of(S), _rat01(b, "p"), _get(b, "phi")
    return implies(lo(k, ">=", p, phi), up(k, ">=", p, phi))


def _d_mono(b, S):
    k, p, q, phi = _kind_of(S), _rat01(b, "p"), _rat01(b, "q"), _get(b, "phi")
    if not q > p:
        raise DomainError(f"the principle needs q > p, got p = {p}, q = {q}")
    out = implies(up(k, ">=", q, phi), up(k, ">=", p, phi))
    if k != "prob":
        out = conj(out, implies(lo(k, ">=", q, phi), lo(k, ">=", p, phi)))
    return out


def _d_k(b, S):
    lab, phi, psi = _get(b, "label"), _get(b, "phi"), _get(b, "psi")
    return implies(box(lab, implies(phi, psi)), implies(box(lab, phi), box(lab, psi)))


def _d_top(b, S):
    k, p = _kind_of(S), _rat01(b, "p")
    if k == "prob":
        return index(k, p, None, TOP)
    return index(k, p, _rat01(b, "q"), TOP)


_BUILDERS = {}
SCHEMAS = {}


def _schema(id, shape, params, doc, build, mutant=False):
    SCHEMAS[id] = Schema(id, shape, tuple(params), doc, mutant)
    _BUILDERS[id] = build


_schema("1", "any", ("formula | template phi psi chi",), "boolean tautologies", _tautology)
_schema("2a", "const", ("c", "A"), "{c} → A for c ∈ A", _const(True))
_schema("2b", "const", ("c", "A"), "{c} → ¬A for c ∉ A", _const(False))
_schema("3a", "prod", ("j", "phi"), "¬[pr_j]φ → [pr_j]¬φ", _func(_pr))
_schema("3b", "prod", ("j",), "¬[pr_j]⊥", _total(_pr))
_schema("4a", "coprod", ("j", "phi"), "¬[in_j]φ → [in_j]¬φ", _func(_in))
_schema("4b", "coprod", (), "¬[in1]⊥ ↔ [in2]⊥",
        lambda b, S: iff(neg(box("in1", BOT)), box("in2", BOT)))
_schema("5a", "id", ("phi",), "¬[next]φ → [next]¬φ", _func(lambda b: "next"))
_schema("5b", "id", (), "¬[next]⊥", _total(lambda b: "next"))
for _k, _n in (("upper", "6"), ("prob", "8"), ("plaus", "9"), ("poss", "10")):
    _P = UPPER_PREFIX[_k]
    _schema(_n + "a", _k, ("p", "q", "phi"), f"{_P}≤p φ → {_P}<q φ for p < q", _lt)
    _schema(_n + "b", _k, ("p", "phi"), f"{_P}<p φ → {_P}≤p φ", _le)
    _schema(_n + "a!", _k, ("p", "phi"), f"broken: {_P}≤p φ → {_P}<p φ", _lt_mutant, mutant=True)
_schema("6c", "upper", ("p", "phi", "psi"), "L≥1(φ→ψ) → (U≥p φ → U≥p ψ)", _mono_k)
_schema("6d", "upper", ("p", "q", "phi"), "[(p,q)]φ ↔ (U≥p φ ∧ L≥q φ)", _split)
_schema("8c", "prob", ("p", "phi", "psi"), "Pr≥1(φ→ψ) → (Pr≥p φ → Pr≥p ψ)", _mono_k)
_schema("9c", "plaus", ("p", "phi"), "Pl≤p φ → Bl≤p φ", _upper_lower_le)
_schema("9d", "plaus", ("p", "phi", "psi"), "Bl≥1(φ→ψ) → (Pl≥p φ → Pl≥p ψ)", _mono_k)
_schema("9e", "plaus", ("p", "q", "phi"), "[(p,q)]_Pl φ ↔ (Pl≥p φ ∧ Bl≥q φ)", _split)
_schema("9f", "plaus", ("phis", "pI"), "inclusion-exclusion upper bound, for q ≥ 0", _9f)
_schema("9g", "plaus", ("phis", "pI"), "inclusion-exclusion inconsistency, for q < 0", _9g)
_schema("10c", "poss", (), "Ps≤0 ⊥", _poss_zero)
_schema("10d", "poss", ("p", "phi"), "Ps≤p φ → Nc≤p φ", _upper_lower_le)
_schema("10e", "poss", ("p", "q", "phi", "psi"), "Ps≤p φ ∧ Ps≤q ψ → Ps≤max(p,q) (φ ∨ ψ)", _poss_max)
_schema("10f", "poss", ("p", "phi", "psi"), "Nc≥1(φ→ψ) → (Ps≥p φ → Ps≥p ψ)", _mono_k)
_schema("10g", "poss", ("p", "q", "phi"), "[(p,q)]_Ps φ ↔ (Ps≥p φ ∧ Nc≥q φ)", _split)
_schema("D-nonneg", "delta", ("phi",), "both sides of every measure are ≥ 0", _d_nonneg)
_schema("D-bot", "delta", ("p",), "the empty set has measure < p for p > 0", _d_bot)
_schema("D-lower-upper", "delta", ("p", "phi"), "lower ≥p φ → upper ≥p φ", _d_lower_upper)
_schema("D-upper-lower", "delta", ("p", "phi"), "upper ≤p φ → lower ≤p φ", _upper_lower_le)
_schema("D-mono", "delta", ("p", "q", "phi"), "≥q φ → ≥p φ for q > p", _d_mono)
_schema("D-top", "delta", ("p", "q"), "[(p,q)]⊤", _d_top)
_schema("D-K", "edge", ("label", "phi", "psi"), "[κ](φ→ψ) → ([κ]φ → [κ]ψ) for structural κ", _d_k)

AXIOM_IDS = tuple(i for i, s in SCHEMAS.items() if not s.mutant and not i.startswith("D-"))
DERIVED_IDS = tuple(i for i in SCHEMAS if i.startswith("D-"))
MUTANT_IDS = tuple(i for i, s in SCHEMAS.items() if s.mutant)
RULE_IDS = ("mp", "cut", "deduction", "nec", "const", "box", "arch", "cover1", "cover2")


def applicable(schema_id, S, G=None):
    """Whether the schema has instances at sort S."""
    shape = SCHEMAS[schema_id].shape
    if shape == "any":
        return True
    if shape == "const":
        return isinstance(S, Const)
    if shape == "prod":
        return isinstance(S, Prod)
    if shape == "coprod":
        return isinstance(S, Coprod)
    if shape == "id":
        return isinstance(S, Id)
    if shape == "edge":
        return G is not None and any(e.label in ("pr1", "pr2", "in1", "in2", "next") for e in G.out(S))
    if shape == "delta":
        return isinstance(S, Delta)
    return isinstance(S, Delta) and S.kind == shape


def instantiate_axiom(schema_id, bindings, sort, T):
    """Instantiate a schema at ``sort`` (an ingredient of T); returns a SortedFormula.

    Formulas in ``bindings`` are core formulas at the operand sort.  Raises
    SchemaError for unknown ids or missing bindings, DomainError when a side
    condition on the parameters fails, and SortError/FormulaSortError when
    the bindings are ill-sorted.
    """
    if schema_id not in SCHEMAS:
        raise SchemaError(f"unknown schema {schema_id!r}")
    if isinstance(T, str):
        T = parse_functor(T)
    G = multigraph(T)
    if isinstance(sort, str):
        sort = parse_functor(sort, {c.name: c.space for c in constants(T)})
    if sort not in G.nodes:
        raise SchemaError(f"{format_functor(sort)} is not an ingredient of {format_functor(T)}")
    if not applicable(schema_id, sort, G):
        raise SchemaError(f"schema {schema_id} does not apply at sort {format_functor(sort)}")
    f = _BUILDERS[schema_id](dict(bindings), sort)
    return sort_check(f, T, sort)


# rule instances


@dataclass(frozen=True)
class RuleInstance:
    """A generated rule instance: premises ⊢ conclusion, plus side-condition data.

    For consequence rules (mp, cut, deduction, const, box, arch) ``premises``
    and ``conclusion`` describe the derived consequence; ``given`` holds
    the consequences assumed by the rule, each a pair (Γ, φ).  For theorem
    rules (nec, cover1, cover2) ``given`` lists the premise theorems.
    """

    rule: str
    sort: object
    premises: tuple
    conclusion: object
    given: tuple = ()
    given_sort: object = None
    side: dict = field(default_factory=dict, compare=False)

    def describe(self):
        prem = ", ".join(print_formula(f) for f in self.premises)
        text = f"{{{prem}}} ⊢ {print_formula(self.conclusion)}" if self.premises else f"⊢ {print_formula(self.conclusion)}"
        return f"{self.rule} at {format_functor(self.sort)}: {text}"


def cover_bound(ps, n, k):
    """p = 0 ∨ (1 ∧ (Σp_i − k)/n)."""
    return max(ZERO, min(ONE, (sum((ms.rat(p) for p in ps), ZERO) - k) / n))


def gen_cover_rule_instance(phi, phis, n, k, ps, model, kind="upper", rule=None, sort=None):
    """Build a cover-rule instance after checking its side conditions in the model.

    The operand sort must be enumerable.  Cover-1 (n ≥ 1) concludes
    (⋀ ≤p_i φ_i) → ≤p φ with p = 0 ∨ (1 ∧ (Σp_i − k)/n); cover-2 (Σp_i < k)
    concludes ¬(⋀ ≤p_i φ_i).  Raises SideConditionError naming an uncovered
    point when ⟦φ⟧ is not covered n+k times or the carrier k times.
    """
    if kind not in ("upper", "prob"):
        raise SchemaError(f"cover rules are given for upper and prob measures, not {kind}")
    rule = rule or ("cover1" if n >= 1 else "cover2")
    ps = [ms.rat(p) for p in ps]
    phis = list(phis)
    if len(ps) != len(phis):
        raise SchemaError("need one bound p_i per formula φ_i")
    if any(not ZERO <= p <= ONE for p in ps):
        raise DomainError("bounds p_i must lie in [0,1]")
    if k < 0 or n < 0:
        raise DomainError("n and k must be non-negative")
    T = model.T
    c = checker(model)
    S = sort
    if S is None:
        probe = phis[0] if phis else phi
        S = sort_check(probe, T).sort
    if not is_delta_free(S):
        raise SchemaError(f"cover side conditions need an enumerable sort, not {format_functor(S)}")
    D = next((N for N in multigraph(T).nodes if isinstance(N, Delta) and N.kind == kind and N.arg == S), None)
    if D is None:
        raise SchemaError(f"{format_functor(T)} has no {kind} measure over {format_functor(S)}")
    for f in phis + ([phi] if phi is not None else []):
        sort_check(f, T, S)
    sets = [c.interp(f, S) for f in phis]
    for x in c.space(S).carrier:
        if sum(1 for U in sets if x in U) < k:
            raise SideConditionError(f"{format_element(x)} is covered fewer than k = {k} times", x)
    prem = [up(kind, "<=", p, f) for p, f in zip(ps, phis)]
    side = {"m": len(phis), "n": n, "k": k, "ps": tuple(ps),
            "covers_k": big_disj([big_conj(I) for I in combinations(phis, k)])}
    if rule == "cover1":
        if n < 1:
            raise DomainError("cover-1 needs n ≥ 1")
        U = c.interp(phi, S)
        for x in U:
            if sum(1 for V in sets if x in V) < n + k:
                raise SideConditionError(f"{format_element(x)} ∈ ⟦φ⟧ is covered fewer than n+k = {n + k} times", x)
        p = cover_bound(ps, n, k)
        side.update(p=p, covers_nk=implies(phi, big_disj([big_conj(I) for I in combinations(phis, n + k)])))
        concl = implies(big_conj(prem), up(kind, "<=", p, phi))
    elif rule == "cover2":
        if not sum(ps, ZERO) < k:
            raise DomainError(f"cover-2 needs Σp_i = {sum(ps, ZERO)} < k = {k}")
        concl = neg(big_conj(prem))
    else:
        raise SchemaError(f"unknown cover rule {rule!r}")
    return RuleInstance(rule, D, (), sort_check(concl, T, D).formula, side=side)


# random models


def _atom_count(S, a):
    if isinstance(S, Id):
        return a
    if isinstance(S, Const):
        return S.space.algebra.n_atoms
    if isinstance(S, Prod):
        return _atom_count(S.left, a) * _atom_count(S.right, a)
    if isinstance(S, Coprod):
        return _atom_count(S.left, a) + _atom_count(S.right, a)
    return None


def _random_partition(points, k, rng):
    pts = list(points)
    rng.shuffle(pts)
    blocks = [[p] for p in pts[:k]]
    for p in pts[k:]:
        rng.choice(blocks).append(p)
    order = {p: i for i, p in enumerate(points)}
    blocks = [sorted(b, key=order.get) for b in blocks]
    blocks.sort(key=lambda b: order[b[0]])
    return blocks


def _rebuild(m, A):
    if isinstance(m, ms.ProbabilityMeasure):
        return ms.ProbabilityMeasure(A, m.weights)
    if isinstance(m, ms.Envelope):
        return ms.Envelope(m.kind, tuple(_rebuild(mu, A) for mu in m.family))
    if isinstance(m, ms.Mass):
        return ms.Mass(A, m.focal, m.reading)
    if isinstance(m, ms.PossDist):
        return ms.PossDist(A, m.dist, m.reading)
    return ms.Tabulated(A, m.kind, m.values)


class _Namer:
    def __init__(self):
        self.decls = []
        self.count = 0

    def fresh(self, prefix):
        self.count += 1
        return f"{prefix}{self.count}"

    def declare(self, m, S, prefix):
        for d in self.decls:
            if d.measure == m and d.sort == S:
                return d.name
        name = self.fresh(prefix)
        form = {ms.ProbabilityMeasure: "prob", ms.Mass: "mass", ms.PossDist: "poss"}.get(type(m), "table")
        self.decls.append(MeasureDecl(name, form, m, S))
        return name

    def name(self, e, S):
        if isinstance(S, (Id, Const)):
            return e
        if isinstance(S, Prod):
            return (self.name(e[0], S.left), self.name(e[1], S.right))
        if isinstance(S, Coprod):
            return Inj(e.side, self.name(e.value, S.left if e.side == 1 else S.right))
        m = e.measure
        if not is_delta_free(S.arg):
            m = _rebuild(m, SupportAlgebra([self.name(x, S.arg) for x in m.algebra.carrier]))
        if isinstance(m, ms.Envelope):
            members = tuple(self.declare(mu, S.arg, "mu") for mu in m.family)
            for d in self.decls:
                if d.form == m.kind.value and d.members == members:
                    return MeasureElem(m, d.name)
            name = self.fresh("g")
            self.decls.append(MeasureDecl(name, m.kind.value, m, None, members))
            return MeasureElem(m, name)
        return MeasureElem(m, self.declare(m, S.arg, "mu" if isinstance(m, ms.ProbabilityMeasure) else "g"))


def random_space(name, labels, rng, max_atoms=4):
    k = rng.randint(1, min(len(labels), max_atoms)) if labels else 0
    blocks = _random_partition(labels, k, rng) if labels else []
    return UncertaintySpace(name, generate_algebra(labels, blocks[:-1]))


def random_coalgebra(T, size=3, seed=0, max_atoms=4, max_family=3, max_focal=4, max_delta_atoms=8):
    """A random T-coalgebra with ``size`` states, deterministic in ``seed``.

    Unbound constants get 2-3 point spaces.  alpha is drawn once per atom of
    the state space, so it is measurable by construction, and every measure
    is valid by construction.  Measure arguments are kept to at most
    ``max_delta_atoms`` atoms.
    """
    rng = random.Random(seed)
    if isinstance(T, str):
        T = parse_functor(T)
    size = max(1, min(int(size), 6))
    spaces = {}
    for c in constants(T):
        if c.space is not None:
            spaces[c.name] = c.space
        else:
            labels = ["a", "b", "c"][:rng.randint(2, 3)]
            spaces[c.name] = random_space(c.name, labels, rng, 3)
    T = bind_constants(T, spaces)
    name = "X"
    while name in spaces:
        name += "_"
    labels = [f"x{i}" for i in range(size)]
    a = rng.randint(1, min(size, max_atoms))
    args = [N.arg for N in multigraph(T).nodes if isinstance(N, Delta) and is_delta_free(N.arg)]
    while a > 1 and any(_atom_count(S, a) > max_delta_atoms for S in args):
        a -= 1
    blocks = _random_partition(labels, a, rng)
    X = UncertaintySpace(name, generate_algebra(labels, blocks[:-1]))
    namer = _Namer()
    alpha = {}
    for block in blocks:
        e = namer.name(random_element(T, X, rng, max_family, max_focal), T)
        for x in block:
            alpha[x] = e
    all_spaces = dict(spaces)
    all_spaces[name] = X
    return validate(Coalgebra(X, T, alpha, all_spaces, namer.decls))


# harness


@dataclass(frozen=True)
class Violation:
    trial: int
    model_seed: int
    schema: str
    sort: str
    formula: str
    witness: str
    model_text: str = field(default="", compare=False)

    def to_dict(self):
        return {"trial": self.trial, "model_seed": self.model_seed, "schema": self.schema,
                "sort": self.sort, "formula": self.formula, "witness": self.witness,
                "model": self.model_text}


@dataclass
class HarnessReport:
    functor: str
    trials: int
    seed: int
    schemas: tuple
    checked: dict = field(default_factory=dict)
    vacuous: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def to_dict(self):
        return {"functor": self.functor, "trials": self.trials, "seed": self.seed,
                "schemas": list(self.schemas), "checked": dict(self.checked),
                "vacuous": dict(self.vacuous), "violations": [v.to_dict() for v in self.violations],
                "ok": self.ok}

    def to_text(self):
        lines = [f"functor {self.functor}; trials {self.trials}; seed {self.seed}"]
        for sid in self.checked:
            extra = f" ({self.vacuous[sid]} vacuous)" if self.vacuous.get(sid) else ""
            lines.append(f"  {sid:<14} {self.checked[sid]:>6} checked{extra}")
        lines.append(f"violations: {len(self.violations)}")
        for v in self.violations:
            lines.append(f"  trial {v.trial} (model seed {v.model_seed}) schema {v.schema} at {v.sort}:")
            lines.append(f"    {v.formula}")
            lines.append(f"    fails at {v.witness}")
        return "\n".join(lines) + "\n"


def describe_element(e):
    if isinstance(e, MeasureElem):
        if e.name:
            return e.name
        A = e.measure.algebra
        g = e.upper
        vals = ", ".join(f"{g.value(1 << i)}" for i in range(A.n_atoms))
        return f"{e.measure.kind} measure with atom values [{vals}]"
    if isinstance(e, tuple):
        return "(" + ", ".join(describe_element(x) for x in e) + ")"
    if isinstance(e, Inj):
        return f"in{e.side}({describe_element(e.value)})"
    return format_element(e)


class _Trial:
    """One generated model with its samples and a formula generator."""

    def __init__(self, model, rng, index, model_seed):
        self.model = model
        self.rng = rng
        self.index = index
        self.model_seed = model_seed
        self.c = checker(model)
        self.G = multigraph(model.T)
        self.probes = default_probes(model, seed=model_seed)
        self._samples = {}

    def elements(self, S):
        if is_delta_free(S):
            return list(self.c.space(S).carrier)
        hit = self._samples.get(S)
        if hit is None:
            hit = self._samples[S] = sample_elements(S, self.model, self.probes, cap=60)
        return hit

    def truth(self, e, f, S):
        return self.c.member(e, f, S)

    def counterexample(self, f, S):
        if is_delta_free(S):
            I = self.c.interp(f, S)
            for x in self.c.space(S).carrier:
                if x not in I:
                    return x
            return None
        for e in self.elements(S):
            if not self.c.holds(e, f, S):
                return e
        return None

    def entails(self, gamma, f, S):
        """First element satisfying all of gamma but not f, or None."""
        for e in self.elements(S):
            if all(self.truth(e, g, S) for g in gamma) and not self.truth(e, f, S):
                return e
        return None

    # formulas

    def formula(self, S, depth=2):
        rng = self.rng
        r = rng.random()
        if depth <= 0 or r < 0.25:
            return self._base(S)
        if r < 0.45:
            a, b = self.formula(S, depth - 1), self.formula(S, depth - 1)
            return rng.choice((implies(a, b), conj(a, b), disj(a, b)))
        if r < 0.55:
            return neg(self.formula(S, depth - 1))
        edges = self.G.out(S)
        if not edges:
            return self._base(S)
        e = rng.choice(edges)
        sub = self.formula(e.target, depth - 1)
        if e.label in ("pr1", "pr2", "in1", "in2", "next"):
            return box(e.label, sub)
        p = rng.choice(self.thresholds(S, sub))
        if e.label == "prob":
            return index("prob", p, None, sub)
        q = rng.choice(self.thresholds(S, sub))
        return index(e.label, p, q, sub)

    def _base(self, S):
        rng = self.rng
        if isinstance(S, Const) and S.space.algebra.n_atoms and rng.random() < 0.8:
            A = S.space.algebra
            mask = rng.randint(1, A.full_mask) if A.full_mask else 0
            return Atom(frozenset(A.points_of(mask)))
        return rng.choice((BOT, TOP))

    def values(self, D, phi):
        """Upper and lower values of ⟦φ⟧ over the sampled measures at D."""
        out = set()
        for g in self.elements(D):
            mask = self.c.operand_mask(g, phi, D.arg)
            u = g.upper
            out.add(u.value(mask))
            out.add(ONE - u.value(g.measure.algebra.full_mask ^ mask))
        return sorted(out)

    def thresholds(self, D, phi):
        return sorted(set(GRID) | set(self.values(D, phi)))

    def pick(self, D, phi):
        return self.rng.choice(self.thresholds(D, phi))


def _bindings(schema_id, S, t):
    """Random bindings for the schema at sort S, or None if none exist."""
    rng = t.rng
    sch = SCHEMAS[schema_id]
    b = {}
    if sch.shape in ("upper", "prob", "plaus", "poss", "delta"):
        arg = S.arg
        if "phi" in sch.params:
            b["phi"] = t.formula(arg)
        if "psi" in sch.params:
            b["psi"] = t.formula(arg) if rng.random() < 0.5 else disj(b["phi"], t.formula(arg))
        phi = b.get("phi", BOT)
        vals = t.thresholds(S, phi)
        if schema_id.endswith("a") or schema_id == "D-mono":
            p = rng.choice(vals[:-1])
            higher = [v for v in vals if v > p]
            q = rng.choice(higher)
            b["p"], b["q"] = (p, q) if schema_id != "D-mono" else (p, q)
        else:
            b["p"] = rng.choice(vals)
            b["q"] = rng.choice(vals)
        if schema_id == "D-bot" and b["p"] == 0:
            b["p"] = rng.choice([v for v in vals if v > 0])
        if schema_id in ("9f", "9g"):
            n = rng.randint(1, 3) if schema_id == "9f" else rng.randint(2, 3)
            phis = [t.formula(arg) for _ in range(n)]
            subsets = nonempty_subsets(n)
            if schema_id == "9f":
                g = rng.choice(t.elements(S))
                pI = {}
                for I in subsets:
                    mask = t.c.operand_mask(g, big_disj([phis[i - 1] for i in sorted(I)]), arg)
                    pI[I] = g.upper.value(mask)
                    if rng.random() < 0.3:
                        pI[I] = rng.choice(GRID)
            else:
                pI = {I: (rng.choice(GRID[:3]) if len(I) % 2 else rng.choice(GRID[3:])) for I in subsets}
            q = inclusion_exclusion_bound(pI, n)
            if (q >= 0) != (schema_id == "9f"):
                return None
            b["phis"], b["pI"] = phis, pI
        return b
    if schema_id == "1":
        b["template"] = rng.randrange(len(TAUTOLOGIES))
        b["phi"], b["psi"], b["chi"] = t.formula(S), t.formula(S), t.formula(S)
        return b
    if schema_id in ("2a", "2b"):
        A = S.space.algebra
        if not A.carrier:
            return None
        mask = rng.randint(0, A.full_mask)
        pts = A.points_of(mask)
        inside = schema_id == "2a"
        pool = [c for c in A.carrier if (c in pts) == inside]
        if not pool:
            return None
        return {"c": rng.choice(pool), "A": pts}
    if schema_id in ("3a", "3b", "4a"):
        b["j"] = rng.choice((1, 2))
        if schema_id != "3b":
            b["phi"] = t.formula(S.left if b["j"] == 1 else S.right)
        return b
    if schema_id == "5a":
        return {"phi": t.formula(t.model.T)}
    if schema_id == "D-K":
        e = rng.choice([e for e in t.G.out(S) if e.label in ("pr1", "pr2", "in1", "in2", "next")])
        return {"label": e.label, "phi": t.formula(e.target), "psi": t.formula(e.target)}
    return b


def _rule_instances(rule, S, t):
    """Random rule instances at sort S (possibly none)."""
    rng = t.rng
    if rule == "mp":
        phi, psi = t.formula(S), t.formula(S)
        return [RuleInstance(rule, S, (phi, implies(phi, psi)), psi)]
    if rule == "cut":
        gamma = [t.formula(S) for _ in range(rng.randint(1, 2))]
        lam = [big_conj(gamma), t.formula(S)]
        phi = rng.choice((lam[0], disj(lam[1], t.formula(S)), t.formula(S)))
        given = tuple((tuple(gamma), l) for l in lam) + ((tuple(lam), phi),)
        return [RuleInstance(rule, S, tuple(gamma), phi, given)]
    if rule == "deduction":
        gamma = [t.formula(S)]
        phi, psi = t.formula(S), t.formula(S)
        if rng.random() < 0.5:
            psi = disj(psi, conj(phi, gamma[0]))
        return [RuleInstance(rule, S, tuple(gamma), implies(phi, psi), ((tuple(gamma) + (phi,), psi),))]
    if rule == "const":
        if not isinstance(S, Const) or not S.space.carrier:
            return []
        gamma = tuple(neg(Atom(frozenset([c]))) for c in S.space.carrier)
        return [RuleInstance(rule, S, gamma, BOT)]
    if rule == "box":
        edges = [e for e in t.G.out(S) if e.label in ("pr1", "pr2", "in1", "in2", "next")]
        if not edges:
            return []
        e = rng.choice(edges)
        gamma = [t.formula(e.target) for _ in range(rng.randint(1, 2))]
        psi = rng.choice((big_conj(gamma), disj(gamma[0], t.formula(e.target)), t.formula(e.target)))
        return [RuleInstance(rule, S, tuple(box(e.label, g) for g in gamma), box(e.label, psi),
                             ((tuple(gamma), psi),), e.target)]
    if not isinstance(S, Delta):
        return []
    k, arg = S.kind, S.arg
    if rule == "nec":
        phi = t.formula(arg)
        for _ in range(6):
            if t.counterexample(phi, arg) is None:
                break
            phi = t.formula(arg)
        else:
            phi = disj(phi, neg(phi))
        return [RuleInstance(rule, S, (), lo(k, ">=", 1, phi), (((), phi),), arg)]
    if rule == "arch":
        psi = t.formula(arg)
        vals = t.values(S, psi)
        p = rng.choice([v for v in t.thresholds(S, psi) if v > 0])
        sides = ["U"] if k == "prob" else ["U", "L"]
        side = rng.choice(sides)
        mk = up if side == "U" else lo
        qs = sorted({p * (1 - Frac(1, 2 ** j)) for j in range(1, 7)} | {(p + v) / 2 for v in vals if v < p})
        return [RuleInstance(rule, S, tuple(mk(k, ">=", q, psi) for q in qs), mk(k, ">=", p, psi),
                             side={"p": p, "slice": tuple(qs)})]
    if rule in ("cover1", "cover2"):
        if k not in ("upper", "prob") or not is_delta_free(arg):
            return []
        m = rng.randint(1, 3)
        phis = [t.formula(arg) for _ in range(m)]
        sets = [t.c.interp(f, arg) for f in phis]
        carrier = t.c.space(arg).carrier
        cov = {x: sum(1 for U in sets if x in U) for x in carrier}
        kmax = min(cov.values()) if cov else m
        kk = rng.randint(0, kmax)
        if rule == "cover1":
            phi = rng.choice((big_disj(phis), phis[0], conj(phis[0], t.formula(arg)), t.formula(arg)))
            U = t.c.interp(phi, arg)
            n = min((cov[x] for x in U), default=kk + 1) - kk
            if n < 1:
                return []
            g = rng.choice(t.elements(S))
            ps = []
            for f in phis:
                v = g.upper.value(t.c.operand_mask(g, f, arg))
                ps.append(v if rng.random() < 0.7 else rng.choice(GRID))
            return [gen_cover_rule_instance(phi, phis, n, kk, ps, t.model, k, "cover1", arg)]
        if kk < 1:
            return []
        ps = [min(ONE, Frac(rng.randint(0, 4 * kk - 1), 4 * m)) for _ in phis]
        return [gen_cover_rule_instance(None, phis, 0, kk, ps, t.model, k, "cover2", arg)]
    return []


def _check_rule(inst, t):
    """None if the instance preserves truth in the model, else (formula text, witness)."""
    S = inst.sort
    if inst.rule in ("nec",):
        (_, phi), = inst.given
        if t.counterexample(phi, inst.given_sort) is not None:
            return "vacuous"
        bad = t.counterexample(inst.conclusion, S)
        return None if bad is None else bad
    if inst.rule in ("cover1", "cover2"):
        bad = t.counterexample(inst.conclusion, S)
        return None if bad is None else bad
    gsort = inst.given_sort or S
    for gamma, f in inst.given:
        if t.entails(list(gamma), f, gsort) is not None:
            return "vacuous"
    bad = t.entails(list(inst.premises), inst.conclusion, S)
    return None if bad is None else bad


def _check_axiom(f, S, t):
    return t.counterexample(f, S)


def soundness_harness(T, trials=100, seed=0, schemas=None, per_schema=2, size=None):
    """Check axiom validity and rule soundness on ``trials`` random T-coalgebras.

    ``schemas`` selects axiom, derived, mutant and rule ids; by default every
    axiom, derived principle and rule is run (mutants only when named).
    Identical arguments give identical reports.
    """
    if isinstance(T, str):
        T = parse_functor(T)
    ids = tuple(schemas) if schemas else AXIOM_IDS + DERIVED_IDS + RULE_IDS
    unknown = [i for i in ids if i not in SCHEMAS and i not in RULE_IDS]
    if unknown:
        raise SchemaError(f"unknown schema or rule ids {unknown}")
    report = HarnessReport(format_functor(T), trials, seed, ids)
    for sid in ids:
        report.checked[sid] = 0
    for i in range(trials):
        model_seed = seed * 1_000_003 + i
        rng = random.Random(model_seed)
        n = size if size is not None else rng.randint(1, 6)
        model = random_coalgebra(T, n, model_seed)
        t = _Trial(model, rng, i, model_seed)
        for S in t.G.nodes:
            for sid in ids:
                for _ in range(per_schema):
                    _run_one(sid, S, t, report)
    return report


def _run_one(sid, S, t, report):
    T = t.model.T
    if sid in RULE_IDS:
        for inst in _rule_instances(sid, S, t):
            res = _check_rule(inst, t)
            if res == "vacuous":
                report.vacuous[sid] = report.vacuous.get(sid, 0) + 1
            report.checked[sid] += 1
            if res is not None and res != "vacuous":
                _record(report, t, sid, S, inst.describe(), res)
        return
    if not applicable(sid, S, t.G):
        return
    b = _bindings(sid, S, t)
    if b is None:
        return
    sf = instantiate_axiom(sid, b, S, T)
    report.checked[sid] += 1
    bad = _check_axiom(sf.formula, S, t)
    if bad is not None:
        _record(report, t, sid, S, print_formula(sf.formula), bad)


def _record(report, t, sid, S, text, witness):
    report.violations.append(Violation(t.index, t.model_seed, sid, format_functor(S), text,
                                       describe_element(witness), save_model(t.model)))

"""The model checker: interpretations, satisfaction, validity, description sets.

Two independent evaluation routes are provided.  ``interpret`` follows the
set-based clauses (complements, preimages under projections and the
structure map, β-sets for the measure modalities).  ``satisfies`` is the
pointwise relation, which re-derives every operand set point by point.
Both are memoized per model.
"""

from dataclasses import dataclass, field
from fractions import Fraction as Frac
import random as _random
import weakref

from . import measures as ms
from .errors import SortError
from .functors import (DELTA_MEASURE_KIND, Const, Coprod, Delta, Id, MeasureElem, Prod,
                       SupportAlgebra, format_functor, is_delta_free,
                       multigraph, realize_space)
from .logic import (BOT, Atom, Bot, Idx, Implies, Modal, SortedFormula, index, neg, sort_check)
from .spaces import Inj, format_points

ZERO, ONE = Frac(0), Frac(1)


@dataclass(frozen=True)
class Interpretation:
    """⟦φ⟧ at a sort: an explicit point set, or a predicate on elements."""

    sort: object
    points: frozenset = None
    space: object = None
    predicate: object = field(default=None, compare=False, repr=False)

    @property
    def explicit(self):
        return self.points is not None

    def __contains__(self, e):
        if self.points is not None:
            return e in self.points
        return self.predicate(e)

    def measurable_set(self):
        if self.points is None:
            raise SortError(f"sort {format_functor(self.sort)} is not enumerable")
        return self.space.algebra.from_points(self.points)

    def sorted_points(self):
        return tuple(p for p in self.space.carrier if p in self.points)

    def __repr__(self):
        if self.points is None:
            return f"Interpretation({format_functor(self.sort)}, <predicate>)"
        return f"Interpretation({format_functor(self.sort)}, {format_points(self.sorted_points())})"


@dataclass(frozen=True)
class ValidityResult:
    valid: bool
    regime: str  # "exhaustive" or "reachable+probes"
    checked: int
    counterexample: object = None

    def __bool__(self):
        return self.valid


@dataclass(frozen=True)
class DescriptionSet:
    element: object
    sort: object
    depth: int
    grid: tuple
    formulas: tuple

    def __contains__(self, f):
        if isinstance(f, SortedFormula):
            f = f.formula
        return f in self._set

    @property
    def _set(self):
        s = self.__dict__.get("_fs")
        if s is None:
            s = frozenset(self.formulas)
            object.__setattr__(self, "_fs", s)
        return s

    def __len__(self):
        return len(self.formulas)


class Checker:
    """Evaluation state for one model; holds the memo tables."""

    def __init__(self, model):
        self.model = model
        self.X = model.X
        self.T = model.T
        self.alpha = model.alpha
        self.G = multigraph(model.T)
        self._interp = {}
        self._holds = {}
        self._pointwise = {}
        self._space = {}

    def space(self, S):
        sp = self._space.get(S)
        if sp is None:
            sp = self._space[S] = realize_space(S, self.X)
        return sp

    # set-based route

    def interp(self, f, S):
        """Point set of ⟦f⟧ at enumerable S."""
        key = (f, S)
        hit = self._interp.get(key)
        if hit is not None:
            return hit
        sp = self.space(S)
        if isinstance(f, Bot):
            out = frozenset()
        elif isinstance(f, Atom):
            out = frozenset(f.points)
        elif isinstance(f, Implies):
            out = (frozenset(sp.carrier) - self.interp(f.left, S)) | self.interp(f.right, S)
        else:
            lab = f.label
            if lab in ("pr1", "pr2"):
                j = 0 if lab == "pr1" else 1
                sub = self.interp(f.sub, S.left if j == 0 else S.right)
                out = frozenset(p for p in sp.carrier if p[j] in sub)
            elif lab in ("in1", "in2"):
                j = 1 if lab == "in1" else 2
                sub = self.interp(f.sub, S.left if j == 1 else S.right)
                out = frozenset(p for p in sp.carrier if p.side != j or p.value in sub)
            elif lab == "next":
                out = frozenset(x for x in sp.carrier if self.member(self.alpha[x], f.sub, self.T))
            else:
                raise SortError(f"index modality at enumerable sort {format_functor(S)}")
        self._interp[key] = out
        return out

    def member(self, e, f, S):
        if is_delta_free(S):
            return e in self.interp(f, S)
        return self.holds(e, f, S)

    def operand_mask(self, e, f, S):
        """Mask of ⟦f⟧ (f at sort S) inside the algebra of measure element e."""
        A = e.measure.algebra
        if is_delta_free(S):
            key = ("mask", f, S)
            hit = self._interp.get(key)
            if hit is None:
                hit = self._interp[key] = self.space(S).algebra.from_points(self.interp(f, S)).mask
            return hit
        mask = 0
        for i, x in enumerate(A.carrier):
            if self.holds(x, f, S):
                mask |= 1 << i
        return mask

    def holds(self, e, f, S):
        """Pointwise truth at a non-enumerable sort, using set interpretations below."""
        if is_delta_free(S):
            return e in self.interp(f, S)
        key = (e, f, S)
        hit = self._holds.get(key)
        if hit is not None:
            return hit
        if isinstance(f, Bot):
            out = False
        elif isinstance(f, Implies):
            out = not self.holds(e, f.left, S) or self.holds(e, f.right, S)
        else:
            lab = f.label
            if lab in ("pr1", "pr2"):
                j = 0 if lab == "pr1" else 1
                out = self.member(e[j], f.sub, S.left if j == 0 else S.right)
            elif lab in ("in1", "in2"):
                j = 1 if lab == "in1" else 2
                out = e.side != j or self.member(e.value, f.sub, S.left if j == 1 else S.right)
            elif isinstance(lab, Idx):
                out = index_holds(e.upper, self.operand_mask(e, f.sub, S.arg), lab)
            else:
                raise SortError(f"{lab} at sort {format_functor(S)}")
        self._holds[key] = out
        return out

    # pointwise route

    def sat(self, e, f, S):
        """Def-of-satisfaction route: never consults the set interpretations."""
        key = (e, f, S)
        hit = self._pointwise.get(key)
        if hit is not None:
            return hit
        if isinstance(f, Bot):
            out = False
        elif isinstance(f, Atom):
            out = e in f.points
        elif isinstance(f, Implies):
            out = not self.sat(e, f.left, S) or self.sat(e, f.right, S)
        else:
            lab = f.label
            if lab in ("pr1", "pr2"):
                j = 0 if lab == "pr1" else 1
                out = self.sat(e[j], f.sub, S.left if j == 0 else S.right)
            elif lab in ("in1", "in2"):
                j = 1 if lab == "in1" else 2
                out = e.side != j or self.sat(e.value, f.sub, S.left if j == 1 else S.right)
            elif lab == "next":
                out = self.sat(self.alpha[e], f.sub, self.T)
            else:
                A = e.measure.algebra
                mask = 0
                for x in A.carrier:
                    if self.sat(x, f.sub, S.arg):
                        mask |= 1 << A.atom_index(x)
                out = index_holds(e.upper, mask, lab)
        self._pointwise[key] = out
        return out


def index_holds(g, mask, lab):
    """β-set membership of an upper-side measure g for the operand mask."""
    if lab.kind == "prob":
        return g.value(mask) >= lab.p
    full = g.algebra.full_mask
    return g.value(mask) >= lab.p and ONE - g.value(full ^ mask) >= lab.q


_checkers = weakref.WeakKeyDictionary()


def checker(model):
    c = _checkers.get(model)
    if c is None:
        c = _checkers[model] = Checker(model)
    return c


def _sorted(phi, model, sort=None):
    if isinstance(phi, SortedFormula):
        return phi
    return sort_check(phi, model.T, sort)


def interpret(phi, model):
    """⟦φ⟧ in the model: explicit points for delta-free sorts, else a predicate."""
    sf = _sorted(phi, model)
    c = checker(model)
    S = sf.sort
    if is_delta_free(S):
        return Interpretation(S, c.interp(sf.formula, S), c.space(S))
    return Interpretation(S, predicate=lambda e: c.holds(e, sf.formula, S))


def satisfies(e, phi, model, sort=None):
    sf = _sorted(phi, model, sort)
    return checker(model).sat(e, sf.formula, sf.sort)


# sampling measure sorts


def reachable_elements(model):
    """Elements occurring in the model, by sort: alpha images and their parts."""
    out = {}

    def add(e, S):
        lst = out.setdefault(S, [])
        if e in lst:
            return
        lst.append(e)
        if isinstance(S, Prod):
            add(e[0], S.left)
            add(e[1], S.right)
        elif isinstance(S, Coprod):
            add(e.value, S.left if e.side == 1 else S.right)
        elif isinstance(S, Delta) and not is_delta_free(S.arg):
            for x in e.measure.algebra.carrier:
                add(x, S.arg)

    for x in model.X.carrier:
        add(model.alpha[x], model.T)
    return out


def _vacuous(kind, A):
    if kind == "upper":
        return ms.upper_envelope([ms.point_mass(A, i) for i in range(A.n_atoms)])
    if kind == "plaus":
        return ms.mass_function(A, {A.full_mask: ONE})
    if kind == "poss":
        return ms.possibility_distribution(A, [ONE] * len(A.carrier))
    return None


def _point_mass(kind, A, i):
    d = ms.point_mass(A, i)
    if kind == "upper":
        return ms.upper_envelope([d])
    if kind == "plaus":
        return ms.mass_function(A, {1 << i: ONE})
    if kind == "poss":
        return ms.possibility_distribution(A, [ONE if A.atom_index(p) == i else ZERO for p in A.carrier])
    return d


def default_probes(model, seed=0, count=4, max_point_masses=6):
    """Probe measures for every measure sort of the model's functor.

    Point masses, the vacuous measure of the kind, and ``count`` random
    measures of the kind.  Nested measure sorts get random measures over
    finite supports drawn from the reachable elements.
    """
    rng = _random.Random(seed)
    reach = reachable_elements(model)
    probes = {}
    for S in multigraph(model.T).nodes:
        if not isinstance(S, Delta):
            continue
        kind = DELTA_MEASURE_KIND[S.kind]
        lst = []
        if is_delta_free(S.arg):
            A = realize_space(S.arg, model.X).algebra
            if A.n_atoms == 0:
                continue
            for i in range(min(A.n_atoms, max_point_masses)):
                lst.append(_point_mass(S.kind, A, i))
            vac = _vacuous(S.kind, A)
            if vac is not None:
                lst.append(vac)
            for _ in range(count):
                lst.append(ms.random_measure(kind, A, rng))
        else:
            pool = reach.get(S.arg, [])
            if not pool:
                continue
            for _ in range(count):
                k = rng.randint(1, min(3, len(pool)))
                sup = rng.sample(pool, k)
                lst.append(ms.random_measure(kind, SupportAlgebra(sup), rng))
        probes[S] = [MeasureElem(m) for m in lst]
    return probes


def sample_elements(S, model, probes=None, cap=400):
    """A finite sample of S(X): everything if enumerable, else reachable + probes."""
    reach = reachable_elements(model)
    probes = probes or {}
    memo = {}

    def sample(S):
        if S in memo:
            return memo[S]
        if is_delta_free(S):
            out = list(realize_space(S, model.X).carrier)
        else:
            out = []
            for e in reach.get(S, []) + list(probes.get(S, [])):
                if e not in out:
                    out.append(e)
            if isinstance(S, Prod):
                for a in sample(S.left):
                    for b in sample(S.right):
                        if len(out) >= cap:
                            break
                        if (a, b) not in out:
                            out.append((a, b))
            elif isinstance(S, Coprod):
                for side, sub in ((1, S.left), (2, S.right)):
                    for v in sample(sub):
                        if Inj(side, v) not in out:
                            out.append(Inj(side, v))
        memo[S] = out
        return out

    return sample(S)


def valid_in_model(phi, model, probes=None, sort=None):
    """Validity of φ at its sort: exhaustive if enumerable, else over a sample.

    The sample at measure sorts is the reachable elements plus the default
    probes, extended by ``probes`` (a mapping sort → elements) if given.
    """
    sf = _sorted(phi, model, sort)
    c = checker(model)
    S = sf.sort
    if is_delta_free(S):
        I = c.interp(sf.formula, S)
        carrier = c.space(S).carrier
        for p in carrier:
            if p not in I:
                return ValidityResult(False, "exhaustive", len(carrier), p)
        return ValidityResult(True, "exhaustive", len(carrier))
    merged = default_probes(model)
    for k, v in (probes or {}).items():
        merged[k] = list(merged.get(k, [])) + list(v)
    elems = sample_elements(S, model, merged)
    for e in elems:
        if not c.holds(e, sf.formula, S):
            return ValidityResult(False, "reachable+probes", len(elems), e)
    return ValidityResult(True, "reachable+probes", len(elems))


# description sets


def attained_values(model, probes=None):
    """0, 1 and every value (and dual value) of every measure in the model."""
    vals = {ZERO, ONE}
    seen = set()
    for S, elems in reachable_elements(model).items():
        if isinstance(S, Delta):
            for e in elems:
                if id(e.measure) in seen:
                    continue
                seen.add(id(e.measure))
                t = e.upper.table()
                full = len(t) - 1
                vals.update(t)
                vals.update(ONE - t[full ^ u] for u in range(len(t)))
    return tuple(sorted(vals))


def candidate_formulas(S, depth, grid, T):
    """All formulas of the description-set language at sort S, in canonical order."""
    G = multigraph(T)
    grid = tuple(sorted(set(grid) | {ZERO}))
    memo = {}

    def base(S):
        out = [BOT]
        if isinstance(S, Const) and S.space is not None:
            out += [Atom(frozenset(a)) for a in S.space.atoms]
        return out

    def gen(S, d):
        key = (S, d)
        if key in memo:
            return memo[key]
        plain = base(S)
        if d > 0:
            for e in G.out(S):
                subs = gen(e.target, d - 1)
                if e.label in ("pr1", "pr2", "in1", "in2", "next"):
                    plain += [Modal(e.label, f) for f in subs]
                elif e.label == "prob":
                    plain += [index("prob", p, None, f) for f in subs for p in grid]
                else:
                    plain += [index(e.label, p, q, f) for f in subs for p in grid for q in grid]
        out = []
        seen = set()
        for f in plain + [neg(f) for f in plain]:
            if f not in seen:
                seen.add(f)
                out.append(f)
        memo[key] = out
        return out

    return gen(S, depth)


def description_set(e, depth, grid, model, sort=None):
    """Formulas of bounded depth over the grid that the element satisfies.

    ``grid`` defaults to the values attained in the model.
    """
    S = sort if sort is not None else Id()
    if isinstance(S, str):
        from .functors import constants, parse_functor
        S = parse_functor(S, {c.name: c.space for c in constants(model.T)})
    if grid is None:
        grid = attained_values(model)
    c = checker(model)
    sat = [f for f in candidate_formulas(S, depth, grid, model.T) if c.member(e, f, S)]
    return DescriptionSet(e, S, depth, tuple(sorted(set(grid) | {ZERO})), tuple(sat))

"""Uncertainty measures on finite algebras and their verifiers.

Five representations share one interface (``value(mask)`` and ``table()``):

* ``ProbabilityMeasure``: a weight per atom.
* ``Envelope``: upper or lower envelope of a finite family of probabilities.
* ``Tabulated``: an explicit value for every member of the algebra, with a
  claimed kind that the verifiers audit.
* ``Mass``: a mass function read as plausibility or belief.
* ``PossDist``: a possibility distribution on points, read as possibility or
  necessity.

All arithmetic is exact (``fractions.Fraction``).
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction as Frac
from functools import cached_property
from itertools import combinations_with_replacement
from math import lcm
import random as _random

from .errors import DomainError, MalformedMeasureError, NotMeasurableError, SortError
from .lp import solve_lp
from .spaces import MeasurableSet, SetAlgebra, bits, format_points

ZERO, ONE = Frac(0), Frac(1)


class Kind(str, Enum):
    UPPER = "upper"
    LOWER = "lower"
    PROBABILITY = "probability"
    PLAUSIBILITY = "plausibility"
    BELIEF = "belief"
    POSSIBILITY = "possibility"
    NECESSITY = "necessity"

    def __str__(self):
        return self.value


DUAL_KIND = {
    Kind.UPPER: Kind.LOWER, Kind.LOWER: Kind.UPPER,
    Kind.PLAUSIBILITY: Kind.BELIEF, Kind.BELIEF: Kind.PLAUSIBILITY,
    Kind.POSSIBILITY: Kind.NECESSITY, Kind.NECESSITY: Kind.POSSIBILITY,
    Kind.PROBABILITY: Kind.PROBABILITY,
}
LOWER_SIDE = frozenset({Kind.LOWER, Kind.BELIEF, Kind.NECESSITY})


def rat(x):
    """Exact rational from an int, Fraction, or string such as "2/5" or "0.4"."""
    if isinstance(x, float):
        raise DomainError(f"refusing inexact float {x!r}; pass a string or Fraction")
    try:
        return Frac(x)
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"not a rational number: {x!r}") from e


def _popcount(m):
    return bin(m).count("1")


class Measure:
    """Common behaviour; subclasses define ``algebra``, ``kind`` and ``table``."""

    def value(self, mask):
        return self.table()[mask]

    def __call__(self, U):
        return eval_measure(self, U)

    def table(self):
        return self._table

    @property
    def upper_kind(self):
        return self.kind not in LOWER_SIDE


@dataclass(frozen=True, eq=True)
class ProbabilityMeasure(Measure):
    algebra: SetAlgebra
    weights: tuple

    def __post_init__(self):
        w = tuple(rat(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if len(w) != self.algebra.n_atoms:
            raise MalformedMeasureError(f"expected {self.algebra.n_atoms} atom weights, got {len(w)}")
        if any(x < 0 for x in w):
            raise MalformedMeasureError("negative probability weight")
        if sum(w) != 1:
            raise MalformedMeasureError(f"weights sum to {sum(w)}, not 1")

    kind = Kind.PROBABILITY

    def value(self, mask):
        return sum((self.weights[i] for i in bits(mask)), ZERO)

    @cached_property
    def _table(self):
        t = [ZERO] * (1 << len(self.weights))
        for m in range(1, len(t)):
            low = m & -m
            t[m] = t[m ^ low] + self.weights[low.bit_length() - 1]
        return tuple(t)


@dataclass(frozen=True, eq=True)
class Envelope(Measure):
    kind: Kind
    family: tuple

    def __post_init__(self):
        fam = tuple(self.family)
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind not in (Kind.UPPER, Kind.LOWER):
            raise MalformedMeasureError(f"envelope kind must be upper or lower, not {self.kind}")
        if not fam:
            raise DomainError("envelope of an empty family")
        if not all(isinstance(mu, ProbabilityMeasure) for mu in fam):
            raise MalformedMeasureError("envelope members must be probability measures")
        if any(mu.algebra != fam[0].algebra for mu in fam):
            raise SortError("envelope family spans several algebras")

    @property
    def algebra(self):
        return self.family[0].algebra

    def value(self, mask):
        vals = (mu.value(mask) for mu in self.family)
        return max(vals) if self.kind is Kind.UPPER else min(vals)

    @cached_property
    def _table(self):
        pick = max if self.kind is Kind.UPPER else min
        return tuple(pick(col) for col in zip(*(mu.table() for mu in self.family)))


@dataclass(frozen=True, eq=True)
class Tabulated(Measure):
    algebra: SetAlgebra
    kind: Kind
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        vals = tuple(rat(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) != len(self.algebra):
            raise MalformedMeasureError(f"expected {len(self.algebra)} values, got {len(vals)}")
        if any(v < 0 or v > 1 for v in vals):
            raise MalformedMeasureError("tabulated value outside [0,1]")
        if vals[0] != 0 or vals[-1] != 1:
            raise MalformedMeasureError("tabulated measure must be 0 on the empty set and 1 on the carrier")

    def value(self, mask):
        return self.values[mask]

    def table(self):
        return self.values


@dataclass(frozen=True, eq=True)
class Mass(Measure):
    """Mass function; ``focal`` is a sorted tuple of (mask, mass) pairs."""

    algebra: SetAlgebra
    focal: tuple
    reading: Kind = Kind.PLAUSIBILITY

    def __post_init__(self):
        object.__setattr__(self, "reading", Kind(self.reading))
        if self.reading not in (Kind.PLAUSIBILITY, Kind.BELIEF):
            raise MalformedMeasureError("mass reading must be plausibility or belief")
        items = {}
        for A, v in self.focal:
            A = A.mask if isinstance(A, MeasurableSet) else int(A)
            if A in items:
                raise MalformedMeasureError(f"focal set {format_points(self.algebra.points_of(A))} listed twice")
            if not 0 <= A <= self.algebra.full_mask:
                raise MalformedMeasureError(f"focal mask {A} out of range")
            items[A] = rat(v)
        if any(v < 0 for v in items.values()):
            raise MalformedMeasureError("negative mass")
        if items.get(0, ZERO) != 0:
            raise MalformedMeasureError("mass on the empty set")
        if sum(items.values(), ZERO) != 1:
            raise MalformedMeasureError(f"masses sum to {sum(items.values(), ZERO)}, not 1")
        object.__setattr__(self, "focal", tuple(sorted(items.items())))

    @property
    def kind(self):
        return self.reading

    def value(self, mask):
        if self.reading is Kind.PLAUSIBILITY:
            return sum((v for A, v in self.focal if A & mask), ZERO)
        return sum((v for A, v in self.focal if A & ~mask == 0), ZERO)

    @cached_property
    def _table(self):
        n = self.algebra.n_atoms
        bel = [ZERO] * (1 << n)
        for A, v in self.focal:
            bel[A] += v
        for i in range(n):  # zeta transform: subset sums
            b = 1 << i
            for m in range(1 << n):
                if m & b:
                    bel[m] += bel[m ^ b]
        if self.reading is Kind.BELIEF:
            return tuple(bel)
        full = self.algebra.full_mask
        return tuple(ONE - bel[full ^ m] for m in range(1 << n))


@dataclass(frozen=True, eq=True)
class PossDist(Measure):
    """Possibility distribution; ``dist`` gives one value per carrier point."""

    algebra: SetAlgebra
    dist: tuple
    reading: Kind = Kind.POSSIBILITY

    def __post_init__(self):
        object.__setattr__(self, "reading", Kind(self.reading))
        if self.reading not in (Kind.POSSIBILITY, Kind.NECESSITY):
            raise MalformedMeasureError("distribution reading must be possibility or necessity")
        d = tuple(rat(v) for v in self.dist)
        object.__setattr__(self, "dist", d)
        if len(d) != len(self.algebra.carrier):
            raise MalformedMeasureError(f"expected {len(self.algebra.carrier)} point values, got {len(d)}")
        if any(v < 0 or v > 1 for v in d):
            raise MalformedMeasureError("possibility value outside [0,1]")
        if d and max(d) != 1:
            raise MalformedMeasureError(f"possibility distribution has maximum {max(d)}, not 1")
        if not d:
            raise MalformedMeasureError("possibility distribution on an empty carrier")

    @property
    def kind(self):
        return self.reading

    @cached_property
    def atom_values(self):
        A = self.algebra
        vals = [ZERO] * A.n_atoms
        for p, v in zip(A.carrier, self.dist):
            i = A.atom_index(p)
            vals[i] = max(vals[i], v)
        return tuple(vals)

    def _poss(self, mask):
        return max((self.atom_values[i] for i in bits(mask)), default=ZERO)

    def value(self, mask):
        if self.reading is Kind.POSSIBILITY:
            return self._poss(mask)
        return ONE - self._poss(self.algebra.full_mask ^ mask)

    @cached_property
    def _table(self):
        n = self.algebra.n_atoms
        poss = [ZERO] * (1 << n)
        for m in range(1, 1 << n):
            low = m & -m
            poss[m] = max(poss[m ^ low], self.atom_values[low.bit_length() - 1])
        if self.reading is Kind.POSSIBILITY:
            return tuple(poss)
        full = self.algebra.full_mask
        return tuple(ONE - poss[full ^ m] for m in range(1 << n))


@dataclass(frozen=True)
class Verdict:
    """Outcome of a verifier; truthy iff ``ok``."""

    ok: bool
    reason: str = ""
    witness: object = None
    certificate: object = None

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class CoverWitness:
    target: MeasurableSet
    seq: tuple
    n: int
    k: int
    lhs: Frac
    rhs: Frac


# construction helpers


def probability(algebra, weights):
    return ProbabilityMeasure(algebra, tuple(weights))


def point_mass(algebra, atom):
    w = [ZERO] * algebra.n_atoms
    w[atom] = ONE
    return ProbabilityMeasure(algebra, tuple(w))


def upper_envelope(family):
    return Envelope(Kind.UPPER, tuple(family))


def lower_envelope(family):
    return Envelope(Kind.LOWER, tuple(family))


def mass_function(algebra, focal, reading=Kind.PLAUSIBILITY):
    """Build a Mass from a mapping of measurable sets (or masks) to masses."""
    items = focal.items() if hasattr(focal, "items") else focal
    return Mass(algebra, tuple(items), Kind(reading))


def possibility_distribution(algebra, dist, reading=Kind.POSSIBILITY):
    """Build a PossDist from a mapping point → value; missing points get 0."""
    if hasattr(dist, "items"):
        unknown = [p for p in dist if not algebra.has_point(p)]
        if unknown:
            raise MalformedMeasureError(f"unknown points {unknown!r}")
        dist = [dist.get(p, ZERO) for p in algebra.carrier]
    return PossDist(algebra, tuple(dist), Kind(reading))


def tabulated(algebra, kind, values):
    """Build a Tabulated from a sequence indexed by mask or a mapping set → value."""
    if hasattr(values, "items"):
        table = [None] * len(algebra)
        for U, v in values.items():
            mask = U.mask if isinstance(U, MeasurableSet) else int(U)
            table[mask] = v
        missing = [i for i, v in enumerate(table) if v is None]
        if missing:
            raise MalformedMeasureError(
                f"no value for {format_points(algebra.points_of(missing[0]))}")
        values = table
    return Tabulated(algebra, Kind(kind), tuple(values))


def to_tabulated(m, kind=None):
    return Tabulated(m.algebra, kind or m.kind, m.table())


# evaluation and duality


def eval_measure(m, U):
    if not isinstance(U, MeasurableSet):
        raise SortError(f"expected a measurable set, got {U!r}")
    if U.algebra != m.algebra:
        raise SortError("measurable set belongs to a different algebra than the measure")
    return m.value(U.mask)


def dual(m):
    """ḡ(U) = 1 − g(U^c), keeping the representation where one exists."""
    if isinstance(m, ProbabilityMeasure):
        return m
    if isinstance(m, Envelope):
        return Envelope(DUAL_KIND[m.kind], m.family)
    if isinstance(m, Mass):
        return Mass(m.algebra, m.focal, DUAL_KIND[m.reading])
    if isinstance(m, PossDist):
        return PossDist(m.algebra, m.dist, DUAL_KIND[m.reading])
    full = m.algebra.full_mask
    t = m.table()
    return Tabulated(m.algebra, DUAL_KIND[m.kind], tuple(ONE - t[full ^ u] for u in range(len(t))))


def upper_side(m):
    """The member of the dual pair {m, dual(m)} with an upper-type kind."""
    return dual(m) if m.kind in LOWER_SIDE else m


def measures_equal(a, b):
    """Extensional equality: same algebra and same value on every measurable set."""
    return a.algebra == b.algebra and a.table() == b.table()


def is_self_dual(m):
    return m.table() == dual(m).table()


# verifiers


def _normalized(t):
    if t[0] != 0:
        return Verdict(False, f"value on the empty set is {t[0]}, not 0")
    if t[-1] != 1:
        return Verdict(False, f"value on the carrier is {t[-1]}, not 1")
    return None


def is_probability(m):
    """Normalization plus additivity on disjoint pairs.

    Additivity is checked on the pairs (U minus its lowest atom, that atom);
    by induction on the number of atoms this is equivalent to additivity on
    all disjoint pairs.
    """
    t = m.table()
    bad = _normalized(t)
    if bad:
        return bad
    A = m.algebra
    for i in range(A.n_atoms):
        if t[1 << i] < 0:
            return Verdict(False, f"negative value on atom {format_points(A.atoms[i])}")
    for u in range(1, len(t)):
        low = u & -u
        if t[u] != t[u ^ low] + t[low]:
            U, V = A.set(u ^ low), A.set(low)
            return Verdict(False, f"not additive: g({U!r} ∪ {V!r}) = {t[u]} ≠ {t[u ^ low]} + {t[low]}",
                           witness=(U, V))
    return Verdict(True, "finitely additive and normalized")


def _lp_rows(A, t):
    n = A.n_atoms
    rows, rhs = [], []
    for v in range(1, A.full_mask):
        rows.append([1 if v >> a & 1 else 0 for a in range(n)])
        rhs.append(t[v])
    return rows, rhs


def is_upper_probability_lp(g):
    """Decide whether g is the upper envelope of some set of probabilities.

    g is an upper probability iff, over the credal set C(g) of probabilities
    dominated by g, the maximum of μ(U) equals g(U) for every U.  Each maximum
    is an exact LP over the atom weights.  On success the witness is the
    deduplicated family of maximizers, whose upper envelope is g.
    """
    A = g.algebra
    t = g.table()
    bad = _normalized(t)
    if bad:
        return bad
    n = A.n_atoms
    rows, rhs = _lp_rows(A, t)
    eq = [[1] * n]
    witness = []
    for u in range(1, A.full_mask + 1):
        c = [1 if u >> a & 1 else 0 for a in range(n)]
        res = solve_lp(c, rows, rhs, eq, [1])
        if not res.feasible:
            return Verdict(False, "the credal set C(g) is empty", certificate=res.certificate)
        if res.value != t[u]:
            U = A.set(u)
            return Verdict(False, f"max of μ({U!r}) over C(g) is {res.value} < g = {t[u]}", witness=U)
        mu = ProbabilityMeasure(A, res.x)
        if mu not in witness:
            witness.append(mu)
    return Verdict(True, "upper envelope of the witness family", witness=tuple(witness))


def is_nk_cover(U, seq, n, k):
    """True iff seq covers the carrier k times and U at least n+k times."""
    A = U.algebra
    for S in seq:
        U._same(S)
    for a in range(A.n_atoms):
        c = sum(1 for S in seq if S.mask >> a & 1)
        if c < k or (U.mask >> a & 1 and c < n + k):
            return False
    return True


def find_cover_violation(g, m_max):
    """Search sequences of length ≤ m_max for a violation of k + n·g(U) ≤ Σ g(U_i).

    For each sequence the tightest k (least coverage of the carrier) and n
    (least coverage of U, minus k) are used; larger k only tightens the bound
    since 1 − g(U) ≥ 0.  Targets are tried from the carrier downwards.
    """
    if m_max < 1:
        raise DomainError("m_max must be at least 1")
    A = g.algebra
    t = g.table()
    na = A.n_atoms
    if na == 0:
        return None
    members = range(len(t))
    for length in range(1, m_max + 1):
        for seq in combinations_with_replacement(members, length):
            cov = [sum(1 for s in seq if s >> a & 1) for a in range(na)]
            k = min(cov)
            rhs = sum((t[s] for s in seq), ZERO)
            for u in range(A.full_mask, 0, -1):
                n = min(cov[a] for a in bits(u)) - k
                lhs = k + n * t[u]
                if lhs > rhs:
                    return CoverWitness(A.set(u), tuple(A.set(s) for s in seq), n, k, lhs, rhs)
            if k > rhs:
                return CoverWitness(A.empty, tuple(A.set(s) for s in seq), 0, k, Frac(k), rhs)
    return None


def inclusion_exclusion_gap(g, sets):
    """RHS − LHS of γ(U1∩…∩Un) ≤ Σ_{∅≠I} (−1)^{|I|+1} γ(∪_{i∈I} U_i)."""
    t = g.table()
    masks = [S.mask if isinstance(S, MeasurableSet) else S for S in sets]
    inter = g.algebra.full_mask
    for s in masks:
        inter &= s
    rhs = ZERO
    for r in range(1, 1 << len(masks)):
        u = 0
        for i, s in enumerate(masks):
            if r >> i & 1:
                u |= s
        rhs += t[u] if _popcount(r) % 2 else -t[u]
    return rhs - t[inter]


def _range_check(t):
    for u, v in enumerate(t):
        if v < 0 or v > 1:
            return u, v
    return None


def is_plausibility(g, n_max=None):
    """Check γ(∅)=0, γ(X)=1 and the inclusion–exclusion inequality.

    With ``n_max`` given, every tuple of at most n_max distinct measurable sets
    is enumerated.  Without it the check covers tuples of every length, done
    by the Möbius transform of the dual belief function: a negative mass on A
    yields the violating tuple ((A∖{a})^c for a ∈ A).
    """
    A = g.algebra
    t = g.table()
    bad = _normalized(t)
    if bad:
        return bad
    r = _range_check(t)
    if r:
        return Verdict(False, f"value {r[1]} on {A.set(r[0])!r} is outside [0,1]")
    if n_max is None:
        return _plausibility_moebius(g, t)
    return _plausibility_direct(g, t, n_max)


def moebius_masses(g):
    """Möbius inverse of the belief function dual to g, indexed by atom mask."""
    t = g.table()
    full = g.algebra.full_mask
    f = [ONE - t[full ^ u] for u in range(len(t))]
    for i in range(g.algebra.n_atoms):
        b = 1 << i
        for u in range(len(f)):
            if u & b:
                f[u] -= f[u ^ b]
    return f


def _plausibility_moebius(g, t):
    A = g.algebra
    f = moebius_masses(g)
    for u, v in enumerate(f):
        if v < 0:
            full = A.full_mask
            tup = tuple(A.set(full ^ (u ^ (1 << a))) for a in bits(u))
            assert inclusion_exclusion_gap(g, tup) < 0
            return Verdict(False, f"inclusion–exclusion fails for the {len(tup)} sets {list(tup)!r}",
                           witness=tup)
    return Verdict(True, "nonnegative Möbius masses")


def _plausibility_direct(g, t, n_max):
    A = g.algebra
    D = lcm(*(v.denominator for v in t))
    iv = [int(v * D) for v in t]
    N = len(t)
    full = A.full_mask

    def extend(start, depth, inter, coef, chosen):
        for s in range(start, N):
            new = dict(coef)
            new[s] = new.get(s, 0) + 1
            for u, c in coef.items():
                new[u | s] = new.get(u | s, 0) - c
            inter2 = inter & s
            rhs = sum(c * iv[u] for u, c in new.items())
            if iv[inter2] > rhs:
                return chosen + (s,)
            if depth + 1 < n_max:
                found = extend(s + 1, depth + 1, inter2, new, chosen + (s,))
                if found:
                    return found
        return None

    found = extend(0, 0, full, {}, ())
    if found:
        tup = tuple(A.set(s) for s in found)
        return Verdict(False, f"inclusion–exclusion fails for {list(tup)!r}", witness=tup)
    return Verdict(True, f"inclusion–exclusion holds for all tuples of ≤ {n_max} distinct sets")


def is_possibility(g):
    """Normalization plus Poss(U ∪ V) = max(Poss U, Poss V).

    The max law is checked on the pairs (U minus its lowest atom, that atom);
    by induction this gives Poss(U) = max over the atoms of U, which implies
    the law for every pair.
    """
    A = g.algebra
    t = g.table()
    bad = _normalized(t)
    if bad:
        return bad
    r = _range_check(t)
    if r:
        return Verdict(False, f"value {r[1]} on {A.set(r[0])!r} is outside [0,1]")
    for u in range(1, len(t)):
        low = u & -u
        if t[u] != max(t[u ^ low], t[low]):
            U, V = A.set(u ^ low), A.set(low)
            return Verdict(False, f"max law fails: g({U!r} ∪ {V!r}) = {t[u]} ≠ max({t[u ^ low]}, {t[low]})",
                           witness=(U, V))
    return Verdict(True, "maxitive and normalized")


def mass_to_measure(m):
    """Tabulated plausibility (or belief) of a mass function, re-verified."""
    if not isinstance(m, Mass):
        raise MalformedMeasureError("expected a mass function")
    pl = Tabulated(m.algebra, Kind.PLAUSIBILITY, Mass(m.algebra, m.focal, Kind.PLAUSIBILITY).table())
    v = is_plausibility(pl)
    if not v:
        raise MalformedMeasureError(f"mass function does not yield a plausibility: {v.reason}")
    return pl if m.reading is Kind.PLAUSIBILITY else dual(pl)


def possdist_to_measure(d):
    """Tabulated possibility (or necessity) of a distribution, re-verified."""
    if not isinstance(d, PossDist):
        raise MalformedMeasureError("expected a possibility distribution")
    ps = Tabulated(d.algebra, Kind.POSSIBILITY, PossDist(d.algebra, d.dist, Kind.POSSIBILITY).table())
    v = is_possibility(ps)
    if not v:
        raise MalformedMeasureError(f"distribution does not yield a possibility: {v.reason}")
    return ps if d.reading is Kind.POSSIBILITY else dual(ps)


# pushforward


def _preimage_masks(f, source, target):
    fn = f.__getitem__ if hasattr(f, "__getitem__") else f
    pre = [0] * target.n_atoms
    for p in source.carrier:
        q = fn(p)
        if not target.has_point(q):
            raise SortError(f"map sends {p!r} to {q!r}, which is not a target point")
        pre[target.atom_index(q)] |= 1 << source.atom_index(p)
    for j, mask in enumerate(pre):
        pts = [p for p in source.carrier if target.atom_index(fn(p)) == j]
        for a in bits(mask):
            if not set(source.atoms[a]) <= set(pts):
                raise NotMeasurableError(
                    f"map is not measurable: the preimage of {format_points(target.atoms[j])} "
                    f"is {format_points(pts)}")
    return pre


def pushforward(f, m, target):
    """The measure U ↦ m(f⁻¹(U)) on ``target``, keeping m's representation.

    ``f`` maps source points to target points (mapping or callable) and must
    be measurable.  ``target`` is a SetAlgebra or a space with one.
    """
    target = getattr(target, "algebra", target)
    pre = _preimage_masks(f, m.algebra, target)

    def pre_mask(v):
        out = 0
        for j in bits(v):
            out |= pre[j]
        return out

    if isinstance(m, ProbabilityMeasure):
        return ProbabilityMeasure(target, tuple(m.value(pre[j]) for j in range(target.n_atoms)))
    if isinstance(m, Envelope):
        return Envelope(m.kind, tuple(pushforward(f, mu, target) for mu in m.family))
    if isinstance(m, Mass):
        images = {}
        for A, v in m.focal:
            h = 0
            for j in range(target.n_atoms):
                if pre[j] & A:
                    h |= 1 << j
            images[h] = images.get(h, ZERO) + v
        return Mass(target, tuple(images.items()), m.reading)
    if isinstance(m, PossDist):
        fn = f.__getitem__ if hasattr(f, "__getitem__") else f
        d = {}
        for p, v in zip(m.algebra.carrier, m.dist):
            q = fn(p)
            d[q] = max(d.get(q, ZERO), v)
        return PossDist(target, tuple(d.get(q, ZERO) for q in target.carrier), m.reading)
    t = m.table()
    return Tabulated(target, m.kind, tuple(t[pre_mask(v)] for v in range(len(target))))


# random generation (used by tests and the soundness harness)


def random_probability(algebra, rng, support=None, max_weight=4):
    n = algebra.n_atoms
    atoms = list(range(n)) if support is None else list(support)
    while True:
        w = [0] * n
        for a in atoms:
            w[a] = rng.randint(0, max_weight)
        if sum(w):
            break
    s = sum(w)
    return ProbabilityMeasure(algebra, tuple(Frac(x, s) for x in w))


def random_envelope(algebra, rng, max_family=3, kind=Kind.UPPER):
    fam = []
    for _ in range(rng.randint(1, max_family)):
        mu = random_probability(algebra, rng)
        if mu not in fam:
            fam.append(mu)
    return Envelope(kind, tuple(fam))


def random_mass(algebra, rng, max_focal=4, reading=Kind.PLAUSIBILITY):
    full = algebra.full_mask
    k = rng.randint(1, min(max_focal, full))
    focal = rng.sample(range(1, full + 1), k)
    w = [rng.randint(1, 4) for _ in focal]
    s = sum(w)
    return Mass(algebra, tuple((A, Frac(x, s)) for A, x in zip(focal, w)), reading)


def random_possdist(algebra, rng, reading=Kind.POSSIBILITY, denominators=(2, 3, 4)):
    n = len(algebra.carrier)
    den = rng.choice(denominators)
    d = [Frac(rng.randint(0, den), den) for _ in range(n)]
    d[rng.randrange(n)] = ONE
    # keep the distribution constant on atoms so it reads off cleanly
    atom_val = {}
    for p, v in zip(algebra.carrier, d):
        i = algebra.atom_index(p)
        atom_val[i] = max(atom_val.get(i, ZERO), v)
    d = [atom_val[algebra.atom_index(p)] for p in algebra.carrier]
    return PossDist(algebra, tuple(d), reading)


def random_measure(kind, algebra, rng, max_family=3, max_focal=4):
    """A random measure of the given kind, valid by construction."""
    kind = Kind(kind)
    if kind is Kind.PROBABILITY:
        return random_probability(algebra, rng)
    if kind in (Kind.UPPER, Kind.LOWER):
        return random_envelope(algebra, rng, max_family, kind)
    if kind in (Kind.PLAUSIBILITY, Kind.BELIEF):
        return random_mass(algebra, rng, max_focal, kind)
    return random_possdist(algebra, rng, kind)


def default_rng(seed):
    return _random.Random(seed)

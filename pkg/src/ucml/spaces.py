"""Finite uncertainty spaces.

An algebra of subsets of a finite carrier is atomic, so it is stored as the
ordered partition of the carrier into its atoms.  A measurable set is a bit
mask over atom indices; every set operation is a mask operation.
"""

from dataclasses import dataclass
from itertools import product as _cartesian

from .errors import MalformedSpaceError, NotMeasurableError, SortError


@dataclass(frozen=True, order=True)
class Inj:
    """A point of a coproduct carrier: ``side`` is 1 (left) or 2 (right)."""

    side: int
    value: object

    def __repr__(self):
        return f"in{self.side}({self.value!r})"


class SetAlgebra:
    """An algebra of subsets of ``carrier`` given by its atoms.

    ``generators`` only records how the algebra was declared so that a model
    can be written back the way it was read; it plays no part in equality.
    """

    __slots__ = ("carrier", "atoms", "generators", "_atom_of", "_hash")

    def __init__(self, carrier, atoms, generators=None):
        carrier = tuple(carrier)
        if len(set(carrier)) != len(carrier):
            seen, dup = set(), None
            for p in carrier:
                if p in seen:
                    dup = p
                    break
                seen.add(p)
            raise MalformedSpaceError(f"duplicate point label {dup!r}")
        order = {p: i for i, p in enumerate(carrier)}
        atom_of = {}
        canon = []
        for block in atoms:
            block = tuple(sorted(block, key=order.__getitem__))
            if not block:
                raise MalformedSpaceError("empty atom")
            for p in block:
                if p not in order:
                    raise MalformedSpaceError(f"atom point {p!r} is not in the carrier")
                if p in atom_of:
                    raise MalformedSpaceError(f"point {p!r} lies in two atoms")
                atom_of[p] = len(canon)
            canon.append(block)
        if len(atom_of) != len(carrier):
            missing = [p for p in carrier if p not in atom_of]
            raise MalformedSpaceError(f"points {missing!r} lie in no atom")
        self.carrier = carrier
        self.atoms = tuple(canon)
        self.generators = tuple(generators) if generators is not None else None
        self._atom_of = atom_of
        self._hash = hash((self.carrier, self.atoms))

    # identity and size

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, SetAlgebra):
            return NotImplemented
        return self._hash == other._hash and self.carrier == other.carrier and self.atoms == other.atoms

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"SetAlgebra(atoms={self.atoms!r})"

    @property
    def n_atoms(self):
        return len(self.atoms)

    @property
    def full_mask(self):
        return (1 << len(self.atoms)) - 1

    def __len__(self):
        """Number of members of the algebra."""
        return 1 << len(self.atoms)

    # lookups

    def atom_index(self, point):
        try:
            return self._atom_of[point]
        except KeyError:
            raise SortError(f"{point!r} is not a point of this space") from None

    def has_point(self, point):
        return point in self._atom_of

    def atom_set(self, i):
        return MeasurableSet(self, 1 << i)

    @property
    def empty(self):
        return MeasurableSet(self, 0)

    @property
    def full(self):
        return MeasurableSet(self, self.full_mask)

    def set(self, mask):
        if mask < 0 or mask > self.full_mask:
            raise SortError(f"mask {mask} out of range for {len(self.atoms)} atoms")
        return MeasurableSet(self, mask)

    def members(self):
        """Every member of the algebra, ordered by mask."""
        return [MeasurableSet(self, m) for m in range(1 << len(self.atoms))]

    def hull_mask(self, points):
        """Mask of the atoms that meet ``points``."""
        mask = 0
        for p in points:
            mask |= 1 << self.atom_index(p)
        return mask

    def from_points(self, points):
        """The measurable set with exactly these points; raises if there is none."""
        points = set(points)
        mask = self.hull_mask(points)
        for i in _bits(mask):
            if not set(self.atoms[i]) <= points:
                raise NotMeasurableError(
                    f"{format_points(sorted(points, key=self.carrier.index))} is not measurable: "
                    f"it splits the atom {format_points(self.atoms[i])}")
        return MeasurableSet(self, mask)

    def is_measurable(self, points):
        try:
            self.from_points(points)
        except NotMeasurableError:
            return False
        return True

    def points_of(self, mask):
        return tuple(p for p in self.carrier if mask >> self._atom_of[p] & 1)


@dataclass(frozen=True)
class MeasurableSet:
    """A member of an algebra, stored as the mask of its atoms."""

    algebra: SetAlgebra
    mask: int

    def _same(self, other):
        if not isinstance(other, MeasurableSet):
            raise SortError(f"expected a measurable set, got {other!r}")
        if other.algebra != self.algebra:
            raise SortError("set operation on sets of different algebras")

    def complement(self):
        return MeasurableSet(self.algebra, self.algebra.full_mask & ~self.mask)

    def union(self, other):
        self._same(other)
        return MeasurableSet(self.algebra, self.mask | other.mask)

    def intersection(self, other):
        self._same(other)
        return MeasurableSet(self.algebra, self.mask & other.mask)

    def difference(self, other):
        self._same(other)
        return MeasurableSet(self.algebra, self.mask & ~other.mask)

    __or__ = union
    __and__ = intersection
    __sub__ = difference

    def __invert__(self):
        return self.complement()

    def issubset(self, other):
        self._same(other)
        return self.mask & ~other.mask == 0

    __le__ = issubset

    def __contains__(self, point):
        return bool(self.mask >> self.algebra.atom_index(point) & 1)

    def is_empty(self):
        return self.mask == 0

    def is_full(self):
        return self.mask == self.algebra.full_mask

    @property
    def atom_indices(self):
        return tuple(_bits(self.mask))

    @property
    def points(self):
        return self.algebra.points_of(self.mask)

    def __repr__(self):
        return format_points(self.points)


@dataclass(frozen=True)
class UncertaintySpace:
    """A named finite carrier with an algebra of measurable subsets."""

    name: str
    algebra: SetAlgebra

    @property
    def carrier(self):
        return self.algebra.carrier

    @property
    def atoms(self):
        return self.algebra.atoms

    def __repr__(self):
        return f"UncertaintySpace({self.name!r}, atoms={self.algebra.atoms!r})"


def _bits(mask):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def bits(mask):
    """Indices of the set bits of ``mask``, ascending."""
    return list(_bits(mask))


def format_point(p):
    if isinstance(p, tuple):
        return "(" + ", ".join(format_point(q) for q in p) + ")"
    if isinstance(p, Inj):
        return f"in{p.side}({format_point(p.value)})"
    return str(p)


def format_points(points):
    return "{" + ", ".join(format_point(p) for p in points) + "}"


def generate_algebra(carrier, generators):
    """Least algebra on ``carrier`` containing every generator.

    The atoms are the nonempty cells of the partition by generator-membership
    signature, listed in order of first appearance in the carrier.
    """
    carrier = tuple(carrier)
    gens = [frozenset(g) for g in generators]
    points = set(carrier)
    if len(points) != len(carrier):
        SetAlgebra(carrier, [carrier])  # raises with the duplicate named
    for g in gens:
        stray = g - points
        if stray:
            raise MalformedSpaceError(f"generator mentions unknown points {sorted(map(str, stray))}")
    cells = {}
    for p in carrier:
        cells.setdefault(tuple(p in g for g in gens), []).append(p)
    return SetAlgebra(carrier, list(cells.values()), generators=[tuple(g) for g in generators])


def discrete_algebra(carrier):
    carrier = tuple(carrier)
    return SetAlgebra(carrier, [(p,) for p in carrier])


def make_space(name, points, generators=()):
    return UncertaintySpace(name, generate_algebra(points, generators))


def product_algebra(A, B):
    carrier = [(a, b) for a in A.carrier for b in B.carrier]
    atoms = [[(a, b) for a in ai for b in bj] for ai in A.atoms for bj in B.atoms]
    return SetAlgebra(carrier, atoms)


def coproduct_algebra(A, B):
    carrier = [Inj(1, a) for a in A.carrier] + [Inj(2, b) for b in B.carrier]
    atoms = [[Inj(1, a) for a in blk] for blk in A.atoms] + [[Inj(2, b) for b in blk] for blk in B.atoms]
    return SetAlgebra(carrier, atoms)


def product_space(A, B, name=None):
    """Product space: pairs, with the algebra generated by measurable rectangles."""
    return UncertaintySpace(name or f"{A.name}*{B.name}", product_algebra(A.algebra, B.algebra))


def coproduct_space(A, B, name=None):
    """Coproduct space: tagged disjoint union, generated by the two injections."""
    return UncertaintySpace(name or f"{A.name}+{B.name}", coproduct_algebra(A.algebra, B.algebra))


def rectangle(P, U, V):
    """The measurable set U×V of the product algebra ``P``."""
    pts = set(_cartesian(U.points, V.points))
    return P.from_points(pts)


def preimage(f, target, source):
    """f⁻¹(target) as a measurable set of ``source``; raises if it is not one.

    ``f`` is a mapping or a callable from source points to target points.
    """
    fn = f.__getitem__ if hasattr(f, "__getitem__") else f
    pts = [p for p in source.carrier if fn(p) in target]
    try:
        return source.from_points(pts)
    except NotMeasurableError:
        raise NotMeasurableError(
            f"map is not measurable: the preimage of {target!r} is {format_points(pts)}") from None


def check_measurable_map(f, source, target):
    """Return None if f: source → target is measurable, else the offending target atom.

    Preimages of atoms suffice because every measurable set is a union of atoms.
    """
    for i in range(target.n_atoms):
        try:
            preimage(f, target.atom_set(i), source)
        except NotMeasurableError:
            return target.atom_set(i)
    return None

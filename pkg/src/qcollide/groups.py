"""Finite abelian groups as explicit products of cyclic groups.

Elements are residue tuples with one entry per cyclic factor. Characters
carry exact rational phases so orthogonality tests are equality tests,
never tolerance checks. Flat indices order residue tuples with the last
factor fastest (row-major); every array in the simulator relies on that
codec, so it is fixed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import GroupMismatchError, ResourceLimitError

# Enumeration-based operations refuse groups larger than this by default.
DEFAULT_ENUMERATION_BOUND = 1 << 24


def is_prime(n: int) -> bool:
    """Trial-division primality test; adequate for desk-scale moduli."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class GroupSpec:
    """An abelian group Z_{N_1} x ... x Z_{N_k} with known cyclic orders.

    The empty product is the trivial group. Individual orders must be >= 2.
    """

    orders: tuple[int, ...]

    def __post_init__(self) -> None:
        orders = tuple(int(n) for n in self.orders)
        if any(n < 2 for n in orders):
            raise ValueError(f"cyclic orders must be >= 2, got {orders}")
        object.__setattr__(self, "orders", orders)

    @cached_property
    def order(self) -> int:
        return math.prod(self.orders)

    @cached_property
    def exponent(self) -> int:
        """lcm of the cyclic orders (the order of the largest element)."""
        return math.lcm(*self.orders) if self.orders else 1

    @cached_property
    def weights(self) -> tuple[int, ...]:
        """Mixed-radix place values for the flat index (last factor fastest)."""
        w: list[int] = []
        acc = 1
        for n in reversed(self.orders):
            w.append(acc)
            acc *= n
        return tuple(reversed(w))

    @property
    def factor_count(self) -> int:
        return len(self.orders)

    def identity(self) -> GroupElement:
        return GroupElement(self, (0,) * len(self.orders))

    def element(self, residues: Iterable[int]) -> GroupElement:
        return GroupElement(self, tuple(residues))

    def flatten(self, el: GroupElement) -> int:
        if el.spec != self:
            raise GroupMismatchError(f"element of {el.spec} indexed against {self}")
        return sum(r * w for r, w in zip(el.residues, self.weights))

    def unflatten(self, index: int) -> GroupElement:
        index = int(index)
        if not 0 <= index < self.order:
            raise ValueError(f"flat index {index} out of range for |G|={self.order}")
        residues = tuple((index // w) % n for n, w in zip(self.orders, self.weights))
        return GroupElement(self, residues)

    def elements(self) -> Iterator[GroupElement]:
        for residues in itertools.product(*(range(n) for n in self.orders)):
            yield GroupElement(self, residues)

    def random_element(self, rng: np.random.Generator) -> GroupElement:
        return GroupElement(self, tuple(int(rng.integers(n)) for n in self.orders))

    def require_enumerable(self, bound: int, what: str) -> None:
        if self.order > bound:
            raise ResourceLimitError(
                f"{what} needs |G|={self.order} <= {bound}; refusing {self}"
            )

    def __str__(self) -> str:
        if not self.orders:
            return "Z1"
        parts = []
        for n, run in itertools.groupby(self.orders):
            count = len(list(run))
            parts.append(f"Z{n}^{count}" if count > 1 else f"Z{n}")
        return "x".join(parts)


@dataclass(frozen=True)
class GroupElement:
    """A residue tuple, one entry per cyclic factor of its spec."""

    spec: GroupSpec
    residues: tuple[int, ...]

    def __post_init__(self) -> None:
        residues = tuple(int(r) for r in self.residues)
        if len(residues) != len(self.spec.orders):
            raise ValueError(
                f"expected {len(self.spec.orders)} residues, got {len(residues)}"
            )
        object.__setattr__(
            self, "residues", tuple(r % n for r, n in zip(residues, self.spec.orders))
        )

    def _require_same_spec(self, other: GroupElement) -> None:
        if self.spec != other.spec:
            raise GroupMismatchError(f"cannot combine {self.spec} with {other.spec}")

    def __add__(self, other: GroupElement) -> GroupElement:
        self._require_same_spec(other)
        return GroupElement(
            self.spec, tuple(a + b for a, b in zip(self.residues, other.residues))
        )

    def __neg__(self) -> GroupElement:
        return GroupElement(self.spec, tuple(-r for r in self.residues))

    def __sub__(self, other: GroupElement) -> GroupElement:
        return self + (-other)

    def scale(self, c: int) -> GroupElement:
        return GroupElement(self.spec, tuple(c * r for r in self.residues))

    @property
    def is_identity(self) -> bool:
        return all(r == 0 for r in self.residues)

    @property
    def flat(self) -> int:
        return self.spec.flatten(self)

    def __str__(self) -> str:
        return "(" + ",".join(str(r) for r in self.residues) + ")"


def element_add(a: GroupElement, b: GroupElement) -> GroupElement:
    """Componentwise modular addition; functional alias for ``a + b``."""
    return a + b


@dataclass(frozen=True)
class CharacterValue:
    """A root of unity stored as an exact rational phase t/L in [0, 1).

    ``value`` materialises exp(2*pi*i*phase) on demand; equality and the
    orthogonality test ``is_one`` are exact rational comparisons.
    """

    phase: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "phase", self.phase % 1)

    @property
    def value(self) -> complex:
        return complex(np.exp(2j * np.pi * float(self.phase)))

    @property
    def is_one(self) -> bool:
        return self.phase == 0

    def __mul__(self, other: CharacterValue) -> CharacterValue:
        return CharacterValue(self.phase + other.phase)


def character_phase(g: GroupElement, h: GroupElement) -> Fraction:
    """Exact phase of chi_g(h): sum_j g_j*h_j/N_j reduced mod 1."""
    if g.spec != h.spec:
        raise GroupMismatchError(f"character of {g.spec} applied to {h.spec}")
    spec = g.spec
    L = spec.exponent
    t = 0
    for n, a, b in zip(spec.orders, g.residues, h.residues):
        t += (L // n) * a * b
    return Fraction(t % L, L)


def character_eval(g: GroupElement, h: GroupElement) -> CharacterValue:
    """The character chi_g evaluated at h, as an exact root of unity."""
    return CharacterValue(character_phase(g, h))


def character_sum(
    spec: GroupSpec, g: GroupElement, *, bound: int = DEFAULT_ENUMERATION_BOUND
) -> complex:
    """Sum of chi_g(h) over every h in the group, by enumeration.

    All |G| phases are accumulated as exact integers modulo the group
    exponent. A character hits each value in its image equally often, so
    the enumerated multiset of phases is uniform over a cyclic set of
    roots of unity and the sum collapses exactly to |G| (trivial
    character) or 0. If the enumerated counts ever failed that pattern
    the floating-point sum would be returned instead.
    """
    if g.spec != spec:
        raise GroupMismatchError(f"element of {g.spec} summed over {spec}")
    spec.require_enumerable(bound, "character_sum")
    L = spec.exponent
    coeffs = [(L // n) * r % L for n, r in zip(spec.orders, g.residues)]
    step = math.gcd(L, *coeffs)

    idx = np.arange(spec.order, dtype=np.int64)
    t = np.zeros(spec.order, dtype=np.int64)
    for c, n, w in zip(coeffs, spec.orders, spec.weights):
        if c:
            t += c * ((idx // w) % n)
    t %= L
    counts = np.bincount(t, minlength=L)
    image_size = L // step
    uniform = (
        np.count_nonzero(counts) == image_size
        and bool(np.all(counts[::step] == spec.order // image_size))
    )
    if uniform:
        return complex(spec.order) if step == L else 0j
    return complex(np.exp(2j * np.pi * (t / L)).sum())  # pragma: no cover


@dataclass(frozen=True)
class SubgroupBasis:
    """A subgroup presented by a finite list of generators."""

    group: GroupSpec
    generators: tuple[GroupElement, ...]

    def __post_init__(self) -> None:
        generators = tuple(self.generators)
        for g in generators:
            if g.spec != self.group:
                raise GroupMismatchError(f"generator of {g.spec} in basis over {self.group}")
        object.__setattr__(self, "generators", generators)


def canonical_basis(spec: GroupSpec) -> tuple[GroupElement, ...]:
    """One generator per cyclic factor: the unit tuple in each slot."""
    out = []
    for j in range(len(spec.orders)):
        residues = [0] * len(spec.orders)
        residues[j] = 1
        out.append(GroupElement(spec, tuple(residues)))
    return tuple(out)


def subgroup_enumerate(
    basis: SubgroupBasis, *, bound: int = DEFAULT_ENUMERATION_BOUND
) -> frozenset[GroupElement]:
    """Full closure of the generators under the group operation."""
    spec = basis.group
    gens = _distinct_nonidentity(basis.generators)
    seen = {spec.identity()}
    frontier = [spec.identity()]
    while frontier:
        nxt = []
        for el in frontier:
            for g in gens:
                cand = el + g
                if cand not in seen:
                    if len(seen) >= bound:
                        raise ResourceLimitError(
                            f"subgroup closure in {spec} exceeds bound {bound}"
                        )
                    seen.add(cand)
                    nxt.append(cand)
        frontier = nxt
    return frozenset(seen)


def orthogonal_subgroup(basis: SubgroupBasis) -> SubgroupBasis:
    """Generators of {g : chi_g(h) = 1 for every h in the subgroup}.

    When every cyclic order equals one prime p this is a nullspace
    computation over the field with p elements. Otherwise the congruence
    system sum_j (L/N_j) g_j h_j = 0 (mod L) is lifted to an integer
    kernel problem and solved by unimodular column reduction.
    """
    spec = basis.group
    k = len(spec.orders)
    gens = _distinct_nonidentity(basis.generators)
    if not gens:
        return SubgroupBasis(spec, canonical_basis(spec))

    p = _homogeneous_prime(spec)
    if p is not None:
        vectors = _gfp_nullspace([g.residues for g in gens], k, p)
    else:
        L = spec.exponent
        scale = [L // n for n in spec.orders]
        rows = []
        for i, g in enumerate(gens):
            row = [scale[j] * g.residues[j] for j in range(k)] + [0] * len(gens)
            row[k + i] = L
            rows.append(row)
        vectors = [v[:k] for v in _integer_kernel_basis(rows, k + len(gens))]

    out = _distinct_nonidentity(spec.element(v) for v in vectors)
    return SubgroupBasis(spec, tuple(out))


def solve_kernel_from_orthogonal_samples(
    samples: Sequence[GroupElement], spec: GroupSpec
) -> SubgroupBasis:
    """Generators of the joint solution set of the sampled constraints.

    Each sample z pins down {y : chi_z(y) = 1}; the result is the
    orthogonal of the subgroup the samples generate. No samples means no
    constraints, so the whole group comes back.
    """
    for s in samples:
        if s.spec != spec:
            raise GroupMismatchError(f"sample from {s.spec} constrained over {spec}")
    return orthogonal_subgroup(SubgroupBasis(spec, tuple(samples)))


def subgroup_measure(
    samples: Sequence[GroupElement],
    spec: GroupSpec,
    *,
    bound: int = DEFAULT_ENUMERATION_BOUND,
) -> int:
    """Monotone size measure of the subgroup the samples generate.

    Field rank over F_p for homogeneous prime groups, closure size
    otherwise. Only comparisons between measures of nested sample lists
    are meaningful.
    """
    useful = _distinct_nonidentity(samples)
    p = _homogeneous_prime(spec)
    if p is not None:
        return _gfp_rank([s.residues for s in useful], len(spec.orders), p)
    return len(subgroup_enumerate(SubgroupBasis(spec, tuple(useful)), bound=bound))


def residue_matrix(
    spec: GroupSpec, *, bound: int = DEFAULT_ENUMERATION_BOUND
) -> np.ndarray:
    """(|G|, k) int64 matrix of residue tuples in flat-index order."""
    spec.require_enumerable(bound, "residue_matrix")
    idx = np.arange(spec.order, dtype=np.int64)
    if not spec.orders:
        return np.zeros((spec.order, 0), dtype=np.int64)
    cols = [(idx // w) % n for n, w in zip(spec.orders, spec.weights)]
    return np.stack(cols, axis=1)


def _distinct_nonidentity(elements: Iterable[GroupElement]) -> list[GroupElement]:
    out: list[GroupElement] = []
    seen: set[GroupElement] = set()
    for el in elements:
        if not el.is_identity and el not in seen:
            seen.add(el)
            out.append(el)
    return out


def _homogeneous_prime(spec: GroupSpec) -> int | None:
    orders = spec.orders
    if orders and all(n == orders[0] for n in orders) and is_prime(orders[0]):
        return orders[0]
    return None


def _gfp_eliminate(
    rows: Sequence[Sequence[int]], width: int, p: int
) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form over F_p; returns (rows, pivot columns)."""
    a = [[int(v) % p for v in row] for row in rows]
    a = [row for row in a if any(row)]
    pivots: list[int] = []
    r = 0
    for c in range(width):
        if r == len(a):
            break
        pr = next((i for i in range(r, len(a)) if a[i][c]), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [(v * inv) % p for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(vi - f * vr) % p for vi, vr in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def _gfp_rank(rows: Sequence[Sequence[int]], width: int, p: int) -> int:
    return len(_gfp_eliminate(rows, width, p)[1])


def _gfp_nullspace(
    rows: Sequence[Sequence[int]], width: int, p: int
) -> list[tuple[int, ...]]:
    reduced, pivots = _gfp_eliminate(rows, width, p)
    pivot_set = set(pivots)
    basis = []
    for free in range(width):
        if free in pivot_set:
            continue
        vec = [0] * width
        vec[free] = 1
        for ri, pc in enumerate(pivots):
            vec[pc] = (-reduced[ri][free]) % p
        basis.append(tuple(vec))
    return basis


def _integer_kernel_basis(
    rows: Sequence[Sequence[int]], width: int
) -> list[list[int]]:
    """Basis of {v in Z^width : M v = 0} for the matrix M given by rows.

    Row-reduces the transpose with unimodular operations while carrying
    the transform; transform rows matching zeroed-out rows span the
    kernel as a lattice.
    """
    n_constraints = len(rows)
    c = [[rows[i][j] for i in range(n_constraints)] for j in range(width)]
    t = [[1 if i == j else 0 for j in range(width)] for i in range(width)]
    pivot = 0
    for col in range(n_constraints):
        if pivot == width:
            break
        while True:
            nz = [i for i in range(pivot, width) if c[i][col]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(c[i][col]))
            if i0 != pivot:
                c[pivot], c[i0] = c[i0], c[pivot]
                t[pivot], t[i0] = t[i0], t[pivot]
            done = True
            for i in range(pivot + 1, width):
                if not c[i][col]:
                    continue
                q = c[i][col] // c[pivot][col]
                if q:
                    c[i] = [x - q * y for x, y in zip(c[i], c[pivot])]
                    t[i] = [x - q * y for x, y in zip(t[i], t[pivot])]
                if c[i][col]:
                    done = False
            if done:
                pivot += 1
                break
    return [t[i] for i in range(pivot, width)]

"""Homomorphic hash families.

Every instance maps one finite abelian group onto another and satisfies
H(x + y) = H(x) + H(y) for the respective group operations. Families:

* ``xor_matrix``      -- GF(2) matrix times bit vector, Z_2^m -> Z_2^n.
* ``xor_crc``         -- polynomial residue x(t) mod g(t) over GF(2) for a
                         fixed public generator polynomial of degree n.
* ``kfm_exponential`` -- prod_i g_i^{b_i} mod p with every g_i of prime
                         order q dividing p-1; inputs are vectors mod q,
                         outputs live in the order-q subgroup of the units
                         mod p and are indexed by a fixed generator.
* ``rsa_modular``     -- x^e mod N on the units of N = p*q, exposed
                         through the decomposition Z_{p-1} x Z_{q-1};
                         requires gcd(e, lcm(p-1, q-1)) > 1 so the map is
                         non-injective.
* ``constant_zero``   -- test-only map sending everything to the output
                         identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .errors import GroupMismatchError, ParameterError
from .groups import DEFAULT_ENUMERATION_BOUND, GroupElement, GroupSpec, is_prime

FAMILY_TAGS = (
    "xor_matrix",
    "xor_crc",
    "kfm_exponential",
    "rsa_modular",
    "constant_zero",
)

_FAMILY_ALIASES = {
    "xor-matrix": "xor_matrix",
    "xor-crc": "xor_crc",
    "kfm": "kfm_exponential",
    "kfm-exponential": "kfm_exponential",
    "rsa": "rsa_modular",
    "rsa-modular": "rsa_modular",
    "constant-zero": "constant_zero",
}


def canonical_family(tag: str) -> str:
    tag = tag.strip().lower()
    tag = _FAMILY_ALIASES.get(tag, tag.replace("-", "_"))
    if tag not in FAMILY_TAGS:
        raise ParameterError(f"unknown hash family {tag!r}; expected one of {FAMILY_TAGS}")
    return tag


@dataclass(frozen=True)
class XorMatrixParams:
    """n x m bit matrix; ``rows[i]`` has bit j set iff entry (i, j) is 1."""

    rows: tuple[int, ...]
    width: int


@dataclass(frozen=True)
class XorCrcParams:
    """Degree-n generator polynomial; bit i is the coefficient of t^i."""

    generator_poly: int
    degree: int


@dataclass(frozen=True)
class KfmParams:
    p: int
    q: int
    generators: tuple[int, ...]
    base: int                   # fixed generator of the order-q subgroup
    gen_dlogs: tuple[int, ...]  # exponent of each g_i with respect to base


@dataclass(frozen=True)
class RsaParams:
    p: int
    q: int
    e: int
    unit_gen_p: int  # primitive root mod p
    unit_gen_q: int  # primitive root mod q


@dataclass(frozen=True)
class ConstantZeroParams:
    pass


HashParams = Union[
    XorMatrixParams, XorCrcParams, KfmParams, RsaParams, ConstantZeroParams
]


@dataclass(frozen=True)
class HomomorphicHash:
    family: str
    input_group: GroupSpec
    output_group: GroupSpec
    params: HashParams


# ---------------------------------------------------------------------------
# small number theory helpers (desk scale, trial division throughout)


def _prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _primitive_root(p: int) -> int:
    factors = _prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in factors):
            return g
    raise ParameterError(f"no primitive root found mod {p}")  # pragma: no cover


def _crt_pair(a: int, p: int, b: int, q: int) -> int:
    """The residue mod p*q congruent to a mod p and b mod q (p, q coprime)."""
    inv = pow(p, -1, q)
    return (a + p * (((b - a) * inv) % q)) % (p * q)


def _poly_mod(value: int, poly: int, degree: int) -> int:
    """Residue of the GF(2) polynomial ``value`` modulo ``poly``."""
    top = value.bit_length() - 1
    while top >= degree:
        value ^= poly << (top - degree)
        top = value.bit_length() - 1
    return value


def _mask_from_residues(residues: Sequence[int]) -> int:
    mask = 0
    for j, r in enumerate(residues):
        if r:
            mask |= 1 << j
    return mask


def _residues_from_mask(mask: int, width: int) -> tuple[int, ...]:
    return tuple((mask >> j) & 1 for j in range(width))


def _revbits(value: int, width: int) -> int:
    out = 0
    for j in range(width):
        if (value >> j) & 1:
            out |= 1 << (width - 1 - j)
    return out


# ---------------------------------------------------------------------------
# constructors


def xor_matrix_hash(rows: Sequence[int], width: int) -> HomomorphicHash:
    rows = tuple(int(r) for r in rows)
    if width < 1 or not rows:
        raise ParameterError("xor_matrix needs width >= 1 and at least one row")
    if any(r < 0 or r >> width for r in rows):
        raise ParameterError(f"matrix rows must fit in {width} bits")
    return HomomorphicHash(
        family="xor_matrix",
        input_group=GroupSpec((2,) * width),
        output_group=GroupSpec((2,) * len(rows)),
        params=XorMatrixParams(rows=rows, width=width),
    )


def xor_crc_hash(generator_poly: int, degree: int, message_bits: int) -> HomomorphicHash:
    generator_poly = int(generator_poly)
    if degree < 1 or message_bits < 1:
        raise ParameterError("xor_crc needs degree >= 1 and message_bits >= 1")
    if generator_poly.bit_length() - 1 != degree:
        raise ParameterError(
            f"generator polynomial degree is {generator_poly.bit_length() - 1}, expected {degree}"
        )
    if not generator_poly & 1:
        raise ParameterError("generator polynomial must have constant term 1")
    return HomomorphicHash(
        family="xor_crc",
        input_group=GroupSpec((2,) * message_bits),
        output_group=GroupSpec((2,) * degree),
        params=XorCrcParams(generator_poly=generator_poly, degree=degree),
    )


def kfm_hash(p: int, q: int, generators: Sequence[int]) -> HomomorphicHash:
    p, q = int(p), int(q)
    generators = tuple(int(g) % p for g in generators)
    if not is_prime(p):
        raise ParameterError(f"p={p} is not prime")
    if not is_prime(q):
        raise ParameterError(f"q={q} is not prime")
    if (p - 1) % q:
        raise ParameterError(f"q={q} does not divide p-1={p - 1}")
    if not generators:
        raise ParameterError("at least one generator is required")
    for g in generators:
        if g <= 1 or pow(g, q, p) != 1:
            raise ParameterError(f"generator {g} does not have order {q} mod {p}")
    base = generators[0]
    powers = _subgroup_powers(base, q, p)
    dlog = {rep: i for i, rep in enumerate(powers)}
    if len(dlog) != q:  # pragma: no cover - excluded by the order check
        raise ParameterError(f"base {base} does not generate a subgroup of size {q}")
    gen_dlogs = tuple(dlog[g] for g in generators)
    return HomomorphicHash(
        family="kfm_exponential",
        input_group=GroupSpec((q,) * len(generators)),
        output_group=GroupSpec((q,)),
        params=KfmParams(p=p, q=q, generators=generators, base=base, gen_dlogs=gen_dlogs),
    )


def rsa_hash(p: int, q: int, e: int) -> HomomorphicHash:
    p, q, e = int(p), int(q), int(e)
    if not (is_prime(p) and is_prime(q)):
        raise ParameterError(f"p={p} and q={q} must both be prime")
    if p == q:
        raise ParameterError("p and q must be distinct")
    if p < 3 or q < 3:
        raise ParameterError("p and q must be odd primes")
    if e < 2:
        raise ParameterError("exponent e must be >= 2")
    lam = math.lcm(p - 1, q - 1)
    if math.gcd(e, lam) == 1:
        raise ParameterError(
            f"gcd(e, lambda(N)) = gcd({e}, {lam}) = 1: the power map is injective "
            "on the units and has no collisions"
        )
    params = RsaParams(
        p=p, q=q, e=e, unit_gen_p=_primitive_root(p), unit_gen_q=_primitive_root(q)
    )
    out_orders = tuple(order for _, order, _ in _rsa_layout(params))
    return HomomorphicHash(
        family="rsa_modular",
        input_group=GroupSpec((p - 1, q - 1)),
        output_group=GroupSpec(out_orders),
        params=params,
    )


def constant_zero_hash(input_orders: Sequence[int]) -> HomomorphicHash:
    return HomomorphicHash(
        family="constant_zero",
        input_group=GroupSpec(tuple(input_orders)),
        output_group=GroupSpec((2,)),
        params=ConstantZeroParams(),
    )


def gen_params(
    family: str,
    *,
    seed: int = 0,
    m: int | None = None,
    n: int | None = None,
    p: int | None = None,
    q: int | None = None,
    e: int | None = None,
    orders: Sequence[int] | None = None,
) -> HomomorphicHash:
    """Generate a hash instance from size parameters and a seed.

    Reruns with identical arguments produce identical instances.
    """
    family = canonical_family(family)
    rng = np.random.default_rng(seed)

    if family == "xor_matrix":
        if m is None or n is None:
            raise ParameterError("xor_matrix generation needs --m and --n")
        if not 1 <= n <= m:
            raise ParameterError(f"need 1 <= n <= m, got m={m}, n={n}")
        rows = tuple(
            _mask_from_residues(rng.integers(0, 2, size=m).tolist()) for _ in range(n)
        )
        return xor_matrix_hash(rows, m)

    if family == "xor_crc":
        if m is None or n is None:
            raise ParameterError("xor_crc generation needs --m and --n")
        if not 1 <= n < m:
            raise ParameterError(f"need 1 <= n < m, got m={m}, n={n}")
        middle = 0
        if n > 1:
            middle = _mask_from_residues(rng.integers(0, 2, size=n - 1).tolist())
        poly = (1 << n) | (middle << 1) | 1
        return xor_crc_hash(poly, n, m)

    if family == "kfm_exponential":
        if p is None or q is None:
            raise ParameterError("kfm generation needs --p and --q")
        count = 2 if m is None else int(m)
        if count < 1:
            raise ParameterError("kfm needs at least one generator")
        if not is_prime(p) or not is_prime(q) or (p - 1) % q:
            raise ParameterError(f"need primes with q | p-1, got p={p}, q={q}")
        cofactor = (p - 1) // q
        gens = []
        while len(gens) < count:
            r = int(rng.integers(2, p))
            g = pow(r, cofactor, p)
            if g != 1:
                gens.append(g)
        return kfm_hash(p, q, gens)

    if family == "rsa_modular":
        if p is None or q is None or e is None:
            raise ParameterError("rsa generation needs --p, --q and --e")
        return rsa_hash(p, q, e)

    if family == "constant_zero":
        if orders is None:
            if m is None:
                raise ParameterError("constant_zero generation needs --orders or --m")
            orders = (2,) * m
        return constant_zero_hash(orders)

    raise ParameterError(f"unhandled family {family}")  # pragma: no cover


# ---------------------------------------------------------------------------
# evaluation


def hash_eval(h: HomomorphicHash, x: GroupElement) -> GroupElement:
    """Evaluate the hash at a single input element."""
    if x.spec != h.input_group:
        raise GroupMismatchError(f"input from {x.spec}, hash expects {h.input_group}")

    if h.family == "xor_matrix":
        params = h.params
        mask = _mask_from_residues(x.residues)
        bits = tuple((row & mask).bit_count() & 1 for row in params.rows)
        return h.output_group.element(bits)

    if h.family == "xor_crc":
        params = h.params
        rem = _poly_mod(_mask_from_residues(x.residues), params.generator_poly, params.degree)
        return h.output_group.element(_residues_from_mask(rem, params.degree))

    if h.family == "kfm_exponential":
        params = h.params
        idx = sum(b * d for b, d in zip(x.residues, params.gen_dlogs)) % params.q
        return h.output_group.element((idx,))

    if h.family == "rsa_modular":
        params = h.params
        comps = []
        for src, _, div in _rsa_layout(params):
            full = h.input_group.orders[src]
            comps.append(((params.e * x.residues[src]) % full) // div)
        return h.output_group.element(comps)

    if h.family == "constant_zero":
        return h.output_group.identity()

    raise ParameterError(f"unhandled family {h.family}")  # pragma: no cover


def hash_add_outputs(h: HomomorphicHash, a: GroupElement, b: GroupElement) -> GroupElement:
    """Combine two output values with the output group operation.

    For bit and component groups this is componentwise modular addition;
    for the exponential family the integer representatives are multiplied
    mod p and mapped back through the subgroup index.
    """
    for y in (a, b):
        if y.spec != h.output_group:
            raise GroupMismatchError(f"output from {y.spec}, hash produces {h.output_group}")
    if h.family == "kfm_exponential":
        params = h.params
        powers = _subgroup_powers(params.base, params.q, params.p)
        rep = (powers[a.residues[0]] * powers[b.residues[0]]) % params.p
        return h.output_group.element((powers.index(rep),))
    return a + b


def output_representative(h: HomomorphicHash, y: GroupElement) -> int | None:
    """Integer representative of an output element, for the multiplicative
    families: the subgroup member mod p (kfm) or the unit mod N (rsa)."""
    if y.spec != h.output_group:
        raise GroupMismatchError(f"output from {y.spec}, hash produces {h.output_group}")
    if h.family == "kfm_exponential":
        params = h.params
        return _subgroup_powers(params.base, params.q, params.p)[y.residues[0]]
    if h.family == "rsa_modular":
        params = h.params
        exps = {0: 0, 1: 0}
        for slot, (src, _, div) in enumerate(_rsa_layout(params)):
            exps[src] = y.residues[slot] * div
        up = pow(params.unit_gen_p, exps[0], params.p)
        uq = pow(params.unit_gen_q, exps[1], params.q)
        return _crt_pair(up, params.p, uq, params.q)
    return None


def input_representative(h: HomomorphicHash, x: GroupElement) -> int | None:
    """Unit mod N represented by an rsa input element; None elsewhere."""
    if x.spec != h.input_group:
        raise GroupMismatchError(f"input from {x.spec}, hash expects {h.input_group}")
    if h.family != "rsa_modular":
        return None
    params = h.params
    up = pow(params.unit_gen_p, x.residues[0], params.p)
    uq = pow(params.unit_gen_q, x.residues[1], params.q)
    return _crt_pair(up, params.p, uq, params.q)


@lru_cache(maxsize=64)
def hash_eval_all(
    h: HomomorphicHash, bound: int = DEFAULT_ENUMERATION_BOUND
) -> np.ndarray:
    """Flat output index for every flat input index, vectorised per family.

    The returned array is cached and marked read-only.
    """
    h.input_group.require_enumerable(bound, "hash_eval_all")
    nin = h.input_group.order

    if h.family in ("xor_matrix", "xor_crc"):
        m = len(h.input_group.orders)
        n = len(h.output_group.orders)
        if h.family == "xor_matrix":
            rows = h.params.rows
            cols = [sum(((rows[i] >> j) & 1) << i for i in range(n)) for j in range(m)]
        else:
            params = h.params
            cols = [_poly_mod(1 << j, params.generator_poly, params.degree) for j in range(m)]
        contrib = [_revbits(c, n) for c in cols]
        out = np.zeros(1, dtype=np.int64)
        for j in reversed(range(m)):
            out = np.concatenate([out, out ^ contrib[j]])
        table = out
    elif h.family == "kfm_exponential":
        params = h.params
        q = params.q
        idx = np.arange(nin, dtype=np.int64)
        table = np.zeros(nin, dtype=np.int64)
        for d, w in zip(params.gen_dlogs, h.input_group.weights):
            if d:
                table += d * ((idx // w) % q)
        table %= q
    elif h.family == "rsa_modular":
        params = h.params
        idx = np.arange(nin, dtype=np.int64)
        table = np.zeros(nin, dtype=np.int64)
        for slot, (src, _, div) in enumerate(_rsa_layout(params)):
            full = h.input_group.orders[src]
            comp = ((params.e * ((idx // h.input_group.weights[src]) % full)) % full) // div
            table += comp * h.output_group.weights[slot]
    elif h.family == "constant_zero":
        table = np.zeros(nin, dtype=np.int64)
    else:  # pragma: no cover
        raise ParameterError(f"unhandled family {h.family}")

    table.flags.writeable = False
    return table


@lru_cache(maxsize=64)
def _subgroup_powers(base: int, q: int, p: int) -> tuple[int, ...]:
    out = []
    v = 1
    for _ in range(q):
        out.append(v)
        v = (v * base) % p
    return tuple(out)


def _rsa_layout(params: RsaParams) -> tuple[tuple[int, int, int], ...]:
    """Kept output slots as (input index, reduced order, divisor).

    The e-th power map multiplies each exponent by e; its image in the
    Z_{p-1} factor is the set of multiples of d = gcd(e, p-1), relabelled
    as Z_{(p-1)/d} by dividing out d. Factors that collapse to a single
    element are dropped from the output group.
    """
    layout = []
    for src, full in ((0, params.p - 1), (1, params.q - 1)):
        d = math.gcd(params.e, full)
        if full // d > 1:
            layout.append((src, full // d, d))
    return tuple(layout)

"""Independent brute-force ground truth for kernels and sampler audits.

Everything here enumerates: kernels by hashing every input, orthogonal
sets by exact integer character tests against every kernel element, and
sampler distributions by chi-square against the enumerated support.
Attack results are always checked against this module, never against
the attack's own intermediate state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np
from scipy import stats

from .errors import ResourceLimitError
from .groups import DEFAULT_ENUMERATION_BOUND, GroupElement, GroupSpec, residue_matrix
from .hashes import HomomorphicHash, hash_eval_all
from .simulator import (
    BACKEND_COSET,
    BACKEND_STATEVECTOR,
    SampleTrace,
    sample_orthogonal,
)


@dataclass(frozen=True)
class BruteForceResult:
    kernel_elements: frozenset[GroupElement]
    orthogonal_elements: frozenset[GroupElement]
    preimage_index: Mapping[GroupElement, tuple[GroupElement, ...]] | None = None


@dataclass(frozen=True)
class AuditVerdict:
    passed: bool
    draws: int
    support_size: int
    out_of_support: int
    p_value: float | None
    counts: tuple[int, ...]


@dataclass(frozen=True)
class EquivalenceVerdict:
    passed: bool
    draws_each: int
    support_size: int
    p_value: float | None


def kernel_bruteforce(
    h: HomomorphicHash,
    *,
    bound: int = DEFAULT_ENUMERATION_BOUND,
    with_preimages: bool = False,
) -> BruteForceResult:
    """Exact kernel and orthogonal set by full enumeration of the inputs."""
    spec = h.input_group
    spec.require_enumerable(bound, "kernel_bruteforce")
    table = hash_eval_all(h, bound)
    kernel_flat = np.flatnonzero(table == 0)
    kernel = frozenset(spec.unflatten(i) for i in kernel_flat)

    orthogonal = frozenset(
        spec.unflatten(i) for i in _orthogonal_flat(spec, kernel_flat, bound)
    )

    preimages = None
    if with_preimages:
        buckets: dict[GroupElement, list[GroupElement]] = {}
        for i, out_flat in enumerate(table):
            key = h.output_group.unflatten(int(out_flat))
            buckets.setdefault(key, []).append(spec.unflatten(i))
        preimages = {k: tuple(v) for k, v in buckets.items()}

    return BruteForceResult(kernel, orthogonal, preimages)


def distribution_audit(
    h: HomomorphicHash,
    backend: str,
    draws: int,
    rng: np.random.Generator,
    *,
    significance: float = 0.001,
    bound: int = DEFAULT_ENUMERATION_BOUND,
    sample_fn: Callable[[np.random.Generator], GroupElement] | None = None,
) -> AuditVerdict:
    """Chi-square goodness of fit of the sampler against uniform support.

    The support is the brute-forced orthogonal set. Any draw outside it
    fails the audit outright. ``sample_fn`` replaces the real sampler
    (used by negative-control tests).
    """
    truth = kernel_bruteforce(h, bound=bound)
    support = sorted(truth.orthogonal_elements, key=lambda el: el.flat)
    if draws < 50 * len(support):
        raise ValueError(
            f"need at least 50 draws per support element: {draws} < {50 * len(support)}"
        )
    index = {el: i for i, el in enumerate(support)}
    counts = [0] * len(support)
    out_of_support = 0
    for _ in range(draws):
        if sample_fn is not None:
            el = sample_fn(rng)
        else:
            el = sample_orthogonal(h, backend, rng).orthogonal_sample
        slot = index.get(el)
        if slot is None:
            out_of_support += 1
        else:
            counts[slot] += 1

    if len(support) == 1:
        return AuditVerdict(
            passed=out_of_support == 0,
            draws=draws,
            support_size=1,
            out_of_support=out_of_support,
            p_value=None,
            counts=tuple(counts),
        )
    p_value = float(stats.chisquare(counts).pvalue) if out_of_support == 0 else 0.0
    return AuditVerdict(
        passed=out_of_support == 0 and p_value >= significance,
        draws=draws,
        support_size=len(support),
        out_of_support=out_of_support,
        p_value=p_value,
        counts=tuple(counts),
    )


def compare_backends(
    h: HomomorphicHash,
    draws_each: int,
    rng: np.random.Generator,
    *,
    significance: float = 0.001,
    bound: int = DEFAULT_ENUMERATION_BOUND,
) -> EquivalenceVerdict:
    """Two-sample chi-square test that both backends sample the same law."""
    truth = kernel_bruteforce(h, bound=bound)
    support = sorted(truth.orthogonal_elements, key=lambda el: el.flat)
    index = {el: i for i, el in enumerate(support)}
    table = np.zeros((2, len(support)), dtype=np.int64)
    for row, backend in enumerate((BACKEND_STATEVECTOR, BACKEND_COSET)):
        for _ in range(draws_each):
            el = sample_orthogonal(h, backend, rng).orthogonal_sample
            slot = index.get(el)
            if slot is None:
                return EquivalenceVerdict(False, draws_each, len(support), None)
            table[row, slot] += 1

    if len(support) == 1:
        return EquivalenceVerdict(True, draws_each, 1, None)
    keep = table.sum(axis=0) > 0
    p_value = float(stats.chi2_contingency(table[:, keep]).pvalue)
    return EquivalenceVerdict(p_value >= significance, draws_each, len(support), p_value)


def _orthogonal_flat(
    spec: GroupSpec, kernel_flat: np.ndarray, bound: int
) -> np.ndarray:
    """Flat indices of every g with chi_g(y) = 1 for all enumerated y.

    Exact integer arithmetic: chi_g(y) = 1 iff sum_j (L/N_j) g_j y_j is
    0 mod L. Each kernel element is applied as one vectorised constraint
    to the shrinking candidate set.
    """
    if spec.order > bound:
        raise ResourceLimitError(f"orthogonal enumeration refuses |G| > {bound}")
    L = spec.exponent
    scale = np.array([L // n for n in spec.orders], dtype=np.int64)
    residues = residue_matrix(spec, bound=bound)
    scaled = residues * scale  # (|G|, k), entries < L
    candidates = np.arange(spec.order, dtype=np.int64)
    for flat in kernel_flat:
        y = residues[int(flat)]
        phases = (scaled[candidates] @ y) % L
        candidates = candidates[phases == 0]
        if len(candidates) == 0:  # pragma: no cover - identity always orthogonal
            break
    return candidates

"""Kernel-recovery attack driver.

Repeatedly samples elements orthogonal to the hash kernel, stops once
the sampled span stagnates, solves the resulting constraint system for
the kernel, and forges verified second preimages from it.

The recovered basis is sound by construction once verified: a basis
element outside the true kernel cannot hash to the output identity, and
a basis that hashes entirely to the identity generates a subgroup that
both contains and is contained in the kernel solution set. If the hash
check fails after saturation (the sampler stalled on a proper subgroup
of the orthogonal group), sampling simply resumes.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import NoCollisionError, ParameterError
from .groups import (
    DEFAULT_ENUMERATION_BOUND,
    GroupElement,
    GroupSpec,
    SubgroupBasis,
    solve_kernel_from_orthogonal_samples,
    subgroup_enumerate,
    subgroup_measure,
)
from .hashes import HomomorphicHash, hash_eval
from .simulator import BACKEND_COSET, BACKENDS, SampleTrace, sample_orthogonal

STATUS_VERIFIED = "verified"
STATUS_TRIVIAL_KERNEL = "trivial_kernel"
STATUS_UNSATURATED = "unsaturated"
STATUS_VERIFICATION_FAILED = "verification_failed"


@dataclass(frozen=True)
class AttackConfig:
    backend: str = BACKEND_COSET
    seed: int = 0
    patience: int = 5
    max_samples: int = 200
    collision_limit: int = 8
    forge_count: int = 3
    early_exit: bool = False
    kfm_block_bits: int | None = None

    def __post_init__(self) -> None:
        if self.backend not in BACKENDS:
            raise ParameterError(f"backend must be one of {BACKENDS}")
        if self.patience < 1:
            raise ParameterError("patience must be >= 1")
        if self.max_samples < self.patience:
            raise ParameterError("max_samples must be >= patience")
        if self.collision_limit < 0 or self.forge_count < 0:
            raise ParameterError("collision_limit and forge_count must be >= 0")


@dataclass(frozen=True)
class ForgedPair:
    x: GroupElement
    x_prime: GroupElement
    hash_value: GroupElement


@dataclass(frozen=True)
class CollisionRecord:
    value: GroupElement
    valid_block: bool | None = None


@dataclass
class AttackReport:
    instance: HomomorphicHash
    config: AttackConfig
    kernel_basis: SubgroupBasis
    kernel_order: int
    samples_used: int
    sample_traces: tuple[SampleTrace, ...]
    forged_pairs: tuple[ForgedPair, ...] = ()
    collision_base: GroupElement | None = None
    collisions: tuple[CollisionRecord, ...] = ()
    status: str = STATUS_UNSATURATED
    verified: bool = False
    wall_time: float = 0.0


def saturation_check(
    samples: list[GroupElement], spec: GroupSpec, patience: int
) -> tuple[int, bool]:
    """Span measure of the samples, and whether it has stagnated.

    Saturated means the last ``patience`` samples left the measure of the
    generated subgroup unchanged.
    """
    measure = subgroup_measure(samples, spec)
    if len(samples) < patience:
        return measure, False
    return measure, measure == subgroup_measure(samples[: len(samples) - patience], spec)


def forge_second_preimage(
    x: GroupElement, kernel: SubgroupBasis, rng: np.random.Generator
) -> GroupElement:
    """x plus a uniformly drawn non-identity kernel element."""
    choices = _sorted_nonidentity(kernel)
    if not choices:
        raise NoCollisionError("kernel is trivial: the hash is injective here")
    return x + choices[int(rng.integers(len(choices)))]


def enumerate_collisions(
    x: GroupElement,
    kernel: SubgroupBasis,
    limit: int,
    *,
    block_bits: int | None = None,
) -> list[CollisionRecord]:
    """Up to ``limit`` distinct inputs colliding with x, in flat order.

    With ``block_bits`` set, each record notes whether every component of
    the colliding input stays below 2**block_bits (whether it still
    encodes a block of that many binary digits).
    """
    records = []
    for y in _sorted_nonidentity(kernel)[: max(limit, 0)]:
        candidate = x + y
        valid = None
        if block_bits is not None:
            valid = all(r < (1 << block_bits) for r in candidate.residues)
        records.append(CollisionRecord(candidate, valid))
    return records


def run_attack(h: HomomorphicHash, cfg: AttackConfig) -> AttackReport:
    """Full pipeline: sample, saturate, solve, verify, forge.

    Reports are reproducible: identical (instance, seed, config) produce
    identical reports. When the sample budget runs out first the report
    is flagged unverified with the best-effort kernel.
    """
    start = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    spec = h.input_group
    out_identity = h.output_group.identity()

    samples: list[GroupElement] = []
    traces: list[SampleTrace] = []
    kernel: SubgroupBasis | None = None
    confirmed = False
    checked_measure = -1

    while len(samples) < cfg.max_samples:
        trace = sample_orthogonal(h, cfg.backend, rng)
        samples.append(trace.orthogonal_sample)
        traces.append(trace)

        if cfg.early_exit:
            candidate = solve_kernel_from_orthogonal_samples(samples, spec)
            hits = [
                g
                for g in candidate.generators
                if hash_eval(h, g) == out_identity
            ]
            if hits:
                kernel = SubgroupBasis(spec, (hits[0],))
                confirmed = True
                break
            continue

        measure, saturated = saturation_check(samples, spec, cfg.patience)
        if not saturated or measure == checked_measure:
            continue
        checked_measure = measure
        candidate = solve_kernel_from_orthogonal_samples(samples, spec)
        if all(hash_eval(h, g) == out_identity for g in candidate.generators):
            kernel = candidate
            confirmed = True
            break
        # stalled on a proper subgroup of the orthogonal group: keep sampling

    if kernel is None:
        # sample budget exhausted before a verified saturation
        kernel = solve_kernel_from_orthogonal_samples(samples, spec)

    kernel_order = len(subgroup_enumerate(kernel, bound=DEFAULT_ENUMERATION_BOUND))
    report = AttackReport(
        instance=h,
        config=cfg,
        kernel_basis=kernel,
        kernel_order=kernel_order,
        samples_used=len(samples),
        sample_traces=tuple(traces),
    )

    if not confirmed:
        report.status = STATUS_UNSATURATED
    elif kernel_order == 1:
        report.status = STATUS_TRIVIAL_KERNEL
    else:
        pairs = []
        pairs_ok = True
        for _ in range(cfg.forge_count):
            x = spec.random_element(rng)
            x_prime = forge_second_preimage(x, kernel, rng)
            hx = hash_eval(h, x)
            pairs.append(ForgedPair(x, x_prime, hx))
            pairs_ok = pairs_ok and x != x_prime and hash_eval(h, x_prime) == hx
        report.forged_pairs = tuple(pairs)
        if pairs:
            base = pairs[0].x
            block_bits = cfg.kfm_block_bits
            if block_bits is None and h.family == "kfm_exponential":
                # largest width with 2^bits < q, the usable block size
                block_bits = (h.params.q - 1).bit_length() - 1
            report.collision_base = base
            report.collisions = tuple(
                enumerate_collisions(
                    base, kernel, cfg.collision_limit, block_bits=block_bits
                )
            )
        report.verified = pairs_ok
        report.status = STATUS_VERIFIED if pairs_ok else STATUS_VERIFICATION_FAILED

    report.wall_time = time.perf_counter() - start
    return report


def _sorted_nonidentity(kernel: SubgroupBasis) -> list[GroupElement]:
    elements = subgroup_enumerate(kernel, bound=DEFAULT_ENUMERATION_BOUND)
    return sorted(
        (el for el in elements if not el.is_identity), key=lambda el: el.flat
    )

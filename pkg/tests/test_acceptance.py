"""Release acceptance gates.

Each test enforces one criterion at its stated tolerance and prints a
PASS line with the measured figures. Run with ``pytest -v -s`` to see
the lines; the suite is fully seeded and deterministic.
"""

import time
from pathlib import Path

import numpy as np
import pytest

from qcollide.attack import AttackConfig, run_attack
from qcollide.groups import (
    GroupSpec,
    SubgroupBasis,
    character_eval,
    character_phase,
    character_sum,
    is_prime,
    orthogonal_subgroup,
    subgroup_enumerate,
)
from qcollide.hashes import (
    constant_zero_hash,
    gen_params,
    hash_add_outputs,
    hash_eval,
    kfm_hash,
    rsa_hash,
    xor_matrix_hash,
)
from qcollide.oracle import compare_backends, distribution_audit, kernel_bruteforce
from qcollide.serialize import (
    canonical_json,
    instance_payload,
    load_instance,
    report_payload,
)
from qcollide.simulator import (
    BACKEND_COSET,
    BACKEND_STATEVECTOR,
    StateVector,
    coset_superposition,
    qft_group,
)

DATA_DIR = Path(__file__).parent / "data"


def _report(name, detail):
    print(f"ACCEPTANCE PASS: {name} ({detail})")


# ---------------------------------------------------------------------------
# 1. homomorphism suite


def test_criterion_1_homomorphism_every_family():
    instances = [
        gen_params("xor_matrix", seed=11, m=10, n=5),
        gen_params("xor_crc", seed=3, m=12, n=5),
        gen_params("kfm", seed=5, p=103, q=17, m=3),
        rsa_hash(23, 19, 4),
        constant_zero_hash((2,) * 6),
    ]
    start = time.perf_counter()
    rng = np.random.default_rng(2026)
    for h in instances:
        for _ in range(1000):
            x = h.input_group.random_element(rng)
            y = h.input_group.random_element(rng)
            assert hash_eval(h, x + y) == hash_add_outputs(
                h, hash_eval(h, x), hash_eval(h, y)
            )
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0
    _report(
        "criterion 1: homomorphism suite",
        f"{len(instances)} families x 1000 pairs exact in {elapsed:.2f}s",
    )


# ---------------------------------------------------------------------------
# 2. character laws


CHARACTER_TEST_GROUPS = [
    GroupSpec((2,) * 3),
    GroupSpec((2,) * 8),
    GroupSpec((2,) * 12),
    GroupSpec((11,)),
    GroupSpec((11, 11)),
    GroupSpec((11, 11, 11)),
    GroupSpec((4, 6, 9)),
    GroupSpec((2, 3, 5, 7)),
    GroupSpec((5, 25)),
    GroupSpec((3,) * 7),
]


def test_criterion_2_character_laws():
    assert all(spec.order <= 1 << 12 for spec in CHARACTER_TEST_GROUPS)
    start = time.perf_counter()
    rng = np.random.default_rng(7)

    for _ in range(1000):
        spec = CHARACTER_TEST_GROUPS[int(rng.integers(len(CHARACTER_TEST_GROUPS)))]
        g = spec.random_element(rng)
        h1 = spec.random_element(rng)
        h2 = spec.random_element(rng)
        assert character_phase(g, h1 + h2) == (
            character_phase(g, h1) + character_phase(g, h2)
        ) % 1
        assert character_phase(g, h1) == character_phase(h1, g)

    checked = 0
    for spec in CHARACTER_TEST_GROUPS:
        for g in spec.elements():
            expected = complex(spec.order) if g.is_identity else 0j
            assert character_sum(spec, g) == expected
            checked += 1

    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    _report(
        "criterion 2: character laws",
        f"1000 trials + sum law over {checked} characters in {elapsed:.2f}s",
    )


# ---------------------------------------------------------------------------
# 3. transform theorem


def test_criterion_3_qft_subgroup_theorem():
    start = time.perf_counter()
    rng = np.random.default_rng(31)
    groups = [
        GroupSpec((2,) * 4),
        GroupSpec((2,) * 6),
        GroupSpec((2,) * 8),
        GroupSpec((2,) * 10),
        GroupSpec((11,)),
        GroupSpec((11, 11)),
        GroupSpec((11, 11, 11)),
    ]
    checked = 0
    for spec in groups:
        for _ in range(3):
            gens = tuple(spec.random_element(rng) for _ in range(2))
            basis = SubgroupBasis(spec, gens)
            subgroup = subgroup_enumerate(basis)
            orth_flats = sorted(
                e.flat for e in subgroup_enumerate(orthogonal_subgroup(basis))
            )
            scale = np.sqrt(len(subgroup) / spec.order)

            flats = np.array(sorted(e.flat for e in subgroup))
            out = qft_group(coset_superposition(spec, flats)).amplitudes
            assert np.max(np.abs(out[orth_flats] - scale)) < 1e-10
            off = np.delete(out, orth_flats)
            assert off.size == 0 or np.max(np.abs(off)) < 1e-10

            # coset variant: phases follow the character of the representative
            shift = spec.random_element(rng)
            coset = np.array(sorted((shift + h).flat for h in subgroup))
            out_c = qft_group(coset_superposition(spec, coset)).amplitudes
            for z in subgroup_enumerate(orthogonal_subgroup(basis)):
                expected = scale * character_eval(z, shift).value
                assert abs(out_c[z.flat] - expected) < 1e-10
            off_c = np.delete(out_c, orth_flats)
            assert off_c.size == 0 or np.max(np.abs(off_c)) < 1e-10
            checked += 1

    elapsed = time.perf_counter() - start
    assert checked >= 20
    assert elapsed < 30.0
    _report(
        "criterion 3: transform theorem",
        f"{checked} subgroups, on/off-support within 1e-10, in {elapsed:.2f}s",
    )


# ---------------------------------------------------------------------------
# 4. end-to-end attack correctness


def _kfm_parameter_pool():
    pool = []
    for p in range(5, 201):
        if not is_prime(p):
            continue
        for q in range(3, 32):
            if is_prime(q) and (p - 1) % q == 0:
                pool.append((p, q))
    return pool


def _assert_attack_exact(h, seed):
    report = run_attack(h, AttackConfig(seed=seed))
    truth = kernel_bruteforce(h)
    assert report.verified, f"attack on {h.family} seed={seed} not verified"
    assert subgroup_enumerate(report.kernel_basis) == truth.kernel_elements
    for pair in report.forged_pairs:
        assert pair.x != pair.x_prime
        assert hash_eval(h, pair.x) == hash_eval(h, pair.x_prime)
    return report


def test_criterion_4_end_to_end_attacks():
    start = time.perf_counter()
    rng = np.random.default_rng(20260810)

    for i in range(50):
        m = int(rng.integers(4, 13))
        n = int(rng.integers(2, min(8, m - 1) + 1))
        h = gen_params("xor_matrix", seed=1000 + i, m=m, n=n)
        _assert_attack_exact(h, seed=i)

    for i in range(20):
        m = int(rng.integers(5, 13))
        n = int(rng.integers(2, min(6, m - 1) + 1))
        h = gen_params("xor_crc", seed=2000 + i, m=m, n=n)
        _assert_attack_exact(h, seed=i)

    pool = _kfm_parameter_pool()
    for i in range(20):
        p, q = pool[int(rng.integers(len(pool)))]
        m = 2 if q ** 3 > (1 << 15) else int(rng.integers(2, 4))
        h = gen_params("kfm", seed=3000 + i, p=p, q=q, m=m)
        _assert_attack_exact(h, seed=i)

    rsa_cases = [(13, 11, 3), (23, 19, 2), (31, 13, 6), (43, 29, 7), (53, 41, 5)]
    for i, (p, q, e) in enumerate(rsa_cases):
        assert p * q <= 3000
        _assert_attack_exact(rsa_hash(p, q, e), seed=i)

    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    _report(
        "criterion 4: end-to-end attacks",
        f"50 xor_matrix + 20 xor_crc + 20 kfm + 5 rsa exact in {elapsed:.1f}s",
    )


# ---------------------------------------------------------------------------
# 5. sample efficiency


def test_criterion_5_sample_efficiency():
    h = gen_params("xor_matrix", seed=42, m=10, n=6)
    patience = 5
    used = []
    start = time.perf_counter()
    for seed in range(1000):
        report = run_attack(h, AttackConfig(seed=seed, patience=patience))
        assert report.verified
        used.append(report.samples_used)
    elapsed = time.perf_counter() - start
    mean_used = float(np.mean(used))
    assert mean_used <= 10 + patience + 2
    _report(
        "criterion 5: sample efficiency",
        f"mean samples {mean_used:.2f} <= {10 + patience + 2} over 1000 runs "
        f"({elapsed:.1f}s)",
    )


# ---------------------------------------------------------------------------
# 6. sampler uniformity and backend equivalence


def _uniformity_instances():
    return [
        gen_params("xor_matrix", seed=1, m=4, n=2),
        gen_params("xor_matrix", seed=2, m=5, n=2),
        gen_params("xor_matrix", seed=3, m=5, n=3),
        gen_params("xor_matrix", seed=4, m=6, n=2),
        gen_params("xor_matrix", seed=5, m=6, n=3),
        gen_params("xor_crc", seed=6, m=6, n=3),
        gen_params("xor_crc", seed=7, m=7, n=2),
        kfm_hash(23, 11, (4, 9)),
        rsa_hash(13, 11, 3),
        constant_zero_hash((2, 2, 2)),
    ]


def test_criterion_6_sampler_uniformity():
    start = time.perf_counter()
    instances = _uniformity_instances()
    assert len(instances) >= 10

    for backend_index, backend in enumerate((BACKEND_STATEVECTOR, BACKEND_COSET)):
        for i, h in enumerate(instances):
            support = len(kernel_bruteforce(h).orthogonal_elements)
            rng = np.random.default_rng(6000 + 100 * backend_index + i)
            verdict = distribution_audit(h, backend, 50 * support, rng)
            assert verdict.passed, f"{backend} audit failed on instance {i}"
            assert verdict.out_of_support == 0

    for i, h in enumerate(instances[:4]):
        support = len(kernel_bruteforce(h).orthogonal_elements)
        draws = max(300, 50 * support)
        verdict = compare_backends(h, draws, np.random.default_rng(6500 + i))
        assert verdict.passed, f"backend equivalence failed on instance {i}"

    elapsed = time.perf_counter() - start
    _report(
        "criterion 6: sampler uniformity",
        f"{len(instances)} instances x 2 backends + 4 equivalence tests "
        f"at significance 0.001 in {elapsed:.1f}s",
    )


# ---------------------------------------------------------------------------
# 7. determinism against a committed golden report


GOLDEN_CONFIG = AttackConfig(seed=3)


def test_criterion_7_golden_report_byte_for_byte():
    instance_path = DATA_DIR / "golden_instance.json"
    report_path = DATA_DIR / "golden_report.json"
    h = load_instance(instance_path)
    assert h == gen_params("xor_matrix", seed=7, m=8, n=4)

    regenerated = canonical_json(report_payload(run_attack(h, GOLDEN_CONFIG)))
    committed = report_path.read_text(encoding="utf-8")
    assert regenerated == committed

    # and a second in-process run is identical too
    again = canonical_json(report_payload(run_attack(h, GOLDEN_CONFIG)))
    assert again == regenerated
    _report(
        "criterion 7: determinism",
        f"report reproduces {report_path.name} byte-for-byte",
    )

"""Exact simulation of the two-register sampling pipeline.

Two interchangeable backends produce uniform draws from the subgroup
orthogonal to a hash kernel:

* ``statevector`` runs the full circuit literally: uniform superposition
  over the input group, reversible hash oracle into a second register,
  measurement of the hash register, Fourier transform of the input
  register, measurement.
* ``coset_sampler`` draws a random input, enumerates its hash preimage
  set classically (one coset of the kernel), builds that coset
  superposition directly and Fourier-samples it. The post-measurement
  state of the full circuit is exactly such a coset superposition, so
  the output distribution is identical while the memory footprint drops
  from |G_in|*|G_out| to |G_in|.

Amplitudes are complex128 throughout; flat indices follow the group
codec (last cyclic factor fastest).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import IO

import numpy as np

from .errors import ResourceLimitError
from .groups import DEFAULT_ENUMERATION_BOUND, GroupElement, GroupSpec
from .hashes import HomomorphicHash, hash_eval_all

# A full two-register statevector larger than this is refused.
DEFAULT_STATEVECTOR_BOUND = 1 << 20

BACKEND_STATEVECTOR = "statevector"
BACKEND_COSET = "coset_sampler"
BACKENDS = (BACKEND_STATEVECTOR, BACKEND_COSET)

# Double-precision budget for |G| <= 2^20 transforms.
AMPLITUDE_ATOL = 1e-10
NORM_ATOL = 1e-12


@dataclass
class StateVector:
    """Complex amplitudes over one or more group-valued registers."""

    registers: tuple[GroupSpec, ...]
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        expected = 1
        for reg in self.registers:
            expected *= reg.order
        if amps.shape != (expected,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, registers need ({expected},)"
            )
        self.amplitudes = amps

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def combined_spec(self) -> GroupSpec:
        orders: tuple[int, ...] = ()
        for reg in self.registers:
            orders += reg.orders
        return GroupSpec(orders)


@dataclass(frozen=True)
class SampleTrace:
    """One run of the pipeline: observed hash value and orthogonal draw."""

    measured_hash_value: GroupElement
    orthogonal_sample: GroupElement
    backend_tag: str


def uniform_superposition(
    spec: GroupSpec, *, bound: int = DEFAULT_STATEVECTOR_BOUND
) -> StateVector:
    """All |G| basis amplitudes equal to 1/sqrt(|G|)."""
    if spec.order > bound:
        raise ResourceLimitError(
            f"statevector over {spec} needs {spec.order} > {bound} amplitudes"
        )
    amps = np.full(spec.order, 1.0 / np.sqrt(spec.order), dtype=np.complex128)
    return StateVector((spec,), amps)


def apply_hash_oracle(
    state: StateVector,
    h: HomomorphicHash,
    *,
    bound: int = DEFAULT_STATEVECTOR_BOUND,
) -> StateVector:
    """Entangle a second register with the hash of the first.

    Sends sum_x a_x |x>|0> to sum_x a_x |x>|H(x)>: the amplitude of
    (x, y) equals the input amplitude of x when y = H(x) and 0 otherwise.
    """
    if state.registers != (h.input_group,):
        raise ValueError("oracle expects a single-register state over the input group")
    nin = h.input_group.order
    nout = h.output_group.order
    if nin * nout > bound:
        raise ResourceLimitError(
            f"two-register statevector needs {nin * nout} > {bound} amplitudes"
        )
    table = hash_eval_all(h)
    amps = np.zeros(nin * nout, dtype=np.complex128)
    amps[np.arange(nin, dtype=np.int64) * nout + table] = state.amplitudes
    return StateVector((h.input_group, h.output_group), amps)


def measure_register(
    state: StateVector, register: int, rng: np.random.Generator
) -> tuple[GroupElement, StateVector | None]:
    """Born-rule measurement of one register.

    Returns the observed group element and the renormalised state of the
    remaining registers (None when the measured register was the last).
    """
    if not 0 <= register < len(state.registers):
        raise ValueError(f"no register {register} in a {len(state.registers)}-register state")
    sizes = tuple(reg.order for reg in state.registers)
    tensor = state.amplitudes.reshape(sizes)
    other_axes = tuple(ax for ax in range(len(sizes)) if ax != register)
    probs = np.abs(tensor) ** 2
    if other_axes:
        probs = probs.sum(axis=other_axes)
    total = probs.sum()
    assert total > 0, "zero-norm state cannot be measured"
    outcome = int(rng.choice(sizes[register], p=probs / total))
    collapsed = np.take(tensor, outcome, axis=register)
    remaining = tuple(
        reg for ax, reg in enumerate(state.registers) if ax != register
    )
    element = state.registers[register].unflatten(outcome)
    if not remaining:
        return element, None
    branch_norm = np.linalg.norm(collapsed)
    assert branch_norm > 0, "measured branch has zero norm"
    return element, StateVector(remaining, (collapsed / branch_norm).reshape(-1))


def qft_group(state: StateVector) -> StateVector:
    """Fourier transform over the register's group, applied factor-wise.

    Maps amplitude a_g to (1/sqrt(|G|)) sum_g chi_h(g) a_g at index h,
    one cyclic-factor transform at a time (cost |G| * sum_j N_j). For
    all-Z_2 groups each factor transform is a Hadamard.
    """
    if len(state.registers) != 1:
        raise ValueError("qft_group acts on a single-register state")
    spec = state.registers[0]
    if not spec.orders:
        return StateVector(state.registers, state.amplitudes.copy())
    tensor = state.amplitudes.reshape(spec.orders)
    for axis, n in enumerate(spec.orders):
        tensor = np.moveaxis(tensor, axis, 0)
        if n <= 512:
            tensor = np.tensordot(_dft_matrix(n), tensor, axes=([1], [0]))
        else:
            # same positive-exponent transform via FFT for huge factors
            tensor = np.fft.ifft(tensor, axis=0) * np.sqrt(n)
        tensor = np.moveaxis(tensor, 0, axis)
    return StateVector(state.registers, tensor.reshape(-1))


def coset_superposition(spec: GroupSpec, flat_indices: np.ndarray) -> StateVector:
    """Uniform superposition over an explicit list of basis elements."""
    if len(flat_indices) == 0:
        raise ValueError("cannot build a superposition over an empty set")
    amps = np.zeros(spec.order, dtype=np.complex128)
    amps[np.asarray(flat_indices, dtype=np.int64)] = 1.0 / np.sqrt(len(flat_indices))
    return StateVector((spec,), amps)


def sample_orthogonal(
    h: HomomorphicHash,
    backend: str,
    rng: np.random.Generator,
    *,
    statevector_bound: int = DEFAULT_STATEVECTOR_BOUND,
    enumeration_bound: int = DEFAULT_ENUMERATION_BOUND,
    collect_states: list[tuple[str, StateVector]] | None = None,
) -> SampleTrace:
    """Draw one uniform element of the subgroup orthogonal to the kernel.

    ``collect_states`` (statevector backend only) receives the labelled
    intermediate states for debugging dumps.
    """
    if backend == BACKEND_STATEVECTOR:
        state = uniform_superposition(h.input_group, bound=statevector_bound)
        if collect_states is not None:
            collect_states.append(("uniform", state))
        state = apply_hash_oracle(state, h, bound=statevector_bound)
        if collect_states is not None:
            collect_states.append(("oracle", state))
        hash_value, state = measure_register(state, 1, rng)
        assert state is not None
        if collect_states is not None:
            collect_states.append(("collapsed", state))
        state = qft_group(state)
        if collect_states is not None:
            collect_states.append(("fourier", state))
        sample, _ = measure_register(state, 0, rng)
        return SampleTrace(hash_value, sample, BACKEND_STATEVECTOR)

    if backend == BACKEND_COSET:
        h.input_group.require_enumerable(enumeration_bound, "coset_sampler")
        table = hash_eval_all(h, enumeration_bound)
        x_flat = int(rng.integers(h.input_group.order))
        target = int(table[x_flat])
        coset = np.flatnonzero(table == target)
        state = qft_group(coset_superposition(h.input_group, coset))
        sample, _ = measure_register(state, 0, rng)
        return SampleTrace(h.output_group.unflatten(target), sample, BACKEND_COSET)

    raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")


def write_state_dump(state: StateVector, fp: IO[str], label: str | None = None) -> None:
    """Plain-text dump: one line per basis element (residues, real, imag)."""
    if label:
        fp.write(f"# {label}\n")
    spec = state.combined_spec()
    for i, amp in enumerate(state.amplitudes):
        el = spec.unflatten(i)
        residues = ",".join(str(r) for r in el.residues)
        fp.write(f"{residues}\t{float(amp.real)!r}\t{float(amp.imag)!r}\n")


def allclose_up_to_global_phase(
    a: np.ndarray, b: np.ndarray, atol: float = AMPLITUDE_ATOL
) -> bool:
    """Whether two amplitude vectors differ only by a unit phase factor."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        return False
    ref = int(np.argmax(np.abs(b)))
    if abs(b[ref]) < atol:
        return bool(np.allclose(a, 0, atol=atol))
    phase = a[ref] / b[ref]
    if abs(abs(phase) - 1) > atol:
        return False
    return bool(np.allclose(a, phase * b, atol=atol))


@lru_cache(maxsize=None)
def _dft_matrix(n: int) -> np.ndarray:
    """Unitary positive-exponent DFT matrix F[h, g] = w^{hg}/sqrt(n)."""
    idx = np.arange(n)
    # reduce h*g mod n before the complex exponential to keep arguments small
    phases = np.outer(idx, idx) % n
    mat = np.exp(2j * np.pi * phases / n) / np.sqrt(n)
    mat.flags.writeable = False
    return mat

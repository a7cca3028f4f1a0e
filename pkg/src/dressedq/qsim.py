"""Dense statevector simulator for the H / RY / CNOT gate set.

Conventions:
- Wire 0 is the most significant bit of the basis-state index, so for
  q=3 the basis state |100> (wire 0 set) lives at index 4.
- Amplitudes are complex128. Gates update the amplitude array in place
  via axis views; no full 2^q x 2^q matrix is ever built here (the dense
  Kronecker oracle lives in the test suite only).
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ConfigurationError

# 2^24 amplitudes is 256 MiB of complex doubles; anything above that is
# rejected rather than allowed to thrash the machine.
MAX_QUBITS = 24

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class StateVector:
    """A register of `num_qubits` qubits as 2^q complex amplitudes."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, num_qubits: int, amplitudes: np.ndarray):
        self.num_qubits = num_qubits
        self.amplitudes = amplitudes

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())


def new_zero_state(num_qubits: int) -> StateVector:
    """All-zeros computational basis state |0...0>."""
    if not (1 <= num_qubits <= MAX_QUBITS):
        raise ConfigurationError(
            f"qubit count {num_qubits} outside supported range 1..{MAX_QUBITS}"
        )
    amps = np.zeros(2**num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def _check_wire(state: StateVector, wire: int) -> None:
    if not (0 <= wire < state.num_qubits):
        raise IndexError(f"wire {wire} out of range for {state.num_qubits} qubits")


def _split(state: StateVector, wire: int) -> np.ndarray:
    """Contiguous (2^wire, 2, rest) view; axis 1 is the wire's bit."""
    return state.amplitudes.reshape(1 << wire, 2, -1)


def _apply_single(state: StateVector, wire: int, gate: np.ndarray) -> None:
    # One fused 2x2 matmul over the paired amplitude strides; the result
    # buffer replaces the old one instead of being copied back.
    out = np.matmul(gate, _split(state, wire))
    state.amplitudes = out.reshape(-1)


def apply_h(state: StateVector, wire: int) -> StateVector:
    """Hadamard on one wire."""
    _check_wire(state, wire)
    gate = np.array(
        [[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]], dtype=np.complex128
    )
    _apply_single(state, wire, gate)
    return state


def apply_ry(state: StateVector, wire: int, theta: float) -> StateVector:
    """Y-axis rotation [[cos t/2, -sin t/2], [sin t/2, cos t/2]]."""
    _check_wire(state, wire)
    if not math.isfinite(theta):
        raise ValueError(f"non-finite rotation angle: {theta!r}")
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    _apply_single(state, wire, np.array([[c, -s], [s, c]], dtype=np.complex128))
    return state


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    """Flip the target bit on basis states whose control bit is 1, in place."""
    _check_wire(state, control)
    _check_wire(state, target)
    if control == target:
        raise IndexError(f"control and target coincide (wire {control})")
    lo, hi = sorted((control, target))
    # Nested split over both wires: axes 1 and 3 carry the two bits.
    view = state.amplitudes.reshape(1 << lo, 2, 1 << (hi - lo - 1), 2, -1)
    if control < target:
        x, y = view[:, 1, :, 0, :], view[:, 1, :, 1, :]
    else:
        x, y = view[:, 0, :, 1, :], view[:, 1, :, 1, :]
    tmp = x.copy()
    x[...] = y
    y[...] = tmp
    return state


def expect_z(state: StateVector, wire: int) -> float:
    """Pauli-Z expectation on one wire: sum |amp|^2 * (+1/-1) by bit value."""
    _check_wire(state, wire)
    x1 = _split(state, wire)[:, 1, :]
    p1 = float(np.sum(x1.real**2 + x1.imag**2))
    return min(1.0, max(-1.0, 1.0 - 2.0 * p1))


def expect_z_all(state: StateVector) -> np.ndarray:
    """Pauli-Z expectation on every wire; probabilities computed once."""
    q = state.num_qubits
    amps = state.amplitudes
    probs = amps.real**2 + amps.imag**2
    out = np.empty(q)
    for wire in range(q):
        p1 = probs.reshape(1 << wire, 2, -1)[:, 1, :].sum()
        out[wire] = 1.0 - 2.0 * p1
    return np.clip(out, -1.0, 1.0)

"""Variational circuit layer: layout, forward pass, parameter-shift gradients.

Circuit layout (fixed):
    H on every wire
    RY(embed_angles[i]) on wire i
    repeat depth times:
        CNOT(i -> i+1) for even i, then for odd i
        RY(thetas[layer][i]) on wire i
    measure <Z> on every wire

Gradients use the exact parameter-shift rule for RY generators:
d(out)/d(angle) = [f(angle + pi/2) - f(angle - pi/2)] / 2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qsim
from .errors import ConfigurationError

MAX_DEPTH = 64

# Running count of quantum_forward invocations in this process. Used to
# validate circuit-evaluation arithmetic against a real training epoch.
_forward_evals = 0


def forward_eval_count() -> int:
    """Total quantum_forward calls since process start (monotone counter)."""
    return _forward_evals


@dataclass(frozen=True)
class CircuitSpec:
    """Circuit topology: qubit count and number of entangling layers."""

    qubits: int = 4
    depth: int = 6

    def __post_init__(self):
        if not (1 <= self.qubits <= qsim.MAX_QUBITS):
            raise ConfigurationError(
                f"qubits={self.qubits} outside 1..{qsim.MAX_QUBITS}"
            )
        if not (0 <= self.depth <= MAX_DEPTH):
            raise ConfigurationError(f"depth={self.depth} outside 0..{MAX_DEPTH}")


@dataclass
class QuantumParams:
    """Trainable rotation angles, one per (layer, wire)."""

    thetas: np.ndarray  # shape (depth, qubits)

    def copy(self) -> "QuantumParams":
        return QuantumParams(self.thetas.copy())


def _check_args(spec: CircuitSpec, params: QuantumParams, embed_angles: np.ndarray):
    if params.thetas.shape != (spec.depth, spec.qubits):
        raise ConfigurationError(
            f"thetas shape {params.thetas.shape} != ({spec.depth}, {spec.qubits})"
        )
    if embed_angles.shape != (spec.qubits,):
        raise ConfigurationError(
            f"embed_angles shape {embed_angles.shape} != ({spec.qubits},)"
        )
    if not (np.all(np.isfinite(params.thetas)) and np.all(np.isfinite(embed_angles))):
        raise ValueError("non-finite circuit angle")


def quantum_forward(
    spec: CircuitSpec, params: QuantumParams, embed_angles: np.ndarray
) -> np.ndarray:
    """Run the circuit once; returns the q per-wire Z expectations."""
    global _forward_evals
    embed_angles = np.asarray(embed_angles, dtype=float)
    _check_args(spec, params, embed_angles)
    _forward_evals += 1

    q = spec.qubits
    state = qsim.new_zero_state(q)
    for i in range(q):
        qsim.apply_h(state, i)
    for i in range(q):
        qsim.apply_ry(state, i, embed_angles[i])
    for layer in range(spec.depth):
        for i in range(0, q - 1, 2):
            qsim.apply_cnot(state, i, i + 1)
        for i in range(1, q - 1, 2):
            qsim.apply_cnot(state, i, i + 1)
        for i in range(q):
            qsim.apply_ry(state, i, params.thetas[layer, i])
    return qsim.expect_z_all(state)


def param_shift_grad(
    spec: CircuitSpec, params: QuantumParams, embed_angles: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact Jacobians of every output w.r.t. every angle.

    Returns (jac_thetas, jac_embed, value) where
      jac_thetas[o, l, i] = d out[o] / d thetas[l, i]   shape (q, depth, q)
      jac_embed[o, j]     = d out[o] / d embed[j]       shape (q, q)
      value               = quantum_forward at the unshifted point.
    Costs 1 + 2*(depth*q + q) circuit evaluations.
    """
    embed_angles = np.asarray(embed_angles, dtype=float)
    _check_args(spec, params, embed_angles)
    q, d = spec.qubits, spec.depth
    half_pi = np.pi / 2.0

    value = quantum_forward(spec, params, embed_angles)

    jac_thetas = np.empty((q, d, q))
    shifted = params.copy()
    for layer in range(d):
        for i in range(q):
            orig = shifted.thetas[layer, i]
            shifted.thetas[layer, i] = orig + half_pi
            plus = quantum_forward(spec, shifted, embed_angles)
            shifted.thetas[layer, i] = orig - half_pi
            minus = quantum_forward(spec, shifted, embed_angles)
            shifted.thetas[layer, i] = orig
            jac_thetas[:, layer, i] = (plus - minus) / 2.0

    jac_embed = np.empty((q, q))
    shifted_embed = embed_angles.copy()
    for j in range(q):
        orig = shifted_embed[j]
        shifted_embed[j] = orig + half_pi
        plus = quantum_forward(spec, params, shifted_embed)
        shifted_embed[j] = orig - half_pi
        minus = quantum_forward(spec, params, shifted_embed)
        shifted_embed[j] = orig
        jac_embed[:, j] = (plus - minus) / 2.0

    return jac_thetas, jac_embed, value


def circuit_evals_per_sample(spec: CircuitSpec) -> int:
    """Circuit runs needed for one sample's value-plus-gradient pass."""
    trainable = spec.depth * spec.qubits
    return 1 + 2 * (trainable + spec.qubits)

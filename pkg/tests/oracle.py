"""Dense-matrix oracles used only by the tests.

Builds full 2^q x 2^q unitaries by Kronecker products under the same
convention as the production simulator (wire 0 = most significant bit)
and applies them by plain matrix-vector multiplication.
"""
import numpy as np

I2 = np.eye(2, dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def ry_matrix(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def single_qubit_unitary(u, wire, num_qubits):
    """Kron chain with `u` at position `wire`; wire 0 is the leftmost factor."""
    out = np.array([[1.0 + 0j]])
    for w in range(num_qubits):
        out = np.kron(out, u if w == wire else I2)
    return out


def bit(index, wire, num_qubits):
    """Value of `wire`'s bit in basis-state `index` (wire 0 = MSB)."""
    return (index >> (num_qubits - 1 - wire)) & 1


def cnot_unitary(control, target, num_qubits):
    dim = 2**num_qubits
    mat = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        row = col
        if bit(col, control, num_qubits):
            row = col ^ (1 << (num_qubits - 1 - target))
        mat[row, col] = 1.0
    return mat


def gate_unitary(gate, num_qubits):
    """gate: ("h", wire) | ("ry", wire, theta) | ("cnot", control, target)."""
    kind = gate[0]
    if kind == "h":
        return single_qubit_unitary(H, gate[1], num_qubits)
    if kind == "ry":
        return single_qubit_unitary(ry_matrix(gate[2]), gate[1], num_qubits)
    if kind == "cnot":
        return cnot_unitary(gate[1], gate[2], num_qubits)
    raise ValueError(gate)


def run_circuit_dense(gates, num_qubits):
    """Apply a gate list to |0...0> with full dense unitaries."""
    state = np.zeros(2**num_qubits, dtype=complex)
    state[0] = 1.0
    for gate in gates:
        state = gate_unitary(gate, num_qubits) @ state
    return state


def expect_z_dense(state, wire, num_qubits):
    signs = np.array(
        [1.0 if bit(b, wire, num_qubits) == 0 else -1.0 for b in range(len(state))]
    )
    return float(np.sum(np.abs(state) ** 2 * signs))


def random_gates(rng, num_qubits, length):
    gates = []
    for _ in range(length):
        kind = rng.choice(["h", "ry", "cnot"] if num_qubits > 1 else ["h", "ry"])
        if kind == "h":
            gates.append(("h", int(rng.integers(num_qubits))))
        elif kind == "ry":
            gates.append(
                ("ry", int(rng.integers(num_qubits)), float(rng.uniform(-np.pi, np.pi)))
            )
        else:
            c, t = rng.choice(num_qubits, size=2, replace=False)
            gates.append(("cnot", int(c), int(t)))
    return gates


def apply_gates_sim(state, gates):
    """Replay an oracle gate list on the production simulator."""
    from dressedq import apply_cnot, apply_h, apply_ry

    for gate in gates:
        if gate[0] == "h":
            apply_h(state, gate[1])
        elif gate[0] == "ry":
            apply_ry(state, gate[1], gate[2])
        else:
            apply_cnot(state, gate[1], gate[2])
    return state

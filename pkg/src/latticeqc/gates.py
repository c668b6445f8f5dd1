"""State vectors, gate matrices, Hadamard gates and Deutsch-Jozsa oracles.

States and gates are plain complex numpy arrays. :func:`matvec_oracle` is the
direct linear-algebra product every optical result is checked against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from latticeqc.errors import DimensionError, FunctionClassError

NORM_TOL = 1e-12
UNITARY_TOL = 1e-10


def as_state(u, normalized: bool = False) -> np.ndarray:
    """Coerce ``u`` to a 1D complex vector, optionally checking unit norm."""
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 1 or u.size == 0:
        raise DimensionError(f"state vector must be 1D and non-empty, got shape {u.shape}")
    if normalized and abs(np.linalg.norm(u) - 1) > NORM_TOL:
        raise ValueError(f"state vector is not normalized (norm={np.linalg.norm(u):.15g})")
    return u


def as_gate(m, unitary: bool = False) -> np.ndarray:
    """Coerce ``m`` to a square complex matrix, optionally checking unitarity."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.size == 0:
        raise DimensionError(f"gate matrix must be square, got shape {m.shape}")
    if unitary and not is_unitary(m):
        raise ValueError("gate matrix is not unitary")
    return m


def normalize(u) -> np.ndarray:
    u = as_state(u)
    norm = np.linalg.norm(u)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    return u / norm


def is_unitary(m, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))) < tol)


def basis_state(n: int, k: int) -> np.ndarray:
    """Logical basis vector e_k of length ``n``."""
    if not 0 <= k < n:
        raise IndexError(f"basis index {k} out of range for N={n}")
    e = np.zeros(n, dtype=np.complex128)
    e[k] = 1
    return e


def matvec_oracle(m, u) -> np.ndarray:
    """Return ``v`` with ``v[j] = sum_k m[j, k] * u[k]``."""
    m = as_gate(m)
    u = as_state(u)
    if m.shape[1] != u.size:
        raise DimensionError(f"matrix is {m.shape[0]}x{m.shape[1]} but vector has length {u.size}")
    return m @ u


def _check_qubits(n_qubits: int) -> int:
    if int(n_qubits) != n_qubits or n_qubits < 1:
        raise ValueError(f"n_qubits must be an integer >= 1, got {n_qubits}")
    return 2 ** int(n_qubits)


def qubits_for(n: int) -> int:
    """Number of qubits spanning dimension ``n``; ``n`` must be a power of two."""
    if n < 2 or n & (n - 1):
        raise DimensionError(f"dimension {n} is not a power of two >= 2")
    return n.bit_length() - 1


def hadamard_matrix(n_qubits: int) -> np.ndarray:
    """N-dimensional Hadamard gate, N = 2**n_qubits.

    Entry ``[m, k]`` is ``(-1)**popcount(m & k) / sqrt(N)``. The least
    significant bit of an index belongs to the last tensor factor, so the
    result equals ``np.kron`` applied n times to the 2x2 gate.
    """
    n = _check_qubits(n_qubits)
    idx = np.arange(n)
    dots = np.bitwise_and.outer(idx, idx)
    parity = np.array([bin(d).count("1") & 1 for d in dots.ravel()]).reshape(n, n)
    return (1 - 2 * parity).astype(np.complex128) / math.sqrt(n)


def hadamard_basis_state(n_qubits: int, k: int) -> np.ndarray:
    """Hadamard basis state |u_k> = H_N |v_k>, i.e. column ``k`` of H_N."""
    n = _check_qubits(n_qubits)
    if not 0 <= k < n:
        raise IndexError(f"basis index {k} out of range for N={n}")
    return hadamard_matrix(n_qubits)[:, k].copy()


@dataclass(frozen=True)
class BooleanFunction:
    """Truth table ``F(k)`` for k = 0..N-1."""

    table: tuple[int, ...]

    def __post_init__(self):
        table = tuple(int(b) for b in self.table)
        if not table:
            raise ValueError("truth table is empty")
        if any(b not in (0, 1) for b in table):
            raise ValueError("truth table entries must be 0 or 1")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_bits(cls, bits: str) -> "BooleanFunction":
        """Parse a bit string; character ``k`` is ``F(k)``."""
        bits = bits.strip()
        if not bits or set(bits) - {"0", "1"}:
            raise ValueError(f"not a bit string: {bits!r}")
        return cls(tuple(int(c) for c in bits))

    @classmethod
    def constant(cls, n: int, value: int) -> "BooleanFunction":
        return cls((value,) * n)

    @classmethod
    def random_balanced(cls, n: int, rng: np.random.Generator) -> "BooleanFunction":
        if n % 2:
            raise ValueError("balanced functions need an even domain size")
        ones = rng.choice(n, size=n // 2, replace=False)
        table = np.zeros(n, dtype=int)
        table[ones] = 1
        return cls(tuple(table))

    @property
    def n(self) -> int:
        return len(self.table)

    @property
    def kind(self) -> str:
        """``'constant'``, ``'balanced'`` or ``'neither'``."""
        ones = sum(self.table)
        if ones in (0, self.n):
            return "constant"
        if self.n % 2 == 0 and ones == self.n // 2:
            return "balanced"
        return "neither"

    def flipped(self) -> "BooleanFunction":
        return BooleanFunction(tuple(1 - b for b in self.table))

    def bits(self) -> str:
        return "".join(str(b) for b in self.table)


def all_constant(n: int) -> list[BooleanFunction]:
    return [BooleanFunction.constant(n, 0), BooleanFunction.constant(n, 1)]


def all_balanced(n: int) -> list[BooleanFunction]:
    """Every balanced truth table of size ``n``, in lexicographic order of the ones."""
    out = []
    for ones in itertools.combinations(range(n), n // 2):
        table = [0] * n
        for i in ones:
            table[i] = 1
        out.append(BooleanFunction(tuple(table)))
    return out


def oracle_matrix(f: BooleanFunction) -> np.ndarray:
    """Diagonal phase oracle with entries (-1)**F(k)."""
    return np.diag([(-1.0) ** b for b in f.table]).astype(np.complex128)


def column_mask(diagonal) -> np.ndarray:
    """Broadcast x-register weights down every row: ``mask[j, k] = diagonal[k]``.

    This is the lattice form of an operator acting on x alone (identity on y).
    """
    d = as_state(diagonal)
    return np.tile(d, (d.size, 1))


def dj_matrix(f: BooleanFunction) -> np.ndarray:
    """Compound H_N U_F applied on a single modulation plane."""
    n_qubits = qubits_for(f.n)
    return hadamard_matrix(n_qubits) @ oracle_matrix(f)


def dj_expected_output(f: BooleanFunction, n_qubits: int) -> np.ndarray:
    """Output state H_N U_F |u_0> computed with :func:`matvec_oracle`."""
    n = _check_qubits(n_qubits)
    if f.n != n:
        raise DimensionError(f"truth table has {f.n} entries, expected {n}")
    if f.kind == "neither":
        raise FunctionClassError(f"function {f.bits()} is neither constant nor balanced")
    u0 = hadamard_basis_state(n_qubits, 0)
    return matvec_oracle(hadamard_matrix(n_qubits), matvec_oracle(oracle_matrix(f), u0))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    return normalize(rng.standard_normal(n) + 1j * rng.standard_normal(n))

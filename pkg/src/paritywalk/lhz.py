"""LHZ parity layout: coupling/data qubits, plaquette constraints, encoding, syndromes.

Physical qubit ordering: coupling qubits first, in lexicographic (i, j) order of
the logical pairs they represent, then one data qubit per logical site. In a
length-K bitstring (and in a basis integer, big-endian) physical qubit ``q``
occupies string position ``q``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapabilityError, InvalidArgumentError
from .ising import IsingInstance, SpinConfig

MIN_N = 3
MAX_N = 7


@dataclass(frozen=True)
class Plaquette:
    kind: str  # "internal" or "data-triangle"
    qubits: tuple[int, ...]


@dataclass(frozen=True)
class PhysicalState:
    bits: str

    @property
    def K(self) -> int:
        return len(self.bits)

    @property
    def index(self) -> int:
        return int(self.bits, 2)

    @classmethod
    def from_index(cls, index: int, K: int) -> "PhysicalState":
        return cls(format(index, f"0{K}b"))


@dataclass(frozen=True)
class Syndrome:
    violations: tuple[int, ...]

    @property
    def is_zero(self) -> bool:
        return not any(self.violations)


@dataclass(frozen=True)
class LhzLayout:
    n: int
    coupling_pairs: tuple[tuple[int, int], ...]
    data_qubits: tuple[int, ...]
    plaquettes: tuple[Plaquette, ...]
    logical_lines: tuple[tuple[int, ...], ...]

    @property
    def n_coupling(self) -> int:
        return len(self.coupling_pairs)

    @property
    def K(self) -> int:
        return self.n_coupling + self.n

    @property
    def n_plaquettes(self) -> int:
        return len(self.plaquettes)

    def pair_index(self, i: int, j: int) -> int:
        """Physical index of the coupling qubit for logical pair (i, j)."""
        if i > j:
            i, j = j, i
        return self._pair_lookup[(i, j)]

    @property
    def _pair_lookup(self):
        lookup = getattr(self, "_pair_lookup_cache", None)
        if lookup is None:
            lookup = {pair: q for q, pair in enumerate(self.coupling_pairs)}
            object.__setattr__(self, "_pair_lookup_cache", lookup)
        return lookup

    def bit_position(self, q: int) -> int:
        """Bit of the basis integer holding physical qubit q (big-endian)."""
        return self.K - 1 - q

    def qubit_mask(self, q: int) -> int:
        return 1 << self.bit_position(q)

    def plaquette_masks(self) -> np.ndarray:
        masks = np.zeros(self.n_plaquettes, dtype=np.int64)
        for v, plq in enumerate(self.plaquettes):
            for q in plq.qubits:
                masks[v] |= self.qubit_mask(q)
        return masks


@lru_cache(maxsize=None)
def build_layout(n: int) -> LhzLayout:
    """Deterministic LHZ triangle for n logical qubits.

    Internal plaquettes are enumerated row-by-row of the triangle (by the pair
    distance d = j - i of the anchor, bottom row first) and are the closed
    loops {(i,j), (i,j+1), (i+1,j+1)} plus (i+1,j) when i+1 < j. Data triangles
    follow, left to right: {data_i, data_{i+1}, coupling_(i,i+1)}.
    """
    if not MIN_N <= n <= MAX_N:
        raise CapabilityError(f"layouts are built for {MIN_N} <= n <= {MAX_N}, got n={n}")
    pairs = tuple((i, j) for i in range(n) for j in range(i + 1, n))
    pair_index = {pair: q for q, pair in enumerate(pairs)}
    n_coupling = len(pairs)
    data = tuple(n_coupling + i for i in range(n))

    plaquettes: list[Plaquette] = []
    for d in range(1, n - 1):
        for i in range(0, n - 1 - d):
            j = i + d
            loop = [pair_index[(i, j)], pair_index[(i, j + 1)], pair_index[(i + 1, j + 1)]]
            if i + 1 < j:
                loop.append(pair_index[(i + 1, j)])
            plaquettes.append(Plaquette(kind="internal", qubits=tuple(sorted(loop))))
    for i in range(n - 1):
        tri = (data[i], data[i + 1], pair_index[(i, i + 1)])
        plaquettes.append(Plaquette(kind="data-triangle", qubits=tuple(sorted(tri))))

    lines = tuple(
        tuple(q for q, (a, b) in enumerate(pairs) if i in (a, b)) for i in range(n)
    )
    return LhzLayout(
        n=n,
        coupling_pairs=pairs,
        data_qubits=data,
        plaquettes=tuple(plaquettes),
        logical_lines=lines,
    )


def encode(logical: SpinConfig, layout: LhzLayout) -> PhysicalState:
    """Parity-encode a logical configuration (coupling bit = b_i XOR b_j)."""
    if logical.n != layout.n:
        raise InvalidArgumentError(
            f"logical length {logical.n} does not match layout n={layout.n}"
        )
    b = logical.bits
    coupling = "".join(str(int(b[i]) ^ int(b[j])) for i, j in layout.coupling_pairs)
    return PhysicalState(coupling + b)


def encode_indices(layout: LhzLayout) -> np.ndarray:
    """Physical basis index of encode(l) for every logical index l."""
    n = layout.n
    lidx = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n, dtype=np.int64)
    for q, (i, j) in enumerate(layout.coupling_pairs):
        bit = ((lidx >> (n - 1 - i)) ^ (lidx >> (n - 1 - j))) & 1
        out |= bit << layout.bit_position(q)
    for i, q in enumerate(layout.data_qubits):
        bit = (lidx >> (n - 1 - i)) & 1
        out |= bit << layout.bit_position(q)
    return out


def _parity_of_masked(z: np.ndarray, mask: int) -> np.ndarray:
    v = z & mask
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> shift
    return v & 1


def syndrome_indices(layout: LhzLayout) -> np.ndarray:
    """Syndrome of every physical basis state, packed into integers.

    Plaquette v maps to bit (P-1-v) so that, like basis states, the integer
    reads big-endian in the violation vector.
    """
    P = layout.n_plaquettes
    z = np.arange(1 << layout.K, dtype=np.int64)
    out = np.zeros(1 << layout.K, dtype=np.int64)
    for v, mask in enumerate(layout.plaquette_masks()):
        out |= _parity_of_masked(z, int(mask)) << (P - 1 - v)
    return out


def syndrome_of_index(z: int, layout: LhzLayout) -> int:
    out = 0
    P = layout.n_plaquettes
    for v, mask in enumerate(layout.plaquette_masks()):
        out |= (bin(z & int(mask)).count("1") & 1) << (P - 1 - v)
    return out


def syndrome(state: PhysicalState, layout: LhzLayout) -> Syndrome:
    if state.K != layout.K:
        raise InvalidArgumentError(f"state length {state.K} does not match K={layout.K}")
    bits = [int(c) for c in state.bits]
    return Syndrome(
        violations=tuple(sum(bits[q] for q in plq.qubits) & 1 for plq in layout.plaquettes)
    )


def physical_diagonal(instance: IsingInstance, layout: LhzLayout, C: float) -> np.ndarray:
    """Diagonal of the physical Hamiltonian over all 2^K basis states.

    E(z) = -sum_(i,j) J_ij sigma(z, ij) - sum_i h_i sigma(z, data_i)
           - C sum_v prod_{q in v} sigma(z, q), with sigma = 1 - 2*bit.
    A violated plaquette contributes +C, a satisfied one -C.
    """
    if instance.n != layout.n:
        raise InvalidArgumentError(
            f"instance n={instance.n} does not match layout n={layout.n}"
        )
    if C < 0:
        raise InvalidArgumentError(f"constraint strength must be >= 0, got {C}")
    dim = 1 << layout.K
    z = np.arange(dim, dtype=np.int64)
    E = np.zeros(dim)
    for q, (i, j) in enumerate(layout.coupling_pairs):
        sigma = 1.0 - 2.0 * ((z >> layout.bit_position(q)) & 1)
        E -= instance.couplings[i, j] * sigma
    for i, q in enumerate(layout.data_qubits):
        sigma = 1.0 - 2.0 * ((z >> layout.bit_position(q)) & 1)
        E -= instance.fields[i] * sigma
    if C != 0.0:
        for mask in layout.plaquette_masks():
            E -= C * (1.0 - 2.0 * _parity_of_masked(z, int(mask)))
    return E


def layout_to_json(layout: LhzLayout) -> str:
    doc = {
        "n": layout.n,
        "K": layout.K,
        "couplings": [list(p) for p in layout.coupling_pairs],
        "plaquettes": [
            {"kind": plq.kind, "qubits": list(plq.qubits)} for plq in layout.plaquettes
        ],
    }
    return json.dumps(doc, indent=2)

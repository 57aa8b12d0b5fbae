"""Sherrington-Kirkpatrick Ising instances: generation, energies, exact ground states.

Conventions used throughout the package:

* a length-``n`` bitstring maps to spins via ``s = 1 - 2*b`` (bit 0 is spin +1);
* basis-state integers are big-endian in the bitstring, i.e. qubit ``i`` is bit
  ``n-1-i`` of the index, so ``index = int(bits, 2)`` and integer order equals
  lexicographic bitstring order.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import CapabilityError, InvalidArgumentError, ParseError

GROUND_STATE_MAX_N = 24
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class SpinConfig:
    """A classical spin configuration stored as a bitstring."""

    bits: str

    def __post_init__(self):
        if not self.bits or any(c not in "01" for c in self.bits):
            raise InvalidArgumentError(f"bits must be a nonempty 0/1 string, got {self.bits!r}")

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def index(self) -> int:
        return int(self.bits, 2)

    @classmethod
    def from_index(cls, index: int, n: int) -> "SpinConfig":
        return cls(format(index, f"0{n}b"))

    def spins(self) -> np.ndarray:
        b = np.frombuffer(self.bits.encode(), dtype=np.uint8) - ord("0")
        return 1.0 - 2.0 * b.astype(np.float64)

    def flipped(self) -> "SpinConfig":
        return SpinConfig("".join("1" if c == "0" else "0" for c in self.bits))


@dataclass(frozen=True)
class GroundState:
    config: SpinConfig
    energy: float
    degenerate: bool = False


@dataclass(frozen=True)
class IsingInstance:
    """A logical SK instance with couplings J, local fields h and a generation seed."""

    n: int
    couplings: np.ndarray
    fields: np.ndarray
    uid: str
    seed: int
    ground_state: GroundState | None = None

    def __post_init__(self):
        J = np.asarray(self.couplings, dtype=np.float64)
        h = np.asarray(self.fields, dtype=np.float64)
        if self.n < 2:
            raise InvalidArgumentError(f"instance needs n >= 2, got n={self.n}")
        if J.shape != (self.n, self.n):
            raise InvalidArgumentError(f"couplings must be {self.n}x{self.n}, got {J.shape}")
        if h.shape != (self.n,):
            raise InvalidArgumentError(f"fields must have length {self.n}, got {h.shape}")
        if np.any(np.diag(J) != 0.0):
            raise InvalidArgumentError("couplings must have a zero diagonal")
        if not np.array_equal(J, J.T):
            raise InvalidArgumentError("couplings must be symmetric")
        J.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "couplings", J)
        object.__setattr__(self, "fields", h)

    def with_ground_state(self) -> "IsingInstance":
        """Return a copy with the exact ground state cached."""
        if self.ground_state is not None:
            return self
        return replace(self, ground_state=ground_state(self))


def _derive_uid(n: int, seed: int) -> str:
    digest = hashlib.sha256(f"sk:{n}:{seed}".encode()).digest()
    return "".join(chr(ord("a") + b % 26) for b in digest[:30])


def generate_sk(n: int, seed: int) -> IsingInstance:
    """Draw an SK instance with i.i.d. standard-normal couplings and fields.

    The stream is deterministic in ``seed``: upper-triangle couplings are drawn
    first in lexicographic (i, j) order, then the fields.
    """
    if n < 2:
        raise InvalidArgumentError(f"generate_sk needs n >= 2, got {n}")
    rng = np.random.default_rng(seed)
    upper = rng.standard_normal(n * (n - 1) // 2)
    h = rng.standard_normal(n)
    J = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    J[iu] = upper
    J[(iu[1], iu[0])] = upper
    return IsingInstance(n=n, couplings=J, fields=h, uid=_derive_uid(n, seed), seed=seed)


def energy(instance: IsingInstance, config: SpinConfig) -> float:
    """Evaluate ``-(1/2) sum_{j != k} J_jk s_j s_k - sum_j h_j s_j``."""
    if config.n != instance.n:
        raise InvalidArgumentError(
            f"config length {config.n} does not match instance n={instance.n}"
        )
    s = config.spins()
    return float(-0.5 * s @ instance.couplings @ s - instance.fields @ s)


def all_energies(instance: IsingInstance) -> np.ndarray:
    """Energies of every basis state, indexed by bitstring integer."""
    n = instance.n
    if n > GROUND_STATE_MAX_N:
        raise CapabilityError(f"exhaustive enumeration is bounded at n={GROUND_STATE_MAX_N}")
    dim = 1 << n
    out = np.empty(dim)
    chunk = min(dim, 1 << 20)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    iu, ju = np.triu_indices(n, k=1)
    jvals = instance.couplings[iu, ju]
    for start in range(0, dim, chunk):
        z = np.arange(start, min(start + chunk, dim), dtype=np.int64)
        spins = 1.0 - 2.0 * ((z[:, None] >> shifts) & 1)
        pair = (spins[:, iu] * spins[:, ju]) @ jvals
        out[start : start + len(z)] = -pair - spins @ instance.fields
    return out


def ground_state(instance: IsingInstance) -> GroundState:
    """Exhaustive minimum-energy search; ties resolved to the smallest bitstring."""
    if instance.n > GROUND_STATE_MAX_N:
        raise CapabilityError(
            f"ground_state is exhaustive and bounded at n={GROUND_STATE_MAX_N}, "
            f"got n={instance.n}"
        )
    energies = all_energies(instance)
    best = int(np.argmin(energies))
    ties = np.flatnonzero(energies <= energies[best] + DEGENERACY_TOL)
    chosen = int(ties[0])
    return GroundState(
        config=SpinConfig.from_index(chosen, instance.n),
        energy=float(energies[chosen]),
        degenerate=len(ties) > 1,
    )


def _format_real(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise InvalidArgumentError(f"cannot serialize non-finite value {x}")
    return format(x, ".17g")


def _json_17g(obj, indent=0) -> str:
    """Serialize with every real at 17 significant digits (lossless for doubles)."""
    pad = "  " * indent
    if isinstance(obj, dict):
        items = ",\n".join(
            f'{pad}  "{k}": {_json_17g(v, indent + 1)}' for k, v in obj.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if obj and isinstance(obj[0], (list, tuple)):
            items = ",\n".join(f"{pad}  {_json_17g(v, indent + 1)}" for v in obj)
            return "[\n" + items + "\n" + pad + "]"
        return "[" + ", ".join(_json_17g(v, indent + 1) for v in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, float):
        return _format_real(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    raise TypeError(f"unsupported type in instance serialization: {type(obj)}")


def save_instance(instance: IsingInstance, path) -> None:
    doc = {
        "uid": instance.uid,
        "n": instance.n,
        "seed": instance.seed,
        "J": instance.couplings.tolist(),
        "h": instance.fields.tolist(),
    }
    if instance.ground_state is not None:
        doc["ground_state"] = {
            "bits": instance.ground_state.config.bits,
            "energy": instance.ground_state.energy,
        }
    Path(path).write_text(_json_17g(doc) + "\n")


def load_instance(path) -> IsingInstance:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    for key in ("uid", "n", "seed", "J", "h"):
        if key not in doc:
            raise ParseError(f"missing field {key!r}")
    n = doc["n"]
    if not isinstance(n, int) or n < 2:
        raise ParseError(f"field 'n' must be an integer >= 2, got {n!r}")
    J = np.asarray(doc["J"], dtype=np.float64)
    h = np.asarray(doc["h"], dtype=np.float64)
    if J.shape != (n, n):
        raise ParseError(f"coupling shape: expected {n}x{n}, got {J.shape}")
    if h.shape != (n,):
        raise ParseError(f"field length: expected {n} fields, got {h.shape[0]}")
    if np.any(np.diag(J) != 0.0):
        raise ParseError("nonzero coupling diagonal")
    if not np.array_equal(J, J.T):
        raise ParseError("asymmetric couplings")
    gs = None
    if doc.get("ground_state") is not None:
        blob = doc["ground_state"]
        if "bits" not in blob or "energy" not in blob:
            raise ParseError("ground_state must carry 'bits' and 'energy'")
        bits = blob["bits"]
        if len(bits) != n:
            raise ParseError(f"ground_state bits length: expected {n}, got {len(bits)}")
        gs = GroundState(config=SpinConfig(bits), energy=float(blob["energy"]))
    instance = IsingInstance(
        n=n, couplings=J, fields=h, uid=doc["uid"], seed=doc["seed"], ground_state=gs
    )
    if gs is not None:
        recomputed = energy(instance, gs.config)
        scale = max(1.0, abs(gs.energy))
        if abs(recomputed - gs.energy) > 1e-12 * scale:
            raise ParseError(
                f"ground_state energy: cached {gs.energy!r} but re-evaluation gives {recomputed!r}"
            )
    return instance

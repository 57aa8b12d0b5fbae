"""Physical-to-logical decoders for LHZ readout.

Six strategies: entire-state comparison, random overlapping spanning trees,
methodical non-overlapping spanning trees (lowest-energy or majority-vote
selection), a minimum-weight syndrome-correction table, and loopy sum-product
belief propagation on the readout factor graph.

Scalar operations decode one physical state; ``success_weights`` scores every
basis state at once (vectorized) to feed the walk simulator.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CapabilityError,
    InvalidArgumentError,
    ParseError,
    TreeConstructionError,
)
from .ising import GroundState, IsingInstance, SpinConfig, all_energies, ground_state
from .lhz import LhzLayout, PhysicalState, encode_indices, syndrome_indices, syndrome_of_index
from .walk import SuccessWeights

MAX_TABLE_PLAQUETTES = 15
DEFAULT_REPLICATES = 16


# ---------------------------------------------------------------------------
# Spanning trees


def pair_rank(i: int, j: int, n: int) -> int:
    """Lexicographic rank of the pair (i, j), i < j, among all n-choose-2 pairs."""
    if i > j:
        i, j = j, i
    return i * n - i * (i + 1) // 2 + (j - i - 1)


@dataclass(frozen=True)
class SpanningTree:
    edges: tuple[tuple[int, int], ...]
    physical_indices: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.edges) + 1


def make_tree(edges, n: int) -> SpanningTree:
    edges = tuple(sorted(tuple(sorted(e)) for e in edges))
    if len(edges) != n - 1:
        raise InvalidArgumentError(f"a spanning tree on {n} vertices needs {n - 1} edges")
    if not _is_spanning_tree(edges, n):
        raise InvalidArgumentError(f"edges {edges} do not form a spanning tree")
    return SpanningTree(edges=edges, physical_indices=tuple(pair_rank(i, j, n) for i, j in edges))


def _is_spanning_tree(edges, n: int) -> bool:
    if len(edges) != n - 1:
        return False
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri == rj:
            return False
        parent[ri] = rj
    return True


def prufer_decode(seq, n: int) -> SpanningTree:
    """Decode a Prufer sequence of length n-2 into its labeled tree."""
    seq = list(seq)
    if len(seq) != n - 2 or any(not 0 <= v < n for v in seq):
        raise InvalidArgumentError(f"Prufer sequence for n={n} must have {n - 2} entries in [0, {n})")
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    edges = []
    import heapq

    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, v))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    u = heapq.heappop(leaves)
    w = heapq.heappop(leaves)
    edges.append((u, w))
    return make_tree(edges, n)


def random_spanning_tree(n: int, rng: np.random.Generator) -> SpanningTree:
    """Uniform over all n^(n-2) labeled trees via a random Prufer sequence."""
    if n < 3:
        raise InvalidArgumentError(f"random trees need n >= 3, got {n}")
    return prufer_decode(rng.integers(0, n, size=n - 2), n)


def all_spanning_trees(n: int) -> list[SpanningTree]:
    """Every spanning tree of K_n, in lexicographic order of the edge set."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    out = []
    for combo in itertools.combinations(pairs, n - 1):
        if _is_spanning_tree(combo, n):
            out.append(make_tree(combo, n))
    return out


@dataclass(frozen=True)
class TreeSet:
    trees: tuple[SpanningTree, ...]
    include_data: bool = True

    def __post_init__(self):
        if not self.trees and not self.include_data:
            raise InvalidArgumentError("tree set must carry at least one readout choice")


def nonoverlapping_trees(layout: LhzLayout) -> TreeSet:
    """The methodical pairwise-disjoint trees built from the LHZ logical lines.

    Walk logical lines from line 0; within a line, take qubits whose partner
    index is still uncovered, stopping once the line retains exactly as many
    free qubits as there are trees still to build. If the selection is not yet
    a spanning tree, complete it with the lowest-index free qubits that join
    distinct components without starving any line.
    """
    n = layout.n
    if n < 4:
        raise InvalidArgumentError(f"non-overlapping trees need n >= 4, got {n}")
    s = layout.n_coupling // (n - 1)
    pairs = layout.coupling_pairs
    used: set[int] = set()
    trees: list[SpanningTree] = []

    def line_available(line_i, selected):
        return [q for q in layout.logical_lines[line_i] if q not in used and q not in selected]

    for t in range(s):
        remaining_after = s - t - 1
        selected: list[int] = []
        covered: set[int] = set()
        for line_i in range(n):
            for q in line_available(line_i, selected):
                partner = pairs[q][0] + pairs[q][1] - line_i
                if partner in covered:
                    continue
                if len(line_available(line_i, selected)) - 1 < remaining_after:
                    break
                selected.append(q)
                covered.update(pairs[q])
            if len(covered) == n:
                break

        while not _is_spanning_tree([pairs[q] for q in selected], n):
            comp = _components([pairs[q] for q in selected], n)
            done = False
            for q in range(layout.n_coupling):
                if q in used or q in selected:
                    continue
                i, j = pairs[q]
                if comp[i] == comp[j]:
                    continue  # would close a cycle
                if any(
                    len(line_available(v, selected)) - 1 < remaining_after for v in (i, j)
                ):
                    continue  # would starve a line needed by a later tree
                selected.append(q)
                root = _components([pairs[p] for p in selected], n)
                comp = root
                done = True
                break
            if not done:
                raise TreeConstructionError(
                    f"could not complete tree {t + 1}/{s} for n={n}; selected={sorted(selected)}"
                )
        trees.append(make_tree([pairs[q] for q in selected], n))
        used.update(selected)
    return TreeSet(trees=tuple(trees), include_data=True)


def _components(edges, n: int) -> list[int]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        parent[find(i)] = find(j)
    return [find(v) for v in range(n)]


# ---------------------------------------------------------------------------
# Vectorized readout machinery


def _ground(instance: IsingInstance) -> GroundState:
    return instance.ground_state if instance.ground_state is not None else ground_state(instance)


def _tree_path_masks(tree: SpanningTree, layout: LhzLayout) -> list[int]:
    """For each logical vertex, the OR of coupling-qubit masks on its root path."""
    n = layout.n
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(n)}
    for (i, j) in tree.edges:
        q = layout.pair_index(i, j)
        adj[i].append((j, layout.qubit_mask(q)))
        adj[j].append((i, layout.qubit_mask(q)))
    masks = [0] * n
    seen = [False] * n
    stack = [0]
    seen[0] = True
    while stack:
        v = stack.pop()
        for w, mask in adj[v]:
            if not seen[w]:
                seen[w] = True
                masks[w] = masks[v] | mask
                stack.append(w)
    return masks


def _parity(z: np.ndarray, mask: int) -> np.ndarray:
    v = z & mask
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> shift
    return v & 1


def _basis(layout: LhzLayout) -> np.ndarray:
    return np.arange(1 << layout.K, dtype=np.int64)


def data_readout_indices(layout: LhzLayout, z: np.ndarray | None = None) -> np.ndarray:
    """Logical index read directly off the data qubits, for each physical state."""
    if z is None:
        z = _basis(layout)
    n = layout.n
    out = np.zeros(len(z), dtype=np.int64)
    for i, q in enumerate(layout.data_qubits):
        out |= ((z >> layout.bit_position(q)) & 1) << (n - 1 - i)
    return out


def tree_readout_indices(tree: SpanningTree, layout: LhzLayout,
                         logical_energies: np.ndarray,
                         z: np.ndarray | None = None) -> np.ndarray:
    """Oriented tree readout (lower-energy global-flip partner) per physical state."""
    if z is None:
        z = _basis(layout)
    n = layout.n
    cand = np.zeros(len(z), dtype=np.int64)
    for v, mask in enumerate(_tree_path_masks(tree, layout)):
        if v == 0:
            continue
        cand |= _parity(z, mask) << (n - 1 - v)
    partner = cand ^ ((1 << n) - 1)
    take_partner = logical_energies[partner] < logical_energies[cand]
    return np.where(take_partner, partner, cand)


# ---------------------------------------------------------------------------
# Decoder outcomes (scalar API)


@dataclass(frozen=True)
class DecoderOutcome:
    selected: SpinConfig | None
    candidates: tuple[SpinConfig, ...]
    trees_correct: int
    success_weight: float
    converged: bool = True


def _outcome_from_index(sel: int, cands, n: int, gs_index: int) -> DecoderOutcome:
    cands = tuple(SpinConfig.from_index(int(c), n) for c in cands)
    correct = sum(1 for c in cands if c.index == gs_index)
    return DecoderOutcome(
        selected=SpinConfig.from_index(int(sel), n),
        candidates=cands,
        trees_correct=correct,
        success_weight=1.0 if int(sel) == gs_index else 0.0,
    )


def decode_entire(z: PhysicalState, layout: LhzLayout, instance: IsingInstance) -> DecoderOutcome:
    """Accept only the exact encoding of the logical ground state."""
    gs = _ground(instance)
    zi = z.index
    if syndrome_of_index(zi, layout) != 0:
        return DecoderOutcome(selected=None, candidates=(), trees_correct=0, success_weight=0.0)
    readout = int(data_readout_indices(layout, np.array([zi], dtype=np.int64))[0])
    cfg = SpinConfig.from_index(readout, layout.n)
    weight = 1.0 if readout == gs.config.index else 0.0
    return DecoderOutcome(selected=cfg, candidates=(cfg,),
                          trees_correct=int(weight), success_weight=weight)


def tree_readout(z: PhysicalState, tree: SpanningTree, layout: LhzLayout,
                 instance: IsingInstance) -> SpinConfig:
    """Read one tree off a physical state, oriented to the lower-energy partner."""
    energies = all_energies(instance)
    idx = tree_readout_indices(tree, layout, energies, np.array([z.index], dtype=np.int64))
    return SpinConfig.from_index(int(idx[0]), layout.n)


def _candidate_matrix(z: np.ndarray, treeset: TreeSet, layout: LhzLayout,
                      energies: np.ndarray) -> np.ndarray:
    rows = [tree_readout_indices(t, layout, energies, z) for t in treeset.trees]
    if treeset.include_data:
        rows.append(data_readout_indices(layout, z))
    return np.stack(rows)


def _select_lowest(cands: np.ndarray, energies: np.ndarray) -> np.ndarray:
    E = energies[cands]
    emin = E.min(axis=0)
    masked = np.where(E == emin, cands, np.iinfo(np.int64).max)
    return masked.min(axis=0)


NO_MAJORITY = -1


def _select_majority(cands: np.ndarray) -> np.ndarray:
    """Whole-choice majority vote: a candidate must win strictly more than half
    of the votes, otherwise decoding fails (sentinel NO_MAJORITY)."""
    k = cands.shape[0]
    need = k // 2 + 1
    sel = np.full(cands.shape[1], NO_MAJORITY, dtype=np.int64)
    for r in range(k):
        votes = (cands == cands[r]).sum(axis=0)
        win = votes >= need
        sel[win] = cands[r, win]
    return sel


def decode_trees(z: PhysicalState, treeset: TreeSet, layout: LhzLayout,
                 instance: IsingInstance, mode: str = "lowest_energy") -> DecoderOutcome:
    if mode not in ("lowest_energy", "majority"):
        raise InvalidArgumentError(f"mode must be lowest_energy or majority, got {mode!r}")
    energies = all_energies(instance)
    gs = _ground(instance)
    zi = np.array([z.index], dtype=np.int64)
    cands = _candidate_matrix(zi, treeset, layout, energies)
    if mode == "lowest_energy":
        sel = _select_lowest(cands, energies)
    else:
        sel = _select_majority(cands)
    if sel[0] == NO_MAJORITY:
        cfgs = tuple(SpinConfig.from_index(int(c), layout.n) for c in cands[:, 0])
        correct = sum(1 for c in cfgs if c.index == gs.config.index)
        return DecoderOutcome(selected=None, candidates=cfgs,
                              trees_correct=correct, success_weight=0.0)
    return _outcome_from_index(sel[0], cands[:, 0], layout.n, gs.config.index)


# ---------------------------------------------------------------------------
# Minimum-weight syndrome table


@dataclass(frozen=True)
class SyndromeTable:
    corrections: np.ndarray  # flip pattern per syndrome integer
    weights: np.ndarray      # Hamming weight of each correction

    def __post_init__(self):
        self.corrections.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def n_syndromes(self) -> int:
        return len(self.corrections)


def build_min_weight_table(layout: LhzLayout, rng: np.random.Generator) -> SyndromeTable:
    """Minimum-weight correction per syndrome; degenerate minima picked at random.

    Enumerates every flip pattern grouped by its syndrome (the syndrome map is
    GF(2)-linear, so correcting state z with pattern f zeroes the syndrome iff
    syndrome(f) = syndrome(z)).
    """
    P = layout.n_plaquettes
    if P > MAX_TABLE_PLAQUETTES:
        raise CapabilityError(
            f"syndrome table is bounded at P={MAX_TABLE_PLAQUETTES} plaquettes, got {P}"
        )
    patterns = _basis(layout)
    synd = syndrome_indices(layout)
    weight = np.bitwise_count(patterns.astype(np.uint64)).astype(np.int64)
    order = np.lexsort((patterns, weight, synd))
    s_sorted = synd[order]
    w_sorted = weight[order]
    f_sorted = patterns[order]
    n_syn = 1 << P
    first = np.searchsorted(s_sorted, np.arange(n_syn), side="left")
    last = np.searchsorted(s_sorted, np.arange(n_syn), side="right")
    assert np.all(last > first), "plaquette matrix lost full rank; unreachable syndrome"
    corrections = np.empty(n_syn, dtype=np.int64)
    weights = np.empty(n_syn, dtype=np.int64)
    for s in range(n_syn):
        lo, hi = first[s], last[s]
        minw = w_sorted[lo]
        ties = np.searchsorted(w_sorted[lo:hi], minw, side="right")
        pick = int(rng.integers(ties)) if ties > 1 else 0
        corrections[s] = f_sorted[lo + pick]
        weights[s] = minw
    assert corrections[0] == 0
    return SyndromeTable(corrections=corrections, weights=weights)


def decode_min_weight(z: PhysicalState, table: SyndromeTable, layout: LhzLayout,
                      instance: IsingInstance) -> DecoderOutcome:
    gs = _ground(instance)
    s = syndrome_of_index(z.index, layout)
    corrected = z.index ^ int(table.corrections[s])
    assert syndrome_of_index(corrected, layout) == 0
    readout = int(data_readout_indices(layout, np.array([corrected], dtype=np.int64))[0])
    return _outcome_from_index(readout, [readout], layout.n, gs.config.index)


# ---------------------------------------------------------------------------
# Belief propagation


@dataclass(frozen=True)
class BpParams:
    llr: float = 2.0
    max_iters: int = 50
    damping: float = 0.0
    tol: float = 1e-6

    def __post_init__(self):
        if self.llr <= 0:
            raise InvalidArgumentError(f"llr must be > 0, got {self.llr}")
        if not 0 <= self.damping < 1:
            raise InvalidArgumentError(f"damping must be in [0, 1), got {self.damping}")
        if self.max_iters < 1 or self.tol <= 0:
            raise InvalidArgumentError("need max_iters >= 1 and tol > 0")


_ATANH_CLIP = 1.0 - 1e-15


def _bp_decode_all(layout: LhzLayout, instance: IsingInstance, params: BpParams,
                   z: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Sum-product marginals for each physical state; returns (logical, converged).

    Factor graph: one variable per logical spin; one pairwise factor per
    coupling qubit pinning s_i * s_j to the measured parity with strength llr;
    one unary factor per data qubit biasing its spin likewise. Flooding
    schedule with damping; hard decision by marginal sign, per-bit ties going
    to the data readout.
    """
    if z is None:
        z = _basis(layout)
    n = layout.n
    half = 0.5 * params.llr
    theta_pair = np.empty((len(z), layout.n_coupling))
    for q in range(layout.n_coupling):
        theta_pair[:, q] = half * (1.0 - 2.0 * ((z >> layout.bit_position(q)) & 1))
    theta_var = np.empty((len(z), n))
    for i, q in enumerate(layout.data_qubits):
        theta_var[:, i] = half * (1.0 - 2.0 * ((z >> layout.bit_position(q)) & 1))

    tails, heads, edge_q, rev = [], [], [], {}
    for q, (i, j) in enumerate(layout.coupling_pairs):
        rev[len(tails)] = len(tails) + 1
        rev[len(tails) + 1] = len(tails)
        tails += [i, j]
        heads += [j, i]
        edge_q += [q, q]
    tails, heads = np.array(tails), np.array(heads)
    edge_q = np.array(edge_q)
    n_dir = len(tails)

    M = np.zeros((len(z), n_dir))
    t_edge = np.tanh(theta_pair[:, edge_q])
    converged = np.zeros(len(z), dtype=bool)
    for _ in range(params.max_iters):
        F = np.arctanh(np.clip(t_edge * np.tanh(M), -_ATANH_CLIP, _ATANH_CLIP))
        S = np.zeros((len(z), n))
        for d in range(n_dir):
            S[:, heads[d]] += F[:, d]
        M_new = np.empty_like(M)
        for d in range(n_dir):
            M_new[:, d] = theta_var[:, tails[d]] + S[:, tails[d]] - F[:, rev[d]]
        if params.damping > 0:
            M_new = (1.0 - params.damping) * M_new + params.damping * M
        delta = np.max(np.abs(M_new - M), axis=1)
        M = M_new
        converged = delta < params.tol
        if converged.all():
            break

    F = np.arctanh(np.clip(t_edge * np.tanh(M), -_ATANH_CLIP, _ATANH_CLIP))
    lam = theta_var.copy()
    for d in range(n_dir):
        lam[:, heads[d]] += F[:, d]
    data_row = data_readout_indices(layout, z)
    logical = np.zeros(len(z), dtype=np.int64)
    for i in range(n):
        shift = n - 1 - i
        bit = np.where(lam[:, i] < 0, 1, 0)
        tie = lam[:, i] == 0
        if np.any(tie):
            bit = np.where(tie, (data_row >> shift) & 1, bit)
        logical |= bit.astype(np.int64) << shift
    return logical, converged


def decode_belief_propagation(z: PhysicalState, layout: LhzLayout, instance: IsingInstance,
                              params: BpParams | None = None) -> DecoderOutcome:
    params = params or BpParams()
    gs = _ground(instance)
    logical, conv = _bp_decode_all(layout, instance, params,
                                   z=np.array([z.index], dtype=np.int64))
    out = _outcome_from_index(logical[0], [logical[0]], layout.n, gs.config.index)
    return DecoderOutcome(selected=out.selected, candidates=out.candidates,
                          trees_correct=out.trees_correct,
                          success_weight=out.success_weight, converged=bool(conv[0]))


# ---------------------------------------------------------------------------
# Decoder specs and whole-basis weight vectors


@dataclass(frozen=True)
class DecoderSpec:
    kind: str                      # entire | trees | minweight | bp
    tree_source: str | None = None  # random | nonoverlap
    tree_count: int = 2             # trees beyond the data readout
    mode: str = "lowest_energy"
    bp: BpParams = field(default_factory=BpParams)
    text: str = ""

    @property
    def randomized(self) -> bool:
        return self.kind == "minweight" or (self.kind == "trees" and self.tree_source == "random")


def parse_decoder_spec(text: str) -> DecoderSpec:
    """Parse the CLI grammar, e.g. ``trees:nonoverlap:2+1:lowest`` or ``bp(llr=2)``."""
    t = text.strip()
    if t == "entire":
        return DecoderSpec(kind="entire", text=t)
    if t == "minweight":
        return DecoderSpec(kind="minweight", text=t)
    if t == "bp" or t.startswith("bp("):
        kwargs = {}
        if t.startswith("bp("):
            if not t.endswith(")"):
                raise ParseError(f"unterminated bp spec: {text!r}")
            body = t[3:-1].strip()
            names = {"llr": ("llr", float), "iters": ("max_iters", int),
                     "damping": ("damping", float), "tol": ("tol", float)}
            for item in filter(None, (s.strip() for s in body.split(","))):
                if "=" not in item:
                    raise ParseError(f"bp parameter {item!r} must look like name=value")
                key, val = (s.strip() for s in item.split("=", 1))
                if key not in names:
                    raise ParseError(f"unknown bp parameter {key!r}")
                name, cast = names[key]
                try:
                    kwargs[name] = cast(val)
                except ValueError as exc:
                    raise ParseError(f"bad value for bp parameter {key!r}: {val!r}") from exc
        return DecoderSpec(kind="bp", bp=BpParams(**kwargs), text=t)
    if t.startswith("trees:"):
        parts = t.split(":")
        if len(parts) != 4:
            raise ParseError(f"tree spec must be trees:<source>:<k>+1:<mode>, got {text!r}")
        _, source, count, mode = parts
        if source not in ("random", "nonoverlap"):
            raise ParseError(f"tree source must be random or nonoverlap, got {source!r}")
        if not count.endswith("+1"):
            raise ParseError(f"tree count must look like 2+1, got {count!r}")
        try:
            k = int(count[:-2])
        except ValueError as exc:
            raise ParseError(f"bad tree count {count!r}") from exc
        if k < 0:
            raise ParseError(f"tree count must be >= 0, got {k}")
        if mode not in ("lowest", "majority"):
            raise ParseError(f"tree mode must be lowest or majority, got {mode!r}")
        return DecoderSpec(kind="trees", tree_source=source, tree_count=k,
                           mode="lowest_energy" if mode == "lowest" else "majority", text=t)
    raise ParseError(f"unknown decoder spec {text!r}")


@dataclass(frozen=True)
class DecoderWeights:
    """Per-basis-state success weights, plus the split by trees-correct count."""

    weights: SuccessWeights
    by_trees_correct: dict[int, np.ndarray] | None
    replicates: int
    spec: str


def _tree_run(layout, instance, energies, gs_index, trees, mode):
    treeset = TreeSet(trees=tuple(trees), include_data=True)
    z = _basis(layout)
    cands = _candidate_matrix(z, treeset, layout, energies)
    if mode == "lowest_energy":
        sel = _select_lowest(cands, energies)
    else:
        sel = _select_majority(cands)
    success = (sel == gs_index).astype(np.float64)
    counts = (cands == gs_index).sum(axis=0)
    return success, counts


def success_weights(spec: DecoderSpec | str, layout: LhzLayout, instance: IsingInstance,
                    rng: np.random.Generator | None = None,
                    replicates: int = DEFAULT_REPLICATES) -> DecoderWeights:
    """Score every physical basis state under a decoder.

    Deterministic decoders yield 0/1 weights. Randomized decoders (random tree
    draws, the random pick among degenerate minimum-weight corrections) are
    averaged over ``replicates`` independent substreams of ``rng``, one run per
    replicate shared across all basis states. Tree decoders also report the
    success split by how many readout choices equalled the ground state.
    """
    if isinstance(spec, str):
        spec = parse_decoder_spec(spec)
    gs = _ground(instance)
    gs_index = gs.config.index
    dim = 1 << layout.K

    if spec.kind == "entire":
        w = np.zeros(dim)
        w[int(encode_indices(layout)[gs_index])] = 1.0
        return DecoderWeights(SuccessWeights(w, label=spec.text or "entire"),
                              None, 0, spec.text or "entire")

    if spec.kind == "bp":
        logical, _ = _bp_decode_all(layout, instance, spec.bp)
        w = (logical == gs_index).astype(np.float64)
        return DecoderWeights(SuccessWeights(w, label=spec.text or "bp"),
                              None, 0, spec.text or "bp")

    if spec.kind == "minweight":
        if rng is None:
            raise InvalidArgumentError("minweight weights need an rng for degeneracy picks")
        z = _basis(layout)
        synd = syndrome_indices(layout)
        acc = np.zeros(dim)
        for child in rng.spawn(replicates):
            table = build_min_weight_table(layout, child)
            corrected = z ^ table.corrections[synd]
            logical = data_readout_indices(layout, corrected)
            acc += logical == gs_index
        acc /= replicates
        return DecoderWeights(SuccessWeights(acc, label=spec.text or "minweight"),
                              None, replicates, spec.text or "minweight")

    if spec.kind == "trees":
        energies = all_energies(instance)
        if spec.tree_source == "nonoverlap":
            available = nonoverlapping_trees(layout).trees
            if spec.tree_count > len(available):
                raise InvalidArgumentError(
                    f"layout offers {len(available)} non-overlapping trees, "
                    f"asked for {spec.tree_count}"
                )
            success, counts = _tree_run(layout, instance, energies, gs_index,
                                        available[: spec.tree_count], spec.mode)
            split = {c: (success * (counts == c)).astype(np.float64)
                     for c in range(0, spec.tree_count + 2)}
            return DecoderWeights(SuccessWeights(success, label=spec.text),
                                  split, 0, spec.text)
        if rng is None:
            raise InvalidArgumentError("random-tree weights need an rng")
        acc = np.zeros(dim)
        split = {c: np.zeros(dim) for c in range(0, spec.tree_count + 2)}
        for child in rng.spawn(replicates):
            trees = [random_spanning_tree(layout.n, child) for _ in range(spec.tree_count)]
            success, counts = _tree_run(layout, instance, energies, gs_index,
                                        trees, spec.mode)
            acc += success
            for c in split:
                split[c] += success * (counts == c)
        acc /= replicates
        for c in split:
            split[c] /= replicates
        return DecoderWeights(SuccessWeights(acc, label=spec.text), split,
                              replicates, spec.text)

    raise InvalidArgumentError(f"unhandled decoder kind {spec.kind!r}")


def syndrome_table_csv(table: SyndromeTable) -> str:
    lines = ["syndrome_hex,correction_hex,weight"]
    for s in range(table.n_syndromes):
        lines.append(f"{s:x},{int(table.corrections[s]):x},{int(table.weights[s])}")
    return "\n".join(lines) + "\n"

"""Exact counting of physical states decodable by spanning-tree sets.

All counting runs over the coupling qubits only (data qubits excluded), in the
lexicographic pair ordering shared with the LHZ layout. A coupling-qubit state
is covered by a tree when its bits on the tree's positions all match the
reference (correct) pattern; counts are independent of which reference pattern
is used, so the all-zero pattern stands in for the encoded ground state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .decoders import SpanningTree, all_spanning_trees
from .errors import CapabilityError, InvalidArgumentError

MAX_COUPLING_QUBITS = 21


@dataclass(frozen=True)
class CountLedger:
    order: tuple[SpanningTree, ...]
    new_states: tuple[int, ...]
    running_total: tuple[int, ...]

    @property
    def total(self) -> int:
        return self.running_total[-1] if self.running_total else 0


@dataclass(frozen=True)
class WeightCensus:
    n_marked: int      # number of "correct" positions
    combinations: int  # C(K_c, n_marked)
    invalid: int       # subsets containing no spanning tree
    valid: int


@dataclass(frozen=True)
class ValidityCensus:
    per_weight: tuple[WeightCensus, ...]

    @property
    def total(self) -> int:
        return sum(w.valid for w in self.per_weight)


def _coupling_count(n: int) -> int:
    kc = n * (n - 1) // 2
    if kc > MAX_COUPLING_QUBITS:
        raise CapabilityError(
            f"enumeration over 2^{kc} coupling-qubit states exceeds the "
            f"2^{MAX_COUPLING_QUBITS} bound"
        )
    return kc


def _tree_mask(tree: SpanningTree, kc: int) -> int:
    mask = 0
    for q in tree.physical_indices:
        mask |= 1 << (kc - 1 - q)
    return mask


def enumerate_covered_states(trees, n: int) -> CountLedger:
    """Count, tree by tree, the basis states newly matching some tree's pattern."""
    kc = _coupling_count(n)
    trees = tuple(trees)
    z = np.arange(1 << kc, dtype=np.int64)
    seen = np.zeros(1 << kc, dtype=bool)
    new_states = []
    running = []
    total = 0
    for tree in trees:
        if len(tree.edges) != n - 1:
            raise InvalidArgumentError(f"tree {tree.edges} does not span {n} vertices")
        matches = (z & _tree_mask(tree, kc)) == 0
        fresh = int(np.count_nonzero(matches & ~seen))
        seen |= matches
        total += fresh
        new_states.append(fresh)
        running.append(total)
    return CountLedger(order=trees, new_states=tuple(new_states), running_total=tuple(running))


def semianalytic_count(n: int) -> ValidityCensus:
    """Per-weight census of edge subsets containing a spanning tree.

    For each subset size i from n-1 to K_c, counts C(K_c, i) minus the number
    of subsets whose edges do not connect all n vertices; the sum of valid
    counts equals the enumerate_covered_states total over all trees.
    """
    kc = _coupling_count(n)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    valid_by_weight = [0] * (kc + 1)
    for subset in range(1 << kc):
        edges = [pairs[q] for q in range(kc) if subset >> (kc - 1 - q) & 1]
        if len(edges) < n - 1:
            continue
        if _connected_covering(edges, n):
            valid_by_weight[len(edges)] += 1
    per = []
    for i in range(n - 1, kc + 1):
        comb = math.comb(kc, i)
        per.append(WeightCensus(n_marked=i, combinations=comb,
                                invalid=comb - valid_by_weight[i],
                                valid=valid_by_weight[i]))
    return ValidityCensus(per_weight=tuple(per))


def _connected_covering(edges, n: int) -> bool:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = n
    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            comps -= 1
    return comps == 1


def overlap_increment(existing, new_tree: SpanningTree, n: int) -> int:
    """States newly covered by ``new_tree`` given ``existing`` trees, by enumeration."""
    existing = tuple(existing)
    before = enumerate_covered_states(existing, n).total if existing else 0
    after = enumerate_covered_states(existing + (new_tree,), n).total
    return after - before


def pairwise_increment_closed_form(tree_a: SpanningTree, tree_b: SpanningTree, n: int) -> int:
    """2^(K-N) - 2^(K - |A u B|): the second tree's contribution after the first."""
    kc = n * (n - 1) // 2
    union = len(set(tree_a.physical_indices) | set(tree_b.physical_indices))
    return (1 << (kc - (n - 1))) - (1 << (kc - union))


def random_chance(n: int, K: int) -> dict[str, float]:
    """Random-guess baselines: p_n = 2^-n, p_K = 2^-K, p_{K/n} = 1-(1-p_n)^(K/n)."""
    if n < 1 or K < 1:
        raise InvalidArgumentError("n and K must be positive")
    p_n = 0.5 ** n
    p_k = 0.5 ** K
    p_copies = 1.0 - (1.0 - p_n) ** (K / n)
    return {"p_n": p_n, "p_K": p_k, "p_K_over_n": p_copies}


def random_decode_curve(trees, n: int) -> np.ndarray:
    """Probability of covering a uniformly random coupling state after m trees."""
    ledger = enumerate_covered_states(trees, n)
    kc = n * (n - 1) // 2
    return np.array(ledger.running_total, dtype=np.float64) / (1 << kc)


def table_order_trees(n: int) -> list[SpanningTree]:
    """All spanning trees in lexicographic edge-set order (the appendix ledger order)."""
    return all_spanning_trees(n)


def ledger_csv(ledger: CountLedger) -> str:
    lines = ["index,tree_edges,new_states,total"]
    for i, tree in enumerate(ledger.order):
        edges = ";".join(f"{a}-{b}" for a, b in tree.edges)
        lines.append(f"{i + 1},{edges},{ledger.new_states[i]},{ledger.running_total[i]}")
    return "\n".join(lines) + "\n"


def cayley_count(n: int) -> int:
    return n ** (n - 2)


__all__ = [
    "CountLedger",
    "ValidityCensus",
    "WeightCensus",
    "all_spanning_trees",
    "cayley_count",
    "enumerate_covered_states",
    "ledger_csv",
    "overlap_increment",
    "pairwise_increment_closed_form",
    "random_chance",
    "random_decode_curve",
    "semianalytic_count",
    "table_order_trees",
]

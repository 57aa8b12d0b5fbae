import itertools

import numpy as np
import pytest

import paritywalk as pw
from paritywalk.decoders import (
    BpParams,
    _bp_decode_all,
    all_spanning_trees,
    data_readout_indices,
    pair_rank,
    parse_decoder_spec,
    prufer_decode,
    syndrome_table_csv,
    tree_readout_indices,
)
from paritywalk.errors import InvalidArgumentError, ParseError
from paritywalk.lhz import encode_indices, syndrome_indices, syndrome_of_index


def encoded(instance, layout, bits):
    return pw.encode(pw.SpinConfig(bits), layout)


@pytest.fixture(scope="module")
def inst4_module():
    return pw.generate_sk(4, 11).with_ground_state()


@pytest.fixture(scope="module")
def layout4_module():
    return pw.build_layout(4)


class TestSpanningTrees:
    def test_pair_rank_matches_layout(self, layout5):
        for q, (i, j) in enumerate(layout5.coupling_pairs):
            assert pair_rank(i, j, 5) == q

    def test_prufer_cayley_n4(self):
        trees = {prufer_decode(seq, 4).edges for seq in itertools.product(range(4), repeat=2)}
        assert len(trees) == 16
        assert trees == {t.edges for t in all_spanning_trees(4)}

    def test_prufer_cayley_n5(self):
        trees = {prufer_decode(seq, 5).edges for seq in itertools.product(range(5), repeat=3)}
        assert len(trees) == 125
        assert trees == {t.edges for t in all_spanning_trees(5)}

    def test_random_tree_validity(self, rng):
        for _ in range(200):
            tree = pw.random_spanning_tree(5, rng)
            assert len(tree.edges) == 4
            assert len({v for e in tree.edges for v in e}) == 5

    def test_random_tree_uniformity(self):
        # 16000 draws over the 16 labeled trees of K_4: each within 5 sigma
        rng = np.random.default_rng(77)
        counts = {}
        for _ in range(16000):
            t = pw.random_spanning_tree(4, rng)
            counts[t.edges] = counts.get(t.edges, 0) + 1
        assert len(counts) == 16
        sigma = np.sqrt(16000 * (1 / 16) * (15 / 16))
        for c in counts.values():
            assert abs(c - 1000) <= 5 * sigma

    def test_all_three_trees_n3(self, rng):
        seen = set()
        for _ in range(100):
            seen.add(pw.random_spanning_tree(3, rng).edges)
        assert len(seen) == 3


class TestNonOverlappingTrees:
    @pytest.mark.parametrize("n,count", [(4, 2), (5, 2), (6, 3)])
    def test_counts(self, n, count):
        ts = pw.nonoverlapping_trees(pw.build_layout(n))
        assert len(ts.trees) == count

    @pytest.mark.parametrize("n", [4, 5, 6])
    def test_disjoint_and_valid(self, n):
        ts = pw.nonoverlapping_trees(pw.build_layout(n))
        used = set()
        for tree in ts.trees:
            phys = set(tree.physical_indices)
            assert not (phys & used)
            used |= phys
            assert len(tree.edges) == n - 1

    def test_n5_uses_eight_of_ten(self, layout5):
        ts = pw.nonoverlapping_trees(layout5)
        used = {q for t in ts.trees for q in t.physical_indices}
        assert len(used) == 8

    def test_requires_n4(self):
        with pytest.raises(InvalidArgumentError):
            pw.nonoverlapping_trees(pw.build_layout(3))


class TestTreeReadout:
    def test_encoded_state_round_trip(self, inst4_module, layout4_module, rng):
        gs = inst4_module.ground_state
        for z in range(16):
            cfg = pw.SpinConfig.from_index(z, 4)
            phys = pw.encode(cfg, layout4_module)
            tree = pw.random_spanning_tree(4, rng)
            got = pw.tree_readout(phys, tree, layout4_module, inst4_module)
            assert got in (cfg, cfg.flipped())
            if pw.energy(inst4_module, cfg) < pw.energy(inst4_module, cfg.flipped()):
                assert got == cfg

    def test_explicit_xor_chain(self, inst4_module, layout4_module):
        from paritywalk.decoders import make_tree

        tree = make_tree([(0, 1), (1, 2), (2, 3)], 4)
        # coupling order 01,02,03,12,13,23; parities 1 on tree edges only
        bits = "100101" + "0000"
        state = pw.PhysicalState(bits)
        got = pw.tree_readout(state, tree, layout4_module, inst4_module)
        cands = {"0101", "1010"}
        assert got.bits in cands
        other = pw.SpinConfig(({"0101", "1010"} - {got.bits}).pop())
        assert pw.energy(inst4_module, got) <= pw.energy(inst4_module, other)

    def test_zero_field_tie_goes_to_bit0(self, layout4_module, rng):
        J = np.zeros((4, 4))
        J[0, 1] = J[1, 0] = 1.0
        inst = pw.IsingInstance(n=4, couplings=J, fields=np.zeros(4), uid="t", seed=0)
        tree = pw.random_spanning_tree(4, rng)
        state = pw.encode(pw.SpinConfig("1011"), layout4_module)
        got = pw.tree_readout(state, tree, layout4_module, inst)
        assert got.bits[0] == "0"


class TestDecodeEntire:
    def test_exact_ground_state(self, inst4_module, layout4_module):
        gs = inst4_module.ground_state
        out = pw.decode_entire(encoded(inst4_module, layout4_module, gs.config.bits),
                               layout4_module, inst4_module)
        assert out.success_weight == 1.0
        assert out.selected == gs.config

    def test_single_flip_fails(self, inst4_module, layout4_module):
        gs = inst4_module.ground_state
        z = encoded(inst4_module, layout4_module, gs.config.bits)
        flipped = pw.PhysicalState.from_index(z.index ^ layout4_module.qubit_mask(0),
                                              layout4_module.K)
        out = pw.decode_entire(flipped, layout4_module, inst4_module)
        assert out.success_weight == 0.0

    def test_acceptance_fraction(self, inst5, layout5):
        synd = syndrome_indices(layout5)
        accepted = int((synd == 0).sum())
        assert accepted / (1 << layout5.K) == pytest.approx(2**5 / 2**15)
        assert accepted / (1 << layout5.K) == pytest.approx(9.8e-4, abs=1e-5)


class TestDecodeTrees:
    def test_clean_state_succeeds_both_modes(self, inst4_module, layout4_module):
        gs = inst4_module.ground_state
        ts = pw.nonoverlapping_trees(layout4_module)
        two_plus_one = pw.TreeSet(trees=ts.trees[:2], include_data=True)
        z = encoded(inst4_module, layout4_module, gs.config.bits)
        for mode in ("lowest_energy", "majority"):
            out = pw.decode_trees(z, two_plus_one, layout4_module, inst4_module, mode)
            assert out.success_weight == 1.0
            assert out.trees_correct == 3

    def test_lowest_energy_rescues_single_correct_tree(self, inst4_module, layout4_module):
        # exhaustive search: some state has exactly one correct choice out of
        # three, and lowest-energy decodes it while majority does not
        low = pw.success_weights("trees:nonoverlap:2+1:lowest", layout4_module, inst4_module)
        maj = pw.success_weights("trees:nonoverlap:2+1:majority", layout4_module, inst4_module)
        one_correct = low.by_trees_correct[1]
        rescued = (one_correct == 1.0) & (maj.weights.weights == 0.0)
        assert rescued.any()
        # spot-check one such state through the scalar API
        z = int(np.flatnonzero(rescued)[0])
        ts = pw.nonoverlapping_trees(layout4_module)
        two_plus_one = pw.TreeSet(trees=ts.trees[:2], include_data=True)
        state = pw.PhysicalState.from_index(z, layout4_module.K)
        out = pw.decode_trees(state, two_plus_one, layout4_module, inst4_module, "lowest_energy")
        assert out.success_weight == 1.0
        assert out.trees_correct == 1

    def test_majority_success_is_two_or_more_agreements(self, layout4_module):
        # exhaustive at n=4: majority success <=> >= 2 of the 3 choices are the
        # ground state (so the majority curve is the 2-correct + 3-correct split)
        for seed in (11, 23):
            inst = pw.generate_sk(4, seed).with_ground_state()
            dw = pw.success_weights("trees:nonoverlap:2+1:majority", layout4_module, inst)
            low = pw.success_weights("trees:nonoverlap:2+1:lowest", layout4_module, inst)
            at_least_two = low.by_trees_correct[2] + low.by_trees_correct[3]
            assert np.array_equal(dw.weights.weights, at_least_two)

    def test_majority_never_beats_lowest_energy(self, layout4_module):
        for seed in (11, 23):
            inst = pw.generate_sk(4, seed).with_ground_state()
            maj = pw.success_weights("trees:nonoverlap:2+1:majority", layout4_module, inst)
            low = pw.success_weights("trees:nonoverlap:2+1:lowest", layout4_module, inst)
            assert np.all(maj.weights.weights <= low.weights.weights)

    def test_no_majority_yields_no_selection(self, inst4_module, layout4_module):
        ts = pw.nonoverlapping_trees(layout4_module)
        two_plus_one = pw.TreeSet(trees=ts.trees[:2], include_data=True)
        for z in range(1 << layout4_module.K):
            state = pw.PhysicalState.from_index(z, layout4_module.K)
            out = pw.decode_trees(state, two_plus_one, layout4_module, inst4_module,
                                  "majority")
            cand_indices = [c.index for c in out.candidates]
            if len(set(cand_indices)) == 3:
                assert out.selected is None
                assert out.success_weight == 0.0
                break

    def test_mode_validation(self, inst4_module, layout4_module):
        ts = pw.nonoverlapping_trees(layout4_module)
        z = pw.PhysicalState.from_index(0, layout4_module.K)
        with pytest.raises(InvalidArgumentError):
            pw.decode_trees(z, ts, layout4_module, inst4_module, "plurality")


@pytest.fixture(scope="module")
def table4(layout4_module):
    return pw.build_min_weight_table(layout4_module, np.random.default_rng(5))


class TestMinWeight:

    def test_zero_syndrome_empty_correction(self, table4):
        assert table4.corrections[0] == 0
        assert table4.weights[0] == 0

    def test_single_qubit_syndromes_have_weight_one(self, layout4_module, table4):
        for q in range(layout4_module.K):
            s = syndrome_of_index(layout4_module.qubit_mask(q), layout4_module)
            if s != 0:
                assert table4.weights[s] == 1

    def test_corrections_zero_their_syndromes(self, layout4_module, table4):
        synd = syndrome_indices(layout4_module)
        for s in range(table4.n_syndromes):
            assert synd[int(table4.corrections[s])] == s

    def test_weights_are_exhaustive_minima(self, layout4_module, table4):
        # oracle: brute force over all 2^10 flip patterns
        synd = syndrome_indices(layout4_module)
        pop = np.bitwise_count(np.arange(1 << layout4_module.K, dtype=np.uint64))
        for s in range(table4.n_syndromes):
            candidates = pop[synd == s]
            assert table4.weights[s] == candidates.min()

    def test_deterministic_under_seed(self, layout4_module):
        a = pw.build_min_weight_table(layout4_module, np.random.default_rng(3))
        b = pw.build_min_weight_table(layout4_module, np.random.default_rng(3))
        assert np.array_equal(a.corrections, b.corrections)

    def test_decode_zero_syndrome_matches_entire(self, inst4_module, layout4_module, table4):
        for z in encode_indices(layout4_module):
            state = pw.PhysicalState.from_index(int(z), layout4_module.K)
            mw = pw.decode_min_weight(state, table4, layout4_module, inst4_module)
            entire = pw.decode_entire(state, layout4_module, inst4_module)
            assert mw.selected == entire.selected
            assert mw.success_weight == entire.success_weight

    def test_idempotent(self, inst4_module, layout4_module, table4, rng):
        for _ in range(20):
            z = int(rng.integers(0, 1 << layout4_module.K))
            s = syndrome_of_index(z, layout4_module)
            corrected = z ^ int(table4.corrections[s])
            assert syndrome_of_index(corrected, layout4_module) == 0
            again = corrected ^ int(table4.corrections[0])
            assert again == corrected

    def test_weight_one_flip_recovered(self, inst4_module, layout4_module, table4):
        gs_enc = int(encode_indices(layout4_module)[inst4_module.ground_state.config.index])
        for q in range(layout4_module.K):
            flipped = gs_enc ^ layout4_module.qubit_mask(q)
            s = syndrome_of_index(flipped, layout4_module)
            if int(table4.corrections[s]) == layout4_module.qubit_mask(q):
                out = pw.decode_min_weight(pw.PhysicalState.from_index(flipped, layout4_module.K),
                                           table4, layout4_module, inst4_module)
                assert out.success_weight == 1.0

    def test_csv_dump(self, table4):
        text = syndrome_table_csv(table4)
        lines = text.strip().split("\n")
        assert lines[0] == "syndrome_hex,correction_hex,weight"
        assert len(lines) == 1 + table4.n_syndromes
        assert lines[1] == "0,0,0"


class TestBeliefPropagation:
    def test_codespace_equals_data_readout(self, inst4_module, layout4_module):
        logical, conv = _bp_decode_all(layout4_module, inst4_module, BpParams())
        enc = encode_indices(layout4_module)
        data = data_readout_indices(layout4_module)
        for z in enc:
            assert logical[int(z)] == data[int(z)]
        assert conv[enc].all()

    def test_high_llr_codespace(self, inst4_module, layout4_module):
        logical, _ = _bp_decode_all(layout4_module, inst4_module, BpParams(llr=30.0))
        enc = encode_indices(layout4_module)
        data = data_readout_indices(layout4_module)
        assert np.array_equal(logical[enc], data[enc])

    def test_encoded_decides_within_two_iterations(self, inst5, layout5):
        # consistent evidence: the hard decision is already correct at 2 sweeps
        for llr in (0.3, 2.0, 8.0):
            params = BpParams(llr=llr, max_iters=2)
            for lbits in ("01011", "11000"):
                z = pw.encode(pw.SpinConfig(lbits), layout5)
                out = pw.decode_belief_propagation(z, layout5, inst5, params)
                assert out.selected.bits == lbits

    def test_encoded_messages_settle(self, inst5, layout5):
        z = pw.encode(pw.SpinConfig("01011"), layout5)
        out = pw.decode_belief_propagation(z, layout5, inst5, BpParams())
        assert out.converged
        assert out.selected.bits == "01011"

    def test_flipped_data_qubit_recovered(self, inst5, layout5):
        # coupling evidence outvotes the single wrong data factor
        for lbits in ("01011", "10110"):
            z = pw.encode(pw.SpinConfig(lbits), layout5)
            flipped = z.index ^ layout5.qubit_mask(layout5.data_qubits[2])
            out = pw.decode_belief_propagation(
                pw.PhysicalState.from_index(flipped, layout5.K), layout5, inst5)
            assert out.selected.bits == lbits

    def test_nonconvergence_flagged_not_raised(self, inst4_module, layout4_module):
        params = BpParams(max_iters=1, tol=1e-12)
        z = pw.PhysicalState.from_index(777, layout4_module.K)
        out = pw.decode_belief_propagation(z, layout4_module, inst4_module, params)
        assert out.selected is not None
        assert isinstance(out.converged, bool)

    def test_param_validation(self):
        with pytest.raises(InvalidArgumentError):
            BpParams(llr=0.0)
        with pytest.raises(InvalidArgumentError):
            BpParams(damping=1.0)
        with pytest.raises(InvalidArgumentError):
            BpParams(max_iters=0)


class TestDecoderSpecs:
    @pytest.mark.parametrize("text", [
        "entire",
        "trees:random:2+1:lowest",
        "trees:nonoverlap:2+1:lowest",
        "trees:nonoverlap:2+1:majority",
        "minweight",
        "bp(llr=1.5,iters=30,damping=0.1)",
    ])
    def test_grammar_round_trip(self, text):
        spec = parse_decoder_spec(text)
        assert spec.text == text

    def test_bp_defaults(self):
        spec = parse_decoder_spec("bp")
        assert spec.bp.llr == 2.0

    @pytest.mark.parametrize("bad", [
        "unknown", "trees:magic:2+1:lowest", "trees:random:2:lowest",
        "trees:random:2+1:best", "bp(llr=x)", "bp(foo=1)", "bp(llr=1",
    ])
    def test_bad_specs(self, bad):
        with pytest.raises(ParseError):
            parse_decoder_spec(bad)


class TestSuccessWeights:
    def test_entire_sums_to_one(self, inst4_module, layout4_module):
        dw = pw.success_weights("entire", layout4_module, inst4_module)
        assert dw.weights.weights.sum() == 1.0

    def test_single_tree_mean_is_one_eighth(self, inst4_module, layout4_module, rng):
        # one fixed tree, uniform measure over all physical states
        energies = pw.all_energies(inst4_module)
        tree = pw.random_spanning_tree(4, rng)
        readout = tree_readout_indices(tree, layout4_module, energies)
        success = readout == inst4_module.ground_state.config.index
        assert success.mean() == pytest.approx(1 / 8)

    def test_bitwise_reproducible(self, inst4_module, layout4_module):
        a = pw.success_weights("trees:random:2+1:lowest", layout4_module, inst4_module,
                               np.random.default_rng(21))
        b = pw.success_weights("trees:random:2+1:lowest", layout4_module, inst4_module,
                               np.random.default_rng(21))
        assert np.array_equal(a.weights.weights, b.weights.weights)

    def test_weights_in_unit_interval(self, inst4_module, layout4_module):
        for spec in ("entire", "minweight", "bp", "trees:nonoverlap:2+1:lowest",
                     "trees:random:2+1:lowest"):
            dw = pw.success_weights(spec, layout4_module, inst4_module,
                                    np.random.default_rng(2))
            w = dw.weights.weights
            assert np.all(w >= 0) and np.all(w <= 1)
            if spec in ("entire", "bp", "trees:nonoverlap:2+1:lowest"):
                assert set(np.unique(w)) <= {0.0, 1.0}

    def test_split_partitions_success(self, inst4_module, layout4_module):
        dw = pw.success_weights("trees:nonoverlap:2+1:lowest", layout4_module, inst4_module)
        total = sum(dw.by_trees_correct.values())
        assert np.allclose(total, dw.weights.weights)

    def test_randomized_split_partitions_success(self, inst4_module, layout4_module):
        dw = pw.success_weights("trees:random:2+1:lowest", layout4_module, inst4_module,
                                np.random.default_rng(5), replicates=4)
        total = sum(dw.by_trees_correct.values())
        assert np.allclose(total, dw.weights.weights)

    def test_dominance_exhaustive_n4(self, inst4_module, layout4_module):
        # acceptance core: the one entire-state success is a success everywhere
        rng = np.random.default_rng(9)
        entire = pw.success_weights("entire", layout4_module, inst4_module).weights.weights
        others = [
            pw.success_weights(s, layout4_module, inst4_module, np.random.default_rng(i))
            for i, s in enumerate([
                "trees:random:2+1:lowest",
                "trees:nonoverlap:2+1:lowest",
                "trees:nonoverlap:2+1:majority",
                "minweight",
                "bp",
            ])
        ]
        accepted = np.flatnonzero(entire == 1.0)
        for dw in others:
            assert np.all(dw.weights.weights[accepted] == 1.0), dw.spec

    def test_minweight_needs_rng(self, inst4_module, layout4_module):
        with pytest.raises(InvalidArgumentError):
            pw.success_weights("minweight", layout4_module, inst4_module)

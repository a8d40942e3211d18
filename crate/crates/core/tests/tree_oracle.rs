//! Tree claims checked against plain recursion over leaf bitmasks.

use fanin_core::fanin::BiasPoint;
use fanin_core::inductance::CollectionLoopDesign;
use fanin_core::squid::SquidParams;
use fanin_core::tree::{
    build_tree, min_active_synapses, propagate_binary, propagate_dynamical, DynamicalConfig, SearchMode, SynapseState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Bias whose per-node requirement is exactly `p` of `n`.
fn bias_for_p(p: usize, n: usize) -> f64 {
    BiasPoint::<f64>::for_fraction((p as f64 - 0.5) / n as f64)
        .unwrap()
        .ratio()
}

/// Does the subtree of `depth` levels rooted over leaves
/// `offset..offset + n^depth` fire?
fn fires(bits: u32, offset: usize, n: usize, depth: u32, p: usize) -> bool {
    if depth == 0 {
        return bits >> offset & 1 == 1;
    }
    let span = n.pow(depth - 1);
    (0..n)
        .filter(|&c| fires(bits, offset + c * span, n, depth - 1, p))
        .count()
        >= p
}

fn brute_min(n: usize, h: u32, p: usize) -> u32 {
    let leaves = n.pow(h);
    (0u32..1 << leaves)
        .filter(|&bits| fires(bits, 0, n, h, p))
        .map(u32::count_ones)
        .min()
        .unwrap()
}

#[test]
fn exhaustive_equals_p_to_the_h() {
    for (n, h) in [(2usize, 2u32), (2, 3), (3, 2), (4, 2), (2, 4)] {
        for p in 1..=n {
            let tree = build_tree(n as u64, h, bias_for_p(p, n)).unwrap();
            assert_eq!(tree.inputs_to_fire(), Some(p as u64));
            let m = min_active_synapses(&tree, SearchMode::Exhaustive).unwrap();
            let expected = p.pow(h);
            assert_eq!(m.count, expected, "n={n} H={h} p={p}");
            assert_eq!(brute_min(n, h, p) as usize, expected);
            let c = min_active_synapses(&tree, SearchMode::Constructive).unwrap();
            assert_eq!(c.count, m.count);
        }
    }
}

#[test]
fn exhaustive_witness_is_minimal() {
    for (n, h) in [(2usize, 3u32), (3, 2), (4, 2)] {
        for p in 1..=n {
            let tree = build_tree(n as u64, h, bias_for_p(p, n)).unwrap();
            let m = min_active_synapses(&tree, SearchMode::Exhaustive).unwrap();
            assert!(propagate_binary(&tree, &m.witness).unwrap().soma_fired);
            for drop in 0..m.witness.len() {
                let mut fewer = m.witness.clone();
                fewer.remove(drop);
                assert!(!propagate_binary(&tree, &fewer).unwrap().soma_fired);
            }
        }
    }
}

#[test]
fn constructive_level_counts() {
    for (n, h) in [(3usize, 3u32), (4, 3), (5, 2), (22, 2)] {
        for p in 1..=n {
            let tree = build_tree(n as u64, h, bias_for_p(p, n)).unwrap();
            let c = min_active_synapses(&tree, SearchMode::Constructive).unwrap();
            let r = propagate_binary(&tree, &c.witness).unwrap();
            assert!(r.soma_fired);
            for level in 0..=h {
                let fired = tree.level(level).filter(|&i| r.fired[i]).count();
                assert_eq!(fired, p.pow(level), "n={n} H={h} p={p} level {level}");
            }
        }
    }
}

#[test]
fn binary_threshold_rule_matches_flux() {
    let tree = build_tree(4, 2, 0.8).unwrap();
    let th = tree.threshold_flux().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let active: Vec<usize> = (0..16).filter(|_| rng.gen_bool(0.4)).collect();
        let r = propagate_binary(&tree, &active).unwrap();
        for i in 0..tree.leaves().start {
            assert!(r.applied_flux[i] >= 0.0 && r.applied_flux[i] <= 0.5);
            assert_eq!(r.fired[i], r.applied_flux[i] >= th);
        }
    }
}

fn dynamical_setup(
    n: u64,
    h: u32,
    bias: f64,
) -> (
    fanin_core::tree::DendriticTree<f64>,
    CollectionLoopDesign<f64>,
    SquidParams<f64>,
) {
    let tree = build_tree(n, h, bias).unwrap();
    let design = CollectionLoopDesign::reference(n).unwrap();
    let squid = SquidParams::beta_l_one(design.ic, bias).unwrap();
    (tree, design, squid)
}

#[test]
fn binary_and_dynamical_agree_at_extremes() {
    let cfg = DynamicalConfig::default();
    for (n, h, bias) in [(2u64, 2u32, 0.7), (3, 2, 0.9), (4, 1, 0.8), (2, 3, 0.6)] {
        let (tree, design, squid) = dynamical_setup(n, h, bias);
        let leaves = tree.leaf_count();
        let all: Vec<usize> = (0..leaves).collect();
        let full = SynapseState::saturated(leaves, design.i_sat()).unwrap();
        let none = SynapseState::zeros(leaves, design.i_sat()).unwrap();
        let d_full = propagate_dynamical(&tree, &full, &design, &squid, &cfg).unwrap();
        let d_none = propagate_dynamical(&tree, &none, &design, &squid, &cfg).unwrap();
        assert_eq!(
            d_full.propagation.soma_fired,
            propagate_binary(&tree, &all).unwrap().soma_fired
        );
        assert_eq!(
            d_none.propagation.soma_fired,
            propagate_binary(&tree, &[]).unwrap().soma_fired
        );
        assert!(d_full
            .propagation
            .applied_flux
            .iter()
            .all(|&f| f <= 0.5 * (1.0 + 1e-12)));
    }
}

#[test]
fn soma_rate_monotone_in_each_leaf() {
    let cfg = DynamicalConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let trials: Vec<_> = (0..100)
        .map(|trial| {
            let n = rng.gen_range(2..=4u64);
            let h = rng.gen_range(1..=2u32);
            let bias = rng.gen_range(0.6..0.95);
            let i_sat = CollectionLoopDesign::<f64>::reference(n).unwrap().i_sat();
            let leaves = (n as usize).pow(h);
            let currents: Vec<f64> = (0..leaves).map(|_| rng.gen_range(0.0..=i_sat)).collect();
            let leaf = rng.gen_range(0..leaves);
            let raised = rng.gen_range(currents[leaf]..=i_sat);
            (trial, n, h, bias, currents, leaf, raised)
        })
        .collect();
    trials
        .into_par_iter()
        .for_each(|(trial, n, h, bias, currents, leaf, raised)| {
            let (tree, design, squid) = dynamical_setup(n, h, bias);
            let base = SynapseState::analog(currents, design.i_sat()).unwrap();
            let mut bumped = base.clone();
            bumped.set_current(leaf, raised).unwrap();
            let before = propagate_dynamical(&tree, &base, &design, &squid, &cfg).unwrap().r_fq[0];
            let after = propagate_dynamical(&tree, &bumped, &design, &squid, &cfg).unwrap().r_fq[0];
            assert!(after >= before - 1e-6, "trial {trial}: {before} -> {after}");
        });
}

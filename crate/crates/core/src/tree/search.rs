use itertools::Itertools;
use serde::Serialize;

use super::DendriticTree;
use crate::error::{Error, Result};
use crate::fanin::point_activity_fraction;
use crate::Scalar;

/// Exhaustive search refuses trees with more leaves than this.
pub const EXHAUSTIVE_LEAF_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Every leaf subset, smallest first.
    Exhaustive,
    /// `p^H` leaves packed into the first `p` subtrees at every level.
    Constructive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinActive {
    pub count: usize,
    /// Leaf indices, ascending.
    pub witness: Vec<usize>,
}

/// Minimum number of saturated synapses that fires the soma.
///
/// Exhaustive mode enumerates subsets in order of size and, within a size,
/// lexicographically; the first firing subset is returned. Constructive mode
/// returns the clustered `p^H` witness without searching.
pub fn min_active_synapses<T: Scalar>(tree: &DendriticTree<T>, mode: SearchMode) -> Result<MinActive> {
    let unreachable = || Error::Unreachable {
        fraction: point_activity_fraction(tree.bias()).as_f64(),
    };
    match mode {
        SearchMode::Exhaustive => {
            let leaves = tree.leaf_count();
            if leaves > EXHAUSTIVE_LEAF_LIMIT {
                return Err(Error::Capacity(format!(
                    "exhaustive search supports at most {EXHAUSTIVE_LEAF_LIMIT} leaves, tree has {leaves}; use constructive mode"
                )));
            }
            let mut mask = vec![false; leaves];
            let mut scratch = Vec::new();
            for size in 0..=leaves {
                for subset in (0..leaves).combinations(size) {
                    mask.fill(false);
                    for &leaf in &subset {
                        mask[leaf] = true;
                    }
                    if tree.soma_fires(&mask, &mut scratch) {
                        return Ok(MinActive {
                            count: size,
                            witness: subset,
                        });
                    }
                }
            }
            Err(unreachable())
        }
        SearchMode::Constructive => {
            let p = tree.inputs_to_fire().ok_or_else(unreachable)? as usize;
            let n = tree.n();
            let h = tree.h_depth();
            // Leaf j fires along its path iff every base-n digit is below p.
            let witness: Vec<usize> = (0..tree.leaf_count())
                .filter(|&j| {
                    let mut rest = j;
                    (0..h).all(|_| {
                        let digit = rest % n;
                        rest /= n;
                        digit < p
                    })
                })
                .collect();
            Ok(MinActive {
                count: witness.len(),
                witness,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fanin::BiasPoint;
    use crate::tree::{build_tree, propagate_binary};

    fn bias_for_p(p: usize, n: usize) -> f64 {
        BiasPoint::<f64>::for_fraction((p as f64 - 0.5) / n as f64)
            .unwrap()
            .ratio()
    }

    #[test]
    fn all_leaves_needed_when_p_equals_n() {
        let t = build_tree(2, 3, bias_for_p(2, 2)).unwrap();
        let m = min_active_synapses(&t, SearchMode::Exhaustive).unwrap();
        assert_eq!(m.count, 8);
        assert_eq!(m.witness, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn single_leaf_when_p_is_one() {
        let t = build_tree(2, 3, bias_for_p(1, 2)).unwrap();
        let m = min_active_synapses(&t, SearchMode::Exhaustive).unwrap();
        assert_eq!(m.count, 1);
        assert_eq!(m.witness, vec![0]);
    }

    #[test]
    fn point_neuron_at_typical_bias() {
        for n in 1..=12u64 {
            let t = build_tree(n, 1, 0.7).unwrap();
            let m = min_active_synapses(&t, SearchMode::Exhaustive).unwrap();
            let expected = (0.545_494_f64 * n as f64).ceil() as usize;
            assert_eq!(m.count, expected, "n = {n}");
        }
    }

    #[test]
    fn constructive_witness_fires_with_p_per_level() {
        let t = build_tree(3, 3, 0.7).unwrap();
        let m = min_active_synapses(&t, SearchMode::Constructive).unwrap();
        assert_eq!(m.count, 8);
        let r = propagate_binary(&t, &m.witness).unwrap();
        assert!(r.soma_fired);
        for h in 0..=3 {
            let fired = t.level(h).filter(|&i| r.fired[i]).count();
            assert_eq!(fired, 2usize.pow(h));
        }
    }

    #[test]
    fn capacity_and_unreachable() {
        let t = build_tree(5, 2, 0.7).unwrap();
        assert!(matches!(
            min_active_synapses(&t, SearchMode::Exhaustive),
            Err(Error::Capacity(_))
        ));
        let low = build_tree(2, 2, 0.2).unwrap();
        for mode in [SearchMode::Exhaustive, SearchMode::Constructive] {
            assert!(matches!(
                min_active_synapses(&low, mode),
                Err(Error::Unreachable { .. })
            ));
        }
    }
}

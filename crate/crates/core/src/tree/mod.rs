//! Homogeneous dendritic trees.
//!
//! Nodes are stored level by level: the soma is node 0, the children of
//! node `i` are `n·i + 1 ..= n·i + n`, and the `N = n^H` synapses (leaves)
//! occupy the last `N` slots. Leaf indices passed to and returned from this
//! module are positions within the leaf level, `0..N`.

mod dynamical;
mod search;
mod snapshot;

pub use dynamical::{propagate_dynamical, DynamicalConfig, DynamicalResult, SynapseState};
pub use search::{min_active_synapses, MinActive, SearchMode, EXHAUSTIVE_LEAF_LIMIT};
pub use snapshot::{NodeSnapshot, TreeSnapshot};

use std::ops::Range;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fanin::{activity_result, BiasPoint, TreeTopology};
use crate::Scalar;

/// Largest node table [`build_tree`] will allocate.
pub const MAX_NODES: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Node {
    pub level: u32,
    pub parent: Option<usize>,
    /// Empty for leaves.
    pub children: Range<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DendriticTree<T> {
    topology: TreeTopology,
    bias: BiasPoint<T>,
    nodes: Vec<Node>,
    level_start: Vec<usize>,
}

/// Builds the complete `n`-ary tree of depth `h_depth` with one bias for
/// every node.
pub fn build_tree<T: Scalar>(n: u64, h_depth: u32, bias_ratio: T) -> Result<DendriticTree<T>> {
    let topology = TreeTopology::new(n, h_depth)?;
    let bias = BiasPoint::new(bias_ratio)?;
    let count = topology.node_count()?;
    if count > MAX_NODES {
        return Err(Error::Capacity(format!(
            "{count} nodes exceeds the limit of {MAX_NODES}"
        )));
    }
    let count = count as usize;
    let n = n as usize;
    let mut level_start = Vec::with_capacity(h_depth as usize + 2);
    let mut start = 0usize;
    for h in 0..=h_depth {
        level_start.push(start);
        start += n.pow(h);
    }
    level_start.push(start);

    let leaf_start = level_start[h_depth as usize];
    let mut nodes = Vec::with_capacity(count);
    for h in 0..=h_depth {
        for i in level_start[h as usize]..level_start[h as usize + 1] {
            let parent = (i > 0).then(|| (i - 1) / n);
            let children = if i < leaf_start { n * i + 1..n * i + n + 1 } else { 0..0 };
            nodes.push(Node {
                level: h,
                parent,
                children,
            });
        }
    }
    Ok(DendriticTree {
        topology,
        bias,
        nodes,
        level_start,
    })
}

impl<T: Scalar> DendriticTree<T> {
    pub fn topology(&self) -> &TreeTopology {
        &self.topology
    }

    pub fn bias(&self) -> BiasPoint<T> {
        self.bias
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn n(&self) -> usize {
        self.topology.n() as usize
    }

    pub fn h_depth(&self) -> u32 {
        self.topology.h_depth()
    }

    /// Node indices at level `h`.
    pub fn level(&self, h: u32) -> Range<usize> {
        self.level_start[h as usize]..self.level_start[h as usize + 1]
    }

    pub fn leaves(&self) -> Range<usize> {
        self.level(self.h_depth())
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().len()
    }

    /// Intermediate dendrites (levels `1..H`).
    pub fn dendrite_count(&self) -> usize {
        self.node_count() - 1 - self.leaf_count()
    }

    /// Active inputs a node needs, `ceil(n·f)`, or `None` when unreachable.
    pub fn inputs_to_fire(&self) -> Option<u64> {
        activity_result(self.bias, self.topology.n()).p_integer
    }

    /// Flux at which a dendrite or the soma fires, in `Φ0`. Rounded up to
    /// the next whole multiple of the per-input quota so that the comparison
    /// agrees with integer input counts.
    pub fn threshold_flux(&self) -> Option<T> {
        self.inputs_to_fire().map(|p| self.flux_of(p as usize))
    }

    fn flux_of(&self, saturated_inputs: usize) -> T {
        T::from_count(saturated_inputs as u64) / (T::lit(2.0) * T::from_count(self.topology.n()))
    }

    fn leaf_mask(&self, active_leaves: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.leaf_count()];
        for &leaf in active_leaves {
            *mask
                .get_mut(leaf)
                .ok_or_else(|| invalid(format!("leaf {leaf} out of range 0..{}", self.leaf_count())))? = true;
        }
        Ok(mask)
    }

    /// Soma outcome for a leaf mask, without building the full result.
    pub(crate) fn soma_fires(&self, mask: &[bool], scratch: &mut Vec<bool>) -> bool {
        let Some(p) = self.inputs_to_fire() else {
            return false;
        };
        let p = p as usize;
        let n = self.n();
        let mut below: Vec<bool> = std::mem::take(scratch);
        below.clear();
        below.extend_from_slice(mask);
        let mut above = Vec::with_capacity(below.len() / n);
        for _ in 0..self.h_depth() {
            above.clear();
            above.extend(below.chunks(n).map(|kids| kids.iter().filter(|&&a| a).count() >= p));
            std::mem::swap(&mut above, &mut below);
        }
        let fired = below[0];
        *scratch = below;
        fired
    }
}

/// Per-node outcome of a propagation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagationResult<T> {
    /// Applied flux in `Φ0`. Leaves carry no SQUID and report zero.
    pub applied_flux: Vec<T>,
    /// For leaves: the synapse is active.
    pub fired: Vec<bool>,
    pub soma_fired: bool,
}

/// Binary threshold cascade: a saturated child contributes `Φ0/(2n)` to its
/// parent, an inactive one nothing, and a node fires once its flux reaches
/// [`DendriticTree::threshold_flux`].
pub fn propagate_binary<T: Scalar>(tree: &DendriticTree<T>, active_leaves: &[usize]) -> Result<PropagationResult<T>> {
    let mask = tree.leaf_mask(active_leaves)?;
    let total = tree.node_count();
    let mut applied_flux = vec![T::zero(); total];
    let mut fired = vec![false; total];
    let leaves = tree.leaves();
    for (slot, &m) in fired[leaves.clone()].iter_mut().zip(&mask) {
        *slot = m;
    }
    let threshold = tree.threshold_flux();
    for i in (0..leaves.start).rev() {
        let count = tree.nodes[i].children.clone().filter(|&c| fired[c]).count();
        let flux = tree.flux_of(count);
        applied_flux[i] = flux;
        fired[i] = threshold.is_some_and(|th| flux >= th);
    }
    Ok(PropagationResult {
        soma_fired: fired[0],
        applied_flux,
        fired,
    })
}

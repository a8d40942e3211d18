use serde::Serialize;

use super::{DendriticTree, DynamicalResult, PropagationResult};
use crate::fanin::TreeTopology;
use crate::Scalar;

/// JSON view of a tree and one propagation over it.
///
/// ```json
/// {
///   "topology": {"n": 2, "h_depth": 1, "n_synapses": 2},
///   "bias_ratio": 0.7,
///   "soma_fired": true,
///   "nodes": [{"index": 0, "level": 0, "parent": null,
///              "applied_flux": 0.5, "fired": true, "r_fq": 0.35}, ...]
/// }
/// ```
///
/// `r_fq` is omitted for binary propagations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeSnapshot {
    pub topology: TreeTopology,
    pub bias_ratio: f64,
    pub soma_fired: bool,
    pub nodes: Vec<NodeSnapshot>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeSnapshot {
    pub index: usize,
    pub level: u32,
    pub parent: Option<usize>,
    pub applied_flux: f64,
    pub fired: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_fq: Option<f64>,
}

impl TreeSnapshot {
    pub fn binary<T: Scalar>(tree: &DendriticTree<T>, result: &PropagationResult<T>) -> Self {
        Self::build(tree, result, None)
    }

    pub fn dynamical<T: Scalar>(tree: &DendriticTree<T>, result: &DynamicalResult<T>) -> Self {
        Self::build(tree, &result.propagation, Some(&result.r_fq))
    }

    fn build<T: Scalar>(tree: &DendriticTree<T>, result: &PropagationResult<T>, r_fq: Option<&[T]>) -> Self {
        let nodes = tree
            .nodes()
            .iter()
            .enumerate()
            .map(|(index, node)| NodeSnapshot {
                index,
                level: node.level,
                parent: node.parent,
                applied_flux: result.applied_flux[index].as_f64(),
                fired: result.fired[index],
                r_fq: r_fq.map(|r| r[index].as_f64()),
            })
            .collect();
        Self {
            topology: *tree.topology(),
            bias_ratio: tree.bias().ratio().as_f64(),
            soma_fired: result.soma_fired,
            nodes,
        }
    }
}

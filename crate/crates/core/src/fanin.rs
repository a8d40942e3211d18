//! Closed-form activity fractions for point neurons and homogeneous
//! dendritic trees.
//!
//! Every node of the tree is a SQUID whose total input is capped at `Φ0/2`.
//! With `n` equally weighted inputs, one saturated input supplies `Φ0/(2n)`
//! and a node reaches threshold once a fraction
//! `f = (3π+2)/(2π) · (1 − Ib/Ic)` of its inputs is saturated. Stacking `H`
//! levels multiplies these fractions, so the neuron needs `f^H` of its
//! synapses.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::activity_prefactor;
use crate::Scalar;

/// Homogeneous tree shape: fan-in `n` at every node, depth `H`, `N = n^H`
/// synapses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeTopology {
    n: u64,
    h_depth: u32,
    n_synapses: u64,
}

impl TreeTopology {
    pub fn new(n: u64, h_depth: u32) -> Result<Self> {
        if n == 0 {
            return Err(invalid("fan-in factor must be at least 1"));
        }
        if h_depth == 0 {
            return Err(invalid("tree depth must be at least 1"));
        }
        let n_synapses = n
            .checked_pow(h_depth)
            .ok_or_else(|| Error::Capacity(format!("{n}^{h_depth} synapses overflows u64")))?;
        Ok(Self { n, h_depth, n_synapses })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn h_depth(&self) -> u32 {
        self.h_depth
    }

    pub fn n_synapses(&self) -> u64 {
        self.n_synapses
    }

    /// Number of nodes at level `h` (soma is level 0).
    pub fn level_size(&self, h: u32) -> u64 {
        self.n.pow(h)
    }

    /// Total node count `Σ_{h=0}^{H} n^h`, overflow-checked.
    pub fn node_count(&self) -> Result<u64> {
        (0..=self.h_depth).try_fold(0u64, |acc, h| {
            self.n
                .checked_pow(h)
                .and_then(|c| acc.checked_add(c))
                .ok_or_else(|| Error::Capacity("node count overflows u64".into()))
        })
    }

    /// Intermediate dendrites, `Σ_{h=1}^{H-1} n^h`.
    pub fn dendrite_count(&self) -> u64 {
        (1..self.h_depth).map(|h| self.n.pow(h)).sum()
    }
}

/// Normalized bias `Ib/Ic` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BiasPoint<T>(T);

impl<T: Scalar> BiasPoint<T> {
    pub fn new(bias_ratio: T) -> Result<Self> {
        if !(bias_ratio >= T::zero() && bias_ratio <= T::one()) {
            return Err(invalid(format!("bias ratio {bias_ratio} outside [0, 1]")));
        }
        Ok(Self(bias_ratio))
    }

    /// Bias at which a single node needs exactly the fraction `f` of its
    /// inputs. Inverse of [`point_activity_fraction`].
    pub fn for_fraction(f: T) -> Result<Self> {
        Self::new(T::one() - f / activity_prefactor::<T>())
    }

    pub fn ratio(&self) -> T {
        self.0
    }
}

/// Activity fraction of a single node together with its integer input count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActivityResult<T> {
    pub fraction_continuous: T,
    /// `ceil(n·f)` when reachable.
    pub p_integer: Option<u64>,
    pub reachable: bool,
}

/// Flux supplied by one maximally weighted input, in units of `Φ0`.
pub fn synapse_flux_quota<T: Scalar>(tree: &TreeTopology) -> T {
    T::one() / (T::lit(2.0) * T::from_count(tree.n()))
}

/// Fraction of saturated inputs a single SQUID node needs to reach
/// threshold. Values above 1 mean the node can never fire.
pub fn point_activity_fraction<T: Scalar>(bias: BiasPoint<T>) -> T {
    activity_prefactor::<T>() * (T::one() - bias.ratio())
}

/// Fraction of all synapses needed at depth `h_depth`, `f^H`.
pub fn tree_activity_fraction<T: Scalar>(bias: BiasPoint<T>, h_depth: u32) -> T {
    point_activity_fraction(bias).powi(h_depth as i32)
}

/// Bias below which a point neuron cannot fire even with every input
/// saturated: `1 − 2π/(3π+2)`.
pub fn unreachable_bias_boundary<T: Scalar>() -> T {
    T::one() - T::one() / activity_prefactor::<T>()
}

/// Per-node activity with integer rounding. `ceil` guarantees the count
/// reaches (or exceeds) threshold.
pub fn activity_result<T: Scalar>(bias: BiasPoint<T>, n: u64) -> ActivityResult<T> {
    let f = point_activity_fraction(bias);
    let reachable = f <= T::one();
    let p_integer = reachable.then(|| min_inputs(f, n));
    ActivityResult {
        fraction_continuous: f,
        p_integer,
        reachable,
    }
}

/// `ceil(n·f)` clamped into `[0, n]`.
pub(crate) fn min_inputs<T: Scalar>(f: T, n: u64) -> u64 {
    let p = (T::from_count(n) * f).ceil();
    p.to_u64().unwrap_or(0).min(n)
}

/// Fraction of all units (synapses, dendrites, soma) active at threshold:
/// `Σ p^h / Σ n^h` over `h = 0..=H`.
///
/// In integer mode `p = ceil(n·f)` and an unreachable bias is an error; in
/// continuous mode `p = n·f` and the ratio is returned as is.
pub fn total_unit_fraction<T: Scalar>(bias: BiasPoint<T>, tree: &TreeTopology, integer_mode: bool) -> Result<T> {
    let f = point_activity_fraction(bias);
    let n = T::from_count(tree.n());
    let p = if integer_mode {
        if f > T::one() {
            return Err(Error::Unreachable { fraction: f.as_f64() });
        }
        T::from_count(min_inputs(f, tree.n()))
    } else {
        n * f
    };
    let geometric = |base: T| (0..=tree.h_depth()).map(|h| base.powi(h as i32)).sum::<T>();
    Ok(geometric(p) / geometric(n))
}

/// Result of solving `n^H = N` for the fan-in factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeGeometry<T> {
    /// `N^(1/H)` as a real number.
    pub n_real: T,
    /// True when an integer `n` with `n^H = N` exists.
    pub exact: bool,
    /// Integer fan-in: the exact root, or the nearest integer otherwise.
    pub topology: TreeTopology,
    /// `Σ_{h=1}^{H-1} n^h` for the integer fan-in.
    pub dendrite_count: u64,
    /// The same sum evaluated at the real-valued `n`.
    pub dendrite_count_real: T,
}

/// Fan-in factor and intermediate dendrite count for `N` synapses at depth
/// `H`. Non-integral cases are reported with `exact = false` rather than
/// rejected.
pub fn tree_geometry<T: Scalar>(n_synapses: u64, h_depth: u32) -> Result<TreeGeometry<T>> {
    if n_synapses == 0 {
        return Err(invalid("synapse count must be at least 1"));
    }
    if h_depth == 0 {
        return Err(invalid("tree depth must be at least 1"));
    }
    let n_real = T::from_count(n_synapses).powf(T::one() / T::from_u32(h_depth).unwrap());
    let guess = (n_synapses as f64).powf(1.0 / f64::from(h_depth)).round() as u64;
    let exact_root = (guess.saturating_sub(1)..=guess + 1)
        .filter(|&c| c >= 1)
        .find(|&c| c.checked_pow(h_depth) == Some(n_synapses));
    let (n_int, exact) = match exact_root {
        Some(c) => (c, true),
        None => (guess.max(1), false),
    };
    let topology = TreeTopology::new(n_int, h_depth)?;
    let dendrite_count_real = (1..h_depth).map(|h| n_real.powi(h as i32)).sum::<T>();
    Ok(TreeGeometry {
        n_real,
        exact,
        topology,
        dendrite_count: topology.dendrite_count(),
        dendrite_count_real,
    })
}

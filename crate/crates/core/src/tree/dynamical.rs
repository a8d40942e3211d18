use serde::Serialize;

use super::{DendriticTree, PropagationResult};
use crate::error::{invalid, Error, Result};
use crate::inductance::{applied_flux_collection, CollectionLoopDesign};
use crate::squid::{simulate_rfq, SimConfig, SquidParams};
use crate::Scalar;

/// Synaptic drive at the leaves.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SynapseState<T> {
    /// Saturated or silent.
    Binary(Vec<bool>),
    /// DI-loop currents in amperes, each within `[0, i_sat]`. With `tau`
    /// set, [`SynapseState::decay`] leaks the currents exponentially.
    Analog { currents: Vec<T>, i_sat: T, tau: Option<T> },
}

impl<T: Scalar> SynapseState<T> {
    pub fn analog(currents: Vec<T>, i_sat: T) -> Result<Self> {
        if !(i_sat > T::zero()) {
            return Err(invalid(format!("i_sat must be positive, got {i_sat}")));
        }
        for &c in &currents {
            check_current(c, i_sat)?;
        }
        Ok(Self::Analog {
            currents,
            i_sat,
            tau: None,
        })
    }

    pub fn zeros(leaves: usize, i_sat: T) -> Result<Self> {
        Self::analog(vec![T::zero(); leaves], i_sat)
    }

    pub fn saturated(leaves: usize, i_sat: T) -> Result<Self> {
        Self::analog(vec![i_sat; leaves], i_sat)
    }

    pub fn with_leak(self, tau: T) -> Result<Self> {
        if !(tau > T::zero()) {
            return Err(invalid(format!("leak time constant must be positive, got {tau}")));
        }
        match self {
            Self::Analog { currents, i_sat, .. } => Ok(Self::Analog {
                currents,
                i_sat,
                tau: Some(tau),
            }),
            Self::Binary(_) => Err(invalid("leak applies to analog synapses only")),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Binary(m) => m.len(),
            Self::Analog { currents, .. } => currents.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sets one DI current; values above `i_sat` are rejected.
    pub fn set_current(&mut self, leaf: usize, current: T) -> Result<()> {
        match self {
            Self::Analog { currents, i_sat, .. } => {
                check_current(current, *i_sat)?;
                let slot = currents
                    .get_mut(leaf)
                    .ok_or_else(|| invalid(format!("leaf {leaf} out of range")))?;
                *slot = current;
                Ok(())
            }
            Self::Binary(_) => Err(invalid("binary synapses carry no current")),
        }
    }

    /// Adds current to one DI loop, clipping at saturation.
    pub fn inject(&mut self, leaf: usize, delta: T) -> Result<()> {
        match self {
            Self::Analog { currents, i_sat, .. } => {
                let slot = currents
                    .get_mut(leaf)
                    .ok_or_else(|| invalid(format!("leaf {leaf} out of range")))?;
                *slot = (*slot + delta).max(T::zero()).min(*i_sat);
                Ok(())
            }
            Self::Binary(_) => Err(invalid("binary synapses carry no current")),
        }
    }

    /// Exponential leak over `dt`; no-op without a time constant.
    pub fn decay(&mut self, dt: T) {
        if let Self::Analog {
            currents,
            tau: Some(tau),
            ..
        } = self
        {
            let factor = (-dt / *tau).exp();
            for c in currents.iter_mut() {
                *c *= factor;
            }
        }
    }

    fn currents(&self, i_sat: T) -> Vec<T> {
        match self {
            Self::Binary(mask) => mask.iter().map(|&a| if a { i_sat } else { T::zero() }).collect(),
            Self::Analog { currents, .. } => currents.clone(),
        }
    }
}

fn check_current<T: Scalar>(current: T, i_sat: T) -> Result<()> {
    if current < T::zero() || !current.is_finite() {
        return Err(invalid(format!("DI current must be non-negative, got {current}")));
    }
    if current > i_sat {
        return Err(Error::Saturation {
            current: current.as_f64(),
            i_sat: i_sat.as_f64(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DynamicalConfig<T> {
    /// Steady-state DI current per unit fluxon rate. `None` picks the gain
    /// that maps the rate at `phi_max` exactly onto `i_sat`.
    pub gain: Option<T>,
    pub sim: SimConfig<T>,
}

impl<T: Scalar> Default for DynamicalConfig<T> {
    fn default() -> Self {
        Self {
            gain: None,
            sim: SimConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicalResult<T> {
    pub propagation: PropagationResult<T>,
    /// Fluxon rate per node; zero for leaves.
    pub r_fq: Vec<T>,
    /// Steady-state output current of each node (DI current for leaves).
    pub output_current: Vec<T>,
    pub gain: T,
}

/// Steady-state propagation with a simulated SQUID at every dendrite and
/// the soma.
///
/// Working from the deepest dendrites to the soma, each node's applied flux
/// comes from its children's currents through `design`, its rate from
/// [`simulate_rfq`], and its own output current is `min(gain·r_fq, i_sat)`.
/// A node fires when its rate is nonzero. The SQUID bias is taken from the
/// tree.
pub fn propagate_dynamical<T: Scalar>(
    tree: &DendriticTree<T>,
    leaf_state: &SynapseState<T>,
    design: &CollectionLoopDesign<T>,
    squid: &SquidParams<T>,
    cfg: &DynamicalConfig<T>,
) -> Result<DynamicalResult<T>> {
    if design.n != tree.topology().n() {
        return Err(invalid(format!(
            "design fan-in {} does not match tree fan-in {}",
            design.n,
            tree.topology().n()
        )));
    }
    design.check_flux_cap()?;
    if leaf_state.len() != tree.leaf_count() {
        return Err(invalid(format!(
            "expected {} synapses, got {}",
            tree.leaf_count(),
            leaf_state.len()
        )));
    }
    let i_sat = design.i_sat();
    if let SynapseState::Analog { i_sat: s, currents, .. } = leaf_state {
        for &c in currents {
            check_current(c, i_sat.min(*s))?;
        }
    }
    let squid = squid.with_bias(tree.bias().ratio())?;
    let gain = match cfg.gain {
        Some(g) if g > T::zero() => g,
        Some(g) => return Err(invalid(format!("gain must be positive, got {g}"))),
        None => {
            let r_max = simulate_rfq(&squid, design.phi_max, &cfg.sim)?;
            if r_max == T::zero() {
                // The SQUID never switches at this bias; any gain gives zero output.
                T::one()
            } else {
                i_sat / r_max
            }
        }
    };

    let total = tree.node_count();
    let leaves = tree.leaves();
    let mut output = vec![T::zero(); total];
    output[leaves.clone()].copy_from_slice(&leaf_state.currents(i_sat));
    let mut applied_flux = vec![T::zero(); total];
    let mut r_fq = vec![T::zero(); total];
    let mut fired = vec![false; total];
    for (i, leaf) in leaves.clone().enumerate() {
        fired[leaf] = output[leaves.start + i] > T::zero();
    }

    for h in (0..tree.h_depth()).rev() {
        for i in tree.level(h) {
            let children = tree.nodes()[i].children.clone();
            let flux = applied_flux_collection(design, &output[children])?;
            let rate = simulate_rfq(&squid, flux, &cfg.sim)?;
            applied_flux[i] = flux;
            r_fq[i] = rate;
            fired[i] = rate > T::zero();
            output[i] = (gain * rate).min(i_sat);
        }
    }

    Ok(DynamicalResult {
        propagation: PropagationResult {
            soma_fired: fired[0],
            applied_flux,
            fired,
        },
        r_fq,
        output_current: output,
        gain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::build_tree;

    fn setup(n: u64, h: u32, bias: f64) -> (DendriticTree<f64>, CollectionLoopDesign<f64>, SquidParams<f64>) {
        let tree = build_tree(n, h, bias).unwrap();
        let design = CollectionLoopDesign::reference(n).unwrap();
        let squid = SquidParams::beta_l_one(design.ic, bias).unwrap();
        (tree, design, squid)
    }

    #[test]
    fn silent_inputs_give_silent_tree() {
        let (tree, design, squid) = setup(2, 2, 0.7);
        let state = SynapseState::zeros(4, design.i_sat()).unwrap();
        let r = propagate_dynamical(&tree, &state, &design, &squid, &DynamicalConfig::default()).unwrap();
        assert!(r.propagation.applied_flux.iter().all(|&f| f == 0.0));
        assert!(r.r_fq.iter().all(|&f| f == 0.0));
        assert!(!r.propagation.soma_fired);
    }

    #[test]
    fn saturated_inputs_reach_the_cap_everywhere() {
        let (tree, design, squid) = setup(3, 2, 0.7);
        let state = SynapseState::saturated(9, design.i_sat()).unwrap();
        let cfg = DynamicalConfig::default();
        let r = propagate_dynamical(&tree, &state, &design, &squid, &cfg).unwrap();
        let peak = simulate_rfq(&squid, 0.5, &cfg.sim).unwrap();
        for i in 0..tree.leaves().start {
            assert!((r.propagation.applied_flux[i] - 0.5).abs() < 1e-9);
            assert!((r.r_fq[i] - peak).abs() < 1e-9);
        }
        assert!(r.propagation.soma_fired);
    }

    #[test]
    fn rejects_mismatched_design() {
        let (tree, _, squid) = setup(2, 2, 0.7);
        let other = CollectionLoopDesign::reference(3).unwrap();
        let state = SynapseState::zeros(4, other.i_sat()).unwrap();
        assert!(propagate_dynamical(&tree, &state, &other, &squid, &DynamicalConfig::default()).is_err());

        let mut bad = CollectionLoopDesign::reference(2).unwrap();
        bad.l_di2 *= 2.0;
        assert!(matches!(
            propagate_dynamical(&tree, &state, &bad, &squid, &DynamicalConfig::default()),
            Err(Error::ConstraintViolation { .. })
        ));
    }

    #[test]
    fn synapse_state_limits() {
        assert!(matches!(
            SynapseState::analog(vec![0.0, 2.0], 1.0),
            Err(Error::Saturation { .. })
        ));
        let mut s = SynapseState::analog(vec![0.2, 0.9], 1.0).unwrap();
        s.inject(1, 0.5).unwrap();
        s.set_current(0, 0.4).unwrap();
        assert!(s.set_current(0, 1.5).is_err());
        let mut s = s.with_leak(10.0).unwrap();
        s.decay(10.0);
        match s {
            SynapseState::Analog { currents, .. } => {
                assert!((currents[0] - 0.4 * (-1.0f64).exp()).abs() < 1e-15);
                assert!((currents[1] - (-1.0f64).exp()).abs() < 1e-15);
            }
            SynapseState::Binary(_) => unreachable!(),
        }
    }
}

//! Inductance and critical-current constraints that keep every SQUID on the
//! monotonic half of its response.
//!
//! Two circuit families are covered. With a collection (DC) loop, `n`
//! integration (DI) loops couple through `M^dc|di` into a shared collection
//! loop, which couples through `M^dr|dc` into the receiving (DR) SQUID.
//! Without a collection loop each DI loop couples directly into a segment of
//! the SQUID washer. In both cases the designed quantity is `L^di2`, the
//! output coil of each DI loop, chosen so that all inputs at saturation apply
//! exactly `phi_max` to the SQUID.
//!
//! All quantities are SI (henries, amperes); flux is reported in units of
//! `Φ0`.

use serde::{Deserialize, Serialize};

use crate::constants::phi0;
use crate::error::{invalid, Error, Result};
use crate::scalar::total_inductance_factor;
use crate::Scalar;

/// DI output coils below this inductance are flagged as hard to fabricate.
pub const MIN_FABRICABLE_INDUCTANCE: f64 = 0.1e-12;

/// Relative tolerance used when checking that a design meets the flux cap.
pub const CONSTRAINT_RTOL: f64 = 1e-9;

/// Receiving-loop inductances of a `β_L = 1` SQUID.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DrLoopSpec<T> {
    pub ic: T,
    /// Geometric washer inductance `Φ0/(2 Ic)`.
    pub l_washer: T,
    /// Washer plus both junction inductances near threshold,
    /// `(Φ0/Ic)·(3π+2)/(4π)`.
    pub l_total: T,
}

pub fn size_squid<T: Scalar>(ic: T) -> Result<DrLoopSpec<T>> {
    if !(ic > T::zero()) || !ic.is_finite() {
        return Err(invalid(format!("critical current must be positive, got {ic}")));
    }
    let phi0 = phi0::<T>();
    Ok(DrLoopSpec {
        ic,
        l_washer: phi0 / (T::lit(2.0) * ic),
        l_total: phi0 / ic * total_inductance_factor::<T>(),
    })
}

/// Circuit with a collection loop. Field names follow the loop labels: `di`
/// integration, `dc` collection, `dr` receiving.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectionLoopDesign<T> {
    /// Junction critical current shared by all loops.
    pub ic: T,
    /// Number of inputs to the node.
    pub n: u64,
    /// Per-input washer in the collection loop.
    pub l_dc1: T,
    /// Parasitic collection inductance as a fraction of `l_dc3`.
    pub alpha: T,
    /// Collection-loop output coil.
    pub l_dc3: T,
    pub k1: T,
    pub k2: T,
    /// DI storage inductor.
    pub l_di1: T,
    /// DI output coil. Ignored by [`design_ldi2_collection`].
    #[serde(default)]
    pub l_di2: T,
    /// `I_sat = gamma · ic`.
    pub gamma: T,
    /// Flux cap in units of `Φ0`.
    pub phi_max: T,
}

impl<T: Scalar> CollectionLoopDesign<T> {
    /// Reference design: `Ic = 300 µA`, `L^dc1 = 10 pH`, `k1 = k2 = 0.5`,
    /// `γ = 1`, `L^dc3 = 100 pH`, `α = 0.05`, `L^di1 = 1 nH`, cap `Φ0/2`,
    /// with `L^di2` solved for `n`.
    pub fn reference(n: u64) -> Result<Self> {
        let base = Self {
            ic: T::lit(300e-6),
            n,
            l_dc1: T::lit(10e-12),
            alpha: T::lit(0.05),
            l_dc3: T::lit(100e-12),
            k1: T::lit(0.5),
            k2: T::lit(0.5),
            l_di1: T::lit(1e-9),
            l_di2: T::zero(),
            gamma: T::one(),
            phi_max: T::lit(0.5),
        };
        base.with_designed_l_di2()
    }

    pub fn i_sat(&self) -> T {
        self.gamma * self.ic
    }

    /// Validates everything except `l_di2`.
    pub fn validate_inputs(&self) -> Result<()> {
        let positive = [
            ("ic", self.ic),
            ("l_dc1", self.l_dc1),
            ("l_dc3", self.l_dc3),
            ("l_di1", self.l_di1),
            ("gamma", self.gamma),
        ];
        for (name, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.n == 0 {
            return Err(invalid("fan-in n must be at least 1"));
        }
        if !(self.alpha >= T::zero()) {
            return Err(invalid(format!("alpha must be non-negative, got {}", self.alpha)));
        }
        for (name, k) in [("k1", self.k1), ("k2", self.k2)] {
            if !(k > T::zero() && k <= T::one()) {
                return Err(invalid(format!("{name} must lie in (0, 1], got {k}")));
            }
        }
        if !(self.phi_max > T::zero() && self.phi_max <= T::lit(0.5)) {
            return Err(invalid(format!(
                "phi_max must lie in (0, 0.5] Φ0, got {}",
                self.phi_max
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_inputs()?;
        if !(self.l_di2 > T::zero()) || !self.l_di2.is_finite() {
            return Err(invalid(format!("l_di2 must be positive, got {}", self.l_di2)));
        }
        Ok(())
    }

    /// `L^dc_tot = n·L^dc1 + (1+α)·L^dc3`.
    pub fn l_dc_total(&self) -> T {
        T::from_count(self.n) * self.l_dc1 + (T::one() + self.alpha) * self.l_dc3
    }

    pub fn l_di_total(&self) -> T {
        self.l_di1 + self.l_di2
    }

    pub fn dr_loop(&self) -> Result<DrLoopSpec<T>> {
        size_squid(self.ic)
    }

    pub fn mutual_dc_di(&self) -> T {
        self.k1 * (self.l_di2 * self.l_dc1).sqrt()
    }

    pub fn mutual_dr_dc(&self) -> Result<T> {
        Ok(self.k2 * (self.l_dc3 * self.dr_loop()?.l_washer).sqrt())
    }

    /// Flux applied to the SQUID by one saturated input, in webers.
    pub fn flux_per_saturated_input(&self) -> Result<T> {
        Ok(self.mutual_dr_dc()? / self.l_dc_total() * self.mutual_dc_di() * self.i_sat())
    }

    /// Copy of the design with `l_di2` solved from the flux cap.
    pub fn with_designed_l_di2(mut self) -> Result<Self> {
        self.l_di2 = design_ldi2_collection(&self)?;
        Ok(self)
    }

    /// Checks that all-saturated inputs apply `phi_max` (relative
    /// [`CONSTRAINT_RTOL`]).
    pub fn check_flux_cap(&self) -> Result<()> {
        self.validate()?;
        let saturated = vec![self.i_sat(); self.n as usize];
        let flux = applied_flux_collection(self, &saturated)?;
        let rel = ((flux - self.phi_max) / self.phi_max).abs();
        if rel > T::lit(CONSTRAINT_RTOL) {
            return Err(Error::ConstraintViolation {
                flux: flux.as_f64(),
                phi_max: self.phi_max.as_f64(),
            });
        }
        Ok(())
    }
}

/// Flux applied to the receiving SQUID by the given DI currents, in units of
/// `Φ0`.
pub fn applied_flux_collection<T: Scalar>(design: &CollectionLoopDesign<T>, di_currents: &[T]) -> Result<T> {
    design.validate()?;
    if di_currents.len() as u64 != design.n {
        return Err(invalid(format!(
            "expected {} DI currents, got {}",
            design.n,
            di_currents.len()
        )));
    }
    let i_sat = design.i_sat();
    let mut total = T::zero();
    for &current in di_currents {
        if current < T::zero() {
            return Err(invalid(format!("DI current must be non-negative, got {current}")));
        }
        // Allow rounding at the saturation point.
        if current > i_sat * (T::one() + T::epsilon() * T::lit(4.0)) {
            return Err(Error::Saturation {
                current: current.as_f64(),
                i_sat: i_sat.as_f64(),
            });
        }
        total += current;
    }
    let coupling = design.mutual_dr_dc()? / design.l_dc_total() * design.mutual_dc_di();
    Ok(coupling * total / phi0::<T>())
}

/// `L^di2` that makes `n` saturated inputs apply exactly `phi_max`:
///
/// `L^di2 = (1/L^dr)·{ Φmax/(k1 k2 I_sat) · [ (L^dc1/L^dc3)^½ + (L^dc3/L^dc1)^½ (1+α)/n ] }²`
pub fn design_ldi2_collection<T: Scalar>(design: &CollectionLoopDesign<T>) -> Result<T> {
    design.validate_inputs()?;
    let l_dr = design.dr_loop()?.l_washer;
    let phi_max = design.phi_max * phi0::<T>();
    let ratio = design.l_dc1 / design.l_dc3;
    let bracket = ratio.sqrt() + ratio.recip().sqrt() * (T::one() + design.alpha) / T::from_count(design.n);
    let scale = phi_max / (design.k1 * design.k2 * design.i_sat()) * bracket;
    Ok(scale * scale / l_dr)
}

/// Large-`n` limit of [`design_ldi2_collection`]:
/// `(1/L^dr)·(Φmax/(k1 k2 I_sat))²·(L^dc1/L^dc3)`.
pub fn ldi2_collection_asymptote<T: Scalar>(design: &CollectionLoopDesign<T>) -> Result<T> {
    design.validate_inputs()?;
    let l_dr = design.dr_loop()?.l_washer;
    let scale = design.phi_max * phi0::<T>() / (design.k1 * design.k2 * design.i_sat());
    Ok(scale * scale * (design.l_dc1 / design.l_dc3) / l_dr)
}

/// Fraction `p/n` of saturated inputs that drives the receiving SQUID to
/// threshold, from the circuit: `p·Φ_in = L^dr_tot·(Ic − Ib)`.
pub fn threshold_fraction_circuit<T: Scalar>(design: &CollectionLoopDesign<T>, bias_ratio: T) -> Result<T> {
    if !(bias_ratio > T::zero() && bias_ratio < T::one()) {
        return Err(invalid(format!("bias ratio must lie in (0, 1), got {bias_ratio}")));
    }
    design.check_flux_cap()?;
    let l_total = design.dr_loop()?.l_total;
    let threshold_flux = l_total * (design.ic - bias_ratio * design.ic);
    let p = threshold_flux / design.flux_per_saturated_input()?;
    Ok(p / T::from_count(design.n))
}

/// Current induced in one DI loop when `p_active` sibling inputs sit at
/// saturation.
pub fn crosstalk_current<T: Scalar>(design: &CollectionLoopDesign<T>, p_active: u64) -> Result<T> {
    design.validate()?;
    if p_active > design.n {
        return Err(invalid(format!("p_active = {p_active} exceeds fan-in {}", design.n)));
    }
    let per_input = design.k1 * design.k1 * design.l_di2 * design.l_dc1 / (design.l_dc_total() * design.l_di_total())
        * design.i_sat();
    Ok(T::from_count(p_active) * per_input)
}

/// Advisory note for a designed inductance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityWarning {
    pub l_di2: f64,
    pub message: String,
}

/// Flags inductances below [`MIN_FABRICABLE_INDUCTANCE`].
pub fn feasibility<T: Scalar>(l_di2: T) -> Option<FeasibilityWarning> {
    let l = l_di2.as_f64();
    (l < MIN_FABRICABLE_INDUCTANCE).then(|| FeasibilityWarning {
        l_di2: l,
        message: format!(
            "l_di2 = {:.4} pH is below {:.1} pH and difficult to fabricate",
            l * 1e12,
            MIN_FABRICABLE_INDUCTANCE * 1e12
        ),
    })
}

/// Circuit without a collection loop: DI loops couple directly into `n`
/// segments of the SQUID washer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoCollectionDesign<T> {
    pub n: u64,
    pub k: T,
    /// Receiving SQUID junctions.
    pub ic_dr: T,
    /// Input-loop junctions; also the DI saturation current.
    pub ic_di: T,
    /// Per-input washer segment.
    pub l_dr1: T,
    #[serde(default)]
    pub sfq_mode: bool,
}

impl<T: Scalar> NoCollectionDesign<T> {
    /// Design with one `Ic` everywhere and the washer split evenly,
    /// `L^dr1 = Φ0/(2 n Ic)`.
    pub fn shared_ic(n: u64, k: T, ic: T) -> Result<Self> {
        let d = Self {
            n,
            k,
            ic_dr: ic,
            ic_di: ic,
            l_dr1: washer_segment(n, ic)?,
            sfq_mode: false,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("fan-in n must be at least 1"));
        }
        if !(self.k > T::zero() && self.k <= T::one()) {
            return Err(invalid(format!("k must lie in (0, 1], got {}", self.k)));
        }
        for (name, v) in [("ic_dr", self.ic_dr), ("ic_di", self.ic_di), ("l_dr1", self.l_dr1)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Washer segment per input when the `β_L = 1` washer `Φ0/(2 Ic)` is split
/// into `n` equal transformer primaries: `Φ0/(2 n Ic)`.
pub fn washer_segment<T: Scalar>(n: u64, ic_dr: T) -> Result<T> {
    if n == 0 {
        return Err(invalid("fan-in n must be at least 1"));
    }
    Ok(size_squid(ic_dr)?.l_washer / T::from_count(n))
}

/// General no-collection constraint: `L^di2 = (1/L^dr1)·(Φmax/(n k I_sat))²`
/// with `I_sat = ic_di`.
pub fn design_no_collection<T: Scalar>(design: &NoCollectionDesign<T>, phi_max: T) -> Result<T> {
    design.validate()?;
    if !(phi_max > T::zero() && phi_max <= T::lit(0.5)) {
        return Err(invalid(format!("phi_max must lie in (0, 0.5] Φ0, got {phi_max}")));
    }
    let scale = phi_max * phi0::<T>() / (T::from_count(design.n) * design.k * design.ic_di);
    Ok(scale * scale / design.l_dr1)
}

/// Closed form for a shared `Ic` and a cap of `Φ0/2`: `Φ0/(2 n k² Ic)`.
pub fn ldi2_no_collection_shared_ic<T: Scalar>(n: u64, k: T, ic: T) -> T {
    phi0::<T>() / (T::lit(2.0) * T::from_count(n) * k * k * ic)
}

/// Coupling at which a shared-`Ic` design stores exactly one flux quantum
/// per DI loop: `k = (2n)^(-1/2)`.
pub fn sfq_coupling<T: Scalar>(n: u64) -> Result<T> {
    if n == 0 {
        return Err(invalid("fan-in n must be at least 1"));
    }
    Ok((T::lit(2.0) * T::from_count(n)).sqrt().recip())
}

/// DI inductance for a single-flux-quantum loop, `Φ0/Ic`.
pub fn sfq_inductance<T: Scalar>(ic: T) -> T {
    phi0::<T>() / ic
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VaryIcResult<T> {
    pub l_di2: T,
    pub ic_di: T,
}

/// Separate junction currents for the DI and DR loops.
///
/// Outside SFQ mode `ic_di` is taken from the design and
/// `L^di2 = (Φ0/(2 n k²))·Ic^dr/(Ic^di)²`. In SFQ mode `ic_di` is set to
/// `Ic^dr/(n k²)` and `L^di2 = Φ0/Ic^di`; see [`sfq_consistency`] for how
/// that rule relates to the general constraint.
pub fn vary_ic_no_collection<T: Scalar>(design: &NoCollectionDesign<T>) -> Result<VaryIcResult<T>> {
    design.validate()?;
    let n = T::from_count(design.n);
    let k2 = design.k * design.k;
    if design.sfq_mode {
        let ic_di = design.ic_dr / (n * k2);
        Ok(VaryIcResult {
            l_di2: sfq_inductance(ic_di),
            ic_di,
        })
    } else {
        let l_di2 = phi0::<T>() / (T::lit(2.0) * n * k2) * design.ic_dr / (design.ic_di * design.ic_di);
        Ok(VaryIcResult {
            l_di2,
            ic_di: design.ic_di,
        })
    }
}

/// Compares the stated SFQ input-current rule with the one implied by the
/// general constraint.
///
/// Equating `Φ0/(2 n k²)·Ic^dr/(Ic^di)²` with `Φ0/Ic^di` gives
/// `Ic^di = Ic^dr/(2 n k²)`, half the value `Ic^dr/(n k²)` that
/// [`vary_ic_no_collection`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SfqConsistency<T> {
    pub n: u64,
    pub k: T,
    pub ic_dr: T,
    /// `Ic^dr/(n k²)`, the rule used in SFQ mode.
    pub ic_di_stated: T,
    /// `Ic^dr/(2 n k²)`, the value that satisfies both constraints.
    pub ic_di_consistent: T,
    /// `ic_di_stated / ic_di_consistent`; 2 for every input.
    pub ratio: T,
    /// General constraint evaluated at `ic_di_stated`.
    pub l_di2_constraint_at_stated: T,
    /// `Φ0/ic_di_stated`.
    pub l_di2_sfq_at_stated: T,
    pub consistent: bool,
}

pub fn sfq_consistency<T: Scalar>(n: u64, k: T, ic_dr: T) -> Result<SfqConsistency<T>> {
    let design = NoCollectionDesign {
        n,
        k,
        ic_dr,
        ic_di: ic_dr,
        l_dr1: washer_segment(n, ic_dr)?,
        sfq_mode: true,
    };
    let stated = vary_ic_no_collection(&design)?;
    let nk2 = T::from_count(n) * k * k;
    let ic_di_consistent = ic_dr / (T::lit(2.0) * nk2);
    let general = vary_ic_no_collection(&NoCollectionDesign {
        ic_di: stated.ic_di,
        sfq_mode: false,
        ..design
    })?;
    let ratio = stated.ic_di / ic_di_consistent;
    Ok(SfqConsistency {
        n,
        k,
        ic_dr,
        ic_di_stated: stated.ic_di,
        ic_di_consistent,
        ratio,
        l_di2_constraint_at_stated: general.l_di2,
        l_di2_sfq_at_stated: stated.l_di2,
        consistent: ((general.l_di2 - stated.l_di2) / stated.l_di2).abs() <= T::lit(CONSTRAINT_RTOL),
    })
}

/// Unit tag required in design configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Units {
    #[serde(rename = "SI")]
    Si,
}

/// JSON design configuration. Either section may be omitted.
///
/// ```json
/// {
///   "units": "SI",
///   "collection": { "ic": 3e-4, "n": 10, "l_dc1": 1e-11, "alpha": 0.05,
///                   "l_dc3": 1e-10, "k1": 0.5, "k2": 0.5, "l_di1": 1e-9,
///                   "gamma": 1.0, "phi_max": 0.5 },
///   "no_collection": { "n": 10, "k": 0.5, "ic_dr": 3e-4, "ic_di": 3e-4,
///                      "l_dr1": 3.446e-13 }
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfig<T> {
    pub units: Units,
    #[serde(default)]
    pub collection: Option<CollectionLoopDesign<T>>,
    #[serde(default)]
    pub no_collection: Option<NoCollectionDesign<T>>,
}

impl<T: Scalar> DesignConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if let Some(c) = &self.collection {
            c.validate_inputs()?;
        }
        if let Some(d) = &self.no_collection {
            d.validate()?;
        }
        Ok(())
    }
}

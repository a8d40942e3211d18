//! Phase dynamics of a symmetric two-junction SQUID and its flux-to-fluxon
//! rate response.
//!
//! Each junction is a resistively shunted junction carrying the bias `Ib`
//! plus or minus the circulating current `J`. In normalized units (currents
//! in `Ic`, time `τ = t·2π Ic R/Φ0`):
//!
//! ```text
//! β_C φk'' + φk' + sin φk = ib ± j
//! j = (2/β_L)·(φa − (φ1 − φ2)/2π),   β_L = 2 L Ic/Φ0
//! ```
//!
//! The fluxon rate is the mean advance of `(φ1 + φ2)/2` per normalized time,
//! which equals the rate of flux-quantum production in units of `Ic R/Φ0`.

mod integrator;

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::phi0;
use crate::error::{invalid, Error, Result};
use crate::inductance::size_squid;
use crate::Scalar;

use integrator::{State, StepControl, Stepper};

/// Physical description of one SQUID.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SquidParams<T> {
    /// Junction critical current, amperes.
    pub ic: T,
    /// `Ib/Ic` per junction, in `[0, 1)`.
    pub bias_ratio: T,
    /// Geometric loop inductance, henries.
    pub l_sq: T,
    /// Stewart–McCumber parameter; 0 is the overdamped limit.
    pub beta_c: T,
    /// Shunt resistance relative to the reference resistance that defines
    /// the normalized rate unit.
    pub r_shunt: T,
}

impl<T: Scalar> SquidParams<T> {
    /// Overdamped SQUID with `β_L = 1`, i.e. `L = Φ0/(2 Ic)`.
    pub fn beta_l_one(ic: T, bias_ratio: T) -> Result<Self> {
        let p = Self {
            ic,
            bias_ratio,
            l_sq: size_squid(ic)?.l_washer,
            beta_c: T::zero(),
            r_shunt: T::one(),
        };
        p.validate()?;
        Ok(p)
    }

    /// `β_L = 1` SQUID at `Ic = 300 µA`.
    pub fn reference(bias_ratio: T) -> Result<Self> {
        Self::beta_l_one(T::lit(300e-6), bias_ratio)
    }

    pub fn with_bias(self, bias_ratio: T) -> Result<Self> {
        let p = Self { bias_ratio, ..self };
        p.validate()?;
        Ok(p)
    }

    pub fn beta_l(&self) -> T {
        T::lit(2.0) * self.l_sq * self.ic / phi0::<T>()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ic > T::zero()) || !self.ic.is_finite() {
            return Err(invalid(format!("ic must be positive, got {}", self.ic)));
        }
        if !(self.bias_ratio >= T::zero() && self.bias_ratio < T::one()) {
            return Err(invalid(format!(
                "bias ratio must lie in [0, 1), got {}",
                self.bias_ratio
            )));
        }
        if !(self.l_sq > T::zero()) || !self.l_sq.is_finite() {
            return Err(invalid(format!("l_sq must be positive, got {}", self.l_sq)));
        }
        if !(self.beta_c >= T::zero()) || !self.beta_c.is_finite() {
            return Err(invalid(format!("beta_c must be non-negative, got {}", self.beta_c)));
        }
        if !(self.r_shunt > T::zero()) || !self.r_shunt.is_finite() {
            return Err(invalid(format!("r_shunt must be positive, got {}", self.r_shunt)));
        }
        Ok(())
    }
}

/// Integration and measurement settings. Times are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig<T> {
    /// Transient discarded before measuring.
    pub t_settle: T,
    /// Longest measurement window.
    pub t_measure: T,
    /// Measurement stops once this many flux quanta have been timed.
    pub min_quanta: u32,
    pub h_max: T,
    pub h_min: T,
    pub rtol: T,
    pub atol: T,
    /// Rates below this are reported as exactly zero.
    pub zero_cutoff: T,
    /// Once every component of the state derivative is below this the
    /// SQUID is at rest and the rate is zero. Near a saddle-node the next
    /// slip is then at least ~`rest_tol^(-1/2)` away, far beyond any
    /// measurement window. Zero disables the shortcut.
    pub rest_tol: T,
}

impl<T: Scalar> Default for SimConfig<T> {
    fn default() -> Self {
        let tol = (T::epsilon() * T::lit(1e3)).max(T::lit(1e-9));
        Self {
            t_settle: T::lit(200.0),
            t_measure: T::lit(4000.0),
            min_quanta: 20,
            h_max: T::lit(0.01),
            h_min: T::lit(1e-9),
            rtol: tol,
            atol: tol,
            zero_cutoff: T::lit(1e-6),
            // Unreachable in single precision, where the residual is ~eps.
            rest_tol: T::lit(1e-12),
        }
    }
}

impl<T: Scalar> SimConfig<T> {
    pub fn with_times(self, t_settle: T, t_measure: T) -> Self {
        Self {
            t_settle,
            t_measure,
            ..self
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_settle >= T::zero()) || !(self.t_measure >= T::zero()) {
            return Err(invalid(format!(
                "durations must be non-negative, got settle {} and measure {}",
                self.t_settle, self.t_measure
            )));
        }
        if !(self.h_max > T::zero()) || !(self.h_min > T::zero()) || self.h_min > self.h_max {
            return Err(invalid("step bounds must satisfy 0 < h_min <= h_max"));
        }
        if !(self.rest_tol >= T::zero()) {
            return Err(invalid(format!("rest_tol must be non-negative, got {}", self.rest_tol)));
        }
        if self.min_quanta == 0 {
            return Err(invalid("min_quanta must be at least 1"));
        }
        Ok(())
    }

    fn step_control(&self) -> StepControl<T> {
        StepControl {
            h_max: self.h_max,
            h_min: self.h_min,
            rtol: self.rtol,
            atol: self.atol,
        }
    }
}

/// Sampled response `r_fq(φa)` at one bias point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseCurve<T> {
    pub bias_ratio: T,
    /// `(φa in Φ0, r_fq)`, sorted by flux.
    pub samples: Vec<(T, T)>,
}

impl<T: Scalar> ResponseCurve<T> {
    /// First sampled flux with a nonzero rate.
    pub fn first_active_flux(&self) -> Option<T> {
        self.samples.iter().find(|(_, r)| *r > T::zero()).map(|&(phi, _)| phi)
    }

    pub fn max_rate(&self) -> T {
        self.samples.iter().map(|&(_, r)| r).fold(T::zero(), T::max)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn rhs<T: Scalar>(ib: T, phi_a: T, inv_beta_l: T, beta_c: T) -> impl Fn(&State<T>) -> State<T> {
    let two = T::lit(2.0);
    let tau = T::TAU();
    move |y: &State<T>| {
        let j = two * inv_beta_l * (phi_a - (y[0] - y[1]) / tau);
        let drive1 = ib + j - y[0].sin();
        let drive2 = ib - j - y[1].sin();
        if beta_c == T::zero() {
            [drive1, drive2, T::zero(), T::zero()]
        } else {
            [y[2], y[3], (drive1 - y[2]) / beta_c, (drive2 - y[3]) / beta_c]
        }
    }
}

/// Start with zero circulating current. The flux winding is split so that
/// `φa → φa + 1` adds `2π` to junction 1 and `φa → −φa` swaps the junctions,
/// which keeps the periodicity and reflection symmetries exact.
fn initial_state<T: Scalar>(ib: T, phi_a: T) -> State<T> {
    let winding = (phi_a + T::lit(0.5)).floor();
    let w = phi_a - winding;
    let base = ib.min(T::one()).asin();
    let pi = T::PI();
    [base + pi * w + T::TAU() * winding, base - pi * w, T::zero(), T::zero()]
}

fn mean_phase<T: Scalar>(y: &State<T>) -> T {
    (y[0] + y[1]) / T::lit(2.0)
}

/// Time at which the cubic Hermite interpolant of the mean phase over one
/// step first reaches `level`. Requires `theta0 < level <= theta1`.
fn hermite_crossing<T: Scalar>(t0: T, h: T, theta0: T, d0: T, theta1: T, d1: T, level: T) -> T {
    let eval = |s: T| {
        let s2 = s * s;
        let s3 = s2 * s;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        (two * s3 - three * s2 + T::one()) * theta0
            + (s3 - two * s2 + s) * h * d0
            + (-two * s3 + three * s2) * theta1
            + (s3 - s2) * h * d1
    };
    let (mut lo, mut hi) = (T::zero(), T::one());
    for _ in 0..60 {
        let mid = (lo + hi) / T::lit(2.0);
        if eval(mid) >= level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    t0 + h * hi
}

/// Time-averaged fluxon rate at applied flux `phi_applied` (units of `Φ0`),
/// normalized to `Ic R/Φ0`.
///
/// After `t_settle` the mean phase is watched for new `2π` levels; the rate
/// is `2π·K` over the time between the first and the last of `K + 1` such
/// crossings. Measurement ends after `min_quanta` quanta or `t_measure`.
/// Fewer than two crossings in the window means a zero rate.
pub fn simulate_rfq<T: Scalar>(params: &SquidParams<T>, phi_applied: T, cfg: &SimConfig<T>) -> Result<T> {
    params.validate()?;
    cfg.validate()?;
    if !phi_applied.is_finite() {
        return Err(invalid(format!("applied flux must be finite, got {phi_applied}")));
    }
    let ib = params.bias_ratio;
    let f = rhs(ib, phi_applied, params.beta_l().recip(), params.beta_c);
    let mut stepper = Stepper::new(f, initial_state(ib, phi_applied), cfg.step_control());

    let at_rest = |dy: &State<T>| dy.iter().all(|d| d.abs() < cfg.rest_tol);
    while stepper.t() < cfg.t_settle {
        stepper.step(cfg.t_settle)?;
        if at_rest(stepper.dy()) {
            return Ok(T::zero());
        }
    }

    let tau = T::TAU();
    let t_end = cfg.t_settle + cfg.t_measure;
    let mut top_level = (mean_phase(stepper.y()) / tau).floor();
    let mut first: Option<(T, T)> = None;
    let mut last: Option<(T, T)> = None;

    while stepper.t() < t_end {
        let t0 = stepper.t();
        let theta0 = mean_phase(stepper.y());
        let d0 = mean_phase(stepper.dy());
        let step = stepper.step(t_end)?;
        if at_rest(&step.dy) {
            return Ok(T::zero());
        }
        let theta1 = mean_phase(&step.y);
        let reached = (theta1 / tau).floor();
        while top_level < reached {
            top_level += T::one();
            let level = top_level * tau;
            let d1 = mean_phase(&step.dy);
            let t_cross = if theta0 >= level {
                t0
            } else {
                hermite_crossing(t0, step.h, theta0, d0, theta1, d1, level)
            };
            if first.is_none() {
                first = Some((t_cross, top_level));
            }
            last = Some((t_cross, top_level));
        }
        if let (Some((_, l0)), Some((_, l1))) = (first, last) {
            if (l1 - l0).to_u32().unwrap_or(0) >= cfg.min_quanta {
                break;
            }
        }
    }

    let rate = match (first, last) {
        (Some((t0, l0)), Some((t1, l1))) if l1 > l0 && t1 > t0 => tau * (l1 - l0) / (t1 - t0),
        _ => T::zero(),
    };
    let rate = rate * params.r_shunt;
    if !rate.is_finite() {
        return Err(Error::Integration {
            t: stepper.t().as_f64(),
            reason: "non-finite rate".into(),
        });
    }
    Ok(if rate < cfg.zero_cutoff { T::zero() } else { rate })
}

/// Evenly spaced response curve on `[phi_min, phi_max]`. Points are computed
/// in parallel; order follows the flux grid.
pub fn sweep_response<T: Scalar>(
    params: &SquidParams<T>,
    phi_min: T,
    phi_max: T,
    n_points: usize,
    cfg: &SimConfig<T>,
) -> Result<ResponseCurve<T>> {
    params.validate()?;
    if !(phi_min < phi_max) {
        return Err(invalid(format!("need phi_min < phi_max, got {phi_min} and {phi_max}")));
    }
    if n_points < 2 {
        return Err(invalid("need at least two sweep points"));
    }
    let step = (phi_max - phi_min) / T::from_count(n_points as u64 - 1);
    let samples = (0..n_points)
        .into_par_iter()
        .map(|i| {
            let phi = if i + 1 == n_points {
                phi_max
            } else {
                phi_min + step * T::from_count(i as u64)
            };
            simulate_rfq(params, phi, cfg)
                .map(|r| (phi, r))
                .map_err(|e| Error::SweepPoint {
                    phi: phi.as_f64(),
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResponseCurve {
        bias_ratio: params.bias_ratio,
        samples,
    })
}

/// Smallest applied flux in `[0, 0.5]` with a nonzero rate, by bisection to
/// within `tol`.
pub fn find_threshold_flux<T: Scalar>(params: &SquidParams<T>, tol: T, cfg: &SimConfig<T>) -> Result<T> {
    params.validate()?;
    if !(params.bias_ratio > T::zero()) {
        return Err(invalid("threshold search needs a positive bias"));
    }
    if !(tol > T::zero()) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let fires = |phi: T| simulate_rfq(params, phi, cfg).map(|r| r > T::zero());
    let (mut lo, mut hi) = (T::zero(), T::lit(0.5));
    if fires(lo)? {
        return Ok(lo);
    }
    if !fires(hi)? {
        return Err(Error::NoThreshold {
            bias_ratio: params.bias_ratio.as_f64(),
        });
    }
    while hi - lo > tol {
        let mid = (lo + hi) / T::lit(2.0);
        if fires(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

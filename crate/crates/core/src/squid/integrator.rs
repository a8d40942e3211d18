//! Adaptive Dormand–Prince 5(4) stepper for small fixed-size systems.

use crate::error::{Error, Result};
use crate::Scalar;

pub const DIM: usize = 4;
pub type State<T> = [T; DIM];

#[derive(Debug, Clone, Copy)]
pub struct StepControl<T> {
    pub h_max: T,
    pub h_min: T,
    pub rtol: T,
    pub atol: T,
}

// Butcher tableau. The system is autonomous so the nodes are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One accepted step: the new state, its derivative, and the step taken.
pub struct Accepted<T> {
    pub y: State<T>,
    pub dy: State<T>,
    pub h: T,
}

pub struct Stepper<T, F> {
    rhs: F,
    ctl: StepControl<T>,
    h: T,
    t: T,
    y: State<T>,
    dy: State<T>,
}

impl<T: Scalar, F: Fn(&State<T>) -> State<T>> Stepper<T, F> {
    pub fn new(rhs: F, y0: State<T>, ctl: StepControl<T>) -> Self {
        let dy = rhs(&y0);
        Self {
            rhs,
            h: ctl.h_max,
            ctl,
            t: T::zero(),
            y: y0,
            dy,
        }
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn y(&self) -> &State<T> {
        &self.y
    }

    pub fn dy(&self) -> &State<T> {
        &self.dy
    }

    /// Advances by one accepted step, never past `t_end`.
    pub fn step(&mut self, t_end: T) -> Result<Accepted<T>> {
        let remaining = t_end - self.t;
        let mut h = self.h.min(self.ctl.h_max);
        let mut truncated = false;
        if h >= remaining {
            h = remaining;
            truncated = true;
        }
        loop {
            let (y_new, err) = self.trial(h);
            if err <= T::one() {
                self.t += h;
                self.y = y_new;
                // FSAL: derivative at the new point.
                self.dy = (self.rhs)(&self.y);
                if !truncated {
                    let grow = if err == T::zero() {
                        T::lit(5.0)
                    } else {
                        (T::lit(0.9) * err.powf(T::lit(-0.2))).min(T::lit(5.0))
                    };
                    self.h = (h * grow).min(self.ctl.h_max);
                }
                return Ok(Accepted {
                    y: self.y,
                    dy: self.dy,
                    h,
                });
            }
            h *= if err.is_finite() {
                (T::lit(0.9) * err.powf(T::lit(-0.25))).max(T::lit(0.1))
            } else {
                T::lit(0.1)
            };
            truncated = false;
            if h < self.ctl.h_min {
                return Err(Error::Integration {
                    t: self.t.as_f64(),
                    reason: format!("step size {:e} underflowed", h.as_f64()),
                });
            }
        }
    }

    fn trial(&self, h: T) -> (State<T>, T) {
        let mut k = [[T::zero(); DIM]; 7];
        k[0] = self.dy;
        for s in 1..7 {
            let mut ys = self.y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = T::lit(A[s][j]);
                if a != T::zero() {
                    for i in 0..DIM {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = (self.rhs)(&ys);
        }
        let mut y5 = self.y;
        let mut err = T::zero();
        for i in 0..DIM {
            let mut d5 = T::zero();
            let mut d4 = T::zero();
            for s in 0..7 {
                d5 += T::lit(B5[s]) * k[s][i];
                d4 += T::lit(B4[s]) * k[s][i];
            }
            y5[i] += h * d5;
            let scale = self.ctl.atol + self.ctl.rtol * self.y[i].abs().max(y5[i].abs());
            let e = h * (d5 - d4) / scale;
            err = err.max(e.abs());
        }
        (y5, err)
    }
}

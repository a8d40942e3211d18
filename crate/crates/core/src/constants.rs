use crate::Scalar;

/// Magnetic flux quantum h/2e in webers.
pub const PHI0: f64 = 2.067833848e-15;

/// Physical constants used by the circuit models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants<T> {
    pub phi0: T,
}

impl<T: Scalar> PhysicalConstants<T> {
    pub fn get() -> Self {
        Self { phi0: T::lit(PHI0) }
    }
}

/// Flux quantum in the requested scalar type.
#[inline]
pub fn phi0<T: Scalar>() -> T {
    T::lit(PHI0)
}

//! Cubic potential `U(x) = 2x³ + 3x²` with a metastable state.
//!
//! The landscape has a metastable minimum at `x = 0`, a barrier top at
//! `x = -1` and crosses the axis at `x = -1.5`; beyond the crossing the
//! profile falls away without bound, which is what makes escape from the
//! well irreversible once a trajectory is past the barrier.

use serde::{Deserialize, Serialize};

/// The fixed cubic potential and its landmarks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CubicPotential;

impl CubicPotential {
    /// Metastable minimum.
    pub const X_METASTABLE: f64 = 0.0;
    /// Barrier top (local maximum).
    pub const X_MAX: f64 = -1.0;
    /// Crossing point between the potential and the x axis.
    pub const X_CROSS: f64 = -1.5;
    /// Barrier height `ΔU = U(x_max) - U(x_metastable)`.
    pub const BARRIER_HEIGHT: f64 = 1.0;

    /// `U(x) = 2x³ + 3x²`.
    #[inline]
    pub fn value(self, x: f64) -> f64 {
        (2.0 * x + 3.0) * x * x
    }

    /// `U'(x) = 6x² + 6x`.
    #[inline]
    pub fn gradient(self, x: f64) -> f64 {
        6.0 * x * (x + 1.0)
    }

    /// Barrier heights seen from a starting position `x_o`:
    /// the full barrier `ΔU = U(x_max) - U(x_me)` and the entry barrier
    /// `ΔU_in = U(x_max) - U(x_o)`.
    pub fn barrier_heights(self, x_o: f64) -> BarrierHeights {
        BarrierHeights {
            delta_u: Self::BARRIER_HEIGHT,
            delta_u_in: self.value(Self::X_MAX) - self.value(x_o),
        }
    }
}

/// See [`CubicPotential::barrier_heights`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierHeights {
    pub delta_u: f64,
    pub delta_u_in: f64,
}

/// Free-function form of [`CubicPotential::value`].
#[inline]
pub fn potential_value(x: f64) -> f64 {
    CubicPotential.value(x)
}

/// Free-function form of [`CubicPotential::gradient`].
#[inline]
pub fn potential_gradient(x: f64) -> f64 {
    CubicPotential.gradient(x)
}

//! Low-level carriers: R⁴ vectors with the complex structure, bivariate Taylor jets,
//! and Fourier interpolation of closed plane curves.

mod fourier;
mod jet;
mod vec4;

pub use fourier::{fourier_fit, FourierCurve, PlaneCurve, StraightLine};
pub use jet::{CJet, Jet2, MAX_ORDER};
pub use vec4::Vec4;

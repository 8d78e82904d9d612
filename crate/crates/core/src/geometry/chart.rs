use std::fmt;
use std::sync::Arc;

use crate::tensor::{Jet2, Vec4, MAX_ORDER};

/// Immersion written against jet arithmetic: given jets of the coordinates `(u, v)`,
/// returns jets of the four real coordinates of C².
pub type ImmersionFn = dyn Fn(Jet2, Jet2) -> [Jet2; 4] + Send + Sync;

/// A doubly periodic parametrized surface in C² ≅ R⁴.
///
/// Open directions (for example a straight-line factor) are sampled over `[-P/2, P/2)`
/// instead of `[0, P)` and are excluded from quadrature and spectral operators.
#[derive(Clone)]
pub struct SurfaceChart {
    label: String,
    immersion: Arc<ImmersionFn>,
    periods: [f64; 2],
    closed: [bool; 2],
    pinching_bounds: Option<(f64, f64)>,
}

impl fmt::Debug for SurfaceChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceChart")
            .field("label", &self.label)
            .field("periods", &self.periods)
            .field("closed", &self.closed)
            .field("pinching_bounds", &self.pinching_bounds)
            .finish_non_exhaustive()
    }
}

impl SurfaceChart {
    pub fn new(
        label: impl Into<String>,
        periods: [f64; 2],
        immersion: impl Fn(Jet2, Jet2) -> [Jet2; 4] + Send + Sync + 'static,
    ) -> Self {
        SurfaceChart {
            label: label.into(),
            immersion: Arc::new(immersion),
            periods,
            closed: [true, true],
            pinching_bounds: None,
        }
    }

    /// Marks which parameter directions are periodic.
    pub fn with_closed(mut self, closed: [bool; 2]) -> Self {
        self.closed = closed;
        self
    }

    /// Attaches known `|A|²` bounds that the pinching report should check.
    pub fn with_pinching_bounds(mut self, lower: f64, upper: f64) -> Self {
        self.pinching_bounds = Some((lower, upper));
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn periods(&self) -> [f64; 2] {
        self.periods
    }

    pub fn closed(&self) -> [bool; 2] {
        self.closed
    }

    pub fn is_compact(&self) -> bool {
        self.closed[0] && self.closed[1]
    }

    pub fn pinching_bounds(&self) -> Option<(f64, f64)> {
        self.pinching_bounds
    }

    /// Jets of the four coordinates at `(u, v)`, truncated at `order`.
    pub fn jet(&self, u: f64, v: f64, order: usize) -> [Jet2; 4] {
        assert!(order <= MAX_ORDER);
        (self.immersion)(Jet2::var_u(u, order), Jet2::var_v(v, order))
    }

    pub fn point(&self, u: f64, v: f64) -> Vec4 {
        let x = self.jet(u, v, 0);
        Vec4(x.map(|c| c.value()))
    }

    /// The same surface with the parameters exchanged, `(u, v) ↦ x(v, u)`.
    pub fn swapped(&self) -> SurfaceChart {
        let inner = Arc::clone(&self.immersion);
        SurfaceChart {
            label: format!("{}:swapped", self.label),
            immersion: Arc::new(move |u, v| inner(v, u)),
            periods: [self.periods[1], self.periods[0]],
            closed: [self.closed[1], self.closed[0]],
            pinching_bounds: self.pinching_bounds,
        }
    }

    /// Starting parameter of the sampled range in each direction.
    pub fn start(&self) -> [f64; 2] {
        std::array::from_fn(|d| {
            if self.closed[d] {
                0.0
            } else {
                -0.5 * self.periods[d]
            }
        })
    }
}

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the model and interval arithmetic is written against.
///
/// Implemented for `f32` and `f64`. Sampling and MCMC always run in `f64`;
/// results are converted into `T` at the boundary.
pub trait Real: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static {
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to Real")
    }

    fn of_u64(x: u64) -> Self {
        Self::from_u64(x).expect("count converts to Real")
    }

    fn f64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

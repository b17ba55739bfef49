//! Exact arithmetic: the tropical semifield, its group ring, and Laurent
//! polynomials over that group ring.

mod coef;
mod laurent;
mod sparse;
mod text;
mod tropical;

pub use coef::CoefRingElement;
pub use laurent::{GradedDegree, LaurentPoly};
pub use tropical::TropicalElement;

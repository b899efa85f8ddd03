//! Sol and Heisenberg foliations of ℍ×ℍ and ℂ×ℍ, hyperbolic toral complex
//! Kleinian groups, and executable checks of how they fit together.

pub mod cli;
pub mod geometry;
pub mod heisenberg;
pub mod kleinian;
pub mod linalg;
pub mod output;
pub mod projective;
pub mod quotient;
pub mod search;
pub mod sol;
pub mod suites;

pub use geometry::{MixedPoint, ProductPoint, TangentVector4, UpperHalfPoint};
pub use heisenberg::HeisElement;
pub use kleinian::{ProjectiveLine, ProjectivePoint, ToralGroupSpec};
pub use sol::{SolElement, SolParams};

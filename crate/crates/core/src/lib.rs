//! Continuous-variable phase-space engine for Mach-Zehnder phase estimation.
//!
//! Gaussian states travel on a mean/covariance fast path; anything heralded is
//! carried as a [`wigner::WignerExpr`], a sum of polynomial × Gaussian terms whose
//! moments, marginals and Fock projections are all evaluated analytically.
//!
//! Conventions: `ħ = 1`, `x = (a + a†)/√2`, quadratures ordered `(x1, p1, x2, p2, ...)`,
//! modes numbered from 1, vacuum covariance `I`.

pub mod error;
pub mod estimation;
pub mod gaussian;
pub mod herald;
pub mod measure;
pub mod poly;
pub mod reference;
pub mod symplectic;
pub mod wigner;

pub use error::{CoreError, CoreResult};
pub use gaussian::{GaussianState, LossSpec};
pub use herald::{Branch, HeraldedState};
pub use measure::{DetectionScheme, Measurable, MeasurementMoments};
pub use symplectic::SymplecticTransform;
pub use wigner::{PhotonNumberDistribution, WignerExpr};

//! Numerical theory of one-frequency SL(2,ℂ) cocycles.
//!
//! The crate computes Lyapunov exponents of analytic quasiperiodic cocycles on
//! complexified phases, the acceleration (the quantized slope of
//! `ε ↦ L(α, A_ε)`), invariant splittings and the derivative of the Lyapunov
//! exponent at uniformly hyperbolic cocycles, and classifies energies of
//! quasiperiodic Schrödinger operators.

pub mod acceleration;
pub mod cocycle;
pub mod error;
pub mod hyperbolicity;
pub mod lyapunov;
pub mod oracles;
pub mod spectral;
pub mod torus;

pub use num_complex::Complex64;

pub use acceleration::{
    acceleration_at, epsilon_profile, is_regular, is_regular_at, stratified_l, Acceleration, AccelerationOptions,
    LyapunovProfile, StratifiedL,
};
pub use cocycle::{schrodinger, spectral_radius, Cocycle, CocycleMap, Frequency, Mat2, ScaledMatrix};
pub use error::{Error, Result};
pub use lyapunov::{
    convergents, lyapunov, lyapunov_ergodic, lyapunov_from_trace, lyapunov_irrational, lyapunov_rational,
    trace_fourier_profile, IrrationalEstimate, LyapunovOptions, RationalApprox, TraceProfile,
};
pub use hyperbolicity::{
    conjugation, derivative_coefficients, directional_derivative, is_uniformly_hyperbolic, potential_gradient,
    splitting, Conjugation, DerivativeCoefficients, Gradient, GradientRow, HyperbolicityCertificate, Splitting,
    SplittingOptions,
};
pub use spectral::{
    classify_energy, finite_spectrum, ids, scan, thouless_residual, EnergyClass, IdsTable, ScanRow, Settings, Stratum,
};
pub use torus::TorusFunction;

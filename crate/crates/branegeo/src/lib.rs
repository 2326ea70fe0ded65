//! Numerical engine for the Clifford-bundle formulation of submanifold
//! geometry: an m-dimensional brane M embedded in a flat pseudo-Euclidean
//! ambient space M̊ = R^(p,q), with all geometric objects (frames, shape
//! operators, connection and curvature biforms) represented as sections of
//! the ambient Clifford bundle Cl(M̊) restricted to M.
//!
//! Differentiation is exact: every field is evaluated in truncated
//! multivariate jet arithmetic over the chart variables, so the restricted
//! Dirac operator d̊ and its derived operators (shape biform 𝒮(v), covariant
//! derivative, curvature biform ℜ(u∧v), Ricci extensor, ∂∧∂) come out to
//! machine precision rather than finite-difference accuracy.

pub mod chart;
pub mod clifford;
pub mod curvature;
pub mod dsl;
pub mod extensor;
pub mod frame;
pub mod jet;
pub mod killing;
pub mod manifest;
pub mod oracle;
pub mod report;
pub mod sample;
pub mod suite;

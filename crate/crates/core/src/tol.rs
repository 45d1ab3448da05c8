//! Numerical tolerances shared by every module.
//!
//! Register dimension never exceeds 8, so rounding in the dense kernels stays
//! a few ulps above machine epsilon. Structural checks use [`STRUCTURAL`],
//! anything that goes through an eigensolver uses [`SPECTRAL`].

/// Hermiticity, normalization, orthonormality, idempotence.
pub const STRUCTURAL: f64 = 1e-12;

/// Eigenvalue sums, projector traces, Hermiticity accepted by the eigensolver.
pub const SPECTRAL: f64 = 1e-10;

/// Modulus below which an amplitude is treated as zero when fixing the global phase.
pub const PHASE_CUTOFF: f64 = 1e-12;

/// Projection weight below which a state counts as orthogonal to a subspace.
pub const ORTHOGONAL_WEIGHT: f64 = 1e-12;

/// Smallest residual norm squared accepted during Gram-Schmidt.
pub const DEPENDENT_RESIDUAL: f64 = 1e-10;

/// Minimal product-state weight on the span below which a family is extendible.
pub const DEGENERATE_OVERLAP: f64 = 1e-10;

/// A family counts as unextendible when its minimal product overlap exceeds this.
pub const UNEXTENDIBLE: f64 = 1e-8;

/// Two optimizer candidates whose values differ by less than this are tied.
pub const TIE: f64 = 1e-10;

/// Largest allowed gap between a certificate member and the subspace minimum.
pub const CERTIFICATE_GAP: f64 = 1e-6;

/// Negative concurrence radicands above this are clamped to zero.
pub const RADICAND_CLAMP: f64 = -1e-12;

/// Negative concurrence radicands below this are an integrity failure.
pub const RADICAND_FAIL: f64 = -1e-9;

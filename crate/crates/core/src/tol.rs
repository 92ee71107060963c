//! Numerical tolerances, fixed in one place.
//!
//! Exact identities (unitarity, trace relations, Fourier vanishing) only
//! accumulate rounding noise, so their budgets sit far above f64 epsilon yet
//! far below any honest signal. The non-vanishing floor is looser: it bounds
//! genuinely nonzero quantities away from zero on interior points sampled
//! with a reasonable polytope margin.

/// |U U* - I| and |det U - 1| for constructed holonomies and frames.
pub const UNITARITY: f64 = 1e-12;

/// Recomputed traces and angles against their prescribed values.
pub const TRACE_MATCH: f64 = 1e-10;

/// Round trips through serialization or grid-size changes.
pub const RECONSTRUCTION: f64 = 1e-8;

/// Fourier coefficients that must vanish identically.
pub const VANISHING: f64 = 1e-8;

/// Fourier coefficients that must stay away from zero at interior points.
pub const NONVANISHING: f64 = 1e-6;

/// Residual of the twist phase identity.
pub const TWIST_PHASE: f64 = 1e-8;

/// Relative singular value cutoff for numerical rank.
pub const RANK_REL: f64 = 1e-8;

//! Numerical tolerances shared across the crate.

/// Structure checks (doubled-up form, Hermitian symmetry).
pub const STRUCTURE: f64 = 1e-9;
/// Relative residual of matrix equations.
pub const RESIDUAL: f64 = 1e-8;
/// Relative cutoff for numerical rank.
pub const RANK: f64 = 1e-10;
/// Spectral-gap guard for singular linear operators.
pub const SINGULAR: f64 = 1e-10;
/// Pointwise tolerance of sampled frequency-domain identities.
pub const FREQ: f64 = 1e-7;
/// Largest allowed Hermitian deviation before symmetrization is flagged suspect.
pub const HERMITIAN_SUSPECT: f64 = 1e-6;

/// Tolerance set threaded through checks that accept caller overrides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub structure: f64,
    pub residual: f64,
    pub rank: f64,
    pub singular: f64,
    pub freq: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { structure: STRUCTURE, residual: RESIDUAL, rank: RANK, singular: SINGULAR, freq: FREQ }
    }
}

impl Tolerances {
    pub fn with_residual(residual: f64) -> Self {
        Self { residual, ..Self::default() }
    }
}

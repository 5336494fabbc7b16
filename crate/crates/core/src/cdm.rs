//! Composition, reduction, and conditioning of subsystem states.
//!
//! The conditional density matrix of the factors outside `on`, given that
//! the factors in `on` are found in the range of the projector `P`, is
//!
//! ```text
//! ρ_rest/on = Tr_on(P̃ ρ) / Tr(P̃ ρ),   P̃ = P ⊗ E_rest
//! ```

use crate::error::{Error, Result};
use crate::qstate::{DensityMatrix, Projector};
use crate::tensor::{embed, partial_trace, trace, ComplexMatrix, DEFAULT_TOL};

/// Probabilities at or below this value make the conditional state undefined.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// Product state together with the purity annotation for its factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Composition {
    pub state: DensityMatrix,
    /// At least one factor is pure, so the product is the unique joint state
    /// compatible with the two marginals.
    pub unique: bool,
}

/// Result of conditioning on a projector.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub conditional: DensityMatrix,
    pub probability: f64,
    pub projector_rank: usize,
}

impl ConditionReport {
    /// The condition was a projector of rank > 1 rather than a pure state.
    pub fn is_generalized(&self) -> bool {
        self.projector_rank > 1
    }
}

/// `ρ_a ⊗ ρ_b` on the concatenated factors.
pub fn compose(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Composition {
    Composition {
        state: rho_a.tensor(rho_b),
        unique: rho_a.is_pure(DEFAULT_TOL) || rho_b.is_pure(DEFAULT_TOL),
    }
}

/// Reduced state on the `keep` factors (in ascending factor order).
pub fn reduce(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let shape = rho.shape();
    shape.validate_subset(keep)?;
    if keep.is_empty() || keep.len() >= shape.len() {
        return Err(Error::ImproperSubset);
    }
    let traced = shape.complement(keep);
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    let reduced = partial_trace(rho.matrix(), shape, &traced)?;
    DensityMatrix::new(shape.select(&kept)?, reduced)
}

fn lifted(rho: &DensityMatrix, p: &Projector, on: &[usize]) -> Result<ComplexMatrix> {
    let shape = rho.shape();
    shape.validate_subset(on)?;
    let target = shape.select(on)?;
    if &target != p.shape() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            actual: p.shape().dim(),
        });
    }
    embed(p.matrix(), on, shape)
}

/// `Tr(P̃ ρ)`, clamped to `[0, 1]`.
pub fn condition_probability(rho: &DensityMatrix, p: &Projector, on: &[usize]) -> Result<f64> {
    let p_full = lifted(rho, p, on)?;
    Ok(raw_probability(&p_full, rho.matrix())?.clamp(0.0, 1.0))
}

fn raw_probability(p_full: &ComplexMatrix, rho: &ComplexMatrix) -> Result<f64> {
    // Tr(AB) = Σ_ij A_ij B_ji
    let n = p_full.rows();
    if rho.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: rho.rows(),
        });
    }
    let mut sum = num_complex::Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            sum += p_full[(i, j)] * rho[(j, i)];
        }
    }
    Ok(sum.re)
}

/// Conditional state of the complement of `on`, given `p` on `on`.
pub fn conditional(rho: &DensityMatrix, p: &Projector, on: &[usize]) -> Result<ConditionReport> {
    let p_full = lifted(rho, p, on)?;
    condition_with(rho, p, on, &p_full * rho.matrix())
}

/// Same conditional state, computed from the symmetric form
/// `Tr_on(P̃ ρ P̃) / Tr(P̃ ρ P̃)`.
pub fn conditional_sandwiched(
    rho: &DensityMatrix,
    p: &Projector,
    on: &[usize],
) -> Result<ConditionReport> {
    let p_full = lifted(rho, p, on)?;
    condition_with(rho, p, on, &(&p_full * rho.matrix()) * &p_full)
}

fn condition_with(
    rho: &DensityMatrix,
    p: &Projector,
    on: &[usize],
    weighted: ComplexMatrix,
) -> Result<ConditionReport> {
    let shape = rho.shape();
    if on.is_empty() || on.len() >= shape.len() {
        return Err(Error::ImproperSubset);
    }
    let probability = trace(&weighted)?.re;
    if probability <= ZERO_PROBABILITY {
        return Err(Error::ZeroProbabilityCondition { probability });
    }
    let rest = shape.complement(on);
    let reduced = partial_trace(&weighted, shape, on)?.scale_real(1.0 / probability);
    // P̃ρ is not hermitian on its own; only its partial trace over `on` is.
    let conditional = DensityMatrix::new(shape.select(&rest)?, reduced)?;
    Ok(ConditionReport {
        conditional,
        probability: probability.min(1.0),
        projector_rank: p.rank(),
    })
}

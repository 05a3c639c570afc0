use crate::groupoid::{ArrowId, PointId};
use crate::rep::CorrectionTrace;
use crate::report::Report;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("validation failed: {0}")]
    Invalid(Report),
    #[error("point {0} is out of range")]
    PointOutOfRange(PointId),
    #[error("arrow {0} is out of range")]
    ArrowOutOfRange(ArrowId),
    #[error("{what}: expected length {expected}, found {found}")]
    Length { what: &'static str, expected: usize, found: usize },
    #[error("matrix of arrow {arrow} has shape {found:?}, expected {expected:?}")]
    Shape { arrow: ArrowId, expected: (usize, usize), found: (usize, usize) },
    #[error("fiber dimension differs between points {0} and {1} of one orbit")]
    FiberDim(PointId, PointId),
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("matrix of arrow {0} is singular")]
    Singular(ArrowId),
    #[error("not an almost representation: orbit {orbit} has defect {defect:e} above threshold {threshold:e}")]
    NotAlmost { orbit: usize, defect: f64, threshold: f64 },
    #[error("inverse bound violated at arrow {arrow}: {norm} > {bound}")]
    InverseBound { arrow: ArrowId, norm: f64, bound: f64 },
    #[error("cutoff is not normalizing at point {point} (sum {sum})")]
    NotNormalizing { point: PointId, sum: f64 },
    #[error("normalizing denominator vanishes at point {0}")]
    ZeroDenominator(PointId),
    #[error("multiplier is not isometric at ({0}, {1})")]
    NotIsometric(ArrowId, ArrowId),
    #[error("cochain value at the unit of point {0} is not 1")]
    UnitCochain(PointId),
    #[error("matrix of arrow {0} is not unitary")]
    NotUnitary(ArrowId),
    #[error("averaged Gram matrix at point {point} is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { point: PointId, min_eigenvalue: f64 },
    #[error("point set is not invariant: point {0} is reachable from it")]
    NotInvariant(PointId),
    #[error("arrow {arrow} has {count} lifts between points {from} and {to}, expected exactly one")]
    Lift { arrow: ArrowId, from: PointId, to: PointId, count: usize },
    #[error("homomorphism fails PF2: point {0} is not reached")]
    NotSurjective(PointId),
    #[error("no representative for point {0}")]
    MissingRepresentative(PointId),
    #[error("representative arrow {arrow} is not valid for point {point}")]
    BadRepresentative { point: PointId, arrow: ArrowId },
    #[error("no arrow given for {0} arrows outside the locus")]
    MissingArrows(usize),
    #[error("no convergence after {} averaging steps", .0.rows.len())]
    NoConvergence(CorrectionTrace),
}

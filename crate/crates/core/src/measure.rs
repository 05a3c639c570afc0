//! Haar weight systems and cutoff functions.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::groupoid::{ArrowId, FiniteGroupoid, PointId};
use crate::report::{Report, Violation, ViolationKind};

/// Absolute tolerance for Haar invariance and the normalizing identity.
pub const MEASURE_TOL: f64 = 1e-12;

/// Weight `μ(h) = μ^{tgt h}({h})` per arrow.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarSystem {
    pub weights: Vec<f64>,
}

/// Nonnegative value `c(x)` per point.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffFunction {
    pub values: Vec<f64>,
}

impl CutoffFunction {
    pub fn constant(g: &FiniteGroupoid, value: f64) -> Self {
        CutoffFunction { values: alloc::vec![value; g.n_points()] }
    }
}

/// `μ(h) = 1/|G^{tgt h}|`.
pub fn normalized_counting_haar(g: &FiniteGroupoid) -> HaarSystem {
    let weights = (0..g.n_arrows()).map(|h| 1.0 / g.target_fiber(g.tgt(h)).len() as f64).collect();
    HaarSystem { weights }
}

/// Positivity and left invariance `μ(gh) = μ(h)`.
pub fn validate_haar(g: &FiniteGroupoid, mu: &HaarSystem) -> Report {
    let mut report = Report::new();
    report.note("continuity of x ↦ μˣ holds for discrete X");
    let n = g.n_arrows();
    if mu.weights.len() < n {
        let missing: Vec<ArrowId> = (mu.weights.len()..n).collect();
        report.push(Violation::arrows(ViolationKind::MissingWeight, &missing));
        return report;
    }
    if mu.weights.len() > n {
        let extra: Vec<ArrowId> = (n..mu.weights.len()).collect();
        report.push(Violation::arrows(ViolationKind::DanglingId, &extra));
        return report;
    }
    for (h, &w) in mu.weights.iter().enumerate() {
        if !(w.is_finite() && w > 0.0) {
            report.push(Violation::arrows(ViolationKind::Support, &[h]).with_magnitude(w));
        }
    }
    for (a, h) in g.composable_pairs() {
        let d = (mu.weights[g.mul(a, h)] - mu.weights[h]).abs();
        if d > MEASURE_TOL || d.is_nan() {
            report.push(Violation::arrows(ViolationKind::LeftInvariance, &[a, h]).with_magnitude(d));
        }
    }
    report
}

/// Every orbit meets `{c > 0}`.
pub fn validate_cutoff(g: &FiniteGroupoid, c: &CutoffFunction) -> Report {
    let mut report = Report::new();
    report.note("compact support of c holds for finite X");
    let np = g.n_points();
    if c.values.len() != np {
        let ids: Vec<PointId> = (c.values.len().min(np)..c.values.len().max(np)).collect();
        let kind = if c.values.len() < np { ViolationKind::MissingWeight } else { ViolationKind::DanglingId };
        report.push(Violation::points(kind, &ids));
        return report;
    }
    for (x, &v) in c.values.iter().enumerate() {
        if !(v.is_finite() && v >= 0.0) {
            report.push(Violation::points(ViolationKind::Negative, &[x]).with_magnitude(v));
        }
    }
    for orbit in g.orbits() {
        if !orbit.iter().any(|&x| c.values[x] > 0.0) {
            report.push(Violation::points(ViolationKind::OrbitMissed, orbit));
        }
    }
    report
}

/// `D(x) = Σ_{tgt h = x} μ(h)·c(src h)`, summed in ascending arrow id.
pub fn cutoff_integral(g: &FiniteGroupoid, mu: &HaarSystem, c: &CutoffFunction, x: PointId) -> f64 {
    g.target_fiber(x).iter().map(|&h| mu.weights[h] * c.values[g.src(h)]).sum()
}

/// `c'(x) = c(x)/D(x)`, after which `D ≡ 1`.
pub fn normalize_cutoff(
    g: &FiniteGroupoid,
    mu: &HaarSystem,
    c: &CutoffFunction,
) -> Result<CutoffFunction> {
    validate_haar(g, mu).into_result()?;
    validate_cutoff(g, c).into_result()?;
    let values = (0..g.n_points())
        .map(|x| {
            let d = cutoff_integral(g, mu, c, x);
            if d > 0.0 {
                Ok(c.values[x] / d)
            } else {
                Err(Error::ZeroDenominator(x))
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(CutoffFunction { values })
}

/// The first point where `|D(x) − 1| > tol`, if any.
pub fn normalizing_failure(
    g: &FiniteGroupoid,
    mu: &HaarSystem,
    c: &CutoffFunction,
    tol: f64,
) -> Option<(PointId, f64)> {
    (0..g.n_points())
        .map(|x| (x, cutoff_integral(g, mu, c, x)))
        .find(|&(_, d)| (d - 1.0).abs() > tol || d.is_nan())
}

/// A groupoid together with a Haar system and a normalizing cutoff.
///
/// Construction validates both; the averaging-type operations (`average`,
/// `correct`, `isometrize`, `averaged_gram`, `unitarize`,
/// `extend_and_correct`) are methods on this type.
#[derive(Debug, Clone)]
pub struct Averager<'g> {
    pub(crate) groupoid: &'g FiniteGroupoid,
    pub(crate) haar: HaarSystem,
    pub(crate) cutoff: CutoffFunction,
    /// `μ(h)·c(src h)`.
    pub(crate) weight: Vec<f64>,
}

impl<'g> Averager<'g> {
    pub fn new(g: &'g FiniteGroupoid, mu: HaarSystem, c: CutoffFunction) -> Result<Self> {
        validate_haar(g, &mu).into_result()?;
        validate_cutoff(g, &c).into_result()?;
        if let Some((point, sum)) = normalizing_failure(g, &mu, &c, MEASURE_TOL) {
            return Err(Error::NotNormalizing { point, sum });
        }
        let weight = (0..g.n_arrows()).map(|h| mu.weights[h] * c.values[g.src(h)]).collect();
        Ok(Averager { groupoid: g, haar: mu, cutoff: c, weight })
    }

    /// Normalized counting Haar system with `c ≡ 1`.
    pub fn counting(g: &'g FiniteGroupoid) -> Self {
        Self::new(g, normalized_counting_haar(g), CutoffFunction::constant(g, 1.0))
            .expect("counting Haar with c ≡ 1 is normalizing")
    }

    pub fn groupoid(&self) -> &'g FiniteGroupoid {
        self.groupoid
    }

    pub fn haar(&self) -> &HaarSystem {
        &self.haar
    }

    pub fn cutoff(&self) -> &CutoffFunction {
        &self.cutoff
    }

    pub fn weight(&self, h: ArrowId) -> f64 {
        self.weight[h]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{cyclic_table, pm_bundle, z2z2_bundle};
    use crate::groupoid::{build_group, pair_groupoid};

    #[test]
    fn counting_weights() {
        let z2 = build_group(cyclic_table(2)).unwrap();
        assert_eq!(normalized_counting_haar(&z2).weights, [0.5, 0.5]);
        let pm = pm_bundle();
        assert_eq!(normalized_counting_haar(&pm).weights, [0.5, 0.5, 1.0, 0.5, 0.5]);
        let pair = pair_groupoid(2);
        let mu = normalized_counting_haar(&pair);
        assert_eq!(mu.weights, [0.5; 4]);
        assert!(validate_haar(&pair, &mu).is_valid());
    }

    #[test]
    fn haar_violations() {
        let pair = pair_groupoid(2);
        let mu = HaarSystem { weights: alloc::vec![1.0, 0.5, 0.5, 0.5] };
        assert!(validate_haar(&pair, &mu).has(ViolationKind::LeftInvariance));
        let mu = HaarSystem { weights: alloc::vec![0.5, 0.0, 0.5, 0.5] };
        assert!(validate_haar(&pair, &mu).has(ViolationKind::Support));
        let mu = HaarSystem { weights: alloc::vec![0.5] };
        assert!(validate_haar(&pair, &mu).has(ViolationKind::MissingWeight));
    }

    #[test]
    fn cutoffs() {
        let pair = pair_groupoid(2);
        let bundle = z2z2_bundle();
        let one_zero = CutoffFunction { values: alloc::vec![1.0, 0.0] };
        assert!(validate_cutoff(&pair, &one_zero).is_valid());
        let report = validate_cutoff(&bundle, &one_zero);
        assert_eq!(report.violations[0].kind, ViolationKind::OrbitMissed);
        assert_eq!(report.violations[0].points, [1]);

        let mu = normalized_counting_haar(&pair);
        let c = normalize_cutoff(&pair, &mu, &one_zero).unwrap();
        assert_eq!(c.values, [2.0, 0.0]);
        for x in 0..2 {
            assert_eq!(cutoff_integral(&pair, &mu, &c, x), 1.0);
        }
        let ones = CutoffFunction::constant(&pair, 1.0);
        assert_eq!(normalize_cutoff(&pair, &mu, &ones).unwrap(), ones);
        let mu_b = normalized_counting_haar(&bundle);
        assert!(normalize_cutoff(&bundle, &mu_b, &one_zero).is_err());
    }

    #[test]
    fn averager_rejects_non_normalizing() {
        let pair = pair_groupoid(2);
        let mu = normalized_counting_haar(&pair);
        let c = CutoffFunction { values: alloc::vec![1.0, 0.0] };
        assert!(matches!(Averager::new(&pair, mu, c), Err(Error::NotNormalizing { .. })));
    }
}

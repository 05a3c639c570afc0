//! Pseudorepresentations, defect and bound, and the averaging correction.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cocycle::{ell, validate_multiplier, Multiplier};
use crate::error::{Error, Result};
use crate::groupoid::{ArrowId, FiniteGroupoid, PointId};
use crate::linalg::{c, distance, identity, invert, is_finite, norm_unchecked, CMatrix};
use crate::measure::Averager;
use crate::report::{Report, Violation, ViolationKind};

/// Relative slack of the inverse-norm certificate.
pub const INVERSE_CERT_TOL: f64 = 1e-10;

/// A matrix `T(g): E_{src g} → E_{tgt g}` per arrow, not assumed multiplicative.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoRep {
    fiber_dim: Vec<usize>,
    matrices: Vec<CMatrix>,
}

impl PseudoRep {
    /// Checks shapes, finiteness and that fiber dimensions are constant on orbits.
    pub fn new(g: &FiniteGroupoid, fiber_dim: Vec<usize>, matrices: Vec<CMatrix>) -> Result<Self> {
        if fiber_dim.len() != g.n_points() {
            return Err(Error::Length { what: "fiber dimensions", expected: g.n_points(), found: fiber_dim.len() });
        }
        if matrices.len() != g.n_arrows() {
            return Err(Error::Length { what: "matrices", expected: g.n_arrows(), found: matrices.len() });
        }
        for orbit in g.orbits() {
            if let Some(&y) = orbit.iter().find(|&&y| fiber_dim[y] != fiber_dim[orbit[0]]) {
                return Err(Error::FiberDim(orbit[0], y));
            }
        }
        for (a, m) in matrices.iter().enumerate() {
            let expected = (fiber_dim[g.tgt(a)], fiber_dim[g.src(a)]);
            if m.shape() != expected {
                return Err(Error::Shape { arrow: a, expected, found: m.shape() });
            }
            if !is_finite(m) {
                return Err(Error::NonFinite);
            }
        }
        Ok(PseudoRep { fiber_dim, matrices })
    }

    /// `T(g) = I` on every arrow; requires equal dimensions along orbits.
    pub fn identity(g: &FiniteGroupoid, fiber_dim: Vec<usize>) -> Result<Self> {
        let matrices = (0..g.n_arrows()).map(|a| identity(fiber_dim.get(g.src(a)).copied().unwrap_or(0))).collect();
        Self::new(g, fiber_dim, matrices)
    }

    pub fn fiber_dim(&self, x: PointId) -> usize {
        self.fiber_dim[x]
    }

    pub fn fiber_dims(&self) -> &[usize] {
        &self.fiber_dim
    }

    pub fn matrix(&self, g: ArrowId) -> &CMatrix {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn n_arrows(&self) -> usize {
        self.matrices.len()
    }

    fn check_for(&self, g: &FiniteGroupoid) -> Result<()> {
        if self.matrices.len() != g.n_arrows() || self.fiber_dim.len() != g.n_points() {
            return Err(Error::Length { what: "representation arrows", expected: g.n_arrows(), found: self.matrices.len() });
        }
        Ok(())
    }

    /// `max_g ‖self(g) − other(g)‖`.
    pub fn max_distance(&self, other: &PseudoRep) -> f64 {
        self.matrices.iter().zip(&other.matrices).map(|(a, b)| distance(a, b)).fold(0.0, f64::max)
    }
}

fn check_sigma(g: &FiniteGroupoid, sigma: &Multiplier) -> Result<()> {
    if sigma.n_arrows() != g.n_arrows() {
        return Err(Error::Length { what: "multiplier arrows", expected: g.n_arrows(), found: sigma.n_arrows() });
    }
    Ok(())
}

/// `‖σ(g,h)T(gh) − T(g)T(h)‖`.
fn multiplicative_residual(g: &FiniteGroupoid, sigma: &Multiplier, t: &PseudoRep, a: ArrowId, b: ArrowId) -> f64 {
    let lhs = t.matrix(g.mul(a, b)) * sigma.get(a, b);
    let rhs = t.matrix(a) * t.matrix(b);
    distance(&lhs, &rhs)
}

fn unit_residual(g: &FiniteGroupoid, t: &PseudoRep, x: PointId) -> f64 {
    distance(t.matrix(g.unit(x)), &identity(t.fiber_dim(x)))
}

/// Unitality `T(1x) = I` and multiplicativity `σ(g,h)T(gh) = T(g)T(h)` up to `tol`.
pub fn validate_rep(g: &FiniteGroupoid, sigma: &Multiplier, t: &PseudoRep, tol: f64) -> Report {
    let mut report = Report::new();
    if check_sigma(g, sigma).is_err() || t.check_for(g).is_err() {
        report.push(Violation::arrows(ViolationKind::Shape, &[]));
        return report;
    }
    for x in 0..g.n_points() {
        let d = unit_residual(g, t, x);
        if !(d <= tol) {
            let v = Violation::points(ViolationKind::Unital, &[x]).with_arrow(g.unit(x));
            report.push(v.with_magnitude(d));
        }
    }
    for (a, b) in g.composable_pairs() {
        let d = multiplicative_residual(g, sigma, t, a, b);
        if !(d <= tol) {
            report.push(Violation::arrows(ViolationKind::Multiplicative, &[a, b]).with_magnitude(d));
        }
    }
    report
}

/// Defect `r` and bound `b` on one orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitDefect {
    pub orbit: usize,
    pub defect: f64,
    pub bound: f64,
}

/// Per orbit: `r = max_y ‖I − T(1y)‖ + max ℓ(σ,g)‖σ(g,h)T(gh) − T(g)T(h)‖`
/// and `b = max ℓ(σ,g)‖T(g)‖`, over arrows `g` with target in the orbit.
pub fn defect_and_bound(g: &FiniteGroupoid, sigma: &Multiplier, t: &PseudoRep) -> Result<Vec<OrbitDefect>> {
    check_sigma(g, sigma)?;
    t.check_for(g)?;
    let n_orbits = g.orbits().len();
    let mut unit = alloc::vec![0.0f64; n_orbits];
    let mut mult = alloc::vec![0.0f64; n_orbits];
    let mut bound = alloc::vec![0.0f64; n_orbits];
    for x in 0..g.n_points() {
        let o = g.orbit_of(x);
        unit[o] = unit[o].max(unit_residual(g, t, x));
    }
    for a in 0..g.n_arrows() {
        let o = g.orbit_of(g.tgt(a));
        let l = ell(g, sigma, a);
        bound[o] = bound[o].max(l * norm_unchecked(t.matrix(a)));
        for &b in g.target_fiber(g.src(a)) {
            mult[o] = mult[o].max(l * multiplicative_residual(g, sigma, t, a, b));
        }
    }
    let out = (0..n_orbits)
        .map(|o| OrbitDefect { orbit: o, defect: unit[o] + mult[o], bound: bound[o] })
        .collect::<Vec<_>>();
    if out.iter().any(|d| !(d.defect.is_finite() && d.bound.is_finite())) {
        return Err(Error::NonFinite);
    }
    Ok(out)
}

/// `min{1/4, b⁻²/9}`, which is 1/4 when `b = 0`.
pub fn almost_threshold(bound: f64) -> f64 {
    if bound == 0.0 {
        0.25
    } else {
        f64::min(0.25, 1.0 / (9.0 * bound * bound))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitMargin {
    pub orbit: usize,
    pub defect: f64,
    pub bound: f64,
    pub threshold: f64,
    /// `threshold − defect`; nonnegative exactly when the orbit passes.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlmostCheck {
    pub almost: bool,
    pub orbits: Vec<OrbitMargin>,
}

impl AlmostCheck {
    pub fn first_failure(&self) -> Option<&OrbitMargin> {
        self.orbits.iter().find(|m| !(m.margin >= 0.0))
    }

    fn into_result(self) -> Result<Vec<OrbitMargin>> {
        match self.first_failure() {
            Some(m) => Err(Error::NotAlmost { orbit: m.orbit, defect: m.defect, threshold: m.threshold }),
            None => Ok(self.orbits),
        }
    }
}

/// `r ≤ min{1/4, b⁻²/9}` on every orbit.
pub fn is_almost(g: &FiniteGroupoid, sigma: &Multiplier, t: &PseudoRep) -> Result<AlmostCheck> {
    let orbits: Vec<OrbitMargin> = defect_and_bound(g, sigma, t)?
        .into_iter()
        .map(|d| {
            let threshold = almost_threshold(d.bound);
            OrbitMargin { orbit: d.orbit, defect: d.defect, bound: d.bound, threshold, margin: threshold - d.defect }
        })
        .collect();
    let almost = orbits.iter().all(|m| m.margin >= 0.0);
    Ok(AlmostCheck { almost, orbits })
}

/// Arrow-wise inverses `T(g)⁻¹: E_{tgt g} → E_{src g}` with their norm certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrowInverse {
    pub matrices: Vec<CMatrix>,
    /// `‖T(g)⁻¹‖`.
    pub norms: Vec<f64>,
    /// `b/(1 − r)` on the orbit of `g`.
    pub bounds: Vec<f64>,
}

fn invert_all(t: &PseudoRep) -> Result<Vec<CMatrix>> {
    t.matrices.iter().enumerate().map(|(a, m)| invert(m).ok_or(Error::Singular(a))).collect()
}

/// Inverts every matrix and certifies `‖T(g)⁻¹‖ ≤ b/(1 − r)`.
pub fn invert_with_bound_check(g: &FiniteGroupoid, sigma: &Multiplier, t: &PseudoRep) -> Result<ArrowInverse> {
    t.check_for(g)?;
    let matrices = invert_all(t)?;
    let orbits = is_almost(g, sigma, t)?.into_result()?;
    let mut norms = Vec::with_capacity(matrices.len());
    let mut bounds = Vec::with_capacity(matrices.len());
    for (a, inv) in matrices.iter().enumerate() {
        let m = &orbits[g.orbit_of(g.tgt(a))];
        let bound = m.bound / (1.0 - m.defect);
        let norm = norm_unchecked(inv);
        if norm > bound + INVERSE_CERT_TOL * bound.max(1.0) {
            return Err(Error::InverseBound { arrow: a, norm, bound });
        }
        norms.push(norm);
        bounds.push(bound);
    }
    Ok(ArrowInverse { matrices, norms, bounds })
}

/// Adds uniform `[−ε, ε]` noise to real and imaginary parts of every entry
/// of every non-unit arrow, arrow-ascending and row-major.
pub fn perturb(g: &FiniteGroupoid, r: &PseudoRep, eps: f64, seed: u64) -> PseudoRep {
    if eps == 0.0 {
        return r.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let matrices = r
        .matrices
        .iter()
        .enumerate()
        .map(|(a, m)| {
            if g.is_unit(a) {
                return m.clone();
            }
            let mut out = m.clone();
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    let re = rng.gen_range(-eps..=eps);
                    let im = rng.gen_range(-eps..=eps);
                    out[(i, j)] += c(re, im);
                }
            }
            out
        })
        .collect();
    PseudoRep { fiber_dim: r.fiber_dim.clone(), matrices }
}

/// One row of a [`CorrectionTrace`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    /// Largest orbit defect of the iterate.
    pub defect_max: f64,
    /// Largest orbit bound of the iterate.
    pub bound_max: f64,
    /// `max_g ‖T̂ⁱ⁺¹(g) − T̂ⁱ(g)‖`; 0 on the final row, where no step is taken.
    pub step_max: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorrectionTrace {
    pub rows: Vec<TraceRow>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CorrectOptions {
    fn default() -> Self {
        CorrectOptions { tol: 1e-12, max_iter: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correction {
    pub rep: PseudoRep,
    pub trace: CorrectionTrace,
}

impl Averager<'_> {
    /// `T̂(g) = Σ_{tgt h = src g} μ(h)c(src h)·σ(g,h)·T(gh)·T(h)⁻¹`,
    /// summed in ascending arrow id. Unit arrows are set to `I`.
    pub fn average(&self, sigma: &Multiplier, t: &PseudoRep) -> Result<PseudoRep> {
        let g = self.groupoid;
        check_sigma(g, sigma)?;
        t.check_for(g)?;
        let inverses = invert_all(t)?;
        let matrices = (0..g.n_arrows())
            .map(|a| {
                let (rows, cols) = t.matrix(a).shape();
                if g.is_unit(a) {
                    return identity(rows);
                }
                let mut sum = CMatrix::zeros(rows, cols);
                for &h in g.target_fiber(g.src(a)) {
                    let coef = sigma.get(a, h) * self.weight[h];
                    sum += (t.matrix(g.mul(a, h)) * &inverses[h]) * coef;
                }
                sum
            })
            .collect();
        Ok(PseudoRep { fiber_dim: t.fiber_dim.clone(), matrices })
    }

    /// Iterates [`Averager::average`] until the largest orbit defect is at
    /// most `opts.tol`, returning the first such iterate.
    ///
    /// At most `opts.max_iter` averaging steps are taken; running out is
    /// [`Error::NoConvergence`] carrying the trace.
    pub fn correct(&self, sigma: &Multiplier, t: &PseudoRep, opts: CorrectOptions) -> Result<Correction> {
        let g = self.groupoid;
        check_sigma(g, sigma)?;
        t.check_for(g)?;
        validate_multiplier(g, sigma).into_result()?;
        is_almost(g, sigma, t)?.into_result()?;
        let mut trace = CorrectionTrace::default();
        let mut current = t.clone();
        for iteration in 0.. {
            let orbits = defect_and_bound(g, sigma, &current)?;
            let defect_max = orbits.iter().map(|d| d.defect).fold(0.0, f64::max);
            let bound_max = orbits.iter().map(|d| d.bound).fold(0.0, f64::max);
            if defect_max <= opts.tol {
                trace.rows.push(TraceRow { iteration, defect_max, bound_max, step_max: 0.0 });
                return Ok(Correction { rep: current, trace });
            }
            if iteration >= opts.max_iter {
                trace.rows.push(TraceRow { iteration, defect_max, bound_max, step_max: 0.0 });
                return Err(Error::NoConvergence(trace));
            }
            let next = self.average(sigma, &current)?;
            let step_max = next.max_distance(&current);
            trace.rows.push(TraceRow { iteration, defect_max, bound_max, step_max });
            current = next;
        }
        unreachable!()
    }
}

/// `max_g ‖L_{tgt g}·from(g) − to(g)·L_{src g}‖`.
pub fn intertwiner_residual(g: &FiniteGroupoid, from: &PseudoRep, to: &PseudoRep, l: &[CMatrix]) -> f64 {
    (0..g.n_arrows())
        .map(|a| distance(&(&l[g.tgt(a)] * from.matrix(a)), &(to.matrix(a) * &l[g.src(a)])))
        .fold(0.0, f64::max)
}

//! Scalar multipliers: normal 2-cocycles on composable pairs.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::groupoid::{ArrowId, FiniteGroupoid};
use crate::linalg::{abs, c, Complex64};
use crate::measure::Averager;
use crate::report::{Report, Violation, ViolationKind};

/// Absolute tolerance of the normality and cocycle checks.
pub const COCYCLE_TOL: f64 = 1e-12;

/// `σ(g, h)` stored densely; entries off composable pairs are 1 and unused.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiplier {
    n: usize,
    values: Vec<Complex64>,
}

impl Multiplier {
    /// `σ ≡ 1`.
    pub fn trivial(g: &FiniteGroupoid) -> Self {
        let n = g.n_arrows();
        Multiplier { n, values: vec![c(1.0, 0.0); n * n] }
    }

    /// `σ(g, h) = f(g, h)` on composable pairs.
    pub fn from_fn(g: &FiniteGroupoid, mut f: impl FnMut(ArrowId, ArrowId) -> Complex64) -> Self {
        let mut m = Self::trivial(g);
        for (a, b) in g.composable_pairs() {
            m.values[a * m.n + b] = f(a, b);
        }
        m
    }

    /// Sparse entries `(g, h, σ(g,h))` over `σ ≡ 1`.
    pub fn from_entries(g: &FiniteGroupoid, entries: &[(ArrowId, ArrowId, Complex64)]) -> Result<Self> {
        let mut m = Self::trivial(g);
        let mut report = Report::new();
        for &(a, b, v) in entries {
            if a >= m.n || b >= m.n {
                report.push(Violation::arrows(ViolationKind::DanglingId, &[a, b]));
            } else if !g.composable(a, b) {
                report.push(Violation::arrows(ViolationKind::NotComposable, &[a, b]));
            } else {
                m.values[a * m.n + b] = v;
            }
        }
        report.into_result()?;
        Ok(m)
    }

    pub fn n_arrows(&self) -> usize {
        self.n
    }

    pub fn get(&self, g: ArrowId, h: ArrowId) -> Complex64 {
        self.values[g * self.n + h]
    }

    pub fn set(&mut self, g: ArrowId, h: ArrowId, v: Complex64) {
        self.values[g * self.n + h] = v;
    }

    /// Composable pairs whose value is not exactly 1.
    pub fn nontrivial_entries(&self, g: &FiniteGroupoid) -> Vec<(ArrowId, ArrowId, Complex64)> {
        g.composable_pairs()
            .map(|(a, b)| (a, b, self.get(a, b)))
            .filter(|&(_, _, v)| v != c(1.0, 0.0))
            .collect()
    }

    /// Largest `| |σ(g,h)| − 1 |` over composable pairs.
    pub fn isometry_defect(&self, g: &FiniteGroupoid) -> f64 {
        g.composable_pairs().map(|(a, b)| (abs(self.get(a, b)) - 1.0).abs()).fold(0.0, f64::max)
    }

    /// First composable pair with `| |σ| − 1 | > tol`.
    pub fn check_isometric(&self, g: &FiniteGroupoid, tol: f64) -> Result<()> {
        match g.composable_pairs().find(|&(a, b)| !((abs(self.get(a, b)) - 1.0).abs() <= tol)) {
            Some((a, b)) => Err(Error::NotIsometric(a, b)),
            None => Ok(()),
        }
    }
}

/// Normality and the cocycle identity `σ(g,h)σ(gh,k) = σ(h,k)σ(g,hk)`.
pub fn validate_multiplier(g: &FiniteGroupoid, sigma: &Multiplier) -> Report {
    let mut report = Report::new();
    report.note("centrality holds for scalar coefficients");
    if sigma.n != g.n_arrows() {
        report.push(Violation::arrows(ViolationKind::Shape, &[]));
        return report;
    }
    let one = c(1.0, 0.0);
    for (a, b) in g.composable_pairs() {
        let v = sigma.get(a, b);
        if !(v.re.is_finite() && v.im.is_finite()) || v == c(0.0, 0.0) {
            report.push(Violation::arrows(ViolationKind::NotInvertible, &[a, b]));
        }
    }
    if !report.is_valid() {
        return report;
    }
    for (a, b) in g.composable_pairs() {
        if g.is_unit(a) || g.is_unit(b) {
            let d = abs(sigma.get(a, b) - one);
            if d > COCYCLE_TOL {
                report.push(Violation::arrows(ViolationKind::Normality, &[a, b]).with_magnitude(d));
            }
        }
    }
    for (a, b) in g.composable_pairs() {
        let ab = g.mul(a, b);
        for &k in g.target_fiber(g.src(b)) {
            let lhs = sigma.get(a, b) * sigma.get(ab, k);
            let rhs = sigma.get(b, k) * sigma.get(a, g.mul(b, k));
            let d = abs(lhs - rhs);
            if d > COCYCLE_TOL {
                report.push(Violation::arrows(ViolationKind::Cocycle, &[a, b, k]).with_magnitude(d));
            }
        }
    }
    report
}

/// `ℓ(σ, g) = max{1, 1/|σ(g, g⁻¹)|}`.
pub fn ell(g: &FiniteGroupoid, sigma: &Multiplier, a: ArrowId) -> f64 {
    f64::max(1.0, 1.0 / abs(sigma.get(a, g.inverse(a))))
}

/// Positive real 1-cochain with `ρ(1x) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain1 {
    values: Vec<f64>,
}

impl Cochain1 {
    pub fn trivial(g: &FiniteGroupoid) -> Self {
        Cochain1 { values: vec![1.0; g.n_arrows()] }
    }

    /// Unit values within `1e-12` of 1 are set to exactly 1; others are rejected.
    pub fn new(g: &FiniteGroupoid, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != g.n_arrows() {
            return Err(Error::Length { what: "cochain", expected: g.n_arrows(), found: values.len() });
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::NonFinite);
        }
        for x in 0..g.n_points() {
            let u = g.unit(x);
            if (values[u] - 1.0).abs() > COCYCLE_TOL {
                return Err(Error::UnitCochain(x));
            }
            values[u] = 1.0;
        }
        Ok(Cochain1 { values })
    }

    pub fn get(&self, g: ArrowId) -> f64 {
        self.values[g]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Cochain1) -> Cochain1 {
        Cochain1 { values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect() }
    }
}

/// `σ̃(g,h) = ρ(g)ρ(h)/ρ(gh)·σ(g,h)`.
pub fn apply_coboundary(g: &FiniteGroupoid, sigma: &Multiplier, rho: &Cochain1) -> Result<Multiplier> {
    if rho.values.len() != g.n_arrows() {
        return Err(Error::Length { what: "cochain", expected: g.n_arrows(), found: rho.values.len() });
    }
    if sigma.n != g.n_arrows() {
        return Err(Error::Length { what: "multiplier", expected: g.n_arrows(), found: sigma.n });
    }
    for x in 0..g.n_points() {
        if rho.get(g.unit(x)) != 1.0 {
            return Err(Error::UnitCochain(x));
        }
    }
    Ok(Multiplier::from_fn(g, |a, b| {
        let f = (rho.get(a) * rho.get(b)) / rho.get(g.mul(a, b));
        sigma.get(a, b) * f
    }))
}

impl Averager<'_> {
    /// Cohomologous isometric multiplier.
    ///
    /// `α(g) = Σ_{tgt h = src g} μ(h)c(src h)·log|σ(g,h)|`, `ρ = exp(−α)`,
    /// `σ̃ = apply_coboundary(σ, ρ)`.
    pub fn isometrize(&self, sigma: &Multiplier) -> Result<(Cochain1, Multiplier)> {
        let g = self.groupoid;
        validate_multiplier(g, sigma).into_result()?;
        let rho: Vec<f64> = (0..g.n_arrows())
            .map(|a| {
                if g.is_unit(a) {
                    return 1.0;
                }
                let alpha: f64 = g
                    .target_fiber(g.src(a))
                    .iter()
                    .map(|&h| self.weight[h] * libm::log(abs(sigma.get(a, h))))
                    .sum();
                libm::exp(-alpha)
            })
            .collect();
        let rho = Cochain1::new(g, rho)?;
        let tilde = apply_coboundary(g, sigma, &rho)?;
        tilde.check_isometric(g, COCYCLE_TOL)?;
        Ok((rho, tilde))
    }
}

/// Random valid multiplier `σ(g,h) = λ(g)λ(h)/λ(gh)·base(g,h)`.
///
/// `λ(g) = exp(a + iθ)` with `a` uniform in `[−log_spread, log_spread]` and
/// `θ` uniform in `[−π, π]`, `λ(1x) = 1`; hence
/// `|σ| ∈ [e^{−3·log_spread}, e^{3·log_spread}]·|base|`.
pub fn random_multiplier(g: &FiniteGroupoid, base: &Multiplier, log_spread: f64, seed: u64) -> Multiplier {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambda: Vec<Complex64> = (0..g.n_arrows())
        .map(|a| {
            let r = rng.gen_range(-log_spread..=log_spread);
            let t = rng.gen_range(-core::f64::consts::PI..=core::f64::consts::PI);
            if g.is_unit(a) {
                c(1.0, 0.0)
            } else {
                let m = libm::exp(r);
                c(m * libm::cos(t), m * libm::sin(t))
            }
        })
        .collect();
    Multiplier::from_fn(g, |a, b| {
        if g.is_unit(a) || g.is_unit(b) {
            base.get(a, b)
        } else {
            (lambda[a] * lambda[b]) / lambda[g.mul(a, b)] * base.get(a, b)
        }
    })
}

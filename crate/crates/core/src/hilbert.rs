//! Averaged inner products and unitarization.

use alloc::vec::Vec;

use crate::cocycle::{Multiplier, COCYCLE_TOL};
use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, PointId};
use crate::linalg::{c, distance, hermitian_sqrt, unitarity_defect, CMatrix};
use crate::measure::Averager;
use crate::rep::{validate_rep, PseudoRep};

/// Tolerance for accepting the input of [`Averager::averaged_gram`] as exact.
pub const EXACT_TOL: f64 = 1e-10;

/// Hermitian positive definite `H_v` per point.
#[derive(Debug, Clone, PartialEq)]
pub struct GramFamily {
    pub grams: Vec<CMatrix>,
}

impl GramFamily {
    /// `max_g ‖H_{src g} − S(g)*·H_{tgt g}·S(g)‖`.
    pub fn invariance_residual(&self, g: &FiniteGroupoid, s: &PseudoRep) -> f64 {
        (0..g.n_arrows())
            .map(|a| {
                let m = s.matrix(a);
                distance(&self.grams[g.src(a)], &(m.adjoint() * &self.grams[g.tgt(a)] * m))
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unitarized {
    /// `S̃(g) = H_{tgt g}^{1/2}·S(g)·H_{src g}^{−1/2}`.
    pub rep: PseudoRep,
    pub gram: GramFamily,
    /// `L_v = H_v^{1/2}`, with `L_{tgt g}·S(g) = S̃(g)·L_{src g}`.
    pub intertwiner: Vec<CMatrix>,
}

impl Averager<'_> {
    /// `H_v = Σ_{tgt h = v} μ(h)c(src h)·S(h⁻¹)*·S(h⁻¹)`.
    pub fn averaged_gram(&self, sigma: &Multiplier, s: &PseudoRep) -> Result<GramFamily> {
        let g = self.groupoid;
        validate_rep(g, sigma, s, EXACT_TOL).into_result()?;
        sigma.check_isometric(g, COCYCLE_TOL)?;
        let grams = (0..g.n_points())
            .map(|v| {
                let n = s.fiber_dim(v);
                let mut h = CMatrix::zeros(n, n);
                for &a in g.target_fiber(v) {
                    let m = s.matrix(g.inverse(a));
                    h += (m.adjoint() * m) * c(self.weight[a], 0.0);
                }
                h
            })
            .collect();
        Ok(GramFamily { grams })
    }

    /// Conjugates an exact isometric σ-representation to a unitary one.
    pub fn unitarize(&self, sigma: &Multiplier, s: &PseudoRep) -> Result<Unitarized> {
        let g = self.groupoid;
        let gram = self.averaged_gram(sigma, s)?;
        let mut roots = Vec::with_capacity(g.n_points());
        let mut inv_roots = Vec::with_capacity(g.n_points());
        for (point, h) in gram.grams.iter().enumerate() {
            let (r, ri) = hermitian_sqrt(h)
                .map_err(|min_eigenvalue| Error::NotPositiveDefinite { point, min_eigenvalue })?;
            roots.push(r);
            inv_roots.push(ri);
        }
        let matrices = (0..g.n_arrows())
            .map(|a| &roots[g.tgt(a)] * s.matrix(a) * &inv_roots[g.src(a)])
            .collect();
        let rep = PseudoRep::new(g, s.fiber_dims().to_vec(), matrices)?;
        Ok(Unitarized { rep, gram, intertwiner: roots })
    }
}

/// `‖S(g)*S(g) − I‖ ≤ tol` per arrow; non-square matrices are not unitary.
pub fn is_unitary(s: &PseudoRep, tol: f64) -> Vec<bool> {
    s.matrices().iter().map(|m| unitarity_defect(m) <= tol).collect()
}

/// First arrow whose matrix is not unitary within `tol`.
pub fn check_unitary(s: &PseudoRep, tol: f64) -> Result<()> {
    match is_unitary(s, tol).iter().position(|u| !u) {
        Some(a) => Err(Error::NotUnitary(a)),
        None => Ok(()),
    }
}

/// Points whose isotropy group already acts unitarily.
pub fn unitary_isotropy_points(g: &FiniteGroupoid, s: &PseudoRep, tol: f64) -> Vec<PointId> {
    (0..g.n_points())
        .filter(|&x| g.arrows_between(x, x).iter().all(|&a| unitarity_defect(s.matrix(a)) <= tol))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::cyclic_table;
    use crate::groupoid::build_group;
    use crate::linalg::{identity, real};

    #[test]
    fn z2_triangular_gram() {
        let g = build_group(cyclic_table(2)).unwrap();
        let sigma = Multiplier::trivial(&g);
        let s = PseudoRep::new(&g, alloc::vec![2], alloc::vec![identity(2), real(2, 2, &[1.0, 1.0, 0.0, -1.0])]).unwrap();
        assert_eq!(is_unitary(&s, 1e-10), [true, false]);
        let avg = Averager::counting(&g);
        let gram = avg.averaged_gram(&sigma, &s).unwrap();
        assert!(distance(&gram.grams[0], &real(2, 2, &[1.0, 0.5, 0.5, 1.5])) <= 1e-12);
        let u = avg.unitarize(&sigma, &s).unwrap();
        assert!(is_unitary(&u.rep, 1e-10).iter().all(|&b| b));
        let sq = u.rep.matrix(1) * u.rep.matrix(1);
        assert!(distance(&sq, &identity(2)) < 1e-12);
    }

    #[test]
    fn swap_is_unitary() {
        let g = build_group(cyclic_table(2)).unwrap();
        let s = PseudoRep::new(&g, alloc::vec![2], alloc::vec![identity(2), real(2, 2, &[0.0, 1.0, 1.0, 0.0])]).unwrap();
        assert!(is_unitary(&s, 1e-12).iter().all(|&b| b));
    }
}

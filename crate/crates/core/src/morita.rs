//! Inverse and direct images along homomorphisms, extension off an invariant
//! locus, the regular representation and arrow separation.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::cocycle::{Multiplier, COCYCLE_TOL};
use crate::error::{Error, Result};
use crate::groupoid::{restrict, ArrowId, FiniteGroupoid, Homomorphism, PointId};
use crate::hilbert::check_unitary;
use crate::linalg::{c, identity, max_entry_distance, CMatrix};
use crate::measure::{validate_haar, Averager, HaarSystem};
use crate::rep::{is_almost, Correction, CorrectOptions, PseudoRep};

/// Tolerance for unitarity of the input to [`Morita::pushforward`] and for
/// [`separates`].
pub const MORITA_TOL: f64 = 1e-10;

/// A failed PF1 instance: the arrow `g: φ(from) → φ(to)` has `count` lifts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftFailure {
    pub arrow: ArrowId,
    pub from: PointId,
    pub to: PointId,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PfReport {
    pub pf1: bool,
    pub pf2: bool,
    /// Every PF1 failure, ordered by `(from, to, arrow)`.
    pub lift_failures: Vec<LiftFailure>,
    /// Codomain points not reached by `(g, y) ↦ tgt g`.
    pub unreached: Vec<PointId>,
    pub notes: Vec<&'static str>,
}

/// Representatives `(g_x, y_x)` with `tgt g_x = x` and `src g_x = φ(y_x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushforwardSection {
    pub reps: Vec<(ArrowId, PointId)>,
}

/// A homomorphism `φ: H → G` between validated groupoids.
#[derive(Debug, Clone, Copy)]
pub struct Morita<'a> {
    pub domain: &'a FiniteGroupoid,
    pub codomain: &'a FiniteGroupoid,
    pub hom: &'a Homomorphism,
}

impl<'a> Morita<'a> {
    pub fn new(domain: &'a FiniteGroupoid, codomain: &'a FiniteGroupoid, hom: &'a Homomorphism) -> Result<Self> {
        hom.validate(domain, codomain).into_result()?;
        Ok(Morita { domain, codomain, hom })
    }

    pub fn check_pf(&self) -> PfReport {
        let (h, g, phi) = (self.domain, self.codomain, self.hom);
        let mut lift_failures = Vec::new();
        for y in 0..h.n_points() {
            for z in 0..h.n_points() {
                let mut counts: BTreeMap<ArrowId, usize> =
                    g.arrows_between(phi.points[y], phi.points[z]).into_iter().map(|a| (a, 0)).collect();
                for k in h.arrows_between(y, z) {
                    *counts.get_mut(&phi.arrows[k]).expect("homomorphism respects endpoints") += 1;
                }
                for (arrow, count) in counts {
                    if count != 1 {
                        lift_failures.push(LiftFailure { arrow, from: y, to: z, count });
                    }
                }
            }
        }
        let mut image = vec![false; g.n_points()];
        for &x in &phi.points {
            image[x] = true;
        }
        let unreached = (0..g.n_points())
            .filter(|&x| !g.target_fiber(x).iter().any(|&a| image[g.src(a)]))
            .collect::<Vec<_>>();
        PfReport {
            pf1: lift_failures.is_empty(),
            pf2: unreached.is_empty(),
            lift_failures,
            unreached,
            notes: vec![
                "PF2 quotient topology is automatic for finite discrete spaces",
                "PF3 holds with the identity transport for scalar coefficients",
            ],
        }
    }

    fn require_pf(&self) -> Result<()> {
        let pf = self.check_pf();
        if let Some(f) = pf.lift_failures.first() {
            return Err(Error::Lift { arrow: f.arrow, from: f.from, to: f.to, count: f.count });
        }
        if let Some(&x) = pf.unreached.first() {
            return Err(Error::NotSurjective(x));
        }
        Ok(())
    }

    /// The unique `h: y → z` with `φ(h) = g`.
    pub fn resolve(&self, g: ArrowId, y: PointId, z: PointId) -> Result<ArrowId> {
        let found: Vec<ArrowId> =
            self.domain.arrows_between(y, z).into_iter().filter(|&k| self.hom.arrows[k] == g).collect();
        match found[..] {
            [k] => Ok(k),
            _ => Err(Error::Lift { arrow: g, from: y, to: z, count: found.len() }),
        }
    }

    /// `φ*σ(h,k) = σ(φh, φk)`.
    pub fn pullback_multiplier(&self, sigma: &Multiplier) -> Multiplier {
        Multiplier::from_fn(self.domain, |a, b| sigma.get(self.hom.arrows[a], self.hom.arrows[b]))
    }

    /// `(φ*σ, S)` with `S(h) = R(φh)` and fibers `F_y = E_{φy}`.
    pub fn pullback(&self, sigma: &Multiplier, r: &PseudoRep) -> Result<(Multiplier, PseudoRep)> {
        let dims = self.hom.points.iter().map(|&x| r.fiber_dim(x)).collect();
        let matrices = self.hom.arrows.iter().map(|&a| r.matrix(a).clone()).collect();
        let s = PseudoRep::new(self.domain, dims, matrices)?;
        Ok((self.pullback_multiplier(sigma), s))
    }

    fn smallest_preimage(&self, x: PointId) -> Option<PointId> {
        self.hom.points.iter().position(|&p| p == x)
    }

    /// For each `x`, the smallest arrow `g` into `x` whose source is in the
    /// image of `φ`, with the smallest `y` such that `φ(y) = src g`.
    pub fn default_section(&self) -> Result<PushforwardSection> {
        let g = self.codomain;
        let reps = (0..g.n_points())
            .map(|x| {
                g.target_fiber(x)
                    .iter()
                    .find_map(|&a| self.smallest_preimage(g.src(a)).map(|y| (a, y)))
                    .ok_or(Error::MissingRepresentative(x))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PushforwardSection { reps })
    }

    /// Section from one arrow per codomain point, each paired with the
    /// smallest `y` over its source.
    pub fn section_from_arrows(&self, arrows: &[ArrowId]) -> Result<PushforwardSection> {
        let g = self.codomain;
        if arrows.len() != g.n_points() {
            return Err(Error::Length { what: "section", expected: g.n_points(), found: arrows.len() });
        }
        let reps = arrows
            .iter()
            .enumerate()
            .map(|(x, &a)| {
                g.check_arrow(a)?;
                let y = self.smallest_preimage(g.src(a)).ok_or(Error::BadRepresentative { point: x, arrow: a })?;
                Ok((a, y))
            })
            .collect::<Result<Vec<_>>>()?;
        let section = PushforwardSection { reps };
        self.check_section(&section)?;
        Ok(section)
    }

    pub fn check_section(&self, section: &PushforwardSection) -> Result<()> {
        let g = self.codomain;
        if section.reps.len() != g.n_points() {
            return Err(Error::MissingRepresentative(section.reps.len().min(g.n_points())));
        }
        for (x, &(a, y)) in section.reps.iter().enumerate() {
            let ok = a < g.n_arrows()
                && y < self.domain.n_points()
                && g.tgt(a) == x
                && g.src(a) == self.hom.points[y];
            if !ok {
                return Err(Error::BadRepresentative { point: x, arrow: a });
            }
        }
        Ok(())
    }

    /// Direct image `φ_*S` of an isometric φ*σ-representation.
    ///
    /// `E_x = F_{y_x}`; for `g': x₁ → x₂` let `h: y₁ → y₂` be the lift of
    /// `g₂⁻¹·g'·g₁`; then `R(g') = σ(g₂, φh)⁻¹·σ(g', g₁)·S(h)`.
    pub fn pushforward(&self, sigma: &Multiplier, s: &PseudoRep, section: &PushforwardSection) -> Result<PseudoRep> {
        let g = self.codomain;
        self.require_pf()?;
        self.check_section(section)?;
        sigma.check_isometric(g, COCYCLE_TOL)?;
        check_unitary(s, MORITA_TOL)?;
        let dims = section.reps.iter().map(|&(_, y)| s.fiber_dim(y)).collect();
        let matrices = (0..g.n_arrows())
            .map(|a| {
                let (g1, y1) = section.reps[g.src(a)];
                let (g2, y2) = section.reps[g.tgt(a)];
                let k = g.mul(g.inverse(g2), g.mul(a, g1));
                let h = self.resolve(k, y1, y2)?;
                let coef = sigma.get(a, g1) / sigma.get(g2, self.hom.arrows[h]);
                Ok(s.matrix(h) * coef)
            })
            .collect::<Result<Vec<_>>>()?;
        PseudoRep::new(g, dims, matrices)
    }

    /// `L_y: F_y → E_{φy}`, `L_y = σ(g_x, φh)⁻¹·S(h)` where `x = φ(y)` and
    /// `h: y → y_x` lifts `g_x⁻¹`. Intertwines `S` with `φ*R`.
    pub fn canonical_equivalence(
        &self,
        sigma: &Multiplier,
        s: &PseudoRep,
        section: &PushforwardSection,
    ) -> Result<Vec<CMatrix>> {
        let g = self.codomain;
        self.check_section(section)?;
        (0..self.domain.n_points())
            .map(|y| {
                let x = self.hom.points[y];
                let (gx, yx) = section.reps[x];
                let h = self.resolve(g.inverse(gx), y, yx)?;
                let coef = c(1.0, 0.0) / sigma.get(gx, self.hom.arrows[h]);
                Ok(s.matrix(h) * coef)
            })
            .collect()
    }

    /// `M_x: E¹_x → E²_x` between pushforwards along two sections,
    /// `M_x = σ(g²_x, φh)⁻¹·S(h)` with `h: y¹_x → y²_x` lifting `(g²_x)⁻¹·g¹_x`.
    pub fn section_comparison(
        &self,
        sigma: &Multiplier,
        s: &PseudoRep,
        first: &PushforwardSection,
        second: &PushforwardSection,
    ) -> Result<Vec<CMatrix>> {
        let g = self.codomain;
        self.check_section(first)?;
        self.check_section(second)?;
        (0..g.n_points())
            .map(|x| {
                let (g1, y1) = first.reps[x];
                let (g2, y2) = second.reps[x];
                let h = self.resolve(g.mul(g.inverse(g2), g1), y1, y2)?;
                let coef = c(1.0, 0.0) / sigma.get(g2, self.hom.arrows[h]);
                Ok(s.matrix(h) * coef)
            })
            .collect()
    }
}

impl Averager<'_> {
    /// Assembles `R_O` on `G|O` with `t_out` elsewhere (unit arrows set to
    /// `I`) and corrects it. Entries of `t_out` on arrows of `G|O` are
    /// ignored.
    ///
    /// The result agrees with `R_O` on `G|O` since the defect vanishes there
    /// and averaging over points of `O` only involves arrows of `G|O`.
    pub fn extend_and_correct(
        &self,
        sigma: &Multiplier,
        locus: &[PointId],
        r_locus: &PseudoRep,
        t_out: &BTreeMap<ArrowId, CMatrix>,
        opts: CorrectOptions,
    ) -> Result<Correction> {
        let g = self.groupoid;
        let (sub, incl) = restrict(g, locus)?;
        let mut inside = vec![false; g.n_points()];
        for &x in &incl.points {
            inside[x] = true;
        }
        for a in 0..g.n_arrows() {
            if inside[g.src(a)] && !inside[g.tgt(a)] {
                return Err(Error::NotInvariant(g.tgt(a)));
            }
        }
        if r_locus.n_arrows() != sub.n_arrows() || r_locus.fiber_dims().len() != sub.n_points() {
            return Err(Error::Length { what: "locus representation", expected: sub.n_arrows(), found: r_locus.n_arrows() });
        }

        let mut dims: Vec<Option<usize>> = vec![None; g.n_points()];
        for (i, &x) in incl.points.iter().enumerate() {
            dims[x] = Some(r_locus.fiber_dim(i));
        }
        for (&a, m) in t_out {
            g.check_arrow(a)?;
            if inside[g.src(a)] {
                continue;
            }
            for (x, d) in [(g.tgt(a), m.nrows()), (g.src(a), m.ncols())] {
                match dims[x] {
                    None => dims[x] = Some(d),
                    Some(e) if e != d => {
                        return Err(Error::Shape { arrow: a, expected: (dims[g.tgt(a)].unwrap_or(d), dims[g.src(a)].unwrap_or(d)), found: m.shape() })
                    }
                    _ => {}
                }
            }
        }
        let missing = (0..g.n_arrows())
            .filter(|&a| !inside[g.src(a)] && !g.is_unit(a) && !t_out.contains_key(&a))
            .count();
        let unknown_dim = (0..g.n_points()).filter(|&x| dims[x].is_none()).count();
        if missing > 0 || unknown_dim > 0 {
            return Err(Error::MissingArrows(missing + unknown_dim));
        }
        let dims: Vec<usize> = dims.into_iter().map(|d| d.unwrap_or(0)).collect();

        let mut local = vec![usize::MAX; g.n_arrows()];
        for (i, &a) in incl.arrows.iter().enumerate() {
            local[a] = i;
        }
        let matrices = (0..g.n_arrows())
            .map(|a| {
                if inside[g.src(a)] {
                    r_locus.matrix(local[a]).clone()
                } else if g.is_unit(a) {
                    identity(dims[g.src(a)])
                } else {
                    t_out[&a].clone()
                }
            })
            .collect();
        let t = PseudoRep::new(g, dims, matrices)?;
        let check = is_almost(g, sigma, &t)?;
        if let Some(m) = check.first_failure() {
            return Err(Error::NotAlmost { orbit: m.orbit, defect: m.defect, threshold: m.threshold });
        }
        self.correct(sigma, &t, opts)
    }
}

/// Left regular representation on `ℓ²(G^x)`.
///
/// The basis of the fiber at `x` is `G^x` in ascending arrow id, rescaled
/// by `μ^{-1/2}`; `R(g)` sends `e_h` to `e_{gh}`. Left invariance of `μ`
/// makes every `R(g)` a permutation matrix.
pub fn regular_rep(g: &FiniteGroupoid, mu: &HaarSystem) -> Result<PseudoRep> {
    validate_haar(g, mu).into_result()?;
    let position = |x: PointId, a: ArrowId| g.target_fiber(x).binary_search(&a).expect("arrow lies in its target fiber");
    let dims: Vec<usize> = (0..g.n_points()).map(|x| g.target_fiber(x).len()).collect();
    let matrices = (0..g.n_arrows())
        .map(|a| {
            let (s, t) = (g.src(a), g.tgt(a));
            let mut m = CMatrix::zeros(dims[t], dims[s]);
            for (j, &h) in g.target_fiber(s).iter().enumerate() {
                m[(position(t, g.mul(a, h)), j)] = c(1.0, 0.0);
            }
            m
        })
        .collect();
    PseudoRep::new(g, dims, matrices)
}

/// Whether `g ↦ (src g, tgt g, (R_i(g))_i)` is injective; on failure the
/// lexicographically smallest pair of arrows with equal images.
pub fn separates(g: &FiniteGroupoid, reps: &[PseudoRep]) -> core::result::Result<(), (ArrowId, ArrowId)> {
    for a in 0..g.n_arrows() {
        for b in g.arrows_between(g.src(a), g.tgt(a)) {
            if b <= a {
                continue;
            }
            let equal = reps.iter().all(|r| max_entry_distance(r.matrix(a), r.matrix(b)) <= MORITA_TOL);
            if equal {
                return Err((a, b));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{cyclic_table, z4_action};
    use crate::groupoid::{build_group, isotropy, pair_groupoid, unit_groupoid};
    use crate::linalg::real;
    use crate::measure::normalized_counting_haar;
    use crate::rep::validate_rep;

    fn z2_sign() -> PseudoRep {
        let z2 = build_group(cyclic_table(2)).unwrap();
        PseudoRep::new(&z2, vec![1], vec![identity(1), real(1, 1, &[-1.0])]).unwrap()
    }

    #[test]
    fn z4_action_pushforward() {
        let g = z4_action();
        let (h, incl) = restrict(&g, &[0]).unwrap();
        let m = Morita::new(&h, &g, &incl).unwrap();
        let pf = m.check_pf();
        assert!(pf.pf1 && pf.pf2);
        let sigma = Multiplier::trivial(&g);
        let sub_sigma = m.pullback_multiplier(&sigma);
        let section = m.section_from_arrows(&[g.unit(0), 2]).unwrap();
        assert_eq!(m.default_section().unwrap(), section);
        let r = m.pushforward(&sigma, &z2_sign(), &section).unwrap();
        assert_eq!(r.matrix(3)[(0, 0)], c(-1.0, 0.0));
        assert!(validate_rep(&g, &sigma, &r, 1e-12).is_valid());

        let l = m.canonical_equivalence(&sigma, &z2_sign(), &section).unwrap();
        assert_eq!(l, vec![identity(1)]);
        let (_, back) = m.pullback(&sigma, &r).unwrap();
        assert_eq!(crate::rep::intertwiner_residual(&h, &z2_sign(), &back, &l), 0.0);
        assert!(validate_rep(&h, &sub_sigma, &back, 1e-12).is_valid());
    }

    #[test]
    fn non_full_inclusion_fails_pf1() {
        let g = z4_action();
        let trivial = unit_groupoid(1);
        let incl = Homomorphism { points: vec![0], arrows: vec![g.unit(0)] };
        let m = Morita::new(&trivial, &g, &incl).unwrap();
        let pf = m.check_pf();
        assert!(!pf.pf1);
        assert_eq!(pf.lift_failures[0].count, 0);
    }

    #[test]
    fn pair_groupoid_isotropy_push() {
        let g = pair_groupoid(2);
        let iso = isotropy(&g, 0);
        let (h, incl) = restrict(&g, &[0]).unwrap();
        assert_eq!(incl.arrows, iso.arrows);
        let m = Morita::new(&h, &g, &incl).unwrap();
        let s = PseudoRep::identity(&h, vec![1]).unwrap();
        let sigma = Multiplier::trivial(&g);
        let r = m.pushforward(&sigma, &s, &m.default_section().unwrap()).unwrap();
        assert_eq!(r, PseudoRep::identity(&g, vec![1, 1]).unwrap());
    }

    #[test]
    fn regular_and_separation() {
        let z2 = build_group(cyclic_table(2)).unwrap();
        let reg = regular_rep(&z2, &normalized_counting_haar(&z2)).unwrap();
        assert_eq!(reg.matrix(1), &real(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert_eq!(separates(&z2, &[reg]), Ok(()));
        let trivial = PseudoRep::identity(&z2, vec![1]).unwrap();
        assert_eq!(separates(&z2, &[trivial]), Err((0, 1)));
        assert_eq!(separates(&z2, &[z2_sign()]), Ok(()));

        let units = unit_groupoid(2);
        let reg = regular_rep(&units, &normalized_counting_haar(&units)).unwrap();
        assert_eq!(reg.matrix(1), &identity(1));
    }
}

//! Small groupoids and exact representations used by tests, the CLI
//! examples and the acceptance suite.

use alloc::vec;
use alloc::vec::Vec;

use crate::cocycle::Multiplier;
use crate::groupoid::{
    build_group, build_group_bundle, build_transformation_groupoid, pair_groupoid, restrict,
    unit_groupoid, ArrowId, FiniteGroupoid, Group,
};
use crate::linalg::{c, complex, direct_sum, identity, real, CMatrix};
use crate::measure::normalized_counting_haar;
use crate::morita::{regular_rep, Morita};
use crate::rep::PseudoRep;

pub fn cyclic_table(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()
}

/// Permutations of `{0, 1, 2}` in lexicographic order.
pub const S3_ELEMENTS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// `table[a][b]` is the permutation `i ↦ p_a(p_b(i))`.
pub fn symmetric_group_table() -> Vec<Vec<usize>> {
    let index = |p: [usize; 3]| S3_ELEMENTS.iter().position(|&q| q == p).unwrap();
    S3_ELEMENTS
        .iter()
        .map(|p| S3_ELEMENTS.iter().map(|q| index([p[q[0]], p[q[1]], p[q[2]]])).collect())
        .collect()
}

/// `ℤ/2 × ℤ/2` as bit strings under XOR.
pub fn klein_table() -> Vec<Vec<usize>> {
    (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect()
}

pub fn z2() -> FiniteGroupoid {
    build_group(cyclic_table(2)).unwrap()
}

pub fn z4() -> FiniteGroupoid {
    build_group(cyclic_table(4)).unwrap()
}

pub fn s3() -> FiniteGroupoid {
    build_group(symmetric_group_table()).unwrap()
}

pub fn klein() -> FiniteGroupoid {
    build_group(klein_table()).unwrap()
}

/// `ℤ/2` over each of two points.
pub fn z2z2_bundle() -> FiniteGroupoid {
    let z2 = Group::from_table(cyclic_table(2)).unwrap();
    build_group_bundle(&[z2.clone(), z2])
}

/// Points `−1, 0, 1` (ids 0, 1, 2): `ℤ/2` over `±1`, trivial over 0.
pub fn pm_bundle() -> FiniteGroupoid {
    let z2 = Group::from_table(cyclic_table(2)).unwrap();
    let trivial = Group::from_table(vec![vec![0]]).unwrap();
    build_group_bundle(&[z2.clone(), trivial, z2])
}

/// `ℤ/4` acting on `{a, b}` (ids 0, 1), odd elements swapping.
/// Arrow `(k, x)` has id `2k + x`.
pub fn z4_action() -> FiniteGroupoid {
    let group = Group::from_table(cyclic_table(4)).unwrap();
    let action: Vec<Vec<usize>> = (0..4).map(|k| if k % 2 == 0 { vec![0, 1] } else { vec![1, 0] }).collect();
    build_transformation_groupoid(&group, 2, &action).unwrap()
}

/// `S₃` permuting three points.
pub fn s3_action() -> FiniteGroupoid {
    let group = Group::from_table(symmetric_group_table()).unwrap();
    let action: Vec<Vec<usize>> = S3_ELEMENTS.iter().map(|p| p.to_vec()).collect();
    build_transformation_groupoid(&group, 3, &action).unwrap()
}

/// Every fixture groupoid, by name.
pub fn groupoids() -> Vec<(&'static str, FiniteGroupoid)> {
    vec![
        ("z2", z2()),
        ("z4", z4()),
        ("s3", s3()),
        ("klein", klein()),
        ("pair2", pair_groupoid(2)),
        ("pair3", pair_groupoid(3)),
        ("pair14", pair_groupoid(14)),
        ("units3", unit_groupoid(3)),
        ("z2z2-bundle", z2z2_bundle()),
        ("pm-bundle", pm_bundle()),
        ("z4-action", z4_action()),
        ("s3-action", s3_action()),
    ]
}

/// An exact σ-representation.
#[derive(Debug, Clone)]
pub struct RepFixture {
    pub name: &'static str,
    pub groupoid: FiniteGroupoid,
    pub sigma: Multiplier,
    pub rep: PseudoRep,
}

impl RepFixture {
    fn new(name: &'static str, groupoid: FiniteGroupoid, dims: Vec<usize>, f: impl Fn(ArrowId) -> CMatrix) -> Self {
        let sigma = Multiplier::trivial(&groupoid);
        let matrices = (0..groupoid.n_arrows()).map(f).collect();
        let rep = PseudoRep::new(&groupoid, dims, matrices).unwrap();
        RepFixture { name, groupoid, sigma, rep }
    }

    fn from_rep(name: &'static str, groupoid: FiniteGroupoid, rep: PseudoRep) -> Self {
        RepFixture { name, sigma: Multiplier::trivial(&groupoid), groupoid, rep }
    }

    pub fn is_isometric(&self) -> bool {
        self.sigma.isometry_defect(&self.groupoid) <= 1e-12
    }
}

fn scalar(v: f64) -> CMatrix {
    real(1, 1, &[v])
}

fn permutation_sign(p: &[usize; 3]) -> f64 {
    let inversions = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `P(p)e_i = e_{p(i)}`.
fn permutation_matrix(p: &[usize; 3]) -> CMatrix {
    let mut m = CMatrix::zeros(3, 3);
    for i in 0..3 {
        m[(p[i], i)] = c(1.0, 0.0);
    }
    m
}

/// Permutation action restricted to the sum-zero plane, orthonormal basis
/// `(1,−1,0)/√2`, `(1,1,−2)/√6`.
fn s3_standard(p: &[usize; 3]) -> CMatrix {
    let a = 1.0 / libm::sqrt(2.0);
    let b = 1.0 / libm::sqrt(6.0);
    let q = real(3, 2, &[a, b, -a, b, 0.0, -2.0 * b]);
    q.transpose() * permutation_matrix(p) * q
}

fn rotation_quarter(k: usize) -> CMatrix {
    let r = real(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    (0..k % 4).fold(identity(2), |acc, _| &r * acc)
}

fn pauli(a: usize) -> CMatrix {
    match a {
        0 => identity(2),
        1 => real(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        2 => real(2, 2, &[1.0, 0.0, 0.0, -1.0]),
        _ => complex(2, 2, &[(0.0, 0.0), (0.0, -1.0), (0.0, 1.0), (0.0, 0.0)]),
    }
}

/// Unitary frame `A_x` used for the pair-groupoid fixture.
fn frame(x: usize) -> CMatrix {
    let theta = [0.0, 0.3, 1.1][x];
    let phase = [0.0, 0.5, -0.8][x];
    let (s, co) = (libm::sin(theta), libm::cos(theta));
    let rot = real(2, 2, &[co, -s, s, co]);
    let d = complex(2, 2, &[(libm::cos(phase), libm::sin(phase)), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
    d * rot
}

/// Exact σ-representations: 21 fixtures over groups, pair groupoids, group
/// bundles and transformation groupoids, fibers up to dimension 8.
pub fn representations() -> Vec<RepFixture> {
    let mut out = Vec::new();

    out.push(RepFixture::new("z2-trivial", z2(), vec![1], |_| scalar(1.0)));
    out.push(RepFixture::new("z2-sign", z2(), vec![1], |a| scalar(if a == 0 { 1.0 } else { -1.0 })));
    let g = z2();
    let reg = regular_rep(&g, &normalized_counting_haar(&g)).unwrap();
    out.push(RepFixture::from_rep("z2-regular", g, reg));
    out.push(RepFixture::new("z2-triangular", z2(), vec![2], |a| {
        if a == 0 {
            identity(2)
        } else {
            real(2, 2, &[1.0, 1.0, 0.0, -1.0])
        }
    }));

    out.push(RepFixture::new("z4-character", z4(), vec![1], |k| {
        let v = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][k];
        complex(1, 1, &[v])
    }));
    out.push(RepFixture::new("z4-rotation", z4(), vec![2], rotation_quarter));
    let g = z4();
    let reg = regular_rep(&g, &normalized_counting_haar(&g)).unwrap();
    out.push(RepFixture::from_rep("z4-regular", g, reg));

    out.push(RepFixture::new("s3-sign", s3(), vec![1], |a| scalar(permutation_sign(&S3_ELEMENTS[a]))));
    out.push(RepFixture::new("s3-standard", s3(), vec![2], |a| s3_standard(&S3_ELEMENTS[a])));
    out.push(RepFixture::new("s3-permutation", s3(), vec![3], |a| permutation_matrix(&S3_ELEMENTS[a])));
    let g = s3();
    let reg = regular_rep(&g, &normalized_counting_haar(&g)).unwrap();
    let sum: Vec<CMatrix> =
        (0..6).map(|a| direct_sum(&[reg.matrix(a), &s3_standard(&S3_ELEMENTS[a])])).collect();
    out.push(RepFixture::from_rep("s3-regular", g.clone(), reg));
    out.push(RepFixture::new("s3-regular-standard", g, vec![8], |a| sum[a].clone()));

    out.push(RepFixture::new("pair2-trivial", pair_groupoid(2), vec![1, 1], |_| scalar(1.0)));
    out.push(RepFixture::new("pair3-frames", pair_groupoid(3), vec![2, 2, 2], |a| {
        let (x, y) = (a / 3, a % 3);
        if x == y {
            identity(2)
        } else {
            frame(x) * frame(y).adjoint()
        }
    }));
    out.push(RepFixture::new("units3-mixed", unit_groupoid(3), vec![1, 2, 0], |a| identity([1, 2, 0][a])));

    let g = z2z2_bundle();
    out.push(RepFixture::new("z2z2-sign-regular", g, vec![1, 2], |a| match a {
        0 => scalar(1.0),
        1 => scalar(-1.0),
        2 => identity(2),
        _ => real(2, 2, &[0.0, 1.0, 1.0, 0.0]),
    }));
    out.push(RepFixture::new("pm-bundle-sign", pm_bundle(), vec![1, 2, 1], |a| match a {
        1 | 4 => scalar(-1.0),
        2 => identity(2),
        _ => scalar(1.0),
    }));

    let g = z4_action();
    let reg = regular_rep(&g, &normalized_counting_haar(&g)).unwrap();
    out.push(RepFixture::from_rep("z4-action-regular", g.clone(), reg));
    out.push(RepFixture::from_rep("z4-action-induced-sign", g.clone(), z4_action_induced_sign(&g)));

    let g = klein();
    let sigma = Multiplier::from_fn(&g, |a, b| {
        let m = pauli(a ^ b).adjoint() * pauli(a) * pauli(b);
        m.trace() * c(0.5, 0.0)
    });
    let rep = PseudoRep::new(&g, vec![2], (0..4).map(pauli).collect()).unwrap();
    out.push(RepFixture { name: "klein-pauli", groupoid: g, sigma, rep });

    let g = z4();
    let rho = [1.0, 1.5, 0.8, 1.25];
    let sigma = Multiplier::from_fn(&g, |a, b| c(rho[a] * rho[b] / rho[(a + b) % 4], 0.0));
    let rep = PseudoRep::new(&g, vec![2], (0..4).map(|k| rotation_quarter(k) * c(rho[k], 0.0)).collect()).unwrap();
    out.push(RepFixture { name: "z4-rotation-coboundary", groupoid: g, sigma, rep });

    out
}

/// Direct image of the sign representation of `G(a) ≅ ℤ/2` along the
/// isotropy inclusion into [`z4_action`].
fn z4_action_induced_sign(g: &FiniteGroupoid) -> PseudoRep {
    let (h, incl) = restrict(g, &[0]).unwrap();
    let m = Morita::new(&h, g, &incl).unwrap();
    let sign = PseudoRep::new(&h, vec![1], vec![scalar(1.0), scalar(-1.0)]).unwrap();
    let section = m.default_section().unwrap();
    m.pushforward(&Multiplier::trivial(g), &sign, &section).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::validate_multiplier;
    use crate::rep::validate_rep;

    #[test]
    fn fixtures_are_exact() {
        let all = representations();
        assert!(all.len() >= 20);
        for f in &all {
            assert!(validate_multiplier(&f.groupoid, &f.sigma).is_valid(), "{}", f.name);
            let report = validate_rep(&f.groupoid, &f.sigma, &f.rep, 1e-13);
            assert!(report.is_valid(), "{}: {report}", f.name);
        }
        assert!(all.iter().any(|f| f.rep.fiber_dims().contains(&8)));
    }

    #[test]
    fn groupoids_are_valid() {
        for (name, g) in groupoids() {
            assert!(g.validate().is_valid(), "{name}");
        }
    }
}

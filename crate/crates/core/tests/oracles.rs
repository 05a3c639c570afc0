//! Worked examples checked against independent hand computations.

use gpdrep_core::cocycle::{apply_coboundary, validate_multiplier, Cochain1, Multiplier};
use gpdrep_core::fixtures::{cyclic_table, pm_bundle, z4_action};
use gpdrep_core::groupoid::{build_group, isotropy_and_orbits, pair_groupoid, restrict};
use gpdrep_core::linalg::{abs, c, distance, identity, operator_norm, real, CMatrix, Complex64};
use gpdrep_core::measure::{
    cutoff_integral, normalize_cutoff, normalized_counting_haar, validate_haar, Averager, CutoffFunction,
};
use gpdrep_core::morita::{regular_rep, separates, Morita};
use gpdrep_core::rep::{defect_and_bound, CorrectOptions, PseudoRep};

/// Largest singular value by power iteration on `M*M` with a Rayleigh quotient.
fn power_norm(m: &CMatrix) -> f64 {
    let n = m.ncols();
    let mtm = m.adjoint() * m;
    let mut v: Vec<Complex64> = (0..n).map(|i| c(1.0 + 0.1 * i as f64, 0.05 * i as f64)).collect();
    for _ in 0..20_000 {
        let mut w = vec![c(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                w[i] += mtm[(i, j)] * v[j];
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v = w.into_iter().map(|z| z / norm).collect();
    }
    let mut rq = c(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            rq += v[i].conj() * mtm[(i, j)] * v[j];
        }
    }
    rq.re.sqrt()
}

/// Deterministic pseudo-random entries in `[−1, 1]` from a linear congruential sequence.
fn lcg_matrix(n: usize, seed: u64) -> CMatrix {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    CMatrix::from_fn(n, n, |_, _| c(next(), next()))
}

#[test]
fn spectral_norm_matches_power_iteration() {
    for seed in 0..20 {
        let m = lcg_matrix(5, seed);
        let a = operator_norm(&m).unwrap();
        let b = power_norm(&m);
        assert!((a - b).abs() <= 1e-10, "seed {seed}: {a} vs {b}");
    }
}

#[test]
fn action_groupoid_by_enumeration() {
    let g = z4_action();
    let act = |k: usize, x: usize| if k % 2 == 0 { x } else { 1 - x };
    let mut expected = Vec::new();
    for k in 0..4 {
        for x in 0..2 {
            expected.push((x, act(k, x)));
        }
    }
    let arrows: Vec<(usize, usize)> = (0..g.n_arrows()).map(|a| (g.src(a), g.tgt(a))).collect();
    assert_eq!(arrows, expected);
    for x in 0..2 {
        let stab: Vec<usize> = (0..4).filter(|&k| act(k, x) == x).map(|k| 2 * k + x).collect();
        let (iso, orbits) = isotropy_and_orbits(&g);
        assert_eq!(iso[x].arrows, stab);
        assert_eq!(iso[x].group.order(), 2);
        assert_eq!(orbits, vec![vec![0, 1]]);
    }
    let (sub, incl) = restrict(&g, &[0]).unwrap();
    let filtered: Vec<usize> = (0..8).filter(|&a| g.src(a) == 0 && g.tgt(a) == 0).collect();
    assert_eq!(incl.arrows, filtered);
    assert_eq!(sub.n_arrows(), 2);
}

#[test]
fn haar_weights_by_hand() {
    let pair = pair_groupoid(2);
    let mu = normalized_counting_haar(&pair);
    for g in 0..4 {
        for h in 0..4 {
            if pair.src(g) == pair.tgt(h) {
                assert_eq!(mu.weights[pair.mul(g, h)], mu.weights[h]);
            }
        }
    }
    assert!(validate_haar(&pm_bundle(), &normalized_counting_haar(&pm_bundle())).is_valid());

    let c10 = CutoffFunction { values: vec![1.0, 0.0] };
    assert_eq!(cutoff_integral(&pair, &mu, &c10, 0), 0.5);
    assert_eq!(cutoff_integral(&pair, &mu, &c10, 1), 0.5);
    let norm = normalize_cutoff(&pair, &mu, &c10).unwrap();
    assert_eq!(norm.values, vec![2.0, 0.0]);
    let direct: f64 = (0..4).filter(|&h| pair.tgt(h) == 1).map(|h| 0.5 * norm.values[pair.src(h)]).sum();
    assert_eq!(direct, 1.0);
}

#[test]
fn z2_multiplier_by_hand() {
    let g = build_group(cyclic_table(2)).unwrap();
    let sigma = Multiplier::from_entries(&g, &[(1, 1, c(2.0, 0.0))]).unwrap();
    // Every triple of ℤ/2: σ(a,b)σ(a+b,k) = σ(b,k)σ(a,b+k).
    let s = |a: usize, b: usize| if a == 1 && b == 1 { 2.0 } else { 1.0 };
    for a in 0..2 {
        for b in 0..2 {
            for k in 0..2 {
                assert_eq!(s(a, b) * s((a + b) % 2, k), s(b, k) * s(a, (b + k) % 2));
            }
        }
    }
    assert!(validate_multiplier(&g, &sigma).is_valid());

    // α(1) = ½·log|σ(1,0)| + ½·log|σ(1,1)| = ½·log 2.
    let alpha = 0.5 * 2f64.ln();
    let (rho, tilde) = Averager::counting(&g).isometrize(&sigma).unwrap();
    assert!((rho.get(1) - (-alpha).exp()).abs() < 1e-15);
    for (a, b) in g.composable_pairs() {
        assert!((abs(tilde.get(a, b)) - 1.0).abs() <= 1e-12);
    }
    let by_hand = rho.get(1) * rho.get(1) / rho.get(0) * 2.0;
    assert!((by_hand - 1.0).abs() < 1e-15);

    let rho2 = Cochain1::new(&g, vec![1.0, 2f64.powf(-0.5)]).unwrap();
    let t = apply_coboundary(&g, &sigma, &rho2).unwrap();
    assert!(abs(t.get(1, 1) - c(1.0, 0.0)) < 1e-15);
}

#[test]
fn z2_defect_by_enumeration() {
    let g = build_group(cyclic_table(2)).unwrap();
    let sigma = Multiplier::trivial(&g);
    for x in [1.02, 1.1] {
        let t1 = real(2, 2, &[x, 0.0, 0.0, 1.0]);
        let mats = [identity(2), t1.clone()];
        let t = PseudoRep::new(&g, vec![2], mats.to_vec()).unwrap();
        // Four composable pairs; T(1)T(1) = diag(x², 1) against T(0) = I.
        let mut worst: f64 = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                let d = &mats[(a + b) % 2] - &mats[a] * &mats[b];
                let entry_max = d.iter().map(|z| abs(*z)).fold(0.0, f64::max);
                worst = worst.max(entry_max);
            }
        }
        assert!((worst - (x * x - 1.0)).abs() < 1e-14);
        let d = defect_and_bound(&g, &sigma, &t).unwrap()[0];
        assert!((d.defect - worst).abs() < 1e-14);
        assert!((d.bound - x).abs() < 1e-14);
    }
}

#[test]
fn heron_limit() {
    let g = build_group(cyclic_table(2)).unwrap();
    let sigma = Multiplier::trivial(&g);
    let t = PseudoRep::new(&g, vec![2], vec![identity(2), real(2, 2, &[1.02, 0.0, 0.0, 1.0])]).unwrap();
    let avg = Averager::counting(&g);
    let mut x: f64 = 1.02;
    let mut cur = t.clone();
    for _ in 0..3 {
        x = (x + 1.0 / x) / 2.0;
        cur = avg.average(&sigma, &cur).unwrap();
        assert!((cur.matrix(1)[(0, 0)].re - x).abs() < 1e-15);
    }
    let out = avg.correct(&sigma, &t, CorrectOptions::default()).unwrap();
    let dist = distance(out.rep.matrix(1), t.matrix(1));
    assert!((dist - 0.02).abs() < 1e-12);
    assert!(dist <= 4.0 * 1.02 * 0.0404);
}

#[test]
fn gram_by_hand() {
    let g = build_group(cyclic_table(2)).unwrap();
    let s1 = real(2, 2, &[1.0, 1.0, 0.0, -1.0]);
    let s = PseudoRep::new(&g, vec![2], vec![identity(2), s1.clone()]).unwrap();
    // H = ½(I*I + S(1)*S(1)) since S(1)⁻¹ = S(1).
    let by_hand = (identity(2) + s1.adjoint() * &s1) * c(0.5, 0.0);
    let h = Averager::counting(&g).averaged_gram(&Multiplier::trivial(&g), &s).unwrap();
    assert!(distance(&h.grams[0], &by_hand) <= 1e-15);
    assert!(distance(&by_hand, &real(2, 2, &[1.0, 0.5, 0.5, 1.5])) == 0.0);
}

#[test]
fn pushforward_reads_isotropy_sign() {
    let g = z4_action();
    let (h, incl) = restrict(&g, &[0]).unwrap();
    let m = Morita::new(&h, &g, &incl).unwrap();
    let sign = PseudoRep::new(&h, vec![1], vec![identity(1), real(1, 1, &[-1.0])]).unwrap();
    let sigma = Multiplier::trivial(&g);
    let section = m.section_from_arrows(&[g.unit(0), 2]).unwrap();
    let r = m.pushforward(&sigma, &sign, &section).unwrap();
    // (1,b) = arrow 3; unit_a⁻¹·(1,b)·(1,a) = (2,a) = arrow 4, which is element 1 of G(a).
    assert_eq!(g.mul(g.mul(g.inverse(g.unit(0)), 3), 2), 4);
    assert_eq!(r.matrix(3)[(0, 0)], c(-1.0, 0.0));
}

#[test]
fn pair_regular_separates_by_enumeration() {
    let g = pair_groupoid(2);
    let r = regular_rep(&g, &normalized_counting_haar(&g)).unwrap();
    assert!(r.fiber_dims().iter().all(|&d| d == 2));
    let mut images = Vec::new();
    for a in 0..4 {
        let key = (g.src(a), g.tgt(a), r.matrix(a).iter().map(|z| z.re.to_bits()).collect::<Vec<_>>());
        assert!(!images.contains(&key));
        images.push(key);
    }
    assert_eq!(separates(&g, &[r]), Ok(()));
}

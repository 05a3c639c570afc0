#![allow(clippy::needless_range_loop)]

use std::fs;
use std::path::{Path, PathBuf};

use gpdrep::format::{read_project, Check, NamedRep, Project};
use gpdrep::run;
use gpdrep_core::cocycle::Multiplier;
use gpdrep_core::fixtures::{self, z2, z4_action};
use gpdrep_core::groupoid::restrict;
use gpdrep_core::linalg::{c, identity, real};
use gpdrep_core::rep::PseudoRep;

fn exec(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["gpdrep"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, p: &Project) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, p.to_json()).unwrap();
    path
}

fn z2_project(x: f64) -> Project {
    let g = z2();
    let rep = PseudoRep::new(&g, vec![2], vec![identity(2), real(2, 2, &[x, 0.0, 0.0, 1.0])]).unwrap();
    let mut p = Project::bare(g);
    p.representations.push(NamedRep { name: "t".into(), rep });
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn parse_z2_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "z2.json", &z2_project(1.0));
    let p = gpdrep::parse_project(&path).unwrap();
    assert_eq!(p.groupoid.n_arrows(), 2);
}

#[test]
fn missing_inverse_entry_is_dangling() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "z2.json", &Project::bare(z2()));
    let text = fs::read_to_string(&path).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["groupoid"]["inverse"].as_array_mut().unwrap().pop();
    fs::write(&path, v.to_string()).unwrap();
    let err = gpdrep::parse_project(&path).unwrap_err();
    assert!(err.to_string().contains("dangling id"), "{err}");
    let (code, out, _) = exec(&["validate", s(&path)]);
    assert_eq!(code, 1, "{out}");
}

#[test]
fn non_normal_multiplier_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let g = z2();
    let mut p = Project::bare(g.clone());
    let mut m = Multiplier::trivial(&g);
    m.set(0, 1, c(2.0, 0.0));
    p.multiplier = Some(m);
    let path = write(dir.path(), "bad.json", &p);
    let err = gpdrep::parse_project(&path).unwrap_err();
    assert!(err.to_string().contains("normality"), "{err}");
    let (code, out, _) = exec(&["cocycle-check", s(&path)]);
    assert_eq!(code, 1);
    assert!(out.contains("normality"));
}

#[test]
fn parse_error_has_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    fs::write(&path, "{\n  \"groupoid\": {\n    \"points\": [,]\n").unwrap();
    let (code, _, err) = exec(&["validate", s(&path)]);
    assert_eq!(code, 1);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn rep_defect_prints_twelve_digits() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "z2.json", &z2_project(1.02));
    let (code, out, _) = exec(&["rep-defect", s(&path)]);
    assert_eq!(code, 0);
    assert!(out.contains("r = 0.0404, b = 1.02"), "{out}");

    let path = write(dir.path(), "far.json", &z2_project(1.1));
    let (code, out, _) = exec(&["rep-defect", s(&path)]);
    assert_eq!(code, 1);
    assert!(out.contains("almost = false"));
}

#[test]
fn correct_exact_rep_has_single_trace_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "z2.json", &z2_project(1.0));
    let trace = dir.path().join("trace.csv");
    let (code, out, _) = exec(&["rep-correct", s(&path), "--trace", s(&trace)]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&trace).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "iter,r_max,b_max,step_max");
    assert_eq!(lines.len(), 2);
    let r: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!(r <= 1e-12);
    assert_eq!(Project::parse_str(&out, Check::Full).unwrap(), z2_project(1.0));
}

#[test]
fn correct_converges_and_far_input_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "z2.json", &z2_project(1.02));
    let out_path = dir.path().join("out.json");
    let (code, _, _) = exec(&["rep-correct", s(&path), "-o", s(&out_path)]);
    assert_eq!(code, 0);
    let (code, out, _) = exec(&["rep-check", s(&out_path), "--tol", "1e-12"]);
    assert_eq!(code, 0, "{out}");

    let path = write(dir.path(), "far.json", &z2_project(1.1));
    let (code, _, err) = exec(&["rep-correct", s(&path)]);
    assert_eq!(code, 1);
    assert!(err.contains("not an almost representation"));
}

#[test]
fn no_convergence_is_a_numerical_fault() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "z2.json", &z2_project(1.02));
    let trace = dir.path().join("trace.csv");
    let (code, _, err) = exec(&["rep-correct", s(&path), "--max-iter", "1", "--trace", s(&trace)]);
    assert_eq!(code, 2, "{err}");
    assert_eq!(fs::read_to_string(&trace).unwrap().lines().count(), 3);
}

#[test]
fn usage_errors() {
    assert_eq!(exec(&["frobnicate"]).0, 64);
    assert_eq!(exec(&[]).0, 64);
    assert_eq!(exec(&["--help"]).0, 0);
    let dir = tempfile::tempdir().unwrap();
    let mut p = z2_project(1.0);
    p.representations.push(p.representations[0].clone());
    let path = write(dir.path(), "two.json", &p);
    let trace = dir.path().join("t.csv");
    assert_eq!(exec(&["rep-correct", s(&path), "--trace", s(&trace)]).0, 64);
    assert_eq!(exec(&["extend-correct", s(&path)]).0, 64);
}

#[test]
fn regular_then_separate() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "z2.json", &Project::bare(z2()));
    let reg = dir.path().join("reg.json");
    assert_eq!(exec(&["regular", s(&path), "-o", s(&reg)]).0, 0);
    let (code, out, _) = exec(&["separate", s(&reg)]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "separates: true");

    let (code, out, _) = exec(&["separate", s(&write(dir.path(), "triv.json", &z2_project(1.0)))]);
    assert_eq!(code, 1);
    assert!(out.contains("arrows 0 and 1"));
}

#[test]
fn perturb_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "z2.json", &z2_project(1.0));
    let a = exec(&["rep-perturb", s(&path), "--eps", "0.01", "--seed", "7"]);
    let b = exec(&["rep-perturb", s(&path), "--eps", "0.01", "--seed", "7"]);
    let c = exec(&["rep-perturb", s(&path), "--eps", "0.01", "--seed", "8"]);
    assert_eq!(a, b);
    assert_ne!(a.1, c.1);
}

#[test]
fn isometrize_haar_and_cutoff() {
    let dir = tempfile::tempdir().unwrap();
    let g = z2();
    let mut p = z2_project(1.0);
    p.multiplier = Some(Multiplier::from_entries(&g, &[(1, 1, c(2.0, 0.0))]).unwrap());
    p.representations[0].rep =
        PseudoRep::new(&g, vec![1], vec![identity(1), real(1, 1, &[2f64.sqrt()])]).unwrap();
    let path = write(dir.path(), "sigma.json", &p);
    let out = dir.path().join("iso.json");
    assert_eq!(exec(&["cocycle-isometrize", s(&path), "-o", s(&out)]).0, 0);
    let q = read_project(&out, Check::Full).unwrap();
    assert!((q.multiplier.as_ref().unwrap().get(1, 1).re - 1.0).abs() <= 1e-14);
    assert!(q.cochain.is_some());
    assert_eq!(exec(&["rep-check", s(&out)]).0, 0);

    assert_eq!(exec(&["haar-make", s(&path), "-o", s(&out)]).0, 0);
    assert_eq!(exec(&["haar-check", s(&out)]).0, 0);
    let mut pair = Project::bare(gpdrep_core::groupoid::pair_groupoid(2));
    pair.cutoff = Some(gpdrep_core::measure::CutoffFunction { values: vec![1.0, 0.0] });
    let path = write(dir.path(), "pair.json", &pair);
    let (code, out, _) = exec(&["cutoff-normalize", s(&path)]);
    assert_eq!(code, 0);
    assert_eq!(Project::parse_str(&out, Check::Full).unwrap().cutoff.unwrap().values, vec![2.0, 0.0]);
}

#[test]
fn unitarize_command() {
    let dir = tempfile::tempdir().unwrap();
    let g = z2();
    let mut p = Project::bare(g.clone());
    let rep = PseudoRep::new(&g, vec![2], vec![identity(2), real(2, 2, &[1.0, 1.0, 0.0, -1.0])]).unwrap();
    p.representations.push(NamedRep { name: "s".into(), rep });
    let path = write(dir.path(), "s.json", &p);
    let (code, out, _) = exec(&["rep-unitarize", s(&path)]);
    assert_eq!(code, 0);
    let q = Project::parse_str(&out, Check::Full).unwrap();
    gpdrep_core::hilbert::check_unitary(&q.representations[0].rep, 1e-10).unwrap();
}

#[test]
fn push_and_pull_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = z4_action();
    let (h, incl) = restrict(&g, &[0]).unwrap();
    let sign = PseudoRep::new(&h, vec![1], vec![identity(1), real(1, 1, &[-1.0])]).unwrap();
    let mut dom = Project::bare(h);
    dom.homomorphism = Some(incl);
    dom.representations.push(NamedRep { name: "sign".into(), rep: sign.clone() });
    let dpath = write(dir.path(), "dom.json", &dom);
    let tpath = write(dir.path(), "tgt.json", &Project::bare(g));

    let pushed = dir.path().join("pushed.json");
    let (code, _, err) = exec(&["push", s(&dpath), s(&tpath), "--section", "0,2", "-o", s(&pushed)]);
    assert_eq!(code, 0, "{err}");
    let r = read_project(&pushed, Check::Full).unwrap();
    assert_eq!(r.representations[0].rep.matrix(3)[(0, 0)], c(-1.0, 0.0));

    let (code, out, err) = exec(&["pull", s(&dpath), s(&pushed)]);
    assert_eq!(code, 0, "{err}");
    let back = Project::parse_str(&out, Check::Full).unwrap();
    assert_eq!(back.representations[0].rep, sign);
}

#[test]
fn extend_correct_keeps_locus() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixtures::representations().into_iter().find(|f| f.name == "pm-bundle-sign").unwrap();
    let g = f.groupoid.clone();
    let noisy = gpdrep_core::rep::perturb(&g, &f.rep, 0.01, 3);
    let mut matrices = noisy.matrices().to_vec();
    // Points 1 and 2 form the locus; keep their arrows exact.
    for a in 0..g.n_arrows() {
        if g.src(a) != 0 {
            matrices[a] = f.rep.matrix(a).clone();
        }
    }
    let t = PseudoRep::new(&g, f.rep.fiber_dims().to_vec(), matrices).unwrap();
    let mut p = Project::bare(g.clone());
    p.representations.push(NamedRep { name: "t".into(), rep: t.clone() });
    let path = write(dir.path(), "pm.json", &p);
    let (code, out, err) = exec(&["extend-correct", s(&path), "--locus", "1,2"]);
    assert_eq!(code, 0, "{err}");
    let q = Project::parse_str(&out, Check::Full).unwrap();
    for a in 0..g.n_arrows() {
        if g.src(a) != 0 {
            assert_eq!(q.representations[0].rep.matrix(a), t.matrix(a));
        }
    }
}

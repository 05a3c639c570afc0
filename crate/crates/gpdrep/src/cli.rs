//! Command dispatch.
//!
//! Exit codes: 0 success, 1 validation failure (including parse errors and
//! inputs that are not almost representations), 2 numerical fault, 64 usage.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use gpdrep_core::cocycle::validate_multiplier;
use gpdrep_core::groupoid::{restrict, PointId};
use gpdrep_core::hilbert::check_unitary;
use gpdrep_core::linalg::{c, CMatrix};
use gpdrep_core::measure::{normalize_cutoff, normalized_counting_haar, validate_cutoff, validate_haar};
use gpdrep_core::morita::{regular_rep, separates, Morita};
use gpdrep_core::rep::{is_almost, perturb, validate_rep, CorrectOptions, PseudoRep};
use gpdrep_core::report::Report;
use gpdrep_core::Error;

use crate::format::{read_project, Check, NamedRep, Project, ProjectError};
use crate::trace::write_trace;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "gpdrep", version, about = "Finite groupoid representations: check, correct, unitarize, transport")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Args)]
struct Opts {
    /// Defect tolerance for rep-correct and extend-correct; check tolerance elsewhere.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Perturbation size for rep-perturb.
    #[arg(long, global = true, default_value_t = 1e-3)]
    eps: f64,
    /// CSV convergence trace (rep-correct, extend-correct).
    #[arg(long, global = true)]
    trace: Option<PathBuf>,
    /// Representation to operate on; all of them when omitted.
    #[arg(long, global = true)]
    rep: Option<String>,
    /// Pushforward representatives, one arrow id per target point.
    #[arg(long, global = true, value_delimiter = ',')]
    section: Option<Vec<usize>>,
    /// Invariant point set kept fixed by extend-correct.
    #[arg(long, global = true, value_delimiter = ',')]
    locus: Option<Vec<usize>>,
    /// Write the resulting project here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the groupoid, Haar system, cutoff and multiplier.
    Validate { project: PathBuf },
    /// Store the normalized counting Haar system.
    HaarMake { project: PathBuf },
    HaarCheck { project: PathBuf },
    /// Rescale the cutoff so that it integrates to 1 over every target fiber.
    CutoffNormalize { project: PathBuf },
    CocycleCheck { project: PathBuf },
    /// Replace σ by an isometric cohomologous multiplier and rescale the representations.
    CocycleIsometrize { project: PathBuf },
    RepCheck { project: PathBuf },
    /// Print defect and bound per orbit.
    RepDefect { project: PathBuf },
    RepCorrect { project: PathBuf },
    RepPerturb { project: PathBuf },
    RepUnitarize { project: PathBuf },
    /// Direct image of DOMAIN's representations along its homomorphism into TARGET.
    Push { domain: PathBuf, target: PathBuf },
    /// Inverse image of TARGET's representations along DOMAIN's homomorphism.
    Pull { domain: PathBuf, target: PathBuf },
    /// Keep a representation exact on --locus and correct it elsewhere.
    ExtendCorrect { project: PathBuf },
    /// Append the regular representation.
    Regular { project: PathBuf },
    /// Check that the representations separate arrows.
    Separate { project: PathBuf },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Project(#[from] ProjectError),
    #[error("{}", describe(.0))]
    Core(#[from] Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

fn describe(e: &Error) -> String {
    match e {
        Error::NoConvergence(t) => {
            let last = t.rows.last().map_or(f64::NAN, |r| r.defect_max);
            format!("{e} (last defect {last:e})")
        }
        _ => e.to_string(),
    }
}

fn is_numerical(e: &Error) -> bool {
    matches!(
        e,
        Error::NoConvergence(_)
            | Error::Singular(_)
            | Error::NonFinite
            | Error::NotPositiveDefinite { .. }
            | Error::InverseBound { .. }
    )
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) | CliError::Project(ProjectError::Core(e)) if is_numerical(e) => EXIT_NUMERICAL,
            _ => EXIT_INVALID,
        }
    }
}

type CliResult = Result<i32, CliError>;

/// Runs one command line (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code()
        }
    }
}

fn emit(project: &Project, opts: &Opts, stdout: &mut dyn Write) -> CliResult {
    match &opts.output {
        Some(path) => crate::format::write_project(path, project)?,
        None => stdout.write_all(project.to_json().as_bytes())?,
    }
    Ok(EXIT_OK)
}

fn report(r: &Report, stdout: &mut dyn Write) -> CliResult {
    writeln!(stdout, "{r}")?;
    Ok(if r.is_valid() { EXIT_OK } else { EXIT_INVALID })
}

/// Indices of the representations named by `--rep`, or all of them.
fn selected(project: &Project, opts: &Opts) -> Result<Vec<usize>, CliError> {
    match &opts.rep {
        None => Ok((0..project.representations.len()).collect()),
        Some(name) => project
            .representations
            .iter()
            .position(|r| &r.name == name)
            .map(|i| vec![i])
            .ok_or_else(|| ProjectError::Unresolved(format!("representation {name:?}")).into()),
    }
}

/// Rounds to 12 significant digits and prints the shortest form of the result.
pub fn sig12(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{rounded:?}")
}

fn load(path: &Path) -> Result<Project, CliError> {
    Ok(read_project(path, Check::Full)?)
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> CliResult {
    let opts = &cli.opts;
    match &cli.command {
        Command::Validate { project } => {
            let p = read_project(project, Check::Structure)?;
            report(&p.validate(), stdout)
        }
        Command::HaarMake { project } => {
            let mut p = read_project(project, Check::Structure)?;
            p.haar = Some(normalized_counting_haar(&p.groupoid));
            emit(&p, opts, stdout)
        }
        Command::HaarCheck { project } => {
            let p = read_project(project, Check::Structure)?;
            report(&validate_haar(&p.groupoid, &p.haar_or_default()), stdout)
        }
        Command::CutoffNormalize { project } => {
            let mut p = read_project(project, Check::Structure)?;
            let mu = p.haar_or_default();
            let cutoff = p.cutoff_or_default();
            let r = validate_cutoff(&p.groupoid, &cutoff);
            if !r.is_valid() {
                return report(&r, stdout);
            }
            p.cutoff = Some(normalize_cutoff(&p.groupoid, &mu, &cutoff)?);
            emit(&p, opts, stdout)
        }
        Command::CocycleCheck { project } => {
            let p = read_project(project, Check::Structure)?;
            report(&validate_multiplier(&p.groupoid, &p.sigma()), stdout)
        }
        Command::CocycleIsometrize { project } => {
            let mut p = load(project)?;
            let (rho, tilde) = p.averager()?.isometrize(&p.sigma())?;
            for r in &mut p.representations {
                let matrices = r.rep.matrices().iter().enumerate().map(|(a, m)| m * c(rho.get(a), 0.0)).collect();
                r.rep = PseudoRep::new(&p.groupoid, r.rep.fiber_dims().to_vec(), matrices)?;
            }
            p.multiplier = Some(tilde);
            p.cochain = Some(rho.values().to_vec());
            emit(&p, opts, stdout)
        }
        Command::RepCheck { project } => {
            let p = load(project)?;
            let tol = opts.tol.unwrap_or(1e-10);
            let sigma = p.sigma();
            let mut code = EXIT_OK;
            for i in selected(&p, opts)? {
                let r = &p.representations[i];
                let rep = validate_rep(&p.groupoid, &sigma, &r.rep, tol);
                writeln!(stdout, "{}: {rep}", r.name)?;
                if !rep.is_valid() {
                    code = EXIT_INVALID;
                }
            }
            Ok(code)
        }
        Command::RepDefect { project } => {
            let p = load(project)?;
            let sigma = p.sigma();
            let mut code = EXIT_OK;
            for i in selected(&p, opts)? {
                let r = &p.representations[i];
                let check = is_almost(&p.groupoid, &sigma, &r.rep)?;
                for m in &check.orbits {
                    writeln!(
                        stdout,
                        "{} orbit {}: r = {}, b = {}, threshold = {}, almost = {}",
                        r.name,
                        m.orbit,
                        sig12(m.defect),
                        sig12(m.bound),
                        sig12(m.threshold),
                        m.margin >= 0.0
                    )?;
                }
                if !check.almost {
                    code = EXIT_INVALID;
                }
            }
            Ok(code)
        }
        Command::RepCorrect { project } => {
            let mut p = load(project)?;
            let which = selected(&p, opts)?;
            if opts.trace.is_some() && which.len() != 1 {
                return Err(CliError::Usage("--trace needs exactly one representation (use --rep)".into()));
            }
            let copts = CorrectOptions { tol: opts.tol.unwrap_or(1e-12), max_iter: opts.max_iter };
            let sigma = p.sigma();
            let mut fixed = Vec::new();
            {
                let avg = p.averager()?;
                for &i in &which {
                    match avg.correct(&sigma, &p.representations[i].rep, copts) {
                        Ok(out) => {
                            if let Some(path) = &opts.trace {
                                write_trace(path, &out.trace)?;
                            }
                            fixed.push((i, out.rep));
                        }
                        Err(Error::NoConvergence(t)) => {
                            if let Some(path) = &opts.trace {
                                write_trace(path, &t)?;
                            }
                            return Err(Error::NoConvergence(t).into());
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            }
            for (i, rep) in fixed {
                p.representations[i].rep = rep;
            }
            emit(&p, opts, stdout)
        }
        Command::RepPerturb { project } => {
            let mut p = load(project)?;
            for (k, i) in selected(&p, opts)?.into_iter().enumerate() {
                let seed = opts.seed.wrapping_add(k as u64);
                p.representations[i].rep = perturb(&p.groupoid, &p.representations[i].rep, opts.eps, seed);
            }
            emit(&p, opts, stdout)
        }
        Command::RepUnitarize { project } => {
            let mut p = load(project)?;
            let sigma = p.sigma();
            let mut out = Vec::new();
            {
                let avg = p.averager()?;
                for i in selected(&p, opts)? {
                    out.push((i, avg.unitarize(&sigma, &p.representations[i].rep)?.rep));
                }
            }
            for (i, rep) in out {
                p.representations[i].rep = rep;
            }
            emit(&p, opts, stdout)
        }
        Command::Push { domain, target } => {
            let d = load(domain)?;
            let mut t = load(target)?;
            let hom = d.homomorphism.as_ref().ok_or_else(|| ProjectError::Unresolved("domain has no homomorphism".into()))?;
            let m = Morita::new(&d.groupoid, &t.groupoid, hom)?;
            let section = match &opts.section {
                Some(arrows) => m.section_from_arrows(arrows)?,
                None => m.default_section()?,
            };
            let sigma = t.sigma();
            let mut pushed = Vec::new();
            for i in selected(&d, opts)? {
                let r = &d.representations[i];
                check_unitary(&r.rep, gpdrep_core::morita::MORITA_TOL)?;
                pushed.push(NamedRep { name: r.name.clone(), rep: m.pushforward(&sigma, &r.rep, &section)? });
            }
            t.representations = pushed;
            emit(&t, opts, stdout)
        }
        Command::Pull { domain, target } => {
            let mut d = load(domain)?;
            let t = load(target)?;
            let hom = d.homomorphism.clone().ok_or_else(|| ProjectError::Unresolved("domain has no homomorphism".into()))?;
            let m = Morita::new(&d.groupoid, &t.groupoid, &hom)?;
            let sigma = t.sigma();
            let mut pulled = Vec::new();
            for i in selected(&t, opts)? {
                let r = &t.representations[i];
                let (_, rep) = m.pullback(&sigma, &r.rep)?;
                pulled.push(NamedRep { name: r.name.clone(), rep });
            }
            d.multiplier = Some(m.pullback_multiplier(&sigma));
            d.representations = pulled;
            emit(&d, opts, stdout)
        }
        Command::ExtendCorrect { project } => {
            let mut p = load(project)?;
            let locus: Vec<PointId> =
                opts.locus.clone().ok_or_else(|| CliError::Usage("extend-correct needs --locus".into()))?;
            let which = selected(&p, opts)?;
            if opts.trace.is_some() && which.len() != 1 {
                return Err(CliError::Usage("--trace needs exactly one representation (use --rep)".into()));
            }
            let copts = CorrectOptions { tol: opts.tol.unwrap_or(1e-12), max_iter: opts.max_iter };
            let sigma = p.sigma();
            let (sub, incl) = restrict(&p.groupoid, &locus)?;
            let mut out = Vec::new();
            {
                let avg = p.averager()?;
                for i in which {
                    let t = &p.representations[i].rep;
                    let dims = incl.points.iter().map(|&x| t.fiber_dim(x)).collect();
                    let r_locus = PseudoRep::new(&sub, dims, incl.arrows.iter().map(|&a| t.matrix(a).clone()).collect())?;
                    let t_out: BTreeMap<usize, CMatrix> = (0..p.groupoid.n_arrows())
                        .filter(|&a| !incl.points.contains(&p.groupoid.src(a)))
                        .map(|a| (a, t.matrix(a).clone()))
                        .collect();
                    let res = avg.extend_and_correct(&sigma, &locus, &r_locus, &t_out, copts);
                    if let Some(path) = &opts.trace {
                        match &res {
                            Ok(c) => write_trace(path, &c.trace)?,
                            Err(Error::NoConvergence(t)) => write_trace(path, t)?,
                            Err(_) => {}
                        }
                    }
                    out.push((i, res?.rep));
                }
            }
            for (i, rep) in out {
                p.representations[i].rep = rep;
            }
            emit(&p, opts, stdout)
        }
        Command::Regular { project } => {
            let mut p = load(project)?;
            if let Some(m) = &p.multiplier {
                if !m.nontrivial_entries(&p.groupoid).is_empty() {
                    return Err(ProjectError::Unresolved("the regular representation needs a trivial multiplier".into()).into());
                }
            }
            let rep = regular_rep(&p.groupoid, &p.haar_or_default())?;
            p.representations.push(NamedRep { name: "regular".into(), rep });
            emit(&p, opts, stdout)
        }
        Command::Separate { project } => {
            let p = load(project)?;
            let reps: Vec<PseudoRep> = selected(&p, opts)?.into_iter().map(|i| p.representations[i].rep.clone()).collect();
            match separates(&p.groupoid, &reps) {
                Ok(()) => {
                    writeln!(stdout, "separates: true")?;
                    Ok(EXIT_OK)
                }
                Err((g, h)) => {
                    writeln!(stdout, "separates: false (arrows {g} and {h})")?;
                    Ok(EXIT_INVALID)
                }
            }
        }
    }
}

//! JSON project files.
//!
//! A project holds one groupoid and, optionally, a Haar system, a cutoff
//! function, a multiplier, representations and a homomorphism into another
//! project's groupoid. Complex numbers are `[re, im]`; matrices are lists of
//! rows. Multiplier entries are sparse: composable pairs that are not listed
//! are exactly 1.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use gpdrep_core::cocycle::{validate_multiplier, Multiplier};
use gpdrep_core::groupoid::{FiniteGroupoid, GroupoidTables, Homomorphism};
use gpdrep_core::linalg::{c, CMatrix};
use gpdrep_core::measure::{
    normalize_cutoff, normalized_counting_haar, validate_cutoff, validate_haar, Averager, CutoffFunction,
    HaarSystem,
};
use gpdrep_core::rep::PseudoRep;
use gpdrep_core::report::{Report, Violation, ViolationKind};

#[derive(Debug, thiserror::Error)]
pub enum ProjectError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unresolved id: {0}")]
    Unresolved(String),
    #[error(transparent)]
    Core(#[from] gpdrep_core::Error),
}

impl From<serde_json::Error> for ProjectError {
    fn from(e: serde_json::Error) -> Self {
        ProjectError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDoc {
    pub id: usize,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowDoc {
    pub id: usize,
    pub src: usize,
    pub tgt: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidDoc {
    pub points: Vec<PointDoc>,
    pub arrows: Vec<ArrowDoc>,
    /// `[g, h, gh]`.
    pub compose: Vec<[usize; 3]>,
    pub inverse: Vec<usize>,
    pub unit: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepDoc {
    pub name: String,
    pub fiber_dim: Vec<usize>,
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomDoc {
    pub points: Vec<usize>,
    pub arrows: Vec<usize>,
}

/// The document tree exactly as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectDoc {
    pub groupoid: GroupoidDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub haar: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<Vec<f64>>,
    /// `[g, h, [re, im]]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplier: Option<Vec<(usize, usize, [f64; 2])>>,
    /// Positive cochain `ρ` written by `cocycle-isometrize`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cochain: Option<Vec<f64>>,
    #[serde(default)]
    pub representations: Vec<RepDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homomorphism: Option<HomDoc>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedRep {
    pub name: String,
    pub rep: PseudoRep,
}

/// In-memory project.
#[derive(Debug, Clone, PartialEq)]
pub struct Project {
    pub point_names: Vec<String>,
    pub groupoid: FiniteGroupoid,
    pub haar: Option<HaarSystem>,
    pub cutoff: Option<CutoffFunction>,
    pub multiplier: Option<Multiplier>,
    pub cochain: Option<Vec<f64>>,
    pub representations: Vec<NamedRep>,
    pub homomorphism: Option<Homomorphism>,
}

/// How much of a project is validated while parsing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    /// Every section is validated.
    Full,
    /// Only the groupoid axioms and the shapes of the other sections, so
    /// that a check command can report the remaining violations itself.
    Structure,
}

fn check_ids(what: &str, ids: impl Iterator<Item = usize>) -> Result<(), ProjectError> {
    for (i, id) in ids.enumerate() {
        if id != i {
            return Err(ProjectError::Unresolved(format!("{what} at position {i} has id {id}")));
        }
    }
    Ok(())
}

fn length(what: &'static str, expected: usize, found: usize) -> Result<(), ProjectError> {
    if expected == found {
        Ok(())
    } else {
        Err(gpdrep_core::Error::Length { what, expected, found }.into())
    }
}

fn matrix_from_doc(rows: &[Vec<[f64; 2]>], shape: (usize, usize), arrow: usize) -> Result<CMatrix, ProjectError> {
    let found = (rows.len(), rows.first().map_or(shape.1, |r| r.len()));
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(gpdrep_core::Error::Shape { arrow, expected: shape, found }.into());
    }
    Ok(CMatrix::from_fn(shape.0, shape.1, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

fn matrix_to_doc(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

fn is_exact_one(re: f64, im: f64) -> bool {
    re.to_bits() == 1f64.to_bits() && im.to_bits() == 0f64.to_bits()
}

impl Project {
    pub fn from_doc(doc: ProjectDoc, check: Check) -> Result<Self, ProjectError> {
        let gd = doc.groupoid;
        check_ids("point", gd.points.iter().map(|p| p.id))?;
        check_ids("arrow", gd.arrows.iter().map(|a| a.id))?;
        let tables = GroupoidTables {
            n_points: gd.points.len(),
            arrows: gd.arrows.iter().map(|a| (a.src, a.tgt)).collect(),
            compose: gd.compose.iter().map(|e| (e[0], e[1], e[2])).collect(),
            inverse: gd.inverse,
            unit: gd.unit,
        };
        let groupoid = FiniteGroupoid::from_tables(&tables)?;
        let g = &groupoid;
        let full = check == Check::Full;

        let haar = doc.haar.map(|weights| HaarSystem { weights });
        if let Some(mu) = &haar {
            length("haar weights", g.n_arrows(), mu.weights.len())?;
            if full {
                validate_haar(g, mu).into_result()?;
            }
        }
        let cutoff = doc.cutoff.map(|values| CutoffFunction { values });
        if let Some(cf) = &cutoff {
            length("cutoff values", g.n_points(), cf.values.len())?;
            if full {
                validate_cutoff(g, cf).into_result()?;
            }
        }
        let multiplier = match doc.multiplier {
            None => None,
            Some(entries) => {
                let entries: Vec<_> = entries.into_iter().map(|(a, b, [re, im])| (a, b, c(re, im))).collect();
                let m = Multiplier::from_entries(g, &entries)?;
                if full {
                    validate_multiplier(g, &m).into_result()?;
                }
                Some(m)
            }
        };
        if let Some(rho) = &doc.cochain {
            length("cochain values", g.n_arrows(), rho.len())?;
        }
        let representations = doc
            .representations
            .into_iter()
            .map(|r| {
                length("fiber dimensions", g.n_points(), r.fiber_dim.len())?;
                length("matrices", g.n_arrows(), r.matrices.len())?;
                let matrices = r
                    .matrices
                    .iter()
                    .enumerate()
                    .map(|(a, rows)| matrix_from_doc(rows, (r.fiber_dim[g.tgt(a)], r.fiber_dim[g.src(a)]), a))
                    .collect::<Result<Vec<_>, _>>()?;
                let rep = PseudoRep::new(g, r.fiber_dim, matrices)?;
                Ok(NamedRep { name: r.name, rep })
            })
            .collect::<Result<Vec<_>, ProjectError>>()?;
        let homomorphism = doc.homomorphism.map(|h| Homomorphism { points: h.points, arrows: h.arrows });
        if let Some(h) = &homomorphism {
            length("homomorphism points", g.n_points(), h.points.len())?;
            length("homomorphism arrows", g.n_arrows(), h.arrows.len())?;
        }

        Ok(Project {
            point_names: gd.points.into_iter().map(|p| p.name).collect(),
            groupoid,
            haar,
            cutoff,
            multiplier,
            cochain: doc.cochain,
            representations,
            homomorphism,
        })
    }

    pub fn to_doc(&self) -> ProjectDoc {
        let g = &self.groupoid;
        let t = g.tables();
        ProjectDoc {
            groupoid: GroupoidDoc {
                points: self.point_names.iter().enumerate().map(|(id, name)| PointDoc { id, name: name.clone() }).collect(),
                arrows: t.arrows.iter().enumerate().map(|(id, &(src, tgt))| ArrowDoc { id, src, tgt }).collect(),
                compose: t.compose.iter().map(|&(a, b, ab)| [a, b, ab]).collect(),
                inverse: t.inverse,
                unit: t.unit,
            },
            haar: self.haar.as_ref().map(|h| h.weights.clone()),
            cutoff: self.cutoff.as_ref().map(|c| c.values.clone()),
            multiplier: self.multiplier.as_ref().map(|m| {
                g.composable_pairs()
                    .map(|(a, b)| (a, b, m.get(a, b)))
                    .filter(|(_, _, v)| !is_exact_one(v.re, v.im))
                    .map(|(a, b, v)| (a, b, [v.re, v.im]))
                    .collect()
            }),
            cochain: self.cochain.clone(),
            representations: self
                .representations
                .iter()
                .map(|r| RepDoc {
                    name: r.name.clone(),
                    fiber_dim: r.rep.fiber_dims().to_vec(),
                    matrices: r.rep.matrices().iter().map(matrix_to_doc).collect(),
                })
                .collect(),
            homomorphism: self.homomorphism.as_ref().map(|h| HomDoc { points: h.points.clone(), arrows: h.arrows.clone() }),
        }
    }

    pub fn parse_str(text: &str, check: Check) -> Result<Self, ProjectError> {
        let doc: ProjectDoc = serde_json::from_str(text)?;
        Self::from_doc(doc, check)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_doc()).expect("project documents serialize");
        s.push('\n');
        s
    }

    /// Project with default point names `p0, p1, …` and no optional sections.
    pub fn bare(groupoid: FiniteGroupoid) -> Self {
        Project {
            point_names: (0..groupoid.n_points()).map(|x| format!("p{x}")).collect(),
            groupoid,
            haar: None,
            cutoff: None,
            multiplier: None,
            cochain: None,
            representations: Vec::new(),
            homomorphism: None,
        }
    }

    /// The stored Haar system, or the normalized counting one.
    pub fn haar_or_default(&self) -> HaarSystem {
        self.haar.clone().unwrap_or_else(|| normalized_counting_haar(&self.groupoid))
    }

    /// The stored cutoff, or `c ≡ 1`.
    pub fn cutoff_or_default(&self) -> CutoffFunction {
        self.cutoff.clone().unwrap_or_else(|| CutoffFunction::constant(&self.groupoid, 1.0))
    }

    pub fn sigma(&self) -> Multiplier {
        self.multiplier.clone().unwrap_or_else(|| Multiplier::trivial(&self.groupoid))
    }

    /// Averager over the Haar system and the normalized cutoff.
    pub fn averager(&self) -> Result<Averager<'_>, ProjectError> {
        let mu = self.haar_or_default();
        let c = normalize_cutoff(&self.groupoid, &mu, &self.cutoff_or_default())?;
        Ok(Averager::new(&self.groupoid, mu, c)?)
    }

    /// Checks every section; the report is empty when the project is valid.
    pub fn validate(&self) -> Report {
        let g = &self.groupoid;
        let mut report = g.validate();
        if let Some(mu) = &self.haar {
            report.extend(validate_haar(g, mu));
        }
        if let Some(c) = &self.cutoff {
            report.extend(validate_cutoff(g, c));
        }
        if let Some(m) = &self.multiplier {
            report.extend(validate_multiplier(g, m));
        }
        if let Some(h) = &self.homomorphism {
            if h.points.len() != g.n_points() || h.arrows.len() != g.n_arrows() {
                report.push(Violation::arrows(ViolationKind::DanglingId, &[]));
            }
        }
        report
    }
}

pub fn read_project(path: &Path, check: Check) -> Result<Project, ProjectError> {
    let text = fs::read_to_string(path).map_err(|source| ProjectError::Io { path: path.to_owned(), source })?;
    Project::parse_str(&text, check)
}

/// Reads and fully validates a project file.
pub fn parse_project(path: &Path) -> Result<Project, ProjectError> {
    read_project(path, Check::Full)
}

pub fn write_project(path: &Path, project: &Project) -> Result<(), ProjectError> {
    fs::write(path, project.to_json()).map_err(|source| ProjectError::Io { path: path.to_owned(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use gpdrep_core::fixtures;

    #[test]
    fn round_trip_fixtures() {
        for f in fixtures::representations() {
            let mut p = Project::bare(f.groupoid.clone());
            p.multiplier = Some(f.sigma.clone());
            p.representations.push(NamedRep { name: f.name.to_string(), rep: f.rep.clone() });
            let text = p.to_json();
            let back = Project::parse_str(&text, Check::Full).unwrap();
            assert_eq!(back, p, "{}", f.name);
            assert_eq!(back.to_json(), text);
        }
    }

    #[test]
    fn parse_errors_have_positions() {
        let err = Project::parse_str("{\n  \"groupoid\": [}", Check::Full).unwrap_err();
        assert!(matches!(err, ProjectError::Parse { line: 2, .. }));
    }
}

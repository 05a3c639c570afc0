//! Validation reports.
//!
//! Validators never abort on bad input: every failed axiom becomes a
//! [`Violation`] naming the offending arrows (or points), in ascending id
//! order. Conditions that hold automatically for finite discrete data are
//! kept as [`Report::notes`] so a report still says which axioms were
//! considered.

use alloc::vec::Vec;
use core::fmt;

use crate::groupoid::{ArrowId, PointId};

/// The axiom or structural condition a [`Violation`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    DanglingId,
    NotComposable,
    DuplicateProduct,
    MissingProduct,
    SourceTarget,
    Associativity,
    Unit,
    Inverse,
    Compatibility,
    Closure,
    Identity,
    Support,
    LeftInvariance,
    MissingWeight,
    Negative,
    OrbitMissed,
    NotInvertible,
    Normality,
    Cocycle,
    Shape,
    Unital,
    Multiplicative,
    Homomorphism,
}

impl ViolationKind {
    pub fn name(self) -> &'static str {
        match self {
            ViolationKind::DanglingId => "dangling id",
            ViolationKind::NotComposable => "not composable",
            ViolationKind::DuplicateProduct => "duplicate product",
            ViolationKind::MissingProduct => "missing product",
            ViolationKind::SourceTarget => "source/target",
            ViolationKind::Associativity => "associativity",
            ViolationKind::Unit => "unit",
            ViolationKind::Inverse => "inverse",
            ViolationKind::Compatibility => "compatibility",
            ViolationKind::Closure => "closure",
            ViolationKind::Identity => "identity",
            ViolationKind::Support => "support",
            ViolationKind::LeftInvariance => "left invariance",
            ViolationKind::MissingWeight => "missing weight",
            ViolationKind::Negative => "negative value",
            ViolationKind::OrbitMissed => "orbit missed",
            ViolationKind::NotInvertible => "not invertible",
            ViolationKind::Normality => "normality",
            ViolationKind::Cocycle => "cocycle",
            ViolationKind::Shape => "shape",
            ViolationKind::Unital => "unital",
            ViolationKind::Multiplicative => "multiplicative",
            ViolationKind::Homomorphism => "homomorphism",
        }
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub arrows: Vec<ArrowId>,
    pub points: Vec<PointId>,
    /// Size of the failure when it is numeric (e.g. `‖σ(g,h)T(gh) − T(g)T(h)‖`).
    pub magnitude: Option<f64>,
}

impl Violation {
    pub fn arrows(kind: ViolationKind, arrows: &[ArrowId]) -> Self {
        Violation { kind, arrows: arrows.to_vec(), points: Vec::new(), magnitude: None }
    }

    pub fn points(kind: ViolationKind, points: &[PointId]) -> Self {
        Violation { kind, arrows: Vec::new(), points: points.to_vec(), magnitude: None }
    }

    pub fn with_arrow(mut self, g: ArrowId) -> Self {
        self.arrows.push(g);
        self
    }

    pub fn with_arrows(mut self, arrows: &[ArrowId]) -> Self {
        self.arrows.extend_from_slice(arrows);
        self
    }

    pub fn with_points(mut self, points: &[PointId]) -> Self {
        self.points.extend_from_slice(points);
        self
    }

    pub fn with_magnitude(mut self, magnitude: f64) -> Self {
        self.magnitude = Some(magnitude);
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if !self.arrows.is_empty() {
            write!(f, " arrows {:?}", self.arrows)?;
        }
        if !self.points.is_empty() {
            write!(f, " points {:?}", self.points)?;
        }
        if let Some(m) = self.magnitude {
            write!(f, " ({m:e})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub violations: Vec<Violation>,
    /// Axioms that are automatically satisfied at finite discrete scale.
    pub notes: Vec<&'static str>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn note(&mut self, note: &'static str) {
        self.notes.push(note);
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn extend(&mut self, other: Report) {
        self.violations.extend(other.violations);
        self.notes.extend(other.notes);
    }

    /// `Ok(())` when valid, otherwise the report wrapped in [`crate::Error::Invalid`].
    pub fn into_result(self) -> crate::Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(crate::Error::Invalid(self))
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

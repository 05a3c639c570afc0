//! Finite groupoids with explicit tables.
//!
//! Arrows and points carry dense integer ids. An arrow `g` goes from
//! `src(g)` to `tgt(g)`, and the product `gh` is defined when
//! `src(g) == tgt(h)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::report::{Report, Violation, ViolationKind};

pub type ArrowId = usize;
pub type PointId = usize;

const NONE: usize = usize::MAX;

/// Raw groupoid data as it would be read from a file, before validation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupoidTables {
    pub n_points: usize,
    /// `(src, tgt)` per arrow.
    pub arrows: Vec<(PointId, PointId)>,
    /// `(g, h, gh)` for every composable pair.
    pub compose: Vec<(ArrowId, ArrowId, ArrowId)>,
    pub inverse: Vec<ArrowId>,
    pub unit: Vec<ArrowId>,
}

/// Checks every groupoid axiom exhaustively.
///
/// Dangling ids are reported first; when any are present the axioms are not
/// evaluated. Product entries that are missing are skipped by the axiom
/// checks that would need them.
pub fn validate_groupoid(t: &GroupoidTables) -> Report {
    let mut report = Report::new();
    let n = t.arrows.len();
    let np = t.n_points;

    for (g, &(s, d)) in t.arrows.iter().enumerate() {
        if s >= np || d >= np {
            report.push(Violation::arrows(ViolationKind::DanglingId, &[g]));
        }
    }
    if t.inverse.len() != n {
        let found: Vec<ArrowId> = (t.inverse.len().min(n)..n.max(t.inverse.len())).collect();
        report.push(Violation::arrows(ViolationKind::DanglingId, &found));
    }
    for (g, &gi) in t.inverse.iter().enumerate() {
        if gi >= n && g < n {
            report.push(Violation::arrows(ViolationKind::DanglingId, &[g]));
        }
    }
    if t.unit.len() != np {
        let found: Vec<PointId> = (t.unit.len().min(np)..np.max(t.unit.len())).collect();
        report.push(Violation::points(ViolationKind::DanglingId, &found));
    }
    for (x, &u) in t.unit.iter().enumerate() {
        if u >= n && x < np {
            report.push(Violation::points(ViolationKind::DanglingId, &[x]));
        }
    }
    for &(g, h, gh) in &t.compose {
        if g >= n || h >= n || gh >= n {
            report.push(Violation::arrows(ViolationKind::DanglingId, &[g, h, gh]));
        }
    }
    if !report.is_valid() {
        return report;
    }

    let src = |g: ArrowId| t.arrows[g].0;
    let tgt = |g: ArrowId| t.arrows[g].1;

    let mut product = vec![NONE; n * n];
    for &(g, h, gh) in &t.compose {
        if src(g) != tgt(h) {
            report.push(Violation::arrows(ViolationKind::NotComposable, &[g, h]));
            continue;
        }
        let slot = &mut product[g * n + h];
        if *slot != NONE {
            report.push(Violation::arrows(ViolationKind::DuplicateProduct, &[g, h]));
        } else {
            *slot = gh;
        }
    }
    for g in 0..n {
        for h in 0..n {
            if src(g) == tgt(h) && product[g * n + h] == NONE {
                report.push(Violation::arrows(ViolationKind::MissingProduct, &[g, h]));
            }
        }
    }
    let mul = |g: ArrowId, h: ArrowId| {
        let p = product[g * n + h];
        (p != NONE).then_some(p)
    };

    for g in 0..n {
        for h in 0..n {
            if let Some(gh) = mul(g, h) {
                if src(gh) != src(h) || tgt(gh) != tgt(g) {
                    report.push(Violation::arrows(ViolationKind::SourceTarget, &[g, h]));
                }
            }
        }
    }

    for g in 0..n {
        for h in 0..n {
            let Some(gh) = mul(g, h) else { continue };
            for k in 0..n {
                if src(h) != tgt(k) {
                    continue;
                }
                let (Some(hk), true) = (mul(h, k), src(gh) == tgt(k)) else { continue };
                if let (Some(l), Some(r)) = (mul(gh, k), mul(g, hk)) {
                    if l != r {
                        report.push(Violation::arrows(ViolationKind::Associativity, &[g, h, k]));
                    }
                }
            }
        }
    }

    for (x, &u) in t.unit.iter().enumerate() {
        if src(u) != x || tgt(u) != x {
            report.push(Violation {
                kind: ViolationKind::Unit,
                arrows: vec![u],
                points: vec![x],
                magnitude: None,
            });
        }
    }
    for g in 0..n {
        let us = t.unit[src(g)];
        let ut = t.unit[tgt(g)];
        let right = mul(g, us).map_or(true, |p| p == g);
        let left = mul(ut, g).map_or(true, |p| p == g);
        if !right || !left {
            report.push(Violation::arrows(ViolationKind::Unit, &[g]));
        }
    }

    for g in 0..n {
        let gi = t.inverse[g];
        let ends = src(gi) == tgt(g) && tgt(gi) == src(g);
        let ok = ends
            && mul(g, gi).map_or(true, |p| p == t.unit[tgt(g)])
            && mul(gi, g).map_or(true, |p| p == t.unit[src(g)])
            && t.inverse[gi] == g;
        if !ok {
            report.push(Violation::arrows(ViolationKind::Inverse, &[g]));
        }
    }
    report
}

/// A validated finite groupoid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupoid {
    n_points: usize,
    src: Vec<PointId>,
    tgt: Vec<PointId>,
    product: Vec<ArrowId>,
    inverse: Vec<ArrowId>,
    unit: Vec<ArrowId>,
    by_target: Vec<Vec<ArrowId>>,
    by_source: Vec<Vec<ArrowId>>,
    orbit_of: Vec<usize>,
    orbits: Vec<Vec<PointId>>,
}

impl FiniteGroupoid {
    pub fn from_tables(t: &GroupoidTables) -> Result<Self> {
        validate_groupoid(t).into_result()?;
        let n = t.arrows.len();
        let mut product = vec![NONE; n * n];
        for &(g, h, gh) in &t.compose {
            product[g * n + h] = gh;
        }
        let src: Vec<PointId> = t.arrows.iter().map(|a| a.0).collect();
        let tgt: Vec<PointId> = t.arrows.iter().map(|a| a.1).collect();
        let mut by_target = vec![Vec::new(); t.n_points];
        let mut by_source = vec![Vec::new(); t.n_points];
        for g in 0..n {
            by_target[tgt[g]].push(g);
            by_source[src[g]].push(g);
        }

        let mut orbit_of = vec![NONE; t.n_points];
        let mut orbits = Vec::new();
        for x in 0..t.n_points {
            if orbit_of[x] != NONE {
                continue;
            }
            let id = orbits.len();
            let mut members: Vec<PointId> = by_source[x].iter().map(|&g| tgt[g]).collect();
            members.sort_unstable();
            members.dedup();
            for &y in &members {
                orbit_of[y] = id;
            }
            orbits.push(members);
        }

        Ok(FiniteGroupoid {
            n_points: t.n_points,
            src,
            tgt,
            product,
            inverse: t.inverse.clone(),
            unit: t.unit.clone(),
            by_target,
            by_source,
            orbit_of,
            orbits,
        })
    }

    pub fn validate(&self) -> Report {
        validate_groupoid(&self.tables())
    }

    pub fn tables(&self) -> GroupoidTables {
        GroupoidTables {
            n_points: self.n_points,
            arrows: self.src.iter().copied().zip(self.tgt.iter().copied()).collect(),
            compose: self.composable_pairs().map(|(g, h)| (g, h, self.mul(g, h))).collect(),
            inverse: self.inverse.clone(),
            unit: self.unit.clone(),
        }
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn n_arrows(&self) -> usize {
        self.src.len()
    }

    pub fn src(&self, g: ArrowId) -> PointId {
        self.src[g]
    }

    pub fn tgt(&self, g: ArrowId) -> PointId {
        self.tgt[g]
    }

    pub fn inverse(&self, g: ArrowId) -> ArrowId {
        self.inverse[g]
    }

    pub fn unit(&self, x: PointId) -> ArrowId {
        self.unit[x]
    }

    pub fn is_unit(&self, g: ArrowId) -> bool {
        self.unit[self.src[g]] == g
    }

    pub fn composable(&self, g: ArrowId, h: ArrowId) -> bool {
        self.src[g] == self.tgt[h]
    }

    pub fn compose(&self, g: ArrowId, h: ArrowId) -> Option<ArrowId> {
        self.composable(g, h).then(|| self.product[g * self.n_arrows() + h])
    }

    /// The product `gh`.
    ///
    /// # Panics
    /// If `g` and `h` are not composable.
    pub fn mul(&self, g: ArrowId, h: ArrowId) -> ArrowId {
        assert!(self.composable(g, h), "arrows {g} and {h} are not composable");
        self.product[g * self.n_arrows() + h]
    }

    /// `G^x`: arrows with target `x`, ascending.
    pub fn target_fiber(&self, x: PointId) -> &[ArrowId] {
        &self.by_target[x]
    }

    /// `G_x`: arrows with source `x`, ascending.
    pub fn source_fiber(&self, x: PointId) -> &[ArrowId] {
        &self.by_source[x]
    }

    /// Arrows `from → to`, ascending.
    pub fn arrows_between(&self, from: PointId, to: PointId) -> Vec<ArrowId> {
        self.by_source[from].iter().copied().filter(|&g| self.tgt[g] == to).collect()
    }

    /// Composable pairs `(g, h)` in lexicographic order.
    pub fn composable_pairs(&self) -> impl Iterator<Item = (ArrowId, ArrowId)> + '_ {
        (0..self.n_arrows())
            .flat_map(move |g| self.by_target[self.src[g]].iter().map(move |&h| (g, h)))
    }

    pub fn orbits(&self) -> &[Vec<PointId>] {
        &self.orbits
    }

    pub fn orbit_of(&self, x: PointId) -> usize {
        self.orbit_of[x]
    }

    pub fn check_point(&self, x: PointId) -> Result<()> {
        if x < self.n_points {
            Ok(())
        } else {
            Err(Error::PointOutOfRange(x))
        }
    }

    pub fn check_arrow(&self, g: ArrowId) -> Result<()> {
        if g < self.n_arrows() {
            Ok(())
        } else {
            Err(Error::ArrowOutOfRange(g))
        }
    }
}

/// A finite group given by its Cayley table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl Group {
    /// Validates `table[a][b] = ab`. The identity need not be element 0.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        let mut report = Report::new();
        if n == 0 {
            report.push(Violation::arrows(ViolationKind::Identity, &[]));
            return Err(Error::Invalid(report));
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                report.push(Violation::arrows(ViolationKind::Closure, &[a]));
                continue;
            }
            for (b, &ab) in row.iter().enumerate() {
                if ab >= n {
                    report.push(Violation::arrows(ViolationKind::Closure, &[a, b]));
                }
            }
        }
        if !report.is_valid() {
            return Err(Error::Invalid(report));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        report.push(Violation::arrows(ViolationKind::Associativity, &[a, b, c]));
                    }
                }
            }
        }
        let identity = (0..n).find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a));
        let Some(identity) = identity else {
            report.push(Violation::arrows(ViolationKind::Identity, &[]));
            return Err(Error::Invalid(report));
        };
        let mut inverse = vec![NONE; n];
        for a in 0..n {
            match (0..n).find(|&b| table[a][b] == identity && table[b][a] == identity) {
                Some(b) => inverse[a] = b,
                None => report.push(Violation::arrows(ViolationKind::Inverse, &[a])),
            }
        }
        report.into_result()?;
        Ok(Group { table, identity, inverse })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }
}

/// One-point groupoid whose arrow ids are the group elements.
pub fn build_group(table: Vec<Vec<usize>>) -> Result<FiniteGroupoid> {
    let group = Group::from_table(table)?;
    Ok(build_group_bundle(&[group]))
}

/// Disjoint union of groups, fiber `i` sitting over point `i`.
///
/// Arrows are numbered fiber by fiber, in element order.
pub fn build_group_bundle(fibers: &[Group]) -> FiniteGroupoid {
    let mut t = GroupoidTables { n_points: fibers.len(), ..Default::default() };
    let mut offset = 0;
    for (x, group) in fibers.iter().enumerate() {
        let n = group.order();
        for a in 0..n {
            t.arrows.push((x, x));
            t.inverse.push(offset + group.inverse(a));
            for b in 0..n {
                t.compose.push((offset + a, offset + b, offset + group.mul(a, b)));
            }
        }
        t.unit.push(offset + group.identity());
        offset += n;
    }
    FiniteGroupoid::from_tables(&t).expect("group bundle tables are valid")
}

/// Validates a group bundle given as raw tables.
pub fn build_group_bundle_from_tables(tables: Vec<Vec<Vec<usize>>>) -> Result<FiniteGroupoid> {
    let groups = tables.into_iter().map(Group::from_table).collect::<Result<Vec<_>>>()?;
    Ok(build_group_bundle(&groups))
}

/// Transformation groupoid of a left action, `action[k][x] = k·x`.
///
/// Arrow `(k, x)` has id `k * n_points + x` and goes `x → k·x`;
/// `(k', k·x)(k, x) = (k'k, x)`. A right action `x·k` is handled by passing
/// `action[k][x] = x·k⁻¹`.
pub fn build_transformation_groupoid(
    group: &Group,
    n_points: usize,
    action: &[Vec<PointId>],
) -> Result<FiniteGroupoid> {
    let order = group.order();
    if action.len() != order {
        return Err(Error::Length { what: "action rows", expected: order, found: action.len() });
    }
    let mut report = Report::new();
    for (k, row) in action.iter().enumerate() {
        if row.len() != n_points {
            return Err(Error::Length { what: "action row", expected: n_points, found: row.len() });
        }
        for (x, &y) in row.iter().enumerate() {
            if y >= n_points {
                report.push(Violation::points(ViolationKind::DanglingId, &[x]).with_arrow(k));
            }
        }
    }
    report.clone().into_result()?;
    let e = group.identity();
    for x in 0..n_points {
        if action[e][x] != x {
            report.push(Violation::points(ViolationKind::Identity, &[x]));
        }
    }
    for a in 0..order {
        for b in 0..order {
            for x in 0..n_points {
                if action[group.mul(a, b)][x] != action[a][action[b][x]] {
                    report.push(
                        Violation::points(ViolationKind::Compatibility, &[x]).with_arrows(&[a, b]),
                    );
                }
            }
        }
    }
    report.into_result()?;

    let id = |k: usize, x: PointId| k * n_points + x;
    let mut t = GroupoidTables { n_points, ..Default::default() };
    for k in 0..order {
        for x in 0..n_points {
            t.arrows.push((x, action[k][x]));
            t.inverse.push(id(group.inverse(k), action[k][x]));
        }
    }
    for x in 0..n_points {
        t.unit.push(id(e, x));
    }
    for k2 in 0..order {
        for k in 0..order {
            for x in 0..n_points {
                t.compose.push((id(k2, action[k][x]), id(k, x), id(group.mul(k2, k), x)));
            }
        }
    }
    FiniteGroupoid::from_tables(&t)
}

/// Pair groupoid `X × X`: arrow `(x, y): y → x` has id `x * n + y`.
pub fn pair_groupoid(n: usize) -> FiniteGroupoid {
    let id = |x: PointId, y: PointId| x * n + y;
    let mut t = GroupoidTables { n_points: n, ..Default::default() };
    for x in 0..n {
        for y in 0..n {
            t.arrows.push((y, x));
            t.inverse.push(id(y, x));
        }
        t.unit.push(id(x, x));
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                t.compose.push((id(x, y), id(y, z), id(x, z)));
            }
        }
    }
    FiniteGroupoid::from_tables(&t).expect("pair groupoid tables are valid")
}

/// Only unit arrows; arrow `x` is the unit of point `x`.
pub fn unit_groupoid(n: usize) -> FiniteGroupoid {
    let t = GroupoidTables {
        n_points: n,
        arrows: (0..n).map(|x| (x, x)).collect(),
        compose: (0..n).map(|x| (x, x, x)).collect(),
        inverse: (0..n).collect(),
        unit: (0..n).collect(),
    };
    FiniteGroupoid::from_tables(&t).expect("unit groupoid tables are valid")
}

/// A groupoid homomorphism `φ: H → G` given on points and arrows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    pub points: Vec<PointId>,
    pub arrows: Vec<ArrowId>,
}

impl Homomorphism {
    pub fn identity(g: &FiniteGroupoid) -> Self {
        Homomorphism { points: (0..g.n_points()).collect(), arrows: (0..g.n_arrows()).collect() }
    }

    pub fn validate(&self, domain: &FiniteGroupoid, codomain: &FiniteGroupoid) -> Report {
        let mut report = Report::new();
        if self.points.len() != domain.n_points() || self.arrows.len() != domain.n_arrows() {
            report.push(Violation::arrows(ViolationKind::DanglingId, &[]));
            return report;
        }
        for (y, &x) in self.points.iter().enumerate() {
            if x >= codomain.n_points() {
                report.push(Violation::points(ViolationKind::DanglingId, &[y]));
            }
        }
        for (h, &g) in self.arrows.iter().enumerate() {
            if g >= codomain.n_arrows() {
                report.push(Violation::arrows(ViolationKind::DanglingId, &[h]));
            }
        }
        if !report.is_valid() {
            return report;
        }
        for h in 0..domain.n_arrows() {
            let g = self.arrows[h];
            if codomain.src(g) != self.points[domain.src(h)]
                || codomain.tgt(g) != self.points[domain.tgt(h)]
            {
                report.push(Violation::arrows(ViolationKind::SourceTarget, &[h]));
            }
        }
        if !report.is_valid() {
            return report;
        }
        for y in 0..domain.n_points() {
            if self.arrows[domain.unit(y)] != codomain.unit(self.points[y]) {
                report.push(Violation::points(ViolationKind::Unit, &[y]));
            }
        }
        for (h, k) in domain.composable_pairs() {
            if self.arrows[domain.mul(h, k)] != codomain.mul(self.arrows[h], self.arrows[k]) {
                report.push(Violation::arrows(ViolationKind::Homomorphism, &[h, k]));
            }
        }
        report
    }
}

/// Full subgroupoid on `points` with its inclusion.
///
/// Points of the result are the members of `points` in ascending order;
/// arrows keep their relative order.
pub fn restrict(g: &FiniteGroupoid, points: &[PointId]) -> Result<(FiniteGroupoid, Homomorphism)> {
    let mut keep: Vec<PointId> = points.to_vec();
    keep.sort_unstable();
    keep.dedup();
    for &x in &keep {
        g.check_point(x)?;
    }
    let mut new_point = vec![NONE; g.n_points()];
    for (i, &x) in keep.iter().enumerate() {
        new_point[x] = i;
    }
    let arrows: Vec<ArrowId> = (0..g.n_arrows())
        .filter(|&a| new_point[g.src(a)] != NONE && new_point[g.tgt(a)] != NONE)
        .collect();
    let mut new_arrow = vec![NONE; g.n_arrows()];
    for (i, &a) in arrows.iter().enumerate() {
        new_arrow[a] = i;
    }
    let mut t = GroupoidTables { n_points: keep.len(), ..Default::default() };
    for &a in &arrows {
        t.arrows.push((new_point[g.src(a)], new_point[g.tgt(a)]));
        t.inverse.push(new_arrow[g.inverse(a)]);
    }
    t.unit = keep.iter().map(|&x| new_arrow[g.unit(x)]).collect();
    for &a in &arrows {
        for &b in g.target_fiber(g.src(a)) {
            if new_arrow[b] != NONE {
                t.compose.push((new_arrow[a], new_arrow[b], new_arrow[g.mul(a, b)]));
            }
        }
    }
    let sub = FiniteGroupoid::from_tables(&t)?;
    Ok((sub, Homomorphism { points: keep, arrows }))
}

/// The isotropy group `G(x)` as a subset of arrows plus its Cayley table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isotropy {
    pub point: PointId,
    /// Arrow ids of `G(x)`, ascending; element `i` of `group` is `arrows[i]`.
    pub arrows: Vec<ArrowId>,
    pub group: Group,
}

pub fn isotropy(g: &FiniteGroupoid, x: PointId) -> Isotropy {
    let arrows = g.arrows_between(x, x);
    let index = |a: ArrowId| arrows.binary_search(&a).expect("isotropy is closed");
    let table = arrows
        .iter()
        .map(|&a| arrows.iter().map(|&b| index(g.mul(a, b))).collect())
        .collect();
    let group = Group::from_table(table).expect("isotropy of a valid groupoid is a group");
    Isotropy { point: x, arrows, group }
}

/// Isotropy group at every point and the orbit partition, orbits ordered by
/// their smallest point.
pub fn isotropy_and_orbits(g: &FiniteGroupoid) -> (Vec<Isotropy>, Vec<Vec<PointId>>) {
    let iso = (0..g.n_points()).map(|x| isotropy(g, x)).collect();
    (iso, g.orbits().to_vec())
}

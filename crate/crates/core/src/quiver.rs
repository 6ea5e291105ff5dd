//! Finite quivers, subquivers and quiver morphisms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use thiserror::Error;

use crate::report::{Clause, Report};

/// Default cap on the number of automorphisms enumerated.
pub const DEFAULT_AUTOMORPHISM_CAP: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuiverError {
    #[error("invalid quiver:\n{0}")]
    Invalid(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("subquiver is not closed:\n{0}")]
    NotClosed(String),
    #[error("morphisms do not compose: target of the first applied is not the source of the second")]
    Mismatch,
    #[error("not a quiver morphism: {0}")]
    NotMorphism(String),
    #[error("morphism is not bijective on {0}")]
    NotBijective(&'static str),
    #[error("more than {0} automorphisms")]
    TooManyAutomorphisms(usize),
}

/// An arrow as written in input: identifier, source, target.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arrow {
    pub id: String,
    pub source: String,
    pub target: String,
}

impl Arrow {
    pub fn new(id: impl Into<String>, source: impl Into<String>, target: impl Into<String>) -> Self {
        Arrow { id: id.into(), source: source.into(), target: target.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuiverViolation {
    DuplicateVertex(String),
    DuplicateArrow(String),
    DanglingSource { arrow: String, vertex: String },
    DanglingTarget { arrow: String, vertex: String },
}

impl Clause for QuiverViolation {
    fn clause(&self) -> &'static str {
        match self {
            QuiverViolation::DuplicateVertex(_) | QuiverViolation::DuplicateArrow(_) => "identifiers",
            QuiverViolation::DanglingSource { .. } | QuiverViolation::DanglingTarget { .. } => "endpoints",
        }
    }
}

impl fmt::Display for QuiverViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuiverViolation::DuplicateVertex(v) => write!(f, "duplicate vertex {v}"),
            QuiverViolation::DuplicateArrow(a) => write!(f, "duplicate arrow {a}"),
            QuiverViolation::DanglingSource { arrow, vertex } => {
                write!(f, "arrow {arrow} has source {vertex} which is not a vertex")
            }
            QuiverViolation::DanglingTarget { arrow, vertex } => {
                write!(f, "arrow {arrow} has target {vertex} which is not a vertex")
            }
        }
    }
}

/// Checks raw quiver data: unique identifiers and arrows with endpoints in
/// the vertex set.
/// Pairs of names `(preimage, image)`.
pub type NamePairs<'a> = Vec<(&'a str, &'a str)>;

pub fn validate_quiver(vertices: &[String], arrows: &[Arrow]) -> Report<QuiverViolation> {
    let mut report = Report::new();
    let mut seen = BTreeSet::new();
    for v in vertices {
        if !seen.insert(v.as_str()) {
            report.push(QuiverViolation::DuplicateVertex(v.clone()));
        }
    }
    let mut ids = BTreeSet::new();
    for a in arrows {
        if !ids.insert(a.id.as_str()) {
            report.push(QuiverViolation::DuplicateArrow(a.id.clone()));
        }
        if !seen.contains(a.source.as_str()) {
            report.push(QuiverViolation::DanglingSource { arrow: a.id.clone(), vertex: a.source.clone() });
        }
        if !seen.contains(a.target.as_str()) {
            report.push(QuiverViolation::DanglingTarget { arrow: a.id.clone(), vertex: a.target.clone() });
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct ArrowData {
    id: String,
    source: usize,
    target: usize,
}

/// A finite quiver. Vertices and arrows are indexed in insertion order and
/// carry string identifiers; parallel arrows and loops are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<ArrowData>,
    vindex: BTreeMap<String, usize>,
    aindex: BTreeMap<String, usize>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>, arrows: Vec<Arrow>) -> Result<Self, QuiverError> {
        let report = validate_quiver(&vertices, &arrows);
        if !report.is_valid() {
            return Err(QuiverError::Invalid(report.to_string()));
        }
        let vindex: BTreeMap<String, usize> =
            vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let aindex = arrows.iter().enumerate().map(|(i, a)| (a.id.clone(), i)).collect();
        let arrows = arrows
            .into_iter()
            .map(|a| ArrowData { source: vindex[&a.source], target: vindex[&a.target], id: a.id })
            .collect();
        Ok(Quiver { vertices, arrows, vindex, aindex })
    }

    /// Shorthand for building from string slices: `(id, source, target)`.
    pub fn from_names(vertices: &[&str], arrows: &[(&str, &str, &str)]) -> Result<Self, QuiverError> {
        Self::new(
            vertices.iter().map(|v| v.to_string()).collect(),
            arrows.iter().map(|&(a, s, t)| Arrow::new(a, s, t)).collect(),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrow_names(&self) -> Vec<String> {
        self.arrows.iter().map(|a| a.id.clone()).collect()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn arrow_name(&self, a: usize) -> &str {
        &self.arrows[a].id
    }

    pub fn vertex(&self, name: &str) -> Result<usize, QuiverError> {
        self.vindex.get(name).copied().ok_or_else(|| QuiverError::UnknownVertex(name.to_string()))
    }

    pub fn arrow(&self, name: &str) -> Result<usize, QuiverError> {
        self.aindex.get(name).copied().ok_or_else(|| QuiverError::UnknownArrow(name.to_string()))
    }

    pub fn source(&self, a: usize) -> usize {
        self.arrows[a].source
    }

    pub fn target(&self, a: usize) -> usize {
        self.arrows[a].target
    }

    /// Arrows in input form.
    pub fn arrow_records(&self) -> Vec<Arrow> {
        self.arrows
            .iter()
            .map(|a| Arrow::new(&a.id, &self.vertices[a.source], &self.vertices[a.target]))
            .collect()
    }

    /// Arrows leaving `v`, in index order.
    pub fn out_arrows(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.arrows.len()).filter(move |&a| self.arrows[a].source == v)
    }

    /// The same quiver with vertices and arrows renamed and reordered.
    /// `vertex_perm[i]` is the new position of vertex `i`.
    pub fn relabeled(
        &self,
        vertex_perm: &[usize],
        arrow_perm: &[usize],
        vertex_name: impl Fn(&str) -> String,
        arrow_name: impl Fn(&str) -> String,
    ) -> Result<Quiver, QuiverError> {
        let mut vertices = vec![String::new(); self.vertices.len()];
        for (i, v) in self.vertices.iter().enumerate() {
            vertices[vertex_perm[i]] = vertex_name(v);
        }
        let mut arrows = vec![Arrow::new("", "", ""); self.arrows.len()];
        for (i, a) in self.arrows.iter().enumerate() {
            arrows[arrow_perm[i]] = Arrow::new(
                arrow_name(&a.id),
                vertex_name(&self.vertices[a.source]),
                vertex_name(&self.vertices[a.target]),
            );
        }
        Quiver::new(vertices, arrows)
    }
}

/// A choice of vertices and arrows of a parent quiver.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subquiver {
    pub vertices: BTreeSet<usize>,
    pub arrows: BTreeSet<usize>,
}

impl Subquiver {
    pub fn new(vertices: impl IntoIterator<Item = usize>, arrows: impl IntoIterator<Item = usize>) -> Self {
        Subquiver { vertices: vertices.into_iter().collect(), arrows: arrows.into_iter().collect() }
    }

    pub fn full(q: &Quiver) -> Self {
        Self::new(0..q.vertex_count(), 0..q.arrow_count())
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Looks up names; does not check closure.
    pub fn from_names(q: &Quiver, vertices: &[&str], arrows: &[&str]) -> Result<Self, QuiverError> {
        Ok(Subquiver {
            vertices: vertices.iter().map(|v| q.vertex(v)).collect::<Result<_, _>>()?,
            arrows: arrows.iter().map(|a| q.arrow(a)).collect::<Result<_, _>>()?,
        })
    }

    pub fn intersection(&self, other: &Subquiver) -> Subquiver {
        Subquiver {
            vertices: self.vertices.intersection(&other.vertices).copied().collect(),
            arrows: self.arrows.intersection(&other.arrows).copied().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.arrows.is_empty()
    }

    pub fn is_subset(&self, other: &Subquiver) -> bool {
        self.vertices.is_subset(&other.vertices) && self.arrows.is_subset(&other.arrows)
    }

    pub fn is_closed(&self, q: &Quiver) -> bool {
        validate_subquiver(q, self).is_valid()
    }

    pub fn vertex_names<'q>(&self, q: &'q Quiver) -> Vec<&'q str> {
        self.vertices.iter().map(|&v| q.vertex_name(v)).collect()
    }

    pub fn arrow_names<'q>(&self, q: &'q Quiver) -> Vec<&'q str> {
        self.arrows.iter().map(|&a| q.arrow_name(a)).collect()
    }

    /// The subquiver as a quiver in its own right, with the parent's
    /// identifiers and index order.
    pub fn to_quiver(&self, q: &Quiver) -> Result<Quiver, QuiverError> {
        let report = validate_subquiver(q, self);
        if !report.is_valid() {
            return Err(QuiverError::NotClosed(report.to_string()));
        }
        Quiver::new(
            self.vertices.iter().map(|&v| q.vertex_name(v).to_string()).collect(),
            self.arrows
                .iter()
                .map(|&a| Arrow::new(q.arrow_name(a), q.vertex_name(q.source(a)), q.vertex_name(q.target(a))))
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubquiverViolation {
    OutOfRange(String),
    SourceMissing { arrow: String, vertex: String },
    TargetMissing { arrow: String, vertex: String },
}

impl Clause for SubquiverViolation {
    fn clause(&self) -> &'static str {
        match self {
            SubquiverViolation::OutOfRange(_) => "range",
            _ => "closure",
        }
    }
}

impl fmt::Display for SubquiverViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubquiverViolation::OutOfRange(what) => write!(f, "{what} is not in the parent quiver"),
            SubquiverViolation::SourceMissing { arrow, vertex } => {
                write!(f, "arrow {arrow} included but its source {vertex} is not")
            }
            SubquiverViolation::TargetMissing { arrow, vertex } => {
                write!(f, "arrow {arrow} included but its target {vertex} is not")
            }
        }
    }
}

/// Checks that every included arrow has both endpoints included.
pub fn validate_subquiver(q: &Quiver, s: &Subquiver) -> Report<SubquiverViolation> {
    let mut report = Report::new();
    for &v in &s.vertices {
        if v >= q.vertex_count() {
            report.push(SubquiverViolation::OutOfRange(format!("vertex #{v}")));
        }
    }
    for &a in &s.arrows {
        if a >= q.arrow_count() {
            report.push(SubquiverViolation::OutOfRange(format!("arrow #{a}")));
            continue;
        }
        let (src, tgt) = (q.source(a), q.target(a));
        if !s.vertices.contains(&src) {
            report.push(SubquiverViolation::SourceMissing {
                arrow: q.arrow_name(a).into(),
                vertex: q.vertex_name(src).into(),
            });
        }
        if !s.vertices.contains(&tgt) {
            report.push(SubquiverViolation::TargetMissing {
                arrow: q.arrow_name(a).into(),
                vertex: q.vertex_name(tgt).into(),
            });
        }
    }
    report
}

/// A morphism of quivers: a vertex map and an arrow map compatible with
/// source and target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverMorphism {
    source: Arc<Quiver>,
    target: Arc<Quiver>,
    vertex_map: Vec<usize>,
    arrow_map: Vec<usize>,
}

impl QuiverMorphism {
    pub fn new(
        source: Arc<Quiver>,
        target: Arc<Quiver>,
        vertex_map: Vec<usize>,
        arrow_map: Vec<usize>,
    ) -> Result<Self, QuiverError> {
        if vertex_map.len() != source.vertex_count() || arrow_map.len() != source.arrow_count() {
            return Err(QuiverError::NotMorphism("maps do not cover the source quiver".into()));
        }
        if vertex_map.iter().any(|&v| v >= target.vertex_count())
            || arrow_map.iter().any(|&a| a >= target.arrow_count())
        {
            return Err(QuiverError::NotMorphism("image outside the target quiver".into()));
        }
        for (x, &y) in arrow_map.iter().enumerate() {
            if target.source(y) != vertex_map[source.source(x)] {
                return Err(QuiverError::NotMorphism(format!(
                    "source of {} is not preserved",
                    source.arrow_name(x)
                )));
            }
            if target.target(y) != vertex_map[source.target(x)] {
                return Err(QuiverError::NotMorphism(format!(
                    "target of {} is not preserved",
                    source.arrow_name(x)
                )));
            }
        }
        Ok(QuiverMorphism { source, target, vertex_map, arrow_map })
    }

    /// Builds a morphism from name pairs.
    pub fn from_names(
        source: Arc<Quiver>,
        target: Arc<Quiver>,
        vertices: &[(&str, &str)],
        arrows: &[(&str, &str)],
    ) -> Result<Self, QuiverError> {
        let mut vmap = vec![usize::MAX; source.vertex_count()];
        for (x, y) in vertices {
            vmap[source.vertex(x)?] = target.vertex(y)?;
        }
        let mut amap = vec![usize::MAX; source.arrow_count()];
        for (x, y) in arrows {
            amap[source.arrow(x)?] = target.arrow(y)?;
        }
        Self::new(source, target, vmap, amap)
    }

    pub fn identity(q: Arc<Quiver>) -> Self {
        let vertex_map = (0..q.vertex_count()).collect();
        let arrow_map = (0..q.arrow_count()).collect();
        QuiverMorphism { source: q.clone(), target: q, vertex_map, arrow_map }
    }

    /// Inclusion of a closed subquiver-as-quiver into a quiver, by names.
    pub fn inclusion(sub: Arc<Quiver>, parent: Arc<Quiver>) -> Result<Self, QuiverError> {
        let vmap = sub.vertex_names().iter().map(|v| parent.vertex(v)).collect::<Result<_, _>>()?;
        let amap = sub.arrow_names().iter().map(|a| parent.arrow(a)).collect::<Result<_, _>>()?;
        Self::new(sub, parent, vmap, amap)
    }

    pub fn source(&self) -> &Arc<Quiver> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Quiver> {
        &self.target
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    pub fn arrow_map(&self) -> &[usize] {
        &self.arrow_map
    }

    pub fn map_vertex(&self, v: usize) -> usize {
        self.vertex_map[v]
    }

    pub fn map_arrow(&self, a: usize) -> usize {
        self.arrow_map[a]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &QuiverMorphism) -> Result<QuiverMorphism, QuiverError> {
        if other.target != self.source {
            return Err(QuiverError::Mismatch);
        }
        Ok(QuiverMorphism {
            source: other.source.clone(),
            target: self.target.clone(),
            vertex_map: other.vertex_map.iter().map(|&v| self.vertex_map[v]).collect(),
            arrow_map: other.arrow_map.iter().map(|&a| self.arrow_map[a]).collect(),
        })
    }

    pub fn is_isomorphism(&self) -> bool {
        is_bijection(&self.vertex_map, self.target.vertex_count())
            && is_bijection(&self.arrow_map, self.target.arrow_count())
    }

    pub fn is_injective(&self) -> bool {
        let v: BTreeSet<_> = self.vertex_map.iter().collect();
        let a: BTreeSet<_> = self.arrow_map.iter().collect();
        v.len() == self.vertex_map.len() && a.len() == self.arrow_map.len()
    }

    pub fn invert(&self) -> Result<QuiverMorphism, QuiverError> {
        let vertex_map = invert_map(&self.vertex_map, self.target.vertex_count()).ok_or(QuiverError::NotBijective("vertices"))?;
        let arrow_map = invert_map(&self.arrow_map, self.target.arrow_count()).ok_or(QuiverError::NotBijective("arrows"))?;
        Ok(QuiverMorphism { source: self.target.clone(), target: self.source.clone(), vertex_map, arrow_map })
    }

    /// Image of a subquiver of the source.
    pub fn image(&self, s: &Subquiver) -> Subquiver {
        Subquiver {
            vertices: s.vertices.iter().map(|&v| self.vertex_map[v]).collect(),
            arrows: s.arrows.iter().map(|&a| self.arrow_map[a]).collect(),
        }
    }

    /// Restricts to a closed subquiver `s` of the source and corestricts to
    /// its image, both viewed as quivers.
    pub fn restrict(&self, s: &Subquiver) -> Result<QuiverMorphism, QuiverError> {
        let dom = Arc::new(s.to_quiver(&self.source)?);
        let img = self.image(s);
        let cod = Arc::new(img.to_quiver(&self.target)?);
        let vmap = s
            .vertices
            .iter()
            .map(|&v| cod.vertex(self.target.vertex_name(self.vertex_map[v])))
            .collect::<Result<_, _>>()?;
        let amap = s
            .arrows
            .iter()
            .map(|&a| cod.arrow(self.target.arrow_name(self.arrow_map[a])))
            .collect::<Result<_, _>>()?;
        QuiverMorphism::new(dom, cod, vmap, amap)
    }

    /// `(vertex, image)` and `(arrow, image)` name pairs.
    pub fn name_pairs(&self) -> (NamePairs<'_>, NamePairs<'_>) {
        let v = self
            .vertex_map
            .iter()
            .enumerate()
            .map(|(x, &y)| (self.source.vertex_name(x), self.target.vertex_name(y)))
            .collect();
        let a = self
            .arrow_map
            .iter()
            .enumerate()
            .map(|(x, &y)| (self.source.arrow_name(x), self.target.arrow_name(y)))
            .collect();
        (v, a)
    }
}

pub(crate) fn is_bijection(map: &[usize], codomain: usize) -> bool {
    map.len() == codomain && invert_map(map, codomain).is_some()
}

fn invert_map(map: &[usize], codomain: usize) -> Option<Vec<usize>> {
    if map.len() != codomain {
        return None;
    }
    let mut inv = vec![usize::MAX; codomain];
    for (x, &y) in map.iter().enumerate() {
        if y >= codomain || inv[y] != usize::MAX {
            return None;
        }
        inv[y] = x;
    }
    Some(inv)
}

/// All automorphisms of `q`, identity first.
///
/// Vertices are assigned by backtracking, pruned by (out-degree, in-degree,
/// loop count) profiles and by arrow multiplicities between assigned
/// vertices. Each vertex bijection is then extended to arrows in every way
/// that permutes parallel arrows.
pub fn automorphisms(q: &Arc<Quiver>, cap: usize) -> Result<Vec<QuiverMorphism>, QuiverError> {
    let n = q.vertex_count();
    let mut mult = vec![vec![0usize; n]; n];
    let mut parallel: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for a in 0..q.arrow_count() {
        mult[q.source(a)][q.target(a)] += 1;
        parallel.entry((q.source(a), q.target(a))).or_default().push(a);
    }
    let profile: Vec<(usize, usize, usize)> = (0..n)
        .map(|v| {
            let out: usize = mult[v].iter().sum();
            let inc: usize = (0..n).map(|u| mult[u][v]).sum();
            (out, inc, mult[v][v])
        })
        .collect();

    let mut out = Vec::new();
    let mut assign = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let ctx = Search { q, mult: &mult, profile: &profile, parallel: &parallel, cap };
    ctx.assign_vertex(0, &mut assign, &mut used, &mut out)?;
    Ok(out)
}

struct Search<'a> {
    q: &'a Arc<Quiver>,
    mult: &'a [Vec<usize>],
    profile: &'a [(usize, usize, usize)],
    parallel: &'a BTreeMap<(usize, usize), Vec<usize>>,
    cap: usize,
}

impl Search<'_> {
    fn assign_vertex(
        &self,
        i: usize,
        assign: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<QuiverMorphism>,
    ) -> Result<(), QuiverError> {
        let n = assign.len();
        if i == n {
            return self.extend_to_arrows(assign, out);
        }
        // try the identity image first so the identity is found first
        let candidates = std::iter::once(i).chain((0..n).filter(|&c| c != i));
        for c in candidates {
            if used[c] || self.profile[c] != self.profile[i] {
                continue;
            }
            let consistent = (0..i).all(|j| {
                self.mult[i][j] == self.mult[c][assign[j]] && self.mult[j][i] == self.mult[assign[j]][c]
            });
            if !consistent {
                continue;
            }
            assign[i] = c;
            used[c] = true;
            self.assign_vertex(i + 1, assign, used, out)?;
            used[c] = false;
            assign[i] = usize::MAX;
        }
        Ok(())
    }

    fn extend_to_arrows(&self, vmap: &[usize], out: &mut Vec<QuiverMorphism>) -> Result<(), QuiverError> {
        let blocks: Vec<(&Vec<usize>, &Vec<usize>)> = self
            .parallel
            .iter()
            .map(|(&(u, v), arrows)| (arrows, &self.parallel[&(vmap[u], vmap[v])]))
            .collect();
        let mut amap = vec![usize::MAX; self.q.arrow_count()];
        self.extend_block(0, &blocks, vmap, &mut amap, out)
    }

    fn extend_block(
        &self,
        k: usize,
        blocks: &[(&Vec<usize>, &Vec<usize>)],
        vmap: &[usize],
        amap: &mut Vec<usize>,
        out: &mut Vec<QuiverMorphism>,
    ) -> Result<(), QuiverError> {
        if k == blocks.len() {
            if out.len() >= self.cap {
                return Err(QuiverError::TooManyAutomorphisms(self.cap));
            }
            out.push(QuiverMorphism {
                source: self.q.clone(),
                target: self.q.clone(),
                vertex_map: vmap.to_vec(),
                arrow_map: amap.clone(),
            });
            return Ok(());
        }
        let (from, to) = blocks[k];
        for perm in permutations(to.len()) {
            for (i, &a) in from.iter().enumerate() {
                amap[a] = to[perm[i]];
            }
            self.extend_block(k + 1, blocks, vmap, amap, out)?;
        }
        Ok(())
    }
}

/// Permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
}

fn quote(id: &str) -> String {
    format!("\"{}\"", id.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz DOT text for `q`. Vertices and arrows of `highlight` are drawn
/// in red.
pub fn export_dot(q: &Quiver, highlight: Option<&Subquiver>) -> String {
    const MARK: &str = "color=red, penwidth=2";
    let mut s = String::from("digraph {\n");
    for v in 0..q.vertex_count() {
        let lit = highlight.is_some_and(|h| h.vertices.contains(&v));
        if lit {
            let _ = writeln!(s, "  {} [{MARK}];", quote(q.vertex_name(v)));
        } else {
            let _ = writeln!(s, "  {};", quote(q.vertex_name(v)));
        }
    }
    for a in 0..q.arrow_count() {
        let lit = highlight.is_some_and(|h| h.arrows.contains(&a));
        let extra = if lit { format!(", {MARK}") } else { String::new() };
        let _ = writeln!(
            s,
            "  {} -> {} [label={}{extra}];",
            quote(q.vertex_name(q.source(a))),
            quote(q.vertex_name(q.target(a))),
            quote(q.arrow_name(a))
        );
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle4() -> Arc<Quiver> {
        Arc::new(
            Quiver::from_names(
                &["1", "2", "3", "4"],
                &[("a", "1", "2"), ("b", "2", "3"), ("c", "3", "4"), ("d", "4", "1")],
            )
            .unwrap(),
        )
    }

    fn rotation(q: &Arc<Quiver>, k: usize) -> QuiverMorphism {
        QuiverMorphism::new(q.clone(), q.clone(), (0..4).map(|i| (i + k) % 4).collect(), (0..4).map(|i| (i + k) % 4).collect())
            .unwrap()
    }

    #[test]
    fn quiver_validation() {
        assert!(validate_quiver(&[], &[]).is_valid());
        let q = cycle4();
        assert!(validate_quiver(q.vertex_names(), &q.arrow_records()).is_valid());
        let bad = validate_quiver(&["1".to_string()], &[Arrow::new("a", "1", "9")]);
        assert_eq!(
            bad.violations,
            vec![QuiverViolation::DanglingTarget { arrow: "a".into(), vertex: "9".into() }]
        );
        assert!(matches!(Quiver::from_names(&["1", "1"], &[]), Err(QuiverError::Invalid(_))));
    }

    #[test]
    fn subquiver_closure() {
        let q = cycle4();
        let s = Subquiver::from_names(&q, &["2", "3"], &["a", "b"]).unwrap();
        let report = validate_subquiver(&q, &s);
        assert_eq!(
            report.violations,
            vec![SubquiverViolation::SourceMissing { arrow: "a".into(), vertex: "1".into() }]
        );
        let s = Subquiver::from_names(&q, &["1", "2", "3"], &["a", "b"]).unwrap();
        assert!(validate_subquiver(&q, &s).is_valid());
    }

    #[test]
    fn composing_rotations() {
        let q = cycle4();
        let r = rotation(&q, 1);
        assert_eq!(r.compose(&r).unwrap(), rotation(&q, 2));
        let id = QuiverMorphism::identity(q.clone());
        assert_eq!(id.compose(&r).unwrap(), r);
        assert_eq!(r.compose(&r.invert().unwrap()).unwrap(), id);
        assert_eq!(r.invert().unwrap(), rotation(&q, 3));
        assert_eq!(id.invert().unwrap(), id);
    }

    #[test]
    fn compose_checks_quivers() {
        let q = cycle4();
        let p = Arc::new(Quiver::from_names(&["x"], &[]).unwrap());
        let f = QuiverMorphism::identity(p);
        assert_eq!(f.compose(&rotation(&q, 1)), Err(QuiverError::Mismatch));
    }

    #[test]
    fn collapse_is_not_invertible() {
        let q = Arc::new(Quiver::from_names(&["u", "v"], &[]).unwrap());
        let f = QuiverMorphism::new(q.clone(), q, vec![0, 0], vec![]).unwrap();
        assert!(!f.is_isomorphism());
        assert_eq!(f.invert(), Err(QuiverError::NotBijective("vertices")));
        assert!(QuiverMorphism::identity(cycle4()).is_isomorphism());
    }

    #[test]
    fn morphism_must_preserve_endpoints() {
        let q = cycle4();
        let err = QuiverMorphism::new(q.clone(), q, vec![0, 1, 2, 3], vec![1, 1, 2, 3]).unwrap_err();
        assert!(matches!(err, QuiverError::NotMorphism(_)));
    }

    #[test]
    fn restriction_of_rotation() {
        let q = cycle4();
        let s = Subquiver::from_names(&q, &["2", "3"], &["b"]).unwrap();
        let r = rotation(&q, 1).restrict(&s).unwrap();
        let (v, a) = r.name_pairs();
        assert_eq!(v, [("2", "3"), ("3", "4")]);
        assert_eq!(a, [("b", "c")]);
        let open = Subquiver::from_names(&q, &["2"], &["b"]).unwrap();
        assert!(matches!(rotation(&q, 1).restrict(&open), Err(QuiverError::NotClosed(_))));
    }

    #[test]
    fn automorphisms_of_small_quivers() {
        let arrow = Arc::new(Quiver::from_names(&["v1", "v2"], &[("f", "v1", "v2")]).unwrap());
        assert_eq!(automorphisms(&arrow, 10).unwrap().len(), 1);

        let q = cycle4();
        let auts = automorphisms(&q, 100).unwrap();
        assert_eq!(auts.len(), 4);
        for k in 0..4 {
            assert!(auts.contains(&rotation(&q, k)));
        }

        let par = Arc::new(Quiver::from_names(&["u", "v"], &[("x", "u", "v"), ("y", "u", "v")]).unwrap());
        let auts = automorphisms(&par, 10).unwrap();
        assert_eq!(auts.len(), 2);
        assert_eq!(auts[0], QuiverMorphism::identity(par.clone()));
        assert_eq!(auts[1].arrow_map(), [1, 0]);

        assert_eq!(automorphisms(&q, 3), Err(QuiverError::TooManyAutomorphisms(3)));
    }

    #[test]
    fn dot_output() {
        let empty = Quiver::from_names(&[], &[]).unwrap();
        assert_eq!(export_dot(&empty, None), "digraph {\n}\n");
        let arrow = Quiver::from_names(&["v1", "v2"], &[("f", "v1", "v2")]).unwrap();
        assert_eq!(
            export_dot(&arrow, None),
            "digraph {\n  \"v1\";\n  \"v2\";\n  \"v1\" -> \"v2\" [label=\"f\"];\n}\n"
        );
        let q = cycle4();
        let s = Subquiver::from_names(&q, &["1", "2", "3"], &["a", "b"]).unwrap();
        let dot = export_dot(&q, Some(&s));
        assert_eq!(dot.matches(" -> ").count(), 4);
        assert_eq!(dot.matches("color=red").count(), 5);
        assert_eq!(dot.lines().filter(|l| l.contains("color=red") && !l.contains("->")).count(), 3);
        assert_eq!(dot, export_dot(&q, Some(&s)));
    }
}

//! Path algebras over the rationals and partial actions by subalgebras.
//!
//! Multiplication follows the composition convention: in `p·q` the path `q`
//! is traversed first, so `p·q ≠ 0` only when `source(p) = target(q)`.
//! Trivial paths `e_v` are the vertex idempotents and `Σ_v e_v` is the
//! identity.
//!
//! Path algebras of quivers with oriented cycles are infinite dimensional,
//! so every algebra-level check here runs on the window of paths of length
//! at most `L` and reports that window. Checks that reduce to subquivers are
//! exact.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::group::{Elem, FiniteGroup};
use crate::linalg::{axpy, Rational, Span, SparseVec};
use crate::quiver::{Quiver, QuiverError, Subquiver};
use crate::quiver_paction::{EnvelopingQuiverAction, PartialIso, QuiverPartialAction};
use crate::report::{Clause, Report};

/// Truncation length used when none is given.
pub const DEFAULT_TRUNCATION: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error("elements live over different quivers")]
    MixedQuivers,
    #[error("arrows {0} and {1} are not composable")]
    NotComposable(String, String),
    #[error("invalid partial action on quiver:\n{0}")]
    InvalidInput(String),
    #[error("canonical map is not well defined: {0}")]
    NotWellDefined(String),
    #[error("canonical map misses {0}")]
    NotCovering(String),
    #[error("canonical map is not multiplicative: {0}")]
    NotMultiplicative(String),
    #[error("canonical map is not bijective on the window: {0}")]
    NotBijective(String),
    #[error("canonical map does not commute with the actions: {0}")]
    NotEquivariant(String),
}

/// A basis path: a trivial path at a vertex, or a composable sequence of
/// arrows stored in traversal order (first arrow first).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    source: usize,
    target: usize,
    arrows: Vec<usize>,
}

impl Path {
    pub fn trivial(v: usize) -> Self {
        Path { source: v, target: v, arrows: Vec::new() }
    }

    pub fn arrow(q: &Quiver, a: usize) -> Self {
        Path { source: q.source(a), target: q.target(a), arrows: vec![a] }
    }

    /// A path from arrows in traversal order.
    pub fn from_arrows(q: &Quiver, arrows: &[usize]) -> Result<Self, AlgebraError> {
        let (&first, &last) = match (arrows.first(), arrows.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(AlgebraError::NotComposable(String::new(), String::new())),
        };
        for w in arrows.windows(2) {
            if q.target(w[0]) != q.source(w[1]) {
                return Err(AlgebraError::NotComposable(
                    q.arrow_name(w[0]).into(),
                    q.arrow_name(w[1]).into(),
                ));
            }
        }
        Ok(Path { source: q.source(first), target: q.target(last), arrows: arrows.to_vec() })
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn arrows(&self) -> &[usize] {
        &self.arrows
    }

    /// `self · other` (`other` first), or `None` when the product is zero.
    pub fn compose(&self, other: &Path) -> Option<Path> {
        if self.source != other.target {
            return None;
        }
        let mut arrows = other.arrows.clone();
        arrows.extend_from_slice(&self.arrows);
        Some(Path { source: other.source, target: self.target, arrows })
    }

    /// Whether the path lies in the span of paths of `s`: a trivial path
    /// needs its vertex, a nontrivial one needs all its arrows.
    pub fn lies_in(&self, s: &Subquiver) -> bool {
        if self.is_trivial() {
            s.vertices.contains(&self.source)
        } else {
            self.arrows.iter().all(|a| s.arrows.contains(a))
        }
    }

    /// Image under a vertex map and an arrow map into `target`.
    pub fn map_with(
        &self,
        target: &Quiver,
        vertex: impl Fn(usize) -> Option<usize>,
        arrow: impl Fn(usize) -> Option<usize>,
    ) -> Option<Path> {
        if self.is_trivial() {
            return vertex(self.source).map(Path::trivial);
        }
        let arrows: Option<Vec<usize>> = self.arrows.iter().map(|&a| arrow(a)).collect();
        Path::from_arrows(target, &arrows?).ok()
    }

    pub fn display(&self, q: &Quiver) -> String {
        if self.is_trivial() {
            return format!("e_{}", q.vertex_name(self.source));
        }
        let names: Vec<&str> = self.arrows.iter().rev().map(|&a| q.arrow_name(a)).collect();
        if names.iter().all(|n| n.chars().count() == 1) {
            names.concat()
        } else {
            names.join("*")
        }
    }
}

impl Ord for Path {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.arrows.cmp(&other.arrows))
            .then_with(|| self.source.cmp(&other.source))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All paths of length at most `max_len`, sorted.
pub fn enumerate_paths(q: &Quiver, max_len: usize) -> Vec<Path> {
    let mut out: Vec<Path> = (0..q.vertex_count()).map(Path::trivial).collect();
    let mut frontier: Vec<Path> = out.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for p in &frontier {
            for a in q.out_arrows(p.target) {
                next.push(Path::arrow(q, a).compose(p).expect("a leaves the end of p"));
            }
        }
        if next.is_empty() {
            break;
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort();
    out
}

/// Paths of `s` of length at most `max_len`, sorted.
pub fn enumerate_paths_in(q: &Quiver, s: &Subquiver, max_len: usize) -> Vec<Path> {
    enumerate_paths(q, max_len).into_iter().filter(|p| p.lies_in(s)).collect()
}

/// Number of paths of length at most `max_len`, counted by walks in the
/// adjacency structure.
pub fn truncated_dimension(q: &Quiver, max_len: usize) -> usize {
    let mut ending_at = vec![1usize; q.vertex_count()];
    let mut total = q.vertex_count();
    for _ in 0..max_len {
        let mut next = vec![0usize; q.vertex_count()];
        for a in 0..q.arrow_count() {
            next[q.target(a)] += ending_at[q.source(a)];
        }
        total += next.iter().sum::<usize>();
        ending_at = next;
    }
    total
}

/// A finite rational combination of paths of one quiver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    quiver: Arc<Quiver>,
    terms: SparseVec<Path>,
}

impl AlgebraElement {
    pub fn zero(quiver: Arc<Quiver>) -> Self {
        AlgebraElement { quiver, terms: BTreeMap::new() }
    }

    pub fn from_path(quiver: Arc<Quiver>, p: Path) -> Self {
        Self::from_terms(quiver, [(p, Rational::one())])
    }

    pub fn from_terms(quiver: Arc<Quiver>, terms: impl IntoIterator<Item = (Path, Rational)>) -> Self {
        let mut out = SparseVec::new();
        for (p, c) in terms {
            axpy(&mut out, &c, &BTreeMap::from([(p, Rational::one())]));
        }
        AlgebraElement { quiver, terms: out }
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn terms(&self) -> &SparseVec<Path> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: &Path) -> Rational {
        self.terms.get(p).cloned().unwrap_or_else(Rational::zero)
    }

    fn same_quiver(&self, other: &AlgebraElement) -> Result<(), AlgebraError> {
        if Arc::ptr_eq(&self.quiver, &other.quiver) || self.quiver == other.quiver {
            Ok(())
        } else {
            Err(AlgebraError::MixedQuivers)
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.same_quiver(other)?;
        let mut terms = self.terms.clone();
        axpy(&mut terms, &Rational::one(), &other.terms);
        Ok(AlgebraElement { quiver: self.quiver.clone(), terms })
    }

    pub fn scale(&self, c: &Rational) -> AlgebraElement {
        let terms = if c.is_zero() {
            BTreeMap::new()
        } else {
            self.terms.iter().map(|(p, x)| (p.clone(), x * c)).collect()
        };
        AlgebraElement { quiver: self.quiver.clone(), terms }
    }

    /// Bilinear extension of path concatenation.
    pub fn multiply(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.same_quiver(other)?;
        let mut terms = SparseVec::new();
        for (p, x) in &self.terms {
            for (q, y) in &other.terms {
                if let Some(pq) = p.compose(q) {
                    axpy(&mut terms, &(x * y), &BTreeMap::from([(pq, Rational::one())]));
                }
            }
        }
        Ok(AlgebraElement { quiver: self.quiver.clone(), terms })
    }

    /// Drops terms longer than `max_len`.
    pub fn truncate(&self, max_len: usize) -> AlgebraElement {
        AlgebraElement {
            quiver: self.quiver.clone(),
            terms: self.terms.iter().filter(|(p, _)| p.len() <= max_len).map(|(p, c)| (p.clone(), c.clone())).collect(),
        }
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{}", p.display(&self.quiver))?;
            } else {
                write!(f, "{}*{}", c, p.display(&self.quiver))?;
            }
        }
        Ok(())
    }
}

/// The path algebra `KQ` of a quiver over the rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathAlgebra {
    quiver: Arc<Quiver>,
}

impl PathAlgebra {
    pub fn new(quiver: Arc<Quiver>) -> Self {
        PathAlgebra { quiver }
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn vertex(&self, name: &str) -> Result<AlgebraElement, AlgebraError> {
        let v = self.quiver.vertex(name)?;
        Ok(AlgebraElement::from_path(self.quiver.clone(), Path::trivial(v)))
    }

    /// The path through the named arrows in traversal order.
    pub fn path(&self, arrows: &[&str]) -> Result<AlgebraElement, AlgebraError> {
        let ids = arrows.iter().map(|a| self.quiver.arrow(a)).collect::<Result<Vec<_>, _>>()?;
        let p = Path::from_arrows(&self.quiver, &ids)?;
        Ok(AlgebraElement::from_path(self.quiver.clone(), p))
    }

    pub fn element(&self, p: Path) -> AlgebraElement {
        AlgebraElement::from_path(self.quiver.clone(), p)
    }

    /// `Σ_v e_v`.
    pub fn one(&self) -> AlgebraElement {
        AlgebraElement::from_terms(
            self.quiver.clone(),
            (0..self.quiver.vertex_count()).map(|v| (Path::trivial(v), Rational::one())),
        )
    }

    pub fn multiply(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        x.multiply(y)
    }

    pub fn window(&self, max_len: usize) -> Vec<Path> {
        enumerate_paths(&self.quiver, max_len)
    }

    pub fn window_dimension(&self, max_len: usize) -> usize {
        truncated_dimension(&self.quiver, max_len)
    }
}

/// How a subalgebra is described.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpanForm {
    /// Spanned by the paths of a subquiver; closed under multiplication
    /// exactly.
    Subquiver(Subquiver),
    /// Spanned by explicit elements; only certified within the window.
    Explicit { elements: Vec<AlgebraElement>, truncation: usize },
}

/// A subspace of a path algebra described by spanning data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubalgebraSpan {
    quiver: Arc<Quiver>,
    form: SpanForm,
}

impl SubalgebraSpan {
    pub fn of_subquiver(quiver: Arc<Quiver>, s: Subquiver) -> Self {
        SubalgebraSpan { quiver, form: SpanForm::Subquiver(s) }
    }

    pub fn explicit(quiver: Arc<Quiver>, elements: Vec<AlgebraElement>, truncation: usize) -> Self {
        SubalgebraSpan { quiver, form: SpanForm::Explicit { elements, truncation } }
    }

    pub fn whole(quiver: Arc<Quiver>) -> Self {
        let s = Subquiver::full(&quiver);
        Self::of_subquiver(quiver, s)
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn form(&self) -> &SpanForm {
        &self.form
    }

    /// Echelon basis of the part of the span inside the length-`max_len`
    /// window.
    pub fn window_span(&self, max_len: usize) -> Span<Path> {
        match &self.form {
            SpanForm::Subquiver(s) => Span::from_vectors(
                enumerate_paths_in(&self.quiver, s, max_len)
                    .into_iter()
                    .map(|p| BTreeMap::from([(p, Rational::one())])),
            ),
            SpanForm::Explicit { elements, .. } => {
                // keep only combinations supported in the window
                let all = Span::from_vectors(elements.iter().map(|e| e.terms.clone()));
                let window: Span<Path> = Span::from_vectors(
                    enumerate_paths(&self.quiver, max_len)
                        .into_iter()
                        .map(|p| BTreeMap::from([(p, Rational::one())])),
                );
                if all.is_subspace_of(&window) {
                    all
                } else {
                    Span::from_vectors(all.basis().filter(|v| window.contains(v)).cloned())
                }
            }
        }
    }

    pub fn dimension(&self, max_len: usize) -> usize {
        self.window_span(max_len).dim()
    }

    /// Basis elements inside the window, in deterministic order.
    pub fn basis(&self, max_len: usize) -> Vec<AlgebraElement> {
        match &self.form {
            SpanForm::Subquiver(s) => enumerate_paths_in(&self.quiver, s, max_len)
                .into_iter()
                .map(|p| AlgebraElement::from_path(self.quiver.clone(), p))
                .collect(),
            SpanForm::Explicit { .. } => self
                .window_span(max_len)
                .basis()
                .map(|v| AlgebraElement { quiver: self.quiver.clone(), terms: v.clone() })
                .collect(),
        }
    }

    /// Membership; exact for the subquiver form.
    pub fn contains(&self, x: &AlgebraElement) -> bool {
        match &self.form {
            SpanForm::Subquiver(s) => x.terms.keys().all(|p| p.lies_in(s)),
            SpanForm::Explicit { elements, .. } => {
                Span::from_vectors(elements.iter().map(|e| e.terms.clone())).contains(&x.terms)
            }
        }
    }

    fn window_len(&self, max_len: usize) -> usize {
        match &self.form {
            SpanForm::Subquiver(_) => max_len,
            SpanForm::Explicit { truncation, .. } => max_len.min(*truncation),
        }
    }
}

/// A witness that a subspace is not a two-sided ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealWitness {
    pub left: AlgebraElement,
    pub right: AlgebraElement,
    pub product: AlgebraElement,
}

impl fmt::Display for IdealWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} · {} = {} lies outside the subspace", self.left, self.right, self.product)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdealCheck {
    /// Closed under multiplication by every path up to the window.
    Ideal { window: usize },
    NotIdeal(IdealWitness),
}

/// Looks for a path `p` (length ≤ `max_len`) and basis element `x` of `s`
/// with `p·x ∉ s` or `x·p ∉ s`; paths are scanned in order, left products
/// before right.
pub fn check_not_ideal(s: &SubalgebraSpan, max_len: usize) -> IdealCheck {
    let q = s.quiver.clone();
    let window = s.window_len(max_len);
    let paths = enumerate_paths(&q, window);
    for x in s.basis(window) {
        for p in &paths {
            let p = AlgebraElement::from_path(q.clone(), p.clone());
            let left = p.multiply(&x).expect("same quiver");
            if !s.contains(&left) {
                return IdealCheck::NotIdeal(IdealWitness { left: p, right: x, product: left });
            }
            let right = x.multiply(&p).expect("same quiver");
            if !s.contains(&right) {
                return IdealCheck::NotIdeal(IdealWitness { left: x, right: p, product: right });
            }
        }
    }
    IdealCheck::Ideal { window }
}

/// A partial action by subalgebras whose domains are spans of subquiver
/// paths and whose maps are induced by partial quiver isomorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraPartialAction {
    group: Arc<FiniteGroup>,
    quiver: Arc<Quiver>,
    domains: Vec<Subquiver>,
    maps: Vec<PartialIso>,
}

impl AlgebraPartialAction {
    pub fn from_parts(
        group: Arc<FiniteGroup>,
        quiver: Arc<Quiver>,
        domains: Vec<Subquiver>,
        maps: Vec<PartialIso>,
    ) -> Self {
        AlgebraPartialAction { group, quiver, domains, maps }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    /// The subquiver whose paths span `R_g`.
    pub fn domain_subquiver(&self, g: Elem) -> &Subquiver {
        &self.domains[g.0]
    }

    /// `R_g`.
    pub fn domain(&self, g: Elem) -> SubalgebraSpan {
        SubalgebraSpan::of_subquiver(self.quiver.clone(), self.domains[g.0].clone())
    }

    pub fn map(&self, g: Elem) -> &PartialIso {
        &self.maps[g.0]
    }

    pub fn set_domain(&mut self, g: Elem, s: Subquiver) {
        self.domains[g.0] = s;
    }

    pub fn map_mut(&mut self, g: Elem) -> &mut PartialIso {
        &mut self.maps[g.0]
    }

    /// `α_g(p)`, defined for basis paths of `R_{g⁻¹}`.
    pub fn apply_path(&self, g: Elem, p: &Path) -> Option<Path> {
        if !p.lies_in(&self.domains[self.group.inv(g).0]) {
            return None;
        }
        let m = &self.maps[g.0];
        p.map_with(&self.quiver, |v| m.vertices.get(&v).copied(), |a| m.arrows.get(&a).copied())
    }

    /// Linear extension of [`Self::apply_path`].
    pub fn apply(&self, g: Elem, x: &AlgebraElement) -> Option<AlgebraElement> {
        let mut terms = SparseVec::new();
        for (p, c) in &x.terms {
            let image = self.apply_path(g, p)?;
            axpy(&mut terms, c, &BTreeMap::from([(image, Rational::one())]));
        }
        Some(AlgebraElement { quiver: self.quiver.clone(), terms })
    }
}

/// The partial action on `KΓ` induced by a partial action on `Γ`:
/// `R_g` is spanned by the paths of `Γ^g` and `α_g` acts arrowwise.
pub fn induced_partial_action(a: &QuiverPartialAction) -> Result<AlgebraPartialAction, AlgebraError> {
    let report = a.check();
    if !report.is_valid() {
        return Err(AlgebraError::InvalidInput(report.to_string()));
    }
    let g_ = a.group();
    Ok(AlgebraPartialAction {
        group: g_.clone(),
        quiver: a.quiver().clone(),
        domains: g_.elements().map(|g| a.domain(g).clone()).collect(),
        maps: g_.elements().map(|g| a.map(g).clone()).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraActionViolation {
    /// (i): `R_e ≠ R` or `α_e ≠ id`.
    Identity(String),
    /// `α_g` is not an algebra isomorphism `R_{g⁻¹} → R_g` on the window.
    Iso { g: String, detail: String },
    /// (ii) at subquiver level (`window: None`) or on the window.
    Intersection { g: String, h: String, window: Option<usize>, detail: String },
    /// (iii) at a basis path.
    Composition { g: String, h: String, path: String, detail: String },
}

impl Clause for AlgebraActionViolation {
    fn clause(&self) -> &'static str {
        match self {
            AlgebraActionViolation::Identity(_) => "i",
            AlgebraActionViolation::Iso { .. } => "iso",
            AlgebraActionViolation::Intersection { .. } => "ii",
            AlgebraActionViolation::Composition { .. } => "iii",
        }
    }
}

impl fmt::Display for AlgebraActionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraActionViolation::Identity(s) => write!(f, "[i] {s}"),
            AlgebraActionViolation::Iso { g, detail } => write!(f, "[iso] alpha_{g}: {detail}"),
            AlgebraActionViolation::Intersection { g, h, window, detail } => match window {
                None => write!(f, "[ii] g={g}, h={h} (subquiver level): {detail}"),
                Some(l) => write!(f, "[ii] g={g}, h={h} (paths of length <= {l}): {detail}"),
            },
            AlgebraActionViolation::Composition { g, h, path, detail } => {
                write!(f, "[iii] g={g}, h={h}, x={path}: {detail}")
            }
        }
    }
}

pub const SUBALGEBRA_ACTION_CLAUSES: [&str; 4] = ["i", "iso", "ii", "iii"];

/// Checks the axioms of a partial action by subalgebras: (i) exactly,
/// (ii) exactly on subquivers and again on the window, (iii) and the
/// isomorphism property on every basis path of the window.
pub fn check_subalgebra_partial_action(a: &AlgebraPartialAction, max_len: usize) -> Report<AlgebraActionViolation> {
    let q = &*a.quiver;
    let g_ = &*a.group;
    let mut report = Report::new();
    let e = g_.identity();
    if a.domains[e.0] != Subquiver::full(q) {
        report.push(AlgebraActionViolation::Identity("R_e is not the whole algebra".into()));
    }
    let id = &a.maps[e.0];
    let is_id = (0..q.vertex_count()).all(|v| id.vertices.get(&v) == Some(&v))
        && (0..q.arrow_count()).all(|x| id.arrows.get(&x) == Some(&x))
        && id.vertices.len() == q.vertex_count()
        && id.arrows.len() == q.arrow_count();
    if !is_id {
        report.push(AlgebraActionViolation::Identity("alpha_e is not the identity".into()));
    }

    let window = enumerate_paths(q, max_len);
    let in_domain = |s: &Subquiver| -> Vec<&Path> { window.iter().filter(|p| p.lies_in(s)).collect() };
    let show = |p: &Path| p.display(q);

    for g in g_.elements() {
        let name = g_.name(g).to_string();
        let ginv = g_.inv(g);
        let dom = in_domain(&a.domains[ginv.0]);
        let mut images = BTreeMap::new();
        for &p in &dom {
            match a.apply_path(g, p) {
                None => report.push(AlgebraActionViolation::Iso {
                    g: name.clone(),
                    detail: format!("undefined on {}", show(p)),
                }),
                Some(image) => {
                    if !image.lies_in(&a.domains[g.0]) {
                        report.push(AlgebraActionViolation::Iso {
                            g: name.clone(),
                            detail: format!("{} maps to {} outside R_{name}", show(p), show(&image)),
                        });
                    }
                    if let Some(prev) = images.insert(image.clone(), p) {
                        report.push(AlgebraActionViolation::Iso {
                            g: name.clone(),
                            detail: format!("{} and {} both map to {}", show(prev), show(p), show(&image)),
                        });
                    }
                }
            }
        }
        for p in in_domain(&a.domains[g.0]) {
            if !images.contains_key(p) {
                report.push(AlgebraActionViolation::Iso {
                    g: name.clone(),
                    detail: format!("{} has no preimage", show(p)),
                });
            }
        }
        // multiplicativity on products that stay in the window
        for &x in &dom {
            for &y in &dom {
                if x.len() + y.len() > max_len {
                    break;
                }
                let (Some(ax), Some(ay)) = (a.apply_path(g, x), a.apply_path(g, y)) else { continue };
                let lhs = x.compose(y).map(|xy| a.apply_path(g, &xy));
                let rhs = ax.compose(&ay);
                let ok = match (lhs, rhs) {
                    (None, None) => true,
                    (Some(Some(l)), Some(r)) => l == r,
                    _ => false,
                };
                if !ok {
                    report.push(AlgebraActionViolation::Iso {
                        g: name.clone(),
                        detail: format!("alpha({}·{}) != alpha({})·alpha({})", show(x), show(y), show(x), show(y)),
                    });
                }
            }
        }
    }

    for g in g_.elements() {
        let ginv = g_.inv(g);
        let m = &a.maps[g.0];
        for h in g_.elements() {
            let gh = g_.mul(g, h);
            let lhs_sub = a.domains[ginv.0].intersection(&a.domains[h.0]);
            let rhs_sub = a.domains[g.0].intersection(&a.domains[gh.0]);
            let image_v: Option<BTreeSet<usize>> = lhs_sub.vertices.iter().map(|v| m.vertices.get(v).copied()).collect();
            let image_a: Option<BTreeSet<usize>> = lhs_sub.arrows.iter().map(|x| m.arrows.get(x).copied()).collect();
            let exact_ok = image_v.as_ref() == Some(&rhs_sub.vertices) && image_a.as_ref() == Some(&rhs_sub.arrows);
            if !exact_ok {
                report.push(AlgebraActionViolation::Intersection {
                    g: g_.name(g).into(),
                    h: g_.name(h).into(),
                    window: None,
                    detail: "image of the intersection subquiver differs from the target intersection".into(),
                });
            }
            let image: Option<BTreeSet<Path>> = in_domain(&lhs_sub).into_iter().map(|p| a.apply_path(g, p)).collect();
            let target: BTreeSet<Path> = in_domain(&rhs_sub).into_iter().cloned().collect();
            match image {
                Some(image) if image == target => {}
                Some(image) => {
                    let detail = match image.symmetric_difference(&target).next() {
                        Some(p) if image.contains(p) => format!("{} is in the image only", show(p)),
                        Some(p) => format!("{} is in the target only", show(p)),
                        None => String::new(),
                    };
                    report.push(AlgebraActionViolation::Intersection {
                        g: g_.name(g).into(),
                        h: g_.name(h).into(),
                        window: Some(max_len),
                        detail,
                    });
                }
                None => report.push(AlgebraActionViolation::Intersection {
                    g: g_.name(g).into(),
                    h: g_.name(h).into(),
                    window: Some(max_len),
                    detail: "alpha is undefined on part of the intersection".into(),
                }),
            }
        }
    }

    for g in g_.elements() {
        let ginv = g_.inv(g);
        for h in g_.elements() {
            let hinv = g_.inv(h);
            let gh = g_.mul(g, h);
            let meet = a.domains[h.0].intersection(&a.domains[ginv.0]);
            for y in in_domain(&meet) {
                let Some(x) = a.apply_path(hinv, y) else {
                    report.push(AlgebraActionViolation::Composition {
                        g: g_.name(g).into(),
                        h: g_.name(h).into(),
                        path: show(y),
                        detail: format!("alpha_{}^-1 undefined", g_.name(h)),
                    });
                    continue;
                };
                let lhs = a.apply_path(h, &x).and_then(|z| a.apply_path(g, &z));
                let rhs = a.apply_path(gh, &x);
                if lhs.is_none() || lhs != rhs {
                    let s = |p: Option<Path>| p.map_or("undefined".to_string(), |p| show(&p));
                    report.push(AlgebraActionViolation::Composition {
                        g: g_.name(g).into(),
                        h: g_.name(h).into(),
                        path: show(&x),
                        detail: format!("composite gives {} but alpha_{} gives {}", s(lhs), g_.name(gh), s(rhs)),
                    });
                }
            }
        }
    }
    report
}

fn unit_vec(p: Path) -> SparseVec<Path> {
    BTreeMap::from([(p, Rational::one())])
}

/// `i(p)` for a path of `Γ`.
fn embed_path(e: &EnvelopingQuiverAction, p: &Path) -> Path {
    let i = &e.embedding;
    p.map_with(e.global.quiver(), |v| Some(i.map_vertex(v)), |a| Some(i.map_arrow(a)))
        .expect("embedding is a quiver morphism")
}

/// `β_g(p)` for a path of `Q`.
fn act_path(e: &EnvelopingQuiverAction, g: Elem, p: &Path) -> Path {
    let b = &e.global;
    p.map_with(b.quiver(), |v| Some(b.vertex(g, v)), |a| Some(b.arrow(g, a)))
        .expect("beta_g is a quiver automorphism")
}

/// `Σ_g β_g(KΓ)` inside the window of paths of `Q` of length ≤ `max_len`.
pub fn sum_of_translates(e: &EnvelopingQuiverAction, max_len: usize) -> SubalgebraSpan {
    let q = e.global.quiver().clone();
    let gamma_paths = enumerate_paths(e.original.quiver(), max_len);
    let mut span = Span::new();
    for g in e.global.group().elements() {
        for p in &gamma_paths {
            span.insert(unit_vec(act_path(e, g, &embed_path(e, p))));
        }
    }
    let elements = span.basis().map(|v| AlgebraElement { quiver: q.clone(), terms: v.clone() }).collect();
    SubalgebraSpan::explicit(q, elements, max_len)
}

/// The subalgebra generated by `⋃_g β_g(KΓ)`, closed under products that
/// stay within the window.
pub fn generated_subalgebra(e: &EnvelopingQuiverAction, max_len: usize) -> SubalgebraSpan {
    let generators = sum_of_translates(e, max_len);
    let q = generators.quiver().clone();
    let gens: Vec<AlgebraElement> = generators.basis(max_len);
    let mut span: Span<Path> = Span::from_vectors(gens.iter().map(|x| x.terms.clone()));
    let mut frontier: Vec<AlgebraElement> = gens.clone();
    // every product of generators is g1·(g2·(…)), so left multiplication of
    // newly found elements by generators reaches all of them
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for s in &gens {
            for f in &frontier {
                let prod = s.multiply(f).expect("same quiver").truncate(max_len);
                if !prod.is_zero() && span.insert(prod.terms.clone()) {
                    next.push(prod);
                }
            }
        }
        frontier = next;
    }
    let elements = span.basis().map(|v| AlgebraElement { quiver: q.clone(), terms: v.clone() }).collect();
    SubalgebraSpan::explicit(q, elements, max_len)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraGlobalizationViolation {
    /// (i) the embedding `KΓ → KQ` is not an injective homomorphism.
    Embedding(String),
    /// (ii) the translates do not generate the window.
    Generation { generated: usize, window: usize },
    /// (iii) `D_g` is not the expected unital subalgebra.
    Intersection { g: String, detail: String },
    /// (iv) restricting `β` does not reproduce the induced action.
    Restriction { g: String, detail: String },
}

impl Clause for AlgebraGlobalizationViolation {
    fn clause(&self) -> &'static str {
        match self {
            AlgebraGlobalizationViolation::Embedding(_) => "i",
            AlgebraGlobalizationViolation::Generation { .. } => "ii",
            AlgebraGlobalizationViolation::Intersection { .. } => "iii",
            AlgebraGlobalizationViolation::Restriction { .. } => "iv",
        }
    }
}

impl fmt::Display for AlgebraGlobalizationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraGlobalizationViolation::Embedding(s) => write!(f, "[i] {s}"),
            AlgebraGlobalizationViolation::Generation { generated, window } => {
                write!(f, "[ii] generated subalgebra has dimension {generated}, window has {window}")
            }
            AlgebraGlobalizationViolation::Intersection { g, detail } => write!(f, "[iii] D_{g}: {detail}"),
            AlgebraGlobalizationViolation::Restriction { g, detail } => write!(f, "[iv] g={g}: {detail}"),
        }
    }
}

pub const ALGEBRA_GLOBALIZATION_CLAUSES: [&str; 4] = ["i", "ii", "iii", "iv"];

/// Per-element data for `D_g = β_g(KΓ) ∩ KΓ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionSummary {
    pub g: String,
    pub dimension: usize,
    pub unital: bool,
}

/// Outcome of [`check_algebra_globalization`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraGlobalizationReport {
    pub window: usize,
    pub window_dimension: usize,
    pub sum_dimension: usize,
    pub generated_dimension: usize,
    pub intersections: Vec<IntersectionSummary>,
    pub report: Report<AlgebraGlobalizationViolation>,
}

impl AlgebraGlobalizationReport {
    pub fn is_valid(&self) -> bool {
        self.report.is_valid()
    }
}

/// Checks that `(KQ, β)` globalizes the induced action on `KΓ`, clause by
/// clause, within the window of length `max_len`.
pub fn check_algebra_globalization(e: &EnvelopingQuiverAction, max_len: usize) -> AlgebraGlobalizationReport {
    let mut report = Report::new();
    let gamma = e.original.quiver().clone();
    let q = e.global.quiver().clone();
    let g_ = e.global.group().clone();
    let gamma_paths = enumerate_paths(&gamma, max_len);

    // (i)
    let embedded: Vec<Path> = gamma_paths.iter().map(|p| embed_path(e, p)).collect();
    if embedded.iter().collect::<BTreeSet<_>>().len() != embedded.len() {
        report.push(AlgebraGlobalizationViolation::Embedding("two paths have the same image".into()));
    }
    'outer: for (x, ix) in gamma_paths.iter().zip(&embedded) {
        for (y, iy) in gamma_paths.iter().zip(&embedded) {
            let lhs = x.compose(y).map(|xy| embed_path(e, &xy));
            if lhs != ix.compose(iy) {
                report.push(AlgebraGlobalizationViolation::Embedding(format!(
                    "i({}·{}) != i({})·i({})",
                    x.display(&gamma),
                    y.display(&gamma),
                    x.display(&gamma),
                    y.display(&gamma)
                )));
                break 'outer;
            }
        }
    }

    // (ii)
    let window_dimension = truncated_dimension(&q, max_len);
    let sum_dimension = sum_of_translates(e, max_len).dimension(max_len);
    let generated_dimension = generated_subalgebra(e, max_len).dimension(max_len);
    if generated_dimension != window_dimension {
        report.push(AlgebraGlobalizationViolation::Generation { generated: generated_dimension, window: window_dimension });
    }

    // (iii) and (iv)
    let image_sub = e.embedded();
    let kgamma = SubalgebraSpan::of_subquiver(q.clone(), image_sub.clone());
    let kgamma_span = kgamma.window_span(max_len);
    let induced = induced_partial_action(&e.original);
    let mut intersections = Vec::new();
    for g in g_.elements() {
        let name = g_.name(g).to_string();
        let translate_span: Span<Path> =
            Span::from_vectors(embedded.iter().map(|p| unit_vec(act_path(e, g, p))));
        let meet_dim = kgamma_span.intersection_dim(&translate_span);
        let meet_sub = e.global.image(g, &image_sub).intersection(&image_sub);
        let meet = SubalgebraSpan::of_subquiver(q.clone(), meet_sub.clone());
        let meet_basis = meet.basis(max_len);
        let spans_ok = meet_dim == meet_basis.len()
            && meet_basis.iter().all(|x| kgamma_span.contains(&x.terms) && translate_span.contains(&x.terms));
        if !spans_ok {
            report.push(AlgebraGlobalizationViolation::Intersection {
                g: name.clone(),
                detail: format!(
                    "intersection has dimension {meet_dim} but the intersection subquiver spans {}",
                    meet_basis.len()
                ),
            });
        }
        let unit = AlgebraElement::from_terms(
            q.clone(),
            meet_sub.vertices.iter().map(|&v| (Path::trivial(v), Rational::one())),
        );
        let unital = kgamma_span.contains(&unit.terms)
            && translate_span.contains(&unit.terms)
            && meet_basis.iter().all(|x| {
                unit.multiply(x).as_ref() == Ok(x) && x.multiply(&unit).as_ref() == Ok(x)
            });
        if !unital {
            report.push(AlgebraGlobalizationViolation::Intersection {
                g: name.clone(),
                detail: "does not contain its own identity".into(),
            });
        }
        intersections.push(IntersectionSummary { g: name.clone(), dimension: meet_dim, unital });

        match &induced {
            Err(err) => {
                report.push(AlgebraGlobalizationViolation::Restriction { g: name.clone(), detail: err.to_string() });
            }
            Ok(alpha) => {
                // β_g(KΓ) ∩ KΓ pulled back along i is R_g, and β_g extends α_g
                let r_g: BTreeSet<Path> = alpha.domain(g).basis(max_len).into_iter().flat_map(|x| x.terms.into_keys()).map(|p| embed_path(e, &p)).collect();
                let d_g: BTreeSet<Path> = meet_basis.iter().flat_map(|x| x.terms.keys().cloned()).collect();
                if r_g != d_g {
                    report.push(AlgebraGlobalizationViolation::Restriction {
                        g: name.clone(),
                        detail: "R_g differs from the translate intersected with the embedded algebra".into(),
                    });
                }
                let ginv = g_.inv(g);
                for p in alpha.domain(ginv).basis(max_len) {
                    let p = p.terms.into_keys().next().expect("basis path");
                    let via_alpha = alpha.apply_path(g, &p).map(|x| embed_path(e, &x));
                    let via_beta = act_path(e, g, &embed_path(e, &p));
                    if via_alpha.as_ref() != Some(&via_beta) {
                        report.push(AlgebraGlobalizationViolation::Restriction {
                            g: name.clone(),
                            detail: format!("beta and alpha disagree on {}", p.display(&gamma)),
                        });
                    }
                }
            }
        }
    }

    AlgebraGlobalizationReport {
        window: max_len,
        window_dimension,
        sum_dimension,
        generated_dimension,
        intersections,
        report,
    }
}

/// The map `η` on the window of `KQ₁`, a bijection onto the window of `KQ₂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraIsomorphism {
    pub source: Arc<Quiver>,
    pub target: Arc<Quiver>,
    pub window: usize,
    pub map: BTreeMap<Path, Path>,
}

impl AlgebraIsomorphism {
    pub fn is_identity(&self) -> bool {
        self.map.iter().all(|(p, q)| p == q)
    }
}

/// Builds `η : KQ₁ → KQ₂` by `η(β_g(i₁(x))) = β'_g(i₂(x))` on vertices and
/// arrows, extends it to paths, and verifies it on the window.
pub fn canonical_algebra_isomorphism(
    e1: &EnvelopingQuiverAction,
    e2: &EnvelopingQuiverAction,
    max_len: usize,
) -> Result<AlgebraIsomorphism, AlgebraError> {
    if e1.original != e2.original {
        return Err(AlgebraError::InvalidInput("enveloping actions of different partial actions".into()));
    }
    let gamma = e1.original.quiver().clone();
    let (q1, q2) = (e1.global.quiver().clone(), e2.global.quiver().clone());
    let g_ = e1.global.group().clone();

    let mut generators: BTreeMap<Path, Path> = BTreeMap::new();
    let basics = (0..gamma.vertex_count())
        .map(Path::trivial)
        .chain((0..gamma.arrow_count()).map(|a| Path::arrow(&gamma, a)));
    for x in basics {
        for g in g_.elements() {
            let from = act_path(e1, g, &embed_path(e1, &x));
            let to = act_path(e2, g, &embed_path(e2, &x));
            if let Some(prev) = generators.insert(from.clone(), to.clone()) {
                if prev != to {
                    return Err(AlgebraError::NotWellDefined(format!(
                        "{} has images {} and {}",
                        from.display(&q1),
                        prev.display(&q2),
                        to.display(&q2)
                    )));
                }
            }
        }
    }
    let vertex = |v: usize| generators.get(&Path::trivial(v)).map(Path::source);
    let arrow = |a: usize| generators.get(&Path::arrow(&q1, a)).map(|p| p.arrows()[0]);
    for v in 0..q1.vertex_count() {
        vertex(v).ok_or_else(|| AlgebraError::NotCovering(format!("vertex {}", q1.vertex_name(v))))?;
    }
    for a in 0..q1.arrow_count() {
        arrow(a).ok_or_else(|| AlgebraError::NotCovering(format!("arrow {}", q1.arrow_name(a))))?;
    }

    let window1 = enumerate_paths(&q1, max_len);
    let mut map = BTreeMap::new();
    for p in &window1 {
        let image = p.map_with(&q2, vertex, arrow).ok_or_else(|| {
            AlgebraError::NotMultiplicative(format!("image of {} is not a path", p.display(&q1)))
        })?;
        map.insert(p.clone(), image);
    }

    let images: BTreeSet<&Path> = map.values().collect();
    let window2 = truncated_dimension(&q2, max_len);
    if images.len() != map.len() || images.len() != window2 {
        return Err(AlgebraError::NotBijective(format!(
            "{} paths map onto {} distinct paths; target window has {}",
            map.len(),
            images.len(),
            window2
        )));
    }

    for p in &window1 {
        for r in &window1 {
            if p.len() + r.len() > max_len {
                break;
            }
            let lhs = p.compose(r).map(|pr| map[&pr].clone());
            let rhs = map[p].compose(&map[r]);
            if lhs != rhs {
                return Err(AlgebraError::NotMultiplicative(format!(
                    "eta({}·{})",
                    p.display(&q1),
                    r.display(&q1)
                )));
            }
        }
        for g in g_.elements() {
            if map[&act_path(e1, g, p)] != act_path(e2, g, &map[p]) {
                return Err(AlgebraError::NotEquivariant(format!("{} at {}", g_.name(g), p.display(&q1))));
            }
        }
    }
    Ok(AlgebraIsomorphism { source: q1, target: q2, window: max_len, map })
}

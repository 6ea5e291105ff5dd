//! Global and partial actions of finite groups on quivers, restriction of a
//! global action to a subquiver, and the enveloping (globalized) action of a
//! partial action.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::group::{Elem, FiniteGroup};
use crate::quiver::{is_bijection, validate_subquiver, Arrow, Quiver, QuiverError, QuiverMorphism, Subquiver, SubquiverViolation};
use crate::report::{Clause, Report};
use crate::setaction::{
    globalize_set_action_ordered, restrict_set_action, ActionError, GlobalSetAction, SetPartialAction,
    SetViolation,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnvelopeError {
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("invalid partial action on quiver:\n{0}")]
    InvalidInput(String),
    #[error("invalid global action on quiver:\n{0}")]
    InvalidGlobal(String),
    #[error("generator images do not define an action: {0}")]
    Generators(String),
    #[error("endpoint of arrow class {class} is not well defined: {detail}")]
    EndpointNotWellDefined { class: String, detail: String },
    #[error("subquiver is not invariant under the action")]
    NotInvariant,
    #[error("enveloping actions are over different partial actions")]
    DifferentOriginals,
    #[error("canonical map is not well defined: {0}")]
    NotWellDefined(String),
    #[error("canonical map misses {0}")]
    NotCovering(String),
    #[error("canonical map is not bijective")]
    NotBijective,
    #[error("canonical map does not commute with the actions: {0}")]
    NotEquivariant(String),
}

/// A group homomorphism `G → Aut(Q)`, stored as vertex and arrow
/// permutation tables indexed by group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalQuiverAction {
    group: Arc<FiniteGroup>,
    quiver: Arc<Quiver>,
    vertex_perm: Vec<Vec<usize>>,
    arrow_perm: Vec<Vec<usize>>,
}

impl GlobalQuiverAction {
    /// Builds from full tables and rejects anything that is not an action
    /// by automorphisms.
    pub fn from_tables(
        group: Arc<FiniteGroup>,
        quiver: Arc<Quiver>,
        vertex_perm: Vec<Vec<usize>>,
        arrow_perm: Vec<Vec<usize>>,
    ) -> Result<Self, EnvelopeError> {
        let n = group.order();
        if vertex_perm.len() != n || arrow_perm.len() != n {
            return Err(EnvelopeError::InvalidGlobal("one table row per group element required".into()));
        }
        if vertex_perm.iter().any(|p| p.len() != quiver.vertex_count())
            || arrow_perm.iter().any(|p| p.len() != quiver.arrow_count())
        {
            return Err(EnvelopeError::InvalidGlobal("table rows must cover the quiver".into()));
        }
        let b = GlobalQuiverAction { group, quiver, vertex_perm, arrow_perm };
        let report = b.check();
        if !report.is_valid() {
            return Err(EnvelopeError::InvalidGlobal(report.to_string()));
        }
        Ok(b)
    }

    /// Completes generator images to the whole group by composition and
    /// checks the result against the group table.
    pub fn from_generators(
        group: Arc<FiniteGroup>,
        quiver: Arc<Quiver>,
        generators: &[(Elem, QuiverMorphism)],
    ) -> Result<Self, EnvelopeError> {
        for (g, m) in generators {
            if **m.source() != *quiver || **m.target() != *quiver || !m.is_isomorphism() {
                return Err(EnvelopeError::Generators(format!(
                    "image of {} is not an automorphism of the quiver",
                    group.name(*g)
                )));
            }
        }
        let n = group.order();
        let mut vperm: Vec<Option<Vec<usize>>> = vec![None; n];
        let mut aperm: Vec<Option<Vec<usize>>> = vec![None; n];
        let e = group.identity();
        vperm[e.0] = Some((0..quiver.vertex_count()).collect());
        aperm[e.0] = Some((0..quiver.arrow_count()).collect());
        let mut queue = VecDeque::from([e]);
        while let Some(h) = queue.pop_front() {
            for (s, m) in generators {
                let sh = group.mul(*s, h);
                let v: Vec<usize> = vperm[h.0].as_ref().unwrap().iter().map(|&x| m.map_vertex(x)).collect();
                let a: Vec<usize> = aperm[h.0].as_ref().unwrap().iter().map(|&x| m.map_arrow(x)).collect();
                match &vperm[sh.0] {
                    Some(existing) => {
                        if *existing != v || aperm[sh.0].as_ref() != Some(&a) {
                            return Err(EnvelopeError::Generators(format!(
                                "two words for {} act differently",
                                group.name(sh)
                            )));
                        }
                    }
                    None => {
                        vperm[sh.0] = Some(v);
                        aperm[sh.0] = Some(a);
                        queue.push_back(sh);
                    }
                }
            }
        }
        if let Some(g) = group.elements().find(|g| vperm[g.0].is_none()) {
            return Err(EnvelopeError::Generators(format!(
                "{} is not reached from the listed generators",
                group.name(g)
            )));
        }
        Self::from_tables(
            group,
            quiver,
            vperm.into_iter().map(Option::unwrap).collect(),
            aperm.into_iter().map(Option::unwrap).collect(),
        )
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn vertex(&self, g: Elem, v: usize) -> usize {
        self.vertex_perm[g.0][v]
    }

    pub fn arrow(&self, g: Elem, a: usize) -> usize {
        self.arrow_perm[g.0][a]
    }

    /// `β_g` as a quiver automorphism.
    pub fn beta(&self, g: Elem) -> QuiverMorphism {
        QuiverMorphism::new(
            self.quiver.clone(),
            self.quiver.clone(),
            self.vertex_perm[g.0].clone(),
            self.arrow_perm[g.0].clone(),
        )
        .expect("validated at construction")
    }

    pub fn image(&self, g: Elem, s: &Subquiver) -> Subquiver {
        Subquiver {
            vertices: s.vertices.iter().map(|&v| self.vertex(g, v)).collect(),
            arrows: s.arrows.iter().map(|&a| self.arrow(g, a)).collect(),
        }
    }

    /// `⋃_g β_g(s)`.
    pub fn orbit(&self, s: &Subquiver) -> Subquiver {
        let mut out = Subquiver::empty();
        for g in self.group.elements() {
            let img = self.image(g, s);
            out.vertices.extend(img.vertices);
            out.arrows.extend(img.arrows);
        }
        out
    }

    pub fn vertex_action(&self) -> GlobalSetAction {
        GlobalSetAction::new(self.group.clone(), self.quiver.vertex_names().to_vec(), self.vertex_perm.clone())
            .expect("shape checked at construction")
    }

    pub fn arrow_action(&self) -> GlobalSetAction {
        GlobalSetAction::new(self.group.clone(), self.quiver.arrow_names(), self.arrow_perm.clone())
            .expect("shape checked at construction")
    }

    /// Checks that each `β_g` is an automorphism, `β_e = id` and
    /// `β_g ∘ β_h = β_{gh}` on vertices and arrows.
    pub fn check(&self) -> Report<GlobalQuiverViolation> {
        let q = &*self.quiver;
        let g_ = &*self.group;
        let mut report = Report::new();
        for g in g_.elements() {
            let vp = &self.vertex_perm[g.0];
            let ap = &self.arrow_perm[g.0];
            let ok_perm = is_bijection(vp, q.vertex_count()) && is_bijection(ap, q.arrow_count());
            let ok_ends = ok_perm
                && (0..q.arrow_count())
                    .all(|a| q.source(ap[a]) == vp[q.source(a)] && q.target(ap[a]) == vp[q.target(a)]);
            if !ok_ends {
                report.push(GlobalQuiverViolation::NotAutomorphism { g: g_.name(g).into() });
            }
        }
        if report.is_valid() {
            let vertices = self.vertex_action().check();
            let arrows = self.arrow_action().check();
            for v in vertices.violations {
                report.push(GlobalQuiverViolation::Vertices(v.to_string()));
            }
            for v in arrows.violations {
                report.push(GlobalQuiverViolation::Arrows(v.to_string()));
            }
        }
        report
    }

    /// The action restricted to an invariant subquiver, together with the
    /// inclusion of that subquiver.
    pub fn sub_action(&self, s: &Subquiver) -> Result<(GlobalQuiverAction, QuiverMorphism), EnvelopeError> {
        if self.orbit(s) != *s {
            return Err(EnvelopeError::NotInvariant);
        }
        let sub = Arc::new(s.to_quiver(&self.quiver)?);
        let inclusion = QuiverMorphism::inclusion(sub.clone(), self.quiver.clone())?;
        let vpos: BTreeMap<usize, usize> = s.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let apos: BTreeMap<usize, usize> = s.arrows.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let vertex_perm = self
            .group
            .elements()
            .map(|g| s.vertices.iter().map(|&v| vpos[&self.vertex(g, v)]).collect())
            .collect();
        let arrow_perm = self
            .group
            .elements()
            .map(|g| s.arrows.iter().map(|&a| apos[&self.arrow(g, a)]).collect())
            .collect();
        let b = GlobalQuiverAction::from_tables(self.group.clone(), sub, vertex_perm, arrow_perm)?;
        Ok((b, inclusion))
    }

    /// The global action viewed as a partial action with full domains.
    pub fn as_partial(&self) -> QuiverPartialAction {
        QuiverPartialAction::from_set_actions(
            self.quiver.clone(),
            &self.vertex_action().as_partial(),
            &self.arrow_action().as_partial(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GlobalQuiverViolation {
    NotAutomorphism { g: String },
    Vertices(String),
    Arrows(String),
}

impl Clause for GlobalQuiverViolation {
    fn clause(&self) -> &'static str {
        match self {
            GlobalQuiverViolation::NotAutomorphism { .. } => "automorphism",
            GlobalQuiverViolation::Vertices(_) => "vertices",
            GlobalQuiverViolation::Arrows(_) => "arrows",
        }
    }
}

impl fmt::Display for GlobalQuiverViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GlobalQuiverViolation::NotAutomorphism { g } => write!(f, "beta_{g} is not an automorphism"),
            GlobalQuiverViolation::Vertices(s) => write!(f, "on vertices: {s}"),
            GlobalQuiverViolation::Arrows(s) => write!(f, "on arrows: {s}"),
        }
    }
}

/// A partial bijection between subquivers: the vertex and arrow pairings of
/// `α_g : Γ^{g⁻¹} → Γ^g`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialIso {
    pub vertices: BTreeMap<usize, usize>,
    pub arrows: BTreeMap<usize, usize>,
}

/// A partial action of a finite group on a quiver `Γ`: subquivers `Γ^g`
/// and isomorphisms `α_g : Γ^{g⁻¹} → Γ^g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverPartialAction {
    group: Arc<FiniteGroup>,
    quiver: Arc<Quiver>,
    domains: Vec<Subquiver>,
    maps: Vec<PartialIso>,
}

impl QuiverPartialAction {
    /// The partial action with `Γ^e = Γ`, `α_e = id` and every other domain
    /// empty.
    pub fn new(group: Arc<FiniteGroup>, quiver: Arc<Quiver>) -> Self {
        let n = group.order();
        let e = group.identity().0;
        let mut domains = vec![Subquiver::empty(); n];
        let mut maps = vec![PartialIso::default(); n];
        domains[e] = Subquiver::full(&quiver);
        maps[e] = PartialIso {
            vertices: (0..quiver.vertex_count()).map(|v| (v, v)).collect(),
            arrows: (0..quiver.arrow_count()).map(|a| (a, a)).collect(),
        };
        QuiverPartialAction { group, quiver, domains, maps }
    }

    /// Assembles from a vertex-level and an arrow-level set action whose
    /// carriers are the vertices and arrows of `quiver` in index order.
    pub fn from_set_actions(quiver: Arc<Quiver>, vertices: &SetPartialAction, arrows: &SetPartialAction) -> Self {
        let group = vertices.group().clone();
        let domains = group
            .elements()
            .map(|g| Subquiver {
                vertices: vertices.domain(g).clone(),
                arrows: arrows.domain(g).clone(),
            })
            .collect();
        let maps = group
            .elements()
            .map(|g| PartialIso { vertices: vertices.map(g).clone(), arrows: arrows.map(g).clone() })
            .collect();
        QuiverPartialAction { group, quiver, domains, maps }
    }

    pub fn set_domain(&mut self, g: Elem, domain: Subquiver) {
        self.domains[g.0] = domain;
    }

    pub fn set_vertex_map(&mut self, g: Elem, x: usize, y: usize) {
        self.maps[g.0].vertices.insert(x, y);
    }

    pub fn set_arrow_map(&mut self, g: Elem, x: usize, y: usize) {
        self.maps[g.0].arrows.insert(x, y);
    }

    pub fn set_map(&mut self, g: Elem, map: PartialIso) {
        self.maps[g.0] = map;
    }

    /// Sets `Γ^g` and the pairings of `α_g` by names.
    pub fn define(
        &mut self,
        g: &str,
        vertices: &[&str],
        arrows: &[&str],
        vertex_map: &[(&str, &str)],
        arrow_map: &[(&str, &str)],
    ) -> Result<(), EnvelopeError> {
        let g = self
            .group
            .element(g)
            .map_err(|e| EnvelopeError::InvalidInput(e.to_string()))?;
        let q = self.quiver.clone();
        self.domains[g.0] = Subquiver::from_names(&q, vertices, arrows)?;
        let mut map = PartialIso::default();
        for (x, y) in vertex_map {
            map.vertices.insert(q.vertex(x)?, q.vertex(y)?);
        }
        for (x, y) in arrow_map {
            map.arrows.insert(q.arrow(x)?, q.arrow(y)?);
        }
        self.maps[g.0] = map;
        Ok(())
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    /// `Γ^g`.
    pub fn domain(&self, g: Elem) -> &Subquiver {
        &self.domains[g.0]
    }

    /// `α_g`.
    pub fn map(&self, g: Elem) -> &PartialIso {
        &self.maps[g.0]
    }

    pub fn vertex_action(&self) -> SetPartialAction {
        SetPartialAction::from_parts(
            self.group.clone(),
            self.quiver.vertex_names().to_vec(),
            self.domains.iter().map(|d| d.vertices.clone()).collect(),
            self.maps.iter().map(|m| m.vertices.clone()).collect(),
        )
        .expect("indices come from the quiver")
    }

    pub fn arrow_action(&self) -> SetPartialAction {
        SetPartialAction::from_parts(
            self.group.clone(),
            self.quiver.arrow_names(),
            self.domains.iter().map(|d| d.arrows.clone()).collect(),
            self.maps.iter().map(|m| m.arrows.clone()).collect(),
        )
        .expect("indices come from the quiver")
    }

    /// Checks clauses (i)–(iv) and source/target compatibility of each
    /// `α_g`.
    pub fn check(&self) -> Report<QuiverActionViolation> {
        let q = &*self.quiver;
        let g_ = &*self.group;
        let mut report = Report::new();
        let e = g_.identity();
        if self.domains[e.0] != Subquiver::full(q) {
            report.push(QuiverActionViolation::Identity("domain of e is not the whole quiver".into()));
        }
        let id = &self.maps[e.0];
        if id.vertices.len() != q.vertex_count()
            || id.arrows.len() != q.arrow_count()
            || id.vertices.iter().any(|(x, y)| x != y)
            || id.arrows.iter().any(|(x, y)| x != y)
        {
            report.push(QuiverActionViolation::Identity("alpha_e is not the identity".into()));
        }
        let in_range = self.domains.iter().all(|d| {
            d.vertices.iter().all(|&v| v < q.vertex_count()) && d.arrows.iter().all(|&a| a < q.arrow_count())
        }) && self.maps.iter().all(|m| {
            m.vertices.iter().all(|(&x, &y)| x.max(y) < q.vertex_count())
                && m.arrows.iter().all(|(&x, &y)| x.max(y) < q.arrow_count())
        });
        if !in_range {
            report.push(QuiverActionViolation::Identity("domain or map refers outside the quiver".into()));
            return report;
        }
        for v in self.vertex_action().check().violations {
            if v.clause() != "i" {
                report.push(QuiverActionViolation::Vertices(v));
            }
        }
        for v in self.arrow_action().check().violations {
            if v.clause() != "i" {
                report.push(QuiverActionViolation::Arrows(v));
            }
        }
        for g in g_.elements() {
            for violation in validate_subquiver(q, &self.domains[g.0]).violations {
                report.push(QuiverActionViolation::Closure { g: g_.name(g).into(), violation });
            }
        }
        for g in g_.elements() {
            let m = &self.maps[g.0];
            for (&x, &y) in &m.arrows {
                let ends = [("source", q.source(x), q.source(y)), ("target", q.target(x), q.target(y))];
                for (which, from, to) in ends {
                    if m.vertices.get(&from) != Some(&to) {
                        report.push(QuiverActionViolation::Compatibility {
                            g: g_.name(g).into(),
                            arrow: q.arrow_name(x).into(),
                            detail: format!(
                                "alpha maps {which} {} to {} but {which} of image is {}",
                                q.vertex_name(from),
                                m.vertices.get(&from).map_or("nothing", |&v| q.vertex_name(v)),
                                q.vertex_name(to)
                            ),
                        });
                    }
                }
            }
        }
        report
    }

    /// Equality of domains and maps by index, ignoring the identity of the
    /// `Arc`s involved.
    pub fn same_action_as(&self, other: &QuiverPartialAction) -> bool {
        self == other
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuiverActionViolation {
    /// (i)
    Identity(String),
    /// (ii): vertex components do not form a partial action.
    Vertices(SetViolation),
    /// (iii): arrow components do not form a partial action.
    Arrows(SetViolation),
    /// (iv): `Γ^g` is not closed.
    Closure { g: String, violation: SubquiverViolation },
    /// `α_g` does not commute with source or target.
    Compatibility { g: String, arrow: String, detail: String },
}

impl Clause for QuiverActionViolation {
    fn clause(&self) -> &'static str {
        match self {
            QuiverActionViolation::Identity(_) => "i",
            QuiverActionViolation::Vertices(_) => "ii",
            QuiverActionViolation::Arrows(_) => "iii",
            QuiverActionViolation::Closure { .. } => "iv",
            QuiverActionViolation::Compatibility { .. } => "compat",
        }
    }
}

impl fmt::Display for QuiverActionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuiverActionViolation::Identity(s) => write!(f, "[i] {s}"),
            QuiverActionViolation::Vertices(v) => write!(f, "[ii] vertices: {v}"),
            QuiverActionViolation::Arrows(v) => write!(f, "[iii] arrows: {v}"),
            QuiverActionViolation::Closure { g, violation } => write!(f, "[iv] domain of {g}: {violation}"),
            QuiverActionViolation::Compatibility { g, arrow, detail } => {
                write!(f, "[compat] alpha_{g} on {arrow}: {detail}")
            }
        }
    }
}

pub const PARTIAL_ACTION_CLAUSES: [&str; 5] = ["i", "ii", "iii", "iv", "compat"];

/// Restriction of a global action to a closed subquiver `s`:
/// `Λ^g = β_g(s) ∩ s` with `α_g` the restriction of `β_g`. The result
/// acts on `s` viewed as a quiver.
pub fn restrict_global_action(b: &GlobalQuiverAction, s: &Subquiver) -> Result<QuiverPartialAction, EnvelopeError> {
    let quiver = Arc::new(s.to_quiver(&b.quiver)?);
    let vsub: Vec<usize> = s.vertices.iter().copied().collect();
    let asub: Vec<usize> = s.arrows.iter().copied().collect();
    let vertices = restrict_set_action(&b.vertex_action(), &vsub)?;
    let arrows = restrict_set_action(&b.arrow_action(), &asub)?;
    Ok(QuiverPartialAction::from_set_actions(quiver, &vertices, &arrows))
}

/// A global action on `Q` together with an inclusion `Γ → Q`, claimed to
/// envelop a partial action on `Γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvelopingQuiverAction {
    pub global: GlobalQuiverAction,
    pub embedding: QuiverMorphism,
    pub original: QuiverPartialAction,
}

impl EnvelopingQuiverAction {
    /// Pairs the parts after checking that they fit together. Whether this
    /// is really enveloping is left to [`check_enveloping`].
    pub fn new(
        global: GlobalQuiverAction,
        embedding: QuiverMorphism,
        original: QuiverPartialAction,
    ) -> Result<Self, EnvelopeError> {
        if **embedding.source() != *original.quiver || **embedding.target() != *global.quiver {
            return Err(EnvelopeError::Quiver(QuiverError::Mismatch));
        }
        if *global.group != *original.group {
            return Err(EnvelopeError::DifferentOriginals);
        }
        Ok(EnvelopingQuiverAction { global, embedding, original })
    }

    /// The sub-action of `b` on the orbit of `s`, enveloping the restriction
    /// of `b` to `s`.
    pub fn from_orbit(b: &GlobalQuiverAction, s: &Subquiver) -> Result<Self, EnvelopeError> {
        let original = restrict_global_action(b, s)?;
        let (global, _) = b.sub_action(&b.orbit(s))?;
        let embedding = QuiverMorphism::inclusion(original.quiver.clone(), global.quiver.clone())?;
        Self::new(global, embedding, original)
    }

    /// `i(Γ)` as a subquiver of `Q`.
    pub fn embedded(&self) -> Subquiver {
        self.embedding.image(&Subquiver::full(&self.original.quiver))
    }
}

/// Constructs the enveloping action of a valid partial action.
pub fn envelope_quiver_action(a: &QuiverPartialAction) -> Result<EnvelopingQuiverAction, EnvelopeError> {
    envelope_quiver_action_ordered(a, None)
}

/// As [`envelope_quiver_action`], with explicit merge orders for the vertex
/// and arrow quotients (see [`globalize_set_action_ordered`]).
pub fn envelope_quiver_action_ordered(
    a: &QuiverPartialAction,
    orders: Option<(&[usize], &[usize])>,
) -> Result<EnvelopingQuiverAction, EnvelopeError> {
    let report = a.check();
    if !report.is_valid() {
        return Err(EnvelopeError::InvalidInput(report.to_string()));
    }
    let g_ = &*a.group;
    let gamma = &*a.quiver;
    let vaction = a.vertex_action();
    let aaction = a.arrow_action();
    let natural = |len: usize| (0..g_.order() * len).collect::<Vec<_>>();
    let (vorder, aorder) = match orders {
        Some((v, w)) => (v.to_vec(), w.to_vec()),
        None => (natural(gamma.vertex_count()), natural(gamma.arrow_count())),
    };
    let vglob = globalize_set_action_ordered(&vaction, &vorder)?;
    let aglob = globalize_set_action_ordered(&aaction, &aorder)?;

    // o(b) = β_0^g(o(a')) for b = β_1^g(a'), checked on every representative.
    let mut arrows = Vec::with_capacity(aglob.classes.len());
    for (c, members) in aglob.classes.iter().enumerate() {
        let mut ends: Option<(usize, usize)> = None;
        for &(g, x) in members {
            let here = (vglob.class_of(g, gamma.source(x)), vglob.class_of(g, gamma.target(x)));
            match ends {
                None => ends = Some(here),
                Some(first) if first != here => {
                    return Err(EnvelopeError::EndpointNotWellDefined {
                        class: aglob.global.carrier()[c].clone(),
                        detail: format!(
                            "representative ({}, {}) gives {} -> {}, another gives {} -> {}",
                            g_.name(g),
                            gamma.arrow_name(x),
                            vglob.global.carrier()[here.0],
                            vglob.global.carrier()[here.1],
                            vglob.global.carrier()[first.0],
                            vglob.global.carrier()[first.1]
                        ),
                    })
                }
                Some(_) => {}
            }
        }
        let (s, t) = ends.expect("classes are nonempty");
        arrows.push(Arrow::new(
            aglob.global.carrier()[c].clone(),
            vglob.global.carrier()[s].clone(),
            vglob.global.carrier()[t].clone(),
        ));
    }
    let q = Arc::new(Quiver::new(vglob.global.carrier().to_vec(), arrows)?);
    let global = GlobalQuiverAction::from_tables(
        a.group.clone(),
        q.clone(),
        vglob.global.table().to_vec(),
        aglob.global.table().to_vec(),
    )?;
    let embedding = QuiverMorphism::new(a.quiver.clone(), q, vglob.embedding.clone(), aglob.embedding.clone())?;
    EnvelopingQuiverAction::new(global, embedding, a.clone())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnvelopingViolation {
    /// (a) the embedding is not an injective morphism into `Q`.
    Inclusion(String),
    /// (b) restricting `β` along the embedding does not give back `α`.
    Restriction { g: String, detail: String },
    /// (c) a vertex of `Q` is in no translate of `i(Γ)`.
    VertexMinimality(String),
    /// (d) an arrow of `Q` is in no translate of `i(Γ)`.
    ArrowMinimality(String),
}

impl Clause for EnvelopingViolation {
    fn clause(&self) -> &'static str {
        match self {
            EnvelopingViolation::Inclusion(_) => "a",
            EnvelopingViolation::Restriction { .. } => "b",
            EnvelopingViolation::VertexMinimality(_) => "c",
            EnvelopingViolation::ArrowMinimality(_) => "d",
        }
    }
}

impl fmt::Display for EnvelopingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvelopingViolation::Inclusion(s) => write!(f, "[a] {s}"),
            EnvelopingViolation::Restriction { g, detail } => write!(f, "[b] g={g}: {detail}"),
            EnvelopingViolation::VertexMinimality(v) => write!(f, "[c] vertex {v} lies in no translate of the embedded quiver"),
            EnvelopingViolation::ArrowMinimality(a) => write!(f, "[d] arrow {a} lies in no translate of the embedded quiver"),
        }
    }
}

pub const ENVELOPING_CLAUSES: [&str; 4] = ["a", "b", "c", "d"];

/// Re-verifies that `e` is an enveloping action of its partial action.
pub fn check_enveloping(e: &EnvelopingQuiverAction) -> Report<EnvelopingViolation> {
    let mut report = Report::new();
    let a = &e.original;
    let b = &e.global;
    let gamma = &*a.quiver;
    let q = &*b.quiver;
    let g_ = &*b.group;
    let i = &e.embedding;

    if **i.source() != *gamma || **i.target() != *q {
        report.push(EnvelopingViolation::Inclusion("embedding does not go from the acted quiver to Q".into()));
        return report;
    }
    if !i.is_injective() {
        report.push(EnvelopingViolation::Inclusion("embedding is not injective".into()));
    }

    let image = e.embedded();
    for g in g_.elements() {
        let ginv = g_.inv(g);
        // vertices of i(Γ) whose β_{g⁻¹}-preimage is in i(Γ): β_g(i(Γ)) ∩ i(Γ)
        let restricted_v: BTreeSet<usize> = image
            .vertices
            .iter()
            .copied()
            .filter(|&v| image.vertices.contains(&b.vertex(ginv, v)))
            .collect();
        let restricted_a: BTreeSet<usize> = image
            .arrows
            .iter()
            .copied()
            .filter(|&x| image.arrows.contains(&b.arrow(ginv, x)))
            .collect();
        let declared = i.image(a.domain(g));
        if declared.vertices != restricted_v || declared.arrows != restricted_a {
            report.push(EnvelopingViolation::Restriction {
                g: g_.name(g).into(),
                detail: "domain differs from the translate intersected with the embedded quiver".into(),
            });
        }
        let m = a.map(g);
        for (&x, &y) in &m.vertices {
            if b.vertex(g, i.map_vertex(x)) != i.map_vertex(y) {
                report.push(EnvelopingViolation::Restriction {
                    g: g_.name(g).into(),
                    detail: format!("alpha and beta disagree on vertex {}", gamma.vertex_name(x)),
                });
            }
        }
        for (&x, &y) in &m.arrows {
            if b.arrow(g, i.map_arrow(x)) != i.map_arrow(y) {
                report.push(EnvelopingViolation::Restriction {
                    g: g_.name(g).into(),
                    detail: format!("alpha and beta disagree on arrow {}", gamma.arrow_name(x)),
                });
            }
        }
    }

    let covered = b.orbit(&image);
    for v in 0..q.vertex_count() {
        if !covered.vertices.contains(&v) {
            report.push(EnvelopingViolation::VertexMinimality(q.vertex_name(v).into()));
        }
    }
    for x in 0..q.arrow_count() {
        if !covered.arrows.contains(&x) {
            report.push(EnvelopingViolation::ArrowMinimality(q.arrow_name(x).into()));
        }
    }
    report
}

/// The equivariant isomorphism `β_g(i₁(x)) ↦ β'_g(i₂(x))` between two
/// enveloping actions of the same partial action.
pub fn enveloping_isomorphism(
    e1: &EnvelopingQuiverAction,
    e2: &EnvelopingQuiverAction,
) -> Result<QuiverMorphism, EnvelopeError> {
    if e1.original != e2.original {
        return Err(EnvelopeError::DifferentOriginals);
    }
    let gamma = &*e1.original.quiver;
    let g_ = &*e1.global.group;
    let (q1, q2) = (&e1.global.quiver, &e2.global.quiver);
    let mut vmap: Vec<Option<usize>> = vec![None; q1.vertex_count()];
    let mut amap: Vec<Option<usize>> = vec![None; q1.arrow_count()];
    for g in g_.elements() {
        for x in 0..gamma.vertex_count() {
            let from = e1.global.vertex(g, e1.embedding.map_vertex(x));
            let to = e2.global.vertex(g, e2.embedding.map_vertex(x));
            match vmap[from] {
                Some(prev) if prev != to => {
                    return Err(EnvelopeError::NotWellDefined(format!(
                        "vertex {} has images {} and {}",
                        q1.vertex_name(from),
                        q2.vertex_name(prev),
                        q2.vertex_name(to)
                    )))
                }
                _ => vmap[from] = Some(to),
            }
        }
        for x in 0..gamma.arrow_count() {
            let from = e1.global.arrow(g, e1.embedding.map_arrow(x));
            let to = e2.global.arrow(g, e2.embedding.map_arrow(x));
            match amap[from] {
                Some(prev) if prev != to => {
                    return Err(EnvelopeError::NotWellDefined(format!(
                        "arrow {} has images {} and {}",
                        q1.arrow_name(from),
                        q2.arrow_name(prev),
                        q2.arrow_name(to)
                    )))
                }
                _ => amap[from] = Some(to),
            }
        }
    }
    let vmap = vmap
        .iter()
        .enumerate()
        .map(|(v, m)| m.ok_or_else(|| EnvelopeError::NotCovering(format!("vertex {}", q1.vertex_name(v)))))
        .collect::<Result<Vec<_>, _>>()?;
    let amap = amap
        .iter()
        .enumerate()
        .map(|(a, m)| m.ok_or_else(|| EnvelopeError::NotCovering(format!("arrow {}", q1.arrow_name(a)))))
        .collect::<Result<Vec<_>, _>>()?;
    let phi = QuiverMorphism::new(q1.clone(), q2.clone(), vmap, amap)?;
    if !phi.is_isomorphism() {
        return Err(EnvelopeError::NotBijective);
    }
    for g in g_.elements() {
        if let Some(v) = (0..q1.vertex_count())
            .find(|&v| phi.map_vertex(e1.global.vertex(g, v)) != e2.global.vertex(g, phi.map_vertex(v)))
        {
            return Err(EnvelopeError::NotEquivariant(format!("{} at vertex {}", g_.name(g), q1.vertex_name(v))));
        }
        if let Some(x) = (0..q1.arrow_count())
            .find(|&x| phi.map_arrow(e1.global.arrow(g, x)) != e2.global.arrow(g, phi.map_arrow(x)))
        {
            return Err(EnvelopeError::NotEquivariant(format!("{} at arrow {}", g_.name(g), q1.arrow_name(x))));
        }
    }
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// C3 acting partially on `v1 --f--> v2`.
    fn c3_on_arrow() -> QuiverPartialAction {
        let g = Arc::new(FiniteGroup::cyclic(3).unwrap());
        let q = Arc::new(Quiver::from_names(&["v1", "v2"], &[("f", "v1", "v2")]).unwrap());
        let mut a = QuiverPartialAction::new(g, q);
        a.define("t", &["v1"], &[], &[("v2", "v1")], &[]).unwrap();
        a.define("t2", &["v2"], &[], &[("v1", "v2")], &[]).unwrap();
        a
    }

    fn cycle4_rotation() -> GlobalQuiverAction {
        let g = Arc::new(FiniteGroup::cyclic(4).unwrap());
        let q = Arc::new(
            Quiver::from_names(
                &["1", "2", "3", "4"],
                &[("a", "1", "2"), ("b", "2", "3"), ("c", "3", "4"), ("d", "4", "1")],
            )
            .unwrap(),
        );
        let tau = QuiverMorphism::from_names(
            q.clone(),
            q.clone(),
            &[("1", "2"), ("2", "3"), ("3", "4"), ("4", "1")],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
        )
        .unwrap();
        let t = g.element("t").unwrap();
        GlobalQuiverAction::from_generators(g, q, &[(t, tau)]).unwrap()
    }

    #[test]
    fn c3_action_is_valid() {
        assert!(c3_on_arrow().check().is_valid());
    }

    #[test]
    fn c3_envelope_is_a_three_cycle() {
        let env = envelope_quiver_action(&c3_on_arrow()).unwrap();
        let q = env.global.quiver();
        assert_eq!(q.vertex_names(), ["(e, v1)", "(e, v2)", "(t, v1)"]);
        let arrows: Vec<_> = q.arrow_records().into_iter().map(|a| (a.id, a.source, a.target)).collect();
        let s = |x: &str| x.to_string();
        assert_eq!(
            arrows,
            vec![
                (s("(e, f)"), s("(e, v1)"), s("(e, v2)")),
                (s("(t, f)"), s("(t, v1)"), s("(e, v1)")),
                (s("(t2, f)"), s("(e, v2)"), s("(t, v1)")),
            ]
        );
        assert!(check_enveloping(&env).is_valid());
    }

    #[test]
    fn global_action_envelopes_itself() {
        let b = cycle4_rotation();
        let env = envelope_quiver_action(&b.as_partial()).unwrap();
        assert!(env.embedding.is_isomorphism());
        let direct = EnvelopingQuiverAction::new(
            b.clone(),
            QuiverMorphism::identity(b.quiver().clone()),
            b.as_partial(),
        )
        .unwrap();
        assert!(check_enveloping(&direct).is_valid());
        assert!(enveloping_isomorphism(&env, &direct).unwrap().is_isomorphism());
    }

    #[test]
    fn restriction_matches_listed_domains() {
        let b = cycle4_rotation();
        let s = Subquiver::from_names(b.quiver(), &["1", "2", "3"], &["a", "b"]).unwrap();
        let a = restrict_global_action(&b, &s).unwrap();
        assert!(a.check().is_valid());
        let g = a.group().clone();
        let gamma = a.quiver().clone();
        let dom = |n: &str| {
            let d = a.domain(g.element(n).unwrap());
            (d.vertex_names(&gamma), d.arrow_names(&gamma))
        };
        assert_eq!(dom("t"), (vec!["2", "3"], vec!["b"]));
        assert_eq!(dom("t2"), (vec!["1", "3"], vec![]));
        assert_eq!(dom("t3"), (vec!["1", "2"], vec!["a"]));
    }

    #[test]
    fn broken_intersection_axiom_is_reported() {
        let b = cycle4_rotation();
        let s = Subquiver::from_names(b.quiver(), &["1", "2", "3"], &["a", "b"]).unwrap();
        let mut a = restrict_global_action(&b, &s).unwrap();
        let t = a.group().element("t").unwrap();
        let mut d = a.domain(t).clone();
        d.arrows.insert(a.quiver().arrow("a").unwrap());
        d.vertices.insert(a.quiver().vertex("1").unwrap());
        a.set_domain(t, d);
        let report = a.check();
        assert!(!report.passes("iii"));
        assert!(report.of("iii").any(|v| matches!(v, QuiverActionViolation::Arrows(SetViolation::Intersection { .. }))));
        assert!(matches!(envelope_quiver_action(&a), Err(EnvelopeError::InvalidInput(_))));
    }

    #[test]
    fn closure_and_compatibility_are_separate_clauses() {
        let mut a = c3_on_arrow();
        // domain of t gains f without v2: (iv) fails
        a.define("t", &["v1"], &["f"], &[("v2", "v1")], &[("f", "f")]).unwrap();
        let report = a.check();
        assert!(!report.passes("iv"));
        assert!(!report.passes("compat"));
    }

    #[test]
    fn single_vertex_restriction() {
        let b = cycle4_rotation();
        let s = Subquiver::from_names(b.quiver(), &["1"], &[]).unwrap();
        let a = restrict_global_action(&b, &s).unwrap();
        for g in a.group().elements().filter(|&g| g != a.group().identity()) {
            assert!(a.domain(g).is_empty());
        }
        let env = envelope_quiver_action(&a).unwrap();
        assert_eq!(env.global.quiver().vertex_count(), 4);
        assert_eq!(env.global.quiver().arrow_count(), 0);
    }

    #[test]
    fn extra_fixed_vertex_breaks_minimality() {
        let b = cycle4_rotation();
        let g = b.group().clone();
        let q = b.quiver();
        let mut vs = q.vertex_names().to_vec();
        vs.push("x".into());
        let big = Arc::new(Quiver::new(vs, q.arrow_records()).unwrap());
        let vperm = g.elements().map(|h| (0..4).map(|v| b.vertex(h, v)).chain([4]).collect()).collect();
        let aperm = g.elements().map(|h| (0..4).map(|x| b.arrow(h, x)).collect()).collect();
        let bigger = GlobalQuiverAction::from_tables(g, big.clone(), vperm, aperm).unwrap();
        let s = Subquiver::from_names(q, &["1", "2", "3"], &["a", "b"]).unwrap();
        let original = restrict_global_action(&b, &s).unwrap();
        let i = QuiverMorphism::inclusion(original.quiver().clone(), big).unwrap();
        let env = EnvelopingQuiverAction::new(bigger, i, original).unwrap();
        let report = check_enveloping(&env);
        assert!(report.passes("a") && report.passes("b") && report.passes("d"));
        assert!(!report.passes("c"));
    }

    #[test]
    fn generators_must_respect_group_table() {
        let g = Arc::new(FiniteGroup::cyclic(2).unwrap());
        let q = Arc::new(Quiver::from_names(&["1", "2", "3"], &[]).unwrap());
        // a 3-cycle cannot be the image of an involution
        let m = QuiverMorphism::new(q.clone(), q.clone(), vec![1, 2, 0], vec![]).unwrap();
        let t = g.element("t").unwrap();
        assert!(GlobalQuiverAction::from_generators(g, q, &[(t, m)]).is_err());
    }
}

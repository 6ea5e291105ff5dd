//! Partial and global actions of a finite group on a finite set, and the
//! globalization of a partial action as a quotient of `G × X`.
//!
//! A partial action assigns to each `g` a domain `X_g ⊆ X` and a bijection
//! `α_g : X_{g⁻¹} → X_g` subject to
//!
//! * (i) `X_e = X` and `α_e = id`;
//! * (ii) `α_g(X_{g⁻¹} ∩ X_h) = X_g ∩ X_{gh}`;
//! * (iii) `α_g(α_h(x)) = α_{gh}(x)` for `x ∈ α_{h⁻¹}(X_h ∩ X_{g⁻¹})`.
//!
//! The globalization identifies `(g, x) ~ (h, y)` when `x ∈ X_{g⁻¹h}` and
//! `α_{h⁻¹g}(x) = y`, and lets `G` act by left multiplication on the first
//! coordinate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::dsu::DisjointSets;
use crate::group::{Elem, FiniteGroup};
use crate::report::{Clause, Report};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionError {
    #[error("group has {expected} elements but {found} entries were supplied")]
    Shape { expected: usize, found: usize },
    #[error("carrier index {0} out of range")]
    OutOfCarrier(usize),
    #[error("duplicate element `{0}` in subset")]
    DuplicateInSubset(String),
    #[error("unknown carrier element `{0}`")]
    UnknownElement(String),
    #[error("invalid partial action:\n{0}")]
    InvalidInput(String),
    #[error("globalization relation is not an equivalence: {0}")]
    NotEquivalence(String),
    #[error("globalized action is not well defined: {0}")]
    NotWellDefined(String),
    #[error("invalid global action:\n{0}")]
    InvalidGlobal(String),
}

/// A partial action of a finite group on a finite set of named points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetPartialAction {
    group: Arc<FiniteGroup>,
    carrier: Vec<String>,
    domains: Vec<BTreeSet<usize>>,
    maps: Vec<BTreeMap<usize, usize>>,
}

impl SetPartialAction {
    /// Starts from the trivial partial action: `X_e = X`, `α_e = id`, and
    /// every other domain empty.
    pub fn new(group: Arc<FiniteGroup>, carrier: Vec<String>) -> Self {
        let n = group.order();
        let all: BTreeSet<usize> = (0..carrier.len()).collect();
        let id: BTreeMap<usize, usize> = (0..carrier.len()).map(|x| (x, x)).collect();
        let e = group.identity().0;
        let mut domains = vec![BTreeSet::new(); n];
        let mut maps = vec![BTreeMap::new(); n];
        domains[e] = all;
        maps[e] = id;
        SetPartialAction { group, carrier, domains, maps }
    }

    /// Builds from raw domains and maps indexed by group element.
    pub fn from_parts(
        group: Arc<FiniteGroup>,
        carrier: Vec<String>,
        domains: Vec<BTreeSet<usize>>,
        maps: Vec<BTreeMap<usize, usize>>,
    ) -> Result<Self, ActionError> {
        let n = group.order();
        for len in [domains.len(), maps.len()] {
            if len != n {
                return Err(ActionError::Shape { expected: n, found: len });
            }
        }
        let m = carrier.len();
        let bad = domains
            .iter()
            .flatten()
            .chain(maps.iter().flat_map(|m| m.iter().flat_map(|(a, b)| [a, b])))
            .find(|&&x| x >= m);
        if let Some(&x) = bad {
            return Err(ActionError::OutOfCarrier(x));
        }
        Ok(SetPartialAction { group, carrier, domains, maps })
    }

    pub fn set_domain(&mut self, g: Elem, domain: impl IntoIterator<Item = usize>) {
        self.domains[g.0] = domain.into_iter().collect();
    }

    pub fn set_map(&mut self, g: Elem, x: usize, y: usize) {
        self.maps[g.0].insert(x, y);
    }

    pub fn clear_map(&mut self, g: Elem) {
        self.maps[g.0].clear();
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn carrier(&self) -> &[String] {
        &self.carrier
    }

    pub fn index_of(&self, name: &str) -> Result<usize, ActionError> {
        self.carrier
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| ActionError::UnknownElement(name.to_string()))
    }

    /// `X_g`.
    pub fn domain(&self, g: Elem) -> &BTreeSet<usize> {
        &self.domains[g.0]
    }

    /// The pairing of `α_g`, keyed by points of `X_{g⁻¹}`.
    pub fn map(&self, g: Elem) -> &BTreeMap<usize, usize> {
        &self.maps[g.0]
    }

    pub fn apply(&self, g: Elem, x: usize) -> Option<usize> {
        self.maps[g.0].get(&x).copied()
    }

    /// Equality of domains and maps by carrier index, ignoring names.
    pub fn same_action_as(&self, other: &SetPartialAction) -> bool {
        self.group == other.group
            && self.carrier.len() == other.carrier.len()
            && self.domains == other.domains
            && self.maps == other.maps
    }

    fn elem_name(&self, g: Elem) -> String {
        self.group.name(g).to_string()
    }

    fn point_name(&self, x: usize) -> String {
        self.carrier[x].clone()
    }

    /// Checks axioms (i)–(iii) together with the typing of every `α_g`.
    pub fn check(&self) -> Report<SetViolation> {
        let g_ = &*self.group;
        let mut report = Report::new();
        let e = g_.identity();
        if self.domains[e.0].len() != self.carrier.len() {
            let missing = (0..self.carrier.len()).find(|x| !self.domains[e.0].contains(x));
            report.push(SetViolation::IdentityDomain { missing: missing.map(|x| self.point_name(x)) });
        }
        for x in 0..self.carrier.len() {
            if self.apply(e, x) != Some(x) {
                report.push(SetViolation::IdentityMap { point: self.point_name(x) });
            }
        }

        for g in g_.elements() {
            let ginv = g_.inv(g);
            let dom = &self.domains[ginv.0];
            let cod = &self.domains[g.0];
            let map = &self.maps[g.0];
            for &x in dom {
                match map.get(&x) {
                    None => report.push(SetViolation::Map {
                        g: self.elem_name(g),
                        detail: format!("undefined on {}", self.point_name(x)),
                    }),
                    Some(&y) if !cod.contains(&y) => report.push(SetViolation::Map {
                        g: self.elem_name(g),
                        detail: format!(
                            "{} -> {} lands outside its codomain",
                            self.point_name(x),
                            self.point_name(y)
                        ),
                    }),
                    Some(_) => {}
                }
            }
            for &x in map.keys() {
                if !dom.contains(&x) {
                    report.push(SetViolation::Map {
                        g: self.elem_name(g),
                        detail: format!("defined on {} outside its domain", self.point_name(x)),
                    });
                }
            }
            let mut hit = BTreeMap::new();
            for (&x, &y) in map {
                if let Some(x0) = hit.insert(y, x) {
                    report.push(SetViolation::Map {
                        g: self.elem_name(g),
                        detail: format!(
                            "not injective: {} and {} both map to {}",
                            self.point_name(x0),
                            self.point_name(x),
                            self.point_name(y)
                        ),
                    });
                }
            }
            for &y in cod {
                if !hit.contains_key(&y) {
                    report.push(SetViolation::Map {
                        g: self.elem_name(g),
                        detail: format!("not surjective: {} has no preimage", self.point_name(y)),
                    });
                }
            }
        }

        // (ii)
        for g in g_.elements() {
            let ginv = g_.inv(g);
            for h in g_.elements() {
                let gh = g_.mul(g, h);
                let image: BTreeSet<usize> = self.domains[ginv.0]
                    .intersection(&self.domains[h.0])
                    .filter_map(|&x| self.apply(g, x))
                    .collect();
                let expected: BTreeSet<usize> =
                    self.domains[g.0].intersection(&self.domains[gh.0]).copied().collect();
                if image != expected {
                    let detail = describe_difference(&image, &expected, |x| self.point_name(x));
                    report.push(SetViolation::Intersection {
                        g: self.elem_name(g),
                        h: self.elem_name(h),
                        detail,
                    });
                }
            }
        }

        // (iii)
        for g in g_.elements() {
            let ginv = g_.inv(g);
            for h in g_.elements() {
                let hinv = g_.inv(h);
                let gh = g_.mul(g, h);
                for &y in self.domains[h.0].intersection(&self.domains[ginv.0]) {
                    let Some(x) = self.apply(hinv, y) else {
                        report.push(SetViolation::Composition {
                            g: self.elem_name(g),
                            h: self.elem_name(h),
                            point: self.point_name(y),
                            detail: format!("{}^-1 undefined", self.elem_name(h)),
                        });
                        continue;
                    };
                    let lhs = self.apply(h, x).and_then(|z| self.apply(g, z));
                    let rhs = self.apply(gh, x);
                    if lhs.is_none() || lhs != rhs {
                        let show = |v: Option<usize>| v.map_or("undefined".to_string(), |v| self.point_name(v));
                        report.push(SetViolation::Composition {
                            g: self.elem_name(g),
                            h: self.elem_name(h),
                            point: self.point_name(x),
                            detail: format!("composite gives {} but {} gives {}", show(lhs), self.elem_name(gh), show(rhs)),
                        });
                    }
                }
            }
        }
        report
    }

    /// Whether `(g, x) ~ (h, y)` in `G × X`.
    pub fn related(&self, (g, x): (Elem, usize), (h, y): (Elem, usize)) -> bool {
        let g_ = &*self.group;
        let ginv_h = g_.mul(g_.inv(g), h);
        let hinv_g = g_.mul(g_.inv(h), g);
        self.domains[ginv_h.0].contains(&x) && self.apply(hinv_g, x) == Some(y)
    }
}

fn describe_difference(
    got: &BTreeSet<usize>,
    want: &BTreeSet<usize>,
    name: impl Fn(usize) -> String,
) -> String {
    if let Some(&x) = got.difference(want).next() {
        format!("{} is in the image but not in the target intersection", name(x))
    } else if let Some(&x) = want.difference(got).next() {
        format!("{} is in the target intersection but not in the image", name(x))
    } else {
        String::new()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetViolation {
    /// `X_e ≠ X`.
    IdentityDomain { missing: Option<String> },
    /// `α_e(x) ≠ x`.
    IdentityMap { point: String },
    /// `α_g` is not a bijection `X_{g⁻¹} → X_g`.
    Map { g: String, detail: String },
    /// `α_g(X_{g⁻¹} ∩ X_h) ≠ X_g ∩ X_{gh}`.
    Intersection { g: String, h: String, detail: String },
    /// `α_g ∘ α_h ≠ α_{gh}` at a point.
    Composition { g: String, h: String, point: String, detail: String },
}

impl Clause for SetViolation {
    fn clause(&self) -> &'static str {
        match self {
            SetViolation::IdentityDomain { .. } | SetViolation::IdentityMap { .. } => "i",
            SetViolation::Map { .. } => "map",
            SetViolation::Intersection { .. } => "ii",
            SetViolation::Composition { .. } => "iii",
        }
    }
}

impl fmt::Display for SetViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetViolation::IdentityDomain { missing } => match missing {
                Some(x) => write!(f, "(i) domain of e misses {x}"),
                None => write!(f, "(i) domain of e is not the whole carrier"),
            },
            SetViolation::IdentityMap { point } => write!(f, "(i) alpha_e does not fix {point}"),
            SetViolation::Map { g, detail } => write!(f, "(map) alpha_{g}: {detail}"),
            SetViolation::Intersection { g, h, detail } => write!(f, "(ii) g={g}, h={h}: {detail}"),
            SetViolation::Composition { g, h, point, detail } => {
                write!(f, "(iii) g={g}, h={h}, x={point}: {detail}")
            }
        }
    }
}

/// A (total) action of a finite group on a finite set, as a table `g, y ↦ g·y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalSetAction {
    group: Arc<FiniteGroup>,
    carrier: Vec<String>,
    table: Vec<Vec<usize>>,
}

impl GlobalSetAction {
    pub fn new(group: Arc<FiniteGroup>, carrier: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, ActionError> {
        if table.len() != group.order() {
            return Err(ActionError::Shape { expected: group.order(), found: table.len() });
        }
        let m = carrier.len();
        if let Some(&x) = table.iter().flatten().find(|&&x| x >= m) {
            return Err(ActionError::OutOfCarrier(x));
        }
        if let Some(row) = table.iter().find(|row| row.len() != m) {
            return Err(ActionError::Shape { expected: m, found: row.len() });
        }
        Ok(GlobalSetAction { group, carrier, table })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn carrier(&self) -> &[String] {
        &self.carrier
    }

    pub fn apply(&self, g: Elem, y: usize) -> usize {
        self.table[g.0][y]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Checks `β_e = id`, `β_g ∘ β_h = β_{gh}` and bijectivity.
    pub fn check(&self) -> Report<GlobalViolation> {
        let g_ = &*self.group;
        let mut report = Report::new();
        let m = self.carrier.len();
        let e = g_.identity();
        for y in 0..m {
            if self.apply(e, y) != y {
                report.push(GlobalViolation::Identity { point: self.carrier[y].clone() });
            }
        }
        for g in g_.elements() {
            let mut seen = vec![false; m];
            for y in 0..m {
                seen[self.apply(g, y)] = true;
            }
            if seen.iter().any(|s| !s) {
                report.push(GlobalViolation::NotBijective { g: g_.name(g).to_string() });
            }
            for h in g_.elements() {
                let gh = g_.mul(g, h);
                if let Some(y) = (0..m).find(|&y| self.apply(g, self.apply(h, y)) != self.apply(gh, y)) {
                    report.push(GlobalViolation::Composition {
                        g: g_.name(g).to_string(),
                        h: g_.name(h).to_string(),
                        point: self.carrier[y].clone(),
                    });
                }
            }
        }
        report
    }

    /// The same action viewed as a partial action with full domains.
    pub fn as_partial(&self) -> SetPartialAction {
        let m = self.carrier.len();
        let domains = vec![(0..m).collect(); self.group.order()];
        let maps = self
            .table
            .iter()
            .map(|row| row.iter().copied().enumerate().collect())
            .collect();
        SetPartialAction { group: self.group.clone(), carrier: self.carrier.clone(), domains, maps }
    }

    /// Orbit of a set: `⋃_g β_g(s)`.
    pub fn orbit_of(&self, s: &BTreeSet<usize>) -> BTreeSet<usize> {
        self.group.elements().flat_map(|g| s.iter().map(move |&y| self.apply(g, y))).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GlobalViolation {
    Identity { point: String },
    NotBijective { g: String },
    Composition { g: String, h: String, point: String },
}

impl Clause for GlobalViolation {
    fn clause(&self) -> &'static str {
        match self {
            GlobalViolation::Identity { .. } => "identity",
            GlobalViolation::NotBijective { .. } => "bijective",
            GlobalViolation::Composition { .. } => "composition",
        }
    }
}

impl fmt::Display for GlobalViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GlobalViolation::Identity { point } => write!(f, "beta_e moves {point}"),
            GlobalViolation::NotBijective { g } => write!(f, "beta_{g} is not a bijection"),
            GlobalViolation::Composition { g, h, point } => {
                write!(f, "beta_{g} . beta_{h} differs from beta_({g}{h}) at {point}")
            }
        }
    }
}

/// Restricts a global action to a subset `s`: `X_g = β_g(s) ∩ s` with
/// `α_g = β_g` restricted. The result's carrier is `s` in the given order.
pub fn restrict_set_action(b: &GlobalSetAction, subset: &[usize]) -> Result<SetPartialAction, ActionError> {
    let mut local = BTreeMap::new();
    for (i, &y) in subset.iter().enumerate() {
        if y >= b.carrier.len() {
            return Err(ActionError::OutOfCarrier(y));
        }
        if local.insert(y, i).is_some() {
            return Err(ActionError::DuplicateInSubset(b.carrier[y].clone()));
        }
    }
    let carrier = subset.iter().map(|&y| b.carrier[y].clone()).collect();
    let n = b.group.order();
    let mut domains = vec![BTreeSet::new(); n];
    let mut maps = vec![BTreeMap::new(); n];
    for g in b.group.elements() {
        for (&y, &i) in &local {
            if let Some(&j) = local.get(&b.apply(g, y)) {
                domains[g.0].insert(j);
                maps[g.0].insert(i, j);
            }
        }
    }
    Ok(SetPartialAction { group: b.group.clone(), carrier, domains, maps })
}

/// Result of [`globalize_set_action`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Globalization {
    pub global: GlobalSetAction,
    /// `x ↦ [e, x]`.
    pub embedding: Vec<usize>,
    /// Members of each class, sorted; the first member is the canonical
    /// representative.
    pub classes: Vec<Vec<(Elem, usize)>>,
    class_of: Vec<usize>,
    carrier_len: usize,
}

impl Globalization {
    /// Class of the pair `(g, x)`.
    pub fn class_of(&self, g: Elem, x: usize) -> usize {
        self.class_of[g.0 * self.carrier_len + x]
    }

    pub fn representative(&self, class: usize) -> (Elem, usize) {
        self.classes[class][0]
    }
}

/// Globalizes a valid partial action. Classes are numbered by their
/// canonical (least) representative.
pub fn globalize_set_action(a: &SetPartialAction) -> Result<Globalization, ActionError> {
    let n = a.group.order() * a.carrier.len();
    let order: Vec<usize> = (0..n).collect();
    globalize_set_action_ordered(a, &order)
}

/// As [`globalize_set_action`], but pairs of `G × X` are merged in the given
/// order (a permutation of pair indices `g·|X| + x`) and classes are
/// numbered by first appearance in that order. Class names and the
/// resulting action are independent of the order up to renumbering.
pub fn globalize_set_action_ordered(a: &SetPartialAction, order: &[usize]) -> Result<Globalization, ActionError> {
    let report = a.check();
    if !report.is_valid() {
        return Err(ActionError::InvalidInput(report.to_string()));
    }
    let g_ = &*a.group;
    let m = a.carrier.len();
    let n = g_.order() * m;
    let mut check = vec![false; n];
    if order.len() != n || order.iter().any(|&p| p >= n || std::mem::replace(&mut check[p], true)) {
        return Err(ActionError::Shape { expected: n, found: order.len() });
    }
    let pair = |p: usize| (Elem(p / m), p % m);
    let index = |g: Elem, x: usize| g.0 * m + x;

    let mut sets = DisjointSets::new(n);
    for &p in order {
        let (g, x) = pair(p);
        for h in g_.elements() {
            let ginv_h = g_.mul(g_.inv(g), h);
            if a.domains[ginv_h.0].contains(&x) {
                let hinv_g = g_.mul(g_.inv(h), g);
                if let Some(y) = a.apply(hinv_g, x) {
                    sets.union(p, index(h, y));
                }
            }
        }
    }

    let mut root_class = BTreeMap::new();
    let mut classes: Vec<Vec<(Elem, usize)>> = Vec::new();
    let mut class_of = vec![0; n];
    for &p in order {
        let r = sets.find(p);
        let c = *root_class.entry(r).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        class_of[p] = c;
        classes[c].push(pair(p));
    }
    for members in &mut classes {
        members.sort();
    }

    // The merged classes must already be cliques of the relation.
    for members in &classes {
        for &p in members {
            for &q in members {
                if !a.related(p, q) {
                    return Err(ActionError::NotEquivalence(format!(
                        "({}, {}) and ({}, {}) merged but unrelated",
                        g_.name(p.0),
                        a.carrier[p.1],
                        g_.name(q.0),
                        a.carrier[q.1]
                    )));
                }
            }
        }
    }

    let carrier: Vec<String> = classes
        .iter()
        .map(|members| {
            let (g, x) = members[0];
            format!("({}, {})", g_.name(g), a.carrier[x])
        })
        .collect();
    let mut table = vec![vec![0; classes.len()]; g_.order()];
    for g in g_.elements() {
        for (c, members) in classes.iter().enumerate() {
            let (h, x) = members[0];
            let target = class_of[index(g_.mul(g, h), x)];
            for &(h2, x2) in &members[1..] {
                if class_of[index(g_.mul(g, h2), x2)] != target {
                    return Err(ActionError::NotWellDefined(format!(
                        "{} moves members of {} to different classes",
                        g_.name(g),
                        carrier[c]
                    )));
                }
            }
            table[g.0][c] = target;
        }
    }
    let e = g_.identity();
    let embedding: Vec<usize> = (0..m).map(|x| class_of[index(e, x)]).collect();
    if embedding.iter().collect::<BTreeSet<_>>().len() != m {
        return Err(ActionError::NotWellDefined("embedding is not injective".into()));
    }
    let global = GlobalSetAction { group: a.group.clone(), carrier, table };
    Ok(Globalization { global, embedding, classes, class_of, carrier_len: m })
}

//! Finite groups presented by explicit Cayley tables.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::report::{Clause, Report};

/// Default cap on the order of a group closed from permutation generators.
pub const DEFAULT_CLOSURE_CAP: usize = 10_000;

/// Index of an element inside its [`FiniteGroup`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub usize);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("a cyclic group needs order at least 1")]
    ZeroOrder,
    #[error("unknown group element `{0}`")]
    UnknownElement(String),
    #[error("duplicate group element `{0}`")]
    DuplicateElement(String),
    #[error("table is not total: {0}")]
    Shape(String),
    #[error("no two-sided identity in table")]
    NoIdentity,
    #[error("element `{0}` has no inverse")]
    NoInverse(String),
    #[error("table violates the group axioms: {0}")]
    Invalid(String),
    #[error("permutation generators act on different point counts or are not permutations")]
    BadPermutation,
    #[error("closure exceeded the size cap of {0} elements")]
    TooLarge(usize),
}

/// A finite group given by its multiplication and inverse tables.
///
/// Element identifiers are opaque strings. Tables are stored by index so that
/// the algorithms can run on `Elem` values without string lookups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    index: HashMap<String, usize>,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    identity: usize,
}

impl FiniteGroup {
    /// Builds a group from raw tables. Only shape is checked here; the
    /// axioms are checked by [`FiniteGroup::validate`].
    pub fn from_parts(
        names: Vec<String>,
        mul: Vec<Vec<usize>>,
        identity: usize,
        inv: Vec<usize>,
    ) -> Result<Self, GroupError> {
        let n = names.len();
        let mut index = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(GroupError::DuplicateElement(name.clone()));
            }
        }
        if n == 0 {
            return Err(GroupError::Shape("no elements".into()));
        }
        if mul.len() != n || mul.iter().any(|row| row.len() != n) {
            return Err(GroupError::Shape(format!("multiplication table must be {n}x{n}")));
        }
        if mul.iter().flatten().any(|&x| x >= n) {
            return Err(GroupError::Shape("multiplication entry out of range".into()));
        }
        if inv.len() != n || inv.iter().any(|&x| x >= n) {
            return Err(GroupError::Shape("inverse table must map every element into the group".into()));
        }
        if identity >= n {
            return Err(GroupError::Shape("identity out of range".into()));
        }
        Ok(FiniteGroup { names, index, mul, inv, identity })
    }

    /// Builds a group from a Cayley table alone, deriving the identity and
    /// inverses, and rejects tables that fail [`FiniteGroup::validate`].
    pub fn from_cayley_table(names: Vec<String>, mul: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = names.len();
        if mul.len() != n || mul.iter().any(|row| row.len() != n) {
            return Err(GroupError::Shape(format!("multiplication table must be {n}x{n}")));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| mul[e][x] == x && mul[x][e] == x))
            .ok_or(GroupError::NoIdentity)?;
        let mut inv = Vec::with_capacity(n);
        for x in 0..n {
            let y = (0..n)
                .find(|&y| mul[x][y] == identity && mul[y][x] == identity)
                .ok_or_else(|| GroupError::NoInverse(names[x].clone()))?;
            inv.push(y);
        }
        let group = Self::from_parts(names, mul, identity, inv)?;
        let report = group.validate();
        if let Some(v) = report.violations.first() {
            return Err(GroupError::Invalid(v.to_string()));
        }
        Ok(group)
    }

    /// The cyclic group of order `n`, elements `e, t, t2, …, t{n-1}`.
    pub fn cyclic(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::ZeroOrder);
        }
        let names = (0..n).map(cyclic_name).collect();
        let mul = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let inv = (0..n).map(|i| (n - i) % n).collect();
        Self::from_parts(names, mul, 0, inv)
    }

    /// Closes a set of permutations of `0..degree` into a group.
    ///
    /// Elements are named by the shortest word in the generators found by
    /// breadth-first search, e.g. `s0`, `s1.s0`; the identity is `e`.
    /// Returns the group together with the permutation of each element.
    pub fn from_permutations(
        generators: &[Vec<usize>],
        cap: usize,
    ) -> Result<(Self, Vec<Vec<usize>>), GroupError> {
        let degree = generators.first().map_or(0, Vec::len);
        for g in generators {
            if g.len() != degree || !is_permutation(g) {
                return Err(GroupError::BadPermutation);
            }
        }
        let identity: Vec<usize> = (0..degree).collect();
        let mut perms = vec![identity.clone()];
        let mut names = vec!["e".to_string()];
        let mut seen: HashMap<Vec<usize>, usize> = HashMap::from([(identity, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for (k, gen) in generators.iter().enumerate() {
                // gen ∘ perms[i]
                let p: Vec<usize> = perms[i].iter().map(|&x| gen[x]).collect();
                if seen.contains_key(&p) {
                    continue;
                }
                if perms.len() >= cap {
                    return Err(GroupError::TooLarge(cap));
                }
                let name = if i == 0 { format!("s{k}") } else { format!("s{k}.{}", names[i]) };
                seen.insert(p.clone(), perms.len());
                queue.push_back(perms.len());
                perms.push(p);
                names.push(name);
            }
        }
        let n = perms.len();
        let mut mul = vec![vec![0; n]; n];
        let mut inv = vec![0; n];
        for a in 0..n {
            for b in 0..n {
                let p: Vec<usize> = perms[b].iter().map(|&x| perms[a][x]).collect();
                mul[a][b] = seen[&p];
                if mul[a][b] == 0 {
                    inv[a] = b;
                }
            }
        }
        Ok((Self::from_parts(names, mul, 0, inv)?, perms))
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> Elem {
        Elem(self.identity)
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order()).map(Elem)
    }

    pub fn name(&self, g: Elem) -> &str {
        &self.names[g.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn element(&self, name: &str) -> Result<Elem, GroupError> {
        self.index
            .get(name)
            .map(|&i| Elem(i))
            .ok_or_else(|| GroupError::UnknownElement(name.to_string()))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.mul[a.0][b.0])
    }

    pub fn inv(&self, a: Elem) -> Elem {
        Elem(self.inv[a.0])
    }

    /// Multiplication by identifier.
    pub fn mul_named(&self, a: &str, b: &str) -> Result<&str, GroupError> {
        let c = self.mul(self.element(a)?, self.element(b)?);
        Ok(self.name(c))
    }

    pub fn inv_named(&self, a: &str) -> Result<&str, GroupError> {
        Ok(self.name(self.inv(self.element(a)?)))
    }

    /// Order of a single element.
    pub fn element_order(&self, g: Elem) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity() {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Cayley table as nested maps of identifiers, used for serialization.
    pub fn table(&self) -> BTreeMap<&str, Vec<&str>> {
        self.elements()
            .map(|a| (self.name(a), self.elements().map(|b| self.name(self.mul(a, b))).collect()))
            .collect()
    }

    /// Checks associativity, identity and inverse laws exhaustively.
    pub fn validate(&self) -> Report<GroupViolation> {
        let mut report = Report::new();
        let n = self.order();
        let e = self.identity;
        for x in 0..n {
            if self.mul[e][x] != x || self.mul[x][e] != x {
                report.push(GroupViolation::Identity { element: self.names[x].clone() });
            }
            let y = self.inv[x];
            if self.mul[x][y] != e || self.mul[y][x] != e {
                report.push(GroupViolation::Inverse { element: self.names[x].clone() });
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul[a][b];
                for c in 0..n {
                    if self.mul[ab][c] != self.mul[a][self.mul[b][c]] {
                        report.push(GroupViolation::Associativity {
                            triple: [a, b, c].map(|i| self.names[i].clone()),
                        });
                    }
                }
            }
        }
        report
    }
}

fn cyclic_name(i: usize) -> String {
    match i {
        0 => "e".to_string(),
        1 => "t".to_string(),
        k => format!("t{k}"),
    }
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupViolation {
    Associativity { triple: [String; 3] },
    Identity { element: String },
    Inverse { element: String },
}

impl Clause for GroupViolation {
    fn clause(&self) -> &'static str {
        match self {
            GroupViolation::Associativity { .. } => "associativity",
            GroupViolation::Identity { .. } => "identity",
            GroupViolation::Inverse { .. } => "inverse",
        }
    }
}

impl fmt::Display for GroupViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupViolation::Associativity { triple: [a, b, c] } => {
                write!(f, "({a}*{b})*{c} != {a}*({b}*{c})")
            }
            GroupViolation::Identity { element } => write!(f, "identity is not neutral for {element}"),
            GroupViolation::Inverse { element } => write!(f, "inverse table entry for {element} is not an inverse"),
        }
    }
}

//! Exact sparse linear algebra over the rationals.
//!
//! Vectors are finite maps from an ordered coordinate set to nonzero
//! rationals. A [`Span`] keeps an echelon basis keyed by pivot coordinate:
//! every basis row has coefficient 1 at its pivot and no coordinates below
//! it.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rational = BigRational;

/// A sparse vector with no stored zeros.
pub type SparseVec<K> = BTreeMap<K, Rational>;

pub fn rational(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `v += c · w`, dropping zeros.
pub fn axpy<K: Ord + Clone>(v: &mut SparseVec<K>, c: &Rational, w: &SparseVec<K>) {
    for (k, x) in w {
        let entry = v.entry(k.clone()).or_insert_with(Rational::zero);
        *entry += c * x;
        if entry.is_zero() {
            v.remove(k);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span<K: Ord + Clone> {
    rows: BTreeMap<K, SparseVec<K>>,
}

impl<K: Ord + Clone> Default for Span<K> {
    fn default() -> Self {
        Span { rows: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> Span<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vectors<I: IntoIterator<Item = SparseVec<K>>>(vectors: I) -> Self {
        let mut span = Self::new();
        for v in vectors {
            span.insert(v);
        }
        span
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the span.
    pub fn reduce(&self, mut v: SparseVec<K>) -> SparseVec<K> {
        let mut cursor: Option<K> = None;
        loop {
            let next = match &cursor {
                None => v.keys().find(|k| self.rows.contains_key(*k)).cloned(),
                Some(c) => v
                    .range((std::ops::Bound::Excluded(c.clone()), std::ops::Bound::Unbounded))
                    .map(|(k, _)| k)
                    .find(|k| self.rows.contains_key(*k))
                    .cloned(),
            };
            let Some(k) = next else { return v };
            let c = -v[&k].clone();
            axpy(&mut v, &c, &self.rows[&k]);
            cursor = Some(k);
        }
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: SparseVec<K>) -> bool {
        let r = self.reduce(v);
        let Some((pivot, lead)) = r.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let inv = Rational::one() / lead;
        let row = r.into_iter().map(|(k, c)| (k, c * &inv)).collect();
        self.rows.insert(pivot, row);
        true
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.reduce(v.clone()).is_empty()
    }

    pub fn basis(&self) -> impl Iterator<Item = &SparseVec<K>> + '_ {
        self.rows.values()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> + '_ {
        self.rows.keys()
    }

    pub fn is_subspace_of(&self, other: &Span<K>) -> bool {
        self.basis().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Span<K>) -> Span<K> {
        let mut s = self.clone();
        for v in other.basis() {
            s.insert(v.clone());
        }
        s
    }

    /// `dim(U ∩ W) = dim U + dim W − dim(U + W)`.
    pub fn intersection_dim(&self, other: &Span<K>) -> usize {
        self.dim() + other.dim() - self.sum(other).dim()
    }

    pub fn same_space(&self, other: &Span<K>) -> bool {
        self.dim() == other.dim() && self.is_subspace_of(other)
    }
}

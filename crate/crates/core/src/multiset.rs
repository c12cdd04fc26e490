//! Canonical multiset indexing for compressed symmetric storage.
//!
//! A symmetric tensor of order `m` over `d` coordinates is stored once per
//! multiset `i_1 <= ... <= i_m`. Multisets are enumerated in lexicographic
//! order and ranked with the combinatorial number system, so lookups never
//! need a hash map.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest supported order; keeps factorials inside `u64`.
pub const MAX_ORDER: usize = 20;

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Number of multisets of size `order` drawn from `dim` values.
pub fn multiset_count(order: usize, dim: usize) -> usize {
    if dim == 0 {
        return usize::from(order == 0);
    }
    binomial(order + dim - 1, order) as usize
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Number of distinct orderings of a sorted multiset.
pub fn multiplicity(sorted: &[u8]) -> u64 {
    let mut denom = 1u64;
    let mut run = 0usize;
    for (p, &v) in sorted.iter().enumerate() {
        if p > 0 && sorted[p - 1] == v {
            run += 1;
        } else {
            run = 1;
        }
        denom *= run as u64;
    }
    factorial(sorted.len()) / denom
}

/// A sorted multi-index together with its permutation count.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    indices: Vec<u8>,
}

impl MultiIndex {
    /// Sorts `indices` into canonical form. Every index must be below `dim`.
    pub fn new(indices: &[usize], dim: usize) -> Result<Self> {
        let mut out = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= dim {
                return Err(Error::IndexOutOfRange { index: i, dim });
            }
            out.push(i as u8);
        }
        out.sort_unstable();
        Ok(Self { indices: out })
    }

    pub(crate) fn from_sorted(indices: Vec<u8>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] <= w[1]));
        Self { indices }
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.indices
    }

    pub fn to_usizes(&self) -> Vec<usize> {
        self.indices.iter().map(|&i| i as usize).collect()
    }

    pub fn order(&self) -> usize {
        self.indices.len()
    }

    pub fn multiplicity(&self) -> u64 {
        multiplicity(&self.indices)
    }
}

/// Enumeration of all canonical multisets for one `(order, dim)` shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    order: usize,
    dim: usize,
    flat: Vec<u8>,
    mult: Vec<f64>,
}

impl Layout {
    pub fn new(order: usize, dim: usize) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::OrderTooLarge(order));
        }
        if dim < 2 {
            return Err(Error::DimTooSmall(dim));
        }
        let count = multiset_count(order, dim);
        let mut flat = Vec::with_capacity(count * order);
        let mut mult = Vec::with_capacity(count);
        let mut cur = vec![0u8; order];
        loop {
            flat.extend_from_slice(&cur);
            mult.push(multiplicity(&cur) as f64);
            // advance to the lexicographic successor
            let Some(p) = (0..order).rev().find(|&p| (cur[p] as usize) < dim - 1) else {
                break;
            };
            let v = cur[p] + 1;
            for slot in &mut cur[p..] {
                *slot = v;
            }
        }
        debug_assert_eq!(mult.len(), count);
        Ok(Self {
            order,
            dim,
            flat,
            mult,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.mult.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mult.is_empty()
    }

    /// Sorted indices of the `r`-th multiset.
    pub fn indices(&self, r: usize) -> &[u8] {
        &self.flat[r * self.order..(r + 1) * self.order]
    }

    pub fn multiplicity(&self, r: usize) -> f64 {
        self.mult[r]
    }

    pub fn multiplicities(&self) -> &[f64] {
        &self.mult
    }

    /// Lexicographic rank of a sorted multiset of this layout's order.
    pub fn rank(&self, sorted: &[u8]) -> usize {
        debug_assert_eq!(sorted.len(), self.order);
        let mut rank = 0usize;
        let mut lo = 0usize;
        for (p, &v) in sorted.iter().enumerate() {
            let rest = self.order - p - 1;
            for skipped in lo..v as usize {
                rank += multiset_count(rest, self.dim - skipped);
            }
            lo = v as usize;
        }
        rank
    }

    /// Rank of an arbitrary (unsorted) index tuple.
    pub fn rank_unsorted(&self, tuple: &[u8]) -> usize {
        let mut buf = [0u8; MAX_ORDER];
        let buf = &mut buf[..tuple.len()];
        buf.copy_from_slice(tuple);
        buf.sort_unstable();
        self.rank(buf)
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u8]> + '_ {
        (0..self.len()).map(move |r| self.indices(r))
    }
}

//! Brute-force references for testing the solvers.
//!
//! These routines avoid the evaluation code in [`crate::symtensor`]: forms are
//! evaluated from a dense `d^m` copy of the tensor and expansions enumerate
//! multisets directly, so agreement with the optimized paths is evidence
//! rather than tautology.

use alloc::vec;
use alloc::vec::Vec;

use crate::certify::RegularDecomposition;
use crate::error::{Error, Result};
use crate::sphere::{fibonacci_sphere, s3_net};
use crate::symtensor::SymTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Low-discrepancy net on the unit sphere of R^4.
    FullSphereR4,
    /// Fibonacci net of directions on the unit sphere of R^3.
    DirectionSphereR3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub points: usize,
    pub kind: GridKind,
}

impl GridSpec {
    pub const DEFAULT_POINTS: usize = 20_000;

    pub fn full() -> Self {
        Self {
            points: Self::DEFAULT_POINTS,
            kind: GridKind::FullSphereR4,
        }
    }

    pub fn directions() -> Self {
        Self {
            points: Self::DEFAULT_POINTS,
            kind: GridKind::DirectionSphereR3,
        }
    }
}

/// Minimum over a net and the point attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMin {
    pub value: f64,
    pub point: Vec<f64>,
}

/// Every entry of `A` in row-major `d^m` order.
fn dense(a: &SymTensor) -> Vec<f64> {
    let d = a.dim();
    let m = a.order();
    let total = d.pow(m as u32);
    let mut out = vec![0.0; total];
    let mut idx = vec![0usize; m];
    for slot in out.iter_mut() {
        *slot = a.get(&idx).expect("index in range");
        for p in (0..m).rev() {
            idx[p] += 1;
            if idx[p] < d {
                break;
            }
            idx[p] = 0;
        }
    }
    out
}

/// `sum_{i_1..i_m} a[i_1..i_m] x_{i_1} .. x_{i_m}` by contracting the last
/// slot `m` times.
fn dense_form(entries: &[f64], d: usize, x: &[f64], work: &mut Vec<f64>) -> f64 {
    work.clear();
    work.extend_from_slice(entries);
    let mut len = work.len();
    while len > 1 {
        let next = len / d;
        for r in 0..next {
            let mut s = 0.0;
            for (i, xi) in x.iter().enumerate() {
                s += work[r * d + i] * xi;
            }
            work[r] = s;
        }
        len = next;
    }
    work[0]
}

fn grid_min<I: Iterator<Item = Vec<f64>>>(a: &SymTensor, points: I, lift: bool) -> GridMin {
    let entries = dense(a);
    let d = a.dim();
    let mut work = Vec::with_capacity(entries.len());
    let mut best = GridMin {
        value: f64::INFINITY,
        point: Vec::new(),
    };
    let mut x = vec![0.0; d];
    for p in points {
        if lift {
            x[0] = 1.0;
            x[1..].copy_from_slice(&p);
        } else {
            x.copy_from_slice(&p);
        }
        let v = dense_form(&entries, d, &x, &mut work);
        if v < best.value {
            best = GridMin { value: v, point: p };
        }
    }
    best
}

/// Minimum of `A . x^m` over a net on the unit sphere of R^4; an upper bound
/// on the true minimum.
pub fn grid_min_full(a: &SymTensor, grid: GridSpec) -> Result<GridMin> {
    check(a, grid, GridKind::FullSphereR4)?;
    Ok(grid_min(a, s3_net(grid.points).into_iter().map(|p| p.to_vec()), false))
}

/// Minimum of `A . (1, nhat)^m` over a Fibonacci net of directions. The
/// returned point is `nhat`.
pub fn grid_min_regular(a: &SymTensor, grid: GridSpec) -> Result<GridMin> {
    check(a, grid, GridKind::DirectionSphereR3)?;
    Ok(grid_min(
        a,
        fibonacci_sphere(grid.points).into_iter().map(|p| p.to_vec()),
        true,
    ))
}

fn check(a: &SymTensor, grid: GridSpec, kind: GridKind) -> Result<()> {
    if a.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: a.dim(),
        });
    }
    if grid.kind != kind {
        return Err(Error::InvalidArgument(alloc::format!(
            "grid kind {:?} where {kind:?} is required",
            grid.kind
        )));
    }
    if grid.points == 0 {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    Ok(())
}

/// `sum_k alpha_k (1, nhat_k)^{(x) m}` evaluated entry by entry.
pub fn expand_decomposition(dec: &RegularDecomposition, order: usize) -> Result<SymTensor> {
    let dim = dec.terms.first().map_or(4, |t| t.nhat.len() + 1);
    let vectors: Vec<Vec<f64>> = dec
        .terms
        .iter()
        .map(|t| {
            let mut v = vec![1.0];
            v.extend_from_slice(&t.nhat);
            v
        })
        .collect();
    let mut entries = Vec::new();
    let mut idx = vec![0usize; order];
    loop {
        let mut sum = 0.0;
        for (t, v) in dec.terms.iter().zip(&vectors) {
            let mut prod = t.alpha;
            for &i in &idx {
                prod *= v[i];
            }
            sum += prod;
        }
        entries.push((idx.clone(), sum));
        // next nondecreasing tuple
        let Some(p) = (0..order).rev().find(|&p| idx[p] + 1 < dim) else {
            break;
        };
        let next = idx[p] + 1;
        for q in idx[p..].iter_mut() {
            *q = next;
        }
    }
    SymTensor::make(order, dim, entries)
}

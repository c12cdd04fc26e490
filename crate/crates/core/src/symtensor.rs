//! Real symmetric tensors in compressed multiset storage.
//!
//! Entries are kept once per canonical (sorted) multi-index, in the
//! lexicographic order of [`Layout`]. Every logical entry
//! `a[i_1..i_m]` for a permutation of a stored multiset reads the stored
//! value, so symmetry holds by construction.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::multiset::{Layout, MultiIndex, MAX_ORDER};

/// Structural tolerance for regular symmetry on tensors normalized to `a[0..0] = 1`.
pub const DEFAULT_STRUCTURAL_TOL: f64 = 1e-10;

/// An order-`m` real symmetric tensor over `dim` coordinates.
#[derive(Debug, Clone)]
pub struct SymTensor {
    layout: Arc<Layout>,
    values: Vec<f64>,
}

impl PartialEq for SymTensor {
    fn eq(&self, other: &Self) -> bool {
        self.same_shape(other) && self.values == other.values
    }
}

fn check_finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(alloc::format!("{v}")))
    }
}

impl SymTensor {
    /// The zero tensor. Order 0 (a scalar) is permitted here so that row
    /// extraction of order-1 tensors stays total.
    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        let layout = Arc::new(Layout::new(order, dim)?);
        let values = vec![0.0; layout.len()];
        Ok(Self { layout, values })
    }

    /// Builds a tensor from `(multi-index, value)` pairs. Indices are sorted
    /// into canonical form; two entries naming the same multiset are rejected.
    pub fn make<I, V>(order: usize, dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (V, f64)>,
        V: AsRef<[usize]>,
    {
        if order < 1 {
            return Err(Error::OrderTooSmall { min: 1, found: order });
        }
        let mut t = Self::zeros(order, dim)?;
        let mut seen = vec![false; t.values.len()];
        for (idx, val) in entries {
            let idx = idx.as_ref();
            if idx.len() != order {
                return Err(Error::IndexLength {
                    expected: order,
                    found: idx.len(),
                });
            }
            let mi = MultiIndex::new(idx, dim)?;
            let r = t.layout.rank(mi.as_slice());
            if seen[r] {
                return Err(Error::DuplicateIndex(mi.to_usizes()));
            }
            seen[r] = true;
            t.values[r] = check_finite(val)?;
        }
        Ok(t)
    }

    /// Fills every canonical entry from its sorted index tuple.
    pub fn from_fn(order: usize, dim: usize, mut f: impl FnMut(&[u8]) -> f64) -> Result<Self> {
        let mut t = Self::zeros(order, dim)?;
        for r in 0..t.values.len() {
            t.values[r] = check_finite(f(t.layout.indices(r)))?;
        }
        Ok(t)
    }

    pub(crate) fn from_layout(layout: Arc<Layout>, values: Vec<f64>) -> Self {
        debug_assert_eq!(layout.len(), values.len());
        Self { layout, values }
    }

    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        Self::from_layout(self.layout.clone(), values)
    }

    pub fn order(&self) -> usize {
        self.layout.order()
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Canonical values in layout order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Iterates `(sorted indices, multiplicity, value)` over canonical entries.
    pub fn entries(&self) -> impl Iterator<Item = (&[u8], f64, f64)> + '_ {
        (0..self.values.len()).map(move |r| {
            (
                self.layout.indices(r),
                self.layout.multiplicity(r),
                self.values[r],
            )
        })
    }

    /// Entry for any ordering of a multi-index.
    pub fn get(&self, idx: &[usize]) -> Result<f64> {
        if idx.len() != self.order() {
            return Err(Error::IndexLength {
                expected: self.order(),
                found: idx.len(),
            });
        }
        let mi = MultiIndex::new(idx, self.dim())?;
        Ok(self.values[self.layout.rank(mi.as_slice())])
    }

    /// Entry lookup for an unsorted `u8` tuple known to be in range.
    pub(crate) fn get_tuple(&self, tuple: &[u8]) -> f64 {
        self.values[self.layout.rank_unsorted(tuple)]
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.order() == other.order() && self.dim() == other.dim()
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                lhs_order: self.order(),
                lhs_dim: self.dim(),
                rhs_order: other.order(),
                rhs_dim: other.dim(),
            })
        }
    }

    fn check_vector(&self, x: &[f64]) -> Result<()> {
        if x.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            })
        }
    }

    /// The homogeneous form `A . x^m`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_vector(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for r in 0..self.values.len() {
            let v = self.values[r];
            if v == 0.0 {
                continue;
            }
            let prod: f64 = self.layout.indices(r).iter().map(|&i| x[i as usize]).product();
            acc += self.layout.multiplicity(r) * v * prod;
        }
        acc
    }

    /// Gradient of `x -> A . x^m`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_vector(x)?;
        let mut grad = vec![0.0; self.dim()];
        self.value_and_gradient_into(x, &mut grad);
        Ok(grad)
    }

    /// Evaluates the form and writes its gradient into `grad`.
    pub(crate) fn value_and_gradient_into(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let m = self.order();
        let mut prefix = [1.0f64; MAX_ORDER + 1];
        let mut value = 0.0;
        for r in 0..self.values.len() {
            let v = self.values[r];
            if v == 0.0 {
                continue;
            }
            let w = self.layout.multiplicity(r) * v;
            let idx = self.layout.indices(r);
            for p in 0..m {
                prefix[p + 1] = prefix[p] * x[idx[p] as usize];
            }
            value += w * prefix[m];
            // d/dx_j of prod_p x_{i_p} = sum over slots holding j of the other factors
            let mut suffix = 1.0;
            for p in (0..m).rev() {
                grad[idx[p] as usize] += w * prefix[p] * suffix;
                suffix *= x[idx[p] as usize];
            }
        }
        value
    }

    /// Full inner product `sum over all index tuples of a * b`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(self.layout.multiplicities())
            .map(|((a, b), m)| m * a * b)
            .sum())
    }

    /// Frobenius norm over the full (uncompressed) tensor.
    pub fn norm(&self) -> f64 {
        libm::sqrt(
            self.values
                .iter()
                .zip(self.layout.multiplicities())
                .map(|(a, m)| m * a * a)
                .sum(),
        )
    }

    /// Largest absolute canonical entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Reference magnitude for relative tolerances: `|a[0..0]|` when it is
    /// nonzero, otherwise the largest entry, otherwise 1.
    pub fn scale(&self) -> f64 {
        let head = self.values.first().copied().unwrap_or(0.0).abs();
        if head > 0.0 {
            head
        } else {
            let m = self.max_abs();
            if m > 0.0 {
                m
            } else {
                1.0
            }
        }
    }

    /// The rank-one tensor `v^{(x) m}`.
    pub fn outer_power(v: &[f64], order: usize) -> Result<Self> {
        for &x in v {
            check_finite(x)?;
        }
        Self::from_fn(order, v.len(), |idx| {
            idx.iter().map(|&i| v[i as usize]).product()
        })
    }

    /// Entrywise product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(self.with_values(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        ))
    }

    /// The `i`-th row tensor `(a[i, i_2, .., i_m])` of order `m - 1`.
    pub fn row_tensor(&self, i: usize) -> Result<Self> {
        if i >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: i,
                dim: self.dim(),
            });
        }
        if self.order() == 0 {
            return Err(Error::OrderTooSmall { min: 1, found: 0 });
        }
        let mut out = Self::zeros(self.order() - 1, self.dim())?;
        let mut buf = [0u8; MAX_ORDER];
        for r in 0..out.values.len() {
            let tail = out.layout.indices(r);
            let k = tail.len();
            buf[..k].copy_from_slice(tail);
            buf[k] = i as u8;
            out.values[r] = self.get_tuple(&buf[..=k]);
        }
        Ok(out)
    }

    /// Contraction of one slot with `c`: `(sum_i c_i a[i, beta])_beta`.
    pub fn contract(&self, c: &[f64]) -> Result<Self> {
        self.check_vector(c)?;
        if self.order() == 0 {
            return Err(Error::OrderTooSmall { min: 1, found: 0 });
        }
        let mut out = Self::zeros(self.order() - 1, self.dim())?;
        let mut buf = [0u8; MAX_ORDER];
        for r in 0..out.values.len() {
            let tail = out.layout.indices(r);
            let k = tail.len();
            buf[..k].copy_from_slice(tail);
            let mut acc = 0.0;
            for (i, &ci) in c.iter().enumerate() {
                if ci != 0.0 {
                    buf[k] = i as u8;
                    acc += ci * self.get_tuple(&buf[..=k]);
                }
            }
            out.values[r] = acc;
        }
        Ok(out)
    }

    /// Worst violation of `a[0,0,tail] = sum_{i>=1} a[i,i,tail]` over all
    /// trailing multisets, as `(tail, a[0,0,tail] - sum)`. `None` below order 2.
    pub fn regular_symmetry_defect(&self) -> Option<(Vec<u8>, f64)> {
        if self.order() < 2 {
            return None;
        }
        let tails = Layout::new(self.order() - 2, self.dim()).ok()?;
        let mut buf = [0u8; MAX_ORDER];
        let mut worst: Option<(Vec<u8>, f64)> = None;
        for tail in tails.iter() {
            let k = tail.len();
            buf[..k].copy_from_slice(tail);
            buf[k] = 0;
            buf[k + 1] = 0;
            let head = self.get_tuple(&buf[..k + 2]);
            let mut sum = 0.0;
            for i in 1..self.dim() {
                buf[k] = i as u8;
                buf[k + 1] = i as u8;
                sum += self.get_tuple(&buf[..k + 2]);
            }
            let defect = head - sum;
            if worst.as_ref().is_none_or(|(_, w)| defect.abs() > w.abs()) {
                worst = Some((tail.to_vec(), defect));
            }
        }
        worst
    }

    /// Whether `a[0,0,tail] = sum_{i>=1} a[i,i,tail]` holds within `tol` for
    /// every trailing multiset. Vacuously true for order 1.
    pub fn is_regular_symmetric(&self, tol: f64) -> bool {
        self.regular_symmetry_defect()
            .is_none_or(|(_, d)| d.abs() <= tol)
    }

    /// Applies the normalized orthogonal transform `diag(1, R)` in every slot.
    ///
    /// Each output entry `b[l_1..l_m]` is the multilinear form of `A` on the
    /// rows `l_1, .., l_m` of `diag(1, R)`, evaluated by repeated contraction.
    pub fn rotate(&self, rot: &DMatrix<f64>) -> Result<Self> {
        let n = self.dim() - 1;
        if rot.nrows() != n || rot.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rot.nrows(),
            });
        }
        let dev = (rot.transpose() * rot - DMatrix::<f64>::identity(n, n)).amax();
        if dev > 1e-10 {
            return Err(Error::NotOrthogonal(dev));
        }
        let d = self.dim();
        let mut full = DMatrix::<f64>::zeros(d, d);
        full[(0, 0)] = 1.0;
        full.view_mut((1, 1), (n, n)).copy_from(rot);
        let rows: Vec<Vec<f64>> = (0..d).map(|l| full.row(l).iter().copied().collect()).collect();

        let mut values = vec![0.0; self.values.len()];
        for (r, slot) in values.iter_mut().enumerate() {
            let mut t = self.clone();
            for &l in self.layout.indices(r) {
                t = t.contract(&rows[l as usize])?;
            }
            *slot = t.values[0];
        }
        Ok(self.with_values(values))
    }

    /// Multiplies every entry by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        self.with_values(self.values.iter().map(|v| v * c).collect())
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(self.with_values(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + c * b)
                .collect(),
        ))
    }

    /// The order-`2m` tensor whose form is `(A . x^m)^2`.
    pub fn square_form(&self) -> Result<Self> {
        let order = 2 * self.order();
        let mut out = Self::zeros(order, self.dim())?;
        let mut buf = [0u8; 2 * MAX_ORDER];
        let m = self.order();
        for (bi, bm, bv) in self.entries() {
            if bv == 0.0 {
                continue;
            }
            for (ci, cm, cv) in self.entries() {
                if cv == 0.0 {
                    continue;
                }
                buf[..m].copy_from_slice(bi);
                buf[m..2 * m].copy_from_slice(ci);
                let r = out.layout.rank_unsorted(&buf[..2 * m]);
                // coefficient of x^mu accumulates, divided by mult(mu) below
                out.values[r] += bm * cm * bv * cv;
            }
        }
        for r in 0..out.values.len() {
            out.values[r] /= out.layout.multiplicity(r);
        }
        Ok(out)
    }
}

impl Add for &SymTensor {
    type Output = SymTensor;

    /// Panics on shape mismatch; use [`SymTensor::axpy`] for a checked sum.
    fn add(self, rhs: &SymTensor) -> SymTensor {
        self.axpy(1.0, rhs).expect("tensor shapes differ")
    }
}

impl Sub for &SymTensor {
    type Output = SymTensor;

    fn sub(self, rhs: &SymTensor) -> SymTensor {
        self.axpy(-1.0, rhs).expect("tensor shapes differ")
    }
}

impl Mul<f64> for &SymTensor {
    type Output = SymTensor;

    fn mul(self, c: f64) -> SymTensor {
        self.scaled(c)
    }
}

impl Neg for &SymTensor {
    type Output = SymTensor;

    fn neg(self) -> SymTensor {
        self.scaled(-1.0)
    }
}

/// A vector `x` with `x_0 != 0` and `x_0^2 = x_1^2 + .. + x_n^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularVector {
    head: f64,
    tail: Vec<f64>,
}

impl RegularVector {
    pub fn new(head: f64, tail: Vec<f64>) -> Result<Self> {
        if head == 0.0 || !head.is_finite() {
            return Err(Error::NotRegularVector(alloc::format!("head {head}")));
        }
        let sq: f64 = tail.iter().map(|t| t * t).sum();
        let h2 = head * head;
        if (h2 - sq).abs() > 1e-12 * h2 {
            return Err(Error::NotRegularVector(alloc::format!(
                "head^2 = {h2}, tail^2 = {sq}"
            )));
        }
        Ok(Self { head, tail })
    }

    /// The normalized regular vector `(1, nhat)`.
    pub fn from_direction(nhat: &[f64]) -> Result<Self> {
        Self::new(1.0, nhat.to_vec())
    }

    pub fn head(&self) -> f64 {
        self.head
    }

    pub fn tail(&self) -> &[f64] {
        &self.tail
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.tail.len() + 1);
        v.push(self.head);
        v.extend_from_slice(&self.tail);
        v
    }

    /// Splits `u^{(x) m}` into `alpha (1, nhat)^{(x) m}`.
    ///
    /// Even order gives `alpha = u_0^m > 0`. Odd order follows the row
    /// induction convention, where the leading row carries `u^{(x) m-1}` and
    /// `alpha = u_0^{m-1}`.
    pub fn normalized(&self, order: usize) -> (f64, Vec<f64>) {
        let nhat = self.tail.iter().map(|t| t / self.head).collect();
        let power = if order.is_multiple_of(2) { order } else { order - 1 };
        (libm::pow(self.head, power as f64), nhat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn diag4() -> SymTensor {
        SymTensor::make(2, 4, (0..4).map(|i| (vec![i, i], 1.0))).unwrap()
    }

    #[test]
    fn make_order_one() {
        let t = SymTensor::make(1, 4, [(vec![0], 1.0), (vec![3], 1.0)]).unwrap();
        assert_eq!(t.values(), &[1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn make_auto_sorts() {
        let a = SymTensor::make(2, 4, [(vec![0, 1], 0.5)]).unwrap();
        let b = SymTensor::make(2, 4, [(vec![1, 0], 0.5)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.get(&[1, 0]).unwrap(), 0.5);
        assert_eq!(a.get(&[0, 1]).unwrap(), 0.5);
        assert_eq!(a.get(&[0, 0]).unwrap(), 0.0);
    }

    #[test]
    fn make_errors() {
        assert!(matches!(
            SymTensor::make(2, 4, [(vec![0, 4], 1.0)]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            SymTensor::make(2, 4, [(vec![0, 1], 1.0), (vec![1, 0], 2.0)]),
            Err(Error::DuplicateIndex(_))
        ));
        assert!(matches!(
            SymTensor::make(2, 4, [(vec![0, 1], f64::NAN)]),
            Err(Error::NonFinite(_))
        ));
        assert!(SymTensor::make(0, 4, Vec::<(Vec<usize>, f64)>::new()).is_err());
        assert!(SymTensor::make(2, 1, Vec::<(Vec<usize>, f64)>::new()).is_err());
    }

    #[test]
    fn eval_examples() {
        let v = [1.0, 0.0, 0.0, 1.0];
        let a = SymTensor::outer_power(&v, 2).unwrap();
        assert_eq!(a.eval(&v).unwrap(), 4.0);
        assert_eq!(diag4().eval(&[1.0, 1.0, 0.0, 0.0]).unwrap(), 2.0);
        // hand expansion: 0.5 (x0+x3)^2 + 0.5 (x0-x3)^2 = x0^2 + x3^2
        let b = SymTensor::outer_power(&[1.0, 0.0, 0.0, -1.0], 2).unwrap();
        let mix = &(&a * 0.5) + &(&b * 0.5);
        assert_eq!(mix.eval(&v).unwrap(), 2.0);
        assert!(mix.eval(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn gradient_examples() {
        assert_eq!(
            diag4().gradient(&[1.0, 0.0, 0.0, 0.0]).unwrap(),
            vec![2.0, 0.0, 0.0, 0.0]
        );
        let a = SymTensor::outer_power(&[1.0, 0.0, 0.0, 1.0], 2).unwrap();
        assert_eq!(
            a.gradient(&[0.0, 0.0, 0.0, 1.0]).unwrap(),
            vec![2.0, 0.0, 0.0, 2.0]
        );
    }

    #[test]
    fn inner_examples() {
        let a = SymTensor::make(1, 4, [(vec![0], 1.0), (vec![3], 1.0)]).unwrap();
        assert_eq!(a.inner(&a).unwrap(), 2.0);
        let u = SymTensor::outer_power(&[1.0, 1.0, 0.0, 0.0], 2).unwrap();
        let v = SymTensor::outer_power(&[1.0, 0.0, 1.0, 0.0], 2).unwrap();
        assert_eq!(u.inner(&v).unwrap(), 1.0);
        let r = SymTensor::outer_power(&[1.0, 0.0, 0.0, 1.0], 2).unwrap();
        assert_eq!(diag4().inner(&r).unwrap(), 2.0);
        assert!(a.inner(&r).is_err());
    }

    #[test]
    fn outer_power_examples() {
        let a = SymTensor::outer_power(&[1.0, 0.0, 0.0, 1.0], 2).unwrap();
        for (idx, _, v) in a.entries() {
            let expect = match idx {
                [0, 0] | [0, 3] | [3, 3] => 1.0,
                _ => 0.0,
            };
            assert_eq!(v, expect, "{idx:?}");
        }
        let b = SymTensor::outer_power(&[1.0, 1.0, 0.0, 0.0], 3).unwrap();
        for (idx, _, v) in b.entries() {
            let expect = if idx.iter().all(|&i| i <= 1) { 1.0 } else { 0.0 };
            assert_eq!(v, expect, "{idx:?}");
        }
    }

    #[test]
    fn hadamard_examples() {
        let u = SymTensor::outer_power(&[1.0, 0.0, 0.0, 1.0], 2).unwrap();
        let v = SymTensor::outer_power(&[1.0, 1.0, 0.0, 1.0], 2).unwrap();
        assert_eq!(u.hadamard(&v).unwrap(), u);
        let z = SymTensor::zeros(2, 4).unwrap();
        assert_eq!(v.hadamard(&z).unwrap(), z);
    }

    #[test]
    fn row_tensor_examples() {
        let v = [1.0, 0.0, 0.0, 1.0];
        let a = SymTensor::outer_power(&v, 2).unwrap();
        assert_eq!(a.row_tensor(0).unwrap().values(), &v);
        assert_eq!(a.row_tensor(1).unwrap().values(), &[0.0; 4]);
        assert!(a.row_tensor(4).is_err());

        let vp = [1.0, 0.0, 0.0, 1.0];
        let vm = [1.0, 0.0, 0.0, -1.0];
        let t = &(&SymTensor::outer_power(&vp, 3).unwrap() * 0.5)
            + &(&SymTensor::outer_power(&vm, 3).unwrap() * 0.5);
        let expect = &(&SymTensor::outer_power(&vp, 2).unwrap() * 0.5)
            - &(&SymTensor::outer_power(&vm, 2).unwrap() * 0.5);
        assert_eq!(t.row_tensor(3).unwrap(), expect);

        let scalar = SymTensor::make(1, 4, [(vec![2], 3.0)]).unwrap().row_tensor(2).unwrap();
        assert_eq!(scalar.order(), 0);
        assert_eq!(scalar.values(), &[3.0]);
    }

    #[test]
    fn regular_symmetry_examples() {
        let s = 1.0 / libm::sqrt(3.0);
        for m in 1..6 {
            let t = SymTensor::outer_power(&[1.0, s, -s, s], m).unwrap();
            assert!(t.is_regular_symmetric(1e-12), "order {m}");
        }
        assert!(!diag4().is_regular_symmetric(1e-10));
        let (_, d) = diag4().regular_symmetry_defect().unwrap();
        assert_eq!(d, -2.0);
    }

    #[test]
    fn rotate_examples() {
        let a = SymTensor::outer_power(&[1.0, 1.0, 0.0, 0.0], 2).unwrap();
        let id = DMatrix::<f64>::identity(3, 3);
        assert!(a.rotate(&id).unwrap().max_abs_diff(&a).unwrap() < 1e-15);
        let rz = DMatrix::from_row_slice(3, 3, &[-1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0]);
        let expect = SymTensor::outer_power(&[1.0, -1.0, 0.0, 0.0], 2).unwrap();
        assert!(a.rotate(&rz).unwrap().max_abs_diff(&expect).unwrap() < 1e-15);
        let bad = DMatrix::from_row_slice(3, 3, &[2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(a.rotate(&bad), Err(Error::NotOrthogonal(_))));
    }

    #[test]
    fn square_form_matches_pointwise_square() {
        let b = SymTensor::make(2, 4, [(vec![0, 0], 1.0), (vec![1, 2], -0.5), (vec![3, 3], 2.0)])
            .unwrap();
        let sq = b.square_form().unwrap();
        let x = [0.3, -0.7, 0.2, 1.1];
        let direct = b.eval(&x).unwrap();
        assert!((sq.eval(&x).unwrap() - direct * direct).abs() < 1e-12);
    }

    #[test]
    fn regular_vector_normalizes() {
        let u = RegularVector::new(-2.0, vec![0.0, 0.0, 2.0]).unwrap();
        let (alpha, nhat) = u.normalized(2);
        assert_eq!(alpha, 4.0);
        assert_eq!(nhat, vec![0.0, 0.0, -1.0]);
        let (alpha3, _) = u.normalized(3);
        assert_eq!(alpha3, 4.0);
        assert!(RegularVector::new(1.0, vec![1.0, 1.0, 0.0]).is_err());
        assert!(RegularVector::new(0.0, vec![0.0, 0.0, 0.0]).is_err());
    }
}

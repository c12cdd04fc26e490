//! Search for regular decompositions `A = sum_k alpha_k (1, nhat_k)^{(x) m}`.
//!
//! Phase 1 fits nonnegative weights over a fixed dictionary of directions.
//! Phase 2 prunes the support and refines weights and directions jointly
//! with a damped Gauss-Newton iteration, merging atoms that collapse onto
//! each other. Residuals are measured in the full Frobenius norm, which on
//! compressed storage weights each entry by the square root of its
//! multiplicity.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::nnls::nnls;
use super::SolverConfig;
use crate::error::{Error, Result};
use crate::multiset::{binomial, Layout, MAX_ORDER};
use crate::sample::random_rotation;
use crate::sphere::{dot, normalize, unit_net};
use crate::symtensor::{SymTensor, DEFAULT_STRUCTURAL_TOL};

/// Atoms closer than this angle (radians) are merged.
pub const MERGE_ANGLE: f64 = 1e-3;

/// Relative weight below which phase-1 atoms are dropped.
const PRUNE_WEIGHT: f64 = 1e-12;

/// Gauss-Newton iterations between merge/prune passes.
const ROUND_LEN: usize = 40;

/// Extra dictionaries (randomly rotated copies) tried while the best fit
/// stays above [`RESTART_BELOW`].
const DICTIONARY_RESTARTS: u64 = 2;
const RESTART_BELOW: f64 = 1e-10;

/// Greedy atom insertions tried when refinement stalls above
/// [`AUGMENT_BELOW`].
const AUGMENT_ROUNDS: usize = 4;
const AUGMENT_BELOW: f64 = 1e-12;

/// Neighbouring atoms within this angle (radians) are candidates for a
/// trial merge.
const CONSOLIDATE_ANGLE: f64 = 0.35;
const CONSOLIDATE_PASSES: usize = 6;

/// Relative residual at which refinement stops early.
const RESIDUAL_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct RegularTerm {
    pub alpha: f64,
    pub nhat: Vec<f64>,
}

/// `sum_k alpha_k (1, nhat_k)^{(x) order}` with `alpha_k > 0` and unit `nhat_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularDecomposition {
    pub order: usize,
    pub terms: Vec<RegularTerm>,
    /// `|A - sum| / |A|` in the Frobenius norm (absolute when `A = 0`).
    pub residual: f64,
}

impl RegularDecomposition {
    /// The tensor this decomposition describes, in dimension `dim`.
    pub fn expand(&self, dim: usize) -> Result<SymTensor> {
        let mut acc = SymTensor::zeros(self.order, dim)?;
        for t in &self.terms {
            if t.nhat.len() + 1 != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim - 1,
                    found: t.nhat.len(),
                });
            }
            let v = lead_one(&t.nhat);
            acc = acc.axpy(t.alpha, &SymTensor::outer_power(&v, self.order)?)?;
        }
        Ok(acc)
    }

    /// `|A - expand| / |A|`.
    pub fn relative_residual(&self, a: &SymTensor) -> Result<f64> {
        let diff = a.axpy(-1.0, &self.expand(a.dim())?)?;
        let n = a.norm();
        Ok(if n > 0.0 { diff.norm() / n } else { diff.norm() })
    }

    /// Maps every direction through `nhat -> R nhat`.
    pub fn rotated(&self, rot: &DMatrix<f64>) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| RegularTerm {
                alpha: t.alpha,
                nhat: (rot * DVector::from_column_slice(&t.nhat)).iter().copied().collect(),
            })
            .collect();
        Self {
            order: self.order,
            terms,
            residual: self.residual,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Caratheodory bound on the number of terms, `C(n + m + 2, m) + 1`.
pub fn caratheodory_cap(n: usize, order: usize) -> usize {
    binomial(n + order + 2, order) as usize + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionStatus {
    Found,
    NotFound,
}

/// Result of [`regular_decompose`]; the decomposition is the best fit found
/// and is present in both cases unless no atom survived.
#[derive(Debug, Clone, PartialEq)]
pub struct DecomposeOutcome {
    pub status: DecompositionStatus,
    pub decomposition: Option<RegularDecomposition>,
}

impl DecomposeOutcome {
    pub fn found(&self) -> Option<&RegularDecomposition> {
        match self.status {
            DecompositionStatus::Found => self.decomposition.as_ref(),
            DecompositionStatus::NotFound => None,
        }
    }

    pub fn best_residual(&self) -> f64 {
        self.decomposition.as_ref().map_or(f64::INFINITY, |d| d.residual)
    }
}

fn lead_one(nhat: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(nhat.len() + 1);
    v.push(1.0);
    v.extend_from_slice(nhat);
    v
}

/// Fits `A` by a nonnegative combination of regular rank-one tensors.
///
/// `Found` iff the relative residual is at most `cfg.tau_dec`. The input
/// must be regular symmetric within `1e-10` relative to its scale.
pub fn regular_decompose(a: &SymTensor, cfg: &SolverConfig) -> Result<DecomposeOutcome> {
    cfg.validate()?;
    if a.order() == 0 {
        return Err(Error::OrderTooSmall { min: 1, found: 0 });
    }
    if let Some((_, defect)) = a.regular_symmetry_defect() {
        if defect.abs() > DEFAULT_STRUCTURAL_TOL * a.scale() {
            return Err(Error::NotRegularSymmetric(defect));
        }
    }
    let norm = a.norm();
    if norm == 0.0 {
        return Ok(DecomposeOutcome {
            status: DecompositionStatus::Found,
            decomposition: Some(RegularDecomposition {
                order: a.order(),
                terms: Vec::new(),
                residual: 0.0,
            }),
        });
    }

    let fit = Fitter::new(a);
    let n = a.dim() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(3);
    let base = unit_net(n, cfg.grid_size, &mut rng);

    let mut best: Option<(f64, Vec<RegularTerm>)> = None;
    for attempt in 0..=DICTIONARY_RESTARTS {
        let dictionary = if attempt == 0 {
            base.clone()
        } else {
            let rot = random_rotation(&mut rng, n);
            base.iter()
                .map(|p| (&rot * DVector::from_column_slice(p)).iter().copied().collect())
                .collect()
        };
        let atoms = fit.dictionary_fit(&dictionary, cfg.max_iter);
        let (res, atoms) = fit.refine(atoms, cfg.max_iter);
        let (res, atoms) = fit.augment(res, atoms, &dictionary, cfg.max_iter);
        let (res, atoms) = fit.consolidate(res, atoms, cfg.max_iter);
        if best.as_ref().is_none_or(|(r, _)| res < *r) {
            best = Some((res, atoms));
        }
        if best.as_ref().is_some_and(|(r, _)| *r <= RESTART_BELOW.min(cfg.tau_dec)) {
            break;
        }
    }
    let (_, atoms) = best.expect("at least one attempt");
    let atoms = fit.reduce(atoms);
    let (_, atoms) = fit.refine(atoms, ROUND_LEN);

    let terms: Vec<RegularTerm> = atoms
        .into_iter()
        .map(|t| RegularTerm {
            alpha: t.alpha * norm,
            nhat: t.nhat,
        })
        .collect();
    let mut dec = RegularDecomposition {
        order: a.order(),
        terms,
        residual: 0.0,
    };
    dec.residual = dec.relative_residual(a)?;
    let status = if dec.residual <= cfg.tau_dec {
        DecompositionStatus::Found
    } else {
        DecompositionStatus::NotFound
    };
    let cap = caratheodory_cap(n, a.order());
    if status == DecompositionStatus::Found && dec.terms.len() > cap {
        return Err(Error::CapExceeded {
            terms: dec.terms.len(),
            cap,
        });
    }
    Ok(DecomposeOutcome {
        status,
        decomposition: Some(dec),
    })
}

/// Weighted least-squares geometry of one target tensor, normalized to unit norm.
struct Fitter {
    layout: Layout,
    sqrt_mult: Vec<f64>,
    target: DVector<f64>,
}

impl Fitter {
    fn new(a: &SymTensor) -> Self {
        let layout = a.layout().clone();
        let sqrt_mult: Vec<f64> = layout.multiplicities().iter().map(|&m| libm::sqrt(m)).collect();
        let norm = a.norm();
        let target = DVector::from_iterator(
            layout.len(),
            a.values().iter().zip(&sqrt_mult).map(|(v, w)| v * w / norm),
        );
        Self {
            layout,
            sqrt_mult,
            target,
        }
    }

    fn rows(&self) -> usize {
        self.layout.len()
    }

    /// Weighted entries of `(1, nhat)^{(x) m}`.
    fn atom(&self, nhat: &[f64]) -> DVector<f64> {
        let v = lead_one(nhat);
        DVector::from_fn(self.rows(), |r, _| {
            self.sqrt_mult[r] * self.layout.indices(r).iter().map(|&i| v[i as usize]).product::<f64>()
        })
    }

    /// Weighted entries and their derivatives with respect to `v_1..v_n` of
    /// `v^{(x) m}` at `v = (1, nhat)`; derivative column `j` is for `v_{j+1}`.
    fn atom_with_jacobian(&self, nhat: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let v = lead_one(nhat);
        let n = nhat.len();
        let m = self.layout.order();
        let mut value = DVector::zeros(self.rows());
        let mut jac = DMatrix::zeros(self.rows(), n);
        let mut prefix = [1.0f64; MAX_ORDER + 1];
        for r in 0..self.rows() {
            let idx = self.layout.indices(r);
            for p in 0..m {
                prefix[p + 1] = prefix[p] * v[idx[p] as usize];
            }
            let w = self.sqrt_mult[r];
            value[r] = w * prefix[m];
            let mut suffix = 1.0;
            for p in (0..m).rev() {
                let i = idx[p] as usize;
                if i > 0 {
                    jac[(r, i - 1)] += w * prefix[p] * suffix;
                }
                suffix *= v[i];
            }
        }
        (value, jac)
    }

    fn model(&self, atoms: &[RegularTerm]) -> DVector<f64> {
        let mut acc = DVector::zeros(self.rows());
        for t in atoms {
            acc.axpy(t.alpha, &self.atom(&t.nhat), 1.0);
        }
        acc
    }

    fn residual(&self, atoms: &[RegularTerm]) -> f64 {
        (&self.target - self.model(atoms)).norm()
    }

    /// Phase 1: nonnegative least squares over the dictionary, then pruning
    /// and merging of the support.
    fn dictionary_fit(&self, dictionary: &[Vec<f64>], max_outer: usize) -> Vec<RegularTerm> {
        let mut b = DMatrix::zeros(self.rows(), dictionary.len());
        for (j, d) in dictionary.iter().enumerate() {
            b.set_column(j, &self.atom(d));
        }
        let x = nnls(&b, &self.target, max_outer);
        let atoms: Vec<RegularTerm> = x
            .iter()
            .zip(dictionary)
            .filter(|(&w, _)| w > PRUNE_WEIGHT)
            .map(|(&w, d)| RegularTerm {
                alpha: w,
                nhat: d.clone(),
            })
            .collect();
        merge_close(atoms)
    }

    /// Escapes shallow local minima: adds the dictionary atom most
    /// correlated with the current residual and refines again, keeping the
    /// result only if it improves.
    fn augment(
        &self,
        mut cost: f64,
        mut atoms: Vec<RegularTerm>,
        dictionary: &[Vec<f64>],
        max_iter: usize,
    ) -> (f64, Vec<RegularTerm>) {
        for _ in 0..AUGMENT_ROUNDS {
            if cost <= AUGMENT_BELOW {
                break;
            }
            let r = &self.target - self.model(&atoms);
            let Some((score, nhat)) = dictionary
                .iter()
                .map(|d| {
                    let col = self.atom(d);
                    (col.dot(&r) / col.norm_squared(), d)
                })
                .max_by(|a, b| a.0.total_cmp(&b.0))
            else {
                break;
            };
            if score <= 0.0 {
                break;
            }
            let mut trial = atoms.clone();
            trial.push(RegularTerm {
                alpha: score,
                nhat: nhat.clone(),
            });
            let (c, t) = self.refine(trial, max_iter);
            if c >= cost {
                break;
            }
            cost = c;
            atoms = t;
        }
        (cost, atoms)
    }

    /// Tries merging pairs of atoms closer than [`CONSOLIDATE_ANGLE`] and
    /// dropping the lightest atom; each candidate is refined and kept only if
    /// it lowers the residual. Undoes the splitting of one atom into two
    /// neighbours, which refinement alone cannot repair.
    fn consolidate(&self, mut cost: f64, mut atoms: Vec<RegularTerm>, max_iter: usize) -> (f64, Vec<RegularTerm>) {
        let cos_lim = libm::cos(CONSOLIDATE_ANGLE);
        for _ in 0..CONSOLIDATE_PASSES {
            if cost <= AUGMENT_BELOW || atoms.len() < 2 {
                break;
            }
            let mut candidates: Vec<Vec<RegularTerm>> = Vec::new();
            let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
            for i in 0..atoms.len() {
                for j in i + 1..atoms.len() {
                    let c = dot(&atoms[i].nhat, &atoms[j].nhat);
                    if c >= cos_lim {
                        pairs.push((c, i, j));
                    }
                }
            }
            pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
            for &(_, i, j) in &pairs {
                let (a, b) = (&atoms[i], &atoms[j]);
                let total = a.alpha + b.alpha;
                let mut nhat: Vec<f64> = a.nhat.iter().zip(&b.nhat).map(|(x, y)| (a.alpha * x + b.alpha * y) / total).collect();
                normalize(&mut nhat);
                let mut trial: Vec<RegularTerm> = atoms
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i && k != j)
                    .map(|(_, t)| t.clone())
                    .collect();
                trial.push(RegularTerm { alpha: total, nhat });
                candidates.push(trial);
            }
            if let Some(light) = (0..atoms.len()).min_by(|&a, &b| atoms[a].alpha.total_cmp(&atoms[b].alpha)) {
                let mut trial = atoms.clone();
                trial.remove(light);
                candidates.push(trial);
            }
            let mut improved = false;
            for trial in candidates {
                let (c, t) = self.refine(trial, max_iter);
                if c < cost {
                    cost = c;
                    atoms = t;
                    improved = true;
                    break;
                }
            }
            if !improved {
                break;
            }
        }
        (cost, atoms)
    }

    /// Caratheodory reduction: while the weighted atoms are numerically
    /// linearly dependent, move the weights along a null vector until one
    /// vanishes. The fitted tensor is unchanged up to the null-space defect.
    fn reduce(&self, mut atoms: Vec<RegularTerm>) -> Vec<RegularTerm> {
        while atoms.len() > 1 {
            let k = atoms.len();
            let mut b = DMatrix::zeros(self.rows(), k);
            for (j, t) in atoms.iter().enumerate() {
                b.set_column(j, &self.atom(&t.nhat));
            }
            let svd = b.svd(false, true);
            let Some(vt) = svd.v_t else { break };
            let (jmin, smin) = svd
                .singular_values
                .iter()
                .copied()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty");
            if svd.singular_values.len() == k && smin > 1e-10 * svd.singular_values.max() {
                break;
            }
            let mut null: Vec<f64> = if svd.singular_values.len() < k {
                // wide matrix: complete the row space to find a kernel vector
                let q = (vt.transpose() * &vt).map(|x| -x) + DMatrix::<f64>::identity(k, k);
                let col = (0..k).max_by(|&a, &b| q.column(a).norm().total_cmp(&q.column(b).norm())).expect("k > 0");
                q.column(col).iter().copied().collect()
            } else {
                vt.row(jmin).iter().copied().collect()
            };
            if !null.iter().any(|&c| c > 0.0) {
                null.iter_mut().for_each(|c| *c = -*c);
            }
            let (drop, step) = atoms
                .iter()
                .zip(&null)
                .enumerate()
                .filter(|(_, (_, &c))| c > 0.0)
                .map(|(j, (t, &c))| (j, t.alpha / c))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("positive component");
            for (t, c) in atoms.iter_mut().zip(&null) {
                t.alpha = (t.alpha - step * c).max(0.0);
            }
            atoms.remove(drop);
            atoms.retain(|t| t.alpha > 0.0);
        }
        atoms
    }

    /// Phase 2: damped Gauss-Newton on weights (projected onto `alpha >= 0`)
    /// and directions (tangent steps retracted to the sphere). Returns the
    /// final relative residual.
    fn refine(&self, mut atoms: Vec<RegularTerm>, max_iter: usize) -> (f64, Vec<RegularTerm>) {
        let mut cost = self.residual(&atoms);
        let mut spent = 0;
        while spent < max_iter && cost > RESIDUAL_FLOOR && !atoms.is_empty() {
            let before = cost;
            let budget = ROUND_LEN.min(max_iter - spent);
            let (used, _) = self.gauss_newton_round(&mut atoms, budget, cost);
            spent += used.max(1);
            let merged = merge_close(core::mem::take(&mut atoms));
            atoms = merged
                .into_iter()
                .filter(|t| t.alpha > PRUNE_WEIGHT)
                .collect();
            cost = self.residual(&atoms);
            // no progress over a whole round and nothing merged away
            if used < budget && cost >= before * (1.0 - 1e-3) {
                break;
            }
        }
        (cost, atoms)
    }

    fn gauss_newton_round(&self, atoms: &mut [RegularTerm], budget: usize, mut cost: f64) -> (usize, f64) {
        let n = self.layout.dim() - 1;
        let per = n; // alpha plus n - 1 tangent coordinates
        let params = atoms.len() * per;
        let mut lambda = 1e-6;
        for it in 0..budget {
            let mut jac = DMatrix::<f64>::zeros(self.rows(), params);
            let mut model = DVector::<f64>::zeros(self.rows());
            let mut bases = Vec::with_capacity(atoms.len());
            for (k, t) in atoms.iter().enumerate() {
                let (val, dv) = self.atom_with_jacobian(&t.nhat);
                model.axpy(t.alpha, &val, 1.0);
                jac.set_column(k * per, &val);
                let basis = tangent_basis(&t.nhat);
                for (q, e) in basis.iter().enumerate() {
                    let col = &dv * DVector::from_column_slice(e) * t.alpha;
                    jac.set_column(k * per + 1 + q, &col);
                }
                bases.push(basis);
            }
            let r = &self.target - &model;
            let jt = jac.transpose();
            let jtj = &jt * &jac;
            let jtr = &jt * &r;
            let mut improved = false;
            while lambda < 1e12 {
                let mut sys = jtj.clone();
                for i in 0..params {
                    sys[(i, i)] += lambda * (1.0 + jtj[(i, i)]);
                }
                let Some(step) = sys.cholesky().map(|c| c.solve(&jtr)) else {
                    lambda *= 10.0;
                    continue;
                };
                let trial: Vec<RegularTerm> = atoms
                    .iter()
                    .enumerate()
                    .map(|(k, t)| {
                        let mut nhat = t.nhat.clone();
                        for (q, e) in bases[k].iter().enumerate() {
                            let s = step[k * per + 1 + q];
                            for (x, ei) in nhat.iter_mut().zip(e) {
                                *x += s * ei;
                            }
                        }
                        normalize(&mut nhat);
                        RegularTerm {
                            alpha: (t.alpha + step[k * per]).max(0.0),
                            nhat,
                        }
                    })
                    .collect();
                let trial_cost = self.residual(&trial);
                if trial_cost < cost {
                    atoms.clone_from_slice(&trial);
                    let gain = cost - trial_cost;
                    cost = trial_cost;
                    lambda = (lambda / 3.0).max(1e-15);
                    improved = true;
                    if cost <= RESIDUAL_FLOOR || gain <= 1e-15 * cost {
                        return (it + 1, cost);
                    }
                    break;
                }
                lambda *= 4.0;
            }
            if !improved {
                return (it, cost);
            }
        }
        (budget, cost)
    }
}

/// Orthonormal basis of the complement of unit `nhat`.
fn tangent_basis(nhat: &[f64]) -> Vec<Vec<f64>> {
    let n = nhat.len();
    let mut axes: Vec<usize> = (0..n).collect();
    axes.sort_by(|&a, &b| nhat[a].abs().total_cmp(&nhat[b].abs()));
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for &ax in &axes {
        if basis.len() == n - 1 {
            break;
        }
        let mut e = vec![0.0; n];
        e[ax] = 1.0;
        let p = dot(&e, nhat);
        for (x, u) in e.iter_mut().zip(nhat) {
            *x -= p * u;
        }
        for b in &basis {
            let p = dot(&e, b);
            for (x, u) in e.iter_mut().zip(b) {
                *x -= p * u;
            }
        }
        if normalize(&mut e) > 1e-8 {
            basis.push(e);
        }
    }
    basis
}

/// Merges atoms within [`MERGE_ANGLE`]; weights add and the direction is the
/// weighted mean.
fn merge_close(atoms: Vec<RegularTerm>) -> Vec<RegularTerm> {
    let cos_lim = libm::cos(MERGE_ANGLE);
    let mut out: Vec<RegularTerm> = Vec::with_capacity(atoms.len());
    let mut atoms = atoms;
    atoms.sort_by(|a, b| b.alpha.total_cmp(&a.alpha));
    for t in atoms {
        if let Some(host) = out.iter_mut().find(|h| dot(&h.nhat, &t.nhat) >= cos_lim) {
            let total = host.alpha + t.alpha;
            if total > 0.0 {
                for (x, y) in host.nhat.iter_mut().zip(&t.nhat) {
                    *x = (host.alpha * *x + t.alpha * y) / total;
                }
                normalize(&mut host.nhat);
            }
            host.alpha = total;
        } else {
            out.push(t);
        }
    }
    out
}

/// Verifies the row induction of an odd-order tensor: for every `i >= 1`,
/// row `i` of `A` must equal `sum_k alpha_k (nhat_k)_i (1, nhat_k)^{(x) m-1}`
/// within `1e-8` (absolute, per entry).
pub fn check_odd_regular(a: &SymTensor, dec: &RegularDecomposition) -> Result<bool> {
    const ROW_TOL: f64 = 1e-8;
    if a.order().is_multiple_of(2) {
        return Err(Error::Parity {
            expected: "odd",
            order: a.order(),
        });
    }
    if dec.order != a.order() {
        return Err(Error::ShapeMismatch {
            lhs_order: a.order(),
            lhs_dim: a.dim(),
            rhs_order: dec.order,
            rhs_dim: a.dim(),
        });
    }
    for i in 1..a.dim() {
        let row = a.row_tensor(i)?;
        let mut induced = SymTensor::zeros(a.order() - 1, a.dim())?;
        for t in &dec.terms {
            let v = lead_one(&t.nhat);
            induced = induced.axpy(t.alpha * v[i], &SymTensor::outer_power(&v, a.order() - 1)?)?;
        }
        if row.max_abs_diff(&induced)? > ROW_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn z(sign: f64) -> Vec<f64> {
        vec![0.0, 0.0, sign]
    }

    fn two_pole(order: usize) -> SymTensor {
        let p = SymTensor::outer_power(&[1.0, 0.0, 0.0, 1.0], order).unwrap();
        let m = SymTensor::outer_power(&[1.0, 0.0, 0.0, -1.0], order).unwrap();
        &(&p * 0.5) + &(&m * 0.5)
    }

    #[test]
    fn rank_one_recovered() {
        let a = SymTensor::outer_power(&[1.0, 0.0, 0.0, 1.0], 2).unwrap();
        let out = regular_decompose(&a, &SolverConfig::default()).unwrap();
        let dec = out.found().expect("found");
        assert_eq!(dec.terms.len(), 1);
        assert!((dec.terms[0].alpha - 1.0).abs() < 1e-9);
        assert!((dec.terms[0].nhat[2] - 1.0).abs() < 1e-9);
        assert!(dec.residual <= 1e-10);
    }

    #[test]
    fn antipodal_pair_reconstructs() {
        let a = two_pole(2);
        let out = regular_decompose(&a, &SolverConfig::default()).unwrap();
        let dec = out.found().expect("found");
        assert!(dec.residual <= 1e-6);
        let total: f64 = dec.terms.iter().map(|t| t.alpha).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bell_tensor_not_found() {
        let a = SymTensor::make(
            2,
            4,
            [(vec![0, 0], 1.0), (vec![1, 1], 1.0), (vec![2, 2], -1.0), (vec![3, 3], 1.0)],
        )
        .unwrap();
        let out = regular_decompose(&a, &SolverConfig::default()).unwrap();
        assert_eq!(out.status, DecompositionStatus::NotFound);
        assert!(out.best_residual() > 1e-6);
    }

    #[test]
    fn irregular_input_rejected() {
        let a = SymTensor::make(2, 4, (0..4).map(|i| (vec![i, i], 1.0))).unwrap();
        assert!(matches!(
            regular_decompose(&a, &SolverConfig::default()),
            Err(Error::NotRegularSymmetric(_))
        ));
    }

    #[test]
    fn odd_row_induction() {
        let one = RegularDecomposition {
            order: 3,
            terms: vec![RegularTerm { alpha: 1.0, nhat: z(1.0) }],
            residual: 0.0,
        };
        let a = one.expand(4).unwrap();
        assert!(check_odd_regular(&a, &one).unwrap());

        let pair = RegularDecomposition {
            order: 3,
            terms: vec![
                RegularTerm { alpha: 0.5, nhat: z(1.0) },
                RegularTerm { alpha: 0.5, nhat: z(-1.0) },
            ],
            residual: 0.0,
        };
        let b = two_pole(3);
        assert!(check_odd_regular(&b, &pair).unwrap());

        let mut vals = b.values().to_vec();
        let r = b.layout().rank(&[0, 0, 3]);
        vals[r] += 0.1;
        let perturbed = b.with_values(vals);
        assert!(!check_odd_regular(&perturbed, &pair).unwrap());
        assert!(check_odd_regular(&two_pole(2), &pair).is_err());
    }

    #[test]
    fn cap_values() {
        assert_eq!(caratheodory_cap(3, 2), 22);
        assert_eq!(caratheodory_cap(3, 4), 127);
    }

    #[test]
    fn merging_collapses_neighbours() {
        let s = libm::sin(1e-4);
        let c = libm::cos(1e-4);
        let atoms = vec![
            RegularTerm { alpha: 1.0, nhat: vec![0.0, 0.0, 1.0] },
            RegularTerm { alpha: 1.0, nhat: vec![s, 0.0, c] },
            RegularTerm { alpha: 1.0, nhat: vec![1.0, 0.0, 0.0] },
        ];
        let merged = merge_close(atoms);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged[0].alpha + merged[1].alpha, 3.0);
    }
}

//! Sum-of-squares certificates by alternating projections.
//!
//! An even-order tensor `A` with `m = 2l` is SOS when a PSD matrix `G` over
//! the unscaled degree-`l` monomials satisfies, for every order-`2l`
//! multiset `mu`, `sum_{beta (+) gamma = mu} G[beta, gamma] = mult(mu) a_mu`.
//! The constraint groups partition the matrix cells, so the affine
//! projection is a uniform shift per group.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::decompose::RegularDecomposition;
use super::SolverConfig;
use crate::error::{Error, Result};
use crate::multiset::{Layout, MultiIndex, MAX_ORDER};
use crate::symtensor::SymTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SosStatus {
    Certified,
    /// Inconclusive: alternating projections cannot prove infeasibility.
    NotCertified,
}

/// A Gram matrix witnessing the SOS property.
#[derive(Debug, Clone, PartialEq)]
pub struct GramCertificate {
    pub half_order: usize,
    pub basis: Vec<MultiIndex>,
    pub gram: DMatrix<f64>,
    /// Largest absolute violation of the matching constraints.
    pub constraint_residual: f64,
    pub min_eigenvalue: f64,
}

/// Result of [`sos_check`]. The certificate is present only when certified;
/// the residuals describe the last iterate either way.
#[derive(Debug, Clone, PartialEq)]
pub struct SosOutcome {
    pub status: SosStatus,
    pub certificate: Option<GramCertificate>,
    pub iterations: usize,
    pub min_eigenvalue: f64,
    pub constraint_residual: f64,
}

/// Constraint bookkeeping for one `(l, dim)` Gram system.
struct GramSystem {
    half: Layout,
    group: Vec<usize>,
    group_size: Vec<f64>,
}

impl GramSystem {
    fn new(half_order: usize, dim: usize, full: &Layout) -> Result<Self> {
        let half = Layout::new(half_order, dim)?;
        let m = half.len();
        let mut group = vec![0usize; m * m];
        let mut group_size = vec![0.0; full.len()];
        let mut buf = [0u8; MAX_ORDER];
        for b in 0..m {
            for c in 0..m {
                buf[..half_order].copy_from_slice(half.indices(b));
                buf[half_order..2 * half_order].copy_from_slice(half.indices(c));
                let mu = full.rank_unsorted(&buf[..2 * half_order]);
                group[b * m + c] = mu;
                group_size[mu] += 1.0;
            }
        }
        Ok(Self {
            half,
            group,
            group_size,
        })
    }

    fn size(&self) -> usize {
        self.half.len()
    }

    fn group_sums(&self, g: &DMatrix<f64>) -> Vec<f64> {
        let m = self.size();
        let mut sums = vec![0.0; self.group_size.len()];
        for b in 0..m {
            for c in 0..m {
                sums[self.group[b * m + c]] += g[(b, c)];
            }
        }
        sums
    }

    fn residual(&self, g: &DMatrix<f64>, target: &[f64]) -> f64 {
        self.group_sums(g)
            .iter()
            .zip(target)
            .fold(0.0, |w, (s, t)| w.max((s - t).abs()))
    }

    /// Frobenius-nearest matrix satisfying every matching constraint.
    fn project_affine(&self, g: &mut DMatrix<f64>, target: &[f64]) {
        let sums = self.group_sums(g);
        let shift: Vec<f64> = sums
            .iter()
            .zip(target)
            .zip(&self.group_size)
            .map(|((s, t), n)| (t - s) / n)
            .collect();
        let m = self.size();
        for b in 0..m {
            for c in 0..m {
                g[(b, c)] += shift[self.group[b * m + c]];
            }
        }
    }

    fn basis(&self) -> Vec<MultiIndex> {
        self.half
            .iter()
            .map(|i| MultiIndex::from_sorted(i.to_vec()))
            .collect()
    }
}

fn min_eigenvalue(g: &DMatrix<f64>) -> f64 {
    g.clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |m, &v| m.min(v))
}

/// Nearest PSD matrix: clip negative eigenvalues to zero.
fn project_psd(g: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = g.clone().symmetric_eigen();
    let clipped = eig.eigenvalues.map(|v| v.max(0.0));
    let q = &eig.eigenvectors;
    let p = q * DMatrix::from_diagonal(&clipped) * q.transpose();
    (&p + p.transpose()) * 0.5
}

fn targets(a: &SymTensor) -> Vec<f64> {
    a.entries().map(|(_, mult, v)| mult * v).collect()
}

fn half_order_of(a: &SymTensor) -> Result<usize> {
    if !a.order().is_multiple_of(2) || a.order() == 0 {
        return Err(Error::Parity {
            expected: "even",
            order: a.order(),
        });
    }
    Ok(a.order() / 2)
}

/// Alternating-projection iterations over which the constraint residual
/// must halve before the barrier method takes over.
const STALL_WINDOW: usize = 50;
const STALL_RATIO: f64 = 0.5;

/// Searches for a PSD Gram matrix by alternating the affine and PSD
/// projections from the minimum-norm affine point.
///
/// Certified when either the affine iterate has minimum eigenvalue at least
/// `-tol` or the PSD iterate violates the constraints by at most `tol`, where
/// `tol = tol_sos * min(1, s)` and `s` is the largest target coefficient.
///
/// Forms with real zeros have Gram sets with empty interior, where the
/// projections converge sublinearly. Once progress stalls the search
/// switches to a log-det barrier method on the affine family of Gram
/// matrices, maximizing the smallest eigenvalue.
pub fn sos_check(a: &SymTensor, cfg: &SolverConfig) -> Result<SosOutcome> {
    cfg.validate()?;
    let l = half_order_of(a)?;
    let system = GramSystem::new(l, a.dim(), a.layout())?;
    let target = targets(a);
    let scale = target.iter().fold(0.0f64, |m, t| m.max(t.abs())).max(f64::MIN_POSITIVE);
    let tol = cfg.tol_sos * scale.min(1.0);
    let m = system.size();

    let certified = |gram: DMatrix<f64>, it: usize| {
        let cert = certificate(&system, gram, &target);
        SosOutcome {
            status: SosStatus::Certified,
            iterations: it,
            min_eigenvalue: cert.min_eigenvalue,
            constraint_residual: cert.constraint_residual,
            certificate: Some(cert),
        }
    };

    let mut affine = DMatrix::<f64>::zeros(m, m);
    system.project_affine(&mut affine, &target);
    let mut last_min = min_eigenvalue(&affine);
    let mut last_res = f64::INFINITY;
    let mut window_start = f64::INFINITY;
    let mut it = 0;
    while it < cfg.max_iter {
        if last_min >= -tol {
            return Ok(certified(affine, it));
        }
        let psd = project_psd(&affine);
        last_res = system.residual(&psd, &target);
        if last_res <= tol {
            return Ok(certified(psd, it));
        }
        if it % STALL_WINDOW == 0 {
            if last_res > STALL_RATIO * window_start {
                break;
            }
            window_start = last_res;
        }
        affine = psd;
        system.project_affine(&mut affine, &target);
        last_min = min_eigenvalue(&affine);
        it += 1;
    }

    let budget = cfg.max_iter.saturating_sub(it).max(1);
    let (gram, steps) = barrier::max_min_eigenvalue(&system, &target, scale, tol, budget);
    it += steps;
    if let Some(gram) = gram {
        if min_eigenvalue(&gram) >= -tol && system.residual(&gram, &target) <= tol {
            return Ok(certified(gram, it));
        }
    }
    Ok(SosOutcome {
        status: SosStatus::NotCertified,
        certificate: None,
        iterations: it,
        min_eigenvalue: last_min,
        constraint_residual: last_res,
    })
}

mod barrier {
    //! Path following for `max s` subject to `G(y) - s I >= 0`, where `G(y)`
    //! ranges over the Gram matrices satisfying the matching constraints.

    use alloc::vec::Vec;

    use nalgebra::{DMatrix, DVector};

    use super::{min_eigenvalue, GramSystem};

    const MAX_OUTER: usize = 60;
    const MAX_NEWTON: usize = 50;
    const TAU_GROWTH: f64 = 4.0;

    /// Symmetric matrices spanning the kernel of the constraint map.
    fn free_directions(system: &GramSystem) -> Vec<DMatrix<f64>> {
        let m = system.size();
        let groups = system.group_size.len();
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|b| (b..m).map(move |c| (b, c))).collect();
        let mut cmat = DMatrix::<f64>::zeros(groups, pairs.len());
        for (k, &(b, c)) in pairs.iter().enumerate() {
            cmat[(system.group[b * m + c], k)] += if b == c { 1.0 } else { 2.0 };
        }
        let eig = (cmat.transpose() * &cmat).symmetric_eigen();
        let top = eig.eigenvalues.amax();
        (0..pairs.len())
            .filter(|&j| eig.eigenvalues[j] <= 1e-10 * top)
            .map(|j| {
                let mut n = DMatrix::<f64>::zeros(m, m);
                for (k, &(b, c)) in pairs.iter().enumerate() {
                    n[(b, c)] = eig.eigenvectors[(k, j)];
                    n[(c, b)] = eig.eigenvectors[(k, j)];
                }
                n
            })
            .collect()
    }

    fn assemble(g0: &DMatrix<f64>, dirs: &[DMatrix<f64>], y: &[f64]) -> DMatrix<f64> {
        let mut g = g0.clone();
        for (n, &yi) in dirs.iter().zip(y) {
            g += n * yi;
        }
        g
    }

    fn shifted(g: &DMatrix<f64>, s: f64) -> DMatrix<f64> {
        let mut out = g.clone();
        for i in 0..g.nrows() {
            out[(i, i)] -= s;
        }
        out
    }

    /// Solves `H x = g` for symmetric PSD `H`, adding a small ridge when
    /// rounding has made `H` numerically indefinite.
    fn solve_spd(h: DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
        if let Some(c) = h.clone().cholesky() {
            return Some(c.solve(g));
        }
        let top = h.diagonal().amax();
        for ridge in [1e-14, 1e-12, 1e-10] {
            let mut hr = h.clone();
            for i in 0..h.nrows() {
                hr[(i, i)] += ridge * top;
            }
            if let Some(c) = hr.cholesky() {
                return Some(c.solve(g));
            }
        }
        None
    }

    /// `log det` of a PD matrix, `None` otherwise.
    fn log_det(s: DMatrix<f64>) -> Option<f64> {
        let chol = s.cholesky()?;
        let l = chol.l_dirty();
        Some(2.0 * (0..l.nrows()).map(|i| libm::log(l[(i, i)])).sum::<f64>())
    }

    /// Returns a feasible Gram matrix with smallest eigenvalue `>= -tol`
    /// (in the units of `target`) if one is reached, and the Newton steps used.
    pub(super) fn max_min_eigenvalue(
        system: &GramSystem,
        target: &[f64],
        scale: f64,
        tol: f64,
        budget: usize,
    ) -> (Option<DMatrix<f64>>, usize) {
        let m = system.size();
        let unit: Vec<f64> = target.iter().map(|t| t / scale).collect();
        let tol = tol / scale;
        let mut g0 = DMatrix::<f64>::zeros(m, m);
        system.project_affine(&mut g0, &unit);
        let dirs = free_directions(system);
        let p = dirs.len();
        let mut y = alloc::vec![0.0; p];
        let mut s = min_eigenvalue(&g0) - 1.0;
        let mut tau = 1.0;
        let mut steps = 0;

        for _ in 0..MAX_OUTER {
            for _ in 0..MAX_NEWTON {
                if steps >= budget {
                    return (None, steps);
                }
                steps += 1;
                let g = assemble(&g0, &dirs, &y);
                let sm = shifted(&g, s);
                let Some(phi_log) = log_det(sm.clone()) else {
                    return (None, steps);
                };
                let phi = tau * s + phi_log;
                let Some(inv) = sm.cholesky().map(|c| c.inverse()) else {
                    return (None, steps);
                };
                // A_i = S^{-1} N_i; gradient tr(A_i), Hessian -tr(A_i A_j)
                let mm = m * m;
                let mut rows = DMatrix::<f64>::zeros(p + 1, mm);
                let mut rows_t = DMatrix::<f64>::zeros(p + 1, mm);
                let mut grad = DVector::<f64>::zeros(p + 1);
                for (i, n) in dirs.iter().enumerate() {
                    let ai = &inv * n;
                    grad[i] = ai.trace();
                    for r in 0..m {
                        for c in 0..m {
                            rows[(i, r * m + c)] = ai[(r, c)];
                            rows_t[(i, c * m + r)] = ai[(r, c)];
                        }
                    }
                }
                // the s direction is -I
                grad[p] = tau - inv.trace();
                for r in 0..m {
                    for c in 0..m {
                        rows[(p, r * m + c)] = -inv[(r, c)];
                        rows_t[(p, c * m + r)] = -inv[(r, c)];
                    }
                }
                let neg_hess = &rows * rows_t.transpose();
                let Some(dx) = solve_spd(neg_hess, &grad) else {
                    return (None, steps);
                };
                let dec = grad.dot(&dx);
                if dec < 1e-10 {
                    break;
                }
                let mut step = 1.0;
                loop {
                    let y2: Vec<f64> = y.iter().zip(dx.iter()).map(|(a, d)| a + step * d).collect();
                    let s2 = s + step * dx[p];
                    let trial = shifted(&assemble(&g0, &dirs, &y2), s2);
                    if let Some(ld) = log_det(trial) {
                        if tau * s2 + ld >= phi + 0.25 * step * dec {
                            y = y2;
                            s = s2;
                            break;
                        }
                    }
                    step *= 0.5;
                    if step < 1e-12 {
                        break;
                    }
                }
                if step < 1e-12 {
                    break;
                }
            }
            let g = assemble(&g0, &dirs, &y);
            if min_eigenvalue(&g) >= -tol {
                let g = (&g + g.transpose()) * (0.5 * scale);
                return (Some(g), steps);
            }
            // the optimal s is at most s + m / tau on the central path
            if s + m as f64 / tau < -tol {
                return (None, steps);
            }
            tau *= TAU_GROWTH;
        }
        (None, steps)
    }
}

fn certificate(system: &GramSystem, gram: DMatrix<f64>, target: &[f64]) -> GramCertificate {
    GramCertificate {
        half_order: system.half.order(),
        basis: system.basis(),
        constraint_residual: system.residual(&gram, target),
        min_eigenvalue: min_eigenvalue(&gram),
        gram,
    }
}

impl GramCertificate {
    /// Gram matrix `sum_k alpha_k z_k z_k^T` of a regular decomposition, with
    /// `z_k[beta] = mult(beta) v_k^beta` and `v_k = (1, nhat_k)`.
    pub fn from_decomposition(dec: &RegularDecomposition, a: &SymTensor) -> Result<Self> {
        let l = half_order_of(a)?;
        let system = GramSystem::new(l, a.dim(), a.layout())?;
        let m = system.size();
        let mut gram = DMatrix::<f64>::zeros(m, m);
        for term in &dec.terms {
            let mut v = Vec::with_capacity(a.dim());
            v.push(1.0);
            v.extend_from_slice(&term.nhat);
            let z: Vec<f64> = (0..m)
                .map(|b| {
                    let idx = system.half.indices(b);
                    system.half.multiplicity(b) * idx.iter().map(|&i| v[i as usize]).product::<f64>()
                })
                .collect();
            for b in 0..m {
                for c in 0..m {
                    gram[(b, c)] += term.alpha * z[b] * z[c];
                }
            }
        }
        Ok(certificate(&system, gram, &targets(a)))
    }

    /// Re-evaluates the matching constraints against `a`.
    pub fn check_against(&self, a: &SymTensor) -> Result<f64> {
        let l = half_order_of(a)?;
        let system = GramSystem::new(l, a.dim(), a.layout())?;
        if system.size() != self.gram.nrows() {
            return Err(Error::DimensionMismatch {
                expected: system.size(),
                found: self.gram.nrows(),
            });
        }
        Ok(system.residual(&self.gram, &targets(a)))
    }
}

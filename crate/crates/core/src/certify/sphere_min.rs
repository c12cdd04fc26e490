//! Multi-start minimization of homogeneous forms over unit spheres.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::SolverConfig;
use crate::error::{Error, Result};
use crate::sphere::{dot, normalize, random_unit, unit_net};
use crate::symtensor::SymTensor;

/// Best point found by a sphere search.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereMin {
    pub value: f64,
    pub point: Vec<f64>,
}

/// Seed-grid points promoted to full descents.
const GRID_STARTS: usize = 8;

const ARMIJO: f64 = 1e-4;

/// Riemannian gradient descent with backtracking on the unit sphere.
///
/// `f` returns the value at `x` and writes the ambient gradient into its
/// second argument. The returned value never exceeds `f(start)`.
fn descend<F>(f: &mut F, start: &[f64], max_iter: usize, gtol: f64) -> SphereMin
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let k = start.len();
    let mut x = start.to_vec();
    normalize(&mut x);
    let mut g = vec![0.0; k];
    let mut fx = f(&x, &mut g);
    let mut y = vec![0.0; k];
    let mut gy = vec![0.0; k];
    let mut rg = vec![0.0; k];
    let mut step = 1.0 / (1.0 + libm::sqrt(dot(&g, &g)));
    for _ in 0..max_iter {
        let gx = dot(&g, &x);
        for i in 0..k {
            rg[i] = g[i] - gx * x[i];
        }
        let gn2 = dot(&rg, &rg);
        if libm::sqrt(gn2) <= gtol {
            break;
        }
        let mut accepted = false;
        while step > 1e-18 {
            for i in 0..k {
                y[i] = x[i] - step * rg[i];
            }
            normalize(&mut y);
            let fy = f(&y, &mut gy);
            if fy <= fx - ARMIJO * step * gn2 {
                let decrease = fx - fy;
                core::mem::swap(&mut x, &mut y);
                core::mem::swap(&mut g, &mut gy);
                fx = fy;
                step *= 2.0;
                accepted = true;
                // stalled in floating point
                if decrease <= f64::EPSILON * fx.abs().max(gtol) {
                    return SphereMin { value: fx, point: x };
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    SphereMin { value: fx, point: x }
}

/// Runs `descend` from the signed axes, `cfg.starts` random points and the
/// best points of a `cfg.grid_size` net, returning the overall best.
fn multi_start<F>(f: &mut F, dim: usize, cfg: &SolverConfig, stream: u64, gtol: f64) -> SphereMin
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let mut starts: Vec<Vec<f64>> = Vec::new();
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; dim];
            e[i] = s;
            starts.push(e);
        }
    }
    for _ in 0..cfg.starts {
        starts.push(random_unit(&mut rng, dim));
    }

    let mut scratch = vec![0.0; dim];
    let mut scored: Vec<(f64, Vec<f64>)> = unit_net(dim, cfg.grid_size, &mut rng)
        .into_iter()
        .map(|p| (f(&p, &mut scratch), p))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    starts.extend(scored.into_iter().take(GRID_STARTS).map(|(_, p)| p));

    let mut best: Option<SphereMin> = None;
    for s in &starts {
        let cand = descend(f, s, cfg.max_iter, gtol);
        if best.as_ref().is_none_or(|b| cand.value < b.value) {
            best = Some(cand);
        }
    }
    best.expect("at least one start")
}

/// Smallest value of `A . x^m` over the unit sphere found by multi-start
/// projected gradient descent. For even order this is the minimum
/// Z-eigenvalue; for odd order it equals minus the maximum.
///
/// Heuristic: the result is an upper bound on the true minimum.
pub fn min_z_eig(a: &SymTensor, cfg: &SolverConfig) -> Result<SphereMin> {
    cfg.validate()?;
    if a.order() == 0 {
        return Err(Error::OrderTooSmall { min: 1, found: 0 });
    }
    let gtol = 1e-11 * a.scale() * a.order() as f64;
    let mut f = |x: &[f64], g: &mut [f64]| a.value_and_gradient_into(x, g);
    Ok(multi_start(&mut f, a.dim(), cfg, 1, gtol))
}

/// Smallest value of `g(nhat) = A . (1, nhat)^m` over unit `nhat`. The
/// returned point is `nhat`. A negative value rules out a regular
/// decomposition, since each term contributes `alpha (1 + nhat_k . nhat)^m >= 0`.
pub fn restricted_min(a: &SymTensor, cfg: &SolverConfig) -> Result<SphereMin> {
    cfg.validate()?;
    if a.order() == 0 {
        return Err(Error::OrderTooSmall { min: 1, found: 0 });
    }
    let d = a.dim();
    let mut x = vec![0.0; d];
    let mut gx = vec![0.0; d];
    x[0] = 1.0;
    let gtol = 1e-11 * a.scale() * a.order() as f64;
    let mut f = |y: &[f64], g: &mut [f64]| {
        x[1..].copy_from_slice(y);
        let v = a.value_and_gradient_into(&x, &mut gx);
        g.copy_from_slice(&gx[1..]);
        v
    };
    Ok(multi_start(&mut f, d - 1, cfg, 2, gtol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn identity_has_unit_minimum() {
        let a = SymTensor::make(2, 4, (0..4).map(|i| (vec![i, i], 1.0))).unwrap();
        let r = min_z_eig(&a, &cfg()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_square_reaches_zero() {
        let a = SymTensor::outer_power(&[1.0, 0.0, 0.0, 1.0], 2).unwrap();
        let r = min_z_eig(&a, &cfg()).unwrap();
        assert!(r.value.abs() < 1e-12);
        assert!((r.point[0] + r.point[3]).abs() < 1e-6);
    }

    #[test]
    fn restricted_examples() {
        let a = SymTensor::outer_power(&[1.0, 0.0, 0.0, 1.0], 3).unwrap();
        let r = restricted_min(&a, &cfg()).unwrap();
        assert!(r.value.abs() < 1e-9 && r.value > -1e-12);
        assert!((r.point[2] + 1.0).abs() < 1e-3);

        let bad = SymTensor::make(1, 4, [(vec![0], 1.0), (vec![3], 1.5)]).unwrap();
        let r = restricted_min(&bad, &cfg()).unwrap();
        assert!((r.value + 0.5).abs() < 1e-12);
        assert!((r.point[2] + 1.0).abs() < 1e-6);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = SymTensor::make(
            4,
            4,
            [(vec![0, 0, 0, 0], 1.0), (vec![0, 1, 2, 3], -0.3), (vec![1, 1, 3, 3], 0.2)],
        )
        .unwrap();
        let c = cfg();
        assert_eq!(min_z_eig(&a, &c).unwrap(), min_z_eig(&a, &c).unwrap());
    }
}

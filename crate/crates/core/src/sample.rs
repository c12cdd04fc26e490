//! Random generators for states, tensors and rotations.
//!
//! All generators draw from a caller-supplied RNG so that results are
//! reproducible from a seed.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::certify::{CdDecomposition, CdTerm, RegularDecomposition, RegularTerm};
use crate::error::{Error, Result};
use crate::sphere::random_unit;
use crate::spinmap::{ComplexMatrix, CoherentLabel, DensityMatrix, MixtureTerm, MAX_SPINS};
use crate::symtensor::SymTensor;
use num_complex::Complex64;

fn gauss<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Label whose Bloch direction is uniform on the sphere.
pub fn random_label<R: Rng + ?Sized>(rng: &mut R) -> CoherentLabel {
    let d = random_unit(rng, 3);
    CoherentLabel::from_direction(&[d[0], d[1], d[2]]).expect("unit direction")
}

/// Flat Dirichlet weights (uniform on the simplex).
pub fn dirichlet_weights<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..count)
        .map(|_| {
            let e: f64 = Exp1.sample(rng);
            e.max(f64::MIN_POSITIVE)
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|e| e / total).collect()
}

/// Largest mixture size drawn by [`random_classical`] for `n` spins.
pub fn max_mixture_terms(n: usize) -> usize {
    (n + 1) * (n + 1) + 1
}

/// A random classical state: `terms` coherent states with uniform directions
/// and flat Dirichlet weights. Requires `1 <= terms <= (n+1)^2 + 1`.
pub fn random_classical<R: Rng + ?Sized>(rng: &mut R, n: usize, terms: usize) -> Result<Vec<MixtureTerm>> {
    if n == 0 || n > MAX_SPINS {
        return Err(Error::SpinCountOutOfRange(n));
    }
    if terms == 0 || terms > max_mixture_terms(n) {
        return Err(Error::InvalidArgument(alloc::format!(
            "terms must lie in 1..={}, got {terms}",
            max_mixture_terms(n)
        )));
    }
    let weights = dirichlet_weights(rng, terms);
    Ok(weights
        .into_iter()
        .map(|weight| MixtureTerm {
            weight,
            label: random_label(rng),
        })
        .collect())
}

/// Haar-random unit vector in `C^dim`.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| Complex64::new(gauss(rng), gauss(rng))).collect();
        let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Random density matrix on the `(n+1)`-dimensional symmetric sector:
/// `G G^dagger / tr` for a complex Gaussian `G` of random rank.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<DensityMatrix> {
    if n == 0 || n > MAX_SPINS {
        return Err(Error::SpinCountOutOfRange(n));
    }
    let d = n + 1;
    let rank = rng.random_range(1..=d);
    let mut g = ComplexMatrix::zeros(d, rank);
    for i in 0..d {
        for j in 0..rank {
            g[(i, j)] = Complex64::new(gauss(rng), gauss(rng));
        }
    }
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    DensityMatrix::new(n, rho.scaled(Complex64::new(1.0 / tr, 0.0)))
}

/// Haar-random orthogonal `n x n` matrix (QR of a Gaussian matrix with the
/// sign of `R`'s diagonal absorbed). With `proper`, the determinant is `+1`.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize, proper: bool) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| gauss(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    if proper && q.determinant() < 0.0 {
        for i in 0..n {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

/// Haar-random rotation (determinant `+1`).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    random_orthogonal(rng, n, true)
}

/// Random regular decomposition in dimension 4 with exponential weights.
pub fn random_regular<R: Rng + ?Sized>(rng: &mut R, order: usize, terms: usize) -> RegularDecomposition {
    let terms = (0..terms)
        .map(|_| {
            let e: f64 = Exp1.sample(rng);
            RegularTerm {
                alpha: e + 1e-3,
                nhat: random_unit(rng, 3),
            }
        })
        .collect();
    RegularDecomposition {
        order,
        terms,
        residual: 0.0,
    }
}

/// Random completely decomposable tensor with explicit terms: each vector is
/// either a regular vector `(1, nhat)` or a standard Gaussian vector.
pub fn random_cd_tensor<R: Rng + ?Sized>(
    rng: &mut R,
    order: usize,
    dim: usize,
    terms: usize,
) -> Result<CdDecomposition> {
    let terms = (0..terms)
        .map(|_| {
            let vector = if dim >= 2 && rng.random_bool(0.5) {
                let mut v = Vec::with_capacity(dim);
                v.push(1.0);
                v.extend(random_unit(rng, dim - 1));
                v
            } else {
                (0..dim).map(|_| gauss(rng)).collect()
            };
            CdTerm {
                weight: Exp1.sample(rng),
                vector,
            }
        })
        .collect();
    CdDecomposition::new(order, dim, terms)
}

/// Random sum-of-squares tensor `sum_k (B_k . x^l)^2` with Gaussian
/// order-`l` tensors `B_k`, where `order = 2l`.
pub fn random_sos_tensor<R: Rng + ?Sized>(rng: &mut R, order: usize, dim: usize, terms: usize) -> Result<SymTensor> {
    if order == 0 || !order.is_multiple_of(2) {
        return Err(Error::Parity {
            expected: "even",
            order,
        });
    }
    let mut acc = SymTensor::zeros(order, dim)?;
    for _ in 0..terms {
        let b = SymTensor::from_fn(order / 2, dim, |_| gauss(rng))?;
        acc = &acc + &b.square_form()?;
    }
    Ok(acc)
}

//! Deterministic point sets on spheres and small vector helpers.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Scales `a` to unit length in place; returns the original norm.
pub fn normalize(a: &mut [f64]) -> f64 {
    let n = norm(a);
    if n > 0.0 {
        a.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Fibonacci lattice on the unit 2-sphere.
pub fn fibonacci_sphere(count: usize) -> Vec<[f64; 3]> {
    let golden_angle = PI * (3.0 - libm::sqrt(5.0));
    (0..count)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / count as f64;
            let r = libm::sqrt((1.0 - z * z).max(0.0));
            let phi = golden_angle * i as f64;
            [r * libm::cos(phi), r * libm::sin(phi), z]
        })
        .collect()
}

/// Low-discrepancy net on the unit 3-sphere in R^4.
///
/// A Kronecker sequence in the unit cube (generalized golden ratio for three
/// dimensions) pushed through the volume-preserving Hopf parametrization.
pub fn s3_net(count: usize) -> Vec<[f64; 4]> {
    // real root of x^4 = x + 1
    let g = 1.220_744_084_605_759_5_f64;
    let steps = [1.0 / g, 1.0 / (g * g), 1.0 / (g * g * g)];
    (0..count)
        .map(|i| {
            let u: Vec<f64> = steps
                .iter()
                .map(|s| {
                    let v = 0.5 + s * (i + 1) as f64;
                    v - libm::floor(v)
                })
                .collect();
            let r1 = libm::sqrt(1.0 - u[0]);
            let r2 = libm::sqrt(u[0]);
            let t1 = 2.0 * PI * u[1];
            let t2 = 2.0 * PI * u[2];
            [
                r1 * libm::sin(t1),
                r1 * libm::cos(t1),
                r2 * libm::sin(t2),
                r2 * libm::cos(t2),
            ]
        })
        .collect()
}

/// Evenly spaced points on the unit circle.
pub fn circle(count: usize) -> Vec<[f64; 2]> {
    (0..count)
        .map(|i| {
            let t = 2.0 * PI * (i as f64 + 0.5) / count as f64;
            [libm::cos(t), libm::sin(t)]
        })
        .collect()
}

/// Uniformly distributed random unit vector in R^dim.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        if normalize(&mut v) > 1e-12 {
            return v;
        }
    }
}

/// `count` directions on the unit sphere of R^dim: structured nets for
/// dimensions 2, 3 and 4, seeded random points otherwise.
pub fn unit_net<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Vec<Vec<f64>> {
    match dim {
        2 => circle(count).iter().map(|p| p.to_vec()).collect(),
        3 => fibonacci_sphere(count).iter().map(|p| p.to_vec()).collect(),
        4 => s3_net(count).iter().map(|p| p.to_vec()).collect(),
        _ => (0..count).map(|_| random_unit(rng, dim)).collect(),
    }
}

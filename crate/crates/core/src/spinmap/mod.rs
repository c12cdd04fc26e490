//! Spin-j states as symmetric tensors.
//!
//! A spin-j state lives on the symmetric subspace of `N = 2j` qubits,
//! spanned by the Dicke states `|D_N^(k)>` with `k` counting the `|0>`
//! factors (`m = k - N/2`, so `k = N` is the fully polarized `|j, j>`).
//! Density matrices are stored in this Dicke ordering `k = 0..=N`.
//!
//! The representing tensor of `rho` has entries `a[i_1..i_N] = tr(rho S_{i_1..i_N})`
//! where `S` is the Pauli string `sigma_{i_1} (x) .. (x) sigma_{i_N}` compressed
//! to the symmetric subspace. The inverse map is
//! `rho = 2^{-N} sum_{all tuples} a S`.

mod matrix;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::multiset::{binomial, Layout};
use crate::symtensor::{SymTensor, DEFAULT_STRUCTURAL_TOL};

pub use matrix::{ComplexMatrix, C64};
use matrix::{I, ONE, ZERO};

/// Largest supported spin count `N = 2j`.
pub const MAX_SPINS: usize = 10;

/// Hermiticity and positivity tolerance applied on ingestion.
pub const DENSITY_TOL: f64 = 1e-10;

fn check_spins(n: usize) -> Result<()> {
    if (1..=MAX_SPINS).contains(&n) {
        Ok(())
    } else {
        Err(Error::SpinCountOutOfRange(n))
    }
}

/// The Pauli matrix `sigma_i`, `i` in `0..=3` (`sigma_0` is the identity).
pub fn pauli(i: usize) -> Result<ComplexMatrix> {
    let data = match i {
        0 => vec![ONE, ZERO, ZERO, ONE],
        1 => vec![ZERO, ONE, ONE, ZERO],
        2 => vec![ZERO, -I, I, ZERO],
        3 => vec![ONE, ZERO, ZERO, -ONE],
        _ => return Err(Error::PauliIndex(i)),
    };
    ComplexMatrix::from_row_major(2, 2, data)
}

/// Applies `sigma_p` to the computational basis ket `|bit>`: returns the new
/// bit and the amplitude.
fn pauli_on_bit(p: u8, bit: usize) -> (usize, C64) {
    match (p, bit) {
        (0, b) => (b, ONE),
        (1, b) => (b ^ 1, ONE),
        (2, 0) => (1, I),
        (2, _) => (0, -I),
        (3, 0) => (0, ONE),
        (_, _) => (1, -ONE),
    }
}

/// Computational-basis bit of qubit `q` (qubit 0 is the leftmost factor).
fn qubit_bit(basis: usize, q: usize, n: usize) -> usize {
    (basis >> (n - 1 - q)) & 1
}

fn dicke_norm(n: usize, k: usize) -> f64 {
    1.0 / libm::sqrt(binomial(n, k) as f64)
}

fn dicke_k(basis: usize, n: usize) -> usize {
    n - basis.count_ones() as usize
}

/// The Dicke state `|D_N^(k)>` in the `2^N`-dimensional qubit space: the
/// normalized symmetric superposition of kets with `k` zeros and `N - k` ones.
pub fn dicke_state(n: usize, k: usize) -> Result<Vec<C64>> {
    check_spins(n)?;
    if k > n {
        return Err(Error::DickeIndex { n, k });
    }
    let amp = C64::new(dicke_norm(n, k), 0.0);
    Ok((0..1usize << n)
        .map(|b| if dicke_k(b, n) == k { amp } else { ZERO })
        .collect())
}

/// The projector onto the symmetric subspace, `sum_k |D_k><D_k|`.
pub fn symmetric_projector(n: usize) -> Result<ComplexMatrix> {
    let mut p = ComplexMatrix::zeros(1 << n, 1 << n);
    for k in 0..=n {
        let d = dicke_state(n, k)?;
        p = &p + &ComplexMatrix::projector(&d);
    }
    Ok(p)
}

/// Pauli strings compressed to the symmetric subspace, one per canonical multiset.
#[derive(Debug, Clone)]
pub struct SFrame {
    spins: usize,
    layout: Layout,
    matrices: Vec<ComplexMatrix>,
}

impl SFrame {
    /// Builds every `S_{i_1..i_N}` from Dicke-basis matrix elements of the
    /// explicit `N`-qubit Pauli string.
    pub fn new(n: usize) -> Result<Self> {
        check_spins(n)?;
        let layout = Layout::new(n, 4)?;
        let dim = 1usize << n;
        let matrices = layout
            .iter()
            .map(|string| {
                let mut s = ComplexMatrix::zeros(n + 1, n + 1);
                for b in 0..dim {
                    // <D_k| sigma |b> for the single ket b in the support of D_l
                    let l = dicke_k(b, n);
                    let mut out = 0usize;
                    let mut amp = ONE;
                    for (q, &p) in string.iter().enumerate() {
                        let (bit, a) = pauli_on_bit(p, qubit_bit(b, q, n));
                        out |= bit << (n - 1 - q);
                        amp *= a;
                    }
                    let k = dicke_k(out, n);
                    s[(k, l)] += amp * (dicke_norm(n, k) * dicke_norm(n, l));
                }
                s
            })
            .collect();
        Ok(Self {
            spins: n,
            layout,
            matrices,
        })
    }

    pub fn spins(&self) -> usize {
        self.spins
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// `S` for any ordering of the Pauli indices.
    pub fn get(&self, idx: &[usize]) -> Result<&ComplexMatrix> {
        if idx.len() != self.spins {
            return Err(Error::IndexLength {
                expected: self.spins,
                found: idx.len(),
            });
        }
        let mut sorted = Vec::with_capacity(idx.len());
        for &i in idx {
            if i > 3 {
                return Err(Error::PauliIndex(i));
            }
            sorted.push(i as u8);
        }
        sorted.sort_unstable();
        Ok(&self.matrices[self.layout.rank(&sorted)])
    }

    /// Iterates `(sorted indices, multiplicity, S)`.
    pub fn iter(&self) -> impl Iterator<Item = (&[u8], f64, &ComplexMatrix)> + '_ {
        (0..self.matrices.len()).map(move |r| {
            (
                self.layout.indices(r),
                self.layout.multiplicity(r),
                &self.matrices[r],
            )
        })
    }

    /// Canonical matrices keyed by multiset.
    pub fn to_map(&self) -> BTreeMap<Vec<u8>, ComplexMatrix> {
        self.iter().map(|(k, _, s)| (k.to_vec(), s.clone())).collect()
    }

    /// `a = tr(rho S)` for every multiset.
    pub fn density_to_tensor(&self, rho: &DensityMatrix) -> Result<SymTensor> {
        if rho.spins != self.spins {
            return Err(Error::DimensionMismatch {
                expected: self.spins,
                found: rho.spins,
            });
        }
        let mut values = Vec::with_capacity(self.matrices.len());
        for s in &self.matrices {
            let t = rho.matrix.trace_product(s);
            if t.im.abs() > DENSITY_TOL {
                return Err(Error::ComplexTrace(t.im));
            }
            values.push(t.re);
        }
        let layout = alloc::sync::Arc::new(self.layout.clone());
        Ok(SymTensor::from_layout(layout, values))
    }

    /// `rho = 2^{-N} sum_{all tuples} a S`.
    pub fn tensor_to_density(&self, a: &SymTensor) -> Result<DensityReconstruction> {
        if a.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: a.dim(),
            });
        }
        if a.order() != self.spins {
            return Err(Error::DimensionMismatch {
                expected: self.spins,
                found: a.order(),
            });
        }
        let n = self.spins;
        let norm = 1.0 / (1u64 << n) as f64;
        let mut rho = ComplexMatrix::zeros(n + 1, n + 1);
        for ((_, mult, s), &v) in self.iter().zip(a.values()) {
            if v != 0.0 {
                rho = &rho + &s.scaled(C64::new(mult * v * norm, 0.0));
            }
        }
        let tol = DEFAULT_STRUCTURAL_TOL * a.scale();
        Ok(DensityReconstruction {
            density: DensityMatrix::hermitian(n, rho)?,
            regular_symmetric: a.is_regular_symmetric(tol),
        })
    }
}

/// A Hermitian operator on the spin-j space in the Dicke basis.
///
/// [`DensityMatrix::new`] also enforces positivity; the trace is left free
/// so unnormalized states are admitted.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    spins: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates size, Hermiticity and positive semidefiniteness.
    pub fn new(spins: usize, matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::hermitian(spins, matrix)?;
        let min = rho.min_eigenvalue();
        if min < -DENSITY_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(rho)
    }

    /// Validates size and Hermiticity only.
    pub fn hermitian(spins: usize, matrix: ComplexMatrix) -> Result<Self> {
        check_spins(spins)?;
        if matrix.rows() != spins + 1 || matrix.cols() != spins + 1 {
            return Err(Error::DimensionMismatch {
                expected: spins + 1,
                found: matrix.rows(),
            });
        }
        let defect = matrix.hermitian_defect();
        if defect > DENSITY_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { spins, matrix })
    }

    /// `|psi><psi|` for Dicke-basis amplitudes `psi` of length `N + 1`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        if psi.len() < 2 {
            return Err(Error::SpinCountOutOfRange(0));
        }
        Self::new(psi.len() - 1, ComplexMatrix::projector(psi))
    }

    pub fn spins(&self) -> usize {
        self.spins
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix.hermitian_eigenvalues()[0]
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// `<psi| rho |psi>`
    pub fn expectation(&self, psi: &[C64]) -> f64 {
        let r = self.matrix.apply(psi);
        psi.iter().zip(&r).map(|(a, b)| a.conj() * b).sum::<C64>().re
    }

    /// `U rho U^dagger`
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::hermitian(self.spins, &(u * &self.matrix) * &u.adjoint())
    }
}

/// Output of [`tensor_to_density`]: the operator plus whether the input
/// satisfied regular symmetry. Positivity is not checked.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityReconstruction {
    pub density: DensityMatrix,
    pub regular_symmetric: bool,
}

/// Polar and azimuthal angles of a spin coherent state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentLabel {
    theta: f64,
    phi: f64,
}

impl CoherentLabel {
    /// `theta` in `[0, pi]`; `phi` is reduced into `[0, 2 pi)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::NonFinite(alloc::format!("({theta}, {phi})")));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidArgument(alloc::format!(
                "theta {theta} outside [0, pi]"
            )));
        }
        let mut phi = phi % (2.0 * PI);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    /// Label of the unit direction `nhat` (need not be exactly normalized).
    pub fn from_direction(nhat: &[f64; 3]) -> Result<Self> {
        let r = crate::sphere::norm(nhat);
        if r == 0.0 {
            return Err(Error::InvalidArgument("zero direction".into()));
        }
        let theta = libm::acos((nhat[2] / r).clamp(-1.0, 1.0));
        let phi = libm::atan2(nhat[1], nhat[0]);
        Self::new(theta, phi)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Bloch direction `(sin t cos p, sin t sin p, cos t)`.
pub fn bloch_direction(label: CoherentLabel) -> [f64; 3] {
    let (st, ct) = (libm::sin(label.theta), libm::cos(label.theta));
    let (sp, cp) = (libm::sin(label.phi), libm::cos(label.phi));
    [st * cp, st * sp, ct]
}

/// Dicke-basis amplitudes of the coherent state: the component at
/// `k = m + N/2` is `sqrt(C(N, k)) cos(t/2)^k (sin(t/2) e^{i p})^{N-k}`.
pub fn coherent_vector(n: usize, label: CoherentLabel) -> Result<Vec<C64>> {
    check_spins(n)?;
    let c = libm::cos(label.theta / 2.0);
    let s = C64::from_polar(libm::sin(label.theta / 2.0), label.phi);
    Ok((0..=n)
        .map(|k| {
            let mut amp = C64::new(libm::sqrt(binomial(n, k) as f64) * libm::pow(c, k as f64), 0.0);
            for _ in 0..n - k {
                amp *= s;
            }
            amp
        })
        .collect())
}

/// Representing tensor of `rho` using a fresh S-frame.
pub fn density_to_tensor(rho: &DensityMatrix) -> Result<SymTensor> {
    SFrame::new(rho.spins())?.density_to_tensor(rho)
}

/// Operator reconstructed from a dimension-4 tensor using a fresh S-frame.
pub fn tensor_to_density(a: &SymTensor) -> Result<DensityReconstruction> {
    if a.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: a.dim(),
        });
    }
    SFrame::new(a.order())?.tensor_to_density(a)
}

/// The rank-one tensor `(1, nhat)^{(x) N}` of a coherent state.
pub fn coherent_tensor(n: usize, label: CoherentLabel) -> Result<SymTensor> {
    check_spins(n)?;
    let d = bloch_direction(label);
    SymTensor::outer_power(&[1.0, d[0], d[1], d[2]], n)
}

/// One term `w |alpha><alpha|` of a classical mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureTerm {
    pub weight: f64,
    pub label: CoherentLabel,
}

/// `rho = sum w |alpha><alpha|` and its tensor `sum w (1, nhat)^{(x) N}`, each
/// built along its own route.
pub fn classical_mixture(n: usize, terms: &[MixtureTerm]) -> Result<(DensityMatrix, SymTensor)> {
    check_spins(n)?;
    if terms.is_empty() {
        return Err(Error::EmptyMixture);
    }
    let mut rho = ComplexMatrix::zeros(n + 1, n + 1);
    let mut tensor = SymTensor::zeros(n, 4)?;
    for t in terms {
        if !t.weight.is_finite() {
            return Err(Error::NonFinite(alloc::format!("{}", t.weight)));
        }
        if t.weight < 0.0 {
            return Err(Error::NegativeWeight(t.weight));
        }
        let psi = coherent_vector(n, t.label)?;
        rho = &rho + &ComplexMatrix::projector(&psi).scaled(C64::new(t.weight, 0.0));
        tensor = tensor.axpy(t.weight, &coherent_tensor(n, t.label)?)?;
    }
    Ok((DensityMatrix::new(n, rho)?, tensor))
}

/// The 3x3 rotation by `angle` about the unit `axis` (right-handed).
pub fn rotation_matrix(axis: &[f64; 3], angle: f64) -> Result<DMatrix<f64>> {
    let mut k = *axis;
    if crate::sphere::normalize(&mut k) == 0.0 {
        return Err(Error::InvalidArgument("zero rotation axis".into()));
    }
    let (s, c) = (libm::sin(angle), libm::cos(angle));
    let t = 1.0 - c;
    Ok(DMatrix::from_row_slice(
        3,
        3,
        &[
            c + k[0] * k[0] * t,
            k[0] * k[1] * t - k[2] * s,
            k[0] * k[2] * t + k[1] * s,
            k[1] * k[0] * t + k[2] * s,
            c + k[1] * k[1] * t,
            k[1] * k[2] * t - k[0] * s,
            k[2] * k[0] * t - k[1] * s,
            k[2] * k[1] * t + k[0] * s,
            c + k[2] * k[2] * t,
        ],
    ))
}

/// The spin-j representation of the rotation `exp(-i angle nhat . J)`, in the
/// Dicke basis.
///
/// Built as the N-fold tensor power of the spin-1/2 rotation
/// `cos(angle/2) - i sin(angle/2) nhat . sigma`, compressed to the symmetric
/// subspace.
pub fn spin_rotation(n: usize, axis: &[f64; 3], angle: f64) -> Result<ComplexMatrix> {
    check_spins(n)?;
    let mut k = *axis;
    if crate::sphere::normalize(&mut k) == 0.0 {
        return Err(Error::InvalidArgument("zero rotation axis".into()));
    }
    let (c, s) = (libm::cos(angle / 2.0), libm::sin(angle / 2.0));
    let mut half = pauli(0)?.scaled(C64::new(c, 0.0));
    for (i, &ki) in k.iter().enumerate() {
        half = &half + &pauli(i + 1)?.scaled(C64::new(0.0, -s * ki));
    }
    let dim = 1usize << n;
    let mut u = ComplexMatrix::zeros(n + 1, n + 1);
    for l in 0..=n {
        let mut state = dicke_state(n, l)?;
        for q in 0..n {
            let mut next = vec![ZERO; dim];
            for (b, &amp) in state.iter().enumerate() {
                if amp == ZERO {
                    continue;
                }
                let bit = qubit_bit(b, q, n);
                let cleared = b & !(1 << (n - 1 - q));
                for out_bit in 0..2 {
                    next[cleared | (out_bit << (n - 1 - q))] += half[(out_bit, bit)] * amp;
                }
            }
            state = next;
        }
        for k in 0..=n {
            let d = dicke_state(n, k)?;
            u[(k, l)] = d.iter().zip(&state).map(|(a, b)| a.conj() * b).sum();
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn pauli_matrices() {
        assert_eq!(pauli(0).unwrap(), ComplexMatrix::identity(2));
        let y = pauli(2).unwrap();
        assert_eq!(y[(0, 1)], -I);
        assert_eq!(y[(1, 0)], I);
        for i in 0..4 {
            let p = pauli(i).unwrap();
            assert_eq!(&p * &p, ComplexMatrix::identity(2));
        }
        assert!(matches!(pauli(4), Err(Error::PauliIndex(4))));
    }

    #[test]
    fn dicke_examples() {
        assert_eq!(dicke_state(1, 1).unwrap(), vec![ONE, ZERO]);
        assert_eq!(dicke_state(1, 0).unwrap(), vec![ZERO, ONE]);
        let h = 1.0 / libm::sqrt(2.0);
        let d = dicke_state(2, 1).unwrap();
        assert_eq!(d, vec![ZERO, c(h), c(h), ZERO]);
        for n in 1..=5 {
            for k in 0..=n {
                for l in 0..=n {
                    let a = dicke_state(n, k).unwrap();
                    let b = dicke_state(n, l).unwrap();
                    let ip: C64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
                    let expect = if k == l { 1.0 } else { 0.0 };
                    assert!((ip - c(expect)).norm() < TOL);
                }
            }
        }
        assert!(dicke_state(2, 3).is_err());
        assert!(dicke_state(11, 0).is_err());
    }

    #[test]
    fn s_frame_single_spin_is_reordered_pauli() {
        // Dicke order for N = 1 is (|1>, |0>)
        let frame = SFrame::new(1).unwrap();
        for i in 0..4 {
            let p = pauli(i).unwrap();
            let s = frame.get(&[i]).unwrap();
            for k in 0..2 {
                for l in 0..2 {
                    assert_eq!(s[(k, l)], p[(1 - k, 1 - l)]);
                }
            }
        }
    }

    #[test]
    fn s_frame_identity_and_hermitian() {
        for n in 1..=6 {
            let frame = SFrame::new(n).unwrap();
            let zeros = vec![0; n];
            assert!(frame
                .get(&zeros)
                .unwrap()
                .max_abs_diff(&ComplexMatrix::identity(n + 1))
                < TOL);
            for (_, _, s) in frame.iter() {
                assert!(s.is_hermitian(TOL));
            }
        }
    }

    #[test]
    fn s_frame_matches_dense_tensor_product() {
        // brute force: build sigma_i (x) sigma_j as a 4x4 matrix and sandwich
        // it between Dicke states
        let frame = SFrame::new(2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let big = pauli(i).unwrap().kron(&pauli(j).unwrap());
                let s = frame.get(&[i, j]).unwrap();
                for k in 0..3 {
                    for l in 0..3 {
                        let dk = dicke_state(2, k).unwrap();
                        let dl = dicke_state(2, l).unwrap();
                        let v = big.apply(&dl);
                        let e: C64 = dk.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                        assert!((e - s[(k, l)]).norm() < TOL);
                    }
                }
            }
        }
        // S_33 is diagonal with (1, -1, 1) in Dicke order
        let s33 = frame.get(&[3, 3]).unwrap();
        for k in 0..3 {
            let expect = if k == 1 { -1.0 } else { 1.0 };
            assert!((s33[(k, k)] - c(expect)).norm() < TOL);
        }
    }

    #[test]
    fn coherent_vector_examples() {
        let up = coherent_vector(3, CoherentLabel::new(0.0, 0.3).unwrap()).unwrap();
        assert!((up[3] - ONE).norm() < TOL);
        let down = coherent_vector(3, CoherentLabel::new(PI, 0.0).unwrap()).unwrap();
        assert!((down[0].norm() - 1.0).abs() < TOL);
        let h = coherent_vector(1, CoherentLabel::new(PI / 2.0, 0.0).unwrap()).unwrap();
        let r = 1.0 / libm::sqrt(2.0);
        assert!((h[0] - c(r)).norm() < TOL && (h[1] - c(r)).norm() < TOL);
        for n in 1..=6 {
            let v = coherent_vector(n, CoherentLabel::new(1.1, 4.0).unwrap()).unwrap();
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn bloch_direction_examples() {
        let z = bloch_direction(CoherentLabel::new(0.0, 0.0).unwrap());
        assert!((z[2] - 1.0).abs() < TOL && z[0].abs() < TOL && z[1].abs() < TOL);
        let x = bloch_direction(CoherentLabel::new(PI / 2.0, 0.0).unwrap());
        assert!((x[0] - 1.0).abs() < TOL && x[2].abs() < TOL);
    }

    #[test]
    fn label_validation() {
        assert!(CoherentLabel::new(-0.1, 0.0).is_err());
        assert!(CoherentLabel::new(4.0, 0.0).is_err());
        let l = CoherentLabel::new(1.0, -0.5).unwrap();
        assert!((l.phi() - (2.0 * PI - 0.5)).abs() < TOL);
        let back = CoherentLabel::from_direction(&bloch_direction(l)).unwrap();
        assert!((back.theta() - 1.0).abs() < 1e-12);
        assert!((back.phi() - l.phi()).abs() < 1e-12);
    }

    #[test]
    fn spin_up_and_maximally_mixed_single_spin() {
        // |0> is Dicke index k = 1
        let mut up = ComplexMatrix::zeros(2, 2);
        up[(1, 1)] = ONE;
        let a = density_to_tensor(&DensityMatrix::new(1, up.clone()).unwrap()).unwrap();
        assert_eq!(a.values(), &[1.0, 0.0, 0.0, 1.0]);

        let half = ComplexMatrix::identity(2).scaled(c(0.5));
        let a = density_to_tensor(&DensityMatrix::new(1, half.clone()).unwrap()).unwrap();
        assert_eq!(a.values(), &[1.0, 0.0, 0.0, 0.0]);

        let back = tensor_to_density(&SymTensor::make(1, 4, [(vec![0], 1.0), (vec![3], 1.0)]).unwrap())
            .unwrap();
        assert!(back.density.matrix().max_abs_diff(&up) < TOL);
        assert!(back.regular_symmetric);
        let back = tensor_to_density(&SymTensor::make(1, 4, [(vec![0], 1.0)]).unwrap()).unwrap();
        assert!(back.density.matrix().max_abs_diff(&half) < TOL);
    }

    #[test]
    fn coherent_state_gives_rank_one_tensor() {
        let label = CoherentLabel::new(PI / 2.0, 0.0).unwrap();
        let rho = DensityMatrix::pure(&coherent_vector(2, label).unwrap()).unwrap();
        let a = density_to_tensor(&rho).unwrap();
        let expect = SymTensor::outer_power(&[1.0, 1.0, 0.0, 0.0], 2).unwrap();
        assert!(a.max_abs_diff(&expect).unwrap() < 1e-12);
    }

    #[test]
    fn tensor_to_density_flags_irregular_input() {
        let diag = SymTensor::make(2, 4, (0..4).map(|i| (vec![i, i], 1.0))).unwrap();
        let r = tensor_to_density(&diag).unwrap();
        assert!(!r.regular_symmetric);
        assert!(r.density.matrix().is_hermitian(1e-12));
        let wrong_dim = SymTensor::zeros(2, 3).unwrap();
        assert!(tensor_to_density(&wrong_dim).is_err());
    }

    #[test]
    fn density_validation() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 1)] = ONE;
        assert!(matches!(DensityMatrix::new(1, m), Err(Error::NotHermitian(_))));
        let neg = ComplexMatrix::identity(2).scaled(c(-1.0));
        assert!(matches!(DensityMatrix::new(1, neg), Err(Error::NotPositive(_))));
        assert!(DensityMatrix::new(2, ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn mixture_examples() {
        let up = CoherentLabel::new(0.0, 0.0).unwrap();
        let down = CoherentLabel::new(PI, 0.0).unwrap();
        let (_, t) = classical_mixture(2, &[MixtureTerm { weight: 1.0, label: up }]).unwrap();
        assert_eq!(t, coherent_tensor(2, up).unwrap());
        let (rho, t) = classical_mixture(
            2,
            &[
                MixtureTerm { weight: 0.5, label: up },
                MixtureTerm { weight: 0.5, label: down },
            ],
        )
        .unwrap();
        let expect = &(&SymTensor::outer_power(&[1.0, 0.0, 0.0, 1.0], 2).unwrap() * 0.5)
            + &(&SymTensor::outer_power(&[1.0, 0.0, 0.0, -1.0], 2).unwrap() * 0.5);
        assert!(t.max_abs_diff(&expect).unwrap() < 1e-15);
        assert!(density_to_tensor(&rho).unwrap().max_abs_diff(&t).unwrap() < 1e-12);
        assert!(matches!(
            classical_mixture(2, &[MixtureTerm { weight: -1.0, label: up }]),
            Err(Error::NegativeWeight(_))
        ));
        assert!(matches!(classical_mixture(2, &[]), Err(Error::EmptyMixture)));
    }

    #[test]
    fn spin_rotation_moves_coherent_states() {
        // rotating |j, j> by theta about y lands on the coherent state (theta, 0)
        for n in 1..=4 {
            let u = spin_rotation(n, &[0.0, 1.0, 0.0], 0.9).unwrap();
            let up = coherent_vector(n, CoherentLabel::new(0.0, 0.0).unwrap()).unwrap();
            let rotated = u.apply(&up);
            let target = coherent_vector(n, CoherentLabel::new(0.9, 0.0).unwrap()).unwrap();
            let overlap: C64 = target.iter().zip(&rotated).map(|(a, b)| a.conj() * b).sum();
            assert!((overlap.norm() - 1.0).abs() < 1e-12, "n = {n}");
        }
    }
}

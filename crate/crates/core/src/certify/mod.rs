//! Cone-membership tests and the classicality verdict.
//!
//! Every solver here is heuristic. Only an explicit witness (a regular
//! symmetry defect or a point where a form is negative) ever yields
//! [`Status::NotClassical`]; failing to find a decomposition yields
//! [`Status::Unknown`].

mod cd;
mod decompose;
mod nnls;
mod sos;
mod sphere_min;

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use cd::{CdDecomposition, CdTerm};
pub use decompose::{
    caratheodory_cap, check_odd_regular, regular_decompose, DecomposeOutcome, DecompositionStatus,
    RegularDecomposition, RegularTerm, MERGE_ANGLE,
};
pub use nnls::nnls;
pub use sos::{sos_check, GramCertificate, SosOutcome, SosStatus};
pub use sphere_min::{min_z_eig, restricted_min, SphereMin};

use crate::error::{Error, Result};
use crate::sample::{random_cd_tensor, random_sos_tensor};
use crate::symtensor::{SymTensor, DEFAULT_STRUCTURAL_TOL};

/// Tuning knobs shared by every solver. All fields must be positive except
/// `seed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Directions in the decomposition dictionary and the optimizer seed net.
    pub grid_size: usize,
    /// Random starts for sphere minimization.
    pub starts: usize,
    pub max_iter: usize,
    pub tol_psd: f64,
    pub tol_sos: f64,
    pub tau_dec: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid_size: 400,
            starts: 64,
            max_iter: 5000,
            tol_psd: 1e-8,
            tol_sos: 1e-8,
            tau_dec: 1e-6,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(alloc::format!("{what} must be positive")));
        if self.grid_size == 0 {
            return bad("grid_size");
        }
        if self.starts == 0 {
            return bad("starts");
        }
        if self.max_iter == 0 {
            return bad("max_iter");
        }
        for (name, v) in [("tol_psd", self.tol_psd), ("tol_sos", self.tol_sos), ("tau_dec", self.tau_dec)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(name);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Classical,
    NotClassical,
    Unknown,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Classical => "Classical",
            Status::NotClassical => "NotClassical",
            Status::Unknown => "Unknown",
        }
    }
}

/// One step of the cascade with its numeric evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub name: &'static str,
    pub outcome: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    NotRegularSymmetric,
    NegativePoint,
    NegativeRegularPoint,
}

impl WitnessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WitnessKind::NotRegularSymmetric => "NotRegularSymmetric",
            WitnessKind::NegativePoint => "NegativePoint",
            WitnessKind::NegativeRegularPoint => "NegativeRegularPoint",
        }
    }
}

/// Evidence of non-classicality.
///
/// For `NegativePoint` the point is a unit `x` with `A . x^m = value`; for
/// `NegativeRegularPoint` it is `(1, nhat)`; for `NotRegularSymmetric` it is
/// the trailing multiset whose identity fails and `value` is the defect.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub status: Status,
    pub stages: Vec<Stage>,
    pub certificate: Option<RegularDecomposition>,
    pub witness: Option<Witness>,
}

/// Runs the classicality cascade on a representing tensor:
/// regular symmetry, minimum Z-eigenvalue (even order), restricted minimum,
/// SOS (even order, advisory) and finally the decomposition search.
///
/// Negativity thresholds are `cfg.tol_psd` relative to [`SymTensor::scale`].
pub fn classify(a: &SymTensor, cfg: &SolverConfig) -> Result<Verdict> {
    cfg.validate()?;
    if a.order() == 0 {
        return Err(Error::OrderTooSmall { min: 1, found: 0 });
    }
    let scale = a.scale();
    let neg_tol = cfg.tol_psd * scale;
    let even = a.order().is_multiple_of(2);
    let mut stages = Vec::new();
    let done = |status, stages, witness| Verdict {
        status,
        stages,
        certificate: None,
        witness,
    };

    let defect = a.regular_symmetry_defect();
    let defect_value = defect.as_ref().map_or(0.0, |(_, d)| *d);
    if defect_value.abs() > DEFAULT_STRUCTURAL_TOL * scale {
        stages.push(Stage {
            name: "regular_symmetry",
            outcome: "fail",
            value: defect_value,
        });
        let (tail, _) = defect.expect("defect present");
        let witness = Witness {
            kind: WitnessKind::NotRegularSymmetric,
            point: tail.iter().map(|&i| i as f64).collect(),
            value: defect_value,
        };
        return Ok(done(Status::NotClassical, stages, Some(witness)));
    }
    stages.push(Stage {
        name: "regular_symmetry",
        outcome: "pass",
        value: defect_value,
    });

    if even {
        let zmin = min_z_eig(a, cfg)?;
        let value = a.eval(&zmin.point)?;
        if value < -neg_tol {
            stages.push(Stage {
                name: "min_z_eig",
                outcome: "fail",
                value,
            });
            let witness = Witness {
                kind: WitnessKind::NegativePoint,
                point: zmin.point,
                value,
            };
            return Ok(done(Status::NotClassical, stages, Some(witness)));
        }
        stages.push(Stage {
            name: "min_z_eig",
            outcome: "pass",
            value,
        });
    } else {
        stages.push(Stage {
            name: "min_z_eig",
            outcome: "skipped",
            value: 0.0,
        });
    }

    let rmin = restricted_min(a, cfg)?;
    let mut x = Vec::with_capacity(a.dim());
    x.push(1.0);
    x.extend_from_slice(&rmin.point);
    let value = a.eval(&x)?;
    if value < -neg_tol {
        stages.push(Stage {
            name: "restricted_min",
            outcome: "fail",
            value,
        });
        let witness = Witness {
            kind: WitnessKind::NegativeRegularPoint,
            point: x,
            value,
        };
        return Ok(done(Status::NotClassical, stages, Some(witness)));
    }
    stages.push(Stage {
        name: "restricted_min",
        outcome: "pass",
        value,
    });

    if even {
        let sos = sos_check(a, cfg)?;
        stages.push(Stage {
            name: "sos",
            outcome: match sos.status {
                SosStatus::Certified => "certified",
                SosStatus::NotCertified => "not_certified",
            },
            value: sos.min_eigenvalue,
        });
    } else {
        stages.push(Stage {
            name: "sos",
            outcome: "skipped",
            value: 0.0,
        });
    }

    let dec = regular_decompose(a, cfg)?;
    let found = dec.status == DecompositionStatus::Found;
    stages.push(Stage {
        name: "decompose",
        outcome: if found { "found" } else { "not_found" },
        value: dec.best_residual(),
    });
    Ok(Verdict {
        status: if found { Status::Classical } else { Status::Unknown },
        stages,
        certificate: if found { dec.decomposition } else { None },
        witness: None,
    })
}

/// Summary of [`dual_pair_sample`].
#[derive(Debug, Clone, PartialEq)]
pub struct DualityReport {
    pub order: usize,
    pub pairs: usize,
    pub min_inner: f64,
    /// Pairs whose inner product fell below `-1e-8` relative to the norms.
    pub violations: usize,
}

/// Pairs `count` random completely decomposable tensors with `count` random
/// sum-of-squares tensors (both dimension 4) and records their inner
/// products, which duality requires to be nonnegative.
pub fn dual_pair_sample(order: usize, count: usize, seed: u64) -> Result<DualityReport> {
    if order == 0 || !order.is_multiple_of(2) {
        return Err(Error::Parity {
            expected: "even",
            order,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_inner = f64::INFINITY;
    let mut violations = 0;
    for _ in 0..count {
        let cd_terms = rng.random_range(1..=6);
        let cd = random_cd_tensor(&mut rng, order, 4, cd_terms)?.expand()?;
        let sos_terms = rng.random_range(1..=4);
        let psd = random_sos_tensor(&mut rng, order, 4, sos_terms)?;
        let ip = psd.inner(&cd)?;
        if ip < -1e-8 * psd.norm() * cd.norm() {
            violations += 1;
        }
        min_inner = min_inner.min(ip);
    }
    Ok(DualityReport {
        order,
        pairs: count,
        min_inner,
        violations,
    })
}

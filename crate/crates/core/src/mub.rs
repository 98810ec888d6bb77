//! The N+1 bases `|e_k^i⟩ = N^{-1/2} Σ_q χ(⊖(q⊙k))·φ_i(q)·|q⟩` (i = 1..N)
//! together with the computational basis (i = 0).

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::galois::{ArithmeticContext, Mode};
use crate::linalg::{Ket, Operator, C64};
use crate::pauli::{class_operators, PhaseSystem};

/// Class index, failing (class, operator, state) triples, worst eigenvalue modulus error.
type ClassResult = (usize, Vec<(usize, usize, usize)>, f64);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MubFamily {
    dim: usize,
    mode: Mode,
    p: usize,
    /// Column k of `bases[i]` is `|e_k^i⟩`.
    bases: Vec<Operator>,
}

impl MubFamily {
    pub fn build(ctx: &ArithmeticContext, phases: &PhaseSystem) -> Self {
        let n = ctx.dim();
        let norm = 1.0 / (n as f64).sqrt();
        let mut bases = vec![Operator::identity(n)];
        for class in 1..=n {
            bases.push(Operator::from_fn(n, |q, k| {
                ctx.chi(ctx.neg(ctx.mul(q, k))) * phases.phase(class, q) * norm
            }));
        }
        Self {
            dim: n,
            mode: ctx.mode(),
            p: ctx.p(),
            bases,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn num_bases(&self) -> usize {
        self.bases.len()
    }

    pub fn basis(&self, i: usize) -> &Operator {
        &self.bases[i]
    }

    pub fn bases(&self) -> &[Operator] {
        &self.bases
    }

    /// `|e_k^i⟩`.
    pub fn state(&self, i: usize, k: usize) -> Ket {
        self.bases[i].column(k)
    }

    /// `|e_k^{i*}⟩`, the entrywise conjugate.
    pub fn conj_state(&self, i: usize, k: usize) -> Ket {
        self.state(i, k).conj()
    }

    /// `|⟨e_k^a|e_l^b⟩|²` as a row-major N×N table.
    pub fn overlaps(&self, a: usize, b: usize) -> Vec<f64> {
        let g = &self.bases[a].adjoint() * &self.bases[b];
        g.to_rows().iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn unbiasedness_report(&self, tol: f64) -> UnbiasednessReport {
        let n = self.dim;
        let target = 1.0 / n as f64;
        let nb = self.num_bases();
        let index: Vec<(usize, usize)> = (0..nb)
            .flat_map(|a| (a + 1..nb).map(move |b| (a, b)))
            .collect();
        let pairs: Vec<PairOverlap> = index
            .par_iter()
            .map(|&(a, b)| {
                let ov = self.overlaps(a, b);
                let max = ov.iter().copied().fold(f64::MIN, f64::max);
                let min = ov.iter().copied().fold(f64::MAX, f64::min);
                let unbiased = ov.iter().all(|x| (x - target).abs() <= tol);
                PairOverlap {
                    a,
                    b,
                    max,
                    min,
                    unbiased,
                }
            })
            .collect();
        let orthonormal_bases = self.bases.iter().filter(|u| u.is_unitary(tol)).count();
        let unbiased_pairs = pairs.iter().filter(|p| p.unbiased).count();
        UnbiasednessReport {
            dim: n,
            total_pairs: pairs.len(),
            unbiased_pairs,
            orthonormal_bases,
            all_unbiased: unbiased_pairs == pairs.len(),
            conjecture_bound: (self.mode == Mode::Modular).then_some(self.p + 1),
            pairs,
        }
    }

    /// Checks `V_l^{(i−1)⊙l}|e_k^i⟩ = χ(l⊙k)·φ_i(l)·|e_k^i⟩` for every class,
    /// and `V_0^l|q⟩ = χ(q⊙l)|q⟩` for the computational basis.
    pub fn verify_eigenbasis(
        &self,
        ctx: &ArithmeticContext,
        phases: &PhaseSystem,
        tol: f64,
    ) -> EigenbasisReport {
        let n = self.dim;
        let results: Vec<ClassResult> = (0..=n)
            .into_par_iter()
            .map(|class| {
                let ops = class_operators(ctx, class).expect("class in range");
                let mut bad = Vec::new();
                let mut worst_modulus: f64 = 0.0;
                for (l, op) in ops.iter().enumerate() {
                    for k in 0..n {
                        let e = self.state(class, k);
                        let expected = if class == 0 {
                            ctx.chi(ctx.mul(k, l))
                        } else {
                            ctx.chi(ctx.mul(l, k)) * phases.phase(class, l)
                        };
                        let image = op.apply(&e);
                        let actual = e.inner(&image);
                        worst_modulus = worst_modulus.max((actual.norm() - 1.0).abs());
                        if !image.approx_eq(&e.scale(expected), tol) {
                            bad.push((class, l, k));
                        }
                    }
                }
                (n * n, bad, worst_modulus)
            })
            .collect();
        let mut report = EigenbasisReport {
            checked: 0,
            violations: Vec::new(),
            max_modulus_error: 0.0,
        };
        for (checked, bad, worst) in results {
            report.checked += checked;
            report.violations.extend(bad);
            report.max_modulus_error = report.max_modulus_error.max(worst);
        }
        report
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairOverlap {
    pub a: usize,
    pub b: usize,
    /// Largest `|⟨e_k^a|e_l^b⟩|²`.
    pub max: f64,
    pub min: f64,
    pub unbiased: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnbiasednessReport {
    pub dim: usize,
    pub total_pairs: usize,
    pub unbiased_pairs: usize,
    pub orthonormal_bases: usize,
    pub all_unbiased: bool,
    /// `p + 1` for modular families, reported next to the unbiased-pair count.
    pub conjecture_bound: Option<usize>,
    pub pairs: Vec<PairOverlap>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenbasisReport {
    pub checked: usize,
    /// `(class, l, k)` triples where the eigen-equation fails.
    pub violations: Vec<(usize, usize, usize)>,
    pub max_modulus_error: f64,
}

impl EigenbasisReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointEigenReport {
    pub seed: u64,
    /// Classes whose independently diagonalized eigenbasis differs from the formula's.
    pub mismatched_classes: Vec<usize>,
}

impl JointEigenReport {
    pub fn passed(&self) -> bool {
        self.mismatched_classes.is_empty()
    }
}

/// Diagonalizes `Σ_l c_l(V_l + V_l†) + d_l·i(V_l − V_l†)` for each class with
/// seeded random real `c, d`, and compares the resulting rank-1 projectors
/// with the family's.
pub fn joint_eigenbasis_check(
    family: &MubFamily,
    ctx: &ArithmeticContext,
    seed: u64,
    tol: f64,
) -> JointEigenReport {
    let n = family.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatched = Vec::new();
    let i = C64::new(0.0, 1.0);
    for class in 0..=n {
        let ops = class_operators(ctx, class).expect("class in range");
        let mut h = Operator::zeros(n);
        for op in ops.iter().skip(1) {
            let c: f64 = rng.random_range(-1.0..1.0);
            let d: f64 = rng.random_range(-1.0..1.0);
            let herm = op + &op.adjoint();
            let skew = &(op - &op.adjoint()).scale(i);
            h.add_scaled(C64::new(c, 0.0), &herm);
            h.add_scaled(C64::new(d, 0.0), skew);
        }
        let eig = SymmetricEigen::new(h.matrix().clone());
        let found_all = (0..n).all(|col| {
            let v = Ket::from_vec(eig.eigenvectors.column(col).iter().copied().collect());
            (0..n).any(|k| (family.state(class, k).inner(&v).norm_sqr() - 1.0).abs() <= tol)
        });
        if !found_all {
            mismatched.push(class);
        }
    }
    JointEigenReport {
        seed,
        mismatched_classes: mismatched,
    }
}

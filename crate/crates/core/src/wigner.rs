//! Discrete Weyl function, the Wigner operators obtained from the Mean King
//! states by turning Alice's conjugate kets into bras, their line sums, and the
//! displaced parity operators of odd dimensions.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::{ArithmeticContext, Mode};
use crate::linalg::{Ket, Operator, C64};
use crate::meanking::primed_state;
use crate::mub::MubFamily;
use crate::pauli::{weyl_displacement, PhaseSystem};

/// `Tr(U_{(m,n)}·O)`: the amplitude of O along `U_{(m,n)}†`.
pub fn weyl_function(
    ctx: &ArithmeticContext,
    phases: &PhaseSystem,
    op: &Operator,
    m: usize,
    n: usize,
) -> C64 {
    (&weyl_displacement(ctx, phases, m, n) * op).trace()
}

/// `χ(⊖½(α⊙β)) Σ_l χ(⊖(β⊙l))·⟨l|O|α⊕l⟩`, odd characteristic only.
///
/// Agrees with [`weyl_function`] at `(α, ⊖β)`: the two conventions differ by
/// the sign of the phase-slope argument.
pub fn weyl_function_sum_form(
    ctx: &ArithmeticContext,
    op: &Operator,
    alpha: usize,
    beta: usize,
) -> Result<C64> {
    if !ctx.is_odd() {
        return Err(Error::EvenCharacteristic(ctx.dim()));
    }
    let pre = ctx.chi(ctx.neg(ctx.half(ctx.mul(alpha, beta))?));
    let sum: C64 = ctx
        .elements()
        .map(|l| ctx.chi(ctx.neg(ctx.mul(beta, l))) * op.get(l, ctx.add(alpha, l)))
        .sum();
    Ok(pre * sum)
}

/// `O = (1/N) Σ_{m,n} Tr(U_{(m,n)}O)·U_{(m,n)}†`.
pub fn reconstruct_from_weyl(
    ctx: &ArithmeticContext,
    phases: &PhaseSystem,
    op: &Operator,
) -> Operator {
    let n = ctx.dim();
    let mut out = Operator::zeros(n);
    for m in 0..n {
        for k in 0..n {
            let u = weyl_displacement(ctx, phases, m, k);
            out.add_scaled(
                weyl_function(ctx, phases, op, m, k) / n as f64,
                &u.adjoint(),
            );
        }
    }
    out
}

/// `|a⟩_A|b⟩_K ↦ |b⟩⟨a|`.
pub fn turnover(ket: &Ket) -> Operator {
    let n = (ket.dim() as f64).sqrt().round() as usize;
    Operator::from_fn(n, |b, a| ket.get(a * n + b))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerOperatorSet {
    dim: usize,
    /// Indexed `i₁·N + i₂`.
    ops: Vec<Operator>,
}

impl WignerOperatorSet {
    /// `W_{(i₁,i₂)} = (1/N) Σ_{m,n} χ(i₂⊙m ⊖ i₁⊙n)·U_{(m,n)}`.
    pub fn build(ctx: &ArithmeticContext, phases: &PhaseSystem) -> Result<Self> {
        if ctx.mode() != Mode::Galois {
            return Err(Error::WrongMode { expected: "galois" });
        }
        let n = ctx.dim();
        let us: Vec<Operator> = (0..n * n)
            .map(|idx| weyl_displacement(ctx, phases, idx / n, idx % n))
            .collect();
        let ops = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (i1, i2) = (idx / n, idx % n);
                let mut w = Operator::zeros(n);
                for (j, u) in us.iter().enumerate() {
                    let (m, k) = (j / n, j % n);
                    w.add_scaled(
                        ctx.chi(ctx.sub(ctx.mul(i2, m), ctx.mul(i1, k))) / n as f64,
                        u,
                    );
                }
                w
            })
            .collect();
        Ok(Self { dim: n, ops })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i1: usize, i2: usize) -> &Operator {
        &self.ops[i1 * self.dim + i2]
    }

    pub fn operators(&self) -> &[Operator] {
        &self.ops
    }

    /// Largest deviation from hermiticity, unit trace, or `Tr(W_a† W_b) = N·δ_ab`.
    pub fn structure_error(&self) -> f64 {
        let n = self.dim as f64;
        let ops = &self.ops;
        (0..ops.len())
            .into_par_iter()
            .map(|a| {
                let herm = ops[a].max_abs_diff(&ops[a].adjoint());
                let tr = (ops[a].trace() - C64::new(1.0, 0.0)).norm();
                let gram = (0..ops.len())
                    .map(|b| {
                        let expect = if a == b { n } else { 0.0 };
                        ((&ops[a].adjoint() * &ops[b]).trace() - C64::new(expect, 0.0)).norm()
                    })
                    .fold(0.0, f64::max);
                herm.max(tr).max(gram)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Largest deviation of `W_{(i₁,i₂)}` from `√N · turnover(Ψ'_{(i₁,i₂)})`.
    pub fn turnover_error(
        &self,
        family: &MubFamily,
        ctx: &ArithmeticContext,
        phases: &PhaseSystem,
    ) -> f64 {
        let n = self.dim;
        let scale = C64::new((n as f64).sqrt(), 0.0);
        (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let psi = primed_state(family, ctx, phases, 0, idx / n, idx % n);
                turnover(&psi).scale(scale).max_abs_diff(&self.ops[idx])
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// `Tr(W_{(i₁,i₂)}·O)` for hermitian O.
pub fn wigner_function(
    set: &WignerOperatorSet,
    op: &Operator,
    i1: usize,
    i2: usize,
    tol: f64,
) -> Result<f64> {
    let herm = op.max_abs_diff(&op.adjoint());
    if herm > tol {
        return Err(Error::NotHermitian(herm));
    }
    let v = (set.get(i1, i2) * op).trace();
    if v.im.abs() > tol {
        return Err(Error::NotHermitian(v.im.abs()));
    }
    Ok(v.re)
}

/// The full N×N grid, row `i₁`, column `i₂`.
pub fn wigner_grid(set: &WignerOperatorSet, op: &Operator, tol: f64) -> Result<Vec<Vec<f64>>> {
    let n = set.dim();
    (0..n)
        .map(|i1| {
            (0..n)
                .map(|i2| wigner_function(set, op, i1, i2, tol))
                .collect()
        })
        .collect()
}

/// `(1/N) Σ_{α,β} χ(α⊙i₂ ⊖ β⊙i₁)·W̃(α,β)` using the sum-form Weyl function
/// with the phase-slope sign flipped.
pub fn wigner_from_sum_form(
    ctx: &ArithmeticContext,
    op: &Operator,
    i1: usize,
    i2: usize,
) -> Result<C64> {
    let n = ctx.dim();
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            let w = weyl_function_sum_form(ctx, op, a, ctx.neg(b))?;
            acc += ctx.chi(ctx.sub(ctx.mul(a, i2), ctx.mul(b, i1))) * w;
        }
    }
    Ok(acc / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParityOperators {
    /// `(1/N) Σ_{m,n} U_{(m,n)}`.
    pub p00: Operator,
    /// `U_{(2⊙α, 2⊙β)}·P00` at `α·N + β`.
    pub displaced: Vec<Operator>,
}

pub fn parity_operators(
    ctx: &ArithmeticContext,
    phases: &PhaseSystem,
    tol: f64,
) -> Result<ParityOperators> {
    if !ctx.is_odd() {
        return Err(Error::EvenCharacteristic(ctx.dim()));
    }
    let n = ctx.dim();
    let mut p00 = Operator::zeros(n);
    for m in 0..n {
        for k in 0..n {
            p00.add_scaled(
                C64::new(1.0 / n as f64, 0.0),
                &weyl_displacement(ctx, phases, m, k),
            );
        }
    }
    for k in 0..n {
        if !p00
            .apply(&Ket::basis(n, k))
            .approx_eq(&Ket::basis(n, ctx.neg(k)), tol)
        {
            return Err(Error::Invariant(format!(
                "parity does not send |{k}⟩ to |⊖{k}⟩"
            )));
        }
    }
    if !(&p00 * &p00).approx_eq(&Operator::identity(n), tol) {
        return Err(Error::Invariant("parity is not an involution".into()));
    }
    let displaced = (0..n * n)
        .map(|idx| {
            let (a, b) = (idx / n, idx % n);
            &weyl_displacement(ctx, phases, ctx.add(a, a), ctx.add(b, b)) * &p00
        })
        .collect();
    Ok(ParityOperators { p00, displaced })
}

/// Phase-space line labelled `l` of striation `k`: `{(l, t)}` for k = 0 and
/// `{(t, (k−1)⊙t ⊖ l)}` otherwise.
pub fn striation_line(ctx: &ArithmeticContext, k: usize, l: usize) -> Vec<(usize, usize)> {
    ctx.elements()
        .map(|t| {
            if k == 0 {
                (l, t)
            } else {
                (t, ctx.sub(ctx.mul(k - 1, t), l))
            }
        })
        .collect()
}

/// Sum of the Wigner operators along a line; equals `N·|e_l^k⟩⟨e_l^k|`.
pub fn marginal(set: &WignerOperatorSet, ctx: &ArithmeticContext, k: usize, l: usize) -> Operator {
    let mut out = Operator::zeros(set.dim());
    for (a, b) in striation_line(ctx, k, l) {
        out.add_scaled(C64::new(1.0, 0.0), set.get(a, b));
    }
    out
}

/// `(k, l)` pairs whose line sum differs from `N·|e_l^k⟩⟨e_l^k|`, for the listed striations.
pub fn marginal_violations(
    set: &WignerOperatorSet,
    family: &MubFamily,
    ctx: &ArithmeticContext,
    striations: impl IntoIterator<Item = usize>,
    tol: f64,
) -> Vec<(usize, usize)> {
    let n = ctx.dim();
    let scale = C64::new(n as f64, 0.0);
    let mut bad = Vec::new();
    for k in striations {
        for l in 0..n {
            let expected = family.state(k, l).projector().scale(scale);
            if !marginal(set, ctx, k, l).approx_eq(&expected, tol) {
                bad.push((k, l));
            }
        }
    }
    bad
}

/// True if no Wigner operator coincides with any `U_{(m,n)}` up to a phase.
pub fn distinct_from_displacements(
    set: &WignerOperatorSet,
    ctx: &ArithmeticContext,
    phases: &PhaseSystem,
    tol: f64,
) -> bool {
    let n = ctx.dim();
    set.operators().iter().all(|w| {
        (0..n * n).all(|j| {
            let u = weyl_displacement(ctx, phases, j / n, j % n);
            let overlap = (&u.adjoint() * w).trace().norm();
            (overlap - n as f64).abs() > tol
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DEFAULT_TOL;
    use crate::pauli::qubit_paulis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(p: usize, m: usize) -> (ArithmeticContext, PhaseSystem, MubFamily, WignerOperatorSet) {
        let ctx = ArithmeticContext::galois(p, m).unwrap();
        let ph = PhaseSystem::build(&ctx).unwrap();
        let fam = MubFamily::build(&ctx, &ph);
        let set = WignerOperatorSet::build(&ctx, &ph).unwrap();
        (ctx, ph, fam, set)
    }

    fn random_operator(n: usize, seed: u64) -> Operator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Operator::from_fn(n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_density(n: usize, seed: u64) -> Operator {
        let a = random_operator(n, seed);
        let rho = &a * &a.adjoint();
        let tr = rho.trace();
        rho.scale(tr.inv())
    }

    #[test]
    fn weyl_basics() {
        let (ctx, ph, _, _) = setup(3, 1);
        let id = Operator::identity(3);
        assert!((weyl_function(&ctx, &ph, &id, 0, 0) - C64::new(3.0, 0.0)).norm() < 1e-12);
        let u = weyl_displacement(&ctx, &ph, 1, 2);
        assert!((weyl_function(&ctx, &ph, &u.adjoint(), 1, 2) - C64::new(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn weyl_reconstruction() {
        for (p, m) in [(3, 1), (2, 2), (5, 1)] {
            let (ctx, ph, _, _) = setup(p, m);
            let op = random_operator(ctx.dim(), 3);
            assert!(reconstruct_from_weyl(&ctx, &ph, &op).approx_eq(&op, 1e-9));
        }
    }

    #[test]
    fn sum_form_has_opposite_slope_sign() {
        let (ctx, ph, _, _) = setup(5, 1);
        let op = random_operator(5, 9);
        for a in 0..5 {
            for b in 0..5 {
                let ours = weyl_function(&ctx, &ph, &op, a, b);
                let flipped = weyl_function_sum_form(&ctx, &op, a, ctx.neg(b)).unwrap();
                assert!((ours - flipped).norm() < 1e-9);
            }
        }
        // the literal slope sign disagrees somewhere
        let same = weyl_function_sum_form(&ctx, &op, 1, 1).unwrap();
        assert!((weyl_function(&ctx, &ph, &op, 1, 1) - same).norm() > 1e-6);
    }

    #[test]
    fn qubit_identities() {
        let (ctx, _, fam, set) = setup(2, 1);
        let [id, x, z, y] = qubit_paulis();
        let sum = &(&(&id + &x) + &z) + &y;
        assert!(set
            .get(0, 0)
            .scale(C64::new(2.0, 0.0))
            .approx_eq(&sum, 1e-12));
        let marg = set.get(0, 0) + set.get(0, 1);
        assert!(marg.approx_eq(
            &fam.state(0, 0).projector().scale(C64::new(2.0, 0.0)),
            1e-12
        ));
        assert!(marginal_violations(&set, &fam, &ctx, 0..=2, DEFAULT_TOL).is_empty());
    }

    #[test]
    fn structure_and_turnover() {
        for (p, m) in [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2)] {
            let (ctx, ph, fam, set) = setup(p, m);
            assert!(set.structure_error() < 1e-9, "N={}", ctx.dim());
            assert!(
                set.turnover_error(&fam, &ctx, &ph) < 1e-9,
                "N={}",
                ctx.dim()
            );
            assert!(marginal_violations(&set, &fam, &ctx, 0..=ctx.dim(), DEFAULT_TOL).is_empty());
            let total = set
                .operators()
                .iter()
                .fold(Operator::zeros(ctx.dim()), |acc, w| &acc + w);
            assert!(total.approx_eq(
                &Operator::identity(ctx.dim()).scale(C64::new(ctx.dim() as f64, 0.0)),
                1e-9
            ));
        }
    }

    #[test]
    fn displaced_parity_in_odd_dimensions() {
        for (p, m) in [(3, 1), (5, 1), (3, 2)] {
            let (ctx, ph, _, set) = setup(p, m);
            let par = parity_operators(&ctx, &ph, DEFAULT_TOL).unwrap();
            for (w, d) in set.operators().iter().zip(&par.displaced) {
                assert!(w.approx_eq(d, 1e-9));
            }
        }
        let (ctx, ph, _, _) = setup(3, 1);
        let par = parity_operators(&ctx, &ph, DEFAULT_TOL).unwrap();
        assert!(par
            .p00
            .apply(&Ket::basis(3, 1))
            .approx_eq(&Ket::basis(3, 2), 1e-12));
        let (ctx, ph, _, _) = setup(2, 2);
        assert_eq!(
            parity_operators(&ctx, &ph, DEFAULT_TOL).unwrap_err(),
            Error::EvenCharacteristic(4)
        );
    }

    #[test]
    fn wigner_function_values() {
        let (_, _, _, set) = setup(3, 1);
        let mixed = Operator::identity(3).scale(C64::new(1.0 / 3.0, 0.0));
        for row in wigner_grid(&set, &mixed, DEFAULT_TOL).unwrap() {
            for v in row {
                assert!((v - 1.0 / 3.0).abs() < 1e-12);
            }
        }
        let skew = Operator::from_fn(3, |r, c| {
            if r == 0 && c == 1 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        assert!(matches!(
            wigner_function(&set, &skew, 0, 0, DEFAULT_TOL),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn symplectic_fourier_of_weyl() {
        for p in [3, 5, 7] {
            let (ctx, _, _, set) = setup(p, 1);
            let rho = random_density(p, p as u64);
            for i1 in 0..p {
                for i2 in 0..p {
                    let w = wigner_function(&set, &rho, i1, i2, 1e-9).unwrap();
                    let f = wigner_from_sum_form(&ctx, &rho, i1, i2).unwrap();
                    assert!((f - C64::new(w, 0.0)).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn even_set_differs_from_displacements() {
        let (ctx, ph, _, set) = setup(2, 2);
        assert!(distinct_from_displacements(&set, &ctx, &ph, 1e-6));
    }
}

//! Generalized Bell states `|B_{m*,n}^k⟩ = N^{-1/2} Σ_l χ(l⊙n)|e_l^{k*}⟩|e_{l⊕m}^k⟩`
//! relative to basis k of a [`MubFamily`], and their transformation laws.
//!
//! The first tensor factor is Alice's ancilla, the second the King's system.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::ArithmeticContext;
use crate::linalg::{Ket, C64};
use crate::mub::MubFamily;
use crate::pauli::{displacement_v, PhaseSystem};

pub fn bell_state(
    family: &MubFamily,
    ctx: &ArithmeticContext,
    m: usize,
    n: usize,
    k: usize,
) -> Ket {
    let dim = ctx.dim();
    let mut out = Ket::zeros(dim * dim);
    let norm = 1.0 / (dim as f64).sqrt();
    for l in ctx.elements() {
        let term = family
            .conj_state(k, l)
            .tensor(&family.state(k, ctx.add(l, m)));
        out.add_scaled(ctx.chi(ctx.mul(l, n)) * norm, &term);
    }
    out
}

/// All N² Bell states for basis k, indexed `m·N + n`.
pub fn bell_basis(family: &MubFamily, ctx: &ArithmeticContext, k: usize) -> Vec<Ket> {
    let n = ctx.dim();
    (0..n * n)
        .map(|idx| bell_state(family, ctx, idx / n, idx % n, k))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellImage {
    pub m: usize,
    pub n: usize,
    #[serde(with = "crate::linalg::serde_complex")]
    pub phase: C64,
}

/// Re-expresses `|B_{m*,n}^k⟩` in the computational basis:
/// `|B_{m*,n}^k⟩ = χ(⊖(m⊙n))·φ_k(n)·|B_{n*, ⊖m⊕(k−1)⊙n}^0⟩`.
pub fn bell_transform(
    ctx: &ArithmeticContext,
    phases: &PhaseSystem,
    k: usize,
    m: usize,
    n: usize,
) -> Result<BellImage> {
    if k == 0 || k > ctx.dim() {
        return Err(Error::InvalidBasis { k });
    }
    let dim = ctx.dim();
    if m >= dim || n >= dim {
        return Err(Error::OutOfRange {
            value: m.max(n),
            dim,
        });
    }
    Ok(BellImage {
        m: n,
        n: ctx.add(ctx.neg(m), ctx.mul(k - 1, n)),
        phase: ctx.chi(ctx.neg(ctx.mul(m, n))) * phases.phase(k, n),
    })
}

/// `m₁⊙n₂ ⊖ n₁⊙m₂`.
pub fn symplectic_form(ctx: &ArithmeticContext, a: (usize, usize), b: (usize, usize)) -> usize {
    ctx.sub(ctx.mul(a.0, b.1), ctx.mul(a.1, b.0))
}

/// The index map `(m, n) ↦ ((k−1)⊙m ⊖ n, m)` attached to basis k ≥ 1.
pub fn symplectic_transport(
    ctx: &ArithmeticContext,
    k: usize,
    pair: (usize, usize),
) -> (usize, usize) {
    (ctx.sub(ctx.mul(k - 1, pair.0), pair.1), pair.0)
}

/// Inverse of [`symplectic_transport`]: `(m', n') ↦ (n', (k−1)⊙n' ⊖ m')`.
pub fn symplectic_transport_inverse(
    ctx: &ArithmeticContext,
    k: usize,
    pair: (usize, usize),
) -> (usize, usize) {
    (pair.1, ctx.sub(ctx.mul(k - 1, pair.1), pair.0))
}

/// Conjugating the Bell operator by `V_j^i` (shift j, phase i) multiplies the
/// state by `χ(m⊙i ⊖ n⊙j)`. At state level the conjugation acts as
/// `conj(V) ⊗ V`. Returns the phase, or an error if the state is not reproduced.
pub fn pauli_conjugation_check(
    family: &MubFamily,
    ctx: &ArithmeticContext,
    i: usize,
    j: usize,
    m: usize,
    n: usize,
    tol: f64,
) -> Result<C64> {
    let bell = bell_state(family, ctx, m, n, 0);
    let v = displacement_v(ctx, j, i);
    let image = v.conj().tensor(&v).apply(&bell);
    let phase = ctx.chi(ctx.sub(ctx.mul(m, i), ctx.mul(n, j)));
    if !image.approx_eq(&bell.scale(phase), tol) {
        return Err(Error::Invariant(format!(
            "Bell invariance fails for V_{j}^{i} on B_({m},{n}): deviation {:.3e}",
            image.max_abs_diff(&bell.scale(phase))
        )));
    }
    let overlap = bell.inner(&image);
    if (overlap.norm() - 1.0).abs() > tol {
        return Err(Error::Invariant(format!(
            "Bell projector not preserved for ({i},{j},{m},{n})"
        )));
    }
    Ok(phase)
}

/// Number of `(k, m, n)` with `k ≥ 1` where [`bell_transform`] does not hold numerically.
pub fn transform_violations(
    family: &MubFamily,
    ctx: &ArithmeticContext,
    phases: &PhaseSystem,
    tol: f64,
) -> usize {
    let n = ctx.dim();
    let computational = bell_basis(family, ctx, 0);
    let mut bad = 0;
    for k in 1..=n {
        for m in 0..n {
            for nn in 0..n {
                let img = bell_transform(ctx, phases, k, m, nn).expect("valid indices");
                let lhs = bell_state(family, ctx, m, nn, k);
                let rhs = computational[img.m * n + img.n].scale(img.phase);
                if !lhs.approx_eq(&rhs, tol) {
                    bad += 1;
                }
            }
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{partial_trace, Operator, Subsystem, DEFAULT_TOL, ONE};

    fn setup(ctx: &ArithmeticContext) -> (PhaseSystem, MubFamily) {
        let ph = PhaseSystem::build(ctx).unwrap();
        let fam = MubFamily::build(ctx, &ph);
        (ph, fam)
    }

    fn ket(re: &[f64]) -> Ket {
        Ket::from_vec(re.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    #[test]
    fn qubit_bell_states() {
        let ctx = ArithmeticContext::galois(2, 1).unwrap();
        let (_, fam) = setup(&ctx);
        let s = 1.0 / 2f64.sqrt();
        assert!(bell_state(&fam, &ctx, 0, 0, 0).approx_eq(&ket(&[s, 0.0, 0.0, s]), 1e-15));
        assert!(bell_state(&fam, &ctx, 1, 1, 0).approx_eq(&ket(&[0.0, s, -s, 0.0]), 1e-15));
    }

    #[test]
    fn qubit_transform_table() {
        let ctx = ArithmeticContext::galois(2, 1).unwrap();
        let (ph, fam) = setup(&ctx);
        let z = |m, n| bell_state(&fam, &ctx, m, n, 0);
        let x = |m, n| bell_state(&fam, &ctx, m, n, 1);
        let y = |m, n| bell_state(&fam, &ctx, m, n, 2);
        let i = C64::new(0.0, 1.0);
        // Z column against the X and Y columns of the qubit table
        assert!(
            z(0, 0).approx_eq(&x(0, 0), DEFAULT_TOL) && z(0, 0).approx_eq(&y(0, 0), DEFAULT_TOL)
        );
        assert!(
            z(0, 1).approx_eq(&x(1, 0), DEFAULT_TOL) && z(0, 1).approx_eq(&y(1, 0), DEFAULT_TOL)
        );
        assert!(
            z(1, 0).approx_eq(&x(0, 1), DEFAULT_TOL)
                && z(1, 0).approx_eq(&y(1, 1).scale(i), DEFAULT_TOL)
        );
        assert!(z(1, 1).approx_eq(&x(1, 1).scale(-ONE), DEFAULT_TOL));
        assert!(z(1, 1).approx_eq(&y(0, 1).scale(-i), DEFAULT_TOL));

        let img = bell_transform(&ctx, &ph, 1, 1, 1).unwrap();
        assert_eq!((img.m, img.n), (1, 1));
        assert!((img.phase + ONE).norm() < 1e-15);
        let img = bell_transform(&ctx, &ph, 1, 1, 0).unwrap();
        assert_eq!((img.m, img.n, img.phase), (0, 1, ONE));
        for k in 1..=2 {
            let img = bell_transform(&ctx, &ph, k, 0, 0).unwrap();
            assert_eq!((img.m, img.n, img.phase), (0, 0, ONE));
        }
        assert_eq!(
            bell_transform(&ctx, &ph, 0, 0, 0),
            Err(Error::InvalidBasis { k: 0 })
        );
    }

    #[test]
    fn transform_law_holds() {
        for (p, m) in [(2, 1), (2, 2), (3, 1), (2, 3), (3, 2)] {
            let ctx = ArithmeticContext::galois(p, m).unwrap();
            let (ph, fam) = setup(&ctx);
            assert_eq!(
                transform_violations(&fam, &ctx, &ph, DEFAULT_TOL),
                0,
                "N = {}",
                ctx.dim()
            );
        }
        let ctx = ArithmeticContext::modular(9).unwrap();
        let (ph, fam) = setup(&ctx);
        assert_eq!(transform_violations(&fam, &ctx, &ph, DEFAULT_TOL), 0);
    }

    #[test]
    fn bell_bases_orthonormal_and_maximally_entangled() {
        let ctx = ArithmeticContext::galois(2, 2).unwrap();
        let (_, fam) = setup(&ctx);
        let n = ctx.dim();
        let mixed = Operator::identity(n).scale(C64::new(1.0 / n as f64, 0.0));
        for k in 0..=n {
            let basis = bell_basis(&fam, &ctx, k);
            for (a, x) in basis.iter().enumerate() {
                for (b, y) in basis.iter().enumerate() {
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((x.inner(y) - C64::new(expect, 0.0)).norm() < DEFAULT_TOL);
                }
                let reduced = partial_trace(&x.projector(), Subsystem::First).unwrap();
                assert!(reduced.approx_eq(&mixed, DEFAULT_TOL));
            }
        }
    }

    #[test]
    fn conjugation_phases() {
        let ctx = ArithmeticContext::galois(3, 1).unwrap();
        let (_, fam) = setup(&ctx);
        for i in 0..3 {
            for j in 0..3 {
                for m in 0..3 {
                    for n in 0..3 {
                        let phase =
                            pauli_conjugation_check(&fam, &ctx, i, j, m, n, DEFAULT_TOL).unwrap();
                        if (i, j) == (0, 0) || (m, n) == (0, 0) {
                            assert!((phase - ONE).norm() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn transport_is_inverse_of_bell_index_map() {
        let ctx = ArithmeticContext::galois(5, 1).unwrap();
        let ph = PhaseSystem::build(&ctx).unwrap();
        for k in 1..=5 {
            for m in 0..5 {
                for n in 0..5 {
                    let img = bell_transform(&ctx, &ph, k, m, n).unwrap();
                    assert_eq!(symplectic_transport(&ctx, k, (img.m, img.n)), (m, n));
                    assert_eq!(
                        symplectic_transport_inverse(&ctx, k, (m, n)),
                        (img.m, img.n)
                    );
                }
            }
        }
    }
}

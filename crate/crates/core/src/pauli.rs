//! The generalized Pauli group.
//!
//! `V_i^j = Σ_k χ((k⊕i)⊙j) |k⊕i⟩⟨k|` shifts by `i` and applies the phase
//! slope `j`. The N+1 commuting classes are `{V_l^{(i−1)⊙l}}_l` for
//! `i = 1..N` and `{V_0^l}_l` for class 0. Within each class the rephased
//! operators `U_l^i = conj(φ_i(l))·V_l^{(i−1)⊙l}` form an exact group, where
//! `φ_i(l)` is a square root of `χ((i−1)⊙l⊙l)` fixed by the cocycle relation
//! `φ_i(l₁⊕l₂) = φ_i(l₁)·φ_i(l₂)·χ((i−1)⊙l₁⊙l₂)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::{ArithmeticContext, Mode};
use crate::linalg::{hs_inner, Operator, C64, ONE, ZERO};

/// `V_shift^phase`.
pub fn displacement_v(ctx: &ArithmeticContext, shift: usize, phase: usize) -> Operator {
    let n = ctx.dim();
    let mut op = Operator::zeros(n);
    for k in 0..n {
        let row = ctx.add(k, shift);
        op.set(row, k, ctx.chi(ctx.mul(row, phase)));
    }
    op
}

/// The numerically verified adjoint: `(V_i^j)† = χ(⊖(i⊙j))·V_{⊖i}^{⊖j}`.
pub fn displacement_v_adjoint(ctx: &ArithmeticContext, shift: usize, phase: usize) -> Operator {
    displacement_v(ctx, ctx.neg(shift), ctx.neg(phase))
        .scale(ctx.chi(ctx.neg(ctx.mul(shift, phase))))
}

/// Square-root phases `φ_i(l)` for every class, plus the per-pair factor
/// `(γ^{m⊙n})^{1/2}` derived from them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSystem {
    dim: usize,
    /// Rows indexed by class `0..=N`; row 0 is all ones.
    phi: Vec<Vec<C64>>,
    /// `(γ^{m⊙n})^{1/2}` at `m·N + n`.
    pair: Vec<C64>,
}

impl PhaseSystem {
    pub fn build(ctx: &ArithmeticContext) -> Result<Self> {
        let n = ctx.dim();
        let mut phi = vec![vec![ONE; n]; n + 1];
        if ctx.is_odd() {
            for (class, row) in phi.iter_mut().enumerate().skip(1) {
                let a = class - 1;
                for (l, slot) in row.iter_mut().enumerate() {
                    *slot = ctx.chi(ctx.half(ctx.mul(ctx.mul(a, l), l))?);
                }
            }
        } else if ctx.mode() == Mode::Galois {
            for (class, row) in phi.iter_mut().enumerate().skip(1) {
                let a = class - 1;
                let gens = even_generators(ctx, a);
                for l in 1..n {
                    let bit = l.trailing_zeros() as usize;
                    let low = 1 << bit;
                    let rest = l ^ low;
                    row[l] = gens[bit] * row[rest] * ctx.chi(ctx.mul(ctx.mul(a, low), rest));
                }
            }
        } else {
            return Err(Error::EvenCharacteristic(n));
        }

        let mut pair = vec![ONE; n * n];
        for m in 0..n {
            for k in 0..n {
                pair[m * n + k] = if ctx.is_odd() {
                    ctx.chi(ctx.half(ctx.mul(m, k))?)
                } else if m == 0 {
                    ONE
                } else {
                    let inv = ctx.inv(m).expect("nonzero field element");
                    phi[ctx.mul(k, inv) + 1][m]
                };
            }
        }
        Ok(Self { dim: n, phi, pair })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `φ_class(l)`; class 0 always gives 1.
    pub fn phase(&self, class: usize, l: usize) -> C64 {
        self.phi[class][l]
    }

    pub fn class_row(&self, class: usize) -> &[C64] {
        &self.phi[class]
    }

    /// `(γ^{m⊙n})^{1/2}`, equal to `φ_{n/m+1}(m)` for `m ≠ 0` in a field.
    pub fn pair_phase(&self, m: usize, n: usize) -> C64 {
        self.pair[m * self.dim + n]
    }
}

/// `i^{label(a⊙2^b⊙2^b)}` for each bit b: a square root of `χ(a⊙2^b⊙2^b)`.
fn even_generators(ctx: &ArithmeticContext, a: usize) -> Vec<C64> {
    (0..ctx.m())
        .map(|bit| {
            let e = 1 << bit;
            i_power(ctx.mul(ctx.mul(a, e), e))
        })
        .collect()
}

fn i_power(k: usize) -> C64 {
    match k % 4 {
        0 => ONE,
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// The even-characteristic square-root factor transcribed literally from the
/// bit-product formula, including the rule that a lone highest set bit pairs
/// with bit 0. Used only as a cross-check against [`PhaseSystem`].
pub fn literal_even_phase(ctx: &ArithmeticContext, class: usize, q: usize) -> Result<C64> {
    if ctx.mode() != Mode::Galois || ctx.p() != 2 {
        return Err(Error::WrongMode {
            expected: "galois, characteristic 2",
        });
    }
    if class == 0 || class > ctx.dim() {
        return Err(Error::InvalidClass {
            class,
            max: ctx.dim(),
        });
    }
    let a = class - 1;
    let bits: Vec<usize> = (0..ctx.m()).filter(|b| q >> b & 1 == 1).collect();
    let mut out = ONE;
    for (idx, &b) in bits.iter().enumerate() {
        let e = 1 << b;
        let next = bits.get(idx + 1).copied().unwrap_or(0);
        out *= i_power(ctx.mul(ctx.mul(a, e), e));
        out *= ctx.chi(ctx.mul(ctx.mul(a, e), 1 << next));
    }
    Ok(out)
}

/// `(class, q)` pairs where the literal formula disagrees with the phase system.
pub fn literal_even_mismatches(
    ctx: &ArithmeticContext,
    phases: &PhaseSystem,
    tol: f64,
) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for class in 1..=ctx.dim() {
        for q in ctx.elements() {
            if (literal_even_phase(ctx, class, q)? - phases.phase(class, q)).norm() > tol {
                out.push((class, q));
            }
        }
    }
    Ok(out)
}

/// `U_l^class`: `V_0^l` for class 0, `conj(φ_class(l))·V_l^{(class−1)⊙l}` otherwise.
pub fn displacement_u(
    ctx: &ArithmeticContext,
    phases: &PhaseSystem,
    class: usize,
    l: usize,
) -> Result<Operator> {
    let n = ctx.dim();
    if class > n {
        return Err(Error::InvalidClass { class, max: n });
    }
    if l >= n {
        return Err(Error::OutOfRange { value: l, dim: n });
    }
    if class == 0 {
        return Ok(displacement_v(ctx, 0, l));
    }
    let slope = ctx.mul(class - 1, l);
    Ok(displacement_v(ctx, l, slope).scale(phases.phase(class, l).conj()))
}

/// Phase-space displacement `U_{(m,n)} = conj((γ^{m⊙n})^{1/2})·V_m^n`.
///
/// In a field this is `U_m^{n/m+1}` for `m ≠ 0` and `U_n^0` for `m = 0`.
pub fn weyl_displacement(
    ctx: &ArithmeticContext,
    phases: &PhaseSystem,
    m: usize,
    n: usize,
) -> Operator {
    displacement_v(ctx, m, n).scale(phases.pair_phase(m, n).conj())
}

/// Class containing `V_m^n` (field contexts only): 0 when `m = 0`, else `n/m + 1`.
pub fn class_of(ctx: &ArithmeticContext, m: usize, n: usize) -> Option<usize> {
    if m == 0 {
        return Some(0);
    }
    ctx.inv(m).map(|inv| ctx.mul(n, inv) + 1)
}

/// The N operators of one commuting class, as V's.
pub fn class_operators(ctx: &ArithmeticContext, class: usize) -> Result<Vec<Operator>> {
    let n = ctx.dim();
    if class > n {
        return Err(Error::InvalidClass { class, max: n });
    }
    Ok(ctx
        .elements()
        .map(|l| {
            if class == 0 {
                displacement_v(ctx, 0, l)
            } else {
                displacement_v(ctx, l, ctx.mul(class - 1, l))
            }
        })
        .collect())
}

/// Number of `(class, l₁, l₂)` triples violating the cocycle relation.
pub fn cocycle_violations(ctx: &ArithmeticContext, phases: &PhaseSystem, tol: f64) -> usize {
    let mut bad = 0;
    for class in 1..=ctx.dim() {
        let a = class - 1;
        for l1 in ctx.elements() {
            for l2 in ctx.elements() {
                let lhs = phases.phase(class, l1)
                    * phases.phase(class, l2)
                    * ctx.chi(ctx.mul(ctx.mul(a, l1), l2));
                if (lhs - phases.phase(class, ctx.add(l1, l2))).norm() > tol {
                    bad += 1;
                }
            }
        }
    }
    bad
}

/// Index tuples `(i, j, l, k)` violating `V_i^j·V_l^k = χ(⊖(i⊙k))·V_{i⊕l}^{j⊕k}`.
pub fn composition_violations(
    ctx: &ArithmeticContext,
    tuples: impl IntoIterator<Item = (usize, usize, usize, usize)>,
    tol: f64,
) -> Vec<(usize, usize, usize, usize)> {
    tuples
        .into_iter()
        .filter(|&(i, j, l, k)| {
            let lhs = &displacement_v(ctx, i, j) * &displacement_v(ctx, l, k);
            let rhs = displacement_v(ctx, ctx.add(i, l), ctx.add(j, k))
                .scale(ctx.chi(ctx.neg(ctx.mul(i, k))));
            !lhs.approx_eq(&rhs, tol)
        })
        .collect()
}

/// All N⁴ index tuples.
pub fn all_tuples(n: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..n * n * n * n).map(move |x| (x / (n * n * n), (x / (n * n)) % n, (x / n) % n, x % n))
}

/// Largest deviation of `Tr(V_a†·V_b)` from `N·δ_ab` over all pairs.
pub fn hs_orthogonality_error(ctx: &ArithmeticContext) -> f64 {
    let n = ctx.dim();
    let vs: Vec<Operator> = (0..n * n)
        .map(|x| displacement_v(ctx, x / n, x % n))
        .collect();
    let mut worst: f64 = 0.0;
    for (a, va) in vs.iter().enumerate() {
        for (b, vb) in vs.iter().enumerate() {
            let expect = if a == b { n as f64 } else { 0.0 };
            let t = hs_inner(va, vb).expect("equal dimensions");
            worst = worst.max((t - C64::new(expect, 0.0)).norm());
        }
    }
    worst
}

/// `(class, l₁, l₂)` with `U_{l₁}·U_{l₂} ≠ U_{l₁⊕l₂}` inside the class.
pub fn group_law_violations(
    ctx: &ArithmeticContext,
    phases: &PhaseSystem,
    tol: f64,
) -> Result<Vec<(usize, usize, usize)>> {
    let n = ctx.dim();
    let mut bad = Vec::new();
    for class in 0..=n {
        let us = (0..n)
            .map(|l| displacement_u(ctx, phases, class, l))
            .collect::<Result<Vec<_>>>()?;
        for a in 0..n {
            for b in 0..n {
                if !(&us[a] * &us[b]).approx_eq(&us[ctx.add(a, b)], tol) {
                    bad.push((class, a, b));
                }
            }
        }
    }
    Ok(bad)
}

/// Pairs `(shift, phase)` where `(V_i^j)†` differs from `χ(⊖(i⊙j))·V_{⊖i}^{⊖j}`.
pub fn adjoint_violations(ctx: &ArithmeticContext, tol: f64) -> Vec<(usize, usize)> {
    let n = ctx.dim();
    (0..n * n)
        .map(|x| (x / n, x % n))
        .filter(|&(i, j)| {
            !displacement_v(ctx, i, j)
                .adjoint()
                .approx_eq(&displacement_v_adjoint(ctx, i, j), tol)
        })
        .collect()
}

/// The four qubit Paulis in the order `σ_{0,0}, σ_{1,0}=X, σ_{0,1}=Z, σ_{1,1}=Y`.
pub fn qubit_paulis() -> [Operator; 4] {
    let i = C64::new(0.0, 1.0);
    [
        Operator::identity(2),
        Operator::from_rows(2, &[ZERO, ONE, ONE, ZERO]).unwrap(),
        Operator::from_rows(2, &[ONE, ZERO, ZERO, -ONE]).unwrap(),
        Operator::from_rows(2, &[ZERO, -i, i, ZERO]).unwrap(),
    ]
}

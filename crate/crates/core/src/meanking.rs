//! The Mean King measurement basis, its inference rule and a protocol simulator.
//!
//! Alice prepares `|B_{0,0}^0⟩` on (ancilla, system), the King measures the
//! system in one of the N+1 bases, and Alice then measures the pair in the
//! basis `|Ψ_{(i₁,i₂)}⟩ = (1/N) Σ_{m,n} c(i₁,i₂;m,n)·(γ^{m⊙n})^{1/2}·|B_{m,n}^0⟩`.
//! In a field the coefficient is the character of the first component of the
//! GF(N²) product `(i₁,i₂)·(m,n)`; in odd modular mode it is `χ(i₂⊙m ⊖ i₁⊙n)`.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::{bell_basis, symplectic_transport};
use crate::error::{Error, Result};
use crate::galois::{ArithmeticContext, ExtensionContext, Mode};
use crate::linalg::{Ket, C64};
use crate::mub::MubFamily;
use crate::pauli::PhaseSystem;

#[derive(Debug, Clone, Serialize)]
pub struct MeanKingBasis {
    dim: usize,
    mode: Mode,
    residue: Option<usize>,
    /// Indexed `i₁·N + i₂`.
    states: Vec<Ket>,
    /// `inference[k][i₁·N + i₂]`: the unique King outcome compatible with Alice's result.
    inference: Vec<Vec<usize>>,
}

fn require_extension<'a>(
    ctx: &ArithmeticContext,
    ext: Option<&'a ExtensionContext>,
) -> Result<Option<&'a ExtensionContext>> {
    match ctx.mode() {
        Mode::Galois => ext.map(Some).ok_or(Error::WrongMode {
            expected: "galois with extension",
        }),
        Mode::Modular if ctx.is_odd() => Ok(None),
        Mode::Modular => Err(Error::EvenCharacteristic(ctx.dim())),
    }
}

/// `Σ_{m,n} χ(coef(m,n))·(γ^{m⊙n})^{1/2}·|B_{m,n}⟩ / N` over a precomputed Bell basis.
fn expand(
    ctx: &ArithmeticContext,
    phases: &PhaseSystem,
    bells: &[Ket],
    coef: impl Fn(usize, usize) -> usize,
) -> Ket {
    let n = ctx.dim();
    let mut out = Ket::zeros(n * n);
    let norm = C64::new(1.0 / n as f64, 0.0);
    for m in 0..n {
        for k in 0..n {
            let w = ctx.chi(coef(m, k)) * phases.pair_phase(m, k) * norm;
            out.add_scaled(w, &bells[m * n + k]);
        }
    }
    out
}

fn king_coefficient<'a>(
    ctx: &'a ArithmeticContext,
    ext: Option<&'a ExtensionContext>,
    i: (usize, usize),
) -> impl Fn(usize, usize) -> usize + 'a {
    move |m, n| match ext {
        Some(e) => e.mul(i, (m, n)).0,
        None => ctx.sub(ctx.mul(i.1, m), ctx.mul(i.0, n)),
    }
}

/// `|e_l^{k*}⟩ ⊗ |e_l^k⟩`.
pub fn compatible_product(family: &MubFamily, k: usize, l: usize) -> Ket {
    family.conj_state(k, l).tensor(&family.state(k, l))
}

impl MeanKingBasis {
    /// Builds the basis and its inference table from overlaps, failing if any
    /// Alice outcome is compatible with anything other than exactly one King outcome.
    pub fn build(
        family: &MubFamily,
        ctx: &ArithmeticContext,
        ext: Option<&ExtensionContext>,
        phases: &PhaseSystem,
        tol: f64,
    ) -> Result<Self> {
        let ext = require_extension(ctx, ext)?;
        let n = ctx.dim();
        let bells = bell_basis(family, ctx, 0);
        let states: Vec<Ket> = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                expand(
                    ctx,
                    phases,
                    &bells,
                    king_coefficient(ctx, ext, (idx / n, idx % n)),
                )
            })
            .collect();

        let target = 1.0 / (n as f64).sqrt();
        let inference = (0..=n)
            .into_par_iter()
            .map(|k| {
                let products: Vec<Ket> = (0..n).map(|l| compatible_product(family, k, l)).collect();
                states
                    .iter()
                    .enumerate()
                    .map(|(idx, psi)| {
                        let spectrum: Vec<f64> = products.iter().map(|e| psi.inner(e).norm()).collect();
                        let hits: Vec<usize> = (0..n).filter(|&l| (spectrum[l] - target).abs() <= tol).collect();
                        let rest_zero = (0..n).all(|l| hits.contains(&l) || spectrum[l] <= tol);
                        if hits.len() != 1 || !rest_zero {
                            return Err(Error::Invariant(format!(
                                "no unique compatible outcome for k={k}, (i1,i2)=({},{}): overlaps {spectrum:?}",
                                idx / n,
                                idx % n
                            )));
                        }
                        Ok(hits[0])
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Self {
            dim: n,
            mode: ctx.mode(),
            residue: ext.map(|e| e.residue()),
            states,
            inference,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn residue(&self) -> Option<usize> {
        self.residue
    }

    pub fn state(&self, i1: usize, i2: usize) -> &Ket {
        &self.states[i1 * self.dim + i2]
    }

    pub fn states(&self) -> &[Ket] {
        &self.states
    }

    pub fn inference(&self, k: usize, i1: usize, i2: usize) -> usize {
        self.inference[k][i1 * self.dim + i2]
    }

    pub fn inference_table(&self) -> &[Vec<usize>] {
        &self.inference
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let s = &self.states;
        (0..s.len())
            .into_par_iter()
            .map(|a| {
                (0..s.len())
                    .map(|b| {
                        let expect = if a == b { 1.0 } else { 0.0 };
                        (s[a].inner(&s[b]) - C64::new(expect, 0.0)).norm()
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// `|⟨Ψ_{(i₁,i₂)}|e_l^{k*} e_l^k⟩|` for every l.
    pub fn compatibility_overlaps(
        &self,
        family: &MubFamily,
        k: usize,
        i1: usize,
        i2: usize,
    ) -> Vec<f64> {
        let psi = self.state(i1, i2);
        (0..self.dim)
            .map(|l| psi.inner(&compatible_product(family, k, l)).norm())
            .collect()
    }
}

/// Closed-form inference. Field mode: `l = ⊖(i₂⊙R)` for k = 0 and
/// `l = ⊖(i₁ ⊕ i₂⊙(k−1)⊙R)` otherwise. Modular mode uses the relabelled
/// coefficient, giving `l = i₁` and `l = (k−1)⊙i₁ ⊖ i₂`.
pub fn infer_closed_form(
    ctx: &ArithmeticContext,
    ext: Option<&ExtensionContext>,
    k: usize,
    i1: usize,
    i2: usize,
) -> Result<usize> {
    let n = ctx.dim();
    if k > n {
        return Err(Error::InvalidBasis { k });
    }
    if i1 >= n || i2 >= n {
        return Err(Error::OutOfRange {
            value: i1.max(i2),
            dim: n,
        });
    }
    Ok(match require_extension(ctx, ext)? {
        Some(e) => {
            let r = e.residue();
            if k == 0 {
                ctx.neg(ctx.mul(i2, r))
            } else {
                ctx.neg(ctx.add(i1, ctx.mul(ctx.mul(i2, k - 1), r)))
            }
        }
        None if k == 0 => i1,
        None => ctx.sub(ctx.mul(k - 1, i1), i2),
    })
}

/// Index relabelling `(i₁,i₂) ↦ (i₂, ⊖i₁/R)` with `Ψ'_{(i₁,i₂)} = Ψ_{(i₂, ⊖i₁/R)}`.
pub fn symplectic_relabel(ext: &ExtensionContext, i1: usize, i2: usize) -> (usize, usize) {
    let f = ext.base();
    let r_inv = f.inv(ext.residue()).expect("residue is nonzero");
    (i2, f.mul(f.neg(i1), r_inv))
}

pub fn symplectic_relabel_inverse(ext: &ExtensionContext, j1: usize, j2: usize) -> (usize, usize) {
    let f = ext.base();
    (f.neg(f.mul(j2, ext.residue())), j1)
}

/// `|Ψ'^k_{(i₁,i₂)}⟩ = (1/N) Σ χ(i₂⊙m ⊖ i₁⊙n)·(γ^{m⊙n})^{1/2}·|B_{m,n}^k⟩`.
pub fn primed_state(
    family: &MubFamily,
    ctx: &ArithmeticContext,
    phases: &PhaseSystem,
    k: usize,
    i1: usize,
    i2: usize,
) -> Ket {
    let bells = bell_basis(family, ctx, k);
    expand(ctx, phases, &bells, |m, n| {
        ctx.sub(ctx.mul(i2, m), ctx.mul(i1, n))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelabelReport {
    pub dim: usize,
    pub checked: usize,
    /// `(k, i₁, i₂)` where `Ψ'^k` at the transported index is not `Ψ'^0_{(i₁,i₂)}` as a projector.
    pub violations: Vec<(usize, usize, usize)>,
    pub holds: bool,
}

/// Checks `Ψ'^k_{(j₁,j₂)} ∝ Ψ'^0_{(i₁,i₂)}` with `(j₁,j₂) = ((k−1)⊙i₁ ⊖ i₂, i₁)`
/// for every k ≥ 1. Expected to hold in odd dimensions only.
pub fn relabel_transport_report(
    family: &MubFamily,
    ctx: &ArithmeticContext,
    phases: &PhaseSystem,
    tol: f64,
) -> RelabelReport {
    let n = ctx.dim();
    let coef =
        |i1: usize, i2: usize| move |m: usize, k: usize| ctx.sub(ctx.mul(i2, m), ctx.mul(i1, k));
    let reference_bells = bell_basis(family, ctx, 0);
    let reference: Vec<Ket> = (0..n * n)
        .map(|idx| expand(ctx, phases, &reference_bells, coef(idx / n, idx % n)))
        .collect();
    let violations: Vec<(usize, usize, usize)> = (1..=n)
        .into_par_iter()
        .flat_map_iter(|k| {
            let bells = bell_basis(family, ctx, k);
            let mut bad = Vec::new();
            for i1 in 0..n {
                for i2 in 0..n {
                    let (j1, j2) = symplectic_transport(ctx, k, (i1, i2));
                    let moved = expand(ctx, phases, &bells, coef(j1, j2));
                    if (reference[i1 * n + i2].inner(&moved).norm() - 1.0).abs() > tol {
                        bad.push((k, i1, i2));
                    }
                }
            }
            bad
        })
        .collect();
    RelabelReport {
        dim: n,
        checked: n * n * n,
        holds: violations.is_empty(),
        violations,
    }
}

/// Expanding each Ψ in Bell basis k gives coefficients of modulus 1/N, and the
/// product states `|e_l^{k*} e_l^k⟩` only see the `m = 0` Bell states of that basis.
pub fn basis_expansion_check(
    family: &MubFamily,
    ctx: &ArithmeticContext,
    basis: &MeanKingBasis,
    tol: f64,
) -> Result<()> {
    let n = ctx.dim();
    let inv_n = 1.0 / n as f64;
    (0..=n).into_par_iter().try_for_each(|k| {
        let bells = bell_basis(family, ctx, k);
        for l in 0..n {
            let product = compatible_product(family, k, l);
            for m in 1..n {
                for nn in 0..n {
                    if bells[m * n + nn].inner(&product).norm() > tol {
                        return Err(Error::Invariant(format!(
                            "B^{k}_({m},{nn}) overlaps product state l={l}"
                        )));
                    }
                }
            }
        }
        for (idx, psi) in basis.states.iter().enumerate() {
            for (b, bell) in bells.iter().enumerate() {
                let c = bell.inner(psi).norm();
                if (c - inv_n).abs() > tol {
                    return Err(Error::Invariant(format!(
                        "Bell-{k} coefficient {b} of state {idx} has modulus {c}, expected {inv_n}"
                    )));
                }
            }
        }
        Ok(())
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineReport {
    pub states: usize,
    /// States with `l(k) = (k−1)⊙l(0) ⊕ l(1)` for every k ≥ 1.
    pub affine: usize,
    pub all_affine: bool,
}

/// For each Alice outcome, reads off the compatible outcomes `l(k)` and checks
/// that they lie on the affine family `l(k) = (k−1)⊙l(0) ⊕ l(1)`.
pub fn affine_compatibility_report(ctx: &ArithmeticContext, basis: &MeanKingBasis) -> AffineReport {
    let n = ctx.dim();
    let table = basis.inference_table();
    let affine = (0..n * n)
        .filter(|&idx| {
            let k0 = table[0][idx];
            let k1 = table[1][idx];
            (1..=n).all(|k| table[k][idx] == ctx.add(ctx.mul(k - 1, k0), k1))
        })
        .count();
    AffineReport {
        states: n * n,
        affine,
        all_affine: affine == n * n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolMode {
    Exhaustive,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct HistogramEntry {
    pub k: usize,
    pub l: usize,
    pub i1: usize,
    pub i2: usize,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolReport {
    pub dim: usize,
    pub field_mode: Mode,
    pub mode: ProtocolMode,
    pub seed: u64,
    pub trials: u64,
    pub successes: u64,
    /// Probability-weighted success over a uniformly chosen King basis (exhaustive mode).
    pub success_probability: Option<f64>,
    pub histogram: Vec<HistogramEntry>,
}

impl ProtocolReport {
    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    pub fn perfect(&self) -> bool {
        self.trials > 0 && self.successes == self.trials
    }
}

/// Outcome probabilities of every branch, with the protocol invariants checked.
struct Branches {
    /// `king[k][l]`
    king: Vec<Vec<f64>>,
    /// `alice[k][l][i₁·N+i₂]`
    alice: Vec<Vec<Vec<f64>>>,
}

/// Projects the second factor of `psi` onto `e` without normalizing.
fn project_second(psi: &Ket, e: &Ket) -> Ket {
    let n = e.dim();
    let mut amps = vec![C64::new(0.0, 0.0); n * n];
    for a in 0..n {
        let c: C64 = (0..n).map(|b| e.get(b).conj() * psi.get(a * n + b)).sum();
        for b in 0..n {
            amps[a * n + b] = c * e.get(b);
        }
    }
    Ket::from_vec(amps)
}

fn branches(basis: &MeanKingBasis, family: &MubFamily, tol: f64) -> Result<Branches> {
    let n = basis.dim;
    let inv_n = 1.0 / n as f64;
    let start = Ket::from_vec(
        (0..n * n)
            .map(|i| {
                C64::new(
                    if i % (n + 1) == 0 {
                        (inv_n).sqrt()
                    } else {
                        0.0
                    },
                    0.0,
                )
            })
            .collect(),
    );
    let per_k: Vec<(Vec<f64>, Vec<Vec<f64>>)> = (0..=n)
        .into_par_iter()
        .map(|k| {
            let mut king = Vec::with_capacity(n);
            let mut alice = Vec::with_capacity(n);
            for l in 0..n {
                let post = project_second(&start, &family.state(k, l));
                let pk = post.norm().powi(2);
                if (pk - inv_n).abs() > tol {
                    return Err(Error::Invariant(format!("King outcome ({k},{l}) has probability {pk}, expected {inv_n}")));
                }
                let post = post.normalized();
                let probs: Vec<f64> = basis.states.iter().map(|psi| psi.inner(&post).norm_sqr()).collect();
                let support: Vec<f64> = probs.iter().copied().filter(|&p| p > tol).collect();
                if support.len() != n || support.iter().any(|p| (p - inv_n).abs() > tol) {
                    return Err(Error::Invariant(format!(
                        "Alice's conditional distribution for ({k},{l}) is not uniform on {n} outcomes"
                    )));
                }
                king.push(pk);
                alice.push(probs);
            }
            Ok((king, alice))
        })
        .collect::<Result<_>>()?;
    let (king, alice) = per_k.into_iter().unzip();
    Ok(Branches { king, alice })
}

pub fn run_protocol(
    basis: &MeanKingBasis,
    family: &MubFamily,
    mode: ProtocolMode,
    trials: u64,
    seed: u64,
    tol: f64,
) -> Result<ProtocolReport> {
    let n = basis.dim;
    let table = branches(basis, family, tol)?;
    let mut histogram: BTreeMap<(usize, usize, usize), u64> = BTreeMap::new();
    let mut successes = 0;
    let mut total = 0;
    let mut success_probability = None;

    match mode {
        ProtocolMode::Exhaustive => {
            let mut prob = 0.0;
            for k in 0..=n {
                for l in 0..n {
                    for (idx, &pa) in table.alice[k][l].iter().enumerate() {
                        if pa <= tol {
                            continue;
                        }
                        total += 1;
                        *histogram.entry((k, l, idx)).or_default() += 1;
                        if basis.inference[k][idx] == l {
                            successes += 1;
                            prob += table.king[k][l] * pa / (n + 1) as f64;
                        }
                    }
                }
            }
            success_probability = Some(prob);
        }
        ProtocolMode::MonteCarlo => {
            let king_dists: Vec<WeightedIndex<f64>> = table
                .king
                .iter()
                .map(|w| WeightedIndex::new(w).expect("valid weights"))
                .collect();
            let alice_dists: Vec<Vec<WeightedIndex<f64>>> = table
                .alice
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|w| WeightedIndex::new(w).expect("valid weights"))
                        .collect()
                })
                .collect();
            let (hist, wins) = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(t);
                    let k = rng.random_range(0..=n);
                    let l = king_dists[k].sample(&mut rng);
                    let idx = alice_dists[k][l].sample(&mut rng);
                    ((k, l, idx), basis.inference[k][idx] == l)
                })
                .fold(
                    || (BTreeMap::new(), 0u64),
                    |(mut h, w), (key, ok)| {
                        *h.entry(key).or_insert(0u64) += 1;
                        (h, w + ok as u64)
                    },
                )
                .reduce(
                    || (BTreeMap::new(), 0u64),
                    |(mut a, wa), (b, wb)| {
                        for (key, c) in b {
                            *a.entry(key).or_insert(0) += c;
                        }
                        (a, wa + wb)
                    },
                );
            histogram = hist;
            successes = wins;
            total = trials;
        }
    }

    Ok(ProtocolReport {
        dim: n,
        field_mode: basis.mode,
        mode,
        seed,
        trials: total,
        successes,
        success_probability,
        histogram: histogram
            .into_iter()
            .map(|((k, l, idx), count)| HistogramEntry {
                k,
                l,
                i1: idx / n,
                i2: idx % n,
                count,
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DEFAULT_TOL;

    struct Setup {
        ctx: ArithmeticContext,
        ext: Option<ExtensionContext>,
        phases: PhaseSystem,
        family: MubFamily,
    }

    fn setup(ctx: ArithmeticContext) -> Setup {
        let ext = ExtensionContext::build(&ctx).ok();
        let phases = PhaseSystem::build(&ctx).unwrap();
        let family = MubFamily::build(&ctx, &phases);
        Setup {
            ctx,
            ext,
            phases,
            family,
        }
    }

    fn galois(p: usize, m: usize) -> Setup {
        setup(ArithmeticContext::galois(p, m).unwrap())
    }

    fn basis(s: &Setup) -> MeanKingBasis {
        MeanKingBasis::build(&s.family, &s.ctx, s.ext.as_ref(), &s.phases, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn qubit_basis_matches_printed_states() {
        // The four qubit states, normalized with prefactor 1/2 on the Bell expansion
        let s = galois(2, 1);
        let b = basis(&s);
        let bells = bell_basis(&s.family, &s.ctx, 0);
        let i = C64::new(0.0, 1.0);
        let one = C64::new(1.0, 0.0);
        let half = C64::new(0.5, 0.0);
        let combos = [
            [one, one, one, i],
            [one, one, -one, -i],
            [one, -one, one, -i],
            [one, -one, -one, i],
        ];
        for c in combos {
            let mut target = Ket::zeros(4);
            for (idx, w) in c.iter().enumerate() {
                target.add_scaled(*w * half, &bells[idx]);
            }
            let hits = b
                .states()
                .iter()
                .filter(|psi| (psi.inner(&target).norm() - 1.0).abs() < 1e-9)
                .count();
            assert_eq!(hits, 1);
        }
    }

    #[test]
    fn orthonormal_and_closed_form_agrees() {
        for (p, m) in [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2)] {
            let s = galois(p, m);
            let b = basis(&s);
            assert!(b.orthonormality_error() < 1e-9);
            let n = s.ctx.dim();
            for k in 0..=n {
                for i1 in 0..n {
                    for i2 in 0..n {
                        let l = infer_closed_form(&s.ctx, s.ext.as_ref(), k, i1, i2).unwrap();
                        assert_eq!(l, b.inference(k, i1, i2), "N={n} k={k} ({i1},{i2})");
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let s = galois(3, 1);
        assert_eq!(s.ext.as_ref().unwrap().residue(), 2);
        assert_eq!(
            infer_closed_form(&s.ctx, s.ext.as_ref(), 0, 0, 1).unwrap(),
            1
        );
        for k in 0..=3 {
            assert_eq!(
                infer_closed_form(&s.ctx, s.ext.as_ref(), k, 0, 0).unwrap(),
                0
            );
        }
        assert!(infer_closed_form(&s.ctx, None, 0, 0, 0).is_err());
    }

    #[test]
    fn modular_mode_solvable() {
        let s = setup(ArithmeticContext::modular(9).unwrap());
        let b = basis(&s);
        for k in 0..=9 {
            for i1 in 0..9 {
                for i2 in 0..9 {
                    assert_eq!(
                        infer_closed_form(&s.ctx, None, k, i1, i2).unwrap(),
                        b.inference(k, i1, i2)
                    );
                }
            }
        }
        let report =
            run_protocol(&b, &s.family, ProtocolMode::Exhaustive, 0, 0, DEFAULT_TOL).unwrap();
        assert!(report.perfect());
    }

    #[test]
    fn relabel_is_bijective() {
        let s = galois(3, 2);
        let ext = s.ext.as_ref().unwrap();
        let mut seen = std::collections::HashSet::new();
        for i1 in 0..9 {
            for i2 in 0..9 {
                let j = symplectic_relabel(ext, i1, i2);
                assert_eq!(symplectic_relabel_inverse(ext, j.0, j.1), (i1, i2));
                seen.insert(j);
            }
        }
        assert_eq!(seen.len(), 81);
    }

    #[test]
    fn primed_states_are_relabelled_basis() {
        let s = galois(5, 1);
        let b = basis(&s);
        let ext = s.ext.as_ref().unwrap();
        for i1 in 0..5 {
            for i2 in 0..5 {
                let (j1, j2) = symplectic_relabel(ext, i1, i2);
                let primed = primed_state(&s.family, &s.ctx, &s.phases, 0, i1, i2);
                assert!(primed.approx_eq(b.state(j1, j2), 1e-9));
            }
        }
    }

    #[test]
    fn transport_law_odd_holds_even_fails() {
        for (p, m) in [(3, 1), (5, 1)] {
            let s = galois(p, m);
            let r = relabel_transport_report(&s.family, &s.ctx, &s.phases, DEFAULT_TOL);
            assert!(r.holds, "N={}", s.ctx.dim());
        }
        let s = galois(2, 1);
        let r = relabel_transport_report(&s.family, &s.ctx, &s.phases, DEFAULT_TOL);
        assert_eq!(r.violations.len(), 4);
    }

    #[test]
    fn expansion_and_affine_structure() {
        let s = galois(2, 2);
        let b = basis(&s);
        basis_expansion_check(&s.family, &s.ctx, &b, DEFAULT_TOL).unwrap();
        assert!(affine_compatibility_report(&s.ctx, &b).all_affine);
    }

    #[test]
    fn exhaustive_protocol_counts() {
        let s = galois(3, 1);
        let b = basis(&s);
        let r = run_protocol(&b, &s.family, ProtocolMode::Exhaustive, 0, 7, DEFAULT_TOL).unwrap();
        // (N+1)·N King branches, each with N compatible Alice outcomes
        assert_eq!(r.trials, 4 * 3 * 3);
        assert!(r.perfect());
        assert!((r.success_probability.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let s = galois(2, 2);
        let b = basis(&s);
        let a = run_protocol(
            &b,
            &s.family,
            ProtocolMode::MonteCarlo,
            2000,
            11,
            DEFAULT_TOL,
        )
        .unwrap();
        let c = run_protocol(
            &b,
            &s.family,
            ProtocolMode::MonteCarlo,
            2000,
            11,
            DEFAULT_TOL,
        )
        .unwrap();
        assert_eq!(a, c);
        assert!(a.perfect());
        assert_eq!(a.histogram.iter().map(|h| h.count).sum::<u64>(), 2000);
    }
}

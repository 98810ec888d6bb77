//! Property suites run for one dimension and mode, reported as a pass/fail table.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::{
    bell_basis, bell_transform, pauli_conjugation_check, symplectic_form,
    symplectic_transport_inverse, transform_violations,
};
use crate::error::Result;
use crate::galois::{ArithmeticContext, Mode};
use crate::linalg::{partial_trace, Operator, Subsystem, C64};
use crate::meanking::{
    affine_compatibility_report, basis_expansion_check, infer_closed_form,
    relabel_transport_report, run_protocol, MeanKingBasis, ProtocolMode,
};
use crate::mub::joint_eigenbasis_check;
use crate::pauli::{
    adjoint_violations, all_tuples, cocycle_violations, composition_violations, displacement_v,
    group_law_violations, hs_orthogonality_error, qubit_paulis,
};
use crate::system::QuditSystem;
use crate::wigner::{
    distinct_from_displacements, marginal_violations, parity_operators, reconstruct_from_weyl,
    wigner_from_sum_form, wigner_function, WignerOperatorSet,
};

/// Dimensions at or below this are swept exhaustively; larger ones are sampled.
pub const EXHAUSTIVE_LIMIT: usize = 5;
pub const SAMPLED_TUPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Field,
    Pauli,
    Mub,
    Bell,
    King,
    Wigner,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Field,
        Suite::Pauli,
        Suite::Mub,
        Suite::Bell,
        Suite::King,
        Suite::Wigner,
    ];

    fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Self::EACH.to_vec(),
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Field => "field",
            Suite::Pauli => "pauli",
            Suite::Mub => "mub",
            Suite::Bell => "bell",
            Suite::King => "king",
            Suite::Wigner => "wigner",
            Suite::All => "all",
        };
        f.write_str(s)
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::EACH
            .iter()
            .chain([Suite::All].iter())
            .find(|x| x.to_string() == s)
            .copied()
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    /// Report-only checks record an expected failure or a measured quantity.
    pub asserted: bool,
    pub detail: String,
}

impl Check {
    fn new(suite: Suite, name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            suite,
            name: name.into(),
            passed,
            asserted: true,
            detail: detail.into(),
        }
    }

    fn report(suite: Suite, name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            asserted: false,
            ..Self::new(suite, name, passed, detail)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub version: String,
    pub dim: usize,
    pub mode: Mode,
    pub irreducible: Option<Vec<usize>>,
    pub seed: u64,
    pub tol: f64,
    pub checks: Vec<Check>,
    pub all_passed: bool,
}

impl VerifyReport {
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

pub fn run_suite(system: &QuditSystem, suite: Suite, seed: u64, tol: f64) -> Result<VerifyReport> {
    let suites = suite.expand();
    let results: Vec<Result<Vec<Check>>> = suites
        .par_iter()
        .map(|s| match s {
            Suite::Field => Ok(field_checks(system)),
            Suite::Pauli => pauli_checks(system, seed, tol),
            Suite::Mub => Ok(mub_checks(system, seed, tol)),
            Suite::Bell => Ok(bell_checks(system, seed, tol)),
            Suite::King => Ok(king_checks(system, seed, tol)),
            Suite::Wigner => Ok(wigner_checks(system, seed, tol)),
            Suite::All => unreachable!("expanded above"),
        })
        .collect();
    let mut checks = Vec::new();
    for r in results {
        checks.extend(r?);
    }
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        dim: system.dim(),
        mode: system.mode(),
        irreducible: system.ctx.irreducible().map(<[usize]>::to_vec),
        seed,
        tol,
        checks,
        all_passed,
    })
}

fn count_detail(bad: usize, total: usize) -> String {
    format!("{bad} of {total} fail")
}

fn field_checks(sys: &QuditSystem) -> Vec<Check> {
    let s = Suite::Field;
    let f = &sys.ctx;
    let n = f.dim();
    let mut out = Vec::new();

    let mut bad = 0;
    for a in 0..n {
        for b in 0..n {
            if f.add(a, b) != f.add(b, a) || f.mul(a, b) != f.mul(b, a) {
                bad += 1;
            }
            for c in 0..n {
                let assoc = f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
                    && f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c));
                let dist = f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c));
                if !(assoc && dist) {
                    bad += 1;
                }
            }
        }
        if f.add(a, f.neg(a)) != 0 || f.add(a, 0) != a || f.mul(a, 1) != a {
            bad += 1;
        }
    }
    out.push(Check::new(
        s,
        "ring axioms",
        bad == 0,
        count_detail(bad, n * n * (n + 1) + n),
    ));

    if f.mode() == Mode::Galois {
        let bad = (1..n)
            .filter(|&a| f.inv(a).map(|x| f.mul(a, x)) != Some(1))
            .count();
        out.push(Check::new(
            s,
            "multiplicative inverses",
            bad == 0,
            count_detail(bad, n - 1),
        ));
    } else {
        let units = (1..n).filter(|&a| f.inv(a).is_some()).count();
        out.push(Check::report(
            s,
            "units in Z_N",
            true,
            format!("{units} invertible of {}", n - 1),
        ));
    }

    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            worst = worst.max((f.chi(a) * f.chi(b) - f.chi(f.add(a, b))).norm());
        }
    }
    out.push(Check::new(
        s,
        "character homomorphism",
        worst < 1e-12,
        format!("max deviation {worst:.2e}"),
    ));

    let mut worst: f64 = 0.0;
    for i in 0..n {
        let sum: C64 = (0..n).map(|j| f.chi(f.mul(j, i))).sum();
        let expect = if i == 0 { n as f64 } else { 0.0 };
        worst = worst.max((sum - C64::new(expect, 0.0)).norm());
    }
    out.push(Check::new(
        s,
        "character orthogonality sum",
        worst < 1e-9,
        format!("max deviation {worst:.2e}"),
    ));

    if f.is_odd() {
        let bad = (0..n)
            .filter(|&g| f.half(g).map(|h| f.add(h, h)) != Ok(g))
            .count();
        out.push(Check::new(s, "halving", bad == 0, count_detail(bad, n)));
    }

    if let Some(ext) = &sys.ext {
        let [c0, c1, _] = ext.quadratic();
        let roots = (0..n)
            .filter(|&t| f.add(f.add(f.mul(t, t), f.mul(c1, t)), c0) == 0)
            .count();
        out.push(Check::new(
            s,
            "extension quadratic irreducible",
            roots == 0,
            format!("{roots} roots in the base field"),
        ));
        let nn = n * n;
        // x^(N²−1) = 1 for every nonzero x exactly when the extension is a field
        let bad = (1..nn)
            .filter(|&x| {
                let (mut base, mut e, mut acc) = (ext.pair(x), nn - 1, (1, 0));
                while e > 0 {
                    if e & 1 == 1 {
                        acc = ext.mul(acc, base);
                    }
                    base = ext.mul(base, base);
                    e >>= 1;
                }
                acc != (1, 0)
            })
            .count();
        out.push(Check::new(
            s,
            "extension is a field",
            bad == 0 && ext.residue() != 0,
            format!("residue R = {}", ext.residue()),
        ));
    }
    out
}

fn pauli_checks(sys: &QuditSystem, seed: u64, tol: f64) -> Result<Vec<Check>> {
    let s = Suite::Pauli;
    let f = &sys.ctx;
    let n = f.dim();
    let mut out = Vec::new();

    let (bad, total, how) = if n <= EXHAUSTIVE_LIMIT {
        (
            composition_violations(f, all_tuples(n), tol).len(),
            n.pow(4),
            "exhaustive",
        )
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tuples: Vec<_> = (0..SAMPLED_TUPLES)
            .map(|_| {
                (
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                )
            })
            .collect();
        (
            composition_violations(f, tuples, tol).len(),
            SAMPLED_TUPLES,
            "sampled",
        )
    };
    out.push(Check::new(
        s,
        "composition law",
        bad == 0,
        format!("{} ({how})", count_detail(bad, total)),
    ));

    let bad = adjoint_violations(f, tol).len();
    out.push(Check::new(
        s,
        "adjoint formula",
        bad == 0,
        count_detail(bad, n * n),
    ));

    let bad = (0..n * n)
        .filter(|x| !displacement_v(f, x / n, x % n).is_unitary(tol))
        .count();
    out.push(Check::new(
        s,
        "unitarity",
        bad == 0,
        count_detail(bad, n * n),
    ));

    let err = hs_orthogonality_error(f);
    out.push(Check::new(
        s,
        "Hilbert-Schmidt orthogonality",
        err <= tol,
        format!("max deviation {err:.2e}"),
    ));

    let bad = cocycle_violations(f, &sys.phases, tol);
    out.push(Check::new(
        s,
        "square-root phase cocycle",
        bad == 0,
        count_detail(bad, n * n * n),
    ));

    let bad = group_law_violations(f, &sys.phases, tol)?.len();
    out.push(Check::new(
        s,
        "class group law",
        bad == 0,
        count_detail(bad, (n + 1) * n * n),
    ));
    Ok(out)
}

fn mub_checks(sys: &QuditSystem, seed: u64, tol: f64) -> Vec<Check> {
    let s = Suite::Mub;
    let n = sys.dim();
    let mut out = Vec::new();
    let rep = sys.family.unbiasedness_report(tol);
    out.push(Check::new(
        s,
        "bases orthonormal",
        rep.orthonormal_bases == n + 1,
        format!("{} of {}", rep.orthonormal_bases, n + 1),
    ));
    let detail = format!(
        "{} of {} pairs unbiased",
        rep.unbiased_pairs, rep.total_pairs
    );
    match rep.conjecture_bound {
        Some(bound) if !rep.all_unbiased => out.push(Check::report(
            s,
            "pairwise unbiasedness",
            true,
            format!("{detail}; bound p+1 = {bound}"),
        )),
        _ => out.push(Check::new(
            s,
            "pairwise unbiasedness",
            rep.all_unbiased,
            detail,
        )),
    }
    let eig = sys.family.verify_eigenbasis(&sys.ctx, &sys.phases, tol);
    out.push(Check::new(
        s,
        "class eigenbases",
        eig.passed(),
        count_detail(eig.violations.len(), eig.checked),
    ));
    let joint = joint_eigenbasis_check(&sys.family, &sys.ctx, seed, 1e-6);
    out.push(Check::new(
        s,
        "joint eigenbasis by diagonalization",
        joint.passed(),
        format!("mismatched classes {:?}", joint.mismatched_classes),
    ));
    out
}

fn bell_checks(sys: &QuditSystem, seed: u64, tol: f64) -> Vec<Check> {
    let s = Suite::Bell;
    let f = &sys.ctx;
    let n = f.dim();
    let mut out = Vec::new();
    let mixed = Operator::identity(n).scale(C64::new(1.0 / n as f64, 0.0));

    let (mut gram_bad, mut ent_bad) = (0, 0);
    for k in 0..=n {
        let basis = bell_basis(&sys.family, f, k);
        let m = Operator::from_columns(&basis);
        if !m.is_unitary(tol) {
            gram_bad += 1;
        }
        ent_bad += basis
            .iter()
            .filter(|b| {
                !partial_trace(&b.projector(), Subsystem::First)
                    .is_ok_and(|r| r.approx_eq(&mixed, tol))
            })
            .count();
    }
    out.push(Check::new(
        s,
        "Bell bases orthonormal",
        gram_bad == 0,
        count_detail(gram_bad, n + 1),
    ));
    out.push(Check::new(
        s,
        "maximal entanglement",
        ent_bad == 0,
        count_detail(ent_bad, (n + 1) * n * n),
    ));

    let bad = transform_violations(&sys.family, f, &sys.phases, tol);
    out.push(Check::new(
        s,
        "basis-change law",
        bad == 0,
        count_detail(bad, n * n * n),
    ));

    let mut bijective = true;
    for k in 1..=n {
        let mut seen = vec![false; n * n];
        for idx in 0..n * n {
            let img = bell_transform(f, &sys.phases, k, idx / n, idx % n).expect("valid indices");
            seen[img.m * n + img.n] = true;
        }
        bijective &= seen.iter().all(|&x| x);
    }
    out.push(Check::new(s, "basis-change index bijection", bijective, ""));

    let tuples: Vec<(usize, usize, usize, usize)> = if n <= EXHAUSTIVE_LIMIT {
        all_tuples(n).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..1000)
            .map(|_| {
                (
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                )
            })
            .collect()
    };
    let bad = tuples
        .par_iter()
        .filter(|&&(i, j, m, k)| pauli_conjugation_check(&sys.family, f, i, j, m, k, tol).is_err())
        .count();
    out.push(Check::new(
        s,
        "Pauli invariance",
        bad == 0,
        count_detail(bad, tuples.len()),
    ));

    if f.is_odd() {
        let mut bad = 0;
        for k in 1..=n {
            for a in 0..n * n {
                for b in 0..n * n {
                    let (pa, pb) = ((a / n, a % n), (b / n, b % n));
                    let before = symplectic_form(f, pa, pb);
                    let after = symplectic_form(
                        f,
                        symplectic_transport_inverse(f, k, pa),
                        symplectic_transport_inverse(f, k, pb),
                    );
                    if before != after {
                        bad += 1;
                    }
                }
            }
        }
        out.push(Check::new(
            s,
            "symplectic form preserved",
            bad == 0,
            count_detail(bad, n * n.pow(4)),
        ));
    }
    out
}

fn king_checks(sys: &QuditSystem, seed: u64, tol: f64) -> Vec<Check> {
    let s = Suite::King;
    let f = &sys.ctx;
    let n = f.dim();
    let mut out = Vec::new();
    let basis = match MeanKingBasis::build(&sys.family, f, sys.ext.as_ref(), &sys.phases, tol) {
        Ok(b) => b,
        Err(e) => {
            out.push(Check::new(
                s,
                "unique compatible outcome",
                false,
                e.to_string(),
            ));
            return out;
        }
    };
    out.push(Check::new(
        s,
        "unique compatible outcome",
        true,
        format!("{} outcomes x {} bases", n * n, n + 1),
    ));

    let err = basis.orthonormality_error();
    out.push(Check::new(
        s,
        "measurement basis orthonormal",
        err <= tol,
        format!("max deviation {err:.2e}"),
    ));

    let mut bad = 0;
    for k in 0..=n {
        for i1 in 0..n {
            for i2 in 0..n {
                if infer_closed_form(f, sys.ext.as_ref(), k, i1, i2).ok()
                    != Some(basis.inference(k, i1, i2))
                {
                    bad += 1;
                }
            }
        }
    }
    out.push(Check::new(
        s,
        "closed-form inference",
        bad == 0,
        count_detail(bad, (n + 1) * n * n),
    ));

    match run_protocol(&basis, &sys.family, ProtocolMode::Exhaustive, 0, seed, tol) {
        Ok(r) => out.push(Check::new(
            s,
            "exhaustive protocol",
            r.perfect(),
            format!("{} of {} branches inferred", r.successes, r.trials),
        )),
        Err(e) => out.push(Check::new(s, "exhaustive protocol", false, e.to_string())),
    }

    let r = basis_expansion_check(&sys.family, f, &basis, tol);
    out.push(Check::new(
        s,
        "Bell-basis expansion support",
        r.is_ok(),
        r.err().map(|e| e.to_string()).unwrap_or_default(),
    ));

    let rel = relabel_transport_report(&sys.family, f, &sys.phases, tol);
    let detail = count_detail(rel.violations.len(), rel.checked);
    if f.is_odd() {
        out.push(Check::new(
            s,
            "relabelled basis transport",
            rel.holds,
            detail,
        ));
    } else {
        out.push(Check::report(
            s,
            "relabelled basis transport (even, expected to fail)",
            !rel.holds,
            detail,
        ));
    }

    let aff = affine_compatibility_report(f, &basis);
    out.push(Check::report(
        s,
        "affine compatibility pattern",
        true,
        format!("{} of {} outcomes affine", aff.affine, aff.states),
    ));
    out
}

fn wigner_checks(sys: &QuditSystem, seed: u64, tol: f64) -> Vec<Check> {
    let s = Suite::Wigner;
    let f = &sys.ctx;
    let n = f.dim();
    let mut out = Vec::new();
    let set = match WignerOperatorSet::build(f, &sys.phases) {
        Ok(set) => set,
        Err(e) => {
            out.push(Check::report(
                s,
                "Wigner operators",
                true,
                format!("skipped: {e}"),
            ));
            return out;
        }
    };
    let err = set.structure_error();
    out.push(Check::new(
        s,
        "hermitian, trace 1, orthogonal",
        err <= tol,
        format!("max deviation {err:.2e}"),
    ));
    let err = set.turnover_error(&sys.family, f, &sys.phases);
    out.push(Check::new(
        s,
        "equals turned-over measurement states",
        err <= tol,
        format!("max deviation {err:.2e}"),
    ));

    let bad = marginal_violations(&set, &sys.family, f, [0], tol).len();
    out.push(Check::new(
        s,
        "computational striation marginals",
        bad == 0,
        count_detail(bad, n),
    ));
    let bad = marginal_violations(&set, &sys.family, f, 0..=n, tol).len();
    out.push(Check::new(
        s,
        "all striation marginals",
        bad == 0,
        count_detail(bad, n * (n + 1)),
    ));

    if n == 2 {
        let [id, x, z, y] = qubit_paulis();
        let sum = &(&(&id + &x) + &z) + &y;
        let ok = set.get(0, 0).scale(C64::new(2.0, 0.0)).approx_eq(&sum, tol);
        out.push(Check::new(s, "qubit Pauli sum", ok, ""));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let op = Operator::from_fn(n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let ok = reconstruct_from_weyl(f, &sys.phases, &op).approx_eq(&op, tol);
    out.push(Check::new(s, "Weyl reconstruction", ok, ""));

    if f.is_odd() {
        match parity_operators(f, &sys.phases, tol) {
            Ok(par) => {
                let bad = set
                    .operators()
                    .iter()
                    .zip(&par.displaced)
                    .filter(|(w, d)| !w.approx_eq(d, tol))
                    .count();
                out.push(Check::new(
                    s,
                    "displaced parity",
                    bad == 0,
                    count_detail(bad, n * n),
                ));
            }
            Err(e) => out.push(Check::new(s, "displaced parity", false, e.to_string())),
        }
        let rho = {
            let h = &op * &op.adjoint();
            let t = h.trace();
            h.scale(t.inv())
        };
        let mut worst: f64 = 0.0;
        for i1 in 0..n {
            for i2 in 0..n {
                let direct = wigner_function(&set, &rho, i1, i2, tol).unwrap_or(f64::NAN);
                let fourier = wigner_from_sum_form(f, &rho, i1, i2)
                    .map(|c| (c - C64::new(direct, 0.0)).norm());
                worst = worst.max(fourier.unwrap_or(f64::INFINITY));
            }
        }
        out.push(Check::new(
            s,
            "symplectic Fourier of Weyl function",
            worst <= tol,
            format!("max deviation {worst:.2e}"),
        ));
    } else {
        let distinct = distinct_from_displacements(&set, f, &sys.phases, tol);
        out.push(Check::new(
            s,
            "distinct from displacement operators",
            distinct,
            "",
        ));
    }
    out
}

/// Convenience for callers that only need the pass/fail answer.
pub fn verify(mode: Mode, dim: usize, suite: Suite, seed: u64, tol: f64) -> Result<VerifyReport> {
    let ctx = ArithmeticContext::for_dimension(mode, dim)?;
    run_suite(&QuditSystem::from_context(ctx)?, suite, seed, tol)
}

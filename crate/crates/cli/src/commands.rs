use std::fmt::Write as _;
use std::fs;

use anyhow::Context;
use meanking_core::bell::bell_transform;
use meanking_core::linalg::serde_complex;
use meanking_core::meanking::{run_protocol, MeanKingBasis, ProtocolMode};
use meanking_core::pauli::displacement_u;
use meanking_core::verify::{run_suite, Suite};
use meanking_core::wigner::{marginal, weyl_function, wigner_grid, WignerOperatorSet};
use meanking_core::{build_context, ArithmeticContext, Error, Mode, Operator, QuditSystem, C64};
use serde::Serialize;
use serde_json::json;

use crate::{
    check_admissible, BellAction, Cli, Command, FieldAction, KingAction, PauliAction, Target,
};

#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or inadmissible dimension (exit 2).
    Usage(String),
    /// A checked property did not hold (exit 1).
    Invariant(String),
    Other(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(msg) => Failure::Invariant(msg),
            Error::NotPrime(_)
            | Error::InvalidDegree(_)
            | Error::InvalidDimension(..)
            | Error::EvenCharacteristic(_)
            | Error::WrongMode { .. }
            | Error::InvalidBasis { .. }
            | Error::InvalidClass { .. }
            | Error::OutOfRange { .. } => Failure::Usage(e.to_string()),
            other => Failure::Other(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

type Outcome = Result<(), Failure>;

#[derive(Debug, Serialize)]
struct Header {
    tool: &'static str,
    version: &'static str,
    mode: Mode,
    dim: usize,
    irreducible: Option<Vec<usize>>,
}

impl Header {
    fn new(ctx: &ArithmeticContext) -> Self {
        Self {
            tool: "meanking",
            version: env!("CARGO_PKG_VERSION"),
            mode: ctx.mode(),
            dim: ctx.dim(),
            irreducible: ctx.irreducible().map(<[usize]>::to_vec),
        }
    }

    fn comment(&self) -> String {
        let poly = match &self.irreducible {
            Some(c) => format!(", irreducible {c:?}"),
            None => String::new(),
        };
        format!(
            "# {} {} {} N={}{poly}\n",
            self.tool, self.version, self.mode, self.dim
        )
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    #[serde(flatten)]
    header: &'a Header,
    #[serde(flatten)]
    body: T,
}

fn to_json<T: Serialize>(header: &Header, body: T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope { header, body })?;
    s.push('\n');
    Ok(s)
}

fn emit(cli: &Cli, text: &str) -> anyhow::Result<()> {
    match &cli.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn system(target: Target) -> Result<QuditSystem, Failure> {
    check_admissible(target)?;
    Ok(QuditSystem::new(target.mode, target.dim)?)
}

fn fmt_c(c: C64) -> String {
    let re = if c.re.abs() < 5e-13 { 0.0 } else { c.re };
    let im = if c.im.abs() < 5e-13 { 0.0 } else { c.im };
    format!("{re:+.6}{im:+.6}i")
}

fn fmt_matrix(op: &Operator) -> String {
    let mut s = String::new();
    for r in 0..op.dim() {
        let row: Vec<String> = (0..op.dim()).map(|c| fmt_c(op.get(r, c))).collect();
        let _ = writeln!(s, "  [{}]", row.join(", "));
    }
    s
}

pub fn dispatch(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Field {
            action: FieldAction::Info { mode, p, m, json },
        } => field_info(cli, *mode, *p, *m, *json),
        Command::Pauli {
            action:
                PauliAction::Dump {
                    target,
                    class,
                    json,
                },
        } => pauli_dump(cli, *target, *class, *json),
        Command::Mub { target, json, csv } => mub(cli, *target, *json, *csv),
        Command::Bell {
            action: BellAction::Map { target, k, json },
        } => bell_map(cli, *target, *k, *json),
        Command::King {
            action:
                KingAction::Run {
                    target,
                    trials,
                    seed,
                    exhaustive,
                    json,
                },
        } => king_run(cli, *target, *trials, *seed, *exhaustive, *json),
        Command::Wigner {
            dim,
            state,
            weyl,
            json,
        } => wigner(cli, *dim, state, *weyl, *json),
        Command::Verify {
            suite,
            suite_flag,
            target,
            seed,
            json,
        } => {
            let suite = suite_flag.or(*suite).unwrap_or(Suite::All);
            verify(cli, *target, suite, *seed, *json)
        }
    }
}

fn field_info(cli: &Cli, mode: Mode, p: usize, m: usize, json: bool) -> Outcome {
    let ctx = build_context(mode, p, m)?;
    check_admissible(Target {
        dim: ctx.dim(),
        mode,
    })?;
    let header = Header::new(&ctx);
    let n = ctx.dim();
    let text = if json {
        let table = |t: &[usize]| t.chunks(n).map(<[usize]>::to_vec).collect::<Vec<_>>();
        to_json(
            &header,
            json!({
                "p": ctx.p(),
                "m": ctx.m(),
                "add": table(ctx.add_table()),
                "mul": table(ctx.mul_table()),
                "neg": ctx.neg_table(),
                "inv": ctx.inv_table(),
            }),
        )?
    } else {
        let mut s = header.comment();
        s.push_str("a,b,sum,product,neg_a,inv_a\n");
        for a in 0..n {
            let inv = ctx.inv(a).map(|x| x.to_string()).unwrap_or_default();
            for b in 0..n {
                let _ = writeln!(
                    s,
                    "{a},{b},{},{},{},{inv}",
                    ctx.add(a, b),
                    ctx.mul(a, b),
                    ctx.neg(a)
                );
            }
        }
        s
    };
    Ok(emit(cli, &text)?)
}

#[derive(Serialize)]
struct ClassDump {
    class: usize,
    #[serde(serialize_with = "complex_list")]
    phases: Vec<C64>,
    operators: Vec<Operator>,
}

fn complex_list<S: serde::Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(serde_complex::pair))
}

fn pauli_dump(cli: &Cli, target: Target, class: Option<usize>, json: bool) -> Outcome {
    let sys = system(target)?;
    let n = sys.dim();
    let classes: Vec<usize> = match class {
        Some(c) if c > n => return Err(Error::InvalidClass { class: c, max: n }.into()),
        Some(c) => vec![c],
        None => (0..=n).collect(),
    };
    let mut dumps = Vec::new();
    for c in classes {
        let operators = (0..n)
            .map(|l| displacement_u(&sys.ctx, &sys.phases, c, l))
            .collect::<Result<Vec<_>, _>>()?;
        dumps.push(ClassDump {
            class: c,
            phases: sys.phases.class_row(c).to_vec(),
            operators,
        });
    }
    let header = Header::new(&sys.ctx);
    let text = if json {
        to_json(&header, json!({ "classes": dumps }))?
    } else {
        let mut s = header.comment();
        for d in &dumps {
            for (l, op) in d.operators.iter().enumerate() {
                let _ = writeln!(s, "class {} l={l} phase {}", d.class, fmt_c(d.phases[l]));
                s.push_str(&fmt_matrix(op));
            }
        }
        s
    };
    Ok(emit(cli, &text)?)
}

fn mub(cli: &Cli, target: Target, json: bool, csv: bool) -> Outcome {
    let sys = system(target)?;
    let report = sys.family.unbiasedness_report(cli.tol);
    let header = Header::new(&sys.ctx);
    let text = if json {
        to_json(&header, &report)?
    } else if csv {
        let mut s = header.comment();
        s.push_str("a,b,min_overlap,max_overlap,unbiased\n");
        for p in &report.pairs {
            let _ = writeln!(
                s,
                "{},{},{:.12},{:.12},{}",
                p.a, p.b, p.min, p.max, p.unbiased
            );
        }
        s
    } else {
        let mut s = header.comment();
        let _ = writeln!(
            s,
            "{} bases, {} orthonormal, {} of {} pairs unbiased",
            sys.family.num_bases(),
            report.orthonormal_bases,
            report.unbiased_pairs,
            report.total_pairs
        );
        if let Some(bound) = report.conjecture_bound {
            let _ = writeln!(s, "composite-dimension bound p+1 = {bound}");
        }
        s
    };
    emit(cli, &text)?;
    if report.orthonormal_bases != sys.family.num_bases() {
        return Err(Failure::Invariant("bases orthonormal".into()));
    }
    if sys.mode() == Mode::Galois && !report.all_unbiased {
        return Err(Failure::Invariant("pairwise unbiasedness".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct BellRow {
    m: usize,
    n: usize,
    m_prime: usize,
    n_prime: usize,
    #[serde(with = "serde_complex")]
    phase: C64,
}

fn bell_map(cli: &Cli, target: Target, k: usize, json: bool) -> Outcome {
    let sys = system(target)?;
    let n = sys.dim();
    let mut rows = Vec::with_capacity(n * n);
    for m in 0..n {
        for nn in 0..n {
            let img = bell_transform(&sys.ctx, &sys.phases, k, m, nn)?;
            rows.push(BellRow {
                m,
                n: nn,
                m_prime: img.m,
                n_prime: img.n,
                phase: img.phase,
            });
        }
    }
    let header = Header::new(&sys.ctx);
    let text = if json {
        to_json(&header, json!({ "k": k, "map": rows }))?
    } else {
        let mut s = header.comment();
        let _ = writeln!(s, "B^{k}_(m,n) = phase * B^0_(m',n')");
        s.push_str("m,n,m',n',phase\n");
        for r in &rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.m,
                r.n,
                r.m_prime,
                r.n_prime,
                fmt_c(r.phase)
            );
        }
        s
    };
    Ok(emit(cli, &text)?)
}

fn king_run(
    cli: &Cli,
    target: Target,
    trials: u64,
    seed: u64,
    exhaustive: bool,
    json: bool,
) -> Outcome {
    let sys = system(target)?;
    let basis = MeanKingBasis::build(
        &sys.family,
        &sys.ctx,
        sys.ext.as_ref(),
        &sys.phases,
        cli.tol,
    )?;
    let mode = if exhaustive {
        ProtocolMode::Exhaustive
    } else {
        ProtocolMode::MonteCarlo
    };
    let report = run_protocol(&basis, &sys.family, mode, trials, seed, cli.tol)?;
    let header = Header::new(&sys.ctx);
    let text = if json {
        to_json(
            &header,
            json!({ "residue": basis.residue(), "report": report, "success_rate": report.success_rate() }),
        )?
    } else {
        let mut s = header.comment();
        let _ = writeln!(
            s,
            "{} run, seed {}: {} of {} inferred correctly (success rate {})",
            if exhaustive {
                "exhaustive"
            } else {
                "monte carlo"
            },
            report.seed,
            report.successes,
            report.trials,
            report.success_rate()
        );
        if let Some(p) = report.success_probability {
            let _ = writeln!(s, "success probability {p:.12}");
        }
        s
    };
    emit(cli, &text)?;
    if report.perfect() {
        Ok(())
    } else {
        Err(Failure::Invariant(format!(
            "protocol success: {} of {} trials failed",
            report.trials - report.successes,
            report.trials
        )))
    }
}

#[derive(Serialize)]
struct StriationCheck {
    basis: usize,
    max_deviation: f64,
    passed: bool,
}

fn wigner(cli: &Cli, dim: usize, state: &std::path::Path, weyl: bool, json: bool) -> Outcome {
    let sys = system(Target {
        dim,
        mode: Mode::Galois,
    })?;
    let raw = fs::read_to_string(state).with_context(|| format!("reading {}", state.display()))?;
    let rho: Operator =
        serde_json::from_str(&raw).with_context(|| format!("parsing {}", state.display()))?;
    if rho.dim() != dim {
        return Err(Failure::Usage(format!(
            "state is {}x{}, expected {dim}x{dim}",
            rho.dim(),
            rho.dim()
        )));
    }
    let set = WignerOperatorSet::build(&sys.ctx, &sys.phases)?;
    let grid = wigner_grid(&set, &rho, cli.tol)
        .map_err(|e| Failure::Usage(format!("state rejected: {e}")))?;

    // each line sum of W must equal the outcome probability for that basis state
    let mut checks = Vec::new();
    for k in 0..=dim {
        let mut worst: f64 = 0.0;
        for l in 0..dim {
            let line = (&marginal(&set, &sys.ctx, k, l) * &rho).trace();
            let e = sys.family.state(k, l);
            let prob = e.inner(&rho.apply(&e));
            worst = worst.max((line - prob * dim as f64).norm() / dim as f64);
        }
        checks.push(StriationCheck {
            basis: k,
            max_deviation: worst,
            passed: worst <= cli.tol,
        });
    }
    let weyl_grid: Option<Vec<Vec<[f64; 2]>>> = weyl.then(|| {
        (0..dim)
            .map(|m| {
                (0..dim)
                    .map(|n| serde_complex::pair(&weyl_function(&sys.ctx, &sys.phases, &rho, m, n)))
                    .collect()
            })
            .collect()
    });

    let header = Header::new(&sys.ctx);
    let text = if json {
        to_json(
            &header,
            json!({ "wigner": grid, "weyl": weyl_grid, "marginals": checks }),
        )?
    } else {
        let mut s = header.comment();
        s.push_str("Wigner grid (row i1, column i2)\n");
        for row in &grid {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:+.6}")).collect();
            let _ = writeln!(s, "  {}", cells.join(" "));
        }
        if let Some(w) = &weyl_grid {
            s.push_str("Weyl grid Tr(U_(m,n) rho)\n");
            for row in w {
                let cells: Vec<String> = row
                    .iter()
                    .map(|[re, im]| fmt_c(C64::new(*re, *im)))
                    .collect();
                let _ = writeln!(s, "  {}", cells.join(" "));
            }
        }
        for c in &checks {
            let _ = writeln!(
                s,
                "striation {}: {} (max deviation {:.2e})",
                c.basis,
                if c.passed { "ok" } else { "FAIL" },
                c.max_deviation
            );
        }
        s
    };
    emit(cli, &text)?;
    match checks.iter().find(|c| !c.passed) {
        Some(c) => Err(Failure::Invariant(format!(
            "marginal of striation {}",
            c.basis
        ))),
        None => Ok(()),
    }
}

fn verify(cli: &Cli, target: Target, suite: Suite, seed: u64, json: bool) -> Outcome {
    let sys = system(target)?;
    let report = run_suite(&sys, suite, seed, cli.tol)?;
    let text = if json {
        let mut s = serde_json::to_string_pretty(&report).context("serializing report")?;
        s.push('\n');
        s
    } else {
        let mut s = Header::new(&sys.ctx).comment();
        for c in &report.checks {
            let status = match (c.passed, c.asserted) {
                (true, true) => "PASS",
                (true, false) => "NOTE",
                (false, _) => "FAIL",
            };
            let _ = writeln!(
                s,
                "{status}  {:<7} {:<50} {}",
                c.suite.to_string(),
                c.name,
                c.detail
            );
        }
        let _ = writeln!(
            s,
            "{}",
            if report.all_passed {
                "all checks passed"
            } else {
                "some checks failed"
            }
        );
        s
    };
    emit(cli, &text)?;
    match report.first_failure() {
        Some(c) => Err(Failure::Invariant(format!("{}: {}", c.suite, c.name))),
        None => Ok(()),
    }
}

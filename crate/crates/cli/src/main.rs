//! Command-line entry point: every library operation as a thin subcommand.

use std::io::BufRead;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use vmvt_core::congruence::{
    enumerate_B, count_classes, hensel_count, lemma32_solve, max_B, CongruenceInstance, MultiPoly,
};
use vmvt_core::counting::{
    count_diagonal, count_mixed, count_shifted, count_weyl_moment, count_J, Budget, MixedKind,
    MixedMeanParams,
};
use vmvt_core::error::Error;
use vmvt_core::exponents::{
    delta, eta_known, eta_r_star, gtilde_table, kappa, mu_nu, s0, s1, DeltaCase, EtaMode,
};
use vmvt_core::iteration::{lambda_cap, run_iteration, theta_delta, trace_summary, IterationConfig};
use vmvt_core::params::VinogradovParams;
use vmvt_core::rational::rat_json;
use vmvt_core::verify::{verify_all, Profile};
use vmvt_core::waring::{compare, count_R, singular_series};

#[derive(Parser)]
#[command(name = "vmvt", about = "Exact-arithmetic laboratory for mean value counts and exponents", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Emit JSON (the default).
    #[arg(long, global = true)]
    json: bool,
    /// Emit CSV where the command produces tabular output.
    #[arg(long, global = true)]
    csv: bool,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Override both budget limits (max distinct keys and max loop length).
    #[arg(long, global = true)]
    budget: Option<u128>,
    /// Include witness tuples in congruence censuses.
    #[arg(long, global = true)]
    witnesses: bool,
    /// Worker thread cap for counting operations.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON-lines batch input; one counting record is written per line.
    #[arg(long, global = true)]
    batch: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    PaperFamilies,
    Envelope,
}

impl From<ModeArg> for EtaMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::PaperFamilies => EtaMode::PaperFamilies,
            ModeArg::Envelope => EtaMode::Envelope,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    I,
    Ii,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    I,
    K,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Cmd {
    /// The exponent kappa(k, r, t).
    Kappa { k: u32, r: u32, t: u32 },
    /// The coefficient pair (mu, nu) for (k, r, t).
    MuNu { k: u32, r: u32, t: u32 },
    /// delta_{k,m} and its s-threshold for the chosen case.
    Delta {
        k: u32,
        m: u32,
        #[arg(long, value_enum, default_value_t = CaseArg::I)]
        case: CaseArg,
    },
    /// Best assembled upper bound for eta(s, k).
    Eta {
        s: u64,
        k: u32,
        #[arg(long, value_enum, default_value_t = ModeArg::PaperFamilies)]
        mode: ModeArg,
        /// Divide through the r-fold hybrid: eta_r*(s, k) = eta(s - r(r-1)/2, k)/r.
        #[arg(long, default_value_t = 1)]
        r: u64,
    },
    /// s_0(k, v, w).
    S0 {
        k: u32,
        v: u64,
        w: u32,
        #[arg(long, value_enum, default_value_t = ModeArg::PaperFamilies)]
        mode: ModeArg,
    },
    /// s_1(k): the grid minimum with its argmin.
    S1 {
        k: u32,
        #[arg(long, value_enum, default_value_t = ModeArg::PaperFamilies)]
        mode: ModeArg,
    },
    /// The table of s_1 and floor(s_1) + 1 for a range of k.
    GtildeTable {
        k_min: u32,
        k_max: u32,
        #[arg(long)]
        explain: bool,
        #[arg(long, value_enum, default_value_t = ModeArg::PaperFamilies)]
        mode: ModeArg,
    },
    /// Solutions of the full power-sum system over [1, X].
    CountJ { s: u32, k: u32, x: u64 },
    /// Ordered pairs (x, y) with y a permutation of x.
    CountDiagonal { s: u32, x: u64 },
    /// Solutions of the single k-th-power equation.
    WeylMoment { s: u32, k: u32, x: u64 },
    /// The shifted-and-reduced system over 0..floor(X/q).
    CountShifted {
        s: u32,
        m: u32,
        k: u32,
        x: u64,
        q: u64,
        b: u64,
    },
    /// Mixed mean values with residue-class side conditions.
    CountMixed {
        k: u32,
        r: u32,
        t: u32,
        p: u64,
        a: u32,
        b: u32,
        xi: u64,
        eta: u64,
        x: u64,
        #[arg(long, value_enum, default_value_t = WhichArg::I)]
        which: WhichArg,
    },
    /// Enumerate the congruence system solutions.
    EnumB {
        k: u32,
        r: u32,
        t: u32,
        p: u64,
        a: u32,
        b: u32,
        xi: u64,
        eta: u64,
        /// Comma-separated m_1..m_k.
        #[arg(long, value_delimiter = ',')]
        m: Vec<u64>,
        /// Also report the equivalence-class census.
        #[arg(long)]
        classes: bool,
    },
    /// Maximize the class census over all residues and m-vectors.
    MaxB {
        k: u32,
        r: u32,
        t: u32,
        p: u64,
        a: u32,
        b: u32,
    },
    /// Count nonsingular roots of a square polynomial system mod w^l.
    Hensel {
        /// JSON: [{"nvars": d, "terms": [[[e1,..,ed], coeff], ...]}, ...].
        #[arg(long)]
        system: String,
        w: u64,
        l: u32,
    },
    /// Integer vectors (c, d) realizing the binomial identity.
    Lemma32 { alpha: u32, beta: u32 },
    /// Replay the recursion and check the window at every step.
    Iterate {
        k: u32,
        r: u32,
        t: u32,
        n: u32,
        /// Comma-separated h_(-1), h_0, ..., h_(N-1); random when omitted.
        #[arg(long, value_delimiter = ',')]
        h: Option<Vec<u64>>,
    },
    /// The exact exponent cap and its 3s/N simplification.
    LambdaCap { s: u64, t: u32, n: u32 },
    /// Ordered representations of n as s positive k-th powers.
    WaringCount { s: u32, k: u32, n: u64 },
    /// The truncated singular series.
    SingularSeries {
        s: u32,
        k: u32,
        n: u64,
        #[arg(long, default_value_t = 50)]
        q: u64,
    },
    /// Exact counts against the heuristic main term over an n-range.
    WaringCompare {
        s: u32,
        k: u32,
        /// Inclusive range lo:hi.
        #[arg(long)]
        n_range: String,
        #[arg(long, default_value_t = 20)]
        samples: u32,
        #[arg(long, default_value_t = 50)]
        q: u64,
    },
    /// Run the cross-module invariant suite.
    VerifyAll {
        #[arg(long, value_enum)]
        profile: Option<ProfileArg>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut budget = Budget::default();
    if let Some(cap) = cli.budget {
        budget.max_keys = cap;
        budget.max_naive = cap;
    }
    if let Some(threads) = cli.threads {
        budget.threads = threads.max(1);
    }
    match run(&cli, &budget) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn emit(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("valid json"));
}

fn run(cli: &Cli, budget: &Budget) -> Result<ExitCode, Error> {
    if let Some(path) = &cli.batch {
        return run_batch(path, budget);
    }
    match &cli.cmd {
        Cmd::Kappa { k, r, t } => {
            let p = VinogradovParams::new(*k, *r, *t)?;
            let value = kappa(&p)?;
            emit(&json!({"op": "kappa", "k": k, "r": r, "t": t, "value": rat_json(&value)}));
        }
        Cmd::MuNu { k, r, t } => {
            let p = VinogradovParams::new(*k, *r, *t)?;
            let (mu, nu) = mu_nu(&p)?;
            emit(&json!({"op": "mu-nu", "k": k, "r": r, "t": t, "mu": mu, "nu": nu}));
        }
        Cmd::Delta { k, m, case } => {
            let case_enum = match case {
                CaseArg::I => DeltaCase::I,
                CaseArg::Ii => DeltaCase::II,
            };
            let (value, threshold) = delta(*k, *m, case_enum)?;
            emit(&json!({
                "op": "delta", "k": k, "m": m,
                "case": match case { CaseArg::I => "i", CaseArg::Ii => "ii" },
                "value": rat_json(&value), "s_threshold": threshold,
            }));
        }
        Cmd::Eta { s, k, mode, r } => {
            if *r == 1 {
                let b = eta_known(*s, *k, (*mode).into())?;
                emit(&json!({
                    "op": "eta", "s": s, "k": k,
                    "value": rat_json(&b.value),
                    "provenance": b.provenance.as_str(),
                }));
            } else {
                let v = eta_r_star(*r, *s, *k, (*mode).into())?;
                emit(&json!({"op": "eta-r-star", "r": r, "s": s, "w": k, "value": rat_json(&v)}));
            }
        }
        Cmd::S0 { k, v, w, mode } => {
            let value = s0(*k, *v, *w, (*mode).into())?;
            emit(&json!({"op": "s0", "k": k, "v": v, "w": w, "value": rat_json(&value)}));
        }
        Cmd::S1 { k, mode } => {
            let r = s1(*k, (*mode).into())?;
            emit(&json!({
                "op": "s1", "k": k, "value": rat_json(&r.value), "gtilde": r.gtilde,
                "argmin": {"m": r.argmin_m, "w": r.argmin_w, "v": r.argmin_v,
                            "family": r.argmin_family.as_str()},
            }));
        }
        Cmd::GtildeTable {
            k_min,
            k_max,
            explain,
            mode,
        } => {
            let rows = gtilde_table(*k_min, *k_max, (*mode).into())?;
            if cli.csv {
                println!("k,s1_num,s1_den,gtilde,m,w,v,family");
                for r in &rows {
                    println!(
                        "{},{},{},{},{},{},{},{}",
                        r.k,
                        r.value.numer(),
                        r.value.denom(),
                        r.gtilde,
                        r.argmin_m,
                        r.argmin_w,
                        r.argmin_v,
                        r.argmin_family.as_str()
                    );
                }
            } else {
                emit(&json!({
                    "op": "gtilde-table",
                    "rows": rows.iter().map(|r| {
                        let mut row = json!({
                            "k": r.k, "s1": rat_json(&r.value), "gtilde": r.gtilde,
                        });
                        if *explain {
                            row["argmin"] = json!({
                                "m": r.argmin_m, "w": r.argmin_w, "v": r.argmin_v,
                                "family": r.argmin_family.as_str(),
                            });
                        }
                        row
                    }).collect::<Vec<_>>(),
                }));
            }
        }
        Cmd::CountJ { s, k, x } => emit(&count_J(*s, *k, *x, budget)?.to_json()),
        Cmd::CountDiagonal { s, x } => emit(&count_diagonal(*s, *x, budget)?.to_json()),
        Cmd::WeylMoment { s, k, x } => emit(&count_weyl_moment(*s, *k, *x, budget)?.to_json()),
        Cmd::CountShifted { s, m, k, x, q, b } => {
            emit(&count_shifted(*s, *m, *k, *x, *q, *b, budget)?.to_json())
        }
        Cmd::CountMixed {
            k,
            r,
            t,
            p,
            a,
            b,
            xi,
            eta,
            x,
            which,
        } => {
            let params = MixedMeanParams {
                k: *k,
                r: *r,
                t: *t,
                p: *p,
                a: *a,
                b: *b,
                xi: *xi,
                eta: *eta,
                x: *x,
            };
            let kind = match which {
                WhichArg::I => MixedKind::I,
                WhichArg::K => MixedKind::K,
            };
            emit(&count_mixed(&params, kind, budget)?.to_json());
        }
        Cmd::EnumB {
            k,
            r,
            t,
            p,
            a,
            b,
            xi,
            eta,
            m,
            classes,
        } => {
            let inst = CongruenceInstance {
                k: *k,
                r: *r,
                t: *t,
                p: *p,
                a: *a,
                b: *b,
                xi: *xi,
                eta: *eta,
                m: m.clone(),
            };
            if *classes {
                let census = count_classes(&inst, budget, cli.witnesses)?;
                emit(&census.to_json());
            } else {
                let sols = enumerate_B(&inst, budget)?;
                if cli.csv {
                    for z in &sols {
                        println!(
                            "{}",
                            z.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
                        );
                    }
                } else {
                    emit(&json!({"op": "enum-b", "count": sols.len(), "solutions": sols}));
                }
            }
        }
        Cmd::MaxB { k, r, t, p, a, b } => {
            let census = max_B(*k, *r, *t, *p, *a, *b, budget, cli.witnesses)?;
            emit(&census.to_json());
        }
        Cmd::Hensel { system, w, l } => {
            let polys: Vec<MultiPoly> = serde_json::from_str(system)
                .map_err(|e| Error::invalid(format!("bad polynomial system JSON: {e}")))?;
            let count = hensel_count(&polys, *w, *l, budget)?;
            emit(&json!({"op": "hensel", "w": w, "l": l, "count": count}));
        }
        Cmd::Lemma32 { alpha, beta } => {
            let id = lemma32_solve(*alpha, *beta)?;
            id.verify()?;
            emit(&id.to_json());
        }
        Cmd::Iterate { k, r, t, n, h } => {
            let params = VinogradovParams::new(*k, *r, *t)?;
            let cfg = match h {
                Some(hs) => IterationConfig {
                    params,
                    n_max: *n,
                    h_choices: hs.iter().map(|&v| v.into()).collect(),
                },
                None => {
                    use rand::SeedableRng;
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cli.seed);
                    IterationConfig::random(params, *n, &mut rng)
                }
            };
            if cli.csv {
                println!("n,a,b,h,c,gamma_num,gamma_den,psi_num,psi_den");
                let states = run_iteration(&cfg)?;
                for st in &states {
                    let h = cfg.h_choices.get(st.n as usize + 1);
                    println!("{}", st.to_csv_row(h));
                }
            } else {
                emit(&trace_summary(&cfg)?);
            }
        }
        Cmd::LambdaCap { s, t, n } => {
            let (exact, cap) = lambda_cap(*s, *t, *n)?;
            let (theta, delta_v) = theta_delta(*t, *n)?;
            emit(&json!({
                "op": "lambda-cap", "s": s, "t": t, "N": n,
                "exact": rat_json(&exact), "cap": rat_json(&cap),
                "theta": rat_json(&theta), "delta": rat_json(&delta_v),
            }));
        }
        Cmd::WaringCount { s, k, n } => {
            let rc = count_R(*s, *k, *n, budget)?;
            emit(&json!({
                "op": "waring-count", "s": s, "k": k, "n": n,
                "count": rc.count.to_string(),
            }));
        }
        Cmd::SingularSeries { s, k, n, q } => {
            let v = singular_series(*s, *k, *n, *q)?;
            emit(&v.to_json());
        }
        Cmd::WaringCompare {
            s,
            k,
            n_range,
            samples,
            q,
        } => {
            let (lo, hi) = parse_range(n_range)?;
            let samples = (*samples).max(1) as u64;
            let ns: Vec<u64> = (0..samples)
                .map(|i| lo + (hi - lo) * i / samples.max(1))
                .collect();
            let rows = compare(*s, *k, &ns, *q, budget)?;
            if cli.csv {
                println!("n,R,main_term,ratio");
                for row in &rows {
                    println!("{}", row.to_csv_row());
                }
            } else {
                emit(&json!({
                    "op": "waring-compare", "s": s, "k": k, "Q": q,
                    "rows": rows.iter().map(|r| json!({
                        "n": r.n, "count": r.count.to_string(),
                        "main_term": r.main_term, "ratio": r.ratio,
                    })).collect::<Vec<_>>(),
                }));
            }
        }
        Cmd::VerifyAll { profile } => {
            let profile = match profile {
                Some(ProfileArg::Quick) => Profile::Quick,
                Some(ProfileArg::Full) => Profile::Full,
                None => match std::env::var("VMVT_BUDGET_PROFILE").as_deref() {
                    Ok("full") => Profile::Full,
                    _ => Profile::Quick,
                },
            };
            let report = verify_all(profile, cli.seed, budget);
            emit(&report.to_json());
            if !report.all_passed() {
                return Ok(ExitCode::from(4));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_range(spec: &str) -> Result<(u64, u64), Error> {
    let (lo, hi) = spec
        .split_once(':')
        .ok_or_else(|| Error::invalid("expected n-range of the form lo:hi"))?;
    let lo: u64 = lo.trim().parse().map_err(|_| Error::invalid("bad range lower bound"))?;
    let hi: u64 = hi.trim().parse().map_err(|_| Error::invalid("bad range upper bound"))?;
    if lo < 1 || hi < lo {
        return Err(Error::invalid("range must satisfy 1 <= lo <= hi"));
    }
    Ok((lo, hi))
}

/// JSON-lines batch mode: each line carries an "op" plus its parameters; one
/// counting record is written per input line.
fn run_batch(path: &PathBuf, budget: &Budget) -> Result<ExitCode, Error> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::invalid(format!("cannot open batch file: {e}")))?;
    for line in std::io::BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::invalid(format!("bad batch line: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let spec: serde_json::Value = serde_json::from_str(&line)
            .map_err(|e| Error::invalid(format!("bad batch JSON: {e}")))?;
        let get = |key: &str| -> Result<u64, Error> {
            spec[key]
                .as_u64()
                .ok_or_else(|| Error::invalid(format!("batch line missing integer field {key}")))
        };
        let record = match spec["op"].as_str() {
            Some("count-j") => count_J(get("s")? as u32, get("k")? as u32, get("X")?, budget)?,
            Some("count-diagonal") => count_diagonal(get("s")? as u32, get("X")?, budget)?,
            Some("weyl-moment") => {
                count_weyl_moment(get("s")? as u32, get("k")? as u32, get("X")?, budget)?
            }
            Some("count-shifted") => count_shifted(
                get("s")? as u32,
                get("m")? as u32,
                get("k")? as u32,
                get("X")?,
                get("q")?,
                get("b")?,
                budget,
            )?,
            other => {
                return Err(Error::invalid(format!(
                    "unsupported batch op {other:?}; use count-j, count-diagonal, weyl-moment, or count-shifted"
                )))
            }
        };
        println!("{}", serde_json::to_string(&record.to_json()).expect("valid json"));
    }
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("10:20").unwrap(), (10, 20));
        assert!(parse_range("20:10").is_err());
        assert!(parse_range("nope").is_err());
    }
}

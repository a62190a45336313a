//! nilcone: exact counts, verification suites, constructive bijections, and
//! OEIS b-file cross-checks on the command line.
//!
//! Every invocation prints one JSON document on stdout (and a table on
//! stderr when that is a terminal). Exit codes: 0 pass, 1 verification
//! mismatch, 2 usage or parse error, 3 enumeration cap exceeded.

mod bfile;
mod objects;
mod report;

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;

use nilcone::bijections::{
    leinster_forward, leinster_inverse, master_forward, master_inverse, rho, rho_prime,
    BalancedTriple, MasterElement, Quadruple,
};
use nilcone::boolmat::{count_bool_nilpotent_brute, count_dags_recurrence, BoolmatError};
use nilcone::field::Field;
use nilcone::linalg::{enumerate_matrices, LinearPair, Subspace};
use nilcone::nilpairs::{
    brute_force_count_nilpotent_pairs, brute_force_nilpotent_census,
    count_balanced_triples_of_length, count_nilpotent_pairs_closed, count_nilpotent_pairs_sum,
    count_nilpotent_pairs_rank_weighted, count_rank_r_maps, nilpotent_pair_probability,
    q_binomial, BruteOptions, CountError, ExactRational, DEFAULT_BRUTE_CAP,
};
use nilcone::setmaps::{
    cayley_count, count_ec_brute, count_ec_formula, count_labeled_trees_census,
    count_spanning_trees_formula, count_spanning_trees_oracle, ec_probability,
    marked_tree_to_pair, pair_to_marked_tree, SetmapError, DEFAULT_EC_CAP,
};
use nilcone::verify::{
    verify_all, verify_bijections, verify_boolean, verify_nilpairs, verify_setmaps, VerifyOptions,
};
use nilcone::{BigCount, CheckResult, CheckStatus, Flavor};

use objects::{
    matrix_value, pair_value, parse_setpair, parse_tree, setpair_value, tagged_value, tree_value,
    vector_value, Lines,
};
use report::RunReport;

#[derive(Parser)]
#[command(
    name = "nilcone",
    version,
    about = "Exact counts, verification suites, and constructive bijections for nilpotent pairs \
             of linear maps over finite fields, eventually constant set-map pairs, marked \
             spanning trees, and nilpotent Boolean matrices"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute an exact count by one or more methods and compare them.
    Count(CountArgs),
    /// Run invariant suites; exit 0 iff every check passes.
    Verify(VerifyArgs),
    /// Apply a constructive bijection to an object read from a file.
    Bijection(BijectionArgs),
    /// Compare a computed sequence against a local OEIS b-file.
    Crosscheck(CrosscheckArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CountKind {
    Nilpairs,
    Ranked,
    Qbinom,
    Ec,
    Trees,
    Cayley,
    Dags,
}

impl fmt::Display for CountKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountKind::Nilpairs => "nilpairs",
            CountKind::Ranked => "ranked",
            CountKind::Qbinom => "qbinom",
            CountKind::Ec => "ec",
            CountKind::Trees => "trees",
            CountKind::Cayley => "cayley",
            CountKind::Dags => "dags",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Closed,
    Sum,
    Weighted,
    Brute,
    Recurrence,
    Oracle,
    Formula,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Closed => "closed",
            Method::Sum => "sum",
            Method::Weighted => "weighted",
            Method::Brute => "brute",
            Method::Recurrence => "recurrence",
            Method::Oracle => "oracle",
            Method::Formula => "formula",
        })
    }
}

#[derive(Args)]
struct CountArgs {
    /// What to count.
    #[arg(value_enum)]
    kind: CountKind,
    /// Field size, a prime power at most 64.
    #[arg(long, default_value_t = 2)]
    q: u64,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    n: Option<u64>,
    /// Orbit length: switches `nilpairs` to the balanced-triple count.
    #[arg(long)]
    ell: Option<u64>,
    /// Rank (for `ranked`) or subspace dimension (for `qbinom`).
    #[arg(long)]
    r: Option<u64>,
    /// Comma-separated methods; defaults to the kind's formula route.
    #[arg(long, value_delimiter = ',')]
    method: Vec<Method>,
    /// Enumeration budget for brute-force methods.
    #[arg(long)]
    cap: Option<u64>,
    /// Worker threads for brute-force methods; 0 means all cores.
    #[arg(long, env = "NILCONE_WORKERS", default_value_t = 0)]
    workers: usize,
    /// Modulus override for composite q: ascending coefficients, length k+1.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u64>>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    Nilpairs,
    Bijections,
    Setmaps,
    Boolean,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::All => "all",
            Suite::Nilpairs => "nilpairs",
            Suite::Bijections => "bijections",
            Suite::Setmaps => "setmaps",
            Suite::Boolean => "boolean",
        })
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum, default_value_t = Suite::All)]
    suite: Suite,
    /// Field size for the exhaustive sweeps.
    #[arg(long, default_value_t = 2)]
    q: u64,
    /// Largest dimension for the exhaustive sweeps (1..=3; sweeps are
    /// doubly exponential beyond that).
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    /// Enumeration budget for the set-map brute-force checks.
    #[arg(long, default_value_t = 1 << 16)]
    cap: u64,
    /// Worker threads; 0 means all cores.
    #[arg(long, env = "NILCONE_WORKERS", default_value_t = 0)]
    workers: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Leinster,
    Rho,
    Master,
    Tree,
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Which::Leinster => "leinster",
            Which::Rho => "rho",
            Which::Master => "master",
            Which::Tree => "tree",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    Forward,
    Inverse,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Inverse => "inverse",
        })
    }
}

#[derive(Args)]
struct BijectionArgs {
    #[arg(value_enum)]
    which: Which,
    #[arg(long, value_enum, default_value_t = Direction::Forward)]
    direction: Direction,
    /// Input file; see the README for the line formats.
    #[arg(long)]
    input: PathBuf,
    /// Modulus override for composite q: ascending coefficients, length k+1.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u64>>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeqKind {
    Dags,
    TreesBipartiteDiag,
    EcDiag,
}

impl fmt::Display for SeqKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeqKind::Dags => "dags",
            SeqKind::TreesBipartiteDiag => "trees-bipartite-diag",
            SeqKind::EcDiag => "ec-diag",
        })
    }
}

#[derive(Args)]
struct CrosscheckArgs {
    #[arg(value_enum)]
    sequence: SeqKind,
    /// Local b-file: `#` comments, then "index value" lines.
    #[arg(long)]
    bfile: PathBuf,
    /// Highest index to compare (at most 128).
    #[arg(long, default_value_t = 64)]
    max_n: i64,
}

enum CliError {
    Usage(String),
    Cap(String),
}

fn usage(e: impl fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn count_err(e: CountError) -> CliError {
    match e {
        CountError::CapExceeded { .. } => CliError::Cap(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

fn setmap_err(e: SetmapError) -> CliError {
    match e {
        SetmapError::CapExceeded { .. } => CliError::Cap(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

fn bool_err(e: BoolmatError) -> CliError {
    match e {
        BoolmatError::CapExceeded { .. } => CliError::Cap(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Cap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.cmd {
        Cmd::Count(a) => cmd_count(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Bijection(a) => cmd_bijection(a),
        Cmd::Crosscheck(a) => cmd_crosscheck(a),
    }
}

fn effective_workers(requested: usize) -> usize {
    if requested > 0 {
        requested
    } else {
        std::thread::available_parallelism().map_or(1, |c| c.get()).min(8)
    }
}

fn ratio_string(r: &ExactRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

// ---------------------------------------------------------------- count --

fn need(v: Option<u64>, flag: &str, kind: CountKind) -> Result<u64, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("count {kind} requires --{flag}")))
}

struct CountCtx<'a> {
    args: &'a CountArgs,
}

impl CountCtx<'_> {
    fn field(&self) -> Result<Field, CliError> {
        match &self.args.modulus {
            Some(coeffs) => Field::gf_with_modulus(self.args.q, coeffs),
            None => Field::gf(self.args.q),
        }
        .map_err(usage)
    }

    fn cap(&self, default: u64) -> u64 {
        self.args.cap.unwrap_or(default)
    }

    fn workers(&self) -> usize {
        effective_workers(self.args.workers)
    }

    fn brute_opts(&self) -> BruteOptions {
        BruteOptions {
            cap: self.cap(DEFAULT_BRUTE_CAP),
            workers: self.workers(),
        }
    }

    /// q^exp against the cap, for the CLI-side censuses.
    fn check_budget(&self, exp: u64) -> Result<(), CliError> {
        let cap = self.cap(DEFAULT_BRUTE_CAP);
        let needed = (self.args.q as u128)
            .checked_pow(exp.try_into().unwrap_or(u32::MAX))
            .unwrap_or(u128::MAX);
        if needed > cap as u128 {
            return Err(CliError::Cap(format!(
                "enumeration needs {needed} evaluations, over the cap {cap}"
            )));
        }
        Ok(())
    }
}

fn compute_count(ctx: &CountCtx, method: Method) -> Result<BigCount, CliError> {
    let a = ctx.args;
    let q = a.q;
    match (a.kind, method) {
        (CountKind::Nilpairs, _) if a.ell.is_some() => {
            let m = need(a.m, "m", a.kind)?;
            let n = need(a.n, "n", a.kind)?;
            let ell = a.ell.unwrap();
            match method {
                Method::Formula => {
                    count_balanced_triples_of_length(m, n, q, ell).map_err(count_err)
                }
                Method::Brute => {
                    let census = brute_force_nilpotent_census(
                        &ctx.field()?,
                        m as usize,
                        n as usize,
                        ctx.brute_opts(),
                    )
                    .map_err(count_err)?;
                    census
                        .balanced_v_by_length
                        .get(ell as usize)
                        .map(|&c| BigCount::from(c))
                        .ok_or_else(|| {
                            CliError::Usage(format!("--ell {ell} exceeds min(m, n)"))
                        })
                }
                other => Err(CliError::Usage(format!(
                    "method {other} does not apply to the balanced-triple count"
                ))),
            }
        }
        (CountKind::Nilpairs, Method::Closed) => {
            count_nilpotent_pairs_closed(need(a.m, "m", a.kind)?, need(a.n, "n", a.kind)?, q)
                .map_err(count_err)
        }
        (CountKind::Nilpairs, Method::Sum) => {
            count_nilpotent_pairs_sum(need(a.m, "m", a.kind)?, need(a.n, "n", a.kind)?, q)
                .map_err(count_err)
        }
        (CountKind::Nilpairs, Method::Weighted) => {
            count_nilpotent_pairs_rank_weighted(need(a.m, "m", a.kind)?, need(a.n, "n", a.kind)?, q)
                .map_err(count_err)
        }
        (CountKind::Nilpairs, Method::Brute) => {
            let m = need(a.m, "m", a.kind)? as usize;
            let n = need(a.n, "n", a.kind)? as usize;
            brute_force_count_nilpotent_pairs(&ctx.field()?, m, n, ctx.brute_opts())
                .map_err(count_err)
        }
        (CountKind::Ranked, Method::Formula) => {
            let m = need(a.m, "m", a.kind)?;
            let n = need(a.n, "n", a.kind)?;
            count_rank_r_maps(m, n, need(a.r, "r", a.kind)?, q).map_err(count_err)
        }
        (CountKind::Ranked, Method::Brute) => {
            let m = need(a.m, "m", a.kind)?;
            let n = need(a.n, "n", a.kind)?;
            let r = need(a.r, "r", a.kind)? as usize;
            ctx.check_budget(m * n)?;
            let field = ctx.field()?;
            let count = enumerate_matrices(&field, n as usize, m as usize)
                .filter(|mat| mat.rank() == r)
                .count();
            Ok(BigCount::from(count as u64))
        }
        (CountKind::Qbinom, Method::Formula) => {
            q_binomial(need(a.m, "m", a.kind)?, need(a.r, "r", a.kind)?, q).map_err(count_err)
        }
        (CountKind::Qbinom, Method::Brute) => {
            let m = need(a.m, "m", a.kind)?;
            let r = need(a.r, "r", a.kind)?;
            if r > m {
                return Err(CliError::Usage(format!("--r {r} exceeds --m {m}")));
            }
            ctx.check_budget(r * m)?;
            let field = ctx.field()?;
            let mut spaces = HashSet::new();
            for mat in enumerate_matrices(&field, r as usize, m as usize) {
                let s = Subspace::from_row_span(&mat);
                if s.dim() == r as usize {
                    spaces.insert(format!("{s:?}"));
                }
            }
            Ok(BigCount::from(spaces.len() as u64))
        }
        (CountKind::Ec, Method::Formula) => {
            count_ec_formula(need(a.m, "m", a.kind)?, need(a.n, "n", a.kind)?).map_err(setmap_err)
        }
        (CountKind::Ec, Method::Brute) => count_ec_brute(
            need(a.m, "m", a.kind)?,
            need(a.n, "n", a.kind)?,
            ctx.cap(DEFAULT_EC_CAP),
            ctx.workers(),
        )
        .map_err(setmap_err),
        (CountKind::Trees, Method::Formula) => {
            count_spanning_trees_formula(need(a.m, "m", a.kind)?, need(a.n, "n", a.kind)?)
                .map_err(setmap_err)
        }
        (CountKind::Trees, Method::Oracle) => {
            count_spanning_trees_oracle(need(a.m, "m", a.kind)?, need(a.n, "n", a.kind)?)
                .map_err(setmap_err)
        }
        (CountKind::Cayley, Method::Formula) => {
            cayley_count(need(a.m, "m", a.kind)?).map_err(setmap_err)
        }
        (CountKind::Cayley, Method::Brute) => {
            count_labeled_trees_census(need(a.m, "m", a.kind)?).map_err(setmap_err)
        }
        (CountKind::Dags, Method::Recurrence) => {
            let n = need(a.n, "n", a.kind)?;
            if n > 256 {
                return Err(CliError::Usage(format!("--n {n} exceeds 256")));
            }
            Ok(count_dags_recurrence(n))
        }
        (CountKind::Dags, Method::Brute) => {
            count_bool_nilpotent_brute(need(a.n, "n", a.kind)?, ctx.workers()).map_err(bool_err)
        }
        (kind, method) => Err(CliError::Usage(format!(
            "method {method} does not apply to count {kind}"
        ))),
    }
}

fn default_method(kind: CountKind, ell: Option<u64>) -> Method {
    match kind {
        CountKind::Nilpairs if ell.is_none() => Method::Closed,
        CountKind::Dags => Method::Recurrence,
        _ => Method::Formula,
    }
}

fn cmd_count(a: CountArgs) -> Result<u8, CliError> {
    let ctx = CountCtx { args: &a };
    let methods = if a.method.is_empty() {
        vec![default_method(a.kind, a.ell)]
    } else {
        a.method.clone()
    };

    let mut report = RunReport::new(format!("count {}", a.kind));
    if matches!(a.kind, CountKind::Nilpairs | CountKind::Ranked | CountKind::Qbinom) {
        report.param("q", a.q);
    }
    for (flag, v) in [("m", a.m), ("n", a.n), ("ell", a.ell), ("r", a.r), ("cap", a.cap)] {
        if let Some(v) = v {
            report.param(flag, v);
        }
    }
    if let Some(coeffs) = &a.modulus {
        let words: Vec<String> = coeffs.iter().map(u64::to_string).collect();
        report.param("modulus", words.join(","));
    }
    report.param(
        "method",
        methods.iter().map(Method::to_string).collect::<Vec<_>>().join(","),
    );
    if methods.contains(&Method::Brute) {
        report.param("workers", ctx.workers());
    }

    let mut values = Vec::new();
    for &method in &methods {
        let start = Instant::now();
        let value = compute_count(&ctx, method)?;
        report.checks.push(CheckResult {
            name: format!("count/{}/{}", a.kind, method),
            status: CheckStatus::Pass,
            counterexample: None,
            seconds: start.elapsed().as_secs_f64(),
        });
        values.push((method, value));
    }
    for (method, value) in &values {
        report.result(&method.to_string(), value.to_string());
    }
    let agree = values.windows(2).all(|w| w[0].1 == w[1].1);
    if values.len() > 1 {
        report.result("agree", agree);
    }

    match a.kind {
        CountKind::Nilpairs if a.ell.is_none() => {
            let p = nilpotent_pair_probability(
                need(a.m, "m", a.kind)?,
                need(a.n, "n", a.kind)?,
                a.q,
            )
            .map_err(count_err)?;
            report.result("probability", ratio_string(&p));
        }
        CountKind::Ec => {
            let p = ec_probability(need(a.m, "m", a.kind)?, need(a.n, "n", a.kind)?)
                .map_err(setmap_err)?;
            report.result("probability", ratio_string(&p));
        }
        _ => {}
    }

    report.emit();
    Ok(if agree { 0 } else { 1 })
}

// --------------------------------------------------------------- verify --

fn cmd_verify(a: VerifyArgs) -> Result<u8, CliError> {
    Field::gf(a.q).map_err(usage)?;
    if a.max_dim == 0 || a.max_dim > 3 {
        return Err(CliError::Usage(
            "--max-dim must be between 1 and 3; the exhaustive sweeps grow as q^(2 m n)".into(),
        ));
    }
    let opts = VerifyOptions {
        q: a.q,
        max_dim: a.max_dim,
        ec_cap: a.cap,
        workers: effective_workers(a.workers),
    };
    let checks = match a.suite {
        Suite::All => verify_all(&opts),
        Suite::Nilpairs => verify_nilpairs(&opts),
        Suite::Bijections => verify_bijections(&opts),
        Suite::Setmaps => verify_setmaps(&opts),
        Suite::Boolean => verify_boolean(&opts),
    };

    let mut report = RunReport::new(format!("verify {}", a.suite));
    report.param("q", a.q);
    report.param("max-dim", a.max_dim);
    report.param("cap", a.cap);
    report.param("workers", opts.workers);
    let failed = checks.iter().filter(|c| c.status == CheckStatus::Fail).count();
    report.result("checks_total", checks.len().to_string());
    report.result("checks_failed", failed.to_string());
    report.checks = checks;
    report.emit();
    Ok(if failed == 0 { 0 } else { 1 })
}

// ------------------------------------------------------------ bijection --

fn roundtrip_check(ok: bool, start: Instant, detail: &str) -> CheckResult {
    CheckResult {
        name: "roundtrip".into(),
        status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
        counterexample: (!ok).then(|| detail.to_string()),
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn flavor_name(f: Flavor) -> &'static str {
    match f {
        Flavor::BalancedBalanced => "balanced-balanced",
        Flavor::UnbalancedUnbalanced => "unbalanced-unbalanced",
    }
}

fn cmd_bijection(a: BijectionArgs) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(&a.input)
        .map_err(|e| CliError::Usage(format!("{}: {e}", a.input.display())))?;
    let modulus = a.modulus.as_deref();
    let mut report = RunReport::new(format!("bijection {} {}", a.which, a.direction));
    report.param("input", a.input.display());
    report.param("direction", a.direction);
    let start = Instant::now();

    match (a.which, a.direction) {
        (Which::Leinster, Direction::Forward) => {
            let mut cur = Lines::new(&text);
            let (field, m, n) = cur.field_header(modulus).map_err(usage)?;
            let f = cur.matrix(&field, n, m, "f").map_err(usage)?;
            let g = cur.matrix(&field, m, n, "g").map_err(usage)?;
            let v = cur.vector(&field, m, "v").map_err(usage)?;
            cur.finish().map_err(usage)?;
            let pair = LinearPair::new(f, g).map_err(usage)?;
            let triple = BalancedTriple::new(pair, v).map_err(usage)?;
            let (fp, gp) = leinster_forward(&triple);
            let back = leinster_inverse(&fp, &gp).map_err(usage)?;
            report.result(
                "input",
                json!({
                    "pair": pair_value(triple.pair()),
                    "v": vector_value(triple.v()),
                    "length": triple.length(),
                }),
            );
            report.result("output", json!({ "f": matrix_value(&fp), "g": matrix_value(&gp) }));
            report.checks.push(roundtrip_check(back == triple, start, "inverse disagrees"));
        }
        (Which::Leinster, Direction::Inverse) => {
            let mut cur = Lines::new(&text);
            let (field, m, n) = cur.field_header(modulus).map_err(usage)?;
            let f = cur.matrix(&field, n, m, "f").map_err(usage)?;
            let g = cur.matrix(&field, m, n, "g").map_err(usage)?;
            cur.finish().map_err(usage)?;
            let triple = leinster_inverse(&f, &g).map_err(usage)?;
            let (f2, g2) = leinster_forward(&triple);
            report.result("input", json!({ "f": matrix_value(&f), "g": matrix_value(&g) }));
            report.result(
                "output",
                json!({
                    "pair": pair_value(triple.pair()),
                    "v": vector_value(triple.v()),
                    "length": triple.length(),
                }),
            );
            report
                .checks
                .push(roundtrip_check((f2, g2) == (f, g), start, "forward disagrees"));
        }
        (Which::Rho, dir) => {
            let mut cur = Lines::new(&text);
            let (field, m, n) = cur.field_header(modulus).map_err(usage)?;
            let f = cur.matrix(&field, n, m, "f").map_err(usage)?;
            let g = cur.matrix(&field, m, n, "g").map_err(usage)?;
            let v = cur.vector(&field, m, "v").map_err(usage)?;
            let w = cur.vector(&field, n, "w").map_err(usage)?;
            cur.finish().map_err(usage)?;
            let pair = LinearPair::new(f, g).map_err(usage)?;
            let quad = Quadruple::new(pair, v, w).map_err(usage)?;
            let (out, back) = match dir {
                Direction::Forward => {
                    let out = rho(&quad).map_err(usage)?;
                    let back = rho_prime(&out).map_err(usage)?;
                    (out, back)
                }
                Direction::Inverse => {
                    let out = rho_prime(&quad).map_err(usage)?;
                    let back = rho(&out).map_err(usage)?;
                    (out, back)
                }
            };
            report.result(
                "input",
                json!({
                    "pair": pair_value(quad.pair()),
                    "v": vector_value(quad.v()),
                    "w": vector_value(quad.w()),
                    "flavor": flavor_name(quad.flavor()),
                }),
            );
            report.result(
                "output",
                json!({
                    "pair": pair_value(out.pair()),
                    "v": vector_value(out.v()),
                    "w": vector_value(out.w()),
                    "flavor": flavor_name(out.flavor()),
                }),
            );
            report.checks.push(roundtrip_check(back == quad, start, "inverse disagrees"));
        }
        (Which::Master, Direction::Forward) => {
            let mut cur = Lines::new(&text);
            let (field, m, n) = cur.field_header(modulus).map_err(usage)?;
            let f = cur.matrix(&field, n, m, "f").map_err(usage)?;
            let g = cur.matrix(&field, m, n, "g").map_err(usage)?;
            let tagged = cur.tagged(&field, m, n).map_err(usage)?;
            cur.finish().map_err(usage)?;
            let element = MasterElement::maps(f.clone(), g.clone(), tagged).map_err(usage)?;
            let image = master_forward(&element).map_err(usage)?;
            let back = master_inverse(&image).map_err(usage)?;
            let MasterElement::Maps { tagged: norm, .. } = &element else {
                unreachable!("maps() builds the maps side");
            };
            let MasterElement::Nilpotent { pair, v, w } = &image else {
                unreachable!("master_forward lands on the nilpotent side");
            };
            report.result(
                "input",
                json!({
                    "f": matrix_value(&f),
                    "g": matrix_value(&g),
                    "tagged": tagged_value(norm),
                }),
            );
            report.result(
                "output",
                json!({
                    "pair": pair_value(pair),
                    "v": vector_value(v),
                    "w": vector_value(w),
                }),
            );
            report.checks.push(roundtrip_check(back == element, start, "inverse disagrees"));
        }
        (Which::Master, Direction::Inverse) => {
            let mut cur = Lines::new(&text);
            let (field, m, n) = cur.field_header(modulus).map_err(usage)?;
            let f = cur.matrix(&field, n, m, "f").map_err(usage)?;
            let g = cur.matrix(&field, m, n, "g").map_err(usage)?;
            let v = cur.vector(&field, m, "v").map_err(usage)?;
            let w = cur.vector(&field, n, "w").map_err(usage)?;
            cur.finish().map_err(usage)?;
            let pair = LinearPair::new(f, g).map_err(usage)?;
            let element = MasterElement::nilpotent(pair.clone(), v.clone(), w.clone())
                .map_err(usage)?;
            let image = master_inverse(&element).map_err(usage)?;
            let back = master_forward(&image).map_err(usage)?;
            let MasterElement::Maps { f: fp, g: gp, tagged } = &image else {
                unreachable!("master_inverse lands on the maps side");
            };
            report.result(
                "input",
                json!({
                    "pair": pair_value(&pair),
                    "v": vector_value(&v),
                    "w": vector_value(&w),
                }),
            );
            report.result(
                "output",
                json!({
                    "f": matrix_value(fp),
                    "g": matrix_value(gp),
                    "tagged": tagged_value(tagged),
                }),
            );
            report.checks.push(roundtrip_check(back == element, start, "forward disagrees"));
        }
        (Which::Tree, Direction::Forward) => {
            let pair = parse_setpair(&text).map_err(usage)?;
            let tree = pair_to_marked_tree(&pair).map_err(usage)?;
            let back = marked_tree_to_pair(&tree).map_err(usage)?;
            report.result("input", setpair_value(&pair));
            report.result("output", tree_value(&tree));
            report.checks.push(roundtrip_check(back == pair, start, "inverse disagrees"));
        }
        (Which::Tree, Direction::Inverse) => {
            let tree = parse_tree(&text).map_err(usage)?;
            let pair = marked_tree_to_pair(&tree).map_err(usage)?;
            let back = pair_to_marked_tree(&pair).map_err(usage)?;
            report.result("input", tree_value(&tree));
            report.result("output", setpair_value(&pair));
            report.checks.push(roundtrip_check(back == tree, start, "forward disagrees"));
        }
    }

    let ok = report.all_checks_pass();
    report.emit();
    Ok(if ok { 0 } else { 1 })
}

// ----------------------------------------------------------- crosscheck --

fn cmd_crosscheck(a: CrosscheckArgs) -> Result<u8, CliError> {
    if !(0..=128).contains(&a.max_n) {
        return Err(CliError::Usage(format!("--max-n {} outside [0, 128]", a.max_n)));
    }
    let text = std::fs::read_to_string(&a.bfile)
        .map_err(|e| CliError::Usage(format!("{}: {e}", a.bfile.display())))?;
    let parsed = bfile::parse_bfile(&text).map_err(usage)?;

    let domain_min: i64 = match a.sequence {
        SeqKind::Dags => 0,
        SeqKind::TreesBipartiteDiag | SeqKind::EcDiag => 1,
    };
    let start = Instant::now();
    let mut compared = 0u64;
    let mut matched = 0u64;
    let mut below = 0u64;
    let mut beyond = 0u64;
    let mut first_last: Option<(i64, i64)> = None;
    let mut mismatches = Vec::new();
    for (index, value) in &parsed.entries {
        if *index < domain_min {
            below += 1;
            continue;
        }
        if *index > a.max_n {
            beyond += 1;
            continue;
        }
        let k = *index as u64;
        let computed = match a.sequence {
            SeqKind::Dags => count_dags_recurrence(k),
            SeqKind::TreesBipartiteDiag => count_spanning_trees_formula(k, k).map_err(setmap_err)?,
            SeqKind::EcDiag => count_ec_formula(k, k).map_err(setmap_err)?,
        };
        compared += 1;
        first_last = Some(match first_last {
            None => (*index, *index),
            Some((lo, _)) => (lo, *index),
        });
        if BigInt::from(computed.clone()) == *value {
            matched += 1;
        } else {
            mismatches.push(json!({
                "index": index,
                "file": value.to_string(),
                "computed": computed.to_string(),
            }));
        }
    }

    let mut report = RunReport::new(format!("crosscheck {}", a.sequence));
    report.param("bfile", a.bfile.display());
    report.param("max-n", a.max_n);
    report.result("file_entries", parsed.entries.len().to_string());
    report.result("compared", compared.to_string());
    report.result("matched", matched.to_string());
    if below > 0 {
        report.result("skipped_below_domain", below.to_string());
    }
    if beyond > 0 {
        report.result("skipped_above_max_n", beyond.to_string());
    }
    if let Some((lo, hi)) = first_last {
        report.result("coverage", format!("{lo}..{hi}"));
    }
    if !mismatches.is_empty() {
        report.result("mismatches", mismatches.clone());
    }
    let ok = mismatches.is_empty();
    report.checks.push(CheckResult {
        name: format!("crosscheck/{}-vs-bfile", a.sequence),
        status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
        counterexample: mismatches.first().map(|m| m.to_string()),
        seconds: start.elapsed().as_secs_f64(),
    });
    report.emit();
    Ok(if ok { 0 } else { 1 })
}

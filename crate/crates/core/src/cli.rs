//! `omegalab` command line: one subcommand per experiment plus `all`.
//!
//! Exit codes: 0 on success, 2 on a usage error, 1 on a runtime error.
//! Reports record their configuration except the output directory, so the
//! same flags give the same bytes wherever they are written.

use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::{invalid, Result};
use crate::learn::{run_experiment, FeatureConfig, LearnConfig, Split, Task, TrainConfig, DEFAULT_TRAIN_FRAC};
use crate::levin::{
    divergence_partial_sum, enumerate_mass, invariance_gap, shortest_program, toy_complexity, BitString, Machine,
};
use crate::maxent::maxent_report;
use crate::report::{fmt_sig9, to_json, write_text, Table};
use crate::segment_cache;
use crate::sieve::{omega_upto, prime_count, sieve_primes, OmegaSegment, PrimeSet, DEFAULT_SEGMENT_SIZE};
use crate::stats::{erdos_kac_report, MomentLedger, DEFAULT_BINS, MIN_EK_N};

/// Output lengths covered by `invariance.csv`.
pub const INVARIANCE_N_MAX: u32 = 12;

#[derive(Parser, Debug)]
#[command(name = "omegalab", version, about = "Desk-scale experiments on ω(n), toy algorithmic probability and prime learnability")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sieve ω(n) over [2, N], write the segment cache and print π(N).
    Sieve(Common),
    /// Hardy–Ramanujan and Erdős–Kac statistics at powers of ten up to N.
    Ek {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ek: EkArgs,
    },
    /// Prime-density entropy and max-entropy reference laws for ω.
    Maxent(Common),
    /// Exact toy complexity and algorithmic probability.
    Levin {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        levin: LevinArgs,
    },
    /// Logistic probe on binary digits.
    Learn {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        learn: LearnArgs,
    },
    /// Every report from one sieve.
    All {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ek: EkArgs,
        #[command(flatten)]
        levin: LevinArgs,
        #[command(flatten)]
        learn: LearnArgs,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        self != Format::Json
    }

    fn json(self) -> bool {
        self != Format::Csv
    }
}

#[derive(Args, Debug, Clone, Serialize)]
struct Common {
    #[arg(long, default_value_t = 1_000_000)]
    #[serde(rename = "N")]
    limit: u64,
    #[arg(long, default_value_t = DEFAULT_SEGMENT_SIZE, value_parser = clap::value_parser!(u64).range(1..))]
    segment_size: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    workers: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = ".")]
    #[serde(skip)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,
}

#[derive(Args, Debug, Clone, Serialize)]
struct EkArgs {
    #[arg(long, default_value_t = DEFAULT_BINS, value_parser = clap::value_parser!(u32).range(1..))]
    bins: u32,
}

#[derive(Args, Debug, Clone, Serialize)]
struct LevinArgs {
    #[arg(long, default_value = "u1")]
    machine: Machine,
    /// Longest program enumerated.
    #[arg(long, default_value_t = 20)]
    max_len: u8,
    #[arg(long)]
    target: Option<BitString>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SplitKind {
    Range,
    Shuffle,
}

#[derive(Args, Debug, Clone)]
struct LearnArgs {
    #[arg(long, default_value = "prime")]
    task: Task,
    #[arg(long, value_enum, default_value_t = SplitKind::Range)]
    split: SplitKind,
    #[arg(long, default_value_t = TrainConfig::default().epochs)]
    epochs: u32,
    #[arg(long, default_value_t = TrainConfig::default().lr)]
    lr: f64,
    #[arg(long, default_value_t = TrainConfig::default().l2)]
    l2: f64,
    /// Mini-batch size; 0 trains on the full batch.
    #[arg(long, default_value_t = TrainConfig::default().batch)]
    batch: usize,
    /// Also train without the parity column and report the difference.
    #[arg(long)]
    ablate_bit0: bool,
    /// Add one-hot n mod 3 and n mod 5 columns.
    #[arg(long)]
    engineered_features: bool,
}

impl LearnArgs {
    fn config(&self, common: &Common) -> LearnConfig {
        let split = match self.split {
            SplitKind::Range => Split::Range { train_frac: DEFAULT_TRAIN_FRAC },
            SplitKind::Shuffle => Split::Shuffle { seed: common.seed, train_frac: DEFAULT_TRAIN_FRAC },
        };
        LearnConfig {
            task: self.task,
            n: common.limit,
            split,
            features: FeatureConfig { engineered: self.engineered_features, ablate_bit0: false },
            train: TrainConfig {
                lr: self.lr,
                epochs: self.epochs,
                l2: self.l2,
                batch: self.batch,
                seed: common.seed,
            },
            ablate_bit0: self.ablate_bit0,
        }
    }
}

/// Runs the command line `args` (without the program name) on the process's
/// standard streams.
pub fn run(args: &[String]) -> i32 {
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(std::iter::once("omegalab").chain(args.iter().map(String::as_str))) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Sieve(common) => {
            let ctx = Context::new(&common, "sieve")?;
            let omega = ctx.omega(true)?;
            let primes = ctx.primes()?;
            sieve_summary(&ctx, &omega, &primes, out)
        }
        Command::Ek { common, ek } => {
            let ctx = Context::new(&common, "ek")?;
            ctx.require_ek_range()?;
            ek_report(&ctx, &ek, &ctx.omega(false)?, out)
        }
        Command::Maxent(common) => {
            let ctx = Context::new(&common, "maxent")?;
            ctx.require_ek_range()?;
            maxent(&ctx, &ctx.omega(false)?, &ctx.primes()?, out)
        }
        Command::Levin { common, levin } => {
            let ctx = Context::new(&common, "levin")?;
            levin_report(&ctx, &levin, out)
        }
        Command::Learn { common, learn } => {
            let ctx = Context::new(&common, "learn")?;
            ctx.require_ek_range()?;
            let omega = match learn.task {
                Task::EkSign => Some(ctx.omega(false)?),
                Task::Prime => None,
            };
            learn_report(&ctx, &learn, &ctx.primes()?, omega.as_ref(), out)
        }
        Command::All { common, ek, levin, learn } => {
            let ctx = Context::new(&common, "all")?;
            ctx.require_ek_range()?;
            let omega = ctx.omega(true)?;
            let primes = ctx.primes()?;
            sieve_summary(&ctx, &omega, &primes, out)?;
            ek_report(&ctx, &ek, &omega, out)?;
            maxent(&ctx, &omega, &primes, out)?;
            levin_report(&ctx, &levin, out)?;
            learn_report(&ctx, &learn, &primes, Some(&omega), out)
        }
    }
}

struct Context<'a> {
    common: &'a Common,
    subcommand: &'static str,
}

impl<'a> Context<'a> {
    fn new(common: &'a Common, subcommand: &'static str) -> Result<Self> {
        if common.limit < 2 {
            return Err(invalid(format!("--limit must be at least 2, got {}", common.limit)));
        }
        std::fs::create_dir_all(&common.out)?;
        Ok(Self { common, subcommand })
    }

    fn n(&self) -> u64 {
        self.common.limit
    }

    fn require_ek_range(&self) -> Result<()> {
        if self.n() < MIN_EK_N {
            return Err(invalid(format!("{} needs --limit ≥ {MIN_EK_N}", self.subcommand)));
        }
        Ok(())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.common.out.join(name)
    }

    fn write(&self, name: &str, text: &str) -> Result<()> {
        write_text(&self.path(name), text)
    }

    fn run_config(&self, extra: serde_json::Value) -> serde_json::Value {
        let mut v = json!({ "subcommand": self.subcommand });
        let common = serde_json::to_value(self.common).expect("plain config");
        merge(&mut v, common);
        merge(&mut v, extra);
        v
    }

    fn cache_path(&self) -> PathBuf {
        self.path(&format!("omega_{}.epr", self.n()))
    }

    /// ω on [2, N], from the segment cache in the output directory when present.
    fn omega(&self, save: bool) -> Result<OmegaSegment> {
        let path = self.cache_path();
        if path.exists() {
            let seg = segment_cache::load(&path)?;
            if seg.lo() == 2 && seg.hi() == self.n() + 1 {
                return Ok(seg);
            }
        }
        let seg = omega_upto(self.n(), self.common.segment_size, self.common.workers as usize)?;
        if save {
            segment_cache::save(&seg, &path)?;
        }
        Ok(seg)
    }

    fn primes(&self) -> Result<PrimeSet> {
        sieve_primes(self.n())
    }
}

fn merge(into: &mut serde_json::Value, from: serde_json::Value) {
    if let (Some(a), serde_json::Value::Object(b)) = (into.as_object_mut(), from) {
        a.extend(b);
    }
}

fn sieve_summary(ctx: &Context, omega: &OmegaSegment, primes: &PrimeSet, out: &mut dyn Write) -> Result<()> {
    let pi = prime_count(primes, ctx.n())?;
    let sum: u64 = omega.omega().iter().map(|&w| u64::from(w)).sum();
    writeln!(out, "N={} pi(N)={pi} sum_omega={sum} cache={}", ctx.n(), ctx.cache_path().display())?;
    Ok(())
}

/// Powers of ten from 100 up to `n`, then `n` itself.
fn checkpoints(n: u64) -> Vec<u64> {
    let mut c: Vec<u64> = std::iter::successors(Some(100u64), |&p| p.checked_mul(10))
        .take_while(|&p| p <= n)
        .collect();
    if c.last() != Some(&n) {
        c.push(n);
    }
    c
}

const EK_HEADER: [&str; 12] = [
    "n_max", "count", "mean", "loglogN", "mertens", "mean_dev", "variance", "var_dev", "ks", "cheb1", "cheb2", "cheb3",
];

fn ek_report(ctx: &Context, args: &EkArgs, omega: &OmegaSegment, out: &mut dyn Write) -> Result<()> {
    let mut ledger = MomentLedger::new();
    let mut next = 2u64;
    let mut table = Table::new(&EK_HEADER);
    let mut rows = Vec::new();
    let mut last = None;
    for c in checkpoints(ctx.n()) {
        let start = (next - omega.lo()) as usize;
        let end = (c + 1 - omega.lo()) as usize;
        ledger.accumulate_counts(next, &omega.omega()[start..end])?;
        next = c + 1;
        let report = erdos_kac_report(&ledger, args.bins)?;
        let hr = &report.hardy_ramanujan;
        let cheb = |l| hr.chebyshev(l).expect("standard lambdas");
        let values = [
            hr.mean,
            hr.loglog_n,
            hr.mertens_shift,
            hr.mean_deviation,
            hr.variance,
            hr.variance_deviation,
            report.ks_distance,
            cheb(1),
            cheb(2),
            cheb(3),
        ];
        let mut cells = vec![c.to_string(), hr.count.to_string()];
        cells.extend(values.iter().map(|&v| fmt_sig9(v)));
        table.push(cells);
        let mut row = serde_json::Map::new();
        row.insert("n_max".into(), json!(c));
        row.insert("count".into(), json!(hr.count));
        for (name, v) in EK_HEADER[2..].iter().zip(values) {
            row.insert((*name).into(), json!(v));
        }
        rows.push(serde_json::Value::Object(row));
        last = Some(report);
    }
    let last = last.expect("at least one checkpoint");
    let stem = format!("ek_{}", ctx.n());
    if ctx.common.format.csv() {
        ctx.write(&format!("{stem}.csv"), &table.to_csv())?;
    }
    if ctx.common.format.json() {
        let doc = json!({
            "config": ctx.run_config(serde_json::to_value(args)?),
            "checkpoints": rows,
            "histogram": last.histogram,
            "underflow_mass": last.underflow_mass,
            "overflow_mass": last.overflow_mass,
        });
        ctx.write(&format!("{stem}.json"), &to_json(&doc)?)?;
    }
    let hr = &last.hardy_ramanujan;
    writeln!(
        out,
        "N={} mean={} loglogN={} variance={} ks={}",
        ctx.n(),
        fmt_sig9(hr.mean),
        fmt_sig9(hr.loglog_n),
        fmt_sig9(hr.variance),
        fmt_sig9(last.ks_distance)
    )?;
    Ok(())
}

fn maxent(ctx: &Context, omega: &OmegaSegment, primes: &PrimeSet, out: &mut dyn Write) -> Result<()> {
    let mut ledger = MomentLedger::new();
    ledger.accumulate(omega)?;
    let r = maxent_report(ctx.n(), primes, &ledger)?;
    let fields: [(&str, String); 8] = [
        ("N", r.density.n.to_string()),
        ("density", fmt_sig9(r.density.density)),
        ("entropy_bits", fmt_sig9(r.density.entropy_bits)),
        ("total_bits", fmt_sig9(r.density.total_bits)),
        ("naive_list_bits", fmt_sig9(r.density.naive_list_bits)),
        ("tv_geometric", fmt_sig9(r.tv_geometric)),
        ("tv_poisson", fmt_sig9(r.tv_poisson)),
        ("lambda_used", fmt_sig9(r.lambda_used)),
    ];
    if ctx.common.format.csv() {
        let header: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
        let mut t = Table::new(&header);
        t.push(fields.iter().map(|(_, v)| v.clone()).collect());
        ctx.write("maxent.csv", &t.to_csv())?;
    }
    if ctx.common.format.json() {
        let doc = json!({
            "config": ctx.run_config(json!({})),
            "N": r.density.n,
            "pi_n": r.density.pi_n,
            "density": r.density.density,
            "entropy_bits": r.density.entropy_bits,
            "total_bits": r.density.total_bits,
            "naive_list_bits": r.density.naive_list_bits,
            "constant_rate_log_loss_bits": r.density.constant_rate_log_loss_bits,
            "tv_geometric": r.tv_geometric,
            "tv_poisson": r.tv_poisson,
            "lambda_used": r.lambda_used,
            "empirical_entropy_bits": r.empirical_entropy_bits,
            "geometric_entropy_bits": r.geometric_entropy_bits,
            "poisson_entropy_bits": r.poisson_entropy_bits,
        });
        ctx.write("maxent.json", &to_json(&doc)?)?;
    }
    writeln!(
        out,
        "N={} density={} entropy_bits={} tv_geometric={} tv_poisson={}",
        ctx.n(),
        fields[1].1,
        fields[2].1,
        fields[5].1,
        fields[6].1
    )?;
    Ok(())
}

fn levin_report(ctx: &Context, args: &LevinArgs, out: &mut dyn Write) -> Result<()> {
    let cutoff = u32::from(args.max_len);
    let mass = enumerate_mass(args.machine, cutoff)?;
    let inv = invariance_gap(INVARIANCE_N_MAX)?;

    writeln!(out, "machine={} cutoff={cutoff}", args.machine)?;
    if let Some(x) = &args.target {
        if args.machine.is_prefix_free() {
            let k = toy_complexity(args.machine, x)?;
            let p = shortest_program(args.machine, x)?;
            writeln!(out, "target={x} K={k} program={p} m={} (~{})", mass.mass(x), fmt_sig9(mass.mass(x).to_f64()))?;
        } else {
            let d = divergence_partial_sum(x, cutoff)?;
            let shortest = d.shortest.map_or("none".to_string(), |s| s.to_string());
            writeln!(out, "target={x} K=undefined shortest={shortest} partial_sum={} (~{})", d.sum, fmt_sig9(d.sum.to_f64()))?;
        }
    }
    let total = mass.total();
    writeln!(out, "outputs={} total_mass={total} (~{})", mass.len(), fmt_sig9(total.to_f64()))?;
    writeln!(out, "c_measured={} (n_max={INVARIANCE_N_MAX})", inv.c_measured)?;
    writeln!(out, "output,mass")?;
    for (x, m) in mass.iter().take(16) {
        writeln!(out, "{x},{m}")?;
    }
    if mass.len() > 16 {
        writeln!(out, "... {} more in levin_mass", mass.len() - 16)?;
    }

    let mut mass_table = Table::new(&["output", "numerator", "log2_denominator", "mass_float"]);
    for (x, m) in mass.iter() {
        mass_table.push(vec![
            x.to_string(),
            m.numerator().to_string(),
            m.log2_denominator().to_string(),
            fmt_sig9(m.to_f64()),
        ]);
    }
    let mut inv_table = Table::new(&["n", "max_gap"]);
    for (n, g) in inv.gap_by_length.iter().enumerate() {
        inv_table.push(vec![n.to_string(), g.to_string()]);
    }
    if ctx.common.format.csv() {
        ctx.write("levin_mass.csv", &mass_table.to_csv())?;
        ctx.write("invariance.csv", &inv_table.to_csv())?;
    }
    if ctx.common.format.json() {
        let entries: Vec<_> = mass
            .iter()
            .map(|(x, m)| {
                json!({
                    "output": x,
                    "numerator": m.numerator().to_string(),
                    "log2_denominator": m.log2_denominator(),
                    "mass_float": m.to_f64(),
                })
            })
            .collect();
        let doc = json!({
            "config": ctx.run_config(serde_json::to_value(args)?),
            "total": { "numerator": total.numerator().to_string(), "log2_denominator": total.log2_denominator() },
            "programs_by_length": mass.programs_by_length(),
            "mass": entries,
        });
        ctx.write("levin_mass.json", &to_json(&doc)?)?;
        let inv_doc = json!({
            "n_max": inv.n_max,
            "gap_by_length": inv.gap_by_length,
            "c_measured": inv.c_measured,
        });
        ctx.write("invariance.json", &to_json(&inv_doc)?)?;
    }
    Ok(())
}

fn learn_report(
    ctx: &Context,
    args: &LearnArgs,
    primes: &PrimeSet,
    omega: Option<&OmegaSegment>,
    out: &mut dyn Write,
) -> Result<()> {
    let config = args.config(ctx.common);
    let report = run_experiment(&config, primes, omega)?;
    let stem = format!("learn_{}_{}", config.task, ctx.n());
    if ctx.common.format.json() {
        let mut doc = serde_json::to_value(&report)?;
        merge(&mut doc, json!({ "run": ctx.run_config(json!({})) }));
        ctx.write(&format!("{stem}.json"), &to_json(&doc)?)?;
    }
    if ctx.common.format.csv() {
        let mut t = Table::new(&["epoch", "train_loss_bits"]);
        for (epoch, loss) in report.curve_bits.iter().enumerate() {
            t.push(vec![epoch.to_string(), fmt_sig9(*loss)]);
        }
        ctx.write(&format!("{stem}_curve.csv"), &t.to_csv())?;
    }
    writeln!(
        out,
        "task={} N={} split={} test_accuracy={} baseline_accuracy={} info_gain_bits={}",
        config.task,
        ctx.n(),
        config.split.name(),
        fmt_sig9(report.test.accuracy),
        fmt_sig9(report.baseline.accuracy),
        fmt_sig9(report.info_gain_bits)
    )?;
    Ok(())
}

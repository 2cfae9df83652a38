//! The `legendre-parity` command line: one subcommand per experiment, CSV on
//! stdout (or `--out`), diagnostics on stderr.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or parse error, 3 capacity.

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::charsum::{exact_character_sum, exact_odd_probability, WitnessSet};
use crate::error::{Error, Result};
use crate::modarith::{legendre, FieldPrime, TABLE_LIMIT};
use crate::reduction::{self, choose_prime_for_n, DEFAULT_C};
use crate::sat_frontend::{parse_dimacs, sat_exact_scan, sat_experiment};
use crate::stream::{self, tag};
use crate::vv_baseline::{isolation_experiment, vv_amplified_experiment, BitWitnesses};

const DEFAULT_TRIALS: u64 = 10_000;

#[derive(Debug, Parser)]
#[command(
    name = "legendre-parity",
    version,
    about = "Legendre-symbol parity reduction experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write CSV to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Legendre symbol of A modulo the prime P.
    Legendre {
        #[arg(long)]
        p: u128,
        a: u128,
    },
    /// Exhaustive character sum and Weil-bound check.
    Charsum {
        #[arg(long)]
        p: u128,
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact and/or sampled odd-parity probability of the shift filter.
    Theorem1 {
        /// Explicit prime; otherwise chosen from --n and --c.
        #[arg(long, conflicts_with = "n", required_unless_present = "n")]
        p: Option<u128>,
        /// Witness bit-length; p becomes the smallest prime above 2^ceil(c n).
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_C)]
        c: f64,
        #[arg(long)]
        set: String,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Valiant-Vazirani isolation and amplified parity rates.
    Vv {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        set: String,
        /// Trials combined per amplified sample; defaults to n.
        #[arg(long)]
        m: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// End-to-end run on a DIMACS CNF file.
    Sat {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_C)]
        c: f64,
        /// Visit every shift instead of sampling (needs p < 2^26).
        #[arg(long)]
        exact_scan: bool,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// exact when p < 2^26, then sampled
    Auto,
    Exact,
    Sampled,
    Both,
}

/// A command's output plus the parameters needed to replay it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub command: String,
    pub parameters: Vec<(String, String)>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl RunRecord {
    fn new(command: &str, header: Vec<&'static str>) -> Self {
        RunRecord {
            command: command.to_string(),
            parameters: Vec::new(),
            header,
            rows: Vec::new(),
        }
    }

    fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.push((key.to_string(), value.to_string()));
        self
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// One-line provenance for stderr.
    pub fn provenance(&self) -> String {
        let params: Vec<String> = self
            .parameters
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        format!(
            "{} {} {} {}",
            env!("CARGO_PKG_NAME"),
            env!("CARGO_PKG_VERSION"),
            self.command,
            params.join(" ")
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Text(String),
    Table(RunRecord),
}

impl Output {
    pub fn render(&self) -> Result<String> {
        match self {
            Output::Text(s) => Ok(s.clone()),
            Output::Table(r) => r.to_csv(),
        }
    }
}

/// Set description: `random:<size>`, `list:x1,x2,...` or a bare comma list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetSpec {
    Random(usize),
    List(Vec<u128>),
}

impl std::str::FromStr for SetSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(size) = s.strip_prefix("random:") {
            let size = size
                .trim()
                .parse()
                .map_err(|_| Error::usage(format!("invalid random set size in {s:?}")))?;
            return Ok(SetSpec::Random(size));
        }
        let list = s.strip_prefix("list:").unwrap_or(s);
        let values = list
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<u128>()
                    .map_err(|_| Error::usage(format!("invalid set element {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SetSpec::List(values))
    }
}

impl SetSpec {
    /// Distinct values below `bound`. Random sets come from the seeded stream.
    pub fn materialize(&self, bound: u128, seed: u64) -> Result<Vec<u128>> {
        match self {
            SetSpec::List(values) => {
                if let Some(&v) = values.iter().find(|&&v| v >= bound) {
                    return Err(Error::usage(format!(
                        "set element {v} is not below {bound}"
                    )));
                }
                let distinct: BTreeSet<u128> = values.iter().copied().collect();
                if distinct.len() != values.len() {
                    return Err(Error::usage("set list contains duplicates"));
                }
                Ok(distinct.into_iter().collect())
            }
            SetSpec::Random(size) => random_set(*size, bound, seed),
        }
    }
}

/// `size` distinct uniform values from `[0, bound)`.
pub fn random_set(size: usize, bound: u128, seed: u64) -> Result<Vec<u128>> {
    if size as u128 > bound {
        return Err(Error::usage(format!(
            "cannot draw {size} distinct values below {bound}"
        )));
    }
    let mut rng = stream::substream(seed, tag::RANDOM_SET, 0);
    if bound <= 1 << 24 && size as u128 * 2 > bound {
        let mut v: Vec<u128> = rand::seq::index::sample(&mut rng, bound as usize, size)
            .into_iter()
            .map(|i| i as u128)
            .collect();
        v.sort_unstable();
        return Ok(v);
    }
    let mut chosen = BTreeSet::new();
    while chosen.len() < size {
        chosen.insert(stream::uniform_below(&mut rng, bound));
    }
    Ok(chosen.into_iter().collect())
}

fn prime(p: u128) -> Result<FieldPrime> {
    FieldPrime::new(p)
}

fn check_run(run: &RunArgs) -> Result<()> {
    if run.trials == 0 {
        return Err(Error::usage("--trials must be at least 1"));
    }
    if run.workers == 0 {
        return Err(Error::usage("--workers must be at least 1"));
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Legendre { p, a } => {
            let p = prime(*p)?;
            Ok(Output::Text(format!("{}\n", legendre(&p.element(*a))?)))
        }
        Command::Charsum { p, set, seed } => cmd_charsum(*p, set, *seed).map(Output::Table),
        Command::Theorem1 {
            p,
            n,
            c,
            set,
            mode,
            run,
        } => cmd_theorem1(*p, *n, *c, set, *mode, run).map(Output::Table),
        Command::Vv { n, set, m, run } => cmd_vv(*n, set, *m, run).map(Output::Table),
        Command::Sat {
            file,
            c,
            exact_scan,
            run,
        } => cmd_sat(file, *c, *exact_scan, run).map(Output::Table),
    }
}

fn cmd_charsum(p: u128, set: &str, seed: u64) -> Result<RunRecord> {
    let p = prime(p)?;
    if p.value() >= TABLE_LIMIT {
        return Err(Error::capacity(format!(
            "p = {p} is outside the exhaustive range (p < 2^26)"
        )));
    }
    let spec: SetSpec = set.parse()?;
    let witnesses = WitnessSet::new(p, spec.materialize(p.value(), seed)?)?;
    let report = exact_character_sum(&witnesses)?;
    let mut rec = RunRecord::new(
        "charsum",
        vec!["p", "set_size", "sum", "bound", "holds", "zero_shifts"],
    );
    rec.param("p", p).param("set", set).param("seed", seed);
    rec.rows.push(vec![
        p.to_string(),
        report.degree.to_string(),
        report.sum.to_string(),
        format!("{:.6}", report.weil_bound),
        report.holds.to_string(),
        report.zero_shift_count.to_string(),
    ]);
    Ok(rec)
}

fn cmd_theorem1(
    p: Option<u128>,
    n: Option<u32>,
    c: f64,
    set: &str,
    mode: Mode,
    run: &RunArgs,
) -> Result<RunRecord> {
    check_run(run)?;
    let (p, bound) = match (p, n) {
        (Some(p), _) => {
            let p = prime(p)?;
            (p, p.value())
        }
        (None, Some(n)) => {
            let params = choose_prime_for_n(n, c)?;
            (params.p, 1u128 << n)
        }
        (None, None) => return Err(Error::usage("theorem1 needs --p or --n")),
    };
    let spec: SetSpec = set.parse()?;
    let witnesses = WitnessSet::new(p, spec.materialize(bound, run.seed)?)?;
    let exhaustive = p.value() < TABLE_LIMIT;
    let (do_exact, do_sampled) = match mode {
        Mode::Auto => (exhaustive, true),
        Mode::Exact => (true, false),
        Mode::Sampled => (false, true),
        Mode::Both => (true, true),
    };
    if do_exact && !exhaustive {
        return Err(Error::capacity(format!(
            "exact mode needs p < 2^26, got p = {p}"
        )));
    }

    let mut rec = RunRecord::new(
        "theorem1",
        vec![
            "mode",
            "p",
            "set_size",
            "odd_count",
            "total",
            "p_hat",
            "std_err",
            "seed",
        ],
    );
    rec.param("p", p)
        .param("set", set)
        .param("mode", format!("{mode:?}").to_lowercase())
        .param("trials", run.trials)
        .param("seed", run.seed);
    let size = witnesses.len().to_string();
    if do_exact {
        let odd = if witnesses.is_empty() {
            0
        } else {
            exact_odd_probability(&witnesses)?.odd_count
        };
        let total = p.value() as u64;
        rec.rows.push(vec![
            "exact".into(),
            p.to_string(),
            size.clone(),
            odd.to_string(),
            total.to_string(),
            (odd as f64 / total as f64).to_string(),
            "0".into(),
            run.seed.to_string(),
        ]);
    }
    if do_sampled {
        let e = reduction::estimate_odd_probability_with_workers(
            &witnesses,
            run.trials,
            run.seed,
            run.workers,
        )?;
        rec.rows.push(vec![
            "sampled".into(),
            p.to_string(),
            size,
            e.odd_count.to_string(),
            e.trials.to_string(),
            e.p_hat.to_string(),
            e.std_err.to_string(),
            run.seed.to_string(),
        ]);
    }
    Ok(rec)
}

fn cmd_vv(n: u32, set: &str, m: Option<usize>, run: &RunArgs) -> Result<RunRecord> {
    check_run(run)?;
    if n == 0 || n > 64 {
        return Err(Error::usage(format!("--n must be in 1..=64, got {n}")));
    }
    let m = m.unwrap_or(n as usize);
    if m == 0 {
        return Err(Error::usage("--m must be at least 1"));
    }
    let spec: SetSpec = set.parse()?;
    let bound = if n >= 64 {
        u64::MAX as u128 + 1
    } else {
        1u128 << n
    };
    let points = spec.materialize(bound, run.seed)?;
    let witnesses = BitWitnesses::new(n, points.into_iter().map(|x| x as u64))?;
    let iso = isolation_experiment(&witnesses, run.trials, run.seed, run.workers)?;
    let amp = vv_amplified_experiment(&witnesses, m, run.trials, run.seed, run.workers)?;
    let mut rec = RunRecord::new(
        "vv",
        vec![
            "n",
            "set_size",
            "m",
            "isolation_rate",
            "amplified_odd_rate",
            "trials",
            "seed",
        ],
    );
    rec.param("n", n)
        .param("set", set)
        .param("m", m)
        .param("trials", run.trials)
        .param("seed", run.seed);
    rec.rows.push(vec![
        n.to_string(),
        witnesses.len().to_string(),
        m.to_string(),
        iso.p_hat.to_string(),
        amp.p_hat.to_string(),
        run.trials.to_string(),
        run.seed.to_string(),
    ]);
    Ok(rec)
}

fn cmd_sat(file: &std::path::Path, c: f64, exact_scan: bool, run: &RunArgs) -> Result<RunRecord> {
    check_run(run)?;
    let text = std::fs::read_to_string(file).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", file.display()),
        ))
    })?;
    let formula = parse_dimacs(&text)?;
    let mut rec = RunRecord::new(
        "sat",
        vec![
            "file",
            "n",
            "num_solutions",
            "p",
            "p_hat",
            "std_err",
            "trials",
            "seed",
        ],
    );
    rec.param("file", file.display())
        .param("c", c)
        .param("exact_scan", exact_scan)
        .param("trials", run.trials)
        .param("seed", run.seed);
    let row = if exact_scan {
        let (params, count, report) = sat_exact_scan(&formula, c)?;
        vec![
            file.display().to_string(),
            formula.num_vars.to_string(),
            count.to_string(),
            params.p.to_string(),
            report.probability_f64().to_string(),
            "0".into(),
            report.total.to_string(),
            run.seed.to_string(),
        ]
    } else {
        let r = sat_experiment(&formula, c, run.trials, run.seed, run.workers)?;
        vec![
            file.display().to_string(),
            formula.num_vars.to_string(),
            r.num_solutions.to_string(),
            r.params.p.to_string(),
            r.estimate.p_hat.to_string(),
            r.estimate.std_err.to_string(),
            r.estimate.trials.to_string(),
            run.seed.to_string(),
        ]
    };
    rec.rows.push(row);
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<String> {
        let mut argv = vec!["legendre-parity"];
        argv.extend_from_slice(args);
        let cli = Cli::try_parse_from(argv).expect("arguments parse");
        run(&cli)?.render()
    }

    #[test]
    fn legendre_command() {
        assert_eq!(run_args(&["legendre", "--p", "7", "3"]).unwrap(), "-1\n");
        assert_eq!(run_args(&["legendre", "--p", "7", "0"]).unwrap(), "0\n");
        assert_eq!(run_args(&["legendre", "--p", "7", "1"]).unwrap(), "+1\n");
        assert_eq!(
            run_args(&["legendre", "--p", "9", "1"])
                .unwrap_err()
                .exit_code(),
            1
        );
    }

    #[test]
    fn charsum_command() {
        let out = run_args(&["charsum", "--p", "7", "--set", "list:1,2"]).unwrap();
        assert_eq!(
            out,
            "p,set_size,sum,bound,holds,zero_shifts\n7,2,-1,2.645751,true,2\n"
        );
        let out =
            run_args(&["charsum", "--p", "1009", "--set", "random:5", "--seed", "3"]).unwrap();
        assert!(out.lines().nth(1).unwrap().starts_with("1009,5,"));
        let err = run_args(&["charsum", "--p", "67108879", "--set", "1"]).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn theorem1_command() {
        let out = run_args(&[
            "theorem1", "--p", "7", "--set", "list:1,2", "--mode", "exact",
        ])
        .unwrap();
        let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(&row[..5], &["exact", "7", "2", "4", "7"]);
        assert!(row[5].starts_with("0.571428"));

        let out =
            run_args(&["theorem1", "--n", "20", "--set", "list:", "--trials", "100"]).unwrap();
        let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[0], "sampled");
        assert_eq!(row[5], "0");

        let out = run_args(&[
            "theorem1",
            "--p",
            "10007",
            "--set",
            "random:10",
            "--trials",
            "20000",
        ])
        .unwrap();
        let rows: Vec<Vec<f64>> = out
            .lines()
            .skip(1)
            .map(|l| {
                l.split(',')
                    .skip(5)
                    .take(2)
                    .map(|v| v.parse().unwrap())
                    .collect()
            })
            .collect();
        assert_eq!(rows.len(), 2);
        assert!((rows[0][0] - rows[1][0]).abs() <= 4.0 * rows[1][1]);
    }

    #[test]
    fn vv_command() {
        let out = run_args(&[
            "vv", "--n", "6", "--set", "random:8", "--m", "4", "--trials", "500",
        ])
        .unwrap();
        let mut lines = out.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,set_size,m,isolation_rate,amplified_odd_rate,trials,seed"
        );
        assert!(lines.next().unwrap().starts_with("6,8,4,"));
        assert_eq!(
            run_args(&["vv", "--n", "3", "--set", "list:8"])
                .unwrap_err()
                .exit_code(),
            1
        );
    }

    #[test]
    fn set_spec_parsing() {
        assert_eq!("random:12".parse::<SetSpec>().unwrap(), SetSpec::Random(12));
        assert_eq!(
            "list:1, 2,3".parse::<SetSpec>().unwrap(),
            SetSpec::List(vec![1, 2, 3])
        );
        assert_eq!("4,5".parse::<SetSpec>().unwrap(), SetSpec::List(vec![4, 5]));
        assert_eq!("list:".parse::<SetSpec>().unwrap(), SetSpec::List(vec![]));
        assert!("random:x".parse::<SetSpec>().is_err());
        assert!("list:1,a".parse::<SetSpec>().is_err());
        assert!(SetSpec::List(vec![1, 1]).materialize(10, 0).is_err());
        assert!(SetSpec::Random(11).materialize(10, 0).is_err());
        assert_eq!(
            SetSpec::Random(10).materialize(10, 0).unwrap(),
            (0..10).collect::<Vec<_>>()
        );
    }

    #[test]
    fn random_sets_are_seeded() {
        let a = random_set(50, 1 << 40, 1).unwrap();
        assert_eq!(a, random_set(50, 1 << 40, 1).unwrap());
        assert_ne!(a, random_set(50, 1 << 40, 2).unwrap());
        assert!(a.windows(2).all(|w| w[0] < w[1]));
    }
}

use clap::{Parser, ValueEnum};
use qswitch::circuits::build_grover;
use qswitch::codes::{code, Version};
use qswitch::noise::{fit_results, log_grid, run_experiment, run_until_failures, write_results_csv, ExperimentResult, NoiseModel};
use qswitch::protocol::{certification_suite, enumerate_faults, write_fault_report, NamedCircuit, Reference};
use qswitch::Error;
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Experiment {
    Prep,
    Switch,
    Hadamard,
    Grover,
    Enumerate,
    Catalog,
}

/// Code-switching simulations for the two versions of the [[8,3,2]] code.
///
/// Every option may also be given in a `--config` file of `key = value` lines (keys are the
/// long option names, plus `experiment`); flags on the command line take precedence.
#[derive(Parser, Debug)]
#[command(name = "qswitch", version)]
struct Cli {
    /// What to run.
    experiment: Option<Experiment>,
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Code version for `prep` and `catalog` (1 or 2).
    #[arg(long = "code-version")]
    code_version: Option<u8>,
    /// Logical basis state, e.g. 000, +++, ++0, 00+.
    #[arg(long)]
    state: Option<String>,
    /// Source version for `switch`.
    #[arg(long)]
    from: Option<u8>,
    /// Target version for `switch`.
    #[arg(long)]
    to: Option<u8>,
    /// Logical qubit for `hadamard` (1, 2 or 3).
    #[arg(long)]
    j: Option<usize>,
    /// Run the noisy state preparation too (`switch`).
    #[arg(long)]
    with_prep: bool,
    /// Encoded Grover circuit instead of the bare three-qubit one.
    #[arg(long)]
    encoded: bool,
    /// Named circuit for `enumerate` (see `enumerate --circuit list`).
    #[arg(long)]
    circuit: Option<String>,
    /// Comma-separated two-qubit error rates; default is 8 log-spaced points in [1e-4, 1e-1].
    #[arg(long)]
    p: Option<String>,
    /// Fixed shots per point; without it shots grow until `--min-failures` failures are seen.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    min_failures: Option<u64>,
    #[arg(long)]
    max_shots: Option<u64>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; default is all available cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Output file; default is `$QSWITCH_OUT/<name>.csv` (or `results/`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Expand permutation-realized logical gates into noisy SWAP gates.
    #[arg(long)]
    noisy_swaps: bool,
}

/// Exit status 2: bad configuration or output; 1: the run itself failed.
enum Failure {
    Config(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => Failure::Config(m),
            other => Failure::Run(other),
        }
    }
}

type Res<T> = Result<T, Failure>;

fn config_err<T>(msg: impl Into<String>) -> Res<T> {
    Err(Failure::Config(msg.into()))
}

/// Command-line values merged over the config file.
struct Settings {
    cli: Cli,
    file: HashMap<String, String>,
}

impl Settings {
    fn raw(&self, key: &str) -> Option<&str> {
        self.file.get(key).map(|s| s.as_str())
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, flag: Option<T>) -> Res<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).or_else(|_| config_err(format!("bad value for {key}: {v:?}"))),
        }
    }

    fn flag(&self, key: &str, flag: bool) -> Res<bool> {
        Ok(flag || self.parse::<bool>(key, None)?.unwrap_or(false))
    }

    fn string(&self, key: &str, flag: &Option<String>) -> Option<String> {
        flag.clone().or_else(|| self.raw(key).map(String::from))
    }

    fn version(&self, key: &str, flag: Option<u8>) -> Res<Option<Version>> {
        match self.parse(key, flag)? {
            None => Ok(None),
            Some(v) => Version::from_number(v).map(Some).or_else(|e| config_err(e.to_string())),
        }
    }

    fn threads(&self) -> Res<usize> {
        let default = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        Ok(self.parse("threads", self.cli.threads)?.unwrap_or(default).max(1))
    }

    fn seed(&self) -> Res<u64> {
        Ok(self.parse("seed", self.cli.seed)?.unwrap_or(0))
    }

    fn p_values(&self) -> Res<Vec<f64>> {
        let Some(spec) = self.string("p", &self.cli.p) else {
            return Ok(log_grid(1e-4, 1e-1, 8));
        };
        let mut out = vec![];
        for t in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match t.parse::<f64>() {
                Ok(v) if (0.0..=1.0).contains(&v) => out.push(v),
                _ => return config_err(format!("bad error rate {t:?}")),
            }
        }
        if out.is_empty() {
            return config_err("empty p list");
        }
        Ok(out)
    }

    fn output(&self, default_name: &str) -> Res<PathBuf> {
        if let Some(p) = self.parse::<PathBuf>("out", self.cli.out.clone())? {
            return Ok(p);
        }
        let dir = std::env::var_os("QSWITCH_OUT").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("results"));
        Ok(dir.join(default_name))
    }
}

fn read_config(path: &Path) -> Res<HashMap<String, String>> {
    let text = std::fs::read_to_string(path).or_else(|e| config_err(format!("{}: {e}", path.display())))?;
    let mut out = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return config_err(format!("{}:{}: expected key = value", path.display(), i + 1));
        };
        out.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(out)
}

fn find(name: &str) -> Res<NamedCircuit> {
    match name {
        "grover-encoded" | "grover-unencoded" => Ok(NamedCircuit {
            name: name.into(),
            circuit: build_grover(name == "grover-encoded")?,
            reference: Reference::grover(),
        }),
        _ => certification_suite()?
            .into_iter()
            .find(|nc| nc.name == name)
            .map_or_else(|| config_err(format!("unknown circuit {name:?}; try --circuit list")), Ok),
    }
}

fn circuit_names() -> Res<Vec<String>> {
    let mut v: Vec<String> = certification_suite()?.into_iter().map(|nc| nc.name).collect();
    v.extend(["grover-unencoded".into(), "grover-encoded".into()]);
    Ok(v)
}

fn ensure_parent(path: &Path) -> Res<()> {
    match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => std::fs::create_dir_all(d).or_else(|e| config_err(format!("{}: {e}", d.display()))),
        _ => Ok(()),
    }
}

fn sweep(s: &Settings, nc: &NamedCircuit) -> Res<()> {
    let (seed, threads) = (s.seed()?, s.threads()?);
    let shots = s.parse("shots", s.cli.shots)?;
    if shots == Some(0) {
        return config_err("shots must be at least 1");
    }
    let min_failures = s.parse("min_failures", s.cli.min_failures)?.unwrap_or(50);
    let max_shots = s.parse("max_shots", s.cli.max_shots)?.unwrap_or(100_000_000);
    let noisy_swaps = s.flag("noisy_swaps", s.cli.noisy_swaps)?;
    let path = s.output(&format!("{}.csv", nc.name))?;
    let mut rows: Vec<ExperimentResult> = vec![];
    println!("# {} ({} ops, seed {seed})", nc.name, nc.circuit.ops.len());
    println!("{:>10} {:>12} {:>10} {:>12} {:>24} {:>9}", "p", "shots", "failures", "p_L", "p_L 95% CI", "R");
    for p in s.p_values()? {
        let noise = NoiseModel { noisy_swaps, ..NoiseModel::new(p) };
        let r = match shots {
            Some(n) => run_experiment(&nc.circuit, &noise, n, &nc.reference, seed, threads)?,
            None if p == 0.0 => run_experiment(&nc.circuit, &noise, 1000, &nc.reference, seed, threads)?,
            None => run_until_failures(&nc.circuit, &noise, &nc.reference, seed, threads, 10_000, max_shots, min_failures)?,
        };
        println!(
            "{:>10.3e} {:>12} {:>10} {:>12.4e} [{:.3e}, {:.3e}] {:>9.5}{}",
            r.p,
            r.shots,
            r.n_failure,
            r.p_l,
            r.p_l_ci_lo,
            r.p_l_ci_hi,
            r.r,
            if r.insufficient { "  insufficient" } else { "" }
        );
        rows.push(r);
    }
    if let Ok(fit) = fit_results(&rows) {
        println!("# fit: p_L = {:.3e} * p^{:.3} (r² {:.4})", fit.prefactor, fit.exponent, fit.r2);
    }
    ensure_parent(&path)?;
    let f = std::fs::File::create(&path).or_else(|e| config_err(format!("{}: {e}", path.display())))?;
    write_results_csv(&rows, f)?;
    println!("# wrote {}", path.display());
    Ok(())
}

fn run(s: Settings) -> Res<()> {
    let experiment = match (s.cli.experiment, s.raw("experiment")) {
        (Some(e), _) => e,
        (None, Some(name)) => Experiment::from_str(name, true).or_else(|_| config_err(format!("unknown experiment {name:?}")))?,
        (None, None) => return config_err("no experiment given"),
    };
    let state = s.string("state", &s.cli.state);
    match experiment {
        Experiment::Catalog => {
            let versions = match s.version("code_version", s.cli.code_version)? {
                Some(v) => vec![v],
                None => vec![Version::V1, Version::V2],
            };
            for v in versions {
                print!("{}", code(v).catalog());
            }
            Ok(())
        }
        Experiment::Prep => {
            let v = s.version("code_version", s.cli.code_version)?.unwrap_or(Version::V2);
            sweep(&s, &find(&format!("prep-v{}-{}", v.number(), state.as_deref().unwrap_or("000")))?)
        }
        Experiment::Switch => {
            let from = s.version("from", s.cli.from)?.unwrap_or(Version::V1);
            let to = s.version("to", s.cli.to)?.unwrap_or(if from == Version::V1 { Version::V2 } else { Version::V1 });
            if from == to {
                return config_err("--from and --to must differ");
            }
            let prefix = if s.flag("with_prep", s.cli.with_prep)? { "prep-" } else { "" };
            let name = format!("{prefix}switch-{}to{}-{}", from.number(), to.number(), state.as_deref().unwrap_or("+++"));
            sweep(&s, &find(&name)?)
        }
        Experiment::Hadamard => {
            let j = s.parse("j", s.cli.j)?.unwrap_or(1);
            sweep(&s, &find(&format!("hadamard-{j}-{}", state.as_deref().unwrap_or("+++")))?)
        }
        Experiment::Grover => {
            let encoded = s.flag("encoded", s.cli.encoded)?;
            sweep(&s, &find(if encoded { "grover-encoded" } else { "grover-unencoded" })?)
        }
        Experiment::Enumerate => {
            let Some(name) = s.string("circuit", &s.cli.circuit) else {
                return config_err("enumerate needs --circuit");
            };
            if name == "list" {
                circuit_names()?.iter().for_each(|n| println!("{n}"));
                return Ok(());
            }
            let nc = find(&name)?;
            let rep = enumerate_faults(&nc.circuit, &nc.reference, 2, s.threads()?)?;
            println!("circuit: {}", nc.name);
            println!("sites: {}", rep.total_sites);
            println!("detected: {}", rep.detected);
            println!("benign: {}", rep.benign);
            println!("logical_failures: {}", rep.logical_failures.len());
            let path = s.output(&format!("{}-faults.csv", nc.name))?;
            ensure_parent(&path)?;
            write_fault_report(&rep, &path).map_err(|e| Failure::Config(e.to_string()))?;
            println!("report: {}", path.display());
            Ok(())
        }
    }
}

fn report(f: Failure) -> ExitCode {
    match f {
        Failure::Config(m) => {
            eprintln!("qswitch: {m}");
            ExitCode::from(2)
        }
        Failure::Run(e) => {
            eprintln!("qswitch: {e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match cli.config.as_deref().map(read_config).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(f) => return report(f),
    };
    match run(Settings { cli, file }) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(f),
    }
}

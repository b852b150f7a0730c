use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use weil_core::charsum::gauss_sum;
use weil_core::config::{CheckKind, RunConfig};
use weil_core::cyclotomic::PrimeSite;
use weil_core::group_ring::CharPsi;
use weil_core::iwasawa::{bernoulli_b1, theta_series, BernoulliB1};
use weil_core::report::{write_atomic, Report};
use weil_core::verify::{
    check_gauss_norm, check_irregular, check_lambda_mu, check_theta_bernoulli,
    check_theta_coherence, run_grid, CheckReport, Status,
};
use weil_core::Error;

#[derive(Parser, Debug)]
#[command(name = "weil", version, about = "Exact checks on cyclotomic Gauss sums, Stickelberger ideals and θ-series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the Gauss sum / Stickelberger / Weil suite over a grid.
    Verify(Common),
    /// Evaluate one Gauss sum and check τ·τ̄ = q.
    Gauss {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        l: u64,
    },
    /// θ-series of ψ = ω^j at one level, with its invariants.
    Theta {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        n: u32,
    },
    /// Irregular indices and B_{1,ω^i} values.
    Bernoulli(Common),
    /// Run the θ-series / Bernoulli suite over a grid.
    Iwasawa(Common),
    /// Summarise an existing report, optionally converting it to CSV.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Flags mirroring the config file keys; flags override the file.
#[derive(Args, Debug, Default)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated odd primes.
    #[arg(long)]
    p: Option<String>,
    #[arg(long = "n-max")]
    n_max: Option<String>,
    #[arg(long = "l-max")]
    l_max: Option<String>,
    #[arg(long = "delta-t-max")]
    delta_t_max: Option<String>,
    /// Comma-separated exponents j of ψ = ω^j.
    #[arg(long, allow_hyphen_values = true)]
    psi: Option<String>,
    /// p-adic precision.
    #[arg(long = "N")]
    precision: Option<String>,
    /// Starting l-adic precision.
    #[arg(long = "M")]
    hensel: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long = "q-max")]
    q_max: Option<String>,
    #[arg(long)]
    height: Option<String>,
    /// Comma-separated check names, or `all`, `tower`, `iwasawa`.
    #[arg(long)]
    checks: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long = "cache-dir")]
    cache_dir: Option<PathBuf>,
}

impl Common {
    fn run_config(&self, default_checks: Option<&str>) -> Result<RunConfig, Error> {
        let mut cfg = RunConfig::default();
        if let Some(c) = default_checks {
            cfg.set("checks", c)?;
        }
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let text = [
            ("p", &self.p),
            ("n-max", &self.n_max),
            ("l-max", &self.l_max),
            ("delta-t-max", &self.delta_t_max),
            ("psi", &self.psi),
            ("N", &self.precision),
            ("M", &self.hensel),
            ("seed", &self.seed),
            ("q-max", &self.q_max),
            ("height", &self.height),
            ("checks", &self.checks),
        ];
        for (k, v) in text {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        let paths = [
            ("output", &self.output),
            ("csv", &self.csv),
            ("cache-dir", &self.cache_dir),
        ];
        for (k, v) in paths {
            if let Some(v) = v {
                cfg.set(k, &v.to_string_lossy())?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn single_prime(cfg: &RunConfig) -> Result<u64, Error> {
    match cfg.primes.as_slice() {
        [p] => Ok(*p),
        _ => Err(Error::Config("exactly one prime expected in --p".into())),
    }
}

fn gauss(cfg: &RunConfig, n: u32, l: u64) -> Result<Vec<CheckReport>, Error> {
    let p = single_prime(cfg)?;
    let site = PrimeSite::new(l, p, n, cfg.hensel, cfg.q_max)?;
    let mut r = check_gauss_norm(&site);
    r.witness["tau"] = gauss_sum(&site)?.value.to_json();
    r.witness["g_poly"] = json!(site.g_poly());
    Ok(vec![r])
}

fn theta(cfg: &RunConfig, n: u32) -> Result<Vec<CheckReport>, Error> {
    let p = single_prime(cfg)?;
    let js: Vec<i64> = if cfg.psi.is_empty() {
        CharPsi::all(p, cfg.precision)
            .iter()
            .map(|c| c.j() as i64)
            .collect()
    } else {
        cfg.psi.clone()
    };
    if js.is_empty() {
        return Err(Error::Config(format!("no valid ψ for p = {p}")));
    }
    let mut out = Vec::new();
    for j in js {
        let psi = CharPsi::new(p, j, cfg.precision)?;
        let start = Instant::now();
        let f = theta_series(&psi, n)?;
        let coeffs: Vec<String> = f.coeffs().iter().map(|c| c.to_string()).collect();
        out.push(CheckReport::new(
            "theta_series",
            json!({"p": p, "psi": psi.to_string(), "n": n, "N": cfg.precision}),
            Status::Pass,
            json!({"coefficients": coeffs}),
            start,
        ));
        out.push(check_theta_bernoulli(&psi));
        if n >= 1 {
            out.push(check_theta_coherence(&psi, n));
        }
        out.push(check_lambda_mu(&psi, n));
    }
    Ok(out)
}

fn bernoulli(cfg: &RunConfig) -> Result<Vec<CheckReport>, Error> {
    let mut out = Vec::new();
    for &p in &cfg.primes {
        if p >= 5 {
            out.push(check_irregular(p));
        }
        let start = Instant::now();
        let mut values = serde_json::Map::new();
        for i in (1..p - 1).step_by(2) {
            let v = match bernoulli_b1(p, i as i64, cfg.precision)? {
                BernoulliB1::Integral(x) => {
                    json!({"value": x.value().to_string(), "valuation": x.valuation()})
                }
                BernoulliB1::NonIntegral(x) => {
                    json!({"p_times_value": x.value().to_string(), "valuation": -1})
                }
            };
            values.insert(format!("omega^{i}"), v);
        }
        out.push(CheckReport::new(
            "bernoulli_b1",
            json!({"p": p, "N": cfg.precision}),
            Status::Pass,
            serde_json::Value::Object(values),
            start,
        ));
    }
    Ok(out)
}

fn emit(report: &Report, cfg: &RunConfig) -> Result<(), Error> {
    let text = report.to_json_string();
    match &cfg.output {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    if let Some(path) = &cfg.csv {
        write_atomic(path, report.to_csv()?.as_bytes())?;
    }
    Ok(())
}

fn summarise(report: &Report) -> ExitCode {
    let (pass, fail, skipped) = report.tally();
    eprintln!(
        "pass {pass}, fail {fail}, skipped {skipped}; hash {}",
        report.determinism_hash()
    );
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn read_report(input: &Path) -> Result<Report, Error> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
    Report::from_json_str(&text)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let (cfg, results) = match cli.command {
        Command::Verify(c) => {
            let cfg = c.run_config(None)?;
            let r = run_grid(&cfg)?;
            (cfg, r)
        }
        Command::Iwasawa(c) => {
            let cfg = c.run_config(Some("iwasawa"))?;
            let r = run_grid(&cfg)?;
            (cfg, r)
        }
        Command::Gauss { common, n, l } => {
            let cfg = common.run_config(Some(CheckKind::GaussNorm.as_str()))?;
            let r = gauss(&cfg, n, l)?;
            (cfg, r)
        }
        Command::Theta { common, n } => {
            let cfg = common.run_config(Some("theta_bernoulli,theta_coherence,lambda_mu"))?;
            let r = theta(&cfg, n)?;
            (cfg, r)
        }
        Command::Bernoulli(c) => {
            let cfg = c.run_config(Some(CheckKind::Irregular.as_str()))?;
            let r = bernoulli(&cfg)?;
            (cfg, r)
        }
        Command::Report { input, csv } => {
            let report = read_report(&input)?;
            if let Some(path) = csv {
                write_atomic(&path, report.to_csv()?.as_bytes())?;
            }
            return Ok(summarise(&report));
        }
    };
    let report = Report::new(&cfg, results);
    emit(&report, &cfg)?;
    Ok(summarise(&report))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

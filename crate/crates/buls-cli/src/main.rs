//! `buls`: fit, simulate and diagnose bivariate unit-log-symmetric models.

mod io;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use buls::data::{embedded, EMBEDDED_NAMES};
use buls::experiments::{describe, mc_study, qq_data, MCConfig, SkewKurtosis, Summary};
use buls::generators::{GeneratorFamily, GeneratorKind};
use buls::inference::{default_shape_grid, fit, fit_kind, FitOptions, FitResult};
use buls::model::ModelParams;
use buls::sampling::{sample_buls, RandomSource};

use io::{dataset_csv, load_data, sig6, table, write_file};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl CliError {
    pub fn usage(msg: String) -> Self {
        CliError { code: 2, msg }
    }

    pub fn data(msg: String) -> Self {
        CliError { code: 3, msg }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError { code: 3, msg: format!("{}: {e}", path.display()) }
    }
}

#[derive(Parser)]
#[command(name = "buls", version, about = "Bivariate unit-log-symmetric models on the unit square")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summary statistics of both coordinates.
    Describe {
        #[command(flatten)]
        data: DataArg,
        #[arg(long, value_enum, default_value = "sample-sd")]
        skew: Skew,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Maximum-likelihood fit of one model.
    Fit {
        #[command(flatten)]
        data: DataArg,
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        out: JsonOut,
    },
    /// Fits all five models and ranks them by AIC.
    FitAll {
        #[command(flatten)]
        data: DataArg,
        #[arg(long, value_name = "A..B")]
        shape_grid: Option<String>,
        #[command(flatten)]
        out: JsonOut,
    },
    /// Draws a sample and writes it as CSV.
    Simulate {
        #[command(flatten)]
        model: ModelSpec,
        #[arg(long)]
        eta1: f64,
        #[arg(long)]
        eta2: f64,
        #[arg(long)]
        sigma1: f64,
        #[arg(long)]
        sigma2: f64,
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
        #[arg(short = 'n', long = "n")]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo study of bias, RMSE and coverage.
    McStudy {
        #[arg(long)]
        config: PathBuf,
        /// Report CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Mahalanobis QQ data of a fitted model.
    Qq {
        #[command(flatten)]
        data: DataArg,
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Lists or exports the embedded data sets.
    Datasets {
        #[arg(long, value_name = "DIR")]
        export: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DataArg {
    /// Embedded name (uefa, uefa-printed, fifa) or a CSV file with header w1,w2.
    #[arg(long)]
    data: String,
}

#[derive(Args)]
struct ModelSpec {
    #[arg(long, value_enum)]
    model: Model,
    /// Shape (ν or q) for student, hyperbolic and slash.
    #[arg(long)]
    shape: Option<f64>,
}

#[derive(Args)]
struct ModelArg {
    #[command(flatten)]
    spec: ModelSpec,
    /// Integer shape grid profiled when --shape is not given.
    #[arg(long, value_name = "A..B", conflicts_with = "shape")]
    shape_grid: Option<String>,
    #[arg(long, default_value_t = FitOptions::default().seed)]
    seed: u64,
}

#[derive(Args)]
struct JsonOut {
    /// Print JSON instead of a table.
    #[arg(long)]
    json: bool,
    /// Also write the JSON to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Normal,
    Student,
    Hyperbolic,
    Laplace,
    Slash,
}

impl From<Model> for GeneratorKind {
    fn from(m: Model) -> Self {
        match m {
            Model::Normal => GeneratorKind::Normal,
            Model::Student => GeneratorKind::StudentT,
            Model::Hyperbolic => GeneratorKind::Hyperbolic,
            Model::Laplace => GeneratorKind::Laplace,
            Model::Slash => GeneratorKind::Slash,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Skew {
    SampleSd,
    Population,
    Adjusted,
}

impl From<Skew> for SkewKurtosis {
    fn from(s: Skew) -> Self {
        match s {
            Skew::SampleSd => SkewKurtosis::SampleSd,
            Skew::Population => SkewKurtosis::Population,
            Skew::Adjusted => SkewKurtosis::Adjusted,
        }
    }
}

fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::usage(format!("invalid shape grid '{s}', expected A..B with integers 1 <= A <= B"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let (a, b): (u32, u32) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a..=b).map(f64::from).collect())
}

fn generator(spec: &ModelSpec) -> Result<GeneratorFamily, CliError> {
    let kind = GeneratorKind::from(spec.model);
    match (kind.has_shape(), spec.shape) {
        (false, Some(_)) => Err(CliError::usage(format!("the {kind} model takes no --shape"))),
        (true, None) => Err(CliError::usage(format!("the {kind} model needs --shape"))),
        (_, shape) => Ok(GeneratorFamily::new(kind, shape)?),
    }
}

fn fit_model(data: &buls::data::BivariateDataset, m: &ModelArg) -> Result<(FitResult, Vec<String>), CliError> {
    let opts = FitOptions { seed: m.seed, ..FitOptions::default() };
    let kind = GeneratorKind::from(m.spec.model);
    if m.spec.shape.is_some() || !kind.has_shape() {
        let gen = generator(&m.spec)?;
        return Ok((fit(&gen, data, &opts)?, Vec::new()));
    }
    let grid = m.shape_grid.as_deref().map(parse_grid).transpose()?.unwrap_or_else(default_shape_grid);
    Ok(fit_kind(kind, data, &grid, &opts)?)
}

const FIT_HEADER: [&str; 10] = ["model", "eta1", "eta2", "sigma1", "sigma2", "rho", "loglik", "aic", "bic", "converged"];

fn fit_rows(f: &FitResult) -> Vec<Vec<String>> {
    let mut est = vec![f.gen.to_string()];
    est.extend(f.theta_hat.to_array().iter().map(|v| sig6(*v)));
    est.extend([sig6(f.loglik), sig6(f.aic), sig6(f.bic), f.converged.to_string()]);
    let mut se = vec!["  (se)".to_string()];
    se.extend(f.se.iter().map(|v| sig6(*v)));
    se.extend(["".into(), "".into(), "".into(), "".into()]);
    vec![est, se]
}

fn warn_all(f: &FitResult, extra: &[String]) {
    for w in f.warnings.iter().chain(extra) {
        eprintln!("warning [{}]: {w}", f.gen);
    }
}

fn emit_json<T: Serialize>(value: &T, out: &JsonOut, text: impl FnOnce() -> String) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(value).map_err(|e| CliError::usage(e.to_string()))?;
    if let Some(p) = &out.out {
        write_file(p, &(json.clone() + "\n"))?;
    }
    if out.json {
        println!("{json}");
    } else {
        print!("{}", text());
    }
    Ok(())
}

fn nonconverged(msg: &str) -> CliError {
    CliError { code: 4, msg: msg.into() }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StudyFile {
    model: String,
    #[serde(default)]
    shape: Option<f64>,
    theta: ThetaFile,
    sample_sizes: Vec<usize>,
    replications: usize,
    #[serde(default = "default_confidence")]
    confidence: f64,
    #[serde(default)]
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ThetaFile {
    eta1: f64,
    eta2: f64,
    sigma1: f64,
    sigma2: f64,
    rho: f64,
}

fn default_confidence() -> f64 {
    0.95
}

fn study_config(path: &Path) -> Result<MCConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let f: StudyFile = serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let kind = GeneratorKind::parse(&f.model).ok_or_else(|| CliError::usage(format!("unknown model '{}'", f.model)))?;
    let t = f.theta;
    let cfg = MCConfig {
        gen: GeneratorFamily::new(kind, f.shape)?,
        theta_true: ModelParams::new(t.eta1, t.eta2, t.sigma1, t.sigma2, t.rho)?,
        sample_sizes: f.sample_sizes,
        replications: f.replications,
        confidence: f.confidence,
        base_seed: f.seed,
        fit: FitOptions::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn summary_table(names: [&str; 2], s: &[Summary; 2]) -> String {
    let opt = |v: Option<f64>| v.map_or("undefined".to_string(), sig6);
    let rows: Vec<Vec<String>> = names
        .iter()
        .zip(s)
        .map(|(name, s)| {
            vec![
                name.to_string(),
                s.n.to_string(),
                sig6(s.min),
                sig6(s.median),
                sig6(s.mean),
                sig6(s.max),
                sig6(s.sd),
                sig6(s.cv),
                opt(s.cs),
                opt(s.ck),
            ]
        })
        .collect();
    table(&["", "n", "min", "median", "mean", "max", "sd", "cv", "cs", "ck"], &rows)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Command::Describe { data, skew, json } => {
            let d = load_data(&data.data)?;
            let s = describe(&d, skew.into())?;
            if json {
                let v = serde_json::json!({ "w1": s[0], "w2": s[1] });
                println!("{}", serde_json::to_string_pretty(&v).expect("summary serializes"));
            } else {
                print!("{}", summary_table(["w1", "w2"], &s));
            }
            Ok(())
        }
        Command::Fit { data, model, out } => {
            let d = load_data(&data.data)?;
            let (f, extra) = fit_model(&d, &model)?;
            warn_all(&f, &extra);
            emit_json(&f, &out, || table(&FIT_HEADER, &fit_rows(&f)))?;
            if f.converged {
                Ok(())
            } else {
                Err(nonconverged("fit did not converge; results were written"))
            }
        }
        Command::FitAll { data, shape_grid, out } => {
            let d = load_data(&data.data)?;
            let grid = shape_grid.as_deref().map(parse_grid).transpose()?.unwrap_or_else(default_shape_grid);
            let mut fits = Vec::new();
            for kind in GeneratorKind::ALL {
                let (f, extra) = fit_kind(kind, &d, &grid, &FitOptions::default())?;
                warn_all(&f, &extra);
                fits.push(f);
            }
            fits.sort_by(|a, b| b.converged.cmp(&a.converged).then(a.aic.total_cmp(&b.aic)));
            let all_ok = fits.iter().all(|f| f.converged);
            emit_json(&fits, &out, || {
                let rows: Vec<Vec<String>> = fits.iter().flat_map(fit_rows).collect();
                table(&FIT_HEADER, &rows)
            })?;
            if all_ok {
                Ok(())
            } else {
                Err(nonconverged("at least one model did not converge; it is ranked last and results were written"))
            }
        }
        Command::Simulate { model, eta1, eta2, sigma1, sigma2, rho, n, seed, out } => {
            if n == 0 {
                return Err(CliError::usage("-n must be at least 1".into()));
            }
            let gen = generator(&model)?;
            let theta = ModelParams::new(eta1, eta2, sigma1, sigma2, rho)?;
            let d = sample_buls(gen, &theta, n, &mut RandomSource::new(seed))?;
            match out {
                Some(p) => write_file(&p, &dataset_csv(&d)),
                None => {
                    print!("{}", dataset_csv(&d));
                    Ok(())
                }
            }
        }
        Command::McStudy { config, out, json_out } => {
            let cfg = study_config(&config)?;
            let report = mc_study(&cfg)?;
            if let Some(p) = json_out {
                write_file(&p, &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))?;
            }
            match out {
                Some(p) => write_file(&p, &report.to_csv()),
                None => {
                    print!("{}", report.to_csv());
                    Ok(())
                }
            }
        }
        Command::Qq { data, model, out, svg } => {
            let d = load_data(&data.data)?;
            let (f, extra) = fit_model(&d, &model)?;
            warn_all(&f, &extra);
            let q = qq_data(&f.gen, &f.theta_hat, &d)?;
            match out {
                Some(p) => write_file(&p, &q.to_csv())?,
                None => print!("{}", q.to_csv()),
            }
            if let Some(p) = svg {
                write_file(&p, &svg::qq_svg(&q))?;
            }
            if f.converged {
                Ok(())
            } else {
                Err(nonconverged("fit did not converge; QQ data were written"))
            }
        }
        Command::Datasets { export } => {
            for name in EMBEDDED_NAMES {
                let d = embedded(name).expect("listed data set exists");
                match &export {
                    Some(dir) => write_file(&dir.join(format!("{name}.csv")), &dataset_csv(&d))?,
                    None => println!("{name}\t{} rows", d.len()),
                }
            }
            Ok(())
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("BULS_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("BULS_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match configure_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

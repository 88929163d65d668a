use clap::{Args, Subcommand, ValueEnum};
use cvc::simulate::{
    run_sim1, run_sim2, BetaKind, SigmaKind, Sim1Config, Sim1Report, Sim2Config, Sim2Report,
};
use cvc::simulate::NoiseKind;
use serde::Serialize;

use crate::error::CliError;
use crate::report::{self, num, Manifest, Table};
use crate::CommonArgs;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(subcommand)]
    pub study: Study,
}

impl SimulateArgs {
    pub fn common(&self) -> &CommonArgs {
        match &self.study {
            Study::Sim1(a) => &a.common,
            Study::Sim2(a) => &a.common,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Study {
    /// Best-subset selection over the 16 submodels of a 4-predictor model.
    Sim1(Sim1Args),
    /// Lasso penalty choice judged by population risk.
    Sim2(Sim2Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaArg {
    Sparse,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseArg {
    Gaussian,
    T3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaArg {
    Identity,
    Correlated,
}

#[derive(Debug, Args)]
pub struct Sim1Args {
    /// Sample sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [40, 160, 640])]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [BetaArg::Sparse, BetaArg::Dense])]
    pub beta: Vec<BetaArg>,
    #[arg(long, value_delimiter = ',', default_values_t = [NoiseArg::Gaussian])]
    pub noise: Vec<NoiseArg>,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0])]
    pub noise_scale: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct Sim2Args {
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub p: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [BetaArg::Sparse, BetaArg::Dense])]
    pub beta: Vec<BetaArg>,
    #[arg(long, value_delimiter = ',', default_values_t = [SigmaArg::Identity, SigmaArg::Correlated])]
    pub sigma: Vec<SigmaArg>,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 50)]
    pub path_len: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

impl std::fmt::Display for BetaArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

impl std::fmt::Display for NoiseArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

impl std::fmt::Display for SigmaArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Debug, Serialize)]
struct Sim1Setting {
    setting: String,
    reports: Vec<Sim1Report>,
}

pub fn run(args: &SimulateArgs) -> Result<(), CliError> {
    match &args.study {
        Study::Sim1(a) => run_sim1_cmd(a),
        Study::Sim2(a) => run_sim2_cmd(a),
    }
}

fn nonempty<T>(v: &[T], flag: &str) -> Result<(), CliError> {
    if v.is_empty() {
        return Err(CliError::Config(format!("--{flag} needs at least one value")));
    }
    Ok(())
}

fn run_sim1_cmd(a: &Sim1Args) -> Result<(), CliError> {
    let started_at = report::now();
    let (seed, seed_source) = a.common.resolve_seed()?;
    let cvc = a.common.cvc_config(seed);
    nonempty(&a.n, "n")?;
    nonempty(&a.beta, "beta")?;
    nonempty(&a.noise, "noise")?;
    nonempty(&a.noise_scale, "noise-scale")?;

    let mut configs = Vec::new();
    for &beta in &a.beta {
        for &noise in &a.noise {
            for &scale in &a.noise_scale {
                let setting = format!("{beta}/{noise}/{}", num(scale));
                let mut runs = Vec::new();
                for &n in &a.n {
                    let coef = match beta {
                        BetaArg::Sparse => Sim1Config::SPARSE,
                        BetaArg::Dense => Sim1Config::DENSE,
                    };
                    let mut c = Sim1Config::new(n, coef, a.reps, seed);
                    c.noise = match noise {
                        NoiseArg::Gaussian => NoiseKind::Gaussian,
                        NoiseArg::T3 => NoiseKind::StudentT3,
                    };
                    c.noise_scale = scale;
                    c.cvc = cvc.clone();
                    c.validate()?;
                    runs.push(c);
                }
                configs.push((setting, runs));
            }
        }
    }

    let mut table = Table::new(
        "sim1",
        &["setting", "n", "method", "correct_rate", "median_set_size", "mean_set_size", "errors"],
    );
    let mut settings = Vec::new();
    for (setting, runs) in configs {
        let mut reports = Vec::new();
        for c in &runs {
            let r = run_sim1(c)?;
            for (method, rate) in [("cv", r.cv_rate), ("cvc", r.cvc_rate)] {
                table.push(vec![
                    setting.clone(),
                    c.n.to_string(),
                    method.into(),
                    num(rate),
                    num(r.median_set_size),
                    num(r.mean_set_size),
                    r.errors.to_string(),
                ]);
            }
            reports.push(r);
        }
        settings.push(Sim1Setting { setting, reports });
    }

    #[derive(Serialize)]
    struct Config<'a> {
        study: &'static str,
        n: &'a [usize],
        beta: &'a [BetaArg],
        noise: &'a [NoiseArg],
        noise_scale: &'a [f64],
        reps: usize,
        cvc: cvc::CvcConfig,
    }
    let manifest = Manifest {
        command: "simulate sim1".into(),
        args: report::args(),
        config: Config {
            study: "sim1",
            n: &a.n,
            beta: &a.beta,
            noise: &a.noise,
            noise_scale: &a.noise_scale,
            reps: a.reps,
            cvc,
        },
        seed,
        seed_source,
        version: env!("CARGO_PKG_VERSION"),
        started_at,
        finished_at: report::now(),
        inputs: Vec::new(),
    };
    let path = report::write_outputs(&a.common.out, "simulate", &manifest, &settings, &[table])?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_sim2_cmd(a: &Sim2Args) -> Result<(), CliError> {
    let started_at = report::now();
    let (seed, seed_source) = a.common.resolve_seed()?;
    let cvc = a.common.cvc_config(seed);
    nonempty(&a.beta, "beta")?;
    nonempty(&a.sigma, "sigma")?;

    let mut configs = Vec::new();
    for &beta in &a.beta {
        for &sigma in &a.sigma {
            let c = Sim2Config {
                n: a.n,
                p: a.p,
                sigma_kind: match sigma {
                    SigmaArg::Identity => SigmaKind::Identity,
                    SigmaArg::Correlated => SigmaKind::Correlated,
                },
                beta_kind: match beta {
                    BetaArg::Sparse => BetaKind::Sparse,
                    BetaArg::Dense => BetaKind::Dense,
                },
                reps: a.reps,
                path_len: a.path_len,
                seed,
                cvc: cvc.clone(),
            };
            c.validate()?;
            configs.push(c);
        }
    }

    let mut summary = Table::new(
        "sim2",
        &["setting", "method", "median_risk", "median_size", "coverage", "median_set_size"],
    );
    let mut records = Table::new(
        "sim2_records",
        &[
            "setting", "rep", "method", "lambda", "risk", "nonzeros", "oracle_lambda", "covered",
            "set_size",
        ],
    );
    let mut reports: Vec<Sim2Report> = Vec::new();
    for c in &configs {
        let r = run_sim2(c)?;
        for m in &r.methods {
            summary.push(vec![
                r.setting.clone(),
                m.method.clone(),
                num(m.median_risk),
                num(m.median_size),
                num(r.coverage),
                num(r.median_set_size),
            ]);
        }
        for rec in &r.records {
            for (method, o) in [("cv", &rec.cv), ("cvc", &rec.cvc), ("1se", &rec.one_se)] {
                records.push(vec![
                    r.setting.clone(),
                    rec.rep.to_string(),
                    method.into(),
                    num(o.lambda),
                    num(o.risk),
                    o.nonzeros.to_string(),
                    num(rec.oracle_lambda),
                    rec.covered.to_string(),
                    rec.set_size.to_string(),
                ]);
            }
        }
        reports.push(r);
    }

    #[derive(Serialize)]
    struct Config<'a> {
        study: &'static str,
        n: usize,
        p: usize,
        beta: &'a [BetaArg],
        sigma: &'a [SigmaArg],
        reps: usize,
        path_len: usize,
        cvc: cvc::CvcConfig,
    }
    let manifest = Manifest {
        command: "simulate sim2".into(),
        args: report::args(),
        config: Config {
            study: "sim2",
            n: a.n,
            p: a.p,
            beta: &a.beta,
            sigma: &a.sigma,
            reps: a.reps,
            path_len: a.path_len,
            cvc,
        },
        seed,
        seed_source,
        version: env!("CARGO_PKG_VERSION"),
        started_at,
        finished_at: report::now(),
        inputs: Vec::new(),
    };
    let path = report::write_outputs(&a.common.out, "simulate", &manifest, &reports, &[summary, records])?;
    println!("wrote {}", path.display());
    Ok(())
}

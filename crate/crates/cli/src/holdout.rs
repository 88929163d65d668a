use std::path::PathBuf;

use clap::Args;
use cvc::io::parse_csv_dataset;
use cvc::rng::{derive_seed, Phase};
use cvc::simulate::median;
use cvc::{
    cross_validate, cvc_from_losses, fit_lasso, lasso_path, make_folds, make_split, one_se_rule,
    rescale_lambda, squared_loss, CandidateModel, CvcConfig, Dataset, LassoFitter,
};
use serde::Serialize;

use crate::error::CliError;
use crate::report::{self, num, Manifest, Table};
use crate::CommonArgs;

#[derive(Debug, Args)]
pub struct HoldoutArgs {
    /// Input CSV with a header row.
    pub csv: PathBuf,
    /// Response column, by name or 0-based index.
    #[arg(long)]
    pub response: String,
    /// Training sample size of each split; the rest is held out.
    #[arg(long)]
    pub train_size: usize,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 50)]
    pub path_len: usize,
    /// Keep predictors on their original scale.
    #[arg(long)]
    pub no_standardize: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Serialize)]
struct MethodRecord {
    rep: usize,
    method: &'static str,
    lambda: f64,
    nonzeros: usize,
    test_error: f64,
}

#[derive(Debug, Serialize)]
struct MethodSummary {
    method: &'static str,
    median_test_error: f64,
    mean_test_error: f64,
    median_nonzeros: f64,
}

#[derive(Debug, Serialize)]
struct HoldoutResult {
    n: usize,
    p: usize,
    train_size: usize,
    test_size: usize,
    summary: Vec<MethodSummary>,
    median_set_size: f64,
    records: Vec<MethodRecord>,
    set_sizes: Vec<usize>,
}

const METHODS: [&str; 3] = ["cv", "cvc", "1se"];

fn one_rep(
    data: &Dataset,
    args: &HoldoutArgs,
    config: &CvcConfig,
    rep: usize,
) -> Result<(Vec<MethodRecord>, usize), CliError> {
    let rep_seed = derive_seed(config.seed, Phase::Split, rep as u64, 0);
    let split = make_split(data.n(), args.train_size, rep_seed)?;
    let train = data.select_rows(&split.train_indices(0));
    let test = data.select_rows(split.group(0));

    let path = lasso_path(&train, args.path_len)?;
    let candidates: Vec<CandidateModel> = path
        .values
        .iter()
        .enumerate()
        .map(|(k, &l)| CandidateModel::lambda(k, l))
        .collect();
    let fitter = LassoFitter::default();
    let plan = make_folds(train.n(), config.folds, rep_seed)?;
    let (losses, _) = cross_validate(&train, &candidates, &plan, &fitter, squared_loss)?;
    let result = cvc_from_losses(
        &losses,
        Some(&candidates),
        &CvcConfig {
            seed: rep_seed,
            ..config.clone()
        },
    )?;
    let cvc_pick = result
        .parsimonious_choice
        .ok_or(CliError::Fit("no parsimonious choice".into()))?;
    let lambdas = [
        path.values[result.cv_choice],
        rescale_lambda(path.values[cvc_pick], config.folds),
        path.values[one_se_rule(&losses, &candidates)?],
    ];
    let records = METHODS
        .iter()
        .zip(lambdas)
        .map(|(&method, lambda)| {
            let model = fit_lasso(train.x.view(), train.y.view(), lambda, &fitter.options);
            let pred = model.predict_all(test.x.view());
            let test_error = pred
                .iter()
                .zip(test.y.iter())
                .map(|(&a, &b)| squared_loss(a, b))
                .sum::<f64>()
                / test.n() as f64;
            MethodRecord {
                rep,
                method,
                lambda,
                nonzeros: model.nonzeros(),
                test_error,
            }
        })
        .collect();
    Ok((records, result.raw_set_size))
}

pub fn run(args: &HoldoutArgs) -> Result<(), CliError> {
    let started_at = report::now();
    let (seed, seed_source) = args.common.resolve_seed()?;
    let config = args.common.cvc_config(seed);
    config.validate()?;
    if args.reps == 0 {
        return Err(CliError::Config("--reps must be >= 1".into()));
    }
    if args.path_len < 2 {
        return Err(CliError::Config("--path-len must be >= 2".into()));
    }

    let (bytes, digest) = report::read_input(&args.csv)?;
    let raw = parse_csv_dataset(bytes.as_slice(), &args.response)?;
    if args.train_size >= raw.n() {
        return Err(CliError::Config(format!(
            "--train-size {} must be below the sample size {}",
            args.train_size,
            raw.n()
        )));
    }
    let data = if args.no_standardize { raw } else { raw.standardize() };

    let mut records = Vec::new();
    let mut set_sizes = Vec::new();
    for rep in 0..args.reps {
        let (r, size) = one_rep(&data, args, &config, rep)?;
        records.extend(r);
        set_sizes.push(size);
    }

    let summary: Vec<MethodSummary> = METHODS
        .iter()
        .map(|&method| {
            let mine: Vec<&MethodRecord> = records.iter().filter(|r| r.method == method).collect();
            let errors: Vec<f64> = mine.iter().map(|r| r.test_error).collect();
            let sizes: Vec<f64> = mine.iter().map(|r| r.nonzeros as f64).collect();
            MethodSummary {
                method,
                median_test_error: median(&errors),
                mean_test_error: errors.iter().sum::<f64>() / errors.len() as f64,
                median_nonzeros: median(&sizes),
            }
        })
        .collect();

    let mut per_rep = Table::new("holdout_records", &["rep", "method", "lambda", "nonzeros", "test_error"]);
    for r in &records {
        per_rep.push(vec![
            r.rep.to_string(),
            r.method.into(),
            num(r.lambda),
            r.nonzeros.to_string(),
            num(r.test_error),
        ]);
    }
    let mut table = Table::new(
        "holdout_summary",
        &["method", "median_test_error", "mean_test_error", "median_nonzeros"],
    );
    for s in &summary {
        table.push(vec![
            s.method.into(),
            num(s.median_test_error),
            num(s.mean_test_error),
            num(s.median_nonzeros),
        ]);
    }

    let sizes: Vec<f64> = set_sizes.iter().map(|&s| s as f64).collect();
    let payload = HoldoutResult {
        n: data.n(),
        p: data.p(),
        train_size: args.train_size,
        test_size: data.n() - args.train_size,
        summary,
        median_set_size: median(&sizes),
        records,
        set_sizes,
    };

    #[derive(Serialize)]
    struct Config<'a> {
        response: &'a str,
        train_size: usize,
        reps: usize,
        path_len: usize,
        standardize: bool,
        cvc: CvcConfig,
    }
    let manifest = Manifest {
        command: "holdout".into(),
        args: report::args(),
        config: Config {
            response: &args.response,
            train_size: args.train_size,
            reps: args.reps,
            path_len: args.path_len,
            standardize: !args.no_standardize,
            cvc: config,
        },
        seed,
        seed_source,
        version: env!("CARGO_PKG_VERSION"),
        started_at,
        finished_at: report::now(),
        inputs: vec![digest],
    };
    let path = report::write_outputs(&args.common.out, "holdout", &manifest, &payload, &[per_rep, table])?;
    for s in &payload.summary {
        println!(
            "{:>4}: median test error {:.4}, median size {}",
            s.method, s.median_test_error, s.median_nonzeros
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}

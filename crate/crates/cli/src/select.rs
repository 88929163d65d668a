use std::path::PathBuf;

use clap::Args;
use cvc::io::{parse_csv_dataset, parse_subset_list};
use cvc::{
    cvc_run, fit_lasso, fit_ols_subset, lasso_path, rescale_lambda, squared_loss, CandidateModel,
    CandidateSpec, CvcConfig, Fitter, LassoFitter, OlsSubsetFitter, TestOutcome, ValidationMode,
};
use serde::Serialize;

use crate::error::CliError;
use crate::report::{self, num, Manifest, Table};
use crate::CommonArgs;

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Input CSV with a header row.
    pub csv: PathBuf,
    /// Response column, by name or 0-based index.
    #[arg(long)]
    pub response: String,
    /// Candidate subsets, one per line (names or predictor indices, `-` for
    /// intercept only). Without it the candidates are a Lasso penalty path.
    #[arg(long)]
    pub subsets: Option<PathBuf>,
    /// Length of the Lasso penalty path.
    #[arg(long, default_value_t = 50)]
    pub path_len: usize,
    /// Use a single train/validation split with this training fraction
    /// instead of V-fold cross-validation.
    #[arg(long)]
    pub split: Option<f64>,
    /// Keep predictors on their original scale.
    #[arg(long)]
    pub no_standardize: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Serialize)]
struct SelectConfig {
    response: String,
    subsets: Option<String>,
    path_len: Option<usize>,
    standardize: bool,
    cvc: CvcConfig,
    alpha_prime: f64,
}

#[derive(Debug, Serialize)]
struct CandidateRow {
    id: usize,
    features: Option<Vec<String>>,
    lambda: Option<f64>,
    mean_loss: f64,
    t_stat: Option<f64>,
    p_value: f64,
    outcome: TestOutcome,
    in_set: bool,
    screen_kept: usize,
}

#[derive(Debug, Serialize)]
struct Coefficient {
    name: String,
    value: f64,
}

#[derive(Debug, Serialize)]
struct FinalModel {
    candidate: usize,
    /// Penalty of the refit; the selected path value rescaled to the full
    /// sample size.
    lambda: Option<f64>,
    intercept: f64,
    /// Nonzero coefficients, on the scale of the (possibly standardized)
    /// predictors.
    coefficients: Vec<Coefficient>,
}

#[derive(Debug, Serialize)]
struct SelectResult {
    n: usize,
    p: usize,
    response: String,
    standardized: bool,
    candidate_kind: &'static str,
    candidates: Vec<CandidateRow>,
    confidence_set: Vec<usize>,
    raw_set_size: usize,
    empty_fallback: bool,
    cv_choice: usize,
    cvc_choice: usize,
    final_model: FinalModel,
}

fn describe(c: &CandidateModel, names: &[String]) -> String {
    match &c.spec {
        CandidateSpec::Subset { features } if features.is_empty() => "(intercept)".into(),
        CandidateSpec::Subset { features } => features
            .iter()
            .map(|&f| names[f].as_str())
            .collect::<Vec<_>>()
            .join("+"),
        CandidateSpec::Lambda { lambda } => format!("lambda={}", num(*lambda)),
    }
}

pub fn run(args: &SelectArgs) -> Result<(), CliError> {
    let started_at = report::now();
    let (seed, seed_source) = args.common.resolve_seed()?;
    let mut config = args.common.cvc_config(seed);
    if let Some(f) = args.split {
        config.mode = ValidationMode::SampleSplit { train_fraction: f };
    }
    config.validate()?;
    if args.subsets.is_none() && args.path_len < 2 {
        return Err(CliError::Config("--path-len must be >= 2".into()));
    }

    let (bytes, digest) = report::read_input(&args.csv)?;
    let mut inputs = vec![digest];
    let raw = parse_csv_dataset(bytes.as_slice(), &args.response)?;
    let response = response_name(&bytes, &args.response);
    let data = if args.no_standardize { raw } else { raw.standardize() };
    let names = data.feature_names.clone();

    let (candidates, fitter): (Vec<CandidateModel>, Box<dyn Fitter>) = match &args.subsets {
        Some(path) => {
            let (text, d) = report::read_input(path)?;
            inputs.push(d);
            let text = String::from_utf8(text)
                .map_err(|_| CliError::Data(format!("{} is not UTF-8", path.display())))?;
            let subsets = parse_subset_list(&text, &names, Some(&response))?;
            if subsets.is_empty() {
                return Err(CliError::Config("subset file lists no candidates".into()));
            }
            let c = subsets
                .into_iter()
                .enumerate()
                .map(|(i, f)| CandidateModel::subset(i, f))
                .collect();
            (c, Box::new(OlsSubsetFitter))
        }
        None => {
            let path = lasso_path(&data, args.path_len)?;
            let c = path
                .values
                .iter()
                .enumerate()
                .map(|(i, &l)| CandidateModel::lambda(i, l))
                .collect();
            (c, Box::new(LassoFitter::default()))
        }
    };

    let result = cvc_run(&data, &candidates, &config, fitter.as_ref(), squared_loss)?;
    let cvc_choice = result
        .parsimonious_choice
        .ok_or(CliError::Fit("no parsimonious choice".into()))?;

    let chosen = &candidates[cvc_choice];
    let final_model = match &chosen.spec {
        CandidateSpec::Subset { .. } => {
            let m = fit_ols_subset(data.x.view(), data.y.view(), chosen)
                .map_err(|e| CliError::Fit(e.to_string()))?;
            (None, m)
        }
        CandidateSpec::Lambda { lambda } => {
            let refit = match config.mode {
                ValidationMode::VFold => rescale_lambda(*lambda, config.folds),
                ValidationMode::SampleSplit { train_fraction } => train_fraction.sqrt() * lambda,
            };
            let m = fit_lasso(data.x.view(), data.y.view(), refit, &LassoFitter::default().options);
            (Some(refit), m)
        }
    };
    let final_model = FinalModel {
        candidate: cvc_choice,
        lambda: final_model.0,
        intercept: final_model.1.intercept,
        coefficients: final_model
            .1
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(j, &value)| Coefficient {
                name: names[j].clone(),
                value,
            })
            .collect(),
    };

    let mut table = Table::new(
        "candidates",
        &["candidate", "model", "mean_loss", "p_value", "in_set", "screen_kept"],
    );
    let rows: Vec<CandidateRow> = candidates
        .iter()
        .zip(&result.pvalues)
        .map(|(c, pv)| {
            let in_set = result.contains(c.id);
            table.push(vec![
                c.id.to_string(),
                describe(c, &names),
                num(result.loss_means[c.id]),
                num(pv.p_value),
                in_set.to_string(),
                pv.screen.kept.len().to_string(),
            ]);
            CandidateRow {
                id: c.id,
                features: match &c.spec {
                    CandidateSpec::Subset { features } => {
                        Some(features.iter().map(|&f| names[f].clone()).collect())
                    }
                    CandidateSpec::Lambda { .. } => None,
                },
                lambda: c.penalty(),
                mean_loss: result.loss_means[c.id],
                t_stat: pv.t_stat,
                p_value: pv.p_value,
                outcome: pv.outcome,
                in_set,
                screen_kept: pv.screen.kept.len(),
            }
        })
        .collect();

    let payload = SelectResult {
        n: data.n(),
        p: data.p(),
        response: response.clone(),
        standardized: data.standardized,
        candidate_kind: if args.subsets.is_some() { "subset" } else { "lambda" },
        candidates: rows,
        confidence_set: result.confidence_set.clone(),
        raw_set_size: result.raw_set_size,
        empty_fallback: result.empty_fallback,
        cv_choice: result.cv_choice,
        cvc_choice,
        final_model,
    };
    let manifest = Manifest {
        command: "select".into(),
        args: report::args(),
        config: SelectConfig {
            response,
            subsets: args.subsets.as_ref().map(|p| p.display().to_string()),
            path_len: args.subsets.is_none().then_some(args.path_len),
            standardize: !args.no_standardize,
            alpha_prime: config.effective_alpha_prime(),
            cvc: config,
        },
        seed,
        seed_source,
        version: env!("CARGO_PKG_VERSION"),
        started_at,
        finished_at: report::now(),
        inputs,
    };
    let path = report::write_outputs(&args.common.out, "select", &manifest, &payload, &[table])?;
    println!(
        "confidence set {:?}; cv choice {}; cvc choice {}; report {}",
        payload.confidence_set,
        payload.cv_choice,
        payload.cvc_choice,
        path.display()
    );
    Ok(())
}

/// Header name of the response column selected by `selector`.
fn response_name(bytes: &[u8], selector: &str) -> String {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    reader
        .headers()
        .ok()
        .and_then(|h| {
            let headers: Vec<String> = h.iter().map(str::to_string).collect();
            cvc::io::resolve_column(&headers, selector).ok().map(|i| headers[i].clone())
        })
        .unwrap_or_else(|| selector.to_string())
}

//! Evaluation protocols over surveyed cells: leave-one-country-out (LOCO)
//! and same-country-validation (SCV), with grid selection of k (and λ for
//! SCV), per-cell loss reports, and the loss-vs-quote-count correlation.

use std::collections::BTreeSet;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::country::CountryCode;
use crate::distribution::{kl_divergence, Sample, SurveyDistribution, CATEGORY_LABELS};
use crate::error::{Error, Result};
use crate::exec;
use crate::knn::{self, KnnConfig, Neighbor};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Scenario {
    Loco,
    Scv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Additive smoothing for divergences and predictions.
    pub epsilon: f64,
    /// Cells with fewer quotes than this are dropped before evaluation.
    pub min_quotes: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { epsilon: 1e-9, min_quotes: 30 }
    }
}

/// Loss and chosen hyperparameters for one evaluated cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub country: CountryCode,
    pub year: i32,
    pub n_quotes: usize,
    pub best_k: usize,
    pub best_lambda: f64,
    /// KL(survey ‖ prediction) in nats.
    pub loss: f64,
    pub truth: SurveyDistribution,
    pub predicted: SurveyDistribution,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSummary {
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub pearson_r: f64,
    pub p_value: f64,
}

/// One grid point of a hyperparameter search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridLoss {
    pub k: usize,
    pub lambda: f64,
    /// Summed validation loss at this grid point.
    pub loss: f64,
}

/// Hyperparameter selection for one evaluation target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// Target country (LOCO) or `country/year` (SCV).
    pub target: String,
    pub best_k: usize,
    pub best_lambda: f64,
    pub grid: Vec<GridLoss>,
    /// Per-validation-unit losses aligned with `grid`; kept out of the
    /// serialized report but used for consistency checks.
    #[serde(skip)]
    pub by_unit: Vec<(String, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub scenario: Scenario,
    pub per_cell: Vec<CellResult>,
    pub summary: LossSummary,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub correlation: Option<Correlation>,
    pub selection: Vec<Selection>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub skipped: Vec<String>,
}

/// Surveyed cells above the quote threshold, sorted by (country, year),
/// plus human-readable notes about what was left out.
fn surveyed_cells(samples: &[Sample], min_quotes: usize) -> (Vec<Sample>, Vec<String>) {
    let mut cells: Vec<Sample> = samples
        .iter()
        .filter(|s| s.survey.is_some() && s.n_quotes >= min_quotes)
        .cloned()
        .collect();
    cells.sort_by_key(Sample::key);

    let kept: BTreeSet<CountryCode> = cells.iter().map(|s| s.country).collect();
    let mut skipped = Vec::new();
    let all: BTreeSet<CountryCode> = samples
        .iter()
        .filter(|s| s.survey.is_some())
        .map(|s| s.country)
        .collect();
    for country in all.difference(&kept) {
        skipped.push(format!("{country}: no surveyed cell with at least {min_quotes} quotes"));
    }
    (cells, skipped)
}

fn distinct_countries(cells: &[Sample]) -> Vec<CountryCode> {
    let set: BTreeSet<CountryCode> = cells.iter().map(|s| s.country).collect();
    set.into_iter().collect()
}

fn validate_k_range(k_range: &RangeInclusive<usize>) -> Result<Vec<usize>> {
    let ks: Vec<usize> = k_range.clone().collect();
    if ks.is_empty() || ks[0] == 0 {
        return Err(Error::InvalidConfig(format!("bad k range {k_range:?}")));
    }
    Ok(ks)
}

/// Training pool with the given countries excluded entirely.
pub fn loco_train_pool(cells: &[Sample], excluded: &[CountryCode]) -> Vec<Sample> {
    cells
        .iter()
        .filter(|s| !excluded.contains(&s.country))
        .cloned()
        .collect()
}

/// Training pool with specific years of the target country excluded; other
/// countries contribute all their cells.
pub fn scv_train_pool(cells: &[Sample], target: CountryCode, excluded_years: &[i32]) -> Vec<Sample> {
    cells
        .iter()
        .filter(|s| s.country != target || !excluded_years.contains(&s.year))
        .cloned()
        .collect()
}

/// Prediction from the top-k prefix of an already-ranked neighbor list,
/// with weights renormalized over the prefix.
fn prefix_predict(
    neighbors: &[Neighbor],
    k: usize,
    train: &[Sample],
    epsilon: f64,
) -> Result<SurveyDistribution> {
    let k = k.min(neighbors.len());
    let total: f64 = neighbors[..k].iter().map(|n| n.weight).sum();
    let renormed: Vec<Neighbor> = neighbors[..k]
        .iter()
        .map(|n| Neighbor { weight: n.weight / total, ..*n })
        .collect();
    knn::predict_from_neighbors(&renormed, train, epsilon)
}

fn cell_loss(truth: &SurveyDistribution, predicted: &SurveyDistribution, epsilon: f64) -> Result<f64> {
    kl_divergence(&truth.probs(), &predicted.probs(), epsilon)
}

/// Leave-one-country-out evaluation over every country in turn. For each
/// target, k is chosen by rotating a validation country through the
/// remainder (the validation country's own cells leave the training pool),
/// summing KL losses over surveyed years, and taking the k with the
/// smallest total (ties to the smaller k). λ is fixed at 1.
pub fn loco_evaluate(
    samples: &[Sample],
    k_range: RangeInclusive<usize>,
    opts: &EvalOptions,
) -> Result<EvaluationReport> {
    let (cells, skipped) = surveyed_cells(samples, opts.min_quotes);
    let countries = distinct_countries(&cells);
    if countries.len() < 3 {
        return Err(Error::NotEnoughCountries(countries.len()));
    }
    let ks = validate_k_range(&k_range)?;
    let max_k = *ks.last().expect("non-empty");

    let per_target: Vec<Result<(Selection, Vec<CellResult>)>> =
        exec::ordered_map(&countries, |&c_star| {
            let selection = select_k_loco(&cells, &countries, c_star, &ks, opts)?;
            let train = loco_train_pool(&cells, &[c_star]);
            let config = KnnConfig {
                k: selection.best_k,
                epsilon: opts.epsilon,
                lambda: 1.0,
                lambda_country: None,
            };
            let mut rows = Vec::new();
            for test in cells.iter().filter(|s| s.country == c_star) {
                let predicted = knn::predict(test, &train, &config)?;
                let truth = test.survey.clone().expect("surveyed cells only");
                let loss = cell_loss(&truth, &predicted, opts.epsilon)?;
                rows.push(CellResult {
                    country: test.country,
                    year: test.year,
                    n_quotes: test.n_quotes,
                    best_k: selection.best_k,
                    best_lambda: 1.0,
                    loss,
                    truth,
                    predicted,
                });
            }
            Ok((selection, rows))
        });

    let mut selection = Vec::new();
    let mut per_cell = Vec::new();
    for item in per_target {
        let (sel, rows) = item?;
        selection.push(sel);
        per_cell.extend(rows);
    }
    let _ = max_k;
    assemble_report(Scenario::Loco, per_cell, selection, skipped)
}

fn select_k_loco(
    cells: &[Sample],
    countries: &[CountryCode],
    c_star: CountryCode,
    ks: &[usize],
    opts: &EvalOptions,
) -> Result<Selection> {
    let max_k = *ks.last().expect("non-empty");
    let mut totals = vec![0.0f64; ks.len()];
    let mut by_unit = Vec::new();

    for &c_val in countries.iter().filter(|&&c| c != c_star) {
        let train = loco_train_pool(cells, &[c_star, c_val]);
        if train.is_empty() {
            continue;
        }
        let search = KnnConfig { k: max_k, epsilon: opts.epsilon, lambda: 1.0, lambda_country: None };
        let mut unit = vec![0.0f64; ks.len()];
        for v in cells.iter().filter(|s| s.country == c_val) {
            let neighbors = knn::nearest_neighbors(v, &train, &search)?;
            let truth = v.survey.as_ref().expect("surveyed cells only");
            for (ki, &k) in ks.iter().enumerate() {
                let predicted = prefix_predict(&neighbors, k, &train, opts.epsilon)?;
                unit[ki] += cell_loss(truth, &predicted, opts.epsilon)?;
            }
        }
        for (t, u) in totals.iter_mut().zip(&unit) {
            *t += *u;
        }
        by_unit.push((c_val.to_string(), unit));
    }

    let mut best = 0;
    for (i, &loss) in totals.iter().enumerate() {
        if loss < totals[best] {
            best = i;
        }
    }
    Ok(Selection {
        target: c_star.to_string(),
        best_k: ks[best],
        best_lambda: 1.0,
        grid: ks
            .iter()
            .zip(&totals)
            .map(|(&k, &loss)| GridLoss { k, lambda: 1.0, loss })
            .collect(),
        by_unit,
    })
}

/// Same-country-validation for one target country: each surveyed year in
/// turn is the test set, the remaining years rotate as validation, and the
/// (k, λ) pair minimizing the summed validation loss is chosen (ties to the
/// smaller k, then the smaller λ). Training always includes every other
/// country plus the target's non-held-out years, with λ multiplying the
/// similarity of same-country samples.
pub fn scv_evaluate(
    samples: &[Sample],
    target: CountryCode,
    k_range: RangeInclusive<usize>,
    lambda_grid: &[f64],
    opts: &EvalOptions,
) -> Result<EvaluationReport> {
    let (cells, skipped) = surveyed_cells(samples, opts.min_quotes);
    let (selection, per_cell) = scv_single_target(&cells, target, &k_range, lambda_grid, opts)?;
    assemble_report(Scenario::Scv, per_cell, selection, skipped)
}

/// SCV over every country with at least three surveyed years.
pub fn scv_evaluate_all(
    samples: &[Sample],
    k_range: RangeInclusive<usize>,
    lambda_grid: &[f64],
    opts: &EvalOptions,
) -> Result<EvaluationReport> {
    let (cells, mut skipped) = surveyed_cells(samples, opts.min_quotes);
    let countries = distinct_countries(&cells);
    let eligible: Vec<CountryCode> = countries
        .iter()
        .copied()
        .filter(|&c| cells.iter().filter(|s| s.country == c).count() >= 3)
        .collect();
    for c in countries.iter().filter(|c| !eligible.contains(c)) {
        skipped.push(format!("{c}: fewer than 3 surveyed years, skipped for SCV"));
    }
    if eligible.is_empty() {
        return Err(Error::InvalidInput("no country has 3 or more surveyed years".into()));
    }

    let per_target: Vec<Result<(Vec<Selection>, Vec<CellResult>)>> =
        exec::ordered_map(&eligible, |&target| {
            scv_single_target(&cells, target, &k_range, lambda_grid, opts)
        });

    let mut selection = Vec::new();
    let mut per_cell = Vec::new();
    for item in per_target {
        let (sels, rows) = item?;
        selection.extend(sels);
        per_cell.extend(rows);
    }
    assemble_report(Scenario::Scv, per_cell, selection, skipped)
}

fn scv_single_target(
    cells: &[Sample],
    target: CountryCode,
    k_range: &RangeInclusive<usize>,
    lambda_grid: &[f64],
    opts: &EvalOptions,
) -> Result<(Vec<Selection>, Vec<CellResult>)> {
    let ks = validate_k_range(k_range)?;
    let max_k = *ks.last().expect("non-empty");
    if lambda_grid.is_empty() || lambda_grid.iter().any(|&l| l < 1.0 || !l.is_finite()) {
        return Err(Error::InvalidConfig(format!("bad lambda grid {lambda_grid:?}")));
    }

    let target_cells: Vec<&Sample> = cells.iter().filter(|s| s.country == target).collect();
    let years: Vec<i32> = target_cells.iter().map(|s| s.year).collect();
    if years.len() < 3 {
        return Err(Error::InsufficientYears { country: target.to_string(), found: years.len() });
    }

    let results: Vec<Result<(Selection, CellResult)>> = exec::ordered_map(&years, |&y_star| {
        // validation: rotate over the remaining surveyed years
        let mut grid_losses = vec![0.0f64; ks.len() * lambda_grid.len()];
        let mut by_unit: Vec<(String, Vec<f64>)> = Vec::new();
        for &y_val in years.iter().filter(|&&y| y != y_star) {
            let train = scv_train_pool(cells, target, &[y_star, y_val]);
            let v = target_cells.iter().find(|s| s.year == y_val).expect("year from list");
            let truth = v.survey.as_ref().expect("surveyed cells only");
            let mut unit = vec![0.0f64; grid_losses.len()];
            for (li, &lambda) in lambda_grid.iter().enumerate() {
                let search = KnnConfig {
                    k: max_k,
                    epsilon: opts.epsilon,
                    lambda,
                    lambda_country: Some(target),
                };
                let neighbors = knn::nearest_neighbors(v, &train, &search)?;
                for (ki, &k) in ks.iter().enumerate() {
                    let predicted = prefix_predict(&neighbors, k, &train, opts.epsilon)?;
                    unit[ki * lambda_grid.len() + li] += cell_loss(truth, &predicted, opts.epsilon)?;
                }
            }
            for (g, u) in grid_losses.iter_mut().zip(&unit) {
                *g += *u;
            }
            by_unit.push((y_val.to_string(), unit));
        }

        // first strict minimum scanning k-major, λ-minor: ties resolve to
        // the smaller k, then the smaller λ
        let mut best = 0;
        for (i, &loss) in grid_losses.iter().enumerate() {
            if loss < grid_losses[best] {
                best = i;
            }
        }
        let best_k = ks[best / lambda_grid.len()];
        let best_lambda = lambda_grid[best % lambda_grid.len()];

        // test on the held-out year
        let train = scv_train_pool(cells, target, &[y_star]);
        let test = target_cells.iter().find(|s| s.year == y_star).expect("year from list");
        let config = KnnConfig {
            k: best_k,
            epsilon: opts.epsilon,
            lambda: best_lambda,
            lambda_country: Some(target),
        };
        let predicted = knn::predict(test, &train, &config)?;
        let truth = test.survey.clone().expect("surveyed cells only");
        let loss = cell_loss(&truth, &predicted, opts.epsilon)?;

        let grid = ks
            .iter()
            .flat_map(|&k| {
                lambda_grid.iter().map(move |&lambda| (k, lambda))
            })
            .zip(&grid_losses)
            .map(|((k, lambda), &loss)| GridLoss { k, lambda, loss })
            .collect();
        let selection = Selection {
            target: format!("{target}/{y_star}"),
            best_k,
            best_lambda,
            grid,
            by_unit,
        };
        let row = CellResult {
            country: target,
            year: y_star,
            n_quotes: test.n_quotes,
            best_k,
            best_lambda,
            loss,
            truth,
            predicted,
        };
        Ok((selection, row))
    });

    let mut selections = Vec::new();
    let mut rows = Vec::new();
    for item in results {
        let (sel, row) = item?;
        selections.push(sel);
        rows.push(row);
    }
    Ok((selections, rows))
}

fn assemble_report(
    scenario: Scenario,
    mut per_cell: Vec<CellResult>,
    selection: Vec<Selection>,
    skipped: Vec<String>,
) -> Result<EvaluationReport> {
    if per_cell.is_empty() {
        return Err(Error::InvalidInput("evaluation produced no cells".into()));
    }
    per_cell.sort_by_key(|r| (r.country, r.year));
    let losses: Vec<f64> = per_cell.iter().map(|r| r.loss).collect();
    let summary = summarize(&losses);
    let mut report = EvaluationReport {
        scenario,
        per_cell,
        summary,
        correlation: None,
        selection,
        skipped,
    };
    report.correlation = correlate_loss_quotes(&report)
        .ok()
        .map(|(pearson_r, p_value)| Correlation { pearson_r, p_value });
    Ok(report)
}

/// Median and quartiles with linear interpolation.
fn summarize(losses: &[f64]) -> LossSummary {
    let mut sorted = losses.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("losses are finite"));
    LossSummary {
        median: quantile(&sorted, 0.5),
        q25: quantile(&sorted, 0.25),
        q75: quantile(&sorted, 0.75),
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.len() == 1 {
        return sorted[0];
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if lo + 1 == sorted.len() {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

/// Pearson correlation between per-cell loss and log10 of the quote count,
/// with a two-sided p-value (t distribution, n-2 degrees of freedom).
pub fn correlate_loss_quotes(report: &EvaluationReport) -> Result<(f64, f64)> {
    if report.per_cell.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 cells for a correlation, got {}",
            report.per_cell.len()
        )));
    }
    let xs: Vec<f64> = report.per_cell.iter().map(|r| (r.n_quotes as f64).log10()).collect();
    let ys: Vec<f64> = report.per_cell.iter().map(|r| r.loss).collect();
    stats::pearson(&xs, &ys)
}

/// A prediction for a cell without survey ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellPrediction {
    pub country: CountryCode,
    pub year: i32,
    pub n_quotes: usize,
    pub k: usize,
    pub lambda: f64,
    pub prediction: SurveyDistribution,
    /// Label of the most probable category.
    pub modal: String,
    pub neighbors: Vec<NeighborDetail>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborDetail {
    pub country: CountryCode,
    pub year: i32,
    pub divergence: f64,
    pub weight: f64,
}

/// Predict cells of countries absent from the survey data. k is selected
/// LOCO-style by rotating every surveyed country through validation, then
/// each target cell is predicted from the full surveyed pool.
pub fn predict_unsurveyed(
    samples: &[Sample],
    targets: &[Sample],
    k_range: RangeInclusive<usize>,
    opts: &EvalOptions,
) -> Result<Vec<CellPrediction>> {
    if targets.is_empty() {
        return Ok(Vec::new());
    }
    let (cells, _) = surveyed_cells(samples, opts.min_quotes);
    let countries = distinct_countries(&cells);
    if countries.len() < 3 {
        return Err(Error::NotEnoughCountries(countries.len()));
    }
    for t in targets {
        if countries.contains(&t.country) {
            return Err(Error::TargetSurveyed(t.country.to_string()));
        }
    }
    let ks = validate_k_range(&k_range)?;
    let max_k = *ks.last().expect("non-empty");

    // k selection: every surveyed country takes a turn as validation
    let mut totals = vec![0.0f64; ks.len()];
    for &c_val in &countries {
        let train = loco_train_pool(&cells, &[c_val]);
        let search = KnnConfig { k: max_k, epsilon: opts.epsilon, lambda: 1.0, lambda_country: None };
        for v in cells.iter().filter(|s| s.country == c_val) {
            let neighbors = knn::nearest_neighbors(v, &train, &search)?;
            let truth = v.survey.as_ref().expect("surveyed cells only");
            for (ki, &k) in ks.iter().enumerate() {
                let predicted = prefix_predict(&neighbors, k, &train, opts.epsilon)?;
                totals[ki] += cell_loss(truth, &predicted, opts.epsilon)?;
            }
        }
    }
    let mut best = 0;
    for (i, &loss) in totals.iter().enumerate() {
        if loss < totals[best] {
            best = i;
        }
    }
    let best_k = ks[best];

    let mut ordered: Vec<&Sample> = targets.iter().collect();
    ordered.sort_by_key(|s| s.key());
    let config = KnnConfig { k: best_k, epsilon: opts.epsilon, lambda: 1.0, lambda_country: None };
    let predictions: Vec<Result<CellPrediction>> = exec::ordered_map(&ordered, |test| {
        let neighbors = knn::nearest_neighbors(test, &cells, &config)?;
        let prediction = knn::predict_from_neighbors(&neighbors, &cells, opts.epsilon)?;
        Ok(CellPrediction {
            country: test.country,
            year: test.year,
            n_quotes: test.n_quotes,
            k: best_k,
            lambda: 1.0,
            modal: prediction.modal_label().to_string(),
            neighbors: neighbors
                .iter()
                .map(|n| NeighborDetail {
                    country: cells[n.sample_index].country,
                    year: cells[n.sample_index].year,
                    divergence: n.divergence,
                    weight: n.weight,
                })
                .collect(),
            prediction,
        })
    });
    predictions.into_iter().collect()
}

pub fn write_report_json(report: &EvaluationReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, report).map_err(|e| Error::io(path, e.into()))?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn write_predictions_json(predictions: &[CellPrediction], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, predictions).map_err(|e| Error::io(path, e.into()))?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Flat per-cell CSV: `country,year,n_quotes,best_k,best_lambda,loss`.
pub fn write_cells_csv(report: &EvaluationReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::InvalidInput(e.to_string()))?;
    w.write_record(["country", "year", "n_quotes", "best_k", "best_lambda", "loss"])
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    for r in &report.per_cell {
        w.write_record([
            r.country.as_str().to_owned(),
            r.year.to_string(),
            r.n_quotes.to_string(),
            r.best_k.to_string(),
            format!("{}", r.best_lambda),
            format!("{}", r.loss),
        ])
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Ground truth vs prediction per category, for per-cell bar charts:
/// `country,year,category,truth,predicted`.
pub fn write_predictions_csv(report: &EvaluationReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::InvalidInput(e.to_string()))?;
    w.write_record(["country", "year", "category", "truth", "predicted"])
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    for r in &report.per_cell {
        let truth = r.truth.probs();
        let predicted = r.predicted.probs();
        for (i, label) in CATEGORY_LABELS.iter().enumerate() {
            w.write_record([
                r.country.as_str().to_owned(),
                r.year.to_string(),
                (*label).to_owned(),
                format!("{}", truth[i]),
                format!("{}", predicted[i]),
            ])
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Loss against quote volume, for scatter plots:
/// `country,year,n_quotes,log10_quotes,loss`.
pub fn write_scatter_csv(report: &EvaluationReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::InvalidInput(e.to_string()))?;
    w.write_record(["country", "year", "n_quotes", "log10_quotes", "loss"])
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    for r in &report.per_cell {
        w.write_record([
            r.country.as_str().to_owned(),
            r.year.to_string(),
            r.n_quotes.to_string(),
            format!("{}", (r.n_quotes as f64).log10()),
            format!("{}", r.loss),
        ])
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

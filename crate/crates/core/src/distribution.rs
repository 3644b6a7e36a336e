//! Probability-distribution building blocks: per-cell sentiment histograms,
//! 4-category survey distributions, and KL divergence between them.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::country::CountryCode;
use crate::demography::AttributedQuote;
use crate::error::{Error, Result};
use crate::exec;

/// Survey categories in fixed order: very unfavorable, somewhat unfavorable,
/// somewhat favorable, very favorable.
pub const CATEGORY_LABELS: [&str; 4] = ["VUF", "UF", "F", "VF"];

/// Numeric encoding of the categories.
pub const CATEGORY_VALUES: [f64; 4] = [-1.0, -0.5, 0.5, 1.0];

const SUM_TOLERANCE: f64 = 1e-9;

/// A discrete probability distribution over the four favorability categories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyDistribution {
    vuf: f64,
    uf: f64,
    f: f64,
    vf: f64,
}

impl SurveyDistribution {
    /// Build from probabilities that already sum to 1 (within 1e-9).
    pub fn new(probs: [f64; 4]) -> Result<Self> {
        if probs.iter().any(|&p| !(0.0..=1.0 + SUM_TOLERANCE).contains(&p)) {
            return Err(Error::InvalidInput(format!(
                "survey probabilities out of range: {probs:?}"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "survey probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(SurveyDistribution {
            vuf: probs[0],
            uf: probs[1],
            f: probs[2],
            vf: probs[3],
        })
    }

    /// Normalize arbitrary non-negative weights (counts or proportions).
    pub fn from_weights(weights: [f64; 4]) -> Result<Self> {
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "survey weights must be non-negative: {weights:?}"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidInput("all-zero survey counts".into()));
        }
        SurveyDistribution::new([
            weights[0] / sum,
            weights[1] / sum,
            weights[2] / sum,
            weights[3] / sum,
        ])
    }

    pub fn probs(&self) -> [f64; 4] {
        [self.vuf, self.uf, self.f, self.vf]
    }

    /// Index of the most probable category; ties go to the more unfavorable
    /// category, matching the fixed category order.
    pub fn modal_index(&self) -> usize {
        let p = self.probs();
        let mut best = 0;
        for i in 1..4 {
            if p[i] > p[best] {
                best = i;
            }
        }
        best
    }

    pub fn modal_label(&self) -> &'static str {
        CATEGORY_LABELS[self.modal_index()]
    }

    /// Mean favorability under the numeric category encoding.
    pub fn expected_value(&self) -> f64 {
        self.probs()
            .iter()
            .zip(CATEGORY_VALUES)
            .map(|(p, v)| p * v)
            .sum()
    }
}

/// Encode raw survey answer counts as a distribution.
pub fn encode_survey(counts: &[u64; 4]) -> Result<SurveyDistribution> {
    SurveyDistribution::from_weights(counts.map(|c| c as f64))
}

/// Binned empirical distribution of sentiment scores over [-1, 1] with
/// equal-width bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentHistogram {
    probabilities: Vec<f64>,
    n_quotes: usize,
}

impl SentimentHistogram {
    pub fn bin_count(&self) -> usize {
        self.probabilities.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn n_quotes(&self) -> usize {
        self.n_quotes
    }

    /// Inclusive-exclusive bin edges, except the last bin which is closed at 1.
    pub fn bin_edges(&self, index: usize) -> (f64, f64) {
        let width = 2.0 / self.bin_count() as f64;
        (-1.0 + width * index as f64, -1.0 + width * (index + 1) as f64)
    }
}

/// Bin sentiment scores into an equal-width histogram over [-1, 1].
/// The last bin is right-closed: a score of exactly 1 lands in bin B-1.
pub fn build_histogram(scores: &[f64], bins: usize) -> Result<SentimentHistogram> {
    if bins < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 bins, got {bins}")));
    }
    if scores.is_empty() {
        return Err(Error::EmptyCell);
    }
    let mut counts = vec![0usize; bins];
    let width = 2.0 / bins as f64;
    for &s in scores {
        if !(-1.0..=1.0).contains(&s) {
            return Err(Error::InvalidInput(format!("sentiment score out of range: {s}")));
        }
        let idx = (((s + 1.0) / width).floor() as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let n = scores.len();
    let probabilities = counts.iter().map(|&c| c as f64 / n as f64).collect();
    Ok(SentimentHistogram { probabilities, n_quotes: n })
}

/// KL divergence D(p || q) in nats.
///
/// When `epsilon > 0` and q has any zero entry, both vectors get `epsilon`
/// added to every component and are renormalized before the sum; otherwise
/// the raw vectors are used with the convention 0·ln(0/q) = 0. A zero q
/// entry opposite positive p mass with `epsilon = 0` is undefined and
/// reported as an error.
pub fn kl_divergence(p: &[f64], q: &[f64], epsilon: f64) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::InvalidInput(format!(
            "distribution lengths differ: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    if p.is_empty() {
        return Err(Error::InvalidInput("empty distributions".into()));
    }
    if epsilon < 0.0 || !epsilon.is_finite() {
        return Err(Error::InvalidInput(format!("epsilon must be >= 0, got {epsilon}")));
    }
    for (name, v) in [("p", p), ("q", q)] {
        if v.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::InvalidInput(format!("{name} has a negative or non-finite entry")));
        }
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidInput(format!("{name} sums to {sum}, expected 1")));
        }
    }

    let smooth = epsilon > 0.0 && q.iter().any(|&x| x <= 0.0);
    let mut sum = 0.0;
    if smooth {
        let z = 1.0 + epsilon * p.len() as f64;
        for (&pi, &qi) in p.iter().zip(q) {
            let ps = (pi + epsilon) / z;
            let qs = (qi + epsilon) / z;
            sum += ps * (ps / qs).ln();
        }
    } else {
        for (&pi, &qi) in p.iter().zip(q) {
            if pi == 0.0 {
                continue;
            }
            if qi <= 0.0 {
                return Err(Error::DivergenceUndefined);
            }
            sum += pi * (pi / qi).ln();
        }
    }
    Ok(sum.max(0.0))
}

/// One (country, year) cell: its sentiment histogram, its quote count, and
/// the survey ground truth when one exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub country: CountryCode,
    pub year: i32,
    pub n_quotes: usize,
    pub histogram: SentimentHistogram,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub survey: Option<SurveyDistribution>,
}

impl Sample {
    pub fn key(&self) -> (CountryCode, i32) {
        (self.country, self.year)
    }
}

/// Survey ground truth indexed by (country, year).
#[derive(Debug, Clone, Default)]
pub struct SurveyTable {
    map: BTreeMap<(CountryCode, i32), SurveyDistribution>,
}

impl SurveyTable {
    pub fn insert(&mut self, country: CountryCode, year: i32, dist: SurveyDistribution) -> Result<()> {
        if self.map.insert((country, year), dist).is_some() {
            return Err(Error::InvalidInput(format!(
                "duplicate survey row for ({country}, {year})"
            )));
        }
        Ok(())
    }

    pub fn get(&self, country: CountryCode, year: i32) -> Option<&SurveyDistribution> {
        self.map.get(&(country, year))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(CountryCode, i32), &SurveyDistribution)> {
        self.map.iter()
    }
}

/// Load survey ground truth from CSV with columns
/// `country,year,vuf,uf,f,vf`. Values may be counts or proportions; rows
/// are normalized either way.
pub fn load_survey_csv(path: impl AsRef<Path>) -> Result<SurveyTable> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let mut table = SurveyTable::default();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        let line = i + 2; // header is line 1
        if row.len() != 6 {
            return Err(Error::InvalidInput(format!(
                "{} line {line}: expected 6 columns, got {}",
                path.display(),
                row.len()
            )));
        }
        let country = CountryCode::parse(&row[0])
            .map_err(|e| Error::InvalidInput(format!("{} line {line}: {e}", path.display())))?;
        let year: i32 = row[1]
            .parse()
            .map_err(|_| Error::InvalidInput(format!("{} line {line}: bad year {:?}", path.display(), &row[1])))?;
        let mut weights = [0.0; 4];
        for (j, w) in weights.iter_mut().enumerate() {
            *w = row[j + 2].parse().map_err(|_| {
                Error::InvalidInput(format!(
                    "{} line {line}: bad value {:?}",
                    path.display(),
                    &row[j + 2]
                ))
            })?;
        }
        let dist = SurveyDistribution::from_weights(weights)
            .map_err(|e| Error::InvalidInput(format!("{} line {line}: {e}", path.display())))?;
        table.insert(country, year, dist)?;
    }
    Ok(table)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    /// Cells emitted.
    pub cells: usize,
    /// Cells dropped for having fewer than the minimum quote count.
    pub dropped_cells: usize,
    pub surveyed: usize,
    pub unsurveyed: usize,
}

/// Group attributed quotes into (country, year) cells, build a histogram per
/// cell, and join survey ground truth. Cells with fewer than `min_quotes`
/// quotes are dropped. Output is sorted by (country, year).
pub fn aggregate_cells(
    quotes: &[AttributedQuote],
    surveys: &SurveyTable,
    bins: usize,
    min_quotes: usize,
) -> Result<(Vec<Sample>, AggregateStats)> {
    let mut by_cell: BTreeMap<(CountryCode, i32), Vec<f64>> = BTreeMap::new();
    for q in quotes {
        let score = q.record.sentiment.ok_or_else(|| {
            Error::InvalidInput(format!("unscored quote {}", q.record.quote_id))
        })?;
        by_cell.entry((q.country, q.year)).or_default().push(score);
    }

    let mut stats = AggregateStats::default();
    let kept: Vec<((CountryCode, i32), Vec<f64>)> = by_cell
        .into_iter()
        .filter(|(_, scores)| {
            if scores.len() < min_quotes {
                stats.dropped_cells += 1;
                false
            } else {
                true
            }
        })
        .collect();

    let samples: Vec<Result<Sample>> = exec::ordered_map(&kept, |((country, year), scores)| {
        let histogram = build_histogram(scores, bins)?;
        Ok(Sample {
            country: *country,
            year: *year,
            n_quotes: scores.len(),
            histogram,
            survey: surveys.get(*country, *year).cloned(),
        })
    });
    let samples: Vec<Sample> = samples.into_iter().collect::<Result<_>>()?;

    stats.cells = samples.len();
    stats.surveyed = samples.iter().filter(|s| s.survey.is_some()).count();
    stats.unsurveyed = stats.cells - stats.surveyed;
    Ok((samples, stats))
}

/// Write samples as a JSON array, sorted by (country, year).
pub fn write_samples_json(samples: &[Sample], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, samples)
        .map_err(|e| Error::io(path, e.into()))?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_samples_json(path: impl AsRef<Path>) -> Result<Vec<Sample>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(std::io::BufReader::new(file))
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

/// Per-bin histogram dump for external plotting:
/// `country,year,bin,lo,hi,probability,n_quotes`.
pub fn write_histograms_csv(samples: &[Sample], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::InvalidInput(e.to_string()))?;
    w.write_record(["country", "year", "bin", "lo", "hi", "probability", "n_quotes"])
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    for s in samples {
        for (i, p) in s.histogram.probabilities().iter().enumerate() {
            let (lo, hi) = s.histogram.bin_edges(i);
            w.write_record([
                s.country.as_str().to_owned(),
                s.year.to_string(),
                i.to_string(),
                format!("{lo}"),
                format!("{hi}"),
                format!("{p}"),
                s.n_quotes.to_string(),
            ])
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

//! Seeded synthetic corpus and survey generator. Produces exactly the file
//! formats the pipeline consumes, plus a latent-truth JSON, so end-to-end
//! behavior can be validated at desk scale without any proprietary data.
//!
//! Generative model, per country c and year y:
//!   - favorability f(c, y): AR(1) with the `persistence` parameter and a
//!     clamped normal marginal; drives the survey answer probabilities
//!     through a softmax over the numeric category values.
//!   - media offset b(c): a per-country constant shifting quote sentiment
//!     relative to the population's favorability. It is what makes other
//!     years of the same country more informative than other countries.
//!   - quote sentiment: truncated normal on [-1, 1] centered at f + b with
//!     standard deviation `noise`; outlets are dealt evenly within each
//!     cell, and biased outlets add their configured shift to the center.

use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::country::CountryCode;
use crate::distribution::{encode_survey, Sample, CATEGORY_VALUES};
use crate::error::{Error, Result};

/// Marginal standard deviation of latent favorability.
const FAVORABILITY_SCALE: f64 = 0.45;
/// Latent favorability is clamped to this magnitude.
const FAVORABILITY_CLAMP: f64 = 0.85;
/// Default standard deviation of the per-country media offset.
const MEDIA_OFFSET_SCALE: f64 = 0.25;
const MEDIA_OFFSET_CLAMP: f64 = 0.5;
/// Softmax temperature mapping favorability to category probabilities.
const SOFTMAX_BETA: f64 = 3.0;
/// Quote sentiment centers are kept inside the open interval.
const CENTER_CLAMP: f64 = 0.95;

const SPEAKERS_PER_COUNTRY: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasedOutlet {
    pub name: String,
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_countries: usize,
    pub years: RangeInclusive<i32>,
    /// Quotes per (country, year) cell, drawn uniformly from this range.
    pub quotes_per_cell: RangeInclusive<u32>,
    pub survey_respondents: u32,
    /// Quote sentiment standard deviation σ. Zero makes the whole dataset
    /// deterministic: survey counts switch to exact apportionment.
    pub noise: f64,
    /// Year-over-year favorability correlation in [0, 1].
    pub persistence: f64,
    /// Standard deviation of the per-country media offset; the main dial
    /// for how much same-country history helps over cross-country matching.
    pub media_offset_scale: f64,
    pub biased_outlets: Vec<BiasedOutlet>,
    pub n_outlets: usize,
    /// Irrelevant filler quotes per cell, for exercising keyword filtering.
    pub decoys_per_cell: u32,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_countries: 20,
            years: 2015..=2020,
            quotes_per_cell: 1500..=1500,
            survey_respondents: 1000,
            noise: 0.35,
            persistence: 0.9,
            media_offset_scale: MEDIA_OFFSET_SCALE,
            biased_outlets: Vec::new(),
            n_outlets: 30,
            decoys_per_cell: 0,
            seed: 42,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_countries < 3 {
            return Err(Error::InvalidConfig("need at least 3 countries".into()));
        }
        if self.n_countries > CountryCode::assigned_count() {
            return Err(Error::InvalidConfig(format!(
                "at most {} countries available",
                CountryCode::assigned_count()
            )));
        }
        if self.years.is_empty() {
            return Err(Error::InvalidConfig("empty year range".into()));
        }
        if self.quotes_per_cell.is_empty() || *self.quotes_per_cell.start() == 0 {
            return Err(Error::InvalidConfig("quotes_per_cell must start at 1".into()));
        }
        if self.survey_respondents == 0 {
            return Err(Error::InvalidConfig("survey_respondents must be positive".into()));
        }
        if self.noise < 0.0 || !self.noise.is_finite() {
            return Err(Error::InvalidConfig(format!("noise must be >= 0, got {}", self.noise)));
        }
        if !(0.0..=1.0).contains(&self.persistence) {
            return Err(Error::InvalidConfig(format!(
                "persistence must be in [0, 1], got {}",
                self.persistence
            )));
        }
        if self.media_offset_scale < 0.0 || !self.media_offset_scale.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "media_offset_scale must be >= 0, got {}",
                self.media_offset_scale
            )));
        }
        if self.n_outlets == 0 || self.n_outlets < self.biased_outlets.len() {
            return Err(Error::InvalidConfig("n_outlets must cover the biased outlets".into()));
        }
        Ok(())
    }
}

/// One generated cell with its latent state and raw draws.
#[derive(Debug, Clone)]
pub struct SynthCell {
    pub country: CountryCode,
    pub year: i32,
    /// Latent favorability f.
    pub favorability: f64,
    /// f plus the country's media offset; the quote sentiment center.
    pub media_center: f64,
    pub survey_counts: [u64; 4],
    pub scores: Vec<f64>,
    /// Outlet index per score, aligned with `scores`.
    pub outlets: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub config: SynthConfig,
    pub countries: Vec<CountryCode>,
    pub media_offsets: Vec<f64>,
    pub outlet_names: Vec<String>,
    pub cells: Vec<SynthCell>,
}

/// Generate the in-memory dataset. Fully deterministic for a given config.
pub fn generate_dataset(config: &SynthConfig) -> Result<SynthDataset> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let countries: Vec<CountryCode> = (0..config.n_countries)
        .map(|i| CountryCode::nth(i).expect("validated against assigned count"))
        .collect();

    let media_offsets: Vec<f64> = countries
        .iter()
        .map(|_| {
            (standard_normal(&mut rng) * config.media_offset_scale)
                .clamp(-MEDIA_OFFSET_CLAMP, MEDIA_OFFSET_CLAMP)
        })
        .collect();

    let plain_outlets = config.n_outlets - config.biased_outlets.len();
    let mut outlet_names: Vec<String> = (0..plain_outlets).map(|i| format!("outlet-{i:02}")).collect();
    let mut outlet_shifts = vec![0.0f64; plain_outlets];
    for b in &config.biased_outlets {
        outlet_names.push(b.name.clone());
        outlet_shifts.push(b.shift);
    }

    let innovation = (1.0 - config.persistence * config.persistence).sqrt();
    let mut cells = Vec::new();
    for (ci, &country) in countries.iter().enumerate() {
        let mut favorability = f64::NAN;
        for year in config.years.clone() {
            favorability = if favorability.is_nan() {
                standard_normal(&mut rng) * FAVORABILITY_SCALE
            } else {
                config.persistence * favorability
                    + innovation * standard_normal(&mut rng) * FAVORABILITY_SCALE
            }
            .clamp(-FAVORABILITY_CLAMP, FAVORABILITY_CLAMP);

            let probs = soften(favorability);
            let survey_counts = if config.noise == 0.0 {
                apportion(&probs, config.survey_respondents as u64)
            } else {
                multinomial(&mut rng, &probs, config.survey_respondents as u64)
            };

            let n_quotes = rng.gen_range(config.quotes_per_cell.clone()) as usize;
            let mut outlets: Vec<u32> = (0..n_quotes)
                .map(|i| (i % config.n_outlets) as u32)
                .collect();
            shuffle(&mut rng, &mut outlets);

            let media_center =
                (favorability + media_offsets[ci]).clamp(-CENTER_CLAMP, CENTER_CLAMP);
            let scores: Vec<f64> = outlets
                .iter()
                .map(|&o| {
                    let center = media_center + outlet_shifts[o as usize];
                    truncated_normal(&mut rng, center, config.noise, -1.0, 1.0)
                })
                .collect();

            cells.push(SynthCell {
                country,
                year,
                favorability,
                media_center,
                survey_counts,
                scores,
                outlets,
            });
        }
    }

    Ok(SynthDataset {
        config: config.clone(),
        countries,
        media_offsets,
        outlet_names,
        cells,
    })
}

/// Category probabilities for a favorability level: softmax over the
/// numeric category values at inverse temperature `SOFTMAX_BETA`.
pub fn soften(favorability: f64) -> [f64; 4] {
    let mut w = [0.0; 4];
    for (x, v) in w.iter_mut().zip(CATEGORY_VALUES) {
        *x = (SOFTMAX_BETA * favorability * v).exp();
    }
    let sum: f64 = w.iter().sum();
    w.map(|x| x / sum)
}

impl SynthDataset {
    /// Evaluation-ready samples: one histogram per cell plus the survey
    /// distribution from the generated counts.
    pub fn to_samples(&self, bins: usize) -> Result<Vec<Sample>> {
        self.cells
            .iter()
            .map(|c| {
                Ok(Sample {
                    country: c.country,
                    year: c.year,
                    n_quotes: c.scores.len(),
                    histogram: crate::distribution::build_histogram(&c.scores, bins)?,
                    survey: Some(encode_survey(&c.survey_counts)?),
                })
            })
            .collect()
    }

    pub fn truth(&self) -> SynthTruth {
        SynthTruth {
            seed: self.config.seed,
            noise: self.config.noise,
            persistence: self.config.persistence,
            countries: self
                .countries
                .iter()
                .enumerate()
                .map(|(ci, &country)| {
                    let cells = self
                        .cells
                        .iter()
                        .filter(|c| c.country == country)
                        .map(|c| {
                            let probs = soften(c.favorability);
                            let expected = probs
                                .iter()
                                .zip(CATEGORY_VALUES)
                                .map(|(p, v)| p * v)
                                .sum();
                            CellTruth {
                                year: c.year,
                                favorability: c.favorability,
                                media_center: c.media_center,
                                survey_probs: probs,
                                expected_favorability: expected,
                            }
                        })
                        .collect();
                    CountryTruth {
                        country,
                        media_offset: self.media_offsets[ci],
                        cells,
                    }
                })
                .collect(),
        }
    }

    /// Write the quote JSONL (Quotebank-shaped), survey CSV, speakers TSV,
    /// and latent-truth JSON under `dir`.
    pub fn write_artifacts(&self, dir: impl AsRef<Path>) -> Result<SynthPaths> {
        use std::io::Write as _;
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let paths = SynthPaths {
            quotes: dir.join("quotes.jsonl"),
            survey: dir.join("survey.csv"),
            speakers: dir.join("speakers.tsv"),
            truth: dir.join("truth.json"),
        };

        // speakers: a fixed per-country roster
        {
            let file = std::fs::File::create(&paths.speakers).map_err(|e| Error::io(&paths.speakers, e))?;
            let mut w = std::io::BufWriter::new(file);
            for &country in &self.countries {
                for i in 0..SPEAKERS_PER_COUNTRY {
                    writeln!(w, "{}\t{}", speaker_name(country, i), country)
                        .map_err(|e| Error::io(&paths.speakers, e))?;
                }
            }
        }

        // survey ground truth
        {
            let file = std::fs::File::create(&paths.survey).map_err(|e| Error::io(&paths.survey, e))?;
            let mut w = std::io::BufWriter::new(file);
            writeln!(w, "country,year,vuf,uf,f,vf").map_err(|e| Error::io(&paths.survey, e))?;
            for c in &self.cells {
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    c.country, c.year, c.survey_counts[0], c.survey_counts[1], c.survey_counts[2], c.survey_counts[3]
                )
                .map_err(|e| Error::io(&paths.survey, e))?;
            }
        }

        // quotes, Quotebank-shaped: urls carry the outlet as the host
        {
            let file = std::fs::File::create(&paths.quotes).map_err(|e| Error::io(&paths.quotes, e))?;
            let mut w = std::io::BufWriter::new(file);
            for c in &self.cells {
                for (i, (&score, &outlet)) in c.scores.iter().zip(&c.outlets).enumerate() {
                    let speaker = speaker_name(c.country, i % SPEAKERS_PER_COUNTRY);
                    let record = serde_json::json!({
                        "quoteID": format!("{}-{}-{:05}", c.country, c.year, i),
                        "quotation": format!(
                            "Statement {i}: our view of the United States remains a subject of public debate."
                        ),
                        "speaker": speaker,
                        "date": format!("{}-{:02}-{:02} 12:00:00", c.year, 1 + i % 12, 1 + (i / 12) % 28),
                        "urls": [format!("https://{}/{}/{}", self.outlet_names[outlet as usize], c.year, i)],
                        "sentiment": score,
                    });
                    serde_json::to_writer(&mut w, &record).map_err(|e| Error::io(&paths.quotes, e.into()))?;
                    w.write_all(b"\n").map_err(|e| Error::io(&paths.quotes, e))?;
                }
                for i in 0..self.config.decoys_per_cell {
                    let speaker = speaker_name(c.country, i as usize % SPEAKERS_PER_COUNTRY);
                    let record = serde_json::json!({
                        "quoteID": format!("{}-{}-decoy-{:03}", c.country, c.year, i),
                        "quotation": format!("Local roundup {i}: the weekend market drew a record crowd."),
                        "speaker": speaker,
                        "date": format!("{}-{:02}-01 09:00:00", c.year, 1 + i % 12),
                        "urls": [format!("https://{}/{}/d{}", self.outlet_names[i as usize % self.outlet_names.len()], c.year, i)],
                        "sentiment": 0.0,
                    });
                    serde_json::to_writer(&mut w, &record).map_err(|e| Error::io(&paths.quotes, e.into()))?;
                    w.write_all(b"\n").map_err(|e| Error::io(&paths.quotes, e))?;
                }
            }
        }

        // latent truth
        {
            let file = std::fs::File::create(&paths.truth).map_err(|e| Error::io(&paths.truth, e))?;
            let mut w = std::io::BufWriter::new(file);
            serde_json::to_writer_pretty(&mut w, &self.truth()).map_err(|e| Error::io(&paths.truth, e.into()))?;
            w.write_all(b"\n").map_err(|e| Error::io(&paths.truth, e))?;
        }

        Ok(paths)
    }
}

/// Generate and write all artifacts in one step.
pub fn generate(config: &SynthConfig, dir: impl AsRef<Path>) -> Result<SynthPaths> {
    generate_dataset(config)?.write_artifacts(dir)
}

fn speaker_name(country: CountryCode, index: usize) -> String {
    format!("Speaker {} {:02}", country, index)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthPaths {
    pub quotes: PathBuf,
    pub survey: PathBuf,
    pub speakers: PathBuf,
    pub truth: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthTruth {
    pub seed: u64,
    pub noise: f64,
    pub persistence: f64,
    pub countries: Vec<CountryTruth>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryTruth {
    pub country: CountryCode,
    pub media_offset: f64,
    pub cells: Vec<CellTruth>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellTruth {
    pub year: i32,
    pub favorability: f64,
    pub media_center: f64,
    pub survey_probs: [f64; 4],
    pub expected_favorability: f64,
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    normal_inv_cdf(rng.gen_range(f64::EPSILON..1.0))
}

/// Fisher-Yates, driven by the seeded stream.
fn shuffle<T>(rng: &mut ChaCha8Rng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

/// Inverse-CDF sampling: exact truncation without rejection loops, so far
/// tails cannot stall generation.
fn truncated_normal(rng: &mut ChaCha8Rng, mean: f64, sd: f64, lo: f64, hi: f64) -> f64 {
    if sd == 0.0 {
        return mean.clamp(lo, hi);
    }
    let a = normal_cdf((lo - mean) / sd);
    let b = normal_cdf((hi - mean) / sd);
    if b - a < 1e-12 {
        return if (lo - mean).abs() < (hi - mean).abs() { lo } else { hi };
    }
    let u: f64 = rng.gen_range(0.0..1.0);
    let x = mean + sd * normal_inv_cdf((a + u * (b - a)).clamp(1e-16, 1.0 - 1e-16));
    x.clamp(lo, hi)
}

/// Standard normal CDF via the Abramowitz-Stegun 7.1.26 erf approximation.
fn normal_cdf(x: f64) -> f64 {
    let z = x / std::f64::consts::SQRT_2;
    0.5 * (1.0 + erf(z))
}

fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let y = 1.0
        - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
            + 0.254829592)
            * t
            * (-x * x).exp();
    sign * y
}

/// Acklam's rational approximation to the standard normal quantile.
fn normal_inv_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    assert!((0.0..1.0).contains(&p) && p > 0.0, "p in open (0,1)");
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Multinomial draw by sequential conditional binomials.
fn multinomial(rng: &mut ChaCha8Rng, probs: &[f64; 4], n: u64) -> [u64; 4] {
    let mut counts = [0u64; 4];
    let mut remaining_n = n;
    let mut remaining_p = 1.0;
    for i in 0..3 {
        if remaining_n == 0 {
            break;
        }
        let p = (probs[i] / remaining_p).clamp(0.0, 1.0);
        let draw = rand_distr::Distribution::sample(
            &rand_distr::Binomial::new(remaining_n, p).expect("p clamped to [0, 1]"),
            rng,
        );
        counts[i] = draw;
        remaining_n -= draw;
        remaining_p = (remaining_p - probs[i]).max(0.0);
    }
    counts[3] = remaining_n;
    counts
}

/// Largest-remainder apportionment of `n` into integer counts.
fn apportion(probs: &[f64; 4], n: u64) -> [u64; 4] {
    let mut counts = [0u64; 4];
    let mut remainders = [(0.0f64, 0usize); 4];
    let mut assigned = 0u64;
    for i in 0..4 {
        let exact = probs[i] * n as f64;
        counts[i] = exact.floor() as u64;
        assigned += counts[i];
        remainders[i] = (exact - exact.floor(), i);
    }
    remainders.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    for &(_, i) in remainders.iter().take((n - assigned) as usize) {
        counts[i] += 1;
    }
    counts
}

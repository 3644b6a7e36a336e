//! Media-outlet bias detection: find outlets whose sentiment distribution
//! differs significantly from everything else and drop their quotes.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::QuoteRecord;
use crate::error::{Error, Result};
use crate::exec;
use crate::stats::{t_two_sided_p, TTest};

pub use crate::stats::welch_t_test;

/// Sentiment summary for one outlet.
#[derive(Debug, Clone, PartialEq)]
pub struct OutletStats {
    pub outlet: String,
    pub n: usize,
    pub mean: f64,
    /// Unbiased sample variance; 0 for a single observation.
    pub variance: f64,
    pub scores: Vec<f64>,
}

/// Sentiment summaries for the `top_n` outlets by quote count, most quoted
/// first, ties broken by outlet name. Requires scored quotes and at least
/// two distinct outlets.
pub fn outlet_statistics(quotes: &[QuoteRecord], top_n: usize) -> Result<Vec<OutletStats>> {
    if top_n == 0 {
        return Err(Error::InvalidConfig("top_n must be at least 1".into()));
    }
    let mut by_outlet: HashMap<&str, Vec<f64>> = HashMap::new();
    for q in quotes {
        let score = q
            .sentiment
            .ok_or_else(|| Error::InvalidInput(format!("unscored quote {}", q.quote_id)))?;
        by_outlet.entry(q.outlet.as_str()).or_default().push(score);
    }
    if by_outlet.len() < 2 {
        return Err(Error::NotEnoughOutlets { needed: 2, found: by_outlet.len() });
    }

    let mut ranked: Vec<(&str, Vec<f64>)> = by_outlet.into_iter().collect();
    ranked.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(top_n);

    Ok(ranked
        .into_iter()
        .map(|(outlet, scores)| {
            let n = scores.len();
            let mean = scores.iter().sum::<f64>() / n as f64;
            let variance = if n > 1 {
                scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1) as f64
            } else {
                0.0
            };
            OutletStats { outlet: outlet.to_owned(), n, mean, variance, scores }
        })
        .collect())
}

/// One outlet's test against the pooled rest of the corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutletTest {
    pub outlet: String,
    pub n: usize,
    pub mean: f64,
    pub t: f64,
    pub p: f64,
    pub excluded: bool,
    /// Zero-variance separation; the p of 0 is nominal.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub tested: Vec<OutletTest>,
    pub alpha: f64,
    pub top_n: usize,
    /// Quotes removed along with the excluded outlets.
    pub quotes_removed: usize,
}

/// Welch's t-test from per-side moments instead of raw samples, so the
/// pooled side never has to be materialized.
fn welch_from_moments(n1: f64, mean1: f64, var1: f64, n2: f64, mean2: f64, var2: f64) -> TTest {
    let se1 = var1 / n1;
    let se2 = var2 / n2;
    let se = (se1 + se2).sqrt();
    if se == 0.0 {
        return if mean1 == mean2 {
            TTest { t: 0.0, df: n1 + n2 - 2.0, p: 1.0, degenerate: false }
        } else {
            let t = if mean1 > mean2 { f64::INFINITY } else { f64::NEG_INFINITY };
            TTest { t, df: n1 + n2 - 2.0, p: 0.0, degenerate: true }
        };
    }
    let t = (mean1 - mean2) / se;
    let df = (se1 + se2).powi(2) / (se1.powi(2) / (n1 - 1.0) + se2.powi(2) / (n2 - 1.0));
    TTest { t, df, p: t_two_sided_p(t, df), degenerate: false }
}

/// Test each top-n outlet's scores against the pooled scores of every other
/// quote; outlets with p below `alpha` are excluded and their quotes
/// removed. Input order of the surviving quotes is preserved.
pub fn detect_and_filter(
    quotes: Vec<QuoteRecord>,
    top_n: usize,
    alpha: f64,
) -> Result<(Vec<QuoteRecord>, BiasReport)> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidConfig(format!("alpha must be in [0, 1), got {alpha}")));
    }
    let stats = outlet_statistics(&quotes, top_n)?;

    // Pooled moments over the whole corpus; the "rest" side of each test is
    // derived by subtracting the outlet's own sums.
    let mut total_n = 0usize;
    let mut total_sum = 0.0;
    let mut total_sumsq = 0.0;
    for q in &quotes {
        let s = q.sentiment.expect("checked by outlet_statistics");
        total_n += 1;
        total_sum += s;
        total_sumsq += s * s;
    }

    let tested: Vec<OutletTest> = exec::ordered_map(&stats, |o| {
        let rest_n = total_n - o.n;
        let outlet_sum = o.mean * o.n as f64;
        let outlet_sumsq: f64 = o.scores.iter().map(|s| s * s).sum();
        let rest_sum = total_sum - outlet_sum;
        let rest_sumsq = total_sumsq - outlet_sumsq;
        let rest_mean = rest_sum / rest_n as f64;
        let rest_var = if rest_n > 1 {
            ((rest_sumsq - rest_n as f64 * rest_mean * rest_mean) / (rest_n as f64 - 1.0)).max(0.0)
        } else {
            0.0
        };

        let test = if o.n < 2 || rest_n < 2 {
            // One observation cannot demonstrate a distributional difference.
            TTest { t: 0.0, df: 0.0, p: 1.0, degenerate: false }
        } else {
            welch_from_moments(o.n as f64, o.mean, o.variance, rest_n as f64, rest_mean, rest_var)
        };
        OutletTest {
            outlet: o.outlet.clone(),
            n: o.n,
            mean: o.mean,
            t: test.t,
            p: test.p,
            excluded: test.p < alpha,
            degenerate: test.degenerate,
        }
    });

    let excluded: std::collections::HashSet<&str> = tested
        .iter()
        .filter(|t| t.excluded)
        .map(|t| t.outlet.as_str())
        .collect();
    let before = quotes.len();
    let kept: Vec<QuoteRecord> = quotes
        .into_iter()
        .filter(|q| !excluded.contains(q.outlet.as_str()))
        .collect();
    let report = BiasReport {
        quotes_removed: before - kept.len(),
        tested,
        alpha,
        top_n,
    };
    Ok((kept, report))
}

/// Plot-ready CSV: `outlet,mean,n,p,excluded`.
pub fn write_bias_csv(report: &BiasReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::InvalidInput(e.to_string()))?;
    w.write_record(["outlet", "mean", "n", "p", "excluded"])
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    for t in &report.tested {
        w.write_record([
            t.outlet.clone(),
            format!("{}", t.mean),
            t.n.to_string(),
            format!("{}", t.p),
            t.excluded.to_string(),
        ])
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn write_bias_json(report: &BiasReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    use std::io::Write as _;
    serde_json::to_writer_pretty(&mut w, report).map_err(|e| Error::io(path, e.into()))?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quote(outlet: &str, sentiment: f64) -> QuoteRecord {
        QuoteRecord {
            quote_id: "q".into(),
            text: "t".into(),
            speaker: None,
            outlet: outlet.into(),
            date: "2017-01-01".into(),
            year: 2017,
            sentiment: Some(sentiment),
        }
    }

    #[test]
    fn outlet_statistics_ranks_by_count() {
        let mut quotes = Vec::new();
        for _ in 0..10 {
            quotes.push(quote("A", 0.1));
        }
        for _ in 0..5 {
            quotes.push(quote("B", 0.2));
        }
        quotes.push(quote("C", 0.3));
        let stats = outlet_statistics(&quotes, 2).unwrap();
        assert_eq!(stats.len(), 2);
        assert_eq!(stats[0].outlet, "A");
        assert_eq!(stats[1].outlet, "B");
    }

    #[test]
    fn outlet_statistics_hand_arithmetic() {
        let quotes = vec![quote("A", 0.2), quote("A", 0.4), quote("B", 0.0)];
        let stats = outlet_statistics(&quotes, 1).unwrap();
        assert_relative_eq!(stats[0].mean, 0.3, epsilon = 1e-12);
        assert_relative_eq!(stats[0].variance, 0.02, epsilon = 1e-12);
    }

    #[test]
    fn single_outlet_is_an_error() {
        let quotes = vec![quote("A", 0.1), quote("A", 0.2)];
        assert!(matches!(
            outlet_statistics(&quotes, 5),
            Err(Error::NotEnoughOutlets { found: 1, .. })
        ));
    }

    #[test]
    fn unscored_quote_is_an_error() {
        let mut q = quote("A", 0.0);
        q.sentiment = None;
        assert!(outlet_statistics(&[q, quote("B", 0.1)], 2).is_err());
    }

    #[test]
    fn shifted_outlet_is_excluded() {
        // 29 outlets sharing one score grid centered at 0, one outlet
        // shifted beyond +0.4.
        let grid: Vec<f64> = (0..60).map(|j| -0.3 + 0.6 * j as f64 / 59.0).collect();
        let mut quotes = Vec::new();
        for i in 0..30 {
            let shift = if i == 13 { 0.45 } else { 0.0 };
            for &g in &grid {
                quotes.push(quote(&format!("outlet-{i:02}"), (g + shift).clamp(-1.0, 1.0)));
            }
        }
        let (kept, report) = detect_and_filter(quotes, 30, 0.05).unwrap();
        let excluded: Vec<&str> = report
            .tested
            .iter()
            .filter(|t| t.excluded)
            .map(|t| t.outlet.as_str())
            .collect();
        assert_eq!(excluded, vec!["outlet-13"]);
        assert!(kept.iter().all(|q| q.outlet != "outlet-13"));
        assert_eq!(report.quotes_removed, 60);
    }

    #[test]
    fn alpha_zero_excludes_nothing() {
        let quotes: Vec<QuoteRecord> = (0..40)
            .map(|i| quote(if i % 2 == 0 { "A" } else { "B" }, if i % 2 == 0 { 0.9 } else { -0.9 }))
            .collect();
        let (kept, report) = detect_and_filter(quotes, 2, 0.0).unwrap();
        assert_eq!(kept.len(), 40);
        assert!(report.tested.iter().all(|t| !t.excluded));
    }

    #[test]
    fn excluded_iff_p_below_alpha_and_whole_outlets_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut quotes = Vec::new();
        for i in 0..10 {
            for _ in 0..30 {
                quotes.push(quote(&format!("o{i}"), rng.gen_range(-0.5..0.5)));
            }
        }
        let total = quotes.len();
        let (kept, report) = detect_and_filter(quotes, 10, 0.05).unwrap();
        for t in &report.tested {
            assert_eq!(t.excluded, t.p < report.alpha);
        }
        // no partial outlet removal
        let removed: usize = report.tested.iter().filter(|t| t.excluded).map(|t| t.n).sum();
        assert_eq!(kept.len() + removed, total);
    }

    /// With all outlets drawn identically, exclusions should appear at about
    /// the alpha rate — this checks the p-values are calibrated.
    #[test]
    fn null_exclusion_rate_matches_alpha() {
        let runs = 200;
        let outlets = 30;
        let per_outlet = 80;
        let mut total_excluded = 0usize;
        for run in 0..runs {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + run);
            let mut quotes = Vec::new();
            for i in 0..outlets {
                for _ in 0..per_outlet {
                    quotes.push(quote(&format!("o{i:02}"), rng.gen_range(-1.0..1.0)));
                }
            }
            let (_, report) = detect_and_filter(quotes, outlets, 0.05).unwrap();
            total_excluded += report.tested.iter().filter(|t| t.excluded).count();
        }
        let mean = total_excluded as f64 / runs as f64;
        // expected ~ alpha * outlets = 1.5
        assert!((0.9..=2.1).contains(&mean), "mean exclusions per run = {mean}");
    }

    #[test]
    fn moments_path_agrees_with_slice_welch() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a: Vec<f64> = (0..rng.gen_range(5..40)).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b: Vec<f64> = (0..rng.gen_range(5..40)).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let direct = welch_t_test(&a, &b).unwrap();
            let (n1, m1, v1) = {
                let n = a.len() as f64;
                let m = a.iter().sum::<f64>() / n;
                (n, m, a.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0))
            };
            let (n2, m2, v2) = {
                let n = b.len() as f64;
                let m = b.iter().sum::<f64>() / n;
                (n, m, b.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0))
            };
            let via_moments = welch_from_moments(n1, m1, v1, n2, m2, v2);
            assert_relative_eq!(direct.t, via_moments.t, epsilon = 1e-12);
            assert_relative_eq!(direct.p, via_moments.p, epsilon = 1e-12);
        }
    }
}

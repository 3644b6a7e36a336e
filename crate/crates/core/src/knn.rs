//! KNN regression over distribution space: rank training cells by KL
//! divergence from the test cell's sentiment histogram, then average their
//! survey distributions with normalized inverse-divergence weights.

use serde::{Deserialize, Serialize};

use crate::country::CountryCode;
use crate::distribution::{kl_divergence, Sample, SurveyDistribution};
use crate::error::{Error, Result};

/// Guard added to divergences before inversion so an exact histogram match
/// (divergence 0) yields a huge but finite similarity.
pub const SIMILARITY_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnConfig {
    /// Number of neighbors; silently capped at the training-set size.
    pub k: usize,
    /// Additive smoothing for KL divergence and for predictions.
    pub epsilon: f64,
    /// Similarity multiplier (>= 1) for training samples whose country is
    /// `lambda_country`.
    pub lambda: f64,
    pub lambda_country: Option<CountryCode>,
}

impl KnnConfig {
    pub fn new(k: usize) -> Result<Self> {
        KnnConfig { k, epsilon: 1e-9, lambda: 1.0, lambda_country: None }.validated()
    }

    pub fn with_lambda(mut self, lambda: f64, country: CountryCode) -> Result<Self> {
        self.lambda = lambda;
        self.lambda_country = Some(country);
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if self.lambda < 1.0 || !self.lambda.is_finite() {
            return Err(Error::InvalidConfig(format!("lambda must be >= 1, got {}", self.lambda)));
        }
        if self.epsilon < 0.0 || !self.epsilon.is_finite() {
            return Err(Error::InvalidConfig(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        Ok(self)
    }
}

/// One selected training neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub sample_index: usize,
    pub divergence: f64,
    /// Normalized over the selected neighbors; sums to 1.
    pub weight: f64,
}

/// The min(k, |train|) training samples most similar to `test`, by
/// similarity λ_j / (D_KL(test ‖ train_j) + ε). Ties break toward the
/// smaller (country, year). Every training sample must carry a survey.
pub fn nearest_neighbors(test: &Sample, train: &[Sample], config: &KnnConfig) -> Result<Vec<Neighbor>> {
    if train.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    for s in train {
        if s.survey.is_none() {
            return Err(Error::InvalidInput(format!(
                "training sample ({}, {}) has no survey ground truth",
                s.country, s.year
            )));
        }
    }

    let mut scored: Vec<(usize, f64, f64)> = Vec::with_capacity(train.len());
    for (j, s) in train.iter().enumerate() {
        let d = kl_divergence(
            test.histogram.probabilities(),
            s.histogram.probabilities(),
            config.epsilon,
        )?;
        let boost = match config.lambda_country {
            Some(c) if s.country == c => config.lambda,
            _ => 1.0,
        };
        let similarity = boost / (d + SIMILARITY_EPSILON);
        scored.push((j, d, similarity));
    }

    scored.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .expect("similarities are finite")
            .then_with(|| train[a.0].key().cmp(&train[b.0].key()))
    });
    scored.truncate(config.k.min(train.len()));

    let total: f64 = scored.iter().map(|(_, _, s)| s).sum();
    Ok(scored
        .into_iter()
        .map(|(j, d, s)| Neighbor { sample_index: j, divergence: d, weight: s / total })
        .collect())
}

/// Predict the survey distribution for `test`: the weighted average of the
/// selected neighbors' surveys, epsilon-smoothed so every category stays
/// strictly positive, then renormalized.
pub fn predict(test: &Sample, train: &[Sample], config: &KnnConfig) -> Result<SurveyDistribution> {
    let neighbors = nearest_neighbors(test, train, config)?;
    predict_from_neighbors(&neighbors, train, config.epsilon)
}

pub fn predict_from_neighbors(
    neighbors: &[Neighbor],
    train: &[Sample],
    epsilon: f64,
) -> Result<SurveyDistribution> {
    let mut acc = [0.0f64; 4];
    for nb in neighbors {
        let survey = train[nb.sample_index]
            .survey
            .as_ref()
            .expect("verified by nearest_neighbors");
        for (a, p) in acc.iter_mut().zip(survey.probs()) {
            *a += nb.weight * p;
        }
    }
    let total: f64 = acc.iter().sum::<f64>() + 4.0 * epsilon;
    SurveyDistribution::new([
        (acc[0] + epsilon) / total,
        (acc[1] + epsilon) / total,
        (acc[2] + epsilon) / total,
        (acc[3] + epsilon) / total,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::build_histogram;
    use approx::assert_relative_eq;

    fn sample(country: &str, year: i32, scores: &[f64], survey: Option<[f64; 4]>) -> Sample {
        Sample {
            country: CountryCode::parse(country).unwrap(),
            year,
            n_quotes: scores.len(),
            histogram: build_histogram(scores, 4).unwrap(),
            survey: survey.map(|p| SurveyDistribution::new(p).unwrap()),
        }
    }

    #[test]
    fn weights_are_normalized_inverse_divergences() {
        let test = sample("FR", 2016, &[-0.9, -0.3, 0.3, 0.9], None);
        let d = |s: &Sample| {
            kl_divergence(test.histogram.probabilities(), s.histogram.probabilities(), 1e-9).unwrap()
        };
        let a = sample("DE", 2016, &[-0.9, -0.9, -0.3, 0.3, 0.9, 0.9], Some([0.4, 0.3, 0.2, 0.1]));
        let b = sample("IT", 2016, &[-0.9, -0.3, -0.3, 0.3, 0.9], Some([0.1, 0.2, 0.3, 0.4]));
        let (da, db) = (d(&a), d(&b));
        assert!(da != db);
        let config = KnnConfig::new(2).unwrap();
        let neighbors = nearest_neighbors(&test, &[a, b], &config).unwrap();
        // closest first, weights = normalized inverse (divergence + guard)
        let (sa, sb) = (1.0 / (da + SIMILARITY_EPSILON), 1.0 / (db + SIMILARITY_EPSILON));
        let closest = if da < db { 0 } else { 1 };
        assert_eq!(neighbors[0].sample_index, closest);
        assert_relative_eq!(neighbors[0].weight, sa.max(sb) / (sa + sb), epsilon = 1e-12);
        assert_relative_eq!(neighbors[0].weight + neighbors[1].weight, 1.0, epsilon = 1e-12);
        assert!(neighbors[0].weight > neighbors[1].weight);
    }

    #[test]
    fn synthetic_divergence_weights() {
        // weights for divergences {0.1, 0.3} normalize to (0.75, 0.25)
        let s = [1.0 / 0.1, 1.0 / 0.3];
        let w0 = s[0] / (s[0] + s[1]);
        assert_relative_eq!(w0, 0.75, epsilon = 1e-12);
    }

    #[test]
    fn k1_selects_identical_histogram_with_weight_one() {
        let test = sample("FR", 2016, &[-0.5, 0.0, 0.5], None);
        let twin = sample("DE", 2017, &[-0.5, 0.0, 0.5], Some([0.2, 0.3, 0.3, 0.2]));
        let far = sample("IT", 2018, &[0.9, 0.9, 0.9], Some([0.1, 0.1, 0.1, 0.7]));
        let neighbors =
            nearest_neighbors(&test, &[far, twin.clone()], &KnnConfig::new(1).unwrap()).unwrap();
        assert_eq!(neighbors.len(), 1);
        assert_eq!(neighbors[0].sample_index, 1);
        assert_eq!(neighbors[0].divergence, 0.0);
        assert_eq!(neighbors[0].weight, 1.0);

        let pred = predict(&test, &[twin.clone()], &KnnConfig::new(1).unwrap()).unwrap();
        for (p, q) in pred.probs().iter().zip(twin.survey.unwrap().probs()) {
            assert_relative_eq!(p, &q, epsilon = 1e-6);
        }
    }

    #[test]
    fn weighted_average_prediction_hand_value() {
        let neighbors = [
            Neighbor { sample_index: 0, divergence: 0.1, weight: 0.75 },
            Neighbor { sample_index: 1, divergence: 0.3, weight: 0.25 },
        ];
        let train = [
            sample("DE", 2016, &[0.0], Some([0.1, 0.2, 0.3, 0.4])),
            sample("IT", 2016, &[0.0], Some([0.4, 0.3, 0.2, 0.1])),
        ];
        let pred = predict_from_neighbors(&neighbors, &train, 0.0).unwrap();
        let expected = [0.175, 0.225, 0.275, 0.325];
        for (p, e) in pred.probs().iter().zip(expected) {
            assert_relative_eq!(p, &e, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_surveys_predict_that_survey() {
        let survey = [0.3, 0.3, 0.2, 0.2];
        let train: Vec<Sample> = (0..6)
            .map(|i| {
                sample(
                    CountryCode::nth(i).unwrap().as_str(),
                    2016,
                    &[-0.8 + 0.3 * i as f64, 0.1 * i as f64],
                    Some(survey),
                )
            })
            .collect();
        let test = sample("FR", 2019, &[0.2, -0.2, 0.6], None);
        for k in 1..=6 {
            let pred = predict(&test, &train, &KnnConfig::new(k).unwrap()).unwrap();
            for (p, e) in pred.probs().iter().zip(survey) {
                assert_relative_eq!(p, &e, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn prediction_is_convex_combination() {
        let train = [
            sample("DE", 2016, &[-0.9, -0.5], Some([0.5, 0.3, 0.1, 0.1])),
            sample("IT", 2016, &[0.1, 0.2], Some([0.1, 0.2, 0.3, 0.4])),
            sample("SE", 2016, &[0.8, 0.9], Some([0.0, 0.1, 0.4, 0.5])),
        ];
        let test = sample("FR", 2016, &[0.0, 0.3], None);
        let pred = predict(&test, &train, &KnnConfig::new(3).unwrap()).unwrap();
        for (i, p) in pred.probs().iter().enumerate() {
            let lo = train.iter().map(|s| s.survey.as_ref().unwrap().probs()[i]).fold(f64::MAX, f64::min);
            let hi = train.iter().map(|s| s.survey.as_ref().unwrap().probs()[i]).fold(f64::MIN, f64::max);
            assert!(*p >= lo - 1e-6 && *p <= hi + 1e-6, "entry {i}: {p} not in [{lo}, {hi}]");
        }
    }

    #[test]
    fn lambda_boost_promotes_same_country() {
        let fr = CountryCode::parse("FR").unwrap();
        // FR sample is farther in divergence, but a large lambda must rank it first.
        let test = sample("FR", 2019, &[-0.5, 0.0, 0.5], None);
        let close = sample("DE", 2016, &[-0.5, 0.0, 0.5], Some([0.25; 4]));
        let far_fr = sample("FR", 2016, &[0.7, 0.8, 0.9], Some([0.1, 0.1, 0.3, 0.5]));
        let train = vec![close, far_fr];

        let plain = KnnConfig::new(1).unwrap();
        let picked = nearest_neighbors(&test, &train, &plain).unwrap();
        assert_eq!(picked[0].sample_index, 0);

        let boosted = KnnConfig::new(1).unwrap().with_lambda(1e12, fr).unwrap();
        let picked = nearest_neighbors(&test, &train, &boosted).unwrap();
        assert_eq!(picked[0].sample_index, 1);
    }

    #[test]
    fn lambda_rank_monotonicity() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let fr = CountryCode::parse("FR").unwrap();
        for _ in 0..50 {
            let test = sample("FR", 2020, &random_scores(&mut rng), None);
            let train: Vec<Sample> = (0..12)
                .map(|i| {
                    let other = CountryCode::nth(i).unwrap();
                    let country = if i % 3 == 0 { "FR" } else { other.as_str() };
                    sample(country, 2000 + i as i32, &random_scores(&mut rng), Some([0.25; 4]))
                })
                .collect();
            let ranks = |lambda: f64| -> Vec<usize> {
                let mut config = KnnConfig::new(train.len()).unwrap();
                if lambda > 1.0 {
                    config = config.with_lambda(lambda, fr).unwrap();
                }
                let nbs = nearest_neighbors(&test, &train, &config).unwrap();
                let mut rank_of = vec![0; train.len()];
                for (rank, nb) in nbs.iter().enumerate() {
                    rank_of[nb.sample_index] = rank;
                }
                rank_of
            };
            let base = ranks(1.0);
            let boosted = ranks(3.0);
            for (j, s) in train.iter().enumerate() {
                if s.country == fr {
                    assert!(boosted[j] <= base[j], "sample {j} dropped rank under lambda");
                }
            }
        }

        fn random_scores(rng: &mut impl rand::Rng) -> Vec<f64> {
            (0..rng.gen_range(5..30)).map(|_| rng.gen_range(-1.0..1.0)).collect()
        }
    }

    #[test]
    fn uniform_similarity_scaling_changes_nothing() {
        // When every training sample gets the same lambda boost the weights
        // and the prediction are unchanged: similarity scale cancels.
        let de = CountryCode::parse("DE").unwrap();
        let train = [
            sample("DE", 2015, &[-0.6, -0.1], Some([0.4, 0.3, 0.2, 0.1])),
            sample("DE", 2016, &[0.0, 0.4], Some([0.2, 0.2, 0.3, 0.3])),
            sample("DE", 2017, &[0.5, 0.8], Some([0.1, 0.1, 0.3, 0.5])),
        ];
        let test = sample("FR", 2019, &[0.1, -0.2, 0.4], None);
        let base_cfg = KnnConfig::new(2).unwrap();
        let scaled_cfg = KnnConfig::new(2).unwrap().with_lambda(7.5, de).unwrap();
        let base = nearest_neighbors(&test, &train, &base_cfg).unwrap();
        let scaled = nearest_neighbors(&test, &train, &scaled_cfg).unwrap();
        for (a, b) in base.iter().zip(&scaled) {
            assert_eq!(a.sample_index, b.sample_index);
            assert_relative_eq!(a.weight, b.weight, epsilon = 1e-12);
        }
        let p1 = predict(&test, &train, &base_cfg).unwrap();
        let p2 = predict(&test, &train, &scaled_cfg).unwrap();
        for (a, b) in p1.probs().iter().zip(p2.probs()) {
            assert_relative_eq!(a, &b, epsilon = 1e-12);
        }
    }

    #[test]
    fn empty_train_is_an_error() {
        let test = sample("FR", 2019, &[0.0], None);
        assert!(matches!(
            nearest_neighbors(&test, &[], &KnnConfig::new(1).unwrap()),
            Err(Error::EmptyTrainingSet)
        ));
    }

    #[test]
    fn train_without_survey_is_an_error() {
        let test = sample("FR", 2019, &[0.0], None);
        let train = [sample("DE", 2016, &[0.1], None)];
        assert!(nearest_neighbors(&test, &train, &KnnConfig::new(1).unwrap()).is_err());
    }

    #[test]
    fn k_capped_at_train_size() {
        let test = sample("FR", 2019, &[0.0], None);
        let train = [
            sample("DE", 2016, &[0.1], Some([0.25; 4])),
            sample("IT", 2016, &[0.2], Some([0.25; 4])),
        ];
        let nbs = nearest_neighbors(&test, &train, &KnnConfig::new(10).unwrap()).unwrap();
        assert_eq!(nbs.len(), 2);
    }

    #[test]
    fn ties_break_by_country_year() {
        let test = sample("FR", 2019, &[-0.5, 0.5], None);
        // Identical histograms => identical similarity; order must follow (country, year).
        let train = vec![
            sample("SE", 2016, &[-0.5, 0.5], Some([0.25; 4])),
            sample("AT", 2018, &[-0.5, 0.5], Some([0.25; 4])),
            sample("AT", 2015, &[-0.5, 0.5], Some([0.25; 4])),
        ];
        let nbs = nearest_neighbors(&test, &train, &KnnConfig::new(3).unwrap()).unwrap();
        let order: Vec<usize> = nbs.iter().map(|n| n.sample_index).collect();
        assert_eq!(order, vec![2, 1, 0]); // AT 2015, AT 2018, SE 2016
    }
}

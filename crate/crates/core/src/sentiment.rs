//! Sentiment scoring: a pluggable scorer interface with a lexicon baseline
//! and a pass-through mode for corpora that arrive pre-scored.

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::corpus::QuoteRecord;
use crate::error::{Error, Result};
use crate::exec;
use crate::text;

/// A sentiment degree in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct SentimentScore(f64);

impl SentimentScore {
    pub fn new(value: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&value) {
            return Err(Error::InvalidInput(format!("sentiment {value} outside [-1, 1]")));
        }
        Ok(SentimentScore(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Word-polarity lexicon with negation handling.
#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: HashMap<String, f64>,
    negators: HashSet<String>,
    negation_window: usize,
}

const DEFAULT_NEGATION_WINDOW: usize = 2;

impl Lexicon {
    pub fn new(
        entries: HashMap<String, f64>,
        negators: HashSet<String>,
        negation_window: usize,
    ) -> Result<Self> {
        if negation_window == 0 {
            return Err(Error::InvalidConfig("negation window must be at least 1".into()));
        }
        for (word, w) in &entries {
            if !(-1.0..=1.0).contains(w) {
                return Err(Error::InvalidConfig(format!(
                    "lexicon weight for {word:?} outside [-1, 1]: {w}"
                )));
            }
        }
        Ok(Lexicon {
            entries: entries.into_iter().map(|(k, v)| (k.to_lowercase(), v)).collect(),
            negators: negators.into_iter().map(|n| n.to_lowercase()).collect(),
            negation_window,
        })
    }

    /// Parse `word <TAB> weight` lines. Blank lines and lines starting with
    /// `#` are ignored.
    pub fn parse_tsv(tsv: &str, negators: &str, negation_window: usize) -> Result<Self> {
        let mut entries = HashMap::new();
        for (i, line) in tsv.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, weight) = line.split_once('\t').ok_or_else(|| {
                Error::InvalidConfig(format!("lexicon line {}: expected word<TAB>weight", i + 1))
            })?;
            let weight: f64 = weight.trim().parse().map_err(|_| {
                Error::InvalidConfig(format!("lexicon line {}: bad weight {weight:?}", i + 1))
            })?;
            entries.insert(word.trim().to_owned(), weight);
        }
        let negator_set = negators
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_owned)
            .collect();
        Lexicon::new(entries, negator_set, negation_window)
    }

    pub fn from_files(
        lexicon_path: impl AsRef<Path>,
        negators_path: impl AsRef<Path>,
        negation_window: usize,
    ) -> Result<Self> {
        let lex_path = lexicon_path.as_ref();
        let neg_path = negators_path.as_ref();
        let tsv = std::fs::read_to_string(lex_path).map_err(|e| Error::io(lex_path, e))?;
        let negs = std::fs::read_to_string(neg_path).map_err(|e| Error::io(neg_path, e))?;
        Lexicon::parse_tsv(&tsv, &negs, negation_window)
    }

    /// The English polarity list bundled with the crate.
    pub fn bundled() -> &'static Lexicon {
        static BUNDLED: OnceLock<Lexicon> = OnceLock::new();
        BUNDLED.get_or_init(|| {
            Lexicon::parse_tsv(
                include_str!("../data/lexicon.tsv"),
                include_str!("../data/negators.txt"),
                DEFAULT_NEGATION_WINDOW,
            )
            .expect("bundled lexicon is valid")
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Outcome of scoring one text.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredText {
    pub score: SentimentScore,
    /// Number of lexicon words that matched.
    pub matched: usize,
}

impl ScoredText {
    /// No lexicon word matched; the neutral 0 is a fallback, not a judgment.
    pub fn is_uncovered(&self) -> bool {
        self.matched == 0
    }
}

/// Score one text: the mean polarity of matched lexicon words, each
/// sign-flipped when a negator appears within the negation window before it,
/// clamped to [-1, 1]. Unmatched text scores 0 and is flagged uncovered.
pub fn score_quote(quote_text: &str, lexicon: &Lexicon) -> ScoredText {
    let tokens = text::tokenize_lower(quote_text);
    let mut sum = 0.0;
    let mut matched = 0usize;
    for (i, tok) in tokens.iter().enumerate() {
        if let Some(&weight) = lexicon.entries.get(tok.as_str()) {
            let window_start = i.saturating_sub(lexicon.negation_window);
            let negated = tokens[window_start..i]
                .iter()
                .any(|t| lexicon.negators.contains(t.as_str()));
            sum += if negated { -weight } else { weight };
            matched += 1;
        }
    }
    let value = (sum / matched.max(1) as f64).clamp(-1.0, 1.0);
    ScoredText { score: SentimentScore::new(value).expect("clamped"), matched }
}

/// How quote records receive their sentiment.
pub enum Scorer {
    /// Score every record's text with the lexicon, overwriting any existing
    /// score.
    Lexicon(Lexicon),
    /// Keep pre-assigned scores; fail if any record lacks one.
    Passthrough,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreStats {
    pub scored: usize,
    /// Records whose text matched no lexicon word (lexicon mode only).
    pub uncovered: usize,
}

/// Ensure every record carries a sentiment score.
pub fn score_corpus(quotes: Vec<QuoteRecord>, scorer: &Scorer) -> Result<(Vec<QuoteRecord>, ScoreStats)> {
    match scorer {
        Scorer::Lexicon(lexicon) => {
            let scored = exec::ordered_map(&quotes, |q| score_quote(&q.text, lexicon));
            let mut stats = ScoreStats { scored: quotes.len(), uncovered: 0 };
            let out = quotes
                .into_iter()
                .zip(scored)
                .map(|(mut q, s)| {
                    if s.is_uncovered() {
                        stats.uncovered += 1;
                    }
                    q.sentiment = Some(s.score.value());
                    q
                })
                .collect();
            Ok((out, stats))
        }
        Scorer::Passthrough => {
            let missing = quotes.iter().filter(|q| q.sentiment.is_none()).count();
            if missing > 0 {
                return Err(Error::MissingScores(missing));
            }
            let stats = ScoreStats { scored: quotes.len(), uncovered: 0 };
            Ok((quotes, stats))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lexicon(entries: &[(&str, f64)], negators: &[&str], window: usize) -> Lexicon {
        Lexicon::new(
            entries.iter().map(|(w, x)| (w.to_string(), *x)).collect(),
            negators.iter().map(|n| n.to_string()).collect(),
            window,
        )
        .unwrap()
    }

    #[test]
    fn averages_matched_words() {
        let lex = lexicon(&[("great", 0.8), ("ally", 0.4)], &[], 2);
        let s = score_quote("great ally", &lex);
        assert_eq!(s.score.value(), (0.8 + 0.4) / 2.0);
        assert_eq!(s.matched, 2);
    }

    #[test]
    fn negation_flips_sign_within_window() {
        let lex = lexicon(&[("great", 0.8)], &["not"], 2);
        assert_eq!(score_quote("not great", &lex).score.value(), -0.8);
        assert_eq!(score_quote("not at all great", &lex).score.value(), 0.8); // outside window 2
        assert_eq!(score_quote("not so great", &lex).score.value(), -0.8);
    }

    #[test]
    fn uncovered_text_is_neutral() {
        let lex = lexicon(&[("great", 0.8)], &[], 2);
        let s = score_quote("the the the", &lex);
        assert_eq!(s.score.value(), 0.0);
        assert!(s.is_uncovered());
    }

    #[test]
    fn scoring_is_case_insensitive_on_tokens() {
        let lex = lexicon(&[("great", 0.6)], &[], 2);
        assert_eq!(score_quote("GREAT, really Great!", &lex).matched, 2);
    }

    #[test]
    fn bundled_lexicon_loads_and_scores() {
        let lex = Lexicon::bundled();
        assert!(lex.len() > 500, "bundled lexicon unexpectedly small: {}", lex.len());
        let s = score_quote("a wonderful and generous ally", lex);
        assert!(s.score.value() > 0.0);
        let s = score_quote("a terrible, hostile threat", lex);
        assert!(s.score.value() < 0.0);
        let s = score_quote("not reliable", lex);
        assert!(s.score.value() < 0.0);
    }

    #[test]
    fn rejects_out_of_range_weights() {
        let r = Lexicon::new(
            [("broken".to_string(), 2.0)].into_iter().collect(),
            HashSet::new(),
            2,
        );
        assert!(r.is_err());
    }

    fn record(text: &str, sentiment: Option<f64>) -> QuoteRecord {
        QuoteRecord {
            quote_id: "q".into(),
            text: text.into(),
            speaker: None,
            outlet: "o".into(),
            date: "2017-01-01".into(),
            year: 2017,
            sentiment,
        }
    }

    #[test]
    fn lexicon_scorer_scores_everything() {
        let lex = lexicon(&[("great", 0.8)], &[], 2);
        let quotes = vec![record("great stuff", None), record("nothing here", None)];
        let (out, stats) = score_corpus(quotes, &Scorer::Lexicon(lex)).unwrap();
        assert!(out.iter().all(|q| q.sentiment.is_some()));
        assert_eq!(stats.uncovered, 1);
    }

    #[test]
    fn passthrough_is_identity_on_scored_corpus() {
        let quotes = vec![record("a", Some(0.25)), record("b", Some(-0.5))];
        let (out, _) = score_corpus(quotes.clone(), &Scorer::Passthrough).unwrap();
        assert_eq!(out, quotes);
    }

    #[test]
    fn passthrough_aborts_on_missing_scores() {
        let quotes = vec![record("a", Some(0.25)), record("b", None)];
        assert!(matches!(
            score_corpus(quotes, &Scorer::Passthrough),
            Err(Error::MissingScores(1))
        ));
    }

    proptest! {
        #[test]
        fn scores_stay_in_range_and_are_deterministic(text in ".{0,200}") {
            if text.trim().is_empty() { return Ok(()); }
            let lex = Lexicon::bundled();
            let a = score_quote(&text, lex);
            let b = score_quote(&text, lex);
            prop_assert_eq!(a, b);
            prop_assert!((-1.0..=1.0).contains(&a.score.value()));
        }

        #[test]
        fn polarity_swap_negates_scores(words in proptest::collection::vec("[a-z]{1,8}", 1..20)) {
            let base = lexicon(&[("good", 0.7), ("bad", -0.5), ("fine", 0.2)], &["not"], 2);
            let swapped = lexicon(&[("good", -0.7), ("bad", 0.5), ("fine", -0.2)], &["not"], 2);
            let text = words.join(" ");
            let a = score_quote(&text, &base);
            let b = score_quote(&text, &swapped);
            if !a.is_uncovered() {
                prop_assert_eq!(a.score.value(), -b.score.value());
            }
        }
    }
}

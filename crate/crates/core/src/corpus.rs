//! Quote corpus input: stream JSONL records, enrich the keyword list with
//! frequent speakers, and filter to topic-relevant quotes.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exec;
use crate::text;

/// One attributed quotation.
#[derive(Debug, Clone, PartialEq)]
pub struct QuoteRecord {
    pub quote_id: String,
    pub text: String,
    pub speaker: Option<String>,
    /// Media source domain or name.
    pub outlet: String,
    pub date: String,
    /// Calendar year extracted from `date`.
    pub year: i32,
    pub sentiment: Option<f64>,
}

/// Maps the JSONL field names of an input corpus onto [`QuoteRecord`]
/// fields, and bounds the accepted publication years.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusSchema {
    pub quote_id: String,
    pub text: String,
    pub speaker: String,
    pub date: String,
    /// May point at a plain string, a URL, or an array of URLs; URLs are
    /// reduced to their host with any `www.` prefix removed.
    pub outlet: String,
    pub sentiment: String,
    pub min_year: i32,
    pub max_year: i32,
}

impl Default for CorpusSchema {
    /// The Quotebank-shaped default: `quoteID`, `quotation`, `speaker`,
    /// `date`, `urls`, `sentiment`.
    fn default() -> Self {
        CorpusSchema {
            quote_id: "quoteID".into(),
            text: "quotation".into(),
            speaker: "speaker".into(),
            date: "date".into(),
            outlet: "urls".into(),
            sentiment: "sentiment".into(),
            min_year: 1900,
            max_year: 2100,
        }
    }
}

impl CorpusSchema {
    /// Schema of the files this pipeline writes between stages; identical to
    /// the default except the outlet is already a resolved string field.
    pub fn interchange() -> Self {
        CorpusSchema { outlet: "outlet".into(), ..CorpusSchema::default() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadStats {
    pub records: usize,
    pub malformed: usize,
    pub total_lines: usize,
}

/// Streaming reader over a JSONL quote file. Malformed lines are counted
/// and skipped; call [`QuoteReader::stats`] after exhaustion.
pub struct QuoteReader<R> {
    lines: std::io::Lines<BufReader<R>>,
    schema: CorpusSchema,
    stats: ReadStats,
}

impl QuoteReader<std::fs::File> {
    pub fn open(path: impl AsRef<Path>, schema: &CorpusSchema) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(QuoteReader {
            lines: BufReader::new(file).lines(),
            schema: schema.clone(),
            stats: ReadStats::default(),
        })
    }
}

impl<R: std::io::Read> QuoteReader<R> {
    pub fn stats(&self) -> ReadStats {
        self.stats
    }
}

impl<R: std::io::Read> Iterator for QuoteReader<R> {
    type Item = Result<QuoteRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(Error::io("<stream>", e))),
            };
            self.stats.total_lines += 1;
            match parse_record(&line, &self.schema) {
                Some(record) => {
                    self.stats.records += 1;
                    return Some(Ok(record));
                }
                None => self.stats.malformed += 1,
            }
        }
    }
}

/// Read a whole JSONL quote file, skipping malformed lines. Fails when more
/// than half of the lines are malformed, which signals a wrong schema.
pub fn read_quotes(path: impl AsRef<Path>, schema: &CorpusSchema) -> Result<(Vec<QuoteRecord>, ReadStats)> {
    let path = path.as_ref();
    let mut reader = QuoteReader::open(path, schema)?;
    let mut records = Vec::new();
    for item in &mut reader {
        records.push(item?);
    }
    let stats = reader.stats();
    if stats.malformed * 2 > stats.total_lines {
        return Err(Error::BadFormat {
            path: path.into(),
            malformed: stats.malformed,
            total: stats.total_lines,
        });
    }
    Ok((records, stats))
}

fn parse_record(line: &str, schema: &CorpusSchema) -> Option<QuoteRecord> {
    let value: Value = serde_json::from_str(line).ok()?;
    let obj = value.as_object()?;

    let text = obj.get(&schema.text)?.as_str()?;
    let text = text.trim();
    if text.is_empty() {
        return None;
    }

    let date = obj.get(&schema.date)?.as_str()?.trim().to_owned();
    let year = text::parse_year(&date)?;
    if year < schema.min_year || year > schema.max_year {
        return None;
    }

    let sentiment = match obj.get(&schema.sentiment) {
        None | Some(Value::Null) => None,
        Some(v) => {
            let s = v.as_f64()?;
            if !(-1.0..=1.0).contains(&s) {
                return None;
            }
            Some(s)
        }
    };

    let speaker = match obj.get(&schema.speaker) {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => {
            let s = s.trim();
            // Quotebank marks unattributed quotes with the literal "None".
            if s.is_empty() || s == "None" {
                None
            } else {
                Some(s.to_owned())
            }
        }
        Some(_) => return None,
    };

    let outlet = match obj.get(&schema.outlet) {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => resolve_outlet(s),
        Some(Value::Array(items)) => items
            .iter()
            .find_map(|v| v.as_str())
            .map(resolve_outlet)
            .unwrap_or_default(),
        Some(_) => return None,
    };

    let quote_id = obj
        .get(&schema.quote_id)
        .and_then(|v| v.as_str())
        .unwrap_or_default()
        .to_owned();

    Some(QuoteRecord {
        quote_id,
        text: text.to_owned(),
        speaker,
        outlet,
        date,
        year,
        sentiment,
    })
}

/// Reduce a URL to its host (minus `www.`); leave plain names untouched.
fn resolve_outlet(raw: &str) -> String {
    let raw = raw.trim();
    if raw.contains("://") {
        if let Ok(parsed) = url::Url::parse(raw) {
            if let Some(host) = parsed.host_str() {
                return host.strip_prefix("www.").unwrap_or(host).to_owned();
            }
        }
    }
    raw.to_owned()
}

/// How a keyword is matched against quote text. Both modes anchor on token
/// boundaries (the characters around the match must not be alphanumeric), so
/// "US" never matches inside "BUS" and "United States" matches as a phrase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchMode {
    /// Exact case: "US" matches "US" but not "us".
    CaseSensitive,
    /// Case-folded: "usa" matches "USA".
    CaseInsensitive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Keyword {
    pub pattern: String,
    pub mode: MatchMode,
}

impl Keyword {
    pub fn exact(pattern: impl Into<String>) -> Self {
        Keyword { pattern: pattern.into(), mode: MatchMode::CaseSensitive }
    }

    pub fn folded(pattern: impl Into<String>) -> Self {
        Keyword { pattern: pattern.into(), mode: MatchMode::CaseInsensitive }
    }

    fn normalized(&self) -> (MatchMode, String) {
        let pat = match self.mode {
            MatchMode::CaseSensitive => self.pattern.clone(),
            MatchMode::CaseInsensitive => self.pattern.to_lowercase(),
        };
        (self.mode, pat)
    }

    pub fn matches(&self, quote_text: &str) -> bool {
        match self.mode {
            MatchMode::CaseSensitive => bounded_occurrence(quote_text, &self.pattern),
            MatchMode::CaseInsensitive => {
                bounded_occurrence(&quote_text.to_lowercase(), &self.pattern.to_lowercase())
            }
        }
    }
}

/// Does `pattern` occur in `text` flanked by non-alphanumeric characters or
/// the string boundary?
fn bounded_occurrence(text: &str, pattern: &str) -> bool {
    if pattern.is_empty() {
        return false;
    }
    for (start, _) in text.match_indices(pattern) {
        let before_ok = text[..start]
            .chars()
            .next_back()
            .map_or(true, |c| !c.is_alphanumeric());
        let after_ok = text[start + pattern.len()..]
            .chars()
            .next()
            .map_or(true, |c| !c.is_alphanumeric());
        if before_ok && after_ok {
            return true;
        }
    }
    false
}

/// Base topic keywords plus speaker-derived enrichments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordSet {
    base: Vec<Keyword>,
    enriched: Vec<Keyword>,
}

impl KeywordSet {
    /// Build from base keywords. Duplicates (same pattern after per-mode
    /// normalization) are dropped, keeping the first occurrence.
    pub fn new(base: Vec<Keyword>) -> Result<Self> {
        if base.is_empty() {
            return Err(Error::InvalidConfig("keyword list must not be empty".into()));
        }
        let mut set = KeywordSet { base: Vec::new(), enriched: Vec::new() };
        let mut seen = HashSet::new();
        for kw in base {
            if seen.insert(kw.normalized()) {
                set.base.push(kw);
            }
        }
        Ok(set)
    }

    /// The United States keyword set used throughout the favorability study:
    /// "US" and "U.S." exact-case (to avoid the pronoun "us"), "USA" and
    /// "United States" case-folded.
    pub fn us_defaults() -> Self {
        KeywordSet::new(vec![
            Keyword::exact("US"),
            Keyword::exact("U.S."),
            Keyword::folded("USA"),
            Keyword::folded("United States"),
        ])
        .expect("static keyword list is valid")
    }

    pub fn base(&self) -> &[Keyword] {
        &self.base
    }

    pub fn enriched(&self) -> &[Keyword] {
        &self.enriched
    }

    pub fn iter(&self) -> impl Iterator<Item = &Keyword> {
        self.base.iter().chain(self.enriched.iter())
    }

    fn add_enriched(&mut self, kw: Keyword) {
        let norm = kw.normalized();
        let dup = self.iter().any(|k| k.normalized() == norm);
        if !dup {
            self.enriched.push(kw);
        }
    }

    pub fn matches(&self, quote_text: &str) -> bool {
        self.iter().any(|k| k.matches(quote_text))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnrichmentReport {
    /// Selected speakers with their quote counts, most frequent first.
    pub selected: Vec<(String, usize)>,
    /// Set when no quoted speaker overlapped the national speaker set.
    pub no_overlap: bool,
}

/// Extend `base` with the full and last names of the `top_n` most-quoted
/// speakers found in `national_speakers`. Ties on count break toward the
/// lexicographically smaller normalized name.
pub fn enrich_keywords(
    quotes: &[QuoteRecord],
    national_speakers: &HashSet<String>,
    top_n: usize,
    base: KeywordSet,
) -> Result<(KeywordSet, EnrichmentReport)> {
    if top_n == 0 {
        return Err(Error::InvalidConfig("top_n must be at least 1".into()));
    }
    let national: HashSet<String> = national_speakers.iter().map(|n| text::normalize_name(n)).collect();

    // normalized name -> (count, first-seen raw form)
    let mut counts: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for q in quotes {
        if let Some(raw) = &q.speaker {
            let norm = text::normalize_name(raw);
            if national.contains(&norm) {
                let entry = counts.entry(norm).or_insert_with(|| (0, raw.clone()));
                entry.0 += 1;
            }
        }
    }

    if counts.is_empty() {
        return Ok((base, EnrichmentReport { selected: Vec::new(), no_overlap: true }));
    }

    let mut ranked: Vec<(String, usize, String)> = counts
        .into_iter()
        .map(|(norm, (count, raw))| (norm, count, raw))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(top_n);

    let mut set = base;
    let mut report = EnrichmentReport::default();
    for (_, count, raw) in &ranked {
        set.add_enriched(Keyword::folded(raw.clone()));
        if let Some(last) = text::last_name(raw) {
            if last != raw {
                set.add_enriched(Keyword::folded(last));
            }
        }
        report.selected.push((raw.clone(), *count));
    }
    Ok((set, report))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterStats {
    pub kept: usize,
    pub dropped: usize,
}

/// Keep quotes matching at least one keyword, preserving input order.
pub fn filter_quotes(quotes: Vec<QuoteRecord>, keywords: &KeywordSet) -> (Vec<QuoteRecord>, FilterStats) {
    let flags = exec::ordered_map(&quotes, |q| keywords.matches(&q.text));
    let mut stats = FilterStats::default();
    let kept = quotes
        .into_iter()
        .zip(flags)
        .filter_map(|(q, keep)| {
            if keep {
                stats.kept += 1;
                Some(q)
            } else {
                stats.dropped += 1;
                None
            }
        })
        .collect();
    (kept, stats)
}

/// Wire form of a record in the interchange JSONL the pipeline stages write.
#[derive(Serialize)]
struct WireQuote<'a> {
    #[serde(rename = "quoteID")]
    quote_id: &'a str,
    quotation: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    speaker: Option<&'a str>,
    date: &'a str,
    outlet: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    sentiment: Option<f64>,
}

/// Write records as interchange JSONL (readable with
/// [`CorpusSchema::interchange`]).
pub fn write_quotes(quotes: &[QuoteRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for q in quotes {
        let wire = WireQuote {
            quote_id: &q.quote_id,
            quotation: &q.text,
            speaker: q.speaker.as_deref(),
            date: &q.date,
            outlet: &q.outlet,
            sentiment: q.sentiment,
        };
        serde_json::to_writer(&mut w, &wire).map_err(|e| Error::io(path, e.into()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema() -> CorpusSchema {
        CorpusSchema::default()
    }

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    const LINE_A: &str = r#"{"quoteID":"a","quotation":"The United States announced a plan.","speaker":"John Smith","date":"2017-03-01 10:00:00","urls":["https://www.example.com/a"]}"#;
    const LINE_B: &str = r#"{"quoteID":"b","quotation":"Let us go home.","speaker":"Ada Wong","date":"2018-07-12","urls":["http://news.example.org/b"]}"#;
    const LINE_C: &str = r#"{"quoteID":"c","quotation":"US policy shifted.","speaker":null,"date":"2019-01-05","urls":["https://example.net/c"]}"#;

    #[test]
    fn read_clean_file() {
        let f = write_temp(&format!("{LINE_A}\n{LINE_B}\n{LINE_C}\n"));
        let (records, stats) = read_quotes(f.path(), &schema()).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(stats, ReadStats { records: 3, malformed: 0, total_lines: 3 });
        assert_eq!(records[0].outlet, "example.com");
        assert_eq!(records[0].year, 2017);
        assert_eq!(records[2].speaker, None);
    }

    #[test]
    fn read_skips_truncated_line() {
        let f = write_temp(&format!("{LINE_A}\n{{\"quoteID\":\"x\",\"quot\n{LINE_B}\n"));
        let (records, stats) = read_quotes(f.path(), &schema()).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(stats.malformed, 1);
    }

    #[test]
    fn read_empty_file() {
        let f = write_temp("");
        let (records, stats) = read_quotes(f.path(), &schema()).unwrap();
        assert!(records.is_empty());
        assert_eq!(stats, ReadStats::default());
    }

    #[test]
    fn read_rejects_mostly_malformed() {
        let f = write_temp(&format!("nope\nstill nope\n{LINE_A}\n"));
        assert!(matches!(
            read_quotes(f.path(), &schema()),
            Err(Error::BadFormat { malformed: 2, total: 3, .. })
        ));
    }

    #[test]
    fn read_missing_file_is_io_error() {
        assert!(matches!(
            read_quotes("/nonexistent/nope.jsonl", &schema()),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn record_invariants_enforced_as_malformed() {
        // empty text, bad date, out-of-range sentiment
        let lines = [
            r#"{"quoteID":"1","quotation":"   ","date":"2017-01-01","urls":[]}"#,
            r#"{"quoteID":"2","quotation":"ok text","date":"someday","urls":[]}"#,
            r#"{"quoteID":"3","quotation":"ok text","date":"2017-01-01","urls":[],"sentiment":1.5}"#,
        ];
        for line in lines {
            assert!(parse_record(line, &schema()).is_none(), "{line}");
        }
    }

    #[test]
    fn year_window_is_enforced() {
        let narrow = CorpusSchema { min_year: 2015, max_year: 2020, ..schema() };
        let line = r#"{"quoteID":"1","quotation":"ok","date":"2010-01-01","urls":[]}"#;
        assert!(parse_record(line, &narrow).is_none());
        assert!(parse_record(line, &schema()).is_some());
    }

    #[test]
    fn keyword_matching_spec_examples() {
        let kws = KeywordSet::us_defaults();
        assert!(kws.matches("The United States announced a new policy"));
        assert!(!kws.matches("Let us go home"));
        assert!(!kws.matches("the u.s. position"));
        assert!(kws.matches("the U.S. position"));
    }

    #[test]
    fn case_sensitive_token_matching() {
        let us = Keyword::exact("US");
        assert!(us.matches("The US announced"));
        assert!(us.matches("backed by the US."));
        assert!(!us.matches("let us go"));
        assert!(!us.matches("the BUS was late"));
        assert!(!us.matches("USA today"));

        let usdot = Keyword::exact("U.S.");
        assert!(usdot.matches("The U.S. announced"));
        assert!(usdot.matches("went to the U.S.."));
        assert!(!usdot.matches("the u.s. announced"));
    }

    #[test]
    fn case_insensitive_phrase_matching() {
        let phrase = Keyword::folded("United States");
        assert!(phrase.matches("the united states of America"));
        assert!(phrase.matches("UNITED STATES policy"));
        assert!(!phrase.matches("unitedstates"));
        let name = Keyword::folded("Smith");
        assert!(name.matches("said Mr. Smith yesterday"));
        assert!(!name.matches("blacksmith"));
    }

    fn quote(speaker: Option<&str>, text: &str) -> QuoteRecord {
        QuoteRecord {
            quote_id: "q".into(),
            text: text.into(),
            speaker: speaker.map(String::from),
            outlet: "o".into(),
            date: "2017-01-01".into(),
            year: 2017,
            sentiment: None,
        }
    }

    #[test]
    fn enrichment_selects_frequent_national_speaker() {
        let mut quotes = Vec::new();
        for _ in 0..5 {
            quotes.push(quote(Some("John Smith"), "anything"));
        }
        for _ in 0..2 {
            quotes.push(quote(Some("Ada Wong"), "anything"));
        }
        let national: HashSet<String> = ["John Smith".to_string()].into();
        let (set, report) =
            enrich_keywords(&quotes, &national, 1, KeywordSet::us_defaults()).unwrap();
        assert!(!report.no_overlap);
        assert_eq!(report.selected, vec![("John Smith".to_string(), 5)]);
        let enriched: Vec<&str> = set.enriched().iter().map(|k| k.pattern.as_str()).collect();
        assert_eq!(enriched, vec!["John Smith", "Smith"]);
    }

    #[test]
    fn enrichment_empty_national_set() {
        let quotes = vec![quote(Some("John Smith"), "x")];
        let (set, report) =
            enrich_keywords(&quotes, &HashSet::new(), 3, KeywordSet::us_defaults()).unwrap();
        assert!(report.no_overlap);
        assert!(set.enriched().is_empty());
    }

    #[test]
    fn enrichment_tie_breaks_lexicographically() {
        let mut quotes = Vec::new();
        for _ in 0..3 {
            quotes.push(quote(Some("Zed Alpha"), "x"));
            quotes.push(quote(Some("Ann Beta"), "x"));
        }
        let national: HashSet<String> = ["Zed Alpha".to_string(), "Ann Beta".to_string()].into();
        let (_, report) =
            enrich_keywords(&quotes, &national, 1, KeywordSet::us_defaults()).unwrap();
        assert_eq!(report.selected, vec![("Ann Beta".to_string(), 3)]);
    }

    #[test]
    fn filter_keeps_matching_in_order() {
        let quotes = vec![
            quote(None, "The United States announced a plan"),
            quote(None, "Let us go home"),
            quote(None, "Allies of the US met"),
        ];
        let (kept, stats) = filter_quotes(quotes, &KeywordSet::us_defaults());
        assert_eq!(stats, FilterStats { kept: 2, dropped: 1 });
        assert_eq!(kept[0].quote_id, "q");
        assert_eq!(kept.len(), 2);
        assert!(kept[0].text.contains("United States"));
        assert!(kept[1].text.contains("US"));
    }

    #[test]
    fn filter_is_idempotent_and_monotone() {
        let quotes: Vec<QuoteRecord> = [
            "The US announced",
            "nothing relevant",
            "USA and more",
            "u.s. here",
            "plain text",
        ]
        .iter()
        .map(|t| quote(None, t))
        .collect();

        let small = KeywordSet::new(vec![Keyword::exact("US")]).unwrap();
        let big = KeywordSet::us_defaults();

        let (once, _) = filter_quotes(quotes.clone(), &big);
        let (twice, _) = filter_quotes(once.clone(), &big);
        assert_eq!(once, twice);

        let (kept_small, _) = filter_quotes(quotes.clone(), &small);
        let (kept_big, _) = filter_quotes(quotes, &big);
        for q in &kept_small {
            assert!(kept_big.contains(q));
        }
    }

    #[test]
    fn keyword_set_dedups_after_normalization() {
        let set = KeywordSet::new(vec![
            Keyword::folded("USA"),
            Keyword::folded("usa"),
            Keyword::exact("US"),
        ])
        .unwrap();
        assert_eq!(set.base().len(), 2);
        assert!(KeywordSet::new(vec![]).is_err());
    }

    #[test]
    fn interchange_round_trip() {
        let records = vec![
            quote(Some("Jane Doe"), "The US announced"),
            QuoteRecord { sentiment: Some(-0.25), ..quote(None, "USA again") },
        ];
        let f = tempfile::NamedTempFile::new().unwrap();
        write_quotes(&records, f.path()).unwrap();
        let (back, stats) = read_quotes(f.path(), &CorpusSchema::interchange()).unwrap();
        assert_eq!(stats.records, 2);
        assert_eq!(back, records);
    }
}

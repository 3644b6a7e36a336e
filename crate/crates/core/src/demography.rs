//! Speaker nationality lookup and quote attribution. Quotes by speakers
//! with several nationalities are counted once per country; quotes whose
//! speaker is unknown or unmatched are dropped.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::country::CountryCode;
use crate::corpus::QuoteRecord;
use crate::error::{Error, Result};
use crate::exec;
use crate::text;

/// At most this many nationalities per speaker; reference data beyond that
/// is almost always noise and would multiply quotes unreasonably.
pub const MAX_NATIONALITIES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeakerRecord {
    /// Normalized name, the lookup key.
    pub name: String,
    pub nationalities: Vec<CountryCode>,
}

/// Speaker nationality reference, keyed by normalized name.
#[derive(Debug, Clone, Default)]
pub struct SpeakerMap {
    map: HashMap<String, SpeakerRecord>,
}

impl SpeakerMap {
    pub fn get(&self, raw_name: &str) -> Option<&SpeakerRecord> {
        self.map.get(&text::normalize_name(raw_name))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Names holding a given nationality, e.g. the American speakers used
    /// for keyword enrichment.
    pub fn names_with_nationality(&self, country: CountryCode) -> Vec<String> {
        let mut names: Vec<String> = self
            .map
            .values()
            .filter(|r| r.nationalities.contains(&country))
            .map(|r| r.name.clone())
            .collect();
        names.sort();
        names
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeakerLoadStats {
    pub lines: usize,
    pub speakers: usize,
    /// Lines skipped over an invalid country code or shape.
    pub skipped: usize,
    /// Merges of a name that appeared on more than one line.
    pub merged: usize,
    /// Nationality lists truncated at [`MAX_NATIONALITIES`].
    pub capped: usize,
}

/// Load a `name <TAB> code[,code...]` TSV. Names are normalized; duplicate
/// names merge their nationality lists; invalid codes skip the line.
pub fn load_speakers(path: impl AsRef<Path>) -> Result<(SpeakerMap, SpeakerLoadStats)> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut map = SpeakerMap::default();
    let mut stats = SpeakerLoadStats::default();

    for line in std::io::BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        stats.lines += 1;
        let Some((raw_name, raw_codes)) = trimmed.split_once('\t') else {
            stats.skipped += 1;
            continue;
        };
        let name = text::normalize_name(raw_name);
        if name.is_empty() {
            stats.skipped += 1;
            continue;
        }
        let codes: Result<Vec<CountryCode>> = raw_codes
            .split(',')
            .map(|c| CountryCode::parse(c))
            .collect();
        let Ok(codes) = codes else {
            stats.skipped += 1;
            continue;
        };
        if codes.is_empty() {
            stats.skipped += 1;
            continue;
        }

        let entry = map.map.entry(name.clone()).or_insert_with(|| SpeakerRecord {
            name,
            nationalities: Vec::new(),
        });
        if !entry.nationalities.is_empty() {
            stats.merged += 1;
        }
        for code in codes {
            if entry.nationalities.contains(&code) {
                continue;
            }
            if entry.nationalities.len() == MAX_NATIONALITIES {
                stats.capped += 1;
                break;
            }
            entry.nationalities.push(code);
        }
    }
    stats.speakers = map.len();
    Ok((map, stats))
}

/// A quote attributed to one country of its speaker.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributedQuote {
    pub record: QuoteRecord,
    pub country: CountryCode,
    pub year: i32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributionStats {
    /// Quotes without any speaker.
    pub unknown_speaker: usize,
    /// Quotes whose speaker is absent from the reference table.
    pub unmatched_name: usize,
    pub attributed: usize,
}

/// Attach nationalities: a speaker with m nationalities yields m attributed
/// copies; quotes with an unknown or unmatched speaker are dropped (counted,
/// not errors). Output preserves input order.
pub fn attribute(quotes: Vec<QuoteRecord>, speakers: &SpeakerMap) -> (Vec<AttributedQuote>, AttributionStats) {
    enum Outcome {
        Unknown,
        Unmatched,
        Countries(Vec<CountryCode>),
    }

    let outcomes = exec::ordered_map(&quotes, |q| match &q.speaker {
        None => Outcome::Unknown,
        Some(name) => match speakers.get(name) {
            None => Outcome::Unmatched,
            Some(rec) => Outcome::Countries(rec.nationalities.clone()),
        },
    });

    let mut stats = AttributionStats::default();
    let mut out = Vec::new();
    for (q, outcome) in quotes.into_iter().zip(outcomes) {
        match outcome {
            Outcome::Unknown => stats.unknown_speaker += 1,
            Outcome::Unmatched => stats.unmatched_name += 1,
            Outcome::Countries(countries) => {
                let year = q.year;
                for country in countries {
                    out.push(AttributedQuote { record: q.clone(), country, year });
                }
            }
        }
    }
    stats.attributed = out.len();
    (out, stats)
}

/// Interchange JSONL for attributed quotes: the quote fields plus `country`.
#[derive(Serialize, Deserialize)]
struct WireAttributed {
    #[serde(rename = "quoteID")]
    quote_id: String,
    quotation: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    speaker: Option<String>,
    date: String,
    outlet: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    sentiment: Option<f64>,
    country: CountryCode,
    year: i32,
}

pub fn write_attributed(quotes: &[AttributedQuote], path: impl AsRef<Path>) -> Result<()> {
    use std::io::Write as _;
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for q in quotes {
        let wire = WireAttributed {
            quote_id: q.record.quote_id.clone(),
            quotation: q.record.text.clone(),
            speaker: q.record.speaker.clone(),
            date: q.record.date.clone(),
            outlet: q.record.outlet.clone(),
            sentiment: q.record.sentiment,
            country: q.country,
            year: q.year,
        };
        serde_json::to_writer(&mut w, &wire).map_err(|e| Error::io(path, e.into()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

pub fn read_attributed(path: impl AsRef<Path>) -> Result<Vec<AttributedQuote>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let wire: WireAttributed = serde_json::from_str(&line).map_err(|e| {
            Error::InvalidInput(format!("{} line {}: {e}", path.display(), i + 1))
        })?;
        out.push(AttributedQuote {
            record: QuoteRecord {
                quote_id: wire.quote_id,
                text: wire.quotation,
                speaker: wire.speaker,
                outlet: wire.outlet,
                year: wire.year,
                date: wire.date,
                sentiment: wire.sentiment,
            },
            country: wire.country,
            year: wire.year,
        });
    }
    Ok(out)
}

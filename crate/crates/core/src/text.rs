//! Small text helpers shared by the corpus, sentiment, and demography stages.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Split on Unicode whitespace and punctuation. Tokens are maximal runs of
/// alphanumeric characters; everything else is a separator. No stemming.
pub fn tokenize(text: &str) -> Vec<&str> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .collect()
}

/// Lowercased tokens, for lexicon lookup.
pub fn tokenize_lower(text: &str) -> Vec<String> {
    tokenize(text).into_iter().map(|t| t.to_lowercase()).collect()
}

/// Canonical form used to match speaker names across data sources:
/// case-folded, diacritics stripped, internal whitespace collapsed to a
/// single space, leading/trailing whitespace removed.
pub fn normalize_name(name: &str) -> String {
    let stripped: String = name
        .nfd()
        .filter(|c| !is_combining_mark(*c))
        .collect::<String>()
        .to_lowercase();
    stripped.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Last whitespace-separated component of a name, e.g. "Smith" for
/// "John Smith". Returns the whole name when it has a single component.
pub fn last_name(name: &str) -> Option<&str> {
    name.split_whitespace().last()
}

/// Extract the calendar year from a date string. Accepts `YYYY-MM-DD`,
/// `YYYY-MM-DD HH:MM:SS`, RFC 3339 timestamps, and a bare `YYYY`.
pub fn parse_year(date: &str) -> Option<i32> {
    let s = date.trim();
    if s.len() >= 10 {
        if let Ok(d) = chrono::NaiveDate::parse_from_str(&s[..10], "%Y-%m-%d") {
            return Some(chrono::Datelike::year(&d));
        }
    }
    if s.len() == 4 && s.bytes().all(|b| b.is_ascii_digit()) {
        return s.parse().ok();
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenize_splits_on_punctuation_and_whitespace() {
        assert_eq!(tokenize("The U.S. announced—today!"), vec!["The", "U", "S", "announced", "today"]);
        assert_eq!(tokenize(""), Vec::<&str>::new());
        assert_eq!(tokenize("  ,, .."), Vec::<&str>::new());
    }

    #[test]
    fn normalize_name_folds_case_space_diacritics() {
        assert_eq!(normalize_name("  José   GARCÍA "), "jose garcia");
        assert_eq!(normalize_name("François\tHollande"), "francois hollande");
        assert_eq!(normalize_name("John Smith"), "john smith");
    }

    #[test]
    fn last_name_takes_final_component() {
        assert_eq!(last_name("John Ronald Reuel Tolkien"), Some("Tolkien"));
        assert_eq!(last_name("Cher"), Some("Cher"));
        assert_eq!(last_name("   "), None);
    }

    #[test]
    fn parse_year_handles_common_shapes() {
        assert_eq!(parse_year("2017-06-01 00:00:00"), Some(2017));
        assert_eq!(parse_year("2020-12-31"), Some(2020));
        assert_eq!(parse_year("1999"), Some(1999));
        assert_eq!(parse_year("not a date"), None);
        assert_eq!(parse_year("2020-13-45"), None);
    }
}

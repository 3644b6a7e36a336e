// Temporary sweep for the bias-detection config. Not shipped.

use quotecast_core::bias::detect_and_filter;
use quotecast_core::corpus::QuoteRecord;
use quotecast_core::synth::{generate_dataset, BiasedOutlet, SynthConfig};

fn main() {
    for &noise in &[0.2, 0.25, 0.3] {
        for &qpc in &[60u32, 100u32] {
            let mut exact = 0;
            let mut extra = 0;
            let mut missed = 0;
            for seed in 0..30u64 {
                let config = SynthConfig {
                    n_countries: 10,
                    years: 2016..=2018,
                    quotes_per_cell: qpc..=qpc,
                    noise,
                    persistence: 0.9,
                    n_outlets: 30,
                    biased_outlets: vec![BiasedOutlet { name: "skewed-news".into(), shift: 0.4 }],
                    seed: 4200 + seed,
                    ..SynthConfig::default()
                };
                let data = generate_dataset(&config).unwrap();
                let quotes = to_quotes(&data);
                let (_, report) = detect_and_filter(quotes, 30, 0.05).unwrap();
                let excluded: Vec<&str> = report
                    .tested
                    .iter()
                    .filter(|t| t.excluded)
                    .map(|t| t.outlet.as_str())
                    .collect();
                if excluded == ["skewed-news"] {
                    exact += 1;
                } else if excluded.contains(&"skewed-news") {
                    extra += 1;
                } else {
                    missed += 1;
                }
            }
            println!("noise {noise} qpc {qpc}: exact {exact}/30, extra-FP {extra}, missed {missed}");
        }
    }
}

fn to_quotes(data: &quotecast_core::synth::SynthDataset) -> Vec<QuoteRecord> {
    let mut quotes = Vec::new();
    for c in &data.cells {
        for (i, (&s, &o)) in c.scores.iter().zip(&c.outlets).enumerate() {
            quotes.push(QuoteRecord {
                quote_id: format!("{}-{}-{}", c.country, c.year, i),
                text: "t".into(),
                speaker: None,
                outlet: data.outlet_names[o as usize].clone(),
                date: format!("{}-01-01", c.year),
                year: c.year,
                sentiment: Some(s),
            });
        }
    }
    quotes
}

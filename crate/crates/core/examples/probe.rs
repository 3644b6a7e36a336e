// Temporary empirical probe for tuning acceptance thresholds. Not shipped.

use quotecast_core::bias::detect_and_filter;
use quotecast_core::corpus::QuoteRecord;
use quotecast_core::evaluation::{correlate_loss_quotes, loco_evaluate, scv_evaluate_all, EvalOptions};
use quotecast_core::synth::{generate_dataset, BiasedOutlet, SynthConfig};

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "all".into());
    if which == "dir" || which == "all" {
        probe_directional();
    }
    if which == "corr" || which == "all" {
        probe_correlation();
    }
    if which == "bias" || which == "all" {
        probe_bias();
    }
}

fn probe_directional() {
    println!("=== criterion 4: LOCO vs SCV medians (20c x 6y, 1500 q/cell, rho .9, sigma .35) ===");
    let mut ok = 0;
    for seed in 42..52u64 {
        let t0 = std::time::Instant::now();
        let config = SynthConfig {
            n_countries: 20,
            years: 2015..=2020,
            quotes_per_cell: 1500..=1500,
            noise: 0.35,
            persistence: 0.9,
            seed,
            ..SynthConfig::default()
        };
        let samples = generate_dataset(&config).unwrap().to_samples(20).unwrap();
        let opts = EvalOptions::default();
        let loco = loco_evaluate(&samples, 1..=9, &opts).unwrap();
        let scv = scv_evaluate_all(&samples, 1..=9, &[1.0, 1.25, 1.5, 2.0, 3.0, 5.0], &opts).unwrap();
        let pass = scv.summary.median < loco.summary.median
            && loco.summary.median < (4.0f64).ln()
            && scv.summary.median < (4.0f64).ln();
        ok += pass as u32;
        println!(
            "seed {seed}: loco median {:.4} q75 {:.4} | scv median {:.4} q75 {:.4} | pass {pass} | {:?}",
            loco.summary.median, loco.summary.q75, scv.summary.median, scv.summary.q75, t0.elapsed()
        );
    }
    println!("criterion 4 passes: {ok}/10");
}

fn probe_correlation() {
    println!("=== criterion 5: loss vs log10(n) correlation (quotes 50..5000) ===");
    let mut ok = 0;
    for seed in 42..52u64 {
        let config = SynthConfig {
            n_countries: 20,
            years: 2015..=2020,
            quotes_per_cell: 50..=5000,
            noise: 0.35,
            persistence: 0.9,
            seed,
            ..SynthConfig::default()
        };
        let samples = generate_dataset(&config).unwrap().to_samples(20).unwrap();
        let opts = EvalOptions::default();
        let loco = loco_evaluate(&samples, 1..=9, &opts).unwrap();
        let scv = scv_evaluate_all(&samples, 1..=9, &[1.0, 1.25, 1.5, 2.0, 3.0, 5.0], &opts).unwrap();
        let (rl, pl) = correlate_loss_quotes(&loco).unwrap();
        let (rs, ps) = correlate_loss_quotes(&scv).unwrap();
        let pass = rl < 0.0 && pl < 0.05 && rs < 0.0 && ps < 0.05;
        ok += pass as u32;
        println!("seed {seed}: loco r {rl:.3} p {pl:.2e} | scv r {rs:.3} p {ps:.2e} | pass {pass}");
    }
    println!("criterion 5 passes: {ok}/10");
}

fn probe_bias() {
    println!("=== criterion 6: bias detection (30 outlets, one +0.4) ===");
    let mut exact = 0;
    for seed in 42..52u64 {
        let config = SynthConfig {
            n_countries: 10,
            years: 2016..=2018,
            quotes_per_cell: 100..=100,
            noise: 0.25,
            persistence: 0.9,
            n_outlets: 30,
            biased_outlets: vec![BiasedOutlet { name: "skewed-news".into(), shift: 0.4 }],
            seed,
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
        let pass = excluded == ["skewed-news"];
        exact += pass as u32;
        println!("seed {seed}: excluded {excluded:?} pass {pass}");
    }
    println!("criterion 6 exact: {exact}/10");

    println!("--- null case: no injected bias ---");
    let mut total_false = 0usize;
    for seed in 42..52u64 {
        let config = SynthConfig {
            n_countries: 10,
            years: 2016..=2018,
            quotes_per_cell: 100..=100,
            noise: 0.25,
            persistence: 0.9,
            n_outlets: 30,
            seed,
            ..SynthConfig::default()
        };
        let data = generate_dataset(&config).unwrap();
        let quotes = to_quotes(&data);
        let (_, report) = detect_and_filter(quotes, 30, 0.05).unwrap();
        let n_excluded = report.tested.iter().filter(|t| t.excluded).count();
        total_false += n_excluded;
        println!("seed {seed}: false exclusions {n_excluded}");
    }
    println!("mean false exclusions: {:.2} (bound 3.5)", total_false as f64 / 10.0);
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

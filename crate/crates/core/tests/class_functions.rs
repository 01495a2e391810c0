use mcjscc::partition::{class_source_fn, PartitionSpec};
use mcjscc::{DiscreteSource, SourceChannelRatio};

/// `(1+ρ)/k · log Σ_{v ∈ A_i} P(v)^{1/(1+ρ)}` by summing over Hamming weights.
fn finite_class_fn(p: f64, k: usize, lo: f64, hi: f64, rho: f64) -> f64 {
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut terms = Vec::new();
    let mut ln_c = 0.0;
    for w in 0..=k {
        if w > 0 {
            ln_c += ((k - w + 1) as f64 / w as f64).ln();
        }
        let per_symbol = (w as f64 * lp + (k - w) as f64 * lq) / k as f64;
        if per_symbol > lo && per_symbol <= hi {
            terms.push(ln_c + k as f64 * per_symbol / (1.0 + rho));
        }
    }
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - top).exp()).sum();
    (1.0 + rho) * (top + sum.ln()) / k as f64
}

#[test]
fn finite_length_sums_approach_the_class_functions() {
    let src = DiscreteSource::bernoulli(0.1).unwrap();
    let t = SourceChannelRatio::new(1.0).unwrap();
    let part = PartitionSpec::from_thresholds(&src, t, vec![-0.9, -0.5]).unwrap();
    let bounds = [f64::NEG_INFINITY, -0.9, -0.5, 0.0];
    for class in 1..=2 {
        for rho in [0.25, 0.5, 1.0] {
            let limit = class_source_fn(&src, &part, class, rho).unwrap();
            let gaps: Vec<f64> = [250, 1000, 4000, 16000]
                .iter()
                .map(|&k| (finite_class_fn(0.1, k, bounds[class], bounds[class + 1], rho) - limit).abs())
                .collect();
            // the gap is dominated by (1+ρ)·ln(k)/(2k)
            for (g, k) in gaps.iter().zip([250.0f64, 1000.0, 4000.0, 16000.0]) {
                assert!(
                    *g <= 2.0 * (1.0 + rho) * k.ln() / k,
                    "class {class} rho {rho} k {k}: {g}"
                );
            }
            assert!(gaps[3] < 2e-3, "class {class} rho {rho}: {gaps:?}");
        }
    }
}

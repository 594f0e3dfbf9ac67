//! Generate result pages with a known conservative/liberal mix and check that
//! the measures recover it.
//!
//!     cargo run --example planted_bias -- [q_c] [q_l]

use serpbias::metrics::{bias_p_at_n, bias_rbp, Cutoff, Persistence};
use serpbias::stats::mean_bias;
use serpbias::synth::{generate_serp, PlantedBiasSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let q_c: f64 = args.next().map_or(Ok(0.6), |a| a.parse())?;
    let q_l: f64 = args.next().map_or(Ok(0.2), |a| a.parse())?;
    let spec = PlantedBiasSpec::new(q_c, q_l, 10, 42)?;
    let p = Persistence::default();

    let mut p_scores = Vec::new();
    let mut rbp_scores = Vec::new();
    for i in 0..10_000 {
        let labels = generate_serp(&spec, "synthetic", &format!("q{i}"))?.labels()?;
        p_scores.push(bias_p_at_n(&labels, Cutoff::TEN));
        rbp_scores.push(bias_rbp(&labels, p));
    }

    let planted = q_c - q_l;
    println!("planted q_c - q_l            {planted:+.4}");
    println!("mean P@10 bias               {:+.4}", mean_bias(&p_scores)?);
    println!(
        "mean RBP bias                {:+.4}  (expected {:+.4})",
        mean_bias(&rbp_scores)?,
        planted * (1.0 - p.get().powi(10))
    );

    // Same seed, same key: generation is reproducible.
    let again = generate_serp(&spec, "synthetic", "q0")?.labels()?;
    let mirrored = generate_serp(&spec.mirrored(), "synthetic", "q0")?.labels()?;
    println!();
    println!("q0          {:?}", again);
    println!("q0 mirrored {:?}", mirrored);
    Ok(())
}

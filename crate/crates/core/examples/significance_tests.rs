//! Mean bias, mean absolute bias and the t-tests behind them.
//!
//!     cargo run --example significance_tests

use serpbias::stats::{
    mean_absolute_bias, mean_bias, one_sample_ttest, paired_ttest, student_t_two_tailed_p,
    StatsError,
};

fn main() -> Result<(), StatsError> {
    // Two engines that both lean, but in opposite directions on different
    // queries: the signed mean hides what the absolute mean reveals.
    let engine_a = [0.4, -0.3, 0.5, -0.4, 0.3, -0.5, 0.2, -0.2];
    let engine_b = [0.1, 0.0, 0.2, -0.1, 0.1, 0.0, 0.1, 0.0];

    for (name, scores) in [("A", &engine_a[..]), ("B", &engine_b[..])] {
        let abs: Vec<f64> = scores.iter().map(|b: &f64| b.abs()).collect();
        let mb = one_sample_ttest(scores, 0.0, 0.05)?;
        let mab = one_sample_ttest(&abs, 0.0, 0.05)?;
        println!(
            "engine {name}: MB {:+.3} (t {:+.2}, p {:.4})   MAB {:.3} (t {:.2}, p {:.4}{})",
            mean_bias(scores)?,
            mb.t_statistic,
            mb.p_value_two_tailed,
            mean_absolute_bias(scores)?,
            mab.t_statistic,
            mab.p_value_two_tailed,
            if mab.reject_at_alpha { ", biased" } else { "" }
        );
    }

    let diff = paired_ttest(&engine_a, &engine_b, 0.05)?;
    println!(
        "paired A vs B: t {:+.3}, df {}, p {:.4}",
        diff.t_statistic, diff.degrees_of_freedom, diff.p_value_two_tailed
    );

    println!();
    println!("two-tailed p at familiar critical values:");
    for (t, df) in [
        (12.706, 1),
        (4.303, 2),
        (2.776, 4),
        (2.228, 10),
        (1.960, 100_000),
    ] {
        println!(
            "  t = {t:<7} df = {df:<6} p = {:.5}",
            student_t_two_tailed_p(t, df)
        );
    }

    println!();
    match one_sample_ttest(&[0.1, 0.1, 0.1], 0.0, 0.05) {
        Err(StatsError::ZeroVariance { constant }) => {
            println!("constant scores ({constant}) have no variance; the audit reports them as degenerate")
        }
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}

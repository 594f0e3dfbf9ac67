//! Score a handful of ranked lists under every bias measure.
//!
//!     cargo run --example quantify_bias

use serpbias::metrics::{dcg_bound, rbp_bound, Cutoff, MetricId, Persistence};
use serpbias::Perspective::{self, BothOrNeither as N, Conservative as C, Liberal as L};

fn show(labels: &[Perspective]) -> String {
    labels
        .iter()
        .map(|p| match p {
            C => 'C',
            L => 'L',
            N => '.',
        })
        .collect()
}

fn main() {
    let lists: [(&str, Vec<Perspective>); 5] = [
        (
            "conservative at the top",
            vec![C, C, C, N, L, L, L, N, N, N],
        ),
        (
            "same documents, reversed",
            vec![N, N, N, L, L, L, N, C, C, C],
        ),
        ("liberal only", vec![L; 10]),
        ("short list", vec![C, N, C]),
        ("balanced, interleaved", vec![C, L, C, L, C, L, C, L, C, L]),
    ];
    let metrics = [
        MetricId::PAtN(Cutoff::TEN),
        MetricId::Rbp(Persistence::default()),
        MetricId::DcgAtN(Cutoff::TEN),
        MetricId::PWholeList,
    ];

    print!("{:<28} {:<10}", "list", "labels");
    for m in &metrics {
        print!(" {:>9}", m.to_string());
    }
    println!();
    for (name, labels) in &lists {
        print!("{name:<28} {:<10}", show(labels));
        for m in &metrics {
            print!(" {:>9.4}", m.evaluate(labels));
        }
        println!();
    }

    // Positive scores lean conservative, negative lean liberal. P@n ignores
    // order inside the cut-off; RBP and DCG reward early positions, which is
    // why the interleaved list still scores above zero under them.
    println!();
    println!("|DCG@10| never exceeds {:.4}", dcg_bound(Cutoff::TEN));
    println!(
        "|RBP(0.8)| on a 10-document list never exceeds {:.4}",
        rbp_bound(Persistence::default(), 10)
    );
}

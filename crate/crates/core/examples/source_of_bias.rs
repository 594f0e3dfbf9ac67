//! Is the bias in an engine's top results already present in everything it
//! retrieved, or does the ranking put it there?
//!
//!     cargo run --example source_of_bias

use serpbias::domain::{Corpus, Perspective, QueryTopic, Serp};
use serpbias::{run_audit, AuditConfig};

use Perspective::{BothOrNeither as N, Conservative as C, Liberal as L};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut corpus = Corpus::new();
    for q in 0..25 {
        let id = format!("q{q:02}");
        corpus.add_query(QueryTopic::new(&id, format!("topic {q}"), None))?;

        // "ranker": a balanced pool with the conservative documents pushed up.
        let c_top = 6 + q % 4;
        let mut ranked = vec![C; c_top];
        ranked.resize(10, N);
        ranked.extend(std::iter::repeat_n(L, c_top));
        ranked.resize(60, N);
        corpus.add_serp(Serp::from_labels("ranker", &id, &ranked))?;

        // "mirror": the pool itself leans, and the top 10 simply reflect it.
        let pool: Vec<Perspective> = [C, N, C, L, C, N]
            .iter()
            .cycle()
            .skip(q)
            .take(60)
            .copied()
            .collect();
        corpus.add_serp(Serp::from_labels("mirror", &id, &pool))?;
    }

    let report = run_audit(&corpus, None, &AuditConfig::default())?;
    for s in &report.source_of_bias {
        println!("{}", s.engine_id);
        println!(
            "  top-10 P@10   MB {:+.3}  MAB {:.3}  ({})",
            s.top_n_mb, s.top_n_mab, s.top_n_mab_test
        );
        println!(
            "  whole list    MB {:+.3}  MAB {:.3}  ({})",
            s.whole_list_mb, s.whole_list_mab, s.whole_list_mab_test
        );
        println!(
            "  pearson {}  sign agreement {:.2}",
            s.pearson.map_or("n/a".into(), |r| format!("{r:+.3}")),
            s.sign_agreement
        );
        println!("  -> {}", s.verdict);
    }
    Ok(())
}

//! Monte Carlo tail estimates against the exact marginal `P(L1 >= n) = 0.4^n`.
//!
//! `cargo run --release --example monte_carlo -- 200 400000 7` runs 200
//! replications of 400000 steps with seed 7 and writes `tails.csv`.

use walk_decay::model::ModelSpec;
use walk_decay::report::fit_monte_carlo;
use walk_decay::verify::{simulate, solve_truncated, tail_rows, write_tail_csv};

fn main() -> walk_decay::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (reps, horizon, seed) = (
        args.first().copied().unwrap_or(100) as usize,
        args.get(1).copied().unwrap_or(400_000),
        args.get(2).copied().unwrap_or(1),
    );
    let model = ModelSpec::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/e1_model.json"))?;
    let sim = simulate(&model, reps, horizon, seed);
    let p = sim.tail_probability(1);
    for (n, pn) in p.iter().take(8).enumerate() {
        println!("P(L1 >= {n}) ≈ {pn:.6}   exact {:.6}", 0.4f64.powi(n as i32));
    }
    let fit = fit_monte_carlo(&sim, 1)?;
    println!(
        "fitted rate {:.4} on levels {:?} (exact {:.4})",
        -fit.slope,
        fit.window,
        2.5f64.ln()
    );

    let chain = solve_truncated(&model, 40)?;
    let rows = tail_rows(Some(&chain), Some(&sim), 1);
    write_tail_csv(std::fs::File::create("tails.csv")?, &rows)?;
    println!("wrote {} rows to tails.csv", rows.len());
    Ok(())
}

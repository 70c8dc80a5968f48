//! Writes `domain.svg`: level curves, the τ box, the convergence domain and rays.

use walk_decay::report::{parse_directions, plot_input, Input};

fn main() -> walk_decay::Result<()> {
    let input = Input::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/node1_batch.json"), true)?;
    let svg = plot_input(&input, &parse_directions("1,0;0,1;1,1;2,1")?)?;
    std::fs::write("domain.svg", &svg)?;
    println!("wrote domain.svg ({} bytes)", svg.len());
    Ok(())
}

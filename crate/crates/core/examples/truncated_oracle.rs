//! Stationary distribution on a finite grid and the fitted decay slopes.

use num_rational::Ratio;
use walk_decay::asymptotics::DomainDescription;
use walk_decay::geometry::GeometrySummary;
use walk_decay::model::ModelSpec;
use walk_decay::verify::{fit_decay, solve_truncated, FitMode};

fn main() -> walk_decay::Result<()> {
    let model = ModelSpec::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/e1_model.json"))?;
    let dom = DomainDescription::new(GeometrySummary::compute(&model.surfaces())?)?;
    let chain = solve_truncated(&model, 80)?;
    println!("N = {}, residual {:.2e}", chain.n, chain.residual);
    for n in [5, 10, 20, 40] {
        println!(
            "  nu({}, 0) / nu({n}, 0) = {:.6}",
            n + 1,
            chain.prob(n + 1, 0) / chain.prob(n, 0)
        );
    }
    let tau = dom.tau();
    for k in 1..=2 {
        for fixed in 0..3 {
            let f = fit_decay(&chain, FitMode::Coordinate { k, fixed })?;
            println!(
                "tau_{k} with L_{} = {fixed}: fitted {:.6} vs {:.6}  (r² {:.8})",
                3 - k,
                -f.slope,
                tau[k - 1],
                f.r_squared
            );
        }
    }
    let r = dom.alpha_rational([Ratio::from_integer(1), Ratio::from_integer(1)])?;
    let f = fit_decay(
        &chain,
        FitMode::Direction {
            c: r.c,
            delta: r.unit_delta,
        },
    )?;
    println!(
        "alpha_c along (1,1): fitted {:.6} vs {:.6} on x in {:.3?}",
        -f.slope, r.alpha, f.window
    );
    Ok(())
}

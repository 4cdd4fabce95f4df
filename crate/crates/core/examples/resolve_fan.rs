//! Resolution of singular and non-simplicial fans, with the per-step trace.

use pexp::corpus;
use pexp::fan::{resolve_with, ResolveStrategy};

fn main() {
    for (name, fan) in [("P(1,1,2)", corpus::p112()), ("P(1,1,1,3)", corpus::p1113()), ("cube", corpus::cube())] {
        for strategy in [ResolveStrategy::Canonical, ResolveStrategy::Seeded(7)] {
            let r = resolve_with(&fan, strategy).unwrap();
            println!(
                "{name} ({strategy:?}): {} -> {} maximal cones, {} rays added",
                fan.max_cones().len(),
                r.map.fine.max_cones().len(),
                r.map.fine.rays().len() - fan.rays().len()
            );
            for step in &r.steps {
                println!("  star at {}: excess {} -> {}", step.ray, step.excess_before, step.excess_after);
            }
        }
    }
}

//! Print the QR elimination plan of one panel for every tree combination.
//!
//! cargo run --example elimination_trees -- [tiles] [P]

use hybrid_luqr::tiled::{DomainMap, GridConfig};
use hybrid_luqr::trees::{build_plan, validate_plan, KillKind, TreeKind};

fn main() -> hybrid_luqr::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(12);
    let p = args.next().unwrap_or(3);
    let map = DomainMap::new(GridConfig::new(p, 1)?);
    let trees = [TreeKind::Flat, TreeKind::Binary, TreeKind::Greedy, TreeKind::Fibonacci];

    println!("panel of {n} tile rows on a {p}x1 grid, domains {:?}", map.panel_domains(0, n));
    println!("\n{:>10} {:>10} {:>6} {:>5} {:>5}", "intra", "inter", "depth", "TS", "TT");
    for intra in trees {
        for inter in trees {
            let plan = build_plan(0, n, &map, intra, inter);
            validate_plan(&plan).expect("valid plan");
            let ts = plan.eliminations.iter().filter(|e| e.kind == KillKind::Ts).count();
            println!(
                "{:>10} {:>10} {:>6} {:>5} {:>5}",
                intra.to_string(),
                inter.to_string(),
                plan.depth(),
                ts,
                plan.eliminations.len() - ts
            );
        }
    }

    println!("\ngreedy inside domains, fibonacci across:");
    print!("{}", build_plan(0, n, &map, TreeKind::Greedy, TreeKind::Fibonacci));
    Ok(())
}

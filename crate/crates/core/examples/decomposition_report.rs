//! Splits a preset's particles over a number of workers and reports the
//! blocks, halo traffic and load balance. Writes the cell occupancy CSV.
//! Usage: `decomposition_report [preset] [workers]`.

use sphfsi::decomposition::{distribute, load_imbalance, write_cell_occupancy, Decomposition, DomainGrid};
use sphfsi::scenario::{build_particles, preset, PresetOptions};

fn main() -> sphfsi::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "gastric_demo".into());
    let workers: usize = args.next().map_or(4, |w| w.parse().expect("worker count"));
    let cfg = preset(&name, &PresetOptions::default())?;
    let (particles, _) = build_particles(&cfg)?;
    let grid = DomainGrid::new(&cfg)?;
    println!("{name}: {} particles on a {:?} cell grid, skin {:.3e}", particles.len(), grid.counts, grid.skin);
    let decomp = Decomposition::new(grid, &particles, workers)?;
    let ws = distribute(particles, &decomp, 0)?;
    for w in &ws {
        let pairs: usize = (0..w.n_owned).map(|i| w.neighbors(i).len()).sum();
        println!(
            "rank {}: cells {:?}..{:?}, {} owned, {} ghosts, {} list entries, sends {:?}",
            w.rank,
            w.block.lo,
            w.block.hi,
            w.n_owned,
            w.ghosts().len(),
            pairs,
            w.send_counts()
        );
    }
    let (_, imbalance) = load_imbalance(&ws);
    println!("max/mean load {imbalance:.3}");
    let path = std::env::temp_dir().join(format!("{name}_occupancy.csv"));
    write_cell_occupancy(&path, &decomp, &ws)?;
    println!("occupancy written to {}", path.display());
    Ok(())
}

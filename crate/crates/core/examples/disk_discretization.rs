//! Mass and moment of inertia of a particle-discretized disk against the
//! exact values, for a sequence of particle spacings.

use sphfsi::scenario::presets::{disk_analytic, disk_discretization_table, DISK_SPACINGS};

fn main() -> sphfsi::Result<()> {
    let (m0, i0) = disk_analytic();
    println!("exact: m = {m0:.9e} kg, I = {i0:.9e} kg m^2");
    println!("{:>10} {:>14} {:>9} {:>14} {:>9}", "dx", "mass", "err", "inertia", "err");
    for (dx, m, i) in disk_discretization_table(&DISK_SPACINGS)? {
        println!(
            "{dx:>10.3e} {m:>14.6e} {:>8.2}% {i:>14.6e} {:>8.2}%",
            100.0 * (m - m0) / m0,
            100.0 * (i - i0) / i0
        );
    }
    Ok(())
}

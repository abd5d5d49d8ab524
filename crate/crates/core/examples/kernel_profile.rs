//! Tabulates the quintic kernel and checks the lattice partition of unity.

use sphfsi::kernel::Kernel;

fn main() {
    let h = 1.0;
    println!("{:>6} {:>14} {:>14} {:>14}", "q", "W_1d", "W_2d", "W_3d");
    let ks: Vec<Kernel> = (1..=3).map(|d| Kernel::new(h, d)).collect();
    for i in 0..=12 {
        let r = 0.25 * i as f64;
        println!("{:>6.2} {:>14.6e} {:>14.6e} {:>14.6e}", r / h, ks[0].w(r), ks[1].w(r), ks[2].w(r));
    }

    for d in [2usize, 3] {
        let k = Kernel::new(h, d);
        let n = 4i32;
        let mut sum = 0.0;
        for i in -n..=n {
            for j in -n..=n {
                for l in if d == 3 { -n..=n } else { 0..=0 } {
                    let r = h * ((i * i + j * j + l * l) as f64).sqrt();
                    sum += h.powi(d as i32) * k.w(r);
                }
            }
        }
        println!("{d}D lattice sum of V W at dx = h: {sum:.6}");
    }
}

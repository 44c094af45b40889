//! Evaluate the NDT lower-bound family at a few network instances and
//! show the maximizing cut alongside the closed-form corner values.
//!
//!     cargo run --example lower_bound

use ndt_lab::NetworkConfig;
use ndt_lab::bounds::{MuCorner, corner_ndt, lower_bound};
use ndt_lab::rational::{rat, to_f64};

fn main() {
    let points = [
        (3, 1, rat(4, 5)),
        (2, 2, rat(4, 9)),
        (2, 2, rat(1, 2)),
        (4, 2, rat(1, 2)),
        (6, 3, rat(2, 3)),
    ];
    println!(
        "{:>4} {:>4} {:>8} {:>10} {:>10} {:>14}",
        "K", "M", "mu", "bound", "decimal", "cut (ell, s)"
    );
    for (k, m, mu) in points {
        let cfg = NetworkConfig::new(k, m, mu.clone()).unwrap();
        let (value, witness) = lower_bound(&cfg);
        let cut = witness
            .map(|w| format!("({}, {})", w.ell, w.s))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:>4} {:>4} {:>8} {:>10} {:>10.4} {:>14}",
            k,
            m,
            mu.to_string(),
            value.to_string(),
            to_f64(&value),
            cut
        );
    }

    println!("\ncache-axis corners for (K, M) = (4, 1):");
    println!("  mu = 0: {}", corner_ndt(MuCorner::Zero, 4, 1));
    println!("  mu = 1: {}", corner_ndt(MuCorner::One, 4, 1));
}

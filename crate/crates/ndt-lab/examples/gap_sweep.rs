//! Sweep the multiplicative gap between the one-shot scheme and the
//! lower bound over a grid of networks, and certify the constant-gap
//! result: above cache size ceil((M-1)/2)/M the ratio never exceeds 8/3.
//!
//!     cargo run --example gap_sweep

use ndt_lab::NetworkConfig;
use ndt_lab::gap::{constant_gap_sweep, empirical_gap, gap_sweep};
use ndt_lab::rational::rat;
use ndt_lab::rational::{one, to_f64};

fn main() {
    let (worst, (k, m, mu)) = constant_gap_sweep(8, 8);
    println!(
        "constant-gap sweep over K, M in [1..8]: worst ratio {} ({:.4}) at (K, M, mu) = ({}, {}, {})",
        worst,
        to_f64(&worst),
        k,
        m,
        mu
    );

    println!("\nsample points:");
    for (k, m, mu) in [
        (2, 2, rat(4, 9)),
        (4, 1, rat(1, 2)),
        (6, 3, rat(1, 3)),
        (2, 5, rat(1, 5)),
    ] {
        let cfg = NetworkConfig::new(k, m, mu).unwrap();
        let r = empirical_gap(&cfg);
        let bound = r
            .bound
            .as_ref()
            .map(|(b, s)| format!("{b} [{s}]"))
            .unwrap_or_else(|| "-".into());
        println!(
            "  (K={}, M={}, mu={}): achievable {}, lower {}, ratio {}, bound {}",
            r.k, r.m, r.mu, r.achievable, r.lower, r.ratio, bound
        );
    }

    let optimal = gap_sweep(6, 6)
        .into_iter()
        .filter(|row| row.report.ratio == one())
        .count();
    println!("\n{optimal} of the swept (K, M, mu) points are exactly optimal");
}

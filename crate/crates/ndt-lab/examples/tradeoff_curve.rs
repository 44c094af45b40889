//! Print the exact NDT tradeoff of a small network: lower bound,
//! achievable envelope, closed-form optimum and achievable sum DoF.
//!
//!     cargo run --example tradeoff_curve

use ndt_lab::NetworkConfig;
use ndt_lab::bounds::{achievable_dof, lower_bound, optimal_tradeoff_closed};
use ndt_lab::gap::best_implemented_envelope;
use ndt_lab::rational::rat;

fn main() {
    let (k, m) = (2, 2);
    let envelope = best_implemented_envelope(k, m);
    println!("NDT tradeoff for K = {k} users, M = {m} relays");
    println!(
        "{:>8} {:>10} {:>12} {:>10} {:>8}",
        "mu", "lower", "achievable", "optimal", "DoF"
    );
    for i in 0..=12i64 {
        let mu = rat(i, 12);
        let cfg = NetworkConfig::new(k, m, mu.clone()).unwrap();
        let (lower, _) = lower_bound(&cfg);
        let ach = envelope.eval(&mu);
        let opt = optimal_tradeoff_closed(&cfg).unwrap();
        let dof = achievable_dof(&cfg, &ach);
        println!(
            "{:>8} {:>10} {:>12} {:>10} {:>8}",
            mu.to_string(),
            lower.to_string(),
            ach.to_string(),
            opt.to_string(),
            dof.to_string()
        );
    }
    println!("\nbreakpoints of the achievable envelope:");
    for bp in envelope.breakpoints() {
        println!("  ({}, {})", bp.mu, bp.ndt);
    }
}

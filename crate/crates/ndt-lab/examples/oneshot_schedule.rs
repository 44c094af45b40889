//! Build the two-phase one-shot delivery schedule of a network and show
//! every channel use: which relays are multicast to, which users are
//! served by which relay subset, and the resulting exact NDT.
//!
//!     cargo run --example oneshot_schedule

use ndt_lab::NetworkConfig;
use ndt_lab::oneshot::{Phase, build_schedule, classify_region, delta_os, subpacketize};
use ndt_lab::rational::rat;
use ndt_lab::verify::measure_ndt;

fn main() {
    let cfg = NetworkConfig::new(2, 2, rat(1, 2)).unwrap();
    let counts = subpacketize(&cfg).unwrap();
    println!(
        "K = {}, M = {}, mu = {}: psi = {}, Gamma = {}, {} symbols per file",
        cfg.k, cfg.m, cfg.mu, counts.psi, counts.gamma, counts.symbols_per_file
    );
    println!(
        "phase 1: {} uses, phase 2: {} uses, fragmentation factor {}",
        counts.t1, counts.t2, counts.frag_factor
    );

    let plan = build_schedule(&cfg).unwrap();
    for step in &plan.steps {
        match step.phase {
            Phase::One => {
                let relays: Vec<String> = step
                    .rn_symbols
                    .iter()
                    .map(|(rn, s)| format!("RN{rn}<-{s}"))
                    .collect();
                let users: Vec<String> = step
                    .ue_symbols
                    .iter()
                    .map(|(ue, s)| format!("UE{ue}<-{s}"))
                    .collect();
                println!(
                    "t = {}: multicast {} | serve {} via relays {:?}",
                    step.t,
                    relays.join(", "),
                    if users.is_empty() {
                        "-".into()
                    } else {
                        users.join(", ")
                    },
                    step.s_r_prime
                );
            }
            Phase::Two => {
                let users: Vec<String> = step
                    .ue_symbols
                    .iter()
                    .map(|(ue, s)| format!("UE{ue}<-{s}"))
                    .collect();
                println!(
                    "t = {}: joint zero-forcing, serve {}",
                    step.t,
                    users.join(", ")
                );
            }
        }
    }

    let ndt = measure_ndt(
        plan.steps.len() as u64,
        counts.symbols_per_file,
        counts.frag_factor,
    );
    println!(
        "measured NDT = {} (formula: {})",
        ndt,
        delta_os(&cfg).unwrap()
    );

    let wire = plan.to_json(&cfg.mu);
    println!("\nJSON wire form of the first step:");
    println!(
        "{}",
        serde_json::to_string_pretty(&wire["steps"][0]).unwrap()
    );

    println!("\nregion classification on the M = 4 grid for K = 2:");
    for lvl in 1..4i64 {
        let c = NetworkConfig::new(2, 4, rat(lvl, 4)).unwrap();
        println!(
            "  mu = {}/4: region {:?}, NDT {}",
            lvl,
            classify_region(&c).unwrap(),
            delta_os(&c).unwrap()
        );
    }
}

//! Run the two-user two-relay alignment scheme at cache size 4/9 and
//! report its certificates; both users and both relays decode from
//! full-rank 12x12 systems and the measured NDT is exactly 4/3.
//!
//!     cargo run --example ia22_alignment

use ndt_lab::ia::ia22::{rn_spec, ue_spec};
use ndt_lab::ia::ia22_run;

fn main() {
    let seed = 42;
    let trace = ia22_run(seed).expect("usable channel stream");
    println!(
        "scheme {} over T = {} uses, {} symbols per file",
        trace.scheme, trace.t_total, trace.symbols_per_file
    );
    println!("measured NDT          = {}", trace.ndt);
    println!("pass                  = {}", trace.pass);
    println!("max zero-forcing res. = {:.3e}", trace.max_zf_residual);
    println!(
        "max alignment dev.    = {:.3e}",
        trace.max_alignment_deviation
    );
    println!("max round-trip error  = {:.3e}", trace.max_round_trip_error);

    println!("\nper-receiver grouped systems:");
    for report in &trace.reports {
        println!(
            "  {}: rank ok = {}, condition = {:.3e}",
            report.receiver, report.desired_rank_ok, report.grouped_condition_number
        );
    }

    for k in 1..=2 {
        let spec = ue_spec(k);
        println!("\nuser {k} aligned sums:");
        for group in spec.groups {
            let terms: Vec<String> = group.iter().map(|(i, j)| format!("eta({i},{j})")).collect();
            println!("  {}", terms.join(" + "));
        }
    }
    for rn in 1..=2 {
        let spec = rn_spec(rn);
        println!("relay {rn} decodes {:?}", spec.desired);
    }
}

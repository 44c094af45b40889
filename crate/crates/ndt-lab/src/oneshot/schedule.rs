//! Two-phase delivery schedule construction for the one-shot scheme.
//!
//! Phase 1 has one step per `(S_U, S_R)` pair per fragment, in
//! lexicographic `(S_U, S_R, fragment)` order. Every step multicasts one
//! uncached symbol to each relay in `S_R` (`|S_R| = 1 + mu*M`) and,
//! through the relays in `S_R'`, one fresh desired symbol to each user in
//! `S_U` that still has phase-1 quota. Phase 2 delivers every remaining
//! user symbol with `psi'` users per step via cooperative zero-forcing.
//!
//! The only hard constraints are the delivery counts; which cache label
//! a user's symbol is drawn from at a given step is free. That freedom
//! is spent balancing the per-relay transmit loads: a greedy pass picks
//! labels and `S_R'` subsets, then two repair passes (whole-label
//! switches and within-label member swaps) move load off the heaviest
//! relays until the spread is at most one.

use super::{GridError, OneShotCounts, SymbolId, subpacketize};
use crate::combin::k_subsets;
use crate::config::NetworkConfig;
use std::collections::BTreeMap;

/// Delivery phase of a schedule step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Phase {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

/// One channel use of the delivery schedule.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ScheduleStep {
    /// 1-based channel use index, continuous across phases.
    pub t: usize,
    pub phase: Phase,
    /// Relays receiving a desired symbol this step (phase 1 only).
    pub s_r: Vec<usize>,
    /// Users receiving a desired symbol this step.
    pub s_u: Vec<usize>,
    /// Relays transmitting the user symbols (phase 1 only); a subset of
    /// the delivered symbols' cache label `T`, equal to it when
    /// `psi = mu*M`.
    pub s_r_prime: Vec<usize>,
    /// Relay -> its desired symbol `eta_{K+m, S_R \ {m}, S_U}`.
    pub rn_symbols: BTreeMap<usize, SymbolId>,
    /// User -> the desired symbol delivered to it this step.
    pub ue_symbols: BTreeMap<usize, SymbolId>,
}

/// Full delivery schedule for one grid cache size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryPlan {
    pub k: usize,
    pub m: usize,
    pub counts: OneShotCounts,
    pub steps: Vec<ScheduleStep>,
}

impl DeliveryPlan {
    /// Channel uses in phase 1 / phase 2.
    pub fn phase_lengths(&self) -> (usize, usize) {
        let p1 = self.steps.iter().filter(|s| s.phase == Phase::One).count();
        (p1, self.steps.len() - p1)
    }

    /// JSON wire form of the plan (deterministic field and key order).
    pub fn to_json(&self, mu: &crate::rational::Rational) -> serde_json::Value {
        serde_json::json!({
            "schema": "ndt-lab/1",
            "k": self.k,
            "m": self.m,
            "mu": crate::rational::fmt_frac(mu),
            "frag_factor": self.counts.frag_factor,
            "symbols_per_file": self.counts.symbols_per_file,
            "t1": self.counts.t1,
            "t2": crate::rational::fmt_frac(&self.counts.t2),
            "total_t": self.counts.total_t,
            "steps": self.steps,
        })
    }
}

/// A phase-1 step that delivers user symbols: which users, from which
/// cache label, over which relay subset.
struct ServingStep {
    step_idx: usize,
    tau: usize,
    served: Vec<usize>,
    subset: Vec<usize>,
}

/// Build the delivery schedule for any grid cache size `mu = m/M`.
///
/// Guarantees, checked by tests over all small networks: each relay
/// receives each of its `Gamma * C(M-1, mu*M)` uncached symbols exactly
/// once per fragment; each user receives exactly `frag * n_ue` distinct
/// symbols in phase 1 and the rest in phase 2; per-relay phase-1
/// transmit loads are balanced to within one.
pub fn build_schedule(cfg: &NetworkConfig) -> Result<DeliveryPlan, GridError> {
    let counts = subpacketize(cfg)?;
    let (k, m) = (cfg.k, cfg.m);
    let level = counts.level;
    let frag = counts.frag_factor;

    let t_labels = k_subsets(m, level);
    let u_labels = k_subsets(k, counts.psi);
    let su_list = k_subsets(k, counts.psi);
    let sr_list = k_subsets(m, 1 + level);
    let capacity = counts.gamma * frag; // per (user, label) symbol pool

    // ---- pass 1: step skeleton and label drainage ----
    let mut steps = Vec::with_capacity(counts.total_t as usize);
    let mut serving: Vec<ServingStep> = Vec::new();
    // consumed[ue-1][tau] phase-1 deliveries drawn from each pool
    let mut consumed = vec![vec![0u64; t_labels.len()]; k];
    let mut quota = vec![frag * counts.n_ue; k];
    let mut rn_load = vec![0u64; m + 1];
    let mut t = 0usize;

    for su in &su_list {
        for sr in &sr_list {
            for f in 1..=frag {
                t += 1;
                let mut rn_symbols = BTreeMap::new();
                for &rn in sr {
                    rn_symbols.insert(
                        rn,
                        SymbolId {
                            file: k + rn,
                            rn_subset: crate::combin::set_minus(sr, &[rn]),
                            ue_subset: su.clone(),
                            fragment: f,
                        },
                    );
                }

                let pending: Vec<usize> =
                    su.iter().copied().filter(|&ue| quota[ue - 1] > 0).collect();
                if !pending.is_empty() {
                    // drain the label with the most slack for the pending
                    // users; ties go to lightly loaded relays, then lex.
                    // When no label can feed everyone (the pools need not
                    // admit a fully joint drainage), serve the largest
                    // subset that one label covers.
                    let slack = |ti: usize| {
                        pending
                            .iter()
                            .map(|&ue| capacity - consumed[ue - 1][ti])
                            .min()
                            .unwrap()
                    };
                    let coverage = |ti: usize| {
                        pending
                            .iter()
                            .filter(|&&ue| consumed[ue - 1][ti] < capacity)
                            .count()
                    };
                    let best = (0..t_labels.len())
                        .map(|ti| (coverage(ti), slack(ti)))
                        .max()
                        .unwrap();
                    let tau = (0..t_labels.len())
                        .filter(|&ti| (coverage(ti), slack(ti)) == best)
                        .min_by_key(|&ti| {
                            let (mx, sum) = subset_cost(&t_labels[ti], counts.psi, &rn_load);
                            (mx, sum, ti)
                        })
                        .unwrap();
                    let served: Vec<usize> = pending
                        .into_iter()
                        .filter(|&ue| consumed[ue - 1][tau] < capacity)
                        .collect();
                    if !served.is_empty() {
                        for &ue in &served {
                            consumed[ue - 1][tau] += 1;
                            quota[ue - 1] -= 1;
                        }
                        let subset = pick_greedy_subset(&t_labels[tau], counts.psi, &rn_load);
                        for &rn in &subset {
                            rn_load[rn] += 1;
                        }
                        serving.push(ServingStep {
                            step_idx: steps.len(),
                            tau,
                            served,
                            subset,
                        });
                    }
                }

                steps.push(ScheduleStep {
                    t,
                    phase: Phase::One,
                    s_r: sr.clone(),
                    s_u: Vec::new(),
                    s_r_prime: Vec::new(),
                    rn_symbols,
                    ue_symbols: BTreeMap::new(),
                });
            }
        }
    }
    assert!(
        quota.iter().all(|&q| q == 0),
        "phase-1 quota left unfilled; schedule jammed"
    );

    // ---- pass 2: balance per-relay transmit loads ----
    balance_by_label_switch(
        &mut serving,
        &t_labels,
        &mut consumed,
        capacity,
        &mut rn_load,
        m,
    );
    balance_by_member_swap(&mut serving, &t_labels, &mut rn_load, m);

    // ---- pass 3: canonical symbol labels ----
    // per (user, label) pool: (U index, fragment) entries, those whose U
    // contains the user first, each in lex order
    let mut pools: Vec<Vec<std::collections::VecDeque<(usize, u64)>>> = (1..=k)
        .map(|ue| {
            t_labels
                .iter()
                .map(|_| {
                    let mut with_k = std::collections::VecDeque::new();
                    let mut without_k = std::collections::VecDeque::new();
                    for (ui, u) in u_labels.iter().enumerate() {
                        for f in 1..=frag {
                            if u.contains(&ue) {
                                with_k.push_back((ui, f));
                            } else {
                                without_k.push_back((ui, f));
                            }
                        }
                    }
                    with_k.extend(without_k);
                    with_k
                })
                .collect()
        })
        .collect();

    for sv in &serving {
        let step = &mut steps[sv.step_idx];
        for &ue in &sv.served {
            let (ui, f) = pools[ue - 1][sv.tau]
                .pop_front()
                .expect("pool size bookkeeping");
            step.ue_symbols.insert(
                ue,
                SymbolId {
                    file: ue,
                    rn_subset: t_labels[sv.tau].clone(),
                    ue_subset: u_labels[ui].clone(),
                    fragment: f,
                },
            );
        }
        step.s_u = step.ue_symbols.keys().copied().collect();
        step.s_r_prime = sv.subset.clone();
    }

    // ---- phase 2: interleave the leftovers, psi' users per step ----
    let mut leftovers: Vec<Vec<SymbolId>> = pools
        .iter_mut()
        .enumerate()
        .map(|(idx, by_label)| {
            let ue = idx + 1;
            let mut items = Vec::new();
            for (ti, q) in by_label.iter_mut().enumerate() {
                let mut tail: Vec<(usize, u64)> = q.drain(..).collect();
                tail.sort_unstable();
                for (ui, f) in tail {
                    items.push(SymbolId {
                        file: ue,
                        rn_subset: t_labels[ti].clone(),
                        ue_subset: u_labels[ui].clone(),
                        fragment: f,
                    });
                }
            }
            items.sort();
            items
        })
        .collect();
    let remaining = leftovers[0].len();
    assert!(
        leftovers.iter().all(|l| l.len() == remaining),
        "uneven phase-2 leftovers across users"
    );

    let mut flat: std::collections::VecDeque<(usize, SymbolId)> = std::collections::VecDeque::new();
    for i in 0..remaining {
        for (idx, items) in leftovers.iter_mut().enumerate() {
            let placeholder = SymbolId {
                file: 0,
                rn_subset: Vec::new(),
                ue_subset: Vec::new(),
                fragment: 0,
            };
            flat.push_back((idx + 1, std::mem::replace(&mut items[i], placeholder)));
        }
    }
    while !flat.is_empty() {
        t += 1;
        let mut ue_symbols = BTreeMap::new();
        for _ in 0..counts.psi_prime.min(flat.len()) {
            let (ue, sym) = flat.pop_front().unwrap();
            ue_symbols.insert(ue, sym);
        }
        steps.push(ScheduleStep {
            t,
            phase: Phase::Two,
            s_r: Vec::new(),
            s_u: ue_symbols.keys().copied().collect(),
            s_r_prime: Vec::new(),
            rn_symbols: BTreeMap::new(),
            ue_symbols,
        });
    }

    assert_eq!(
        t as u64, counts.total_t,
        "schedule length disagrees with the count formulas"
    );
    Ok(DeliveryPlan {
        k,
        m,
        counts,
        steps,
    })
}

/// Load cost of the least-loaded psi-subset of `tau`: (max, sum) of the
/// member loads.
fn subset_cost(tau: &[usize], psi: usize, rn_load: &[u64]) -> (u64, u64) {
    k_subsets(tau.len(), psi)
        .iter()
        .map(|cand| {
            let max = cand.iter().map(|&i| rn_load[tau[i - 1]]).max().unwrap_or(0);
            let sum: u64 = cand.iter().map(|&i| rn_load[tau[i - 1]]).sum();
            (max, sum)
        })
        .min()
        .unwrap()
}

/// Least-loaded psi-subset of `tau`, ties lexicographic.
fn pick_greedy_subset(tau: &[usize], psi: usize, rn_load: &[u64]) -> Vec<usize> {
    k_subsets(tau.len(), psi)
        .iter()
        .enumerate()
        .min_by_key(|(ci, cand)| {
            let max = cand.iter().map(|&i| rn_load[tau[i - 1]]).max().unwrap_or(0);
            let sum: u64 = cand.iter().map(|&i| rn_load[tau[i - 1]]).sum();
            (max, sum, *ci)
        })
        .map(|(_, cand)| cand.iter().map(|&i| tau[i - 1]).collect())
        .unwrap()
}

fn spread(load: &[u64], m: usize) -> u64 {
    let hi = (1..=m).map(|r| load[r]).max().unwrap();
    let lo = (1..=m).map(|r| load[r]).min().unwrap();
    hi - lo
}

/// Repair move 1: re-point a serving step at a different cache label.
/// Valid whenever every served user still has pool capacity at the new
/// label. Applies any switch that strictly lowers the load profile,
/// until none is left or the loads are balanced.
fn balance_by_label_switch(
    serving: &mut [ServingStep],
    t_labels: &[Vec<usize>],
    consumed: &mut [Vec<u64>],
    capacity: u64,
    rn_load: &mut [u64],
    m: usize,
) {
    if serving.is_empty() {
        return;
    }
    let psi = serving[0].subset.len();
    loop {
        if spread(rn_load, m) <= 1 {
            return;
        }
        let mut improved = false;
        'outer: for sv in serving.iter_mut() {
            let cur_profile = profile(rn_load, m);
            for ti in 0..t_labels.len() {
                if ti == sv.tau {
                    continue;
                }
                if !sv.served.iter().all(|&ue| consumed[ue - 1][ti] < capacity) {
                    continue;
                }
                // tentative: uncharge old subset, charge the cheapest
                // subset of the new label
                for &rn in &sv.subset {
                    rn_load[rn] -= 1;
                }
                let new_subset = pick_greedy_subset(&t_labels[ti], psi, rn_load);
                for &rn in &new_subset {
                    rn_load[rn] += 1;
                }
                if profile(rn_load, m) < cur_profile {
                    for &ue in &sv.served {
                        consumed[ue - 1][sv.tau] -= 1;
                        consumed[ue - 1][ti] += 1;
                    }
                    sv.tau = ti;
                    sv.subset = new_subset;
                    improved = true;
                    break 'outer;
                }
                // revert
                for &rn in &new_subset {
                    rn_load[rn] -= 1;
                }
                for &rn in &sv.subset {
                    rn_load[rn] += 1;
                }
            }
        }
        if !improved {
            return;
        }
    }
}

/// Sorted-descending load profile; lexicographic comparison of profiles
/// is the improvement order for the repair moves.
fn profile(load: &[u64], m: usize) -> Vec<u64> {
    let mut p: Vec<u64> = (1..=m).map(|r| load[r]).collect();
    p.sort_unstable_by(|a, b| b.cmp(a));
    p
}

/// Repair move 2: swap a single member of a step's transmit subset for
/// another relay of the same cache label, along shortest heavy-to-light
/// chains (augmenting paths of the underlying flow problem).
fn balance_by_member_swap(
    serving: &mut [ServingStep],
    t_labels: &[Vec<usize>],
    rn_load: &mut [u64],
    m: usize,
) {
    loop {
        let hi = (1..=m).max_by_key(|&r| rn_load[r]).unwrap();
        let lo = (1..=m).min_by_key(|&r| rn_load[r]).unwrap();
        if rn_load[hi] - rn_load[lo] <= 1 {
            return;
        }
        // BFS over "relay a can hand one transmission to relay b" edges
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; m + 1];
        let mut queue = std::collections::VecDeque::from([hi]);
        let mut reached = false;
        while let Some(a) = queue.pop_front() {
            if a == lo {
                reached = true;
                break;
            }
            for (si, sv) in serving.iter().enumerate() {
                if !sv.subset.contains(&a) {
                    continue;
                }
                for &b in &t_labels[sv.tau] {
                    if b != a && b != hi && !sv.subset.contains(&b) && prev[b].is_none() {
                        prev[b] = Some((a, si));
                        queue.push_back(b);
                    }
                }
            }
        }
        if !reached {
            return; // at the flow optimum for member swaps
        }
        let mut b = lo;
        while let Some((a, si)) = prev[b] {
            let slot = serving[si].subset.iter().position(|&r| r == a).unwrap();
            serving[si].subset[slot] = b;
            serving[si].subset.sort_unstable();
            b = a;
        }
        rn_load[hi] -= 1;
        rn_load[lo] += 1;
    }
}

//! Per-step beamformer construction for the one-shot schedule.
//!
//! Phase 1 pins two families of zero-forcing conditions: every relay
//! symbol's concatenated DeNB/relay vector lies in the right nullspace of
//! `(g_{S_U}, H_{S_U, S_R \ {m}})`, and every user symbol's relay vector
//! lies in the nullspace of `H_{S_U \ {p}, S_R'}`. Phase 2 uses joint
//! DeNB-relay zero-forcing over the `1 + mu*M` transmitters that hold the
//! symbol. Nullspace vectors are normalized to unit Euclidean norm and
//! chosen as the projection of the served receiver's direction onto the
//! nullspace, which keeps the desired effective coefficient away from
//! zero whenever the nullspace has spare dimensions (relay symbols need
//! a nonzero DeNB component because relays hear only the DeNB). All
//! downstream checks are scale invariant.

use super::SymbolId;
use super::schedule::{Phase, ScheduleStep};
use crate::channel::ChannelState;
use crate::linalg::{C64, CMatrix, CVector, nullspace_project};
use std::collections::BTreeMap;

/// Channel too close to a measure-zero degeneracy for the step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegenerateChannel(pub String);

impl std::fmt::Display for DegenerateChannel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "degenerate channel: {}", self.0)
    }
}

impl std::error::Error for DegenerateChannel {}

/// Sparse beamformer coefficients of one channel use. Symbols absent
/// from the maps carry zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BeamformerSet {
    /// DeNB precoder `nu` per symbol.
    pub denb_coeff: BTreeMap<SymbolId, C64>,
    /// Relay precoder `beta^{(m)}` per (symbol, relay).
    pub rn_coeffs: BTreeMap<(SymbolId, usize), C64>,
}

impl BeamformerSet {
    pub fn nu(&self, sym: &SymbolId) -> C64 {
        self.denb_coeff
            .get(sym)
            .copied()
            .unwrap_or_else(|| C64::new(0.0, 0.0))
    }

    pub fn beta(&self, sym: &SymbolId, rn: usize) -> C64 {
        self.rn_coeffs
            .get(&(sym.clone(), rn))
            .copied()
            .unwrap_or_else(|| C64::new(0.0, 0.0))
    }

    /// All symbols carried this use.
    pub fn symbols(&self) -> Vec<SymbolId> {
        let mut set: std::collections::BTreeSet<SymbolId> =
            self.denb_coeff.keys().cloned().collect();
        set.extend(self.rn_coeffs.keys().map(|(s, _)| s.clone()));
        set.into_iter().collect()
    }

    /// Effective coefficient of `sym` at user `ue`:
    /// `g_k nu + sum_m h_{km} beta^{(m)}`.
    pub fn effective_at_ue(&self, ch: &ChannelState, ue: usize, sym: &SymbolId) -> C64 {
        let mut acc = ch.g_of(ue) * self.nu(sym);
        for ((s, rn), beta) in &self.rn_coeffs {
            if s == sym {
                acc += ch.h_of(ue, *rn) * *beta;
            }
        }
        acc
    }

    /// Effective coefficient of `sym` at relay `rn` (relays hear only the
    /// DeNB): `f_m nu`, and zero once the relay cancels its cached symbols.
    pub fn effective_at_rn(&self, ch: &ChannelState, rn: usize, sym: &SymbolId) -> C64 {
        if sym.cached_at(rn) {
            C64::new(0.0, 0.0)
        } else {
            ch.f_of(rn) * self.nu(sym)
        }
    }
}

fn ue_rows(ch: &ChannelState, ues: &[usize], rns: &[usize], with_denb: bool) -> CMatrix {
    let cols = rns.len() + usize::from(with_denb);
    let mut a = CMatrix::zeros(ues.len(), cols);
    for (r, &ue) in ues.iter().enumerate() {
        let mut c = 0;
        if with_denb {
            a[(r, 0)] = ch.g_of(ue);
            c = 1;
        }
        for (j, &rn) in rns.iter().enumerate() {
            a[(r, c + j)] = ch.h_of(ue, rn);
        }
    }
    a
}

/// Phase-1 beamformers for one step.
///
/// Errors with [`DegenerateChannel`] when a zero-forcing submatrix drops
/// below its generic rank (`|S_U|` for relay symbols, `|S_U| - 1` for
/// user symbols).
pub fn phase1_beamformers(
    step: &ScheduleStep,
    ch: &ChannelState,
) -> Result<BeamformerSet, DegenerateChannel> {
    assert_eq!(step.phase, Phase::One, "phase-1 step expected");
    let mut out = BeamformerSet::default();
    let served = &step.s_u;

    for (&rn, sym) in &step.rn_symbols {
        let others = crate::combin::set_minus(&step.s_r, &[rn]);
        let a = ue_rows(ch, served, &others, true);
        // the receiving relay hears only the DeNB, so aim the nullspace
        // vector at the DeNB axis
        let mut target = CVector::zeros(1 + others.len());
        target[0] = C64::new(1.0, 0.0);
        let (rank, v) = nullspace_project(&a, &target);
        if rank < served.len() {
            return Err(DegenerateChannel(format!(
                "relay-symbol zero-forcing matrix at t={} has rank {rank} < {}",
                step.t,
                served.len()
            )));
        }
        let Some(v) = v else {
            return Err(DegenerateChannel(format!(
                "DeNB direction lies in the zero-forced span at t={}",
                step.t
            )));
        };
        out.denb_coeff.insert(sym.clone(), v[0]);
        for (j, &other) in others.iter().enumerate() {
            out.rn_coeffs.insert((sym.clone(), other), v[1 + j]);
        }
    }

    for (&ue, sym) in &step.ue_symbols {
        let nulled = crate::combin::set_minus(served, &[ue]);
        let v = if nulled.is_empty() {
            // a single served user sees no cross interference; any
            // direction works, take all-ones
            let n = step.s_r_prime.len();
            CVector::from_element(n, C64::new(1.0 / (n as f64).sqrt(), 0.0))
        } else {
            let a = ue_rows(ch, &nulled, &step.s_r_prime, false);
            // aim at the served user's own links
            let target = CVector::from_iterator(
                step.s_r_prime.len(),
                step.s_r_prime.iter().map(|&rn| ch.h_of(ue, rn).conj()),
            );
            let (rank, v) = nullspace_project(&a, &target);
            if rank < nulled.len() {
                return Err(DegenerateChannel(format!(
                    "user-symbol zero-forcing matrix at t={} has rank {rank} < {}",
                    step.t,
                    nulled.len()
                )));
            }
            let Some(v) = v else {
                return Err(DegenerateChannel(format!(
                    "served user's links lie in the zero-forced span at t={}",
                    step.t
                )));
            };
            v
        };
        for (j, &rn) in step.s_r_prime.iter().enumerate() {
            out.rn_coeffs.insert((sym.clone(), rn), v[j]);
        }
    }
    Ok(out)
}

/// Phase-2 beamformers: joint DeNB-relay zero-forcing per served symbol
/// over the DeNB plus the relays caching it.
pub fn phase2_beamformers(
    step: &ScheduleStep,
    ch: &ChannelState,
) -> Result<BeamformerSet, DegenerateChannel> {
    assert_eq!(step.phase, Phase::Two, "phase-2 step expected");
    let mut out = BeamformerSet::default();
    for (&ue, sym) in &step.ue_symbols {
        let nulled = crate::combin::set_minus(&step.s_u, &[ue]);
        let dim = 1 + sym.rn_subset.len();
        let v = if nulled.is_empty() {
            CVector::from_element(dim, C64::new(1.0 / (dim as f64).sqrt(), 0.0))
        } else {
            let a = ue_rows(ch, &nulled, &sym.rn_subset, true);
            // aim at the served user's joint DeNB/relay links
            let mut target = CVector::zeros(dim);
            target[0] = ch.g_of(ue).conj();
            for (j, &rn) in sym.rn_subset.iter().enumerate() {
                target[1 + j] = ch.h_of(ue, rn).conj();
            }
            let (rank, v) = nullspace_project(&a, &target);
            if rank < nulled.len() {
                return Err(DegenerateChannel(format!(
                    "joint zero-forcing matrix at t={} has rank {rank} < {}",
                    step.t,
                    nulled.len()
                )));
            }
            let Some(v) = v else {
                return Err(DegenerateChannel(format!(
                    "served user's links lie in the zero-forced span at t={}",
                    step.t
                )));
            };
            v
        };
        out.denb_coeff.insert(sym.clone(), v[0]);
        for (j, &rn) in sym.rn_subset.iter().enumerate() {
            out.rn_coeffs.insert((sym.clone(), rn), v[1 + j]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::draw_channels;
    use crate::config::NetworkConfig;
    use crate::oneshot::build_schedule;
    use crate::rational::rat;

    fn residual_at(bf: &BeamformerSet, ch: &ChannelState, ue: usize, sym: &SymbolId) -> f64 {
        let scale: f64 = bf
            .symbols()
            .iter()
            .map(|s| bf.effective_at_ue(ch, ue, s).norm())
            .fold(0.0, f64::max);
        bf.effective_at_ue(ch, ue, sym).norm() / scale.max(1e-300)
    }

    #[test]
    fn phase1_zero_forces_relay_symbols_at_served_users() {
        // K = 2, M = 4, mu*M = 2: psi = 2 so both ZF families are active
        let cfg = NetworkConfig::new(2, 4, rat(1, 2)).unwrap();
        let plan = build_schedule(&cfg).unwrap();
        let channels = draw_channels(3, plan.steps.len(), 2, 4);
        for step in plan.steps.iter().filter(|s| s.phase == Phase::One) {
            let ch = &channels[step.t - 1];
            let bf = phase1_beamformers(step, ch).unwrap();
            for &ue in &step.s_u {
                for sym in step.rn_symbols.values() {
                    assert!(residual_at(&bf, ch, ue, sym) < 1e-10);
                }
                for (&other, sym) in &step.ue_symbols {
                    if other != ue {
                        assert!(residual_at(&bf, ch, ue, sym) < 1e-10);
                    }
                }
                let desired = &step.ue_symbols[&ue];
                assert!(residual_at(&bf, ch, ue, desired) > 1e-6);
            }
        }
    }

    #[test]
    fn duplicated_user_rows_are_degenerate() {
        let cfg = NetworkConfig::new(2, 4, rat(1, 2)).unwrap();
        let plan = build_schedule(&cfg).unwrap();
        let step = &plan.steps[0];
        let mut ch = draw_channels(3, 1, 2, 4).remove(0);
        ch.g[1] = ch.g[0];
        ch.h[1] = ch.h[0].clone();
        assert!(phase1_beamformers(step, &ch).is_err());
    }

    #[test]
    fn single_served_user_needs_no_cross_nulling() {
        // (K, M, mu) = (2, 2, 1/2): psi = 1, so the user-symbol vector is
        // the all-ones direction over S_R'
        let cfg = NetworkConfig::new(2, 2, rat(1, 2)).unwrap();
        let plan = build_schedule(&cfg).unwrap();
        let step = &plan.steps[0];
        let ch = &draw_channels(9, 1, 2, 2)[0];
        let bf = phase1_beamformers(step, ch).unwrap();
        let sym = &step.ue_symbols[&1];
        assert_eq!(bf.nu(sym), C64::new(0.0, 0.0));
        assert_eq!(bf.beta(sym, step.s_r_prime[0]), C64::new(1.0, 0.0));
    }

    #[test]
    fn phase2_serves_each_user_interference_free() {
        let cfg = NetworkConfig::new(2, 2, rat(1, 2)).unwrap();
        let plan = build_schedule(&cfg).unwrap();
        let channels = draw_channels(11, plan.steps.len(), 2, 2);
        let mut served_deliveries = 0;
        for step in plan.steps.iter().filter(|s| s.phase == Phase::Two) {
            let ch = &channels[step.t - 1];
            let bf = phase2_beamformers(step, ch).unwrap();
            assert_eq!(step.ue_symbols.len(), 2);
            served_deliveries += step.ue_symbols.len();
            for (&ue, sym) in &step.ue_symbols {
                assert!(residual_at(&bf, ch, ue, sym) > 1e-6);
                for (&other, other_sym) in &step.ue_symbols {
                    if other != ue {
                        assert!(residual_at(&bf, ch, ue, other_sym) < 1e-10);
                    }
                }
            }
        }
        // psi' = 2 users served per phase-2 step, three steps
        assert_eq!(served_deliveries, 6);
    }

    #[test]
    fn phase2_unicast_has_single_nonzero_coefficient() {
        // zero cache: phase 2 is DeNB unicast, one user at a time
        let cfg = NetworkConfig::new(2, 1, rat(0, 1)).unwrap();
        let plan = build_schedule(&cfg).unwrap();
        let step = plan.steps.iter().find(|s| s.phase == Phase::Two).unwrap();
        let ch = &draw_channels(1, step.t, 2, 1)[step.t - 1];
        let bf = phase2_beamformers(step, ch).unwrap();
        assert_eq!(step.ue_symbols.len(), 1);
        let (&ue, sym) = step.ue_symbols.iter().next().unwrap();
        assert!(bf.effective_at_ue(ch, ue, sym).norm() > 0.0);
        assert!(bf.rn_coeffs.is_empty());
    }
}

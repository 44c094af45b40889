//! Achievability side of the one-shot scheme: region classification,
//! NDT formulas, subpacketization and cache placement.
//!
//! At cache sizes `mu = m/M` each file splits into `Gamma * C(M, mu*M)`
//! symbols labeled by a relay subset `T` (`|T| = mu*M`, the relays caching
//! the symbol) and a user subset `U` (`|U| = psi`), where
//! `psi = min(K, mu*M)` and `Gamma = C(K, psi)`. Delivery runs in two
//! phases: multicast-plus-zero-forcing steps that satisfy every relay, and
//! cooperative zero-forcing steps for whatever users still miss.

pub mod beamform;
pub mod run;
pub mod schedule;

use crate::combin::binomial_u64;
use crate::config::NetworkConfig;
use crate::rational::{Rational, denominator_u64, one, rat, rint, rmax, rusize, zero};
use std::collections::BTreeMap;

pub use beamform::{BeamformerSet, DegenerateChannel, phase1_beamformers, phase2_beamformers};
pub use run::{OneShotRun, oneshot_run};
pub use schedule::{DeliveryPlan, Phase, ScheduleStep, build_schedule};

/// Operating regime of a `(mu, K, M)` triplet with `mu = m/M`, `0 < m < M`.
///
/// Regions A-E separate which channel (relay broadcast or user
/// interference) limits the one-shot delivery time; the cache-axis
/// endpoints get their own tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Region {
    A,
    B,
    C,
    D,
    E,
    ZeroCache,
    FullCache,
}

/// Errors for formula domains (non-grid cache sizes, endpoint regions).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridError(pub String);

impl std::fmt::Display for GridError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "cache grid error: {}", self.0)
    }
}

impl std::error::Error for GridError {}

/// Maddah-Ali--Niesen delivery NDT on the relay broadcast channel:
/// `M * (1 - mu) / (1 + mu*M)`.
pub fn delta_man(mu: &Rational, m: usize) -> Rational {
    let mq = rusize(m);
    mq.clone() * (one() - mu.clone()) / (one() + mu.clone() * mq)
}

/// Achievable one-shot NDT at a grid cache size:
/// `max{ delta_MAN, (K + delta_MAN * 1[K > mu*M]) / min(K, 1 + mu*M) }`.
///
/// The indicator is strictly false at `K = mu*M`.
pub fn delta_os(cfg: &NetworkConfig) -> Result<Rational, GridError> {
    let level = cfg
        .cache_level()
        .ok_or_else(|| GridError(format!("mu = {} is not a multiple of 1/M", cfg.mu)))?;
    let man = delta_man(&cfg.mu, cfg.m);
    let indicator = cfg.k > level;
    let numer = rusize(cfg.k) + if indicator { man.clone() } else { zero() };
    let denom = rusize(cfg.k.min(1 + level));
    Ok(rmax(man, numer / denom))
}

/// Classify an interior grid triplet into regions A-E.
///
/// Consistency with the formula: region A gives `delta_OS = 1`, regions
/// B/E give `delta_MAN`, regions C/D give `(K + delta_MAN)/(1 + mu*M)`.
pub fn classify_region(cfg: &NetworkConfig) -> Result<Region, GridError> {
    let level = cfg
        .cache_level()
        .ok_or_else(|| GridError(format!("mu = {} is not a multiple of 1/M", cfg.mu)))?;
    if level == 0 || level == cfg.m {
        return Err(GridError(
            "endpoints use ZeroCache/FullCache, not regions A-E".into(),
        ));
    }
    let (k, m) = (cfg.k, cfg.m);
    if k <= level {
        // relay-broadcast side: A when M*(1 - 2mu) < 1, else B
        let lhs = rusize(m) * (one() - rat(2, 1) * cfg.mu.clone());
        if lhs < one() {
            Ok(Region::A)
        } else {
            Ok(Region::B)
        }
    } else if k > m {
        Ok(Region::C)
    } else {
        // mu*M < K <= M: E while K <= mu*M * delta_MAN, else D
        let cap = rusize(level) * delta_man(&cfg.mu, m);
        if rusize(k) <= cap {
            Ok(Region::E)
        } else {
            Ok(Region::D)
        }
    }
}

/// Identifier of one file symbol: the file it belongs to, the relay
/// subset `T` caching it, the user subset `U` labeling it, and a fragment
/// index when rate splitting is in force.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId {
    pub file: usize,
    pub rn_subset: Vec<usize>,
    pub ue_subset: Vec<usize>,
    pub fragment: u64,
}

impl SymbolId {
    pub fn cached_at(&self, rn: usize) -> bool {
        self.rn_subset.contains(&rn)
    }
}

impl std::fmt::Display for SymbolId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "eta({},{:?},{:?},{})",
            self.file, self.rn_subset, self.ue_subset, self.fragment
        )
    }
}

impl serde::Serialize for SymbolId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        // wire form [file, T, U, fragment]
        use serde::ser::SerializeTuple;
        let mut t = s.serialize_tuple(4)?;
        t.serialize_element(&self.file)?;
        t.serialize_element(&self.rn_subset)?;
        t.serialize_element(&self.ue_subset)?;
        t.serialize_element(&self.fragment)?;
        t.end()
    }
}

/// All subpacketization counts for one grid cache size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneShotCounts {
    /// Users served per phase-1 step: `min(K, mu*M)`.
    pub psi: usize,
    /// Users served per phase-2 step: `min(K, 1 + mu*M)`.
    pub psi_prime: usize,
    /// `C(K, psi)` user-subset labels.
    pub gamma: u64,
    /// Symbols per file before fragmentation: `Gamma * C(M, mu*M)`.
    pub symbols_per_file: u64,
    /// Phase-1 length before fragmentation: `Gamma * C(M, 1 + mu*M)`.
    pub t1: u64,
    /// Distinct symbols each user receives in phase 1 (per fragment set).
    pub n_ue: u64,
    /// Phase-2 length before fragmentation, possibly fractional.
    pub t2: Rational,
    /// Per-relay phase-1 transmit load, possibly fractional.
    pub n_rn_tx: Rational,
    /// Smallest split making `t2` integral, so the schedule is a plain
    /// integer-indexed list of steps.
    pub frag_factor: u64,
    /// Total channel uses after fragmentation: `frag * (t1 + t2)`.
    pub total_t: u64,
    /// Integer cache level `mu * M`.
    pub level: usize,
}

impl OneShotCounts {
    fn new_for(cfg: &NetworkConfig, level: usize) -> Self {
        let (k, m) = (cfg.k as u64, cfg.m as u64);
        let lvl = level as i64;
        let psi = (cfg.k).min(level);
        let psi_prime = (cfg.k).min(1 + level);
        let gamma = binomial_u64(k, psi as i64);
        let symbols_per_file = gamma * binomial_u64(m, lvl);
        let t1 = gamma * binomial_u64(m, lvl + 1);
        let n_ue =
            (binomial_u64(m, lvl + 1) * binomial_u64(k - 1, psi as i64 - 1)).min(symbols_per_file);
        let t2 =
            rusize(cfg.k) * (rint(symbols_per_file as i64) - rint(n_ue as i64)) / rusize(psi_prime);
        // per-relay transmit count for user-symbol service in phase 1;
        // fractional values mean the balanced loads differ by one
        let n_rn_tx = rint(gamma as i64)
            * crate::rational::rmin(
                rusize(psi) * rint(binomial_u64(m, lvl + 1) as i64) / rusize(cfg.m),
                rusize(cfg.k) * rint(binomial_u64(m, lvl) as i64) / rusize(cfg.m),
            );
        let frag_factor = denominator_u64(&t2);
        let total_rational = rint(frag_factor as i64) * (rint(t1 as i64) + t2.clone());
        debug_assert!(total_rational.is_integer());
        let total_t = crate::rational::floor_usize(&total_rational) as u64;
        OneShotCounts {
            psi,
            psi_prime,
            gamma,
            symbols_per_file,
            t1,
            n_ue,
            t2,
            n_rn_tx,
            frag_factor,
            total_t,
            level,
        }
    }
}

/// Subpacketization for any grid cache size `mu = m/M` with `0 <= m <= M`.
///
/// Endpoints degenerate cleanly: `m = 0` gives one symbol per file and a
/// pure unicast schedule, `m = M` gives `t1 = 0` and a pure joint
/// zero-forcing phase.
pub fn subpacketize(cfg: &NetworkConfig) -> Result<OneShotCounts, GridError> {
    let level = cfg
        .cache_level()
        .ok_or_else(|| GridError(format!("mu = {} is not a multiple of 1/M", cfg.mu)))?;
    Ok(OneShotCounts::new_for(cfg, level))
}

/// Placement map: relay -> set of symbols it caches (fragment 1 only;
/// fragments share the placement of their parent symbol).
///
/// Relay `m` stores exactly the symbols whose `T` label contains `m`, a
/// `C(M-1, mu*M-1)/C(M, mu*M) = mu` fraction of every file.
pub fn cache_placement(cfg: &NetworkConfig) -> Result<BTreeMap<usize, Vec<SymbolId>>, GridError> {
    let counts = subpacketize(cfg)?;
    let t_labels = crate::combin::k_subsets(cfg.m, counts.level);
    let u_labels = crate::combin::k_subsets(cfg.k, counts.psi);
    let mut map: BTreeMap<usize, Vec<SymbolId>> = (1..=cfg.m).map(|m| (m, Vec::new())).collect();
    for file in 1..=cfg.n {
        for t in &t_labels {
            for u in &u_labels {
                for &rn in t {
                    map.get_mut(&rn).unwrap().push(SymbolId {
                        file,
                        rn_subset: t.clone(),
                        ue_subset: u.clone(),
                        fragment: 1,
                    });
                }
            }
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: usize, m: usize, mu: Rational) -> NetworkConfig {
        NetworkConfig::new(k, m, mu).unwrap()
    }

    #[test]
    fn man_ndt_values() {
        assert_eq!(delta_man(&one(), 5), zero());
        assert_eq!(delta_man(&rat(1, 2), 4), rat(2, 3));
        assert_eq!(delta_man(&rat(1, 3), 3), one());
    }

    #[test]
    fn one_shot_ndt_values() {
        assert_eq!(delta_os(&cfg(2, 2, rat(1, 2))).unwrap(), rat(5, 4));
        assert_eq!(delta_os(&cfg(1, 2, rat(1, 2))).unwrap(), one());
        // K = mu*M keeps the indicator off: max{2/3, 2/2} = 1
        assert_eq!(delta_os(&cfg(2, 4, rat(1, 2))).unwrap(), one());
        assert!(delta_os(&cfg(2, 2, rat(4, 9))).is_err());
    }

    #[test]
    fn one_shot_matches_corners() {
        for k in 1..=8 {
            for m in 1..=8 {
                assert_eq!(
                    delta_os(&cfg(k, m, zero())).unwrap(),
                    crate::bounds::corner_ndt(crate::bounds::MuCorner::Zero, k, m)
                );
                assert_eq!(
                    delta_os(&cfg(k, m, one())).unwrap(),
                    crate::bounds::corner_ndt(crate::bounds::MuCorner::One, k, m)
                );
            }
        }
    }

    #[test]
    fn region_examples() {
        assert_eq!(classify_region(&cfg(2, 4, rat(1, 2))).unwrap(), Region::A);
        assert_eq!(classify_region(&cfg(1, 3, rat(1, 3))).unwrap(), Region::B);
        assert_eq!(classify_region(&cfg(3, 2, rat(1, 2))).unwrap(), Region::C);
        assert!(classify_region(&cfg(2, 2, zero())).is_err());
        assert!(classify_region(&cfg(2, 2, one())).is_err());
    }

    #[test]
    fn regions_agree_with_formula() {
        for k in 1..=10 {
            for m in 2..=10 {
                for lvl in 1..m {
                    let c = cfg(k, m, rat(lvl as i64, m as i64));
                    let os = delta_os(&c).unwrap();
                    let man = delta_man(&c.mu, m);
                    let cd = (rusize(k) + man.clone()) / rusize(1 + lvl);
                    match classify_region(&c).unwrap() {
                        Region::A => assert_eq!(os, one(), "A at ({k},{m},{lvl})"),
                        Region::B | Region::E => assert_eq!(os, man, "B/E at ({k},{m},{lvl})"),
                        Region::C | Region::D => assert_eq!(os, cd, "C/D at ({k},{m},{lvl})"),
                        _ => unreachable!(),
                    }
                }
            }
        }
    }

    #[test]
    fn subpacketization_examples() {
        let c = subpacketize(&cfg(2, 2, rat(1, 2))).unwrap();
        assert_eq!(
            (
                c.psi,
                c.gamma,
                c.symbols_per_file,
                c.t1,
                c.n_ue,
                c.psi_prime,
                c.t2.clone()
            ),
            (1, 2, 4, 2, 1, 2, rint(3))
        );
        assert_eq!(c.total_t, 5);
        assert_eq!(c.frag_factor, 1);

        let c = subpacketize(&cfg(1, 2, rat(1, 2))).unwrap();
        assert_eq!(
            (c.psi, c.gamma, c.symbols_per_file, c.t1, c.n_ue),
            (1, 1, 2, 1, 1)
        );
        assert_eq!(c.t2, one());

        let c = subpacketize(&cfg(1, 3, rat(1, 3))).unwrap();
        assert_eq!((c.gamma, c.symbols_per_file, c.t1, c.n_ue), (1, 3, 3, 3));
        assert_eq!(c.t2, zero());
    }

    #[test]
    fn fragmentation_kicks_in_for_fractional_loads() {
        // (K, M, mu) = (3, 2, 1/2): T2 = 15/2 so symbols split in two
        let c = subpacketize(&cfg(3, 2, rat(1, 2))).unwrap();
        assert_eq!(c.t2, rat(15, 2));
        assert_eq!(c.frag_factor, 2);
        assert_eq!(c.total_t, 21);
    }

    #[test]
    fn counts_reproduce_one_shot_ndt_on_grids() {
        for k in 1..=6 {
            for m in 1..=6 {
                for lvl in 0..=m {
                    let c = cfg(k, m, rat(lvl as i64, m as i64));
                    let counts = subpacketize(&c).unwrap();
                    let ndt = crate::verify::measure_ndt(
                        counts.total_t,
                        counts.symbols_per_file,
                        counts.frag_factor,
                    );
                    assert_eq!(ndt, delta_os(&c).unwrap(), "mismatch at ({k},{m},{lvl})");
                }
            }
        }
    }

    #[test]
    fn placement_stores_mu_fraction() {
        let c = cfg(2, 2, rat(1, 2));
        let placement = cache_placement(&c).unwrap();
        // RN 1 stores 2 of each file's 4 symbols, those with T = {1}
        let rn1 = &placement[&1];
        let per_file: Vec<_> = rn1.iter().filter(|s| s.file == 1).collect();
        assert_eq!(per_file.len(), 2);
        assert!(per_file.iter().all(|s| s.rn_subset == vec![1]));
        // cached fraction is exactly mu for (K, M, mu) = (1, 3, 2/3)
        let c = cfg(1, 3, rat(2, 3));
        let counts = subpacketize(&c).unwrap();
        let placement = cache_placement(&c).unwrap();
        let cached = placement[&1].iter().filter(|s| s.file == 1).count() as i64;
        assert_eq!(rat(cached, counts.symbols_per_file as i64), rat(2, 3));
    }

    #[test]
    fn full_cache_places_everything_everywhere() {
        let c = cfg(2, 2, one());
        let placement = cache_placement(&c).unwrap();
        let counts = subpacketize(&c).unwrap();
        for rn in 1..=2 {
            assert_eq!(
                placement[&rn].len() as u64,
                counts.symbols_per_file * c.n as u64
            );
            assert!(placement[&rn].iter().all(|s| s.rn_subset == vec![1, 2]));
        }
    }
}

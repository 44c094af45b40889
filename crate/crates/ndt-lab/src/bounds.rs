//! Converse side: the cut-set style lower-bound family on the NDT, its
//! corner values, the closed-form optimal tradeoff for `K + M <= 4`, the
//! lower convex envelope used for memory sharing, and the achievable-DoF
//! transform.
//!
//! The bound family is indexed by a cut of `ell` relay caches and `s` user
//! outputs with `s_bar = M + 1 - s`:
//!
//! ```text
//! delta_LB(mu, ell, s) = [K + ell - mu*(s_bar*(K - s + (s_bar - 1)/2) + ell*(ell+1)/2)] / s
//! ```
//!
//! and the optimal NDT satisfies
//! `delta*(mu) >= max{ 1, max_{ell, s} delta_LB(mu, ell, s) }`.

use crate::config::{NetworkConfig, SchemePoint};
use crate::rational::{Rational, one, rat, rint, rmax, rusize, zero};

/// Parameter ranges for bound evaluation that fall outside the valid
/// `(ell, s)` cut index set or the closed form's `K + M <= 4` domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainError(pub String);

impl std::fmt::Display for DomainError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "domain error: {}", self.0)
    }
}

impl std::error::Error for DomainError {}

/// The cut achieving a lower-bound value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundWitness {
    pub value: Rational,
    /// Number of relay caches in the cut.
    pub ell: usize,
    /// Number of user outputs in the cut.
    pub s: usize,
    /// `M + 1 - s`.
    pub s_bar: usize,
}

/// One bound term `delta_LB(mu, ell, s)`, exact.
pub fn delta_lb_term(
    mu: &Rational,
    ell: usize,
    s: usize,
    k: usize,
    m: usize,
) -> Result<Rational, DomainError> {
    if s < 1 || s > (m + 1).min(k) {
        return Err(DomainError(format!(
            "s = {s} outside [1, min(M+1, K)] for K={k}, M={m}"
        )));
    }
    let s_bar = m + 1 - s;
    if ell < s_bar || ell > m {
        return Err(DomainError(format!("ell = {ell} outside [{s_bar}, {m}]")));
    }
    if *mu < zero() || *mu > one() {
        return Err(DomainError(format!("mu = {mu} outside [0, 1]")));
    }
    let (kq, ellq, sq, sbq) = (rusize(k), rusize(ell), rusize(s), rusize(s_bar));
    let cached = sbq.clone() * (kq.clone() - sq.clone() + (sbq - rint(1)) / rint(2))
        + ellq.clone() * (ellq.clone() + rint(1)) / rint(2);
    Ok((kq + ellq - mu.clone() * cached) / sq)
}

/// Lower bound `max{1, max delta_LB}` plus the maximizing cut.
///
/// The witness is `None` when every bound term is strictly below the
/// interference-free floor of 1. Ties between cuts resolve to the
/// lexicographically smallest `(s, ell)`.
pub fn lower_bound(cfg: &NetworkConfig) -> (Rational, Option<BoundWitness>) {
    let mut best = one();
    let mut witness: Option<BoundWitness> = None;
    for s in 1..=(cfg.m + 1).min(cfg.k) {
        let s_bar = cfg.m + 1 - s;
        for ell in s_bar..=cfg.m {
            let v = delta_lb_term(&cfg.mu, ell, s, cfg.k, cfg.m)
                .expect("valid cut indices by construction");
            if v > best || (v == best && witness.is_none() && v >= one()) {
                best = v.clone();
                witness = Some(BoundWitness {
                    value: v,
                    ell,
                    s,
                    s_bar,
                });
            }
        }
    }
    (best, witness)
}

/// Endpoint of the cache axis: zero cache or full cache.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuCorner {
    Zero,
    One,
}

/// Optimal NDT at the cache-size corners: broadcasting gives `K + M` at
/// `mu = 0`; joint zero-forcing over `M + 1` transmitters gives
/// `max{1, K/(M+1)}` at `mu = 1`.
pub fn corner_ndt(corner: MuCorner, k: usize, m: usize) -> Rational {
    match corner {
        MuCorner::Zero => rusize(k + m),
        MuCorner::One => rmax(one(), rat(k as i64, (m + 1) as i64)),
    }
}

/// Closed-form optimal tradeoff for `K + M <= 4` together with a flag
/// telling whether the `s = 2` terms were dropped because `K < 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedTradeoff {
    pub value: Rational,
    /// True when the two `s = 2` cut terms are outside their valid domain
    /// (`K = 1`) and were therefore excluded from the max.
    pub conditional_rule_fired: bool,
}

/// Optimal NDT tradeoff for small networks (`K + M <= 4`), as the max of
/// the unity floor and up to three cut bounds. The two `s = 2` terms
/// require `s <= min(M+1, K)`, so they enter only when `K >= 2`; at
/// `K = 1` the literal four-term max would exceed the achievable value.
pub fn optimal_tradeoff_closed(cfg: &NetworkConfig) -> Result<Rational, DomainError> {
    Ok(optimal_tradeoff_closed_detailed(cfg)?.value)
}

pub fn optimal_tradeoff_closed_detailed(
    cfg: &NetworkConfig,
) -> Result<ClosedTradeoff, DomainError> {
    let (k, m) = (cfg.k, cfg.m);
    if k + m > 4 {
        return Err(DomainError(format!(
            "closed tradeoff needs K + M <= 4, got {}",
            k + m
        )));
    }
    let mu = &cfg.mu;
    let (kq, mq) = (rusize(k), rusize(m));
    // delta_LB(mu, M, 1) = K + M - mu*M*(K + M - 1)
    let t2 =
        kq.clone() + mq.clone() - mu.clone() * mq.clone() * (kq.clone() + mq.clone() - rint(1));
    let mut value = rmax(one(), t2);
    let mut fired = false;
    if k >= 2 {
        // delta_LB(mu, M, 2) and delta_LB(mu, M-1, 2) in closed form
        let inner = mq.clone() * mq.clone() + (kq.clone() - rint(3)) * (mq.clone() - rint(1));
        let t3 = (kq.clone() + mq.clone() - mu.clone() * inner.clone()) / rint(2);
        let t4 = (kq + mq - rint(1) - mu.clone() * (inner - rusize(m))) / rint(2);
        value = rmax(value, rmax(t3, t4));
    } else {
        fired = true;
    }
    Ok(ClosedTradeoff {
        value,
        conditional_rule_fired: fired,
    })
}

/// Breakpoint of a convex piecewise-linear envelope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvelopePoint {
    pub mu: Rational,
    pub ndt: Rational,
}

/// Lower convex envelope over achievable points, exact in rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    breakpoints: Vec<EnvelopePoint>,
}

/// Envelope construction requires both cache-axis endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnvelopeError {
    MissingEndpoint(&'static str),
    Empty,
}

impl std::fmt::Display for EnvelopeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EnvelopeError::MissingEndpoint(which) => {
                write!(f, "envelope needs an achievable point at mu = {which}")
            }
            EnvelopeError::Empty => write!(f, "envelope needs at least one point"),
        }
    }
}

impl std::error::Error for EnvelopeError {}

/// Lower convex envelope of achievable scheme points (memory sharing).
///
/// Points must include `mu = 0` and `mu = 1`; duplicate cache sizes keep
/// their smallest NDT. The evaluator interpolates linearly between
/// consecutive hull breakpoints with exact rational slopes.
pub fn lower_convex_envelope(points: &[SchemePoint]) -> Result<Envelope, EnvelopeError> {
    if points.is_empty() {
        return Err(EnvelopeError::Empty);
    }
    let mut pts: Vec<(Rational, Rational)> = points
        .iter()
        .map(|p| (p.mu.clone(), p.ndt.clone()))
        .collect();
    pts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    pts.dedup_by(|later, first| {
        if later.0 == first.0 {
            // keep the smaller NDT at equal mu
            if later.1 < first.1 {
                first.1 = later.1.clone();
            }
            true
        } else {
            false
        }
    });
    if pts.first().map(|p| &p.0) != Some(&zero()) {
        return Err(EnvelopeError::MissingEndpoint("0"));
    }
    if pts.last().map(|p| &p.0) != Some(&one()) {
        return Err(EnvelopeError::MissingEndpoint("1"));
    }
    // lower hull by monotone chain: pop while the middle point lies on or
    // above the chord (cross product <= 0 keeps the hull strictly convex)
    let mut hull: Vec<(Rational, Rational)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            let cross = (b.0.clone() - a.0.clone()) * (p.1.clone() - a.1.clone())
                - (b.1.clone() - a.1.clone()) * (p.0.clone() - a.0.clone());
            if cross <= zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    Ok(Envelope {
        breakpoints: hull
            .into_iter()
            .map(|(mu, ndt)| EnvelopePoint { mu, ndt })
            .collect(),
    })
}

impl Envelope {
    pub fn breakpoints(&self) -> &[EnvelopePoint] {
        &self.breakpoints
    }

    /// Exact envelope value at `mu` in [0, 1].
    pub fn eval(&self, mu: &Rational) -> Rational {
        let bps = &self.breakpoints;
        assert!(*mu >= zero() && *mu <= one(), "mu outside [0, 1]");
        let hi = bps.partition_point(|p| p.mu <= *mu);
        if hi == 0 {
            return bps[0].ndt.clone();
        }
        let a = &bps[hi - 1];
        if a.mu == *mu || hi == bps.len() {
            return a.ndt.clone();
        }
        let b = &bps[hi];
        let t = (mu.clone() - a.mu.clone()) / (b.mu.clone() - a.mu.clone());
        a.ndt.clone() + t * (b.ndt.clone() - a.ndt.clone())
    }
}

/// Achievable sum DoF at a given NDT: `(K + M*(1 - mu)) / ndt`.
pub fn achievable_dof(cfg: &NetworkConfig, ndt: &Rational) -> Rational {
    let load = rusize(cfg.k) + rusize(cfg.m) * (one() - cfg.mu.clone());
    load / ndt.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SchemeLabel;

    fn cfg(k: usize, m: usize, mu: Rational) -> NetworkConfig {
        NetworkConfig::new(k, m, mu).unwrap()
    }

    #[test]
    fn bound_term_corner_values() {
        // delta_LB(0, M, 1) = K + M
        assert_eq!(delta_lb_term(&zero(), 1, 1, 3, 1).unwrap(), rint(4));
        // delta_LB(1, 0, M+1) = K / (M + 1)
        assert_eq!(delta_lb_term(&one(), 0, 2, 4, 1).unwrap(), rint(2));
        // hand evaluation at (K, M) = (2, 2): 4 - 6 mu
        let mu = rat(4, 9);
        let by_formula = rint(4) - rint(6) * mu.clone();
        assert_eq!(delta_lb_term(&mu, 2, 1, 2, 2).unwrap(), by_formula);
        assert_eq!(delta_lb_term(&mu, 2, 1, 2, 2).unwrap(), rat(4, 3));
    }

    #[test]
    fn bound_term_domain_errors() {
        assert!(delta_lb_term(&zero(), 0, 1, 3, 1).is_err()); // ell < s_bar
        assert!(delta_lb_term(&zero(), 1, 3, 3, 1).is_err()); // s > min(M+1, K)
        assert!(delta_lb_term(&rat(3, 2), 1, 1, 3, 1).is_err());
    }

    #[test]
    fn lower_bound_known_corner_values() {
        let (v, w) = lower_bound(&cfg(3, 1, rat(4, 5)));
        assert_eq!(v, rat(8, 5));
        let w = w.unwrap();
        assert_eq!((w.s, w.ell), (1, 1));
        let (v, _) = lower_bound(&cfg(2, 2, rat(1, 2)));
        assert_eq!(v, rat(5, 4));
        let (v, _) = lower_bound(&cfg(1, 3, one()));
        assert_eq!(v, one());
    }

    #[test]
    fn corner_values_match_bound_family() {
        assert_eq!(corner_ndt(MuCorner::Zero, 2, 2), rint(4));
        assert_eq!(corner_ndt(MuCorner::One, 4, 1), rint(2));
        assert_eq!(corner_ndt(MuCorner::One, 1, 3), one());
        // corners agree with the bound family
        for k in 1..=8 {
            for m in 1..=8 {
                assert_eq!(
                    lower_bound(&cfg(k, m, zero())).0,
                    corner_ndt(MuCorner::Zero, k, m)
                );
                assert_eq!(
                    lower_bound(&cfg(k, m, one())).0,
                    corner_ndt(MuCorner::One, k, m)
                );
            }
        }
    }

    #[test]
    fn closed_tradeoff_reproduces_corner_points() {
        assert_eq!(
            optimal_tradeoff_closed(&cfg(2, 2, rat(4, 9))).unwrap(),
            rat(4, 3)
        );
        assert_eq!(
            optimal_tradeoff_closed(&cfg(3, 1, rat(4, 5))).unwrap(),
            rat(8, 5)
        );
        assert_eq!(
            optimal_tradeoff_closed(&cfg(1, 2, rat(1, 2))).unwrap(),
            one()
        );
        assert!(optimal_tradeoff_closed(&cfg(5, 5, rat(1, 2))).is_err());
    }

    #[test]
    fn conditional_rule_only_fires_for_single_user() {
        let d = optimal_tradeoff_closed_detailed(&cfg(1, 3, rat(1, 3))).unwrap();
        assert!(d.conditional_rule_fired);
        assert_eq!(d.value, one());
        let d = optimal_tradeoff_closed_detailed(&cfg(2, 2, rat(1, 3))).unwrap();
        assert!(!d.conditional_rule_fired);
    }

    fn pt(mu: Rational, ndt: Rational) -> SchemePoint {
        SchemePoint::new(mu, ndt, SchemeLabel::OneShot)
    }

    #[test]
    fn envelope_interpolates_exactly() {
        let env = lower_convex_envelope(&[
            pt(zero(), rint(4)),
            pt(rat(1, 2), rat(5, 4)),
            pt(one(), one()),
        ])
        .unwrap();
        // 4 + (4/9)/(1/2) * (5/4 - 4) = 14/9
        assert_eq!(env.eval(&rat(4, 9)), rat(14, 9));
        assert_eq!(env.eval(&zero()), rint(4));
        let two_pt = lower_convex_envelope(&[pt(zero(), rint(2)), pt(one(), one())]).unwrap();
        assert_eq!(two_pt.eval(&rat(1, 2)), rat(3, 2));
    }

    #[test]
    fn envelope_drops_points_above_hull() {
        let env = lower_convex_envelope(&[
            pt(zero(), rint(4)),
            pt(rat(1, 2), rint(4)), // dominated
            pt(one(), one()),
        ])
        .unwrap();
        assert_eq!(env.breakpoints().len(), 2);
        assert_eq!(env.eval(&rat(1, 2)), rat(5, 2));
    }

    #[test]
    fn envelope_requires_endpoints() {
        let err = lower_convex_envelope(&[pt(rat(1, 2), one()), pt(one(), one())]).unwrap_err();
        assert_eq!(err, EnvelopeError::MissingEndpoint("0"));
        let err = lower_convex_envelope(&[pt(zero(), rint(2))]).unwrap_err();
        assert_eq!(err, EnvelopeError::MissingEndpoint("1"));
    }

    #[test]
    fn dof_examples() {
        let c = cfg(4, 2, zero());
        assert_eq!(achievable_dof(&c, &rint(6)), one());
        let c = cfg(3, 1, one());
        assert_eq!(achievable_dof(&c, &rat(3, 2)), rint(2));
        let c = cfg(2, 2, rat(1, 2));
        assert_eq!(achievable_dof(&c, &rat(5, 4)), rat(12, 5));
    }
}

//! Linear-algebra certification: effective coefficient matrices, the
//! zero-forcing / alignment / decodability checks every scheme run must
//! pass, and exact NDT measurement.
//!
//! An [`EffectiveMatrix`] collects, per receiver, the effective complex
//! coefficient of every in-flight symbol over all channel uses. Users see
//! `g_k nu + sum_m h_{km} beta^{(m)}`; relays hear only the DeNB and see
//! `f_m nu` with their cached symbols cancelled to exactly zero.

use crate::channel::ChannelState;
use crate::linalg::{C64, CMatrix, CVector, condition_number, numerical_rank, solve};
use crate::rational::{Rational, rat};
use std::collections::BTreeMap;

/// Default relative tolerance for zero-forcing and alignment residuals.
pub const CHECK_TOL: f64 = 1e-10;

/// Receiving node of the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
pub enum Receiver {
    Ue(usize),
    Rn(usize),
}

impl std::fmt::Display for Receiver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Receiver::Ue(k) => write!(f, "UE{k}"),
            Receiver::Rn(m) => write!(f, "RN{m}"),
        }
    }
}

/// Per-receiver effective coefficient matrix: rows are channel uses,
/// columns are symbols in a fixed label order.
#[derive(Debug, Clone)]
pub struct EffectiveMatrix<L: Ord + Clone> {
    pub receiver: Receiver,
    pub labels: Vec<L>,
    pub data: CMatrix,
}

/// Coefficient frames and labels don't line up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeMismatch(pub String);

impl std::fmt::Display for ShapeMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "shape mismatch: {}", self.0)
    }
}

impl std::error::Error for ShapeMismatch {}

/// Per-use coefficient map of one transmitter layout:
/// `nu[label]` at the DeNB, `beta[(label, rn)]` at the relays.
#[derive(Debug, Clone, Default)]
pub struct CoeffFrame<L: Ord + Clone> {
    pub nu: BTreeMap<L, C64>,
    pub beta: BTreeMap<(L, usize), C64>,
}

impl<L: Ord + Clone> CoeffFrame<L> {
    pub fn nu_of(&self, l: &L) -> C64 {
        self.nu
            .get(l)
            .copied()
            .unwrap_or_else(|| C64::new(0.0, 0.0))
    }

    pub fn beta_of(&self, l: &L, rn: usize) -> C64 {
        self.beta
            .get(&(l.clone(), rn))
            .copied()
            .unwrap_or_else(|| C64::new(0.0, 0.0))
    }
}

/// Assemble the effective matrix of `receiver` from per-use frames.
///
/// `cached` lists the labels the receiver cancels (relays only).
pub fn effective_matrix<L: Ord + Clone>(
    frames: &[CoeffFrame<L>],
    channels: &[ChannelState],
    labels: &[L],
    cached: &[L],
    receiver: Receiver,
    rn_count: usize,
) -> Result<EffectiveMatrix<L>, ShapeMismatch> {
    if frames.len() != channels.len() {
        return Err(ShapeMismatch(format!(
            "{} frames but {} channel states",
            frames.len(),
            channels.len()
        )));
    }
    let mut data = CMatrix::zeros(frames.len(), labels.len());
    for (t, (frame, ch)) in frames.iter().zip(channels).enumerate() {
        for (j, label) in labels.iter().enumerate() {
            data[(t, j)] = match receiver {
                Receiver::Ue(k) => {
                    let mut acc = ch.g_of(k) * frame.nu_of(label);
                    for rn in 1..=rn_count {
                        acc += ch.h_of(k, rn) * frame.beta_of(label, rn);
                    }
                    acc
                }
                Receiver::Rn(m) => {
                    if cached.contains(label) {
                        C64::new(0.0, 0.0)
                    } else {
                        ch.f_of(m) * frame.nu_of(label)
                    }
                }
            };
        }
    }
    Ok(EffectiveMatrix {
        receiver,
        labels: labels.to_vec(),
        data,
    })
}

impl<L: Ord + Clone + std::fmt::Debug> EffectiveMatrix<L> {
    pub fn column_of(&self, label: &L) -> CVector {
        let j = self.index_of(label);
        self.data.column(j).into_owned()
    }

    pub fn index_of(&self, label: &L) -> usize {
        self.labels
            .iter()
            .position(|l| l == label)
            .unwrap_or_else(|| {
                panic!("label {label:?} not in matrix");
            })
    }
}

/// Zero-forcing residual report over (symbol, nulled receiver) pairs.
#[derive(Debug, Clone)]
pub struct ZfReport {
    /// Largest `|coefficient| / column scale` over all pairs.
    pub max_relative_residual: f64,
    pub pass: bool,
}

/// Check that every `(label, receiver)` pair in `zf_map` carries only a
/// vanishing coefficient. The scale of a column is its largest magnitude
/// across all given receiver matrices; all-zero columns count as residual
/// zero.
pub fn check_zero_forcing<L: Ord + Clone + std::fmt::Debug>(
    matrices: &[&EffectiveMatrix<L>],
    zf_map: &[(L, Receiver)],
    tol: f64,
) -> ZfReport {
    let mut worst: f64 = 0.0;
    for (label, rx) in zf_map {
        let scale = matrices
            .iter()
            .flat_map(|m| {
                m.column_of(label)
                    .iter()
                    .map(|c| c.norm())
                    .collect::<Vec<_>>()
            })
            .fold(0.0, f64::max);
        let here = matrices
            .iter()
            .find(|m| m.receiver == *rx)
            .expect("zero-forcing target matrix present");
        let peak = here
            .column_of(label)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        let rel = if scale == 0.0 { 0.0 } else { peak / scale };
        worst = worst.max(rel);
    }
    ZfReport {
        max_relative_residual: worst,
        pass: worst < tol,
    }
}

/// Alignment check report.
#[derive(Debug, Clone)]
pub struct AlignmentReport {
    /// Largest entrywise deviation relative to the group magnitude.
    pub max_relative_deviation: f64,
    /// True when some group carries only zero columns and therefore
    /// cannot hold an aligned sum.
    pub vacuous_failure: bool,
    pub pass: bool,
}

/// Check that within each group all symbol columns are equal entrywise
/// (the constructions share coefficients exactly, so this is equality,
/// not proportionality) within `tol` times the group's peak magnitude.
pub fn check_alignment<L: Ord + Clone + std::fmt::Debug>(
    matrix: &EffectiveMatrix<L>,
    groups: &[Vec<L>],
    tol: f64,
) -> AlignmentReport {
    let mut worst: f64 = 0.0;
    let mut vacuous = false;
    for group in groups {
        assert!(!group.is_empty(), "alignment group must be nonempty");
        let cols: Vec<CVector> = group.iter().map(|l| matrix.column_of(l)).collect();
        let scale = cols
            .iter()
            .flat_map(|c| c.iter().map(|x| x.norm()))
            .fold(0.0, f64::max);
        if scale == 0.0 {
            vacuous = true;
            continue;
        }
        for c in &cols[1..] {
            let dev = (c - &cols[0]).norm() / scale;
            worst = worst.max(dev);
        }
    }
    AlignmentReport {
        max_relative_deviation: worst,
        vacuous_failure: vacuous,
        pass: !vacuous && worst < tol,
    }
}

/// Decodability verdict for one receiver.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DecodabilityReport {
    pub receiver: Receiver,
    pub desired_rank_ok: bool,
    pub alignment_ok: bool,
    pub zf_residual_max: f64,
    pub grouped_condition_number: f64,
    pub verdict: bool,
}

impl DecodabilityReport {
    /// Fold in zero-forcing and alignment outcomes from the other checks.
    pub fn with_checks(mut self, zf_residual_max: f64, zf_pass: bool, alignment_ok: bool) -> Self {
        self.zf_residual_max = zf_residual_max;
        self.alignment_ok = alignment_ok;
        self.verdict = self.desired_rank_ok && alignment_ok && zf_pass;
        self
    }
}

/// Grouped matrix of a receiver: desired columns plus one representative
/// column per aligned group, all normalized to unit norm.
pub fn grouped_matrix<L: Ord + Clone + std::fmt::Debug>(
    matrix: &EffectiveMatrix<L>,
    desired: &[L],
    groups: &[Vec<L>],
) -> CMatrix {
    let mut cols: Vec<CVector> = Vec::with_capacity(desired.len() + groups.len());
    for d in desired {
        cols.push(matrix.column_of(d));
    }
    for g in groups {
        cols.push(matrix.column_of(&g[0]));
    }
    let rows = matrix.data.nrows();
    let mut out = CMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        let norm = c.norm();
        let scaled = if norm > 0.0 {
            c / C64::new(norm, 0.0)
        } else {
            c.clone()
        };
        out.set_column(j, &scaled);
    }
    out
}

/// Rank/conditioning check on the grouped matrix: full column rank at the
/// SVD threshold and condition number below 1e10.
pub fn check_decodability<L: Ord + Clone + std::fmt::Debug>(
    matrix: &EffectiveMatrix<L>,
    desired: &[L],
    groups: &[Vec<L>],
) -> DecodabilityReport {
    assert!(
        desired
            .iter()
            .all(|d| groups.iter().all(|g| !g.contains(d))),
        "desired symbols must be disjoint from aligned groups"
    );
    let grouped = grouped_matrix(matrix, desired, groups);
    let need = grouped.ncols();
    let rank = numerical_rank(&grouped);
    let cond = condition_number(&grouped);
    let ok = rank == need && cond < crate::linalg::COND_LIMIT;
    DecodabilityReport {
        receiver: matrix.receiver,
        desired_rank_ok: ok,
        alignment_ok: true,
        zf_residual_max: 0.0,
        grouped_condition_number: cond,
        verdict: ok,
    }
}

/// Round-trip oracle: give every symbol a synthetic value, form the
/// receive vector through the full effective matrix, solve the grouped
/// system, and return the worst relative error on the desired symbols.
pub fn round_trip_error<L: Ord + Clone + std::fmt::Debug>(
    matrix: &EffectiveMatrix<L>,
    desired: &[L],
    groups: &[Vec<L>],
    values: &BTreeMap<L, C64>,
) -> f64 {
    let mut y = CVector::zeros(matrix.data.nrows());
    for (j, label) in matrix.labels.iter().enumerate() {
        let v = values
            .get(label)
            .copied()
            .unwrap_or_else(|| C64::new(0.0, 0.0));
        y += matrix.data.column(j) * v;
    }
    // unknowns: desired values, then per-group aligned sums
    let mut a = CMatrix::zeros(matrix.data.nrows(), desired.len() + groups.len());
    for (j, d) in desired.iter().enumerate() {
        a.set_column(j, &matrix.column_of(d));
    }
    for (j, g) in groups.iter().enumerate() {
        a.set_column(desired.len() + j, &matrix.column_of(&g[0]));
    }
    let Some(x) = solve(&a, &y) else {
        return f64::INFINITY;
    };
    let mut worst: f64 = 0.0;
    for (j, d) in desired.iter().enumerate() {
        let truth = values[d];
        let err = (x[j] - truth).norm() / truth.norm().max(1e-300);
        worst = worst.max(err);
    }
    worst
}

/// Exact NDT of a finished schedule: channel uses per delivered file
/// symbol, `total_t / (frag * symbols_per_file)`.
pub fn measure_ndt(total_t: u64, symbols_per_file: u64, frag_factor: u64) -> Rational {
    assert!(symbols_per_file > 0 && frag_factor > 0);
    rat(total_t as i64, (frag_factor * symbols_per_file) as i64)
}

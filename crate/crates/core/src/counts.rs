//! Point counts as functions of `q`: dispatch over the coefficient ring
//! kind and exact interpolation to polynomials in `q`.

use serde::Serialize;

use crate::coweight::Coweight;
use crate::error::{Error, Result};
use crate::lattice::{self, window_for};
use crate::poly::{interpolate, QPolynomial, Q_GRID};
use crate::ring::{CoefficientRing, RingKind};
use crate::with_ring;

/// What is being counted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CountQuery {
    /// `|Gr_mu|`.
    Cell { mu: Coweight },
    /// `|Gr_{<=mu}|`.
    Leq { mu: Coweight },
    /// `|S_lambda ∩ Gr_mu|`.
    Mv { lambda: Coweight, mu: Coweight },
    /// `|S_lambda ∩ Gr_{<=mu}|`.
    MvLeq { lambda: Coweight, mu: Coweight },
    /// Chains with the given steps.
    Chain { steps: Vec<Coweight> },
    /// Chains with the given steps ending at `p^lambda Lambda_0`.
    Fiber { steps: Vec<Coweight>, lambda: Coweight },
}

impl CountQuery {
    pub fn rank(&self) -> usize {
        match self {
            CountQuery::Cell { mu } | CountQuery::Leq { mu } => mu.rank(),
            CountQuery::Mv { mu, .. } | CountQuery::MvLeq { mu, .. } => mu.rank(),
            CountQuery::Chain { steps } => steps.first().map_or(0, |m| m.rank()),
            CountQuery::Fiber { lambda, .. } => lambda.rank(),
        }
    }

    /// Ring precision that makes the count exact.
    pub fn precision(&self) -> u32 {
        match self {
            CountQuery::Cell { mu } | CountQuery::Leq { mu } => window_for(mu).precision(),
            CountQuery::Mv { mu, .. } | CountQuery::MvLeq { mu, .. } => window_for(mu).precision(),
            CountQuery::Chain { steps } => lattice::chain_precision(steps),
            CountQuery::Fiber { steps, lambda } => {
                lattice::chain_precision(steps) + (lambda.max_entry() - lambda.min_entry()) as u32
            }
        }
    }

    /// A priori upper bound on the degree in `q` of the count.
    pub fn degree_bound(&self) -> u32 {
        let two_rho = |m: &Coweight| m.dominant().pairing_2rho().max(0) as u32;
        match self {
            CountQuery::Cell { mu } | CountQuery::Leq { mu } => two_rho(mu),
            CountQuery::Mv { mu, .. } | CountQuery::MvLeq { mu, .. } => two_rho(mu),
            CountQuery::Chain { steps } | CountQuery::Fiber { steps, .. } => steps.iter().map(two_rho).sum(),
        }
    }

    pub fn count(&self, kind: RingKind, q: u64) -> Result<u64> {
        let ring = CoefficientRing::with_order(kind, q, self.precision())?;
        with_ring!(&ring, r => match self {
            CountQuery::Cell { mu } => lattice::count_cell(r, mu),
            CountQuery::Leq { mu } => lattice::count_leq(r, mu),
            CountQuery::Mv { lambda, mu } => lattice::count_mv(r, lambda, mu),
            CountQuery::MvLeq { lambda, mu } => lattice::count_mv_leq(r, lambda, mu),
            CountQuery::Chain { steps } => lattice::count_chains(r, steps),
            CountQuery::Fiber { steps, lambda } => lattice::convolution_fiber_count(r, steps, lambda),
        })
    }

    /// The count as a polynomial in `q`, certified by one surplus point.
    pub fn polynomial(&self, kind: RingKind) -> Result<QPolynomial> {
        fit_over_q(self.degree_bound(), |q| self.count(kind, q))
    }
}

/// Fits a polynomial of degree `<= bound` through counts on [`Q_GRID`],
/// using `bound + 2` sample points.
pub fn fit_over_q(bound: u32, f: impl Fn(u64) -> Result<u64>) -> Result<QPolynomial> {
    let need = bound as usize + 2;
    if need > Q_GRID.len() {
        return Err(Error::Unsupported(format!("degree bound {bound} exceeds the sample grid")));
    }
    let mut pts = Vec::with_capacity(need);
    for &q in &Q_GRID[..need] {
        pts.push((q as i64, f(q)? as i128));
    }
    let fit = interpolate(&pts);
    match (fit.certified, fit.to_integer()) {
        (true, Some(p)) => Ok(p),
        _ => Err(Error::Domain("counts are not an integer polynomial in q of the expected degree".into())),
    }
}

//! Average ergodic rates: `R = ∫_0^∞ P(SIR > 2^τ − 1) dτ`.
//!
//! The AU integrands vanish exactly at the NOMA SIR ceilings, so the
//! conditional AU rates integrate over `[0, log2(1 + ρ_u/ρ_t))` and
//! `[0, log2(1 + 2ρ_u/ρ_t))`; the TU integrand has no ceiling and decays
//! double-exponentially in τ. Case rates are association-weighted into the
//! non-CoMP/CoMP split and the network total.

use std::cell::Cell;

use rayon::prelude::*;

use crate::assoc::AuCase;
use crate::error::ModelError;
use crate::quad::{integrate, integrate_semi_inf, Quadrature, TailMap};

use super::AnalyticModel;

/// Association-weighted ergodic rates, bits/s/Hz.
#[derive(Debug, Clone, Copy)]
pub struct RateTotals {
    /// Conditional per-case rates; `NaN` where the case has vanishing
    /// association probability (its weighted contribution is zero).
    pub per_case: [f64; 6],
    /// Association probabilities used as weights.
    pub weights: [f64; 6],
    /// AU rate through the non-cooperative cases.
    pub r_u_noncomp: f64,
    /// AU rate through the cooperative cases.
    pub r_u_comp: f64,
    /// Total AU rate.
    pub r_u_total: f64,
    /// TU rate.
    pub r_t: f64,
    /// Network total, AU + TU.
    pub r_total: f64,
    /// Accumulated quadrature error estimate on the total.
    pub error: f64,
}

/// Conditional ergodic rate of one association case.
pub(super) fn rate_case(m: &AnalyticModel, case: AuCase) -> Result<Quadrature, ModelError> {
    let cfg = m.cfg();
    let ceiling = if case.is_comp() {
        cfg.comp_noma_sir_ceiling()
    } else {
        cfg.noma_sir_ceiling()
    };
    let tau_max = (1.0 + ceiling).log2();
    let failure: Cell<Option<ModelError>> = Cell::new(None);
    let worst = Cell::new(0.0f64);
    let q = integrate(
        |tau| {
            let t = (2f64).powf(tau) - 1.0;
            if t <= 0.0 {
                return 1.0;
            }
            match m.coverage_case(case, t) {
                Ok(p) => {
                    worst.set(worst.get().max(p.error));
                    p.value
                }
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            }
        },
        0.0,
        tau_max,
        m.rate_spec(),
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(Quadrature {
        value: q.value,
        error: q.error + worst.get() * tau_max,
        converged: q.converged,
    })
}

/// TU ergodic rate.
pub(super) fn tu_rate(m: &AnalyticModel) -> Result<Quadrature, ModelError> {
    let failure: Cell<Option<ModelError>> = Cell::new(None);
    let worst = Cell::new(0.0f64);
    let q = integrate_semi_inf(
        |tau| {
            let t = (2f64).powf(tau) - 1.0;
            if t <= 0.0 {
                return 1.0;
            }
            match m.coverage_tu(t) {
                Ok(p) => {
                    worst.set(worst.get().max(p.error));
                    p.value
                }
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            }
        },
        0.0,
        3.0,
        TailMap::Exponential,
        m.rate_spec(),
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(Quadrature {
        value: q.value,
        error: q.error + worst.get() * 8.0,
        converged: q.converged,
    })
}

/// Association-weighted rate decomposition and total.
///
/// The seven independent integrals (six cases plus the TU) run in parallel.
pub(super) fn rate_totals(m: &AnalyticModel) -> Result<RateTotals, ModelError> {
    let assoc = m.assoc_probs()?;
    let case_rates: Vec<Result<Option<Quadrature>, ModelError>> = AuCase::ALL
        .par_iter()
        .map(|&case| {
            let a = assoc[case.index()].value;
            // A vanished case (e.g. cooperative cases at θ = 1) contributes
            // nothing; its conditional rate is left undefined.
            if a < 1e-9 {
                return Ok(None);
            }
            rate_case(m, case).map(Some)
        })
        .collect();
    let mut per_case = [f64::NAN; 6];
    let mut weights = [0.0; 6];
    let mut r_u_noncomp = 0.0;
    let mut r_u_comp = 0.0;
    let mut error = 0.0;
    for case in AuCase::ALL {
        let idx = case.index();
        let a = assoc[idx].value;
        weights[idx] = a;
        let Some(r) = case_rates[idx].clone()? else {
            continue;
        };
        per_case[idx] = r.value;
        error += a * r.error + assoc[idx].error * r.value;
        if case.is_comp() {
            r_u_comp += a * r.value;
        } else {
            r_u_noncomp += a * r.value;
        }
    }
    let tu = tu_rate(m)?;
    error += tu.error;
    let r_u_total = r_u_noncomp + r_u_comp;
    Ok(RateTotals {
        per_case,
        weights,
        r_u_noncomp,
        r_u_comp,
        r_u_total,
        r_t: tu.value,
        r_total: r_u_total + tu.value,
        error,
    })
}

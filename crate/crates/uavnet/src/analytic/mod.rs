//! Numerical evaluation of the closed-form network metrics: distance
//! distributions, association probabilities, Laplace-transform coverage
//! probabilities, and ergodic rates.
//!
//! [`AnalyticModel`] validates a configuration once, precomputes the radial
//! intensity tables, and exposes every metric as a method returning a value
//! with a quadrature error estimate. All methods are pure with respect to
//! observable state and safe to call concurrently.

mod coverage;
mod distance;
mod intensity;
mod laplace;
mod rate;

pub use laplace::{gamma_match, gamma_match_nearest, laplace_kernel, Exclusion, GammaSurrogate, LaplaceKernel, MAX_ORDERS};
pub use rate::RateTotals;

use std::sync::OnceLock;

use crate::assoc::AuCase;
use crate::error::ModelError;
use crate::netmodel::{LinkType, NetworkConfig};
use crate::quad::{Quadrature, QuadratureSpec};

use distance::DistanceModel;

/// Numerical evaluator bound to one validated configuration.
#[derive(Debug)]
pub struct AnalyticModel {
    dist: DistanceModel,
    quad: QuadratureSpec,
    kernel_spec: QuadratureSpec,
    assoc_spec: QuadratureSpec,
    rate_spec: QuadratureSpec,
    assoc_cache: OnceLock<[Quadrature; 6]>,
}

impl AnalyticModel {
    /// Builds the evaluator with the default quadrature budget.
    pub fn new(cfg: NetworkConfig) -> Result<Self, ModelError> {
        Self::with_quadrature(
            cfg,
            QuadratureSpec {
                rel_tol: 1e-6,
                abs_tol: 1e-9,
                max_depth: 44,
            },
        )
    }

    /// Builds the evaluator with an explicit master quadrature budget; the
    /// per-layer specifications are derived from it.
    pub fn with_quadrature(cfg: NetworkConfig, quad: QuadratureSpec) -> Result<Self, ModelError> {
        cfg.validate()?;
        if 2 * cfg.m_l.max(cfg.m_n) as usize > MAX_ORDERS {
            return Err(ModelError::config(
                "m_l",
                format!("fading orders above {} are not supported by the derivative table", MAX_ORDERS / 2),
            ));
        }
        let kernel_spec = QuadratureSpec {
            rel_tol: (quad.rel_tol * 3.0).max(3e-7),
            // Absolute budget of ~1e−9 on μ itself.
            abs_tol: 1e-9 / (2.0 * core::f64::consts::PI * cfg.lambda_b),
            max_depth: quad.max_depth,
        };
        let assoc_spec = QuadratureSpec {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_depth: quad.max_depth,
        };
        let rate_spec = QuadratureSpec {
            rel_tol: 5e-4,
            abs_tol: 1e-6,
            max_depth: 14,
        };
        Ok(AnalyticModel {
            dist: DistanceModel::new(cfg),
            quad,
            kernel_spec,
            assoc_spec,
            rate_spec,
            assoc_cache: OnceLock::new(),
        })
    }

    pub fn cfg(&self) -> &NetworkConfig {
        &self.dist.cfg
    }

    pub(crate) fn dist(&self) -> &DistanceModel {
        &self.dist
    }

    pub(crate) fn kernel_spec(&self) -> &QuadratureSpec {
        &self.kernel_spec
    }

    pub(crate) fn rate_spec(&self) -> &QuadratureSpec {
        &self.rate_spec
    }

    /// Per-level spec of the two-level coverage nests.
    pub(crate) fn coverage_level(&self) -> QuadratureSpec {
        self.quad.per_level(2)
    }

    // ------------------------------------------------------------------
    // Distance layer
    // ------------------------------------------------------------------

    /// Mean number of type-`v` BSs within horizontal radius `x` of the AU's
    /// ground projection.
    pub fn void_exponent(&self, link: LinkType, x: f64) -> f64 {
        self.dist.void_exponent(link, x)
    }

    /// Nearest type-`v` BS distance density at 3D distance `r`.
    pub fn nearest_pdf(&self, link: LinkType, r: f64) -> f64 {
        self.dist.nearest_pdf(link, r)
    }

    /// Nearest type-`v` BS distance CDF at 3D distance `r`.
    pub fn nearest_cdf(&self, link: LinkType, r: f64) -> f64 {
        if r <= self.cfg().delta_h_u() {
            return 0.0;
        }
        1.0 - self.dist.void_probability_3d(link, r)
    }

    /// Joint serving-distance density of a cooperative case (the form used
    /// inside the association integrals; see the distance layer docs).
    pub fn joint_pdf(&self, case: AuCase, r0: f64, r1: f64) -> f64 {
        self.dist.joint_pdf(case, r0, r1)
    }

    /// Event density of a non-cooperative case at serving distance `r`.
    pub fn event_density_noncomp(&self, case: AuCase, r: f64) -> f64 {
        self.dist.event_density_noncomp(case, r)
    }

    /// Event density of a cooperative case at serving pair `(r0, r1)`.
    pub fn event_density_comp(&self, case: AuCase, r0: f64, r1: f64) -> f64 {
        self.dist.event_density_comp(case, r0, r1)
    }

    /// Partner-distance interval of a cooperative case at primary distance
    /// `r0` (empty when the upper end does not exceed the lower).
    pub fn comp_support(&self, case: AuCase, r0: f64) -> (f64, f64) {
        self.dist.comp_support(case, r0)
    }

    /// Lower end of the primary-distance domain of a case.
    pub fn outer_lower(&self, case: AuCase) -> f64 {
        self.dist.outer_lower(case)
    }

    // ------------------------------------------------------------------
    // Association probabilities and conditional serving densities
    // ------------------------------------------------------------------

    /// Association probability of one case.
    pub fn assoc_prob(&self, case: AuCase) -> Result<Quadrature, ModelError> {
        Ok(self.assoc_probs()?[case.index()])
    }

    /// All six association probabilities (cached after the first call).
    pub fn assoc_probs(&self) -> Result<[Quadrature; 6], ModelError> {
        let probs = self.assoc_cache.get_or_init(|| {
            let mut out = [Quadrature {
                value: 0.0,
                error: 0.0,
                converged: false,
            }; 6];
            for case in AuCase::ALL {
                out[case.index()] = self.dist.assoc_prob_raw(case, &self.assoc_spec);
            }
            out
        });
        for (i, q) in probs.iter().enumerate() {
            if q.error > 1e-4 {
                return Err(ModelError::QuadratureNonConvergence {
                    context: match AuCase::ALL[i] {
                        AuCase::NonCompL => "assoc_prob(noncomp_l)",
                        AuCase::NonCompN => "assoc_prob(noncomp_n)",
                        AuCase::CompLL => "assoc_prob(comp_ll)",
                        AuCase::CompNN => "assoc_prob(comp_nn)",
                        AuCase::CompLN => "assoc_prob(comp_ln)",
                        AuCase::CompNL => "assoc_prob(comp_nl)",
                    },
                    error: q.error,
                    budget: 1e-4,
                });
            }
        }
        Ok(*probs)
    }

    /// Conditional serving-distance density of a non-cooperative case.
    pub fn conditional_pdf_noncomp(&self, case: AuCase, r: f64) -> Result<f64, ModelError> {
        let a = self.assoc_prob(case)?;
        vanishing_guard(a.value, case)?;
        Ok(self.dist.event_density_noncomp(case, r) / a.value)
    }

    /// Conditional serving-pair density of a cooperative case.
    pub fn conditional_pdf_comp(&self, case: AuCase, r0: f64, r1: f64) -> Result<f64, ModelError> {
        let a = self.assoc_prob(case)?;
        vanishing_guard(a.value, case)?;
        Ok(self.dist.event_density_comp(case, r0, r1) / a.value)
    }

    // ------------------------------------------------------------------
    // Laplace kernel
    // ------------------------------------------------------------------

    /// Laplace exponent and derivatives at `s` for a given exclusion zone,
    /// using the model's kernel quadrature budget.
    pub fn laplace_kernel(&self, s: f64, exclusion: Exclusion, orders: usize) -> Result<LaplaceKernel, ModelError> {
        laplace::laplace_kernel(self.cfg(), s, exclusion, orders, &self.kernel_spec)
    }

    // ------------------------------------------------------------------
    // Coverage
    // ------------------------------------------------------------------

    /// Conditional coverage probability of one association case at linear
    /// threshold `t > 0`.
    pub fn coverage_case(&self, case: AuCase, t: f64) -> Result<Quadrature, ModelError> {
        if case.is_comp() {
            coverage::coverage_comp(self, case, t)
        } else {
            coverage::coverage_noncomp(self, case, t)
        }
    }

    /// Overall AU coverage: association-weighted sum of the six conditional
    /// coverages (law of total probability).
    pub fn coverage_total_au(&self, t: f64) -> Result<Quadrature, ModelError> {
        let assoc = self.assoc_probs()?;
        let mut value = 0.0;
        let mut error = 0.0;
        let mut converged = true;
        for case in AuCase::ALL {
            let a = assoc[case.index()];
            if a.value < 1e-9 {
                continue;
            }
            let p = self.coverage_case(case, t)?;
            value += a.value * p.value;
            error += a.value * p.error + a.error * p.value;
            converged &= p.converged;
        }
        Ok(Quadrature {
            value: value.clamp(0.0, 1.0),
            error,
            converged,
        })
    }

    /// TU coverage probability at linear threshold `t > 0`.
    pub fn coverage_tu(&self, t: f64) -> Result<Quadrature, ModelError> {
        coverage::coverage_tu(self, t)
    }

    // ------------------------------------------------------------------
    // Rates
    // ------------------------------------------------------------------

    /// Conditional ergodic rate of one association case, bits/s/Hz.
    pub fn rate_case(&self, case: AuCase) -> Result<Quadrature, ModelError> {
        rate::rate_case(self, case)
    }

    /// TU ergodic rate, bits/s/Hz.
    pub fn tu_rate(&self) -> Result<Quadrature, ModelError> {
        rate::tu_rate(self)
    }

    /// Full association-weighted rate decomposition.
    pub fn rate_totals(&self) -> Result<RateTotals, ModelError> {
        rate::rate_totals(self)
    }
}

fn vanishing_guard(a: f64, case: AuCase) -> Result<(), ModelError> {
    if a < 1e-12 {
        return Err(ModelError::domain(
            "conditional_pdf",
            format!("association case {case:?} has vanishing probability {a:.3e}"),
        ));
    }
    Ok(())
}

//! Distance distributions and association probabilities.
//!
//! In 3D distance `r`, the type-`v` process has radial intensity
//! `λ̃_v(r) = 2πλ_b·r·p_v(r)` and cumulative measure `Λ_v(l(r))` with
//! `l(r) = √(r²−Δh_u²)`, giving the nearest-point density
//! `f_v(r) = λ̃_v(r)·exp(−Λ_v(l(r)))`.
//!
//! Each of the six association outcomes corresponds to an explicit event on
//! the underlying processes (distance ordering plus RSS-ratio constraints,
//! i.e. void conditions on balls whose radii are the equal-RSS maps). The
//! `event_density_*` functions give the joint density of the serving
//! distances restricted to that event; integrating one over its support
//! yields the association probability, and normalizing by it yields the
//! conditional serving-distance density. The six events partition the
//! probability space, so the six association probabilities sum to one.

use crate::assoc::AuCase;
use crate::netmodel::{LinkType, NetworkConfig};
use crate::quad::{integrate, integrate_semi_inf, Quadrature, QuadratureSpec, TailMap};

use super::intensity::CumulativeIntensity;

/// Shared geometry state: configuration plus the cached cumulative
/// intensities of the two link-type processes.
#[derive(Debug, Clone)]
pub(crate) struct DistanceModel {
    pub cfg: NetworkConfig,
    los: CumulativeIntensity,
    nlos: CumulativeIntensity,
}

impl DistanceModel {
    pub fn new(cfg: NetworkConfig) -> Self {
        let los = CumulativeIntensity::build(&cfg, LinkType::Los);
        let nlos = CumulativeIntensity::build(&cfg, LinkType::Nlos);
        DistanceModel { cfg, los, nlos }
    }

    fn table(&self, link: LinkType) -> &CumulativeIntensity {
        match link {
            LinkType::Los => &self.los,
            LinkType::Nlos => &self.nlos,
        }
    }

    /// Horizontal offset of a 3D distance, clamped to 0 below the support.
    pub fn horiz(&self, r: f64) -> f64 {
        let dh = self.cfg.delta_h_u();
        if r <= dh {
            0.0
        } else {
            (r * r - dh * dh).sqrt()
        }
    }

    /// Mean number of type-`v` points within horizontal radius `x`.
    pub fn void_exponent(&self, link: LinkType, x: f64) -> f64 {
        self.table(link).void_exponent(&self.cfg, x)
    }

    /// Probability of no type-`v` point within 3D distance `r`.
    pub fn void_probability_3d(&self, link: LinkType, r: f64) -> f64 {
        (-self.void_exponent(link, self.horiz(r))).exp()
    }

    /// Radial intensity `2πλ_b·r·p_v(r)` of the type-`v` process in 3D distance.
    pub fn radial_intensity(&self, link: LinkType, r: f64) -> f64 {
        let p = match link {
            LinkType::Los => self.cfg.los_probability(self.horiz(r)),
            LinkType::Nlos => self.cfg.nlos_probability(self.horiz(r)),
        };
        2.0 * core::f64::consts::PI * self.cfg.lambda_b * r * p
    }

    /// Nearest type-`v` BS distance density (zero below the height gap).
    pub fn nearest_pdf(&self, link: LinkType, r: f64) -> f64 {
        if r < self.cfg.delta_h_u() {
            return 0.0;
        }
        self.radial_intensity(link, r) * self.void_probability_3d(link, r)
    }

    /// Joint density of the serving-distance pair for the four cooperative
    /// cases, in the form used by the association integrals.
    ///
    /// Same-type cases are the exact (nearest, second-nearest) joint density.
    /// The mixed cases are the partial products whose remaining void factor
    /// is supplied by the enclosing integral; the `CompLN` case switches
    /// branch at the LoS dominance range, where the NLoS ordering constraint
    /// activates.
    pub fn joint_pdf(&self, case: AuCase, r0: f64, r1: f64) -> f64 {
        let dh = self.cfg.delta_h_u();
        match case {
            AuCase::CompLL => {
                if !(dh <= r0 && r0 < r1) {
                    return 0.0;
                }
                self.radial_intensity(LinkType::Los, r0)
                    * self.radial_intensity(LinkType::Los, r1)
                    * self.void_probability_3d(LinkType::Los, r1)
            }
            AuCase::CompNN => {
                if !(dh <= r0 && r0 < r1) {
                    return 0.0;
                }
                self.radial_intensity(LinkType::Nlos, r0)
                    * self.radial_intensity(LinkType::Nlos, r1)
                    * self.void_probability_3d(LinkType::Nlos, r1)
            }
            // (r0, r1) = (r_N0, r_L0), NLoS strongest: the LoS void to r_L0
            // appears here, the NLoS-second-void comes from the enclosing
            // integral over the second NLoS neighbor.
            AuCase::CompNL => {
                if !(dh <= r0 && r0 < r1) {
                    return 0.0;
                }
                self.radial_intensity(LinkType::Nlos, r0)
                    * self.radial_intensity(LinkType::Los, r1)
                    * self.void_probability_3d(LinkType::Los, r1)
            }
            // (r0, r1) = (r_L0, r_N0), LoS strongest.
            AuCase::CompLN => {
                let l_ln = self.cfg.los_dominance_range();
                if r0 < dh || r1 < dh {
                    return 0.0;
                }
                if r0 < l_ln {
                    self.nearest_pdf(LinkType::Los, r0) * self.nearest_pdf(LinkType::Nlos, r1)
                } else if r1 > self.cfg.equal_rss_nlos(r0) {
                    self.radial_intensity(LinkType::Los, r0)
                        * self.radial_intensity(LinkType::Nlos, r1)
                        * self.void_probability_3d(LinkType::Los, r0)
                } else {
                    0.0
                }
            }
            _ => panic!("joint_pdf is defined for the cooperative cases only"),
        }
    }

    /// Event density of the non-cooperative cases (single serving distance):
    /// the nearest-BS intensity times the void probabilities the
    /// classification imposes (no same-type BS within the θ-ball, no
    /// other-type BS with RSS above 1/θ of the serving one).
    pub fn event_density_noncomp(&self, case: AuCase, r: f64) -> f64 {
        let cfg = &self.cfg;
        let dh = cfg.delta_h_u();
        if r < dh {
            return 0.0;
        }
        match case {
            AuCase::NonCompL => {
                let same_excl = cfg.theta.powf(1.0 / cfg.alpha_l) * r;
                let cross_radius = cfg.theta.powf(1.0 / cfg.alpha_n) * cfg.equal_rss_nlos(r);
                self.radial_intensity(LinkType::Los, r)
                    * self.void_probability_3d(LinkType::Los, same_excl)
                    * self.void_probability_3d(LinkType::Nlos, cross_radius.max(dh))
            }
            AuCase::NonCompN => {
                let same_excl = cfg.theta.powf(1.0 / cfg.alpha_n) * r;
                let cross_radius = cfg.theta.powf(1.0 / cfg.alpha_l) * cfg.equal_rss_los(r);
                self.radial_intensity(LinkType::Nlos, r)
                    * self.void_probability_3d(LinkType::Nlos, same_excl)
                    * self.void_probability_3d(LinkType::Los, cross_radius)
            }
            _ => panic!("not a non-cooperative case"),
        }
    }

    /// Event density of the cooperative cases on the serving pair
    /// (strongest-first ordering); zero outside the case support.
    pub fn event_density_comp(&self, case: AuCase, r0: f64, r1: f64) -> f64 {
        let cfg = &self.cfg;
        let dh = cfg.delta_h_u();
        if r0 < dh || r1 < dh || r0 < self.outer_lower(case) {
            return 0.0;
        }
        let (lo, hi) = self.comp_support(case, r0);
        if !(lo <= r1 && r1 <= hi) {
            return 0.0;
        }
        match case {
            AuCase::CompLL => {
                // r0 < r1 < θ^(1/α_L)·r0, no NLoS RSS above the weaker link's.
                let cross = cfg.equal_rss_nlos(r1).max(dh);
                self.joint_pdf(AuCase::CompLL, r0, r1) * self.void_probability_3d(LinkType::Nlos, cross)
            }
            AuCase::CompNN => {
                let cross = cfg.equal_rss_los(r1);
                self.joint_pdf(AuCase::CompNN, r0, r1) * self.void_probability_3d(LinkType::Los, cross)
            }
            AuCase::CompLN => {
                // LoS strongest at r0; NLoS partner at r1 with comparable RSS;
                // no second LoS BS with RSS above the partner's.
                let cross = cfg.equal_rss_los(r1);
                self.radial_intensity(LinkType::Los, r0)
                    * self.nearest_pdf(LinkType::Nlos, r1)
                    * self.void_probability_3d(LinkType::Los, cross)
            }
            AuCase::CompNL => {
                let cross = cfg.equal_rss_nlos(r1);
                self.radial_intensity(LinkType::Nlos, r0)
                    * self.nearest_pdf(LinkType::Los, r1)
                    * self.void_probability_3d(LinkType::Nlos, cross.max(dh))
            }
            _ => panic!("not a cooperative case"),
        }
    }

    /// Integration domain of a cooperative case: the `r1` interval given
    /// `r0`, plus the `r0` lower limit and the interior split points the
    /// integrands kink at.
    pub fn comp_support(&self, case: AuCase, r0: f64) -> (f64, f64) {
        let cfg = &self.cfg;
        let dh = cfg.delta_h_u();
        match case {
            AuCase::CompLL => (r0, cfg.theta.powf(1.0 / cfg.alpha_l) * r0),
            AuCase::CompNN => (r0, cfg.theta.powf(1.0 / cfg.alpha_n) * r0),
            AuCase::CompLN => {
                let eq = cfg.equal_rss_nlos(r0);
                (eq.max(dh), cfg.theta.powf(1.0 / cfg.alpha_n) * eq)
            }
            AuCase::CompNL => {
                let eq = cfg.equal_rss_los(r0);
                (eq, cfg.theta.powf(1.0 / cfg.alpha_l) * eq)
            }
            _ => panic!("not a cooperative case"),
        }
    }

    /// Lower end of the outer (`r0`) domain for each case.
    pub fn outer_lower(&self, case: AuCase) -> f64 {
        let cfg = &self.cfg;
        let dh = cfg.delta_h_u();
        match case {
            // Below θ^(−1/α_L)·l_LN the partner interval of the LoS-strongest
            // mixed case is empty.
            AuCase::CompLN => dh.max(cfg.theta.powf(-1.0 / cfg.alpha_l) * cfg.los_dominance_range()),
            _ => dh,
        }
    }

    /// Integrates the inner (`r1`) axis of a cooperative case at fixed `r0`,
    /// splitting where the integrand kinks (plus any caller-known interior
    /// discontinuities, e.g. surrogate-shape flips).
    pub fn integrate_inner(
        &self,
        case: AuCase,
        r0: f64,
        level: &QuadratureSpec,
        extra_splits: &[f64],
        f: impl Fn(f64) -> f64,
    ) -> f64 {
        let (lo, hi) = self.comp_support(case, r0);
        if !(hi > lo) {
            return 0.0;
        }
        // The LL void factor kinks where the partner crosses the LoS
        // dominance range.
        let l_ln = self.cfg.los_dominance_range();
        let mut cuts: Vec<f64> = extra_splits
            .iter()
            .copied()
            .chain((case == AuCase::CompLL).then_some(l_ln))
            .filter(|&x| lo < x && x < hi)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut total = 0.0;
        let mut left = lo;
        for cut in cuts {
            total += integrate(&f, left, cut, level).value;
            left = cut;
        }
        total + integrate(&f, left, hi, level).value
    }

    /// Integrates an outer-axis (`r0`) function from `start` to infinity,
    /// segmenting at the radii where the case integrands kink (the LoS
    /// dominance range and its θ-scaled images) before the exponential tail.
    pub fn integrate_outer(
        &self,
        start: f64,
        level: &QuadratureSpec,
        f: impl Fn(f64) -> f64,
    ) -> Quadrature {
        let cfg = &self.cfg;
        let l_ln = cfg.los_dominance_range();
        let outer_scale = (2.0 * cfg.delta_h_u()).max(0.5 / (core::f64::consts::PI * cfg.lambda_b).sqrt());
        let mut splits: Vec<f64> = [
            cfg.theta.powf(-1.0 / cfg.alpha_l) * l_ln,
            l_ln,
            cfg.theta.powf(1.0 / cfg.alpha_l) * l_ln,
        ]
        .into_iter()
        .filter(|&x| x > start * (1.0 + 1e-12))
        .collect();
        splits.sort_by(f64::total_cmp);
        splits.dedup();

        let mut value = 0.0;
        let mut error = 0.0;
        let mut converged = true;
        let mut lo = start;
        for hi in splits {
            let q = integrate(&f, lo, hi, level);
            value += q.value;
            error += q.error;
            converged &= q.converged;
            lo = hi;
        }
        let tail = integrate_semi_inf(&f, lo, outer_scale, TailMap::Exponential, level);
        value += tail.value;
        error += tail.error;
        converged &= tail.converged;

        Quadrature {
            value,
            error,
            converged,
        }
    }

    /// Association probability of one case: the event density integrated
    /// over its support.
    pub fn assoc_prob_raw(&self, case: AuCase, spec: &QuadratureSpec) -> Quadrature {
        let level = spec.per_level(if case.is_comp() { 2 } else { 1 });
        let outer = |r0: f64| -> f64 {
            if case.is_comp() {
                self.integrate_inner(case, r0, &level, &[], |r1| self.event_density_comp(case, r0, r1))
            } else {
                self.event_density_noncomp(case, r0)
            }
        };
        self.integrate_outer(self.outer_lower(case), &level, outer)
    }
}

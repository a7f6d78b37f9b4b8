//! Network configuration and the deterministic channel/geometry primitives:
//! elevation-dependent LoS probability, LoS/NLoS/terrestrial path gains, and
//! the equal-RSS boundary maps used by the association rule.
//!
//! All quantities are stored in linear scale and SI units (meters, per-m²
//! densities). dB values are converted exactly once at the configuration
//! boundary (see [`db_to_linear`]).

use crate::error::ModelError;

/// Converts a dB value to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear value to dB.
pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// Air-to-ground link state of a base station as seen by the aerial user.
///
/// The link state selects the path-loss constant, path-loss exponent, and
/// Nakagami fading order `(eta_l, alpha_l, m_l)` or `(eta_n, alpha_n, m_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkType {
    Los,
    Nlos,
}

impl LinkType {
    pub const BOTH: [LinkType; 2] = [LinkType::Los, LinkType::Nlos];
}

/// Physical and statistical parameters of the network model.
///
/// `Default` yields the reference parameter set used throughout the test
/// suite: BS density 10 km⁻², LoS/NLoS/terrestrial path-loss exponents
/// 2.6/3.0/3.0, path-loss constants −35/−40/−28.4 dB, Nakagami orders 3/1,
/// NOMA power split 0.9/0.1, cooperation threshold 4 dB, and heights
/// 75/19/1.5 m for AU/BS/TU.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    /// BS density, per m².
    pub lambda_b: f64,
    /// TU density, per m² (ensures every BS has a TU to pair; not used by any metric).
    pub lambda_t: f64,
    /// AU density, per m² (the typical AU is conditioned at the origin).
    pub lambda_u: f64,
    /// BS height, m.
    pub h_b: f64,
    /// TU height, m.
    pub h_t: f64,
    /// AU altitude, m. Must exceed `h_b`.
    pub h_u: f64,
    /// LoS-probability slope constant (environment-dependent).
    pub b_slope: f64,
    /// LoS-probability offset/multiplier constant (environment-dependent).
    pub c_offset: f64,
    /// LoS path-loss exponent, > 2.
    pub alpha_l: f64,
    /// NLoS path-loss exponent, > 2.
    pub alpha_n: f64,
    /// Terrestrial path-loss exponent, > 2.
    pub alpha_t: f64,
    /// LoS link gain at 1 m (path-loss constant × sidelobe antenna gain), linear.
    pub eta_l: f64,
    /// NLoS link gain at 1 m, linear.
    pub eta_n: f64,
    /// Terrestrial link gain at 1 m (path-loss constant × mainlobe gain), linear.
    pub eta_t: f64,
    /// Nakagami fading order for LoS links, integer ≥ 1, > `m_n`.
    pub m_l: u32,
    /// Nakagami fading order for NLoS links, integer ≥ 1.
    pub m_n: u32,
    /// BS transmit power, linear scale. Cancels out of every SIR; kept configurable.
    pub p_tx: f64,
    /// NOMA power coefficient of the AU (far user), > 0.5.
    pub rho_u: f64,
    /// NOMA power coefficient of the TU (near user), = 1 − `rho_u`.
    pub rho_t: f64,
    /// Cooperation threshold, linear scale, ≥ 1. At exactly 1 cooperation is
    /// disabled (the strongest/second-strongest RSS ratio is never below 1).
    pub theta: f64,
    /// Monte Carlo sampling window radius, m.
    pub sim_radius: f64,
    /// Default Monte Carlo realization count.
    pub iterations: u64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        let lambda_b = 1e-5;
        NetworkConfig {
            lambda_b,
            lambda_t: 100.0 * lambda_b,
            lambda_u: 10.0 * lambda_b,
            h_b: 19.0,
            h_t: 1.5,
            h_u: 75.0,
            b_slope: 0.16,
            c_offset: 9.61,
            alpha_l: 2.6,
            alpha_n: 3.0,
            alpha_t: 3.0,
            eta_l: db_to_linear(-35.0),
            eta_n: db_to_linear(-40.0),
            eta_t: db_to_linear(-28.4),
            m_l: 3,
            m_n: 1,
            p_tx: db_to_linear(26.0),
            rho_u: 0.9,
            rho_t: 1.0 - 0.9,
            theta: db_to_linear(4.0),
            sim_radius: 4000.0,
            iterations: 10_000,
        }
    }
}

impl NetworkConfig {
    /// Height difference between the AU and a BS, m.
    pub fn delta_h_u(&self) -> f64 {
        (self.h_u - self.h_b).abs()
    }

    /// Height difference between a TU and a BS, m.
    pub fn delta_h_t(&self) -> f64 {
        (self.h_t - self.h_b).abs()
    }

    /// Link gain constant at 1 m for the given A2G link type.
    pub fn eta(&self, link: LinkType) -> f64 {
        match link {
            LinkType::Los => self.eta_l,
            LinkType::Nlos => self.eta_n,
        }
    }

    /// Path-loss exponent for the given A2G link type.
    pub fn alpha(&self, link: LinkType) -> f64 {
        match link {
            LinkType::Los => self.alpha_l,
            LinkType::Nlos => self.alpha_n,
        }
    }

    /// Nakagami fading order for the given A2G link type.
    pub fn nakagami_m(&self, link: LinkType) -> u32 {
        match link {
            LinkType::Los => self.m_l,
            LinkType::Nlos => self.m_n,
        }
    }

    /// Checks every model constraint, naming the offending field.
    pub fn validate(&self) -> Result<(), ModelError> {
        fn positive(field: &'static str, v: f64) -> Result<(), ModelError> {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::config(field, format!("must be positive and finite, got {v}")));
            }
            Ok(())
        }
        positive("lambda_b", self.lambda_b)?;
        positive("lambda_t", self.lambda_t)?;
        positive("lambda_u", self.lambda_u)?;
        positive("eta_l", self.eta_l)?;
        positive("eta_n", self.eta_n)?;
        positive("eta_t", self.eta_t)?;
        positive("p_tx", self.p_tx)?;
        positive("b_slope", self.b_slope)?;
        positive("c_offset", self.c_offset)?;
        positive("sim_radius", self.sim_radius)?;
        for (field, alpha) in [
            ("alpha_l", self.alpha_l),
            ("alpha_n", self.alpha_n),
            ("alpha_t", self.alpha_t),
        ] {
            if !(alpha.is_finite() && alpha > 2.0) {
                return Err(ModelError::config(field, format!("path-loss exponent must exceed 2, got {alpha}")));
            }
        }
        if self.m_l < 1 || self.m_n < 1 {
            return Err(ModelError::config("m_l/m_n", "Nakagami orders must be integers >= 1"));
        }
        if self.m_l <= self.m_n {
            return Err(ModelError::config(
                "m_l",
                format!("LoS fading order must exceed NLoS order, got m_l={} m_n={}", self.m_l, self.m_n),
            ));
        }
        if (self.rho_u + self.rho_t - 1.0).abs() > 1e-12 {
            return Err(ModelError::config(
                "rho_u",
                format!("power coefficients must sum to 1, got {}", self.rho_u + self.rho_t),
            ));
        }
        if !(self.rho_u > self.rho_t && self.rho_t > 0.0) {
            return Err(ModelError::config(
                "rho_u",
                format!("AU coefficient must exceed TU coefficient (> 0), got rho_u={} rho_t={}", self.rho_u, self.rho_t),
            ));
        }
        // theta == 1 is the documented no-cooperation limit (NOMA-Only).
        if !(self.theta.is_finite() && self.theta >= 1.0) {
            return Err(ModelError::config("theta", format!("cooperation threshold must be >= 1, got {}", self.theta)));
        }
        if self.h_u <= self.h_b {
            return Err(ModelError::config("h_u", format!("AU must fly above BS height, got h_u={} h_b={}", self.h_u, self.h_b)));
        }
        // All 3D distances must respect the 1 m reference distance of the
        // path-loss law, so the height gaps themselves must be >= 1 m.
        if self.delta_h_u() < 1.0 {
            return Err(ModelError::config("h_u", "AU/BS height difference must be at least 1 m"));
        }
        if self.delta_h_t() < 1.0 {
            return Err(ModelError::config("h_t", "TU/BS height difference must be at least 1 m"));
        }
        if self.iterations == 0 {
            return Err(ModelError::config("iterations", "must be at least 1"));
        }
        Ok(())
    }

    /// LoS probability of a link with horizontal distance `z` ≥ 0, m.
    ///
    /// `1 / (1 + C·exp(−B·[(180/π)·atan(Δh_u/z) − C]))`, the standard
    /// elevation-angle sigmoid. At `z = 0` the elevation is 90° and the value
    /// attains its maximum; it decreases monotonically in `z`.
    pub fn los_probability(&self, z: f64) -> f64 {
        debug_assert!(z >= 0.0);
        let elevation_deg = (self.delta_h_u() / z).atan().to_degrees();
        1.0 / (1.0 + self.c_offset * (-self.b_slope * (elevation_deg - self.c_offset)).exp())
    }

    /// NLoS probability of a link with horizontal distance `z`, the exact
    /// complement of [`Self::los_probability`].
    pub fn nlos_probability(&self, z: f64) -> f64 {
        1.0 - self.los_probability(z)
    }

    /// LoS probability as a function of the 3D distance `r` ≥ Δh_u.
    pub fn los_probability_3d(&self, r: f64) -> Result<f64, ModelError> {
        Ok(self.los_probability(self.horizontal_offset(r)?))
    }

    /// Probability of the given link type at 3D distance `r`.
    pub fn link_probability_3d(&self, r: f64, link: LinkType) -> Result<f64, ModelError> {
        let p = self.los_probability_3d(r)?;
        Ok(match link {
            LinkType::Los => p,
            LinkType::Nlos => 1.0 - p,
        })
    }

    /// Average A2G link gain `eta_v · r^(−alpha_v)` at 3D distance `r` ≥ 1 m.
    pub fn link_gain(&self, r: f64, link: LinkType) -> Result<f64, ModelError> {
        if !(r >= 1.0) {
            return Err(ModelError::domain(
                "link_gain",
                format!("3D distance {r} below the 1 m reference distance"),
            ));
        }
        Ok(self.gain(r, link))
    }

    /// Average terrestrial link gain `eta_t · r^(−alpha_t)` at 3D distance `r` ≥ 1 m.
    pub fn ground_gain(&self, r: f64) -> Result<f64, ModelError> {
        if !(r >= 1.0) {
            return Err(ModelError::domain(
                "ground_gain",
                format!("3D distance {r} below the 1 m reference distance"),
            ));
        }
        Ok(self.eta_t * r.powf(-self.alpha_t))
    }

    /// Unchecked A2G gain; callers guarantee `r` ≥ 1 m.
    #[inline]
    pub(crate) fn gain(&self, r: f64, link: LinkType) -> f64 {
        self.eta(link) * r.powf(-self.alpha(link))
    }

    /// Horizontal offset `√(r² − Δh_u²)` of an A2G link with 3D distance `r` ≥ Δh_u.
    pub fn horizontal_offset(&self, r: f64) -> Result<f64, ModelError> {
        let dh = self.delta_h_u();
        if r < dh {
            // Tolerate rounding at the lower support edge.
            if r > dh * (1.0 - 1e-12) {
                return Ok(0.0);
            }
            return Err(ModelError::domain(
                "horizontal_offset",
                format!("3D distance {r} below the AU/BS height gap {dh}"),
            ));
        }
        Ok((r * r - dh * dh).sqrt())
    }

    /// LoS serving distance below which no NLoS BS (necessarily at 3D
    /// distance ≥ Δh_u) can provide a stronger average RSS:
    /// `(eta_l/eta_n)^(1/alpha_l) · Δh_u^(alpha_n/alpha_l)`.
    pub fn los_dominance_range(&self) -> f64 {
        (self.eta_l / self.eta_n).powf(1.0 / self.alpha_l) * self.delta_h_u().powf(self.alpha_n / self.alpha_l)
    }

    /// NLoS distance with average RSS equal to a LoS BS at distance `r`:
    /// `(eta_n/eta_l)^(1/alpha_n) · r^(alpha_l/alpha_n)`.
    pub fn equal_rss_nlos(&self, r_los: f64) -> f64 {
        (self.eta_n / self.eta_l).powf(1.0 / self.alpha_n) * r_los.powf(self.alpha_l / self.alpha_n)
    }

    /// LoS distance with average RSS equal to an NLoS BS at distance `r`:
    /// `(eta_l/eta_n)^(1/alpha_l) · r^(alpha_n/alpha_l)`.
    pub fn equal_rss_los(&self, r_nlos: f64) -> f64 {
        (self.eta_l / self.eta_n).powf(1.0 / self.alpha_l) * r_nlos.powf(self.alpha_n / self.alpha_l)
    }

    /// SIR value no non-cooperative NOMA AU can reach: `rho_u / rho_t`.
    pub fn noma_sir_ceiling(&self) -> f64 {
        self.rho_u / self.rho_t
    }

    /// SIR value no cooperative NOMA AU can reach: `2·rho_u / rho_t`.
    pub fn comp_noma_sir_ceiling(&self) -> f64 {
        2.0 * self.rho_u / self.rho_t
    }
}

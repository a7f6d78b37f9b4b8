//! Cached radial intensity measure of the two A2G point processes.
//!
//! Seen from the AU, the LoS (NLoS) BSs form an inhomogeneous PPP of radial
//! intensity `2πλ_b·z·p_v(z)`. Everything in the analytic path — void
//! probabilities, nearest-distance densities, association integrals — reduces
//! to the cumulative measure `Λ_v(x) = 2πλ_b·∫_0^x z·p_v(z) dz`, so it is
//! precomputed once per configuration on a geometric panel grid. Queries
//! evaluate one fixed Kronrod pass on the partial panel, which is at machine
//! accuracy for this smooth integrand.

use crate::netmodel::{LinkType, NetworkConfig};
use crate::quad::kronrod_fixed;

/// Cumulative radial measure of one link-type process, before the `2πλ_b`
/// factor: `M_v(x) = ∫_0^x z·p_v(z) dz`.
#[derive(Debug, Clone)]
pub struct CumulativeIntensity {
    link: LinkType,
    /// Panel edges, ascending, starting at 0.
    edges: Vec<f64>,
    /// Cumulative integral at each edge.
    cum: Vec<f64>,
    lambda_term: f64,
}

/// Beyond this radius queries fall back to chunked fixed panels; the void
/// exponent out there is astronomically large anyway.
const TABLE_LIMIT: f64 = 4.0e6;

impl CumulativeIntensity {
    pub fn build(cfg: &NetworkConfig, link: LinkType) -> Self {
        let mut edges = vec![0.0];
        let mut x = cfg.delta_h_u().max(1.0) / 64.0;
        while x < TABLE_LIMIT {
            edges.push(x);
            x *= 1.5;
        }
        edges.push(TABLE_LIMIT);

        let f = |z: f64| z * link_prob(cfg, link, z);
        let mut cum = Vec::with_capacity(edges.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for w in edges.windows(2) {
            acc += kronrod_fixed(f, w[0], w[1]);
            cum.push(acc);
        }
        CumulativeIntensity {
            link,
            edges,
            cum,
            lambda_term: 2.0 * core::f64::consts::PI * cfg.lambda_b,
        }
    }

    /// `M_v(x) = ∫_0^x z·p_v(z) dz` for a horizontal radius `x ≥ 0`.
    pub fn measure(&self, cfg: &NetworkConfig, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let f = |z: f64| z * link_prob(cfg, self.link, z);
        if x >= TABLE_LIMIT {
            // Geometric chunks keep the fixed rule accurate on huge spans.
            let mut acc = *self.cum.last().unwrap();
            let mut lo = TABLE_LIMIT;
            while lo < x {
                let hi = (lo * 4.0).min(x);
                acc += kronrod_fixed(f, lo, hi);
                lo = hi;
            }
            return acc;
        }
        let idx = self.edges.partition_point(|&e| e <= x) - 1;
        self.cum[idx] + kronrod_fixed(f, self.edges[idx], x)
    }

    /// Void exponent `Λ_v(x) = 2πλ_b·M_v(x)`: mean point count of the
    /// process within horizontal radius `x`.
    pub fn void_exponent(&self, cfg: &NetworkConfig, x: f64) -> f64 {
        self.lambda_term * self.measure(cfg, x)
    }
}

#[inline]
pub(crate) fn link_prob(cfg: &NetworkConfig, link: LinkType, z: f64) -> f64 {
    match link {
        LinkType::Los => cfg.los_probability(z),
        LinkType::Nlos => cfg.nlos_probability(z),
    }
}

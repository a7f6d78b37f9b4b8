//! Interference Laplace transform machinery.
//!
//! The aggregate interference seen by the AU outside a per-case exclusion
//! zone has Laplace transform `L(s) = exp(μ(s))` with
//!
//! `μ(s) = −2πλ_b·Σ_v ∫_excl_v^∞ C(s, z, m_v)·z·p_v(z) dz`,
//! `C(s, z, m) = 1 − (m/(m + s·g_v(z)))^m`,
//!
//! where `g_v(z)` is the average link gain at horizontal offset `z`. Coverage
//! sums need `∂^k L/∂s^k` up to order `K−1`; the `s`-derivatives of `C` have
//! the closed form `(−1)^(j+1)·(m)_j·m^m·g^j·(m+sg)^(−(m+j))` (rising
//! factorial `(m)_j`), so one vector-valued adaptive pass integrates all
//! orders on shared abscissae. The Leibniz recursion `L' = μ'·L` then
//! produces the coverage sum in an all-positive, cancellation-free form.

use crate::error::ModelError;
use crate::netmodel::{LinkType, NetworkConfig};
use crate::quad::{integrate_vec_semi_inf, QuadratureSpec, TailMap};

use super::intensity::link_prob;

/// Highest supported derivative order count (`K ≤ 2·m_L` in practice).
pub const MAX_ORDERS: usize = 16;

/// Interference-free zone: per-link-type lower horizontal limits, m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exclusion {
    /// LoS interferers live beyond this horizontal offset.
    pub los_from: f64,
    /// NLoS interferers live beyond this horizontal offset.
    pub nlos_from: f64,
}

impl Exclusion {
    pub fn none() -> Self {
        Exclusion {
            los_from: 0.0,
            nlos_from: 0.0,
        }
    }

    fn lower(&self, link: LinkType) -> f64 {
        match link {
            LinkType::Los => self.los_from,
            LinkType::Nlos => self.nlos_from,
        }
    }
}

/// The Laplace exponent `μ(s)` and its first `K−1` s-derivatives at one
/// point, with the exclusion zone they were computed for.
#[derive(Debug, Clone, Copy)]
pub struct LaplaceKernel {
    pub s: f64,
    pub exclusion: Exclusion,
    mu: [f64; MAX_ORDERS],
    /// Rescaled derivative terms `M_k = (−s)^k·μ^(k)/k!`, kept directly from
    /// the scaled integration: all nonnegative, no `s^k` arithmetic, immune
    /// to overflow at extreme `s`.
    m_scaled: [f64; MAX_ORDERS],
    orders: usize,
    /// Worst per-link integration error estimate (in μ units).
    pub error: f64,
    pub converged: bool,
}

impl LaplaceKernel {
    /// `μ^(j)(s)` values for `j = 0..K−1`.
    pub fn mu_derivs(&self) -> &[f64] {
        &self.mu[..self.orders]
    }

    /// The transform value `L(s) = exp(μ(s))`.
    pub fn transform(&self) -> f64 {
        self.mu[0].exp()
    }

    /// `Σ_{k=0}^{K−1} ((−s)^k / k!)·L^(k)(s)`, the Gamma-tail coverage sum,
    /// clamped to `[0, 1]`.
    ///
    /// Internally uses the rescaled terms `P_k = (−s)^k·L^(k)/k!` which obey
    /// `P_k = (1/k)·Σ_{j<k} (k−j)·M_{k−j}·P_j` with `M_i = (−s)^i·μ^(i)/i!`;
    /// complete monotonicity of `L` makes every `M_i` and `P_k` nonnegative,
    /// so the recursion is cancellation-free.
    pub fn coverage_sum(&self) -> f64 {
        self.coverage_sum_tracked().0
    }

    /// Coverage sum plus the amount clipped by the `[0, 1]` clamp.
    pub fn coverage_sum_tracked(&self) -> (f64, f64) {
        let k_max = self.orders;
        let m = &self.m_scaled;
        let mut p = [0.0; MAX_ORDERS];
        p[0] = self.mu[0].exp();
        let mut sum = p[0];
        for k in 1..k_max {
            let mut acc = 0.0;
            for j in 0..k {
                acc += (k - j) as f64 * m[k - j] * p[j];
            }
            p[k] = acc / k as f64;
            sum += p[k];
        }
        let clamped = sum.clamp(0.0, 1.0);
        (clamped, (sum - clamped).abs())
    }
}

/// Computes the Laplace kernel at `s ≥ 0` with `orders` derivative orders
/// (`orders = K`, i.e. derivatives `0..K−1`).
pub fn laplace_kernel(
    cfg: &NetworkConfig,
    s: f64,
    exclusion: Exclusion,
    orders: usize,
    spec: &QuadratureSpec,
) -> Result<LaplaceKernel, ModelError> {
    if orders == 0 || orders > MAX_ORDERS {
        return Err(ModelError::domain(
            "laplace_kernel",
            format!("derivative order count {orders} outside 1..={MAX_ORDERS}"),
        ));
    }
    if !(s >= 0.0) {
        return Err(ModelError::domain("laplace_kernel", format!("s = {s} must be nonnegative")));
    }
    let dh = cfg.delta_h_u();
    let lambda_term = 2.0 * core::f64::consts::PI * cfg.lambda_b;

    let mut mu = [0.0; MAX_ORDERS];
    let mut m_scaled = [0.0; MAX_ORDERS];
    let mut error = 0.0f64;
    let mut converged = true;

    for link in LinkType::BOTH {
        let m = cfg.nakagami_m(link) as f64;
        let eta = cfg.eta(link);
        let alpha = cfg.alpha(link);
        let lo = exclusion.lower(link).max(0.0);

        // Tail exponent of the integrand is z^(1−alpha); pick the map order
        // that regularizes it, and scale by where C transitions from 1 to 0.
        let q = ((2.0 / (alpha - 2.0)).ceil() + 2.0).clamp(3.0, 40.0);
        let transition = if s > 0.0 {
            (s * eta / m).powf(1.0 / alpha).min(1e9)
        } else {
            0.0
        };
        let scale = transition.max(dh).max(0.25 * lo).max(1.0);

        let integrand = |z: f64| -> [f64; MAX_ORDERS] {
            let mut out = [0.0; MAX_ORDERS];
            let w = z * link_prob(cfg, link, z);
            let g = eta * (z * z + dh * dh).powf(-alpha / 2.0);
            if s == 0.0 {
                // Raw derivatives at the origin: ∂^j C(0) = (−1)^{j+1}(m)_j (g/m)^j.
                let mut term = 1.0;
                for j in 1..orders {
                    term *= (m + (j - 1) as f64) * (g / m);
                    out[j] = term * w;
                }
                return out;
            }
            let x = s * g;
            let log_base = -(m * (x / m).ln_1p());
            let bm = log_base.exp(); // (m/(m+sg))^m
            out[0] = -log_base.exp_m1() * w; // C = 1 − bm, cancellation-safe
            // Scaled orders: s^j/j!·|∂^j C| = (m)_j/j!·bm·u^j with u = sg/(m+sg).
            let u = x / (m + x);
            let mut term = bm;
            for j in 1..orders {
                term *= u * (m + (j - 1) as f64) / j as f64;
                out[j] = term * w;
            }
            out
        };

        let (vals, quad) = integrate_vec_semi_inf(integrand, lo, scale, TailMap::PowerLaw(q), spec);
        error = error.max(lambda_term * quad.error);
        converged &= quad.converged;

        // Unscale back to raw μ^(j): sign (−1)^{j+1}, factor j!/s^j, times
        // −2πλ_b. The rescaled terms M_j = (−s)^j μ^(j)/j! reduce to
        // 2πλ_b·vals[j] exactly and are kept as-is for the coverage sum.
        mu[0] -= lambda_term * vals[0];
        let mut factorial = 1.0;
        for j in 1..orders {
            factorial *= j as f64;
            if s == 0.0 {
                // vals hold the raw derivative integrands at the origin;
                // the rescaled terms all vanish with s.
                mu[j] -= lambda_term * (if j % 2 == 1 { 1.0 } else { -1.0 }) * vals[j];
            } else {
                let raw = vals[j] * factorial / s.powi(j as i32);
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                mu[j] -= lambda_term * sign * raw;
                m_scaled[j] += lambda_term * vals[j];
            }
        }
    }

    Ok(LaplaceKernel {
        s,
        exclusion,
        mu,
        m_scaled,
        orders,
        error,
        converged,
    })
}

/// Second-order moment match of a two-term weighted Gamma sum.
///
/// The squared coherent amplitude of two cooperating links is a weighted sum
/// of Gamma variables `Γ(m_k, ζ_k/m_k)`; the surrogate `Γ(K, Θ)` matches its
/// first two moments, and the shape is then rounded up to the integer bound
/// (`2m` for same-type pairs, `m_0 + m_1` for mixed) so the Gamma tail is a
/// finite sum.
#[derive(Debug, Clone, Copy)]
pub struct GammaSurrogate {
    /// Exact moment-matched shape, `(Σζ_k)² / (Σζ_k²/m_k)`.
    pub k_exact: f64,
    /// Moment-matched scale, `(Σζ_k²/m_k) / (Σζ_k)`, in received-power units.
    pub theta_scale: f64,
    /// Rounded integer shape used in the coverage sums.
    pub k_shape: u32,
}

/// Moment-matches `Γ(m0, ζ0/m0) + Γ(m1, ζ1/m1)`.
pub fn gamma_match(zeta0: f64, m0: u32, zeta1: f64, m1: u32) -> GammaSurrogate {
    debug_assert!(zeta0 > 0.0 && zeta1 > 0.0);
    let first = zeta0 + zeta1;
    let second = zeta0 * zeta0 / m0 as f64 + zeta1 * zeta1 / m1 as f64;
    GammaSurrogate {
        k_exact: first * first / second,
        theta_scale: second / first,
        k_shape: m0 + m1,
    }
}

/// Like [`gamma_match`], but rounds the shape to the nearest integer and
/// rescales Θ so the surrogate mean stays exact.
///
/// Fixing the shape at the upper bound `m0 + m1` is harmless for same-order
/// pairs (the bound is attained at symmetry) but inflates the surrogate mean
/// by up to `(m0+m1)/K_exact` for mixed-order pairs, where `K_exact` can sit
/// near `min(m0, m1) + 1`. The mixed-case coverage evaluators use this
/// variant to keep the first moment honest.
pub fn gamma_match_nearest(zeta0: f64, m0: u32, zeta1: f64, m1: u32) -> GammaSurrogate {
    let exact = gamma_match(zeta0, m0, zeta1, m1);
    let k_shape = (exact.k_exact.round() as u32).clamp(1, m0 + m1);
    GammaSurrogate {
        k_exact: exact.k_exact,
        theta_scale: (zeta0 + zeta1) / k_shape as f64,
        k_shape,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> NetworkConfig {
        NetworkConfig::default()
    }

    fn tight() -> QuadratureSpec {
        QuadratureSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_depth: 60,
        }
    }

    #[test]
    fn zero_s_is_empty_interference() {
        let c = cfg();
        let k = laplace_kernel(&c, 0.0, Exclusion::none(), 6, &tight()).unwrap();
        assert_eq!(k.mu_derivs()[0], 0.0);
        assert_eq!(k.transform(), 1.0);
        assert!(k.mu_derivs().iter().all(|v| v.is_finite()));
        // First derivative at 0 is −E[I] (per unit power), strictly negative.
        assert!(k.mu_derivs()[1] < 0.0);
        assert_eq!(k.coverage_sum(), 1.0);
    }

    #[test]
    fn derivative_signs_alternate() {
        let c = cfg();
        let s = 1.0 / c.gain(300.0, LinkType::Los);
        let k = laplace_kernel(&c, s, Exclusion::none(), 6, &tight()).unwrap();
        let mu = k.mu_derivs();
        assert!(mu[0] < 0.0);
        for j in 1..6 {
            let expect_positive = j % 2 == 0;
            assert!(
                (mu[j] > 0.0) == expect_positive,
                "order {j}: {} has wrong sign",
                mu[j]
            );
        }
        assert!(k.transform() > 0.0 && k.transform() < 1.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        // Central differences of μ^(j−1) at relative step 1e−4 must agree
        // with the closed-form μ^(j) to 1e−4 relative, orders 1..=5.
        let c = cfg();
        let excl = Exclusion {
            los_from: 120.0,
            nlos_from: 60.0,
        };
        for base_r in [150.0, 400.0, 900.0] {
            let s = 0.7 / c.gain(base_r, LinkType::Los);
            let h = 1e-4 * s;
            let k0 = laplace_kernel(&c, s, excl, 6, &tight()).unwrap();
            let kp = laplace_kernel(&c, s + h, excl, 6, &tight()).unwrap();
            let km = laplace_kernel(&c, s - h, excl, 6, &tight()).unwrap();
            for j in 1..6 {
                let fd = (kp.mu_derivs()[j - 1] - km.mu_derivs()[j - 1]) / (2.0 * h);
                let exact = k0.mu_derivs()[j];
                let rel = ((fd - exact) / exact).abs();
                assert!(rel < 1e-4, "order {j} at r={base_r}: rel err {rel:.2e}");
            }
        }
    }

    #[test]
    fn coverage_sum_single_order_is_transform() {
        let c = cfg();
        let s = 1.0 / c.gain(250.0, LinkType::Nlos);
        let k = laplace_kernel(&c, s, Exclusion::none(), 1, &tight()).unwrap();
        assert_eq!(k.coverage_sum(), k.transform());
    }

    #[test]
    fn coverage_sum_monotone_in_s() {
        let c = cfg();
        let excl = Exclusion {
            los_from: 80.0,
            nlos_from: 80.0,
        };
        let mut prev = 1.0;
        for i in 0..12 {
            let s = 10f64.powi(i - 2) / c.gain(200.0, LinkType::Los);
            let k = laplace_kernel(&c, s, excl, 6, &tight()).unwrap();
            let p = k.coverage_sum();
            assert!(p <= prev + 1e-9, "not monotone at i={i}: {p} > {prev}");
            assert!((0.0..=1.0).contains(&p));
            prev = p;
        }
    }

    #[test]
    fn wider_exclusion_means_less_interference() {
        let c = cfg();
        let s = 1.0 / c.gain(300.0, LinkType::Los);
        let narrow = laplace_kernel(&c, s, Exclusion::none(), 1, &tight()).unwrap();
        let wide = laplace_kernel(
            &c,
            s,
            Exclusion {
                los_from: 200.0,
                nlos_from: 200.0,
            },
            1,
            &tight(),
        )
        .unwrap();
        assert!(wide.transform() > narrow.transform());
    }

    #[test]
    fn gamma_match_moment_identities() {
        // Symmetric same-type pair attains the bound exactly.
        let g = gamma_match(2e-9, 3, 2e-9, 3);
        assert!((g.k_exact - 6.0).abs() < 1e-12);
        assert!((g.theta_scale - 2e-9 / 3.0).abs() < 1e-24);
        assert_eq!(g.k_shape, 6);

        // 2:1 same-type pair: K = 27/5 exactly, rounded up to 6.
        let g = gamma_match(2.0, 3, 1.0, 3);
        assert!((g.k_exact - 27.0 / 5.0).abs() < 1e-12);
        assert_eq!(g.k_shape, 6);

        // First two moments match the weighted sum before rounding.
        for (z0, m0, z1, m1) in [(1.0, 3u32, 0.3, 1u32), (5e-10, 3, 4e-11, 3), (1e-8, 1, 3e-9, 1)] {
            let g = gamma_match(z0, m0, z1, m1);
            let mean = g.k_exact * g.theta_scale;
            let second_central = g.k_exact * g.theta_scale * g.theta_scale;
            assert!((mean - (z0 + z1)).abs() <= 1e-12 * (z0 + z1));
            let expect_var = z0 * z0 / m0 as f64 + z1 * z1 / m1 as f64;
            assert!((second_central - expect_var).abs() <= 1e-12 * expect_var);
            // The rounded shape is an upper bound on the exact one.
            assert!(g.k_exact <= g.k_shape as f64 + 1e-12);
        }
    }
}

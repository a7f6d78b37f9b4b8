//! Sampling of one network realization around the typical user.
//!
//! Base stations are drawn as a homogeneous PPP on a disc centered on the
//! typical user's ground projection. Each BS independently receives a
//! LoS/NLoS mark (elevation-dependent probability) and a Nakagami-m channel
//! power draw toward the aerial user. A separate, independent realization
//! models the terrestrial user's side with Rayleigh fading.
//!
//! Seeding is counter-based: realization `i` of a run with master seed `s`
//! always consumes the stream `f(s, i)`, so results are independent of how
//! realizations are distributed over worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson};

use crate::netmodel::{LinkType, NetworkConfig};

/// One base station as seen from the typical aerial user.
#[derive(Debug, Clone, Copy)]
pub struct BsPoint {
    /// Horizontal distance to the AU's ground projection, m.
    pub horiz: f64,
    /// 3D distance to the AU, m.
    pub dist3d: f64,
    /// LoS/NLoS mark of the A2G link.
    pub link: LinkType,
    /// Channel power gain |ω|² toward the AU, Gamma(m_v, 1/m_v), mean 1.
    pub fading: f64,
}

/// One sampled BS field from the typical AU's perspective.
#[derive(Debug, Clone)]
pub struct Realization {
    pub points: Vec<BsPoint>,
    /// Stream identifier the realization was drawn from (diagnostics only).
    pub stream: u64,
}

/// One sampled BS field from the typical TU's perspective: 3D distance and
/// Rayleigh (Exp(1)) power gain per BS.
#[derive(Debug, Clone)]
pub struct TuRealization {
    pub points: Vec<(f64, f64)>,
}

/// Nearest and second-nearest BS per link class, by 3D distance.
/// Entries are `(index into points, distance)`; absent classes stay `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeighborSummary {
    pub los: [Option<(usize, f64)>; 2],
    pub nlos: [Option<(usize, f64)>; 2],
}

impl NeighborSummary {
    pub fn r_l0(&self) -> Option<f64> {
        self.los[0].map(|(_, r)| r)
    }
    pub fn r_l1(&self) -> Option<f64> {
        self.los[1].map(|(_, r)| r)
    }
    pub fn r_n0(&self) -> Option<f64> {
        self.nlos[0].map(|(_, r)| r)
    }
    pub fn r_n1(&self) -> Option<f64> {
        self.nlos[1].map(|(_, r)| r)
    }

    /// Builds a summary from bare distances (no realization backing it).
    pub fn from_distances(
        r_l0: Option<f64>,
        r_l1: Option<f64>,
        r_n0: Option<f64>,
        r_n1: Option<f64>,
    ) -> Self {
        let opt = |i: usize, r: Option<f64>| r.map(|d| (i, d));
        NeighborSummary {
            los: [opt(usize::MAX, r_l0), opt(usize::MAX, r_l1)],
            nlos: [opt(usize::MAX, r_n0), opt(usize::MAX, r_n1)],
        }
    }
}

/// SplitMix64 finalizer; full-avalanche 64-bit mix.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the per-realization stream id from the master seed and the
/// realization counter. Distinct (seed, index, tag) triples map to
/// independent streams.
pub fn stream_id(master_seed: u64, index: u64, tag: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(index ^ splitmix64(tag)))
}

/// Stream tag for the AU-side BS field.
pub const TAG_AU_FIELD: u64 = 0x41;
/// Stream tag for the TU-side BS field.
pub const TAG_TU_FIELD: u64 = 0x54;

fn rng_for(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream)
}

/// Draws one Nakagami-m channel power gain: Gamma(m_v, 1/m_v), mean 1.
pub fn sample_fading_power(link: LinkType, cfg: &NetworkConfig, rng: &mut impl Rng) -> f64 {
    let m = cfg.nakagami_m(link) as f64;
    Gamma::new(m, 1.0 / m).expect("validated fading order").sample(rng)
}

/// Samples the AU-side BS field on a disc of radius `cfg.sim_radius`.
///
/// The point count is Poisson(λ_b·π·R²), positions are uniform on the disc,
/// link marks are independent Bernoulli(p_LoS(z)) given positions, and each
/// point carries its Nakagami power draw. Deterministic given `(cfg, stream)`.
pub fn sample_realization(cfg: &NetworkConfig, stream: u64) -> Realization {
    let mut rng = rng_for(stream);
    let dh = cfg.delta_h_u();
    let mean = cfg.lambda_b * core::f64::consts::PI * cfg.sim_radius * cfg.sim_radius;
    let count = sample_poisson(mean, &mut rng);
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let u: f64 = rng.gen();
        let horiz = cfg.sim_radius * u.sqrt();
        let dist3d = (horiz * horiz + dh * dh).sqrt();
        let link = if rng.gen::<f64>() < cfg.los_probability(horiz) {
            LinkType::Los
        } else {
            LinkType::Nlos
        };
        let fading = sample_fading_power(link, cfg, &mut rng);
        points.push(BsPoint {
            horiz,
            dist3d,
            link,
            fading,
        });
    }
    Realization { points, stream }
}

/// Samples the independent TU-side BS field (Rayleigh fading on every link).
pub fn sample_tu_realization(cfg: &NetworkConfig, stream: u64) -> TuRealization {
    let mut rng = rng_for(stream);
    let dh = cfg.delta_h_t();
    let mean = cfg.lambda_b * core::f64::consts::PI * cfg.sim_radius * cfg.sim_radius;
    let count = sample_poisson(mean, &mut rng);
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let u: f64 = rng.gen();
        let horiz = cfg.sim_radius * u.sqrt();
        let dist3d = (horiz * horiz + dh * dh).sqrt();
        let fading: f64 = Exp1.sample(&mut rng);
        points.push((dist3d, fading));
    }
    TuRealization { points }
}

fn sample_poisson(mean: f64, rng: &mut impl Rng) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive mean").sample(rng) as usize
}

/// Extracts the two smallest 3D distances per link class.
pub fn neighbor_summary(real: &Realization) -> NeighborSummary {
    let mut summary = NeighborSummary::default();
    for (idx, p) in real.points.iter().enumerate() {
        let slot = match p.link {
            LinkType::Los => &mut summary.los,
            LinkType::Nlos => &mut summary.nlos,
        };
        match slot[0] {
            Some((_, best)) if p.dist3d >= best => match slot[1] {
                Some((_, second)) if p.dist3d >= second => {}
                _ => slot[1] = Some((idx, p.dist3d)),
            },
            _ => {
                slot[1] = slot[0];
                slot[0] = Some((idx, p.dist3d));
            }
        }
    }
    summary
}

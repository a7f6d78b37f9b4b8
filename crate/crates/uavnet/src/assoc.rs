//! Strongest-average-RSS association and the interference-aware six-way
//! classification of aerial users.
//!
//! The candidate serving BSs are the nearest and second-nearest BS of each
//! link class. The AU compares the strongest average RSS against the second
//! strongest: at ratio ≥ θ it stays non-cooperative (served by the strongest
//! BS only), otherwise the two strongest BSs jointly serve it. The six
//! possible outcomes are distinguished by the ordered link types involved.

use rand::Rng;

use crate::error::ModelError;
use crate::netmodel::{LinkType, NetworkConfig};
use crate::pointfield::NeighborSummary;

/// The six association cases, in a fixed indexing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AuCase {
    NonCompL,
    NonCompN,
    CompLL,
    CompNN,
    CompLN,
    CompNL,
}

impl AuCase {
    pub const ALL: [AuCase; 6] = [
        AuCase::NonCompL,
        AuCase::NonCompN,
        AuCase::CompLL,
        AuCase::CompNN,
        AuCase::CompLN,
        AuCase::CompNL,
    ];

    pub fn index(self) -> usize {
        match self {
            AuCase::NonCompL => 0,
            AuCase::NonCompN => 1,
            AuCase::CompLL => 2,
            AuCase::CompNN => 3,
            AuCase::CompLN => 4,
            AuCase::CompNL => 5,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AuCase::NonCompL => "noncomp_l",
            AuCase::NonCompN => "noncomp_n",
            AuCase::CompLL => "comp_ll",
            AuCase::CompNN => "comp_nn",
            AuCase::CompLN => "comp_ln",
            AuCase::CompNL => "comp_nl",
        }
    }

    pub fn is_comp(self) -> bool {
        !matches!(self, AuCase::NonCompL | AuCase::NonCompN)
    }
}

/// Association outcome with the serving 3D distances, m.
///
/// CoMP variants carry the distances in RSS order (strongest first); the
/// variant name spells the ordered link types, e.g. `CompNL` is an NLoS BS
/// providing the strongest average RSS paired with a LoS BS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AuClass {
    NonCompL { r_l0: f64 },
    NonCompN { r_n0: f64 },
    CompLL { r_l0: f64, r_l1: f64 },
    CompNN { r_n0: f64, r_n1: f64 },
    CompLN { r_l0: f64, r_n0: f64 },
    CompNL { r_n0: f64, r_l0: f64 },
}

impl AuClass {
    pub fn case(&self) -> AuCase {
        match self {
            AuClass::NonCompL { .. } => AuCase::NonCompL,
            AuClass::NonCompN { .. } => AuCase::NonCompN,
            AuClass::CompLL { .. } => AuCase::CompLL,
            AuClass::CompNN { .. } => AuCase::CompNN,
            AuClass::CompLN { .. } => AuCase::CompLN,
            AuClass::CompNL { .. } => AuCase::CompNL,
        }
    }

    /// Serving BSs as `(distance, link)` pairs, strongest average RSS first.
    pub fn serving_set(&self) -> ServingSet {
        use LinkType::*;
        let raw = match *self {
            AuClass::NonCompL { r_l0 } => vec![(r_l0, Los)],
            AuClass::NonCompN { r_n0 } => vec![(r_n0, Nlos)],
            AuClass::CompLL { r_l0, r_l1 } => vec![(r_l0, Los), (r_l1, Los)],
            AuClass::CompNN { r_n0, r_n1 } => vec![(r_n0, Nlos), (r_n1, Nlos)],
            AuClass::CompLN { r_l0, r_n0 } => vec![(r_l0, Los), (r_n0, Nlos)],
            AuClass::CompNL { r_n0, r_l0 } => vec![(r_n0, Nlos), (r_l0, Los)],
        };
        ServingSet(raw)
    }
}

/// Ordered list of 1 or 2 serving BSs, strongest average RSS first.
#[derive(Debug, Clone, PartialEq)]
pub struct ServingSet(pub Vec<(f64, LinkType)>);

impl ServingSet {
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A candidate serving BS during classification.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    rss: f64,
    dist: f64,
    link: LinkType,
}

/// RSS-order comparison with the deterministic tie-break: higher RSS wins,
/// then LoS over NLoS, then the smaller distance.
fn stronger(a: &Candidate, b: &Candidate) -> bool {
    if a.rss != b.rss {
        return a.rss > b.rss;
    }
    match (a.link, b.link) {
        (LinkType::Los, LinkType::Nlos) => true,
        (LinkType::Nlos, LinkType::Los) => false,
        _ => a.dist < b.dist,
    }
}

/// Classifies the typical AU per the six-way rule at the configured
/// cooperation threshold.
pub fn classify_au(nbrs: &NeighborSummary, cfg: &NetworkConfig) -> Result<AuClass, ModelError> {
    classify_au_with_theta(nbrs, cfg.theta, cfg)
}

/// Classification at an explicit threshold (schemes may override θ, e.g.
/// forcing θ = 1 to disable cooperation).
pub fn classify_au_with_theta(
    nbrs: &NeighborSummary,
    theta: f64,
    cfg: &NetworkConfig,
) -> Result<AuClass, ModelError> {
    let cand = |slot: Option<(usize, f64)>, link: LinkType| {
        slot.map(|(_, dist)| Candidate {
            rss: cfg.gain(dist, link),
            dist,
            link,
        })
    };
    let l0 = cand(nbrs.los[0], LinkType::Los);
    let l1 = cand(nbrs.los[1], LinkType::Los);
    let n0 = cand(nbrs.nlos[0], LinkType::Nlos);
    let n1 = cand(nbrs.nlos[1], LinkType::Nlos);

    // Strongest BS overall is the stronger of the two class-nearest BSs.
    let first = match (l0, n0) {
        (Some(a), Some(b)) => {
            if stronger(&a, &b) {
                a
            } else {
                b
            }
        }
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => return Err(ModelError::DegenerateRealization),
    };
    // Second strongest: the other class's nearest, or the same class's
    // second nearest. An absent class contributes zero RSS.
    let second = match first.link {
        LinkType::Los => pick_stronger(l1, n0),
        LinkType::Nlos => pick_stronger(n1, l0),
    };

    let class = match second {
        None => noncomp(first),
        Some(second) if first.rss >= theta * second.rss => noncomp(first),
        Some(second) => comp(first, second),
    };
    Ok(class)
}

fn pick_stronger(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if stronger(&x, &y) { x } else { y }),
        (x, None) => x,
        (None, y) => y,
    }
}

fn noncomp(first: Candidate) -> AuClass {
    match first.link {
        LinkType::Los => AuClass::NonCompL { r_l0: first.dist },
        LinkType::Nlos => AuClass::NonCompN { r_n0: first.dist },
    }
}

fn comp(first: Candidate, second: Candidate) -> AuClass {
    use LinkType::*;
    match (first.link, second.link) {
        (Los, Los) => AuClass::CompLL {
            r_l0: first.dist,
            r_l1: second.dist,
        },
        (Nlos, Nlos) => AuClass::CompNN {
            r_n0: first.dist,
            r_n1: second.dist,
        },
        (Los, Nlos) => AuClass::CompLN {
            r_l0: first.dist,
            r_n0: second.dist,
        },
        (Nlos, Los) => AuClass::CompNL {
            r_n0: first.dist,
            r_l0: second.dist,
        },
    }
}

/// Indices (into the realization's point list) of the serving BSs for a
/// classified AU, strongest first.
pub fn serving_indices(class: &AuClass, nbrs: &NeighborSummary) -> Vec<usize> {
    let los = |k: usize| nbrs.los[k].expect("classified from this summary").0;
    let nlos = |k: usize| nbrs.nlos[k].expect("classified from this summary").0;
    match class {
        AuClass::NonCompL { .. } => vec![los(0)],
        AuClass::NonCompN { .. } => vec![nlos(0)],
        AuClass::CompLL { .. } => vec![los(0), los(1)],
        AuClass::CompNN { .. } => vec![nlos(0), nlos(1)],
        AuClass::CompLN { .. } => vec![los(0), nlos(0)],
        AuClass::CompNL { .. } => vec![nlos(0), los(0)],
    }
}

/// Draws the typical TU's serving distance from the nearest-BS law
/// `f(r) = 2πλ_b·r·exp(−πλ_b(r²−Δh_t²))`, `r ≥ Δh_t`, by inverse-CDF sampling.
pub fn tu_serving_distance(cfg: &NetworkConfig, rng: &mut impl Rng) -> f64 {
    let dh = cfg.delta_h_t();
    let u: f64 = rng.gen();
    let exceed = -(1.0 - u).ln() / (core::f64::consts::PI * cfg.lambda_b);
    (dh * dh + exceed).sqrt()
}

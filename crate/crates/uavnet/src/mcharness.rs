//! Monte Carlo estimation of coverage probabilities, association
//! frequencies, and ergodic rates, with confidence intervals.
//!
//! Realizations are independent and indexed; realization `i` always consumes
//! the counter-based stream `f(master_seed, i)` regardless of scheduling, and
//! aggregation folds fixed-size chunks in index order, so results are
//! byte-identical for any worker count. Coverage tallies are integer counts;
//! rate sums use compensated summation inside each chunk.

use rayon::prelude::*;

use crate::assoc::AuCase;
use crate::error::ModelError;
use crate::netmodel::NetworkConfig;
use crate::sirlab::{evaluate_realization, Scheme, SirContext};

/// Chunk length for the deterministic parallel fold.
const CHUNK: u64 = 128;

/// Wilson 95% score interval half-width for `successes` out of `trials`.
pub fn wilson_half_width(successes: u64, trials: u64) -> f64 {
    if trials == 0 {
        return f64::NAN;
    }
    let z = 1.959_963_984_540_054; // 97.5% normal quantile
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    half
}

/// Empirical coverage of the typical AU and TU at a threshold grid.
#[derive(Debug, Clone)]
pub struct CoverageResult {
    /// Linear SIR thresholds, ascending.
    pub thresholds: Vec<f64>,
    /// Realization count per association case.
    pub case_counts: [u64; 6],
    /// Association frequencies (sum to 1 over classified realizations).
    pub case_freq: [f64; 6],
    /// Wilson half-widths of the association frequencies.
    pub case_freq_ci: [f64; 6],
    /// Conditional coverage per case per threshold; `NaN` where a case never
    /// occurred.
    pub cond_coverage: [Vec<f64>; 6],
    /// Wilson half-widths for the conditional coverages.
    pub cond_ci: [Vec<f64>; 6],
    /// Overall AU coverage per threshold (law of total probability).
    pub overall: Vec<f64>,
    pub overall_ci: Vec<f64>,
    /// TU coverage per threshold.
    pub tu: Vec<f64>,
    pub tu_ci: Vec<f64>,
    /// Realizations evaluated.
    pub iterations: u64,
    /// Realizations skipped because no BS fell in the window.
    pub degenerate: u64,
}

/// Empirical ergodic rates, bits/s/Hz.
#[derive(Debug, Clone, Copy)]
pub struct RateResult {
    /// AU rate contribution of non-cooperative realizations (indicator-weighted mean).
    pub r_u_noncomp: f64,
    /// AU rate contribution of cooperative realizations.
    pub r_u_comp: f64,
    /// Total AU rate, `r_u_noncomp + r_u_comp`.
    pub r_u_total: f64,
    /// TU rate.
    pub r_t: f64,
    /// Network total, `r_u_total + r_t`.
    pub r_total: f64,
    /// 95% CI half-widths for the fields above, same order.
    pub ci_u_noncomp: f64,
    pub ci_u_comp: f64,
    pub ci_u_total: f64,
    pub ci_t: f64,
    pub ci_total: f64,
    /// Realizations excluded from the means for an infinite (empty
    /// interference) SIR; an artifact of the finite window.
    pub excluded_infinite: u64,
    pub iterations: u64,
}

/// Association frequencies with confidence intervals.
#[derive(Debug, Clone, Copy)]
pub struct AssocFrequencies {
    pub freq: [f64; 6],
    pub ci: [f64; 6],
    pub counts: [u64; 6],
    pub iterations: u64,
}

#[derive(Clone)]
struct CoverageAcc {
    case_counts: [u64; 6],
    // successes[case][t]
    successes: Vec<[u64; 6]>,
    tu_successes: Vec<u64>,
    degenerate: u64,
}

impl CoverageAcc {
    fn new(nt: usize) -> Self {
        CoverageAcc {
            case_counts: [0; 6],
            successes: vec![[0; 6]; nt],
            tu_successes: vec![0; nt],
            degenerate: 0,
        }
    }

    fn merge(mut self, other: &CoverageAcc) -> Self {
        for i in 0..6 {
            self.case_counts[i] += other.case_counts[i];
        }
        for (a, b) in self.successes.iter_mut().zip(&other.successes) {
            for i in 0..6 {
                a[i] += b[i];
            }
        }
        for (a, b) in self.tu_successes.iter_mut().zip(&other.tu_successes) {
            *a += *b;
        }
        self.degenerate += other.degenerate;
        self
    }
}

fn validated(cfg: &NetworkConfig, n: u64) -> Result<(), ModelError> {
    cfg.validate()?;
    if n < 100 {
        return Err(ModelError::config("iterations", "need at least 100 realizations"));
    }
    Ok(())
}

/// Runs `n` realizations and tallies empirical coverage at each threshold.
///
/// Deterministic given `(cfg, scheme, thresholds, n, master_seed)`; the
/// worker count never changes the output.
pub fn estimate_coverage(
    cfg: &NetworkConfig,
    scheme: Scheme,
    thresholds: &[f64],
    n: u64,
    master_seed: u64,
) -> Result<CoverageResult, ModelError> {
    validated(cfg, n)?;
    if thresholds.is_empty() || thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ModelError::config("thresholds", "need a non-empty ascending threshold grid"));
    }
    if thresholds[0] <= 0.0 {
        return Err(ModelError::config("thresholds", "linear SIR thresholds must be positive"));
    }
    let nt = thresholds.len();
    let n_chunks = n.div_ceil(CHUNK);
    let ctx = SirContext::new(cfg);

    let chunks: Vec<CoverageAcc> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = CoverageAcc::new(nt);
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                match evaluate_realization(&ctx, scheme, master_seed, i) {
                    Ok(s) => {
                        let case = s.au_class.case().index();
                        acc.case_counts[case] += 1;
                        for (t, &thr) in thresholds.iter().enumerate() {
                            if s.sir_au > thr {
                                acc.successes[t][case] += 1;
                            }
                            if s.sir_tu > thr {
                                acc.tu_successes[t] += 1;
                            }
                        }
                    }
                    Err(ModelError::DegenerateRealization) => acc.degenerate += 1,
                    Err(e) => panic!("unexpected evaluation failure: {e}"),
                }
            }
            acc
        })
        .collect();

    let total = chunks
        .into_iter()
        .fold(CoverageAcc::new(nt), |a, b| a.merge(&b));

    let classified: u64 = total.case_counts.iter().sum();
    let mut case_freq = [0.0; 6];
    let mut case_freq_ci = [0.0; 6];
    for i in 0..6 {
        case_freq[i] = total.case_counts[i] as f64 / classified as f64;
        case_freq_ci[i] = wilson_half_width(total.case_counts[i], classified);
    }
    let mut cond_coverage: [Vec<f64>; 6] = Default::default();
    let mut cond_ci: [Vec<f64>; 6] = Default::default();
    for case in 0..6 {
        cond_coverage[case] = (0..nt)
            .map(|t| total.successes[t][case] as f64 / total.case_counts[case] as f64)
            .collect();
        cond_ci[case] = (0..nt)
            .map(|t| wilson_half_width(total.successes[t][case], total.case_counts[case]))
            .collect();
    }
    let overall: Vec<f64> = (0..nt)
        .map(|t| total.successes[t].iter().sum::<u64>() as f64 / classified as f64)
        .collect();
    let overall_ci: Vec<f64> = (0..nt)
        .map(|t| wilson_half_width(total.successes[t].iter().sum::<u64>(), classified))
        .collect();
    let tu: Vec<f64> = (0..nt)
        .map(|t| total.tu_successes[t] as f64 / classified as f64)
        .collect();
    let tu_ci: Vec<f64> = (0..nt)
        .map(|t| wilson_half_width(total.tu_successes[t], classified))
        .collect();

    Ok(CoverageResult {
        thresholds: thresholds.to_vec(),
        case_counts: total.case_counts,
        case_freq,
        case_freq_ci,
        cond_coverage,
        cond_ci,
        overall,
        overall_ci,
        tu,
        tu_ci,
        iterations: classified,
        degenerate: total.degenerate,
    })
}

#[derive(Clone, Copy, Default)]
struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

#[derive(Clone, Default)]
struct RateAcc {
    // Indicator-weighted sums and squared sums per component.
    s_nc: KahanSum,
    ss_nc: KahanSum,
    s_c: KahanSum,
    ss_c: KahanSum,
    s_t: KahanSum,
    ss_t: KahanSum,
    s_tot: KahanSum,
    ss_tot: KahanSum,
    finite: u64,
    infinite: u64,
    degenerate: u64,
}

impl RateAcc {
    fn merge(mut self, o: &RateAcc) -> Self {
        for (a, b) in [
            (&mut self.s_nc, &o.s_nc),
            (&mut self.ss_nc, &o.ss_nc),
            (&mut self.s_c, &o.s_c),
            (&mut self.ss_c, &o.ss_c),
            (&mut self.s_t, &o.s_t),
            (&mut self.ss_t, &o.ss_t),
            (&mut self.s_tot, &o.s_tot),
            (&mut self.ss_tot, &o.ss_tot),
        ] {
            a.add(b.sum);
            a.add(b.comp);
        }
        self.finite += o.finite;
        self.infinite += o.infinite;
        self.degenerate += o.degenerate;
        self
    }
}

/// Runs `n` realizations and averages `log2(1 + SIR)`, scaled by the
/// scheme's resource fraction. AU rates are decomposed by cooperative /
/// non-cooperative classification via indicator weighting.
pub fn estimate_rate(
    cfg: &NetworkConfig,
    scheme: Scheme,
    n: u64,
    master_seed: u64,
) -> Result<RateResult, ModelError> {
    validated(cfg, n)?;
    let n_chunks = n.div_ceil(CHUNK);
    let frac = scheme.resource_fraction();
    let ctx = SirContext::new(cfg);

    let chunks: Vec<RateAcc> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = RateAcc::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                match evaluate_realization(&ctx, scheme, master_seed, i) {
                    Ok(s) => {
                        if !s.sir_au.is_finite() || !s.sir_tu.is_finite() {
                            acc.infinite += 1;
                            continue;
                        }
                        let rate_au = frac * (1.0 + s.sir_au).log2();
                        let rate_tu = frac * (1.0 + s.sir_tu).log2();
                        let comp = s.au_class.case().is_comp();
                        let nc = if comp { 0.0 } else { rate_au };
                        let co = if comp { rate_au } else { 0.0 };
                        acc.s_nc.add(nc);
                        acc.ss_nc.add(nc * nc);
                        acc.s_c.add(co);
                        acc.ss_c.add(co * co);
                        acc.s_t.add(rate_tu);
                        acc.ss_t.add(rate_tu * rate_tu);
                        let tot = rate_au + rate_tu;
                        acc.s_tot.add(tot);
                        acc.ss_tot.add(tot * tot);
                        acc.finite += 1;
                    }
                    Err(ModelError::DegenerateRealization) => acc.degenerate += 1,
                    Err(e) => panic!("unexpected evaluation failure: {e}"),
                }
            }
            acc
        })
        .collect();

    let total = chunks.into_iter().fold(RateAcc::default(), |a, b| a.merge(&b));
    let m = total.finite as f64;
    let mean_ci = |s: &KahanSum, ss: &KahanSum| {
        let mean = s.sum / m;
        let var = (ss.sum / m - mean * mean).max(0.0);
        (mean, 1.959_963_984_540_054 * (var / m).sqrt())
    };
    let (r_u_noncomp, ci_u_noncomp) = mean_ci(&total.s_nc, &total.ss_nc);
    let (r_u_comp, ci_u_comp) = mean_ci(&total.s_c, &total.ss_c);
    let (r_t, ci_t) = mean_ci(&total.s_t, &total.ss_t);
    let (r_total, ci_total) = mean_ci(&total.s_tot, &total.ss_tot);
    // The AU total is the sum of the two indicator-weighted parts; its CI
    // comes from the per-realization AU rate.
    let r_u_total = r_u_noncomp + r_u_comp;
    let au_var = {
        let mean = r_u_total;
        ((total.ss_nc.sum + total.ss_c.sum) / m - mean * mean).max(0.0)
    };
    let ci_u_total = 1.959_963_984_540_054 * (au_var / m).sqrt();

    Ok(RateResult {
        r_u_noncomp,
        r_u_comp,
        r_u_total,
        r_t,
        r_total,
        ci_u_noncomp,
        ci_u_comp,
        ci_u_total,
        ci_t,
        ci_total,
        excluded_infinite: total.infinite,
        iterations: total.finite,
    })
}

/// Counts classification outcomes at the configured cooperation threshold.
pub fn estimate_assoc_freq(
    cfg: &NetworkConfig,
    n: u64,
    master_seed: u64,
) -> Result<AssocFrequencies, ModelError> {
    // Association is fading- and scheme-independent; reuse the coverage
    // pipeline at a single token threshold.
    let cov = estimate_coverage(cfg, Scheme::CompNoma, &[1.0], n, master_seed)?;
    Ok(AssocFrequencies {
        freq: cov.case_freq,
        ci: cov.case_freq_ci,
        counts: cov.case_counts,
        iterations: cov.iterations,
    })
}

/// Case lookup helper: frequency of one association case.
pub fn case_freq(freqs: &AssocFrequencies, case: AuCase) -> f64 {
    freqs.freq[case.index()]
}

//! Adaptive Gauss–Kronrod quadrature.
//!
//! A 15-point Kronrod rule (embedded 7-point Gauss) drives a global adaptive
//! subdivision with a worst-interval-first heap. Integrands may be
//! vector-valued, which lets the interference Laplace exponent and all of its
//! s-derivatives share one adaptive pass over the same abscissae.
//!
//! Semi-infinite ranges `[a, ∞)` are mapped onto `[0, 1)` by the rational
//! change of variables `x = a + scale·((1−t)^(−q) − 1)/q`; `q = 1` suits
//! exponentially decaying tails, while larger `q` flattens the `x^(1−alpha)`
//! power-law tails of the interference integrands into integrable endpoint
//! behavior. Every result carries an error estimate; truncation never happens
//! silently.

/// Tolerances and subdivision budget for one adaptive integration pass.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    /// Relative tolerance on the integral value.
    pub rel_tol: f64,
    /// Absolute tolerance floor.
    pub abs_tol: f64,
    /// Maximum number of interval bisections.
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_depth: 48,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        QuadratureSpec {
            rel_tol,
            abs_tol,
            ..Default::default()
        }
    }

    /// Per-level spec for a nest of `levels` one-dimensional passes: each
    /// level gets the `levels`-th root of the requested tolerance so the
    /// composition stays within the original budget.
    pub fn per_level(&self, levels: u32) -> Self {
        QuadratureSpec {
            rel_tol: self.rel_tol.powf(1.0 / levels as f64),
            abs_tol: self.abs_tol.powf(1.0 / levels as f64),
            max_depth: self.max_depth,
        }
    }
}

/// Integral value with its error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    /// Estimated absolute error, accumulated over all subintervals.
    pub error: f64,
    /// Whether the error estimate met the requested tolerance.
    pub converged: bool,
}

impl Quadrature {
    fn scaled(self, factor: f64) -> Quadrature {
        Quadrature {
            value: self.value * factor,
            error: self.error * factor.abs(),
            converged: self.converged,
        }
    }
}

// 15-point Kronrod abscissae on [-1, 1] (positive half) with the embedded
// 7-point Gauss weights; the classic QUADPACK constants.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// One Kronrod evaluation of an `N`-component integrand over `[a, b]`.
/// Returns the Kronrod estimates and a per-pass error estimate taken as the
/// max over components of |Kronrod − Gauss| rescaled QUADPACK-style.
fn kronrod_pass<const N: usize>(f: &mut impl FnMut(f64) -> [f64; N], a: f64, b: f64) -> ([f64; N], f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = [0.0; N];
    let mut gauss = [0.0; N];
    let mut resabs = [0.0; N];
    for i in 0..N {
        kronrod[i] = fc[i] * WGK[7];
        gauss[i] = fc[i] * WG[3];
        resabs[i] = fc[i].abs() * WGK[7];
    }
    for (j, &x) in XGK.iter().take(7).enumerate() {
        let f1 = f(center - half * x);
        let f2 = f(center + half * x);
        for i in 0..N {
            let sum = f1[i] + f2[i];
            kronrod[i] += WGK[j] * sum;
            resabs[i] += WGK[j] * (f1[i].abs() + f2[i].abs());
            if j % 2 == 1 {
                // Odd indices are the embedded Gauss nodes.
                gauss[i] += WG[j / 2] * sum;
            }
        }
    }

    let mut err = 0.0f64;
    for i in 0..N {
        let raw = (kronrod[i] - gauss[i]).abs() * half.abs();
        let scale_base = resabs[i] * half.abs();
        // QUADPACK rescaling: sharpens the raw difference when it is small
        // relative to the integral of |f|.
        let e = if scale_base > 0.0 && raw > 0.0 {
            let r = (200.0 * raw / scale_base).powf(1.5);
            if r < 1.0 {
                scale_base * r
            } else {
                raw
            }
        } else {
            raw
        };
        err = err.max(e);
        kronrod[i] *= half;
    }
    (kronrod, err)
}

struct Interval<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: f64,
}

/// Adaptively integrates an `N`-component integrand over the finite interval
/// `[a, b]`. Convergence is judged on the max-norm across components.
pub fn integrate_vec<const N: usize>(
    mut f: impl FnMut(f64) -> [f64; N],
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> ([f64; N], Quadrature) {
    if a == b {
        return (
            [0.0; N],
            Quadrature {
                value: 0.0,
                error: 0.0,
                converged: true,
            },
        );
    }
    let (value, error) = kronrod_pass(&mut f, a, b);
    let mut intervals = vec![Interval { a, b, value, error }];

    for _ in 0..spec.max_depth {
        let total: f64 = norm(&sum_components::<N>(&intervals));
        let total_err: f64 = intervals.iter().map(|iv| iv.error).sum();
        if total_err <= spec.abs_tol.max(spec.rel_tol * total) {
            break;
        }
        // Split the worst interval.
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let Interval { a, b, .. } = intervals.swap_remove(worst);
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // Interval at floating-point resolution; keep it as-is.
            let (value, error) = kronrod_pass(&mut f, a, b);
            intervals.push(Interval { a, b, value, error: error.min(f64::EPSILON) });
            continue;
        }
        for (lo, hi) in [(a, mid), (mid, b)] {
            let (value, error) = kronrod_pass(&mut f, lo, hi);
            intervals.push(Interval { a: lo, b: hi, value, error });
        }
    }

    let value = sum_components::<N>(&intervals);
    let error: f64 = intervals.iter().map(|iv| iv.error).sum();
    let converged = error <= spec.abs_tol.max(spec.rel_tol * norm(&value));
    (value, Quadrature { value: norm(&value), error, converged })
}

fn sum_components<const N: usize>(intervals: &[Interval<N>]) -> [f64; N] {
    let mut out = [0.0; N];
    // Compensated accumulation keeps the result independent of heap order.
    let mut comp = [0.0; N];
    for iv in intervals {
        for i in 0..N {
            let y = iv.value[i] - comp[i];
            let t = out[i] + y;
            comp[i] = (t - out[i]) - y;
            out[i] = t;
        }
    }
    out
}

fn norm<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Adaptively integrates a scalar integrand over `[a, b]`.
pub fn integrate(f: impl FnMut(f64) -> f64, a: f64, b: f64, spec: &QuadratureSpec) -> Quadrature {
    let mut f = f;
    let (v, q) = integrate_vec(move |x| [f(x)], a, b, spec);
    Quadrature { value: v[0], ..q }
}

/// Tail mapping exponent for semi-infinite integrals.
///
/// `x(t) = a + scale·((1−t)^(−q) − 1)/q` maps `t ∈ [0, 1)` onto `[a, ∞)`.
/// An integrand decaying like `x^(−p)` transforms to `(1−t)^(q(p−1)−1)` near
/// `t = 1`, so choosing `q ≥ 2/(p−1)` removes the endpoint singularity.
#[derive(Debug, Clone, Copy)]
pub enum TailMap {
    /// `q = 1`: integrands with exponential or Gaussian tails.
    Exponential,
    /// Explicit `q` for power-law tails `x^(−p)`; `q = 5` covers `p ≥ 1.4`.
    PowerLaw(f64),
}

impl TailMap {
    fn q(self) -> f64 {
        match self {
            TailMap::Exponential => 1.0,
            TailMap::PowerLaw(q) => q,
        }
    }
}

/// Adaptively integrates an `N`-component integrand over `[a, ∞)`.
///
/// `scale` sets the resolution of the map (roughly the distance over which
/// the integrand varies); it must be positive.
pub fn integrate_vec_semi_inf<const N: usize>(
    mut f: impl FnMut(f64) -> [f64; N],
    a: f64,
    scale: f64,
    map: TailMap,
    spec: &QuadratureSpec,
) -> ([f64; N], Quadrature) {
    debug_assert!(scale > 0.0 && scale.is_finite());
    let q = map.q();
    let g = move |t: f64| {
        let om = 1.0 - t;
        let x = a + scale * (om.powf(-q) - 1.0) / q;
        let jacobian = scale * om.powf(-q - 1.0);
        let mut v = f(x);
        for c in v.iter_mut() {
            *c *= jacobian;
        }
        v
    };
    integrate_vec(g, 0.0, 1.0, spec)
}

/// Scalar version of [`integrate_vec_semi_inf`].
pub fn integrate_semi_inf(
    f: impl FnMut(f64) -> f64,
    a: f64,
    scale: f64,
    map: TailMap,
    spec: &QuadratureSpec,
) -> Quadrature {
    let mut f = f;
    let (v, q) = integrate_vec_semi_inf(move |x| [f(x)], a, scale, map, spec);
    Quadrature { value: v[0], ..q }
}

/// Non-adaptive 15-point Kronrod estimate over `[a, b]`; used for smooth
/// partial panels where a single pass is already at machine accuracy.
pub fn kronrod_fixed(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mut g = |x: f64| [f(x)];
    let (v, _) = kronrod_pass(&mut g, a, b);
    v[0]
}

/// Convenience: scalar adaptive integral rescaled by a constant factor.
pub fn integrate_scaled(
    f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    factor: f64,
    spec: &QuadratureSpec,
) -> Quadrature {
    integrate(f, a, b, spec).scaled(factor)
}

//! Adaptive Gauss-Kronrod integration.
//!
//! The workhorse is a 21-point Gauss-Kronrod rule applied on a list of panels
//! that is refined level by level: every round, each panel whose error exceeds
//! its width-proportional share of the target is bisected. All panels of a
//! round are independent, so they can be evaluated in parallel; the reduction
//! always runs in panel order with compensated summation.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{compensated_sum, map_ordered, ExecMode};

mod spectrum;

pub use spectrum::{integrate_spectrum, SpectralQuantity, SpectrumIntegral, OMEGA_MIN};

/// Values that can be integrated: real or complex.
pub trait QuadValue: Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
    fn parts(self) -> [f64; 2];
    fn from_parts(parts: [f64; 2]) -> Self;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn parts(self) -> [f64; 2] {
        [self, 0.0]
    }
    fn from_parts(parts: [f64; 2]) -> Self {
        parts[0]
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn parts(self) -> [f64; 2] {
        [self.re, self.im]
    }
    fn from_parts(parts: [f64; 2]) -> Self {
        Complex64::new(parts[0], parts[1])
    }
}

/// Outcome of an integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T = f64> {
    pub value: T,
    /// Estimated absolute error, including `tail_estimate` when present.
    pub error_estimate: f64,
    /// Number of accepted panels.
    pub panels: usize,
    /// Bound on the contribution of any truncated part of the domain.
    pub tail_estimate: f64,
}

/// Convergence targets. An integral is accepted once its summed error
/// estimate is at most `max(relative * |value|, absolute)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub relative: f64,
    pub absolute: f64,
    pub max_panels: usize,
    pub mode: ExecMode,
}

impl Tolerance {
    pub fn new(relative: f64) -> Self {
        Tolerance {
            relative,
            absolute: 1e-300,
            max_panels: 1 << 22,
            mode: ExecMode::default(),
        }
    }

    pub fn with_absolute(mut self, absolute: f64) -> Self {
        self.absolute = absolute;
        self
    }

    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }

    pub fn with_mode(mut self, mode: ExecMode) -> Self {
        self.mode = mode;
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let ok = |t: f64| t.is_finite() && t >= 0.0;
        if !(ok(self.relative) && ok(self.absolute)) || (self.relative == 0.0 && self.absolute == 0.0) {
            return Err(Error::InvalidTolerance(self.relative));
        }
        Ok(())
    }

    fn target(&self, value_magnitude: f64) -> f64 {
        (self.relative * value_magnitude).max(self.absolute)
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One evaluated panel.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Panel<T> {
    pub a: f64,
    pub b: f64,
    pub value: T,
    pub error: f64,
}

/// 21-point Kronrod estimate on `[a, b]` with the embedded 10-point Gauss
/// rule as error indicator (QUADPACK error scaling).
pub(crate) fn gauss_kronrod21<T, F>(f: &F, a: f64, b: f64) -> Panel<T>
where
    T: QuadValue,
    F: Fn(f64) -> T + ?Sized,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = T::zero();
    let mut abs_sum = WGK[10] * fc.magnitude();
    let mut samples = [(T::zero(), T::zero()); 10];

    for (j, sample) in samples.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        *sample = (f1, f2);
        kronrod = kronrod + (f1 + f2) * WGK[j];
        abs_sum += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
    }

    let mean = kronrod * 0.5;
    let mut asc = WGK[10] * (fc - mean).magnitude();
    for (j, &(f1, f2)) in samples.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).magnitude() + (f2 - mean).magnitude());
    }

    let result = kronrod * half;
    let res_abs = abs_sum * abs_half;
    let res_asc = asc * abs_half;
    let mut err = ((kronrod - gauss) * half).magnitude();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    if !result.magnitude().is_finite() {
        err = f64::INFINITY;
    }
    Panel {
        a,
        b,
        value: result,
        error: err,
    }
}

pub(crate) fn sum_values<T: QuadValue>(values: impl Iterator<Item = T> + Clone) -> T {
    let re = compensated_sum(values.clone().map(|v| v.parts()[0]));
    let im = compensated_sum(values.map(|v| v.parts()[1]));
    T::from_parts([re, im])
}

/// Panels that can no longer be bisected in floating point.
fn splittable(a: f64, b: f64) -> bool {
    let mid = 0.5 * (a + b);
    mid > a.min(b) && mid < a.max(b) && (b - a).abs() > 64.0 * f64::EPSILON * a.abs().max(b.abs())
}

/// Result together with the accepted panels.
type Refined<T> = (QuadratureResult<T>, Vec<Panel<T>>);

/// Adaptive refinement starting from the panels delimited by `breaks`
/// (strictly monotone). Returns the accepted panels alongside the result.
pub(crate) fn refine_panels<T, F>(
    f: &F,
    breaks: &[f64],
    tol: &Tolerance,
) -> std::result::Result<Refined<T>, Refined<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T + Sync + Send,
{
    let spans: Vec<(f64, f64)> = breaks.windows(2).map(|w| (w[0], w[1])).collect();
    let mut panels: Vec<Panel<T>> = map_ordered(tol.mode, &spans, |&(a, b)| gauss_kronrod21(f, a, b));
    let total_width = (breaks[breaks.len() - 1] - breaks[0]).abs();

    loop {
        let value = sum_values(panels.iter().map(|p| p.value));
        let error = compensated_sum(panels.iter().map(|p| p.error));
        let target = tol.target(value.magnitude());
        let result = QuadratureResult {
            value,
            error_estimate: error,
            panels: panels.len(),
            tail_estimate: 0.0,
        };
        if error <= target {
            return Ok((result, panels));
        }
        if panels.len() >= tol.max_panels || !error.is_finite() && panels.iter().all(|p| !splittable(p.a, p.b)) {
            return Err((result, panels));
        }

        let share = |p: &Panel<T>| target * (p.b - p.a).abs() / total_width;
        let mut marked: Vec<bool> = panels
            .iter()
            .map(|p| (p.error > share(p)) && splittable(p.a, p.b))
            .collect();
        if !marked.iter().any(|&m| m) {
            // Error concentrated in panels that can no longer shrink.
            match panels
                .iter()
                .enumerate()
                .filter(|(_, p)| splittable(p.a, p.b))
                .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            {
                Some((i, _)) => marked[i] = true,
                None => return Err((result, panels)),
            }
        }
        let budget = tol.max_panels.saturating_sub(panels.len());
        let mut children_spans = Vec::new();
        let mut used = 0usize;
        for (p, m) in panels.iter().zip(marked.iter_mut()) {
            if *m && used < budget {
                let mid = 0.5 * (p.a + p.b);
                children_spans.push((p.a, mid));
                children_spans.push((mid, p.b));
                used += 1;
            } else {
                *m = false;
            }
        }
        let children: Vec<Panel<T>> = map_ordered(tol.mode, &children_spans, |&(a, b)| gauss_kronrod21(f, a, b));
        let mut next = Vec::with_capacity(panels.len() + used);
        let mut child = children.into_iter();
        for (p, m) in panels.into_iter().zip(marked) {
            if m {
                next.push(child.next().expect("two children per split"));
                next.push(child.next().expect("two children per split"));
            } else {
                next.push(p);
            }
        }
        panels = next;
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::InvalidGrid(format!("integration interval [{a}, {b}] must be finite and increasing")));
    }
    Ok(())
}

fn non_convergence<T: QuadValue>(r: QuadratureResult<T>) -> Error {
    Error::NonConvergence {
        value: r.value.parts()[0],
        error_estimate: r.error_estimate,
        panels: r.panels,
    }
}

/// Integrates `f` over `[a, b]`, bisecting adaptively until the summed error
/// estimate meets `tol`.
pub fn integrate_adaptive<T, F>(f: F, a: f64, b: f64, tol: &Tolerance) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T + Sync + Send,
{
    integrate_with_breaks(f, &[a, b], tol)
}

/// Like [`integrate_adaptive`], but starting from a caller-supplied panel
/// partition (e.g. known peak locations).
pub fn integrate_with_breaks<T, F>(f: F, breaks: &[f64], tol: &Tolerance) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T + Sync + Send,
{
    tol.validate()?;
    if breaks.len() < 2 {
        return Err(Error::InvalidGrid("need at least two breakpoints".into()));
    }
    for w in breaks.windows(2) {
        check_interval(w[0], w[1])?;
    }
    refine_panels(&f, breaks, tol).map(|(r, _)| r).map_err(|(r, _)| non_convergence(r))
}

/// Integrates over `[a, inf)` through the map `x = a + t / (1 - t)`.
pub fn integrate_semi_infinite<T, F>(f: F, a: f64, tol: &Tolerance) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T + Sync + Send,
{
    if !a.is_finite() {
        return Err(Error::InvalidGrid(format!("lower limit {a} must be finite")));
    }
    let mapped = move |t: f64| {
        let s = 1.0 - t;
        f(a + t / s) * (1.0 / (s * s))
    };
    // Start from a few panels so an oscillating integrand is sampled before
    // the first error estimate is trusted.
    let breaks: Vec<f64> = (0..=16).map(|i| i as f64 / 16.0).collect();
    integrate_with_breaks(mapped, &breaks, tol)
}

/// Cauchy principal value of `f` over `[a, b]` where `f` has a simple pole at
/// `singular_point`.
///
/// The largest interval symmetric about the pole is folded onto itself, so
/// the integrand there is `f(s + t) + f(s - t)`, which stays bounded; the
/// remainder is integrated normally.
pub fn principal_value<F>(f: F, singular_point: f64, a: f64, b: f64, tol: &Tolerance) -> Result<QuadratureResult<f64>>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    let radius = (singular_point - a).min(b - singular_point);
    principal_value_with_radius(f, singular_point, a, b, radius, tol)
}

/// Principal value with an explicit symmetric excision radius
/// `0 < radius <= min(s - a, b - s)`.
pub fn principal_value_with_radius<F>(
    f: F,
    singular_point: f64,
    a: f64,
    b: f64,
    radius: f64,
    tol: &Tolerance,
) -> Result<QuadratureResult<f64>>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    tol.validate()?;
    check_interval(a, b)?;
    let s = singular_point;
    if !(s > a && s < b) {
        return Err(Error::InvalidGrid(format!("singular point {s} must lie strictly inside [{a}, {b}]")));
    }
    if !(radius > 0.0 && radius <= (s - a).min(b - s) * (1.0 + 4.0 * f64::EPSILON)) {
        return Err(Error::InvalidGrid(format!("excision radius {radius} does not fit inside [{a}, {b}]")));
    }
    let radius = radius.min((s - a).min(b - s));

    // `s + t` and `s - t` round to nodes whose true offsets differ slightly
    // from `t`; rescaling each term by `offset / t` keeps the pole parts
    // exactly antisymmetric so they cancel.
    let paired = |t: f64| {
        let (up, down) = (s + t, s - t);
        let (d_up, d_down) = (up - s, s - down);
        if d_up == 0.0 || d_down == 0.0 {
            return 0.0;
        }
        f(up) * (d_up / t) + f(down) * (d_down / t)
    };
    // A cancelling pole leaves `paired` bounded near t = 0 and small next to
    // the individual terms; a non-cancelling one fails both.
    let t_near = radius * 1e-6;
    let near = paired(t_near).abs();
    let scale = f(s + t_near).abs() + f(s - t_near).abs();
    let bounded = near <= 10.0 * (paired(radius * 1e-4).abs() + paired(0.5 * radius).abs());
    if !near.is_finite() || (!bounded && near > 1e-2 * scale) {
        return Err(Error::NonCancellation(s));
    }

    const SUBDIVISIONS: usize = 16;
    let inner: Vec<f64> = (0..=SUBDIVISIONS).map(|i| radius * i as f64 / SUBDIVISIONS as f64).collect();
    let core = refine_panels(&paired, &inner, tol).map_err(|(r, _)| non_convergence(r))?.0;

    let mut value = vec![core.value];
    let mut error = core.error_estimate;
    let mut panels = core.panels;
    for (lo, hi) in [(a, s - radius), (s + radius, b)] {
        if hi - lo <= 0.0 {
            continue;
        }
        let breaks = outer_breaks(lo, hi, SUBDIVISIONS);
        let (r, _) = refine_panels(&f, &breaks, tol).map_err(|(r, _)| non_convergence(r))?;
        value.push(r.value);
        error += r.error_estimate;
        panels += r.panels;
    }
    Ok(QuadratureResult {
        value: compensated_sum(value),
        error_estimate: error,
        panels,
        tail_estimate: 0.0,
    })
}

/// Geometric spacing over long positive ranges, uniform otherwise.
fn outer_breaks(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if lo > 0.0 && hi / lo > 10.0 {
        let decades = (hi / lo).log10();
        let count = ((decades * n as f64).ceil() as usize).max(n);
        let ratio = (hi / lo).powf(1.0 / count as f64);
        let mut breaks: Vec<f64> = (0..count).map(|i| lo * ratio.powi(i as i32)).collect();
        breaks.push(hi);
        breaks
    } else {
        let mut breaks: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        breaks.push(hi);
        breaks
    }
}

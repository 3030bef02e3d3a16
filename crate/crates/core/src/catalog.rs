//! Members of the normalized class: closed-form families, polynomials, raw
//! series and functions synthesized from Schwarz functions.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{horner, SeriesError, TaylorSeries, DEFAULT_ORDER};

/// Tolerance on `f(0) = 0`, `f'(0) = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Winding samples used by [`count_zeros`] unless the caller asks otherwise.
pub const DEFAULT_WINDING_SAMPLES: usize = 8192;
/// Minimum |f| tolerated on a winding contour.
pub const CONTOUR_MIN_MODULUS: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("function is not normalized: f(0) = {c0}, f'(0) = {c1}")]
    Normalization { c0: Complex64, c1: Complex64 },
    #[error("Schwarz function must vanish at the origin, got w(0) = {0}")]
    SchwarzNotZeroAtOrigin(Complex64),
    #[error("Schwarz function reaches |w| = {sup} >= 1 on |z| = {radius}")]
    SchwarzTooLarge { sup: f64, radius: f64 },
    #[error("alpha = {0} outside [0, 1)")]
    AlphaOutOfRange(f64),
    #[error("function nearly vanishes on |z| = {radius} (min |f| = {min_modulus:e})")]
    IndeterminateContour { radius: f64, min_modulus: f64 },
    #[error("radius {0} outside (0, 1)")]
    RadiusOutOfRange(f64),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Coefficient list `[[re, im], ...]` as it appears in function documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffList {
    pub coeffs: Vec<[f64; 2]>,
}

/// Function-spec document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum FunctionSpec {
    #[serde(rename = "identity")]
    Identity,
    #[serde(rename = "koebe")]
    Koebe,
    #[serde(rename = "quad")]
    Quad { c: [f64; 2] },
    #[serde(rename = "exp_scaled")]
    ExpScaled { a: [f64; 2] },
    #[serde(rename = "poly")]
    Poly { coeffs: Vec<[f64; 2]> },
    #[serde(rename = "series")]
    Series { coeffs: Vec<[f64; 2]> },
    #[serde(rename = "schwarz_C")]
    SchwarzC { w: CoeffList },
    #[serde(rename = "schwarz_Sstar")]
    SchwarzSstar { alpha: f64, w: CoeffList },
}

impl FunctionSpec {
    pub fn quad(c: f64) -> Self {
        FunctionSpec::Quad { c: [c, 0.0] }
    }

    pub fn exp_scaled(a: f64) -> Self {
        FunctionSpec::ExpScaled { a: [a, 0.0] }
    }

    pub fn poly(coeffs: &[f64]) -> Self {
        FunctionSpec::Poly { coeffs: coeffs.iter().map(|&c| [c, 0.0]).collect() }
    }

    /// Short human-readable label, used in reports and test output.
    pub fn label(&self) -> String {
        match self {
            FunctionSpec::Identity => "identity".into(),
            FunctionSpec::Koebe => "koebe".into(),
            FunctionSpec::Quad { c } => format!("quad({}{:+}i)", c[0], c[1]),
            FunctionSpec::ExpScaled { a } => format!("exp_scaled({}{:+}i)", a[0], a[1]),
            FunctionSpec::Poly { coeffs } => format!("poly(deg {})", coeffs.len().saturating_sub(1)),
            FunctionSpec::Series { coeffs } => format!("series({} terms)", coeffs.len()),
            FunctionSpec::SchwarzC { .. } => "schwarz_C".into(),
            FunctionSpec::SchwarzSstar { alpha, .. } => format!("schwarz_Sstar(alpha={alpha})"),
        }
    }
}

pub(crate) fn to_complex(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

pub(crate) fn from_complex(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

/// Value of `f`, `f'`, `f''`, and of `q = f/z` with its derivative, at one
/// point. `q` lets `zf'/f = f'/q` be formed without cancellation near 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub f: Complex64,
    pub fp: Complex64,
    pub fpp: Complex64,
    pub q: Complex64,
    pub qp: Complex64,
}

/// Exact pointwise evaluator attached to a function family.
pub trait ClosedForm: Send + Sync + fmt::Debug {
    fn jet(&self, z: Complex64) -> Jet;

    /// `G = zf'/f` and `G'` when the family knows them directly.
    fn g_jet(&self, _z: Complex64) -> Option<(Complex64, Complex64)> {
        None
    }

    /// True when `f` provably vanishes only at the origin in the disk.
    fn only_origin_zero(&self) -> bool {
        false
    }
}

#[derive(Debug)]
struct IdentityForm;

impl ClosedForm for IdentityForm {
    fn jet(&self, z: Complex64) -> Jet {
        Jet { f: z, fp: ONE, fpp: ZERO, q: ONE, qp: ZERO }
    }

    fn only_origin_zero(&self) -> bool {
        true
    }
}

/// `z / (1 - z)^2`
#[derive(Debug)]
struct KoebeForm;

impl ClosedForm for KoebeForm {
    fn jet(&self, z: Complex64) -> Jet {
        let u = ONE / (ONE - z);
        let u2 = u * u;
        let u3 = u2 * u;
        Jet {
            f: z * u2,
            fp: (ONE + z) * u3,
            fpp: (z * 2.0 + 4.0) * u3 * u,
            q: u2,
            qp: u3 * 2.0,
        }
    }

    fn g_jet(&self, z: Complex64) -> Option<(Complex64, Complex64)> {
        let u = ONE / (ONE - z);
        Some(((ONE + z) * u, u * u * 2.0))
    }

    fn only_origin_zero(&self) -> bool {
        true
    }
}

/// `z + c z^2`
#[derive(Debug)]
struct QuadForm {
    c: Complex64,
}

impl ClosedForm for QuadForm {
    fn jet(&self, z: Complex64) -> Jet {
        Jet {
            f: z + self.c * z * z,
            fp: ONE + self.c * z * 2.0,
            fpp: self.c * 2.0,
            q: ONE + self.c * z,
            qp: self.c,
        }
    }
}

/// `z exp(a z)`
#[derive(Debug)]
struct ExpScaledForm {
    a: Complex64,
}

impl ClosedForm for ExpScaledForm {
    fn jet(&self, z: Complex64) -> Jet {
        let e = (self.a * z).exp();
        Jet {
            f: z * e,
            fp: (ONE + self.a * z) * e,
            fpp: (self.a * 2.0 + self.a * self.a * z) * e,
            q: e,
            qp: self.a * e,
        }
    }

    fn g_jet(&self, z: Complex64) -> Option<(Complex64, Complex64)> {
        Some((ONE + self.a * z, self.a))
    }

    fn only_origin_zero(&self) -> bool {
        true
    }
}

/// Evaluation through (trimmed) coefficient vectors.
#[derive(Debug, Clone)]
struct SeriesForm {
    f: Vec<Complex64>,
    fp: Vec<Complex64>,
    fpp: Vec<Complex64>,
    q: Vec<Complex64>,
    qp: Vec<Complex64>,
}

fn trimmed(s: &TaylorSeries) -> Vec<Complex64> {
    let c = s.coeffs();
    let end = c.iter().rposition(|x| x.norm() != 0.0).map_or(1, |i| i + 1);
    c[..end].to_vec()
}

impl SeriesForm {
    fn new(f: &TaylorSeries) -> Self {
        let fp = f.derivative();
        let q = f.shift_down();
        Self {
            f: trimmed(f),
            fp: trimmed(&fp),
            fpp: trimmed(&fp.derivative()),
            q: trimmed(&q),
            qp: trimmed(&q.derivative()),
        }
    }
}

impl ClosedForm for SeriesForm {
    fn jet(&self, z: Complex64) -> Jet {
        Jet {
            f: horner(&self.f, z),
            fp: horner(&self.fp, z),
            fpp: horner(&self.fpp, z),
            q: horner(&self.q, z),
            qp: horner(&self.qp, z),
        }
    }
}

/// Function with prescribed `zf'/f = (1 + (1-2α) w) / (1 - w)`; `f` itself is
/// the materialized series, `G` comes straight from `w`.
#[derive(Debug)]
struct StarlikeSynthForm {
    series: SeriesForm,
    w: Vec<Complex64>,
    wp: Vec<Complex64>,
    alpha: f64,
}

impl ClosedForm for StarlikeSynthForm {
    fn jet(&self, z: Complex64) -> Jet {
        self.series.jet(z)
    }

    fn g_jet(&self, z: Complex64) -> Option<(Complex64, Complex64)> {
        let w = horner(&self.w, z);
        let wp = horner(&self.wp, z);
        let d = ONE - w;
        let g = (ONE + w * (1.0 - 2.0 * self.alpha)) / d;
        let gp = wp * (2.0 * (1.0 - self.alpha)) / (d * d);
        Some((g, gp))
    }

    fn only_origin_zero(&self) -> bool {
        true
    }
}

/// A Schwarz function candidate: analytic, `w(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchwarzFunction {
    series: TaylorSeries,
}

impl SchwarzFunction {
    pub fn new(series: TaylorSeries) -> Result<Self, CatalogError> {
        let c0 = series.coeff(0);
        if c0.norm() != 0.0 {
            return Err(CatalogError::SchwarzNotZeroAtOrigin(c0));
        }
        Ok(Self { series })
    }

    /// From `[re, im]` pairs, padded to at least `order`.
    pub fn from_coeffs(coeffs: &[[f64; 2]], order: usize) -> Result<Self, CatalogError> {
        let c = to_complex(coeffs);
        let n = order.max(c.len().saturating_sub(1));
        Self::new(TaylorSeries::from_prefix(&c, n)?)
    }

    /// `z^n`
    pub fn monomial(n: usize, order: usize) -> Self {
        let mut c = vec![ZERO; n + 1];
        c[n] = ONE;
        Self::new(TaylorSeries::from_prefix(&c, order.max(n)).unwrap()).unwrap()
    }

    pub fn series(&self) -> &TaylorSeries {
        &self.series
    }

    pub fn to_doc(&self) -> CoeffList {
        CoeffList { coeffs: from_complex(&trimmed(&self.series)) }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.series.eval(z)
    }

    pub fn eval_prime(&self, z: Complex64) -> Complex64 {
        self.series.derivative().eval(z)
    }

    /// Largest sampled |w| on the circle of the given radius.
    pub fn sampled_sup(&self, radius: f64, samples: usize) -> f64 {
        let c = trimmed(&self.series);
        (0..samples)
            .map(|j| {
                let z = Complex64::from_polar(radius, 2.0 * PI * j as f64 / samples as f64);
                horner(&c, z).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Uniformly scales `w` so that its sampled sup on `radius` equals `target`.
    pub fn scaled_to(&self, target: f64, radius: f64, samples: usize) -> Self {
        let sup = self.sampled_sup(radius, samples);
        if sup == 0.0 {
            return self.clone();
        }
        Self { series: self.series.scale(Complex64::new(target / sup, 0.0)) }
    }
}

/// A member of the normalized class with its materialized series and an
/// exact evaluator.
#[derive(Clone)]
pub struct AnalyticFunction {
    spec: FunctionSpec,
    series: TaylorSeries,
    form: Arc<dyn ClosedForm>,
    has_closed_form: bool,
}

impl fmt::Debug for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticFunction")
            .field("spec", &self.spec)
            .field("order", &self.series.order())
            .field("has_closed_form", &self.has_closed_form)
            .finish()
    }
}

fn check_normalized(c: &[Complex64]) -> Result<(), CatalogError> {
    let c0 = c.first().copied().unwrap_or(ZERO);
    let c1 = c.get(1).copied().unwrap_or(ZERO);
    if c0.norm() > NORMALIZATION_TOL || (c1 - ONE).norm() > NORMALIZATION_TOL {
        return Err(CatalogError::Normalization { c0, c1 });
    }
    Ok(())
}

impl AnalyticFunction {
    /// Builds the function described by `spec` with series order [`DEFAULT_ORDER`].
    pub fn from_spec(spec: &FunctionSpec) -> Result<Self, CatalogError> {
        Self::with_order(spec, DEFAULT_ORDER)
    }

    /// Builds the function with the given series truncation order. Polynomial
    /// inputs keep every coefficient even if that exceeds `order`.
    pub fn with_order(spec: &FunctionSpec, order: usize) -> Result<Self, CatalogError> {
        let order = order.max(2);
        let closed = |form: Arc<dyn ClosedForm>, series: TaylorSeries| Self {
            spec: spec.clone(),
            series,
            form,
            has_closed_form: true,
        };
        let built = match spec {
            FunctionSpec::Identity => closed(Arc::new(IdentityForm), TaylorSeries::identity(order)),
            FunctionSpec::Koebe => {
                let c: Vec<Complex64> = (0..=order).map(|k| Complex64::new(k as f64, 0.0)).collect();
                closed(Arc::new(KoebeForm), TaylorSeries::new(c)?)
            }
            FunctionSpec::Quad { c } => {
                let c = Complex64::new(c[0], c[1]);
                let series = TaylorSeries::from_prefix(&[ZERO, ONE, c], order)?;
                closed(Arc::new(QuadForm { c }), series)
            }
            FunctionSpec::ExpScaled { a } => {
                let a = Complex64::new(a[0], a[1]);
                // z e^{az} = sum a^{k-1}/(k-1)! z^k
                let mut c = vec![ZERO; order + 1];
                let mut term = ONE;
                for (k, slot) in c.iter_mut().enumerate().skip(1) {
                    if k > 1 {
                        term = term * a / (k - 1) as f64;
                    }
                    *slot = term;
                }
                closed(Arc::new(ExpScaledForm { a }), TaylorSeries::new(c)?)
            }
            FunctionSpec::Poly { coeffs } | FunctionSpec::Series { coeffs } => {
                let c = to_complex(coeffs);
                check_normalized(&c)?;
                let n = order.max(c.len().saturating_sub(1));
                Self::from_series(spec.clone(), TaylorSeries::from_prefix(&c, n)?)
            }
            FunctionSpec::SchwarzC { w } => {
                let w = SchwarzFunction::from_coeffs(&w.coeffs, order)?;
                return synthesize_from_schwarz_c(&w).map(|mut f| {
                    f.spec = spec.clone();
                    f
                });
            }
            FunctionSpec::SchwarzSstar { alpha, w } => {
                let w = SchwarzFunction::from_coeffs(&w.coeffs, order)?;
                return synthesize_from_schwarz_sstar(&w, *alpha).map(|mut f| {
                    f.spec = spec.clone();
                    f
                });
            }
        };
        check_normalized(built.series.coeffs())?;
        Ok(built)
    }

    fn from_series(spec: FunctionSpec, series: TaylorSeries) -> Self {
        let form = Arc::new(SeriesForm::new(&series));
        Self { spec, series, form, has_closed_form: false }
    }

    pub fn spec(&self) -> &FunctionSpec {
        &self.spec
    }

    pub fn series(&self) -> &TaylorSeries {
        &self.series
    }

    pub fn has_closed_form(&self) -> bool {
        self.has_closed_form
    }

    pub fn only_origin_zero(&self) -> bool {
        self.form.only_origin_zero()
    }

    pub fn jet(&self, z: Complex64) -> Jet {
        self.form.jet(z)
    }

    pub(crate) fn g_override(&self, z: Complex64) -> Option<(Complex64, Complex64)> {
        self.form.g_jet(z)
    }

    pub fn eval_f(&self, z: Complex64) -> Complex64 {
        self.form.jet(z).f
    }

    pub fn eval_fp(&self, z: Complex64) -> Complex64 {
        self.form.jet(z).fp
    }

    pub fn eval_fpp(&self, z: Complex64) -> Complex64 {
        self.form.jet(z).fpp
    }
}

/// Inverts `w = f' - 1`: `f = z + ∫ w`.
pub fn synthesize_from_schwarz_c(w: &SchwarzFunction) -> Result<AnalyticFunction, CatalogError> {
    // one extra order so a polynomial w keeps its top coefficient
    let ws = w.series().truncate(w.series().order() + 1);
    let f = TaylorSeries::identity(ws.order()).add(&ws.antiderivative())?;
    let spec = FunctionSpec::SchwarzC { w: w.to_doc() };
    Ok(AnalyticFunction::from_series(spec, f))
}

/// Inverts `zf'/f = (1 + (1-2α) w) / (1 - w)` through
/// `f = z exp(∫ (G - 1)/t dt)`.
pub fn synthesize_from_schwarz_sstar(
    w: &SchwarzFunction,
    alpha: f64,
) -> Result<AnalyticFunction, CatalogError> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(CatalogError::AlphaOutOfRange(alpha));
    }
    let radius = 0.999;
    let sup = w.sampled_sup(radius, 4096);
    if sup >= 1.0 {
        return Err(CatalogError::SchwarzTooLarge { sup, radius });
    }
    let ws = w.series();
    let n = ws.order();
    let one = TaylorSeries::constant(ONE, n);
    let denom = one.sub(ws)?;
    // G - 1 = 2(1-α) w / (1 - w)
    let g_minus_one = ws.scale(Complex64::new(2.0 * (1.0 - alpha), 0.0)).div(&denom)?;
    let q = g_minus_one.exp_integral()?;
    let f = q.truncate(n + 1).shift_up();
    let form = StarlikeSynthForm {
        series: SeriesForm::new(&f),
        w: trimmed(ws),
        wp: trimmed(&ws.derivative()),
        alpha,
    };
    Ok(AnalyticFunction {
        spec: FunctionSpec::SchwarzSstar { alpha, w: w.to_doc() },
        series: f,
        form: Arc::new(form),
        has_closed_form: false,
    })
}

/// Winding count of `f` around 0 along `|z| = radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroReport {
    pub radius: f64,
    pub winding: i64,
    pub extra_zeros: i64,
}

/// Winding number of `h` around the origin along `|z| = radius`, by
/// accumulating principal argument increments between samples.
pub fn winding_number(
    h: impl Fn(Complex64) -> Complex64,
    radius: f64,
    samples: usize,
) -> Result<i64, CatalogError> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(CatalogError::RadiusOutOfRange(radius));
    }
    let samples = samples.max(8);
    let mut min_modulus = f64::INFINITY;
    let first = h(Complex64::new(radius, 0.0));
    let mut prev = first;
    let mut total = 0.0;
    for j in 1..=samples {
        let v = if j == samples {
            first
        } else {
            h(Complex64::from_polar(radius, 2.0 * PI * j as f64 / samples as f64))
        };
        min_modulus = min_modulus.min(v.norm());
        total += (v / prev).arg();
        prev = v;
    }
    min_modulus = min_modulus.min(first.norm());
    if !total.is_finite() {
        return Err(CatalogError::IndeterminateContour { radius, min_modulus: f64::NAN });
    }
    if min_modulus < CONTOUR_MIN_MODULUS {
        return Err(CatalogError::IndeterminateContour { radius, min_modulus });
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

pub fn count_zeros(
    f: &AnalyticFunction,
    radius: f64,
    samples: usize,
) -> Result<ZeroReport, CatalogError> {
    let winding = winding_number(|z| f.eval_f(z), radius, samples)?;
    Ok(ZeroReport { radius, winding, extra_zeros: winding - 1 })
}

/// Named reference functions used by the cross-checks and the CLI examples.
pub fn standard_catalog() -> Vec<FunctionSpec> {
    vec![
        FunctionSpec::Identity,
        FunctionSpec::Koebe,
        FunctionSpec::quad(0.25),
        FunctionSpec::quad(0.05),
        FunctionSpec::Quad { c: [0.1, 0.2] },
        FunctionSpec::exp_scaled(0.5),
        FunctionSpec::ExpScaled { a: [0.0, 0.3] },
        FunctionSpec::poly(&[0.0, 1.0, 0.1, -0.05]),
        FunctionSpec::SchwarzC { w: CoeffList { coeffs: vec![[0.0, 0.0], [0.5, 0.0]] } },
        FunctionSpec::SchwarzSstar {
            alpha: 0.3,
            w: CoeffList { coeffs: vec![[0.0, 0.0], [0.0, 0.0], [0.5, 0.0]] },
        },
    ]
}

fn random_in_disk(rng: &mut impl Rng, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    let t = rng.gen_range(0.0..2.0 * PI);
    Complex64::from_polar(r, t)
}

/// `z + Σ_{k=2}^{d} c_k z^k` with `d` uniform in `2..=max_degree` and
/// `c_k` uniform in the disk of radius `rho / k`.
pub fn random_polynomial(rng: &mut impl Rng, rho: f64, max_degree: usize) -> FunctionSpec {
    let d = rng.gen_range(2..=max_degree.max(2));
    let mut c = vec![ZERO, ONE];
    for k in 2..=d {
        c.push(random_in_disk(rng, rho / k as f64));
    }
    FunctionSpec::Poly { coeffs: from_complex(&c) }
}

/// Seeded random polynomial corpus of degree at most 6.
pub fn random_corpus(count: usize, rho: f64, seed: u64) -> Vec<FunctionSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_polynomial(&mut rng, rho, 6)).collect()
}

/// Seeded random Schwarz polynomials of degree at most 6, scaled so their
/// sampled sup on `|z| = 0.999` is `target_sup`.
pub fn random_schwarz_functions(count: usize, target_sup: f64, seed: u64) -> Vec<SchwarzFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let d = rng.gen_range(1..=6);
            let mut c = vec![ZERO];
            for _ in 1..=d {
                c.push(random_in_disk(&mut rng, 1.0));
            }
            let w = SchwarzFunction::new(TaylorSeries::from_prefix(&c, DEFAULT_ORDER).unwrap()).unwrap();
            w.scaled_to(target_sup, 0.999, 4096)
        })
        .collect()
}

//! Pointwise criterion functionals, their bounds, and class-membership margins.
//!
//! Every hypothesis functional implements [`Criterion`]; a
//! [`CriterionRegistry`] maps document kinds (`"T1"`, `"T2_minus"`, ...) to
//! constructors so callers pick a criterion by name at runtime.

use std::collections::BTreeMap;
use std::fmt;

use bitflags::bitflags;
use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::catalog::AnalyticFunction;

/// Below this modulus `f(z)` (z ≠ 0) or `f'(z)` is treated as zero.
pub const POLE_EPS: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CriterionError {
    #[error("unknown criterion kind {0:?}")]
    UnknownKind(String),
    #[error("criterion {kind} requires field {field:?}")]
    MissingField { kind: String, field: &'static str },
    #[error("invalid {kind} parameters: {reason}")]
    InvalidSpec { kind: String, reason: String },
    #[error("zf'/f has a pole at {0}: f vanishes there")]
    Pole(Complex64),
}

bitflags! {
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
    pub struct Flags: u8 {
        const DERIVATIVE_ZERO = 1;
        const FUNCTION_ZERO = 1 << 1;
        const BRANCH_CUT = 1 << 2;
        /// zero base raised to a negative power
        const SINGULAR_POWER = 1 << 3;
    }
}

impl Flags {
    pub fn names(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.contains(Flags::DERIVATIVE_ZERO) {
            out.push("derivative_zero");
        }
        if self.contains(Flags::FUNCTION_ZERO) {
            out.push("function_zero");
        }
        if self.contains(Flags::BRANCH_CUT) {
            out.push("branch_cut");
        }
        if self.contains(Flags::SINGULAR_POWER) {
            out.push("singular_power");
        }
        out
    }

    /// `;`-joined names, empty when no flag is set (CSV form).
    pub fn joined(&self) -> String {
        self.names().join(";")
    }
}

impl Serialize for Flags {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.names().serialize(s)
    }
}

/// One evaluation of a scanned quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValue {
    pub value: f64,
    pub z: Complex64,
    pub flags: Flags,
}

impl PointValue {
    fn new(value: f64, z: Complex64, flags: Flags) -> Self {
        Self { value, z, flags }
    }
}

/// `base^exponent` for `base ≥ 0` with `0^0 = 1` and `0^(negative) = +∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Power {
    value: f64,
    flags: Flags,
}

fn power(base: f64, exponent: f64) -> Power {
    if exponent == 0.0 {
        return Power { value: 1.0, flags: Flags::empty() };
    }
    if base == 0.0 {
        return if exponent > 0.0 {
            Power { value: 0.0, flags: Flags::empty() }
        } else {
            Power { value: f64::INFINITY, flags: Flags::SINGULAR_POWER }
        };
    }
    let value = base.powf(exponent);
    let flags = if value.is_infinite() { Flags::SINGULAR_POWER } else { Flags::empty() };
    Power { value, flags }
}

/// Product of two powers where an infinite factor wins over a zero one.
fn product(a: Power, b: Power) -> (f64, Flags) {
    let flags = a.flags | b.flags;
    if a.value.is_infinite() || b.value.is_infinite() {
        (f64::INFINITY, flags)
    } else {
        (a.value * b.value, flags)
    }
}

/// `G(z) = z f'(z) / f(z)` together with `G'(z)`.
///
/// Uses the family's own `G` when it has one, else `G = f'/q`,
/// `G' = (f'' q - f' q') / q^2` with `q = f/z`. At the origin returns
/// `(1, f''(0)/2)`.
pub fn g_and_derivative(f: &AnalyticFunction, z: Complex64) -> Result<(Complex64, Complex64), CriterionError> {
    if z == Complex64::new(0.0, 0.0) {
        return Ok((Complex64::new(1.0, 0.0), f.series().coeff(2)));
    }
    if let Some(pair) = f.g_override(z) {
        return Ok(pair);
    }
    let j = f.jet(z);
    if (z * j.q).norm() < POLE_EPS {
        return Err(CriterionError::Pole(z));
    }
    let g = j.fp / j.q;
    let gp = (j.fpp * j.q - j.fp * j.qp) / (j.q * j.q);
    Ok((g, gp))
}

#[allow(non_snake_case)]
pub fn G(f: &AnalyticFunction, z: Complex64) -> Result<Complex64, CriterionError> {
    g_and_derivative(f, z).map(|(g, _)| g)
}

#[allow(non_snake_case)]
pub fn G_prime(f: &AnalyticFunction, z: Complex64) -> Result<Complex64, CriterionError> {
    g_and_derivative(f, z).map(|(_, gp)| gp)
}

/// `|f'(z) - 1|^β · |δ + z f''(z)/f'(z)|^γ`
pub fn t1_value(f: &AnalyticFunction, z: Complex64, beta: f64, gamma: f64, delta: f64) -> PointValue {
    let j = f.jet(z);
    let first = power((j.fp - 1.0).norm(), beta);
    if j.fp.norm() < POLE_EPS {
        if gamma > 0.0 {
            return PointValue::new(f64::INFINITY, z, first.flags | Flags::DERIVATIVE_ZERO);
        }
        return PointValue::new(first.value, z, first.flags | Flags::DERIVATIVE_ZERO);
    }
    let second = power((z * j.fpp / j.fp + delta).norm(), gamma);
    let (v, flags) = product(first, second);
    PointValue::new(v, z, flags)
}

pub fn t1_bound(gamma: f64, delta: f64) -> Result<f64, CriterionError> {
    if delta <= -0.5 {
        return Err(invalid("T1", format!("delta = {delta} must exceed -1/2")));
    }
    Ok(((1.0 + 2.0 * delta) / 2.0).powf(gamma))
}

/// Sign of the `G ∓ 1` term in the starlikeness functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Minus,
    Plus,
}

/// `|G(z) ∓ 1|^β · |z G'(z)|^γ`
pub fn t2_value(f: &AnalyticFunction, z: Complex64, beta: f64, gamma: f64, sign: Sign) -> PointValue {
    match g_and_derivative(f, z) {
        Ok((g, gp)) => {
            let shifted = match sign {
                Sign::Minus => g - 1.0,
                Sign::Plus => g + 1.0,
            };
            let (v, flags) = product(power(shifted.norm(), beta), power((z * gp).norm(), gamma));
            PointValue::new(v, z, flags)
        }
        Err(_) => PointValue::new(f64::INFINITY, z, Flags::FUNCTION_ZERO),
    }
}

/// Analytic expression whose modulus a functional raises to a power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Factor {
    /// `f' - 1`
    DerivativeDeviation,
    /// `δ + z f''/f'`
    Curvature { delta: f64 },
    /// `G ∓ 1`
    Shifted(Sign),
    /// `z G'`
    ZGPrime,
    /// `G`
    G,
}

impl Factor {
    /// `None` where the expression is undefined.
    pub fn eval(&self, f: &AnalyticFunction, z: Complex64) -> Option<Complex64> {
        match *self {
            Factor::DerivativeDeviation => Some(f.eval_fp(z) - 1.0),
            Factor::Curvature { delta } => {
                let j = f.jet(z);
                (j.fp.norm() >= POLE_EPS).then(|| delta + z * j.fpp / j.fp)
            }
            Factor::Shifted(Sign::Minus) => G(f, z).ok().map(|g| g - 1.0),
            Factor::Shifted(Sign::Plus) => G(f, z).ok().map(|g| g + 1.0),
            Factor::ZGPrime => G_prime(f, z).ok().map(|gp| z * gp),
            Factor::G => G(f, z).ok(),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::DerivativeDeviation => write!(f, "f' - 1"),
            Factor::Curvature { delta } => write!(f, "{delta} + z f''/f'"),
            Factor::Shifted(Sign::Minus) => write!(f, "G - 1"),
            Factor::Shifted(Sign::Plus) => write!(f, "G + 1"),
            Factor::ZGPrime => write!(f, "z G'"),
            Factor::G => write!(f, "G"),
        }
    }
}

pub fn t2_bound(gamma: f64) -> f64 {
    0.5f64.powf(gamma)
}

pub fn t3_bound(alpha: f64, beta: f64, gamma: f64) -> Result<f64, CriterionError> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(invalid("T3", format!("alpha = {alpha} outside [0, 1)")));
    }
    Ok(0.5f64.powf(gamma) * (1.0 - alpha).powf(beta + gamma))
}

/// `|G(z)|^α · |z G'(z)|^β`
pub fn t4_value(f: &AnalyticFunction, z: Complex64, alpha: f64, beta: f64) -> PointValue {
    match g_and_derivative(f, z) {
        Ok((g, gp)) => {
            let (v, flags) = product(power(g.norm(), alpha), power((z * gp).norm(), beta));
            PointValue::new(v, z, flags)
        }
        Err(_) => PointValue::new(f64::INFINITY, z, Flags::FUNCTION_ZERO),
    }
}

pub fn t4_mu(alpha: f64, beta: f64) -> f64 {
    beta / (alpha + beta)
}

pub fn t4_bound(alpha: f64, beta: f64) -> Result<f64, CriterionError> {
    if alpha < 0.0 || beta <= 0.0 {
        return Err(invalid("T4", format!("need alpha >= 0 and beta > 0, got alpha = {alpha}, beta = {beta}")));
    }
    Ok((t4_mu(alpha, beta) / 2.0).powf(beta))
}

/// The classes whose membership the theorems conclude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ClassId {
    /// `|f' - 1| < 1 - α`
    #[serde(rename = "memb_C")]
    C { alpha: f64 },
    /// `Re zf'/f > α`
    #[serde(rename = "memb_Sstar")]
    Sstar { alpha: f64 },
    /// `Re (zf'/f)^(1/μ) > 0`
    #[serde(rename = "memb_STS")]
    Sts { mu: f64 },
}

impl ClassId {
    pub fn validate(&self) -> Result<(), CriterionError> {
        match *self {
            ClassId::C { alpha } | ClassId::Sstar { alpha } if !(0.0..1.0).contains(&alpha) => {
                Err(invalid(self.kind(), format!("alpha = {alpha} outside [0, 1)")))
            }
            ClassId::Sts { mu } if !(mu > 0.0 && mu <= 1.0) => {
                Err(invalid(self.kind(), format!("mu = {mu} outside (0, 1]")))
            }
            _ => Ok(()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ClassId::C { .. } => "memb_C",
            ClassId::Sstar { .. } => "memb_Sstar",
            ClassId::Sts { .. } => "memb_STS",
        }
    }

    pub fn uses_g(&self) -> bool {
        !matches!(self, ClassId::C { .. })
    }

    pub fn to_spec(&self) -> CriterionSpec {
        let mut spec = CriterionSpec::new(self.kind());
        match *self {
            ClassId::C { alpha } | ClassId::Sstar { alpha } => spec.alpha = Some(alpha),
            ClassId::Sts { mu } => spec.mu = Some(mu),
        }
        spec
    }

    pub fn from_spec(spec: &CriterionSpec) -> Result<Self, CriterionError> {
        let class = match spec.kind.as_str() {
            "memb_C" => ClassId::C { alpha: spec.alpha.unwrap_or(0.0) },
            "memb_Sstar" => ClassId::Sstar { alpha: spec.alpha.unwrap_or(0.0) },
            "memb_STS" => ClassId::Sts { mu: spec.require("mu", spec.mu)? },
            other => return Err(CriterionError::UnknownKind(other.to_string())),
        };
        class.validate()?;
        Ok(class)
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassId::C { alpha } => write!(f, "C({alpha})"),
            ClassId::Sstar { alpha } => write!(f, "S*({alpha})"),
            ClassId::Sts { mu } => write!(f, "STS({mu})"),
        }
    }
}

/// Signed membership margin at `z`; the class holds on a region iff the
/// infimum of the margin there is positive.
pub fn membership_value(f: &AnalyticFunction, z: Complex64, class: ClassId) -> PointValue {
    match class {
        ClassId::C { alpha } => {
            let fp = f.eval_fp(z);
            PointValue::new((1.0 - alpha) - (fp - 1.0).norm(), z, Flags::empty())
        }
        ClassId::Sstar { alpha } => match G(f, z) {
            Ok(g) => PointValue::new(g.re - alpha, z, Flags::empty()),
            Err(_) => PointValue::new(f64::NEG_INFINITY, z, Flags::FUNCTION_ZERO),
        },
        ClassId::Sts { mu } => match G(f, z) {
            Ok(g) => {
                if g.im == 0.0 && g.re <= 0.0 {
                    return PointValue::new(f64::NEG_INFINITY, z, Flags::BRANCH_CUT);
                }
                PointValue::new(principal_power_re(g, 1.0 / mu), z, Flags::empty())
            }
            Err(_) => PointValue::new(f64::NEG_INFINITY, z, Flags::FUNCTION_ZERO),
        },
    }
}

/// `Re(ζ^s)` on the principal branch, `arg ζ ∈ (-π, π]`.
pub fn principal_power_re(zeta: Complex64, s: f64) -> f64 {
    zeta.norm().powf(s) * (zeta.arg() * s).cos()
}

/// Criterion document: `kind` plus the parameters that kind uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

impl CriterionSpec {
    pub fn new(kind: &str) -> Self {
        Self { kind: kind.to_string(), alpha: None, beta: None, gamma: None, delta: None, lambda: None, mu: None }
    }

    pub fn t1(beta: f64, gamma: f64, delta: f64) -> Self {
        Self { beta: Some(beta), gamma: Some(gamma), delta: Some(delta), ..Self::new("T1") }
    }

    pub fn c1(lambda: f64) -> Self {
        Self { lambda: Some(lambda), ..Self::new("C1") }
    }

    pub fn c2(beta: f64, gamma: f64) -> Self {
        Self { beta: Some(beta), gamma: Some(gamma), ..Self::new("C2") }
    }

    pub fn t2(sign: Sign, beta: f64, gamma: f64) -> Self {
        let kind = match sign {
            Sign::Minus => "T2_minus",
            Sign::Plus => "T2_plus",
        };
        Self { beta: Some(beta), gamma: Some(gamma), ..Self::new(kind) }
    }

    pub fn t3(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha: Some(alpha), beta: Some(beta), gamma: Some(gamma), ..Self::new("T3") }
    }

    pub fn t4(alpha: f64, beta: f64) -> Self {
        Self { alpha: Some(alpha), beta: Some(beta), ..Self::new("T4") }
    }

    fn require(&self, field: &'static str, v: Option<f64>) -> Result<f64, CriterionError> {
        let v = v.ok_or_else(|| CriterionError::MissingField { kind: self.kind.clone(), field })?;
        if !v.is_finite() {
            return Err(invalid(&self.kind, format!("{field} must be finite")));
        }
        Ok(v)
    }
}

fn invalid(kind: &str, reason: String) -> CriterionError {
    CriterionError::InvalidSpec { kind: kind.to_string(), reason }
}

/// A hypothesis functional paired with its bound and the class it implies.
pub trait Criterion: Send + Sync + fmt::Debug {
    /// The (normalized) document this criterion was built from.
    fn spec(&self) -> CriterionSpec;

    fn value(&self, f: &AnalyticFunction, z: Complex64) -> PointValue;

    fn bound(&self) -> f64;

    fn conclusion(&self) -> ClassId;

    /// Whether the functional goes through `zf'/f` (and so needs `f ≠ 0`
    /// away from the origin).
    fn uses_g(&self) -> bool;

    /// The two exponents of the functional, in display order.
    fn exponents(&self) -> (f64, f64);

    /// The expressions the two exponents apply to, in the same order.
    fn factors(&self) -> [Factor; 2];

    fn has_negative_exponent(&self) -> bool {
        let (a, b) = self.exponents();
        a < 0.0 || b < 0.0
    }

    /// True when the functional has a pole wherever `f'` vanishes.
    fn pole_at_critical_points(&self) -> bool {
        false
    }

    /// Parameters admitted by the theorem but outside its usual reading.
    fn extended_range(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy)]
struct Theorem1 {
    beta: f64,
    gamma: f64,
    delta: f64,
}

impl Criterion for Theorem1 {
    fn spec(&self) -> CriterionSpec {
        CriterionSpec::t1(self.beta, self.gamma, self.delta)
    }
    fn value(&self, f: &AnalyticFunction, z: Complex64) -> PointValue {
        t1_value(f, z, self.beta, self.gamma, self.delta)
    }
    fn bound(&self) -> f64 {
        t1_bound(self.gamma, self.delta).expect("validated on construction")
    }
    fn conclusion(&self) -> ClassId {
        ClassId::C { alpha: 0.0 }
    }
    fn uses_g(&self) -> bool {
        false
    }
    fn exponents(&self) -> (f64, f64) {
        (self.beta, self.gamma)
    }
    fn factors(&self) -> [Factor; 2] {
        [Factor::DerivativeDeviation, Factor::Curvature { delta: self.delta }]
    }
    fn pole_at_critical_points(&self) -> bool {
        self.gamma > 0.0
    }
}

/// `|f'-1|^(1-λ) · |1 + zf''/f'|^λ < (3/2)^λ`, evaluated on its own terms.
#[derive(Debug, Clone, Copy)]
struct Corollary1 {
    lambda: f64,
}

impl Criterion for Corollary1 {
    fn spec(&self) -> CriterionSpec {
        CriterionSpec::c1(self.lambda)
    }
    fn value(&self, f: &AnalyticFunction, z: Complex64) -> PointValue {
        let j = f.jet(z);
        let first = power((j.fp - 1.0).norm(), 1.0 - self.lambda);
        if j.fp.norm() < POLE_EPS {
            let v = if self.lambda > 0.0 { f64::INFINITY } else { first.value };
            return PointValue::new(v, z, first.flags | Flags::DERIVATIVE_ZERO);
        }
        let second = power((1.0 + z * j.fpp / j.fp).norm(), self.lambda);
        let (v, flags) = product(first, second);
        PointValue::new(v, z, flags)
    }
    fn bound(&self) -> f64 {
        1.5f64.powf(self.lambda)
    }
    fn conclusion(&self) -> ClassId {
        ClassId::C { alpha: 0.0 }
    }
    fn uses_g(&self) -> bool {
        false
    }
    fn exponents(&self) -> (f64, f64) {
        (1.0 - self.lambda, self.lambda)
    }
    fn factors(&self) -> [Factor; 2] {
        [Factor::DerivativeDeviation, Factor::Curvature { delta: 1.0 }]
    }
    fn pole_at_critical_points(&self) -> bool {
        self.lambda > 0.0
    }
}

/// `|f'-1|^β · |zf''/f'|^γ < (1/2)^γ`, evaluated on its own terms.
#[derive(Debug, Clone, Copy)]
struct Corollary2 {
    beta: f64,
    gamma: f64,
}

impl Criterion for Corollary2 {
    fn spec(&self) -> CriterionSpec {
        CriterionSpec::c2(self.beta, self.gamma)
    }
    fn value(&self, f: &AnalyticFunction, z: Complex64) -> PointValue {
        let j = f.jet(z);
        let first = power((j.fp - 1.0).norm(), self.beta);
        if j.fp.norm() < POLE_EPS {
            let v = if self.gamma > 0.0 { f64::INFINITY } else { first.value };
            return PointValue::new(v, z, first.flags | Flags::DERIVATIVE_ZERO);
        }
        let second = power((z * j.fpp / j.fp).norm(), self.gamma);
        let (v, flags) = product(first, second);
        PointValue::new(v, z, flags)
    }
    fn bound(&self) -> f64 {
        0.5f64.powf(self.gamma)
    }
    fn conclusion(&self) -> ClassId {
        ClassId::C { alpha: 0.0 }
    }
    fn uses_g(&self) -> bool {
        false
    }
    fn exponents(&self) -> (f64, f64) {
        (self.beta, self.gamma)
    }
    fn factors(&self) -> [Factor; 2] {
        [Factor::DerivativeDeviation, Factor::Curvature { delta: 0.0 }]
    }
    fn pole_at_critical_points(&self) -> bool {
        self.gamma > 0.0
    }
}

#[derive(Debug, Clone, Copy)]
struct Theorem2 {
    sign: Sign,
    beta: f64,
    gamma: f64,
}

impl Criterion for Theorem2 {
    fn spec(&self) -> CriterionSpec {
        CriterionSpec::t2(self.sign, self.beta, self.gamma)
    }
    fn value(&self, f: &AnalyticFunction, z: Complex64) -> PointValue {
        t2_value(f, z, self.beta, self.gamma, self.sign)
    }
    fn bound(&self) -> f64 {
        t2_bound(self.gamma)
    }
    fn conclusion(&self) -> ClassId {
        ClassId::Sstar { alpha: 0.0 }
    }
    fn uses_g(&self) -> bool {
        true
    }
    fn exponents(&self) -> (f64, f64) {
        (self.beta, self.gamma)
    }
    fn factors(&self) -> [Factor; 2] {
        [Factor::Shifted(self.sign), Factor::ZGPrime]
    }
    fn extended_range(&self) -> bool {
        self.gamma < 0.0
    }
}

#[derive(Debug, Clone, Copy)]
struct Theorem3 {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl Criterion for Theorem3 {
    fn spec(&self) -> CriterionSpec {
        CriterionSpec::t3(self.alpha, self.beta, self.gamma)
    }
    fn value(&self, f: &AnalyticFunction, z: Complex64) -> PointValue {
        t2_value(f, z, self.beta, self.gamma, Sign::Minus)
    }
    fn bound(&self) -> f64 {
        t3_bound(self.alpha, self.beta, self.gamma).expect("validated on construction")
    }
    fn conclusion(&self) -> ClassId {
        ClassId::Sstar { alpha: self.alpha }
    }
    fn uses_g(&self) -> bool {
        true
    }
    fn exponents(&self) -> (f64, f64) {
        (self.beta, self.gamma)
    }
    fn factors(&self) -> [Factor; 2] {
        [Factor::Shifted(Sign::Minus), Factor::ZGPrime]
    }
    fn extended_range(&self) -> bool {
        self.gamma < 0.0
    }
}

#[derive(Debug, Clone, Copy)]
struct Theorem4 {
    alpha: f64,
    beta: f64,
}

impl Criterion for Theorem4 {
    fn spec(&self) -> CriterionSpec {
        CriterionSpec { mu: Some(t4_mu(self.alpha, self.beta)), ..CriterionSpec::t4(self.alpha, self.beta) }
    }
    fn value(&self, f: &AnalyticFunction, z: Complex64) -> PointValue {
        t4_value(f, z, self.alpha, self.beta)
    }
    fn bound(&self) -> f64 {
        t4_bound(self.alpha, self.beta).expect("validated on construction")
    }
    fn conclusion(&self) -> ClassId {
        ClassId::Sts { mu: t4_mu(self.alpha, self.beta) }
    }
    fn uses_g(&self) -> bool {
        true
    }
    fn exponents(&self) -> (f64, f64) {
        (self.alpha, self.beta)
    }
    fn factors(&self) -> [Factor; 2] {
        [Factor::G, Factor::ZGPrime]
    }
}

type Builder = fn(&CriterionSpec) -> Result<Box<dyn Criterion>, CriterionError>;

fn build_t1(s: &CriterionSpec) -> Result<Box<dyn Criterion>, CriterionError> {
    let beta = s.require("beta", s.beta)?;
    let gamma = s.require("gamma", s.gamma)?;
    let delta = s.require("delta", s.delta)?;
    if gamma < 0.0 {
        return Err(invalid("T1", format!("gamma = {gamma} must be >= 0")));
    }
    t1_bound(gamma, delta)?;
    Ok(Box::new(Theorem1 { beta, gamma, delta }))
}

fn build_c1(s: &CriterionSpec) -> Result<Box<dyn Criterion>, CriterionError> {
    let lambda = s.require("lambda", s.lambda)?;
    if lambda < 0.0 {
        return Err(invalid("C1", format!("lambda = {lambda} must be >= 0")));
    }
    Ok(Box::new(Corollary1 { lambda }))
}

fn build_c2(s: &CriterionSpec) -> Result<Box<dyn Criterion>, CriterionError> {
    let beta = s.require("beta", s.beta)?;
    let gamma = s.require("gamma", s.gamma)?;
    if gamma < 0.0 {
        return Err(invalid("C2", format!("gamma = {gamma} must be >= 0")));
    }
    Ok(Box::new(Corollary2 { beta, gamma }))
}

fn t2_params(s: &CriterionSpec) -> Result<(f64, f64), CriterionError> {
    let beta = s.require("beta", s.beta)?;
    let gamma = s.require("gamma", s.gamma)?;
    if beta + 2.0 * gamma < 0.0 {
        return Err(invalid(&s.kind, format!("beta + 2 gamma = {} must be >= 0", beta + 2.0 * gamma)));
    }
    Ok((beta, gamma))
}

fn build_t2_minus(s: &CriterionSpec) -> Result<Box<dyn Criterion>, CriterionError> {
    let (beta, gamma) = t2_params(s)?;
    Ok(Box::new(Theorem2 { sign: Sign::Minus, beta, gamma }))
}

fn build_t2_plus(s: &CriterionSpec) -> Result<Box<dyn Criterion>, CriterionError> {
    let (beta, gamma) = t2_params(s)?;
    Ok(Box::new(Theorem2 { sign: Sign::Plus, beta, gamma }))
}

fn build_t3(s: &CriterionSpec) -> Result<Box<dyn Criterion>, CriterionError> {
    let (beta, gamma) = t2_params(s)?;
    let alpha = s.require("alpha", s.alpha)?;
    t3_bound(alpha, beta, gamma)?;
    Ok(Box::new(Theorem3 { alpha, beta, gamma }))
}

fn build_t4(s: &CriterionSpec) -> Result<Box<dyn Criterion>, CriterionError> {
    let alpha = s.require("alpha", s.alpha)?;
    let beta = s.require("beta", s.beta)?;
    t4_bound(alpha, beta)?;
    if let Some(mu) = s.mu {
        if (mu - t4_mu(alpha, beta)).abs() > 1e-12 {
            return Err(invalid("T4", format!("mu = {mu} disagrees with beta/(alpha+beta)")));
        }
    }
    Ok(Box::new(Theorem4 { alpha, beta }))
}

/// Name → constructor table for hypothesis criteria.
#[derive(Clone)]
pub struct CriterionRegistry {
    builders: BTreeMap<String, Builder>,
}

impl fmt::Debug for CriterionRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.builders.keys()).finish()
    }
}

impl Default for CriterionRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

impl CriterionRegistry {
    pub fn empty() -> Self {
        Self { builders: BTreeMap::new() }
    }

    /// Every criterion kind this crate knows.
    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register("T1", build_t1);
        r.register("C1", build_c1);
        r.register("C2", build_c2);
        r.register("T2_minus", build_t2_minus);
        r.register("T2_plus", build_t2_plus);
        r.register("T3", build_t3);
        r.register("T4", build_t4);
        r
    }

    pub fn register(&mut self, kind: &str, builder: Builder) {
        self.builders.insert(kind.to_string(), builder);
    }

    pub fn kinds(&self) -> impl Iterator<Item = &str> {
        self.builders.keys().map(String::as_str)
    }

    pub fn build(&self, spec: &CriterionSpec) -> Result<Box<dyn Criterion>, CriterionError> {
        let builder = self
            .builders
            .get(&spec.kind)
            .ok_or_else(|| CriterionError::UnknownKind(spec.kind.clone()))?;
        builder(spec)
    }
}

/// Builds a criterion through the standard registry.
pub fn criterion(spec: &CriterionSpec) -> Result<Box<dyn Criterion>, CriterionError> {
    CriterionRegistry::standard().build(spec)
}

/// Anything that can be scanned over the disk or dumped on a grid.
#[derive(Debug)]
pub enum Quantity {
    Criterion(Box<dyn Criterion>),
    Membership(ClassId),
    AbsG,
    ReG,
}

impl Quantity {
    /// Resolves a criterion document, a membership document, or the
    /// `absG` / `reG` selectors. Lower-case criterion names (`t2_minus`) are
    /// accepted.
    pub fn from_spec(spec: &CriterionSpec) -> Result<Self, CriterionError> {
        match spec.kind.as_str() {
            "absG" => return Ok(Quantity::AbsG),
            "reG" => return Ok(Quantity::ReG),
            k if k.starts_with("memb_") => return ClassId::from_spec(spec).map(Quantity::Membership),
            _ => {}
        }
        let registry = CriterionRegistry::standard();
        let mut normalized = spec.clone();
        if let Some(kind) = registry.kinds().find(|k| k.eq_ignore_ascii_case(&spec.kind)) {
            normalized.kind = kind.to_string();
        }
        registry.build(&normalized).map(Quantity::Criterion)
    }

    pub fn eval(&self, f: &AnalyticFunction, z: Complex64) -> PointValue {
        match self {
            Quantity::Criterion(c) => c.value(f, z),
            Quantity::Membership(class) => membership_value(f, z, *class),
            Quantity::AbsG => match G(f, z) {
                Ok(g) => PointValue::new(g.norm(), z, Flags::empty()),
                Err(_) => PointValue::new(f64::INFINITY, z, Flags::FUNCTION_ZERO),
            },
            Quantity::ReG => match G(f, z) {
                Ok(g) => PointValue::new(g.re, z, Flags::empty()),
                Err(_) => PointValue::new(f64::NAN, z, Flags::FUNCTION_ZERO),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{synthesize_from_schwarz_c, synthesize_from_schwarz_sstar, FunctionSpec, SchwarzFunction};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn func(spec: FunctionSpec) -> AnalyticFunction {
        AnalyticFunction::from_spec(&spec).unwrap()
    }

    #[test]
    fn g_examples() {
        let koebe = func(FunctionSpec::Koebe);
        assert!((G(&koebe, c(0.5, 0.0)).unwrap() - c(3.0, 0.0)).norm() < 1e-14);
        for spec in [FunctionSpec::Koebe, FunctionSpec::quad(0.3), FunctionSpec::poly(&[0.0, 1.0, 0.2, 0.1])] {
            assert_eq!(G(&func(spec), c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        }
        let e = func(FunctionSpec::exp_scaled(0.5));
        assert!((G(&e, c(0.0, 0.8)).unwrap() - c(1.0, 0.4)).norm() < 1e-15);
    }

    #[test]
    fn g_pole_is_reported() {
        let p = func(FunctionSpec::poly(&[0.0, 1.0, -2.0]));
        assert!(matches!(G(&p, c(0.5, 0.0)), Err(CriterionError::Pole(_))));
        let v = t2_value(&p, c(0.5, 0.0), 1.0, 1.0, Sign::Minus);
        assert!(v.value.is_infinite() && v.flags.contains(Flags::FUNCTION_ZERO));
    }

    #[test]
    fn g_prime_examples() {
        let koebe = func(FunctionSpec::Koebe);
        assert!((G_prime(&koebe, c(0.5, 0.0)).unwrap() - c(8.0, 0.0)).norm() < 1e-13);
        let id = func(FunctionSpec::Identity);
        assert_eq!(G_prime(&id, c(0.3, 0.4)).unwrap(), c(0.0, 0.0));
        let e = func(FunctionSpec::exp_scaled(0.5));
        for z in [c(0.0, 0.0), c(0.6, 0.0), c(-0.2, 0.7)] {
            assert!((G_prime(&e, z).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        }
        // origin: series linear coefficient f''(0)/2
        let q = func(FunctionSpec::quad(0.3));
        assert!((G_prime(&q, c(0.0, 0.0)).unwrap() - c(0.3, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pointwise_g_matches_series_route() {
        // G as the series f'/(f/z), differentiated termwise
        for spec in [FunctionSpec::quad(0.25), FunctionSpec::poly(&[0.0, 1.0, 0.1, -0.05, 0.02])] {
            let f = func(spec);
            let s = f.series();
            let g = s.derivative().div(&s.shift_down()).unwrap();
            let gp = g.derivative();
            for z in [c(0.1, 0.2), c(-0.3, 0.1), c(0.0, -0.4)] {
                let (pg, pgp) = g_and_derivative(&f, z).unwrap();
                assert!((pg - g.eval(z)).norm() < 1e-12);
                assert!((pgp - gp.eval(z)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn t1_examples() {
        let q = func(FunctionSpec::quad(0.25));
        let v = t1_value(&q, c(0.5, 0.0), 1.0, 1.0, 1.0);
        assert!((v.value - 0.3).abs() < 1e-15, "{}", v.value);
        let id = func(FunctionSpec::Identity);
        assert_eq!(t1_value(&id, c(0.4, 0.3), 0.7, 1.0, 1.0).value, 0.0);
        assert_eq!(t1_value(&id, c(0.4, 0.3), 0.0, 1.0, 0.0).value, 0.0);
    }

    #[test]
    fn t1_power_conventions() {
        let id = func(FunctionSpec::Identity);
        // 0^0 = 1 on both factors
        let v = t1_value(&id, c(0.5, 0.0), 0.0, 0.0, 0.0);
        assert_eq!((v.value, v.flags), (1.0, Flags::empty()));
        let v = t1_value(&id, c(0.5, 0.0), -1.0, 1.0, 1.0);
        assert!(v.value.is_infinite() && v.flags.contains(Flags::SINGULAR_POWER));
        // f' = 1 + 2cz vanishes at z = -1/(2c)
        let q = func(FunctionSpec::quad(1.0));
        let v = t1_value(&q, c(-0.5, 0.0), 1.0, 1.0, 1.0);
        assert!(v.value.is_infinite() && v.flags.contains(Flags::DERIVATIVE_ZERO));
        let v = t1_value(&q, c(-0.5, 0.0), 2.0, 0.0, 1.0);
        assert_eq!(v.value, 1.0);
    }

    #[test]
    fn t1_bound_examples() {
        assert_eq!(t1_bound(1.0, 1.0).unwrap(), 1.5);
        assert_eq!(t1_bound(2.0, 0.0).unwrap(), 0.25);
        assert_eq!(t1_bound(0.0, 3.7).unwrap(), 1.0);
        assert!(t1_bound(1.0, -0.5).is_err());
    }

    #[test]
    fn t2_examples() {
        let k = func(FunctionSpec::Koebe);
        assert!((t2_value(&k, c(0.5, 0.0), 1.0, 1.0, Sign::Minus).value - 8.0).abs() < 1e-12);
        let id = func(FunctionSpec::Identity);
        assert_eq!(t2_value(&id, c(0.3, 0.1), 1.0, 0.0, Sign::Minus).value, 0.0);
        assert_eq!(t2_value(&id, c(0.3, 0.1), 0.0, 1.0, Sign::Minus).value, 0.0);
        let e = func(FunctionSpec::exp_scaled(0.5));
        assert!((t2_value(&e, c(0.6, 0.0), 0.0, 1.0, Sign::Minus).value - 0.3).abs() < 1e-15);
        // plus form: |G + 1| for koebe at 0.5 is 4
        assert!((t2_value(&k, c(0.5, 0.0), 1.0, 0.0, Sign::Plus).value - 4.0).abs() < 1e-13);
    }

    #[test]
    fn bound_examples() {
        assert_eq!(t2_bound(1.0), 0.5);
        assert_eq!(t2_bound(0.0), 1.0);
        assert_eq!(t2_bound(3.0), 0.125);
        assert_eq!(t3_bound(0.0, 1.7, 2.0).unwrap(), t2_bound(2.0));
        assert_eq!(t3_bound(0.5, 1.0, 1.0).unwrap(), 0.125);
        assert_eq!(t3_bound(0.5, 2.0, 0.0).unwrap(), 0.25);
        assert!(t3_bound(1.0, 1.0, 1.0).is_err());
        assert_eq!(t4_bound(0.0, 1.0).unwrap(), 0.5);
        assert_eq!(t4_bound(1.0, 1.0).unwrap(), 0.25);
        assert_eq!(t4_bound(3.0, 1.0).unwrap(), 0.125);
        assert!(t4_bound(1.0, 0.0).is_err());
        assert!(t4_bound(-0.1, 1.0).is_err());
    }

    #[test]
    fn t4_examples() {
        let e = func(FunctionSpec::exp_scaled(0.5));
        assert!((t4_value(&e, c(0.8, 0.0), 1.0, 1.0).value - 0.56).abs() < 1e-15);
        let id = func(FunctionSpec::Identity);
        assert_eq!(t4_value(&id, c(0.2, 0.5), 1.0, 1.0).value, 0.0);
        let k = func(FunctionSpec::Koebe);
        assert!((t4_value(&k, c(0.5, 0.0), 1.0, 1.0).value - 12.0).abs() < 1e-12);
    }

    #[test]
    fn membership_examples() {
        let k = func(FunctionSpec::Koebe);
        let m = membership_value(&k, c(-0.9, 0.0), ClassId::Sstar { alpha: 0.0 });
        assert!((m.value - 0.1 / 1.9).abs() < 1e-15);

        let id = func(FunctionSpec::Identity);
        let z = c(0.3, -0.6);
        assert_eq!(membership_value(&id, z, ClassId::C { alpha: 0.2 }).value, 0.8);
        assert_eq!(membership_value(&id, z, ClassId::Sstar { alpha: 0.2 }).value, 0.8);
        assert_eq!(membership_value(&id, z, ClassId::Sts { mu: 0.7 }).value, 1.0);

        // oracle: |G|^{1/μ} cos(arg G / μ) with G = 1 + 0.4i, evaluated directly
        let e = func(FunctionSpec::exp_scaled(0.5));
        let m = membership_value(&e, c(0.0, 0.8), ClassId::Sts { mu: 0.3 });
        let want = 1.16f64.sqrt().powf(1.0 / 0.3) * (0.4f64.atan() / 0.3).cos();
        assert!((m.value - want).abs() < 1e-14);
        assert!((m.value - 0.3816).abs() < 1e-3, "{}", m.value);
    }

    #[test]
    fn sts_branch_cut_is_flagged() {
        // G = 1 + az lands on -0.5 at z = -1.5/a with a = 2
        let e = func(FunctionSpec::exp_scaled(2.0));
        let m = membership_value(&e, c(-0.75, 0.0), ClassId::Sts { mu: 0.5 });
        assert!(m.flags.contains(Flags::BRANCH_CUT));
        assert!(m.value < 0.0);
    }

    #[test]
    fn registry_builds_every_kind() {
        let reg = CriterionRegistry::standard();
        assert_eq!(reg.kinds().count(), 7);
        for spec in [
            CriterionSpec::t1(1.0, 1.0, 1.0),
            CriterionSpec::c1(0.5),
            CriterionSpec::c2(1.0, 1.0),
            CriterionSpec::t2(Sign::Minus, -1.0, 1.0),
            CriterionSpec::t2(Sign::Plus, 1.0, 1.0),
            CriterionSpec::t3(0.5, 1.0, 1.0),
        ] {
            let built = reg.build(&spec).unwrap();
            assert_eq!(built.spec(), spec);
        }
        let t4 = reg.build(&CriterionSpec::t4(1.0, 1.0)).unwrap();
        assert_eq!(t4.conclusion(), ClassId::Sts { mu: 0.5 });
        assert_eq!(t4.spec().mu, Some(0.5));
    }

    #[test]
    fn registry_rejects_invalid_specs() {
        let reg = CriterionRegistry::standard();
        assert!(matches!(reg.build(&CriterionSpec::new("T9")), Err(CriterionError::UnknownKind(_))));
        assert!(matches!(reg.build(&CriterionSpec::new("T1")), Err(CriterionError::MissingField { .. })));
        assert!(reg.build(&CriterionSpec::t1(1.0, 1.0, -0.5)).is_err());
        assert!(reg.build(&CriterionSpec::t1(1.0, -1.0, 0.0)).is_err());
        assert!(reg.build(&CriterionSpec::c1(-0.1)).is_err());
        assert!(reg.build(&CriterionSpec::t2(Sign::Minus, -3.0, 1.0)).is_err());
        assert!(reg.build(&CriterionSpec::t3(1.0, 1.0, 1.0)).is_err());
        assert!(reg.build(&CriterionSpec::t4(1.0, 0.0)).is_err());
        let bad_mu = CriterionSpec { mu: Some(0.9), ..CriterionSpec::t4(1.0, 1.0) };
        assert!(reg.build(&bad_mu).is_err());
    }

    #[test]
    fn custom_criteria_can_be_registered() {
        fn build(_: &CriterionSpec) -> Result<Box<dyn Criterion>, CriterionError> {
            Ok(Box::new(Theorem2 { sign: Sign::Plus, beta: 2.0, gamma: 0.0 }))
        }
        let mut reg = CriterionRegistry::empty();
        reg.register("mine", build);
        assert_eq!(reg.build(&CriterionSpec::new("mine")).unwrap().exponents(), (2.0, 0.0));
    }

    #[test]
    fn criterion_documents_parse() {
        let s: CriterionSpec = serde_json::from_str(r#"{"kind":"T1","beta":1,"gamma":1,"delta":1}"#).unwrap();
        assert_eq!(s, CriterionSpec::t1(1.0, 1.0, 1.0));
        assert!(serde_json::from_str::<CriterionSpec>(r#"{"kind":"T1","betta":1}"#).is_err());
        let class = ClassId::from_spec(&serde_json::from_str(r#"{"kind":"memb_STS","mu":0.3}"#).unwrap()).unwrap();
        assert_eq!(class, ClassId::Sts { mu: 0.3 });
        assert!(ClassId::from_spec(&CriterionSpec::new("memb_STS")).is_err());
        assert!(ClassId::from_spec(&CriterionSpec { alpha: Some(1.0), ..CriterionSpec::new("memb_C") }).is_err());
    }

    #[test]
    fn quantity_selectors() {
        for kind in ["t1", "T2_minus", "t2_plus", "t3", "t4"] {
            let spec = CriterionSpec {
                alpha: Some(0.5),
                beta: Some(1.0),
                gamma: Some(1.0),
                delta: Some(1.0),
                ..CriterionSpec::new(kind)
            };
            assert!(matches!(Quantity::from_spec(&spec).unwrap(), Quantity::Criterion(_)), "{kind}");
        }
        assert!(matches!(Quantity::from_spec(&CriterionSpec::new("reG")).unwrap(), Quantity::ReG));
        assert!(matches!(Quantity::from_spec(&CriterionSpec::new("absG")).unwrap(), Quantity::AbsG));
        assert!(matches!(
            Quantity::from_spec(&CriterionSpec::new("memb_Sstar")).unwrap(),
            Quantity::Membership(ClassId::Sstar { alpha }) if alpha == 0.0
        ));
    }

    #[test]
    fn theorem1_proof_identity_on_synthesized_functions() {
        // zf''/f' = zw'/(1+w) for f = z + ∫w
        let w = SchwarzFunction::from_coeffs(&[[0.0, 0.0], [0.3, 0.1], [0.0, -0.2], [0.1, 0.0]], 64).unwrap();
        let f = synthesize_from_schwarz_c(&w).unwrap();
        for z in [c(0.2, 0.3), c(-0.7, 0.1), c(0.0, 0.9)] {
            let j = f.jet(z);
            let lhs = z * j.fpp / j.fp;
            let rhs = z * w.eval_prime(z) / (w.eval(z) + 1.0);
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn theorem2_proof_identity_on_synthesized_functions() {
        let w = SchwarzFunction::from_coeffs(&[[0.0, 0.0], [0.4, 0.0], [0.0, 0.2]], 64).unwrap();
        let f = synthesize_from_schwarz_sstar(&w, 0.0).unwrap();
        // pointwise G' through the series jet, against 2w'/(1-w)^2
        let s = f.series();
        let g = s.derivative().div(&s.shift_down()).unwrap().derivative();
        for z in [c(0.2, 0.3), c(-0.5, 0.1)] {
            let want = w.eval_prime(z) * 2.0 / ((1.0 - w.eval(z)) * (1.0 - w.eval(z)));
            assert!((G_prime(&f, z).unwrap() - want).norm() < 1e-10);
            assert!((g.eval(z) - want).norm() < 1e-10);
        }
    }
}

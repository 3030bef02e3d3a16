//! Theorem-level verdicts: hypothesis and conclusion checks, implication
//! reports, Jack's-lemma probes and corpus sweeps.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{
    count_zeros, winding_number, AnalyticFunction, CatalogError, FunctionSpec, SchwarzFunction,
    DEFAULT_WINDING_SAMPLES,
};
use crate::criteria::{
    membership_value, ClassId, Criterion, CriterionError, CriterionRegistry, CriterionSpec, Factor, Flags,
};
use crate::report::{ser_complex, ser_ext, ser_opt_ext};
use crate::scanner::{circle_extremum, disk_sup, normalize_angle, onset_radius, Mode, PolarGrid, ScanConfig, ScanError};

/// Verdict tolerance on margins.
pub const VERDICT_TOL: f64 = 1e-9;
/// Hypothesis margin above which a failed conclusion is a hard inconsistency.
pub const HARD_MARGIN: f64 = 1e-6;
/// Jack's-lemma contract tolerance.
pub const JACK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Criterion(#[from] CriterionError),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error("Jack probe is degenerate: |w(z0)| = {0:e}")]
    DegenerateProbe(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Fails,
    NotApplicable,
}

/// Result of checking one inequality over the scanned disk.
///
/// For hypotheses `value` is the scanned sup and `margin = bound - value`;
/// for conclusions `value` is the scanned inf of the membership margin and
/// `margin = value`, `bound = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub holds: bool,
    #[serde(serialize_with = "ser_ext")]
    pub value: f64,
    #[serde(serialize_with = "ser_ext")]
    pub bound: f64,
    #[serde(serialize_with = "ser_ext")]
    pub margin: f64,
    #[serde(serialize_with = "ser_complex")]
    pub witness: Complex64,
    #[serde(serialize_with = "ser_ext")]
    pub radius: f64,
    pub flags: Flags,
    pub monotone: bool,
    pub interior_grid: bool,
    /// Smallest radius where a failing conclusion starts to fail.
    #[serde(serialize_with = "ser_opt_ext", skip_serializing_if = "Option::is_none")]
    pub onset_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    fn not_applicable(bound: f64, note: String) -> Self {
        Self {
            outcome: Outcome::NotApplicable,
            holds: false,
            value: f64::NAN,
            bound,
            margin: f64::NAN,
            witness: Complex64::new(0.0, 0.0),
            radius: f64::NAN,
            flags: Flags::empty(),
            monotone: false,
            interior_grid: false,
            onset_radius: None,
            note: Some(note),
        }
    }

    pub fn is_applicable(&self) -> bool {
        self.outcome != Outcome::NotApplicable
    }
}

/// Checks that `f` has no zeros besides the origin inside the largest
/// ladder circle; returns the reason when it does.
fn zero_free_obstacle(f: &AnalyticFunction, cfg: &ScanConfig) -> Option<String> {
    if f.only_origin_zero() {
        return None;
    }
    match count_zeros(f, cfg.max_radius(), DEFAULT_WINDING_SAMPLES) {
        Ok(z) if z.extra_zeros == 0 => None,
        Ok(z) => Some(format!("f has {} zero(s) besides the origin in |z| < {}", z.extra_zeros, z.radius)),
        Err(e) => Some(e.to_string()),
    }
}

/// True when `f'` has a zero inside (or too near) the largest ladder circle.
fn has_critical_points(f: &AnalyticFunction, cfg: &ScanConfig) -> bool {
    match winding_number(|z| f.eval_fp(z), cfg.max_radius(), DEFAULT_WINDING_SAMPLES) {
        Ok(w) => w != 0,
        Err(_) => true,
    }
}

/// Inner contours used to split off the zero every factor may have at the
/// origin, smallest first.
const ORIGIN_RADII: [f64; 3] = [1e-4, 1e-3, 1e-2];

/// Zeros, away from the origin, of a factor carrying a negative exponent.
#[derive(Debug, Clone, Copy)]
struct Singularity {
    factor: Factor,
    exponent: f64,
    count: i64,
    z: Complex64,
}

fn singularity(f: &AnalyticFunction, criterion: &dyn Criterion, cfg: &ScanConfig) -> Option<Singularity> {
    let (a, b) = criterion.exponents();
    let rmax = cfg.max_radius();
    for (factor, exponent) in criterion.factors().into_iter().zip([a, b]) {
        if exponent >= 0.0 {
            continue;
        }
        let h = |z: Complex64| factor.eval(f, z).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        let Ok(outer) = winding_number(h, rmax, DEFAULT_WINDING_SAMPLES) else {
            continue;
        };
        let Some(inner) = ORIGIN_RADII
            .iter()
            .find_map(|&r| winding_number(h, r, DEFAULT_WINDING_SAMPLES).ok())
        else {
            continue;
        };
        if outer > inner {
            let z = locate_zero(&h, rmax, inner);
            return Some(Singularity { factor, exponent, count: outer - inner, z });
        }
    }
    None
}

/// Approximate zero of `h` in `0 < |z| < rmax`: best point of `|h|/|z|^m` on
/// the polar grid, polished by Newton steps.
fn locate_zero(h: &(dyn Fn(Complex64) -> Complex64 + Sync), rmax: f64, m: i64) -> Complex64 {
    let grid = PolarGrid::default();
    let mut best = (f64::INFINITY, Complex64::new(rmax, 0.0));
    for i in 1..=grid.radii {
        let r = rmax * i as f64 / grid.radii as f64;
        for j in 0..grid.angles {
            let z = Complex64::from_polar(r, 2.0 * std::f64::consts::PI * j as f64 / grid.angles as f64);
            let v = h(z).norm() / r.powi(m as i32);
            if v < best.0 {
                best = (v, z);
            }
        }
    }
    let mut z = best.1;
    let eps = 1e-7;
    for _ in 0..50 {
        let d = (h(z + eps) - h(z - eps)) / (2.0 * eps);
        let step = h(z) / d;
        let next = z - step;
        if !next.re.is_finite() || !next.im.is_finite() || next.norm() >= rmax || next.norm() <= ORIGIN_RADII[0] {
            break;
        }
        z = next;
        if step.norm() < 1e-15 {
            break;
        }
    }
    z
}

pub fn check_hypothesis(f: &AnalyticFunction, criterion: &dyn Criterion, cfg: &ScanConfig) -> Verdict {
    let bound = criterion.bound();
    if let Err(e) = cfg.validate() {
        return Verdict::not_applicable(bound, e.to_string());
    }
    if criterion.uses_g() {
        if let Some(reason) = zero_free_obstacle(f, cfg) {
            return Verdict::not_applicable(bound, reason);
        }
    }
    if let Some(s) = singularity(f, criterion, cfg) {
        return Verdict {
            outcome: Outcome::Fails,
            holds: false,
            value: f64::INFINITY,
            bound,
            margin: f64::NEG_INFINITY,
            witness: s.z,
            radius: s.z.norm(),
            flags: Flags::SINGULAR_POWER,
            monotone: false,
            interior_grid: true,
            onset_radius: None,
            note: Some(format!(
                "|{}|^{} is unbounded: {} zero(s) in 0 < |z| < {}",
                s.factor,
                s.exponent,
                s.count,
                cfg.max_radius()
            )),
        };
    }
    // boundary scanning relies on subharmonicity; otherwise sweep the interior
    let interior = criterion.has_negative_exponent()
        || (criterion.pole_at_critical_points() && has_critical_points(f, cfg));
    let cfg = if interior { cfg.with_interior_grid() } else { cfg.clone() };
    let q = |z| criterion.value(f, z);
    match disk_sup(&q, &cfg, Mode::Max) {
        Ok(sup) => {
            let margin = bound - sup.value;
            let holds = margin > VERDICT_TOL;
            Verdict {
                outcome: if holds { Outcome::Holds } else { Outcome::Fails },
                holds,
                value: sup.value,
                bound,
                margin,
                witness: sup.witness,
                radius: sup.radius,
                flags: sup.flags,
                monotone: sup.monotone,
                interior_grid: sup.used_interior_grid,
                onset_radius: None,
                note: None,
            }
        }
        Err(e) => Verdict::not_applicable(bound, e.to_string()),
    }
}

pub fn check_conclusion(f: &AnalyticFunction, class: ClassId, cfg: &ScanConfig) -> Verdict {
    if let Err(e) = class.validate() {
        return Verdict::not_applicable(0.0, e.to_string());
    }
    if let Err(e) = cfg.validate() {
        return Verdict::not_applicable(0.0, e.to_string());
    }
    if class.uses_g() {
        if let Some(reason) = zero_free_obstacle(f, cfg) {
            return Verdict::not_applicable(0.0, reason);
        }
    }
    let q = |z| membership_value(f, z, class);
    let inf = match disk_sup(&q, cfg, Mode::Min) {
        Ok(inf) => inf,
        Err(e) => return Verdict::not_applicable(0.0, e.to_string()),
    };
    let holds = inf.value > -VERDICT_TOL;
    let onset = if holds {
        None
    } else {
        // the margin is positive at the origin for every class
        let ok = |v: f64| v > -VERDICT_TOL;
        let first_bad = inf.per_radius.iter().position(|c| !ok(c.value));
        first_bad.and_then(|i| {
            let lo = if i == 0 { 0.0 } else { inf.per_radius[i - 1].radius };
            let lo = lo.max(1e-6);
            onset_radius(&q, lo, inf.per_radius[i].radius, cfg, Mode::Min, ok, 1e-7).ok()
        })
    };
    Verdict {
        outcome: if holds { Outcome::Holds } else { Outcome::Fails },
        holds,
        value: inf.value,
        bound: 0.0,
        margin: inf.value,
        witness: inf.witness,
        radius: inf.radius,
        flags: inf.flags,
        monotone: inf.monotone,
        interior_grid: inf.used_interior_grid,
        onset_radius: onset,
        note: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Consistency {
    Consistent,
    /// Hypothesis held only by a sub-`HARD_MARGIN` margin while the
    /// conclusion failed.
    Marginal,
    Inconsistent,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImplicationReport {
    pub function: FunctionSpec,
    pub criterion: CriterionSpec,
    /// Absent for conclusion-only records.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<Verdict>,
    pub conclusion: Verdict,
    pub conclusion_class: ClassId,
    pub consistent: bool,
    pub status: Consistency,
    pub extended_range: bool,
}

fn classify(hypothesis: &Verdict, conclusion: &Verdict) -> (bool, Consistency) {
    let consistent = !(hypothesis.holds && !conclusion.holds);
    let status = if !hypothesis.is_applicable() || !conclusion.is_applicable() {
        Consistency::NotApplicable
    } else if consistent {
        Consistency::Consistent
    } else if hypothesis.margin > HARD_MARGIN {
        Consistency::Inconsistent
    } else {
        Consistency::Marginal
    };
    (consistent, status)
}

fn assemble(
    f: &AnalyticFunction,
    criterion: &dyn Criterion,
    hypothesis: Verdict,
    conclusion: Verdict,
) -> ImplicationReport {
    let (consistent, status) = classify(&hypothesis, &conclusion);
    ImplicationReport {
        function: f.spec().clone(),
        criterion: criterion.spec(),
        hypothesis: Some(hypothesis),
        conclusion,
        conclusion_class: criterion.conclusion(),
        consistent,
        status,
        extended_range: criterion.extended_range(),
    }
}

pub fn verify_implication(f: &AnalyticFunction, criterion: &dyn Criterion, cfg: &ScanConfig) -> ImplicationReport {
    let hypothesis = check_hypothesis(f, criterion, cfg);
    let conclusion = check_conclusion(f, criterion.conclusion(), cfg);
    assemble(f, criterion, hypothesis, conclusion)
}

/// Outcome of probing Jack's lemma on one circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JackResult {
    pub r: f64,
    #[serde(serialize_with = "ser_complex")]
    pub z0: Complex64,
    pub theta: f64,
    /// `Re(z0 w'(z0) / w(z0))`
    pub k_est: f64,
    /// `|Im(z0 w'(z0) / w(z0))|`
    pub im_residual: f64,
    pub modulus: f64,
    pub satisfies_lemma: bool,
}

/// Locates the maximum of `|w|` on `|z| = r` and measures `z0 w'(z0)/w(z0)`.
///
/// The scanner's maximizer is polished by bisecting on
/// `Im(z w'/w) = -d/dθ log|w|`, which vanishes at the maximum.
pub fn jack_probe(w: &SchwarzFunction, r: f64, cfg: &ScanConfig) -> Result<JackResult, HarnessError> {
    if w.series().coeffs().iter().all(|c| c.norm() == 0.0) {
        return Err(HarnessError::DegenerateProbe(0.0));
    }
    let wp = w.series().derivative();
    let ratio = |z: Complex64| z * wp.eval(z) / w.eval(z);
    let q = |z: Complex64| crate::criteria::PointValue { value: w.eval(z).norm(), z, flags: Flags::empty() };
    let best = circle_extremum(&q, r, cfg, Mode::Max)?;

    let mut theta = best.theta;
    let h = 2.0 * std::f64::consts::PI / cfg.base_samples.max(8) as f64;
    let g = |t: f64| ratio(Complex64::from_polar(r, t)).im;
    let (mut a, mut b) = (theta - h, theta + h);
    let (mut ga, gb) = (g(a), g(b));
    if ga.is_finite() && gb.is_finite() && ga < 0.0 && gb > 0.0 {
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if b - a < 1e-15 {
                break;
            }
            let gm = g(m);
            if (gm < 0.0) == (ga < 0.0) {
                a = m;
                ga = gm;
            } else {
                b = m;
            }
        }
        let polished = 0.5 * (a + b);
        let tol = 1e-12 * best.value.max(1e-300);
        if w.eval(Complex64::from_polar(r, polished)).norm() >= best.value - tol {
            theta = polished;
        }
    }

    let z0 = Complex64::from_polar(r, theta);
    let modulus = w.eval(z0).norm();
    if modulus < 1e-14 {
        return Err(HarnessError::DegenerateProbe(modulus));
    }
    let k = ratio(z0);
    let im_residual = k.im.abs();
    Ok(JackResult {
        r,
        z0,
        theta: normalize_angle(theta),
        k_est: k.re,
        im_residual,
        modulus,
        satisfies_lemma: k.re >= 1.0 - JACK_TOL && im_residual <= JACK_TOL,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Aggregate {
    pub pairs: usize,
    pub consistent: usize,
    pub inconsistent: usize,
    pub marginal: usize,
    pub not_applicable: usize,
    pub hypothesis_held: usize,
    pub conclusion_held: usize,
    pub extended_range: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusReport {
    pub records: Vec<ImplicationReport>,
    pub aggregate: Aggregate,
}

impl CorpusReport {
    fn aggregate(records: &[ImplicationReport]) -> Aggregate {
        let mut a = Aggregate { pairs: records.len(), ..Aggregate::default() };
        for r in records {
            match r.status {
                Consistency::Consistent => a.consistent += 1,
                Consistency::Marginal => a.marginal += 1,
                Consistency::Inconsistent => a.inconsistent += 1,
                Consistency::NotApplicable => a.not_applicable += 1,
            }
            if r.hypothesis.as_ref().is_some_and(|h| h.holds) {
                a.hypothesis_held += 1;
            }
            if r.conclusion.holds {
                a.conclusion_held += 1;
            }
            if r.extended_range {
                a.extended_range += 1;
            }
        }
        a
    }
}

/// One entry of a corpus sweep: a hypothesis criterion or a bare class.
#[derive(Debug)]
enum Check {
    Implication(Box<dyn Criterion>),
    Membership(ClassId),
}

fn conclusion_only(f: &FunctionSpec, class: ClassId, conclusion: Verdict) -> ImplicationReport {
    let status = if conclusion.is_applicable() { Consistency::Consistent } else { Consistency::NotApplicable };
    ImplicationReport {
        function: f.clone(),
        criterion: class.to_spec(),
        hypothesis: None,
        conclusion,
        conclusion_class: class,
        consistent: true,
        status,
        extended_range: false,
    }
}

fn class_key(c: &ClassId) -> String {
    format!("{c:?}")
}

/// Runs every (function, criterion) pair. Criteria with a `memb_*` kind
/// produce conclusion-only records. Records follow input order, function
/// major.
pub fn corpus_run(
    corpus: &[FunctionSpec],
    criteria: &[CriterionSpec],
    cfg: &ScanConfig,
) -> Result<CorpusReport, HarnessError> {
    cfg.validate()?;
    let registry = CriterionRegistry::standard();
    let checks: Vec<Check> = criteria
        .iter()
        .map(|s| {
            if s.kind.starts_with("memb_") {
                ClassId::from_spec(s).map(Check::Membership)
            } else {
                registry.build(s).map(Check::Implication)
            }
        })
        .collect::<Result<_, _>>()?;

    let per_function: Vec<Vec<ImplicationReport>> = corpus
        .par_iter()
        .map(|spec| run_function(spec, criteria, &checks, cfg))
        .collect();
    let records: Vec<ImplicationReport> = per_function.into_iter().flatten().collect();
    let aggregate = CorpusReport::aggregate(&records);
    Ok(CorpusReport { records, aggregate })
}

fn run_function(
    spec: &FunctionSpec,
    specs: &[CriterionSpec],
    checks: &[Check],
    cfg: &ScanConfig,
) -> Vec<ImplicationReport> {
    let f = match AnalyticFunction::from_spec(spec) {
        Ok(f) => f,
        Err(e) => {
            return specs
                .iter()
                .zip(checks)
                .map(|(s, check)| {
                    let class = match check {
                        Check::Implication(c) => c.conclusion(),
                        Check::Membership(c) => *c,
                    };
                    let na = Verdict::not_applicable(0.0, e.to_string());
                    ImplicationReport {
                        function: spec.clone(),
                        criterion: s.clone(),
                        hypothesis: Some(na.clone()),
                        conclusion: na,
                        conclusion_class: class,
                        consistent: true,
                        status: Consistency::NotApplicable,
                        extended_range: false,
                    }
                })
                .collect();
        }
    };
    // conclusions are shared between criteria implying the same class
    let mut conclusions: HashMap<String, Verdict> = HashMap::new();
    let mut conclusion_for = |class: ClassId| {
        conclusions
            .entry(class_key(&class))
            .or_insert_with(|| check_conclusion(&f, class, cfg))
            .clone()
    };
    checks
        .iter()
        .map(|check| match check {
            Check::Implication(c) => {
                let hypothesis = check_hypothesis(&f, c.as_ref(), cfg);
                let conclusion = conclusion_for(c.conclusion());
                assemble(&f, c.as_ref(), hypothesis, conclusion)
            }
            Check::Membership(class) => conclusion_only(spec, *class, conclusion_for(*class)),
        })
        .collect()
}

/// The criterion set of the standard consistency sweep.
pub fn standard_sweep_criteria() -> Vec<CriterionSpec> {
    use crate::criteria::Sign;
    vec![
        CriterionSpec::t1(1.0, 1.0, 1.0),
        CriterionSpec::t1(0.5, 2.0, 0.0),
        CriterionSpec::c1(0.5),
        CriterionSpec::c2(1.0, 1.0),
        CriterionSpec::t2(Sign::Minus, 1.0, 1.0),
        CriterionSpec::t2(Sign::Plus, 1.0, 1.0),
        CriterionSpec::t2(Sign::Minus, -1.0, 1.0),
        CriterionSpec::t3(0.5, 1.0, 1.0),
        CriterionSpec::t4(1.0, 1.0),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::synthesize_from_schwarz_c;
    use crate::criteria::{criterion, Sign};

    fn func(spec: FunctionSpec) -> AnalyticFunction {
        AnalyticFunction::from_spec(&spec).unwrap()
    }

    #[test]
    fn hypothesis_examples() {
        let cfg = ScanConfig::default();
        let id = func(FunctionSpec::Identity);
        let v = check_hypothesis(&id, criterion(&CriterionSpec::t2(Sign::Minus, 1.0, 1.0)).unwrap().as_ref(), &cfg);
        assert!(v.holds);
        assert_eq!(v.margin, 0.5);

        let q = func(FunctionSpec::quad(0.1));
        let v = check_hypothesis(&q, criterion(&CriterionSpec::t1(1.0, 1.0, 1.0)).unwrap().as_ref(), &cfg);
        assert!(v.holds);
        // |2cz| |(1 + 4cz)/(1 + 2cz)| peaks at z = r
        let r = 0.999;
        assert!((v.value - 0.2 * r * (1.0 + 0.4 * r) / (1.0 + 0.2 * r)).abs() < 1e-9);

        let k = func(FunctionSpec::Koebe);
        let v = check_hypothesis(&k, criterion(&CriterionSpec::t2(Sign::Minus, 1.0, 1.0)).unwrap().as_ref(), &cfg);
        assert!(!v.holds);
        assert!(v.value >= 8.0);
    }

    #[test]
    fn g_based_checks_need_a_zero_free_disk() {
        let cfg = ScanConfig::default();
        let p = func(FunctionSpec::poly(&[0.0, 1.0, -2.0]));
        let c = criterion(&CriterionSpec::t2(Sign::Minus, 1.0, 1.0)).unwrap();
        let v = check_hypothesis(&p, c.as_ref(), &cfg);
        assert_eq!(v.outcome, Outcome::NotApplicable);
        assert!(v.note.unwrap().contains("1 zero"));
        let report = verify_implication(&p, c.as_ref(), &cfg);
        assert_eq!(report.status, Consistency::NotApplicable);
        // the C-class criteria still apply
        let c = criterion(&CriterionSpec::t1(1.0, 1.0, 1.0)).unwrap();
        assert!(check_hypothesis(&p, c.as_ref(), &cfg).is_applicable());
    }

    #[test]
    fn zeros_under_negative_exponents_are_found() {
        // f' - 1 = 0.3z - 0.75z^2 vanishes at 0.4
        let f = func(FunctionSpec::poly(&[0.0, 1.0, 0.15, -0.25]));
        let c = criterion(&CriterionSpec::t1(-0.5, 0.0, 0.0)).unwrap();
        let v = check_hypothesis(&f, c.as_ref(), &ScanConfig::default());
        assert!(!v.holds);
        assert_eq!(v.value, f64::INFINITY);
        assert!(v.flags.contains(Flags::SINGULAR_POWER));
        assert!((v.witness - Complex64::new(0.4, 0.0)).norm() < 1e-9, "{}", v.witness);
        assert!(v.note.unwrap().contains("1 zero(s)"));

        // no zero of f' - 1 besides the origin for quad
        let v = check_hypothesis(&func(FunctionSpec::quad(0.25)), c.as_ref(), &ScanConfig::default());
        assert!(v.note.is_none());
    }

    #[test]
    fn conclusion_examples() {
        let cfg = ScanConfig::default();
        let k = func(FunctionSpec::Koebe);
        let v = check_conclusion(&k, ClassId::Sstar { alpha: 0.0 }, &cfg);
        assert!(v.holds);
        assert!((v.value - 0.001 / 1.999).abs() < 1e-10);
        let v = check_conclusion(&k, ClassId::C { alpha: 0.0 }, &cfg);
        assert!(!v.holds);
        assert!(v.onset_radius.unwrap() < 0.5);
    }

    #[test]
    fn implication_examples() {
        let cfg = ScanConfig::default();
        let id = func(FunctionSpec::Identity);
        for spec in standard_sweep_criteria() {
            let c = criterion(&spec).unwrap();
            let r = verify_implication(&id, c.as_ref(), &cfg);
            assert!(r.consistent, "{spec:?}");
            assert!(r.conclusion.holds);
            // functionals with a negative exponent are infinite on w = 0
            assert_eq!(r.hypothesis.unwrap().holds, !c.has_negative_exponent(), "{spec:?}");
        }
        let k = func(FunctionSpec::Koebe);
        let r = verify_implication(&k, criterion(&CriterionSpec::t2(Sign::Minus, 1.0, 1.0)).unwrap().as_ref(), &cfg);
        assert!(!r.hypothesis.unwrap().holds);
        assert_eq!(r.status, Consistency::Consistent);
    }

    #[test]
    fn marginal_hypotheses_are_not_counterexamples() {
        let hyp = Verdict { margin: 1e-7, holds: true, outcome: Outcome::Holds, ..Verdict::not_applicable(1.0, String::new()) };
        let concl = Verdict { margin: -1.0, holds: false, outcome: Outcome::Fails, ..Verdict::not_applicable(0.0, String::new()) };
        assert_eq!(classify(&hyp, &concl), (false, Consistency::Marginal));
        let hyp = Verdict { margin: 1e-3, ..hyp };
        assert_eq!(classify(&hyp, &concl), (false, Consistency::Inconsistent));
    }

    #[test]
    fn jack_monomials() {
        let cfg = ScanConfig::default();
        for n in 1..=3 {
            let w = SchwarzFunction::monomial(n, 16);
            for r in [0.5, 0.9] {
                let j = jack_probe(&w, r, &cfg).unwrap();
                assert!((j.k_est - n as f64).abs() < 1e-9);
                assert!(j.im_residual < 1e-12);
                assert!((j.z0.norm() - r).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn jack_quadratic() {
        let w = SchwarzFunction::from_coeffs(&[[0.0, 0.0], [0.5, 0.0], [0.5, 0.0]], 16).unwrap();
        let j = jack_probe(&w, 0.9, &ScanConfig::default()).unwrap();
        assert!((j.k_est - 2.8 / 1.9).abs() < 1e-6);
        assert!(j.theta.min(2.0 * std::f64::consts::PI - j.theta) < 1e-6);
        assert!(j.satisfies_lemma);
    }

    #[test]
    fn jack_rejects_zero_function() {
        let w = SchwarzFunction::from_coeffs(&[[0.0, 0.0]], 8).unwrap();
        assert!(matches!(jack_probe(&w, 0.5, &ScanConfig::default()), Err(HarnessError::DegenerateProbe(_))));
    }

    #[test]
    fn corpus_examples() {
        let cfg = ScanConfig::default();
        let r = corpus_run(&[FunctionSpec::Identity], &[CriterionSpec::t1(1.0, 1.0, 1.0)], &cfg).unwrap();
        assert_eq!(r.aggregate.consistent, 1);
        assert_eq!(r.aggregate.hypothesis_held, 1);

        let r = corpus_run(
            &[FunctionSpec::Koebe, FunctionSpec::quad(0.25)],
            &[CriterionSpec::new("memb_C")],
            &cfg,
        )
        .unwrap();
        assert!(!r.records[0].conclusion.holds);
        assert!(r.records[1].conclusion.holds);
        // 1 - 2|c| r at the largest ladder radius
        assert!((r.records[1].conclusion.value - (1.0 - 0.5 * 0.999)).abs() < 1e-9);
    }

    #[test]
    fn corpus_records_invalid_functions_as_not_applicable() {
        let bad = FunctionSpec::poly(&[0.0, 3.0]);
        let r = corpus_run(&[bad], &[CriterionSpec::t1(1.0, 1.0, 1.0)], &ScanConfig::default()).unwrap();
        assert_eq!(r.aggregate.not_applicable, 1);
        assert!(corpus_run(&[], &[CriterionSpec::new("nope")], &ScanConfig::default()).is_err());
    }

    #[test]
    fn synthesized_c_member_passes() {
        let w = SchwarzFunction::from_coeffs(&[[0.0, 0.0], [0.3, 0.2], [0.0, -0.3]], 64)
            .unwrap()
            .scaled_to(0.99, 0.999, 4096);
        let f = synthesize_from_schwarz_c(&w).unwrap();
        assert!(check_conclusion(&f, ClassId::C { alpha: 0.0 }, &ScanConfig::default()).holds);
    }
}

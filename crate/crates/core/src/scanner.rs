//! Extremum estimation over circles `|z| = r` and over the disk.
//!
//! A circle is sampled on an equispaced angular grid and the best few local
//! candidates are refined by golden-section search. The disk estimate is the
//! best circle over a ladder of radii, optionally merged with a dense polar
//! grid for functionals that are not subharmonic.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::criteria::{Flags, PointValue};

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const CANDIDATES: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScanError {
    #[error("every sample on |z| = {radius} is undefined")]
    Unscannable { radius: f64 },
    #[error("invalid scan configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub radii: usize,
    pub angles: usize,
}

impl Default for PolarGrid {
    fn default() -> Self {
        Self { radii: 64, angles: 1024 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub radius_ladder: Vec<f64>,
    pub base_samples: usize,
    pub refine_tol: f64,
    pub interior_grid: Option<PolarGrid>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            radius_ladder: vec![0.5, 0.9, 0.99, 0.999],
            base_samples: 4096,
            refine_tol: 1e-12,
            interior_grid: None,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<(), ScanError> {
        let bad = |m: String| Err(ScanError::InvalidConfig(m));
        if self.radius_ladder.is_empty() {
            return bad("radius_ladder is empty".into());
        }
        if let Some(r) = self.radius_ladder.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            return bad(format!("radius {r} outside (0, 1)"));
        }
        if self.radius_ladder.windows(2).any(|w| w[1] <= w[0]) {
            return bad("radius_ladder must be strictly increasing".into());
        }
        if self.base_samples < 8 {
            return bad(format!("base_samples = {} is below 8", self.base_samples));
        }
        if !(self.refine_tol > 0.0) {
            return bad("refine_tol must be positive".into());
        }
        if let Some(g) = self.interior_grid {
            if g.radii == 0 || g.angles < 8 {
                return bad(format!("interior grid {}x{} is too small", g.radii, g.angles));
            }
        }
        Ok(())
    }

    pub fn max_radius(&self) -> f64 {
        *self.radius_ladder.last().expect("validated ladder is nonempty")
    }

    /// Same configuration with the interior grid switched on.
    pub fn with_interior_grid(&self) -> Self {
        Self { interior_grid: Some(self.interior_grid.unwrap_or_default()), ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Max,
    Min,
}

impl Mode {
    /// Larger is better in both modes; NaN never wins.
    fn key(self, v: f64) -> f64 {
        if v.is_nan() {
            return f64::NEG_INFINITY;
        }
        match self {
            Mode::Max => v,
            Mode::Min => -v,
        }
    }

    fn better(self, a: f64, b: f64) -> bool {
        !a.is_nan() && (b.is_nan() || self.key(a) > self.key(b))
    }
}

/// Best point found on one circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleExtremum {
    pub radius: f64,
    pub value: f64,
    pub theta: f64,
    pub witness: Complex64,
    /// Best value on the base grid alone.
    pub grid_value: f64,
    pub flags: Flags,
}

fn point(r: f64, theta: f64) -> Complex64 {
    Complex64::from_polar(r, theta)
}

fn undefined(p: &PointValue) -> bool {
    p.value.is_nan() || p.flags.contains(Flags::FUNCTION_ZERO)
}

/// Golden-section search for the best `mode` value of `q` on `[a, b]`.
fn golden_section<Q>(q: &Q, r: f64, mut a: f64, mut b: f64, tol: f64, mode: Mode) -> Option<PointValue>
where
    Q: Fn(Complex64) -> PointValue + ?Sized,
{
    let eval = |t: f64| q(point(r, t));
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    let mut best = if mode.better(f2.value, f1.value) { (x2, f2) } else { (x1, f1) };
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if f1.value.is_nan() || f2.value.is_nan() {
            return None;
        }
        if mode.key(f1.value) >= mode.key(f2.value) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = eval(x1);
            if mode.better(f1.value, best.1.value) {
                best = (x1, f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = eval(x2);
            if mode.better(f2.value, best.1.value) {
                best = (x2, f2);
            }
        }
    }
    Some(best.1)
}

/// Angle in `[0, 2π)`.
pub(crate) fn normalize_angle(t: f64) -> f64 {
    let t = t.rem_euclid(2.0 * PI);
    if t >= 2.0 * PI {
        0.0
    } else {
        t
    }
}

/// Best value of `q` on `|z| = r`: dense equispaced sampling, then
/// golden-section refinement of the best local candidates.
pub fn circle_extremum<Q>(q: &Q, r: f64, cfg: &ScanConfig, mode: Mode) -> Result<CircleExtremum, ScanError>
where
    Q: Fn(Complex64) -> PointValue + ?Sized,
{
    if !(r > 0.0 && r < 1.0) {
        return Err(ScanError::InvalidConfig(format!("radius {r} outside (0, 1)")));
    }
    let n = cfg.base_samples.max(8);
    let step = 2.0 * PI / n as f64;
    let samples: Vec<PointValue> = (0..n).map(|j| q(point(r, j as f64 * step))).collect();

    let mut flags = Flags::empty();
    for s in &samples {
        flags |= s.flags;
    }
    if samples.iter().all(undefined) {
        return Err(ScanError::Unscannable { radius: r });
    }

    let keys: Vec<f64> = samples.iter().map(|s| mode.key(s.value)).collect();
    let mut best_j = 0;
    for j in 1..n {
        if keys[j] > keys[best_j] {
            best_j = j;
        }
    }
    let grid_value = samples[best_j].value;

    // local peaks of the sampled sequence, best first, ties to smaller index
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&j| {
            let k = keys[j];
            k.is_finite() && k >= keys[(j + n - 1) % n] && k >= keys[(j + 1) % n]
        })
        .collect();
    peaks.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]).then(a.cmp(&b)));
    peaks.truncate(CANDIDATES);

    let mut best_theta = best_j as f64 * step;
    let mut best = samples[best_j];
    for &j in &peaks {
        let centre = j as f64 * step;
        if let Some(p) = golden_section(q, r, centre - step, centre + step, cfg.refine_tol, mode) {
            let theta = normalize_angle(p.z.arg());
            let wins = mode.better(p.value, best.value)
                || (p.value == best.value && theta < best_theta);
            if wins {
                best = p;
                best_theta = theta;
            }
        }
    }

    Ok(CircleExtremum {
        radius: r,
        value: best.value,
        theta: best_theta,
        witness: best.z,
        grid_value,
        flags: flags | best.flags,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusExtremum {
    pub radius: f64,
    pub value: f64,
    pub theta: f64,
}

/// Disk-level extremum with its witness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupEstimate {
    pub mode: Mode,
    pub value: f64,
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub witness: Complex64,
    pub radius: f64,
    pub per_radius: Vec<RadiusExtremum>,
    pub monotone: bool,
    pub used_interior_grid: bool,
    pub flags: Flags,
}

/// Circle extrema along the ladder, best one wins (ties go to the smaller
/// radius, then the smaller angle). With `interior_grid` set, the polar grid
/// over `|z| ≤ max radius` is merged in.
pub fn disk_sup<Q>(q: &Q, cfg: &ScanConfig, mode: Mode) -> Result<SupEstimate, ScanError>
where
    Q: Fn(Complex64) -> PointValue + Sync + ?Sized,
{
    cfg.validate()?;
    let circles: Vec<CircleExtremum> = cfg
        .radius_ladder
        .par_iter()
        .map(|&r| circle_extremum(q, r, cfg, mode))
        .collect::<Result<_, _>>()?;

    let mut flags = Flags::empty();
    let mut best = circles[0];
    for c in &circles {
        flags |= c.flags;
        if mode.better(c.value, best.value) {
            best = *c;
        }
    }

    let monotone = circles.windows(2).all(|w| {
        let (a, b) = (w[0].value, w[1].value);
        let slack = 1e-12 * a.abs().max(1.0);
        match mode {
            Mode::Max => b >= a - slack,
            Mode::Min => b <= a + slack,
        }
    });

    let mut value = best.value;
    let mut witness = best.witness;
    let mut radius = best.radius;
    if let Some(grid) = cfg.interior_grid {
        let rows = polar_rows(q, cfg.max_radius(), grid);
        for row in &rows {
            for p in row {
                flags |= p.flags;
                if mode.better(p.value, value) {
                    value = p.value;
                    witness = p.z;
                    radius = p.z.norm();
                }
            }
        }
    }

    Ok(SupEstimate {
        mode,
        value,
        witness,
        radius,
        per_radius: circles
            .iter()
            .map(|c| RadiusExtremum { radius: c.radius, value: c.value, theta: c.theta })
            .collect(),
        monotone,
        used_interior_grid: cfg.interior_grid.is_some(),
        flags,
    })
}

fn polar_rows<Q>(q: &Q, max_radius: f64, grid: PolarGrid) -> Vec<Vec<PointValue>>
where
    Q: Fn(Complex64) -> PointValue + Sync + ?Sized,
{
    let radii: Vec<f64> = (1..=grid.radii).map(|i| max_radius * i as f64 / grid.radii as f64).collect();
    sample_rows(q, &radii, grid.angles)
}

/// Samples `q` on every `(r, 2πj/angles)`; rows in the order of `radii`.
pub fn sample_rows<Q>(q: &Q, radii: &[f64], angles: usize) -> Vec<Vec<PointValue>>
where
    Q: Fn(Complex64) -> PointValue + Sync + ?Sized,
{
    let step = 2.0 * PI / angles as f64;
    radii
        .par_iter()
        .map(|&r| (0..angles).map(|j| q(point(r, j as f64 * step))).collect())
        .collect()
}

/// Smallest radius in `(lo, hi]` at which the circle extremum fails `ok`,
/// by bisection to `tol`. Assumes `ok` holds at `lo` and fails at `hi`.
pub fn onset_radius<Q>(
    q: &Q,
    mut lo: f64,
    mut hi: f64,
    cfg: &ScanConfig,
    mode: Mode,
    ok: impl Fn(f64) -> bool,
    tol: f64,
) -> Result<f64, ScanError>
where
    Q: Fn(Complex64) -> PointValue + ?Sized,
{
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if ok(circle_extremum(q, mid, cfg, mode)?.value) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

//! JSON number conventions and the CSV polar-grid dump.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::Serializer;

use crate::catalog::AnalyticFunction;
use crate::criteria::{Flags, Quantity};
use crate::scanner::{sample_rows, ScanConfig};

/// Finite values as JSON numbers, infinities as `"inf"` / `"-inf"`, NaN as null.
pub fn ser_ext<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_none()
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub fn ser_opt_ext<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => ser_ext(x, s),
        None => s.serialize_none(),
    }
}

pub fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

/// 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub r: f64,
    pub theta: f64,
    pub value: f64,
    pub flags: Flags,
}

/// Radii of the dump grid: the uniform polar radii up to the largest ladder
/// radius, merged with the ladder radii themselves.
fn dump_radii(cfg: &ScanConfig) -> Vec<f64> {
    let grid = cfg.interior_grid.unwrap_or_default();
    let rmax = cfg.max_radius();
    let mut radii: Vec<f64> = (1..=grid.radii).map(|i| rmax * i as f64 / grid.radii as f64).collect();
    radii.extend(cfg.radius_ladder.iter().copied());
    radii.sort_by(f64::total_cmp);
    radii.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    radii
}

/// Samples `quantity` on a polar grid over `|z| ≤ max ladder radius`.
pub fn grid_dump(f: &AnalyticFunction, quantity: &Quantity, cfg: &ScanConfig) -> Vec<GridRow> {
    let angles = cfg.interior_grid.unwrap_or_default().angles;
    let radii = dump_radii(cfg);
    let q = |z| quantity.eval(f, z);
    let step = 2.0 * std::f64::consts::PI / angles as f64;
    sample_rows(&q, &radii, angles)
        .into_iter()
        .zip(&radii)
        .flat_map(|(row, &r)| {
            row.into_iter()
                .enumerate()
                .map(move |(j, p)| GridRow { r, theta: j as f64 * step, value: p.value, flags: p.flags })
        })
        .collect()
}

pub const GRID_HEADER: &str = "r,theta,value,flag";

pub fn write_grid_csv<W: Write>(mut out: W, rows: &[GridRow]) -> io::Result<()> {
    writeln!(out, "{GRID_HEADER}")?;
    for row in rows {
        writeln!(out, "{},{},{},{}", fmt17(row.r), fmt17(row.theta), fmt17(row.value), row.flags.joined())?;
    }
    Ok(())
}

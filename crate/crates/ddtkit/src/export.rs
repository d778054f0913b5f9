//! Map export: CSV (lossless, 17 significant digits) and binary PGM heatmaps.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{DdtError, Result};
use crate::grid::TimeGrid;
use crate::transforms::{MapKind, TFMap};

/// Format a double with up to 17 significant digits, printf `%.17g` style:
/// trailing zeros stripped, scientific notation outside [1e-4, 1e17).
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let s = format!("{:.16e}", x);
    let (mant, exp) = s.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("exponent digits");
    let mant = mant.trim_end_matches('0').trim_end_matches('.');
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mant}e{sign}{:02}", exp.abs());
    }
    let (neg, digits) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant),
    };
    let digits: String = digits.chars().filter(|c| *c != '.').collect();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        for _ in 0..(-exp - 1) {
            out.push('0');
        }
        out.push_str(&digits);
    } else {
        let int_len = exp as usize + 1;
        if digits.len() <= int_len {
            out.push_str(&digits);
            for _ in 0..(int_len - digits.len()) {
                out.push('0');
            }
        } else {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    }
    out
}

/// Format a complex entry as `<re><sign><im>j`.
pub fn fmt_complex_g17(z: Complex64) -> String {
    let im = fmt_g17(z.im);
    if im.starts_with('-') {
        format!("{}{}j", fmt_g17(z.re), im)
    } else {
        format!("{}+{}j", fmt_g17(z.re), im)
    }
}

/// Parse a complex entry in the `<re><sign><im>j` form written by the
/// exporters.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let body = s
        .strip_suffix('j')
        .ok_or_else(|| DdtError::format(format!("complex entry '{s}' missing trailing j")))?;
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        let c = bytes[i];
        if (c == b'+' || c == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let i = split.ok_or_else(|| DdtError::format(format!("complex entry '{s}' has no imaginary part")))?;
    let re: f64 = body[..i]
        .parse()
        .map_err(|e| DdtError::format(format!("complex entry '{s}': {e}")))?;
    let im: f64 = body[i..]
        .parse()
        .map_err(|e| DdtError::format(format!("complex entry '{s}': {e}")))?;
    Ok(Complex64::new(re, im))
}

/// Write a map as CSV. Header row is `t\omega` followed by the Omega axis;
/// each data row is the t value followed by the complex entries, increasing
/// t down, increasing Omega across.
pub fn export_map_csv(map: &TFMap, path: &Path) -> Result<()> {
    let mut out = Vec::with_capacity((map.t_axis().count() + 1) * (map.omega_axis().count() + 1) * 24);
    out.extend_from_slice(br"t\omega");
    for w in map.omega_axis().points() {
        write!(out, ",{}", fmt_g17(w))?;
    }
    out.push(b'\n');
    for m in 0..map.t_axis().count() {
        write!(out, "{}", fmt_g17(map.t_axis().point(m)))?;
        for z in map.row(m) {
            write!(out, ",{}", fmt_complex_g17(*z))?;
        }
        out.push(b'\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Parse a map written by [`export_map_csv`]. Values round-trip bitwise.
pub fn parse_map_csv(path: &Path, kind: MapKind) -> Result<TFMap> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| DdtError::format("empty map file"))?;
    let mut fields = header.split(',');
    let tag = fields.next().unwrap_or("");
    if tag != r"t\omega" {
        return Err(DdtError::format(format!(r"expected header tag 't\omega', got '{tag}'")));
    }
    let omegas: Vec<f64> = fields
        .map(|f| f.parse::<f64>().map_err(|e| DdtError::format(format!("omega axis: {e}"))))
        .collect::<Result<_>>()?;
    if omegas.is_empty() {
        return Err(DdtError::format("map has no omega columns"));
    }
    let mut ts = Vec::new();
    let mut values = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let t: f64 = fields
            .next()
            .unwrap()
            .parse()
            .map_err(|e| DdtError::format(format!("t axis: {e}")))?;
        ts.push(t);
        let before = values.len();
        for f in fields {
            values.push(parse_complex(f)?);
        }
        if values.len() - before != omegas.len() {
            return Err(DdtError::format("row width does not match omega axis"));
        }
    }
    let t_axis = axis_from_values(&ts, "t")?;
    let omega_axis = axis_from_values(&omegas, "omega")?;
    TFMap::new(t_axis, omega_axis, values, kind)
}

fn axis_from_values(v: &[f64], name: &str) -> Result<TimeGrid> {
    if v.is_empty() {
        return Err(DdtError::format(format!("{name} axis is empty")));
    }
    if v.len() == 1 {
        return TimeGrid::new(v[0], 1.0, 1);
    }
    let step = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
    if !(step > 0.0) {
        return Err(DdtError::format(format!("{name} axis must be increasing")));
    }
    TimeGrid::new(v[0], step, v.len())
}

/// Write a binary PGM (P5, maxval 255) magnitude heatmap. Rows top-to-bottom
/// run from the highest Omega down; columns left-to-right follow increasing t.
/// An all-zero map renders all black.
pub fn export_map_pgm(map: &TFMap, path: &Path) -> Result<()> {
    let width = map.t_axis().count();
    let height = map.omega_axis().count();
    let peak = map.peak_abs();
    let mut out = Vec::with_capacity(width * height + 32);
    write!(out, "P5\n{width} {height}\n255\n")?;
    for r in 0..height {
        let k = height - 1 - r;
        for m in 0..width {
            let v = map.at(m, k).norm();
            let pixel = if peak == 0.0 { 0.0 } else { (255.0 * v / peak).round() };
            out.push(pixel as u8);
        }
    }
    fs::write(path, out)?;
    Ok(())
}

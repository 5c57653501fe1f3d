//! Locale-free `%.12g` formatting and CSV/JSON writers.

use std::io::{self, Write};

use serde::Serialize;

use crate::manifest::RunManifest;

/// Formats like C's `%.{precision}g`.
pub fn fmt_g(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let p = precision.max(1);
    // Round first; the exponent is that of the rounded value.
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn g12(x: f64) -> String {
    fmt_g(x, 12)
}

/// Writes a CSV table preceded by a `# manifest:` comment line.
pub fn write_csv(
    out: &mut dyn Write,
    manifest: &RunManifest,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> io::Result<()> {
    writeln!(out, "# manifest: {}", serde_json::to_string(manifest)?)?;
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// A CSV row of numbers.
pub fn nums(values: &[f64]) -> Vec<String> {
    values.iter().map(|&v| g12(v)).collect()
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    manifest: &'a RunManifest,
    #[serde(flatten)]
    body: &'a T,
}

/// Writes `body`'s fields next to a `manifest` field as pretty JSON.
pub fn write_json<T: Serialize>(out: &mut dyn Write, manifest: &RunManifest, body: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, &Envelope { manifest, body })?;
    writeln!(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf() {
        let cases = [
            (0.5, "0.5"),
            (1.0, "1"),
            (100.0, "100"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (-2.5, "-2.5"),
            (1.0 / 3.0, "0.333333333333"),
            (2.0 / 3.0, "0.666666666667"),
            (999999999999.5, "1e+12"),
            (1e100, "1e+100"),
            (0.0, "0"),
        ];
        for (x, want) in cases {
            assert_eq!(g12(x), want, "{x}");
        }
    }
}

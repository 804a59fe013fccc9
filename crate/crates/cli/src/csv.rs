use std::io::{self, BufRead, Write};

use kgcd_core::solow::{Method, Sample, Trajectory};

pub const HEADER: &str = "t,k,y,L,n,method";

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros dropped,
/// exponent form outside `1e-4 ≤ |x| < 1e12`.
pub fn fmt_g12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (11 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_trajectory<W: Write>(mut w: W, trajectory: &Trajectory) -> io::Result<()> {
    writeln!(w, "{HEADER}")?;
    for s in trajectory.samples() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_g12(s.t),
            fmt_g12(s.k),
            fmt_g12(s.y),
            fmt_g12(s.labor),
            fmt_g12(s.n),
            s.method
        )?;
    }
    Ok(())
}

/// Reads back a file produced by [`write_trajectory`].
pub fn read_trajectory<R: BufRead>(r: R) -> io::Result<Vec<Sample>> {
    let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut lines = r.lines();
    match lines.next() {
        Some(Ok(h)) if h == HEADER => {}
        other => return Err(bad(format!("unexpected header {other:?}"))),
    }
    let mut samples = Vec::new();
    for (row, line) in lines.enumerate() {
        let line = line?;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(bad(format!("row {row}: expected 6 fields")));
        }
        let num = |i: usize| {
            fields[i]
                .parse::<f64>()
                .map_err(|e| bad(format!("row {row}, column {i}: {e}")))
        };
        samples.push(Sample {
            t: num(0)?,
            k: num(1)?,
            y: num(2)?,
            labor: num(3)?,
            n: num(4)?,
            method: Method::parse(fields[5])
                .ok_or_else(|| bad(format!("row {row}: unknown method {}", fields[5])))?,
        });
    }
    Ok(samples)
}

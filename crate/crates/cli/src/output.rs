//! CSV writers. UTF-8, LF line endings, numbers in C `%.17g` form.

use qwalk::{Distribution, SweepPoint};
use std::fmt::Write as _;
use std::path::Path;

use crate::CliError;

/// `printf("%.17g", x)`.
pub fn fmt_g17(x: f64) -> String {
    const P: i32 = 17;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..P).contains(&exp) {
        let fixed = format!("{:.*}", (P - 1 - exp) as usize, x);
        strip_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn distribution_csv(d: &Distribution, std_error: Option<&[f64]>) -> String {
    let label = if d.topology().is_line() { "position" } else { "site" };
    let mut out = String::new();
    out.push_str(label);
    out.push_str(",probability");
    if std_error.is_some() {
        out.push_str(",std_error");
    }
    out.push('\n');
    for (i, (x, p)) in d.reported().enumerate() {
        write!(out, "{x},{}", fmt_g17(p)).unwrap();
        if let Some(se) = std_error {
            write!(out, ",{}", fmt_g17(se[i])).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("value,sigma,sigma_ratio\n");
    for p in points {
        writeln!(out, "{},{},{}", fmt_g17(p.value), fmt_g17(p.sigma), fmt_g17(p.sigma_ratio)).unwrap();
    }
    out
}

/// Writes to `path`, or to standard output when there is none.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            }
            std::fs::write(p, contents).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(contents.as_bytes())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

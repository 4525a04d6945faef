//! CSV readers and writers. Lines starting with `#` are headers; complex
//! values occupy two columns `(re, im)`.
//!
//! | artifact      | header                          | row                           |
//! |---------------|---------------------------------|-------------------------------|
//! | grid          | `# grid n=<n> m=<M>`            | `i1,…,in,re,im`               |
//! | spectrum      | `# spectrum n=<n> m=<M>`        | `k1,…,kn,re,im`               |
//! | form header   | `# form n=<n> j=<j> m=<M>`      | `<basis label>,<grid file>`   |
//! | trajectory    | `# trajectory n=<n>`            | `t,x1,…,xn,xi1,…,xin,p`       |
//! | phase points  | `# points n=<n>`                | `x1,…,xn,xi1,…,xin`           |

use std::fmt::Write as _;

use num_complex::Complex;
use thiserror::Error;

use crate::hamilton::{Bicharacteristic, PhasePoint};
use crate::hodge::{basis, FormField, HodgeError};
use crate::quantize::{GridFunction, GridSpectrum, QuantizeError};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing or malformed header: expected '# {0} ...'")]
    Header(String),
    #[error(transparent)]
    Quantize(#[from] QuantizeError),
    #[error(transparent)]
    Hodge(#[from] HodgeError),
}

/// `key=value` pairs of the first header line starting with `# <kind>`.
fn header(text: &str, kind: &str) -> Result<Vec<(String, String)>, IoError> {
    let prefix = format!("# {kind}");
    let line = text
        .lines()
        .find(|l| l.starts_with(&prefix))
        .ok_or_else(|| IoError::Header(kind.into()))?;
    Ok(line[prefix.len()..]
        .split_whitespace()
        .filter_map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
        })
        .collect())
}

fn field(pairs: &[(String, String)], key: &str, kind: &str) -> Result<usize, IoError> {
    pairs
        .iter()
        .find(|(k, _)| k == key)
        .and_then(|(_, v)| v.parse().ok())
        .ok_or_else(|| IoError::Header(format!("{kind} {key}=")))
}

/// Data rows as `(line number, fields)`.
fn rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i + 1, l.split(',').map(str::trim).collect()))
}

fn parse_num<V: std::str::FromStr>(line: usize, s: &str) -> Result<V, IoError> {
    s.parse().map_err(|_| IoError::Parse {
        line,
        message: format!("cannot parse '{s}'"),
    })
}

fn check_width(line: usize, fields: &[&str], expected: usize) -> Result<(), IoError> {
    if fields.len() != expected {
        return Err(IoError::Parse {
            line,
            message: format!("expected {expected} columns, found {}", fields.len()),
        });
    }
    Ok(())
}

fn push_complex<T: Real>(out: &mut String, v: Complex<T>) {
    let _ = writeln!(out, "{:e},{:e}", v.re.to_f64_lossy(), v.im.to_f64_lossy());
}

pub fn grid_to_csv<T: Real>(u: &GridFunction<T>) -> String {
    let n = u.dim();
    let mut out = format!("# grid n={n} m={}\n# ", u.points_per_axis());
    for a in 1..=n {
        let _ = write!(out, "i{a},");
    }
    out.push_str("re,im\n");
    for (idx, v) in u.values().iter().enumerate() {
        for i in u.index_of(idx) {
            let _ = write!(out, "{i},");
        }
        push_complex(&mut out, *v);
    }
    out
}

pub fn grid_from_csv<T: Real>(text: &str) -> Result<GridFunction<T>, IoError> {
    let h = header(text, "grid")?;
    let (n, m) = (field(&h, "n", "grid")?, field(&h, "m", "grid")?);
    let mut u = GridFunction::<T>::zeros(n, m)?;
    let mut seen = vec![false; u.len()];
    for (line, f) in rows(text) {
        check_width(line, &f, n + 2)?;
        let ix: Vec<usize> = f[..n]
            .iter()
            .map(|s| parse_num(line, s))
            .collect::<Result<_, _>>()?;
        if ix.iter().any(|&i| i >= m) {
            return Err(IoError::Parse {
                line,
                message: format!("index {ix:?} outside 0..{m}"),
            });
        }
        let flat = u.flat_index(&ix);
        let re: f64 = parse_num(line, f[n])?;
        let im: f64 = parse_num(line, f[n + 1])?;
        u.values_mut()[flat] = Complex::new(T::of(re), T::of(im));
        seen[flat] = true;
    }
    let missing = seen.iter().filter(|s| !**s).count();
    if missing > 0 {
        return Err(IoError::Parse {
            line: 0,
            message: format!("{missing} lattice points have no value"),
        });
    }
    Ok(u)
}

pub fn spectrum_to_csv<T: Real>(s: &GridSpectrum<T>) -> String {
    let n = s.dim();
    let mut out = format!("# spectrum n={n} m={}\n# ", s.points_per_axis());
    for a in 1..=n {
        let _ = write!(out, "k{a},");
    }
    out.push_str("re,im\n");
    for (k, v) in s.iter() {
        for c in k {
            let _ = write!(out, "{c},");
        }
        push_complex(&mut out, v);
    }
    out
}

/// Wavenumbers absent from the file are zero.
pub fn spectrum_from_csv<T: Real>(text: &str) -> Result<GridSpectrum<T>, IoError> {
    let h = header(text, "spectrum")?;
    let (n, m) = (field(&h, "n", "spectrum")?, field(&h, "m", "spectrum")?);
    let mut s = GridSpectrum::<T>::zeros(n, m)?;
    for (line, f) in rows(text) {
        check_width(line, &f, n + 2)?;
        let k: Vec<i64> = f[..n]
            .iter()
            .map(|v| parse_num(line, v))
            .collect::<Result<_, _>>()?;
        let re: f64 = parse_num(line, f[n])?;
        let im: f64 = parse_num(line, f[n + 1])?;
        s.set(&k, Complex::new(T::of(re), T::of(im)))?;
    }
    Ok(s)
}

/// `dx1^dx3` style label of a basis index set (`1` for the empty set).
pub fn basis_label(alpha: &[usize]) -> String {
    if alpha.is_empty() {
        return "1".into();
    }
    alpha
        .iter()
        .map(|a| format!("dx{}", a + 1))
        .collect::<Vec<_>>()
        .join("^")
}

/// Sidecar header plus one grid CSV per coefficient. Coefficient files are
/// named `<stem>_<label>.csv`; the header lists them in basis order.
pub fn form_to_csv<T: Real>(w: &FormField<T>, stem: &str) -> (String, Vec<(String, String)>) {
    let mut header = format!(
        "# form n={} j={} m={}\n# basis,file\n",
        w.dim(),
        w.degree(),
        w.points_per_axis()
    );
    let mut files = Vec::new();
    for (alpha, c) in w.basis().iter().zip(w.coeffs()) {
        let label = basis_label(alpha);
        let name = format!("{stem}_{}.csv", label.replace('^', ""));
        let _ = writeln!(header, "{label},{name}");
        files.push((name, grid_to_csv(c)));
    }
    (header, files)
}

/// Reads a form from its header; `load` returns the text of a named
/// coefficient file.
pub fn form_from_csv<T: Real>(
    header_text: &str,
    mut load: impl FnMut(&str) -> Result<String, IoError>,
) -> Result<FormField<T>, IoError> {
    let h = header(header_text, "form")?;
    let (n, j, m) = (
        field(&h, "n", "form")?,
        field(&h, "j", "form")?,
        field(&h, "m", "form")?,
    );
    let labels: Vec<String> = basis(n, j).iter().map(|a| basis_label(a)).collect();
    let mut coeffs = Vec::new();
    for (line, f) in rows(header_text) {
        check_width(line, &f, 2)?;
        let expected = labels.get(coeffs.len()).ok_or_else(|| IoError::Parse {
            line,
            message: "more coefficient files than basis forms".into(),
        })?;
        if f[0] != expected {
            return Err(IoError::Parse {
                line,
                message: format!("expected basis form {expected}, found {}", f[0]),
            });
        }
        let g: GridFunction<T> = grid_from_csv(&load(f[1])?)?;
        if g.points_per_axis() != m {
            return Err(IoError::Parse {
                line,
                message: format!(
                    "coefficient grid has M = {}, header says {m}",
                    g.points_per_axis()
                ),
            });
        }
        coeffs.push(g);
    }
    Ok(FormField::new(n, j, coeffs)?)
}

pub fn trajectory_to_csv<T: Real>(b: &Bicharacteristic<T>) -> String {
    let n = b.start().dim();
    let mut out = format!("# trajectory n={n}\n# t,");
    for a in 1..=n {
        let _ = write!(out, "x{a},");
    }
    for a in 1..=n {
        let _ = write!(out, "xi{a},");
    }
    out.push_str("p\n");
    for ((t, z), p) in b.samples.iter().zip(&b.p_values) {
        let _ = write!(out, "{:e}", t.to_f64_lossy());
        for v in z.to_vec() {
            let _ = write!(out, ",{:e}", v.to_f64_lossy());
        }
        let _ = writeln!(out, ",{:e}", p.to_f64_lossy());
    }
    out
}

/// Rows of a trajectory file as `(t, point, p)`.
pub fn trajectory_from_csv(text: &str) -> Result<Vec<(f64, PhasePoint<f64>, f64)>, IoError> {
    let n = field(&header(text, "trajectory")?, "n", "trajectory")?;
    rows(text)
        .map(|(line, f)| {
            check_width(line, &f, 2 * n + 2)?;
            let v: Vec<f64> = f
                .iter()
                .map(|s| parse_num(line, s))
                .collect::<Result<_, _>>()?;
            Ok((v[0], PhasePoint::from_slice(&v[1..=2 * n]), v[2 * n + 1]))
        })
        .collect()
}

pub fn points_to_csv<T: Real>(points: &[PhasePoint<T>]) -> String {
    let n = points.first().map_or(0, PhasePoint::dim);
    let mut out = format!("# points n={n}\n");
    for z in points {
        let cols: Vec<String> = z
            .to_vec()
            .iter()
            .map(|v| format!("{:e}", v.to_f64_lossy()))
            .collect();
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

/// Without a header the dimension is half the column count.
pub fn points_from_csv(text: &str) -> Result<Vec<PhasePoint<f64>>, IoError> {
    let declared = header(text, "points")
        .ok()
        .map(|h| field(&h, "n", "points"))
        .transpose()?;
    let mut out = Vec::new();
    for (line, f) in rows(text) {
        let n = declared.unwrap_or(f.len() / 2);
        check_width(line, &f, 2 * n)?;
        let v: Vec<f64> = f
            .iter()
            .map(|s| parse_num(line, s))
            .collect::<Result<_, _>>()?;
        out.push(PhasePoint::from_slice(&v));
    }
    Ok(out)
}

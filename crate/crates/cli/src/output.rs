//! Output helpers: lossless number formatting, CSV assembly, and the debug
//! matrix dump format (one row per line, tab-separated `re+imj` entries).

use std::path::Path;

use num_complex::Complex64;

use lossy_coupler::Operator;

/// 17 significant digits: round-trips f64 exactly through text.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fmt_complex(v: Complex64) -> String {
    format!("{:.16e}{:+.16e}j", v.re, v.im)
}

/// Write to `path`, or to stdout when no path is given.
pub fn write_output(path: Option<&Path>, content: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| format!("cannot write '{}': {e}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Render a matrix in the dump format.
pub fn dump_operator(op: &Operator) -> String {
    let mat = op.matrix();
    let mut out = String::new();
    for i in 0..mat.nrows() {
        let row: Vec<String> = (0..mat.ncols()).map(|j| fmt_complex(mat[[i, j]])).collect();
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

/// Write one dump file next to the main output: `<output>.<suffix>.txt`.
pub fn write_dump(output: &Path, suffix: &str, op: &Operator) -> Result<(), String> {
    let mut name = output.as_os_str().to_owned();
    name.push(format!(".{suffix}.txt"));
    let path = Path::new(&name);
    std::fs::write(path, dump_operator(op))
        .map_err(|e| format!("cannot write dump '{}': {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use lossy_coupler::FockSpace;

    #[test]
    fn seventeen_digit_format_round_trips() {
        for v in [std::f64::consts::PI, 1.0 / 3.0, 2.0e-300, -7.25] {
            let parsed: f64 = fmt_f64(v).parse().unwrap();
            assert_eq!(parsed, v);
        }
    }

    #[test]
    fn complex_format_is_re_plus_im_j() {
        let s = fmt_complex(Complex64::new(1.5, -0.25));
        assert_eq!(s, "1.5000000000000000e0-2.5000000000000000e-1j");
        assert!(fmt_complex(Complex64::new(0.0, 2.0)).ends_with("+2.0000000000000000e0j"));
    }

    #[test]
    fn dump_shape() {
        let op = Operator::identity(FockSpace::new(1));
        let text = dump_operator(&op);
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].split('\t').count(), 4);
    }
}

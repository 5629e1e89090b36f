//! CSV emitters for the statistics artifacts. Column orders are part of the
//! interface and must not change.

use super::{poisson, wigner_goe, DeltaMinCurve, Histogram};
use crate::error::Result;
use std::io::Write;

/// `bin_left,bin_right,density` plus optional `goe,poisson` reference
/// columns evaluated at bin midpoints.
pub fn write_spacing_csv<W: Write>(w: &mut W, hist: &Histogram, references: bool) -> Result<()> {
    if references {
        writeln!(w, "bin_left,bin_right,density,goe,poisson")?;
    } else {
        writeln!(w, "bin_left,bin_right,density")?;
    }
    for i in 0..hist.num_bins() {
        let (l, r) = (hist.edges[i], hist.edges[i + 1]);
        if references {
            let mid = 0.5 * (l + r);
            writeln!(
                w,
                "{},{},{},{},{}",
                l,
                r,
                hist.densities[i],
                wigner_goe(mid),
                poisson(mid)
            )?;
        } else {
            writeln!(w, "{},{},{}", l, r, hist.densities[i])?;
        }
    }
    Ok(())
}

/// `N,delta_min` rows.
pub fn write_delta_min_csv<W: Write>(w: &mut W, curve: &DeltaMinCurve) -> Result<()> {
    writeln!(w, "N,delta_min")?;
    for (&n, &v) in curve.n.iter().zip(&curve.values) {
        writeln!(w, "{},{}", n, v)?;
    }
    Ok(())
}

/// One-line fit summary: `amplitude,exponent`.
pub fn write_power_law_csv<W: Write>(w: &mut W, amplitude: f64, exponent: f64) -> Result<()> {
    writeln!(w, "amplitude,exponent")?;
    writeln!(w, "{},{}", amplitude, exponent)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{spacing_histogram, unfold};

    #[test]
    fn spacing_csv_columns() {
        let u = unfold(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        let h = spacing_histogram(&u, Some(2)).unwrap();
        let mut buf = Vec::new();
        write_spacing_csv(&mut buf, &h, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "bin_left,bin_right,density,goe,poisson");
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn delta_min_csv_columns() {
        let curve = DeltaMinCurve {
            n: vec![10, 20],
            values: vec![0.5, 0.25],
        };
        let mut buf = Vec::new();
        write_delta_min_csv(&mut buf, &curve).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "N,delta_min\n10,0.5\n20,0.25\n");
    }
}

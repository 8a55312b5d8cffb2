//! Samples of the maxentropic peak-constrained input density.

use std::io::Write;

use vlcsec_core::{MaxentPdf, Result};

use crate::fmt::g12;

/// `n_points` equally spaced `(x, f(x))` pairs on `[0, A]`, endpoints included.
pub fn samples(alpha: f64, a: f64, n_points: usize) -> Result<Vec<(f64, f64)>> {
    if n_points < 2 {
        return Err(vlcsec_core::Error::InvalidParameter {
            field: "n_points",
            value: n_points as f64,
            reason: "must be >= 2",
        });
    }
    let pdf = MaxentPdf::new(alpha, a)?;
    let last = (n_points - 1) as f64;
    Ok((0..n_points)
        .map(|i| {
            let x = if i == n_points - 1 { a } else { a * i as f64 / last };
            (x, pdf.eval(x))
        })
        .collect())
}

pub fn write_csv<W: Write>(rows: &[(f64, f64)], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["x", "f"])?;
    for &(x, f) in rows {
        w.write_record([g12(x), g12(f)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_at_half() {
        let rows = samples(0.5, 1e6, 11).unwrap();
        assert!(rows.iter().all(|&(_, f)| f == 1e-6));
    }

    #[test]
    fn mirrored_shapes() {
        let lo = samples(0.3, 1e6, 101).unwrap();
        let hi = samples(0.7, 1e6, 101).unwrap();
        for (i, &(_, f)) in lo.iter().enumerate() {
            let g = hi[100 - i].1;
            assert!(((f - g) / f).abs() < 1e-10);
        }
        assert!(lo.windows(2).all(|w| w[1].1 < w[0].1));
        assert!(hi.windows(2).all(|w| w[1].1 > w[0].1));
    }

    #[test]
    fn two_points_are_endpoints() {
        let rows = samples(0.2, 5.0, 2).unwrap();
        assert_eq!((rows[0].0, rows[1].0), (0.0, 5.0));
        assert!(samples(0.2, 5.0, 1).is_err());
        assert!(samples(1.0, 5.0, 3).is_err());
    }
}

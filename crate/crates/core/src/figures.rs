//! Sweep tables behind the precision plots, written as CSV.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::counting::{ancilla_bound, standard_limit};
use crate::error::{invalid, Result};
use crate::resilience::{
    coherent_baseline, lossy_coherent_qfi, lossy_tmsv_qfi, qfi_ratio_db, tr_sensitivity_with_loss, LossyProtocolConfig,
};
use crate::squeezing::Squeezing;
use crate::su11;

/// Column-labelled table of doubles.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.headers.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Comma-separated, one header line, 17 significant digits per value.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.headers.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// `points` evenly spaced values from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && from < to) {
        return invalid("from", from, "sweep start must be finite and below its end");
    }
    if points < 2 {
        return invalid("points", points as f64, "a sweep needs at least two points");
    }
    let step = (to - from) / (points - 1) as f64;
    Ok((0..points)
        .map(|k| if k == points - 1 { to } else { from + step * k as f64 })
        .collect())
}

fn build<F>(headers: Vec<String>, xs: &[f64], row: F) -> Result<Table>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync,
{
    let rows = xs.par_iter().map(|&x| row(x)).collect::<Result<Vec<_>>>()?;
    Ok(Table { headers, rows })
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// Entangled-ancilla bound against the coherent standard limit. The dB
/// advantage is given as `10 log₁₀` of the `Δα` ratio, as `20 log₁₀` of it,
/// and as `10 log₁₀` of the Fisher-information ratio.
pub fn fig2(alpha: f64, nbars: &[f64]) -> Result<Table> {
    build(
        names(&[
            "nbar",
            "delta_alpha_qfi",
            "delta_alpha_sql",
            "advantage_db_amplitude",
            "advantage_db_power",
            "advantage_db_fisher",
        ]),
        nbars,
        |n| {
            let q = ancilla_bound(n, alpha)?;
            let s = standard_limit(n, alpha)?;
            let fisher_ratio = (n / (alpha * (1.0 - alpha))) / (n / (1.0 - alpha));
            Ok(vec![
                n,
                q,
                s,
                10.0 * (s / q).log10(),
                20.0 * (s / q).log10(),
                10.0 * fisher_ratio.log10(),
            ])
        },
    )
}

/// Entangled-ancilla bound against the time-reversal readout.
pub fn fig4(alpha: f64, nbars: &[f64]) -> Result<Table> {
    build(
        names(&["nbar", "delta_alpha_qfi", "delta_alpha_su11", "ratio"]),
        nbars,
        |n| {
            let q = ancilla_bound(n, alpha)?;
            let s = su11::sensitivity(Squeezing::from_nbar(n)?.r(), alpha)?;
            Ok(vec![n, q, s, s / q])
        },
    )
}

/// Squeezed-vacuum over coherent QFI as the impurity loss grows.
pub fn fig6(alpha: f64, nbar: f64, alpha0s: &[f64]) -> Result<Table> {
    build(
        names(&["alpha0", "qfi_tmsv", "qfi_coherent", "ratio_db"]),
        alpha0s,
        |a0| {
            let c = LossyProtocolConfig::new(nbar, alpha, a0, 0.0)?;
            Ok(vec![a0, lossy_tmsv_qfi(&c)?, lossy_coherent_qfi(&c)?, qfi_ratio_db(&c)?])
        },
    )
}

/// Header of the time-reversal column for impurity loss `a0`.
pub fn fig7_tr_header(a0: f64) -> String {
    format!("delta_alpha_tr_alpha0_{a0}")
}

/// Header of the coherent-baseline column for impurity loss `a0`.
pub fn fig7_coherent_header(a0: f64) -> String {
    format!("delta_alpha_coherent_alpha0_{a0}")
}

/// Time-reversal precision against source photons for each impurity loss,
/// each followed by the coherent baseline with the same impurity loss.
pub fn fig7(alpha: f64, alpha0s: &[f64], nbars: &[f64]) -> Result<Table> {
    if alpha0s.is_empty() {
        return invalid("alpha0", f64::NAN, "need at least one impurity loss value");
    }
    let mut headers = vec!["nbar".to_string()];
    for &a0 in alpha0s {
        headers.push(fig7_tr_header(a0));
        headers.push(fig7_coherent_header(a0));
    }
    build(headers, nbars, |n| {
        let mut row = vec![n];
        for &a0 in alpha0s {
            let c = LossyProtocolConfig::new(n, alpha, a0, 0.0)?;
            row.push(tr_sensitivity_with_loss(&c)?);
            row.push(coherent_baseline(&c)?);
        }
        Ok(row)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn linspace_endpoints_and_validation() {
        let xs = linspace(1.0, 25.0, 7).unwrap();
        assert_eq!(xs.len(), 7);
        assert_eq!((xs[0], xs[6]), (1.0, 25.0));
        assert!(linspace(2.0, 1.0, 5).is_err());
        assert!(linspace(1.0, 2.0, 1).is_err());
    }

    #[test]
    fn fig2_landmark_row() {
        let t = fig2(0.05, &[10.0, 20.0]).unwrap();
        assert_eq!(t.rows.len(), 2);
        let r = &t.rows[0];
        assert_relative_eq!(r[1], 0.068_920_243_760_451_1, max_relative = 1e-12);
        assert_relative_eq!(r[2], 0.308_220_700_148_448_8, max_relative = 1e-12);
        assert_relative_eq!(r[2] / r[1], 20f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(r[4], r[5], max_relative = 1e-12);
        assert!(r[3] > 5.0 && r[3] < 7.0);
    }

    #[test]
    fn fig4_schema_and_consistency() {
        let t = fig4(0.05, &[10.0]).unwrap();
        assert_eq!(t.to_csv().lines().next().unwrap(), "nbar,delta_alpha_qfi,delta_alpha_su11,ratio");
        let s = su11::sensitivity(Squeezing::from_nbar(10.0).unwrap().r(), 0.05).unwrap();
        assert_relative_eq!(t.rows[0][2], s, max_relative = 1e-14);
        let t = fig4(0.01, &linspace(1.0, 25.0, 25).unwrap()).unwrap();
        assert!(t.column("ratio").unwrap().iter().all(|r| (1.0..=1.1).contains(r)));
    }

    #[test]
    fn fig6_endpoints() {
        let t = fig6(0.05, 25.0, &[0.0, 0.25]).unwrap();
        assert!((t.rows[0][3] - 13.0103).abs() < 1e-3);
        assert!(t.rows[1][3] > 2.99);
    }

    #[test]
    fn fig7_reduces_to_fig4() {
        let ns = linspace(5.0, 25.0, 5).unwrap();
        let t = fig7(0.05, &[0.0, 0.05], &ns).unwrap();
        assert_eq!(t.headers.len(), 5);
        let f4 = fig4(0.05, &ns).unwrap().column("delta_alpha_su11").unwrap();
        let tr0 = t.column(&fig7_tr_header(0.0)).unwrap();
        for (a, b) in tr0.iter().zip(&f4) {
            assert!((a - b).abs() / b < 1e-6);
        }
        let tr = t.column(&fig7_tr_header(0.05)).unwrap();
        let coh = t.column(&fig7_coherent_header(0.05)).unwrap();
        assert!(tr.iter().zip(&coh).all(|(a, b)| a < b && a.is_finite() && *a > 0.0));
        assert!(fig7(0.05, &[], &ns).is_err());
    }

    #[test]
    fn csv_format() {
        let t = Table {
            headers: names(&["a", "b"]),
            rows: vec![vec![0.1, -2.0]],
        };
        let s = t.to_csv();
        assert_eq!(s, "a,b\n1.0000000000000001e-1,-2.0000000000000000e0\n");
        let parsed: f64 = s.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
        assert_eq!(parsed, 0.1);
    }

    #[test]
    fn rows_follow_sweep_order() {
        let ns = linspace(0.5, 25.0, 40).unwrap();
        let t = fig4(0.05, &ns).unwrap();
        assert_eq!(t.column("nbar").unwrap(), ns);
        assert_eq!(t, fig4(0.05, &ns).unwrap());
    }

    #[test]
    fn invalid_parameters_propagate() {
        assert!(fig2(1.5, &[1.0]).is_err());
        assert!(fig4(0.05, &[-1.0]).is_err());
        assert!(fig6(0.05, 25.0, &[1.5]).is_err());
    }
}

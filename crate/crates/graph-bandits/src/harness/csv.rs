//! Regret-curve CSV emission.
//!
//! The format is pinned: UTF-8, LF line endings, the exact header
//! `t,regret_mean,regret_std,runs`, one newline-terminated row per
//! checkpoint, floats in decimal notation with 6 significant digits.

use std::fs;
use std::io;
use std::path::Path;

use super::runner::AggregateTrace;

/// Renders `x >= 0` in plain decimal with six significant digits.
pub fn format_sig6(x: f64) -> String {
    assert!(x.is_finite(), "CSV values must be finite");
    if x == 0.0 {
        return "0.00000".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn render_csv(trace: &AggregateTrace) -> String {
    let mut out = String::from("t,regret_mean,regret_std,runs\n");
    for cp in &trace.checkpoints {
        out.push_str(&format!(
            "{},{},{},{}\n",
            cp.t,
            format_sig6(cp.regret_mean),
            format_sig6(cp.regret_std),
            cp.runs
        ));
    }
    out
}

pub fn write_csv(trace: &AggregateTrace, path: &Path) -> io::Result<()> {
    fs::write(path, render_csv(trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::runner::CheckpointStat;

    fn trace_with(checkpoints: Vec<CheckpointStat>) -> AggregateTrace {
        AggregateTrace {
            horizon: 100,
            checkpoints,
            seeds: vec![1],
            branch_stats: vec![],
            config_digest: 0,
        }
    }

    #[test]
    fn single_checkpoint_formats_exactly() {
        let trace = trace_with(vec![CheckpointStat {
            t: 100,
            regret_mean: 12.5,
            regret_std: 0.0,
            runs: 1,
        }]);
        assert_eq!(
            render_csv(&trace),
            "t,regret_mean,regret_std,runs\n100,12.5000,0.00000,1\n"
        );
    }

    #[test]
    fn empty_checkpoints_leave_only_the_header() {
        assert_eq!(render_csv(&trace_with(vec![])), "t,regret_mean,regret_std,runs\n");
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_sig6(0.0), "0.00000");
        assert_eq!(format_sig6(12.5), "12.5000");
        assert_eq!(format_sig6(1666.6666666), "1666.67");
        assert_eq!(format_sig6(0.001234567), "0.00123457");
        assert_eq!(format_sig6(123456.4), "123456");
        assert_eq!(format_sig6(1.0), "1.00000");
    }

    #[test]
    fn round_trip_preserves_six_digits() {
        let values = [0.0, 12.5, 1666.6666666, 0.001234567, 98765.43];
        let trace = trace_with(
            values
                .iter()
                .map(|&v| CheckpointStat {
                    t: 10,
                    regret_mean: v,
                    regret_std: v / 3.0,
                    runs: 2,
                })
                .collect(),
        );
        let text = render_csv(&trace);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,regret_mean,regret_std,runs"));
        for (line, &v) in lines.zip(&values) {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 4);
            let mean: f64 = fields[1].parse().unwrap();
            let std: f64 = fields[2].parse().unwrap();
            let tol = |x: f64| 10f64.powf(x.abs().log10().floor() - 5.0).max(1e-12);
            assert!((mean - v).abs() <= tol(v.max(1e-12)) + 1e-12, "{mean} vs {v}");
            let s = v / 3.0;
            assert!((std - s).abs() <= tol(s.max(1e-12)) + 1e-12, "{std} vs {s}");
        }
    }
}

//! Machine-readable run records and their stable text renderings.
//!
//! Reports are byte-reproducible from the seed alone: every trial carries
//! its full spectral draw, collections preserve trial order, and floats
//! render with 17 significant digits.

use crate::scalar::Rational;

/// Scalar backend a run executed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Approx,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Approx => "approx",
        })
    }
}

/// Where the coefficient matrices of a trial came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SSource {
    ClosedForm,
    Solved,
}

impl std::fmt::Display for SSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SSource::ClosedForm => "closed-form",
            SSource::Solved => "solved",
        })
    }
}

/// The full spectral draw of one trial.
#[derive(Clone, Debug, PartialEq)]
pub enum Draw {
    Exact { half_angle_tangents: Vec<Rational> },
    Approx { k: f64, lambdas: Vec<f64> },
}

/// What one trial concluded.
#[derive(Clone, Debug, PartialEq)]
pub enum TrialOutcome {
    /// Exact-backend equality of the two assembled sides.
    ExactEquality { equal: bool },
    /// Float-backend residuals: the two-side difference (absolute), the
    /// relation residual over all four triples (relative to the product
    /// scale), and the smallest observed column rank.
    Residual {
        tetra_abs: f64,
        algebra_rel_max: f64,
        min_rank: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    /// Trial index; for surveys, the index within one modulus value.
    pub trial: u64,
    pub draw: Draw,
    pub source: SSource,
    pub outcome: TrialOutcome,
}

/// Aggregated outcome of a multi-trial run.
#[derive(Clone, Debug)]
pub struct TetraReport {
    pub mode: Mode,
    pub seed: u64,
    pub trials: u64,
    pub records: Vec<TrialRecord>,
    /// Trials whose checked quantity breached its threshold (exact
    /// inequality, or a relation-control breach at full rank).
    pub failures: usize,
    /// Largest residual over all float-backend records.
    pub max_residual: f64,
    /// Wall time; the one field excluded from reproducibility comparisons.
    pub wall_ms: f64,
}

impl TetraReport {
    /// Equality of everything except wall time.
    pub fn deterministic_eq(&self, other: &TetraReport) -> bool {
        self.mode == other.mode
            && self.seed == other.seed
            && self.trials == other.trials
            && self.failures == other.failures
            && self.max_residual == other.max_residual
            && self.records == other.records
    }
}

/// Renders a float with 17 significant digits, enough to reproduce the
/// double exactly.
pub fn fmt_f64_17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders a rational as `numerator/denominator`, losslessly.
pub fn fmt_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Header of the survey CSV schema.
pub const SURVEY_CSV_HEADER: &str =
    "k,trial,seed,lambda1,lambda2,lambda3,lambda4,eq1_max_residual,tetra_residual,rank_flag";

/// Renders survey records as CSV rows under [`SURVEY_CSV_HEADER`].
///
/// Only float-backend records with residual outcomes are rendered; the
/// `rank_flag` column carries the smallest column rank observed among the
/// four triples of the row (8 = full).
pub fn survey_csv(report: &TetraReport) -> String {
    let mut out = String::from(SURVEY_CSV_HEADER);
    out.push('\n');
    for rec in &report.records {
        let (Draw::Approx { k, lambdas }, TrialOutcome::Residual { tetra_abs, algebra_rel_max, min_rank }) =
            (&rec.draw, &rec.outcome)
        else {
            continue;
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            fmt_f64_17(*k),
            rec.trial,
            report.seed,
            fmt_f64_17(lambdas[0]),
            fmt_f64_17(lambdas[1]),
            fmt_f64_17(lambdas[2]),
            fmt_f64_17(lambdas[3]),
            fmt_f64_17(*algebra_rel_max),
            fmt_f64_17(*tetra_abs),
            min_rank,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn float_rendering_is_17_digits() {
        assert_eq!(fmt_f64_17(0.3), "2.9999999999999999e-1");
        assert_eq!(fmt_f64_17(1.0), "1.0000000000000000e0");
        let x = 1.0 / 3.0;
        assert_eq!(fmt_f64_17(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn rational_rendering_is_lossless() {
        assert_eq!(fmt_rational(&ratio(-22, 8)), "-11/4");
    }

    #[test]
    fn survey_csv_has_stable_schema() {
        let report = TetraReport {
            mode: Mode::Approx,
            seed: 5,
            trials: 1,
            records: vec![TrialRecord {
                trial: 0,
                draw: Draw::Approx {
                    k: 0.3,
                    lambdas: vec![0.1, 0.2, 0.3, 0.4],
                },
                source: SSource::Solved,
                outcome: TrialOutcome::Residual {
                    tetra_abs: 1e-13,
                    algebra_rel_max: 2e-15,
                    min_rank: 8,
                },
            }],
            failures: 0,
            max_residual: 1e-13,
            wall_ms: 1.0,
        };
        let csv = survey_csv(&report);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), SURVEY_CSV_HEADER);
        let row = lines.next().unwrap();
        assert!(row.starts_with("2.9999999999999999e-1,0,5,"));
        assert!(row.ends_with(",8"));
    }
}

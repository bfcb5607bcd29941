//! Assembly and testing of the tetrahedron relation
//!
//! ```text
//! S_123 S_124 S_134 S_234 = S_234 S_134 S_124 S_123
//! ```
//!
//! in the 64-dimensional product of the six edge spaces. Edges are ordered
//! lexicographically and mapped to tensor slots 1..6 once, globally; the
//! residual is invariant under any consistent reordering, so one canonical
//! order suffices.

use rayon::prelude::*;

use crate::error::CoreError;
use crate::linalg::Matrix;
use crate::report::{Draw, Mode, SSource, TetraReport, TrialOutcome, TrialRecord};
use crate::rmatrix::{EllipticConfig, ExactConfig};
use crate::sample::{sample_half_angle_tangents, sample_lambdas, trial_rng};
use crate::scalar::{Rational, Scalar};
use crate::smatrix::{
    s_for_triple_exact, solve_s, verify_algebra, SMatrix, SolveDiagnostics, TripleR,
};

/// Relation residuals in survey rows must stay under this (relative to the
/// largest product entry) for the run to count as healthy.
pub const ALGEBRA_CONTROL_TOL: f64 = 1e-10;

/// The six edges of four lines, in the fixed lexicographic slot order.
pub const EDGES: [(usize, usize); 6] = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];

/// The four line triples, in the order they appear in the relation.
pub const TRIPLES: [(usize, usize, usize); 4] = [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)];

/// Tensor slot (1-based) of edge `(i, j)`, `i < j`.
pub fn edge_slot(i: usize, j: usize) -> usize {
    EDGES
        .iter()
        .position(|&e| e == (i, j))
        .map(|p| p + 1)
        .unwrap_or_else(|| panic!("({i},{j}) is not an edge of lines 1..4"))
}

/// Slots of the three edges a triple acts on.
pub fn triple_slots((i, j, k): (usize, usize, usize)) -> [usize; 3] {
    [edge_slot(i, j), edge_slot(i, k), edge_slot(j, k)]
}

/// Embeds a triple's coefficient matrix into the six-edge space.
pub fn embed_s<T: Scalar>(s: &SMatrix<T>) -> Matrix<T> {
    s.body.embed_sites(&triple_slots(s.lines), 6)
}

/// Multiplies the four embedded coefficient matrices, in the written order
/// or reversed. `ss` must be in [`TRIPLES`] order.
pub fn assemble_side<T: Scalar>(ss: &[SMatrix<T>; 4], reversed: bool) -> Matrix<T> {
    for (s, &t) in ss.iter().zip(TRIPLES.iter()) {
        assert_eq!(s.lines, t, "coefficient matrices must be in triple order");
    }
    let embedded: Vec<Matrix<T>> = ss.iter().map(embed_s).collect();
    let order: Vec<usize> = if reversed {
        (0..4).rev().collect()
    } else {
        (0..4).collect()
    };
    let mut acc = embedded[order[0]].clone();
    for &idx in &order[1..] {
        acc = acc.mat_mul(&embedded[idx]);
    }
    acc
}

/// Both sides of the relation.
pub fn tetra_sides<T: Scalar>(ss: &[SMatrix<T>; 4]) -> (Matrix<T>, Matrix<T>) {
    (assemble_side(ss, false), assemble_side(ss, true))
}

fn four_smatrices_exact(config: &ExactConfig) -> Result<[SMatrix<Rational>; 4], CoreError> {
    Ok([
        s_for_triple_exact(config, TRIPLES[0])?,
        s_for_triple_exact(config, TRIPLES[1])?,
        s_for_triple_exact(config, TRIPLES[2])?,
        s_for_triple_exact(config, TRIPLES[3])?,
    ])
}

/// Exact-backend trial: closed-form coefficient matrices at modulus zero;
/// returns whether the two sides are identical rational matrices.
pub fn tetra_trial_exact(config: &ExactConfig) -> Result<bool, CoreError> {
    if config.lines() < 4 {
        return Err(CoreError::WrongLineCount {
            expected: 4,
            got: config.lines(),
        });
    }
    let ss = four_smatrices_exact(config)?;
    let (left, right) = tetra_sides(&ss);
    Ok(left == right)
}

/// Float-backend trial with closed-form coefficient matrices at modulus
/// zero; returns the max-abs difference of the two sides.
pub fn tetra_trial_closed_f64(lambdas: &[f64]) -> Result<f64, CoreError> {
    if lambdas.len() < 4 {
        return Err(CoreError::WrongLineCount {
            expected: 4,
            got: lambdas.len(),
        });
    }
    let mut ss = Vec::with_capacity(4);
    for &t in &TRIPLES {
        ss.push(crate::smatrix::s_for_triple_closed_f64(lambdas, t)?);
    }
    let ss: [SMatrix<f64>; 4] = ss.try_into().expect("four triples");
    let (left, right) = tetra_sides(&ss);
    Ok(left.sub(&right).max_abs_f64())
}

/// Outcome of a solver-sourced float trial.
#[derive(Clone, Debug)]
pub struct SolvedTetra {
    /// Max-abs difference of the two assembled sides.
    pub tetra_abs: f64,
    /// Largest relation residual among the four triples, relative to the
    /// product scale (the control quantity).
    pub algebra_rel_max: f64,
    /// Smallest column rank among the four 64x8 systems.
    pub min_rank: usize,
    /// True when all 32 rows solved uniquely.
    pub all_unique: bool,
    pub diagnostics: [SolveDiagnostics; 4],
}

/// Float-backend trial: solve all four coefficient matrices at the config's
/// modulus, check the relation residual for each, assemble both sides.
pub fn tetra_trial_solved(
    config: &EllipticConfig,
    rel_tol: f64,
) -> Result<SolvedTetra, CoreError> {
    if config.lines() < 4 {
        return Err(CoreError::WrongLineCount {
            expected: 4,
            got: config.lines(),
        });
    }
    let mut ss = Vec::with_capacity(4);
    let mut diags = Vec::with_capacity(4);
    let mut algebra_rel_max = 0.0f64;
    let mut min_rank = usize::MAX;
    let mut all_unique = true;
    for &t in &TRIPLES {
        let triple_r = TripleR::approx(config, t)?;
        let (s, diag) = solve_s(&triple_r, rel_tol)?;
        let check = verify_algebra(&triple_r, &s);
        algebra_rel_max = algebra_rel_max.max(check.relative());
        min_rank = min_rank.min(diag.column_rank);
        all_unique &= diag.all_unique();
        ss.push(s);
        diags.push(diag);
    }
    let ss: [SMatrix<f64>; 4] = ss.try_into().expect("four triples");
    let (left, right) = tetra_sides(&ss);
    Ok(SolvedTetra {
        tetra_abs: left.sub(&right).max_abs_f64(),
        algebra_rel_max,
        min_rank,
        all_unique,
        diagnostics: diags.try_into().expect("four triples"),
    })
}

/// Randomized exact identity test at modulus zero.
///
/// Draws `trials` tuples of four half-angle tangents with numerator and
/// denominator bounded by `bound`, builds the closed-form coefficient
/// matrices, and requires the two sides to be identical rational matrices.
/// Trials run in parallel; each derives its own generator stream from
/// `(seed, trial)`, so reports are identical however they are scheduled.
pub fn identity_test(trials: u64, seed: u64, bound: i64) -> Result<TetraReport, CoreError> {
    if trials == 0 {
        return Err(CoreError::ZeroTrials);
    }
    let start = std::time::Instant::now();
    let results: Vec<Result<TrialRecord, CoreError>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let ts = sample_half_angle_tangents(&mut rng, bound, 4)?;
            let config = ExactConfig::from_half_angle_tangents(ts.clone());
            let equal = tetra_trial_exact(&config)?;
            Ok(TrialRecord {
                trial,
                draw: Draw::Exact {
                    half_angle_tangents: ts,
                },
                source: SSource::ClosedForm,
                outcome: TrialOutcome::ExactEquality { equal },
            })
        })
        .collect();
    let mut records = Vec::with_capacity(results.len());
    for r in results {
        records.push(r?);
    }
    let failures = records
        .iter()
        .filter(|r| matches!(r.outcome, TrialOutcome::ExactEquality { equal: false }))
        .count();
    Ok(TetraReport {
        mode: Mode::Exact,
        seed,
        trials,
        records,
        failures,
        max_residual: 0.0,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Residual survey over a modulus grid.
///
/// Per `(k, trial)`: draw four real line parameters, solve all four
/// coefficient matrices, record the relation residual (the control; breaches
/// at full rank count as failures) and the two-side difference (the finding;
/// recorded verbatim, never interpreted as pass or fail).
pub fn elliptic_survey(
    ks: &[f64],
    trials_per_k: u64,
    seed: u64,
    rel_tol: f64,
) -> Result<TetraReport, CoreError> {
    if ks.is_empty() {
        return Err(CoreError::EmptyGrid);
    }
    if trials_per_k == 0 {
        return Err(CoreError::ZeroTrials);
    }
    for &k in ks {
        if !(0.0..1.0).contains(&k) || !k.is_finite() {
            return Err(CoreError::InvalidModulus(k));
        }
    }
    let start = std::time::Instant::now();
    let jobs: Vec<(usize, u64)> = (0..ks.len())
        .flat_map(|ki| (0..trials_per_k).map(move |t| (ki, t)))
        .collect();
    let results: Vec<Result<TrialRecord, CoreError>> = jobs
        .par_iter()
        .map(|&(ki, trial)| {
            let k = ks[ki];
            let mut rng = trial_rng(seed, (ki as u64) * trials_per_k + trial);
            let lambdas = sample_lambdas(&mut rng, 4)?;
            let config = EllipticConfig {
                k,
                lambdas: lambdas.clone(),
            };
            let solved = tetra_trial_solved(&config, rel_tol)?;
            Ok(TrialRecord {
                trial,
                draw: Draw::Approx { k, lambdas },
                source: SSource::Solved,
                outcome: TrialOutcome::Residual {
                    tetra_abs: solved.tetra_abs,
                    algebra_rel_max: solved.algebra_rel_max,
                    min_rank: solved.min_rank,
                },
            })
        })
        .collect();
    let mut records = Vec::with_capacity(results.len());
    for r in results {
        records.push(r?);
    }
    let mut failures = 0usize;
    let mut max_residual = 0.0f64;
    for rec in &records {
        if let TrialOutcome::Residual {
            tetra_abs,
            algebra_rel_max,
            min_rank,
        } = rec.outcome
        {
            max_residual = max_residual.max(tetra_abs).max(algebra_rel_max);
            // the control only binds where the solve is well-posed
            if min_rank == 8 && algebra_rel_max > ALGEBRA_CONTROL_TOL {
                failures += 1;
            }
        }
    }
    Ok(TetraReport {
        mode: Mode::Approx,
        seed,
        trials: trials_per_k,
        records,
        failures,
        max_residual,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Flips every coefficient matrix to its transpose; transposing all four
/// and swapping the side order reproduces the same residual, which is the
/// orientation-robustness check.
pub fn transpose_all<T: Scalar>(ss: &[SMatrix<T>; 4]) -> [SMatrix<T>; 4] {
    let mk = |idx: usize| SMatrix {
        lines: ss[idx].lines,
        body: ss[idx].body.transpose(),
    };
    [mk(0), mk(1), mk(2), mk(3)]
}

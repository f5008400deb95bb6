//! Randomized search for violations of a catalog inequality.
//!
//! Candidate pairs are drawn from a configurable generator, each trial on its
//! own RNG stream (`f(seed, trial)`), so a run is reproducible bit for bit
//! regardless of how trials are scheduled across threads. The worst margin
//! over all trials and admissible indices wins; optional hill climbing then
//! perturbs one entry at a time, keeping a step only when the margin strictly
//! increases.
//!
//! A returned `found = true` always means the final `(a, b, index)` re-checks
//! to `holds = false` through the ordinary catalog path; the report in the
//! result is exactly that check.

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{
    check, check_all, max_index, CatalogError, CheckReport, InequalityId, TolerancePolicy,
};
use crate::matrix::{Field, MatrixError, MatrixF, MatrixPair};
use crate::stream::stream_rng;
use num_complex::Complex64;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Families of random candidate matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// i.i.d. standard normal entries.
    DenseGaussian,
    /// standard normal diagonal, zero elsewhere.
    DiagonalGaussian,
    /// uniform integer diagonal in [-3, 3], zero elsewhere.
    DiagonalInteger,
}

impl GeneratorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorKind::DenseGaussian => "dense_gaussian",
            GeneratorKind::DiagonalGaussian => "diagonal_gaussian",
            GeneratorKind::DiagonalInteger => "diagonal_integer",
        }
    }
}

impl std::str::FromStr for GeneratorKind {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, SearchError> {
        match s {
            "dense_gaussian" => Ok(GeneratorKind::DenseGaussian),
            "diagonal_gaussian" => Ok(GeneratorKind::DiagonalGaussian),
            "diagonal_integer" => Ok(GeneratorKind::DiagonalInteger),
            other => Err(SearchError::InvalidConfig(format!(
                "unknown generator {other:?}"
            ))),
        }
    }
}

/// Which indices of the inequality each candidate pair is scored on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexPolicy {
    /// Scan every admissible index and keep the worst margin.
    All,
    /// Evaluate a single fixed 1-based index.
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    pub inequality: InequalityId,
    pub rows: usize,
    pub cols: usize,
    pub field: Field,
    pub generator: GeneratorKind,
    pub trials: u64,
    pub seed: u64,
    pub refine_steps: u64,
    pub index_policy: IndexPolicy,
}

/// Best violation (or near-violation) found by a search run.
///
/// `found` iff `best_report.holds == false`; re-running the catalog check on
/// `(a, b, best_report.index)` reproduces `best_report` exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub found: bool,
    pub best_report: CheckReport,
    pub a: MatrixF,
    pub b: MatrixF,
    pub trials_used: u64,
    pub seed: u64,
}

impl SearchResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("result serialization cannot fail")
    }
}

/// Draw one matrix from a generator family.
pub fn generate(
    kind: GeneratorKind,
    rows: usize,
    cols: usize,
    field: Field,
    rng: &mut impl Rng,
) -> MatrixF {
    let mut data = vec![Complex64::new(0.0, 0.0); rows * cols];
    let draw = |rng: &mut dyn FnMut() -> f64| -> Complex64 {
        let re = rng();
        let im = if field == Field::Complex { rng() } else { 0.0 };
        Complex64::new(re, im)
    };
    match kind {
        GeneratorKind::DenseGaussian => {
            let mut sample = || rng.sample::<f64, _>(StandardNormal);
            for slot in data.iter_mut() {
                *slot = draw(&mut sample);
            }
        }
        GeneratorKind::DiagonalGaussian => {
            let mut sample = || rng.sample::<f64, _>(StandardNormal);
            for i in 0..rows.min(cols) {
                data[i * cols + i] = draw(&mut sample);
            }
        }
        GeneratorKind::DiagonalInteger => {
            let mut sample = || rng.random_range(-3i64..=3) as f64;
            for i in 0..rows.min(cols) {
                data[i * cols + i] = draw(&mut sample);
            }
        }
    }
    MatrixF::new(rows, cols, field, data).expect("generated entries are finite")
}

fn validate(cfg: &SearchConfig) -> Result<(), SearchError> {
    if cfg.rows == 0 || cfg.cols == 0 {
        return Err(SearchError::InvalidConfig(format!(
            "dimensions must be positive, got {}x{}",
            cfg.rows, cfg.cols
        )));
    }
    if cfg.trials == 0 {
        return Err(SearchError::InvalidConfig("trials must be positive".into()));
    }
    if cfg.inequality.entry().shape_rule == crate::catalog::ShapeRule::SquareOnly
        && cfg.rows != cfg.cols
    {
        return Err(SearchError::InvalidConfig(format!(
            "{} is stated for square matrices only, got {}x{}",
            cfg.inequality, cfg.rows, cfg.cols
        )));
    }
    if let IndexPolicy::Fixed(i) = cfg.index_policy {
        let max = max_index(cfg.inequality, cfg.rows.min(cfg.cols));
        if i == 0 || i > max {
            return Err(SearchError::InvalidConfig(format!(
                "fixed index {i} out of range 1..={max} for {}",
                cfg.inequality
            )));
        }
    }
    Ok(())
}

fn draw_pair(cfg: &SearchConfig, stream: u64) -> MatrixPair {
    let mut rng = stream_rng(cfg.seed, stream);
    let a = generate(cfg.generator, cfg.rows, cfg.cols, cfg.field, &mut rng);
    let b = generate(cfg.generator, cfg.rows, cfg.cols, cfg.field, &mut rng);
    MatrixPair::new(a, b).expect("generated pair shares shape and field")
}

/// Worst (index, margin) of a pair under the config's index policy; ties go
/// to the lowest index.
fn score_pair(
    cfg: &SearchConfig,
    pair: &MatrixPair,
    policy: &TolerancePolicy,
) -> Result<(usize, f64), SearchError> {
    match cfg.index_policy {
        IndexPolicy::Fixed(i) => {
            let r = check(cfg.inequality, pair, i, policy)?;
            Ok((i, r.margin))
        }
        IndexPolicy::All => {
            let reports = check_all(cfg.inequality, pair, policy)?;
            let mut best = (reports[0].index, reports[0].margin);
            for r in &reports[1..] {
                if r.margin > best.1 {
                    best = (r.index, r.margin);
                }
            }
            Ok(best)
        }
    }
}

struct TrialScore {
    trial: u64,
    index: usize,
    margin: f64,
}

/// Run a search to completion. Deterministic for a fixed config, including
/// across thread counts.
pub fn search(cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    validate(cfg)?;
    let policy = TolerancePolicy::default();

    let scores: Vec<TrialScore> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let pair = draw_pair(cfg, trial);
            score_pair(cfg, &pair, &policy).map(|(index, margin)| TrialScore {
                trial,
                index,
                margin,
            })
        })
        .collect::<Result<_, _>>()?;

    // max margin; ties resolve to the earliest trial (scores are in order)
    let mut best = &scores[0];
    for s in &scores[1..] {
        if s.margin > best.margin {
            best = s;
        }
    }

    let mut pair = draw_pair(cfg, best.trial);
    let mut best_index = best.index;
    let mut best_margin = best.margin;

    if cfg.refine_steps > 0 {
        // the refinement stream sits just past the trial streams
        let mut rng = stream_rng(cfg.seed, cfg.trials);
        for _ in 0..cfg.refine_steps {
            let candidate = perturb(&pair, cfg.field, &mut rng)?;
            let (idx, margin) = score_pair(cfg, &candidate, &policy)?;
            if margin > best_margin {
                pair = candidate;
                best_index = idx;
                best_margin = margin;
            }
        }
    }

    let best_report = check(cfg.inequality, &pair, best_index, &policy)?;
    debug_assert_eq!(best_report.margin, best_margin);
    Ok(SearchResult {
        found: !best_report.holds,
        best_report,
        a: pair.a().clone(),
        b: pair.b().clone(),
        trials_used: cfg.trials,
        seed: cfg.seed,
    })
}

/// One hill-climbing step: nudge a single entry of A or B by a step of scale
/// 0.1 * (1 + |entry|).
fn perturb(
    pair: &MatrixPair,
    field: Field,
    rng: &mut impl Rng,
) -> Result<MatrixPair, SearchError> {
    let cells = pair.rows() * pair.cols();
    let coord = rng.random_range(0..2 * cells);
    let (target_b, idx) = (coord >= cells, coord % cells);

    let source = if target_b { pair.b() } else { pair.a() };
    let mut data = source.data().to_vec();
    let entry = data[idx];
    let std = 0.1 * (1.0 + entry.norm());
    let normal = Normal::new(0.0, std).expect("std is positive and finite");
    let d_re = normal.sample(rng);
    let d_im = if field == Field::Complex {
        normal.sample(rng)
    } else {
        0.0
    };
    data[idx] = entry + Complex64::new(d_re, d_im);

    let replaced = MatrixF::new(source.rows(), source.cols(), field, data)?;
    let (a, b) = if target_b {
        (pair.a().clone(), replaced)
    } else {
        (replaced, pair.b().clone())
    };
    Ok(MatrixPair::new(a, b)?)
}

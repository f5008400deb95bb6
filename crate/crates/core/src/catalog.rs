//! The inequality catalog.
//!
//! Six statements about σ(A+B) are tracked: three published lower bounds that
//! are false in general (`g3b_sum`, `g3b_k1`, `thm813`) and three proven ones
//! (`pointwise_corrected`, `sum_corrected`, `tight_sum`). Claimed-false
//! entries are evaluated exactly like proven ones; the status field records
//! their standing but never suppresses a check, since exhibiting violations
//! numerically is the point.
//!
//! A bound "holds" on an instance when `lhs >= rhs - tol` with
//! `tol = atol + rtol * (||A||_F + ||B||_F)`; the margin `rhs - lhs`
//! quantifies a violation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::matrix::MatrixPair;
use crate::spectrum::{
    abs_diff_spectrum, singular_values, sort_desc_stable, SingularSpectrum, SpectrumError,
};

/// Identifier of a catalog entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InequalityId {
    G3bSum,
    G3bK1,
    Thm813,
    PointwiseCorrected,
    SumCorrected,
    TightSum,
}

impl InequalityId {
    pub const ALL: [InequalityId; 6] = [
        InequalityId::G3bSum,
        InequalityId::G3bK1,
        InequalityId::Thm813,
        InequalityId::PointwiseCorrected,
        InequalityId::SumCorrected,
        InequalityId::TightSum,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InequalityId::G3bSum => "g3b_sum",
            InequalityId::G3bK1 => "g3b_k1",
            InequalityId::Thm813 => "thm813",
            InequalityId::PointwiseCorrected => "pointwise_corrected",
            InequalityId::SumCorrected => "sum_corrected",
            InequalityId::TightSum => "tight_sum",
        }
    }

    pub fn entry(self) -> &'static InequalityEntry {
        &CATALOG[InequalityId::ALL.iter().position(|&id| id == self).unwrap()]
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InequalityId {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, CatalogError> {
        InequalityId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| CatalogError::UnknownInequality(s.to_string()))
    }
}

impl Serialize for InequalityId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    ClaimedFalse,
    Proven,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexMode {
    PerIndex,
    PrefixSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeRule {
    SquareOnly,
    SameShape,
}

/// One catalog record.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityEntry {
    pub id: InequalityId,
    pub status: Status,
    pub index_mode: IndexMode,
    pub shape_rule: ShapeRule,
    pub description: &'static str,
}

static CATALOG: [InequalityEntry; 6] = [
    InequalityEntry {
        id: InequalityId::G3bSum,
        status: Status::ClaimedFalse,
        index_mode: IndexMode::PrefixSum,
        shape_rule: ShapeRule::SquareOnly,
        description: "claimed: sum_{i<=k} sigma_i(A+B) >= sum_{i<=k} sigma_i(A) - sum_{i<=k} sigma_{n-i+1}(B) for n x n A, B (Marshall & Olkin, G.3.b p. 334; false in general)",
    },
    InequalityEntry {
        id: InequalityId::G3bK1,
        status: Status::ClaimedFalse,
        index_mode: IndexMode::PerIndex,
        shape_rule: ShapeRule::SquareOnly,
        description: "claimed: sigma_1(A+B) >= sigma_1(A) - sigma_n(B) for n x n A, B (k=1 case of g3b_sum; false in general)",
    },
    InequalityEntry {
        id: InequalityId::Thm813,
        status: Status::ClaimedFalse,
        index_mode: IndexMode::PerIndex,
        shape_rule: ShapeRule::SquareOnly,
        description: "claimed: sigma_i(A+B) >= sigma_i(A) + sigma_n(B) for n x n A, B, all i in 1..=n (Zhang, Theorem 8.13; false in general)",
    },
    InequalityEntry {
        id: InequalityId::PointwiseCorrected,
        status: Status::Proven,
        index_mode: IndexMode::PerIndex,
        shape_rule: ShapeRule::SameShape,
        description: "proven: sigma_i(A+B) >= sigma_i(A) - sigma_1(B) (Horn & Johnson, Theorem 3.3.16(c))",
    },
    InequalityEntry {
        id: InequalityId::SumCorrected,
        status: Status::Proven,
        index_mode: IndexMode::PrefixSum,
        shape_rule: ShapeRule::SameShape,
        description: "proven: sum_{i<=k} sigma_i(A+B) >= sum_{i<=k} sigma_i(A) - sum_{i<=k} sigma_i(B)",
    },
    InequalityEntry {
        id: InequalityId::TightSum,
        status: Status::Proven,
        index_mode: IndexMode::PrefixSum,
        shape_rule: ShapeRule::SameShape,
        description: "proven: sum_{i<=k} sigma_i(A+B) >= sum of the k largest |sigma_i(A) - sigma_i(B)| (via Horn & Johnson, Theorem 3.4.5)",
    },
];

/// The six entries in stable order.
pub fn catalog_list() -> &'static [InequalityEntry] {
    &CATALOG
}

/// Scale-aware slack for floating-point verdicts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerancePolicy {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            atol: 1e-10,
            rtol: 1e-9,
        }
    }
}

impl TolerancePolicy {
    pub fn tolerance(&self, pair: &MatrixPair) -> f64 {
        self.atol + self.rtol * (pair.a().frobenius_norm() + pair.b().frobenius_norm())
    }
}

/// Outcome of evaluating one inequality at one index.
///
/// Invariant: `holds` iff `lhs >= rhs - tol`, and `margin = rhs - lhs`, so a
/// margin beyond the tolerance means the claimed bound failed on this input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub ineq: String,
    pub index: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tol: f64,
    pub holds: bool,
}

impl CheckReport {
    fn build(ineq: &str, index: usize, lhs: f64, rhs: f64, tol: f64) -> CheckReport {
        CheckReport {
            ineq: ineq.to_string(),
            index,
            lhs,
            rhs,
            margin: rhs - lhs,
            tol,
            holds: lhs >= rhs - tol,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown inequality {0:?}")]
    UnknownInequality(String),
    #[error("{id} is stated for square matrices only, got {rows}x{cols}")]
    RequiresSquare {
        id: InequalityId,
        rows: usize,
        cols: usize,
    },
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("subset enumeration over {len} values is too large")]
    EnumerationTooLarge { len: usize },
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

struct PairSpectra {
    sa: SingularSpectrum,
    sb: SingularSpectrum,
    sab: SingularSpectrum,
}

impl PairSpectra {
    fn compute(pair: &MatrixPair) -> Result<Self, CatalogError> {
        Ok(PairSpectra {
            sa: singular_values(pair.a())?,
            sb: singular_values(pair.b())?,
            sab: singular_values(&pair.sum())?,
        })
    }
}

/// Largest admissible index for an entry on matrices with `min_dim`.
pub fn max_index(id: InequalityId, min_dim: usize) -> usize {
    match id {
        // The k=1 reduction is a single statement about sigma_1.
        InequalityId::G3bK1 => 1,
        _ => min_dim,
    }
}

fn validate(id: InequalityId, pair: &MatrixPair, index: usize) -> Result<(), CatalogError> {
    if id.entry().shape_rule == ShapeRule::SquareOnly && !pair.is_square() {
        return Err(CatalogError::RequiresSquare {
            id,
            rows: pair.rows(),
            cols: pair.cols(),
        });
    }
    let max = max_index(id, pair.min_dim());
    if index == 0 || index > max {
        return Err(CatalogError::IndexOutOfRange { index, max });
    }
    Ok(())
}

fn evaluate(
    id: InequalityId,
    sp: &PairSpectra,
    index: usize,
) -> Result<(f64, f64), CatalogError> {
    let last = sp.sb.len();
    let (lhs, rhs) = match id {
        InequalityId::G3bSum => (
            sp.sab.ky_fan_sum(index)?,
            sp.sa.ky_fan_sum(index)? - sp.sb.tail_sum(index)?,
        ),
        InequalityId::G3bK1 => (
            sp.sab.value_at(1)?,
            sp.sa.value_at(1)? - sp.sb.value_at(last)?,
        ),
        InequalityId::Thm813 => (
            sp.sab.value_at(index)?,
            sp.sa.value_at(index)? + sp.sb.value_at(last)?,
        ),
        InequalityId::PointwiseCorrected => (
            sp.sab.value_at(index)?,
            sp.sa.value_at(index)? - sp.sb.value_at(1)?,
        ),
        InequalityId::SumCorrected => (
            sp.sab.ky_fan_sum(index)?,
            sp.sa.ky_fan_sum(index)? - sp.sb.ky_fan_sum(index)?,
        ),
        InequalityId::TightSum => (
            sp.sab.ky_fan_sum(index)?,
            abs_diff_spectrum(&sp.sa, &sp.sb)?.sorted_prefix_sum(index)?,
        ),
    };
    Ok((lhs, rhs))
}

/// Evaluate one inequality at one 1-based index.
pub fn check(
    id: InequalityId,
    pair: &MatrixPair,
    index: usize,
    policy: &TolerancePolicy,
) -> Result<CheckReport, CatalogError> {
    validate(id, pair, index)?;
    let sp = PairSpectra::compute(pair)?;
    let (lhs, rhs) = evaluate(id, &sp, index)?;
    Ok(CheckReport::build(
        id.as_str(),
        index,
        lhs,
        rhs,
        policy.tolerance(pair),
    ))
}

/// Evaluate one inequality at every admissible index, ascending. Spectra are
/// computed once, so each report matches a standalone [`check`] bitwise.
pub fn check_all(
    id: InequalityId,
    pair: &MatrixPair,
    policy: &TolerancePolicy,
) -> Result<Vec<CheckReport>, CatalogError> {
    validate(id, pair, 1)?;
    let sp = PairSpectra::compute(pair)?;
    let tol = policy.tolerance(pair);
    let max = max_index(id, pair.min_dim());
    (1..=max)
        .map(|index| {
            let (lhs, rhs) = evaluate(id, &sp, index)?;
            Ok(CheckReport::build(id.as_str(), index, lhs, rhs, tol))
        })
        .collect()
}

/// The tightened prefix-sum bound applied to a difference:
/// Σ_{i≤k} σ_i(A−B) >= Σ_{i≤k} s_[i] with s_i = |σ_i(A) − σ_i(B)|.
///
/// Same statement as `tight_sum` under B → −B; reported under the id
/// `tight_diff`. Holds for rectangular pairs.
pub fn tight_bound_diff(
    pair: &MatrixPair,
    k: usize,
    policy: &TolerancePolicy,
) -> Result<CheckReport, CatalogError> {
    let max = pair.min_dim();
    if k == 0 || k > max {
        return Err(CatalogError::IndexOutOfRange { index: k, max });
    }
    let sa = singular_values(pair.a())?;
    let sb = singular_values(pair.b())?;
    let sdiff = singular_values(&pair.difference())?;
    let lhs = sdiff.ky_fan_sum(k)?;
    let rhs = abs_diff_spectrum(&sa, &sb)?.sorted_prefix_sum(k)?;
    Ok(CheckReport::build(
        "tight_diff",
        k,
        lhs,
        rhs,
        policy.tolerance(pair),
    ))
}

/// How the max-over-index-subsets terms of the chain are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetMethod {
    /// Sort and take a prefix; O(n log n), the production path.
    Sorted,
    /// Enumerate every k-subset; the cross-check oracle for small n.
    Enumerated,
}

/// Sum of the k largest values (1-based k), summed in nonincreasing order.
pub fn max_subset_sum(values: &[f64], k: usize) -> Result<f64, CatalogError> {
    if k == 0 || k > values.len() {
        return Err(CatalogError::IndexOutOfRange {
            index: k,
            max: values.len(),
        });
    }
    Ok(sort_desc_stable(values)[..k].iter().sum())
}

/// Max over all k-subsets of the subset sum, by exhaustive enumeration.
///
/// Each subset is summed in nonincreasing order so the maximum is bitwise
/// comparable with [`max_subset_sum`].
pub fn max_subset_sum_enumerated(values: &[f64], k: usize) -> Result<f64, CatalogError> {
    let n = values.len();
    if k == 0 || k > n {
        return Err(CatalogError::IndexOutOfRange { index: k, max: n });
    }
    if n > 24 {
        return Err(CatalogError::EnumerationTooLarge { len: n });
    }
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let mut subset: Vec<f64> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| values[i])
            .collect();
        subset.sort_by(|x, y| y.partial_cmp(x).expect("finite values"));
        let s: f64 = subset.iter().sum();
        if s > best {
            best = s;
        }
    }
    Ok(best)
}

/// Pairwise verdicts along the comparison chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChainLinks {
    /// Σσ_i(A+B) >= Σ s_[i]
    pub sum_ge_sorted: bool,
    /// Σ s_[i] equals the subset maximum of |σ_i(A) − σ_i(B)| (exact)
    pub sorted_eq_subset_abs: bool,
    /// subset max over |·| >= subset max over signed differences
    pub subset_abs_ge_signed_max: bool,
    /// subset max over signed differences >= Σ_{i≤k}(σ_i(A) − σ_i(B))
    pub signed_max_ge_prefix: bool,
}

/// The chain of prefix-sum quantities
/// Σσ_i(A+B) >= Σ s_[i] = max-subset Σ|σ−σ| >= max-subset Σ(σ−σ) >= Σ(σ−σ),
/// evaluated at one k with every comparison checked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub k: usize,
    /// Σ_{i≤k} σ_i(A+B)
    pub sum_sv_sum: f64,
    /// Σ_{i≤k} s_[i]
    pub sorted_abs_prefix: f64,
    /// max over k-subsets of Σ |σ_i(A) − σ_i(B)|
    pub subset_max_abs: f64,
    /// max over k-subsets of Σ (σ_i(A) − σ_i(B))
    pub subset_max_signed: f64,
    /// Σ_{i≤k} (σ_i(A) − σ_i(B))
    pub signed_prefix: f64,
    pub tol: f64,
    pub links: ChainLinks,
    pub holds: bool,
}

impl ChainReport {
    /// The four displayed chain quantities, nonincreasing when all links hold.
    pub fn chain(&self) -> [f64; 4] {
        [
            self.sum_sv_sum,
            self.sorted_abs_prefix,
            self.subset_max_abs,
            self.signed_prefix,
        ]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

/// Verify the comparison chain at one k using the production (sorting) path.
pub fn verify_chain(
    pair: &MatrixPair,
    k: usize,
    policy: &TolerancePolicy,
) -> Result<ChainReport, CatalogError> {
    verify_chain_with(pair, k, policy, SubsetMethod::Sorted)
}

pub fn verify_chain_with(
    pair: &MatrixPair,
    k: usize,
    policy: &TolerancePolicy,
    method: SubsetMethod,
) -> Result<ChainReport, CatalogError> {
    let max = pair.min_dim();
    if k == 0 || k > max {
        return Err(CatalogError::IndexOutOfRange { index: k, max });
    }
    let sp = PairSpectra::compute(pair)?;
    let diffs = abs_diff_spectrum(&sp.sa, &sp.sb)?;
    let signed: Vec<f64> = sp
        .sa
        .values()
        .iter()
        .zip(sp.sb.values())
        .map(|(a, b)| a - b)
        .collect();

    let sum_sv_sum = sp.sab.ky_fan_sum(k)?;
    let sorted_abs_prefix = diffs.sorted_prefix_sum(k)?;
    let (subset_max_abs, subset_max_signed) = match method {
        SubsetMethod::Sorted => (
            max_subset_sum(diffs.raw(), k)?,
            max_subset_sum(&signed, k)?,
        ),
        SubsetMethod::Enumerated => (
            max_subset_sum_enumerated(diffs.raw(), k)?,
            max_subset_sum_enumerated(&signed, k)?,
        ),
    };
    let signed_prefix: f64 = signed[..k].iter().sum();

    let tol = policy.tolerance(pair);
    let links = ChainLinks {
        sum_ge_sorted: sum_sv_sum >= sorted_abs_prefix - tol,
        sorted_eq_subset_abs: sorted_abs_prefix == subset_max_abs,
        subset_abs_ge_signed_max: subset_max_abs >= subset_max_signed - tol,
        signed_max_ge_prefix: subset_max_signed >= signed_prefix - tol,
    };
    let holds = links.sum_ge_sorted
        && links.sorted_eq_subset_abs
        && links.subset_abs_ge_signed_max
        && links.signed_max_ge_prefix;

    Ok(ChainReport {
        k,
        sum_sv_sum,
        sorted_abs_prefix,
        subset_max_abs,
        subset_max_signed,
        signed_prefix,
        tol,
        links,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{Field, MatrixF};

    fn pair(a: MatrixF, b: MatrixF) -> MatrixPair {
        MatrixPair::new(a, b).unwrap()
    }

    fn counterexample_pair() -> MatrixPair {
        pair(
            MatrixF::diag_real(&[1.0, 0.0]).unwrap(),
            MatrixF::diag_real(&[-1.0, 0.0]).unwrap(),
        )
    }

    fn policy() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn catalog_has_six_stable_entries() {
        let list = catalog_list();
        assert_eq!(list.len(), 6);
        let ids: Vec<&str> = list.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(
            ids,
            vec![
                "g3b_sum",
                "g3b_k1",
                "thm813",
                "pointwise_corrected",
                "sum_corrected",
                "tight_sum"
            ]
        );
        assert_eq!(
            InequalityId::G3bSum.entry().status,
            Status::ClaimedFalse
        );
        assert_eq!(InequalityId::TightSum.entry().status, Status::Proven);
    }

    #[test]
    fn counterexample_refutes_g3b_k1() {
        let r = check(InequalityId::G3bK1, &counterexample_pair(), 1, &policy()).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.rhs, 1.0);
        assert!((r.margin - 1.0).abs() <= 1e-12);
        assert!(!r.holds);
    }

    #[test]
    fn counterexample_refutes_thm813() {
        let r = check(InequalityId::Thm813, &counterexample_pair(), 1, &policy()).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.rhs, 1.0);
        assert!((r.margin - 1.0).abs() <= 1e-12);
        assert!(!r.holds);
    }

    #[test]
    fn counterexample_satisfies_sum_corrected() {
        let r = check(
            InequalityId::SumCorrected,
            &counterexample_pair(),
            1,
            &policy(),
        )
        .unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.rhs, 0.0);
        assert!(r.holds);
    }

    #[test]
    fn zero_b_gives_exact_equality_for_sum_corrected() {
        let a = MatrixF::from_real(3, 3, &[2.0, -1.0, 0.5, 0.0, 3.0, 1.0, -2.0, 0.25, 1.5])
            .unwrap();
        let z = MatrixF::zeros(3, 3, Field::Real).unwrap();
        for k in 1..=3 {
            let r = check(InequalityId::SumCorrected, &pair(a.clone(), z.clone()), k, &policy())
                .unwrap();
            assert_eq!(r.margin, 0.0);
            assert!(r.holds);
        }
    }

    #[test]
    fn square_only_entries_reject_rectangular_pairs() {
        let a = MatrixF::zeros(2, 3, Field::Real).unwrap();
        let p = pair(a.clone(), a);
        for id in [InequalityId::G3bSum, InequalityId::G3bK1, InequalityId::Thm813] {
            assert!(matches!(
                check(id, &p, 1, &policy()),
                Err(CatalogError::RequiresSquare { .. })
            ));
        }
        // the corrected bounds accept the same rectangular pair
        assert!(check(InequalityId::PointwiseCorrected, &p, 1, &policy()).is_ok());
        assert!(check(InequalityId::TightSum, &p, 2, &policy()).is_ok());
    }

    #[test]
    fn index_bounds_are_enforced() {
        let p = counterexample_pair();
        assert!(matches!(
            check(InequalityId::G3bSum, &p, 0, &policy()),
            Err(CatalogError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            check(InequalityId::G3bSum, &p, 3, &policy()),
            Err(CatalogError::IndexOutOfRange { .. })
        ));
        // the k=1 reduction admits only index 1
        assert!(matches!(
            check(InequalityId::G3bK1, &p, 2, &policy()),
            Err(CatalogError::IndexOutOfRange { index: 2, max: 1 })
        ));
    }

    #[test]
    fn check_all_matches_individual_checks_bitwise() {
        let a = MatrixF::from_real(3, 3, &[1.0, 2.0, 0.0, -1.0, 0.5, 3.0, 0.0, 1.0, -2.0])
            .unwrap();
        let b = MatrixF::from_real(3, 3, &[0.5, -1.0, 1.0, 2.0, 0.0, -0.5, 1.0, 1.0, 0.0])
            .unwrap();
        let p = pair(a, b);
        for id in InequalityId::ALL {
            let all = check_all(id, &p, &policy()).unwrap();
            assert_eq!(all.len(), max_index(id, 3));
            for r in &all {
                let single = check(id, &p, r.index, &policy()).unwrap();
                assert_eq!(r.to_json(), single.to_json());
            }
        }
    }

    #[test]
    fn check_is_deterministic() {
        let p = counterexample_pair();
        let a = check(InequalityId::G3bSum, &p, 2, &policy()).unwrap();
        let b = check(InequalityId::G3bSum, &p, 2, &policy()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn report_json_field_layout() {
        let r = check(InequalityId::G3bK1, &counterexample_pair(), 1, &policy()).unwrap();
        let json = r.to_json();
        assert!(json.starts_with(r#"{"ineq":"g3b_k1","index":1,"lhs":0.0,"rhs":1.0,"margin":1.0,"tol":"#));
        assert!(json.ends_with(r#""holds":false}"#));
    }

    #[test]
    fn chain_on_counterexample_pair_is_all_zero() {
        let r = verify_chain(&counterexample_pair(), 1, &policy()).unwrap();
        assert_eq!(r.chain(), [0.0, 0.0, 0.0, 0.0]);
        assert_eq!(r.subset_max_signed, 0.0);
        assert!(r.holds);
    }

    #[test]
    fn chain_on_hand_computed_diagonal_pair() {
        // σ(A) = (1, 0), σ(B) = (5, 0), σ(A+B) = (5, 1):
        // chain (5, 4, 4, -4); the signed subset maximum is 0 (empty gain at
        // index 2 beats -4 at index 1).
        let p = pair(
            MatrixF::diag_real(&[1.0, 0.0]).unwrap(),
            MatrixF::diag_real(&[0.0, 5.0]).unwrap(),
        );
        for method in [SubsetMethod::Sorted, SubsetMethod::Enumerated] {
            let r = verify_chain_with(&p, 1, &policy(), method).unwrap();
            assert_eq!(r.chain(), [5.0, 4.0, 4.0, -4.0]);
            assert_eq!(r.subset_max_signed, 0.0);
            assert!(r.holds, "{method:?}: {r:?}");
        }
    }

    #[test]
    fn chain_with_zero_b_collapses_to_ky_fan_of_a() {
        let a = MatrixF::from_real(2, 4, &[1.0, -2.0, 0.5, 0.0, 3.0, 1.0, 0.0, -1.0]).unwrap();
        let z = MatrixF::zeros(2, 4, Field::Real).unwrap();
        let p = pair(a.clone(), z);
        let sa = singular_values(&a).unwrap();
        for k in 1..=2 {
            let r = verify_chain(&p, k, &policy()).unwrap();
            let want = sa.ky_fan_sum(k).unwrap();
            for v in r.chain() {
                assert!((v - want).abs() <= 1e-12);
            }
            assert!((r.subset_max_signed - want).abs() <= 1e-12);
            assert!(r.holds);
        }
    }

    #[test]
    fn tight_bound_diff_on_diagonal_pair() {
        // A - B = diag(1, -5) has σ = (5, 1); the sorted abs-diff prefix at
        // k=1 is 4.
        let p = pair(
            MatrixF::diag_real(&[1.0, 0.0]).unwrap(),
            MatrixF::diag_real(&[0.0, 5.0]).unwrap(),
        );
        let r = tight_bound_diff(&p, 1, &policy()).unwrap();
        assert_eq!(r.ineq, "tight_diff");
        assert_eq!(r.lhs, 5.0);
        assert_eq!(r.rhs, 4.0);
        assert!(r.holds);
    }

    #[test]
    fn subset_enumeration_matches_sorting_exactly() {
        let values = [0.3, -1.2, 4.0, 4.0, 0.0, -0.7, 2.5];
        for k in 1..=values.len() {
            assert_eq!(
                max_subset_sum(&values, k).unwrap(),
                max_subset_sum_enumerated(&values, k).unwrap(),
                "k={k}"
            );
        }
    }

    mod props {
        use super::*;
        use num_complex::Complex64;
        use proptest::prelude::*;

        prop_compose! {
            fn arb_square_pair()(n in 1usize..5, complex in any::<bool>())
                               (ea in prop::collection::vec(-10.0..10.0f64, n * n * 2),
                                eb in prop::collection::vec(-10.0..10.0f64, n * n * 2),
                                n in Just(n), complex in Just(complex))
                               -> MatrixPair {
                let field = if complex { Field::Complex } else { Field::Real };
                let mk = |e: &[f64]| {
                    let data = e
                        .chunks(2)
                        .map(|p| Complex64::new(p[0], if complex { p[1] } else { 0.0 }))
                        .collect();
                    MatrixF::new(n, n, field, data).unwrap()
                };
                MatrixPair::new(mk(&ea), mk(&eb)).unwrap()
            }
        }

        proptest! {
            #[test]
            fn proven_entries_hold_on_random_pairs(p in arb_square_pair()) {
                for id in [InequalityId::PointwiseCorrected, InequalityId::SumCorrected, InequalityId::TightSum] {
                    for r in check_all(id, &p, &TolerancePolicy::default()).unwrap() {
                        prop_assert!(r.holds, "{id} failed: {:?}", r);
                    }
                }
            }

            #[test]
            fn tight_sum_rhs_dominates_sum_corrected_rhs(p in arb_square_pair()) {
                let tol = TolerancePolicy::default().tolerance(&p);
                let tight = check_all(InequalityId::TightSum, &p, &TolerancePolicy::default()).unwrap();
                let plain = check_all(InequalityId::SumCorrected, &p, &TolerancePolicy::default()).unwrap();
                for (t, s) in tight.iter().zip(&plain) {
                    prop_assert!(t.rhs >= s.rhs - tol);
                }
            }

            #[test]
            fn chain_links_hold_and_middle_equality_is_exact(p in arb_square_pair()) {
                for k in 1..=p.min_dim() {
                    let sorted = verify_chain(&p, k, &TolerancePolicy::default()).unwrap();
                    let enumerated =
                        verify_chain_with(&p, k, &TolerancePolicy::default(), SubsetMethod::Enumerated)
                            .unwrap();
                    prop_assert!(sorted.holds);
                    prop_assert!(enumerated.holds);
                    prop_assert_eq!(sorted.to_json(), enumerated.to_json());
                    let c = sorted.chain();
                    for w in c.windows(2) {
                        prop_assert!(w[0] >= w[1] - sorted.tol);
                    }
                }
            }

            #[test]
            fn subset_max_equals_sorted_prefix(values in prop::collection::vec(-5.0..5.0f64, 1..8), k in 1usize..8) {
                prop_assume!(k <= values.len());
                prop_assert_eq!(
                    max_subset_sum(&values, k).unwrap(),
                    max_subset_sum_enumerated(&values, k).unwrap()
                );
            }

            #[test]
            fn tight_bound_diff_holds_on_random_pairs(p in arb_square_pair()) {
                for k in 1..=p.min_dim() {
                    let r = tight_bound_diff(&p, k, &TolerancePolicy::default()).unwrap();
                    prop_assert!(r.holds, "{:?}", r);
                }
            }
        }
    }
}

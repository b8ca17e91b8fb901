//! The 18-matrix Waring decomposition of `6 tr(X^3)` and rank-one utilities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::qfield::{format_rational, parse_rational, rat, FieldElem, Rational, Tau};
use crate::symtensor::{pairing_cube, trace_cubic_form, CubicForm, CubicFormJson, Monomial};

/// Indices (0-based) of the rank-one block.
pub const FIRST_BLOCK: std::ops::Range<usize> = 0..9;
/// Indices (0-based) of the second block, `a*I` followed by eight invertible matrices.
pub const SECOND_BLOCK: std::ops::Range<usize> = 9..18;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaringDecomposition {
    pub n: usize,
    pub weight: Rational,
    pub matrices: Vec<SquareMatrix>,
    pub tau: Tau,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub exact_match: bool,
    /// `sum_i weight * tr(m_i X)^3 - tr(X^3)`.
    pub difference: CubicForm,
    pub tau_used: Rational,
}

fn entry(token: &str, tau: &Tau) -> FieldElem {
    let (neg, body) = match token.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, token),
    };
    let value = match body {
        "0" => FieldElem::zero(),
        "1" => FieldElem::one(),
        "z" => FieldElem::zeta(),
        "z2" => FieldElem::zeta_pow(2),
        "a" => FieldElem::a(tau),
        other => unreachable!("unknown entry token {other}"),
    };
    if neg {
        -value
    } else {
        value
    }
}

// Display order: three rows of three per block, read left to right.
const RANK18_MATRICES: [[[&str; 3]; 3]; 18] = [
    [["1", "-1", "0"], ["-1", "1", "0"], ["0", "0", "0"]],
    [["0", "0", "0"], ["0", "1", "-z"], ["0", "-z2", "1"]],
    [["1", "0", "-z"], ["0", "0", "0"], ["-z2", "0", "1"]],
    [["0", "0", "0"], ["0", "1", "-z2"], ["0", "-z", "1"]],
    [["1", "0", "-1"], ["0", "0", "0"], ["-1", "0", "1"]],
    [["1", "-z", "0"], ["-z2", "1", "0"], ["0", "0", "0"]],
    [["1", "0", "-z2"], ["0", "0", "0"], ["-z", "0", "1"]],
    [["1", "-z2", "0"], ["-z", "1", "0"], ["0", "0", "0"]],
    [["0", "0", "0"], ["0", "1", "-1"], ["0", "-1", "1"]],
    [["a", "0", "0"], ["0", "a", "0"], ["0", "0", "a"]],
    [["0", "1", "0"], ["0", "0", "z"], ["z2", "0", "0"]],
    [["0", "0", "1"], ["z2", "0", "0"], ["0", "z", "0"]],
    [["0", "1", "0"], ["0", "0", "z2"], ["z", "0", "0"]],
    [["0", "0", "1"], ["1", "0", "0"], ["0", "1", "0"]],
    [["1", "0", "0"], ["0", "z", "0"], ["0", "0", "z2"]],
    [["0", "0", "1"], ["z", "0", "0"], ["0", "z2", "0"]],
    [["1", "0", "0"], ["0", "z2", "0"], ["0", "0", "z"]],
    [["0", "1", "0"], ["0", "0", "1"], ["1", "0", "0"]],
];

/// The 18 matrices in display order, with `a` read in the given configuration.
pub fn rank18_matrices(tau: &Tau) -> Vec<SquareMatrix> {
    RANK18_MATRICES
        .iter()
        .map(|rows| {
            SquareMatrix::from_rows(
                rows.iter().map(|r| r.iter().map(|t| entry(t, tau)).collect()).collect(),
            )
            .expect("3x3")
        })
        .collect()
}

impl WaringDecomposition {
    pub fn new(weight: Rational, matrices: Vec<SquareMatrix>, tau: Tau) -> Result<Self> {
        let n = matrices.first().map(SquareMatrix::n).ok_or_else(|| {
            Error::Precondition("a decomposition needs at least one matrix".into())
        })?;
        for m in &matrices {
            if m.n() != n {
                return Err(Error::DimensionMismatch { expected: n, got: m.n() });
            }
            if let Some(t) = m.entries().iter().find_map(FieldElem::tau) {
                if t != &tau {
                    return Err(Error::Precondition(format!(
                        "matrix entry bound to tau = {t}, decomposition uses tau = {tau}"
                    )));
                }
            }
        }
        Ok(WaringDecomposition { n, weight, matrices, tau })
    }

    /// The 18-matrix decomposition with weight 1/6.
    pub fn rank18(tau: &Tau) -> Self {
        Self::new(rat(1, 6), rank18_matrices(tau), tau.clone()).expect("well-formed dataset")
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// `sum_i weight * m_i^(3)` as a cubic form.
    pub fn sum_of_cubes(&self) -> CubicForm {
        let w = FieldElem::from_rational(self.weight.clone());
        self.matrices.iter().fold(CubicForm::zero(self.n), |acc, m| {
            acc.scale_add(&w, &pairing_cube(m)).expect("sizes checked")
        })
    }

    pub fn to_json(&self) -> DecompositionJson {
        DecompositionJson {
            n: self.n,
            weight: format_rational(&self.weight),
            tau: format_rational(self.tau.value()),
            matrices: self.matrices.iter().map(SquareMatrix::to_strings).collect(),
        }
    }

    pub fn from_json(doc: &DecompositionJson) -> Result<Self> {
        let tau = Tau::new(parse_rational(&doc.tau)?)?;
        let weight = parse_rational(&doc.weight)?;
        let matrices = doc
            .matrices
            .iter()
            .map(|rows| matrix_from_strings(rows, &tau))
            .collect::<Result<Vec<_>>>()?;
        let d = Self::new(weight, matrices, tau)?;
        if d.n != doc.n {
            return Err(Error::DimensionMismatch { expected: doc.n, got: d.n });
        }
        Ok(d)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(text)?)
    }
}

pub fn matrix_from_strings(rows: &[Vec<[String; 6]>], tau: &Tau) -> Result<SquareMatrix> {
    SquareMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|e| FieldElem::from_strings(e, Some(tau))).collect())
            .collect::<Result<Vec<Vec<_>>>>()?,
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub n: usize,
    pub weight: String,
    pub tau: String,
    pub matrices: Vec<Vec<Vec<[String; 6]>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationJson {
    pub exact_match: bool,
    pub tau: String,
    pub difference: CubicFormJson,
}

impl VerificationReport {
    pub fn to_json(&self) -> VerificationJson {
        VerificationJson {
            exact_match: self.exact_match,
            tau: format_rational(&self.tau_used),
            difference: self.difference.to_json(),
        }
    }
}

/// Compares `sum_i weight * tr(m_i X)^3` with `tr(X^3)` coefficient by coefficient.
pub fn verify_waring(d: &WaringDecomposition) -> VerificationReport {
    let difference = d
        .sum_of_cubes()
        .scale_add(&FieldElem::from_int(-1), &trace_cubic_form(d.n))
        .expect("same size");
    VerificationReport {
        exact_match: difference.is_zero(),
        difference,
        tau_used: d.tau.value().clone(),
    }
}

/// `c` with `f = c * (tr X)^3`, if `f` has that shape.
pub fn trace_cube_multiple(f: &CubicForm) -> Option<FieldElem> {
    let trace_cubed = pairing_cube(&SquareMatrix::identity(f.n()));
    let c = f.coeff(&Monomial::new([0, 0, 0]));
    let rest = f.scale_add(&-c.clone(), &trace_cubed).ok()?;
    rest.is_zero().then_some(c)
}

/// Outcome of running the built-in decomposition under both candidate values of tau.
#[derive(Clone, Debug)]
pub struct TauResolution {
    pub outcomes: Vec<(Tau, VerificationReport)>,
}

impl TauResolution {
    /// The first configuration that verified exactly.
    pub fn accepted(&self) -> Option<&Tau> {
        self.outcomes.iter().find(|(_, r)| r.exact_match).map(|(t, _)| t)
    }
}

/// Tries `tau = -1/2`, then `tau = -2`.
pub fn resolve_tau() -> TauResolution {
    let outcomes = [Tau::nominal(), Tau::exact()]
        .into_iter()
        .map(|t| {
            let report = verify_waring(&WaringDecomposition::rank18(&t));
            (t, report)
        })
        .collect();
    TauResolution { outcomes }
}

/// Returns `mu` with `other = mu * m` and `mu^3 = 1`, if one exists.
pub fn tensor_equiv(m: &SquareMatrix, other: &SquareMatrix) -> Option<FieldElem> {
    if m.n() != other.n() {
        return None;
    }
    let Some((k, pivot)) = m.first_nonzero() else {
        return other.is_zero().then(FieldElem::one);
    };
    let target = &other.entries()[k];
    if target.is_zero() {
        return None;
    }
    (0..3).map(FieldElem::zeta_pow).find(|mu| {
        &(mu * pivot) == target && m.entries().iter().zip(other.entries()).all(|(x, y)| &(mu * x) == y)
    })
}

pub fn matrix_rank(m: &SquareMatrix) -> usize {
    m.rank()
}

/// For a rank-one `m`, returns its first nonzero column `v` when
/// `m = 2 v v^† / (v^† v)`, and `None` when that identity fails.
pub fn projection_factor(m: &SquareMatrix) -> Result<Option<Vec<FieldElem>>> {
    let rank = m.rank();
    if rank != 1 {
        return Err(Error::Precondition(format!("projection_factor needs rank 1, got rank {rank}")));
    }
    let n = m.n();
    let col = (0..n)
        .map(|j| m.column(j))
        .find(|c| c.iter().any(|e| !e.is_zero()))
        .expect("rank one matrix has a nonzero column");
    let norm: FieldElem = col.iter().map(|x| x * &x.conjugate()).sum();
    if norm.is_zero() {
        return Ok(None);
    }
    let factor = FieldElem::from_int(2).div(&norm)?;
    let projector = SquareMatrix::from_fn(n, |i, j| &(&col[i] * &col[j].conjugate()) * &factor);
    Ok((&projector == m).then_some(col))
}

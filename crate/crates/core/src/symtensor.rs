//! Cubic forms on the `n^2`-dimensional space of `n x n` matrices.
//!
//! A symmetric 3-tensor `T` is stored as its cubic polynomial `X -> T(X, X, X)`
//! in the variables `x_pq` (one per matrix entry). In characteristic zero the
//! tensor is recoverable by polarization, so equality of polynomials is
//! equality of tensors. The symmetrized matrix multiplication tensor becomes
//! `X -> tr(X^3)` and the rank-one cube of `m` becomes `X -> tr(mX)^3`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::qfield::{rat, FieldElem, Tau};

/// A degree-3 monomial, stored as three sorted variable indices.
/// Variable `x_pq` (0-based) has index `p * n + q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial([usize; 3]);

impl Monomial {
    pub fn new(mut vars: [usize; 3]) -> Self {
        vars.sort_unstable();
        Monomial(vars)
    }

    pub fn vars(&self) -> [usize; 3] {
        self.0
    }

    /// Number of distinct orderings of the variables: 1, 3 or 6.
    pub fn multiplicity(&self) -> u32 {
        let [a, b, c] = self.0;
        match (a == b, b == c) {
            (true, true) => 1,
            (false, false) => 6,
            _ => 3,
        }
    }

    /// Index pairs `(p, q)`, 1-based.
    pub fn index_pairs(&self, n: usize) -> [[usize; 2]; 3] {
        self.0.map(|v| [v / n + 1, v % n + 1])
    }

    pub fn from_index_pairs(pairs: &[[usize; 2]], n: usize) -> Result<Self> {
        if pairs.len() != 3 {
            return Err(Error::Parse(format!("monomial needs 3 index pairs, got {}", pairs.len())));
        }
        let mut vars = [0; 3];
        for (v, &[p, q]) in vars.iter_mut().zip(pairs) {
            if !(1..=n).contains(&p) || !(1..=n).contains(&q) {
                return Err(Error::Parse(format!("index pair ({p},{q}) out of range for n = {n}")));
            }
            *v = (p - 1) * n + (q - 1);
        }
        Ok(Monomial::new(vars))
    }
}

/// All monomials of degree 3 in `num_vars` variables, in sorted order.
pub fn all_monomials(num_vars: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    for a in 0..num_vars {
        for b in a..num_vars {
            for c in b..num_vars {
                out.push(Monomial([a, b, c]));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicForm {
    n: usize,
    terms: BTreeMap<Monomial, FieldElem>,
}

impl CubicForm {
    pub fn zero(n: usize) -> Self {
        CubicForm { n, terms: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, FieldElem> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> FieldElem {
        self.terms.get(m).cloned().unwrap_or_else(FieldElem::zero)
    }

    /// Coefficient of the monomial given by 1-based index pairs.
    pub fn coeff_at(&self, pairs: &[[usize; 2]]) -> Result<FieldElem> {
        Ok(self.coeff(&Monomial::from_index_pairs(pairs, self.n)?))
    }

    fn add_term(&mut self, m: Monomial, c: &FieldElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if self.n != n {
            return Err(Error::DimensionMismatch { expected: self.n, got: n });
        }
        Ok(())
    }

    /// The cube of the linear form `sum_v coeffs[v] * x_v`.
    pub fn cube_of_linear(n: usize, coeffs: &[FieldElem]) -> Self {
        assert_eq!(coeffs.len(), n * n);
        let support: Vec<usize> = (0..coeffs.len()).filter(|&v| !coeffs[v].is_zero()).collect();
        let mut form = CubicForm::zero(n);
        for (i, &a) in support.iter().enumerate() {
            for (j, &b) in support.iter().enumerate().skip(i) {
                let ab = &coeffs[a] * &coeffs[b];
                for &c in &support[j..] {
                    let m = Monomial([a, b, c]);
                    let mult = FieldElem::from_int(m.multiplicity() as i64);
                    form.add_term(m, &(&(&ab * &coeffs[c]) * &mult));
                }
            }
        }
        form
    }

    /// Substitutes `x_pq := X_pq`.
    pub fn evaluate(&self, x: &SquareMatrix) -> Result<FieldElem> {
        self.check_n(x.n())?;
        let e = x.entries();
        let mut acc = FieldElem::zero();
        for (m, c) in &self.terms {
            let [a, b, d] = m.0;
            if e[a].is_zero() || e[b].is_zero() || e[d].is_zero() {
                continue;
            }
            acc += &(&(c * &e[a]) * &(&e[b] * &e[d]));
        }
        Ok(acc)
    }

    /// `self + c * other`.
    pub fn scale_add(&self, c: &FieldElem, other: &CubicForm) -> Result<CubicForm> {
        self.check_n(other.n)?;
        let mut out = self.clone();
        if c.is_zero() {
            return Ok(out);
        }
        for (m, g) in &other.terms {
            out.add_term(*m, &(c * g));
        }
        Ok(out)
    }

    /// The form `X -> f(L(X))`.
    pub fn pullback(&self, map: &LinearMap) -> Result<CubicForm> {
        self.check_n(map.n)?;
        let nv = self.n * self.n;
        // Sparse substitution rows: x_v -> sum_w rows[v][w] x_w.
        let rows: Vec<Vec<(usize, &FieldElem)>> = (0..nv)
            .map(|v| {
                map.coeffs[v]
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .collect()
            })
            .collect();
        let mut dense: Vec<FieldElem> = vec![FieldElem::zero(); nv * nv * nv];
        let mut touched = vec![false; nv * nv * nv];
        for (m, c) in &self.terms {
            let [a, b, d] = m.0;
            for &(i, li) in &rows[a] {
                let ci = c * li;
                for &(j, lj) in &rows[b] {
                    let cij = &ci * lj;
                    for &(k, lk) in &rows[d] {
                        let [p, q, r] = Monomial::new([i, j, k]).0;
                        let slot = (p * nv + q) * nv + r;
                        dense[slot] += &(&cij * lk);
                        touched[slot] = true;
                    }
                }
            }
        }
        let mut out = CubicForm::zero(self.n);
        for (slot, c) in dense.into_iter().enumerate() {
            if touched[slot] && !c.is_zero() {
                let vars = [slot / (nv * nv), (slot / nv) % nv, slot % nv];
                out.terms.insert(Monomial(vars), c);
            }
        }
        Ok(out)
    }

    /// Entrywise complex conjugation of the coefficients.
    pub fn conjugate(&self) -> CubicForm {
        CubicForm {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (*m, c.conjugate())).collect(),
        }
    }

    pub fn to_json(&self) -> CubicFormJson {
        CubicFormJson {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson { monomial: m.index_pairs(self.n), coeff: c.to_strings() })
                .collect(),
        }
    }

    pub fn from_json(doc: &CubicFormJson, tau: Option<&Tau>) -> Result<Self> {
        let mut form = CubicForm::zero(doc.n);
        for t in &doc.terms {
            let m = Monomial::from_index_pairs(&t.monomial, doc.n)?;
            form.add_term(m, &FieldElem::from_strings(&t.coeff, tau)?);
        }
        Ok(form)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub monomial: [[usize; 2]; 3],
    pub coeff: [String; 6],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicFormJson {
    pub n: usize,
    pub terms: Vec<TermJson>,
}

/// A K-linear endomorphism of the matrix space, stored as substitution rows:
/// coordinate `v` of `L(X)` is `sum_w coeffs[v][w] * x_w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    n: usize,
    coeffs: Vec<Vec<FieldElem>>,
}

impl LinearMap {
    /// Builds the map from its action on the matrix units `E_pq`.
    pub fn from_action(n: usize, mut f: impl FnMut(&SquareMatrix) -> SquareMatrix) -> Self {
        let nv = n * n;
        let mut coeffs = vec![vec![FieldElem::zero(); nv]; nv];
        for w in 0..nv {
            let image = f(&SquareMatrix::unit(n, w / n, w % n));
            for (v, e) in image.entries().iter().enumerate() {
                coeffs[v][w] = e.clone();
            }
        }
        LinearMap { n, coeffs }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_action(n, |e| e.clone())
    }

    pub fn transpose(n: usize) -> Self {
        Self::from_action(n, SquareMatrix::transpose)
    }

    /// `X -> g X g^-1`, given `g` and its inverse.
    pub fn conjugation(g: &SquareMatrix, g_inv: &SquareMatrix) -> Self {
        Self::from_action(g.n(), |e| &(g * e) * g_inv)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn apply(&self, x: &SquareMatrix) -> SquareMatrix {
        let xs = x.entries();
        let entries = self
            .coeffs
            .iter()
            .map(|row| {
                row.iter()
                    .zip(xs)
                    .filter(|(c, x)| !c.is_zero() && !x.is_zero())
                    .map(|(c, x)| c * x)
                    .sum()
            })
            .collect();
        SquareMatrix::new(self.n, entries).expect("size preserved")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        let nv = self.n * self.n;
        let coeffs = (0..nv)
            .map(|v| {
                (0..nv)
                    .map(|w| {
                        (0..nv)
                            .filter(|&u| !self.coeffs[v][u].is_zero() && !other.coeffs[u][w].is_zero())
                            .map(|u| &self.coeffs[v][u] * &other.coeffs[u][w])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        LinearMap { n: self.n, coeffs }
    }
}

/// `(A, B, C) -> (tr(ABC) + tr(ACB)) / 2`.
pub fn sm_value(a: &SquareMatrix, b: &SquareMatrix, c: &SquareMatrix) -> Result<FieldElem> {
    a.check_same_size(b)?;
    a.check_same_size(c)?;
    let abc = (&(a * b) * c).trace();
    let acb = (&(a * c) * b).trace();
    Ok((abc + acb).scale(&rat(1, 2)))
}

/// `X -> tr(X^3) = sum_{p,q,r} x_pq x_qr x_rp`.
pub fn trace_cubic_form(n: usize) -> CubicForm {
    let mut form = CubicForm::zero(n);
    let one = FieldElem::one();
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                form.add_term(Monomial::new([p * n + q, q * n + r, r * n + p]), &one);
            }
        }
    }
    form
}

/// Coefficients of the linear form `tr(mX) = sum_pq m_pq x_qp`.
pub fn pairing_coeffs(m: &SquareMatrix) -> Vec<FieldElem> {
    let n = m.n();
    (0..n * n).map(|v| m.get(v % n, v / n).clone()).collect()
}

/// The rank-one symmetric cube of `m`, i.e. `X -> tr(mX)^3`.
pub fn pairing_cube(m: &SquareMatrix) -> CubicForm {
    CubicForm::cube_of_linear(m.n(), &pairing_coeffs(m))
}

/// `tr(mX)`.
pub fn pairing(m: &SquareMatrix, x: &SquareMatrix) -> Result<FieldElem> {
    m.check_same_size(x)?;
    Ok((m * x).trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int(n: i64) -> FieldElem {
        FieldElem::from_int(n)
    }

    fn e(p: usize, q: usize) -> SquareMatrix {
        SquareMatrix::unit(3, p - 1, q - 1)
    }

    #[test]
    fn sm_value_examples() {
        let i = SquareMatrix::identity(3);
        assert_eq!(sm_value(&i, &i, &i).unwrap(), int(3));
        let half = FieldElem::from_rational(rat(1, 2));
        assert_eq!(sm_value(&e(1, 2), &e(2, 3), &e(3, 1)).unwrap(), half);
        assert!(sm_value(&i, &i, &SquareMatrix::identity(2)).is_err());
    }

    #[test]
    fn trace_form_coefficients() {
        let f = trace_cubic_form(3);
        assert_eq!(f.coeff_at(&[[1, 1], [1, 1], [1, 1]]).unwrap(), int(1));
        assert_eq!(f.coeff_at(&[[1, 2], [2, 3], [3, 1]]).unwrap(), int(3));
        assert!(f.coeff_at(&[[1, 1], [1, 1], [1, 2]]).unwrap().is_zero());
    }

    /// Independent tally of closed index walks (p, q, r), grouped by monomial.
    #[test]
    fn trace_form_support_matches_walk_enumeration() {
        let mut tally: BTreeMap<[usize; 3], i64> = BTreeMap::new();
        for p in 0..3 {
            for q in 0..3 {
                for r in 0..3 {
                    let mut key = [p * 3 + q, q * 3 + r, r * 3 + p];
                    key.sort();
                    *tally.entry(key).or_default() += 1;
                }
            }
        }
        let f = trace_cubic_form(3);
        assert_eq!(f.terms().len(), tally.len());
        assert_eq!(tally.len(), 11);
        assert_eq!(tally.values().sum::<i64>(), 27);
        let ones: Vec<_> = tally.values().filter(|&&c| c == 1).collect();
        assert_eq!(ones.len(), 3);
        assert!(tally.values().all(|&c| c == 1 || c == 3));
        for (k, c) in tally {
            assert_eq!(f.coeff(&Monomial(k)), int(c));
        }
        assert_eq!(all_monomials(9).len(), 165);
    }

    #[test]
    fn pairing_cube_examples() {
        let c = pairing_cube(&e(1, 1));
        assert_eq!(c.terms().len(), 1);
        assert_eq!(c.coeff_at(&[[1, 1], [1, 1], [1, 1]]).unwrap(), int(1));
        let c2 = pairing_cube(&SquareMatrix::identity(2));
        assert_eq!(c2.coeff_at(&[[1, 1], [1, 1], [2, 2]]).unwrap(), int(3));
        assert_eq!(c2.coeff_at(&[[1, 1], [2, 2], [2, 2]]).unwrap(), int(3));
        assert_eq!(c2.terms().len(), 4);
    }

    #[test]
    fn evaluate_examples() {
        let f = trace_cubic_form(3);
        assert_eq!(f.evaluate(&SquareMatrix::identity(3)).unwrap(), int(3));
        assert!(f.evaluate(&e(1, 2)).unwrap().is_zero());
        let p = &(&e(1, 2) + &e(2, 3)) + &e(3, 1);
        assert_eq!(f.evaluate(&p).unwrap(), int(3));
        assert!(f.evaluate(&SquareMatrix::identity(2)).is_err());
    }

    #[test]
    fn scale_add_examples() {
        let f = trace_cubic_form(3);
        let g = pairing_cube(&e(1, 2));
        assert_eq!(f.scale_add(&FieldElem::zero(), &g).unwrap(), f);
        assert!(f.scale_add(&int(-1), &f).unwrap().is_zero());
        assert!(f.scale_add(&int(1), &trace_cubic_form(2)).is_err());
    }

    #[test]
    fn pullback_invariances() {
        let f = trace_cubic_form(3);
        assert_eq!(f.pullback(&LinearMap::identity(3)).unwrap(), f);
        assert_eq!(f.pullback(&LinearMap::transpose(3)).unwrap(), f);
        let z = FieldElem::zeta();
        let g = SquareMatrix::from_rows(vec![
            vec![int(1), int(2), int(0)],
            vec![int(0), z.clone(), int(1)],
            vec![int(1), int(0), int(3)],
        ])
        .unwrap();
        let map = LinearMap::conjugation(&g, &g.inverse().unwrap());
        assert_eq!(f.pullback(&map).unwrap(), f);
        let diag = SquareMatrix::diagonal(vec![int(1), int(1), int(2)]);
        let map = LinearMap::conjugation(&diag, &diag.inverse().unwrap());
        assert_eq!(f.pullback(&map).unwrap(), f);
    }

    #[test]
    fn pullback_by_transpose_moves_rank_one_cubes() {
        let f = pairing_cube(&e(1, 1));
        let moved = f.pullback(&LinearMap::transpose(3)).unwrap();
        assert_eq!(moved, f);
        let g = pairing_cube(&e(1, 2));
        let moved = g.pullback(&LinearMap::transpose(3)).unwrap();
        assert_eq!(moved, pairing_cube(&e(2, 1)));
    }

    #[test]
    fn json_roundtrip() {
        let f = trace_cubic_form(3);
        let doc = f.to_json();
        assert_eq!(doc.terms[0].monomial, [[1, 1], [1, 1], [1, 1]]);
        let text = serde_json::to_string(&doc).unwrap();
        let back: CubicFormJson = serde_json::from_str(&text).unwrap();
        assert_eq!(CubicForm::from_json(&back, None).unwrap(), f);
    }

    fn small_matrix() -> impl Strategy<Value = SquareMatrix> {
        proptest::collection::vec((-3i64..=3, -3i64..=3), 9).prop_map(|v| {
            SquareMatrix::new(
                3,
                v.into_iter()
                    .map(|(p, q)| FieldElem::cyclotomic(rat(p, 1), rat(q, 1)))
                    .collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn sm_value_totally_symmetric(a in small_matrix(), b in small_matrix(), c in small_matrix()) {
            let v = sm_value(&a, &b, &c).unwrap();
            prop_assert_eq!(&v, &sm_value(&a, &c, &b).unwrap());
            prop_assert_eq!(&v, &sm_value(&b, &a, &c).unwrap());
            prop_assert_eq!(&v, &sm_value(&b, &c, &a).unwrap());
            prop_assert_eq!(&v, &sm_value(&c, &a, &b).unwrap());
            prop_assert_eq!(&v, &sm_value(&c, &b, &a).unwrap());
        }

        #[test]
        fn polarization_identity(x in small_matrix()) {
            let f = trace_cubic_form(3);
            prop_assert_eq!(f.evaluate(&x).unwrap(), sm_value(&x, &x, &x).unwrap());
        }

        #[test]
        fn pairing_cube_evaluates_to_cubed_pairing(m in small_matrix(), x in small_matrix()) {
            let lhs = pairing_cube(&m).evaluate(&x).unwrap();
            prop_assert_eq!(lhs, pairing(&m, &x).unwrap().pow(3));
        }

        #[test]
        fn scale_add_is_linear(m in small_matrix(), x in small_matrix(), c in -4i64..=4) {
            let f = trace_cubic_form(3);
            let g = pairing_cube(&m);
            let c = FieldElem::cyclotomic(rat(c, 1), rat(1, 1));
            let lhs = f.scale_add(&c, &g).unwrap().evaluate(&x).unwrap();
            let rhs = f.evaluate(&x).unwrap() + &c * &g.evaluate(&x).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn pullback_is_contravariant(m in small_matrix(), g in small_matrix(), h in small_matrix()) {
            let f = pairing_cube(&m).scale_add(&FieldElem::one(), &trace_cubic_form(3)).unwrap();
            let l1 = LinearMap::from_action(3, |x| &g * x);
            let l2 = LinearMap::from_action(3, |x| &(x * &h) + &x.transpose());
            let lhs = f.pullback(&l1).unwrap().pullback(&l2).unwrap();
            let rhs = f.pullback(&l1.compose(&l2)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}

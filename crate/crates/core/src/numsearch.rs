//! Floating-point search for Waring decompositions of `6 tr(X^3)` as a sum
//! of cubes `tr(m X)^3`, by backtracking line search on the squared
//! coefficient mismatch.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::WaringDecomposition;
use crate::error::{Error, Result};
use crate::qfield::to_f64;
use crate::symtensor::{all_monomials, trace_cubic_form};

/// `r` complex `n x n` matrices, each stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericCandidate {
    n: usize,
    r: usize,
    matrices: Vec<Vec<Complex64>>,
}

impl NumericCandidate {
    pub fn new(n: usize, matrices: Vec<Vec<Complex64>>) -> Result<Self> {
        if n == 0 || matrices.is_empty() {
            return Err(Error::Precondition("need n >= 1 and at least one matrix".into()));
        }
        for m in &matrices {
            if m.len() != n * n {
                return Err(Error::DimensionMismatch { expected: n * n, got: m.len() });
            }
            if m.iter().any(|z| !z.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(NumericCandidate { n, r: matrices.len(), matrices })
    }

    pub fn zeros(n: usize, r: usize) -> Self {
        NumericCandidate { n, r, matrices: vec![vec![Complex64::new(0.0, 0.0); n * n]; r] }
    }

    /// The numeric image of an exact decomposition, with the weight folded
    /// into the matrices so that the target is `6 tr(X^3)`.
    pub fn from_exact(d: &WaringDecomposition) -> Self {
        let s = (6.0 * to_f64(&d.weight)).cbrt();
        let matrices = d.matrices.iter().map(|m| m.embed().into_iter().map(|z| z * s).collect()).collect();
        NumericCandidate { n: d.n, r: d.len(), matrices }
    }

    /// Entries drawn independently with real and imaginary parts `N(0, scale^2 / 2)`.
    pub fn gaussian(n: usize, r: usize, scale: f64, rng: &mut ChaCha8Rng) -> Self {
        let mut c = Self::zeros(n, r);
        c.add_noise(scale, rng);
        c
    }

    pub fn perturbed(&self, scale: f64, rng: &mut ChaCha8Rng) -> Self {
        let mut c = self.clone();
        c.add_noise(scale, rng);
        c
    }

    fn add_noise(&mut self, scale: f64, rng: &mut ChaCha8Rng) {
        let sigma = scale / std::f64::consts::SQRT_2;
        for z in self.matrices.iter_mut().flatten() {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *z += Complex64::new(sigma * re, sigma * im);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn matrices(&self) -> &[Vec<Complex64>] {
        &self.matrices
    }

    fn is_finite(&self) -> bool {
        self.matrices.iter().flatten().all(|z| z.is_finite())
    }

    fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    fn axpy(&self, alpha: f64, dir: &[Vec<Complex64>]) -> Self {
        let matrices = self
            .matrices
            .iter()
            .zip(dir)
            .map(|(m, d)| m.iter().zip(d).map(|(x, y)| x + y * alpha).collect())
            .collect();
        NumericCandidate { n: self.n, r: self.r, matrices }
    }

    pub fn to_json(&self) -> CandidateJson {
        CandidateJson {
            n: self.n,
            r: self.r,
            matrices: self
                .matrices
                .iter()
                .map(|m| m.chunks(self.n).map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect())
                .collect(),
        }
    }

    pub fn from_json(doc: &CandidateJson) -> Result<Self> {
        if doc.matrices.len() != doc.r {
            return Err(Error::DimensionMismatch { expected: doc.r, got: doc.matrices.len() });
        }
        let mut matrices = Vec::with_capacity(doc.r);
        for m in &doc.matrices {
            if m.len() != doc.n || m.iter().any(|row| row.len() != doc.n) {
                return Err(Error::Parse(format!("each matrix must be {0}x{0}", doc.n)));
            }
            matrices.push(m.iter().flatten().map(|&[re, im]| Complex64::new(re, im)).collect());
        }
        Self::new(doc.n, matrices)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateJson {
    pub n: usize,
    pub r: usize,
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

/// The monomials of `tr(X^3)` in `n^2` variables with their targets.
struct Target {
    n: usize,
    /// `(vars, orderings, 6 * tr coefficient)`.
    terms: Vec<([usize; 3], f64, f64)>,
}

impl Target {
    fn new(n: usize) -> Self {
        let trace = trace_cubic_form(n);
        let terms = all_monomials(n * n)
            .into_iter()
            .map(|m| {
                let t = trace.coeff(&m).as_rational().map(to_f64).expect("rational trace coefficients");
                (m.vars(), f64::from(m.multiplicity()), 6.0 * t)
            })
            .collect();
        Target { n, terms }
    }

    /// Linear-form coefficients: `tr(m X)` has coefficient `m[q][p]` on `x_pq`.
    fn forms(&self, c: &NumericCandidate) -> Vec<Vec<Complex64>> {
        let n = self.n;
        c.matrices
            .iter()
            .map(|m| (0..n * n).map(|v| m[(v % n) * n + v / n]).collect())
            .collect()
    }

    fn residuals(&self, forms: &[Vec<Complex64>]) -> Vec<Complex64> {
        self.terms
            .iter()
            .map(|&([a, b, c], mult, t)| {
                let s: Complex64 = forms.iter().map(|u| u[a] * u[b] * u[c]).sum();
                s * mult - t
            })
            .collect()
    }

    fn loss(&self, c: &NumericCandidate) -> f64 {
        self.residuals(&self.forms(c)).iter().map(Complex64::norm_sqr).sum()
    }

    /// Damped Gauss-Newton step `-(J^H J + |R| I)^-1 J^H R` in matrix
    /// coordinates. The residual is holomorphic, so `J` is complex.
    fn gauss_newton(&self, c: &NumericCandidate) -> Option<Vec<Vec<Complex64>>> {
        let n = self.n;
        let nn = n * n;
        let forms = self.forms(c);
        let res = self.residuals(&forms);
        let mut jac = DMatrix::<Complex64>::zeros(self.terms.len(), c.r * nn);
        for (row, &([a, b, cc], mult, _)) in self.terms.iter().enumerate() {
            for (i, u) in forms.iter().enumerate() {
                jac[(row, i * nn + a)] += u[b] * u[cc] * mult;
                jac[(row, i * nn + b)] += u[a] * u[cc] * mult;
                jac[(row, i * nn + cc)] += u[a] * u[b] * mult;
            }
        }
        let r = DVector::from_vec(res);
        let damping = r.norm();
        let jh = jac.adjoint();
        let mut normal = &jh * &jac;
        for k in 0..normal.nrows() {
            normal[(k, k)] += damping;
        }
        let step = normal.cholesky()?.solve(&(-(&jh * &r)));
        if step.iter().any(|z| !z.is_finite()) {
            return None;
        }
        Some(
            (0..c.r)
                .map(|i| (0..nn).map(|k| step[i * nn + (k % n) * n + k / n]).collect())
                .collect(),
        )
    }

    fn gradient(&self, c: &NumericCandidate) -> Vec<Vec<Complex64>> {
        let n = self.n;
        let forms = self.forms(c);
        let res = self.residuals(&forms);
        let mut g = vec![vec![Complex64::new(0.0, 0.0); n * n]; c.r];
        for (&([a, b, cc], mult, _), r) in self.terms.iter().zip(&res) {
            for (u, gi) in forms.iter().zip(g.iter_mut()) {
                let w = r * 2.0 * mult;
                gi[a] += w * (u[b] * u[cc]).conj();
                gi[b] += w * (u[a] * u[cc]).conj();
                gi[cc] += w * (u[a] * u[b]).conj();
            }
        }
        // Back from form coefficients to matrix entries.
        g.into_iter()
            .map(|gu| (0..n * n).map(|k| gu[(k % n) * n + k / n]).collect())
            .collect()
    }
}

/// `sum over monomials |coeff(sum_i tr(m_i X)^3) - 6 coeff(tr X^3)|^2`.
pub fn loss(c: &NumericCandidate) -> Result<f64> {
    c.check_finite()?;
    Ok(Target::new(c.n).loss(c))
}

/// `2 dL/d(conj z)` per entry: the real part is `dL/d(Re z)`, the imaginary
/// part `dL/d(Im z)`.
pub fn gradient(c: &NumericCandidate) -> Result<Vec<Vec<Complex64>>> {
    c.check_finite()?;
    Ok(Target::new(c.n).gradient(c))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRule {
    pub initial: f64,
    pub shrink: f64,
    pub slope: f64,
}

impl Default for StepRule {
    fn default() -> Self {
        StepRule { initial: 1.0, shrink: 0.5, slope: 1e-4 }
    }
}

/// Search direction fed to the line search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Direction {
    /// Steepest descent.
    Gradient,
    /// Levenberg-Marquardt step with damping equal to the residual norm. Falls
    /// back to steepest descent if the normal equations fail to factor.
    #[default]
    GaussNewton,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub tolerance: f64,
    pub step: StepRule,
    pub direction: Direction,
    /// Standard deviation of the complex Gaussian initialization.
    pub init_scale: f64,
    /// Worker threads for restarts; 1 runs them in order on the caller.
    pub jobs: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            restarts: 1,
            max_iters: 50_000,
            tolerance: 1e-12,
            step: StepRule::default(),
            direction: Direction::default(),
            init_scale: 1.0,
            jobs: 1,
        }
    }
}

impl SearchOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidOptions(msg.into()));
        if self.restarts == 0 {
            return bad("restarts must be positive");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return bad("tolerance must be positive and finite");
        }
        if !(self.init_scale.is_finite() && self.init_scale > 0.0) {
            return bad("init_scale must be positive and finite");
        }
        if self.jobs == 0 {
            return bad("jobs must be positive");
        }
        let StepRule { initial, shrink, slope } = self.step;
        if !(initial.is_finite() && initial > 0.0) {
            return bad("initial step must be positive and finite");
        }
        if !(shrink > 0.0 && shrink < 1.0) || !(slope > 0.0 && slope < 1.0) {
            return bad("shrink and slope factors must lie in (0, 1)");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub best: NumericCandidate,
    pub loss: f64,
    pub iterations: usize,
    /// Seed of the restart that produced `best`.
    pub seed: u64,
    pub converged: bool,
}

impl SearchResult {
    pub fn to_json(&self) -> SearchResultJson {
        SearchResultJson {
            candidate: self.best.to_json(),
            loss: self.loss,
            seed: self.seed,
            iterations: self.iterations,
            converged: self.converged,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResultJson {
    #[serde(flatten)]
    pub candidate: CandidateJson,
    pub loss: f64,
    pub seed: u64,
    pub iterations: usize,
    pub converged: bool,
}

fn descend(target: &Target, start: NumericCandidate, seed: u64, opts: &SearchOptions) -> SearchResult {
    let mut x = start;
    let mut fx = target.loss(&x);
    let mut iterations = 0;
    while iterations < opts.max_iters && fx >= opts.tolerance {
        let g = target.gradient(&x);
        let dir = match opts.direction {
            Direction::GaussNewton => target.gauss_newton(&x),
            Direction::Gradient => None,
        };
        // Fall back to steepest descent unless the step points downhill.
        let (dir, slope) = match dir {
            Some(d) => {
                let slope: f64 = g.iter().flatten().zip(d.iter().flatten()).map(|(a, b)| (a.conj() * b).re).sum();
                if slope < 0.0 {
                    (d, slope)
                } else {
                    steepest(&g)
                }
            }
            None => steepest(&g),
        };
        if slope == 0.0 {
            break;
        }
        let mut alpha = opts.step.initial;
        let accepted = loop {
            let y = x.axpy(alpha, &dir);
            let fy = target.loss(&y);
            if fy.is_finite() && fy <= fx + opts.step.slope * alpha * slope {
                break Some((y, fy));
            }
            alpha *= opts.step.shrink;
            if alpha * alpha * slope.abs() < f64::MIN_POSITIVE {
                break None;
            }
        };
        let Some((y, fy)) = accepted else { break };
        x = y;
        fx = fy;
        iterations += 1;
    }
    SearchResult { best: x, loss: fx, iterations, seed, converged: fx < opts.tolerance }
}

/// `(-g, -|g|^2)`.
fn steepest(g: &[Vec<Complex64>]) -> (Vec<Vec<Complex64>>, f64) {
    let dir: Vec<Vec<Complex64>> = g.iter().map(|gi| gi.iter().map(|z| -z).collect()).collect();
    let gg: f64 = g.iter().flatten().map(Complex64::norm_sqr).sum();
    (dir, -gg)
}

/// Descent from `c` without re-initialization.
pub fn polish(c: &NumericCandidate, opts: &SearchOptions) -> Result<SearchResult> {
    opts.validate()?;
    c.check_finite()?;
    Ok(descend(&Target::new(c.n), c.clone(), 0, opts))
}

/// Starting points for [`search_from`].
#[derive(Clone, Debug)]
pub enum Init {
    Gaussian { n: usize, r: usize },
    Perturb { base: NumericCandidate, scale: f64 },
}

/// Gaussian-initialized search; see [`search_from`].
pub fn search(n: usize, r: usize, seed: u64, opts: &SearchOptions) -> Result<SearchResult> {
    search_from(&Init::Gaussian { n, r }, seed, opts)
}

/// Runs `opts.restarts` descents, restart `k` drawing from a stream seeded by
/// `seed + k`, and returns the lowest loss (earliest restart on ties).
pub fn search_from(init: &Init, seed: u64, opts: &SearchOptions) -> Result<SearchResult> {
    opts.validate()?;
    let n = match init {
        Init::Gaussian { n, r } => {
            if *n == 0 || *r == 0 {
                return Err(Error::Precondition("need n >= 1 and r >= 1".into()));
            }
            *n
        }
        Init::Perturb { base, scale } => {
            base.check_finite()?;
            if !(scale.is_finite() && *scale >= 0.0) {
                return Err(Error::InvalidOptions("perturbation must be nonnegative and finite".into()));
            }
            base.n
        }
    };
    let target = Target::new(n);
    let run = |k: usize| {
        let s = seed.wrapping_add(k as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let start = match init {
            Init::Gaussian { n, r } => NumericCandidate::gaussian(*n, *r, opts.init_scale, &mut rng),
            Init::Perturb { base, scale } => base.perturbed(*scale, &mut rng),
        };
        descend(&target, start, s, opts)
    };
    let results: Vec<SearchResult> = if opts.jobs == 1 {
        (0..opts.restarts).map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| Error::InvalidOptions(e.to_string()))?;
        pool.install(|| (0..opts.restarts).into_par_iter().map(run).collect())
    };
    Ok(results
        .into_iter()
        .reduce(|best, next| if next.loss < best.loss { next } else { best })
        .expect("at least one restart"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::Tau;

    fn exact() -> NumericCandidate {
        NumericCandidate::from_exact(&WaringDecomposition::rank18(&Tau::exact()))
    }

    #[test]
    fn zero_candidate() {
        let z = NumericCandidate::zeros(3, 4);
        assert_eq!(loss(&z).unwrap(), 2700.0);
        assert!(gradient(&z).unwrap().iter().flatten().all(|g| g.norm() == 0.0));
        let res = polish(&z, &SearchOptions::default()).unwrap();
        assert!(!res.converged);
        assert_eq!(res.iterations, 0);
    }

    #[test]
    fn exact_embedding_is_a_minimum() {
        let c = exact();
        assert!(loss(&c).unwrap() < 1e-20);
        let g: f64 = gradient(&c).unwrap().iter().flatten().map(Complex64::norm_sqr).sum();
        assert!(g.sqrt() < 1e-8);
        let printed = NumericCandidate::from_exact(&WaringDecomposition::rank18(&Tau::nominal()));
        assert!(loss(&printed).unwrap() > 1.0);
    }

    #[test]
    fn cube_roots_of_unity_leave_loss_unchanged() {
        let mut c = exact();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        c = c.perturbed(0.1, &mut rng);
        let before = loss(&c).unwrap();
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        for (i, m) in c.matrices.iter_mut().enumerate() {
            for z in m.iter_mut() {
                *z *= w.powu(i as u32 % 3);
            }
        }
        assert!((loss(&c).unwrap() - before).abs() < 1e-12 * before.max(1.0));
    }

    #[test]
    fn one_variable() {
        let c = NumericCandidate::new(1, vec![vec![Complex64::new(1.0, 0.0)]]).unwrap();
        assert_eq!(loss(&c).unwrap(), 25.0);
        let root = NumericCandidate::new(1, vec![vec![Complex64::new(6f64.cbrt(), 0.0)]]).unwrap();
        assert!(loss(&root).unwrap() < 1e-20);
        let res = search(1, 1, 1, &SearchOptions { tolerance: 1e-20, ..Default::default() }).unwrap();
        assert!(res.converged, "loss {}", res.loss);
        assert_eq!(res.loss, loss(&res.best).unwrap());
    }

    #[test]
    fn scaling_e11_toward_the_root_decreases_loss() {
        let at = |s: f64| {
            let mut m = vec![Complex64::new(0.0, 0.0); 9];
            m[0] = Complex64::new(s, 0.0);
            loss(&NumericCandidate::new(3, vec![m]).unwrap()).unwrap()
        };
        let root = 6f64.cbrt();
        assert!(at(0.5) > at(1.0) && at(1.0) > at(root));
        assert!(at(2.5) > at(root));
    }

    #[test]
    fn rejects_bad_input() {
        let nan = vec![Complex64::new(f64::NAN, 0.0)];
        assert!(matches!(NumericCandidate::new(1, vec![nan]), Err(Error::NonFinite)));
        assert!(matches!(
            search(2, 2, 0, &SearchOptions { restarts: 0, ..Default::default() }),
            Err(Error::InvalidOptions(_))
        ));
        assert!(matches!(
            search(2, 2, 0, &SearchOptions { tolerance: -1.0, ..Default::default() }),
            Err(Error::InvalidOptions(_))
        ));
        assert!(search(0, 2, 0, &SearchOptions::default()).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let c = exact();
        let text = serde_json::to_string(&c.to_json()).unwrap();
        let back = NumericCandidate::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}

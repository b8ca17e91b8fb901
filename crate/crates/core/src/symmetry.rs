//! Symmetries of the decomposition: projective matrices acting by
//! conjugation, optionally followed by transposition and by entrywise
//! complex conjugation.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::affine::AffineMap;
use crate::decomposition::{tensor_equiv, WaringDecomposition, FIRST_BLOCK, SECOND_BLOCK};
use crate::error::{Error, Result};
use crate::hesse::ProjPoint;
use crate::matrix::SquareMatrix;
use crate::qfield::{rat, FieldElem};
use crate::symtensor::{trace_cubic_form, LinearMap};

/// An invertible matrix up to scalars, stored with its first nonzero entry
/// (row-major) equal to 1.
#[derive(Clone, Debug)]
pub struct ProjectiveMatrix {
    rep: SquareMatrix,
    inv: SquareMatrix,
}

impl ProjectiveMatrix {
    pub fn new(m: SquareMatrix) -> Result<Self> {
        let (_, lead) = m.first_nonzero().ok_or(Error::SingularMatrix)?;
        let rep = m.scale(&lead.inv()?);
        let inv = rep.inverse()?;
        Ok(ProjectiveMatrix { rep, inv })
    }

    pub fn identity(n: usize) -> Self {
        let id = SquareMatrix::identity(n);
        ProjectiveMatrix { rep: id.clone(), inv: id }
    }

    pub fn rep(&self) -> &SquareMatrix {
        &self.rep
    }

    pub fn inverse_rep(&self) -> &SquareMatrix {
        &self.inv
    }

    pub fn n(&self) -> usize {
        self.rep.n()
    }

    /// True when `m` is a nonzero scalar multiple of this matrix.
    pub fn matches(&self, m: &SquareMatrix) -> bool {
        ProjectiveMatrix::new(m.clone()).is_ok_and(|p| &p == self)
    }

    pub fn apply_point(&self, p: &ProjPoint) -> ProjPoint {
        p.transform(&self.rep)
    }
}

impl PartialEq for ProjectiveMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rep == other.rep
    }
}

impl Eq for ProjectiveMatrix {}

impl Hash for ProjectiveMatrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rep.hash(state);
    }
}

/// `m -> C(T(g m g^-1))` where `T` is transposition (if flagged) and `C` is
/// entrywise conjugation (if flagged).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymOp {
    pub g: ProjectiveMatrix,
    pub transpose: bool,
    pub conjugate: bool,
}

impl SymOp {
    pub fn identity(n: usize) -> Self {
        SymOp { g: ProjectiveMatrix::identity(n), transpose: false, conjugate: false }
    }

    pub fn from_matrix(g: SquareMatrix) -> Result<Self> {
        Ok(SymOp { g: ProjectiveMatrix::new(g)?, transpose: false, conjugate: false })
    }

    pub fn transpose_op(n: usize) -> Self {
        SymOp { transpose: true, ..Self::identity(n) }
    }

    pub fn conjugation_op(n: usize) -> Self {
        SymOp { conjugate: true, ..Self::identity(n) }
    }

    pub fn is_flag_free(&self) -> bool {
        !self.transpose && !self.conjugate
    }

    pub fn apply(&self, m: &SquareMatrix) -> SquareMatrix {
        let mut out = &(self.g.rep() * m) * self.g.inverse_rep();
        if self.transpose {
            out = out.transpose();
        }
        if self.conjugate {
            out = out.conjugate();
        }
        out
    }

    /// `self ∘ other` (apply `other` first), rewritten into normal form with
    /// `g C = C conj(g)` and `g T = T g^-T` for the conjugation action.
    pub fn compose(&self, other: &SymOp) -> SymOp {
        let mut left = self.g.rep().clone();
        if other.conjugate {
            left = left.conjugate();
        }
        if other.transpose {
            left = left.inverse().expect("invertible").transpose();
        }
        let g = ProjectiveMatrix::new(&left * other.g.rep()).expect("product of invertible matrices");
        SymOp {
            g,
            transpose: self.transpose ^ other.transpose,
            conjugate: self.conjugate ^ other.conjugate,
        }
    }

    /// The K-linear part `X -> T(g X g^-1)`.
    pub fn linear_part(&self) -> LinearMap {
        let conj = LinearMap::conjugation(self.g.rep(), self.g.inverse_rep());
        if self.transpose {
            LinearMap::transpose(self.g.n()).compose(&conj)
        } else {
            conj
        }
    }

    pub fn to_json(&self) -> SymOpJson {
        SymOpJson {
            matrix: self.g.rep().to_strings(),
            transpose: self.transpose,
            conjugate: self.conjugate,
        }
    }

    pub fn from_json(doc: &SymOpJson) -> Result<Self> {
        let rows = doc
            .matrix
            .iter()
            .map(|r| r.iter().map(|e| FieldElem::from_strings(e, None)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Ok(SymOp {
            g: ProjectiveMatrix::new(SquareMatrix::from_rows(rows)?)?,
            transpose: doc.transpose,
            conjugate: doc.conjugate,
        })
    }
}

impl fmt::Display for SymOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.g.rep())?;
        if self.transpose {
            write!(f, " +transpose")?;
        }
        if self.conjugate {
            write!(f, " +conjugate")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymOpJson {
    pub matrix: Vec<Vec<[String; 6]>>,
    pub transpose: bool,
    pub conjugate: bool,
}

/// `op(m_i) = scalars[i] * m_{perm[i]}` (0-based indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedPermutation {
    pub perm: Vec<usize>,
    pub scalars: Vec<FieldElem>,
}

impl InducedPermutation {
    /// `self ∘ other` as permutations (apply `other` first).
    pub fn compose(&self, other: &InducedPermutation) -> Vec<usize> {
        other.perm.iter().map(|&j| self.perm[j]).collect()
    }

    pub fn preserves(&self, block: std::ops::Range<usize>) -> bool {
        block.clone().all(|i| block.contains(&self.perm[i]))
    }

    fn block_perm(&self, block: std::ops::Range<usize>) -> Option<Vec<usize>> {
        self.preserves(block.clone())
            .then(|| block.clone().map(|i| self.perm[i] - block.start).collect())
    }
}

/// Some summand's image is not a cube-root multiple of any summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NotASymmetry {
    pub index: usize,
}

pub fn induced_permutation(
    op: &SymOp,
    d: &WaringDecomposition,
) -> std::result::Result<InducedPermutation, NotASymmetry> {
    let mut perm = Vec::with_capacity(d.len());
    let mut scalars = Vec::with_capacity(d.len());
    let mut hit = vec![false; d.len()];
    for (i, m) in d.matrices.iter().enumerate() {
        let image = op.apply(m);
        let (j, mu) = d
            .matrices
            .iter()
            .enumerate()
            .find_map(|(j, target)| tensor_equiv(target, &image).map(|mu| (j, mu)))
            .ok_or(NotASymmetry { index: i })?;
        if hit[j] {
            return Err(NotASymmetry { index: i });
        }
        hit[j] = true;
        perm.push(j);
        scalars.push(mu);
    }
    Ok(InducedPermutation { perm, scalars })
}

/// True when the op fixes `tr(X^3)`: pull back along the linear part, then
/// conjugate coefficients if flagged.
pub fn stabilizes_sm(op: &SymOp) -> bool {
    let target = trace_cubic_form(op.g.n());
    let mut moved = target.pullback(&op.linear_part()).expect("same size");
    if op.conjugate {
        moved = moved.conjugate();
    }
    moved == target
}

/// Per-block affine description of an induced permutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelAction {
    pub first_block: Option<AffineMap>,
    pub second_block: Option<AffineMap>,
}

pub fn label_action(ip: &InducedPermutation) -> LabelAction {
    let fit = |block| ip.block_perm(block).and_then(|p| AffineMap::from_permutation(&p));
    LabelAction { first_block: fit(FIRST_BLOCK), second_block: fit(SECOND_BLOCK) }
}

#[derive(Clone, Debug)]
pub struct GroupElement {
    pub op: SymOp,
    pub induced: InducedPermutation,
    pub labels: LabelAction,
}

#[derive(Clone, Debug)]
pub struct GroupReport {
    pub generators: Vec<SymOp>,
    pub elements: Vec<GroupElement>,
}

impl GroupReport {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn to_json(&self) -> GroupJson {
        GroupJson {
            order: self.order(),
            generators: self.generators.iter().map(SymOp::to_json).collect(),
            elements: self
                .elements
                .iter()
                .map(|e| {
                    let op = e.op.to_json();
                    ElementJson {
                        matrix: op.matrix,
                        transpose: op.transpose,
                        conjugate: op.conjugate,
                        perm: e.induced.perm.iter().map(|p| p + 1).collect(),
                        scalars: e.induced.scalars.iter().map(FieldElem::to_strings).collect(),
                        first_block_affine: e.labels.first_block,
                        second_block_affine: e.labels.second_block,
                    }
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub matrix: Vec<Vec<[String; 6]>>,
    pub transpose: bool,
    pub conjugate: bool,
    /// 1-based image indices.
    pub perm: Vec<usize>,
    pub scalars: Vec<[String; 6]>,
    pub first_block_affine: Option<AffineMap>,
    pub second_block_affine: Option<AffineMap>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub order: usize,
    pub generators: Vec<SymOpJson>,
    pub elements: Vec<ElementJson>,
}

/// Breadth-first closure of `gens` under composition, deduplicated by
/// canonical matrix and flags. Elements are listed in discovery order,
/// starting from the identity.
pub fn closure(gens: &[SymOp], d: &WaringDecomposition) -> Result<GroupReport> {
    for (index, g) in gens.iter().enumerate() {
        induced_permutation(g, d).map_err(|_| Error::NotASymmetry { index })?;
    }
    let identity = SymOp::identity(d.n);
    let mut seen: HashMap<SymOp, usize> = HashMap::new();
    let mut order = vec![identity.clone()];
    seen.insert(identity.clone(), 0);
    let mut queue = VecDeque::from([identity]);
    while let Some(x) = queue.pop_front() {
        for s in gens {
            let y = s.compose(&x);
            if !seen.contains_key(&y) {
                seen.insert(y.clone(), order.len());
                order.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    let elements = order
        .into_iter()
        .map(|op| {
            let induced = induced_permutation(&op, d)
                .expect("products of symmetries are symmetries");
            let labels = label_action(&induced);
            GroupElement { op, induced, labels }
        })
        .collect();
    Ok(GroupReport { generators: gens.to_vec(), elements })
}

/// One of the five generators, with the F_3 element it is labelled as the
/// image of. For the last two the induced action on the labels is a
/// different element of SL(2, F_3) of the same order.
#[derive(Clone, Debug)]
pub struct RhoGenerator {
    pub name: &'static str,
    pub label: AffineMap,
    pub matrix: SquareMatrix,
}

fn cyc(p: i64, q: i64) -> FieldElem {
    FieldElem::cyclotomic(rat(p, 1), rat(q, 1))
}

fn z2() -> FieldElem {
    FieldElem::zeta_pow(2)
}

fn rows(entries: [[FieldElem; 3]; 3]) -> SquareMatrix {
    SquareMatrix::from_rows(entries.into_iter().map(Vec::from).collect()).expect("3x3")
}

pub fn rho_generators() -> Vec<RhoGenerator> {
    let (o, i, z) = (cyc(0, 0), cyc(1, 0), FieldElem::zeta());
    let one_minus_z = cyc(1, -1);
    let z2_minus_one = &z2() - &i;
    let two_z_plus_one = cyc(1, 2);
    let one_minus_z2 = &i - &z2();
    let z_minus_one = cyc(-1, 1);
    vec![
        RhoGenerator {
            name: "e_r",
            label: AffineMap::translation([0, 1]),
            matrix: rows([[o.clone(), o.clone(), i.clone()], [z2(), o.clone(), o.clone()], [o.clone(), z.clone(), o.clone()]]),
        },
        RhoGenerator {
            name: "e_d",
            label: AffineMap::translation([1, 0]),
            matrix: rows([[o.clone(), o.clone(), i.clone()], [z.clone(), o.clone(), o.clone()], [o.clone(), z2(), o.clone()]]),
        },
        RhoGenerator {
            name: "[[1,1],[0,1]]",
            label: AffineMap::linear([[1, 1], [0, 1]]),
            matrix: rows([
                [one_minus_z.clone(), z2_minus_one.clone(), two_z_plus_one.clone()],
                [z2_minus_one, one_minus_z.clone(), two_z_plus_one],
                [one_minus_z.clone(), one_minus_z.clone(), one_minus_z],
            ]),
        },
        RhoGenerator {
            name: "[[0,1],[-1,0]]",
            label: AffineMap::linear([[0, 1], [-1, 0]]),
            matrix: rows([
                [one_minus_z2.clone(), z_minus_one.clone(), one_minus_z2.clone()],
                [z_minus_one.clone(), one_minus_z2.clone(), one_minus_z2],
                [z_minus_one.clone(), z_minus_one, cyc(-1, -2)],
            ]),
        },
        RhoGenerator {
            name: "[[0,1],[-1,-1]]",
            label: AffineMap::linear([[0, 1], [-1, -1]]),
            matrix: SquareMatrix::diagonal(vec![i.clone(), i, z2()]),
        },
    ]
}

pub fn rho_ops() -> Vec<SymOp> {
    rho_generators()
        .into_iter()
        .map(|r| SymOp::from_matrix(r.matrix).expect("generators are invertible"))
        .collect()
}

/// The matrix taking the frame (1,2,7,8) to (1,4,3,6).
pub fn counterexample_matrix() -> SquareMatrix {
    let (o, z) = (cyc(0, 0), FieldElem::zeta());
    rows([
        [o.clone(), -z2(), cyc(-1, 0)],
        [-z2(), o.clone(), -z],
        [o.clone(), o, z2()],
    ])
}

/// Generator sets for the three groups of interest.
pub fn generators(with_transpose: bool, with_conjugation: bool) -> Vec<SymOp> {
    let mut gens = rho_ops();
    if with_transpose {
        gens.push(SymOp::transpose_op(3));
    }
    if with_conjugation {
        gens.push(SymOp::conjugation_op(3));
    }
    gens
}

/// The projective matrix taking `src[k]` to `dst[k]` for k = 1..4. Each frame
/// is normalized so its fourth point is the sum of the scaled first three.
pub fn frame_transport(src: &[ProjPoint; 4], dst: &[ProjPoint; 4]) -> Result<ProjectiveMatrix> {
    let basis = |frame: &[ProjPoint; 4]| -> Result<SquareMatrix> {
        let cols: Vec<Vec<FieldElem>> = frame[..3].iter().map(|p| p.coords().to_vec()).collect();
        let m = SquareMatrix::from_columns(&cols)?;
        let m_inv = m
            .inverse()
            .map_err(|_| Error::DegenerateFrame("first three points are collinear".into()))?;
        let fourth = SquareMatrix::from_columns(&[
            frame[3].coords().to_vec(),
            vec![FieldElem::zero(); 3],
            vec![FieldElem::zero(); 3],
        ])?;
        let lambda = (&m_inv * &fourth).column(0);
        if lambda.iter().any(FieldElem::is_zero) {
            return Err(Error::DegenerateFrame("fourth point lies on a side of the triangle".into()));
        }
        let scaled: Vec<Vec<FieldElem>> =
            cols.iter().zip(&lambda).map(|(c, l)| c.iter().map(|x| x * l).collect()).collect();
        SquareMatrix::from_columns(&scaled)
    };
    let b_src = basis(src)?;
    let b_dst = basis(dst)?;
    ProjectiveMatrix::new(&b_dst * &b_src.inverse()?)
}

//! Projective geometry of the rank-one block: its nine column points form
//! the Hesse configuration (the affine plane of order 3).

use serde::{Deserialize, Serialize};

use crate::affine::{self, AffineMap};
use crate::decomposition::{WaringDecomposition, FIRST_BLOCK};
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::qfield::FieldElem;
use crate::symmetry::{frame_transport, ProjectiveMatrix};

/// A point of P^2(K), scaled so its first nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    coords: [FieldElem; 3],
}

impl ProjPoint {
    pub fn new(coords: [FieldElem; 3]) -> Result<Self> {
        let lead = coords
            .iter()
            .find(|c| !c.is_zero())
            .ok_or_else(|| Error::Precondition("zero vector is not a projective point".into()))?
            .inv()?;
        Ok(ProjPoint { coords: coords.map(|c| &c * &lead) })
    }

    pub fn coords(&self) -> &[FieldElem; 3] {
        &self.coords
    }

    /// The point `g * p`.
    pub fn transform(&self, g: &SquareMatrix) -> ProjPoint {
        let image: [FieldElem; 3] = std::array::from_fn(|i| {
            (0..3).map(|j| g.get(i, j) * &self.coords[j]).sum()
        });
        ProjPoint::new(image).expect("invertible map sends points to points")
    }

    pub fn to_strings(&self) -> [[String; 6]; 3] {
        std::array::from_fn(|i| self.coords[i].to_strings())
    }
}

/// Canonical point spanning the column space of a rank-one matrix.
pub fn column_point(m: &SquareMatrix) -> Result<ProjPoint> {
    let rank = m.rank();
    if rank != 1 || m.n() != 3 {
        return Err(Error::Precondition(format!(
            "column_point needs a rank-one 3x3 matrix, got rank {rank}"
        )));
    }
    let col = (0..3)
        .map(|j| m.column(j))
        .find(|c| c.iter().any(|e| !e.is_zero()))
        .expect("nonzero column");
    ProjPoint::new([col[0].clone(), col[1].clone(), col[2].clone()])
}

pub fn first_block_points(d: &WaringDecomposition) -> Result<Vec<ProjPoint>> {
    d.matrices[FIRST_BLOCK].iter().map(column_point).collect()
}

fn det3(p: &ProjPoint, q: &ProjPoint, r: &ProjPoint) -> FieldElem {
    SquareMatrix::from_columns(&[p.coords.to_vec(), q.coords.to_vec(), r.coords.to_vec()])
        .expect("3x3")
        .determinant()
}

pub fn collinear(p: &ProjPoint, q: &ProjPoint, r: &ProjPoint) -> bool {
    det3(p, q, r).is_zero()
}

/// Nine points and their collinear triples (0-based, sorted).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub points: Vec<ProjPoint>,
    pub lines: Vec<[usize; 3]>,
}

pub fn build_configuration(points: Vec<ProjPoint>) -> Result<Configuration> {
    if points.len() != 9 {
        return Err(Error::DimensionMismatch { expected: 9, got: points.len() });
    }
    for i in 0..9 {
        for j in i + 1..9 {
            if points[i] == points[j] {
                return Err(Error::Precondition(format!("points {} and {} coincide", i + 1, j + 1)));
            }
        }
    }
    let mut lines = Vec::new();
    for i in 0..9 {
        for j in i + 1..9 {
            for k in j + 1..9 {
                if collinear(&points[i], &points[j], &points[k]) {
                    lines.push([i, j, k]);
                }
            }
        }
    }
    for (a, l) in lines.iter().enumerate() {
        for m in &lines[a + 1..] {
            if l.iter().filter(|x| m.contains(x)).count() >= 2 {
                return Err(Error::Precondition(format!(
                    "four or more collinear points: {:?} and {:?}",
                    l.map(|x| x + 1),
                    m.map(|x| x + 1)
                )));
            }
        }
    }
    Ok(Configuration { points, lines })
}

impl Configuration {
    fn third_point(&self) -> [[Option<usize>; 9]; 9] {
        let mut third = [[None; 9]; 9];
        for &[a, b, c] in &self.lines {
            for (x, y, z) in [(a, b, c), (a, c, b), (b, c, a)] {
                third[x][y] = Some(z);
                third[y][x] = Some(z);
            }
        }
        third
    }

    /// Checks the affine-plane axioms: 12 lines, 4 through each point, and
    /// exactly one through any two points.
    pub fn validate_hesse(&self) -> Result<()> {
        if self.lines.len() != 12 {
            return Err(Error::NotHesse(format!("{} lines instead of 12", self.lines.len())));
        }
        for k in 0..9 {
            let count = self.lines.iter().filter(|l| l.contains(&k)).count();
            if count != 4 {
                return Err(Error::NotHesse(format!("point {} lies on {count} lines", k + 1)));
            }
        }
        let third = self.third_point();
        for x in 0..9 {
            for y in x + 1..9 {
                if third[x][y].is_none() {
                    return Err(Error::NotHesse(format!("points {} and {} share no line", x + 1, y + 1)));
                }
            }
        }
        Ok(())
    }

    fn maps_lines_to_lines(&self, perm: &[usize; 9]) -> bool {
        self.lines.iter().all(|l| {
            let mut image = l.map(|x| perm[x]);
            image.sort_unstable();
            self.lines.binary_search(&image).is_ok()
        })
    }

    pub fn to_json(&self) -> ConfigurationJson {
        ConfigurationJson {
            points: self.points.iter().map(ProjPoint::to_strings).collect(),
            lines: self.lines.iter().map(|l| l.map(|x| x + 1)).collect(),
        }
    }

    /// Rebuilds from the points; the stored lines must agree with the recomputed ones.
    pub fn from_json(doc: &ConfigurationJson) -> Result<Self> {
        let points = points_from_json(&doc.points)?;
        let config = build_configuration(points)?;
        let mut given: Vec<[usize; 3]> = doc
            .lines
            .iter()
            .map(|l| {
                let mut s = l.map(|x| x.wrapping_sub(1));
                s.sort_unstable();
                s
            })
            .collect();
        given.sort_unstable();
        if given != config.lines {
            return Err(Error::Parse("listed lines differ from the collinear triples".into()));
        }
        Ok(config)
    }
}

pub fn points_from_json(points: &[[[String; 6]; 3]]) -> Result<Vec<ProjPoint>> {
    points
        .iter()
        .map(|p| {
            let c = p
                .iter()
                .map(|e| FieldElem::from_strings(e, None))
                .collect::<Result<Vec<_>>>()?;
            ProjPoint::new([c[0].clone(), c[1].clone(), c[2].clone()])
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigurationJson {
    pub points: Vec<[[String; 6]; 3]>,
    /// 1-based point indices.
    pub lines: Vec<[usize; 3]>,
}

/// Points 1, 2 and 5 are not collinear in the affine plane, so their images
/// determine an automorphism.
const DETERMINING: [usize; 3] = [0, 1, 4];

/// All permutations of the points that map lines to lines. Affine planes of
/// order 3 are handled by extending images of a determining triple along
/// lines; anything else falls back to checking all 9! permutations.
pub fn incidence_automorphisms(c: &Configuration) -> Vec<[usize; 9]> {
    if c.validate_hesse().is_ok() {
        determined_automorphisms(c)
    } else {
        brute_force_automorphisms(c)
    }
}

fn determined_automorphisms(c: &Configuration) -> Vec<[usize; 9]> {
    let third = c.third_point();
    let mut out = Vec::new();
    for a in 0..9 {
        for b in 0..9 {
            for d in 0..9 {
                if a == b || a == d || b == d {
                    continue;
                }
                let mut image = [None; 9];
                image[DETERMINING[0]] = Some(a);
                image[DETERMINING[1]] = Some(b);
                image[DETERMINING[2]] = Some(d);
                if let Some(perm) = extend(&third, image) {
                    if c.maps_lines_to_lines(&perm) {
                        out.push(perm);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

fn extend(third: &[[Option<usize>; 9]; 9], mut image: [Option<usize>; 9]) -> Option<[usize; 9]> {
    loop {
        let mut changed = false;
        for x in 0..9 {
            for y in x + 1..9 {
                let (Some(fx), Some(fy)) = (image[x], image[y]) else { continue };
                let Some(z) = third[x][y] else { continue };
                let fz = third[fx][fy]?;
                match image[z] {
                    Some(existing) if existing != fz => return None,
                    Some(_) => {}
                    None => {
                        image[z] = Some(fz);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let perm: [usize; 9] = std::array::from_fn(|k| image[k].unwrap_or(usize::MAX));
    let mut hit = [false; 9];
    for &p in &perm {
        if p >= 9 || hit[p] {
            return None;
        }
        hit[p] = true;
    }
    Some(perm)
}

fn brute_force_automorphisms(c: &Configuration) -> Vec<[usize; 9]> {
    let mut out = Vec::new();
    let mut perm: [usize; 9] = std::array::from_fn(|k| k);
    permute(&mut perm, 0, &mut |p| {
        if c.maps_lines_to_lines(p) {
            out.push(*p);
        }
    });
    out.sort_unstable();
    out
}

fn permute(perm: &mut [usize; 9], k: usize, visit: &mut impl FnMut(&[usize; 9])) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, visit);
        perm.swap(k, i);
    }
}

/// Points 1, 3, 4, 6 are in general position.
pub const REALIZATION_FRAME: [usize; 4] = [0, 2, 3, 5];

/// The unique projective matrix inducing `perm` on the points, if one exists.
pub fn pgl_realizable(perm: &[usize; 9], c: &Configuration) -> Result<Option<ProjectiveMatrix>> {
    let src = REALIZATION_FRAME.map(|k| c.points[k].clone());
    let dst = REALIZATION_FRAME.map(|k| c.points[perm[k]].clone());
    let g = frame_transport(&src, &dst)?;
    let ok = (0..9).all(|k| g.apply_point(&c.points[k]) == c.points[perm[k]]);
    Ok(ok.then_some(g))
}

/// `x^3 + y^3 + z^3 = 0` and `xyz = 0`.
pub fn inflection_check(p: &ProjPoint) -> bool {
    let [x, y, z] = &p.coords;
    let cubes = x.pow(3) + y.pow(3) + z.pow(3);
    let product = &(x * y) * z;
    cubes.is_zero() && product.is_zero()
}

/// Summary of the geometric checks on a nine-point configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HesseReport {
    pub lines: usize,
    pub lines_match_affine_plane: bool,
    pub automorphisms: usize,
    pub automorphisms_affine: bool,
    pub realizable: usize,
    pub swap_realizable: bool,
    pub inflections: usize,
    pub general_position_frame: bool,
}

impl HesseReport {
    pub fn holds(&self) -> bool {
        self.lines == 12
            && self.lines_match_affine_plane
            && self.automorphisms == 432
            && self.automorphisms_affine
            && self.realizable == 216
            && !self.swap_realizable
            && self.inflections == 9
            && self.general_position_frame
    }
}

pub fn frame_in_general_position(points: &[ProjPoint], frame: [usize; 4]) -> bool {
    (0..4).all(|skip| {
        let t: Vec<usize> = frame.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &k)| k).collect();
        !collinear(&points[t[0]], &points[t[1]], &points[t[2]])
    })
}

/// Runs the full suite. A configuration that is not an affine plane is an error.
pub fn analyze(points: Vec<ProjPoint>) -> Result<(Configuration, HesseReport)> {
    let config = build_configuration(points)?;
    config.validate_hesse()?;
    let general_position_frame = frame_in_general_position(&config.points, REALIZATION_FRAME);
    if !general_position_frame {
        return Err(Error::DegenerateFrame("points 1, 3, 4, 6 are not in general position".into()));
    }
    let autos = incidence_automorphisms(&config);
    let automorphisms_affine = autos.iter().all(|p| AffineMap::from_permutation(p).is_some());
    let mut realizable = 0;
    for p in &autos {
        if pgl_realizable(p, &config)?.is_some() {
            realizable += 1;
        }
    }
    let swap_realizable = pgl_realizable(&AffineMap::SWAP.permutation(), &config)?.is_some();
    let report = HesseReport {
        lines: config.lines.len(),
        lines_match_affine_plane: config.lines == affine::affine_lines(),
        automorphisms: autos.len(),
        automorphisms_affine,
        realizable,
        swap_realizable,
        inflections: config.points.iter().filter(|p| inflection_check(p)).count(),
        general_position_frame,
    };
    Ok((config, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::rank18_matrices;
    use crate::qfield::{rat, Tau};

    fn cyc(p: i64, q: i64) -> FieldElem {
        FieldElem::cyclotomic(rat(p, 1), rat(q, 1))
    }

    fn point(p: [FieldElem; 3]) -> ProjPoint {
        ProjPoint::new(p).unwrap()
    }

    fn hesse_points() -> Vec<ProjPoint> {
        first_block_points(&WaringDecomposition::rank18(&Tau::exact())).unwrap()
    }

    fn generic_points() -> Vec<ProjPoint> {
        (1..=9)
            .map(|k: i64| point([cyc(1, 0), cyc(k, 0), cyc(k * k, 1)]))
            .collect()
    }

    #[test]
    fn column_points() {
        let ms = rank18_matrices(&Tau::exact());
        assert_eq!(column_point(&ms[0]).unwrap(), point([cyc(1, 0), cyc(-1, 0), cyc(0, 0)]));
        assert_eq!(column_point(&ms[1]).unwrap(), point([cyc(0, 0), cyc(1, 0), -FieldElem::zeta_pow(2)]));
        assert_eq!(column_point(&ms[6]).unwrap(), point([cyc(1, 0), cyc(0, 0), cyc(0, -1)]));
        assert!(column_point(&ms[9]).is_err());
    }

    #[test]
    fn collinearity() {
        let p = hesse_points();
        assert!(collinear(&p[0], &p[1], &p[2]));
        assert!(!collinear(&p[0], &p[2], &p[3]));
        assert!(collinear(&p[0], &p[0], &p[4]));
    }

    #[test]
    fn the_configuration_is_the_affine_plane() {
        let c = build_configuration(hesse_points()).unwrap();
        assert_eq!(c.lines.len(), 12);
        assert_eq!(c.lines, affine::affine_lines());
        c.validate_hesse().unwrap();
        assert!(frame_in_general_position(&c.points, REALIZATION_FRAME));
    }

    #[test]
    fn generic_points_have_no_lines() {
        let c = build_configuration(generic_points()).unwrap();
        assert!(c.lines.is_empty());
        assert!(matches!(c.validate_hesse(), Err(Error::NotHesse(_))));
        assert!(matches!(analyze(generic_points()), Err(Error::NotHesse(_))));
    }

    #[test]
    fn duplicates_are_rejected() {
        let mut p = hesse_points();
        p[8] = p[0].clone();
        assert!(build_configuration(p).is_err());
    }

    #[test]
    fn automorphisms_of_the_hesse_configuration() {
        let c = build_configuration(hesse_points()).unwrap();
        let autos = incidence_automorphisms(&c);
        assert_eq!(autos.len(), 432);
        assert!(autos.iter().all(|p| AffineMap::from_permutation(p).is_some()));
        assert_eq!(brute_force_automorphisms(&c), autos);
    }

    #[test]
    fn degenerate_configuration_falls_back_to_brute_force() {
        let c = build_configuration(generic_points()).unwrap();
        assert_eq!(incidence_automorphisms(&c).len(), 362_880);
    }

    #[test]
    fn realizability() {
        let c = build_configuration(hesse_points()).unwrap();
        let id: [usize; 9] = std::array::from_fn(|k| k);
        assert_eq!(pgl_realizable(&id, &c).unwrap(), Some(ProjectiveMatrix::identity(3)));
        assert_eq!(pgl_realizable(&AffineMap::SWAP.permutation(), &c).unwrap(), None);
    }

    #[test]
    fn inflection_points() {
        assert!(inflection_check(&point([cyc(1, 0), cyc(-1, 0), cyc(0, 0)])));
        assert!(inflection_check(&point([cyc(1, 0), cyc(0, 0), -FieldElem::zeta_pow(2)])));
        assert!(!inflection_check(&point([cyc(1, 0), cyc(1, 0), cyc(1, 0)])));
        assert!(hesse_points().iter().all(inflection_check));
    }

    #[test]
    fn json_roundtrip() {
        let c = build_configuration(hesse_points()).unwrap();
        let text = serde_json::to_string(&c.to_json()).unwrap();
        let back: ConfigurationJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Configuration::from_json(&back).unwrap(), c);
        let mut tampered = back;
        tampered.lines.pop();
        assert!(Configuration::from_json(&tampered).is_err());
    }
}

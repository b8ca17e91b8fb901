//! The affine plane over F_3 with the "telephone" labelling: block index
//! `k` in `0..9` has label `(k / 3, k % 3)` (row, column).

use serde::{Deserialize, Serialize};

pub type Label = [u8; 2];

pub fn label(index: usize) -> Label {
    [(index / 3) as u8, (index % 3) as u8]
}

pub fn index(label: Label) -> usize {
    label[0] as usize * 3 + label[1] as usize
}

/// `x -> A x + t` on column vectors `(row, col)` mod 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffineMap {
    #[serde(rename = "A")]
    pub linear: [[u8; 2]; 2],
    pub t: [u8; 2],
}

impl AffineMap {
    pub const IDENTITY: AffineMap = AffineMap { linear: [[1, 0], [0, 1]], t: [0, 0] };

    /// Coordinate swap `(r, c) -> (c, r)`.
    pub const SWAP: AffineMap = AffineMap { linear: [[0, 1], [1, 0]], t: [0, 0] };

    pub fn linear(rows: [[i8; 2]; 2]) -> Self {
        AffineMap { linear: rows.map(|r| r.map(|x| x.rem_euclid(3) as u8)), t: [0, 0] }
    }

    pub fn translation(t: Label) -> Self {
        AffineMap { t, ..Self::IDENTITY }
    }

    pub fn apply(&self, x: Label) -> Label {
        let a = &self.linear;
        [
            (a[0][0] * x[0] + a[0][1] * x[1] + self.t[0]) % 3,
            (a[1][0] * x[0] + a[1][1] * x[1] + self.t[1]) % 3,
        ]
    }

    pub fn det(&self) -> u8 {
        let a = &self.linear;
        (a[0][0] * a[1][1] + 2 * a[0][1] * a[1][0]) % 3
    }

    pub fn is_invertible(&self) -> bool {
        self.det() != 0
    }

    pub fn is_special(&self) -> bool {
        self.det() == 1
    }

    pub fn is_translation(&self) -> bool {
        self.linear == Self::IDENTITY.linear
    }

    /// The induced permutation of block indices.
    pub fn permutation(&self) -> [usize; 9] {
        std::array::from_fn(|k| index(self.apply(label(k))))
    }

    /// The unique affine map realizing `perm` (a permutation of `0..9`), if any.
    pub fn from_permutation(perm: &[usize]) -> Option<AffineMap> {
        if perm.len() != 9 || perm.iter().any(|&p| p >= 9) {
            return None;
        }
        let t = label(perm[0]);
        let sub = |x: Label| [(x[0] + 3 - t[0]) % 3, (x[1] + 3 - t[1]) % 3];
        let c1 = sub(label(perm[index([1, 0])]));
        let c2 = sub(label(perm[index([0, 1])]));
        let map = AffineMap { linear: [[c1[0], c2[0]], [c1[1], c2[1]]], t };
        let ok = map.is_invertible() && (0..9).all(|k| index(map.apply(label(k))) == perm[k]);
        ok.then_some(map)
    }
}

/// All 432 affine maps with linear part in GL(2, F_3).
pub fn all_affine_gl2() -> Vec<AffineMap> {
    let mut out = Vec::with_capacity(432);
    for code in 0..81u32 {
        let d = |k: u32| ((code / 3u32.pow(k)) % 3) as u8;
        let linear = [[d(0), d(1)], [d(2), d(3)]];
        let base = AffineMap { linear, t: [0, 0] };
        if !base.is_invertible() {
            continue;
        }
        for t in 0..9 {
            out.push(AffineMap { linear, t: label(t) });
        }
    }
    out
}

/// The 12 lines of the affine plane as sorted index triples: 4 directions,
/// 3 parallel translates each.
pub fn affine_lines() -> Vec<[usize; 3]> {
    let directions: [Label; 4] = [[0, 1], [1, 0], [1, 1], [1, 2]];
    let mut lines = Vec::new();
    for dir in directions {
        for start in 0..9 {
            let p = label(start);
            let mut line: [usize; 3] = std::array::from_fn(|s| {
                let s = s as u8;
                index([(p[0] + s * dir[0]) % 3, (p[1] + s * dir[1]) % 3])
            });
            line.sort_unstable();
            if !lines.contains(&line) {
                lines.push(line);
            }
        }
    }
    lines.sort_unstable();
    lines
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_are_row_major() {
        assert_eq!(label(0), [0, 0]);
        assert_eq!(label(1), [0, 1]);
        assert_eq!(label(3), [1, 0]);
        assert_eq!(label(8), [2, 2]);
        assert!((0..9).all(|k| index(label(k)) == k));
    }

    #[test]
    fn group_sizes() {
        let all = all_affine_gl2();
        assert_eq!(all.len(), 432);
        assert_eq!(all.iter().filter(|m| m.is_special()).count(), 216);
        let mut perms: Vec<_> = all.iter().map(AffineMap::permutation).collect();
        perms.sort_unstable();
        perms.dedup();
        assert_eq!(perms.len(), 432);
    }

    #[test]
    fn twelve_lines_four_per_point() {
        let lines = affine_lines();
        assert_eq!(lines.len(), 12);
        for k in 0..9 {
            assert_eq!(lines.iter().filter(|l| l.contains(&k)).count(), 4);
        }
    }

    #[test]
    fn permutation_roundtrip() {
        for m in all_affine_gl2() {
            assert_eq!(AffineMap::from_permutation(&m.permutation()), Some(m));
        }
        let mut bad: Vec<usize> = (0..9).collect();
        bad.swap(0, 1);
        assert_eq!(AffineMap::from_permutation(&bad), None);
    }

    #[test]
    fn swap_has_determinant_minus_one() {
        assert_eq!(AffineMap::SWAP.det(), 2);
        assert_eq!(AffineMap::SWAP.permutation(), [0, 3, 6, 1, 4, 7, 2, 5, 8]);
    }
}

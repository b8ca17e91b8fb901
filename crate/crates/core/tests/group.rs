use std::collections::HashSet;
use std::time::Instant;

use waring_core::affine::{all_affine_gl2, AffineMap};
use waring_core::hesse::{build_configuration, first_block_points, incidence_automorphisms, pgl_realizable};
use waring_core::symmetry::{closure, generators, induced_permutation, stabilizes_sm, SymOp};
use waring_core::{Tau, WaringDecomposition};

fn rank18() -> WaringDecomposition {
    WaringDecomposition::rank18(&Tau::exact())
}

#[test]
fn closure_orders() {
    let d = rank18();
    for (t, c, want) in [(false, false, 216), (true, false, 432), (true, true, 864)] {
        let start = Instant::now();
        let g = closure(&generators(t, c), &d).unwrap();
        assert_eq!(g.order(), want);
        eprintln!("order {want} in {:?}", start.elapsed());
        let perms: HashSet<_> = g.elements.iter().map(|e| e.induced.perm.clone()).collect();
        assert_eq!(perms.len(), want, "induced permutations are distinct");
    }
}

#[test]
fn every_element_fixes_the_trace_form() {
    let g = closure(&generators(true, true), &rank18()).unwrap();
    assert!(g.elements.iter().all(|e| stabilizes_sm(&e.op)));
}

#[test]
fn label_images() {
    let d = rank18();
    let sl = closure(&generators(false, false), &d).unwrap();
    let firsts: HashSet<AffineMap> =
        sl.elements.iter().map(|e| e.labels.first_block.expect("block preserved")).collect();
    let special: HashSet<AffineMap> = all_affine_gl2().into_iter().filter(AffineMap::is_special).collect();
    assert_eq!(firsts, special);
    for e in &sl.elements {
        let a = e.labels.first_block.unwrap();
        let b = e.labels.second_block.expect("block preserved");
        assert_eq!(a.linear, b.linear);
        assert_eq!(b.t, [0, 0], "translations fix the second block");
    }

    let gl = closure(&generators(true, false), &d).unwrap();
    let firsts: HashSet<AffineMap> = gl.elements.iter().map(|e| e.labels.first_block.unwrap()).collect();
    assert_eq!(firsts, all_affine_gl2().into_iter().collect());
}

#[test]
fn conjugation_kernel() {
    let g = closure(&generators(true, true), &rank18()).unwrap();
    let kernel: Vec<&SymOp> = g
        .elements
        .iter()
        .filter(|e| e.labels.first_block == Some(AffineMap::IDENTITY))
        .map(|e| &e.op)
        .collect();
    assert_eq!(kernel.len(), 2);
    assert!(kernel.contains(&&SymOp::identity(3)));
    let tc = SymOp::transpose_op(3).compose(&SymOp::conjugation_op(3));
    assert!(kernel.contains(&&tc));
}

#[test]
fn composition_matches_permutations() {
    let d = rank18();
    let g = closure(&generators(true, true), &d).unwrap();
    let picks: Vec<_> = g.elements.iter().step_by(37).collect();
    for a in &picks {
        for b in &picks {
            let ab = induced_permutation(&a.op.compose(&b.op), &d).unwrap();
            assert_eq!(ab.perm, a.induced.compose(&b.induced));
        }
    }
}

#[test]
fn realizable_automorphisms_are_the_flag_free_group() {
    let d = rank18();
    let config = build_configuration(first_block_points(&d).unwrap()).unwrap();
    let realized: HashSet<_> = incidence_automorphisms(&config)
        .iter()
        .filter_map(|p| pgl_realizable(p, &config).unwrap())
        .collect();
    assert_eq!(realized.len(), 216);
    let group: HashSet<_> =
        closure(&generators(false, false), &d).unwrap().elements.into_iter().map(|e| e.op.g).collect();
    assert_eq!(realized, group);
}

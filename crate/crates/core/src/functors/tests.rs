use num::Zero;
use std::collections::BTreeMap;

use crate::linalg::{ActionMat, Mat, Rat};
use crate::operad::{assoc, comm, nilpotent, two_color_module};
use crate::seq::{all_perms, Perm, SeqOrbit};

use super::chains::ChainSpace;
use super::free::free_algebra;
use super::identities::verify_identities;
use super::maps::{alpha, chain_counit, chain_map, diagonal};
use super::prop::{gamma_hat, prop_component};
use super::{tensor_perm, ColoredSpace, GradedMap, GradedSpace};

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[test]
fn free_algebra_dims_match_closed_forms() {
    for d in 1..=3usize {
        let a = ColoredSpace::standard(&[d]);
        let free_c = free_algebra(&comm(4), &a, 3).unwrap();
        let free_a = free_algebra(&assoc(4), &a, 3).unwrap();
        for w in 1..=3usize {
            // symmetric powers for the commutative case, plain powers for
            // the associative one
            assert_eq!(free_c.grading.dim(w, 0), binom(w + d - 1, w), "comm d={d} w={w}");
            assert_eq!(free_a.grading.dim(w, 0), d.pow(w as u32), "assoc d={d} w={w}");
        }
    }
    let a2 = ColoredSpace::standard(&[2]);
    assert_eq!(
        free_algebra(&comm(4), &a2, 3).unwrap().grading.weight_dims(3),
        vec![2, 3, 4]
    );
    assert_eq!(
        free_algebra(&assoc(4), &a2, 3).unwrap().grading.weight_dims(3),
        vec![2, 4, 8]
    );
}

/// Independent route to the commutative free algebra: average the full
/// permutation group acting on the bare tensor power and take the rank.
#[test]
fn free_algebra_matches_full_group_averaging() {
    for d in 1..=3usize {
        let a = ColoredSpace::standard(&[d]);
        let free = free_algebra(&comm(4), &a, 3).unwrap();
        for w in 1..=3usize {
            let dim = d.pow(w as u32);
            let mut avg = Mat::zero(dim, dim);
            let perms = all_perms(w);
            for p in &perms {
                let tp = tensor_perm(&vec![d; w], p);
                for (src, &dst) in tp.images().iter().enumerate() {
                    let v = avg.get(dst, src) + Rat::new(1.into(), (perms.len() as i64).into());
                    avg.set(dst, src, v);
                }
            }
            assert_eq!(free.grading.dim(w, 0), avg.rank(), "d={d} w={w}");
        }
    }
}

#[test]
fn free_algebra_two_color_module_dims() {
    let op = two_color_module(4);
    let a = ColoredSpace::standard(&[2, 1]);
    let free = free_algebra(&op, &a, 3).unwrap();
    // color 0 carries a symmetric algebra; color 1 is a module over it
    for w in 1..=3usize {
        assert_eq!(free.grading.dim(w, 0), binom(w + 1, w));
        assert_eq!(free.grading.dim(w, 1), binom(w, w - 1));
    }
}

#[test]
fn prop_component_dims_and_actions() {
    let op = comm(4);
    let amb = SeqOrbit::from_sorted(vec![0, 0, 0]);
    let slots = SeqOrbit::from_sorted(vec![0, 0]);
    let pc = prop_component(&op, &amb, &slots).unwrap();
    // types (1,2) and (2,1), three placements each, one operation per slot
    assert_eq!(pc.dim(), 6);
    assert_eq!(pc.types.len(), 2);

    for g in pc.ambient_gens.iter().chain(&pc.slot_gens) {
        let m = g.to_mat();
        assert_eq!(m.matmul(&m), Mat::identity(pc.dim()), "involution");
    }
    for ag in &pc.ambient_gens {
        for sg in &pc.slot_gens {
            let (a, s) = (ag.to_mat(), sg.to_mat());
            assert_eq!(a.matmul(&s), s.matmul(&a), "actions commute");
        }
    }
}

/// Composition against the component intertwines the ambient action with
/// the operad's own relabelling action.
#[test]
fn gamma_hat_is_ambient_equivariant() {
    for op in [assoc(4), comm(4)] {
        let amb = SeqOrbit::from_sorted(vec![0, 0, 0]);
        let slots = SeqOrbit::from_sorted(vec![0, 0]);
        let pc = prop_component(&op, &amb, &slots).unwrap();
        let out_comp = op.component(&amb, 0).unwrap();
        for mu in 0..op.dim(&slots, 0) {
            let outer = op.basis_op(slots.rep(), 0, mu).unwrap();
            for (gi, &t) in amb.young_gen_positions().iter().enumerate() {
                let g = pc.ambient_gens[gi].to_mat();
                let act = out_comp.action_of(&Perm::adjacent(3, t)).to_mat();
                for b in 0..pc.dim() {
                    let gb = (0..pc.dim())
                        .find(|&i| !g.get(i, b).is_zero())
                        .expect("permutation action");
                    assert_eq!(*g.get(gb, b), Rat::from_integer(1.into()));
                    let lhs = gamma_hat(&op, &outer, &pc, gb).unwrap();
                    let rhs = act.apply(&gamma_hat(&op, &outer, &pc, b).unwrap().coords);
                    assert_eq!(lhs.coords, rhs);
                }
            }
        }
    }
}

/// Relabelling the outer operation's inputs and exchanging the slots of the
/// component at the same time leaves the composite unchanged.
#[test]
fn gamma_hat_is_slot_equivariant() {
    let op = assoc(4);
    let amb = SeqOrbit::from_sorted(vec![0, 0, 0]);
    let slots = SeqOrbit::from_sorted(vec![0, 0]);
    let pc = prop_component(&op, &amb, &slots).unwrap();
    for mu in 0..op.dim(&slots, 0) {
        let outer = op.basis_op(slots.rep(), 0, mu).unwrap();
        for (gi, &t) in slots.young_gen_positions().iter().enumerate() {
            let sigma = Perm::adjacent(slots.len(), t);
            let moved = op.act(&outer, &sigma, slots.rep()).unwrap();
            let sg = match &pc.slot_gens[gi] {
                ActionMat::Perm(p) => p.clone(),
                ActionMat::Dense(_) => panic!("slot action is a permutation"),
            };
            for b in 0..pc.dim() {
                let lhs = gamma_hat(&op, &moved, &pc, sg[b]).unwrap();
                let rhs = gamma_hat(&op, &outer, &pc, b).unwrap();
                assert_eq!(lhs.coords, rhs.coords);
            }
        }
    }
}

#[test]
fn gamma_hat_colored_slots() {
    let op = two_color_module(4);
    let amb = SeqOrbit::from_sorted(vec![0, 0, 1]);
    let slots = SeqOrbit::from_sorted(vec![0, 1]);
    let pc = prop_component(&op, &amb, &slots).unwrap();
    assert!(pc.dim() > 0);
    let outer = op.basis_op(slots.rep(), 1, 0).unwrap();
    for b in 0..pc.dim() {
        let v = gamma_hat(&op, &outer, &pc, b).unwrap();
        assert_eq!(v.inputs, amb.rep());
        assert_eq!(v.output, 1);
    }
}

/// Cowedge piece dimensions for the stock operads against closed forms:
/// invariant maps out of the regular component count plain tensors, and the
/// trivial component counts symmetric ones.
#[test]
fn cowedge_dims_match_closed_forms() {
    let c = ColoredSpace::standard(&[2]);
    let graded = GradedSpace::concentrated(&c);
    let cs_a = ChainSpace::build(&assoc(4), &graded, 1, 4).unwrap();
    let cs_c = ChainSpace::build(&comm(4), &graded, 1, 4).unwrap();
    for w in 1..=4usize {
        assert_eq!(cs_a.dim(w, 0), 2usize.pow(w as u32), "assoc w={w}");
        assert_eq!(cs_c.dim(w, 0), binom(w + 1, w), "comm w={w}");
    }
}

#[test]
fn cowedge_nilpotent_dims() {
    let op = nilpotent(comm(4), 2).unwrap();
    let c = ColoredSpace::standard(&[2]);
    let graded = GradedSpace::concentrated(&c);
    let cs = ChainSpace::build(&op, &graded, 1, 3).unwrap();
    assert_eq!(cs.dim(1, 0), 2);
    assert_eq!(cs.dim(2, 0), 3);
    assert_eq!(cs.dim(3, 0), 0);
}

#[test]
fn counit_evaluates_at_unit() {
    let c = ColoredSpace::standard(&[2]);
    let graded = GradedSpace::concentrated(&c);
    let op = assoc(4);
    let cs = ChainSpace::build(&op, &graded, 1, 3).unwrap();
    let eps = chain_counit(&op, &cs).unwrap();
    let b = eps.block(1, 0).expect("weight-1 block");
    assert_eq!(b.rows(), 2);
    assert_eq!(b.cols(), 2);
    assert_eq!(b.rank(), 2);
    assert!(eps.block(2, 0).is_none() || eps.block(2, 0).unwrap().is_zero());
}

#[test]
fn chain_map_respects_identity_and_composition() {
    let op = comm(4);
    let c = ColoredSpace::standard(&[2]);
    let graded = GradedSpace::concentrated(&c);
    let cs = ChainSpace::build(&op, &graded, 1, 3).unwrap();

    let idm = chain_map(&GradedMap::identity(&graded), &cs, &cs).unwrap();
    assert!(idm.equals(&GradedMap::identity(&cs.grading)));

    let f = GradedMap::concentrated(&c, &c, vec![Mat::from_rows(vec![
        vec![Rat::from_integer(1.into()), Rat::from_integer(2.into())],
        vec![Rat::from_integer(0.into()), Rat::from_integer(1.into())],
    ])]);
    let g = GradedMap::concentrated(&c, &c, vec![Mat::from_rows(vec![
        vec![Rat::from_integer(3.into()), Rat::from_integer(0.into())],
        vec![Rat::from_integer(1.into()), Rat::from_integer(1.into())],
    ])]);
    let cf = chain_map(&f, &cs, &cs).unwrap();
    let cg = chain_map(&g, &cs, &cs).unwrap();
    let gf = chain_map(&g.compose(&f), &cs, &cs).unwrap();
    assert!(cg.compose(&cf).equals(&gf));
}

#[test]
fn diagonal_then_counits() {
    // evaluating the outer layer of the diagonal at the unit recovers the
    // identity: project the length-2 space onto chains whose head is a
    // single position, which is exactly what the counit of the outer layer
    // does pointwise
    let op = comm(3);
    let c = ColoredSpace::standard(&[2]);
    let graded = GradedSpace::concentrated(&c);
    let p1 = ChainSpace::build(&op, &graded, 1, 3).unwrap();
    let p2 = ChainSpace::build(&op, &graded, 2, 3).unwrap();
    let d = diagonal(&op, &p1, &p2).unwrap();
    for (&(w, y), piece) in &p1.pieces {
        let m = d.block(w, y).expect("diagonal block");
        assert_eq!(m.cols(), piece.dim());
        // the diagonal embeds: composing with the unit chain projection
        // gives back the element, so the map cannot kill anything
        assert_eq!(m.rank(), piece.dim(), "diagonal injective at ({w},{y})");
    }
}

#[test]
fn alpha_injective_small() {
    for op in [comm(3), assoc(3)] {
        let c = ColoredSpace::standard(&[2]);
        let graded = GradedSpace::concentrated(&c);
        let inner = ChainSpace::build(&op, &graded, 1, 3).unwrap();
        let outer = ChainSpace::build(&op, &inner.grading, 1, 3).unwrap();
        let cod = ChainSpace::build(&op, &graded, 2, 3).unwrap();
        let a = alpha(&outer, &inner, &cod).unwrap();
        assert!(a.is_injective(), "{}", op.name);
    }
}

/// The two routes from the triple cowedge to the length-3 chain space
/// agree: associativity of the comparison maps.
#[test]
fn alpha_routes_agree_on_triple() {
    let op = nilpotent(comm(3), 2).unwrap();
    let c = ColoredSpace::standard(&[2]);
    let d0 = GradedSpace::concentrated(&c);

    let p1 = ChainSpace::build(&op, &d0, 1, 3).unwrap(); // P(C)
    let e1 = p1.grading.clone();
    let p1p1 = ChainSpace::build(&op, &e1, 1, 3).unwrap(); // P(P(C))
    let e2 = p1p1.grading.clone();
    let p1p1p1 = ChainSpace::build(&op, &e2, 1, 3).unwrap(); // P(P(P(C)))
    let p2 = ChainSpace::build(&op, &d0, 2, 3).unwrap(); // P_2(C)
    let p3 = ChainSpace::build(&op, &d0, 3, 3).unwrap(); // P_3(C)
    let p2_of_p1 = ChainSpace::build(&op, &e1, 2, 3).unwrap(); // P_2(P(C))
    let p1_of_p2 = ChainSpace::build(&op, &p2.grading, 1, 3).unwrap(); // P(P_2(C))

    // route through the inner comparison: P(P(P C)) -> P(P_2 C) -> P_3 C
    let a11 = alpha(&p1p1, &p1, &p2).unwrap(); // P(P C) -> P_2 C
    let post = chain_map(&a11, &p1p1p1, &p1_of_p2).unwrap();
    let a12 = alpha(&p1_of_p2, &p2, &p3).unwrap();
    let route1 = a12.compose(&post);

    // route through the outer comparison: P(P(P C)) -> P_2(P C) -> P_3 C
    let a11_at = alpha(&p1p1p1, &p1p1, &p2_of_p1).unwrap();
    let a21 = alpha(&p2_of_p1, &p1, &p3).unwrap();
    let route2 = a21.compose(&a11_at);

    assert!(route1.equals(&route2));
}

#[test]
fn identities_hold_for_stock_operads() {
    for op in [comm(3), assoc(3)] {
        let report = verify_identities(&op, &[2], &[2], 3, 7, 5).unwrap();
        assert!(
            report.ok(),
            "{}: {:?}",
            op.name,
            report
                .items
                .iter()
                .flat_map(|i| i.failures.clone())
                .collect::<Vec<_>>()
        );
        for item in &report.items {
            assert!(item.checked > 0, "{} ran no checks", item.name);
        }
    }
}

#[test]
fn identities_hold_for_colored_module() {
    let op = two_color_module(3);
    let report = verify_identities(&op, &[2, 1], &[1, 2], 3, 11, 3).unwrap();
    assert!(report.ok());
}

/// End-style multiplication data for the commutative operad on a space
/// where the product is coordinatewise; used to exercise the law checker in
/// both directions.
#[test]
fn algebra_and_coalgebra_checkers() {
    use super::identities::{check_algebra, check_coalgebra, AlgebraData, CoalgebraData};
    let op = comm(3);
    let a = ColoredSpace::standard(&[1]);
    let mut mult = BTreeMap::new();
    let mut comult = BTreeMap::new();
    for w in 1..=3usize {
        let orbit = SeqOrbit::from_sorted(vec![0; w]);
        // 1-dimensional space: every multiplication is plain scalar product
        mult.insert(
            (orbit.clone(), 0),
            vec![Mat::from_fn(1, 1, |_, _| Rat::from_integer(1.into()))],
        );
        comult.insert(
            (orbit.clone(), 0),
            vec![Mat::from_fn(1, 1, |_, _| Rat::from_integer(1.into()))],
        );
    }
    let ra = check_algebra(&op, &AlgebraData { space: a.clone(), mult }, 3).unwrap();
    assert!(ra.ok(), "{:?}", ra.laws.iter().flat_map(|l| l.failures.clone()).collect::<Vec<_>>());
    let rc = check_coalgebra(&op, &CoalgebraData { space: a, comult }, 3).unwrap();
    assert!(rc.ok());

    // plant a violation: scale one multiplication matrix
    let mut bad = BTreeMap::new();
    for w in 1..=3usize {
        let orbit = SeqOrbit::from_sorted(vec![0; w]);
        let m = if w == 2 {
            Mat::from_fn(1, 1, |_, _| Rat::from_integer(2.into()))
        } else {
            Mat::from_fn(1, 1, |_, _| Rat::from_integer(1.into()))
        };
        bad.insert((orbit, 0), vec![m]);
    }
    let rb = check_algebra(
        &op,
        &AlgebraData {
            space: ColoredSpace::standard(&[1]),
            mult: bad,
        },
        3,
    )
    .unwrap();
    assert!(!rb.ok());
}

/// Wrong-dimensional tensor pieces stay separated: the graded tensor keeps
/// weight vectors apart and the transposition action respects them.
#[test]
fn graded_tensor_transpositions() {
    let mut g = GradedSpace::empty(1);
    g.pieces
        .insert((1, 0), crate::linalg::FinVectSpace::numbered(2));
    g.pieces
        .insert((2, 0), crate::linalg::FinVectSpace::numbered(3));
    let gt = super::chains::GradedTensor::new(&g, &[0, 0], 3);
    // weight vectors (1,2) and (2,1)
    assert_eq!(gt.dim(), 12);
    let t = gt.transposition_action(0).to_mat();
    assert_eq!(t.matmul(&t), Mat::identity(12));
}

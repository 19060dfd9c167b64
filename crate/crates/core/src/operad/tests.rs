use super::*;
use crate::linalg::rat;
use crate::seq::sort_morphism;

/// Independent semantics for word operads: a basis element over user-order
/// inputs, evaluated on one word per input, concatenates them in the order
/// prescribed by its permutation pulled back through the sort morphism.
fn eval_word_basis(v: &OpVector, args: &[Vec<usize>]) -> Vec<usize> {
    let nz: Vec<usize> = v
        .coords
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, _)| i)
        .collect();
    assert_eq!(nz.len(), 1, "expected a basis vector");
    assert!(v.coords[nz[0]].is_one());
    let n = v.inputs.len();
    assert_eq!(args.len(), n);
    let (_, sigma) = sort_morphism(&v.inputs);
    let sigma_inv = sigma.inverse();
    let tau = Perm::from_lex_rank(n, nz[0]);
    let mut out = Vec::new();
    for j in 0..n {
        out.extend_from_slice(&args[sigma_inv.apply(tau.apply(j))]);
    }
    out
}

#[test]
fn assoc_compose_concatenates_words() {
    let op = assoc(4);
    let f = op.basis_op(&[0, 0], 0, 0).unwrap();
    let g = op.basis_op(&[0, 0], 0, 0).unwrap();
    let u = op.unit_op(0).unwrap();
    let h = op.compose(&f, &[g.clone(), u.clone()]).unwrap();
    assert_eq!(h.inputs, vec![0, 0, 0]);
    assert_eq!(eval_word_basis(&h, &[vec![0], vec![1], vec![2]]), vec![0, 1, 2]);
    // plug into the second slot of the reversal instead
    let rev = op.basis_op(&[0, 0], 0, 1).unwrap();
    let h2 = op.compose(&rev, &[u, g]).unwrap();
    assert_eq!(eval_word_basis(&h2, &[vec![0], vec![1], vec![2]]), vec![1, 2, 0]);
}

#[test]
fn act_matches_argument_reindexing() {
    let op = colored_words(4);
    // v over (b, a, b), a basis word
    let inputs = vec![1, 0, 1];
    for idx in 0..6 {
        let v = op.basis_op(&inputs, 0, idx).unwrap();
        // tau : (b,a,b) -> (a,b,b) given by 0->1, 1->0, 2->2
        let tau = Perm::from_images(vec![1, 0, 2]);
        let target = vec![0, 1, 1];
        let w = op.act(&v, &tau, &target).unwrap();
        // evaluating the moved element on b-args equals evaluating the
        // original on the pulled-back argument list
        let args_target: Vec<Vec<usize>> = vec![vec![10], vec![20], vec![30]];
        let args_source: Vec<Vec<usize>> =
            (0..3).map(|i| args_target[tau.apply(i)].clone()).collect();
        assert_eq!(
            eval_word_basis(&w, &args_target),
            eval_word_basis(&v, &args_source)
        );
    }
}

#[test]
fn colored_compose_matches_stepwise_evaluation() {
    let op = colored_words(5);
    // outer over (b, a, b) with inners in user order, some of them unsorted
    let outer_inputs = vec![1, 0, 1];
    let inner_inputs: [Vec<usize>; 3] = [vec![1, 0], vec![0], vec![0, 1]];
    let mut letter = 0;
    let mut args: Vec<Vec<Vec<usize>>> = Vec::new();
    for inp in &inner_inputs {
        let mut block = Vec::new();
        for _ in inp {
            block.push(vec![letter]);
            letter += 1;
        }
        args.push(block);
    }
    for f_idx in 0..6 {
        let f = op.basis_op(&outer_inputs, 1, f_idx).unwrap();
        for g0 in 0..2 {
            for g2 in 0..2 {
                let gs = [
                    op.basis_op(&inner_inputs[0], 1, g0).unwrap(),
                    op.basis_op(&inner_inputs[1], 0, 0).unwrap(),
                    op.basis_op(&inner_inputs[2], 1, g2).unwrap(),
                ];
                let h = op.compose(&f, &gs).unwrap();
                let flat_args: Vec<Vec<usize>> =
                    args.iter().flatten().cloned().collect();
                let direct = eval_word_basis(&h, &flat_args);
                let inner_words: Vec<Vec<usize>> = gs
                    .iter()
                    .zip(&args)
                    .map(|(g, a)| eval_word_basis(g, a))
                    .collect();
                let stepwise = eval_word_basis(&f, &inner_words);
                assert_eq!(direct, stepwise, "outer {f_idx} inners {g0},{g2}");
            }
        }
    }
}

#[test]
fn compose_is_multilinear() {
    let op = assoc(4);
    let f = op.basis_op(&[0, 0], 0, 1).unwrap();
    let a = op.basis_op(&[0, 0], 0, 0).unwrap();
    let b = op.basis_op(&[0, 0], 0, 1).unwrap();
    let mix = a.scale(&rat(2, 1)).add(&b.scale(&rat(-1, 3)));
    let u = op.unit_op(0).unwrap();
    let lhs = op.compose(&f, &[mix, u.clone()]).unwrap();
    let rhs = op
        .compose(&f, &[a, u.clone()])
        .unwrap()
        .scale(&rat(2, 1))
        .add(&op.compose(&f, &[b, u]).unwrap().scale(&rat(-1, 3)));
    assert_eq!(lhs, rhs);
}

#[test]
fn module_operad_composes_to_lines() {
    let op = two_color_module(6);
    // (a, m) -> m plugged with (a -> a unit, (a, m) -> m)
    let f = op.basis_op(&[0, 1], 1, 0).unwrap();
    let u = op.unit_op(0).unwrap();
    let g = op.basis_op(&[0, 1], 1, 0).unwrap();
    let h = op.compose(&f, &[u, g]).unwrap();
    assert_eq!(h.inputs, vec![0, 0, 1]);
    assert_eq!(h.coords, vec![rat(1, 1)]);
    // missing component: two module inputs
    assert_eq!(op.dim(&SeqOrbit::of(&[1, 1]), 1), 0);
}

#[test]
fn nilpotent_quotient_kills_high_arity() {
    let op = nilpotent(comm(6), 2).unwrap();
    let f = op.basis_op(&[0, 0], 0, 0).unwrap();
    let g = op.basis_op(&[0, 0], 0, 0).unwrap();
    let u = op.unit_op(0).unwrap();
    let h = op.compose(&f, &[g, u]).unwrap();
    assert!(h.is_zero());
    assert!(h.coords.is_empty());
}

#[test]
fn cap_is_enforced() {
    let op = comm(3);
    let f = op.basis_op(&[0, 0], 0, 0).unwrap();
    let g = op.basis_op(&[0, 0], 0, 0).unwrap();
    let err = op.compose(&f, &[g.clone(), g]).unwrap_err();
    assert!(matches!(err, Error::CapExceeded { requested: 4, cap: 3 }));
}

#[test]
fn stock_operads_satisfy_laws() {
    let opts = ValidateOptions::default();
    for op in [
        assoc(5),
        comm(6),
        two_color_module(6),
        nilpotent(comm(6), 2).unwrap(),
    ] {
        let report = op.validate(&opts).unwrap();
        assert!(report.ok(), "{}: {:?}", op.name, report);
        for law in &report.laws {
            assert!(law.checked > 0, "{}: law {} never exercised", op.name, law.law);
        }
    }
    let opts_small = ValidateOptions {
        max_arity: 3,
        ..ValidateOptions::default()
    };
    assert!(colored_words(3).validate(&opts_small).unwrap().ok());
}

#[test]
fn tabulated_operad_composes_identically() {
    let op = assoc(3);
    let tab = to_table(&op).unwrap();
    assert!(tab.validate(&ValidateOptions::default()).unwrap().ok());
    for f_idx in 0..2 {
        let f = op.basis_op(&[0, 0], 0, f_idx).unwrap();
        for g_idx in 0..2 {
            let g = op.basis_op(&[0, 0], 0, g_idx).unwrap();
            let u = op.unit_op(0).unwrap();
            let a = op.compose(&f, &[g.clone(), u.clone()]).unwrap();
            let b = tab.compose(&f, &[g, u]).unwrap();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn corrupted_table_fails_validation() {
    let mut tab = to_table(&assoc(3)).unwrap();
    if let GammaSource::Table(map) = &mut tab.gamma {
        let key = map
            .keys()
            .find(|k| k.outer.len() == 2 && k.inners.iter().all(|(o, _)| o.len() == 1))
            .cloned()
            .expect("an arity (1,1) composition");
        map.get_mut(&key).unwrap()[0].1 = rat(2, 1);
    } else {
        panic!("expected a table");
    }
    let report = tab.validate(&ValidateOptions::default()).unwrap();
    assert!(!report.ok());
    let named: Vec<&str> = report
        .laws
        .iter()
        .filter(|l| !l.failures.is_empty())
        .map(|l| l.law.as_str())
        .collect();
    assert!(
        named.contains(&"unit-laws") || named.contains(&"associativity"),
        "corruption should surface as a unit or associativity failure: {named:?}"
    );
}

#[test]
fn by_name_builds_and_rejects() {
    assert_eq!(by_name("assoc", 4).unwrap().name, "assoc");
    assert_eq!(by_name("comm-nil2", 5).unwrap().components.len(), 2);
    assert!(by_name("unknown", 3).is_err());
}

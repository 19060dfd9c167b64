use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::linalg::rat;
use crate::operad::{assoc, comm};

fn single_color_orbit(n: usize) -> SeqOrbit {
    SeqOrbit::from_sorted(vec![0; n])
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

#[test]
fn grouplike_expand_is_constant_one() {
    for op in [assoc(4), comm(4)] {
        let e = grouplike_element(&op, 0, 4).unwrap();
        let jet = expand(&op, &e, 4).unwrap();
        for n in 1..=4 {
            let orbit = single_color_orbit(n);
            let dim = op.component(&orbit, 0).unwrap().dim();
            for k in 0..dim {
                assert_eq!(jet.get(&orbit, k, 0), rat_int(1), "{} arity {n}", op.name);
            }
        }
        assert!(validate_jet(&op, &jet).ok());
    }
}

#[test]
fn grouplike_hankel_stabilizes_at_rank_one() {
    let op = assoc(6);
    let e = grouplike_element(&op, 0, 6).unwrap();
    let jet = expand(&op, &e, 6).unwrap();
    let report = hankel(&op, &jet).unwrap();
    assert_eq!(report.ranks, vec![1; 6]);
    assert!(report.stabilized);
    assert_eq!(report.state_dims, vec![1]);
}

#[test]
fn grouplike_realizes_with_one_state() {
    for op in [assoc(5), comm(5)] {
        let e = grouplike_element(&op, 0, 5).unwrap();
        let jet = expand(&op, &e, 5).unwrap();
        let Realization::Realized(e2) = realize(&op, &jet).unwrap() else {
            panic!("grouplike jet must realize over {}", op.name);
        };
        assert_eq!(e2.states.dims(), vec![1]);
        assert!(jets_equal(&expand(&op, &e2, 5).unwrap(), &jet));
        assert_eq!(e2.counit(), vec![rat_int(1)]);
    }
}

#[test]
fn primitive_pair_expand_counts_insertions() {
    for op in [assoc(4), comm(4)] {
        let e = primitive_pair_element(&op, 0, 4).unwrap();
        let jet = expand(&op, &e, 4).unwrap();
        for n in 1..=4 {
            let orbit = single_color_orbit(n);
            let dim = op.component(&orbit, 0).unwrap().dim();
            for k in 0..dim {
                assert_eq!(
                    jet.get(&orbit, k, 0),
                    rat_int(n as i64),
                    "{} arity {n}",
                    op.name
                );
            }
        }
        assert!(validate_jet(&op, &jet).ok());
    }
}

#[test]
fn primitive_pair_comultiplies_into_single_insertions() {
    let op = assoc(3);
    let e = primitive_pair_element(&op, 0, 3).unwrap();
    let orbit = single_color_orbit(2);

    let terms = comult_terms(&e, &orbit, 0).unwrap();
    assert_eq!(terms.len(), 2);
    for (coeff, factors) in &terms {
        assert_eq!(*coeff, rat_int(1));
        assert_eq!(factors.len(), 2);
    }
    // x splits as g (x) x + x (x) g, in tensor index order
    assert_eq!(terms[0].1[0].initial, unit_vec(2, 0));
    assert_eq!(terms[0].1[1].initial, unit_vec(2, 1));
    assert_eq!(terms[1].1[0].initial, unit_vec(2, 1));
    assert_eq!(terms[1].1[1].initial, unit_vec(2, 0));

    let at_g = e.with_initial(0, unit_vec(2, 0)).unwrap();
    let terms_g = comult_terms(&at_g, &orbit, 0).unwrap();
    assert_eq!(terms_g.len(), 1);
    assert_eq!(terms_g[0].1[0].initial, unit_vec(2, 0));
    assert_eq!(terms_g[0].1[1].initial, unit_vec(2, 0));
}

#[test]
fn primitive_pair_realizes_minimally() {
    let op = assoc(4);
    let e = primitive_pair_element(&op, 0, 4).unwrap();
    let jet = expand(&op, &e, 4).unwrap();
    let e2 = match realize(&op, &jet).unwrap() {
        Realization::Realized(e2) => e2,
        Realization::Failed(f) => panic!("primitive pair jet must realize: {}", f.reason),
    };
    assert_eq!(e2.states.dims(), vec![2]);
    assert!(jets_equal(&expand(&op, &e2, 4).unwrap(), &jet));
    assert_eq!(e2.counit(), vec![rat_int(1)]);
}

#[test]
fn translate_pairs_like_direct_evaluation() {
    let op = assoc(5);
    let e = primitive_pair_element(&op, 0, 5).unwrap();
    let jet = expand(&op, &e, 5).unwrap();
    let head = single_color_orbit(2);
    let ctx = Context {
        orbit: head.clone(),
        head_idx: 0,
        slot: 1,
        args: vec![(1, 0)],
    };
    let translated = translate(&op, &jet, &ctx).unwrap();
    assert_eq!(translated.cap, 4);
    assert!(validate_jet(&op, &translated).ok());

    let free = free_algebra(&op, &jet.target, 4).unwrap();
    let arg = co_element(&free, 1, 0, 0).unwrap();
    let mut memo = EvalMemo::new();
    for w in 1..=4 {
        for class in 0..free.grading.dim(w, 0) {
            let lhs = pair_class(&free, &translated, w, class).unwrap();
            let hole = co_element(&free, w, 0, class).unwrap();
            let rhs = eval_element(&op, &jet, &head, 0, &[&arg, &hole], &mut memo);
            assert_eq!(lhs, rhs, "weight {w} class {class}");
        }
    }
}

#[test]
fn translate_of_grouplike_is_grouplike() {
    let op = assoc(5);
    let e = grouplike_element(&op, 0, 5).unwrap();
    let jet = expand(&op, &e, 5).unwrap();
    let ctx = Context {
        orbit: single_color_orbit(3),
        head_idx: 0,
        slot: 0,
        args: vec![(1, 0), (1, 0)],
    };
    let translated = translate(&op, &jet, &ctx).unwrap();
    let expected = expand(&op, &grouplike_element(&op, 0, 3).unwrap(), 3).unwrap();
    assert!(jets_equal(&translated, &expected));
}

#[test]
fn zero_jet_realizes_with_no_states() {
    let op = assoc(3);
    let zero = Jet::zero("assoc", ColoredSpace::standard(&[1]), 0, 3);
    let report = hankel(&op, &zero).unwrap();
    assert_eq!(report.ranks, vec![0, 0, 0]);
    assert!(report.stabilized);
    let Realization::Realized(e) = realize(&op, &zero).unwrap() else {
        panic!("zero jet must realize");
    };
    assert_eq!(e.states.dims(), vec![0]);
    assert!(jets_equal(&expand(&op, &e, 3).unwrap(), &zero));
}

#[test]
fn matched_blocks_agrees_with_projection_classes() {
    let op = assoc(4);
    let jet = matched_blocks_jet(&op, 4).unwrap();
    let free = free_algebra(&op, &ColoredSpace::standard(&[2]), 4).unwrap();
    for k in 1..=2usize {
        let n = 2 * k;
        let orbit = single_color_orbit(n);
        let block = free.block(&orbit, 0).unwrap();
        let tdim = 1usize << n;
        let word: Vec<usize> = (0..n).map(|i| usize::from(i >= k)).collect();
        let amb = Perm::identity(n).lex_rank() * tdim + flat_index(&word, &vec![2; n]);
        let class = block.proj.apply(&unit_vec(block.ambient.dim(), amb));
        let hits: Vec<usize> = (0..class.len()).filter(|&i| !class[i].is_zero()).collect();
        assert_eq!(hits.len(), 1, "the seed word lies in a single class");
        let row = hits[0];
        assert_eq!(class[row], rat_int(1));
        for a in 0..block.ambient.dim() {
            assert_eq!(
                jet.get(&orbit, a / tdim, a % tdim),
                block.proj.mat.get(row, a).clone(),
                "arity {n} ambient {a}"
            );
        }
    }
}

#[test]
fn matched_blocks_jet_is_invariant() {
    let op = assoc(6);
    let jet = matched_blocks_jet(&op, 6).unwrap();
    assert!(validate_jet(&op, &jet).ok());
    for k in 1..=3usize {
        let n = 2 * k;
        let block = &jet.entries[&single_color_orbit(n)];
        assert_eq!(block.len(), factorial(n));
        assert!(block.values().all(|v| *v == rat_int(1)));
    }
    assert!(!jet.entries.contains_key(&single_color_orbit(3)));
}

/// Hankel ranks of the language `a^k b^k` computed directly on words:
/// two-sided word contexts against middle words, level by level with the
/// same budget split as the operadic grid.
fn word_model_ranks(cap: usize) -> Vec<usize> {
    fn words(len: usize) -> Vec<Vec<usize>> {
        (0..1usize << len)
            .map(|bits| (0..len).map(|i| (bits >> (len - 1 - i)) & 1).collect())
            .collect()
    }
    fn in_language(w: &[usize]) -> bool {
        let n = w.len();
        n >= 2
            && n % 2 == 0
            && w[..n / 2].iter().all(|&c| c == 0)
            && w[n / 2..].iter().all(|&c| c == 1)
    }
    let mut ranks = Vec::with_capacity(cap);
    for l in 1..=cap {
        let rb = l / 2;
        let cb = l - rb;
        let mut cols: Vec<Vec<usize>> = Vec::new();
        for len in 1..=cb {
            cols.extend(words(len));
        }
        let mut rows = Vec::new();
        for lu in 0..=rb {
            for lv in 0..=(rb - lu) {
                for u in words(lu) {
                    for v in words(lv) {
                        let row: Vec<Rat> = cols
                            .iter()
                            .map(|w| {
                                let mut full = u.clone();
                                full.extend(w);
                                full.extend(&v);
                                rat_int(i64::from(in_language(&full)))
                            })
                            .collect();
                        rows.push(row);
                    }
                }
            }
        }
        ranks.push(Mat::from_rows(rows).rank());
    }
    ranks
}

#[test]
fn matched_blocks_hankel_tracks_the_word_model() {
    for cap in [4usize, 6] {
        let op = assoc(cap);
        let jet = matched_blocks_jet(&op, cap).unwrap();
        let Realization::Failed(fail) = realize(&op, &jet).unwrap() else {
            panic!("a growing rank profile cannot realize at cap {cap}");
        };
        assert_eq!(fail.report.ranks, word_model_ranks(cap), "cap {cap}");
        assert!(!fail.report.stabilized, "cap {cap}");
        assert!(fail.reason.contains("rank"));
    }
}

#[test]
fn matched_blocks_rank_growth_spans_the_cap() {
    let op = assoc(8);
    let jet = matched_blocks_jet(&op, 8).unwrap();
    let Realization::Failed(fail) = realize(&op, &jet).unwrap() else {
        panic!("a growing rank profile cannot realize at cap 8");
    };
    let report = fail.report;
    assert_eq!(report.ranks, word_model_ranks(8));
    assert!(!report.stabilized);
    // the level ranks at 4, 6, 8 are exactly the final ranks of the
    // smaller-cap grids, and they keep growing
    assert!(report.ranks[3] < report.ranks[5]);
    assert!(report.ranks[5] < report.ranks[7]);
}

#[test]
fn validate_jet_flags_corruption() {
    let op = assoc(4);
    let jet = matched_blocks_jet(&op, 4).unwrap();

    let mut bent = jet.clone();
    let orbit = single_color_orbit(4);
    let &(k, t) = bent.entries[&orbit].keys().next().unwrap();
    bent.set(&orbit, k, t, rat_int(2));
    let report = validate_jet(&op, &bent);
    assert!(!report.ok());
    assert!(report.laws.iter().any(|l| l.law == "stabilizer-equivariance"
        && !l.failures.is_empty()));

    let mut off = jet.clone();
    off.set(&single_color_orbit(2), 99, 0, rat_int(1));
    let report = validate_jet(&op, &off);
    assert!(report
        .laws
        .iter()
        .any(|l| l.law == "shape" && !l.failures.is_empty()));
}

#[test]
fn jet_linear_operations() {
    let op = assoc(4);
    let jet = matched_blocks_jet(&op, 4).unwrap();

    let cancelled = jet.add(&jet.scale(&rat_int(-1))).unwrap();
    assert!(cancelled.is_zero());

    let doubled = jet.add(&jet).unwrap();
    assert_eq!(doubled.get(&single_color_orbit(2), 0, 1), rat_int(2));
    assert_eq!(
        doubled.scale(&rat(1, 2)).get(&single_color_orbit(2), 0, 1),
        rat_int(1)
    );

    let low = jet.truncate(2);
    assert_eq!(low.cap, 2);
    assert!(low.entries.contains_key(&single_color_orbit(2)));
    assert!(!low.entries.contains_key(&single_color_orbit(4)));
    assert!(jet.add(&low).is_err(), "caps must match");
}

#[test]
fn lift_gates_on_coalgebra_laws() {
    let op = assoc(3);
    let e = primitive_pair_element(&op, 0, 3).unwrap();

    let relifted = lift(
        &op,
        e.target.clone(),
        e.coalgebra(),
        e.output.clone(),
        0,
        unit_vec(2, 1),
        3,
    );
    assert!(relifted.is_ok());

    let mut bad = e.coalgebra();
    let mats = bad
        .comult
        .get_mut(&(single_color_orbit(2), 0))
        .unwrap();
    mats[0].set(0, 0, rat_int(5));
    assert!(lift(
        &op,
        e.target.clone(),
        bad,
        e.output.clone(),
        0,
        unit_vec(2, 1),
        3
    )
    .is_err());

    assert!(matches!(
        expand(&op, &e, 4),
        Err(crate::error::Error::CapExceeded { .. })
    ));
}

#[test]
fn projection_row_jets_validate_and_translate() {
    let op = assoc(4);
    let target = ColoredSpace::standard(&[2]);
    let free = free_algebra(&op, &target, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);

    let mut jet = Jet::zero("assoc", target.clone(), 0, 4);
    for n in 1..=4 {
        let orbit = single_color_orbit(n);
        let block = free.block(&orbit, 0).unwrap();
        let tdim = 1usize << n;
        for _ in 0..2 {
            let row = rng.gen_range(0..block.class_dim());
            let coeff = rat_int(rng.gen_range(-3..=3i64));
            for a in 0..block.ambient.dim() {
                let v = jet.get(&orbit, a / tdim, a % tdim)
                    + &coeff * block.proj.mat.get(row, a);
                jet.set(&orbit, a / tdim, a % tdim, v);
            }
        }
    }
    assert!(validate_jet(&op, &jet).ok());

    let head = single_color_orbit(2);
    let ctx = Context {
        orbit: head.clone(),
        head_idx: 1,
        slot: 0,
        args: vec![(1, rng.gen_range(0..2))],
    };
    let translated = translate(&op, &jet, &ctx).unwrap();
    assert!(validate_jet(&op, &translated).ok());

    let arg = co_element(&free, 1, 0, ctx.args[0].1).unwrap();
    let mut memo = EvalMemo::new();
    for w in 1..=3 {
        for class in 0..free.grading.dim(w, 0) {
            let hole = co_element(&free, w, 0, class).unwrap();
            assert_eq!(
                pair_class(&free, &translated, w, class).unwrap(),
                eval_element(&op, &jet, &head, 1, &[&hole, &arg], &mut memo),
                "weight {w} class {class}"
            );
        }
    }
}

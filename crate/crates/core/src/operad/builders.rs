//! Stock operads and conversions between rule-based and tabulated form.

use std::collections::BTreeMap;

use num::One;

use crate::error::{Error, Result};
use crate::linalg::{ActionMat, FinVectSpace, Label, Rat};
use crate::seq::{all_perms, orbits_of_len, Color, Palette, SeqOrbit};

use super::{Component, GammaKey, GammaSource, OperadData};

fn perm_labels(n: usize) -> Vec<Label> {
    all_perms(n)
        .iter()
        .map(|p| Label::Tuple(p.images().iter().map(|&i| Label::Num(i)).collect()))
        .collect()
}

/// Stabilizer generators of a full permutation component: the generator at
/// position `t` sends the basis word indexed by `tau` to the one indexed by
/// `s_t ∘ tau`.
fn word_component(orbit: SeqOrbit, output: Color) -> Component {
    let n = orbit.len();
    let perms = all_perms(n);
    let space = FinVectSpace::new(perm_labels(n)).expect("distinct permutation labels");
    let gens = orbit
        .young_gen_positions()
        .iter()
        .map(|&t| {
            let mut images = vec![0usize; perms.len()];
            for (r, p) in perms.iter().enumerate() {
                let im: Vec<usize> = p
                    .images()
                    .iter()
                    .map(|&v| {
                        if v == t {
                            t + 1
                        } else if v == t + 1 {
                            t
                        } else {
                            v
                        }
                    })
                    .collect();
                images[r] = crate::seq::Perm::from_images(im).lex_rank();
            }
            ActionMat::Perm(images)
        })
        .collect();
    Component::new(orbit, output, space, gens).expect("generator shapes agree")
}

fn line_component(orbit: SeqOrbit, output: Color) -> Component {
    let gens = orbit
        .young_gen_positions()
        .iter()
        .map(|_| ActionMat::identity_perm(1))
        .collect();
    Component::new(
        orbit,
        output,
        FinVectSpace::atoms(["e"]).expect("one atom"),
        gens,
    )
    .expect("line component")
}

/// Words in one color: the component of arity `n` has the permutations of
/// `n` as basis, composition concatenates words.
pub fn assoc(cap: usize) -> OperadData {
    let palette = Palette::single("x");
    let mut components = BTreeMap::new();
    for n in 1..=cap {
        let orbit = SeqOrbit::from_sorted(vec![0; n]);
        components.insert((orbit.clone(), 0), word_component(orbit, 0));
    }
    OperadData {
        name: "assoc".into(),
        palette,
        cap,
        components,
        units: BTreeMap::from([(0, vec![Rat::one()])]),
        gamma: GammaSource::AssocWords,
    }
}

/// One color, every component a line, every coefficient 1.
pub fn comm(cap: usize) -> OperadData {
    let palette = Palette::single("x");
    let mut components = BTreeMap::new();
    for n in 1..=cap {
        let orbit = SeqOrbit::from_sorted(vec![0; n]);
        components.insert((orbit.clone(), 0), line_component(orbit, 0));
    }
    OperadData {
        name: "comm".into(),
        palette,
        cap,
        components,
        units: BTreeMap::from([(0, vec![Rat::one()])]),
        gamma: GammaSource::OneDim,
    }
}

/// Word components over two colors, for every input orbit and output. Used
/// mainly to exercise symmetry bookkeeping: components are permutation-sized
/// and stabilizers act freely.
pub fn colored_words(cap: usize) -> OperadData {
    let palette = Palette::new(vec!["a".into(), "b".into()]).expect("two distinct colors");
    let mut components = BTreeMap::new();
    for n in 1..=cap {
        for orbit in orbits_of_len(2, n) {
            for output in 0..2 {
                components.insert((orbit.clone(), output), word_component(orbit.clone(), output));
            }
        }
    }
    OperadData {
        name: "words2".into(),
        palette,
        cap,
        components,
        units: BTreeMap::from([(0, vec![Rat::one()]), (1, vec![Rat::one()])]),
        gamma: GammaSource::AssocWords,
    }
}

/// Two colors `a` (an algebra) and `m` (a module over it): a line over
/// all-`a` inputs with output `a`, and a line over inputs with exactly one
/// `m` when the output is `m`.
pub fn two_color_module(cap: usize) -> OperadData {
    let palette = Palette::new(vec!["a".into(), "m".into()]).expect("two distinct colors");
    let mut components = BTreeMap::new();
    for n in 1..=cap {
        let all_a = SeqOrbit::from_sorted(vec![0; n]);
        components.insert((all_a.clone(), 0), line_component(all_a, 0));
        let mut with_m = vec![0; n - 1];
        with_m.push(1);
        let orbit = SeqOrbit::from_sorted(with_m);
        components.insert((orbit.clone(), 1), line_component(orbit, 1));
    }
    OperadData {
        name: "module2".into(),
        palette,
        cap,
        components,
        units: BTreeMap::from([(0, vec![Rat::one()]), (1, vec![Rat::one()])]),
        gamma: GammaSource::OneDim,
    }
}

/// Quotient that kills every component of arity above `degree`. Composites
/// whose total arity exceeds the degree become zero, so towers over the
/// result stabilize.
pub fn nilpotent(base: OperadData, degree: usize) -> Result<OperadData> {
    if degree == 0 {
        return Err(Error::NotNilpotent { degree, arity: 1 });
    }
    let components = base
        .components
        .into_iter()
        .filter(|((orbit, _), _)| orbit.len() <= degree)
        .collect();
    Ok(OperadData {
        name: format!("{}-nil{}", base.name, degree),
        palette: base.palette,
        cap: base.cap,
        components,
        units: base.units,
        gamma: base.gamma,
    })
}

/// Stock operads by name: `assoc`, `comm`, `module2`, `words2`, each
/// optionally suffixed `-nil<degree>`.
pub fn by_name(name: &str, cap: usize) -> Result<OperadData> {
    let (stem, degree) = match name.rsplit_once("-nil") {
        Some((stem, d)) => {
            let degree: usize = d
                .parse()
                .map_err(|_| Error::bad_input(format!("bad nilpotence degree in {name:?}")))?;
            (stem, Some(degree))
        }
        None => (name, None),
    };
    let base = match stem {
        "assoc" => assoc(cap),
        "comm" => comm(cap),
        "module2" => two_color_module(cap),
        "words2" => colored_words(cap),
        other => {
            return Err(Error::bad_input(format!("unknown operad name {other:?}")))
        }
    };
    match degree {
        None => Ok(base),
        Some(d) => nilpotent(base, d),
    }
}

/// Tabulates the composition rule of an operad: every structure coefficient
/// on basis elements at sorted representatives, for composites within the
/// cap. The result composes identically but through table lookups.
pub fn to_table(op: &OperadData) -> Result<OperadData> {
    let mut by_output: BTreeMap<Color, Vec<&(SeqOrbit, Color)>> = BTreeMap::new();
    for key in op.components.keys() {
        by_output.entry(key.1).or_default().push(key);
    }
    let empty: Vec<&(SeqOrbit, Color)> = Vec::new();
    let mut table: BTreeMap<GammaKey, Vec<(usize, Rat)>> = BTreeMap::new();
    for ((f_orbit, output), comp_f) in &op.components {
        let n = f_orbit.len();
        let mut stack: Vec<Vec<&(SeqOrbit, Color)>> = vec![vec![]];
        for j in 0..n {
            let color = f_orbit.rep()[j];
            let cands = by_output.get(&color).unwrap_or(&empty);
            let mut next = Vec::new();
            for partial in &stack {
                let used: usize = partial.iter().map(|k| k.0.len()).sum();
                let slots_left = n - j - 1;
                for cand in cands {
                    if used + cand.0.len() + slots_left <= op.cap {
                        let mut ext = partial.clone();
                        ext.push(cand);
                        next.push(ext);
                    }
                }
            }
            stack = next;
        }
        for assignment in &stack {
            let inner_dims: Vec<usize> =
                assignment.iter().map(|k| op.dim(&k.0, k.1)).collect();
            if inner_dims.iter().any(|&d| d == 0) {
                continue;
            }
            let mut odo = vec![0usize; n + 1];
            let dims: Vec<usize> = std::iter::once(comp_f.dim())
                .chain(inner_dims.iter().copied())
                .collect();
            'tuples: loop {
                let f = op.basis_op(f_orbit.rep(), *output, odo[0])?;
                let gs: Vec<_> = assignment
                    .iter()
                    .zip(&odo[1..])
                    .map(|(k, &i)| op.basis_op(k.0.rep(), k.1, i))
                    .collect::<Result<_>>()?;
                let result = op.compose(&f, &gs)?;
                let entries: Vec<(usize, Rat)> = result
                    .coords
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !num::Zero::is_zero(*c))
                    .map(|(i, c)| (i, c.clone()))
                    .collect();
                if !entries.is_empty() {
                    let key = GammaKey {
                        outer: f_orbit.rep().to_vec(),
                        output: *output,
                        outer_idx: odo[0],
                        inners: assignment
                            .iter()
                            .zip(&odo[1..])
                            .map(|(k, &i)| (k.0.rep().to_vec(), i))
                            .collect(),
                    };
                    table.insert(key, entries);
                }
                let mut j = dims.len();
                loop {
                    if j == 0 {
                        break 'tuples;
                    }
                    j -= 1;
                    odo[j] += 1;
                    if odo[j] < dims[j] {
                        break;
                    }
                    odo[j] = 0;
                }
            }
        }
    }
    Ok(OperadData {
        name: format!("{}-table", op.name),
        palette: op.palette.clone(),
        cap: op.cap,
        components: op.components.clone(),
        units: op.units.clone(),
        gamma: GammaSource::Table(table),
    })
}

//! Finite sequences of colors and their permutation groupoid.
//!
//! A morphism `σ : x̄ → ȳ` between sequences of equal length is a permutation
//! with `x[i] = y[σ(i)]` for all `i`; there are no morphisms between
//! sequences of different lengths. Orbits are represented by the sorted
//! sequence, and every sequence carries a canonical stable-sort morphism to
//! its representative, which trivializes all transport bookkeeping.

mod induce;
mod perm;

pub use induce::{induce, IndPartition, InduceSlot, InducedRep};
pub use perm::{all_perms, Perm};

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Interned color: an index into the owning [`Palette`].
pub type Color = usize;

/// Sequence of colors; possibly empty, though no operad component lives over
/// the empty sequence.
pub type ColorSeq = Vec<Color>;

/// Ordered set of color names. Sequences and orbits hold indices into it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    names: Vec<String>,
}

impl Palette {
    pub fn new(names: Vec<String>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for n in &names {
            if !seen.insert(n.clone()) {
                return Err(Error::bad_input(format!("duplicate color {n:?}")));
            }
        }
        if names.is_empty() {
            return Err(Error::bad_input("palette must have at least one color"));
        }
        Ok(Palette { names })
    }

    pub fn single(name: &str) -> Self {
        Palette {
            names: vec![name.to_string()],
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, c: Color) -> &str {
        &self.names[c]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<Color> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownColor(name.to_string()))
    }

    pub fn seq_names(&self, seq: &[Color]) -> Vec<String> {
        seq.iter().map(|&c| self.names[c].clone()).collect()
    }
}

/// Orbit of a color sequence under permutation: the sorted representative.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeqOrbit {
    sorted: ColorSeq,
}

impl SeqOrbit {
    pub fn of(seq: &[Color]) -> Self {
        let mut sorted = seq.to_vec();
        sorted.sort_unstable();
        SeqOrbit { sorted }
    }

    /// Wraps a sequence that is already sorted.
    pub fn from_sorted(sorted: ColorSeq) -> Self {
        debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
        SeqOrbit { sorted }
    }

    pub fn rep(&self) -> &[Color] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Multiplicity of each color, in color order.
    pub fn multiplicities(&self) -> BTreeMap<Color, usize> {
        let mut m = BTreeMap::new();
        for &c in &self.sorted {
            *m.entry(c).or_insert(0) += 1;
        }
        m
    }

    /// Indices `i` with `rep[i] = rep[i+1]`: the adjacent transpositions
    /// generating the stabilizer (a Young subgroup).
    pub fn young_gen_positions(&self) -> Vec<usize> {
        (0..self.sorted.len().saturating_sub(1))
            .filter(|&i| self.sorted[i] == self.sorted[i + 1])
            .collect()
    }

    /// Order of the stabilizer group.
    pub fn stabilizer_order(&self) -> u64 {
        self.multiplicities()
            .values()
            .map(|&m| (1..=m as u64).product::<u64>())
            .product()
    }

    /// All elements of the stabilizer, products of per-class permutations.
    pub fn stabilizer_elements(&self) -> Vec<Perm> {
        let n = self.sorted.len();
        let mut classes: Vec<(usize, usize)> = Vec::new(); // (start, len)
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j < n && self.sorted[j] == self.sorted[i] {
                j += 1;
            }
            classes.push((i, j - i));
            i = j;
        }
        let mut elems = vec![Perm::identity(n)];
        for (start, len) in classes {
            let locals = all_perms(len);
            let mut next = Vec::with_capacity(elems.len() * locals.len());
            for e in &elems {
                for l in &locals {
                    let mut images = e.images().to_vec();
                    for k in 0..len {
                        images[start + k] = e.apply(start + l.apply(k));
                    }
                    next.push(Perm::from_images(images));
                }
            }
            elems = next;
        }
        elems
    }
}

/// The canonical morphism `seq → sorted(seq)` given by stable sorting:
/// positions of equal colors stay in their original relative order.
pub fn sort_morphism(seq: &[Color]) -> (SeqOrbit, Perm) {
    let mut order: Vec<usize> = (0..seq.len()).collect();
    order.sort_by_key(|&i| (seq[i], i));
    let mut images = vec![0; seq.len()];
    for (rank, &i) in order.iter().enumerate() {
        images[i] = rank;
    }
    (SeqOrbit::of(seq), Perm::from_images(images))
}

/// All morphisms `x̄ → ȳ`, i.e. permutations `σ` with `x[i] = y[σ(i)]`,
/// in lexicographic order of the one-line form. Empty when the lengths or
/// color multisets differ.
pub fn hom_set(x: &[Color], y: &[Color]) -> Vec<Perm> {
    if x.len() != y.len() {
        return vec![];
    }
    let n = x.len();
    let mut used = vec![false; n];
    let mut cur = Vec::with_capacity(n);
    let mut out = Vec::new();
    fn rec(
        x: &[Color],
        y: &[Color],
        used: &mut Vec<bool>,
        cur: &mut Vec<usize>,
        out: &mut Vec<Perm>,
    ) {
        let i = cur.len();
        if i == x.len() {
            out.push(Perm::from_images(cur.clone()));
            return;
        }
        for j in 0..x.len() {
            if !used[j] && y[j] == x[i] {
                used[j] = true;
                cur.push(j);
                rec(x, y, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    rec(x, y, &mut used, &mut cur, &mut out);
    out
}

/// Expresses a stabilizer element of `orbit` as a word in the adjacent
/// transpositions returned by `young_gen_positions`: the result `w` satisfies
/// `δ = s_{w[0]} ∘ s_{w[1]} ∘ … ∘ s_{w[k-1]}`.
pub fn young_word(orbit: &SeqOrbit, delta: &Perm) -> Vec<usize> {
    debug_assert!({
        let rep = orbit.rep();
        (0..rep.len()).all(|i| rep[i] == rep[delta.apply(i)])
    });
    let mut w = delta.images().to_vec();
    let mut word_rev = Vec::new();
    loop {
        let Some(i) = (0..w.len().saturating_sub(1)).find(|&i| w[i] > w[i + 1]) else {
            break;
        };
        debug_assert_eq!(orbit.rep()[i], orbit.rep()[i + 1]);
        w.swap(i, i + 1);
        word_rev.push(i);
    }
    word_rev.reverse();
    word_rev
}

/// All orbits of length `n` over `num_colors` colors, i.e. nondecreasing
/// sequences, in lexicographic order.
pub fn orbits_of_len(num_colors: usize, n: usize) -> Vec<SeqOrbit> {
    let mut out = Vec::new();
    let mut cur: ColorSeq = Vec::with_capacity(n);
    fn rec(num_colors: usize, n: usize, min: Color, cur: &mut ColorSeq, out: &mut Vec<SeqOrbit>) {
        if cur.len() == n {
            out.push(SeqOrbit::from_sorted(cur.clone()));
            return;
        }
        for c in min..num_colors {
            cur.push(c);
            rec(num_colors, n, c, cur, out);
            cur.pop();
        }
    }
    rec(num_colors, n, 0, &mut cur, &mut out);
    out
}

/// One way of splitting an orbit into an ordered tuple of nonempty blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// Orbit of each block, slot by slot.
    pub blocks: Vec<SeqOrbit>,
    /// Number of ordered set partitions of the positions of the sorted
    /// representative realizing this tuple of block orbits.
    pub multiplicity: u64,
}

/// Enumerates the orbit representatives of decompositions of `orbit` into
/// `m` nonempty blocks, with multiplicities. Deterministic lexicographic
/// order in the per-color count tables.
pub fn block_decompositions(orbit: &SeqOrbit, m: usize) -> Vec<Decomposition> {
    let mults = orbit.multiplicities();
    let colors: Vec<Color> = mults.keys().copied().collect();
    let counts: Vec<usize> = colors.iter().map(|c| mults[c]).collect();
    if m == 0 || orbit.len() < m {
        return vec![];
    }
    // per color: all ways to write its count as an ordered sum of m
    // nonnegative parts, lexicographically.
    fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
        if parts == 0 {
            return if total == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for first in 0..=total {
            for mut rest in compositions(total - first, parts - 1) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let per_color: Vec<Vec<Vec<usize>>> =
        counts.iter().map(|&c| compositions(c, m)).collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; colors.len()];
    loop {
        // assemble the decomposition for the current choice
        let mut slot_counts = vec![vec![0usize; colors.len()]; m];
        for (ci, &pick) in choice.iter().enumerate() {
            for slot in 0..m {
                slot_counts[slot][ci] = per_color[ci][pick][slot];
            }
        }
        if slot_counts.iter().all(|sc| sc.iter().sum::<usize>() > 0) {
            let blocks: Vec<SeqOrbit> = slot_counts
                .iter()
                .map(|sc| {
                    let mut seq = Vec::new();
                    for (ci, &k) in sc.iter().enumerate() {
                        seq.extend(std::iter::repeat(colors[ci]).take(k));
                    }
                    SeqOrbit::from_sorted(seq)
                })
                .collect();
            let multiplicity: u64 = (0..colors.len())
                .map(|ci| {
                    let total = counts[ci] as u64;
                    let mut numer: u64 = (1..=total).product();
                    for slot in 0..m {
                        let k = slot_counts[slot][ci] as u64;
                        numer /= (1..=k).product::<u64>().max(1);
                    }
                    numer
                })
                .product();
            out.push(Decomposition {
                blocks,
                multiplicity,
            });
        }
        // advance the mixed-radix choice vector
        let mut ci = colors.len();
        loop {
            if ci == 0 {
                return out;
            }
            ci -= 1;
            choice[ci] += 1;
            if choice[ci] < per_color[ci].len() {
                break;
            }
            choice[ci] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hom_set_respects_colors() {
        // x = (a,b,a), y = (a,a,b): σ with x_i = y_{σ(i)}
        let homs = hom_set(&[0, 1, 0], &[0, 0, 1]);
        assert_eq!(homs.len(), 2);
        for h in &homs {
            assert_eq!(h.apply(1), 2);
        }
        assert!(hom_set(&[0, 1], &[0, 0]).is_empty());
        assert!(hom_set(&[0], &[0, 0]).is_empty());
    }

    #[test]
    fn sort_morphism_is_stable() {
        let (orbit, s) = sort_morphism(&[1, 0, 1, 0]);
        assert_eq!(orbit.rep(), &[0, 0, 1, 1]);
        // first 0 (position 1) lands before second 0 (position 3)
        assert!(s.apply(1) < s.apply(3));
        assert!(s.apply(0) < s.apply(2));
        // morphism condition: seq[i] = rep[s(i)]
        let seq = [1, 0, 1, 0];
        for i in 0..4 {
            assert_eq!(seq[i], orbit.rep()[s.apply(i)]);
        }
    }

    #[test]
    fn young_word_reconstructs_stabilizer_elements() {
        let orbit = SeqOrbit::from_sorted(vec![0, 0, 0, 1, 1]);
        for delta in orbit.stabilizer_elements() {
            let word = young_word(&orbit, &delta);
            let mut acc = Perm::identity(5);
            for &i in word.iter().rev() {
                acc = Perm::adjacent(5, i).compose(&acc);
            }
            assert_eq!(acc, delta);
            assert!(word.iter().all(|i| orbit.rep()[*i] == orbit.rep()[*i + 1]));
        }
    }

    #[test]
    fn stabilizer_order_matches_enumeration() {
        let orbit = SeqOrbit::from_sorted(vec![0, 0, 1, 1, 1]);
        assert_eq!(orbit.stabilizer_order(), 12);
        assert_eq!(orbit.stabilizer_elements().len(), 12);
    }

    #[test]
    fn single_color_decomposition_count() {
        // ways to decompose 3 identical letters into 2 nonempty blocks:
        // (1,2) and (2,1), multiplicities C(3,1) and C(3,2)
        let orbit = SeqOrbit::from_sorted(vec![0, 0, 0]);
        let decs = block_decompositions(&orbit, 2);
        assert_eq!(decs.len(), 2);
        let total: u64 = decs.iter().map(|d| d.multiplicity).sum();
        assert_eq!(total, 6);
    }

    #[test]
    fn orbit_enumeration_counts_multisets() {
        assert_eq!(orbits_of_len(2, 3).len(), 4);
        assert_eq!(orbits_of_len(3, 2).len(), 6);
        assert_eq!(orbits_of_len(1, 5), vec![SeqOrbit::from_sorted(vec![0; 5])]);
    }

    #[test]
    fn two_color_decompositions() {
        let orbit = SeqOrbit::from_sorted(vec![0, 0, 1]);
        let decs = block_decompositions(&orbit, 2);
        // slot patterns: per color compositions filtered to nonempty slots
        assert!(decs
            .iter()
            .all(|d| d.blocks.iter().all(|b| !b.is_empty())));
        let total: u64 = decs.iter().map(|d| d.multiplicity).sum();
        // ordered set partitions of {p1,p2,q} into 2 nonempty blocks: 2^3-2 = 6
        assert_eq!(total, 6);
    }
}

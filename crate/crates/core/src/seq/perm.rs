use std::fmt;

/// Permutation of `{0, …, n-1}` in one-line notation: `i ↦ slots[i]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Self {
        let n = images.len();
        let mut seen = vec![false; n];
        for &j in &images {
            assert!(j < n && !seen[j], "not a permutation: {images:?}");
            seen[j] = true;
        }
        Perm(images)
    }

    /// Adjacent transposition swapping `i` and `i+1`.
    pub fn adjacent(n: usize, i: usize) -> Self {
        assert!(i + 1 < n);
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(i, i + 1);
        Perm(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.len(), other.len());
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    /// Permutation of a concatenation of blocks induced by permuting the
    /// blocks themselves: block `b` (of size `sizes[b]`) moves to the slot
    /// range of `self.apply(b)` in the reordered concatenation, preserving
    /// internal order. `sizes` is indexed by source block.
    pub fn block_shuffle(&self, sizes: &[usize]) -> Perm {
        assert_eq!(self.len(), sizes.len());
        let m = sizes.len();
        // offsets of target ranges: target position of block b is self(b),
        // and the target layout orders blocks by their target index.
        let mut tgt_sizes = vec![0; m];
        for b in 0..m {
            tgt_sizes[self.0[b]] = sizes[b];
        }
        let mut tgt_offsets = vec![0; m];
        for t in 1..m {
            tgt_offsets[t] = tgt_offsets[t - 1] + tgt_sizes[t - 1];
        }
        let mut images = Vec::with_capacity(sizes.iter().sum());
        for b in 0..m {
            let off = tgt_offsets[self.0[b]];
            for k in 0..sizes[b] {
                images.push(off + k);
            }
        }
        Perm(images)
    }

    /// Block-diagonal permutation on a concatenation: each summand acts
    /// inside its own range.
    pub fn direct_sum(parts: &[&Perm]) -> Perm {
        let mut images = Vec::with_capacity(parts.iter().map(|p| p.len()).sum());
        let mut off = 0;
        for p in parts {
            images.extend(p.0.iter().map(|&i| off + i));
            off += p.len();
        }
        Perm(images)
    }

    /// Rank in the lexicographic order of one-line forms, i.e. the position
    /// in `all_perms(n)`.
    pub fn lex_rank(&self) -> usize {
        let n = self.len();
        let mut rank = 0;
        let mut fact = 1;
        for k in 1..n {
            fact *= k;
        }
        let mut remaining: Vec<usize> = (0..n).collect();
        for i in 0..n {
            let pos = remaining.iter().position(|&v| v == self.0[i]).unwrap();
            rank += pos * fact;
            remaining.remove(pos);
            if n - i > 1 {
                fact /= n - i - 1;
            }
        }
        rank
    }

    /// Inverse of `lex_rank`.
    pub fn from_lex_rank(n: usize, mut rank: usize) -> Perm {
        let mut fact = 1;
        for k in 1..n {
            fact *= k;
        }
        let mut remaining: Vec<usize> = (0..n).collect();
        let mut images = Vec::with_capacity(n);
        for i in 0..n {
            let pos = rank / fact;
            rank %= fact;
            images.push(remaining.remove(pos));
            if n - i > 1 {
                fact /= n - i - 1;
            }
        }
        Perm(images)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// All permutations of `{0,…,n-1}` in lexicographic one-line order.
pub fn all_perms(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Perm>) {
        if cur.len() == n {
            out.push(Perm::from_images(cur.clone()));
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                rec(n, cur, used, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    rec(n, &mut cur, &mut used, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_inverse() {
        let a = Perm::from_images(vec![1, 2, 0]);
        let b = Perm::from_images(vec![0, 2, 1]);
        // (a ∘ b)(1) = a(2) = 0
        assert_eq!(a.compose(&b).apply(1), 0);
        assert!(a.compose(&a.inverse()).is_identity());
    }

    #[test]
    fn block_shuffle_moves_blocks() {
        // two blocks of sizes 2, 1 swapped: (x1 x2)(y1) -> (y1)(x1 x2)
        let s = Perm::from_images(vec![1, 0]);
        let bs = s.block_shuffle(&[2, 1]);
        assert_eq!(bs.images(), &[1, 2, 0]);
    }

    #[test]
    fn all_perms_lexicographic() {
        let ps = all_perms(3);
        assert_eq!(ps.len(), 6);
        assert_eq!(ps[0].images(), &[0, 1, 2]);
        assert_eq!(ps[5].images(), &[2, 1, 0]);
    }

    #[test]
    fn lex_rank_round_trip() {
        for (r, p) in all_perms(4).iter().enumerate() {
            assert_eq!(p.lex_rank(), r);
            assert_eq!(&Perm::from_lex_rank(4, r), p);
        }
    }

    #[test]
    fn direct_sum_acts_blockwise() {
        let a = Perm::from_images(vec![1, 0]);
        let b = Perm::from_images(vec![2, 0, 1]);
        let d = Perm::direct_sum(&[&a, &b]);
        assert_eq!(d.images(), &[1, 0, 4, 2, 3]);
    }
}

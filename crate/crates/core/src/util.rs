//! Mixed-radix index arithmetic shared by the representation builders.

/// Row-major flat index of a multi-index `k` with per-position radixes `dims`.
pub(crate) fn flat_index(k: &[usize], dims: &[usize]) -> usize {
    let mut idx = 0;
    for (ki, di) in k.iter().zip(dims) {
        idx = idx * di + ki;
    }
    idx
}

/// Inverse of `flat_index`.
pub(crate) fn unflatten(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut k = vec![0; dims.len()];
    for i in (0..dims.len()).rev() {
        k[i] = idx % dims[i];
        idx /= dims[i];
    }
    k
}

/// All ordered ways to write `total` as a sum of `parts` integers, each at
/// least `min`, in lexicographic order.
pub(crate) fn compositions(total: usize, parts: usize, min: usize) -> Vec<Vec<usize>> {
    fn rec(
        left: usize,
        parts: usize,
        min: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if parts == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if left < min * parts {
            return;
        }
        let hi = left - min * (parts - 1);
        for v in min..=hi {
            cur.push(v);
            rec(left - v, parts - 1, min, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, min, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// Iterator over all multi-indices `0..dims[i]`, last position fastest.
pub(crate) struct Odometer {
    dims: Vec<usize>,
    cur: Vec<usize>,
    done: bool,
}

impl Odometer {
    pub(crate) fn new(dims: &[usize]) -> Self {
        Odometer {
            done: dims.iter().any(|&d| d == 0),
            cur: vec![0; dims.len()],
            dims: dims.to_vec(),
        }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let mut i = self.dims.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.cur[i] += 1;
            if self.cur[i] < self.dims[i] {
                break;
            }
            self.cur[i] = 0;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_round_trip() {
        let dims = [3, 1, 4];
        for i in 0..12 {
            assert_eq!(flat_index(&unflatten(i, &dims), &dims), i);
        }
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(5, 2, 1).len(), 4);
        assert_eq!(compositions(3, 3, 1), vec![vec![1, 1, 1]]);
        assert_eq!(compositions(2, 3, 1).len(), 0);
        assert_eq!(compositions(4, 1, 1), vec![vec![4]]);
    }

    #[test]
    fn odometer_covers_product() {
        let all: Vec<_> = Odometer::new(&[2, 3]).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[5], vec![1, 2]);
        assert_eq!(Odometer::new(&[2, 0]).count(), 0);
    }
}

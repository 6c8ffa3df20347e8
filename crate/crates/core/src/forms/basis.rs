//! Multi-index bookkeeping for the coordinate basis `dx^J`.
//!
//! A strictly increasing multi-index `J ⊆ {0..n}` is encoded as a bitmask.
//! Components of a k-form are stored in lexicographic order of `J`.

pub(crate) type Mask = u8;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Multi-indices of size `k` in `{0..n}`, lexicographically ordered.
pub(crate) fn basis(n: usize, k: usize) -> Vec<Mask> {
    fn rec(start: usize, n: usize, left: usize, acc: Mask, out: &mut Vec<Mask>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..n {
            rec(i + 1, n, left - 1, acc | (1 << i), out);
        }
    }
    let mut out = Vec::with_capacity(binomial(n, k));
    rec(0, n, k, 0, &mut out);
    out
}

/// Position of `mask` within `basis(n, |mask|)`.
pub(crate) fn slot(n: usize, mask: Mask) -> usize {
    basis(n, mask.count_ones() as usize)
        .iter()
        .position(|&m| m == mask)
        .expect("mask within dimension")
}

pub(crate) fn axes(mask: Mask) -> impl Iterator<Item = usize> {
    (0..8).filter(move |i| mask & (1 << i) != 0)
}

/// Sign of the permutation sorting the concatenation `I ++ J` of two
/// disjoint increasing multi-indices.
pub(crate) fn concat_sign(i: Mask, j: Mask) -> f64 {
    let mut inversions = 0;
    for a in axes(i) {
        inversions += axes(j).filter(|&b| b < a).count();
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(-1)^p` for integer `p`.
pub fn parity_sign(p: usize) -> f64 {
    if p % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn full(n: usize) -> Mask {
    ((1u16 << n) - 1) as Mask
}

/// 1-based label such as `"1,3"`; the empty index is `""`.
pub(crate) fn label(mask: Mask) -> String {
    axes(mask)
        .map(|a| (a + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

//! Small F_2 vector spaces as machine-word bitsets.

/// Incremental row echelon basis.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: Vec<u32>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reduce(&self, mut v: u32) -> u32 {
        for &r in &self.rows {
            let top = 31 - r.leading_zeros();
            if v >> top & 1 == 1 {
                v ^= r;
            }
        }
        v
    }

    /// Add `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: u32) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let pos = self.rows.partition_point(|&x| x.leading_zeros() < r.leading_zeros());
        self.rows.insert(pos, r);
        true
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

pub fn rank(vectors: &[u32]) -> usize {
    let mut e = Echelon::new();
    for &v in vectors {
        e.insert(v);
    }
    e.rank()
}

/// Every `k`-dimensional subspace of `F_2^d`, as reduced row echelon bases.
///
/// Rows are listed by increasing pivot (lowest set bit), and each pivot
/// column is zero in every other row.
pub fn subspaces(d: usize, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if k > d {
        return out;
    }
    for pivots in 0u32..(1 << d) {
        if pivots.count_ones() as usize != k {
            continue;
        }
        let pivot_list: Vec<usize> = (0..d).filter(|&b| pivots >> b & 1 == 1).collect();
        // free positions of row r: non-pivot bits above its pivot
        let free: Vec<Vec<usize>> = pivot_list
            .iter()
            .map(|&p| (p + 1..d).filter(|&b| pivots >> b & 1 == 0).collect())
            .collect();
        let total: usize = free.iter().map(Vec::len).sum();
        for fill in 0u64..(1u64 << total) {
            let mut bit = 0;
            let rows = pivot_list
                .iter()
                .zip(&free)
                .map(|(&p, fr)| {
                    let mut row = 1u32 << p;
                    for &b in fr {
                        if fill >> bit & 1 == 1 {
                            row |= 1 << b;
                        }
                        bit += 1;
                    }
                    row
                })
                .collect();
            out.push(rows);
        }
    }
    out
}

/// Span of a basis, as a list of all its vectors.
pub fn span(basis: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32];
    for &b in basis {
        let extra: Vec<u32> = out.iter().map(|v| v ^ b).collect();
        out.extend(extra);
    }
    out
}

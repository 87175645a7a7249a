//! Exact combinatorics behind the moment formulas: set partitions of
//! {1,…,n} enumerated through restricted growth strings, Bell and Stirling
//! numbers, matrix permanents, and counts of subordinated set functions.

use crate::error::{Error, Result};
use crate::scalar::{czero, Real, C};

/// Enumeration cap: Bell(12) = 4 213 597 partitions is the practical desk limit.
pub const MAX_PARTITION_N: usize = 12;
/// Bell/Stirling cap: Bell(25) still fits in u64.
pub const MAX_BELL_N: usize = 25;
/// Permanent cap (Ryser is O(2^n·n)).
pub const MAX_PERMANENT_N: usize = 12;

/// Partition of {1,…,n} into disjoint nonempty blocks. Blocks are
/// canonicalized by smallest element and each block is sorted ascending, so
/// ordered products over a block are well defined. Indices are 0-based in
/// memory; the set partitioned is {0,…,n−1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Build from blocks, validating disjointness and coverage and
    /// canonicalizing the ordering.
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::OutOfRange("empty partition block".into()));
            }
            b.sort_unstable();
            for &i in b.iter() {
                if i >= n || seen[i] {
                    return Err(Error::OutOfRange(format!(
                        "index {i} out of range or repeated in partition of {n} elements"
                    )));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::OutOfRange("partition blocks do not cover {1..n}".into()));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(SetPartition { n, blocks })
    }

    fn from_rgs(rgs: &[usize]) -> Self {
        let n = rgs.len();
        let nb = rgs.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); nb];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        SetPartition { n, blocks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// |σ|: number of blocks.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }
}

/// Stream of all partitions of {1,…,n} in restricted-growth-string order:
/// deterministic and resumable.
pub fn enumerate_partitions(n: usize) -> Result<PartitionIter> {
    if n == 0 || n > MAX_PARTITION_N {
        return Err(Error::OutOfRange(format!(
            "partition enumeration needs 1 ≤ n ≤ {MAX_PARTITION_N}, got {n}"
        )));
    }
    Ok(PartitionIter { rgs: vec![0; n], maxima: vec![0; n], done: false })
}

/// Iterator over partitions via restricted growth strings a_1…a_n with
/// a_1 = 0 and a_{k+1} ≤ 1 + max(a_1..a_k).
pub struct PartitionIter {
    rgs: Vec<usize>,
    maxima: Vec<usize>,
    done: bool,
}

impl Iterator for PartitionIter {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let out = SetPartition::from_rgs(&self.rgs);
        // advance: find the rightmost position that can be incremented
        let n = self.rgs.len();
        let mut i = n;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            let cap = self.maxima[i - 1] + 1;
            if self.rgs[i] < cap {
                self.rgs[i] += 1;
                for j in i..n {
                    if j > i {
                        self.rgs[j] = 0;
                    }
                    self.maxima[j] = if j == 0 {
                        0
                    } else {
                        self.maxima[j - 1].max(self.rgs[j])
                    };
                }
                break;
            }
        }
        Some(out)
    }
}

/// Bell number B(n) = number of partitions of an n-set; B(0) = 1.
pub fn bell(n: usize) -> Result<u64> {
    if n > MAX_BELL_N {
        return Err(Error::OutOfRange(format!("bell(n) supported for n ≤ {MAX_BELL_N}")));
    }
    // Bell triangle; intermediate entries of row n reach B(n+1), so build
    // in u128 and narrow at the end.
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        row = next;
    }
    Ok(u64::try_from(row[0]).expect("bell(n) fits in u64 for n ≤ 25"))
}

/// Stirling number of the second kind S(n,k): partitions of an n-set into
/// exactly k blocks.
pub fn stirling2(n: usize, k: usize) -> Result<u64> {
    if n > MAX_BELL_N || k > n {
        return Err(Error::OutOfRange(format!("stirling2 needs 0 ≤ k ≤ n ≤ {MAX_BELL_N}")));
    }
    let mut table = vec![vec![0u64; k + 1]; n + 1];
    table[0][0] = 1;
    for i in 1..=n {
        for j in 1..=k.min(i) {
            let t = (j as u64)
                .checked_mul(table[i - 1][j])
                .and_then(|v| v.checked_add(table[i - 1][j - 1]))
                .expect("stirling overflow");
            table[i][j] = t;
        }
    }
    Ok(table[n][k])
}

/// Permanent of a square complex matrix by Ryser's inclusion-exclusion with
/// Gray-code column updates: O(2^n·n).
pub fn permanent<T: Real>(rows: &[Vec<C<T>>]) -> Result<C<T>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::NonSquare);
    }
    if n == 0 {
        return Ok(C::new(T::one(), T::zero()));
    }
    if n > MAX_PERMANENT_N {
        return Err(Error::CapExceeded(format!("permanent supports n ≤ {MAX_PERMANENT_N}")));
    }
    // perm(A) = (-1)^n Σ_{S⊆[n]} (-1)^{|S|} Π_i Σ_{j∈S} a_{ij}
    let mut sums = vec![czero::<T>(); n];
    let mut total = czero::<T>();
    let mut prev_gray = 0usize;
    for k in 1usize..(1 << n) {
        let gray = k ^ (k >> 1);
        let changed = gray ^ prev_gray;
        let j = changed.trailing_zeros() as usize;
        if gray & changed != 0 {
            for (i, row) in rows.iter().enumerate() {
                sums[i] += row[j];
            }
        } else {
            for (i, row) in rows.iter().enumerate() {
                sums[i] -= row[j];
            }
        }
        prev_gray = gray;
        let mut prod = C::new(T::one(), T::zero());
        for s in &sums {
            prod *= *s;
        }
        if gray.count_ones() % 2 == 0 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n.is_multiple_of(2) {
        total = -total;
    }
    Ok(total)
}

/// A partition σ of {1,…,n} together with a target size m: the data indexing
/// the set F_{n,m}(σ) of σ-subordinated functions [n] → [m].
#[derive(Clone, Debug)]
pub struct SubordinationSpec {
    pub partition: SetPartition,
    pub target_size: u64,
}

/// Number of functions f: [n] → [m] inducing exactly the partition σ (that
/// is, f(i) = f(j) iff i,j share a block): the falling factorial
/// m(m−1)⋯(m−|σ|+1) when m ≥ |σ|. When m < |σ| the set degenerates to all
/// functions by convention, so the count is m^n.
pub fn count_subordinated(spec: &SubordinationSpec) -> u64 {
    let k = spec.partition.num_blocks() as u64;
    let m = spec.target_size;
    if m >= k {
        (0..k).fold(1u64, |acc, i| acc.checked_mul(m - i).expect("falling factorial overflow"))
    } else {
        let n = spec.partition.n() as u32;
        m.checked_pow(n).expect("m^n overflow")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    #[test]
    fn bell_table() {
        let expect = [1u64, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570, 4213597];
        for (n, &b) in expect.iter().enumerate() {
            assert_eq!(bell(n).unwrap(), b, "bell({n})");
        }
        assert_eq!(bell(25).unwrap(), 4638590332229999353);
        assert!(bell(26).is_err());
    }

    #[test]
    fn enumeration_matches_bell() {
        for n in 1..=9 {
            let count = enumerate_partitions(n).unwrap().count() as u64;
            assert_eq!(count, bell(n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn enumeration_edges() {
        let parts: Vec<_> = enumerate_partitions(1).unwrap().collect();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].blocks(), &[vec![0]]);
        let parts: Vec<_> = enumerate_partitions(2).unwrap().collect();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].blocks(), &[vec![0, 1]]);
        assert_eq!(parts[1].blocks(), &[vec![0], vec![1]]);
        assert_eq!(enumerate_partitions(4).unwrap().count(), 15);
        assert!(enumerate_partitions(0).is_err());
        assert!(enumerate_partitions(13).is_err());
    }

    #[test]
    fn enumeration_yields_each_partition_once() {
        let mut seen = std::collections::HashSet::new();
        for p in enumerate_partitions(6).unwrap() {
            assert!(seen.insert(format!("{:?}", p.blocks())), "duplicate partition");
            // canonical ordering: blocks by least element, ascending inside
            for b in p.blocks() {
                assert!(b.windows(2).all(|w| w[0] < w[1]));
            }
            assert!(p.blocks().windows(2).all(|w| w[0][0] < w[1][0]));
        }
        assert_eq!(seen.len() as u64, bell(6).unwrap());
    }

    #[test]
    fn stirling_identities() {
        assert_eq!(stirling2(0, 0).unwrap(), 1);
        for n in 1..=10 {
            assert_eq!(stirling2(n, n).unwrap(), 1);
            assert_eq!(stirling2(n, 1).unwrap(), 1);
            let total: u64 = (0..=n).map(|k| stirling2(n, k).unwrap()).sum();
            assert_eq!(total, bell(n).unwrap());
        }
        // S(4,2) = 7, frozen from exhaustive enumeration below
        let by_enum =
            enumerate_partitions(4).unwrap().filter(|p| p.num_blocks() == 2).count() as u64;
        assert_eq!(by_enum, 7);
        assert_eq!(stirling2(4, 2).unwrap(), by_enum);
    }

    fn naive_permanent(rows: &[Vec<Complex64>]) -> Complex64 {
        let n = rows.len();
        let mut idx: Vec<usize> = (0..n).collect();
        let mut total = Complex64::new(0.0, 0.0);
        // Heap's algorithm over permutations
        fn heap(k: usize, idx: &mut Vec<usize>, rows: &[Vec<Complex64>], total: &mut Complex64) {
            if k == 1 {
                let mut p = Complex64::new(1.0, 0.0);
                for (i, &j) in idx.iter().enumerate() {
                    p *= rows[i][j];
                }
                *total += p;
                return;
            }
            for i in 0..k {
                heap(k - 1, idx, rows, total);
                if k % 2 == 0 {
                    idx.swap(i, k - 1);
                } else {
                    idx.swap(0, k - 1);
                }
            }
        }
        heap(n, &mut idx, rows, &mut total);
        total
    }

    #[test]
    fn permanent_examples() {
        let id3 = vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ];
        assert_eq!(permanent(&id3).unwrap(), Complex64::new(1.0, 0.0));
        for n in 1..=6 {
            let ones = vec![vec![Complex64::new(1.0, 0.0); n]; n];
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            assert!((permanent(&ones).unwrap().re - fact).abs() < 1e-9);
        }
        // [[a,b],[c,d]] → ad + bc
        let m = vec![
            vec![Complex64::new(1.0, 2.0), Complex64::new(0.5, -1.0)],
            vec![Complex64::new(-0.3, 0.2), Complex64::new(2.0, 0.0)],
        ];
        let expect = m[0][0] * m[1][1] + m[0][1] * m[1][0];
        assert!((permanent(&m).unwrap() - expect).norm() < 1e-12);
        // non-square rejected
        assert!(permanent(&[vec![Complex64::new(1.0, 0.0)], vec![]]).is_err());
    }

    proptest! {
        #[test]
        fn permanent_matches_naive_and_transpose(seed in 0u64..500, n in 1usize..=6) {
            let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
            let mut next = move || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
            };
            let rows: Vec<Vec<Complex64>> = (0..n)
                .map(|_| (0..n).map(|_| Complex64::new(next(), next())).collect())
                .collect();
            let p = permanent(&rows).unwrap();
            let naive = naive_permanent(&rows);
            prop_assert!((p - naive).norm() < 1e-10);
            let transpose: Vec<Vec<Complex64>> =
                (0..n).map(|j| (0..n).map(|i| rows[i][j]).collect()).collect();
            prop_assert!((p - permanent(&transpose).unwrap()).norm() < 1e-10);
        }

        #[test]
        fn permanent_zero_row_is_zero(n in 2usize..=5, which in 0usize..5) {
            let mut rows = vec![vec![Complex64::new(1.0, 1.0); n]; n];
            rows[which % n] = vec![Complex64::new(0.0, 0.0); n];
            prop_assert_eq!(permanent(&rows).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    /// Brute-force oracle: enumerate all m^n set functions and keep those
    /// whose induced partition equals σ.
    fn count_by_enumeration(p: &SetPartition, m: usize) -> u64 {
        let n = p.n();
        let mut label = vec![0usize; n];
        for (b, block) in p.blocks().iter().enumerate() {
            for &i in block {
                label[i] = b;
            }
        }
        let mut count = 0u64;
        let total = (m as u64).pow(n as u32);
        for code in 0..total {
            let mut f = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                f.push((c % m as u64) as usize);
                c /= m as u64;
            }
            let subordinated = (0..n).all(|i| {
                (0..n).all(|j| (f[i] == f[j]) == (label[i] == label[j]))
            });
            if subordinated {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn subordinated_counts() {
        // singleton partition of {1}, m = 5 → 5
        let p1 = SetPartition::new(1, vec![vec![0]]).unwrap();
        assert_eq!(count_subordinated(&SubordinationSpec { partition: p1, target_size: 5 }), 5);
        // |σ| = m → m!
        let p3 = SetPartition::new(3, vec![vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(
            count_subordinated(&SubordinationSpec { partition: p3.clone(), target_size: 3 }),
            6
        );
        // n=3, σ = {{1,2},{3}}, m=4 → 12, frozen from enumerating all 64 functions
        let p = SetPartition::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        assert_eq!(count_by_enumeration(&p, 4), 12);
        assert_eq!(
            count_subordinated(&SubordinationSpec { partition: p, target_size: 4 }),
            12
        );
        // degenerate convention m < |σ|: all functions, m^n
        let p = SetPartition::new(3, vec![vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(count_subordinated(&SubordinationSpec { partition: p, target_size: 2 }), 8);
    }

    #[test]
    fn subordinated_counts_partition_functions() {
        // Σ_{σ∈P(n)} |F_{n,m}(σ)| = m^n for m ≥ n: every function induces
        // exactly one partition.
        for n in 1..=5 {
            for m in [n as u64, n as u64 + 2, 9] {
                let total: u64 = enumerate_partitions(n)
                    .unwrap()
                    .map(|p| count_subordinated(&SubordinationSpec { partition: p, target_size: m }))
                    .sum();
                assert_eq!(total, m.pow(n as u32), "n={n} m={m}");
            }
        }
    }

    proptest! {
        #[test]
        fn subordinated_matches_enumeration(n in 1usize..=4, m in 1usize..=5) {
            for p in enumerate_partitions(n).unwrap() {
                if p.num_blocks() <= m {
                    let spec = SubordinationSpec { partition: p.clone(), target_size: m as u64 };
                    prop_assert_eq!(count_subordinated(&spec), count_by_enumeration(&p, m));
                }
            }
        }
    }
}

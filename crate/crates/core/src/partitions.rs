//! Set partitions of the positions `{1..d}` of an index tuple.
//!
//! Positions are stored 0-based; [`fmt::Display`] prints them 1-based, e.g.
//! `{1,3}{2}`.

use std::fmt;

/// Largest ground set accepted by [`enumerate_partitions`].
pub const MAX_DEGREE: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PartitionError {
    #[error("partition degree {0} is outside 1..={MAX_DEGREE}")]
    DegreeOutOfRange(usize),
    #[error("ground sets differ: {0} vs {1}")]
    GroundSetMismatch(usize, usize),
    #[error("blocks do not form a partition of 1..={0}")]
    NotAPartition(usize),
    #[error("empty tuple has no kernel")]
    EmptyTuple,
}

/// A set partition in canonical form: each block sorted ascending, blocks
/// ordered by their minimum element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    d: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition from 0-based blocks in any order, canonicalizing
    /// them. Fails unless the blocks are nonempty, disjoint and cover `0..d`.
    pub fn from_blocks(d: usize, blocks: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        let mut seen = vec![false; d];
        for block in &blocks {
            if block.is_empty() {
                return Err(PartitionError::NotAPartition(d));
            }
            for &p in block {
                if p >= d || seen[p] {
                    return Err(PartitionError::NotAPartition(d));
                }
                seen[p] = true;
            }
        }
        if d == 0 || seen.iter().any(|s| !s) {
            return Err(PartitionError::NotAPartition(d));
        }
        Ok(Self::canonical(d, blocks))
    }

    fn canonical(d: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        Self { d, blocks }
    }

    /// Builds a partition from a restricted growth string: `labels[p]` is the
    /// block of position `p`, and labels appear in first-use order.
    fn from_labels(labels: &[usize]) -> Self {
        let count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (p, &l) in labels.iter().enumerate() {
            blocks[l].push(p);
        }
        Self {
            d: labels.len(),
            blocks,
        }
    }

    /// All singletons (`0̇`, finest).
    pub fn finest(d: usize) -> Self {
        Self {
            d,
            blocks: (0..d).map(|p| vec![p]).collect(),
        }
    }

    /// One block (`1̇`, coarsest).
    pub fn coarsest(d: usize) -> Self {
        Self {
            d,
            blocks: vec![(0..d).collect()],
        }
    }

    /// Size of the ground set, `|σ|`.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of blocks, `ν(σ)`.
    pub fn nu(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Block index of every position.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.d];
        for (b, block) in self.blocks.iter().enumerate() {
            for &p in block {
                labels[p] = b;
            }
        }
        labels
    }

    /// Whether `position` is alone in its block.
    pub fn is_singleton(&self, position: usize) -> bool {
        self.blocks.iter().any(|b| b.len() == 1 && b[0] == position)
    }

    /// The partition of the remaining `d − 1` positions after deleting
    /// `position`, renumbered downwards. Returns `None` when `d = 1`.
    pub fn delete_position(&self, position: usize) -> Option<Self> {
        if self.d <= 1 {
            return None;
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .filter(|&&p| p != position)
                    .map(|&p| if p > position { p - 1 } else { p })
                    .collect::<Vec<_>>()
            })
            .filter(|b| !b.is_empty())
            .collect();
        Some(Self::canonical(self.d - 1, blocks))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for block in &self.blocks {
            f.write_str("{")?;
            for (i, p) in block.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", p + 1)?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

/// Every set partition of `{1..d}`, generated from restricted growth strings
/// in lexicographic order of the strings.
pub fn enumerate_partitions(d: usize) -> Result<Vec<Partition>, PartitionError> {
    if d == 0 || d > MAX_DEGREE {
        return Err(PartitionError::DegreeOutOfRange(d));
    }
    let mut out = Vec::new();
    let mut labels = vec![0usize; d];
    // max_prefix[p] = max(labels[..p]) + 1, the largest label position p may take
    let mut max_prefix = vec![1usize; d];
    max_prefix[0] = 0;
    loop {
        out.push(Partition::from_labels(&labels));
        // find the rightmost position that can be incremented
        let mut p = d - 1;
        loop {
            if p == 0 {
                return Ok(out);
            }
            if labels[p] < max_prefix[p] {
                break;
            }
            p -= 1;
        }
        labels[p] += 1;
        for q in p + 1..d {
            labels[q] = 0;
            max_prefix[q] = max_prefix[q - 1].max(labels[q - 1] + 1);
        }
    }
}

/// The partition of positions induced by equal entries of `tuple`.
pub fn kernel_of_tuple<T: PartialEq>(tuple: &[T]) -> Result<Partition, PartitionError> {
    if tuple.is_empty() {
        return Err(PartitionError::EmptyTuple);
    }
    let mut firsts: Vec<usize> = Vec::new();
    let mut labels = Vec::with_capacity(tuple.len());
    for (p, x) in tuple.iter().enumerate() {
        match firsts.iter().position(|&f| tuple[f] == *x) {
            Some(l) => labels.push(l),
            None => {
                labels.push(firsts.len());
                firsts.push(p);
            }
        }
    }
    Ok(Partition::from_labels(&labels))
}

/// Iterator over the tuples in `{0..n}^d` whose kernel is a fixed partition,
/// in lexicographic order. Produced by [`tuples_with_kernel`].
#[derive(Debug, Clone)]
pub struct KernelTuples {
    labels: Vec<usize>,
    n: usize,
    /// Distinct values assigned to blocks, in block order; `None` once done.
    values: Option<Vec<usize>>,
}

impl KernelTuples {
    fn advance(values: &mut [usize], n: usize) -> bool {
        // Next injective sequence in lexicographic order.
        let k = values.len();
        let mut pos = k;
        while pos > 0 {
            pos -= 1;
            let mut candidate = values[pos] + 1;
            while candidate < n && values[..pos].contains(&candidate) {
                candidate += 1;
            }
            if candidate < n {
                values[pos] = candidate;
                // fill the tail with the smallest unused values
                let mut next = 0;
                for q in pos + 1..k {
                    while values[..q].contains(&next) {
                        next += 1;
                    }
                    values[q] = next;
                    next += 1;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for KernelTuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let values = self.values.as_mut()?;
        let tuple = self.labels.iter().map(|&l| values[l]).collect();
        if !Self::advance(values, self.n) {
            self.values = None;
        }
        Some(tuple)
    }
}

/// Tuples `(i_1..i_d)` with entries in `0..n` whose kernel is `sigma`, in
/// lexicographic order. There are `n(n−1)⋯(n−ν+1)` of them; the iterator is
/// empty when `n < ν(sigma)`.
///
/// Blocks are ordered by their first position, so lexicographic order of the
/// block values is lexicographic order of the tuples.
pub fn tuples_with_kernel(n: usize, sigma: &Partition) -> KernelTuples {
    let nu = sigma.nu();
    KernelTuples {
        labels: sigma.labels(),
        n,
        values: (n >= nu).then(|| (0..nu).collect()),
    }
}

/// `σ ≤ π` in the lattice order used here: true iff every block of `pi` is
/// contained in some block of `sigma`, i.e. `pi` refines `sigma`. The finest
/// partition lies above everything and the coarsest below:
/// `refinement_leq(1̇, 0̇)` is true.
pub fn refinement_leq(sigma: &Partition, pi: &Partition) -> Result<bool, PartitionError> {
    if sigma.d != pi.d {
        return Err(PartitionError::GroundSetMismatch(sigma.d, pi.d));
    }
    let label = sigma.labels();
    Ok(pi
        .blocks
        .iter()
        .all(|b| b.iter().all(|&p| label[p] == label[b[0]])))
}

/// `n(n−1)⋯(n−k+1)`, saturating at `u128::MAX`.
pub fn falling_factorial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell(d: usize) -> usize {
        // Bell triangle
        let mut row = vec![1usize];
        for _ in 1..d {
            let mut next = vec![*row.last().unwrap()];
            for &x in &row {
                next.push(next.last().unwrap() + x);
            }
            row = next;
        }
        *row.last().unwrap()
    }

    #[test]
    fn counts_follow_bell_numbers() {
        let expected = [1, 2, 5, 15, 52, 203, 877, 4140];
        for d in 1..=8 {
            let all = enumerate_partitions(d).unwrap();
            assert_eq!(all.len(), expected[d - 1]);
            assert_eq!(all.len(), bell(d));
            let mut sorted = all.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), all.len());
        }
        assert!(enumerate_partitions(0).is_err());
        assert!(enumerate_partitions(9).is_err());
    }

    #[test]
    fn kernels_of_small_tuples() {
        assert_eq!(kernel_of_tuple(&[7, 7, 7]).unwrap(), Partition::coarsest(3));
        assert_eq!(kernel_of_tuple(&[1, 2, 3]).unwrap(), Partition::finest(3));
        let k = kernel_of_tuple(&[1, 2, 1]).unwrap();
        assert_eq!(k.blocks(), &[vec![0, 2], vec![1]]);
        assert_eq!(k.to_string(), "{1,3}{2}");
        assert!(kernel_of_tuple::<u8>(&[]).is_err());
    }

    #[test]
    fn kernel_tuple_counts() {
        let s = Partition::from_blocks(3, vec![vec![1], vec![2, 0]]).unwrap();
        let all: Vec<_> = tuples_with_kernel(4, &s).collect();
        assert_eq!(all.len(), 12);
        assert_eq!(all[0], vec![0, 1, 0]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(tuples_with_kernel(3, &Partition::finest(3)).count(), 6);
        assert_eq!(tuples_with_kernel(1, &Partition::finest(2)).count(), 0);
        assert_eq!(tuples_with_kernel(1, &Partition::coarsest(4)).count(), 1);
    }

    #[test]
    fn refinement_examples() {
        let top = Partition::coarsest(3);
        let bottom = Partition::finest(3);
        assert!(refinement_leq(&top, &bottom).unwrap());
        assert!(!refinement_leq(&bottom, &top).unwrap());
        assert!(refinement_leq(&top, &top).unwrap());
        assert!(refinement_leq(&top, &Partition::finest(2)).is_err());
    }

    #[test]
    fn deleting_a_position() {
        let s = Partition::from_blocks(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        let g = s.delete_position(0).unwrap();
        assert_eq!(g.blocks(), &[vec![0, 2], vec![1]]);
        assert!(!s.is_singleton(0));
        assert!(Partition::finest(3).is_singleton(1));
        assert!(Partition::finest(1).delete_position(0).is_none());
    }

    #[test]
    fn from_blocks_rejects_overlap_and_gaps() {
        assert!(Partition::from_blocks(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::from_blocks(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::from_blocks(2, vec![vec![0], vec![], vec![1]]).is_err());
    }

    #[test]
    fn falling_factorials() {
        assert_eq!(falling_factorial(4, 2), 12);
        assert_eq!(falling_factorial(3, 0), 1);
        assert_eq!(falling_factorial(2, 3), 0);
    }
}

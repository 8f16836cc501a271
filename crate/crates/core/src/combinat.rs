//! Partitions, permutations, power sums and noncrossing partitions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::numeric::Scalar;

/// An integer partition, parts weakly decreasing and positive.
///
/// Serializes as a JSON array of its parts; renders as `"3+1+1"`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(argument("a partition needs at least one part"));
        }
        if parts.contains(&0) {
            return Err(argument("partition parts must be positive"));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    /// The one-part partition `(d)`.
    pub fn single(d: u32) -> Self {
        Partition { parts: vec![d] }
    }

    /// `(1^d)`.
    pub fn ones(d: u32) -> Self {
        Partition {
            parts: vec![1; d as usize],
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Sum of the parts.
    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Number of parts, `l(alpha)`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Parses `"3+1+1"` (the rendering used as a table key).
    pub fn parse(s: &str) -> Result<Self> {
        let parts = s
            .split('+')
            .map(|p| p.trim().parse::<u32>().map_err(|_| argument(format!("bad partition {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        f.write_str(&s.join("+"))
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = crate::Error;
    fn try_from(parts: Vec<u32>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(argument("serialized partitions must be decreasing"));
        }
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

/// All partitions of `d`, `1 <= d <= 12`, in reverse lexicographic order:
/// `(d)` first, `(1^d)` last.
pub fn partitions_of(d: u32) -> Result<Vec<Partition>> {
    if !(1..=12).contains(&d) {
        return Err(argument(format!("partitions_of: d = {d} outside 1..=12")));
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fill_partitions(d, d, &mut cur, &mut out);
    Ok(out)
}

fn fill_partitions(rest: u32, max_part: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if rest == 0 {
        out.push(Partition { parts: cur.clone() });
        return;
    }
    for p in (1..=max_part.min(rest)).rev() {
        cur.push(p);
        fill_partitions(rest - p, p, cur, out);
        cur.pop();
    }
}

/// A permutation of `{0..d-1}` (serialized 1-indexed).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(d: usize) -> Self {
        Permutation {
            images: (0..d).collect(),
        }
    }

    /// From 0-indexed images.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &i in &images {
            if i >= d || seen[i] {
                return Err(argument("images do not form a permutation"));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// From 1-indexed images as written in cycle notation, e.g. `[2, 1, 3]`.
    pub fn from_one_indexed(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(argument("one-indexed images must be >= 1"));
        }
        Permutation::from_images(images.iter().map(|&i| i - 1).collect())
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// Right multiplication by the transposition `(s t)`: swaps the images of `s` and `t`.
    pub fn swap_images(&mut self, s: usize, t: usize) {
        self.images.swap(s, t);
    }

    /// Every permutation of `{0..d-1}`, in lexicographic order of images.
    pub fn all(d: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut images: Vec<usize> = (0..d).collect();
        loop {
            out.push(Permutation {
                images: images.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (1..d).rev().find(|&i| images[i - 1] < images[i]) else {
                break;
            };
            let j = (i..d).rev().find(|&j| images[j] > images[i - 1]).unwrap();
            images.swap(i - 1, j);
            images[i..].reverse();
        }
        out
    }

    /// The cycles of this permutation, each listed from its smallest element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let d = self.images.len();
        let mut seen = vec![false; d];
        let mut out = Vec::new();
        for start in 0..d {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cyc.push(i);
                i = self.images[i];
            }
            out.push(cyc);
        }
        out
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = crate::Error;
    fn try_from(images: Vec<usize>) -> Result<Self> {
        Permutation::from_one_indexed(&images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images.into_iter().map(|i| i + 1).collect()
    }
}

pub fn cycle_type(p: &Permutation) -> Partition {
    let mut parts: Vec<u32> = p.cycles().iter().map(|c| c.len() as u32).collect();
    if parts.is_empty() {
        // S(0) does not occur in practice; keep the type well-formed.
        parts.push(0);
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Partition { parts }
}

/// `p_beta(x) = prod_i sum_j x_j^{beta_i}`; exact when `T` is exact.
pub fn power_sum<T: Scalar>(beta: &Partition, x: &[T]) -> Result<T> {
    if x.is_empty() {
        return Err(argument("power_sum: empty variable list"));
    }
    let max = *beta.parts.first().unwrap_or(&0) as usize;
    let sums = power_sums(x, max);
    Ok(beta
        .parts
        .iter()
        .fold(T::one(), |acc, &m| acc * sums[m as usize].clone()))
}

/// `[p_0(x), p_1(x), ..., p_max(x)]` with `p_0 = len(x)`.
pub fn power_sums<T: Scalar>(x: &[T], max: usize) -> Vec<T> {
    let mut sums = vec![T::zero(); max + 1];
    for v in x {
        let mut pow = T::one();
        for s in sums.iter_mut() {
            *s = s.clone() + pow.clone();
            pow = pow * v.clone();
        }
    }
    sums
}

/// A set partition of `{1..d}` with no crossings, blocks stored 0-indexed,
/// each block increasing, blocks ordered by their minima.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NoncrossingPartition {
    blocks: Vec<Vec<usize>>,
}

impl NoncrossingPartition {
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort_by_key(|b| b[0]);
        let mut all: Vec<usize> = blocks.iter().flatten().copied().collect();
        all.sort_unstable();
        if all != (0..all.len()).collect::<Vec<_>>() {
            return Err(argument("blocks do not partition {1..d}"));
        }
        if is_crossing(&blocks) {
            return Err(argument("partition has a crossing"));
        }
        Ok(NoncrossingPartition { blocks })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().map(Vec::len)
    }
}

/// True if some `a < b < c < e` has `a, c` in one block and `b, e` in another.
pub fn is_crossing(blocks: &[Vec<usize>]) -> bool {
    let d = blocks.iter().map(Vec::len).sum::<usize>();
    let mut label = vec![usize::MAX; d];
    for (bi, b) in blocks.iter().enumerate() {
        for &i in b {
            label[i] = bi;
        }
    }
    for a in 0..d {
        for b in a + 1..d {
            if label[b] == label[a] {
                continue;
            }
            for c in b + 1..d {
                if label[c] != label[a] {
                    continue;
                }
                if (c + 1..d).any(|e| label[e] == label[b]) {
                    return true;
                }
            }
        }
    }
    false
}

/// All noncrossing partitions of `{1..d}`, `1 <= d <= 10`.
///
/// Built recursively: the block containing the first element splits the
/// remaining elements into gaps that are partitioned independently.
pub fn noncrossing_partitions(d: usize) -> Result<Vec<NoncrossingPartition>> {
    if !(1..=10).contains(&d) {
        return Err(argument(format!("noncrossing_partitions: d = {d} outside 1..=10")));
    }
    Ok(nc_blocks(0, d)
        .into_iter()
        .map(|mut blocks| {
            blocks.sort_by_key(|b| b[0]);
            NoncrossingPartition { blocks }
        })
        .collect())
}

/// Noncrossing partitions of the interval `lo..hi` as block lists.
fn nc_blocks(lo: usize, hi: usize) -> Vec<Vec<Vec<usize>>> {
    if lo >= hi {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    // choose the rest of lo's block as a subset of lo+1..hi
    let rest: Vec<usize> = (lo + 1..hi).collect();
    for mask in 0u32..(1 << rest.len()) {
        let mut block = vec![lo];
        block.extend(rest.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v));
        // gaps between consecutive block elements and after the last one
        let mut gaps = Vec::new();
        for w in block.windows(2) {
            gaps.push((w[0] + 1, w[1]));
        }
        gaps.push((*block.last().unwrap() + 1, hi));
        let mut partial: Vec<Vec<Vec<usize>>> = vec![vec![block]];
        for (glo, ghi) in gaps {
            let sub = nc_blocks(glo, ghi);
            partial = partial
                .into_iter()
                .flat_map(|p| {
                    sub.iter().map(move |s| {
                        let mut q = p.clone();
                        q.extend(s.iter().cloned());
                        q
                    })
                })
                .collect();
        }
        out.extend(partial);
    }
    out
}

/// Every set partition of `{0..d-1}` via restricted growth strings.
pub fn set_partitions(d: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; d];
    fn rec(i: usize, max: usize, rgs: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        let d = rgs.len();
        if i == d {
            let nblocks = rgs.iter().max().map_or(0, |m| m + 1);
            let mut blocks = vec![Vec::new(); nblocks];
            for (j, &b) in rgs.iter().enumerate() {
                blocks[b].push(j);
            }
            out.push(blocks);
            return;
        }
        for b in 0..=max {
            rgs[i] = b;
            rec(i + 1, if b == max { max + 1 } else { max }, rgs, out);
        }
    }
    if d == 0 {
        return vec![Vec::new()];
    }
    rgs[0] = 0;
    rec(1, 1, &mut rgs, &mut out);
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

pub fn catalan(n: u64) -> u64 {
    binomial(2 * n, n) / (n + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn small_partition_lists() {
        assert_eq!(partitions_of(1).unwrap(), vec![p(&[1])]);
        assert_eq!(partitions_of(2).unwrap(), vec![p(&[2]), p(&[1, 1])]);
        let four: Vec<String> = partitions_of(4).unwrap().iter().map(|q| q.to_string()).collect();
        assert_eq!(four, ["4", "3+1", "2+2", "2+1+1", "1+1+1+1"]);
    }

    /// Brute force: every weakly decreasing composition of d.
    fn count_partitions_oracle(d: u32) -> usize {
        fn rec(rest: u32, max: u32) -> usize {
            if rest == 0 {
                return 1;
            }
            (1..=max.min(rest)).map(|k| rec(rest - k, k)).sum()
        }
        rec(d, d)
    }

    #[test]
    fn partition_counts_match_oracle() {
        assert_eq!(partitions_of(6).unwrap().len(), 11);
        for d in 1..=12 {
            let ps = partitions_of(d).unwrap();
            assert_eq!(ps.len(), count_partitions_oracle(d));
            let set: HashSet<_> = ps.iter().collect();
            assert_eq!(set.len(), ps.len());
            assert!(ps.iter().all(|q| q.size() == d));
            // reverse lexicographic
            assert!(ps.windows(2).all(|w| w[0].parts() > w[1].parts()));
        }
    }

    #[test]
    fn partitions_of_rejects_out_of_range() {
        assert!(partitions_of(0).is_err());
        assert!(partitions_of(13).is_err());
    }

    #[test]
    fn partition_rendering_and_json() {
        let q = p(&[1, 3, 1]);
        assert_eq!(q.to_string(), "3+1+1");
        assert_eq!(Partition::parse("3+1+1").unwrap(), q);
        assert_eq!(serde_json::to_string(&q).unwrap(), "[3,1,1]");
        assert_eq!(serde_json::from_str::<Partition>("[3,1,1]").unwrap(), q);
        assert!(serde_json::from_str::<Partition>("[1,3]").is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
    }

    #[test]
    fn cycle_types() {
        let id = Permutation::identity(3);
        assert_eq!(cycle_type(&id), p(&[1, 1, 1]));
        let t = Permutation::from_one_indexed(&[2, 1, 3]).unwrap();
        assert_eq!(cycle_type(&t), p(&[2, 1]));
        // 1->2->3->1 and 4<->5
        let q = Permutation::from_one_indexed(&[2, 3, 1, 5, 4]).unwrap();
        assert_eq!(cycle_type(&q), p(&[3, 2]));
        assert!(Permutation::from_one_indexed(&[1, 1]).is_err());
        assert_eq!(serde_json::to_string(&q).unwrap(), "[2,3,1,5,4]");
    }

    #[test]
    fn all_permutations() {
        let all = Permutation::all(4);
        assert_eq!(all.len(), 24);
        let set: HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), 24);
    }

    #[test]
    fn power_sum_examples() {
        let v = power_sum(&p(&[2, 1]), &[rat(1, 1), rat(2, 1)]).unwrap();
        assert_eq!(v, rat(15, 1));
        let ones = vec![1.0; 7];
        assert_eq!(power_sum(&p(&[5]), &ones).unwrap(), 7.0);
        assert_eq!(power_sum(&p(&[3]), &[-1.0, 1.0]).unwrap(), 0.0);
        assert!(power_sum::<f64>(&p(&[1]), &[]).is_err());
    }

    #[test]
    fn noncrossing_counts_are_catalan() {
        assert_eq!(noncrossing_partitions(1).unwrap().len(), 1);
        assert_eq!(noncrossing_partitions(3).unwrap().len(), 5);
        assert_eq!(noncrossing_partitions(4).unwrap().len(), 14);
        for d in 1..=10 {
            assert_eq!(noncrossing_partitions(d).unwrap().len() as u64, catalan(d as u64));
        }
        assert!(noncrossing_partitions(0).is_err());
        assert!(noncrossing_partitions(11).is_err());
    }

    #[test]
    fn noncrossing_generation_matches_crossing_filter() {
        for d in 1..=7 {
            let mut direct: Vec<Vec<Vec<usize>>> = noncrossing_partitions(d)
                .unwrap()
                .into_iter()
                .map(|nc| nc.blocks)
                .collect();
            let mut filtered: Vec<Vec<Vec<usize>>> = set_partitions(d)
                .into_iter()
                .filter(|b| !is_crossing(b))
                .map(|mut b| {
                    b.sort_by_key(|x| x[0]);
                    b
                })
                .collect();
            direct.sort();
            filtered.sort();
            assert_eq!(direct, filtered, "d = {d}");
        }
    }

    #[test]
    fn crossing_partition_rejected() {
        assert!(NoncrossingPartition::new(vec![vec![0, 2], vec![1, 3]]).is_err());
        assert!(NoncrossingPartition::new(vec![vec![0, 3], vec![1, 2]]).is_ok());
    }

    proptest! {
        #[test]
        fn cycle_type_sums_to_degree(images in Just((0..6usize).collect::<Vec<_>>()).prop_shuffle()) {
            let q = Permutation::from_images(images).unwrap();
            prop_assert_eq!(cycle_type(&q).size(), 6);
        }

        #[test]
        fn power_sum_is_symmetric(
            xs in proptest::collection::vec(-5i64..5, 1..6).prop_shuffle(),
            seed in 0usize..100,
        ) {
            let beta = &partitions_of(4).unwrap()[seed % 5];
            let a: Vec<_> = xs.iter().map(|&v| rat(v, 1)).collect();
            let mut b = a.clone();
            b.rotate_left(seed % a.len());
            b.reverse();
            prop_assert_eq!(power_sum(beta, &a).unwrap(), power_sum(beta, &b).unwrap());
        }
    }
}

//! Monotone and classical double Hurwitz numbers by direct enumeration of
//! walks on the Cayley graph of `S(d)` generated by transpositions.
//!
//! The transposition `(s t)`, `s < t`, carries the label `t`. A walk is
//! monotone when its labels weakly increase, and transitive when its start
//! permutation and steps generate a transitive subgroup of `S(d)`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::RwLock;

use rayon::prelude::*;

use crate::combinat::{cycle_type, Partition, Permutation};
use crate::error::{argument, Error, Result};

/// Largest degree the enumerator accepts.
pub const MAX_DEGREE: u32 = 7;

/// Default cap on walk-extension operations per query.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WalkQuery {
    pub d: u32,
    pub r: u32,
    pub alpha: Partition,
    pub beta: Partition,
    pub monotone: bool,
}

impl WalkQuery {
    pub fn new(r: u32, alpha: Partition, beta: Partition, monotone: bool) -> Result<Self> {
        let d = alpha.size();
        if beta.size() != d {
            return Err(argument(format!(
                "partitions {alpha} and {beta} have different sizes"
            )));
        }
        Ok(WalkQuery {
            d,
            r,
            alpha,
            beta,
            monotone,
        })
    }

    pub fn monotone(r: u32, alpha: Partition, beta: Partition) -> Result<Self> {
        WalkQuery::new(r, alpha, beta, true)
    }

    pub fn classical(r: u32, alpha: Partition, beta: Partition) -> Result<Self> {
        WalkQuery::new(r, alpha, beta, false)
    }

    /// Cache key `"d/r/alpha/beta/monotone"`, e.g. `"3/2/3/1+1+1/true"`.
    pub fn key(&self) -> String {
        format!(
            "{}/{}/{}/{}/{}",
            self.d, self.r, self.alpha, self.beta, self.monotone
        )
    }

    pub fn from_key(key: &str) -> Result<Self> {
        let bad = || argument(format!("malformed walk key {key:?}"));
        let fields: Vec<&str> = key.split('/').collect();
        let [d, r, alpha, beta, monotone] = fields[..] else {
            return Err(bad());
        };
        let d: u32 = d.parse().map_err(|_| bad())?;
        let q = WalkQuery::new(
            r.parse().map_err(|_| bad())?,
            Partition::parse(alpha)?,
            Partition::parse(beta)?,
            monotone.parse().map_err(|_| bad())?,
        )?;
        if q.d != d {
            return Err(bad());
        }
        Ok(q)
    }
}

/// Riemann-Hurwitz genus `(r + 2 - l(alpha) - l(beta)) / 2` when it is a
/// nonnegative integer.
pub fn genus(r: u32, alpha: &Partition, beta: &Partition) -> Result<Option<u32>> {
    if alpha.size() != beta.size() {
        return Err(argument("genus: partitions of different sizes"));
    }
    let twice = r as i64 + 2 - alpha.len() as i64 - beta.len() as i64;
    Ok((twice >= 0 && twice % 2 == 0).then_some((twice / 2) as u32))
}

/// Step count `r = 2g - 2 + l(alpha) + l(beta)` for genus `g`.
pub fn steps_for_genus(g: u32, alpha: &Partition, beta: &Partition) -> Result<u32> {
    if alpha.size() != beta.size() {
        return Err(argument("partitions of different sizes"));
    }
    let r = 2 * g as i64 - 2 + alpha.len() as i64 + beta.len() as i64;
    u32::try_from(r).map_err(|_| argument(format!("implied step count {r} is negative")))
}

/// Exact number of `r`-step transitive walks from cycle type `alpha` to `beta`.
pub fn count_walks(q: &WalkQuery, budget: u64) -> Result<u64> {
    enumerate(q, budget, false)
}

/// `H_g(alpha, beta)` for the monotone walks, computed by enumeration.
pub fn monotone_by_genus(g: u32, alpha: &Partition, beta: &Partition) -> Result<u64> {
    let r = steps_for_genus(g, alpha, beta)?;
    count_walks(&WalkQuery::monotone(r, alpha.clone(), beta.clone())?, DEFAULT_BUDGET)
}

/// The upper bound `(d!)^(2g + l(alpha) + l(beta))` on monotone counts, saturating.
pub fn monotone_upper_bound(g: u32, alpha: &Partition, beta: &Partition) -> u128 {
    let fact: u128 = (1..=alpha.size() as u128).product();
    let exp = 2 * g + alpha.len() as u32 + beta.len() as u32;
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(fact))
}

const FLUSH: u64 = 1 << 12;

struct Walker<'a> {
    d: usize,
    r: usize,
    monotone: bool,
    include_end: bool,
    beta: &'a Partition,
    start_cycles: Vec<Vec<usize>>,
    steps: Vec<(usize, usize)>,
    local_ops: u64,
    spent: &'a AtomicU64,
    abort: &'a AtomicBool,
    budget: u64,
}

impl Walker<'_> {
    fn charge(&mut self) -> bool {
        self.local_ops += 1;
        if self.local_ops == FLUSH {
            let total = self.spent.fetch_add(self.local_ops, Ordering::Relaxed) + self.local_ops;
            self.local_ops = 0;
            if total > self.budget {
                self.abort.store(true, Ordering::Relaxed);
            }
        }
        !self.abort.load(Ordering::Relaxed)
    }

    fn walk(&mut self, perm: &mut Permutation, min_label: usize) -> Option<u64> {
        if self.steps.len() == self.r {
            return Some(self.leaf(perm) as u64);
        }
        let mut total = 0;
        let lo = if self.monotone { min_label.max(1) } else { 1 };
        for t in lo..self.d {
            for s in 0..t {
                if !self.charge() {
                    return None;
                }
                perm.swap_images(s, t);
                self.steps.push((s, t));
                let sub = self.walk(perm, t);
                self.steps.pop();
                perm.swap_images(s, t);
                total += sub?;
            }
        }
        Some(total)
    }

    fn leaf(&self, end: &Permutation) -> bool {
        if &cycle_type(end) != self.beta {
            return false;
        }
        // The end permutation is the start times the steps, so it lies in the
        // group they generate; including it cannot change the orbits.
        let mut uf = UnionFind::new(self.d);
        for c in &self.start_cycles {
            for w in c.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        for &(s, t) in &self.steps {
            uf.union(s, t);
        }
        if self.include_end {
            for c in end.cycles() {
                for w in c.windows(2) {
                    uf.union(w[0], w[1]);
                }
            }
        }
        uf.components() == 1
    }
}

fn enumerate(q: &WalkQuery, budget: u64, include_end: bool) -> Result<u64> {
    if q.d == 0 || q.d > MAX_DEGREE {
        return Err(argument(format!("count_walks: d = {} outside 1..={MAX_DEGREE}", q.d)));
    }
    if q.alpha.size() != q.d || q.beta.size() != q.d {
        return Err(argument("walk query partitions do not match d"));
    }
    let starts: Vec<Permutation> = Permutation::all(q.d as usize)
        .into_iter()
        .filter(|p| cycle_type(p) == q.alpha)
        .collect();
    let spent = AtomicU64::new(0);
    let abort = AtomicBool::new(false);
    let counts: Vec<Option<u64>> = starts
        .into_par_iter()
        .map(|mut start| {
            let mut walker = Walker {
                d: q.d as usize,
                r: q.r as usize,
                monotone: q.monotone,
                include_end,
                beta: &q.beta,
                start_cycles: start.cycles(),
                steps: Vec::with_capacity(q.r as usize),
                local_ops: 0,
                spent: &spent,
                abort: &abort,
                budget,
            };
            let out = walker.walk(&mut start, 1);
            spent.fetch_add(walker.local_ops, Ordering::Relaxed);
            out
        })
        .collect();
    if abort.load(Ordering::Relaxed) || spent.load(Ordering::Relaxed) > budget {
        return Err(Error::Budget(format!(
            "walk enumeration for {} exceeded {budget} extensions",
            q.key()
        )));
    }
    Ok(counts.into_iter().map(|c| c.unwrap_or(0)).sum())
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn components(&mut self) -> usize {
        (0..self.parent.len()).filter(|&i| self.find(i) == i).count()
    }
}

/// Memoized walk counts with declared bounds, persisted as a JSON map from
/// [`WalkQuery::key`] to a decimal string.
///
/// Reads may happen concurrently; writers take the lock one at a time.
#[derive(Debug)]
pub struct HurwitzTable {
    d_max: u32,
    r_max: u32,
    budget: u64,
    entries: RwLock<BTreeMap<WalkQuery, u64>>,
}

impl HurwitzTable {
    pub fn new(d_max: u32, r_max: u32) -> Result<Self> {
        if d_max == 0 || d_max > MAX_DEGREE {
            return Err(argument(format!("d_max = {d_max} outside 1..={MAX_DEGREE}")));
        }
        Ok(HurwitzTable {
            d_max,
            r_max,
            budget: DEFAULT_BUDGET,
            entries: RwLock::new(BTreeMap::new()),
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn d_max(&self) -> u32 {
        self.d_max
    }

    pub fn r_max(&self) -> u32 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check_bounds(&self, q: &WalkQuery) -> Result<()> {
        if q.d > self.d_max || q.r > self.r_max {
            return Err(Error::Budget(format!(
                "query {} outside table bounds d <= {}, r <= {}",
                q.key(),
                self.d_max,
                self.r_max
            )));
        }
        Ok(())
    }

    pub fn get(&self, q: &WalkQuery) -> Option<u64> {
        self.entries.read().unwrap().get(q).copied()
    }

    pub fn get_or_compute(&self, q: &WalkQuery) -> Result<u64> {
        self.check_bounds(q)?;
        if let Some(v) = self.get(q) {
            return Ok(v);
        }
        let v = count_walks(q, self.budget)?;
        self.entries.write().unwrap().insert(q.clone(), v);
        Ok(v)
    }

    /// Monotone count at genus `g`.
    pub fn monotone_by_genus(&self, g: u32, alpha: &Partition, beta: &Partition) -> Result<u64> {
        let r = steps_for_genus(g, alpha, beta)?;
        self.get_or_compute(&WalkQuery::monotone(r, alpha.clone(), beta.clone())?)
    }

    pub fn entries(&self) -> Vec<(WalkQuery, u64)> {
        self.entries
            .read()
            .unwrap()
            .iter()
            .map(|(k, v)| (k.clone(), *v))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .entries
            .read()
            .unwrap()
            .iter()
            .map(|(k, v)| (k.key(), serde_json::Value::String(v.to_string())))
            .collect();
        serde_json::Value::Object(map)
    }

    /// Merges entries from a cache document; entries beyond the bounds are rejected.
    pub fn merge_json(&self, doc: &serde_json::Value) -> Result<usize> {
        let obj = doc
            .as_object()
            .ok_or_else(|| argument("hurwitz cache must be a JSON object"))?;
        let mut parsed = Vec::with_capacity(obj.len());
        for (k, v) in obj {
            let q = WalkQuery::from_key(k)?;
            self.check_bounds(&q)?;
            let count: u64 = v
                .as_str()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| argument(format!("cache value for {k} is not a decimal string")))?;
            parsed.push((q, count));
        }
        let n = parsed.len();
        self.entries.write().unwrap().extend(parsed);
        Ok(n)
    }

    pub fn load(&self, path: &Path) -> Result<usize> {
        let text = fs::read_to_string(path)
            .map_err(|e| argument(format!("reading {}: {e}", path.display())))?;
        let doc: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| argument(format!("parsing {}: {e}", path.display())))?;
        self.merge_json(&doc)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json()).expect("table serializes");
        fs::write(path, text).map_err(|e| argument(format!("writing {}: {e}", path.display())))
    }
}

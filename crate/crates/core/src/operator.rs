//! Finite multivalued operators and the p-cyclic monotonicity test.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{QVector, Rational};

/// Default cap on the cycle order `p`; enumeration costs `|F|^(p+1)`.
pub const DEFAULT_MAX_P: usize = 4;

/// The enumeration cap in effect: `PCM_MAX_P` when set to a positive
/// integer, otherwise [`DEFAULT_MAX_P`].
pub fn max_p() -> usize {
    std::env::var("PCM_MAX_P")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&p| p > 0)
        .unwrap_or(DEFAULT_MAX_P)
}

pub(crate) fn check_order(p: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::Input("cycle order p must be at least 1".into()));
    }
    let cap = max_p();
    if p > cap {
        return Err(Error::OrderTooLarge { p, cap });
    }
    Ok(())
}

/// One graph element `(x, x*)`; the dual space is identified with the primal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointPair {
    pub x: QVector,
    pub xs: QVector,
}

impl PointPair {
    pub fn new(x: QVector, xs: QVector) -> Result<Self> {
        if x.dim() != xs.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                found: xs.dim(),
            });
        }
        if x.dim() == 0 {
            return Err(Error::Input("zero-dimensional point".into()));
        }
        Ok(PointPair { x, xs })
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }
}

impl fmt::Display for PointPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.xs)
    }
}

/// A finite operator, stored as a set of graph pairs in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteOperator {
    dim: usize,
    pairs: BTreeSet<PointPair>,
}

impl FiniteOperator {
    /// Builds an operator of the given dimension; duplicates collapse.
    pub fn new(dim: usize, pairs: impl IntoIterator<Item = PointPair>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("operator dimension must be positive".into()));
        }
        let mut set = BTreeSet::new();
        for pair in pairs {
            pair.x.check_dim(dim)?;
            pair.xs.check_dim(dim)?;
            set.insert(pair);
        }
        Ok(FiniteOperator { dim, pairs: set })
    }

    /// Infers the dimension from the first pair; fails on empty input.
    pub fn from_pairs(pairs: impl IntoIterator<Item = PointPair>) -> Result<Self> {
        let pairs: Vec<PointPair> = pairs.into_iter().collect();
        let dim = pairs
            .first()
            .map(PointPair::dim)
            .ok_or_else(|| Error::Input("operator has no pairs".into()))?;
        Self::new(dim, pairs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PointPair> + Clone {
        self.pairs.iter()
    }

    pub fn pairs(&self) -> &BTreeSet<PointPair> {
        &self.pairs
    }

    pub fn contains(&self, pair: &PointPair) -> bool {
        self.pairs.contains(pair)
    }

    /// Distinct domain points in lexicographic order.
    pub fn domain(&self) -> Vec<QVector> {
        let set: BTreeSet<&QVector> = self.pairs.iter().map(|p| &p.x).collect();
        set.into_iter().cloned().collect()
    }

    /// Distinct range points in lexicographic order.
    pub fn range(&self) -> Vec<QVector> {
        let set: BTreeSet<&QVector> = self.pairs.iter().map(|p| &p.xs).collect();
        set.into_iter().cloned().collect()
    }

    pub fn in_domain(&self, x: &QVector) -> bool {
        self.pairs.iter().any(|p| &p.x == x)
    }

    pub fn in_range(&self, xs: &QVector) -> bool {
        self.pairs.iter().any(|p| &p.xs == xs)
    }

    pub fn is_subset(&self, other: &FiniteOperator) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    pub fn with_pair(&self, pair: PointPair) -> Result<Self> {
        pair.x.check_dim(self.dim)?;
        let mut next = self.clone();
        next.pairs.insert(pair);
        Ok(next)
    }

    /// Replaces every pair at `x` by `{x} × images`.
    pub fn with_images(&self, x: &QVector, images: impl IntoIterator<Item = QVector>) -> Self {
        let mut pairs: BTreeSet<PointPair> =
            self.pairs.iter().filter(|p| &p.x != x).cloned().collect();
        for xs in images {
            pairs.insert(PointPair { x: x.clone(), xs });
        }
        FiniteOperator {
            dim: self.dim,
            pairs,
        }
    }
}

/// A closed tuple `(x_0, x_0*), ..., (x_p, x_p*)` with `x_{p+1} = x_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    entries: Vec<PointPair>,
}

impl Cycle {
    pub fn new(entries: Vec<PointPair>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::Input("a cycle needs at least two entries".into()));
        }
        let dim = entries[0].dim();
        for e in &entries {
            e.x.check_dim(dim)?;
            e.xs.check_dim(dim)?;
        }
        Ok(Cycle { entries })
    }

    pub fn entries(&self) -> &[PointPair] {
        &self.entries
    }

    /// The cycle order, `entries.len() - 1`.
    pub fn order(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn rotated(&self, by: usize) -> Cycle {
        let mut entries = self.entries.clone();
        entries.rotate_left(by % self.entries.len());
        Cycle { entries }
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" -> ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// `sum_k <x_{k+1} - x_k, x_k*>` with wrap-around.
pub fn cyclic_sum(cycle: &Cycle) -> Rational {
    cyclic_sum_of(cycle.entries.iter())
}

pub(crate) fn cyclic_sum_of<'a, I>(entries: I) -> Rational
where
    I: IntoIterator<Item = &'a PointPair>,
    I::IntoIter: Clone,
{
    let it = entries.into_iter();
    let Some(first) = it.clone().next() else {
        return Rational::zero();
    };
    let mut total = Rational::zero();
    let mut nexts = it.clone().skip(1).chain(std::iter::once(first));
    for cur in it {
        let next = nexts.next().expect("same length");
        total += next.x.sub(&cur.x).dot(&cur.xs);
    }
    total
}

/// Streams every ordered `n`-tuple of indices in `0..k` with repetition, the
/// last position varying fastest.
#[derive(Clone, Debug)]
pub struct IndexTuples {
    k: usize,
    current: Vec<usize>,
    done: bool,
}

impl IndexTuples {
    pub fn new(k: usize, n: usize) -> Self {
        IndexTuples {
            k,
            current: vec![0; n],
            done: k == 0 && n > 0,
        }
    }
}

impl Iterator for IndexTuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let mut pos = self.current.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.current[pos] += 1;
            if self.current[pos] < self.k {
                break;
            }
            self.current[pos] = 0;
        }
        Some(out)
    }
}

/// Streams all `|F|^n` ordered `n`-tuples of pairs of `op`.
pub fn enumerate_tuples(op: &FiniteOperator, n: usize) -> impl Iterator<Item = Vec<&PointPair>> {
    let pairs: Vec<&PointPair> = op.iter().collect();
    IndexTuples::new(pairs.len(), n).map(move |idx| idx.iter().map(|&i| pairs[i]).collect())
}

/// Outcome of [`is_p_mono`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PMonoReport {
    pub verdict: bool,
    pub max_sum: Rational,
    /// First maximizing cycle in tuple-stream order, present iff `!verdict`.
    pub witness: Option<Cycle>,
}

/// Table of `<x_a, x_b*>` so that a cycle sum over indices costs `p + 1`
/// additions.
pub(crate) struct PairingTable {
    pub(crate) cross: Vec<Vec<Rational>>,
}

impl PairingTable {
    pub(crate) fn new(pairs: &[&PointPair]) -> Self {
        let cross = pairs
            .iter()
            .map(|a| pairs.iter().map(|b| a.x.dot(&b.xs)).collect())
            .collect();
        PairingTable { cross }
    }

    /// Cycle sum over `idx` using `<x_{next} - x_cur, x_cur*>`.
    pub(crate) fn cycle_sum(&self, idx: &[usize]) -> Rational {
        let n = idx.len();
        let mut total = Rational::zero();
        for k in 0..n {
            let cur = idx[k];
            let next = idx[(k + 1) % n];
            total += &self.cross[next][cur];
            total -= &self.cross[cur][cur];
        }
        total
    }
}

/// Decides p-cyclic monotonicity by enumerating all `(p+1)`-cycles.
pub fn is_p_mono(op: &FiniteOperator, p: usize) -> Result<PMonoReport> {
    check_order(p)?;
    if op.is_empty() {
        return Err(Error::Input("operator has no pairs".into()));
    }
    let pairs: Vec<&PointPair> = op.iter().collect();
    let table = PairingTable::new(&pairs);
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for idx in IndexTuples::new(pairs.len(), p + 1) {
        let s = table.cycle_sum(&idx);
        if best.as_ref().is_none_or(|(b, _)| s > *b) {
            best = Some((s, idx));
        }
    }
    let (max_sum, idx) = best.expect("nonempty operator yields cycles");
    let verdict = max_sum <= Rational::zero();
    let witness = if verdict {
        None
    } else {
        Some(Cycle {
            entries: idx.iter().map(|&i| pairs[i].clone()).collect(),
        })
    };
    Ok(PMonoReport {
        verdict,
        max_sum,
        witness,
    })
}

/// `F(z1)`: every `xs` with `(z1, xs)` in the graph.
pub fn image(op: &FiniteOperator, z1: &QVector) -> Vec<QVector> {
    op.iter()
        .filter(|p| &p.x == z1)
        .map(|p| p.xs.clone())
        .collect()
}

/// `F^{-1}(zps)`: every `x` with `(x, zps)` in the graph.
pub fn preimage(op: &FiniteOperator, zps: &QVector) -> Vec<QVector> {
    let set: BTreeSet<QVector> = op
        .iter()
        .filter(|p| &p.xs == zps)
        .map(|p| p.x.clone())
        .collect();
    set.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qv;

    fn pp(x: QVector, xs: QVector) -> PointPair {
        PointPair::new(x, xs).unwrap()
    }

    #[test]
    fn repeated_point_cycle_is_zero() {
        let e = pp(qv![1, 0], qv![0, 1]);
        let c = Cycle::new(vec![e.clone(), e.clone(), e]).unwrap();
        assert_eq!(cyclic_sum(&c), Rational::zero());
    }

    #[test]
    fn one_dimensional_cycle() {
        let c = Cycle::new(vec![pp(qv![0], qv![1]), pp(qv![1], qv![0])]).unwrap();
        assert_eq!(cyclic_sum(&c), crate::rational::int(1));
    }

    #[test]
    fn tuple_counts() {
        let two = FiniteOperator::from_pairs([pp(qv![0], qv![0]), pp(qv![1], qv![1])]).unwrap();
        assert_eq!(enumerate_tuples(&two, 2).count(), 4);
        let four = FiniteOperator::from_pairs((0..4).map(|i| pp(qv![i], qv![i]))).unwrap();
        assert_eq!(enumerate_tuples(&four, 3).count(), 64);
        let one = FiniteOperator::from_pairs([pp(qv![0], qv![0])]).unwrap();
        assert_eq!(enumerate_tuples(&one, 5).count(), 1);
    }

    #[test]
    fn tuple_stream_is_lexicographic() {
        let all: Vec<Vec<usize>> = IndexTuples::new(2, 2).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn negative_identity_is_not_monotone() {
        let op = FiniteOperator::from_pairs([pp(qv![1], qv![-1]), pp(qv![-1], qv![1])]).unwrap();
        let r = is_p_mono(&op, 1).unwrap();
        assert!(!r.verdict);
        assert_eq!(r.max_sum, crate::rational::int(4));
        let w = r.witness.unwrap();
        assert_eq!(cyclic_sum(&w), crate::rational::int(4));
    }

    #[test]
    fn duplicates_collapse() {
        let a = pp(qv![1], qv![2]);
        let op = FiniteOperator::from_pairs([a.clone(), a]).unwrap();
        assert_eq!(op.len(), 1);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        assert!(PointPair::new(qv![1, 2], qv![1]).is_err());
        assert!(FiniteOperator::new(2, [pp(qv![1], qv![1])]).is_err());
    }

    #[test]
    fn order_cap_enforced() {
        let op = FiniteOperator::from_pairs([pp(qv![0], qv![0])]).unwrap();
        assert!(matches!(
            is_p_mono(&op, DEFAULT_MAX_P + 1),
            Err(Error::OrderTooLarge { .. })
        ));
        assert!(is_p_mono(&op, 0).is_err());
    }

    #[test]
    fn image_and_preimage() {
        let op = FiniteOperator::from_pairs([
            pp(qv![1, 0], qv![0, 1]),
            pp(qv![1, 0], qv![0, -1]),
            pp(qv![0, 1], qv![-1, 0]),
        ])
        .unwrap();
        assert_eq!(image(&op, &qv![1, 0]), vec![qv![0, -1], qv![0, 1]]);
        assert!(image(&op, &qv![5, 5]).is_empty());
        assert_eq!(preimage(&op, &qv![-1, 0]), vec![qv![0, 1]]);
        assert!(preimage(&op, &qv![9, 9]).is_empty());
    }
}

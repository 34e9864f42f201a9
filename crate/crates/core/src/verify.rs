//! Certificates and refuters for operators that are not finite.
//!
//! A chain of pairwise perpendicular nodes reduces the p-cyclic monotonicity
//! of the union of its segments to that of the nodes. For anything else the
//! falsifier can only search for a positive cycle.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::operator::{cyclic_sum, is_p_mono, Cycle, FiniteOperator, PointPair};
use crate::polar::{polar_fiber, PolarQuery};
use crate::polyhedra::{normal_cone_at, vertices_and_rays, PolytopeHull, VPolyhedron};
use crate::rational::{format_rational, QVector, Rational};

/// Default denominator of the sampling grid on segments and rays.
pub const DEFAULT_GRID: u32 = 8;

/// Default number of random cycles tried by [`falsify_pmono`].
pub const DEFAULT_BUDGET: usize = 10_000;

/// The closed polygonal path through `nodes` (wrapping to the first), with
/// the normal cone of `hull` added at each point when a hull is given.
#[derive(Clone, Debug)]
pub struct ChainOperator {
    pub nodes: Vec<PointPair>,
    pub hull: Option<PolytopeHull>,
}

impl ChainOperator {
    pub fn new(nodes: Vec<PointPair>, hull: Option<PolytopeHull>) -> Result<Self> {
        let Some(first) = nodes.first() else {
            return Err(Error::Input("chain has no nodes".into()));
        };
        let dim = first.dim();
        for n in &nodes {
            n.x.check_dim(dim)?;
        }
        if let Some(h) = &hull {
            if h.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: h.dim(),
                });
            }
        }
        Ok(ChainOperator { nodes, hull })
    }

    pub fn dim(&self) -> usize {
        self.nodes[0].dim()
    }

    pub fn node_operator(&self) -> Result<FiniteOperator> {
        FiniteOperator::new(self.dim(), self.nodes.iter().cloned())
    }
}

/// `<w_i - w_{i+1}, w_i* - w_{i+1}*>` for each node, cyclically.
pub fn perpendicularity_check(chain: &ChainOperator) -> Vec<Rational> {
    let n = chain.nodes.len();
    (0..n)
        .map(|i| {
            let a = &chain.nodes[i];
            let b = &chain.nodes[(i + 1) % n];
            a.x.sub(&b.x).dot(&a.xs.sub(&b.xs))
        })
        .collect()
}

/// p-cyclic monotonicity of the segment union, decided on the nodes.
/// Returns the verdict and the largest cyclic sum over node cycles.
pub fn chain_pmono(chain: &ChainOperator, p: usize) -> Result<(bool, Rational)> {
    let n = chain.nodes.len();
    if let Some((i, v)) = perpendicularity_check(chain)
        .into_iter()
        .enumerate()
        .find(|(_, v)| !v.is_zero())
    {
        return Err(Error::NotPerpendicular {
            index: i + 1,
            next: (i + 1) % n + 1,
            value: format_rational(&v),
        });
    }
    let report = is_p_mono(&chain.node_operator()?, p)?;
    Ok((report.verdict, report.max_sum))
}

/// Grid points `(1 - j/d) w_i + (j/d) w_{i+1}` on every segment, plus, when
/// the chain has a hull, `z* + (j/d) r` for each normal-cone ray `r` at each
/// segment point `(z, z*)`.
pub fn sample_chain(chain: &ChainOperator, denominator: u32) -> Result<Vec<PointPair>> {
    let d = denominator.max(1);
    let n = chain.nodes.len();
    let mut out = BTreeSet::new();
    let steps: Vec<Rational> = (0..=d).map(|j| Rational::new(j.into(), d.into())).collect();
    for i in 0..n {
        let a = &chain.nodes[i];
        let b = &chain.nodes[(i + 1) % n];
        for t in &steps {
            let x = a.x.add(&b.x.sub(&a.x).scale(t));
            let xs = a.xs.add(&b.xs.sub(&a.xs).scale(t));
            if let Some(h) = &chain.hull {
                let cone = vertices_and_rays(&normal_cone_at(h, &x)?);
                for r in cone.rays.iter().chain(&cone.lineality) {
                    for s in steps.iter().skip(1) {
                        out.insert(PointPair::new(x.clone(), xs.add(&r.scale(s)))?);
                    }
                }
            }
            out.insert(PointPair::new(x, xs)?);
        }
    }
    Ok(out.into_iter().collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FalsificationReport {
    pub found: bool,
    pub cycle: Option<Cycle>,
    pub sum: Option<Rational>,
    /// Number of cycles evaluated.
    pub samples_used: usize,
}

impl FalsificationReport {
    /// A reported violation is genuine: its sum is positive, recomputes
    /// exactly, and every entry comes from `points`.
    pub fn verify(&self, points: &[PointPair]) -> bool {
        match (&self.cycle, &self.sum) {
            (Some(c), Some(s)) if self.found => {
                s.is_positive()
                    && cyclic_sum(c) == *s
                    && c.entries().iter().all(|e| points.contains(e))
            }
            (None, None) => !self.found,
            _ => false,
        }
    }
}

/// Searches for a (p+1)-cycle with positive sum: `budget` uniformly random
/// cycles from a generator seeded with `seed`, then every cycle of the
/// sample. A miss proves nothing.
pub fn falsify_pmono(
    points: &[PointPair],
    p: usize,
    budget: usize,
    seed: u64,
) -> Result<FalsificationReport> {
    let op = FiniteOperator::from_pairs(points.iter().cloned())?;
    let pairs: Vec<&PointPair> = op.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used = 0;
    for _ in 0..budget {
        let entries: Vec<PointPair> = (0..=p)
            .map(|_| pairs[rng.gen_range(0..pairs.len())].clone())
            .collect();
        used += 1;
        let cycle = Cycle::new(entries)?;
        let s = cyclic_sum(&cycle);
        if s.is_positive() {
            return Ok(FalsificationReport {
                found: true,
                cycle: Some(cycle),
                sum: Some(s),
                samples_used: used,
            });
        }
    }
    let report = is_p_mono(&op, p)?;
    used += pairs.len().pow(p as u32 + 1);
    Ok(match report.witness {
        Some(cycle) => FalsificationReport {
            found: true,
            sum: Some(report.max_sum),
            cycle: Some(cycle),
            samples_used: used,
        },
        None => FalsificationReport {
            found: false,
            cycle: None,
            sum: None,
            samples_used: used,
        },
    })
}

/// Whether the polar fiber at `z0` is exactly `expected`, comparing
/// canonical generators.
pub fn fiber_compare(q: &PolarQuery, z0: &QVector, expected: &VPolyhedron) -> Result<bool> {
    let actual = vertices_and_rays(&polar_fiber(q, z0)?);
    let expected = VPolyhedron::new(
        expected.dim,
        expected.vertices.iter().cloned(),
        expected.rays.iter().cloned(),
        expected.lineality.iter().cloned(),
    )?;
    Ok(actual == expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qv;
    use crate::rational::int;

    fn pp(x: QVector, xs: QVector) -> PointPair {
        PointPair::new(x, xs).unwrap()
    }

    #[test]
    fn single_node_chain() {
        let c = ChainOperator::new(vec![pp(qv![1, 2], qv![3, 4])], None).unwrap();
        assert_eq!(perpendicularity_check(&c), vec![int(0)]);
        assert_eq!(chain_pmono(&c, 2).unwrap(), (true, int(0)));
    }

    #[test]
    fn non_perpendicular_chain_is_rejected() {
        let c = ChainOperator::new(vec![pp(qv![0], qv![0]), pp(qv![1], qv![1])], None).unwrap();
        match chain_pmono(&c, 1) {
            Err(Error::NotPerpendicular { index, next, .. }) => assert_eq!((index, next), (1, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn falsifier_finds_decreasing_pair() {
        let pts = vec![pp(qv![1], qv![-1]), pp(qv![-1], qv![1])];
        let r = falsify_pmono(&pts, 1, 50, 7).unwrap();
        assert!(r.found);
        assert!(r.verify(&pts));
    }

    #[test]
    fn falsifier_misses_on_monotone_sample() {
        let pts = vec![pp(qv![0], qv![0]), pp(qv![1], qv![1])];
        let r = falsify_pmono(&pts, 2, 100, 1).unwrap();
        assert!(!r.found);
        assert!(r.verify(&pts));
        assert_eq!(r.samples_used, 100 + 8);
    }

    #[test]
    fn grid_on_segment() {
        let c = ChainOperator::new(
            vec![pp(qv![0, 0], qv![0, 0]), pp(qv![2, 0], qv![0, 2])],
            None,
        )
        .unwrap();
        let s = sample_chain(&c, 2).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.contains(&pp(qv![1, 0], qv![0, 1])));
    }
}

//! The p-cyclically monotone polar of a finite operator.
//!
//! `polar_contains` is the brute-force definition and serves as the oracle.
//! Everything else goes through the tables of `Ñ(z1, zp*)` and the maxima
//! `M̃(z0, z1)`, which reduce a fiber to at most `#dom F` inequalities in
//! `z0*`.

pub mod engine;

use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::operator::{
    check_order, cyclic_sum_of, FiniteOperator, IndexTuples, PairingTable, PointPair,
};
use crate::polyhedra::{lp_solve, HPolyhedron, LinearInequality, LpStatus, PolytopeHull, Sense};
use crate::rational::{QVector, Rational};

pub use engine::{EngineRegistry, ExpandedEngine, FiberEngine, MonotoneEngine, ReducedEngine};

/// An operator together with the cycle order of its polar.
#[derive(Clone, Debug)]
pub struct PolarQuery {
    op: FiniteOperator,
    p: usize,
    tables: OnceLock<NTable>,
}

/// `Ñ(z1, zp*)` for every `z1` in the domain and `zp*` in the range.
#[derive(Clone, Debug)]
struct NTable {
    dom: Vec<QVector>,
    ran: Vec<QVector>,
    values: Vec<Vec<Rational>>,
}

impl PolarQuery {
    pub fn new(op: FiniteOperator, p: usize) -> Result<Self> {
        check_order(p)?;
        if op.is_empty() {
            return Err(Error::Input("operator has no pairs".into()));
        }
        Ok(PolarQuery {
            op,
            p,
            tables: OnceLock::new(),
        })
    }

    pub fn operator(&self) -> &FiniteOperator {
        &self.op
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    fn tables(&self) -> &NTable {
        self.tables.get_or_init(|| build_ntable(&self.op, self.p))
    }

    fn require_reduced(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::Unsupported {
                p: self.p,
                reason: "the monotone polar has no Ñ/M̃ reduction",
            });
        }
        Ok(())
    }
}

fn build_ntable(op: &FiniteOperator, p: usize) -> NTable {
    let pairs: Vec<&PointPair> = op.iter().collect();
    let table = PairingTable::new(&pairs);
    let dom = op.domain();
    let ran = op.range();
    let inner: Vec<Vec<usize>> = IndexTuples::new(pairs.len(), p.saturating_sub(2)).collect();
    let values = dom
        .iter()
        .map(|z1| {
            let firsts: Vec<usize> = (0..pairs.len()).filter(|&i| &pairs[i].x == z1).collect();
            ran.iter()
                .map(|zps| {
                    let lasts: Vec<usize> =
                        (0..pairs.len()).filter(|&i| &pairs[i].xs == zps).collect();
                    let mut best: Option<Rational> = None;
                    let mut idx = vec![0; p];
                    for &a in &firsts {
                        for &b in &lasts {
                            idx[0] = a;
                            idx[p - 1] = b;
                            for mid in &inner {
                                idx[1..p - 1].clone_from_slice(mid);
                                let s = table.cycle_sum(&idx);
                                if best.as_ref().is_none_or(|v| s > *v) {
                                    best = Some(s);
                                }
                            }
                        }
                    }
                    best.expect("z1 in dom and zps in ran")
                })
                .collect()
        })
        .collect();
    NTable { dom, ran, values }
}

/// Outcome of the brute-force membership test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarVerdict {
    pub verdict: bool,
    /// Largest cyclic sum over all cycles through `(z0, z0*)`.
    pub worst: Rational,
    /// The p-tuple from the operator realizing `worst`, present iff
    /// `!verdict`.
    pub witness: Option<Vec<PointPair>>,
}

/// Decides `(z0, z0s)` in the p-polar directly from the definition.
pub fn polar_contains(q: &PolarQuery, z0: &QVector, z0s: &QVector) -> Result<PolarVerdict> {
    let head = PointPair::new(z0.clone(), z0s.clone())?;
    head.x.check_dim(q.dim())?;
    let pairs: Vec<&PointPair> = q.op.iter().collect();
    let mut best: Option<(Rational, Vec<usize>)> = None;
    let mut cycle: Vec<&PointPair> = Vec::with_capacity(q.p + 1);
    for idx in IndexTuples::new(pairs.len(), q.p) {
        cycle.clear();
        cycle.push(&head);
        cycle.extend(idx.iter().map(|&i| pairs[i]));
        let s = cyclic_sum_of(cycle.iter().copied());
        if best.as_ref().is_none_or(|(b, _)| s > *b) {
            best = Some((s, idx));
        }
    }
    let (worst, idx) = best.expect("operator is nonempty");
    let verdict = !worst.is_positive();
    Ok(PolarVerdict {
        witness: (!verdict).then(|| idx.iter().map(|&i| pairs[i].clone()).collect()),
        verdict,
        worst,
    })
}

/// `Ñ(z1, zp*)`: the largest `N(Z)` over tuples starting at `z1` and ending
/// at a pair with image `zp*`.
pub fn n_tilde(q: &PolarQuery, z1: &QVector, zps: &QVector) -> Result<Rational> {
    q.require_reduced()?;
    z1.check_dim(q.dim())?;
    zps.check_dim(q.dim())?;
    let t = q.tables();
    let i = t
        .dom
        .binary_search(z1)
        .map_err(|_| Error::Domain(format!("{z1} is not in the domain")))?;
    let j = t
        .ran
        .binary_search(zps)
        .map_err(|_| Error::Domain(format!("{zps} is not in the range")))?;
    Ok(t.values[i][j].clone())
}

/// `M̃(z0, z1) = max over zp* of Ñ(z1, zp*) + <z0 - z1, zp*>`.
pub fn m_tilde(q: &PolarQuery, z0: &QVector, z1: &QVector) -> Result<Rational> {
    q.require_reduced()?;
    z0.check_dim(q.dim())?;
    z1.check_dim(q.dim())?;
    let t = q.tables();
    let i = t
        .dom
        .binary_search(z1)
        .map_err(|_| Error::Domain(format!("{z1} is not in the domain")))?;
    Ok(m_tilde_row(t, i, &z0.sub(z1)))
}

fn m_tilde_row(t: &NTable, i: usize, shift: &QVector) -> Rational {
    t.ran
        .iter()
        .zip(&t.values[i])
        .map(|(zps, n)| n + shift.dot(zps))
        .max()
        .expect("range is nonempty")
}

/// Right-hand side of the domain inequality at each domain point: `M̃` for
/// `p >= 2`, and `max over x* in F(x) of <z0 - x, x*>` for `p = 1`.
fn domain_bounds(q: &PolarQuery, z0: &QVector) -> Vec<(QVector, Rational)> {
    if q.p == 1 {
        return q
            .op
            .domain()
            .into_iter()
            .map(|x| {
                let shift = z0.sub(&x);
                let m =
                    q.op.iter()
                        .filter(|pp| pp.x == x)
                        .map(|pp| shift.dot(&pp.xs))
                        .max()
                        .expect("x is in the domain");
                (x, m)
            })
            .collect();
    }
    let t = q.tables();
    t.dom
        .iter()
        .enumerate()
        .map(|(i, x)| (x.clone(), m_tilde_row(t, i, &z0.sub(x))))
        .collect()
}

/// `{z0* : <z0 - z1, z0*> >= M̃(z0, z1) for z1 in dom F}`.
///
/// The row for `z1 = z0`, when present, is the constant condition
/// `0 >= M̃(z0, z0)`; it empties the fiber exactly when some cycle through
/// `(z0, ·)` and the operator alone is positive.
pub(crate) fn reduced_fiber(q: &PolarQuery, z0: &QVector) -> Result<HPolyhedron> {
    q.require_reduced()?;
    z0.check_dim(q.dim())?;
    let rows = domain_bounds(q, z0)
        .into_iter()
        .map(|(z1, m)| LinearInequality::ge(z0.sub(&z1), m));
    HPolyhedron::new(q.dim(), rows)
}

/// One row `<z0 - z1, z0*> >= Ñ(z1, zp*) + <z0 - z1, zp*>` per pair
/// `(z1, zp*)` of domain and range points.
pub(crate) fn expanded_fiber(q: &PolarQuery, z0: &QVector) -> Result<HPolyhedron> {
    q.require_reduced()?;
    z0.check_dim(q.dim())?;
    let t = q.tables();
    let mut rows = Vec::with_capacity(t.dom.len() * t.ran.len());
    for (i, z1) in t.dom.iter().enumerate() {
        let shift = z0.sub(z1);
        for (zps, n) in t.ran.iter().zip(&t.values[i]) {
            rows.push(LinearInequality::ge(shift.clone(), n + shift.dot(zps)));
        }
    }
    HPolyhedron::new(q.dim(), rows)
}

/// One row `<z0 - x, z0*> >= <z0 - x, x*>` per graph pair.
pub(crate) fn monotone_fiber(q: &PolarQuery, z0: &QVector) -> Result<HPolyhedron> {
    z0.check_dim(q.dim())?;
    let rows = q.op.iter().map(|pp| {
        let shift = z0.sub(&pp.x);
        let rhs = shift.dot(&pp.xs);
        LinearInequality::ge(shift, rhs)
    });
    HPolyhedron::new(q.dim(), rows)
}

/// The fiber of the polar at `z0`, from the default engine for `p`.
pub fn polar_fiber(q: &PolarQuery, z0: &QVector) -> Result<HPolyhedron> {
    EngineRegistry::builtin().default_for(q.p)?.fiber(q, z0)
}

/// Evidence for or against `z0` in the domain of the polar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainCertificate {
    pub member: bool,
    /// Whether `z0` lies in the convex hull of the domain of `F`.
    pub in_hull: bool,
    /// Maximizing simplex weights over the domain points (sorted order),
    /// present iff `in_hull`.
    pub lambda: Option<Vec<Rational>>,
    /// Maximum of `sum λ_i M̃(z0, x_i)`, present iff `in_hull`.
    pub lp_value: Option<Rational>,
}

/// Farkas test on the fiber system: maximize `sum λ_i M̃(z0, x_i)` over
/// simplex weights with `sum λ_i x_i = z0`. Points outside the hull of the
/// domain are always members.
pub fn domain_membership(q: &PolarQuery, z0: &QVector) -> Result<DomainCertificate> {
    z0.check_dim(q.dim())?;
    let bounds = domain_bounds(q, z0);
    let n = bounds.len();
    let mut rows: Vec<LinearInequality> = (0..n)
        .map(|i| LinearInequality::ge(QVector::unit(n, i), Rational::zero()))
        .collect();
    rows.push(LinearInequality::eq(
        QVector::new(vec![Rational::one(); n]),
        Rational::one(),
    ));
    for j in 0..q.dim() {
        let coeffs: QVector = bounds.iter().map(|(x, _)| x[j].clone()).collect();
        rows.push(LinearInequality::eq(coeffs, z0[j].clone()));
    }
    let h = HPolyhedron::new(n, rows)?;
    let objective: QVector = bounds.iter().map(|(_, m)| m.clone()).collect();
    let out = lp_solve(&objective, &h, Sense::Max)?;
    match out.status {
        LpStatus::Infeasible => Ok(DomainCertificate {
            member: true,
            in_hull: false,
            lambda: None,
            lp_value: None,
        }),
        LpStatus::Optimal => {
            let value = out.value.expect("optimal carries a value");
            Ok(DomainCertificate {
                member: !value.is_positive(),
                in_hull: true,
                lambda: out.point.map(QVector::into_coords),
                lp_value: Some(value),
            })
        }
        LpStatus::Unbounded => unreachable!("the simplex is bounded"),
    }
}

impl DomainCertificate {
    /// Re-checks the certificate arithmetic against the query.
    pub fn verify(&self, q: &PolarQuery, z0: &QVector) -> bool {
        let hull = match PolytopeHull::new(q.op.domain()) {
            Ok(h) => h,
            Err(_) => return false,
        };
        let inside = hull.contains(z0).unwrap_or(false);
        if inside != self.in_hull {
            return false;
        }
        if !self.in_hull {
            return self.member && self.lambda.is_none() && self.lp_value.is_none();
        }
        let (Some(lambda), Some(value)) = (&self.lambda, &self.lp_value) else {
            return false;
        };
        let bounds = domain_bounds(q, z0);
        if lambda.len() != bounds.len() || lambda.iter().any(Signed::is_negative) {
            return false;
        }
        let total: Rational = lambda.iter().sum();
        let mut combo = QVector::zeros(q.dim());
        let mut objective = Rational::zero();
        for (l, (x, m)) in lambda.iter().zip(&bounds) {
            combo = combo.add(&x.scale(l));
            objective += l * m;
        }
        total.is_one() && combo == *z0 && objective == *value && self.member == !value.is_positive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qv;
    use crate::rational::int;

    fn op(pairs: &[(&[i64], &[i64])]) -> FiniteOperator {
        FiniteOperator::from_pairs(
            pairs.iter().map(|(x, xs)| {
                PointPair::new(QVector::from_ints(x), QVector::from_ints(xs)).unwrap()
            }),
        )
        .unwrap()
    }

    fn bw_seed() -> FiniteOperator {
        op(&[
            (&[1, 0], &[0, 1]),
            (&[0, 1], &[-1, 0]),
            (&[-1, 0], &[-1, -2]),
            (&[0, -1], &[0, -1]),
        ])
    }

    #[test]
    fn trivial_one_dimensional_polar() {
        let q = PolarQuery::new(op(&[(&[0], &[0])]), 1).unwrap();
        let v = polar_contains(&q, &qv![1], &qv![1]).unwrap();
        assert!(v.verdict);
        assert_eq!(v.worst, int(-1));
    }

    #[test]
    fn ntilde_single_candidate() {
        let q = PolarQuery::new(bw_seed(), 2).unwrap();
        assert_eq!(n_tilde(&q, &qv![1, 0], &qv![-1, 0]).unwrap(), int(0));
        assert!(n_tilde(&q, &qv![5, 5], &qv![-1, 0]).is_err());
        assert!(n_tilde(&q, &qv![1, 0], &qv![9, 9]).is_err());
    }

    #[test]
    fn ntilde_rejects_monotone_order() {
        let q = PolarQuery::new(bw_seed(), 1).unwrap();
        assert!(matches!(
            n_tilde(&q, &qv![1, 0], &qv![-1, 0]),
            Err(Error::Unsupported { .. })
        ));
    }

    #[test]
    fn zero_operator_tables() {
        let q = PolarQuery::new(op(&[(&[0], &[0])]), 2).unwrap();
        assert_eq!(n_tilde(&q, &qv![0], &qv![0]).unwrap(), int(0));
        assert_eq!(m_tilde(&q, &qv![7], &qv![0]).unwrap(), int(0));
    }

    #[test]
    fn fiber_rows_match_oracle_on_seed() {
        let q = PolarQuery::new(bw_seed(), 2).unwrap();
        for z0 in [qv![1, 0], qv![0, 0], qv![2, 2]] {
            let h = polar_fiber(&q, &z0).unwrap();
            for a in -3..=3 {
                for b in -3..=3 {
                    let z0s = qv![a, b];
                    assert_eq!(
                        h.contains(&z0s).unwrap(),
                        polar_contains(&q, &z0, &z0s).unwrap().verdict,
                        "z0 = {z0}, z0* = {z0s}"
                    );
                }
            }
        }
    }

    #[test]
    fn domain_outside_hull() {
        let q = PolarQuery::new(bw_seed(), 2).unwrap();
        let c = domain_membership(&q, &qv![2, 2]).unwrap();
        assert!(c.member && !c.in_hull);
        assert!(c.verify(&q, &qv![2, 2]));
    }
}

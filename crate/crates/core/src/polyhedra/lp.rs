//! Exact two-phase simplex with Bland's rule.
//!
//! Every outcome carries a certificate that can be re-checked by plain
//! arithmetic with [`LpOutcome::verify`]:
//!
//! * optimal: multipliers `y` (one per row, in row order of the input
//!   [`HPolyhedron`]) with `y_i >= 0` on `>=` rows, `sum y_i a_i = s c` and
//!   `sum y_i b_i = s * value`, where `s = 1` for minimization and `-1` for
//!   maximization;
//! * infeasible: a Farkas ray `y`, `y_i >= 0` on `>=` rows, with
//!   `sum y_i a_i = 0` and `sum y_i b_i > 0`;
//! * unbounded: a recession direction `r` improving the objective.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::polyhedra::hrep::{HPolyhedron, Relation};
use crate::rational::{QVector, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

impl Sense {
    fn sign(self) -> Rational {
        match self {
            Sense::Min => Rational::from_integer(1.into()),
            Sense::Max => Rational::from_integer((-1).into()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub value: Option<Rational>,
    pub point: Option<QVector>,
    pub dual_certificate: Option<Vec<Rational>>,
    /// Improving recession direction, present iff unbounded.
    pub ray: Option<QVector>,
}

struct Tableau {
    t: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

enum Run {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        for v in self.t[r].iter_mut() {
            *v *= &inv;
        }
        self.rhs[r] *= &inv;
        for i in 0..self.t.len() {
            if i == r || self.t[i][c].is_zero() {
                continue;
            }
            let f = self.t[i][c].clone();
            for j in 0..self.t[i].len() {
                if self.t[r][j].is_zero() {
                    continue;
                }
                let delta = &f * &self.t[r][j];
                self.t[i][j] -= delta;
            }
            let delta = &f * &self.rhs[r];
            self.rhs[i] -= delta;
        }
        self.basis[r] = c;
    }

    fn reduced_cost(&self, cost: &[Rational], j: usize) -> Rational {
        let mut r = cost[j].clone();
        for (k, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() && !self.t[k][j].is_zero() {
                r -= &cost[b] * &self.t[k][j];
            }
        }
        r
    }

    /// Minimizes `cost` over columns `0..enter_limit` as entering candidates.
    fn run(&mut self, cost: &[Rational], enter_limit: usize) -> Run {
        loop {
            let entering = (0..enter_limit)
                .find(|&j| !self.basis.contains(&j) && self.reduced_cost(cost, j).is_negative());
            let Some(j) = entering else {
                return Run::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for k in 0..self.t.len() {
                if !self.t[k][j].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[k] / &self.t[k][j];
                let better = match &leave {
                    None => true,
                    Some((lk, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[k] < self.basis[*lk])
                    }
                };
                if better {
                    leave = Some((k, ratio));
                }
            }
            match leave {
                None => return Run::Unbounded(j),
                Some((k, _)) => self.pivot(k, j),
            }
        }
    }

    /// `c_B B^{-1}`, read off the artificial identity block at `art0..`.
    fn duals(&self, cost: &[Rational], art0: usize) -> Vec<Rational> {
        let m = self.t.len();
        (0..m)
            .map(|i| {
                let mut w = Rational::zero();
                for (k, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() {
                        w += &cost[b] * &self.t[k][art0 + i];
                    }
                }
                w
            })
            .collect()
    }
}

/// Optimizes `<objective, z>` over `constraints`.
pub fn lp_solve(objective: &QVector, constraints: &HPolyhedron, sense: Sense) -> Result<LpOutcome> {
    let n = constraints.dim();
    if objective.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: objective.dim(),
        });
    }
    let rows: Vec<_> = constraints.rows().iter().collect();
    let m = rows.len();
    let n_ge = rows.iter().filter(|r| r.rel == Relation::Ge).count();
    let n_struct = 2 * n + n_ge;
    let art0 = n_struct;
    let width = n_struct + m;

    let mut t = vec![vec![Rational::zero(); width]; m];
    let mut rhs = Vec::with_capacity(m);
    let mut flip = Vec::with_capacity(m);
    let mut slack = 2 * n;
    for (i, row) in rows.iter().enumerate() {
        let f = if row.b.is_negative() { -1 } else { 1 };
        let fq = Rational::from_integer(f.into());
        for j in 0..n {
            t[i][j] = &row.a[j] * &fq;
            t[i][n + j] = -&t[i][j];
        }
        if row.rel == Relation::Ge {
            t[i][slack] = -fq.clone();
            slack += 1;
        }
        t[i][art0 + i] = Rational::from_integer(1.into());
        rhs.push(&row.b * &fq);
        flip.push(fq);
    }
    let mut tab = Tableau {
        t,
        rhs,
        basis: (art0..art0 + m).collect(),
    };

    // Phase I.
    let mut cost1 = vec![Rational::zero(); width];
    for c in cost1.iter_mut().skip(art0) {
        *c = Rational::from_integer(1.into());
    }
    match tab.run(&cost1, n_struct) {
        Run::Optimal => {}
        Run::Unbounded(_) => unreachable!("phase one is bounded below by zero"),
    }
    let infeasibility: Rational = tab
        .basis
        .iter()
        .zip(&tab.rhs)
        .filter(|(b, _)| **b >= art0)
        .map(|(_, v)| v.clone())
        .sum();
    if infeasibility.is_positive() {
        let w = tab.duals(&cost1, art0);
        let y = w.iter().zip(&flip).map(|(w, f)| w * f).collect();
        return Ok(LpOutcome {
            status: LpStatus::Infeasible,
            value: None,
            point: None,
            dual_certificate: Some(y),
            ray: None,
        });
    }
    // Drive zero-level artificials out of the basis; rows where that is
    // impossible are redundant and never touched again.
    for k in 0..m {
        if tab.basis[k] >= art0 {
            if let Some(j) = (0..n_struct).find(|&j| !tab.t[k][j].is_zero()) {
                tab.pivot(k, j);
            }
        }
    }

    // Phase II.
    let s = sense.sign();
    let mut cost2 = vec![Rational::zero(); width];
    for j in 0..n {
        cost2[j] = &objective[j] * &s;
        cost2[n + j] = -&cost2[j];
    }
    match tab.run(&cost2, n_struct) {
        Run::Unbounded(j) => {
            let mut d = vec![Rational::zero(); width];
            d[j] = Rational::from_integer(1.into());
            for (k, &b) in tab.basis.iter().enumerate() {
                d[b] = -tab.t[k][j].clone();
            }
            let ray: QVector = (0..n).map(|i| &d[i] - &d[n + i]).collect();
            Ok(LpOutcome {
                status: LpStatus::Unbounded,
                value: None,
                point: None,
                dual_certificate: None,
                ray: Some(ray),
            })
        }
        Run::Optimal => {
            let mut vals = vec![Rational::zero(); width];
            for (k, &b) in tab.basis.iter().enumerate() {
                vals[b] = tab.rhs[k].clone();
            }
            let point: QVector = (0..n).map(|i| &vals[i] - &vals[n + i]).collect();
            let value = objective.dot(&point);
            let w = tab.duals(&cost2, art0);
            let y = w.iter().zip(&flip).map(|(w, f)| w * f).collect();
            Ok(LpOutcome {
                status: LpStatus::Optimal,
                value: Some(value),
                point: Some(point),
                dual_certificate: Some(y),
                ray: None,
            })
        }
    }
}

impl LpOutcome {
    /// Re-checks the outcome against the problem by exact arithmetic only.
    pub fn verify(&self, objective: &QVector, constraints: &HPolyhedron, sense: Sense) -> bool {
        let rows: Vec<_> = constraints.rows().iter().collect();
        let n = constraints.dim();
        let combine = |y: &[Rational]| -> Option<(QVector, Rational)> {
            if y.len() != rows.len() {
                return None;
            }
            let mut a = QVector::zeros(n);
            let mut b = Rational::zero();
            for (yi, row) in y.iter().zip(&rows) {
                if row.rel == Relation::Ge && yi.is_negative() {
                    return None;
                }
                a = a.add(&row.a.scale(yi));
                b += yi * &row.b;
            }
            Some((a, b))
        };
        let s = sense.sign();
        match self.status {
            LpStatus::Optimal => {
                let (Some(point), Some(value), Some(y)) =
                    (&self.point, &self.value, &self.dual_certificate)
                else {
                    return false;
                };
                if !constraints.contains(point).unwrap_or(false) || objective.dot(point) != *value {
                    return false;
                }
                match combine(y) {
                    Some((a, b)) => a == objective.scale(&s) && b == value * &s,
                    None => false,
                }
            }
            LpStatus::Infeasible => {
                let Some(y) = &self.dual_certificate else {
                    return false;
                };
                match combine(y) {
                    Some((a, b)) => a.is_zero() && b.is_positive(),
                    None => false,
                }
            }
            LpStatus::Unbounded => {
                let Some(r) = &self.ray else {
                    return false;
                };
                let recedes = rows.iter().all(|row| {
                    let v = row.a.dot(r);
                    match row.rel {
                        Relation::Ge => !v.is_negative(),
                        Relation::Eq => v.is_zero(),
                    }
                });
                recedes && (objective.dot(r) * &s).is_negative()
            }
        }
    }
}

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::Result;
use crate::linalg;
use crate::polyhedra::lp::{lp_solve, LpStatus, Sense};
use crate::rational::{format_rational, int, primitive_scale, QVector, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    /// `<a, z> >= b`
    Ge,
    /// `<a, z> = b`
    Eq,
}

/// `<a, z> rel b`, scaled to coprime integers. `Ge` rows are only ever
/// scaled by positive factors; `Eq` rows additionally have a positive
/// leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearInequality {
    pub a: QVector,
    pub b: Rational,
    pub rel: Relation,
}

impl LinearInequality {
    pub fn new(a: QVector, b: Rational, rel: Relation) -> Self {
        let mut all = a.into_coords();
        all.push(b);
        let mut scaled = primitive_scale(&all);
        if rel == Relation::Eq {
            let lead = scaled.iter().find(|c| !c.is_zero()).cloned();
            if lead.is_some_and(|c| c.is_negative()) {
                for c in scaled.iter_mut() {
                    *c = -c.clone();
                }
            }
        }
        let b = scaled.pop().expect("rhs present");
        LinearInequality {
            a: QVector::new(scaled),
            b,
            rel,
        }
    }

    pub fn ge(a: QVector, b: Rational) -> Self {
        Self::new(a, b, Relation::Ge)
    }

    pub fn eq(a: QVector, b: Rational) -> Self {
        Self::new(a, b, Relation::Eq)
    }

    pub fn satisfied_by(&self, z: &QVector) -> bool {
        let lhs = self.a.dot(z);
        match self.rel {
            Relation::Ge => lhs >= self.b,
            Relation::Eq => lhs == self.b,
        }
    }

    fn is_constant(&self) -> bool {
        self.a.is_zero()
    }

    fn constant_holds(&self) -> bool {
        match self.rel {
            Relation::Ge => self.b <= Rational::zero(),
            Relation::Eq => self.b.is_zero(),
        }
    }

    fn infeasible(dim: usize) -> Self {
        LinearInequality {
            a: QVector::zeros(dim),
            b: int(1),
            rel: Relation::Ge,
        }
    }
}

impl fmt::Display for LinearInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.rel {
            Relation::Ge => ">=",
            Relation::Eq => "=",
        };
        write!(f, "<{}, z> {} {}", self.a, rel, format_rational(&self.b))
    }
}

/// A polyhedron `{z : rows}` in inequality form.
///
/// Constant rows are resolved on construction: tautologies are dropped and
/// any contradiction collapses the row set to the single row `<0, z> >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HPolyhedron {
    dim: usize,
    rows: BTreeSet<LinearInequality>,
}

impl HPolyhedron {
    pub fn new(dim: usize, rows: impl IntoIterator<Item = LinearInequality>) -> Result<Self> {
        let mut set = BTreeSet::new();
        let mut contradiction = false;
        for row in rows {
            row.a.check_dim(dim)?;
            if row.is_constant() {
                contradiction |= !row.constant_holds();
                continue;
            }
            set.insert(row);
        }
        if contradiction {
            set.clear();
            set.insert(LinearInequality::infeasible(dim));
        }
        Ok(HPolyhedron { dim, rows: set })
    }

    /// The whole space.
    pub fn universe(dim: usize) -> Self {
        HPolyhedron {
            dim,
            rows: BTreeSet::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &BTreeSet<LinearInequality> {
        &self.rows
    }

    pub fn is_trivially_empty(&self) -> bool {
        self.rows.iter().any(LinearInequality::is_constant)
    }

    pub fn contains(&self, z: &QVector) -> Result<bool> {
        z.check_dim(self.dim)?;
        Ok(self.rows.iter().all(|r| r.satisfied_by(z)))
    }

    pub fn is_feasible(&self) -> bool {
        if self.is_trivially_empty() {
            return false;
        }
        let zero = QVector::zeros(self.dim);
        lp_solve(&zero, self, Sense::Min)
            .map(|o| o.status != LpStatus::Infeasible)
            .unwrap_or(false)
    }

    /// Same rows with every right-hand side set to zero.
    pub fn homogenized(&self) -> HPolyhedron {
        HPolyhedron {
            dim: self.dim,
            rows: self
                .rows
                .iter()
                .filter(|r| !r.is_constant())
                .map(|r| LinearInequality::new(r.a.clone(), Rational::zero(), r.rel))
                .collect(),
        }
    }

    pub fn intersect(&self, other: &HPolyhedron) -> Result<HPolyhedron> {
        HPolyhedron::new(self.dim, self.rows.iter().chain(other.rows.iter()).cloned())
    }

    /// Unique minimal description of the same set: the affine hull as
    /// reduced equality rows, then the irredundant facet inequalities
    /// reduced modulo that hull. Two H-polyhedra describe the same set iff
    /// their canonical forms are equal.
    pub fn canonical(&self) -> HPolyhedron {
        if !self.is_feasible() {
            return HPolyhedron {
                dim: self.dim,
                rows: [LinearInequality::infeasible(self.dim)].into(),
            };
        }
        // Implicit equalities: inequality rows that are tight on the whole set.
        let mut eq_rows: Vec<(QVector, Rational)> = Vec::new();
        let mut ineqs: Vec<(QVector, Rational)> = Vec::new();
        for row in &self.rows {
            match row.rel {
                Relation::Eq => eq_rows.push((row.a.clone(), row.b.clone())),
                Relation::Ge => {
                    let out = lp_solve(&row.a, self, Sense::Max).expect("dims checked");
                    if out.status == LpStatus::Optimal && out.value.as_ref() == Some(&row.b) {
                        eq_rows.push((row.a.clone(), row.b.clone()));
                    } else {
                        ineqs.push((row.a.clone(), row.b.clone()));
                    }
                }
            }
        }
        let aug: Vec<Vec<Rational>> = eq_rows
            .iter()
            .map(|(a, b)| {
                let mut r = a.coords().to_vec();
                r.push(b.clone());
                r
            })
            .collect();
        let (hull, pivots) = linalg::rref(&aug, self.dim);
        let reduce = |a: &QVector, b: &Rational| -> (QVector, Rational) {
            let mut a = a.clone();
            let mut b = b.clone();
            for (row, &pc) in hull.iter().zip(&pivots) {
                let f = a[pc].clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..self.dim {
                    let delta = &f * &row[j];
                    a[j] -= delta;
                }
                b -= &f * &row[self.dim];
            }
            (a, b)
        };
        let eqs: Vec<LinearInequality> = hull
            .iter()
            .map(|r| {
                LinearInequality::eq(QVector::new(r[..self.dim].to_vec()), r[self.dim].clone())
            })
            .collect();
        let mut candidates: BTreeSet<LinearInequality> = ineqs
            .iter()
            .map(|(a, b)| {
                let (a, b) = reduce(a, b);
                LinearInequality::ge(a, b)
            })
            .filter(|r| !r.is_constant())
            .collect();
        // Drop rows implied by the others, one LP per row.
        let all: Vec<LinearInequality> = candidates.iter().cloned().collect();
        for row in all {
            let others = HPolyhedron {
                dim: self.dim,
                rows: eqs
                    .iter()
                    .cloned()
                    .chain(candidates.iter().filter(|r| **r != row).cloned())
                    .collect(),
            };
            let out = lp_solve(&row.a, &others, Sense::Min).expect("dims checked");
            let redundant =
                out.status == LpStatus::Optimal && out.value.as_ref().is_some_and(|v| *v >= row.b);
            if redundant {
                candidates.remove(&row);
            }
        }
        HPolyhedron {
            dim: self.dim,
            rows: eqs.into_iter().chain(candidates).collect(),
        }
    }
}

impl fmt::Display for HPolyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Exact membership test, all rows checked.
pub fn h_contains(h: &HPolyhedron, z: &QVector) -> Result<bool> {
    h.contains(z)
}

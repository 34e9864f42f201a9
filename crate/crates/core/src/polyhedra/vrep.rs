use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::linalg;
use crate::polyhedra::hrep::{HPolyhedron, LinearInequality, Relation};
use crate::polyhedra::lp::{lp_solve, LpStatus, Sense};
use crate::rational::{QVector, Rational};

/// `conv(vertices) + cone(rays) + span(lineality)`.
///
/// Rays are primitive integer vectors. The lineality generators are the rows
/// of the reduced echelon basis of the lineality space, each scaled to
/// primitive integers, so equal spaces have equal generator sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VPolyhedron {
    pub dim: usize,
    pub vertices: BTreeSet<QVector>,
    pub rays: BTreeSet<QVector>,
    pub lineality: BTreeSet<QVector>,
}

impl VPolyhedron {
    pub fn empty(dim: usize) -> Self {
        VPolyhedron {
            dim,
            vertices: BTreeSet::new(),
            rays: BTreeSet::new(),
            lineality: BTreeSet::new(),
        }
    }

    /// Builds a V-polyhedron from arbitrary generators, canonicalizing the
    /// scale of rays and the basis of the lineality space.
    pub fn new(
        dim: usize,
        vertices: impl IntoIterator<Item = QVector>,
        rays: impl IntoIterator<Item = QVector>,
        lineality: impl IntoIterator<Item = QVector>,
    ) -> Result<Self> {
        let vertices: BTreeSet<QVector> = vertices.into_iter().collect();
        let rays: Vec<QVector> = rays.into_iter().collect();
        let lineality: Vec<QVector> = lineality.into_iter().collect();
        for v in vertices.iter().chain(&rays).chain(&lineality) {
            v.check_dim(dim)?;
        }
        Ok(VPolyhedron {
            dim,
            vertices,
            rays: rays
                .iter()
                .filter(|r| !r.is_zero())
                .map(QVector::primitive)
                .collect(),
            lineality: canonical_span(&lineality, dim),
        })
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.rays.is_empty() && self.lineality.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }

    /// Decides `z in conv(V) + cone(R) + span(L)` with one feasibility LP.
    pub fn contains(&self, z: &QVector) -> Result<bool> {
        z.check_dim(self.dim)?;
        if self.is_empty() {
            return Ok(false);
        }
        let gens: Vec<(&QVector, GenKind)> = self
            .vertices
            .iter()
            .map(|v| (v, GenKind::Convex))
            .chain(self.rays.iter().map(|r| (r, GenKind::Conic)))
            .chain(self.lineality.iter().map(|l| (l, GenKind::Free)))
            .collect();
        let n = gens.len();
        let mut rows = Vec::new();
        for (i, (_, kind)) in gens.iter().enumerate() {
            if *kind != GenKind::Free {
                rows.push(LinearInequality::ge(QVector::unit(n, i), Rational::zero()));
            }
        }
        if !self.vertices.is_empty() {
            let sum: QVector = gens
                .iter()
                .map(|(_, k)| {
                    if *k == GenKind::Convex {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            rows.push(LinearInequality::eq(sum, Rational::one()));
        }
        for j in 0..self.dim {
            let coeffs: QVector = gens.iter().map(|(g, _)| g[j].clone()).collect();
            rows.push(LinearInequality::eq(coeffs, z[j].clone()));
        }
        let h = HPolyhedron::new(n, rows)?;
        Ok(h.is_feasible())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum GenKind {
    Convex,
    Conic,
    Free,
}

impl fmt::Display for VPolyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |s: &BTreeSet<QVector>| s.iter().map(|v| v.to_string()).join(", ");
        write!(
            f,
            "co{{{}}} + cone{{{}}} + span{{{}}}",
            list(&self.vertices),
            list(&self.rays),
            list(&self.lineality)
        )
    }
}

fn canonical_span(gens: &[QVector], dim: usize) -> BTreeSet<QVector> {
    let rows: Vec<Vec<Rational>> = gens.iter().map(|g| g.coords().to_vec()).collect();
    let (r, _) = linalg::rref(&rows, dim);
    r.into_iter()
        .map(|row| QVector::new(row).primitive())
        .collect()
}

/// Exact V-representation by exhaustive enumeration of active row sets.
///
/// The lineality space `L` is the kernel of all row normals. Vertices and
/// extreme rays are those of `H ∩ L^⊥`, which is pointed.
pub fn vertices_and_rays(h: &HPolyhedron) -> VPolyhedron {
    let d = h.dim();
    if !h.is_feasible() {
        return VPolyhedron::empty(d);
    }
    let normals: Vec<Vec<Rational>> = h.rows().iter().map(|r| r.a.coords().to_vec()).collect();
    let lineality = canonical_span(&linalg::nullspace(&normals, d), d);

    let mut eqs: Vec<(QVector, Rational)> = h
        .rows()
        .iter()
        .filter(|r| r.rel == Relation::Eq)
        .map(|r| (r.a.clone(), r.b.clone()))
        .collect();
    eqs.extend(lineality.iter().map(|l| (l.clone(), Rational::zero())));
    let ineqs: Vec<&LinearInequality> = h.rows().iter().filter(|r| r.rel == Relation::Ge).collect();

    // Independent equality rows, from the reduced echelon form.
    let aug: Vec<Vec<Rational>> = eqs
        .iter()
        .map(|(a, b)| {
            let mut r = a.coords().to_vec();
            r.push(b.clone());
            r
        })
        .collect();
    let (eq_basis, _) = linalg::rref(&aug, d);
    let r = eq_basis.len();

    let satisfies = |z: &QVector| ineqs.iter().all(|row| row.satisfied_by(z));

    let mut vertices = BTreeSet::new();
    if r <= d {
        for subset in (0..ineqs.len()).combinations(d - r) {
            let mut a: Vec<Vec<Rational>> = eq_basis.iter().map(|row| row[..d].to_vec()).collect();
            let mut b: Vec<Rational> = eq_basis.iter().map(|row| row[d].clone()).collect();
            for &i in &subset {
                a.push(ineqs[i].a.coords().to_vec());
                b.push(ineqs[i].b.clone());
            }
            if let Some(z) = linalg::solve_square(&a, &b) {
                if satisfies(&z) {
                    vertices.insert(z);
                }
            }
        }
    }

    let mut rays = BTreeSet::new();
    if r < d {
        let recedes = |v: &QVector| ineqs.iter().all(|row| !row.a.dot(v).is_negative());
        for subset in (0..ineqs.len()).combinations(d - 1 - r) {
            let mut a: Vec<Vec<Rational>> = eq_basis.iter().map(|row| row[..d].to_vec()).collect();
            for &i in &subset {
                a.push(ineqs[i].a.coords().to_vec());
            }
            let ns = linalg::nullspace(&a, d);
            if ns.len() != 1 {
                continue;
            }
            for v in [ns[0].clone(), ns[0].neg()] {
                if recedes(&v) {
                    rays.insert(v.primitive());
                }
            }
        }
    }

    VPolyhedron {
        dim: d,
        vertices,
        rays,
        lineality,
    }
}

/// Whether `z` lies in `conv(points)`, decided by a feasibility LP.
pub(crate) fn in_convex_hull<'a>(
    points: impl IntoIterator<Item = &'a QVector>,
    z: &QVector,
) -> Result<Option<QVector>> {
    let pts: Vec<&QVector> = points.into_iter().collect();
    let n = pts.len();
    let mut rows: Vec<LinearInequality> = (0..n)
        .map(|i| LinearInequality::ge(QVector::unit(n, i), Rational::zero()))
        .collect();
    rows.push(LinearInequality::eq(
        QVector::new(vec![Rational::one(); n]),
        Rational::one(),
    ));
    for j in 0..z.dim() {
        for p in &pts {
            p.check_dim(z.dim())?;
        }
        let coeffs: QVector = pts.iter().map(|p| p[j].clone()).collect();
        rows.push(LinearInequality::eq(coeffs, z[j].clone()));
    }
    let h = HPolyhedron::new(n, rows)?;
    let out = lp_solve(&QVector::zeros(n), &h, Sense::Min)?;
    Ok(match out.status {
        LpStatus::Optimal => out.point,
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qv;
    use crate::rational::int;

    fn ge(a: QVector, b: i64) -> LinearInequality {
        LinearInequality::ge(a, int(b))
    }

    fn set(vs: &[QVector]) -> BTreeSet<QVector> {
        vs.iter().cloned().collect()
    }

    #[test]
    fn wedge_with_segment_base() {
        let h =
            HPolyhedron::new(2, [ge(qv![1, -1], -1), ge(qv![1, 1], -1), ge(qv![1, 0], 0)]).unwrap();
        let v = vertices_and_rays(&h);
        assert_eq!(v.vertices, set(&[qv![0, -1], qv![0, 1]]));
        assert_eq!(v.rays, set(&[qv![1, -1], qv![1, 1]]));
        assert!(v.lineality.is_empty());
    }

    #[test]
    fn three_dimensional_cone() {
        let h = HPolyhedron::new(
            3,
            [
                ge(qv![2, 1, 1], 4),
                ge(qv![1, -1, 0], -4),
                ge(qv![1, 0, -1], -16),
            ],
        )
        .unwrap();
        let v = vertices_and_rays(&h);
        assert_eq!(v.vertices, set(&[qv![-4, 0, 12]]));
        assert_eq!(v.rays, set(&[qv![1, 1, 1], qv![1, -3, 1], qv![1, 1, -3]]));
    }

    #[test]
    fn unit_square() {
        let h = HPolyhedron::new(
            2,
            [
                ge(qv![1, 0], 0),
                ge(qv![0, 1], 0),
                ge(qv![-1, 0], -1),
                ge(qv![0, -1], -1),
            ],
        )
        .unwrap();
        let v = vertices_and_rays(&h);
        assert_eq!(v.vertices.len(), 4);
        assert!(v.rays.is_empty());
    }

    #[test]
    fn half_plane_has_lineality() {
        let h = HPolyhedron::new(2, [ge(qv![1, 0], 0)]).unwrap();
        let v = vertices_and_rays(&h);
        assert_eq!(v.vertices, set(&[qv![0, 0]]));
        assert_eq!(v.rays, set(&[qv![1, 0]]));
        assert_eq!(v.lineality, set(&[qv![0, 1]]));
    }

    #[test]
    fn infeasible_is_empty() {
        let h = HPolyhedron::new(1, [ge(qv![1], 1), ge(qv![-1], 0)]).unwrap();
        assert!(vertices_and_rays(&h).is_empty());
    }

    #[test]
    fn segment_in_plane() {
        let h = HPolyhedron::new(
            2,
            [
                LinearInequality::eq(qv![1, 0], int(-1)),
                ge(qv![0, 1], -1),
                ge(qv![0, -1], 0),
            ],
        )
        .unwrap();
        let v = vertices_and_rays(&h);
        assert_eq!(v.vertices, set(&[qv![-1, -1], qv![-1, 0]]));
        assert!(v.is_bounded());
    }

    #[test]
    fn v_membership() {
        let v = VPolyhedron::new(2, [qv![0, -1], qv![0, 1]], [qv![2, 2], qv![1, -1]], []).unwrap();
        assert_eq!(v.rays, set(&[qv![1, 1], qv![1, -1]]));
        assert!(v.contains(&qv![0, 0]).unwrap());
        assert!(v.contains(&qv![5, 1]).unwrap());
        assert!(!v.contains(&qv![-1, 0]).unwrap());
    }

    #[test]
    fn hull_membership() {
        let pts = [qv![1, 0], qv![0, 1], qv![-1, 0], qv![0, -1]];
        assert!(in_convex_hull(&pts, &qv![0, 0]).unwrap().is_some());
        assert!(in_convex_hull(&pts, &qv![1, 1]).unwrap().is_none());
    }
}

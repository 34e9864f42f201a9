use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::polyhedra::hrep::{HPolyhedron, LinearInequality};
use crate::polyhedra::vrep::{in_convex_hull, vertices_and_rays, VPolyhedron};
use crate::rational::{QVector, Rational};

/// A polytope given by generating points, which need not be irredundant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolytopeHull {
    points: BTreeSet<QVector>,
}

impl PolytopeHull {
    pub fn new(points: impl IntoIterator<Item = QVector>) -> Result<Self> {
        let points: BTreeSet<QVector> = points.into_iter().collect();
        let Some(first) = points.first() else {
            return Err(Error::Input("hull needs at least one point".into()));
        };
        let dim = first.dim();
        for p in &points {
            p.check_dim(dim)?;
        }
        Ok(PolytopeHull { points })
    }

    pub fn dim(&self) -> usize {
        self.points.first().map(QVector::dim).unwrap_or(0)
    }

    pub fn points(&self) -> &BTreeSet<QVector> {
        &self.points
    }

    pub fn contains(&self, z: &QVector) -> Result<bool> {
        z.check_dim(self.dim())?;
        Ok(in_convex_hull(&self.points, z)?.is_some())
    }

    /// Convex weights over `points()` (in set order) expressing `z`.
    pub fn barycentric(&self, z: &QVector) -> Result<Option<QVector>> {
        z.check_dim(self.dim())?;
        in_convex_hull(&self.points, z)
    }

    /// The generating points that are not convex combinations of the others.
    pub fn extreme_points(&self) -> BTreeSet<QVector> {
        self.points
            .iter()
            .filter(|p| {
                let others = self.points.iter().filter(|q| q != p);
                !in_convex_hull(others, p)
                    .map(|w| w.is_some())
                    .unwrap_or(false)
            })
            .cloned()
            .collect()
    }
}

/// Cone of directions of `h`: rays and lineality of the homogenized system,
/// with the origin as the only vertex.
pub fn recession_cone(h: &HPolyhedron) -> Result<VPolyhedron> {
    if !h.is_feasible() {
        return Err(Error::Domain(
            "recession cone of an empty polyhedron".into(),
        ));
    }
    Ok(vertices_and_rays(&h.homogenized()))
}

/// `N_C(x0)` as `{z : <p - x0, z> <= 0 for every generating point p}`,
/// canonicalized.
pub fn normal_cone_at(c: &PolytopeHull, x0: &QVector) -> Result<HPolyhedron> {
    if !c.contains(x0)? {
        return Err(Error::Domain(format!("{x0} is outside the hull")));
    }
    let rows = c
        .points
        .iter()
        .map(|p| LinearInequality::ge(x0.sub(p), Rational::from_integer(0.into())));
    Ok(HPolyhedron::new(c.dim(), rows)?.canonical())
}

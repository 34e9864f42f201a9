//! Builds a finite operator whose polar, restricted to the hull of the seed
//! domain, is a candidate maximal p-cyclically monotone extension.
//!
//! Each seed domain point `x_k` in turn has its images replaced by the
//! vertices of the current polar fiber at `x_k`. Every step is checked: the
//! intermediate operator stays p-cyclically monotone and the fiber's
//! recession cone equals the normal cone of the hull at `x_k`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::operator::{check_order, is_p_mono, FiniteOperator, PointPair};
use crate::polar::{EngineRegistry, FiberEngine, PolarQuery};
use crate::polyhedra::{normal_cone_at, vertices_and_rays, HPolyhedron, PolytopeHull, VPolyhedron};
use crate::rational::QVector;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionStep {
    /// One-based position in the processing order.
    pub k: usize,
    pub xk: QVector,
    /// Canonical H-representation of the fiber at `xk`.
    pub fiber_h: HPolyhedron,
    pub ek: BTreeSet<QVector>,
    pub rays: BTreeSet<QVector>,
    /// Nonempty only for a single-point seed, where the fiber is the whole
    /// space.
    pub lineality: BTreeSet<QVector>,
}

impl ConstructionStep {
    pub fn fiber_v(&self) -> VPolyhedron {
        VPolyhedron {
            dim: self.xk.dim(),
            vertices: self.ek.clone(),
            rays: self.rays.clone(),
            lineality: self.lineality.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConstructionTrace {
    pub seed: FiniteOperator,
    pub p: usize,
    pub engine: &'static str,
    pub steps: Vec<ConstructionStep>,
    pub final_f: FiniteOperator,
    pub hull: PolytopeHull,
}

/// Runs the construction with the default engine for `p`, processing the
/// seed domain in lexicographic order. The result can depend on the order;
/// use [`Constructor::order`] to follow a given indexing.
pub fn construct(seed: &FiniteOperator, p: usize) -> Result<ConstructionTrace> {
    Constructor::new(p)?.run(seed)
}

/// Construction with a chosen engine and processing order.
pub struct Constructor<'a> {
    p: usize,
    engine: &'a dyn FiberEngine,
    order: Option<Vec<QVector>>,
}

impl<'a> Constructor<'a> {
    pub fn new(p: usize) -> Result<Self> {
        check_order(p)?;
        Ok(Constructor {
            p,
            engine: EngineRegistry::builtin().default_for(p)?,
            order: None,
        })
    }

    pub fn engine(mut self, engine: &'a dyn FiberEngine) -> Result<Self> {
        if !engine.supports(self.p) {
            return Err(Error::Unsupported {
                p: self.p,
                reason: "engine does not handle this cycle order",
            });
        }
        self.engine = engine;
        Ok(self)
    }

    /// Processes the seed domain in the given order instead of sorted order.
    /// The order must be a permutation of the seed domain.
    pub fn order(mut self, order: Vec<QVector>) -> Self {
        self.order = Some(order);
        self
    }

    pub fn run(&self, seed: &FiniteOperator) -> Result<ConstructionTrace> {
        let p = self.p;
        let report = is_p_mono(seed, p)?;
        if let Some(witness) = report.witness {
            return Err(Error::NotCyclicallyMonotone {
                p,
                sum: crate::rational::format_rational(&report.max_sum),
                witness: Box::new(witness),
            });
        }
        let domain = seed.domain();
        let order = match &self.order {
            None => domain.clone(),
            Some(o) => {
                let mut sorted = o.clone();
                sorted.sort();
                if sorted != domain {
                    return Err(Error::Input(
                        "processing order is not a permutation of the seed domain".into(),
                    ));
                }
                o.clone()
            }
        };
        let hull = PolytopeHull::new(domain.iter().cloned())?;
        let dim = seed.dim();

        if domain.len() == 1 {
            let xk = domain[0].clone();
            let lineality = (0..dim).map(|i| QVector::unit(dim, i)).collect();
            let step = ConstructionStep {
                k: 1,
                xk: xk.clone(),
                fiber_h: HPolyhedron::universe(dim),
                ek: crate::operator::image(seed, &xk).into_iter().collect(),
                rays: BTreeSet::new(),
                lineality,
            };
            return Ok(ConstructionTrace {
                seed: seed.clone(),
                p,
                engine: self.engine.name(),
                steps: vec![step],
                final_f: seed.clone(),
                hull,
            });
        }

        let mut current = seed.clone();
        let mut steps = Vec::with_capacity(order.len());
        for (i, xk) in order.iter().enumerate() {
            let k = i + 1;
            let degenerate = |reason: String| Error::Degenerate {
                step: k,
                point: xk.to_string(),
                reason,
            };
            let q = PolarQuery::new(current.clone(), p)?;
            let fiber_h = self.engine.fiber(&q, xk)?.canonical();
            let v = vertices_and_rays(&fiber_h);
            if v.is_empty() {
                return Err(degenerate("empty fiber".into()));
            }
            if !v.lineality.is_empty() {
                return Err(degenerate(format!(
                    "fiber has lineality {{{}}}",
                    v.lineality
                        .iter()
                        .map(|l| l.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                )));
            }
            let normal = vertices_and_rays(&normal_cone_at(&hull, xk)?);
            if normal.rays != v.rays || !normal.lineality.is_empty() {
                return Err(Error::Postcondition(format!(
                    "step {k}: fiber rays differ from the normal cone of the hull at {xk}"
                )));
            }
            current = current.with_images(xk, v.vertices.iter().cloned());
            let check = is_p_mono(&current, p)?;
            if !check.verdict {
                return Err(Error::Postcondition(format!(
                    "step {k}: operator lost {p}-cyclic monotonicity (sum {})",
                    crate::rational::format_rational(&check.max_sum)
                )));
            }
            steps.push(ConstructionStep {
                k,
                xk: xk.clone(),
                fiber_h,
                ek: v.vertices,
                rays: v.rays,
                lineality: BTreeSet::new(),
            });
        }

        let final_q = PolarQuery::new(current.clone(), p)?;
        for step in &steps {
            let again = vertices_and_rays(&self.engine.fiber(&final_q, &step.xk)?);
            if again != step.fiber_v() {
                return Err(Error::Postcondition(format!(
                    "final fiber at {} is {again}, expected {}",
                    step.xk,
                    step.fiber_v()
                )));
            }
        }

        Ok(ConstructionTrace {
            seed: seed.clone(),
            p,
            engine: self.engine.name(),
            steps,
            final_f: current,
            hull,
        })
    }
}

/// Domain points in order of first appearance, for processing a seed in
/// the order it was written down.
pub fn first_appearance_order<'a>(pairs: impl IntoIterator<Item = &'a PointPair>) -> Vec<QVector> {
    let mut seen = BTreeSet::new();
    pairs
        .into_iter()
        .filter(|p| seen.insert(p.x.clone()))
        .map(|p| p.x.clone())
        .collect()
}

/// Value of the constructed operator at `z0`: the polar fiber of the final
/// operator, restricted to the hull. `None` outside the hull or when the
/// fiber is empty.
pub fn evaluate_final(trace: &ConstructionTrace, z0: &QVector) -> Result<Option<VPolyhedron>> {
    if !trace.hull.contains(z0)? {
        return Ok(None);
    }
    let q = PolarQuery::new(trace.final_f.clone(), trace.p)?;
    let engine = EngineRegistry::builtin().get(trace.engine)?;
    let v = vertices_and_rays(&engine.fiber(&q, z0)?);
    Ok((!v.is_empty()).then_some(v))
}

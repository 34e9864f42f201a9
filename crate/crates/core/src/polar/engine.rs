//! Interchangeable ways of writing a polar fiber as an H-polyhedron.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::polar::{expanded_fiber, monotone_fiber, reduced_fiber, PolarQuery};
use crate::polyhedra::HPolyhedron;
use crate::rational::QVector;

/// Produces the inequality system of `F^{μ_p}(z0)`. All engines describe
/// the same set; they differ only in the rows they emit.
pub trait FiberEngine: Send + Sync {
    fn name(&self) -> &'static str;

    fn supports(&self, p: usize) -> bool;

    fn fiber(&self, q: &PolarQuery, z0: &QVector) -> Result<HPolyhedron>;
}

/// One row per graph pair; the plain monotone polar.
pub struct MonotoneEngine;

impl FiberEngine for MonotoneEngine {
    fn name(&self) -> &'static str {
        "monotone"
    }

    fn supports(&self, p: usize) -> bool {
        p == 1
    }

    fn fiber(&self, q: &PolarQuery, z0: &QVector) -> Result<HPolyhedron> {
        check(self, q)?;
        monotone_fiber(q, z0)
    }
}

/// One row per domain point, right-hand side `M̃(z0, z1)`.
pub struct ReducedEngine;

impl FiberEngine for ReducedEngine {
    fn name(&self) -> &'static str {
        "reduced"
    }

    fn supports(&self, p: usize) -> bool {
        p >= 2
    }

    fn fiber(&self, q: &PolarQuery, z0: &QVector) -> Result<HPolyhedron> {
        check(self, q)?;
        reduced_fiber(q, z0)
    }
}

/// One row per (domain point, range point), right-hand side from `Ñ`.
pub struct ExpandedEngine;

impl FiberEngine for ExpandedEngine {
    fn name(&self) -> &'static str {
        "expanded"
    }

    fn supports(&self, p: usize) -> bool {
        p >= 2
    }

    fn fiber(&self, q: &PolarQuery, z0: &QVector) -> Result<HPolyhedron> {
        check(self, q)?;
        expanded_fiber(q, z0)
    }
}

fn check(engine: &dyn FiberEngine, q: &PolarQuery) -> Result<()> {
    if engine.supports(q.p()) {
        Ok(())
    } else {
        Err(Error::Unsupported {
            p: q.p(),
            reason: "engine does not handle this cycle order",
        })
    }
}

/// Engines by name, in registration order.
pub struct EngineRegistry {
    engines: Vec<Box<dyn FiberEngine>>,
}

impl EngineRegistry {
    pub fn new() -> Self {
        EngineRegistry {
            engines: Vec::new(),
        }
    }

    /// Adds an engine, replacing any engine registered under the same name.
    pub fn register(&mut self, engine: Box<dyn FiberEngine>) {
        self.engines.retain(|e| e.name() != engine.name());
        self.engines.push(engine);
    }

    /// The shared registry holding `monotone`, `reduced` and `expanded`.
    pub fn builtin() -> &'static EngineRegistry {
        static BUILTIN: OnceLock<EngineRegistry> = OnceLock::new();
        BUILTIN.get_or_init(|| {
            let mut r = EngineRegistry::new();
            r.register(Box::new(MonotoneEngine));
            r.register(Box::new(ReducedEngine));
            r.register(Box::new(ExpandedEngine));
            r
        })
    }

    pub fn get(&self, name: &str) -> Result<&dyn FiberEngine> {
        self.engines
            .iter()
            .find(|e| e.name() == name)
            .map(|e| e.as_ref())
            .ok_or_else(|| Error::UnknownEngine(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.engines.iter().map(|e| e.name()).collect()
    }

    /// `monotone` for `p = 1`, `reduced` otherwise, falling back to the
    /// first registered engine that supports `p`.
    pub fn default_for(&self, p: usize) -> Result<&dyn FiberEngine> {
        let name = if p == 1 { "monotone" } else { "reduced" };
        self.get(name).or_else(|e| {
            self.engines
                .iter()
                .find(|e| e.supports(p))
                .map(|e| e.as_ref())
                .ok_or(e)
        })
    }
}

impl Default for EngineRegistry {
    fn default() -> Self {
        Self::new()
    }
}

use std::io::{Read, Write};
use std::path::Path;

use serde_json::json;

use pcm_core::construct::{first_appearance_order, ConstructionTrace, Constructor};
use pcm_core::operator::{is_p_mono, FiniteOperator};
use pcm_core::polar::{
    domain_membership, m_tilde, n_tilde, EngineRegistry, FiberEngine, PolarQuery,
};
use pcm_core::polyhedra::vertices_and_rays;
use pcm_core::rational::QVector;
use pcm_core::verify::{chain_pmono, falsify_pmono, perpendicularity_check, ChainOperator};

use crate::doc::{
    cycle_doc, rational_str, rows_doc, to_canonical_string, vector_strs, vrep_doc,
    OperatorDocument, ResultDocument, StepDoc, TracePayload,
};
use crate::svg::{self, BBox};
use crate::{CliError, Command, Common, Order};

pub fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Check(c) => check(&c),
        Command::Construct {
            common,
            engine,
            order,
        } => construct(&common, engine.as_deref(), order),
        Command::Fiber { common, z0, engine } => fiber(&common, &z0, engine.as_deref(), false),
        Command::Vertices { common, z0, engine } => fiber(&common, &z0, engine.as_deref(), true),
        Command::Domain { common, z0 } => domain(&common, &z0),
        Command::Ntilde { common, z1, zps } => ntilde(&common, &z1, &zps),
        Command::Mtilde { common, z0, z1 } => mtilde(&common, &z0, &z1),
        Command::ChainCheck(c) => chain_check(&c),
        Command::Falsify {
            common,
            seed,
            budget,
        } => falsify(&common, seed, budget),
        Command::Render {
            input,
            what,
            bbox,
            out,
        } => {
            let bbox = bbox.as_deref().map(BBox::parse).transpose()?;
            let doc = ResultDocument::parse(&read_input(&input)?)?;
            if doc.kind != "trace" {
                return Err(CliError::Usage(format!(
                    "render needs a trace document, got kind {:?}",
                    doc.kind
                )));
            }
            let trace: TracePayload = serde_json::from_value(doc.payload)
                .map_err(|e| CliError::Parse(format!("trace payload: {e}")))?;
            write_output(&svg::render(&trace, what, bbox)?, out.as_deref())?;
            Ok(0)
        }
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes `text` to `out` through a temporary file in the same directory,
/// or to stdout.
fn write_output(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(io)?;
            stdout.flush().map_err(io)
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
            tmp.write_all(text.as_bytes()).map_err(io)?;
            tmp.persist(path).map_err(|e| io(e.error))?;
            Ok(())
        }
    }
}

struct Loaded {
    doc: OperatorDocument,
    hash: String,
}

impl Loaded {
    fn new(c: &Common) -> Result<Self, CliError> {
        let doc = OperatorDocument::parse(&read_input(&c.input)?)?;
        let hash = doc.hash()?;
        Ok(Loaded { doc, hash })
    }

    fn operator(&self) -> Result<FiniteOperator, CliError> {
        self.doc.operator()
    }

    fn vector(&self, flag: &str, s: &str) -> Result<QVector, CliError> {
        let v: QVector = s
            .parse()
            .map_err(|_| CliError::Usage(format!("--{flag}: invalid vector {s:?}")))?;
        v.check_dim(self.doc.dim)?;
        Ok(v)
    }

    fn emit(&self, c: &Common, kind: &str, payload: impl serde::Serialize) -> Result<(), CliError> {
        let doc = ResultDocument::new(kind, c.p, self.hash.clone(), payload)?;
        write_output(&to_canonical_string(&doc)?, c.out.as_deref())
    }
}

fn engine_for(name: Option<&str>, p: usize) -> Result<&'static dyn FiberEngine, CliError> {
    let registry = EngineRegistry::builtin();
    let engine = match name {
        Some(n) => registry.get(n)?,
        None => registry.default_for(p)?,
    };
    if !engine.supports(p) {
        return Err(CliError::Usage(format!(
            "engine `{}` does not handle p = {p}",
            engine.name()
        )));
    }
    Ok(engine)
}

fn check(c: &Common) -> Result<u8, CliError> {
    let input = Loaded::new(c)?;
    let report = is_p_mono(&input.operator()?, c.p)?;
    input.emit(
        c,
        "pmono",
        json!({
            "verdict": report.verdict,
            "max_sum": rational_str(&report.max_sum),
            "witness": report.witness.as_ref().map(cycle_doc),
        }),
    )?;
    Ok(if report.verdict { 0 } else { 1 })
}

fn trace_payload(t: &ConstructionTrace) -> TracePayload {
    TracePayload {
        engine: t.engine.to_string(),
        final_f: OperatorDocument::from_operator(&t.final_f),
        order: t.steps.iter().map(|s| vector_strs(&s.xk)).collect(),
        seed: OperatorDocument::from_operator(&t.seed),
        steps: t
            .steps
            .iter()
            .map(|s| StepDoc {
                k: s.k,
                xk: vector_strs(&s.xk),
                fiber: rows_doc(&s.fiber_h),
                vrep: vrep_doc(&s.fiber_v()),
            })
            .collect(),
    }
}

fn construct(c: &Common, engine: Option<&str>, order: Order) -> Result<u8, CliError> {
    let input = Loaded::new(c)?;
    let seed = input.operator()?;
    let mut builder = Constructor::new(c.p)?.engine(engine_for(engine, c.p)?)?;
    if order == Order::Input {
        builder = builder.order(first_appearance_order(&input.doc.pairs()?));
    }
    match builder.run(&seed) {
        Ok(trace) => {
            input.emit(c, "trace", trace_payload(&trace))?;
            Ok(0)
        }
        Err(pcm_core::Error::NotCyclicallyMonotone { p, sum, witness }) => {
            eprintln!("pcm: seed is not {p}-cyclically monotone (cyclic sum {sum})");
            input.emit(
                c,
                "pmono",
                json!({ "verdict": false, "max_sum": sum, "witness": cycle_doc(&witness) }),
            )?;
            Ok(1)
        }
        Err(e) => Err(e.into()),
    }
}

fn fiber(c: &Common, z0: &str, engine: Option<&str>, vrep: bool) -> Result<u8, CliError> {
    let input = Loaded::new(c)?;
    let z0 = input.vector("z0", z0)?;
    let q = PolarQuery::new(input.operator()?, c.p)?;
    let h = engine_for(engine, c.p)?.fiber(&q, &z0)?.canonical();
    if vrep {
        let v = vertices_and_rays(&h);
        input.emit(
            c,
            "vrep",
            json!({
                "z0": vector_strs(&z0),
                "empty": v.is_empty(),
                "bounded": v.is_bounded(),
                "vrep": vrep_doc(&v),
            }),
        )?;
    } else {
        input.emit(
            c,
            "fiber",
            json!({
                "z0": vector_strs(&z0),
                "feasible": h.is_feasible(),
                "rows": rows_doc(&h),
            }),
        )?;
    }
    Ok(0)
}

fn domain(c: &Common, z0: &str) -> Result<u8, CliError> {
    let input = Loaded::new(c)?;
    let z0 = input.vector("z0", z0)?;
    let q = PolarQuery::new(input.operator()?, c.p)?;
    let cert = domain_membership(&q, &z0)?;
    input.emit(
        c,
        "domain",
        json!({
            "z0": vector_strs(&z0),
            "member": cert.member,
            "in_hull": cert.in_hull,
            "domain_points": q.operator().domain().iter().map(vector_strs).collect::<Vec<_>>(),
            "lambda": cert.lambda.as_ref().map(|l| l.iter().map(rational_str).collect::<Vec<_>>()),
            "lp_value": cert.lp_value.as_ref().map(rational_str),
        }),
    )?;
    Ok(0)
}

fn ntilde(c: &Common, z1: &str, zps: &str) -> Result<u8, CliError> {
    let input = Loaded::new(c)?;
    let z1 = input.vector("z1", z1)?;
    let zps = input.vector("zps", zps)?;
    let q = PolarQuery::new(input.operator()?, c.p)?;
    let value = n_tilde(&q, &z1, &zps)?;
    input.emit(
        c,
        "scalar",
        json!({
            "name": "ntilde",
            "z1": vector_strs(&z1),
            "zps": vector_strs(&zps),
            "value": rational_str(&value),
        }),
    )?;
    Ok(0)
}

fn mtilde(c: &Common, z0: &str, z1: &str) -> Result<u8, CliError> {
    let input = Loaded::new(c)?;
    let z0 = input.vector("z0", z0)?;
    let z1 = input.vector("z1", z1)?;
    let q = PolarQuery::new(input.operator()?, c.p)?;
    let value = m_tilde(&q, &z0, &z1)?;
    input.emit(
        c,
        "scalar",
        json!({
            "name": "mtilde",
            "z0": vector_strs(&z0),
            "z1": vector_strs(&z1),
            "value": rational_str(&value),
        }),
    )?;
    Ok(0)
}

fn chain_check(c: &Common) -> Result<u8, CliError> {
    let input = Loaded::new(c)?;
    let chain = ChainOperator::new(input.doc.pairs()?, None)?;
    let products: Vec<String> = perpendicularity_check(&chain)
        .iter()
        .map(rational_str)
        .collect();
    let (verdict, max_sum, reason) = match chain_pmono(&chain, c.p) {
        Ok((ok, sum)) => (ok, Some(rational_str(&sum)), None),
        Err(e @ pcm_core::Error::NotPerpendicular { .. }) => (false, None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    input.emit(
        c,
        "chain",
        json!({
            "perpendicularity": products,
            "verdict": verdict,
            "max_sum": max_sum,
            "reason": reason,
        }),
    )?;
    Ok(if verdict { 0 } else { 1 })
}

fn falsify(c: &Common, seed: u64, budget: usize) -> Result<u8, CliError> {
    let input = Loaded::new(c)?;
    let points = input.doc.pairs()?;
    let report = falsify_pmono(&points, c.p, budget, seed)?;
    let note = (!report.found).then_some("no violation found (not a proof)");
    if let Some(n) = note {
        eprintln!("pcm: {n}");
    }
    input.emit(
        c,
        "falsify",
        json!({
            "found": report.found,
            "cycle": report.cycle.as_ref().map(cycle_doc),
            "sum": report.sum.as_ref().map(rational_str),
            "samples_used": report.samples_used,
            "budget": budget,
            "seed": seed,
            "note": note,
        }),
    )?;
    Ok(if report.found { 1 } else { 0 })
}

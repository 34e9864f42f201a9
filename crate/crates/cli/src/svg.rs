//! SVG figures of two-dimensional traces.
//!
//! Regions are clipped to the bounding box in exact arithmetic; only the
//! final pixel coordinates are floating point.

use std::fmt::Write as _;

use num_traits::ToPrimitive;

use pcm_core::polyhedra::{vertices_and_rays, HPolyhedron, LinearInequality, PolytopeHull};
use pcm_core::rational::{int, QVector, Rational};

use crate::doc::{rows_from_doc, vrep_from_doc, TracePayload};
use crate::CliError;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 16.0;
const PALETTE: [&str; 6] = [
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum View {
    Domain,
    Range,
}

/// `[xmin, ymin, xmax, ymax]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BBox(pub [Rational; 4]);

impl BBox {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let v: QVector = s
            .parse()
            .map_err(|_| CliError::Usage(format!("--bbox: expected 4 rationals, got {s:?}")))?;
        if v.dim() != 4 || v[0] >= v[2] || v[1] >= v[3] {
            return Err(CliError::Usage(
                "--bbox: expected xmin,ymin,xmax,ymax with xmin < xmax, ymin < ymax".into(),
            ));
        }
        Ok(BBox([
            v[0].clone(),
            v[1].clone(),
            v[2].clone(),
            v[3].clone(),
        ]))
    }

    /// Smallest box around `points`, padded by 1 on every side.
    fn around<'a>(points: impl IntoIterator<Item = &'a QVector>) -> Self {
        let mut it = points.into_iter();
        let first = it.next().expect("at least one point");
        let (mut lo, mut hi) = (first.clone(), first.clone());
        for p in it {
            for i in 0..2 {
                if p[i] < lo[i] {
                    lo[i] = p[i].clone();
                }
                if p[i] > hi[i] {
                    hi[i] = p[i].clone();
                }
            }
        }
        let one = int(1);
        BBox([&lo[0] - &one, &lo[1] - &one, &hi[0] + &one, &hi[1] + &one])
    }

    fn rows(&self) -> Vec<LinearInequality> {
        let [x0, y0, x1, y1] = &self.0;
        vec![
            LinearInequality::ge(QVector::from_ints(&[1, 0]), x0.clone()),
            LinearInequality::ge(QVector::from_ints(&[0, 1]), y0.clone()),
            LinearInequality::ge(QVector::from_ints(&[-1, 0]), -x1.clone()),
            LinearInequality::ge(QVector::from_ints(&[0, -1]), -y1.clone()),
        ]
    }
}

struct Canvas {
    bbox: BBox,
    scale: f64,
    out: String,
}

impl Canvas {
    fn new(bbox: BBox) -> Self {
        let w = f(&(&bbox.0[2] - &bbox.0[0]));
        let h = f(&(&bbox.0[3] - &bbox.0[1]));
        let scale = SIZE / w.max(h);
        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.0}" height="{:.0}">"#,
            w * scale + 2.0 * MARGIN,
            h * scale + 2.0 * MARGIN
        );
        Canvas { bbox, scale, out }
    }

    fn px(&self, p: &QVector) -> (f64, f64) {
        let x = (f(&p[0]) - f(&self.bbox.0[0])) * self.scale + MARGIN;
        let y = (f(&self.bbox.0[3]) - f(&p[1])) * self.scale + MARGIN;
        (x, y)
    }

    fn line(&mut self, class: &str, a: &QVector, b: &QVector) {
        let (x1, y1) = self.px(a);
        let (x2, y2) = self.px(b);
        let _ = writeln!(
            self.out,
            r#"<line class="{class}" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="black" stroke-width="1.5"/>"#
        );
    }

    fn dot(&mut self, class: &str, p: &QVector, fill: &str) {
        let (cx, cy) = self.px(p);
        let _ = writeln!(
            self.out,
            r#"<circle class="{class}" cx="{cx:.3}" cy="{cy:.3}" r="3.5" fill="{fill}"><title>{p}</title></circle>"#
        );
    }

    fn polygon(&mut self, class: &str, pts: &[QVector], fill: &str) {
        let coords: Vec<String> = pts
            .iter()
            .map(|p| {
                let (x, y) = self.px(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            self.out,
            r#"<polygon class="{class}" points="{}" fill="{fill}" fill-opacity="0.25" stroke="{fill}"/>"#,
            coords.join(" ")
        );
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn f(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(0.0)
}

/// Vertices of a convex polygon in counterclockwise order.
fn ccw(points: impl IntoIterator<Item = QVector>) -> Vec<QVector> {
    let mut pts: Vec<QVector> = points.into_iter().collect();
    if pts.len() < 3 {
        return pts;
    }
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| f(&p[0])).sum::<f64>() / n;
    let cy = pts.iter().map(|p| f(&p[1])).sum::<f64>() / n;
    pts.sort_by(|a, b| {
        let ta = (f(&a[1]) - cy).atan2(f(&a[0]) - cx);
        let tb = (f(&b[1]) - cy).atan2(f(&b[0]) - cx);
        ta.total_cmp(&tb)
    });
    pts
}

fn clipped(h: &HPolyhedron, bbox: &BBox) -> Result<Vec<QVector>, CliError> {
    let boxed = HPolyhedron::new(2, h.rows().iter().cloned().chain(bbox.rows()))?;
    Ok(ccw(vertices_and_rays(&boxed).vertices))
}

fn edges(poly: &[QVector]) -> Vec<(QVector, QVector)> {
    match poly.len() {
        0 | 1 => Vec::new(),
        2 => vec![(poly[0].clone(), poly[1].clone())],
        n => (0..n)
            .map(|i| (poly[i].clone(), poly[(i + 1) % n].clone()))
            .collect(),
    }
}

pub fn render(trace: &TracePayload, view: View, bbox: Option<BBox>) -> Result<String, CliError> {
    let dim = trace.seed.dim;
    if dim != 2 {
        return Err(CliError::Usage(format!(
            "render needs a 2-dimensional trace, got dim = {dim}"
        )));
    }
    let seed = trace.seed.operator()?;
    let final_f = trace.final_f.operator()?;
    match view {
        View::Domain => {
            let hull = PolytopeHull::new(seed.domain())?;
            let corners = ccw(hull.extreme_points());
            let mut c = Canvas::new(bbox.unwrap_or_else(|| BBox::around(&corners)));
            c.out.push_str("<g class=\"hull\">\n");
            c.polygon("hull-region", &corners, "#bbbbbb");
            for (a, b) in edges(&corners) {
                c.line("edge", &a, &b);
            }
            for p in &corners {
                c.dot("vertex", p, "black");
            }
            c.out.push_str("</g>\n<g class=\"seed\">\n");
            for x in seed.domain() {
                c.dot("seed-point", &x, PALETTE[0]);
            }
            c.out.push_str("</g>\n");
            Ok(c.finish())
        }
        View::Range => {
            let images = final_f.range();
            let mut c = Canvas::new(bbox.unwrap_or_else(|| BBox::around(&images)));
            for (i, step) in trace.steps.iter().enumerate() {
                let color = PALETTE[i % PALETTE.len()];
                let h = rows_from_doc(2, &step.fiber)?;
                let region = clipped(&h, &c.bbox)?;
                let _ = writeln!(c.out, r#"<g class="fiber" data-k="{}">"#, step.k);
                if region.len() >= 3 {
                    c.polygon("fiber-region", &region, color);
                } else {
                    for (a, b) in edges(&region) {
                        c.line("fiber-edge", &a, &b);
                    }
                }
                for apex in &vrep_from_doc(2, &step.vrep)?.vertices {
                    c.dot("apex", apex, color);
                }
                c.out.push_str("</g>\n");
            }
            Ok(c.finish())
        }
    }
}

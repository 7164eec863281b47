/*
Copyright 2026 The errt Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::geometry::{Config, Environment, Obstacle};
use crate::planners::Problem;
use crate::tree::SearchTree;

const PANEL: f64 = 480.0;
const MARGIN: f64 = 16.0;

struct Panel {
    axes: (usize, usize),
    x0: f64,
    min: (f64, f64),
    max_v: f64,
    scale: f64,
}

impl Panel {
    fn pt(&self, q: &Config) -> (f64, f64) {
        self.xy(q.get(self.axes.0), q.get(self.axes.1))
    }

    fn xy(&self, u: f64, v: f64) -> (f64, f64) {
        (self.x0 + MARGIN + (u - self.min.0) * self.scale, MARGIN + (self.max_v - v) * self.scale)
    }
}

fn hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut h: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = h.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while h.len() >= start + 2 && cross(h[h.len() - 2], h[h.len() - 1], p) <= 0.0 {
                h.pop();
            }
            h.push(p);
        }
        h.pop();
    }
    h
}

fn box_corners(b: &crate::geometry::OrientedBox) -> Vec<Config> {
    let dim = b.center().dim();
    let m = b.rotation().matrix();
    let h = b.half_extents();
    (0..1usize << dim)
        .map(|mask| {
            b.center().map(|i, c| {
                c + (0..dim).map(|j| m[i][j] * h.get(j) * if mask >> j & 1 == 1 { 1.0 } else { -1.0 }).sum::<f64>()
            })
        })
        .collect()
}

/// SVG drawing of an environment with optional trees, path and endpoints.
/// 3D scenes are drawn as xy, xz and yz projections side by side. The
/// output depends only on the inputs.
pub fn render_svg(env: &Environment, trees: &[SearchTree], path: Option<&[Config]>, problem: Option<&Problem>) -> String {
    let b = env.bounds();
    let pairs: Vec<(usize, usize)> = if env.dim() == 2 { vec![(0, 1)] } else { vec![(0, 1), (0, 2), (1, 2)] };
    let panels: Vec<Panel> = pairs
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| {
            let (wu, wv) = (b.max.get(u) - b.min.get(u), b.max.get(v) - b.min.get(v));
            Panel {
                axes: (u, v),
                x0: i as f64 * (PANEL + 2.0 * MARGIN),
                min: (b.min.get(u), b.min.get(v)),
                max_v: b.max.get(v),
                scale: PANEL / wu.max(wv),
            }
        })
        .collect();
    let width = panels.len() as f64 * (PANEL + 2.0 * MARGIN);
    let height = PANEL + 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for p in &panels {
        let (x0, y0) = p.xy(p.min.0, p.max_v);
        let (x1, y1) = p.xy(b.max.get(p.axes.0), b.min.get(p.axes.1));
        let _ = writeln!(
            s,
            r#"<rect x="{x0:.3}" y="{y0:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="black"/>"#,
            x1 - x0,
            y1 - y0
        );
        let _ = writeln!(s, r##"<g fill="#9aa5b1" stroke="none">"##);
        for o in env.obstacles() {
            match o {
                Obstacle::Sphere(sp) => {
                    let (cx, cy) = p.pt(&sp.center);
                    let _ = writeln!(s, r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}"/>"#, sp.radius * p.scale);
                }
                Obstacle::Box(bx) => {
                    let pts = hull(box_corners(bx).iter().map(|c| p.pt(c)).collect());
                    let list: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
                    let _ = writeln!(s, r#"<polygon points="{}"/>"#, list.join(" "));
                }
            }
        }
        let _ = writeln!(s, "</g>");
        for (ti, t) in trees.iter().enumerate() {
            let colour = if ti == 0 { "#4a90d9" } else { "#d98b4a" };
            let _ = writeln!(s, r#"<g stroke="{colour}" stroke-width="0.6" fill="none">"#);
            for n in t.nodes() {
                if let Some(par) = n.parent {
                    let (ax, ay) = p.pt(t.config(par));
                    let (bx, by) = p.pt(&n.config);
                    let _ = writeln!(s, r#"<line x1="{ax:.3}" y1="{ay:.3}" x2="{bx:.3}" y2="{by:.3}"/>"#);
                }
            }
            let _ = writeln!(s, "</g>");
        }
        if let Some(path) = path.filter(|p| !p.is_empty()) {
            let list: Vec<String> = path.iter().map(|q| p.pt(q)).map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
            let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#d0021b" stroke-width="2"/>"##, list.join(" "));
        }
        if let Some(pr) = problem {
            for (q, colour) in [(&pr.start, "#2e7d32"), (&pr.goal, "#6a1b9a")] {
                let (x, y) = p.pt(q);
                let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="5" fill="{colour}"/>"#);
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_svg(
    out: impl AsRef<Path>,
    env: &Environment,
    trees: &[SearchTree],
    path: Option<&[Config]>,
    problem: Option<&Problem>,
) -> Result<()> {
    std::fs::write(out, render_svg(env, trees, path, problem))?;
    Ok(())
}

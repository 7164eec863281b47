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
//! Cubic B-spline fitting of action paths and equidistant arc-length
//! re-sampling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Config;

const DEGREE: usize = 3;

/// The relative configuration points emitted by one generator call.
///
/// Point `i` (1-based) is expressed relative to the configuration the
/// generator was queried at, and each of its components is expected to lie
/// within `±(i/m)·bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionPath {
    pub points: Vec<Config>,
}

impl ActionPath {
    pub fn new(points: Vec<Config>) -> Self {
        ActionPath { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest violation of the incremental bound, 0 when it holds.
    pub fn bound_violation(&self, bound: f64) -> f64 {
        let m = self.points.len() as f64;
        self.points
            .iter()
            .enumerate()
            .flat_map(|(i, p)| {
                let lim = (i + 1) as f64 / m * bound;
                p.coords().iter().map(move |c| (c.abs() - lim).max(0.0)).collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    }
}

/// Knots spaced (nearly) equally in arc length along a spline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResampledPath {
    pub knots: Vec<Config>,
    pub spacing: f64,
}

impl ResampledPath {
    /// Number of knots after the first one; the first knot is the anchor the
    /// path was generated from.
    pub fn steps(&self) -> usize {
        self.knots.len().saturating_sub(1)
    }

    pub fn first(&self) -> &Config {
        &self.knots[0]
    }

    pub fn last(&self) -> &Config {
        self.knots.last().expect("resampled path is never empty")
    }

    pub fn polyline_length(&self) -> f64 {
        polyline_length(&self.knots)
    }
}

pub fn polyline_length(points: &[Config]) -> f64 {
    points.windows(2).map(|w| w[0].distance(&w[1])).sum()
}

/// Clamped cubic B-spline over the parameter domain `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicBSpline {
    ctrl: Vec<Config>,
    knots: Vec<f64>,
    deriv_ctrl: Vec<Config>,
}

impl CubicBSpline {
    /// Clamped uniform spline; fewer than four control points are padded by
    /// repeating the last one.
    pub fn clamped_uniform(mut ctrl: Vec<Config>) -> Result<Self> {
        if ctrl.is_empty() {
            return Err(Error::InvalidParameter("spline needs at least one control point".into()));
        }
        while ctrl.len() < DEGREE + 1 {
            let last = *ctrl.last().unwrap();
            ctrl.push(last);
        }
        let n = ctrl.len();
        let spans = n - DEGREE;
        let mut knots = vec![0.0; DEGREE + 1];
        knots.extend((1..spans).map(|i| i as f64 / spans as f64));
        knots.extend(std::iter::repeat_n(1.0, DEGREE + 1));
        CubicBSpline::with_knots(ctrl, knots)
    }

    /// Spline with an explicit clamped knot vector of length `ctrl.len() + 4`.
    pub fn with_knots(ctrl: Vec<Config>, knots: Vec<f64>) -> Result<Self> {
        if ctrl.len() < DEGREE + 1 || knots.len() != ctrl.len() + DEGREE + 1 {
            return Err(Error::InvalidParameter("knot vector does not match control points".into()));
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter("knot vector must be non-decreasing".into()));
        }
        let dim = ctrl[0].dim();
        for c in &ctrl {
            c.check_dim(dim)?;
        }
        let deriv_ctrl = (0..ctrl.len() - 1)
            .map(|i| {
                let den = knots[i + DEGREE + 1] - knots[i + 1];
                if den > 0.0 {
                    (ctrl[i + 1] - ctrl[i]) * (DEGREE as f64 / den)
                } else {
                    Config::zeros(dim)
                }
            })
            .collect();
        Ok(CubicBSpline { ctrl, knots, deriv_ctrl })
    }

    /// Global cubic interpolation through `points` with chord-length
    /// parameters and averaged knots.
    pub fn interpolate(points: &[Config]) -> Result<Self> {
        let n = points.len();
        if n < 2 {
            return CubicBSpline::clamped_uniform(points.to_vec());
        }
        if n < 4 {
            // Split the longest chord until a cubic is possible; the inserted
            // points lie on the polyline so the original points are still hit.
            let mut pts = points.to_vec();
            while pts.len() < DEGREE + 1 {
                let i = (0..pts.len() - 1)
                    .max_by(|&a, &b| pts[a].distance(&pts[a + 1]).total_cmp(&pts[b].distance(&pts[b + 1])))
                    .unwrap();
                let mid = pts[i].lerp(&pts[i + 1], 0.5);
                pts.insert(i + 1, mid);
            }
            return CubicBSpline::interpolate(&pts);
        }
        let total: f64 = polyline_length(points);
        let mut params = vec![0.0; n];
        let mut acc = 0.0;
        for i in 1..n {
            acc += points[i - 1].distance(&points[i]);
            params[i] = if total > 0.0 { acc / total } else { i as f64 / (n - 1) as f64 };
        }
        params[n - 1] = 1.0;
        let mut knots = vec![0.0; DEGREE + 1];
        for j in 1..n - DEGREE {
            knots.push(params[j..j + DEGREE].iter().sum::<f64>() / DEGREE as f64);
        }
        knots.extend(std::iter::repeat_n(1.0, DEGREE + 1));
        let dim = points[0].dim();
        let mut a = vec![vec![0.0; n]; n];
        for (row, &u) in params.iter().enumerate() {
            let span = find_span(&knots, n, u);
            let basis = basis_functions(&knots, span, u);
            for (k, b) in basis.iter().enumerate() {
                a[row][span - DEGREE + k] = *b;
            }
        }
        let mut rhs: Vec<[f64; 3]> = points.iter().map(|p| *p.raw()).collect();
        solve_in_place(&mut a, &mut rhs)?;
        let ctrl = rhs.into_iter().map(|c| Config::from_array(c, dim)).collect();
        CubicBSpline::with_knots(ctrl, knots)
    }

    pub fn control_points(&self) -> &[Config] {
        &self.ctrl
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn dim(&self) -> usize {
        self.ctrl[0].dim()
    }

    pub fn eval(&self, t: f64) -> Config {
        de_boor(&self.ctrl, &self.knots, DEGREE, 0, t)
    }

    pub fn derivative(&self, t: f64) -> Config {
        de_boor(&self.deriv_ctrl, &self.knots, DEGREE - 1, 1, t)
    }

    /// Arc length between parameters `t0 <= t1`, integrated span by span
    /// with adaptive 7-point Gauss-Legendre quadrature.
    pub fn arc_length(&self, t0: f64, t1: f64) -> f64 {
        let (t0, t1) = (t0.clamp(0.0, 1.0), t1.clamp(0.0, 1.0));
        if t1 <= t0 {
            return 0.0;
        }
        let mut total = 0.0;
        let mut a = t0;
        for &k in self.knots.iter().skip(DEGREE + 1) {
            if k <= a {
                continue;
            }
            let b = k.min(t1);
            let whole = self.gauss(a, b);
            total += self.adaptive(a, b, whole, 0);
            a = b;
            if a >= t1 {
                break;
            }
        }
        total
    }

    pub fn length(&self) -> f64 {
        self.arc_length(0.0, 1.0)
    }

    fn gauss(&self, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        GL7.iter().map(|(x, w)| w * self.derivative(mid + half * x).norm()).sum::<f64>() * half
    }

    fn adaptive(&self, a: f64, b: f64, whole: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = self.gauss(a, m);
        let right = self.gauss(m, b);
        let refined = left + right;
        if depth >= 24 || (refined - whole).abs() <= 1e-10 * refined.abs().max(1e-12) {
            refined
        } else {
            self.adaptive(a, m, left, depth + 1) + self.adaptive(m, b, right, depth + 1)
        }
    }

    /// Inserts knot `u` once (Boehm's algorithm); the curve is unchanged.
    pub fn insert_knot(&self, u: f64) -> CubicBSpline {
        let n = self.ctrl.len();
        let k = find_span(&self.knots, n, u);
        let mut ctrl = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let p = if i + DEGREE <= k {
                self.ctrl[i]
            } else if i > k {
                self.ctrl[i - 1]
            } else {
                let den = self.knots[i + DEGREE] - self.knots[i];
                let alpha = if den > 0.0 { (u - self.knots[i]) / den } else { 0.0 };
                self.ctrl[i - 1] * (1.0 - alpha) + self.ctrl[i] * alpha
            };
            ctrl.push(p);
        }
        let mut knots = self.knots.clone();
        knots.insert(k + 1, u);
        CubicBSpline::with_knots(ctrl, knots).expect("knot insertion keeps the spline well formed")
    }

    /// Inserts a knot at the middle of every non-empty span. A uniform
    /// spline with `n` control points becomes a uniform one with `2n - 3`.
    pub fn refine_midpoints(&self) -> CubicBSpline {
        let mids: Vec<f64> = self
            .knots
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| 0.5 * (w[0] + w[1]))
            .collect();
        mids.into_iter().fold(self.clone(), |s, u| s.insert_knot(u))
    }
}

/// Fits the spline whose control polygon is the anchor followed by the
/// anchor-relative action points.
pub fn build_spline(anchor: &Config, action: &ActionPath) -> Result<CubicBSpline> {
    if action.is_empty() {
        return Err(Error::InvalidParameter("action path needs at least one point".into()));
    }
    let mut ctrl = Vec::with_capacity(action.len() + 1);
    ctrl.push(*anchor);
    for p in &action.points {
        p.check_dim(anchor.dim())?;
        ctrl.push(*anchor + *p);
    }
    CubicBSpline::clamped_uniform(ctrl)
}

/// Arc length of `spline` between normalized parameters `t0` and `t1`.
pub fn arc_length(spline: &CubicBSpline, t0: f64, t1: f64) -> f64 {
    spline.arc_length(t0, t1)
}

/// Pieces per knot span in the cumulative arc-length table.
const TABLE_PIECES: usize = 4;

/// Parameters of the equidistant knots: arc lengths `0, d, 2d, ...` plus the
/// curve end when it is not already a knot.
pub fn resample_params(spline: &CubicBSpline, spacing: f64) -> Vec<f64> {
    assert!(spacing > 0.0, "spacing must be positive");
    // Cumulative arc length at a few parameters per span.
    let mut ts = vec![0.0];
    let mut ss = vec![0.0];
    for w in spline.knots.windows(2).filter(|w| w[1] > w[0] && w[0] >= 0.0 && w[1] <= 1.0) {
        for i in 0..TABLE_PIECES {
            let a = w[0] + (w[1] - w[0]) * i as f64 / TABLE_PIECES as f64;
            let b = w[0] + (w[1] - w[0]) * (i + 1) as f64 / TABLE_PIECES as f64;
            let seg = spline.adaptive(a, b, spline.gauss(a, b), 0);
            ts.push(b);
            ss.push(ss.last().unwrap() + seg);
        }
    }
    let total = *ss.last().unwrap();
    if total <= 1e-12 {
        return vec![0.0];
    }
    let tol = 1e-9 * total;
    let mut params = vec![0.0];
    let mut k = 1usize;
    while (k as f64) * spacing < total - 1e-6 * spacing {
        let target = k as f64 * spacing;
        let j = ss.partition_point(|&v| v <= target).clamp(1, ss.len() - 1) - 1;
        let (t0, s0) = (ts[j], ss[j]);
        let (mut lo, mut hi) = (t0, ts[j + 1]);
        let piece = ss[j + 1] - s0;
        let mut t = if piece > 0.0 { lo + (hi - lo) * (target - s0) / piece } else { lo };
        for _ in 0..100 {
            let f = s0 + spline.adaptive(t0, t, spline.gauss(t0, t), 0) - target;
            if f.abs() <= tol {
                break;
            }
            if f < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let speed = spline.derivative(t).norm();
            let newton = if speed > 0.0 { t - f / speed } else { f64::NAN };
            t = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo <= 1e-15 {
                break;
            }
        }
        params.push(t);
        k += 1;
    }
    params.push(1.0);
    params
}

/// Re-samples `spline` into knots spaced `spacing` apart in arc length; the
/// curve end is always the final knot.
pub fn resample_equidistant(spline: &CubicBSpline, spacing: f64) -> ResampledPath {
    let params = resample_params(spline, spacing);
    let mut knots: Vec<Config> = params.iter().map(|&t| spline.eval(t)).collect();
    if params.len() == 1 {
        knots.truncate(1);
    }
    ResampledPath { knots, spacing }
}

const GL7: [(f64, f64); 7] = [
    (0.0, 0.417_959_183_673_469_4),
    (0.405_845_151_377_397_2, 0.381_830_050_505_118_9),
    (-0.405_845_151_377_397_2, 0.381_830_050_505_118_9),
    (0.741_531_185_599_394_4, 0.279_705_391_489_276_7),
    (-0.741_531_185_599_394_4, 0.279_705_391_489_276_7),
    (0.949_107_912_342_758_5, 0.129_484_966_168_869_7),
    (-0.949_107_912_342_758_5, 0.129_484_966_168_869_7),
];

/// Index `k` of the knot span `[knots[k], knots[k+1])` containing `u`.
fn find_span(knots: &[f64], n_ctrl: usize, u: f64) -> usize {
    let last = n_ctrl - 1;
    if u >= knots[last + 1] {
        // Last non-empty span.
        let mut k = last;
        while k > DEGREE && knots[k] >= knots[k + 1] {
            k -= 1;
        }
        return k;
    }
    if u <= knots[DEGREE] {
        let mut k = DEGREE;
        while k < last && knots[k + 1] <= knots[DEGREE] {
            k += 1;
        }
        return k;
    }
    let (mut lo, mut hi) = (DEGREE, last + 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if u < knots[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

fn basis_functions(knots: &[f64], span: usize, u: f64) -> [f64; DEGREE + 1] {
    let mut n = [0.0; DEGREE + 1];
    let mut left = [0.0; DEGREE + 1];
    let mut right = [0.0; DEGREE + 1];
    n[0] = 1.0;
    for j in 1..=DEGREE {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        let mut saved = 0.0;
        for r in 0..j {
            let den = right[r + 1] + left[j - r];
            let temp = if den != 0.0 { n[r] / den } else { 0.0 };
            n[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        n[j] = saved;
    }
    n
}

/// De Boor evaluation of a degree-`p` spline whose control points are
/// defined over `knots[offset..]`.
fn de_boor(ctrl: &[Config], knots: &[f64], p: usize, offset: usize, t: f64) -> Config {
    let t = t.clamp(0.0, 1.0);
    let knots = &knots[offset..knots.len() - offset];
    let n = ctrl.len();
    let k = {
        let last = n - 1;
        if t >= knots[last + 1] {
            let mut k = last;
            while k > p && knots[k] >= knots[k + 1] {
                k -= 1;
            }
            k
        } else {
            let mut k = p;
            while k < last && knots[k + 1] <= t {
                k += 1;
            }
            k
        }
    };
    let mut d: [Config; DEGREE + 1] = [ctrl[0]; DEGREE + 1];
    for j in 0..=p {
        d[j] = ctrl[j + k - p];
    }
    for r in 1..=p {
        for j in (r..=p).rev() {
            let i = j + k - p;
            let den = knots[i + p + 1 - r] - knots[i];
            let alpha = if den > 0.0 { (t - knots[i]) / den } else { 0.0 };
            d[j] = d[j - 1] * (1.0 - alpha) + d[j] * alpha;
        }
    }
    d[p]
}

#[allow(clippy::needless_range_loop)]
fn solve_in_place(a: &mut [Vec<f64>], rhs: &mut [[f64; 3]]) -> Result<()> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        if a[pivot][col].abs() < 1e-14 {
            return Err(Error::InvalidParameter("singular interpolation system".into()));
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            for d in 0..3 {
                rhs[row][d] -= f * rhs[col][d];
            }
        }
    }
    for col in (0..n).rev() {
        for d in 0..3 {
            let mut v = rhs[col][d];
            for c in col + 1..n {
                v -= a[col][c] * rhs[c][d];
            }
            rhs[col][d] = v / a[col][col];
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn p2(x: f64, y: f64) -> Config {
        Config::new2(x, y)
    }

    /// Arc length by summing a dense polyline of curve samples.
    fn polyline_arc(s: &CubicBSpline, t0: f64, t1: f64, segments: usize) -> f64 {
        (0..segments)
            .map(|i| {
                let a = t0 + (t1 - t0) * i as f64 / segments as f64;
                let b = t0 + (t1 - t0) * (i + 1) as f64 / segments as f64;
                s.eval(a).distance(&s.eval(b))
            })
            .sum()
    }

    fn convex_hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
        let mut lower: Vec<(f64, f64)> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<(f64, f64)> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        lower
    }

    #[test]
    fn collinear_controls_give_a_straight_curve() {
        let action = ActionPath::new(vec![p2(0.5, 0.0), p2(1.5, 0.0), p2(1.0, 0.0), p2(3.0, 0.0)]);
        let s = build_spline(&p2(0.0, 0.0), &action).unwrap();
        assert_eq!(s.eval(0.0), p2(0.0, 0.0));
        assert!(s.eval(1.0).distance(&p2(3.0, 0.0)) < 1e-12);
        for i in 0..=200 {
            assert!(s.eval(i as f64 / 200.0).get(1).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_action_is_a_point() {
        let action = ActionPath::new(vec![p2(0.0, 0.0); 8]);
        let s = build_spline(&p2(1.0, 1.0), &action).unwrap();
        assert_eq!(s.length(), 0.0);
        let r = resample_equidistant(&s, 0.25);
        assert_eq!(r.knots, vec![p2(1.0, 1.0)]);
        assert!(build_spline(&p2(0.0, 0.0), &ActionPath::new(vec![])).is_err());
    }

    #[test]
    fn l_shaped_polygon_stays_in_hull() {
        let action = ActionPath::new(vec![p2(1.0, 0.0), p2(2.0, 0.0), p2(2.0, 1.0), p2(2.0, 2.0)]);
        let s = build_spline(&p2(0.0, 0.0), &action).unwrap();
        let hull = convex_hull(s.control_points().iter().map(|c| (c.get(0), c.get(1))).collect());
        for i in 0..1000 {
            let q = s.eval(i as f64 / 999.0);
            for w in 0..hull.len() {
                let (a, b) = (hull[w], hull[(w + 1) % hull.len()]);
                let cross = (b.0 - a.0) * (q.get(1) - a.1) - (b.1 - a.1) * (q.get(0) - a.0);
                assert!(cross >= -1e-12, "sample {i} outside hull");
            }
        }
    }

    #[test]
    fn arc_length_examples() {
        let action = ActionPath::new(vec![p2(1.0, 0.0), p2(2.0, 0.0), p2(3.0, 0.0)]);
        let s = build_spline(&p2(0.0, 0.0), &action).unwrap();
        assert!((arc_length(&s, 0.0, 1.0) - 3.0).abs() <= 3e-6);
        assert_eq!(arc_length(&s, 0.4, 0.4), 0.0);

        let curved = build_spline(&p2(0.0, 0.0), &ActionPath::new(vec![p2(1.0, 2.0), p2(3.0, -1.0), p2(4.0, 3.0), p2(0.5, 2.5)])).unwrap();
        let oracle = polyline_arc(&curved, 0.0, 1.0, 100_000);
        let got = arc_length(&curved, 0.0, 1.0);
        assert!(((got - oracle) / oracle).abs() < 1e-4, "{got} vs {oracle}");
        let part = arc_length(&curved, 0.13, 0.71);
        let oracle = polyline_arc(&curved, 0.13, 0.71, 100_000);
        assert!(((part - oracle) / oracle).abs() < 1e-6);
    }

    #[test]
    fn resample_straight_examples() {
        let s = build_spline(&p2(0.0, 0.0), &ActionPath::new(vec![p2(0.3, 0.0), p2(1.1, 0.0), p2(2.0, 0.0)])).unwrap();
        let r = resample_equidistant(&s, 0.5);
        let xs: Vec<f64> = r.knots.iter().map(|k| k.get(0)).collect();
        assert_eq!(xs.len(), 5);
        for (x, want) in xs.iter().zip([0.0, 0.5, 1.0, 1.5, 2.0]) {
            assert!((x - want).abs() < 1e-5, "{xs:?}");
        }

        let s = build_spline(&p2(0.0, 0.0), &ActionPath::new(vec![p2(0.9, 0.0), p2(1.7, 0.0)])).unwrap();
        let r = resample_equidistant(&s, 0.5);
        let xs: Vec<f64> = r.knots.iter().map(|k| k.get(0)).collect();
        assert_eq!(xs.len(), 5);
        for (x, want) in xs.iter().zip([0.0, 0.5, 1.0, 1.5, 1.7]) {
            assert!((x - want).abs() < 1e-5, "{xs:?}");
        }
    }

    #[test]
    fn random_splines_resample_uniformly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let pts: Vec<Config> = (0..4).map(|_| p2(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))).collect();
            let s = build_spline(&p2(0.0, 0.0), &ActionPath::new(pts)).unwrap();
            let d = 0.25;
            let params = resample_params(&s, d);
            let total = polyline_arc(&s, 0.0, 1.0, 100_000);
            let floor = (total / d).floor() as usize;
            let on_knot = (total / d - floor as f64).abs() < 1e-6;
            assert_eq!(params.len(), floor + 1 + usize::from(!on_knot));
            for (i, w) in params.windows(2).enumerate() {
                let gap = polyline_arc(&s, w[0], w[1], 4_000);
                if i + 2 < params.len() {
                    assert!((gap - d).abs() <= 0.01 * d, "gap {gap}");
                } else {
                    assert!(gap > 0.0 && gap <= d * 1.01);
                }
            }
        }
    }

    #[test]
    fn knot_insertion_preserves_the_curve() {
        let pts = vec![p2(0.0, 0.0), p2(1.0, 2.0), p2(3.0, -1.0), p2(4.0, 3.0), p2(6.0, 0.0), p2(5.0, -2.0)];
        let s = CubicBSpline::clamped_uniform(pts).unwrap();
        let r = s.refine_midpoints();
        assert_eq!(r.control_points().len(), 2 * 6 - 3);
        let uniform = CubicBSpline::clamped_uniform(r.control_points().to_vec()).unwrap();
        assert_eq!(uniform.knots().len(), r.knots().len());
        for (a, b) in uniform.knots().iter().zip(r.knots()) {
            assert!((a - b).abs() < 1e-12);
        }
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            assert!(s.eval(t).distance(&r.eval(t)) < 1e-12);
        }
    }

    #[test]
    fn interpolation_passes_through_points() {
        let pts: Vec<Config> = (0..9).map(|i| p2(i as f64 * 0.3, (i as f64 * 0.4).sin())).collect();
        let s = CubicBSpline::interpolate(&pts).unwrap();
        let total = polyline_length(&pts);
        let mut acc = 0.0;
        for (i, p) in pts.iter().enumerate() {
            if i > 0 {
                acc += pts[i - 1].distance(p);
            }
            assert!(s.eval(acc / total).distance(p) < 1e-9);
        }
    }

    #[test]
    fn works_in_three_dimensions() {
        let action = ActionPath::new(vec![Config::new3(0.5, 0.5, 0.5), Config::new3(1.0, 0.0, 1.0), Config::new3(2.0, 1.0, 1.0)]);
        let s = build_spline(&Config::new3(1.0, 1.0, 1.0), &action).unwrap();
        let r = resample_equidistant(&s, 0.2);
        assert_eq!(r.knots[0], Config::new3(1.0, 1.0, 1.0));
        assert!(r.last().distance(&Config::new3(3.0, 2.0, 2.0)) < 1e-12);
    }

    proptest! {
        #[test]
        fn polyline_never_exceeds_arc_length(
            pts in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..10),
            d in 0.05f64..1.0,
        ) {
            let action = ActionPath::new(pts.iter().map(|(x, y)| p2(*x, *y)).collect());
            let s = build_spline(&p2(0.0, 0.0), &action).unwrap();
            let r = resample_equidistant(&s, d);
            prop_assert!(r.polyline_length() <= s.length() * (1.0 + 1e-9) + 1e-12);
            prop_assert_eq!(r.knots[0], p2(0.0, 0.0));
            for w in r.knots.windows(2) {
                prop_assert!(w[0].distance(&w[1]) <= 1.01 * d);
            }
        }
    }
}

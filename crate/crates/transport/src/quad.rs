//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.
//!
//! The interval is first cut into panels no wider than `max_panel`, which is
//! how callers force oscillatory integrands to be resolved; the panel with
//! the largest error estimate is then bisected until the global tolerance is
//! met.

use std::collections::BinaryHeap;

/// Values that can be integrated: scalars or small fixed vectors (e.g. the
/// real and imaginary parts of a phase integral).
pub trait QuadValue: Copy {
    fn zero() -> Self;
    fn add(self, o: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    fn norm(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl<const N: usize> QuadValue for [f64; N] {
    fn zero() -> Self {
        [0.0; N]
    }
    fn add(mut self, o: Self) -> Self {
        for i in 0..N {
            self[i] += o[i];
        }
        self
    }
    fn scale(mut self, s: f64) -> Self {
        self.iter_mut().for_each(|x| *x *= s);
        self
    }
    fn norm(self) -> f64 {
        self.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth of any initial panel.
    pub max_depth: u32,
    pub max_panel: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_depth: 40,
            max_panel: f64::INFINITY,
        }
    }
}

impl QuadOptions {
    pub fn with_max_panel(self, max_panel: f64) -> Self {
        QuadOptions { max_panel, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<V> {
    pub value: V,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("quadrature did not converge on [{a}, {b}]: error {error:e} after depth limit")]
    NoConvergence { a: f64, b: f64, error: f64 },
    #[error("non-finite integrand on [{a}, {b}]")]
    NonFinite { a: f64, b: f64 },
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One GK15 panel: `(kronrod, |kronrod − gauss|)`.
pub fn gk15<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> (V, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc.scale(WGK[7]);
    let mut g = fc.scale(WG[3]);
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx).add(f(c + dx));
        k = k.add(s.scale(WGK[j]));
        if j % 2 == 1 {
            g = g.add(s.scale(WG[j / 2]));
        }
    }
    let k = k.scale(h);
    let g = g.scale(h);
    let err = k.add(g.scale(-1.0)).norm();
    (k, err)
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
    depth: u32,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

pub fn integrate<V, F>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult<V>, QuadError>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    if a == b {
        return Ok(QuadResult {
            value: V::zero(),
            error: 0.0,
            evaluations: 0,
        });
    }
    let n0 = if opts.max_panel.is_finite() && opts.max_panel > 0.0 {
        ((b - a).abs() / opts.max_panel).ceil().max(1.0) as usize
    } else {
        1
    };
    let mut heap = BinaryHeap::with_capacity(2 * n0);
    let mut evals = 0;
    let (mut total, mut err_total) = (V::zero(), 0.0);
    for i in 0..n0 {
        let pa = a + (b - a) * i as f64 / n0 as f64;
        let pb = if i + 1 == n0 {
            b
        } else {
            a + (b - a) * (i + 1) as f64 / n0 as f64
        };
        let (v, e) = gk15(&mut f, pa, pb);
        evals += 15;
        total = total.add(v);
        err_total += e;
        heap.push(Panel {
            a: pa,
            b: pb,
            value: v,
            error: e,
            depth: 0,
        });
    }

    loop {
        if !(err_total.is_finite() && total.norm().is_finite()) {
            return Err(QuadError::NonFinite { a, b });
        }
        let tol = opts.abs_tol.max(opts.rel_tol * total.norm());
        if err_total <= tol {
            break;
        }
        let worst = heap.pop().expect("at least one panel");
        if worst.depth >= opts.max_depth || worst.error == 0.0 {
            return Err(QuadError::NoConvergence {
                a: worst.a,
                b: worst.b,
                error: err_total,
            });
        }
        let m = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(&mut f, worst.a, m);
        let (v2, e2) = gk15(&mut f, m, worst.b);
        evals += 30;
        total = total.add(worst.value.scale(-1.0)).add(v1).add(v2);
        err_total += e1 + e2 - worst.error;
        for (pa, pb, v, e) in [(worst.a, m, v1, e1), (m, worst.b, v2, e2)] {
            heap.push(Panel {
                a: pa,
                b: pb,
                value: v,
                error: e,
                depth: worst.depth + 1,
            });
        }
    }
    // re-sum to shed the drift of the incremental updates
    let value = heap.iter().fold(V::zero(), |s, p| s.add(p.value));
    let error = heap.iter().map(|p| p.error).sum();
    Ok(QuadResult {
        value,
        error,
        evaluations: evals,
    })
}

/// Cumulative integral `∫_{grid[0]}^{grid[k]} f` for every grid node.
pub fn cumulative<V, F>(mut f: F, grid: &[f64], opts: &QuadOptions) -> Result<Vec<V>, QuadError>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = V::zero();
    if grid.is_empty() {
        return Ok(out);
    }
    out.push(acc);
    // each segment gets the global absolute tolerance split evenly
    let seg_opts = QuadOptions {
        abs_tol: opts.abs_tol / grid.len().max(1) as f64,
        ..*opts
    };
    for w in grid.windows(2) {
        let r = integrate(&mut f, w[0], w[1], &seg_opts)?;
        acc = acc.add(r.value);
        out.push(acc);
    }
    Ok(out)
}

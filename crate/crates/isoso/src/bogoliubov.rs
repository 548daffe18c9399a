use num_complex::Complex64 as C64;

use cho_model::{AdiabaticFrame, ScenarioParams};

use crate::{IsosoError, CRITICAL_GUARD};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// A linear combination of the in-vacuum ladder operators, stored as the
/// coefficients of `(a_S, a_E, a_S†, a_E†)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ladder(pub [C64; 4]);

impl Ladder {
    pub const ZERO: Ladder = Ladder([C64 { re: 0.0, im: 0.0 }; 4]);

    pub fn scale(self, c: C64) -> Ladder {
        Ladder(self.0.map(|x| x * c))
    }

    pub fn add(self, o: Ladder) -> Ladder {
        let mut r = self.0;
        for (a, b) in r.iter_mut().zip(o.0) {
            *a += b;
        }
        Ladder(r)
    }

    /// `⟨0|A B|0⟩`: only `a_I a_I†` survives.
    pub fn vev(&self, b: &Ladder) -> C64 {
        self.0[0] * b.0[2] + self.0[1] * b.0[3]
    }

    /// `[A, B]` (a c-number).
    pub fn commutator(&self, b: &Ladder) -> C64 {
        self.vev(b) - b.vev(self)
    }
}

/// The normal-mode operators inside the window in terms of the in-vacuum
/// ones. `b_i‡` is the partner of `b_i` in the mode expansion
/// `x_i = e^{−iω_iΔt} b_i/√(2|ω_i|) + e^{iω_iΔt} b_i‡/√(2|ω_i|)`; it is `b_i†`
/// for a real frequency, while for `ω₁ = i|ω₁|` both are Hermitian and
/// `[b₁, b₁‡] = −i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovSet {
    pub alpha_1s: C64,
    pub alpha_1e: C64,
    pub beta_1s: C64,
    pub beta_1e: C64,
    pub alpha_2s: C64,
    pub alpha_2e: C64,
    pub beta_2s: C64,
    pub beta_2e: C64,
    pub delta_flag: u8,
    pub theta: f64,
    pub omega1_abs: f64,
    pub omega2: f64,
    /// `ω₁ = i^δ|ω₁|`.
    pub omega1: C64,
    /// `(b₁, b₁‡, b₂, b₂‡)`.
    pub ops: [Ladder; 4],
}

impl BogoliubovSet {
    /// `[b_i, b_j‡]`; equals `δ_ij (−i)^δ_i`.
    pub fn commutator(&self, i: usize, j: usize) -> C64 {
        self.ops[2 * i].commutator(&self.ops[2 * j + 1])
    }

    pub fn correlators(&self) -> BCorrelators {
        let mut m = [[C64::new(0.0, 0.0); 4]; 4];
        for (k, a) in self.ops.iter().enumerate() {
            for (l, b) in self.ops.iter().enumerate() {
                m[k][l] = a.vev(b);
            }
        }
        BCorrelators(m)
    }

    /// Mode-function weights `(u, v)` with `x_S(Δt) = Σ u_k B_k` and
    /// `p_S(Δt) = Σ v_k B_k` over `B = (b₁, b₁‡, b₂, b₂‡)`.
    pub fn system_weights(&self, dt: f64) -> ([C64; 4], [C64; 4]) {
        let (c, s) = (self.theta.cos(), self.theta.sin());
        let mut u = [C64::new(0.0, 0.0); 4];
        let mut v = u;
        for (i, (w, abs, rot)) in [
            (self.omega1, self.omega1_abs, c),
            (C64::new(self.omega2, 0.0), self.omega2, s),
        ]
        .into_iter()
        .enumerate()
        {
            let norm = rot / (2.0 * abs).sqrt();
            let f = (-I * w * dt).exp() * norm;
            let g = (I * w * dt).exp() * norm;
            u[2 * i] = f;
            u[2 * i + 1] = g;
            v[2 * i] = -I * w * f;
            v[2 * i + 1] = I * w * g;
        }
        (u, v)
    }
}

/// All sixteen vacuum two-point functions `⟨B_k B_l⟩` over
/// `B = (b₁, b₁‡, b₂, b₂‡)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BCorrelators(pub [[C64; 4]; 4]);

impl BCorrelators {
    pub fn get(&self, k: usize, l: usize) -> C64 {
        self.0[k][l]
    }

    /// `⟨(Σ u_k B_k)(Σ v_l B_l)⟩`.
    pub fn contract(&self, u: &[C64; 4], v: &[C64; 4]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..4 {
            for l in 0..4 {
                acc += u[k] * v[l] * self.0[k][l];
            }
        }
        acc
    }
}

/// Matching at `t = −t₀`: positions and momenta are continuous, which fixes
/// the window's normal-mode operators in terms of the in-vacuum ones.
pub fn bogoliubov_coeffs(p: &ScenarioParams) -> Result<BogoliubovSet, IsosoError> {
    p.validate()?;
    let psi = p.psi();
    if (psi - 1.0).abs() < CRITICAL_GUARD {
        return Err(IsosoError::CriticalPoint { psi });
    }
    let fr = AdiabaticFrame::from_coupling(p.omega_s, p.omega_e, p.xi0, 0.0)?;
    let delta = fr.delta_flag;
    let omega1 = if delta == 0 {
        C64::new(fr.omega1_abs, 0.0)
    } else {
        C64::new(0.0, fr.omega1_abs)
    };

    // x_I, p_I at the edge, with the reference phases e^{±iω_I t₀}
    let edge = |k: usize, w: f64| {
        let ph = C64::from_polar(1.0, w * p.t0);
        let n = 1.0 / (2.0 * w).sqrt();
        let mut x = Ladder::ZERO;
        let mut q = Ladder::ZERO;
        x.0[k] = ph * n;
        x.0[k + 2] = ph.conj() * n;
        q.0[k] = -I * w * ph * n;
        q.0[k + 2] = I * w * ph.conj() * n;
        (x, q)
    };
    let (xs, ps) = edge(0, p.omega_s);
    let (xe, pe) = edge(1, p.omega_e);
    let (c, s) = (C64::new(fr.theta.cos(), 0.0), C64::new(fr.theta.sin(), 0.0));
    let x1 = xs.scale(c).add(xe.scale(-s));
    let p1 = ps.scale(c).add(pe.scale(-s));
    let x2 = xs.scale(s).add(xe.scale(c));
    let p2 = ps.scale(s).add(pe.scale(c));

    // b = √(|ω|/2)(x + i p/ω), b‡ = √(|ω|/2)(x − i p/ω)
    let pair = |x: Ladder, q: Ladder, w: C64, abs: f64| {
        let n = C64::new((0.5 * abs).sqrt(), 0.0);
        let k = I / w;
        (x.add(q.scale(k)).scale(n), x.add(q.scale(-k)).scale(n))
    };
    let (b1, b1d) = pair(x1, p1, omega1, fr.omega1_abs);
    let (b2, b2d) = pair(x2, p2, C64::new(fr.omega2, 0.0), fr.omega2);

    Ok(BogoliubovSet {
        alpha_1s: b1.0[0],
        alpha_1e: b1.0[1],
        beta_1s: b1.0[2],
        beta_1e: b1.0[3],
        alpha_2s: b2.0[0],
        alpha_2e: b2.0[1],
        beta_2s: b2.0[2],
        beta_2e: b2.0[3],
        delta_flag: delta,
        theta: fr.theta,
        omega1_abs: fr.omega1_abs,
        omega2: fr.omega2,
        omega1,
        ops: [b1, b1d, b2, b2d],
    })
}
